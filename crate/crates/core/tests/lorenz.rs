use granular::lorenz::*;

#[test]
fn attractor_sample_stays_in_the_butterfly() {
    let p = LorenzParams::default();
    let pts = attractor_sample(&p, 20_000, DEFAULT_SPINUP, 7).unwrap();
    assert_eq!(pts.len(), 20_000);
    for s in &pts {
        assert!(
            s.x.abs() <= 25.0 && s.y.abs() <= 35.0 && (0.0..=55.0).contains(&s.z),
            "{s:?}"
        );
    }
    assert_eq!(pts, attractor_sample(&p, 20_000, DEFAULT_SPINUP, 7).unwrap());
}

#[test]
fn rk4_is_fourth_order() {
    let p = LorenzParams::default();
    let starts = spread_starts(&p, 64, 0).unwrap();
    let ratio = step_halving_ratio(&p, &starts, 1.0).unwrap();
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn lyapunov_exponents() {
    let p = LorenzParams::default();
    let lam = lyapunov_estimate(&p, DEFAULT_LYAPUNOV_DURATION, 0).unwrap();
    assert!((lam - 0.90).abs() <= 0.15, "{lam}");
    assert_eq!(lam, lyapunov_estimate(&p, DEFAULT_LYAPUNOV_DURATION, 0).unwrap());
    let stable = LorenzParams { r: 0.5, ..p };
    assert!(lyapunov_estimate(&stable, 100.0, 0).unwrap() < 0.0);
}

#[test]
fn counterfactual_distance_grows_with_the_perturbation() {
    let p = LorenzParams::default();
    let sample = attractor_sample(&p, 100_000, DEFAULT_SPINUP, 2).unwrap();
    let config = ExperimentConfig {
        queries: 500,
        horizon: 3.0,
        ..Default::default()
    };
    let report = counterfactual_experiment(&p, &[0.0, 0.01, 0.1, 1.0], &sample, &config).unwrap();
    let zero = &report.results[0];
    assert_eq!(zero.median_increase, 0.0);
    assert_eq!(zero.max_abs_increase, 0.0);
    assert_eq!(zero.median_perturbed, zero.median_baseline);
    assert!(zero.separation.iter().all(|pt| pt.rms == 0.0));
    let medians: Vec<f64> = report.results[1..].iter().map(|r| r.median_perturbed).collect();
    assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");

    // Mean log separation grows at roughly the largest Lyapunov exponent.
    let lam = lyapunov_estimate(&p, DEFAULT_LYAPUNOV_DURATION, 0).unwrap();
    for r in &report.results[1..3] {
        let rate = log_growth_rate(&r.separation, 0.0, 3.0).unwrap();
        assert!((rate - lam).abs() < 0.35, "delta {} rate {rate} vs {lam}", r.delta_x);
    }
}

#[test]
fn experiment_is_deterministic() {
    let p = LorenzParams::default();
    let sample = attractor_sample(&p, 5_000, DEFAULT_SPINUP, 1).unwrap();
    let config = ExperimentConfig {
        queries: 100,
        ..Default::default()
    };
    let a = counterfactual_experiment(&p, &[0.1], &sample, &config).unwrap();
    let b = counterfactual_experiment(&p, &[0.1], &sample, &config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn printed_form_is_a_different_system() {
    let std = LorenzParams::default();
    let printed = LorenzParams {
        form: LorenzForm::AsPrinted,
        ..std
    };
    let start = LorenzState::new(1.0, 1.0, 20.0);
    let a = integrate(start, &std, 200).unwrap();
    let b = integrate(start, &printed, 200).unwrap();
    assert_ne!(a.last(), b.last());
}
