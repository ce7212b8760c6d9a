use granular::epr::{admissible_cosines, interference_scan, ScanOutcome};
use granular::exact::{AngleBase, Dyadic, LAMBDA_PRIME};
use granular::roots::{definable_grid, grid_from, grid_intersection, i_op, GridRange};
use granular::seq::{seed_sequence, SeedSource};
use granular::superpose::{disjointness_certificate, superpose, OffsetAngle, SuperpositionSpec};
use granular::Error;

#[test]
fn cosine_construction_is_exact_up_to_n6() {
    for n in 1..=6 {
        let s = seed_sequence(SeedSource::Generator(100 + n as u64), n).unwrap();
        for c in admissible_cosines(n) {
            let sp = superpose(&s, &SuperpositionSpec::from_cos(c.clone())).unwrap();
            assert_eq!(s.correlation(&sp).unwrap(), c, "N={n}");
        }
    }
}

#[test]
fn sine_construction_is_exact_up_to_n6() {
    for n in 1..=6 {
        let s = seed_sequence(SeedSource::Pi, n).unwrap();
        let is = i_op(s.len()).unwrap().apply(&s).unwrap();
        for v in admissible_cosines(n) {
            let sp = superpose(&s, &SuperpositionSpec::from_sin(v.clone())).unwrap();
            assert_eq!(is.correlation(&sp).unwrap(), v, "N={n}");
        }
    }
}

#[test]
fn finer_cosines_are_not_representable() {
    for n in 1..=6u32 {
        let s = seed_sequence(SeedSource::Sqrt2, n).unwrap();
        for p in (1i64..(1 << n)).step_by(2) {
            let c = Dyadic::new(p, n);
            assert!(matches!(
                superpose(&s, &SuperpositionSpec::from_cos(c)),
                Err(Error::NotRepresentable { .. })
            ));
        }
    }
}

#[test]
fn claiming_both_dyadic_is_rejected() {
    let s = seed_sequence(SeedSource::Generator(1), 6).unwrap();
    let inside: Vec<Dyadic> = admissible_cosines(6)
        .into_iter()
        .filter(|c| !c.is_zero() && c.abs() < Dyadic::one())
        .collect();
    for c in &inside {
        for v in &inside {
            let spec = SuperpositionSpec {
                angle: OffsetAngle {
                    cos: Some(c.clone()),
                    sin: Some(v.clone()),
                },
                flip_seed: 0,
            };
            assert!(matches!(superpose(&s, &spec), Err(Error::Contradiction { .. })));
        }
    }
}

#[test]
fn certificate_disjoint_implies_empty_grid_intersection() {
    for n in 1..=8u32 {
        let zero = definable_grid(n, &AngleBase::Zero, GridRange::FullCircle);
        for k in 1..n {
            for p in 1i64..(1 << k) {
                let c = Dyadic::new(p, k);
                let cert = disjointness_certificate(&c).unwrap();
                let lp = OffsetAngle::from_cos(c.clone()).symbolic().unwrap();
                let other = grid_from(&lp, n, GridRange::FullCircle);
                let common = grid_intersection(&zero, &other);
                assert_eq!(cert.disjoint, common.is_empty(), "c={c} N={n}");
                assert!(cert.disjoint);
                assert_eq!(lp.base, AngleBase::Offset(LAMBDA_PRIME.into()));
            }
        }
    }
}

#[test]
fn interference_scan_covers_full_range() {
    for n in 1..=6 {
        let s = seed_sequence(SeedSource::Generator(3), n).unwrap();
        let grid = admissible_cosines(n);
        let out = interference_scan(&s, &grid, 17);
        let realized: Vec<Dyadic> = out
            .iter()
            .map(|e| match &e.outcome {
                ScanOutcome::Defined { correlation, .. } => correlation.clone(),
                other => panic!("{other:?}"),
            })
            .collect();
        assert_eq!(realized, grid);
        assert_eq!(realized.first(), Some(&Dyadic::from_int(-1)));
        assert_eq!(realized.last(), Some(&Dyadic::one()));
    }
}

#[test]
fn grid_spacing_halves_with_each_exponent() {
    for n in 1..8u32 {
        let a = definable_grid(n, &AngleBase::Zero, GridRange::FullCircle);
        let b = definable_grid(n + 1, &AngleBase::Zero, GridRange::FullCircle);
        let step_a = &a[1].coeff - &a[0].coeff;
        let step_b = &b[1].coeff - &b[0].coeff;
        assert_eq!(step_b.mul_pow2(1), step_a);
        assert_eq!(a.len(), 1 << (n + 1));
        // the coarser grid sits inside the finer one
        assert_eq!(grid_intersection(&a, &b).len(), a.len());
    }
}
