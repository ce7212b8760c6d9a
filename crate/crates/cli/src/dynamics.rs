use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use granular::cascade::{horizon_limit, horizon_remainder_closed_form, horizon_table, CascadeParams};
use granular::lorenz::{
    attractor_sample, counterfactual_experiment, integrate, log_growth_rate, lyapunov_estimate, spread_starts,
    step_halving_ratio, ExperimentConfig, LorenzForm, LorenzParams, LorenzState,
};

use crate::err;
use crate::report::{text, Report, Table, DOUBLE_DOUBLE, SIMULATION};

#[derive(Args, Debug, Serialize)]
pub struct Cascade {
    /// Largest-scale wavenumber k_L.
    #[arg(long, default_value_t = 1.0)]
    pub k_l: f64,
    /// Eddy turnover time at k_L.
    #[arg(long, default_value_t = 1.0)]
    pub tau_l: f64,
    /// Number of octaves summed in the last row.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..=1000))]
    pub max_n0: u32,
}

impl Cascade {
    pub fn run(&self) -> Result<Report, String> {
        let params = CascadeParams::new(self.k_l, self.tau_l).map_err(err)?;
        let limit = horizon_limit(&params);
        let rows = horizon_table(&params, self.max_n0);

        let mut failures = Vec::new();
        let mut table = Table::new(&["n0", "partial", "remainder", "remainder_closed_form"]);
        for (idx, row) in rows.iter().enumerate() {
            let closed = horizon_remainder_closed_form(&params, row.n0);
            table.push(vec![text(row.n0), text(row.partial), text(row.remainder), text(closed)]);
            if row.remainder.is_nan() || row.remainder <= 0.0 || row.partial > limit {
                failures.push(format!("n0 = {}: partial sum not below the limit", row.n0));
            }
            if let Some(prev) = idx.checked_sub(1).map(|p| &rows[p]) {
                if row.remainder.is_nan() || row.remainder >= prev.remainder || row.partial < prev.partial {
                    failures.push(format!("n0 = {}: partial sums not increasing", row.n0));
                }
            }
        }
        let result = json!({
            "params": params,
            "limit": limit,
            "rows": rows,
        });
        let mut report = Report::new(json!(null), DOUBLE_DOUBLE, result, table);
        report.failures = failures;
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormArg {
    /// dx/dt = sigma (y - x)
    Standard,
    /// dx/dt = sigma (x - y)
    AsPrinted,
}

#[derive(Args, Debug, Serialize)]
pub struct LorenzArgs {
    #[arg(long, default_value_t = 10.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 28.0)]
    pub r: f64,
    #[arg(long, default_value_t = 8.0 / 3.0)]
    pub b: f64,
    /// RK4 step.
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    /// Sign convention of the first equation.
    #[arg(long, value_enum, default_value_t = FormArg::Standard)]
    pub form: FormArg,
}

impl LorenzArgs {
    fn params(&self) -> Result<LorenzParams, String> {
        let p = LorenzParams {
            sigma: self.sigma,
            r: self.r,
            b: self.b,
            dt: self.dt,
            form: match self.form {
                FormArg::Standard => LorenzForm::Standard,
                FormArg::AsPrinted => LorenzForm::AsPrinted,
            },
        };
        p.validate().map_err(err)?;
        Ok(p)
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum LorenzCmd {
    /// Trajectory from one initial state.
    Run(LorenzRun),
    /// Off-attractor distance of perturbed attractor points.
    Counterfactual(LorenzCounterfactual),
    /// Largest Lyapunov exponent and RK4 step-halving ratio.
    Lyapunov(LorenzLyapunov),
}

impl LorenzCmd {
    pub fn run(&self) -> Result<Report, String> {
        match self {
            LorenzCmd::Run(a) => a.run(),
            LorenzCmd::Counterfactual(a) => a.run(),
            LorenzCmd::Lyapunov(a) => a.run(),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct LorenzRun {
    #[command(flatten)]
    #[serde(flatten)]
    pub lorenz: LorenzArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub z: f64,
    /// Number of RK4 steps.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Emit every k-th state.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
}

impl LorenzRun {
    fn run(&self) -> Result<Report, String> {
        let params = self.lorenz.params()?;
        let states = integrate(LorenzState::new(self.x, self.y, self.z), &params, self.steps).map_err(err)?;
        let mut table = Table::new(&["t", "x", "y", "z"]);
        let mut points = Vec::new();
        for (j, s) in states.iter().enumerate().step_by(self.every as usize) {
            let t = j as f64 * params.dt;
            table.push(vec![text(t), text(s.x), text(s.y), text(s.z)]);
            points.push(json!({ "t": t, "x": s.x, "y": s.y, "z": s.z }));
        }
        Ok(Report::new(json!(null), SIMULATION, json!({ "points": points }), table))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct LorenzCounterfactual {
    #[command(flatten)]
    #[serde(flatten)]
    pub lorenz: LorenzArgs,
    /// Attractor sample size M.
    #[arg(long, default_value_t = 100_000)]
    pub m: usize,
    /// Perturbations of x, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.01,0.1,1",
        allow_negative_numbers = true
    )]
    pub deltas: Vec<f64>,
    /// Number of attractor points perturbed.
    #[arg(long, default_value_t = 2000)]
    pub queries: usize,
    /// Time over which perturbed and unperturbed trajectories are followed.
    #[arg(long, default_value_t = 2.0)]
    pub horizon: f64,
    /// Spacing of the separation record.
    #[arg(long, default_value_t = 0.1)]
    pub record_every: f64,
    /// Cell size of the nearest-neighbour grid.
    #[arg(long, default_value_t = 0.5)]
    pub cell: f64,
    /// Time integrated before sampling starts.
    #[arg(long, default_value_t = 10.0)]
    pub spinup: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl LorenzCounterfactual {
    fn run(&self) -> Result<Report, String> {
        let params = self.lorenz.params()?;
        let sample = attractor_sample(&params, self.m, self.spinup, self.seed).map_err(err)?;
        let config = ExperimentConfig {
            queries: self.queries,
            horizon: self.horizon,
            record_every: self.record_every,
            cell: self.cell,
        };
        let report = counterfactual_experiment(&params, &self.deltas, &sample, &config).map_err(err)?;

        let mut failures = Vec::new();
        let mut table = Table::new(&[
            "delta_x",
            "median_baseline",
            "median_perturbed",
            "median_increase",
            "max_abs_increase",
            "log_growth_rate",
        ]);
        for r in &report.results {
            let rate = log_growth_rate(&r.separation, 0.0, self.horizon);
            table.push(vec![
                text(r.delta_x),
                text(r.median_baseline),
                text(r.median_perturbed),
                text(r.median_increase),
                text(r.max_abs_increase),
                rate.map(text).unwrap_or_default(),
            ]);
            if r.delta_x == 0.0 && r.max_abs_increase != 0.0 {
                failures.push("zero perturbation changed the distance statistic".into());
            }
        }
        let mut positive: Vec<_> = report.results.iter().filter(|r| r.delta_x > 0.0).collect();
        positive.sort_by(|a, b| a.delta_x.total_cmp(&b.delta_x));
        for w in positive.windows(2) {
            if w[1].median_perturbed < w[0].median_perturbed {
                failures.push(format!(
                    "median distance falls from {} to {} between delta_x = {} and {}",
                    w[0].median_perturbed, w[1].median_perturbed, w[0].delta_x, w[1].delta_x
                ));
            }
        }
        let mut out = Report::new(json!({ "seed": self.seed }), SIMULATION, &report, table);
        out.failures = failures;
        Ok(out)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct LorenzLyapunov {
    #[command(flatten)]
    #[serde(flatten)]
    pub lorenz: LorenzArgs,
    /// Integration time of the tangent-linear estimate.
    #[arg(long, default_value_t = 500.0)]
    pub duration: f64,
    /// Starting points averaged in the step-halving ratio.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub starts: u64,
    /// Integration time of the step-halving comparison.
    #[arg(long, default_value_t = 1.0)]
    pub halving_time: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl LorenzLyapunov {
    fn run(&self) -> Result<Report, String> {
        let params = self.lorenz.params()?;
        let lyapunov = lyapunov_estimate(&params, self.duration, self.seed).map_err(err)?;
        let starts = spread_starts(&params, self.starts as usize, self.seed).map_err(err)?;
        let ratio = step_halving_ratio(&params, &starts, self.halving_time).map_err(err)?;
        let mut table = Table::new(&["lyapunov_exponent", "step_halving_ratio"]);
        table.push(vec![text(lyapunov), text(ratio)]);
        let result = json!({
            "lyapunov_exponent": lyapunov,
            "step_halving_ratio": ratio,
        });
        Ok(Report::new(json!({ "seed": self.seed }), SIMULATION, result, table))
    }
}
