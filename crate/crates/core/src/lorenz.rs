//! Lorenz-63 integration and the off-attractor perturbation experiment.
//!
//! "Off the attractor" is measured as the nearest-neighbour distance from a
//! perturbed point to a large finite sample of the attractor, compared with
//! the same distance for unperturbed points that were not in the sample.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorenzState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LorenzState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        LorenzState { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn axpy(&self, a: f64, d: &LorenzState) -> LorenzState {
        LorenzState::new(self.x + a * d.x, self.y + a * d.y, self.z + a * d.z)
    }

    pub fn distance(&self, other: &LorenzState) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Which right-hand side for `dX/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LorenzForm {
    /// `dX/dt = σ (Y - X)`.
    #[default]
    Standard,
    /// `dX/dt = -σ X + Y`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub r: f64,
    pub b: f64,
    pub dt: f64,
    pub form: LorenzForm,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 10.0,
            r: 28.0,
            b: 8.0 / 3.0,
            dt: 0.005,
            form: LorenzForm::Standard,
        }
    }
}

impl LorenzParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.sigma) && ok(self.r) && ok(self.b) && ok(self.dt) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "sigma, r, b and dt must be positive (got {}, {}, {}, {})",
                self.sigma, self.r, self.b, self.dt
            )))
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        LorenzParams { dt, ..self }
    }

    pub fn deriv(&self, s: &LorenzState) -> LorenzState {
        let dx = match self.form {
            LorenzForm::Standard => self.sigma * (s.y - s.x),
            LorenzForm::AsPrinted => -self.sigma * s.x + s.y,
        };
        LorenzState::new(dx, -s.x * s.z + self.r * s.x - s.y, s.x * s.y - self.b * s.z)
    }

    /// Jacobian of the vector field at `s`, row-major.
    pub fn jacobian(&self, s: &LorenzState) -> [[f64; 3]; 3] {
        let (dxdx, dxdy) = match self.form {
            LorenzForm::Standard => (-self.sigma, self.sigma),
            LorenzForm::AsPrinted => (-self.sigma, 1.0),
        };
        [[dxdx, dxdy, 0.0], [self.r - s.z, -1.0, -s.x], [s.y, s.x, -self.b]]
    }

    /// One classical fourth-order Runge-Kutta step.
    pub fn step(&self, s: &LorenzState) -> LorenzState {
        let h = self.dt;
        let k1 = self.deriv(s);
        let k2 = self.deriv(&s.axpy(h / 2.0, &k1));
        let k3 = self.deriv(&s.axpy(h / 2.0, &k2));
        let k4 = self.deriv(&s.axpy(h, &k3));
        LorenzState::new(
            s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
            s.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
        )
    }

    fn advance(&self, mut s: LorenzState, steps: usize) -> Result<LorenzState> {
        for step in 1..=steps {
            s = self.step(&s);
            if !s.is_finite() {
                return Err(Error::Diverged { step });
            }
        }
        Ok(s)
    }
}

fn check_start(state: &LorenzState) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("initial state is not finite".into()))
    }
}

/// Fixed-step RK4 trajectory of `steps + 1` states, starting with `state`.
pub fn integrate(state: LorenzState, params: &LorenzParams, steps: usize) -> Result<Vec<LorenzState>> {
    params.validate()?;
    check_start(&state)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state);
    let mut s = state;
    for step in 1..=steps {
        s = params.step(&s);
        if !s.is_finite() {
            return Err(Error::Diverged { step });
        }
        out.push(s);
    }
    Ok(out)
}

/// Number of steps covering `time` at the params' `dt`.
pub fn steps_for(params: &LorenzParams, time: f64) -> usize {
    (time / params.dt).round().max(0.0) as usize
}

/// Steps between recorded attractor samples.
pub const SAMPLE_STRIDE: usize = 10;
/// Spin-up used when none is given, in time units.
pub const DEFAULT_SPINUP: f64 = 10.0;

fn seeded_start(seed: u64) -> LorenzState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LorenzState::new(
        1.0 + rng.random_range(-1.0..1.0),
        1.0 + rng.random_range(-1.0..1.0),
        20.0 + rng.random_range(-1.0..1.0),
    )
}

/// `m` states, one every [`SAMPLE_STRIDE`] steps, after discarding
/// `spinup` time units from a seeded start near `(1, 1, 20)`.
pub fn attractor_sample(params: &LorenzParams, m: usize, spinup: f64, seed: u64) -> Result<Vec<LorenzState>> {
    params.validate()?;
    if m == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let mut s = params.advance(seeded_start(seed), steps_for(params, spinup))?;
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(s);
        s = params.advance(s, SAMPLE_STRIDE)?;
    }
    Ok(out)
}

/// `count` attractor points spaced 50 samples apart, used as start points
/// for the step-halving order check.
pub fn spread_starts(params: &LorenzParams, count: usize, seed: u64) -> Result<Vec<LorenzState>> {
    let pts = attractor_sample(params, count * 50, DEFAULT_SPINUP, seed)?;
    Ok(pts.into_iter().step_by(50).collect())
}

/// Uniform-grid nearest-neighbour index over a point cloud.
pub struct NearestIndex<'a> {
    points: &'a [LorenzState],
    cell: f64,
    cells: HashMap<[i32; 3], Vec<u32>>,
}

impl<'a> NearestIndex<'a> {
    pub fn new(points: &'a [LorenzState], cell: f64) -> Self {
        assert!(cell > 0.0);
        let mut cells: HashMap<[i32; 3], Vec<u32>> = HashMap::new();
        for (idx, p) in points.iter().enumerate() {
            cells.entry(Self::key(cell, p)).or_default().push(idx as u32);
        }
        NearestIndex { points, cell, cells }
    }

    fn key(cell: f64, p: &LorenzState) -> [i32; 3] {
        [
            (p.x / cell).floor() as i32,
            (p.y / cell).floor() as i32,
            (p.z / cell).floor() as i32,
        ]
    }

    /// Distance from `q` to the closest indexed point.
    pub fn nearest_distance(&self, q: &LorenzState) -> f64 {
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        let c = Self::key(self.cell, q);
        let mut best = f64::INFINITY;
        // Points in shells >= ring are at least (ring - 1) * cell away.
        for ring in 0i32.. {
            if ring > 0 && best <= (ring - 1) as f64 * self.cell {
                break;
            }
            if ring > 4096 {
                // fall back to a scan for far-away queries
                return self.points.iter().map(|p| p.distance(q)).fold(f64::INFINITY, f64::min);
            }
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for dz in -ring..=ring {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        if let Some(ids) = self.cells.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                            for &i in ids {
                                best = best.min(self.points[i as usize].distance(q));
                            }
                        }
                    }
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Fresh on-attractor points to perturb.
    pub queries: usize,
    /// Trajectory comparison window, in time units.
    pub horizon: f64,
    /// Spacing of recorded separations, in time units.
    pub record_every: f64,
    /// Grid cell size of the nearest-neighbour index.
    pub cell: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            queries: 2000,
            horizon: 2.0,
            record_every: 0.1,
            cell: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationPoint {
    pub t: f64,
    pub rms: f64,
    /// Mean of `ln |separation|`; absent when any separation is zero.
    pub mean_log: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationResult {
    pub delta_x: f64,
    pub median_baseline: f64,
    pub median_perturbed: f64,
    pub median_increase: f64,
    pub max_abs_increase: f64,
    pub separation: Vec<SeparationPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub sample_size: usize,
    pub queries: usize,
    pub results: Vec<PerturbationResult>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fresh attractor points continuing on from the end of `sample`, spaced by
/// a stride coprime to [`SAMPLE_STRIDE`] so they do not retrace it.
fn fresh_points(params: &LorenzParams, sample: &[LorenzState], count: usize) -> Result<Vec<LorenzState>> {
    let mut s = params.advance(*sample.last().expect("nonempty sample"), 1000)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(s);
        s = params.advance(s, 3 * SAMPLE_STRIDE + 7)?;
    }
    Ok(out)
}

/// Perturbs `X` alone at fresh attractor points and reports how far the
/// results land from the attractor sample and how fast they separate from
/// the unperturbed trajectories.
pub fn counterfactual_experiment(
    params: &LorenzParams,
    deltas: &[f64],
    sample: &[LorenzState],
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    params.validate()?;
    if sample.is_empty() {
        return Err(Error::InvalidParameter("attractor sample is empty".into()));
    }
    let queries = fresh_points(params, sample, config.queries)?;
    let index = NearestIndex::new(sample, config.cell);
    let baseline: Vec<f64> = queries.par_iter().map(|q| index.nearest_distance(q)).collect();
    let stride = steps_for(params, config.record_every).max(1);
    let records = steps_for(params, config.horizon) / stride;

    let results = deltas
        .iter()
        .map(|&delta| {
            let perturbed: Vec<LorenzState> = queries
                .iter()
                .map(|q| LorenzState::new(q.x + delta, q.y, q.z))
                .collect();
            let dist: Vec<f64> = perturbed.par_iter().map(|p| index.nearest_distance(p)).collect();
            let increase: Vec<f64> = dist.iter().zip(&baseline).map(|(a, b)| a - b).collect();

            // separations[i][j] at time j * stride * dt
            let separations: Vec<Vec<f64>> = queries
                .par_iter()
                .zip(perturbed.par_iter())
                .map(|(q, p)| -> Result<Vec<f64>> {
                    let (mut a, mut b) = (*q, *p);
                    let mut row = Vec::with_capacity(records + 1);
                    row.push(a.distance(&b));
                    for _ in 0..records {
                        a = params.advance(a, stride)?;
                        b = params.advance(b, stride)?;
                        row.push(a.distance(&b));
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            let n = separations.len() as f64;
            let separation = (0..=records)
                .map(|j| {
                    let col = separations.iter().map(|row| row[j]);
                    let rms = (col.clone().map(|d| d * d).sum::<f64>() / n).sqrt();
                    let mean_log = col.clone().all(|d| d > 0.0).then(|| col.map(f64::ln).sum::<f64>() / n);
                    SeparationPoint {
                        t: (j * stride) as f64 * params.dt,
                        rms,
                        mean_log,
                    }
                })
                .collect();

            Ok(PerturbationResult {
                delta_x: delta,
                median_baseline: median(&baseline),
                median_perturbed: median(&dist),
                median_increase: median(&increase),
                max_abs_increase: increase.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
                separation,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        sample_size: sample.len(),
        queries: queries.len(),
        results,
    })
}

/// Least-squares slope of `mean_log` against `t` over `[t0, t1]`.
pub fn log_growth_rate(points: &[SeparationPoint], t0: f64, t1: f64) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.t >= t0 && p.t <= t1)
        .filter_map(|p| p.mean_log.map(|l| (p.t, l)))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Default averaging time for [`lyapunov_estimate`].
pub const DEFAULT_LYAPUNOV_DURATION: f64 = 500.0;

fn mat_vec(m: &[[f64; 3]; 3], v: &LorenzState) -> LorenzState {
    LorenzState::new(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

/// Largest Lyapunov exponent from the tangent-linear flow, renormalizing the
/// tangent vector every step. Starts from a seeded point and discards
/// [`DEFAULT_SPINUP`] time units first.
pub fn lyapunov_estimate(params: &LorenzParams, duration: f64, seed: u64) -> Result<f64> {
    params.validate()?;
    if duration.is_nan() || duration <= 0.0 {
        return Err(Error::InvalidParameter("duration must be positive".into()));
    }
    let h = params.dt;
    let mut s = params.advance(seeded_start(seed), steps_for(params, DEFAULT_SPINUP))?;
    let mut v = LorenzState::new(1.0, 1.0, 1.0);
    let norm = v.distance(&LorenzState::new(0.0, 0.0, 0.0));
    v = LorenzState::new(v.x / norm, v.y / norm, v.z / norm);
    let steps = steps_for(params, duration);
    let mut log_sum = 0.0;
    for step in 1..=steps {
        // RK4 on the joint (state, tangent) system.
        let f = |s: &LorenzState, v: &LorenzState| (params.deriv(s), mat_vec(&params.jacobian(s), v));
        let (k1, l1) = f(&s, &v);
        let (k2, l2) = f(&s.axpy(h / 2.0, &k1), &v.axpy(h / 2.0, &l1));
        let (k3, l3) = f(&s.axpy(h / 2.0, &k2), &v.axpy(h / 2.0, &l2));
        let (k4, l4) = f(&s.axpy(h, &k3), &v.axpy(h, &l3));
        let comb = |a: &LorenzState, k1: &LorenzState, k2: &LorenzState, k3: &LorenzState, k4: &LorenzState| {
            LorenzState::new(
                a.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                a.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                a.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
            )
        };
        s = comb(&s, &k1, &k2, &k3, &k4);
        v = comb(&v, &l1, &l2, &l3, &l4);
        let norm = (v.x * v.x + v.y * v.y + v.z * v.z).sqrt();
        if !s.is_finite() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::Diverged { step });
        }
        log_sum += norm.ln();
        v = LorenzState::new(v.x / norm, v.y / norm, v.z / norm);
    }
    Ok(log_sum / (steps as f64 * h))
}

/// Global-error ratio under step halving: geometric mean over `starts` of
/// `|x_dt(t_end) - x_ref| / |x_(dt/2)(t_end) - x_ref|`, with the reference
/// integrated at `dt/64`. Fourth-order convergence gives 16.
pub fn step_halving_ratio(params: &LorenzParams, starts: &[LorenzState], t_end: f64) -> Result<f64> {
    params.validate()?;
    if starts.is_empty() {
        return Err(Error::InvalidParameter("no start points".into()));
    }
    let end = |p: LorenzParams, s: LorenzState| p.advance(s, steps_for(&p, t_end));
    let mut log_sum = 0.0;
    for &s in starts {
        check_start(&s)?;
        let reference = end(params.with_dt(params.dt / 64.0), s)?;
        let coarse = end(*params, s)?.distance(&reference);
        let fine = end(params.with_dt(params.dt / 2.0), s)?.distance(&reference);
        log_sum += (coarse / fine).ln();
    }
    Ok((log_sum / starts.len() as f64).exp())
}
