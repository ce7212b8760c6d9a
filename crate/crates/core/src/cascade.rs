//! Predictability horizon of an upscale error cascade.
//!
//! Error at wavenumber `2k` reaches `k` after one eddy turnover time
//! `τ(k) ~ k^(-2/3)`, so the time to climb `N0` octaves to `k_L` is a
//! geometric series in `r = 2^(-2/3)` with a finite sum. Sums and remainders
//! are accumulated in double-double arithmetic so that `limit - partial`
//! keeps its relative accuracy for large `N0`.

use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Exponent of the eddy turnover time, `τ ~ k^(-2/3)`.
pub const SCALING_EXPONENT: f64 = 2.0 / 3.0;
/// Exponent of the inertial-range energy spectrum, `E ~ k^(-5/3)`.
pub const SPECTRUM_EXPONENT: f64 = 5.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeParams {
    /// Reference (large-scale) wavenumber.
    pub k_l: f64,
    /// Eddy turnover time at `k_l`.
    pub tau_l: f64,
}

impl CascadeParams {
    pub fn new(k_l: f64, tau_l: f64) -> Result<Self> {
        if !(k_l > 0.0 && k_l.is_finite()) || !(tau_l > 0.0 && tau_l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "k_L and tau_L must be positive and finite (got {k_l}, {tau_l})"
            )));
        }
        Ok(CascadeParams { k_l, tau_l })
    }
}

impl Default for CascadeParams {
    fn default() -> Self {
        CascadeParams { k_l: 1.0, tau_l: 1.0 }
    }
}

/// `1/d` by Newton refinement; `TwoFloat`'s own division loses about half
/// of the low word.
fn recip(d: TwoFloat) -> TwoFloat {
    let one = TwoFloat::from(1.0);
    let mut y = TwoFloat::from(1.0 / d.hi());
    for _ in 0..2 {
        y += y * (one - d * y);
    }
    y
}

/// `2^(-2/3) = 4^(-1/3)`, Newton-refined to double-double precision.
fn octave_ratio() -> TwoFloat {
    let quarter = TwoFloat::from(0.25);
    let mut x = TwoFloat::from(0.25f64.cbrt());
    for _ in 0..3 {
        x -= (x * x * x - quarter) * recip(TwoFloat::from(3.0) * x * x);
    }
    x
}

/// `τ(k) = τ_L (k / k_L)^(-2/3)`.
pub fn eddy_time(params: &CascadeParams, k: f64) -> Result<f64> {
    if !k.is_finite() || k < params.k_l {
        return Err(Error::OutOfDomain {
            value: k.to_string(),
            domain: "[k_L, inf)",
        });
    }
    let ratio = k / params.k_l;
    Ok(params.tau_l / (ratio * ratio).cbrt())
}

fn partial_dd(params: &CascadeParams, n0: u32) -> TwoFloat {
    let r = octave_ratio();
    let mut term = TwoFloat::from(params.tau_l);
    let mut sum = TwoFloat::from(0.0);
    for _ in 0..n0 {
        sum += term;
        term *= r;
    }
    sum
}

fn limit_dd(params: &CascadeParams) -> TwoFloat {
    TwoFloat::from(params.tau_l) * recip(TwoFloat::from(1.0) - octave_ratio())
}

/// `Ω = Σ_{n=0}^{N0-1} τ(2^n k_L)`.
pub fn horizon_partial(params: &CascadeParams, n0: u32) -> f64 {
    partial_dd(params, n0).into()
}

/// `τ_L / (1 - 2^(-2/3))`, the supremum of the partial sums.
pub fn horizon_limit(params: &CascadeParams) -> f64 {
    limit_dd(params).into()
}

/// `limit - partial(N0)`, by subtraction.
pub fn horizon_remainder(params: &CascadeParams, n0: u32) -> f64 {
    (limit_dd(params) - partial_dd(params, n0)).into()
}

/// `τ_L 2^(-2 N0 / 3) / (1 - 2^(-2/3))`, the geometric tail in closed form.
pub fn horizon_remainder_closed_form(params: &CascadeParams, n0: u32) -> f64 {
    let r = octave_ratio();
    let tail = TwoFloat::from(params.tau_l) * r.powi(n0 as i32) * recip(TwoFloat::from(1.0) - r);
    tail.into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizonRow {
    pub n0: u32,
    pub partial: f64,
    pub remainder: f64,
}

/// Rows for `N0 = 1 ..= max_n0`.
pub fn horizon_table(params: &CascadeParams, max_n0: u32) -> Vec<HorizonRow> {
    (1..=max_n0)
        .map(|n0| HorizonRow {
            n0,
            partial: horizon_partial(params, n0),
            remainder: horizon_remainder(params, n0),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATIO: f64 = 0.629_960_524_947_436_6;
    const LIMIT: f64 = 2.702_414_383_919_315;

    #[test]
    fn eddy_time_examples() {
        let p = CascadeParams::new(2.0, 3.0).unwrap();
        assert_eq!(eddy_time(&p, 2.0).unwrap(), 3.0);
        assert!((eddy_time(&p, 16.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((eddy_time(&p, 4.0).unwrap() - 3.0 * RATIO).abs() < 1e-14);
        assert!(eddy_time(&p, 1.0).is_err());
        assert!(eddy_time(&p, f64::NAN).is_err());
    }

    #[test]
    fn partial_sum_examples() {
        let p = CascadeParams::default();
        assert_eq!(horizon_partial(&p, 1), 1.0);
        assert!((horizon_partial(&p, 2) - 1.629_960_524_947_436_6).abs() < 1e-15);
        assert!((horizon_limit(&p) - horizon_partial(&p, 50)).abs() < 1e-9);
        assert!((horizon_limit(&p) - LIMIT).abs() < 1e-15);
    }

    #[test]
    fn limit_scales_with_tau() {
        let one = horizon_limit(&CascadeParams::new(1.0, 1.0).unwrap());
        let two = horizon_limit(&CascadeParams::new(1.0, 2.0).unwrap());
        assert_eq!(two, 2.0 * one);
    }

    #[test]
    fn remainder_identity_and_monotonicity() {
        let p = CascadeParams::new(1.0, 1.7).unwrap();
        let lim = horizon_limit(&p);
        let mut prev = 0.0;
        for n0 in 1..=60 {
            let s = horizon_partial(&p, n0);
            assert!(s > prev && s < lim, "N0={n0}");
            prev = s;
            let a = horizon_remainder(&p, n0);
            let b = horizon_remainder_closed_form(&p, n0);
            assert!(((a - b) / b).abs() < 1e-12, "N0={n0}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CascadeParams::new(0.0, 1.0).is_err());
        assert!(CascadeParams::new(1.0, -1.0).is_err());
        assert!(CascadeParams::new(f64::INFINITY, 1.0).is_err());
    }
}
