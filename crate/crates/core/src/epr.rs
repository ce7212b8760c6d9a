//! Correlation tables for a pair `(S, S')`, counterfactual queries across
//! the two families, and the interference scan over dyadic cosines.
//!
//! Everything here is exact. Entries are either a dyadic correlation or an
//! `Undefined` verdict with its reason.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::exact::{Dyadic, RawAngle, SymbolicAngle};
use crate::roots::{definable_grid, family_point_raw, grid_from, Definability, GridRange, UndefinedReason};
use crate::seq::BitSequence;
use crate::superpose::{
    disjointness_certificate, offset_family_point, superpose, Branch, Certificate, SuperpositionSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `S` with its base-zero family and `S'` with its family through `λ'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairModel {
    pub left: BitSequence,
    pub right: BitSequence,
    pub spec: SuperpositionSpec,
    pub lambda_prime: SymbolicAngle,
}

impl PairModel {
    pub fn new(left: BitSequence, spec: SuperpositionSpec) -> Result<Self> {
        let right = superpose(&left, &spec)?;
        let lambda_prime = spec.angle.symbolic()?;
        Ok(PairModel {
            left,
            right,
            spec,
            lambda_prime,
        })
    }

    pub fn exponent(&self) -> u32 {
        self.left.exponent()
    }

    /// Definable angles of one side, over the full circle.
    pub fn grid(&self, side: Side) -> Vec<SymbolicAngle> {
        match side {
            Side::Left => definable_grid(self.exponent(), &crate::exact::AngleBase::Zero, GridRange::FullCircle),
            Side::Right => grid_from(&self.lambda_prime, self.exponent(), GridRange::FullCircle),
        }
    }

    /// Disjointness certificate for this pair's offset angle.
    ///
    /// A negative cosine or a sine-specified angle is reflected onto a
    /// cosine in `[0, 1]` first; reflections by `π/2` and `π` preserve
    /// whether `λ'` is a dyadic multiple of `π`.
    pub fn certificate(&self) -> Result<Certificate> {
        let c = match self.spec.angle.branch()? {
            Branch::Boundary(_) => Dyadic::one(),
            Branch::Cos(c) => c.abs(),
            Branch::Sin(s) => s.abs(),
        };
        disjointness_certificate(&c)
    }

    fn member(&self, side: Side, angle: &RawAngle) -> Definability<BitSequence> {
        match side {
            Side::Left => family_point_raw(&self.left, angle),
            Side::Right => match angle.to_symbolic() {
                Some(a) => offset_family_point(&self.right, &self.lambda_prime, &a),
                None => Definability::Undefined {
                    reason: UndefinedReason::NonDyadic {
                        angle: angle.to_string(),
                    },
                },
            },
        }
    }
}

/// Result of asking for one side's sequence at an angle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Defined {
        sequence: BitSequence,
    },
    Undefined {
        reason: UndefinedReason,
        certificate: Option<Certificate>,
    },
}

pub fn counterfactual_query(model: &PairModel, side: Side, angle: &RawAngle) -> Result<Verdict> {
    Ok(match model.member(side, angle) {
        Definability::Defined { value } => Verdict::Defined { sequence: value },
        Definability::Undefined { reason } => {
            let certificate = match reason {
                UndefinedReason::ForeignBase { .. } => Some(model.certificate()?),
                _ => None,
            };
            Verdict::Undefined { reason, certificate }
        }
    })
}

/// `table[a][b] = correlation(S(λa), S'(λb))` where both are defined.
pub fn pair_correlation_table(
    model: &PairModel,
    left_angles: &[RawAngle],
    right_angles: &[RawAngle],
) -> Vec<Vec<Definability<Dyadic>>> {
    let right: Vec<_> = right_angles.par_iter().map(|b| model.member(Side::Right, b)).collect();
    left_angles
        .par_iter()
        .map(|a| {
            let left = model.member(Side::Left, a);
            right
                .iter()
                .map(|r| match (&left, r) {
                    (Definability::Defined { value: x }, Definability::Defined { value: y }) => Definability::Defined {
                        value: x.correlation(y).expect("equal lengths"),
                    },
                    (Definability::Undefined { reason }, _) | (_, Definability::Undefined { reason }) => {
                        Definability::Undefined { reason: reason.clone() }
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub c: Dyadic,
    #[serde(flatten)]
    pub outcome: ScanOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ScanOutcome {
    Defined { correlation: Dyadic, flips: usize },
    Inadmissible { reason: String },
}

/// For each `c`, builds `S'` by the cosine construction and reports the
/// realized `correlation(S, S')`.
pub fn interference_scan(s: &BitSequence, cs: &[Dyadic], flip_seed: u64) -> Vec<ScanEntry> {
    cs.par_iter()
        .map(|c| {
            let outcome = match superpose(s, &SuperpositionSpec::from_cos(c.clone()).with_seed(flip_seed)) {
                Ok(sp) => ScanOutcome::Defined {
                    correlation: s.correlation(&sp).expect("equal lengths"),
                    flips: s.disagreements(&sp).expect("equal lengths"),
                },
                Err(e) => ScanOutcome::Inadmissible { reason: e.to_string() },
            };
            ScanEntry { c: c.clone(), outcome }
        })
        .collect()
}

/// Every cosine a length-`2^n` sequence can realize: `j / 2^(n-1)` for
/// `j = -2^(n-1) ..= 2^(n-1)`.
pub fn admissible_cosines(n: u32) -> Vec<Dyadic> {
    let half = 1i64 << (n - 1);
    (-half..=half).map(|j| Dyadic::new(j, n - 1)).collect()
}
