//! `S' = cos λ' S + sin λ' i(S)`: a sequence whose correlation with a
//! reference equals a dyadic cosine (or sine), the circle family it spans,
//! and the certificate that this family never meets the base family.

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{sin_is_dyadic, Dyadic, SymbolicAngle, LAMBDA_PRIME};
use crate::roots::{i_op, rotate_by, Definability, UndefinedReason};
use crate::seq::BitSequence;

/// Seed used for flip positions when none is given.
pub const DEFAULT_FLIP_SEED: u64 = 0x5eed_0001;

/// The offset angle `λ'`, known through whichever of its cosine and sine
/// is dyadic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OffsetAngle {
    pub cos: Option<Dyadic>,
    pub sin: Option<Dyadic>,
}

impl OffsetAngle {
    pub fn from_cos(c: Dyadic) -> Self {
        OffsetAngle {
            cos: Some(c),
            sin: None,
        }
    }

    pub fn from_sin(s: Dyadic) -> Self {
        OffsetAngle {
            cos: None,
            sin: Some(s),
        }
    }

    /// Which construction applies.
    pub fn branch(&self) -> Result<Branch> {
        let one = Dyadic::one();
        let in_range = |v: &Dyadic| v.abs() <= one;
        let strictly_inside = |v: &Dyadic| !v.is_zero() && v.abs() < one;
        for v in [&self.cos, &self.sin].into_iter().flatten() {
            if !in_range(v) {
                return Err(Error::OutOfDomain {
                    value: v.to_string(),
                    domain: "[-1, 1]",
                });
            }
        }
        let quarter = |n: i64| Ok(Branch::Boundary(Dyadic::new(n, 1)));
        match (&self.cos, &self.sin) {
            (None, None) => Err(Error::InvalidParameter("offset angle needs a cosine or a sine".into())),
            (Some(c), Some(s)) => {
                if strictly_inside(c) && strictly_inside(s) {
                    return Err(Error::Contradiction {
                        cos: c.to_string(),
                        sin: s.to_string(),
                    });
                }
                if c * c + s * s != one {
                    return Err(Error::Inconsistent {
                        cos: c.to_string(),
                        sin: s.to_string(),
                    });
                }
                // one of them is 0, the other ±1
                match (c.is_zero(), s.is_negative(), c.is_negative()) {
                    (false, _, false) => quarter(0),
                    (true, false, _) => quarter(1),
                    (false, _, true) => quarter(2),
                    (true, true, _) => quarter(3),
                }
            }
            (Some(c), None) => {
                if c == &one {
                    quarter(0)
                } else if c.is_zero() {
                    quarter(1)
                } else if c == &-&one {
                    quarter(2)
                } else {
                    Ok(Branch::Cos(c.clone()))
                }
            }
            (None, Some(s)) => {
                if s.is_zero() {
                    quarter(0)
                } else if s == &one {
                    quarter(1)
                } else if s == &-&one {
                    quarter(3)
                } else {
                    Ok(Branch::Sin(s.clone()))
                }
            }
        }
    }

    /// `λ'` as a symbolic angle: a base-zero angle on the boundary, else the
    /// named offset.
    pub fn symbolic(&self) -> Result<SymbolicAngle> {
        Ok(match self.branch()? {
            Branch::Boundary(q) => SymbolicAngle::zero_based(q),
            Branch::Cos(_) | Branch::Sin(_) => SymbolicAngle::offset(LAMBDA_PRIME, Dyadic::zero()),
        })
    }
}

/// Resolved form of an [`OffsetAngle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    /// `λ' = q·π` with `q ∈ {0, 1/2, 1, 3/2}`; `S'` is a base-family member.
    Boundary(Dyadic),
    /// Dyadic cosine strictly inside `(-1, 1)`, nonzero.
    Cos(Dyadic),
    /// Dyadic sine strictly inside `(-1, 1)`, nonzero.
    Sin(Dyadic),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperpositionSpec {
    #[serde(rename = "lambda_prime")]
    pub angle: OffsetAngle,
    pub flip_seed: u64,
}

impl SuperpositionSpec {
    pub fn from_cos(c: Dyadic) -> Self {
        SuperpositionSpec {
            angle: OffsetAngle::from_cos(c),
            flip_seed: DEFAULT_FLIP_SEED,
        }
    }

    pub fn from_sin(s: Dyadic) -> Self {
        SuperpositionSpec {
            angle: OffsetAngle::from_sin(s),
            flip_seed: DEFAULT_FLIP_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.flip_seed = seed;
        self
    }
}

/// Number of sign flips that move a length-`len` sequence to correlation
/// `target` with its original: `len (1 - target) / 2`.
pub fn flip_count(len: usize, target: &Dyadic) -> Result<usize> {
    let n = len.trailing_zeros() as i64;
    let d = (&Dyadic::one() - target).mul_pow2(n - 1);
    if !d.is_integer() {
        return Err(Error::NotRepresentable {
            len,
            what: format!("correlation {target} needs {d} flips"),
        });
    }
    d.numer()
        .to_usize()
        .filter(|&d| d <= len)
        .ok_or_else(|| Error::OutOfDomain {
            value: target.to_string(),
            domain: "[-1, 1]",
        })
}

/// `count` distinct positions in `0..len`, sorted, drawn from a ChaCha8
/// stream seeded with `seed`.
pub fn flip_positions(len: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, len, count).into_vec();
    picked.sort_unstable();
    picked
}

/// Builds `S'` from the pair `(x, y)` that play the roles of `cos` and
/// `sin` reference: `(S, i(S))` for complex superposition, `(I(S), J(S))`
/// for the quaternionic one.
pub(crate) fn superpose_onto(x: &BitSequence, y: &BitSequence, spec: &SuperpositionSpec) -> Result<BitSequence> {
    let (reference, target) = match spec.angle.branch()? {
        Branch::Boundary(q) => {
            // q ∈ {0, 1/2, 1, 3/2}
            return Ok(match q.mul_pow2(1).numer().to_i64() {
                Some(0) => x.clone(),
                Some(1) => y.clone(),
                Some(2) => x.negate(),
                _ => y.negate(),
            });
        }
        Branch::Cos(c) => (x, c),
        Branch::Sin(s) => (y, s),
    };
    let d = flip_count(reference.len(), &target)?;
    Ok(reference.with_flips(&flip_positions(reference.len(), d, spec.flip_seed)))
}

/// `S'` with `correlation(S, S') = cos λ'` (cosine branch) or
/// `correlation(i(S), S') = sin λ'` (sine branch).
pub fn superpose(s: &BitSequence, spec: &SuperpositionSpec) -> Result<BitSequence> {
    let is = i_op(s.len())?.apply(s)?;
    superpose_onto(s, &is, spec)
}

/// `S'(λ) = i^(2(λ-λ')/π)(S')`.
pub fn offset_family_point(
    sp: &BitSequence,
    lam_prime: &SymbolicAngle,
    lam: &SymbolicAngle,
) -> Definability<BitSequence> {
    match lam.difference(lam_prime) {
        Some(offset) => rotate_by(sp, &offset, lam),
        None => Definability::Undefined {
            reason: UndefinedReason::ForeignBase {
                angle: lam.to_string(),
                family: lam_prime.to_string(),
            },
        },
    }
}

/// Outcome of the disjointness argument for one dyadic cosine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub cos: Dyadic,
    pub disjoint: bool,
    pub reasoning: Vec<String>,
}

/// Decides whether the base family and the family through `S'` with
/// `cos λ' = c` share a definable angle.
pub fn disjointness_certificate(c: &Dyadic) -> Result<Certificate> {
    let sin_dyadic = sin_is_dyadic(c)?;
    let mut reasoning = Vec::new();
    if c.is_zero() || c == &Dyadic::one() {
        let q = if c.is_zero() { "1/2" } else { "0" };
        reasoning.push(format!("cos λ' = {c} puts λ' at {q}·pi, a dyadic multiple of pi"));
        reasoning.push("S' is then a member of the base family; the two circles coincide".into());
        return Ok(Certificate {
            cos: c.clone(),
            disjoint: false,
            reasoning,
        });
    }
    reasoning.push(format!(
        "cos λ' = {c} is the correlation of two finite ±1 sequences, hence rational"
    ));
    reasoning.push(format!(
        "sin λ' = sqrt(1 - ({c})^2) is dyadic: {sin_dyadic}; only the cosine fixes S'"
    ));
    reasoning.push("suppose S(λ) and S'(λ) are both defined: λ = q1·pi and λ = λ' + q2·pi with q1, q2 dyadic".into());
    reasoning.push("then λ' = (q1 - q2)·pi, a dyadic multiple q of pi with q in (0, 1/2)".into());
    reasoning.push(
        "cos(q·pi) is rational for dyadic q only when q mod 2 is 0, 1/2, 1 or 3/2; none lie in (0, 1/2), so cos λ' is irrational"
            .into(),
    );
    reasoning.push(format!(
        "this contradicts cos λ' = {c}; no angle is definable in both families"
    ));
    Ok(Certificate {
        cos: c.clone(),
        disjoint: true,
        reasoning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::AngleBase;
    use crate::roots::{definable_grid, grid_from, grid_intersection, GridRange};
    use crate::seq::{seed_sequence, SeedSource};

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn base(n: u32) -> BitSequence {
        seed_sequence(SeedSource::Generator(11), n).unwrap()
    }

    #[test]
    fn boundary_cosines() {
        let s = base(3);
        let i = i_op(8).unwrap();
        assert_eq!(superpose(&s, &SuperpositionSpec::from_cos(d("1"))).unwrap(), s);
        assert_eq!(
            superpose(&s, &SuperpositionSpec::from_cos(d("-1"))).unwrap(),
            s.negate()
        );
        assert_eq!(
            superpose(&s, &SuperpositionSpec::from_sin(d("1"))).unwrap(),
            i.apply(&s).unwrap()
        );
        assert_eq!(
            superpose(&s, &SuperpositionSpec::from_cos(d("0"))).unwrap(),
            i.apply(&s).unwrap()
        );
    }

    #[test]
    fn half_cosine_flips_two_of_eight() {
        let s = base(3);
        let sp = superpose(&s, &SuperpositionSpec::from_cos(d("1/2"))).unwrap();
        assert_eq!(s.disagreements(&sp).unwrap(), 2);
        assert_eq!(s.correlation(&sp).unwrap(), d("1/2"));
    }

    #[test]
    fn sine_branch_correlates_with_i_of_s() {
        let s = base(4);
        let sp = superpose(&s, &SuperpositionSpec::from_sin(d("3/4"))).unwrap();
        let is = i_op(16).unwrap().apply(&s).unwrap();
        assert_eq!(is.correlation(&sp).unwrap(), d("3/4"));
    }

    #[test]
    fn negative_cosine_flips_more_than_half() {
        let s = base(3);
        let sp = superpose(&s, &SuperpositionSpec::from_cos(d("-1/2"))).unwrap();
        assert_eq!(s.disagreements(&sp).unwrap(), 6);
        assert_eq!(s.correlation(&sp).unwrap(), d("-1/2"));
    }

    #[test]
    fn unrepresentable_and_contradictory_specs() {
        let s = base(2);
        assert!(matches!(
            superpose(&s, &SuperpositionSpec::from_cos(d("1/4"))),
            Err(Error::NotRepresentable { .. })
        ));
        let both = SuperpositionSpec {
            angle: OffsetAngle {
                cos: Some(d("1/2")),
                sin: Some(d("1/2")),
            },
            flip_seed: 0,
        };
        assert!(matches!(superpose(&s, &both), Err(Error::Contradiction { .. })));
        let odd = SuperpositionSpec {
            angle: OffsetAngle {
                cos: Some(d("1")),
                sin: Some(d("1")),
            },
            flip_seed: 0,
        };
        assert!(matches!(superpose(&s, &odd), Err(Error::Inconsistent { .. })));
        assert!(matches!(
            superpose(&s, &SuperpositionSpec::from_cos(d("3/2"))),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn flip_positions_are_seeded() {
        assert_eq!(flip_positions(64, 10, 3), flip_positions(64, 10, 3));
        assert_ne!(flip_positions(64, 10, 3), flip_positions(64, 10, 4));
        let p = flip_positions(64, 64, 3);
        assert_eq!(p, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn offset_family_examples() {
        let s = base(3);
        let sp = superpose(&s, &SuperpositionSpec::from_cos(d("1/2"))).unwrap();
        let lp = SymbolicAngle::offset(LAMBDA_PRIME, Dyadic::zero());
        let at = |a: &str| offset_family_point(&sp, &lp, &a.parse().unwrap());
        assert_eq!(at("λ'").defined(), Some(sp.clone()));
        assert_eq!(at("λ'+pi/2").defined(), Some(i_op(8).unwrap().apply(&sp).unwrap()));
        assert!(!at("0").is_defined());
        assert!(!at("λ'+pi/16").is_defined());
    }

    #[test]
    fn certificate_examples() {
        assert!(disjointness_certificate(&d("1/2")).unwrap().disjoint);
        assert!(disjointness_certificate(&d("3/8")).unwrap().disjoint);
        assert!(!disjointness_certificate(&d("1")).unwrap().disjoint);
        assert!(!disjointness_certificate(&d("0")).unwrap().disjoint);
        assert!(disjointness_certificate(&d("5/4")).is_err());
        assert!(disjointness_certificate(&d("-1/2")).is_err());
    }

    #[test]
    fn boundary_offsets_share_the_base_grid() {
        let lp = OffsetAngle::from_cos(d("0")).symbolic().unwrap();
        assert_eq!(lp.to_string(), "pi/2");
        let zero = definable_grid(3, &AngleBase::Zero, GridRange::FullCircle);
        let other = grid_from(&lp, 3, GridRange::FullCircle);
        assert_eq!(grid_intersection(&zero, &other).len(), zero.len());
        let named = OffsetAngle::from_cos(d("1/2")).symbolic().unwrap();
        assert!(grid_intersection(&zero, &grid_from(&named, 3, GridRange::FullCircle)).is_empty());
    }
}
