//! Signed permutations and the dyadic powers of `i` they realize.
//!
//! `i` acts on successive pairs as `(a, b) -> (-b, a)`. The root
//! `i^(1/2^m)` acts on blocks of `2^(m+1)` elements: a block split into
//! halves `(l, r)` becomes `(i^(1/2^(m-1))(r), l)`. Any dyadic `α` is then
//! reached by composing the integer power with one root per set fractional
//! bit.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::exact::{AngleBase, Dyadic, RawAngle, SymbolicAngle};
use crate::seq::{check_len, same_len, BitSequence};

/// `(P·S)_j = signs_j · S_{perm_j}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        same_len(perm.len(), signs.len())?;
        let len = perm.len();
        let mut seen = vec![false; len];
        for &p in &perm {
            if p >= len || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(len));
            }
        }
        if let Some((index, &v)) = signs.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidElement { index, value: v as i64 });
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(len: usize) -> Self {
        SignedPermutation {
            perm: (0..len).collect(),
            signs: vec![1; len],
        }
    }

    pub fn negation(len: usize) -> Self {
        SignedPermutation {
            perm: (0..len).collect(),
            signs: vec![-1; len],
        }
    }

    /// Repeats `block` on successive blocks of `len`.
    pub fn tiled(block: &SignedPermutation, len: usize) -> Result<Self> {
        let b = block.len();
        if b > len {
            return Err(Error::BlockTooLarge { block: b, len });
        }
        if !len.is_multiple_of(b) {
            return Err(Error::NotRepresentable {
                len,
                what: format!("block size {b} does not divide the length"),
            });
        }
        let mut perm = Vec::with_capacity(len);
        let mut signs = Vec::with_capacity(len);
        for start in (0..len).step_by(b) {
            perm.extend(block.perm.iter().map(|p| start + p));
            signs.extend_from_slice(&block.signs);
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn apply(&self, s: &BitSequence) -> Result<BitSequence> {
        same_len(self.len(), s.len())?;
        let out = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &sign)| sign * s.get(p))
            .collect();
        Ok(BitSequence::from_vec_unchecked(out))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SignedPermutation) -> Result<Self> {
        same_len(self.len(), other.len())?;
        let (perm, signs) = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| (other.perm[p], s * other.signs[p]))
            .unzip();
        Ok(SignedPermutation { perm, signs })
    }

    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.len()];
        let mut signs = vec![1; self.len()];
        for (j, &p) in self.perm.iter().enumerate() {
            perm[p] = j;
            signs[p] = self.signs[j];
        }
        SignedPermutation { perm, signs }
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = SignedPermutation::identity(self.len());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base).expect("equal lengths");
            }
            base = base.compose(&base).expect("equal lengths");
            n >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == SignedPermutation::identity(self.len())
    }

    pub fn is_negation(&self) -> bool {
        *self == SignedPermutation::negation(self.len())
    }
}

/// Free-function form of [`SignedPermutation::compose`].
pub fn compose(p: &SignedPermutation, q: &SignedPermutation) -> Result<SignedPermutation> {
    p.compose(q)
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (j, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}a{}", if s < 0 { "-" } else { "" }, p + 1)?;
        }
        f.write_str("]")
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            perm: Vec<usize>,
            signs: Vec<i8>,
        }
        let raw = Raw::deserialize(d)?;
        SignedPermutation::new(raw.perm, raw.signs).map_err(serde::de::Error::custom)
    }
}

/// The single block of `i^(1/2^m)`, of size `2^(m+1)`.
fn root_block(m: u32) -> SignedPermutation {
    if m == 0 {
        return SignedPermutation {
            perm: vec![1, 0],
            signs: vec![-1, 1],
        };
    }
    let inner = root_block(m - 1);
    let half = inner.len();
    let mut perm: Vec<usize> = inner.perm.iter().map(|p| half + p).collect();
    let mut signs = inner.signs.clone();
    perm.extend(0..half);
    signs.extend(std::iter::repeat_n(1, half));
    SignedPermutation { perm, signs }
}

/// `i^(1/2^m)` on a sequence of length `len`.
pub fn build_root(m: u32, len: usize) -> Result<SignedPermutation> {
    check_len(len)?;
    let block = 1usize
        .checked_shl(m + 1)
        .filter(|&b| b <= len)
        .ok_or(Error::BlockTooLarge {
            block: 1usize.checked_shl(m + 1).unwrap_or(usize::MAX),
            len,
        })?;
    debug_assert_eq!(root_block(m).len(), block);
    SignedPermutation::tiled(&root_block(m), len)
}

/// `i` itself.
pub fn i_op(len: usize) -> Result<SignedPermutation> {
    build_root(0, len)
}

/// Whether `α` has a finite enough binary expansion for length `len`:
/// denominator `2^k` with `k <= N - 1`.
pub fn is_admissible(alpha: &Dyadic, len: usize) -> bool {
    len.is_power_of_two() && len >= 2 && alpha.exponent() < len.trailing_zeros()
}

/// `i^α`, with `α` taken mod 4.
pub fn power(alpha: &Dyadic, len: usize) -> Result<SignedPermutation> {
    check_len(len)?;
    if !is_admissible(alpha, len) {
        return Err(Error::NotRepresentable {
            len,
            what: format!("i^({alpha}) needs blocks of 2^{}", alpha.exponent() + 1),
        });
    }
    let alpha = alpha.rem_euclid(4);
    let whole = alpha.floor().to_u64().expect("alpha mod 4 is small");
    let mut op = i_op(len)?.pow(whole);
    for (idx, bit) in alpha.fractional_bits().into_iter().enumerate() {
        if bit {
            op = op.compose(&build_root(idx as u32 + 1, len)?)?;
        }
    }
    Ok(op)
}

/// Why a family member does not exist at some angle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UndefinedReason {
    /// The coefficient of pi is not a dyadic rational.
    NonDyadic { angle: String },
    /// Dyadic, but finer than the sequence length can resolve.
    TooFine { angle: String, len: usize },
    /// The angle is measured from a base the family cannot reach.
    ForeignBase { angle: String, family: String },
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefinedReason::NonDyadic { angle } => {
                write!(f, "{angle}: coefficient of pi is not dyadic")
            }
            UndefinedReason::TooFine { angle, len } => {
                write!(f, "{angle}: finer than the grid of a length-{len} sequence")
            }
            UndefinedReason::ForeignBase { angle, family } => {
                write!(f, "{angle}: not on the circle of the family based at {family}")
            }
        }
    }
}

/// A family member, or the reason it does not exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Definability<T> {
    Defined { value: T },
    Undefined { reason: UndefinedReason },
}

impl<T> Definability<T> {
    pub fn is_defined(&self) -> bool {
        matches!(self, Definability::Defined { .. })
    }

    pub fn defined(self) -> Option<T> {
        match self {
            Definability::Defined { value } => Some(value),
            Definability::Undefined { .. } => None,
        }
    }
}

/// `i^(2 * offset)` applied to `s`, where `offset` is the angle from the
/// family's base in units of pi.
pub(crate) fn rotate_by(s: &BitSequence, offset: &Dyadic, angle: &SymbolicAngle) -> Definability<BitSequence> {
    let alpha = offset.mul_pow2(1);
    if !is_admissible(&alpha, s.len()) {
        return Definability::Undefined {
            reason: UndefinedReason::TooFine {
                angle: angle.to_string(),
                len: s.len(),
            },
        };
    }
    let op = power(&alpha, s.len()).expect("admissible exponent");
    Definability::Defined {
        value: op.apply(s).expect("lengths agree"),
    }
}

/// `S(λ) = i^(2λ/π)(S)` for a base-zero angle.
pub fn family_point(s: &BitSequence, lam: &SymbolicAngle) -> Definability<BitSequence> {
    if lam.base != AngleBase::Zero {
        return Definability::Undefined {
            reason: UndefinedReason::ForeignBase {
                angle: lam.to_string(),
                family: "0".into(),
            },
        };
    }
    rotate_by(s, &lam.coeff, lam)
}

/// [`family_point`] for an angle whose coefficient may not be dyadic.
pub fn family_point_raw(s: &BitSequence, lam: &RawAngle) -> Definability<BitSequence> {
    match lam.to_symbolic() {
        Some(a) => family_point(s, &a),
        None => Definability::Undefined {
            reason: UndefinedReason::NonDyadic { angle: lam.to_string() },
        },
    }
}

/// Extent of the definable grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridRange {
    /// `[0, 2π)`: `2^(N+1)` angles.
    #[default]
    FullCircle,
    /// `[0, π)`: `2^N` angles.
    HalfCircle,
}

/// Angles at which a family of length-`2^n` sequences based at `base` is
/// defined, spaced `π/2^n`, in increasing order from the base.
pub fn definable_grid(n: u32, base: &AngleBase, range: GridRange) -> Vec<SymbolicAngle> {
    grid_from(&SymbolicAngle::new(base.clone(), Dyadic::zero()), n, range)
}

/// [`definable_grid`] for a family whose reference sequence sits at `origin`.
pub fn grid_from(origin: &SymbolicAngle, n: u32, range: GridRange) -> Vec<SymbolicAngle> {
    assert!(n >= 1, "grid exponent must be at least 1");
    let count: u64 = match range {
        GridRange::FullCircle => 1 << (n + 1),
        GridRange::HalfCircle => 1 << n,
    };
    (0..count).map(|j| origin.shifted(&Dyadic::new(j, n))).collect()
}

/// Angles present in both lists, compared as points on the circle
/// (coefficients mod 2).
pub fn grid_intersection(a: &[SymbolicAngle], b: &[SymbolicAngle]) -> Vec<SymbolicAngle> {
    let key = |x: &SymbolicAngle| (x.base.clone(), x.coeff.rem_euclid(2));
    let keys: std::collections::HashSet<_> = b.iter().map(key).collect();
    a.iter().filter(|x| keys.contains(&key(x))).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    /// Symbolic sequence `a_1..a_len` as signed indices, so operator output
    /// can be compared against printed formulas.
    fn symbolic(op: &SignedPermutation) -> Vec<i64> {
        op.perm()
            .iter()
            .zip(op.signs())
            .map(|(&p, &s)| s as i64 * (p as i64 + 1))
            .collect()
    }

    #[test]
    fn i_on_pairs() {
        assert_eq!(symbolic(&build_root(0, 4).unwrap()), vec![-2, 1, -4, 3]);
    }

    #[test]
    fn half_and_quarter_roots_match_printed_forms() {
        assert_eq!(symbolic(&build_root(1, 4).unwrap()), vec![-4, 3, 1, 2]);
        assert_eq!(symbolic(&build_root(1, 8).unwrap()), vec![-4, 3, 1, 2, -8, 7, 5, 6]);
        assert_eq!(symbolic(&build_root(2, 8).unwrap()), vec![-8, 7, 5, 6, 1, 2, 3, 4]);
    }

    #[test]
    fn root_block_too_large() {
        assert!(matches!(build_root(2, 4), Err(Error::BlockTooLarge { .. })));
        assert!(matches!(build_root(80, 4), Err(Error::BlockTooLarge { .. })));
        assert!(build_root(0, 3).is_err());
    }

    #[test]
    fn compose_examples() {
        let i = i_op(8).unwrap();
        assert!(i.compose(&i).unwrap().is_negation());
        let h = build_root(1, 8).unwrap();
        assert_eq!(h.compose(&h).unwrap(), i);
        assert_eq!(h.compose(&SignedPermutation::identity(8)).unwrap(), h);
        assert!(i.compose(&SignedPermutation::identity(4)).is_err());
    }

    #[test]
    fn compose_matches_sequential_application() {
        let p = build_root(2, 8).unwrap();
        let q = build_root(0, 8).unwrap();
        let s: BitSequence = "+--+-++-".parse().unwrap();
        let lhs = p.compose(&q).unwrap().apply(&s).unwrap();
        let rhs = p.apply(&q.apply(&s).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
    }

    #[test]
    fn power_examples() {
        assert!(power(&d("2"), 8).unwrap().is_negation());
        assert!(power(&d("4"), 8).unwrap().is_identity());
        assert!(power(&d("0"), 2).unwrap().is_identity());
        assert_eq!(
            power(&d("3/4"), 8).unwrap(),
            power(&d("1/2"), 8)
                .unwrap()
                .compose(&power(&d("1/4"), 8).unwrap())
                .unwrap()
        );
        assert_eq!(power(&d("-1"), 8).unwrap(), power(&d("3"), 8).unwrap());
        assert!(matches!(power(&d("1/8"), 8), Err(Error::NotRepresentable { .. })));
    }

    #[test]
    fn family_point_examples() {
        let s: BitSequence = "+-++-+--".parse().unwrap();
        let at = |a: &str| family_point(&s, &a.parse().unwrap());
        assert_eq!(at("0").defined(), Some(s.clone()));
        assert_eq!(at("pi/2").defined(), Some(i_op(8).unwrap().apply(&s).unwrap()));
        assert_eq!(at("pi").defined(), Some(s.negate()));
        assert!(matches!(
            at("pi/16"),
            Definability::Undefined {
                reason: UndefinedReason::TooFine { .. }
            }
        ));
        assert!(matches!(
            at("λ'"),
            Definability::Undefined {
                reason: UndefinedReason::ForeignBase { .. }
            }
        ));
        let third = family_point_raw(&s, &"pi/3".parse().unwrap());
        assert!(matches!(
            third,
            Definability::Undefined {
                reason: UndefinedReason::NonDyadic { .. }
            }
        ));
    }

    #[test]
    fn grid_examples() {
        let g1 = definable_grid(1, &AngleBase::Zero, GridRange::FullCircle);
        let names: Vec<String> = g1.iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["0", "pi/2", "pi", "3pi/2"]);
        let g2 = definable_grid(2, &AngleBase::Zero, GridRange::FullCircle);
        assert_eq!(g2.len(), 8);
        assert_eq!(g2[1].to_string(), "pi/4");
        assert_eq!(definable_grid(3, &AngleBase::Zero, GridRange::HalfCircle).len(), 8);
        for n in 1..6 {
            let base = AngleBase::Offset("λ'".into());
            let g = definable_grid(n, &base, GridRange::FullCircle);
            assert!(g.contains(&SymbolicAngle::new(base, Dyadic::zero())));
        }
    }

    #[test]
    fn every_grid_angle_is_defined_and_nothing_finer() {
        for n in 1..=5u32 {
            let s = crate::seq::seed_sequence(crate::seq::SeedSource::Generator(n as u64), n).unwrap();
            for a in definable_grid(n, &AngleBase::Zero, GridRange::FullCircle) {
                assert!(family_point(&s, &a).is_defined(), "{a} at N={n}");
                let finer = a.shifted(&Dyadic::new(1, n + 1));
                assert!(!family_point(&s, &finer).is_defined(), "{finer} at N={n}");
            }
        }
    }

    #[test]
    fn json_shape() {
        let op = build_root(0, 2).unwrap();
        let json = serde_json::to_string(&op).unwrap();
        assert_eq!(json, r#"{"perm":[1,0],"signs":[-1,1]}"#);
        let back: SignedPermutation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
        assert!(serde_json::from_str::<SignedPermutation>(r#"{"perm":[0,0],"signs":[1,1]}"#).is_err());
    }
}
