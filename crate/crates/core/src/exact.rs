//! Exact dyadic rationals, symbolic circle angles and the cosine/sine
//! rationality predicates used by the disjointness argument.
//!
//! Nothing in this module touches floating point. Angles are stored as a
//! base tag plus a dyadic multiple of pi, so an irrational offset such as
//! `arccos(1/2)` is carried around as a label and never approximated.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational `num / 2^k`.
///
/// Always normalized: `num` is odd, or `num == 0` and `k == 0`. Structural
/// equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    k: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, k: u32) -> Self {
        let mut num = num.into();
        let mut k = k;
        if num.is_zero() {
            return Dyadic { num, k: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(k as u64) as u32;
        if tz > 0 {
            num >>= tz;
            k -= tz;
        }
        Dyadic { num, k }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n, 0)
    }

    /// `num / den` if the reduced denominator is a power of two.
    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Option<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return None;
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_zero() { (num, den) } else { (num / &g, den / &g) };
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let k = den.trailing_zeros().unwrap_or(0);
        if den >> k != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(num, u32::try_from(k).ok()?))
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    /// Exponent of the reduced denominator `2^k`.
    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn denom(&self) -> BigInt {
        BigInt::one() << self.k
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.k == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            k: self.k,
        }
    }

    /// Largest integer not greater than `self`.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.denom())
    }

    /// Representative of `self` modulo the integer `m`, in `[0, m)`.
    pub fn rem_euclid(&self, m: u32) -> Self {
        let modulus = BigInt::from(m) << self.k;
        Dyadic::new(self.num.mod_floor(&modulus), self.k)
    }

    /// Scale by `2^e` (`e` may be negative).
    pub fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            Dyadic::new(&self.num << (e as u64), self.k)
        } else {
            let shift = e.unsigned_abs();
            let k = u32::try_from(self.k as u64 + shift).expect("dyadic exponent overflow");
            Dyadic::new(self.num.clone(), k)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.num.bits().saturating_sub(64);
        let top = (&self.num >> shift).to_f64().unwrap_or(f64::NAN);
        let e = shift as i64 - self.k as i64;
        top * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Bits of the fractional part, most significant first: `b_1 b_2 ... b_k`
    /// with `frac = sum b_m / 2^m`.
    pub fn fractional_bits(&self) -> Vec<bool> {
        let frac = self.rem_euclid(1);
        (1..=frac.k).map(|m| frac.num.bit((frac.k - m) as u64)).collect()
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.k.max(other.k);
        let a = &self.num << (k - self.k);
        let b = &other.num << (k - other.k);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let k = self.k.max(rhs.k);
        Dyadic::new((&self.num << (k - self.k)) + (&rhs.num << (k - rhs.k)), k)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.k + rhs.k)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            k: self.k,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denom())
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `p`, `p/q` (q a power of two after reduction) and finite
    /// binary-terminating decimals such as `0.375`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return Dyadic::from_ratio(p, q).ok_or_else(bad);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let mut num: BigInt = digits.parse().map_err(|_| bad())?;
            if neg {
                num = -num;
            }
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Dyadic::from_ratio(num, den).ok_or_else(bad);
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Dyadic::from_int(p))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Base point of a symbolic angle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AngleBase {
    Zero,
    /// An angle known only by name, e.g. `λ'` with a dyadic cosine.
    Offset(String),
}

/// `base + coeff * pi`, compared structurally after reducing `coeff` mod 4.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicAngle {
    pub base: AngleBase,
    pub coeff: Dyadic,
}

/// Default label for the superposition offset angle.
pub const LAMBDA_PRIME: &str = "λ'";

impl SymbolicAngle {
    pub fn new(base: AngleBase, coeff: Dyadic) -> Self {
        SymbolicAngle { base, coeff }.normalize()
    }

    pub fn zero_based(coeff: Dyadic) -> Self {
        SymbolicAngle::new(AngleBase::Zero, coeff)
    }

    pub fn offset(label: impl Into<String>, coeff: Dyadic) -> Self {
        SymbolicAngle::new(AngleBase::Offset(label.into()), coeff)
    }

    pub fn normalize(self) -> Self {
        SymbolicAngle {
            coeff: self.coeff.rem_euclid(4),
            base: self.base,
        }
    }

    /// `self - other` as a multiple of pi, when both share a base.
    pub fn difference(&self, other: &SymbolicAngle) -> Option<Dyadic> {
        (self.base == other.base).then(|| (&self.coeff - &other.coeff).rem_euclid(4))
    }

    pub fn shifted(&self, by: &Dyadic) -> Self {
        SymbolicAngle::new(self.base.clone(), &self.coeff + by)
    }
}

/// Normalizes the coefficient of pi on construction.
pub fn angle_normalize(a: SymbolicAngle) -> SymbolicAngle {
    a.normalize()
}

/// `p/q · pi` in lowest terms, written `3pi/8`, `-pi`, `0`.
fn fmt_pi_ratio(p: &BigInt, q: &BigInt) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let g = p.gcd(q);
    let (mut p, mut q) = (p / &g, q / &g);
    if q.is_negative() {
        p = -p;
        q = -q;
    }
    let lead = if p.is_one() {
        String::new()
    } else if (-&p).is_one() {
        "-".into()
    } else {
        p.to_string()
    };
    if q.is_one() {
        format!("{lead}pi")
    } else {
        format!("{lead}pi/{q}")
    }
}

fn fmt_angle(f: &mut fmt::Formatter<'_>, base: &AngleBase, p: &BigInt, q: &BigInt) -> fmt::Result {
    match base {
        AngleBase::Zero => f.write_str(&fmt_pi_ratio(p, q)),
        AngleBase::Offset(label) if p.is_zero() => f.write_str(label),
        AngleBase::Offset(label) if p.is_negative() != q.is_negative() => {
            write!(f, "{label}-{}", fmt_pi_ratio(&-p, q))
        }
        AngleBase::Offset(label) => write!(f, "{label}+{}", fmt_pi_ratio(p, q)),
    }
}

impl fmt::Display for RawAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_angle(f, &self.base, &self.num, &self.den)
    }
}

impl fmt::Display for SymbolicAngle {
    /// `0`, `pi/4`, `3pi/8`, `λ'`, `λ'+pi/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_angle(f, &self.base, self.coeff.numer(), &self.coeff.denom())
    }
}

/// A parsed angle whose coefficient of pi need not be dyadic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAngle {
    pub base: AngleBase,
    pub num: BigInt,
    pub den: BigInt,
}

impl RawAngle {
    /// The symbolic angle, or `None` if the coefficient is not dyadic.
    pub fn to_symbolic(&self) -> Option<SymbolicAngle> {
        Dyadic::from_ratio(self.num.clone(), self.den.clone()).map(|c| SymbolicAngle::new(self.base.clone(), c))
    }
}

fn parse_pi_multiple(s: &str) -> Option<(BigInt, BigInt)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Some((BigInt::zero(), BigInt::one()));
    }
    let s = s.replace(['·', '*'], "").replace('π', "pi");
    let int = |t: &str| -> Option<BigInt> {
        match t {
            "" | "+" => Some(BigInt::one()),
            "-" => Some(-BigInt::one()),
            _ => t.parse().ok(),
        }
    };
    if let Some(idx) = s.find("pi") {
        let (head, tail) = (&s[..idx], &s[idx + 2..]);
        if tail.is_empty() {
            // `pi`, `3pi`, `3/8pi`
            if let Some((p, q)) = head.split_once('/') {
                return Some((int(p)?, q.parse().ok()?));
            }
            return Some((int(head)?, BigInt::one()));
        }
        // `pi/4`, `3pi/8`
        let q = tail.strip_prefix('/')?;
        return Some((int(head)?, q.parse().ok()?));
    }
    if s == "0" {
        return Some((BigInt::zero(), BigInt::one()));
    }
    None
}

impl FromStr for RawAngle {
    type Err = Error;

    /// Accepts `0`, `pi`, `pi/4`, `3pi/8`, `3/8·pi`, `λ'`, `λ'+pi/2`, `λ'-pi/4`.
    /// `l'` and `lp` are ASCII spellings of the offset label.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not an angle: {s:?}"));
        let t = s.trim();
        for label in [LAMBDA_PRIME, "l'", "lp"] {
            if let Some(rest) = t.strip_prefix(label) {
                let rest = rest.trim();
                let (sign, body) = match rest.chars().next() {
                    None => (1, ""),
                    Some('+') => (1, &rest[1..]),
                    Some('-') => (-1, &rest[1..]),
                    _ => return Err(bad()),
                };
                if !rest.is_empty() && body.trim().is_empty() {
                    return Err(bad());
                }
                let (num, den) = parse_pi_multiple(body).ok_or_else(bad)?;
                return Ok(RawAngle {
                    base: AngleBase::Offset(LAMBDA_PRIME.into()),
                    num: num * sign,
                    den,
                });
            }
        }
        if t.is_empty() {
            return Err(bad());
        }
        let (num, den) = parse_pi_multiple(t).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(RawAngle {
            base: AngleBase::Zero,
            num,
            den,
        })
    }
}

impl FromStr for SymbolicAngle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let raw: RawAngle = s.parse()?;
        raw.to_symbolic()
            .ok_or_else(|| Error::Parse(format!("coefficient of pi is not dyadic: {s:?}")))
    }
}

impl Serialize for SymbolicAngle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Rationality of `cos(q * pi)` for dyadic `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "value")]
pub enum CosClass {
    RationalValue(Dyadic),
    Irrational,
}

/// Classifies `cos(q * pi)`.
///
/// For rational `q` the cosine is rational only when `q mod 2` lies in
/// `{0, 1/3, 1/2, 2/3, 1, 4/3, 3/2, 5/3}`; the thirds are never dyadic, so for
/// dyadic `q` only the quarter-turn multiples survive.
pub fn cos_rationality_class(q: &Dyadic) -> CosClass {
    let r = q.rem_euclid(2);
    if r.exponent() > 1 {
        return CosClass::Irrational;
    }
    // r is now one of 0, 1/2, 1, 3/2
    let value = match (r.numer().to_i64(), r.exponent()) {
        (Some(0), 0) => 1,
        (Some(1), 0) => -1,
        (Some(_), 1) => 0,
        _ => unreachable!("q mod 2 with exponent <= 1"),
    };
    CosClass::RationalValue(Dyadic::from_int(value))
}

/// Whether `sqrt(1 - c^2)` is dyadic, for `0 <= c <= 1`.
///
/// With `c = p / 2^k`, `sqrt(1 - c^2) = sqrt(4^k - p^2) / 2^k`, which is
/// dyadic exactly when `4^k - p^2` is a perfect square.
pub fn sin_is_dyadic(c: &Dyadic) -> Result<bool> {
    Ok(sin_of_dyadic_cos(c)?.is_some())
}

/// `sqrt(1 - c^2)` when it is dyadic.
pub fn sin_of_dyadic_cos(c: &Dyadic) -> Result<Option<Dyadic>> {
    if c.is_negative() || c > &Dyadic::one() {
        return Err(Error::OutOfDomain {
            value: c.to_string(),
            domain: "[0, 1]",
        });
    }
    let four_k = BigInt::one() << (2 * c.exponent());
    let gap = four_k - c.numer() * c.numer();
    let root = gap.sqrt();
    Ok((&root * &root == gap).then(|| Dyadic::new(root, c.exponent())))
}
