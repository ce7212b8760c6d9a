//! Binary ±1 sequences of length `2^N` and their exact correlation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::Dyadic;

/// A sequence `a_1 .. a_{2^N}` with every `a_j` equal to `+1` or `-1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSequence {
    elems: Vec<i8>,
}

impl BitSequence {
    pub fn new(elems: Vec<i8>) -> Result<Self> {
        check_len(elems.len())?;
        if let Some((index, &v)) = elems.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(Error::InvalidElement { index, value: v as i64 });
        }
        Ok(BitSequence { elems })
    }

    /// `true` maps to `+1`.
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Result<Self> {
        let elems: Vec<i8> = bits.into_iter().map(|b| if b { 1 } else { -1 }).collect();
        check_len(elems.len())?;
        Ok(BitSequence { elems })
    }

    pub(crate) fn from_vec_unchecked(elems: Vec<i8>) -> Self {
        debug_assert!(elems.len().is_power_of_two() && elems.iter().all(|v| v.abs() == 1));
        BitSequence { elems }
    }

    pub fn ones(n: u32) -> Self {
        BitSequence { elems: vec![1; 1 << n] }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// `N` such that `len() == 2^N`.
    pub fn exponent(&self) -> u32 {
        self.elems.len().trailing_zeros()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.elems
    }

    pub fn get(&self, j: usize) -> i8 {
        self.elems[j]
    }

    pub fn negate(&self) -> Self {
        BitSequence {
            elems: self.elems.iter().map(|v| -v).collect(),
        }
    }

    /// Copy with the sign of each listed position flipped.
    pub fn with_flips(&self, positions: &[usize]) -> Self {
        let mut elems = self.elems.clone();
        for &p in positions {
            elems[p] = -elems[p];
        }
        BitSequence { elems }
    }

    /// Number of positions where the two sequences differ.
    pub fn disagreements(&self, other: &BitSequence) -> Result<usize> {
        same_len(self.len(), other.len())?;
        Ok(self.elems.iter().zip(&other.elems).filter(|(a, b)| a != b).count())
    }

    /// `(1/L) * sum_j S_j T_j`, exactly.
    pub fn correlation(&self, other: &BitSequence) -> Result<Dyadic> {
        let d = self.disagreements(other)?;
        let sum = self.len() as i64 - 2 * d as i64;
        Ok(Dyadic::new(sum, self.exponent()))
    }

    /// `+`/`-` string, e.g. `+-++`.
    pub fn to_sign_string(&self) -> String {
        self.elems.iter().map(|&v| if v > 0 { '+' } else { '-' }).collect()
    }
}

/// Free-function form of [`BitSequence::negate`].
pub fn negate(s: &BitSequence) -> BitSequence {
    s.negate()
}

/// Free-function form of [`BitSequence::correlation`].
pub fn correlation(s: &BitSequence, t: &BitSequence) -> Result<Dyadic> {
    s.correlation(t)
}

pub(crate) fn check_len(len: usize) -> Result<()> {
    if len >= 2 && len.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(len))
    }
}

pub(crate) fn same_len(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sign_string())
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence({self})")
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    /// Parses the compact sign form. `−` (U+2212) is accepted for minus.
    fn from_str(s: &str) -> Result<Self> {
        let elems = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' | '−' => Ok(-1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in sequence"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        BitSequence::new(elems)
    }
}

impl Serialize for BitSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elems = Vec::<i8>::deserialize(d)?;
        BitSequence::new(elems).map_err(serde::de::Error::custom)
    }
}

/// Where a seeded sequence's bits come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "seed")]
pub enum SeedSource {
    /// Fractional binary digits of pi.
    Pi,
    /// Fractional binary digits of sqrt(2).
    Sqrt2,
    /// ChaCha8 stream seeded from a `u64`.
    Generator(u64),
}

impl fmt::Display for SeedSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSource::Pi => f.write_str("pi"),
            SeedSource::Sqrt2 => f.write_str("sqrt2"),
            SeedSource::Generator(seed) => write!(f, "seed:{seed}"),
        }
    }
}

impl FromStr for SeedSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pi" => Ok(SeedSource::Pi),
            "sqrt2" => Ok(SeedSource::Sqrt2),
            other => other
                .strip_prefix("seed:")
                .and_then(|v| v.parse().ok())
                .map(SeedSource::Generator)
                .ok_or_else(|| Error::Parse(format!("unknown source {other:?} (pi, sqrt2, seed:<u64>)"))),
        }
    }
}

/// Deterministic sequence of length `2^n`.
///
/// Digit sources start at the first fractional bit and map `1 -> +1`,
/// `0 -> -1`.
pub fn seed_sequence(source: SeedSource, n: u32) -> Result<BitSequence> {
    if n == 0 || n > 30 {
        return Err(Error::InvalidParameter(format!("sequence exponent {n} outside 1..=30")));
    }
    let len = 1usize << n;
    match source {
        SeedSource::Pi => BitSequence::from_bits(fractional_bits(&pi_fixed(len as u64), len)),
        SeedSource::Sqrt2 => BitSequence::from_bits(fractional_bits(&sqrt2_fixed(len as u64), len)),
        SeedSource::Generator(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            BitSequence::from_bits((0..len).map(|_| rng.random::<bool>()))
        }
    }
}

/// Takes `floor(x * 2^bits)` and returns its lowest `bits` bits, most
/// significant first.
fn fractional_bits(fixed: &BigInt, bits: usize) -> Vec<bool> {
    (1..=bits as u64).map(|j| fixed.bit(bits as u64 - j)).collect()
}

/// `floor(sqrt(2) * 2^bits)`.
fn sqrt2_fixed(bits: u64) -> BigInt {
    (BigInt::from(2) << (2 * bits)).sqrt()
}

/// `floor(pi * 2^bits)` via Machin's formula with 64 guard bits.
fn pi_fixed(bits: u64) -> BigInt {
    const GUARD: u64 = 64;
    let p = bits + GUARD;
    let pi = 16 * arctan_inv(5, p) - 4 * arctan_inv(239, p);
    pi >> GUARD
}

/// `arctan(1/x) * 2^p`, truncated term by term.
fn arctan_inv(x: u32, p: u64) -> BigInt {
    let x2 = BigInt::from(x) * x;
    let mut power = (BigInt::one() << p) / x;
    let mut sum = power.clone();
    let mut n = 1u64;
    loop {
        power /= &x2;
        if power.bits() == 0 {
            break;
        }
        let term = &power / (2 * n + 1);
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    sum
}
