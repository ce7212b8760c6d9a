//! Quaternion units as signed permutations of quadruplets, and the
//! self-similar family of square roots of minus one on `2^m`-blocks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::SignedPermutation;
use crate::seq::{check_len, BitSequence};
use crate::superpose::{superpose_onto, SuperpositionSpec};

fn block(perm: [usize; 4], signs: [i8; 4]) -> SignedPermutation {
    SignedPermutation::new(perm.to_vec(), signs.to_vec()).expect("valid quadruplet block")
}

/// `I, J, K` acting on successive quadruplets:
///
/// ```text
/// I: (a1, a2, a3, a4) -> (-a2,  a1,  a4, -a3)
/// J: (a1, a2, a3, a4) -> (-a3, -a4,  a1,  a2)
/// K: (a1, a2, a3, a4) -> (-a4,  a3, -a2,  a1)
/// ```
pub fn quaternion_ops(len: usize) -> Result<(SignedPermutation, SignedPermutation, SignedPermutation)> {
    check_len(len)?;
    if !len.is_multiple_of(4) {
        return Err(Error::BlockTooLarge { block: 4, len });
    }
    let i = block([1, 0, 3, 2], [-1, 1, 1, -1]);
    let j = block([2, 3, 0, 1], [-1, -1, 1, 1]);
    let k = block([3, 2, 1, 0], [-1, 1, -1, 1]);
    Ok((
        SignedPermutation::tiled(&i, len)?,
        SignedPermutation::tiled(&j, len)?,
        SignedPermutation::tiled(&k, len)?,
    ))
}

/// The `2^m - 1` square roots of minus one generated at level `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootSet {
    pub level: u32,
    pub block_size: usize,
    pub len: usize,
    pub ops: Vec<SignedPermutation>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Lifts each block-level root to a block of twice the size.
///
/// With the block split into halves `(l, r)`:
/// `D_P = (P(l), -P(r))`, `B = (-r, l)`, `T_P = (P(r), P(l))`.
fn next_level(prev: &[SignedPermutation]) -> Vec<SignedPermutation> {
    let h = prev[0].len();
    let lift = |parts: [(&[usize], &[i8], usize, i8); 2]| {
        let mut perm = Vec::with_capacity(2 * h);
        let mut signs = Vec::with_capacity(2 * h);
        for (p, s, offset, sign) in parts {
            perm.extend(p.iter().map(|x| x + offset));
            signs.extend(s.iter().map(|x| x * sign));
        }
        SignedPermutation::new(perm, signs).expect("lifted block is a signed permutation")
    };
    let ident: Vec<usize> = (0..h).collect();
    let ones = vec![1i8; h];

    let mut out = Vec::with_capacity(2 * prev.len() + 1);
    for p in prev {
        out.push(lift([(p.perm(), p.signs(), 0, 1), (p.perm(), p.signs(), h, -1)]));
    }
    out.push(lift([(&ident, &ones, h, -1), (&ident, &ones, 0, 1)]));
    for p in prev {
        out.push(lift([(p.perm(), p.signs(), h, 1), (p.perm(), p.signs(), 0, 1)]));
    }
    out
}

/// Generates level `m` (`m >= 1`) tiled over a sequence of length `len`.
///
/// Ordering is every `D_P` in the previous level's order, then `B`, then
/// every `T_P`. Each member is checked to square to negation.
pub fn generate_roots(m: u32, len: usize) -> Result<RootSet> {
    check_len(len)?;
    if m == 0 {
        return Err(Error::InvalidParameter("root level must be at least 1".into()));
    }
    let block_size = 1usize
        .checked_shl(m)
        .filter(|&b| b <= len)
        .ok_or(Error::BlockTooLarge {
            block: 1usize.checked_shl(m).unwrap_or(usize::MAX),
            len,
        })?;
    let mut level = vec![SignedPermutation::new(vec![1, 0], vec![-1, 1])?];
    for _ in 1..m {
        level = next_level(&level);
    }
    let ops = level
        .iter()
        .map(|b| SignedPermutation::tiled(b, len))
        .collect::<Result<Vec<_>>>()?;
    for (idx, op) in ops.iter().enumerate() {
        if !op.compose(op)?.is_negation() {
            return Err(Error::NotRepresentable {
                len,
                what: format!("generated root {idx} at level {m} does not square to -1"),
            });
        }
    }
    Ok(RootSet {
        level: m,
        block_size,
        len,
        ops,
    })
}

/// `S' = cos θ I(S) + sin θ J(S)`: correlation with `I(S)` equals a dyadic
/// `cos θ`, or with `J(S)` equals a dyadic `sin θ`.
pub fn quat_superpose(s: &BitSequence, spec: &SuperpositionSpec) -> Result<BitSequence> {
    let (i, j, _) = quaternion_ops(s.len())?;
    superpose_onto(&i.apply(s)?, &j.apply(s)?, spec)
}
