use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use granular::quat::{generate_roots, quaternion_ops};
use granular::roots::{build_root, i_op, power};
use granular::seq::{seed_sequence, SeedSource};
use granular::{Dyadic, SignedPermutation};

use crate::err;
use crate::report::{check_report, status, text, Check, Report, Table, EXACT};

#[derive(Args, Debug, Serialize)]
pub struct AlgebraVerify {
    /// Largest sequence exponent; random lengths run over 2^1 ..= 2^N.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub n: u32,
    /// Number of random sequences.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    /// Generator seed of the first random sequence.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exponent at which exponent pairs are checked exhaustively.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=7))]
    pub exhaustive_n: u32,
}

/// All admissible `α` in `[0, 4)` at length `2^n`.
fn exponents(n: u32) -> Vec<Dyadic> {
    (0..(4i64 << (n - 1))).map(|j| Dyadic::new(j, n - 1)).collect()
}

impl AlgebraVerify {
    pub fn run(&self) -> Result<Report, String> {
        let mut negation = Check::new("i_squared_is_negation");
        let mut orthogonal = Check::new("i_orthogonal_to_input");
        let i_ops = (1..=self.n)
            .map(|e| i_op(1 << e))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for j in 0..self.samples {
            let e = 1 + (j % self.n as u64) as u32;
            let s = seed_sequence(SeedSource::Generator(self.seed.wrapping_add(j)), e).map_err(err)?;
            let i = &i_ops[e as usize - 1];
            let is = i.apply(&s).map_err(err)?;
            negation.record(i.apply(&is).map_err(err)? == s.negate());
            orthogonal.record(s.correlation(&is).map_err(err)?.is_zero());
        }

        let mut halving = Check::new("root_squares_to_previous_root");
        let mut lengths = vec![8usize, 64, 1024, 1 << self.n];
        lengths.sort_unstable();
        lengths.dedup();
        for len in lengths {
            let bits = len.trailing_zeros();
            for m in 1..bits {
                let alpha = Dyadic::new(1, m);
                let p = power(&alpha, len).map_err(err)?;
                let doubled = power(&alpha.mul_pow2(1), len).map_err(err)?;
                halving.record(p.compose(&p).map_err(err)? == doubled);
                let r = build_root(m, len).map_err(err)?;
                halving.record(r.compose(&r).map_err(err)? == build_root(m - 1, len).map_err(err)?);
            }
        }

        let len = 1usize << self.exhaustive_n;
        let exps = exponents(self.exhaustive_n);
        let ops = exps
            .iter()
            .map(|a| power(a, len))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let mut additivity = Check::new("exponent_additivity");
        let mut commutes = Check::new("powers_commute");
        let mut inverse = Check::new("power_inverse");
        for (a, pa) in exps.iter().zip(&ops) {
            let back = (&Dyadic::from_int(4) - a).rem_euclid(4);
            inverse.record(pa.compose(&power(&back, len).map_err(err)?).map_err(err)?.is_identity());
            for (b, pb) in exps.iter().zip(&ops) {
                let ab = pa.compose(pb).map_err(err)?;
                additivity.record(ab == power(&(a + b).rem_euclid(4), len).map_err(err)?);
                commutes.record(ab == pb.compose(pa).map_err(err)?);
            }
        }

        Ok(check_report(
            json!({ "generator": self.seed }),
            vec![negation, orthogonal, halving, additivity, commutes, inverse],
        ))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct QuatVerify {
    /// Highest root-generation level checked.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(2..=10))]
    pub max_level: u32,
}

/// Operator from signed 1-based source indices: `-2` reads `-a2`.
fn from_symbolic(src: &[i64]) -> SignedPermutation {
    let perm = src.iter().map(|v| v.unsigned_abs() as usize - 1).collect();
    let signs = src.iter().map(|v| v.signum() as i8).collect();
    SignedPermutation::new(perm, signs).expect("valid literal")
}

impl QuatVerify {
    pub fn run(&self) -> Result<Report, String> {
        let printed = [
            from_symbolic(&[-2, 1, 4, -3, -6, 5, 8, -7]),
            from_symbolic(&[-3, -4, 1, 2, -7, -8, 5, 6]),
            from_symbolic(&[-4, 3, -2, 1, -8, 7, -6, 5]),
        ];
        let generated = generate_roots(2, 8).map_err(err)?;
        let (i, j, k) = quaternion_ops(8).map_err(err)?;
        let mut matches = Check::new("ijk_match_printed");
        for (g, p) in generated.ops.iter().zip(&printed) {
            matches.record(g == p);
        }
        for (q, p) in [&i, &j, &k].into_iter().zip(&printed) {
            matches.record(q == p);
        }

        let c = |a: &SignedPermutation, b: &SignedPermutation| a.compose(b).expect("same length");
        let neg = SignedPermutation::negation(8);
        let mut squares = Check::new("ijk_square_to_negation");
        for q in [&i, &j, &k] {
            squares.record(c(q, q).is_negation());
        }
        let mut kji = Check::new("kji_is_negation");
        kji.record(c(&c(&k, &j), &i).is_negation());
        let mut table = Check::new("product_table");
        table.record(c(&j, &i) == k);
        table.record(c(&i, &k) == j);
        table.record(c(&k, &j) == i);
        table.record(c(&i, &j) == c(&neg, &k));
        table.record(c(&k, &i) == c(&neg, &j));
        table.record(c(&j, &k) == c(&neg, &i));

        let mut counts = Check::new("root_counts");
        let mut root_squares = Check::new("roots_square_to_negation");
        let mut distinct = Check::new("roots_distinct");
        for m in 1..=self.max_level {
            let set = generate_roots(m, 1 << m).map_err(err)?;
            counts.record(set.len() == (1 << m) - 1);
            for op in &set.ops {
                root_squares.record(c(op, op).is_negation());
            }
            let mut seen = std::collections::HashSet::new();
            distinct.record(set.ops.iter().all(|op| seen.insert(op)));
        }

        Ok(check_report(
            json!(null),
            vec![matches, squares, kji, table, counts, root_squares, distinct],
        ))
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum RootsCmd {
    /// List the roots of minus one at one level.
    Generate(RootsGenerate),
    /// Count the roots at each level and check their squares.
    Count(RootsCount),
}

impl RootsCmd {
    pub fn run(&self) -> Result<Report, String> {
        match self {
            RootsCmd::Generate(a) => a.run(),
            RootsCmd::Count(a) => a.run(),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RootsGenerate {
    /// Level m: 2^m - 1 roots acting on blocks of 2^m.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub level: u32,
    /// Sequence exponent N, at least the level. Defaults to the level.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub n: Option<u32>,
}

impl RootsGenerate {
    pub fn run(&self) -> Result<Report, String> {
        let n = self.n.unwrap_or(self.level);
        let set = generate_roots(self.level, 1 << n).map_err(err)?;
        let mut table = Table::new(&["index", "operator", "squares_to_negation"]);
        let mut failures = Vec::new();
        for (idx, op) in set.ops.iter().enumerate() {
            let ok = op.compose(op).map_err(err)?.is_negation();
            if !ok {
                failures.push(format!("root {idx} does not square to negation"));
            }
            table.push(vec![text(idx), format!("{op:?}"), status(ok).into()]);
        }
        let mut report = Report::new(json!(null), EXACT, &set, table);
        report.failures = failures;
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RootsCount {
    /// Highest level counted.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub max_level: u32,
}

#[derive(Serialize)]
struct CountRow {
    level: u32,
    count: usize,
    expected: usize,
    all_square_to_negation: bool,
}

impl RootsCount {
    pub fn run(&self) -> Result<Report, String> {
        let mut rows = Vec::new();
        for m in 1..=self.max_level {
            let set = generate_roots(m, 1 << m).map_err(err)?;
            let all = set
                .ops
                .iter()
                .all(|op| op.compose(op).map(|sq| sq.is_negation()).unwrap_or(false));
            rows.push(CountRow {
                level: m,
                count: set.len(),
                expected: (1 << m) - 1,
                all_square_to_negation: all,
            });
        }
        let mut table = Table::new(&["level", "count", "expected", "all_square_to_negation"]);
        let mut failures = Vec::new();
        for r in &rows {
            table.push(vec![
                text(r.level),
                text(r.count),
                text(r.expected),
                text(r.all_square_to_negation),
            ]);
            if r.count != r.expected || !r.all_square_to_negation {
                failures.push(format!("level {}", r.level));
            }
        }
        let mut report = Report::new(json!(null), EXACT, json!({ "levels": rows }), table);
        report.failures = failures;
        Ok(report)
    }
}
