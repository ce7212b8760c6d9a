use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use granular::epr::{
    admissible_cosines, counterfactual_query, interference_scan, pair_correlation_table, PairModel, ScanOutcome, Side,
};
use granular::quat::{quat_superpose, quaternion_ops};
use granular::roots::{definable_grid, family_point_raw, grid_from, grid_intersection, i_op, Definability, GridRange};
use granular::seq::{seed_sequence, SeedSource};
use granular::superpose::{disjointness_certificate, superpose, OffsetAngle, SuperpositionSpec, DEFAULT_FLIP_SEED};
use granular::{AngleBase, BitSequence, Dyadic, RawAngle};

use crate::report::{text, Report, Table, EXACT};
use crate::{display, err};

#[derive(Args, Debug, Serialize)]
pub struct SeqArgs {
    /// Sequence source: pi, sqrt2 or seed:<u64>.
    #[arg(long, default_value = "pi")]
    #[serde(serialize_with = "display")]
    pub source: SeedSource,
    /// Exponent N; the sequence has 2^N elements.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub n: u32,
}

impl SeqArgs {
    fn sequence(&self) -> Result<BitSequence, String> {
        seed_sequence(self.source, self.n).map_err(err)
    }

    fn seed(&self, flip_seed: Option<u64>) -> Value {
        match flip_seed {
            Some(f) => json!({ "source": self.source.to_string(), "flip_seed": f }),
            None => json!({ "source": self.source.to_string() }),
        }
    }
}

fn angle(s: &str) -> Result<String, String> {
    RawAngle::from_str(s).map(|_| s.trim().to_string()).map_err(err)
}

fn raw(s: &str) -> RawAngle {
    s.parse().expect("validated by the argument parser")
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum SeqCmd {
    /// Deterministic sequence from a digit source or generator seed.
    Make(SeqMake),
    /// Exact correlation of two sequences.
    Corr(SeqCorr),
}

impl SeqCmd {
    pub fn run(&self) -> Result<Report, String> {
        match self {
            SeqCmd::Make(a) => a.run(),
            SeqCmd::Corr(a) => a.run(),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SeqMake {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
}

impl SeqMake {
    fn run(&self) -> Result<Report, String> {
        let s = self.seq.sequence()?;
        let mut table = Table::new(&["index", "value"]);
        for (j, v) in s.as_slice().iter().enumerate() {
            table.push(vec![text(j), text(v)]);
        }
        let result = json!({
            "len": s.len(),
            "signs": s.to_sign_string(),
            "elements": s,
        });
        Ok(Report::new(self.seq.seed(None), EXACT, result, table))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SeqCorr {
    /// First sequence: a +/- string, or a source (pi, sqrt2, seed:<u64>).
    #[arg(long)]
    pub a: String,
    /// Second sequence, same forms as --a.
    #[arg(long)]
    pub b: String,
    /// Exponent used for source operands.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub n: u32,
}

impl SeqCorr {
    fn operand(&self, s: &str) -> Result<BitSequence, String> {
        match SeedSource::from_str(s) {
            Ok(src) => seed_sequence(src, self.n).map_err(err),
            Err(_) => BitSequence::from_str(s).map_err(err),
        }
    }

    fn run(&self) -> Result<Report, String> {
        let (a, b) = (self.operand(&self.a)?, self.operand(&self.b)?);
        let corr = a.correlation(&b).map_err(err)?;
        let disagreements = a.disagreements(&b).map_err(err)?;
        let mut table = Table::new(&["len", "disagreements", "correlation"]);
        table.push(vec![text(a.len()), text(disagreements), text(&corr)]);
        let result = json!({
            "len": a.len(),
            "disagreements": disagreements,
            "correlation": corr,
        });
        Ok(Report::new(json!({ "a": self.a, "b": self.b }), EXACT, result, table))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Rotate {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    /// Angle λ, e.g. 3pi/8, pi/3, λ'+pi/4.
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    pub angle: String,
}

impl Rotate {
    pub fn run(&self) -> Result<Report, String> {
        let s = self.seq.sequence()?;
        let point = family_point_raw(&s, &raw(&self.angle));
        let mut table = Table::new(&["angle", "status", "reason", "sequence"]);
        let row = match &point {
            Definability::Defined { value } => vec!["defined".into(), String::new(), value.to_sign_string()],
            Definability::Undefined { reason } => vec!["undefined".into(), text(reason), String::new()],
        };
        table.push([vec![self.angle.clone()], row].concat());
        let result = json!({
            "angle": self.angle,
            "family_point": point,
        });
        Ok(Report::new(self.seq.seed(None), EXACT, result, table))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeArg {
    /// [0, 2pi)
    Full,
    /// [0, pi)
    Half,
}

impl From<RangeArg> for GridRange {
    fn from(r: RangeArg) -> Self {
        match r {
            RangeArg::Full => GridRange::FullCircle,
            RangeArg::Half => GridRange::HalfCircle,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Superpose {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    /// Target cosine of λ', a dyadic rational such as 3/4.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "sin")]
    pub cos: Option<Dyadic>,
    /// Target sine of λ'.
    #[arg(long, allow_hyphen_values = true)]
    pub sin: Option<Dyadic>,
    /// Seed choosing which elements are flipped.
    #[arg(long, default_value_t = DEFAULT_FLIP_SEED)]
    pub flip_seed: u64,
    /// Superpose over I(S) and J(S) instead of S and i(S).
    #[arg(long)]
    pub quaternion: bool,
}

impl Superpose {
    pub fn run(&self) -> Result<Report, String> {
        let s = self.seq.sequence()?;
        let spec = SuperpositionSpec {
            angle: OffsetAngle {
                cos: self.cos.clone(),
                sin: self.sin.clone(),
            },
            flip_seed: self.flip_seed,
        };
        let (sp, cos_ref, sin_ref) = if self.quaternion {
            let (i, j, _) = quaternion_ops(s.len()).map_err(err)?;
            let sp = quat_superpose(&s, &spec).map_err(err)?;
            (sp, i.apply(&s).map_err(err)?, j.apply(&s).map_err(err)?)
        } else {
            let sp = superpose(&s, &spec).map_err(err)?;
            let is = i_op(s.len()).map_err(err)?.apply(&s).map_err(err)?;
            (sp, s.clone(), is)
        };
        let lambda_prime = spec.angle.symbolic().map_err(err)?;
        let cos_realized = cos_ref.correlation(&sp).map_err(err)?;
        let sin_realized = sin_ref.correlation(&sp).map_err(err)?;

        let mut failures = Vec::new();
        if let Some(c) = &self.cos {
            if c != &cos_realized {
                failures.push(format!("realized cosine {cos_realized} differs from {c}"));
            }
        }
        if let Some(v) = &self.sin {
            if v != &sin_realized {
                failures.push(format!("realized sine {sin_realized} differs from {v}"));
            }
        }

        let (cos_name, sin_name) = if self.quaternion {
            ("I(S)", "J(S)")
        } else {
            ("S", "i(S)")
        };
        let mut table = Table::new(&[
            "lambda_prime",
            "cos_reference",
            "cos_realized",
            "sin_reference",
            "sin_realized",
            "superposed",
        ]);
        table.push(vec![
            text(&lambda_prime),
            cos_name.into(),
            text(&cos_realized),
            sin_name.into(),
            text(&sin_realized),
            sp.to_sign_string(),
        ]);
        let result = json!({
            "lambda_prime": lambda_prime,
            "sequence": s.to_sign_string(),
            "superposed": sp.to_sign_string(),
            "cos": { "reference": cos_name, "realized": cos_realized },
            "sin": { "reference": sin_name, "realized": sin_realized },
        });
        let mut report = Report::new(self.seq.seed(Some(self.flip_seed)), EXACT, result, table);
        report.failures = failures;
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DefinabilityCmd {
    /// Cosine of λ' in [0, 1], a dyadic rational.
    #[arg(long)]
    pub c: Dyadic,
    /// Grid exponent N.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub n: u32,
    /// Extent of the grids compared.
    #[arg(long, value_enum, default_value_t = RangeArg::Full)]
    pub range: RangeArg,
}

impl DefinabilityCmd {
    pub fn run(&self) -> Result<Report, String> {
        let certificate = disjointness_certificate(&self.c).map_err(err)?;
        let lambda_prime = OffsetAngle::from_cos(self.c.clone()).symbolic().map_err(err)?;
        let range = GridRange::from(self.range);
        let base = definable_grid(self.n, &AngleBase::Zero, range);
        let offset = grid_from(&lambda_prime, self.n, range);
        let common = grid_intersection(&base, &offset);

        let mut failures = Vec::new();
        if certificate.disjoint != common.is_empty() {
            failures.push(format!(
                "certificate says disjoint = {} but the grids share {} angles",
                certificate.disjoint,
                common.len()
            ));
        }
        let mut table = Table::new(&["cos", "disjoint", "lambda_prime", "base_grid", "offset_grid", "common"]);
        table.push(vec![
            text(&self.c),
            text(certificate.disjoint),
            text(&lambda_prime),
            text(base.len()),
            text(offset.len()),
            text(common.len()),
        ]);
        let result = json!({
            "certificate": certificate,
            "lambda_prime": lambda_prime,
            "grid_sizes": { "base": base.len(), "offset": offset.len() },
            "intersection": common,
        });
        let mut report = Report::new(json!(null), EXACT, result, table);
        report.failures = failures;
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct InterferenceScan {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    /// Seed choosing which elements are flipped.
    #[arg(long, default_value_t = DEFAULT_FLIP_SEED)]
    pub flip_seed: u64,
    /// Cosines to scan, comma separated. Defaults to every admissible one.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Vec<Dyadic>,
}

impl InterferenceScan {
    pub fn run(&self) -> Result<Report, String> {
        let s = self.seq.sequence()?;
        let cs = if self.c.is_empty() {
            admissible_cosines(self.seq.n)
        } else {
            self.c.clone()
        };
        let entries = interference_scan(&s, &cs, self.flip_seed);
        let mut table = Table::new(&["c", "status", "correlation", "flips", "reason"]);
        let mut failures = Vec::new();
        for e in &entries {
            match &e.outcome {
                ScanOutcome::Defined { correlation, flips } => {
                    if correlation != &e.c {
                        failures.push(format!("c = {} realized {correlation}", e.c));
                    }
                    table.push(vec![
                        text(&e.c),
                        "defined".into(),
                        text(correlation),
                        text(flips),
                        String::new(),
                    ]);
                }
                ScanOutcome::Inadmissible { reason } => {
                    table.push(vec![
                        text(&e.c),
                        "inadmissible".into(),
                        String::new(),
                        String::new(),
                        reason.clone(),
                    ]);
                }
            }
        }
        let mut report = Report::new(
            self.seq.seed(Some(self.flip_seed)),
            EXACT,
            json!({ "len": s.len(), "entries": entries }),
            table,
        );
        report.failures = failures;
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EprTable {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    /// Cosine of λ' between S and S'.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "sin")]
    pub cos: Option<Dyadic>,
    /// Sine of λ' between S and S'.
    #[arg(long, allow_hyphen_values = true)]
    pub sin: Option<Dyadic>,
    /// Seed choosing which elements are flipped.
    #[arg(long, default_value_t = DEFAULT_FLIP_SEED)]
    pub flip_seed: u64,
    /// Angles for the left particle, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = angle, default_value = "0,pi/4,pi/2,3pi/4")]
    pub left: Vec<String>,
    /// Angles for the right particle, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = angle, default_value = "λ',λ'+pi/4,λ'+pi/2,pi/4")]
    pub right: Vec<String>,
}

impl EprTable {
    pub fn run(&self) -> Result<Report, String> {
        let spec = SuperpositionSpec {
            angle: OffsetAngle {
                cos: self.cos.clone(),
                sin: self.sin.clone(),
            },
            flip_seed: self.flip_seed,
        };
        let model = PairModel::new(self.seq.sequence()?, spec).map_err(err)?;
        let left: Vec<RawAngle> = self.left.iter().map(|a| raw(a)).collect();
        let right: Vec<RawAngle> = self.right.iter().map(|a| raw(a)).collect();
        let grid = pair_correlation_table(&model, &left, &right);

        let mut table = Table::new(&["left_angle", "right_angle", "status", "correlation", "reason"]);
        let mut cells = Vec::new();
        for (la, row) in self.left.iter().zip(&grid) {
            for (ra, cell) in self.right.iter().zip(row) {
                let (st, corr, reason) = match cell {
                    Definability::Defined { value } => ("defined", text(value), String::new()),
                    Definability::Undefined { reason } => ("undefined", String::new(), text(reason)),
                };
                table.push(vec![la.clone(), ra.clone(), st.into(), corr, reason]);
                cells.push(json!({ "left": la, "right": ra, "entry": cell }));
            }
        }

        // Each particle asked about the other's settings.
        let mut queries = Vec::new();
        for (side, angles, raws) in [(Side::Left, &self.right, &right), (Side::Right, &self.left, &left)] {
            for (text_angle, a) in angles.iter().zip(raws) {
                let verdict = counterfactual_query(&model, side, a).map_err(err)?;
                queries.push(json!({ "side": side, "angle": text_angle, "verdict": verdict }));
            }
        }

        let result = json!({
            "lambda_prime": model.lambda_prime,
            "left_sequence": model.left.to_sign_string(),
            "right_sequence": model.right.to_sign_string(),
            "certificate": model.certificate().map_err(err)?,
            "table": cells,
            "counterfactual": queries,
        });
        Ok(Report::new(self.seq.seed(Some(self.flip_seed)), EXACT, result, table))
    }
}
