use std::fmt::Display;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXACT: &str = "exact: rationals are written as p/q strings";
pub const DOUBLE_DOUBLE: &str = "binary64, rounded from a double-double evaluation (relative error below 1e-15)";
pub const SIMULATION: &str = "binary64 fixed-step RK4; statistics are sample estimates, not converged limits";

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Report {
    pub seed: Value,
    pub precision: &'static str,
    pub result: Value,
    pub table: Table,
    /// Failed verification checks; non-empty means exit code 1.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(seed: Value, precision: &'static str, result: impl Serialize, table: Table) -> Self {
        Report {
            seed,
            precision,
            result: to_value(result),
            table,
            failures: Vec::new(),
        }
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn text(v: impl Display) -> String {
    v.to_string()
}

/// Checks summarised as one row per check.
#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl Check {
    pub fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            failures: 0,
        }
    }

    pub fn record(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

pub fn check_report(seed: Value, checks: Vec<Check>) -> Report {
    let mut table = Table::new(&["check", "cases", "failures", "status"]);
    for c in &checks {
        table.push(vec![
            c.name.into(),
            text(c.cases),
            text(c.failures),
            status(c.failures == 0).into(),
        ]);
    }
    let failures = checks
        .iter()
        .filter(|c| c.failures > 0)
        .map(|c| format!("{}: {} of {} cases failed", c.name, c.failures, c.cases))
        .collect();
    let passed = checks.iter().all(|c| c.failures == 0);
    let mut report = Report::new(seed, EXACT, json!({ "passed": passed, "checks": checks }), table);
    report.failures = failures;
    report
}

pub fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn header(command: &str, config: &Value, report: &Report) -> Map<String, Value> {
    let mut h = Map::new();
    h.insert("tool".into(), json!("granular"));
    h.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    h.insert("command".into(), json!(command));
    h.insert("config".into(), config.clone());
    h.insert("seed".into(), report.seed.clone());
    h.insert("precision".into(), json!(report.precision));
    h
}

pub fn render_json(command: &str, config: &Value, report: &Report) -> Vec<u8> {
    let mut doc = header(command, config, report);
    doc.insert("result".into(), report.result.clone());
    let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).expect("json");
    out.push(b'\n');
    out
}

pub fn render_csv(command: &str, config: &Value, report: &Report) -> Vec<u8> {
    let mut out = Vec::new();
    for (key, value) in header(command, config, report) {
        let shown = match value {
            Value::String(s) => s,
            other => other.to_string(),
        };
        writeln!(out, "# {key}: {shown}").expect("write to vec");
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&report.table.columns).expect("csv");
    for row in &report.table.rows {
        w.write_record(row).expect("csv");
    }
    w.into_inner().expect("csv flush")
}
