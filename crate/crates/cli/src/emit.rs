//! CSV results and the plain-text summary table.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use unbiased_jd::harness::EstimateStats;

use crate::CliError;

pub const HEADER: [&str; 11] = [
    "estimator",
    "model",
    "payoff",
    "M",
    "mean",
    "var",
    "stderr",
    "ci99",
    "error_vs_reference",
    "wall_seconds",
    "seed",
];

/// One line of output.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub estimator: String,
    /// Euler step count, shown in the summary table only.
    pub steps: Option<usize>,
    pub model: String,
    pub payoff: String,
    pub trials: u64,
    pub mean: f64,
    pub var: f64,
    pub stderr: f64,
    pub ci99: f64,
    pub error_vs_reference: Option<f64>,
    pub wall_seconds: f64,
    pub seed: u64,
    /// Swept parameter name and value.
    pub parameter: Option<(String, f64)>,
}

impl Row {
    pub fn from_stats(estimator: &str, steps: Option<usize>, model: &str, payoff: &str, s: &EstimateStats, seed: u64, reference: Option<f64>) -> Self {
        Self {
            estimator: estimator.to_string(),
            steps,
            model: model.to_string(),
            payoff: payoff.to_string(),
            trials: s.n,
            mean: s.mean,
            var: s.var(),
            stderr: s.stderr(),
            ci99: s.ci99(),
            error_vs_reference: reference.map(|r| s.mean - r),
            wall_seconds: s.wall_seconds,
            seed,
            parameter: None,
        }
    }
}

/// 17 significant digits: enough to recover every f64 exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn estimator_label(r: &Row) -> String {
    match r.steps {
        Some(p) => format!("{}[p={p}]", r.estimator),
        None => r.estimator.clone(),
    }
}

/// Writes `rows` as CSV. A swept parameter becomes a trailing column named after it.
pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let param = rows.first().and_then(|r| r.parameter.as_ref().map(|(n, _)| n.clone()));
    let mut header: Vec<String> = HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(param.clone());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![
            estimator_label(r),
            r.model.clone(),
            r.payoff.clone(),
            r.trials.to_string(),
            num(r.mean),
            num(r.var),
            num(r.stderr),
            num(r.ci99),
            r.error_vs_reference.map(num).unwrap_or_default(),
            num(r.wall_seconds),
            r.seed.to_string(),
        ];
        if param.is_some() {
            rec.push(r.parameter.as_ref().map(|(_, v)| num(*v)).unwrap_or_default());
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Parsed CSV row, as read back by [`read_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub estimator: String,
    pub model: String,
    pub payoff: String,
    pub trials: u64,
    pub mean: f64,
    pub var: f64,
    pub stderr: f64,
    pub ci99: f64,
    pub error_vs_reference: Option<f64>,
    pub wall_seconds: f64,
    pub seed: u64,
    pub parameter: Option<(String, f64)>,
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRecord>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    let header = r.headers().map_err(io)?.clone();
    let param = header.get(HEADER.len()).map(str::to_string);
    let parse_f = |s: &str| s.parse::<f64>().map_err(|e| CliError::Io(format!("bad number `{s}`: {e}")));
    let parse_u = |s: &str| s.parse::<u64>().map_err(|e| CliError::Io(format!("bad integer `{s}`: {e}")));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io)?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        out.push(CsvRecord {
            estimator: f(0).to_string(),
            model: f(1).to_string(),
            payoff: f(2).to_string(),
            trials: parse_u(f(3))?,
            mean: parse_f(f(4))?,
            var: parse_f(f(5))?,
            stderr: parse_f(f(6))?,
            ci99: parse_f(f(7))?,
            error_vs_reference: if f(8).is_empty() { None } else { Some(parse_f(f(8))?) },
            wall_seconds: parse_f(f(9))?,
            seed: parse_u(f(10))?,
            parameter: match &param {
                Some(name) => Some((name.clone(), parse_f(f(11))?)),
                None => None,
            },
        });
    }
    Ok(out)
}

/// Human-readable table: method, M, p, mean, variance, CI half-width, time.
pub fn summary(rows: &[Row], notes: &[String]) -> String {
    let mut s = String::new();
    let pcol = rows.first().and_then(|r| r.parameter.as_ref().map(|(n, _)| n.clone()));
    let _ = write!(s, "{:<12}", "Method");
    if let Some(p) = &pcol {
        let _ = write!(s, " {p:>10}");
    }
    let _ = writeln!(s, " {:>10} {:>6} {:>12} {:>12} {:>10} {:>10} {:>9}", "M", "p", "Mean", "Var", "CI", "Error", "Time(s)");
    for r in rows {
        let _ = write!(s, "{:<12}", r.estimator);
        if let Some((_, v)) = &r.parameter {
            let _ = write!(s, " {v:>10}");
        }
        let p = r.steps.map_or("-".to_string(), |p| p.to_string());
        let err = r.error_vs_reference.map_or("-".to_string(), |e| format!("{e:.5}"));
        let _ = writeln!(
            s,
            " {:>10} {:>6} {:>12.5} {:>12.5} {:>10.5} {:>10} {:>9.2}",
            r.trials, p, r.mean, r.var, r.ci99, err, r.wall_seconds
        );
    }
    for n in notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("txt")
}

/// Writes the CSV to `path` and the summary next to it.
pub fn emit_results(rows: &[Row], notes: &[String], path: &Path) -> Result<PathBuf, CliError> {
    let err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let file = std::fs::File::create(path).map_err(err)?;
    write_csv(std::io::BufWriter::new(file), rows)?;
    let side = sidecar_path(path);
    std::fs::write(&side, summary(rows, notes)).map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
    Ok(side)
}
