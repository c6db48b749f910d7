use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kerr_mzi::interferometer::KerrKind;
use serde::Serialize;

use crate::config::Scenario;
use crate::error::CliError;
use crate::observables::evaluate;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Sweep results in column order.
#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Deterministic number formatting: shortest round-trip digits, exponent
/// form for very small or large magnitudes, `inf`/`-inf`/`nan` sentinels.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn columns(scenario: &Scenario) -> Vec<String> {
    let mut cols = vec![scenario.sweep.axis.column().to_string()];
    for o in &scenario.output.observables {
        for k in &scenario.circuit.kinds {
            cols.push(format!("{}_{k}", o.name()));
        }
    }
    cols.extend(scenario.output.references.iter().map(|r| r.name().to_string()));
    cols
}

pub fn compute(scenario: &Scenario) -> Result<Table, CliError> {
    let xs = scenario.sweep_values();
    let kinds = scenario.kinds();
    let tasks: Vec<(usize, KerrKind)> = (0..xs.len()).flat_map(|i| kinds.iter().map(move |&k| (i, k))).collect();
    let results = kerr_mzi::par::try_map_slice(&tasks, |&(i, kind)| evaluate(scenario.point(xs[i]), kind, &scenario.output.observables))?;

    let n_obs = scenario.output.observables.len();
    let mut rows = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![x];
        let per_kind = &results[i * kinds.len()..(i + 1) * kinds.len()];
        for o in 0..n_obs {
            row.extend(per_kind.iter().map(|vals| vals[o]));
        }
        let nbar = scenario.point(x).input_spec()?.mean_photon_number();
        row.extend(scenario.output.references.iter().map(|r| r.value(nbar)));
        rows.push(row);
    }
    Ok(Table { columns: columns(scenario), rows })
}

pub fn to_csv(table: &Table) -> String {
    let mut s = table.columns.join(",");
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct ColumnSummary {
    name: String,
    min: Option<f64>,
    argmin: Option<f64>,
    max: Option<f64>,
    argmax: Option<f64>,
    non_finite: usize,
}

#[derive(Serialize)]
struct Truncation {
    n_max_min: usize,
    n_max_max: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    tool: &'static str,
    version: &'static str,
    csv: String,
    rows: usize,
    columns: Vec<ColumnSummary>,
    truncation: Truncation,
    scenario: &'a Scenario,
}

pub fn cutoffs(scenario: &Scenario) -> Result<Vec<usize>, CliError> {
    scenario.sweep_values().iter().map(|&x| scenario.point(x).cutoff()).collect()
}

fn summarise(table: &Table) -> Vec<ColumnSummary> {
    (0..table.columns.len())
        .map(|c| {
            let mut s = ColumnSummary { name: table.columns[c].clone(), min: None, argmin: None, max: None, argmax: None, non_finite: 0 };
            for row in &table.rows {
                let (x, v) = (row[0], row[c]);
                if !v.is_finite() {
                    s.non_finite += 1;
                    continue;
                }
                if s.min.is_none_or(|m| v < m) {
                    s.min = Some(v);
                    s.argmin = Some(x);
                }
                if s.max.is_none_or(|m| v > m) {
                    s.max = Some(v);
                    s.argmax = Some(x);
                }
            }
            s
        })
        .collect()
}

pub fn summary_json(scenario: &Scenario, table: &Table, cutoffs: &[usize]) -> String {
    let summary = Summary {
        tool: "kerr-mzi",
        version: VERSION,
        csv: format!("{}.csv", scenario.name),
        rows: table.rows.len(),
        columns: summarise(table),
        truncation: Truncation {
            n_max_min: cutoffs.iter().copied().min().unwrap_or(0),
            n_max_max: cutoffs.iter().copied().max().unwrap_or(0),
        },
        scenario,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serialises");
    s.push('\n');
    s
}

/// Runs the sweep and writes `<name>.csv` and `<name>.json` into `out`.
pub fn run(scenario: &Scenario, out: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let cuts = cutoffs(scenario)?;
    let table = compute(scenario)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    let csv = out.join(format!("{}.csv", scenario.name));
    let json = out.join(format!("{}.json", scenario.name));
    std::fs::write(&csv, to_csv(&table)).map_err(|e| CliError::Io(format!("cannot write {}: {e}", csv.display())))?;
    std::fs::write(&json, summary_json(scenario, &table, &cuts)).map_err(|e| CliError::Io(format!("cannot write {}: {e}", json.display())))?;
    Ok((csv, json))
}

/// Resource report without running the sweep.
pub fn validate_report(scenario: &Scenario) -> Result<String, CliError> {
    let cuts = cutoffs(scenario)?;
    let n = cuts.iter().copied().max().unwrap_or(0);
    let sectors = n + 1;
    let basis = (n + 1) * (n + 2) / 2;
    // Dense sector blocks of complex doubles, three copies alive during a
    // lossy step; pure or rank-1 states need one vector per sector.
    let dense: usize = (0..=n).map(|m| (m + 1) * (m + 1)).sum::<usize>() * 16 * 3;
    let lossy = scenario.circuit.eta_loss > 0.0 || scenario.sweep.axis == crate::config::Axis::EtaLoss;
    let bytes = if lossy { dense } else { basis * 16 * 3 };
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", scenario.name);
    let _ = writeln!(s, "sweep: {} x {} points", scenario.sweep.axis.column(), scenario.sweep.points);
    let _ = writeln!(s, "kinds: {}", scenario.circuit.kinds.join(", "));
    let _ = writeln!(s, "N_max: {} (range {}..={})", n, cuts.iter().min().unwrap_or(&0), n);
    let _ = writeln!(s, "sectors: {sectors}");
    let _ = writeln!(s, "basis dimension: {basis}");
    let _ = writeln!(s, "memory estimate: {:.1} MiB per worker", bytes as f64 / (1024.0 * 1024.0));
    let _ = writeln!(s, "evaluations: {}", scenario.sweep.points * scenario.circuit.kinds.len());
    Ok(s)
}
