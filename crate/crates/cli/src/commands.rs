use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use knotfield_core::beltrami::{force_free_residual, lambda_1, relax_to_minimizer, ForceFree, RelaxOptions};
use knotfield_core::em_fields::{fmt17, null_residuals, write_grid_text, EMField, NullResiduals};
use knotfield_core::functionals::{magnetic_helicity, DiagnosticsReport, HelicityOptions};
use knotfield_core::grid_forms::{GridSpec3, Signature, VectorField3};
use knotfield_core::knotlines::{line_csv, trace_batch, KnotRecord, TraceOptions};
use knotfield_core::linalg::norm;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::fields::build_field;
use crate::output::{to_json, write_atomic};

const COLUMNS: [&str; 9] = ["x", "y", "z", "Ex", "Ey", "Ez", "Bx", "By", "Bz"];

#[derive(Serialize)]
struct GridInfo {
    counts: [usize; 3],
    lengths: [f64; 3],
    origin: [f64; 3],
}

impl From<&GridSpec3> for GridInfo {
    fn from(g: &GridSpec3) -> Self {
        Self { counts: g.counts(), lengths: g.lengths(), origin: g.origin() }
    }
}

fn record(f: &EMField, idx: usize) -> [f64; 9] {
    let (p, e, b) = (f.grid().node_at(idx), f.e().at(idx), f.b().at(idx));
    [p[0], p[1], p[2], e[0], e[1], e[2], b[0], b[1], b[2]]
}

fn field_csv(f: &EMField) -> String {
    let mut s = COLUMNS.join(",");
    s.push('\n');
    for idx in 0..f.grid().len() {
        let r = record(f, idx).map(fmt17);
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct FieldJson<'a> {
    provenance: &'a [String],
    grid: GridInfo,
    columns: [&'static str; 9],
    records: Vec<[f64; 9]>,
}

/// Writes the field as `<stem>.grid`, `<stem>.csv` or `<stem>.json`.
fn write_field(out: &Path, stem: &str, f: &EMField, provenance: &[String], format: Format) -> Result<PathBuf, CliError> {
    let (name, body) = match format {
        Format::Grid => (format!("{stem}.grid"), write_grid_text(f, provenance)),
        Format::Csv => (format!("{stem}.csv"), field_csv(f)),
        Format::Json => {
            let doc = FieldJson {
                provenance,
                grid: f.grid().into(),
                columns: COLUMNS,
                records: (0..f.grid().len()).map(|i| record(f, i)).collect(),
            };
            (format!("{stem}.json"), to_json(&doc))
        }
    };
    write_atomic(out, &name, body.as_bytes())
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct BuildManifest<'a> {
    kind: &'a str,
    file: String,
    format: Format,
    records: usize,
    grid: GridInfo,
    provenance: &'a [String],
}

pub fn build(cfg: &RunConfig) -> Result<String, CliError> {
    let (f, provenance) = build_field(cfg)?;
    let format = cfg.format.unwrap_or(Format::Grid);
    let path = write_field(&cfg.out, "field", &f, &provenance, format)?;
    let manifest = BuildManifest {
        kind: &cfg.field.kind,
        file: file_name(&path),
        format,
        records: f.grid().len(),
        grid: f.grid().into(),
        provenance: &provenance,
    };
    write_atomic(&cfg.out, "build.json", to_json(&manifest).as_bytes())?;
    Ok(format!("wrote {} ({} records)", path.display(), f.grid().len()))
}

#[derive(Serialize)]
struct Gate {
    passed: bool,
    value: Option<f64>,
    tolerance: Option<f64>,
}

#[derive(Serialize)]
struct DiagnoseReport<'a> {
    source: &'a [String],
    null: NullResiduals,
    arnold_ok: Option<bool>,
    diagnostics: Option<DiagnosticsReport>,
    diagnostics_error: Option<String>,
    force_free: Option<ForceFree>,
    gates: BTreeMap<String, Gate>,
    passed: bool,
}

fn helicity_options(cfg: &RunConfig) -> HelicityOptions {
    HelicityOptions { divergence_tol: Some(cfg.tolerances.helicity_divergence()), remove_mean: true, ..Default::default() }
}

pub fn diagnose(cfg: &RunConfig) -> Result<String, CliError> {
    let (f, provenance) = build_field(cfg)?;
    let null = null_residuals(&f);
    let (diagnostics, diagnostics_error) = match DiagnosticsReport::compute(&f, helicity_options(cfg)) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let force_free = force_free_residual(f.b(), None).ok();
    let tol = &cfg.tolerances;
    let mut gates = BTreeMap::new();
    for name in &cfg.gates {
        let gate = match name.as_str() {
            "null" => {
                let worst = null.dot.max(null.norm);
                Gate { passed: !null.degenerate && worst <= tol.null, value: Some(worst), tolerance: Some(tol.null) }
            }
            "arnold" => Gate {
                passed: diagnostics.is_some_and(|d| d.arnold.satisfied),
                value: diagnostics.map(|d| d.arnold.relative_gap()),
                tolerance: None,
            },
            "force_free" => Gate {
                passed: force_free.is_some_and(|r| r.residual <= tol.force_free),
                value: force_free.map(|r| r.residual),
                tolerance: Some(tol.force_free),
            },
            _ => unreachable!("gates validated"),
        };
        gates.insert(name.clone(), gate);
    }
    let passed = gates.values().all(|g| g.passed);
    let report = DiagnoseReport {
        source: &provenance,
        null,
        arnold_ok: diagnostics.map(|d| d.arnold.satisfied),
        diagnostics,
        diagnostics_error: diagnostics_error.clone(),
        force_free,
        gates,
        passed,
    };
    let text = match &diagnostics {
        Some(d) => d.to_key_value(),
        None => format!(
            "null_dot={}\nnull_norm={}\nerror={}\n",
            fmt17(null.dot),
            fmt17(null.norm),
            diagnostics_error.as_deref().unwrap_or_default()
        ),
    };
    write_atomic(&cfg.out, "report.txt", text.as_bytes())?;
    let path = write_atomic(&cfg.out, "report.json", to_json(&report).as_bytes())?;
    if !passed {
        let failed: Vec<&str> = report.gates.iter().filter(|(_, g)| !g.passed).map(|(k, _)| k.as_str()).collect();
        return Err(CliError::Gate(format!("gate failed: {} (report written to {})", failed.join(", "), path.display())));
    }
    Ok(format!("all gates passed; wrote {}", path.display()))
}

pub fn trace(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.seeds.is_empty() {
        return Err(CliError::usage("trace needs at least one seed (--seed \"x,y,z\" or \"seeds\" in the config)"));
    }
    let (f, _) = build_field(cfg)?;
    let tol = &cfg.tolerances;
    let opts = TraceOptions {
        tol: tol.trace,
        closure_tol: tol.closure,
        h_max: tol.step,
        h_init: tol.step.min(TraceOptions::default().h_init),
        max_arc: tol.max_arc.unwrap_or(64.0 * norm(f.grid().lengths())),
        ..Default::default()
    };
    let traces = trace_batch(f.b(), &cfg.seeds, &opts);
    let json_lines = cfg.format == Some(Format::Json);
    for (i, t) in traces.iter().enumerate() {
        match (t, json_lines) {
            (Ok(l), false) => write_atomic(&cfg.out, &format!("line{i}.csv"), line_csv(l).as_bytes())?,
            (Ok(l), true) => write_atomic(&cfg.out, &format!("line{i}.json"), to_json(l).as_bytes())?,
            (Err(_), false) => write_atomic(&cfg.out, &format!("line{i}.csv"), b"s,x,y,z\n")?,
            (Err(_), true) => write_atomic(&cfg.out, &format!("line{i}.json"), b"null\n")?,
        };
    }
    let hopf = magnetic_helicity(&f, helicity_options(cfg)).ok();
    let knots = KnotRecord::assemble(&cfg.seeds, &traces, hopf);
    let path = write_atomic(&cfg.out, "knot.json", to_json(&knots).as_bytes())?;
    let mut msg = String::new();
    for l in &knots.lines {
        let _ = match &l.error {
            Some(e) => writeln!(msg, "{}: {e}", l.id),
            None => writeln!(msg, "{}: {} closed={}", l.id, l.knot, l.closed),
        };
    }
    let _ = write!(msg, "wrote {}", path.display());
    Ok(msg)
}

#[derive(Serialize)]
struct RelaxSummary {
    iterations: usize,
    energy: f64,
    helicity: f64,
    residual: f64,
    ratio: f64,
    lambda1: f64,
    relative_gap: f64,
    tolerance: f64,
    passed: bool,
    field: String,
}

pub fn relax(cfg: &RunConfig) -> Result<String, CliError> {
    let (f, mut provenance) = build_field(cfg)?;
    let opts = RelaxOptions { tol: cfg.tolerances.relax, max_iters: cfg.max_iters, divergence_tol: cfg.tolerances.relax_divergence() };
    let r = relax_to_minimizer(f.b(), opts)?;
    let grid = *f.grid();
    let relaxed = EMField::new(VectorField3::zeros(grid), r.field.clone(), Signature::Minkowski)?;
    provenance.push(format!("relaxed in {} iterations", r.iterations));
    let path = write_field(&cfg.out, "relaxed", &relaxed, &provenance, cfg.format.unwrap_or(Format::Grid))?;
    write_atomic(&cfg.out, "trace.csv", r.trace_csv().as_bytes())?;
    let last = r.final_row();
    let lambda1 = lambda_1(grid.lengths());
    let ratio = r.ratio();
    let gap = (ratio - lambda1).abs() / lambda1;
    let summary = RelaxSummary {
        iterations: r.iterations,
        energy: last.energy,
        helicity: last.helicity,
        residual: last.residual,
        ratio,
        lambda1,
        relative_gap: gap,
        tolerance: cfg.tolerances.ratio,
        passed: gap <= cfg.tolerances.ratio,
        field: file_name(&path),
    };
    write_atomic(&cfg.out, "summary.json", to_json(&summary).as_bytes())?;
    if !summary.passed {
        return Err(CliError::Gate(format!(
            "E/|H| = {ratio:.12e} differs from lambda_1 = {lambda1:.12e} by {gap:.3e} (tolerance {:.3e})",
            cfg.tolerances.ratio
        )));
    }
    Ok(format!("E/|H| = {ratio:.12e}, lambda_1 = {lambda1:.12e} after {} iterations", r.iterations))
}

const ARTIFACTS: [&str; 4] = ["build.json", "report.json", "knot.json", "summary.json"];

/// Gathers the JSON artifacts found in the output directory into `index.json`.
pub fn report(out: &Path) -> Result<String, CliError> {
    fs::read_dir(out).map_err(|e| CliError::io(out, e))?;
    let mut found = BTreeMap::new();
    for name in ARTIFACTS {
        let path = out.join(name);
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        found.insert(name.trim_end_matches(".json").to_string(), value);
    }
    if found.is_empty() {
        return Err(CliError::usage(format!("no artifacts in {} (expected one of {})", out.display(), ARTIFACTS.join(", "))));
    }
    let passed = found.values().all(|v| v.get("passed").and_then(Value::as_bool).unwrap_or(true));
    let mut msg = String::new();
    for (k, v) in &found {
        let _ = match k.as_str() {
            "build" => writeln!(msg, "build: {} records of {} in {}", v["records"], v["kind"], v["file"]),
            "report" => writeln!(msg, "diagnose: passed={} arnold_ok={}", v["passed"], v["arnold_ok"]),
            "knot" => writeln!(msg, "trace: knots {} linking {}", v["knot_types"], v["linking_matrix"]),
            "summary" => writeln!(msg, "relax: passed={} ratio={} lambda1={}", v["passed"], v["ratio"], v["lambda1"]),
            _ => Ok(()),
        };
    }
    let index = serde_json::json!({ "artifacts": found, "passed": passed });
    let path = write_atomic(out, "index.json", to_json(&index).as_bytes())?;
    let _ = write!(msg, "wrote {}", path.display());
    Ok(msg)
}
