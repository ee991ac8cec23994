//! One configured run: load or generate the graph, execute, verify, and
//! render the JSON artifact and CSV row.

use std::fs;

use derand_core::graph::{check_mis, check_spanner, generate, Graph, SpannerVerdict};
use derand_core::mis::color::coloring_conflict;
use derand_core::mis::{
    color_via_mis, det_mis_bounded_delta, det_mis_clique, det_mis_congest, rand_mis_clique, MisError,
    MisOutcome,
};
use derand_core::num::{ceil_log2, fmt_ratio};
use derand_core::sim::{CostModel, RunMetrics};
use derand_core::spanner::{det_spanner, rand_spanner, SpannerError, SpannerOutcome};
use serde::Serialize;
use serde_json::{json, Value};

use crate::baselines::C_SIZE;
use crate::config::{Algo, GraphSource, RunConfig};
use crate::CliError;

/// Version of the CSV column layout in [`CsvRow`].
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    BoundViolation,
    VerificationFailed,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            _ => 1,
        }
    }
}

/// One CSV line; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub schema: u32,
    pub algo: String,
    pub model: String,
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub diameter: usize,
    pub k: u32,
    pub rng_seed: u64,
    pub status: Status,
    pub verdict: String,
    pub output_size: usize,
    pub rounds: u64,
    pub messages: u64,
    pub max_message_bits: u64,
    pub oversized_charges: u64,
    pub unexplained_oversize: bool,
    pub budget_formula: String,
    pub budget_base: u64,
    pub rounds_per_base: f64,
    pub error: String,
}

impl CsvRow {
    /// Row for a config that failed before producing a graph.
    pub fn config_failure(cfg_line: &str, err: &CliError) -> Self {
        CsvRow {
            schema: CSV_SCHEMA_VERSION,
            algo: String::new(),
            model: String::new(),
            graph: cfg_line.to_string(),
            n: 0,
            m: 0,
            max_degree: 0,
            diameter: 0,
            k: 0,
            rng_seed: 0,
            status: Status::Failed,
            verdict: String::new(),
            output_size: 0,
            rounds: 0,
            messages: 0,
            max_message_bits: 0,
            oversized_charges: 0,
            unexplained_oversize: false,
            budget_formula: String::new(),
            budget_base: 0,
            rounds_per_base: 0.0,
            error: err.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: Status,
    pub json: Value,
    pub row: CsvRow,
    pub metrics: RunMetrics,
}

impl RunOutcome {
    pub fn json_text(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("values serialize") + "\n"
    }
}

pub fn load_graph(cfg: &RunConfig) -> Result<Graph, CliError> {
    match (&cfg.graph, &cfg.spec) {
        (GraphSource::File { path }, _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read graph {}: {e}", path.display())))?;
            Graph::parse(&text).map_err(|e| CliError::Config(format!("graph {}: {e}", path.display())))
        }
        (GraphSource::Gen { .. }, Some(spec)) => {
            generate(spec, cfg.rng_seed).map_err(|e| CliError::Config(e.to_string()))
        }
        (GraphSource::Gen { .. }, None) => Err(CliError::Config("generator spec missing".into())),
    }
}

/// `(formula, base)` for the round budget of an algorithm on `g`.
pub fn budget_base(algo: Algo, g: &Graph, k: u32) -> (&'static str, u64) {
    let log_n = u64::from(ceil_log2(g.n() as u64).max(1));
    match algo {
        Algo::DetMisCongest => ("D*ceil(log2 n)^2", g.diameter().max(1) as u64 * log_n * log_n),
        Algo::RandSpanner | Algo::DetSpanner => ("k*ceil(log2 n)", u64::from(k) * log_n),
        _ => {
            let log_delta = u64::from(ceil_log2(g.max_degree() as u64).max(1));
            ("ceil(log2 Delta)*ceil(log2 n)", log_delta * log_n)
        }
    }
}

enum Solved {
    Mis(MisOutcome),
    Color(derand_core::mis::ColoringOutcome),
    Spanner(SpannerOutcome),
}

/// Runs `cfg`; parameter errors from the algorithms surface as config
/// errors, everything else is reported in the outcome.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let g = load_graph(cfg)?;
    let mis_cfg = cfg.mis_config();
    let spanner_cfg = cfg.spanner_config(matches!(cfg.algo, Algo::DetSpanner).then_some(C_SIZE));
    let solved: Result<Solved, (Status, String)> = match cfg.algo {
        Algo::RandMis => mis_result(rand_mis_clique(&g, &mis_cfg, cfg.rng_seed))?,
        Algo::DetMis => mis_result(det_mis_clique(&g, &mis_cfg, cfg.model))?,
        Algo::DetMisBounded => mis_result(det_mis_bounded_delta(&g, &mis_cfg))?,
        Algo::DetMisCongest => mis_result(det_mis_congest(&g, &mis_cfg))?,
        Algo::Color => match color_via_mis(&g, &mis_cfg) {
            Ok(out) => Ok(Solved::Color(out)),
            Err(e) => Err(mis_failure(e)?),
        },
        Algo::RandSpanner => spanner_result(rand_spanner(&g, cfg.k, cfg.rng_seed, &spanner_cfg))?,
        Algo::DetSpanner => spanner_result(det_spanner(&g, cfg.k, &spanner_cfg))?,
    };

    let model = CostModel::new(cfg.model, g.n(), cfg.bandwidth_factor);
    let (formula, base) = budget_base(cfg.algo, &g, cfg.k);
    let (status, verdict, size, metrics, result, error) = match solved {
        Err((status, msg)) => (status, String::new(), 0, RunMetrics::default(), Value::Null, msg),
        Ok(Solved::Mis(out)) => {
            let verdict = check_mis(&g, &out.set);
            let status = if verdict.is_valid() { Status::Ok } else { Status::VerificationFailed };
            let result = json!({
                "mis": out.set.to_vec(),
                "check_mis": verdict.to_string(),
                "report": out.report,
            });
            (status, verdict.to_string(), out.set.len(), out.metrics, result, String::new())
        }
        Ok(Solved::Color(out)) => {
            let used: std::collections::BTreeSet<_> = out.colors.iter().collect();
            let verdict = match coloring_conflict(&g, &out.colors) {
                None if used.len() <= g.max_degree() + 1 => "valid".to_string(),
                None => format!("too_many_colors({})", used.len()),
                Some((u, v)) => format!("conflict({u},{v})"),
            };
            let status = if verdict == "valid" { Status::Ok } else { Status::VerificationFailed };
            let result = json!({
                "colors": out.colors,
                "palette": out.palette,
                "colors_used": used.len(),
                "used_bounded_variant": out.used_bounded_variant,
                "check_coloring": verdict,
                "report": out.report,
            });
            (status, verdict, used.len(), out.metrics, result, String::new())
        }
        Ok(Solved::Spanner(out)) => {
            let verdict = check_spanner(&g, &out.edges, cfg.k);
            let status = if verdict.is_valid() { Status::Ok } else { Status::VerificationFailed };
            let max_stretch = match &verdict {
                SpannerVerdict::Valid { max_stretch } => Some(fmt_ratio(max_stretch)),
                SpannerVerdict::Violated { .. } => None,
            };
            let edges: Vec<[usize; 2]> = out.edges.iter().map(|(u, v)| [u, v]).collect();
            let result = json!({
                "edges": edges,
                "size": out.edges.len(),
                "check_spanner": verdict.to_string(),
                "max_stretch": max_stretch,
                "report": out.report,
            });
            (status, verdict.to_string(), out.edges.len(), out.metrics, result, String::new())
        }
    };

    let row = CsvRow {
        schema: CSV_SCHEMA_VERSION,
        algo: cfg.algo.to_string(),
        model: cfg.model.to_string(),
        graph: cfg.graph_label(),
        n: g.n(),
        m: g.m(),
        max_degree: g.max_degree(),
        diameter: g.diameter(),
        k: cfg.k,
        rng_seed: cfg.rng_seed,
        status,
        verdict,
        output_size: size,
        rounds: metrics.rounds,
        messages: metrics.messages,
        max_message_bits: metrics.max_message_bits,
        oversized_charges: metrics.oversized_charges,
        unexplained_oversize: metrics.has_unexplained_oversize(&model),
        budget_formula: formula.to_string(),
        budget_base: base,
        rounds_per_base: metrics.rounds as f64 / base as f64,
        error: error.clone(),
    };
    let json = json!({
        "schema": CSV_SCHEMA_VERSION,
        "config": cfg,
        "graph": {
            "n": g.n(),
            "m": g.m(),
            "max_degree": g.max_degree(),
            "diameter": g.diameter(),
            "weighted": !g.is_unweighted(),
        },
        "status": status,
        "error": (!error.is_empty()).then_some(error),
        "metrics": metrics,
        "bandwidth_bits": model.bandwidth,
        "budget": { "formula": formula, "base": base },
        "result": result,
    });
    Ok(RunOutcome {
        status,
        json,
        row,
        metrics,
    })
}

fn mis_failure(e: MisError) -> Result<(Status, String), CliError> {
    if e.is_parameter() {
        return Err(CliError::Config(e.to_string()));
    }
    let status = if e.is_bound_violation() { Status::BoundViolation } else { Status::Failed };
    Ok((status, e.to_string()))
}

fn mis_result(r: Result<MisOutcome, MisError>) -> Result<Result<Solved, (Status, String)>, CliError> {
    match r {
        Ok(out) => Ok(Ok(Solved::Mis(out))),
        Err(e) => Ok(Err(mis_failure(e)?)),
    }
}

fn spanner_result(
    r: Result<SpannerOutcome, SpannerError>,
) -> Result<Result<Solved, (Status, String)>, CliError> {
    match r {
        Ok(out) => Ok(Ok(Solved::Spanner(out))),
        Err(e) if e.is_parameter() => Err(CliError::Config(e.to_string())),
        Err(e) => {
            let status = if e.is_bound_violation() { Status::BoundViolation } else { Status::Failed };
            Ok(Err((status, e.to_string())))
        }
    }
}

/// Serializes rows (with header) to CSV text.
pub fn csv_text(rows: &[CsvRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(csv_header())?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn csv_header() -> [&'static str; 22] {
    [
        "schema",
        "algo",
        "model",
        "graph",
        "n",
        "m",
        "max_degree",
        "diameter",
        "k",
        "rng_seed",
        "status",
        "verdict",
        "output_size",
        "rounds",
        "messages",
        "max_message_bits",
        "oversized_charges",
        "unexplained_oversize",
        "budget_formula",
        "budget_base",
        "rounds_per_base",
        "error",
    ]
}

/// Runs `cfg` and writes its artifacts where configured.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let out = execute(cfg)?;
    if let Some(path) = &cfg.out {
        fs::write(path, out.json_text())?;
    }
    if let Some(path) = &cfg.csv {
        fs::write(path, csv_text(std::slice::from_ref(&out.row))?)?;
    }
    Ok(out)
}
