//! Command-line entry point: batch subcommands over tuples with JSON, CSV,
//! and plain-text output.
//!
//! Exit codes: 0 on success, 2 on validation errors (malformed arguments,
//! non-free tuple where freeness is required, even entry sum where the
//! cohomology presentation is undefined, admissibility gate), 1 on internal
//! failure or a failed verification sweep. Every error path writes a
//! single-line JSON object to standard error.
//!
//! JSON output is a pure function of the argument list (and the seed it
//! carries): repeated runs are byte-identical. Integers that can exceed 64
//! bits are serialized as decimal strings. All JSON objects carry a
//! `schema: 1` version field. The `--timings` flag adds a wall-clock
//! `runtime_ms` field, deliberately opt-in because it breaks
//! reproducibility.

use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::biquotient::{certify_positivity, free_action_check, CertifyConfig};
use crate::cohomology::{cohomology_summary, relation_matrix, CohomologySummary, FREE_DEGREES};
use crate::error::Error;
use crate::liealg::matrix_entries;
use crate::oracles::verification_report;
use crate::tuples::{
    check_admissibility, enumerate_admissible, fundamental_group_order, invariant_collisions,
    invariant_r, shift_by_split_lcm, split_lcm, symmetric_invariants, AdmissibilityReport, Tuple5,
};

/// Environment variable consulted for the default worker-thread count when
/// `--threads` is not given.
pub const THREADS_ENV_VAR: &str = "POSCURV_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "poscurv",
    version,
    about = "Enumerate curvature-admissible integer 5-tuples, compute their exact topological invariants, and numerically certify the positive curvature bound of the associated 13-dimensional spaces."
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for parallel sections (default: POSCURV_THREADS, then
    /// all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a tuple against all admissibility conditions and report its
    /// basic invariants. Exits 0 whether or not the tuple is admissible.
    Check {
        /// Comma-separated integers, e.g. 1,2,2,2,2
        tuple: String,
    },
    /// Exact invariants of a tuple: elementary symmetric values, torsion
    /// invariant r, fundamental group order, and cohomology when the entry
    /// sum is odd (a structured warning otherwise).
    Invariant {
        /// Comma-separated integers, e.g. 1,2,2,2,2
        tuple: String,
    },
    /// Integer cohomology of the space of a tuple with odd entry sum:
    /// relation matrix, determinant, free ranks, and the invariant factors
    /// of the degree-6 torsion group.
    Cohomology {
        /// Comma-separated integers, e.g. 1,2,2,2,2
        tuple: String,
    },
    /// Enumerate all admissible tuples with entries bounded by a maximum,
    /// in nondecreasing entry order.
    Enum {
        /// Largest entry value to consider (at least 1).
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        max_entry: i64,
    },
    /// Group admissible tuples that share the torsion invariant r —
    /// candidate pairs for homeomorphism-type comparisons.
    Collide {
        /// Largest entry value to consider (at least 1).
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        max_entry: i64,
    },
    /// Numerically certify positivity of the curvature lower bound over
    /// Haar-random base points (evidence, not proof). Requires a free
    /// action; requires admissibility unless --force is given.
    Certify {
        /// Comma-separated integers, e.g. 1,2,2,2,2
        tuple: String,
        /// Number of Haar-random base points.
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Random restarts of the plane search per base point.
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Iteration cap per restart.
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Stationarity tolerance for the projected gradient.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Seed for all randomness in the run.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run on a non-admissible tuple (the action must still be free).
        #[arg(long)]
        force: bool,
        /// Include wall-clock runtime_ms in the report (not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run the independent verification oracles: orbit permutation
    /// envelopes, torus-complement patterns, and extremal-family agreement.
    /// Exits 1 if any oracle check fails.
    Verify {
        /// Number of random diagonal pairs for the orbit oracle.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Seed for all randomness in the sweep.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shift every entry of a tuple by n times the least common multiple of
    /// its split differences, preserving freeness behavior.
    Shift {
        /// Comma-separated integers, e.g. 1,1,1,2,4
        tuple: String,
        /// Positive shift multiplier.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

/// Parses the process arguments, runs one command, prints the report, and
/// returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            emit_error("invalid_argument", &e.to_string(), None);
            return 2;
        }
    };
    init_threads(cli.threads);
    match execute(&cli.command) {
        Ok(outcome) => {
            print!("{}", render(&outcome, cli.format));
            outcome.exit_code
        }
        Err(e) => {
            let (code, kind, detail) = classify_error(&e);
            emit_error(kind, &e.to_string(), detail);
            code
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let from_env = std::env::var(THREADS_ENV_VAR)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(n) = flag.filter(|&n| n > 0).or(from_env) {
        // fails only if a global pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn emit_error(kind: &str, message: &str, detail: Option<Value>) {
    let mut obj = json!({
        "schema": 1,
        "error": kind,
        "message": message,
    });
    if let Some(d) = detail {
        obj["detail"] = d;
    }
    eprintln!("{}", serde_json::to_string(&obj).expect("serializable error"));
}

fn classify_error(e: &Error) -> (i32, &'static str, Option<Value>) {
    match e {
        Error::NotFree {
            divisor,
            i1,
            i2,
            i3,
            i4,
            i5,
        } => (
            2,
            "not_free",
            Some(json!({
                "divisor": divisor.to_string(),
                "indices": [i1, i2, i3, i4, i5],
            })),
        ),
        Error::EvenSigma1 { sigma1 } => (
            2,
            "even_sigma1",
            Some(json!({ "sigma1": sigma1.to_string() })),
        ),
        Error::ZeroSplit { i, j, k, l } => (
            2,
            "zero_split",
            Some(json!({ "indices": [i, j, k, l] })),
        ),
        Error::ShiftOverflow => (2, "overflow", None),
        Error::InvalidArgument(_) => (2, "invalid_argument", None),
        _ => (1, "internal", None),
    }
}

/// A command's result: the canonical JSON value, optional tabular rows for
/// CSV/text rendering of list-shaped reports, and the exit code.
#[derive(Debug)]
struct Outcome {
    value: Value,
    table: Option<Table>,
    exit_code: i32,
}

#[derive(Debug)]
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            value,
            table: None,
            exit_code: 0,
        }
    }
}

fn parse_tuple(s: &str) -> Result<Tuple5, Error> {
    Tuple5::from_str(s)
}

fn execute(command: &Command) -> Result<Outcome, Error> {
    match command {
        Command::Check { tuple } => Ok(cmd_check(&parse_tuple(tuple)?)),
        Command::Invariant { tuple } => Ok(cmd_invariant(&parse_tuple(tuple)?)),
        Command::Cohomology { tuple } => cmd_cohomology(&parse_tuple(tuple)?),
        Command::Enum { max_entry } => Ok(cmd_enum(*max_entry)),
        Command::Collide { max_entry } => Ok(cmd_collide(*max_entry)),
        Command::Certify {
            tuple,
            points,
            restarts,
            iters,
            tol,
            seed,
            force,
            timings,
        } => {
            let config = CertifyConfig {
                num_points: *points,
                restarts: *restarts,
                max_iters: *iters,
                tol: *tol,
                seed: *seed,
            };
            cmd_certify(&parse_tuple(tuple)?, &config, *force, *timings)
        }
        Command::Verify { samples, seed } => Ok(cmd_verify(*samples, *seed)),
        Command::Shift { tuple, n } => cmd_shift(&parse_tuple(tuple)?, *n),
    }
}

fn tuple_json(t: &Tuple5) -> Value {
    json!(t.0.to_vec())
}

fn failures_json(report: &AdmissibilityReport) -> Value {
    Value::Array(
        report
            .failures
            .iter()
            .map(|f| {
                json!({
                    "condition": serde_json::to_value(f.condition).expect("plain enum"),
                    "permutation": f.permutation.to_vec(),
                    "value": f.value.to_string(),
                })
            })
            .collect(),
    )
}

fn sigma_json(sigma: &[num_bigint::BigInt; 5]) -> Value {
    Value::Array(sigma.iter().map(|s| json!(s.to_string())).collect())
}

fn cohomology_json(summary: &CohomologySummary) -> Value {
    let factors: Vec<String> = summary
        .h6
        .nontrivial_factors()
        .iter()
        .map(|d| d.to_string())
        .collect();
    json!({
        "betti": summary.betti.to_vec(),
        "free_degrees": FREE_DEGREES.to_vec(),
        "h6_factors": factors,
        "h6_order": summary.r.to_string(),
        "h8_order": summary.r.to_string(),
    })
}

fn cmd_check(t: &Tuple5) -> Outcome {
    let report = check_admissibility(t);
    let inv = symmetric_invariants(t);
    let value = json!({
        "schema": 1,
        "tuple": tuple_json(t),
        "admissible": report.admissible,
        "failures": failures_json(&report),
        "sigma": sigma_json(&inv.sigma),
        "r": inv.r.to_string(),
        "pi1": fundamental_group_order(t),
    });
    Outcome::ok(value)
}

fn cmd_invariant(t: &Tuple5) -> Outcome {
    let report = check_admissibility(t);
    let inv = symmetric_invariants(t);
    let mut value = json!({
        "schema": 1,
        "tuple": tuple_json(t),
        "admissible": report.admissible,
        "sigma": sigma_json(&inv.sigma),
        "r": inv.r.to_string(),
        "n": inv.n.as_ref().map(|n| n.to_string()),
        "pi1": fundamental_group_order(t),
    });
    match cohomology_summary(t) {
        Ok(summary) => {
            value["cohomology"] = cohomology_json(&summary);
        }
        Err(e @ Error::EvenSigma1 { .. }) => {
            value["warning"] = json!({
                "code": "even_sigma1",
                "message": e.to_string(),
            });
        }
        Err(e) => {
            value["warning"] = json!({
                "code": "internal",
                "message": e.to_string(),
            });
        }
    }
    Outcome::ok(value)
}

fn cmd_cohomology(t: &Tuple5) -> Result<Outcome, Error> {
    let matrix = relation_matrix(t)?;
    let summary = cohomology_summary(t)?;
    let rows: Vec<Vec<String>> = matrix
        .rows
        .iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect())
        .collect();
    let mut value = json!({
        "schema": 1,
        "tuple": tuple_json(t),
        "r": summary.r.to_string(),
        "relation_matrix": rows,
    });
    let c = cohomology_json(&summary);
    for (k, v) in c.as_object().expect("object").iter() {
        value[k] = v.clone();
    }
    Ok(Outcome::ok(value))
}

fn cmd_enum(max_entry: i64) -> Outcome {
    let tuples = enumerate_admissible(max_entry);
    let value = json!({
        "schema": 1,
        "max_entry": max_entry,
        "count": tuples.len(),
        "tuples": tuples.iter().map(tuple_json).collect::<Vec<_>>(),
    });
    let table = Table {
        header: ["p1", "p2", "p3", "p4", "p5"].map(String::from).to_vec(),
        rows: tuples
            .iter()
            .map(|t| t.0.iter().map(|p| p.to_string()).collect())
            .collect(),
    };
    Outcome {
        value,
        table: Some(table),
        exit_code: 0,
    }
}

fn cmd_collide(max_entry: i64) -> Outcome {
    let groups = invariant_collisions(max_entry);
    let mut rows = Vec::new();
    let collisions: Vec<Value> = groups
        .iter()
        .map(|(r, tuples)| {
            for t in tuples {
                rows.push(vec![r.to_string(), t.to_string()]);
            }
            json!({
                "r": r.to_string(),
                "tuples": tuples.iter().map(tuple_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let value = json!({
        "schema": 1,
        "max_entry": max_entry,
        "count": collisions.len(),
        "collisions": collisions,
    });
    let table = Table {
        header: ["r", "tuple"].map(String::from).to_vec(),
        rows,
    };
    Outcome {
        value,
        table: Some(table),
        exit_code: 0,
    }
}

fn cmd_certify(
    t: &Tuple5,
    config: &CertifyConfig,
    force: bool,
    timings: bool,
) -> Result<Outcome, Error> {
    let freeness = free_action_check(t);
    if let Some(w) = freeness.witness {
        return Err(Error::NotFree {
            divisor: w.divisor,
            i1: w.permutation[0],
            i2: w.permutation[1],
            i3: w.permutation[2],
            i4: w.permutation[3],
            i5: w.permutation[4],
        });
    }
    let admissible = check_admissibility(t).admissible;
    if !admissible && !force {
        return Err(Error::InvalidArgument(format!(
            "tuple {t} fails admissibility; pass --force to certify anyway"
        )));
    }
    let cert = certify_positivity(t, config)?;
    let mut value = json!({
        "schema": 1,
        "tuple": tuple_json(t),
        "admissible": admissible,
        "config": {
            "num_points": config.num_points,
            "restarts": config.restarts,
            "max_iters": config.max_iters,
            "tol": config.tol,
            "seed": config.seed,
        },
        "min_value": cert.min_value,
        "argmin": {
            "point_index": cert.argmin.point_index,
            "restart_index": cert.argmin.restart_index,
            "g": matrix_entries(&cert.argmin.g.u),
            "c1": cert.argmin.c1,
            "c2": cert.argmin.c2,
        },
        "per_point_minima": cert.per_point_minima,
        "converged": cert.converged,
        "positive": cert.min_value > 0.0,
    });
    if timings {
        value["runtime_ms"] = json!(cert.runtime_ms as u64);
    }
    Ok(Outcome::ok(value))
}

fn cmd_verify(samples: usize, seed: u64) -> Outcome {
    let report = verification_report(samples, seed);
    let value = json!({
        "schema": 1,
        "orbit_pairs": report.orbit_pairs,
        "max_envelope_excess": report.max_envelope_excess,
        "max_attainment_gap": report.max_attainment_gap,
        "identity_pattern_ok": report.identity_pattern_ok,
        "haar_samples": report.haar_samples,
        "haar_trivial": report.haar_trivial,
        "extremal_samples": report.extremal_samples,
        "extremal_agreement": report.extremal_agreement,
        "passed": report.passed,
        "seed": seed,
    });
    Outcome {
        value,
        table: None,
        exit_code: if report.passed { 0 } else { 1 },
    }
}

fn cmd_shift(t: &Tuple5, n: u64) -> Result<Outcome, Error> {
    let lcm = split_lcm(t)?;
    let shifted = shift_by_split_lcm(t, n)?;
    let value = json!({
        "schema": 1,
        "tuple": tuple_json(t),
        "n": n,
        "split_lcm": lcm.to_string(),
        "shifted": tuple_json(&shifted),
        "shifted_admissible": check_admissibility(&shifted).admissible,
        "shifted_r": invariant_r(&shifted).to_string(),
    });
    Ok(Outcome::ok(value))
}

// ---------------------------------------------------------------------------
// rendering

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(&outcome.value).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(outcome),
        Format::Text => render_text(outcome),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Leaf rendering shared by CSV and text: scalars verbatim, arrays of
/// scalars joined with `;`, anything deeper as compact JSON.
fn flat_value(v: &Value) -> String {
    match v {
        Value::Null => "null".to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => items
            .iter()
            .map(flat_value)
            .collect::<Vec<_>>()
            .join(";"),
        other => serde_json::to_string(other).expect("serializable report"),
    }
}

fn render_csv(outcome: &Outcome) -> String {
    if let Some(table) = &outcome.table {
        let mut out = table
            .header
            .iter()
            .map(|h| csv_escape(h))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for row in &table.rows {
            out.push_str(
                &row.iter()
                    .map(|f| csv_escape(f))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        return out;
    }
    let obj = outcome.value.as_object().expect("reports are objects");
    let header: Vec<String> = obj.keys().cloned().collect();
    let row: Vec<String> = obj.values().map(flat_value).collect();
    let mut out = header
        .iter()
        .map(|h| csv_escape(h))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    out.push_str(
        &row.iter()
            .map(|f| csv_escape(f))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    out
}

fn write_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(val, indent + 2, out);
                    }
                    Value::Array(items)
                        if items.iter().any(|i| i.is_array() || i.is_object()) =>
                    {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(val, indent + 2, out);
                    }
                    other => {
                        out.push_str(&format!("{pad}{k}: {}\n", flat_value(other)));
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        write_text(item, indent + 2, out);
                    }
                    other => out.push_str(&format!("{pad}- {}\n", flat_value(other))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", flat_value(other))),
    }
}

fn render_text(outcome: &Outcome) -> String {
    if let Some(table) = &outcome.table {
        let mut out = String::new();
        for row in &table.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        if table.rows.is_empty() {
            out.push_str("(none)\n");
        }
        return out;
    }
    let mut out = String::new();
    write_text(&outcome.value, 0, &mut out);
    out
}
