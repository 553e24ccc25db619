//! Solver versus uniform-split baseline versus exact optimum.

use serde::Serialize;

use crate::config::SolverConfig;
use crate::error::Result;
use crate::halfspace::MAX_K;
use crate::io::InstanceSpec;
use crate::oracle::{brute_force_optimum, uniform_split_baseline};
use crate::pipeline::solve;
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub n: usize,
    pub provenance: Option<String>,
    pub solver_estimate: Option<f64>,
    pub solver_exact: Option<String>,
    pub baseline_k: usize,
    pub baseline: String,
    pub oracle: Option<String>,
    /// `oracle - solver_exact`.
    pub gap_solver: Option<String>,
    /// `oracle - baseline`.
    pub gap_baseline: Option<String>,
    pub error: Option<String>,
}

pub fn bench_instance(name: &str, spec: &InstanceSpec, config: &SolverConfig) -> Result<BenchRow> {
    let n = spec.probs.len();
    let baseline = uniform_split_baseline(&spec.probs, &spec.theta)?;
    let oracle = if n <= MAX_K {
        Some(brute_force_optimum(&spec.probs, &spec.theta)?.opt_value)
    } else {
        None
    };
    let mut row = BenchRow {
        name: name.to_string(),
        n,
        provenance: None,
        solver_estimate: None,
        solver_exact: None,
        baseline_k: baseline.best_k,
        baseline: format_rational(&baseline.value),
        oracle: oracle.as_ref().map(format_rational),
        gap_solver: None,
        gap_baseline: oracle.as_ref().map(|o| format_rational(&(o - &baseline.value))),
        error: None,
    };
    match solve(&spec.probs, &spec.theta, &spec.epsilon, &spec.delta, config) {
        Ok(report) => {
            let exact: Option<Rational> = report.obj_exact.as_deref().map(|s| parse_rational(s).expect("exact value"));
            row.gap_solver = oracle.as_ref().zip(exact.as_ref()).map(|(o, e)| format_rational(&(o - e)));
            row.solver_exact = exact.as_ref().map(format_rational);
            row.solver_estimate = Some(report.obj_estimate.value);
            row.provenance = Some(report.provenance);
        }
        Err(e) if e.is_guard() => row.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(row)
}

pub fn bench(instances: &[(String, InstanceSpec)], config: &SolverConfig) -> Result<Vec<BenchRow>> {
    instances.iter().map(|(name, spec)| bench_instance(name, spec, config)).collect()
}

const COLUMNS: [&str; 11] = [
    "name",
    "n",
    "provenance",
    "solver_estimate",
    "solver_exact",
    "baseline_k",
    "baseline",
    "oracle",
    "gap_solver",
    "gap_baseline",
    "error",
];

/// Tab-separated table; exact columns are rendered as decimals to six places.
pub fn to_tsv(rows: &[BenchRow]) -> String {
    let dec = |s: &Option<String>| {
        s.as_deref()
            .map(|v| format!("{:.6}", to_f64(&parse_rational(v).expect("exact value"))))
            .unwrap_or_default()
    };
    let mut out = COLUMNS.join("\t");
    out.push('\n');
    for r in rows {
        let cells = [
            r.name.clone(),
            r.n.to_string(),
            r.provenance.clone().unwrap_or_default(),
            r.solver_estimate.map(|v| format!("{v:.6}")).unwrap_or_default(),
            dec(&r.solver_exact),
            r.baseline_k.to_string(),
            dec(&Some(r.baseline.clone())),
            dec(&r.oracle),
            dec(&r.gap_solver),
            dec(&r.gap_baseline),
            r.error.clone().unwrap_or_default().replace(['\t', '\n'], " "),
        ];
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}
