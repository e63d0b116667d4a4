//! Rate formulas and the numerical minimax solver.
//!
//! Every evaluator returns a [`RateReport`]: the per-placement sums of
//! per-route terms, the overall (minimum over placements) value and the
//! minimizing placement.

mod closed_form;
mod dispatch;
mod foreseer;
mod minimax;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use closed_form::{
    cap_memoryless_erasure, cap_memoryless_gaussian, cap_memoryless_replacement,
    clean_capacity, gaussian_comparison_capacity, low_foreseer_erasure, low_foreseer_replacement,
    up_foreseer_erasure, up_foreseer_replacement,
};
pub use dispatch::{evaluate_all, table1, BoundTriple, Table1};
pub use foreseer::{foreseer_bound_objective, ForeseerBoundInputs};
pub use minimax::{
    cap_memoryless_general, cap_memoryless_general_both, inner_inf_mi, Csi, InnerInf,
    MinimaxReport, SolverOptions,
};

use crate::channel_model::{NetworkSpec, PlacementVector, RouteSpec};
use crate::error::{Error, Result};
use crate::info_math::{CondPmf, Pmf};

/// Value of one placement: per-route terms and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRate {
    pub placement: PlacementVector,
    pub route_terms: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Evaluator name, e.g. `cap_memoryless_replacement`.
    pub evaluator: String,
    pub description: String,
    pub per_placement: Vec<PlacementRate>,
    pub overall: f64,
    pub argmin: PlacementVector,
    /// Minimizing adversary law per route at `argmin` (solver only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<Vec<CondPmf>>,
    /// Maximizing input law per route (solver only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<Pmf>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RateReport {
    pub fn value_for(&self, placement: &PlacementVector) -> Option<f64> {
        self.per_placement
            .iter()
            .find(|p| &p.placement == placement)
            .map(|p| p.value)
    }
}

/// Builds a report whose overall value is the minimum over placements of
/// `Σ_j term(j, route_j, s(j))`. Ties go to the first placement in
/// enumeration order.
pub(crate) fn min_over_placements<F>(
    spec: &NetworkSpec,
    evaluator: &str,
    description: &str,
    mut term: F,
) -> Result<RateReport>
where
    F: FnMut(usize, &RouteSpec, bool) -> Result<f64>,
{
    let mut per_placement = Vec::new();
    for placement in spec.placements()? {
        let route_terms = spec
            .routes()
            .iter()
            .enumerate()
            .map(|(j, r)| term(j, r, placement.attacked(j)))
            .collect::<Result<Vec<_>>>()?;
        let value = route_terms.iter().sum();
        per_placement.push(PlacementRate {
            placement,
            route_terms,
            value,
        });
    }
    Ok(finish(evaluator, description, per_placement))
}

pub(crate) fn finish(evaluator: &str, description: &str, per_placement: Vec<PlacementRate>) -> RateReport {
    let best = per_placement
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| {
            if p.value < per_placement[best].value {
                i
            } else {
                best
            }
        });
    RateReport {
        evaluator: evaluator.to_string(),
        description: description.to_string(),
        overall: per_placement[best].value,
        argmin: per_placement[best].placement.clone(),
        per_placement,
        adversary: None,
        input: None,
        warnings: Vec::new(),
    }
}

pub(crate) fn require_all<F>(spec: &NetworkSpec, evaluator: &'static str, what: &str, pred: F) -> Result<()>
where
    F: Fn(&RouteSpec) -> bool,
{
    match spec.routes().iter().position(|r| !pred(r)) {
        None => Ok(()),
        Some(j) => Err(Error::NotApplicable {
            evaluator,
            reason: format!(
                "route {j} is {}, evaluator needs {what} routes",
                spec.routes()[j].kind_name()
            ),
        }),
    }
}

/// Long-format CSV: `placement,route,term,value,overall`. Each placement
/// contributes one row per route plus a `sum` row.
pub fn write_reports_csv<W: Write>(reports: &[RateReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["placement", "route", "term", "value", "overall"])
        .map_err(io)?;
    for report in reports {
        let overall = format_value(report.overall);
        for p in &report.per_placement {
            let placement = p.placement.to_string();
            for (j, t) in p.route_terms.iter().enumerate() {
                w.write_record([
                    placement.as_str(),
                    &j.to_string(),
                    &report.evaluator,
                    &format_value(*t),
                    &overall,
                ])
                .map_err(io)?;
            }
            w.write_record([
                placement.as_str(),
                "sum",
                &report.evaluator,
                &format_value(p.value),
                &overall,
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Fixed-precision rendering so emitted tables are byte-stable.
pub fn format_value(v: f64) -> String {
    format!("{v:.12}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let spec = NetworkSpec::identical(2, 1, RouteSpec::bec(0.2, 0.5).unwrap()).unwrap();
        let report = cap_memoryless_erasure(&spec).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&[report], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "placement,route,term,value,overall");
        // 3 placements x (2 routes + sum)
        assert_eq!(lines.len(), 1 + 3 * 3);
        assert!(lines[1].starts_with("00,0,cap_memoryless_erasure,0.8"));
        assert!(lines.iter().any(|l| l.starts_with("01,sum,")));
    }

    #[test]
    fn report_json_round_trip() {
        let spec = NetworkSpec::identical(2, 1, RouteSpec::bsc(0.1, 0.1).unwrap()).unwrap();
        let report = cap_memoryless_replacement(&spec).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: RateReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
