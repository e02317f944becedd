//! Residual reports and their CSV and JSON forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScenarioError};
use crate::run::Outcome;
use crate::schema::{Check, SweepSpec, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One check at one sample point, or over the whole sample for global checks
/// (empty `point`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scenario: String,
    pub check: Check,
    pub p: f64,
    /// Parameter values other than `p`.
    pub params: BTreeMap<String, f64>,
    pub point: Vec<f64>,
    pub residual_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub singular: bool,
}

impl Row {
    pub(crate) fn from_outcome(
        scenario: &str,
        check: Check,
        p: f64,
        params: &BTreeMap<String, f64>,
        point: Option<Vec<f64>>,
        outcome: Outcome,
        tolerance: f64,
    ) -> Row {
        let mut row = Row {
            scenario: scenario.to_string(),
            check,
            p,
            params: params.clone(),
            point: point.unwrap_or_default(),
            residual_norm: None,
            value: None,
            pass: false,
            error: None,
            singular: false,
        };
        match outcome {
            Outcome::Value {
                residual,
                value,
                tolerance: own,
                failure,
            } => {
                row.residual_norm = Some(residual);
                row.value = value;
                row.pass = failure.is_none()
                    && residual.is_finite()
                    && residual < own.unwrap_or(tolerance);
                row.error = failure;
            }
            Outcome::Failed { message, singular } => {
                row.error = Some(message);
                row.singular = singular;
            }
        }
        row
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: Check,
    pub evaluations: usize,
    pub failures: usize,
    pub singularities: usize,
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema: String,
    pub scenario: String,
    pub tolerance: f64,
    pub rows: Vec<Row>,
    pub summary: Vec<CheckSummary>,
    pub verdict: Verdict,
}

impl ResidualReport {
    pub fn new(scenario: &str, tolerance: f64, rows: Vec<Row>) -> ResidualReport {
        let mut by_check: BTreeMap<Check, CheckSummary> = BTreeMap::new();
        for r in &rows {
            let s = by_check.entry(r.check).or_insert(CheckSummary {
                check: r.check,
                evaluations: 0,
                failures: 0,
                singularities: 0,
                max_residual: None,
            });
            s.evaluations += 1;
            s.failures += usize::from(!r.pass);
            s.singularities += usize::from(r.singular);
            if let Some(v) = r.residual_norm {
                s.max_residual = Some(s.max_residual.map_or(v, |m: f64| m.max(v)));
            }
        }
        // Summaries follow the order checks first appear in the rows.
        let mut summary = Vec::new();
        for r in &rows {
            if let Some(s) = by_check.remove(&r.check) {
                summary.push(s);
            }
        }
        let verdict = if !rows.is_empty() && rows.iter().all(|r| r.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ResidualReport {
            schema: SCHEMA.to_string(),
            scenario: scenario.to_string(),
            tolerance,
            rows,
            summary,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn has_singularity(&self) -> bool {
        self.rows.iter().any(|r| r.singular)
    }

    pub fn max_residual(&self, check: Check) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.check == check)
            .and_then(|s| s.max_residual)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }
}

/// Location of a sign change of a check's signed normal value between two
/// consecutive sweep values, by linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub check: Check,
    pub point: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub scenario: String,
    pub sweep: SweepSpec,
    pub values: Vec<f64>,
    pub reports: Vec<ResidualReport>,
    pub crossings: Vec<Crossing>,
    pub verdict: Verdict,
}

impl SweepReport {
    pub fn new(scenario: &str, sweep: SweepSpec, reports: Vec<ResidualReport>) -> SweepReport {
        let values = sweep.values();
        let crossings = [Check::Theorem21, Check::Theorem23]
            .into_iter()
            .flat_map(|c| crossings(c, &values, &reports))
            .collect();
        let verdict = if reports.iter().all(ResidualReport::passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        SweepReport {
            schema: SCHEMA.to_string(),
            scenario: scenario.to_string(),
            sweep,
            values,
            reports,
            crossings,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn has_singularity(&self) -> bool {
        self.reports.iter().any(ResidualReport::has_singularity)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Row> = self
            .reports
            .iter()
            .flat_map(|r| r.rows.iter().cloned())
            .collect();
        rows_to_csv(&rows)
    }
}

/// Tracks the signed value of `check` at the first sample point.
fn crossings(check: Check, values: &[f64], reports: &[ResidualReport]) -> Vec<Crossing> {
    let series: Vec<(f64, Option<f64>, Vec<f64>)> = values
        .iter()
        .zip(reports)
        .filter_map(|(v, r)| {
            let row = r.rows.iter().find(|row| row.check == check)?;
            Some((*v, row.value, row.point.clone()))
        })
        .collect();
    let mut out = Vec::new();
    for w in series.windows(2) {
        let ((v0, Some(s0), x), (v1, Some(s1), _)) = (&w[0], &w[1]) else {
            continue;
        };
        if s0 * s1 < 0.0 || (*s1 == 0.0 && *s0 != 0.0) {
            out.push(Crossing {
                check,
                point: x.clone(),
                lower: *v0,
                upper: *v1,
                estimate: v0 + (v1 - v0) * s0 / (s0 - s1),
            });
        }
    }
    out
}

fn number(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| v.to_string())
}

/// Columns: scenario, check, p, parameters, coordinates, residual_norm, pass.
fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let names: Vec<String> = rows
        .first()
        .map(|r| r.params.keys().cloned().collect())
        .unwrap_or_default();
    let dim = rows.iter().map(|r| r.point.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = vec!["scenario".into(), "check".into(), "p".into()];
    header.extend(names.iter().cloned());
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.extend(["residual_norm".to_string(), "pass".to_string()]);
    let fail = |e: csv::Error| ScenarioError::Output(e.to_string());
    w.write_record(&header).map_err(fail)?;
    for r in rows {
        let mut rec = vec![r.scenario.clone(), r.check.name().to_string(), number(r.p)];
        rec.extend(
            names
                .iter()
                .map(|k| r.params.get(k).map(|v| number(*v)).unwrap_or_default()),
        );
        rec.extend((0..dim).map(|i| r.point.get(i).map(|v| number(*v)).unwrap_or_default()));
        rec.push(r.residual_norm.map(number).unwrap_or_default());
        rec.push(r.pass.to_string());
        w.write_record(&rec).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ScenarioError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ScenarioError::Output(e.to_string()))
}
