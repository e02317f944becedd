//! The `pbh/1` scenario file format and its validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use pbh_core::expr::{parse_with, ParseOptions};
use pbh_core::geometry::{space_form_chart, ChartMetric};
use pbh_core::submanifold::Immersion;
use pbh_core::{Expression, Params, SmoothMap};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScenarioError};

pub const SCHEMA: &str = "pbh/1";
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    pub kind: Kind,
    pub source: ChartSpec,
    pub target: ChartSpec,
    /// Component expressions in the source coordinates `x1..xm`.
    pub components: Vec<String>,
    /// Parameter bindings. `p` is the exponent used by every check.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub sample: SampleSpec,
    pub checks: Vec<Check>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Map,
    Immersion,
}

/// Chart specifications. Metric expressions use `x1..xd` in a source chart
/// and `y1..yd` in a target chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    Euclidean {
        dim: usize,
    },
    SpaceForm {
        dim: usize,
        c: f64,
    },
    Conformal {
        dim: usize,
        factor: String,
    },
    Metric {
        components: Vec<Vec<String>>,
    },
    /// Pull-back of the target metric; immersions only.
    Induced {
        dim: usize,
    },
}

impl ChartSpec {
    pub fn dim(&self) -> usize {
        match self {
            ChartSpec::Euclidean { dim }
            | ChartSpec::SpaceForm { dim, .. }
            | ChartSpec::Conformal { dim, .. }
            | ChartSpec::Induced { dim } => *dim,
            ChartSpec::Metric { components } => components.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// Evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| match k {
                0 => self.from,
                k if k + 1 == self.steps => self.to,
                k => self.from + (self.to - self.from) * k as f64 / n,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    /// Cell-centred grid with this many points per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomSample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSample {
    pub count: usize,
    pub seed: u64,
}

/// Points where `expr < below` are dropped from the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub expr: String,
    pub below: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Check {
    #[serde(rename = "p_harmonic")]
    PHarmonic,
    #[serde(rename = "p_biharmonic")]
    PBiharmonic,
    #[serde(rename = "theorem_2_1")]
    Theorem21,
    #[serde(rename = "theorem_2_3")]
    Theorem23,
    #[serde(rename = "cmc_proper_p")]
    CmcProperP,
    #[serde(rename = "stress_divergence")]
    StressDivergence,
    #[serde(rename = "trace_identity")]
    TraceIdentity,
    #[serde(rename = "energy_quadrature")]
    EnergyQuadrature,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::PHarmonic,
        Check::PBiharmonic,
        Check::Theorem21,
        Check::Theorem23,
        Check::CmcProperP,
        Check::StressDivergence,
        Check::TraceIdentity,
        Check::EnergyQuadrature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::PHarmonic => "p_harmonic",
            Check::PBiharmonic => "p_biharmonic",
            Check::Theorem21 => "theorem_2_1",
            Check::Theorem23 => "theorem_2_3",
            Check::CmcProperP => "cmc_proper_p",
            Check::StressDivergence => "stress_divergence",
            Check::TraceIdentity => "trace_identity",
            Check::EnergyQuadrature => "energy_quadrature",
        }
    }

    /// Checks evaluated once over the whole sample rather than per point.
    pub fn is_global(self) -> bool {
        matches!(self, Check::CmcProperP | Check::EnergyQuadrature)
    }

    pub fn needs_immersion(self) -> bool {
        matches!(
            self,
            Check::Theorem21 | Check::Theorem23 | Check::CmcProperP
        )
    }

    pub fn needs_hypersurface(self) -> bool {
        matches!(self, Check::Theorem23 | Check::CmcProperP)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." {
                "scenario".to_string()
            } else {
                path
            };
            ScenarioError::schema(field, e.into_inner())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Names every expression may refer to: bound parameters and the swept one.
    pub fn param_names(&self) -> Vec<String> {
        let mut names: BTreeSet<String> = self.params.keys().cloned().collect();
        if let Some(s) = &self.sweep {
            names.insert(s.param.clone());
        }
        names.into_iter().collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(ScenarioError::schema(
                "schema",
                format!("expected \"{SCHEMA}\", found \"{}\"", self.schema),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(ScenarioError::schema("name", "must not be empty"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ScenarioError::schema(
                "tolerance",
                "must be a positive number",
            ));
        }
        for (k, v) in &self.params {
            if !v.is_finite() {
                return Err(ScenarioError::schema(
                    format!("params.{k}"),
                    "must be finite",
                ));
            }
        }
        let m = self.source.dim();
        let n = self.target.dim();
        if m == 0 || m > pbh_core::jet::MAX_VARS {
            return Err(ScenarioError::schema(
                "source",
                format!("dimension must lie in 1..={}", pbh_core::jet::MAX_VARS),
            ));
        }
        if n == 0 {
            return Err(ScenarioError::schema(
                "target",
                "dimension must be positive",
            ));
        }
        match (self.kind, &self.source, &self.target) {
            (Kind::Map, ChartSpec::Induced { .. }, _) => {
                return Err(ScenarioError::schema(
                    "source",
                    "an induced chart needs kind \"immersion\"",
                ))
            }
            (_, _, ChartSpec::Induced { .. }) => {
                return Err(ScenarioError::schema(
                    "target",
                    "a target chart cannot be induced",
                ))
            }
            (Kind::Immersion, _, ChartSpec::Conformal { .. } | ChartSpec::Metric { .. }) => {
                return Err(ScenarioError::schema(
                    "target",
                    "an immersion needs a euclidean or space_form target",
                ))
            }
            (Kind::Immersion, _, _) if n <= m => {
                return Err(ScenarioError::schema(
                    "target",
                    format!("an immersion of dimension {m} needs a larger target, found {n}"),
                ))
            }
            _ => {}
        }
        if self.components.len() != n {
            return Err(ScenarioError::schema(
                "components",
                format!(
                    "expected {n} expressions (target dimension), found {}",
                    self.components.len()
                ),
            ));
        }
        if let Some(s) = &self.sweep {
            if s.param.is_empty() {
                return Err(ScenarioError::schema("sweep.param", "must not be empty"));
            }
            if !(s.from.is_finite() && s.to.is_finite()) {
                return Err(ScenarioError::schema("sweep", "range must be finite"));
            }
            if s.steps == 0 {
                return Err(ScenarioError::schema("sweep.steps", "must be positive"));
            }
        }
        self.validate_sample(m)?;
        self.validate_checks(m, n)?;
        self.prepare()?;
        Ok(())
    }

    fn validate_sample(&self, m: usize) -> Result<()> {
        let s = &self.sample;
        if s.bounds.len() != m {
            return Err(ScenarioError::schema(
                "sample.box",
                format!(
                    "expected {m} intervals (source dimension), found {}",
                    s.bounds.len()
                ),
            ));
        }
        for (i, [lo, hi]) in s.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ScenarioError::schema(
                    format!("sample.box[{i}]"),
                    format!("needs finite lo < hi, found [{lo}, {hi}]"),
                ));
            }
        }
        match (s.points_per_axis, &s.random) {
            (Some(0), _) => Err(ScenarioError::schema(
                "sample.points_per_axis",
                "must be positive",
            )),
            (_, Some(r)) if r.count == 0 => Err(ScenarioError::schema(
                "sample.random.count",
                "must be positive",
            )),
            (Some(_), None) | (None, Some(_)) => Ok(()),
            _ => Err(ScenarioError::schema(
                "sample",
                "exactly one of points_per_axis or random is required",
            )),
        }
    }

    fn validate_checks(&self, m: usize, n: usize) -> Result<()> {
        if self.checks.is_empty() {
            return Err(ScenarioError::schema(
                "checks",
                "at least one check is required",
            ));
        }
        let mut seen = BTreeSet::new();
        for (i, c) in self.checks.iter().enumerate() {
            let field = format!("checks[{i}]");
            if !seen.insert(*c) {
                return Err(ScenarioError::schema(
                    field,
                    format!("duplicate check `{c}`"),
                ));
            }
            if c.needs_immersion() && self.kind != Kind::Immersion {
                return Err(ScenarioError::schema(
                    field,
                    format!("`{c}` needs kind \"immersion\""),
                ));
            }
            if c.needs_hypersurface() && n != m + 1 {
                return Err(ScenarioError::schema(
                    field,
                    format!("`{c}` needs a hypersurface"),
                ));
            }
        }
        if !self.params.contains_key("p")
            && self.sweep.as_ref().map(|s| s.param.as_str()) != Some("p")
        {
            return Err(ScenarioError::schema(
                "params.p",
                "the exponent p must be bound or swept",
            ));
        }
        Ok(())
    }

    /// Parses every expression once. Charts and components keep their
    /// parameters symbolic until [`Prepared::instantiate`].
    pub fn prepare(&self) -> Result<Prepared> {
        let names = self.param_names();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let m = self.source.dim();
        let source = chart(&self.source, "source", 'x', &names)?;
        let target = chart(&self.target, "target", 'y', &names)?
            .ok_or_else(|| ScenarioError::schema("target", "a target chart cannot be induced"))?;
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, t)| expression(t, m, 'x', &names, &format!("components[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let exclusions = self
            .sample
            .exclude
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let field = format!("sample.exclude[{i}]");
                if !e.below.is_finite() {
                    return Err(ScenarioError::schema(
                        format!("{field}.below"),
                        "must be finite",
                    ));
                }
                Ok((
                    expression(&e.expr, m, 'x', &names, &format!("{field}.expr"))?,
                    e.below,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let curvature = match self.target {
            ChartSpec::SpaceForm { c, .. } => c,
            _ => 0.0,
        };
        Ok(Prepared {
            kind: self.kind,
            m,
            source,
            target,
            curvature,
            components,
            exclusions,
        })
    }
}

fn expression(
    text: &str,
    dim: usize,
    prefix: char,
    params: &[&str],
    field: &str,
) -> Result<Expression> {
    parse_with(
        text,
        &ParseOptions {
            dim,
            coord_prefix: prefix,
            params,
        },
    )
    .map_err(|e| ScenarioError::schema(field, e))
}

fn chart(
    spec: &ChartSpec,
    field: &str,
    prefix: char,
    params: &[&str],
) -> Result<Option<ChartMetric>> {
    Ok(Some(match spec {
        ChartSpec::Euclidean { dim } => ChartMetric::euclidean(*dim),
        ChartSpec::SpaceForm { dim, c } => {
            if !c.is_finite() {
                return Err(ScenarioError::schema(
                    format!("{field}.c"),
                    "must be finite",
                ));
            }
            space_form_chart(*c, *dim)
        }
        ChartSpec::Conformal { dim, factor } => ChartMetric::conformal(
            *dim,
            expression(factor, *dim, prefix, params, &format!("{field}.factor"))?,
        ),
        ChartSpec::Metric { components } => {
            let d = components.len();
            let mut rows = Vec::with_capacity(d);
            for (i, row) in components.iter().enumerate() {
                if row.len() != d {
                    return Err(ScenarioError::schema(
                        format!("{field}.components[{i}]"),
                        format!("expected {d} entries, found {}", row.len()),
                    ));
                }
                rows.push(
                    row.iter()
                        .enumerate()
                        .map(|(j, t)| {
                            expression(
                                t,
                                d,
                                prefix,
                                params,
                                &format!("{field}.components[{i}][{j}]"),
                            )
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            ChartMetric::new(rows)
                .map_err(|e| ScenarioError::schema(format!("{field}.components"), e))?
        }
        ChartSpec::Induced { .. } => return Ok(None),
    }))
}

/// A parsed scenario, ready to be bound to parameter values.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub kind: Kind,
    pub m: usize,
    source: Option<ChartMetric>,
    target: ChartMetric,
    curvature: f64,
    components: Vec<Expression>,
    pub exclusions: Vec<(Expression, f64)>,
}

/// A scenario bound to concrete parameter values.
#[derive(Debug, Clone)]
pub enum Subject {
    Map(SmoothMap),
    Immersion(Immersion),
}

impl Subject {
    pub fn map(&self) -> &SmoothMap {
        match self {
            Subject::Map(f) => f,
            Subject::Immersion(i) => i.map(),
        }
    }

    pub fn immersion(&self) -> Option<&Immersion> {
        match self {
            Subject::Map(_) => None,
            Subject::Immersion(i) => Some(i),
        }
    }
}

impl Prepared {
    pub fn instantiate(&self, params: &Params) -> Result<Subject> {
        let bound = |e: pbh_core::Error| match e {
            pbh_core::Error::UnboundParameter(name) => {
                ScenarioError::schema(format!("params.{name}"), "referenced but not bound")
            }
            e => ScenarioError::schema("components", e),
        };
        match self.kind {
            Kind::Map => {
                let source = self
                    .source
                    .clone()
                    .expect("map scenarios have an explicit source");
                SmoothMap::new(source, self.target.clone(), self.components.clone(), params)
                    .map(Subject::Map)
                    .map_err(bound)
            }
            Kind::Immersion => {
                let comps = self.components.clone();
                let imm = match &self.source {
                    None => Immersion::new(comps, self.m, self.curvature, params),
                    Some(s) => Immersion::with_source(comps, s.clone(), self.curvature, params),
                };
                imm.map(Subject::Immersion).map_err(bound)
            }
        }
    }
}
