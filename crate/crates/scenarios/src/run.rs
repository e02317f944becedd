//! Executes scenario checks over sample points and parameter values.

use std::collections::BTreeMap;

use pbh_core::mapcalc::{self, ExpressionField};
use pbh_core::submanifold::{self, Immersion};
use pbh_core::{stress, Expression, Params, SmoothMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, ScenarioError};
use crate::report::{ResidualReport, Row, SweepReport};
use crate::schema::{Check, Prepared, SampleSpec, Scenario, Subject};

/// Relative tolerance of the energy first-variation check, which rests on
/// finite differences of quadratures.
pub const ENERGY_TOLERANCE: f64 = 1e-4;
/// Gauss–Legendre nodes per axis for box quadratures.
pub const QUADRATURE_ORDER: usize = 8;
/// Below this `|H|` a hypersurface has no unit normal along `H`.
const MIN_MEAN_CURVATURE: f64 = 1e-12;

/// Command-line style adjustments applied on top of a scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub p: Option<f64>,
    pub set: Vec<(String, f64)>,
    pub tolerance: Option<f64>,
    /// Abort on the first singularity instead of recording it.
    pub strict: bool,
}

impl Overrides {
    pub fn apply(&self, scenario: &Scenario) -> Result<Scenario> {
        let mut s = scenario.clone();
        let known = scenario.param_names();
        for (name, value) in &self.set {
            if !known.iter().any(|k| k == name) {
                return Err(ScenarioError::schema(
                    format!("--set {name}"),
                    format!(
                        "not a parameter of `{}` (known: {})",
                        scenario.name,
                        known.join(", ")
                    ),
                ));
            }
            if !value.is_finite() {
                return Err(ScenarioError::schema(
                    format!("--set {name}"),
                    "must be finite",
                ));
            }
            s.params.insert(name.clone(), *value);
        }
        if let Some(p) = self.p {
            if !p.is_finite() {
                return Err(ScenarioError::schema("--p", "must be finite"));
            }
            s.params.insert("p".into(), p);
        }
        if let Some(t) = self.tolerance {
            s.tolerance = t;
        }
        s.validate()?;
        Ok(s)
    }
}

/// Parses `name=value`.
pub fn parse_assignment(text: &str) -> Result<(String, f64)> {
    let (name, value) = text.split_once('=').ok_or_else(|| {
        ScenarioError::schema("--set", format!("expected name=value, found `{text}`"))
    })?;
    let value: f64 = value.trim().parse().map_err(|_| {
        ScenarioError::schema(
            format!("--set {name}"),
            format!("`{value}` is not a number"),
        )
    })?;
    Ok((name.trim().to_string(), value))
}

/// Sample points of the box, before exclusions.
pub fn box_points(sample: &SampleSpec) -> Vec<Vec<f64>> {
    let bounds = &sample.bounds;
    if let Some(r) = &sample.random {
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        return (0..r.count)
            .map(|_| {
                bounds
                    .iter()
                    .map(|[lo, hi]| rng.gen_range(*lo..*hi))
                    .collect()
            })
            .collect();
    }
    let k = sample.points_per_axis.unwrap_or(1);
    let mut points = vec![vec![]];
    for [lo, hi] in bounds {
        let h = (hi - lo) / k as f64;
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |i| {
                    let mut q = p.clone();
                    q.push(lo + (i as f64 + 0.5) * h);
                    q
                })
            })
            .collect();
    }
    points
}

/// Sample points with the declared exclusions removed.
pub fn sample_points(
    scenario: &Scenario,
    prepared: &Prepared,
    params: &Params,
) -> Result<Vec<Vec<f64>>> {
    let points: Vec<Vec<f64>> = box_points(&scenario.sample)
        .into_iter()
        .filter(|x| {
            prepared
                .exclusions
                .iter()
                .all(|(e, below)| match e.eval_f64(x, params) {
                    Ok(v) => v >= *below,
                    Err(_) => false,
                })
        })
        .collect();
    if points.is_empty() {
        return Err(ScenarioError::schema(
            "sample",
            "every sample point lies in an excluded region",
        ));
    }
    Ok(points)
}

fn params_of(scenario: &Scenario) -> Params {
    let mut p = Params::new();
    for (k, v) in &scenario.params {
        p.set(k, *v);
    }
    p
}

/// Runs every check of the scenario at every sample point.
pub fn run(scenario: &Scenario, overrides: &Overrides) -> Result<ResidualReport> {
    let s = overrides.apply(scenario)?;
    let prepared = s.prepare()?;
    let rows = evaluate(&s, &prepared, overrides.strict)?;
    Ok(ResidualReport::new(&s.name, s.tolerance, rows))
}

/// Runs the scenario once per value of `param` over `steps` evenly spaced
/// values in `[from, to]`.
pub fn sweep(
    scenario: &Scenario,
    overrides: &Overrides,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepReport> {
    let mut base = overrides.apply(scenario)?;
    let spec = crate::schema::SweepSpec {
        param: param.to_string(),
        from,
        to,
        steps,
    };
    if steps == 0 || !(from.is_finite() && to.is_finite()) {
        return Err(ScenarioError::schema(
            "sweep",
            "needs finite bounds and at least one step",
        ));
    }
    if param != "p" && !base.param_names().iter().any(|k| k == param) {
        return Err(ScenarioError::schema(
            "sweep.param",
            format!("`{param}` is not a parameter of `{}`", base.name),
        ));
    }
    base.sweep = Some(spec.clone());
    let prepared = base.prepare()?;
    let mut reports = Vec::with_capacity(steps);
    for v in spec.values() {
        let mut s = base.clone();
        s.params.insert(param.to_string(), v);
        let rows = evaluate(&s, &prepared, overrides.strict)?;
        reports.push(ResidualReport::new(&s.name, s.tolerance, rows));
    }
    Ok(SweepReport::new(&base.name, spec, reports))
}

fn evaluate(s: &Scenario, prepared: &Prepared, strict: bool) -> Result<Vec<Row>> {
    let params = params_of(s);
    let p = *s
        .params
        .get("p")
        .ok_or_else(|| ScenarioError::schema("params.p", "the exponent p must be bound"))?;
    let subject = prepared.instantiate(&params)?;
    let points = sample_points(s, prepared, &params)?;
    let listed: BTreeMap<String, f64> = s
        .params
        .iter()
        .filter(|(k, _)| k.as_str() != "p")
        .map(|(k, v)| (k.clone(), *v))
        .collect();

    let local: Vec<Check> = s
        .checks
        .iter()
        .copied()
        .filter(|c| !c.is_global())
        .collect();
    let global: Vec<Check> = s.checks.iter().copied().filter(|c| c.is_global()).collect();
    let items: Vec<(usize, Check)> = (0..points.len())
        .flat_map(|i| local.iter().map(move |c| (i, *c)))
        .collect();

    let outcomes: Vec<(Option<Vec<f64>>, Check, Outcome)> = items
        .par_iter()
        .map(|&(i, c)| {
            (
                Some(points[i].clone()),
                c,
                point_check(&subject, c, &points[i], p),
            )
        })
        .chain(global.par_iter().map(|&c| {
            let o = global_check(&subject, c, &points, s, p);
            (None, c, o)
        }))
        .collect();

    let mut rows = Vec::with_capacity(outcomes.len());
    for (point, check, outcome) in outcomes {
        let row = Row::from_outcome(&s.name, check, p, &listed, point, outcome, s.tolerance);
        if strict && row.singular {
            return Err(ScenarioError::Singularity {
                check: check.name().into(),
                point: row.point.clone(),
                message: row.error.clone().unwrap_or_default(),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Result of one check at one point (or over the sample).
#[derive(Debug, Clone)]
pub enum Outcome {
    Value {
        residual: f64,
        /// A signed or auxiliary scalar: `p*`, the normal part along `H/|H|`,
        /// `|τ_p|`, or the size of both sides of an identity.
        value: Option<f64>,
        /// Overrides the tolerance comparison.
        tolerance: Option<f64>,
        /// Fails the check regardless of the residual.
        failure: Option<String>,
    },
    Failed {
        message: String,
        singular: bool,
    },
}

impl Outcome {
    fn residual(residual: f64, value: Option<f64>) -> Outcome {
        Outcome::Value {
            residual,
            value,
            tolerance: None,
            failure: None,
        }
    }
}

impl From<pbh_core::Error> for Outcome {
    fn from(e: pbh_core::Error) -> Outcome {
        Outcome::Failed {
            singular: e.is_singularity(),
            message: e.to_string(),
        }
    }
}

fn norm_with(g: &[Vec<f64>], v: &[f64]) -> f64 {
    pbh_core::linalg::inner(g, v, v).max(0.0).sqrt()
}

/// Target-metric norm of a vector at `φ(x)`.
fn target_norm(map: &SmoothMap, x: &[f64], v: &[f64]) -> pbh_core::Result<f64> {
    let y = map.eval_point(x)?;
    Ok(norm_with(&map.target().metric_at(&y)?, v))
}

fn source_norm(map: &SmoothMap, x: &[f64], v: &[f64]) -> pbh_core::Result<f64> {
    Ok(norm_with(&map.source().metric_at(x)?, v))
}

fn point_check(subject: &Subject, check: Check, x: &[f64], p: f64) -> Outcome {
    let r = || -> pbh_core::Result<Outcome> {
        let map = subject.map();
        Ok(match check {
            Check::PHarmonic => {
                let t = mapcalc::p_tension(map, x, p)?;
                Outcome::residual(target_norm(map, x, &t)?, None)
            }
            Check::PBiharmonic => {
                let parts = mapcalc::p_bitension_parts(map, x, p)?;
                let tp = mapcalc::p_tension(map, x, p)?;
                Outcome::residual(
                    target_norm(map, x, &parts.total)?,
                    Some(target_norm(map, x, &tp)?),
                )
            }
            Check::Theorem21 => {
                let imm = subject.immersion().expect("validated");
                let r = submanifold::theorem21_residuals(imm, x, p)?;
                let residual =
                    target_norm(map, x, &r.normal)?.max(source_norm(map, x, &r.tangent)?);
                Outcome::residual(residual, signed_normal(imm, x, &r.normal)?)
            }
            Check::Theorem23 => {
                let imm = subject.immersion().expect("validated");
                let r = submanifold::theorem23_residuals(imm, x, p)?;
                let residual = r.normal.abs().max(source_norm(map, x, &r.tangent)?);
                Outcome::residual(residual, Some(r.normal))
            }
            Check::StressDivergence => {
                let c = stress::stress_divergence_check(map, x, p)?;
                Outcome::residual(c.gap / c.scale.max(1.0), Some(c.scale))
            }
            Check::TraceIdentity => {
                let t = stress::stress_trace_forms(map, x, p)?;
                let gap = (t.direct - t.pairing_form)
                    .abs()
                    .max((t.direct - t.theta_form).abs());
                Outcome::residual(gap / t.direct.abs().max(1.0), Some(t.direct))
            }
            Check::CmcProperP | Check::EnergyQuadrature => unreachable!("global checks"),
        })
    };
    r().unwrap_or_else(Outcome::from)
}

/// `h(V, H/|H|)`, or `None` where `H` vanishes.
fn signed_normal(imm: &Immersion, x: &[f64], v: &[f64]) -> pbh_core::Result<Option<f64>> {
    let h = submanifold::mean_curvature(imm, x)?;
    let norm = submanifold::mean_curvature_norm(imm, x)?;
    if norm <= MIN_MEAN_CURVATURE {
        return Ok(None);
    }
    let y = imm.map().eval_point(x)?;
    let g = imm.map().target().metric_at(&y)?;
    Ok(Some(pbh_core::linalg::inner(&g, v, &h) / norm))
}

fn global_check(
    subject: &Subject,
    check: Check,
    points: &[Vec<f64>],
    s: &Scenario,
    p: f64,
) -> Outcome {
    match check {
        Check::CmcProperP => {
            let imm = subject.immersion().expect("validated");
            match submanifold::cmc_proper_p_on(imm, points) {
                Ok(star) if star.admissible => Outcome::residual((p - star.p).abs(), Some(star.p)),
                Ok(star) => Outcome::Value {
                    residual: (p - star.p).abs(),
                    value: Some(star.p),
                    tolerance: None,
                    failure: Some(format!("no admissible p >= 2 (p* = {})", star.p)),
                },
                Err(e) => e.into(),
            }
        }
        Check::EnergyQuadrature => energy_check(subject.map(), s, p).unwrap_or_else(Outcome::from),
        _ => unreachable!("pointwise checks"),
    }
}

/// A central difference of `E_p` along a variation `v` next to `−∫ h(τ_p, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstVariation {
    pub derivative: f64,
    pub pairing: f64,
    /// `|dE/dt + ∫ h(τ_p, v)| / |∫ h(τ_p, v)|`
    pub relative: f64,
}

/// `Π_i ((x_i − lo_i)(hi_i − x_i)/h_i²)²` with `h_i` the half-width, which
/// peaks at 1 and vanishes to first order on the boundary of the box.
pub fn bump(bounds: &[(f64, f64)]) -> Expression {
    bounds
        .iter()
        .enumerate()
        .fold(Expression::constant(1.0), |acc, (i, (lo, hi))| {
            let half = 0.5 * (hi - lo);
            let x = Expression::coord(i);
            let f = x
                .sub(&Expression::constant(*lo))
                .mul(&Expression::constant(*hi).sub(&x))
                .scale(1.0 / (half * half));
            acc.mul(&f.powf(2.0))
        })
}

/// First variation of `E_p` over the box along `bump · weights`.
pub fn first_variation(
    map: &SmoothMap,
    bounds: &[(f64, f64)],
    p: f64,
    weights: &[f64],
    order: usize,
) -> pbh_core::Result<FirstVariation> {
    if weights.len() != map.target_dim() {
        return Err(pbh_core::Error::Dimension(format!(
            "{} weights for a {}-dimensional target",
            weights.len(),
            map.target_dim()
        )));
    }
    let b = bump(bounds);
    let v: Vec<Expression> = weights.iter().map(|w| b.scale(*w)).collect();
    let t = 1e-3;
    let energy = |s: f64| {
        let comps = map
            .components()
            .iter()
            .zip(&v)
            .map(|(c, w)| c.add(&w.scale(s)))
            .collect();
        mapcalc::p_energy_box(&map.with_components(comps)?, bounds, p, order)
    };
    let derivative = (energy(t)? - energy(-t)?) / (2.0 * t);
    let pairing = mapcalc::p_tension_pairing_box(map, &ExpressionField(v), bounds, p, order)?;
    Ok(FirstVariation {
        derivative,
        pairing,
        relative: (derivative + pairing).abs() / pairing.abs().max(f64::MIN_POSITIVE),
    })
}

fn energy_check(map: &SmoothMap, s: &Scenario, p: f64) -> pbh_core::Result<Outcome> {
    let bounds: Vec<(f64, f64)> = s.sample.bounds.iter().map(|[a, b]| (*a, *b)).collect();
    let weights: Vec<f64> = (0..map.target_dim())
        .map(|a| if a % 2 == 0 { 1.0 } else { -0.5 } / (a + 1) as f64)
        .collect();
    let fv = first_variation(map, &bounds, p, &weights, QUADRATURE_ORDER)?;
    Ok(Outcome::Value {
        residual: fv.relative,
        value: Some(mapcalc::p_energy_box(map, &bounds, p, QUADRATURE_ORDER)?),
        tolerance: Some(ENERGY_TOLERANCE),
        failure: None,
    })
}
