//! Calculus of maps `φ: (M, g) → (N, h)` between charts.
//!
//! Everything is evaluated from jets of the components `φ^α` around a source
//! point. The target metric and its Christoffel symbols are evaluated at the
//! jet-valued image point, which pulls them back to source jets. Formulas
//! carry explicit Christoffel terms of both charts, so no normal coordinates
//! are assumed.
//!
//! Jet budget: with components expanded to order `K`, the differential is
//! order `K-1`, `∇dφ`, `τ` and `τ_p` are order `K-2`, `∇^φ τ_p` is order
//! `K-3` and `τ_{2,p}` needs `K = 4`.

use crate::error::{Error, Result};
use crate::expr::{Expression, Params};
use crate::geometry::{self, ChartMetric, Christoffel, LocalGeometry};
use crate::jet::{Jet, Scalar};
use crate::linalg::{self, Matrix};
use crate::quadrature;

/// Below this value of `|dφ|²` the differential is treated as vanishing.
const DEGENERATE_ENERGY: f64 = 1e-24;

#[derive(Debug, Clone)]
pub struct SmoothMap {
    source: ChartMetric,
    target: ChartMetric,
    components: Vec<Expression>,
    params: Params,
}

impl SmoothMap {
    /// Binds `params` into the charts and components; every referenced
    /// parameter must be bound.
    pub fn new(
        source: ChartMetric,
        target: ChartMetric,
        components: Vec<Expression>,
        params: &Params,
    ) -> Result<SmoothMap> {
        if components.len() != target.dim() {
            return Err(Error::Dimension(format!(
                "{} components for a {}-dimensional target",
                components.len(),
                target.dim()
            )));
        }
        if let Some(k) = components.iter().filter_map(Expression::max_coord).max() {
            if k >= source.dim() {
                return Err(Error::Dimension(format!(
                    "component references x{} but the source has dimension {}",
                    k + 1,
                    source.dim()
                )));
            }
        }
        let source = source.bind(params);
        let target = target.bind(params);
        let components: Vec<Expression> = components.iter().map(|e| e.bind(params)).collect();
        let unbound = components
            .iter()
            .flat_map(Expression::param_names)
            .chain(source.param_names())
            .chain(target.param_names())
            .next();
        if let Some(name) = unbound {
            return Err(Error::UnboundParameter(name));
        }
        Ok(SmoothMap {
            source,
            target,
            components,
            params: params.clone(),
        })
    }

    pub fn source(&self) -> &ChartMetric {
        &self.source
    }

    pub fn target(&self) -> &ChartMetric {
        &self.target
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn source_dim(&self) -> usize {
        self.source.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.target.dim()
    }

    /// The same map with replaced components (used to build variations).
    pub fn with_components(&self, components: Vec<Expression>) -> Result<SmoothMap> {
        SmoothMap::new(
            self.source.clone(),
            self.target.clone(),
            components,
            &self.params,
        )
    }

    pub fn eval_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let none = Params::new();
        self.components
            .iter()
            .map(|e| e.eval(x, &none).map_err(|err| err.at(x)))
            .collect()
    }

    /// Jets of everything needed at `x`, with components expanded to `order`.
    pub fn local(&self, x: &[f64], order: usize) -> Result<MapJets<'_>> {
        MapJets::new(self, x, order)
    }
}

/// Pull-back metric `φ*h` as an expression-valued chart on the source.
pub fn induced_metric(
    target: &ChartMetric,
    components: &[Expression],
    dim: usize,
) -> Result<ChartMetric> {
    if components.len() != target.dim() {
        return Err(Error::Dimension(
            "component count must match the target dimension".into(),
        ));
    }
    let n = target.dim();
    let h: Matrix<Expression> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| target.component(a, b).substitute(components))
                .collect()
        })
        .collect();
    let dphi: Vec<Vec<Expression>> = (0..dim)
        .map(|i| components.iter().map(|c| c.differentiate(i)).collect())
        .collect();
    let g = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    Expression::sum((0..n).flat_map(|a| {
                        let (h, dphi) = (&h, &dphi);
                        (0..n).map(move |b| h[a][b].mul(&dphi[i][a]).mul(&dphi[j][b]))
                    }))
                })
                .collect()
        })
        .collect();
    ChartMetric::new(g)
}

/// Pointwise jets of a map and of both geometries.
#[derive(Debug, Clone)]
pub struct MapJets<'a> {
    pub map: &'a SmoothMap,
    pub source: LocalGeometry,
    /// `phi[α] = φ^α`
    pub phi: Vec<Jet>,
    /// `dphi[i][α] = ∂_i φ^α`
    pub dphi: Vec<Vec<Jet>>,
    /// `h[α][β] = h_αβ ∘ φ`
    pub h: Matrix<Jet>,
    /// `gamma_n[α][μ][σ] = Γ^α_μσ ∘ φ`
    pub gamma_n: Christoffel<Jet>,
    energy2: Jet,
}

impl<'a> MapJets<'a> {
    pub fn new(map: &'a SmoothMap, x: &[f64], order: usize) -> Result<MapJets<'a>> {
        if order == 0 {
            return Err(Error::JetOrder { needed: 1, max: 0 });
        }
        if x.len() != map.source_dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, source has {}",
                x.len(),
                map.source_dim()
            )));
        }
        let source = map.source.local(x, order)?;
        let none = Params::new();
        let phi: Vec<Jet> = map
            .components
            .iter()
            .map(|e| e.eval(&source.coords, &none))
            .collect::<Result<_>>()
            .map_err(|e| e.at(x))?;
        let dphi: Vec<Vec<Jet>> = (0..map.source_dim())
            .map(|i| phi.iter().map(|p| p.deriv(i)).collect())
            .collect();
        let (h, _, gamma_n) = map.target.connection_at(&phi).map_err(|e| e.at(x))?;
        let mut energy2 = dphi[0][0].zero_like();
        for i in 0..map.source_dim() {
            for j in 0..map.source_dim() {
                energy2 = energy2 + &source.g_inv[i][j] * &linalg::inner(&h, &dphi[i], &dphi[j]);
            }
        }
        Ok(MapJets {
            map,
            source,
            phi,
            dphi,
            h,
            gamma_n,
            energy2,
        })
    }

    pub fn point(&self) -> &[f64] {
        &self.source.point
    }

    pub fn order(&self) -> usize {
        self.source.order
    }

    pub fn m(&self) -> usize {
        self.dphi.len()
    }

    pub fn n(&self) -> usize {
        self.phi.len()
    }

    fn require(&self, order: usize) -> Result<()> {
        if self.order() < order {
            Err(Error::JetOrder {
                needed: order,
                max: self.order(),
            })
        } else {
            Ok(())
        }
    }

    /// `|dφ|² = g^{ij} h_αβ ∂_i φ^α ∂_j φ^β`.
    pub fn energy_density2(&self) -> &Jet {
        &self.energy2
    }

    /// `|dφ|^e`, refusing to evaluate at points where `dφ` vanishes.
    pub fn dphi_norm_pow(&self, e: f64) -> Result<Jet> {
        if e == 0.0 {
            return Ok(self.energy2.constant_like(1.0));
        }
        if self.energy2.value() <= DEGENERATE_ENERGY {
            return Err(Error::Singularity {
                what: format!("|dφ| = 0 in |dφ|^{e}"),
                point: self.point().to_vec(),
            });
        }
        Ok(self.energy2.powf(0.5 * e))
    }

    pub fn h_inner(&self, u: &[Jet], v: &[Jet]) -> Jet {
        linalg::inner(&self.h, u, v)
    }

    /// `dφ(X)` for a source vector `X`.
    pub fn push_forward(&self, x: &[Jet]) -> Vec<Jet> {
        (0..self.n())
            .map(|a| {
                x.iter()
                    .zip(&self.dphi)
                    .fold(x[0].zero_like(), |acc, (xi, di)| acc + xi * &di[a])
            })
            .collect()
    }

    /// `(∇dφ)(∂_i, ∂_j)` as target vectors, indexed `[i][j]`.
    pub fn hessian(&self) -> Vec<Vec<Vec<Jet>>> {
        let (m, n) = (self.m(), self.n());
        let gm = &self.source.gamma;
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..n)
                            .map(|a| {
                                let mut v = self.dphi[j][a].deriv(i);
                                for k in 0..m {
                                    v = v - &gm[k][i][j] * &self.dphi[k][a];
                                }
                                for mu in 0..n {
                                    for s in 0..n {
                                        v = v + &self.gamma_n[a][mu][s]
                                            * &self.dphi[i][mu]
                                            * &self.dphi[j][s];
                                    }
                                }
                                v
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Contracts a source-symmetric family of target vectors with `g^{ij}`.
    pub fn trace_g(&self, family: &[Vec<Vec<Jet>>]) -> Vec<Jet> {
        let m = self.m();
        (0..self.n())
            .map(|a| {
                let mut acc = family[0][0][a].zero_like();
                for i in 0..m {
                    for j in 0..m {
                        acc = acc + &self.source.g_inv[i][j] * &family[i][j][a];
                    }
                }
                acc
            })
            .collect()
    }

    /// `τ(φ) = trace_g ∇dφ`.
    pub fn tension(&self) -> Result<Vec<Jet>> {
        self.require(2)?;
        Ok(self.trace_g(&self.hessian()))
    }

    /// `τ_p(φ) = |dφ|^{p-2} τ(φ) + (p-2)|dφ|^{p-3} dφ(grad |dφ|)`.
    pub fn p_tension(&self, p: f64) -> Result<Vec<Jet>> {
        let tau = self.tension()?;
        if p == 2.0 {
            return Ok(tau);
        }
        let norm = self.dphi_norm_pow(1.0)?;
        let scale = self.dphi_norm_pow(p - 2.0)?;
        let grad = self.source.gradient(&norm);
        let push = self.push_forward(&grad);
        let coeff = self.dphi_norm_pow(p - 3.0)? * (p - 2.0);
        Ok(tau
            .iter()
            .zip(&push)
            .map(|(t, d)| &scale * t + &coeff * d)
            .collect())
    }

    /// `τ_p(φ) = div(|dφ|^{p-2} dφ)`, computed as the trace of the
    /// pull-back derivative of the one-form `|dφ|^{p-2} dφ`.
    pub fn p_tension_divergence_form(&self, p: f64) -> Result<Vec<Jet>> {
        self.require(2)?;
        let scale = self.dphi_norm_pow(p - 2.0)?;
        let form: Vec<Vec<Jet>> = self
            .dphi
            .iter()
            .map(|d| d.iter().map(|v| &scale * v).collect())
            .collect();
        Ok(self.trace_pullback(&form))
    }

    /// `(∇^φ_{∂_i} V)^α = ∂_i V^α + Γ^α_μσ ∂_i φ^μ V^σ`.
    pub fn pullback_derivative(&self, v: &[Jet], i: usize) -> Vec<Jet> {
        let n = self.n();
        (0..n)
            .map(|a| {
                let mut out = v[a].deriv(i);
                for mu in 0..n {
                    for s in 0..n {
                        out = out + &self.gamma_n[a][mu][s] * &self.dphi[i][mu] * &v[s];
                    }
                }
                out
            })
            .collect()
    }

    /// `trace_g ∇ω = g^{ij}(∇^φ_{∂_i}(ω(∂_j)) − ω(∇_{∂_i}∂_j))` for a
    /// one-form `ω` with values along the map, given as `form[j] = ω(∂_j)`.
    pub fn trace_pullback(&self, form: &[Vec<Jet>]) -> Vec<Jet> {
        let m = self.m();
        let gm = &self.source.gamma;
        let derivs: Vec<Vec<Vec<Jet>>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut v = self.pullback_derivative(&form[j], i);
                        for (a, va) in v.iter_mut().enumerate() {
                            for k in 0..m {
                                *va = &*va - &gm[k][i][j] * &form[k][a];
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        self.trace_g(&derivs)
    }

    /// `⟨ω, dφ⟩ = g^{ij} h(ω(∂_i), dφ(∂_j))`.
    pub fn pairing_with_dphi(&self, form: &[Vec<Jet>]) -> Jet {
        let m = self.m();
        let mut acc = form[0][0].zero_like();
        for i in 0..m {
            for j in 0..m {
                acc = acc + &self.source.g_inv[i][j] * &self.h_inner(&form[i], &self.dphi[j]);
            }
        }
        acc
    }

    /// `∇^φ τ_p` as the one-form `[i] ↦ ∇^φ_{∂_i} τ_p`.
    pub fn nabla_p_tension(&self, p: f64) -> Result<(Vec<Jet>, Vec<Vec<Jet>>)> {
        self.require(3)?;
        let tau_p = self.p_tension(p)?;
        let nabla = (0..self.m())
            .map(|i| self.pullback_derivative(&tau_p, i))
            .collect();
        Ok((tau_p, nabla))
    }

    /// The three terms of `τ_{2,p}` at the base point.
    pub fn p_bitension(&self, p: f64) -> Result<BitensionParts> {
        self.require(4)?;
        let (tau_p, nabla) = self.nabla_p_tension(p)?;
        let m = self.m();
        let n = self.n();

        // trace_g R^N(τ_p, dφ)dφ
        let image: Vec<f64> = self.phi.iter().map(Jet::value).collect();
        let curv =
            geometry::curvature_tensor(&self.map.target, &image).map_err(|e| e.at(self.point()))?;
        let tau0: Vec<f64> = tau_p.iter().map(Jet::value).collect();
        let d0: Vec<Vec<f64>> = self
            .dphi
            .iter()
            .map(|d| d.iter().map(Jet::value).collect())
            .collect();
        let g_inv0: Matrix<f64> = self
            .source
            .g_inv
            .iter()
            .map(|r| r.iter().map(Jet::value).collect())
            .collect();
        let mut curvature = vec![0.0; n];
        for i in 0..m {
            for j in 0..m {
                let r = curv.apply(&tau0, &d0[i], &d0[j]);
                for a in 0..n {
                    curvature[a] += g_inv0[i][j] * r[a];
                }
            }
        }
        let w0 = self.dphi_norm_pow(p - 2.0)?.value();
        let curvature: Vec<f64> = curvature.iter().map(|c| w0 * c).collect();

        // trace_g ∇^φ (|dφ|^{p-2} ∇^φ τ_p)
        let weight = self.dphi_norm_pow(p - 2.0)?;
        let weighted: Vec<Vec<Jet>> = nabla
            .iter()
            .map(|v| v.iter().map(|c| &weight * c).collect())
            .collect();
        let rough: Vec<f64> = self
            .trace_pullback(&weighted)
            .iter()
            .map(Jet::value)
            .collect();

        // trace_g ∇(⟨∇^φ τ_p, dφ⟩ |dφ|^{p-4} dφ)
        let gradient_term: Vec<f64> = if p == 2.0 {
            vec![0.0; n]
        } else {
            let f = self.pairing_with_dphi(&nabla) * self.dphi_norm_pow(p - 4.0)?;
            let form: Vec<Vec<Jet>> = self
                .dphi
                .iter()
                .map(|d| d.iter().map(|v| &f * v).collect())
                .collect();
            self.trace_pullback(&form).iter().map(Jet::value).collect()
        };

        let total = (0..n)
            .map(|a| -curvature[a] - rough[a] - (p - 2.0) * gradient_term[a])
            .collect();
        Ok(BitensionParts {
            curvature,
            rough,
            gradient: gradient_term,
            total,
        })
    }
}

/// `τ_{2,p} = −curvature − rough − (p−2)·gradient`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitensionParts {
    /// `|dφ|^{p-2} trace_g R^N(τ_p, dφ)dφ`
    pub curvature: Vec<f64>,
    /// `trace_g ∇^φ |dφ|^{p-2} ∇^φ τ_p`
    pub rough: Vec<f64>,
    /// `trace_g ∇ ⟨∇^φ τ_p, dφ⟩ |dφ|^{p-4} dφ`
    pub gradient: Vec<f64>,
    pub total: Vec<f64>,
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

/// Differential `dmap[i][α] = ∂_i φ^α`.
pub fn dmap(map: &SmoothMap, x: &[f64]) -> Result<Matrix<f64>> {
    let local = map.local(x, 1)?;
    Ok(local.dphi.iter().map(|d| values(d)).collect())
}

/// Hilbert–Schmidt norm `|dφ|`.
pub fn dmap_norm(map: &SmoothMap, x: &[f64]) -> Result<f64> {
    Ok(map.local(x, 1)?.energy_density2().value().max(0.0).sqrt())
}

/// `(∇dφ)(∂_i, ∂_j)` as target vectors indexed `[i][j]`.
pub fn second_fundamental_form_map(map: &SmoothMap, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let local = map.local(x, 2)?;
    Ok(local
        .hessian()
        .iter()
        .map(|row| row.iter().map(|v| values(v)).collect())
        .collect())
}

pub fn tension(map: &SmoothMap, x: &[f64]) -> Result<Vec<f64>> {
    Ok(values(&map.local(x, 2)?.tension()?))
}

pub fn p_tension(map: &SmoothMap, x: &[f64], p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    Ok(values(&map.local(x, 2)?.p_tension(p)?))
}

pub fn p_bitension(map: &SmoothMap, x: &[f64], p: f64) -> Result<Vec<f64>> {
    Ok(p_bitension_parts(map, x, p)?.total)
}

pub fn p_bitension_parts(map: &SmoothMap, x: &[f64], p: f64) -> Result<BitensionParts> {
    check_p(p)?;
    map.local(x, 4)?.p_bitension(p)
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p >= 2.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "p must be at least 2, got {p}"
        )))
    }
}

/// A section of `φ^{-1}TN`, evaluated from the map's jets.
pub trait FieldAlongMap: Sync {
    /// Derivative orders of the map consumed when evaluating the field.
    fn order_cost(&self) -> usize;
    fn eval(&self, at: &MapJets<'_>) -> Result<Vec<Jet>>;
}

/// A field with constant target components.
#[derive(Debug, Clone)]
pub struct ConstantField(pub Vec<f64>);

impl FieldAlongMap for ConstantField {
    fn order_cost(&self) -> usize {
        0
    }
    fn eval(&self, at: &MapJets<'_>) -> Result<Vec<Jet>> {
        Ok(self.0.iter().map(|&v| at.phi[0].constant_like(v)).collect())
    }
}

/// Target components given as expressions in the source coordinates.
#[derive(Debug, Clone)]
pub struct ExpressionField(pub Vec<Expression>);

impl FieldAlongMap for ExpressionField {
    fn order_cost(&self) -> usize {
        0
    }
    fn eval(&self, at: &MapJets<'_>) -> Result<Vec<Jet>> {
        let none = Params::new();
        self.0
            .iter()
            .map(|e| e.eval(&at.source.coords, &none))
            .collect()
    }
}

/// `dφ(∂_j)`.
#[derive(Debug, Clone, Copy)]
pub struct Differential(pub usize);

impl FieldAlongMap for Differential {
    fn order_cost(&self) -> usize {
        1
    }
    fn eval(&self, at: &MapJets<'_>) -> Result<Vec<Jet>> {
        at.dphi
            .get(self.0)
            .cloned()
            .ok_or_else(|| Error::Dimension(format!("no source direction {}", self.0)))
    }
}

/// `τ(φ)` as a field.
#[derive(Debug, Clone, Copy)]
pub struct TensionField;

impl FieldAlongMap for TensionField {
    fn order_cost(&self) -> usize {
        2
    }
    fn eval(&self, at: &MapJets<'_>) -> Result<Vec<Jet>> {
        at.tension()
    }
}

/// `τ_p(φ)` as a field.
#[derive(Debug, Clone, Copy)]
pub struct PTensionField(pub f64);

impl FieldAlongMap for PTensionField {
    fn order_cost(&self) -> usize {
        2
    }
    fn eval(&self, at: &MapJets<'_>) -> Result<Vec<Jet>> {
        at.p_tension(self.0)
    }
}

/// `∇^φ_{∂_i} V` at `x`.
pub fn pullback_derivative(
    map: &SmoothMap,
    field: &dyn FieldAlongMap,
    direction: usize,
    x: &[f64],
) -> Result<Vec<f64>> {
    if direction >= map.source_dim() {
        return Err(Error::Dimension(format!("no source direction {direction}")));
    }
    let local = map.local(x, field.order_cost().max(1) + 1)?;
    let v = field.eval(&local)?;
    Ok(values(&local.pullback_derivative(&v, direction)))
}

/// `E_p(φ; box) = (1/p) ∫ |dφ|^p v_g` by Gauss–Legendre quadrature.
pub fn p_energy_box(map: &SmoothMap, bounds: &[(f64, f64)], p: f64, order: usize) -> Result<f64> {
    check_p(p)?;
    check_box(map, bounds)?;
    quadrature::integrate_box(bounds, order, |x| {
        let local = map.local(x, 1)?;
        let e2 = local.energy_density2().value().max(0.0);
        let density = linalg::determinant(&metric_values(&local.source)).sqrt();
        Ok(e2.powf(0.5 * p) * density / p)
    })
}

/// `E_{2,p}(φ; box) = ½ ∫ |τ_p(φ)|² v_g` by Gauss–Legendre quadrature.
pub fn p_bienergy_box(map: &SmoothMap, bounds: &[(f64, f64)], p: f64, order: usize) -> Result<f64> {
    check_p(p)?;
    check_box(map, bounds)?;
    quadrature::integrate_box(bounds, order, |x| {
        let local = map.local(x, 2)?;
        let tau_p = local.p_tension(p)?;
        let norm2 = local.h_inner(&tau_p, &tau_p).value();
        let density = linalg::determinant(&metric_values(&local.source)).sqrt();
        Ok(0.5 * norm2 * density)
    })
}

/// `∫ h(τ_p(φ), v) v_g` over a box, for a variation field `v`.
pub fn p_tension_pairing_box(
    map: &SmoothMap,
    field: &dyn FieldAlongMap,
    bounds: &[(f64, f64)],
    p: f64,
    order: usize,
) -> Result<f64> {
    check_p(p)?;
    check_box(map, bounds)?;
    quadrature::integrate_box(bounds, order, |x| {
        let local = map.local(x, field.order_cost().max(2))?;
        let tau_p = local.p_tension(p)?;
        let v = field.eval(&local)?;
        let density = linalg::determinant(&metric_values(&local.source)).sqrt();
        Ok(local.h_inner(&tau_p, &v).value() * density)
    })
}

/// `∫ h(τ_{2,p}(φ), v) v_g` over a box, for a variation field `v`.
pub fn p_bitension_pairing_box(
    map: &SmoothMap,
    field: &dyn FieldAlongMap,
    bounds: &[(f64, f64)],
    p: f64,
    order: usize,
) -> Result<f64> {
    check_p(p)?;
    check_box(map, bounds)?;
    quadrature::integrate_box(bounds, order, |x| {
        let local = map.local(x, 4)?;
        let bi = local.p_bitension(p)?.total;
        let v = values(&field.eval(&local)?);
        let h0 = metric_values_target(&local);
        let density = linalg::determinant(&metric_values(&local.source)).sqrt();
        Ok(linalg::inner(&h0, &bi, &v) * density)
    })
}

fn metric_values(local: &LocalGeometry) -> Matrix<f64> {
    local
        .g
        .iter()
        .map(|r| r.iter().map(Jet::value).collect())
        .collect()
}

fn metric_values_target(local: &MapJets<'_>) -> Matrix<f64> {
    local
        .h
        .iter()
        .map(|r| r.iter().map(Jet::value).collect())
        .collect()
}

fn check_box(map: &SmoothMap, bounds: &[(f64, f64)]) -> Result<()> {
    if bounds.len() != map.source_dim() {
        return Err(Error::Dimension(format!(
            "box has {} axes, source has dimension {}",
            bounds.len(),
            map.source_dim()
        )));
    }
    Ok(())
}
