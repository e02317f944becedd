//! Isometric immersions into space forms.
//!
//! Normal-bundle objects are represented as ambient vectors and obtained by
//! orthogonal projection `P⊥V = V − dφ(∂_k) g^{kl} h(dφ(∂_l), V)`, so no
//! normal frame needs to be differentiated. Tangent vectors are reported in
//! source coordinates.

use crate::error::{Error, Result};
use crate::expr::{Expression, Params};
use crate::geometry::{self, ChartMetric};
use crate::jet::Jet;
use crate::linalg::{self, Matrix};
use crate::mapcalc::{self, FieldAlongMap, MapJets, SmoothMap};

#[derive(Debug, Clone)]
pub struct Immersion {
    map: SmoothMap,
    curvature: f64,
}

impl Immersion {
    /// Immersion of an `m`-dimensional parameter domain into the space-form
    /// chart of curvature `c` whose dimension is the number of components.
    /// The source metric is the pull-back.
    pub fn new(
        components: Vec<Expression>,
        m: usize,
        c: f64,
        params: &Params,
    ) -> Result<Immersion> {
        let target = geometry::space_form_chart(c, components.len());
        let components: Vec<Expression> = components.iter().map(|e| e.bind(params)).collect();
        let source = mapcalc::induced_metric(&target, &components, m)?;
        Immersion::with_source(components, source, c, params)
    }

    /// Immersion with a user-supplied source chart, which should agree with
    /// the pull-back metric (see [`Immersion::check_isometric`]).
    pub fn with_source(
        components: Vec<Expression>,
        source: ChartMetric,
        c: f64,
        params: &Params,
    ) -> Result<Immersion> {
        let m = source.dim();
        let n = components.len();
        if n <= m {
            return Err(Error::Dimension(format!(
                "an immersion needs target dimension above {m}, got {n}"
            )));
        }
        let target = geometry::space_form_chart(c, n);
        let map = SmoothMap::new(source, target, components, params)?;
        Ok(Immersion { map, curvature: c })
    }

    pub fn map(&self) -> &SmoothMap {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.source_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.target_dim()
    }

    pub fn codimension(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// Largest deviation between the source metric and the pull-back at `x`.
    pub fn check_isometric(&self, x: &[f64]) -> Result<f64> {
        let local = self.local(x, 1)?;
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let pulled = local.h_inner(&local.dphi[i], &local.dphi[j]).value();
                worst = worst.max((pulled - local.source.g[i][j].value()).abs());
            }
        }
        Ok(worst)
    }

    fn local(&self, x: &[f64], order: usize) -> Result<MapJets<'_>> {
        self.map.local(x, order).map_err(|e| match e {
            Error::AtPoint { source, point }
                if matches!(
                    *source,
                    Error::NotPositiveDefinite { .. } | Error::SingularMatrix
                ) =>
            {
                Error::RankDeficient { point }
            }
            Error::NotPositiveDefinite { point } => Error::RankDeficient { point },
            other => other,
        })
    }
}

/// Components of the small hypersphere `S^m(a) ⊂ S^{m+1}`, `a² + b² = 1`,
/// in the stereographic chart of the unit sphere, parametrized by
/// stereographic coordinates of the unit `m`-sphere.
pub fn small_hypersphere_components(m: usize, a: f64) -> Result<Vec<Expression>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Precondition(format!(
            "radius a must lie in (0, 1), got {a}"
        )));
    }
    if m == 0 {
        return Err(Error::Dimension("sphere dimension must be positive".into()));
    }
    let b = (1.0 - a * a).sqrt();
    let k = 2.0 * a / (1.0 - b);
    let s = Expression::sum((0..m).map(|i| Expression::coord(i).powf(2.0))).scale(0.25);
    let den = Expression::constant(1.0).add(&s);
    let mut comps: Vec<Expression> = (0..m)
        .map(|i| Expression::coord(i).scale(k).div(&den))
        .collect();
    comps.push(s.sub(&Expression::constant(1.0)).scale(k).div(&den));
    Ok(comps)
}

/// An `h`-orthonormal basis of the normal space at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFrame {
    pub point: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// `B(∂_i, ∂_j)` as ambient normal vectors and as normal-frame coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    pub frame: NormalFrame,
    /// `vectors[i][j]` is `B(∂_i, ∂_j)`.
    pub vectors: Vec<Vec<Vec<f64>>>,
    /// `coefficients[i][j][a] = h(B(∂_i, ∂_j), ξ_a)`.
    pub coefficients: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem21Residuals {
    /// `−Δ⊥H + trace_g B(·, A_H ·) − m(c − (p−2)|H|²)H`, ambient components.
    pub normal: Vec<f64>,
    /// `2 trace_g A_{∇⊥_· H}(·) + (p−2+m/2) grad|H|²`, source components.
    pub tangent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem23Residuals {
    /// `h(−Δ⊥H + (|A|² + m(p−2)|H|² − mc)H, η)` with `η = H/|H|`.
    pub normal: f64,
    /// `2A(grad|H|) + (2(p−2)+m)|H| grad|H|`, source components.
    pub tangent: Vec<f64>,
}

/// Normal and tangent parts of a target vector along the immersion.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Ambient components of the normal part.
    pub normal: Vec<f64>,
    /// Source components `g^{kl} h(dφ(∂_l), V)` of the tangent part.
    pub tangent: Vec<f64>,
}

/// Jet-level submanifold quantities at a point.
struct Local<'a> {
    jets: MapJets<'a>,
    m: usize,
}

impl<'a> Local<'a> {
    fn tangent_coeffs(&self, v: &[Jet]) -> Vec<Jet> {
        let pairings: Vec<Jet> = self
            .jets
            .dphi
            .iter()
            .map(|d| self.jets.h_inner(d, v))
            .collect();
        self.jets.source.raise(&pairings)
    }

    fn normal(&self, v: &[Jet]) -> Vec<Jet> {
        let t = self.tangent_coeffs(v);
        let push = self.jets.push_forward(&t);
        v.iter().zip(&push).map(|(a, b)| a - b).collect()
    }

    /// `B(∂_i, ∂_j)`.
    fn second_fundamental_form(&self) -> Vec<Vec<Vec<Jet>>> {
        self.jets
            .hessian()
            .iter()
            .map(|row| row.iter().map(|v| self.normal(v)).collect())
            .collect()
    }

    fn mean_curvature(&self, b: &[Vec<Vec<Jet>>]) -> Vec<Jet> {
        let inv = 1.0 / self.m as f64;
        self.jets.trace_g(b).into_iter().map(|v| v * inv).collect()
    }

    /// `∇⊥_{∂_i} V`.
    fn normal_derivative(&self, v: &[Jet], i: usize) -> Vec<Jet> {
        self.normal(&self.jets.pullback_derivative(v, i))
    }

    /// `(A_ξ)^k_j = g^{kl} h(B(∂_j, ∂_l), ξ)`, base values.
    fn shape_operator(&self, b: &[Vec<Vec<Jet>>], xi: &[f64]) -> Matrix<f64> {
        let m = self.m;
        let h0 = values2(&self.jets.h);
        let g_inv = values2(&self.jets.source.g_inv);
        let lowered: Matrix<f64> = (0..m)
            .map(|j| {
                (0..m)
                    .map(|l| linalg::inner(&h0, &values(&b[j][l]), xi))
                    .collect()
            })
            .collect();
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|j| (0..m).map(|l| g_inv[k][l] * lowered[j][l]).sum())
                    .collect()
            })
            .collect()
    }
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

fn values2(m: &[Vec<Jet>]) -> Matrix<f64> {
    m.iter().map(|r| values(r)).collect()
}

fn local<'a>(imm: &'a Immersion, x: &[f64], order: usize) -> Result<Local<'a>> {
    Ok(Local {
        jets: imm.local(x, order)?,
        m: imm.dim(),
    })
}

/// Gram–Schmidt of the tangent vectors followed by ambient coordinate
/// vectors, choosing at each step the coordinate vector with the largest
/// normal remainder (ties broken by index).
pub fn normal_frame(imm: &Immersion, x: &[f64]) -> Result<NormalFrame> {
    let l = local(imm, x, 1)?;
    let h0 = values2(&l.jets.h);
    let tangents: Vec<Vec<f64>> = l.jets.dphi.iter().map(|d| values(d)).collect();
    let mut basis = linalg::gram_schmidt(&h0, &tangents, false, 1e-10)
        .map_err(|_| Error::RankDeficient { point: x.to_vec() })?;
    let n = imm.ambient_dim();
    let mut normals = Vec::new();
    let mut used = vec![false; n];
    for _ in 0..imm.codimension() {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (a, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut w: Vec<f64> = (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect();
            for e in &basis {
                let c = linalg::inner(&h0, &w, e);
                w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= c * ei);
            }
            let norm = linalg::inner(&h0, &w, &w).max(0.0).sqrt();
            if best.as_ref().is_none_or(|(_, _, bn)| norm > *bn) {
                best = Some((a, w, norm));
            }
        }
        let (a, w, norm) = best.ok_or_else(|| Error::RankDeficient { point: x.to_vec() })?;
        if norm < 1e-10 {
            return Err(Error::RankDeficient { point: x.to_vec() });
        }
        used[a] = true;
        let unit: Vec<f64> = w.iter().map(|v| v / norm).collect();
        basis.push(unit.clone());
        normals.push(unit);
    }
    Ok(NormalFrame {
        point: x.to_vec(),
        vectors: normals,
    })
}

pub fn second_fundamental_form(imm: &Immersion, x: &[f64]) -> Result<SecondFundamentalForm> {
    let frame = normal_frame(imm, x)?;
    let l = local(imm, x, 2)?;
    let h0 = values2(&l.jets.h);
    let vectors: Vec<Vec<Vec<f64>>> = l
        .second_fundamental_form()
        .iter()
        .map(|row| row.iter().map(|v| values(v)).collect())
        .collect();
    let coefficients = vectors
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    frame
                        .vectors
                        .iter()
                        .map(|xi| linalg::inner(&h0, v, xi))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(SecondFundamentalForm {
        frame,
        vectors,
        coefficients,
    })
}

/// `A_ξ` as the matrix `(A_ξ)^k_j` acting on source components.
pub fn shape_operator(imm: &Immersion, x: &[f64], xi: &[f64]) -> Result<Matrix<f64>> {
    if xi.len() != imm.ambient_dim() {
        return Err(Error::Dimension(
            "normal vector has the wrong length".into(),
        ));
    }
    let l = local(imm, x, 2)?;
    Ok(l.shape_operator(&l.second_fundamental_form(), xi))
}

/// Mean curvature vector `H = (1/m) trace_g B` in ambient components.
pub fn mean_curvature(imm: &Immersion, x: &[f64]) -> Result<Vec<f64>> {
    let l = local(imm, x, 2)?;
    Ok(values(&l.mean_curvature(&l.second_fundamental_form())))
}

/// `|H|` at `x`.
pub fn mean_curvature_norm(imm: &Immersion, x: &[f64]) -> Result<f64> {
    let l = local(imm, x, 2)?;
    let h = l.mean_curvature(&l.second_fundamental_form());
    Ok(l.jets.h_inner(&h, &h).value().max(0.0).sqrt())
}

/// `∇⊥_{∂_i} ξ` for a field along the immersion.
pub fn normal_connection(
    imm: &Immersion,
    x: &[f64],
    direction: usize,
    field: &dyn FieldAlongMap,
) -> Result<Vec<f64>> {
    if direction >= imm.dim() {
        return Err(Error::Dimension(format!("no source direction {direction}")));
    }
    let l = local(imm, x, field.order_cost().max(1) + 1)?;
    let v = field.eval(&l.jets)?;
    Ok(values(&l.normal_derivative(&v, direction)))
}

/// `∇⊥_{∂_i} H` for every source direction.
pub fn normal_derivative_h(imm: &Immersion, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let l = local(imm, x, 3)?;
    let h = l.mean_curvature(&l.second_fundamental_form());
    Ok((0..imm.dim())
        .map(|i| values(&l.normal_derivative(&h, i)))
        .collect())
}

/// Rough normal Laplacian `Δ⊥H = g^{ij}(∇⊥_i ∇⊥_j H − ∇⊥_{∇_i ∂_j} H)`.
pub fn normal_laplacian_h(imm: &Immersion, x: &[f64]) -> Result<Vec<f64>> {
    let l = local(imm, x, 4)?;
    let h = l.mean_curvature(&l.second_fundamental_form());
    Ok(values(&rough_normal_laplacian(&l, &h)))
}

fn rough_normal_laplacian(l: &Local<'_>, h: &[Jet]) -> Vec<Jet> {
    let m = l.m;
    let first: Vec<Vec<Jet>> = (0..m).map(|j| l.normal_derivative(h, j)).collect();
    let gamma = &l.jets.source.gamma;
    let family: Vec<Vec<Vec<Jet>>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut v = l.normal_derivative(&first[j], i);
                    for (a, va) in v.iter_mut().enumerate() {
                        for k in 0..m {
                            *va = &*va - &gamma[k][i][j] * &first[k][a];
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    l.jets.trace_g(&family)
}

/// Everything both characterizations need, at base values.
struct Terms {
    m: f64,
    h: Vec<f64>,
    h_norm2: f64,
    laplacian: Vec<f64>,
    /// `trace_g B(·, A_H ·)`
    b_ah: Vec<f64>,
    /// `trace_g A_{∇⊥_· H}(·)`, source components
    a_nabla_h: Vec<f64>,
    /// `grad |H|²`, source components
    grad_h2: Vec<f64>,
    shape: Matrix<f64>,
}

fn terms(imm: &Immersion, x: &[f64]) -> Result<Terms> {
    let l = local(imm, x, 4)?;
    let m = l.m;
    let b = l.second_fundamental_form();
    let h = l.mean_curvature(&b);
    let h0 = values(&h);
    let hm = values2(&l.jets.h);
    let g_inv = values2(&l.jets.source.g_inv);
    let laplacian = values(&rough_normal_laplacian(&l, &h));
    let a_h = l.shape_operator(&b, &h0);
    let n = imm.ambient_dim();
    let mut b_ah = vec![0.0; n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let c = g_inv[i][j] * a_h[k][j];
                for (a, v) in b_ah.iter_mut().enumerate() {
                    *v += c * b[i][k][a].value();
                }
            }
        }
    }
    let nabla_h: Vec<Vec<f64>> = (0..m)
        .map(|i| values(&l.normal_derivative(&h, i)))
        .collect();
    let mut a_nabla_h = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for ll in 0..m {
                    a_nabla_h[k] += g_inv[i][j]
                        * g_inv[k][ll]
                        * linalg::inner(&hm, &values(&b[j][ll]), &nabla_h[i]);
                }
            }
        }
    }
    let h2 = l.jets.h_inner(&h, &h);
    let grad_h2 = values(&l.jets.source.gradient(&h2));
    let shape = if imm.codimension() == 1 && h2.value() > 0.0 {
        let norm = h2.value().sqrt();
        let eta: Vec<f64> = h0.iter().map(|v| v / norm).collect();
        l.shape_operator(&b, &eta)
    } else {
        Vec::new()
    };
    Ok(Terms {
        m: m as f64,
        h_norm2: h2.value(),
        h: h0,
        laplacian,
        b_ah,
        a_nabla_h,
        grad_h2,
        shape,
    })
}

pub fn theorem21_residuals(imm: &Immersion, x: &[f64], p: f64) -> Result<Theorem21Residuals> {
    check_finite_p(p)?;
    let t = terms(imm, x)?;
    let c = imm.curvature();
    let k = t.m * (c - (p - 2.0) * t.h_norm2);
    let normal = (0..imm.ambient_dim())
        .map(|a| -t.laplacian[a] + t.b_ah[a] - k * t.h[a])
        .collect();
    let tangent = (0..imm.dim())
        .map(|i| 2.0 * t.a_nabla_h[i] + (p - 2.0 + 0.5 * t.m) * t.grad_h2[i])
        .collect();
    Ok(Theorem21Residuals { normal, tangent })
}

/// The residual systems are polynomial in `p`, so they are evaluated for any
/// finite `p`; they characterize p-biharmonicity only for `p ≥ 2`.
fn check_finite_p(p: f64) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("p must be finite, got {p}")))
    }
}

fn require_hypersurface(imm: &Immersion) -> Result<()> {
    if imm.codimension() == 1 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "a hypersurface is required, codimension is {}",
            imm.codimension()
        )))
    }
}

fn require_nonzero_h(t: &Terms, x: &[f64]) -> Result<f64> {
    let norm = t.h_norm2.max(0.0).sqrt();
    if norm <= 1e-12 {
        return Err(Error::Precondition(format!(
            "mean curvature vanishes at {x:?}"
        )));
    }
    Ok(norm)
}

/// `|A|² = trace(A_η ∘ A_η)` from a mixed shape-operator matrix.
fn shape_norm2(a: &Matrix<f64>) -> f64 {
    let m = a.len();
    (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j] * a[j][i])
        .sum()
}

pub fn theorem23_residuals(imm: &Immersion, x: &[f64], p: f64) -> Result<Theorem23Residuals> {
    check_finite_p(p)?;
    require_hypersurface(imm)?;
    let t = terms(imm, x)?;
    let h_norm = require_nonzero_h(&t, x)?;
    let eta: Vec<f64> = t.h.iter().map(|v| v / h_norm).collect();
    let a2 = shape_norm2(&t.shape);
    let c = imm.curvature();
    let m = t.m;
    let l = local(imm, x, 1)?;
    let hm = values2(&l.jets.h);
    let lap_eta = linalg::inner(&hm, &t.laplacian, &eta);
    let normal = -lap_eta + (a2 + m * (p - 2.0) * t.h_norm2 - m * c) * h_norm;
    // grad|H| = grad|H|² / (2|H|)
    let grad_h: Vec<f64> = t.grad_h2.iter().map(|v| v / (2.0 * h_norm)).collect();
    let a_grad = linalg::apply(&t.shape, &grad_h);
    let tangent = (0..imm.dim())
        .map(|i| 2.0 * a_grad[i] + (2.0 * (p - 2.0) + m) * h_norm * grad_h[i])
        .collect();
    Ok(Theorem23Residuals { normal, tangent })
}

/// `|A|²` of a hypersurface.
pub fn shape_operator_norm2(imm: &Immersion, x: &[f64]) -> Result<f64> {
    require_hypersurface(imm)?;
    let l = local(imm, x, 2)?;
    let b = l.second_fundamental_form();
    let frame = normal_frame(imm, x)?;
    Ok(shape_norm2(&l.shape_operator(&b, &frame.vectors[0])))
}

/// Solution of `|A|² = mc − m(p−2)|H|²` for a constant mean curvature
/// hypersurface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcProperP {
    /// `p* = 2 + (mc − |A|²)/(m|H|²)`
    pub p: f64,
    /// Whether `p* ≥ 2` (up to [`CMC_TOLERANCE`]), the range in which the
    /// characterization applies.
    pub admissible: bool,
}

pub fn cmc_proper_p(imm: &Immersion, x: &[f64]) -> Result<CmcProperP> {
    require_hypersurface(imm)?;
    let h_norm = mean_curvature_norm(imm, x)?;
    if h_norm <= 1e-12 {
        return Err(Error::Precondition(format!(
            "mean curvature vanishes at {x:?}"
        )));
    }
    let m = imm.dim() as f64;
    let a2 = shape_operator_norm2(imm, x)?;
    let p = 2.0 + (m * imm.curvature() - a2) / (m * h_norm * h_norm);
    Ok(CmcProperP {
        p,
        admissible: p >= 2.0 - CMC_TOLERANCE,
    })
}

/// Sample standard deviation of `|H|` above which a hypersurface is not
/// treated as having constant mean curvature.
pub const CMC_TOLERANCE: f64 = 1e-8;

/// [`cmc_proper_p`] after confirming `|H|` is constant over `points`.
pub fn cmc_proper_p_on(imm: &Immersion, points: &[Vec<f64>]) -> Result<CmcProperP> {
    let first = points
        .first()
        .ok_or_else(|| Error::Precondition("no sample points".into()))?;
    let norms: Vec<f64> = points
        .iter()
        .map(|x| mean_curvature_norm(imm, x))
        .collect::<Result<_>>()?;
    let n = norms.len() as f64;
    let mean = norms.iter().sum::<f64>() / n;
    let sd = (norms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if sd > CMC_TOLERANCE {
        return Err(Error::Precondition(format!(
            "mean curvature is not constant (std-dev {sd:e})"
        )));
    }
    cmc_proper_p(imm, first)
}

/// Splits a target vector at `x` into normal and tangent parts.
pub fn decompose(imm: &Immersion, x: &[f64], v: &[f64]) -> Result<Decomposition> {
    let l = local(imm, x, 1)?;
    let vj: Vec<Jet> = v.iter().map(|&c| l.jets.source.constant(c)).collect();
    Ok(Decomposition {
        normal: values(&l.normal(&vj)),
        tangent: values(&l.tangent_coeffs(&vj)),
    })
}

/// Normal and tangent parts of `τ_{2,p}` of the inclusion.
pub fn bitension_decomposition(imm: &Immersion, x: &[f64], p: f64) -> Result<Decomposition> {
    let bi = mapcalc::p_bitension(imm.map(), x, p)?;
    decompose(imm, x, &bi)
}

/// Sectional curvature of the induced metric along the first coordinate plane.
pub fn induced_sectional_curvature(imm: &Immersion, x: &[f64]) -> Result<f64> {
    if imm.dim() < 2 {
        return Err(Error::Dimension(
            "sectional curvature needs dimension 2".into(),
        ));
    }
    let curv = geometry::curvature_tensor(imm.map().source(), x)?;
    let mut u = vec![0.0; imm.dim()];
    let mut v = vec![0.0; imm.dim()];
    u[0] = 1.0;
    v[1] = 1.0;
    Ok(curv.sectional(&u, &v))
}
