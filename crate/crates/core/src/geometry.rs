//! Coordinate charts with Riemannian metrics.
//!
//! A [`ChartMetric`] holds its components `g_ij` and their first partials as
//! expressions, so the Levi-Civita connection can be evaluated at plain
//! points or at jet-valued points (the latter is how maps pull target
//! geometry back to the source). Index conventions:
//!
//! * `gamma[k][i][j] = Γ^k_ij`
//! * `R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l`, stored as `up[l][i][j][k]`
//! * `R_ijkl = g(R(∂_i, ∂_j)∂_k, ∂_l)`, stored as `down[i][j][k][l]`

use crate::error::{Error, Result};
use crate::expr::{Expression, Params};
use crate::jet::{self, Jet, Scalar};
use crate::linalg::{self, Matrix};

/// `gamma[k][i][j] = Γ^k_ij`.
pub type Christoffel<S> = Vec<Matrix<S>>;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Every point where the components evaluate finitely.
    All,
    /// Axis-aligned box, closed.
    Box(Vec<(f64, f64)>),
    /// Open ball `|x| < radius` around the origin.
    Ball(f64),
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::All => true,
            Domain::Box(bounds) => bounds
                .iter()
                .zip(x)
                .all(|(&(lo, hi), &v)| v >= lo && v <= hi),
            Domain::Ball(r) => x.iter().map(|v| v * v).sum::<f64>() < r * r,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChartMetric {
    dim: usize,
    components: Matrix<Expression>,
    /// `derivatives[k][i][j] = ∂_k g_ij`
    derivatives: Vec<Matrix<Expression>>,
    space_form: Option<f64>,
    domain: Domain,
}

impl ChartMetric {
    /// Builds a chart from a square matrix of component expressions.
    ///
    /// Off-diagonal pairs that differ are replaced by their average.
    pub fn new(components: Matrix<Expression>) -> Result<ChartMetric> {
        let dim = components.len();
        if dim == 0 || components.iter().any(|row| row.len() != dim) {
            return Err(Error::Dimension(
                "metric components must form a non-empty square matrix".into(),
            ));
        }
        if let Some(k) = components
            .iter()
            .flatten()
            .filter_map(|e| e.max_coord())
            .max()
        {
            if k >= dim {
                return Err(Error::Dimension(format!(
                    "metric component references coordinate {} in a {dim}-dimensional chart",
                    k + 1
                )));
            }
        }
        let mut sym = components;
        for i in 0..dim {
            for j in i + 1..dim {
                let (a, b) = (sym[i][j].clone(), sym[j][i].clone());
                let s = if a.to_string() == b.to_string() {
                    a
                } else {
                    a.add(&b).scale(0.5)
                };
                sym[i][j] = s.clone();
                sym[j][i] = s;
            }
        }
        let derivatives = (0..dim)
            .map(|k| {
                sym.iter()
                    .map(|row| row.iter().map(|e| e.differentiate(k)).collect())
                    .collect()
            })
            .collect();
        Ok(ChartMetric {
            dim,
            components: sym,
            derivatives,
            space_form: None,
            domain: Domain::All,
        })
    }

    pub fn euclidean(dim: usize) -> ChartMetric {
        ChartMetric::conformal(dim, Expression::constant(1.0))
    }

    /// `g = factor · δ`.
    pub fn conformal(dim: usize, factor: Expression) -> ChartMetric {
        let components = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            factor.clone()
                        } else {
                            Expression::constant(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        ChartMetric::new(components).expect("conformal metric is square")
    }

    pub fn diagonal(entries: Vec<Expression>) -> ChartMetric {
        let dim = entries.len();
        let components = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            entries[i].clone()
                        } else {
                            Expression::constant(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        ChartMetric::new(components).expect("diagonal metric is square")
    }

    pub fn with_domain(mut self, domain: Domain) -> ChartMetric {
        self.domain = domain;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize, j: usize) -> &Expression {
        &self.components[i][j]
    }

    pub fn components(&self) -> &Matrix<Expression> {
        &self.components
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Curvature constant when the chart was built as a space form.
    pub fn space_form_curvature(&self) -> Option<f64> {
        self.space_form
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .components
            .iter()
            .flatten()
            .flat_map(|e| e.param_names())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Substitutes parameter values into every component.
    pub fn bind(&self, params: &Params) -> ChartMetric {
        let bind_all = |m: &Matrix<Expression>| -> Matrix<Expression> {
            m.iter()
                .map(|row| row.iter().map(|e| e.bind(params)).collect())
                .collect()
        };
        ChartMetric {
            dim: self.dim,
            components: bind_all(&self.components),
            derivatives: self.derivatives.iter().map(bind_all).collect(),
            space_form: self.space_form,
            domain: self.domain.clone(),
        }
    }

    fn check_point_dim<S>(&self, y: &[S]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, chart has {}",
                y.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn metric_at<S: Scalar>(&self, y: &[S]) -> Result<Matrix<S>> {
        self.check_point_dim(y)?;
        let none = Params::new();
        self.components
            .iter()
            .map(|row| row.iter().map(|e| e.eval(y, &none)).collect())
            .collect()
    }

    /// `out[k][i][j] = ∂_k g_ij` at `y`.
    pub fn derivatives_at<S: Scalar>(&self, y: &[S]) -> Result<Vec<Matrix<S>>> {
        self.check_point_dim(y)?;
        let none = Params::new();
        self.derivatives
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|e| e.eval(y, &none)).collect())
                    .collect()
            })
            .collect()
    }

    /// Metric, inverse metric and Christoffel symbols at `y`.
    pub fn connection_at<S: Scalar>(
        &self,
        y: &[S],
    ) -> Result<(Matrix<S>, Matrix<S>, Christoffel<S>)> {
        let g = self.metric_at(y)?;
        let values: Matrix<f64> = g
            .iter()
            .map(|row| row.iter().map(Scalar::value).collect())
            .collect();
        if linalg::cholesky(&values).is_none() {
            return Err(Error::NotPositiveDefinite {
                point: y.iter().map(Scalar::value).collect(),
            });
        }
        let g_inv = linalg::invert(&g)?;
        let dg = self.derivatives_at(y)?;
        let gamma = christoffel_from(&g_inv, &dg);
        Ok((g, g_inv, gamma))
    }

    pub fn christoffel_at<S: Scalar>(&self, y: &[S]) -> Result<Christoffel<S>> {
        Ok(self.connection_at(y)?.2)
    }

    /// Jets of the metric data at `x`, seeded in all chart coordinates.
    pub fn local(&self, x: &[f64], order: usize) -> Result<LocalGeometry> {
        jet::check_order(order)?;
        let coords = Jet::seed(x, order);
        let (g, g_inv, gamma) = self.connection_at(&coords).map_err(|e| e.at(x))?;
        Ok(LocalGeometry {
            point: x.to_vec(),
            order,
            coords,
            g,
            g_inv,
            gamma,
        })
    }
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
fn christoffel_from<S: Scalar>(g_inv: &[Vec<S>], dg: &[Matrix<S>]) -> Christoffel<S> {
    let d = g_inv.len();
    let zero = g_inv[0][0].zero_like();
    (0..d)
        .map(|k| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let mut acc = zero.clone();
                            for l in 0..d {
                                let bracket =
                                    dg[i][j][l].clone() + dg[j][i][l].clone() - dg[l][i][j].clone();
                                acc = acc + g_inv[k][l].clone() * bracket;
                            }
                            acc * 0.5
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Chart of the simply connected space form of curvature `c`:
/// `g_ij = (1 + (c/4)|x|²)^(−2) δ_ij`.
pub fn space_form_chart(c: f64, dim: usize) -> ChartMetric {
    let norm2 = Expression::sum((0..dim).map(|i| Expression::coord(i).powf(2.0)));
    let factor = Expression::constant(1.0)
        .add(&norm2.scale(c / 4.0))
        .powf(-2.0);
    let mut chart = ChartMetric::conformal(dim, factor);
    chart.space_form = Some(c);
    if c < 0.0 {
        chart.domain = Domain::Ball(2.0 / c.abs().sqrt());
    }
    chart
}

/// Christoffel symbols `Γ^k_ij` at a point.
pub fn christoffel(chart: &ChartMetric, x: &[f64]) -> Result<Christoffel<f64>> {
    chart.christoffel_at(x).map_err(|e| e.at(x))
}

#[derive(Debug, Clone)]
pub struct Curvature {
    pub point: Vec<f64>,
    pub metric: Matrix<f64>,
    pub inverse: Matrix<f64>,
    /// `up[l][i][j][k] = R^l_ijk`
    pub up: Vec<Vec<Vec<Vec<f64>>>>,
    /// `down[i][j][k][l] = R_ijkl`
    pub down: Vec<Vec<Vec<Vec<f64>>>>,
}

impl Curvature {
    /// `R(u, v)w` as a vector.
    pub fn apply(&self, u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
        let d = self.metric.len();
        (0..d)
            .map(|l| {
                let mut acc = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            acc += self.up[l][i][j][k] * u[i] * v[j] * w[k];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Sectional curvature of the plane spanned by `u` and `v`.
    pub fn sectional(&self, u: &[f64], v: &[f64]) -> f64 {
        let ruvv = self.apply(u, v, v);
        let num = linalg::inner(&self.metric, &ruvv, u);
        let uu = linalg::inner(&self.metric, u, u);
        let vv = linalg::inner(&self.metric, v, v);
        let uv = linalg::inner(&self.metric, u, v);
        num / (uu * vv - uv * uv)
    }

    /// `Ric_jk = R^i_ijk`.
    pub fn ricci(&self) -> Matrix<f64> {
        let d = self.metric.len();
        (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| (0..d).map(|i| self.up[i][i][j][k]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn scalar(&self) -> f64 {
        let ric = self.ricci();
        let d = self.metric.len();
        let mut s = 0.0;
        for j in 0..d {
            for k in 0..d {
                s += self.inverse[j][k] * ric[j][k];
            }
        }
        s
    }
}

/// Riemann tensor at a point, from order-1 jets of the Christoffel symbols.
pub fn curvature_tensor(chart: &ChartMetric, x: &[f64]) -> Result<Curvature> {
    let local = chart.local(x, 1)?;
    let d = chart.dim();
    let gamma = &local.gamma;
    let g0 = |m: &Matrix<Jet>| -> Matrix<f64> {
        m.iter()
            .map(|r| r.iter().map(Jet::value).collect())
            .collect()
    };
    let up: Vec<Vec<Vec<Vec<f64>>>> = (0..d)
        .map(|l| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            (0..d)
                                .map(|k| {
                                    let mut r = gamma[l][j][k].deriv(i).value()
                                        - gamma[l][i][k].deriv(j).value();
                                    for m in 0..d {
                                        r += gamma[l][i][m].value() * gamma[m][j][k].value()
                                            - gamma[l][j][m].value() * gamma[m][i][k].value();
                                    }
                                    r
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let metric = g0(&local.g);
    let down = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d)
                        .map(|k| {
                            (0..d)
                                .map(|l| (0..d).map(|m| metric[l][m] * up[m][i][j][k]).sum())
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Curvature {
        point: x.to_vec(),
        inverse: g0(&local.g_inv),
        metric,
        up,
        down,
    })
}

/// A g-orthonormal basis of the tangent space at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub point: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Gram–Schmidt of the coordinate basis in index order.
pub fn orthonormal_frame(chart: &ChartMetric, x: &[f64]) -> Result<Frame> {
    let g = chart.metric_at(x).map_err(|e| e.at(x))?;
    if linalg::cholesky(&g).is_none() {
        return Err(Error::NotPositiveDefinite { point: x.to_vec() });
    }
    let d = chart.dim();
    let basis: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let vectors = linalg::gram_schmidt(&g, &basis, false, 1e-12)
        .map_err(|_| Error::NotPositiveDefinite { point: x.to_vec() })?;
    Ok(Frame {
        point: x.to_vec(),
        vectors,
    })
}

/// Metric data as jets around a point, with the first-order differential
/// operators of the chart.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub point: Vec<f64>,
    pub order: usize,
    pub coords: Vec<Jet>,
    pub g: Matrix<Jet>,
    pub g_inv: Matrix<Jet>,
    pub gamma: Christoffel<Jet>,
}

impl LocalGeometry {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn constant(&self, v: f64) -> Jet {
        self.coords[0].constant_like(v)
    }

    /// `(grad f)^i = g^{ij} ∂_j f`.
    pub fn gradient(&self, f: &Jet) -> Vec<Jet> {
        let df: Vec<Jet> = (0..self.dim()).map(|j| f.deriv(j)).collect();
        self.raise(&df)
    }

    /// Raises a covector with the inverse metric.
    pub fn raise(&self, covector: &[Jet]) -> Vec<Jet> {
        linalg::apply(&self.g_inv, covector)
    }

    /// `div X = ∂_i X^i + Γ^i_ik X^k`.
    pub fn divergence(&self, field: &[Jet]) -> Jet {
        let d = self.dim();
        let mut acc = field[0].deriv(0).zero_like();
        for i in 0..d {
            acc = acc + field[i].deriv(i);
            for k in 0..d {
                acc = acc + &self.gamma[i][i][k] * &field[k];
            }
        }
        acc
    }

    /// `(div T)_k = g^{ij}(∇_i T)_{jk}` for a symmetric (0,2)-tensor.
    pub fn divergence_2tensor(&self, t: &[Vec<Jet>]) -> Vec<Jet> {
        let d = self.dim();
        let nabla = |i: usize, j: usize, k: usize| -> Jet {
            let mut v = t[j][k].deriv(i);
            for l in 0..d {
                v = v - &self.gamma[l][i][j] * &t[l][k] - &self.gamma[l][i][k] * &t[j][l];
            }
            v
        };
        (0..d)
            .map(|k| {
                let mut acc = t[0][0].deriv(0).zero_like();
                for i in 0..d {
                    for j in 0..d {
                        acc = acc + &self.g_inv[i][j] * &nabla(i, j, k);
                    }
                }
                acc
            })
            .collect()
    }

    /// Riemannian volume density `√det g`.
    pub fn volume_density(&self) -> Jet {
        linalg::determinant(&self.g).sqrt()
    }
}

fn local_for_field(chart: &ChartMetric, x: &[f64]) -> Result<LocalGeometry> {
    chart.local(x, 1)
}

fn eval_field(exprs: &[Expression], local: &LocalGeometry) -> Result<Vec<Jet>> {
    let none = Params::new();
    exprs
        .iter()
        .map(|e| {
            e.eval(&local.coords, &none)
                .map_err(|err| err.at(&local.point))
        })
        .collect()
}

/// Gradient of a scalar field at `x`.
pub fn gradient(chart: &ChartMetric, f: &Expression, x: &[f64]) -> Result<Vec<f64>> {
    let local = local_for_field(chart, x)?;
    let fj = eval_field(std::slice::from_ref(f), &local)?;
    Ok(local.gradient(&fj[0]).iter().map(Jet::value).collect())
}

/// Divergence of a vector field at `x`.
pub fn divergence(chart: &ChartMetric, field: &[Expression], x: &[f64]) -> Result<f64> {
    let local = local_for_field(chart, x)?;
    let xj = eval_field(field, &local)?;
    Ok(local.divergence(&xj).value())
}

/// Divergence of a symmetric (0,2)-tensor field at `x`.
pub fn divergence_2tensor(
    chart: &ChartMetric,
    t: &[Vec<Expression>],
    x: &[f64],
) -> Result<Vec<f64>> {
    let local = local_for_field(chart, x)?;
    let tj: Vec<Vec<Jet>> = t
        .iter()
        .map(|row| eval_field(row, &local))
        .collect::<Result<_>>()?;
    Ok(local
        .divergence_2tensor(&tj)
        .iter()
        .map(Jet::value)
        .collect())
}
