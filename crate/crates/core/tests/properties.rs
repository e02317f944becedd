#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use pbh_core::expr::{eval_jet, parse};
use pbh_core::geometry::{self, space_form_chart, ChartMetric};
use pbh_core::mapcalc;
use pbh_core::stress;
use pbh_core::{Expression, Params};
use proptest::prelude::*;

fn expression() -> impl Strategy<Value = Expression> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Expression::coord),
        (-1.5f64..1.5).prop_map(Expression::constant),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b).scale(0.5)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| a.div(&Expression::constant(1.5).add(&b.cos()))),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.sin().exp()),
            inner
                .clone()
                .prop_map(|a| Expression::constant(1.0).add(&a.powf(2.0)).sqrt()),
            inner
                .clone()
                .prop_map(|a| Expression::constant(2.0).add(&a.sin()).ln()),
            (inner.clone(), 2u8..4).prop_map(|(a, n)| a.sin().powf(n as f64)),
            (inner.clone(), -1.5f64..1.5)
                .prop_map(|(a, q)| Expression::constant(1.0).add(&a.powf(2.0)).powf(q)),
            (inner.clone(), 0.5f64..3.0)
                .prop_map(|(a, q)| Expression::constant(1.2).add(&a.sin()).abs_pow(q)),
            inner.prop_map(|a| a.neg()),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

/// All exponent vectors in three variables with total degree `k`.
fn multi_indices(k: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            out.push([a, b, k - a - b]);
        }
    }
    out
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jets_agree_with_symbolic_derivatives(e in expression(), x in point()) {
        let none = Params::new();
        let jet = eval_jet(&e, &x, 4, &[0, 1, 2], &none).unwrap();
        for k in 1..=4u8 {
            for exps in multi_indices(k) {
                let mut indices = Vec::new();
                for (var, &n) in exps.iter().enumerate() {
                    indices.extend(std::iter::repeat_n(var, n as usize));
                }
                let symbolic = e.differentiate_many(&indices).eval_f64(&x, &none).unwrap();
                let from_jet = jet.partial(&exps);
                prop_assert!(rel_close(from_jet, symbolic, 1e-10),
                    "{e} at {x:?}, {exps:?}: {from_jet} vs {symbolic}");
            }
        }
        // order-0 restriction matches plain evaluation
        let plain = e.eval_f64(&x, &none).unwrap();
        prop_assert!(rel_close(jet.value(), plain, 1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_roundtrip(e in expression(), pts in prop::collection::vec(point(), 50)) {
        let back = parse(&e.to_string(), 3, &[]).unwrap();
        let none = Params::new();
        for x in &pts {
            let (a, b) = (e.eval_f64(x, &none).unwrap(), back.eval_f64(x, &none).unwrap());
            prop_assert!(rel_close(a, b, 1e-14), "{e}: {a} vs {b}");
        }
    }

    #[test]
    fn differentiation_is_linear(
        e1 in expression(),
        e2 in expression(),
        a in -3.0f64..3.0,
        x in point(),
        var in 0usize..3,
    ) {
        let none = Params::new();
        let lhs = e1.scale(a).add(&e2).differentiate(var).eval_f64(&x, &none).unwrap();
        let d1 = e1.differentiate(var).eval_f64(&x, &none).unwrap();
        let d2 = e2.differentiate(var).eval_f64(&x, &none).unwrap();
        let rhs = a * d1 + d2;
        let scale = (a * d1).abs().max(d2.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-14 * scale, "{lhs} vs {rhs}");
    }
}

/// A random SPD metric `δ_ij(1 + 0.2 x_i²) + Σ_k a_ik a_jk` with smooth `a`.
fn random_chart(coeffs: &[f64]) -> ChartMetric {
    let d = 3;
    let a = |i: usize, k: usize| {
        let c = coeffs[i * d + k];
        format!("({c}*sin(x{} + {}))", k + 1, 0.3 * i as f64)
    };
    let comps = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut s = (0..d)
                        .map(|k| format!("{}*{}", a(i, k), a(j, k)))
                        .collect::<Vec<_>>()
                        .join(" + ");
                    if i == j {
                        s = format!("1 + 0.2*x{}^2 + {s}", i + 1);
                    }
                    parse(&s, d, &[]).unwrap()
                })
                .collect()
        })
        .collect();
    ChartMetric::new(comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn levi_civita_is_metric_compatible(
        coeffs in prop::collection::vec(-0.8f64..0.8, 9),
        x in point(),
    ) {
        let chart = random_chart(&coeffs);
        let local = chart.local(&x, 1).unwrap();
        let d = 3;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut v = local.g[i][j].deriv(k).value();
                    for l in 0..d {
                        v -= local.gamma[l][k][i].value() * local.g[l][j].value()
                            + local.gamma[l][k][j].value() * local.g[i][l].value();
                    }
                    prop_assert!(v.abs() < 1e-9, "∇g = {v}");
                    prop_assert_eq!(local.gamma[k][i][j].value(), local.gamma[k][j][i].value());
                }
            }
        }
    }

    #[test]
    fn curvature_symmetries(coeffs in prop::collection::vec(-0.8f64..0.8, 9), x in point()) {
        let chart = random_chart(&coeffs);
        let r = geometry::curvature_tensor(&chart, &x).unwrap();
        let d = 3;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        prop_assert!((r.down[i][j][k][l] + r.down[j][i][k][l]).abs() < 1e-10);
                        let bianchi = r.up[l][i][j][k] + r.up[l][j][k][i] + r.up[l][k][i][j];
                        prop_assert!(bianchi.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn space_forms_have_constant_curvature(
        c in prop::sample::select(vec![-1.0, 0.5, 1.0, 2.0]),
        x in prop::collection::vec(-0.5f64..0.5, 3),
        u in prop::collection::vec(-1.0f64..1.0, 3),
        v in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let chart = space_form_chart(c, 3);
        let r = geometry::curvature_tensor(&chart, &x).unwrap();
        let g = &r.metric;
        let inner = |a: &[f64], b: &[f64]| pbh_core::linalg::inner(g, a, b);
        let area = inner(&u, &u) * inner(&v, &v) - inner(&u, &v).powi(2);
        prop_assume!(area > 1e-3);
        prop_assert!((r.sectional(&u, &v) - c).abs() < 1e-8);
        // lowered tensor has the constant-curvature form
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let want = c * (g[j][k] * g[i][l] - g[i][k] * g[j][l]);
                        prop_assert!((r.down[i][j][k][l] - want).abs() < 1e-8);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn map_invariants(which in 0usize..5, unit in prop::collection::vec(0.0f64..1.0, 3)) {
        let (name, f) = generic_maps().remove(which);
        let x: Vec<f64> = unit[..f.source_dim()].iter().map(|t| 0.2 + 0.6 * t).collect();
        let hess = mapcalc::second_fundamental_form_map(&f, &x).unwrap();
        let m = f.source_dim();
        for i in 0..m {
            for j in 0..m {
                for a in 0..f.target_dim() {
                    prop_assert!((hess[i][j][a] - hess[j][i][a]).abs() < 1e-10, "{name}");
                }
            }
        }
        let tau = mapcalc::tension(&f, &x).unwrap();
        prop_assert_eq!(&tau, &mapcalc::p_tension(&f, &x, 2.0).unwrap());
        for p in [2.0, 3.0, 4.0] {
            let s = stress::stress_tensor(&f, &x, p).unwrap();
            for i in 0..m {
                for j in 0..m {
                    prop_assert!((s.matrix[i][j] - s.matrix[j][i]).abs() < 1e-12);
                }
            }
            let check = stress::stress_divergence_check(&f, &x, p).unwrap();
            prop_assert!(check.gap < 1e-6 * check.scale.max(1.0), "{name} p={p}: {check:?}");
            let forms = stress::stress_trace_forms(&f, &x, p).unwrap();
            let scale = forms.direct.abs().max(1.0);
            prop_assert!((forms.direct - forms.pairing_form).abs() < 1e-7 * scale);
            prop_assert!((forms.direct - forms.theta_form).abs() < 1e-7 * scale);
        }
    }

    #[test]
    fn space_form_curvature_term_of_bitension(unit in prop::collection::vec(0.0f64..1.0, 2)) {
        // Into the unit sphere chart, R(X,Y)Z = ⟨Y,Z⟩X − ⟨X,Z⟩Y.
        let (_, f) = generic_maps().remove(2);
        let x: Vec<f64> = unit.iter().map(|t| 0.2 + 0.6 * t).collect();
        let local = f.local(&x, 4).unwrap();
        let parts = local.p_bitension(2.0).unwrap();
        let tau: Vec<f64> = local.tension().unwrap().iter().map(|v| v.value()).collect();
        let h: Vec<Vec<f64>> = local.h.iter().map(|r| r.iter().map(|v| v.value()).collect()).collect();
        let d: Vec<Vec<f64>> = local.dphi.iter().map(|r| r.iter().map(|v| v.value()).collect()).collect();
        let g_inv: Vec<Vec<f64>> = local.source.g_inv.iter().map(|r| r.iter().map(|v| v.value()).collect()).collect();
        let mut want = [0.0; 3];
        for i in 0..2 {
            for j in 0..2 {
                let hij = pbh_core::linalg::inner(&h, &d[i], &d[j]);
                let htj = pbh_core::linalg::inner(&h, &tau, &d[j]);
                for a in 0..3 {
                    want[a] += g_inv[i][j] * (hij * tau[a] - htj * d[i][a]);
                }
            }
        }
        for a in 0..3 {
            prop_assert!((parts.curvature[a] - want[a]).abs() < 1e-10);
            prop_assert!((parts.total[a] + parts.curvature[a] + parts.rough[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn p_harmonic_maps_have_vanishing_stress(
        p in prop::sample::select(vec![2.0, 3.0, 4.0]),
        x in prop::collection::vec(0.5f64..2.0, 3),
    ) {
        let f = inversion(3, critical_l(3, p));
        let tp = mapcalc::p_tension(&f, &x, p).unwrap();
        prop_assert!(max_abs(&tp) < 1e-12);
        let s = stress::stress_tensor(&f, &x, p).unwrap();
        prop_assert!(s.matrix.iter().flatten().all(|v| v.abs() < 1e-8));
        prop_assert!(max_abs(&mapcalc::p_bitension(&f, &x, p).unwrap()) < 1e-7);
    }
}
