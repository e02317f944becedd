#![allow(dead_code)]

use pbh_core::expr::parse;
use pbh_core::geometry::{space_form_chart, ChartMetric};
use pbh_core::submanifold::{small_hypersphere_components, Immersion};
use pbh_core::{Expression, Params, SmoothMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn exprs(texts: &[&str], dim: usize) -> Vec<Expression> {
    texts.iter().map(|s| parse(s, dim, &[]).unwrap()).collect()
}

pub fn map(source: ChartMetric, target: ChartMetric, comps: &[&str]) -> SmoothMap {
    let m = source.dim();
    SmoothMap::new(source, target, exprs(comps, m), &Params::new()).unwrap()
}

pub fn conformal(dim: usize, factor: &str) -> ChartMetric {
    ChartMetric::conformal(dim, parse(factor, dim, &[]).unwrap())
}

pub fn inversion(n: usize, l: f64) -> SmoothMap {
    let r2 = (1..=n)
        .map(|i| format!("x{i}^2"))
        .collect::<Vec<_>>()
        .join("+");
    let comps: Vec<Expression> = (1..=n)
        .map(|i| parse(&format!("x{i}/({r2})^(l/2)"), n, &["l"]).unwrap())
        .collect();
    SmoothMap::new(
        ChartMetric::euclidean(n),
        ChartMetric::euclidean(n),
        comps,
        &Params::new().with("l", l),
    )
    .unwrap()
}

pub fn critical_l(n: usize, p: f64) -> f64 {
    (n as f64 + p - 2.0) / (p - 1.0)
}

pub fn cylinder(p: f64) -> SmoothMap {
    let g = ChartMetric::conformal(3, parse("(x1^2+x2^2)^(-1/p)", 3, &["p"]).unwrap());
    SmoothMap::new(
        g,
        ChartMetric::euclidean(2),
        exprs(&["sqrt(x1^2+x2^2)", "x3"], 3),
        &Params::new().with("p", p),
    )
    .unwrap()
}

/// Generic maps with nonvanishing differential on `[0.2, 0.8]^m`.
pub fn generic_maps() -> Vec<(&'static str, SmoothMap)> {
    vec![
        (
            "cubic",
            map(
                ChartMetric::euclidean(2),
                ChartMetric::euclidean(2),
                &[
                    "x1 + 0.3*x2^2 - 0.1*x1^3 + 0.2*x1*x2",
                    "x2 + 0.2*x1*x2^2 - 0.15*x1^2",
                ],
            ),
        ),
        (
            "curved_source",
            map(
                conformal(2, "exp(0.3*x1 - 0.2*x2)"),
                ChartMetric::euclidean(3),
                &["x1*x2", "sin(x1) + x2", "x1 - 0.5*x2^2"],
            ),
        ),
        (
            "into_sphere",
            map(
                ChartMetric::euclidean(2),
                space_form_chart(1.0, 3),
                &["0.5*x1 + 0.1*x2^2", "0.4*x2 - 0.2*x1*x2", "0.3*x1^2"],
            ),
        ),
        (
            "hyperbolic_to_hyperbolic",
            map(
                space_form_chart(-1.0, 2),
                space_form_chart(-1.0, 2),
                &["0.6*x1 + 0.2*x2^2", "0.5*x2 + 0.1*x1^3"],
            ),
        ),
        (
            "dim3_to_dim2",
            map(
                conformal(3, "1 + 0.2*x3^2"),
                space_form_chart(0.5, 2),
                &["x1 + 0.2*x2*x3", "x2 - 0.1*x1^2 + 0.3*x3"],
            ),
        ),
    ]
}

pub fn graph_surfaces() -> Vec<(&'static str, Immersion)> {
    let imm =
        |comps: &[&str], c: f64| Immersion::new(exprs(comps, 2), 2, c, &Params::new()).unwrap();
    vec![
        (
            "graph_flat",
            imm(&["x1", "x2", "0.3*x1^2 - 0.2*x2^2 + 0.1*x1*x2"], 0.0),
        ),
        (
            "graph_sphere",
            imm(&["x1", "x2", "0.2*sin(x1) + 0.1*x2^2"], 1.0),
        ),
        (
            "graph_hyperbolic",
            imm(&["x1", "x2", "0.3*x1*x2 + 0.1*x1^2"], -1.0),
        ),
        (
            "codim2_flat",
            imm(&["x1", "x2", "0.2*x1^2", "0.3*x1*x2"], 0.0),
        ),
    ]
}

pub fn small_hypersphere(m: usize, a: f64) -> Immersion {
    Immersion::new(
        small_hypersphere_components(m, a).unwrap(),
        m,
        1.0,
        &Params::new(),
    )
    .unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
