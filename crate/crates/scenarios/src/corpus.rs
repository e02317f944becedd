//! Fixed collections of maps and immersions used by the acceptance suite.

use pbh_core::expr::parse;
use pbh_core::geometry::{space_form_chart, ChartMetric};
use pbh_core::submanifold::Immersion;
use pbh_core::{Expression, Params, SmoothMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builtins;

pub struct CorpusMap {
    pub name: String,
    pub map: SmoothMap,
    pub bounds: Vec<(f64, f64)>,
}

pub struct CorpusImmersion {
    pub name: String,
    pub immersion: Immersion,
    pub bounds: Vec<(f64, f64)>,
}

fn exprs(texts: &[&str], dim: usize) -> Vec<Expression> {
    texts
        .iter()
        .map(|t| parse(t, dim, &[]).expect("corpus expression parses"))
        .collect()
}

fn map(
    name: &str,
    source: ChartMetric,
    target: ChartMetric,
    comps: &[&str],
    bounds: Vec<(f64, f64)>,
) -> CorpusMap {
    let m = source.dim();
    CorpusMap {
        name: name.into(),
        map: SmoothMap::new(source, target, exprs(comps, m), &Params::new()).expect("corpus map"),
        bounds,
    }
}

fn conformal(dim: usize, factor: &str) -> ChartMetric {
    ChartMetric::conformal(dim, parse(factor, dim, &[]).expect("corpus factor parses"))
}

/// Components `x_i + Σ c·(monomial of degree 2 or 3)` with seeded
/// coefficients in `[−0.2, 0.2]`.
pub fn random_cubic_components(seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monomials = [
        "x1^2", "x1*x2", "x2^2", "x1^3", "x1^2*x2", "x1*x2^2", "x2^3",
    ];
    (1..=2)
        .map(|i| {
            let mut s = format!("x{i}");
            for mono in monomials {
                let c: f64 = rng.gen_range(-0.2..0.2);
                s.push_str(&format!(" + ({c})*{mono}"));
            }
            s
        })
        .collect()
}

/// Maps with nowhere vanishing differential on their boxes, including a
/// random cubic between Euclidean planes.
pub fn maps() -> Vec<CorpusMap> {
    let unit = vec![(0.2, 0.8); 2];
    let cubic = random_cubic_components(2024);
    let cubic: Vec<&str> = cubic.iter().map(String::as_str).collect();
    let mut out = vec![
        map(
            "random_cubic",
            ChartMetric::euclidean(2),
            ChartMetric::euclidean(2),
            &cubic,
            unit.clone(),
        ),
        map(
            "curved_source",
            conformal(2, "exp(0.3*x1 - 0.2*x2)"),
            ChartMetric::euclidean(3),
            &["x1*x2", "sin(x1) + x2", "x1 - 0.5*x2^2"],
            unit.clone(),
        ),
        map(
            "into_sphere",
            ChartMetric::euclidean(2),
            space_form_chart(1.0, 3),
            &["0.5*x1 + 0.1*x2^2", "0.4*x2 - 0.2*x1*x2", "0.3*x1^2"],
            unit.clone(),
        ),
        map(
            "hyperbolic_to_hyperbolic",
            space_form_chart(-1.0, 2),
            space_form_chart(-1.0, 2),
            &["0.6*x1 + 0.2*x2^2", "0.5*x2 + 0.1*x1^3"],
            unit.clone(),
        ),
        map(
            "dim3_to_dim2",
            conformal(3, "1 + 0.2*x3^2"),
            space_form_chart(0.5, 2),
            &["x1 + 0.2*x2*x3", "x2 - 0.1*x1^2 + 0.3*x3"],
            vec![(0.2, 0.8); 3],
        ),
    ];
    for (name, scenario, params) in [
        (
            "proper_pbh_cylinder",
            builtins::proper_pbh_cylinder(),
            Params::new().with("p", 3.0),
        ),
        (
            "inversion",
            builtins::inversion(3),
            Params::new().with("p", 3.0).with("l", 2.0),
        ),
    ] {
        let subject = scenario
            .prepare()
            .and_then(|p| p.instantiate(&params))
            .expect("built-in instantiates");
        out.push(CorpusMap {
            name: name.into(),
            map: subject.map().clone(),
            bounds: vec![(0.5, 2.0); 3],
        });
    }
    out
}

fn graph(name: &str, comps: &[&str], c: f64) -> CorpusImmersion {
    CorpusImmersion {
        name: name.into(),
        immersion: Immersion::new(exprs(comps, 2), 2, c, &Params::new()).expect("corpus immersion"),
        bounds: vec![(0.2, 0.8); 2],
    }
}

/// Immersions into space forms: graphs with nonconstant mean curvature, a
/// codimension-two surface and small hyperspheres of the unit sphere.
pub fn immersions() -> Vec<CorpusImmersion> {
    let mut out = vec![
        graph(
            "graph_flat",
            &["x1", "x2", "0.3*x1^2 - 0.2*x2^2 + 0.1*x1*x2"],
            0.0,
        ),
        graph("graph_sphere", &["x1", "x2", "0.2*sin(x1) + 0.1*x2^2"], 1.0),
        graph(
            "graph_hyperbolic",
            &["x1", "x2", "0.3*x1*x2 + 0.1*x1^2"],
            -1.0,
        ),
        graph("codim2_flat", &["x1", "x2", "0.2*x1^2", "0.3*x1*x2"], 0.0),
    ];
    for (m, a) in [(2, 0.6), (2, std::f64::consts::FRAC_1_SQRT_2), (3, 0.8)] {
        out.push(CorpusImmersion {
            name: format!("small_hypersphere({m}, {a})"),
            immersion: small_hypersphere(m, a),
            bounds: vec![(-1.0, 1.0); m],
        });
    }
    out
}

/// The small hypersphere `S^m(a) ⊂ S^{m+1}` as built by the scenario engine.
pub fn small_hypersphere(m: usize, a: f64) -> Immersion {
    let scenario = builtins::small_hypersphere(m, a);
    let subject = scenario
        .prepare()
        .and_then(|p| p.instantiate(&Params::new().with("a", a).with("p", 2.0)))
        .expect("built-in instantiates");
    subject.immersion().expect("immersion scenario").clone()
}

/// `count` seeded uniform points of a box.
pub fn points(bounds: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            bounds
                .iter()
                .map(|(lo, hi)| rng.gen_range(*lo..*hi))
                .collect()
        })
        .collect()
}
