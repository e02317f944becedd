//! Built-in scenarios: the inversion map, the proper p-biharmonic cylinder
//! map and the small hyperspheres of the unit sphere.

use std::collections::BTreeMap;

use pbh_core::expr::parse;
use pbh_core::Params;

use crate::error::{Result, ScenarioError};
use crate::schema::{
    ChartSpec, Check, Exclusion, Kind, RandomSample, SampleSpec, Scenario, SweepSpec,
    DEFAULT_TOLERANCE, SCHEMA,
};

pub struct BuiltinInfo {
    pub syntax: &'static str,
    pub summary: &'static str,
}

pub const BUILTINS: [BuiltinInfo; 3] = [
    BuiltinInfo {
        syntax: "inversion(n)",
        summary: "x -> x/|x|^l on R^n minus a ball; p-harmonic iff l = (n+p-2)/(p-1)",
    },
    BuiltinInfo {
        syntax: "proper_pbh_cylinder",
        summary: "(x1,x2,x3) -> (|(x1,x2)|, x3) with conformal source metric; proper p-biharmonic",
    },
    BuiltinInfo {
        syntax: "small_hypersphere(m, a)",
        summary: "S^m(a) in S^(m+1), 0 < a < 1; p-biharmonic iff p = 1/(1-a^2)",
    },
];

fn squares(n: usize) -> String {
    (1..=n)
        .map(|i| format!("x{i}^2"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Resolves `inversion(n)`, `proper_pbh_cylinder` or `small_hypersphere(m, a)`.
/// Numeric arguments may be constant expressions such as `1/sqrt(2)`.
pub fn builtin(name: &str) -> Result<Scenario> {
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let (head, args) = match compact.split_once('(') {
        Some((h, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| ScenarioError::UnknownBuiltin(name.to_string()))?;
            (
                h.to_string(),
                inner.split(',').map(str::to_string).collect::<Vec<_>>(),
            )
        }
        None => (compact.clone(), vec![]),
    };
    let bad = |message: String| ScenarioError::BuiltinParams {
        name: name.to_string(),
        message,
    };
    let number = |text: &str| -> Result<f64> {
        if let Ok(v) = text.parse::<f64>() {
            return Ok(v);
        }
        parse(text, 1, &[])
            .and_then(|e| match e.max_coord() {
                None => e.eval_f64(&[0.0], &Params::new()),
                Some(_) => Err(pbh_core::Error::Precondition(
                    "coordinates are not allowed".into(),
                )),
            })
            .map_err(|e| bad(format!("`{text}` is not a number: {e}")))
    };
    let dimension = |text: &str| -> Result<usize> {
        let v = number(text)?;
        if v.fract() != 0.0 || v < 1.0 || v > pbh_core::jet::MAX_VARS as f64 {
            return Err(bad(format!(
                "dimension must be an integer in 1..={}",
                pbh_core::jet::MAX_VARS
            )));
        }
        Ok(v as usize)
    };
    match (head.as_str(), args.as_slice()) {
        ("inversion", []) => Ok(inversion(3)),
        ("inversion", [n]) => Ok(inversion(dimension(n)?)),
        ("proper_pbh_cylinder", []) => Ok(proper_pbh_cylinder()),
        ("small_hypersphere", [m, a]) => {
            let m = dimension(m)?;
            if m + 1 > pbh_core::jet::MAX_VARS {
                return Err(bad("the ambient sphere is too large".into()));
            }
            let a = number(a)?;
            if !(a > 0.0 && a < 1.0) {
                return Err(bad(format!("radius a must lie in (0, 1), got {a}")));
            }
            Ok(small_hypersphere(m, a))
        }
        ("inversion" | "proper_pbh_cylinder" | "small_hypersphere", _) => {
            Err(bad("wrong number of arguments".into()))
        }
        _ => Err(ScenarioError::UnknownBuiltin(name.to_string())),
    }
}

/// `x ↦ x/|x|^l` on `R^n`, with `p = 3` and `l` at its critical value.
pub fn inversion(n: usize) -> Scenario {
    let r2 = squares(n);
    let p = 3.0;
    let l = (n as f64 + p - 2.0) / (p - 1.0);
    Scenario {
        schema: SCHEMA.into(),
        name: format!("inversion({n})"),
        kind: Kind::Map,
        source: ChartSpec::Euclidean { dim: n },
        target: ChartSpec::Euclidean { dim: n },
        components: (1..=n).map(|i| format!("x{i}/({r2})^(l/2)")).collect(),
        params: BTreeMap::from([("l".into(), l), ("p".into(), p)]),
        sweep: Some(SweepSpec {
            param: "l".into(),
            from: 1.5,
            to: 3.0,
            steps: 31,
        }),
        sample: SampleSpec {
            bounds: vec![[0.5, 2.0]; n],
            points_per_axis: None,
            random: Some(RandomSample {
                count: 10,
                seed: 11,
            }),
            exclude: vec![Exclusion {
                expr: format!("sqrt({r2})"),
                below: 0.1,
            }],
        },
        checks: vec![
            Check::PHarmonic,
            Check::PBiharmonic,
            Check::StressDivergence,
            Check::TraceIdentity,
        ],
        tolerance: DEFAULT_TOLERANCE,
    }
}

/// `(x1, x2, x3) ↦ (|(x1, x2)|, x3)` from `R²∖{0} × R` with metric
/// `(x1² + x2²)^(−1/p) δ` into the Euclidean plane.
pub fn proper_pbh_cylinder() -> Scenario {
    Scenario {
        schema: SCHEMA.into(),
        name: "proper_pbh_cylinder".into(),
        kind: Kind::Map,
        source: ChartSpec::Conformal {
            dim: 3,
            factor: "(x1^2 + x2^2)^(-1/p)".into(),
        },
        target: ChartSpec::Euclidean { dim: 2 },
        components: vec!["sqrt(x1^2 + x2^2)".into(), "x3".into()],
        params: BTreeMap::from([("p".into(), 3.0)]),
        sweep: Some(SweepSpec {
            param: "p".into(),
            from: 2.0,
            to: 4.0,
            steps: 5,
        }),
        sample: SampleSpec {
            bounds: vec![[0.5, 2.0]; 3],
            points_per_axis: None,
            random: Some(RandomSample {
                count: 10,
                seed: 12,
            }),
            exclude: vec![Exclusion {
                expr: "sqrt(x1^2 + x2^2)".into(),
                below: 0.1,
            }],
        },
        checks: vec![
            Check::PBiharmonic,
            Check::StressDivergence,
            Check::TraceIdentity,
            Check::EnergyQuadrature,
        ],
        tolerance: DEFAULT_TOLERANCE,
    }
}

/// `S^m(a) ⊂ S^{m+1}` in the stereographic chart of the unit sphere,
/// parametrized by stereographic coordinates of the unit `m`-sphere, with
/// `p = 1/b²`, `b² = 1 − a²`.
pub fn small_hypersphere(m: usize, a: f64) -> Scenario {
    let k = "(2*a/(1 - sqrt(1 - a^2)))";
    let s = format!("(({})/4)", squares(m));
    let mut components: Vec<String> = (1..=m).map(|i| format!("{k}*x{i}/(1 + {s})")).collect();
    components.push(format!("{k}*({s} - 1)/(1 + {s})"));
    let mut p = 1.0 / (1.0 - a * a);
    if (p - p.round()).abs() < 1e-12 {
        p = p.round();
    }
    Scenario {
        schema: SCHEMA.into(),
        name: format!("small_hypersphere({m}, {a})"),
        kind: Kind::Immersion,
        source: ChartSpec::Induced { dim: m },
        target: ChartSpec::SpaceForm { dim: m + 1, c: 1.0 },
        components,
        params: BTreeMap::from([("a".into(), a), ("p".into(), p)]),
        sweep: Some(SweepSpec {
            param: "p".into(),
            from: 2.0,
            to: 6.0,
            steps: 41,
        }),
        sample: SampleSpec {
            bounds: vec![[-1.0, 1.0]; m],
            points_per_axis: None,
            random: Some(RandomSample { count: 5, seed: 13 }),
            exclude: vec![],
        },
        checks: vec![
            Check::Theorem21,
            Check::Theorem23,
            Check::CmcProperP,
            Check::PBiharmonic,
        ],
        tolerance: DEFAULT_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(builtin("inversion(3)").unwrap().components.len(), 3);
        assert_eq!(builtin("inversion").unwrap().name, "inversion(3)");
        assert!(builtin("small_hypersphere(2, 1/sqrt(2))").is_ok());
        assert!(builtin("proper_pbh_cylinder").is_ok());
    }

    #[test]
    fn rejects_bad_names() {
        assert!(matches!(
            builtin("torus"),
            Err(ScenarioError::UnknownBuiltin(_))
        ));
        assert!(matches!(
            builtin("small_hypersphere(2, 1.2)"),
            Err(ScenarioError::BuiltinParams { .. })
        ));
        assert!(matches!(
            builtin("inversion(2.5)"),
            Err(ScenarioError::BuiltinParams { .. })
        ));
        assert!(builtin("inversion(3").is_err());
    }

    #[test]
    fn builtins_validate() {
        for s in [
            inversion(2),
            inversion(3),
            proper_pbh_cylinder(),
            small_hypersphere(3, 0.5),
        ] {
            s.validate().unwrap();
            let back = Scenario::from_json(&s.to_json()).unwrap();
            assert_eq!(back, s);
        }
    }
}
