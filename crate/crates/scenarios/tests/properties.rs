use pbh_scenarios::report::{ResidualReport, Row, Verdict};
use pbh_scenarios::run::box_points;
use pbh_scenarios::schema::{Check, RandomSample, SampleSpec, SweepSpec};
use pbh_scenarios::{builtin, Scenario};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn row(check: Check, residual: Option<f64>, pass: bool) -> Row {
    Row {
        scenario: "s".into(),
        check,
        p: 2.0,
        params: BTreeMap::new(),
        point: vec![0.0],
        residual_norm: residual,
        value: None,
        pass,
        error: None,
        singular: false,
    }
}

proptest! {
    #[test]
    fn verdict_is_conjunction_of_rows(
        rows in prop::collection::vec((0usize..8, prop::option::of(0.0f64..1.0), any::<bool>()), 1..30)
    ) {
        let rows: Vec<Row> = rows.into_iter().map(|(c, r, pass)| row(Check::ALL[c], r, pass)).collect();
        let all = rows.iter().all(|r| r.pass);
        let report = ResidualReport::new("s", 1e-7, rows.clone());
        prop_assert_eq!(report.verdict == Verdict::Pass, all);
        for s in &report.summary {
            let mine: Vec<&Row> = rows.iter().filter(|r| r.check == s.check).collect();
            prop_assert_eq!(s.evaluations, mine.len());
            prop_assert_eq!(s.failures, mine.iter().filter(|r| !r.pass).count());
            let max = mine.iter().filter_map(|r| r.residual_norm).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            prop_assert_eq!(s.max_residual, max);
        }
    }

    #[test]
    fn sample_points_stay_in_the_box(
        bounds in prop::collection::vec((-5.0f64..5.0, 0.01f64..3.0), 1..4),
        count in 1usize..20,
        seed in any::<u64>(),
        per_axis in 1usize..4,
    ) {
        let bounds: Vec<[f64; 2]> = bounds.iter().map(|(lo, w)| [*lo, lo + w]).collect();
        let random = SampleSpec { bounds: bounds.clone(), points_per_axis: None, random: Some(RandomSample { count, seed }), exclude: vec![] };
        let grid = SampleSpec { bounds: bounds.clone(), points_per_axis: Some(per_axis), random: None, exclude: vec![] };
        let a = box_points(&random);
        prop_assert_eq!(a.len(), count);
        prop_assert_eq!(&a, &box_points(&random));
        let g = box_points(&grid);
        prop_assert_eq!(g.len(), per_axis.pow(bounds.len() as u32));
        for x in a.iter().chain(&g) {
            for (v, [lo, hi]) in x.iter().zip(&bounds) {
                prop_assert!(lo <= v && v <= hi);
            }
        }
    }

    #[test]
    fn sweep_values_hit_both_ends(from in -10.0f64..10.0, width in 0.1f64..10.0, steps in 2usize..60) {
        let s = SweepSpec { param: "p".into(), from, to: from + width, steps };
        let v = s.values();
        prop_assert_eq!(v.len(), steps);
        prop_assert_eq!(v[0], from);
        prop_assert_eq!(v[steps - 1], from + width);
        prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    /// Corrupting any byte of a valid scenario never panics.
    #[test]
    fn malformed_files_are_rejected_cleanly(pos in any::<prop::sample::Index>(), byte in any::<u8>()) {
        let mut text = builtin("small_hypersphere(2, 0.8)").unwrap().to_json().into_bytes();
        let i = pos.index(text.len());
        text[i] = byte;
        if let Ok(t) = String::from_utf8(text) {
            let _ = Scenario::from_json(&t);
        }
    }

    #[test]
    fn json_round_trip(a in 0.05f64..0.95, m in 1usize..4) {
        let s = builtin(&format!("small_hypersphere({m}, {a})")).unwrap();
        prop_assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }
}
