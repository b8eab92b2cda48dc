use pcmlab::consistency::{a_lti, cm_lti2, LtiOrder};
use pcmlab::prioritization::prioritize;
use pcmlab::simulation::{bin_values, RecordSet, SimulationRecord};
use pcmlab::{OptimizerSettings, Pcm, PrioritizationMethod, Reciprocity};
use proptest::prelude::*;

/// Strictly positive reciprocal matrix from raw upper-triangle draws.
fn reciprocal(n: usize, upper: &[f64]) -> Pcm {
    // Row-major index of the upper-triangle cell (i, j), i < j.
    let at = |i: usize, j: usize| i * n - i * (i + 1) / 2 + (j - i - 1);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Less => upper[at(i, j)],
                    std::cmp::Ordering::Equal => 1.0,
                    std::cmp::Ordering::Greater => 1.0 / upper[at(j, i)],
                })
                .collect()
        })
        .collect();
    Pcm::new(rows, Reciprocity::Reciprocal).unwrap()
}

fn matrix_and_permutation() -> impl Strategy<Value = (Pcm, Vec<usize>)> {
    (3usize..=6).prop_flat_map(|n| {
        let upper = proptest::collection::vec(1.0f64 / 9.0..9.0, n * (n - 1) / 2);
        let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (upper, perm).prop_map(move |(u, p)| (reciprocal(n, &u), p))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelling_alternatives_permutes_the_weights((m, perm) in matrix_and_permutation()) {
        let opt = OptimizerSettings::default();
        let p = m.permuted(&perm).unwrap();
        for method in PrioritizationMethod::ALL {
            let w = prioritize(&m, method, &opt).unwrap();
            let wp = prioritize(&p, method, &opt).unwrap();
            for (new, &old) in perm.iter().enumerate() {
                prop_assert!((wp.as_slice()[new] - w.as_slice()[old]).abs() <= 1e-7, "{method:?}");
            }
        }
    }

    #[test]
    fn relabelling_leaves_triad_measures_unchanged((m, perm) in matrix_and_permutation()) {
        let p = m.permuted(&perm).unwrap();
        let cm = cm_lti2(&m).unwrap();
        prop_assert!((cm - cm_lti2(&p).unwrap()).abs() <= 1e-12);
        prop_assert!((a_lti(&m, LtiOrder::One).unwrap() - a_lti(&p, LtiOrder::One).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..1.0).contains(&cm));
    }

    #[test]
    fn records_csv_round_trips(
        values in proptest::collection::vec((0.0f64..10.0, 0.0f64..1.0), 1..40),
    ) {
        let records = values
            .iter()
            .enumerate()
            .map(|(i, &(v, mae))| SimulationRecord {
                model_id: i / 7,
                rep_id: i % 7,
                method: PrioritizationMethod::Llsm,
                values: vec![v, v * v],
                mae,
                cell: None,
            })
            .collect();
        let set = RecordSet { measures: vec!["a".into(), "b".into()], records, excluded: 0 };
        let back = RecordSet::from_csv_str(&set.to_csv_string().unwrap()).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn quantile_bins_are_balanced(values in proptest::collection::vec(0.0f64..1.0, 150..400)) {
        let pairs: Vec<(f64, f64)> = values.iter().map(|&v| (v, v / 2.0)).collect();
        let report = bin_values("m", &pairs).unwrap();
        let total: usize = report.bins.iter().map(|b| b.count).sum();
        prop_assert_eq!(total, pairs.len());
        // Continuous draws have no ties, so each bin is within one of N/15.
        let ideal = pairs.len() as f64 / report.bins.len() as f64;
        for b in &report.bins {
            prop_assert!((b.count as f64 - ideal).abs() <= 1.0 + 1e-9, "{} vs {ideal}", b.count);
        }
    }
}
