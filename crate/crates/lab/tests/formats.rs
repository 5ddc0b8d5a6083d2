use std::collections::BTreeMap;

use proptest::prelude::*;
use randers_core::metric::random_polynomial_metric;
use randers_core::sampling::SplitMix64;
use randers_lab::json;
use randers_lab::metric_file::{parse_metric_file, write_metric_file};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_metrics_survive_the_file_format(seed in any::<u64>(), n in 2usize..=4, x in prop::collection::vec(-0.4f64..0.4, 4)) {
        let m = random_polynomial_metric(n, &mut SplitMix64::new(seed)).unwrap();
        let back = parse_metric_file(&write_metric_file(&m), &BTreeMap::new()).unwrap();
        let x = &x[..n];
        prop_assert_eq!(m.alpha_matrix(x).unwrap(), back.alpha_matrix(x).unwrap());
        prop_assert_eq!(m.beta_vector(x).unwrap(), back.beta_vector(x).unwrap());
    }

    #[test]
    fn json_floats_round_trip(v in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20)) {
        let text = json::to_string(&v);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in v.iter().zip(&back) {
            prop_assert!(a == b);
        }
    }
}
