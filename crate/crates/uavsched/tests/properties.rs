use proptest::prelude::*;
use uavsched::bench::loglog_slope;
use uavsched::io::{read_scenario, scenario_hash, to_json, write_scenario, ScenarioFile};
use uavsched::sweep::alpha_grid;
use uavsched_core::gen::tiny::{tiny, TinySpec};
use uavsched_core::gen::{generate, GenParams};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scenario_files_round_trip_byte_for_byte(seed in 0u64..10_000, small in any::<bool>()) {
        let s = if small {
            generate(&GenParams::small(), seed).unwrap()
        } else {
            tiny(seed, TinySpec::default())
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let file = ScenarioFile::new(s.clone());
        write_scenario(&path, &file).unwrap();
        let back = read_scenario(&path).unwrap();
        prop_assert_eq!(scenario_hash(&back.scenario), scenario_hash(&s));
        prop_assert_eq!(to_json(&back), std::fs::read_to_string(&path).unwrap());
    }

    #[test]
    fn alpha_grid_is_the_full_simplex_lattice(missions in 1usize..4, n in 1usize..11) {
        let step = 1.0 / n as f64;
        let g = alpha_grid(missions, step).unwrap();
        prop_assert_eq!(g.len(), binomial(n + missions, missions));
        for a in &g {
            prop_assert_eq!(a.len(), missions);
            prop_assert!(a.iter().sum::<f64>() <= 1.0 + 1e-9);
            for &x in a {
                let k = x * n as f64;
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
        }
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn slope_recovers_power_law_exponent(c in 1e-6f64..1e3, p in 0.1f64..3.0) {
        let pts: Vec<(f64, f64)> = [5.0f64, 10.0, 20.0, 40.0].iter().map(|&x| (x, c * x.powf(p))).collect();
        prop_assert!((loglog_slope(&pts).unwrap() - p).abs() < 1e-9);
    }
}
