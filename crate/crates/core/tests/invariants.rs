use proptest::prelude::*;
use rigidity_lab::cli::{ExperimentConfig, ExperimentKind};
use rigidity_lab::predictor::{orthant_errors, IndexSet};
use rigidity_lab::rigidity::{contains_line, jensen_zero_density, minor_cone_witness, ConeSpec, PeriodicPattern, ValueSet};
use rigidity_lab::spectral::{variance_of_statistic, Atom, DomainTag, LinearFunctional, SpectralMeasure};
use rigidity_lab::QuadratureSpec;
use std::f64::consts::PI;

fn atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-PI..PI, 0.05f64..2.0), 1..25)
}

fn circle(atoms: &[(f64, f64)], f: impl Fn(f64) -> f64) -> SpectralMeasure {
    SpectralMeasure::atomic(DomainTag::discrete(1), atoms.iter().map(|&(x, w)| Atom(vec![x], f(x) * w)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn en_is_nonincreasing_and_below_mass(a in atoms()) {
        let s = circle(&a, |_| 1.0);
        let ns: Vec<usize> = (1..=12).collect();
        let e = orthant_errors(&s, &ns, &IndexSet::positive(1)).unwrap();
        let mass: f64 = a.iter().map(|p| p.1).sum();
        prop_assert!(e[0] <= mass * (1.0 + 1e-9));
        for w in e.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10 * mass);
        }
        prop_assert!(e.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn smaller_measure_has_smaller_error(a in atoms(), c in 0.5f64..3.0, phase in 0.0..PI, n in 1usize..15) {
        let f = |x: f64| c * (0.5 + 0.5 * (x + phase).cos().powi(2));
        let set = IndexSet::positive(1);
        let e_s = orthant_errors(&circle(&a, |_| 1.0), &[n], &set).unwrap()[0];
        let e_fs = orthant_errors(&circle(&a, f), &[n], &set).unwrap()[0];
        prop_assert!(e_fs <= c * e_s + 1e-12);
    }

    #[test]
    fn mirrored_orthant_on_mirrored_measure(a in atoms(), n in 1usize..10) {
        let s = circle(&a, |_| 1.0);
        let mirrored: Vec<(f64, f64)> = a.iter().map(|&(x, w)| (-x, w)).collect();
        let m = circle(&mirrored, |_| 1.0);
        let e1 = orthant_errors(&s, &[n], &IndexSet::positive(1)).unwrap()[0];
        let e2 = orthant_errors(&m, &[n], &IndexSet::Orthant { signs: vec![-1] }).unwrap()[0];
        prop_assert!((e1 - e2).abs() <= 1e-9 * (1.0 + e1));
    }

    #[test]
    fn plancherel_for_cells(x in -5.0f64..5.0, side in 0.05f64..3.0) {
        let line = DomainTag::continuous(1);
        let v = variance_of_statistic(&LinearFunctional::cell(line, vec![x], side), &SpectralMeasure::lebesgue(line, 1.0), &QuadratureSpec::default()).unwrap();
        prop_assert!((v - side).abs() < 1e-6);
    }

    #[test]
    fn cosine_zero_count(a in 0.3f64..4.0) {
        let t_max = 50.0;
        let z = jensen_zero_density(&|x: f64| (a * x).cos(), "cos", t_max, 0.05).unwrap();
        // zeros (k + 1/2)π/a with |.| ≤ T
        let expected = 2.0 * ((a * t_max / PI) + 0.5).floor();
        prop_assert_eq!(z.zeros.len() as f64, expected);
    }

    #[test]
    fn witness_iff_pointed(gens in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 3..8), scale in 0.1f64..10.0) {
        if let Ok(c) = ConeSpec::new(gens.clone()) {
            let w = minor_cone_witness(&c);
            prop_assert_eq!(w.is_some(), !contains_line(&c));
            if let Some(t) = &w {
                for g in &c.generators {
                    prop_assert!(g.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() >= 1.0 - 1e-7);
                }
            }
            let scaled = ConeSpec::new(gens.iter().map(|g| g.iter().map(|x| x * scale).collect()).collect()).unwrap();
            prop_assert_eq!(minor_cone_witness(&scaled).is_some(), w.is_some());
        }
    }

    #[test]
    fn rounding_picks_a_nearest_value(vals in prop::collection::vec(-20i64..20, 1..6), z in -25.0f64..25.0) {
        let u = ValueSet::new(vals.clone()).unwrap();
        let (v, res) = u.round(z);
        let best = vals.iter().map(|&w| (z - w as f64).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(vals.contains(&v));
        prop_assert!(((z - v as f64).abs() - best).abs() < 1e-12);
        prop_assert!((res - best).abs() < 1e-12);
    }

    #[test]
    fn pattern_spectrum_has_parseval_mass(values in prop::collection::vec(-3i64..4, 6)) {
        let p = PeriodicPattern::new(vec![6], values.clone()).unwrap();
        let mass: f64 = p.spectral_measure().atoms.iter().map(|a| a.1).sum();
        let mean_sq = values.iter().map(|&v| (v * v) as f64).sum::<f64>() / 6.0;
        prop_assert!((mass - 2.0 * PI * mean_sq).abs() < 1e-9 * (1.0 + mass));
        let period = p.minimal_period()[0];
        prop_assert_eq!(6 % period, 0);
    }

    #[test]
    fn config_roundtrip(k in 0usize..11, seed in any::<u64>(), parallel in any::<bool>()) {
        let mut c = ExperimentConfig::default_for(ExperimentKind::ALL[k]);
        c.seed = seed;
        c.parallel = parallel;
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
