//! Recovering the period of an integer-valued field from a central seed cube.

use rigidity_lab::rigidity::{detect_period, PeriodicPattern, ValueSet};
use rigidity_lab::SeededRng;

fn main() -> rigidity_lab::Result<()> {
    let pattern = PeriodicPattern::new(vec![3, 5], vec![0, 2, 1, 1, 0, 0, 2, 1, 0, 0, 1, 2, 1, 1, 0])?;
    let s = pattern.spectral_measure();
    let u = ValueSet::new(vec![0, 1, 2])?;
    for seed in 0..3 {
        let window = pattern.sample(40, &mut SeededRng::new(seed));
        let r = detect_period(&window, &u, &s, 12)?;
        println!(
            "seed {seed}: period {:?}, failures {}, verified radius {}, predictor order {} error {:.1e}",
            r.period, r.propagation_failures, r.verified_radius, r.predictor_order, r.predictor_error
        );
    }
    Ok(())
}
