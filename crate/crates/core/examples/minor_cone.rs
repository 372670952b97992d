//! Witnesses t₀ with ⟨t₀, g⟩ ≥ 1 on every generator, and cones that contain a line.

use rigidity_lab::rigidity::{contains_line, has_antipodal_pair, minor_cone_witness, random_cones, ConeSpec};
use rigidity_lab::SeededRng;

fn main() -> rigidity_lab::Result<()> {
    let fan = ConeSpec::new(vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]])?;
    println!("fan witness {:?}", minor_cone_witness(&fan));

    // Positively spanning without an antipodal pair.
    let tri = ConeSpec::new(vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![0.0, -1.0]])?;
    println!("triangle: witness {:?}, line {}, antipodal {}", minor_cone_witness(&tri), contains_line(&tri), has_antipodal_pair(&tri, 1e-9));

    let cones = random_cones(&mut SeededRng::new(5), 60, 4);
    let minor = cones.iter().filter(|(_, c)| minor_cone_witness(c).is_some()).count();
    println!("{minor} of {} random cones are minor", cones.len());
    Ok(())
}
