//! Approximating γ₁(u)γ₂(v) on the counter-example set by an analytic patch polynomial.

use rigidity_lab::rigidity::{patch_polynomial, PatchConstants, TrigPoly};

fn main() {
    let c = PatchConstants::default();
    let pairs = [
        ("constants", TrigPoly::constant(0.25), TrigPoly::constant(0.25)),
        ("analytic", TrigPoly::monomial(1, 0.25), TrigPoly::monomial(3, 0.25)),
        ("conjugate", TrigPoly::monomial(1, 0.25), TrigPoly::monomial(-1, 0.25)),
    ];
    for (name, g1, g2) in &pairs {
        match patch_polynomial(g1, g2, 0.01, &c) {
            Ok(h) => println!("{name}: max error {:.2e} on {} points, certified {}", h.max_error, h.sample_size, h.certified),
            Err(e) => println!("{name}: {e}"),
        }
    }
}
