//! Principal-branch Lambert W on a few points, with residuals.

use crnoma::subproblem::{lambert_w0, w0_plus_one};

fn main() {
    let z_min = -1.0 / std::f64::consts::E;
    for z in [z_min, z_min + 1e-9, -0.2, 0.0, 1.0, std::f64::consts::E, 10.0, 1e6] {
        let w = lambert_w0(z).expect("z >= -1/e");
        let residual = (w * w.exp() - z).abs() / z.abs().max(1.0);
        println!("W0({z:>14.9}) = {w:>12.9}   scaled residual {residual:.1e}");
    }
    // the shifted form keeps precision when its argument is tiny
    for kappa in [1e-300, 1e-12, 1e-3] {
        println!("1 + W0((k-1)/e) at k = {kappa:e}: {:e}", w0_plus_one(kappa).unwrap());
    }
}
