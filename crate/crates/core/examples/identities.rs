//! Evaluates c, s, d at a few points and runs the randomized identity suite.

use cubicspec::identities::identity_suite;
use cubicspec::trigcubic::{eval_csd, eval_solutions};
use cubicspec::C64;

fn main() {
    for z in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-3.0, 2.5)] {
        let t = eval_csd(z);
        println!(
            "z = {z:>10}: c = {:.10}, s = {:.10}, d = {:.10}, c^3+s^3+d^3-3csd = {:.3e}",
            t.c,
            t.s,
            t.d,
            (t.main_identity() - 1.0).norm()
        );
    }

    let y = eval_solutions(1.0, C64::new(1.0, 0.0));
    println!("y(1, 1) = ({:.12}, {:.12}, {:.12})", y.y1, y.y2, y.y3);

    println!();
    for r in identity_suite(200, 10.0, 1) {
        println!("{:<14} max residual {:.2e} (tol {:.0e})", r.name, r.max_residual, r.tol);
    }
}
