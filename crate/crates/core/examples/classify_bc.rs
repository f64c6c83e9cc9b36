//! Multiplicity regimes for cos g y(0) - i sin g y''(0) = 0,
//! y'(1) = e^{i phi} y'(0), cos b y(1) - i sin b y''(1) = 0.

use std::f64::consts::PI;

use cubicspec::bc::{classify_bc, multiplicity_at, scan_roots, BoundaryParams};

fn main() {
    let cases = [
        BoundaryParams::special(),
        BoundaryParams::new(0.0, 0.0, PI),
        BoundaryParams::new(PI / 2.0, PI / 2.0, PI),
        BoundaryParams::new(0.4, 1.1, 2.0),
    ];
    for p in cases {
        let v = classify_bc(p, 1e-10);
        println!("gamma = {:.4}, beta = {:.4}, phi = {:.4}: {:?} (criterion {:.3e})", p.gamma, p.beta, p.phi, v.regime, v.criterion);
        for l in scan_roots(p, 4.0 * PI, 400, 1e-8) {
            let m = multiplicity_at(p, l, 1e-6).unwrap_or(0);
            print!(" {l:.4}{}", if m > 1 { format!(" (x{m})") } else { String::new() });
        }
        println!();
    }
}
