//! Eigenvalues and eigenfunctions of i y''' with y''(0) = 0, y'(1) = y'(0),
//! y''(1) = 0.

use std::f64::consts::PI;

use cubicspec::spectrum_l0::{eigenfunction_l0, eigs_l0, scaled_root_residual, Basis};

fn main() -> cubicspec::Result<()> {
    let spec = eigs_l0(8)?;
    println!("{:>3} {:>22} {:>24} {:>12} {:>10}", "n", "k_n", "lambda_n", "k - asym", "residual");
    for e in spec.entries.iter().filter(|e| e.n >= 0) {
        let asym = if e.n == 0 { 0.0 } else { 2.0 * PI * e.n as f64 + PI / 3.0 };
        println!("{:>3} {:>22.15} {:>24.12} {:>12.3e} {:>10.1e}", e.n, e.k, e.lambda, e.k - asym, scaled_root_residual(e.k));
    }
    println!("lambda_0 = 0 has multiplicity {}", spec.entry(0).unwrap().mult);

    let u = eigenfunction_l0(3, 1)?;
    println!("\nu_3: boundary residuals {:?}, norm {:.15}", u.bc_residuals(), u.norm_check);
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  u_3({x:.2}) = {:.8}", u.eval(x));
    }

    let basis = Basis::new(10)?;
    let g = basis.gram();
    let off = g
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, z)| if i == j { (z - 1.0).norm() } else { z.norm() }))
        .fold(0.0, f64::max);
    println!("\n{} basis functions, max |G - I| = {off:.2e}", g.len());
    Ok(())
}
