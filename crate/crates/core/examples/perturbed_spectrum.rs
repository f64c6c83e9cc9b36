//! Spectrum of i y''' + alpha <y, v> v: secular roots interlace the poles
//! lambda_n with v_n != 0, and the zero eigenvalue changes multiplicity.

use cubicspec::perturbation::{spectrum_alpha, SecularData, DEFAULT_ZERO_TOL};
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{Basis, Mode};
use cubicspec::C64;

fn show(label: &str, v: &Potential, alpha: f64, basis: &Basis) -> cubicspec::Result<()> {
    let s = spectrum_alpha(v, alpha, basis, None)?;
    println!("{label} (alpha = {alpha:.6}): zero has multiplicity {}", s.zero_multiplicity());
    for e in s.entries.iter().filter(|e| e.lambda.abs() < 3000.0) {
        println!("  {:>16.8} x{} {:?}", e.lambda, e.mult, e.class);
    }
    Ok(())
}

fn main() -> cubicspec::Result<()> {
    let basis = Basis::new(30)?;
    let modes = [(1, C64::new(0.6, 0.0)), (-1, C64::new(0.0, 0.3)), (2, C64::new(0.5, 0.0)), (-2, C64::new(-0.2, 0.0))];
    let coeffs: Vec<(Mode, C64)> = modes.iter().map(|&(n, c)| (Mode::new(n, 1), c)).collect();
    let v = Potential::from_coefficients(&coeffs, &basis)?.normalized();

    show("no zero mode", &v, 3.0, &basis)?;

    // alpha making Q(0) = 0 produces a triple eigenvalue at the origin
    let sd = SecularData::new(&v, 1.0, &basis, DEFAULT_ZERO_TOL);
    let g0: f64 = sd.support.iter().map(|p| p.weight / p.lambda).sum();
    show("tuned", &v, -1.0 / g0, &basis)?;

    let one = Potential::from_fn(|_| C64::new(1.0, 0.0), &basis);
    show("v = 1", &one, 2.0, &basis)?;
    Ok(())
}
