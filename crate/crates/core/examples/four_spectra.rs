//! Recovers alpha and the potential from the spectra of L0, L(v), L(v + g)
//! and L(v + i g).

use cubicspec::inverse::{default_probe, reconstruct_v, recover_weights, simulate_bundle, ReconstructOptions};
use cubicspec::perturbation::spectrum_alpha;
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{Basis, Mode};
use cubicspec::C64;

fn main() -> cubicspec::Result<()> {
    let basis = Basis::new(40)?;
    let coeffs: Vec<(Mode, C64)> = [(1, 0.7, 0.1), (-1, 0.0, -0.4), (2, -0.3, 0.3), (-3, 0.2, 0.0), (5, 0.0, 0.25)]
        .iter()
        .map(|&(n, re, im)| (Mode::new(n, 1), C64::new(re, im)))
        .collect();
    let raw = Potential::from_coefficients(&coeffs, &basis)?;
    let v = raw.normalized();
    let alpha = 1.75;

    // two spectra give alpha and |v_n|^2
    let s = spectrum_alpha(&v, alpha, &basis, None)?;
    let w = recover_weights(basis.spectrum(), &s)?;
    println!("alpha_hat = {:.12} ({:?}, b = {:.6e})", w.alpha_hat, w.b.case, w.b.value);
    for (n, x) in &w.weights {
        println!("  |v_{n}|^2 = {x:.10} (true {:.10})", v.weight(*n));
    }

    // four spectra give the phases, provided no g_n vanishes
    let probe = Potential::from_fn(|x| C64::new(x * x + 0.5, x), &basis);
    let bundle = simulate_bundle(&v, alpha, &probe, &basis)?;
    let r = reconstruct_v(&bundle, &probe, &basis, ReconstructOptions::default())?;
    for (m, c) in &coeffs {
        println!("  v_{} = {:.8} recovered {:.8}", m.n, c / raw.norm(), r.v_hat.coeff(*m));
    }

    // 1 - x lies in the kernel of i y''' with these boundary conditions
    let lin = default_probe(&basis);
    let bundle = simulate_bundle(&v, alpha, &lin, &basis)?;
    match reconstruct_v(&bundle, &lin, &basis, ReconstructOptions::default()) {
        Ok(_) => println!("g = 1 - x reconstructed"),
        Err(e) => println!("g = 1 - x: {e}"),
    }
    Ok(())
}
