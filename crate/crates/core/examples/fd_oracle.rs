//! Finite-difference cross-check of the secular eigenvalues under grid
//! refinement.

use cubicspec::oracle::{compare_spectra, discretize};
use cubicspec::perturbation::spectrum_alpha;
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::Basis;
use cubicspec::C64;

fn main() -> cubicspec::Result<()> {
    let basis = Basis::new(40)?;
    let v = Potential::from_fn(|x| C64::new((2.0 * x).cos(), 0.5 - x), &basis).normalized();
    let alpha = 3.0;
    let spec = spectrum_alpha(&v, alpha, &basis, None)?;

    let mut prev: Option<f64> = None;
    for m in [256, 512, 1024, 2048] {
        let rows = compare_spectra(&spec, &discretize(&v, alpha, m)?, 6)?;
        let worst = rows.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
        let order = prev.map(|p| format!("{:.2}", (p / worst).log2())).unwrap_or_default();
        println!("M = {m:>4}: max relative difference {worst:.3e} {order}");
        prev = Some(worst);
        if m == 2048 {
            for r in rows {
                println!("  {:>14.6} {:>14.6} {:.2e}", r.secular, r.oracle, r.rel_diff);
            }
        }
    }
    Ok(())
}
