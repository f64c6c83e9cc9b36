//! Resolvents of the unperturbed and rank-one perturbed operators, checked
//! against a finite-difference defect.

use cubicspec::grid::{third_order_defect, GridFunction};
use cubicspec::perturbation::{rank_one_term, resolvent_alpha};
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{resolvent_l0, Basis, ResolventMethod};
use cubicspec::C64;

fn main() -> cubicspec::Result<()> {
    let f = GridFunction::uniform(2049, |x| C64::new((3.0 * x).sin(), x * x));
    let lam = C64::new(0.0, 1.0);

    let a = resolvent_l0(&f, lam, ResolventMethod::ClosedForm)?;
    let b = resolvent_l0(&f, lam, ResolventMethod::SpectralSeries { depth: 60 })?;
    println!("closed form vs series: {:.2e}", a.l2_distance(&b));
    println!("defect of closed form: {:.2e}", third_order_defect(&a, &f, lam, None) / f.l2_norm());

    let basis = Basis::new(20)?;
    let v = Potential::from_fn(|x| C64::new(1.0 - 2.0 * x * x, x), &basis).normalized();
    for alpha in [0.5, 5.0, -20.0] {
        let y = resolvent_alpha(&v, alpha, &f, lam)?;
        let extra = rank_one_term(&v, alpha, &y)?;
        println!(
            "alpha = {alpha:>5}: |y| = {:.6}, defect {:.2e}",
            y.l2_norm(),
            third_order_defect(&y, &f, lam, Some(&extra)) / f.l2_norm()
        );
    }

    match resolvent_l0(&f, C64::new(0.0, 0.0), ResolventMethod::ClosedForm) {
        Err(e) => println!("at lambda = 0: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
