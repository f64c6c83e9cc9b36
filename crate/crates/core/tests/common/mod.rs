#![allow(dead_code)]

use cubicspec::perturbation::SecularData;
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{Basis, Mode};
use cubicspec::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn finite(coeffs: &[((i64, u8), C64)], basis: &Basis) -> Potential {
    let modes: Vec<(Mode, C64)> = coeffs.iter().map(|&((n, b), v)| (Mode::new(n, b), v)).collect();
    Potential::from_coefficients(&modes, basis).unwrap().normalized()
}

/// 0 belongs to sigma_1: both zero-mode branches present.
pub fn zero_in_sigma1(basis: &Basis) -> Potential {
    finite(
        &[
            ((0, 1), c(0.5, 0.0)),
            ((0, 2), c(0.0, 0.3)),
            ((1, 1), c(0.4, 0.0)),
            ((-1, 1), c(0.3, 0.2)),
            ((2, 1), c(-0.3, 0.0)),
            ((-3, 1), c(0.0, 0.2)),
        ],
        basis,
    )
}

/// No zero mode, so 0 stays in sigma_0.
pub fn zero_in_sigma0(basis: &Basis) -> Potential {
    finite(&[((1, 1), c(0.6, 0.0)), ((-1, 1), c(0.0, 0.3)), ((2, 1), c(0.5, 0.0)), ((-2, 1), c(-0.2, 0.0)), ((3, 1), c(0.0, 0.4))], basis)
}

/// alpha making Q(0) = 1 + alpha sum |v_n|^2 / lambda_n vanish.
pub fn tuned_alpha(v: &Potential, basis: &Basis) -> f64 {
    let sd = SecularData::new(v, 1.0, basis, 1e-9);
    let s: f64 = sd.support.iter().map(|p| p.weight / p.lambda).sum();
    -1.0 / s
}

/// Random unit potential on 1 <= |n| <= n_sup (v_0 = 0) and a coupling in
/// +-[0.5, 3].
pub fn random_case(seed: u64, n_sup: i64, basis: &Basis) -> (Potential, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = Vec::new();
    for n in -n_sup..=n_sup {
        if n != 0 {
            coeffs.push(((n, 1u8), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        }
    }
    let alpha = rng.random_range(0.5..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    (finite(&coeffs, basis), alpha)
}

/// A probe with no vanishing coefficients (unlike 1 - x).
pub fn rich_probe(basis: &Basis) -> Potential {
    Potential::from_fn(|x| c(x * x + 0.5, x), basis)
}

/// Coefficient-space distance, optionally skipping n = 0.
pub fn coeff_distance(a: &Potential, b: &Potential, basis: &Basis, skip_zero: bool) -> f64 {
    basis.modes().iter().filter(|m| !(skip_zero && m.n == 0)).map(|m| (a.coeff(*m) - b.coeff(*m)).norm_sqr()).sum::<f64>().sqrt()
}
