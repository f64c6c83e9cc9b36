//! Randomized check of the algebraic relations satisfied by c, s, d.
//!
//! Residuals are relative: |lhs - rhs| divided by the sum of the moduli of
//! the terms involved (plus 1), which is the rounding scale of each relation.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::trigcubic::{eval_csd, omega_pow, CsdTriple};

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub name: &'static str,
    pub max_residual: f64,
    pub tol: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tol
    }
}

/// Step used by the finite-difference derivative relations.
pub const FD_STEP: f64 = 1e-6;

fn rel(lhs: C64, rhs: C64, terms: &[C64]) -> f64 {
    (lhs - rhs).norm() / (1.0 + terms.iter().map(|t| t.norm()).sum::<f64>())
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Plain Taylor partial sums with `terms` terms.
pub fn csd_series(z: C64, terms: usize) -> CsdTriple {
    let mut out = [C64::new(0.0, 0.0); 3];
    let mut t = C64::new(1.0, 0.0);
    for k in 0..terms {
        out[k % 3] += t;
        t = t * z / (k + 1) as f64;
    }
    CsdTriple { c: out[0], s: out[1], d: out[2] }
}

/// Runs the nine relations at `samples` random points of |z| <= radius.
pub fn identity_suite(samples: usize, radius: f64, seed: u64) -> Vec<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 9];
    let mut bump = |i: usize, r: f64| worst[i] = worst[i].max(r);
    for _ in 0..samples {
        let z = random_disk(&mut rng, radius);
        let z2 = random_disk(&mut rng, radius);
        let f = eval_csd(z);
        let (c, s, d) = (f.c, f.s, f.d);

        // (1) s' = c, d' = s, c' = d
        let h = FD_STEP;
        let p = eval_csd(z + h);
        let m = eval_csd(z - h);
        let scale = 1.0 + c.norm().max(s.norm()).max(d.norm());
        let dv = |a: C64, b: C64| (a - b) / (2.0 * h);
        bump(0, (dv(p.s, m.s) - c).norm() / scale);
        bump(0, (dv(p.d, m.d) - s).norm() / scale);
        bump(0, (dv(p.c, m.c) - d).norm() / scale);

        // (2) conjugation
        let fc = eval_csd(z.conj());
        for (a, b) in [(c, fc.c), (s, fc.s), (d, fc.d)] {
            bump(1, rel(a.conj(), b, &[a]));
        }

        // (3) rotation
        let fw = eval_csd(omega_pow(1) * z);
        bump(2, rel(fw.c, c, &[c]));
        bump(2, rel(fw.s, omega_pow(1) * s, &[s]));
        bump(2, rel(fw.d, omega_pow(2) * d, &[d]));

        // (4) Euler
        for n in 1..=3 {
            let w = omega_pow(n);
            let lhs = (w * z).exp();
            bump(3, rel(lhs, c + w * s + d / w, &[c, s, d]));
        }

        // (5) main identity
        bump(4, rel(f.main_identity(), C64::new(1.0, 0.0), &[c * c * c, s * s * s, d * d * d, 3.0 * c * s * d]));

        // (6) summation
        let g = eval_csd(z2);
        let sum = eval_csd(z + z2);
        bump(5, rel(sum.c, c * g.c + s * g.d + d * g.s, &[c * g.c, s * g.d, d * g.s]));
        bump(5, rel(sum.s, c * g.s + s * g.c + d * g.d, &[c * g.s, s * g.c, d * g.d]));
        bump(5, rel(sum.d, c * g.d + s * g.s + d * g.c, &[c * g.d, s * g.s, d * g.c]));

        // (7) doubling
        let two = eval_csd(2.0 * z);
        let neg = eval_csd(-z);
        bump(6, rel(3.0 * c * c, two.c + 2.0 * neg.c, &[3.0 * c * c, two.c, 2.0 * neg.c]));
        bump(6, rel(3.0 * s * s, two.d + 2.0 * neg.d, &[3.0 * s * s, two.d, 2.0 * neg.d]));
        bump(6, rel(3.0 * d * d, two.s + 2.0 * neg.s, &[3.0 * d * d, two.s, 2.0 * neg.s]));

        // (8) reduction
        bump(7, rel(c * c - s * d, neg.c, &[c * c, s * d]));
        bump(7, rel(d * d - s * c, neg.s, &[d * d, s * c]));
        bump(7, rel(s * s - d * c, neg.d, &[s * s, d * c]));

        // (9) Taylor series
        let t = csd_series(z, 120);
        let mag = z.norm().exp();
        for (a, b) in [(c, t.c), (s, t.s), (d, t.d)] {
            bump(8, (a - b).norm() / (1.0 + mag));
        }
    }
    let names = ["derivatives", "conjugation", "rotation", "euler", "main_identity", "summation", "doubling", "reduction", "taylor"];
    names
        .iter()
        .zip(worst)
        .enumerate()
        .map(|(i, (name, r))| IdentityReport { name, max_residual: r, tol: if i == 0 { 1e-6 } else { 1e-12 } })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for r in identity_suite(200, 10.0, 1) {
            assert!(r.passed(), "{r:?}");
        }
    }
}
