//! General separated boundary conditions
//! cos g y(0) - i sin g y''(0) = 0, y'(1) = e^{i phi} y'(0), cos b y(1) - i sin b y''(1) = 0
//! and the multiplicity of eigenvalues of i y''' under them.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trigcubic::{eval_solutions, exponents, SolutionTriple};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// |cos gamma| below this selects the M2 (and M3 at the origin) branch.
pub const COS_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub gamma: f64,
    pub beta: f64,
    pub phi: f64,
}

impl BoundaryParams {
    pub fn new(gamma: f64, beta: f64, phi: f64) -> Self {
        BoundaryParams { gamma, beta, phi }
    }

    /// The point giving y''(0) = 0, y'(1) = y'(0), y''(1) = 0.
    pub fn special() -> Self {
        let h = std::f64::consts::FRAC_PI_2;
        BoundaryParams::new(h, h, 0.0)
    }

    /// cos^2 gamma + cos^2 beta + (e^{i phi} - 1)^2
    pub fn criterion(&self) -> C64 {
        let e = C64::from_polar(1.0, self.phi) - 1.0;
        C64::new(self.gamma.cos().powi(2) + self.beta.cos().powi(2), 0.0) + e * e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AllSimple,
    DoubleZeroAtOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicityVerdict {
    pub regime: Regime,
    pub criterion: C64,
}

pub fn classify_bc(p: BoundaryParams, tol: f64) -> MultiplicityVerdict {
    let criterion = p.criterion();
    let regime = if criterion.norm() <= tol { Regime::DoubleZeroAtOrigin } else { Regime::AllSimple };
    MultiplicityVerdict { regime, criterion }
}

/// Serialized verdict: criterion as [re, im].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictReport {
    pub gamma: f64,
    pub beta: f64,
    pub phi: f64,
    pub criterion: [f64; 2],
    pub regime: Regime,
}

impl VerdictReport {
    pub fn new(p: BoundaryParams, v: &MultiplicityVerdict) -> Self {
        VerdictReport { gamma: p.gamma, beta: p.beta, phi: p.phi, criterion: [v.criterion.re, v.criterion.im], regime: v.regime }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    M1,
    M2,
    M3,
}

struct AtOne {
    y: SolutionTriple,
    d1: SolutionTriple,
    d2: SolutionTriple,
}

impl AtOne {
    fn new(lambda: C64) -> Self {
        let y = eval_solutions(1.0, lambda);
        let d1 = y.derivative(lambda);
        let d2 = d1.derivative(lambda);
        AtOne { y, d1, d2 }
    }

    /// cos b y_m(1) - i sin b y_m''(1) for m = 1, 2, 3
    fn right(&self, beta: f64) -> [C64; 3] {
        let (s, c) = beta.sin_cos();
        let y = self.y.as_array();
        let d2 = self.d2.as_array();
        [0, 1, 2].map(|m| c * y[m] - I * s * d2[m])
    }

    fn scale(&self) -> f64 {
        [self.y, self.d1, self.d2].iter().flat_map(|t| t.as_array()).map(|z| z.norm()).fold(1.0, f64::max)
    }
}

/// The 2x2 coefficient matrix whose determinant vanishes at eigenvalues.
pub fn coefficient_matrix(p: BoundaryParams, lambda: C64) -> (MatrixKind, Matrix2<C64>) {
    let e = C64::from_polar(1.0, p.phi);
    let cg = p.gamma.cos();
    if cg.abs() <= COS_ZERO && lambda == C64::new(0.0, 0.0) {
        // y = a x^2 + b x + c with a = 0 forced by y''(0) = 0; columns (b, c)
        let cb = C64::new(p.beta.cos(), 0.0);
        return (MatrixKind::M3, Matrix2::new(1.0 - e, C64::new(0.0, 0.0), cb, cb));
    }
    let a = AtOne::new(lambda);
    let r = a.right(p.beta);
    if cg.abs() > COS_ZERO {
        let t = p.gamma.tan();
        let m = Matrix2::new(a.d1.y2 - e, I * t * a.d1.y1 + a.d1.y3, r[1], I * t * r[0] + r[2]);
        (MatrixKind::M1, m)
    } else {
        (MatrixKind::M2, Matrix2::new(a.d1.y1, a.d1.y2 - e, r[0], r[1]))
    }
}

/// det M1 (cos gamma != 0) or det M2 (cos gamma = 0).
pub fn char_det_general(p: BoundaryParams, lambda: C64) -> C64 {
    let (_, m) = coefficient_matrix(p, lambda);
    m.determinant()
}

/// Matrix continuous in gamma: the c3 column of M1 times cos gamma, so
/// the kernel is parametrized by c1 = i sin g t, c3 = cos g t. Same rank as
/// M1 or M2.
fn unified_matrix(p: BoundaryParams, lambda: C64) -> (Matrix2<C64>, f64) {
    let a = AtOne::new(lambda);
    let r = a.right(p.beta);
    let (s, c) = p.gamma.sin_cos();
    let e = C64::from_polar(1.0, p.phi);
    let m = Matrix2::new(a.d1.y2 - e, I * s * a.d1.y1 + c * a.d1.y3, r[1], I * s * r[0] + c * r[2]);
    (m, a.scale())
}

/// Determinant of the unified matrix times e^{-S} / max(1, |k|^4), with
/// S the largest growth rate of the solutions; zeros are those of
/// `char_det_general`.
pub fn scaled_det(p: BoundaryParams, lambda: f64) -> C64 {
    let l = C64::new(lambda, 0.0);
    let (m, _) = unified_matrix(p, l);
    let s = exponents(l).iter().map(|r| r.re.abs()).fold(0.0, f64::max);
    m.determinant() * (-s).exp() / lambda.abs().powf(4.0 / 3.0).max(1.0)
}

/// 2 - numerical rank of the coefficient matrix at a root lambda.
pub fn multiplicity_at(p: BoundaryParams, lambda: f64, tol: f64) -> Result<u32> {
    let origin = p.gamma.cos().abs() <= COS_ZERO && lambda == 0.0;
    let det = if origin { char_det_general(p, C64::new(0.0, 0.0)) } else { scaled_det(p, lambda) };
    if det.norm() > tol {
        return Err(Error::NotARoot { lambda });
    }
    let (m, scale) = if origin { (coefficient_matrix(p, C64::new(0.0, 0.0)).1, 1.0) } else { unified_matrix(p, C64::new(lambda, 0.0)) };
    let sv = m.singular_values();
    let cut = tol * sv.max().max(scale);
    let rank = sv.iter().filter(|&&s| s > cut).count() as u32;
    Ok(2 - rank)
}

/// Real eigenvalues in (-k_max^3, k_max^3): sign changes of the scaled
/// determinant after removing its best constant phase, plus local minima of
/// its modulus below `tol`. lambda = 0 is always probed.
pub fn scan_roots(p: BoundaryParams, k_max: f64, steps: usize, tol: f64) -> Vec<f64> {
    let lam = |k: f64| k * k * k;
    let ks: Vec<f64> = (0..=steps).map(|j| -k_max + 2.0 * k_max * j as f64 / steps as f64).collect();
    let ds: Vec<C64> = ks.iter().map(|&k| scaled_det(p, lam(k))).collect();
    let theta = ds.iter().map(|d| d * d).sum::<C64>().arg() / 2.0;
    let rot = C64::from_polar(1.0, -theta);
    let f = |k: f64| (rot * scaled_det(p, lam(k))).re;
    let mut roots: Vec<f64> = Vec::new();
    let push = |k: f64, roots: &mut Vec<f64>| {
        if scaled_det(p, lam(k)).norm() <= 1e3 * tol && roots.iter().all(|&r| (r - k).abs() > 1e-9) {
            roots.push(k);
        }
    };
    for j in 0..steps {
        let (mut a, mut b) = (ks[j], ks[j + 1]);
        let (mut fa, fb) = ((rot * ds[j]).re, (rot * ds[j + 1]).re);
        if fa == 0.0 {
            push(a, &mut roots);
            continue;
        }
        if fa * fb < 0.0 {
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 || m == a || m == b {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            push(0.5 * (a + b), &mut roots);
        }
    }
    // touching zeros (no sign change)
    for j in 1..steps {
        let (l, c, r) = (ds[j - 1].norm(), ds[j].norm(), ds[j + 1].norm());
        if c <= l && c <= r {
            let (mut a, mut b) = (ks[j - 1], ks[j + 1]);
            for _ in 0..100 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if scaled_det(p, lam(m1)).norm() < scaled_det(p, lam(m2)).norm() {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let k = 0.5 * (a + b);
            if scaled_det(p, lam(k)).norm() <= tol {
                push(k, &mut roots);
            }
        }
    }
    if scaled_det(p, 0.0).norm() <= tol {
        roots.retain(|&k| k.abs() > 1e-3);
        roots.push(0.0);
    }
    let mut out: Vec<f64> = roots.into_iter().map(lam).collect();
    out.sort_by(f64::total_cmp);
    out
}
