//! Characteristic function, eigenvalues, eigenfunctions and resolvent of the
//! unperturbed operator `L0 y = i y'''` with `y''(0) = 0`, `y'(1) = y'(0)`,
//! `y''(1) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quadrature::Quadrature;
use crate::trigcubic::{eval_solutions, exponents, OMEGA};

const SQRT3: f64 = 1.732_050_807_568_877_2;
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Taylor coefficients of Delta(0, .) in powers of lambda: 2 (-1)^n / (6n-2)!
/// at lambda^{2n}, zero at odd powers.
pub fn delta0_taylor(q: usize) -> f64 {
    if q == 0 || q % 2 == 1 {
        return 0.0;
    }
    let n = q / 2;
    let mut fact = 1.0;
    for j in 2..=(6 * n - 2) {
        fact *= j as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    2.0 * sign / fact
}

/// Returns (Delta(0, lambda) * e^{-S}, S) with S the largest |Re r_j|; the
/// scaled value never overflows.
pub fn delta0_scaled(lambda: C64) -> (C64, f64) {
    let k = lambda.norm().cbrt();
    if k < 2.0 {
        let mut acc = C64::new(0.0, 0.0);
        let l2 = lambda * lambda;
        let mut pw = l2;
        for n in 1..12 {
            acc += pw * delta0_taylor(2 * n);
            pw *= l2;
        }
        return (acc, 0.0);
    }
    let r = exponents(lambda);
    let s = r.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    // -i lambda [y2(-1) + y2(1)] = -(i lambda / 3) sum (e^{r} + e^{-r}) / r
    let mut acc = C64::new(0.0, 0.0);
    for rj in r {
        acc += ((rj - s).exp() + (-rj - s).exp()) / rj;
    }
    (-I * lambda * acc / 3.0, s)
}

/// Delta(0, lambda) = det M(0, lambda) = -i lambda [y2(-1, lambda) + y2(1, lambda)].
pub fn delta0(lambda: C64) -> C64 {
    let (v, s) = delta0_scaled(lambda);
    v * s.exp()
}

/// Real-k form -(2/3) k^2 [cos(k/2)(cos(k/2) - cosh b) - sin(k/2)(sin(k/2) - sqrt3 sinh b)],
/// b = sqrt3 k / 2, scaled by e^{-|b|}. Returns (scaled value, |b|).
pub fn delta0_real_k_scaled(k: f64) -> (f64, f64) {
    let b = 0.5 * SQRT3 * k;
    let a = b.abs();
    let ea = (-a).exp();
    let e2 = (-2.0 * a).exp();
    let ch = 0.5 * (1.0 + e2);
    let sh = 0.5 * (1.0 - e2) * b.signum();
    let (s, c) = (0.5 * k).sin_cos();
    let v = -(2.0 / 3.0) * k * k * (c * (c * ea - ch) - s * (s * ea - SQRT3 * sh));
    (v, a)
}

/// f(k) = (cos(k/2) - cosh b) / (sin(k/2) - sqrt3 sinh b), overflow safe.
fn f_ratio(k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    if k.abs() < 1e-2 {
        let (num, den) = small_k_parts(k);
        return num / den;
    }
    let b = 0.5 * SQRT3 * k;
    let a = b.abs();
    let ea = (-a).exp();
    let e2 = (-2.0 * a).exp();
    let (s, c) = (0.5 * k).sin_cos();
    let num = c * ea - 0.5 * (1.0 + e2);
    let den = s * ea - SQRT3 * 0.5 * (1.0 - e2) * b.signum();
    num / den
}

fn small_k_parts(k: f64) -> (f64, f64) {
    // cos(k/2) - cosh b and sin(k/2) - sqrt3 sinh b to the first three orders
    let k2 = k * k;
    let num = k2 * (-0.5 + k2 * (-1.0 / 48.0 - k2 * 28.0 / 46080.0));
    let den = k * (-1.0 + k2 * (-10.0 / 48.0 - k2 * 26.0 / 3840.0));
    (num, den)
}

/// Residual f(k) - tan(k/2) of the bracketing equation.
pub fn bracket_secular(k: f64) -> Result<f64> {
    if (0.5 * k).cos().abs() < 1e-14 {
        return Err(Error::PoleAtK { k });
    }
    Ok(f_ratio(k) - (0.5 * k).tan())
}

/// f(k) - 1/sqrt3 for k > 0, computed without cancellation.
fn f_minus_limit(k: f64) -> f64 {
    let b = 0.5 * SQRT3 * k;
    let ea = (-b).exp();
    let e2 = (-2.0 * b).exp();
    let (s, c) = (0.5 * k).sin_cos();
    // [sqrt3 cos - sin - sqrt3 e^{-b}] / (sqrt3 (sin - sqrt3 sinh b)), times e^{-b}/e^{-b}
    let num = ea * (SQRT3 * c - s - SQRT3 * ea);
    let den = SQRT3 * (s * ea - SQRT3 * 0.5 * (1.0 - e2));
    num / den
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, n: i64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { n });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// A positive root k_n (n >= 1) together with its offset k_n - 2 pi n - pi/3,
/// the latter resolved to full relative precision.
fn positive_root(n: i64) -> Result<(f64, f64)> {
    let lo = (2 * n - 1) as f64 * PI;
    let hi = (2 * n + 1) as f64 * PI;
    let eps = 1e-12 * hi;
    let g = |k: f64| bracket_secular(k).unwrap_or_else(|_| if k < 0.5 * (lo + hi) { 1e300 } else { -1e300 });
    let k0 = bisect(g, lo + eps, hi - eps, n)?;
    let base = 2.0 * PI * n as f64 + PI / 3.0;
    // the root solves tan(pi/6 + delta/2) = 1/sqrt3 + eps(k); iterate on delta
    let mut delta = k0 - base;
    for _ in 0..100 {
        let e = f_minus_limit(base + delta);
        let next = 2.0 * (e / (4.0 / 3.0 + e / SQRT3)).atan();
        let done = (next - delta).abs() <= 1e-16 * next.abs();
        delta = next;
        if done {
            break;
        }
    }
    let k = base + delta;
    if !(k > lo && k < hi) {
        return Err(Error::BracketFailure { n });
    }
    Ok((k, delta))
}

/// k_n = lambda_n^{1/3} (real cube root) for any index; k_0 = 0.
pub fn k_root(n: i64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let (k, _) = positive_root(n.abs())?;
    Ok(k * n.signum() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub n: i64,
    pub k: f64,
    pub lambda: f64,
    pub mult: u32,
    /// k - 2 pi n - (pi/3) sgn n, resolved beyond the precision of k itself
    #[serde(skip)]
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumL0 {
    pub operator: String,
    pub entries: Vec<SpectrumEntry>,
    /// max over n of |Delta(0, lambda_n)| e^{-sqrt3 |k_n| / 2} / max(1, k_n^4)
    pub residual: f64,
}

impl SpectrumL0 {
    pub fn n_max(&self) -> i64 {
        self.entries.iter().map(|e| e.n).max().unwrap_or(0)
    }

    pub fn entry(&self, n: i64) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn lambda(&self, n: i64) -> Option<f64> {
        self.entry(n).map(|e| e.lambda)
    }

    /// Eigenvalue list with multiplicity expanded (0 appears twice).
    pub fn values_with_multiplicity(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.mult {
                out.push(e.lambda);
            }
        }
        out
    }
}

/// Scaled residual |Delta(0, k^3)| e^{-sqrt3 |k|/2} / max(1, k^4).
pub fn scaled_root_residual(k: f64) -> f64 {
    let (v, _) = delta0_real_k_scaled(k);
    v.abs() / k.powi(4).max(1.0)
}

/// Eigenvalues for n in [-n_max, n_max].
pub fn eigs_l0(n_max: usize) -> Result<SpectrumL0> {
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let pos: Vec<(f64, f64)> = (1..=n_max as i64).into_par_iter().map(positive_root).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(2 * n_max + 1);
    for n in (1..=n_max).rev() {
        let (k, d) = pos[n - 1];
        entries.push(SpectrumEntry { n: -(n as i64), k: -k, lambda: -k * k * k, mult: 1, offset: -d });
    }
    entries.push(SpectrumEntry { n: 0, k: 0.0, lambda: 0.0, mult: 2, offset: 0.0 });
    for n in 1..=n_max {
        let (k, d) = pos[n - 1];
        entries.push(SpectrumEntry { n: n as i64, k, lambda: k * k * k, mult: 1, offset: d });
    }
    let residual = pos.iter().map(|&(k, _)| scaled_root_residual(k)).fold(0.0, f64::max);
    Ok(SpectrumL0 { operator: "L0".into(), entries, residual })
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Constant,
    /// sqrt3 i (2x - 1)
    Linear,
    /// sum_j coef_j e^{r_j (x - anchor_j)}
    Exponential {
        r: [C64; 3],
        anchor: [f64; 3],
        coef: [C64; 3],
    },
}

/// A normalized eigenfunction u_n^i of L0.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionL0 {
    pub n: i64,
    pub branch: u8,
    pub lambda: f64,
    /// quadrature L2 norm after normalization
    pub norm_check: f64,
    shape: Shape,
}

impl EigenfunctionL0 {
    pub fn eval(&self, x: f64) -> C64 {
        self.deriv(x, 0)
    }

    /// `order`-th derivative at x.
    pub fn deriv(&self, x: f64, order: u32) -> C64 {
        match &self.shape {
            Shape::Constant => {
                if order == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Shape::Linear => match order {
                0 => I * SQRT3 * (2.0 * x - 1.0),
                1 => I * 2.0 * SQRT3,
                _ => C64::new(0.0, 0.0),
            },
            Shape::Exponential { r, anchor, coef } => (0..3).map(|j| coef[j] * r[j].powu(order) * (r[j] * (x - anchor[j])).exp()).sum(),
        }
    }

    /// Residuals of y''(0) = 0, y'(1) - y'(0) = 0, y''(1) = 0.
    pub fn bc_residuals(&self) -> [f64; 3] {
        [self.deriv(0.0, 2).norm(), (self.deriv(1.0, 1) - self.deriv(0.0, 1)).norm(), self.deriv(1.0, 2).norm()]
    }
}

fn cross(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn exponential_eigenfunction(n: i64, k: f64, quad: &Quadrature) -> EigenfunctionL0 {
    let r = [I * k, I * k * OMEGA, I * k * OMEGA.conj()];
    let anchor = r.map(|z| if z.re > 0.0 { 1.0 } else { 0.0 });
    let mut rows = [[C64::new(0.0, 0.0); 3]; 3];
    for j in 0..3 {
        let at0 = (-r[j] * anchor[j]).exp();
        let at1 = (r[j] * (1.0 - anchor[j])).exp();
        rows[0][j] = r[j] * r[j] * at0;
        rows[1][j] = r[j] * (at1 - at0);
        rows[2][j] = r[j] * r[j] * at1;
    }
    for row in rows.iter_mut() {
        let m = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            row.iter_mut().for_each(|z| *z /= m);
        }
    }
    let cands = [cross(&rows[0], &rows[1]), cross(&rows[0], &rows[2]), cross(&rows[1], &rows[2])];
    let mut coef = cands
        .into_iter()
        .max_by(|a, b| {
            let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            na.total_cmp(&nb)
        })
        .unwrap();
    let mut u = EigenfunctionL0 { n, branch: 1, lambda: k * k * k, norm_check: 0.0, shape: Shape::Exponential { r, anchor, coef } };
    // phase: u(0) carries the argument of y3(1, lambda_n), as y3(1) y1 - y2(1) y2 does
    let smax = r.iter().map(|z| z.re).fold(0.0, f64::max);
    let y3_1: C64 = r.iter().map(|&z| (z - smax).exp() / (3.0 * z * z)).sum();
    let u0 = u.eval(0.0);
    let rot = if u0.norm() > 0.0 && y3_1.norm() > 0.0 { (y3_1 / y3_1.norm()) / (u0 / u0.norm()) } else { C64::new(1.0, 0.0) };
    let nrm = quad.integrate_real(|x| u.eval(x).norm_sqr()).sqrt();
    coef.iter_mut().for_each(|c| *c = *c * rot / nrm);
    u.shape = Shape::Exponential { r, anchor, coef };
    u.norm_check = quad.integrate_real(|x| u.eval(x).norm_sqr()).sqrt();
    u
}

fn eigenfunction_from_k(n: i64, branch: u8, k: f64, quad: &Quadrature) -> Result<EigenfunctionL0> {
    match (n, branch) {
        (0, 1) => Ok(EigenfunctionL0 { n, branch, lambda: 0.0, norm_check: 1.0, shape: Shape::Constant }),
        (0, 2) => {
            let mut u = EigenfunctionL0 { n, branch, lambda: 0.0, norm_check: 0.0, shape: Shape::Linear };
            u.norm_check = quad.integrate_real(|x| u.eval(x).norm_sqr()).sqrt();
            Ok(u)
        }
        (_, 1) => Ok(exponential_eigenfunction(n, k, quad)),
        _ => Err(Error::InvalidBranch { n, branch }),
    }
}

/// Normalized eigenfunction u_n^i (branch 2 exists only for n = 0).
pub fn eigenfunction_l0(n: i64, branch: u8) -> Result<EigenfunctionL0> {
    if !(branch == 1 || (branch == 2 && n == 0)) {
        return Err(Error::InvalidBranch { n, branch });
    }
    let k = k_root(n)?;
    eigenfunction_from_k(n, branch, k, &Quadrature::default())
}

/// Index of a basis function: (n, branch).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub n: i64,
    pub branch: u8,
}

impl Mode {
    pub const fn new(n: i64, branch: u8) -> Self {
        Mode { n, branch }
    }
}

/// Eigenbasis {u_n^i : |n| <= n_max} with samples cached on a quadrature grid.
#[derive(Debug, Clone)]
pub struct Basis {
    spectrum: SpectrumL0,
    modes: Vec<Mode>,
    functions: Vec<EigenfunctionL0>,
    quad: Quadrature,
    samples: Vec<Vec<C64>>,
}

impl Basis {
    pub fn new(n_max: usize) -> Result<Self> {
        Basis::with_quadrature(n_max, Quadrature::default())
    }

    pub fn with_quadrature(n_max: usize, quad: Quadrature) -> Result<Self> {
        let spectrum = eigs_l0(n_max)?;
        let mut modes = Vec::new();
        for e in &spectrum.entries {
            modes.push(Mode::new(e.n, 1));
            if e.n == 0 {
                modes.push(Mode::new(0, 2));
            }
        }
        let functions: Vec<EigenfunctionL0> =
            modes.par_iter().map(|m| eigenfunction_from_k(m.n, m.branch, spectrum.entry(m.n).unwrap().k, &quad)).collect::<Result<_>>()?;
        let samples = functions.par_iter().map(|u| quad.nodes().iter().map(|&x| u.eval(x)).collect()).collect();
        Ok(Basis { spectrum, modes, functions, quad, samples })
    }

    pub fn n_max(&self) -> usize {
        self.spectrum.n_max() as usize
    }

    pub fn spectrum(&self) -> &SpectrumL0 {
        &self.spectrum
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn function(&self, m: Mode) -> Option<&EigenfunctionL0> {
        self.modes.iter().position(|&q| q == m).map(|i| &self.functions[i])
    }

    pub fn functions(&self) -> impl Iterator<Item = (Mode, &EigenfunctionL0)> {
        self.modes.iter().copied().zip(self.functions.iter())
    }

    pub fn lambda(&self, n: i64) -> f64 {
        self.spectrum.lambda(n).unwrap_or(f64::NAN)
    }

    /// Cached samples of u_m at the quadrature nodes.
    pub fn samples(&self, m: Mode) -> Option<&[C64]> {
        self.modes.iter().position(|&q| q == m).map(|i| self.samples[i].as_slice())
    }

    /// Coefficients <f, u_m> from samples of f at the quadrature nodes.
    pub fn project_samples(&self, vals: &[C64]) -> Vec<(Mode, C64)> {
        let w = self.quad.weights();
        self.modes
            .iter()
            .zip(&self.samples)
            .map(|(&m, us)| {
                let c: C64 = vals.iter().zip(us).zip(w).map(|((f, u), w)| f * u.conj() * *w).sum();
                (m, c)
            })
            .collect()
    }

    pub fn project<F: Fn(f64) -> C64>(&self, f: F) -> Vec<(Mode, C64)> {
        let vals: Vec<C64> = self.quad.nodes().iter().map(|&x| f(x)).collect();
        self.project_samples(&vals)
    }

    /// Gram matrix <u_a, u_b> under the cached quadrature.
    pub fn gram(&self) -> Vec<Vec<C64>> {
        let w = self.quad.weights();
        self.samples
            .iter()
            .map(|a| self.samples.iter().map(|b| a.iter().zip(b).zip(w).map(|((x, y), w)| x * y.conj() * *w).sum()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolventMethod {
    ClosedForm,
    /// eigenfunction expansion truncated at |n| <= depth
    SpectralSeries {
        depth: usize,
    },
}

fn on_spectrum_check(lambda: C64, n_max: usize) -> Result<()> {
    let tol = 1e-8 * (1.0 + lambda.norm());
    if lambda.norm() < tol {
        return Err(Error::LambdaOnSpectrum { re: lambda.re, im: lambda.im });
    }
    if lambda.im.abs() < tol {
        let k = lambda.re.cbrt();
        let n0 = ((k.abs() - PI / 3.0) / (2.0 * PI)).round() as i64;
        for n in (n0 - 1).max(1)..=(n0 + 1).min(n_max as i64 + 2) {
            let kn = k_root(n)? * lambda.re.signum();
            if (kn * kn * kn - lambda.re).abs() < tol {
                return Err(Error::LambdaOnSpectrum { re: lambda.re, im: lambda.im });
            }
        }
    }
    Ok(())
}

// 3-point Gauss rule on [0, 1]
const G3: [(f64, f64); 3] = [(0.112_701_665_379_258_31, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.887_298_334_620_741_7, 5.0 / 18.0)];

fn closed_form(f: &GridFunction, lambda: C64) -> GridFunction {
    let xs = &f.xs;
    let n = xs.len();
    let y_at = |x: f64| eval_solutions(x, lambda);
    // particular part p(x) = -i int_0^x y3(x - t) f(t) dt and its derivatives
    let k = lambda.norm().cbrt();
    let mut p = vec![[C64::new(0.0, 0.0); 3]; n]; // (p, p', p'') with kernels y3, y2, y1
                                                  // the separable form cancels growing against decaying exponentials and
                                                  // loses about e^{sqrt3 k} in relative accuracy
    if k <= 3.0 {
        // separable: y_m(x - t) via the summation formulas
        // y3(x-t) = y1(x) y3(-t) + y2(x) y2(-t) + y3(x) y1(-t)
        // y2(x-t) = y1(x) y2(-t) + y2(x) y1(-t) - i lambda y3(x) y3(-t)
        // y1(x-t) = y1(x) y1(-t) - i lambda [y2(x) y3(-t) + y3(x) y2(-t)]
        let mut acc = [C64::new(0.0, 0.0); 3]; // int y1(-t) f, y2(-t) f, y3(-t) f
        for j in 0..n {
            if j > 0 {
                let (a, b) = (xs[j - 1], xs[j]);
                for (g, w) in G3 {
                    let t = a + (b - a) * g;
                    let ym = y_at(-t);
                    let ft = f.interpolate(t) * (w * (b - a));
                    acc[0] += ym.y1 * ft;
                    acc[1] += ym.y2 * ft;
                    acc[2] += ym.y3 * ft;
                }
            }
            let yx = y_at(xs[j]);
            let li = -I * lambda;
            let k3 = yx.y1 * acc[2] + yx.y2 * acc[1] + yx.y3 * acc[0];
            let k2 = yx.y1 * acc[1] + yx.y2 * acc[0] + li * yx.y3 * acc[2];
            let k1 = yx.y1 * acc[0] + li * (yx.y2 * acc[2] + yx.y3 * acc[1]);
            p[j] = [-I * k3, -I * k2, -I * k1];
        }
    } else {
        for j in 0..n {
            let x = xs[j];
            let mut acc = [C64::new(0.0, 0.0); 3];
            for i in 1..=j {
                let (a, b) = (xs[i - 1], xs[i]);
                for (g, w) in G3 {
                    let t = a + (b - a) * g;
                    let ym = y_at(x - t);
                    let ft = f.interpolate(t) * (w * (b - a));
                    acc[0] += ym.y3 * ft;
                    acc[1] += ym.y2 * ft;
                    acc[2] += ym.y1 * ft;
                }
            }
            p[j] = [-I * acc[0], -I * acc[1], -I * acc[2]];
        }
    }
    // boundary system for y = c1 y1 + c2 y2 + p (y''(0) = 0 forces c3 = 0)
    let y1 = y_at(1.0);
    let d1 = y1.derivative(lambda);
    let d2 = d1.derivative(lambda);
    let m = [[d1.y1, d1.y2 - 1.0], [d2.y1, d2.y2]];
    let rhs = [-p[n - 1][1], -p[n - 1][2]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let c1 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    let c2 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
    let values = xs
        .iter()
        .zip(&p)
        .map(|(&x, pj)| {
            let y = y_at(x);
            c1 * y.y1 + c2 * y.y2 + pj[0]
        })
        .collect();
    GridFunction { xs: xs.clone(), values }
}

fn spectral_series(f: &GridFunction, lambda: C64, basis: &Basis) -> GridFunction {
    let coeffs = basis.project(|x| f.interpolate(x));
    let values =
        f.xs.iter()
            .map(|&x| {
                coeffs
                    .iter()
                    .map(|(m, c)| {
                        let u = basis.function(*m).unwrap();
                        c * u.eval(x) / (u.lambda - lambda)
                    })
                    .sum()
            })
            .collect();
    GridFunction { xs: f.xs.clone(), values }
}

/// (L0 - lambda)^{-1} f on the grid of `f`.
pub fn resolvent_l0(f: &GridFunction, lambda: C64, method: ResolventMethod) -> Result<GridFunction> {
    match method {
        ResolventMethod::ClosedForm => {
            on_spectrum_check(lambda, 64)?;
            Ok(closed_form(f, lambda))
        }
        ResolventMethod::SpectralSeries { depth } => {
            on_spectrum_check(lambda, depth)?;
            let basis = Basis::new(depth.max(1))?;
            Ok(spectral_series(f, lambda, &basis))
        }
    }
}

/// Spectral-series resolvent with a prebuilt basis.
pub fn resolvent_l0_series(f: &GridFunction, lambda: C64, basis: &Basis) -> Result<GridFunction> {
    on_spectrum_check(lambda, basis.n_max())?;
    Ok(spectral_series(f, lambda, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::third_order_defect;

    #[test]
    fn taylor_coefficients() {
        assert!((delta0_taylor(2) + 1.0 / 12.0).abs() < 1e-17);
        assert!((delta0_taylor(4) - 2.0 / 3_628_800.0).abs() < 1e-20);
        assert_eq!(delta0_taylor(3), 0.0);
    }

    #[test]
    fn delta_forms_agree() {
        for k in [0.5f64, 1.9, 2.1, 5.0, 7.3, 13.0, -9.0] {
            let lam = C64::new(k * k * k, 0.0);
            let (a, s) = delta0_scaled(lam);
            let (b, t) = delta0_real_k_scaled(k);
            let a = a * (s - t).exp();
            assert!((a.re - b).abs() <= 1e-11 * (1.0 + b.abs()), "k={k}: {a} vs {b}");
            assert!(a.im.abs() <= 1e-11 * (1.0 + b.abs()));
        }
        let small = C64::new(1e-3, 0.0);
        assert!((delta0(small) / (small * small) + 1.0 / 12.0).norm() < 1e-12);
    }

    #[test]
    fn det_m_matches() {
        let lam = C64::new(37.0, 11.0);
        let y = eval_solutions(1.0, lam);
        let d1 = y.derivative(lam);
        let d2 = d1.derivative(lam);
        let det = d1.y1 * d2.y2 - d2.y1 * (d1.y2 - 1.0);
        assert!((det - delta0(lam)).norm() < 1e-10 * det.norm());
    }

    #[test]
    fn first_roots() {
        let s = eigs_l0(3).unwrap();
        assert_eq!(s.entries.len(), 7);
        let k1 = s.entry(1).unwrap().k;
        assert!((k1 - 7.332129936270275).abs() < 1e-13);
        assert!((s.entry(2).unwrap().k - 13.613560583220337).abs() < 1e-12);
        assert_eq!(s.entry(-2).unwrap().k, -s.entry(2).unwrap().k);
        assert_eq!(s.entry(0).unwrap().mult, 2);
    }

    #[test]
    fn bracket_behaviour() {
        assert!(bracket_secular(1e-6).unwrap().abs() < 1e-12);
        assert!((f_ratio(200.0) - 1.0 / SQRT3).abs() < 1e-12);
        assert!(bracket_secular(PI).is_err());
    }

    #[test]
    fn eigenfunctions_satisfy_bcs() {
        for n in [1i64, -1, 4, -7, 20] {
            let u = eigenfunction_l0(n, 1).unwrap();
            let scale = u.lambda.abs().powf(2.0 / 3.0).max(1.0);
            for r in u.bc_residuals() {
                assert!(r < 1e-8 * scale, "n={n} r={r}");
            }
            assert!((u.norm_check - 1.0).abs() < 1e-12);
        }
        let e2 = eigenfunction_l0(0, 2).unwrap();
        assert!((e2.eval(1.0) - C64::new(0.0, SQRT3)).norm() < 1e-15);
        assert!(eigenfunction_l0(3, 2).is_err());
    }

    #[test]
    fn resolvent_methods_agree() {
        let f = GridFunction::uniform(2049, |x| C64::new((3.0 * x).sin(), x * x));
        let lam = C64::new(0.0, 1.0);
        let a = resolvent_l0(&f, lam, ResolventMethod::ClosedForm).unwrap();
        let b = resolvent_l0(&f, lam, ResolventMethod::SpectralSeries { depth: 60 }).unwrap();
        assert!(a.l2_distance(&b) < 1e-5, "{}", a.l2_distance(&b));
        assert!(third_order_defect(&a, &f, lam, None) < 1e-4 * f.l2_norm());
    }
}
