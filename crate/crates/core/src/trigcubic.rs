//! The functions c, s, d (fundamental solutions of y''' = y), the solution
//! triple of i y''' = lambda y, and the integral functionals of a potential.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::potential::Potential;
use crate::quadrature::Quadrature;

/// Primitive cube root of unity e^{2 pi i / 3}.
pub const OMEGA: C64 = C64 { re: -0.5, im: 0.866_025_403_784_438_6 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn omega_pow(j: i32) -> C64 {
    match j.rem_euclid(3) {
        0 => C64::new(1.0, 0.0),
        1 => OMEGA,
        _ => OMEGA.conj(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsdTriple {
    pub c: C64,
    pub s: C64,
    pub d: C64,
}

impl CsdTriple {
    /// c^3 + s^3 + d^3 - 3csd, identically 1.
    pub fn main_identity(&self) -> C64 {
        let (c, s, d) = (self.c, self.s, self.d);
        c * c * c + s * s * s + d * d * d - 3.0 * c * s * d
    }
}

/// Taylor partial sums of the three series sum z^{3n+m}/(3n+m)!, m = 0, 1, 2.
fn csd_taylor(z: C64) -> CsdTriple {
    let mut out = [C64::new(0.0, 0.0); 3];
    let mut term = C64::new(1.0, 0.0);
    let mut k = 0usize;
    loop {
        out[k % 3] += term;
        k += 1;
        term = term * z / k as f64;
        if term.norm() < 1e-18 * out[0].norm().max(1e-300) && k > 3 {
            break;
        }
        if k > 200 {
            break;
        }
    }
    CsdTriple { c: out[0], s: out[1], d: out[2] }
}

fn csd_exp(z: C64) -> CsdTriple {
    let e0 = z.exp();
    let e1 = (OMEGA * z).exp();
    let e2 = (OMEGA.conj() * z).exp();
    let w = OMEGA;
    let w2 = OMEGA.conj();
    CsdTriple { c: (e0 + e1 + e2) / 3.0, s: (e0 + w2 * e1 + w * e2) / 3.0, d: (e0 + w * e1 + w2 * e2) / 3.0 }
}

/// Evaluates (c(z), s(z), d(z)).
pub fn eval_csd(z: C64) -> CsdTriple {
    if z.norm() < 1.0 {
        csd_taylor(z)
    } else {
        csd_exp(z)
    }
}

/// Values (y1, y2, y3) at a point (x, lambda).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionTriple {
    pub y1: C64,
    pub y2: C64,
    pub y3: C64,
}

impl SolutionTriple {
    /// x-derivative of the triple: (y1', y2', y3') = (-i lambda y3, y1, y2).
    pub fn derivative(&self, lambda: C64) -> SolutionTriple {
        SolutionTriple { y1: -I * lambda * self.y3, y2: self.y1, y3: self.y2 }
    }

    pub fn as_array(&self) -> [C64; 3] {
        [self.y1, self.y2, self.y3]
    }
}

/// Principal cube root, argument in (-pi/3, pi/3].
pub fn principal_cbrt(lambda: C64) -> C64 {
    if lambda.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(lambda.norm().cbrt(), lambda.arg() / 3.0)
}

/// The three exponents r_j = i k omega^j, i.e. the cube roots of -i lambda.
pub fn exponents(lambda: C64) -> [C64; 3] {
    let k = principal_cbrt(lambda);
    [I * k, I * k * OMEGA, I * k * OMEGA.conj()]
}

// Below this |k x| the lambda power series is used; it has no branch and no
// 1/k cancellation.
const SERIES_LIMIT: f64 = 2.0;

fn solutions_series(x: f64, lambda: C64) -> SolutionTriple {
    // y_m = sum (-i lambda)^n x^{3n+m-1} / (3n+m-1)!
    let q = -I * lambda;
    let mut out = [C64::new(0.0, 0.0); 3];
    let mut term = C64::new(1.0, 0.0);
    let mut p = 0usize;
    loop {
        out[p % 3] += term;
        p += 1;
        term *= x / p as f64;
        if p.is_multiple_of(3) {
            term *= q;
        }
        if p > 3 && term.norm() < 1e-18 * out[0].norm().max(out[1].norm()).max(1e-300) {
            break;
        }
        if p > 300 {
            break;
        }
    }
    SolutionTriple { y1: out[0], y2: out[1], y3: out[2] }
}

fn solutions_exp(x: f64, r: &[C64; 3]) -> SolutionTriple {
    let mut out = SolutionTriple { y1: C64::new(0.0, 0.0), y2: C64::new(0.0, 0.0), y3: C64::new(0.0, 0.0) };
    for &rj in r {
        let e = (rj * x).exp() / 3.0;
        out.y1 += e;
        out.y2 += e / rj;
        out.y3 += e / (rj * rj);
    }
    out
}

/// (y1, y2, y3)(x, lambda) with y1 = c(i k x), y2 = s(i k x)/(i k),
/// y3 = d(i k x)/(i k)^2, k any cube root of lambda. Valid for any real x.
pub fn eval_solutions(x: f64, lambda: C64) -> SolutionTriple {
    let k = lambda.norm().cbrt();
    if k * x.abs() < SERIES_LIMIT {
        solutions_series(x, lambda)
    } else {
        solutions_exp(x, &exponents(lambda))
    }
}

/// Literal evaluation through c, s, d with a caller-chosen cube root `k` of lambda.
pub fn eval_solutions_with_root(x: f64, k: C64) -> SolutionTriple {
    if k.norm() == 0.0 {
        return SolutionTriple { y1: C64::new(1.0, 0.0), y2: C64::new(x, 0.0), y3: C64::new(0.5 * x * x, 0.0) };
    }
    let ik = I * k;
    let t = eval_csd(ik * x);
    SolutionTriple { y1: t.c, y2: t.s / ik, y3: t.d / (ik * ik) }
}

/// Precomputed evaluator for y3(s, lambda) over many s.
pub(crate) struct Y3Kernel {
    lambda: C64,
    r: [C64; 3],
    scale: [C64; 3],
    k: f64,
}

impl Y3Kernel {
    pub(crate) fn new(lambda: C64) -> Self {
        let r = exponents(lambda);
        let scale = if lambda.norm() == 0.0 {
            [C64::new(0.0, 0.0); 3]
        } else {
            [1.0 / (3.0 * r[0] * r[0]), 1.0 / (3.0 * r[1] * r[1]), 1.0 / (3.0 * r[2] * r[2])]
        };
        Y3Kernel { lambda, r, scale, k: lambda.norm().cbrt() }
    }

    pub(crate) fn eval(&self, s: f64) -> C64 {
        if self.k * s.abs() < SERIES_LIMIT {
            solutions_series(s, self.lambda).y3
        } else {
            (0..3).map(|j| (self.r[j] * s).exp() * self.scale[j]).sum()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// <v, y_i(., conj lambda)>
    Plain,
    /// <y_i(., lambda), v>
    Starred,
    /// <nu, y_i(., conj lambda)> with nu(x) = v(1 - x)
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformTriple {
    pub t1: C64,
    pub t2: C64,
    pub t3: C64,
    pub flavor: Flavor,
    /// difference between the default rule and the half-panel rule
    pub error_estimate: f64,
}

fn transforms_with(v: &Potential, lambda: C64, flavor: Flavor, quad: &Quadrature) -> Result<[C64; 3]> {
    let xs = quad.nodes();
    let vals: Vec<C64> = match flavor {
        Flavor::Reflected => v.sample(&xs.iter().map(|x| 1.0 - x).collect::<Vec<_>>())?,
        _ => v.sample(xs)?,
    };
    let mut acc = [C64::new(0.0, 0.0); 3];
    for ((&x, &w), &vx) in xs.iter().zip(quad.weights()).zip(&vals) {
        let (y, f) = match flavor {
            Flavor::Starred => (eval_solutions(x, lambda).as_array(), vx.conj()),
            _ => {
                let y = eval_solutions(x, lambda.conj()).as_array();
                ([y[0].conj(), y[1].conj(), y[2].conj()], vx)
            }
        };
        for i in 0..3 {
            acc[i] += y[i] * f * w;
        }
    }
    Ok(acc)
}

/// Fourier-type transforms of the potential against the solution triple.
pub fn fourier_transforms(v: &Potential, lambda: C64, flavor: Flavor) -> Result<TransformTriple> {
    fourier_transforms_with(v, lambda, flavor, &Quadrature::default())
}

pub fn fourier_transforms_with(v: &Potential, lambda: C64, flavor: Flavor, quad: &Quadrature) -> Result<TransformTriple> {
    let fine = transforms_with(v, lambda, flavor, quad)?;
    let coarse = transforms_with(v, lambda, flavor, &quad.coarse())?;
    let err = (0..3).map(|i| (fine[i] - coarse[i]).norm()).fold(0.0, f64::max);
    Ok(TransformTriple { t1: fine[0], t2: fine[1], t3: fine[2], flavor, error_estimate: err })
}

/// Value with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: C64,
    pub error_estimate: f64,
}

fn m_with(v: &Potential, lambda: C64, quad: &Quadrature) -> Result<C64> {
    if v.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let kern = Y3Kernel::new(lambda);
    // the closures below are infallible once sampling is known to work
    v.eval(0.5)?;
    let f = |x: f64| v.eval(x).unwrap_or_default();
    Ok(quad.triangle(|x| f(x).conj(), f, |s| kern.eval(s)))
}

/// m(lambda) = < int_0^x y3(x - t, lambda) v(t) dt, v >.
pub fn m_functional(v: &Potential, lambda: C64) -> Result<Estimate> {
    m_functional_with(v, lambda, &Quadrature::default())
}

pub fn m_functional_with(v: &Potential, lambda: C64, quad: &Quadrature) -> Result<Estimate> {
    let fine = m_with(v, lambda, quad)?;
    let coarse = m_with(v, lambda, &quad.coarse())?;
    Ok(Estimate { value: fine, error_estimate: (fine - coarse).norm() })
}
