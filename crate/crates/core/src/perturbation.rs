//! Rank-one perturbation `L_alpha y = i y''' + alpha <y, v> v`: secular
//! function, characteristic function, classified spectrum, eigenfunctions
//! and resolvent.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::potential::Potential;
use crate::quadrature::Quadrature;
use crate::spectrum_l0::{delta0, k_root, resolvent_l0, Basis, EigenfunctionL0, Mode, ResolventMethod, SpectrumL0};
use crate::trigcubic::{eval_solutions, fourier_transforms_with, m_functional_with, Flavor};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default threshold below which a coefficient counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Default coincidence tolerance 1e-8 (1 + |lambda|).
pub fn default_coincidence_tol(lambda: f64) -> f64 {
    1e-8 * (1.0 + lambda.abs())
}

/// A pole of the secular function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub n: i64,
    pub lambda: f64,
    /// |v_n|^2 (both branches at n = 0)
    pub weight: f64,
}

/// Data defining Q(lambda) = 1 + alpha sum |v_n|^2 / (lambda_n - lambda).
#[derive(Debug, Clone)]
pub struct SecularData {
    pub alpha: f64,
    /// sorted by lambda
    pub support: Vec<SupportPoint>,
    /// |v_0|^2 when 0 is a pole, else 0
    pub zero_weight: f64,
    pub cutoff: usize,
    pub tail_norm: f64,
    /// lambda_{N+1}, the first unperturbed eigenvalue beyond the cutoff
    pub outer_lambda: f64,
    terms: Vec<(EigenfunctionL0, C64)>,
}

/// Splits indices |n| <= N into sigma_0 (vanishing coefficient) and the
/// support of the secular function.
pub fn split_sigma(v: &Potential, spec0: &SpectrumL0, zero_tol: f64) -> (Vec<i64>, Vec<SupportPoint>) {
    let mut sigma0 = Vec::new();
    let mut sigma1 = Vec::new();
    for e in &spec0.entries {
        let zero = if e.n == 0 {
            v.coeff(Mode::new(0, 1)).norm() <= zero_tol && v.coeff(Mode::new(0, 2)).norm() <= zero_tol
        } else {
            v.coeff(Mode::new(e.n, 1)).norm() <= zero_tol
        };
        if zero {
            sigma0.push(e.n);
        } else {
            sigma1.push(SupportPoint { n: e.n, lambda: e.lambda, weight: v.weight(e.n) });
        }
    }
    sigma1.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    (sigma0, sigma1)
}

impl SecularData {
    pub fn new(v: &Potential, alpha: f64, basis: &Basis, zero_tol: f64) -> Self {
        let spec0 = basis.spectrum();
        let (_, support) = split_sigma(v, spec0, zero_tol);
        let n_max = spec0.n_max();
        let inside: f64 = v.coefficients().iter().filter(|(m, _)| m.n.abs() <= n_max).map(|(_, c)| c.norm_sqr()).sum();
        let tail_norm = (v.norm() * v.norm() - inside).max(0.0).sqrt();
        let zero_weight = support.iter().find(|p| p.n == 0).map(|p| p.weight).unwrap_or(0.0);
        let kout = k_root(n_max + 1).unwrap_or(f64::INFINITY);
        let mut terms = Vec::new();
        for p in &support {
            for b in [1u8, 2] {
                let m = Mode::new(p.n, b);
                let c = v.coeff(m);
                if c.norm() > 0.0 {
                    if let Some(u) = basis.function(m) {
                        terms.push((u.clone(), c));
                    }
                }
            }
        }
        SecularData { alpha, support, zero_weight, cutoff: n_max as usize, tail_norm, outer_lambda: kout.powi(3), terms }
    }

    /// Single-pole data: Q = 1 + alpha w / (lambda_n - lambda) (for tests and
    /// hand-built examples).
    pub fn from_support(alpha: f64, support: Vec<SupportPoint>, tail_norm: f64, cutoff: usize) -> Self {
        let mut support = support;
        support.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let zero_weight = support.iter().find(|p| p.n == 0).map(|p| p.weight).unwrap_or(0.0);
        let kout = k_root(cutoff as i64 + 1).unwrap_or(f64::INFINITY);
        SecularData { alpha, support, zero_weight, cutoff, tail_norm, outer_lambda: kout.powi(3), terms: Vec::new() }
    }

    fn tail_bound(&self, lambda: C64) -> f64 {
        if self.tail_norm == 0.0 {
            return 0.0;
        }
        let d = (lambda - self.outer_lambda).norm().min((lambda + self.outer_lambda).norm());
        let d = if lambda.re.abs() >= self.outer_lambda && lambda.im.abs() < 1.0 { lambda.im.abs().max(1e-300) } else { d };
        self.alpha.abs() * self.tail_norm * self.tail_norm / d
    }

    /// Q evaluated at `pole + t` using exact pole offsets.
    fn q_offset(&self, pole: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for p in &self.support {
            acc += p.weight / ((p.lambda - pole) - t);
        }
        1.0 + self.alpha * acc
    }

    /// Q'(lambda) = alpha sum w / (lambda_n - lambda)^2.
    pub fn q_prime(&self, lambda: C64) -> C64 {
        let s: C64 = self.support.iter().map(|p| p.weight / ((p.lambda - lambda) * (p.lambda - lambda))).sum();
        s * self.alpha
    }
}

/// Q(lambda) with the certified tail bound |alpha| tail^2 / dist(lambda, outer spectrum).
pub fn q_eval(sd: &SecularData, lambda: C64) -> Result<(C64, f64)> {
    let mut acc = C64::new(0.0, 0.0);
    for p in &sd.support {
        let d = p.lambda - lambda;
        if d.norm() < 1e-12 {
            return Err(Error::OnPole { n: p.n });
        }
        acc += p.weight / d;
    }
    Ok((1.0 + sd.alpha * acc, sd.tail_bound(lambda)))
}

/// Delta(alpha, lambda) = Delta(0, lambda) + i alpha [F(lambda) - conj F(conj lambda)].
pub fn delta_alpha(v: &Potential, alpha: f64, lambda: C64) -> Result<C64> {
    delta_alpha_with(v, alpha, lambda, &Quadrature::default())
}

fn big_f(v: &Potential, lambda: C64, quad: &Quadrature) -> Result<C64> {
    // F = y1*(lambda) nu1(-lambda) + i lambda y2(1, lambda) m(lambda)
    let ys = fourier_transforms_with(v, lambda, Flavor::Starred, quad)?;
    let nu = fourier_transforms_with(v, -lambda, Flavor::Reflected, quad)?;
    let m = m_functional_with(v, lambda, quad)?;
    Ok(ys.t1 * nu.t1 + I * lambda * eval_solutions(1.0, lambda).y2 * m.value)
}

pub fn delta_alpha_with(v: &Potential, alpha: f64, lambda: C64, quad: &Quadrature) -> Result<C64> {
    let d0 = delta0(lambda);
    if alpha == 0.0 {
        return Ok(d0);
    }
    if !v.has_sampler() {
        return Err(Error::MissingSampler);
    }
    let f = big_f(v, lambda, quad)?;
    let fs = big_f(v, lambda.conj(), quad)?.conj();
    Ok(d0 + I * alpha * (f - fs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryClass {
    Sigma0Simple,
    Sigma2Simple,
    DoubleCoincidence,
    ZeroSpecial,
}

fn finite_margin<S: serde::Serializer>(m: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(if m.is_finite() { *m } else { f64::MAX })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedEntry {
    pub lambda: f64,
    pub mult: u32,
    pub class: EntryClass,
    /// separation that was compared against the coincidence tolerance
    /// (written as f64::MAX when nothing is nearby)
    #[serde(serialize_with = "finite_margin")]
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// half-width of the root interval from the truncation tail
    #[serde(skip)]
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedSpectrum {
    pub operator: String,
    pub alpha: f64,
    pub entries: Vec<PerturbedEntry>,
}

impl PerturbedSpectrum {
    pub fn values_with_multiplicity(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.mult {
                out.push(e.lambda);
            }
        }
        out
    }

    pub fn zero_multiplicity(&self) -> u32 {
        self.entries.iter().filter(|e| e.lambda == 0.0).map(|e| e.mult).sum()
    }

    /// Roots of the secular function (sigma_2), including those merged into
    /// coincidences or the origin.
    pub fn secular_roots(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| matches!(e.class, EntryClass::Sigma2Simple | EntryClass::DoubleCoincidence))
            .map(|e| e.lambda)
            .collect()
    }
}

/// Relative-precision bisection for the root of `g` on (0, len), with `g`
/// changing sign across it.
fn bisect_offset<G: Fn(f64) -> f64>(g: G, len: f64) -> Option<f64> {
    let mut a = 0.0;
    let mut b = len;
    let ga = g(a + f64::MIN_POSITIVE * 4.0);
    let gb = g(b);
    if ga.signum() == gb.signum() {
        return None;
    }
    let sa = ga.signum();
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || (b - a) <= 2.0 * f64::EPSILON * m {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return Some(m);
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Roots of the truncated secular function, one per gap plus the outer one.
/// Each root comes with its conditioning interval tail_bound / |Q'|.
pub fn secular_roots(sd: &SecularData, gap_hint: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut out: Vec<f64> = Vec::new();
    if sd.alpha == 0.0 || sd.support.is_empty() {
        return Vec::new();
    }
    let s = &sd.support;
    for w in s.windows(2) {
        let (p, q) = (w[0].lambda, w[1].lambda);
        let len = q - p;
        // on (p, q) Q runs monotonically between -inf and +inf (times sign alpha)
        let t = bisect_offset(|t| sd.q_offset(p, t), len).or_else(|| bisect_offset(|t| -sd.q_offset(q, -t), len).map(|t| len - t));
        if let Some(t) = t {
            let mu = if t <= 0.5 * len { p + t } else { q - (len - t) };
            out.push(mu);
        }
    }
    // outer root: right of the last pole for alpha > 0, left of the first for alpha < 0
    let finite = sd.tail_norm <= 1e-12;
    let (pole, dir) = if sd.alpha > 0.0 { (s[s.len() - 1].lambda, 1.0) } else { (s[0].lambda, -1.0) };
    let g = |t: f64| sd.q_offset(pole, dir * t);
    let step = gap_hint(pole).max(1.0);
    let mut hi = step;
    let limit = if finite { f64::MAX / 4.0 } else { 3.0 * step };
    while g(hi) < 0.0 && hi < limit {
        hi *= 2.0;
    }
    let hi = hi.min(limit);
    if g(hi) >= 0.0 {
        if let Some(t) = bisect_offset(g, hi) {
            out.push(pole + dir * t);
        }
    }
    out.sort_by(f64::total_cmp);
    out.into_iter()
        .map(|mu| {
            let qp = sd.q_prime(C64::new(mu, 0.0)).norm();
            let tb = sd.tail_bound(C64::new(mu, 0.0));
            (mu, if qp > 0.0 { tb / qp } else { f64::INFINITY })
        })
        .collect()
}

fn spacing_near(spec0: &SpectrumL0, lambda: f64) -> f64 {
    // distance between consecutive unperturbed eigenvalues around lambda
    let mut best = f64::INFINITY;
    let mut gap = 1.0;
    for w in spec0.entries.windows(2) {
        let mid = 0.5 * (w[0].lambda + w[1].lambda);
        let d = (mid - lambda).abs();
        if d < best {
            best = d;
            gap = w[1].lambda - w[0].lambda;
        }
    }
    gap
}

/// Classified spectrum of L_alpha for |n| <= basis cutoff.
pub fn spectrum_alpha(v: &Potential, alpha: f64, basis: &Basis, coincidence_tol: Option<f64>) -> Result<PerturbedSpectrum> {
    spectrum_alpha_with(v, alpha, basis, coincidence_tol, DEFAULT_ZERO_TOL)
}

pub fn spectrum_alpha_with(
    v: &Potential,
    alpha: f64,
    basis: &Basis,
    coincidence_tol: Option<f64>,
    zero_tol: f64,
) -> Result<PerturbedSpectrum> {
    let tol = |l: f64| coincidence_tol.map(|t| t * (1.0 + l.abs())).unwrap_or_else(|| default_coincidence_tol(l));
    let spec0 = basis.spectrum();
    let sd = SecularData::new(v, alpha, basis, zero_tol);
    let (sigma0, _) = split_sigma(v, spec0, zero_tol);
    let zero_in_sigma0 = sigma0.contains(&0);
    let mut roots = secular_roots(&sd, |l| spacing_near(spec0, l));
    let mut entries = Vec::new();

    // the origin
    if zero_in_sigma0 {
        // 0 is not a pole: it joins sigma_2 iff Q(0) = 0
        let near = roots.iter().enumerate().min_by(|a, b| a.1 .0.abs().total_cmp(&b.1 .0.abs())).map(|(i, r)| (i, r.0));
        let (q0, _) = q_eval(&sd, C64::new(0.0, 0.0))?;
        let qp = sd.q_prime(C64::new(0.0, 0.0)).norm();
        let newton = if qp > 0.0 { q0.norm() / qp } else { f64::INFINITY };
        match near {
            Some((i, mu)) if mu.abs() <= tol(0.0) || newton <= tol(0.0) => {
                roots.remove(i);
                entries.push(PerturbedEntry {
                    lambda: 0.0,
                    mult: 3,
                    class: EntryClass::ZeroSpecial,
                    margin: mu.abs().min(newton),
                    warning: None,
                    uncertainty: 0.0,
                });
            }
            _ => entries.push(PerturbedEntry {
                lambda: 0.0,
                mult: 2,
                class: EntryClass::ZeroSpecial,
                margin: near.map(|(_, mu)| mu.abs()).unwrap_or(f64::INFINITY).min(newton),
                warning: None,
                uncertainty: 0.0,
            }),
        }
    } else {
        entries.push(PerturbedEntry {
            lambda: 0.0,
            mult: 1,
            class: EntryClass::ZeroSpecial,
            margin: roots.iter().map(|r| r.0.abs()).fold(f64::INFINITY, f64::min),
            warning: None,
            uncertainty: 0.0,
        });
    }

    let nonzero0: Vec<f64> = sigma0.iter().filter(|&&n| n != 0).map(|&n| basis.lambda(n)).collect();
    let mut used = vec![false; roots.len()];
    for &l0 in &nonzero0 {
        // closest secular root
        let best = roots.iter().enumerate().filter(|(i, _)| !used[*i]).min_by(|a, b| (a.1 .0 - l0).abs().total_cmp(&(b.1 .0 - l0).abs()));
        match best {
            Some((i, &(mu, unc))) if (mu - l0).abs() <= tol(l0) => {
                used[i] = true;
                entries.push(PerturbedEntry {
                    lambda: l0,
                    mult: 2,
                    class: EntryClass::DoubleCoincidence,
                    margin: (mu - l0).abs(),
                    warning: None,
                    uncertainty: unc,
                });
            }
            b => entries.push(PerturbedEntry {
                lambda: l0,
                mult: 1,
                class: EntryClass::Sigma0Simple,
                margin: b.map(|(_, r)| (r.0 - l0).abs()).unwrap_or(f64::INFINITY),
                warning: None,
                uncertainty: 0.0,
            }),
        }
    }
    for (i, &(mu, unc)) in roots.iter().enumerate() {
        if used[i] {
            continue;
        }
        let margin = nonzero0.iter().map(|l| (l - mu).abs()).fold(f64::INFINITY, f64::min);
        let warning = if !zero_in_sigma0 && mu.abs() <= tol(0.0) {
            Some("secular root at the origin while 0 is a pole; case not covered by the multiplicity table".to_string())
        } else {
            None
        };
        entries.push(PerturbedEntry { lambda: mu, mult: 1, class: EntryClass::Sigma2Simple, margin, warning, uncertainty: unc });
    }
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(PerturbedSpectrum { operator: "Lalpha".into(), alpha, entries })
}

/// Eigenfunction of L_alpha for a secular root mu:
/// (1 / sqrt G'(mu)) sum v_n u_n / (lambda_n - mu).
#[derive(Debug, Clone)]
pub struct PerturbedEigenfunction {
    pub mu: f64,
    terms: Vec<(EigenfunctionL0, C64)>,
}

impl PerturbedEigenfunction {
    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|(u, c)| c * u.eval(x)).sum()
    }

    /// Coefficients in the unperturbed eigenbasis.
    pub fn coefficients(&self) -> Vec<(Mode, C64)> {
        self.terms.iter().map(|(u, c)| (Mode::new(u.n, u.branch), *c)).collect()
    }

    /// Norm from the coefficients (exact in the orthonormal basis).
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn eigenfunction_alpha(sd: &SecularData, mu: f64) -> Result<PerturbedEigenfunction> {
    let z = C64::new(mu, 0.0);
    let (q, _) = q_eval(sd, z)?;
    let gp = sd.q_prime(z).re / sd.alpha;
    if gp.is_nan() || gp <= 0.0 || q.norm() / (sd.alpha.abs() * gp) > 1e-6 * (1.0 + mu.abs()) {
        return Err(Error::NotASecularRoot { mu, q_abs: q.norm() });
    }
    let s = 1.0 / gp.sqrt();
    let terms = sd.terms.iter().map(|(u, c)| (u.clone(), c * s / (u.lambda - mu))).collect();
    Ok(PerturbedEigenfunction { mu, terms })
}

/// Krein formula R0 f - alpha <R0 f, v> / (1 + alpha <R0 v, v>) R0 v.
pub fn resolvent_alpha(v: &Potential, alpha: f64, f: &GridFunction, lambda: C64) -> Result<GridFunction> {
    let r0f = resolvent_l0(f, lambda, ResolventMethod::ClosedForm)?;
    if alpha == 0.0 {
        return Ok(r0f);
    }
    let vg = GridFunction { xs: f.xs.clone(), values: v.sample(&f.xs)? };
    let r0v = resolvent_l0(&vg, lambda, ResolventMethod::ClosedForm)?;
    let q = 1.0 + alpha * r0v.inner(&vg);
    if q.norm() < 1e-10 {
        return Err(Error::SecularZero { q_abs: q.norm() });
    }
    let c = alpha * r0f.inner(&vg) / q;
    let values = r0f.values.iter().zip(&r0v.values).map(|(a, b)| a - c * b).collect();
    Ok(GridFunction { xs: f.xs.clone(), values })
}

/// The non-local term alpha <y, v> v on the grid, for defect checks.
pub fn rank_one_term(v: &Potential, alpha: f64, y: &GridFunction) -> Result<Vec<C64>> {
    let vg = GridFunction { xs: y.xs.clone(), values: v.sample(&y.xs)? };
    let c = alpha * y.inner(&vg);
    Ok(vg.values.iter().map(|x| c * x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::third_order_defect;

    #[test]
    fn single_mode_shift() {
        let basis = Basis::new(6).unwrap();
        let v = Potential::from_coefficients(&[(Mode::new(2, 1), C64::new(1.0, 0.0))], &basis).unwrap();
        let sp = spectrum_alpha(&v, 0.5, &basis, None).unwrap();
        let l2 = basis.lambda(2);
        assert!(sp.entries.iter().any(|e| (e.lambda - (l2 + 0.5)).abs() < 1e-9 * l2));
        assert!(!sp.entries.iter().any(|e| e.lambda == l2));
        assert_eq!(sp.zero_multiplicity(), 2);
        assert_eq!(sp.values_with_multiplicity().len(), 14);
    }

    #[test]
    fn constant_potential_secular_identity() {
        let basis = Basis::new(40).unwrap();
        let v = Potential::from_fn(|_| C64::new(1.0, 0.0), &basis);
        let sd = SecularData::new(&v, 2.0, &basis, DEFAULT_ZERO_TOL);
        let lam = C64::new(0.0, 1.0);
        let (q, _) = q_eval(&sd, lam).unwrap();
        let d = delta_alpha(&v, 2.0, lam).unwrap() / delta0(lam);
        assert!((q - d).norm() < 1e-6, "{q} {d}");
        assert!((q - (1.0 - 2.0 / lam)).norm() < 1e-10);
        let sp = spectrum_alpha(&v, 2.0, &basis, None).unwrap();
        assert_eq!(sp.zero_multiplicity(), 1);
        assert!(sp.entries.iter().any(|e| (e.lambda - 2.0).abs() < 1e-9));
    }

    #[test]
    fn eigenfunction_and_resolvent_single_mode() {
        let basis = Basis::new(8).unwrap();
        let v = Potential::from_coefficients(&[(Mode::new(1, 1), C64::new(1.0, 0.0))], &basis).unwrap();
        let sd = SecularData::new(&v, 0.5, &basis, DEFAULT_ZERO_TOL);
        let mu = basis.lambda(1) + 0.5;
        let u = eigenfunction_alpha(&sd, mu).unwrap();
        assert!((u.coefficient_norm() - 1.0).abs() < 1e-9);
        assert!(eigenfunction_alpha(&sd, mu + 10.0).is_err());
        let f = GridFunction::uniform(2049, |x| v.eval(x).unwrap());
        let lam = C64::new(3.0, 1.0);
        let y = resolvent_alpha(&v, 0.5, &f, lam).unwrap();
        let expect = 1.0 / (mu - lam);
        let err = y.values.iter().zip(&f.values).map(|(a, b)| (a - b * expect).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        let extra = rank_one_term(&v, 0.5, &y).unwrap();
        assert!(third_order_defect(&y, &f, lam, Some(&extra)) < 1e-4 * f.l2_norm());
    }
}
