//! Inverse problem: leading product coefficients, recovery of
//! {alpha, |v_n|^2} from two spectra, and reconstruction of v from four.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturbation::{spectrum_alpha, PerturbedSpectrum};
use crate::potential::Potential;
use crate::quadrature::Quadrature;
use crate::spectrum_l0::{delta0_taylor, Basis, Mode, SpectrumL0};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which power of lambda leads Delta(alpha, .) at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// 0 is a simple eigenvalue of L_alpha (0 is a pole of Q)
    B1Case,
    /// 0 keeps multiplicity 2
    B2Case,
    /// 0 has multiplicity 3 (Q(0) = 0)
    B3Case,
}

impl CaseTag {
    pub fn from_zero_multiplicity(m: u32) -> Result<Self> {
        match m {
            1 => Ok(CaseTag::B1Case),
            2 => Ok(CaseTag::B2Case),
            3 => Ok(CaseTag::B3Case),
            _ => Err(Error::CaseMismatch(format!("multiplicity {m} at the origin"))),
        }
    }

    /// Order q of the zero of Delta(alpha, .) at 0.
    pub fn order(self) -> usize {
        match self {
            CaseTag::B1Case => 1,
            CaseTag::B2Case => 2,
            CaseTag::B3Case => 3,
        }
    }

    /// Power p in Q = C lambda^p prod(1 - lambda/mu) / prod(1 - lambda/lambda^1).
    fn power(self) -> i32 {
        self.order() as i32 - 2
    }
}

fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |a, j| a * j as f64)
}

/// Taylor coefficients b_1, b_2, b_3 of Delta(alpha, lambda) at lambda = 0,
/// from moment integrals of v (the triangle terms by iterated quadrature).
pub fn b_forward(v: &Potential, alpha: f64) -> Result<[f64; 3]> {
    b_forward_with(v, alpha, &Quadrature::default())
}

pub fn b_forward_with(v: &Potential, alpha: f64, quad: &Quadrature) -> Result<[f64; 3]> {
    if v.is_zero() || alpha == 0.0 {
        return Ok([delta0_taylor(1), delta0_taylor(2), delta0_taylor(3)]);
    }
    let xs = quad.nodes();
    let vals = v.sample(xs)?;
    let mi = |j: usize| (-I).powu(j as u32);
    // [y1*]_j = (-i)^j int x^{3j}/(3j)! conj v ; [nu1(-.)]_l = (-i)^l int v(t) (1-t)^{3l}/(3l)!
    let mut ystar = [C64::new(0.0, 0.0); 4];
    let mut nu = [C64::new(0.0, 0.0); 4];
    for j in 0..4 {
        let f = factorial(3 * j);
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for ((&x, &w), &vx) in xs.iter().zip(quad.weights()).zip(&vals) {
            a += vx.conj() * (x.powi(3 * j as i32) / f * w);
            b += vx * ((1.0 - x).powi(3 * j as i32) / f * w);
        }
        ystar[j] = mi(j) * a;
        nu[j] = mi(j) * b;
    }
    // [y2(1)]_j = (-i)^j / (3j+1)! ; [m]_l = (-i)^l int int_{t<x} conj v(x) v(t) (x-t)^{3l+2}/(3l+2)!
    let f = |x: f64| v.eval(x).unwrap_or_default();
    let mut m = [C64::new(0.0, 0.0); 3];
    for (l, ml) in m.iter_mut().enumerate() {
        let p = 3 * l as i32 + 2;
        let fac = factorial(3 * l + 2);
        *ml = mi(l) * quad.triangle(|x| f(x).conj(), f, |s| C64::new(s.powi(p) / fac, 0.0));
    }
    let y2 = |j: usize| mi(j) / factorial(3 * j + 1);
    let mut out = [0.0; 3];
    for q in 1..=3 {
        let mut a = C64::new(0.0, 0.0);
        for j in 0..=q {
            a += ystar[j] * nu[q - j];
        }
        for j in 0..q {
            a += I * y2(j) * m[q - 1 - j];
        }
        out[q - 1] = delta0_taylor(q) - 2.0 * alpha * a.im;
    }
    Ok(out)
}

/// The printed closed form for b_1 (agrees with `b_forward` for real-valued v).
pub fn b1_printed(v: &Potential, alpha: f64) -> Result<f64> {
    let quad = Quadrature::default();
    let xs = quad.nodes();
    let vals = v.sample(xs)?;
    let mut s0 = C64::new(0.0, 0.0);
    let mut s3 = C64::new(0.0, 0.0);
    let mut r3 = C64::new(0.0, 0.0);
    for ((&x, &w), &vx) in xs.iter().zip(quad.weights()).zip(&vals) {
        s0 += vx * w;
        s3 += vx * (x.powi(3) / 6.0 * w);
        r3 += vx * ((1.0 - x).powi(3) / 6.0 * w);
    }
    // int int (t^3/6 + (1-x)^3/6 + x^3/6 + (1-t)^3/6) v(t) conj v(x)
    let full = s3 * s0.conj() + s0 * r3.conj() + s0 * s3.conj() + r3 * s0.conj();
    let f = |x: f64| v.eval(x).unwrap_or_default();
    let tri = quad.triangle(|x| f(x).conj(), f, |s| C64::new(s * s, 0.0));
    Ok(alpha * (full - tri).re)
}

/// Split of two spectra into the destroyed poles (sigma_1, with their L0
/// index) and the created points (sigma_2).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSplit {
    pub case: CaseTag,
    pub sigma1: Vec<(i64, f64)>,
    pub sigma2: Vec<f64>,
}

fn match_tol(l: f64) -> f64 {
    1e-9 * (1.0 + l.abs())
}

/// One-to-one matching of the two sorted multisets (a merge walk, which is
/// the optimal assignment on the line); unmatched L0 points form sigma_1 and
/// unmatched L_alpha points form sigma_2.
pub fn split_spectra(s0: &SpectrumL0, s_alpha: &PerturbedSpectrum) -> Result<SpectralSplit> {
    let case = CaseTag::from_zero_multiplicity(s_alpha.zero_multiplicity())?;
    let mut a: Vec<(i64, f64)> = Vec::new();
    for e in &s0.entries {
        for _ in 0..e.mult {
            a.push((e.n, e.lambda));
        }
    }
    a.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut b = s_alpha.values_with_multiplicity();
    b.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0, 0);
    let mut sigma1 = Vec::new();
    let mut sigma2 = Vec::new();
    while i < a.len() || j < b.len() {
        if i < a.len() && j < b.len() && (a[i].1 - b[j]).abs() <= match_tol(a[i].1) {
            i += 1;
            j += 1;
        } else if j >= b.len() || (i < a.len() && a[i].1 < b[j]) {
            sigma1.push(a[i]);
            i += 1;
        } else {
            sigma2.push(b[j]);
            j += 1;
        }
    }
    let zero1 = sigma1.iter().filter(|p| p.1 == 0.0).count();
    let zero2 = sigma2.iter().filter(|&&m| m == 0.0).count();
    let ok = match case {
        CaseTag::B1Case => zero1 == 1 && zero2 == 0,
        CaseTag::B2Case => zero1 == 0 && zero2 == 0,
        CaseTag::B3Case => zero1 == 0 && zero2 == 1,
    };
    if !ok {
        return Err(Error::CaseMismatch(format!("{case:?} with {zero1} destroyed and {zero2} created zeros")));
    }
    Ok(SpectralSplit { case, sigma1, sigma2 })
}

/// Leading coefficient with its extrapolation spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BEstimate {
    pub case: CaseTag,
    pub value: f64,
    pub spread: f64,
}

/// R(lambda) = 1 / (lambda^p prod(1 - lambda/mu) / prod(1 - lambda/lambda^1)),
/// pairing factors in sorted order.
fn inverse_ratio(split: &SpectralSplit, lambda: C64) -> C64 {
    let num: Vec<f64> = split.sigma1.iter().map(|p| p.1).filter(|&l| l != 0.0).collect();
    let den: Vec<f64> = split.sigma2.iter().copied().filter(|&m| m != 0.0).collect();
    let mut r = lambda.powi(-split.case.power());
    let n = num.len().max(den.len());
    for k in 0..n {
        if let Some(&l) = num.get(k) {
            r *= 1.0 - lambda / l;
        }
        if let Some(&m) = den.get(k) {
            r /= 1.0 - lambda / m;
        }
    }
    r
}

/// Ladder of y values (times (2 pi)^3) used for the limit along lambda = i y.
pub const LADDER: [f64; 4] = [1e3, 1e4, 1e5, 1e6];

/// b_q from two spectra: the limit of -(1/12) R(i y) as y grows, Richardson
/// extrapolated in 1/y.
pub fn b_from_spectra(s0: &SpectrumL0, s_alpha: &PerturbedSpectrum) -> Result<BEstimate> {
    let split = split_spectra(s0, s_alpha)?;
    b_from_split(&split)
}

pub fn b_from_split(split: &SpectralSplit) -> Result<BEstimate> {
    if split.sigma1.is_empty() && split.sigma2.is_empty() {
        return Ok(BEstimate { case: split.case, value: -1.0 / 12.0, spread: 0.0 });
    }
    let scale = (2.0 * std::f64::consts::PI).powi(3);
    let r: Vec<C64> = LADDER.iter().map(|y| -inverse_ratio(split, I * (y * scale)) / 12.0).collect();
    let ext: Vec<C64> = (0..r.len() - 1).map(|j| (10.0 * r[j + 1] - r[j]) / 9.0).collect();
    let best = *ext.last().unwrap();
    let mut spread = ext.iter().map(|e| (e - best).norm()).fold(0.0, f64::max);
    spread = spread.max(best.im.abs());
    if !best.re.is_finite() || spread > 0.1 * best.re.abs() {
        return Err(Error::NonConvergent { spread: if best.re != 0.0 { spread / best.re.abs() } else { f64::INFINITY } });
    }
    Ok(BEstimate { case: split.case, value: best.re, spread })
}

/// Residues alpha |w_n|^2 of the secular function at every destroyed pole.
#[derive(Debug, Clone, PartialEq)]
pub struct Residues {
    pub b: BEstimate,
    pub values: BTreeMap<i64, f64>,
}

pub fn recover_residues(s0: &SpectrumL0, s_alpha: &PerturbedSpectrum) -> Result<Residues> {
    let split = split_spectra(s0, s_alpha)?;
    let b = b_from_split(&split)?;
    let c = -12.0 * b.value;
    let p = split.case.power();
    let poles: Vec<f64> = split.sigma1.iter().map(|q| q.1).filter(|&l| l != 0.0).collect();
    let roots: Vec<f64> = split.sigma2.iter().copied().filter(|&m| m != 0.0).collect();
    let mut values = BTreeMap::new();
    for &(n, ln) in &split.sigma1 {
        if ln == 0.0 {
            values.insert(n, -c);
            continue;
        }
        // C ln^{p+1} prod_q (1 - ln/mu_q) / prod_{m != n} (1 - ln/l_m), in log form
        let mut logm = c.abs().ln() + (p + 1) as f64 * ln.abs().ln();
        let mut neg = (c < 0.0) ^ (ln < 0.0 && (p + 1) % 2 != 0);
        for &mu in &roots {
            let f = (mu - ln) / mu;
            logm += f.abs().ln();
            neg ^= f < 0.0;
        }
        for &lm in &poles {
            if lm == ln {
                continue;
            }
            let f = (lm - ln) / lm;
            logm -= f.abs().ln();
            neg ^= f < 0.0;
        }
        let v = logm.exp();
        values.insert(n, if neg { -v } else { v });
    }
    Ok(Residues { b, values })
}

/// (alpha_hat, |v_n|^2) from sigma(L0) and sigma(L_alpha) for a unit potential.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecovery {
    pub alpha_hat: f64,
    pub weights: BTreeMap<i64, f64>,
    pub b: BEstimate,
    /// true when the two spectra coincide (the potential vanishes)
    pub vanishing: bool,
}

pub fn recover_weights(s0: &SpectrumL0, s_alpha: &PerturbedSpectrum) -> Result<WeightRecovery> {
    let res = recover_residues(s0, s_alpha)?;
    if res.values.is_empty() {
        return Ok(WeightRecovery { alpha_hat: 0.0, weights: BTreeMap::new(), b: res.b, vanishing: true });
    }
    let alpha_hat: f64 = res.values.values().sum();
    let big = res.values.values().map(|v| v.abs()).fold(0.0, f64::max);
    if res.values.values().any(|v| v.signum() != alpha_hat.signum() && v.abs() > 1e-9 * big) {
        return Err(Error::SignError);
    }
    let weights = res.values.iter().map(|(n, v)| (*n, v / alpha_hat)).collect();
    Ok(WeightRecovery { alpha_hat, weights, b: res.b, vanishing: false })
}

/// True iff the spectra agree entrywise, multiplicities included.
pub fn ambarzumyan_check(s0: &SpectrumL0, s_alpha: &PerturbedSpectrum, tol: f64) -> bool {
    let mut a = s0.values_with_multiplicity();
    let mut b = s_alpha.values_with_multiplicity();
    if a.len() != b.len() {
        return false;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()))
}

/// The probe g(x) = 1 - x.
pub fn default_probe(basis: &Basis) -> Potential {
    Potential::from_fn(|x| C64::new(1.0 - x, 0.0), basis)
}

/// Inputs to the four-spectra reconstruction.
#[derive(Debug, Clone)]
pub struct SpectraBundle {
    pub s0: SpectrumL0,
    pub s_v: PerturbedSpectrum,
    pub s_vg: PerturbedSpectrum,
    pub s_vig: PerturbedSpectrum,
    pub case_tag: CaseTag,
}

impl SpectraBundle {
    pub fn new(s0: SpectrumL0, s_v: PerturbedSpectrum, s_vg: PerturbedSpectrum, s_vig: PerturbedSpectrum) -> Result<Self> {
        let case_tag = CaseTag::from_zero_multiplicity(s_v.zero_multiplicity())?;
        Ok(SpectraBundle { s0, s_v, s_vg, s_vig, case_tag })
    }
}

fn truncated(p: &Potential, basis: &Basis) -> Result<Potential> {
    Potential::from_coefficients(&p.truncated_coefficients(basis.n_max() as i64), basis)
}

/// Forward-solves the four spectra for v, v + g, v + i g (alpha fixed, the
/// sums left unnormalized), each truncated to the basis.
pub fn simulate_bundle(v: &Potential, alpha: f64, probe: &Potential, basis: &Basis) -> Result<SpectraBundle> {
    let vt = truncated(v, basis)?;
    let gt = truncated(probe, basis)?;
    let vg = vt.add(&gt, basis);
    let vig = vt.add(&gt.scaled(I), basis);
    let s_v = spectrum_alpha(&vt, alpha, basis, None)?;
    let s_vg = spectrum_alpha(&vg, alpha, basis, None)?;
    let s_vig = spectrum_alpha(&vig, alpha, basis, None)?;
    SpectraBundle::new(basis.spectrum().clone(), s_v, s_vg, s_vig)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    /// smallest |g_n| accepted as a divisor
    pub g_floor: f64,
    /// relative agreement required between |v_n| from the cross term and from the weight
    pub modulus_tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { g_floor: 1e-6, modulus_tol: 1e-3 }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveredData {
    pub alpha_hat: f64,
    pub weights: BTreeMap<i64, f64>,
    /// v_n conj(g_n) (for n = 0 the sum over both branches)
    pub cross: BTreeMap<i64, C64>,
    pub coefficients: Vec<(Mode, C64)>,
    pub v_hat: Potential,
    /// set when the two-dimensional n = 0 component was fixed by the minimum-norm gauge
    pub zero_gauge_note: bool,
    pub b: BEstimate,
}

/// Four-spectra reconstruction of v with the probe g.
pub fn reconstruct_v(bundle: &SpectraBundle, probe: &Potential, basis: &Basis, opts: ReconstructOptions) -> Result<RecoveredData> {
    let base = recover_weights(&bundle.s0, &bundle.s_v)?;
    if base.vanishing {
        return Ok(RecoveredData {
            alpha_hat: 0.0,
            weights: BTreeMap::new(),
            cross: BTreeMap::new(),
            coefficients: Vec::new(),
            v_hat: Potential::zero(basis.n_max()),
            zero_gauge_note: false,
            b: base.b,
        });
    }
    let alpha = base.alpha_hat;
    let rg = recover_residues(&bundle.s0, &bundle.s_vg)?.values;
    let rig = recover_residues(&bundle.s0, &bundle.s_vig)?.values;
    let g1 = |n: i64| probe.coeff(Mode::new(n, 1));
    let g2 = probe.coeff(Mode::new(0, 2));
    let mut cross = BTreeMap::new();
    let mut coefficients = Vec::new();
    let mut zero_gauge_note = false;
    for (&n, &w) in &base.weights {
        let gw = probe.weight(n);
        let sum_g = rg.get(&n).copied().unwrap_or(0.0) / alpha;
        let sum_ig = rig.get(&n).copied().unwrap_or(0.0) / alpha;
        let x = C64::new(0.5 * (sum_g - w - gw), 0.5 * (sum_ig - w - gw));
        cross.insert(n, x);
        let gnorm = gw.sqrt();
        if gnorm < opts.g_floor {
            return Err(Error::GFloorViolation { n, g_abs: gnorm, floor: opts.g_floor });
        }
        let from_cross = x.norm() / gnorm;
        let from_weight = w.max(0.0).sqrt();
        if n != 0 && (from_cross - from_weight).abs() > opts.modulus_tol * from_weight.max(1e-3) {
            return Err(Error::InconsistentModulus { n, from_cross, from_weight });
        }
        if n != 0 {
            coefficients.push((Mode::new(n, 1), x / g1(n).conj()));
        } else {
            // v_0 = X g_0 / |g_0|^2 + t g_0^perp with |t|^2 = |v_0|^2 - |X|^2 / |g_0|^2
            let g = [g1(0), g2];
            let par = [x * g[0] / gw, x * g[1] / gw];
            let rest = w - x.norm_sqr() / gw;
            let mut c = par;
            if rest > 1e-12 {
                let t = rest.sqrt() / gnorm;
                c[0] += -g[1].conj() * t;
                c[1] += g[0].conj() * t;
                zero_gauge_note = true;
            }
            coefficients.push((Mode::new(0, 1), c[0]));
            coefficients.push((Mode::new(0, 2), c[1]));
        }
    }
    let v_hat = Potential::from_coefficients(&coefficients, basis)?;
    Ok(RecoveredData { alpha_hat: alpha, weights: base.weights, cross, coefficients, v_hat, zero_gauge_note, b: base.b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_b1() {
        let basis = Basis::new(10).unwrap();
        let v = Potential::from_fn(|_| C64::new(1.0, 0.0), &basis);
        let b = b_forward(&v, 0.7).unwrap();
        assert!((b[0] - 0.7 / 12.0).abs() < 1e-13);
        assert!((b[1] + 1.0 / 12.0).abs() < 1e-13);
        assert!((b1_printed(&v, 0.7).unwrap() - b[0]).abs() < 1e-13);
        let s = spectrum_alpha(&v, 0.7, &basis, None).unwrap();
        let est = b_from_spectra(basis.spectrum(), &s).unwrap();
        assert_eq!(est.case, CaseTag::B1Case);
        assert!((est.value - 0.7 / 12.0).abs() <= est.spread + 1e-10);
    }

    #[test]
    fn single_mode_round_trip() {
        let basis = Basis::new(12).unwrap();
        let v = Potential::from_coefficients(&[(Mode::new(3, 1), C64::new(1.0, 0.0))], &basis).unwrap();
        let s = spectrum_alpha(&v, 1.0, &basis, None).unwrap();
        let w = recover_weights(basis.spectrum(), &s).unwrap();
        assert!((w.alpha_hat - 1.0).abs() < 1e-9);
        assert_eq!(w.weights.len(), 1);
        assert!((w.weights[&3] - 1.0).abs() < 1e-9);
        let b = b_forward(&v, 1.0).unwrap();
        let l3 = basis.lambda(3);
        assert!((b[1] + (l3 + 1.0) / (12.0 * l3)).abs() < 1e-12);
    }

    #[test]
    fn zero_potential() {
        let basis = Basis::new(5).unwrap();
        let v = Potential::zero(5);
        let s = spectrum_alpha(&v, 1.0, &basis, None).unwrap();
        assert!(ambarzumyan_check(basis.spectrum(), &s, 1e-12));
        let b = b_from_spectra(basis.spectrum(), &s).unwrap();
        assert_eq!(b.value, -1.0 / 12.0);
        let w = recover_weights(basis.spectrum(), &s).unwrap();
        assert!(w.vanishing && w.weights.is_empty());
    }

    fn sample_potential(basis: &Basis) -> Potential {
        let coeffs: Vec<(Mode, C64)> = (-4i64..=4)
            .map(|n| (Mode::new(n, 1), C64::new(0.3 + 0.1 * n as f64, 0.05 * n as f64 - 0.1)))
            .chain([(Mode::new(0, 2), C64::new(0.2, 0.1))])
            .collect();
        Potential::from_coefficients(&coeffs, basis).unwrap().normalized()
    }

    #[test]
    fn four_spectra_with_quadratic_probe() {
        let basis = Basis::new(6).unwrap();
        let v = sample_potential(&basis);
        let probe = Potential::from_fn(|x| C64::new(x * x + 0.5, x), &basis);
        let bundle = simulate_bundle(&v, 1.5, &probe, &basis).unwrap();
        let rec = reconstruct_v(&bundle, &probe, &basis, ReconstructOptions::default()).unwrap();
        assert!((rec.alpha_hat - 1.5).abs() < 1e-7);
        for (m, c) in v.coefficients() {
            if m.n != 0 {
                assert!((rec.v_hat.coeff(*m) - c).norm() < 1e-6, "{m:?}");
            }
        }
        let w0: f64 = rec.v_hat.weight(0);
        assert!((w0 - v.weight(0)).abs() < 1e-7);
    }

    #[test]
    fn linear_probe_is_degenerate() {
        let basis = Basis::new(4).unwrap();
        let v = sample_potential(&basis);
        let probe = default_probe(&basis);
        let bundle = simulate_bundle(&v, 1.0, &probe, &basis).unwrap();
        let err = reconstruct_v(&bundle, &probe, &basis, ReconstructOptions::default()).unwrap_err();
        assert!(matches!(err, Error::GFloorViolation { .. }));
    }
}
