//! Potentials v in L2(0, 1): eigenbasis coefficients plus an optional sampler.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spectrum_l0::{Basis, EigenfunctionL0, Mode};

pub type Sampler = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub struct Potential {
    coeffs: BTreeMap<Mode, C64>,
    cutoff: usize,
    sampler: Option<Sampler>,
    norm: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("coeffs", &self.coeffs)
            .field("cutoff", &self.cutoff)
            .field("sampler", &self.sampler.is_some())
            .field("norm", &self.norm)
            .finish()
    }
}

fn synthesize(terms: Vec<(EigenfunctionL0, C64)>) -> Sampler {
    Arc::new(move |x| terms.iter().map(|(u, c)| c * u.eval(x)).sum())
}

impl Potential {
    pub fn zero(cutoff: usize) -> Self {
        Potential { coeffs: BTreeMap::new(), cutoff, sampler: Some(Arc::new(|_| C64::new(0.0, 0.0))), norm: 0.0 }
    }

    /// Samples `f`, projects it on the basis and measures its norm by quadrature.
    pub fn from_fn<F>(f: F, basis: &Basis) -> Self
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        let quad = basis.quadrature();
        let vals: Vec<C64> = quad.nodes().iter().map(|&x| f(x)).collect();
        let norm = vals.iter().zip(quad.weights()).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt();
        let coeffs = basis.project_samples(&vals).into_iter().collect();
        Potential { coeffs, cutoff: basis.n_max(), sampler: Some(Arc::new(f)), norm }
    }

    /// Finite combination of basis functions; the sampler sums the modes.
    pub fn from_coefficients(coeffs: &[(Mode, C64)], basis: &Basis) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut terms = Vec::new();
        for &(m, c) in coeffs {
            let u = basis.function(m).ok_or(Error::InvalidBranch { n: m.n, branch: m.branch })?;
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
            terms.push((u.clone(), c));
        }
        let norm = map.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Ok(Potential { coeffs: map, cutoff: basis.n_max(), sampler: Some(synthesize(terms)), norm })
    }

    /// Coefficients only; integral functionals report `MissingSampler`.
    pub fn coefficient_only(coeffs: &[(Mode, C64)], cutoff: usize) -> Self {
        let mut map = BTreeMap::new();
        for &(m, c) in coeffs {
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let norm = map.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Potential { coeffs: map, cutoff, sampler: None, norm }
    }

    /// Attaches a sampler synthesized from the coefficients by an
    /// eigenfunction evaluator.
    pub fn with_synthesized_sampler<E>(mut self, eval: E) -> Self
    where
        E: Fn(Mode, f64) -> C64 + Send + Sync + 'static,
    {
        let coeffs: Vec<(Mode, C64)> = self.coeffs.iter().map(|(m, c)| (*m, *c)).collect();
        self.sampler = Some(Arc::new(move |x| coeffs.iter().map(|(m, c)| c * eval(*m, x)).sum()));
        self
    }

    /// Piecewise-linear potential through (x, v) samples; x strictly
    /// increasing from 0 to 1.
    pub fn from_table(xs: Vec<f64>, vs: Vec<C64>, basis: &Basis) -> Result<Self> {
        if xs.len() < 2 || xs.len() != vs.len() {
            return Err(Error::InvalidInput("potential table needs at least two rows".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("x values must be strictly increasing".into()));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput("x values must include both endpoints 0 and 1".into()));
        }
        let g = crate::grid::GridFunction { xs, values: vs };
        Ok(Potential::from_fn(move |x| g.interpolate(x), basis))
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    pub fn coefficients(&self) -> &BTreeMap<Mode, C64> {
        &self.coeffs
    }

    pub fn coeff(&self, m: Mode) -> C64 {
        self.coeffs.get(&m).copied().unwrap_or_default()
    }

    /// |v_n|^2, summing both branches at n = 0.
    pub fn weight(&self, n: i64) -> f64 {
        self.coeffs.iter().filter(|(m, _)| m.n == n).map(|(_, c)| c.norm_sqr()).sum()
    }

    /// L2 mass outside the stored coefficients.
    pub fn tail_norm(&self) -> f64 {
        let inside: f64 = self.coeffs.values().map(|c| c.norm_sqr()).sum();
        (self.norm * self.norm - inside).max(0.0).sqrt()
    }

    pub fn eval(&self, x: f64) -> Result<C64> {
        self.sampler.as_ref().map(|s| s(x)).ok_or(Error::MissingSampler)
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<C64>> {
        let s = self.sampler.as_ref().ok_or(Error::MissingSampler)?;
        Ok(xs.iter().map(|&x| s(x)).collect())
    }

    /// c v.
    pub fn scaled(&self, c: C64) -> Potential {
        Potential {
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, v * c)).collect(),
            cutoff: self.cutoff,
            sampler: self.sampler.clone().map(|s| Arc::new(move |x| s(x) * c) as Sampler),
            norm: self.norm * c.norm(),
        }
    }

    /// v / ||v|| (unchanged if v = 0).
    pub fn normalized(&self) -> Potential {
        if self.norm == 0.0 {
            return self.clone();
        }
        let mut p = self.scaled(C64::new(1.0 / self.norm, 0.0));
        p.norm = 1.0;
        p
    }

    /// v + w. The norm is recomputed from the coefficients when both are
    /// coefficient-exact, otherwise from `basis` quadrature.
    pub fn add(&self, other: &Potential, basis: &Basis) -> Potential {
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            *coeffs.entry(*m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let sampler = match (&self.sampler, &other.sampler) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |x| a(x) + b(x)) as Sampler)
            }
            _ => None,
        };
        let norm = match &sampler {
            Some(s) => {
                let q = basis.quadrature();
                q.integrate_real(|x| s(x).norm_sqr()).sqrt()
            }
            None => coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
        };
        Potential { coeffs, cutoff: self.cutoff.min(other.cutoff), sampler, norm }
    }

    /// Drops coefficients with |n| above `n_max`.
    pub fn truncated_coefficients(&self, n_max: i64) -> Vec<(Mode, C64)> {
        self.coeffs.iter().filter(|(m, _)| m.n.abs() <= n_max).map(|(m, c)| (*m, *c)).collect()
    }
}
