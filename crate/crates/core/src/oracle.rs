//! Finite-difference check of i y''' + alpha <y, v> v under
//! y''(0) = 0, y'(1) = y'(0), y''(1) = 0.
//!
//! The operator is the pencil A y = lambda B y: equation rows use the centered
//! stencil (-1, 2, -2, 1) / (2 h^3) (one-sided 7-point at node 1), rows 0,
//! M-2 and M-1 carry the boundary conditions and have zero rows in B.
//! Eigenvalues come from shift-invert Arnoldi with a banded LU; the two
//! entries of the periodic-type row that leave the band and the rank-one term
//! enter through Woodbury.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perturbation::PerturbedSpectrum;
use crate::potential::Potential;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const KL: usize = 4;
const KU: usize = 5;

/// Finite-difference weights for the `order`-th derivative at `z` on `nodes`.
pub fn fd_weights(z: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|r| r[order]).collect()
}

/// Band matrix with room for partial-pivoting fill.
#[derive(Debug, Clone)]
struct Band {
    n: usize,
    w: usize,
    data: Vec<C64>,
    piv: Vec<usize>,
}

impl Band {
    fn zeros(n: usize) -> Self {
        let w = 2 * KL + KU + 1;
        Band { n, w, data: vec![C64::new(0.0, 0.0); n * w], piv: Vec::new() }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + KL >= i && j <= i + KL + KU);
        i * self.w + (j + KL - i)
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        if j + KL < i || j > i + KL + KU {
            return C64::new(0.0, 0.0);
        }
        self.data[self.idx(i, j)]
    }

    fn add(&mut self, i: usize, j: usize, v: C64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn factor(&mut self) -> Result<()> {
        let n = self.n;
        self.piv = vec![0; n];
        for k in 0..n {
            let last = (k + KL).min(n - 1);
            let p = (k..=last).max_by(|&a, &b| self.get(a, k).norm().total_cmp(&self.get(b, k).norm())).unwrap();
            if self.get(p, k).norm() == 0.0 {
                return Err(Error::EigensolveFailure(format!("singular shifted matrix at column {k}")));
            }
            self.piv[k] = p;
            let right = (k + KL + KU).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let d = self.get(k, k);
            for i in k + 1..=last {
                let l = self.get(i, k) / d;
                let li = self.idx(i, k);
                self.data[li] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=right {
                    let u = self.get(k, j);
                    self.add(i, j, -l * u);
                }
            }
        }
        Ok(())
    }

    fn solve(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let last = (k + KL).min(n - 1);
            for i in k + 1..=last {
                b[i] -= self.get(i, k) * b[k];
            }
        }
        for k in (0..n).rev() {
            let right = (k + KL + KU).min(n - 1);
            let mut s = b[k];
            for (j, bj) in b.iter().enumerate().take(right + 1).skip(k + 1) {
                s -= self.get(k, j) * bj;
            }
            b[k] = s / self.get(k, k);
        }
    }
}

/// The discretized pencil.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid_size: usize,
    pub h: f64,
    pub alpha: f64,
    /// rows holding boundary conditions (zero rows of B)
    pub bc_rows: [usize; 3],
    band: Band,
    /// entries of row M-2 in columns 0..5 (the -y'(0) part)
    coupling: Vec<f64>,
    v: Vec<C64>,
    quad_w: Vec<f64>,
}

pub fn discretize(v: &Potential, alpha: f64, m: usize) -> Result<DiscreteOperator> {
    if m < 64 {
        return Err(Error::GridTooCoarse { m });
    }
    let h = 1.0 / (m - 1) as f64;
    let xs: Vec<f64> = (0..m).map(|j| j as f64 * h).collect();
    let vals = if alpha == 0.0 || v.is_zero() { vec![C64::new(0.0, 0.0); m] } else { v.sample(&xs)? };
    let mut band = Band::zeros(m);
    let h3 = h * h * h;
    let five: Vec<f64> = (0..5).map(|j| j as f64).collect();
    // y''(0) = 0
    for (j, w) in fd_weights(0.0, &five, 2).into_iter().enumerate() {
        band.add(0, j, C64::new(w / (h * h), 0.0));
    }
    // node 1: one-sided third derivative
    let seven: Vec<f64> = (0..7).map(|j| j as f64).collect();
    for (j, w) in fd_weights(1.0, &seven, 3).into_iter().enumerate() {
        band.add(1, j, I * (w / h3));
    }
    for r in 2..m - 2 {
        for (off, w) in [(-2i64, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)] {
            band.add(r, (r as i64 + off) as usize, I * (w / h3));
        }
    }
    // y'(1) - y'(0) = 0
    let back: Vec<f64> = (0..5).map(|j| -(j as f64)).collect();
    for (j, w) in fd_weights(0.0, &back, 1).into_iter().enumerate() {
        band.add(m - 2, m - 1 - j, C64::new(w / h, 0.0));
    }
    let coupling: Vec<f64> = fd_weights(0.0, &five, 1).into_iter().map(|w| -w / h).collect();
    // y''(1) = 0
    for (j, w) in fd_weights(0.0, &back, 2).into_iter().enumerate() {
        band.add(m - 1, m - 1 - j, C64::new(w / (h * h), 0.0));
    }
    let mut quad_w = vec![h; m];
    quad_w[0] = 0.5 * h;
    quad_w[m - 1] = 0.5 * h;
    Ok(DiscreteOperator { grid_size: m, h, alpha, bc_rows: [0, m - 2, m - 1], band, coupling, v: vals, quad_w })
}

impl DiscreteOperator {
    fn is_bc(&self, r: usize) -> bool {
        self.bc_rows.contains(&r)
    }

    /// A y.
    pub fn apply(&self, y: &[C64]) -> Vec<C64> {
        let m = self.grid_size;
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(KL);
            let hi = (i + KL + KU).min(m - 1);
            *o = (lo..=hi).map(|j| self.band.get(i, j) * y[j]).sum();
        }
        for (j, c) in self.coupling.iter().enumerate() {
            out[m - 2] += y[j] * *c;
        }
        let ip = self.inner_v(y) * self.alpha;
        for (i, o) in out.iter_mut().enumerate() {
            if !self.is_bc(i) {
                *o += ip * self.v[i];
            }
        }
        out
    }

    fn inner_v(&self, y: &[C64]) -> C64 {
        y.iter().zip(&self.v).zip(&self.quad_w).map(|((a, b), w)| a * b.conj() * *w).sum()
    }

    /// Dense copy of A (for inspection).
    pub fn to_dense(&self) -> DMatrix<C64> {
        let m = self.grid_size;
        let mut a = DMatrix::zeros(m, m);
        let mut e = vec![C64::new(0.0, 0.0); m];
        for j in 0..m {
            e[j] = C64::new(1.0, 0.0);
            let col = self.apply(&e);
            for i in 0..m {
                a[(i, j)] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        a
    }
}

/// (A - sigma B)^{-1} via the banded LU plus a rank-two Woodbury update.
struct ShiftInvert<'a> {
    op: &'a DiscreteOperator,
    lu: Band,
    // K^{-1} U for U = [e_{M-2}, alpha v_eq]
    ku: [Vec<C64>; 2],
    cap: nalgebra::Matrix2<C64>,
}

impl<'a> ShiftInvert<'a> {
    fn new(op: &'a DiscreteOperator, sigma: C64) -> Result<Self> {
        let m = op.grid_size;
        let mut lu = op.band.clone();
        for r in 0..m {
            if !op.is_bc(r) {
                lu.add(r, r, -sigma);
            }
        }
        lu.factor()?;
        let mut u0 = vec![C64::new(0.0, 0.0); m];
        u0[m - 2] = C64::new(1.0, 0.0);
        let mut u1: Vec<C64> = (0..m).map(|i| if op.is_bc(i) { C64::new(0.0, 0.0) } else { op.v[i] * op.alpha }).collect();
        lu.solve(&mut u0);
        lu.solve(&mut u1);
        let vt = |k: usize, x: &[C64]| -> C64 {
            if k == 0 {
                op.coupling.iter().enumerate().map(|(j, c)| x[j] * *c).sum()
            } else {
                op.inner_v(x)
            }
        };
        let cap = nalgebra::Matrix2::new(1.0 + vt(0, &u0), vt(0, &u1), vt(1, &u0), 1.0 + vt(1, &u1));
        let cap = cap.try_inverse().ok_or_else(|| Error::EigensolveFailure("singular capacitance matrix".into()))?;
        Ok(ShiftInvert { op, lu, ku: [u0, u1], cap })
    }

    fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let mut x = rhs.to_vec();
        self.lu.solve(&mut x);
        let t0: C64 = self.op.coupling.iter().enumerate().map(|(j, c)| x[j] * *c).sum();
        let t1 = self.op.inner_v(&x);
        let c0 = self.cap[(0, 0)] * t0 + self.cap[(0, 1)] * t1;
        let c1 = self.cap[(1, 0)] * t0 + self.cap[(1, 1)] * t1;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi -= self.ku[0][i] * c0 + self.ku[1][i] * c1;
        }
        x
    }

    /// (A - sigma B)^{-1} B x
    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let bx: Vec<C64> = x.iter().enumerate().map(|(i, v)| if self.op.is_bc(i) { C64::new(0.0, 0.0) } else { *v }).collect();
        self.solve(&bx)
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Ritz values of the shift-invert operator from an Arnoldi run of length `dim`.
fn arnoldi(si: &ShiftInvert, start: &[C64], dim: usize) -> Result<Vec<C64>> {
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(dim + 1);
    let n0 = norm(start);
    q.push(start.iter().map(|x| x / n0).collect());
    let mut hm = DMatrix::<C64>::zeros(dim, dim);
    let mut used = dim;
    for j in 0..dim {
        let mut w = si.apply(&q[j]);
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dot(qi, &w);
                hm[(i, j)] += c;
                for (wk, qk) in w.iter_mut().zip(qi) {
                    *wk -= c * qk;
                }
            }
        }
        let hn = norm(&w);
        if j + 1 < dim {
            hm[(j + 1, j)] = C64::new(hn, 0.0);
        }
        if hn < 1e-300 {
            used = j + 1;
            break;
        }
        q.push(w.into_iter().map(|x| x / hn).collect());
    }
    let h = hm.view((0, 0), (used, used)).into_owned();
    let schur =
        Schur::try_new(h, 1e-14, 10_000).ok_or_else(|| Error::EigensolveFailure("Hessenberg eigenvalues did not converge".into()))?;
    Ok(schur.eigenvalues().map(|e| e.iter().copied().collect()).unwrap_or_default())
}

/// The `count` eigenvalues of smallest modulus, sorted by real part.
pub fn oracle_eigs_complex(op: &DiscreteOperator, count: usize) -> Result<Vec<C64>> {
    if count == 0 || count > op.grid_size / 8 {
        return Err(Error::InvalidInput(format!("count must lie in 1..={}", op.grid_size / 8)));
    }
    let sigma = I;
    let si = ShiftInvert::new(op, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start: Vec<C64> = (0..op.grid_size).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let pick = |thetas: Vec<C64>| -> Vec<C64> {
        let mut ls: Vec<C64> = thetas.into_iter().filter(|t| t.norm() > 1e-14).map(|t| sigma + 1.0 / t).collect();
        ls.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        ls.truncate(count);
        ls
    };
    let mut dim = (3 * count + 20).min(op.grid_size - 3);
    let mut prev = pick(arnoldi(&si, &start, dim)?);
    for _ in 0..6 {
        dim = (dim + count + 20).min(op.grid_size - 3);
        let next = pick(arnoldi(&si, &start, dim)?);
        let settled =
            next.len() == count && prev.len() == count && next.iter().zip(&prev).all(|(a, b)| (a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        prev = next;
        if settled {
            let mut out = prev;
            out.sort_by(|a, b| a.re.total_cmp(&b.re));
            return Ok(out);
        }
    }
    Err(Error::EigensolveFailure("Ritz values did not settle".into()))
}

/// Real parts of `oracle_eigs_complex`.
pub fn oracle_eigs(op: &DiscreteOperator, count: usize) -> Result<Vec<f64>> {
    Ok(oracle_eigs_complex(op, count)?.into_iter().map(|z| z.re).collect())
}

/// One row of the secular-versus-discrete comparison.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Comparison {
    pub secular: f64,
    pub oracle: f64,
    pub rel_diff: f64,
}

/// Pairs the `count` nonzero secular eigenvalues of smallest modulus
/// (multiplicity expanded) with the nearest unused discrete eigenvalue.
pub fn compare_spectra(spec: &PerturbedSpectrum, op: &DiscreteOperator, count: usize) -> Result<Vec<Comparison>> {
    let mut sec: Vec<f64> = spec.values_with_multiplicity().into_iter().filter(|l| *l != 0.0).collect();
    sec.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    sec.truncate(count);
    let disc = oracle_eigs(op, (count + 4).min(op.grid_size / 8))?;
    let mut used = vec![false; disc.len()];
    let mut out = Vec::with_capacity(sec.len());
    for l in sec {
        let j = (0..disc.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (disc[a] - l).abs().total_cmp(&(disc[b] - l).abs()))
            .ok_or_else(|| Error::EigensolveFailure("too few discrete eigenvalues".into()))?;
        used[j] = true;
        out.push(Comparison { secular: l, oracle: disc[j], rel_diff: (disc[j] - l).abs() / l.abs() });
    }
    Ok(out)
}
