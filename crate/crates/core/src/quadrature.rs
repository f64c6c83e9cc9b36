//! Composite Gauss-Legendre rules on [0, 1].

use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct Quadrature {
    panels: usize,
    order: usize,
    // reference rule on [0, 1]
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::new(64, 8)
    }
}

impl Quadrature {
    pub fn new(panels: usize, order: usize) -> Self {
        let panels = panels.max(1);
        let order = order.max(2);
        let gl = GaussLegendre::new(order).expect("order >= 2");
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ref_nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ref_weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = p as f64 * h;
            for (t, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(a + h * t);
                weights.push(h * w);
            }
        }
        Quadrature { panels, order, ref_nodes, ref_weights, nodes, weights }
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same rule with half as many panels, used for error estimates.
    pub fn coarse(&self) -> Quadrature {
        Quadrature::new((self.panels / 2).max(1), self.order)
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    /// Integrates values already sampled at `nodes()`.
    pub fn integrate_samples(&self, vals: &[C64]) -> C64 {
        vals.iter().zip(&self.weights).map(|(v, &w)| v * w).sum()
    }

    /// Iterated rule on the triangle 0 <= t <= x <= 1 for
    /// `outer(x) * inner(t) * kernel(x - t)`.
    ///
    /// The inner integral over [0, x] uses every full panel left of x plus the
    /// reference rule rescaled to the partial panel, so the inner samples are
    /// shared between outer nodes.
    pub fn triangle<O, I, K>(&self, outer: O, inner: I, kernel: K) -> C64
    where
        O: Fn(f64) -> C64 + Sync,
        I: Fn(f64) -> C64 + Sync,
        K: Fn(f64) -> C64 + Sync,
    {
        let h = 1.0 / self.panels as f64;
        let q = self.order;
        let inner_full: Vec<C64> = self.nodes.iter().map(|&t| inner(t)).collect();
        (0..self.nodes.len())
            .into_par_iter()
            .map(|idx| {
                let x = self.nodes[idx];
                let p = idx / q;
                let a = p as f64 * h;
                let mut acc = C64::new(0.0, 0.0);
                for ((t, f), w) in self.nodes.iter().zip(&inner_full).zip(&self.weights).take(p * q) {
                    acc += f * kernel(x - t) * *w;
                }
                let len = x - a;
                for (r, w) in self.ref_nodes.iter().zip(&self.ref_weights) {
                    let t = a + len * r;
                    acc += inner(t) * kernel(x - t) * (len * w);
                }
                outer(x) * acc * self.weights[idx]
            })
            .sum()
    }
}
