//! Functions sampled on a uniform grid over [0, 1].

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub xs: Vec<f64>,
    pub values: Vec<C64>,
}

impl GridFunction {
    /// `points` equally spaced samples including both endpoints.
    pub fn uniform<F: Fn(f64) -> C64>(points: usize, f: F) -> Self {
        let points = points.max(2);
        let h = 1.0 / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|j| j as f64 * h).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        GridFunction { xs, values }
    }

    pub fn zeros_like(&self) -> Self {
        GridFunction { xs: self.xs.clone(), values: vec![C64::new(0.0, 0.0); self.xs.len()] }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Piecewise-linear interpolant, clamped outside the grid.
    pub fn interpolate(&self, x: f64) -> C64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.values[0];
        }
        if x >= self.xs[n - 1] {
            return self.values[n - 1];
        }
        let j = self.xs.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let w = (x - x0) / (x1 - x0);
        self.values[j - 1] * (1.0 - w) + self.values[j] * w
    }

    /// Trapezoid-rule L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0;
        for j in 1..self.xs.len() {
            let h = self.xs[j] - self.xs[j - 1];
            acc += 0.5 * h * (self.values[j].norm_sqr() + self.values[j - 1].norm_sqr());
        }
        acc.sqrt()
    }

    /// <self, other> = int self * conj(other), Simpson when the panel count is even.
    pub fn inner(&self, other: &GridFunction) -> C64 {
        let n = self.xs.len();
        let h = self.xs[1] - self.xs[0];
        let prod: Vec<C64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).collect();
        if (n - 1).is_multiple_of(2) && n >= 3 {
            let mut acc = prod[0] + prod[n - 1];
            for (j, p) in prod.iter().enumerate().take(n - 1).skip(1) {
                acc += p * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * (h / 3.0)
        } else {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..n {
                acc += (prod[j] + prod[j - 1]) * (0.5 * (self.xs[j] - self.xs[j - 1]));
            }
            acc
        }
    }

    pub fn l2_distance(&self, other: &GridFunction) -> f64 {
        let diff = GridFunction { xs: self.xs.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() };
        diff.l2_norm()
    }
}

/// L2 norm of `i y''' + extra - lambda y - f` over the interior nodes, with
/// y''' from the 7-point fourth-order central stencil. `extra` is added
/// pointwise (a non-local term, for instance).
pub fn third_order_defect(y: &GridFunction, f: &GridFunction, lambda: C64, extra: Option<&[C64]>) -> f64 {
    const C: [f64; 7] = [0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125];
    let n = y.len();
    let h = y.xs[1] - y.xs[0];
    let h3 = h * h * h;
    let mut acc = 0.0;
    for j in 3..n - 3 {
        let mut d3 = C64::new(0.0, 0.0);
        for (o, c) in C.iter().enumerate() {
            d3 += y.values[j + o - 3] * *c;
        }
        d3 /= h3;
        let mut r = C64::new(0.0, 1.0) * d3 - lambda * y.values[j] - f.values[j];
        if let Some(e) = extra {
            r += e[j];
        }
        acc += r.norm_sqr() * h;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_exact_on_quartics() {
        let y = GridFunction::uniform(101, |x| C64::new(x.powi(4), 0.0));
        // i y''' = 24 i x, so choose f to cancel it
        let f = GridFunction::uniform(101, |x| C64::new(0.0, 24.0 * x));
        assert!(third_order_defect(&y, &f, C64::new(0.0, 0.0), None) < 1e-7);
    }

    #[test]
    fn interpolation_is_linear() {
        let g = GridFunction::uniform(11, |x| C64::new(2.0 * x, -x));
        assert!((g.interpolate(0.37) - C64::new(0.74, -0.37)).norm() < 1e-14);
    }
}
