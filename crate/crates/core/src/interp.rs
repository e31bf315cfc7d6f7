//! Natural cubic splines for complex samples on a strictly increasing real grid.

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<C64>,
    m: Vec<C64>,
}

impl CubicSpline {
    /// Panics unless `x` is strictly increasing with at least two points.
    pub fn new(x: Vec<f64>, y: Vec<C64>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len());
        assert!(x.windows(2).all(|w| w[1] > w[0]), "spline grid must be increasing");
        let n = x.len();
        let mut m = vec![C64::new(0.0, 0.0); n];
        if n > 2 {
            // Thomas algorithm on the second-derivative system
            let mut c = vec![0.0; n];
            let mut d = vec![C64::new(0.0, 0.0); n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - d[i - 1] * h0) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - m[i + 1] * c[i];
            }
        }
        Self { x, y, m }
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[C64] {
        &self.y
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Value and first derivative; extrapolates with the end cubic outside the grid.
    pub fn eval_with_derivative(&self, t: f64) -> (C64, C64) {
        let i = self.locate(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let v = y0 * a + y1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let dv = (y1 - y0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0);
        (v, dv)
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.eval_with_derivative(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<C64> = x.iter().map(|&t| C64::new(t.sin(), t * t)).collect();
        let s = CubicSpline::new(x.clone(), y.clone());
        for (t, v) in x.iter().zip(&y) {
            assert!((s.eval(*t) - v).norm() < 1e-14);
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let x: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<C64> = x.iter().map(|&t| C64::new(t.sin(), t.cos())).collect();
        let s = CubicSpline::new(x, y);
        let (v, dv) = s.eval_with_derivative(3.333);
        assert!((v - C64::new(3.333f64.sin(), 3.333f64.cos())).norm() < 1e-6);
        assert!((dv - C64::new(3.333f64.cos(), -3.333f64.sin())).norm() < 1e-4);
    }
}
