//! Chebyshev series on the reference interval [-1, 1] and Gauss-Legendre rules.
//!
//! Every polynomial piece of a [`PiecewiseFunction`](super::PiecewiseFunction)
//! is stored as a Chebyshev series in the local coordinate of its
//! sub-interval. Re-expressing a piece on a sub-interval, building a piece from
//! samples and antidifferentiating all reduce to interpolation at Chebyshev
//! points of the first kind, which is exact (up to rounding) whenever the
//! sample count exceeds the polynomial degree.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

/// A Chebyshev series `sum_k c_k T_k(s)` on `s in [-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cheb {
    c: Vec<f64>,
}

impl Cheb {
    pub fn from_coeffs(mut c: Vec<f64>) -> Self {
        if c.is_empty() {
            c.push(0.0);
        }
        Cheb { c }
    }

    pub fn constant(v: f64) -> Self {
        Cheb { c: vec![v] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, s: f64) -> f64 {
        let n = self.c.len();
        if n == 1 {
            return self.c[0];
        }
        let (mut b1, mut b2) = (0.0, 0.0);
        let two_s = 2.0 * s;
        for k in (1..n).rev() {
            let b0 = self.c[k] + two_s * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.c[0] + s * b1 - b2
    }

    /// Interpolant through `values` sampled at the first-kind nodes
    /// returned by [`first_kind_nodes`] for `values.len()`.
    pub fn interpolate(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "interpolation needs at least one sample");
        let table = cos_table(n);
        let mut c = vec![0.0; n];
        for (k, ck) in c.iter_mut().enumerate() {
            let row = &table[k * n..(k + 1) * n];
            let acc: f64 = row.iter().zip(values).map(|(a, b)| a * b).sum();
            *ck = 2.0 * acc / n as f64;
        }
        c[0] *= 0.5;
        Cheb { c }
    }

    /// Antiderivative in the physical variable of a piece with the given
    /// half width, normalised to vanish at `s = -1`.
    pub fn antiderivative(&self, half_width: f64) -> Self {
        let n = self.c.len();
        let coef = |k: usize| if k < n { self.c[k] } else { 0.0 };
        let mut out = vec![0.0; n + 1];
        out[1] = coef(0) - 0.5 * coef(2);
        for k in 2..=n {
            out[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * k as f64);
        }
        // value at s = -1 is sum_k out[k] (-1)^k
        let mut at_minus_one = 0.0;
        for (k, v) in out.iter().enumerate().skip(1) {
            if k % 2 == 0 {
                at_minus_one += v;
            } else {
                at_minus_one -= v;
            }
        }
        out[0] = -at_minus_one;
        for v in &mut out {
            *v *= half_width;
        }
        let mut c = Cheb { c: out };
        c.trim_zeros();
        c
    }

    /// Drop trailing coefficients that are exactly zero.
    pub fn trim_zeros(&mut self) {
        while self.c.len() > 1 && self.c.last() == Some(&0.0) {
            self.c.pop();
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Cheb {
            c: self.c.iter().map(|v| v * a).collect(),
        }
    }

    pub fn plus(&self, other: &Cheb) -> Self {
        let n = self.c.len().max(other.c.len());
        let c = (0..n)
            .map(|k| self.c.get(k).copied().unwrap_or(0.0) + other.c.get(k).copied().unwrap_or(0.0))
            .collect();
        Cheb { c }
    }

    pub fn add_constant(&mut self, v: f64) {
        self.c[0] += v;
    }

    /// Re-expand this piece (living on `[lo, hi]`) on the sub-interval `[u, v]`.
    pub fn resample(&self, lo: f64, hi: f64, u: f64, v: f64) -> Self {
        if u == lo && v == hi {
            return self.clone();
        }
        let n = self.c.len();
        if n == 1 || self.c[1..].iter().all(|&v| v == 0.0) {
            return Cheb::constant(self.c[0]);
        }
        let vals: Vec<f64> = first_kind_nodes(n)
            .iter()
            .map(|&s| {
                let t = map_from_ref(u, v, s);
                self.eval(map_to_ref(lo, hi, t))
            })
            .collect();
        Cheb::interpolate(&vals)
    }

    /// Drop trailing coefficients that are negligible relative to `scale`.
    pub fn chop(&mut self, scale: f64) {
        let thresh = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        while self.c.len() > 1 && self.c.last().is_some_and(|v| v.abs() <= thresh) {
            self.c.pop();
        }
    }
}

/// Map `t in [lo, hi]` to the reference coordinate.
#[inline]
pub fn map_to_ref(lo: f64, hi: f64, t: f64) -> f64 {
    (2.0 * t - lo - hi) / (hi - lo)
}

/// Map the reference coordinate back to `[lo, hi]`.
#[inline]
pub fn map_from_ref(lo: f64, hi: f64, s: f64) -> f64 {
    0.5 * (lo + hi) + 0.5 * (hi - lo) * s
}

type Cache<T> = OnceLock<RwLock<HashMap<usize, Arc<T>>>>;

fn cached<T, F: FnOnce() -> T>(cache: &'static Cache<T>, n: usize, build: F) -> Arc<T> {
    let map = cache.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = map.read().expect("cache poisoned").get(&n) {
        return v.clone();
    }
    let v = Arc::new(build());
    map.write().expect("cache poisoned").entry(n).or_insert(v).clone()
}

/// Chebyshev points of the first kind, `cos(pi (j + 1/2) / n)`; interior to [-1, 1].
pub fn first_kind_nodes(n: usize) -> Arc<Vec<f64>> {
    static CACHE: Cache<Vec<f64>> = OnceLock::new();
    cached(&CACHE, n, || {
        (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect()
    })
}

/// Chebyshev extrema `cos(pi j / m)`, `j = 0..=m`, including both ends.
pub fn extrema_points(m: usize) -> Vec<f64> {
    (0..=m).map(|j| (PI * j as f64 / m as f64).cos()).collect()
}

fn cos_table(n: usize) -> Arc<Vec<f64>> {
    static CACHE: Cache<Vec<f64>> = OnceLock::new();
    cached(&CACHE, n, || {
        let mut t = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                t[k * n + j] = (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
        }
        t
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Cached `n`-point rule (exact for degree `2n - 1`).
    pub fn rule(n: usize) -> Arc<GaussLegendre> {
        static CACHE: Cache<GaussLegendre> = OnceLock::new();
        cached(&CACHE, n, || GaussLegendre::compute(n))
    }

    fn compute(n: usize) -> GaussLegendre {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Newton on P_n from the Tricomi initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interpolation_reproduces_polynomials() {
        let f = |s: f64| 1.0 - 2.0 * s + 0.5 * s.powi(3) + s.powi(5);
        let nodes = first_kind_nodes(9);
        let vals: Vec<f64> = nodes.iter().map(|&s| f(s)).collect();
        let c = Cheb::interpolate(&vals);
        for s in [-1.0, -0.3, 0.0, 0.77, 1.0] {
            assert_abs_diff_eq!(c.eval(s), f(s), epsilon = 1e-14);
        }
        // T_5 coefficient of s^5 is 1/16; degree-5 content only.
        assert!(c.coeffs()[6..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn antiderivative_of_linear() {
        // f(t) = t on [0, 2]: local s -> t = 1 + s, so f = 1 + s.
        let f = Cheb::from_coeffs(vec![1.0, 1.0]);
        let big_f = f.antiderivative(1.0);
        // F(t) = t^2 / 2, at s = -1 (t = 0) zero, at s = 1 (t = 2) 2.
        assert_abs_diff_eq!(big_f.eval(-1.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(big_f.eval(1.0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(big_f.eval(0.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 16, 33] {
            let rule = GaussLegendre::rule(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-13);
            let deg = 2 * n - 2; // even monomial of top exact even degree
            let exact = 2.0 / (deg as f64 + 1.0);
            let q: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(deg as i32))
                .sum();
            assert_abs_diff_eq!(q, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn resample_on_subinterval() {
        // f(t) = t^2 on [0, 4] expressed locally, restricted to [1, 3].
        let nodes = first_kind_nodes(3);
        let vals: Vec<f64> = nodes.iter().map(|&s| map_from_ref(0.0, 4.0, s).powi(2)).collect();
        let c = Cheb::interpolate(&vals);
        let sub = c.resample(0.0, 4.0, 1.0, 3.0);
        for t in [1.0, 1.5, 2.9, 3.0] {
            assert_abs_diff_eq!(sub.eval(map_to_ref(1.0, 3.0, t)), t * t, epsilon = 1e-13);
        }
    }
}
