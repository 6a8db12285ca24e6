use super::cheb::{first_kind_nodes, map_from_ref, map_to_ref, Cheb};
use super::quadrature::{self, euclid, PiecewiseEval, QuadratureConfig};
use crate::error::{Error, Result};

/// Relative width below which two breakpoints are treated as one.
const MERGE_EPS: f64 = 1e-13;

/// Piecewise-polynomial representative of a function `[a, b] -> R^N`.
///
/// Pieces live on half-open intervals `[t_i, t_{i+1})`; the value at `b` is
/// the separately stored endpoint value. Isolated point values (a null set)
/// may override the polynomial at finitely many points of `[a, b)`. They are
/// visible to [`evaluate`](Self::evaluate) and invisible to every integral.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction {
    breaks: Vec<f64>,
    pieces: Vec<Vec<Cheb>>,
    endpoint: Vec<f64>,
    points: Vec<(f64, Vec<f64>)>,
}

impl PiecewiseFunction {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Vec<Cheb>>, endpoint: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::Breakpoints("need at least two breakpoints".into()));
        }
        if breaks.iter().any(|t| !t.is_finite()) {
            return Err(Error::Breakpoints("breakpoints must be finite".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Breakpoints("breakpoints must be strictly increasing".into()));
        }
        if pieces.len() != breaks.len() - 1 {
            return Err(Error::Breakpoints(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len() - 1,
                pieces.len()
            )));
        }
        let dim = endpoint.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for p in &pieces {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        Ok(PiecewiseFunction {
            breaks,
            pieces,
            endpoint,
            points: Vec::new(),
        })
    }

    pub fn constant(a: f64, b: f64, value: &[f64]) -> Result<Self> {
        let piece = value.iter().map(|&v| Cheb::constant(v)).collect();
        Self::new(vec![a, b], vec![piece], value.to_vec())
    }

    pub fn zero(a: f64, b: f64, dim: usize) -> Result<Self> {
        Self::constant(a, b, &vec![0.0; dim])
    }

    /// Build from monomial coefficients in the absolute variable:
    /// piece `i`, component `j` is `sum_k coeffs[i][j][k] t^k`.
    pub fn from_monomials(breaks: Vec<f64>, coeffs: &[Vec<Vec<f64>>], endpoint: Vec<f64>) -> Result<Self> {
        if coeffs.len() + 1 != breaks.len() {
            return Err(Error::Breakpoints(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len().saturating_sub(1),
                coeffs.len()
            )));
        }
        let mut pieces = Vec::with_capacity(coeffs.len());
        for (i, comps) in coeffs.iter().enumerate() {
            let (lo, hi) = (breaks[i], breaks[i + 1]);
            let piece = comps
                .iter()
                .map(|mono| {
                    let n = mono.len().max(1);
                    let vals: Vec<f64> = first_kind_nodes(n)
                        .iter()
                        .map(|&s| horner(mono, map_from_ref(lo, hi, s)))
                        .collect();
                    Cheb::interpolate(&vals)
                })
                .collect();
            pieces.push(piece);
        }
        Self::new(breaks, pieces, endpoint)
    }

    /// Interpolate `g` at `degree + 1` Chebyshev points on every piece.
    pub fn from_fn<G>(breaks: Vec<f64>, dim: usize, degree: usize, endpoint: Vec<f64>, mut g: G) -> Result<Self>
    where
        G: FnMut(f64, &mut [f64]),
    {
        let n = degree + 1;
        let nodes = first_kind_nodes(n);
        let mut pieces = Vec::with_capacity(breaks.len().saturating_sub(1));
        let mut buf = vec![0.0; dim];
        for w in breaks.windows(2) {
            let mut samples = vec![vec![0.0; n]; dim];
            for (j, &s) in nodes.iter().enumerate() {
                g(map_from_ref(w[0], w[1], s), &mut buf);
                for c in 0..dim {
                    samples[c][j] = buf[c];
                }
            }
            pieces.push(samples.iter().map(|v| Cheb::interpolate(v)).collect());
        }
        Self::new(breaks, pieces, endpoint)
    }

    pub fn start(&self) -> f64 {
        self.breaks[0]
    }

    pub fn end(&self) -> f64 {
        *self.breaks.last().expect("nonempty")
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.start(), self.end())
    }

    pub fn dim(&self) -> usize {
        self.endpoint.len()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<Cheb>] {
        &self.pieces
    }

    pub fn endpoint(&self) -> &[f64] {
        &self.endpoint
    }

    pub fn point_values(&self) -> &[(f64, Vec<f64>)] {
        &self.points
    }

    pub fn max_degree(&self) -> usize {
        self.pieces
            .iter()
            .flat_map(|p| p.iter().map(Cheb::degree))
            .max()
            .unwrap_or(0)
    }

    /// Index of the piece whose half-open interval holds `t` (last piece for `t = b`).
    pub fn locate(&self, t: f64) -> usize {
        let n = self.pieces.len();
        let idx = self.breaks.partition_point(|&b| b <= t);
        idx.saturating_sub(1).min(n - 1)
    }

    pub fn eval_piece_into(&self, i: usize, t: f64, out: &mut [f64]) {
        let (lo, hi) = (self.breaks[i], self.breaks[i + 1]);
        let s = map_to_ref(lo, hi, t);
        for (o, c) in out.iter_mut().zip(&self.pieces[i]) {
            *o = c.eval(s);
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain();
        if !(t >= a && t <= b) {
            return Err(Error::Domain { t, a, b });
        }
        Ok(())
    }

    /// Pointwise value of the representative.
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        Ok(self.value_unchecked(t))
    }

    fn value_unchecked(&self, t: f64) -> Vec<f64> {
        if t == self.end() {
            return self.endpoint.clone();
        }
        if let Ok(k) = self.points.binary_search_by(|(s, _)| s.total_cmp(&t)) {
            return self.points[k].1.clone();
        }
        let mut out = vec![0.0; self.dim()];
        self.eval_piece_into(self.locate(t), t, &mut out);
        out
    }

    /// Limit from the left at `t in (a, b]`.
    pub fn left_limit(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        let i = self.breaks.partition_point(|&b| b < t).saturating_sub(1);
        let mut out = vec![0.0; self.dim()];
        self.eval_piece_into(i, t, &mut out);
        Ok(out)
    }

    /// Largest jump between one-sided limits at the interior breakpoints.
    pub fn max_interior_jump(&self) -> f64 {
        let dim = self.dim();
        let (mut l, mut r) = (vec![0.0; dim], vec![0.0; dim]);
        let mut worst = 0.0f64;
        for i in 1..self.pieces.len() {
            let t = self.breaks[i];
            self.eval_piece_into(i - 1, t, &mut l);
            self.eval_piece_into(i, t, &mut r);
            let d: Vec<f64> = l.iter().zip(&r).map(|(x, y)| x - y).collect();
            worst = worst.max(euclid(&d));
        }
        worst
    }

    pub fn with_endpoint(mut self, value: Vec<f64>) -> Result<Self> {
        if value.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: value.len(),
            });
        }
        self.endpoint = value;
        Ok(self)
    }

    /// Override the value at a single point of `[a, b)` (a null-set edit).
    /// Setting `t = b` replaces the endpoint value.
    pub fn with_point_value(mut self, t: f64, value: Vec<f64>) -> Result<Self> {
        self.check_domain(t)?;
        if value.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: value.len(),
            });
        }
        if t == self.end() {
            self.endpoint = value;
            return Ok(self);
        }
        match self.points.binary_search_by(|(s, _)| s.total_cmp(&t)) {
            Ok(k) => self.points[k].1 = value,
            Err(k) => self.points.insert(k, (t, value)),
        }
        Ok(self)
    }

    /// `t -> f(t - r)` on `[a + r, b + r]`.
    pub fn shift(&self, r: f64) -> Self {
        PiecewiseFunction {
            breaks: self.breaks.iter().map(|t| t + r).collect(),
            pieces: self.pieces.clone(),
            endpoint: self.endpoint.clone(),
            points: self.points.iter().map(|(t, v)| (t + r, v.clone())).collect(),
        }
    }

    /// Replace the first and last breakpoints by `a` and `b` (used to absorb
    /// rounding after a shift). Interior breakpoints must stay inside.
    pub(crate) fn snap_domain(mut self, a: f64, b: f64) -> Result<Self> {
        let n = self.breaks.len();
        self.breaks[0] = a;
        self.breaks[n - 1] = b;
        if self.breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Breakpoints(format!("cannot snap domain to [{a}, {b}]")));
        }
        self.points.retain(|(t, _)| *t >= a && *t < b);
        Ok(self)
    }

    pub fn scale(&self, c: f64) -> Self {
        PiecewiseFunction {
            breaks: self.breaks.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|ch| ch.scaled(c)).collect())
                .collect(),
            endpoint: self.endpoint.iter().map(|v| v * c).collect(),
            points: self
                .points
                .iter()
                .map(|(t, v)| (*t, v.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }

    fn same_domain(&self, other: &Self) -> Result<()> {
        let (a0, b0) = self.domain();
        let (a1, b1) = other.domain();
        let tol = MERGE_EPS * (b0 - a0).abs().max(1.0);
        if (a0 - a1).abs() > tol || (b0 - b1).abs() > tol {
            return Err(Error::DomainMismatch { a0, b0, a1, b1 });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Pieces of `self` re-expanded on a partition that refines its own.
    fn pieces_on(&self, partition: &[f64]) -> Vec<Vec<Cheb>> {
        partition
            .windows(2)
            .map(|w| {
                let i = self.locate(0.5 * (w[0] + w[1]));
                let (lo, hi) = (self.breaks[i], self.breaks[i + 1]);
                self.pieces[i].iter().map(|c| c.resample(lo, hi, w[0], w[1])).collect()
            })
            .collect()
    }

    /// `a * self + b * other` on the merged partition.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_domain(other)?;
        let partition = merge_breaks(&self.breaks, &other.breaks);
        let left = self.pieces_on(&partition);
        let right = other.pieces_on(&partition);
        let pieces = left
            .iter()
            .zip(&right)
            .map(|(l, r)| l.iter().zip(r).map(|(x, y)| x.scaled(a).plus(&y.scaled(b))).collect())
            .collect();
        let endpoint = self
            .endpoint
            .iter()
            .zip(&other.endpoint)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let mut out = PiecewiseFunction::new(partition, pieces, endpoint)?;
        out.points = merged_points(self, other, |x, y| a * x + b * y);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    /// Restriction to `[c, d]`. The endpoint value is the representative's
    /// pointwise value at `d`.
    pub fn restrict(&self, c: f64, d: f64) -> Result<Self> {
        let (a, b) = self.domain();
        let tol = MERGE_EPS * (b - a).abs().max(1.0);
        if !(c < d) || c < a - tol || d > b + tol {
            return Err(Error::DomainMismatch {
                a0: a,
                b0: b,
                a1: c,
                b1: d,
            });
        }
        let (c, d) = (c.max(a), d.min(b));
        let width_tol = MERGE_EPS * (d - c).abs().max(1.0);
        let mut partition = vec![c];
        partition.extend(
            self.breaks
                .iter()
                .copied()
                .filter(|&t| t > c + width_tol && t < d - width_tol),
        );
        partition.push(d);
        let pieces = self.pieces_on(&partition);
        let endpoint = self.value_unchecked(d);
        let mut out = PiecewiseFunction::new(partition, pieces, endpoint)?;
        out.points = self.points.iter().filter(|(t, _)| *t >= c && *t < d).cloned().collect();
        Ok(out)
    }

    /// Join `self` on `[a, b]` with `next` on `[b, c]`. The value at `b`
    /// comes from `next`.
    pub fn concat(&self, next: &Self) -> Result<Self> {
        let (a, b) = self.domain();
        let tol = MERGE_EPS * (b - a).abs().max(1.0).max(next.end().abs());
        if (next.start() - b).abs() > tol {
            return Err(Error::DomainMismatch {
                a0: a,
                b0: b,
                a1: next.start(),
                b1: next.end(),
            });
        }
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: next.dim(),
            });
        }
        let mut breaks = self.breaks.clone();
        breaks.extend_from_slice(&next.breaks[1..]);
        let mut pieces = self.pieces.clone();
        pieces.extend(next.pieces.iter().cloned());
        let mut out = PiecewiseFunction::new(breaks, pieces, next.endpoint.clone())?;
        out.points = self.points.clone();
        out.points.extend(next.points.iter().cloned());
        Ok(out)
    }

    /// Component-wise concatenation `t -> (self(t), other(t))`.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        let (a0, b0) = self.domain();
        let (a1, b1) = other.domain();
        let tol = MERGE_EPS * (b0 - a0).abs().max(1.0);
        if (a0 - a1).abs() > tol || (b0 - b1).abs() > tol {
            return Err(Error::DomainMismatch { a0, b0, a1, b1 });
        }
        let partition = merge_breaks(&self.breaks, &other.breaks);
        let left = self.pieces_on(&partition);
        let right = other.pieces_on(&partition);
        let pieces = left
            .into_iter()
            .zip(right)
            .map(|(mut l, r)| {
                l.extend(r);
                l
            })
            .collect();
        let mut endpoint = self.endpoint.clone();
        endpoint.extend_from_slice(&other.endpoint);
        let mut out = PiecewiseFunction::new(partition, pieces, endpoint)?;
        let mut ts: Vec<f64> = self.points.iter().chain(&other.points).map(|(t, _)| *t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        out.points = ts
            .into_iter()
            .map(|t| {
                let mut v = self.value_unchecked(t);
                v.extend(other.value_unchecked(t));
                (t, v)
            })
            .collect();
        Ok(out)
    }

    pub fn lp_norm(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        quadrature::lp_norm(self, p, cfg)
    }

    /// `int |f|^p`, without taking the root.
    pub fn lp_integral(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        quadrature::lp_integral(self, p, cfg)
    }

    pub fn sup_norm(&self, cfg: &QuadratureConfig) -> f64 {
        quadrature::sup_norm(self, cfg)
    }

    /// Values on `n` equispaced points of the domain (both ends included).
    pub fn sample(&self, n: usize) -> Vec<(f64, Vec<f64>)> {
        let (a, b) = self.domain();
        (0..n)
            .map(|j| {
                let t = if j + 1 == n {
                    b
                } else {
                    a + (b - a) * j as f64 / (n - 1).max(1) as f64
                };
                (t, self.value_unchecked(t))
            })
            .collect()
    }
}

impl PiecewiseEval for PiecewiseFunction {
    fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    fn out_dim(&self) -> usize {
        self.dim()
    }

    fn eval_piece(&self, i: usize, t: f64, out: &mut [f64]) {
        self.eval_piece_into(i, t, out)
    }

    fn endpoint_value(&self) -> Vec<f64> {
        self.endpoint.clone()
    }

    fn piece_degree(&self, i: usize) -> Option<usize> {
        self.pieces[i].iter().map(Cheb::degree).max()
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

/// Sorted union of two partitions of (nearly) the same interval; points
/// closer than a relative `MERGE_EPS` collapse onto the earlier one.
pub(crate) fn merge_breaks(x: &[f64], y: &[f64]) -> Vec<f64> {
    let a = x[0].min(y[0]);
    let b = x.last().copied().unwrap_or(a).max(y.last().copied().unwrap_or(a));
    let tol = MERGE_EPS * (b - a).abs().max(1.0);
    let mut all: Vec<f64> = x.iter().chain(y).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for t in all {
        match out.last() {
            Some(&last) if t - last <= tol => {}
            _ => out.push(t),
        }
    }
    // keep the exact right end of `x`
    let last = out.len() - 1;
    if out.len() > 1 {
        out[last] = *x.last().expect("nonempty");
        out[0] = x[0];
    }
    out
}

fn merged_points(f: &PiecewiseFunction, g: &PiecewiseFunction, op: impl Fn(f64, f64) -> f64) -> Vec<(f64, Vec<f64>)> {
    let mut ts: Vec<f64> = f.points.iter().chain(&g.points).map(|(t, _)| *t).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.into_iter()
        .map(|t| {
            let u = f.value_unchecked(t);
            let v = g.value_unchecked(t);
            (t, u.iter().zip(&v).map(|(x, y)| op(*x, *y)).collect())
        })
        .collect()
}
