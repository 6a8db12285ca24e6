use std::fmt;
use std::sync::Arc;

use super::cheb::{extrema_points, first_kind_nodes, map_from_ref, Cheb};
use super::piecewise::PiecewiseFunction;
use super::quadrature::{self, euclid, PiecewiseEval, QuadratureConfig};
use crate::error::Result;

/// Pointwise map `R^M -> R^K` written into a caller-provided buffer.
pub type PointMap = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// `t -> map(base(t))`, evaluated on demand and never materialized unless asked.
#[derive(Clone)]
pub struct LazyComposition {
    base: PiecewiseFunction,
    out_dim: usize,
    map: PointMap,
}

impl fmt::Debug for LazyComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyComposition")
            .field("base", &self.base)
            .field("out_dim", &self.out_dim)
            .finish_non_exhaustive()
    }
}

/// Result of sampling a lazy composition into polynomial pieces.
#[derive(Debug, Clone)]
pub struct Materialized {
    pub function: PiecewiseFunction,
    /// Largest Euclidean gap between the interpolant and the composition on
    /// the sup-sampling grid.
    pub defect: f64,
}

/// Result of a cumulative integration.
#[derive(Debug, Clone)]
pub struct Integrated {
    pub function: PiecewiseFunction,
    /// Estimated integration error: the Chebyshev tail left after
    /// refinement, scaled by the piece width, summed along the domain.
    pub defect: f64,
}

/// Maximum interpolation nodes per sub-interval before bisecting.
pub const MAX_NODES: usize = 64;
const MAX_BISECTIONS: usize = 12;
/// Relative size of the Chebyshev tail accepted as converged.
const TAIL_REL: f64 = 1e-14;

impl LazyComposition {
    pub fn new(base: PiecewiseFunction, out_dim: usize, map: PointMap) -> Self {
        LazyComposition { base, out_dim, map }
    }

    /// Convenience constructor from a closure.
    pub fn from_fn<F>(base: PiecewiseFunction, out_dim: usize, map: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::new(base, out_dim, Arc::new(map))
    }

    pub fn base(&self) -> &PiecewiseFunction {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.out_dim
    }

    pub fn domain(&self) -> (f64, f64) {
        self.base.domain()
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out_dim];
        (self.map)(y, &mut out);
        out
    }

    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        let y = self.base.evaluate(t)?;
        Ok(self.apply(&y))
    }

    pub fn lp_norm(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        quadrature::lp_norm(self, p, cfg)
    }

    pub fn lp_integral(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        quadrature::lp_integral(self, p, cfg)
    }

    pub fn sup_norm(&self, cfg: &QuadratureConfig) -> f64 {
        quadrature::sup_norm(self, cfg)
    }

    /// Per-piece Chebyshev interpolant of degree `degree`.
    pub fn materialize(&self, degree: usize, cfg: &QuadratureConfig) -> Result<Materialized> {
        let endpoint = self.apply(self.base.endpoint());
        let base = &self.base;
        let mut buf = vec![0.0; base.dim()];
        let mut out = vec![0.0; self.out_dim];
        let function = PiecewiseFunction::from_fn(base.breaks().to_vec(), self.out_dim, degree, endpoint, |t, o| {
            let i = base.locate(t);
            base.eval_piece_into(i, t, &mut buf);
            (self.map)(&buf, o);
        })?;
        let mut function = function;
        for (t, v) in base.point_values() {
            function = function.with_point_value(*t, self.apply(v))?;
        }
        let pts = extrema_points(cfg.sup_samples_per_piece);
        let mut approx = vec![0.0; self.out_dim];
        let mut defect = 0.0f64;
        for i in 0..base.piece_count() {
            let (lo, hi) = (base.breaks()[i], base.breaks()[i + 1]);
            for &s in &pts {
                let t = map_from_ref(lo, hi, s);
                self.eval_piece(i, t, &mut out);
                function.eval_piece_into(i, t, &mut approx);
                let d: Vec<f64> = out.iter().zip(&approx).map(|(a, b)| a - b).collect();
                defect = defect.max(euclid(&d));
            }
        }
        Ok(Materialized { function, defect })
    }

    /// `t -> start + int_a^t map(base(s)) ds` as a piecewise polynomial.
    ///
    /// Each piece of the base is interpolated at `cfg.nodes_per_piece`
    /// first-kind Chebyshev points (never the piece ends, so point values
    /// and endpoint values of the base do not enter); the node count doubles
    /// up to [`MAX_NODES`] while the Chebyshev tail is not negligible, after
    /// which the sub-interval is bisected. Interpolants are antidifferentiated
    /// exactly and chained so the result is continuous.
    pub fn cumulative_integral(&self, start: &[f64], cfg: &QuadratureConfig) -> Result<Integrated> {
        assert_eq!(start.len(), self.out_dim, "start value dimension");
        let mut segments: Vec<(f64, f64, Vec<Cheb>, f64)> = Vec::new();
        for i in 0..self.base.piece_count() {
            let (lo, hi) = (self.base.breaks()[i], self.base.breaks()[i + 1]);
            self.interpolate_adaptive(i, lo, hi, cfg.nodes_per_piece.max(2), 0, &mut segments);
        }
        let mut acc = start.to_vec();
        let mut breaks = Vec::with_capacity(segments.len() + 1);
        let mut pieces = Vec::with_capacity(segments.len());
        let mut defect = 0.0;
        breaks.push(self.base.start());
        for (lo, hi, integrand, tail) in segments {
            let half = 0.5 * (hi - lo);
            let mut piece = Vec::with_capacity(self.out_dim);
            for (c, ch) in integrand.iter().enumerate() {
                let mut anti = ch.antiderivative(half);
                anti.add_constant(acc[c]);
                acc[c] = anti.eval(1.0);
                piece.push(anti);
            }
            defect += tail * (hi - lo);
            breaks.push(hi);
            pieces.push(piece);
        }
        let function = PiecewiseFunction::new(breaks, pieces, acc)?;
        Ok(Integrated { function, defect })
    }

    fn interpolate_adaptive(
        &self,
        piece: usize,
        lo: f64,
        hi: f64,
        mut n: usize,
        depth: usize,
        out: &mut Vec<(f64, f64, Vec<Cheb>, f64)>,
    ) {
        let mut buf = vec![0.0; self.out_dim];
        loop {
            let nodes = first_kind_nodes(n);
            let mut samples = vec![vec![0.0; n]; self.out_dim];
            for (j, &s) in nodes.iter().enumerate() {
                self.eval_piece(piece, map_from_ref(lo, hi, s), &mut buf);
                for (c, v) in buf.iter().enumerate() {
                    samples[c][j] = *v;
                }
            }
            let mut chebs: Vec<Cheb> = samples.iter().map(|v| Cheb::interpolate(v)).collect();
            let scale = chebs
                .iter()
                .flat_map(|c| c.coeffs().iter().map(|v| v.abs()))
                .fold(0.0f64, f64::max);
            let tail = chebs
                .iter()
                .map(|c| {
                    let k = c.coeffs().len();
                    c.coeffs()[k.saturating_sub(2)..]
                        .iter()
                        .map(|v| v.abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0f64, f64::max);
            let all_finite = chebs.iter().all(|c| c.coeffs().iter().all(|v| v.is_finite()));
            let converged = all_finite && tail <= TAIL_REL * scale;
            if converged || (n >= MAX_NODES && depth >= MAX_BISECTIONS) {
                for c in &mut chebs {
                    c.chop(scale);
                }
                out.push((lo, hi, chebs, if converged { 0.0 } else { tail }));
                return;
            }
            if n >= MAX_NODES {
                let mid = 0.5 * (lo + hi);
                self.interpolate_adaptive(piece, lo, mid, n / 4, depth + 1, out);
                self.interpolate_adaptive(piece, mid, hi, n / 4, depth + 1, out);
                return;
            }
            n = (2 * n).min(MAX_NODES);
        }
    }
}

impl PiecewiseEval for LazyComposition {
    fn breakpoints(&self) -> &[f64] {
        self.base.breaks()
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn eval_piece(&self, i: usize, t: f64, out: &mut [f64]) {
        let dim = self.base.dim();
        if dim <= 8 {
            let mut y = [0.0; 8];
            self.base.eval_piece_into(i, t, &mut y[..dim]);
            (self.map)(&y[..dim], out);
        } else {
            let mut y = vec![0.0; dim];
            self.base.eval_piece_into(i, t, &mut y);
            (self.map)(&y, out);
        }
    }

    fn endpoint_value(&self) -> Vec<f64> {
        self.apply(self.base.endpoint())
    }
}
