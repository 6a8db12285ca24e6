//! Composite quadrature and sampling norms shared by eager and lazy
//! piecewise functions.

use super::cheb::{extrema_points, map_from_ref, GaussLegendre};
use crate::error::{param, Result};

/// Quadrature and sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per piece; also the starting Chebyshev sample count
    /// when interpolating integrands.
    pub nodes_per_piece: usize,
    /// Initial sample count per piece for sup-norm estimation.
    pub sup_samples_per_piece: usize,
    /// Agreement tolerance between successive sup-norm grids.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes_per_piece: 16,
            sup_samples_per_piece: 64,
            tolerance: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn new(nodes_per_piece: usize, sup_samples_per_piece: usize, tolerance: f64) -> Result<Self> {
        let cfg = QuadratureConfig {
            nodes_per_piece,
            sup_samples_per_piece,
            tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_piece < 2 {
            return Err(param("nodes_per_piece must be at least 2"));
        }
        if self.sup_samples_per_piece < 8 {
            return Err(param("sup_samples_per_piece must be at least 8"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(param("tolerance must be nonnegative"));
        }
        Ok(())
    }
}

/// Piece-level access used by the norm routines.
///
/// `eval_piece` evaluates the smooth piece `i` (its polynomial, or the map
/// applied to it) and never consults isolated point values, so quadrature
/// sees only the almost-everywhere class.
pub trait PiecewiseEval: Sync {
    fn breakpoints(&self) -> &[f64];
    fn out_dim(&self) -> usize;
    fn eval_piece(&self, i: usize, t: f64, out: &mut [f64]);
    fn endpoint_value(&self) -> Vec<f64>;
    /// Polynomial degree of piece `i` when known.
    fn piece_degree(&self, _i: usize) -> Option<usize> {
        None
    }

    fn piece_count(&self) -> usize {
        self.breakpoints().len() - 1
    }
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const MAX_GL_NODES: usize = 128;

fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as i64) % 2 == 0
}

/// `int |f|^p` over the whole domain.
pub fn lp_integral<F: PiecewiseEval + ?Sized>(f: &F, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(param(format!("L^p exponent must satisfy 1 <= p < inf, got {p}")));
    }
    let dim = f.out_dim();
    let bp = f.breakpoints();
    let mut buf = vec![0.0; dim];
    let mut total = 0.0;
    for i in 0..f.piece_count() {
        let (lo, hi) = (bp[i], bp[i + 1]);
        let mut n = cfg.nodes_per_piece;
        if let Some(deg) = f.piece_degree(i) {
            // enough nodes to integrate |f|^ceil(p) exactly for polynomial pieces
            let need = (p.ceil() as usize * deg + 2).div_ceil(2);
            n = n.max(need.min(MAX_GL_NODES));
        }
        let cuts = if dim == 1 && !is_even_integer(p) {
            sign_changes(f, i, lo, hi, 4 * n)
        } else {
            Vec::new()
        };
        let rule = GaussLegendre::rule(n);
        let n_cuts = cuts.len();
        let mut edges = Vec::with_capacity(n_cuts + 2);
        edges.push(lo);
        edges.extend(cuts);
        edges.push(hi);
        // |f|^p is not smooth at a zero of f unless p is an integer.
        let graded = p.fract() != 0.0;
        let vanishes = |t: f64, buf: &mut [f64]| {
            f.eval_piece(i, t, buf);
            euclid(buf) <= 1e-13 * (1.0 + t.abs())
        };
        let quad = |u: f64, v: f64, buf: &mut [f64]| {
            let half = 0.5 * (v - u);
            let mut acc = 0.0;
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                f.eval_piece(i, map_from_ref(u, v, *x), buf);
                let a = if dim == 1 { buf[0].abs() } else { euclid(buf) };
                acc += wt * pow_abs(a, p);
            }
            half * acc
        };
        for (k, w) in edges.windows(2).enumerate() {
            let (u, v) = (w[0], w[1]);
            if v <= u {
                continue;
            }
            let left = graded && (k > 0 || vanishes(u, &mut buf));
            let right = graded && (k < n_cuts || vanishes(v, &mut buf));
            total += match (left, right) {
                (false, false) => quad(u, v, &mut buf),
                (true, false) => graded_quad(u, v, true, |a, b| quad(a, b, &mut buf)),
                (false, true) => graded_quad(u, v, false, |a, b| quad(a, b, &mut buf)),
                (true, true) => {
                    let m = 0.5 * (u + v);
                    graded_quad(u, m, true, |a, b| quad(a, b, &mut buf))
                        + graded_quad(m, v, false, |a, b| quad(a, b, &mut buf))
                }
            };
        }
    }
    Ok(total)
}

const GRADING_RATIO: f64 = 0.15;
const GRADING_LEVELS: usize = 24;

/// Geometric mesh refined toward `u` (or `v`), where the integrand has an
/// algebraic singularity.
fn graded_quad(u: f64, v: f64, toward_left: bool, mut quad: impl FnMut(f64, f64) -> f64) -> f64 {
    let w = v - u;
    let mut outer = 1.0;
    let mut total = 0.0;
    for _ in 0..GRADING_LEVELS {
        let inner = outer * GRADING_RATIO;
        total += if toward_left {
            quad(u + w * inner, u + w * outer)
        } else {
            quad(v - w * outer, v - w * inner)
        };
        outer = inner;
    }
    total
        + if toward_left {
            quad(u, u + w * outer)
        } else {
            quad(v - w * outer, v)
        }
}

#[inline]
fn pow_abs(a: f64, p: f64) -> f64 {
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if p.fract() == 0.0 && p <= 16.0 {
        a.powi(p as i32)
    } else {
        a.powf(p)
    }
}

/// Zeros of a scalar piece located by sampling and bisection.
fn sign_changes<F: PiecewiseEval + ?Sized>(f: &F, i: usize, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut buf = [0.0];
    let mut at = |t: f64| {
        f.eval_piece(i, t, &mut buf);
        buf[0]
    };
    let mut cuts = Vec::new();
    let h = (hi - lo) / samples as f64;
    let mut t0 = lo;
    let mut v0 = at(lo);
    for j in 1..=samples {
        let t1 = if j == samples { hi } else { lo + h * j as f64 };
        let v1 = at(t1);
        if v1 == 0.0 && j < samples {
            cuts.push(t1);
        } else if v0 != 0.0 && v1 != 0.0 && (v0 < 0.0) != (v1 < 0.0) {
            let (mut a, mut b, mut va) = (t0, t1, v0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let vm = at(m);
                if vm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (vm < 0.0) == (va < 0.0) {
                    a = m;
                    va = vm;
                } else {
                    b = m;
                }
            }
            cuts.push(0.5 * (a + b));
        }
        t0 = t1;
        v0 = v1;
    }
    cuts
}

/// `(int |f|^p)^(1/p)`.
pub fn lp_norm<F: PiecewiseEval + ?Sized>(f: &F, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(lp_integral(f, p, cfg)?.powf(1.0 / p))
}

/// Sampled supremum of the Euclidean norm.
///
/// Samples Chebyshev extrema on every piece (which include the breakpoints),
/// polishes the best sample of each piece by golden-section search, and
/// doubles the grid until two successive estimates agree within
/// `cfg.tolerance`. The result never exceeds the true supremum by more than
/// rounding; it may fall short if a narrow peak escapes every grid.
pub fn sup_norm<F: PiecewiseEval + ?Sized>(f: &F, cfg: &QuadratureConfig) -> f64 {
    let endpoint = euclid(&f.endpoint_value());
    let mut m = cfg.sup_samples_per_piece.max(8);
    let mut prev = sup_on_grid(f, m).max(endpoint);
    while m < 4096 {
        m *= 2;
        let next = sup_on_grid(f, m).max(endpoint);
        let done = (next - prev).abs() <= cfg.tolerance;
        prev = prev.max(next);
        if done {
            break;
        }
    }
    prev
}

fn sup_on_grid<F: PiecewiseEval + ?Sized>(f: &F, m: usize) -> f64 {
    let pts = extrema_points(m);
    let bp = f.breakpoints();
    let mut buf = vec![0.0; f.out_dim()];
    let mut best = 0.0f64;
    for i in 0..f.piece_count() {
        let (lo, hi) = (bp[i], bp[i + 1]);
        let ts: Vec<f64> = pts.iter().rev().map(|&s| map_from_ref(lo, hi, s)).collect();
        let mut vals = Vec::with_capacity(ts.len());
        for &t in &ts {
            f.eval_piece(i, t, &mut buf);
            vals.push(euclid(&buf));
        }
        let (j, &v) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty grid");
        let a = ts[j.saturating_sub(1)];
        let b = ts[(j + 1).min(ts.len() - 1)];
        let polished = golden_max(a, b, |t| {
            f.eval_piece(i, t, &mut buf);
            euclid(&buf)
        });
        best = best.max(v).max(polished);
    }
    best
}

fn golden_max(mut a: f64, mut b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let mut best = g(a).max(g(b)).max(gc).max(gd);
    for _ in 0..80 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
            best = best.max(gc);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
            best = best.max(gd);
        }
    }
    best
}
