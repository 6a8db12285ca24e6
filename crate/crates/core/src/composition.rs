//! Composition operators `T(g) = f o g` from `L^p(X)` to `L^q(X)` on an
//! interval `X` with Lebesgue measure.
//!
//! If `|f(y)| <= C1 |y|^alpha + C2` and `p = alpha q`, `T` is continuous. If
//! `||Df(y)|| <= C1 |y|^alpha + C2` and `p = (alpha + 1) q`, `T` is
//! continuously differentiable with `DT(g) h = Df(g) h`.

use num_rational::Ratio;

use crate::certify::{decay_verdict, DecayVerdict, RemainderRow, RemainderTable};
use crate::error::{param, Error, Result};
use crate::exec::Execution;
use crate::funcrep::{LazyComposition, PiecewiseFunction, QuadratureConfig};
use crate::nonlinear::Nonlinearity;
use crate::probe::{estimate_operator_norm, random_probes, LinearOperatorProbe};

/// `[a, b]` with Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureDomain {
    pub a: f64,
    pub b: f64,
}

impl MeasureDomain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(param(format!("measure domain needs a < b, got [{a}, {b}]")));
        }
        Ok(MeasureDomain { a, b })
    }

    pub fn mass(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionMode {
    /// `p = alpha q` with `alpha` from the growth of `f`.
    Continuity,
    /// `p = (alpha + 1) q` with `alpha` from the growth of `Df`.
    Smoothness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionContext {
    pub nl: Nonlinearity,
    pub mode: CompositionMode,
    pub alpha: f64,
    pub q: f64,
    pub p: f64,
    pub domain: MeasureDomain,
}

impl CompositionContext {
    pub fn continuity(nl: Nonlinearity, q: f64, domain: MeasureDomain) -> Result<Self> {
        let alpha = nl.f_growth.alpha;
        Self::with_exponents(nl, CompositionMode::Continuity, alpha, q, alpha * q, domain)
    }

    pub fn smoothness(nl: Nonlinearity, q: f64, domain: MeasureDomain) -> Result<Self> {
        let alpha = nl
            .df_growth
            .ok_or_else(|| Error::MissingDerivativeGrowth(nl.name.clone()))?
            .alpha;
        Self::with_exponents(nl, CompositionMode::Smoothness, alpha, q, (alpha + 1.0) * q, domain)
    }

    /// Explicit exponents, validated against the mode's contract.
    pub fn with_exponents(
        nl: Nonlinearity,
        mode: CompositionMode,
        alpha: f64,
        q: f64,
        p: f64,
        domain: MeasureDomain,
    ) -> Result<Self> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::ExponentContract(format!("q must satisfy 1 <= q < inf, got {q}")));
        }
        if !(alpha >= 1.0) {
            return Err(Error::ExponentContract(format!(
                "alpha must be at least 1, got {alpha}"
            )));
        }
        let (expected, growth_alpha) = match mode {
            CompositionMode::Continuity => (alpha * q, Some(nl.f_growth.alpha)),
            CompositionMode::Smoothness => ((alpha + 1.0) * q, nl.df_growth.map(|g| g.alpha)),
        };
        if (p - expected).abs() > 1e-12 * expected {
            return Err(Error::ExponentContract(format!(
                "{mode:?} mode needs p = {expected}, got {p}"
            )));
        }
        match growth_alpha {
            None => return Err(Error::MissingDerivativeGrowth(nl.name.clone())),
            Some(g) if g > alpha => {
                return Err(Error::ExponentContract(format!(
                    "alpha = {alpha} is below the certified growth exponent {g}"
                )))
            }
            _ => {}
        }
        Ok(CompositionContext {
            nl,
            mode,
            alpha,
            q,
            p,
            domain,
        })
    }

    fn check_input(&self, g: &PiecewiseFunction) -> Result<()> {
        if g.dim() != self.nl.dim {
            return Err(Error::DimensionMismatch {
                expected: self.nl.dim,
                found: g.dim(),
            });
        }
        let (a, b) = g.domain();
        let tol = 1e-12 * self.domain.mass().max(1.0);
        if (a - self.domain.a).abs() > tol || (b - self.domain.b).abs() > tol {
            return Err(Error::DomainMismatch {
                a0: self.domain.a,
                b0: self.domain.b,
                a1: a,
                b1: b,
            });
        }
        Ok(())
    }

    fn require(&self, mode: CompositionMode) -> Result<()> {
        if self.mode != mode {
            return Err(Error::ExponentContract(format!(
                "operation needs {mode:?} mode, context is {:?}",
                self.mode
            )));
        }
        Ok(())
    }

    /// `f o g`.
    pub fn image(&self, g: &PiecewiseFunction) -> LazyComposition {
        let nl = self.nl.clone();
        LazyComposition::from_fn(g.clone(), self.nl.dim, move |y, o| nl.eval_into(y, o))
    }

    /// `f o g1 - f o g2`.
    pub fn image_gap(&self, g1: &PiecewiseFunction, g2: &PiecewiseFunction) -> Result<LazyComposition> {
        let n = self.nl.dim;
        let nl = self.nl.clone();
        Ok(LazyComposition::from_fn(g1.stack(g2)?, n, move |y, o| {
            nl.eval_into(&y[..n], o);
            let mut b = [0.0; 8];
            if n <= 8 {
                nl.eval_into(&y[n..], &mut b[..n]);
                for (x, v) in o.iter_mut().zip(&b[..n]) {
                    *x -= v;
                }
            } else {
                let b = nl.eval(&y[n..]);
                for (x, v) in o.iter_mut().zip(&b) {
                    *x -= v;
                }
            }
        }))
    }

    /// `Df(g) h`.
    pub fn derivative_image(&self, g: &PiecewiseFunction, h: &PiecewiseFunction) -> Result<LazyComposition> {
        let n = self.nl.dim;
        let nl = self.nl.clone();
        Ok(LazyComposition::from_fn(g.stack(h)?, n, move |y, o| {
            nl.jvp_into(&y[..n], &y[n..], o)
        }))
    }

    /// `||Df o g||_{L^s}` with pointwise matrix norms.
    pub fn jacobian_lp_norm(&self, g: &PiecewiseFunction, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let nl = self.nl.clone();
        LazyComposition::from_fn(g.clone(), 1, move |y, o| o[0] = nl.jacobian_norm(y)).lp_norm(s, cfg)
    }
}

/// `f o g` with its `L^q` norm and the a-priori bound
/// `||f o g||_q^q <= 2^(q-1) (C1^q ||g||_{alpha q}^{alpha q} + C2^q mu(X))`.
#[derive(Debug, Clone)]
pub struct CompositionImage {
    pub image: LazyComposition,
    pub norm_q: f64,
    /// `||f o g||_q^q`.
    pub integral_q: f64,
    pub growth_bound: f64,
}

pub fn apply_composition(
    ctx: &CompositionContext,
    g: &PiecewiseFunction,
    cfg: &QuadratureConfig,
) -> Result<CompositionImage> {
    ctx.check_input(g)?;
    let image = ctx.image(g);
    let q = ctx.q;
    let integral_q = image.lp_integral(q, cfg)?;
    let growth = ctx.nl.f_growth;
    let aq = growth.alpha * q;
    let g_int = g.lp_integral(aq, cfg)?;
    let growth_bound = 2f64.powf(q - 1.0) * (growth.c1.powf(q) * g_int + growth.c2.powf(q) * ctx.domain.mass());
    Ok(CompositionImage {
        image,
        norm_q: integral_q.powf(1.0 / q),
        integral_q,
        growth_bound,
    })
}

/// Row of a continuity probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityRow {
    pub k: usize,
    /// `||g_k - g||_{L^p}`.
    pub input_gap: f64,
    /// `||f o g_k - f o g||_{L^q}`.
    pub output_gap: f64,
    /// `lip(f) ||g_k - g||_{L^q}` when `f` is globally Lipschitz.
    pub lipschitz_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityTable {
    pub rows: Vec<ContinuityRow>,
}

impl ContinuityTable {
    pub fn verdict(&self) -> DecayVerdict {
        decay_verdict(&self.rows.iter().map(|r| r.output_gap).collect::<Vec<_>>())
    }

    pub fn lipschitz_holds(&self, slack: f64) -> Option<bool> {
        let checks: Vec<bool> = self
            .rows
            .iter()
            .filter_map(|r| r.lipschitz_bound.map(|b| r.output_gap <= b + slack))
            .collect();
        if checks.is_empty() {
            None
        } else {
            Some(checks.into_iter().all(|c| c))
        }
    }
}

/// `g_k = g + 2^-k d`, `k = 0..=K`.
pub fn geometric_schedule(
    g: &PiecewiseFunction,
    d: &PiecewiseFunction,
    k_max: usize,
) -> Result<Vec<PiecewiseFunction>> {
    (0..=k_max)
        .map(|k| g.linear_combination(1.0, d, 0.5f64.powi(k as i32)))
        .collect()
}

/// Output gaps `||f o g_k - f o g||_{L^q}` along a schedule `g_k -> g`.
pub fn continuity_probe(
    ctx: &CompositionContext,
    g: &PiecewiseFunction,
    schedule: &[PiecewiseFunction],
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<ContinuityTable> {
    ctx.require(CompositionMode::Continuity)?;
    ctx.check_input(g)?;
    let rows = exec
        .map_range(schedule.len(), |k| -> Result<ContinuityRow> {
            let gk = &schedule[k];
            ctx.check_input(gk)?;
            let diff = gk.sub(g)?;
            Ok(ContinuityRow {
                k,
                input_gap: diff.lp_norm(ctx.p, cfg)?,
                output_gap: ctx.image_gap(gk, g)?.lp_norm(ctx.q, cfg)?,
                lipschitz_bound: match ctx.nl.lip_f {
                    Some(l) => Some(l * diff.lp_norm(ctx.q, cfg)?),
                    None => None,
                },
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityTable { rows })
}

/// `Df(g) h` with its `L^q` norm and the Holder bound
/// `||Df(g) h||_q <= ||Df o g||_{L^{p/alpha}} ||h||_p`.
#[derive(Debug, Clone)]
pub struct DerivativeImage {
    pub image: LazyComposition,
    pub norm_q: f64,
    pub input_norm: f64,
    /// `||Df o g||_{L^{p/alpha}}`, the operator-norm bound for `DT(g)`.
    pub operator_bound: f64,
}

pub fn apply_derivative(
    ctx: &CompositionContext,
    g: &PiecewiseFunction,
    h: &PiecewiseFunction,
    cfg: &QuadratureConfig,
) -> Result<DerivativeImage> {
    ctx.require(CompositionMode::Smoothness)?;
    ctx.check_input(g)?;
    ctx.check_input(h)?;
    let image = ctx.derivative_image(g, h)?;
    Ok(DerivativeImage {
        norm_q: image.lp_norm(ctx.q, cfg)?,
        input_norm: h.lp_norm(ctx.p, cfg)?,
        operator_bound: ctx.jacobian_lp_norm(g, ctx.p / ctx.alpha, cfg)?,
        image,
    })
}

/// Random unit probes in `L^p(X)`.
pub fn domain_probes(
    ctx: &CompositionContext,
    count: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<Vec<PiecewiseFunction>> {
    random_probes(ctx.domain.a, ctx.domain.b, ctx.nl.dim, count, seed, |f| {
        f.lp_norm(ctx.p, cfg)
    })
}

/// Probed `||DT(g)||` from `L^p` to `L^q`.
pub fn probe_derivative_norm(
    ctx: &CompositionContext,
    g: &PiecewiseFunction,
    probes: &[PiecewiseFunction],
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<LinearOperatorProbe> {
    ctx.require(CompositionMode::Smoothness)?;
    estimate_operator_norm(
        probes,
        |h| ctx.derivative_image(g, h)?.lp_norm(ctx.q, cfg),
        |h| h.lp_norm(ctx.p, cfg),
        exec,
    )
}

/// `||T(g + h_k) - T(g) - DT(g) h_k||_{L^q}` over `||h_k||_{L^p}`, `h_k = 2^-k h_0`.
///
/// When `Df` is Lipschitz the pointwise Taylor bound gives
/// `remainder <= lip(Df)/2 ||h_k||_{L^{2q}}^2`.
pub fn smoothness_probe(
    ctx: &CompositionContext,
    g: &PiecewiseFunction,
    h0: &PiecewiseFunction,
    k_max: usize,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<RemainderTable> {
    ctx.require(CompositionMode::Smoothness)?;
    ctx.check_input(g)?;
    ctx.check_input(h0)?;
    if k_max < 3 {
        return Err(param("a remainder schedule needs K >= 3"));
    }
    let n = ctx.nl.dim;
    let rows = exec
        .map_range(k_max + 1, |k| -> Result<RemainderRow> {
            let h = h0.scale(0.5f64.powi(k as i32));
            let nl = ctx.nl.clone();
            let base = g.stack(&h)?;
            let rem = LazyComposition::from_fn(base, n, move |y, o| {
                let (gv, hv) = (&y[..n], &y[n..]);
                let shifted: Vec<f64> = gv.iter().zip(hv).map(|(a, b)| a + b).collect();
                let f0 = nl.eval(gv);
                let mut lin = vec![0.0; n];
                nl.jvp_into(gv, hv, &mut lin);
                nl.eval_into(&shifted, o);
                for i in 0..n {
                    o[i] -= f0[i] + lin[i];
                }
            });
            let remainder = rem.lp_norm(ctx.q, cfg)?;
            let input_norm = h.lp_norm(ctx.p, cfg)?;
            let second_order_bound = match ctx.nl.lip_df {
                Some(l) => Some(0.5 * l * h.lp_norm(2.0 * ctx.q, cfg)?.powi(2)),
                None => None,
            };
            Ok(RemainderRow {
                k,
                input_norm,
                remainder,
                ratio: if input_norm == 0.0 { 0.0 } else { remainder / input_norm },
                second_order_bound,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RemainderTable { rows })
}

/// Probed `||DT(g) - DT(g0)||` and the bound `||Df o g - Df o g0||_{L^{p/alpha}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeGap {
    pub probed_gap: f64,
    pub bound: f64,
}

pub fn derivative_continuity_probe(
    ctx: &CompositionContext,
    g: &PiecewiseFunction,
    g0: &PiecewiseFunction,
    probes: &[PiecewiseFunction],
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<DerivativeGap> {
    ctx.require(CompositionMode::Smoothness)?;
    ctx.check_input(g)?;
    ctx.check_input(g0)?;
    let n = ctx.nl.dim;
    let nl = ctx.nl.clone();
    let bound = LazyComposition::from_fn(g.stack(g0)?, 1, move |y, o| {
        o[0] = nl.jacobian_gap_norm(&y[..n], &y[n..])
    })
    .lp_norm(ctx.p / ctx.alpha, cfg)?;
    let probe = estimate_operator_norm(
        probes,
        |h| {
            let d1 = ctx.derivative_image(g, h)?.base().clone();
            let nl = ctx.nl.clone();
            let both = d1.stack(g0)?;
            LazyComposition::from_fn(both, n, move |y, o| {
                let (gv, hv, g0v) = (&y[..n], &y[n..2 * n], &y[2 * n..]);
                let mut a = vec![0.0; n];
                nl.jvp_into(gv, hv, &mut a);
                nl.jvp_into(g0v, hv, o);
                for i in 0..n {
                    o[i] = a[i] - o[i];
                }
            })
            .lp_norm(ctx.q, cfg)
        },
        |h| h.lp_norm(ctx.p, cfg),
        exec,
    )?;
    Ok(DerivativeGap {
        probed_gap: probe.lower_bound,
        bound,
    })
}

/// Exponent bookkeeping for integer `alpha`: `q = (alpha + 1)/alpha` is the
/// conjugate of `alpha + 1`, and `alpha q = alpha + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentIdentity {
    pub q: Ratio<i64>,
    pub alpha_q: Ratio<i64>,
    pub conjugate_sum: Ratio<i64>,
    pub holds: bool,
}

pub fn exponent_identity(alpha: i64) -> Result<ExponentIdentity> {
    if alpha < 1 {
        return Err(param(format!("alpha must be a positive integer, got {alpha}")));
    }
    let a = Ratio::from_integer(alpha);
    let one = Ratio::from_integer(1);
    let q = (a + one) / a;
    let alpha_q = a * q;
    // 1/q + 1/(alpha+1) must be 1
    let conjugate_sum = q.recip() + (a + one).recip();
    Ok(ExponentIdentity {
        q,
        alpha_q,
        conjugate_sum,
        holds: alpha_q == a + one && conjugate_sum == one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn unit() -> MeasureDomain {
        MeasureDomain::new(0.0, 1.0).unwrap()
    }

    fn square() -> Nonlinearity {
        Nonlinearity::quadratic(1, 1.0).unwrap()
    }

    fn konst(v: f64) -> PiecewiseFunction {
        PiecewiseFunction::constant(0.0, 1.0, &[v]).unwrap()
    }

    fn ident() -> PiecewiseFunction {
        PiecewiseFunction::from_monomials(vec![0.0, 1.0], &[vec![vec![0.0, 1.0]]], vec![1.0]).unwrap()
    }

    #[test]
    fn contracts() {
        assert!(MeasureDomain::new(1.0, 1.0).is_err());
        let c = CompositionContext::continuity(square(), 1.0, unit()).unwrap();
        assert_eq!(c.p, 2.0);
        let s = CompositionContext::smoothness(square(), 1.5, unit()).unwrap();
        assert_eq!(s.p, 3.0);
        let bad = CompositionContext::with_exponents(square(), CompositionMode::Continuity, 2.0, 1.0, 3.0, unit());
        assert!(matches!(bad, Err(Error::ExponentContract(_))));
        let under = CompositionContext::with_exponents(square(), CompositionMode::Continuity, 1.0, 2.0, 2.0, unit());
        assert!(matches!(under, Err(Error::ExponentContract(_))));
        assert!(apply_derivative(&c, &konst(1.0), &konst(1.0), &q()).is_err());
    }

    #[test]
    fn composition_examples() {
        let c = CompositionContext::continuity(square(), 1.0, unit()).unwrap();
        let img = apply_composition(&c, &ident(), &q()).unwrap();
        assert_abs_diff_eq!(img.norm_q, 1.0 / 3.0, epsilon = 1e-15);
        assert!(img.integral_q <= img.growth_bound + 1e-8);

        let k =
            CompositionContext::continuity(Nonlinearity::affine(vec![0.0], vec![2.5]).unwrap(), 1.0, unit()).unwrap();
        let img = apply_composition(&k, &konst(0.0), &q()).unwrap();
        assert_eq!(img.image.evaluate(0.3).unwrap(), vec![2.5]);

        let id = CompositionContext::continuity(Nonlinearity::scalar_linear(1, 1.0).unwrap(), 2.0, unit()).unwrap();
        let img = apply_composition(&id, &ident(), &q()).unwrap();
        assert_abs_diff_eq!(img.norm_q, ident().lp_norm(2.0, &q()).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn continuity_examples() {
        let c = CompositionContext::continuity(square(), 1.0, unit()).unwrap();
        let same = vec![konst(0.0); 5];
        let t = continuity_probe(&c, &konst(0.0), &same, &q(), Execution::Sequential).unwrap();
        assert!(t.rows.iter().all(|r| r.output_gap == 0.0));
        assert_eq!(t.verdict(), DecayVerdict::Negligible);

        let sched = geometric_schedule(&konst(0.0), &konst(1.0), 12).unwrap();
        let t = continuity_probe(&c, &konst(0.0), &sched, &q(), Execution::Parallel).unwrap();
        for r in &t.rows {
            assert_relative_eq!(r.output_gap, 0.25f64.powi(r.k as i32), max_relative = 1e-14);
        }
        assert!(t.verdict().passed());

        let sat = CompositionContext::continuity(Nonlinearity::saturating(1).unwrap(), 1.0, unit()).unwrap();
        let sched = geometric_schedule(&ident(), &konst(1.0), 12).unwrap();
        let t = continuity_probe(&sat, &ident(), &sched, &q(), Execution::Parallel).unwrap();
        assert_eq!(t.lipschitz_holds(1e-12), Some(true));
        assert!(t.verdict().passed());
    }

    #[test]
    fn derivative_examples() {
        let s = CompositionContext::smoothness(square(), 1.0, unit()).unwrap();
        let d = apply_derivative(&s, &konst(1.0), &konst(1.0), &q()).unwrap();
        assert_eq!(d.image.evaluate(0.5).unwrap(), vec![2.0]);
        assert_abs_diff_eq!(d.norm_q, 2.0, epsilon = 1e-15);
        assert!(d.norm_q <= d.operator_bound * d.input_norm + 1e-8);
        let z = apply_derivative(&s, &konst(1.0), &konst(0.0), &q()).unwrap();
        assert_eq!(z.norm_q, 0.0);

        let a = CompositionContext::smoothness(Nonlinearity::scalar_linear(1, -3.0).unwrap(), 1.0, unit()).unwrap();
        for g in [konst(5.0), ident()] {
            let d = apply_derivative(&a, &g, &ident(), &q()).unwrap();
            assert_abs_diff_eq!(d.image.evaluate(0.5).unwrap()[0], -1.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn smoothness_examples() {
        let lin = CompositionContext::smoothness(Nonlinearity::scalar_linear(1, 2.0).unwrap(), 1.0, unit()).unwrap();
        let t = smoothness_probe(&lin, &ident(), &konst(1.0), 6, &q(), Execution::Sequential).unwrap();
        assert!(t.rows.iter().all(|r| r.remainder <= 1e-10));

        let s = CompositionContext::smoothness(square(), 1.0, unit()).unwrap();
        let t = smoothness_probe(&s, &konst(0.0), &konst(1.0), 12, &q(), Execution::Parallel).unwrap();
        for r in &t.rows {
            let h = 0.5f64.powi(r.k as i32);
            assert_relative_eq!(r.remainder, h * h, max_relative = 1e-14);
            assert_relative_eq!(r.ratio, h, max_relative = 1e-14);
        }
        assert!(t.verdict().passed());
        assert_eq!(t.second_order_holds(), Some(true));
    }

    #[test]
    fn derivative_gap_examples() {
        let s = CompositionContext::smoothness(square(), 1.0, unit()).unwrap();
        let probes = domain_probes(&s, 6, 3, &q()).unwrap();
        let same =
            derivative_continuity_probe(&s, &konst(1.0), &konst(1.0), &probes, &q(), Execution::Sequential).unwrap();
        assert_eq!((same.probed_gap, same.bound), (0.0, 0.0));
        let gap =
            derivative_continuity_probe(&s, &konst(1.0), &konst(0.0), &probes, &q(), Execution::Sequential).unwrap();
        assert_abs_diff_eq!(gap.bound, 2.0, epsilon = 1e-15);
        assert!(gap.probed_gap <= gap.bound + 1e-8);
        let lin = CompositionContext::smoothness(Nonlinearity::scalar_linear(1, 2.0).unwrap(), 1.0, unit()).unwrap();
        let g = derivative_continuity_probe(&lin, &konst(1.0), &ident(), &probes, &q(), Execution::Sequential).unwrap();
        assert_eq!((g.probed_gap, g.bound), (0.0, 0.0));
    }

    #[test]
    fn exponent_bookkeeping() {
        for alpha in 1..=6 {
            let id = exponent_identity(alpha).unwrap();
            assert!(id.holds);
            assert_eq!(id.alpha_q, Ratio::from_integer(alpha + 1));
        }
        assert_eq!(exponent_identity(2).unwrap().q, Ratio::new(3, 2));
        assert!(exponent_identity(0).is_err());
    }
}
