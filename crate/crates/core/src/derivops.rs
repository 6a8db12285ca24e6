//! Derivative of the solution map with respect to the history.
//!
//! For `t in [0, T]`, `T <= r`,
//!
//! ```text
//! B chi (t) = int_0^t Df(phi(s - r)) chi(s - r) ds,   B chi = 0 on [-R, 0],
//! A chi     = chi_bar + B chi,
//! ```
//!
//! with `chi_bar` the static prolongation. `B` maps `L^{alpha+1}` into `C`
//! with norm at most `||Df o phi||_{L^q}`, `q = (alpha+1)/alpha`.

use std::sync::Arc;

use crate::certify::{RemainderRow, RemainderTable};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::funcrep::{LazyComposition, PiecewiseFunction, QuadratureConfig};
use crate::histspace::{bar_norm, history_segment, seminorm, static_prolongation, HistoryElement};
use crate::nonlinear::{holder_conjugate, Nonlinearity};
use crate::probe::{estimate_operator_norm, random_probes, LinearOperatorProbe};
use crate::solver::{solve, Problem, Trajectory};

/// A problem, a horizon `T <= r` and the exponents `alpha`, `q`.
#[derive(Debug, Clone)]
pub struct DerivativeContext {
    pub pb: Problem,
    pub horizon: f64,
    pub alpha: f64,
    pub q: f64,
}

impl DerivativeContext {
    pub fn new(pb: Problem, horizon: f64) -> Result<Self> {
        let growth = pb
            .nl
            .df_growth
            .ok_or_else(|| Error::MissingDerivativeGrowth(pb.nl.name.clone()))?;
        if !(horizon > 0.0 && horizon <= pb.r) {
            return Err(crate::error::param(format!(
                "horizon must lie in (0, r = {}], got {horizon}",
                pb.r
            )));
        }
        let alpha = growth.alpha;
        if pb.cfg.p < alpha + 1.0 {
            return Err(Error::ExponentContract(format!(
                "p = {} must be at least alpha + 1 = {}",
                pb.cfg.p,
                alpha + 1.0
            )));
        }
        let q = holder_conjugate(alpha + 1.0)?;
        Ok(DerivativeContext { pb, horizon, alpha, q })
    }

    pub fn p(&self) -> f64 {
        self.pb.cfg.p
    }

    pub fn max_delay(&self) -> f64 {
        self.pb.cfg.max_delay
    }

    /// Exponent `alpha + 1` of the input norm of `B`.
    pub fn input_exponent(&self) -> f64 {
        self.alpha + 1.0
    }

    /// `||chi||_{L^{alpha+1}[-R,0]}`.
    pub fn input_norm(&self, chi: &PiecewiseFunction, cfg: &QuadratureConfig) -> Result<f64> {
        chi.lp_norm(self.input_exponent(), cfg)
    }

    /// Same context at a different base history.
    pub fn at(&self, phi: HistoryElement) -> Result<Self> {
        DerivativeContext::new(self.pb.with_history(phi)?, self.horizon)
    }

    fn check(&self, chi: &HistoryElement) -> Result<()> {
        if chi.dim() != self.pb.cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: self.pb.cfg.dim,
                found: chi.dim(),
            });
        }
        Ok(())
    }

    fn history(&self, chi: &PiecewiseFunction) -> Result<HistoryElement> {
        HistoryElement::new(chi.clone(), &self.pb.cfg)
    }
}

/// `u` on `[-r, T - r]` moved to `[0, T]`.
fn delayed(u: &PiecewiseFunction, r: f64, horizon: f64) -> Result<PiecewiseFunction> {
    u.restrict(-r, horizon - r)?.shift(r).snap_domain(0.0, horizon)
}

fn apply_b_at(
    nl: &Nonlinearity,
    phi: &HistoryElement,
    chi: &HistoryElement,
    r: f64,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<PiecewiseFunction> {
    let n = nl.dim;
    let base = delayed(phi.rep(), r, horizon)?.stack(&delayed(chi.rep(), r, horizon)?)?;
    let nl = nl.clone();
    let integrand = LazyComposition::new(
        base,
        n,
        Arc::new(move |y: &[f64], out: &mut [f64]| nl.jvp_into(&y[..n], &y[n..], out)),
    );
    let tail = integrand.cumulative_integral(&vec![0.0; n], cfg)?.function;
    PiecewiseFunction::zero(phi.rep().start(), 0.0, n)?.concat(&tail)
}

/// `B chi` on `[-R, T]`.
pub fn apply_b(ctx: &DerivativeContext, chi: &HistoryElement, cfg: &QuadratureConfig) -> Result<PiecewiseFunction> {
    ctx.check(chi)?;
    apply_b_at(&ctx.pb.nl, &ctx.pb.phi, chi, ctx.pb.r, ctx.horizon, cfg)
}

/// `A chi = chi_bar + B chi` on `[-R, T]`.
pub fn apply_a(ctx: &DerivativeContext, chi: &HistoryElement, cfg: &QuadratureConfig) -> Result<PiecewiseFunction> {
    static_prolongation(chi, ctx.horizon)?.add(&apply_b(ctx, chi, cfg)?)
}

/// `||Df o phi||_{L^q[-R,0]}`, the Holder bound for `||B||`.
pub fn b_norm_upper_bound(ctx: &DerivativeContext, cfg: &QuadratureConfig) -> Result<f64> {
    let nl = ctx.pb.nl.clone();
    let g = LazyComposition::from_fn(ctx.pb.phi.rep().clone(), 1, move |y, o| o[0] = nl.jacobian_norm(y));
    g.lp_norm(ctx.q, cfg)
}

/// Random unit probes in `L^{alpha+1}[-R, 0]`.
pub fn history_probes(
    ctx: &DerivativeContext,
    count: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<Vec<PiecewiseFunction>> {
    let r = ctx.max_delay();
    random_probes(-r, 0.0, ctx.pb.cfg.dim, count, seed, |f| ctx.input_norm(f, cfg))
}

/// Empirical lower bound of `||B||` from `C[-R,T]` output norms.
pub fn estimate_b_norm(
    ctx: &DerivativeContext,
    probes: &[PiecewiseFunction],
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<LinearOperatorProbe> {
    estimate_operator_norm(
        probes,
        |chi| Ok(apply_b(ctx, &ctx.history(chi)?, cfg)?.sup_norm(cfg)),
        |chi| ctx.input_norm(chi, cfg),
        exec,
    )
}

/// `x(phi + chi) - x(phi) - A chi` on `[-R, T]`. It vanishes on `[-R, 0]`
/// and equals `y(phi + chi) - y(phi) - B chi` everywhere.
pub fn remainder_function(
    ctx: &DerivativeContext,
    base: &Trajectory,
    chi: &HistoryElement,
    cfg: &QuadratureConfig,
) -> Result<PiecewiseFunction> {
    let moved = solve(&ctx.pb.with_history(ctx.pb.phi.add(chi)?)?, ctx.horizon, cfg)?;
    let diff = moved.x.sub(&base.x)?;
    diff.sub(&apply_a(ctx, chi, cfg)?)
}

/// `||y(phi + chi) - y(phi) - B chi||_{C[-R,T]}`.
pub fn frechet_remainder(ctx: &DerivativeContext, chi: &HistoryElement, cfg: &QuadratureConfig) -> Result<f64> {
    let base = solve(&ctx.pb, ctx.horizon, cfg)?;
    Ok(remainder_function(ctx, &base, chi, cfg)?.sup_norm(cfg))
}

/// Norms of one schedule row `chi_k = 2^-k chi_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    /// `||chi_k||_{L^{alpha+1}}`.
    pub input_norm: f64,
    /// `seminorm(chi_k)` at the context exponent `p`.
    pub seminorm: f64,
    /// `||chi_k||_{L^2}`.
    pub l2_norm: f64,
    /// Sup norm of the remainder on `[-R, T]`.
    pub sup_remainder: f64,
    /// `(||rem||_{L^p[-R,T]}^p + |rem(T)|^p)^(1/p)`.
    pub bar_remainder: f64,
}

/// Remainders along `chi_k = 2^-k chi_0`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderSweep {
    pub rows: Vec<SweepRow>,
    pub lip_df: Option<f64>,
    /// `(T + R + 1)^(1/p)`.
    pub transfer_constant: f64,
}

impl RemainderSweep {
    /// `C`-valued remainder over `||chi||_{L^{alpha+1}}`, with the
    /// second-order bound `lip(Df)/2 ||chi||_{L^2}^2` when available.
    pub fn c_table(&self) -> RemainderTable {
        RemainderTable {
            rows: self
                .rows
                .iter()
                .map(|r| RemainderRow {
                    k: r.k,
                    input_norm: r.input_norm,
                    remainder: r.sup_remainder,
                    ratio: ratio(r.sup_remainder, r.input_norm),
                    second_order_bound: self.lip_df.map(|l| 0.5 * l * r.l2_norm * r.l2_norm),
                })
                .collect(),
        }
    }

    /// Remainder in the bar norm over the seminorm of `chi`.
    pub fn quotient_table(&self) -> RemainderTable {
        RemainderTable {
            rows: self
                .rows
                .iter()
                .map(|r| RemainderRow {
                    k: r.k,
                    input_norm: r.seminorm,
                    remainder: r.bar_remainder,
                    ratio: ratio(r.bar_remainder, r.seminorm),
                    second_order_bound: None,
                })
                .collect(),
        }
    }

    /// Worst `bar_remainder - (T+R+1)^(1/p) sup_remainder`.
    pub fn transfer_excess(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.bar_remainder - self.transfer_constant * r.sup_remainder)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn remainder_schedule(
    ctx: &DerivativeContext,
    chi0: &HistoryElement,
    k_max: usize,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<RemainderSweep> {
    ctx.check(chi0)?;
    if k_max < 3 {
        return Err(crate::error::param("a remainder schedule needs K >= 3"));
    }
    let base = solve(&ctx.pb, ctx.horizon, cfg)?;
    let p = ctx.p();
    let rows = exec
        .map_range(k_max + 1, |k| -> Result<SweepRow> {
            let chi = chi0.scale(0.5f64.powi(k as i32));
            let rem = remainder_function(ctx, &base, &chi, cfg)?;
            Ok(SweepRow {
                k,
                input_norm: ctx.input_norm(chi.rep(), cfg)?,
                seminorm: seminorm(&chi, &ctx.pb.cfg, cfg)?,
                l2_norm: chi.rep().lp_norm(2.0, cfg)?,
                sup_remainder: rem.sup_norm(cfg),
                bar_remainder: bar_norm(&rem, p, cfg)?,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RemainderSweep {
        rows,
        lip_df: ctx.pb.nl.lip_df,
        transfer_constant: (ctx.horizon + ctx.max_delay() + 1.0).powf(1.0 / p),
    })
}

/// Probed `||B_phi - B_phi0||` against `||Df o phi - Df o phi0||_{L^q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BContinuity {
    pub gap_lower_bound: f64,
    pub holder_bound: f64,
}

/// `||Df o phi - Df o phi0||_{L^q[-R,0]}`.
pub fn jacobian_gap_norm(
    nl: &Nonlinearity,
    phi: &HistoryElement,
    phi0: &HistoryElement,
    q: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = nl.dim;
    let nl = nl.clone();
    let base = phi.rep().stack(phi0.rep())?;
    let g = LazyComposition::from_fn(base, 1, move |y, o| o[0] = nl.jacobian_gap_norm(&y[..n], &y[n..]));
    g.lp_norm(q, cfg)
}

/// Compare `B` at the context history with `B` at `phi0`.
pub fn b_continuity(
    ctx: &DerivativeContext,
    phi0: &HistoryElement,
    probes: &[PiecewiseFunction],
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<BContinuity> {
    ctx.check(phi0)?;
    let holder_bound = jacobian_gap_norm(&ctx.pb.nl, &ctx.pb.phi, phi0, ctx.q, cfg)?;
    let (r, horizon) = (ctx.pb.r, ctx.horizon);
    let probe = estimate_operator_norm(
        probes,
        |chi| {
            let chi = ctx.history(chi)?;
            let b1 = apply_b_at(&ctx.pb.nl, &ctx.pb.phi, &chi, r, horizon, cfg)?;
            let b0 = apply_b_at(&ctx.pb.nl, phi0, &chi, r, horizon, cfg)?;
            Ok(b1.sub(&b0)?.sup_norm(cfg))
        },
        |chi| ctx.input_norm(chi, cfg),
        exec,
    )?;
    Ok(BContinuity {
        gap_lower_bound: probe.lower_bound,
        holder_bound,
    })
}

/// `|| (y(phi + h chi) - y(phi)) / h - B chi ||_C` for `h = 2^-n`, `n = 0..=n_max`.
pub fn gateaux_defects(
    ctx: &DerivativeContext,
    chi: &HistoryElement,
    n_max: usize,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    ctx.check(chi)?;
    let base = solve(&ctx.pb, ctx.horizon, cfg)?;
    exec.map_range(n_max + 1, |n| {
        let h = 0.5f64.powi(n as i32);
        let rem = remainder_function(ctx, &base, &chi.scale(h), cfg)?;
        Ok((h, rem.sup_norm(cfg) / h))
    })
    .into_iter()
    .collect()
}

/// `seminorm(R_t A chi)` against the two constants for `||R_t A||`.
#[derive(Debug, Clone, PartialEq)]
pub struct ABoundCheck {
    pub t: f64,
    pub measured: f64,
    pub input_seminorm: f64,
    /// `(1+T)^(1/p) + (R+1)^(1/p)`.
    pub unit_constant: f64,
    /// `(1+T)^(1/p) + (R+1)^(1/p) beta` with
    /// `beta = ||Df o phi||_{L^q} R^(1/(alpha+1) - 1/p)`, which bounds
    /// `||B chi||_C / seminorm(chi)`.
    pub general_constant: f64,
    pub beta: f64,
}

impl ABoundCheck {
    pub fn unit_excess(&self) -> f64 {
        self.measured - self.unit_constant * self.input_seminorm
    }

    pub fn general_excess(&self) -> f64 {
        self.measured - self.general_constant * self.input_seminorm
    }
}

/// `beta = ||Df o phi||_{L^q} R^(1/(alpha+1) - 1/p)`.
pub fn seminorm_to_c_constant(ctx: &DerivativeContext, cfg: &QuadratureConfig) -> Result<f64> {
    let b = b_norm_upper_bound(ctx, cfg)?;
    Ok(b * ctx.max_delay().powf(1.0 / ctx.input_exponent() - 1.0 / ctx.p()))
}

pub fn a_boundedness(
    ctx: &DerivativeContext,
    chi: &HistoryElement,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<ABoundCheck> {
    let a = apply_a(ctx, chi, cfg)?;
    let seg = history_segment(&a, t)?;
    let p = ctx.p();
    let measured = seminorm(&seg, &ctx.pb.cfg, cfg)?;
    let input_seminorm = seminorm(chi, &ctx.pb.cfg, cfg)?;
    let beta = seminorm_to_c_constant(ctx, cfg)?;
    let prolong = (1.0 + ctx.horizon).powf(1.0 / p);
    let regulate = (ctx.max_delay() + 1.0).powf(1.0 / p);
    Ok(ABoundCheck {
        t,
        measured,
        input_seminorm,
        unit_constant: prolong + regulate,
        general_constant: prolong + regulate * beta,
        beta,
    })
}
