//! Method of steps for `x'(t) = f(x(t - r))` with history `phi` on `[-R, 0]`.

use std::sync::Arc;

use crate::error::{param, Result};
use crate::exec::Execution;
use crate::funcrep::{LazyComposition, PiecewiseFunction, QuadratureConfig};
use crate::histspace::{bar_norm, seminorm, static_prolongation, HistoryConfig, HistoryElement};
use crate::nonlinear::Nonlinearity;

/// Initial value problem: delay `r` in `(0, R]`, history `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub cfg: HistoryConfig,
    pub nl: Nonlinearity,
    pub r: f64,
    pub phi: HistoryElement,
}

impl Problem {
    pub fn new(cfg: HistoryConfig, nl: Nonlinearity, r: f64, phi: HistoryElement) -> Result<Self> {
        if !(r > 0.0 && r <= cfg.max_delay) {
            return Err(param(format!("delay must lie in (0, {}], got {r}", cfg.max_delay)));
        }
        if nl.dim != cfg.dim {
            return Err(crate::Error::DimensionMismatch {
                expected: cfg.dim,
                found: nl.dim,
            });
        }
        let phi = HistoryElement::new(phi.into_rep(), &cfg)?;
        Ok(Problem { cfg, nl, r, phi })
    }

    /// Same equation, different history.
    pub fn with_history(&self, phi: HistoryElement) -> Result<Self> {
        Problem::new(self.cfg, self.nl.clone(), self.r, phi)
    }
}

/// Solution on `[-R, T]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x: PiecewiseFunction,
    pub problem: Problem,
    pub horizon: f64,
    /// `0, r, 2r, ...` up to the horizon (inclusive of the horizon when it is a multiple).
    pub step_boundaries: Vec<f64>,
    /// Accumulated integration error estimate reported by the integrator.
    pub integration_defect: f64,
}

/// One step: the trajectory on `[-R, r]`.
pub fn solve_step(pb: &Problem, cfg: &QuadratureConfig) -> Result<Trajectory> {
    solve(pb, pb.r, cfg)
}

/// The trajectory on `[-R, T]`.
///
/// Step `k` covers `[kr, min((k+1)r, T)]`. Its integrand `f(x(s - r))` is
/// composed lazily from the already computed part of `x`, shifted by `r`,
/// and integrated piece by piece from the value `x(kr)`.
pub fn solve(pb: &Problem, horizon: f64, cfg: &QuadratureConfig) -> Result<Trajectory> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(param(format!("horizon must be positive, got {horizon}")));
    }
    cfg.validate()?;
    let r = pb.r;
    let steps = ((horizon / r) * (1.0 - 1e-14)).ceil().max(1.0) as usize;
    let nl = pb.nl.clone();
    let map: crate::funcrep::PointMap = Arc::new(move |y: &[f64], out: &mut [f64]| nl.eval_into(y, out));
    let mut x = pb.phi.rep().clone();
    let mut boundaries = vec![0.0];
    let mut defect = 0.0;
    for k in 0..steps {
        let t0 = if k == 0 { 0.0 } else { k as f64 * r };
        let t1 = if k + 1 == steps { horizon } else { (k + 1) as f64 * r };
        let history = x.restrict(t0 - r, t1 - r)?.shift(r).snap_domain(t0, t1)?;
        let integrand = LazyComposition::new(history, pb.cfg.dim, map.clone());
        let start = x.endpoint().to_vec();
        let step = integrand.cumulative_integral(&start, cfg)?;
        defect += step.defect;
        x = x.concat(&step.function)?;
        boundaries.push(t1);
    }
    Ok(Trajectory {
        x,
        problem: pb.clone(),
        horizon,
        step_boundaries: boundaries,
        integration_defect: defect,
    })
}

impl Trajectory {
    /// `y = x - static prolongation of phi` on `[-R, T]`.
    pub fn decompose(&self) -> Result<PiecewiseFunction> {
        decompose(self, self.horizon)
    }

    /// Largest jump of `x` across its breakpoints inside `(0, T]`.
    pub fn max_jump_after_zero(&self) -> f64 {
        let x = self.x.restrict(0.0, self.horizon).expect("inside domain");
        x.max_interior_jump()
    }
}

/// `y = x - phi_bar` on `[-R, T]` for `T <= horizon`.
pub fn decompose(traj: &Trajectory, horizon: f64) -> Result<PiecewiseFunction> {
    if !(horizon > 0.0 && horizon <= traj.horizon) {
        return Err(param(format!(
            "decomposition horizon must lie in (0, {}]",
            traj.horizon
        )));
    }
    let x = traj.x.restrict(traj.x.start(), horizon)?;
    let bar = static_prolongation(&traj.problem.phi, horizon)?;
    x.sub(&bar)
}

/// `lip T / (T + R + 1) + (1 + T)`.
///
/// This weighting of the Lipschitz term is not an upper bound in general:
/// mass of `phi1 - phi2` away from `0` is carried into the solution at full
/// weight `lip`. See [`lipschitz_constant`] for a sound constant.
pub fn lipschitz_constant_weighted(lip: f64, horizon: f64, max_delay: f64) -> f64 {
    lip * horizon / (horizon + max_delay + 1.0) + (1.0 + horizon)
}

/// `max(1 + (1 + T) lip, 1 + T)`: bounds the `p = 1` bar norm of
/// `x(phi1) - x(phi2)` on `[-R, T]`, `T <= r`, by the seminorm of `phi1 - phi2`.
pub fn lipschitz_constant(lip: f64, horizon: f64) -> f64 {
    (1.0 + (1.0 + horizon) * lip).max(1.0 + horizon)
}

/// One Lipschitz-dependence measurement at `p = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCheck {
    /// Bar norm (`p = 1`) of `x(phi1) - x(phi2)` over `[-R, T]`.
    pub measured: f64,
    /// `p = 1` seminorm of `phi1 - phi2`.
    pub input: f64,
    pub lip: f64,
    pub weighted_constant: f64,
    pub constant: f64,
}

impl LipschitzCheck {
    pub fn ratio(&self) -> f64 {
        if self.input == 0.0 {
            0.0
        } else {
            self.measured / self.input
        }
    }

    pub fn weighted_excess(&self) -> f64 {
        self.measured - self.weighted_constant * self.input
    }

    pub fn excess(&self) -> f64 {
        self.measured - self.constant * self.input
    }
}

/// Compare the solutions from `pb.phi` and `phi2` on `[-R, T]`, `T <= r`.
pub fn lipschitz_dependence(
    pb: &Problem,
    phi2: &HistoryElement,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<LipschitzCheck> {
    let lip = pb
        .nl
        .lip_f
        .ok_or_else(|| param(format!("`{}` has no global Lipschitz constant", pb.nl.name)))?;
    if !(horizon > 0.0 && horizon <= pb.r) {
        return Err(param(format!("horizon must lie in (0, r = {}], got {horizon}", pb.r)));
    }
    let x1 = solve(pb, horizon, cfg)?;
    let x2 = solve(&pb.with_history(phi2.clone())?, horizon, cfg)?;
    let measured = bar_norm(&x1.x.sub(&x2.x)?, 1.0, cfg)?;
    let one = HistoryConfig { p: 1.0, ..pb.cfg };
    let input = seminorm(&pb.phi.sub(phi2)?, &one, cfg)?;
    Ok(LipschitzCheck {
        measured,
        input,
        lip,
        weighted_constant: lipschitz_constant_weighted(lip, horizon, pb.cfg.max_delay),
        constant: lipschitz_constant(lip, horizon),
    })
}

/// Row `k` of a continuous-dependence schedule `phi_k = phi + 2^-k (phi0 - phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceRow {
    pub k: usize,
    /// `||phi_k - phi||` in `L^alpha`, `alpha` the growth exponent of `f`.
    pub input_gap: f64,
    /// `||y(phi_k) - y(phi)||_C` on `[-R, T]`.
    pub output_gap: f64,
    /// `||f o phi_k - f o phi||_{L^1[-R, 0]}`, which bounds `output_gap` for `T <= r`.
    pub direct_bound: f64,
}

/// Continuous-dependence schedule towards `pb.phi` from `phi0`, rows `k = 0..=k_max`.
pub fn continuous_dependence(
    pb: &Problem,
    phi0: &HistoryElement,
    horizon: f64,
    k_max: usize,
    cfg: &QuadratureConfig,
    exec: Execution,
) -> Result<Vec<DependenceRow>> {
    if !(horizon > 0.0 && horizon <= pb.r) {
        return Err(param(format!("horizon must lie in (0, r = {}], got {horizon}", pb.r)));
    }
    let alpha = pb.nl.f_growth.alpha;
    let base = solve(pb, horizon, cfg)?.decompose()?;
    let dir = phi0.sub(&pb.phi)?;
    let n = pb.cfg.dim;
    exec.map_range(k_max + 1, |k| -> Result<DependenceRow> {
        let phi_k = pb.phi.linear_combination(1.0, &dir, 0.5f64.powi(k as i32))?;
        let y = solve(&pb.with_history(phi_k.clone())?, horizon, cfg)?.decompose()?;
        let nl = pb.nl.clone();
        let gap = LazyComposition::from_fn(phi_k.rep().stack(pb.phi.rep())?, n, move |v, o| {
            let (a, b) = (nl.eval(&v[..n]), nl.eval(&v[n..]));
            for i in 0..n {
                o[i] = a[i] - b[i];
            }
        });
        Ok(DependenceRow {
            k,
            input_gap: phi_k.rep().sub(pb.phi.rep())?.lp_norm(alpha, cfg)?,
            output_gap: y.sub(&base)?.sup_norm(cfg),
            direct_bound: gap.lp_norm(1.0, cfg)?,
        })
    })
    .into_iter()
    .collect()
}
