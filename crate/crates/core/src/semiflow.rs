//! The solution semiflow `Phi(t, phi) = R_t x(.; phi, r)` on histories and its
//! time-t derivative `R_t A`.

use crate::certify::{decay_verdict, DecayVerdict, RemainderRow, RemainderTable};
use crate::derivops::{apply_a, apply_b, jacobian_gap_norm, seminorm_to_c_constant, DerivativeContext};
use crate::error::{param, Error, Result};
use crate::exec::Execution;
use crate::funcrep::{PiecewiseFunction, QuadratureConfig};
use crate::histspace::{history_segment, iso_from_quotient, seminorm, HistoryConfig, HistoryElement, QuotientPair};
use crate::nonlinear::Nonlinearity;
use crate::probe::estimate_operator_norm;
use crate::solver::{solve, Problem};

/// Tolerance below which two histories count as the same class.
pub const CLASS_TOLERANCE: f64 = 1e-12;

/// The semiflow generated by `x'(t) = f(x(t - r))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Semiflow {
    pub cfg: HistoryConfig,
    pub nl: Nonlinearity,
    pub r: f64,
}

impl Semiflow {
    pub fn new(cfg: HistoryConfig, nl: Nonlinearity, r: f64) -> Result<Self> {
        // validates r and dimensions
        Problem::new(cfg, nl.clone(), r, HistoryElement::zero(&cfg))?;
        Ok(Semiflow { cfg, nl, r })
    }

    /// Solutions exist for all forward time.
    pub fn escape_time(&self, _phi: &HistoryElement) -> f64 {
        f64::INFINITY
    }

    pub fn problem(&self, phi: &HistoryElement) -> Result<Problem> {
        Problem::new(self.cfg, self.nl.clone(), self.r, phi.clone())
    }

    /// `Phi(t, phi)`. Re-solves from `phi` on every call.
    pub fn evolve(&self, t: f64, phi: &HistoryElement, q: &QuadratureConfig) -> Result<HistoryElement> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(param(format!("evolution time must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return HistoryElement::new(phi.rep().clone(), &self.cfg);
        }
        let traj = solve(&self.problem(phi)?, t, q)?;
        history_segment(&traj.x, t)
    }

    fn distance(&self, a: &HistoryElement, b: &HistoryElement, q: &QuadratureConfig) -> Result<f64> {
        seminorm(&a.sub(b)?, &self.cfg, q)
    }

    /// `seminorm(Phi(0, phi) - phi)`.
    pub fn identity_defect(&self, phi: &HistoryElement, q: &QuadratureConfig) -> Result<f64> {
        self.distance(&self.evolve(0.0, phi, q)?, phi, q)
    }

    /// `seminorm(Phi(t + s, phi) - Phi(s, Phi(t, phi)))`.
    pub fn semigroup_defect(&self, t: f64, s: f64, phi: &HistoryElement, q: &QuadratureConfig) -> Result<f64> {
        let direct = self.evolve(t + s, phi, q)?;
        let composed = self.evolve(s, &self.evolve(t, phi, q)?, q)?;
        self.distance(&direct, &composed, q)
    }

    /// `seminorm(Phi(t, phi) - Phi(t, psi))` for `psi` in the class of `phi`.
    pub fn quotient_invariance(
        &self,
        t: f64,
        phi: &HistoryElement,
        psi: &HistoryElement,
        q: &QuadratureConfig,
    ) -> Result<f64> {
        let d = self.distance(phi, psi, q)?;
        if d > CLASS_TOLERANCE {
            return Err(Error::NotEquivalent(d));
        }
        self.distance(&self.evolve(t, phi, q)?, &self.evolve(t, psi, q)?, q)
    }

    /// Continuity table for `phi_k = phi + 2^-k d` at every `t` of the grid.
    pub fn continuity_modulus(
        &self,
        t_grid: &[f64],
        phi: &HistoryElement,
        direction: &HistoryElement,
        k_max: usize,
        q: &QuadratureConfig,
        exec: Execution,
    ) -> Result<ModulusTable> {
        let p = self.cfg.p;
        let big_r = self.cfg.max_delay;
        let jobs: Vec<(f64, usize)> = t_grid.iter().flat_map(|&t| (0..=k_max).map(move |k| (t, k))).collect();
        let horizon = t_grid.iter().copied().fold(0.0, f64::max);
        let base = if horizon > 0.0 {
            Some(solve(&self.problem(phi)?, horizon, q)?)
        } else {
            None
        };
        let rows = exec
            .map(&jobs, |&(t, k)| -> Result<ModulusRow> {
                let dk = direction.scale(0.5f64.powi(k as i32));
                let phik = phi.add(&dk)?;
                let input = seminorm(&dk, &self.cfg, q)?;
                let (modulus, y_gap) = match &base {
                    Some(base) if t > 0.0 => {
                        let moved = solve(&self.problem(&phik)?, t, q)?;
                        let x0 = base.x.restrict(-big_r, t)?;
                        let diff = moved.x.sub(&x0)?;
                        let seg = history_segment(&diff, t)?;
                        let y_gap = moved.decompose()?.sub(&crate::solver::decompose(base, t)?)?.sup_norm(q);
                        (seminorm(&seg, &self.cfg, q)?, y_gap)
                    }
                    _ => (input, 0.0),
                };
                Ok(ModulusRow {
                    t,
                    k,
                    input,
                    modulus,
                    two_term_bound: (big_r + 1.0).powf(1.0 / p) * y_gap + (1.0 + t).powf(1.0 / p) * input,
                })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(ModulusTable { rows })
    }

    /// `seminorm(Phi(t, phi + chi_k) - Phi(t, phi) - R_t A chi_k)` over
    /// `seminorm(chi_k)` for `chi_k = 2^-k chi_0` and `t <= r`.
    pub fn time_t_derivative_remainder(
        &self,
        t: f64,
        phi: &HistoryElement,
        chi0: &HistoryElement,
        k_max: usize,
        q: &QuadratureConfig,
        exec: Execution,
    ) -> Result<RemainderTable> {
        let ctx = DerivativeContext::new(self.problem(phi)?, t)?;
        if k_max < 3 {
            return Err(param("a remainder schedule needs K >= 3"));
        }
        let base = self.evolve(t, phi, q)?;
        let rows = exec
            .map_range(k_max + 1, |k| -> Result<RemainderRow> {
                let chi = chi0.scale(0.5f64.powi(k as i32));
                let moved = self.evolve(t, &phi.add(&chi)?, q)?;
                let lin = history_segment(&apply_a(&ctx, &chi, q)?, t)?;
                let rem = seminorm(&moved.sub(&base)?.sub(&lin)?, &self.cfg, q)?;
                let input = seminorm(&chi, &self.cfg, q)?;
                Ok(RemainderRow {
                    k,
                    input_norm: input,
                    remainder: rem,
                    ratio: if input == 0.0 { 0.0 } else { rem / input },
                    second_order_bound: None,
                })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(RemainderTable { rows })
    }

    /// Probed `||R_t A_phi - R_t A_phi0||` (seminorm to seminorm) with two bounds.
    pub fn derivative_continuity(
        &self,
        t: f64,
        phi: &HistoryElement,
        phi0: &HistoryElement,
        probes: &[PiecewiseFunction],
        q: &QuadratureConfig,
        exec: Execution,
    ) -> Result<TimeTDerivativeGap> {
        let ctx = DerivativeContext::new(self.problem(phi)?, t)?;
        let ctx0 = ctx.at(phi0.clone())?;
        let probe = estimate_operator_norm(
            probes,
            |chi| {
                let chi = HistoryElement::new(chi.clone(), &self.cfg)?;
                let gap = apply_b(&ctx, &chi, q)?.sub(&apply_b(&ctx0, &chi, q)?)?;
                seminorm(&history_segment(&gap, t)?, &self.cfg, q)
            },
            |chi| seminorm(&HistoryElement::new(chi.clone(), &self.cfg)?, &self.cfg, q),
            exec,
        )?;
        let p = self.cfg.p;
        let big_r = self.cfg.max_delay;
        let holder = jacobian_gap_norm(&self.nl, phi, phi0, ctx.q, q)?;
        let embed = big_r.powf(1.0 / ctx.input_exponent() - 1.0 / p);
        Ok(TimeTDerivativeGap {
            probed_gap: probe.lower_bound,
            b_gap_bound: holder,
            bound: (big_r + 1.0).powf(1.0 / p) * embed * holder,
        })
    }

    /// `seminorm(R_t A chi)` against `(1+t)^(1/p) + (R+1)^(1/p) beta`.
    pub fn a_boundedness(
        &self,
        t: f64,
        phi: &HistoryElement,
        chi: &HistoryElement,
        q: &QuadratureConfig,
    ) -> Result<crate::derivops::ABoundCheck> {
        let ctx = DerivativeContext::new(self.problem(phi)?, t)?;
        let _ = seminorm_to_c_constant(&ctx, q)?;
        crate::derivops::a_boundedness(&ctx, chi, t, q)
    }
}

/// Quotient distance computed two ways: pair norm of the difference pair and
/// seminorm of the difference.
pub fn quotient_distance_gap(
    phi: &HistoryElement,
    phi0: &HistoryElement,
    cfg: &HistoryConfig,
    q: &QuadratureConfig,
) -> Result<f64> {
    let a = iso_from_quotient(phi);
    let b = iso_from_quotient(phi0);
    let pair = QuotientPair {
        ae_class: a.ae_class.sub(&b.ae_class)?,
        eta: a.eta.iter().zip(&b.eta).map(|(x, y)| x - y).collect(),
    };
    Ok((pair.norm(cfg.p, q)? - seminorm(&phi.sub(phi0)?, cfg, q)?).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusRow {
    pub t: f64,
    pub k: usize,
    /// `seminorm(phi_k - phi)`.
    pub input: f64,
    /// `seminorm(Phi(t, phi_k) - Phi(t, phi))`.
    pub modulus: f64,
    /// `(R+1)^(1/p) ||y_k - y||_C + (1+t)^(1/p) seminorm(phi_k - phi)`.
    pub two_term_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusTable {
    pub rows: Vec<ModulusRow>,
}

impl ModulusTable {
    pub fn at(&self, t: f64) -> Vec<&ModulusRow> {
        self.rows.iter().filter(|r| r.t == t).collect()
    }

    pub fn verdict_at(&self, t: f64) -> DecayVerdict {
        decay_verdict(&self.at(t).iter().map(|r| r.modulus).collect::<Vec<_>>())
    }

    /// Worst `modulus - two_term_bound`.
    pub fn bound_excess(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.modulus - r.two_term_bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeTDerivativeGap {
    pub probed_gap: f64,
    /// `||Df o phi - Df o phi0||_{L^q}`, which bounds `||B_phi - B_phi0||` into `C`.
    pub b_gap_bound: f64,
    /// `(R+1)^(1/p) R^(1/(alpha+1) - 1/p) ||Df o phi - Df o phi0||_{L^q}`.
    pub bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn hcfg() -> HistoryConfig {
        HistoryConfig::new(1.0, 2.0, 1).unwrap()
    }

    fn flow(nl: Nonlinearity) -> Semiflow {
        Semiflow::new(hcfg(), nl, 1.0).unwrap()
    }

    fn one() -> HistoryElement {
        HistoryElement::constant(&hcfg(), &[1.0]).unwrap()
    }

    #[test]
    fn evolve_examples() {
        let sf = flow(Nonlinearity::scalar_linear(1, 1.0).unwrap());
        assert_eq!(sf.evolve(0.0, &one(), &q()).unwrap(), one());
        assert_eq!(sf.escape_time(&one()), f64::INFINITY);
        let seg = sf.evolve(1.0, &one(), &q()).unwrap();
        for th in [-1.0, -0.5, 0.0] {
            assert_abs_diff_eq!(seg.evaluate(th).unwrap()[0], 2.0 + th, epsilon = 1e-14);
        }
        let frozen = flow(Nonlinearity::zero(1).unwrap());
        let phi = HistoryElement::new(
            PiecewiseFunction::from_monomials(vec![-1.0, 0.0], &[vec![vec![0.0, 1.0]]], vec![0.5]).unwrap(),
            &hcfg(),
        )
        .unwrap();
        let bar = crate::histspace::static_prolongation(&phi, 0.4).unwrap();
        let expect = history_segment(&bar, 0.4).unwrap();
        assert_eq!(
            seminorm(
                &frozen.evolve(0.4, &phi, &q()).unwrap().sub(&expect).unwrap(),
                &hcfg(),
                &q()
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn semigroup_examples() {
        let sf = flow(Nonlinearity::scalar_linear(1, 1.0).unwrap());
        assert!(sf.semigroup_defect(0.7, 0.0, &one(), &q()).unwrap() <= 1e-15);
        assert!(sf.semigroup_defect(0.5, 0.5, &one(), &q()).unwrap() <= 1e-9);
        let frozen = flow(Nonlinearity::zero(1).unwrap());
        assert_eq!(frozen.semigroup_defect(0.3, 1.4, &one(), &q()).unwrap(), 0.0);
    }

    #[test]
    fn quotient_examples() {
        let sf = flow(Nonlinearity::cubic(1, -1.0).unwrap());
        assert_eq!(sf.quotient_invariance(1.3, &one(), &one(), &q()).unwrap(), 0.0);
        let edited = one().with_point_value(-0.25, vec![50.0]).unwrap();
        assert!(sf.quotient_invariance(1.3, &one(), &edited, &q()).unwrap() <= 1e-10);
        let other = HistoryElement::constant(&hcfg(), &[2.0]).unwrap();
        assert!(matches!(
            sf.quotient_invariance(1.0, &one(), &other, &q()),
            Err(Error::NotEquivalent(_))
        ));
    }

    #[test]
    fn modulus_examples() {
        let sf = flow(Nonlinearity::zero(1).unwrap());
        let zero = HistoryElement::zero(&hcfg());
        let t = sf
            .continuity_modulus(&[0.5, 1.0], &one(), &zero, 4, &q(), Execution::Sequential)
            .unwrap();
        assert!(t.rows.iter().all(|r| r.modulus == 0.0));
        let t = sf
            .continuity_modulus(&[0.5, 1.0], &one(), &one(), 12, &q(), Execution::Parallel)
            .unwrap();
        for r in &t.rows {
            assert!(r.modulus <= (1.0 + r.t).sqrt() * r.input + 1e-12);
        }
        assert!(t.verdict_at(1.0).passed());

        let lin = flow(Nonlinearity::scalar_linear(1, -1.0).unwrap());
        let t = lin
            .continuity_modulus(&[1.0], &one(), &one(), 6, &q(), Execution::Parallel)
            .unwrap();
        let ratios: Vec<f64> = t.rows.iter().map(|r| r.modulus / r.input).collect();
        for w in ratios.windows(2) {
            assert_abs_diff_eq!(w[0], w[1], epsilon = 1e-12);
        }
        assert!(t.bound_excess() <= 1e-8);
    }

    #[test]
    fn derivative_remainder_examples() {
        let lin = flow(Nonlinearity::scalar_linear(1, 3.0).unwrap());
        let t = lin
            .time_t_derivative_remainder(1.0, &one(), &one(), 5, &q(), Execution::Parallel)
            .unwrap();
        assert!(t.rows.iter().all(|r| r.remainder <= 1e-10));

        let sq = flow(Nonlinearity::quadratic(1, 0.5).unwrap());
        let t = sq
            .time_t_derivative_remainder(1.0, &one(), &one(), 10, &q(), Execution::Parallel)
            .unwrap();
        let c = (4.0f64 / 3.0).sqrt() / 2.0;
        for r in &t.rows {
            let expect = 0.25f64.powi(r.k as i32) * c;
            assert!((r.remainder - expect).abs() <= 1e-12 * expect.max(1e-4), "{r:?}");
        }
        assert!(t.verdict().passed());
        let zero = sq
            .time_t_derivative_remainder(
                1.0,
                &one(),
                &HistoryElement::zero(&hcfg()),
                4,
                &q(),
                Execution::Sequential,
            )
            .unwrap();
        assert!(zero.rows.iter().all(|r| r.remainder == 0.0));
    }
}
