//! The history space: functions on `[-R, 0]` measured by
//! `(||phi||_{L^p}^p + |phi(0)|^p)^(1/p)`, their quotient pairs, static
//! prolongations and history segments.

use crate::error::{param, Error, Result};
use crate::funcrep::{euclid, PiecewiseFunction, QuadratureConfig};

/// Maximal delay `R`, exponent `p` and state dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryConfig {
    pub max_delay: f64,
    pub p: f64,
    pub dim: usize,
}

impl HistoryConfig {
    pub fn new(max_delay: f64, p: f64, dim: usize) -> Result<Self> {
        if !(max_delay > 0.0) || !max_delay.is_finite() {
            return Err(param(format!("maximal delay must be positive, got {max_delay}")));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(param(format!("exponent must satisfy 1 <= p < inf, got {p}")));
        }
        if dim == 0 {
            return Err(param("state dimension must be at least 1"));
        }
        Ok(HistoryConfig { max_delay, p, dim })
    }
}

/// A history `phi` on `[-R, 0]`; its endpoint value is `phi(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryElement {
    rep: PiecewiseFunction,
}

impl HistoryElement {
    /// Wrap a representative whose domain is `[-R, 0]`.
    pub fn new(rep: PiecewiseFunction, cfg: &HistoryConfig) -> Result<Self> {
        let (a, b) = rep.domain();
        let r = cfg.max_delay;
        let tol = 1e-12 * r.max(1.0);
        if (a + r).abs() > tol || b.abs() > tol {
            return Err(Error::DomainMismatch {
                a0: -r,
                b0: 0.0,
                a1: a,
                b1: b,
            });
        }
        if rep.dim() != cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim,
                found: rep.dim(),
            });
        }
        let rep = if a == -r && b == 0.0 {
            rep
        } else {
            rep.snap_domain(-r, 0.0)?
        };
        Ok(HistoryElement { rep })
    }

    pub fn constant(cfg: &HistoryConfig, value: &[f64]) -> Result<Self> {
        Self::new(PiecewiseFunction::constant(-cfg.max_delay, 0.0, value)?, cfg)
    }

    pub fn zero(cfg: &HistoryConfig) -> Self {
        let rep = PiecewiseFunction::zero(-cfg.max_delay, 0.0, cfg.dim).expect("valid config");
        HistoryElement { rep }
    }

    pub fn rep(&self) -> &PiecewiseFunction {
        &self.rep
    }

    pub fn into_rep(self) -> PiecewiseFunction {
        self.rep
    }

    /// `phi(0)`.
    pub fn value_at_zero(&self) -> &[f64] {
        self.rep.endpoint()
    }

    pub fn max_delay(&self) -> f64 {
        -self.rep.start()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn evaluate(&self, theta: f64) -> Result<Vec<f64>> {
        self.rep.evaluate(theta)
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        Ok(HistoryElement {
            rep: self.rep.linear_combination(a, &other.rep, b)?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        HistoryElement { rep: self.rep.scale(c) }
    }

    /// Null-set edit: override the representative at one point of `[-R, 0)`.
    pub fn with_point_value(&self, theta: f64, value: Vec<f64>) -> Result<Self> {
        if theta >= 0.0 {
            return Err(param("null-set edits must leave phi(0) unchanged"));
        }
        Ok(HistoryElement {
            rep: self.rep.clone().with_point_value(theta, value)?,
        })
    }
}

/// An almost-everywhere class together with a free endpoint value `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientPair {
    pub ae_class: PiecewiseFunction,
    pub eta: Vec<f64>,
}

impl QuotientPair {
    /// `(||ae_class||_{L^p}^p + |eta|^p)^(1/p)`.
    pub fn norm(&self, p: f64, q: &QuadratureConfig) -> Result<f64> {
        let integral = self.ae_class.lp_integral(p, q)?;
        Ok((integral + euclid(&self.eta).powf(p)).powf(1.0 / p))
    }
}

/// `(||phi||_{L^p[-R,0]}^p + |phi(0)|^p)^(1/p)`.
pub fn seminorm(phi: &HistoryElement, cfg: &HistoryConfig, q: &QuadratureConfig) -> Result<f64> {
    if phi.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            found: phi.dim(),
        });
    }
    bar_norm(&phi.rep, cfg.p, q)
}

/// `(||x||_{L^p[a,b]}^p + |x(b)|^p)^(1/p)`.
pub fn bar_norm(x: &PiecewiseFunction, p: f64, q: &QuadratureConfig) -> Result<f64> {
    let integral = x.lp_integral(p, q)?;
    Ok((integral + euclid(x.endpoint()).powf(p)).powf(1.0 / p))
}

/// `phi` on `[-R, 0]` followed by the constant `phi(0)` on `[0, T]`.
///
/// A breakpoint is always placed at 0.
pub fn static_prolongation(phi: &HistoryElement, horizon: f64) -> Result<PiecewiseFunction> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(param(format!("prolongation horizon must be positive, got {horizon}")));
    }
    let tail = PiecewiseFunction::constant(0.0, horizon, phi.value_at_zero())?;
    phi.rep.concat(&tail)
}

/// `theta -> x(t + theta)` on `[-R, 0]` for `x` defined on `[-R, T]`.
pub fn history_segment(x: &PiecewiseFunction, t: f64) -> Result<HistoryElement> {
    let (a, b) = x.domain();
    let r = -a;
    if !(r > 0.0) {
        return Err(param("trajectory must start at -R < 0"));
    }
    if !(t >= 0.0 && t <= b) {
        return Err(Error::Domain { t, a: 0.0, b });
    }
    let rep = if t == 0.0 {
        x.restrict(a, 0.0)?
    } else {
        x.restrict(t - r, t)?.shift(-t).snap_domain(-r, 0.0)?
    };
    Ok(HistoryElement { rep })
}

/// The element whose a.e. class is `pair.ae_class` and whose value at 0 is `eta`.
pub fn iso_to_quotient(pair: &QuotientPair, cfg: &HistoryConfig) -> Result<HistoryElement> {
    let rep = pair.ae_class.clone().with_endpoint(pair.eta.clone())?;
    HistoryElement::new(rep, cfg)
}

pub fn iso_from_quotient(phi: &HistoryElement) -> QuotientPair {
    QuotientPair {
        ae_class: phi.rep.clone(),
        eta: phi.value_at_zero().to_vec(),
    }
}

/// Whether `phi` and `psi` agree a.e. and at 0, decided by
/// `seminorm(phi - psi) <= tol`.
pub fn same_class(
    phi: &HistoryElement,
    psi: &HistoryElement,
    cfg: &HistoryConfig,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<bool> {
    Ok(seminorm(&phi.sub(psi)?, cfg, q)? <= tol)
}
