//! Empirical lower bounds for operator norms from random piecewise-constant
//! probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::exec::Execution;
use crate::funcrep::{Cheb, PiecewiseFunction};

/// Pieces per probe function.
pub const PROBE_PIECES: usize = 8;

/// Probe `index` of the family identified by `seed`: piecewise constant on
/// 8 equal pieces of `[a, b]`, values and endpoint standard normal.
///
/// Each probe has its own ChaCha stream, so the family does not depend on
/// how it is generated or in which order.
pub fn random_probe(a: f64, b: f64, dim: usize, seed: u64, index: u64) -> PiecewiseFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let breaks: Vec<f64> = (0..=PROBE_PIECES)
        .map(|j| {
            if j == PROBE_PIECES {
                b
            } else {
                a + (b - a) * j as f64 / PROBE_PIECES as f64
            }
        })
        .collect();
    let pieces = (0..PROBE_PIECES)
        .map(|_| (0..dim).map(|_| Cheb::constant(rng.sample(StandardNormal))).collect())
        .collect();
    let endpoint = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    PiecewiseFunction::new(breaks, pieces, endpoint).expect("valid probe")
}

/// `count` probes, each normalised to unit `norm`.
pub fn random_probes<N>(a: f64, b: f64, dim: usize, count: usize, seed: u64, norm: N) -> Result<Vec<PiecewiseFunction>>
where
    N: Fn(&PiecewiseFunction) -> Result<f64>,
{
    (0..count as u64)
        .map(|i| {
            let f = random_probe(a, b, dim, seed, i);
            let n = norm(&f)?;
            Ok(if n > 0.0 { f.scale(1.0 / n) } else { f })
        })
        .collect()
}

/// Finite-rank probing record of a linear operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperatorProbe {
    /// `max_k |op chi_k|_out / |chi_k|_in`, a lower bound for the operator norm.
    pub lower_bound: f64,
    /// Index of the maximising probe.
    pub argmax: usize,
    pub ratios: Vec<f64>,
}

/// Lower bound `max |op chi| / |chi|` over the probes (zero inputs skipped).
pub fn estimate_operator_norm<Op, In>(
    probes: &[PiecewiseFunction],
    op_norm: Op,
    norm_in: In,
    exec: Execution,
) -> Result<LinearOperatorProbe>
where
    Op: Fn(&PiecewiseFunction) -> Result<f64> + Sync + Send,
    In: Fn(&PiecewiseFunction) -> Result<f64> + Sync + Send,
{
    let ratios = exec
        .map(probes, |chi| -> Result<f64> {
            let n = norm_in(chi)?;
            if n == 0.0 {
                return Ok(0.0);
            }
            Ok(op_norm(chi)? / n)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let (argmax, lower_bound) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(LinearOperatorProbe {
        lower_bound,
        argmax,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::QuadratureConfig;

    #[test]
    fn probes_are_deterministic_and_normalised() {
        let q = QuadratureConfig::default();
        let a = random_probes(-1.0, 0.0, 2, 5, 7, |f| f.lp_norm(2.0, &q)).unwrap();
        let b = random_probes(-1.0, 0.0, 2, 5, 7, |f| f.lp_norm(2.0, &q)).unwrap();
        assert_eq!(a, b);
        for f in &a {
            assert_eq!(f.breaks().len(), PROBE_PIECES + 1);
            assert!((f.lp_norm(2.0, &q).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_ne!(a[0], a[1]);
        assert_ne!(random_probe(-1.0, 0.0, 1, 7, 0), random_probe(-1.0, 0.0, 1, 8, 0));
    }

    #[test]
    fn zero_operator_and_identity() {
        let q = QuadratureConfig::default();
        let probes = random_probes(0.0, 1.0, 1, 4, 1, |f| f.lp_norm(1.0, &q)).unwrap();
        let zero = estimate_operator_norm(&probes, |_| Ok(0.0), |f| f.lp_norm(1.0, &q), Execution::Sequential).unwrap();
        assert_eq!(zero.lower_bound, 0.0);
        let id = estimate_operator_norm(
            &probes,
            |f| f.lp_norm(1.0, &q),
            |f| f.lp_norm(1.0, &q),
            Execution::Parallel,
        )
        .unwrap();
        assert!((id.lower_bound - 1.0).abs() < 1e-14);
    }
}
