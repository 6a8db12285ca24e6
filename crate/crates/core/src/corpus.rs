//! Seeded random histories for property sweeps and experiment configs.
//!
//! A [`HistorySpec`] keeps the monomial description a history was built
//! from, so test oracles can evaluate it without going through the
//! Chebyshev representation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Result};
use crate::funcrep::PiecewiseFunction;
use crate::histspace::{HistoryConfig, HistoryElement};

/// Piecewise polynomial in the absolute variable: piece `i`, component `j`
/// is `sum_k coeffs[i][j][k] t^k` on `[breaks[i], breaks[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySpec {
    pub breaks: Vec<f64>,
    pub coeffs: Vec<Vec<Vec<f64>>>,
    pub endpoint: Vec<f64>,
    /// Values overriding the pieces at single interior points.
    pub point_values: Vec<(f64, Vec<f64>)>,
}

impl HistorySpec {
    pub fn constant(max_delay: f64, value: &[f64]) -> Self {
        HistorySpec {
            breaks: vec![-max_delay, 0.0],
            coeffs: vec![value.iter().map(|&v| vec![v]).collect()],
            endpoint: value.to_vec(),
            point_values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.endpoint.len()
    }

    pub fn to_function(&self) -> Result<PiecewiseFunction> {
        let mut f = PiecewiseFunction::from_monomials(self.breaks.clone(), &self.coeffs, self.endpoint.clone())?;
        for (t, v) in &self.point_values {
            f = f.with_point_value(*t, v.clone())?;
        }
        Ok(f)
    }

    pub fn build(&self, cfg: &HistoryConfig) -> Result<HistoryElement> {
        if self.breaks.first() != Some(&-cfg.max_delay) || self.breaks.last() != Some(&0.0) {
            return Err(param(format!(
                "history breakpoints must run from {} to 0",
                -cfg.max_delay
            )));
        }
        HistoryElement::new(self.to_function()?, cfg)
    }

    /// Direct Horner evaluation of the description.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if let Some((_, v)) = self.point_values.iter().find(|(s, _)| *s == t) {
            return v.clone();
        }
        let n = self.breaks.len();
        if t >= self.breaks[n - 1] {
            return self.endpoint.clone();
        }
        let i = self.breaks.partition_point(|&b| b <= t).saturating_sub(1).min(n - 2);
        self.coeffs[i].iter().map(|c| horner(c, t)).collect()
    }
}

pub fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// Shape of generated histories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusOptions {
    /// Breakpoints are drawn from the grid `-R + j R / grid`.
    pub grid: usize,
    pub max_pieces: usize,
    pub max_degree: usize,
    pub amplitude: f64,
    /// Glue pieces continuously and take the endpoint from the last piece.
    pub continuous: bool,
    /// Add up to two single-point overrides.
    pub point_values: bool,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            grid: 16,
            max_pieces: 4,
            max_degree: 3,
            amplitude: 1.0,
            continuous: false,
            point_values: false,
        }
    }
}

pub fn random_history<G: Rng + ?Sized>(max_delay: f64, dim: usize, opts: &CorpusOptions, rng: &mut G) -> HistorySpec {
    let grid = opts.grid.max(1);
    let pieces = rng.random_range(1..=opts.max_pieces.clamp(1, grid));
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() + 1 < pieces {
        let c = rng.random_range(1..grid);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let at = |j: usize| {
        if j == grid {
            0.0
        } else {
            -max_delay + max_delay * j as f64 / grid as f64
        }
    };
    let mut breaks = vec![-max_delay];
    breaks.extend(cuts.iter().map(|&j| at(j)));
    breaks.push(0.0);

    let mut coeffs: Vec<Vec<Vec<f64>>> = Vec::with_capacity(pieces);
    for i in 0..pieces {
        let comps = (0..dim)
            .map(|j| {
                let deg = rng.random_range(0..=opts.max_degree);
                let mut c: Vec<f64> = (0..=deg)
                    .map(|k| gauss(rng, opts.amplitude / (k as f64 + 1.0) / max_delay.powi(k as i32)))
                    .collect();
                if opts.continuous && i > 0 {
                    let b = breaks[i];
                    let prev: f64 = horner(&coeffs[i - 1][j], b);
                    c[0] += prev - horner(&c, b);
                }
                c
            })
            .collect();
        coeffs.push(comps);
    }
    let endpoint = if opts.continuous {
        coeffs[pieces - 1].iter().map(|c| horner(c, 0.0)).collect()
    } else {
        (0..dim).map(|_| gauss(rng, opts.amplitude)).collect()
    };
    let mut point_values = Vec::new();
    if opts.point_values {
        for _ in 0..rng.random_range(0..=2usize) {
            let t = at(rng.random_range(1..grid)) + 0.5 * max_delay / grid as f64;
            if !point_values.iter().any(|(s, _)| *s == t) {
                point_values.push((t, (0..dim).map(|_| gauss(rng, 10.0 * opts.amplitude)).collect()));
            }
        }
    }
    HistorySpec {
        breaks,
        coeffs,
        endpoint,
        point_values,
    }
}

fn gauss<G: Rng + ?Sized>(rng: &mut G, scale: f64) -> f64 {
    scale * rng.sample::<f64, _>(StandardNormal)
}

/// `count` histories; element `i` uses ChaCha stream `i` of `seed`.
pub fn history_corpus(max_delay: f64, dim: usize, count: usize, seed: u64, opts: &CorpusOptions) -> Vec<HistorySpec> {
    (0..count as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            random_history(max_delay, dim, opts, &mut rng)
        })
        .collect()
}
