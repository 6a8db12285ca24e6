//! Solver against a dense midpoint-rule integration of the delay equation.

use lpdde::corpus::{history_corpus, CorpusOptions, HistorySpec};
use lpdde::solver::solve;
use lpdde::{HistoryConfig, Nonlinearity, Problem, QuadratureConfig};

const PANELS: usize = 1_000_000;

/// Values of `x` at `t_j = j r / PANELS` for `j = 0 ..= 2 PANELS`.
///
/// First step: midpoint rule, panels split at history breakpoints, with the
/// history evaluated from its monomial description. Second step: the delayed midpoint value is the average of the
/// two neighbouring first-step grid values.
fn oracle(f: &dyn Fn(&[f64], &mut [f64]), spec: &HistorySpec, r: f64) -> Vec<Vec<f64>> {
    let n = spec.dim();
    let h = r / PANELS as f64;
    let mut xs = Vec::with_capacity(2 * PANELS + 1);
    let mut x = spec.endpoint.clone();
    xs.push(x.clone());
    let mut fy = vec![0.0; n];
    let mut mid = vec![0.0; n];
    for j in 0..2 * PANELS {
        if j < PANELS {
            let (lo, hi) = (j as f64 * h - r, (j + 1) as f64 * h - r);
            // split panels straddling a history breakpoint
            let mut cuts = vec![lo];
            cuts.extend(spec.breaks.iter().copied().filter(|&b| b > lo && b < hi));
            cuts.push(hi);
            fy.iter_mut().for_each(|v| *v = 0.0);
            let mut part = vec![0.0; n];
            for w in cuts.windows(2) {
                f(&spec.eval(0.5 * (w[0] + w[1])), &mut part);
                for c in 0..n {
                    fy[c] += part[c] * (w[1] - w[0]) / h;
                }
            }
        } else {
            let (a, b) = (&xs[j - PANELS], &xs[j - PANELS + 1]);
            for c in 0..n {
                mid[c] = 0.5 * (a[c] + b[c]);
            }
            f(&mid, &mut fy);
        }
        for c in 0..n {
            x[c] += h * fy[c];
        }
        xs.push(x.clone());
    }
    xs
}

fn sup_gap(spec: &HistorySpec, nl: Nonlinearity, f: &dyn Fn(&[f64], &mut [f64]), r: f64, big_r: f64) -> f64 {
    let q = QuadratureConfig::default();
    let cfg = HistoryConfig::new(big_r, 2.0, spec.dim()).unwrap();
    let pb = Problem::new(cfg, nl, r, spec.build(&cfg).unwrap()).unwrap();
    let traj = solve(&pb, 2.0 * r, &q).unwrap();
    let xs = oracle(f, spec, r);
    let h = r / PANELS as f64;
    let mut worst = 0.0f64;
    for (j, want) in xs.iter().enumerate() {
        let t = if j == 2 * PANELS { 2.0 * r } else { j as f64 * h };
        let got = traj.x.evaluate(t).unwrap();
        for (a, b) in got.iter().zip(want) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

#[test]
fn linear_constant_history_closed_form() {
    let q = QuadratureConfig::default();
    let cfg = HistoryConfig::new(1.0, 1.0, 1).unwrap();
    let pb = Problem::new(
        cfg,
        Nonlinearity::scalar_linear(1, 1.0).unwrap(),
        1.0,
        HistorySpec::constant(1.0, &[1.0]).build(&cfg).unwrap(),
    )
    .unwrap();
    let traj = solve(&pb, 2.0, &q).unwrap();
    let x2 = traj.x.evaluate(2.0).unwrap()[0];
    assert!((x2 - 3.5).abs() <= 1e-7, "{x2}");
    let gap = sup_gap(
        &HistorySpec::constant(1.0, &[1.0]),
        Nonlinearity::scalar_linear(1, 1.0).unwrap(),
        &|y, o| o[0] = y[0],
        1.0,
        1.0,
    );
    assert!(gap <= 1e-7, "{gap:e}");
}

#[test]
fn polynomial_problems_match_the_oracle() {
    let opts = CorpusOptions {
        amplitude: 0.5,
        point_values: true,
        ..Default::default()
    };
    let scalar = history_corpus(1.0, 1, 3, 40, &opts);
    let cases: Vec<(Nonlinearity, Box<dyn Fn(&[f64], &mut [f64])>, f64)> = vec![
        (
            Nonlinearity::quadratic(1, 0.8).unwrap(),
            Box::new(|y, o| o[0] = 0.8 * y[0] * y[0]),
            1.0,
        ),
        (
            Nonlinearity::cubic(1, -0.5).unwrap(),
            Box::new(|y, o| o[0] = -0.5 * y[0] * y[0] * y[0]),
            0.5,
        ),
        (
            Nonlinearity::scalar_linear(1, -1.3).unwrap(),
            Box::new(|y, o| o[0] = -1.3 * y[0]),
            0.75,
        ),
    ];
    for ((nl, f, r), spec) in cases.into_iter().zip(&scalar) {
        let gap = sup_gap(spec, nl, f.as_ref(), r, 1.0);
        assert!(gap <= 1e-7, "r={r}: {gap:e}");
    }
    let planar = &history_corpus(1.0, 2, 1, 41, &opts)[0];
    let a = vec![0.3, -1.1, 0.9, 0.2];
    let b = vec![0.1, -0.4];
    let gap = sup_gap(
        planar,
        Nonlinearity::affine(a, b).unwrap(),
        &|y, o| {
            o[0] = 0.3 * y[0] - 1.1 * y[1] + 0.1;
            o[1] = 0.9 * y[0] + 0.2 * y[1] - 0.4;
        },
        1.0,
        1.0,
    );
    assert!(gap <= 1e-7, "{gap:e}");
}
