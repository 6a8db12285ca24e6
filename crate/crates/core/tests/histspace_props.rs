use lpdde::corpus::{history_corpus, horner, CorpusOptions, HistorySpec};
use lpdde::histspace::{
    bar_norm, history_segment, iso_from_quotient, iso_to_quotient, seminorm, static_prolongation, QuotientPair,
};
use lpdde::solver::solve;
use lpdde::{HistoryConfig, Nonlinearity, Problem, QuadratureConfig};

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len().max(b.len()))
        .map(|i| a.get(i).unwrap_or(&0.0) + b.get(i).unwrap_or(&0.0))
        .collect()
}

fn poly_definite(c: &[f64], a: f64, b: f64) -> f64 {
    let anti: Vec<f64> = std::iter::once(0.0)
        .chain(c.iter().enumerate().map(|(k, v)| v / (k as f64 + 1.0)))
        .collect();
    horner(&anti, b) - horner(&anti, a)
}

/// Exact `int |phi|^p + |phi(0)|^p` for even integer `p`, by polynomial algebra.
fn closed_form_even(spec: &HistorySpec, p: u32) -> f64 {
    assert!(p.is_multiple_of(2));
    let mut total = 0.0;
    for (i, comps) in spec.coeffs.iter().enumerate() {
        let sq = comps.iter().fold(vec![0.0], |acc, c| poly_add(&acc, &poly_mul(c, c)));
        let mut pow = vec![1.0];
        for _ in 0..p / 2 {
            pow = poly_mul(&pow, &sq);
        }
        total += poly_definite(&pow, spec.breaks[i], spec.breaks[i + 1]);
    }
    let eta: f64 = spec.endpoint.iter().map(|v| v * v).sum::<f64>().sqrt();
    (total + eta.powi(p as i32)).powf(1.0 / p as f64)
}

/// Exact value for piecewise-constant specs and any `p`.
fn closed_form_constant(spec: &HistorySpec, p: f64) -> f64 {
    let mut total = 0.0;
    for (i, comps) in spec.coeffs.iter().enumerate() {
        let v: f64 = comps.iter().map(|c| c[0] * c[0]).sum::<f64>().sqrt();
        total += v.powf(p) * (spec.breaks[i + 1] - spec.breaks[i]);
    }
    let eta: f64 = spec.endpoint.iter().map(|v| v * v).sum::<f64>().sqrt();
    (total + eta.powf(p)).powf(1.0 / p)
}

#[test]
fn seminorm_matches_closed_forms() {
    let q = QuadratureConfig::default();
    let poly = CorpusOptions {
        max_pieces: 5,
        max_degree: 4,
        point_values: true,
        ..Default::default()
    };
    let constants = CorpusOptions {
        max_degree: 0,
        max_pieces: 8,
        ..poly
    };
    let mut checked = 0;
    for (dim, r) in [(1usize, 1.0), (2, 1.5)] {
        for (i, spec) in history_corpus(r, dim, 15, 21, &poly).iter().enumerate() {
            let p = if i % 2 == 0 { 2 } else { 4 };
            let cfg = HistoryConfig::new(r, p as f64, dim).unwrap();
            let got = seminorm(&spec.build(&cfg).unwrap(), &cfg, &q).unwrap();
            let want = closed_form_even(spec, p);
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "p={p}: {got} vs {want}");
            checked += 1;
        }
        for (i, spec) in history_corpus(r, dim, 10, 22, &constants).iter().enumerate() {
            let p = [1.0, 1.5, 3.0, 2.5, 7.0][i % 5];
            let cfg = HistoryConfig::new(r, p, dim).unwrap();
            let got = seminorm(&spec.build(&cfg).unwrap(), &cfg, &q).unwrap();
            let want = closed_form_constant(spec, p);
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "p={p}: {got} vs {want}");
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
}

#[test]
fn quotient_isometry() {
    let q = QuadratureConfig::default();
    let opts = CorpusOptions {
        point_values: true,
        ..Default::default()
    };
    for (i, spec) in history_corpus(1.0, 2, 50, 5, &opts).iter().enumerate() {
        let p = [1.0, 2.0, 3.5][i % 3];
        let cfg = HistoryConfig::new(1.0, p, 2).unwrap();
        let phi = spec.build(&cfg).unwrap();
        let pair = QuotientPair {
            ae_class: phi.rep().clone(),
            eta: vec![i as f64 - 25.0, 0.5],
        };
        let back = iso_to_quotient(&pair, &cfg).unwrap();
        let defect = (seminorm(&back, &cfg, &q).unwrap() - pair.norm(p, &q).unwrap()).abs();
        assert!(defect <= 1e-10, "isometry defect {defect}");
        let round = iso_to_quotient(&iso_from_quotient(&phi), &cfg).unwrap();
        assert_eq!(seminorm(&round.sub(&phi).unwrap(), &cfg, &q).unwrap(), 0.0);
    }
}

#[test]
fn prolongation_bound() {
    let q = QuadratureConfig::default();
    for (i, spec) in history_corpus(1.0, 1, 30, 8, &CorpusOptions::default())
        .iter()
        .enumerate()
    {
        let p = [1.0, 2.0, 1.5][i % 3];
        let cfg = HistoryConfig::new(1.0, p, 1).unwrap();
        let phi = spec.build(&cfg).unwrap();
        let s = seminorm(&phi, &cfg, &q).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let bar = bar_norm(&static_prolongation(&phi, t).unwrap(), p, &q).unwrap();
            assert!(bar <= (1.0 + t).powf(1.0 / p) * s + 1e-10, "T={t} p={p}: {bar} > {s}");
        }
    }
}

#[test]
fn regulation_bound_on_continuous_functions() {
    let q = QuadratureConfig::default();
    let opts = CorpusOptions {
        continuous: true,
        max_pieces: 6,
        max_degree: 5,
        ..Default::default()
    };
    for (i, spec) in history_corpus(2.5, 2, 30, 4, &opts).iter().enumerate() {
        let p = [1.0, 2.0, 4.0][i % 3];
        let x = spec.to_function().unwrap();
        let (a, b) = x.domain();
        let bar = bar_norm(&x, p, &q).unwrap();
        let bound = (b - a + 1.0).powf(1.0 / p) * x.sup_norm(&q);
        assert!(bar <= bound + 1e-8, "{bar} > {bound}");
    }
}

#[test]
fn segments_of_continuous_trajectories_converge() {
    let q = QuadratureConfig::default();
    let cfg = HistoryConfig::new(1.0, 2.0, 1).unwrap();
    let smooth = CorpusOptions {
        continuous: true,
        amplitude: 0.25,
        ..Default::default()
    };
    let cases = [
        (history_corpus(1.0, 1, 4, 30, &smooth), 0.0),
        (
            history_corpus(
                1.0,
                1,
                4,
                31,
                &CorpusOptions {
                    amplitude: 0.25,
                    ..Default::default()
                },
            ),
            1.25,
        ),
    ];
    for (corpus, t0) in cases {
        for spec in corpus {
            let pb = Problem::new(
                cfg,
                Nonlinearity::scalar_linear(1, -0.5).unwrap(),
                1.0,
                spec.build(&cfg).unwrap(),
            )
            .unwrap();
            let traj = solve(&pb, 3.0, &q).unwrap();
            let base = history_segment(&traj.x, t0).unwrap();
            let gaps: Vec<f64> = (1..=20)
                .map(|k| {
                    let seg = history_segment(&traj.x, t0 + 0.5f64.powi(k)).unwrap();
                    seminorm(&seg.sub(&base).unwrap(), &cfg, &q).unwrap()
                })
                .collect();
            assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
            assert!(gaps[19] < 1e-6, "t0={t0}: {}", gaps[19]);
        }
    }
}

#[test]
fn null_set_edits_keep_the_seminorm() {
    let q = QuadratureConfig::default();
    for (i, spec) in history_corpus(1.0, 2, 20, 2, &CorpusOptions::default())
        .iter()
        .enumerate()
    {
        let cfg = HistoryConfig::new(1.0, [1.0, 2.0, 2.5][i % 3], 2).unwrap();
        let phi = spec.build(&cfg).unwrap();
        let edited = phi
            .with_point_value(-0.3, vec![1e3, -1e3])
            .unwrap()
            .with_point_value(-1.0, vec![7.0, 7.0])
            .unwrap()
            .with_point_value(spec.breaks[spec.breaks.len() - 2].min(-0.5), vec![-4.0, 2.0])
            .unwrap();
        assert_eq!(seminorm(&phi, &cfg, &q).unwrap(), seminorm(&edited, &cfg, &q).unwrap());
        assert_eq!(seminorm(&edited.sub(&phi).unwrap(), &cfg, &q).unwrap(), 0.0);
    }
}
