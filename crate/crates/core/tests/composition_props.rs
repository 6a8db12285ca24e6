use lpdde::composition::{
    apply_composition, apply_derivative, continuity_probe, derivative_continuity_probe, domain_probes,
    exponent_identity, geometric_schedule, probe_derivative_norm, smoothness_probe, CompositionContext, MeasureDomain,
};
use lpdde::corpus::{history_corpus, CorpusOptions};
use lpdde::{Execution, Nonlinearity, PiecewiseFunction, QuadratureConfig};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn corpus(dim: usize, count: usize, seed: u64) -> Vec<PiecewiseFunction> {
    let opts = CorpusOptions {
        max_pieces: 6,
        point_values: true,
        ..Default::default()
    };
    history_corpus(1.0, dim, count, seed, &opts)
        .iter()
        .map(|s| s.to_function().unwrap())
        .collect()
}

fn domain() -> MeasureDomain {
    MeasureDomain::new(-1.0, 0.0).unwrap()
}

fn maps(dim: usize) -> Vec<Nonlinearity> {
    let mut v = vec![
        Nonlinearity::cubic(dim, 1.5).unwrap(),
        Nonlinearity::quadratic(dim, -0.8).unwrap(),
        Nonlinearity::saturating(dim).unwrap(),
        Nonlinearity::scalar_linear(dim, 2.0).unwrap(),
    ];
    if dim == 1 {
        v.push(Nonlinearity::mackey_glass(2.0, 3).unwrap());
    }
    v
}

#[test]
fn growth_bound_on_the_image() {
    for dim in [1usize, 2] {
        for (i, g) in corpus(dim, 24, 60 + dim as u64).iter().enumerate() {
            let nl = maps(dim)[i % maps(dim).len()].clone();
            for qe in [1.0, 1.5, 2.0, 3.0] {
                let ctx = CompositionContext::continuity(nl.clone(), qe, domain()).unwrap();
                let img = apply_composition(&ctx, g, &q()).unwrap();
                assert!(
                    img.integral_q <= img.growth_bound + 1e-8,
                    "{} q={qe}: {} > {}",
                    nl.name,
                    img.integral_q,
                    img.growth_bound
                );
                assert!((img.norm_q.powf(qe) - img.integral_q).abs() <= 1e-10 * img.integral_q.max(1.0));
            }
        }
    }
}

#[test]
fn composition_is_continuous_along_schedules() {
    for dim in [1usize, 2] {
        let gs = corpus(dim, 10, 70);
        let ds = corpus(dim, 10, 71);
        for (i, (g, d)) in gs.iter().zip(&ds).enumerate() {
            let nl = maps(dim)[i % maps(dim).len()].clone();
            let ctx = CompositionContext::continuity(nl.clone(), 2.0, domain()).unwrap();
            let schedule = geometric_schedule(g, d, 16).unwrap();
            let table = continuity_probe(&ctx, g, &schedule, &q(), Execution::default()).unwrap();
            assert!(table.verdict().passed(), "{}: {:?}", nl.name, table.verdict());
            if let Some(ok) = table.lipschitz_holds(1e-8) {
                assert!(ok, "{}", nl.name);
            }
        }
    }
}

#[test]
fn derivative_is_linear_and_holder_bounded() {
    for dim in [1usize, 2] {
        let gs = corpus(dim, 10, 80);
        let hs = corpus(dim, 20, 81);
        for (i, g) in gs.iter().enumerate() {
            let nl = maps(dim)[i % maps(dim).len()].clone();
            let ctx = CompositionContext::smoothness(nl.clone(), 1.5, domain()).unwrap();
            let (h1, h2) = (&hs[2 * i], &hs[2 * i + 1]);
            let comb = h1.linear_combination(-2.0, h2, 0.3).unwrap();
            let lhs = ctx.derivative_image(g, &comb).unwrap();
            let a = apply_derivative(&ctx, g, h1, &q()).unwrap();
            let b = apply_derivative(&ctx, g, h2, &q()).unwrap();
            for t in [-1.0, -0.77, -0.5, -0.123, 0.0] {
                let want: Vec<f64> = a
                    .image
                    .evaluate(t)
                    .unwrap()
                    .iter()
                    .zip(b.image.evaluate(t).unwrap())
                    .map(|(x, y)| -2.0 * x + 0.3 * y)
                    .collect();
                for (x, y) in lhs.evaluate(t).unwrap().iter().zip(&want) {
                    assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()), "{}", nl.name);
                }
            }
            assert!(a.norm_q <= a.operator_bound * a.input_norm + 1e-8);
            let probes = domain_probes(&ctx, 12, i as u64, &q()).unwrap();
            let probed = probe_derivative_norm(&ctx, g, &probes, &q(), Execution::default()).unwrap();
            assert!(probed.lower_bound <= a.operator_bound + 1e-8, "{}", nl.name);
        }
    }
}

#[test]
fn remainders_vanish_faster_than_the_perturbation() {
    for dim in [1usize, 2] {
        let gs = corpus(dim, 10, 90);
        let hs = corpus(dim, 10, 91);
        for (i, (g, h)) in gs.iter().zip(&hs).enumerate() {
            let nl = maps(dim)[i % maps(dim).len()].clone();
            let ctx = CompositionContext::smoothness(nl.clone(), 2.0, domain()).unwrap();
            let table = smoothness_probe(&ctx, g, h, 16, &q(), Execution::default()).unwrap();
            assert!(table.verdict().passed(), "{}: {:?}", nl.name, table.ratios());
            if nl.lip_df.is_some() {
                assert_eq!(table.second_order_holds(), Some(true), "{}", nl.name);
            }
            if nl.name == "linear" {
                assert!(table.remainders().iter().all(|&r| r <= 1e-10));
            }
        }
    }
}

#[test]
fn derivative_gap_is_bounded() {
    let gs = corpus(1, 10, 100);
    let g0s = corpus(1, 10, 101);
    for (i, (g, g0)) in gs.iter().zip(&g0s).enumerate() {
        let nl = maps(1)[i % 5].clone();
        let ctx = CompositionContext::smoothness(nl.clone(), 1.5, domain()).unwrap();
        let probes = domain_probes(&ctx, 8, i as u64, &q()).unwrap();
        let gap = derivative_continuity_probe(&ctx, g, g0, &probes, &q(), Execution::default()).unwrap();
        assert!(gap.probed_gap <= gap.bound + 1e-8, "{}: {gap:?}", nl.name);
        let near = g.linear_combination(1.0, &g0.sub(g).unwrap(), 1e-6).unwrap();
        let small = derivative_continuity_probe(&ctx, g, &near, &probes, &q(), Execution::default()).unwrap();
        assert!(small.bound <= 1e-4 * gap.bound.max(1e-3), "{}: {small:?}", nl.name);
    }
}

#[test]
fn exponent_bookkeeping_is_exact() {
    for alpha in 1..=12 {
        let e = exponent_identity(alpha).unwrap();
        assert!(e.holds);
        assert_eq!(e.alpha_q, num_rational::Ratio::from_integer(alpha + 1));
        assert_eq!(e.conjugate_sum, num_rational::Ratio::from_integer(1));
    }
}
