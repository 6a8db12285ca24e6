use lpdde::corpus::{history_corpus, CorpusOptions};
use lpdde::derivops::{
    a_boundedness, apply_a, apply_b, b_continuity, b_norm_upper_bound, estimate_b_norm, gateaux_defects,
    history_probes, remainder_schedule, DerivativeContext,
};
use lpdde::{Execution, HistoryConfig, HistoryElement, Nonlinearity, Problem, QuadratureConfig};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn opts() -> CorpusOptions {
    CorpusOptions {
        amplitude: 0.5,
        point_values: true,
        ..Default::default()
    }
}

fn maps(dim: usize) -> Vec<Nonlinearity> {
    let mut v = vec![
        Nonlinearity::quadratic(dim, 0.7).unwrap(),
        Nonlinearity::cubic(dim, -0.5).unwrap(),
        Nonlinearity::saturating(dim).unwrap(),
        Nonlinearity::scalar_linear(dim, -1.5).unwrap(),
    ];
    if dim == 1 {
        v.push(Nonlinearity::mackey_glass(2.0, 2).unwrap());
    } else {
        v.push(Nonlinearity::linear(vec![0.0, 1.0, -1.0, 0.5]).unwrap());
    }
    v
}

/// Contexts with `p = 3`, `R = 1`, over one- and two-dimensional corpora.
fn contexts() -> Vec<DerivativeContext> {
    let mut out = Vec::new();
    for dim in [1usize, 2] {
        let cfg = HistoryConfig::new(1.0, 3.0, dim).unwrap();
        for (i, spec) in history_corpus(1.0, dim, 10, 50 + dim as u64, &opts())
            .iter()
            .enumerate()
        {
            let nl = maps(dim)[i % 5].clone();
            let r = [1.0, 0.6][i % 2];
            let pb = Problem::new(cfg, nl, r, spec.build(&cfg).unwrap()).unwrap();
            out.push(DerivativeContext::new(pb, [r, 0.5 * r][(i / 2) % 2]).unwrap());
        }
    }
    out
}

fn directions(ctx: &DerivativeContext, seed: u64) -> Vec<HistoryElement> {
    let cfg = ctx.pb.cfg;
    history_corpus(1.0, cfg.dim, 3, seed, &opts())
        .iter()
        .map(|s| s.build(&cfg).unwrap())
        .collect()
}

#[test]
fn derivative_operators_are_linear() {
    for (i, ctx) in contexts().iter().enumerate() {
        let d = directions(ctx, i as u64);
        let (a, b) = (1.7, -0.4);
        let comb = d[0].linear_combination(a, &d[1], b).unwrap();
        for op in [apply_b, apply_a] {
            let lhs = op(ctx, &comb, &q()).unwrap();
            let rhs = op(ctx, &d[0], &q())
                .unwrap()
                .linear_combination(a, &op(ctx, &d[1], &q()).unwrap(), b)
                .unwrap();
            let gap = lhs.sub(&rhs).unwrap().sup_norm(&q());
            assert!(gap <= 1e-10, "{}: {gap:e}", ctx.pb.nl.name);
        }
    }
}

#[test]
fn holder_chain_bounds_b() {
    for (i, ctx) in contexts().iter().enumerate() {
        let bound = b_norm_upper_bound(ctx, &q()).unwrap();
        for chi in directions(ctx, 100 + i as u64) {
            let out = apply_b(ctx, &chi, &q()).unwrap().sup_norm(&q());
            let input = ctx.input_norm(chi.rep(), &q()).unwrap();
            assert!(
                out <= bound * input + 1e-8,
                "{}: {out} > {bound} * {input}",
                ctx.pb.nl.name
            );
        }
        let probes = history_probes(ctx, 16, i as u64, &q()).unwrap();
        let lower = estimate_b_norm(ctx, &probes, &q(), Execution::default()).unwrap();
        assert!(lower.lower_bound <= bound + 1e-8);
    }
}

#[test]
fn a_boundedness_with_the_b_norm_constant() {
    for (i, ctx) in contexts().iter().enumerate() {
        for chi in directions(ctx, 200 + i as u64) {
            for t in [0.0, 0.5 * ctx.horizon, ctx.horizon] {
                let check = a_boundedness(ctx, &chi, t, &q()).unwrap();
                assert!(check.general_excess() <= 1e-8, "{check:?}");
                // holds on this corpus; large Df breaks it (see the unit tests)
                assert!(check.unit_excess() <= 1e-8, "{check:?}");
            }
        }
    }
}

#[test]
fn remainder_schedules() {
    for (i, ctx) in contexts().iter().enumerate() {
        let chi0 = &directions(ctx, 300 + i as u64)[0];
        let sweep = remainder_schedule(ctx, chi0, 14, &q(), Execution::default()).unwrap();
        let name = &ctx.pb.nl.name;
        let c = sweep.c_table();
        assert!(c.verdict().passed(), "{name}: {:?}", c.ratios());
        assert!(sweep.quotient_table().verdict().passed(), "{name}");
        assert!(sweep.transfer_excess() <= 1e-8, "{name}: {}", sweep.transfer_excess());
        if ctx.pb.nl.lip_df.is_some() {
            assert_eq!(c.second_order_holds(), Some(true), "{name}");
        }
        if ctx.pb.nl.name == "linear" {
            assert!(c.remainders().iter().all(|&r| r <= 1e-10), "{name}");
        } else {
            let ratios = c.ratios();
            for k in 3..ratios.len() - 1 {
                if ratios[k] > 1e-12 {
                    assert!(ratios[k + 1] / ratios[k] <= 0.75, "{name} k={k}: {ratios:?}");
                }
            }
        }
    }
}

/// Defects decay like `h`. The absolute figure at `n = 12` is checked where
/// `Df` is globally Lipschitz, which bounds the defect by `lip(Df) h |chi|^2 / 2`.
#[test]
fn directional_quotients_converge_to_b() {
    for (i, ctx) in contexts().iter().enumerate() {
        let chi = &directions(ctx, 400 + i as u64)[1];
        let chi = chi.scale(0.5 / ctx.input_norm(chi.rep(), &q()).unwrap());
        let l2 = chi.rep().lp_norm(2.0, &q()).unwrap();
        let defects = gateaux_defects(ctx, &chi, 12, &q(), Execution::default()).unwrap();
        let name = &ctx.pb.nl.name;
        assert_eq!(defects[12].0, 0.5f64.powi(12));
        let tail: Vec<f64> = defects[6..].iter().map(|p| p.1).collect();
        if tail.iter().any(|&d| d > 1e-10) {
            for w in tail.windows(2) {
                assert!(w[1] <= 0.6 * w[0], "{name}: {tail:?}");
            }
        }
        if let Some(l) = ctx.pb.nl.lip_df {
            assert!(defects[12].1 <= 1e-4, "{name}: {:e}", defects[12].1);
            for &(h, d) in &defects {
                assert!(d <= 0.5 * l * h * l2 * l2 + 1e-10, "{name}: h={h} {d:e}");
            }
        }
    }
}

#[test]
fn b_continuity_respects_the_holder_bound() {
    for (i, ctx) in contexts().iter().enumerate() {
        let phi0 = &directions(ctx, 500 + i as u64)[2];
        let probes = history_probes(ctx, 8, i as u64, &q()).unwrap();
        let c = b_continuity(ctx, phi0, &probes, &q(), Execution::default()).unwrap();
        assert!(c.gap_lower_bound <= c.holder_bound + 1e-8, "{c:?}");
    }
}
