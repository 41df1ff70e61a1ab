use std::time::Instant;

use efg_cyclic::blocks::BlockStrategy;
use efg_cyclic::games::{generate, GameInstance};
use efg_cyclic::regularizer::{DilatedRegularizer, LocalKind};
use efg_cyclic::solvers::ecyclic::{BlockPlan, Ecyclic, EcyclicState, ProxAnchor};
use efg_cyclic::solvers::gap::duality_gap;
use efg_cyclic::solvers::sweep::sweep;
use efg_cyclic::solvers::{
    restart_wrapper, run_solver, Algorithm, Averaging, Checkpoint, Init, RunConfig,
};

fn gap_at(cps: &[Checkpoint], grads: u64) -> f64 {
    cps.iter()
        .find(|c| c.grad_computations == grads)
        .unwrap()
        .duality_gap
}

fn bound_holds(g: &GameInstance, kind: LocalKind, budget: u64) -> f64 {
    let rx = DilatedRegularizer::new(kind, &g.treeplex_x);
    let ry = DilatedRegularizer::new(kind, &g.treeplex_y);
    let d = rx.divergence_bound_uniform(&g.treeplex_x) + ry.divergence_bound_uniform(&g.treeplex_y);
    let mut worst = 0.0f64;
    for s in BlockStrategy::ALL {
        let cfg = RunConfig {
            regularizer: kind,
            blocks: s,
            budget,
            cadence: Some(10),
            ..RunConfig::default()
        };
        let trace = run_solver(g, &cfg).unwrap();
        let eta = trace.step.unwrap().eta;
        for c in &trace.checkpoints {
            let bound = d / ((c.grad_computations / 2) as f64 * eta);
            assert!(
                c.duality_gap <= bound,
                "{s:?} {kind:?} at {}: {} > {bound}",
                c.grad_computations,
                c.duality_gap
            );
            worst = worst.max(c.duality_gap / bound);
        }
    }
    worst
}

#[test]
fn convergence_bound_on_kuhn_and_leduc3() {
    let kuhn = generate("kuhn").unwrap();
    let leduc = generate("leduc3").unwrap();
    for kind in [LocalKind::Entropy, LocalKind::Euclidean] {
        assert!(bound_holds(&kuhn, kind, 4000) <= 1.0);
        assert!(bound_holds(&leduc, kind, 1000) <= 1.0);
    }
}

#[test]
fn gap_shrinks_with_budget() {
    let g = generate("kuhn").unwrap();
    let trace = run_solver(
        &g,
        &RunConfig {
            budget: 10_000,
            ..RunConfig::default()
        },
    )
    .unwrap();
    for b in [400, 1000, 2000, 5000] {
        let (a, c) = (
            gap_at(&trace.checkpoints, b),
            gap_at(&trace.checkpoints, 2 * b),
        );
        assert!(c <= 0.75 * a, "gap {a} at {b}, {c} at {}", 2 * b);
    }
}

#[test]
fn budget_fixes_iteration_counts() {
    let g = generate("kuhn").unwrap();
    for (algorithm, iters) in [
        (Algorithm::ECyclicPda, 5000),
        (Algorithm::MirrorProx, 2500),
        (Algorithm::CfrPlus, 5000),
        (Algorithm::PcfrPlus, 5000),
    ] {
        let trace = run_solver(
            &g,
            &RunConfig {
                algorithm,
                budget: 10_000,
                ..RunConfig::default()
            },
        )
        .unwrap();
        assert_eq!(trace.iterations, iters, "{algorithm}");
        assert_eq!(trace.grad_computations, 10_000);
        assert_eq!(trace.checkpoints.len(), 1000);
        assert_eq!(trace.checkpoints.last().unwrap().grad_computations, 10_000);
    }
}

#[test]
fn runs_are_deterministic() {
    let g = generate("leduc2").unwrap();
    for algorithm in Algorithm::ALL {
        let cfg = RunConfig {
            algorithm,
            budget: 2000,
            init: Init::Random(42),
            blocks: BlockStrategy::Children,
            ..RunConfig::default()
        };
        let a = run_solver(&g, &cfg).unwrap();
        let b = run_solver(&g, &cfg).unwrap();
        assert_eq!(a.x_average, b.x_average);
        assert_eq!(a.y_average, b.y_average);
        let strip = |t: &[Checkpoint]| {
            t.iter()
                .map(|c| (c.grad_computations, c.duality_gap.to_bits(), c.restarted))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a.checkpoints), strip(&b.checkpoints));
    }
}

#[test]
fn averages_match_reported_gap() {
    let g = generate("leduc2").unwrap();
    for algorithm in Algorithm::ALL {
        let trace = run_solver(
            &g,
            &RunConfig {
                algorithm,
                budget: 1000,
                ..RunConfig::default()
            },
        )
        .unwrap();
        let gap = duality_gap(&g, &trace.x_average, &trace.y_average).unwrap();
        assert_eq!(gap, trace.final_gap(), "{algorithm}");
    }
}

#[test]
fn regret_methods_reach_small_gaps() {
    let g = generate("kuhn").unwrap();
    let cfr = run_solver(
        &g,
        &RunConfig {
            algorithm: Algorithm::CfrPlus,
            ..RunConfig::default()
        },
    )
    .unwrap();
    let pcfr = run_solver(
        &g,
        &RunConfig {
            algorithm: Algorithm::PcfrPlus,
            ..RunConfig::default()
        },
    )
    .unwrap();
    assert!(cfr.final_gap() < 1e-3, "{}", cfr.final_gap());
    assert!(pcfr.final_gap() < 1e-6, "{}", pcfr.final_gap());
}

#[test]
fn mirror_prox_converges_on_kuhn() {
    let g = generate("kuhn").unwrap();
    let trace = run_solver(
        &g,
        &RunConfig {
            algorithm: Algorithm::MirrorProx,
            multiplier_exp: 3,
            ..RunConfig::default()
        },
    )
    .unwrap();
    assert!(trace.final_gap() < 1e-2, "{}", trace.final_gap());
}

#[test]
fn restarts_on_pennies_with_cfr() {
    let g = generate("matching_pennies").unwrap();
    let cfg = RunConfig {
        algorithm: Algorithm::CfrPlus,
        budget: 4000,
        init: Init::Random(1),
        ..RunConfig::default()
    };
    let trace = restart_wrapper(&g, &cfg, 0.5).unwrap();
    let first_small = trace.checkpoints.iter().position(|c| c.duality_gap <= 1e-6);
    let first_restart = trace
        .checkpoints
        .iter()
        .position(|c| c.restarted)
        .expect("no restart");
    assert!(first_small.is_none_or(|i| first_restart <= i));
    assert!(trace.restarts >= 1);
    assert!(trace
        .checkpoints
        .windows(2)
        .all(|w| w[1].duality_gap <= w[0].duality_gap));
}

#[test]
fn no_restart_without_progress() {
    // A tiny step barely moves the averages, so the gap never halves.
    let g = generate("leduc3").unwrap();
    let cfg = RunConfig {
        budget: 100,
        multiplier_exp: -20,
        ..RunConfig::default()
    };
    let trace = restart_wrapper(&g, &cfg, 0.5).unwrap();
    assert_eq!(trace.restarts, 0);
    assert!(trace.checkpoints.iter().all(|c| !c.restarted));
}

#[test]
fn target_gap_stops_early() {
    let g = generate("kuhn").unwrap();
    let cfg = RunConfig {
        algorithm: Algorithm::PcfrPlus,
        target_gap: Some(1e-3),
        ..RunConfig::default()
    };
    let trace = run_solver(&g, &cfg).unwrap();
    assert!(trace.grad_computations < 10_000);
    assert!(trace.final_gap() <= 1e-3);
}

#[test]
fn averaging_override_changes_the_average() {
    let g = generate("kuhn").unwrap();
    let base = RunConfig {
        budget: 1000,
        ..RunConfig::default()
    };
    let uniform = run_solver(&g, &base).unwrap();
    let quad = run_solver(
        &g,
        &RunConfig {
            averaging: Some(Averaging::Quadratic),
            ..base
        },
    )
    .unwrap();
    assert_ne!(uniform.x_average, quad.x_average);
}

#[test]
fn sweep_marks_the_argmin() {
    let g = generate("matching_pennies").unwrap();
    let base = RunConfig {
        algorithm: Algorithm::MirrorProx,
        budget: 400,
        init: Init::Random(3),
        ..RunConfig::default()
    };
    let rows = sweep(&g, &base, 4, Some(2)).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows.iter().filter(|r| r.best).count(), 1);
    let best = rows.iter().find(|r| r.best).unwrap();
    assert!(best.final_gap <= rows[0].final_gap);
    assert_eq!(rows, sweep(&g, &base, 4, Some(1)).unwrap());
}

fn seconds_per_iteration(g: &GameInstance, s: BlockStrategy, iters: usize) -> f64 {
    let kind = LocalKind::Entropy;
    let solver = Ecyclic {
        reg_x: DilatedRegularizer::new(kind, &g.treeplex_x),
        reg_y: DilatedRegularizer::new(kind, &g.treeplex_y),
        plan: BlockPlan::from_strategy(g, s).unwrap(),
        anchor: ProxAnchor::default_for(kind),
    };
    let (x0, y0) = (
        g.treeplex_x.uniform_strategy(),
        g.treeplex_y.uniform_strategy(),
    );
    (0..3)
        .map(|_| {
            let mut st = EcyclicState::new(g, &x0, &y0, Averaging::Uniform).unwrap();
            let start = Instant::now();
            for _ in 0..iters {
                solver.step(&mut st, g, 0.1).unwrap();
            }
            start.elapsed().as_secs_f64() / iters as f64
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn per_infoset_blocks_cost_about_the_same() {
    let g = generate("leduc3").unwrap();
    let single = seconds_per_iteration(&g, BlockStrategy::Single, 300);
    let many = seconds_per_iteration(&g, BlockStrategy::Infosets, 300);
    assert!(
        many <= 2.0 * single,
        "infosets {many:e}s vs single {single:e}s per iteration"
    );
}
