use std::sync::Arc;

use netreduce::analyze::find_fixed_points;
use netreduce::graph::{gen_er, ring_lattice, Graph};
use netreduce::models::{
    assign_edge_types, build_model, sample_recovery_rates, EdgeTypeAssignment, EdgeTypeMode,
    ModelKind, NodeRates, SeparableModel,
};
use netreduce::reduce::{
    build_effective_system, effective_params, l_operator, EffectiveParams, ReductionMode,
};
use netreduce::simulate::{integrate_to_steady, IntegratorOptions};
use proptest::prelude::*;

fn random_model(kind: ModelKind, n: usize, p: f64, seed: u64) -> SeparableModel {
    let g = Arc::new(gen_er(n, 0.3, seed).unwrap().scaled(0.7).unwrap());
    let rates = sample_recovery_rates(n, 1.0, seed ^ 1).unwrap();
    let types = assign_edge_types(&g, p, seed ^ 2, EdgeTypeMode::Quenched).unwrap();
    build_model(kind, g, rates, types).unwrap()
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Sis), Just(ModelKind::Mm)]
}

fn state(kind: ModelKind, n: usize) -> impl Strategy<Value = Vec<f64>> {
    let hi = if kind == ModelKind::Sis { 1.0 } else { 5.0 };
    prop::collection::vec(0.0..=hi, n)
}

fn s_out_and_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0.01f64..10.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_matches_factorized_reconstruction(
        (kind, x) in kind().prop_flat_map(|k| (Just(k), state(k, 25))),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let m = random_model(kind, 25, p, seed);
        let rhs = m.eval_rhs(&x).unwrap();
        let g = m.graph();
        for i in 0..25 {
            let pi = m.node_factor(i, x[i]);
            let mut acc = 0.0;
            for inc in g.incoming(i) {
                acc += inc.weight * pi * m.neighbor_factor(inc.edge, x[inc.source], 0);
            }
            prop_assert_eq!(rhs[i].to_bits(), (m.self_term(i, x[i]) + acc).to_bits());
        }
    }

    #[test]
    fn sis_boundary_never_points_outward(
        x in state(ModelKind::Sis, 30),
        boundary in prop::collection::vec(prop_oneof![Just(None), Just(Some(0.0)), Just(Some(1.0))], 30),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let x: Vec<f64> = x.iter().zip(&boundary).map(|(&v, b)| b.unwrap_or(v)).collect();
        let rhs = random_model(ModelKind::Sis, 30, p, seed).eval_rhs(&x).unwrap();
        for i in 0..30 {
            if x[i] == 0.0 {
                prop_assert!(rhs[i] >= 0.0);
            }
            if x[i] == 1.0 {
                prop_assert!(rhs[i] <= 0.0);
            }
        }
    }

    #[test]
    fn mm_zero_components_grow(
        x in state(ModelKind::Mm, 30),
        zeros in prop::collection::vec(any::<bool>(), 30),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let x: Vec<f64> = x.iter().zip(&zeros).map(|(&v, &z)| if z { 0.0 } else { v }).collect();
        let rhs = random_model(ModelKind::Mm, 30, p, seed).eval_rhs(&x).unwrap();
        for i in 0..30 {
            if x[i] == 0.0 {
                prop_assert!(rhs[i] >= 0.0);
            }
        }
    }

    #[test]
    fn quenched_types_are_reproducible(p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = gen_er(40, 0.2, 3).unwrap();
        let a = assign_edge_types(&g, p, seed, EdgeTypeMode::Quenched).unwrap();
        let b = assign_edge_types(&g, p, seed, EdgeTypeMode::Quenched).unwrap();
        prop_assert_eq!(a.quenched().unwrap(), b.quenched().unwrap());
        prop_assert!(a.quenched().unwrap().iter().all(|&z| z <= 1));
    }

    #[test]
    fn l_operator_is_linear((s, x, y) in s_out_and_pair(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mix: Vec<f64> = x.iter().zip(&y).map(|(&u, &v)| a * u + b * v).collect();
        let lhs = l_operator(&s, &mix).unwrap();
        let rhs = a * l_operator(&s, &x).unwrap() + b * l_operator(&s, &y).unwrap();
        let scale = 1.0 + a.abs() * 5.0 + b.abs() * 5.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn l_operator_constant_factor((s, x, _) in s_out_and_pair(), c in -4.0f64..4.0) {
        let cx: Vec<f64> = x.iter().map(|&v| c * v).collect();
        let lhs = l_operator(&s, &cx).unwrap();
        let rhs = c * l_operator(&s, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + 5.0 * c.abs()));
    }

    #[test]
    fn shared_polynomial_commutes_with_l(
        s in prop::collection::vec(0.01f64..10.0, 1..40),
        c in 0.0f64..2.0,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..6),
    ) {
        let q = |x: f64| coeffs.iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let x = vec![c; s.len()];
        let qx: Vec<f64> = x.iter().map(|&v| q(v)).collect();
        prop_assert_eq!(l_operator(&s, &qx).unwrap(), q(l_operator(&s, &x).unwrap()));
    }

    #[test]
    fn fixed_point_residuals(
        kind in kind(),
        e in 0.1f64..10.0,
        ratio in 0.1f64..6.0,
        p in 0.0f64..=1.0,
        mode in prop_oneof![Just(ReductionMode::Paper), Just(ReductionMode::Mixture)],
    ) {
        let params = EffectiveParams { e_eff: e, a_eff: ratio * e, p, kind: Some(kind) };
        let sys = build_effective_system(params, mode, None).unwrap();
        for fp in find_fixed_points(&sys, sys.domain(), 1024).unwrap() {
            prop_assert!(fp.residual <= 1e-10, "{:?}", fp);
            prop_assert!(sys.eval(fp.x_star).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn sis_p1_has_one_stable_root(e in 0.1f64..10.0, ratio in 1.05f64..20.0) {
        let a = ratio * e;
        let params = EffectiveParams { e_eff: e, a_eff: a, p: 1.0, kind: Some(ModelKind::Sis) };
        let sys = build_effective_system(params, ReductionMode::Paper, None).unwrap();
        let fps = find_fixed_points(&sys, sys.domain(), 1024).unwrap();
        let stable: Vec<_> = fps.iter().filter(|f| f.stable).collect();
        prop_assert_eq!(stable.len(), 1);
        prop_assert!((stable[0].x_star - (1.0 - e / a)).abs() <= 1e-10);
        prop_assert!(fps.iter().any(|f| !f.stable && f.x_star == 0.0));
    }

    #[test]
    fn weight_scaling_moves_a_only(w in 0.05f64..20.0, seed in any::<u64>()) {
        let g = gen_er(40, 0.3, seed).unwrap();
        let rates = sample_recovery_rates(40, 1.0, seed).unwrap();
        let base = effective_params(&g, &rates, 0.5, Some(ModelKind::Sis)).unwrap();
        let scaled = effective_params(&g.scaled(w).unwrap(), &rates, 0.5, Some(ModelKind::Sis)).unwrap();
        prop_assert!((scaled.a_eff - w * base.a_eff).abs() <= 1e-12 * w * base.a_eff);
        prop_assert!((scaled.e_eff - base.e_eff).abs() <= 1e-12 * base.e_eff);
    }

    #[test]
    fn paper_and_mixture_coincide_at_integer_p(
        kind in kind(),
        p in prop_oneof![Just(0.0), Just(1.0)],
        x in 0.0f64..1.0,
        e in 0.1f64..5.0,
        a in 0.1f64..5.0,
    ) {
        let params = EffectiveParams { e_eff: e, a_eff: a, p, kind: Some(kind) };
        let paper = build_effective_system(params, ReductionMode::Paper, None).unwrap();
        let mixture = build_effective_system(params, ReductionMode::Mixture, None).unwrap();
        prop_assert_eq!(paper.eval(x).unwrap().to_bits(), mixture.eval(x).unwrap().to_bits());
    }
}

fn ring_model(kind: ModelKind, z: bool, mult: f64) -> SeparableModel {
    let g: Graph = ring_lattice(16, 4).unwrap().scaled(mult).unwrap();
    let m = g.edge_count();
    build_model(
        kind,
        Arc::new(g),
        NodeRates::uniform(16, 1.0),
        EdgeTypeAssignment::homogeneous(m, z),
    )
    .unwrap()
}

#[test]
fn steady_state_does_not_depend_on_tolerance() {
    for (kind, z, mult) in [
        (ModelKind::Sis, true, 0.5),
        (ModelKind::Sis, false, 0.5),
        (ModelKind::Mm, true, 0.75),
        (ModelKind::Mm, false, 0.75),
    ] {
        let m = ring_model(kind, z, mult);
        let x0: Vec<f64> = (0..16).map(|i| 0.1 + 0.05 * (i % 5) as f64).collect();
        let opts = IntegratorOptions {
            t_max: Some(200.0),
            ..IntegratorOptions::default()
        };
        let tight = IntegratorOptions {
            rel_tol: opts.rel_tol / 2.0,
            ..opts
        };
        let a = integrate_to_steady(&m, &x0, &opts).unwrap();
        let b = integrate_to_steady(&m, &x0, &tight).unwrap();
        assert!(a.converged && b.converged);
        assert!(
            (a.x_eff_num - b.x_eff_num).abs() < 10.0 * opts.steady_residual,
            "{kind} z={z}: {} vs {}",
            a.x_eff_num,
            b.x_eff_num
        );
    }
}

#[test]
fn uniform_start_on_regular_graph_stays_uniform() {
    for (kind, z) in [
        (ModelKind::Sis, true),
        (ModelKind::Sis, false),
        (ModelKind::Mm, true),
        (ModelKind::Mm, false),
    ] {
        let m = ring_model(kind, z, 0.6);
        let ss = integrate_to_steady(&m, &[0.3; 16], &IntegratorOptions::default()).unwrap();
        let first = ss.x[0];
        assert!(
            ss.x.iter().all(|&v| (v - first).abs() <= 1e-9),
            "{kind} z={z}"
        );
    }
}
