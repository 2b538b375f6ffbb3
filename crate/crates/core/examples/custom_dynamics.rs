//! Plug in a user-defined separable model and reduce it in polynomial mode.
//!
//! dx_i = -e_i x_i + Σ_j A_ij (1 - x_i) x_j² / (1 + x_j²)

use std::sync::Arc;

use netreduce::analyze::{find_fixed_points, match_branch, reduction_error};
use netreduce::graph::gen_er;
use netreduce::models::{
    build_model, sample_recovery_rates, Dynamics, EdgeTypeAssignment, SeparableDynamics,
    StateDomain,
};
use netreduce::reduce::{
    build_effective_system, effective_params, fit_subfunctions, ReductionMode,
};
use netreduce::simulate::{initial_state, integrate_to_steady, InitRegime, IntegratorOptions};

#[derive(Debug)]
struct HillContagion;

impl SeparableDynamics for HillContagion {
    fn self_dynamics(&self, _node: usize, rate: f64, x: f64) -> f64 {
        -rate * x
    }
    fn node_factor(&self, _node: usize, x: f64) -> f64 {
        1.0 - x
    }
    fn neighbor_factor(&self, _z: u8, x: f64) -> f64 {
        x * x / (1.0 + x * x)
    }
    fn domain(&self) -> StateDomain {
        StateDomain::UNIT
    }
}

fn main() -> netreduce::Result<()> {
    let n = 200;
    let g = Arc::new(gen_er(n, 0.1, 31)?.scaled(0.5)?);
    let rates = sample_recovery_rates(n, 1.0, 32)?;
    let types = EdgeTypeAssignment::homogeneous(g.edge_count(), true);
    let model = build_model(
        Dynamics::Custom(Arc::new(HillContagion)),
        Arc::clone(&g),
        rates.clone(),
        types,
    )?;

    let params = effective_params(&g, &rates, 1.0, None)?;
    println!("A_eff = {:.4}, e_eff = {:.4}", params.a_eff, params.e_eff);

    for m in [3, 6, 10] {
        let polys = fit_subfunctions(&model, m, 0.0, 1.0)?;
        let sys = build_effective_system(params, ReductionMode::Polynomial, Some(polys))?;
        let fps = find_fixed_points(&sys, sys.domain(), 2048)?;
        let roots: Vec<String> = fps
            .iter()
            .map(|f| format!("{:.5}{}", f.x_star, if f.stable { "s" } else { "u" }))
            .collect();
        // bistable: the low start dies out, the high start settles on the upper branch
        let ss = integrate_to_steady(
            &model,
            &initial_state(n, InitRegime::High, 33),
            &IntegratorOptions::default(),
        )?;
        let b = match_branch(ss.x_eff_num, &fps)?;
        println!(
            "m={m:<2} roots [{}]  x_num {:.5}  err {:.4}",
            roots.join(" "),
            ss.x_eff_num,
            reduction_error(ss.x_eff_num, b.point.x_star).value
        );
    }
    Ok(())
}
