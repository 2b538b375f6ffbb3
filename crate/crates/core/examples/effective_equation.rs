//! Build the effective one-dimensional equation for an SIS network, find its
//! fixed points, and compare the stable one against the full simulation.

use std::sync::Arc;

use netreduce::analyze::{find_fixed_points, match_branch, reduction_error};
use netreduce::graph::gen_er;
use netreduce::models::{
    assign_edge_types, build_model, sample_recovery_rates, EdgeTypeMode, ModelKind,
};
use netreduce::reduce::{build_effective_system, effective_params, ReductionMode};
use netreduce::simulate::{initial_state, integrate_to_steady, InitRegime, IntegratorOptions};

fn main() -> netreduce::Result<()> {
    let n = 300;
    let g = Arc::new(gen_er(n, 0.5, 11)?);
    let rates = sample_recovery_rates(n, 100.0, 12)?;

    println!("   p  mode      A_eff    e_eff     x_num     x_ana       err");
    for p in [0.25, 0.5, 0.75] {
        let types = assign_edge_types(&g, p, 13, EdgeTypeMode::Quenched)?;
        let model = build_model(ModelKind::Sis, Arc::clone(&g), rates.clone(), types)?;
        let ss = integrate_to_steady(
            &model,
            &initial_state(n, InitRegime::High, 14),
            &IntegratorOptions::default(),
        )?;

        let params = effective_params(&g, &rates, p, Some(ModelKind::Sis))?;
        for mode in [ReductionMode::Paper, ReductionMode::Mixture] {
            let sys = build_effective_system(params, mode, None)?;
            let fps = find_fixed_points(&sys, sys.domain(), 1024)?;
            let ana = match_branch(ss.x_eff_num, &fps)?.point.x_star;
            let err = reduction_error(ss.x_eff_num, ana);
            println!(
                "{p:>4}  {:<8} {:>7.2} {:>8.2} {:>9.5} {:>9.5} {:>9.5}",
                mode.as_str(),
                params.a_eff,
                params.e_eff,
                ss.x_eff_num,
                ana,
                err.value
            );
        }
    }
    Ok(())
}
