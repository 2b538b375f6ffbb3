//! Integrate the SIS system on an ER network from both initial regimes.

use std::sync::Arc;

use netreduce::graph::gen_er;
use netreduce::models::{
    assign_edge_types, build_model, sample_recovery_rates, EdgeTypeMode, ModelKind,
};
use netreduce::simulate::{initial_state, integrate_to_steady, InitRegime, IntegratorOptions};

fn main() -> netreduce::Result<()> {
    let n = 200;
    let g = Arc::new(gen_er(n, 0.5, 1)?);
    let rates = sample_recovery_rates(n, 100.0, 2)?;

    for p in [0.25, 0.5, 0.75] {
        let types = assign_edge_types(&g, p, 3, EdgeTypeMode::Quenched)?;
        let model = build_model(ModelKind::Sis, Arc::clone(&g), rates.clone(), types)?;
        for regime in InitRegime::BOTH {
            let x0 = initial_state(n, regime, 4);
            let ss = integrate_to_steady(&model, &x0, &IntegratorOptions::default())?;
            let mean = ss.x.iter().sum::<f64>() / n as f64;
            println!(
                "p={p:<4} {:<4} x_eff={:.6} mean={mean:.6} t={:.4} steps={} rejected={} converged={}",
                regime.as_str(),
                ss.x_eff_num,
                ss.t_final,
                ss.steps,
                ss.rejected,
                ss.converged
            );
        }
    }
    Ok(())
}
