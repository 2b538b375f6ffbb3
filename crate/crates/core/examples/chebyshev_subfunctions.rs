//! Fit the per-node subfunctions with Chebyshev interpolation, reduce them
//! with the projection operator, and print the effective polynomials.

use std::sync::Arc;

use netreduce::analyze::find_fixed_points;
use netreduce::graph::gen_er;
use netreduce::models::{
    assign_edge_types, build_model, sample_recovery_rates, EdgeTypeMode, ModelKind,
};
use netreduce::reduce::{
    build_effective_system, chebyshev_fit, default_poly_domain, effective_params, fit_subfunctions,
    ReductionMode,
};

fn main() -> netreduce::Result<()> {
    println!("max error of 1/(1+x) on [0, 1]:");
    for m in 2..=8 {
        let fit = chebyshev_fit(|x| 1.0 / (1.0 + x), 0.0, 1.0, m)?;
        let worst = (0..=1000)
            .map(|k| k as f64 / 1000.0)
            .map(|x| (fit.eval(x) - 1.0 / (1.0 + x)).abs())
            .fold(0.0, f64::max);
        println!("  m={m}  {worst:.3e}");
    }

    let n = 150;
    let g = Arc::new(gen_er(n, 0.3, 5)?);
    let rates = sample_recovery_rates(n, 8.0, 6)?;
    let p = 0.5;
    let types = assign_edge_types(&g, p, 7, EdgeTypeMode::Quenched)?;
    let model = build_model(ModelKind::Mm, Arc::clone(&g), rates.clone(), types)?;
    let params = effective_params(&g, &rates, p, Some(ModelKind::Mm))?;
    let (lo, hi) = default_poly_domain(params.kind, &params);
    let polys = fit_subfunctions(&model, 6, lo, hi)?;

    println!("\nMM on ER(150, 0.3), p = {p}, fit domain [{lo}, {hi:.3}]");
    for (name, poly) in [
        ("F_eff", &polys.f_eff),
        ("P_eff", &polys.p_eff),
        ("Q_eff", &polys.q_eff),
    ] {
        let terms: Vec<String> = poly.coeffs.iter().map(|c| format!("{c:+.4e}")).collect();
        println!("  {name}: [{}]", terms.join(", "));
    }
    let mut out = Vec::new();
    polys.q_eff.write_csv(&mut out)?;
    print!("\n{}", String::from_utf8_lossy(&out));

    for mode in [ReductionMode::Paper, ReductionMode::Mixture] {
        let sys = build_effective_system(params, mode, None)?;
        let roots: Vec<String> = find_fixed_points(&sys, sys.domain(), 1024)?
            .iter()
            .map(|f| {
                format!(
                    "{:.5}{}",
                    f.x_star,
                    if f.stable { "" } else { " (unstable)" }
                )
            })
            .collect();
        println!("{:<10} roots {}", mode.as_str(), roots.join(", "));
    }
    let sys = build_effective_system(params, ReductionMode::Polynomial, Some(polys))?;
    let roots: Vec<String> = find_fixed_points(&sys, sys.domain(), 1024)?
        .iter()
        .map(|f| {
            format!(
                "{:.5}{}",
                f.x_star,
                if f.stable { "" } else { " (unstable)" }
            )
        })
        .collect();
    println!("polynomial roots {}", roots.join(", "));
    Ok(())
}
