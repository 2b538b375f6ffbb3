//! A sweep over the A_eff/e_eff ratio grid from an inline config, with
//! grouped error statistics.
//!
//!     cargo run --release --example parameter_sweep -- [jobs]

use netreduce::analyze::{group_stats, run_sweep};
use netreduce::config::parse_config;

const CONFIG: &str = r#"{
    "model": "sis",
    "network": {"kind": "er", "n": [60, 120], "c": 0.3},
    "mu_e": 1,
    "p": [0.25, 0.75],
    "weight_grid": {"ratio": {"lo": 0.5, "hi": 4, "points": 6}},
    "seeds": {"start": 0, "count": 4},
    "init": ["low", "high"],
    "integrator": {"t_max": 1000}
}"#;

fn main() -> netreduce::Result<()> {
    let jobs = std::env::args()
        .nth(1)
        .map_or(0, |s| s.parse().expect("jobs"));
    let cfg = parse_config(CONFIG)?;
    println!("{} rows expected", cfg.expected_rows());

    let out = run_sweep(&cfg, jobs)?;
    println!(
        "{} rows, {} not converged, {} failed",
        out.rows.len(),
        out.non_converged,
        out.errored
    );

    println!("\n   p    n   ratio  median err (low / high)");
    let mut ratios: Vec<f64> = out
        .rows
        .iter()
        .map(|r| (r.a_eff / r.e_eff * 1e6).round() / 1e6)
        .collect();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();
    for &ratio in &ratios {
        let subset: Vec<_> = out
            .rows
            .iter()
            .filter(|r| ((r.a_eff / r.e_eff * 1e6).round() / 1e6) == ratio)
            .cloned()
            .collect();
        for s in group_stats(&subset) {
            println!(
                "{:>4} {:>4} {ratio:>7.3}  {:.4} ({:.4} / {:.4})",
                s.p, s.n, s.median, s.median_low, s.median_high
            );
        }
    }
    Ok(())
}
