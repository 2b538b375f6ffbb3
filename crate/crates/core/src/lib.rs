//! Simulation and one-dimensional reduction of networked dynamical systems
//! with separable coupling, `dx_i/dt = F_i(x_i) + Σ_j A_ij P_i(x_i) Q_j(x_j)`.
//!
//! The full system is integrated to steady state and projected with the
//! out-strength weighted mean `ℒ`. The reduced system is a scalar equation
//! `O(x_eff) = F_eff + A_eff P_eff Q_eff` whose stable roots are compared
//! with the projected steady state.
//!
//! ```
//! use std::sync::Arc;
//! use netreduce::analyze::{find_fixed_points, match_branch, reduction_error};
//! use netreduce::graph::gen_er;
//! use netreduce::models::{assign_edge_types, build_model, sample_recovery_rates, EdgeTypeMode, ModelKind};
//! use netreduce::reduce::{build_effective_system, effective_params, ReductionMode};
//! use netreduce::simulate::{initial_state, integrate_to_steady, InitRegime, IntegratorOptions};
//!
//! let g = Arc::new(gen_er(80, 0.3, 1)?);
//! let rates = sample_recovery_rates(80, 5.0, 2)?;
//! let types = assign_edge_types(&g, 0.5, 3, EdgeTypeMode::Quenched)?;
//! let model = build_model(ModelKind::Sis, Arc::clone(&g), rates.clone(), types)?;
//!
//! let ss = integrate_to_steady(&model, &initial_state(80, InitRegime::High, 4), &IntegratorOptions::default())?;
//! let params = effective_params(&g, &rates, 0.5, Some(ModelKind::Sis))?;
//! let sys = build_effective_system(params, ReductionMode::Paper, None)?;
//! let roots = find_fixed_points(&sys, sys.domain(), 1024)?;
//! let ana = match_branch(ss.x_eff_num, &roots)?.point.x_star;
//! assert!(reduction_error(ss.x_eff_num, ana).value < 0.5);
//! # Ok::<(), netreduce::Error>(())
//! ```

pub mod analyze;
pub mod cli;
pub mod config;
pub mod error;
pub mod graph;
pub mod models;
pub mod reduce;
pub mod seeds;
pub mod simulate;

pub use error::{Error, Result};
