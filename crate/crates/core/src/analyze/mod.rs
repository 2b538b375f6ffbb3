//! Fixed points of the effective equation, reduction error, and the
//! parameter sweep that compares both against full simulations.

mod fixed_points;
mod stats;
mod sweep;

pub use fixed_points::{
    find_fixed_points, match_branch, reduction_error, BranchMatch, FixedPoint, ReductionError,
    ERR_FLOOR,
};
pub use stats::{error_stats, group_stats, quantile_sorted, ErrorSummary, StatsRow};
pub use sweep::{
    build_network, read_rows_csv, run_cell, run_sweep, write_rows_csv, write_stats_csv,
    CellRequest, SweepOutcome, SweepRow,
};
