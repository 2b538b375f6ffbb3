//! One-dimensional reduction: the out-strength weighted projection `ℒ`,
//! effective parameters, polynomial subfunctions and the effective
//! right-hand side `O(x_eff)`.

mod chebyshev;
mod effective;

pub use chebyshev::{chebyshev_fit, chebyshev_fit_values, chebyshev_nodes, PolyApprox};
pub use effective::{
    build_effective_system, default_poly_domain, effective_params, fit_subfunctions,
    EffectiveParams, EffectiveSystem, ReductionMode, SubfunctionSet,
};

use crate::error::{Error, Result};

/// `ℒ(x) = Σ_j s_out[j] x[j] / Σ_j s_out[j]`.
///
/// Evaluated relative to `x[0]`, so a constant vector maps to exactly that
/// constant.
pub fn l_operator(s_out: &[f64], x: &[f64]) -> Result<f64> {
    if s_out.len() != x.len() {
        return Err(Error::Dimension {
            expected: s_out.len(),
            got: x.len(),
        });
    }
    let total: f64 = s_out.iter().sum();
    // also rejects NaN
    if total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateOperator);
    }
    let base = x[0];
    let shifted: f64 = s_out.iter().zip(x).map(|(&s, &v)| s * (v - base)).sum();
    Ok(base + shifted / total)
}

/// `B_eff[k] = ℒ(B^k)` for every column `k` of the per-node coefficient
/// matrix (one row per node).
pub fn reduce_subfunctions(rows: &[Vec<f64>], s_out: &[f64]) -> Result<Vec<f64>> {
    if rows.len() != s_out.len() {
        return Err(Error::Dimension {
            expected: s_out.len(),
            got: rows.len(),
        });
    }
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::Dimension {
            expected: m,
            got: bad.len(),
        });
    }
    let mut column = vec![0.0; rows.len()];
    (0..m)
        .map(|k| {
            for (c, row) in column.iter_mut().zip(rows) {
                *c = row[k];
            }
            l_operator(s_out, &column)
        })
        .collect()
}
