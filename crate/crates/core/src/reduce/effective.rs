use serde::{Deserialize, Serialize};

use super::chebyshev::{chebyshev_fit_values, chebyshev_nodes, PolyApprox};
use super::{l_operator, reduce_subfunctions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::{ModelKind, NodeRates, SeparableModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    /// `-e x + A (1 - x) x^p` (SIS) and `-e x + A x^p / (1 + x)` (MM).
    #[default]
    Paper,
    /// `x^p` replaced by the edge-type expectation `p x + (1 - p)`.
    Mixture,
    /// `F_eff + A_eff P_eff Q_eff` with fitted polynomial factors.
    Polynomial,
}

impl std::str::FromStr for ReductionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ReductionMode::Paper),
            "mixture" => Ok(ReductionMode::Mixture),
            "polynomial" => Ok(ReductionMode::Polynomial),
            other => Err(Error::InvalidParameter(format!(
                "unknown reduction mode {other:?} (expected paper, mixture or polynomial)"
            ))),
        }
    }
}

impl ReductionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionMode::Paper => "paper",
            ReductionMode::Mixture => "mixture",
            ReductionMode::Polynomial => "polynomial",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams {
    pub e_eff: f64,
    pub a_eff: f64,
    pub p: f64,
    /// `None` for custom dynamics, which only support the polynomial mode.
    pub kind: Option<ModelKind>,
}

/// `e_eff = ℒ(e)` and `A_eff = ℒ(s_in)`.
pub fn effective_params(
    g: &Graph,
    rates: &NodeRates,
    p: f64,
    kind: Option<ModelKind>,
) -> Result<EffectiveParams> {
    let d = g.degrees();
    let e_eff = l_operator(&d.s_out, &rates.e)?;
    let a_eff = l_operator(&d.s_out, &d.s_in)?;
    Ok(EffectiveParams {
        e_eff,
        a_eff,
        p,
        kind,
    })
}

/// Polynomial approximations of `F_eff`, `P_eff` and `Q_eff`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubfunctionSet {
    pub f_eff: PolyApprox,
    pub p_eff: PolyApprox,
    pub q_eff: PolyApprox,
}

/// Default fit interval: `[0, 1]` for SIS, `[0, max(2 A_eff / e_eff, 1)]` for MM.
pub fn default_poly_domain(kind: Option<ModelKind>, params: &EffectiveParams) -> (f64, f64) {
    match kind {
        Some(ModelKind::Sis) => (0.0, 1.0),
        _ => (0.0, (2.0 * params.a_eff / params.e_eff).max(1.0)),
    }
}

/// Fit `F_i`, `P_i` and the out-weight averaged neighbor factor of every node
/// with `m` Chebyshev terms on `[lo, hi]`, then reduce each coefficient
/// column with `ℒ`.
pub fn fit_subfunctions(
    model: &SeparableModel,
    m: usize,
    lo: f64,
    hi: f64,
) -> Result<SubfunctionSet> {
    let g = model.graph();
    let n = g.n_nodes();
    let s_out = g.degrees().s_out;
    let nodes = chebyshev_nodes(lo, hi, m);

    let mut f_rows = Vec::with_capacity(n);
    let mut p_rows = Vec::with_capacity(n);
    for i in 0..n {
        let fv: Vec<f64> = nodes.iter().map(|&x| model.self_term(i, x)).collect();
        let pv: Vec<f64> = nodes.iter().map(|&x| model.node_factor(i, x)).collect();
        f_rows.push(chebyshev_fit_values(&fv, lo, hi)?.coeffs);
        p_rows.push(chebyshev_fit_values(&pv, lo, hi)?.coeffs);
    }

    // Q_j(x) = Σ_i A_ij Q(edge ij, x) / s_out[j]
    let mut q_values = vec![vec![0.0; m]; n];
    for e in g.edges() {
        for (k, &x) in nodes.iter().enumerate() {
            q_values[e.src][k] += e.weight * model.neighbor_factor(e.id, x, 0);
        }
    }
    let mut q_rows = Vec::with_capacity(n);
    for (j, mut values) in q_values.into_iter().enumerate() {
        if s_out[j] > 0.0 {
            values.iter_mut().for_each(|v| *v /= s_out[j]);
            q_rows.push(chebyshev_fit_values(&values, lo, hi)?.coeffs);
        } else {
            // carries zero weight under ℒ
            q_rows.push(vec![0.0; m]);
        }
    }

    let reduce = |rows: &[Vec<f64>]| -> Result<PolyApprox> {
        Ok(PolyApprox {
            coeffs: reduce_subfunctions(rows, &s_out)?,
            lo,
            hi,
        })
    };
    Ok(SubfunctionSet {
        f_eff: reduce(&f_rows)?,
        p_eff: reduce(&p_rows)?,
        q_eff: reduce(&q_rows)?,
    })
}

/// Scalar effective right-hand side `O(x_eff)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveSystem {
    pub mode: ReductionMode,
    pub params: EffectiveParams,
    pub polys: Option<SubfunctionSet>,
}

pub fn build_effective_system(
    params: EffectiveParams,
    mode: ReductionMode,
    polys: Option<SubfunctionSet>,
) -> Result<EffectiveSystem> {
    match mode {
        ReductionMode::Polynomial if polys.is_none() => Err(Error::InvalidParameter(
            "polynomial reduction needs fitted subfunctions".into(),
        )),
        ReductionMode::Paper | ReductionMode::Mixture if params.kind.is_none() => {
            Err(Error::InvalidParameter(
                "closed-form reductions exist only for the built-in models".into(),
            ))
        }
        _ => Ok(EffectiveSystem {
            mode,
            params,
            polys,
        }),
    }
}

/// `x^p` with `0^0 = 1` and `0^p = 0` for `p > 0`.
fn pow_p(x: f64, p: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain { index: 0, value: x });
    }
    Ok(if p == 1.0 {
        x
    } else if p == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        (p * x.ln()).exp()
    })
}

impl EffectiveSystem {
    pub fn eval(&self, x: f64) -> Result<f64> {
        let EffectiveParams {
            e_eff: e,
            a_eff: a,
            p,
            kind,
        } = self.params;
        let q = match self.mode {
            ReductionMode::Paper => pow_p(x, p)?,
            ReductionMode::Mixture => p * x + (1.0 - p),
            ReductionMode::Polynomial => {
                let s = self.polys.as_ref().expect("checked at construction");
                return Ok(s.f_eff.eval(x) + a * s.p_eff.eval(x) * s.q_eff.eval(x));
            }
        };
        Ok(match kind.expect("checked at construction") {
            ModelKind::Sis => -e * x + a * (1.0 - x) * q,
            ModelKind::Mm => -e * x + a * q / (1.0 + x),
        })
    }

    /// Interval on which fixed points are searched.
    pub fn domain(&self) -> (f64, f64) {
        match (&self.polys, self.mode) {
            (Some(s), ReductionMode::Polynomial) => (s.q_eff.lo, s.q_eff.hi),
            _ => default_poly_domain(self.params.kind, &self.params),
        }
    }
}
