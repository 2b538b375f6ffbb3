//! Separable networked dynamics `dx_i/dt = F_i(x_i) + Σ_j A_ij P_i(x_i) Q_j(x_j)`.
//!
//! Two built-in systems share the self-dynamics `F_i(x) = -e_i x`:
//!
//! * SIS with direct infection: `P(x) = 1 - x`, `Q(x) = x^z`.
//! * Michaelis–Menten regulation: `P(x) = 1`, `Q(x) = x^z / (1 + x)`.
//!
//! `z ∈ {0, 1}` is a Bernoulli edge type with `P(z = 1) = p`; `0^0 = 1`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seeds;

/// Violations of the state domain up to this size are clamped silently.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sis,
    Mm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sis => "sis",
            ModelKind::Mm => "mm",
        })
    }
}

/// Closed interval of admissible node states. `hi` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDomain {
    pub lo: f64,
    pub hi: f64,
}

impl StateDomain {
    pub const UNIT: StateDomain = StateDomain { lo: 0.0, hi: 1.0 };
    pub const NONNEGATIVE: StateDomain = StateDomain {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

/// Per-node self-dynamic (recovery) rates.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRates {
    pub e: Vec<f64>,
    pub mu_e: f64,
}

impl NodeRates {
    /// Every node gets the same rate `e0`.
    pub fn uniform(n: usize, e0: f64) -> Self {
        NodeRates {
            e: vec![e0; n],
            mu_e: e0,
        }
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }
}

/// Rates drawn i.i.d. uniform on `[0, 2 mu_e]`.
pub fn sample_recovery_rates(n: usize, mu_e: f64, seed: u64) -> Result<NodeRates> {
    if !(mu_e.is_finite() && mu_e > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mean rate mu_e must be positive, got {mu_e}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = 2.0 * mu_e;
    let e = (0..n).map(|_| rng.random_range(0.0..=hi)).collect();
    Ok(NodeRates { e, mu_e })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTypeMode {
    /// One draw per edge, fixed for the whole run.
    #[default]
    Quenched,
    /// Redrawn every evaluation epoch from `(seed, epoch, edge)`.
    Annealed,
}

/// Bernoulli edge types, one per edge id (shared by both directions of an
/// undirected edge).
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTypeAssignment {
    pub p: f64,
    pub mode: EdgeTypeMode,
    pub seed: u64,
    z: Vec<u8>,
    n_edges: usize,
}

impl EdgeTypeAssignment {
    /// Every edge gets type `z` (quenched).
    pub fn homogeneous(n_edges: usize, z: bool) -> Self {
        EdgeTypeAssignment {
            p: if z { 1.0 } else { 0.0 },
            mode: EdgeTypeMode::Quenched,
            seed: 0,
            z: vec![z as u8; n_edges],
            n_edges,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Quenched types, or `None` in annealed mode.
    pub fn quenched(&self) -> Option<&[u8]> {
        match self.mode {
            EdgeTypeMode::Quenched => Some(&self.z),
            EdgeTypeMode::Annealed => None,
        }
    }

    /// Type of `edge` during `epoch`. The epoch is ignored when quenched.
    pub fn z(&self, edge: usize, epoch: u64) -> u8 {
        match self.mode {
            EdgeTypeMode::Quenched => self.z[edge],
            EdgeTypeMode::Annealed => annealed_draw(self.p, self.seed, epoch, edge),
        }
    }

    /// Number of quenched edges with `z = 1`.
    pub fn count_ones(&self) -> usize {
        self.z.iter().filter(|&&z| z == 1).count()
    }
}

fn annealed_draw(p: f64, seed: u64, epoch: u64, edge: usize) -> u8 {
    (seeds::unit_interval(seeds::derive(&[seed, epoch, edge as u64])) < p) as u8
}

pub fn assign_edge_types(
    g: &Graph,
    p: f64,
    seed: u64,
    mode: EdgeTypeMode,
) -> Result<EdgeTypeAssignment> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge-type probability must lie in [0, 1], got {p}"
        )));
    }
    let n_edges = g.edge_count();
    let z = match mode {
        EdgeTypeMode::Quenched => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // u < p keeps the z = 1 sets nested across p for a fixed seed
            (0..n_edges)
                .map(|_| (rng.random::<f64>() < p) as u8)
                .collect()
        }
        EdgeTypeMode::Annealed => Vec::new(),
    };
    Ok(EdgeTypeAssignment {
        p,
        mode,
        seed,
        z,
        n_edges,
    })
}

/// User-supplied separable dynamics.
pub trait SeparableDynamics: Send + Sync + fmt::Debug {
    /// `F_i(x)`; `rate` is the node's entry of [`NodeRates`].
    fn self_dynamics(&self, node: usize, rate: f64, x: f64) -> f64;
    /// `P_i(x)`.
    fn node_factor(&self, node: usize, x: f64) -> f64;
    /// `Q(x)` for an edge of type `z`.
    fn neighbor_factor(&self, z: u8, x: f64) -> f64;
    fn domain(&self) -> StateDomain;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sis;

#[derive(Clone, Copy, Debug, Default)]
pub struct MichaelisMenten;

impl SeparableDynamics for Sis {
    #[inline]
    fn self_dynamics(&self, _node: usize, rate: f64, x: f64) -> f64 {
        -rate * x
    }
    #[inline]
    fn node_factor(&self, _node: usize, x: f64) -> f64 {
        1.0 - x
    }
    #[inline]
    fn neighbor_factor(&self, z: u8, x: f64) -> f64 {
        if z == 1 {
            x
        } else {
            1.0
        }
    }
    fn domain(&self) -> StateDomain {
        StateDomain::UNIT
    }
}

impl SeparableDynamics for MichaelisMenten {
    #[inline]
    fn self_dynamics(&self, _node: usize, rate: f64, x: f64) -> f64 {
        -rate * x
    }
    #[inline]
    fn node_factor(&self, _node: usize, _x: f64) -> f64 {
        1.0
    }
    #[inline]
    fn neighbor_factor(&self, z: u8, x: f64) -> f64 {
        if z == 1 {
            x / (x + 1.0)
        } else {
            1.0 / (x + 1.0)
        }
    }
    fn domain(&self) -> StateDomain {
        StateDomain::NONNEGATIVE
    }
}

#[derive(Clone, Debug)]
pub enum Dynamics {
    Sis,
    Mm,
    Custom(Arc<dyn SeparableDynamics>),
}

impl Dynamics {
    pub fn kind(&self) -> Option<ModelKind> {
        match self {
            Dynamics::Sis => Some(ModelKind::Sis),
            Dynamics::Mm => Some(ModelKind::Mm),
            Dynamics::Custom(_) => None,
        }
    }

    fn as_dyn(&self) -> &dyn SeparableDynamics {
        match self {
            Dynamics::Sis => &Sis,
            Dynamics::Mm => &MichaelisMenten,
            Dynamics::Custom(d) => d.as_ref(),
        }
    }
}

impl From<ModelKind> for Dynamics {
    fn from(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Sis => Dynamics::Sis,
            ModelKind::Mm => Dynamics::Mm,
        }
    }
}

/// A separable system bound to a graph, rates and edge types. Immutable.
#[derive(Clone, Debug)]
pub struct SeparableModel {
    graph: Arc<Graph>,
    rates: NodeRates,
    types: EdgeTypeAssignment,
    dynamics: Dynamics,
    /// Quenched edge type of every incoming entry, aligned with the graph's
    /// incoming lists.
    incoming_z: Vec<u8>,
}

pub fn build_model(
    dynamics: impl Into<Dynamics>,
    graph: Arc<Graph>,
    rates: NodeRates,
    types: EdgeTypeAssignment,
) -> Result<SeparableModel> {
    if rates.len() != graph.n_nodes() {
        return Err(Error::Dimension {
            expected: graph.n_nodes(),
            got: rates.len(),
        });
    }
    if types.n_edges() != graph.edge_count() {
        return Err(Error::Dimension {
            expected: graph.edge_count(),
            got: types.n_edges(),
        });
    }
    let incoming_z = match types.quenched() {
        Some(z) => (0..graph.n_nodes())
            .flat_map(|i| graph.incoming(i).iter().map(|inc| z[inc.edge]))
            .collect(),
        None => Vec::new(),
    };
    Ok(SeparableModel {
        graph,
        rates,
        types,
        dynamics: dynamics.into(),
        incoming_z,
    })
}

impl SeparableModel {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rates(&self) -> &NodeRates {
        &self.rates
    }

    pub fn edge_types(&self) -> &EdgeTypeAssignment {
        &self.types
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn domain(&self) -> StateDomain {
        self.dynamics.as_dyn().domain()
    }

    pub fn is_annealed(&self) -> bool {
        self.types.mode == EdgeTypeMode::Annealed
    }

    /// `F_i(x)`.
    pub fn self_term(&self, node: usize, x: f64) -> f64 {
        self.dynamics
            .as_dyn()
            .self_dynamics(node, self.rates.e[node], x)
    }

    /// `P_i(x)`.
    pub fn node_factor(&self, node: usize, x: f64) -> f64 {
        self.dynamics.as_dyn().node_factor(node, x)
    }

    /// `Q(x)` through the given edge id during `epoch`.
    pub fn neighbor_factor(&self, edge: usize, x: f64, epoch: u64) -> f64 {
        self.dynamics
            .as_dyn()
            .neighbor_factor(self.types.z(edge, epoch), x)
    }

    /// Checked right-hand side. Components outside the state domain by more
    /// than [`DOMAIN_TOL`] are rejected; smaller violations are clamped.
    pub fn eval_rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval_rhs_epoch(x, 0)
    }

    /// As [`eval_rhs`](Self::eval_rhs) with an explicit annealing epoch.
    pub fn eval_rhs_epoch(&self, x: &[f64], epoch: u64) -> Result<Vec<f64>> {
        let x = self.checked_state(x)?;
        let mut out = vec![0.0; x.len()];
        self.rhs_into(&x, &mut out, epoch);
        Ok(out)
    }

    /// Validate a state vector, returning the clamped copy.
    pub fn checked_state(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_nodes();
        if x.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: x.len(),
            });
        }
        let dom = self.domain();
        x.iter()
            .enumerate()
            .map(|(index, &value)| {
                if value.is_finite() && dom.contains(value, DOMAIN_TOL) {
                    Ok(dom.clamp(value))
                } else {
                    Err(Error::Domain { index, value })
                }
            })
            .collect()
    }

    /// Unchecked right-hand side written into `out`.
    pub(crate) fn rhs_into(&self, x: &[f64], out: &mut [f64], epoch: u64) {
        match &self.dynamics {
            Dynamics::Sis => self.rhs_with(&Sis, x, out, epoch),
            Dynamics::Mm => self.rhs_with(&MichaelisMenten, x, out, epoch),
            Dynamics::Custom(d) => self.rhs_with(d.as_ref(), x, out, epoch),
        }
    }

    fn rhs_with<D: SeparableDynamics + ?Sized>(
        &self,
        d: &D,
        x: &[f64],
        out: &mut [f64],
        epoch: u64,
    ) {
        let g = &*self.graph;
        let quenched = !self.is_annealed();
        let mut k = 0;
        for i in 0..g.n_nodes() {
            let xi = x[i];
            let f = d.self_dynamics(i, self.rates.e[i], xi);
            let p = d.node_factor(i, xi);
            let mut acc = 0.0;
            for inc in g.incoming(i) {
                let z = if quenched {
                    self.incoming_z[k]
                } else {
                    self.types.z(inc.edge, epoch)
                };
                acc += inc.weight * p * d.neighbor_factor(z, x[inc.source]);
                k += 1;
            }
            out[i] = f + acc;
        }
    }
}
