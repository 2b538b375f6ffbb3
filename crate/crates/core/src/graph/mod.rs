//! Weighted networks: construction, synthetic generators, edge-list I/O and
//! degree statistics.
//!
//! An entry `A_ij` is the strength of the connection from node `j` to node
//! `i`, so the coupling sum of node `i` runs over its *incoming* edges.

mod edge_list;
mod generators;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use edge_list::{load_edge_list, load_edge_list_path, LoadReport};
pub use generators::{gen_ba, gen_er, gen_sw};

/// One stored directed entry. Undirected edges appear twice, once per
/// direction, with the same `id`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
    pub id: usize,
}

/// Incoming neighbor of a node, as seen from the receiving side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Incoming {
    pub source: usize,
    pub weight: f64,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n_nodes: usize,
    directed: bool,
    edges: Vec<Edge>,
    n_edge_ids: usize,
    offsets: Vec<usize>,
    incoming: Vec<Incoming>,
}

/// Weighted in- and out-strengths.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeVectors {
    pub s_in: Vec<f64>,
    pub s_out: Vec<f64>,
}

impl Graph {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of distinct edges (undirected edges counted once).
    pub fn edge_count(&self) -> usize {
        self.n_edge_ids
    }

    /// All stored directed entries, grouped by edge id in ascending order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// One entry per edge id, in the orientation the edge was first added.
    pub fn unique_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        let step = if self.directed { 1 } else { 2 };
        self.edges.iter().step_by(step)
    }

    pub fn incoming(&self, node: usize) -> &[Incoming] {
        &self.incoming[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Sum of all stored directed weights, i.e. `Σ_ij A_ij`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn degrees(&self) -> DegreeVectors {
        let mut s_in = vec![0.0; self.n_nodes];
        let mut s_out = vec![0.0; self.n_nodes];
        for e in &self.edges {
            s_in[e.dst] += e.weight;
            s_out[e.src] += e.weight;
        }
        DegreeVectors { s_in, s_out }
    }

    /// Unweighted degree (number of incoming entries) of each node.
    pub fn in_degree_counts(&self) -> Vec<usize> {
        (0..self.n_nodes).map(|i| self.incoming(i).len()).collect()
    }

    /// Same topology with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Graph> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight multiplier must be finite and nonnegative, got {factor}"
            )));
        }
        Ok(self.map_weights(|w| w * factor))
    }

    /// Same topology with every weight set to 1.
    pub fn binarized(&self) -> Graph {
        self.map_weights(|_| 1.0)
    }

    fn map_weights(&self, f: impl Fn(f64) -> f64) -> Graph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight = f(e.weight);
        }
        for inc in &mut g.incoming {
            inc.weight = f(inc.weight);
        }
        g
    }

    /// Pearson correlation between `s_out[src]` and `s_in[dst]` over all
    /// stored directed entries. Zero when either marginal is constant.
    pub fn degree_correlation(&self) -> Result<f64> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let d = self.degrees();
        let n = self.edges.len() as f64;
        let (mut mx, mut my) = (0.0, 0.0);
        for e in &self.edges {
            mx += d.s_out[e.src];
            my += d.s_in[e.dst];
        }
        mx /= n;
        my /= n;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for e in &self.edges {
            let dx = d.s_out[e.src] - mx;
            let dy = d.s_in[e.dst] - my;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        let scale = mx.abs().max(my.abs()).max(1.0);
        let tiny = 1e-24 * scale * scale * n;
        if sxx <= tiny || syy <= tiny {
            return Ok(0.0);
        }
        Ok(sxy / (sxx.sqrt() * syy.sqrt()))
    }

    /// Serialize as an edge list: a `%` header carrying the node count and
    /// directedness, then one `src dst weight` line per edge id.
    pub fn to_edge_list(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "% netreduce n_nodes={} directed={}",
            self.n_nodes, self.directed
        );
        for e in self.unique_edges() {
            let _ = writeln!(out, "{} {} {}", e.src, e.dst, e.weight);
        }
        out
    }
}

/// Accumulates edges, merging duplicate pairs by weight summation and
/// dropping self-loops.
#[derive(Debug)]
pub struct GraphBuilder {
    n_nodes: usize,
    directed: bool,
    index: HashMap<(usize, usize), usize>,
    pairs: Vec<(usize, usize, f64)>,
    self_loops: usize,
    merged: usize,
}

impl GraphBuilder {
    pub fn new(n_nodes: usize, directed: bool) -> Self {
        GraphBuilder {
            n_nodes,
            directed,
            index: HashMap::new(),
            pairs: Vec::new(),
            self_loops: 0,
            merged: 0,
        }
    }

    pub fn directed(n_nodes: usize) -> Self {
        Self::new(n_nodes, true)
    }

    pub fn undirected(n_nodes: usize) -> Self {
        Self::new(n_nodes, false)
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, weight: f64) -> Result<&mut Self> {
        if src >= self.n_nodes || dst >= self.n_nodes {
            return Err(Error::InvalidParameter(format!(
                "edge ({src}, {dst}) out of range for {} nodes",
                self.n_nodes
            )));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "edge ({src}, {dst}) has invalid weight {weight}"
            )));
        }
        if src == dst {
            self.self_loops += 1;
            return Ok(self);
        }
        let key = if self.directed {
            (src, dst)
        } else {
            (src.min(dst), src.max(dst))
        };
        match self.index.get(&key) {
            Some(&slot) => {
                self.pairs[slot].2 += weight;
                self.merged += 1;
            }
            None => {
                self.index.insert(key, self.pairs.len());
                self.pairs.push((src, dst, weight));
            }
        }
        Ok(self)
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops
    }

    pub fn duplicates_merged(&self) -> usize {
        self.merged
    }

    pub fn build(self) -> Graph {
        let n = self.n_nodes;
        let mut edges = Vec::with_capacity(self.pairs.len() * if self.directed { 1 } else { 2 });
        for (id, &(src, dst, weight)) in self.pairs.iter().enumerate() {
            edges.push(Edge {
                src,
                dst,
                weight,
                id,
            });
            if !self.directed {
                edges.push(Edge {
                    src: dst,
                    dst: src,
                    weight,
                    id,
                });
            }
        }

        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.dst + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut incoming = vec![
            Incoming {
                source: 0,
                weight: 0.0,
                edge: 0,
            };
            edges.len()
        ];
        for e in &edges {
            incoming[cursor[e.dst]] = Incoming {
                source: e.src,
                weight: e.weight,
                edge: e.id,
            };
            cursor[e.dst] += 1;
        }

        Graph {
            n_nodes: n,
            directed: self.directed,
            n_edge_ids: self.pairs.len(),
            edges,
            offsets,
            incoming,
        }
    }
}

/// Convenience constructor for undirected graphs with the standard merge rules.
pub fn undirected(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
    let mut b = GraphBuilder::undirected(n_nodes);
    for &(s, d, w) in edges {
        b.add_edge(s, d, w)?;
    }
    Ok(b.build())
}

/// Convenience constructor for directed graphs with the standard merge rules.
pub fn directed(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
    let mut b = GraphBuilder::directed(n_nodes);
    for &(s, d, w) in edges {
        b.add_edge(s, d, w)?;
    }
    Ok(b.build())
}

/// `k`-regular ring on `n` nodes: each node joined to its `k/2` nearest
/// neighbors on either side, unit weights.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph> {
    if !k.is_multiple_of(2) || k >= n {
        return Err(Error::InvalidParameter(format!(
            "ring lattice needs even k < n, got n = {n}, k = {k}"
        )));
    }
    let mut b = GraphBuilder::undirected(n);
    for u in 0..n {
        for j in 1..=k / 2 {
            b.add_edge(u, (u + j) % n, 1.0)?;
        }
    }
    Ok(b.build())
}

/// Undirected star with the hub at node 0.
pub fn star(n: usize) -> Result<Graph> {
    let mut b = GraphBuilder::undirected(n);
    for leaf in 1..n {
        b.add_edge(0, leaf, 1.0)?;
    }
    Ok(b.build())
}

/// Complete undirected graph with unit weights.
pub fn complete(n: usize) -> Result<Graph> {
    let mut b = GraphBuilder::undirected(n);
    for i in 0..n {
        for j in i + 1..n {
            b.add_edge(i, j, 1.0)?;
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_cycle_degrees() {
        let g = directed(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let d = g.degrees();
        assert_eq!(d.s_in, vec![1.0, 1.0, 1.0]);
        assert_eq!(d.s_out, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn star_out_strength() {
        let g = star(4).unwrap();
        assert_eq!(g.degrees().s_out, vec![3.0, 1.0, 1.0, 1.0]);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn weighted_in_strength() {
        let g = directed(3, &[(0, 1, 2.0), (2, 1, 0.5)]).unwrap();
        let d = g.degrees();
        assert_eq!(d.s_in, vec![0.0, 2.5, 0.0]);
        assert_eq!(d.s_in.iter().sum::<f64>(), 2.5);
        assert_eq!(d.s_out.iter().sum::<f64>(), 2.5);
        assert_eq!(g.total_weight(), 2.5);
    }

    #[test]
    fn duplicates_merge_and_self_loops_drop() {
        let mut b = GraphBuilder::undirected(3);
        b.add_edge(0, 1, 1.0).unwrap();
        b.add_edge(1, 0, 2.0).unwrap();
        b.add_edge(2, 2, 1.0).unwrap();
        assert_eq!(b.self_loops_dropped(), 1);
        assert_eq!(b.duplicates_merged(), 1);
        let g = b.build();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].weight, 3.0);
        assert_eq!(g.edges()[1].weight, 3.0);
        assert_eq!(g.edges()[0].id, g.edges()[1].id);
    }

    #[test]
    fn undirected_strengths_symmetric() {
        let g = undirected(4, &[(0, 1, 1.5), (1, 2, 0.5), (3, 0, 2.0)]).unwrap();
        let d = g.degrees();
        assert_eq!(d.s_in, d.s_out);
    }

    #[test]
    fn incoming_lists_match_edges() {
        let g = directed(3, &[(0, 1, 2.0), (2, 1, 0.5), (1, 0, 1.0)]).unwrap();
        let inc: Vec<_> = g.incoming(1).iter().map(|i| (i.source, i.weight)).collect();
        assert_eq!(inc, vec![(0, 2.0), (2, 0.5)]);
        assert!(g.incoming(2).is_empty());
    }

    #[test]
    fn rejects_bad_edges() {
        let mut b = GraphBuilder::undirected(2);
        assert!(b.add_edge(0, 2, 1.0).is_err());
        assert!(b.add_edge(0, 1, -1.0).is_err());
        assert!(b.add_edge(0, 1, f64::NAN).is_err());
    }

    #[test]
    fn correlation_conventions() {
        assert_eq!(
            ring_lattice(10, 4).unwrap().degree_correlation().unwrap(),
            0.0
        );
        assert_eq!(complete(5).unwrap().degree_correlation().unwrap(), 0.0);
        assert!(matches!(
            GraphBuilder::undirected(3).build().degree_correlation(),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn star_correlation_is_negative() {
        // Hand Pearson: endpoints (3,1)x3 and (1,3)x3 -> perfectly anti-correlated.
        let r = star(4).unwrap().degree_correlation().unwrap();
        assert!(r < 0.0);
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_multiplies_weights() {
        let g = ring_lattice(8, 4).unwrap().scaled(0.5).unwrap();
        assert!(g.edges().iter().all(|e| e.weight == 0.5));
        assert!(g.incoming(3).iter().all(|i| i.weight == 0.5));
        assert_eq!(g.binarized().total_weight(), 32.0);
        assert!(g.scaled(-1.0).is_err());
    }
}
