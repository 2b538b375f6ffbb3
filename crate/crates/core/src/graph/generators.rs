use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

/// Erdős–Rényi G(n, c): every unordered pair joined independently with
/// probability `c`, unit weights.
pub fn gen_er(n: usize, c: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "ER graph needs n >= 2, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "ER connection probability must lie in [0, 1], got {c}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::undirected(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(c) {
                b.add_edge(i, j, 1.0)?;
            }
        }
    }
    Ok(b.build())
}

/// Barabási–Albert preferential attachment. The seed core is the complete
/// graph on the first `m` nodes; every later node attaches `m` edges to
/// distinct existing nodes chosen proportionally to their current degree.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidSize(format!(
            "BA graph needs n > m >= 1, got n = {n}, m = {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::undirected(n);
    // Each node appears here once per incident edge endpoint.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in i + 1..m {
            b.add_edge(i, j, 1.0)?;
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for new in m..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                rng.random_range(0..new)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            b.add_edge(new, t, 1.0)?;
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    Ok(b.build())
}

/// Watts–Strogatz small world: ring lattice with `k/2` neighbors per side,
/// then each lattice edge `(u, u+j)` has its far endpoint rewired with
/// probability `beta` to a uniformly chosen node, avoiding self-loops and
/// duplicates. The edge count is always `n k / 2`.
pub fn gen_sw(n: usize, k: usize, beta: f64, seed: u64) -> Result<Graph> {
    if k < 2 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::InvalidParameter(format!(
            "SW graph needs even k with 2 <= k < n, got n = {n}, k = {k}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "SW rewiring probability must lie in [0, 1], got {beta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lattice: Vec<(usize, usize)> = Vec::with_capacity(n * k / 2);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(n * k);
    let mut degree = vec![0usize; n];
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            lattice.push((u, v));
            present.insert(key(u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    for edge in lattice.iter_mut() {
        let (u, v) = *edge;
        if !rng.random_bool(beta) || degree[u] >= n - 1 {
            continue;
        }
        let w = loop {
            let w = rng.random_range(0..n);
            if w != u && !present.contains(&key(u, w)) {
                break w;
            }
        };
        present.remove(&key(u, v));
        present.insert(key(u, w));
        degree[v] -= 1;
        degree[w] += 1;
        *edge = (u, w);
    }
    let mut b = GraphBuilder::undirected(n);
    for (u, v) in lattice {
        b.add_edge(u, v, 1.0)?;
    }
    Ok(b.build())
}
