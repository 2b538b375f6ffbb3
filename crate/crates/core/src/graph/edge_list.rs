use std::collections::HashMap;
use std::path::Path;

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

/// Result of parsing an edge list, with the counts the loader acted on.
#[derive(Clone, Debug)]
pub struct LoadReport {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
    /// Original id of each node, indexed by the assigned node index.
    pub original_ids: Vec<i64>,
}

/// Header written by [`Graph::to_edge_list`]. When present, ids are node
/// indices and are not remapped.
fn native_header(line: &str) -> Option<(usize, bool)> {
    let rest = line.trim_start_matches('%').trim();
    let rest = rest.strip_prefix("netreduce")?;
    let (mut n, mut directed) = (None, None);
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("n_nodes=") {
            n = v.parse().ok();
        } else if let Some(v) = field.strip_prefix("directed=") {
            directed = v.parse().ok();
        }
    }
    Some((n?, directed?))
}

/// Parse a plain-text edge list.
///
/// Lines starting with `%` or `#` and blank lines are skipped. Data lines hold
/// `src dst [weight]` separated by whitespace or commas; columns past the
/// third are ignored. Ids are remapped to `0..n` in order of first
/// appearance. A leading `%%MatrixMarket` banner marks the first data line
/// as the matrix size line, which is skipped.
pub fn load_edge_list(text: &str, treat_as_undirected: bool) -> Result<LoadReport> {
    let mut directed = !treat_as_undirected;
    let mut native: Option<usize> = None;
    let mut size_line_pending = false;

    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut raw: Vec<(usize, usize, f64)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('%') || trimmed.starts_with('#') {
            if lineno == 1 && trimmed.starts_with("%%MatrixMarket") {
                size_line_pending = true;
            }
            if native.is_none() && raw.is_empty() {
                if let Some((n, d)) = native_header(trimmed) {
                    native = Some(n);
                    directed = d;
                }
            }
            continue;
        }
        if size_line_pending {
            size_line_pending = false;
            continue;
        }

        let mut tokens = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let mut endpoint = || -> Result<i64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                token: String::new(),
            })?;
            tok.parse::<i64>().map_err(|_| Error::Parse {
                line: lineno,
                token: tok.to_string(),
            })
        };
        let src = endpoint()?;
        let dst = endpoint()?;
        let weight = match tokens.next() {
            None => 1.0,
            Some(tok) => tok.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                token: tok.to_string(),
            })?,
        };
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight {
                line: lineno,
                weight,
            });
        }

        let mut index_of = |id: i64| -> Result<usize> {
            if let Some(n) = native {
                return usize::try_from(id)
                    .ok()
                    .filter(|&i| i < n)
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        token: id.to_string(),
                    });
            }
            Ok(*ids.entry(id).or_insert_with(|| {
                original_ids.push(id);
                original_ids.len() - 1
            }))
        };
        let s = index_of(src)?;
        let d = index_of(dst)?;
        raw.push((s, d, weight));
    }

    let n_nodes = match native {
        Some(n) => {
            original_ids = (0..n as i64).collect();
            n
        }
        None => original_ids.len(),
    };
    let mut builder = GraphBuilder::new(n_nodes, directed);
    for (s, d, w) in raw {
        builder.add_edge(s, d, w)?;
    }
    let self_loops_dropped = builder.self_loops_dropped();
    let duplicates_merged = builder.duplicates_merged();
    if self_loops_dropped > 0 {
        log::warn!("dropped {self_loops_dropped} self-loop(s) while loading edge list");
    }
    Ok(LoadReport {
        graph: builder.build(),
        self_loops_dropped,
        duplicates_merged,
        original_ids,
    })
}

pub fn load_edge_list_path(
    path: impl AsRef<Path>,
    treat_as_undirected: bool,
) -> Result<LoadReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_edge_list(&text, treat_as_undirected)
}
