//! Text edge-list graph files with provenance comments.
//!
//! Format: a magic comment, a `# vertices N` comment (required, so edgeless
//! graphs round-trip), further `# key value` provenance comments in sorted
//! key order, then one `u v` line per edge with `u < v`, lines sorted.
//! Serialization is canonical, so equal graphs + metadata give byte-identical
//! files.

use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub const GRAPH_FORMAT_HEADER: &str = "locallim-graph v1";

/// Parser guard; far above any desk-scale synthesis output.
pub const MAX_VERTICES: u64 = 1 << 27;

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub adj: Vec<Vec<u32>>,
    pub meta: BTreeMap<String, String>,
}

impl GraphFile {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {GRAPH_FORMAT_HEADER}\n"));
        out.push_str(&format!("# vertices {}\n", self.n()));
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} {v}\n"));
        }
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(self.edge_count());
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if (u as u32) < v {
                    edges.push((u as u32, v));
                }
            }
        }
        edges.sort_unstable();
        for (u, v) in edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<GraphFile, GraphIoError> {
        let perr = |line: usize, msg: String| GraphIoError::Parse { line: line + 1, msg };
        let mut vertices: Option<u64> = None;
        let mut meta = BTreeMap::new();
        let mut adj: Vec<Vec<u32>> = Vec::new();
        let mut seen_magic = false;
        let mut last_edge: Option<(u32, u32)> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if !seen_magic {
                    if comment != GRAPH_FORMAT_HEADER {
                        return Err(perr(ln, format!("expected `# {GRAPH_FORMAT_HEADER}`")));
                    }
                    seen_magic = true;
                    continue;
                }
                let (key, value) = match comment.split_once(' ') {
                    Some((k, v)) => (k.trim(), v.trim()),
                    None => (comment, ""),
                };
                if key == "vertices" {
                    let n: u64 = value
                        .parse()
                        .map_err(|_| perr(ln, format!("bad vertex count `{value}`")))?;
                    if n > MAX_VERTICES {
                        return Err(perr(ln, format!("vertex count {n} above cap")));
                    }
                    if vertices.replace(n).is_some() {
                        return Err(perr(ln, "duplicate vertices header".into()));
                    }
                    adj = vec![Vec::new(); n as usize];
                } else {
                    meta.insert(key.to_string(), value.to_string());
                }
                continue;
            }
            if !seen_magic {
                return Err(perr(ln, format!("expected `# {GRAPH_FORMAT_HEADER}`")));
            }
            let n = vertices.ok_or_else(|| perr(ln, "edge before vertices header".into()))?;
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => return Err(perr(ln, "expected `u v`".into())),
            };
            let u: u32 = u
                .parse()
                .map_err(|_| perr(ln, format!("bad vertex id `{u}`")))?;
            let v: u32 = v
                .parse()
                .map_err(|_| perr(ln, format!("bad vertex id `{v}`")))?;
            if u >= v {
                return Err(perr(ln, format!("edges must satisfy u < v, got {u} {v}")));
            }
            if v as u64 >= n {
                return Err(perr(ln, format!("vertex id {v} out of range (n = {n})")));
            }
            if let Some(last) = last_edge {
                if (u, v) <= last {
                    return Err(perr(ln, "edges out of order or duplicated".into()));
                }
            }
            last_edge = Some((u, v));
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        if !seen_magic {
            return Err(perr(0, "empty graph file".into()));
        }
        if vertices.is_none() {
            return Err(perr(0, "missing vertices header".into()));
        }
        Ok(GraphFile { adj, meta })
    }

    pub fn save(&self, path: &Path) -> Result<(), GraphIoError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GraphFile, GraphIoError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }
}
