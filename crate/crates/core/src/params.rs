//! Small text grammars for user-facing parameters: degree distributions,
//! tree specifications, and mixture lists.

use crate::graph::RootedGraph;
use crate::ratio::{parse_ratio, Ratio};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("bad degree distribution `{input}`: {msg}")]
    DegreeDist { input: String, msg: String },
    #[error("bad tree spec `{input}`: {msg}")]
    TreeSpec { input: String, msg: String },
    #[error("bad mixture list `{input}`: {msg}")]
    MixtureList { input: String, msg: String },
}

/// Parse `k:p/q,k:p/q,...` into a degree distribution.
pub fn parse_degree_dist(s: &str) -> Result<BTreeMap<u32, Ratio>, ParamError> {
    let err = |msg: &str| ParamError::DegreeDist {
        input: s.to_string(),
        msg: msg.to_string(),
    };
    let mut out = BTreeMap::new();
    if s.trim().is_empty() {
        return Err(err("empty"));
    }
    for part in s.split(',') {
        let (k, p) = part
            .split_once(':')
            .ok_or_else(|| err("expected `degree:probability`"))?;
        let k: u32 = k
            .trim()
            .parse()
            .map_err(|_| err(&format!("bad degree `{k}`")))?;
        if k > 1 << 16 {
            return Err(err(&format!("degree {k} out of range")));
        }
        let p = parse_ratio(p).map_err(|e| err(&e.to_string()))?;
        if out.insert(k, p).is_some() {
            return Err(err(&format!("duplicate degree {k}")));
        }
    }
    Ok(out)
}

/// Parse a finite tree: `k1`/`path<k>`/`star<k>`/`cbt<h>` shorthands or an
/// explicit `edges:0-1,1-2,...` list (which must form a tree).
pub fn parse_tree_spec(s: &str) -> Result<RootedGraph, ParamError> {
    let err = |msg: &str| ParamError::TreeSpec {
        input: s.to_string(),
        msg: msg.to_string(),
    };
    let s = s.trim();
    let num = |t: &str| -> Result<usize, ParamError> {
        let v: usize = t.parse().map_err(|_| err(&format!("bad count `{t}`")))?;
        if v == 0 || v > 10_000 {
            return Err(err(&format!("count {v} out of range")));
        }
        Ok(v)
    };
    if s == "k1" {
        return Ok(RootedGraph::new(1, 0));
    }
    if s == "k2" {
        return Ok(RootedGraph::path(2));
    }
    if let Some(k) = s.strip_prefix("path") {
        return Ok(RootedGraph::path(num(k)?));
    }
    if let Some(k) = s.strip_prefix("star") {
        return Ok(RootedGraph::star(num(k)?));
    }
    if let Some(h) = s.strip_prefix("cbt") {
        let h = num(h)?;
        if h > 16 {
            return Err(err("height out of range"));
        }
        return Ok(RootedGraph::complete_binary_tree(h as u32));
    }
    if let Some(list) = s.strip_prefix("edges:") {
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut max_v = 0u32;
        for part in list.split(',') {
            let (u, v) = part
                .split_once('-')
                .ok_or_else(|| err("expected `u-v`"))?;
            let u: u32 = u.trim().parse().map_err(|_| err(&format!("bad id `{u}`")))?;
            let v: u32 = v.trim().parse().map_err(|_| err(&format!("bad id `{v}`")))?;
            if u.max(v) > 10_000 {
                return Err(err("vertex id out of range"));
            }
            max_v = max_v.max(u).max(v);
            edges.push((u, v));
        }
        let g = RootedGraph::from_edges(max_v as usize + 1, 0, &edges)
            .map_err(|e| err(&e.to_string()))?;
        if !g.is_tree() {
            return Err(err("edge list is not a tree"));
        }
        return Ok(g);
    }
    Err(err("unknown tree spec"))
}

/// Parse `w1:path1,w2:path2,...` into component weights and file paths.
pub fn parse_mixture_list(s: &str) -> Result<Vec<(Ratio, String)>, ParamError> {
    let err = |msg: &str| ParamError::MixtureList {
        input: s.to_string(),
        msg: msg.to_string(),
    };
    if s.trim().is_empty() {
        return Err(err("empty"));
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let (w, path) = part
            .split_once(':')
            .ok_or_else(|| err("expected `weight:path`"))?;
        let w = parse_ratio(w).map_err(|e| err(&e.to_string()))?;
        if path.trim().is_empty() {
            return Err(err("empty path"));
        }
        out.push((w, path.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::frac;

    #[test]
    fn degree_dist_grammar() {
        let d = parse_degree_dist("1:1/2,3:1/2").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[&1], frac(1, 2));
        assert_eq!(d[&3], frac(1, 2));
        for bad in ["", "1", "1:", ":1/2", "1:1/2,1:1/2", "x:1", "1:1/0"] {
            assert!(parse_degree_dist(bad).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn tree_spec_grammar() {
        assert_eq!(parse_tree_spec("k1").unwrap().n(), 1);
        assert_eq!(parse_tree_spec("k2").unwrap().n(), 2);
        assert_eq!(parse_tree_spec("path3").unwrap().n(), 3);
        assert_eq!(parse_tree_spec("star3").unwrap().n(), 4);
        assert_eq!(parse_tree_spec("cbt2").unwrap().n(), 7);
        let g = parse_tree_spec("edges:0-1,1-2").unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.is_tree());
        for bad in [
            "",
            "path0",
            "pathx",
            "edges:0-0",
            "edges:0-1,0-1",
            "edges:0-1,2-3",
            "ring5",
        ] {
            assert!(parse_tree_spec(bad).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn mixture_grammar() {
        let m = parse_mixture_list("1/2:a.tbl,1/2:b.tbl").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].0, frac(1, 2));
        assert_eq!(m[0].1, "a.tbl");
        for bad in ["", "1/2", "x:a"] {
            assert!(parse_mixture_list(bad).is_err());
        }
    }
}
