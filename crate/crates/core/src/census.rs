//! Independent empirical verification: exact ball statistics of finite
//! graphs, total-variation distance against a marginal table, girth, and
//! tree-ball fraction.
//!
//! The census never trusts the synthesizer: it extracts every radius-r ball
//! by BFS, canonicalizes it (trees in linear time, small cyclic balls by the
//! exact general canonicalizer), and counts. Non-tree balls above the
//! canonicalization cap land in per-size bucket classes; against tree-
//! supported tables this keeps the TV distance exact, since such balls have
//! target mass zero either way.

use crate::ball::{canonicalize, BallCode, BallError, GENERAL_CANON_HARD_CAP};
use crate::graph::RootedGraph;
use crate::measure::MarginalTable;
use crate::ratio::{int, Ratio};
use num::{BigInt, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_BALL_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("graph max degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: usize, bound: u32 },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("tree ball on {vertices} vertices exceeds the hard cap {cap}")]
    BallTooLarge { vertices: usize, cap: usize },
    #[error(transparent)]
    Ball(#[from] BallError),
}

/// Exact per-class ball counts of one graph at one radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub r: u32,
    pub d: u32,
    pub total: u64,
    pub counts: BTreeMap<BallCode, u64>,
    /// Vertices whose ball is a tree.
    pub tree_vertices: u64,
    /// Vertices bucketed because their (non-tree) ball exceeded the cap.
    pub oversized_vertices: u64,
}

impl CensusReport {
    pub fn frequency(&self, ball: &BallCode) -> Ratio {
        let c = self.counts.get(ball).copied().unwrap_or(0);
        Ratio::new(BigInt::from(c), BigInt::from(self.total))
    }

    pub fn tree_ball_fraction(&self) -> Ratio {
        Ratio::new(BigInt::from(self.tree_vertices), BigInt::from(self.total))
    }
}

/// Exact TV distance and the per-ball maximum deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvReport {
    pub tv: Ratio,
    pub max_dev: Ratio,
}

/// Safety margin on tree canonicalization: balls bigger than this indicate a
/// misuse far outside desk scale.
const TREE_BALL_HARD_CAP: usize = 100_000;

fn census_chunk(
    adj: &[Vec<u32>],
    range: std::ops::Range<usize>,
    r: u32,
    d: u32,
    ball_cap: usize,
) -> Result<(BTreeMap<BallCode, u64>, u64, u64), CensusError> {
    let mut counts: BTreeMap<BallCode, u64> = BTreeMap::new();
    let mut tree_vertices = 0u64;
    let mut oversized = 0u64;
    // Scratch: global id -> local id + BFS ring buffer, reused per vertex.
    let mut local_of = vec![u32::MAX; adj.len()];
    let mut ball: Vec<u32> = Vec::new();
    for v in range {
        ball.clear();
        ball.push(v as u32);
        local_of[v] = 0;
        let mut dist = vec![0u32];
        let mut head = 0usize;
        while head < ball.len() {
            let u = ball[head];
            if dist[head] < r {
                for &w in &adj[u as usize] {
                    if local_of[w as usize] == u32::MAX {
                        local_of[w as usize] = ball.len() as u32;
                        ball.push(w);
                        dist.push(dist[head] + 1);
                    }
                }
            }
            head += 1;
        }
        let n = ball.len();
        let mut g = RootedGraph::new(n, 0);
        let mut m = 0usize;
        for (li, &u) in ball.iter().enumerate() {
            for &w in &adj[u as usize] {
                let lw = local_of[w as usize];
                if lw != u32::MAX && (li as u32) < lw {
                    g.add_edge(li as u32, lw).expect("induced edge");
                    m += 1;
                }
            }
        }
        for &u in &ball {
            local_of[u as usize] = u32::MAX;
        }
        let is_tree = m == n - 1;
        let code = if is_tree {
            if n > TREE_BALL_HARD_CAP {
                return Err(CensusError::BallTooLarge {
                    vertices: n,
                    cap: TREE_BALL_HARD_CAP,
                });
            }
            tree_vertices += 1;
            canonicalize(&g, d, r)?
        } else if n <= ball_cap.min(GENERAL_CANON_HARD_CAP) {
            canonicalize(&g, d, r)?
        } else {
            oversized += 1;
            BallCode::oversized_bucket(d, r, n)
        };
        *counts.entry(code).or_insert(0) += 1;
    }
    Ok((counts, tree_vertices, oversized))
}

/// Exact ball census at radius `r`, distributed over `workers` threads.
/// The result is identical for every worker count: per-vertex counts are
/// merged by class over contiguous chunks.
pub fn ball_census(
    adj: &[Vec<u32>],
    r: u32,
    d: u32,
    workers: usize,
    ball_cap: usize,
) -> Result<CensusReport, CensusError> {
    let deg = adj.iter().map(Vec::len).max().unwrap_or(0);
    if deg > d as usize {
        return Err(CensusError::DegreeExceeded {
            degree: deg,
            bound: d,
        });
    }
    let n = adj.len();
    if n == 0 {
        return Err(CensusError::ParameterMismatch("empty graph".into()));
    }
    let workers = workers.clamp(1, n);
    let chunk = n.div_ceil(workers);
    let parts: Vec<Result<(BTreeMap<BallCode, u64>, u64, u64), CensusError>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(n);
                    scope.spawn(move || census_chunk(adj, lo..hi, r, d, ball_cap))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("census worker")).collect()
        });
    let mut counts: BTreeMap<BallCode, u64> = BTreeMap::new();
    let mut tree_vertices = 0u64;
    let mut oversized = 0u64;
    for part in parts {
        let (c, t, o) = part?;
        for (k, v) in c {
            *counts.entry(k).or_insert(0) += v;
        }
        tree_vertices += t;
        oversized += o;
    }
    debug_assert_eq!(counts.values().sum::<u64>(), n as u64);
    Ok(CensusReport {
        r,
        d,
        total: n as u64,
        counts,
        tree_vertices,
        oversized_vertices: oversized,
    })
}

/// Exact TV distance between the census frequencies and the table level at
/// the census radius, plus the per-ball max deviation.
pub fn tv_distance(report: &CensusReport, table: &MarginalTable) -> Result<TvReport, CensusError> {
    if table.degree_bound() != report.d {
        return Err(CensusError::ParameterMismatch(format!(
            "census d = {}, table d = {}",
            report.d,
            table.degree_bound()
        )));
    }
    if report.r > table.depth() {
        return Err(CensusError::ParameterMismatch(format!(
            "census radius {} beyond table depth {}",
            report.r,
            table.depth()
        )));
    }
    let level = table.level(report.r);
    let keys: std::collections::BTreeSet<&BallCode> =
        report.counts.keys().chain(level.keys()).collect();
    let mut l1 = Ratio::zero();
    let mut max_dev = Ratio::zero();
    for k in keys {
        let p = report.frequency(k);
        let q = level.get(k).cloned().unwrap_or_else(Ratio::zero);
        let dev = crate::ratio::abs_diff(&p, &q);
        max_dev = max_dev.max(dev.clone());
        l1 += dev;
    }
    Ok(TvReport {
        tv: l1 / int(2),
        max_dev,
    })
}

/// Exact girth: `None` for forests. Acyclic components are skipped, pure
/// cycle components contribute their length directly, and the rest run a
/// per-vertex BFS cut off at half the best cycle found so far.
pub fn girth(adj: &[Vec<u32>]) -> Option<u64> {
    let n = adj.len();
    let mut comp = vec![u32::MAX; n];
    let mut best: Option<u64> = None;
    let mut mixed_vertices: Vec<u32> = Vec::new();
    let mut next_comp = 0u32;
    for start in 0..n as u32 {
        if comp[start as usize] != u32::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start as usize] = next_comp;
        let mut members = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &adj[u as usize] {
                if comp[w as usize] == u32::MAX {
                    comp[w as usize] = next_comp;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        next_comp += 1;
        let nc = members.len() as u64;
        let mc: u64 = members.iter().map(|&v| adj[v as usize].len() as u64).sum::<u64>() / 2;
        if mc == nc - 1 {
            continue; // tree component
        }
        if members.iter().all(|&v| adj[v as usize].len() == 2) {
            best = Some(best.map_or(nc, |b| b.min(nc)));
            continue; // pure cycle
        }
        mixed_vertices.extend(members);
    }
    // Bounded BFS over the remaining components.
    let mut dist = vec![u32::MAX; n];
    let mut touched: Vec<u32> = Vec::new();
    for &src in &mixed_vertices {
        let limit = best.map(|b| (b / 2) as u32).unwrap_or(u32::MAX);
        dist[src as usize] = 0;
        touched.clear();
        touched.push(src);
        let mut par: Vec<(u32, u32)> = vec![(src, u32::MAX)];
        let mut head = 0usize;
        while head < touched.len() {
            let u = touched[head];
            let (_, pu) = par[head];
            let du = dist[u as usize];
            if du >= limit {
                break;
            }
            for &w in &adj[u as usize] {
                if w == pu {
                    continue;
                }
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    touched.push(w);
                    par.push((w, u));
                } else {
                    // Non-tree edge in the BFS forest: closed walk through src.
                    let cand = (du + dist[w as usize] + 1) as u64;
                    best = Some(best.map_or(cand, |b| b.min(cand)));
                }
            }
            head += 1;
        }
        for &u in &touched {
            dist[u as usize] = u32::MAX;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RootedGraph;
    use crate::measure::{marginals_atom, marginals_regular};
    use crate::ratio::frac;

    fn adj_of(g: &RootedGraph) -> Vec<Vec<u32>> {
        (0..g.n() as u32).map(|v| g.neighbors(v).to_vec()).collect()
    }

    #[test]
    fn cycle_census_vertex_transitive() {
        let c6 = adj_of(&RootedGraph::cycle(6));
        let rep = ball_census(&c6, 1, 2, 1, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(rep.counts.len(), 1);
        assert_eq!(rep.total, 6);
        assert_eq!(rep.tree_ball_fraction(), int(1));
        // At radius 2 the balls are paths of 5, still trees.
        let rep2 = ball_census(&c6, 2, 2, 1, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(rep2.counts.len(), 1);
        // At radius 3 each ball wraps around the whole cycle.
        let rep3 = ball_census(&c6, 3, 2, 1, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(rep3.tree_ball_fraction(), Ratio::zero());
    }

    #[test]
    fn c4_radius2_is_whole_cycle() {
        let c4 = adj_of(&RootedGraph::cycle(4));
        let rep = ball_census(&c4, 2, 2, 1, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(rep.counts.len(), 1);
        assert_eq!(rep.tree_ball_fraction(), Ratio::zero());
        let ball = rep.counts.keys().next().unwrap();
        assert!(!ball.is_tree());
        assert_eq!(ball.vertex_count(), 4);
    }

    #[test]
    fn k4_vertex_transitive() {
        let mut adj = vec![Vec::new(); 4];
        for u in 0..4u32 {
            for v in 0..4u32 {
                if u != v {
                    adj[u as usize].push(v);
                }
            }
        }
        let rep = ball_census(&adj, 1, 3, 1, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(rep.counts.len(), 1);
        assert_eq!(rep.frequency(rep.counts.keys().next().unwrap()), int(1));
    }

    #[test]
    fn census_of_atom_matches_its_table() {
        let f = RootedGraph::complete_binary_tree(2);
        let table = marginals_atom(&f, 3, 2).unwrap();
        let adj = adj_of(&f);
        for r in 0..=2 {
            let rep = ball_census(&adj, r, 3, 1, DEFAULT_BALL_CAP).unwrap();
            let tv = tv_distance(&rep, &table).unwrap();
            assert!(tv.tv.is_zero(), "r = {r}");
            assert!(tv.max_dev.is_zero());
        }
    }

    #[test]
    fn census_invariant_under_relabeling_and_workers() {
        let f = RootedGraph::complete_binary_tree(2);
        let adj = adj_of(&f);
        let perm: Vec<u32> = vec![3, 6, 0, 2, 5, 1, 4];
        let relabeled = adj_of(&f.relabel(&perm));
        for workers in [1, 2, 4, 16] {
            let a = ball_census(&adj, 1, 3, workers, DEFAULT_BALL_CAP).unwrap();
            let b = ball_census(&relabeled, 1, 3, workers, DEFAULT_BALL_CAP).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn census_radius_consistency() {
        // Census at radius r equals the truncate-projection of radius r+1.
        let c8 = adj_of(&RootedGraph::cycle(8));
        let lo = ball_census(&c8, 1, 2, 1, DEFAULT_BALL_CAP).unwrap();
        let hi = ball_census(&c8, 2, 2, 1, DEFAULT_BALL_CAP).unwrap();
        let mut projected: BTreeMap<BallCode, u64> = BTreeMap::new();
        for (b, c) in &hi.counts {
            *projected.entry(b.truncate(1).unwrap()).or_insert(0) += c;
        }
        assert_eq!(projected, lo.counts);
    }

    #[test]
    fn tv_against_regular_table() {
        let c6 = adj_of(&RootedGraph::cycle(6));
        let table = marginals_regular(2, 3);
        let rep1 = ball_census(&c6, 1, 2, 1, DEFAULT_BALL_CAP).unwrap();
        assert!(tv_distance(&rep1, &table).unwrap().tv.is_zero());
        // Radius 3: every ball wraps; the target is the 7-vertex path.
        let rep3 = ball_census(&c6, 3, 2, 1, DEFAULT_BALL_CAP).unwrap();
        let tv = tv_distance(&rep3, &table).unwrap();
        assert_eq!(tv.tv, int(1));
        // Mismatched degree bound is refused.
        let t3 = marginals_regular(3, 2);
        assert!(matches!(
            tv_distance(&rep1, &t3),
            Err(CensusError::ParameterMismatch(_))
        ));
    }

    #[test]
    fn oversized_balls_bucketed() {
        // C12 at radius 6 wraps into a 12-vertex cyclic ball; with a cap of 8
        // it lands in the oversized bucket but TV against a tree table is
        // still exact.
        let c12 = adj_of(&RootedGraph::cycle(12));
        let rep = ball_census(&c12, 6, 2, 1, 8).unwrap();
        assert_eq!(rep.oversized_vertices, 12);
        assert_eq!(rep.counts.len(), 1);
        assert!(rep.counts.keys().next().unwrap().is_oversized_bucket());
        let table = marginals_regular(2, 6);
        let tv = tv_distance(&rep, &table).unwrap();
        assert_eq!(tv.tv, int(1));
    }

    #[test]
    fn girth_examples() {
        assert_eq!(girth(&adj_of(&RootedGraph::path(7))), None);
        assert_eq!(girth(&adj_of(&RootedGraph::cycle(6))), Some(6));
        assert_eq!(girth(&adj_of(&RootedGraph::complete_binary_tree(3))), None);
        // Petersen graph: girth 5.
        let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
        let mut adj = vec![Vec::new(); 10];
        for (u, v) in outer.iter().chain(&inner).chain(&spokes) {
            adj[*u as usize].push(*v as u32);
            adj[*v as usize].push(*u as u32);
        }
        assert_eq!(girth(&adj), Some(5));
        // K4: triangle.
        let mut k4 = vec![Vec::new(); 4];
        for u in 0..4u32 {
            for v in 0..4u32 {
                if u != v {
                    k4[u as usize].push(v);
                }
            }
        }
        assert_eq!(girth(&k4), Some(3));
        // Mixed forest + cycle.
        let mut mixed = vec![Vec::new(); 7];
        for (u, v) in [(0, 1), (1, 2), (2, 0), (3, 4), (5, 6)] {
            mixed[u as usize].push(v as u32);
            mixed[v as usize].push(u as u32);
        }
        assert_eq!(girth(&mixed), Some(3));
    }

    #[test]
    fn degree_guard() {
        let star = adj_of(&RootedGraph::star(4));
        assert!(matches!(
            ball_census(&star, 1, 3, 1, DEFAULT_BALL_CAP),
            Err(CensusError::DegreeExceeded { .. })
        ));
    }
}
