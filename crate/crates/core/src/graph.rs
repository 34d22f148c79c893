//! Working (non-canonical) rooted graph form: adjacency lists plus a root.
//!
//! This is the mutable precursor every canonical code is computed from.
//! Vertices are `u32` indices; graphs are simple and undirected.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(u32, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
}

/// Simple undirected graph with a distinguished root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    adj: Vec<Vec<u32>>,
    root: u32,
}

impl RootedGraph {
    /// `n` isolated vertices rooted at `root`.
    pub fn new(n: usize, root: u32) -> Self {
        assert!((root as usize) < n, "root out of range");
        RootedGraph {
            adj: vec![Vec::new(); n],
            root,
        }
    }

    pub fn from_edges(n: usize, root: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = RootedGraph::new(n, root);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<(), GraphError> {
        let n = self.n();
        if (u as usize) >= n {
            return Err(GraphError::VertexOutOfRange(u, n));
        }
        if (v as usize) >= n {
            return Err(GraphError::VertexOutOfRange(v, n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj[u as usize].contains(&v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// BFS distances from `src`; unreachable vertices get `u32::MAX`.
    pub fn bfs_distances(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        let mut queue = std::collections::VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Maximum root distance over reachable vertices.
    pub fn eccentricity(&self) -> u32 {
        self.bfs_distances(self.root)
            .into_iter()
            .filter(|&d| d != u32::MAX)
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(self.root).iter().all(|&d| d != u32::MAX)
    }

    /// Connected and acyclic.
    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() == self.n() - 1
    }

    /// Induced subgraph on `keep` (which must contain the new root), re-rooted
    /// at `new_root`. Returns the subgraph and the map old-id -> new-id.
    pub fn induced(&self, keep: &[u32], new_root: u32) -> (RootedGraph, Vec<Option<u32>>) {
        let mut map: Vec<Option<u32>> = vec![None; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            assert!(map[v as usize].is_none(), "duplicate vertex in keep set");
            map[v as usize] = Some(i as u32);
        }
        let root = map[new_root as usize].expect("new root not in keep set");
        let mut g = RootedGraph::new(keep.len(), root);
        for &v in keep {
            for &w in &self.adj[v as usize] {
                if v < w {
                    if let (Some(a), Some(b)) = (map[v as usize], map[w as usize]) {
                        g.add_edge(a, b).expect("induced edge");
                    }
                }
            }
        }
        (g, map)
    }

    /// Vertices within distance `r` of `src`, sorted ascending.
    pub fn ball_vertices(&self, src: u32, r: u32) -> Vec<u32> {
        self.bfs_distances(src)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= r)
            .map(|(v, _)| v as u32)
            .collect()
    }

    /// The induced ball of radius `r` around `src`, rooted at `src`.
    pub fn ball(&self, src: u32, r: u32) -> RootedGraph {
        let keep = self.ball_vertices(src, r);
        self.induced(&keep, src).0
    }

    /// Same graph, different root.
    pub fn with_root(&self, root: u32) -> RootedGraph {
        assert!((root as usize) < self.n());
        RootedGraph {
            adj: self.adj.clone(),
            root,
        }
    }

    /// Apply a relabeling permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> RootedGraph {
        assert_eq!(perm.len(), self.n());
        let mut g = RootedGraph::new(self.n(), perm[self.root as usize]);
        for v in 0..self.n() as u32 {
            for &w in &self.adj[v as usize] {
                if v < w {
                    g.add_edge(perm[v as usize], perm[w as usize]).unwrap();
                }
            }
        }
        g
    }

    /// Path on `k` vertices rooted at an endpoint.
    pub fn path(k: usize) -> RootedGraph {
        assert!(k >= 1);
        let edges: Vec<(u32, u32)> = (1..k as u32).map(|i| (i - 1, i)).collect();
        RootedGraph::from_edges(k, 0, &edges).unwrap()
    }

    /// Star with `k` leaves rooted at the center.
    pub fn star(k: usize) -> RootedGraph {
        let edges: Vec<(u32, u32)> = (1..=k as u32).map(|i| (0, i)).collect();
        RootedGraph::from_edges(k + 1, 0, &edges).unwrap()
    }

    /// Complete binary tree of the given height rooted at the top.
    pub fn complete_binary_tree(height: u32) -> RootedGraph {
        let n = (1usize << (height + 1)) - 1;
        let mut edges = Vec::new();
        for v in 1..n as u32 {
            edges.push(((v - 1) / 2, v));
        }
        RootedGraph::from_edges(n, 0, &edges).unwrap()
    }

    /// Cycle on `k` vertices.
    pub fn cycle(k: usize) -> RootedGraph {
        assert!(k >= 3);
        let mut edges: Vec<(u32, u32)> = (1..k as u32).map(|i| (i - 1, i)).collect();
        edges.push((k as u32 - 1, 0));
        RootedGraph::from_edges(k, 0, &edges).unwrap()
    }
}
