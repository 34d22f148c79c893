//! Shared brute-force oracles for the acceptance suite. Nothing here may use
//! canonical codes: these are the independent checks the codes are measured
//! against.

use locallim::RootedGraph;

/// Rooted isomorphism by backtracking over vertex bijections with degree and
/// adjacency pruning. Exponential worst case, fine at oracle scale.
pub fn iso_rooted(a: &RootedGraph, b: &RootedGraph) -> bool {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    let n = a.n();
    let mut deg_a: Vec<usize> = (0..n as u32).map(|v| a.degree(v)).collect();
    let mut deg_b: Vec<usize> = (0..n as u32).map(|v| b.degree(v)).collect();
    deg_a.sort_unstable();
    deg_b.sort_unstable();
    if deg_a != deg_b {
        return false;
    }
    let mut badj = vec![vec![false; n]; n];
    for v in 0..n as u32 {
        for &w in b.neighbors(v) {
            badj[v as usize][w as usize] = true;
        }
    }
    // Map vertices of `a` in BFS order from the root.
    let dist = a.bfs_distances(a.root());
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (dist[v as usize], v));
    let mut image = vec![u32::MAX; n];
    let mut used = vec![false; n];

    fn rec(
        a: &RootedGraph,
        b: &RootedGraph,
        badj: &[Vec<bool>],
        order: &[u32],
        pos: usize,
        image: &mut [u32],
        used: &mut [bool],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        let candidates: Vec<u32> = if pos == 0 {
            vec![b.root()]
        } else {
            (0..b.n() as u32).collect()
        };
        'cand: for c in candidates {
            if used[c as usize] || a.degree(v) != b.degree(c) {
                continue;
            }
            for &w in a.neighbors(v) {
                let wi = image[w as usize];
                if wi != u32::MAX && !badj[c as usize][wi as usize] {
                    continue 'cand;
                }
            }
            image[v as usize] = c;
            used[c as usize] = true;
            if rec(a, b, badj, order, pos + 1, image, used) {
                return true;
            }
            image[v as usize] = u32::MAX;
            used[c as usize] = false;
        }
        false
    }
    rec(a, b, &badj, &order, 0, &mut image, &mut used)
}

/// Decode a Pruefer sequence into tree edges on n >= 2 vertices.
pub fn pruefer_tree(n: usize, seq: &[u32]) -> Vec<(u32, u32)> {
    assert_eq!(seq.len(), n.saturating_sub(2));
    let mut degree = vec![1u32; n];
    for &s in seq {
        degree[s as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<u32>> = (0..n as u32)
        .filter(|&v| degree[v as usize] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().expect("leaf available");
        edges.push((leaf, s));
        degree[leaf as usize] -= 1;
        degree[s as usize] -= 1;
        if degree[s as usize] == 1 {
            leaf_heap.push(std::cmp::Reverse(s));
        }
    }
    let mut last: Vec<u32> = (0..n as u32).filter(|&v| degree[v as usize] == 1).collect();
    // The two remaining leaves (for n = 2 the only pair).
    if n >= 2 {
        let b = last.pop().unwrap();
        let a = last.pop().unwrap();
        edges.push((a, b));
    }
    edges
}

/// All labeled trees on n vertices via Pruefer sequences (single tree for
/// n <= 2).
pub fn all_labeled_trees(n: usize) -> Vec<Vec<(u32, u32)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let mut seq = vec![0u32; n - 2];
    loop {
        out.push(pruefer_tree(n, &seq));
        let mut i = 0;
        loop {
            if i == seq.len() {
                return out;
            }
            if seq[i] + 1 < n as u32 {
                seq[i] += 1;
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// All connected graphs on n labeled vertices, as edge lists.
pub fn all_connected_graphs(n: usize) -> Vec<Vec<(u32, u32)>> {
    let mut all_edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            all_edges.push((u, v));
        }
    }
    let m = all_edges.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let edges: Vec<(u32, u32)> = (0..m)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| all_edges[i])
            .collect();
        if edges.len() < n - 1 {
            continue;
        }
        let g = RootedGraph::from_edges(n, 0, &edges).unwrap();
        if g.is_connected() {
            out.push(edges);
        }
    }
    out
}
