//! Directed balls and edge-balls.
//!
//! A [`VecBall`] is a rooted ball with one distinguished edge pointing out of
//! the root, up to root- and edge-preserving isomorphism; its multiplicity
//! counts the root edges in the same automorphism orbit as the distinguished
//! one. An [`EdgeBall`] is the union of the radius-r balls around the two
//! endpoints of an oriented edge; the involution swaps the endpoints.

use crate::ball::{
    check_ball_shape, decode_and_check, decode_header, encode_graph, fmt_token, parse_token_ints,
    BallCode, BallError, KIND_EDGE_GENERAL, KIND_EDGE_TREE, KIND_TREE, KIND_VEC_GENERAL,
    KIND_VEC_TREE,
};
use crate::graph::RootedGraph;
use std::fmt;

/// Rooted ball with a distinguished outgoing root edge, canonical form.
///
/// Radius-0 directed balls carry no head vertex (the distinguished edge
/// leaves the ball); they are represented by a single "stub" class per
/// degree bound, produced only as the radius-0 view of an edge-ball.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VecBall {
    code: Vec<u64>,
}

/// Two-endpoint edge-ball with orientation (root = source, marked head).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeBall {
    code: Vec<u64>,
}

fn head_of(colors: &[u64]) -> Option<u32> {
    let mut head = None;
    for (v, &c) in colors.iter().enumerate() {
        match c {
            0 => {}
            1 => {
                if head.is_some() {
                    return None;
                }
                head = Some(v as u32);
            }
            _ => return None,
        }
    }
    head
}

/// Canonical directed ball for `g` rooted at its root with distinguished
/// edge (root, head).
pub(crate) fn vec_ball_from(
    g: &RootedGraph,
    d: u32,
    r: u32,
    head: u32,
) -> Result<VecBall, BallError> {
    assert!(
        g.neighbors(g.root()).contains(&head),
        "distinguished head must be a root neighbor"
    );
    assert!(r >= 1, "directed balls of radius 0 have no head");
    check_ball_shape(g, d, r)?;
    let mut colors = vec![0u64; g.n()];
    colors[head as usize] = 1;
    let (kind, payload) = encode_graph(g, &colors)?;
    let kind = if kind == KIND_TREE {
        KIND_VEC_TREE
    } else {
        KIND_VEC_GENERAL
    };
    let mut code = vec![d as u64, r as u64, kind];
    code.extend(payload);
    Ok(VecBall { code })
}

impl VecBall {
    /// The radius-0 directed class: a bare root with an edge stub.
    pub fn stub(d: u32) -> VecBall {
        VecBall {
            code: vec![d as u64, 0, KIND_VEC_TREE, 0, 0],
        }
    }

    pub fn is_stub(&self) -> bool {
        self.radius() == 0
    }

    pub fn code(&self) -> &[u64] {
        &self.code
    }

    pub fn degree_bound(&self) -> u32 {
        self.code[0] as u32
    }

    pub fn radius(&self) -> u32 {
        self.code[1] as u32
    }

    pub fn is_tree(&self) -> bool {
        self.code[2] == KIND_VEC_TREE
    }

    pub fn vertex_count(&self) -> usize {
        match self.code[2] {
            KIND_VEC_TREE => (self.code.len() - 3) / 2,
            _ => self.code[3] as usize,
        }
    }

    /// Decode to (graph, head). Head is `None` for the radius-0 stub.
    pub fn to_graph(&self) -> (RootedGraph, Option<u32>) {
        let (g, colors) = decode_and_check(&self.code).expect("stored code is valid");
        let head = head_of(&colors);
        (g, head)
    }

    /// Forget the distinguished edge.
    pub fn ball(&self) -> BallCode {
        let (g, _) = self.to_graph();
        crate::ball::canonicalize(&g, self.degree_bound(), self.radius())
            .expect("underlying ball is valid")
    }

    /// Number of root edges in the same root-automorphism orbit as the
    /// distinguished edge (the paper's multiplicity `l`).
    pub fn multiplicity(&self) -> u32 {
        if self.is_stub() {
            return 1;
        }
        let (g, _) = self.to_graph();
        let mut count = 0;
        for &c in g.neighbors(g.root()) {
            let mut colors = vec![0u64; g.n()];
            colors[c as usize] = 1;
            let (_, payload) = encode_graph(&g, &colors).expect("decoded ball re-encodes");
            if payload == self.code[3..] {
                count += 1;
            }
        }
        count
    }

    /// The directed sub-ball of radius `r` around the root (keeps the
    /// distinguished edge).
    pub fn truncate(&self, r: u32) -> Result<VecBall, BallError> {
        if r == 0 || r > self.radius() {
            return Err(BallError::BadRadius {
                requested: r,
                actual: self.radius(),
            });
        }
        let (g, head) = self.to_graph();
        let head = head.expect("radius >= 1 has a head");
        let keep = g.ball_vertices(g.root(), r);
        let (sub, map) = g.induced(&keep, g.root());
        let new_head = map[head as usize].expect("head is within radius 1");
        vec_ball_from(&sub, self.degree_bound(), r, new_head)
    }

    pub fn token(&self) -> String {
        fmt_token(&self.code)
    }

    pub fn parse_token(s: &str) -> Result<VecBall, BallError> {
        let code = parse_token_ints(s)?;
        let (_, r, _) = decode_header(&code, &[KIND_VEC_TREE, KIND_VEC_GENERAL])?;
        if r == 0 {
            if code.len() == 5 && code[2] == KIND_VEC_TREE && code[3] == 0 && code[4] == 0 {
                return Ok(VecBall { code });
            }
            return Err(BallError::Parse("invalid radius-0 directed ball".into()));
        }
        let (g, colors) = decode_and_check(&code)?;
        let head =
            head_of(&colors).ok_or_else(|| BallError::Parse("expected one head mark".into()))?;
        if !g.neighbors(g.root()).contains(&head) {
            return Err(BallError::Parse("head is not a root neighbor".into()));
        }
        Ok(VecBall { code })
    }
}

impl fmt::Display for VecBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// One directed ball per root-edge orbit of `ball`, with orbit sizes, in
/// canonical order. Empty for root degree 0.
pub fn orientations(ball: &BallCode) -> Vec<(VecBall, u32)> {
    if ball.radius() == 0 || ball.root_degree() == 0 {
        return Vec::new();
    }
    let g = ball.to_graph();
    let d = ball.degree_bound();
    let r = ball.radius();
    let mut groups: std::collections::BTreeMap<VecBall, u32> = Default::default();
    for &c in g.neighbors(g.root()) {
        let vb = vec_ball_from(&g, d, r, c).expect("ball decodes within bounds");
        *groups.entry(vb).or_insert(0) += 1;
    }
    groups.into_iter().collect()
}

/// Canonical edge-ball for the oriented edge (root, head) of `g`, where `g`
/// must already be exactly the union of the two radius-`r` endpoint balls.
pub(crate) fn edge_ball_from(
    g: &RootedGraph,
    d: u32,
    r: u32,
    head: u32,
) -> Result<EdgeBall, BallError> {
    assert!(g.neighbors(g.root()).contains(&head));
    if !g.is_connected() {
        return Err(BallError::Disconnected);
    }
    let deg = g.max_degree();
    if deg > d as usize {
        return Err(BallError::DegreeExceeded {
            degree: deg,
            bound: d,
        });
    }
    let dist_root = g.bfs_distances(g.root());
    let dist_head = g.bfs_distances(head);
    if !(0..g.n()).all(|v| dist_root[v].min(dist_head[v]) <= r) {
        return Err(BallError::RadiusExceeded {
            eccentricity: (0..g.n())
                .map(|v| dist_root[v].min(dist_head[v]))
                .max()
                .unwrap_or(0),
            radius: r,
        });
    }
    let mut colors = vec![0u64; g.n()];
    colors[head as usize] = 1;
    let (kind, payload) = encode_graph(g, &colors)?;
    let kind = if kind == KIND_TREE {
        KIND_EDGE_TREE
    } else {
        KIND_EDGE_GENERAL
    };
    let mut code = vec![d as u64, r as u64, kind];
    code.extend(payload);
    Ok(EdgeBall { code })
}

/// The radius-(r-1) edge-ball around the distinguished edge of a radius-r
/// directed ball, computed inside it.
pub fn edge_ball_within(a: &VecBall) -> Result<EdgeBall, BallError> {
    if a.is_stub() {
        return Err(BallError::BadRadius {
            requested: 0,
            actual: 0,
        });
    }
    let (g, head) = a.to_graph();
    let head = head.expect("non-stub has a head");
    let rr = a.radius() - 1;
    let dist_root = g.bfs_distances(g.root());
    let dist_head = g.bfs_distances(head);
    let keep: Vec<u32> = (0..g.n() as u32)
        .filter(|&v| dist_root[v as usize] <= rr || dist_head[v as usize] <= rr)
        .collect();
    let (sub, map) = g.induced(&keep, g.root());
    let new_head = map[head as usize].expect("head kept");
    edge_ball_from(&sub, a.degree_bound(), rr, new_head)
}

impl EdgeBall {
    pub fn code(&self) -> &[u64] {
        &self.code
    }

    pub fn degree_bound(&self) -> u32 {
        self.code[0] as u32
    }

    pub fn radius(&self) -> u32 {
        self.code[1] as u32
    }

    pub fn is_tree(&self) -> bool {
        self.code[2] == KIND_EDGE_TREE
    }

    pub fn vertex_count(&self) -> usize {
        match self.code[2] {
            KIND_EDGE_TREE => (self.code.len() - 3) / 2,
            _ => self.code[3] as usize,
        }
    }

    /// Decode to (graph, head); the root is the graph's root.
    pub fn to_graph(&self) -> (RootedGraph, u32) {
        let (g, colors) = decode_and_check(&self.code).expect("stored code is valid");
        let head = head_of(&colors).expect("edge-ball has a head");
        (g, head)
    }

    /// Swap the roles of root and head.
    pub fn involute(&self) -> EdgeBall {
        let (g, head) = self.to_graph();
        let old_root = g.root();
        edge_ball_from(&g.with_root(head), self.degree_bound(), self.radius(), old_root)
            .expect("involution preserves edge-ball shape")
    }

    /// Radius-r directed ball around the root, keeping the distinguished edge.
    pub fn s_view(&self) -> VecBall {
        let (g, head) = self.to_graph();
        self.view_from(&g, g.root(), head)
    }

    /// Radius-r directed ball around the head, with the edge reversed.
    pub fn t_view(&self) -> VecBall {
        let (g, head) = self.to_graph();
        let old_root = g.root();
        self.view_from(&g.with_root(head), head, old_root)
    }

    fn view_from(&self, g: &RootedGraph, center: u32, other: u32) -> VecBall {
        let r = self.radius();
        if r == 0 {
            return VecBall::stub(self.degree_bound());
        }
        let keep = g.ball_vertices(center, r);
        let (sub, map) = g.induced(&keep, center);
        let new_head = map[other as usize].expect("other endpoint within radius 1");
        vec_ball_from(&sub, self.degree_bound(), r, new_head).expect("view stays within bounds")
    }

    pub fn token(&self) -> String {
        fmt_token(&self.code)
    }

    pub fn parse_token(s: &str) -> Result<EdgeBall, BallError> {
        let code = parse_token_ints(s)?;
        let (_, r, _) = decode_header(&code, &[KIND_EDGE_TREE, KIND_EDGE_GENERAL])?;
        // decode_and_check enforces degree/connectivity/canonical form, but an
        // edge-ball bounds distances jointly from both endpoints, so redo the
        // radius check here.
        let d = code[0] as u32;
        let (g, colors) = match crate::ball::decode_kind(code[2], &code[3..]) {
            Some(x) => x,
            None => return Err(BallError::Parse("malformed payload".into())),
        };
        let head =
            head_of(&colors).ok_or_else(|| BallError::Parse("expected one head mark".into()))?;
        if !g.neighbors(g.root()).contains(&head) {
            return Err(BallError::Parse("head is not a root neighbor".into()));
        }
        let eb = edge_ball_from(&g, d, r, head)?;
        if eb.code != code {
            return Err(BallError::Parse("payload is not in canonical form".into()));
        }
        Ok(eb)
    }
}

impl fmt::Display for EdgeBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}
