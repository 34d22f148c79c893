//! Graph synthesis: realize a balanced weight system as a finite simple
//! graph whose local statistics approximate the target table.
//!
//! Step 1 lays out, for every H-vertex A, a cell of N*w(A) elements
//! partitioned into sub-cells of N*w(e) elements per outgoing edge class.
//! Step 2 matches paired sub-cells by seeded-uniform bijections (a fixed-
//! point-free involution on self-paired loop cells). Step 3 groups, for each
//! ball class M, the elements of its orientation cells into super-cells of
//! l_A elements per orientation; super-cells become vertices, matched element
//! pairs become edges (self-pairs within one super-cell are skipped, parallel
//! pairs collapse to one edge; both are counted and reported). The matching
//! is a typed configuration model: each super-cell exposes deg(M) stubs whose
//! radius-(r+1) edge-ball types pair consistently, so local defects come only
//! from short-circuiting cycles, whose frequency shrinks with graph size. The
//! driver scales N geometrically until the measured census TV meets epsilon.

use crate::census::{ball_census, tv_distance, CensusError, CensusReport};
use crate::graphio::GraphFile;
use crate::labeling::{choose_label_count, non_separated_mass, LabelError};
use crate::measure::{MarginalTable, MeasureError};
use crate::ratio::{fmt_ratio, int, Ratio};
use crate::validate::ValidateError;
use crate::weights::{
    build_h, build_h_faithful, rationalize, reduce_denominators, required_scale, HGraph,
    WeightError, WeightSystem,
};
use num::{BigInt, One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 0x5eed_ba11;
pub const DEFAULT_MAX_SCALE: u64 = 2_000_000;
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("epsilon must lie strictly between 0 and 1")]
    BadEpsilon,
    #[error("faithful mode needs an explicit label count (choose a small n)")]
    MissingLabelCount,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Validate(#[from] ValidateError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("target TV {epsilon} not reached within scale cap {cap}: needs N = {required}, best TV so far {best_tv}")]
    MaxScaleExceeded {
        epsilon: String,
        cap: u64,
        required: String,
        best_tv: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// Work with unlabeled ball classes (production default).
    Quotient,
    /// Refine all classes by {1..n} vertex labels (enumerated, small n).
    Faithful { n: u64 },
}

impl SynthMode {
    pub fn name(&self) -> &'static str {
        match self {
            SynthMode::Quotient => "quotient",
            SynthMode::Faithful { .. } => "faithful",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCaps {
    pub max_scale: u64,
    pub max_denominator: u64,
    pub enumeration_cap: u128,
    pub census_workers: usize,
    pub census_ball_cap: usize,
    /// Validation tolerance for the input table (0 for the exact pipeline).
    pub tolerance: Ratio,
}

impl Default for SynthCaps {
    fn default() -> Self {
        SynthCaps {
            max_scale: DEFAULT_MAX_SCALE,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            enumeration_cap: crate::labeling::DEFAULT_ENUMERATION_CAP,
            census_workers: std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1),
            census_ball_cap: crate::census::DEFAULT_BALL_CAP,
            tolerance: Ratio::zero(),
        }
    }
}

/// Element layout: one contiguous range per H-vertex, partitioned into
/// contiguous sub-ranges per outgoing edge class.
#[derive(Debug, Clone)]
pub struct CellStructure {
    pub n_scale: u64,
    /// (start, size) per H-vertex.
    pub cells: Vec<(u64, u64)>,
    /// (start, size) per H-edge, inside the source vertex's cell.
    pub subcells: Vec<(u64, u64)>,
    pub total_elements: u64,
    /// First super-cell id per group.
    pub supercell_base: Vec<u64>,
    /// Super-cell count per group (s_M = N * mass(M)).
    pub supercells_per_group: Vec<u64>,
    /// Matched super-cell total, excluding isolated vertices.
    pub matched_supercells: u64,
    pub isolated_vertices: u64,
}

fn ratio_times_u64(r: &Ratio, n: u64) -> u64 {
    let v = r * int(n as i64);
    assert!(v.is_integer(), "scale guarantees integrality");
    v.to_integer().to_u64().expect("desk-scale cardinality")
}

/// Step 1: exact cell and sub-cell cardinalities with deterministic layout
/// (cells in H-vertex order, sub-cells in H-edge order within each cell).
pub fn step1_cells(h: &HGraph, ws: &WeightSystem, n_scale: u64) -> Result<CellStructure, SynthError> {
    let mut cells = vec![(0u64, 0u64); h.vertices.len()];
    let mut subcells = vec![(0u64, 0u64); h.edges.len()];
    let mut cursor = 0u64;
    for (vi, v) in h.vertices.iter().enumerate() {
        let size = ratio_times_u64(&ws.vertex_weights[vi], n_scale);
        cells[vi] = (cursor, size);
        let mut inner = cursor;
        for &e in &v.out_edges {
            let esize = ratio_times_u64(&ws.edge_weights[e], n_scale);
            subcells[e] = (inner, esize);
            inner += esize;
            if h.edges[e].inv == e && esize % 2 != 0 {
                return Err(SynthError::Weight(WeightError::OddLoopCell {
                    token: h.edges[e].token.clone(),
                    size: esize,
                }));
            }
        }
        assert_eq!(inner, cursor + size, "(d2): sub-cells partition the cell");
        cursor += size;
    }
    // Paired sub-cells agree in size ((d1)).
    for (e, edge) in h.edges.iter().enumerate() {
        assert_eq!(subcells[e].1, subcells[edge.inv].1);
    }
    let mut supercell_base = Vec::with_capacity(h.groups.len());
    let mut supercells_per_group = Vec::with_capacity(h.groups.len());
    let mut sc_cursor = 0u64;
    for (gi, g) in h.groups.iter().enumerate() {
        let s_m = ratio_times_u64(&ws.group_value(h, gi), n_scale);
        // Each member cell splits into s_M runs of l_A elements.
        for &m in &g.members {
            assert_eq!(
                cells[m].1,
                s_m * h.vertices[m].multiplicity as u64,
                "cell size = l_A * s_M"
            );
        }
        supercell_base.push(sc_cursor);
        supercells_per_group.push(s_m);
        sc_cursor += s_m;
        let _ = g;
    }
    let isolated = ratio_times_u64(&ws.isolated, n_scale);
    Ok(CellStructure {
        n_scale,
        cells,
        subcells,
        total_elements: cursor,
        supercell_base,
        supercells_per_group,
        matched_supercells: sc_cursor,
        isolated_vertices: isolated,
    })
}

/// Step 2: seeded-uniform bijections between paired sub-cells; a seeded
/// fixed-point-free involution on each self-paired loop sub-cell. Every
/// element is matched exactly once.
pub fn step2_match(h: &HGraph, cells: &CellStructure, rng: &mut ChaCha12Rng) -> Vec<(u64, u64)> {
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(cells.total_elements as usize / 2);
    for (ei, edge) in h.edges.iter().enumerate() {
        if edge.inv < ei {
            continue;
        }
        let (astart, asize) = cells.subcells[ei];
        if edge.inv == ei {
            // Uniform perfect matching: shuffle and pair consecutive.
            let mut elems: Vec<u64> = (astart..astart + asize).collect();
            elems.shuffle(rng);
            for c in elems.chunks_exact(2) {
                pairs.push((c[0], c[1]));
            }
        } else {
            let (bstart, bsize) = cells.subcells[edge.inv];
            debug_assert_eq!(asize, bsize);
            let mut targets: Vec<u64> = (bstart..bstart + bsize).collect();
            targets.shuffle(rng);
            for (i, &t) in targets.iter().enumerate() {
                pairs.push((astart + i as u64, t));
            }
        }
    }
    pairs
}

/// The synthesized graph plus construction diagnostics.
#[derive(Debug, Clone)]
pub struct SyntheticGraph {
    pub adj: Vec<Vec<u32>>,
    /// Group index each matched super-cell was built for.
    pub intended_group: Vec<u32>,
    pub isolated_vertices: u64,
    /// Matched pairs that landed inside one super-cell (skipped self-loops).
    pub self_pair_skips: u64,
    /// Distinct super-cell pairs joined by more than one matched pair.
    pub collapsed_multiedges: u64,
}

impl SyntheticGraph {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Step 3: quotient the matched structure into the final simple graph.
pub fn step3_quotient(
    h: &HGraph,
    cells: &CellStructure,
    pairs: &[(u64, u64)],
) -> SyntheticGraph {
    let total_vertices = cells.matched_supercells + cells.isolated_vertices;
    // Map every element to its super-cell: within the cell of vertex A
    // (group M), positions split into runs of length l_A.
    let mut supercell_of = vec![u32::MAX; cells.total_elements as usize];
    let mut intended_group: Vec<u32> = vec![u32::MAX; cells.matched_supercells as usize];
    for (vi, v) in h.vertices.iter().enumerate() {
        let (start, size) = cells.cells[vi];
        let l = h.vertices[vi].multiplicity as u64;
        let base = cells.supercell_base[v.group];
        for p in 0..size {
            let sc = base + p / l;
            supercell_of[(start + p) as usize] = sc as u32;
            intended_group[sc as usize] = v.group as u32;
        }
    }
    let mut edges: std::collections::BTreeSet<(u32, u32)> = Default::default();
    let mut self_pair_skips = 0u64;
    let mut collapsed = 0u64;
    for &(x, y) in pairs {
        let a = supercell_of[x as usize];
        let b = supercell_of[y as usize];
        if a == b {
            self_pair_skips += 1;
            continue;
        }
        if !edges.insert((a.min(b), a.max(b))) {
            collapsed += 1;
        }
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); total_vertices as usize];
    for (a, b) in edges {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
    }
    // Degrees never exceed the intended root degree.
    for (sc, g) in intended_group.iter().enumerate() {
        debug_assert!(adj[sc].len() as u32 <= h.groups[*g as usize].degree);
    }
    SyntheticGraph {
        adj,
        intended_group,
        isolated_vertices: cells.isolated_vertices,
        self_pair_skips,
        collapsed_multiedges: collapsed,
    }
}

/// Everything the pipeline decided and measured, printable as `key value`
/// lines.
#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub d: u32,
    pub r: u32,
    pub epsilon: Ratio,
    pub mode: String,
    pub seed: u64,
    pub table_digest: String,
    /// Label budget for the (becs1)-style split: the n that keeps the
    /// non-separated mass under epsilon/10, and that mass.
    pub label_count: u64,
    pub label_slack: Ratio,
    pub delta: Ratio,
    pub delta_budget: Ratio,
    pub h_vertices: usize,
    pub h_edges: usize,
    pub h_groups: usize,
    pub scale_min: u64,
    pub scale: u64,
    pub attempts: u32,
    pub elements: u64,
    pub vertices: u64,
    pub edges: u64,
    pub isolated_vertices: u64,
    pub self_pair_skips: u64,
    pub collapsed_multiedges: u64,
    pub tv: Ratio,
    pub max_dev: Ratio,
    pub tree_ball_fraction: Ratio,
}

impl SynthesisReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} {v}\n"));
        kv("d", self.d.to_string());
        kv("r", self.r.to_string());
        kv("epsilon", fmt_ratio(&self.epsilon));
        kv("mode", self.mode.clone());
        kv("seed", self.seed.to_string());
        kv("table-digest", self.table_digest.clone());
        kv("label-count", self.label_count.to_string());
        kv("label-slack", fmt_ratio(&self.label_slack));
        kv("delta", fmt_ratio(&self.delta));
        kv("delta-budget", fmt_ratio(&self.delta_budget));
        kv("h-vertices", self.h_vertices.to_string());
        kv("h-edges", self.h_edges.to_string());
        kv("h-groups", self.h_groups.to_string());
        kv("scale-min", self.scale_min.to_string());
        kv("scale", self.scale.to_string());
        kv("attempts", self.attempts.to_string());
        kv("elements", self.elements.to_string());
        kv("vertices", self.vertices.to_string());
        kv("edges", self.edges.to_string());
        kv("isolated-vertices", self.isolated_vertices.to_string());
        kv("self-pair-skips", self.self_pair_skips.to_string());
        kv("collapsed-multiedges", self.collapsed_multiedges.to_string());
        kv("tv", fmt_ratio(&self.tv));
        kv("max-dev", fmt_ratio(&self.max_dev));
        kv("tree-ball-fraction", fmt_ratio(&self.tree_ball_fraction));
        s
    }
}

fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    // splitmix64 step keyed by the attempt index.
    let mut z = seed ^ (attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Initial vertex-count target: enough room that short-circuiting cycles at
/// radius r damage well under an epsilon fraction of vertices.
fn initial_target(d: u32, r: u32, epsilon: &Ratio) -> u64 {
    let balls = (d as u64).saturating_pow(2 * (r + 1));
    let inv_eps = (Ratio::one() / epsilon)
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX);
    balls.saturating_mul(inv_eps).clamp(1_000, 1 << 40)
}

/// End-to-end synthesis: build H, balance weights, choose the scale, run
/// steps 1-3, and grow the graph geometrically until the measured radius-r
/// census TV is at most epsilon. Deterministic in (table, r, epsilon, mode,
/// seed, caps).
pub fn synthesize(
    table: &MarginalTable,
    r: u32,
    epsilon: &Ratio,
    mode: SynthMode,
    seed: u64,
    caps: &SynthCaps,
) -> Result<(SyntheticGraph, SynthesisReport), SynthError> {
    if epsilon <= &Ratio::zero() || epsilon >= &Ratio::one() {
        return Err(SynthError::BadEpsilon);
    }
    let d = table.degree_bound();
    let becs1_budget = epsilon / int(10);
    let h = match mode {
        SynthMode::Quotient => build_h(table, r, &caps.tolerance)?,
        SynthMode::Faithful { n } => {
            build_h_faithful(table, r, n, caps.enumeration_cap, &caps.tolerance)?
        }
    };
    // Label budget: chosen for the report in quotient mode (the quotient
    // carries the non-separated mass implicitly and the census verifies the
    // result); the given n's slack in faithful mode.
    let (label_count, label_slack) = match mode {
        SynthMode::Quotient => {
            let b = choose_label_count(table, r + 1, &becs1_budget);
            (b.n, b.slack)
        }
        SynthMode::Faithful { n } => (n, non_separated_mass(table, r + 1, n)),
    };
    // Perturbation budget: a delta shift moves at most d * (radius-r class
    // count) of census mass.
    let class_count = table.level(r).len().max(1);
    let delta_budget = epsilon / int(10) / int(d as i64) / int(class_count as i64);
    let target = initial_target(d, r, epsilon);

    // Plan: minimal N for a weight system, and the multiplier reaching the
    // size target, if both fit under the cap.
    let plan = |ws: &WeightSystem| -> Option<(u64, u64)> {
        let required = required_scale(&h, ws);
        if required > BigInt::from(caps.max_scale) {
            return None;
        }
        let scale_min: u64 = required.to_string().parse().ok()?;
        let multiplier = target.div_ceil(scale_min).max(1);
        if scale_min.checked_mul(multiplier)? > caps.max_scale {
            return None;
        }
        Some((scale_min, multiplier))
    };

    let ws_exact = rationalize(&h, caps.max_denominator, Some(&delta_budget))?;
    let exact_required = required_scale(&h, &ws_exact).to_string();
    let (ws, scale_min, mut multiplier) = match plan(&ws_exact) {
        Some((s, m)) => (ws_exact, s, m),
        None => {
            // Exact weights need a scale beyond the cap: move them to a
            // coarser denominator grid on the balance manifold. Among grids
            // whose delta stays within the budget, take the plan with the
            // smallest resulting graph (ties to the finer grid).
            let mut found: Option<(WeightSystem, u64, u64)> = None;
            let mut grid = 1u64 << 20;
            while grid >= 16 {
                if let Ok(ws) = reduce_denominators(&h, grid, Some(&delta_budget)) {
                    if let Some((s, m)) = plan(&ws) {
                        let better = found
                            .as_ref()
                            .map(|(_, bs, bm)| s.saturating_mul(m) < bs.saturating_mul(*bm))
                            .unwrap_or(true);
                        if better {
                            found = Some((ws, s, m));
                        }
                    }
                }
                grid /= 4;
            }
            found.ok_or_else(|| SynthError::MaxScaleExceeded {
                epsilon: fmt_ratio(epsilon),
                cap: caps.max_scale,
                required: exact_required.clone(),
                best_tv: "-".into(),
            })?
        }
    };

    let mut attempts = 0u32;
    let mut best_tv: Option<Ratio> = None;
    loop {
        let n_scale = scale_min.saturating_mul(multiplier);
        if n_scale > caps.max_scale {
            return Err(SynthError::MaxScaleExceeded {
                epsilon: fmt_ratio(epsilon),
                cap: caps.max_scale,
                required: n_scale.to_string(),
                best_tv: best_tv.map(|t| fmt_ratio(&t)).unwrap_or_else(|| "-".into()),
            });
        }
        let cells = step1_cells(&h, &ws, n_scale)?;
        let mut rng = ChaCha12Rng::seed_from_u64(attempt_seed(seed, attempts));
        let pairs = step2_match(&h, &cells, &mut rng);
        let graph = step3_quotient(&h, &cells, &pairs);
        let report = ball_census(&graph.adj, r, d, caps.census_workers, caps.census_ball_cap)?;
        let tvr = tv_distance(&report, table)?;
        let better = best_tv.as_ref().map(|b| tvr.tv < *b).unwrap_or(true);
        if better {
            best_tv = Some(tvr.tv.clone());
        }
        attempts += 1;
        if tvr.tv <= *epsilon {
            let synth_report = SynthesisReport {
                d,
                r,
                epsilon: epsilon.clone(),
                mode: mode.name().into(),
                seed,
                table_digest: table.digest(),
                label_count,
                label_slack,
                delta: ws.delta.clone(),
                delta_budget,
                h_vertices: h.vertices.len(),
                h_edges: h.edges.len(),
                h_groups: h.groups.len(),
                scale_min,
                scale: n_scale,
                attempts,
                elements: cells.total_elements,
                vertices: graph.n() as u64,
                edges: graph.edge_count() as u64,
                isolated_vertices: graph.isolated_vertices,
                self_pair_skips: graph.self_pair_skips,
                collapsed_multiedges: graph.collapsed_multiedges,
                tv: tvr.tv,
                max_dev: tvr.max_dev,
                tree_ball_fraction: census_tree_fraction(&report),
            };
            return Ok((graph, synth_report));
        }
        multiplier = multiplier.saturating_mul(2);
    }
}

fn census_tree_fraction(rep: &CensusReport) -> Ratio {
    rep.tree_ball_fraction()
}

/// Serialize with provenance comments; byte-identical for equal inputs.
pub fn graph_file(graph: &SyntheticGraph, report: &SynthesisReport) -> GraphFile {
    let mut meta = BTreeMap::new();
    meta.insert("d".into(), report.d.to_string());
    meta.insert("r".into(), report.r.to_string());
    meta.insert("epsilon".into(), fmt_ratio(&report.epsilon));
    meta.insert("mode".into(), report.mode.clone());
    meta.insert("scale".into(), report.scale.to_string());
    meta.insert("delta".into(), fmt_ratio(&report.delta));
    meta.insert("seed".into(), report.seed.to_string());
    meta.insert("table-digest".into(), report.table_digest.clone());
    GraphFile {
        adj: graph.adj.clone(),
        meta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RootedGraph;
    use crate::measure::{marginals_atom, marginals_regular, mixture};
    use crate::ratio::frac;

    fn caps() -> SynthCaps {
        SynthCaps {
            census_workers: 2,
            ..SynthCaps::default()
        }
    }

    #[test]
    fn step1_regular3() {
        // One vertex (l = 3, w = 3), one loop (w = 3); at N = 6 the cell has
        // 18 elements in one sub-cell, split into 6 super-cells of 3.
        let t = marginals_regular(3, 3);
        let h = build_h(&t, 1, &Ratio::zero()).unwrap();
        let ws = h.exact_weights();
        let cells = step1_cells(&h, &ws, 6).unwrap();
        assert_eq!(cells.cells, vec![(0, 18)]);
        assert_eq!(cells.subcells, vec![(0, 18)]);
        assert_eq!(cells.supercells_per_group, vec![6]);
        assert_eq!(cells.total_elements, 18);
        assert_eq!(cells.isolated_vertices, 0);
    }

    #[test]
    fn step1_odd_loop_rejected() {
        // Forcing an odd N * w on a self-paired loop must error rather than
        // silently produce a broken matching.
        let t = marginals_regular(3, 3);
        let h = build_h(&t, 1, &Ratio::zero()).unwrap();
        let ws = h.exact_weights();
        // N = 3 gives loop sub-cell 9 (odd) and is also not even; step1
        // reports the odd loop cell.
        assert!(matches!(
            step1_cells(&h, &ws, 3),
            Err(SynthError::Weight(WeightError::OddLoopCell { .. }))
        ));
    }

    #[test]
    fn step2_matches_each_element_once() {
        let t = marginals_regular(3, 3);
        let h = build_h(&t, 1, &Ratio::zero()).unwrap();
        let ws = h.exact_weights();
        let cells = step1_cells(&h, &ws, 10).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let pairs = step2_match(&h, &cells, &mut rng);
        let mut seen = vec![false; cells.total_elements as usize];
        for (a, b) in &pairs {
            for x in [a, b] {
                assert!(!seen[*x as usize], "element matched twice");
                seen[*x as usize] = true;
            }
            assert_ne!(a, b, "fixed-point-free");
        }
        assert!(seen.iter().all(|&s| s), "every element matched");
    }

    #[test]
    fn loop_matching_uniform_over_seeds() {
        // A self-paired loop cell of size 4 has exactly 3 perfect matchings;
        // over many seeds each should appear roughly 1/3 of the time.
        let t = marginals_atom(&RootedGraph::path(2), 2, 2).unwrap();
        let h = build_h(&t, 0, &Ratio::zero()).unwrap();
        let ws = h.exact_weights();
        let cells = step1_cells(&h, &ws, 4).unwrap();
        assert_eq!(cells.total_elements, 4);
        let mut freq: BTreeMap<Vec<(u64, u64)>, u64> = BTreeMap::new();
        let trials = 10_000u64;
        for s in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(s);
            let mut pairs = step2_match(&h, &cells, &mut rng);
            for p in &mut pairs {
                *p = (p.0.min(p.1), p.0.max(p.1));
            }
            pairs.sort_unstable();
            *freq.entry(pairs).or_insert(0) += 1;
        }
        assert_eq!(freq.len(), 3);
        // Exact count of fixed-point-free involutions on 4 points is 3; with
        // 10^4 draws each matching lies within 5 sigma of 1/3.
        let expected = trials as f64 / 3.0;
        let sigma = (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for (_, c) in freq {
            assert!(
                (c as f64 - expected).abs() < 5.0 * sigma,
                "matching frequency {c} vs expected {expected}"
            );
        }
    }

    #[test]
    fn atom_k2_r0_is_perfect_matching() {
        let t = marginals_atom(&RootedGraph::path(2), 2, 2).unwrap();
        let (g, rep) = synthesize(
            &t,
            0,
            &frac(1, 20),
            SynthMode::Quotient,
            DEFAULT_SEED,
            &caps(),
        )
        .unwrap();
        assert!(g.adj.iter().all(|nbrs| nbrs.len() == 1), "perfect matching");
        assert!(rep.tv.is_zero());
        assert_eq!(rep.collapsed_multiedges, 0);
        assert_eq!(rep.self_pair_skips, 0);
        assert_eq!(g.n() as u64, rep.scale);
    }

    #[test]
    fn regular2_r1_gives_cycles() {
        let t = marginals_regular(2, 3);
        let (g, rep) = synthesize(
            &t,
            1,
            &frac(1, 20),
            SynthMode::Quotient,
            DEFAULT_SEED,
            &caps(),
        )
        .unwrap();
        // All degrees 2 except where collapses removed edges.
        assert!(g.adj.iter().all(|nbrs| nbrs.len() <= 2));
        assert!(rep.tv <= frac(1, 20));
        let two = g.adj.iter().filter(|n| n.len() == 2).count();
        assert!(two as f64 >= 0.9 * g.n() as f64);
        // Disjoint union of cycles: every component with all degrees 2.
        assert_eq!(crate::census::girth(&g.adj).is_some(), true);
    }

    #[test]
    fn isolated_mass_materializes() {
        let k2 = marginals_atom(&RootedGraph::path(2), 2, 2).unwrap();
        let k1 = marginals_atom(&RootedGraph::new(1, 0), 2, 2).unwrap();
        let t = mixture(&[(k2, frac(1, 2)), (k1, frac(1, 2))]).unwrap();
        let (g, rep) = synthesize(
            &t,
            0,
            &frac(1, 20),
            SynthMode::Quotient,
            DEFAULT_SEED,
            &caps(),
        )
        .unwrap();
        assert!(rep.tv.is_zero());
        let isolated = g.adj.iter().filter(|n| n.is_empty()).count() as u64;
        assert_eq!(isolated, rep.isolated_vertices);
        assert_eq!(isolated * 2, g.n() as u64);
    }

    #[test]
    fn deterministic_given_seed() {
        let t = marginals_regular(3, 3);
        let run = || {
            let (g, rep) = synthesize(
                &t,
                1,
                &frac(1, 20),
                SynthMode::Quotient,
                1234,
                &caps(),
            )
            .unwrap();
            graph_file(&g, &rep).to_text()
        };
        assert_eq!(run(), run());
        // A different seed gives a different matching (overwhelmingly).
        let (g2, rep2) = synthesize(
            &t,
            1,
            &frac(1, 20),
            SynthMode::Quotient,
            9999,
            &caps(),
        )
        .unwrap();
        assert_ne!(graph_file(&g2, &rep2).to_text(), run());
    }

    #[test]
    fn scale_multiples_preserve_distribution_ratios() {
        // Doubling N doubles every cell, sub-cell, and super-cell count.
        let t = marginals_regular(3, 3);
        let h = build_h(&t, 1, &Ratio::zero()).unwrap();
        let ws = h.exact_weights();
        let a = step1_cells(&h, &ws, 10).unwrap();
        let b = step1_cells(&h, &ws, 20).unwrap();
        for (x, y) in a.cells.iter().zip(&b.cells) {
            assert_eq!(2 * x.1, y.1);
        }
        for (x, y) in a.supercells_per_group.iter().zip(&b.supercells_per_group) {
            assert_eq!(2 * x, *y);
        }
    }

    #[test]
    fn rejects_bad_epsilon() {
        let t = marginals_regular(2, 3);
        for eps in [int(0), int(1), int(2)] {
            assert!(matches!(
                synthesize(&t, 1, &eps, SynthMode::Quotient, 1, &caps()),
                Err(SynthError::BadEpsilon)
            ));
        }
    }
}
