//! Finite-depth marginal tables of tree measures, their generators, and the
//! table file format.
//!
//! A [`MarginalTable`] holds, for every radius `r <= depth`, an exact
//! rational probability for each tree ball of radius `r`. Probabilities sum
//! to one per level, the support consists of tree balls only, and each level
//! is the truncation-projection of the next. Whether the table is consistent
//! with involution invariance is a separate question answered by
//! [`crate::validate`].

use crate::ball::{BallCode, BallError};
use crate::graph::RootedGraph;
use crate::ratio::{fmt_ratio, int, Ratio};
use num::{BigInt, One, Signed, Zero};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Guard for support enumeration in generators.
pub const DEFAULT_SUPPORT_CAP: usize = 200_000;

pub const TABLE_FORMAT_HEADER: &str = "locallim-marginals v1";

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("degree distribution has zero mean")]
    ZeroMeanDegree,
    #[error("atom graph is not a tree")]
    NotATree,
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: usize, bound: u32 },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invariant violation ({what}) at depth {depth}, ball {token}: {detail}")]
    InvariantViolation {
        what: &'static str,
        depth: u32,
        token: String,
        detail: String,
    },
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Depth-indexed map from ball codes to exact rational probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalTable {
    d: u32,
    levels: Vec<BTreeMap<BallCode, Ratio>>,
}

impl MarginalTable {
    /// Build from raw per-level maps, verifying every table invariant:
    /// support on tree balls with matching embedded parameters, exact
    /// sum-to-one per level, and depth-consistency under truncation.
    /// Zero-probability entries are dropped.
    pub fn from_levels(
        d: u32,
        levels: Vec<BTreeMap<BallCode, Ratio>>,
    ) -> Result<Self, MeasureError> {
        if levels.is_empty() {
            return Err(MeasureError::ParameterMismatch(
                "table must have at least depth 0".into(),
            ));
        }
        let mut clean: Vec<BTreeMap<BallCode, Ratio>> = Vec::with_capacity(levels.len());
        for (r, level) in levels.into_iter().enumerate() {
            let r32 = r as u32;
            let mut sum = Ratio::zero();
            let mut kept: BTreeMap<BallCode, Ratio> = BTreeMap::new();
            for (ball, p) in level {
                let viol = |what: &'static str, detail: String| MeasureError::InvariantViolation {
                    what,
                    depth: r32,
                    token: ball.token(),
                    detail,
                };
                if p.is_negative() {
                    return Err(viol("nonnegative", format!("probability {}", fmt_ratio(&p))));
                }
                if !ball.is_tree() {
                    return Err(viol("support", "non-tree ball in support".into()));
                }
                if ball.degree_bound() != d {
                    return Err(viol(
                        "degree-bound",
                        format!("ball embeds d = {}, table has d = {}", ball.degree_bound(), d),
                    ));
                }
                if ball.radius() != r32 {
                    return Err(viol(
                        "radius",
                        format!("ball embeds r = {}, level is {}", ball.radius(), r32),
                    ));
                }
                sum += &p;
                if !p.is_zero() {
                    kept.insert(ball, p);
                }
            }
            if !sum.is_one() {
                return Err(MeasureError::InvariantViolation {
                    what: "sum-to-one",
                    depth: r32,
                    token: "-".into(),
                    detail: format!("level sums to {}", fmt_ratio(&sum)),
                });
            }
            clean.push(kept);
        }
        // Depth-consistency: each level equals the truncation-projection of
        // the next one.
        for r in 0..clean.len() - 1 {
            let mut projected: BTreeMap<BallCode, Ratio> = BTreeMap::new();
            for (ball, p) in &clean[r + 1] {
                let t = ball.truncate(r as u32)?;
                *projected.entry(t).or_insert_with(Ratio::zero) += p;
            }
            if projected != clean[r] {
                let keys: std::collections::BTreeSet<_> =
                    projected.keys().chain(clean[r].keys()).cloned().collect();
                for k in keys {
                    let lhs = clean[r].get(&k).cloned().unwrap_or_else(Ratio::zero);
                    let rhs = projected.get(&k).cloned().unwrap_or_else(Ratio::zero);
                    if lhs != rhs {
                        return Err(MeasureError::InvariantViolation {
                            what: "depth-consistency",
                            depth: r as u32,
                            token: k.token(),
                            detail: format!(
                                "level mass {} vs projected {}",
                                fmt_ratio(&lhs),
                                fmt_ratio(&rhs)
                            ),
                        });
                    }
                }
                unreachable!("maps differ");
            }
        }
        Ok(MarginalTable { d, levels: clean })
    }

    pub fn degree_bound(&self) -> u32 {
        self.d
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// Support and probabilities at radius `r`.
    pub fn level(&self, r: u32) -> &BTreeMap<BallCode, Ratio> {
        &self.levels[r as usize]
    }

    pub fn prob(&self, ball: &BallCode) -> Ratio {
        self.levels
            .get(ball.radius() as usize)
            .and_then(|l| l.get(ball))
            .cloned()
            .unwrap_or_else(Ratio::zero)
    }

    /// Expected root degree read from level `r` (the same for every r >= 1
    /// by depth-consistency).
    pub fn expected_degree(&self, r: u32) -> Ratio {
        self.level(r)
            .iter()
            .map(|(b, p)| int(b.root_degree() as i64) * p)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(TABLE_FORMAT_HEADER);
        out.push('\n');
        out.push_str(&format!("d {}\n", self.d));
        out.push_str(&format!("depth {}\n", self.depth()));
        for (r, level) in self.levels.iter().enumerate() {
            out.push_str(&format!("level {r}\n"));
            for (ball, p) in level {
                out.push_str(&format!("{} {} {}\n", ball.token(), p.numer(), p.denom()));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, MeasureError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let perr = |line: usize, msg: String| MeasureError::Parse { line: line + 1, msg };
        let (ln, header) = lines
            .next()
            .ok_or_else(|| perr(0, "empty table file".into()))?;
        if header.trim() != TABLE_FORMAT_HEADER {
            return Err(perr(ln, format!("expected header `{TABLE_FORMAT_HEADER}`")));
        }
        let mut expect_kv = |key: &str| -> Result<u64, MeasureError> {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| perr(0, format!("missing `{key}` line")))?;
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(k), Some(v), None) if k == key => v
                    .parse::<u64>()
                    .map_err(|_| perr(ln, format!("bad `{key}` value `{v}`"))),
                _ => Err(perr(ln, format!("expected `{key} <int>`"))),
            }
        };
        let d = expect_kv("d")?;
        if d == 0 || d > 1 << 16 {
            return Err(perr(1, format!("degree bound {d} out of range")));
        }
        let depth = expect_kv("depth")?;
        if depth > 64 {
            return Err(perr(2, format!("depth {depth} out of range")));
        }
        let mut levels: Vec<BTreeMap<BallCode, Ratio>> = Vec::new();
        let mut current: Option<(u64, BTreeMap<BallCode, Ratio>)> = None;
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let first = it.next().expect("nonempty line");
            if first == "level" {
                let r: u64 = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(ln, "expected `level <r>`".into()))?;
                if it.next().is_some() {
                    return Err(perr(ln, "trailing tokens after level header".into()));
                }
                if let Some((pr, map)) = current.take() {
                    if pr + 1 != r {
                        return Err(perr(ln, format!("level {r} out of order")));
                    }
                    levels.push(map);
                } else if r != 0 {
                    return Err(perr(ln, "levels must start at 0".into()));
                }
                current = Some((r, BTreeMap::new()));
                continue;
            }
            let (_, map) = current
                .as_mut()
                .ok_or_else(|| perr(ln, "entry before first level header".into()))?;
            let num = it.next().ok_or_else(|| perr(ln, "missing numerator".into()))?;
            let den = it
                .next()
                .ok_or_else(|| perr(ln, "missing denominator".into()))?;
            if it.next().is_some() {
                return Err(perr(ln, "trailing tokens after entry".into()));
            }
            let ball = BallCode::parse_token(first)
                .map_err(|e| perr(ln, format!("bad ball token: {e}")))?;
            let num: BigInt = num
                .parse()
                .map_err(|_| perr(ln, format!("bad numerator `{num}`")))?;
            let den: BigInt = den
                .parse()
                .map_err(|_| perr(ln, format!("bad denominator `{den}`")))?;
            if den.is_zero() {
                return Err(perr(ln, "zero denominator".into()));
            }
            if map.insert(ball, Ratio::new(num, den)).is_some() {
                return Err(perr(ln, format!("duplicate ball token `{first}`")));
            }
        }
        if let Some((_, map)) = current.take() {
            levels.push(map);
        }
        if levels.len() as u64 != depth + 1 {
            return Err(MeasureError::Parse {
                line: 0,
                msg: format!("expected {} levels, found {}", depth + 1, levels.len()),
            });
        }
        MarginalTable::from_levels(d as u32, levels)
    }

    pub fn save(&self, path: &Path) -> Result<(), MeasureError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, MeasureError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Short hex digest of the canonical serialization, recorded in
    /// synthesis provenance.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// The ball of radius `r` around any vertex of the `d`-regular tree.
fn regular_ball(d: u32, r: u32) -> RootedGraph {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut frontier = vec![0u32];
    let mut next = 1u32;
    for depth in 0..r {
        let mut nf = Vec::new();
        for &v in &frontier {
            let children = if depth == 0 { d } else { d - 1 };
            for _ in 0..children {
                edges.push((v, next));
                nf.push(next);
                next += 1;
            }
        }
        frontier = nf;
    }
    RootedGraph::from_edges(next as usize, 0, &edges).unwrap()
}

/// Point mass on the `d`-regular tree ball at every depth.
pub fn marginals_regular(d: u32, depth: u32) -> MarginalTable {
    assert!(d >= 1);
    let levels = (0..=depth)
        .map(|r| {
            let ball = crate::ball::canonicalize(&regular_ball(d, r), d, r)
                .expect("regular ball within bounds");
            let mut m = BTreeMap::new();
            m.insert(ball, Ratio::one());
            m
        })
        .collect();
    MarginalTable::from_levels(d, levels).expect("regular table is consistent")
}

/// All tree shapes one level up: a new top vertex draws its child count from
/// `law` and attaches a multiset of shapes from `child_shapes` (which must be
/// sorted by payload). Probabilities carry the multiset multinomial.
fn branching_shapes(
    law: &BTreeMap<u32, Ratio>,
    child_shapes: &[(Vec<u64>, Ratio)],
    cap: usize,
) -> Result<Vec<(Vec<u64>, Ratio)>, MeasureError> {
    let mut out: Vec<(Vec<u64>, Ratio)> = Vec::new();
    for (&k, pk) in law {
        if pk.is_zero() {
            continue;
        }
        let k = k as usize;
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        fn rec(
            child_shapes: &[(Vec<u64>, Ratio)],
            pk: &Ratio,
            k: usize,
            start: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<(Vec<u64>, Ratio)>,
            cap: usize,
        ) -> Result<(), MeasureError> {
            if chosen.len() == k {
                let mut payload = vec![k as u64, 0];
                let mut prob = pk.clone();
                // k! / prod(m_i!) over repetition runs, times child probs.
                let mut mult = Ratio::one();
                for i in 1..=k {
                    mult *= int(i as i64);
                }
                let mut run = 0u64;
                for w in 0..chosen.len() {
                    if w > 0 && chosen[w] == chosen[w - 1] {
                        run += 1;
                    } else {
                        run = 1;
                    }
                    mult /= int(run as i64);
                }
                for &ci in chosen.iter() {
                    payload.extend(child_shapes[ci].0.iter());
                    prob *= &child_shapes[ci].1;
                }
                out.push((payload, prob * mult));
                if out.len() > cap {
                    return Err(MeasureError::Ball(BallError::ExplosionGuard { cap }));
                }
                return Ok(());
            }
            for i in start..child_shapes.len() {
                chosen.push(i);
                rec(child_shapes, pk, k, i, chosen, out, cap)?;
                chosen.pop();
            }
            Ok(())
        }
        rec(child_shapes, pk, k, 0, &mut chosen, &mut out, cap)?;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Marginals of a branching tree: root child count from `root_law`, deeper
/// child counts from `offspring_law`. With the size-biased offspring law this
/// is the unimodular Galton-Watson family; with other laws it produces
/// (generally non-unimodular) Galton-Watson marginals, which the validator
/// rejects.
pub fn marginals_branching(
    root_law: &BTreeMap<u32, Ratio>,
    offspring_law: &BTreeMap<u32, Ratio>,
    d: u32,
    depth: u32,
    cap: usize,
) -> Result<MarginalTable, MeasureError> {
    for (law, max_children, name) in [
        (root_law, d, "root law"),
        (offspring_law, d.saturating_sub(1), "offspring law"),
    ] {
        let sum: Ratio = law.values().sum();
        if !sum.is_one() {
            return Err(MeasureError::ParameterMismatch(format!(
                "{name} sums to {}",
                fmt_ratio(&sum)
            )));
        }
        if law.values().any(|p| p.is_negative()) {
            return Err(MeasureError::ParameterMismatch(format!(
                "{name} has negative mass"
            )));
        }
        for (&k, p) in law {
            if !p.is_zero() && k > max_children {
                return Err(MeasureError::DegreeExceeded {
                    degree: if max_children == d { k as usize } else { k as usize + 1 },
                    bound: d,
                });
            }
        }
    }
    let mut levels = Vec::with_capacity(depth as usize + 1);
    for r in 0..=depth {
        let mut shapes: Vec<(Vec<u64>, Ratio)> = vec![(vec![0, 0], Ratio::one())];
        for _ in 0..r.saturating_sub(1) {
            shapes = branching_shapes(offspring_law, &shapes, cap)?;
        }
        let roots = if r == 0 {
            shapes
        } else {
            branching_shapes(root_law, &shapes, cap)?
        };
        let mut level = BTreeMap::new();
        for (payload, prob) in roots {
            let mut code = vec![d as u64, r as u64, 0u64];
            code.extend(payload);
            let ball = BallCode::parse_token(&crate::ball::fmt_token(&code))
                .expect("generated payload is canonical");
            let prev = level.insert(ball, prob);
            assert!(prev.is_none(), "shape enumeration produced a duplicate");
        }
        levels.push(level);
    }
    MarginalTable::from_levels(d, levels)
}

/// Unimodular Galton-Watson marginals: root degree from `degree_dist`,
/// non-root offspring size-biased (`p_k = (k+1) q_{k+1} / sum_j j q_j`).
pub fn marginals_ugw(
    degree_dist: &BTreeMap<u32, Ratio>,
    d: u32,
    depth: u32,
) -> Result<MarginalTable, MeasureError> {
    let mean: Ratio = degree_dist.iter().map(|(&k, p)| int(k as i64) * p).sum();
    if mean.is_zero() {
        return Err(MeasureError::ZeroMeanDegree);
    }
    let mut offspring: BTreeMap<u32, Ratio> = BTreeMap::new();
    for (&k, q) in degree_dist {
        if k >= 1 && !q.is_zero() {
            offspring.insert(k - 1, int(k as i64) * q / &mean);
        }
    }
    marginals_branching(degree_dist, &offspring, d, depth, DEFAULT_SUPPORT_CAP)
}

/// Marginals of the uniformly rooted finite tree `f`:
/// `mu_r(alpha) = #{v : B_r(v) iso alpha} / |V(f)|`.
pub fn marginals_atom(f: &RootedGraph, d: u32, depth: u32) -> Result<MarginalTable, MeasureError> {
    if !f.is_tree() {
        return Err(MeasureError::NotATree);
    }
    if f.max_degree() > d as usize {
        return Err(MeasureError::DegreeExceeded {
            degree: f.max_degree(),
            bound: d,
        });
    }
    let n = f.n();
    let mut levels = Vec::with_capacity(depth as usize + 1);
    for r in 0..=depth {
        let mut level: BTreeMap<BallCode, Ratio> = BTreeMap::new();
        for v in 0..n as u32 {
            let ball = crate::ball::canonicalize(&f.ball(v, r), d, r)?;
            *level.entry(ball).or_insert_with(Ratio::zero) +=
                Ratio::new(BigInt::one(), BigInt::from(n));
        }
        levels.push(level);
    }
    MarginalTable::from_levels(d, levels)
}

/// Pointwise convex combination of tables over the same `(d, depth)`.
pub fn mixture(parts: &[(MarginalTable, Ratio)]) -> Result<MarginalTable, MeasureError> {
    if parts.is_empty() {
        return Err(MeasureError::ParameterMismatch("empty mixture".into()));
    }
    let d = parts[0].0.degree_bound();
    let depth = parts[0].0.depth();
    let wsum: Ratio = parts.iter().map(|(_, w)| w.clone()).sum();
    if !wsum.is_one() {
        return Err(MeasureError::ParameterMismatch(format!(
            "mixture weights sum to {}",
            fmt_ratio(&wsum)
        )));
    }
    for (t, w) in parts {
        if w.is_negative() || w.is_zero() {
            return Err(MeasureError::ParameterMismatch(
                "mixture weights must be positive".into(),
            ));
        }
        if t.degree_bound() != d || t.depth() != depth {
            return Err(MeasureError::ParameterMismatch(format!(
                "component (d = {}, depth = {}) does not match (d = {}, depth = {})",
                t.degree_bound(),
                t.depth(),
                d,
                depth
            )));
        }
    }
    let mut levels = Vec::with_capacity(depth as usize + 1);
    for r in 0..=depth {
        let mut level: BTreeMap<BallCode, Ratio> = BTreeMap::new();
        for (t, w) in parts {
            for (ball, p) in t.level(r) {
                *level.entry(ball.clone()).or_insert_with(Ratio::zero) += p * w;
            }
        }
        levels.push(level);
    }
    MarginalTable::from_levels(d, levels)
}
