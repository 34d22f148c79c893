//! Involution-invariance checking for marginal tables.
//!
//! A table is accepted (to its available depth) when, at every radius, the
//! directed-ball masses induced by orbit multiplicities flow consistently
//! through edge-balls: the out-flow sum (e1), the in-flow sum (e2), and
//! invariance of edge-ball mass under endpoint swap (e3). All arithmetic is
//! exact; the tolerance exists only for tables loaded from rounded external
//! files and defaults to zero.

use crate::ball::BallCode;
use crate::directed::{edge_ball_within, orientations, EdgeBall, VecBall};
use crate::measure::MarginalTable;
use crate::ratio::{abs_diff, fmt_ratio, int, Ratio};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("table depth {depth} insufficient: checking to radius {r_max} needs depth {needed}")]
    InsufficientDepth { depth: u32, r_max: u32, needed: u32 },
    #[error("tolerance must be nonnegative")]
    NegativeTolerance,
}

/// Directed-ball marginal at a fixed radius: `vec(A) = l_A * mu(ball(A))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecMarginal {
    pub radius: u32,
    pub masses: BTreeMap<VecBall, Ratio>,
}

impl VecMarginal {
    pub fn total(&self) -> Ratio {
        self.masses.values().sum()
    }

    pub fn mass(&self, a: &VecBall) -> Ratio {
        self.masses.get(a).cloned().unwrap_or_else(Ratio::zero)
    }
}

/// Edge-ball marginal at a fixed radius, accumulated from the orientations
/// one level up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMarginal {
    pub radius: u32,
    pub masses: BTreeMap<EdgeBall, Ratio>,
}

impl EdgeMarginal {
    pub fn total(&self) -> Ratio {
        self.masses.values().sum()
    }

    pub fn mass(&self, e: &EdgeBall) -> Ratio {
        self.masses.get(e).cloned().unwrap_or_else(Ratio::zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EquationId {
    SumToOne,
    Consistency,
    Support,
    E1,
    E2,
    E3,
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquationId::SumToOne => "sum-to-one",
            EquationId::Consistency => "consistency",
            EquationId::Support => "support",
            EquationId::E1 => "e1",
            EquationId::E2 => "e2",
            EquationId::E3 => "e3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub equation: EquationId,
    pub radius: u32,
    pub witness: String,
    pub lhs: Ratio,
    pub rhs: Ratio,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} r={} witness={} lhs={} rhs={}",
            self.equation,
            self.radius,
            self.witness,
            fmt_ratio(&self.lhs),
            fmt_ratio(&self.rhs)
        )
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Largest radius up to which all checks ran.
    pub r_max: u32,
    /// Largest radius with no violation at or below it; `None` when even
    /// radius 0 fails.
    pub certified_radius: Option<u32>,
    pub tolerance: Ratio,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "validation {} (checked to radius {}, certified radius {}, tolerance {})",
            if self.pass() { "PASS" } else { "FAIL" },
            self.r_max,
            match self.certified_radius {
                Some(r) => r.to_string(),
                None => "none".into(),
            },
            fmt_ratio(&self.tolerance)
        )?;
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

/// Directed-ball marginal at radius `r >= 1`: one entry per root-edge orbit
/// of each support ball, with mass `l * mu(ball)`.
pub fn induce_vec(table: &MarginalTable, r: u32) -> VecMarginal {
    assert!(r >= 1, "directed balls need radius >= 1");
    assert!(r <= table.depth(), "radius beyond table depth");
    let mut masses: BTreeMap<VecBall, Ratio> = BTreeMap::new();
    for (ball, p) in table.level(r) {
        for (vb, l) in orientations(ball) {
            let prev = masses.insert(vb, int(l as i64) * p);
            assert!(prev.is_none(), "orientations are distinct per ball");
        }
    }
    VecMarginal { radius: r, masses }
}

/// Edge-ball marginal at radius `r`, computed by pushing the directed masses
/// of depth-(r+1) orientations onto their inner edge-balls.
pub fn edge_marginals(table: &MarginalTable, r: u32) -> Result<EdgeMarginal, ValidateError> {
    if table.depth() < r + 1 {
        return Err(ValidateError::InsufficientDepth {
            depth: table.depth(),
            r_max: r,
            needed: r + 1,
        });
    }
    let mut masses: BTreeMap<EdgeBall, Ratio> = BTreeMap::new();
    for (ball, p) in table.level(r + 1) {
        for (vb, l) in orientations(ball) {
            let eb = edge_ball_within(&vb).expect("orientation has radius >= 1");
            *masses.entry(eb).or_insert_with(Ratio::zero) += int(l as i64) * p;
        }
    }
    Ok(EdgeMarginal { radius: r, masses })
}

/// Check the table against all involution-invariance equations up to radius
/// `r_max` (needs depth `r_max + 1`). Failures are report entries.
pub fn check(
    table: &MarginalTable,
    r_max: u32,
    tolerance: &Ratio,
) -> Result<ValidationReport, ValidateError> {
    if tolerance.is_negative() {
        return Err(ValidateError::NegativeTolerance);
    }
    if table.depth() < r_max + 1 {
        return Err(ValidateError::InsufficientDepth {
            depth: table.depth(),
            r_max,
            needed: r_max + 1,
        });
    }
    let mut violations: Vec<Violation> = Vec::new();

    // Structural re-verification of the levels the e-checks rely on.
    for r in 0..=r_max + 1 {
        let level = table.level(r);
        let sum: Ratio = level.values().sum();
        if !sum.is_one() {
            violations.push(Violation {
                equation: EquationId::SumToOne,
                radius: r,
                witness: "-".into(),
                lhs: sum,
                rhs: Ratio::one(),
            });
        }
        for ball in level.keys() {
            if !ball.is_tree() {
                violations.push(Violation {
                    equation: EquationId::Support,
                    radius: r,
                    witness: ball.token(),
                    lhs: Ratio::one(),
                    rhs: Ratio::zero(),
                });
            }
        }
        if r <= r_max {
            let mut projected: BTreeMap<BallCode, Ratio> = BTreeMap::new();
            for (ball, p) in table.level(r + 1) {
                if let Ok(t) = ball.truncate(r) {
                    *projected.entry(t).or_insert_with(Ratio::zero) += p;
                }
            }
            let keys: std::collections::BTreeSet<_> =
                projected.keys().chain(level.keys()).cloned().collect();
            for k in keys {
                let lhs = level.get(&k).cloned().unwrap_or_else(Ratio::zero);
                let rhs = projected.get(&k).cloned().unwrap_or_else(Ratio::zero);
                if lhs != rhs {
                    violations.push(Violation {
                        equation: EquationId::Consistency,
                        radius: r,
                        witness: k.token(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }

    // Involution algebra per radius.
    for r in 0..=r_max {
        let em = edge_marginals(table, r)?;
        // (e3): mass invariant under the involution, one report per pair.
        for (eb, m) in &em.masses {
            let inv = eb.involute();
            if *eb <= inv {
                let minv = em.mass(&inv);
                if abs_diff(m, &minv) > *tolerance {
                    violations.push(Violation {
                        equation: EquationId::E3,
                        radius: r,
                        witness: eb.token(),
                        lhs: m.clone(),
                        rhs: minv,
                    });
                }
            }
        }
        if r == 0 {
            // Radius-0 directed balls carry no orbit information, so (e1) and
            // (e2) start at radius 1.
            continue;
        }
        let vec = induce_vec(table, r);
        let mut outflow: BTreeMap<VecBall, Ratio> = BTreeMap::new();
        let mut inflow: BTreeMap<VecBall, Ratio> = BTreeMap::new();
        for (eb, m) in &em.masses {
            *outflow.entry(eb.s_view()).or_insert_with(Ratio::zero) += m;
            *inflow.entry(eb.t_view()).or_insert_with(Ratio::zero) += m;
        }
        for (flows, eq) in [(&outflow, EquationId::E1), (&inflow, EquationId::E2)] {
            let keys: std::collections::BTreeSet<_> =
                flows.keys().chain(vec.masses.keys()).cloned().collect();
            for a in keys {
                let lhs = vec.mass(&a);
                let rhs = flows.get(&a).cloned().unwrap_or_else(Ratio::zero);
                if abs_diff(&lhs, &rhs) > *tolerance {
                    violations.push(Violation {
                        equation: eq,
                        radius: r,
                        witness: a.token(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }

    let certified_radius = if violations.is_empty() {
        Some(r_max)
    } else {
        violations
            .iter()
            .map(|v| v.radius)
            .min()
            .unwrap()
            .checked_sub(1)
    };
    Ok(ValidationReport {
        r_max,
        certified_radius,
        tolerance: tolerance.clone(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RootedGraph;
    use crate::measure::{
        marginals_atom, marginals_branching, marginals_regular, marginals_ugw, MarginalTable,
    };
    use crate::ratio::frac;

    fn q13() -> BTreeMap<u32, Ratio> {
        let mut q = BTreeMap::new();
        q.insert(1, frac(1, 2));
        q.insert(3, frac(1, 2));
        q
    }

    #[test]
    fn induce_vec_examples() {
        // regular(3): single orientation with l = 3 gets mass 3.
        let t = marginals_regular(3, 2);
        let v = induce_vec(&t, 1);
        assert_eq!(v.masses.len(), 1);
        assert_eq!(v.total(), int(3));

        // atom(path3) at r = 1: endpoint orientation 2/3; center (l = 2) 2/3.
        let t = marginals_atom(&RootedGraph::path(3), 2, 2).unwrap();
        let v = induce_vec(&t, 1);
        assert_eq!(v.masses.len(), 2);
        for (a, m) in &v.masses {
            assert_eq!(*m, frac(2, 3), "orientation {}", a.token());
        }
        // Total directed mass = expected root degree.
        assert_eq!(v.total(), t.expected_degree(1));
        assert_eq!(v.total(), frac(4, 3));
    }

    #[test]
    fn vec_total_matches_expected_degree() {
        let tables = [
            marginals_regular(2, 2),
            marginals_regular(3, 2),
            marginals_ugw(&q13(), 3, 2).unwrap(),
            marginals_atom(&RootedGraph::complete_binary_tree(2), 3, 2).unwrap(),
        ];
        for t in &tables {
            for r in 1..=2 {
                assert_eq!(induce_vec(t, r).total(), t.expected_degree(r));
            }
        }
    }

    #[test]
    fn edge_marginal_examples() {
        // regular(2), r = 0: single oriented-edge class with mass 2.
        let t = marginals_regular(2, 2);
        let em = edge_marginals(&t, 0).unwrap();
        assert_eq!(em.masses.len(), 1);
        assert_eq!(em.total(), int(2));

        // regular(3), r = 1: single symmetric class with mass 3.
        let t = marginals_regular(3, 2);
        let em = edge_marginals(&t, 1).unwrap();
        assert_eq!(em.masses.len(), 1);
        let (eb, m) = em.masses.iter().next().unwrap();
        assert_eq!(*m, int(3));
        assert_eq!(eb.involute(), *eb);

        assert!(matches!(
            edge_marginals(&t, 2),
            Err(ValidateError::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn mass_conserved_under_involution() {
        let t = marginals_ugw(&q13(), 3, 3).unwrap();
        for r in 0..=2 {
            let em = edge_marginals(&t, r).unwrap();
            let mapped: Ratio = em.masses.iter().map(|(e, _)| em.mass(&e.involute())).sum();
            assert_eq!(mapped, em.total());
        }
    }

    #[test]
    fn generators_pass_exactly() {
        for d in 1..=3 {
            let t = marginals_regular(d, 3);
            let rep = check(&t, 2, &Ratio::zero()).unwrap();
            assert!(rep.pass(), "regular({d}): {rep}");
            assert_eq!(rep.certified_radius, Some(2));
        }
        let t = marginals_ugw(&q13(), 3, 3).unwrap();
        let rep = check(&t, 2, &Ratio::zero()).unwrap();
        assert!(rep.pass(), "ugw: {rep}");

        let t = marginals_atom(&RootedGraph::path(4), 2, 3).unwrap();
        assert!(check(&t, 2, &Ratio::zero()).unwrap().pass());

        let t = marginals_atom(&RootedGraph::complete_binary_tree(2), 3, 2).unwrap();
        assert!(check(&t, 1, &Ratio::zero()).unwrap().pass());
    }

    /// The path rooted only at its endpoints is a legitimate measure but not
    /// involution-invariant: mass flows from endpoints to the center without
    /// return flow.
    #[test]
    fn endpoint_rooted_path_rejected() {
        let p3 = RootedGraph::path(3);
        let endpoint_ball = |r: u32| crate::ball::canonicalize(&p3.ball(0, r), 2, r).unwrap();
        let levels = (0..=2)
            .map(|r| {
                let mut m = BTreeMap::new();
                m.insert(endpoint_ball(r), Ratio::one());
                m
            })
            .collect();
        let t = MarginalTable::from_levels(2, levels).unwrap();
        let rep = check(&t, 1, &Ratio::zero()).unwrap();
        assert!(!rep.pass());
        let e3: Vec<_> = rep
            .violations
            .iter()
            .filter(|v| v.equation == EquationId::E3)
            .collect();
        assert_eq!(e3.len(), 1);
        assert_eq!(e3[0].radius, 1);
        // Oriented endpoint->center path edge-ball has mass 1, its involution 0.
        let (lo, hi) = (
            e3[0].lhs.clone().min(e3[0].rhs.clone()),
            e3[0].lhs.clone().max(e3[0].rhs.clone()),
        );
        assert_eq!((lo, hi), (Ratio::zero(), Ratio::one()));
        let e2 = rep
            .violations
            .iter()
            .filter(|v| v.equation == EquationId::E2)
            .count();
        assert_eq!(e2, 2);
        // (e1) holds: the table is a measure, just not invariant.
        assert!(rep.violations.iter().all(|v| v.equation != EquationId::E1));
        assert_eq!(rep.certified_radius, Some(0));
    }

    /// Galton-Watson marginals with the plain (non-size-biased) degree law at
    /// non-root vertices violate (e3) at radius 1.
    #[test]
    fn non_size_biased_gw_rejected() {
        let root_law = q13();
        let mut offspring = BTreeMap::new();
        offspring.insert(0, frac(1, 2));
        offspring.insert(2, frac(1, 2));
        let t = marginals_branching(&root_law, &offspring, 3, 2, 100_000).unwrap();
        let rep = check(&t, 1, &Ratio::zero()).unwrap();
        assert!(!rep.pass());
        let e3: Vec<_> = rep
            .violations
            .iter()
            .filter(|v| v.equation == EquationId::E3)
            .collect();
        assert_eq!(e3.len(), 1, "{rep}");
        // Star edge-ball mass 3/4 vs leaf-attachment view 1/4.
        let (lo, hi) = (
            e3[0].lhs.clone().min(e3[0].rhs.clone()),
            e3[0].lhs.clone().max(e3[0].rhs.clone()),
        );
        assert_eq!((lo, hi), (frac(1, 4), frac(3, 4)));
    }

    #[test]
    fn tolerance_admits_rounded_tables() {
        // Perturb the ugw table and re-project; a generous tolerance accepts,
        // zero rejects.
        let t = marginals_ugw(&q13(), 3, 2).unwrap();
        let mut levels: Vec<BTreeMap<crate::ball::BallCode, Ratio>> =
            (0..=2).map(|r| t.level(r).clone()).collect();
        let keys: Vec<_> = levels[2].keys().cloned().collect();
        let eps = frac(1, 1000);
        let k0 = &keys[0];
        let k1 = &keys[1];
        let bump = levels[2][k0].clone() * &eps;
        *levels[2].get_mut(k0).unwrap() -= &bump;
        *levels[2].get_mut(k1).unwrap() += &bump;
        // Re-project lower levels so the table still parses.
        for r in (0..2).rev() {
            let mut proj: BTreeMap<crate::ball::BallCode, Ratio> = BTreeMap::new();
            for (b, p) in &levels[r + 1] {
                *proj
                    .entry(b.truncate(r as u32).unwrap())
                    .or_insert_with(Ratio::zero) += p;
            }
            levels[r] = proj;
        }
        let t2 = MarginalTable::from_levels(3, levels).unwrap();
        assert!(!check(&t2, 1, &Ratio::zero()).unwrap().pass());
        assert!(check(&t2, 1, &frac(1, 10)).unwrap().pass());
    }
}
