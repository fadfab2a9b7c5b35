//! Backward orbit of the flat piece and the dynamical partitions it induces.
//!
//! Index conventions: `-i` denotes `f^{-i}(U)`, an arc, and `i >= 1` denotes
//! `f^i(U)`, a point. The level-`n` partition consists of the marked arcs
//! `-i` for `0 <= i < q_{n+1} + q_n` and the gaps between them, identified by
//! index arithmetic:
//!
//! * long gaps `I^n_i = (-q_n - i, -i)` for `0 <= i < q_{n+1}`;
//! * short gaps `I^{n+1}_i = (-i, -q_{n+1} - i)` for `0 <= i < q_n`.
//!
//! `q_n rho - p_n` has sign `(-1)^(n+1)`, so for odd `n` the arc `-q_n - i`
//! lies just left of `-i` and for even `n` just right of it.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::{arc_between, Arc, BigReal, CirclePoint};
use crate::error::{Error, Result};
use crate::flatmap::FlatCircleMap;
use crate::rotation::ConvergentTable;

/// `f^{-i}(U)` for `i = 0..=N`.
#[derive(Clone, Debug)]
pub struct BackwardOrbit {
    pub arcs: Vec<Arc>,
    /// Largest endpoint residual `|f(endpoint of arc i) - endpoint of arc i-1|`.
    pub residuals: Vec<BigReal>,
    pub prec: usize,
}

impl BackwardOrbit {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// `f^{-i}(U)`.
    pub fn arc(&self, i: usize) -> Result<&Arc> {
        self.arcs.get(i).ok_or_else(|| {
            Error::Depth(format!(
                "backward orbit has {} arcs, index {i} requested",
                self.len()
            ))
        })
    }

    pub fn max_residual(&self) -> BigReal {
        self.residuals
            .iter()
            .fold(BigReal::zero(self.prec), |m, r| m.max(r))
    }

    /// Index and length of the shortest arc among the first `count`.
    pub fn shortest(&self, count: usize) -> (usize, BigReal) {
        let mut best = (0, self.arcs[0].length().clone());
        for (i, a) in self.arcs.iter().enumerate().take(count).skip(1) {
            if *a.length() < best.1 {
                best = (i, a.length().clone());
            }
        }
        best
    }
}

fn circle_gap(x: &CirclePoint, y: &CirclePoint) -> BigReal {
    x.dist_to(y).min(&y.dist_to(x))
}

/// `[U, f^{-1}(U), ..., f^{-count}(U)]`, each endpoint checked by one forward
/// evaluation.
pub fn backward_orbit(m: &FlatCircleMap, count: usize) -> Result<BackwardOrbit> {
    let p = m.prec();
    let tol = BigReal::exp2(-(p as i64) + 16, p);
    let mut arcs = Vec::with_capacity(count + 1);
    let mut residuals = Vec::with_capacity(count + 1);
    arcs.push(m.flat().clone());
    residuals.push(BigReal::zero(p));
    for i in 1..=count {
        let target = &arcs[i - 1];
        let pre = m.preimage_arc(target)?;
        let rl = circle_gap(&m.eval(pre.left()), target.left());
        let rr = circle_gap(&m.eval(&pre.right()), &target.right());
        let res = rl.max(&rr);
        if res > tol {
            return Err(Error::Precision {
                index: i,
                reason: format!("endpoint residual {res} exceeds 2^-{}", p - 16),
            });
        }
        arcs.push(pre);
        residuals.push(res);
    }
    Ok(BackwardOrbit {
        arcs,
        residuals,
        prec: p,
    })
}

/// Whether any two of the first `count` arcs overlap, by a sorted sweep.
pub fn first_overlap(orbit: &BackwardOrbit, count: usize) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..count.min(orbit.len())).collect();
    idx.sort_by(|&i, &j| {
        orbit.arcs[i]
            .left()
            .rep()
            .partial_cmp(orbit.arcs[j].left().rep())
            .expect("finite")
    });
    for w in 0..idx.len() {
        let (i, j) = (idx[w], idx[(w + 1) % idx.len()]);
        if i != j && orbit.arcs[i].overlaps(&orbit.arcs[j]) {
            return Some((i, j));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    Marked,
    Long,
    Short,
}

impl PieceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceKind::Marked => "marked",
            PieceKind::Long => "long",
            PieceKind::Short => "short",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Piece {
    pub kind: PieceKind,
    pub index: usize,
    pub arc: Arc,
}

/// The level-`n` partition by the first `q_{n+1} + q_n` preimages of `U`.
#[derive(Clone, Debug)]
pub struct DynamicalPartition {
    pub level: usize,
    pub q_n: u64,
    pub q_next: u64,
    pub marked: Vec<Arc>,
    pub long_gaps: Vec<Arc>,
    pub short_gaps: Vec<Arc>,
    pub prec: usize,
}

/// The open arc between `x` and `y`, with `x` to the left.
fn gap(x: &Arc, y: &Arc, level: usize) -> Result<Arc> {
    arc_between(&x.right(), y.left()).map_err(|_| Error::Partition {
        level,
        reason: "adjacent marked arcs touch".into(),
    })
}

/// Assembles the level-`n` partition from the backward orbit.
pub fn build_partition(
    orbit: &BackwardOrbit,
    table: &ConvergentTable,
    n: usize,
) -> Result<DynamicalPartition> {
    if n == 0 || n + 1 > table.len() {
        return Err(Error::Depth(format!(
            "partition level {n} needs q_{} but the table stops at q_{}",
            n + 1,
            table.len()
        )));
    }
    let (qn, qn1) = (table.q(n) as usize, table.q(n + 1) as usize);
    let count = qn + qn1;
    if orbit.len() < count {
        return Err(Error::Depth(format!(
            "partition level {n} needs {count} arcs, orbit has {}",
            orbit.len()
        )));
    }
    let arc = |i: usize| &orbit.arcs[i];
    let odd = n % 2 == 1;
    let mut long_gaps = Vec::with_capacity(qn1);
    for i in 0..qn1 {
        let (x, y) = (arc(qn + i), arc(i));
        long_gaps.push(if odd { gap(x, y, n)? } else { gap(y, x, n)? });
    }
    let mut short_gaps = Vec::with_capacity(qn);
    for i in 0..qn {
        // -q_{n+1} - i sits on the side opposite to -q_n - i.
        let (x, y) = (arc(i), arc(qn1 + i));
        short_gaps.push(if odd { gap(x, y, n)? } else { gap(y, x, n)? });
    }
    let part = DynamicalPartition {
        level: n,
        q_n: qn as u64,
        q_next: qn1 as u64,
        marked: orbit.arcs[..count].to_vec(),
        long_gaps,
        short_gaps,
        prec: orbit.prec,
    };
    part.check_tiling()?;
    Ok(part)
}

impl DynamicalPartition {
    pub fn pieces(&self) -> Vec<Piece> {
        let tag = |kind, v: &[Arc]| {
            v.iter()
                .enumerate()
                .map(|(index, a)| Piece {
                    kind,
                    index,
                    arc: a.clone(),
                })
                .collect::<Vec<_>>()
        };
        let mut out = tag(PieceKind::Marked, &self.marked);
        out.extend(tag(PieceKind::Long, &self.long_gaps));
        out.extend(tag(PieceKind::Short, &self.short_gaps));
        out
    }

    /// Pieces in increasing order of their left endpoint in `[0, 1)`.
    pub fn sorted_pieces(&self) -> Vec<Piece> {
        let mut v = self.pieces();
        v.sort_by(|x, y| {
            x.arc
                .left()
                .rep()
                .partial_cmp(y.arc.left().rep())
                .expect("finite")
        });
        v
    }

    pub fn gaps(&self) -> impl Iterator<Item = &Arc> {
        self.long_gaps.iter().chain(&self.short_gaps)
    }

    pub fn total_length(&self) -> BigReal {
        self.marked
            .iter()
            .chain(self.gaps())
            .fold(BigReal::zero(self.prec), |s, a| &s + a.length())
    }

    /// Total length is 1 and consecutive pieces abut, both within `2^{-P/2}`.
    pub fn check_tiling(&self) -> Result<()> {
        let p = self.prec;
        let tol = BigReal::exp2(-(p as i64) / 2, p);
        let total = self.total_length();
        if (&total - &BigReal::one(p)).abs() > tol {
            return Err(Error::Partition {
                level: self.level,
                reason: format!("pieces sum to {total}"),
            });
        }
        let sorted = self.sorted_pieces();
        for w in 0..sorted.len() {
            let (x, y) = (&sorted[w], &sorted[(w + 1) % sorted.len()]);
            let mismatch = circle_gap(&x.arc.right(), y.arc.left());
            if mismatch > tol {
                return Err(Error::Partition {
                    level: self.level,
                    reason: format!(
                        "{} {} and {} {} are separated by {mismatch}",
                        x.kind.as_str(),
                        x.index,
                        y.kind.as_str(),
                        y.index
                    ),
                });
            }
        }
        Ok(())
    }

    /// One row per piece: `kind,index,left,length`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,index,left,length\n");
        for pc in self.pieces() {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                pc.kind.as_str(),
                pc.index,
                pc.arc.left().rep().to_decimal_string(),
                pc.arc.length().to_decimal_string()
            );
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementViolation {
    pub kind: PieceKind,
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementReport {
    pub coarse_level: usize,
    pub fine_level: usize,
    pub checked: usize,
    pub violations: Vec<RefinementViolation>,
    /// Marked arcs of the coarse level that are marked again at the fine level.
    pub marked_persist: bool,
}

impl RefinementReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.marked_persist
    }
}

/// Whether `inner` lies in the closed arc `outer`, up to `tol` at each end.
fn contains_with_tol(outer: &Arc, inner: &Arc, tol: &BigReal) -> bool {
    let one = BigReal::one(tol.prec());
    let mut d = outer.left().dist_to(inner.left());
    if &one - &d <= *tol {
        d = &d - &one;
    }
    d >= -tol && (&d + inner.length()) <= (outer.length() + tol)
}

/// Checks that every piece of `fine` lies in a piece of `coarse`.
///
/// `coarse` tiles the circle, so containment in one piece excludes the rest.
pub fn refinement_check(
    coarse: &DynamicalPartition,
    fine: &DynamicalPartition,
) -> RefinementReport {
    let p = coarse.prec.min(fine.prec);
    let tol = BigReal::exp2(-(p as i64) + 8, p);
    let sorted = coarse.sorted_pieces();
    let lefts: Vec<&BigReal> = sorted.iter().map(|pc| pc.arc.left().rep()).collect();
    let mut violations = Vec::new();
    let pieces = fine.pieces();
    for pc in &pieces {
        let x = pc.arc.left().rep();
        let k = lefts.partition_point(|l| *l <= x);
        let n = sorted.len();
        let cands = [(k + n - 1) % n, (k + n - 2) % n, k % n];
        if !cands
            .iter()
            .any(|&c| contains_with_tol(&sorted[c].arc, &pc.arc, &tol))
        {
            violations.push(RefinementViolation {
                kind: pc.kind,
                index: pc.index,
                reason: format!("not inside any level-{} piece", coarse.level),
            });
        }
    }
    let marked_persist = coarse.marked.len() <= fine.marked.len()
        && coarse.marked.iter().zip(&fine.marked).all(|(a, b)| a == b);
    RefinementReport {
        coarse_level: coarse.level,
        fine_level: fine.level,
        checked: pieces.len(),
        violations,
        marked_persist,
    }
}

/// `f^i(U)` for `i = 1..=N`; index 0 stands for `U` itself.
#[derive(Clone, Debug)]
pub struct ForwardOrbit {
    pub flat: Arc,
    points: Vec<CirclePoint>,
}

impl ForwardOrbit {
    /// Number of points, excluding `U`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `f^i(U)` for `i >= 1`.
    pub fn point(&self, i: usize) -> Result<&CirclePoint> {
        if i == 0 {
            return Err(Error::Domain(
                "index 0 of the forward orbit is the arc U".into(),
            ));
        }
        self.points.get(i - 1).ok_or_else(|| {
            Error::Depth(format!(
                "forward orbit has {} points, index {i} requested",
                self.len()
            ))
        })
    }
}

pub fn forward_orbit(m: &FlatCircleMap, count: usize) -> ForwardOrbit {
    let mut points = Vec::with_capacity(count);
    if count > 0 {
        points.push(m.c().clone());
    }
    while points.len() < count {
        let next = m.eval(points.last().expect("nonempty"));
        points.push(next);
    }
    ForwardOrbit {
        flat: m.flat().clone(),
        points,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparabilityReport {
    pub level: usize,
    pub pairs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Marked index attaining the minimum.
    pub argmin: usize,
}

/// `|A| / |B|` for each marked arc `A` and each gap `B` adjacent to it.
pub fn comparability_audit(part: &DynamicalPartition) -> ComparabilityReport {
    let sorted = part.sorted_pieces();
    let n = sorted.len();
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut argmin = 0;
    let mut pairs = 0;
    for (k, pc) in sorted.iter().enumerate() {
        if pc.kind != PieceKind::Marked {
            continue;
        }
        for nb in [&sorted[(k + n - 1) % n], &sorted[(k + 1) % n]] {
            if nb.kind == PieceKind::Marked {
                continue;
            }
            let r = (pc.arc.length() / nb.arc.length()).to_f64();
            pairs += 1;
            if r < min {
                min = r;
                argmin = pc.index;
            }
            max = max.max(r);
        }
    }
    ComparabilityReport {
        level: part.level,
        pairs,
        min_ratio: min,
        max_ratio: max,
        argmin,
    }
}
