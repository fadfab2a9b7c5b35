//! Lengths of orbit sets and of the intervals between them.
//!
//! A set index `i <= 0` is the arc `f^i(U)` from the backward orbit, and
//! `i >= 1` is the point `f^i(U)`. Which of the two arcs between sets `I` and
//! `J` is meant by `(I, J)` is read off the rigid rotation: `I` lies left of
//! `J` when `(j - i) rho mod 1 < 1/2`.

use crate::arith::{BigReal, CirclePoint};
use crate::error::{Error, Result};
use crate::partition::{BackwardOrbit, ForwardOrbit};

#[derive(Clone, Debug)]
pub struct OrbitSets {
    pub backward: BackwardOrbit,
    pub forward: ForwardOrbit,
    /// Rotation number used for orientation only.
    pub rho: f64,
    prec: usize,
}

impl OrbitSets {
    pub fn new(backward: BackwardOrbit, forward: ForwardOrbit, rho: f64) -> Self {
        let prec = backward.prec;
        OrbitSets {
            backward,
            forward,
            rho,
            prec,
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Left and right ends of set `i`.
    pub fn ends(&self, i: i64) -> Result<(CirclePoint, CirclePoint)> {
        if i <= 0 {
            let a = self.backward.arc(i.unsigned_abs() as usize)?;
            Ok((a.left().clone(), a.right()))
        } else {
            let x = self.forward.point(i as usize)?;
            Ok((x.clone(), x.clone()))
        }
    }

    /// `|i|`: the arc length, zero for points.
    pub fn size(&self, i: i64) -> Result<BigReal> {
        if i <= 0 {
            Ok(self
                .backward
                .arc(i.unsigned_abs() as usize)?
                .length()
                .clone())
        } else {
            self.forward.point(i as usize)?;
            Ok(BigReal::zero(self.prec))
        }
    }

    /// Whether set `i` lies left of set `j` in the rotation's cyclic order.
    pub fn left_of(&self, i: i64, j: i64) -> bool {
        let d = ((j - i) as f64 * self.rho).rem_euclid(1.0);
        d < 0.5
    }

    /// `|(i, j)|`.
    pub fn gap(&self, i: i64, j: i64) -> Result<BigReal> {
        if i == j {
            return Err(Error::Domain(format!(
                "interval between set {i} and itself"
            )));
        }
        let (l, r) = if self.left_of(i, j) { (i, j) } else { (j, i) };
        let (_, from) = self.ends(l)?;
        let (to, _) = self.ends(r)?;
        Ok(from.dist_to(&to))
    }

    /// `|[i, j)| = |i| + |(i, j)|`.
    pub fn gap_with_left(&self, i: i64, j: i64) -> Result<BigReal> {
        Ok(&self.size(i)? + &self.gap(i, j)?)
    }

    /// `|(i, j]| = |(i, j)| + |j|`.
    pub fn gap_with_right(&self, i: i64, j: i64) -> Result<BigReal> {
        Ok(&self.gap(i, j)? + &self.size(j)?)
    }

    /// `|[i, j]|`.
    pub fn hull(&self, i: i64, j: i64) -> Result<BigReal> {
        Ok(&(&self.size(i)? + &self.gap(i, j)?) + &self.size(j)?)
    }
}
