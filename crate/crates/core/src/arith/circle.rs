//! Points and arcs on the circle `R/Z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::bigreal::BigReal;
use crate::error::{Error, Result};

/// A point of the circle, represented in `[0, 1)`.
#[derive(Clone, PartialEq)]
pub struct CirclePoint {
    rep: BigReal,
}

/// Reduces `x` into `[0, 1)`.
pub fn mod1(x: &BigReal) -> Result<CirclePoint> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("mod1 of non-finite value {x}")));
    }
    let mut r = x - &x.floor();
    // Rounding of x - floor(x) for tiny negative x can land on 1.
    if r >= BigReal::one(r.prec()) {
        r = BigReal::zero(r.prec());
    }
    Ok(CirclePoint { rep: r })
}

impl CirclePoint {
    pub fn new(x: &BigReal) -> Result<Self> {
        mod1(x)
    }

    pub fn zero(prec: usize) -> Self {
        CirclePoint {
            rep: BigReal::zero(prec),
        }
    }

    pub fn rep(&self) -> &BigReal {
        &self.rep
    }

    pub fn prec(&self) -> usize {
        self.rep.prec()
    }

    /// `self + t` reduced mod 1.
    pub fn shift(&self, t: &BigReal) -> CirclePoint {
        mod1(&(&self.rep + t)).expect("finite shift")
    }

    /// Positive distance travelled from `self` to `other`, in `[0, 1)`.
    pub fn dist_to(&self, other: &CirclePoint) -> BigReal {
        mod1(&(&other.rep - &self.rep)).expect("finite points").rep
    }
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CirclePoint({})", self.rep)
    }
}

/// A positively oriented arc `[left, left + length]` with `0 < length < 1`.
#[derive(Clone, PartialEq)]
pub struct Arc {
    left: CirclePoint,
    length: BigReal,
}

/// The positively oriented arc from `p` to `q`.
pub fn arc_between(p: &CirclePoint, q: &CirclePoint) -> Result<Arc> {
    let length = p.dist_to(q);
    if length.is_zero() {
        return Err(Error::DegenerateArc);
    }
    Ok(Arc {
        left: p.clone(),
        length,
    })
}

impl Arc {
    pub fn new(left: CirclePoint, length: BigReal) -> Result<Self> {
        if !length.is_positive() || length >= BigReal::one(length.prec()) {
            return Err(Error::Domain(format!("arc length {length} not in (0, 1)")));
        }
        Ok(Arc { left, length })
    }

    pub fn left(&self) -> &CirclePoint {
        &self.left
    }

    pub fn right(&self) -> CirclePoint {
        self.left.shift(&self.length)
    }

    pub fn length(&self) -> &BigReal {
        &self.length
    }

    /// Whether `x` lies in the closed arc.
    pub fn contains(&self, x: &CirclePoint) -> bool {
        self.left.dist_to(x) <= self.length
    }

    /// Whether `x` lies in the open arc.
    pub fn contains_open(&self, x: &CirclePoint) -> bool {
        let d = self.left.dist_to(x);
        d.is_positive() && d < self.length
    }

    /// Whether `other` lies inside the closed arc `self`.
    pub fn contains_arc(&self, other: &Arc) -> bool {
        let d = self.left.dist_to(&other.left);
        &d + &other.length <= self.length
    }

    /// Whether the open arcs share a point.
    pub fn overlaps(&self, other: &Arc) -> bool {
        let d = self.left.dist_to(&other.left);
        if d < self.length {
            return true;
        }
        let e = other.left.dist_to(&self.left);
        e < other.length
    }
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Arc[{} + {}]", self.left.rep, self.length)
    }
}

/// Decimal-string form of an arc, as written to CSV and JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub left: String,
    pub length: String,
}

impl From<&Arc> for ArcRecord {
    fn from(a: &Arc) -> Self {
        ArcRecord {
            left: a.left.rep.to_decimal_string(),
            length: a.length.to_decimal_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> BigReal {
        BigReal::from_f64(x, 128)
    }

    fn pt(x: f64) -> CirclePoint {
        mod1(&r(x)).unwrap()
    }

    #[test]
    fn mod1_examples() {
        assert_eq!(mod1(&r(0.25)).unwrap().rep().to_f64(), 0.25);
        assert_eq!(mod1(&r(1.75)).unwrap().rep().to_f64(), 0.75);
        assert_eq!(mod1(&r(-0.25)).unwrap().rep().to_f64(), 0.75);
        assert_eq!(mod1(&r(-1e-300)).unwrap().rep().to_f64(), 0.0);
        let nan = &BigReal::zero(64) / &BigReal::zero(64);
        assert!(matches!(mod1(&nan), Err(Error::Domain(_))));
    }

    #[test]
    fn arc_between_examples() {
        let a = arc_between(&pt(0.2), &pt(0.5)).unwrap();
        assert_eq!(a.left().rep().to_f64(), 0.2);
        assert!((a.length().to_f64() - 0.3).abs() < 1e-15);
        let b = arc_between(&pt(0.9), &pt(0.1)).unwrap();
        assert!((b.length().to_f64() - 0.2).abs() < 1e-15);
        let c = arc_between(&pt(0.5), &pt(0.2)).unwrap();
        assert!((c.length().to_f64() - 0.7).abs() < 1e-15);
        assert_eq!(arc_between(&pt(0.3), &pt(0.3)), Err(Error::DegenerateArc));
    }

    #[test]
    fn containment_wraps() {
        let a = arc_between(&pt(0.9), &pt(0.1)).unwrap();
        assert!(a.contains(&pt(0.95)));
        assert!(a.contains(&pt(0.05)));
        assert!(!a.contains(&pt(0.5)));
        assert!(a.contains(&pt(0.9)) && !a.contains_open(&pt(0.9)));
        let inner = arc_between(&pt(0.95), &pt(0.05)).unwrap();
        assert!(a.contains_arc(&inner));
        assert!(!inner.contains_arc(&a));
        let other = arc_between(&pt(0.1), &pt(0.2)).unwrap();
        assert!(!a.overlaps(&other));
        assert!(a.overlaps(&inner) && inner.overlaps(&a));
    }
}
