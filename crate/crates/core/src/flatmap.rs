//! Degree-one circle maps that are constant on an arc.
//!
//! Off the flat arc `U = [a, b]` the map is `f(x) = c + I_s(l2, l1) mod 1`
//! with `s = ((x - b) mod 1) / (1 - |U|)`, so `f - c` vanishes like
//! `(x - b)^l2` to the right of `b` and like `(a - x)^l1` to the left of `a`.
//! Near `a` every quantity is computed from `a - x` and the upper tail of the
//! beta profile, so both sides keep relative accuracy.

use crate::arith::{arc_between, mod1, Arc, BetaProfile, BigReal, CirclePoint};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FlatCircleMap {
    prec: usize,
    ell1: BigReal,
    ell2: BigReal,
    flat: Arc,
    a: CirclePoint,
    b: CirclePoint,
    comp: BigReal,
    c: CirclePoint,
    profile: BetaProfile,
}

/// A point of the lift, `winding + base` with `base` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftState {
    pub base: BigReal,
    pub winding: i64,
}

impl LiftState {
    pub fn at(x: &CirclePoint) -> Self {
        LiftState {
            base: x.rep().clone(),
            winding: 0,
        }
    }

    pub fn point(&self) -> CirclePoint {
        mod1(&self.base).expect("finite base")
    }

    /// The lift coordinate `winding + base`.
    pub fn value(&self) -> BigReal {
        &BigReal::from_i64(self.winding, self.base.prec()) + &self.base
    }
}

/// Where a point sits relative to the flat arc.
enum Side {
    Flat,
    /// `s` measured from `b`, for `s <= 1/2`.
    Right(BigReal),
    /// `1 - s` measured from `a`, for `1 - s < 1/2`.
    Left(BigReal),
}

pub fn make_map(
    ell1: &BigReal,
    ell2: &BigReal,
    flat: &Arc,
    c: &CirclePoint,
    prec: usize,
) -> Result<FlatCircleMap> {
    FlatCircleMap::new(ell1, ell2, flat, c, prec)
}

impl FlatCircleMap {
    pub fn new(
        ell1: &BigReal,
        ell2: &BigReal,
        flat: &Arc,
        c: &CirclePoint,
        prec: usize,
    ) -> Result<Self> {
        let one = BigReal::one(prec);
        for (name, l) in [("ell1", ell1), ("ell2", ell2)] {
            if !l.is_finite() || *l < one {
                return Err(Error::Domain(format!("{name} = {l} must be >= 1")));
            }
        }
        let ell1 = ell1.with_prec(prec);
        let ell2 = ell2.with_prec(prec);
        let flat = Arc::new(
            mod1(&flat.left().rep().with_prec(prec))?,
            flat.length().with_prec(prec),
        )?;
        let a = flat.left().clone();
        let b = flat.right();
        let comp = &one - flat.length();
        let profile = BetaProfile::new(&ell2, &ell1, prec)?;
        Ok(FlatCircleMap {
            prec,
            ell1,
            ell2,
            a,
            b,
            comp,
            c: mod1(&c.rep().with_prec(prec))?,
            flat,
            profile,
        })
    }

    /// The same map with a different value on the flat piece.
    pub fn with_c(&self, c: &CirclePoint) -> Self {
        let mut m = self.clone();
        m.c = mod1(&c.rep().with_prec(self.prec)).expect("finite c");
        m
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn ell1(&self) -> &BigReal {
        &self.ell1
    }

    pub fn ell2(&self) -> &BigReal {
        &self.ell2
    }

    pub fn flat(&self) -> &Arc {
        &self.flat
    }

    /// Left endpoint `a` of the flat piece.
    pub fn a(&self) -> &CirclePoint {
        &self.a
    }

    /// Right endpoint `b` of the flat piece.
    pub fn b(&self) -> &CirclePoint {
        &self.b
    }

    pub fn c(&self) -> &CirclePoint {
        &self.c
    }

    /// `1 - |U|`.
    pub fn complement_length(&self) -> &BigReal {
        &self.comp
    }

    pub fn profile(&self) -> &BetaProfile {
        &self.profile
    }

    /// The canonical lift value of `c`, in `[b, b + 1)`.
    pub fn c_lift(&self) -> BigReal {
        self.b.rep() + &self.b.dist_to(&self.c)
    }

    fn side(&self, x: &CirclePoint) -> Side {
        let d = self.b.dist_to(x);
        if d.is_zero() || d >= self.comp {
            return Side::Flat;
        }
        let e = &self.comp - &d;
        if d <= e {
            Side::Right(&d / &self.comp)
        } else {
            Side::Left(&e / &self.comp)
        }
    }

    /// Offset `f(x) - c` in `[0, 1]` for `x` off the flat piece; 0 on it.
    fn rise(&self, x: &CirclePoint) -> (BigReal, bool) {
        match self.side(x) {
            Side::Flat => (BigReal::zero(self.prec), false),
            Side::Right(s) => (self.profile.reg(&s).expect("s in [0,1]"), false),
            // 1 - I_s, reported as a deficit below c + 1.
            Side::Left(t) => (self.profile.tail(&t).expect("t in [0,1]"), true),
        }
    }

    pub fn eval(&self, x: &CirclePoint) -> CirclePoint {
        match self.rise(x) {
            (r, false) => self.c.shift(&r),
            (r, true) => self.c.shift(&-r),
        }
    }

    /// One step of the canonical lift `F`, with `F(b) = c_lift`.
    pub fn lift_eval(&self, state: &LiftState) -> LiftState {
        let p = self.prec;
        let x = state.point();
        let shift = (&state.base - self.b.rep()).floor().to_i64();
        let k = state.winding + shift;
        let g = match self.side(&x) {
            Side::Flat if x == self.b => BigReal::zero(p),
            Side::Flat => BigReal::one(p),
            Side::Right(s) => self.profile.reg(&s).expect("s in [0,1]"),
            Side::Left(t) => &BigReal::one(p) - &self.profile.tail(&t).expect("t in [0,1]"),
        };
        let y = &self.c_lift() + &g;
        let wrap = y.floor();
        LiftState {
            base: &y - &wrap,
            winding: k + wrap.to_i64(),
        }
    }

    /// `Df(x)`; zero on the closed flat piece.
    pub fn derivative(&self, x: &CirclePoint) -> BigReal {
        let s = match self.side(x) {
            Side::Flat => return BigReal::zero(self.prec),
            Side::Right(s) => s,
            Side::Left(t) => &BigReal::one(self.prec) - &t,
        };
        &self.profile.density(&s) / &self.comp
    }

    /// Schwarzian derivative `Sf(x)` off the closed flat piece.
    pub fn schwarzian(&self, x: &CirclePoint) -> Result<BigReal> {
        let one = BigReal::one(self.prec);
        let (s, t) = match self.side(x) {
            Side::Flat => {
                return Err(Error::Domain(format!(
                    "Schwarzian undefined on the flat piece at {}",
                    x.rep()
                )))
            }
            Side::Right(s) => {
                let t = &one - &s;
                (s, t)
            }
            Side::Left(t) => (&one - &t, t),
        };
        let e2 = &self.ell2 - &one;
        let e1 = &self.ell1 - &one;
        let h = &(&e2 / &s) - &(&e1 / &t);
        let hp = -&(&(&e2 / &(&s * &s)) + &(&e1 / &(&t * &t)));
        let half = BigReal::exp2(-1, self.prec);
        let num = &hp - &(&(&h * &h) * &half);
        Ok(&num / &(&self.comp * &self.comp))
    }

    /// The unique `x` off the flat piece with `f(x) = y`.
    pub fn inverse(&self, y: &CirclePoint) -> Result<CirclePoint> {
        let up = self.c.dist_to(y);
        if up.is_zero() {
            return Err(Error::AmbiguousPreimage(y.rep().to_decimal_string()));
        }
        let down = y.dist_to(&self.c);
        if up <= down {
            let s = self.profile.inv(&up)?;
            Ok(self.b.shift(&(&s * &self.comp)))
        } else {
            let t = self.profile.inv_tail(&down)?;
            Ok(self.a.shift(&-(&t * &self.comp)))
        }
    }

    /// Preimage of `y` where an endpoint equal to `c` resolves to the flat
    /// piece's boundary on the side facing the rest of the arc.
    fn arc_end_preimage(&self, y: &CirclePoint, right_end: bool) -> Result<CirclePoint> {
        if *y == self.c {
            Ok(if right_end {
                self.a.clone()
            } else {
                self.b.clone()
            })
        } else {
            self.inverse(y)
        }
    }

    /// `{x off U : f(x) in J}` as an arc.
    pub fn preimage_arc(&self, j: &Arc) -> Result<Arc> {
        if j.contains_open(&self.c) {
            return Err(Error::SplitPreimage(self.c.rep().to_decimal_string()));
        }
        let l = self.arc_end_preimage(j.left(), false)?;
        let r = self.arc_end_preimage(&j.right(), true)?;
        arc_between(&l, &r)
    }

    /// Leading coefficients `(k_l, k_r)` of `c - f ~ k_l (a - x)^l1` and
    /// `f - c ~ k_r (x - b)^l2`.
    pub fn boundary_coefficients(&self) -> (BigReal, BigReal) {
        let beta = self.profile.beta();
        let kl = (&(&self.ell1 * &beta) * &self.comp.powf(&self.ell1)).recip();
        let kr = (&(&self.ell2 * &beta) * &self.comp.powf(&self.ell2)).recip();
        (kl, kr)
    }
}
