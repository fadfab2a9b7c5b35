//! Cross-ratios of four points and their distortion along orbits.

use serde::Serialize;

use crate::arith::{arc_between, BigReal, CirclePoint};
use crate::error::{Error, Result};
use crate::flatmap::FlatCircleMap;

use super::arcs::OrbitSets;

/// Extra bits carried while forming a cross-ratio.
const CROSS_GUARD: usize = 64;

/// Four points `a, b, c, d` in strict positive cyclic order inside one arc.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub a: CirclePoint,
    pub b: CirclePoint,
    pub c: CirclePoint,
    pub d: CirclePoint,
}

impl Quadruple {
    pub fn new(a: CirclePoint, b: CirclePoint, c: CirclePoint, d: CirclePoint) -> Result<Self> {
        let q = Quadruple { a, b, c, d };
        let (u, v, w) = q.offsets(q.a.prec());
        let zero = BigReal::zero(u.prec());
        if !(u > zero && v > u && w > v && w < BigReal::one(w.prec())) {
            return Err(Error::Domain(
                "quadruple must be strictly ordered within one arc".into(),
            ));
        }
        Ok(q)
    }

    pub fn prec(&self) -> usize {
        self.a.prec()
    }

    /// Distances from `a` to `b`, `c`, `d` at `prec` bits.
    fn offsets(&self, prec: usize) -> (BigReal, BigReal, BigReal) {
        let a = self.a.rep().with_prec(prec);
        let off = |x: &CirclePoint| {
            let d = &x.rep().with_prec(prec) - &a;
            if d.is_negative() {
                &d + &BigReal::one(prec)
            } else {
                d
            }
        };
        (off(&self.b), off(&self.c), off(&self.d))
    }

    /// The image under `m`; points may merge where `m` is flat.
    pub fn image(&self, m: &FlatCircleMap) -> (CirclePoint, CirclePoint, CirclePoint, CirclePoint) {
        (
            m.eval(&self.a),
            m.eval(&self.b),
            m.eval(&self.c),
            m.eval(&self.d),
        )
    }

    /// `(b, c)` as an arc.
    pub fn middle(&self) -> Result<crate::arith::Arc> {
        arc_between(&self.b, &self.c)
    }

    /// `[a, d]` as an arc.
    pub fn hull(&self) -> Result<crate::arith::Arc> {
        arc_between(&self.a, &self.d)
    }
}

/// `(Cr, Po)` of four ordered points, allowing coincidences that keep the
/// denominator positive.
fn ratios(q: &Quadruple) -> Result<(BigReal, BigReal)> {
    let p = q.prec();
    let (u, v, w) = q.offsets(p + CROSS_GUARD);
    let den = &v * &(&w - &u);
    if !den.is_positive() {
        return Err(Error::Domain(
            "cross-ratio with vanishing denominator".into(),
        ));
    }
    let cr = &(&u * &(&w - &v)) / &den;
    let po = &(&w * &(&v - &u)) / &den;
    Ok((cr.with_prec(p), po.with_prec(p)))
}

/// `|b-a||d-c| / (|c-a||d-b|)`.
pub fn cross_cr(q: &Quadruple) -> BigReal {
    ratios(q).expect("valid quadruple").0
}

/// `|d-a||b-c| / (|c-a||d-b|)`.
pub fn cross_po(q: &Quadruple) -> BigReal {
    ratios(q).expect("valid quadruple").1
}

/// Result of pushing a quadruple along an orbit.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub steps: usize,
    /// Largest number of hulls `(a_i, d_i)` sharing a point.
    pub multiplicity: usize,
    pub prod_dcr: String,
    pub prod_dpo: String,
    /// Steps on which `m` is a diffeomorphism of `[a_i, d_i]`.
    pub diffeo_steps: usize,
    /// Smallest single-step `DPo` over the diffeomorphic steps.
    pub min_diffeo_dpo: Option<String>,
    pub min_diffeo_dpo_ok: bool,
}

/// Pushes `q` through `steps` iterates of `m`, multiplying the single-step
/// cross-ratio distortions.
///
/// Fails if some middle interval `(b_i, c_i)` meets the flat arc or two
/// points merge before the last step.
pub fn distortion_audit(
    m: &FlatCircleMap,
    q: &Quadruple,
    steps: usize,
) -> Result<DistortionReport> {
    let p = q.prec();
    let one = BigReal::one(p);
    let tol = BigReal::exp2(16 - p as i64, p);
    let mut cur = q.clone();
    let (mut dcr, mut dpo) = (one.clone(), one.clone());
    let mut hulls = Vec::with_capacity(steps);
    let mut diffeo_steps = 0;
    let mut min_dpo: Option<BigReal> = None;
    for i in 0..steps {
        if cur.middle()?.overlaps(m.flat()) {
            return Err(Error::Domain(format!(
                "middle interval meets the flat arc at step {i}"
            )));
        }
        let hull = cur.hull()?;
        let diffeo = !hull.overlaps(m.flat()) && !hull.contains(m.a()) && !hull.contains(m.b());
        let (cr0, po0) = ratios(&cur)?;
        if cr0.is_zero() || po0.is_zero() {
            return Err(Error::Domain(format!(
                "quadruple points merged before step {i}"
            )));
        }
        let (a, b, c, d) = cur.image(m);
        let next = Quadruple { a, b, c, d };
        let (cr1, po1) = ratios(&next)?;
        let step_dpo = &po1 / &po0;
        dcr = &dcr * &(&cr1 / &cr0);
        dpo = &dpo * &step_dpo;
        if diffeo {
            diffeo_steps += 1;
            min_dpo = Some(match min_dpo {
                Some(x) => x.min(&step_dpo),
                None => step_dpo,
            });
        }
        hulls.push(hull);
        cur = next;
    }
    let min_ok = min_dpo.as_ref().is_none_or(|x| x >= &(&one - &tol));
    Ok(DistortionReport {
        steps,
        multiplicity: max_overlap(&hulls),
        prod_dcr: dcr.with_prec(64).to_decimal_string(),
        prod_dpo: dpo.with_prec(64).to_decimal_string(),
        diffeo_steps,
        min_diffeo_dpo: min_dpo.map(|x| x.with_prec(64).to_decimal_string()),
        min_diffeo_dpo_ok: min_ok,
    })
}

/// Largest number of open arcs sharing a point.
fn max_overlap(arcs: &[crate::arith::Arc]) -> usize {
    // Events on [0, 1); arcs across 0 are split in two.
    let mut ev: Vec<(BigReal, i32)> = Vec::with_capacity(4 * arcs.len());
    for arc in arcs {
        let l = arc.left().rep().clone();
        let r = &l + arc.length();
        let one = BigReal::one(l.prec());
        if r > one {
            ev.push((l, 1));
            ev.push((one.clone(), -1));
            ev.push((BigReal::zero(one.prec()), 1));
            ev.push((&r - &one, -1));
        } else {
            ev.push((l, 1));
            ev.push((r, -1));
        }
    }
    ev.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite").then(x.1.cmp(&y.1)));
    let (mut cur, mut best) = (0i32, 0i32);
    for (_, d) in ev {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// The quadruple spanned by the sets `-q_n + k q_{n-1} + 1` and
/// `-q_{n-1} + 1`, taken in cyclic order; `0 <= k < a_{n-1}`.
pub fn chain_quadruple(
    sets: &OrbitSets,
    table: &crate::rotation::ConvergentTable,
    n: usize,
    k: u64,
) -> Result<Quadruple> {
    if n < 3 || n > table.len() {
        return Err(Error::Depth(format!("chain quadruple at level {n}")));
    }
    let (qn, qm) = (table.q(n) as i64, table.q(n - 1) as i64);
    let a = (qn - table.q(n - 2) as i64) / qm;
    if k as i64 >= a {
        return Err(Error::Domain(format!(
            "chain index {k} must be below a_{} = {a}",
            n - 1
        )));
    }
    let i = -qn + k as i64 * qm + 1;
    let j = -qm + 1;
    let (l, r) = if sets.left_of(i, j) { (i, j) } else { (j, i) };
    let (a, b) = sets.ends(l)?;
    let (c, d) = sets.ends(r)?;
    Quadruple::new(a, b, c, d)
}

/// Distortion along the `q_{n-1} - 1` steps that carry `-q_{n-1} + 1` onto `U`.
pub fn chain_audit(
    m: &FlatCircleMap,
    sets: &OrbitSets,
    table: &crate::rotation::ConvergentTable,
    n: usize,
    k: u64,
) -> Result<DistortionReport> {
    let q = chain_quadruple(sets, table, n, k)?;
    distortion_audit(m, &q, (table.q(n - 1) as usize).saturating_sub(1))
}
