//! Rotation-number estimates, parameter tuning, and closest returns.
//!
//! Tuning bisects on the offset `t = c_lift - b` in `[0, 1]`. For an
//! irrational rotation number `rho`, `F^{q_n}(b) - b - p_n` has the sign of
//! `q_n rho - p_n`, which is `(-1)^(n+1)`, and the displacement is
//! nondecreasing in `t`. At even levels the return must also clear `U`
//! itself: landing inside `U` means the orbit of `U` is periodic with period
//! `q_n`. The parameters meeting every level `n <= N` form an interval; a midpoint failing first at an odd level lies below it and one
//! failing first at an even level lies above it.

use crate::arith::{mod1, Arc, BigReal, CirclePoint};
use crate::error::{Error, Result};
use crate::flatmap::{FlatCircleMap, LiftState};

use super::cf::{convergents, ContinuedFraction, ConvergentTable};

/// Extra levels tuned beyond the requested depth, so that partitions at the
/// requested depth see correct combinatorics one level further out.
pub const TUNE_GUARD_LEVELS: usize = 1;

/// `((F^n(x0) - x0) / n, 1/n)`.
pub fn rotation_number_estimate(
    m: &FlatCircleMap,
    n_iters: usize,
    x0: &CirclePoint,
) -> (BigReal, BigReal) {
    let p = m.prec();
    let n = n_iters.max(1);
    let start = LiftState::at(x0);
    let mut s = start.clone();
    for _ in 0..n {
        s = m.lift_eval(&s);
    }
    let nn = BigReal::from_u64(n as u64, p);
    let est = &(&s.value() - &start.value()) / &nn;
    (est, nn.recip())
}

/// A map tuned to the closest-return combinatorics of a target rotation number.
#[derive(Clone, Debug)]
pub struct TunedMap {
    pub map: FlatCircleMap,
    pub target: ContinuedFraction,
    /// Levels whose sign condition was enforced, including the guard levels.
    pub tuned_levels: usize,
    /// Depth promised to callers (`tuned_levels - TUNE_GUARD_LEVELS`).
    pub depth: usize,
    pub convergents: ConvergentTable,
    pub bisection_steps: usize,
}

/// First level `n <= levels` whose sign condition fails at offset `t`, if any.
fn first_failure(
    m: &FlatCircleMap,
    table: &ConvergentTable,
    levels: usize,
    t: &BigReal,
) -> Option<usize> {
    let p = m.prec();
    let b = m.b().rep();
    let u = m.flat().length();
    let mc = m.with_c(&mod1(&(b + t)).expect("finite offset"));
    // The lift of mc starts at c_lift = b + t unless t rounds to a full turn.
    let mut s = LiftState::at(m.b());
    let mut steps = 0u64;
    for n in 1..=levels {
        let target = table.q(n);
        while steps < target {
            s = mc.lift_eval(&s);
            steps += 1;
        }
        let g = &(&s.value() - b) - &BigReal::from_u64(table.p(n), p);
        let ok = if n % 2 == 1 {
            g.is_positive()
        } else {
            (&g + u).is_negative()
        };
        if !ok {
            return Some(n);
        }
    }
    None
}

fn check_target(target: &ContinuedFraction, levels: usize) -> Result<ConvergentTable> {
    convergents(target, levels)
}

/// Tunes `c` so that the closest returns of the orbit of `b` follow `target`
/// up to `depth` (plus the guard levels).
pub fn tune_parameter(
    ell1: &BigReal,
    ell2: &BigReal,
    flat: &Arc,
    target: &ContinuedFraction,
    depth: usize,
    prec: usize,
) -> Result<TunedMap> {
    let m = FlatCircleMap::new(ell1, ell2, flat, &CirclePoint::zero(prec), prec)?;
    tune_from(&m, target, depth, None)
}

/// Tunes starting from `m`; when `start` is given it is tried first and
/// kept unchanged if it already satisfies every level.
pub fn tune_from(
    m: &FlatCircleMap,
    target: &ContinuedFraction,
    depth: usize,
    start: Option<&CirclePoint>,
) -> Result<TunedMap> {
    if depth < 2 {
        return Err(Error::Depth(format!("tuning depth {depth} must be >= 2")));
    }
    let levels = depth + TUNE_GUARD_LEVELS;
    let table = check_target(target, levels)?;
    let p = m.prec();
    let budget = 4 * p;
    let half = BigReal::exp2(-1, p);
    let mut lo = BigReal::zero(p);
    let mut hi = BigReal::one(p);
    let mut per_level = vec![0usize; levels + 1];
    let mut steps = 0usize;

    let mut mid = match start {
        Some(c) => m.b().dist_to(c),
        None => half.clone(),
    };
    loop {
        let Some(n) = first_failure(m, &table, levels, &mid) else {
            let c = mod1(&(m.b().rep() + &mid))?;
            return Ok(TunedMap {
                map: m.with_c(&c),
                target: target.clone(),
                tuned_levels: levels,
                depth,
                convergents: table,
                bisection_steps: steps,
            });
        };
        if n % 2 == 1 {
            lo = mid.clone();
        } else {
            hi = mid.clone();
        }
        per_level[n] += 1;
        if per_level[n] > budget {
            return Err(Error::Tuning {
                level: n,
                reason: format!("bisection budget of {budget} steps exhausted"),
                lo: lo.to_decimal_string(),
                hi: hi.to_decimal_string(),
            });
        }
        let next = &(&lo + &hi) * &half;
        if next <= lo || next >= hi {
            return Err(Error::Precision {
                index: n,
                reason: format!(
                    "parameter bracket collapsed at {p} bits before level {n} was satisfied"
                ),
            });
        }
        mid = next;
        steps += 1;
    }
}

/// Empirical closest-return times of the orbit of `U`, `q_1..q_depth`.
///
/// A point `f^i(U)` is a right record when it falls strictly between `b` and
/// the closest earlier point on that side, and a left record likewise before
/// `a`. Time 1 is a record on both sides. Sorting records by time (right
/// before left at equal times) and keeping the last entry of each run of
/// same-side records yields the closest-return times.
pub fn closest_returns(m: &FlatCircleMap, depth: usize, max_iter: u64) -> Vec<u64> {
    #[derive(Clone, Copy, PartialEq)]
    enum Side {
        R,
        L,
    }
    let mut records: Vec<(u64, Side)> = Vec::new();
    let mut x = m.c().clone();
    let mut right_best = m.b().dist_to(&x);
    let mut left_best = x.dist_to(m.a());
    records.push((1, Side::R));
    records.push((1, Side::L));
    for i in 2..=max_iter {
        x = m.eval(&x);
        if m.flat().contains(&x) {
            break;
        }
        let dr = m.b().dist_to(&x);
        let dl = x.dist_to(m.a());
        if dr < right_best {
            right_best = dr;
            records.push((i, Side::R));
        } else if dl < left_best {
            left_best = dl;
            records.push((i, Side::L));
        }
    }
    let mut out: Vec<u64> = Vec::new();
    let mut run_side = None;
    for (t, side) in records {
        if run_side == Some(side) {
            *out.last_mut().expect("run has an entry") = t;
        } else {
            out.push(t);
            run_side = Some(side);
        }
    }
    // The final run may still grow beyond max_iter.
    out.pop();
    out.truncate(depth);
    out
}

/// Closest returns of a tuned map, compared against the target's convergents.
pub fn check_closest_returns(tuned: &TunedMap, depth: usize) -> Result<Vec<u64>> {
    if depth > tuned.depth + 1 {
        return Err(Error::Depth(format!(
            "closest returns to depth {depth} requested from a map tuned to depth {}",
            tuned.depth
        )));
    }
    let table = convergents(&tuned.target, depth + 1)?;
    let found = closest_returns(&tuned.map, depth, table.q(depth + 1));
    let expected = table.qs()[..depth].to_vec();
    if found != expected {
        return Err(Error::Combinatorics { expected, found });
    }
    Ok(found)
}
