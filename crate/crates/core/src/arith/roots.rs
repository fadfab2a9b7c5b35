//! Deterministic bisection.

use super::bigreal::BigReal;
use crate::error::{Error, Result};

/// Bisection for a sign change of `g` on `[lo, hi]`.
///
/// Returns the midpoint of the final bracket, whose width is at most `tol`.
/// An exact zero at a midpoint is returned immediately.
pub fn bisect_root<G>(g: G, lo: &BigReal, hi: &BigReal, tol: &BigReal) -> Result<BigReal>
where
    G: Fn(&BigReal) -> BigReal,
{
    let bracket_err = || Error::Bracket {
        lo: lo.to_decimal_string(),
        hi: hi.to_decimal_string(),
    };
    if !tol.is_positive() || lo > hi {
        return Err(bracket_err());
    }
    let glo = g(lo);
    let ghi = g(hi);
    if glo.is_zero() {
        return Ok(lo.clone());
    }
    if ghi.is_zero() {
        return Ok(hi.clone());
    }
    if glo.signum() * ghi.signum() != -1 {
        return Err(bracket_err());
    }
    let lo_sign = glo.signum();
    let half = BigReal::exp2(-1, lo.prec());
    let (mut a, mut b) = (lo.clone(), hi.clone());
    // The bracket halves each step until it stops shrinking at the precision floor.
    while &b - &a > *tol {
        let mid = &(&a + &b) * &half;
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(&mid);
        if gm.is_zero() {
            return Ok(mid);
        }
        if gm.signum() == lo_sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(&(&a + &b) * &half)
}

/// Bisection for the boundary of a monotone predicate.
///
/// `pred` must hold at `lo` and fail at `hi`. Returns the final bracket
/// `(a, b)` with `pred(a)` true, `pred(b)` false, and `b - a <= tol`.
pub fn bisect_predicate<P>(
    pred: P,
    lo: &BigReal,
    hi: &BigReal,
    tol: &BigReal,
) -> Result<(BigReal, BigReal)>
where
    P: Fn(&BigReal) -> bool,
{
    if !pred(lo) || pred(hi) {
        return Err(Error::Bracket {
            lo: lo.to_decimal_string(),
            hi: hi.to_decimal_string(),
        });
    }
    let half = BigReal::exp2(-1, lo.prec());
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while &b - &a > *tol {
        let mid = &(&a + &b) * &half;
        if mid <= a || mid >= b {
            break;
        }
        if pred(&mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let p = 128;
        let x = bisect_root(
            |x| x - &BigReal::from_f64(0.5, p),
            &BigReal::zero(p),
            &BigReal::one(p),
            &BigReal::from_f64(1e-10, p),
        )
        .unwrap();
        assert!((x.to_f64() - 0.5).abs() <= 1e-10);
    }

    #[test]
    fn sqrt2_matches_independent_value() {
        let p = 256;
        let two = BigReal::from_u64(2, p);
        let x = bisect_root(
            |x| &(x * x) - &two,
            &BigReal::one(p),
            &two,
            &BigReal::parse("1e-20", p).unwrap(),
        )
        .unwrap();
        // Digits of sqrt(2) from an independent source.
        let want =
            BigReal::parse("1.41421356237309504880168872420969807856967187537694", p).unwrap();
        assert!((&x - &want).abs() <= BigReal::parse("1e-20", p).unwrap());
    }

    #[test]
    fn no_sign_change_is_bracket_error() {
        let p = 64;
        let r = bisect_root(
            |x| x.clone(),
            &BigReal::one(p),
            &BigReal::from_u64(2, p),
            &BigReal::from_f64(1e-6, p),
        );
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn predicate_boundary() {
        let p = 128;
        let t = BigReal::from_f64(0.3, p);
        let (a, b) = bisect_predicate(
            |x| *x < t,
            &BigReal::zero(p),
            &BigReal::one(p),
            &BigReal::exp2(-60, p),
        )
        .unwrap();
        assert!(a < t && b >= t);
        assert!((&b - &a) <= BigReal::exp2(-60, p));
    }
}
