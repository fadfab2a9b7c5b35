//! Adjustable-precision real numbers.
//!
//! [`BigReal`] is a thin value type over [`astro_float::BigFloat`] that keeps
//! its own working precision. Binary operations produce a result at the
//! smaller precision of their operands, so a computation never silently
//! claims more bits than its least precise input carried.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};

use crate::error::{Error, Result};

/// Working precision used when a caller does not ask for one.
pub const DEFAULT_PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("failed to allocate constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        BigReal { v, prec }
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, prec), prec)
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(x, prec), prec)
    }

    pub fn from_u64(x: u64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_u64(x, prec), prec)
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_u64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_u64(1, prec)
    }

    /// Exact power of two `2^k`.
    pub fn exp2(k: i64, prec: usize) -> Self {
        let mut v = BigFloat::from_u64(1, prec);
        // 1 is stored as 0.5 * 2^1.
        v.set_exponent((1 + k) as i32);
        Self::wrap(v, prec)
    }

    /// Parses a decimal string such as `0.25`, `-3`, or `1.5e-40`.
    pub fn parse(s: &str, prec: usize) -> Result<Self> {
        let t = s.trim();
        let ok = !t.is_empty()
            && t.chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        if !ok {
            return Err(Error::Parse(format!("not a decimal number: {s:?}")));
        }
        let v = with_consts(|cc| BigFloat::parse(t, Radix::Dec, prec, RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Parse(format!("not a decimal number: {s:?}")));
        }
        Ok(Self::wrap(v, prec))
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// The same value rounded (or zero-extended) to `prec` bits.
    pub fn with_prec(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        if v.set_precision(prec, RM).is_err() {
            return Self::wrap(BigFloat::nan(None), prec);
        }
        Self::wrap(v, prec)
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive() && !self.v.is_nan()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative() && !self.v.is_nan()
    }

    /// -1, 0 or 1. NaN maps to 0.
    pub fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn ln(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.ln(p, RM, cc)), p)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.exp(p, RM, cc)), p)
    }

    /// `self^e` for real `e`; `self` must be nonnegative unless `e` is integral.
    pub fn powf(&self, e: &BigReal) -> Self {
        let p = self.prec.min(e.prec);
        if self.is_zero() {
            return if e.is_positive() {
                Self::zero(p)
            } else if e.is_zero() {
                Self::one(p)
            } else {
                Self::wrap(BigFloat::from_f64(f64::INFINITY, p), p)
            };
        }
        if let Some(twice) = small_half_integer(e) {
            let base = self.with_prec(p);
            let mut r = base.powi((twice.unsigned_abs() / 2) as usize);
            if twice % 2 != 0 {
                r = &r * &base.sqrt();
            }
            return if twice < 0 { r.recip() } else { r };
        }
        Self::wrap(with_consts(|cc| self.v.pow(&e.v, p, RM, cc)), p)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.prec, RM), self.prec)
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.v.floor(), self.prec)
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Binary exponent `e` with `|self| in [2^(e-1), 2^e)`; `None` for zero and non-finite values.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() || !self.is_finite() {
            None
        } else {
            self.v.exponent().map(i64::from)
        }
    }

    /// Nearest `f64`; values outside the `f64` range saturate to 0 or infinity.
    // `Word` and the exponent type are narrower on 32-bit targets.
    #[allow(clippy::unnecessary_cast)]
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_inf_pos() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        if words.is_empty() || self.v.is_zero() {
            return 0.0;
        }
        // Gather the top 64 mantissa bits; the mantissa is stored least
        // significant word first and normalized to [1/2, 1).
        let word_bits = Word::BITS as usize;
        let mut top: u64 = 0;
        let mut taken = 0;
        for w in words.iter().rev() {
            if taken >= 64 {
                break;
            }
            top = if word_bits >= 64 {
                *w as u64
            } else {
                (top << word_bits) | (*w as u64)
            };
            taken += word_bits;
        }
        if taken < 64 {
            top <<= 64 - taken;
        }
        let mant = top as f64 / 18446744073709551616.0;
        let e = e as i32;
        let half = e / 2;
        let mag = mant * 2f64.powi(half) * 2f64.powi(e - half);
        match sign {
            Sign::Neg => -mag,
            Sign::Pos => mag,
        }
    }

    /// Integer value of an integral number (truncates any fraction).
    pub fn to_i64(&self) -> i64 {
        let f = self.to_f64();
        if f.abs() < 9.0e15 {
            return f.trunc() as i64;
        }
        self.to_decimal_string()
            .split(['.', 'e'])
            .next()
            .and_then(|s| s.parse().ok())
            .unwrap_or(i64::MAX)
    }

    /// `|self - other| / |other|`, or `|self - other|` when `other` is zero.
    pub fn rel_diff(&self, other: &Self) -> Self {
        let d = (self - other).abs();
        if other.is_zero() {
            d
        } else {
            &d / &other.abs()
        }
    }

    /// Shortest decimal string that parses back to exactly this value at
    /// this precision.
    pub fn to_decimal_string(&self) -> String {
        if self.v.is_nan() {
            return "NaN".into();
        }
        if self.v.is_inf() {
            return if self.v.is_inf_pos() { "inf" } else { "-inf" }.into();
        }
        if self.is_zero() {
            return "0".into();
        }
        let wide = self.with_prec(self.prec + 64);
        let raw =
            with_consts(|cc| wide.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into());
        let Some(sci) = SciDigits::from_astro(&raw) else {
            return raw;
        };
        let roundtrips = |k: usize| {
            let s = sci.rounded(k).render();
            BigReal::parse(&s, self.prec)
                .map(|back| back.v.cmp(&self.v) == Some(0))
                .unwrap_or(false)
        };
        let full = sci.digits.len();
        if !roundtrips(full) {
            return sci.render();
        }
        let (mut lo, mut hi) = (1usize, full);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if roundtrips(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        sci.rounded(lo).render()
    }
}

/// `2e` when `e` is a half-integer of modest size; such powers reduce to
/// `powi` and `sqrt`, which are exact-rounded and much cheaper than `pow`.
fn small_half_integer(e: &BigReal) -> Option<i64> {
    let twice = e.to_f64() * 2.0;
    if twice.fract() != 0.0 || twice.abs() > 256.0 {
        return None;
    }
    (BigReal::from_f64(twice / 2.0, e.prec()) == *e).then_some(twice as i64)
}

/// Decimal digits `d1 d2 d3 ...` with value `0.d1d2d3... * 10^exp10`.
struct SciDigits {
    negative: bool,
    digits: Vec<u8>,
    exp10: i64,
}

impl SciDigits {
    /// Parses astro-float's `d.ddd e±N` output.
    fn from_astro(s: &str) -> Option<Self> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (mant, exp) = match body.split_once('e') {
            Some((m, e)) => (m, e.parse::<i64>().ok()?),
            None => (body, 0),
        };
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let mut digits: Vec<u8> = int_part
            .bytes()
            .chain(frac_part.bytes())
            .map(|b| b.wrapping_sub(b'0'))
            .collect();
        if digits.iter().any(|d| *d > 9) {
            return None;
        }
        let mut exp10 = exp + int_part.len() as i64;
        while digits.first() == Some(&0) && digits.len() > 1 {
            digits.remove(0);
            exp10 -= 1;
        }
        while digits.last() == Some(&0) && digits.len() > 1 {
            digits.pop();
        }
        Some(SciDigits {
            negative,
            digits,
            exp10,
        })
    }

    /// Rounds half-up to `k` significant digits.
    fn rounded(&self, k: usize) -> SciDigits {
        if k >= self.digits.len() {
            return SciDigits {
                negative: self.negative,
                digits: self.digits.clone(),
                exp10: self.exp10,
            };
        }
        let mut digits = self.digits[..k].to_vec();
        let mut exp10 = self.exp10;
        if self.digits[k] >= 5 {
            let mut i = k;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    digits.pop();
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        while digits.last() == Some(&0) && digits.len() > 1 {
            digits.pop();
        }
        SciDigits {
            negative: self.negative,
            digits,
            exp10,
        }
    }

    fn render(&self) -> String {
        let ds: String = self.digits.iter().map(|d| (b'0' + d) as char).collect();
        let sign = if self.negative { "-" } else { "" };
        let n = ds.len() as i64;
        let e = self.exp10;
        if (-6..=21).contains(&e) {
            if e <= 0 {
                format!("{sign}0.{}{ds}", "0".repeat((-e) as usize))
            } else if e >= n {
                format!("{sign}{ds}{}", "0".repeat((e - n) as usize))
            } else {
                let (a, b) = ds.split_at(e as usize);
                format!("{sign}{a}.{b}")
            }
        } else {
            let (a, b) = ds.split_at(1);
            let frac = if b.is_empty() {
                String::new()
            } else {
                format!(".{b}")
            };
            format!("{sign}{a}{frac}e{}", e - 1)
        }
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}b]", self.to_decimal_string(), self.prec)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let p = self.prec.min(rhs.prec);
                BigReal::wrap(self.v.$inner(&rhs.v, p, RM), p)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(-&self.v, self.prec)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_min_of_operands() {
        let a = BigReal::from_f64(1.5, 128);
        let b = BigReal::from_f64(2.0, 320);
        assert_eq!((&a + &b).prec(), 128);
        assert_eq!((&b * &a).prec(), 128);
    }

    #[test]
    fn decimal_strings_are_short_for_short_values() {
        for (s, want) in [
            ("0.25", "0.25"),
            ("-0.75", "-0.75"),
            ("3", "3"),
            ("0.1", "0.1"),
            ("1e-40", "1e-40"),
            ("123456.5", "123456.5"),
        ] {
            let x = BigReal::parse(s, 256).unwrap();
            assert_eq!(x.to_decimal_string(), want);
        }
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        for p in [64, 128, 256, 512] {
            let third = &BigReal::one(p) / &BigReal::from_u64(3, p);
            let s = third.to_decimal_string();
            assert!(s.len() as f64 >= p as f64 * 0.3, "{p}: {s}");
            assert_eq!(BigReal::parse(&s, p).unwrap(), third);
            let tiny = &third * &BigReal::exp2(-300, p);
            assert_eq!(BigReal::parse(&tiny.to_decimal_string(), p).unwrap(), tiny);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(BigReal::parse("abc", 64).is_err());
        assert!(BigReal::parse("", 64).is_err());
        assert!(BigReal::parse("1/2", 64).is_err());
    }

    #[test]
    fn exp2_and_to_f64() {
        assert_eq!(BigReal::exp2(0, 64).to_f64(), 1.0);
        assert_eq!(BigReal::exp2(-3, 64).to_f64(), 0.125);
        assert_eq!(BigReal::exp2(10, 64).to_f64(), 1024.0);
        assert_eq!(BigReal::from_f64(-0.3, 128).to_f64(), -0.3);
        assert_eq!(BigReal::exp2(-2000, 64).to_f64(), 0.0);
        assert_eq!(BigReal::exp2(-5, 64).exponent(), Some(-4));
    }

    #[test]
    fn transcendental_sanity() {
        let p = 256;
        let two = BigReal::from_u64(2, p);
        let r = two.sqrt();
        assert!((&(&r * &r) - &two).abs() < BigReal::exp2(-250, p));
        let e = BigReal::one(p).exp();
        assert!((e.ln().to_f64() - 1.0).abs() < 1e-15);
        let x = BigReal::from_f64(0.3, p).powf(&BigReal::from_f64(1.5, p));
        assert!((x.to_f64() - 0.3f64.powf(1.5)).abs() < 1e-15);
        assert!(BigReal::zero(p).powf(&two).is_zero());
        for e in [2.5, -1.5, 3.0, 0.5, 1.25] {
            let y = BigReal::from_f64(0.3, p).powf(&BigReal::from_f64(e, p));
            assert!((y.to_f64() / 0.3f64.powf(e) - 1.0).abs() < 1e-14, "{e}");
        }
    }
}
