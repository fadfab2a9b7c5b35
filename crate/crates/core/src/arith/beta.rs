//! Regularized incomplete beta function and its inverse.
//!
//! Evaluation reduces to `x <= p/(p+q)` through `I_x(p,q) = 1 - I_{1-x}(q,p)`.
//! Below [`SERIES_MAX_X`] the binomial power series is summed from cached
//! coefficients. Above it the interval is covered by anchors `x0`, each
//! holding the Taylor expansion of `I` at `x0`, built on first use. An
//! anchor is only used within `1/16` of its distance to the nearest
//! singularity (0 or 1), so every expansion gains at least 4 bits per term.
//!
//! The reference routines (series and Lentz continued fraction) compute
//! anchor values and the complete beta function, which is assembled from two
//! half-interval series so no Gamma function is needed. All internal work
//! runs with [`GUARD_BITS`] extra bits.

use std::sync::{Arc, OnceLock};

use super::bigreal::BigReal;
use crate::error::{Error, Result};

pub const GUARD_BITS: usize = 64;

/// Upper end of the power-series region (at least 6 bits per term).
const SERIES_MAX_X: f64 = 1.0 / 64.0;

/// Anchor spacing: the covered half-width times this is at most the
/// distance from the anchor to 0 and to 1.
const ANCHOR_RATIO: f64 = 17.0;

/// Reference routines below this reduced argument use the series.
const REF_SERIES_MAX_X: f64 = 0.3;

const MAX_TERMS_PER_BIT: usize = 16;

fn work_prec(prec: usize) -> usize {
    prec + GUARD_BITS
}

fn tiny_cutoff(w: usize) -> BigReal {
    BigReal::exp2(-(w as i64), w)
}

/// `B_x(p, q) / x^p = sum_k c_k x^k / (p + k)`, `c_k = (-1)^k binom(q-1, k)`.
fn series_sum(x: &BigReal, p: &BigReal, q: &BigReal) -> BigReal {
    let w = x.prec();
    let eps = tiny_cutoff(w);
    let one = BigReal::one(w);
    let mut sum = p.recip();
    let mut c = one.clone();
    let mut xk = one.clone();
    let q_f = q.to_f64();
    let cap = MAX_TERMS_PER_BIT * w + q_f.ceil() as usize;
    for k in 0..cap {
        let k1 = BigReal::from_u64(k as u64 + 1, w);
        c = &(&c * &(&k1 - q)) / &k1;
        xk = &xk * x;
        let term = &(&c * &xk) / &(p + &k1);
        sum = &sum + &term;
        if term.is_zero() && (k as f64) + 1.0 >= q_f {
            break;
        }
        // Terms may grow while k < q; only the tail is monotone.
        if (k as f64) + 1.0 > q_f && term.abs() <= &sum.abs() * &eps {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn cont_frac(x: &BigReal, p: &BigReal, q: &BigReal) -> BigReal {
    let w = x.prec();
    let eps = tiny_cutoff(w);
    let tiny = BigReal::exp2(-4 * w as i64, w);
    let one = BigReal::one(w);
    let guard = |v: BigReal| if v.abs() < tiny { tiny.clone() } else { v };
    let qab = p + q;
    let qap = p + &one;
    let qam = p - &one;
    let mut c = one.clone();
    let mut d = guard(&one - &(&(&qab * x) / &qap)).recip();
    let mut h = d.clone();
    for m in 1..=(MAX_TERMS_PER_BIT * w) as u64 {
        let mr = BigReal::from_u64(m, w);
        let m2 = BigReal::from_u64(2 * m, w);
        let aa = &(&(&mr * &(q - &mr)) * x) / &(&(&qam + &m2) * &(p + &m2));
        d = guard(&one + &(&aa * &d)).recip();
        c = guard(&one + &(&aa / &c));
        h = &h * &(&d * &c);
        let aa = -&(&(&(&(p + &mr) * &(&qab + &mr)) * x) / &(&(p + &m2) * &(&qap + &m2)));
        d = guard(&one + &(&aa * &d)).recip();
        c = guard(&one + &(&aa / &c));
        let del = &d * &c;
        h = &h * &del;
        if (&del - &one).abs() <= eps {
            break;
        }
    }
    h
}

/// Reference `B_x(p, q)` for `0 < x <= p/(p+q)`.
fn reference_lower(x: &BigReal, p: &BigReal, q: &BigReal) -> BigReal {
    let one = BigReal::one(x.prec());
    let xp = x.powf(p);
    if x.to_f64() <= REF_SERIES_MAX_X {
        &xp * &series_sum(x, p, q)
    } else {
        let x1q = (&one - x).powf(q);
        &(&(&xp * &x1q) * &cont_frac(x, p, q)) / p
    }
}

fn complete_beta(p: &BigReal, q: &BigReal) -> BigReal {
    let half = BigReal::exp2(-1, p.prec());
    let xp = half.powf(p);
    let xq = half.powf(q);
    &(&xp * &series_sum(&half, p, q)) + &(&xq * &series_sum(&half, q, p))
}

fn check_shape(p: &BigReal, q: &BigReal) -> Result<()> {
    if !p.is_positive() || !q.is_positive() || !p.is_finite() || !q.is_finite() {
        return Err(Error::Domain(format!(
            "beta shape parameters must be positive, got ({p}, {q})"
        )));
    }
    Ok(())
}

/// Taylor expansion `I(x0 + h) = sum_k e_k h^k`.
#[derive(Debug)]
struct Anchor {
    x0: BigReal,
    radius: f64,
    coeffs: Vec<BigReal>,
}

/// Evaluation of `I_x(p, q)` on `(0, mode]` for one orientation of `(p, q)`.
#[derive(Debug)]
struct Half {
    p: BigReal,
    q: BigReal,
    beta: BigReal,
    mode: BigReal,
    /// `d_k = c_k / (p + k)`.
    series: Vec<BigReal>,
    centers: Vec<f64>,
    lefts: Vec<f64>,
    anchors: Vec<OnceLock<Anchor>>,
}

impl Half {
    fn new(p: &BigReal, q: &BigReal, beta: &BigReal, mode: &BigReal) -> Half {
        let w = p.prec();
        let q_f = q.to_f64();
        let n_series = w / 6 + q_f.max(0.0).ceil() as usize + 16;
        let mut series = Vec::with_capacity(n_series);
        let mut c = BigReal::one(w);
        for k in 0..n_series {
            let kr = BigReal::from_u64(k as u64, w);
            series.push(&c / &(p + &kr));
            let k1 = BigReal::from_u64(k as u64 + 1, w);
            c = &(&c * &(&k1 - q)) / &k1;
        }
        let mode_f = mode.to_f64();
        let (mut centers, mut lefts) = (Vec::new(), Vec::new());
        let mut left = SERIES_MAX_X;
        while left < mode_f {
            let half_width = left.min(1.0 - left) / ANCHOR_RATIO;
            lefts.push(left);
            centers.push(left + half_width);
            left += 2.0 * half_width;
        }
        let anchors = centers.iter().map(|_| OnceLock::new()).collect();
        Half {
            p: p.clone(),
            q: q.clone(),
            beta: beta.clone(),
            mode: mode.clone(),
            series,
            centers,
            lefts,
            anchors,
        }
    }

    fn anchor(&self, j: usize) -> &Anchor {
        self.anchors[j].get_or_init(|| self.build_anchor(self.centers[j]))
    }

    fn build_anchor(&self, center: f64) -> Anchor {
        let w = self.p.prec();
        let one = BigReal::one(w);
        let x0 = BigReal::from_f64(center, w);
        let y0 = &one - &x0;
        let radius = center.min(1.0 - center);
        let n = (w as f64 / ANCHOR_RATIO.log2()).ceil() as usize + 24;
        let pm = &self.p - &one;
        let qm = &self.q - &one;
        // (1 + u/x0)^(p-1) and (1 - u/y0)^(q-1) as power series in u.
        let mut a = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        a.push(one.clone());
        c.push(one.clone());
        for k in 0..n {
            let kr = BigReal::from_u64(k as u64, w);
            let k1 = BigReal::from_u64(k as u64 + 1, w);
            a.push(&(&a[k] * &(&pm - &kr)) / &(&k1 * &x0));
            c.push(&(&c[k] * &(&kr - &qm)) / &(&k1 * &y0));
        }
        let d0 = &(&x0.powf(&pm) * &y0.powf(&qm)) / &self.beta;
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(&reference_lower(&x0, &self.p, &self.q) / &self.beta);
        for k in 0..n {
            let mut g = BigReal::zero(w);
            for i in 0..=k {
                g = &g + &(&a[i] * &c[k - i]);
            }
            coeffs.push(&(&d0 * &g) / &BigReal::from_u64(k as u64 + 1, w));
        }
        Anchor { x0, radius, coeffs }
    }

    fn anchor_for(&self, xf: f64) -> Option<usize> {
        if xf <= SERIES_MAX_X || self.lefts.is_empty() {
            return None;
        }
        Some(self.lefts.partition_point(|&l| l <= xf).saturating_sub(1))
    }

    /// Terms needed at offset `h` from an anchor of the given radius.
    fn terms_needed(anchor: &Anchor, h: &BigReal) -> usize {
        let ratio = h.abs().to_f64() / anchor.radius;
        let w = h.prec() as f64;
        let n = if ratio <= 0.0 {
            1
        } else {
            (w / -ratio.log2()).ceil() as usize + 8
        };
        n.min(anchor.coeffs.len() - 1)
    }

    /// `(I, x^p)` via the series, for small `x`.
    fn series_eval(&self, x: &BigReal) -> (BigReal, BigReal) {
        let w = x.prec();
        let eps = tiny_cutoff(w);
        let q_f = self.q.to_f64();
        let mut sum = self.series[0].clone();
        let mut xk = BigReal::one(w);
        for (k, d) in self.series.iter().enumerate().skip(1) {
            xk = &xk * x;
            let term = d * &xk;
            sum = &sum + &term;
            if (k as f64) > q_f && term.abs() <= &sum.abs() * &eps {
                break;
            }
        }
        let xp = x.powf(&self.p);
        (&(&xp * &sum) / &self.beta, xp)
    }

    /// `I_x` for `0 < x <= mode`.
    fn eval(&self, x: &BigReal) -> BigReal {
        match self.anchor_for(x.to_f64()) {
            None => self.series_eval(x).0,
            Some(j) => {
                let an = self.anchor(j);
                let h = x - &an.x0;
                let n = Self::terms_needed(an, &h);
                let mut s = an.coeffs[n].clone();
                for k in (0..n).rev() {
                    s = &(&s * &h) + &an.coeffs[k];
                }
                s
            }
        }
    }

    /// `(I_x, density(x))` for `0 < x <= mode`.
    fn eval_with_density(&self, x: &BigReal) -> (BigReal, BigReal) {
        let w = x.prec();
        let one = BigReal::one(w);
        match self.anchor_for(x.to_f64()) {
            None => {
                let (i, xp) = self.series_eval(x);
                let tail = (&one - x).powf(&(&self.q - &one));
                let dens = &(&(&xp / x) * &tail) / &self.beta;
                (i, dens)
            }
            Some(j) => {
                let an = self.anchor(j);
                let h = x - &an.x0;
                let n = Self::terms_needed(an, &h);
                let mut s = an.coeffs[n].clone();
                let mut ds = &an.coeffs[n] * &BigReal::from_u64(n as u64, w);
                for k in (0..n).rev() {
                    s = &(&s * &h) + &an.coeffs[k];
                    if k >= 1 {
                        ds = &(&ds * &h) + &(&an.coeffs[k] * &BigReal::from_u64(k as u64, w));
                    }
                }
                (s, ds)
            }
        }
    }

    /// Double-precision inverse where it is representable, else the
    /// leading-order power law `I_x ~ x^p / (p B)`.
    fn initial_guess(&self, y: &BigReal) -> BigReal {
        let w = y.prec();
        let yf = y.to_f64();
        if yf > 1e-250 {
            let g = statrs::function::beta::inv_beta_reg(self.p.to_f64(), self.q.to_f64(), yf);
            if g.is_finite() && g > 1e-250 {
                return BigReal::from_f64(g, w);
            }
        }
        (&(y * &self.p) * &self.beta).powf(&self.p.recip())
    }

    /// Root of `I_x = y` on `(0, mode]`, assuming `0 < y <= I_mode`.
    fn solve(&self, y: &BigReal) -> BigReal {
        let w = y.prec();
        let eps = BigReal::exp2(-(w as i64) + 4, w);
        let half = BigReal::exp2(-1, w);
        let (mut lo, mut hi) = (BigReal::zero(w), self.mode.clone());
        let mut x = self.initial_guess(y);
        if !(x.is_positive() && x < hi) {
            x = &hi * &half;
        }
        for _ in 0..(4 * w) {
            let (ix, dens) = self.eval_with_density(&x);
            let g = &ix - y;
            if g.is_zero() {
                return x;
            }
            if g.is_positive() {
                hi = x.clone();
            } else {
                lo = x.clone();
            }
            let newton = &x - &(&g / &dens);
            let next = if dens.is_positive() && newton > lo && newton < hi {
                newton
            } else {
                &(&lo + &hi) * &half
            };
            let moved = (&next - &x).abs();
            x = next;
            if moved <= &x.abs() * &eps || &hi - &lo <= &x.abs() * &eps {
                break;
            }
        }
        x
    }
}

/// `I_x(p, q)` for a fixed pair of shape parameters.
///
/// Cloning is cheap; clones share the lazily built anchor tables.
#[derive(Clone, Debug)]
pub struct BetaProfile {
    prec: usize,
    lower: Arc<Half>,
    upper: Arc<Half>,
    i_mode: BigReal,
}

impl BetaProfile {
    pub fn new(p: &BigReal, q: &BigReal, prec: usize) -> Result<Self> {
        check_shape(p, q)?;
        let w = work_prec(prec);
        let p = p.with_prec(w);
        let q = q.with_prec(w);
        let beta = complete_beta(&p, &q);
        let mode = &p / &(&p + &q);
        let i_mode = &reference_lower(&mode, &p, &q) / &beta;
        let one = BigReal::one(w);
        Ok(BetaProfile {
            prec,
            lower: Arc::new(Half::new(&p, &q, &beta, &mode)),
            upper: Arc::new(Half::new(&q, &p, &beta, &(&one - &mode))),
            i_mode,
        })
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn p(&self) -> BigReal {
        self.lower.p.with_prec(self.prec)
    }

    pub fn q(&self) -> BigReal {
        self.lower.q.with_prec(self.prec)
    }

    /// `B(p, q)`.
    pub fn beta(&self) -> BigReal {
        self.lower.beta.with_prec(self.prec)
    }

    fn mirrored(&self) -> BetaProfile {
        let one = BigReal::one(self.i_mode.prec());
        BetaProfile {
            prec: self.prec,
            lower: self.upper.clone(),
            upper: self.lower.clone(),
            i_mode: &one - &self.i_mode,
        }
    }

    fn check_unit(x: &BigReal, what: &str) -> Result<()> {
        if !x.is_finite() || x.is_negative() || *x > BigReal::one(x.prec()) {
            return Err(Error::Domain(format!("{what} = {x} outside [0, 1]")));
        }
        Ok(())
    }

    /// `I_x(p, q)` at working precision.
    fn reg_w(&self, x: &BigReal) -> BigReal {
        let w = x.prec();
        if x.is_zero() {
            return BigReal::zero(w);
        }
        let one = BigReal::one(w);
        if *x >= one {
            return one;
        }
        if *x <= self.lower.mode {
            self.lower.eval(x)
        } else {
            &one - &self.upper.eval(&(&one - x))
        }
    }

    /// `I_x(p, q)`.
    pub fn reg(&self, x: &BigReal) -> Result<BigReal> {
        Self::check_unit(x, "x")?;
        Ok(self
            .reg_w(&x.with_prec(work_prec(self.prec)))
            .with_prec(self.prec))
    }

    /// `I_x(p, q)` from the series and continued fraction alone, bypassing
    /// the anchor tables.
    pub fn reg_reference(&self, x: &BigReal) -> Result<BigReal> {
        Self::check_unit(x, "x")?;
        let w = work_prec(self.prec);
        let x = x.with_prec(w);
        let one = BigReal::one(w);
        if x.is_zero() || x >= one {
            return Ok(if x.is_zero() {
                BigReal::zero(self.prec)
            } else {
                BigReal::one(self.prec)
            });
        }
        let (lo, up) = (&self.lower, &self.upper);
        let v = if x <= lo.mode {
            &reference_lower(&x, &lo.p, &lo.q) / &lo.beta
        } else {
            &one - &(&reference_lower(&(&one - &x), &up.p, &up.q) / &up.beta)
        };
        Ok(v.with_prec(self.prec))
    }

    /// `1 - I_{1-t}(p, q) = I_t(q, p)`: the upper tail measured from `x = 1`,
    /// accurate when `t` is tiny.
    pub fn tail(&self, t: &BigReal) -> Result<BigReal> {
        Self::check_unit(t, "t")?;
        let w = work_prec(self.prec);
        Ok(self.mirrored().reg_w(&t.with_prec(w)).with_prec(self.prec))
    }

    /// Density `x^(p-1) (1-x)^(q-1) / B(p, q)`.
    pub fn density(&self, x: &BigReal) -> BigReal {
        let w = work_prec(self.prec);
        let x = x.with_prec(w);
        let one = BigReal::one(w);
        let h = &self.lower;
        let a = x.powf(&(&h.p - &one));
        let b = (&one - &x).powf(&(&h.q - &one));
        (&(&a * &b) / &h.beta).with_prec(self.prec)
    }

    /// The `x` in `[0, 1]` with `I_x(p, q) = y`.
    pub fn inv(&self, y: &BigReal) -> Result<BigReal> {
        Self::check_unit(y, "y")?;
        let w = work_prec(self.prec);
        let y = y.with_prec(w);
        let one = BigReal::one(w);
        if y.is_zero() {
            return Ok(BigReal::zero(self.prec));
        }
        if y >= one {
            return Ok(BigReal::one(self.prec));
        }
        let x = if y <= self.i_mode {
            self.lower.solve(&y)
        } else {
            &one - &self.upper.solve(&(&one - &y))
        };
        Ok(x.with_prec(self.prec))
    }

    /// The `t` with `tail(t) = v`, i.e. `1 - x` where `I_x(p, q) = 1 - v`.
    pub fn inv_tail(&self, v: &BigReal) -> Result<BigReal> {
        self.mirrored().inv(v)
    }
}

/// `I_x(p, q)`.
pub fn reg_inc_beta(x: &BigReal, p: &BigReal, q: &BigReal) -> Result<BigReal> {
    BetaProfile::new(p, q, x.prec())?.reg(x)
}

/// The `x` with `I_x(p, q) = y`.
pub fn inv_reg_inc_beta(y: &BigReal, p: &BigReal, q: &BigReal) -> Result<BigReal> {
    BetaProfile::new(p, q, y.prec())?.inv(y)
}
