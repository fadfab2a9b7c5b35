//! Checkers for the inequalities satisfied by the ratio sequences.
//!
//! Checkers never assert a value for an unknown uniform constant. Inequalities
//! with explicit constants get a pass flag and a slack; the others report the
//! constant they imply at each level.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::BigReal;
use crate::error::{Error, Result};

use super::series::RatioSeries;

/// Default first level treated as "large n".
pub const DEFAULT_N0: usize = 5;

/// Digits kept when a value is written into a report.
const REPORT_BITS: usize = 64;

fn short(x: &BigReal) -> String {
    x.with_prec(REPORT_BITS).to_decimal_string()
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub check: String,
    pub level: usize,
    pub index: Option<usize>,
    pub lhs: String,
    pub rhs: String,
    pub slack: String,
    pub pass: bool,
    pub note: String,
}

impl Check {
    fn le(check: &str, level: usize, index: Option<usize>, lhs: &BigReal, rhs: &BigReal) -> Self {
        let slack = rhs - lhs;
        Check {
            check: check.into(),
            level,
            index,
            lhs: short(lhs),
            rhs: short(rhs),
            slack: short(&slack),
            pass: !slack.is_negative(),
            note: String::new(),
        }
    }

    fn lt(check: &str, level: usize, index: Option<usize>, lhs: &BigReal, rhs: &BigReal) -> Self {
        let mut c = Self::le(check, level, index, lhs, rhs);
        c.pass = (rhs - lhs).is_positive();
        c
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// A list of checks with the level from which failures count.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub n0: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn new(name: &str, n0: usize) -> Self {
        VerifyReport {
            name: name.into(),
            n0,
            checks: Vec::new(),
        }
    }

    pub fn hard_failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| !c.pass && c.level >= self.n0)
            .count()
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("report,check,level,index,lhs,rhs,slack,pass,note\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                self.name,
                c.check,
                c.level,
                c.index.map(|i| i.to_string()).unwrap_or_default(),
                c.lhs,
                c.rhs,
                c.slack,
                c.pass,
                c.note.replace(',', ";")
            );
        }
        s
    }
}

fn num(x: f64, prec: usize) -> BigReal {
    BigReal::from_f64(x, prec)
}

/// `(1 - l^{-j}) / (l - 1)`, continued by its limit `j` at `l = 1`.
fn t_cont(l: &BigReal, j: u64) -> BigReal {
    let p = l.prec();
    let one = BigReal::one(p);
    if l.rel_diff(&one).is_zero() {
        return BigReal::from_u64(j, p);
    }
    let lj = l.powi(j as usize).recip();
    &(&one - &lj) / &(l - &one)
}

/// `(1 - l^{j}) / (l - 1)`, continued by its limit `-j` at `l = 1`.
fn t_up(l: &BigReal, j: u64) -> BigReal {
    let p = l.prec();
    let one = BigReal::one(p);
    if l.rel_diff(&one).is_zero() {
        return -BigReal::from_u64(j, p);
    }
    &(&one - &l.powi(j as usize)) / &(l - &one)
}

fn need_level(series: &RatioSeries, n: usize, min: usize, what: &str) -> Result<()> {
    if n < min || n > series.depth() {
        return Err(Error::Depth(format!(
            "{what} needs {min} <= n <= {}, got {n}",
            series.depth()
        )));
    }
    Ok(())
}

/// The combined ratio inequality for each `k = 0..a_{n-1}` at level `n`.
pub fn verify_lemma1(series: &RatioSeries, n: usize) -> Result<VerifyReport> {
    need_level(series, n, 3, "lemma check")?;
    let e = &series.exps;
    let p = series.prec;
    let one = BigReal::one(p);
    let lv = series.level(n)?;
    let prev = series.level(n - 1)?;
    let a_pow = prev.alpha.powf(e.near(n));
    let s_n = series.s(n)?;
    let denom_gap = prev.gap.powf(e.near(n - 1));
    let mut rep = VerifyReport::new("lemma1", DEFAULT_N0);
    let a = series.quotient(n - 1) as usize;
    for k in 0..a {
        let b_pow = lv.beta[k].powf(e.near(n));
        let gamma = &lv.gamma1[k].powf(e.near(n)) / &denom_gap;
        let ag = &a_pow * &gamma;
        let lhs = &(&(&b_pow + &ag) * &(&one + &gamma)) / &(&(&one + &ag) * &(&b_pow + &gamma));
        let rhs = s_n * &lv.beta[k + 1];
        rep.checks.push(Check::le("lemma1", n, Some(k), &lhs, &rhs));
    }
    Ok(rep)
}

/// `M_n(l)`, or `None` when the radicand is negative.
pub fn m_factor(series: &RatioSeries, n: usize, l: &BigReal) -> Result<Option<BigReal>> {
    need_level(series, n, 4, "recursion factor")?;
    let p = series.prec;
    let one = BigReal::one(p);
    let two = BigReal::from_u64(2, p);
    let s1 = series.s(n - 1)?;
    let a1 = series.alpha(n - 1)?;
    let a2 = series.alpha(n - 2)?;
    let radicand = &one - &(&(&(&two * &(l - &one)) / l) * &(s1 * a1));
    if radicand.is_negative() {
        return Ok(None);
    }
    let m = &(&(&s1.powi(2) * &(&two / l)) / &(&one + &radicand.sqrt())) / &(&one - a2);
    Ok(Some(&m * &(series.sigma(n)? / series.sigma(n - 2)?)))
}

/// The quadratic recursion at level `n`; the exponent-one case only reports
/// its implied constant.
pub fn verify_recursion(series: &RatioSeries, n: usize) -> Result<VerifyReport> {
    need_level(series, n, 4, "recursion check")?;
    let l = series.exps.near(n);
    let one = BigReal::one(series.prec);
    let a_n = series.alpha(n)?;
    let a_2 = series.alpha(n - 2)?;
    let mut rep = VerifyReport::new("recursion", DEFAULT_N0);
    if l.rel_diff(&one).is_zero() {
        let w = &(a_n * series.sigma(n - 2)?) / &(series.sigma(n)? * a_2);
        let mut c = Check::le("recursion_linear", n, None, a_n, a_n);
        c.note = format!("implied constant {}", short(&w));
        rep.checks.push(c);
        return Ok(rep);
    }
    let lhs = a_n.powf(l);
    match m_factor(series, n, l)? {
        Some(m) => rep
            .checks
            .push(Check::le("recursion", n, None, &lhs, &(&m * &a_2.powi(2)))),
        None => {
            let mut c = Check::le("recursion", n, None, &lhs, &BigReal::zero(series.prec))
                .with_note("assumption breach: negative radicand");
            c.pass = false;
            rep.checks.push(c);
        }
    }
    Ok(rep)
}

/// The three asymptotic clauses on `x_n = alpha_n^{l/2}` for `n >= n0`.
///
/// Refuses exponents outside `[1, 2]^2`.
pub fn verify_apriori(series: &RatioSeries, n0: usize) -> Result<VerifyReport> {
    let p = series.prec;
    let (one, two) = (BigReal::one(p), BigReal::from_u64(2, p));
    for l in [&series.exps.ell1, &series.exps.ell2] {
        if l < &one || l > &two {
            return Err(Error::Domain(format!(
                "asymptotic bounds are stated for exponents in [1, 2], got {}",
                short(l)
            )));
        }
    }
    if series.depth() < 6 || n0 < 1 {
        return Err(Error::Depth("asymptotic check needs depth >= 6".into()));
    }
    let half = num(0.5, p);
    let x: Vec<BigReal> = (1..=series.depth())
        .map(|n| series.exps.pow(&series.levels[n - 1].alpha, n, &half))
        .collect();
    let (c55, c30, c44, c16) = (num(0.55, p), num(0.3, p), num(0.44, p), num(0.16, p));
    let mut rep = VerifyReport::new("apriori", n0);
    for n in n0..=series.depth() {
        let xn = &x[n - 1];
        rep.checks.push(Check::lt("below_0.55", n, None, xn, &c55));
        if n < series.depth() {
            let xm = &x[n];
            rep.checks.push(Check::lt(
                "every_other_below_0.3",
                n,
                None,
                &xn.min(xm),
                &c30,
            ));
            if xn > &c30 {
                let ok = xn < &c44 || xm < &c16;
                let mut c = Check::lt("escape_0.44_or_next_0.16", n, None, xn, &c44)
                    .with_note(format!("next {}", short(xm)));
                c.pass = ok;
                rep.checks.push(c);
            }
        }
    }
    Ok(rep)
}

/// Per-level implied constants of one lower-bound family.
#[derive(Clone, Debug, Serialize)]
pub struct ImpliedConstants {
    pub name: String,
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
}

impl ImpliedConstants {
    pub fn infimum(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn supremum(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Positive infimum, and the last third of the levels stays within a
    /// factor 100 of the largest constant.
    pub fn non_vanishing(&self) -> bool {
        if self.values.is_empty() {
            return false;
        }
        let tail = (self.values.len() / 3).max(3).min(self.values.len());
        let tail_min = self.values[self.values.len() - tail..]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        self.infimum() > 0.0 && tail_min.is_finite() && tail_min >= 0.01 * self.supremum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub n_from: usize,
    pub n_to: usize,
    pub families: Vec<ImpliedConstants>,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(ImpliedConstants::non_vanishing)
    }
}

/// Implied constants of the kappa, alpha and beta-chain lower bounds over
/// `n_from..=n_to`; requires a bounded-type rotation number.
pub fn verify_lower_bounds(
    series: &RatioSeries,
    n_from: usize,
    n_to: usize,
) -> Result<LowerBoundReport> {
    if !series.cf.is_bounded_type() {
        return Err(Error::Domain(
            "lower bounds need a rotation number of bounded type".into(),
        ));
    }
    let n_from = n_from.max(3);
    need_level(series, n_to, n_from, "lower-bound check")?;
    let e = &series.exps;
    let mut kappa = ImpliedConstants {
        name: "kappa".into(),
        levels: vec![],
        values: vec![],
    };
    let mut alpha = ImpliedConstants {
        name: "alpha".into(),
        ..kappa.clone()
    };
    let mut chain = ImpliedConstants {
        name: "beta_chain".into(),
        ..kappa.clone()
    };
    for n in n_from..=n_to {
        let (near, far) = (e.near(n), e.far(n));
        let a_n = series.quotient(n);
        let a_1 = series.alpha(n - 1)?;
        let kx = t_up(far, a_n + 1);
        kappa.levels.push(n);
        kappa
            .values
            .push((series.kappa(n)? / &a_1.powf(&kx)).to_f64());

        let e1 = &(far / near) * &t_cont(far, a_n);
        let e2 = near.powi(series.quotient(n - 1) as usize).recip();
        let rhs = &a_1.powf(&e1) * &series.alpha(n - 2)?.powf(&e2);
        alpha.levels.push(n);
        alpha.values.push((series.alpha(n)? / &rhs).to_f64());

        let lv = series.level(n)?;
        let worst = (0..lv.beta.len() - 1)
            .map(|i| (&lv.beta[i].powf(near) / &lv.beta[i + 1]).to_f64())
            .fold(f64::INFINITY, f64::min);
        chain.levels.push(n);
        chain.values.push(worst);
    }
    Ok(LowerBoundReport {
        n_from,
        n_to,
        families: vec![kappa, alpha, chain],
    })
}

/// `nu_n` and the additive constant implied by the order-two affine bound.
#[derive(Clone, Debug, Serialize)]
pub struct NuRow {
    pub n: usize,
    pub nu: String,
    pub residual: Option<String>,
}

pub fn nu_series(series: &RatioSeries) -> Vec<NuRow> {
    let e = &series.exps;
    (1..=series.depth())
        .map(|n| {
            let nu = &series.levels[n - 1].nu;
            let residual = (n >= 3).then(|| {
                let (near, far) = (e.near(n), e.far(n));
                let c1 = &(far / near) * &t_cont(far, series.quotient(n));
                let c2 = near.powi(series.quotient(n - 1) as usize).recip();
                let bound = &(&c1 * &series.levels[n - 2].nu) + &(&c2 * &series.levels[n - 3].nu);
                short(&(nu - &bound))
            });
            NuRow {
                n,
                nu: short(nu),
                residual,
            }
        })
        .collect()
}

/// `w_n(0)^{l}/alpha_{n-1}` followed by `w_n(i)/alpha_{n-1}` for `i >= 1`.
pub fn w_diagnostic(series: &RatioSeries, n: usize) -> Result<Vec<BigReal>> {
    need_level(series, n, 3, "comparability diagnostic")?;
    let lv = series.level(n)?;
    let a1 = series.alpha(n - 1)?;
    Ok(lv
        .w
        .iter()
        .enumerate()
        .map(|(i, w)| {
            if i == 0 {
                &w.powf(series.exps.near(n)) / a1
            } else {
                w / a1
            }
        })
        .collect())
}

/// Smallest and largest diagnostic value over `n_from..=depth`.
pub fn w_band(series: &RatioSeries, n_from: usize) -> Result<(f64, f64)> {
    let mut band = (f64::INFINITY, 0.0f64);
    for n in n_from.max(3)..=series.depth() {
        for v in w_diagnostic(series, n)? {
            let v = v.to_f64();
            band = (band.0.min(v), band.1.max(v));
        }
    }
    Ok(band)
}

/// Smallest and largest `(tau_n / alpha_{n-1}) / kappa_n` over `n_from..=depth`.
pub fn tau_kappa_band(series: &RatioSeries, n_from: usize) -> Result<(f64, f64)> {
    let mut band = (f64::INFINITY, 0.0f64);
    for n in n_from.max(3)..=series.depth() {
        let v = (&(series.tau(n)? / series.alpha(n - 1)?) / series.kappa(n)?).to_f64();
        band = (band.0.min(v), band.1.max(v));
    }
    Ok(band)
}

/// Largest forward-image ratio over `n_from..=depth`.
pub fn f_sigma_bound(series: &RatioSeries, n_from: usize) -> f64 {
    series
        .levels
        .iter()
        .filter(|l| l.n >= n_from)
        .filter_map(|l| l.f_sigma.as_ref().map(BigReal::to_f64))
        .fold(0.0, f64::max)
}

/// `ln |(0, q_n)|` over a range of levels, with its least-squares slope.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub levels: Vec<usize>,
    pub ln_gap: Vec<f64>,
    pub slope: f64,
    pub strictly_decreasing: bool,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.strictly_decreasing && self.slope < 0.0
    }
}

/// The closest returns of the critical value shrink at least exponentially.
pub fn return_decay(
    sets: &super::arcs::OrbitSets,
    table: &crate::rotation::ConvergentTable,
    n_from: usize,
    n_to: usize,
) -> Result<DecayReport> {
    if n_from < 1 || n_to > table.len() || n_to < n_from + 1 {
        return Err(Error::Depth(format!("decay check over {n_from}..={n_to}")));
    }
    let levels: Vec<usize> = (n_from..=n_to).collect();
    let ln_gap = levels
        .iter()
        .map(|&n| Ok(sets.gap(0, table.q(n) as i64)?.ln().to_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let k = ln_gap.len() as f64;
    let mx = levels.iter().sum::<usize>() as f64 / k;
    let my = ln_gap.iter().sum::<f64>() / k;
    let sxy: f64 = levels
        .iter()
        .zip(&ln_gap)
        .map(|(&n, y)| (n as f64 - mx) * (y - my))
        .sum();
    let sxx: f64 = levels.iter().map(|&n| (n as f64 - mx).powi(2)).sum();
    Ok(DecayReport {
        strictly_decreasing: ln_gap.windows(2).all(|w| w[1] < w[0]),
        slope: sxy / sxx,
        levels,
        ln_gap,
    })
}
