//! The scaling-ratio sequences, level by level.

use std::fmt::Write as _;

use crate::arith::BigReal;
use crate::error::{Error, Result};
use crate::rotation::{ContinuedFraction, ConvergentTable};

use super::arcs::OrbitSets;

/// The critical exponents and the level-parity rule that assigns them.
///
/// `f^{-q_n}(U)` lies left of `U` for odd `n` and right of it for even `n`,
/// so the exponent at the left endpoint governs odd levels.
#[derive(Clone, Debug)]
pub struct Exponents {
    pub ell1: BigReal,
    pub ell2: BigReal,
}

impl Exponents {
    pub fn new(ell1: &BigReal, ell2: &BigReal) -> Self {
        Exponents {
            ell1: ell1.clone(),
            ell2: ell2.clone(),
        }
    }

    /// Exponent on the side of `U` where `f^{-q_n}(U)` lies.
    pub fn near(&self, n: usize) -> &BigReal {
        if n % 2 == 1 {
            &self.ell1
        } else {
            &self.ell2
        }
    }

    /// Exponent on the opposite side.
    pub fn far(&self, n: usize) -> &BigReal {
        self.near(n + 1)
    }

    /// `x^{d * near(n)}`.
    pub fn pow(&self, x: &BigReal, n: usize, d: &BigReal) -> BigReal {
        x.powf(&(d * self.near(n)))
    }
}

/// Ratios at one level `n`; entries are `None` below the level where their
/// defining sets exist.
#[derive(Clone, Debug)]
pub struct LevelRatios {
    pub n: usize,
    pub alpha: BigReal,
    pub nu: BigReal,
    /// `|(-q_n, 0)|`.
    pub gap: BigReal,
    pub sigma: Option<BigReal>,
    pub kappa: Option<BigReal>,
    /// `|(1, q_n + 1)| / |(q_{n-1} + 1, 1)|`.
    pub f_sigma: Option<BigReal>,
    pub s: Option<BigReal>,
    pub tau: Option<BigReal>,
    /// `beta_n(k)` for `k = 0..=a_{n-1}`.
    pub beta: Vec<BigReal>,
    /// `gamma_{1,n}(k)` for `k = 0..=a_{n-1}`.
    pub gamma1: Vec<BigReal>,
    /// `w_n(i)` for `i = 0..a_{n-1}`.
    pub w: Vec<BigReal>,
}

#[derive(Clone, Debug)]
pub struct RatioSeries {
    pub exps: Exponents,
    pub cf: ContinuedFraction,
    pub table: ConvergentTable,
    pub prec: usize,
    /// `levels[n - 1]` holds level `n`.
    pub levels: Vec<LevelRatios>,
}

impl RatioSeries {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> Result<&LevelRatios> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::Depth(format!(
                "level {n} requested from a series of depth {}",
                self.levels.len()
            )));
        }
        Ok(&self.levels[n - 1])
    }

    pub fn alpha(&self, n: usize) -> Result<&BigReal> {
        Ok(&self.level(n)?.alpha)
    }

    /// `a_n`.
    pub fn quotient(&self, n: usize) -> u64 {
        self.cf
            .quotient(n)
            .expect("infinite or long enough expansion")
    }

    fn need<'a>(v: &'a Option<BigReal>, what: &str, n: usize) -> Result<&'a BigReal> {
        v.as_ref()
            .ok_or_else(|| Error::Depth(format!("{what} is undefined at level {n}")))
    }

    pub fn sigma(&self, n: usize) -> Result<&BigReal> {
        Self::need(&self.level(n)?.sigma, "sigma", n)
    }

    pub fn s(&self, n: usize) -> Result<&BigReal> {
        Self::need(&self.level(n)?.s, "s", n)
    }

    pub fn tau(&self, n: usize) -> Result<&BigReal> {
        Self::need(&self.level(n)?.tau, "tau", n)
    }

    pub fn kappa(&self, n: usize) -> Result<&BigReal> {
        Self::need(&self.level(n)?.kappa, "kappa", n)
    }

    pub fn beta(&self, n: usize, k: usize) -> Result<&BigReal> {
        self.level(n)?
            .beta
            .get(k)
            .ok_or_else(|| Error::Depth(format!("beta_{n}({k}) is undefined")))
    }

    pub fn alphas_f64(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.alpha.to_f64()).collect()
    }

    /// One row per level; list-valued columns are `;`-separated.
    pub fn to_csv(&self) -> String {
        let d = |x: &BigReal| x.to_decimal_string();
        let o = |x: &Option<BigReal>| x.as_ref().map(d).unwrap_or_default();
        let l = |v: &[BigReal]| v.iter().map(d).collect::<Vec<_>>().join(";");
        let mut s = String::from("n,q_n,alpha,nu,sigma,kappa,f_sigma,s,tau,beta,gamma1,w\n");
        for lv in &self.levels {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                lv.n,
                self.table.q(lv.n),
                d(&lv.alpha),
                d(&lv.nu),
                o(&lv.sigma),
                o(&lv.kappa),
                o(&lv.f_sigma),
                o(&lv.s),
                o(&lv.tau),
                l(&lv.beta),
                l(&lv.gamma1),
                l(&lv.w)
            );
        }
        s
    }
}

/// Orbit lengths needed for a series of the given depth:
/// `(backward arcs, forward points)`.
pub fn orbit_requirements(table: &ConvergentTable, depth: usize) -> (usize, usize) {
    let q = table.q(depth) as usize;
    (q, q + 1)
}

/// Computes every ratio for levels `1..=depth`.
pub fn compute_series(
    sets: &OrbitSets,
    cf: &ContinuedFraction,
    table: &ConvergentTable,
    exps: &Exponents,
    depth: usize,
) -> Result<RatioSeries> {
    if depth == 0 || depth > table.len() {
        return Err(Error::Depth(format!(
            "series depth {depth} exceeds the convergent table ({})",
            table.len()
        )));
    }
    let q = |n: usize| table.q(n) as i64;
    let mut levels = Vec::with_capacity(depth);
    for n in 1..=depth {
        let gap = sets.gap(-q(n), 0)?;
        let alpha = &gap / &(&gap + &sets.size(-q(n))?);
        let nu = -alpha.ln();
        let sigma = if n >= 2 {
            Some(&sets.gap(0, q(n))? / &sets.gap(q(n - 1), 0)?)
        } else {
            None
        };
        let kappa = if n >= 2 {
            Some(&sets.gap(0, q(n))? / &sets.gap(0, -q(n - 1))?)
        } else {
            None
        };
        let f_sigma = if n >= 2 {
            Some(&sets.gap(1, q(n) + 1)? / &sets.gap(q(n - 1) + 1, 1)?)
        } else {
            None
        };
        let (mut s, mut tau) = (None, None);
        let (mut beta, mut gamma1, mut w) = (Vec::new(), Vec::new(), Vec::new());
        if n >= 3 {
            s = Some(&sets.hull(-q(n - 2), 0)? / &sets.size(0)?);
            tau = Some(&sets.gap(0, q(n))? / &sets.gap(0, q(n - 2))?);
            let a = cf.quotient(n - 1).expect("table implies quotient") as i64;
            for k in 0..=a {
                let idx = -q(n) + k * q(n - 1);
                let g = sets.gap(idx, 0)?;
                beta.push(&g / &sets.gap_with_left(idx, 0)?);
                gamma1.push(g);
            }
            for i in 0..a {
                let here = -q(n) + i * q(n - 1);
                let next = here + q(n - 1);
                w.push(&sets.gap(next, here)? / &sets.size(here)?);
            }
        }
        levels.push(LevelRatios {
            n,
            alpha,
            nu,
            gap,
            sigma,
            kappa,
            f_sigma,
            s,
            tau,
            beta,
            gamma1,
            w,
        });
    }
    Ok(RatioSeries {
        exps: exps.clone(),
        cf: cf.clone(),
        table: table.clone(),
        prec: sets.prec(),
        levels,
    })
}
