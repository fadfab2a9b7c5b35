//! Continued fractions `[a_1, a_2, ...]` of numbers in `(0, 1)` and their convergents.

use std::fmt;
use std::str::FromStr;

use crate::arith::BigReal;
use crate::error::{Error, Result};

/// Partial quotients `a_1, a_2, ...` (with `a_0 = 0`): a finite prefix followed
/// by an optional repeating block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    prefix: Vec<u64>,
    period: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::Parse("continued fraction has no quotients".into()));
        }
        if prefix.iter().chain(&period).any(|&a| a == 0) {
            return Err(Error::Parse("partial quotients must be >= 1".into()));
        }
        Ok(ContinuedFraction { prefix, period })
    }

    pub fn finite(quotients: Vec<u64>) -> Result<Self> {
        Self::new(quotients, Vec::new())
    }

    pub fn periodic(block: Vec<u64>) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::Parse("empty repeating block".into()));
        }
        Self::new(Vec::new(), block)
    }

    /// `[1, 1, 1, ...]`, the golden mean `(sqrt 5 - 1) / 2`.
    pub fn golden() -> Self {
        ContinuedFraction {
            prefix: Vec::new(),
            period: vec![1],
        }
    }

    /// `[x, y, x, y, ...]`.
    pub fn biperiodic(x: u64, y: u64) -> Result<Self> {
        Self::periodic(vec![x, y])
    }

    pub fn is_infinite(&self) -> bool {
        !self.period.is_empty()
    }

    /// Number of quotients, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        (!self.is_infinite()).then_some(self.prefix.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a_n` for `n >= 1`.
    pub fn quotient(&self, n: usize) -> Option<u64> {
        if n == 0 {
            return None;
        }
        let i = n - 1;
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.prefix.len()) % self.period.len()])
        }
    }

    /// `a_1..a_n`, truncated if the expansion is shorter.
    pub fn expand(&self, n: usize) -> Vec<u64> {
        (1..=n).map_while(|k| self.quotient(k)).collect()
    }

    /// Finite and eventually periodic expansions have bounded quotients.
    pub fn is_bounded_type(&self) -> bool {
        true
    }

    pub fn max_quotient(&self) -> u64 {
        self.prefix
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .unwrap_or(1)
    }

    /// For a purely periodic expansion with period 1 or 2, the pair
    /// `(a, b) = (a_1, a_2)`; `a` sits at the levels governed by `l1`.
    pub fn biperiodic_pair(&self) -> Option<(u64, u64)> {
        if !self.prefix.is_empty() {
            return None;
        }
        match self.period.as_slice() {
            [x] => Some((*x, *x)),
            [x, y] => Some((*x, *y)),
            _ => None,
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match (self.prefix.is_empty(), self.period.is_empty()) {
            (true, false) if self.period == [1] => write!(f, "golden"),
            (true, false) => write!(f, "[{}]rep", join(&self.period)),
            (false, true) => write!(f, "[{}]", join(&self.prefix)),
            _ => write!(f, "[{}]+[{}]rep", join(&self.prefix), join(&self.period)),
        }
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    /// Accepts `golden`, `[a,b]rep`, `[p,q]+[a,b]rep`, a finite list `[1,2,3]`,
    /// and a list ending in `...` or `…`, whose listed block repeats.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("golden") {
            return Ok(Self::golden());
        }
        let list = |body: &str| -> Result<(Vec<u64>, bool)> {
            let inner = body
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected [..] in {s:?}")))?;
            let mut items: Vec<&str> = inner.split(',').map(str::trim).collect();
            let repeat = matches!(items.last(), Some(&"...") | Some(&"…"));
            if repeat {
                items.pop();
            }
            let nums = items
                .iter()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad quotient {t:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((nums, repeat))
        };
        if let Some(body) = s.strip_suffix("rep") {
            return match body.split_once('+') {
                Some((pre, per)) => Self::new(list(pre)?.0, list(per)?.0),
                None => Self::periodic(list(body)?.0),
            };
        }
        let (nums, repeat) = list(s)?;
        if repeat {
            Self::periodic(nums)
        } else {
            Self::finite(nums)
        }
    }
}

/// Convergent denominators `q_1 = 1, q_2 = a_1, q_{n+1} = a_n q_n + q_{n-1}`
/// and numerators `p_1 = 0, p_2 = 1`, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable {
    q: Vec<u64>,
    p: Vec<u64>,
}

impl ConvergentTable {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `q_n`, 1-based.
    pub fn q(&self, n: usize) -> u64 {
        self.q[n - 1]
    }

    /// `p_n`, 1-based.
    pub fn p(&self, n: usize) -> u64 {
        self.p[n - 1]
    }

    pub fn qs(&self) -> &[u64] {
        &self.q
    }

    pub fn ps(&self) -> &[u64] {
        &self.p
    }
}

/// `q_1..q_depth` and `p_1..p_depth`; needs `a_1..a_{depth-1}`.
pub fn convergents(cf: &ContinuedFraction, depth: usize) -> Result<ConvergentTable> {
    if depth == 0 {
        return Err(Error::Depth("convergent depth must be >= 1".into()));
    }
    let mut q = vec![1u64];
    let mut p = vec![0u64];
    for n in 1..depth {
        let a = cf.quotient(n).ok_or_else(|| {
            Error::Depth(format!(
                "depth {depth} needs a_{n}, but {cf} has only {} quotients",
                n - 1
            ))
        })?;
        let (qn, pn) = (q[n - 1], p[n - 1]);
        let (qm, pm) = if n >= 2 { (q[n - 2], p[n - 2]) } else { (0, 1) };
        let overflow = || Error::Depth(format!("convergent q_{} overflows", n + 1));
        q.push(
            a.checked_mul(qn)
                .and_then(|v| v.checked_add(qm))
                .ok_or_else(overflow)?,
        );
        p.push(
            a.checked_mul(pn)
                .and_then(|v| v.checked_add(pm))
                .ok_or_else(overflow)?,
        );
    }
    Ok(ConvergentTable { q, p })
}

/// Value of the fraction truncated after `depth` quotients, `p_{depth+1} / q_{depth+1}`.
pub fn cf_value(cf: &ContinuedFraction, depth: usize, prec: usize) -> Result<BigReal> {
    if depth == 0 {
        return Err(Error::Depth("cf_value depth must be >= 1".into()));
    }
    // Backward evaluation avoids overflow of p, q for deep truncations.
    let mut x = BigReal::zero(prec);
    for n in (1..=depth).rev() {
        let a = cf
            .quotient(n)
            .ok_or_else(|| Error::Depth(format!("{cf} has fewer than {depth} quotients")))?;
        x = (&BigReal::from_u64(a, prec) + &x).recip();
    }
    Ok(x)
}

/// The number itself at precision `prec`: exact for finite expansions, and
/// truncated deep enough that the error is below `2^-prec` otherwise.
pub fn rho_value(cf: &ContinuedFraction, prec: usize) -> BigReal {
    match cf.len() {
        Some(n) => cf_value(cf, n, prec).expect("finite length"),
        // q_n >= F_n grows at least like phi^n; |rho - p_n/q_n| < 1/q_n^2.
        None => cf_value(cf, prec + 8, prec).expect("infinite expansion"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergent_examples() {
        let t = convergents(&ContinuedFraction::golden(), 7).unwrap();
        assert_eq!(t.qs(), &[1, 1, 2, 3, 5, 8, 13]);
        assert_eq!(t.ps(), &[0, 1, 1, 2, 3, 5, 8]);
        let silver: ContinuedFraction = "[2]rep".parse().unwrap();
        assert_eq!(convergents(&silver, 5).unwrap().qs(), &[1, 2, 5, 12, 29]);
        let bi: ContinuedFraction = "[1,2]rep".parse().unwrap();
        assert_eq!(convergents(&bi, 5).unwrap().qs(), &[1, 1, 3, 4, 11]);
    }

    #[test]
    fn depth_errors() {
        let fin = ContinuedFraction::finite(vec![2, 1]).unwrap();
        assert!(convergents(&fin, 3).is_ok());
        assert!(matches!(convergents(&fin, 4), Err(Error::Depth(_))));
        assert!(matches!(
            convergents(&ContinuedFraction::golden(), 200),
            Err(Error::Depth(_))
        ));
    }

    #[test]
    fn values() {
        let p = 256;
        let fin = ContinuedFraction::finite(vec![2, 1]).unwrap();
        let third = &BigReal::one(p) / &BigReal::from_u64(3, p);
        assert_eq!(cf_value(&fin, 2, p).unwrap(), third);
        let g = rho_value(&ContinuedFraction::golden(), p);
        let want = &(&BigReal::from_u64(5, p).sqrt() - &BigReal::one(p)) * &BigReal::exp2(-1, p);
        assert!((&g - &want).abs() < BigReal::exp2(-250, p));
        let s = rho_value(&"[2]rep".parse().unwrap(), p);
        let want = &BigReal::from_u64(2, p).sqrt() - &BigReal::one(p);
        assert!((&s - &want).abs() < BigReal::exp2(-250, p));
    }

    #[test]
    fn parse_forms() {
        let cases = [
            ("golden", "golden"),
            ("[1,2]rep", "[1,2]rep"),
            ("[3]rep", "[3]rep"),
            ("[1, 2, 1, 2, ...]", "[1,2,1,2]rep"),
            ("[2,1]", "[2,1]"),
            ("[1]+[2]rep", "[1]+[2]rep"),
        ];
        for (s, shown) in cases {
            let cf: ContinuedFraction = s.parse().unwrap();
            assert_eq!(cf.to_string(), shown);
        }
        for bad in ["[0]rep", "[]", "1,2", "[a]", "[1,-2]"] {
            assert!(bad.parse::<ContinuedFraction>().is_err(), "{bad}");
        }
    }

    #[test]
    fn biperiodic_pair_convention() {
        let cf: ContinuedFraction = "[2,1]rep".parse().unwrap();
        assert_eq!(cf.quotient(1), Some(2));
        assert_eq!(cf.biperiodic_pair(), Some((2, 1)));
        assert_eq!(ContinuedFraction::golden().biperiodic_pair(), Some((1, 1)));
        assert_eq!(
            ContinuedFraction::finite(vec![1, 2])
                .unwrap()
                .biperiodic_pair(),
            None
        );
    }
}
