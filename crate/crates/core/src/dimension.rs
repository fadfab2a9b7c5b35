//! Dimension estimates for the non-wandering set from the gaps of the
//! dynamical partitions, which cover it.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::BigReal;
use crate::classify::{classify_point, Region};
use crate::error::{Error, Result};
use crate::partition::DynamicalPartition;
use crate::rotation::ContinuedFraction;

/// A finite cover by arcs, with lengths kept as logarithms.
#[derive(Clone, Debug)]
pub struct Cover {
    /// Left endpoints in `[0, 1)`.
    pub left: Vec<f64>,
    pub length: Vec<f64>,
    pub ln_length: Vec<f64>,
}

impl Cover {
    pub fn from_partition(p: &DynamicalPartition) -> Cover {
        let mut c = Cover {
            left: vec![],
            length: vec![],
            ln_length: vec![],
        };
        for g in p.gaps() {
            c.left.push(g.left().rep().to_f64());
            c.length.push(g.length().to_f64());
            c.ln_length.push(g.length().ln().to_f64());
        }
        c
    }

    /// Arcs given as `(left, length)`.
    pub fn from_arcs(arcs: &[(f64, f64)]) -> Cover {
        Cover {
            left: arcs.iter().map(|a| a.0.rem_euclid(1.0)).collect(),
            length: arcs.iter().map(|a| a.1).collect(),
            ln_length: arcs.iter().map(|a| a.1.ln()).collect(),
        }
    }

    /// The `2^depth` intervals of generation `depth` of the middle-thirds set.
    pub fn middle_thirds(depth: u32) -> Cover {
        let len = 3f64.powi(-(depth as i32));
        let left = (0..1u64 << depth)
            .map(|k| {
                // Ternary digits 0/2 read off the binary digits of k.
                (0..depth)
                    .map(|i| ((k >> (depth - 1 - i)) & 1) as f64 * 2.0 * 3f64.powi(-(i as i32) - 1))
                    .sum()
            })
            .collect();
        Cover {
            left,
            length: vec![len; 1 << depth],
            ln_length: vec![-(depth as f64) * 3f64.ln(); 1 << depth],
        }
    }

    pub fn len(&self) -> usize {
        self.length.len()
    }

    pub fn is_empty(&self) -> bool {
        self.length.is_empty()
    }

    pub fn mean_length(&self) -> f64 {
        self.length.iter().sum::<f64>() / self.len().max(1) as f64
    }
}

/// `ln sum exp(s * x_i)`.
fn log_sum_exp(s: f64, xs: &[f64]) -> f64 {
    let m = xs.iter().map(|x| s * x).fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (s * x - m).exp()).sum::<f64>().ln()
}

/// The root `s` in `[0, 1]` of `sum |I|^s = 1` over the cover.
pub fn bowen_dim_cover(cover: &Cover) -> Result<f64> {
    if cover.is_empty() {
        return Err(Error::Domain("cover has no arcs".into()));
    }
    let g = |s: f64| log_sum_exp(s, &cover.ln_length);
    if g(1.0) >= 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn bowen_dim(p: &DynamicalPartition) -> Result<f64> {
    bowen_dim_cover(&Cover::from_partition(p))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCount {
    pub counts: Vec<(f64, u64)>,
    /// Least-squares slope of `ln count` against `ln(1/eps)`.
    pub slope: f64,
}

/// Number of grid boxes of each size that meet the cover.
pub fn box_count(cover: &Cover, eps_grid: &[f64]) -> Result<BoxCount> {
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
        return Err(Error::Domain("box sizes must lie in (0, 1]".into()));
    }
    let mut counts = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let nbox = (1.0 / eps).ceil() as u64;
        let mut ranges: Vec<(u64, u64)> = Vec::with_capacity(cover.len() + 1);
        for (l, len) in cover.left.iter().zip(&cover.length) {
            let lo = (l / eps).floor() as u64;
            let hi = ((l + len) / eps).floor() as u64;
            if hi >= nbox {
                ranges.push((lo.min(nbox - 1), nbox - 1));
                ranges.push((0, (hi - nbox).min(nbox - 1)));
            } else {
                ranges.push((lo, hi));
            }
        }
        ranges.sort_unstable();
        let (mut total, mut cur): (u64, Option<(u64, u64)>) = (0, None);
        for (a, b) in ranges {
            cur = match cur {
                Some((x, y)) if a <= y + 1 => Some((x, y.max(b))),
                Some((x, y)) => {
                    total += y - x + 1;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((x, y)) = cur {
            total += y - x + 1;
        }
        counts.push((eps, total));
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|(e, c)| ((1.0 / e).ln(), (*c as f64).ln()))
        .collect();
    Ok(BoxCount {
        slope: ls_slope(&pts),
        counts,
    })
}

/// Levels between the two covers that bound the matched box sizes.
pub const MATCH_SPAN: usize = 4;

/// `points` box sizes, log-spaced and decreasing from the longest arc of
/// `coarse` to the longest arc of `fine`.
pub fn matched_grid(fine: &Cover, coarse: &Cover, points: usize) -> Result<Vec<f64>> {
    let longest = |c: &Cover| c.length.iter().cloned().fold(0.0, f64::max);
    let (lo, hi) = (longest(fine), longest(coarse).min(1.0));
    if points < 2 || !(lo > 0.0 && lo < hi) {
        return Err(Error::Domain(
            "matched scales need a coarser cover with longer arcs".into(),
        ));
    }
    Ok((0..points)
        .map(|i| hi * (lo / hi).powf(i as f64 / (points - 1) as f64))
        .collect())
}

/// Box count of the level-`n` gaps over the scales matched to the levels
/// `n - MATCH_SPAN..=n`.
pub fn box_count_matched(partitions: &[DynamicalPartition], n: usize) -> Result<BoxCount> {
    let find = |k: usize| {
        partitions
            .iter()
            .find(|p| p.level == k)
            .map(Cover::from_partition)
            .ok_or_else(|| Error::Depth(format!("partition level {k} is missing")))
    };
    if n <= MATCH_SPAN {
        return Err(Error::Depth(format!(
            "matched box count needs n > {MATCH_SPAN}"
        )));
    }
    let fine = find(n)?;
    box_count(&fine, &matched_grid(&fine, &find(n - MATCH_SPAN)?, 8)?)
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Aitken's delta-squared on the last three terms.
pub fn aitken(xs: &[f64]) -> Option<f64> {
    let [a, b, c] = xs.get(xs.len().checked_sub(3)?..)? else {
        return None;
    };
    let d2 = c - 2.0 * b + a;
    if d2.abs() < 1e-300 {
        return Some(*c);
    }
    Some(c - (c - b).powi(2) / d2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BowenPressure,
    BoxCount,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionLevel {
    pub n: usize,
    pub gap_count: usize,
    pub mean_gap: f64,
    pub d: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub method: Method,
    pub levels: Vec<DimensionLevel>,
    /// Aitken extrapolation of the tail, reported with the raw series.
    pub extrapolated: Option<f64>,
    /// Distance between the extrapolation and the last raw value.
    pub band: f64,
}

impl DimensionEstimate {
    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.d).collect()
    }

    pub fn last(&self) -> Option<f64> {
        self.levels.last().map(|l| l.d)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,gap_count,mean_gap,D_n\n");
        for l in &self.levels {
            let _ = writeln!(s, "{},{},{:e},{}", l.n, l.gap_count, l.mean_gap, l.d);
        }
        s
    }
}

/// Bowen estimates for a sequence of partitions.
pub fn estimate(partitions: &[DynamicalPartition]) -> Result<DimensionEstimate> {
    let mut levels = Vec::with_capacity(partitions.len());
    for p in partitions {
        let cover = Cover::from_partition(p);
        levels.push(DimensionLevel {
            n: p.level,
            gap_count: cover.len(),
            mean_gap: cover.mean_length(),
            d: bowen_dim_cover(&cover)?,
        });
    }
    let ds: Vec<f64> = levels.iter().map(|l| l.d).collect();
    let extrapolated = aitken(&ds).map(|x| x.clamp(0.0, 1.0));
    let band = match (extrapolated, ds.last()) {
        (Some(x), Some(l)) => (x - l).abs(),
        _ => 0.0,
    };
    Ok(DimensionEstimate {
        method: Method::BowenPressure,
        levels,
        extrapolated,
        band,
    })
}

/// Levels over which the tail trends are read.
pub const TREND_LEVELS: usize = 4;
/// Final-level ceiling for the degenerate run; a desk-scale convention.
pub const DEGENERATE_CEILING: f64 = 0.15;
/// Final-level floor for the bounded run; a desk-scale convention.
pub const BOUNDED_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub degenerate: Vec<f64>,
    pub bounded: Vec<f64>,
    pub degenerate_final: f64,
    pub bounded_final: f64,
    /// Strictly decreasing over the last levels.
    pub degenerate_decreasing: bool,
    /// Least-squares slope of the bounded tail.
    pub bounded_tail_slope: f64,
    pub bounded_tail_ok: bool,
    pub pass: bool,
    pub note: String,
}

/// A run: rotation number, exponents, and its dimension series.
pub struct DimensionRun<'a> {
    pub cf: &'a ContinuedFraction,
    pub ell1: &'a BigReal,
    pub ell2: &'a BigReal,
    pub estimate: &'a DimensionEstimate,
}

/// Degenerate run tends to 0, bounded run stays away from 0.
///
/// The bounded tail passes when its slope is non-negative or its total drop
/// over the tail is below the extrapolation band plus 5% of its level.
pub fn dichotomy_report(deg: &DimensionRun, bnd: &DimensionRun) -> Result<DichotomyReport> {
    if deg.ell1 == bnd.ell1 && deg.ell2 == bnd.ell2 {
        return Err(Error::Domain("both runs use the same exponents".into()));
    }
    if deg.cf != bnd.cf {
        return Err(Error::Domain(format!(
            "runs use different rotation numbers {} and {}",
            deg.cf, bnd.cf
        )));
    }
    let rd = classify_point(deg.cf, deg.ell1, deg.ell2).region;
    let rb = classify_point(bnd.cf, bnd.ell1, bnd.ell2).region;
    if rd != Region::Degenerate || rb != Region::Bounded {
        return Err(Error::Domain(format!(
            "runs classify as {rd:?} and {rb:?}, not degenerate and bounded"
        )));
    }
    let (dv, bv) = (deg.estimate.values(), bnd.estimate.values());
    if dv.len() < TREND_LEVELS || bv.len() < TREND_LEVELS {
        return Err(Error::Depth(format!(
            "dichotomy needs at least {TREND_LEVELS} levels per run"
        )));
    }
    let tail = |v: &[f64]| v[v.len() - TREND_LEVELS..].to_vec();
    let (dt, bt) = (tail(&dv), tail(&bv));
    let degenerate_decreasing = dt.windows(2).all(|w| w[1] < w[0]);
    let pts: Vec<(f64, f64)> = bt.iter().enumerate().map(|(i, d)| (i as f64, *d)).collect();
    let slope = ls_slope(&pts);
    let drop = bt[0] - bt[bt.len() - 1];
    let bounded_tail_ok = slope >= 0.0 || drop <= bnd.estimate.band + 0.05 * bt[bt.len() - 1];
    let (df, bf) = (dv[dv.len() - 1], bv[bv.len() - 1]);
    let pass =
        degenerate_decreasing && df < DEGENERATE_CEILING && bf > BOUNDED_FLOOR && bounded_tail_ok;
    Ok(DichotomyReport {
        degenerate: dv,
        bounded: bv,
        degenerate_final: df,
        bounded_final: bf,
        degenerate_decreasing,
        bounded_tail_slope: slope,
        bounded_tail_ok,
        pass,
        note: "thresholds 0.15 and 0.05 are desk-scale conventions".into(),
    })
}
