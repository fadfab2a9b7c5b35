mod common;

use cherry_core::arith::BigReal;
use cherry_core::dimension::*;
use cherry_core::rotation::ContinuedFraction;
use proptest::prelude::*;

#[test]
fn two_quarter_gaps() {
    let c = Cover::from_arcs(&[(0.1, 0.25), (0.6, 0.25)]);
    assert!((bowen_dim_cover(&c).unwrap() - 0.5).abs() < 1e-12);
}

proptest! {
    #[test]
    fn uniform_gaps(k in 2usize..200, e in 1.001f64..40.0) {
        let len = (k as f64).powf(-e);
        let arcs: Vec<(f64, f64)> = (0..k).map(|i| (i as f64 / k as f64, len)).collect();
        let s = bowen_dim_cover(&Cover::from_arcs(&arcs)).unwrap();
        let want = (k as f64).ln() / (1.0 / len).ln();
        prop_assert!((s - want).abs() < 1e-9, "{} vs {}", s, want);
        prop_assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn middle_thirds() {
    let want = 2f64.ln() / 3f64.ln();
    for depth in 8..=12 {
        let s = bowen_dim_cover(&Cover::middle_thirds(depth)).unwrap();
        assert!((s - want).abs() < 1e-6, "{depth}: {s}");
    }
    let c = Cover::middle_thirds(10);
    let grid: Vec<f64> = (2..=8).map(|k| 3f64.powi(-k)).collect();
    let slope = box_count(&c, &grid).unwrap().slope;
    assert!((slope - want).abs() < 0.05, "{slope}");
}

#[test]
fn empty_cover_is_an_error() {
    assert!(bowen_dim_cover(&Cover::from_arcs(&[])).is_err());
    let full = Cover::from_arcs(&[(0.0, 1.0), (0.5, 1.0)]);
    assert_eq!(bowen_dim_cover(&full).unwrap(), 1.0);
}

#[test]
fn box_count_of_the_full_circle() {
    for k in [4usize, 10, 37] {
        let arcs: Vec<(f64, f64)> = (0..k)
            .map(|i| (i as f64 / k as f64, 1.0 / k as f64))
            .collect();
        let bc = box_count(&Cover::from_arcs(&arcs), &[1.0 / k as f64]).unwrap();
        assert_eq!(bc.counts[0].1, k as u64);
    }
    let whole = Cover::from_arcs(&[(0.3, 0.999)]);
    let grid: Vec<f64> = (1..=6).map(|k| 2f64.powi(-k)).collect();
    assert!((box_count(&whole, &grid).unwrap().slope - 1.0).abs() < 0.02);
    assert!(box_count(&whole, &[0.0]).is_err());
    assert!(box_count(&whole, &[1.5]).is_err());
}

#[test]
fn box_count_of_points_is_flat() {
    let pts = Cover::from_arcs(&[(0.11, 1e-12), (0.37, 1e-12), (0.52, 1e-12), (0.9, 1e-12)]);
    let grid: Vec<f64> = (4..=20).map(|k| 2f64.powi(-k)).collect();
    let bc = box_count(&pts, &grid).unwrap();
    assert!(bc.slope.abs() < 0.01);
    assert!(bc.counts.iter().all(|(_, c)| *c == 4));
}

#[test]
fn aitken_on_a_geometric_tail() {
    let xs: Vec<f64> = (0..6).map(|i| 0.3 - 0.2 * 0.5f64.powi(i)).collect();
    assert!((aitken(&xs).unwrap() - 0.3).abs() < 1e-12);
    assert_eq!(aitken(&[1.0, 2.0]), None);
    assert_eq!(aitken(&[1.0, 1.0, 1.0]), Some(1.0));
}

#[test]
fn bounded_run_dimension_is_positive_and_settles() {
    let run = common::bounded();
    let est = estimate(&run.partitions(4).unwrap()).unwrap();
    let d = est.values();
    assert!(d.iter().all(|x| *x > 0.05 && *x <= 1.0), "{d:?}");
    let steps: Vec<f64> = d.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(steps.windows(2).skip(1).all(|w| w[1] < w[0]), "{d:?}");
    assert!(est.band >= 0.0 && est.extrapolated.is_some());
    assert!(est.levels.windows(2).all(|w| w[1].mean_gap < w[0].mean_gap));
    let csv = est.to_csv();
    assert!(csv.starts_with("n,gap_count,mean_gap,D_n\n"));
    assert_eq!(csv.lines().count(), d.len() + 1);
}

#[test]
fn box_count_agrees_with_bowen_at_matched_scales() {
    let run = common::bounded();
    let parts = run.partitions(1).unwrap();
    let n = run.max_partition_level();
    let bowen = bowen_dim(parts.iter().find(|p| p.level == n).unwrap()).unwrap();
    let bc = box_count_matched(&parts, n).unwrap();
    assert!((bc.slope - bowen).abs() <= 0.1, "{} vs {bowen}", bc.slope);
    assert!(bc.counts.windows(2).all(|w| w[1].0 < w[0].0));
    assert!(box_count_matched(&parts, MATCH_SPAN).is_err());
}

fn runs() -> (DimensionEstimate, DimensionEstimate) {
    (
        estimate(&common::degenerate().partitions(4).unwrap()).unwrap(),
        estimate(&common::bounded().partitions(4).unwrap()).unwrap(),
    )
}

fn dim_run<'a>(
    cf: &'a ContinuedFraction,
    l: &'a (BigReal, BigReal),
    e: &'a DimensionEstimate,
) -> DimensionRun<'a> {
    DimensionRun {
        cf,
        ell1: &l.0,
        ell2: &l.1,
        estimate: e,
    }
}

fn ells(a: &str, b: &str) -> (BigReal, BigReal) {
    (
        BigReal::parse(a, 64).unwrap(),
        BigReal::parse(b, 64).unwrap(),
    )
}

#[test]
fn dichotomy_between_the_reference_runs() {
    let (de, be) = runs();
    let g = ContinuedFraction::golden();
    let (ld, lb) = (ells("1.5", "1.5"), ells("3", "3"));
    let rep = dichotomy_report(&dim_run(&g, &ld, &de), &dim_run(&g, &lb, &be)).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.degenerate_decreasing && rep.degenerate_final < DEGENERATE_CEILING);
    assert!(rep.bounded_final > BOUNDED_FLOOR && rep.bounded_tail_ok);
}

#[test]
fn dichotomy_preconditions() {
    let (de, be) = runs();
    let g = ContinuedFraction::golden();
    let (ld, lb) = (ells("1.5", "1.5"), ells("3", "3"));
    assert!(dichotomy_report(&dim_run(&g, &ld, &de), &dim_run(&g, &ld, &be)).is_err());
    // Swapped roles classify the wrong way round.
    assert!(dichotomy_report(&dim_run(&g, &lb, &de), &dim_run(&g, &ld, &be)).is_err());
    let silver: ContinuedFraction = "[2]rep".parse().unwrap();
    assert!(dichotomy_report(&dim_run(&g, &ld, &de), &dim_run(&silver, &lb, &be)).is_err());
    let mut short = be.clone();
    short.levels.truncate(TREND_LEVELS - 1);
    assert!(dichotomy_report(&dim_run(&g, &ld, &de), &dim_run(&g, &lb, &short)).is_err());
}

#[test]
fn lambda_criterion_admits_a_bounded_side() {
    let (de, be) = runs();
    let bi: ContinuedFraction = "[1,2]rep".parse().unwrap();
    let (ld, lb) = (ells("1.5", "1.5"), ells("1.8", "4"));
    let rep = dichotomy_report(&dim_run(&bi, &ld, &de), &dim_run(&bi, &lb, &be)).unwrap();
    assert!(rep.pass);
}
