use cherry_core::arith::BigReal;
use cherry_core::classify::*;
use cherry_core::rotation::ContinuedFraction;
use nalgebra::Matrix2;
use proptest::prelude::*;

const P: usize = 192;

fn r(x: f64) -> BigReal {
    BigReal::from_f64(x, P)
}

fn d(s: &str) -> BigReal {
    BigReal::parse(s, P).unwrap()
}

fn near(x: &BigReal, want: f64, tol: f64) -> bool {
    (x.to_f64() - want).abs() <= tol
}

fn golden() -> ContinuedFraction {
    ContinuedFraction::golden()
}

#[test]
fn t_values() {
    assert!(near(&t_func(1, 1, &r(2.0), &r(5.0)).unwrap(), 0.5, 1e-15));
    assert!(near(
        &t_func(2, 1, &r(2.0), &r(3.0)).unwrap(),
        1.0 / 3.0,
        1e-15
    ));
    assert!(near(&t_func(1, 200, &r(2.0), &r(2.0)).unwrap(), 1.0, 1e-15));
    assert!(t_func(1, 1, &r(1.0), &r(2.0)).is_err());
    assert!(t_func(2, 0, &r(2.0), &r(2.0)).is_err());
    assert!(t_func(3, 1, &r(2.0), &r(2.0)).is_err());
}

#[test]
fn golden_matrix_at_two() {
    let m = transfer_matrix(MatrixForm::Even, 1, 1, &r(2.0), &r(2.0)).unwrap();
    assert_eq!(m.to_f64(), [[0.5, 0.5], [1.0, 0.0]]);
    assert_eq!(m.form, Some(MatrixForm::Even));
}

#[test]
fn determinant_and_prefactor() {
    let (l1, l2) = (r(1.7), r(3.2));
    let e = transfer_matrix(MatrixForm::Even, 2, 3, &l1, &l2).unwrap();
    assert!(near(&e.det(), -(1.7f64).powi(-3), 1e-14));
    let o = transfer_matrix(MatrixForm::Odd, 2, 3, &l1, &l2).unwrap();
    assert!(near(&o.det(), -(3.2f64).powi(-3), 1e-14));
    let s = transfer_matrix(MatrixForm::Even, 2, 1, &l1, &l1).unwrap();
    assert_eq!(s.m[0][0], t_func(2, 2, &l1, &l1).unwrap());
    assert!(transfer_matrix(MatrixForm::Odd, 0, 1, &l1, &l2).is_err());
}

#[test]
fn eigenvalue_examples() {
    let (ls, lu) = biperiodic_eigen(1, 1, &r(2.0), &r(2.0)).unwrap();
    assert!(near(&ls, 0.25, 1e-15) && near(&lu, 1.0, 1e-15));
    let (ls, lu) = biperiodic_eigen(1, 1, &r(3.0), &r(3.0)).unwrap();
    assert!(near(&lu, 0.58920, 1e-5) && near(&ls, 0.18858, 1e-5));
    assert!(near(&(&ls * &lu), 1.0 / 9.0, 1e-15));
    // (16 + sqrt(112)) / 18.
    let (_, lu) = biperiodic_eigen(1, 1, &d("1.5"), &d("1.5")).unwrap();
    let want =
        (&BigReal::from_u64(16, P) + &BigReal::from_u64(112, P).sqrt()) / BigReal::from_u64(18, P);
    assert!((&lu - &want).abs() < BigReal::exp2(-(P as i64) + 8, P));
    assert!(biperiodic_eigen(1, 1, &r(1.0), &r(2.0)).is_err());
}

#[test]
fn trace_and_determinant_identities_on_a_grid() {
    for a in 1..=3u64 {
        for b in 1..=3u64 {
            for i in 1..=20 {
                for j in 1..=20 {
                    let (x, y) = (1.0 + 0.25 * i as f64, 1.0 + 0.25 * j as f64);
                    let (l1, l2) = (r(x), r(y));
                    let (ls, lu) = biperiodic_eigen(a, b, &l1, &l2).unwrap();
                    let u = l1.powi(b as usize).recip();
                    let v = l2.powi(a as usize).recip();
                    let tt = &t_func(1, b, &l1, &l2).unwrap() * &t_func(2, a, &l1, &l2).unwrap();
                    let det = &u * &v;
                    let tr = &(&tt + &u) + &v;
                    assert!((&ls * &lu).rel_diff(&det).to_f64() < 1e-12);
                    assert!((&ls + &lu).rel_diff(&tr).to_f64() < 1e-12);
                    // lambda_u = 1 exactly on (l1 - 1)(l2 - 1) = 1.
                    let side = (x - 1.0) * (y - 1.0) - 1.0;
                    if side.abs() > 1e-9 {
                        assert_eq!(lu.to_f64() < 1.0, side > 0.0, "{a} {b} {x} {y}");
                    }
                }
            }
        }
    }
}

#[test]
fn eigenvalues_match_the_period_product() {
    for (a, b) in [(1, 1), (2, 1), (1, 3), (2, 3)] {
        let cf = ContinuedFraction::biperiodic(a, b).unwrap();
        let (l1, l2) = (r(1.7), r(2.9));
        let m = level_matrix(&cf, 5, &l1, &l2)
            .unwrap()
            .mul(&level_matrix(&cf, 4, &l1, &l2).unwrap())
            .to_f64();
        let m = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
        let mut ev: Vec<f64> = m.eigenvalues().unwrap().iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        let (ls, lu) = biperiodic_eigen(a, b, &l1, &l2).unwrap();
        assert!((ev[0] - ls.to_f64()).abs() < 1e-12, "{a},{b}: {ev:?}");
        assert!((ev[1] - lu.to_f64()).abs() < 1e-12, "{a},{b}: {ev:?}");
    }
}

#[test]
fn level_matrices_need_quotients() {
    let cf = ContinuedFraction::finite(vec![1, 2]).unwrap();
    assert!(level_matrix(&cf, 2, &r(2.0), &r(2.0)).is_ok());
    assert!(level_matrix(&cf, 3, &r(2.0), &r(2.0)).is_err());
    assert!(level_matrix(&cf, 1, &r(2.0), &r(2.0)).is_err());
}

#[test]
fn transition_curve() {
    let grid: Vec<BigReal> = ["1.25", "1.5", "2", "3", "5"]
        .iter()
        .map(|s| d(s))
        .collect();
    for (a, b) in [(1, 1), (2, 1)] {
        let c = curve_trace(a, b, &grid, 128).unwrap();
        assert!(c.monotone);
        for (g, pt) in grid.iter().zip(&c.points) {
            let x = g.to_f64();
            let y = pt.ell2_value.as_ref().unwrap().to_f64();
            assert!((y - (1.0 + 1.0 / (x - 1.0))).abs() < 1e-15, "{x} {y}");
        }
        assert!(near(c.points[2].ell2_value.as_ref().unwrap(), 2.0, 1e-15));
        let l3 = c.points[3].ell2_value.as_ref().unwrap().to_f64();
        assert!(l3 > 1.0 && l3 < 2.0);
        assert_eq!(c.to_csv().lines().count(), grid.len() + 1);
    }
    let off = curve_trace(1, 1, &[BigReal::exp2(40, 128)], 128).unwrap();
    assert!(off.points[0].ell2.is_none());
    assert!(curve_trace(1, 1, &[d("0.5")], 128).is_err());
}

#[test]
fn product_audit() {
    let rep = matrix_product_audit(&golden(), &r(3.0), &r(3.0), 20).unwrap();
    assert!(rep.entries_within_bound);
    assert_eq!(rep.steps.len(), 9);
    let onset = rep.contraction_onset.unwrap();
    assert!(rep.steps[onset - 1..].iter().all(|s| s.operator_norm < 1.0));
    let rep = matrix_product_audit(&golden(), &r(2.0), &r(2.0), 30).unwrap();
    assert_eq!(rep.contraction_onset, None);
    assert!(rep.entries_within_bound);
    let rep = matrix_product_audit(&golden(), &r(2.0), &r(5.0), 20).unwrap();
    assert!(rep.entries_within_bound, "{rep:?}");
    assert!(matrix_product_audit(&golden(), &r(3.0), &r(3.0), 3).is_err());
}

#[test]
fn wprime_constants() {
    let two = r(2.0);
    assert!(near(
        &wprime(&d("0.55"), &d("0.16"), &two, &two).unwrap(),
        0.71251,
        1e-5
    ));
    assert!(near(
        &wprime(&d("0.3"), &d("0.44"), &two, &two).unwrap(),
        0.97227,
        1e-5
    ));
    let rows = wprime_constants_check(P).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|c| c.pass));
    assert!((rows[2].value.parse::<f64>().unwrap() - 0.82616).abs() < 1e-5);
    assert!(wprime(&d("1.5"), &d("0.5"), &two, &two).is_err());
    assert!(wprime(&d("0.9"), &d("0.5"), &r(10.0), &r(1.01)).is_err());
}

#[test]
fn verdicts() {
    let v = classify_point(&golden(), &d("1.5"), &d("1.5"));
    assert_eq!(
        (v.region, v.basis),
        (Region::Degenerate, Basis::TheoremRegion)
    );
    assert!(v.lambda_u.is_some());
    let v = classify_point(&golden(), &r(3.0), &r(3.0));
    assert_eq!((v.region, v.basis), (Region::Bounded, Basis::TheoremRegion));
    let v = classify_point(&golden(), &r(2.0), &r(2.0));
    assert_eq!(v.region, Region::Critical);
    let v = classify_point(&golden(), &d("1.5"), &r(3.0));
    assert_eq!(
        (v.region, v.basis),
        (Region::Critical, Basis::LambdaCriterion)
    );
    let bi: ContinuedFraction = "[2,1]rep".parse().unwrap();
    let v = classify_point(&bi, &d("1.8"), &r(4.0));
    assert_eq!(
        (v.region, v.basis),
        (Region::Bounded, Basis::LambdaCriterion)
    );
    let v = classify_point(&bi, &d("1.2"), &r(3.0));
    assert_eq!(
        (v.region, v.basis),
        (Region::Unknown, Basis::LambdaCriterion)
    );
    let other: ContinuedFraction = "[1,2,3]rep".parse().unwrap();
    let v = classify_point(&other, &d("1.5"), &r(3.0));
    assert_eq!((v.region, v.basis), (Region::Unknown, Basis::EmpiricalOnly));
    assert!(v.lambda_u.is_none() && v.lambda_s.is_none());
    let v = classify_point(&other, &r(4.0), &r(3.0));
    assert_eq!(v.region, Region::Bounded);
    let json = serde_json::to_string(&classify_point(&bi, &d("1.8"), &r(4.0))).unwrap();
    assert!(json.contains("\"basis\":\"lambda-criterion\""));
}

proptest! {
    #[test]
    fn swapping_sides_swaps_quotients(a in 1u64..4, b in 1u64..4, x in 1.01f64..6.0, y in 1.01f64..6.0) {
        let (_, lu) = biperiodic_eigen(a, b, &r(x), &r(y)).unwrap();
        let (_, lu2) = biperiodic_eigen(b, a, &r(y), &r(x)).unwrap();
        prop_assert!(lu.rel_diff(&lu2).to_f64() < 1e-30);
        let v = classify_point(&golden(), &r(x), &r(y));
        let w = classify_point(&golden(), &r(y), &r(x));
        prop_assert_eq!(v.region, w.region);
    }
}
