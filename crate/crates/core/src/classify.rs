//! Transfer matrices of the order-two affine recursion for `nu_n`, the
//! bi-periodic eigenvalue criterion, and the geometry verdict.
//!
//! Level `n` of the recursion uses the matrix
//! `[[(far/near) t_far(a_n), near^{-a_{n-1}}], [1, 0]]` with the exponents
//! assigned by [`crate::ratios::Exponents`]. At odd `n` this is the "even" form below
//! (`near = l1`), at even `n` the "odd" form.

use serde::Serialize;

use crate::arith::{bisect_root, BigReal};
use crate::error::{Error, Result};
use crate::rotation::ContinuedFraction;

/// Half-width of the band around `lambda_u = 1` reported as critical.
pub const CRITICAL_TOL: f64 = 1e-9;

/// `t_i(j) = (1 - l_i^{-j}) / (l_i - 1)`.
pub fn t_func(which: u8, j: u64, ell1: &BigReal, ell2: &BigReal) -> Result<BigReal> {
    let l = match which {
        1 => ell1,
        2 => ell2,
        _ => return Err(Error::Domain(format!("t_func index {which} is not 1 or 2"))),
    };
    t_of(l, j)
}

fn t_of(l: &BigReal, j: u64) -> Result<BigReal> {
    let one = BigReal::one(l.prec());
    if j == 0 || l <= &one {
        return Err(Error::Domain(format!(
            "t needs j >= 1 and exponent > 1, got j = {j}, exponent {l}"
        )));
    }
    Ok(&(&one - &l.powi(j as usize).recip()) / &(l - &one))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixForm {
    /// `[[(l2/l1) t_2(a_this), l1^{-a_prev}], [1, 0]]`.
    Even,
    /// `[[(l1/l2) t_1(a_this), l2^{-a_prev}], [1, 0]]`.
    Odd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    pub m: [[BigReal; 2]; 2],
    pub form: Option<MatrixForm>,
}

impl TransferMatrix {
    pub fn identity(prec: usize) -> Self {
        let (z, o) = (BigReal::zero(prec), BigReal::one(prec));
        TransferMatrix {
            m: [[o.clone(), z.clone()], [z, o]],
            form: None,
        }
    }

    pub fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        let e =
            |i: usize, j: usize| &(&self.m[i][0] * &rhs.m[0][j]) + &(&self.m[i][1] * &rhs.m[1][j]);
        TransferMatrix {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
            form: None,
        }
    }

    pub fn trace(&self) -> BigReal {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn det(&self) -> BigReal {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    pub fn max_entry(&self) -> BigReal {
        let mut best = self.m[0][0].abs();
        for row in &self.m {
            for x in row {
                best = best.max(&x.abs());
            }
        }
        best
    }

    /// Spectral norm, in double precision.
    pub fn operator_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.m.each_ref().map(|r| r.each_ref().map(BigReal::to_f64));
        // Largest eigenvalue of M^T M.
        let (p, q, r) = (a * a + c * c, a * b + c * d, b * b + d * d);
        let mid = 0.5 * (p + r);
        let dev = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        (mid + dev).sqrt()
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        self.m.each_ref().map(|r| r.each_ref().map(BigReal::to_f64))
    }
}

/// The displayed matrix of the given form.
pub fn transfer_matrix(
    form: MatrixForm,
    a_this: u64,
    a_prev: u64,
    ell1: &BigReal,
    ell2: &BigReal,
) -> Result<TransferMatrix> {
    if a_this == 0 || a_prev == 0 {
        return Err(Error::Domain("quotients must be >= 1".into()));
    }
    let (near, far, which) = match form {
        MatrixForm::Even => (ell1, ell2, 2),
        MatrixForm::Odd => (ell2, ell1, 1),
    };
    let t = t_func(which, a_this, ell1, ell2)?;
    let p = ell1.prec().min(ell2.prec());
    Ok(TransferMatrix {
        m: [
            [&(far / near) * &t, near.powi(a_prev as usize).recip()],
            [BigReal::one(p), BigReal::zero(p)],
        ],
        form: Some(form),
    })
}

/// The matrix of recursion level `n >= 2` for the given expansion.
pub fn level_matrix(
    cf: &ContinuedFraction,
    n: usize,
    ell1: &BigReal,
    ell2: &BigReal,
) -> Result<TransferMatrix> {
    let q = |k: usize| {
        cf.quotient(k)
            .ok_or_else(|| Error::Depth(format!("quotient a_{k} is not available")))
    };
    if n < 2 {
        return Err(Error::Depth(format!("recursion level {n} < 2")));
    }
    let form = if n % 2 == 1 {
        MatrixForm::Even
    } else {
        MatrixForm::Odd
    };
    transfer_matrix(form, q(n)?, q(n - 1)?, ell1, ell2)
}

/// `(lambda_s, lambda_u)` for `rho = [a, b, a, b, ...]`.
pub fn biperiodic_eigen(
    a: u64,
    b: u64,
    ell1: &BigReal,
    ell2: &BigReal,
) -> Result<(BigReal, BigReal)> {
    let tt = &t_func(1, b, ell1, ell2)? * &t_func(2, a, ell1, ell2)?;
    let u = ell1.powi(b as usize).recip();
    let v = ell2.powi(a as usize).recip();
    let p = tt.prec();
    let two = BigReal::from_u64(2, p);
    let radicand = &(&u - &v).powi(2) + &(&(&tt + &(&two * &(&u + &v))) * &tt);
    let root = radicand.sqrt();
    let sum = &(&tt + &u) + &v;
    let ls = &(&sum - &root) / &two;
    let lu = &(&sum + &root) / &two;
    if !(ls.is_positive() && ls < BigReal::one(p)) {
        return Err(Error::Domain(format!("lambda_s = {ls} outside (0, 1)")));
    }
    Ok((ls, lu))
}

/// One grid point of the transition curve.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub ell1: String,
    /// `None` when the curve leaves the domain `l2 > 1` at this `l1`.
    pub ell2: Option<String>,
    pub lambda_u_residual: Option<String>,
    #[serde(skip)]
    pub ell2_value: Option<BigReal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub a: u64,
    pub b: u64,
    pub points: Vec<CurvePoint>,
    /// `l2` strictly decreases along the points found.
    pub monotone: bool,
}

impl CurveReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ell1,ell2,lambda_u_residual\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{}\n",
                p.ell1,
                p.ell2.clone().unwrap_or_default(),
                p.lambda_u_residual.clone().unwrap_or_default()
            ));
        }
        s
    }
}

/// Solves `lambda_u(a, b; l1, l2) = 1` for `l2` at each grid value of `l1`.
pub fn curve_trace(a: u64, b: u64, ell1_grid: &[BigReal], prec: usize) -> Result<CurveReport> {
    let one = BigReal::one(prec);
    let tol = BigReal::exp2(-((prec / 2) as i64), prec);
    let mut points = Vec::with_capacity(ell1_grid.len());
    for l1 in ell1_grid {
        let l1 = l1.with_prec(prec);
        if l1 <= one {
            return Err(Error::Domain(format!("grid value {l1} must exceed 1")));
        }
        let g = |l2: &BigReal| -> BigReal {
            match biperiodic_eigen(a, b, &l1, l2) {
                Ok((_, lu)) => &lu - &one,
                Err(_) => BigReal::zero(prec),
            }
        };
        let lo = &one + &BigReal::exp2(-32, prec);
        let mut hi = BigReal::from_u64(2, prec);
        while !g(&hi).is_negative() && hi < BigReal::exp2(40, prec) {
            hi = &hi * &hi;
        }
        let found = if g(&lo).is_positive() && g(&hi).is_negative() {
            let l2 = bisect_root(g, &lo, &hi, &tol)?;
            let (_, lu) = biperiodic_eigen(a, b, &l1, &l2)?;
            Some((l2, &lu - &one))
        } else {
            None
        };
        points.push(CurvePoint {
            ell1: l1.to_decimal_string(),
            ell2: found.as_ref().map(|(x, _)| x.to_decimal_string()),
            lambda_u_residual: found
                .as_ref()
                .map(|(_, r)| r.with_prec(64).to_decimal_string()),
            ell2_value: found.map(|(x, _)| x),
        });
    }
    let found: Vec<&BigReal> = points
        .iter()
        .filter_map(|p| p.ell2_value.as_ref())
        .collect();
    let monotone = found.windows(2).all(|w| w[1] < w[0]);
    Ok(CurveReport {
        a,
        b,
        points,
        monotone,
    })
}

/// One factor of the paired product.
#[derive(Clone, Debug, Serialize)]
pub struct ProductStep {
    pub n: usize,
    pub max_entry: f64,
    pub operator_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductAudit {
    pub bound: f64,
    pub steps: Vec<ProductStep>,
    pub entries_within_bound: bool,
    /// Number of paired factors after which the norm first drops below 1.
    pub contraction_onset: Option<usize>,
}

/// Accumulates `A(n) A(n-1) A(n-2) A(n-3) ... ` down to the pair ending at
/// level 3, recording each partial product.
pub fn matrix_product_audit(
    cf: &ContinuedFraction,
    ell1: &BigReal,
    ell2: &BigReal,
    n: usize,
) -> Result<ProductAudit> {
    if !cf.is_bounded_type() {
        return Err(Error::Domain(
            "product audit needs a bounded-type expansion".into(),
        ));
    }
    if n < 4 {
        return Err(Error::Depth(format!("product audit needs n >= 4, got {n}")));
    }
    let bound = (ell1 / ell2).max(&(ell2 / ell1)).to_f64();
    let mut acc = TransferMatrix::identity(ell1.prec());
    let mut steps = Vec::new();
    let mut k = n;
    let mut onset = None;
    while k >= 4 {
        let pair = level_matrix(cf, k, ell1, ell2)?.mul(&level_matrix(cf, k - 1, ell1, ell2)?);
        acc = acc.mul(&pair);
        let norm = acc.operator_norm();
        if onset.is_none() && norm < 1.0 {
            onset = Some(steps.len() + 1);
        }
        steps.push(ProductStep {
            n: k,
            max_entry: acc.max_entry().to_f64(),
            operator_norm: norm,
        });
        k -= 2;
    }
    let entries_within_bound = steps.iter().all(|s| s.max_entry <= bound * (1.0 + 1e-12));
    Ok(ProductAudit {
        bound,
        steps,
        entries_within_bound,
        contraction_onset: onset,
    })
}

/// `W'(x, y, l1, l2)`.
pub fn wprime(x: &BigReal, y: &BigReal, ell1: &BigReal, ell2: &BigReal) -> Result<BigReal> {
    let p = x.prec();
    let (one, two) = (BigReal::one(p), BigReal::from_u64(2, p));
    let zero = BigReal::zero(p);
    if !(x > &zero && x < &one && y > &zero && y < &one) {
        return Err(Error::Domain("W' needs x, y in (0, 1)".into()));
    }
    let radicand = &one - &(&(&(&two * &(ell1 - &one)) / ell1) * &x.powf(&(&two / ell2)));
    if radicand.is_negative() {
        return Err(Error::Domain("W' radicand is negative".into()));
    }
    let half = ell1 / &two;
    let first = (&half + &(&half * &radicand.sqrt())).recip();
    let four = BigReal::from_u64(4, p);
    let num = y.powf(&(&(&four / ell1) - &two));
    let den = &one - &y.powf(&(&two / ell1));
    Ok(&first * &(&num / &den))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantCheck {
    pub label: String,
    pub value: String,
    pub bound: String,
    pub pass: bool,
}

/// The three bounds on `W'` at `l1 = l2 = 2`.
pub fn wprime_constants_check(prec: usize) -> Result<Vec<ConstantCheck>> {
    let d = |s: &str| BigReal::parse(s, prec).expect("literal");
    let two = d("2");
    let w1 = wprime(&d("0.55"), &d("0.16"), &two, &two)?;
    let w2 = wprime(&d("0.3"), &d("0.44"), &two, &two)?;
    let w3 = wprime(&d("0.16"), &d("0.55"), &two, &two)?;
    let rows = [
        ("W'(0.55,0.16)", w1.clone(), "0.9"),
        ("W'(0.3,0.44)", w2, "0.98"),
        ("W'(0.55,0.16)*W'(0.16,0.55)", &w1 * &w3, "0.85"),
    ];
    Ok(rows
        .into_iter()
        .map(|(label, v, b)| ConstantCheck {
            label: label.into(),
            pass: v < d(b),
            value: v.with_prec(64).to_decimal_string(),
            bound: b.into(),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Degenerate,
    Bounded,
    Critical,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    TheoremRegion,
    LambdaCriterion,
    EmpiricalOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryVerdict {
    pub region: Region,
    pub basis: Basis,
    pub lambda_u: Option<String>,
    pub lambda_s: Option<String>,
    pub cf: String,
    pub ell1: String,
    pub ell2: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<String>,
}

/// Region of the exponent plane, with the eigenvalue criterion for
/// bi-periodic rotation numbers.
pub fn classify_point(cf: &ContinuedFraction, ell1: &BigReal, ell2: &BigReal) -> GeometryVerdict {
    let p = ell1.prec().min(ell2.prec());
    let (one, two) = (BigReal::one(p), BigReal::from_u64(2, p));
    let lambdas = cf
        .biperiodic_pair()
        .and_then(|(a, b)| biperiodic_eigen(a, b, ell1, ell2).ok());
    let lu = lambdas.as_ref().map(|(_, u)| u.to_f64());
    let in_low = [ell1, ell2].iter().all(|l| **l >= one && **l <= two);
    let in_high = [ell1, ell2].iter().all(|l| **l >= two);
    let corner = *ell1 == two && *ell2 == two;
    let near_one = lu.is_some_and(|u| (u - 1.0).abs() <= CRITICAL_TOL);
    let (region, basis, note) = if corner {
        (
            Region::Critical,
            Basis::TheoremRegion,
            Some("(2, 2) closes the degenerate square and lies on lambda_u = 1".to_string()),
        )
    } else if near_one {
        (Region::Critical, Basis::LambdaCriterion, None)
    } else if in_low {
        (
            Region::Degenerate,
            Basis::TheoremRegion,
            Some("degeneracy is proved under negative Schwarzian derivative".to_string()),
        )
    } else if in_high && cf.is_bounded_type() {
        (Region::Bounded, Basis::TheoremRegion, None)
    } else {
        match lu {
            Some(u) if u < 1.0 - CRITICAL_TOL => (Region::Bounded, Basis::LambdaCriterion, None),
            Some(_) => (
                Region::Unknown,
                Basis::LambdaCriterion,
                Some("lambda_u > 1 outside [1, 2]^2: degeneracy not proved".to_string()),
            ),
            None => (Region::Unknown, Basis::EmpiricalOnly, None),
        }
    };
    let s = |x: &BigReal| x.with_prec(64).to_decimal_string();
    GeometryVerdict {
        region,
        basis,
        lambda_u: lambdas.as_ref().map(|(_, u)| s(u)),
        lambda_s: lambdas.as_ref().map(|(l, _)| s(l)),
        cf: cf.to_string(),
        ell1: ell1.to_decimal_string(),
        ell2: ell2.to_decimal_string(),
        note,
        evidence: Vec::new(),
    }
}
