//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cherry_core::arith::{mod1, Arc, BigReal, CirclePoint};
use cherry_core::classify::{biperiodic_eigen, curve_trace, t_func, wprime_constants_check};
use cherry_core::dimension::{bowen_dim_cover, dichotomy_report, estimate, Cover, DimensionRun};
use cherry_core::flatmap::FlatCircleMap;
use cherry_core::partition::refinement_check;
use cherry_core::pipeline::{tune_escalating, Run};
use cherry_core::ratios::{
    chain_audit, cross_cr, cross_po, distortion_audit, return_decay, verify_apriori, verify_lemma1,
    verify_lower_bounds, verify_recursion, Quadruple,
};
use cherry_core::rotation::{cf_value, closest_returns, convergents, rotation_number_estimate};

/// Depth of the reference runs for the geometry criteria.
const DEPTH: usize = 12;
/// Highest partition level checked for integrity.
const PARTITION_LEVELS: usize = 10;
const START_BITS: usize = 256;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Reference {
    degenerate: Run,
    bounded: Run,
}

fn reference(prec: usize) -> Reference {
    Reference {
        degenerate: common::run_spec(common::spec("1.5", "1.5", "golden"), DEPTH, prec),
        bounded: common::run_spec(common::spec("3", "3", "golden"), DEPTH, prec),
    }
}

fn r(s: &str, p: usize) -> BigReal {
    BigReal::parse(s, p).unwrap()
}

fn wprime_constants() -> Outcome {
    let rows = wprime_constants_check(256).unwrap();
    let detail = rows
        .iter()
        .map(|c| {
            format!(
                "{} = {:.8} < {}",
                c.label,
                c.value.parse::<f64>().unwrap(),
                c.bound
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(rows.iter().all(|c| c.pass), detail)
}

fn transition_point() -> Outcome {
    let p = 256;
    let two = r("2", p);
    let (ls, lu) = biperiodic_eigen(1, 1, &two, &two).unwrap();
    let eig_ok = (lu.to_f64() - 1.0).abs() < 1e-12 && (ls.to_f64() - 0.25).abs() < 1e-12;
    let grid: Vec<BigReal> = ["1.5", "2", "3"].iter().map(|s| r(s, p)).collect();
    let curve = curve_trace(1, 1, &grid, p).unwrap();
    let at_two = curve.points[1].ell2_value.as_ref().map(BigReal::to_f64);
    let curve_ok = at_two.is_some_and(|y| (y - 2.0).abs() < 1e-6);
    outcome(
        eig_ok && curve_ok,
        format!(
            "lambda_u = {:.3e} + 1, lambda_s = {}, curve l2(2) = {at_two:?}",
            lu.to_f64() - 1.0,
            ls.to_f64()
        ),
    )
}

fn eigen_identities() -> Outcome {
    let p = 128;
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..20 {
        for j in 0..20 {
            let l1 = BigReal::from_f64(1.25 + 4.75 * i as f64 / 19.0, p);
            let l2 = BigReal::from_f64(1.25 + 4.75 * j as f64 / 19.0, p);
            for a in 1..=3u64 {
                for b in 1..=3u64 {
                    let Ok((ls, lu)) = biperiodic_eigen(a, b, &l1, &l2) else {
                        failures += 1;
                        continue;
                    };
                    let u = l1.powi(b as usize).recip();
                    let v = l2.powi(a as usize).recip();
                    let prod = &u * &v;
                    let t = &t_func(1, b, &l1, &l2).unwrap() * &t_func(2, a, &l1, &l2).unwrap();
                    let sum = &(&t + &u) + &v;
                    let e1 = (&ls * &lu).rel_diff(&prod).to_f64();
                    let e2 = (&ls + &lu).rel_diff(&sum).to_f64();
                    worst = worst.max(e1).max(e2);
                }
            }
        }
    }
    outcome(
        failures == 0 && worst <= 1e-12,
        format!("3600 cases, worst relative error {worst:.2e}, {failures} domain errors"),
    )
}

fn tuning_combinatorics() -> Outcome {
    let depth = 10;
    let mut lines = Vec::new();
    let mut pass = true;
    for rho in ["golden", "[2]rep"] {
        for ell in ["1.5", "3"] {
            let spec = common::spec(ell, ell, rho);
            let (tuned, _) = tune_escalating(&spec, depth, 512, 4096, None).unwrap();
            let table = convergents(&spec.cf, depth + 1).unwrap();
            let found = closest_returns(&tuned.map, depth, table.q(depth + 1));
            let returns_ok = found == table.qs()[..depth];
            let q10 = table.q(depth);
            let p = tuned.map.prec();
            let x0 = CirclePoint::zero(p);
            let (est, _) = rotation_number_estimate(&tuned.map, 20 * q10 as usize, &x0);
            let rho_val = cf_value(&spec.cf, 60, p).unwrap();
            let err = (&est - &rho_val).abs().to_f64();
            let rho_ok = err < 1.0 / q10 as f64;
            pass &= returns_ok && rho_ok;
            lines.push(format!(
                "{rho} l={ell}: returns {} |rho err| {err:.1e}",
                if returns_ok { "ok" } else { "MISMATCH" }
            ));
        }
    }
    outcome(pass, lines.join("; "))
}

fn partition_integrity(refs: &Reference) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, run) in [("degenerate", &refs.degenerate), ("bounded", &refs.bounded)] {
        let tol = BigReal::exp2(-(run.prec as i64) / 2, run.prec);
        let parts: Vec<_> = (1..=PARTITION_LEVELS)
            .map(|n| run.partition(n).unwrap())
            .collect();
        let tiles = parts
            .iter()
            .all(|p| (&p.total_length() - &BigReal::one(run.prec)).abs() <= tol);
        let violations: usize = parts
            .windows(2)
            .map(|w| {
                let rep = refinement_check(&w[0], &w[1]);
                rep.violations.len() + usize::from(!rep.marked_persist)
            })
            .sum();
        let decay = return_decay(&run.sets, &run.table, 3, run.depth).unwrap();
        pass &= tiles && violations == 0 && decay.passed();
        notes.push(format!(
            "{name}: tiling {tiles}, {violations} refinement violations, decay slope {:.3}",
            decay.slope
        ));
    }
    outcome(pass, notes.join("; "))
}

struct Geometry {
    pass: bool,
    detail: String,
}

fn geometry(refs: &Reference) -> Geometry {
    let a = refs.degenerate.series.alphas_f64();
    let at = |n: usize| a[n - 1];
    let deg_decreasing = (5..DEPTH).all(|n| at(n + 1) < at(n));
    let deg_drop = at(DEPTH) < at(5) / 10.0;
    let nu: Vec<f64> = (5..=DEPTH).map(|n| -at(n).ln()).collect();
    let steps: Vec<f64> = nu.windows(2).map(|w| w[1] - w[0]).collect();
    let convex = steps.iter().all(|d| *d > 0.0) && steps.windows(2).all(|w| w[1] > w[0]);

    let b = refs.bounded.series.alphas_f64();
    let tail = &b[4..DEPTH];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
        (lo.min(*x), hi.max(*x))
    });
    let bounded_ok = lo > 0.01 * hi;
    let last = &b[DEPTH - 5..DEPTH];
    let no_monotone_tail = !last.windows(2).all(|w| w[1] < w[0]);
    Geometry {
        pass: deg_decreasing && deg_drop && convex && bounded_ok && no_monotone_tail,
        detail: format!(
            "(1.5,1.5): alpha_5 = {:.3e}, alpha_12 = {:.3e}, nu steps {:?}; (3,3): min/max = {:.3}, tail monotone {}",
            at(5),
            at(DEPTH),
            steps.iter().map(|d| (d * 100.0).round() / 100.0).collect::<Vec<_>>(),
            lo / hi,
            !no_monotone_tail
        ),
    }
}

fn inequality_suite(refs: &Reference) -> Outcome {
    let s = &refs.degenerate.series;
    let hard = |checks: &[cherry_core::ratios::Check]| {
        checks.iter().filter(|c| !c.pass && c.level >= 6).count()
    };
    let apriori = verify_apriori(s, 6).unwrap();
    let mut lemma = 0;
    for n in 3..=DEPTH {
        lemma += hard(&verify_lemma1(s, n).unwrap().checks);
    }
    let mut recursion = 0;
    for n in 4..=DEPTH {
        recursion += hard(&verify_recursion(s, n).unwrap().checks);
    }
    let lower = verify_lower_bounds(&refs.bounded.series, 4, DEPTH).unwrap();
    let infima: Vec<String> = lower
        .families
        .iter()
        .map(|f| format!("{} {:.3e}", f.name, f.infimum()))
        .collect();
    let a = hard(&apriori.checks);
    outcome(
        a + lemma + recursion == 0 && lower.passed(),
        format!(
            "hard failures apriori {a}, lemma1 {lemma}, recursion {recursion}; lower-bound infima {}",
            infima.join(", ")
        ),
    )
}

fn cross_ratios(refs: &Reference) -> Outcome {
    let p = 192;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let one = BigReal::one(p);
    let ulp = BigReal::exp2(1 - p as i64, p);
    let mut sum_fail = 0;
    for _ in 0..10_000 {
        let start: f64 = rng.gen();
        let mut g: [f64; 3] = [
            rng.gen_range(1e-6..1.0),
            rng.gen_range(1e-6..1.0),
            rng.gen_range(1e-6..1.0),
        ];
        let total = g.iter().sum::<f64>() * rng.gen_range(1.001..2.0);
        g.iter_mut().for_each(|v| *v /= total);
        let a = BigReal::from_f64(start, p);
        let b = &a + &BigReal::from_f64(g[0], p);
        let c = &b + &BigReal::from_f64(g[1], p);
        let d = &c + &BigReal::from_f64(g[2], p);
        let q = Quadruple::new(
            mod1(&a).unwrap(),
            mod1(&b).unwrap(),
            mod1(&c).unwrap(),
            mod1(&d).unwrap(),
        )
        .unwrap();
        if (&(&cross_cr(&q) + &cross_po(&q)) - &one).abs() > ulp {
            sum_fail += 1;
        }
    }

    let pt = |x: f64| mod1(&BigReal::from_f64(x, p)).unwrap();
    let u = Arc::new(pt(0.2), r("0.25", p)).unwrap();
    let m = FlatCircleMap::new(&r("2", p), &r("2", p), &u, &pt(0.618), p).unwrap();
    let mut dpo_fail = 0;
    for _ in 0..1_000 {
        let s: [f64; 4] = [(); 4].map(|_| rng.gen_range(0.01..1.0));
        let total: f64 = s.iter().sum();
        let mut x = 0.46;
        let mut pts = vec![pt(x)];
        for v in &s[..3] {
            x += 0.72 * v / total;
            pts.push(pt(x));
        }
        let q = Quadruple::new(
            pts[0].clone(),
            pts[1].clone(),
            pts[2].clone(),
            pts[3].clone(),
        )
        .unwrap();
        let rep = distortion_audit(&m, &q, 1).unwrap();
        if rep.diffeo_steps != 1 || !rep.min_diffeo_dpo_ok {
            dpo_fail += 1;
        }
    }

    let mut chains = Vec::new();
    let mut chains_finite = true;
    for (name, run) in [("degenerate", &refs.degenerate), ("bounded", &refs.bounded)] {
        let mut worst = 0.0f64;
        for n in 4..=run.depth {
            let rep = chain_audit(&run.tuned.map, &run.sets, &run.table, n, 0).unwrap();
            let dpo: f64 = rep.prod_dpo.parse().unwrap();
            chains_finite &= dpo.is_finite() && dpo > 0.0;
            worst = worst.max(dpo);
        }
        chains.push(format!("{name} max chain DPo {worst:.3}"));
    }
    outcome(
        sum_fail == 0 && dpo_fail == 0 && chains_finite,
        format!(
            "Cr+Po off by > 1 ulp: {sum_fail}/10000; DPo < 1: {dpo_fail}/1000; {}",
            chains.join(", ")
        ),
    )
}

fn dimension(refs: &Reference) -> Outcome {
    let want = 2f64.ln() / 3f64.ln();
    let synthetic =
        (8..=12).all(|d| (bowen_dim_cover(&Cover::middle_thirds(d)).unwrap() - want).abs() < 1e-6);
    let est = |run: &Run| estimate(&run.partitions(4).unwrap()).unwrap();
    let (de, be) = (est(&refs.degenerate), est(&refs.bounded));
    let (ld, lb) = (
        refs.degenerate.spec.exponents(64).unwrap(),
        refs.bounded.spec.exponents(64).unwrap(),
    );
    let cf = &refs.degenerate.spec.cf;
    let rep = dichotomy_report(
        &DimensionRun {
            cf,
            ell1: &ld.0,
            ell2: &ld.1,
            estimate: &de,
        },
        &DimensionRun {
            cf: &refs.bounded.spec.cf,
            ell1: &lb.0,
            ell2: &lb.1,
            estimate: &be,
        },
    )
    .unwrap();
    outcome(
        synthetic && rep.pass,
        format!(
            "middle thirds {}; final D_n {:.4} (degenerate) vs {:.4} (bounded)",
            if synthetic { "ok" } else { "off" },
            rep.degenerate_final,
            rep.bounded_final
        ),
    )
}

fn determinism(refs: &Reference) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, run) in [("degenerate", &refs.degenerate), ("bounded", &refs.bounded)] {
        let p = run.prec;
        let again = common::run_spec(run.spec.clone(), DEPTH, 2 * p);
        let bound = BigReal::exp2(-(p as i64) / 2, 2 * p);
        let mut worst = f64::INFINITY;
        for n in 1..=DEPTH {
            let a = run.series.alpha(n).unwrap().with_prec(2 * p);
            let d = a.rel_diff(again.series.alpha(n).unwrap());
            pass &= d < bound;
            if !d.is_zero() {
                worst = worst.min(-d.to_f64().log2());
            }
        }
        notes.push(format!(
            "{name} agrees to {worst:.0} bits at {} (need {})",
            2 * p,
            p / 2
        ));
    }
    let twin = common::run_spec(refs.bounded.spec.clone(), DEPTH, START_BITS);
    let identical = twin.series.to_csv() == refs.bounded.series.to_csv()
        && twin.descriptor().to_json() == refs.bounded.descriptor().to_json();
    outcome(
        pass && identical,
        format!(
            "{}; repeat run byte-identical: {identical}",
            notes.join(", ")
        ),
    )
}

fn report(index: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let elapsed = t.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed < b);
    let pass = o.pass && in_budget;
    let timing = match budget {
        Some(b) if !in_budget => format!(" [over budget: {elapsed:.1?} > {b:?}]"),
        _ => format!(" [{elapsed:.1?}]"),
    };
    println!(
        "{} {index:>2} {name}: {}{timing}",
        if pass { "PASS" } else { "FAIL" },
        o.detail
    );
    pass
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        report(1, "W' constants", Some(secs(1)), wprime_constants),
        report(
            2,
            "lambda_u transition point",
            Some(secs(1)),
            transition_point,
        ),
        report(3, "eigenvalue identities", Some(secs(10)), eigen_identities),
        report(
            4,
            "tuning combinatorics",
            Some(secs(600)),
            tuning_combinatorics,
        ),
    ];
    let t = Instant::now();
    let refs = reference(START_BITS);
    println!(
        "     reference runs: depth {DEPTH}, degenerate at {} bits, bounded at {} bits [{:.1?}]",
        refs.degenerate.prec,
        refs.bounded.prec,
        t.elapsed()
    );
    results.push(report(5, "partition integrity", None, || {
        partition_integrity(&refs)
    }));
    results.push(report(6, "geometry dichotomy", None, || {
        let g = geometry(&refs);
        outcome(g.pass, g.detail)
    }));
    results.push(report(7, "inequality suite", None, || {
        inequality_suite(&refs)
    }));
    results.push(report(8, "cross-ratio properties", None, || {
        cross_ratios(&refs)
    }));
    results.push(report(9, "dimension dichotomy", Some(secs(300)), || {
        dimension(&refs)
    }));
    results.push(report(10, "determinism and precision", None, || {
        determinism(&refs)
    }));
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
