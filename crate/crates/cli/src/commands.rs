use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use cherry_core::arith::BigReal;
use cherry_core::classify::{classify_point, curve_trace, Region};
use cherry_core::dimension::{box_count_matched, dichotomy_report, estimate, DimensionRun};
use cherry_core::error::Error;
use cherry_core::pipeline::{
    run, tune_escalating, MapDescriptor, MapSpec, Run, RunConfig, DEFAULT_PREC_CAP,
};
use cherry_core::ratios::{
    chain_audit, nu_series, verify_apriori, verify_lemma1, verify_lower_bounds, verify_recursion,
    VerifyReport,
};
use cherry_core::rotation::{check_closest_returns, ContinuedFraction};

use crate::args::{ClassifyArgs, CurveArgs, DimArgs, SeriesArgs, TuneArgs, VerifyArgs};
use crate::output::{stamped_csv, to_json, Recorder};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_TUNING: i32 = 2;
pub const EXIT_DEPTH: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// A message and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Tuning { .. } | Error::Combinatorics { .. } | Error::Bracket { .. } => {
                EXIT_TUNING
            }
            Error::Depth(_) => EXIT_DEPTH,
            Error::Precision { .. } => EXIT_PRECISION,
            Error::Parse(_) | Error::Domain(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_FAIL,
            message: format!("i/o error: {e}"),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Precision ceiling from `CHERRY_PREC_CAP`.
pub fn prec_cap() -> Result<usize, Failure> {
    match std::env::var("CHERRY_PREC_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("CHERRY_PREC_CAP={v} is not a bit count"))),
        Err(_) => Ok(DEFAULT_PREC_CAP),
    }
}

fn check_prec(prec: usize) -> Result<(), Failure> {
    if prec < 64 {
        return Err(Failure::usage(format!("--prec {prec} is below 64 bits")));
    }
    Ok(())
}

fn exponent(s: &str, name: &str) -> Result<BigReal, Failure> {
    let x = BigReal::parse(s, 64)
        .map_err(|_| Failure::usage(format!("--{name} {s} is not a decimal")))?;
    if x < BigReal::one(64) {
        return Err(Failure::usage(format!("--{name} {s} must be >= 1")));
    }
    Ok(x)
}

fn rho(s: &str) -> Result<ContinuedFraction, Failure> {
    s.parse()
        .map_err(|e: Error| Failure::usage(format!("--rho {s}: {e}")))
}

fn load_map(path: &Path) -> Result<MapDescriptor, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("map file {}: {e}", path.display())))?;
    Ok(MapDescriptor::from_json(&text)?)
}

/// Runs the series of a stored map without retuning it.
fn run_map(desc: &MapDescriptor, depth: usize, cap: usize) -> Result<Run, Failure> {
    if depth < 2 {
        return Err(Failure::usage(format!("--depth {depth} must be >= 2")));
    }
    if depth + 1 > desc.tuned_depth {
        return Err(Error::Depth(format!(
            "depth {depth} needs a map tuned to depth {}, this one has {}",
            depth + 1,
            desc.tuned_depth
        ))
        .into());
    }
    Ok(run(&RunConfig {
        spec: desc.spec()?,
        depth,
        prec: desc.precision_bits,
        prec_cap: cap.max(desc.precision_bits),
        c_start: Some(desc.c.clone()),
    })?)
}

fn audit(rec: &mut Recorder, requested: usize, cap: usize, r: &Run) {
    rec.precision.requested_bits = requested;
    rec.precision.final_bits = r.prec;
    rec.precision.cap_bits = cap;
    rec.precision.escalations = r.escalations.clone();
    rec.precision.shortest_arc = Some(r.shortest_arc.with_prec(64).to_decimal_string());
}

fn config_echo<T: Serialize>(name: &str, args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("serializable");
    v["command"] = json!(name);
    v
}

pub fn tune(a: &TuneArgs) -> Outcome {
    check_prec(a.prec)?;
    let cap = prec_cap()?;
    let (left, length) = a
        .flat
        .split_once(',')
        .ok_or_else(|| Failure::usage("--flat takes `left,length`"))?;
    let len = BigReal::parse(length.trim(), 64)
        .map_err(|_| Failure::usage(format!("--flat length {length} is not a decimal")))?;
    if !(len.is_positive() && len < BigReal::one(64)) {
        return Err(Failure::usage("--flat length must lie in (0, 1)"));
    }
    BigReal::parse(left.trim(), 64).map_err(|_| Failure::usage("--flat left is not a decimal"))?;
    exponent(&a.l1, "l1")?;
    exponent(&a.l2, "l2")?;
    if a.depth < 2 {
        return Err(Failure::usage(format!("--depth {} must be >= 2", a.depth)));
    }
    let spec = MapSpec {
        ell1: a.l1.clone(),
        ell2: a.l2.clone(),
        u_left: left.trim().into(),
        u_length: length.trim().into(),
        cf: rho(&a.rho)?,
    };
    let mut rec = Recorder::new(config_echo("tune", a));
    let (tuned, escalations) = tune_escalating(&spec, a.depth + 1, a.prec, cap, None)?;
    let returns = check_closest_returns(&tuned, a.depth)?;
    let desc = MapDescriptor::from_tuned(&spec, &tuned);
    rec.precision.requested_bits = a.prec;
    rec.precision.final_bits = tuned.map.prec();
    rec.precision.cap_bits = cap;
    rec.precision.escalations = escalations;
    rec.checks.pass = returns.len();
    println!("n\tq_n\tclosest_return");
    for (i, q) in returns.iter().enumerate() {
        println!("{}\t{}\t{}", i + 1, tuned.convergents.q(i + 1), q);
    }
    println!("c = {}", desc.c);
    rec.write(&a.out, &desc.to_json())?;
    rec.finish(&a.out.with_extension("manifest.json"), EXIT_OK)?;
    Ok(EXIT_OK)
}

pub fn ratios(a: &SeriesArgs) -> Outcome {
    let cap = prec_cap()?;
    let desc = load_map(&a.map)?;
    let mut rec = Recorder::new(config_echo("ratios", a));
    let r = run_map(&desc, a.depth, cap)?;
    audit(&mut rec, desc.precision_bits, cap, &r);
    let stamp = |csv: &str| stamped_csv(csv, r.prec, desc.tuned_depth);
    rec.write(&a.out.join("ratios.csv"), &stamp(&r.series.to_csv()))?;
    let mut nu = String::from("n,nu,residual\n");
    for row in nu_series(&r.series) {
        let _ = writeln!(
            nu,
            "{},{},{}",
            row.n,
            row.nu,
            row.residual.unwrap_or_default()
        );
    }
    rec.write(&a.out.join("nu.csv"), &stamp(&nu))?;
    for (n, alpha) in r.series.alphas_f64().iter().enumerate() {
        println!("alpha_{} = {alpha:.6e}", n + 1);
    }
    rec.finish(&a.out.join("manifest.json"), EXIT_OK)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Suite {
    name: String,
    checks: usize,
    failures: usize,
    hard_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

impl Suite {
    fn of(rep: &VerifyReport) -> Suite {
        Suite {
            name: rep.name.clone(),
            checks: rep.checks.len(),
            failures: rep.checks.iter().filter(|c| !c.pass).count(),
            hard_failures: rep.hard_failures(),
            skipped: None,
        }
    }

    fn skipped(name: &str, why: String) -> Suite {
        Suite {
            name: name.into(),
            checks: 0,
            failures: 0,
            hard_failures: 0,
            skipped: Some(why),
        }
    }
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let cap = prec_cap()?;
    let s = &a.series;
    let desc = load_map(&s.map)?;
    let mut rec = Recorder::new(config_echo("verify", a));
    let r = run_map(&desc, s.depth, cap)?;
    audit(&mut rec, desc.precision_bits, cap, &r);
    let series = &r.series;
    let depth = series.depth();
    let mut suites = Vec::new();
    let mut all = VerifyReport::new("all", a.n0);

    match verify_apriori(series, a.n0) {
        Ok(rep) => {
            suites.push(Suite::of(&rep));
            all.extend(rep);
        }
        Err(e) => suites.push(Suite::skipped("apriori", e.to_string())),
    }
    let mut lemma = VerifyReport::new("lemma1", a.n0);
    for n in 3..=depth {
        lemma.extend(verify_lemma1(series, n)?);
    }
    let mut recursion = VerifyReport::new("recursion", a.n0);
    for n in 4..=depth {
        recursion.extend(verify_recursion(series, n)?);
    }
    for rep in [lemma, recursion] {
        suites.push(Suite::of(&rep));
        all.extend(rep);
    }

    let (l1, l2) = r.spec.exponents(64)?;
    let verdict = classify_point(&r.spec.cf, &l1, &l2);
    let gating = verdict.region == Region::Bounded;
    let lower = if depth >= 4 && r.spec.cf.is_bounded_type() {
        Some(verify_lower_bounds(series, 4, depth)?)
    } else {
        None
    };
    let lower_hard = usize::from(gating && lower.as_ref().is_some_and(|l| !l.passed()));

    let mut chain = Vec::new();
    let mut chain_hard = 0;
    for n in 4..=depth {
        for k in 0..series.quotient(n - 1) {
            match chain_audit(&r.tuned.map, &r.sets, &r.table, n, k) {
                Ok(rep) => {
                    if n >= a.n0 && !rep.min_diffeo_dpo_ok {
                        chain_hard += 1;
                    }
                    chain.push(json!({ "n": n, "k": k, "report": rep }));
                }
                Err(e) => chain.push(json!({ "n": n, "k": k, "skipped": e.to_string() })),
            }
        }
    }

    for c in &all.checks {
        if c.pass {
            rec.checks.pass += 1;
        } else {
            rec.checks.fail += 1;
        }
    }
    let hard = all.hard_failures() + lower_hard + chain_hard;
    rec.checks.hard_fail = hard;
    let pass = hard == 0;
    let summary = json!({
        "precision_bits": r.prec,
        "tuned_depth": desc.tuned_depth,
        "depth": depth,
        "n0": a.n0,
        "region": verdict.region,
        "suites": suites,
        "lower_bounds": lower,
        "lower_bounds_gate": gating,
        "chain_audit": chain,
        "nu": nu_series(series),
        "hard_failures": hard,
        "pass": pass,
    });
    rec.write(&s.out.join("verify.json"), &to_json(&summary))?;
    rec.write(
        &s.out.join("checks.csv"),
        &stamped_csv(&all.to_csv(), r.prec, desc.tuned_depth),
    )?;
    for suite in &suites {
        match &suite.skipped {
            Some(why) => println!("{:<10} skipped: {why}", suite.name),
            None => println!(
                "{:<10} {} checks, {} failures, {} hard",
                suite.name, suite.checks, suite.failures, suite.hard_failures
            ),
        }
    }
    println!("hard failures: {hard}");
    let code = if pass { EXIT_OK } else { EXIT_FAIL };
    rec.finish(&s.out.join("manifest.json"), code)?;
    Ok(code)
}

pub fn classify(a: &ClassifyArgs) -> Outcome {
    check_prec(a.prec)?;
    let cf = rho(&a.rho)?;
    exponent(&a.l1, "l1")?;
    exponent(&a.l2, "l2")?;
    let l1 = BigReal::parse(&a.l1, a.prec)?;
    let l2 = BigReal::parse(&a.l2, a.prec)?;
    let verdict = classify_point(&cf, &l1, &l2);
    let text = to_json(&verdict);
    print!("{text}");
    if let Some(dir) = &a.out {
        let mut rec = Recorder::new(config_echo("classify", a));
        rec.precision.requested_bits = a.prec;
        rec.precision.final_bits = a.prec;
        rec.write(&dir.join("verdict.json"), &text)?;
        rec.finish(&dir.join("manifest.json"), EXIT_OK)?;
    }
    Ok(EXIT_OK)
}

/// Splits a decimal into digits and a power-of-ten scale.
fn decimal(s: &str) -> Result<(i128, u32), Failure> {
    let bad = || Failure::usage(format!("`{s}` is not a plain decimal"));
    let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: i128 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok((digits, frac.len() as u32))
}

fn format_scaled(v: i128, scale: u32) -> String {
    if scale == 0 {
        return v.to_string();
    }
    let p = 10i128.pow(scale);
    let s = format!(
        "{}.{:0width$}",
        v / p,
        (v % p).abs(),
        width = scale as usize
    );
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `start:stop:step` as exact decimal strings, `stop` included when hit.
pub fn decimal_grid(spec: &str) -> Result<Vec<String>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(Failure::usage(format!(
            "grid `{spec}` is not start:stop:step"
        )));
    };
    let parsed = [decimal(start)?, decimal(stop)?, decimal(step)?];
    let scale = parsed.iter().map(|p| p.1).max().unwrap_or(0);
    let [x0, x1, dx] = parsed.map(|(v, s)| v * 10i128.pow(scale - s));
    if dx <= 0 || x1 < x0 {
        return Err(Failure::usage(format!("grid `{spec}` is empty")));
    }
    if (x1 - x0) / dx > 100_000 {
        return Err(Failure::usage(format!("grid `{spec}` has too many points")));
    }
    Ok((0..=(x1 - x0) / dx)
        .map(|i| format_scaled(x0 + i * dx, scale))
        .collect())
}

pub fn curve(a: &CurveArgs) -> Outcome {
    check_prec(a.prec)?;
    if a.a == 0 || a.b == 0 {
        return Err(Failure::usage("--a and --b must be >= 1"));
    }
    let grid = decimal_grid(&a.l1)?;
    let values = grid
        .iter()
        .map(|g| BigReal::parse(g, a.prec))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rec = Recorder::new(config_echo("curve", a));
    rec.precision.requested_bits = a.prec;
    rec.precision.final_bits = a.prec;
    let mut report = curve_trace(a.a, a.b, &values, a.prec)?;
    for (p, g) in report.points.iter_mut().zip(&grid) {
        p.ell1 = g.clone();
    }
    let found = report.points.iter().filter(|p| p.ell2.is_some()).count();
    rec.checks.pass = usize::from(report.monotone);
    rec.checks.fail = usize::from(!report.monotone);
    let csv = format!("# precision_bits={}\n{}", a.prec, report.to_csv());
    rec.write(&a.out.join("curve.csv"), &csv)?;
    println!(
        "{found} of {} grid points on the curve; monotone: {}",
        grid.len(),
        report.monotone
    );
    let code = if report.monotone { EXIT_OK } else { EXIT_FAIL };
    rec.finish(&a.out.join("manifest.json"), code)?;
    Ok(code)
}

pub fn dim(a: &DimArgs) -> Outcome {
    let cap = prec_cap()?;
    let s = &a.series;
    let desc = load_map(&s.map)?;
    let mut rec = Recorder::new(config_echo("dim", a));
    let r = run_map(&desc, s.depth, cap)?;
    audit(&mut rec, desc.precision_bits, cap, &r);
    let top = r.max_partition_level();
    if a.from == 0 || a.from > top {
        return Err(Error::Depth(format!(
            "--from {} is outside the partition levels 1..={top} of depth {}",
            a.from, s.depth
        ))
        .into());
    }
    let parts = r.partitions(1)?;
    let est = estimate(&parts[a.from - 1..])?;
    let boxes = box_count_matched(&parts, top).ok();
    rec.write(
        &s.out.join("dimension.csv"),
        &stamped_csv(&est.to_csv(), r.prec, desc.tuned_depth),
    )?;
    let summary = json!({
        "precision_bits": r.prec,
        "tuned_depth": desc.tuned_depth,
        "estimate": est,
        "box_count": boxes,
    });
    rec.write(&s.out.join("dimension.json"), &to_json(&summary))?;
    for l in &est.levels {
        println!("D_{} = {:.6} ({} gaps)", l.n, l.d, l.gap_count);
    }
    let mut code = EXIT_OK;
    if let Some(other) = &a.compare {
        let od = load_map(other)?;
        let orun = run_map(&od, s.depth, cap)?;
        let oest = estimate(&orun.partitions(a.from)?)?;
        let (d1, d2) = r.spec.exponents(64)?;
        let (b1, b2) = orun.spec.exponents(64)?;
        let rep = dichotomy_report(
            &DimensionRun {
                cf: &r.spec.cf,
                ell1: &d1,
                ell2: &d2,
                estimate: &est,
            },
            &DimensionRun {
                cf: &orun.spec.cf,
                ell1: &b1,
                ell2: &b2,
                estimate: &oest,
            },
        )?;
        rec.checks.pass = usize::from(rep.pass);
        rec.checks.fail = usize::from(!rep.pass);
        rec.write(&s.out.join("dichotomy.json"), &to_json(&rep))?;
        println!("dichotomy: {}", if rep.pass { "pass" } else { "fail" });
        if !rep.pass {
            code = EXIT_FAIL;
        }
    }
    rec.finish(&s.out.join("manifest.json"), code)?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_exact_decimals() {
        let g = decimal_grid("1.5:6:0.1").unwrap();
        assert_eq!(g.len(), 46);
        assert_eq!(g[5], "2");
        assert_eq!(g[6], "2.1");
        assert_eq!(g.last().unwrap(), "6");
        assert_eq!(decimal_grid("2:3:1").unwrap(), vec!["2", "3"]);
        assert!(decimal_grid("2:1:0.5").is_err());
        assert!(decimal_grid("1:2").is_err());
        assert!(decimal_grid("1:2:0").is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        let code = |e: Error| Failure::from(e).code;
        assert_eq!(code(Error::Depth("x".into())), EXIT_DEPTH);
        assert_eq!(
            code(Error::Precision {
                index: 0,
                reason: "x".into()
            }),
            EXIT_PRECISION
        );
        assert_eq!(
            code(Error::Combinatorics {
                expected: vec![],
                found: vec![]
            }),
            EXIT_TUNING
        );
        assert_eq!(code(Error::Parse("x".into())), EXIT_USAGE);
    }
}
