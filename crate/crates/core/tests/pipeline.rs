mod common;

use cherry_core::error::Error;
use cherry_core::pipeline::{run, tune_escalating, MapDescriptor, RunConfig};

fn cfg(ell: &str, depth: usize, prec: usize, cap: usize) -> RunConfig {
    RunConfig {
        spec: common::spec(ell, ell, "golden"),
        depth,
        prec,
        prec_cap: cap,
        c_start: None,
    }
}

#[test]
fn descriptor_round_trips_through_json() {
    let run = common::bounded();
    let d = run.descriptor();
    assert_eq!(d.precision_bits, run.prec);
    assert_eq!(d.rho_target.len(), d.tuned_depth + 1);
    assert!(d.rho_target.iter().all(|a| *a == 1));
    let back = MapDescriptor::from_json(&d.to_json()).unwrap();
    assert_eq!(back, d);
    let m = back.map().unwrap();
    assert_eq!(m.c(), run.c());
    assert_eq!(back.spec().unwrap(), run.spec);
    assert!(MapDescriptor::from_json("{\"ell1\": 2}").is_err());
}

#[test]
fn descriptor_without_expansion_falls_back_to_the_prefix() {
    let mut d = common::bounded().descriptor();
    d.rho_spec = None;
    let json = d.to_json();
    assert!(!json.contains("rho_spec"));
    let spec = MapDescriptor::from_json(&json).unwrap().spec().unwrap();
    assert_eq!(spec.cf.expand(d.rho_target.len()), d.rho_target);
}

#[test]
fn runs_are_deterministic() {
    let a = run(&cfg("3", 6, 128, 1024)).unwrap();
    let b = run(&cfg("3", 6, 128, 1024)).unwrap();
    assert_eq!(a.c(), b.c());
    assert_eq!(a.series.to_csv(), b.series.to_csv());
    assert_eq!(a.descriptor().to_json(), b.descriptor().to_json());
}

#[test]
fn precision_cap_is_an_error() {
    match run(&cfg("1.5", 10, 64, 128)) {
        Err(Error::Precision { reason, .. }) => assert!(reason.contains("cap of 128")),
        other => panic!(
            "expected a precision error, got {:?}",
            other.map(|r| r.prec)
        ),
    }
    let spec = common::spec("1.5", "1.5", "golden");
    assert!(tune_escalating(&spec, 10, 64, 64, None).is_err());
}

#[test]
fn escalation_is_logged() {
    let run = common::degenerate();
    assert!(run.prec > 256);
    assert_eq!(run.escalations[0].from_bits, 256);
    let bound = cherry_core::arith::BigReal::exp2(-((run.prec / 4) as i64), run.prec);
    assert!(run.shortest_arc >= bound);
    assert!(common::bounded().escalations.is_empty());
}

#[test]
fn shallow_runs_are_refused() {
    assert!(matches!(run(&cfg("3", 2, 128, 1024)), Err(Error::Depth(_))));
}

#[test]
fn warm_start_reaches_the_same_map() {
    let base = run(&cfg("3", 6, 128, 1024)).unwrap();
    let mut warm = cfg("3", 6, 128, 1024);
    warm.c_start = Some(base.descriptor().c);
    let again = run(&warm).unwrap();
    let diff = (again.c().rep() - base.c().rep()).abs();
    assert!(diff < cherry_core::arith::BigReal::exp2(-100, 128));
}
