#![allow(dead_code)]

use std::sync::OnceLock;

use cherry_core::pipeline::{run, MapSpec, Run, RunConfig};

/// Flat piece used by the reference runs: long enough that the bounded
/// regime reaches its limiting ratios within a dozen levels.
pub const U_LEFT: &str = "0.015";
pub const U_LENGTH: &str = "0.97";

pub fn spec(ell1: &str, ell2: &str, cf: &str) -> MapSpec {
    MapSpec {
        ell1: ell1.into(),
        ell2: ell2.into(),
        u_left: U_LEFT.into(),
        u_length: U_LENGTH.into(),
        cf: cf.parse().unwrap(),
    }
}

pub fn run_spec(spec: MapSpec, depth: usize, prec: usize) -> Run {
    run(&RunConfig {
        spec,
        depth,
        prec,
        prec_cap: 4096,
        c_start: None,
    })
    .unwrap()
}

/// Golden mean, exponents (1.5, 1.5), depth 10.
pub fn degenerate() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| run_spec(spec("1.5", "1.5", "golden"), 10, 256))
}

/// Golden mean, exponents (3, 3), depth 10.
pub fn bounded() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| run_spec(spec("3", "3", "golden"), 10, 256))
}
