//! End-to-end runs: tune, pull back the flat piece, and compute the ratio
//! series, doubling the precision until the orbit is resolved.

use serde::{Deserialize, Serialize};

use crate::arith::{mod1, Arc, BigReal, CirclePoint};
use crate::error::{Error, Result};
use crate::flatmap::FlatCircleMap;
use crate::partition::{backward_orbit, build_partition, forward_orbit, DynamicalPartition};
use crate::ratios::{compute_series, orbit_requirements, Exponents, OrbitSets, RatioSeries};
use crate::rotation::{
    check_closest_returns, convergents, rho_value, tune_from, ContinuedFraction, ConvergentTable,
    TunedMap,
};

/// Precision ceiling used when none is configured.
pub const DEFAULT_PREC_CAP: usize = 4096;

/// Exact decimal parameters of a map, re-read at every precision.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub ell1: String,
    pub ell2: String,
    pub u_left: String,
    pub u_length: String,
    pub cf: ContinuedFraction,
}

impl MapSpec {
    pub fn exponents(&self, prec: usize) -> Result<(BigReal, BigReal)> {
        Ok((
            BigReal::parse(&self.ell1, prec)?,
            BigReal::parse(&self.ell2, prec)?,
        ))
    }

    pub fn flat(&self, prec: usize) -> Result<Arc> {
        Arc::new(
            mod1(&BigReal::parse(&self.u_left, prec)?)?,
            BigReal::parse(&self.u_length, prec)?,
        )
    }

    /// The untuned map with the given value on the flat piece.
    pub fn map(&self, c: &str, prec: usize) -> Result<FlatCircleMap> {
        let (l1, l2) = self.exponents(prec)?;
        FlatCircleMap::new(
            &l1,
            &l2,
            &self.flat(prec)?,
            &mod1(&BigReal::parse(c, prec)?)?,
            prec,
        )
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: MapSpec,
    /// Deepest level of the ratio series.
    pub depth: usize,
    pub prec: usize,
    pub prec_cap: usize,
    /// Tuned value of `c` to try first.
    pub c_start: Option<String>,
}

/// Why a run was repeated at higher precision.
#[derive(Clone, Debug, Serialize)]
pub struct Escalation {
    pub from_bits: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub spec: MapSpec,
    pub depth: usize,
    pub prec: usize,
    pub tuned: TunedMap,
    pub table: ConvergentTable,
    pub closest: Vec<u64>,
    pub sets: OrbitSets,
    pub series: RatioSeries,
    pub escalations: Vec<Escalation>,
    /// Shortest backward-orbit arc.
    pub shortest_arc: BigReal,
}

/// Map descriptor as stored on disk; decimals are strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub ell1: String,
    pub ell2: String,
    pub u_left: String,
    pub u_length: String,
    pub c: String,
    pub precision_bits: usize,
    /// `a_1, a_2, ...` through the tuned depth and its guard level.
    pub rho_target: Vec<u64>,
    pub tuned_depth: usize,
    /// Exact expansion, for periodic targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_spec: Option<String>,
}

impl MapDescriptor {
    pub fn from_tuned(spec: &MapSpec, tuned: &TunedMap) -> Self {
        MapDescriptor {
            ell1: spec.ell1.clone(),
            ell2: spec.ell2.clone(),
            u_left: spec.u_left.clone(),
            u_length: spec.u_length.clone(),
            c: tuned.map.c().rep().to_decimal_string(),
            precision_bits: tuned.map.prec(),
            rho_target: spec.cf.expand(tuned.tuned_levels),
            tuned_depth: tuned.depth,
            rho_spec: Some(spec.cf.to_string()),
        }
    }

    pub fn spec(&self) -> Result<MapSpec> {
        let cf = match &self.rho_spec {
            Some(s) => s.parse()?,
            None => ContinuedFraction::finite(self.rho_target.clone())?,
        };
        Ok(MapSpec {
            ell1: self.ell1.clone(),
            ell2: self.ell2.clone(),
            u_left: self.u_left.clone(),
            u_length: self.u_length.clone(),
            cf,
        })
    }

    /// The stored map, without retuning.
    pub fn map(&self) -> Result<FlatCircleMap> {
        self.spec()?.map(&self.c, self.precision_bits)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("map descriptor: {e}")))
    }
}

/// Tunes to `depth` (plus the guard level) at `prec` bits.
pub fn tune_spec(
    spec: &MapSpec,
    depth: usize,
    prec: usize,
    c_start: Option<&str>,
) -> Result<TunedMap> {
    let m = spec.map("0", prec)?;
    let start = c_start
        .map(|c| BigReal::parse(c, prec).and_then(|x| mod1(&x)))
        .transpose()?;
    tune_from(&m, &spec.cf, depth, start.as_ref())
}

/// Tunes with escalation on bracket collapse.
pub fn tune_escalating(
    spec: &MapSpec,
    depth: usize,
    prec: usize,
    prec_cap: usize,
    c_start: Option<&str>,
) -> Result<(TunedMap, Vec<Escalation>)> {
    let mut p = prec;
    let mut log = Vec::new();
    loop {
        match tune_spec(spec, depth, p, c_start) {
            Ok(t) => return Ok((t, log)),
            Err(Error::Precision { reason, .. }) => {
                log.push(Escalation {
                    from_bits: p,
                    reason,
                });
                p = next_prec(p, prec_cap, &log)?;
            }
            Err(e) => return Err(e),
        }
    }
}

fn next_prec(p: usize, cap: usize, log: &[Escalation]) -> Result<usize> {
    if 2 * p > cap {
        return Err(Error::Precision {
            index: 0,
            reason: format!(
                "precision cap of {cap} bits reached; last reason: {}",
                log.last().map(|e| e.reason.as_str()).unwrap_or("none")
            ),
        });
    }
    Ok(2 * p)
}

fn run_once(cfg: &RunConfig, prec: usize) -> Result<Run> {
    let spec = &cfg.spec;
    let tuned = tune_spec(spec, cfg.depth + 1, prec, cfg.c_start.as_deref())?;
    let closest = check_closest_returns(&tuned, cfg.depth)?;
    let table = convergents(&spec.cf, cfg.depth + 2)?;
    let (nb, nf) = orbit_requirements(&table, cfg.depth);
    let orbit = backward_orbit(&tuned.map, nb)?;
    let (_, shortest_arc) = orbit.shortest(orbit.len());
    let threshold = BigReal::exp2(-((prec / 4) as i64), prec);
    if shortest_arc < threshold {
        return Err(Error::Precision {
            index: 0,
            reason: format!(
                "shortest arc {} is below 2^-{} at {prec} bits",
                shortest_arc.with_prec(64).to_decimal_string(),
                prec / 4
            ),
        });
    }
    let forward = forward_orbit(&tuned.map, nf + 1);
    let sets = OrbitSets::new(orbit, forward, rho_value(&spec.cf, 64).to_f64());
    let (l1, l2) = spec.exponents(prec)?;
    let series = compute_series(
        &sets,
        &spec.cf,
        &table,
        &Exponents::new(&l1, &l2),
        cfg.depth,
    )?;
    Ok(Run {
        spec: spec.clone(),
        depth: cfg.depth,
        prec,
        tuned,
        table,
        closest,
        sets,
        series,
        escalations: Vec::new(),
        shortest_arc,
    })
}

/// Runs the pipeline, doubling the precision while the tuning bracket
/// collapses or some orbit arc is shorter than `2^{-P/4}`.
pub fn run(cfg: &RunConfig) -> Result<Run> {
    if cfg.depth < 3 {
        return Err(Error::Depth(format!(
            "series depth {} must be >= 3",
            cfg.depth
        )));
    }
    let mut p = cfg.prec;
    let mut log = Vec::new();
    loop {
        match run_once(cfg, p) {
            Ok(mut r) => {
                r.escalations = log;
                return Ok(r);
            }
            Err(Error::Precision { reason, .. }) => {
                log.push(Escalation {
                    from_bits: p,
                    reason,
                });
                p = next_prec(p, cfg.prec_cap, &log)?;
            }
            Err(e) => return Err(e),
        }
    }
}

impl Run {
    pub fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::from_tuned(&self.spec, &self.tuned)
    }

    pub fn c(&self) -> &CirclePoint {
        self.tuned.map.c()
    }

    /// Deepest partition level the orbit supports.
    pub fn max_partition_level(&self) -> usize {
        let have = self.sets.backward.len() as u64;
        (1..self.table.len())
            .take_while(|&n| self.table.q(n) + self.table.q(n + 1) <= have)
            .last()
            .unwrap_or(0)
    }

    pub fn partition(&self, n: usize) -> Result<DynamicalPartition> {
        if n == 0 || n > self.max_partition_level() {
            return Err(Error::Depth(format!(
                "partition level {n} needs more of the backward orbit (max {})",
                self.max_partition_level()
            )));
        }
        build_partition(&self.sets.backward, &self.table, n)
    }

    pub fn partitions(&self, from: usize) -> Result<Vec<DynamicalPartition>> {
        (from..=self.max_partition_level())
            .map(|n| self.partition(n))
            .collect()
    }
}
