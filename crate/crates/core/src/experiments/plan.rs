use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::records::{persist, record_writer, summarize, write_record, MetricValue, RecordWriter, ReplicaRecord};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::metrics::{
    cap_discrepancy_l2, cap_discrepancy_linf, g_of_t, generalized_sum, log_energy, wce_distance_s32,
    wce_heat_kernel, wce_legendre, LinfMode, QuadSpec, SmoothnessParam, WceOptions, WceRoute, EXACT_LINF_MAX_N,
};
use crate::rng::RngStream;
use crate::samplers::{SamplerKind, SamplerSpec};

/// Current plan schema version. Plans must carry it explicitly.
///
/// Version 1 fields: `version`, `sampler`, `n_values`, `replicas`,
/// `metrics`, `seed`, optional `output_dir`.
pub const PLAN_VERSION: u32 = 1;

fn default_tol() -> f64 {
    1e-8
}

fn default_caps() -> usize {
    4096
}

/// One functional to evaluate per replica. The `s` column of a record
/// carries the metric's parameter (`s` for `wce` and `gensum`, `t` for `gt`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", deny_unknown_fields)]
pub enum MetricSpec {
    #[serde(rename = "wce")]
    Wce {
        s: f64,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "legendre_route")]
        route: WceRoute,
    },
    #[serde(rename = "gt")]
    Gt {
        t: f64,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    #[serde(rename = "capL2")]
    CapL2 {
        #[serde(default = "default_caps")]
        caps: usize,
    },
    /// Exact up to [`EXACT_LINF_MAX_N`] points unless `starts` is given.
    #[serde(rename = "capLinf")]
    CapLinf {
        #[serde(default)]
        starts: Option<usize>,
    },
    #[serde(rename = "gensum")]
    Gensum { s: f64 },
    #[serde(rename = "energy")]
    Energy,
    /// The linear statistic `Σ z_i`.
    #[serde(rename = "sumz")]
    SumZ,
}

fn legendre_route() -> WceRoute {
    WceRoute::Legendre
}

impl MetricSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSpec::Wce { route: WceRoute::Legendre, .. } => "wce",
            MetricSpec::Wce { route: WceRoute::HeatKernel, .. } => "wce-heat",
            MetricSpec::Wce { route: WceRoute::DistanceS32, .. } => "wce-distance",
            MetricSpec::Gt { .. } => "gt",
            MetricSpec::CapL2 { .. } => "capL2",
            MetricSpec::CapLinf { .. } => "capLinf",
            MetricSpec::Gensum { .. } => "gensum",
            MetricSpec::Energy => "energy",
            MetricSpec::SumZ => "sumz",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            MetricSpec::Wce { s, .. } | MetricSpec::Gensum { s } => Some(s),
            MetricSpec::Gt { t, .. } => Some(t),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tol_ok = |tol: f64| {
            if tol > 0.0 && tol.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("metric tolerance must be positive, got {tol}")))
            }
        };
        match *self {
            MetricSpec::Wce { s, tol, route } => {
                SmoothnessParam::new(s)?;
                tol_ok(tol)?;
                if route == WceRoute::DistanceS32 && s != 1.5 {
                    return Err(Error::invalid("the distance route only evaluates s = 1.5"));
                }
            }
            MetricSpec::Gt { t, tol } => {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Domain(format!("heat time t = {t} must be positive")));
                }
                tol_ok(tol)?;
            }
            MetricSpec::CapL2 { caps } => {
                if caps < 2 {
                    return Err(Error::invalid("capL2 needs at least two Monte-Carlo caps"));
                }
            }
            MetricSpec::CapLinf { starts: Some(0) } => {
                return Err(Error::invalid("capLinf needs at least one start"));
            }
            MetricSpec::Gensum { s } if !(s > 1.0 && s < 2.0) => {
                return Err(Error::Domain(format!("gensum needs 1 < s < 2, got {s}")));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Evaluates one metric. `rng` feeds the Monte-Carlo metrics only.
pub fn evaluate_metric(c: &Configuration, spec: &MetricSpec, rng: &RngStream) -> Result<MetricValue> {
    let (value, tail_bound) = match *spec {
        MetricSpec::Wce { s, tol, route } => {
            let s = SmoothnessParam::new(s)?;
            let r = match route {
                WceRoute::Legendre => wce_legendre(c, s, &WceOptions::with_tol(tol))?,
                WceRoute::HeatKernel => wce_heat_kernel(c, s, &QuadSpec { tol, ..QuadSpec::default() })?,
                WceRoute::DistanceS32 => wce_distance_s32(c).wce,
            };
            (r.value, r.tail_bound)
        }
        MetricSpec::Gt { t, tol } => {
            let g = g_of_t(c, t, tol)?;
            (g.value, g.tail_bound)
        }
        MetricSpec::CapL2 { caps } => {
            let e = cap_discrepancy_l2(c, caps, rng)?;
            (e.value(), e.se)
        }
        MetricSpec::CapLinf { starts } => {
            let mode = match starts {
                None if c.len() <= EXACT_LINF_MAX_N => LinfMode::ExactSmallN,
                None => LinfMode::Randomized { starts: 64, seed: rng.rng().next_u64() },
                Some(starts) => LinfMode::Randomized { starts, seed: rng.rng().next_u64() },
            };
            (cap_discrepancy_linf(c, mode)?, 0.0)
        }
        MetricSpec::Gensum { s } => (generalized_sum(c, SmoothnessParam::new(s)?)?, 0.0),
        MetricSpec::Energy => (log_energy(c)?, 0.0),
        MetricSpec::SumZ => (c.iter().map(|p| p.z()).sum(), 0.0),
    };
    Ok(MetricValue::new(spec, value, tail_bound))
}

/// Stream id for replica `replica` of the `n_index`-th point count.
pub fn stream_id(n_index: usize, replica: usize) -> u64 {
    ((n_index as u64) << 32) | replica as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub version: u32,
    pub sampler: SamplerKind,
    pub n_values: Vec<usize>,
    pub replicas: usize,
    pub metrics: Vec<MetricSpec>,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn from_json(s: &str) -> Result<Self> {
        let plan: ExperimentPlan = serde_json::from_str(s)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != PLAN_VERSION {
            return Err(Error::invalid(format!(
                "unsupported plan version {} (expected {PLAN_VERSION})",
                self.version
            )));
        }
        if self.replicas == 0 {
            return Err(Error::invalid("replicas must be at least 1"));
        }
        if self.replicas > u32::MAX as usize {
            return Err(Error::invalid("replicas must fit in 32 bits"));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::invalid("n_values must be a nonempty list of positive counts"));
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("at least one metric is required"));
        }
        for m in &self.metrics {
            m.validate()?;
        }
        Ok(())
    }
}

/// Records sorted by `(n, stream_id)` plus summary statistics. When the
/// plan names an output directory, `records.csv` and `summary.json` are
/// written there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchOutcome {
    pub records: Vec<ReplicaRecord>,
    pub failures: usize,
    pub summary: Vec<super::records::CellSummary>,
}

struct PartialLog {
    path: PathBuf,
    writer: RecordWriter<File>,
}

/// Runs every (N, replica) cell of the plan in parallel.
///
/// Each replica is seeded only by `(plan.seed, stream_id)`, so the records
/// do not depend on thread count or scheduling. A replica that fails keeps
/// its row with the error message instead of metric values. With an output
/// directory, rows are appended to `records.partial.csv` as they finish and
/// flushed one by one; the sorted `records.csv` replaces it at the end.
pub fn run_batch(plan: &ExperimentPlan) -> Result<BatchOutcome> {
    plan.validate()?;
    let cells: Vec<(usize, u64)> = plan
        .n_values
        .iter()
        .enumerate()
        .flat_map(|(ni, &n)| (0..plan.replicas).map(move |r| (n, stream_id(ni, r))))
        .collect();

    let log = match &plan.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join("records.partial.csv");
            let mut writer = record_writer(File::create(&path)?)?;
            writer.flush()?;
            Some(Mutex::new(PartialLog { path, writer }))
        }
        None => None,
    };

    let mut records: Vec<ReplicaRecord> = cells
        .par_iter()
        .map(|&(n, id)| {
            let mut rec = run_replica(plan, n, id);
            if let Some(log) = &log {
                let mut guard = log.lock().unwrap_or_else(|e| e.into_inner());
                let res = write_record(&mut guard.writer, &rec).and_then(|_| Ok(guard.writer.flush()?));
                if let Err(e) = res {
                    rec.error.get_or_insert_with(|| format!("persist: {e}"));
                }
            }
            rec
        })
        .collect();
    records.sort_by_key(|r| (r.n, r.stream_id));

    let summary = summarize(&records);
    if let (Some(dir), Some(log)) = (&plan.output_dir, log) {
        let partial = log.into_inner().unwrap_or_else(|e| e.into_inner());
        drop(partial.writer);
        persist(&records, &dir.join("records.csv"))?;
        let json = serde_json::to_string_pretty(&serde_json::json!({
            "plan": plan,
            "summary": summary,
            "failures": records.iter().filter_map(|r| r.error.as_ref().map(|e| (r.n, r.stream_id, e))).collect::<Vec<_>>(),
        }))?;
        fs::write(dir.join("summary.json"), json + "\n")?;
        fs::remove_file(partial.path)?;
    }
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    Ok(BatchOutcome { records, failures, summary })
}

fn run_replica(plan: &ExperimentPlan, n: usize, id: u64) -> ReplicaRecord {
    let stream = RngStream::new(plan.seed, id);
    let start = Instant::now();
    let result = SamplerSpec::new(plan.sampler, n, stream).and_then(|spec| spec.sample()).and_then(|c| {
        plan.metrics
            .iter()
            .enumerate()
            .map(|(k, m)| evaluate_metric(&c, m, &stream.substream(k as u64 + 1)))
            .collect::<Result<Vec<_>>>()
    });
    let seconds = start.elapsed().as_secs_f64();
    let (values, error) = match result {
        Ok(v) => (v, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    ReplicaRecord {
        kind: plan.sampler,
        n,
        stream_id: id,
        values,
        seconds,
        error,
    }
}
