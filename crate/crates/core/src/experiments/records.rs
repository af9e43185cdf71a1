use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::plan::MetricSpec;
use crate::error::{Error, Result};
use crate::samplers::SamplerKind;
use crate::stats::{mean_se, quantile_sorted};

pub const CSV_COLUMNS: [&str; 8] = ["kind", "n", "stream_id", "metric", "s", "value", "tail_bound", "seconds"];

/// Metric name used in CSV rows of replicas that failed; the `value`
/// column is NaN and the message lives in the summary.
const ERROR_METRIC: &str = "error";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: String,
    pub s: Option<f64>,
    pub value: f64,
    pub tail_bound: f64,
}

impl MetricValue {
    pub(crate) fn new(spec: &MetricSpec, value: f64, tail_bound: f64) -> Self {
        MetricValue {
            metric: spec.name().to_string(),
            s: spec.param(),
            value,
            tail_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub kind: SamplerKind,
    pub n: usize,
    pub stream_id: u64,
    pub values: Vec<MetricValue>,
    /// Wall time of sampling plus scoring.
    pub seconds: f64,
    pub error: Option<String>,
}

impl ReplicaRecord {
    pub fn value(&self, metric: &str) -> Option<&MetricValue> {
        self.values.iter().find(|v| v.metric == metric)
    }
}

/// One CSV row; a replica spans one row per metric.
#[derive(Debug, Serialize, Deserialize)]
struct Row<'a> {
    kind: SamplerKind,
    n: usize,
    stream_id: u64,
    metric: &'a str,
    s: Option<f64>,
    value: f64,
    tail_bound: f64,
    seconds: f64,
}

pub(crate) type RecordWriter<W> = csv::Writer<W>;

pub(crate) fn record_writer<W: Write>(w: W) -> Result<RecordWriter<W>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    w.write_record(CSV_COLUMNS)?;
    Ok(w)
}

// csv writes floats in their shortest round-trip form.
pub(crate) fn write_record<W: Write>(w: &mut RecordWriter<W>, r: &ReplicaRecord) -> Result<()> {
    let row = |metric, s, value, tail_bound| Row {
        kind: r.kind,
        n: r.n,
        stream_id: r.stream_id,
        metric,
        s,
        value,
        tail_bound,
        seconds: r.seconds,
    };
    if r.error.is_some() {
        w.serialize(row(ERROR_METRIC, None, f64::NAN, f64::NAN))?;
    }
    for v in &r.values {
        w.serialize(row(&v.metric, v.s, v.value, v.tail_bound))?;
    }
    Ok(())
}

/// Writes the fixed-schema CSV, one row per (replica, metric).
pub fn persist(records: &[ReplicaRecord], path: &Path) -> Result<()> {
    let mut w = record_writer(File::create(path)?)?;
    for r in records {
        write_record(&mut w, r)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`persist`]. Error messages of failed replicas are not part
/// of the CSV; they load back as `"replica failed"`.
pub fn load(path: &Path) -> Result<Vec<ReplicaRecord>> {
    parse_records(File::open(path)?)
}

fn parse_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(i) => format!("column '{}': {}", CSV_COLUMNS[i as usize], err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    };
    Error::Parse { line, message }
}

pub(crate) fn parse_records<R: Read>(input: R) -> Result<Vec<ReplicaRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut raw = csv::StringRecord::new();
    if !rdr.read_record(&mut raw).map_err(parse_error)? || raw.iter().ne(CSV_COLUMNS) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header '{}'", CSV_COLUMNS.join(",")),
        });
    }
    let mut out: Vec<ReplicaRecord> = Vec::new();
    while rdr.read_record(&mut raw).map_err(parse_error)? {
        let row: Row = raw.deserialize(None).map_err(|e| {
            let mut e = parse_error(e);
            if let Error::Parse { line, .. } = &mut e {
                *line = raw.position().map_or(0, |p| p.line() as usize);
            }
            e
        })?;
        let same = matches!(out.last(), Some(r) if r.kind == row.kind && r.n == row.n && r.stream_id == row.stream_id);
        if !same {
            out.push(ReplicaRecord {
                kind: row.kind,
                n: row.n,
                stream_id: row.stream_id,
                values: Vec::new(),
                seconds: row.seconds,
                error: None,
            });
        }
        let rec = out.last_mut().expect("just pushed");
        if row.metric == ERROR_METRIC {
            rec.error = Some("replica failed".into());
        } else {
            rec.values.push(MetricValue {
                metric: row.metric.to_string(),
                s: row.s,
                value: row.value,
                tail_bound: row.tail_bound,
            });
        }
    }
    Ok(out)
}

/// Statistics of one (kind, n, metric, parameter) cell over its replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub kind: SamplerKind,
    pub n: usize,
    pub metric: String,
    pub s: Option<f64>,
    pub count: usize,
    pub mean: f64,
    pub se: f64,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
    pub max_tail_bound: f64,
}

pub fn summarize(records: &[ReplicaRecord]) -> Vec<CellSummary> {
    // Key on the parameter's bits so the map ordering is total and stable.
    let mut groups: BTreeMap<(SamplerKind, usize, String, Option<u64>), (Vec<f64>, f64)> = BTreeMap::new();
    for r in records {
        for v in &r.values {
            let e = groups
                .entry((r.kind, r.n, v.metric.clone(), v.s.map(f64::to_bits)))
                .or_insert_with(|| (Vec::new(), 0.0));
            e.0.push(v.value);
            e.1 = e.1.max(v.tail_bound);
        }
    }
    groups
        .into_iter()
        .map(|((kind, n, metric, s), (mut vals, max_tail_bound))| {
            let m = mean_se(&vals);
            vals.sort_by(f64::total_cmp);
            CellSummary {
                kind,
                n,
                metric,
                s: s.map(f64::from_bits),
                count: vals.len(),
                mean: m.mean,
                se: m.se,
                median: quantile_sorted(&vals, 0.5),
                q90: quantile_sorted(&vals, 0.9),
                q99: quantile_sorted(&vals, 0.99),
                max_tail_bound,
            }
        })
        .collect()
}
