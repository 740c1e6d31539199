//! Parameter-grid sweeps over (r, d) and their CSV/JSON serialization.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{
    is_separable, separability_border, upper_bound_er, AmplitudeOptions, AmplitudePoint,
    DEFAULT_DEFICIT_CEILING, DEFAULT_EPS_BLOCK,
};
use crate::error::{Error, Result};
use crate::phase::{build_phase_matrix, relative_entropy_exact, PhasePoint, DEFAULT_TRUNCATION};
use crate::result::{EntanglementResult, ResultKind};
use crate::tmsv::{pure_entanglement_bits, SqueezeParams, DEFAULT_TAIL_CEILING};

pub const CSV_HEADER: [&str; 9] = [
    "r",
    "d",
    "nbar",
    "value",
    "kind",
    "separable",
    "trace_deficit",
    "min_eig",
    "k_cutoff",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Phase,
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let g = Grid { min, max, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 || !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::InvalidParameter(format!(
                "grid needs count >= 1 and finite min <= max, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.max
                } else {
                    self.min + span * i as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: Model,
    pub r_grid: Grid,
    pub d_grid: Grid,
    /// Bath occupation; used by the amplitude model only.
    pub nbar: f64,
    /// Photon-number truncation N.
    pub truncation: usize,
    /// Raise N per point to the smallest value meeting `tail_ceiling`.
    pub auto_truncation: bool,
    pub eps_block: f64,
    pub tail_ceiling: f64,
    pub deficit_ceiling: f64,
    /// Thread count; never affects output.
    #[serde(skip)]
    pub workers: usize,
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn phase_defaults() -> Self {
        SweepConfig {
            model: Model::Phase,
            r_grid: Grid {
                min: 0.0,
                max: 1.5,
                count: 16,
            },
            d_grid: Grid {
                min: 0.0,
                max: 2.0,
                count: 21,
            },
            nbar: 0.0,
            truncation: DEFAULT_TRUNCATION,
            auto_truncation: true,
            eps_block: DEFAULT_EPS_BLOCK,
            tail_ceiling: DEFAULT_TAIL_CEILING,
            deficit_ceiling: DEFAULT_DEFICIT_CEILING,
            workers: 1,
            format: OutputFormat::Csv,
        }
    }

    pub fn amplitude_defaults(nbar: f64) -> Self {
        SweepConfig {
            model: Model::Amplitude,
            d_grid: Grid {
                min: 0.0,
                max: 1.2,
                count: 13,
            },
            nbar,
            ..Self::phase_defaults()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.r_grid.validate()?;
        self.d_grid.validate()?;
        if self.truncation < 1 {
            return Err(Error::InvalidParameter(
                "truncation must be at least 1".into(),
            ));
        }
        if self.workers < 1 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        for (name, v) in [
            ("eps_block", self.eps_block),
            ("tail_ceiling", self.tail_ceiling),
            ("deficit_ceiling", self.deficit_ceiling),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nbar must be finite and nonnegative, got {}",
                self.nbar
            )));
        }
        Ok(())
    }

    /// Truncation used at squeezing `r`.
    pub fn truncation_for(&self, r: f64) -> Result<usize> {
        if !self.auto_truncation {
            return Ok(self.truncation);
        }
        let sq = SqueezeParams::new(r)?;
        Ok(self
            .truncation
            .max(sq.minimal_truncation(self.tail_ceiling)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub r: f64,
    pub d: f64,
    pub nbar: Option<f64>,
    pub value: f64,
    pub kind: ResultKind,
    pub separable: Option<bool>,
    pub trace_deficit: f64,
    pub min_eig: f64,
    pub k_cutoff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub config: SweepConfig,
    pub records: Vec<SweepRecord>,
}

fn evaluate_point(config: &SweepConfig, r: f64, d: f64) -> Result<SweepRecord> {
    let truncation = config.truncation_for(r)?;
    let (result, nbar, separable): (EntanglementResult, Option<f64>, Option<bool>) = match config
        .model
    {
        Model::Phase => {
            let m = build_phase_matrix(PhasePoint::new(r, d)?, truncation, config.tail_ceiling)?;
            (relative_entropy_exact(&m)?, None, None)
        }
        Model::Amplitude => {
            let point = AmplitudePoint::new(r, d, config.nbar)?;
            let opts = AmplitudeOptions {
                truncation,
                eps_block: config.eps_block,
                deficit_ceiling: config.deficit_ceiling,
            };
            let separable = match is_separable(point) {
                Ok(flag) => Some(flag),
                Err(Error::NoFiniteBorder) => None,
                Err(e) => return Err(e),
            };
            (upper_bound_er(point, opts)?, Some(config.nbar), separable)
        }
    };
    Ok(SweepRecord {
        r,
        d,
        nbar,
        value: result.value_bits,
        kind: result.kind,
        separable,
        trace_deficit: result.diagnostics.trace_deficit,
        min_eig: result.diagnostics.min_eigenvalue,
        k_cutoff: result.diagnostics.k_cutoff,
    })
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Evaluates every (r, d) grid point, r outer and d inner.
///
/// The first failing point in grid order aborts the sweep; no partial table is returned.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let points: Vec<(f64, f64)> = config
        .r_grid
        .values()
        .into_iter()
        .flat_map(|r| config.d_grid.values().into_iter().map(move |d| (r, d)))
        .collect();
    let outcomes: Vec<Result<SweepRecord>> = with_pool(config.workers, || {
        points
            .par_iter()
            .map(|&(r, d)| evaluate_point(config, r, d))
            .collect()
    })?;
    let mut records = Vec::with_capacity(outcomes.len());
    for (outcome, &(r, d)) in outcomes.into_iter().zip(&points) {
        match outcome {
            Ok(rec) => records.push(rec),
            Err(e) => {
                return Err(Error::AtPoint {
                    r,
                    d,
                    nbar: (config.model == Model::Amplitude).then_some(config.nbar),
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(SweepTable {
        config: config.clone(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorderRow {
    pub r: f64,
    pub d_star: f64,
}

/// The separability border d*(r) along the grid.
pub fn emit_border(r_grid: Grid, nbar: f64) -> Result<Vec<BorderRow>> {
    r_grid.validate()?;
    r_grid
        .values()
        .into_iter()
        .map(|r| {
            Ok(BorderRow {
                r,
                d_star: separability_border(r, nbar)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureRow {
    pub r: f64,
    pub value: f64,
}

/// Closed-form pure-state entanglement along the grid.
pub fn pure_table(r_grid: Grid) -> Result<Vec<PureRow>> {
    r_grid.validate()?;
    r_grid
        .values()
        .into_iter()
        .map(|r| {
            Ok(PureRow {
                r,
                value: pure_entanglement_bits(SqueezeParams::new(r)?),
            })
        })
        .collect()
}

/// 17 significant digits; parses back to the identical f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn write_records_csv<W: Write>(records: &[SweepRecord], out: W) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for rec in records {
        w.write_record([
            format_float(rec.r),
            format_float(rec.d),
            rec.nbar.map(format_float).unwrap_or_default(),
            format_float(rec.value),
            rec.kind.as_str().to_string(),
            rec.separable.map(|b| b.to_string()).unwrap_or_default(),
            format_float(rec.trace_deficit),
            format_float(rec.min_eig),
            rec.k_cutoff.map(|k| k.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}

fn bad_data(msg: String) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, msg)
}

fn parse_opt<T: std::str::FromStr>(field: &str) -> std::io::Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|e| bad_data(format!("bad field {field:?}: {e}")))
}

fn parse_req<T: std::str::FromStr>(field: &str) -> std::io::Result<T>
where
    T::Err: std::fmt::Display,
{
    parse_opt(field)?.ok_or_else(|| bad_data("missing required field".into()))
}

pub fn read_records_csv<R: Read>(input: R) -> std::io::Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(bad_data(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        out.push(SweepRecord {
            r: parse_req(&row[0])?,
            d: parse_req(&row[1])?,
            nbar: parse_opt(&row[2])?,
            value: parse_req(&row[3])?,
            kind: parse_req(&row[4])?,
            separable: parse_opt(&row[5])?,
            trace_deficit: parse_req(&row[6])?,
            min_eig: parse_req(&row[7])?,
            k_cutoff: parse_opt(&row[8])?,
        });
    }
    Ok(out)
}

pub fn write_table<W: Write>(
    table: &SweepTable,
    format: OutputFormat,
    mut out: W,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_records_csv(&table.records, out),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, table)?;
            out.write_all(b"\n")
        }
    }
}

pub fn write_border<W: Write>(
    rows: &[BorderRow],
    nbar: f64,
    format: OutputFormat,
    mut out: W,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["r", "d_star"]).map_err(csv_error)?;
            for row in rows {
                w.write_record([format_float(row.r), format_float(row.d_star)])
                    .map_err(csv_error)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(
                &mut out,
                &serde_json::json!({ "nbar": nbar, "rows": rows }),
            )?;
            out.write_all(b"\n")
        }
    }
}

pub fn write_pure<W: Write>(
    rows: &[PureRow],
    format: OutputFormat,
    mut out: W,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["r", "value"]).map_err(csv_error)?;
            for row in rows {
                w.write_record([format_float(row.r), format_float(row.value)])
                    .map_err(csv_error)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &serde_json::json!({ "rows": rows }))?;
            out.write_all(b"\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid::new(0.0, 1.5, 16).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 16);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[15], 1.5);
        assert!((v[5] - 0.5).abs() < 1e-15);
        assert_eq!(Grid::new(0.3, 0.3, 1).unwrap().values(), vec![0.3]);
        assert!(Grid::new(1.0, 0.0, 3).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn auto_truncation_raises_n_only_when_needed() {
        let cfg = SweepConfig::phase_defaults();
        assert_eq!(cfg.truncation_for(1.0).unwrap(), 100);
        let n = cfg.truncation_for(1.5).unwrap();
        assert!(n > 100 && n <= 140, "{n}");
        let fixed = SweepConfig {
            auto_truncation: false,
            ..cfg
        };
        assert_eq!(fixed.truncation_for(1.5).unwrap(), 100);
    }

    #[test]
    fn border_rows() {
        let rows = emit_border(Grid::new(0.0, 1.5, 4).unwrap(), 0.1).unwrap();
        assert_eq!(rows[0].d_star, 0.0);
        assert!((rows[1].d_star - 1.425_659_966_213_998).abs() < 1e-12);
        assert!(matches!(
            emit_border(Grid::new(0.0, 1.5, 4).unwrap(), 0.0),
            Err(Error::NoFiniteBorder)
        ));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.336_909_300_545_897, 1e-300, -4.2e-17, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn failing_point_is_identified() {
        let cfg = SweepConfig {
            r_grid: Grid::new(1.0, 1.5, 2).unwrap(),
            d_grid: Grid::new(0.0, 0.1, 2).unwrap(),
            auto_truncation: false,
            ..SweepConfig::phase_defaults()
        };
        match run_sweep(&cfg) {
            Err(Error::AtPoint { r, d, source, .. }) => {
                assert_eq!((r, d), (1.5, 0.0));
                assert!(matches!(*source, Error::TruncationInsufficient { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
