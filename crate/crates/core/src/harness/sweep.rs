//! Replicated discrepancy measurements over a parameter grid.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CoverChoice, GridPoint, Method, SweepConfig};
use crate::bounds::{lower_main_bound, smallm_lower_bound, upper_thm_bound, UpperConstant};
use crate::discrepancy::{
    exact_route_for_size, star_disc_certified_upper, star_disc_exact, star_disc_heuristic, CertifiedOptions,
    CoverSpec, ExactOptions,
};
use crate::error::{Error, Result};
use crate::sampler::{
    generate_half_cube, generate_jittered, generate_lhs, generate_uniform, PointSet, SamplerKind, StratifiedSpec,
    DEFAULT_POINT_CAP,
};
use crate::seed::{mix, replication_seed};
use crate::stats::Summary;
use crate::witness::{witness_discrete, witness_smallm};

/// Stream tag for heuristic restarts, separate from point generation.
const HEURISTIC_TAG: u64 = 0x4845_5552_4953_5443;

/// One aggregated row of a sweep; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub m: Option<u32>,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub sampler: String,
    pub method: String,
    #[serde(rename = "R")]
    pub r: usize,
    pub mean_disc: f64,
    pub std_disc: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub mean_normalized: f64,
    pub witness_mean: Option<f64>,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    pub seed: u64,
}

/// One replication of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub point: usize,
    pub rep: usize,
    pub seed: u64,
    pub disc: f64,
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub replications: Vec<Replication>,
}

/// Seed of grid point `index` under the experiment seed.
pub fn point_seed(experiment_seed: u64, index: usize) -> u64 {
    mix(experiment_seed, index as u64)
}

fn point_count(p: &GridPoint) -> Result<usize> {
    match *p {
        GridPoint::Grid { m, d } => StratifiedSpec::full_grid(m, d)?.cell_count(DEFAULT_POINT_CAP),
        GridPoint::HalfCube { d_prime, d } => StratifiedSpec::half_cube(d_prime, d)?.cell_count(DEFAULT_POINT_CAP),
        GridPoint::Count { n, .. } => {
            if n == 0 || n > DEFAULT_POINT_CAP {
                Err(Error::validation(format!("n = {n} outside [1, {DEFAULT_POINT_CAP}]")))
            } else {
                Ok(n)
            }
        }
    }
}

fn cover_for(cfg: &SweepConfig, d: usize) -> Result<CoverSpec> {
    match cfg.cover {
        CoverChoice::Grid(m) => CoverSpec::from_grid(m, d),
        CoverChoice::Delta(delta) => CoverSpec::from_delta(delta, d),
    }
}

/// Fail-fast check of every grid point before any computation.
pub fn validate(cfg: &SweepConfig) -> Result<Vec<GridPoint>> {
    if cfg.replications == 0 {
        return Err(Error::validation(format!("experiment '{}': replications must be >= 1", cfg.name)));
    }
    if cfg.method == Method::Heuristic && cfg.restarts == 0 {
        return Err(Error::validation(format!("experiment '{}': restarts must be >= 1", cfg.name)));
    }
    let points = cfg.grid_points()?;
    for p in &points {
        let fail = |e: Error| Error::validation(format!("experiment '{}', grid point {}: {e}", cfg.name, p.label()));
        let n = point_count(p).map_err(fail)?;
        let d = p.dim();
        match cfg.method {
            Method::Exact => {
                exact_route_for_size(n, d, &ExactOptions::default()).map_err(fail)?;
            }
            Method::Certified => {
                let cover = cover_for(cfg, d).map_err(fail)?;
                let corners = (cover.grid as f64 + 1.0).powi(d as i32);
                if corners > CertifiedOptions::default().max_corners as f64 {
                    return Err(fail(Error::Infeasible {
                        what: "certified upper bound",
                        work: corners,
                        budget: CertifiedOptions::default().max_corners as f64,
                        hint: "use a smaller grid M (larger delta)",
                    }));
                }
            }
            Method::Heuristic => {}
        }
    }
    Ok(points)
}

fn generate_at(cfg: &SweepConfig, p: &GridPoint, seed: u64) -> Result<PointSet> {
    match (*p, cfg.sampler) {
        (GridPoint::Grid { m, d }, _) => generate_jittered(&StratifiedSpec::full_grid(m, d)?, seed),
        (GridPoint::HalfCube { d_prime, d }, _) => generate_half_cube(&StratifiedSpec::half_cube(d_prime, d)?, seed),
        (GridPoint::Count { n, d, .. }, SamplerKind::Lhs) => generate_lhs(n, d, seed),
        (GridPoint::Count { n, d, .. }, _) => generate_uniform(n, d, seed),
    }
}

/// `D*` of one point set by the configured method.
fn measure(cfg: &SweepConfig, p: &PointSet, seed: u64) -> Result<f64> {
    Ok(match cfg.method {
        Method::Exact => star_disc_exact(p)?.value,
        Method::Heuristic => star_disc_heuristic(p, cfg.restarts, mix(seed, HEURISTIC_TAG))?.value,
        Method::Certified => star_disc_certified_upper(p, &cover_for(cfg, p.dim())?)?.value,
    })
}

/// Witness total for jittered sets: the discrete scheme when `m >= d`,
/// otherwise the small-m scheme.
fn witness_total(p: &PointSet, m: u32, d: usize) -> Result<f64> {
    if m as usize >= d {
        Ok(witness_discrete(p)?.total)
    } else {
        Ok(witness_smallm(p)?.total)
    }
}

fn bounds_for(p: &GridPoint) -> (Option<f64>, Option<f64>) {
    let GridPoint::Grid { m, d } = *p else {
        return (None, None);
    };
    let (m, d) = (m as u64, d as u64);
    if d < 2 {
        return (None, None);
    }
    let lower = match lower_main_bound(m, d) {
        Ok(b) if b.applicable => Some(b.value),
        _ => smallm_lower_bound(m, d).ok().map(|b| b.value),
    };
    let upper = upper_thm_bound(m, d, UpperConstant::Statement)
        .ok()
        .filter(|b| b.applicable)
        .map(|b| b.value);
    (lower, upper)
}

/// Runs every grid point of `cfg`. Replications run on `threads` workers
/// (all cores when `None`); results do not depend on the worker count.
pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> Result<SweepOutput> {
    let points = validate(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::validation("thread count must be >= 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::validation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_points(cfg, &points))
}

fn run_points(cfg: &SweepConfig, points: &[GridPoint]) -> Result<SweepOutput> {
    let mut records = Vec::with_capacity(points.len());
    let mut replications = Vec::with_capacity(points.len() * cfg.replications);
    for (index, point) in points.iter().enumerate() {
        let pseed = point_seed(cfg.seed, index);
        let want_witness = cfg.witness && matches!(point, GridPoint::Grid { .. });
        let reps: Vec<Replication> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| {
                let seed = replication_seed(pseed, rep as u64);
                let p = generate_at(cfg, point, seed)?;
                let disc = measure(cfg, &p, seed)?;
                let witness = match *point {
                    GridPoint::Grid { m, d } if want_witness => Some(witness_total(&p, m, d)?),
                    _ => None,
                };
                Ok(Replication {
                    point: index,
                    rep,
                    seed,
                    disc,
                    witness,
                })
            })
            .collect::<Result<_>>()?;
        records.push(aggregate(cfg, point, pseed, &reps)?);
        replications.extend(reps);
    }
    Ok(SweepOutput { records, replications })
}

/// Summarizes the replications of one grid point.
pub fn aggregate(cfg: &SweepConfig, point: &GridPoint, seed: u64, reps: &[Replication]) -> Result<SweepRecord> {
    let n = point_count(point)?;
    let discs: Vec<f64> = reps.iter().map(|r| r.disc).collect();
    let s = Summary::of(&discs);
    let (ci95_lo, ci95_hi) = s.ci95();
    let witnesses: Option<Vec<f64>> = reps.iter().map(|r| r.witness).collect();
    let witness_mean = witnesses.filter(|w| !w.is_empty()).map(|w| Summary::of(&w).mean);
    let (bound_lower, bound_upper) = bounds_for(point);
    let m = match *point {
        GridPoint::Grid { m, .. } => Some(m),
        GridPoint::Count { m, .. } => m,
        GridPoint::HalfCube { .. } => None,
    };
    Ok(SweepRecord {
        m,
        d: point.dim(),
        n,
        sampler: cfg.sampler.to_string(),
        method: cfg.method.to_string(),
        r: reps.len(),
        mean_disc: s.mean,
        std_disc: s.std,
        ci95_lo,
        ci95_hi,
        mean_normalized: s.mean / n as f64,
        witness_mean,
        bound_lower,
        bound_upper,
        seed,
    })
}

/// Writes records as CSV, optionally preceded by a `#` comment line.
pub fn write_records_csv<W: Write>(records: &[SweepRecord], mut w: W, comment: Option<&str>) -> Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    for r in records {
        csv.serialize(r)?;
    }
    if records.is_empty() {
        csv.write_record(RECORD_COLUMNS)?;
    }
    csv.flush()?;
    Ok(())
}

pub const RECORD_COLUMNS: [&str; 15] = [
    "m",
    "d",
    "N",
    "sampler",
    "method",
    "R",
    "mean_disc",
    "std_disc",
    "ci95_lo",
    "ci95_hi",
    "mean_normalized",
    "witness_mean",
    "bound_lower",
    "bound_upper",
    "seed",
];

pub fn write_replications_csv<W: Write>(reps: &[Replication], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in reps {
        csv.serialize(r)?;
    }
    csv.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::parse(pos.line() as usize, e.to_string()),
        None => Error::Csv(e),
    }
}

/// Reads records written by [`write_records_csv`]; `#` lines are skipped.
pub fn read_records_csv<R: std::io::Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(RECORD_COLUMNS.iter().copied()) {
        return Err(Error::parse(
            1,
            format!("expected columns {}", RECORD_COLUMNS.join(",")),
        ));
    }
    rdr.deserialize().map(|r| r.map_err(csv_error)).collect()
}

pub fn read_replications_csv<R: std::io::Read>(r: R) -> Result<Vec<Replication>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().map(|r| r.map_err(csv_error)).collect()
}

/// Writes the sweep CSV to `path`; the comment line carries a timestamp
/// unless `deterministic` is set.
pub fn save_records(records: &[SweepRecord], path: &Path, deterministic: bool) -> Result<()> {
    let comment = (!deterministic).then(|| {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("generated_unix={secs}")
    });
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_records_csv(records, &mut w, comment.as_deref())?;
    w.flush()?;
    Ok(())
}
