//! Scaling collapse: sweep means divided by their theoretical rate.

use serde::{Deserialize, Serialize};

use super::sweep::SweepRecord;
use crate::bounds::collapse_rate;
use crate::error::{Error, Result};

pub const DEFAULT_SPREAD_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub m: Option<u32>,
    #[serde(rename = "N")]
    pub n: usize,
    pub mean_disc: f64,
    pub rate: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseGroup {
    pub sampler: String,
    pub d: usize,
    /// `d m^{(d-1)/2} √(1 + ln(m/d))` for jittered sets, `√(dN)` otherwise.
    pub rate: String,
    pub points: Vec<CollapsePoint>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub threshold: f64,
    pub groups: Vec<CollapseGroup>,
    pub pass: bool,
}

/// Groups records by `(sampler, d)` in order of first appearance and checks
/// that `max/min` of the rate-normalized means stays within `threshold`.
pub fn collapse_analysis(records: &[SweepRecord], threshold: f64) -> Result<CollapseReport> {
    if records.is_empty() {
        return Err(Error::validation("collapse analysis needs at least one record"));
    }
    if !(threshold >= 1.0) {
        return Err(Error::validation(format!("spread threshold must be >= 1, got {threshold}")));
    }
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in records {
        let key = (r.sampler.clone(), r.d);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut groups = Vec::with_capacity(keys.len());
    for (sampler, d) in keys {
        let jittered = sampler == "jittered";
        let points = records
            .iter()
            .filter(|r| r.sampler == sampler && r.d == d)
            .map(|r| {
                let rate = if jittered {
                    let m = r
                        .m
                        .ok_or_else(|| Error::validation("jittered record without m"))?;
                    collapse_rate(m as u64, d as u64)
                } else {
                    (d as f64 * r.n as f64).sqrt()
                };
                Ok(CollapsePoint {
                    m: r.m,
                    n: r.n,
                    mean_disc: r.mean_disc,
                    rate,
                    ratio: r.mean_disc / rate,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let min = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let max = points.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
        let spread = max / min;
        groups.push(CollapseGroup {
            rate: if jittered { "d*m^((d-1)/2)*sqrt(1+ln(m/d))" } else { "sqrt(d*N)" }.into(),
            sampler,
            d,
            points,
            min,
            max,
            spread,
            pass: spread <= threshold,
        });
    }
    let pass = groups.iter().all(|g| g.pass);
    Ok(CollapseReport { threshold, groups, pass })
}
