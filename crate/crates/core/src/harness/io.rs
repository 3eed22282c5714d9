//! Point-set text files and versioned JSON envelopes.
//!
//! A point-set file is plain text:
//!
//! ```text
//! # comment lines start with '#'
//! # meta {"sampler":"jittered","spec":{"kind":"full_grid","m":3,"d":2},"seed":7}
//! 2 9
//! 1.2345678901234567e-1 5.0000000000000000e-1
//! ...
//! ```
//!
//! The first non-comment line holds `d N`; then exactly `N` lines of `d`
//! coordinates in `[0, 1)`. Coordinates are written with 17 significant
//! digits, so write → read → write is byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::sampler::{PointSet, Provenance};

pub const SCHEMA_VERSION: u32 = 1;

const META_PREFIX: &str = "# meta ";

pub fn write_point_set<W: Write>(p: &PointSet, mut w: W) -> Result<()> {
    writeln!(w, "# jitterdisc point set")?;
    if let Some(meta) = p.meta() {
        writeln!(w, "{META_PREFIX}{}", serde_json::to_string(meta)?)?;
    }
    writeln!(w, "{} {}", p.dim(), p.len())?;
    let mut line = String::new();
    for q in p.points() {
        line.clear();
        for (i, x) in q.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{x:.16e}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_point_set<R: BufRead>(r: R) -> Result<PointSet> {
    let mut meta: Option<Provenance> = None;
    let mut header: Option<(usize, usize)> = None;
    let mut coords = Vec::new();
    let mut rows = 0usize;
    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if let Some(json) = t.strip_prefix(META_PREFIX) {
            meta = Some(
                serde_json::from_str(json.trim())
                    .map_err(|e| Error::parse(lineno, format!("bad meta comment: {e}")))?,
            );
            continue;
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let Some((d, n)) = header else {
            if fields.len() != 2 {
                return Err(Error::parse(lineno, "expected header 'd N'"));
            }
            let d: usize = fields[0]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad dimension '{}'", fields[0])))?;
            let n: usize = fields[1]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad point count '{}'", fields[1])))?;
            if d == 0 {
                return Err(Error::parse(lineno, "dimension must be >= 1"));
            }
            if n == 0 {
                return Err(Error::parse(lineno, "empty point list"));
            }
            header = Some((d, n));
            coords.reserve(d.saturating_mul(n).min(1 << 24));
            continue;
        };
        if rows == n {
            return Err(Error::parse(lineno, format!("more than the declared {n} points")));
        }
        if fields.len() != d {
            return Err(Error::parse(
                lineno,
                format!("expected {d} coordinates, found {}", fields.len()),
            ));
        }
        for (axis, f) in fields.iter().enumerate() {
            let x: f64 = f
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad coordinate '{f}'")))?;
            if !(0.0..1.0).contains(&x) {
                return Err(Error::parse(
                    lineno,
                    format!("coordinate {axis} is {x}; coordinates must be in [0, 1) (must be < 1)"),
                ));
            }
            coords.push(x);
        }
        rows += 1;
    }
    let Some((d, n)) = header else {
        return Err(Error::parse(0, "missing header 'd N'"));
    };
    if rows != n {
        return Err(Error::parse(0, format!("declared {n} points, found {rows}")));
    }
    let p = PointSet::new(d, coords)?;
    Ok(match meta {
        Some(m) => p.with_meta(m),
        None => p,
    })
}

pub fn save_point_set(p: &PointSet, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_point_set(p, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_point_set(path: &Path) -> Result<PointSet> {
    read_point_set(BufReader::new(File::open(path)?))
}

/// `{"schema_version": 1, "command": command, ...payload}`; non-object payloads
/// go under `"result"`.
pub fn json_envelope<T: Serialize>(command: &str, payload: &T) -> Result<Value> {
    let mut obj = Map::new();
    obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    obj.insert("command".into(), command.into());
    match serde_json::to_value(payload)? {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    Ok(Value::Object(obj))
}
