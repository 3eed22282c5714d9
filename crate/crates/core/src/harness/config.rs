//! Sweep configuration files.
//!
//! Grammar (one item per line):
//!
//! ```text
//! line    := blank | comment | section | pair
//! comment := '#' text
//! section := '[' name ']'
//! pair    := key '=' value
//! ```
//!
//! Pairs before the first section are defaults; every section is one
//! experiment that inherits them. A file without sections describes a
//! single experiment named `default`. List values (`d`, `m`, `n`,
//! `dprime`) are separated by commas or spaces; the grid is their
//! Cartesian product.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `sampler` | `jittered`, `halfcube`, `uniform`, `lhs` | `jittered` |
//! | `method` | `exact`, `heuristic`, `certified` | `exact` |
//! | `restarts` | heuristic restarts | 16 |
//! | `grid` / `delta` | certified cover resolution or precision | `delta = 0.01` |
//! | `replications` | replications per grid point | 200 |
//! | `seed` | experiment seed | 0 |
//! | `d`, `m`, `n`, `dprime` | grid lists | |
//! | `output` | CSV path | |
//! | `witness` | compute witness means (`true`/`false`) | `true` |

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::discrepancy::DEFAULT_RESTARTS;
use crate::error::{Error, Result};
use crate::sampler::SamplerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Heuristic,
    Certified,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Heuristic => "heuristic",
            Method::Certified => "certified",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "heuristic" => Ok(Method::Heuristic),
            "certified" => Ok(Method::Certified),
            other => Err(Error::validation(format!("unknown method '{other}'"))),
        }
    }
}

/// Resolution of the certified method's cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverChoice {
    Grid(u32),
    Delta(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub name: String,
    pub sampler: SamplerKind,
    pub method: Method,
    pub restarts: usize,
    pub cover: CoverChoice,
    pub replications: usize,
    pub seed: u64,
    pub d: Vec<usize>,
    pub m: Vec<u32>,
    pub n: Vec<usize>,
    pub d_prime: Vec<usize>,
    pub output: Option<PathBuf>,
    pub witness: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            name: "default".into(),
            sampler: SamplerKind::Jittered,
            method: Method::Exact,
            restarts: DEFAULT_RESTARTS,
            cover: CoverChoice::Delta(0.01),
            replications: 200,
            seed: 0,
            d: Vec::new(),
            m: Vec::new(),
            n: Vec::new(),
            d_prime: Vec::new(),
            output: None,
            witness: true,
        }
    }
}

/// One point of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridPoint {
    /// `m^d` jittered cubes.
    Grid { m: u32, d: usize },
    /// `2^{d'}` half-cube boxes.
    HalfCube { d_prime: usize, d: usize },
    /// `n` unstratified points; `m` is set when `n = m^d` came from an `m` list.
    Count { n: usize, d: usize, m: Option<u32> },
}

impl GridPoint {
    pub fn dim(&self) -> usize {
        match *self {
            GridPoint::Grid { d, .. } | GridPoint::HalfCube { d, .. } | GridPoint::Count { d, .. } => d,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GridPoint::Grid { m, d } => format!("(m={m}, d={d})"),
            GridPoint::HalfCube { d_prime, d } => format!("(dprime={d_prime}, d={d})"),
            GridPoint::Count { n, d, .. } => format!("(n={n}, d={d})"),
        }
    }
}

impl SweepConfig {
    /// Cartesian product of the grid lists, `d` varying slowest.
    pub fn grid_points(&self) -> Result<Vec<GridPoint>> {
        if self.d.is_empty() {
            return Err(Error::validation(format!("experiment '{}': no dimensions (key d)", self.name)));
        }
        let mut out = Vec::new();
        for &d in &self.d {
            match self.sampler {
                SamplerKind::Jittered => {
                    if self.m.is_empty() {
                        return Err(Error::validation(format!("experiment '{}': jittered needs key m", self.name)));
                    }
                    out.extend(self.m.iter().map(|&m| GridPoint::Grid { m, d }));
                }
                SamplerKind::HalfCube => {
                    if self.d_prime.is_empty() {
                        return Err(Error::validation(format!(
                            "experiment '{}': halfcube needs key dprime",
                            self.name
                        )));
                    }
                    out.extend(self.d_prime.iter().map(|&d_prime| GridPoint::HalfCube { d_prime, d }));
                }
                SamplerKind::Uniform | SamplerKind::Lhs => {
                    if self.n.is_empty() && self.m.is_empty() {
                        return Err(Error::validation(format!(
                            "experiment '{}': {} needs key n or m",
                            self.name, self.sampler
                        )));
                    }
                    out.extend(self.n.iter().map(|&n| GridPoint::Count { n, d, m: None }));
                    for &m in &self.m {
                        let n = u32::try_from(d)
                            .ok()
                            .and_then(|e| (m as usize).checked_pow(e))
                            .ok_or_else(|| Error::validation(format!("m={m}, d={d}: m^d overflows")))?;
                        out.push(GridPoint::Count { n, d, m: Some(m) });
                    }
                }
                SamplerKind::External => {
                    return Err(Error::validation("sweeps cannot use the external sampler"));
                }
            }
        }
        Ok(out)
    }
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::parse(line, format!("key '{key}': bad list entry '{s}'")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::parse(line, format!("key '{key}': bad value '{v}'")))
}

fn apply(cfg: &mut SweepConfig, line: usize, key: &str, v: &str) -> Result<()> {
    match key {
        "sampler" => cfg.sampler = v.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
        "method" => cfg.method = v.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
        "restarts" => cfg.restarts = parse_one(line, key, v)?,
        "grid" => cfg.cover = CoverChoice::Grid(parse_one(line, key, v)?),
        "delta" => cfg.cover = CoverChoice::Delta(parse_one(line, key, v)?),
        "replications" => cfg.replications = parse_one(line, key, v)?,
        "seed" => cfg.seed = parse_one(line, key, v)?,
        "d" => cfg.d = parse_list(line, key, v)?,
        "m" => cfg.m = parse_list(line, key, v)?,
        "n" => cfg.n = parse_list(line, key, v)?,
        "dprime" => cfg.d_prime = parse_list(line, key, v)?,
        "output" => cfg.output = Some(PathBuf::from(v)),
        "witness" => cfg.witness = parse_one(line, key, v)?,
        other => return Err(Error::parse(line, format!("unknown key '{other}'"))),
    }
    Ok(())
}

/// Parses a configuration file into its experiments.
pub fn parse_config(text: &str) -> Result<Vec<SweepConfig>> {
    let mut defaults = SweepConfig::default();
    let mut sections: Vec<SweepConfig> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line, "section header must end with ']'"))?
                .trim();
            if name.is_empty() {
                return Err(Error::parse(line, "empty section name"));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::parse(line, format!("duplicate section '{name}'")));
            }
            sections.push(SweepConfig {
                name: name.into(),
                ..defaults.clone()
            });
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected 'key = value'"))?;
        let (k, v) = (k.trim(), v.trim());
        if v.is_empty() {
            return Err(Error::parse(line, format!("key '{k}' has no value")));
        }
        let target = sections.last_mut().unwrap_or(&mut defaults);
        apply(target, line, k, v)?;
    }
    if sections.is_empty() {
        sections.push(defaults);
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_inherit_defaults() {
        let text = "\
# d=2 sweep
method = exact
replications = 50
seed = 9

[small]
m = 4, 8
d = 2

[mc]
sampler = uniform
n = 16 64
d = 2 3
method = heuristic
";
        let cfgs = parse_config(text).unwrap();
        assert_eq!(cfgs.len(), 2);
        assert_eq!(cfgs[0].name, "small");
        assert_eq!(cfgs[0].replications, 50);
        assert_eq!(cfgs[0].seed, 9);
        assert_eq!(cfgs[0].grid_points().unwrap(), vec![GridPoint::Grid { m: 4, d: 2 }, GridPoint::Grid { m: 8, d: 2 }]);
        assert_eq!(cfgs[1].method, Method::Heuristic);
        assert_eq!(cfgs[1].grid_points().unwrap().len(), 4);
    }

    #[test]
    fn single_experiment_without_sections() {
        let cfgs = parse_config("sampler = lhs\nm = 3\nd = 5\n").unwrap();
        assert_eq!(cfgs.len(), 1);
        assert_eq!(
            cfgs[0].grid_points().unwrap(),
            vec![GridPoint::Count { n: 243, d: 5, m: Some(3) }]
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("m = 4\nbogus = 1\n", 2),
            ("\n\nm = 4, x\n", 3),
            ("[open\n", 1),
            ("m 4\n", 1),
            ("sampler = sobol\n", 1),
            ("[a]\n[a]\n", 2),
        ] {
            match parse_config(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn grid_needs_keys() {
        let cfgs = parse_config("d = 2\n").unwrap();
        assert!(cfgs[0].grid_points().is_err());
        let cfgs = parse_config("sampler = halfcube\nd = 4\n").unwrap();
        assert!(cfgs[0].grid_points().is_err());
    }
}
