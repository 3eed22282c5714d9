//! Experiment plumbing: configuration, replicated sweeps, scaling collapse,
//! the Koksma–Hlawka demo, and file formats.

pub mod collapse;
pub mod config;
pub mod io;
pub mod kh;
pub mod sweep;

pub use collapse::{collapse_analysis, CollapseReport, DEFAULT_SPREAD_THRESHOLD};
pub use config::{parse_config, CoverChoice, GridPoint, Method, SweepConfig};
pub use io::{json_envelope, load_point_set, read_point_set, save_point_set, write_point_set, SCHEMA_VERSION};
pub use kh::{kh_demo, product_variation, KhReport};
pub use sweep::{
    read_records_csv, read_replications_csv, run_sweep, save_records, write_records_csv, write_replications_csv,
    Replication, SweepOutput, SweepRecord,
};
