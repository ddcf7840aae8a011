//! Experiment runner for the curve shortening flow lab: configuration
//! files, run execution with per-frame logging, limit-region tracking, SVG
//! plots and verdict reports.

pub mod config;
mod error;
pub mod limit;
pub mod report;
pub mod run;
pub mod svg;

pub use config::{parse_config, RunConfig};
pub use error::{LabError, Result};
pub use limit::{limit_region_summary, LimitRegionTrack};
pub use report::report;
pub use run::{execute_run, RunOutcome, Verdicts};
pub use svg::emit_svg;
