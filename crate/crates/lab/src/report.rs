//! Human-readable summary of a run directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{LabError, Result};
use crate::run::{Verdict, Verdicts};

/// Display titles of the verdict rows.
fn title(name: &str) -> &str {
    match name {
        "theorem_1a" => "convex projection for t > 0",
        "theorem_1b" => "shrinks to a point",
        "sturm" => "Sturm monotonicity",
        "plane_counts" => "plane intersection counts",
        "gamma_chain" => "Γ-chain of slope bounds",
        "three_point" => "three-point preservation",
        "diameter_bound" => "diameter bound",
        "barrier" => "barrier comparisons",
        "vertical_tangent" => "vertical-tangent events",
        "limit_region" => "limit region nesting",
        "extinction" => "extinction",
        other => other,
    }
}

fn margins(v: &Verdict) -> String {
    v.margins
        .iter()
        .map(|(k, x)| match x {
            Some(x) => format!("{k}={x:.4e}"),
            None => format!("{k}=n/a"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn read_verdicts(out_dir: &Path) -> Result<Verdicts> {
    let path = out_dir.join("verdicts.json");
    if !path.is_file() {
        return Err(LabError::MissingArtifact(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| LabError::Malformed { path, message: e.to_string() })
}

/// The verdict table of a run directory. Needs `verdicts.json` and
/// `series.csv`.
pub fn report(out_dir: &Path) -> Result<String> {
    let verdicts = read_verdicts(out_dir)?;
    let csv = out_dir.join("series.csv");
    if !csv.is_file() {
        return Err(LabError::MissingArtifact(csv));
    }
    let rows = fs::read_to_string(&csv).map_err(|e| LabError::io(&csv, e))?.lines().count().saturating_sub(1);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "stop reason {}; {} steps, final t = {:.6e}; {} frames archived ({rows} rows in series.csv)",
        verdicts.stop_reason.as_str(),
        verdicts.steps,
        verdicts.final_time,
        verdicts.frames
    );
    let width = verdicts.checks.iter().map(|v| title(&v.name).chars().count()).max().unwrap_or(0);
    for v in &verdicts.checks {
        let name = title(&v.name);
        let pad = " ".repeat(width - name.chars().count());
        let frame = v.tightest_frame.map_or_else(|| "-".to_string(), |f| f.to_string());
        let _ = writeln!(
            out,
            "{name}{pad}  {:<14}  tightest frame {frame:>6}  {}",
            v.status.as_str(),
            v.detail
        );
        if !v.margins.is_empty() {
            let _ = writeln!(out, "{}    {}", " ".repeat(width), margins(v));
        }
    }
    let failed = verdicts.checks.iter().filter(|v| v.status == crate::run::Status::Fail).count();
    let _ = writeln!(out, "{failed} of {} checks failed", verdicts.checks.len());
    Ok(out)
}
