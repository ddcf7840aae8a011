//! Run configuration: INI-style sections of `key = value` lines.
//!
//! The dialect is TOML restricted to the five tables `[curve]`, `[flow]`,
//! `[stop]`, `[checks]` and `[output]`, so strings are quoted and the
//! parser rejects duplicate keys. Every diagnostic carries the line it
//! refers to.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use csflow_core::zoo::{family, ZooSpec};
use serde::Deserialize;
use toml::Spanned;

/// A configuration error, with the 1-based line it refers to when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveSource {
    Zoo(ZooSpec),
    /// A snapshot file, resampled to `n` samples when `n` is given.
    Snapshot { path: PathBuf, n: Option<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StopConfig {
    pub diameter_min: f64,
    /// Defaults to `10³ / L₀` when absent.
    pub curvature_max: Option<f64>,
    pub max_steps: u64,
}

/// Which per-frame checks run, with their parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ChecksConfig {
    pub convexity: bool,
    pub vertical_tangent: bool,
    /// Gap below which a vertical-tangent event is recorded.
    pub vertical_tangent_threshold: f64,
    pub sturm: bool,
    /// Number of horizontal Sturm directions; the vertical axis is added in
    /// dimension ≥ 3.
    pub sturm_directions: usize,
    /// Number of fixed planes to count intersections with; 0 disables.
    pub planes: usize,
    /// Γ-chain, three-point preservation and the diameter bound.
    pub slopes: bool,
    pub triple_budget: u64,
    pub barrier: bool,
    pub limit_region: bool,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            convexity: true,
            vertical_tangent: true,
            vertical_tangent_threshold: 0.02,
            sturm: true,
            sturm_directions: 16,
            planes: 8,
            slopes: true,
            triple_budget: 200_000,
            barrier: true,
            limit_region: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Frames shown in the panel plot.
    pub plot_frames: usize,
    pub write_frames: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub curve: CurveSource,
    pub safety: f64,
    pub archive_every: u64,
    pub c_floor: f64,
    pub stop: StopConfig,
    pub checks: ChecksConfig,
    pub output: OutputConfig,
    /// Seed of the curve generator, for families that take one.
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    curve: Option<Spanned<BTreeMap<String, Spanned<toml::Value>>>>,
    flow: Option<RawFlow>,
    stop: Option<RawStop>,
    checks: Option<RawChecks>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlow {
    safety: Option<Spanned<f64>>,
    archive_every: Option<Spanned<i64>>,
    c_floor: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStop {
    diameter_min: Option<Spanned<f64>>,
    curvature_max: Option<Spanned<f64>>,
    max_steps: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChecks {
    convexity: Option<bool>,
    vertical_tangent: Option<bool>,
    vertical_tangent_threshold: Option<Spanned<f64>>,
    sturm: Option<bool>,
    sturm_directions: Option<Spanned<i64>>,
    planes: Option<Spanned<i64>>,
    slopes: Option<bool>,
    triple_budget: Option<Spanned<i64>>,
    barrier: Option<bool>,
    limit_region: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    plot_frames: Option<Spanned<i64>>,
    write_frames: Option<bool>,
}

/// Maps byte offsets to 1-based line numbers.
struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn line(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError { line: Some(self.line(span.start)), message: message.into() }
    }
}

fn positive(lines: &Lines, key: &str, v: &Spanned<f64>) -> Result<f64, ConfigError> {
    let x = *v.get_ref();
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(lines.err(v.span(), format!("{key} must be positive, got {x}")))
    }
}

fn count(lines: &Lines, key: &str, v: &Spanned<i64>, min: i64) -> Result<u64, ConfigError> {
    let x = *v.get_ref();
    if x >= min {
        Ok(x as u64)
    } else {
        Err(lines.err(v.span(), format!("{key} must be an integer ≥ {min}, got {x}")))
    }
}

/// Parses and validates a configuration; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let lines = Lines(text);
    let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| lines.line(s.start)),
        message: e.message().trim().to_string(),
    })?;

    let (curve, seed) = parse_curve(&lines, raw.curve)?;

    let flow = raw.flow.unwrap_or(RawFlow { safety: None, archive_every: None, c_floor: None });
    let safety = match &flow.safety {
        Some(v) if *v.get_ref() > 1.0 => {
            return Err(lines.err(v.span(), format!("safety must lie in (0, 1], got {}", v.get_ref())))
        }
        Some(v) => positive(&lines, "safety", v)?,
        None => 0.4,
    };
    let archive_every = flow.archive_every.as_ref().map(|v| count(&lines, "archive_every", v, 1)).transpose()?;
    let c_floor = flow.c_floor.as_ref().map(|v| positive(&lines, "c_floor", v)).transpose()?;

    let stop = raw.stop.unwrap_or(RawStop { diameter_min: None, curvature_max: None, max_steps: None });
    let stop = StopConfig {
        diameter_min: stop.diameter_min.as_ref().map(|v| positive(&lines, "diameter_min", v)).transpose()?.unwrap_or(0.02),
        curvature_max: stop.curvature_max.as_ref().map(|v| positive(&lines, "curvature_max", v)).transpose()?,
        max_steps: stop.max_steps.as_ref().map(|v| count(&lines, "max_steps", v, 1)).transpose()?.unwrap_or(5_000_000),
    };

    let mut checks = ChecksConfig::default();
    if let Some(c) = raw.checks {
        let flag = |v: Option<bool>, d: bool| v.unwrap_or(d);
        checks.convexity = flag(c.convexity, checks.convexity);
        checks.vertical_tangent = flag(c.vertical_tangent, checks.vertical_tangent);
        checks.sturm = flag(c.sturm, checks.sturm);
        checks.slopes = flag(c.slopes, checks.slopes);
        checks.barrier = flag(c.barrier, checks.barrier);
        checks.limit_region = flag(c.limit_region, checks.limit_region);
        if let Some(v) = &c.vertical_tangent_threshold {
            checks.vertical_tangent_threshold = positive(&lines, "vertical_tangent_threshold", v)?;
        }
        if let Some(v) = &c.sturm_directions {
            checks.sturm_directions = count(&lines, "sturm_directions", v, 1)? as usize;
        }
        if let Some(v) = &c.planes {
            checks.planes = count(&lines, "planes", v, 0)? as usize;
        }
        if let Some(v) = &c.triple_budget {
            checks.triple_budget = count(&lines, "triple_budget", v, 1)?;
        }
    }

    let mut output = OutputConfig { dir: PathBuf::from("out"), plot_frames: 4, write_frames: true };
    if let Some(o) = raw.output {
        if let Some(d) = o.dir {
            output.dir = PathBuf::from(d);
        }
        if let Some(v) = &o.plot_frames {
            output.plot_frames = count(&lines, "plot_frames", v, 1)? as usize;
        }
        output.write_frames = o.write_frames.unwrap_or(true);
    }

    Ok(RunConfig {
        curve,
        safety,
        archive_every: archive_every.unwrap_or(50),
        c_floor: c_floor.unwrap_or(csflow_core::curve::DEFAULT_C_FLOOR),
        stop,
        checks,
        output,
        seed,
    })
}

type RawCurve = Spanned<BTreeMap<String, Spanned<toml::Value>>>;

/// `[curve]` holds `family` or `snapshot`, the sample count `n`, and the
/// family's numeric parameters under their catalogue names.
fn parse_curve(lines: &Lines, raw: Option<RawCurve>) -> Result<(CurveSource, u64), ConfigError> {
    let Some(raw) = raw else {
        return Err(ConfigError { line: None, message: "missing [curve] section".into() });
    };
    let section = raw.span();
    let mut table = raw.into_inner();
    let string = |v: Spanned<toml::Value>, key: &str| match v.get_ref() {
        toml::Value::String(s) => Ok(s.clone()),
        _ => Err(lines.err(v.span(), format!("{key} must be a quoted string"))),
    };
    let integer = |v: &Spanned<toml::Value>, key: &str, min: i64| match v.get_ref() {
        toml::Value::Integer(i) if *i >= min => Ok(*i as u64),
        _ => Err(lines.err(v.span(), format!("{key} must be an integer ≥ {min}"))),
    };
    let family_name = table.remove("family").map(|v| string(v, "family")).transpose()?;
    let snapshot = table.remove("snapshot").map(|v| string(v, "snapshot")).transpose()?;
    let n = table.remove("n").map(|v| integer(&v, "n", 8)).transpose()?.map(|n| n as usize);

    match (family_name, snapshot) {
        (Some(_), Some(_)) => Err(lines.err(section, "[curve] takes either family or snapshot, not both")),
        (None, None) => Err(lines.err(section, "[curve] needs family or snapshot")),
        (None, Some(path)) => {
            if let Some((key, v)) = table.into_iter().next() {
                return Err(lines.err(v.span(), format!("unknown key {key:?} for a snapshot curve")));
            }
            Ok((CurveSource::Snapshot { path: PathBuf::from(path), n }, 0))
        }
        (Some(name), None) => {
            let Some(info) = family(&name) else {
                return Err(lines.err(section, format!("unknown curve family {name:?}")));
            };
            let mut spec = ZooSpec::new(&name, n.unwrap_or(512));
            for (key, v) in table {
                if !info.params.iter().any(|p| p.name == key) {
                    return Err(lines.err(v.span(), format!("family {name} has no parameter {key:?}")));
                }
                let x = match v.get_ref() {
                    toml::Value::Float(x) => *x,
                    toml::Value::Integer(i) => *i as f64,
                    _ => return Err(lines.err(v.span(), format!("parameter {key} must be a number"))),
                };
                spec = spec.with(&key, x);
            }
            let seed = spec.params.get("seed").map_or(0, |&s| s as u64);
            Ok((CurveSource::Zoo(spec), seed))
        }
    }
}
