//! One-dimensional parameter sweeps with CSV and SVG output.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::SystemConfig;
use crate::error::{AdmError, Result};
use crate::montecarlo::{empirical_bep, run_trials_with_workers, TrialConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Number of receptors.
    Receptors,
    /// Unbinding-rate ratio between consecutive ligands.
    Similarity,
    /// Number of multiplexed channels.
    Channels,
    /// Bit-1 to bit-0 molecule ratio, scaling `n1` with `n0` fixed.
    Ratio,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Receptors => "receptors",
            Axis::Similarity => "similarity",
            Axis::Channels => "channels",
            Axis::Ratio => "ratio",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Axis::Receptors => "number of receptors N_R",
            Axis::Similarity => "similarity parameter gamma",
            Axis::Channels => "number of channels N_C",
            Axis::Ratio => "N1 / N0",
        }
    }

    fn integral(self) -> bool {
        matches!(self, Axis::Receptors | Axis::Channels)
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &SystemConfig, value: f64) -> Result<SystemConfig> {
        if self.integral() && value.fract() != 0.0 {
            return Err(AdmError::param(self.name(), format!("must be an integer, got {value}")));
        }
        let mut cfg = *base;
        match self {
            Axis::Receptors => cfg.receptors = value as usize,
            Axis::Similarity => cfg.gamma = value,
            Axis::Channels => cfg.channels = value as usize,
            Axis::Ratio => cfg.n1 = value * base.n0,
        }
        Ok(cfg)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = AdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "receptors" => Ok(Axis::Receptors),
            "similarity" => Ok(Axis::Similarity),
            "channels" => Ok(Axis::Channels),
            "ratio" => Ok(Axis::Ratio),
            other => Err(AdmError::Config(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub with_montecarlo: bool,
    pub mc_trials: usize,
    pub mc_seed: u64,
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn new(base: SystemConfig, axis: Axis, values: Vec<f64>) -> Self {
        SweepSpec {
            base,
            axis,
            values,
            with_montecarlo: false,
            mc_trials: 100_000,
            mc_seed: 1,
            workers: None,
        }
    }

    pub fn with_montecarlo(mut self, trials: usize, seed: u64) -> Self {
        self.with_montecarlo = true;
        self.mc_trials = trials;
        self.mc_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(AdmError::param("values", "a sweep needs at least two points"));
        }
        if let Some(v) = self.values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(AdmError::param("values", format!("must be positive, got {v}")));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(AdmError::param("values", "must be strictly ascending"));
        }
        if self.with_montecarlo && self.mc_trials == 0 {
            return Err(AdmError::param("trials", "at least one trial is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloPoint {
    pub mean_bep: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub bep: Vec<f64>,
    pub mean_bep: f64,
    pub montecarlo: Option<MonteCarloPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn mean_beps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean_bep).collect()
    }
}

fn run_point(spec: &SweepSpec, value: f64) -> Result<SweepRow> {
    let cfg = spec.axis.apply(&spec.base, value)?;
    let system = cfg.build()?;
    let report = system.mean_bep(cfg.variance_mode)?;
    let montecarlo = if spec.with_montecarlo {
        let tc = TrialConfig::new(system, spec.mc_trials, spec.mc_seed)?;
        let result = run_trials_with_workers(&tc, cfg.variance_mode, None)?;
        let emp = empirical_bep(&result);
        Some(MonteCarloPoint {
            mean_bep: emp.mean,
            half_width: emp.mean_half_width,
        })
    } else {
        None
    };
    Ok(SweepRow {
        value,
        bep: report.per_channel(),
        mean_bep: report.mean_bep,
        montecarlo,
    })
}

/// Evaluates every axis point. Points run concurrently; rows keep the axis order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let job = || {
        spec.values
            .par_iter()
            .map(|&value| {
                run_point(spec, value).map_err(|e| AdmError::SweepPoint {
                    axis: spec.axis.name(),
                    value,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    let rows = match spec.workers {
        None => job()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| AdmError::InvalidInput(format!("thread pool: {e}")))?
            .install(job)?,
    };
    Ok(SweepResult {
        axis: spec.axis,
        rows,
    })
}

fn csv_columns(result: &SweepResult, default_channels: usize) -> (usize, bool) {
    let channels = result
        .rows
        .iter()
        .map(|r| r.bep.len())
        .max()
        .unwrap_or(default_channels);
    let mc = result.rows.iter().any(|r| r.montecarlo.is_some());
    (channels, mc)
}

/// CSV text: axis value, per-channel BEP, mean BEP and, when simulated, the
/// Monte Carlo mean and its 3-sigma half-width. Numbers carry 10 significant
/// digits; cells for channels a row does not have are left empty.
pub fn to_csv(result: &SweepResult, default_channels: usize) -> String {
    let (channels, mc) = csv_columns(result, default_channels);
    let mut out = String::new();
    out.push_str(result.axis.name());
    for i in 1..=channels {
        let _ = write!(out, ",bep_ch{i}");
    }
    out.push_str(",bep_mean");
    if mc {
        out.push_str(",bep_mc,bep_mc_3sigma");
    }
    out.push('\n');
    for row in &result.rows {
        let _ = write!(out, "{}", row.value);
        for i in 0..channels {
            match row.bep.get(i) {
                Some(p) => {
                    let _ = write!(out, ",{p:.9e}");
                }
                None => out.push(','),
            }
        }
        let _ = write!(out, ",{:.9e}", row.mean_bep);
        if mc {
            match &row.montecarlo {
                Some(m) => {
                    let _ = write!(out, ",{:.9e},{:.9e}", m.mean_bep, m.half_width);
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(result: &SweepResult, default_channels: usize, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_csv(result, default_channels))?;
    Ok(())
}

/// Parses CSV text written by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let bad = |msg: String| AdmError::InvalidInput(format!("sweep csv: {msg}"));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty".into()))?.split(',').collect();
    let axis: Axis = header[0].parse()?;
    let channels = header.iter().filter(|h| h.starts_with("bep_ch")).count();
    let mc = header.contains(&"bep_mc");
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| bad(format!("bad number `{s}`"))) };
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(bad(format!("expected {} cells, got {}", header.len(), cells.len())));
        }
        let bep = cells[1..=channels]
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| num(c))
            .collect::<Result<Vec<_>>>()?;
        let montecarlo = if mc && !cells[channels + 2].is_empty() {
            Some(MonteCarloPoint {
                mean_bep: num(cells[channels + 2])?,
                half_width: num(cells[channels + 3])?,
            })
        } else {
            None
        };
        rows.push(SweepRow {
            value: num(cells[0])?,
            bep,
            mean_bep: num(cells[channels + 1])?,
            montecarlo,
        });
    }
    Ok(SweepResult { axis, rows })
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

fn log_range(result: &SweepResult) -> (i32, i32) {
    let mut values: Vec<f64> = result.rows.iter().map(|r| r.mean_bep).collect();
    for m in result.rows.iter().filter_map(|r| r.montecarlo) {
        values.push(m.mean_bep);
        values.push(m.mean_bep + m.half_width);
        values.push(m.mean_bep - m.half_width);
    }
    let logs: Vec<f64> = values.iter().filter(|&&v| v > 0.0).map(|v| v.log10()).collect();
    if logs.is_empty() {
        return (-12, 0);
    }
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor() as i32;
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil() as i32;
    (lo, hi.max(lo + 1))
}

/// SVG 1.1 plot of mean BEP against the axis with a log-scale BEP axis.
pub fn to_svg(result: &SweepResult) -> String {
    let (lo, hi) = log_range(result);
    let xs: Vec<f64> = result.rows.iter().map(|r| r.value).collect();
    let xmin = xs.first().copied().unwrap_or(0.0);
    let xmax = xs.last().copied().unwrap_or(1.0);
    let span = if xmax > xmin { xmax - xmin } else { 1.0 };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - xmin) / span * pw;
    let py = |p: f64| {
        let l = if p > 0.0 { p.log10().max(lo as f64) } else { lo as f64 };
        TOP + (hi as f64 - l) / (hi - lo) as f64 * ph
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for d in lo..=hi {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line class="ytick" x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text class="ytick-label" x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for &x in &xs {
        let _ = writeln!(
            s,
            r#"<text class="xtick-label" x="{:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            px(x),
            TOP + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        result.axis.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">mean BEP</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let points: Vec<String> = result
        .rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", px(r.value), py(r.mean_bep)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline class="analytical" points="{}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##,
        points.join(" ")
    );
    for r in &result.rows {
        if let Some(m) = r.montecarlo {
            let x = px(r.value);
            let _ = writeln!(
                s,
                r##"<line class="mc-errorbar" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#c0392b"/>"##,
                py(m.mean_bep + m.half_width),
                py(m.mean_bep - m.half_width)
            );
            let _ = writeln!(
                s,
                r##"<circle class="mc" cx="{x:.2}" cy="{:.2}" r="3.5" fill="#c0392b"/>"##,
                py(m.mean_bep)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_plot(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_svg(result))?;
    Ok(())
}
