//! Command-line front end: channel dumps, catalog verification, sweeps and
//! perfect-RSP scans, all written as CSV or JSON files.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    self, Averager, ComparisonReport, PerfectScan, PerfectSolution, QuadratureSpec, DEFAULT_COMPARE_TOL,
    DEFAULT_PERFECT_TOL,
};
use crate::catalog::{self, CatalogKey, RateAxis};
use crate::channels::{self, NoiseConfig, NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::protocol::PreparedChannel;
use crate::qlin::C64;

pub const SWEEP_HEADER: [&str; 5] = ["axis1", "axis2", "efficiency_formula", "efficiency_sim", "abs_diff"];

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn fmt_sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig12).unwrap_or_default()
}

fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        fmt_sig12(z.re)
    } else if z.re == 0.0 {
        format!("{}i", fmt_sig12(z.im))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{}{}i", fmt_sig12(z.re), sign, fmt_sig12(z.im.abs()))
    }
}

// ---------------------------------------------------------------------------
// Grid ranges

/// `min:max:steps`, evenly spaced and inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl RangeSpec {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let r = Self { min, max, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::NotFinite("range bound"));
        }
        if self.steps < 2 {
            return Err(Error::InvalidSweep(format!("steps must be at least 2, got {}", self.steps)));
        }
        if self.max < self.min {
            return Err(Error::InvalidSweep(format!("range {}..{} is reversed", self.min, self.max)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n
                }
            })
            .collect()
    }
}

impl FromStr for RangeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected min:max:steps, got {s:?}")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")));
        let steps = parts[2]
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("{:?}: {e}", parts[2])))?;
        Self::new(num(parts[0])?, num(parts[1])?, steps)
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    P1,
    P2,
    P3,
    P,
    Theta,
    Phi,
}

impl AxisName {
    pub fn label(self) -> &'static str {
        match self {
            AxisName::P1 => "p1",
            AxisName::P2 => "p2",
            AxisName::P3 => "p3",
            AxisName::P => "p",
            AxisName::Theta => "theta",
            AxisName::Phi => "phi",
        }
    }

    fn rate_axis(self) -> Option<RateAxis> {
        match self {
            AxisName::P1 => Some(RateAxis::P1),
            AxisName::P2 => Some(RateAxis::P2),
            AxisName::P3 => Some(RateAxis::P3),
            AxisName::P => Some(RateAxis::P),
            AxisName::Theta | AxisName::Phi => None,
        }
    }
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" => Ok(AxisName::P1),
            "p2" => Ok(AxisName::P2),
            "p3" => Ok(AxisName::P3),
            "p" => Ok(AxisName::P),
            "theta" | "θ" => Ok(AxisName::Theta),
            "phi" | "φ" => Ok(AxisName::Phi),
            other => Err(Error::Parse(format!("unknown axis {other:?}"))),
        }
    }
}

/// `name:min:max:steps`, e.g. `p1:0:1:11` or `theta:0:1.5707963267948966:21`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: AxisName,
    #[serde(flatten)]
    pub range: RangeSpec,
}

impl FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected name:min:max:steps, got {s:?}")))?;
        Ok(Self {
            name: name.parse()?,
            range: range.parse()?,
        })
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name.label(), self.range)
    }
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

fn default_angle() -> f64 {
    FRAC_PI_4
}

/// A one- or two-axis sweep. Exactly one of `keys` (formula plus simulation)
/// or `noise` (simulation only) must be given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub keys: Vec<CatalogKey>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    pub axes: Vec<AxisSpec>,
    #[serde(default = "default_angle")]
    pub theta: f64,
    #[serde(default = "default_angle")]
    pub phi: f64,
    /// Rates held fixed when not swept.
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub p3: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    /// Label used to name per-key output files.
    #[serde(default)]
    pub name: Option<String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.keys.is_empty(), &self.noise) {
            (true, None) => return Err(Error::InvalidSweep("give either keys or a noise configuration".into())),
            (false, Some(_)) => return Err(Error::InvalidSweep("keys and noise are mutually exclusive".into())),
            _ => {}
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!("need 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::InvalidSweep("axes must differ".into()));
        }
        self.quadrature.validate()?;
        for a in &self.axes {
            a.range.validate()?;
            let bounds_ok = match a.name {
                AxisName::Theta | AxisName::Phi => a.range.min >= 0.0 && a.range.max <= FRAC_PI_2 + 1e-12,
                _ => a.range.min >= 0.0 && a.range.max <= 1.0,
            };
            if !bounds_ok {
                return Err(Error::InvalidSweep(format!("axis {a} leaves its domain")));
            }
        }
        crate::protocol::ProtocolParams::new(self.theta, self.phi)?;
        for p in [self.p1, self.p2, self.p3] {
            channels::check_rate(p)?;
        }
        for key in &self.keys {
            if !key.is_supported() {
                return Err(Error::UnsupportedKey(format!("{key}; use a noise configuration to simulate it")));
            }
            let allowed = key.rate_axes();
            for a in &self.axes {
                if let Some(r) = a.name.rate_axis() {
                    if !allowed.contains(&r) {
                        return Err(Error::InvalidSweep(format!(
                            "axis {} does not apply to key {key} (rates: {})",
                            a.name.label(),
                            allowed.iter().map(|r| r.label()).collect::<Vec<_>>().join(",")
                        )));
                    }
                }
            }
        }
        if let Some(noise) = &self.noise {
            let kinds = noise.specs().map(|s| s.kind());
            for a in &self.axes {
                let slots: &[usize] = match a.name {
                    AxisName::P1 => &[0],
                    AxisName::P2 => &[1],
                    AxisName::P3 => &[2],
                    AxisName::P => &[0, 1],
                    _ => &[],
                };
                if slots.iter().any(|&i| kinds[i] == NoiseKind::None) {
                    return Err(Error::InvalidSweep(format!("axis {} sweeps a noiseless qubit", a.name.label())));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub efficiency_formula: Option<f64>,
    pub efficiency_sim: f64,
    pub abs_diff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    /// Key label, or the noise configuration for simulation-only sweeps.
    pub label: String,
    pub key: Option<CatalogKey>,
    pub axes: Vec<AxisSpec>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(SWEEP_HEADER)?;
        for r in &self.rows {
            w.write_record([
                fmt_sig12(r.axis1),
                fmt_opt(r.axis2),
                fmt_opt(r.efficiency_formula),
                fmt_sig12(r.efficiency_sim),
                fmt_opt(r.abs_diff),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }
}

enum SweepTarget {
    Key(CatalogKey),
    Noise(NoiseConfig),
}

struct SweepPoint {
    p: [f64; 3],
    theta: f64,
    phi: f64,
}

fn sweep_point(cfg: &SweepConfig, target: &SweepTarget, coords: &[f64]) -> SweepPoint {
    let mut p = match target {
        SweepTarget::Key(_) => [cfg.p1, cfg.p2, cfg.p3],
        SweepTarget::Noise(n) => n.specs().map(|s| s.rate()),
    };
    if let SweepTarget::Key(k) = target {
        if k.is_shared_rate() {
            p[1] = p[0];
        }
    }
    let (mut theta, mut phi) = (cfg.theta, cfg.phi);
    for (axis, &v) in cfg.axes.iter().zip(coords) {
        match axis.name {
            AxisName::P1 => p[0] = v,
            AxisName::P2 => p[1] = v,
            AxisName::P3 => p[2] = v,
            AxisName::P => {
                p[0] = v;
                p[1] = v;
            }
            AxisName::Theta => theta = v.min(FRAC_PI_2),
            AxisName::Phi => phi = v.min(FRAC_PI_2),
        }
    }
    SweepPoint { p, theta, phi }
}

fn evaluate_sweep_point(cfg: &SweepConfig, target: &SweepTarget, coords: &[f64], averager: &Averager) -> Result<SweepRow> {
    let SweepPoint { p, theta, phi } = sweep_point(cfg, target, coords);
    let (noise, formula) = match target {
        SweepTarget::Key(k) => (
            k.noise_config(p[0], p[1], p[2])?,
            Some(catalog::efficiency_formula(k, p[0], p[1], p[2], theta, phi)?),
        ),
        SweepTarget::Noise(n) => {
            let [s1, s2, s3] = n.specs();
            (
                NoiseConfig::new(
                    NoiseSpec::new(s1.kind(), p[0])?,
                    NoiseSpec::new(s2.kind(), p[1])?,
                    NoiseSpec::new(s3.kind(), p[2])?,
                ),
                None,
            )
        }
    };
    let channel = PreparedChannel::prepare(theta, &noise)?;
    let sim = averager.average(&channel, phi)?;
    Ok(SweepRow {
        axis1: coords[0],
        axis2: coords.get(1).copied(),
        efficiency_formula: formula,
        efficiency_sim: sim,
        abs_diff: formula.map(|f| (f - sim).abs()),
    })
}

/// Evaluates every grid point of every target; rows sorted by (axis1, axis2).
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepTable>> {
    cfg.validate()?;
    let targets: Vec<SweepTarget> = match &cfg.noise {
        Some(n) => vec![SweepTarget::Noise(*n)],
        None => cfg.keys.iter().map(|k| SweepTarget::Key(*k)).collect(),
    };
    let mut grid: Vec<Vec<f64>> = cfg.axes[0].range.values().into_iter().map(|v| vec![v]).collect();
    if let Some(second) = cfg.axes.get(1) {
        let ys = second.range.values();
        grid = grid
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| vec![x[0], y]))
            .collect();
    }
    let averager = Averager::new(cfg.quadrature)?;
    let jobs: Vec<(usize, &Vec<f64>)> = (0..targets.len()).flat_map(|t| grid.iter().map(move |g| (t, g))).collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(t, coords)| evaluate_sweep_point(cfg, &targets[t], coords, &averager))
        .collect::<Result<_>>()?;

    let mut tables: Vec<SweepTable> = targets
        .iter()
        .map(|t| match t {
            SweepTarget::Key(k) => SweepTable {
                label: k.to_string(),
                key: Some(*k),
                axes: cfg.axes.clone(),
                rows: Vec::new(),
            },
            SweepTarget::Noise(n) => SweepTable {
                label: n.to_string(),
                key: None,
                axes: cfg.axes.clone(),
                rows: Vec::new(),
            },
        })
        .collect();
    for ((t, _), row) in jobs.iter().zip(rows) {
        tables[*t].rows.push(row);
    }
    for table in &mut tables {
        table.rows.sort_by(|a, b| {
            a.axis1
                .total_cmp(&b.axis1)
                .then_with(|| a.axis2.unwrap_or(0.0).total_cmp(&b.axis2.unwrap_or(0.0)))
        });
    }
    Ok(tables)
}

// ---------------------------------------------------------------------------
// Figure presets

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigurePreset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
    Fig14,
}

/// What a preset expands to.
#[derive(Clone, Debug, PartialEq)]
pub enum PresetPlan {
    Sweep(Box<SweepConfig>),
    Perfect(PerfectVariant),
}

pub const PRESET_STEPS: usize = 21;

impl FigurePreset {
    pub fn name(self) -> String {
        format!("{self:?}").to_ascii_lowercase()
    }

    pub fn plan(self) -> PresetPlan {
        use NoiseKind::{AmplitudeDamping as AD, BitFlip as BF, Depolarizing as D, None as N, PhaseFlip as PhF};
        let rate = |name| AxisSpec {
            name,
            range: RangeSpec {
                min: 0.0,
                max: 1.0,
                steps: PRESET_STEPS,
            },
        };
        let theta = AxisSpec {
            name: AxisName::Theta,
            range: RangeSpec {
                min: 0.0,
                max: FRAC_PI_2,
                steps: PRESET_STEPS,
            },
        };
        let ys = |f: &dyn Fn(NoiseKind) -> CatalogKey| NoiseKind::NOISY.iter().map(|&y| f(y)).collect::<Vec<_>>();
        let (keys, axes) = match self {
            FigurePreset::Fig4 => return PresetPlan::Perfect(PerfectVariant::BfAd),
            FigurePreset::Fig6 => return PresetPlan::Perfect(PerfectVariant::AdBf),
            FigurePreset::Fig2 => (ys(&|x| CatalogKey::new(x, N, N)), vec![rate(AxisName::P1), theta]),
            FigurePreset::Fig3 => (ys(&|y| CatalogKey::new(BF, N, y)), vec![rate(AxisName::P1), rate(AxisName::P3)]),
            FigurePreset::Fig5 => (ys(&|y| CatalogKey::new(AD, N, y)), vec![rate(AxisName::P1), rate(AxisName::P3)]),
            FigurePreset::Fig7 => (ys(&|y| CatalogKey::new(PhF, N, y)), vec![rate(AxisName::P1), rate(AxisName::P3)]),
            FigurePreset::Fig8 => (ys(&|y| CatalogKey::new(D, N, y)), vec![rate(AxisName::P1), rate(AxisName::P3)]),
            FigurePreset::Fig9 => (ys(&|y| CatalogKey::new(N, AD, y)), vec![rate(AxisName::P2), rate(AxisName::P3)]),
            FigurePreset::Fig10 => (ys(&|y| CatalogKey::new(N, D, y)), vec![rate(AxisName::P2), rate(AxisName::P3)]),
            FigurePreset::Fig11 => (ys(&|y| CatalogKey::new(BF, BF, y)), vec![rate(AxisName::P), rate(AxisName::P3)]),
            FigurePreset::Fig12 => (ys(&|y| CatalogKey::new(AD, AD, y)), vec![rate(AxisName::P), rate(AxisName::P3)]),
            FigurePreset::Fig13 => (ys(&|y| CatalogKey::new(PhF, PhF, y)), vec![rate(AxisName::P), rate(AxisName::P3)]),
            FigurePreset::Fig14 => (ys(&|y| CatalogKey::new(D, D, y)), vec![rate(AxisName::P), rate(AxisName::P3)]),
        };
        PresetPlan::Sweep(Box::new(SweepConfig {
            keys,
            noise: None,
            axes,
            theta: FRAC_PI_4,
            phi: FRAC_PI_4,
            p1: 0.0,
            p2: 0.0,
            p3: 0.0,
            out: None,
            format: OutputFormat::Csv,
            quadrature: QuadratureSpec::default(),
            name: Some(self.name()),
        }))
    }
}

// ---------------------------------------------------------------------------
// Commands

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Kraus operators of one channel, 12 significant digits per entry, followed
/// by the completeness deviation.
pub fn cmd_channels(kind: NoiseKind, p: f64) -> Result<String> {
    let ks = channels::kraus_set(kind, p)?;
    let deviation = channels::validate_cptp(&ks)?;
    let mut out = String::new();
    writeln!(out, "kind: {kind}").unwrap();
    writeln!(out, "p: {}", fmt_sig12(ks.p)).unwrap();
    for (i, op) in ks.ops.iter().enumerate() {
        writeln!(out, "E{}:", i + 1).unwrap();
        for r in 0..op.dim() {
            let row: Vec<String> = (0..op.dim()).map(|c| fmt_complex(op.get(r, c))).collect();
            writeln!(out, "  [{}]", row.join(", ")).unwrap();
        }
    }
    writeln!(out, "cptp_deviation: {}", fmt_sig12(deviation)).unwrap();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub report: ComparisonReport,
    pub anchors_ok: bool,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
}

pub fn verify_grids(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rates = RangeSpec::new(0.0, 1.0, points)?.values();
    let angles = RangeSpec::new(0.0, FRAC_PI_2, points)?.values();
    Ok((rates, angles))
}

pub fn report_csv(report: &ComparisonReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "key",
        "anchor",
        "alias",
        "grid_size",
        "max_abs_diff",
        "argmax_p1",
        "argmax_p2",
        "argmax_p3",
        "argmax_theta",
        "argmax_phi",
        "zero_rate_max_abs_diff",
        "verdict",
    ])?;
    for r in &report.records {
        let verdict = match r.verdict {
            analysis::Verdict::Match => "match",
            analysis::Verdict::Erratum => "erratum",
        };
        w.write_record([
            r.key.to_string(),
            r.anchor.to_string(),
            r.alias.to_string(),
            r.grid_size.to_string(),
            fmt_sig12(r.max_abs_diff),
            fmt_sig12(r.argmax.p1),
            fmt_sig12(r.argmax.p2),
            fmt_sig12(r.argmax.p3),
            fmt_sig12(r.argmax.theta),
            fmt_sig12(r.argmax.phi),
            fmt_sig12(r.zero_rate_max_abs_diff),
            verdict.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

/// Compares every supported key and writes `report.json` and `report.csv`
/// into `out_dir`.
pub fn cmd_verify(tol: f64, points: usize, out_dir: &Path) -> Result<VerifyOutcome> {
    let (rates, angles) = verify_grids(points)?;
    let report = analysis::compare_catalog(&catalog::supported_keys(), &rates, &angles, tol)?;
    let json_path = out_dir.join("report.json");
    let csv_path = out_dir.join("report.csv");
    write_file(&json_path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    write_file(&csv_path, &report_csv(&report)?)?;
    Ok(VerifyOutcome {
        anchors_ok: report.anchors_match(),
        report,
        json_path,
        csv_path,
    })
}

fn sweep_stem(cfg: &SweepConfig) -> String {
    cfg.name.clone().unwrap_or_else(|| "sweep".into())
}

/// Runs a sweep and writes one file per key. A single table goes to `out`
/// itself; several go into `out` as a directory.
pub fn cmd_sweep(cfg: &SweepConfig) -> Result<Vec<PathBuf>> {
    let tables = run_sweep(cfg)?;
    let ext = cfg.format.extension();
    let stem = sweep_stem(cfg);
    let paths: Vec<PathBuf> = if tables.len() == 1 {
        vec![cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("{stem}.{ext}")))]
    } else {
        let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(&stem));
        tables
            .iter()
            .map(|t| dir.join(format!("{stem}_{}.{ext}", t.label.replace([',', ':'], "-"))))
            .collect()
    };
    for (table, path) in tables.iter().zip(&paths) {
        let body = match cfg.format {
            OutputFormat::Csv => table.to_csv()?,
            OutputFormat::Json => serde_json::to_string_pretty(table)? + "\n",
        };
        write_file(path, &body)?;
    }
    Ok(paths)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PerfectVariant {
    BfAd,
    AdBf,
    Scan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointVerdict {
    /// A feasible p₃ whose simulated efficiency is 1.
    Confirmed,
    Refuted,
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectRecord {
    pub p1: f64,
    pub theta: f64,
    pub verdict: PointVerdict,
    pub solution: Option<PerfectSolution>,
    pub singularity: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectSummary {
    pub points: usize,
    pub singular: usize,
    pub feasible: usize,
    pub formula_perfect: usize,
    pub sim_perfect: usize,
    pub confirmed: usize,
    pub refuted: usize,
    /// Formula and simulation checks reach the same verdict at every point.
    pub channels_agree: bool,
    pub max_checks_abs_diff: Option<f64>,
    /// `confirmed`, `partially confirmed` or `refuted` for the whole region.
    pub region: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectOutput {
    pub variant: PerfectVariant,
    pub summary: PerfectSummary,
    pub records: Vec<PerfectRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub variant: PerfectVariant,
    pub key: CatalogKey,
    pub tol: f64,
    pub scan: PerfectScan,
}

pub fn default_perfect_grids(variant: PerfectVariant) -> (RangeSpec, RangeSpec) {
    match variant {
        PerfectVariant::BfAd => (
            RangeSpec { min: 0.51, max: 0.6, steps: 10 },
            RangeSpec { min: 0.05, max: 1.0, steps: 20 },
        ),
        PerfectVariant::AdBf => (
            RangeSpec { min: 0.0, max: 0.15, steps: 16 },
            RangeSpec { min: 0.75, max: 1.08, steps: 12 },
        ),
        PerfectVariant::Scan => (
            RangeSpec { min: 0.0, max: 1.0, steps: 11 },
            RangeSpec { min: 0.0, max: FRAC_PI_2, steps: 21 },
        ),
    }
}

/// Evaluates the closed-form p₃ condition at every (p₁, θ) pair.
pub fn run_perfect(variant: PerfectVariant, p1s: &[f64], thetas: &[f64]) -> Result<PerfectOutput> {
    let solve = match variant {
        PerfectVariant::BfAd => analysis::p3_perfect_bf_ad,
        PerfectVariant::AdBf => analysis::p3_perfect_ad_bf,
        PerfectVariant::Scan => return Err(Error::InvalidSweep("scan has no closed-form condition".into())),
    };
    let pairs: Vec<(f64, f64)> = p1s.iter().flat_map(|&p| thetas.iter().map(move |&t| (p, t))).collect();
    let records: Vec<PerfectRecord> = pairs
        .par_iter()
        .map(|&(p1, theta)| match solve(p1, theta) {
            Ok(sol) => Ok(PerfectRecord {
                p1,
                theta,
                verdict: if sol.p3_feasible && sol.sim_perfect {
                    PointVerdict::Confirmed
                } else {
                    PointVerdict::Refuted
                },
                solution: Some(sol),
                singularity: None,
            }),
            Err(Error::Singular(msg)) => Ok(PerfectRecord {
                p1,
                theta,
                verdict: PointVerdict::Singular,
                solution: None,
                singularity: Some(msg),
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let sols: Vec<&PerfectSolution> = records.iter().filter_map(|r| r.solution.as_ref()).collect();
    let count = |f: &dyn Fn(&PerfectSolution) -> bool| sols.iter().filter(|s| f(s)).count();
    let confirmed = records.iter().filter(|r| r.verdict == PointVerdict::Confirmed).count();
    let refuted = records.iter().filter(|r| r.verdict == PointVerdict::Refuted).count();
    let region = match (confirmed, refuted) {
        (0, _) => "refuted",
        (_, 0) => "confirmed",
        _ => "partially confirmed",
    };
    let summary = PerfectSummary {
        points: records.len(),
        singular: records.len() - sols.len(),
        feasible: count(&|s| s.p3_feasible),
        formula_perfect: count(&|s| s.formula_perfect),
        sim_perfect: count(&|s| s.sim_perfect),
        confirmed,
        refuted,
        channels_agree: sols.iter().all(|s| s.channels_agree),
        max_checks_abs_diff: sols.iter().filter_map(|s| s.checks_abs_diff).max_by(f64::total_cmp),
        region: region.into(),
    };
    Ok(PerfectOutput {
        variant,
        summary,
        records,
    })
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(name = "crsp", version, about = "Controlled remote state preparation under noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a channel's Kraus operators and completeness deviation.
    Channels(ChannelsArgs),
    /// Compare every closed form against simulation; exits nonzero if an anchor disagrees.
    Verify(VerifyArgs),
    /// Evaluate formula and simulation over a 1-D or 2-D grid.
    Sweep(SweepArgs),
    /// Evaluate perfect-RSP conditions or scan for perfect points.
    Perfect(PerfectArgs),
}

#[derive(Debug, Args)]
pub struct ChannelsArgs {
    #[arg(long, value_parser = parse_with::<NoiseKind>)]
    pub kind: NoiseKind,
    #[arg(long)]
    pub p: f64,
    /// Also write the dump to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_COMPARE_TOL)]
    pub tol: f64,
    /// Points per rate and angle axis.
    #[arg(long, default_value_t = 6)]
    pub points: usize,
    /// Directory receiving report.json and report.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub preset: Option<FigurePreset>,
    /// JSON sweep configuration; flags given here override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog key such as `bf,none,ad`; repeatable.
    #[arg(long = "key", value_parser = parse_with::<CatalogKey>)]
    pub keys: Vec<CatalogKey>,
    /// Simulation-only noise such as `bf:0.1,ad:0.2,none`.
    #[arg(long, value_parser = parse_with::<NoiseConfig>)]
    pub noise: Option<NoiseConfig>,
    /// `name:min:max:steps` with name in p1, p2, p3, p, theta, phi; at most two.
    #[arg(long = "axis", value_parser = parse_with::<AxisSpec>)]
    pub axes: Vec<AxisSpec>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub p3: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerfectArgs {
    #[arg(long, value_enum, default_value = "bf-ad")]
    pub variant: PerfectVariant,
    /// A single p₁ value (overrides --p1-grid).
    #[arg(long)]
    pub p1: Option<f64>,
    /// A single θ value (overrides --theta-grid).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_with::<RangeSpec>)]
    pub p1_grid: Option<RangeSpec>,
    #[arg(long, value_parser = parse_with::<RangeSpec>)]
    pub theta_grid: Option<RangeSpec>,
    /// Key to scan (scan variant only).
    #[arg(long, value_parser = parse_with::<CatalogKey>)]
    pub key: Option<CatalogKey>,
    /// Rate grid for the scan variant.
    #[arg(long, value_parser = parse_with::<RangeSpec>)]
    pub rate_grid: Option<RangeSpec>,
    #[arg(long, default_value_t = DEFAULT_PERFECT_TOL)]
    pub tol: f64,
    /// Let the scan variant simulate keys that have no closed form.
    #[arg(long)]
    pub allow_sim_only: bool,
    #[arg(long, default_value = "perfect.json")]
    pub out: PathBuf,
}

fn parse_with<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Merges a preset or config file with command-line overrides.
pub fn resolve_sweep(args: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = match (&args.config, args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<SweepConfig>(&text)?
        }
        (None, Some(preset)) => match preset.plan() {
            PresetPlan::Sweep(cfg) => *cfg,
            PresetPlan::Perfect(v) => {
                return Err(Error::InvalidSweep(format!(
                    "{} plots a perfect-RSP region; run `perfect --variant {}`",
                    preset.name(),
                    v.to_possible_value().expect("no skipped variants").get_name()
                )))
            }
        },
        (None, None) => SweepConfig {
            keys: Vec::new(),
            noise: None,
            axes: Vec::new(),
            theta: FRAC_PI_4,
            phi: FRAC_PI_4,
            p1: 0.0,
            p2: 0.0,
            p3: 0.0,
            out: None,
            format: OutputFormat::Csv,
            quadrature: QuadratureSpec::default(),
            name: None,
        },
    };
    if args.config.is_some() {
        if let Some(preset) = args.preset {
            if let PresetPlan::Sweep(p) = preset.plan() {
                cfg.keys = p.keys;
                cfg.axes = p.axes;
                cfg.name = p.name;
            }
        }
    }
    if !args.keys.is_empty() {
        cfg.keys = args.keys.clone();
        cfg.noise = None;
    }
    if let Some(n) = args.noise {
        cfg.noise = Some(n);
        cfg.keys.clear();
    }
    if !args.axes.is_empty() {
        cfg.axes = args.axes.clone();
    }
    cfg.theta = args.theta.unwrap_or(cfg.theta);
    cfg.phi = args.phi.unwrap_or(cfg.phi);
    cfg.p1 = args.p1.unwrap_or(cfg.p1);
    cfg.p2 = args.p2.unwrap_or(cfg.p2);
    cfg.p3 = args.p3.unwrap_or(cfg.p3);
    cfg.format = args.format.unwrap_or(cfg.format);
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Executes a parsed command, returning the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Channels(a) => {
            let text = cmd_channels(a.kind, a.p)?;
            print!("{text}");
            if let Some(path) = a.out {
                write_file(&path, &text)?;
            }
            Ok(0)
        }
        Command::Verify(a) => {
            let outcome = cmd_verify(a.tol, a.points, &a.out)?;
            let errata: Vec<String> = outcome.report.errata().map(|r| r.key.to_string()).collect();
            println!(
                "{} keys compared, {} errata; report written to {} and {}",
                outcome.report.records.len(),
                errata.len(),
                outcome.json_path.display(),
                outcome.csv_path.display()
            );
            for r in outcome.report.errata() {
                println!(
                    "erratum ({}){}: max |sim - formula| = {} at p1={} p2={} p3={} theta={} phi={}",
                    r.key,
                    if r.anchor { " [anchor]" } else { "" },
                    fmt_sig12(r.max_abs_diff),
                    fmt_sig12(r.argmax.p1),
                    fmt_sig12(r.argmax.p2),
                    fmt_sig12(r.argmax.p3),
                    fmt_sig12(r.argmax.theta),
                    fmt_sig12(r.argmax.phi),
                );
            }
            Ok(if outcome.anchors_ok { 0 } else { 1 })
        }
        Command::Sweep(a) => {
            if let Some(FigurePreset::Fig4 | FigurePreset::Fig6) = a.preset {
                let variant = match a.preset {
                    Some(FigurePreset::Fig4) => PerfectVariant::BfAd,
                    _ => PerfectVariant::AdBf,
                };
                let (p1s, thetas) = default_perfect_grids(variant);
                let out = a.out.unwrap_or_else(|| PathBuf::from(format!("{}.json", a.preset.unwrap().name())));
                let output = run_perfect(variant, &p1s.values(), &thetas.values())?;
                write_file(&out, &(serde_json::to_string_pretty(&output)? + "\n"))?;
                println!("region {}; written to {}", output.summary.region, out.display());
                return Ok(0);
            }
            let cfg = resolve_sweep(&a)?;
            for path in cmd_sweep(&cfg)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
        Command::Perfect(a) => {
            let (default_p1, default_theta) = default_perfect_grids(a.variant);
            let thetas = match a.theta {
                Some(t) => vec![t],
                None => a.theta_grid.unwrap_or(default_theta).values(),
            };
            let body = if a.variant == PerfectVariant::Scan {
                let key = a
                    .key
                    .ok_or_else(|| Error::InvalidSweep("the scan variant needs --key".into()))?;
                let rates = a.rate_grid.unwrap_or(default_p1).values();
                let scan = analysis::scan_perfect_region(&key, &rates, &thetas, a.tol, a.allow_sim_only)?;
                println!(
                    "{} samples: {} confirmed, {} catalog only, {} simulation only",
                    scan.samples,
                    scan.confirmed.len(),
                    scan.catalog_only.len(),
                    scan.sim_only.len()
                );
                serde_json::to_string_pretty(&ScanOutput {
                    variant: a.variant,
                    key,
                    tol: a.tol,
                    scan,
                })?
            } else {
                let p1s = match a.p1 {
                    Some(p) => vec![p],
                    None => a.p1_grid.unwrap_or(default_p1).values(),
                };
                let output = run_perfect(a.variant, &p1s, &thetas)?;
                let s = &output.summary;
                println!(
                    "{} points: {} singular, {} feasible, {} confirmed; region {}",
                    s.points, s.singular, s.feasible, s.confirmed, s.region
                );
                serde_json::to_string_pretty(&output)?
            };
            write_file(&a.out, &(body + "\n"))?;
            Ok(0)
        }
    }
}
