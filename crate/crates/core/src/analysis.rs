//! Averaging over target states, catalog adjudication, and perfect-RSP searches.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogKey};
use crate::channels::{check_rate, NoiseConfig};
use crate::error::{Error, Result};
use crate::protocol::{AliceConvention, PreparedChannel, PreparedTarget, ProtocolParams, TargetState};

pub const DEFAULT_COMPARE_TOL: f64 = 1e-8;
pub const DEFAULT_PERFECT_TOL: f64 = 1e-10;
/// Agreement threshold between the formula and simulation back-substitutions.
pub const AGREEMENT_TOL: f64 = 1e-8;
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;
/// Number of φ samples used when maximizing over Bob's angle.
pub const PHI_SCAN_POINTS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_u: usize,
    pub n_delta: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { n_u: 16, n_delta: 32 }
    }
}

impl QuadratureSpec {
    pub fn new(n_u: usize, n_delta: usize) -> Result<Self> {
        let spec = Self { n_u, n_delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_u < 8 {
            return Err(Error::InvalidQuadrature(format!("n_u = {} is below 8", self.n_u)));
        }
        if self.n_delta < 16 {
            return Err(Error::InvalidQuadrature(format!("n_delta = {} is below 16", self.n_delta)));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_u: 2 * self.n_u,
            n_delta: 2 * self.n_delta,
        }
    }
}

/// Tensor-product rule over (u, δ) with weights normalized to sum to 1.
#[derive(Clone, Debug)]
pub struct Averager {
    nodes: Vec<(PreparedTarget, f64)>,
}

impl Averager {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        Self::with_convention(spec, AliceConvention::default())
    }

    pub fn with_convention(spec: QuadratureSpec, convention: AliceConvention) -> Result<Self> {
        spec.validate()?;
        let rule = GaussLegendre::new(NonZeroUsize::new(spec.n_u).expect("validated"));
        let mut nodes = Vec::with_capacity(spec.n_u * spec.n_delta);
        for &(x, w) in rule.as_node_weight_pairs() {
            // [-1, 1] → [0, 1]; the interval length 1 cancels the ½ Jacobian
            // against the weights' sum of 2.
            let u = 0.5 * (x + 1.0);
            let wu = 0.5 * w;
            for k in 0..spec.n_delta {
                let delta = TAU * k as f64 / spec.n_delta as f64;
                let target = TargetState::new(u, delta)?;
                nodes.push((PreparedTarget::new(target, convention)?, wu / spec.n_delta as f64));
            }
        }
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn average(&self, channel: &PreparedChannel, phi: f64) -> Result<f64> {
        let branches = channel.measure_bob(phi)?;
        let mut total = 0.0;
        for (target, w) in &self.nodes {
            total += w * branches.run_prepared(target)?.fbar;
        }
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEstimate {
    pub value: f64,
    /// |value − value with doubled node counts|.
    pub convergence: f64,
}

pub fn average_efficiency(p: &ProtocolParams, cfg: &NoiseConfig, q: &QuadratureSpec) -> Result<f64> {
    let channel = PreparedChannel::prepare(p.theta(), cfg)?;
    Averager::new(*q)?.average(&channel, p.phi())
}

pub fn average_efficiency_sim(p: &ProtocolParams, cfg: &NoiseConfig, q: &QuadratureSpec) -> Result<EfficiencyEstimate> {
    let channel = PreparedChannel::prepare(p.theta(), cfg)?;
    let value = Averager::new(*q)?.average(&channel, p.phi())?;
    let fine = Averager::new(q.doubled())?.average(&channel, p.phi())?;
    Ok(EfficiencyEstimate {
        value,
        convergence: (value - fine).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Erratum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyComparison {
    pub key: CatalogKey,
    pub anchor: bool,
    pub alias: bool,
    pub grid_size: usize,
    pub max_abs_diff: f64,
    pub argmax: GridPoint,
    /// Largest deviation with every rate set to zero, over the angle grid.
    pub zero_rate_max_abs_diff: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub quadrature: QuadratureSpec,
    pub rate_grid: Vec<f64>,
    pub angle_grid: Vec<f64>,
    pub records: Vec<KeyComparison>,
}

impl ComparisonReport {
    pub fn record(&self, key: &CatalogKey) -> Option<&KeyComparison> {
        self.records.iter().find(|r| r.key == *key)
    }

    pub fn anchors_match(&self) -> bool {
        self.records.iter().filter(|r| r.anchor).all(|r| r.verdict == Verdict::Match)
    }

    pub fn errata(&self) -> impl Iterator<Item = &KeyComparison> {
        self.records.iter().filter(|r| r.verdict == Verdict::Erratum)
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSweep(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotFinite("grid value"));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidSweep(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Every combination of `grid` over the key's rate axes, as `(p1, p2, p3)`.
pub fn rate_points(key: &CatalogKey, grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let axes = key.rate_axes();
    let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in &axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                grid.iter().map(move |&v| {
                    let mut next = c.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    combos.iter().map(|c| key.rates_from_axes(c)).collect()
}

struct Task {
    key_idx: usize,
    rates: (f64, f64, f64),
    theta: f64,
}

/// Per-(key, rates, θ) block of |sim − formula| over the φ grid, in grid order.
fn evaluate_block(key: &CatalogKey, task: &Task, phis: &[f64], averager: &Averager) -> Result<Vec<(GridPoint, f64)>> {
    let (p1, p2, p3) = task.rates;
    let channel = PreparedChannel::prepare(task.theta, &key.noise_config(p1, p2, p3)?)?;
    phis.iter()
        .map(|&phi| {
            let sim = averager.average(&channel, phi)?;
            let formula = catalog::efficiency_formula(key, p1, p2, p3, task.theta, phi)?;
            let point = GridPoint {
                p1,
                p2,
                p3,
                theta: task.theta,
                phi,
            };
            Ok((point, (sim - formula).abs()))
        })
        .collect()
}

fn max_by_first(items: impl IntoIterator<Item = (GridPoint, f64)>) -> Option<(GridPoint, f64)> {
    // First maximum wins, keeping the argmax independent of scheduling.
    items.into_iter().fold(None, |best, (pt, d)| match best {
        Some((_, bd)) if bd >= d => best,
        _ => Some((pt, d)),
    })
}

pub fn compare_catalog(keys: &[CatalogKey], rate_grid: &[f64], angle_grid: &[f64], tol: f64) -> Result<ComparisonReport> {
    compare_catalog_with(keys, rate_grid, angle_grid, tol, QuadratureSpec::default())
}

pub fn compare_catalog_with(
    keys: &[CatalogKey],
    rate_grid: &[f64],
    angle_grid: &[f64],
    tol: f64,
    quadrature: QuadratureSpec,
) -> Result<ComparisonReport> {
    check_tol(tol)?;
    check_grid("rate", rate_grid)?;
    check_grid("angle", angle_grid)?;
    for &p in rate_grid {
        check_rate(p)?;
    }
    for &a in angle_grid {
        ProtocolParams::new(a, a)?;
    }
    let mut keys = keys.to_vec();
    keys.sort();
    keys.dedup();
    if let Some(bad) = keys.iter().find(|k| !k.is_supported()) {
        return Err(Error::UnsupportedKey(bad.to_string()));
    }
    let averager = Averager::new(quadrature)?;

    let mut tasks = Vec::new();
    let mut zero_tasks = Vec::new();
    for (key_idx, key) in keys.iter().enumerate() {
        for rates in rate_points(key, rate_grid)? {
            for &theta in angle_grid {
                tasks.push(Task { key_idx, rates, theta });
            }
        }
        for &theta in angle_grid {
            zero_tasks.push(Task {
                key_idx,
                rates: (0.0, 0.0, 0.0),
                theta,
            });
        }
    }

    let run = |tasks: &[Task]| -> Result<Vec<Vec<(GridPoint, f64)>>> {
        tasks
            .par_iter()
            .map(|t| evaluate_block(&keys[t.key_idx], t, angle_grid, &averager))
            .collect()
    };
    let blocks = run(&tasks)?;
    let zero_blocks = run(&zero_tasks)?;

    let mut per_key: Vec<Vec<(GridPoint, f64)>> = vec![Vec::new(); keys.len()];
    for (task, block) in tasks.iter().zip(blocks) {
        per_key[task.key_idx].extend(block);
    }
    let mut zero_per_key = vec![0.0f64; keys.len()];
    for (task, block) in zero_tasks.iter().zip(zero_blocks) {
        for (_, d) in block {
            zero_per_key[task.key_idx] = zero_per_key[task.key_idx].max(d);
        }
    }

    let records = keys
        .iter()
        .zip(per_key)
        .zip(zero_per_key)
        .map(|((key, diffs), zero_diff)| {
            let grid_size = diffs.len();
            let (argmax, max_abs_diff) = max_by_first(diffs).expect("grids are non-empty");
            KeyComparison {
                key: *key,
                anchor: key.is_anchor(),
                alias: key.is_alias(),
                grid_size,
                max_abs_diff,
                argmax,
                zero_rate_max_abs_diff: zero_diff,
                verdict: if max_abs_diff <= tol { Verdict::Match } else { Verdict::Erratum },
            }
        })
        .collect();

    Ok(ComparisonReport {
        tolerance: tol,
        quadrature,
        rate_grid: rate_grid.to_vec(),
        angle_grid: angle_grid.to_vec(),
        records,
    })
}

/// One evaluation of a closed-form perfect-RSP condition, back-substituted
/// into both the matching efficiency formula and the simulation at φ = π/4.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectSolution {
    pub p1: f64,
    pub theta: f64,
    /// `None` when the expression has no real value (negative radicand).
    pub p3_formula: Option<f64>,
    pub p3_feasible: bool,
    pub efficiency_check_formula: Option<f64>,
    pub efficiency_check_sim: Option<f64>,
    pub formula_perfect: bool,
    pub sim_perfect: bool,
    /// Both checks reach the same perfect / not-perfect verdict at
    /// [`AGREEMENT_TOL`]; vacuously true when there is nothing to check.
    pub channels_agree: bool,
    pub checks_abs_diff: Option<f64>,
}

fn back_substitute(key: &CatalogKey, p1: f64, theta: f64, p3: Option<f64>) -> Result<PerfectSolution> {
    let p3_feasible = p3.is_some_and(|v| (0.0..=1.0).contains(&v));
    let (formula, sim) = match p3.filter(|_| p3_feasible) {
        Some(p3) => {
            let f = catalog::efficiency_formula(key, p1, 0.0, p3, theta, FRAC_PI_4)?;
            let params = ProtocolParams::new(theta, FRAC_PI_4)?;
            let s = average_efficiency(&params, &key.noise_config(p1, 0.0, p3)?, &QuadratureSpec::default())?;
            (Some(f), Some(s))
        }
        None => (None, None),
    };
    let perfect = |v: Option<f64>| v.is_some_and(|v| (v - 1.0).abs() <= AGREEMENT_TOL);
    Ok(PerfectSolution {
        p1,
        theta,
        p3_formula: p3,
        p3_feasible,
        efficiency_check_formula: formula,
        efficiency_check_sim: sim,
        formula_perfect: perfect(formula),
        sim_perfect: perfect(sim),
        channels_agree: perfect(formula) == perfect(sim),
        checks_abs_diff: formula.zip(sim).map(|(f, s)| (f - s).abs()),
    })
}

fn check_theta_open(theta: f64) -> Result<f64> {
    let params = ProtocolParams::new(theta, FRAC_PI_4)?;
    Ok(params.theta())
}

/// The p₃ that should make (BF,∅,AD) perfect.
pub fn p3_perfect_bf_ad(p1: f64, theta: f64) -> Result<PerfectSolution> {
    let p1 = check_rate(p1)?;
    let theta = check_theta_open(theta)?;
    let s2 = theta.sin().powi(2);
    let s4 = s2 * s2;
    let big = (2.0 * theta).sin();
    let big2 = big * big;
    let denom = 2.0 * s2 * (1.0 - 2.0 * p1).powi(2);
    if denom.abs() < 1e-15 {
        return Err(Error::Singular(format!("p1 = {p1}, theta = {theta}")));
    }
    let radicand = 4.0 * s2 + 4.0 * s4 + big2 - 4.0 * s2 * p1 - 16.0 * big2 * p1 - 8.0 * s2 * p1 * p1
        + 16.0 * s4 * p1 * p1;
    let p3 = (radicand >= 0.0).then(|| {
        (2.0 * s2 * p1 - 2.0 * s2 - big2 + 4.0 * s2 * p1 * p1 + big * radicand.sqrt()) / denom
    });
    back_substitute(&bf_ad(), p1, theta, p3)
}

/// The p₃ that should make (AD,∅,BF) perfect.
pub fn p3_perfect_ad_bf(p1: f64, theta: f64) -> Result<PerfectSolution> {
    let p1 = check_rate(p1)?;
    let theta = check_theta_open(theta)?;
    let s2 = theta.sin().powi(2);
    let p3 = (2.0 - s2 + 2.0 * p1 - 2.0 * (2.0 * theta).sin() * (1.0 - p1).sqrt()) / (s2 - 2.0 - p1);
    back_substitute(&ad_bf(), p1, theta, Some(p3))
}

fn bf_ad() -> CatalogKey {
    "bf,none,ad".parse().expect("static key")
}

fn ad_bf() -> CatalogKey {
    "ad,none,bf".parse().expect("static key")
}

/// A grid sample whose efficiency reaches 1 by at least one method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanHit {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub theta: f64,
    /// φ = π/4 when that already reaches 1, else the best φ on the scan grid.
    pub phi: f64,
    pub formula: Option<f64>,
    pub sim: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerfectScan {
    /// Both the formula and the simulation reach 1.
    pub confirmed: Vec<ScanHit>,
    /// The formula reaches 1 but the simulation does not.
    pub catalog_only: Vec<ScanHit>,
    /// The simulation reaches 1 but the formula does not (or has none).
    pub sim_only: Vec<ScanHit>,
    pub samples: usize,
}

/// The 50-point φ grid over `[0, π/2]` plus π/4 itself, which the grid skips.
pub fn phi_scan_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..PHI_SCAN_POINTS)
        .map(|i| FRAC_PI_2 * i as f64 / (PHI_SCAN_POINTS - 1) as f64)
        .collect();
    grid.push(FRAC_PI_4);
    grid.sort_by(f64::total_cmp);
    grid
}

pub fn scan_perfect_region(
    key: &CatalogKey,
    rate_grid: &[f64],
    theta_grid: &[f64],
    tol: f64,
    allow_sim_only: bool,
) -> Result<PerfectScan> {
    check_tol(tol)?;
    check_grid("rate", rate_grid)?;
    check_grid("theta", theta_grid)?;
    let has_formula = key.is_supported();
    if !has_formula && !allow_sim_only {
        return Err(Error::UnsupportedKey(format!("{key} (pass the simulation-only flag to scan it anyway)")));
    }
    let averager = Averager::new(QuadratureSpec::default())?;
    let phis = phi_scan_grid();
    let rates: Vec<(f64, f64, f64)> = if has_formula {
        rate_points(key, rate_grid)?
    } else {
        // Without a formula the shared-rate rule does not apply; vary each noisy slot.
        let mut out = Vec::new();
        let pick = |k: crate::channels::NoiseKind| if k == crate::channels::NoiseKind::None { vec![0.0] } else { rate_grid.to_vec() };
        for &a in &pick(key.k1) {
            for &b in &pick(key.k2) {
                for &c in &pick(key.k3) {
                    out.push((a, b, c));
                }
            }
        }
        out
    };
    let mut samples = Vec::new();
    for &r in &rates {
        for &theta in theta_grid {
            samples.push((r, theta));
        }
    }

    let evaluated: Vec<(Option<ScanHit>, Option<ScanHit>)> = samples
        .par_iter()
        .map(|&((p1, p2, p3), theta)| -> Result<_> {
            let channel = PreparedChannel::prepare(theta, &key.noise_config(p1, p2, p3)?)?;
            let mut best_sim: Option<(f64, f64, Option<f64>)> = None;
            let mut best_formula: Option<(f64, f64, f64)> = None;
            // π/4 first so that ties keep the optimal angle.
            let ordered = std::iter::once(FRAC_PI_4).chain(phis.iter().copied().filter(|&p| p != FRAC_PI_4));
            for phi in ordered {
                let sim = averager.average(&channel, phi)?;
                let formula = if has_formula {
                    Some(catalog::efficiency_formula(key, p1, p2, p3, theta, phi)?)
                } else {
                    None
                };
                if best_sim.is_none_or(|(_, v, _)| sim > v + 1e-15) {
                    best_sim = Some((phi, sim, formula));
                }
                if let Some(f) = formula {
                    if best_formula.is_none_or(|(_, v, _)| f > v + 1e-15) {
                        best_formula = Some((phi, f, sim));
                    }
                }
            }
            let hit = |phi, formula, sim| ScanHit {
                p1,
                p2,
                p3,
                theta,
                phi,
                formula,
                sim,
            };
            let (sphi, sval, sform) = best_sim.expect("φ grid is non-empty");
            let sim_hit = ((sval - 1.0).abs() <= tol).then(|| hit(sphi, sform, sval));
            let formula_hit = best_formula
                .filter(|(_, f, _)| (f - 1.0).abs() <= tol)
                .map(|(phi, f, s)| hit(phi, Some(f), s));
            Ok((sim_hit, formula_hit))
        })
        .collect::<Result<_>>()?;

    let mut scan = PerfectScan {
        samples: samples.len(),
        ..Default::default()
    };
    for (sim_hit, formula_hit) in evaluated {
        match (sim_hit, formula_hit) {
            (Some(s), Some(_)) => scan.confirmed.push(s),
            (Some(s), None) => scan.sim_only.push(s),
            (None, Some(f)) => scan.catalog_only.push(f),
            (None, None) => {}
        }
    }
    Ok(scan)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Formula,
    Sim,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub formula: f64,
    pub sim: f64,
}

/// Where a slice of the efficiency surface crosses 2/3 along its first rate axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub source: Source,
    /// Value of the second rate axis that labels the slice, if any.
    pub slice: Option<f64>,
    pub at: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimit {
    pub key: CatalogKey,
    /// Samples where the formula or the simulation exceeds 2/3.
    pub above: Vec<LimitSample>,
    pub crossings: Vec<Crossing>,
}

impl ClassicalLimit {
    /// Largest first-axis crossing found by `source`, across all slices.
    pub fn threshold(&self, source: Source) -> Option<f64> {
        self.crossings
            .iter()
            .filter(|c| c.source == source)
            .map(|c| c.at)
            .max_by(f64::total_cmp)
    }
}

/// Efficiency at θ = φ = π/4 over the key's rate grid, with 2/3 crossings
/// interpolated linearly along the first rate axis.
pub fn classical_limit_region(key: &CatalogKey, rate_grid: &[f64]) -> Result<ClassicalLimit> {
    check_grid("rate", rate_grid)?;
    if !key.is_supported() {
        return Err(Error::UnsupportedKey(key.to_string()));
    }
    let mut grid = rate_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let axes = key.rate_axes();
    let averager = Averager::new(QuadratureSpec::default())?;
    let params = ProtocolParams::new(FRAC_PI_4, FRAC_PI_4)?;

    let points = rate_points(key, &grid)?;
    let samples: Vec<LimitSample> = points
        .par_iter()
        .map(|&(p1, p2, p3)| -> Result<LimitSample> {
            let channel = PreparedChannel::prepare(params.theta(), &key.noise_config(p1, p2, p3)?)?;
            Ok(LimitSample {
                p1,
                p2,
                p3,
                formula: catalog::efficiency_formula(key, p1, p2, p3, params.theta(), params.phi())?,
                sim: averager.average(&channel, params.phi())?,
            })
        })
        .collect::<Result<_>>()?;

    let mut crossings = Vec::new();
    if !axes.is_empty() {
        // rate_points varies the last axis fastest, so slice s holds
        // samples[s + k * stride] for k over the first axis.
        let stride = if axes.len() == 2 { grid.len() } else { 1 };
        let slices = if axes.len() == 2 { grid.len() } else { 1 };
        for s in 0..slices {
            let line: Vec<&LimitSample> = (0..grid.len()).map(|k| &samples[s + k * stride]).collect();
            let slice = (axes.len() == 2).then(|| grid[s]);
            for source in [Source::Formula, Source::Sim] {
                let value = |x: &LimitSample| match source {
                    Source::Formula => x.formula,
                    Source::Sim => x.sim,
                };
                for k in 1..line.len() {
                    let (a, b) = (value(line[k - 1]) - CLASSICAL_LIMIT, value(line[k]) - CLASSICAL_LIMIT);
                    if (a > 0.0) != (b > 0.0) {
                        let t = a / (a - b);
                        let at = grid[k - 1] + t * (grid[k] - grid[k - 1]);
                        crossings.push(Crossing { source, slice, at });
                    }
                }
            }
        }
    }

    let above = samples
        .into_iter()
        .filter(|s| s.formula > CLASSICAL_LIMIT || s.sim > CLASSICAL_LIMIT)
        .collect();
    Ok(ClassicalLimit {
        key: *key,
        above,
        crossings,
    })
}
