//! Single-qubit noise channels and their action on the three-qubit state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlin::{self, ComplexMatrix, C64};

/// Completeness tolerance for a Kraus set.
pub const CPTP_TOL: f64 = 1e-12;
/// Tolerance applied to trace, Hermiticity and positivity of input density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    #[serde(rename = "bf")]
    BitFlip,
    #[serde(rename = "ad")]
    AmplitudeDamping,
    #[serde(rename = "phf")]
    PhaseFlip,
    #[serde(rename = "d")]
    Depolarizing,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::None,
        NoiseKind::BitFlip,
        NoiseKind::AmplitudeDamping,
        NoiseKind::PhaseFlip,
        NoiseKind::Depolarizing,
    ];

    /// The four non-trivial channels.
    pub const NOISY: [NoiseKind; 4] = [
        NoiseKind::BitFlip,
        NoiseKind::AmplitudeDamping,
        NoiseKind::PhaseFlip,
        NoiseKind::Depolarizing,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::BitFlip => "bf",
            NoiseKind::AmplitudeDamping => "ad",
            NoiseKind::PhaseFlip => "phf",
            NoiseKind::Depolarizing => "d",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "n" | "0" | "-" | "∅" => Ok(NoiseKind::None),
            "bf" | "bit-flip" | "bitflip" => Ok(NoiseKind::BitFlip),
            "ad" | "amplitude-damping" | "amplitudedamping" => Ok(NoiseKind::AmplitudeDamping),
            "phf" | "pf" | "phase-flip" | "phaseflip" => Ok(NoiseKind::PhaseFlip),
            "d" | "dep" | "depolarizing" => Ok(NoiseKind::Depolarizing),
            other => Err(Error::Parse(format!("unknown noise kind {other:?}"))),
        }
    }
}

pub(crate) fn check_rate(p: f64) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::NotFinite("noise rate"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::RateOutOfRange(p));
    }
    Ok(p)
}

/// A channel kind with its rate. `None` always carries rate 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NoiseSpec {
    kind: NoiseKind,
    p: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        let p = check_rate(p)?;
        let p = if kind == NoiseKind::None { 0.0 } else { p };
        Ok(Self { kind, p })
    }

    pub const fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            p: 0.0,
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn rate(&self) -> f64 {
        self.p
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NoiseKind::None => f.write_str("none"),
            kind => write!(f, "{kind}:{}", self.p),
        }
    }
}

/// Parses `kind` or `kind:rate`, e.g. `ad:0.3` or `none`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rate) = match s.split_once(':') {
            Some((k, r)) => {
                let rate = r
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad rate {r:?}: {e}")))?;
                (k.parse::<NoiseKind>()?, rate)
            }
            None => (s.parse::<NoiseKind>()?, 0.0),
        };
        if kind != NoiseKind::None && !s.contains(':') {
            return Err(Error::Parse(format!("noise {s:?} needs a rate, e.g. {kind}:0.1")));
        }
        NoiseSpec::new(kind, rate)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = Error;

            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }

        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
    };
}

string_serde!(NoiseSpec);

/// Per-qubit noise for the three qubits of the channel state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NoiseConfig {
    pub q1: NoiseSpec,
    pub q2: NoiseSpec,
    pub q3: NoiseSpec,
}

impl NoiseConfig {
    pub fn new(q1: NoiseSpec, q2: NoiseSpec, q3: NoiseSpec) -> Self {
        Self { q1, q2, q3 }
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    /// Noise on one qubit only.
    pub fn single(qubit: usize, spec: NoiseSpec) -> Result<Self> {
        let mut cfg = Self::noiseless();
        match qubit {
            1 => cfg.q1 = spec,
            2 => cfg.q2 = spec,
            3 => cfg.q3 = spec,
            other => return Err(Error::InvalidQubit(other)),
        }
        Ok(cfg)
    }

    pub fn specs(&self) -> [NoiseSpec; 3] {
        [self.q1, self.q2, self.q3]
    }

    pub fn is_noiseless(&self) -> bool {
        self.specs().iter().all(|s| s.kind == NoiseKind::None || s.p == 0.0)
    }
}

impl fmt::Display for NoiseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.q1, self.q2, self.q3)
    }
}

/// Parses three comma-separated [`NoiseSpec`]s, e.g. `bf:0.2,none,ad:0.5`.
impl FromStr for NoiseConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "noise config needs three comma-separated entries, got {}",
                parts.len()
            )));
        }
        Ok(Self::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pub kind: NoiseKind,
    pub p: f64,
    pub ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Wraps an arbitrary operator list without checking it.
    pub fn from_ops(kind: NoiseKind, p: f64, ops: Vec<ComplexMatrix>) -> Self {
        Self { kind, p, ops }
    }
}

pub fn kraus_set(kind: NoiseKind, p: f64) -> Result<KrausSet> {
    let p = check_rate(p)?;
    let r = |x: f64| C64::new(x, 0.0);
    let ops = match kind {
        NoiseKind::None => vec![qlin::identity2()],
        NoiseKind::BitFlip => vec![
            qlin::identity2().scale(r((1.0 - p).sqrt())),
            qlin::pauli_x().scale(r(p.sqrt())),
        ],
        NoiseKind::AmplitudeDamping => vec![
            ComplexMatrix::diag(&[1.0, (1.0 - p).sqrt()])?,
            ComplexMatrix::from_rows2([[r(0.0), r(p.sqrt())], [r(0.0), r(0.0)]]),
        ],
        NoiseKind::PhaseFlip => vec![
            qlin::identity2().scale(r((1.0 - p).sqrt())),
            qlin::pauli_z().scale(r(p.sqrt())),
        ],
        NoiseKind::Depolarizing => {
            let w = r((p / 4.0).sqrt());
            vec![
                qlin::identity2().scale(r((1.0 - 0.75 * p).sqrt())),
                qlin::pauli_x().scale(w),
                qlin::pauli_y().scale(w),
                qlin::pauli_z().scale(w),
            ]
        }
    };
    Ok(KrausSet { kind, p, ops })
}

/// Checks `Σ E†E = I`; returns the max-entry deviation on success.
pub fn validate_cptp(ks: &KrausSet) -> Result<f64> {
    let dim = ks.ops.first().map(ComplexMatrix::dim).unwrap_or(2);
    let mut sum = ComplexMatrix::zeros(dim)?;
    for op in &ks.ops {
        sum = sum.try_add(&qlin::dagger(op).matmul(op)?)?;
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim)?)?;
    if deviation < CPTP_TOL {
        Ok(deviation)
    } else {
        Err(Error::NotTracePreserving { deviation })
    }
}

/// Embeds each 2×2 operator on `qubit` (1-based) of the three-qubit space.
pub fn lift(ks: &KrausSet, qubit: usize) -> Result<Vec<ComplexMatrix>> {
    let id = qlin::identity2();
    ks.ops
        .iter()
        .map(|op| {
            let factors = match qubit {
                1 => [op, &id, &id],
                2 => [&id, op, &id],
                3 => [&id, &id, op],
                other => return Err(Error::InvalidQubit(other)),
            };
            qlin::kron(&qlin::kron(factors[0], factors[1])?, factors[2])
        })
        .collect()
}

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch {
            left: 8,
            right: rho.dim(),
        });
    }
    let residual = rho.hermitian_residual();
    if residual > DENSITY_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    let min_eig = qlin::min_eigenvalue_hermitian(rho)?;
    if min_eig < -DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("eigenvalue {min_eig}")));
    }
    Ok(())
}

/// Applies the per-qubit channels of `cfg` to a three-qubit density matrix,
/// qubit 1 first.
pub fn apply_noise(rho: &ComplexMatrix, cfg: &NoiseConfig) -> Result<ComplexMatrix> {
    check_density(rho)?;
    let mut out = rho.clone();
    for (idx, spec) in cfg.specs().iter().enumerate() {
        if spec.kind == NoiseKind::None {
            continue;
        }
        let ops = lift(&kraus_set(spec.kind, spec.p)?, idx + 1)?;
        let mut next = ComplexMatrix::zeros(8)?;
        for op in &ops {
            next = next.try_add(&qlin::sandwich(op, &out)?)?;
        }
        out = next;
    }
    Ok(out)
}

string_serde!(NoiseConfig);
