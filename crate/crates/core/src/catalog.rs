//! Closed-form efficiency formulas ⟨F̄⟩ for the noise configurations that have
//! one, transcribed as printed (including the terms the comparator later flags).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{check_rate, NoiseConfig, NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::protocol::ProtocolParams;

use NoiseKind::{AmplitudeDamping as AD, BitFlip as BF, Depolarizing as D, None as N, PhaseFlip as PhF};

const SHARED_RATE_TOL: f64 = 1e-12;

/// Which noise acts on Alice's, Bob's and Charlie's qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CatalogKey {
    pub k1: NoiseKind,
    pub k2: NoiseKind,
    pub k3: NoiseKind,
}

/// A rate that varies independently for a given key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateAxis {
    P1,
    P2,
    P3,
    /// p₁ = p₂ = p for the two-noisy-qubit keys.
    P,
}

impl RateAxis {
    pub fn label(self) -> &'static str {
        match self {
            RateAxis::P1 => "p1",
            RateAxis::P2 => "p2",
            RateAxis::P3 => "p3",
            RateAxis::P => "p",
        }
    }
}

impl CatalogKey {
    pub const fn new(k1: NoiseKind, k2: NoiseKind, k3: NoiseKind) -> Self {
        Self { k1, k2, k3 }
    }

    pub const fn noiseless() -> Self {
        Self::new(N, N, N)
    }

    pub fn kinds(&self) -> [NoiseKind; 3] {
        [self.k1, self.k2, self.k3]
    }

    pub fn is_supported(&self) -> bool {
        let (a, b, c) = (self.k1, self.k2, self.k3);
        match (a, b, c) {
            (N, N, N) => true,
            (N, N, _) => false,
            (_, N, _) => true,
            (N, AD | D | PhF, y) => y != N,
            (N, _, _) => false,
            (x, y, z) => x == y && z != N,
        }
    }

    /// `(∅,PhF,Y)` has no formula of its own and reuses `(PhF,∅,Y)`.
    pub fn is_alias(&self) -> bool {
        self.k1 == N && self.k2 == PhF && self.k3 != N
    }

    /// The noiseless key and the single-noise-on-Alice keys.
    pub fn is_anchor(&self) -> bool {
        self.k2 == N && self.k3 == N
    }

    /// Both of the first two qubits noisy with one shared rate.
    pub fn is_shared_rate(&self) -> bool {
        self.k1 != N && self.k1 == self.k2
    }

    pub fn rate_axes(&self) -> Vec<RateAxis> {
        let mut axes = Vec::with_capacity(2);
        if self.is_shared_rate() {
            axes.push(RateAxis::P);
        } else {
            if self.k1 != N {
                axes.push(RateAxis::P1);
            }
            if self.k2 != N {
                axes.push(RateAxis::P2);
            }
        }
        if self.k3 != N {
            axes.push(RateAxis::P3);
        }
        axes
    }

    /// Noise configuration that the simulation should run for this key.
    pub fn noise_config(&self, p1: f64, p2: f64, p3: f64) -> Result<NoiseConfig> {
        Ok(NoiseConfig::new(
            NoiseSpec::new(self.k1, p1)?,
            NoiseSpec::new(self.k2, p2)?,
            NoiseSpec::new(self.k3, p3)?,
        ))
    }

    /// Expands values for [`Self::rate_axes`] into `(p1, p2, p3)`; unused slots are 0.
    pub fn rates_from_axes(&self, values: &[f64]) -> Result<(f64, f64, f64)> {
        let axes = self.rate_axes();
        if axes.len() != values.len() {
            return Err(Error::EntryCount {
                expected: axes.len(),
                actual: values.len(),
            });
        }
        let (mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0);
        for (axis, &v) in axes.iter().zip(values) {
            match axis {
                RateAxis::P1 => p1 = v,
                RateAxis::P2 => p2 = v,
                RateAxis::P3 => p3 = v,
                RateAxis::P => {
                    p1 = v;
                    p2 = v;
                }
            }
        }
        Ok((p1, p2, p3))
    }
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.k1, self.k2, self.k3)
    }
}

impl FromStr for CatalogKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("catalog key needs three comma-separated kinds: {s:?}")));
        }
        Ok(Self::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?))
    }
}

impl TryFrom<String> for CatalogKey {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CatalogKey> for String {
    fn from(k: CatalogKey) -> String {
        k.to_string()
    }
}

/// Every key with a closed form, sorted, noiseless first.
pub fn supported_keys() -> Vec<CatalogKey> {
    let mut keys = Vec::new();
    for &a in &NoiseKind::ALL {
        for &b in &NoiseKind::ALL {
            for &c in &NoiseKind::ALL {
                let key = CatalogKey::new(a, b, c);
                if key.is_supported() {
                    keys.push(key);
                }
            }
        }
    }
    keys.sort();
    keys
}

/// Supported keys excluding `(∅,∅,∅)`.
pub fn noise_keys() -> Vec<CatalogKey> {
    supported_keys().into_iter().filter(|k| *k != CatalogKey::noiseless()).collect()
}

fn unsupported(key: &CatalogKey) -> Error {
    Error::UnsupportedKey(format!("({key}) has no closed form; simulate it instead"))
}

/// ⟨F̄⟩ for `key` at the given rates and angles. Rates for noiseless slots are
/// validated but ignored.
pub fn efficiency_formula(key: &CatalogKey, p1: f64, p2: f64, p3: f64, theta: f64, phi: f64) -> Result<f64> {
    if !key.is_supported() {
        return Err(unsupported(key));
    }
    let (p1, p2, p3) = (check_rate(p1)?, check_rate(p2)?, check_rate(p3)?);
    let params = ProtocolParams::new(theta, phi)?;
    if key.is_shared_rate() && (p1 - p2).abs() > SHARED_RATE_TOL {
        return Err(Error::UnequalSharedRate {
            key: key.to_string(),
            p1,
            p2,
        });
    }
    let t = Trig::new(params.theta(), params.phi());
    if key.is_alias() {
        return Ok(alice_and_charlie(PhF, key.k3, p2, p3, &t));
    }
    let value = match (key.k1, key.k2, key.k3) {
        (N, N, N) => 2.0 / 3.0 + t.s / 3.0,
        (x, N, N) => alice_only(x, p1, &t),
        (x, N, y) => alice_and_charlie(x, y, p1, p3, &t),
        (N, x, y) => bob_and_charlie(x, y, p2, p3, &t),
        (x, _, y) => shared(x, y, p1, p3, &t),
    };
    Ok(value)
}

struct Trig {
    /// sin2θ·sin2φ
    s: f64,
    /// sin²θ
    s2: f64,
    /// cos2θ
    c2: f64,
}

impl Trig {
    fn new(theta: f64, phi: f64) -> Self {
        Self {
            s: (2.0 * theta).sin() * (2.0 * phi).sin(),
            s2: theta.sin().powi(2),
            c2: (2.0 * theta).cos(),
        }
    }
}

fn alice_only(x: NoiseKind, p1: f64, t: &Trig) -> f64 {
    let Trig { s, s2, .. } = *t;
    match x {
        BF => 2.0 / 3.0 * (1.0 - p1 / 2.0 + s / 2.0),
        AD => 2.0 / 3.0 * (1.0 - p1 / 2.0 * s2 + (1.0 - p1).sqrt() / 2.0 * s),
        PhF => 2.0 / 3.0 * (1.0 + (1.0 - 2.0 * p1).abs() / 2.0 * s),
        D => 2.0 / 3.0 * (1.0 - p1 / 4.0 + (1.0 - p1) / 2.0 * s),
        N => unreachable!(),
    }
}

fn alice_and_charlie(x: NoiseKind, y: NoiseKind, p1: f64, p3: f64, t: &Trig) -> f64 {
    let Trig { s, s2, .. } = *t;
    let r1 = (1.0 - p1).sqrt();
    let r3 = (1.0 - p3).sqrt();
    let a1 = (1.0 - 2.0 * p1).abs();
    let a3 = (1.0 - 2.0 * p3).abs();
    match (x, y) {
        (BF, BF) => 2.0 / 3.0 - (p1 + p3 - 2.0 * p1 * p3) / 3.0 + s / 3.0,
        (BF, AD) => 2.0 / 3.0 - p1 / 3.0 - p3 / 3.0 * (1.0 - 2.0 * p1) * s2 + r3 / 3.0 * s,
        (BF, PhF) => 2.0 / 3.0 - p1 / 3.0 + a3 / 3.0 * s,
        (BF, D) => 2.0 / 3.0 - p3 / 6.0 - p1 / 3.0 + p1 * p3 / 3.0 + (1.0 - p3) / 3.0 * s,

        (AD, BF) => {
            2.0 / 3.0 - p3 / 3.0 - p1 / 3.0 - p1 * p3 / 6.0 + p1 / 6.0 * (1.0 + p3) * s2 + r1 / 3.0 * s
        }
        (AD, AD) => 2.0 / 3.0 - (p1 + p3 - 2.0 * p1 * p3) / 3.0 * s2 + ((1.0 - p1) * (1.0 - p3)).sqrt() / 3.0 * s,
        (AD, PhF) => 2.0 / 3.0 - p1 / 3.0 + p1 / 3.0 * s2 + a3 * r1 / 3.0 * s,
        (AD, D) => {
            2.0 / 3.0 - p3 / 6.0 - p1 / 3.0 + p1 * p3 / 12.0
                + p1 / 6.0 * (2.0 + p3) * s2
                + (1.0 - p3) * r1 / 3.0 * s
        }

        (PhF, BF) => 2.0 / 3.0 - p3 / 3.0 + a1 / 3.0 * s,
        (PhF, AD) => 2.0 / 3.0 - p3 / 3.0 * s2 + a1 * r3 / 3.0 * s,
        (PhF, PhF) => 2.0 / 3.0 + ((1.0 - 2.0 * p1) * (1.0 - 2.0 * p3)).abs() / 3.0 * s,
        (PhF, D) => 2.0 / 3.0 - p3 / 6.0 + a1 * (1.0 - p3) / 3.0 * s,

        (D, BF) => 2.0 / 3.0 - p1 / 6.0 - p3 / 3.0 + p1 * p3 / 3.0 + (1.0 - p1) / 3.0 * s,
        (D, AD) => 2.0 / 3.0 - p1 / 6.0 - p3 / 3.0 * (1.0 - p1) * s2 + (1.0 - p1) * r3 / 3.0 * s,
        (D, PhF) => 2.0 / 3.0 - p1 / 6.0 + (1.0 - p1) * a3 / 3.0 * s,
        (D, D) => {
            2.0 / 3.0 - p1 / 6.0 - p3 / 6.0 + p1 * p3 / 6.0 + (1.0 - p1) * (1.0 - p3) / 3.0 * s
        }
        _ => unreachable!(),
    }
}

fn bob_and_charlie(x: NoiseKind, y: NoiseKind, p2: f64, p3: f64, t: &Trig) -> f64 {
    let Trig { s, s2, c2 } = *t;
    let r2 = (1.0 - p2).sqrt();
    let r3 = (1.0 - p3).sqrt();
    let a3 = (1.0 - 2.0 * p3).abs();
    match (x, y) {
        (AD, BF) => {
            2.0 / 3.0 - p2 / 3.0 - p3 / 3.0 + p2 * p3 / 6.0
                + (2.0 * p2 / 3.0 - p2 * p3 / 3.0) * s2
                + r2 / 3.0 * s
        }
        (AD, AD) => 2.0 / 3.0 - p3 / 6.0 * (1.0 - c2) + (r2 * r3) / 3.0 * s,
        (AD, PhF) => 2.0 / 3.0 - p2 / 3.0 + 2.0 * p2 / 3.0 * s2 + r2 / 3.0 * a3 * s,
        (AD, D) => {
            2.0 / 3.0 - p3 / 6.0 - p2 / 3.0 + p2 * p3 / 12.0
                + (2.0 / 3.0 - p3 / 6.0) * p2 * s2
                + r2 / 3.0 * (1.0 - p3) * s
        }

        (D, BF) => 2.0 / 3.0 - p3 / 3.0 + (1.0 - p2) / 3.0 * s,
        (D, AD) => 2.0 / 3.0 - p3 / 6.0 * (1.0 - c2) + (1.0 - p2) * r3 / 3.0 * s,
        (D, PhF) => 2.0 / 3.0 + (1.0 - p2) * a3 / 3.0 * s,
        (D, D) => 2.0 / 3.0 - p3 / 6.0 + (1.0 - p2) * (1.0 - p3) / 3.0 * s,
        _ => unreachable!(),
    }
}

fn shared(x: NoiseKind, y: NoiseKind, p: f64, p3: f64, t: &Trig) -> f64 {
    let Trig { s, s2, c2 } = *t;
    let r3 = (1.0 - p3).sqrt();
    let a3 = (1.0 - 2.0 * p3).abs();
    let pp = p * p;
    // 1 − 2p + 2p² recurs for the bit- and phase-flip pairs.
    let g = 1.0 - 2.0 * p + 2.0 * pp;
    match (x, y) {
        (BF, BF) => 2.0 / 3.0 - 4.0 * p / 3.0 + pp - p3 / 3.0 + 2.0 * p * p3 / 3.0 + g / 3.0 * s,
        (BF, AD) => 2.0 / 3.0 - 4.0 * p / 3.0 + pp - p3 / 6.0 * g * (1.0 - c2) + g * r3 / 3.0 * s,
        (BF, PhF) => 2.0 / 3.0 - 4.0 * p / 3.0 + pp + a3 * g / 3.0 * s,
        (BF, D) => 2.0 / 3.0 - 4.0 * p / 3.0 + pp - p3 / 6.0 + p * p3 / 3.0 + g * (1.0 - p3) / 3.0 * s,

        (AD, BF) => (2.0 - p3) * (2.0 - 2.0 * p + pp) / 6.0 + pp * (1.0 + p3) / 3.0 * s2 + (1.0 - p) / 3.0 * s,
        (AD, AD) => {
            2.0 / 3.0 - (4.0 * p - 3.0 * pp + p3 - 2.0 * p * p3) / 3.0 * s2 + (1.0 - p) * r3 / 3.0 * s
        }
        (AD, PhF) => 2.0 / 3.0 - 2.0 * p / 3.0 + pp / 3.0 + pp / 3.0 * s2 + (1.0 - p) * a3 / 3.0 * s,
        (AD, D) => {
            (4.0 - p3) * (2.0 - 2.0 * p + pp) / 12.0
                + pp * (2.0 + p3) / 6.0 * s2
                + (1.0 - p) * (1.0 - p3) / 3.0 * s
        }

        (PhF, BF) => (2.0 - p3) * g / 3.0 + g / 3.0 * s,
        (PhF, AD) => 2.0 / 3.0 * g - p3 / 6.0 * (1.0 - c2) + g * r3 / 3.0 * s,
        (PhF, PhF) => 2.0 / 3.0 * g + g * a3 / 3.0 * s,
        (PhF, D) => (4.0 - p3) * g / 6.0 + (1.0 - p3) * g / 3.0 * s,

        (D, _) => {
            let base = 2.0 / 3.0 - p + 11.0 * pp / 24.0;
            let h = 1.0 / 3.0 - p / 2.0 + pp / 4.0;
            match y {
                BF => base + p * p3 / 2.0 - p3 / 3.0 - pp * p3 / 6.0 + h * s,
                AD => {
                    base - (2.0 * p3 - 3.0 * p * p3 + pp * p3) / 6.0 * (1.0 - c2)
                        + (1.0 - 1.5 * p + 0.75 * pp) * r3 / 3.0 * s
                }
                PhF => base + h * a3 * s,
                D => base + p * p3 / 4.0 - p3 / 6.0 - pp * p3 / 12.0 + h * (1.0 - p3) * s,
                N => unreachable!(),
            }
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn key(s: &str) -> CatalogKey {
        s.parse().unwrap()
    }

    fn at_ghz(k: &str, p1: f64, p2: f64, p3: f64) -> f64 {
        efficiency_formula(&key(k), p1, p2, p3, FRAC_PI_4, FRAC_PI_4).unwrap()
    }

    #[test]
    fn worked_values() {
        assert_abs_diff_eq!(at_ghz("none,none,none", 0.0, 0.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(at_ghz("bf,none,none", 0.5, 0.0, 0.0), 5.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(at_ghz("phf,none,phf", 1.0, 0.0, 1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(at_ghz("d,none,none", 1.0, 0.0, 0.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn key_enumeration() {
        let keys = supported_keys();
        assert_eq!(keys.len(), 49);
        assert_eq!(keys.iter().filter(|k| k.is_alias()).count(), 4);
        assert_eq!(keys[0], CatalogKey::noiseless());
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(keys.contains(&key("bf,none,ad")));
        assert!(!keys.contains(&key("none,bf,ad")));
        assert!(keys.contains(&key("none,phf,d")));
        assert!(!keys.contains(&key("bf,ad,d")));
        assert!(!keys.contains(&key("bf,bf,none")));
        assert!(!keys.contains(&key("none,ad,none")));
        assert_eq!(noise_keys().len(), 48);
    }

    #[test]
    fn alias_resolves_to_alice_phase_flip_formula() {
        for y in ["bf", "ad", "phf", "d"] {
            let direct = efficiency_formula(&key(&format!("phf,none,{y}")), 0.3, 0.0, 0.6, 0.7, 1.1).unwrap();
            let alias = efficiency_formula(&key(&format!("none,phf,{y}")), 0.0, 0.3, 0.6, 0.7, 1.1).unwrap();
            assert_eq!(direct, alias);
        }
    }

    #[test]
    fn rejections() {
        let err = efficiency_formula(&key("none,bf,ad"), 0.0, 0.1, 0.1, 0.5, 0.5).unwrap_err();
        assert!(matches!(err, Error::UnsupportedKey(_)));
        let err = efficiency_formula(&key("bf,bf,ad"), 0.1, 0.2, 0.1, 0.5, 0.5).unwrap_err();
        assert!(matches!(err, Error::UnequalSharedRate { .. }));
        assert!(efficiency_formula(&key("bf,none,ad"), 1.1, 0.0, 0.1, 0.5, 0.5).is_err());
        assert!(efficiency_formula(&key("bf,none,ad"), 0.1, 0.0, 0.1, 1.7, 0.5).is_err());
        assert!("bf,none".parse::<CatalogKey>().is_err());
        assert!("bf,none,xx".parse::<CatalogKey>().is_err());
    }

    #[test]
    fn zero_rates_reduce_to_noiseless_value() {
        let thetas = [0.0, 0.3, FRAC_PI_4, 1.2, FRAC_PI_2];
        for k in supported_keys() {
            for &th in &thetas {
                for &ph in &thetas {
                    let expected = 2.0 / 3.0 + (2.0 * th).sin() * (2.0 * ph).sin() / 3.0;
                    let got = efficiency_formula(&k, 0.0, 0.0, 0.0, th, ph).unwrap();
                    assert_abs_diff_eq!(got, expected, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn phi_quarter_pi_maximizes() {
        let rates = [0.0, 0.2, 0.5, 0.9];
        for k in supported_keys() {
            for &p in &rates {
                for &p3 in &rates {
                    for th in [0.2, 0.7, 1.3] {
                        let best = efficiency_formula(&k, p, p, p3, th, FRAC_PI_4).unwrap();
                        for i in 0..50 {
                            let ph = FRAC_PI_2 * i as f64 / 49.0;
                            let v = efficiency_formula(&k, p, p, p3, th, ph).unwrap();
                            assert!(v <= best + 1e-14, "{k} at φ={ph}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phase_flip_slots_reflect() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        for k in supported_keys() {
            let kinds = k.kinds();
            for &p in &grid {
                for &q in &grid {
                    let (p1, p2, p3) = if k.is_shared_rate() { (p, p, q) } else { (p, q, q) };
                    let v = efficiency_formula(&k, p1, p2, p3, 0.6, 0.9).unwrap();
                    // Reflect Charlie's phase-flip rate.
                    if kinds[2] == PhF {
                        let r = efficiency_formula(&k, p1, p2, 1.0 - p3, 0.6, 0.9).unwrap();
                        assert_abs_diff_eq!(v, r, epsilon = 1e-14);
                    }
                    // Reflect a lone phase flip on Alice or Bob; the shared keys
                    // have no |1−2p| in p.
                    if kinds[0] == PhF && kinds[1] == N {
                        let r = efficiency_formula(&k, 1.0 - p1, p2, p3, 0.6, 0.9).unwrap();
                        assert_abs_diff_eq!(v, r, epsilon = 1e-14);
                    }
                    if k.is_alias() {
                        let r = efficiency_formula(&k, p1, 1.0 - p2, p3, 0.6, 0.9).unwrap();
                        assert_abs_diff_eq!(v, r, epsilon = 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn values_stay_in_unit_interval() {
        let rates: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let angles: Vec<f64> = (0..=10).map(|i| FRAC_PI_2 * i as f64 / 10.0).collect();
        let mut bad = Vec::new();
        for k in supported_keys() {
            for &p in &rates {
                for &p3 in &rates {
                    for &th in &angles {
                        for &ph in &angles {
                            let v = efficiency_formula(&k, p, p, p3, th, ph).unwrap();
                            if !(0.0..=1.0 + 1e-12).contains(&v) {
                                bad.push(format!("{k} p={p} p3={p3} θ={th:.4} φ={ph:.4}: {v}"));
                            }
                        }
                    }
                }
            }
        }
        // The printed (AD,∅,BF) expression dips below zero near θ = 0; every
        // other key stays inside [0, 1].
        let offenders: std::collections::BTreeSet<&str> =
            bad.iter().map(|line| line.split(' ').next().unwrap()).collect();
        assert_eq!(offenders.into_iter().collect::<Vec<_>>(), vec!["ad,none,bf"]);
    }

    #[test]
    fn amplitude_damping_then_bit_flip_formula_goes_negative() {
        // 2/3 − 1/3 − 0.7/3 − 0.7/6 at θ = 0.
        let v = efficiency_formula(&key("ad,none,bf"), 0.7, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(v, -1.0 / 60.0, epsilon = 1e-15);
    }

    #[test]
    fn rate_axes_and_expansion() {
        assert!(CatalogKey::noiseless().rate_axes().is_empty());
        assert_eq!(key("ad,none,none").rate_axes(), vec![RateAxis::P1]);
        assert_eq!(key("none,d,bf").rate_axes(), vec![RateAxis::P2, RateAxis::P3]);
        assert_eq!(key("d,d,bf").rate_axes(), vec![RateAxis::P, RateAxis::P3]);
        assert_eq!(key("d,d,bf").rates_from_axes(&[0.2, 0.7]).unwrap(), (0.2, 0.2, 0.7));
        assert!(key("d,d,bf").rates_from_axes(&[0.2]).is_err());
    }

    #[test]
    fn display_round_trip_and_serde() {
        for k in supported_keys() {
            assert_eq!(k.to_string().parse::<CatalogKey>().unwrap(), k);
        }
        let json = serde_json::to_string(&key("phf,phf,ad")).unwrap();
        assert_eq!(json, "\"phf,phf,ad\"");
        let back: CatalogKey = serde_json::from_str(&json).unwrap();
        assert_eq!(back, key("phf,phf,ad"));
    }
}
