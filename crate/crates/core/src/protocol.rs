//! One run of controlled remote state preparation.
//!
//! Charlie prepares `cosθ|000> + sinθ|111>`, the noise channels act on all
//! three qubits, Alice measures qubit 1 in a basis built from the target
//! state, Bob measures qubit 2 in the φ-rotated basis, and Charlie applies a
//! Pauli correction on qubit 3 chosen by the two outcomes.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::channels::{self, NoiseConfig};
use crate::error::{Error, Result};
use crate::qlin::{self, ComplexMatrix, StateVector, C64};

/// Outcomes with probability at or below this are reported as degenerate.
pub const DEGENERATE_Q: f64 = 1e-12;

const ANGLE_SLACK: f64 = 1e-12;

/// The state `|α||0> + |β|e^{iδ}|1>` that Charlie should end up holding,
/// parameterized by `u = |α|²` and the relative phase `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    u: f64,
    delta: f64,
}

impl TargetState {
    /// `delta` is wrapped into `[0, 2π)`.
    pub fn new(u: f64, delta: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::NotFinite("|α|²"));
        }
        if !delta.is_finite() {
            return Err(Error::NotFinite("δ"));
        }
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::RateOutOfRange(u));
        }
        Ok(Self {
            u,
            delta: delta.rem_euclid(TAU),
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha_abs(&self) -> f64 {
        self.u.sqrt()
    }

    pub fn beta_abs(&self) -> f64 {
        (1.0 - self.u).sqrt()
    }

    pub fn ket(&self) -> StateVector {
        StateVector::qubit(
            C64::new(self.alpha_abs(), 0.0),
            C64::from_polar(self.beta_abs(), self.delta),
        )
    }
}

fn check_angle(value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NotFinite("angle"));
    }
    if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&value) {
        return Err(Error::AngleOutOfRange {
            value,
            min: 0.0,
            max: FRAC_PI_2,
        });
    }
    Ok(value.clamp(0.0, FRAC_PI_2))
}

/// Channel angle θ and Bob's basis angle φ, both in `[0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    theta: f64,
    phi: f64,
}

impl ProtocolParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            theta: check_angle(theta)?,
            phi: check_angle(phi)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub j: usize,
    pub q: f64,
    pub f: f64,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub outcomes: [OutcomeRecord; 4],
    pub fbar: f64,
}

impl ProtocolResult {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.q).sum()
    }
}

/// How Alice's second basis vector is phased.
///
/// `BranchMatched` uses `A₂ = |β|e^{-iδ}|0> − |α||1>`, which makes each
/// measurement branch carry exactly the qubit-3 state that the Pauli
/// corrections map back onto the target. The two vectors are then orthogonal
/// only for real targets (`δ ∈ {0, π}`), but the induced outcome weights still
/// sum to one whenever qubit 1's reduced state is diagonal, which holds for
/// the channel state under every supported noise kind.
///
/// `Orthonormal` uses `A₂ = |β|e^{+iδ}|0> − |α||1>`, a genuine projective
/// measurement. Its second outcome delivers the state orthogonal to the
/// target, which no fixed unitary can undo, so even the noiseless GHZ run
/// averages to 5/6.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliceConvention {
    #[default]
    BranchMatched,
    Orthonormal,
}

pub fn channel_state(theta: f64) -> Result<StateVector> {
    let theta = check_angle(theta)?;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b000] = C64::new(theta.cos(), 0.0);
    amps[0b111] = C64::new(theta.sin(), 0.0);
    StateVector::new(amps)
}

pub fn alice_basis(t: &TargetState) -> (StateVector, StateVector) {
    alice_basis_with(t, AliceConvention::default())
}

pub fn alice_basis_with(t: &TargetState, convention: AliceConvention) -> (StateVector, StateVector) {
    let (a, b) = (t.alpha_abs(), t.beta_abs());
    let a1 = StateVector::qubit(C64::new(a, 0.0), C64::from_polar(b, -t.delta));
    let second_phase = match convention {
        AliceConvention::BranchMatched => -t.delta,
        AliceConvention::Orthonormal => t.delta,
    };
    let a2 = StateVector::qubit(C64::from_polar(b, second_phase), C64::new(-a, 0.0));
    (a1, a2)
}

pub fn bob_basis(phi: f64) -> Result<(StateVector, StateVector)> {
    let phi = check_angle(phi)?;
    let (s, c) = phi.sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    Ok((StateVector::qubit(r(c), r(s)), StateVector::qubit(r(s), r(-c))))
}

/// Charlie's unitary for outcome `j`: I, σᶻ, (σᶻσˣ)† = σˣσᶻ, σˣ.
pub fn correction(j: usize) -> Result<ComplexMatrix> {
    match j {
        1 => Ok(qlin::identity2()),
        2 => Ok(qlin::pauli_z()),
        3 => Ok(qlin::dagger(&(&qlin::pauli_z() * &qlin::pauli_x()))),
        4 => Ok(qlin::pauli_x()),
        other => Err(Error::InvalidOutcome(other)),
    }
}

/// The noisy channel state for fixed θ and noise, reusable across targets
/// and Bob angles.
#[derive(Clone, Debug)]
pub struct PreparedChannel {
    rho: ComplexMatrix,
}

impl PreparedChannel {
    pub fn prepare(theta: f64, cfg: &NoiseConfig) -> Result<Self> {
        let ket = channel_state(theta)?;
        let rho = channels::apply_noise(&ComplexMatrix::outer(&ket), cfg)?;
        Ok(Self { rho })
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Contracts Bob's qubit against both vectors of his basis.
    pub fn measure_bob(&self, phi: f64) -> Result<BobBranches> {
        let (b1, b2) = bob_basis(phi)?;
        Ok(BobBranches {
            branches: [
                qlin::contract_qubit(&self.rho, 1, &b1)?,
                qlin::contract_qubit(&self.rho, 1, &b2)?,
            ],
        })
    }
}

/// Unnormalized two-qubit operators on (qubit 1, qubit 3), one per Bob outcome.
#[derive(Clone, Debug)]
pub struct BobBranches {
    branches: [ComplexMatrix; 2],
}

impl BobBranches {
    pub fn run(&self, target: &TargetState, convention: AliceConvention) -> Result<ProtocolResult> {
        self.run_prepared(&PreparedTarget::new(*target, convention)?)
    }

    pub fn run_prepared(&self, target: &PreparedTarget) -> Result<ProtocolResult> {
        // Outcome j = 2k + m + 1 for Alice vector k and Bob vector m.
        let pairs = [(&target.alice[0], 0), (&target.alice[0], 1), (&target.alice[1], 0), (&target.alice[1], 1)];
        let mut outcomes = [OutcomeRecord {
            j: 0,
            q: 0.0,
            f: 0.0,
            degenerate: false,
        }; 4];
        let mut fbar = 0.0;
        for (idx, (alice, bob)) in pairs.into_iter().enumerate() {
            let reduced = qlin::contract_qubit(&self.branches[bob], 0, alice)?;
            let q = reduced.trace().re;
            let overlap = qlin::fidelity_pure(&target.pulled_back[idx], &reduced)?;
            fbar += overlap;
            let degenerate = q <= DEGENERATE_Q;
            outcomes[idx] = OutcomeRecord {
                j: idx + 1,
                q,
                f: if degenerate { 0.0 } else { overlap / q },
                degenerate,
            };
        }
        Ok(ProtocolResult { outcomes, fbar })
    }
}

/// Target-dependent pieces of a run that do not depend on the channel.
#[derive(Clone, Debug)]
pub struct PreparedTarget {
    target: TargetState,
    alice: [StateVector; 2],
    /// U_j†|ψ>, so that <ψ|U ρ U†|ψ> = <U†ψ|ρ|U†ψ>.
    pulled_back: [StateVector; 4],
}

impl PreparedTarget {
    pub fn new(target: TargetState, convention: AliceConvention) -> Result<Self> {
        let psi = target.ket();
        let (a1, a2) = alice_basis_with(&target, convention);
        let pull = |j| -> Result<StateVector> { qlin::dagger(&correction(j)?).apply(&psi) };
        Ok(Self {
            target,
            alice: [a1, a2],
            pulled_back: [pull(1)?, pull(2)?, pull(3)?, pull(4)?],
        })
    }

    pub fn target(&self) -> &TargetState {
        &self.target
    }
}

pub fn run(t: &TargetState, p: &ProtocolParams, cfg: &NoiseConfig) -> Result<ProtocolResult> {
    run_with(t, p, cfg, AliceConvention::default())
}

pub fn run_with(
    t: &TargetState,
    p: &ProtocolParams,
    cfg: &NoiseConfig,
    convention: AliceConvention,
) -> Result<ProtocolResult> {
    PreparedChannel::prepare(p.theta, cfg)?
        .measure_bob(p.phi)?
        .run(t, convention)
}

/// Outcome probabilities and fidelities of the noiseless protocol from their
/// closed forms, without any matrices.
pub fn noiseless_oracle(t: &TargetState, p: &ProtocolParams) -> ProtocolResult {
    let (a2, b2) = (t.u, 1.0 - t.u);
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let cross = 2.0 * a2 * b2 * ct * cp * st * sp;
    // (|α|² weight, |β|² weight) for each outcome's qubit-3 amplitudes squared.
    let weights = [
        (ct * ct * cp * cp, st * st * sp * sp),
        (ct * ct * sp * sp, st * st * cp * cp),
        (st * st * sp * sp, ct * ct * cp * cp),
        (st * st * cp * cp, ct * ct * sp * sp),
    ];
    let mut outcomes = [OutcomeRecord {
        j: 0,
        q: 0.0,
        f: 0.0,
        degenerate: false,
    }; 4];
    let mut fbar = 0.0;
    for (idx, (wa, wb)) in weights.into_iter().enumerate() {
        let q = a2 * wa + b2 * wb;
        let numerator = a2 * a2 * wa + b2 * b2 * wb + cross;
        fbar += numerator;
        let degenerate = q <= DEGENERATE_Q;
        outcomes[idx] = OutcomeRecord {
            j: idx + 1,
            q,
            f: if degenerate { 0.0 } else { numerator / q },
            degenerate,
        };
    }
    ProtocolResult { outcomes, fbar }
}

/// `|α|⁴ + |β|⁴ + 2|α|²|β|² sin2θ sin2φ`.
pub fn noiseless_fbar(u: f64, theta: f64, phi: f64) -> f64 {
    let v = 1.0 - u;
    u * u + v * v + 2.0 * u * v * (2.0 * theta).sin() * (2.0 * phi).sin()
}
