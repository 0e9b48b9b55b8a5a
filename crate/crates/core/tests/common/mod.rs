//! Reference implementation that shares no code with the library: it follows
//! each Kraus trajectory of the pure channel ket, projects the trajectory on
//! Alice's and Bob's vectors, and sums squared overlaps.

#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Op = [[C; 2]; 2];

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub const KINDS: [&str; 5] = ["none", "bf", "ad", "phf", "d"];

/// Kraus operators written out by hand.
pub fn kraus(kind: &str, p: f64) -> Vec<Op> {
    let z = c(0.0);
    let i_ = C::new(0.0, 1.0);
    let scaled_id = |s: f64| [[c(s), z], [z, c(s)]];
    match kind {
        "none" => vec![scaled_id(1.0)],
        "bf" => vec![scaled_id((1.0 - p).sqrt()), [[z, c(p.sqrt())], [c(p.sqrt()), z]]],
        "phf" => vec![scaled_id((1.0 - p).sqrt()), [[c(p.sqrt()), z], [z, c(-p.sqrt())]]],
        "ad" => vec![[[c(1.0), z], [z, c((1.0 - p).sqrt())]], [[z, c(p.sqrt())], [z, z]]],
        "d" => {
            let q = (p / 4.0).sqrt();
            vec![
                scaled_id((1.0 - 3.0 * p / 4.0).sqrt()),
                [[z, c(q)], [c(q), z]],
                [[z, -i_ * q], [i_ * q, z]],
                [[c(q), z], [z, c(-q)]],
            ]
        }
        other => panic!("unknown kind {other}"),
    }
}

/// Kets indexed as `[q1][q2][q3]`.
type Ket3 = [[[C; 2]; 2]; 2];

fn apply_on(op: &Op, v: &Ket3, qubit: usize) -> Ket3 {
    let mut out = [[[c(0.0); 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for d in 0..2 {
                let idx = [a, b, d];
                let mut acc = c(0.0);
                for k in 0..2 {
                    let mut src = idx;
                    src[qubit] = k;
                    acc += op[idx[qubit]][k] * v[src[0]][src[1]][src[2]];
                }
                out[a][b][d] = acc;
            }
        }
    }
    out
}

pub struct Outcome {
    pub q: f64,
    /// <ψ|ρ̃|ψ>, not divided by q.
    pub overlap: f64,
}

/// Per-outcome probabilities and weighted fidelities, plus their sum F̄.
pub fn reference_run(
    u: f64,
    delta: f64,
    theta: f64,
    phi: f64,
    noise: [(&str, f64); 3],
) -> ([Outcome; 4], f64) {
    let (a, b) = (u.sqrt(), (1.0 - u).sqrt());
    let psi = [c(a), C::from_polar(b, delta)];
    let alice = [
        [c(a), C::from_polar(b, -delta)],
        [C::from_polar(b, -delta), c(-a)],
    ];
    let bob = [[c(phi.cos()), c(phi.sin())], [c(phi.sin()), c(-phi.cos())]];
    let x: Op = [[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
    let zz: Op = [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]];
    let id: Op = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
    let xz: Op = [[c(0.0), c(-1.0)], [c(1.0), c(0.0)]];
    let corrections = [id, zz, xz, x];

    let mut ket: Ket3 = [[[c(0.0); 2]; 2]; 2];
    ket[0][0][0] = c(theta.cos());
    ket[1][1][1] = c(theta.sin());

    let k1 = kraus(noise[0].0, noise[0].1);
    let k2 = kraus(noise[1].0, noise[1].1);
    let k3 = kraus(noise[2].0, noise[2].1);

    let mut q = [0.0; 4];
    let mut ov = [0.0; 4];
    for e1 in &k1 {
        for e2 in &k2 {
            for e3 in &k3 {
                let v = apply_on(e3, &apply_on(e2, &apply_on(e1, &ket, 0), 1), 2);
                for (j, (ai, bi)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                    let mut w = [c(0.0); 2];
                    for (d, wd) in w.iter_mut().enumerate() {
                        for s in 0..2 {
                            for t in 0..2 {
                                *wd += alice[ai][s].conj() * bob[bi][t].conj() * v[s][t][d];
                            }
                        }
                    }
                    let u_ = &corrections[j];
                    let corrected = [
                        u_[0][0] * w[0] + u_[0][1] * w[1],
                        u_[1][0] * w[0] + u_[1][1] * w[1],
                    ];
                    q[j] += corrected[0].norm_sqr() + corrected[1].norm_sqr();
                    let amp = psi[0].conj() * corrected[0] + psi[1].conj() * corrected[1];
                    ov[j] += amp.norm_sqr();
                }
            }
        }
    }
    let outcomes = [0, 1, 2, 3].map(|j| Outcome { q: q[j], overlap: ov[j] });
    let fbar = ov.iter().sum();
    (outcomes, fbar)
}

/// Plain midpoint-free average: Simpson in u over 64 panels and a 64-point
/// periodic rule in δ. Exact for the low-degree integrand up to rounding.
pub fn reference_average(theta: f64, phi: f64, noise: [(&str, f64); 3]) -> f64 {
    let nu = 64;
    let nd = 64;
    let mut total = 0.0;
    for i in 0..=nu {
        let u = i as f64 / nu as f64;
        let w = if i == 0 || i == nu {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let mut inner = 0.0;
        for k in 0..nd {
            let delta = std::f64::consts::TAU * k as f64 / nd as f64;
            inner += reference_run(u, delta, theta, phi, noise).1;
        }
        total += w * inner / nd as f64;
    }
    total / (3.0 * nu as f64)
}

pub fn eq13(theta: f64, phi: f64) -> f64 {
    2.0 / 3.0 + (2.0 * theta).sin() * (2.0 * phi).sin() / 3.0
}
