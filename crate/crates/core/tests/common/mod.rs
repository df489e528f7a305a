//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use optoqc::{Complex64, Gate, QuantumCircuit, QubitAssignment, QubitId, StateVector, Unitary};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn angle(rng: &mut TestRng) -> f64 {
    rng.gen_range(-PI..PI)
}

/// Distinct qubits drawn without replacement.
fn pick(rng: &mut TestRng, n: usize, k: usize) -> Vec<QubitId> {
    rand::seq::index::sample(rng, n, k)
        .into_iter()
        .map(QubitId)
        .collect()
}

/// Any gate from the full set that fits on `n` qubits.
pub fn random_gate(rng: &mut TestRng, n: usize) -> Gate {
    let max_kind = match n {
        1 => 6,
        2 => 9,
        _ => 11,
    };
    match rng.gen_range(0..max_kind) {
        0 => Gate::H(pick(rng, n, 1)[0]),
        1 => Gate::X(pick(rng, n, 1)[0]),
        2 => Gate::Z(pick(rng, n, 1)[0]),
        3 => Gate::S(pick(rng, n, 1)[0]),
        4 => Gate::Phase(pick(rng, n, 1)[0], angle(rng)),
        5 => Gate::U2 {
            qubit: pick(rng, n, 1)[0],
            theta: angle(rng),
            phi: angle(rng),
            lambda: angle(rng),
            gamma: angle(rng),
        },
        6 => {
            let q = pick(rng, n, 2);
            Gate::Cnot {
                control: q[0],
                target: q[1],
            }
        }
        7 => {
            let q = pick(rng, n, 2);
            Gate::Cz {
                control: q[0],
                target: q[1],
            }
        }
        8 => {
            let q = pick(rng, n, 2);
            Gate::Swap(q[0], q[1])
        }
        9 => {
            let q = pick(rng, n, 3);
            Gate::Toffoli {
                c1: q[0],
                c2: q[1],
                target: q[2],
            }
        }
        _ => {
            let q = pick(rng, n, 3);
            Gate::Fredkin {
                control: q[0],
                a: q[1],
                b: q[2],
            }
        }
    }
}

pub fn random_circuit(rng: &mut TestRng, n: usize, max_gates: usize) -> QuantumCircuit {
    let len = rng.gen_range(0..=max_gates);
    let gates = (0..len).map(|_| random_gate(rng, n)).collect();
    QuantumCircuit::with_gates(n, gates).unwrap()
}

/// Random location order, with a polarization qubit half of the time.
pub fn random_assignment(rng: &mut TestRng, n: usize) -> QubitAssignment {
    let mut qubits: Vec<QubitId> = (0..n).map(QubitId).collect();
    qubits.shuffle(rng);
    let pol = if rng.gen_bool(0.5) {
        qubits.pop()
    } else {
        None
    };
    QubitAssignment::new(n, pol, qubits).unwrap()
}

pub fn gaussian_complex(rng: &mut TestRng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized vector with Gaussian components (uniform on the unit sphere).
pub fn random_vector(rng: &mut TestRng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_state(rng: &mut TestRng, n: usize) -> StateVector {
    StateVector::from_amplitudes(random_vector(rng, 1 << n)).unwrap()
}

/// Haar-random U(2): `e^{iγ}[[a, -b*], [b, a*]]` with `(a, b)` uniform on the 3-sphere.
pub fn haar_u2(rng: &mut TestRng) -> Unitary {
    let v = random_vector(rng, 2);
    let (a, b) = (v[0], v[1]);
    let g = Complex64::from_polar(1.0, angle(rng));
    Unitary::from_rows(2, &[g * a, -g * b.conj(), g * b, g * a.conj()])
}
