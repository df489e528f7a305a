//! Reference state-vector simulator.
//!
//! Gates are applied in place with stride arithmetic over basis indices.
//! [`run_circuit_dense`] multiplies embedded gate matrices instead and exists
//! to cross-check the sparse path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{gate_unitary, Gate, QuantumCircuit, QubitId};
use crate::error::{Error, Result};
use crate::linalg::{c, norm_sqr};

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![c(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = c(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    /// Wrap amplitudes without a normalization check (linearity tests feed
    /// unnormalized vectors through the simulator).
    pub fn from_amplitudes_unchecked(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_amplitudes_unchecked(amplitudes)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Tensor product `self ⊗ other`; `self` supplies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Multiply by the phase that makes the largest-magnitude amplitude real
    /// and positive. The first index within 1e-12 of the maximum wins ties.
    pub fn canonical_phase(mut self) -> Self {
        let max = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self;
        }
        let pivot = self
            .amplitudes
            .iter()
            .find(|a| a.norm() >= max - 1e-12)
            .copied()
            .unwrap();
        let rot = pivot.conj() / pivot.norm();
        for a in &mut self.amplitudes {
            *a *= rot;
        }
        self
    }

    fn bit(&self, q: QubitId) -> usize {
        1 << (self.n_qubits - 1 - q.0)
    }
}

/// Reduced density matrix on a subset of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `tr ρ²`; equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.0
            .iter()
            .zip(self.0.adjoint().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Max-abs distance to `diag(d)`; infinite when the sizes differ.
    pub fn distance_to_diagonal(&self, d: &[f64]) -> f64 {
        if d.len() != self.dim() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (i, &di) in d.iter().enumerate() {
            for j in 0..self.dim() {
                let want = if i == j { di } else { 0.0 };
                worst = worst.max((self.0[(i, j)] - c(want, 0.0)).norm());
            }
        }
        worst
    }
}

fn check_dim(circuit: &QuantumCircuit, input: &StateVector) -> Result<()> {
    if input.n_qubits != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            got: input.n_qubits,
        });
    }
    Ok(())
}

/// Evolve `input` through `circuit` gate by gate.
pub fn run_circuit(circuit: &QuantumCircuit, input: &StateVector) -> Result<StateVector> {
    check_dim(circuit, input)?;
    let mut state = input.clone();
    for gate in circuit.gates() {
        apply_gate(&mut state, gate);
    }
    Ok(state)
}

/// Same contract as [`run_circuit`], via dense embedded gate matrices.
pub fn run_circuit_dense(circuit: &QuantumCircuit, input: &StateVector) -> Result<StateVector> {
    check_dim(circuit, input)?;
    let mut amps = input.amplitudes.clone();
    for gate in circuit.gates() {
        amps = gate_unitary(gate, circuit.n_qubits()).apply(&amps);
    }
    Ok(StateVector {
        n_qubits: input.n_qubits,
        amplitudes: amps,
    })
}

type Mat2 = [[Complex64; 2]; 2];

fn mat2(g: &Gate) -> Mat2 {
    let u = g.local_matrix();
    [[u.get(0, 0), u.get(0, 1)], [u.get(1, 0), u.get(1, 1)]]
}

const PAULI_X: Mat2 = [
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
];

pub fn apply_gate(state: &mut StateVector, gate: &Gate) {
    match *gate {
        Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::Phase(q, _) => {
            let t = state.bit(q);
            apply_controlled(&mut state.amplitudes, 0, t, &mat2(gate));
        }
        Gate::U2 { qubit, .. } => {
            let t = state.bit(qubit);
            apply_controlled(&mut state.amplitudes, 0, t, &mat2(gate));
        }
        Gate::Cnot { control, target } => {
            let (cm, t) = (state.bit(control), state.bit(target));
            apply_controlled(&mut state.amplitudes, cm, t, &PAULI_X);
        }
        Gate::Cz { control, target } => {
            let mask = state.bit(control) | state.bit(target);
            for (i, a) in state.amplitudes.iter_mut().enumerate() {
                if i & mask == mask {
                    *a = -*a;
                }
            }
        }
        Gate::Toffoli { c1, c2, target } => {
            let (cm, t) = (state.bit(c1) | state.bit(c2), state.bit(target));
            apply_controlled(&mut state.amplitudes, cm, t, &PAULI_X);
        }
        Gate::Swap(a, b) => {
            let (ba, bb) = (state.bit(a), state.bit(b));
            apply_controlled_swap(&mut state.amplitudes, 0, ba, bb);
        }
        Gate::Fredkin { control, a, b } => {
            let (cm, ba, bb) = (state.bit(control), state.bit(a), state.bit(b));
            apply_controlled_swap(&mut state.amplitudes, cm, ba, bb);
        }
    }
}

/// Apply `m` to the `target` bit on every basis index where all `controls` bits are set.
fn apply_controlled(amps: &mut [Complex64], controls: usize, target: usize, m: &Mat2) {
    for i in 0..amps.len() {
        if i & target != 0 || i & controls != controls {
            continue;
        }
        let j = i | target;
        let (a0, a1) = (amps[i], amps[j]);
        amps[i] = m[0][0] * a0 + m[0][1] * a1;
        amps[j] = m[1][0] * a0 + m[1][1] * a1;
    }
}

fn apply_controlled_swap(amps: &mut [Complex64], controls: usize, a: usize, b: usize) {
    for i in 0..amps.len() {
        // visit each |..1..0..> / |..0..1..> pair once, from the a-set side
        if i & controls == controls && i & a != 0 && i & b == 0 {
            amps.swap(i, (i & !a) | b);
        }
    }
}

fn validate_selection(state: &StateVector, qubits: &[QubitId]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if q.0 >= state.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q.0,
                n_qubits: state.n_qubits,
            });
        }
        if qubits[..i].contains(q) {
            return Err(Error::RepeatedOperand(q.0));
        }
    }
    Ok(())
}

/// Reduced density matrix on `keep`. Kept qubits retain their relative order
/// (lower index = more significant), whatever order they are listed in.
pub fn partial_trace(state: &StateVector, keep: &[QubitId]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidSelection(
            "partial trace needs at least one kept qubit".into(),
        ));
    }
    validate_selection(state, keep)?;
    let mut kept: Vec<QubitId> = keep.to_vec();
    kept.sort();
    let keep_mask: usize = kept.iter().map(|&q| state.bit(q)).sum();
    let k = kept.len();
    let sub = |idx: usize| -> usize {
        kept.iter()
            .enumerate()
            .map(|(pos, &q)| usize::from(idx & state.bit(q) != 0) << (k - 1 - pos))
            .sum()
    };
    let dim = 1 << k;
    let mut rho = DMatrix::zeros(dim, dim);
    let amps = &state.amplitudes;
    for i in 0..amps.len() {
        for j in 0..amps.len() {
            if i & !keep_mask == j & !keep_mask {
                rho[(sub(i), sub(j))] += amps[i] * amps[j].conj();
            }
        }
    }
    Ok(DensityMatrix(rho))
}

/// Outcome probabilities for measuring `qubits`; index bit order follows the
/// list order (first listed qubit is the most significant outcome bit).
pub fn measurement_probs(state: &StateVector, qubits: &[QubitId]) -> Result<Vec<f64>> {
    validate_selection(state, qubits)?;
    let k = qubits.len();
    let mut probs = vec![0.0; 1 << k];
    for (i, a) in state.amplitudes.iter().enumerate() {
        probs[outcome_index(state, qubits, i)] += a.norm_sqr();
    }
    Ok(probs)
}

fn outcome_index(state: &StateVector, qubits: &[QubitId], basis: usize) -> usize {
    let k = qubits.len();
    qubits
        .iter()
        .enumerate()
        .map(|(pos, &q)| usize::from(basis & state.bit(q) != 0) << (k - 1 - pos))
        .sum()
}

/// Post-measurement state of the unmeasured qubits (ascending order), renormalized
/// and put in canonical phase. `outcome` uses the bit order of [`measurement_probs`].
pub fn conditional_state(
    state: &StateVector,
    measured: &[QubitId],
    outcome: usize,
) -> Result<StateVector> {
    validate_selection(state, measured)?;
    if measured.len() >= state.n_qubits {
        return Err(Error::InvalidSelection(
            "no qubits left after measurement".into(),
        ));
    }
    if outcome >= 1 << measured.len() {
        return Err(Error::InvalidSelection(format!(
            "outcome {outcome} has too many bits"
        )));
    }
    let rest: Vec<QubitId> = (0..state.n_qubits)
        .map(QubitId)
        .filter(|q| !measured.contains(q))
        .collect();
    let r = rest.len();
    let mut amps = vec![c(0.0, 0.0); 1 << r];
    for (i, a) in state.amplitudes.iter().enumerate() {
        if outcome_index(state, measured, i) != outcome {
            continue;
        }
        let idx: usize = rest
            .iter()
            .enumerate()
            .map(|(pos, &q)| usize::from(i & state.bit(q) != 0) << (r - 1 - pos))
            .sum();
        amps[idx] = *a;
    }
    let p = norm_sqr(&amps);
    if p <= 1e-12 {
        return Err(Error::ZeroProbability(p));
    }
    let scale = 1.0 / p.sqrt();
    for a in &mut amps {
        *a *= scale;
    }
    Ok(StateVector {
        n_qubits: r,
        amplitudes: amps,
    }
    .canonical_phase())
}
