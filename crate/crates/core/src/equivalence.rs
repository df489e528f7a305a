//! Global-phase-insensitive comparison of unitaries and states.

use num_complex::Complex64;

use crate::compiler::QubitAssignment;
use crate::error::{Error, Result};
use crate::linalg::{c, inner, Unitary};

/// Default acceptance threshold for compiled-versus-oracle comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// Max-abs entrywise difference after phase alignment.
    pub distance: f64,
    /// Phase `φ` such that `e^{-iφ}·V ≈ U`.
    pub aligning_phase: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare `u` and `v` modulo one overall phase.
///
/// The phase is taken from `tr(U†V)`; when that trace is below 1e-12 in
/// magnitude it falls back to the largest-magnitude entry of `u`.
pub fn global_phase_distance(
    u: &Unitary,
    v: &Unitary,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let tr = u.adjoint().mul(v).trace();
    let aligning_phase = if tr.norm() >= 1e-12 {
        tr.arg()
    } else {
        let n = u.dim();
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .fold((0, 0), |best, ij| {
                if u.get(ij.0, ij.1).norm() > u.get(best.0, best.1).norm() {
                    ij
                } else {
                    best
                }
            });
        v.get(i, j).arg() - u.get(i, j).arg()
    };
    let distance = u.max_abs_diff(&v.scale(Complex64::cis(-aligning_phase)));
    Ok(EquivalenceReport {
        distance,
        aligning_phase,
        tolerance,
        pass: distance < tolerance,
    })
}

/// `|<u|v>|²` for normalized vectors.
pub fn state_fidelity(u: &[Complex64], v: &[Complex64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(inner(u, v).norm_sqr())
}

/// Mode index of computational basis state `basis` under `assignment`.
pub fn mode_of_basis(assignment: &QubitAssignment, basis: usize) -> usize {
    let n = assignment.n_qubits();
    let bit = |q: crate::QubitId| (basis >> (n - 1 - q.0)) & 1;
    let path = assignment
        .location()
        .iter()
        .fold(0, |acc, &q| (acc << 1) | bit(q));
    match assignment.pol_qubit() {
        Some(p) => path * 2 + bit(p),
        None => path,
    }
}

/// Permutation `P` with `P|x> = |mode(x)>`; then `P·U_circuit·P†` acts on modes.
pub fn basis_bridge(assignment: &QubitAssignment) -> Unitary {
    let dim = 1 << assignment.n_qubits();
    let mut p = Unitary::zeros(dim);
    for x in 0..dim {
        p.set(mode_of_basis(assignment, x), x, c(1.0, 0.0));
    }
    p
}

/// Compare a circuit unitary with a netlist unitary through the basis bridge.
pub fn compare_circuit_netlist(
    circuit_unitary: &Unitary,
    netlist_unitary: &Unitary,
    assignment: &QubitAssignment,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    if circuit_unitary.dim() != netlist_unitary.dim() {
        return Err(Error::DimensionMismatch {
            expected: circuit_unitary.dim(),
            got: netlist_unitary.dim(),
        });
    }
    let p = basis_bridge(assignment);
    if p.dim() != circuit_unitary.dim() {
        return Err(Error::DimensionMismatch {
            expected: circuit_unitary.dim(),
            got: p.dim(),
        });
    }
    let pulled_back = p.adjoint().mul(netlist_unitary).mul(&p);
    global_phase_distance(circuit_unitary, &pulled_back, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, QubitId};
    use std::f64::consts::PI;

    #[test]
    fn identical_and_phased() {
        let h = Gate::H(QubitId(0)).local_matrix();
        let r = global_phase_distance(&h, &h, 1e-12).unwrap();
        assert_eq!(r.distance, 0.0);
        assert!(r.pass);
        let phased = h.scale(Complex64::cis(PI / 7.0));
        let r = global_phase_distance(&h, &phased, 1e-12).unwrap();
        assert!(r.distance < 1e-12);
        assert!((r.aligning_phase - PI / 7.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_versus_x() {
        // tr(H†X) = 2/√2 real: aligned entries differ by 1/√2 - 0 at (0,0)
        let h = Gate::H(QubitId(0)).local_matrix();
        let x = Gate::X(QubitId(0)).local_matrix();
        let r = global_phase_distance(&h, &x, 1e-10).unwrap();
        assert!(r.distance >= 0.5);
        assert!(!r.pass);
    }

    #[test]
    fn traceless_overlap_uses_largest_entry() {
        // tr(I†·Z) = 0
        let i = Unitary::identity(2);
        let z = Gate::Z(QubitId(0)).local_matrix();
        let r = global_phase_distance(&i, &z, 1e-10).unwrap();
        assert!((r.distance - 2.0).abs() < 1e-15);
        let iz = z.scale(c(0.0, 1.0));
        let r = global_phase_distance(&iz, &iz.scale(c(-1.0, 0.0)), 1e-10).unwrap();
        assert!(r.distance < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(
            global_phase_distance(&Unitary::identity(2), &Unitary::identity(4), 1e-10).is_err()
        );
        assert!(state_fidelity(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = [c(1.0, 0.0), c(0.0, 0.0)];
        let one = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(state_fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(state_fidelity(&zero, &one).unwrap(), 0.0);
    }

    #[test]
    fn bridge_for_teleport_assignment() {
        let asg: QubitAssignment = "0,2,pol=1".parse().unwrap();
        assert_eq!(mode_of_basis(&asg, 0b000), 0);
        assert_eq!(mode_of_basis(&asg, 0b010), 1);
        assert_eq!(mode_of_basis(&asg, 0b001), 2);
        assert_eq!(mode_of_basis(&asg, 0b100), 4);
        let p = basis_bridge(&asg);
        assert!(p.unitarity_error() < 1e-15);
        let id = QubitAssignment::with_pol(3, None);
        assert_eq!(basis_bridge(&id), Unitary::identity(8));
    }
}
