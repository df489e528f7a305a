//! Compile small quantum circuits into single-photon linear-optical networks.
//!
//! Several qubits ride on one photon: location qubits select one of `2^n`
//! paths and one optional qubit is carried by polarization. Gates lower to
//! beam splitters, phase shifters, polarization rotators, polarizing beam
//! splitters and path crossings. Every compiled network can be checked
//! against the reference state-vector simulator modulo a global phase.
//!
//! ```
//! use optoqc::{compile, netlist_unitary, parse_circuit, CompileOptions, QubitAssignment};
//! use optoqc::equivalence::compare_circuit_netlist;
//!
//! let circuit = parse_circuit("qubits 2\npol 1\nh 0\ncnot 0 1\nh 0").unwrap();
//! let assignment = QubitAssignment::from_circuit(&circuit);
//! let net = compile(&circuit, &assignment, &CompileOptions::default()).unwrap();
//! let report = compare_circuit_netlist(
//!     &circuit.unitary(), &netlist_unitary(&net).unwrap(), &assignment, 1e-10).unwrap();
//! assert!(report.pass);
//! ```

pub mod circuit;
pub mod compiler;
pub mod diagram;
pub mod equivalence;
mod error;
pub mod linalg;
pub mod netlist_io;
pub mod optics;
pub mod par;
pub mod scenarios;
pub mod statevec;

pub use circuit::{gate_unitary, parse_circuit, u2_from_params, Gate, QuantumCircuit, QubitId};
pub use compiler::{
    compile, decompose_u2, device_stats, lower_gate, prepare_cascade, prepare_location_state,
    prune_dead_paths, CompileOptions, DeviceStats, QubitAssignment, U2Decomposition,
};
pub use equivalence::{basis_bridge, global_phase_distance, state_fidelity, EquivalenceReport};
pub use error::{Error, Result};
pub use linalg::Unitary;
pub use num_complex::Complex64;
pub use optics::{
    element_unitary, mode_of, netlist_unitary, propagate, ModeAmplitudes, ModeSpace,
    OpticalElement, OpticalNetlist, Pol, PolFilter,
};
pub use statevec::{
    conditional_state, measurement_probs, partial_trace, run_circuit, DensityMatrix, StateVector,
};
