mod common;

use std::collections::BTreeSet;

use common::{random_assignment, random_circuit, random_state, random_vector, rng};
use optoqc::compiler::QubitAssignment;
use optoqc::equivalence::compare_circuit_netlist;
use optoqc::linalg::c;
use optoqc::netlist_io::{from_json, to_json};
use optoqc::par::{
    map_batch, map_batch_seq, propagate_batch, propagate_batch_seq, streamed_unitary,
};
use optoqc::scenarios::{TELEPORT_INPUT, TELEPORT_POL, TELEPORT_QC};
use optoqc::{
    compile, conditional_state, device_stats, netlist_unitary, parse_circuit, propagate,
    run_circuit, state_fidelity, CompileOptions, Complex64, ModeAmplitudes, OpticalElement,
    OpticalNetlist, QuantumCircuit, StateVector,
};
use proptest::prelude::*;
use rand::Rng;

fn compiled(
    seed: u64,
    max_n: usize,
    opts: &CompileOptions,
) -> (QuantumCircuit, QubitAssignment, OpticalNetlist) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let circ = random_circuit(&mut r, n, 10);
    let asg = random_assignment(&mut r, n);
    let net = compile(&circ, &asg, opts).unwrap();
    (circ, asg, net)
}

fn relabeled() -> CompileOptions {
    CompileOptions {
        relabel_terminal_crossings: true,
        ..CompileOptions::default()
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn compiled_netlists_are_unitary(seed in any::<u64>()) {
        let (_, _, net) = compiled(seed, 3, &relabeled());
        prop_assert!(netlist_unitary(&net).unwrap().unitarity_error() < 1e-12);
    }

    #[test]
    fn compiler_is_sound_with_relabeling(seed in any::<u64>()) {
        let (circ, asg, net) = compiled(seed, 3, &relabeled());
        let rep = compare_circuit_netlist(&circ.unitary(), &netlist_unitary(&net).unwrap(), &asg, 1e-10).unwrap();
        prop_assert!(rep.pass, "distance {}", rep.distance);
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>()) {
        let (_, _, net) = compiled(seed, 3, &relabeled());
        let text = to_json(&net);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn propagation_is_linear_and_norm_preserving(seed in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let (_, _, net) = compiled(seed, 3, &CompileOptions::default());
        let mut r = rng(seed ^ 0x5eed);
        let dim = net.space.dim();
        let x = random_vector(&mut r, dim);
        let y = random_vector(&mut r, dim);
        let (ka, kb) = (c(a, 0.5), c(0.25, b));
        let mix: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| ka * p + kb * q).collect();
        let run = |v: Vec<Complex64>| propagate(&net, &ModeAmplitudes::unnormalized(net.space, v).unwrap()).unwrap();
        let (ox, oy, om) = (run(x.clone()), run(y), run(mix));
        let expect: Vec<Complex64> =
            ox.amplitudes().iter().zip(oy.amplitudes()).map(|(p, q)| ka * p + kb * q).collect();
        prop_assert!(max_diff(om.amplitudes(), &expect) < 1e-12);
        prop_assert!((ox.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn streamed_and_dense_unitaries_agree(seed in any::<u64>()) {
        let (_, _, net) = compiled(seed, 3, &relabeled());
        let d = streamed_unitary(&net).unwrap().max_abs_diff(&netlist_unitary(&net).unwrap());
        prop_assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn batch_routes_agree(seed in any::<u64>()) {
        let (_, _, net) = compiled(seed, 3, &CompileOptions::default());
        let mut r = rng(seed);
        let inputs: Vec<ModeAmplitudes> = (0..8)
            .map(|_| ModeAmplitudes::new(net.space, random_vector(&mut r, net.space.dim())).unwrap())
            .collect();
        prop_assert_eq!(propagate_batch(&net, &inputs).unwrap(), propagate_batch_seq(&net, &inputs).unwrap());
        let xs: Vec<u64> = (0..100).collect();
        prop_assert_eq!(map_batch(&xs, |x| x * x), map_batch_seq(&xs, |x| x * x));
    }

    #[test]
    fn stats_match_a_direct_scan(seed in any::<u64>()) {
        let (_, _, net) = compiled(seed, 3, &relabeled());
        let st = device_stats(&net);
        let count = |k: &str| net.elements().filter(|e| e.kind() == k).count();
        let bs = net.elements().filter(|e| matches!(e, OpticalElement::BeamSplitter { .. })).count();
        let pbs = net.elements().filter(|e| matches!(e, OpticalElement::Pbs { .. })).count();
        prop_assert_eq!(st.beam_splitters, bs);
        prop_assert_eq!(st.polarizing_beam_splitters, pbs);
        prop_assert_eq!(st.rotators, count(OpticalElement::Rotator { path: 0 }.kind()));
        prop_assert_eq!(st.total_elements(), net.element_count());
    }

    #[test]
    fn pruning_keeps_outputs_for_supported_inputs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (circ, asg, net) = compiled(seed, 3, &relabeled());
        let mode = r.gen_range(0..net.space.dim());
        let opts = CompileOptions { prune: true, input_support: Some(BTreeSet::from([mode])), ..relabeled() };
        let pruned = compile(&circ, &asg, &opts).unwrap();
        prop_assert!(pruned.element_count() <= net.element_count());
        let input = ModeAmplitudes::single(net.space, mode).unwrap();
        let a = propagate(&net, &input).unwrap();
        let b = propagate(&pruned, &input).unwrap();
        prop_assert!(max_diff(a.amplitudes(), b.amplitudes()) < 1e-12);
    }

    #[test]
    fn teleport_circuit_moves_the_input_state(seed in any::<u64>()) {
        let circ = parse_circuit(TELEPORT_QC).unwrap();
        let mut r = rng(seed);
        let psi = random_state(&mut r, 1);
        let input = psi.tensor(&StateVector::basis(2, 0));
        let out = run_circuit(&circ, &input).unwrap();
        for outcome in 0..4 {
            let lam = conditional_state(&out, &[TELEPORT_INPUT, TELEPORT_POL], outcome).unwrap();
            let f = state_fidelity(lam.amplitudes(), psi.amplitudes()).unwrap();
            prop_assert!(f > 1.0 - 1e-10, "outcome {outcome}: fidelity {f}");
        }
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let circ = random_circuit(&mut r, n, 12);
        prop_assert_eq!(parse_circuit(&circ.render()).unwrap(), circ);
    }
}
