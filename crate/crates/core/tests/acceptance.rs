//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::process::ExitCode;
use std::time::Instant;

use common::{haar_u2, random_assignment, random_circuit, random_state, random_vector, rng};
use optoqc::compiler::QubitAssignment;
use optoqc::equivalence::compare_circuit_netlist;
use optoqc::linalg::c;
use optoqc::par::map_batch;
use optoqc::scenarios::{demo_mz, demo_teleport, teleport_netlist};
use optoqc::statevec::run_circuit_dense;
use optoqc::{
    compile, decompose_u2, device_stats, element_unitary, lower_gate, netlist_unitary,
    parse_circuit, prepare_cascade, propagate, prune_dead_paths, run_circuit, CompileOptions, Gate,
    ModeAmplitudes, ModeSpace, OpticalElement, OpticalNetlist, QubitId, Unitary,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn hadamard_assembly() -> Outcome {
    let asg = QubitAssignment::with_pol(1, None);
    let mut net = OpticalNetlist::empty(asg.space());
    net.extend(lower_gate(&Gate::H(QubitId(0)), &asg).map_err(err)?);
    let u = netlist_unitary(&net).map_err(err)?;
    let s = FRAC_1_SQRT_2;
    let h = Unitary::from_rows(2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
    let d = u.max_abs_diff(&h);
    check(
        d < 1e-12,
        format!(
            "{} elements, entrywise deviation {d:.2e}",
            net.element_count()
        ),
    )
}

fn splitter_square() -> Outcome {
    let space = ModeSpace::new(1, false);
    let bs = element_unitary(
        &OpticalElement::BeamSplitter {
            paths: [0, 1],
            theta: FRAC_PI_4,
        },
        &space,
    )
    .map_err(err)?;
    let ix = Unitary::from_rows(2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let d = bs.mul(&bs).max_abs_diff(&ix);
    check(d < 1e-12, format!("|BS(π/4)² - iX| = {d:.2e}"))
}

fn balanced_mz() -> Outcome {
    let r = demo_mz(false).map_err(err)?;
    let p0 = r.ports[0].1;
    check((p0 - 1.0).abs() < 1e-10, format!("P(port 0) = {p0:.12}"))
}

fn which_path() -> Outcome {
    let r = demo_mz(true).map_err(err)?;
    let (p0, p1) = (r.ports[0].1, r.ports[1].1);
    let rho = r.location_density.as_ref().ok_or("no density matrix")?;
    let d = rho.distance_to_diagonal(&[0.5, 0.5]);
    check(
        (p0 - 0.5).abs() < 1e-10 && (p1 - 0.5).abs() < 1e-10 && d < 1e-10,
        format!("ports {p0:.12}/{p1:.12}, |ρ - diag(1/2,1/2)| = {d:.2e}"),
    )
}

fn teleportation() -> Outcome {
    let mut r = rng(5);
    let (mut worst_p, mut worst_f) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let v = random_vector(&mut r, 2);
        let rep = demo_teleport(v[0], v[1]).map_err(err)?;
        if rep.branches.len() != 4 {
            return Err(format!("{} branches", rep.branches.len()));
        }
        for b in &rep.branches {
            worst_p = worst_p.max((b.probability - 0.25).abs());
            worst_f = worst_f.max(1.0 - b.fidelity);
        }
    }
    check(
        worst_p < 1e-10 && worst_f <= 1e-10,
        format!("50 inputs: max |p - 1/4| = {worst_p:.2e}, max infidelity = {worst_f:.2e}"),
    )
}

fn dark_ports() -> Outcome {
    let rep = demo_teleport(c(1.0, 0.0), c(0.0, 0.0)).map_err(err)?;
    let d = rep.dark_probability.ok_or("no dark-port probability")?;
    check(d < 1e-12, format!("dark-port probability {d:.2e}"))
}

fn device_count() -> Outcome {
    let (_, _, pruned) = teleport_netlist(true).map_err(err)?;
    let (_, _, full) = teleport_netlist(false).map_err(err)?;
    let (p, f) = (device_stats(&pruned), device_stats(&full));
    check(
        p.beam_splitters == 7 && p.polarizing_beam_splitters == 2 && f.splitting_elements() == 10,
        format!(
            "pruned {} BS + {} PBS = {}, unpruned {}",
            p.beam_splitters,
            p.polarizing_beam_splitters,
            p.splitting_elements(),
            f.splitting_elements()
        ),
    )
}

fn splitter_scaling() -> Outcome {
    let mut r = rng(8);
    let mut counts = Vec::new();
    let mut ok = true;
    for n in 1..=4 {
        let space = ModeSpace::new(n, false);
        let target = random_vector(&mut r, 1 << n);
        let mut net = OpticalNetlist::empty(space);
        net.extend(prepare_cascade(space, &target).map_err(err)?);
        let splitters = device_stats(&net).splitting_elements();
        let out = propagate(&net, &ModeAmplitudes::single(space, 0).map_err(err)?).map_err(err)?;
        let miss = out
            .amplitudes()
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        ok &= splitters == (1 << n) - 1 && miss < 1e-12;
        counts.push(splitters.to_string());
    }
    let circuit = parse_circuit(optoqc::scenarios::TELEPORT_QC).map_err(err)?;
    let with_pol = QubitAssignment::from_circuit(&circuit);
    let all_loc = QubitAssignment::with_pol(3, None);
    let opts = CompileOptions::default();
    let a = device_stats(&compile(&circuit, &with_pol, &opts).map_err(err)?).paths;
    let b = device_stats(&compile(&circuit, &all_loc, &opts).map_err(err)?).paths;
    ok &= a == 4 && b == 8;
    check(
        ok,
        format!(
            "cascade splitters [{}] for n=1..4, paths {a} vs {b}",
            counts.join(", ")
        ),
    )
}

fn soundness_sweep() -> Outcome {
    let start = Instant::now();
    let mut r = rng(9);
    let cases: Vec<_> = (0..200)
        .map(|_| {
            let n = r.gen_range(1..=3);
            (random_circuit(&mut r, n, 10), random_assignment(&mut r, n))
        })
        .collect();
    let distances = map_batch(&cases, |(circ, asg)| -> Result<f64, String> {
        let net = compile(circ, asg, &CompileOptions::default()).map_err(err)?;
        let rep = compare_circuit_netlist(
            &circ.unitary(),
            &netlist_unitary(&net).map_err(err)?,
            asg,
            1e-10,
        )
        .map_err(err)?;
        Ok(rep.distance)
    });
    let worst = distances
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-10 && secs < 30.0,
        format!("200 circuits: max distance {worst:.2e} in {secs:.2} s"),
    )
}

fn pruning_safety() -> Outcome {
    let mut r = rng(10);
    let (mut worst, mut shrunk) = (0.0f64, 0);
    for _ in 0..100 {
        let n = r.gen_range(1..=3);
        let circ = random_circuit(&mut r, n, 10);
        let asg = random_assignment(&mut r, n);
        let net = compile(&circ, &asg, &CompileOptions::default()).map_err(err)?;
        let dim = net.space.dim();
        let k = r.gen_range(1..=dim);
        let support: BTreeSet<usize> = rand::seq::index::sample(&mut r, dim, k)
            .into_iter()
            .collect();
        let pruned = prune_dead_paths(&net, &support).map_err(err)?;
        shrunk += usize::from(pruned.element_count() < net.element_count());
        let amps = random_vector(&mut r, support.len());
        let mut input = vec![c(0.0, 0.0); dim];
        for (m, a) in support.iter().zip(amps) {
            input[*m] = a;
        }
        let input = ModeAmplitudes::new(net.space, input).map_err(err)?;
        let a = propagate(&net, &input).map_err(err)?;
        let b = propagate(&pruned, &input).map_err(err)?;
        let d = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    // a sweep where nothing was ever pruned would prove nothing
    check(
        worst < 1e-12 && shrunk > 0,
        format!("100 pairs ({shrunk} netlists shrank): max deviation {worst:.2e}"),
    )
}

fn u2_round_trip() -> Outcome {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = haar_u2(&mut r);
        let d = decompose_u2(&u).map_err(err)?;
        worst = worst.max(d.matrix().max_abs_diff(&u));
    }
    check(
        worst < 1e-10,
        format!("100 Haar matrices: max reconstruction error {worst:.2e}"),
    )
}

fn oracle_cross_check() -> Outcome {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.gen_range(1..=4);
        let circ = random_circuit(&mut r, n, 12);
        let input = random_state(&mut r, n);
        let a = run_circuit(&circ, &input).map_err(err)?;
        let b = run_circuit_dense(&circ, &input).map_err(err)?;
        let d = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    check(
        worst < 1e-12,
        format!("100 circuits: max deviation {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("hadamard assembly", hadamard_assembly),
        ("splitter square is iX", splitter_square),
        ("balanced mach-zehnder", balanced_mz),
        ("which-path marking", which_path),
        ("teleportation correctness", teleportation),
        ("dark ports", dark_ports),
        ("teleport device count", device_count),
        ("splitter scaling", splitter_scaling),
        ("compiler soundness sweep", soundness_sweep),
        ("pruning safety", pruning_safety),
        ("u2 decomposition round trip", u2_round_trip),
        ("oracle cross-check", oracle_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
