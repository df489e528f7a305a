use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use optoqc::linalg::c;
use optoqc::par::{propagate_batch, propagate_batch_seq, streamed_unitary};
use optoqc::{
    compile, netlist_unitary, CompileOptions, Gate, ModeAmplitudes, OpticalNetlist, QuantumCircuit,
    QubitAssignment, QubitId,
};

/// Layered brickwork of H, CNOT and phase gates on `n` qubits, one of them on polarization.
fn brickwork(n: usize, depth: usize) -> OpticalNetlist {
    let mut gates = Vec::new();
    for d in 0..depth {
        for q in 0..n {
            gates.push(Gate::H(QubitId(q)));
            gates.push(Gate::Phase(QubitId(q), 0.1 * (d * n + q) as f64));
        }
        for q in (d % 2..n.saturating_sub(1)).step_by(2) {
            gates.push(Gate::Cnot {
                control: QubitId(q),
                target: QubitId(q + 1),
            });
        }
    }
    let circuit = QuantumCircuit::with_gates(n, gates).unwrap();
    let asg = QubitAssignment::with_pol(n, Some(QubitId(n - 1)));
    compile(&circuit, &asg, &CompileOptions::default()).unwrap()
}

fn inputs(net: &OpticalNetlist, count: usize) -> Vec<ModeAmplitudes> {
    let dim = net.space.dim();
    (0..count)
        .map(|k| {
            let v = (0..dim)
                .map(|m| c(((k * 7 + m * 3) % 11) as f64 + 1.0, (m % 5) as f64))
                .collect();
            ModeAmplitudes::unnormalized(net.space, v).unwrap()
        })
        .collect()
}

fn batch(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("propagate_batch");
    for n in [4, 6, 8] {
        let net = brickwork(n, 6);
        let xs = inputs(&net, 256);
        group.bench_with_input(BenchmarkId::new("sequential", n), &xs, |b, xs| {
            b.iter(|| propagate_batch_seq(black_box(&net), black_box(xs)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &xs, |b, xs| {
            b.iter(|| propagate_batch(black_box(&net), black_box(xs)).unwrap())
        });
    }
    group.finish();
}

fn unitary(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("netlist_unitary");
    group.sample_size(20);
    for n in [4, 6] {
        let net = brickwork(n, 4);
        group.bench_with_input(BenchmarkId::new("streamed", n), &net, |b, net| {
            b.iter(|| streamed_unitary(black_box(net)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dense", n), &net, |b, net| {
            b.iter(|| netlist_unitary(black_box(net)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batch, unitary);
criterion_main!(benches);
