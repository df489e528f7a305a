//! Lowering of logical circuits onto single-photon optical netlists.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{Gate, QuantumCircuit, QubitId};
use crate::error::{Error, Result};
use crate::linalg::{c, wrap_angle, Unitary};
use crate::optics::{
    Layer, ModeSpace, NetlistMeta, OpticalElement, OpticalNetlist, PlacedElement, PolFilter,
};

/// Phases below this magnitude are dropped instead of emitting a phase shifter.
const PHASE_EPS: f64 = 1e-15;

/// How logical qubits map onto the photon: location qubits pick path bits
/// (position 0 most significant), at most one qubit rides on polarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitAssignment {
    n_qubits: usize,
    pol_qubit: Option<QubitId>,
    location: Vec<QubitId>,
}

impl QubitAssignment {
    pub fn new(
        n_qubits: usize,
        pol_qubit: Option<QubitId>,
        location: Vec<QubitId>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidAssignment(m));
        let mut seen = BTreeSet::new();
        for q in location.iter().chain(pol_qubit.iter()) {
            if q.0 >= n_qubits {
                return bad(format!("qubit {q} out of range for {n_qubits} qubits"));
            }
            if !seen.insert(*q) {
                return bad(format!("qubit {q} assigned twice"));
            }
        }
        if seen.len() != n_qubits {
            return bad(format!("{} of {n_qubits} qubits assigned", seen.len()));
        }
        Ok(QubitAssignment {
            n_qubits,
            pol_qubit,
            location,
        })
    }

    /// Location qubits in ascending order, polarization as marked by the circuit.
    pub fn from_circuit(circuit: &QuantumCircuit) -> Self {
        Self::with_pol(circuit.n_qubits(), circuit.pol_qubit())
    }

    pub fn with_pol(n_qubits: usize, pol_qubit: Option<QubitId>) -> Self {
        let location = (0..n_qubits)
            .map(QubitId)
            .filter(|q| Some(*q) != pol_qubit)
            .collect();
        QubitAssignment {
            n_qubits,
            pol_qubit,
            location,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn pol_qubit(&self) -> Option<QubitId> {
        self.pol_qubit
    }

    pub fn location(&self) -> &[QubitId] {
        &self.location
    }

    pub fn space(&self) -> ModeSpace {
        ModeSpace::new(self.location.len(), self.pol_qubit.is_some())
    }

    pub fn is_pol(&self, q: QubitId) -> bool {
        self.pol_qubit == Some(q)
    }

    /// Path-bit mask of a location qubit.
    fn loc_mask(&self, q: QubitId) -> Result<usize> {
        let k = self.location.iter().position(|&l| l == q).ok_or_else(|| {
            Error::InvalidAssignment(format!("qubit {q} is not a location qubit"))
        })?;
        Ok(self.space().path_bit(k))
    }

    fn check(&self, q: QubitId) -> Result<()> {
        if q.0 >= self.n_qubits {
            return Err(Error::InvalidAssignment(format!(
                "qubit {q} not covered by assignment"
            )));
        }
        Ok(())
    }
}

/// Comma-separated location qubits in path-bit order plus an optional `pol=<q>`,
/// e.g. `0,2,pol=1`. The qubit count is inferred from the entries.
impl FromStr for QubitAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pol = None;
        let mut location = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let parse = |v: &str| {
                v.parse::<usize>()
                    .map(QubitId)
                    .map_err(|_| Error::InvalidAssignment(format!("bad qubit `{v}`")))
            };
            if let Some(v) = item.strip_prefix("pol=") {
                if pol.replace(parse(v)?).is_some() {
                    return Err(Error::InvalidAssignment(
                        "at most one polarization qubit".into(),
                    ));
                }
            } else {
                location.push(parse(item)?);
            }
        }
        let n = location.len() + usize::from(pol.is_some());
        QubitAssignment::new(n, pol, location)
    }
}

impl fmt::Display for QubitAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.location.iter().map(|q| q.to_string()).collect();
        if let Some(p) = self.pol_qubit {
            parts.push(format!("pol={p}"));
        }
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompileOptions {
    pub prune: bool,
    /// Modes that may carry amplitude at the input; required when `prune` is set.
    pub input_support: Option<BTreeSet<usize>>,
    pub relabel_terminal_crossings: bool,
}

/// Phases and splitting angle with
/// `U = diag(e^{i·out_a}, e^{i·out_b}) · BS(θ) · diag(e^{i·in_a}, e^{i·in_b})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U2Decomposition {
    pub in_a: f64,
    pub in_b: f64,
    pub theta: f64,
    pub out_a: f64,
    pub out_b: f64,
}

impl U2Decomposition {
    pub fn matrix(&self) -> Unitary {
        let (s, co) = self.theta.sin_cos();
        let e = Complex64::cis;
        let i = c(0.0, 1.0);
        Unitary::from_rows(
            2,
            &[
                e(self.out_a + self.in_a) * co,
                i * e(self.out_a + self.in_b) * s,
                i * e(self.out_b + self.in_a) * s,
                e(self.out_b + self.in_b) * co,
            ],
        )
    }
}

/// Factor a 2×2 unitary into input phases, one splitter and output phases.
///
/// The input phase on port `a` is always zero; this removes the one gauge
/// freedom of the factorization. Diagonal input gives `θ = 0` and no input
/// phases, so the identity decomposes to all zeros.
pub fn decompose_u2(u: &Unitary) -> Result<U2Decomposition> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: u.dim(),
        });
    }
    let err = u.unitarity_error();
    if err > 1e-10 {
        return Err(Error::NotUnitary(err));
    }
    let (u00, u01, u10, u11) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
    let co = u00.norm();
    let s = u10.norm();
    let theta = s.atan2(co);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (out_a, in_b, out_b) = if co >= s {
        let out_a = u00.arg();
        if s == 0.0 {
            (out_a, 0.0, u11.arg())
        } else {
            let in_b = u01.arg() - half_pi - out_a;
            (out_a, in_b, u11.arg() - in_b)
        }
    } else {
        let out_b = u10.arg() - half_pi;
        if co == 0.0 {
            (u01.arg() - half_pi, 0.0, out_b)
        } else {
            (u00.arg(), u11.arg() - out_b, out_b)
        }
    };
    Ok(U2Decomposition {
        in_a: 0.0,
        in_b: wrap_angle(in_b),
        theta,
        out_a: wrap_angle(out_a),
        out_b: wrap_angle(out_b),
    })
}

/// Counts of optical elements by kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DeviceStats {
    pub beam_splitters: usize,
    pub polarizing_beam_splitters: usize,
    pub phase_shifters: usize,
    pub rotators: usize,
    pub wave_plates: usize,
    pub crossings: usize,
    pub layers: usize,
    pub paths: usize,
    pub modes: usize,
    pub relabeled_outputs: bool,
}

impl DeviceStats {
    /// Beam splitters plus polarizing beam splitters.
    pub fn splitting_elements(&self) -> usize {
        self.beam_splitters + self.polarizing_beam_splitters
    }

    pub fn total_elements(&self) -> usize {
        self.splitting_elements()
            + self.phase_shifters
            + self.rotators
            + self.wave_plates
            + self.crossings
    }
}

impl fmt::Display for DeviceStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "paths                      {}", self.paths)?;
        writeln!(f, "modes                      {}", self.modes)?;
        writeln!(f, "layers                     {}", self.layers)?;
        writeln!(f, "beam splitters             {}", self.beam_splitters)?;
        writeln!(
            f,
            "polarizing beam splitters  {}",
            self.polarizing_beam_splitters
        )?;
        writeln!(
            f,
            "splitting elements         {}",
            self.splitting_elements()
        )?;
        writeln!(f, "phase shifters             {}", self.phase_shifters)?;
        writeln!(f, "rotators                   {}", self.rotators)?;
        writeln!(f, "wave plates                {}", self.wave_plates)?;
        writeln!(f, "crossings                  {}", self.crossings)?;
        write!(
            f,
            "output relabeling          {}",
            if self.relabeled_outputs { "yes" } else { "no" }
        )
    }
}

pub fn device_stats(net: &OpticalNetlist) -> DeviceStats {
    let mut st = DeviceStats {
        layers: net.layers.len(),
        paths: net.space.n_paths(),
        modes: net.space.dim(),
        relabeled_outputs: net.output_relabel.is_some(),
        ..DeviceStats::default()
    };
    for e in net.elements() {
        match e {
            OpticalElement::BeamSplitter { .. } => st.beam_splitters += 1,
            OpticalElement::Pbs { .. } => st.polarizing_beam_splitters += 1,
            OpticalElement::PhaseShifter { .. } => st.phase_shifters += 1,
            OpticalElement::Rotator { .. } => st.rotators += 1,
            OpticalElement::WavePlate { .. } => st.wave_plates += 1,
            OpticalElement::Crossing { .. } => st.crossings += 1,
        }
    }
    st
}

fn is_pauli_x(u: &Unitary) -> bool {
    let (zero, one) = (c(0.0, 0.0), c(1.0, 0.0));
    u.get(0, 0) == zero && u.get(1, 1) == zero && u.get(0, 1) == one && u.get(1, 0) == one
}

fn pauli_x() -> Unitary {
    Gate::X(QubitId(0)).local_matrix()
}

fn pauli_z() -> Unitary {
    Gate::Z(QubitId(0)).local_matrix()
}

/// Elementary lowering steps; every gate expands to a short sequence of these.
enum Step {
    /// 2×2 unitary on `target`, applied where all location `controls` are 1.
    Controlled {
        target: QubitId,
        u: Unitary,
        controls: Vec<QubitId>,
    },
    /// Polarization-controlled flip of location `target`, restricted to paths
    /// where all location `controls` are 1.
    PolControlledX {
        target: QubitId,
        controls: Vec<QubitId>,
    },
    /// Path permutation among location qubits.
    Permute(Vec<usize>),
}

struct Lowering<'a> {
    asg: &'a QubitAssignment,
    space: ModeSpace,
    source: Option<usize>,
}

impl Lowering<'_> {
    fn place(&self, e: OpticalElement) -> PlacedElement {
        PlacedElement::new(e, self.source)
    }

    fn control_mask(&self, controls: &[QubitId]) -> Result<usize> {
        controls
            .iter()
            .try_fold(0, |acc, &q| Ok(acc | self.asg.loc_mask(q)?))
    }

    fn satisfying_paths(&self, controls: &[QubitId]) -> Result<Vec<usize>> {
        let mask = self.control_mask(controls)?;
        Ok((0..self.space.n_paths())
            .filter(|p| p & mask == mask)
            .collect())
    }

    /// Steps for one gate. `Cx` with a polarization control becomes a PBS step;
    /// everything else is a controlled 2×2 or a path permutation.
    fn steps(&self, gate: &Gate) -> Result<Vec<Step>> {
        for q in gate.qubits() {
            self.asg.check(q)?;
        }
        let pol = |q: QubitId| self.asg.is_pol(q);
        let single = |target, u| Step::Controlled {
            target,
            u,
            controls: vec![],
        };
        let cx = |ctl: QubitId, tgt: QubitId| -> Result<Step> {
            if pol(ctl) {
                Ok(Step::PolControlledX {
                    target: tgt,
                    controls: vec![],
                })
            } else if pol(tgt) {
                Ok(Step::Controlled {
                    target: tgt,
                    u: pauli_x(),
                    controls: vec![ctl],
                })
            } else {
                Ok(Step::Permute(self.flip_map(tgt, &[ctl])?))
            }
        };
        Ok(match *gate {
            Gate::H(q)
            | Gate::X(q)
            | Gate::Z(q)
            | Gate::S(q)
            | Gate::Phase(q, _)
            | Gate::U2 { qubit: q, .. } => {
                let u = gate.local_matrix();
                if !pol(q) && is_pauli_x(&u) {
                    vec![Step::Permute(self.flip_map(q, &[])?)]
                } else {
                    vec![single(q, u)]
                }
            }
            Gate::Cnot { control, target } => vec![cx(control, target)?],
            Gate::Cz { control, target } => {
                // symmetric: keep the polarization operand (if any) as target
                let (ctl, tgt) = if pol(control) {
                    (target, control)
                } else {
                    (control, target)
                };
                vec![Step::Controlled {
                    target: tgt,
                    u: pauli_z(),
                    controls: vec![ctl],
                }]
            }
            Gate::Toffoli { c1, c2, target } => {
                if pol(c1) || pol(c2) {
                    let loc_ctl = if pol(c1) { c2 } else { c1 };
                    vec![Step::PolControlledX {
                        target,
                        controls: vec![loc_ctl],
                    }]
                } else if pol(target) {
                    vec![Step::Controlled {
                        target,
                        u: pauli_x(),
                        controls: vec![c1, c2],
                    }]
                } else {
                    vec![Step::Permute(self.flip_map(target, &[c1, c2])?)]
                }
            }
            Gate::Swap(a, b) => {
                if pol(a) || pol(b) {
                    vec![cx(a, b)?, cx(b, a)?, cx(a, b)?]
                } else {
                    vec![Step::Permute(self.swap_map(a, b, &[])?)]
                }
            }
            Gate::Fredkin { control, a, b } => {
                if pol(control) || pol(a) || pol(b) {
                    let toffoli = Gate::Toffoli {
                        c1: control,
                        c2: a,
                        target: b,
                    };
                    let mut steps = vec![cx(b, a)?];
                    steps.extend(self.steps(&toffoli)?);
                    steps.push(cx(b, a)?);
                    steps
                } else {
                    vec![Step::Permute(self.swap_map(a, b, &[control])?)]
                }
            }
        })
    }

    fn flip_map(&self, target: QubitId, controls: &[QubitId]) -> Result<Vec<usize>> {
        let t = self.asg.loc_mask(target)?;
        let mask = self.control_mask(controls)?;
        Ok((0..self.space.n_paths())
            .map(|p| if p & mask == mask { p ^ t } else { p })
            .collect())
    }

    fn swap_map(&self, a: QubitId, b: QubitId, controls: &[QubitId]) -> Result<Vec<usize>> {
        let (ma, mb) = (self.asg.loc_mask(a)?, self.asg.loc_mask(b)?);
        let mask = self.control_mask(controls)?;
        Ok((0..self.space.n_paths())
            .map(|p| {
                let differ = (p & ma != 0) != (p & mb != 0);
                if p & mask == mask && differ {
                    p ^ ma ^ mb
                } else {
                    p
                }
            })
            .collect())
    }

    fn lower_step(&self, step: Step) -> Result<Vec<Layer>> {
        match step {
            Step::Permute(map) => {
                if map.iter().enumerate().all(|(p, &q)| p == q) {
                    return Ok(vec![]);
                }
                Ok(vec![vec![self.place(OpticalElement::Crossing { map })]])
            }
            Step::PolControlledX { target, controls } => {
                let t = self.asg.loc_mask(target)?;
                let pairs: Vec<(usize, usize)> = self
                    .satisfying_paths(&controls)?
                    .into_iter()
                    .filter(|p| p & t == 0)
                    .map(|p| (p, p | t))
                    .collect();
                let pbs = pairs
                    .iter()
                    .map(|&(a, b)| self.place(OpticalElement::Pbs { paths: [a, b] }))
                    .collect();
                // PBS reflection carries i on V; trim it back to a plain flip
                let trim = pairs
                    .iter()
                    .flat_map(|&(a, b)| [a, b])
                    .map(|p| {
                        self.place(OpticalElement::PhaseShifter {
                            path: p,
                            pol: PolFilter::V,
                            phi: -std::f64::consts::FRAC_PI_2,
                        })
                    })
                    .collect();
                Ok(vec![pbs, trim])
            }
            Step::Controlled {
                target,
                u,
                controls,
            } => {
                let paths = self.satisfying_paths(&controls)?;
                if self.asg.is_pol(target) {
                    self.lower_pol_u2(&paths, &u)
                } else {
                    let t = self.asg.loc_mask(target)?;
                    let pairs: Vec<(usize, usize)> = paths
                        .into_iter()
                        .filter(|p| p & t == 0)
                        .map(|p| (p, p | t))
                        .collect();
                    self.lower_path_u2(&pairs, &u)
                }
            }
        }
    }

    /// U(2) across each path pair: phase shifters, splitter, phase shifters.
    fn lower_path_u2(&self, pairs: &[(usize, usize)], u: &Unitary) -> Result<Vec<Layer>> {
        let d = decompose_u2(u)?;
        let ps = |path, phi: f64| {
            (phi.abs() > PHASE_EPS).then(|| {
                self.place(OpticalElement::PhaseShifter {
                    path,
                    pol: self.both(),
                    phi,
                })
            })
        };
        let input = pairs
            .iter()
            .flat_map(|&(a, b)| [ps(a, d.in_a), ps(b, d.in_b)])
            .flatten()
            .collect();
        let split = if d.theta.abs() > PHASE_EPS {
            pairs
                .iter()
                .map(|&(a, b)| {
                    self.place(OpticalElement::BeamSplitter {
                        paths: [a, b],
                        theta: d.theta,
                    })
                })
                .collect()
        } else {
            vec![]
        };
        let output = pairs
            .iter()
            .flat_map(|&(a, b)| [ps(a, d.out_a), ps(b, d.out_b)])
            .flatten()
            .collect();
        Ok(vec![input, split, output])
    }

    /// U(2) on the polarization of each listed path.
    fn lower_pol_u2(&self, paths: &[usize], u: &Unitary) -> Result<Vec<Layer>> {
        if is_pauli_x(u) {
            return Ok(vec![paths
                .iter()
                .map(|&path| self.place(OpticalElement::Rotator { path }))
                .collect()]);
        }
        let d = decompose_u2(u)?;
        let ps = |path, pol, phi: f64| {
            (phi.abs() > PHASE_EPS)
                .then(|| self.place(OpticalElement::PhaseShifter { path, pol, phi }))
        };
        let input = paths
            .iter()
            .flat_map(|&p| [ps(p, PolFilter::H, d.in_a), ps(p, PolFilter::V, d.in_b)])
            .flatten()
            .collect();
        let plate = if d.theta.abs() > PHASE_EPS {
            paths
                .iter()
                .map(|&path| {
                    self.place(OpticalElement::WavePlate {
                        path,
                        theta: d.theta,
                    })
                })
                .collect()
        } else {
            vec![]
        };
        let output = paths
            .iter()
            .flat_map(|&p| [ps(p, PolFilter::H, d.out_a), ps(p, PolFilter::V, d.out_b)])
            .flatten()
            .collect();
        Ok(vec![input, plate, output])
    }

    fn both(&self) -> PolFilter {
        PolFilter::Both
    }
}

/// Lower one gate to layers whose product equals the gate (in the mode basis
/// of `assignment`) up to a global phase.
pub fn lower_gate(gate: &Gate, assignment: &QubitAssignment) -> Result<Vec<Layer>> {
    lower_gate_tagged(gate, assignment, None)
}

fn lower_gate_tagged(
    gate: &Gate,
    assignment: &QubitAssignment,
    source: Option<usize>,
) -> Result<Vec<Layer>> {
    gate.validate(assignment.n_qubits())?;
    let low = Lowering {
        asg: assignment,
        space: assignment.space(),
        source,
    };
    let mut layers = Vec::new();
    for step in low.steps(gate)? {
        layers.extend(low.lower_step(step)?);
    }
    layers.retain(|l| !l.is_empty());
    Ok(layers)
}

/// Translate a circuit into an optical netlist.
pub fn compile(
    circuit: &QuantumCircuit,
    assignment: &QubitAssignment,
    opts: &CompileOptions,
) -> Result<OpticalNetlist> {
    if assignment.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            got: assignment.n_qubits(),
        });
    }
    let space = assignment.space();
    let mut net = OpticalNetlist::empty(space);
    net.meta = NetlistMeta {
        gates: circuit.gates().iter().map(ToString::to_string).collect(),
        assignment: Some(assignment.clone()),
    };
    for (i, gate) in circuit.gates().iter().enumerate() {
        net.extend(lower_gate_tagged(gate, assignment, Some(i))?);
    }
    cancel_rotator_pairs(&mut net);
    compact_layers(&mut net);
    if opts.relabel_terminal_crossings {
        absorb_terminal_crossings(&mut net);
    }
    if opts.prune {
        let support = opts
            .input_support
            .as_ref()
            .ok_or_else(|| Error::InvalidMode("pruning needs an input support".into()))?;
        net = prune_dead_paths(&net, support)?;
    } else if let Some(s) = &opts.input_support {
        if s.is_empty() {
            return Err(Error::InvalidMode("empty input support".into()));
        }
    }
    Ok(net)
}

fn overlaps(space: &ModeSpace, a: &OpticalElement, b: &OpticalElement) -> bool {
    let ma = a.modes(space);
    b.modes(space).iter().any(|m| ma.contains(m))
}

/// Remove pairs of rotators on the same path with nothing in between on that path.
pub fn cancel_rotator_pairs(net: &mut OpticalNetlist) {
    let space = net.space;
    let mut flat: Vec<(usize, PlacedElement)> = net
        .layers
        .drain(..)
        .enumerate()
        .flat_map(|(li, l)| l.into_iter().map(move |e| (li, e)))
        .collect();
    'scan: loop {
        for i in 0..flat.len() {
            let OpticalElement::Rotator { path } = flat[i].1.element else {
                continue;
            };
            let next = (i + 1..flat.len())
                .find(|&j| overlaps(&space, &flat[i].1.element, &flat[j].1.element));
            if let Some(j) = next {
                if flat[j].1.element == (OpticalElement::Rotator { path }) {
                    flat.remove(j);
                    flat.remove(i);
                    continue 'scan;
                }
            }
        }
        break;
    }
    let n_layers = flat.iter().map(|(li, _)| li + 1).max().unwrap_or(0);
    let mut layers: Vec<Layer> = vec![Vec::new(); n_layers];
    for (li, e) in flat {
        layers[li].push(e);
    }
    net.layers = layers.into_iter().filter(|l| !l.is_empty()).collect();
}

/// Move every element into the earliest layer after all earlier elements it
/// shares a mode with. Elements on disjoint modes commute, so the product is unchanged.
pub fn compact_layers(net: &mut OpticalNetlist) {
    let space = net.space;
    let mut frontier = vec![0usize; space.dim()];
    let mut layers: Vec<Layer> = Vec::new();
    for placed in net.layers.drain(..).flatten() {
        let modes = placed.element.modes(&space);
        let slot = modes.iter().map(|&m| frontier[m]).max().unwrap_or(0);
        if slot == layers.len() {
            layers.push(Vec::new());
        }
        layers[slot].push(placed);
        for m in modes {
            frontier[m] = slot + 1;
        }
    }
    net.layers = layers;
}

/// Fold crossings that no later element touches into the output relabeling.
pub fn absorb_terminal_crossings(net: &mut OpticalNetlist) {
    let space = net.space;
    let n = space.n_paths();
    let mut relabel: Vec<usize> = net
        .output_relabel
        .take()
        .unwrap_or_else(|| (0..n).collect());
    let mut kept_after: Vec<OpticalElement> = Vec::new();
    for li in (0..net.layers.len()).rev() {
        let layer = std::mem::take(&mut net.layers[li]);
        let mut keep = Vec::new();
        for placed in layer.into_iter().rev() {
            let terminal = matches!(placed.element, OpticalElement::Crossing { .. })
                && !kept_after
                    .iter()
                    .any(|k| overlaps(&space, k, &placed.element));
            match placed.element {
                OpticalElement::Crossing { ref map } if terminal => {
                    relabel = map.iter().map(|&q| relabel[q]).collect();
                }
                _ => {
                    kept_after.push(placed.element.clone());
                    keep.push(placed);
                }
            }
        }
        keep.reverse();
        net.layers[li] = keep;
    }
    net.layers.retain(|l| !l.is_empty());
    if relabel.iter().enumerate().any(|(p, &q)| p != q) {
        net.output_relabel = Some(relabel);
    }
}

/// Drop elements that only ever see zero amplitude when light enters on `input_support`.
///
/// Liveness is propagated forward as a set of possibly-nonzero modes: any
/// element touching a live mode is kept and makes all its modes live, a
/// crossing moves liveness along its permutation.
pub fn prune_dead_paths(
    net: &OpticalNetlist,
    input_support: &BTreeSet<usize>,
) -> Result<OpticalNetlist> {
    if input_support.is_empty() {
        return Err(Error::InvalidMode("empty input support".into()));
    }
    let space = net.space;
    if let Some(&m) = input_support.iter().find(|&&m| m >= space.dim()) {
        return Err(Error::InvalidMode(format!(
            "support mode {m} out of range for {} modes",
            space.dim()
        )));
    }
    let mut live = vec![false; space.dim()];
    for &m in input_support {
        live[m] = true;
    }
    let mut out = net.clone();
    for layer in &mut out.layers {
        layer.retain(|placed| {
            let modes = placed.element.modes(&space);
            if !modes.iter().any(|&m| live[m]) {
                return false;
            }
            match &placed.element {
                OpticalElement::Crossing { map } => {
                    let before = live.clone();
                    for (p, &q) in map.iter().enumerate() {
                        for pol in 0..space.pols() {
                            live[q * space.pols() + pol] = before[p * space.pols() + pol];
                        }
                    }
                }
                _ => modes.iter().for_each(|&m| live[m] = true),
            }
            true
        });
    }
    out.layers.retain(|l| !l.is_empty());
    Ok(out)
}

/// Layers turning light on the `qubit = 0` path of every pair into `a|0> + b|1>`.
///
/// The completing unitary is the reflection `[[a, b*], [b, -a*]]`, which is the
/// Hadamard for `a = b = 1/√2`; for `b = 0` it is `diag(a, a*)` so that `(1, 0)`
/// needs no element at all.
pub fn prepare_location_state(
    a: Complex64,
    b: Complex64,
    qubit: QubitId,
    assignment: &QubitAssignment,
) -> Result<Vec<Layer>> {
    let n = a.norm_sqr() + b.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    if assignment.is_pol(qubit) {
        return Err(Error::InvalidAssignment(format!(
            "qubit {qubit} is the polarization qubit"
        )));
    }
    let u = if b == c(0.0, 0.0) {
        Unitary::diagonal(&[a, a.conj()])
    } else {
        Unitary::from_rows(2, &[a, b.conj(), b, -a.conj()])
    };
    let low = Lowering {
        asg: assignment,
        space: assignment.space(),
        source: None,
    };
    assignment.loc_mask(qubit)?;
    let mut layers = low.lower_step(Step::Controlled {
        target: qubit,
        u,
        controls: vec![],
    })?;
    layers.retain(|l| !l.is_empty());
    Ok(layers)
}

/// Binary splitting tree that takes light entering path 0 to `target`
/// (one amplitude per path, normalized). Every tree node whose two subtrees
/// both carry weight costs one beam splitter; final phase shifters fix the
/// amplitudes' phases.
pub fn prepare_cascade(space: ModeSpace, target: &[Complex64]) -> Result<Vec<Layer>> {
    if target.len() != space.n_paths() {
        return Err(Error::DimensionMismatch {
            expected: space.n_paths(),
            got: target.len(),
        });
    }
    let n = crate::linalg::norm_sqr(target);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    let weight =
        |lo: usize, len: usize| -> f64 { target[lo..lo + len].iter().map(|z| z.norm_sqr()).sum() };
    let mut layers = Vec::new();
    for level in 0..space.n_loc() {
        let bit = space.path_bit(level);
        let block = bit * 2;
        let mut split = Vec::new();
        for start in (0..space.n_paths()).step_by(block) {
            let (wl, wr) = (weight(start, bit), weight(start + bit, bit));
            if wl + wr == 0.0 || wr == 0.0 {
                continue;
            }
            // real amplitudes after the splitter: (cos θ, i sin θ)
            let theta = wr.sqrt().atan2(wl.sqrt());
            split.push(PlacedElement::new(
                OpticalElement::BeamSplitter {
                    paths: [start, start + bit],
                    theta,
                },
                None,
            ));
        }
        layers.push(split);
    }
    // phase fix: propagate the splitter tree once to learn each path's phase
    let mut probe = OpticalNetlist::empty(space);
    probe.extend(layers.clone());
    let start = crate::optics::ModeAmplitudes::single(space, 0)?;
    let reached = crate::optics::propagate(&probe, &start)?;
    let mut phases = Vec::new();
    for (p, want) in target.iter().enumerate() {
        let have = reached.amplitudes()[space.mode(p, crate::optics::Pol::H)];
        if want.norm() == 0.0 || have.norm() == 0.0 {
            continue;
        }
        let phi = wrap_angle(want.arg() - have.arg());
        if phi.abs() > PHASE_EPS {
            phases.push(PlacedElement::new(
                OpticalElement::PhaseShifter {
                    path: p,
                    pol: PolFilter::Both,
                    phi,
                },
                None,
            ));
        }
    }
    layers.push(phases);
    layers.retain(|l| !l.is_empty());
    Ok(layers)
}
