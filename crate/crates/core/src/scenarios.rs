//! Bundled interferometer scenarios: the balanced Mach-Zehnder, the same
//! interferometer with which-path marking, and single-photon teleportation.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::circuit::{parse_circuit, QuantumCircuit, QubitId};
use crate::compiler::QubitAssignment;
use crate::compiler::{
    compile, device_stats, prepare_location_state, prune_dead_paths, CompileOptions, DeviceStats,
};
use crate::equivalence::{
    compare_circuit_netlist, mode_of_basis, state_fidelity, EquivalenceReport, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::optics::{netlist_unitary, propagate, ModeAmplitudes, OpticalNetlist, Pol};
use crate::statevec::{conditional_state, partial_trace, run_circuit, DensityMatrix, StateVector};

pub const TELEPORT_QC: &str = include_str!("../examples/teleport.qc");
pub const MZ_QC: &str = include_str!("../examples/mz.qc");
pub const MZ_ROTATOR_QC: &str = include_str!("../examples/mz_rotator.qc");

/// Qubit roles in the bundled teleport circuit.
pub const TELEPORT_INPUT: QubitId = QubitId(0);
pub const TELEPORT_POL: QubitId = QubitId(1);
pub const TELEPORT_OUTPUT: QubitId = QubitId(2);

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorReading {
    pub label: String,
    pub probability: f64,
    /// `Some(true)` for a light port, `Some(false)` for a dark one.
    pub light: Option<bool>,
}

/// One measured `(Λ, σ)` branch of the teleport output.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportBranch {
    pub arm: u8,
    pub pol: Pol,
    pub probability: f64,
    /// Normalized `λ` amplitudes read off the two output paths of the branch.
    pub state: [Complex64; 2],
    /// Fidelity of `state` with the prepared input.
    pub fidelity: f64,
    /// Fidelity of `state` with the oracle's post-measurement `λ` state.
    pub oracle_fidelity: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub detectors: Vec<DetectorReading>,
    /// Path-port probabilities summed over polarization.
    pub ports: Vec<(String, f64)>,
    pub branches: Vec<TeleportBranch>,
    pub location_density: Option<DensityMatrix>,
    /// `|<s0|s1>|²` between the polarization states leaving the two ports.
    pub polarization_overlap: Option<f64>,
    pub dark_probability: Option<f64>,
    /// `P(λ = 0)`, `P(λ = 1)` over all branches.
    pub output_marginal: Option<[f64; 2]>,
    pub equivalence: Option<EquivalenceReport>,
    pub stats: Option<DeviceStats>,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    pub fn total_probability(&self) -> f64 {
        self.detectors.iter().map(|d| d.probability).sum()
    }
}

fn fmt_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im < 0.0 {
        format!("{re:.12}-{:.12}i", -im)
    } else {
        format!("{re:.12}+{im:.12}i")
    }
}

fn fmt_prob(p: f64) -> String {
    // keep -0.000 and 1e-33 noise out of byte-compared output
    format!("{:.12}", if p.abs() < 5e-13 { 0.0 } else { p })
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.name)?;
        writeln!(f, "detectors:")?;
        for d in &self.detectors {
            let tag = match d.light {
                Some(true) => "  light",
                Some(false) => "  dark",
                None => "",
            };
            writeln!(f, "  {:<8} {}{tag}", d.label, fmt_prob(d.probability))?;
        }
        writeln!(f, "  total    {}", fmt_prob(self.total_probability()))?;
        if !self.ports.is_empty() {
            writeln!(f, "ports:")?;
            for (label, p) in &self.ports {
                writeln!(f, "  port {label:<4} {}", fmt_prob(*p))?;
            }
        }
        if let Some(rho) = &self.location_density {
            writeln!(f, "location density matrix (polarization traced out):")?;
            for i in 0..rho.dim() {
                let row: Vec<String> = (0..rho.dim()).map(|j| fmt_complex(rho.get(i, j))).collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        if let Some(o) = self.polarization_overlap {
            writeln!(f, "polarization overlap between ports: {}", fmt_prob(o))?;
        }
        if !self.branches.is_empty() {
            writeln!(f, "branches (arm, polarization):")?;
            for b in &self.branches {
                writeln!(
                    f,
                    "  Λ={} σ={}  p={}  λ=[{}, {}]  fidelity={}  oracle={}",
                    b.arm,
                    b.pol,
                    fmt_prob(b.probability),
                    fmt_complex(b.state[0]),
                    fmt_complex(b.state[1]),
                    fmt_prob(b.fidelity),
                    fmt_prob(b.oracle_fidelity)
                )?;
            }
        }
        if let Some([p0, p1]) = self.output_marginal {
            writeln!(
                f,
                "output qubit: P(λ=0)={}  P(λ=1)={}",
                fmt_prob(p0),
                fmt_prob(p1)
            )?;
        }
        if let Some(d) = self.dark_probability {
            writeln!(f, "dark-port probability: {}", fmt_prob(d))?;
        }
        if let Some(e) = &self.equivalence {
            writeln!(
                f,
                "equivalence: distance={:.3e} phase={:.12} {}",
                e.distance,
                e.aligning_phase,
                if e.pass { "PASS" } else { "FAIL" }
            )?;
        }
        if let Some(s) = &self.stats {
            writeln!(
                f,
                "devices: {} splitting ({} BS + {} PBS), {} phase shifters, {} rotators, {} crossings",
                s.splitting_elements(),
                s.beam_splitters,
                s.polarizing_beam_splitters,
                s.phase_shifters,
                s.rotators,
                s.crossings
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Parse `a+bi` style complex literals: `0.6`, `0.8i`, `0.5-0.5i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || Error::InvalidSelection(format!("bad complex literal `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let num = |v: &str| -> Result<f64> {
        match v {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(bad),
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(c(num_strict(&t).ok_or_else(bad)?, 0.0));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(c(num_strict(&body[..k]).ok_or_else(bad)?, num(&body[k..])?)),
        None => Ok(c(0.0, num(body)?)),
    }
}

fn num_strict(v: &str) -> Option<f64> {
    v.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn compile_bundled(
    src: &str,
    opts: &CompileOptions,
) -> Result<(QuantumCircuit, QubitAssignment, OpticalNetlist)> {
    let circuit = parse_circuit(src)?;
    let asg = QubitAssignment::from_circuit(&circuit);
    let net = compile(&circuit, &asg, opts)?;
    Ok((circuit, asg, net))
}

/// Optical output expressed in the circuit's qubit basis.
fn to_qubit_basis(asg: &QubitAssignment, out: &ModeAmplitudes) -> Result<StateVector> {
    let amps = (0..1usize << asg.n_qubits())
        .map(|x| out.amplitudes()[mode_of_basis(asg, x)])
        .collect();
    StateVector::from_amplitudes_unchecked(amps)
}

/// Photon entering port 0 (horizontally polarized) of a balanced
/// Mach-Zehnder interferometer, optionally with a rotator in arm 1.
pub fn demo_mz(rotator: bool) -> Result<ScenarioReport> {
    let src = if rotator { MZ_ROTATOR_QC } else { MZ_QC };
    let (circuit, asg, net) = compile_bundled(src, &CompileOptions::default())?;
    let space = net.space;
    let out = propagate(&net, &ModeAmplitudes::single(space, 0)?)?;
    let probs = out.probabilities();

    let detectors = (0..space.dim())
        .map(|m| DetectorReading {
            label: space.label(m),
            probability: probs[m],
            light: None,
        })
        .collect();
    let ports: Vec<(String, f64)> = (0..space.n_paths())
        .map(|p| (p.to_string(), space.path_modes(p).map(|m| probs[m]).sum()))
        .collect();

    let equivalence = compare_circuit_netlist(
        &circuit.unitary(),
        &netlist_unitary(&net)?,
        &asg,
        DEFAULT_TOLERANCE,
    )?;
    let mut report = ScenarioReport {
        name: if rotator {
            "mach-zehnder with rotator".into()
        } else {
            "mach-zehnder".into()
        },
        detectors,
        ports,
        equivalence: Some(equivalence),
        stats: Some(device_stats(&net)),
        ..ScenarioReport::default()
    };

    if rotator {
        let location = asg.location()[0];
        let state = to_qubit_basis(&asg, &out)?;
        report.location_density = Some(partial_trace(&state, &[location])?);
        let pol_state = |p: usize| -> Vec<Complex64> {
            let v: Vec<Complex64> = space.path_modes(p).map(|m| out.amplitudes()[m]).collect();
            let n = crate::linalg::norm_sqr(&v).sqrt();
            v.into_iter().map(|z| z / n).collect()
        };
        report.polarization_overlap = Some(state_fidelity(&pol_state(0), &pol_state(1))?);
        report
            .notes
            .push("which-path marking: the two ports carry orthogonal polarizations".into());
    }
    Ok(report)
}

/// Teleport circuit, its assignment and the compiled netlist (terminal
/// crossing folded into output relabeling). With `prune`, elements dead for a
/// photon entering on `00,H` are dropped.
pub fn teleport_netlist(prune: bool) -> Result<(QuantumCircuit, QubitAssignment, OpticalNetlist)> {
    let opts = CompileOptions {
        prune,
        input_support: prune.then(|| BTreeSet::from([0])),
        relabel_terminal_crossings: true,
    };
    compile_bundled(TELEPORT_QC, &opts)
}

fn normalize(alpha: Complex64, beta: Complex64) -> Result<(Complex64, Complex64, Option<String>)> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::NotNormalized(n));
    }
    if (n - 1.0).abs() <= 1e-6 {
        // still rescale so downstream 1e-10 checks see an exact unit vector
        let s = n.sqrt();
        return Ok((alpha / s, beta / s, None));
    }
    let s = n.sqrt();
    Ok((
        alpha / s,
        beta / s,
        Some(format!("input renormalized (|α|²+|β|² was {n})")),
    ))
}

/// Teleport `α|0> + β|1>` from the first-level arm qubit to the second-level path qubit.
///
/// A preparation splitter feeds both input ports of the first splitter, the
/// pruned teleport network follows, and the photon enters on `00,H`. Light
/// ports are the `λ=0` outputs of each arm, dark ports the `λ=1` outputs.
pub fn demo_teleport(alpha: Complex64, beta: Complex64) -> Result<ScenarioReport> {
    let (alpha, beta, warning) = normalize(alpha, beta)?;
    let (circuit, asg, teleport) = teleport_netlist(false)?;
    let space = teleport.space;

    let mut device = OpticalNetlist::empty(space);
    device.extend(prepare_location_state(alpha, beta, TELEPORT_INPUT, &asg)?);
    device.extend(teleport.layers.clone());
    device.output_relabel = teleport.output_relabel.clone();
    device.meta = teleport.meta.clone();
    let device = prune_dead_paths(&device, &BTreeSet::from([space.mode(0, Pol::H)]))?;

    let out = propagate(
        &device,
        &ModeAmplitudes::single(space, space.mode(0, Pol::H))?,
    )?;
    let amp =
        |arm: usize, lambda: usize, pol: Pol| out.amplitudes()[space.mode(arm * 2 + lambda, pol)];

    let input = StateVector::from_amplitudes(vec![alpha, beta])?
        .tensor(&StateVector::basis(1, 0))
        .tensor(&StateVector::basis(1, 0));
    let oracle_out = run_circuit(&circuit, &input)?;

    let detectors = (0..space.dim())
        .map(|m| {
            let lambda = space.path_of(m) & 1;
            DetectorReading {
                label: space.label(m),
                probability: out.probabilities()[m],
                light: Some(lambda == 0),
            }
        })
        .collect::<Vec<_>>();
    let dark = detectors
        .iter()
        .filter(|d| d.light == Some(false))
        .map(|d| d.probability)
        .sum();

    let mut branches = Vec::new();
    for arm in 0..2 {
        for pol in [Pol::H, Pol::V] {
            let v = [amp(arm, 0, pol), amp(arm, 1, pol)];
            let p = v[0].norm_sqr() + v[1].norm_sqr();
            let (state, fidelity, oracle_fidelity) = if p > 1e-12 {
                let s = p.sqrt();
                let state = [v[0] / s, v[1] / s];
                let outcome = arm * 2 + pol as usize;
                let oracle =
                    conditional_state(&oracle_out, &[TELEPORT_INPUT, TELEPORT_POL], outcome)?;
                (
                    state,
                    state_fidelity(&state, &[alpha, beta])?,
                    state_fidelity(&state, oracle.amplitudes())?,
                )
            } else {
                ([c(0.0, 0.0); 2], 0.0, 0.0)
            };
            branches.push(TeleportBranch {
                arm: arm as u8,
                pol,
                probability: p,
                state,
                fidelity,
                oracle_fidelity,
            });
        }
    }
    let p_lambda0: f64 = (0..2)
        .flat_map(|a| [Pol::H, Pol::V].map(|p| amp(a, 0, p).norm_sqr()))
        .sum();
    let p_lambda1: f64 = (0..2)
        .flat_map(|a| [Pol::H, Pol::V].map(|p| amp(a, 1, p).norm_sqr()))
        .sum();

    let equivalence = compare_circuit_netlist(
        &circuit.unitary(),
        &netlist_unitary(&teleport)?,
        &asg,
        DEFAULT_TOLERANCE,
    )?;
    let mut notes: Vec<String> = warning.into_iter().collect();
    notes.push(format!(
        "input state α={} β={}",
        fmt_complex(alpha),
        fmt_complex(beta)
    ));
    Ok(ScenarioReport {
        name: "teleportation".into(),
        detectors,
        branches,
        dark_probability: Some(dark),
        output_marginal: Some([p_lambda0, p_lambda1]),
        equivalence: Some(equivalence),
        stats: Some(device_stats(&device)),
        notes,
        ..ScenarioReport::default()
    })
}
