use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use optoqc::compiler::QubitAssignment;
use optoqc::equivalence::{compare_circuit_netlist, DEFAULT_TOLERANCE};
use optoqc::optics::parse_mode;
use optoqc::scenarios::{demo_mz, demo_teleport, parse_complex};
use optoqc::{
    compile, device_stats, diagram, netlist_io, netlist_unitary, parse_circuit, propagate,
    CompileOptions, Error, ModeAmplitudes, OpticalNetlist, QuantumCircuit,
};

#[derive(Parser)]
#[command(
    name = "optoqc",
    version,
    about = "Compile quantum circuits to single-photon optical networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit file into a netlist (JSON)
    Compile {
        circuit: PathBuf,
        /// Drop elements that never see amplitude from the input mode
        #[arg(long)]
        prune: bool,
        /// Input mode used for pruning, e.g. `00,H` (defaults to the all-zero mode)
        #[arg(long)]
        input: Option<String>,
        /// Keep terminal crossings as elements instead of relabeling outputs
        #[arg(long)]
        no_relabel: bool,
        /// Qubit-to-degree-of-freedom map, e.g. `0,2,pol=1`
        #[arg(long)]
        assignment: Option<String>,
        /// Output file; the netlist goes to stdout when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a netlist against a circuit modulo global phase
    Verify {
        circuit: PathBuf,
        netlist: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Overrides the assignment stored in the netlist
        #[arg(long)]
        assignment: Option<String>,
    },
    /// Propagate a single photon through a netlist
    Run {
        netlist: PathBuf,
        #[arg(long)]
        input: Option<String>,
    },
    /// Bundled interferometer scenarios
    #[command(subcommand)]
    Demo(Demo),
    /// Render a netlist as a text diagram
    Diagram { netlist: PathBuf },
    /// Print element counts for a netlist
    Stats { netlist: PathBuf },
}

#[derive(Subcommand)]
enum Demo {
    /// Balanced Mach-Zehnder interferometer
    Mz {
        /// Insert a polarization rotator in one arm
        #[arg(long)]
        rotator: bool,
    },
    /// Single-photon teleportation of alpha|0> + beta|1>
    Teleport {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse { .. }
            | Error::NoQubits
            | Error::QubitOutOfRange { .. }
            | Error::RepeatedOperand(_)
            | Error::NonFiniteAngle
            | Error::InvalidSelection(_)
            | Error::InvalidAssignment(_)
            | Error::InvalidMode(_)
            | Error::Format(_)
            | Error::NotNormalized(_),
        ) => 2,
        _ => 3,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_circuit(path: &Path) -> Result<QuantumCircuit> {
    let text = read(path)?;
    parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_netlist(path: &Path) -> Result<OpticalNetlist> {
    let text = read(path)?;
    netlist_io::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn assignment_for(circuit: &QuantumCircuit, spec: Option<&str>) -> Result<QubitAssignment> {
    match spec {
        Some(s) => Ok(s.parse::<QubitAssignment>()?),
        None => Ok(QubitAssignment::from_circuit(circuit)),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compile {
            circuit,
            prune,
            input,
            no_relabel,
            assignment,
            output,
        } => {
            let circuit = load_circuit(&circuit)?;
            let asg = assignment_for(&circuit, assignment.as_deref())?;
            let space = asg.space();
            let input_mode = match &input {
                Some(spec) => parse_mode(&space, spec)?,
                None => 0,
            };
            let opts = CompileOptions {
                prune,
                input_support: prune.then(|| BTreeSet::from([input_mode])),
                relabel_terminal_crossings: !no_relabel,
            };
            let net = compile(&circuit, &asg, &opts)?;
            let json = netlist_io::to_json(&net);
            let stats = device_stats(&net);
            match output {
                Some(path) => {
                    fs::write(&path, json)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("{stats}");
                }
                None => {
                    print!("{json}");
                    eprintln!("{stats}");
                }
            }
            Ok(0)
        }
        Command::Verify {
            circuit,
            netlist,
            tol,
            assignment,
        } => {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::InvalidSelection(format!("bad tolerance {tol}")).into());
            }
            let circuit = load_circuit(&circuit)?;
            let net = load_netlist(&netlist)?;
            let asg = match (assignment.as_deref(), &net.meta.assignment) {
                (Some(s), _) => s.parse::<QubitAssignment>()?,
                (None, Some(a)) => a.clone(),
                (None, None) => QubitAssignment::from_circuit(&circuit),
            };
            if asg.n_qubits() != circuit.n_qubits() {
                return Err(Error::DimensionMismatch {
                    expected: circuit.n_qubits(),
                    got: asg.n_qubits(),
                }
                .into());
            }
            let report =
                compare_circuit_netlist(&circuit.unitary(), &netlist_unitary(&net)?, &asg, tol)?;
            println!("distance: {:.6e}", report.distance);
            println!("aligning phase: {:.12}", report.aligning_phase);
            println!("tolerance: {:.3e}", report.tolerance);
            println!("result: {}", if report.pass { "PASS" } else { "FAIL" });
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Run { netlist, input } => {
            let net = load_netlist(&netlist)?;
            let space = net.space;
            let mode = match &input {
                Some(spec) => parse_mode(&space, spec)?,
                None => 0,
            };
            let out = propagate(&net, &ModeAmplitudes::single(space, mode)?)?;
            println!("input: {}", space.label(mode));
            println!("{:<8} {:>34} {:>16}", "mode", "amplitude", "probability");
            let mut total = 0.0;
            for (m, z) in out.amplitudes().iter().enumerate() {
                let p = z.norm_sqr();
                total += p;
                println!(
                    "{:<8} {:>34} {:>16.12}",
                    space.label(m),
                    fmt_amp(z.re, z.im),
                    p
                );
            }
            println!("{:<8} {:>34} {:>16.12}", "total", "", total);
            Ok(0)
        }
        Command::Demo(Demo::Mz { rotator }) => {
            print!("{}", demo_mz(rotator)?);
            Ok(0)
        }
        Command::Demo(Demo::Teleport { alpha, beta }) => {
            let report = demo_teleport(parse_complex(&alpha)?, parse_complex(&beta)?)?;
            for n in report.notes.iter().filter(|n| n.contains("renormalized")) {
                eprintln!("warning: {n}");
            }
            print!("{report}");
            Ok(0)
        }
        Command::Diagram { netlist } => {
            print!("{}", diagram::render(&load_netlist(&netlist)?));
            Ok(0)
        }
        Command::Stats { netlist } => {
            println!("{}", device_stats(&load_netlist(&netlist)?));
            Ok(0)
        }
    }
}

fn fmt_amp(re: f64, im: f64) -> String {
    // fold signed zeros and rounding noise so output stays byte-stable
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(re), clean(im));
    if im < 0.0 {
        format!("{re:.12}-{:.12}i", -im)
    } else {
        format!("{re:.12}+{im:.12}i")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
