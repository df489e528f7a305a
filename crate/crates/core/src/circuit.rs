//! Logical circuit representation, the text format and reference gate matrices.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, Unitary};

/// Index of a logical qubit. Qubit 0 is the most significant bit of a basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub usize);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(QubitId),
    X(QubitId),
    Z(QubitId),
    S(QubitId),
    Phase(QubitId, f64),
    /// `e^{iγ}·[[cos θ, −e^{iλ} sin θ], [e^{iφ} sin θ, e^{i(φ+λ)} cos θ]]`
    U2 {
        qubit: QubitId,
        theta: f64,
        phi: f64,
        lambda: f64,
        gamma: f64,
    },
    Cnot {
        control: QubitId,
        target: QubitId,
    },
    Cz {
        control: QubitId,
        target: QubitId,
    },
    Toffoli {
        c1: QubitId,
        c2: QubitId,
        target: QubitId,
    },
    Fredkin {
        control: QubitId,
        a: QubitId,
        b: QubitId,
    },
    Swap(QubitId, QubitId),
}

impl Gate {
    /// Operand qubits in the order they appear in the text format.
    pub fn qubits(&self) -> Vec<QubitId> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::Phase(q, _) => vec![q],
            Gate::U2 { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } | Gate::Cz { control, target } => vec![control, target],
            Gate::Toffoli { c1, c2, target } => vec![c1, c2, target],
            Gate::Fredkin { control, a, b } => vec![control, a, b],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::X(_) => "x",
            Gate::Z(_) => "z",
            Gate::S(_) => "s",
            Gate::Phase(..) => "phase",
            Gate::U2 { .. } => "u2",
            Gate::Cnot { .. } => "cnot",
            Gate::Cz { .. } => "cz",
            Gate::Toffoli { .. } => "toffoli",
            Gate::Fredkin { .. } => "fredkin",
            Gate::Swap(..) => "swap",
        }
    }

    fn angles(&self) -> Vec<f64> {
        match *self {
            Gate::Phase(_, phi) => vec![phi],
            Gate::U2 {
                theta,
                phi,
                lambda,
                gamma,
                ..
            } => vec![theta, phi, lambda, gamma],
            _ => Vec::new(),
        }
    }

    /// Self-inverse gates square to the identity.
    pub fn is_self_inverse(&self) -> bool {
        matches!(
            self,
            Gate::H(_)
                | Gate::X(_)
                | Gate::Z(_)
                | Gate::Cnot { .. }
                | Gate::Cz { .. }
                | Gate::Toffoli { .. }
                | Gate::Fredkin { .. }
                | Gate::Swap(..)
        )
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (i, q) in qs.iter().enumerate() {
            if q.0 >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q.0,
                    n_qubits,
                });
            }
            if qs[..i].contains(q) {
                return Err(Error::RepeatedOperand(q.0));
            }
        }
        if self.angles().iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(())
    }

    /// The gate's matrix on its own operands, operand 0 most significant.
    pub fn local_matrix(&self) -> Unitary {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        match *self {
            Gate::H(_) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Unitary::from_rows(2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
            }
            Gate::X(_) => Unitary::from_rows(2, &[zero, one, one, zero]),
            Gate::Z(_) => Unitary::from_rows(2, &[one, zero, zero, -one]),
            Gate::S(_) => Unitary::from_rows(2, &[one, zero, zero, c(0.0, 1.0)]),
            Gate::Phase(_, phi) => Unitary::from_rows(2, &[one, zero, zero, Complex64::cis(phi)]),
            Gate::U2 {
                theta,
                phi,
                lambda,
                gamma,
                ..
            } => u2_from_params(theta, phi, lambda, gamma),
            Gate::Cnot { .. } => permutation_matrix(&[0, 1, 3, 2]),
            Gate::Cz { .. } => {
                let mut d = vec![one; 4];
                d[3] = -one;
                Unitary::diagonal(&d)
            }
            Gate::Toffoli { .. } => permutation_matrix(&[0, 1, 2, 3, 4, 5, 7, 6]),
            Gate::Fredkin { .. } => permutation_matrix(&[0, 1, 2, 3, 4, 6, 5, 7]),
            Gate::Swap(..) => permutation_matrix(&[0, 2, 1, 3]),
        }
    }
}

/// Column `j` of the result has its single 1 in row `image[j]`.
fn permutation_matrix(image: &[usize]) -> Unitary {
    let n = image.len();
    let mut u = Unitary::zeros(n);
    for (j, &i) in image.iter().enumerate() {
        u.set(i, j, c(1.0, 0.0));
    }
    u
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mnemonic())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        for a in self.angles() {
            // `{:?}` is the shortest representation that round-trips.
            write!(f, " {a:?}")?;
        }
        Ok(())
    }
}

/// `e^{iγ}·[[cos θ, −e^{iλ} sin θ], [e^{iφ} sin θ, e^{i(φ+λ)} cos θ]]`.
pub fn u2_from_params(theta: f64, phi: f64, lambda: f64, gamma: f64) -> Unitary {
    let g = Complex64::cis(gamma);
    let (s, co) = theta.sin_cos();
    Unitary::from_rows(
        2,
        &[
            g * co,
            -g * Complex64::cis(lambda) * s,
            g * Complex64::cis(phi) * s,
            g * Complex64::cis(phi + lambda) * co,
        ],
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    pol_qubit: Option<QubitId>,
}

impl QuantumCircuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        Ok(QuantumCircuit {
            n_qubits,
            gates: Vec::new(),
            pol_qubit: None,
        })
    }

    pub fn with_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut circuit = Self::new(n_qubits)?;
        for g in gates {
            circuit.push(g)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Qubit marked by a `pol` directive, if any.
    pub fn pol_qubit(&self) -> Option<QubitId> {
        self.pol_qubit
    }

    pub fn set_pol_qubit(&mut self, q: Option<QubitId>) -> Result<()> {
        if let Some(q) = q {
            if q.0 >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q.0,
                    n_qubits: self.n_qubits,
                });
            }
        }
        self.pol_qubit = q;
        Ok(())
    }

    /// Dense product of all embedded gate unitaries, first gate applied first.
    pub fn unitary(&self) -> Unitary {
        let mut u = Unitary::identity(1 << self.n_qubits);
        for g in &self.gates {
            u = gate_unitary(g, self.n_qubits).mul(&u);
        }
        u
    }

    /// Inverse of [`parse_circuit`].
    pub fn render(&self) -> String {
        let mut out = format!("qubits {}\n", self.n_qubits);
        if let Some(p) = self.pol_qubit {
            out.push_str(&format!("pol {p}\n"));
        }
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for QuantumCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

/// Embed `gate` into the `2^n` dimensional register, identity on other qubits.
pub fn gate_unitary(gate: &Gate, n_qubits: usize) -> Unitary {
    let ops = gate.qubits();
    let local = gate.local_matrix();
    let dim = 1usize << n_qubits;
    let k = ops.len();
    let bit = |q: QubitId| n_qubits - 1 - q.0;
    let op_mask: usize = ops.iter().map(|&q| 1usize << bit(q)).sum();
    let local_index = |idx: usize| -> usize {
        ops.iter()
            .enumerate()
            .map(|(pos, &q)| ((idx >> bit(q)) & 1) << (k - 1 - pos))
            .sum()
    };
    let mut u = Unitary::zeros(dim);
    for col in 0..dim {
        let lc = local_index(col);
        for row in 0..dim {
            if row & !op_mask != col & !op_mask {
                continue;
            }
            let v = local.get(local_index(row), lc);
            if v != Complex64::new(0.0, 0.0) {
                u.set(row, col, v);
            }
        }
    }
    u
}

/// Parse the line-oriented circuit format.
///
/// ```text
/// qubits 3        # required first statement
/// pol 1           # optional polarization qubit
/// h 0
/// phase 2 -pi/4
/// cnot 0 1
/// ```
pub fn parse_circuit(text: &str) -> Result<QuantumCircuit> {
    let mut circuit: Option<QuantumCircuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let mut words = content.split_whitespace();
        let head = words.next().unwrap().to_ascii_lowercase();
        let args: Vec<&str> = words.collect();

        let Some(circ) = circuit.as_mut() else {
            if head != "qubits" {
                return Err(err("first statement must be `qubits <n>`".into()));
            }
            let [n] = args[..] else {
                return Err(err("expected `qubits <n>`".into()));
            };
            let n: usize = n
                .parse()
                .map_err(|_| err(format!("bad qubit count `{n}`")))?;
            circuit = Some(QuantumCircuit::new(n).map_err(|e| err(e.to_string()))?);
            continue;
        };

        let n = circ.n_qubits();
        let qubit = |s: &str| -> Result<QubitId> {
            let q: usize = s
                .parse()
                .map_err(|_| err(format!("bad qubit index `{s}`")))?;
            if q >= n {
                return Err(err(format!("qubit {q} out of range for {n} qubits")));
            }
            Ok(QubitId(q))
        };
        let angle = |s: &str| parse_angle(s).ok_or_else(|| err(format!("malformed angle `{s}`")));
        let arity = |want: usize| -> Result<()> {
            if args.len() != want {
                return Err(err(format!(
                    "`{head}` takes {want} arguments, got {}",
                    args.len()
                )));
            }
            Ok(())
        };

        let gate = match head.as_str() {
            "qubits" => return Err(err("duplicate `qubits` statement".into())),
            "pol" => {
                arity(1)?;
                if circ.pol_qubit().is_some() {
                    return Err(err("at most one `pol` qubit".into()));
                }
                let q = qubit(args[0])?;
                circ.set_pol_qubit(Some(q))
                    .map_err(|e| err(e.to_string()))?;
                continue;
            }
            "h" | "x" | "z" | "s" => {
                arity(1)?;
                let q = qubit(args[0])?;
                match head.as_str() {
                    "h" => Gate::H(q),
                    "x" => Gate::X(q),
                    "z" => Gate::Z(q),
                    _ => Gate::S(q),
                }
            }
            "phase" => {
                arity(2)?;
                Gate::Phase(qubit(args[0])?, angle(args[1])?)
            }
            "u2" => {
                arity(5)?;
                Gate::U2 {
                    qubit: qubit(args[0])?,
                    theta: angle(args[1])?,
                    phi: angle(args[2])?,
                    lambda: angle(args[3])?,
                    gamma: angle(args[4])?,
                }
            }
            "cnot" | "cz" | "swap" => {
                arity(2)?;
                let (a, b) = (qubit(args[0])?, qubit(args[1])?);
                match head.as_str() {
                    "cnot" => Gate::Cnot {
                        control: a,
                        target: b,
                    },
                    "cz" => Gate::Cz {
                        control: a,
                        target: b,
                    },
                    _ => Gate::Swap(a, b),
                }
            }
            "toffoli" => {
                arity(3)?;
                Gate::Toffoli {
                    c1: qubit(args[0])?,
                    c2: qubit(args[1])?,
                    target: qubit(args[2])?,
                }
            }
            "fredkin" => {
                arity(3)?;
                Gate::Fredkin {
                    control: qubit(args[0])?,
                    a: qubit(args[1])?,
                    b: qubit(args[2])?,
                }
            }
            other => return Err(err(format!("unknown mnemonic `{other}`"))),
        };
        circ.push(gate).map_err(|e| err(e.to_string()))?;
    }
    circuit.ok_or(Error::Parse {
        line: 0,
        message: "empty circuit: missing `qubits <n>`".into(),
    })
}

/// Decimal radians, or multiples of pi: `pi`, `-pi/4`, `0.5pi`, `3*pi/2`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    let lower = s.to_ascii_lowercase();
    let Some(pos) = lower.find("pi") else {
        return s.parse::<f64>().ok().filter(|v| v.is_finite());
    };
    let coeff = lower[..pos].trim_end_matches('*');
    let rest = &lower[pos + 2..];
    let mult = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let div = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')?.parse::<f64>().ok()?
    };
    let v = mult * std::f64::consts::PI / div;
    v.is_finite().then_some(v)
}
