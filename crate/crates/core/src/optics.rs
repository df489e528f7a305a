//! Single-photon mode space and linear optical elements.
//!
//! A photon occupies one of `2^n_loc` paths and, when polarization is used,
//! one of two polarizations. Mode index is `path·2 + pol` with polarization,
//! `path` without. Path bits are ordered with location qubit 0 most significant.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compiler::QubitAssignment;
use crate::error::{Error, Result};
use crate::linalg::{c, norm_sqr, Unitary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    n_loc: usize,
    uses_pol: bool,
}

impl ModeSpace {
    pub fn new(n_loc: usize, uses_pol: bool) -> Self {
        ModeSpace { n_loc, uses_pol }
    }

    pub fn n_loc(&self) -> usize {
        self.n_loc
    }

    pub fn uses_pol(&self) -> bool {
        self.uses_pol
    }

    pub fn n_paths(&self) -> usize {
        1 << self.n_loc
    }

    pub fn pols(&self) -> usize {
        if self.uses_pol {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.n_paths() * self.pols()
    }

    /// Single-bit mask for location position `k` within a path index.
    pub fn path_bit(&self, k: usize) -> usize {
        1 << (self.n_loc - 1 - k)
    }

    pub fn mode(&self, path: usize, pol: Pol) -> usize {
        path * self.pols() + pol as usize
    }

    pub fn path_of(&self, mode: usize) -> usize {
        mode / self.pols()
    }

    pub fn pol_of(&self, mode: usize) -> Pol {
        if self.uses_pol && mode % 2 == 1 {
            Pol::V
        } else {
            Pol::H
        }
    }

    /// All modes on `path`.
    pub fn path_modes(&self, path: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.pols()).map(move |p| path * self.pols() + p)
    }

    /// Human-readable mode label, e.g. `10,V`.
    pub fn label(&self, mode: usize) -> String {
        let path = self.path_of(mode);
        let bits: String = (0..self.n_loc)
            .map(|k| {
                if path & self.path_bit(k) != 0 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        let bits = if bits.is_empty() {
            "-".to_string()
        } else {
            bits
        };
        if self.uses_pol {
            format!("{bits},{}", self.pol_of(mode))
        } else {
            bits
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    H = 0,
    V = 1,
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::H => "H",
            Pol::V => "V",
        })
    }
}

/// Mode index for location bits (position 0 first) and optional polarization.
pub fn mode_of(space: &ModeSpace, location_bits: &[bool], pol: Option<Pol>) -> Result<usize> {
    if location_bits.len() != space.n_loc {
        return Err(Error::InvalidMode(format!(
            "expected {} location bits, got {}",
            space.n_loc,
            location_bits.len()
        )));
    }
    let path = location_bits
        .iter()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
    match (pol, space.uses_pol) {
        (Some(p), true) => Ok(space.mode(path, p)),
        (None, false) => Ok(path),
        (Some(_), false) => Err(Error::InvalidMode(
            "polarization given for a space without polarization".into(),
        )),
        (None, true) => Err(Error::InvalidMode("polarization required".into())),
    }
}

/// Parse a mode selector such as `01,V`, `1` or `-,H` (no location bits).
pub fn parse_mode(space: &ModeSpace, spec: &str) -> Result<usize> {
    let (bits, pol) = match spec.split_once(',') {
        Some((b, p)) => {
            let pol = match p.trim() {
                "H" | "h" => Pol::H,
                "V" | "v" => Pol::V,
                other => {
                    return Err(Error::InvalidMode(format!(
                        "unknown polarization `{other}`"
                    )))
                }
            };
            (b.trim(), Some(pol))
        }
        None => (spec.trim(), None),
    };
    let bits = if bits == "-" { "" } else { bits };
    let bits: Vec<bool> = bits
        .chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidMode(format!("bad location bit `{other}`"))),
        })
        .collect::<Result<_>>()?;
    // a bare bitstring in a polarized space means horizontal input
    let pol = pol.or(if space.uses_pol { Some(Pol::H) } else { None });
    mode_of(space, &bits, pol)
}

/// Which polarization modes a phase shifter acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolFilter {
    H,
    V,
    #[serde(rename = "both")]
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OpticalElement {
    /// `[[cos θ, i sin θ], [i sin θ, cos θ]]` on `(paths[0], paths[1])`, both polarizations.
    BeamSplitter { paths: [usize; 2], theta: f64 },
    PhaseShifter {
        path: usize,
        pol: PolFilter,
        phi: f64,
    },
    /// Exact H↔V flip on one path.
    Rotator { path: usize },
    /// `[[cos θ, i sin θ], [i sin θ, cos θ]]` on `(H, V)` of one path.
    WavePlate { path: usize, theta: f64 },
    /// Transmits H; reflects V between the two paths with phase `i`.
    Pbs { paths: [usize; 2] },
    /// Input path `p` leaves on path `map[p]`.
    Crossing { map: Vec<usize> },
}

impl OpticalElement {
    pub fn kind(&self) -> &'static str {
        match self {
            OpticalElement::BeamSplitter { .. } => "bs",
            OpticalElement::PhaseShifter { .. } => "ps",
            OpticalElement::Rotator { .. } => "rot",
            OpticalElement::WavePlate { .. } => "wp",
            OpticalElement::Pbs { .. } => "pbs",
            OpticalElement::Crossing { .. } => "perm",
        }
    }

    pub fn is_splitter(&self) -> bool {
        matches!(
            self,
            OpticalElement::BeamSplitter { .. } | OpticalElement::Pbs { .. }
        )
    }

    /// Paths the element touches.
    pub fn paths(&self) -> Vec<usize> {
        match self {
            OpticalElement::BeamSplitter { paths, .. } | OpticalElement::Pbs { paths } => {
                paths.to_vec()
            }
            OpticalElement::PhaseShifter { path, .. }
            | OpticalElement::Rotator { path }
            | OpticalElement::WavePlate { path, .. } => vec![*path],
            OpticalElement::Crossing { map } => map
                .iter()
                .enumerate()
                .filter(|(p, &q)| *p != q)
                .map(|(p, _)| p)
                .collect(),
        }
    }

    /// Modes the element acts on.
    pub fn modes(&self, space: &ModeSpace) -> Vec<usize> {
        match self {
            OpticalElement::PhaseShifter { path, pol, .. } => match (pol, space.uses_pol) {
                (PolFilter::Both, _) => space.path_modes(*path).collect(),
                (PolFilter::H, _) => vec![space.mode(*path, Pol::H)],
                (PolFilter::V, _) => vec![space.mode(*path, Pol::V)],
            },
            _ => self
                .paths()
                .into_iter()
                .flat_map(|p| space.path_modes(p))
                .collect(),
        }
    }

    pub fn validate(&self, space: &ModeSpace) -> Result<()> {
        let n = space.n_paths();
        let bad = |msg: String| Err(Error::InvalidElement(msg));
        let check_path = |p: usize| -> Result<()> {
            if p >= n {
                return Err(Error::InvalidElement(format!(
                    "path {p} out of range for {n} paths"
                )));
            }
            Ok(())
        };
        match self {
            OpticalElement::BeamSplitter { paths, theta } => {
                paths.iter().try_for_each(|&p| check_path(p))?;
                if paths[0] == paths[1] {
                    return bad(format!(
                        "beam splitter paths must differ (both {})",
                        paths[0]
                    ));
                }
                if !theta.is_finite() {
                    return bad("non-finite beam splitter angle".into());
                }
            }
            OpticalElement::Pbs { paths } => {
                paths.iter().try_for_each(|&p| check_path(p))?;
                if paths[0] == paths[1] {
                    return bad(format!("PBS paths must differ (both {})", paths[0]));
                }
                if !space.uses_pol {
                    return bad("PBS needs a polarization degree of freedom".into());
                }
            }
            OpticalElement::PhaseShifter { path, pol, phi } => {
                check_path(*path)?;
                if *pol == PolFilter::V && !space.uses_pol {
                    return bad("V-filtered phase shifter in a space without polarization".into());
                }
                if !phi.is_finite() {
                    return bad("non-finite phase".into());
                }
            }
            OpticalElement::Rotator { path } => {
                check_path(*path)?;
                if !space.uses_pol {
                    return bad("rotator needs a polarization degree of freedom".into());
                }
            }
            OpticalElement::WavePlate { path, theta } => {
                check_path(*path)?;
                if !space.uses_pol {
                    return bad("wave plate needs a polarization degree of freedom".into());
                }
                if !theta.is_finite() {
                    return bad("non-finite wave plate angle".into());
                }
            }
            OpticalElement::Crossing { map } => {
                if map.len() != n {
                    return bad(format!(
                        "crossing map has {} entries for {n} paths",
                        map.len()
                    ));
                }
                let seen: BTreeSet<usize> = map.iter().copied().collect();
                if seen.len() != n || map.iter().any(|&q| q >= n) {
                    return bad("crossing map is not a permutation".into());
                }
            }
        }
        Ok(())
    }

    /// Apply in place to a full amplitude vector.
    pub fn apply(&self, space: &ModeSpace, amps: &mut [Complex64]) {
        match self {
            OpticalElement::BeamSplitter { paths, theta } => {
                let (s, co) = theta.sin_cos();
                let is = c(0.0, s);
                for pol in 0..space.pols() {
                    let a = paths[0] * space.pols() + pol;
                    let b = paths[1] * space.pols() + pol;
                    let (x, y) = (amps[a], amps[b]);
                    amps[a] = x * co + is * y;
                    amps[b] = is * x + y * co;
                }
            }
            OpticalElement::PhaseShifter { phi, .. } => {
                let f = Complex64::cis(*phi);
                for m in self.modes(space) {
                    amps[m] *= f;
                }
            }
            OpticalElement::Rotator { path } => {
                amps.swap(space.mode(*path, Pol::H), space.mode(*path, Pol::V));
            }
            OpticalElement::WavePlate { path, theta } => {
                let (s, co) = theta.sin_cos();
                let is = c(0.0, s);
                let (h, v) = (space.mode(*path, Pol::H), space.mode(*path, Pol::V));
                let (x, y) = (amps[h], amps[v]);
                amps[h] = x * co + is * y;
                amps[v] = is * x + y * co;
            }
            OpticalElement::Pbs { paths } => {
                let a = space.mode(paths[0], Pol::V);
                let b = space.mode(paths[1], Pol::V);
                let i = c(0.0, 1.0);
                let (x, y) = (amps[a], amps[b]);
                amps[a] = i * y;
                amps[b] = i * x;
            }
            OpticalElement::Crossing { map } => permute_paths(space, map, amps),
        }
    }
}

fn permute_paths(space: &ModeSpace, map: &[usize], amps: &mut [Complex64]) {
    let old = amps.to_vec();
    for (p, &q) in map.iter().enumerate() {
        for pol in 0..space.pols() {
            amps[q * space.pols() + pol] = old[p * space.pols() + pol];
        }
    }
}

/// Dense matrix of one element on the whole mode space.
pub fn element_unitary(e: &OpticalElement, space: &ModeSpace) -> Result<Unitary> {
    e.validate(space)?;
    let dim = space.dim();
    let mut u = Unitary::identity(dim);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    // writes a 2×2 block on modes (a, b)
    let block = |u: &mut Unitary, a: usize, b: usize, m: [[Complex64; 2]; 2]| {
        u.set(a, a, m[0][0]);
        u.set(a, b, m[0][1]);
        u.set(b, a, m[1][0]);
        u.set(b, b, m[1][1]);
    };
    match e {
        OpticalElement::BeamSplitter { paths, theta } => {
            let (s, co) = theta.sin_cos();
            let m = [[c(co, 0.0), c(0.0, s)], [c(0.0, s), c(co, 0.0)]];
            for pol in 0..space.pols() {
                block(
                    &mut u,
                    paths[0] * space.pols() + pol,
                    paths[1] * space.pols() + pol,
                    m,
                );
            }
        }
        OpticalElement::PhaseShifter { phi, .. } => {
            for m in e.modes(space) {
                u.set(m, m, Complex64::cis(*phi));
            }
        }
        OpticalElement::Rotator { path } => {
            let m = [[zero, one], [one, zero]];
            block(
                &mut u,
                space.mode(*path, Pol::H),
                space.mode(*path, Pol::V),
                m,
            );
        }
        OpticalElement::WavePlate { path, theta } => {
            let (s, co) = theta.sin_cos();
            let m = [[c(co, 0.0), c(0.0, s)], [c(0.0, s), c(co, 0.0)]];
            block(
                &mut u,
                space.mode(*path, Pol::H),
                space.mode(*path, Pol::V),
                m,
            );
        }
        OpticalElement::Pbs { paths } => {
            let i = c(0.0, 1.0);
            block(
                &mut u,
                space.mode(paths[0], Pol::V),
                space.mode(paths[1], Pol::V),
                [[zero, i], [i, zero]],
            );
        }
        OpticalElement::Crossing { map } => {
            u = Unitary::zeros(dim);
            for (p, &q) in map.iter().enumerate() {
                for pol in 0..space.pols() {
                    u.set(q * space.pols() + pol, p * space.pols() + pol, one);
                }
            }
        }
    }
    Ok(u)
}

/// An element together with the index of the circuit gate it was lowered from.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacedElement {
    pub element: OpticalElement,
    pub source: Option<usize>,
}

impl PlacedElement {
    pub fn new(element: OpticalElement, source: Option<usize>) -> Self {
        PlacedElement { element, source }
    }
}

pub type Layer = Vec<PlacedElement>;

/// Descriptive data carried alongside a netlist.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NetlistMeta {
    /// Rendered source gates; `PlacedElement::source` indexes into this list.
    pub gates: Vec<String>,
    pub assignment: Option<QubitAssignment>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpticalNetlist {
    pub space: ModeSpace,
    pub layers: Vec<Layer>,
    /// Output-port relabeling: light leaving physical path `p` is read as path `map[p]`.
    pub output_relabel: Option<Vec<usize>>,
    pub meta: NetlistMeta,
}

impl OpticalNetlist {
    pub fn empty(space: ModeSpace) -> Self {
        OpticalNetlist {
            space,
            layers: Vec::new(),
            output_relabel: None,
            meta: NetlistMeta::default(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = &OpticalElement> {
        self.layers.iter().flatten().map(|p| &p.element)
    }

    pub fn element_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Every element valid for the space, elements within a layer on disjoint modes.
    pub fn validate(&self) -> Result<()> {
        for (li, layer) in self.layers.iter().enumerate() {
            let mut used = BTreeSet::new();
            for placed in layer {
                placed.element.validate(&self.space)?;
                for m in placed.element.modes(&self.space) {
                    if !used.insert(m) {
                        return Err(Error::OverlappingLayer { layer: li, mode: m });
                    }
                }
            }
        }
        if let Some(map) = &self.output_relabel {
            OpticalElement::Crossing { map: map.clone() }.validate(&self.space)?;
        }
        Ok(())
    }

    /// Append layers after the existing ones.
    pub fn extend(&mut self, layers: impl IntoIterator<Item = Layer>) {
        self.layers
            .extend(layers.into_iter().filter(|l| !l.is_empty()));
    }
}

/// Dense product of all layer matrices (and the output relabeling).
pub fn netlist_unitary(net: &OpticalNetlist) -> Result<Unitary> {
    net.validate()?;
    let dim = net.space.dim();
    let mut u = Unitary::identity(dim);
    for layer in &net.layers {
        let mut lu = Unitary::identity(dim);
        for placed in layer {
            lu = element_unitary(&placed.element, &net.space)?.mul(&lu);
        }
        u = lu.mul(&u);
    }
    if let Some(map) = &net.output_relabel {
        u = element_unitary(&OpticalElement::Crossing { map: map.clone() }, &net.space)?.mul(&u);
    }
    Ok(u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeAmplitudes {
    space: ModeSpace,
    amplitudes: Vec<Complex64>,
}

impl ModeAmplitudes {
    /// Photon in a single mode.
    pub fn single(space: ModeSpace, mode: usize) -> Result<Self> {
        if mode >= space.dim() {
            return Err(Error::InvalidMode(format!(
                "mode {mode} out of range for {} modes",
                space.dim()
            )));
        }
        let mut amplitudes = vec![c(0.0, 0.0); space.dim()];
        amplitudes[mode] = c(1.0, 0.0);
        Ok(ModeAmplitudes { space, amplitudes })
    }

    pub fn new(space: ModeSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::unnormalized(space, amplitudes)?;
        let n = norm_sqr(&s.amplitudes);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Arbitrary field amplitudes, e.g. a classical coherent beam.
    pub fn unnormalized(space: ModeSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(ModeAmplitudes { space, amplitudes })
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }
}

/// Streamed propagation, one element at a time, never forming a dense matrix.
pub fn propagate(net: &OpticalNetlist, input: &ModeAmplitudes) -> Result<ModeAmplitudes> {
    if input.space != net.space {
        return Err(Error::DimensionMismatch {
            expected: net.space.dim(),
            got: input.space.dim(),
        });
    }
    net.validate()?;
    Ok(propagate_validated(net, input))
}

pub(crate) fn propagate_validated(net: &OpticalNetlist, input: &ModeAmplitudes) -> ModeAmplitudes {
    let mut amps = input.amplitudes.clone();
    for placed in net.layers.iter().flatten() {
        placed.element.apply(&net.space, &mut amps);
    }
    if let Some(map) = &net.output_relabel {
        permute_paths(&net.space, map, &mut amps);
    }
    ModeAmplitudes {
        space: net.space,
        amplitudes: amps,
    }
}
