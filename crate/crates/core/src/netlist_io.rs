//! JSON netlist files.
//!
//! ```json
//! { "version": 1, "n_loc": 2, "uses_pol": true,
//!   "layers": [[{"type": "bs", "paths": [0, 2], "theta": 0.7853981633974483}]],
//!   "meta": {"source_gates": [[0]], "gates": ["h 0"]} }
//! ```
//!
//! Angles are written in shortest round-trip form, so reading a file back
//! reproduces every angle bit for bit.

use serde::{Deserialize, Serialize};

use crate::circuit::QubitId;
use crate::compiler::QubitAssignment;
use crate::error::{Error, Result};
use crate::optics::{
    ModeSpace, NetlistMeta, OpticalElement, OpticalNetlist, PlacedElement, PolFilter,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetlistFile {
    version: u32,
    n_loc: usize,
    uses_pol: bool,
    layers: Vec<Vec<ElementRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_relabel: Option<Vec<usize>>,
    #[serde(default)]
    meta: MetaRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum ElementRecord {
    #[serde(rename = "bs")]
    Bs { paths: [usize; 2], theta: f64 },
    #[serde(rename = "ps")]
    Ps {
        path: usize,
        pol: PolFilter,
        phi: f64,
    },
    #[serde(rename = "rot")]
    Rot { path: usize },
    #[serde(rename = "wp")]
    Wp { path: usize, theta: f64 },
    #[serde(rename = "pbs")]
    Pbs { paths: [usize; 2] },
    #[serde(rename = "perm")]
    Perm { map: Vec<usize> },
}

#[derive(Default, Serialize, Deserialize)]
struct MetaRecord {
    #[serde(default)]
    source_gates: Vec<Vec<Option<usize>>>,
    #[serde(default)]
    gates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assignment: Option<AssignmentRecord>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentRecord {
    location: Vec<usize>,
    pol: Option<usize>,
}

impl From<&OpticalElement> for ElementRecord {
    fn from(e: &OpticalElement) -> Self {
        match e.clone() {
            OpticalElement::BeamSplitter { paths, theta } => ElementRecord::Bs { paths, theta },
            OpticalElement::PhaseShifter { path, pol, phi } => ElementRecord::Ps { path, pol, phi },
            OpticalElement::Rotator { path } => ElementRecord::Rot { path },
            OpticalElement::WavePlate { path, theta } => ElementRecord::Wp { path, theta },
            OpticalElement::Pbs { paths } => ElementRecord::Pbs { paths },
            OpticalElement::Crossing { map } => ElementRecord::Perm { map },
        }
    }
}

impl From<ElementRecord> for OpticalElement {
    fn from(r: ElementRecord) -> Self {
        match r {
            ElementRecord::Bs { paths, theta } => OpticalElement::BeamSplitter { paths, theta },
            ElementRecord::Ps { path, pol, phi } => OpticalElement::PhaseShifter { path, pol, phi },
            ElementRecord::Rot { path } => OpticalElement::Rotator { path },
            ElementRecord::Wp { path, theta } => OpticalElement::WavePlate { path, theta },
            ElementRecord::Pbs { paths } => OpticalElement::Pbs { paths },
            ElementRecord::Perm { map } => OpticalElement::Crossing { map },
        }
    }
}

pub fn to_json(net: &OpticalNetlist) -> String {
    let file = NetlistFile {
        version: FORMAT_VERSION,
        n_loc: net.space.n_loc(),
        uses_pol: net.space.uses_pol(),
        layers: net
            .layers
            .iter()
            .map(|l| l.iter().map(|p| (&p.element).into()).collect())
            .collect(),
        output_relabel: net.output_relabel.clone(),
        meta: MetaRecord {
            source_gates: net
                .layers
                .iter()
                .map(|l| l.iter().map(|p| p.source).collect())
                .collect(),
            gates: net.meta.gates.clone(),
            assignment: net.meta.assignment.as_ref().map(|a| AssignmentRecord {
                location: a.location().iter().map(|q| q.0).collect(),
                pol: a.pol_qubit().map(|q| q.0),
            }),
        },
    };
    let mut s = serde_json::to_string_pretty(&file).expect("netlist serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<OpticalNetlist> {
    let file: NetlistFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported version {}",
            file.version
        )));
    }
    let sources = &file.meta.source_gates;
    if !sources.is_empty()
        && (sources.len() != file.layers.len()
            || sources
                .iter()
                .zip(&file.layers)
                .any(|(s, l)| s.len() != l.len()))
    {
        return Err(Error::Format(
            "meta.source_gates does not match the layer structure".into(),
        ));
    }
    let assignment = file
        .meta
        .assignment
        .map(|a| {
            let n = a.location.len() + usize::from(a.pol.is_some());
            QubitAssignment::new(
                n,
                a.pol.map(QubitId),
                a.location.into_iter().map(QubitId).collect(),
            )
        })
        .transpose()?;
    let space = ModeSpace::new(file.n_loc, file.uses_pol);
    if let Some(a) = &assignment {
        if a.space() != space {
            return Err(Error::Format(
                "meta.assignment does not match n_loc/uses_pol".into(),
            ));
        }
    }
    let layers = file
        .layers
        .into_iter()
        .enumerate()
        .map(|(li, layer)| {
            layer
                .into_iter()
                .enumerate()
                .map(|(ei, r)| PlacedElement::new(r.into(), sources.get(li).and_then(|s| s[ei])))
                .collect()
        })
        .collect();
    let net = OpticalNetlist {
        space,
        layers,
        output_relabel: file.output_relabel,
        meta: NetlistMeta {
            gates: file.meta.gates,
            assignment,
        },
    };
    net.validate()?;
    Ok(net)
}
