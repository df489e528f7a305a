//! ASCII rendering of a netlist: one rail per mode, one column per layer.
//!
//! A multi-mode element shows its glyph on its first mode and `┼` on the
//! others; crossings mark every moved mode with `✕`. A legend lists each
//! element with its parameters.

use std::fmt::Write;

use crate::optics::{OpticalElement, OpticalNetlist, PolFilter};

const CELL: usize = 5;

fn glyph(e: &OpticalElement) -> &'static str {
    match e {
        OpticalElement::BeamSplitter { .. } => "BS",
        OpticalElement::Pbs { .. } => "PBS",
        OpticalElement::PhaseShifter { .. } => "φ",
        OpticalElement::Rotator { .. } => "R",
        OpticalElement::WavePlate { .. } => "W",
        OpticalElement::Crossing { .. } => "✕",
    }
}

fn cell(text: &str) -> String {
    let len = text.chars().count();
    let left = (CELL - len) / 2;
    format!(
        "{}{}{}",
        "─".repeat(left),
        text,
        "─".repeat(CELL - len - left)
    )
}

fn describe(net: &OpticalNetlist, e: &OpticalElement) -> String {
    let sp = &net.space;
    let path = |p: usize| {
        sp.label(sp.mode(p, crate::optics::Pol::H))
            .split(',')
            .next()
            .unwrap()
            .to_string()
    };
    match e {
        OpticalElement::BeamSplitter { paths, theta } => {
            format!("BS {}|{} θ={theta:.6}", path(paths[0]), path(paths[1]))
        }
        OpticalElement::Pbs { paths } => format!("PBS {}|{}", path(paths[0]), path(paths[1])),
        OpticalElement::PhaseShifter { path: p, pol, phi } => {
            let pol = match pol {
                PolFilter::H => "H",
                PolFilter::V => "V",
                PolFilter::Both => "both",
            };
            format!("φ {} pol={pol} φ={phi:.6}", path(*p))
        }
        OpticalElement::Rotator { path: p } => format!("R {}", path(*p)),
        OpticalElement::WavePlate { path: p, theta } => format!("W {} θ={theta:.6}", path(*p)),
        OpticalElement::Crossing { map } => {
            let moves: Vec<String> = map
                .iter()
                .enumerate()
                .filter(|(p, q)| p != *q)
                .map(|(p, &q)| format!("{}→{}", path(p), path(q)))
                .collect();
            format!("✕ {}", moves.join(" "))
        }
    }
}

pub fn render(net: &OpticalNetlist) -> String {
    let sp = &net.space;
    let dim = sp.dim();
    let labels: Vec<String> = (0..dim).map(|m| sp.label(m)).collect();
    let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let mut rows: Vec<String> = labels.iter().map(|l| format!("{l:>width$} ─")).collect();
    for layer in &net.layers {
        let mut cells = vec![cell(""); dim];
        for placed in layer {
            let e = &placed.element;
            let modes = e.modes(sp);
            match e {
                OpticalElement::Crossing { .. } => {
                    modes.iter().for_each(|&m| cells[m] = cell(glyph(e)))
                }
                _ => {
                    for (i, &m) in modes.iter().enumerate() {
                        cells[m] = cell(if i == 0 { glyph(e) } else { "┼" });
                    }
                }
            }
        }
        for (row, c) in rows.iter_mut().zip(cells) {
            row.push_str(&c);
        }
    }
    let mut out = String::new();
    for (m, row) in rows.iter().enumerate() {
        out.push_str(row);
        out.push('─');
        if let Some(map) = &net.output_relabel {
            let p = sp.path_of(m);
            let relabeled = sp.mode(map[p], sp.pol_of(m));
            if relabeled != m {
                let _ = write!(out, " ⇒ {}", labels[relabeled]);
            }
        }
        out.push('\n');
    }
    for (li, layer) in net.layers.iter().enumerate() {
        let items: Vec<String> = layer.iter().map(|p| describe(net, &p.element)).collect();
        let _ = writeln!(out, "L{}: {}", li + 1, items.join("; "));
    }
    out
}
