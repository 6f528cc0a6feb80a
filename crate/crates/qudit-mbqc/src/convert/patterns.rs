use std::collections::HashMap;

use crate::circuit::{Circuit, Op};
use crate::convert::coherent::pattern_to_fanout_circuit;
use crate::convert::Fresh;
use crate::error::{Error, Result};
use crate::pattern::{Command, Pattern, Signal};
use crate::rewrite::completely_standardise;
use crate::sim::GateKind;
use crate::QuditId;

/// Layer hint for an entangling command: chain edges of a wire alternate
/// between layers 0 and 1, circuit `CZ`s go to layer 2.
type EdgeLayer = u8;

struct Composite {
    fresh: Fresh,
    wire: HashMap<QuditId, QuditId>,
    hops: HashMap<QuditId, u8>,
    commands: Vec<Command>,
    layers: Vec<EdgeLayer>,
}

impl Composite {
    fn v(&mut self, q: QuditId, angles: Vec<f64>) {
        let cur = self.wire[&q];
        let next = self.fresh.take();
        self.commands.push(Command::E(cur, next));
        self.commands.push(Command::measure(cur, angles));
        self.commands.push(Command::X {
            qudit: next,
            signal: Signal::var(cur),
        });
        let h = self.hops.entry(q).or_insert(0);
        self.layers.push(*h % 2);
        *h += 1;
        self.wire.insert(q, next);
    }
}

fn composite(c: &Circuit) -> Result<(Pattern, Vec<EdgeLayer>)> {
    let dim = c.dim();
    let v0 = dim.zero_angles();
    let mut b = Composite {
        fresh: Fresh::after(c.qudits()),
        wire: c.qudits().iter().map(|&q| (q, q)).collect(),
        hops: HashMap::new(),
        commands: Vec::new(),
        layers: Vec::new(),
    };
    // F^3 |+_0> = |0>: non-inputs start in |0> in a circuit.
    for &q in c.qudits() {
        if !c.inputs().contains(&q) {
            for _ in 0..3 {
                b.v(q, v0.clone());
            }
        }
    }
    for op in c.ops() {
        match &op.gate {
            GateKind::V(theta) => b.v(op.sites[0], theta.clone()),
            GateKind::CZ(1) => {
                let e = Command::E(b.wire[&op.sites[0]], b.wire[&op.sites[1]]);
                b.commands.push(e);
                b.layers.push(2);
            }
            g => {
                return Err(Error::UnsupportedGate {
                    gate: g.name().into(),
                    context: "circuit to pattern conversion (lower to {CZ, v} first)".into(),
                })
            }
        }
    }
    for &q in c.qudits() {
        if !c.outputs().contains(&q) {
            b.commands.push(Command::measure(b.wire[&q], v0.clone()));
        }
    }
    let mut qudits = c.qudits().to_vec();
    qudits.extend(b.fresh.issued().iter().copied());
    let outputs = c.outputs().iter().map(|q| b.wire[q]).collect();
    let p = Pattern::new(dim, qudits, c.inputs().to_vec(), outputs, b.commands)?;
    Ok((p, b.layers))
}

/// Serial composite of the basic patterns of every gate: `v(theta)` on
/// wire `i` becomes `X_a^{s_i} M_i^theta E_{i,a}` with a fresh `a`, `CZ`
/// becomes `E`. Fresh ids count up from the circuit's largest id.
pub fn circuit_to_pattern_composite(c: &Circuit) -> Result<Pattern> {
    composite(c).map(|(p, _)| p)
}

/// The composite pattern, completely standardised.
pub fn circuit_to_pattern_standard(c: &Circuit) -> Result<Pattern> {
    completely_standardise(&circuit_to_pattern_composite(c)?)
}

/// Inserts four `v(0) = F` gates on a wire between two consecutive `CZ`s
/// (`F^4 = I`), so no pattern qudit ends up with more than one `CZ` edge.
pub fn insert_cluster_padding(c: &Circuit) -> Result<Circuit> {
    let v0 = GateKind::V(c.dim().zero_angles());
    let mut last_cz: HashMap<QuditId, bool> = HashMap::new();
    let mut ops = Vec::new();
    for op in c.ops() {
        let is_cz = matches!(op.gate, GateKind::CZ(_));
        if is_cz {
            for &s in &op.sites {
                if last_cz.get(&s).copied().unwrap_or(false) {
                    for _ in 0..4 {
                        ops.push(Op::new(v0.clone(), vec![s]));
                    }
                }
            }
        }
        for &s in &op.sites {
            last_cz.insert(s, is_cz);
        }
        ops.push(op.clone());
    }
    Circuit::new(
        c.dim(),
        c.qudits().to_vec(),
        c.inputs().to_vec(),
        c.outputs().to_vec(),
        ops,
    )
}

/// Cluster-state pattern: padding, composite, complete standardisation,
/// and the entangling block ordered as three layers (two for the wire
/// chains, one for the `CZ` matching), so its depth is at most 3.
pub fn circuit_to_pattern_cluster(c: &Circuit) -> Result<Pattern> {
    let (p, layers) = composite(&insert_cluster_padding(c)?)?;
    let s = completely_standardise(&p)?;
    let mut entangle: Vec<(EdgeLayer, Command)> = Vec::new();
    let mut rest = Vec::new();
    for cmd in s.commands() {
        if cmd.is_entangling() {
            entangle.push((layers[entangle.len()], cmd.clone()));
        } else {
            rest.push(cmd.clone());
        }
    }
    assert_eq!(
        entangle.len(),
        layers.len(),
        "standardisation keeps every entangler"
    );
    entangle.sort_by_key(|(l, _)| *l);
    let mut commands: Vec<Command> = entangle.into_iter().map(|(_, c)| c).collect();
    commands.extend(rest);
    s.with_commands(commands)
}

/// Target of [`clifford_constant_depth`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordTarget {
    Pattern,
    FanoutCircuit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CliffordOutput {
    Pattern(Pattern),
    Circuit(Circuit),
}

/// Constant-depth compilation of a circuit over `{F, F^dagger, P, CZ}`:
/// a completely standard cluster pattern without dependent measurements,
/// optionally compiled further into the fan-out model.
pub fn clifford_constant_depth(c: &Circuit, target: CliffordTarget) -> Result<CliffordOutput> {
    if let Some(op) = c.ops().iter().find(|o| {
        !matches!(
            o.gate,
            GateKind::F | GateKind::Finv | GateKind::P | GateKind::CZ(_)
        )
    }) {
        return Err(Error::NonClifford(format!(
            "{} is outside {{F, Finv, P, CZ}}",
            op.gate.name()
        )));
    }
    let p = circuit_to_pattern_cluster(&c.lower_to_guni()?)?;
    debug_assert_eq!(p.dependent_measurements(), 0);
    Ok(match target {
        CliffordTarget::Pattern => CliffordOutput::Pattern(p),
        CliffordTarget::FanoutCircuit => CliffordOutput::Circuit(pattern_to_fanout_circuit(&p)?),
    })
}
