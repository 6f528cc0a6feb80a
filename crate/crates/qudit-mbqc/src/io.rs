//! JSON interchange for circuits, patterns and reports.
//!
//! Circuits: `{d, qudits, inputs, outputs, ops: [{gate, params, sites}]}`.
//! Patterns: `{d, qudits, inputs, outputs, commands: [{kind, sites,
//! theta?, s?, t?}]}` with signals as `{"qudit": coeff}` maps. Integer
//! parameters are written as JSON integers, angles as doubles in radians.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::circuit::{Circuit, Op};
use crate::error::{Error, Result};
use crate::pattern::{Command, Pattern, Signal};
use crate::sim::GateKind;
use crate::{Dim, QuditId};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpJson {
    gate: String,
    #[serde(default)]
    params: Vec<Number>,
    sites: Vec<QuditId>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    d: Dim,
    qudits: Vec<QuditId>,
    inputs: Vec<QuditId>,
    outputs: Vec<QuditId>,
    ops: Vec<OpJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommandJson {
    kind: String,
    sites: Vec<QuditId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<Signal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<Signal>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternJson {
    d: Dim,
    qudits: Vec<QuditId>,
    inputs: Vec<QuditId>,
    outputs: Vec<QuditId>,
    commands: Vec<CommandJson>,
}

/// A circuit or a pattern, as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Circuit(Circuit),
    Pattern(Pattern),
}

impl Artifact {
    pub fn dim(&self) -> Dim {
        match self {
            Artifact::Circuit(c) => c.dim(),
            Artifact::Pattern(p) => p.dim(),
        }
    }

    pub fn inputs(&self) -> &[QuditId] {
        match self {
            Artifact::Circuit(c) => c.inputs(),
            Artifact::Pattern(p) => p.inputs(),
        }
    }

    pub fn outputs(&self) -> &[QuditId] {
        match self {
            Artifact::Circuit(c) => c.outputs(),
            Artifact::Pattern(p) => p.outputs(),
        }
    }
}

fn ints(v: &[u32]) -> Vec<Number> {
    v.iter().map(|&k| Number::from(k)).collect()
}

fn floats(v: &[f64]) -> Vec<Number> {
    // Finite by construction (gate checks reject NaN and infinities).
    v.iter()
        .map(|&x| Number::from_f64(x).expect("finite angle"))
        .collect()
}

fn gate_params(g: &GateKind) -> Vec<Number> {
    match g {
        GateKind::F | GateKind::Finv | GateKind::P | GateKind::Swap => vec![],
        GateKind::X(k) | GateKind::Z(k) | GateKind::CZ(k) | GateKind::CX(k) => ints(&[*k]),
        GateKind::R(t) | GateKind::V(t) | GateKind::Diag(t) => floats(t),
        GateKind::Fanout(v) | GateKind::Mod(v) => ints(v),
    }
}

fn parse_gate(name: &str, params: &[Number], index: usize) -> Result<GateKind> {
    let bad = |reason: String| Error::Json(format!("ops[{index}]: {reason}"));
    let as_ints = || -> Result<Vec<u32>> {
        params
            .iter()
            .map(|n| {
                n.as_u64()
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| {
                        bad(format!(
                            "{name} expects non-negative integer params, got {n}"
                        ))
                    })
            })
            .collect()
    };
    let as_floats = || -> Vec<f64> { params.iter().filter_map(Number::as_f64).collect() };
    let one = || -> Result<u32> {
        match as_ints()?.as_slice() {
            [] => Ok(1),
            [k] => Ok(*k),
            _ => Err(bad(format!("{name} takes a single exponent"))),
        }
    };
    let none = |g: GateKind| -> Result<GateKind> {
        if params.is_empty() {
            Ok(g)
        } else {
            Err(bad(format!("{name} takes no params")))
        }
    };
    Ok(match name {
        "F" => none(GateKind::F)?,
        "Finv" => none(GateKind::Finv)?,
        "P" => none(GateKind::P)?,
        "SWAP" => none(GateKind::Swap)?,
        "X" => GateKind::X(one()?),
        "Z" => GateKind::Z(one()?),
        "CZ" => GateKind::CZ(one()?),
        "CX" => GateKind::CX(one()?),
        "R" => GateKind::R(as_floats()),
        "V" => GateKind::V(as_floats()),
        "DIAG" => GateKind::Diag(as_floats()),
        "FANOUT" => GateKind::Fanout(as_ints()?),
        "MOD" => GateKind::Mod(as_ints()?),
        other => return Err(bad(format!("unknown gate {other:?}"))),
    })
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = path.trim_end_matches(".?");
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let msg = inner.to_string();
        let msg = msg
            .strip_suffix(&format!(" at line {line} column {column}"))
            .unwrap_or(&msg);
        let at = match path {
            "" | "." | "?" => String::new(),
            p => format!(" at `{p}`"),
        };
        Error::Json(format!("line {line} column {column}{at}: {msg}"))
    })
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("in-memory serialisation");
    s.push('\n');
    s
}

pub fn circuit_to_json(c: &Circuit) -> String {
    pretty(&CircuitJson {
        d: c.dim(),
        qudits: c.qudits().to_vec(),
        inputs: c.inputs().to_vec(),
        outputs: c.outputs().to_vec(),
        ops: c
            .ops()
            .iter()
            .map(|o| OpJson {
                gate: o.gate.name().into(),
                params: gate_params(&o.gate),
                sites: o.sites.clone(),
            })
            .collect(),
    })
}

fn circuit_from(j: CircuitJson) -> Result<Circuit> {
    let ops = j
        .ops
        .iter()
        .enumerate()
        .map(|(i, o)| Ok(Op::new(parse_gate(&o.gate, &o.params, i)?, o.sites.clone())))
        .collect::<Result<Vec<_>>>()?;
    Circuit::new(j.d, j.qudits, j.inputs, j.outputs, ops)
}

pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    circuit_from(parse(text)?)
}

pub fn pattern_to_json(p: &Pattern) -> String {
    let nonzero = |s: &Signal| (!s.is_zero()).then(|| s.clone());
    let commands = p
        .commands()
        .iter()
        .map(|c| match c {
            Command::E(i, j) => CommandJson {
                kind: "E".into(),
                sites: vec![*i, *j],
                theta: None,
                s: None,
                t: None,
            },
            Command::M {
                qudit,
                angles,
                s,
                t,
            } => CommandJson {
                kind: "M".into(),
                sites: vec![*qudit],
                theta: Some(angles.clone()),
                s: nonzero(s),
                t: nonzero(t),
            },
            Command::X { qudit, signal } | Command::Z { qudit, signal } => CommandJson {
                kind: if matches!(c, Command::X { .. }) {
                    "X"
                } else {
                    "Z"
                }
                .into(),
                sites: vec![*qudit],
                theta: None,
                s: Some(signal.clone()),
                t: None,
            },
        })
        .collect();
    pretty(&PatternJson {
        d: p.dim(),
        qudits: p.qudits().to_vec(),
        inputs: p.inputs().to_vec(),
        outputs: p.outputs().to_vec(),
        commands,
    })
}

fn command_from(dim: Dim, c: CommandJson, index: usize) -> Result<Command> {
    let bad = |reason: &str| Error::Json(format!("commands[{index}]: {reason}"));
    let one = |sites: &[QuditId]| match sites {
        [q] => Ok(*q),
        _ => Err(bad("expects exactly one site")),
    };
    let signal = |s: Option<Signal>| s.unwrap_or_default().reduced(dim);
    match c.kind.as_str() {
        "E" => match c.sites.as_slice() {
            [i, j] if c.theta.is_none() && c.s.is_none() && c.t.is_none() => Ok(Command::E(*i, *j)),
            [_, _] => Err(bad("E takes no theta or signals")),
            _ => Err(bad("E expects exactly two sites")),
        },
        "M" => Ok(Command::M {
            qudit: one(&c.sites)?,
            angles: c.theta.ok_or_else(|| bad("M needs theta"))?,
            s: signal(c.s),
            t: signal(c.t),
        }),
        "X" | "Z" => {
            if c.theta.is_some() || c.t.is_some() {
                return Err(bad("corrections take only a signal `s`"));
            }
            let qudit = one(&c.sites)?;
            let signal = signal(c.s);
            Ok(if c.kind == "X" {
                Command::X { qudit, signal }
            } else {
                Command::Z { qudit, signal }
            })
        }
        other => Err(bad(&format!("unknown command kind {other:?}"))),
    }
}

fn pattern_from(j: PatternJson) -> Result<Pattern> {
    let dim = j.d;
    let commands = j
        .commands
        .into_iter()
        .enumerate()
        .map(|(i, c)| command_from(dim, c, i))
        .collect::<Result<Vec<_>>>()?;
    Pattern::new(dim, j.qudits, j.inputs, j.outputs, commands)
}

pub fn pattern_from_json(text: &str) -> Result<Pattern> {
    pattern_from(parse(text)?)
}

/// Reads either format, telling them apart by the `ops` / `commands` key.
pub fn artifact_from_json(text: &str) -> Result<Artifact> {
    let v: Value = parse(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Json("top level must be an object".into()))?;
    if obj.contains_key("ops") {
        circuit_from_json(text).map(Artifact::Circuit)
    } else if obj.contains_key("commands") {
        pattern_from_json(text).map(Artifact::Pattern)
    } else {
        Err(Error::Json(
            "expected an `ops` (circuit) or `commands` (pattern) field".into(),
        ))
    }
}

pub fn artifact_to_json(a: &Artifact) -> String {
    match a {
        Artifact::Circuit(c) => circuit_to_json(c),
        Artifact::Pattern(p) => pattern_to_json(p),
    }
}

/// Pretty JSON with a trailing newline for any serialisable report.
pub fn report_to_json<T: Serialize>(report: &T) -> String {
    pretty(report)
}
