//! Compilers between circuits and patterns, and the constant/low-depth
//! circuit builders of the fan-out model.

mod coherent;
mod cpauli;
mod fanout;
mod patterns;

use serde::Serialize;

use crate::circuit::{Circuit, Op};
use crate::pattern::Pattern;
use crate::sim::GateKind;
use crate::{Dim, QuditId};

pub use coherent::{pattern_to_circuit_coherent, pattern_to_fanout_circuit};
pub use cpauli::{controlled_pauli_constant_depth, AffineForm, CxMatrix};
pub use fanout::{
    build_fanout, build_generalized, parallelize_commuting, FanoutVariant, GeneralizedKind,
};
pub use patterns::{
    circuit_to_pattern_cluster, circuit_to_pattern_composite, circuit_to_pattern_standard,
    clifford_constant_depth, insert_cluster_padding, CliffordOutput, CliffordTarget,
};

/// Deterministic supply of fresh qudit ids, counting up from a start value.
#[derive(Clone, Debug)]
pub(crate) struct Fresh {
    next: QuditId,
    issued: Vec<QuditId>,
}

impl Fresh {
    pub(crate) fn after<'a>(used: impl IntoIterator<Item = &'a QuditId>) -> Self {
        let next = used.into_iter().copied().max().map_or(0, |m| m + 1);
        Fresh {
            next,
            issued: Vec::new(),
        }
    }

    pub(crate) fn take(&mut self) -> QuditId {
        let q = self.next;
        self.next += 1;
        self.issued.push(q);
        q
    }

    pub(crate) fn take_n(&mut self, n: usize) -> Vec<QuditId> {
        (0..n).map(|_| self.take()).collect()
    }

    pub(crate) fn issued(&self) -> &[QuditId] {
        &self.issued
    }
}

/// Inverse of an op sequence using only gates of the fan-out model: a
/// plain fan-out is undone by `d - 1` further plain fan-outs.
pub(crate) fn fanout_model_inverse(dim: Dim, ops: &[Op]) -> Vec<Op> {
    let mut out = Vec::new();
    for op in ops.iter().rev() {
        match &op.gate {
            GateKind::Fanout(v) if v.iter().all(|&x| x == 1) => {
                for _ in 1..dim.d() {
                    out.push(op.clone());
                }
            }
            g => {
                for inv in g.inverse(dim) {
                    out.push(Op::new(inv, op.sites.clone()));
                }
            }
        }
    }
    out
}

/// Size, depth and qudit count of an artifact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub qudits: usize,
    pub size: usize,
    pub depth: usize,
}

impl From<&Circuit> for Metrics {
    fn from(c: &Circuit) -> Self {
        let r = c.depth_and_size();
        Metrics {
            qudits: c.qudits().len(),
            size: r.size,
            depth: r.depth,
        }
    }
}

impl From<&Pattern> for Metrics {
    fn from(p: &Pattern) -> Self {
        let r = p.depth_and_size();
        Metrics {
            qudits: p.qudits().len(),
            size: r.size,
            depth: r.depth,
        }
    }
}

/// Summary emitted alongside a conversion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConversionReport {
    pub conversion: String,
    pub input: Metrics,
    pub output: Metrics,
    /// Qudits present in the output but not in the input.
    pub ancillas: usize,
}

impl ConversionReport {
    pub fn new(conversion: &str, input: Metrics, output: Metrics) -> Self {
        ConversionReport {
            conversion: conversion.to_string(),
            input,
            output,
            ancillas: output.qudits.saturating_sub(input.qudits),
        }
    }
}
