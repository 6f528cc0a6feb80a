//! Circuit IR: a computation `(V, I, O, ops)` over qudits.
//!
//! Non-input qudits start in `|0>`. Ops are stored in execution order.

use std::collections::{BTreeSet, HashMap, HashSet};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{Dim, C64, MAX_DENSE_DIM};
use crate::error::{Error, Result};
use crate::sim::{GateKind, SparseState, StateVector};
use crate::QuditId;

#[derive(Clone, Debug, PartialEq)]
pub struct Op {
    pub gate: GateKind,
    pub sites: Vec<QuditId>,
}

impl Op {
    pub fn new(gate: GateKind, sites: Vec<QuditId>) -> Self {
        Op { gate, sites }
    }
}

/// Depth, size and one longest dependency chain (indices into the op or
/// command list).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    pub depth: usize,
    pub size: usize,
    pub longest_path: Vec<usize>,
}

/// Which gates a circuit may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateModel {
    /// Fixed-arity gates acting on at most `max_arity` qudits.
    Standard { max_arity: usize },
    /// Standard gates plus plain fan-out of any arity.
    Fanout { max_arity: usize },
}

impl Default for GateModel {
    fn default() -> Self {
        GateModel::Standard { max_arity: 2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    dim: Dim,
    qudits: Vec<QuditId>,
    inputs: Vec<QuditId>,
    outputs: Vec<QuditId>,
    ops: Vec<Op>,
    members: HashSet<QuditId>,
}

fn distinct(list: &[QuditId]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &q in list {
        if !seen.insert(q) {
            return Err(Error::DuplicateQudit(q));
        }
    }
    Ok(())
}

impl Circuit {
    pub fn new(
        dim: Dim,
        qudits: Vec<QuditId>,
        inputs: Vec<QuditId>,
        outputs: Vec<QuditId>,
        ops: Vec<Op>,
    ) -> Result<Self> {
        distinct(&qudits)?;
        distinct(&inputs)?;
        distinct(&outputs)?;
        let set: BTreeSet<QuditId> = qudits.iter().copied().collect();
        for q in inputs.iter().chain(&outputs) {
            if !set.contains(q) {
                return Err(Error::UnknownQudit(*q));
            }
        }
        let mut c = Circuit {
            dim,
            members: qudits.iter().copied().collect(),
            qudits,
            inputs,
            outputs,
            ops: Vec::with_capacity(ops.len()),
        };
        for op in ops {
            c.push(op.gate, op.sites)?;
        }
        Ok(c)
    }

    /// A circuit on `qudits` with every qudit both input and output.
    pub fn on(dim: Dim, qudits: Vec<QuditId>) -> Result<Self> {
        Self::new(dim, qudits.clone(), qudits.clone(), qudits, Vec::new())
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn qudits(&self) -> &[QuditId] {
        &self.qudits
    }

    pub fn inputs(&self) -> &[QuditId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[QuditId] {
        &self.outputs
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Appends a gate after checking arity, parameters and sites.
    pub fn push(&mut self, gate: GateKind, sites: Vec<QuditId>) -> Result<()> {
        gate.check(self.dim, sites.len())?;
        distinct(&sites)?;
        for s in &sites {
            if !self.members.contains(s) {
                return Err(Error::UnknownQudit(*s));
            }
        }
        self.ops.push(Op::new(gate.normalized(self.dim), sites));
        Ok(())
    }

    /// Registers an extra qudit (prepared in `|0>`, not an output).
    pub fn add_qudit(&mut self, q: QuditId) -> Result<()> {
        if !self.members.insert(q) {
            return Err(Error::DuplicateQudit(q));
        }
        self.qudits.push(q);
        Ok(())
    }

    pub fn max_qudit(&self) -> Option<QuditId> {
        self.qudits.iter().copied().max()
    }

    pub fn size(&self) -> usize {
        self.ops.iter().map(|o| o.sites.len()).sum()
    }

    /// Longest chain of ops where consecutive ops share a qudit.
    pub fn depth_and_size(&self) -> DepthReport {
        let mut height: HashMap<QuditId, (usize, usize)> = HashMap::new();
        let mut pred: Vec<Option<usize>> = Vec::with_capacity(self.ops.len());
        let mut best = (0usize, None);
        for (k, op) in self.ops.iter().enumerate() {
            let mut h = 0;
            let mut p = None;
            for s in &op.sites {
                if let Some(&(hs, last)) = height.get(s) {
                    if hs > h {
                        h = hs;
                        p = Some(last);
                    }
                }
            }
            let h = h + 1;
            for s in &op.sites {
                height.insert(*s, (h, k));
            }
            pred.push(p);
            if h > best.0 {
                best = (h, Some(k));
            }
        }
        DepthReport {
            depth: best.0,
            size: self.size(),
            longest_path: trace(best.1, &pred),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth_and_size().depth
    }

    /// Checks every gate against a gate model.
    pub fn validate_gate_set(&self, model: GateModel) -> Result<()> {
        for op in &self.ops {
            let arity = op.sites.len();
            let ok = match model {
                GateModel::Standard { max_arity } => arity <= max_arity,
                GateModel::Fanout { max_arity } => match &op.gate {
                    GateKind::Fanout(v) => v.iter().all(|&x| x == 1) || arity <= max_arity,
                    _ => arity <= max_arity,
                },
            };
            if !ok {
                return Err(Error::UnsupportedGate {
                    gate: format!("{} on {} qudits", op.gate.name(), arity),
                    context: format!("{model:?}"),
                });
            }
        }
        Ok(())
    }

    fn initial_sparse(&self, input: &StateVector) -> Result<SparseState> {
        self.dim.ensure_same(input.dim())?;
        let aligned = input.reorder(&self.inputs)?;
        let mut state = SparseState::from_dense(&aligned);
        let rest: Vec<QuditId> = self
            .qudits
            .iter()
            .copied()
            .filter(|q| !self.inputs.contains(q))
            .collect();
        state.push_zeros(&rest)?;
        Ok(state)
    }

    /// Full final state (inputs first in `I` order, then the other qudits
    /// in `V` order), using the dense simulator.
    pub fn simulate(&self, input: &StateVector) -> Result<StateVector> {
        self.dim.ensure_same(input.dim())?;
        let mut state = input.reorder(&self.inputs)?;
        for &q in &self.qudits {
            if !self.inputs.contains(&q) {
                state.push_zero(q)?;
            }
        }
        for op in &self.ops {
            state.apply_gate(&op.gate, &op.sites)?;
        }
        Ok(state)
    }

    /// Final state held as a sparse support map.
    pub fn simulate_sparse(&self, input: &StateVector) -> Result<SparseState> {
        let mut state = self.initial_sparse(input)?;
        for op in &self.ops {
            state.apply_gate(&op.gate, &op.sites)?;
        }
        Ok(state)
    }

    /// Reduced density matrix on the outputs (in `O` order).
    pub fn output_density(&self, input: &StateVector) -> Result<DMatrix<C64>> {
        self.simulate_sparse(input)?.reduced_density(&self.outputs)
    }

    /// Output state when every non-output qudit ends in `|0>`.
    pub fn output_state_clean(&self, input: &StateVector) -> Result<StateVector> {
        self.simulate_sparse(input)?
            .restrict_clean(&self.outputs, 1e-9)
    }

    /// The `d^|O| x d^|I|` matrix realised by the circuit, assuming every
    /// non-output qudit is returned to `|0>` (errors otherwise).
    pub fn unitary(&self) -> Result<DMatrix<C64>> {
        let rows = self.dim.checked_pow(self.outputs.len(), MAX_DENSE_DIM)?;
        let cols = self.dim.checked_pow(self.inputs.len(), MAX_DENSE_DIM)?;
        let mut m = DMatrix::<C64>::zeros(rows, cols);
        let mut digits = vec![0u32; self.inputs.len()];
        for col in 0..cols {
            crate::algebra::decode(col, self.dim.du(), &mut digits);
            let input = StateVector::basis(self.dim, &self.inputs, &digits)?;
            let out = self.output_state_clean(&input)?;
            for (r, a) in out.amplitudes().iter().enumerate() {
                m[(r, col)] = *a;
            }
        }
        Ok(m)
    }

    /// Product of the embedded gate matrices (every qudit in `V` order).
    /// Independent of the simulator; used as a cross-check.
    pub fn matrix_product(&self) -> Result<DMatrix<C64>> {
        let n = self.qudits.len();
        let size = self.dim.checked_pow(n, MAX_DENSE_DIM)?;
        let pos: HashMap<QuditId, usize> = self
            .qudits
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, i))
            .collect();
        let mut acc = DMatrix::<C64>::identity(size, size);
        for op in &self.ops {
            let sites: Vec<usize> = op.sites.iter().map(|s| pos[s]).collect();
            acc = op.gate.embedded_matrix(self.dim, n, &sites)? * acc;
        }
        Ok(acc)
    }

    /// Inverse circuit: ops reversed, each replaced by its inverse sequence.
    /// Inputs and outputs swap roles.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut ops = Vec::new();
        for op in self.ops.iter().rev() {
            for g in op.gate.inverse(self.dim) {
                ops.push(Op::new(g, op.sites.clone()));
            }
        }
        Circuit::new(
            self.dim,
            self.qudits.clone(),
            self.outputs.clone(),
            self.inputs.clone(),
            ops,
        )
    }

    /// Copy with every qudit id passed through `f` (must be injective).
    pub fn relabel(&self, f: &dyn Fn(QuditId) -> QuditId) -> Result<Circuit> {
        let map = |v: &[QuditId]| v.iter().map(|&q| f(q)).collect::<Vec<_>>();
        let ops = self
            .ops
            .iter()
            .map(|o| Op::new(o.gate.clone(), map(&o.sites)))
            .collect();
        Circuit::new(
            self.dim,
            map(&self.qudits),
            map(&self.inputs),
            map(&self.outputs),
            ops,
        )
    }

    /// Rewrites into the universal set `{CZ, v(theta)}`.
    pub fn lower_to_guni(&self) -> Result<Circuit> {
        let mut out = Circuit {
            dim: self.dim,
            qudits: self.qudits.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            ops: Vec::new(),
            members: self.members.clone(),
        };
        for op in &self.ops {
            lower_op(self.dim, &op.gate, &op.sites, &mut out.ops)?;
        }
        Ok(out)
    }

    /// True when every op is `CZ` (exponent 1) or `V`.
    pub fn is_guni(&self) -> bool {
        self.ops
            .iter()
            .all(|o| matches!(o.gate, GateKind::CZ(1) | GateKind::V(_)))
    }
}

/// Reconstructs a chain from predecessor links ending at `end`.
pub(crate) fn trace(end: Option<usize>, pred: &[Option<usize>]) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cur = end;
    while let Some(k) = cur {
        path.push(k);
        cur = pred[k];
    }
    path.reverse();
    path
}

fn v0(dim: Dim) -> GateKind {
    GateKind::V(dim.zero_angles())
}

/// `R(theta)` as `v(theta)` followed by three `v(0)`: `F^3 F R = R`.
fn lower_diag1(dim: Dim, theta: Vec<f64>, q: QuditId, out: &mut Vec<Op>) {
    out.push(Op::new(GateKind::V(theta), vec![q]));
    for _ in 0..3 {
        out.push(Op::new(v0(dim), vec![q]));
    }
}

fn lower_cx(dim: Dim, k: u32, c: QuditId, t: QuditId, out: &mut Vec<Op>) {
    let k = k % dim.d();
    if k == 0 {
        return;
    }
    // CX^k = F^dagger_t CZ^k F_t
    out.push(Op::new(v0(dim), vec![t]));
    for _ in 0..k {
        out.push(Op::new(GateKind::CZ(1), vec![c, t]));
    }
    for _ in 0..3 {
        out.push(Op::new(v0(dim), vec![t]));
    }
}

/// Temporal gate sequence for SWAP: `CX(i->j) CX^-1(j->i) CX(i->j)` leaves
/// `|-b, a>`, so a parity `F^2` on `i` finishes the job (trivial for d=2).
pub fn swap_sequence(dim: Dim, i: QuditId, j: QuditId) -> Vec<Op> {
    let mut ops = vec![
        Op::new(GateKind::CX(1), vec![i, j]),
        Op::new(GateKind::CX(dim.d() - 1), vec![j, i]),
        Op::new(GateKind::CX(1), vec![i, j]),
    ];
    if dim.d() > 2 {
        ops.push(Op::new(GateKind::F, vec![i]));
        ops.push(Op::new(GateKind::F, vec![i]));
    }
    ops
}

fn lower_op(dim: Dim, gate: &GateKind, sites: &[QuditId], out: &mut Vec<Op>) -> Result<()> {
    let q = sites[0];
    match gate {
        GateKind::V(_) | GateKind::CZ(1) => out.push(Op::new(gate.clone(), sites.to_vec())),
        GateKind::F => out.push(Op::new(v0(dim), vec![q])),
        GateKind::Finv => {
            for _ in 0..3 {
                out.push(Op::new(v0(dim), vec![q]));
            }
        }
        GateKind::R(t) => lower_diag1(dim, t.clone(), q, out),
        GateKind::P => lower_diag1(dim, dim.clifford_angles(), q, out),
        GateKind::Z(k) => {
            if k % dim.d() != 0 {
                lower_diag1(dim, dim.z_angles(*k), q, out)
            }
        }
        GateKind::X(k) => {
            if k % dim.d() != 0 {
                // X^k = F^dagger Z^k F; the trailing F^dagger and the F^3
                // of the Z lowering fold into F^2.
                out.push(Op::new(v0(dim), vec![q]));
                out.push(Op::new(GateKind::V(dim.z_angles(*k)), vec![q]));
                out.push(Op::new(v0(dim), vec![q]));
                out.push(Op::new(v0(dim), vec![q]));
            }
        }
        GateKind::CZ(k) => {
            for _ in 0..(k % dim.d()) {
                out.push(Op::new(GateKind::CZ(1), sites.to_vec()));
            }
        }
        GateKind::CX(k) => lower_cx(dim, *k, sites[0], sites[1], out),
        GateKind::Swap => {
            for op in swap_sequence(dim, sites[0], sites[1]) {
                lower_op(dim, &op.gate, &op.sites, out)?;
            }
        }
        GateKind::Fanout(v) => {
            for (j, &c) in v.iter().enumerate() {
                lower_cx(dim, c, sites[0], sites[j + 1], out);
            }
        }
        GateKind::Mod(v) => {
            for (j, &c) in v.iter().enumerate() {
                lower_cx(dim, c, sites[j + 1], sites[0], out);
            }
        }
        GateKind::Diag(phases) => {
            if sites.len() != 1 {
                return Err(Error::UnsupportedGate {
                    gate: format!("DIAG on {} qudits", sites.len()),
                    context: "lowering to {CZ, v}".into(),
                });
            }
            lower_diag1(dim, phases.clone(), q, out)
        }
    }
    Ok(())
}

/// Serial composite `c1 c0` (run `c0` first). The inputs of `c1` are
/// identified with the outputs of `c0` position by position; every other
/// qudit of `c1` is renamed to a fresh id above `c0`'s range.
pub fn compose_serial(c1: &Circuit, c0: &Circuit) -> Result<Circuit> {
    c0.dim.ensure_same(c1.dim)?;
    if c0.outputs.len() != c1.inputs.len() {
        return Err(Error::Composition(format!(
            "{} outputs feed {} inputs",
            c0.outputs.len(),
            c1.inputs.len()
        )));
    }
    let map = serial_map(&c0.qudits, &c0.outputs, &c1.qudits, &c1.inputs);
    let c1 = c1.relabel(&|q| map[&q])?;
    let mut qudits = c0.qudits.clone();
    for &q in &c1.qudits {
        if !qudits.contains(&q) {
            qudits.push(q);
        }
    }
    let mut ops = c0.ops.clone();
    ops.extend(c1.ops.iter().cloned());
    Circuit::new(c0.dim, qudits, c0.inputs.clone(), c1.outputs.clone(), ops)
}

/// Relabeling for serial composition shared by circuits and patterns.
pub(crate) fn serial_map(
    v0: &[QuditId],
    o0: &[QuditId],
    v1: &[QuditId],
    i1: &[QuditId],
) -> HashMap<QuditId, QuditId> {
    let mut next = v0.iter().copied().max().map_or(0, |m| m + 1);
    let mut map = HashMap::new();
    for (a, b) in i1.iter().zip(o0) {
        map.insert(*a, *b);
    }
    for &q in v1 {
        map.entry(q).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
    }
    map
}

/// Parallel composite on disjoint qudit sets.
pub fn compose_parallel(c1: &Circuit, c0: &Circuit) -> Result<Circuit> {
    c0.dim.ensure_same(c1.dim)?;
    if let Some(q) = c1.qudits.iter().find(|q| c0.qudits.contains(q)) {
        return Err(Error::Composition(format!(
            "qudit {q} used by both circuits"
        )));
    }
    let cat = |a: &[QuditId], b: &[QuditId]| a.iter().chain(b).copied().collect::<Vec<_>>();
    let mut ops = c0.ops.clone();
    ops.extend(c1.ops.iter().cloned());
    Circuit::new(
        c0.dim,
        cat(&c0.qudits, &c1.qudits),
        cat(&c0.inputs, &c1.inputs),
        cat(&c0.outputs, &c1.outputs),
        ops,
    )
}

/// `|<U a|b>|`-style comparison of two matrices up to one global phase.
/// Returns the largest entrywise deviation after phase alignment.
pub fn unitary_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let (mut best, mut idx) = (0.0, 0);
    for (i, z) in a.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            idx = i;
        }
    }
    if best == 0.0 || b.as_slice()[idx].norm() == 0.0 {
        return (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let phase = a.as_slice()[idx] / b.as_slice()[idx];
    let phase = phase / phase.norm();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dim(d: u32) -> Dim {
        Dim::new(d).unwrap()
    }

    fn cz_chain(pairs: &[(QuditId, QuditId)]) -> Circuit {
        let mut c = Circuit::on(dim(2), vec![1, 2, 3, 4]).unwrap();
        for &(a, b) in pairs {
            c.push(GateKind::CZ(1), vec![a, b]).unwrap();
        }
        c
    }

    #[test]
    fn depth_examples() {
        let r = cz_chain(&[(1, 2), (3, 4), (2, 3)]).depth_and_size();
        assert_eq!((r.depth, r.size), (2, 6));
        assert_eq!(r.longest_path.len(), 2);
        let r = cz_chain(&[(1, 2), (2, 3), (3, 4)]).depth_and_size();
        assert_eq!(r.depth, 3);
        assert_eq!(r.longest_path, vec![0, 1, 2]);
        let mut c = Circuit::on(dim(3), vec![0]).unwrap();
        c.push(GateKind::F, vec![0]).unwrap();
        let r = c.depth_and_size();
        assert_eq!((r.depth, r.size), (1, 1));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let k = dim(3);
        let c = Circuit::on(k, vec![0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = StateVector::random(k, &[0, 1], &mut rng).unwrap();
        let out = c.simulate(&psi).unwrap();
        assert!((out.inner(&psi).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn naive_fanout_matches_gate_d2_n3() {
        let k = dim(2);
        let mut c = Circuit::on(k, vec![0, 1, 2, 3]).unwrap();
        for t in 1..4 {
            c.push(GateKind::CX(1), vec![0, t]).unwrap();
        }
        let g = GateKind::Fanout(vec![1, 1, 1]).matrix(k).unwrap();
        assert!(unitary_distance(&c.unitary().unwrap(), &g) < 1e-9);
    }

    fn random_circuit(k: Dim, n: u32, gates: usize, rng: &mut ChaCha8Rng) -> Circuit {
        let qs: Vec<QuditId> = (0..n).collect();
        let mut c = Circuit::on(k, qs).unwrap();
        for _ in 0..gates {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            while b == a {
                b = rng.gen_range(0..n);
            }
            let theta: Vec<f64> = (0..k.d())
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect();
            let kk = rng.gen_range(0..k.d());
            let (g, s) = match rng.gen_range(0..11) {
                0 => (GateKind::F, vec![a]),
                1 => (GateKind::Finv, vec![a]),
                2 => (GateKind::X(kk), vec![a]),
                3 => (GateKind::Z(kk), vec![a]),
                4 => (GateKind::P, vec![a]),
                5 => (GateKind::R(theta), vec![a]),
                6 => (GateKind::V(theta), vec![a]),
                7 => (GateKind::CZ(kk), vec![a, b]),
                8 => (GateKind::CX(kk), vec![a, b]),
                9 => (GateKind::Swap, vec![a, b]),
                _ => (GateKind::Mod(vec![kk]), vec![a, b]),
            };
            c.push(g, s).unwrap();
        }
        c
    }

    #[test]
    fn simulation_matches_matrix_chain_d3() {
        let k = dim(3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let c = random_circuit(k, 2, 5, &mut rng);
            let u = c.unitary().unwrap();
            let m = c.matrix_product().unwrap();
            assert!((u - m).iter().all(|z| z.norm() < 1e-9));
        }
    }

    #[test]
    fn lowering_preserves_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in [2, 3] {
            let k = dim(d);
            for n in 1..=3 {
                for _ in 0..4 {
                    let c = random_circuit(k, n.max(2), 20, &mut rng);
                    let l = c.lower_to_guni().unwrap();
                    assert!(l.is_guni());
                    let dist = unitary_distance(&c.unitary().unwrap(), &l.unitary().unwrap());
                    assert!(dist < 1e-9, "d={d} dist={dist}");
                }
            }
        }
    }

    #[test]
    fn lowering_single_gates() {
        let k = dim(3);
        let mut c = Circuit::on(k, vec![0, 1]).unwrap();
        c.push(GateKind::F, vec![0]).unwrap();
        let l = c.lower_to_guni().unwrap();
        assert_eq!(l.ops(), &[Op::new(GateKind::V(vec![0.0; 3]), vec![0])]);
        assert_eq!(l.lower_to_guni().unwrap(), l);

        let mut cx = Circuit::on(k, vec![0, 1]).unwrap();
        cx.push(GateKind::CX(1), vec![0, 1]).unwrap();
        let u = cx.lower_to_guni().unwrap().unitary().unwrap();
        let g = GateKind::CX(1).matrix(k).unwrap();
        assert!(unitary_distance(&u, &g) < 1e-9);
    }

    #[test]
    fn swap_sequence_is_swap() {
        for d in [2, 3, 4, 5] {
            let k = dim(d);
            let mut c = Circuit::on(k, vec![0, 1]).unwrap();
            for op in swap_sequence(k, 0, 1) {
                c.push(op.gate, op.sites).unwrap();
            }
            let g = GateKind::Swap.matrix(k).unwrap();
            assert!(unitary_distance(&c.unitary().unwrap(), &g) < 1e-12);
        }
    }

    #[test]
    fn three_transvection_swap_fails_beyond_qubits() {
        let k = dim(3);
        let mut c = Circuit::on(k, vec![0, 1]).unwrap();
        c.push(GateKind::CX(1), vec![0, 1]).unwrap();
        c.push(GateKind::CX(2), vec![1, 0]).unwrap();
        c.push(GateKind::CX(1), vec![0, 1]).unwrap();
        let g = GateKind::Swap.matrix(k).unwrap();
        assert!(unitary_distance(&c.unitary().unwrap(), &g) > 0.5);
    }

    #[test]
    fn composition_laws() {
        let k = dim(2);
        let mut a = Circuit::on(k, vec![0]).unwrap();
        a.push(GateKind::F, vec![0]).unwrap();
        let s = compose_serial(&a, &a).unwrap();
        assert_eq!(s.depth(), 2);
        assert_eq!(s.qudits(), &[0]);

        let mut c3 = Circuit::on(k, vec![0, 1]).unwrap();
        for _ in 0..3 {
            c3.push(GateKind::CZ(1), vec![0, 1]).unwrap();
        }
        let mut c5 = Circuit::on(k, vec![5]).unwrap();
        for _ in 0..5 {
            c5.push(GateKind::F, vec![5]).unwrap();
        }
        let p = compose_parallel(&c5, &c3).unwrap();
        assert_eq!(p.depth(), 5);
        assert_eq!(p.size(), c3.size() + c5.size());
        assert!(compose_parallel(&c3, &c3).is_err());
    }

    #[test]
    fn serial_relabels_ancillas() {
        let k = dim(2);
        let mut c0 = Circuit::new(k, vec![0, 1], vec![0], vec![1], vec![]).unwrap();
        c0.push(GateKind::CX(1), vec![0, 1]).unwrap();
        let c1 = c0.clone();
        let s = compose_serial(&c1, &c0).unwrap();
        assert_eq!(s.inputs(), &[0]);
        assert_eq!(s.qudits(), &[0, 1, 2]);
        assert_eq!(s.outputs(), &[2]);
    }

    #[test]
    fn gate_models() {
        let k = dim(2);
        let mut c = Circuit::on(k, vec![0, 1, 2]).unwrap();
        c.push(GateKind::Fanout(vec![1, 1]), vec![0, 1, 2]).unwrap();
        assert!(c.validate_gate_set(GateModel::default()).is_err());
        assert!(c
            .validate_gate_set(GateModel::Fanout { max_arity: 2 })
            .is_ok());
    }

    #[test]
    fn multi_qudit_diag_does_not_lower() {
        let k = dim(2);
        let mut c = Circuit::on(k, vec![0, 1]).unwrap();
        c.push(GateKind::Diag(vec![0.0, 0.1, 0.2, 0.3]), vec![0, 1])
            .unwrap();
        assert!(c.lower_to_guni().is_err());
    }
}
