use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use crate::circuit::{swap_sequence, Circuit, Op};
use crate::convert::fanout::{generalized_mod_ops, parallelize_ops};
use crate::convert::{fanout_model_inverse, Fresh};
use crate::error::{Error, Result};
use crate::sim::GateKind;
use crate::{Dim, QuditId};

/// An `n x n` matrix over `Z(d)` describing a CX-only circuit:
/// `|x> -> |M x>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CxMatrix {
    dim: Dim,
    rows: Vec<Vec<u32>>,
}

impl CxMatrix {
    pub fn identity(dim: Dim, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        CxMatrix { dim, rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    /// `row_target += k row_source`: the effect of `CX^k(source -> target)`.
    pub fn add_row(&mut self, target: usize, source: usize, k: i64) {
        let src = self.rows[source].clone();
        for (x, s) in self.rows[target].iter_mut().zip(src) {
            *x = self.dim.modd(*x as i64 + k * s as i64);
        }
    }

    pub fn mul(&self, other: &CxMatrix) -> CxMatrix {
        let n = self.n();
        let d = self.dim.d() as u64;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s: u64 = (0..n)
                            .map(|k| self.rows[i][k] as u64 * other.rows[k][j] as u64 % d)
                            .sum();
                        (s % d) as u32
                    })
                    .collect()
            })
            .collect();
        CxMatrix {
            dim: self.dim,
            rows,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == CxMatrix::identity(self.dim, self.n())
    }

    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        let d = self.dim.d() as u64;
        self.rows
            .iter()
            .map(|r| {
                (r.iter()
                    .zip(x)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum::<u64>()
                    % d) as u32
            })
            .collect()
    }
}

/// Normal form `U |x> = omega^{q(x)} |M x + c>` (up to global phase) of a
/// circuit over `{CZ^k, CX^k, Z^k, X^k}`, with
/// `q(x) = sum_i linear_i x_i + square_i x_i^2 + sum_{i<j} cross_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub dim: Dim,
    pub qudits: Vec<QuditId>,
    pub matrix: CxMatrix,
    /// `M^-1`, obtained by replaying the CX gates backwards.
    pub inverse: CxMatrix,
    pub shift: Vec<u32>,
    pub linear: Vec<u32>,
    pub square: Vec<u32>,
    pub cross: BTreeMap<(usize, usize), u32>,
}

impl AffineForm {
    pub fn from_ops(dim: Dim, qudits: &[QuditId], ops: &[Op]) -> Result<Self> {
        let n = qudits.len();
        let pos: HashMap<QuditId, usize> =
            qudits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let idx = |q: &QuditId| pos.get(q).copied().ok_or(Error::UnknownQudit(*q));
        let mut f = AffineForm {
            dim,
            qudits: qudits.to_vec(),
            matrix: CxMatrix::identity(dim, n),
            inverse: CxMatrix::identity(dim, n),
            shift: vec![0; n],
            linear: vec![0; n],
            square: vec![0; n],
            cross: BTreeMap::new(),
        };
        let md = |x: i64| dim.modd(x) as i64;
        let mut cx_list = Vec::new();
        for op in ops {
            match op.gate.normalized(dim) {
                GateKind::X(k) => {
                    let q = idx(&op.sites[0])?;
                    f.shift[q] = dim.modd(f.shift[q] as i64 + k as i64);
                }
                GateKind::CX(k) => {
                    let (a, b) = (idx(&op.sites[0])?, idx(&op.sites[1])?);
                    f.matrix.add_row(b, a, k as i64);
                    f.shift[b] = dim.modd(f.shift[b] as i64 + k as i64 * f.shift[a] as i64);
                    cx_list.push((b, a, k as i64));
                }
                GateKind::Z(k) => {
                    let q = idx(&op.sites[0])?;
                    for i in 0..n {
                        f.linear[i] =
                            dim.modd(f.linear[i] as i64 + k as i64 * f.matrix.entry(q, i) as i64);
                    }
                }
                GateKind::CZ(k) => {
                    let (a, b) = (idx(&op.sites[0])?, idx(&op.sites[1])?);
                    let k = k as i64;
                    let (ra, rb) = (f.matrix.row(a).to_vec(), f.matrix.row(b).to_vec());
                    let (ca, cb) = (f.shift[a] as i64, f.shift[b] as i64);
                    for i in 0..n {
                        let (mai, mbi) = (ra[i] as i64, rb[i] as i64);
                        f.square[i] = dim.modd(f.square[i] as i64 + k * md(mai * mbi));
                        f.linear[i] = dim.modd(f.linear[i] as i64 + k * md(cb * mai + ca * mbi));
                        for j in i + 1..n {
                            let (maj, mbj) = (ra[j] as i64, rb[j] as i64);
                            let e = f.cross.entry((i, j)).or_insert(0);
                            *e = dim.modd(*e as i64 + k * md(mai * mbj + maj * mbi));
                        }
                    }
                }
                g => {
                    return Err(Error::UnsupportedGate {
                        gate: g.name().into(),
                        context: "controlled-Pauli compilation (CZ, CX, Z, X only)".into(),
                    })
                }
            }
        }
        f.cross.retain(|_, w| *w != 0);
        for &(t, s, k) in cx_list.iter().rev() {
            f.inverse.add_row(t, s, -k);
        }
        assert!(
            f.inverse.mul(&f.matrix).is_identity(),
            "replayed inverse must invert the CX matrix"
        );
        Ok(f)
    }

    /// `(phase exponent, image)` of basis state `x`: `U|x> = omega^q |y>`.
    pub fn apply(&self, x: &[u32]) -> (u32, Vec<u32>) {
        let dim = self.dim;
        let mut q: i64 = 0;
        for i in 0..x.len() {
            let xi = x[i] as i64;
            q += self.linear[i] as i64 * xi + self.square[i] as i64 * xi * xi;
        }
        for (&(i, j), &w) in &self.cross {
            q += w as i64 * x[i] as i64 * x[j] as i64;
        }
        let y = self
            .matrix
            .apply(x)
            .iter()
            .zip(&self.shift)
            .map(|(&a, &c)| (a + c) % dim.d())
            .collect();
        (dim.modd(q), y)
    }

    /// Single-qudit phase layer on every qudit followed by the color classes
    /// of a fixed edge coloring of the complete graph, with `CZ^0` where a
    /// pair has no cross term. The layout depends only on `n`.
    fn diagonal_layers(&self) -> Vec<Vec<Op>> {
        let dim = self.dim;
        let d = dim.d() as f64;
        let single = self
            .qudits
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let (l, s) = (self.linear[i] as f64, self.square[i] as f64);
                let phases = (0..dim.d())
                    .map(|m| {
                        let m = m as f64;
                        (2.0 * PI * (l * m + s * m * m) / d).rem_euclid(2.0 * PI)
                    })
                    .collect();
                Op::new(GateKind::Diag(phases), vec![q])
            })
            .collect();
        let mut layers = vec![single];
        for round in complete_graph_rounds(self.qudits.len()) {
            layers.push(
                round
                    .into_iter()
                    .map(|(i, j)| {
                        let w = self.cross.get(&(i, j)).copied().unwrap_or(0);
                        Op::new(GateKind::CZ(w), vec![self.qudits[i], self.qudits[j]])
                    })
                    .collect(),
            );
        }
        layers
    }
}

/// Round-robin schedule of all pairs `i < j` of `0..n` into `n - 1`
/// matchings (`n` when `n` is odd).
fn complete_graph_rounds(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let m = n + n % 2;
    (0..m - 1)
        .map(|r| {
            let mut round = Vec::new();
            let mut add = |a: usize, b: usize| {
                if a < n && b < n {
                    round.push((a.min(b), a.max(b)));
                }
            };
            add(r, m - 1);
            for i in 1..m / 2 {
                add((r + i) % (m - 1), (r + m - 1 - i) % (m - 1));
            }
            round
        })
        .collect()
}

/// The four-stage constant-depth construction on `qudits`, with ancillas
/// drawn from `fresh`. Returns the op list; every ancilla ends in `|0>`.
/// The gate layout depends only on `d` and `n`; data only sets exponents and
/// phases, so the depth is the same for every input of a given `d`.
pub(crate) fn controlled_pauli_ops(
    dim: Dim,
    qudits: &[QuditId],
    ops: &[Op],
    fresh: &mut Fresh,
) -> Result<Vec<Op>> {
    let form = AffineForm::from_ops(dim, qudits, ops)?;
    let n = qudits.len();
    let layers = form.diagonal_layers();
    // Register A_k (k = 0..n) doubles as copy space for the diagonal part.
    let regs: Vec<Vec<QuditId>> = (0..n.max(layers.len() - 1))
        .map(|_| fresh.take_n(n))
        .collect();
    let mut out = parallelize_ops(dim, qudits, &[], &layers, &regs);
    let res = fresh.take_n(n);
    let copies: Vec<Vec<QuditId>> = (0..n).map(|_| fresh.take_n(n.saturating_sub(1))).collect();
    out.extend(linear_stage(
        dim,
        qudits,
        &form.matrix,
        &regs,
        &res,
        &copies,
        false,
    ));
    out.extend(linear_stage(
        dim,
        &res,
        &form.inverse,
        &regs,
        qudits,
        &copies,
        true,
    ));
    for k in 0..n {
        out.extend(swap_sequence(dim, qudits[k], res[k]));
    }
    for (k, &c) in form.shift.iter().enumerate() {
        out.push(Op::new(GateKind::X(c), vec![qudits[k]]));
    }
    Ok(out)
}

/// Computes `(M src)_k` into `A_k[k]` for every `k` via fan-out copies and
/// a MOD gate, adds it to `dst[k]` (subtracts when `subtract`), and
/// uncomputes the copies.
fn linear_stage(
    dim: Dim,
    src: &[QuditId],
    m: &CxMatrix,
    regs: &[Vec<QuditId>],
    dst: &[QuditId],
    copies: &[Vec<QuditId>],
    subtract: bool,
) -> Vec<Op> {
    let n = src.len();
    let mut compute = Vec::new();
    if n > 1 {
        for j in 0..n {
            let mut sites = vec![src[j]];
            sites.extend((0..n).filter(|&k| k != j).map(|k| regs[k][j]));
            compute.push(Op::new(GateKind::Fanout(vec![1; n - 1]), sites));
        }
    }
    for k in 0..n {
        let controls: Vec<(QuditId, u32)> = (0..n)
            .filter(|&j| j != k)
            .map(|j| (regs[k][j], m.entry(k, j)))
            .collect();
        compute.extend(generalized_mod_ops(
            dim, regs[k][k], &controls, &copies[k], true,
        ));
    }
    for k in 0..n {
        compute.push(Op::new(
            GateKind::CX(m.entry(k, k)),
            vec![src[k], regs[k][k]],
        ));
    }
    let mut out = compute.clone();
    let w = if subtract { dim.d() - 1 } else { 1 };
    for k in 0..n {
        out.push(Op::new(GateKind::CX(w), vec![regs[k][k], dst[k]]));
    }
    out.extend(fanout_model_inverse(dim, &compute));
    out
}

/// Compiles a circuit over `{CZ^k, CX^k, Z^k, X^k}` into the fan-out model
/// with depth independent of the number of qudits and `O(n^2)` size.
pub fn controlled_pauli_constant_depth(c: &Circuit) -> Result<Circuit> {
    if c.inputs().len() != c.qudits().len() || c.outputs() != c.inputs() {
        return Err(Error::Composition(
            "controlled-Pauli compilation needs a unitary on all qudits".into(),
        ));
    }
    let mut fresh = Fresh::after(c.qudits());
    let ops = controlled_pauli_ops(c.dim(), c.qudits(), c.ops(), &mut fresh)?;
    let used: std::collections::HashSet<QuditId> =
        ops.iter().flat_map(|o| o.sites.iter().copied()).collect();
    let mut qudits = c.qudits().to_vec();
    qudits.extend(fresh.issued().iter().copied().filter(|q| used.contains(q)));
    Circuit::new(
        c.dim(),
        qudits,
        c.inputs().to_vec(),
        c.outputs().to_vec(),
        ops,
    )
}
