//! Pauli propagation through Clifford circuits.
//!
//! Used as an equivalence oracle for circuits far beyond dense simulation:
//! a circuit `W` (with ancillas starting in `|0>`) implements `U` exactly
//! when pulling every `U G U^dagger` back through `W` lands on `G` on the
//! inputs times a `Z`-type operator on the ancillas, for `G` ranging over
//! single-site `X` and `Z` generators.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;

use crate::algebra::{decode, CliffordGenerator, Dim, PauliOperator};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::sim::GateKind;
use crate::QuditId;

const PHASE_TOL: f64 = 1e-9;

/// `omega_hat^xi * prod_q X_q^a Z_q^b` over qudit ids, identity sites
/// omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePauli {
    dim: Dim,
    xi: u32,
    terms: BTreeMap<QuditId, (u32, u32)>,
}

impl SparsePauli {
    pub fn identity(dim: Dim) -> Self {
        SparsePauli {
            dim,
            xi: 0,
            terms: BTreeMap::new(),
        }
    }

    /// `X^a Z^b` on one qudit.
    pub fn single(dim: Dim, q: QuditId, a: u32, b: u32) -> Self {
        let mut p = Self::identity(dim);
        p.set(q, a, b);
        p
    }

    pub fn xi(&self) -> u32 {
        self.xi
    }

    /// `(a, b)` exponents on `q`.
    pub fn get(&self, q: QuditId) -> (u32, u32) {
        self.terms.get(&q).copied().unwrap_or((0, 0))
    }

    pub fn support(&self) -> impl Iterator<Item = (QuditId, (u32, u32))> + '_ {
        self.terms.iter().map(|(&q, &e)| (q, e))
    }

    fn set(&mut self, q: QuditId, a: u32, b: u32) {
        let d = self.dim.d();
        let (a, b) = (a % d, b % d);
        if a == 0 && b == 0 {
            self.terms.remove(&q);
        } else {
            self.terms.insert(q, (a, b));
        }
    }

    fn local(&self, sites: &[QuditId]) -> PauliOperator {
        let a: Vec<i64> = sites.iter().map(|&q| self.get(q).0 as i64).collect();
        let b: Vec<i64> = sites.iter().map(|&q| self.get(q).1 as i64).collect();
        PauliOperator::new(self.dim, self.xi as i64, &a, &b).expect("equal lengths")
    }

    fn store(&mut self, sites: &[QuditId], p: &PauliOperator) {
        self.xi = p.xi();
        for (k, &q) in sites.iter().enumerate() {
            self.set(q, p.a()[k], p.b()[k]);
        }
    }

    fn cx(&mut self, k: u32, c: QuditId, t: QuditId) {
        let d = self.dim.d() as u64;
        let k = k as u64 % d;
        if k == 0 {
            return;
        }
        let (ac, bc) = self.get(c);
        let (at, bt) = self.get(t);
        let at2 = (at as u64 + k * ac as u64) % d;
        let bc2 = (bc as u64 + (d - k) * bt as u64) % d;
        self.set(t, at2 as u32, bt);
        self.set(c, ac, bc2 as u32);
    }

    /// Replaces `self` by `G self G^dagger`.
    pub fn conjugate_by(&mut self, gate: &GateKind, sites: &[QuditId]) -> Result<()> {
        let dim = self.dim;
        if sites.iter().all(|q| !self.terms.contains_key(q)) {
            return Ok(());
        }
        match gate {
            GateKind::F | GateKind::Finv | GateKind::P => {
                let mut p = self.local(sites);
                let (gen, times) = match gate {
                    GateKind::F => (CliffordGenerator::F(0), 1),
                    GateKind::Finv => (CliffordGenerator::F(0), 3),
                    _ => (CliffordGenerator::P(0), 1),
                };
                for _ in 0..times {
                    p = p.conjugate(gen)?;
                }
                self.store(sites, &p);
            }
            GateKind::X(k) | GateKind::Z(k) => {
                let k = *k % dim.d();
                let (a, b) = if matches!(gate, GateKind::X(_)) {
                    (k, 0)
                } else {
                    (0, k)
                };
                let g = PauliOperator::single(dim, 1, 0, a, b)?;
                let ginv = PauliOperator::single(dim, 1, 0, dim.neg(a), dim.neg(b))?;
                let p = g.multiply(&self.local(sites))?.multiply(&ginv)?;
                self.store(sites, &p);
            }
            GateKind::CZ(k) => {
                let mut p = self.local(sites);
                for _ in 0..(*k % dim.d()) {
                    p = p.conjugate(CliffordGenerator::CZ(0, 1))?;
                }
                self.store(sites, &p);
            }
            GateKind::CX(k) => self.cx(*k, sites[0], sites[1]),
            GateKind::Fanout(v) => {
                for (j, &k) in v.iter().enumerate() {
                    self.cx(k, sites[0], sites[j + 1]);
                }
            }
            GateKind::Mod(v) => {
                for (j, &k) in v.iter().enumerate() {
                    self.cx(k, sites[j + 1], sites[0]);
                }
            }
            GateKind::Swap => {
                let (x, y) = (self.get(sites[0]), self.get(sites[1]));
                self.set(sites[0], y.0, y.1);
                self.set(sites[1], x.0, x.1);
            }
            GateKind::R(phases) | GateKind::Diag(phases) => self.diagonal(phases, sites)?,
            GateKind::V(theta) => {
                self.diagonal(theta, sites)?;
                self.conjugate_by(&GateKind::F, sites)?;
            }
        }
        Ok(())
    }

    /// Replaces `self` by `G^dagger self G`.
    pub fn conjugate_by_inverse(&mut self, gate: &GateKind, sites: &[QuditId]) -> Result<()> {
        for g in gate.inverse(self.dim) {
            self.conjugate_by(&g, sites)?;
        }
        Ok(())
    }

    /// `D X^a D^dagger = Delta X^a` with `Delta(x) = e^{i(phi(x) - phi(x - a))}`,
    /// which must be a Pauli `omega_hat^beta Z^alpha` for `D` to be Clifford.
    fn diagonal(&mut self, phases: &[f64], sites: &[QuditId]) -> Result<()> {
        let dim = self.dim;
        let d = dim.du();
        let k = sites.len();
        let shift: Vec<u32> = sites.iter().map(|&q| self.get(q).0).collect();
        if shift.iter().all(|&a| a == 0) {
            return Ok(());
        }
        let mut digits = vec![0u32; k];
        let mut back = vec![0u32; k];
        let gamma = |index: usize, digits: &mut [u32], back: &mut [u32]| {
            decode(index, d, digits);
            for i in 0..k {
                back[i] = (digits[i] + dim.d() - shift[i]) % dim.d();
            }
            phases[index] - phases[crate::algebra::encode(back, d)]
        };
        let non_clifford = || Error::NonClifford(format!("DIAG with {} phases", phases.len()));
        let to_int = |angle: f64, modulus: u32| -> Option<u32> {
            let x = angle * modulus as f64 / (2.0 * PI);
            let r = x.round();
            ((x - r).abs() < PHASE_TOL * modulus as f64)
                .then(|| (r as i64).rem_euclid(modulus as i64) as u32)
        };
        let g0 = gamma(0, &mut digits, &mut back);
        let beta = to_int(g0, dim.big_d()).ok_or_else(non_clifford)?;
        let mut alpha = vec![0u32; k];
        for i in 0..k {
            let index = d.pow((k - 1 - i) as u32);
            let gi = gamma(index, &mut digits, &mut back);
            alpha[i] = to_int(gi - g0, dim.d()).ok_or_else(non_clifford)?;
        }
        for index in 0..phases.len() {
            let g = gamma(index, &mut digits, &mut back);
            let lin: u64 = (0..k).map(|i| alpha[i] as u64 * digits[i] as u64).sum();
            let expect = 2.0 * PI * (beta as f64 / dim.big_d() as f64 + lin as f64 / d as f64);
            let diff = (g - expect).rem_euclid(2.0 * PI);
            if diff.min(2.0 * PI - diff) > PHASE_TOL {
                return Err(non_clifford());
            }
        }
        let zeros = vec![0i64; k];
        let alpha: Vec<i64> = alpha.iter().map(|&x| x as i64).collect();
        let delta = PauliOperator::new(dim, beta as i64, &zeros, &alpha)?;
        let p = delta.multiply(&self.local(sites))?;
        self.store(sites, &p);
        Ok(())
    }
}

/// Pushes `p` forward through the circuit: returns `C p C^dagger`.
pub fn propagate_forward(c: &Circuit, p: &SparsePauli) -> Result<SparsePauli> {
    let mut out = p.clone();
    for op in c.ops() {
        out.conjugate_by(&op.gate, &op.sites)?;
    }
    Ok(out)
}

/// Pulls `p` back through the circuit: returns `C^dagger p C`.
pub fn propagate_backward(c: &Circuit, p: &SparsePauli) -> Result<SparsePauli> {
    let mut out = p.clone();
    for op in c.ops().iter().rev() {
        out.conjugate_by_inverse(&op.gate, &op.sites)?;
    }
    Ok(out)
}

/// Decides whether `w` (ancillas prepared in `|0>`, outputs matched to
/// `u`'s outputs by position) acts as the unitary Clifford circuit `u`,
/// with every non-output of `w` left in a state independent of the input.
///
/// Returns `None` on success or a description of the first mismatch.
pub fn clifford_equivalent(u: &Circuit, w: &Circuit) -> Result<Option<String>> {
    u.dim().ensure_same(w.dim())?;
    let dim = u.dim();
    let u_in: HashSet<QuditId> = u.inputs().iter().copied().collect();
    if u.inputs().len() != u.qudits().len() || u.outputs().len() != u.inputs().len() {
        return Err(Error::Composition(
            "reference circuit must be unitary on all its qudits".into(),
        ));
    }
    if u.outputs().iter().any(|q| !u_in.contains(q)) {
        return Err(Error::Composition(
            "reference outputs must be its inputs".into(),
        ));
    }
    if w.inputs().len() != u.inputs().len() || w.outputs().len() != u.outputs().len() {
        return Err(Error::LengthMismatch {
            expected: u.inputs().len(),
            got: w.inputs().len(),
        });
    }
    let w_in: HashSet<QuditId> = w.inputs().iter().copied().collect();
    for (k, &q) in u.inputs().iter().enumerate() {
        for (a, b, name) in [(1, 0, "X"), (0, 1, "Z")] {
            let image = propagate_forward(u, &SparsePauli::single(dim, q, a, b))?;
            let mut mapped = SparsePauli::identity(dim);
            mapped.xi = image.xi;
            for (q2, (ea, eb)) in image.support() {
                let pos = u
                    .outputs()
                    .iter()
                    .position(|&o| o == q2)
                    .expect("outputs cover qudits");
                mapped.set(w.outputs()[pos], ea, eb);
            }
            let back = propagate_backward(w, &mapped)?;
            let target = w.inputs()[k];
            let problem = if back.xi != 0 {
                Some(format!("phase omega_hat^{}", back.xi))
            } else if back.get(target) != (a, b) {
                Some(format!("acts as {:?} on the input", back.get(target)))
            } else {
                back.support()
                    .find(|&(q2, (ea, eb))| {
                        q2 != target && (w_in.contains(&q2) && (ea, eb) != (0, 0) || ea != 0)
                    })
                    .map(|(q2, e)| format!("leaves {e:?} on qudit {q2}"))
            };
            if let Some(p) = problem {
                return Ok(Some(format!("{name} on input {k}: {p}")));
            }
        }
    }
    Ok(None)
}
