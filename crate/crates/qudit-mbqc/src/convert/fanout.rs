use std::collections::HashSet;

use crate::algebra::MAX_DENSE_DIM;
use crate::circuit::{Circuit, Op};
use crate::convert::{fanout_model_inverse, Fresh};
use crate::error::{Error, Result};
use crate::sim::GateKind;
use crate::{Dim, QuditId};

/// Largest `d^k` for which diagonality is checked on the full unitary.
const DIAGONAL_CHECK_LIMIT: usize = 1 << 10;

/// Fan-out decompositions into controlled-X gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanoutVariant {
    /// `n` controlled-X gates sharing the control; depth `n`.
    Naive,
    /// Doubling tree of depth `ceil(log2(n + 1))`. Every qudit holding a
    /// copy fans into one fresh target per layer, so targets must start in
    /// `|0>`: the circuit's only input is the control.
    LogDepth,
    /// The doubling tree preceded by the inverse of its target-only part,
    /// which makes it exact for arbitrary target values; depth at most
    /// `2 ceil(log2(n + 1)) - 1`, attained when `n + 1` is a power of two.
    LogDepthGeneral,
}

/// `(holder, target)` pairs per layer of the doubling tree on qudits
/// `0..=n`, control `0`.
fn tree_layers(n: usize) -> Vec<Vec<(QuditId, QuditId)>> {
    let mut holders: Vec<QuditId> = vec![0];
    let mut next = 1usize;
    let mut layers = Vec::new();
    while next <= n {
        let mut layer = Vec::new();
        for &h in &holders.clone() {
            if next > n {
                break;
            }
            layer.push((h, next as QuditId));
            holders.push(next as QuditId);
            next += 1;
        }
        layers.push(layer);
    }
    layers
}

/// Fan-out of qudit `0` into qudits `1..=n`.
pub fn build_fanout(dim: Dim, n: usize, variant: FanoutVariant) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidGate {
            gate: "FANOUT".into(),
            reason: "needs at least one target".into(),
        });
    }
    let qudits: Vec<QuditId> = (0..=n as QuditId).collect();
    let cx = |k: u32, (c, t): (QuditId, QuditId)| Op::new(GateKind::CX(k), vec![c, t]);
    let (inputs, ops) = match variant {
        FanoutVariant::Naive => {
            let ops = (1..=n as QuditId).map(|t| cx(1, (0, t))).collect();
            (qudits.clone(), ops)
        }
        FanoutVariant::LogDepth => {
            let ops = tree_layers(n)
                .into_iter()
                .flatten()
                .map(|e| cx(1, e))
                .collect();
            (vec![0], ops)
        }
        FanoutVariant::LogDepthGeneral => {
            let layers = tree_layers(n);
            let mut ops: Vec<Op> = layers
                .iter()
                .rev()
                .flat_map(|l| l.iter().filter(|e| e.0 != 0).rev())
                .map(|&e| cx(dim.d() - 1, e))
                .collect();
            ops.extend(layers.into_iter().flatten().map(|e| cx(1, e)));
            (qudits.clone(), ops)
        }
    };
    Circuit::new(dim, qudits.clone(), inputs, qudits, ops)
}

/// Which generalized gate to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneralizedKind {
    /// `|x>|y> -> |x>|y + v x>`.
    Fanout,
    /// `|x>|y> -> |x + v.y>|y>`.
    Mod,
}

/// `FANOUT(v)` from `control` in the fan-out model: copy the control into
/// `copies` (one per weight beyond the first, one per weight when
/// `uniform`), apply the weighted
/// controlled-X gates in parallel, then uncompute the copies with `d - 1`
/// plain fan-outs.
///
/// With `uniform` the gate sequence depends only on `d` and the number of
/// targets: zero weights are kept as `CX^0` and all-one weights are not
/// collapsed into a single fan-out.
pub(crate) fn generalized_fanout_ops(
    dim: Dim,
    control: QuditId,
    targets: &[(QuditId, u32)],
    copies: &[QuditId],
    uniform: bool,
) -> Vec<Op> {
    let targets: Vec<(QuditId, u32)> = targets
        .iter()
        .map(|&(t, w)| (t, w % dim.d()))
        .filter(|&(_, w)| uniform || w != 0)
        .collect();
    if targets.is_empty() {
        return Vec::new();
    }
    if !uniform && targets.iter().all(|&(_, w)| w == 1) {
        let mut sites = vec![control];
        sites.extend(targets.iter().map(|&(t, _)| t));
        return vec![Op::new(GateKind::Fanout(vec![1; targets.len()]), sites)];
    }
    // The uniform layout feeds every target from its own copy, so even a
    // single target pays for the copy round trip.
    let m = targets.len() - usize::from(!uniform);
    assert!(copies.len() >= m, "not enough copy ancillas");
    let copies = &copies[..m];
    let mut ops = Vec::new();
    let copy = |ops: &mut Vec<Op>| {
        if m > 0 {
            let mut sites = vec![control];
            sites.extend_from_slice(copies);
            ops.push(Op::new(GateKind::Fanout(vec![1; m]), sites));
        }
    };
    copy(&mut ops);
    for (k, &(t, w)) in targets.iter().enumerate() {
        let src = match (uniform, k) {
            (true, _) => copies[k],
            (false, 0) => control,
            (false, _) => copies[k - 1],
        };
        ops.push(Op::new(GateKind::CX(w), vec![src, t]));
    }
    for _ in 1..dim.d() {
        copy(&mut ops);
    }
    ops
}

/// `MOD(v)` onto `target` as `F^{(x)} FANOUT(-v) F^dagger^{(x)}`. Unless
/// `uniform`, zero weights are dropped and a single control reduces to one
/// controlled-X.
pub(crate) fn generalized_mod_ops(
    dim: Dim,
    target: QuditId,
    controls: &[(QuditId, u32)],
    copies: &[QuditId],
    uniform: bool,
) -> Vec<Op> {
    let controls: Vec<(QuditId, u32)> = controls
        .iter()
        .map(|&(c, w)| (c, w % dim.d()))
        .filter(|&(_, w)| uniform || w != 0)
        .collect();
    match controls.len() {
        0 => Vec::new(),
        1 if !uniform => vec![Op::new(
            GateKind::CX(controls[0].1),
            vec![controls[0].0, target],
        )],
        _ => {
            let mut all = vec![target];
            all.extend(controls.iter().map(|&(c, _)| c));
            let mut ops: Vec<Op> = all
                .iter()
                .map(|&q| Op::new(GateKind::Finv, vec![q]))
                .collect();
            let neg: Vec<(QuditId, u32)> = controls.iter().map(|&(c, w)| (c, dim.neg(w))).collect();
            ops.extend(generalized_fanout_ops(dim, target, &neg, copies, uniform));
            ops.extend(all.iter().map(|&q| Op::new(GateKind::F, vec![q])));
            ops
        }
    }
}

/// Generalized fan-out or MOD gate on qudits `0..=n` (qudit `0` is the
/// control, respectively the target), with copy ancillas numbered from
/// `n + 1`.
pub fn build_generalized(dim: Dim, v: &[u32], kind: GeneralizedKind) -> Result<Circuit> {
    if v.is_empty() {
        return Err(Error::InvalidGate {
            gate: "generalized gate".into(),
            reason: "needs at least one weight".into(),
        });
    }
    let main: Vec<QuditId> = (0..=v.len() as QuditId).collect();
    let mut fresh = Fresh::after(&main);
    let copies = fresh.take_n(v.len().saturating_sub(1));
    let others: Vec<(QuditId, u32)> = v
        .iter()
        .enumerate()
        .map(|(j, &w)| (j as QuditId + 1, w))
        .collect();
    let ops = match kind {
        GeneralizedKind::Fanout => generalized_fanout_ops(dim, 0, &others, &copies, false),
        GeneralizedKind::Mod => generalized_mod_ops(dim, 0, &others, &copies, false),
    };
    let used: HashSet<QuditId> = ops.iter().flat_map(|o| o.sites.iter().copied()).collect();
    let mut qudits = main.clone();
    qudits.extend(copies.into_iter().filter(|q| used.contains(q)));
    Circuit::new(dim, qudits, main.clone(), main, ops)
}

/// `B; FANOUT; D_1 || ... || D_m; FANOUT^-1; B^dagger` with the diagonal
/// layers relabeled onto `registers` (one register of `qudits.len()`
/// clean qudits per layer beyond the first).
pub(crate) fn parallelize_ops(
    dim: Dim,
    qudits: &[QuditId],
    b: &[Op],
    layers: &[Vec<Op>],
    registers: &[Vec<QuditId>],
) -> Vec<Op> {
    let layers: Vec<&Vec<Op>> = layers.iter().filter(|l| !l.is_empty()).collect();
    let mut ops = b.to_vec();
    match layers.len() {
        0 => {}
        1 => ops.extend(layers[0].iter().cloned()),
        m => {
            assert!(registers.len() >= m - 1, "not enough copy registers");
            let fan: Vec<Op> = qudits
                .iter()
                .enumerate()
                .map(|(j, &q)| {
                    let mut sites = vec![q];
                    sites.extend(registers[..m - 1].iter().map(|r| r[j]));
                    Op::new(GateKind::Fanout(vec![1; m - 1]), sites)
                })
                .collect();
            ops.extend(fan.iter().cloned());
            for (i, layer) in layers.iter().enumerate() {
                for op in layer.iter() {
                    let sites = op
                        .sites
                        .iter()
                        .map(|s| {
                            if i == 0 {
                                *s
                            } else {
                                let j = qudits.iter().position(|q| q == s).expect("layer site");
                                registers[i - 1][j]
                            }
                        })
                        .collect();
                    ops.push(Op::new(op.gate.clone(), sites));
                }
            }
            ops.extend(fanout_model_inverse(dim, &fan));
        }
    }
    ops.extend(fanout_model_inverse(dim, b));
    ops
}

fn check_diagonal(c: &Circuit) -> Result<()> {
    let fits = c
        .dim()
        .checked_pow(c.qudits().len(), DIAGONAL_CHECK_LIMIT.min(MAX_DENSE_DIM))
        .is_ok();
    if fits {
        let u = c.unitary()?;
        for i in 0..u.nrows() {
            for j in 0..u.ncols() {
                if i != j && u[(i, j)].norm() > 1e-12 {
                    return Err(Error::NotDiagonal(format!("entry ({i}, {j}) is nonzero")));
                }
            }
        }
        Ok(())
    } else if let Some(op) = c.ops().iter().find(|o| !o.gate.is_diagonal()) {
        Err(Error::NotDiagonal(op.gate.name().into()))
    } else {
        Ok(())
    }
}

/// Implements `B^dagger D_m ... D_1 B` for pairwise commuting unitaries
/// `U_i = B^dagger D_i B` in depth `max depth(D_i) + 2 depth(B) + d`, using
/// `k (m - 1)` ancillas that end in `|0>`. Every `D_i` must be diagonal and
/// act on `B`'s qudits.
pub fn parallelize_commuting(b: &Circuit, diagonals: &[Circuit]) -> Result<Circuit> {
    let dim = b.dim();
    let set: HashSet<QuditId> = b.qudits().iter().copied().collect();
    if b.inputs().len() != set.len() || b.outputs() != b.inputs() {
        return Err(Error::Composition(
            "B must be unitary on all its qudits".into(),
        ));
    }
    for dc in diagonals {
        dim.ensure_same(dc.dim())?;
        if let Some(q) = dc.qudits().iter().find(|q| !set.contains(q)) {
            return Err(Error::UnknownQudit(*q));
        }
        if dc.inputs().len() != dc.qudits().len() || dc.outputs() != dc.inputs() {
            return Err(Error::Composition(
                "diagonal circuits must be unitary".into(),
            ));
        }
        check_diagonal(dc)?;
    }
    let qudits = b.qudits().to_vec();
    let mut fresh = Fresh::after(diagonals.iter().flat_map(|c| c.qudits()).chain(&qudits));
    let nonempty = diagonals.iter().filter(|c| !c.ops().is_empty()).count();
    let registers: Vec<Vec<QuditId>> = (1..nonempty.max(1))
        .map(|_| fresh.take_n(qudits.len()))
        .collect();
    let layers: Vec<Vec<Op>> = diagonals.iter().map(|c| c.ops().to_vec()).collect();
    let ops = parallelize_ops(dim, &qudits, b.ops(), &layers, &registers);
    let mut all = qudits.clone();
    all.extend(fresh.issued().iter().copied());
    Circuit::new(dim, all, qudits.clone(), qudits, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitary_distance;

    fn fanout_gate(dim: Dim, v: Vec<u32>) -> Circuit {
        let n = v.len();
        let mut c = Circuit::on(dim, (0..=n as QuditId).collect()).unwrap();
        c.push(GateKind::Fanout(v), (0..=n as QuditId).collect())
            .unwrap();
        c
    }

    #[test]
    fn tree_depths() {
        for (n, l) in [(1, 1), (2, 2), (3, 2), (4, 3), (7, 3), (8, 4), (15, 4)] {
            let d = Dim::new(2).unwrap();
            assert_eq!(
                build_fanout(d, n, FanoutVariant::LogDepth).unwrap().depth(),
                l,
                "n={n}"
            );
            assert_eq!(build_fanout(d, n, FanoutVariant::Naive).unwrap().depth(), n);
            let general = build_fanout(d, n, FanoutVariant::LogDepthGeneral)
                .unwrap()
                .depth();
            if (n + 1).is_power_of_two() {
                assert_eq!(general, 2 * l - 1, "n={n}");
            } else {
                assert!(general < 2 * l, "n={n}");
            }
        }
    }

    #[test]
    fn general_tree_matches_fanout() {
        for d in [2, 3] {
            let dim = Dim::new(d).unwrap();
            for n in 1..=5 {
                let c = build_fanout(dim, n, FanoutVariant::LogDepthGeneral).unwrap();
                let u = fanout_gate(dim, vec![1; n]).unitary().unwrap();
                assert!(unitary_distance(&c.unitary().unwrap(), &u) < 1e-9);
            }
        }
    }

    #[test]
    fn generalized_gates() {
        let dim = Dim::new(3).unwrap();
        let c = build_generalized(dim, &[2, 1], GeneralizedKind::Fanout).unwrap();
        let input = crate::StateVector::basis(dim, &[0, 1, 2], &[1, 0, 0]).unwrap();
        let out = c.output_state_clean(&input).unwrap();
        let expect = crate::StateVector::basis(dim, &[0, 1, 2], &[1, 2, 1]).unwrap();
        assert!(out.fidelity_up_to_phase(&expect).unwrap() > 1.0 - 1e-12);

        let m = build_generalized(dim, &[1, 2], GeneralizedKind::Mod).unwrap();
        let mut gate = Circuit::on(dim, vec![0, 1, 2]).unwrap();
        gate.push(GateKind::Mod(vec![1, 2]), vec![0, 1, 2]).unwrap();
        assert!(unitary_distance(&m.unitary().unwrap(), &gate.unitary().unwrap()) < 1e-9);

        let ones = build_generalized(dim, &[1, 1, 1], GeneralizedKind::Fanout).unwrap();
        assert_eq!(ones.ops().len(), 1);
    }

    #[test]
    fn parallel_z_cubed() {
        let dim = Dim::new(2).unwrap();
        let b = Circuit::on(dim, vec![0]).unwrap();
        let mut z = Circuit::on(dim, vec![0]).unwrap();
        z.push(GateKind::Z(1), vec![0]).unwrap();
        let c = parallelize_commuting(&b, &[z.clone(), z.clone(), z.clone()]).unwrap();
        assert_eq!(c.qudits().len(), 3);
        assert!(unitary_distance(&c.unitary().unwrap(), &z.unitary().unwrap()) < 1e-9);
        let mut x = Circuit::on(dim, vec![0]).unwrap();
        x.push(GateKind::X(1), vec![0]).unwrap();
        assert!(matches!(
            parallelize_commuting(&b, &[x]),
            Err(Error::NotDiagonal(_))
        ));
    }

    #[test]
    fn parallel_with_basis_change() {
        // U_i = F^dagger D_i F: commuting, non-diagonal.
        let dim = Dim::new(3).unwrap();
        let mut b = Circuit::on(dim, vec![0, 1]).unwrap();
        b.push(GateKind::F, vec![0]).unwrap();
        b.push(GateKind::CX(1), vec![0, 1]).unwrap();
        let mut d1 = Circuit::on(dim, vec![0, 1]).unwrap();
        d1.push(GateKind::CZ(1), vec![0, 1]).unwrap();
        let mut d2 = Circuit::on(dim, vec![0, 1]).unwrap();
        d2.push(GateKind::P, vec![1]).unwrap();
        let c = parallelize_commuting(&b, &[d1.clone(), d2.clone()]).unwrap();
        let mut serial = b.clone();
        for op in d1.ops().iter().chain(d2.ops()) {
            serial.push(op.gate.clone(), op.sites.clone()).unwrap();
        }
        for op in b.inverse().unwrap().ops() {
            serial.push(op.gate.clone(), op.sites.clone()).unwrap();
        }
        assert!(unitary_distance(&c.unitary().unwrap(), &serial.unitary().unwrap()) < 1e-9);
    }
}
