use std::collections::{BTreeMap, HashSet};

use crate::circuit::{Circuit, Op};
use crate::convert::cpauli::controlled_pauli_ops;
use crate::convert::Fresh;
use crate::error::{Error, Result};
use crate::pattern::{Command, Pattern, Signal};
use crate::sim::GateKind;
use crate::QuditId;

/// Controlled gates realising a signal-dependent Pauli on `target`: one
/// `C X^c` (or `C Z^c`) per signal term `c s_r`, controlled by qudit `r`.
fn controlled(signal: &Signal, target: QuditId, x: bool) -> Vec<Op> {
    signal
        .terms()
        .map(|(r, c)| {
            let g = if x { GateKind::CX(c) } else { GateKind::CZ(c) };
            Op::new(g, vec![r, target])
        })
        .collect()
}

fn prepare_plus(p: &Pattern) -> Vec<Op> {
    p.qudits()
        .iter()
        .filter(|q| !p.inputs().contains(q))
        .map(|&q| Op::new(GateKind::F, vec![q]))
        .collect()
}

/// Unitary simulation of a standard pattern: non-inputs are prepared by
/// `F`, `E` becomes `CZ`, a measurement becomes `v(theta)` left in place
/// (the qudit coherently holds the outcome), and every signal-controlled
/// Pauli becomes a product of controlled `X^c` / `Z^c` gates.
pub fn pattern_to_circuit_coherent(p: &Pattern) -> Result<Circuit> {
    p.ensure_valid()?;
    if !p.is_standard() {
        return Err(Error::NotStandard(
            "coherent simulation needs a standard pattern",
        ));
    }
    let mut ops = prepare_plus(p);
    for cmd in p.commands() {
        match cmd {
            Command::E(i, j) => ops.push(Op::new(GateKind::CZ(1), vec![*i, *j])),
            Command::M {
                qudit,
                angles,
                s,
                t,
            } => {
                ops.extend(controlled(t, *qudit, false));
                ops.extend(controlled(s, *qudit, true));
                ops.push(Op::new(GateKind::V(angles.clone()), vec![*qudit]));
            }
            Command::X { qudit, signal } => ops.extend(controlled(signal, *qudit, true)),
            Command::Z { qudit, signal } => ops.extend(controlled(signal, *qudit, false)),
        }
    }
    Circuit::new(
        p.dim(),
        p.qudits().to_vec(),
        p.inputs().to_vec(),
        p.outputs().to_vec(),
        ops,
    )
}

/// Layer index of every measurement: independent ones are layer 0, a
/// measurement depending on layer `l` outcomes sits at least at `l + 1`.
fn dependency_layers(p: &Pattern) -> BTreeMap<usize, Vec<&Command>> {
    let mut level: BTreeMap<QuditId, usize> = BTreeMap::new();
    let mut layers: BTreeMap<usize, Vec<&Command>> = BTreeMap::new();
    for cmd in p.commands() {
        if let Command::M { qudit, s, .. } = cmd {
            let l = s.qudits().map(|r| level[&r] + 1).max().unwrap_or(0);
            level.insert(*qudit, l);
            layers.entry(l).or_default().push(cmd);
        }
    }
    layers
}

fn compile_block(p: &Pattern, block: &[Op], fresh: &mut Fresh) -> Result<Vec<Op>> {
    if block.is_empty() {
        return Ok(Vec::new());
    }
    let mut seen = HashSet::new();
    let sites: Vec<QuditId> = block
        .iter()
        .flat_map(|o| o.sites.iter().copied())
        .filter(|q| seen.insert(*q))
        .collect();
    controlled_pauli_ops(p.dim(), &sites, block, fresh)
}

/// Compiles a completely standard pattern into the fan-out model: the
/// entangling block as `CZ`s, then per dependency layer the correction
/// block feeding that layer's measurements (compiled to constant depth)
/// followed by its `v(theta)` layer, and finally the output corrections.
pub fn pattern_to_fanout_circuit(p: &Pattern) -> Result<Circuit> {
    p.ensure_valid()?;
    if !p.is_completely_standard() {
        return Err(Error::NotStandard(
            "fan-out compilation needs a completely standard pattern",
        ));
    }
    let mut fresh = Fresh::after(p.qudits());
    let mut ops = prepare_plus(p);
    for cmd in p.commands() {
        if let Command::E(i, j) = cmd {
            ops.push(Op::new(GateKind::CZ(1), vec![*i, *j]));
        }
    }
    for (_, layer) in dependency_layers(p) {
        let mut block = Vec::new();
        let mut local = Vec::new();
        for cmd in layer {
            if let Command::M {
                qudit, angles, s, ..
            } = cmd
            {
                block.extend(controlled(s, *qudit, true));
                local.push(Op::new(GateKind::V(angles.clone()), vec![*qudit]));
            }
        }
        ops.extend(compile_block(p, &block, &mut fresh)?);
        ops.extend(local);
    }
    let mut corrections = Vec::new();
    for cmd in p.commands() {
        match cmd {
            Command::X { qudit, signal } => corrections.extend(controlled(signal, *qudit, true)),
            Command::Z { qudit, signal } => corrections.extend(controlled(signal, *qudit, false)),
            _ => {}
        }
    }
    ops.extend(compile_block(p, &corrections, &mut fresh)?);
    let used: HashSet<QuditId> = ops.iter().flat_map(|o| o.sites.iter().copied()).collect();
    let mut qudits = p.qudits().to_vec();
    qudits.extend(fresh.issued().iter().copied().filter(|q| used.contains(q)));
    Circuit::new(
        p.dim(),
        qudits,
        p.inputs().to_vec(),
        p.outputs().to_vec(),
        ops,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::{
        circuit_to_pattern_standard, clifford_constant_depth, CliffordOutput, CliffordTarget,
    };
    use crate::pattern::RunMode;
    use crate::stabilizer::clifford_equivalent;
    use crate::{Dim, StateVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v_pattern(dim: Dim, theta: Vec<f64>) -> Pattern {
        Pattern::new(
            dim,
            vec![1, 2],
            vec![1],
            vec![2],
            vec![
                Command::E(1, 2),
                Command::measure(1, theta),
                Command::X {
                    qudit: 2,
                    signal: Signal::var(1),
                },
            ],
        )
        .unwrap()
    }

    fn pure_reduced_matches(c: &Circuit, input: &StateVector, expect: &StateVector) {
        let rho = c.output_density(input).unwrap();
        let a = expect.amplitudes();
        let mut fid = 0.0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                fid += (a[i].conj() * rho[(i, j)] * a[j]).re;
            }
        }
        assert!((fid - 1.0).abs() < 1e-8, "fidelity {fid}");
    }

    #[test]
    fn basic_v_pattern_circuit() {
        let dim = Dim::new(2).unwrap();
        let theta = vec![0.0, 0.7];
        let c = pattern_to_circuit_coherent(&v_pattern(dim, theta.clone())).unwrap();
        let names: Vec<&str> = c.ops().iter().map(|o| o.gate.name()).collect();
        assert_eq!(names, ["F", "CZ", "V", "CX"]);
        assert_eq!(c.ops()[3].sites, vec![1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let input = StateVector::random(dim, &[1], &mut rng).unwrap();
        let mut expect = input.clone();
        expect.apply_gate(&GateKind::V(theta), &[1]).unwrap();
        let expect = StateVector::from_amplitudes(dim, &[2], expect.amplitudes().to_vec()).unwrap();
        pure_reduced_matches(&c, &input, &expect);
    }

    #[test]
    fn measurement_free_pattern_is_its_circuit() {
        let dim = Dim::new(3).unwrap();
        let p = Pattern::new(
            dim,
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![Command::E(0, 1)],
        )
        .unwrap();
        let c = pattern_to_circuit_coherent(&p).unwrap();
        assert_eq!(c.ops(), &[Op::new(GateKind::CZ(1), vec![0, 1])]);
    }

    #[test]
    fn non_standard_rejected() {
        let dim = Dim::new(2).unwrap();
        let p = Pattern::new(
            dim,
            vec![1, 2],
            vec![1],
            vec![2],
            vec![Command::measure(1, vec![0.0, 0.0]), Command::E(1, 2)],
        );
        if let Ok(p) = p {
            assert!(pattern_to_circuit_coherent(&p).is_err());
            assert!(pattern_to_fanout_circuit(&p).is_err());
        }
    }

    #[test]
    fn chain_coherent_matches_circuit() {
        for d in [2, 3] {
            let dim = Dim::new(d).unwrap();
            let mut c = Circuit::on(dim, vec![1]).unwrap();
            for t in [0.3, 1.1, 0.4] {
                let angles = (0..d).map(|j| t * j as f64 * j as f64).collect();
                c.push(GateKind::V(angles), vec![1]).unwrap();
            }
            let p = circuit_to_pattern_standard(&c).unwrap();
            let coh = pattern_to_circuit_coherent(&p).unwrap();
            let fan = pattern_to_fanout_circuit(&p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
            for _ in 0..3 {
                let input = StateVector::random(dim, &[1], &mut rng).unwrap();
                let expect = c.output_state_clean(&input).unwrap();
                pure_reduced_matches(&coh, &input, &expect);
                pure_reduced_matches(&fan, &input, &expect);
            }
        }
    }

    #[test]
    fn dependency_layers_of_chain() {
        let dim = Dim::new(3).unwrap();
        let mut c = Circuit::on(dim, vec![1]).unwrap();
        for _ in 0..3 {
            c.push(GateKind::V(vec![0.0, 0.2, 0.5]), vec![1]).unwrap();
        }
        let p = circuit_to_pattern_standard(&c).unwrap();
        assert_eq!(dependency_layers(&p).len(), 3);
    }

    #[test]
    fn clifford_fanout_circuit_is_equivalent() {
        for d in [2, 3] {
            let dim = Dim::new(d).unwrap();
            let mut c = Circuit::on(dim, vec![0, 1]).unwrap();
            c.push(GateKind::F, vec![0]).unwrap();
            c.push(GateKind::CZ(1), vec![0, 1]).unwrap();
            c.push(GateKind::P, vec![1]).unwrap();
            c.push(GateKind::F, vec![1]).unwrap();
            let CliffordOutput::Circuit(w) =
                clifford_constant_depth(&c, CliffordTarget::FanoutCircuit).unwrap()
            else {
                unreachable!()
            };
            w.validate_gate_set(crate::GateModel::Fanout { max_arity: 2 })
                .unwrap();
            assert_eq!(clifford_equivalent(&c, &w).unwrap(), None, "d={d}");
        }
    }

    #[test]
    fn coherent_matches_all_branches() {
        let dim = Dim::new(2).unwrap();
        let p = v_pattern(dim, vec![0.0, 1.3]);
        let c = pattern_to_circuit_coherent(&p).unwrap();
        let input = StateVector::basis(dim, &[1], &[1]).unwrap();
        let rho = c.output_density(&input).unwrap();
        for b in p.run(&input, &RunMode::AllBranches).unwrap() {
            let r = b.state.reduced_density(p.outputs()).unwrap();
            assert!((r - &rho).iter().all(|z| z.norm() < 1e-9));
        }
    }
}
