//! Property tests for the algebraic, simulation, circuit, pattern, rewrite
//! and conversion invariants.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qudit_mbqc::algebra::{generator_matrix, pauli_conjugate, pauli_multiply, pauli_to_matrix};
use qudit_mbqc::circuit::{compose_parallel, compose_serial, unitary_distance};
use qudit_mbqc::convert::{
    build_fanout, circuit_to_pattern_cluster, circuit_to_pattern_composite,
    circuit_to_pattern_standard, parallelize_commuting, pattern_to_circuit_coherent, FanoutVariant,
};
use qudit_mbqc::io::Artifact;
use qudit_mbqc::pattern::{
    color_edges, compose_serial as pattern_serial, EntanglementGraph, RunMode,
};
use qudit_mbqc::random::{random_angles, random_guni, random_guni_pattern};
use qudit_mbqc::rewrite::{completely_standardise, pauli_simplify, signal_shift, standardise};
use qudit_mbqc::verify::{infidelity, verify, BranchMode, VerifyOptions};
use qudit_mbqc::{
    Circuit, CliffordGenerator, Command, Dim, GateKind, Pattern, PauliOperator, QuditId,
    StateVector, C64,
};

fn dim(d: u32) -> Dim {
    Dim::new(d).unwrap()
}

fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn pauli(d: u32, xi: i64, a: [i64; 2], b: [i64; 2]) -> PauliOperator {
    PauliOperator::new(dim(d), xi, &a, &b).unwrap()
}

fn pure(s: &StateVector) -> DMatrix<C64> {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    let n = s.norm();
    (&v * v.adjoint()) / C64::new(n * n, 0.0)
}

fn all_branch_opts(random_states: usize, seed: u64) -> VerifyOptions {
    VerifyOptions {
        random_states,
        seed,
        branches: BranchMode::All,
    }
}

/// Random circuit over every fixed-arity gate, for lowering checks.
fn random_mixed_circuit(k: Dim, n: usize, gates: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::on(k, (0..n as QuditId).collect()).unwrap();
    for _ in 0..gates {
        let q = rng.gen_range(0..n) as QuditId;
        let e = rng.gen_range(1..k.d());
        let pick = if n > 1 {
            rng.gen_range(0..10)
        } else {
            rng.gen_range(0..7)
        };
        let g = match pick {
            0 => GateKind::F,
            1 => GateKind::Finv,
            2 => GateKind::P,
            3 => GateKind::X(e),
            4 => GateKind::Z(e),
            5 => GateKind::R(random_angles(k, &mut rng)),
            6 => GateKind::V(random_angles(k, &mut rng)),
            7 => GateKind::CZ(e),
            8 => GateKind::CX(e),
            _ => GateKind::Swap,
        };
        let sites = if g.arity(k).unwrap() == 1 {
            vec![q]
        } else {
            let r = (q as usize + rng.gen_range(1..n)) % n;
            vec![q, r as QuditId]
        };
        c.push(g, sites).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_matches_matrices(
        d in 2u32..=5, xi in 0i64..10, a0 in 0i64..5, a1 in 0i64..5, b0 in 0i64..5, b1 in 0i64..5,
        which in 0usize..5,
    ) {
        let k = dim(d);
        let p = pauli(d, xi, [a0, a1], [b0, b1]);
        let g = [
            CliffordGenerator::F(0),
            CliffordGenerator::F(1),
            CliffordGenerator::P(0),
            CliffordGenerator::P(1),
            CliffordGenerator::CZ(0, 1),
        ][which];
        let u = generator_matrix(k, 2, g).unwrap();
        let want = &u * pauli_to_matrix(&p).unwrap() * u.adjoint();
        let got = pauli_to_matrix(&pauli_conjugate(g, &p).unwrap()).unwrap();
        prop_assert!(max_dev(&got, &want) < 1e-12);
    }

    #[test]
    fn multiplication_is_associative(
        d in 2u32..=5,
        e in proptest::collection::vec(0i64..10, 15),
    ) {
        let p = pauli(d, e[0], [e[1], e[2]], [e[3], e[4]]);
        let q = pauli(d, e[5], [e[6], e[7]], [e[8], e[9]]);
        let r = pauli(d, e[10], [e[11], e[12]], [e[13], e[14]]);
        let left = pauli_multiply(&pauli_multiply(&p, &q).unwrap(), &r).unwrap();
        let right = pauli_multiply(&p, &pauli_multiply(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let m = pauli_to_matrix(&p).unwrap() * pauli_to_matrix(&q).unwrap() * pauli_to_matrix(&r).unwrap();
        prop_assert!(max_dev(&pauli_to_matrix(&left).unwrap(), &m) < 1e-12);
    }

    #[test]
    fn state_norm_survives_long_gate_sequences(d in 2u32..=3, seed in any::<u64>()) {
        let k = dim(d);
        let c = random_mixed_circuit(k, 3, 1000, seed);
        let mut s = StateVector::random(k, c.qudits(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for op in c.ops() {
            s.apply_gate(&op.gate, &op.sites).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn measurement_branches_are_normalised(d in 2u32..=5, seed in any::<u64>(), s in 0u32..5, t in 0u32..5) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = StateVector::random(k, &[0, 1], &mut rng).unwrap();
        let theta = random_angles(k, &mut rng);
        let branches = state.measure_branches(0, &theta, s, t).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for b in &branches {
            prop_assert!((b.state.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pauli_before_measurement_shifts_signals(
        d in prop::sample::select(vec![2u32, 3, 5]),
        seed in any::<u64>(),
        s in 0u32..5, t in 0u32..5, s2 in 0u32..5, t2 in 0u32..5,
    ) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = StateVector::random(k, &[0, 1], &mut rng).unwrap();
        let theta = random_angles(k, &mut rng);
        // X^{s2} Z^{t2} inserted before the measurement: Z first, then X.
        let mut shifted = state.clone();
        shifted.apply_gate(&GateKind::Z(t2 % d), &[0]).unwrap();
        shifted.apply_gate(&GateKind::X(s2 % d), &[0]).unwrap();
        let a = shifted.measure_branches(0, &theta, s, t).unwrap();
        let b = state.measure_branches(0, &theta, s + s2, t + t2).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.outcome, y.outcome);
            prop_assert!((x.probability - y.probability).abs() < 1e-9);
            prop_assert!(infidelity(&pure(&x.state), &pure(&y.state)) < 1e-9);
        }
    }

    #[test]
    fn mod_is_fourier_conjugated_fanout(
        d in 2u32..=3,
        v in proptest::collection::vec(0u32..3, 1..=2),
    ) {
        let k = dim(d);
        let n = v.len() + 1;
        let sites: Vec<usize> = (0..n).collect();
        let neg: Vec<u32> = v.iter().map(|&w| k.neg(w % d)).collect();
        let mut f_all = DMatrix::identity(k.du().pow(n as u32), k.du().pow(n as u32));
        for q in 0..n {
            f_all = GateKind::F.embedded_matrix(k, n, &[q]).unwrap() * f_all;
        }
        let want = &f_all * GateKind::Fanout(neg).embedded_matrix(k, n, &sites).unwrap() * f_all.adjoint();
        let got = GateKind::Mod(v).embedded_matrix(k, n, &sites).unwrap();
        prop_assert!(max_dev(&got, &want) < 1e-12);
    }

    #[test]
    fn lowering_preserves_unitaries(d in 2u32..=3, n in 1usize..=3, gates in 0usize..=20, seed in any::<u64>()) {
        let c = random_mixed_circuit(dim(d), n, gates, seed);
        let g = c.lower_to_guni().unwrap();
        prop_assert!(g.is_guni());
        prop_assert!(unitary_distance(&g.unitary().unwrap(), &c.unitary().unwrap()) < 1e-9);
    }

    #[test]
    fn circuit_composition_laws(d in 2u32..=3, seed in any::<u64>(), g0 in 0usize..12, g1 in 0usize..12) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_guni(k, 3, g0, &mut rng).unwrap();
        let b = random_guni(k, 3, g1, &mut rng).unwrap();
        let serial = compose_serial(&b, &a).unwrap();
        prop_assert!(serial.depth() <= a.depth() + b.depth());
        prop_assert_eq!(serial.size(), a.size() + b.size());
        let moved = b.relabel(&|q| q + 100).unwrap();
        let par = compose_parallel(&moved, &a).unwrap();
        prop_assert_eq!(par.depth(), a.depth().max(b.depth()));
        prop_assert_eq!(par.size(), a.size() + b.size());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn converted_patterns_are_deterministic(d in 2u32..=3, n in 1usize..=2, seed in any::<u64>()) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, p) = random_guni_pattern(k, n, 4, &mut rng).unwrap();
        let input = StateVector::random(k, p.inputs(), &mut rng).unwrap();
        let runs = p.run(&input, &RunMode::AllBranches).unwrap();
        let first = pure(&runs[0].state);
        for b in &runs {
            prop_assert!(infidelity(&first, &pure(&b.state)) < 1e-9);
        }
    }

    #[test]
    fn pattern_composition_is_sound(d in 2u32..=3, seed in any::<u64>()) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c0 = random_guni(k, 2, 3, &mut rng).unwrap();
        let c1 = random_guni(k, 2, 3, &mut rng).unwrap();
        let p0 = circuit_to_pattern_composite(&c0).unwrap();
        let p1 = circuit_to_pattern_composite(&c1).unwrap();
        let both = pattern_serial(&p1, &p0).unwrap();
        let circuit = compose_serial(&c1, &c0).unwrap();
        let r = verify(&Artifact::Pattern(both), &Artifact::Circuit(circuit), &all_branch_opts(2, seed)).unwrap();
        prop_assert!(r.max_infidelity < 1e-9);
    }

    #[test]
    fn every_rewrite_pass_preserves_semantics(d in 2u32..=3, n in 1usize..=2, seed in any::<u64>()) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_guni(k, n, 5, &mut rng).unwrap();
        let p = circuit_to_pattern_composite(&c).unwrap();
        prop_assume!(p.measured_qudits().len() <= 5);
        let s = standardise(&p).unwrap();
        let passes = [s.clone(), pauli_simplify(&s).unwrap(), signal_shift(&s).unwrap(), completely_standardise(&p).unwrap()];
        let reference = Artifact::Circuit(c);
        for q in passes {
            let r = verify(&reference, &Artifact::Pattern(q), &all_branch_opts(1, seed)).unwrap();
            prop_assert!(r.max_infidelity < 1e-9);
        }
    }

    #[test]
    fn complete_standardisation_is_idempotent_and_clean(d in 2u32..=3, n in 1usize..=3, seed in any::<u64>()) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_guni(k, n, 8, &mut rng).unwrap();
        let once = completely_standardise(&circuit_to_pattern_composite(&c).unwrap()).unwrap();
        let twice = completely_standardise(&once).unwrap();
        prop_assert_eq!(&once, &twice);
        for cmd in once.commands() {
            if let Command::M { angles, s, t, .. } = cmd {
                prop_assert!(t.is_zero());
                if angles.iter().all(|x| x.abs() < 1e-12) {
                    prop_assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn converters_preserve_semantics(d in 2u32..=3, n in 1usize..=2, seed in any::<u64>()) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_guni(k, n, 3, &mut rng).unwrap();
        let reference = Artifact::Circuit(c.clone());
        let opts = VerifyOptions { random_states: 2, seed, branches: BranchMode::Sampled(2) };
        let cluster = circuit_to_pattern_cluster(&c).unwrap();
        prop_assert!(verify(&reference, &Artifact::Pattern(cluster), &opts).unwrap().max_infidelity < 1e-9);
        // The coherent circuit keeps every measured qudit, so use the
        // unpadded standard pattern to stay within dense simulation.
        let standard = circuit_to_pattern_standard(&c).unwrap();
        let coherent = pattern_to_circuit_coherent(&standard).unwrap();
        prop_assert!(verify(&reference, &Artifact::Circuit(coherent), &opts).unwrap().max_infidelity < 1e-9);
    }

    #[test]
    fn cluster_patterns_have_degree_at_most_three(d in 2u32..=3, n in 1usize..=6, seed in any::<u64>()) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_guni(k, n, 4 * n, &mut rng).unwrap();
        let p = circuit_to_pattern_cluster(&c).unwrap();
        prop_assert!(EntanglementGraph::from_pattern(&p).max_degree() <= 3);
    }

    #[test]
    fn colourings_never_beat_max_degree(
        edges in proptest::collection::vec((0u32..6, 0u32..6), 0..12),
    ) {
        let edges: Vec<(QuditId, QuditId)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        let g = EntanglementGraph::from_edges((0..6).collect(), &edges);
        let c = color_edges(&g);
        prop_assert!(c.is_proper());
        prop_assert!(c.num_colors >= g.max_degree());
    }

    #[test]
    fn parallelized_diagonals_leave_ancillas_clean(d in 2u32..=3, seed in any::<u64>(), layers in 1usize..=3) {
        let k = dim(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = Circuit::on(k, vec![0, 1]).unwrap();
        b.push(GateKind::F, vec![1]).unwrap();
        let diagonals: Vec<Circuit> = (0..layers)
            .map(|_| {
                let mut dc = Circuit::on(k, vec![0, 1]).unwrap();
                dc.push(GateKind::CZ(rng.gen_range(1..d)), vec![0, 1]).unwrap();
                dc.push(GateKind::Z(rng.gen_range(0..d)), vec![1]).unwrap();
                dc
            })
            .collect();
        let w = parallelize_commuting(&b, &diagonals).unwrap();
        let input = StateVector::random(k, &[0, 1], &mut rng).unwrap();
        // Errors unless every ancilla is back in |0> within 1e-9.
        prop_assert!(w.output_state_clean(&input).is_ok());
    }
}

#[test]
fn exponents_and_fourier_have_the_stated_orders() {
    for d in 2..=5 {
        let k = dim(d);
        let x = PauliOperator::single(k, 1, 0, 1, 0).unwrap();
        let z = PauliOperator::single(k, 1, 0, 0, 1).unwrap();
        let xz = PauliOperator::single(k, 1, 0, 1, 1).unwrap();
        let power = |p: &PauliOperator, m: u32| {
            (0..m).fold(PauliOperator::identity(k, 1), |acc, _| {
                pauli_multiply(&acc, p).unwrap()
            })
        };
        assert!(power(&x, d).is_identity());
        assert!(power(&z, d).is_identity());
        let cycle = power(&xz, k.big_d());
        assert!(cycle.is_identity() && cycle.xi() == 0, "d={d}");
        let f = GateKind::F.matrix(k).unwrap();
        let f4 = &f * &f * &f * &f;
        assert!(max_dev(&f4, &DMatrix::identity(k.du(), k.du())) < 1e-12);
    }
}

#[test]
fn fanout_has_order_d() {
    for d in 2..=4 {
        let k = dim(d);
        let m = GateKind::Fanout(vec![1, 1]).matrix(k).unwrap();
        let mut acc = DMatrix::identity(m.nrows(), m.ncols());
        for _ in 0..d {
            acc = &m * acc;
        }
        assert!(max_dev(&acc, &DMatrix::identity(m.nrows(), m.ncols())) < 1e-12);
    }
}

#[test]
fn log_depth_fanout_is_exact_on_full_trees() {
    for d in 2..=3 {
        for m in 1..=4 {
            let n = (1usize << m) - 1;
            let c = build_fanout(dim(d), n, FanoutVariant::LogDepth).unwrap();
            assert_eq!(c.depth(), m as usize);
            assert_eq!(
                build_fanout(dim(d), n, FanoutVariant::Naive)
                    .unwrap()
                    .depth(),
                n
            );
        }
    }
}

#[test]
fn coherent_circuits_of_random_patterns_are_pure() {
    let k = dim(2);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let (c, p): (Circuit, Pattern) = random_guni_pattern(k, 2, 4, &mut rng).unwrap();
        let w = pattern_to_circuit_coherent(&p).unwrap();
        let input = StateVector::random(k, c.inputs(), &mut rng).unwrap();
        let rho = w.output_density(&input).unwrap();
        let purity = (&rho * &rho).trace().re;
        assert!(purity > 1.0 - 1e-8);
        let want = c.simulate(&input).unwrap();
        assert!(infidelity(&pure(&want), &rho) < 1e-9);
    }
}
