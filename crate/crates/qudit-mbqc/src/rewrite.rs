//! Complete standardisation: standardise, Pauli-simplify, signal-shift.
//!
//! Each pass maps a pattern to a run-equivalent pattern (equal branch
//! probabilities and post-measurement states up to a per-branch phase).

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{Dim, C64};
use crate::error::{Error, Result};
use crate::pattern::{angles_equal, Command, Pattern, Signal, ANGLE_TOL};
use crate::sim::GateKind;
use crate::QuditId;

/// Angles within this distance of `0` or `p` but outside [`ANGLE_TOL`] are
/// reported as near misses by [`pauli_simplify_with_diagnostics`].
pub const NEAR_MISS_TOL: f64 = 1e-6;

/// The two measurement angles that simplify: `0` (`v(0) = F`) and `p`
/// (`v(p) = F P`).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliMeasurementTable {
    pub dim: Dim,
    pub zero: Vec<f64>,
    pub p: Vec<f64>,
}

impl PauliMeasurementTable {
    pub fn new(dim: Dim) -> Self {
        PauliMeasurementTable {
            dim,
            zero: dim.zero_angles(),
            p: dim.clifford_angles(),
        }
    }

    pub fn is_zero(&self, angles: &[f64]) -> bool {
        angles_equal(angles, &self.zero, ANGLE_TOL)
    }

    pub fn is_p(&self, angles: &[f64]) -> bool {
        angles_equal(angles, &self.p, ANGLE_TOL)
    }

    /// Largest deviation of `v(0)` from `F` and of `v(p)` from `F P`.
    pub fn check(&self) -> f64 {
        let d = self.dim;
        let m = |g: GateKind| g.matrix(d).expect("single-qudit gate");
        let f = m(GateKind::F);
        let p = m(GateKind::P);
        let v0 = m(GateKind::V(self.zero.clone()));
        let vp = m(GateKind::V(self.p.clone()));
        let fp = &f * &p;
        let dev = |a: &nalgebra::DMatrix<C64>, b: &nalgebra::DMatrix<C64>| {
            (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        dev(&v0, &f).max(dev(&vp, &fp))
    }
}

/// A measurement whose angle is close to, but not recognised as, a Pauli
/// angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub command: usize,
    pub qudit: QuditId,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "command {} (qudit {}): {}",
            self.command, self.qudit, self.message
        )
    }
}

#[derive(Clone, Default)]
struct Frame {
    x: Signal,
    z: Signal,
}

/// Moves every entangling command to the front, absorbs corrections on
/// measured qudits into their measurement signals and merges the remaining
/// corrections into one `Z` followed by one `X` per output.
///
/// Works by tracking a Pauli frame per qudit: commuting `X_i^s` past
/// `E_ij` leaves `X_i^s Z_j^s`, and a frame in front of `_t[M]^s` becomes
/// `_{t+z}[M]^{s+x}`.
pub fn standardise(p: &Pattern) -> Result<Pattern> {
    p.ensure_valid()?;
    let dim = p.dim();
    let mut frames: HashMap<QuditId, Frame> = HashMap::new();
    let mut entangle = Vec::new();
    let mut measure = Vec::new();
    for c in p.commands() {
        match c {
            Command::E(i, j) => {
                let xi = frames.get(i).map(|f| f.x.clone()).unwrap_or_default();
                let xj = frames.get(j).map(|f| f.x.clone()).unwrap_or_default();
                if !xi.is_zero() {
                    let f = frames.entry(*j).or_default();
                    f.z = f.z.add(&xi, dim);
                }
                if !xj.is_zero() {
                    let f = frames.entry(*i).or_default();
                    f.z = f.z.add(&xj, dim);
                }
                entangle.push(c.clone());
            }
            Command::X { qudit, signal } => {
                let f = frames.entry(*qudit).or_default();
                f.x = f.x.add(signal, dim);
            }
            Command::Z { qudit, signal } => {
                let f = frames.entry(*qudit).or_default();
                f.z = f.z.add(signal, dim);
            }
            Command::M {
                qudit,
                angles,
                s,
                t,
            } => {
                let f = frames.remove(qudit).unwrap_or_default();
                measure.push(Command::M {
                    qudit: *qudit,
                    angles: angles.clone(),
                    s: s.add(&f.x, dim),
                    t: t.add(&f.z, dim),
                });
            }
        }
    }
    let mut commands = entangle;
    commands.extend(measure);
    for q in p.outputs() {
        if let Some(f) = frames.remove(q) {
            if !f.z.is_zero() {
                commands.push(Command::Z {
                    qudit: *q,
                    signal: f.z,
                });
            }
            if !f.x.is_zero() {
                commands.push(Command::X {
                    qudit: *q,
                    signal: f.x,
                });
            }
        }
    }
    let out = p.with_commands(commands)?;
    debug_assert!(out.is_standard());
    Ok(out)
}

/// Drops `s` from `M^0` and turns `_t[M^p]^s` into `_{s+t}[M^p]`.
pub fn pauli_simplify(p: &Pattern) -> Result<Pattern> {
    pauli_simplify_with_diagnostics(p).map(|(p, _)| p)
}

/// [`pauli_simplify`] plus a note for every measurement angle that is
/// within [`NEAR_MISS_TOL`] of `0` or `p` but was left generic.
pub fn pauli_simplify_with_diagnostics(p: &Pattern) -> Result<(Pattern, Vec<Diagnostic>)> {
    if !p.is_standard() {
        return Err(Error::NotStandard("standard"));
    }
    let dim = p.dim();
    let table = PauliMeasurementTable::new(dim);
    let mut notes = Vec::new();
    let commands = p
        .commands()
        .iter()
        .enumerate()
        .map(|(k, c)| match c {
            Command::M {
                qudit,
                angles,
                s,
                t,
            } => {
                let (s, t) = if table.is_zero(angles) {
                    (Signal::zero(), t.clone())
                } else if table.is_p(angles) {
                    (Signal::zero(), s.add(t, dim))
                } else {
                    for (name, target) in [("0", &table.zero), ("p", &table.p)] {
                        if angles_equal(angles, target, NEAR_MISS_TOL) {
                            notes.push(Diagnostic {
                                command: k,
                                qudit: *qudit,
                                message: format!(
                                    "angle is within {NEAR_MISS_TOL:e} of {name} but not within {ANGLE_TOL:e}; left generic"
                                ),
                            });
                        }
                    }
                    (s.clone(), t.clone())
                };
                Command::M {
                    qudit: *qudit,
                    angles: angles.clone(),
                    s,
                    t,
                }
            }
            other => other.clone(),
        })
        .collect();
    Ok((p.with_commands(commands)?, notes))
}

/// Removes every `t` signal, left to right: `Z^t` in front of the
/// measurement shifts the observed outcome by `t`, so later references to
/// `s_i` are rewritten to `s_i - t`.
pub fn signal_shift(p: &Pattern) -> Result<Pattern> {
    if !p.is_standard() {
        return Err(Error::NotStandard("standard"));
    }
    let dim = p.dim();
    let mut commands = p.commands().to_vec();
    for k in 0..commands.len() {
        let (qudit, t) = match &mut commands[k] {
            Command::M { qudit, t, .. } if !t.is_zero() => (*qudit, std::mem::take(t)),
            _ => continue,
        };
        let delta = t.scaled(-1, dim);
        for c in commands.iter_mut().skip(k + 1) {
            match c {
                Command::M { s, t, .. } => {
                    *s = s.substitute(qudit, &delta, dim);
                    *t = t.substitute(qudit, &delta, dim);
                }
                Command::X { signal, .. } | Command::Z { signal, .. } => {
                    *signal = signal.substitute(qudit, &delta, dim);
                }
                Command::E(..) => {}
            }
        }
    }
    p.with_commands(commands)
}

/// Standardisation, Pauli simplification and signal shifting in that
/// order. The result is completely standard. Size can grow: moving an `X`
/// correction past an entangler spawns a `Z` on the partner qudit.
pub fn completely_standardise(p: &Pattern) -> Result<Pattern> {
    let out = signal_shift(&pauli_simplify(&standardise(p)?)?)?;
    debug_assert!(out.is_completely_standard());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::RunMode;
    use crate::sim::StateVector;

    fn x(q: QuditId, sig: Signal) -> Command {
        Command::X {
            qudit: q,
            signal: sig,
        }
    }

    fn m(q: QuditId, angles: Vec<f64>) -> Command {
        Command::measure(q, angles)
    }

    /// The three-measurement chain `E12 M1 X2 E23 M2 X3 E34 M3 X4`.
    pub(crate) fn chain(dim: Dim, theta: Vec<f64>, phi: Vec<f64>, psi: Vec<f64>) -> Pattern {
        Pattern::new(
            dim,
            vec![1, 2, 3, 4],
            vec![1],
            vec![4],
            vec![
                Command::E(1, 2),
                m(1, theta),
                x(2, Signal::var(1)),
                Command::E(2, 3),
                m(2, phi),
                x(3, Signal::var(2)),
                Command::E(3, 4),
                m(3, psi),
                x(4, Signal::var(3)),
            ],
        )
        .unwrap()
    }

    fn assert_equivalent(a: &Pattern, b: &Pattern) {
        let d = a.dim();
        let n = a.inputs().len();
        let total = d.du().pow(n as u32);
        for idx in 0..total {
            let digits: Vec<u32> = (0..n)
                .map(|k| ((idx / d.du().pow((n - 1 - k) as u32)) % d.du()) as u32)
                .collect();
            let input = StateVector::basis(d, a.inputs(), &digits).unwrap();
            let ra = a.run(&input, &RunMode::AllBranches).unwrap();
            let rb = b.run(&input, &RunMode::AllBranches).unwrap();
            assert_eq!(ra.len(), rb.len());
            for (x, y) in ra.iter().zip(&rb) {
                assert_eq!(x.outcomes, y.outcomes);
                assert!((x.probability - y.probability).abs() < 1e-9);
                assert!(x.state.fidelity_up_to_phase(&y.state).unwrap() > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn table_matches_matrices() {
        for d in [2, 3, 4, 5] {
            assert!(PauliMeasurementTable::new(Dim::new(d).unwrap()).check() < 1e-12);
        }
    }

    #[test]
    fn chain_standardises_to_known_form() {
        let k = Dim::new(3).unwrap();
        let theta = vec![0.0, 0.3, 1.1];
        let phi = vec![0.0, 0.7, 0.2];
        let psi = vec![0.0, 1.9, 0.4];
        let p = chain(k, theta, phi, psi);
        let s = standardise(&p).unwrap();
        assert_eq!(
            s.notation(),
            "X_4^{s3} Z_4^{s2} _{s1}[M_3^θ]^{s2} [M_2^θ]^{s1} M_1^θ E_{3,4} E_{2,3} E_{1,2}"
        );
        assert_equivalent(&p, &s);
        let c = completely_standardise(&p).unwrap();
        assert!(c.is_completely_standard());
        assert_equivalent(&p, &c);
        match c.commands().last().unwrap() {
            Command::X { signal, .. } => assert_eq!(signal.display(k), "s3-s1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn clifford_chain_has_no_dependent_measurements() {
        let k = Dim::new(3).unwrap();
        let p = chain(
            k,
            vec![0.0, 0.3, 1.1],
            vec![0.0, 0.7, 0.2],
            k.clifford_angles(),
        );
        let simplified = pauli_simplify(&standardise(&p).unwrap()).unwrap();
        match &simplified.commands()[5] {
            Command::M { s, t, .. } => {
                assert!(s.is_zero());
                assert_eq!(t.display(k), "s2+s1");
            }
            other => panic!("unexpected {other:?}"),
        }
        let c = signal_shift(&simplified).unwrap();
        match c.commands().last().unwrap() {
            Command::X { signal, .. } => assert_eq!(signal.display(k), "s3-s2-s1"),
            other => panic!("unexpected {other:?}"),
        }
        assert_equivalent(&p, &c);

        let all = chain(k, k.zero_angles(), k.clifford_angles(), k.zero_angles());
        assert_eq!(
            completely_standardise(&all)
                .unwrap()
                .dependent_measurements(),
            0
        );
    }

    #[test]
    fn pauli_rules() {
        let k = Dim::new(2).unwrap();
        let mk = |angles: Vec<f64>| {
            Pattern::new(
                k,
                vec![1, 2, 3],
                vec![1, 2, 3],
                vec![3],
                vec![
                    m(1, vec![0.0, 0.5]),
                    Command::M {
                        qudit: 2,
                        angles,
                        s: Signal::var(1),
                        t: Signal::var(1),
                    },
                ],
            )
            .unwrap()
        };
        let zero = pauli_simplify(&mk(vec![0.0, 0.0])).unwrap();
        assert!(
            matches!(&zero.commands()[1], Command::M { s, t, .. } if s.is_zero() && !t.is_zero())
        );
        let generic = mk(vec![0.0, 0.4]);
        assert_eq!(pauli_simplify(&generic).unwrap(), generic);
        let (_, notes) = pauli_simplify_with_diagnostics(&mk(vec![0.0, 1e-9])).unwrap();
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn standardise_is_idempotent() {
        let k = Dim::new(2).unwrap();
        let p = chain(k, vec![0.0, 0.3], vec![0.0, 0.7], vec![0.0, 1.9]);
        let s = standardise(&p).unwrap();
        assert_eq!(standardise(&s).unwrap(), s);
        let c = completely_standardise(&p).unwrap();
        assert_eq!(completely_standardise(&c).unwrap(), c);
    }

    #[test]
    fn size_can_grow() {
        // X correction before an entangler spawns a Z on the partner.
        let k = Dim::new(2).unwrap();
        let p = Pattern::new(
            k,
            vec![1, 2, 3],
            vec![1, 3],
            vec![2, 3],
            vec![
                Command::E(1, 2),
                m(1, vec![0.0, 0.4]),
                x(2, Signal::var(1)),
                Command::E(2, 3),
            ],
        )
        .unwrap();
        let c = completely_standardise(&p).unwrap();
        assert_eq!(c.size(), p.size() + 1);
        assert_equivalent(&p, &c);
    }
}
