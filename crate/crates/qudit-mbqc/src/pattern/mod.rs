//! Measurement-pattern IR: entangling commands, dependent measurements and
//! Pauli corrections driven by signals.
//!
//! Commands are stored in execution order. The conventional right-to-left
//! written form is available through [`Pattern::notation`].

mod graph;
mod run;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Dim;
use crate::circuit::{serial_map, trace, DepthReport};
use crate::error::{Error, Result};
use crate::QuditId;

pub use graph::{
    color_edges, entanglement_depth, schedule_entanglement, EdgeColoring, EntanglementGraph,
    EXACT_EDGE_LIMIT,
};
pub use run::{Branch, RunMode};

/// A `Z(d)`-linear combination of measurement outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signal(BTreeMap<QuditId, u32>);

impl Signal {
    pub fn zero() -> Self {
        Signal(BTreeMap::new())
    }

    /// The outcome `s_q` itself.
    pub fn var(q: QuditId) -> Self {
        Signal(BTreeMap::from([(q, 1)]))
    }

    pub fn from_terms(dim: Dim, terms: impl IntoIterator<Item = (QuditId, i64)>) -> Self {
        let mut acc: BTreeMap<QuditId, i64> = BTreeMap::new();
        for (q, c) in terms {
            *acc.entry(q).or_insert(0) += c;
        }
        Signal(
            acc.into_iter()
                .map(|(q, c)| (q, dim.modd(c)))
                .filter(|&(_, c)| c != 0)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, q: QuditId) -> u32 {
        self.0.get(&q).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (QuditId, u32)> + '_ {
        self.0.iter().map(|(&q, &c)| (q, c))
    }

    pub fn qudits(&self) -> impl Iterator<Item = QuditId> + '_ {
        self.0.keys().copied()
    }

    pub fn reduced(&self, dim: Dim) -> Signal {
        Signal::from_terms(dim, self.terms().map(|(q, c)| (q, c as i64)))
    }

    pub fn add(&self, other: &Signal, dim: Dim) -> Signal {
        Signal::from_terms(
            dim,
            self.terms()
                .chain(other.terms())
                .map(|(q, c)| (q, c as i64)),
        )
    }

    pub fn scaled(&self, k: i64, dim: Dim) -> Signal {
        Signal::from_terms(dim, self.terms().map(|(q, c)| (q, c as i64 * k)))
    }

    /// Replaces `s_q` by `s_q + delta` wherever `s_q` occurs.
    pub fn substitute(&self, q: QuditId, delta: &Signal, dim: Dim) -> Signal {
        let c = self.coeff(q);
        if c == 0 {
            return self.clone();
        }
        self.add(&delta.scaled(c as i64, dim), dim)
    }

    pub fn eval(&self, outcomes: &BTreeMap<QuditId, u32>, dim: Dim) -> Result<u32> {
        let mut acc: u64 = 0;
        for (q, c) in self.terms() {
            let v = outcomes.get(&q).ok_or(Error::MissingOutcome(q))?;
            acc += c as u64 * *v as u64;
        }
        Ok((acc % dim.d() as u64) as u32)
    }

    /// Human-readable form such as `s3-s2-s1`, newest outcome first.
    pub fn display(&self, dim: Dim) -> String {
        let mut out = String::new();
        for (q, c) in self.0.iter().rev() {
            let (sign, mag) = if dim.d() > 2 && *c == dim.d() - 1 {
                ('-', 1)
            } else {
                ('+', *c)
            };
            if !(out.is_empty() && sign == '+') {
                out.push(sign);
            }
            if mag != 1 {
                out.push_str(&mag.to_string());
            }
            out.push_str(&format!("s{q}"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    /// `E_ij`: controlled-Z between two qudits.
    E(QuditId, QuditId),
    /// `_t[M^theta_i]^s`: apply `v(theta) X^s Z^t`, then measure in the
    /// computational basis and discard.
    M {
        qudit: QuditId,
        angles: Vec<f64>,
        s: Signal,
        t: Signal,
    },
    /// `X_i^s`.
    X { qudit: QuditId, signal: Signal },
    /// `Z_i^s`.
    Z { qudit: QuditId, signal: Signal },
}

impl Command {
    pub fn measure(qudit: QuditId, angles: Vec<f64>) -> Self {
        Command::M {
            qudit,
            angles,
            s: Signal::zero(),
            t: Signal::zero(),
        }
    }

    pub fn qudits(&self) -> Vec<QuditId> {
        match self {
            Command::E(i, j) => vec![*i, *j],
            Command::M { qudit, .. } | Command::X { qudit, .. } | Command::Z { qudit, .. } => {
                vec![*qudit]
            }
        }
    }

    /// Outcomes this command depends on.
    pub fn dependencies(&self) -> Vec<QuditId> {
        match self {
            Command::E(..) => vec![],
            Command::M { s, t, .. } => {
                let set: BTreeSet<QuditId> = s.qudits().chain(t.qudits()).collect();
                set.into_iter().collect()
            }
            Command::X { signal, .. } | Command::Z { signal, .. } => signal.qudits().collect(),
        }
    }

    pub fn is_entangling(&self) -> bool {
        matches!(self, Command::E(..))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Command::M { .. })
    }

    pub fn is_correction(&self) -> bool {
        matches!(self, Command::X { .. } | Command::Z { .. })
    }

    fn normalized(&self, dim: Dim) -> Option<Command> {
        Some(match self {
            Command::E(i, j) => Command::E(*i, *j),
            Command::M {
                qudit,
                angles,
                s,
                t,
            } => Command::M {
                qudit: *qudit,
                angles: angles.clone(),
                s: s.reduced(dim),
                t: t.reduced(dim),
            },
            Command::X { qudit, signal } => {
                let signal = signal.reduced(dim);
                if signal.is_zero() {
                    return None;
                }
                Command::X {
                    qudit: *qudit,
                    signal,
                }
            }
            Command::Z { qudit, signal } => {
                let signal = signal.reduced(dim);
                if signal.is_zero() {
                    return None;
                }
                Command::Z {
                    qudit: *qudit,
                    signal,
                }
            }
        })
    }

    fn relabeled(&self, f: &dyn Fn(QuditId) -> QuditId) -> Command {
        let sig = |s: &Signal| Signal(s.0.iter().map(|(&q, &c)| (f(q), c)).collect());
        match self {
            Command::E(i, j) => Command::E(f(*i), f(*j)),
            Command::M {
                qudit,
                angles,
                s,
                t,
            } => Command::M {
                qudit: f(*qudit),
                angles: angles.clone(),
                s: sig(s),
                t: sig(t),
            },
            Command::X { qudit, signal } => Command::X {
                qudit: f(*qudit),
                signal: sig(signal),
            },
            Command::Z { qudit, signal } => Command::Z {
                qudit: f(*qudit),
                signal: sig(signal),
            },
        }
    }
}

/// Angle-vector equality up to `2 pi` per entry, within `tol`.
pub fn angles_equal(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            let r = (x - y).rem_euclid(2.0 * std::f64::consts::PI);
            r.min(2.0 * std::f64::consts::PI - r) <= tol
        })
}

/// Tolerance used to recognise the Pauli angles `0` and `p`.
pub const ANGLE_TOL: f64 = 1e-12;

/// Classification of a measurement angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleClass {
    Zero,
    Clifford,
    Generic,
}

pub fn classify_angles(dim: Dim, angles: &[f64]) -> AngleClass {
    if angles_equal(angles, &dim.zero_angles(), ANGLE_TOL) {
        AngleClass::Zero
    } else if angles_equal(angles, &dim.clifford_angles(), ANGLE_TOL) {
        AngleClass::Clifford
    } else {
        AngleClass::Generic
    }
}

/// The first violated well-formedness rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub command: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.command {
            Some(k) => write!(f, "command {k}: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    dim: Dim,
    qudits: Vec<QuditId>,
    inputs: Vec<QuditId>,
    outputs: Vec<QuditId>,
    commands: Vec<Command>,
}

impl Pattern {
    /// Builds a pattern, checking ids and parameters and dropping
    /// corrections whose signal is identically zero. Use [`Pattern::validate`]
    /// for the sequencing rules.
    pub fn new(
        dim: Dim,
        qudits: Vec<QuditId>,
        inputs: Vec<QuditId>,
        outputs: Vec<QuditId>,
        commands: Vec<Command>,
    ) -> Result<Self> {
        let set: HashSet<QuditId> = qudits.iter().copied().collect();
        if set.len() != qudits.len() {
            let mut seen = HashSet::new();
            for q in &qudits {
                if !seen.insert(q) {
                    return Err(Error::DuplicateQudit(*q));
                }
            }
        }
        for list in [&inputs, &outputs] {
            let mut seen = HashSet::new();
            for q in list.iter() {
                if !set.contains(q) {
                    return Err(Error::UnknownQudit(*q));
                }
                if !seen.insert(q) {
                    return Err(Error::DuplicateQudit(*q));
                }
            }
        }
        let mut normalized = Vec::with_capacity(commands.len());
        for (k, c) in commands.iter().enumerate() {
            for q in c.qudits().iter().chain(c.dependencies().iter()) {
                if !set.contains(q) {
                    return Err(Error::UnknownQudit(*q));
                }
            }
            match c {
                Command::E(i, j) if i == j => {
                    return Err(Error::IllFormed(format!(
                        "command {k}: E on a single qudit {i}"
                    )))
                }
                Command::M { angles, .. } if angles.len() != dim.du() => {
                    return Err(Error::IllFormed(format!(
                        "command {k}: angle vector of length {} for d={}",
                        angles.len(),
                        dim.d()
                    )))
                }
                Command::M { angles, .. } if angles.iter().any(|a| !a.is_finite()) => {
                    return Err(Error::IllFormed(format!("command {k}: non-finite angle")))
                }
                _ => {}
            }
            if let Some(n) = c.normalized(dim) {
                normalized.push(n);
            }
        }
        Ok(Pattern {
            dim,
            qudits,
            inputs,
            outputs,
            commands: normalized,
        })
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

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    pub fn with_commands(&self, commands: Vec<Command>) -> Result<Pattern> {
        Pattern::new(
            self.dim,
            self.qudits.clone(),
            self.inputs.clone(),
            self.outputs.clone(),
            commands,
        )
    }

    pub fn max_qudit(&self) -> Option<QuditId> {
        self.qudits.iter().copied().max()
    }

    /// Checks the sequencing rules; returns the first violation.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let outputs: HashSet<QuditId> = self.outputs.iter().copied().collect();
        let mut measured: HashSet<QuditId> = HashSet::new();
        let fail = |k: usize, reason: String| Violation {
            command: Some(k),
            reason,
        };
        for (k, c) in self.commands.iter().enumerate() {
            for q in c.dependencies() {
                if !measured.contains(&q) {
                    return Err(fail(
                        k,
                        format!("signal uses outcome of qudit {q} before it is measured"),
                    ));
                }
            }
            for q in c.qudits() {
                if measured.contains(&q) {
                    return Err(fail(k, format!("qudit {q} used after its measurement")));
                }
            }
            if let Command::M { qudit, .. } = c {
                if outputs.contains(qudit) {
                    return Err(fail(k, format!("output qudit {qudit} is measured")));
                }
                measured.insert(*qudit);
            }
        }
        for q in &self.qudits {
            if !outputs.contains(q) && !measured.contains(q) {
                return Err(Violation {
                    command: None,
                    reason: format!("non-output qudit {q} is never measured"),
                });
            }
        }
        Ok(())
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().map_err(|v| Error::IllFormed(v.to_string()))
    }

    pub fn size(&self) -> usize {
        self.commands.iter().map(|c| c.qudits().len()).sum()
    }

    /// Longest chain where consecutive commands share a qudit or the later
    /// one depends on the earlier measurement's outcome.
    pub fn depth_and_size(&self) -> DepthReport {
        let mut qudit_h: HashMap<QuditId, (usize, usize)> = HashMap::new();
        let mut outcome_h: HashMap<QuditId, (usize, usize)> = HashMap::new();
        let mut pred = Vec::with_capacity(self.commands.len());
        let mut best = (0usize, None);
        for (k, c) in self.commands.iter().enumerate() {
            let mut h = 0;
            let mut p = None;
            let qs = c.qudits();
            let deps = c.dependencies();
            let candidates = qs
                .iter()
                .filter_map(|q| qudit_h.get(q))
                .chain(deps.iter().filter_map(|q| outcome_h.get(q)));
            for &(hq, last) in candidates {
                if hq > h {
                    h = hq;
                    p = Some(last);
                }
            }
            let h = h + 1;
            for q in qs {
                qudit_h.insert(q, (h, k));
            }
            if let Command::M { qudit, .. } = c {
                outcome_h.insert(*qudit, (h, k));
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

    /// Entangling commands first, then measurements, then corrections, with
    /// corrections acting on outputs only.
    pub fn is_standard(&self) -> bool {
        let mut phase = 0;
        for c in &self.commands {
            let p = match c {
                Command::E(..) => 0,
                Command::M { .. } => 1,
                Command::X { qudit, .. } | Command::Z { qudit, .. } => {
                    if !self.outputs.contains(qudit) {
                        return false;
                    }
                    2
                }
            };
            if p < phase {
                return false;
            }
            phase = p;
        }
        true
    }

    /// Standard, no measurement carries a `t` signal, and Pauli-angle
    /// measurements carry no `s` signal either.
    pub fn is_completely_standard(&self) -> bool {
        self.is_standard()
            && self.commands.iter().all(|c| match c {
                Command::M { angles, s, t, .. } => {
                    t.is_zero()
                        && (s.is_zero() || classify_angles(self.dim, angles) == AngleClass::Generic)
                }
                _ => true,
            })
    }

    /// Number of measurements with a nonzero signal.
    pub fn dependent_measurements(&self) -> usize {
        self.commands
            .iter()
            .filter(|c| matches!(c, Command::M { s, t, .. } if !s.is_zero() || !t.is_zero()))
            .count()
    }

    pub fn measured_qudits(&self) -> Vec<QuditId> {
        self.commands
            .iter()
            .filter_map(|c| match c {
                Command::M { qudit, .. } => Some(*qudit),
                _ => None,
            })
            .collect()
    }

    /// Copy with every qudit id passed through `f` (must be injective).
    pub fn relabel(&self, f: &dyn Fn(QuditId) -> QuditId) -> Result<Pattern> {
        let map = |v: &[QuditId]| v.iter().map(|&q| f(q)).collect::<Vec<_>>();
        Pattern::new(
            self.dim,
            map(&self.qudits),
            map(&self.inputs),
            map(&self.outputs),
            self.commands.iter().map(|c| c.relabeled(f)).collect(),
        )
    }

    /// Written right-to-left as in the measurement calculus, e.g.
    /// `X_4^{s3} Z_4^{s2} _{s1}[M_3^θ]^{s2} ... E_{1,2}`.
    pub fn notation(&self) -> String {
        let dim = self.dim;
        let angle = |a: &[f64]| match classify_angles(dim, a) {
            AngleClass::Zero => "0".to_string(),
            AngleClass::Clifford => "p".to_string(),
            AngleClass::Generic => "θ".to_string(),
        };
        self.commands
            .iter()
            .rev()
            .map(|c| match c {
                Command::E(i, j) => format!("E_{{{i},{j}}}"),
                Command::M {
                    qudit,
                    angles,
                    s,
                    t,
                } => {
                    let mut out = String::new();
                    if !t.is_zero() {
                        out.push_str(&format!("_{{{}}}", t.display(dim)));
                    }
                    let core = format!("M_{qudit}^{}", angle(angles));
                    if s.is_zero() && t.is_zero() {
                        out.push_str(&core);
                    } else {
                        out.push_str(&format!("[{core}]"));
                    }
                    if !s.is_zero() {
                        out.push_str(&format!("^{{{}}}", s.display(dim)));
                    }
                    out
                }
                Command::X { qudit, signal } => format!("X_{qudit}^{{{}}}", signal.display(dim)),
                Command::Z { qudit, signal } => format!("Z_{qudit}^{{{}}}", signal.display(dim)),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Serial composite `p1 p0` (run `p0` first), identifying the inputs of
/// `p1` with the outputs of `p0` position by position. Other qudits of `p1`
/// receive fresh ids above `p0`'s range.
pub fn compose_serial(p1: &Pattern, p0: &Pattern) -> Result<Pattern> {
    p0.dim.ensure_same(p1.dim)?;
    if p0.outputs.len() != p1.inputs.len() {
        return Err(Error::Composition(format!(
            "{} outputs feed {} inputs",
            p0.outputs.len(),
            p1.inputs.len()
        )));
    }
    let map = serial_map(&p0.qudits, &p0.outputs, &p1.qudits, &p1.inputs);
    let p1 = p1.relabel(&|q| map[&q])?;
    let mut qudits = p0.qudits.clone();
    let known: HashSet<QuditId> = qudits.iter().copied().collect();
    qudits.extend(p1.qudits.iter().filter(|q| !known.contains(q)));
    let mut commands = p0.commands.clone();
    commands.extend(p1.commands.iter().cloned());
    Pattern::new(
        p0.dim,
        qudits,
        p0.inputs.clone(),
        p1.outputs.clone(),
        commands,
    )
}

/// Parallel composite on disjoint qudit sets.
pub fn compose_parallel(p1: &Pattern, p0: &Pattern) -> Result<Pattern> {
    p0.dim.ensure_same(p1.dim)?;
    if let Some(q) = p1.qudits.iter().find(|q| p0.qudits.contains(q)) {
        return Err(Error::Composition(format!(
            "qudit {q} used by both patterns"
        )));
    }
    let cat = |a: &[QuditId], b: &[QuditId]| a.iter().chain(b).copied().collect::<Vec<_>>();
    let mut commands = p0.commands.clone();
    commands.extend(p1.commands.iter().cloned());
    Pattern::new(
        p0.dim,
        cat(&p0.qudits, &p1.qudits),
        cat(&p0.inputs, &p1.inputs),
        cat(&p0.outputs, &p1.outputs),
        commands,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> Dim {
        Dim::new(d).unwrap()
    }

    fn v_pattern(k: Dim, theta: Vec<f64>) -> Pattern {
        Pattern::new(
            k,
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

    #[test]
    fn signal_arithmetic() {
        let k = dim(3);
        let a = Signal::from_terms(k, [(1, 1), (2, 2)]);
        let b = Signal::from_terms(k, [(2, 1), (3, 4)]);
        let sum = a.add(&b, k);
        assert_eq!(sum.coeff(2), 0);
        assert_eq!(sum.coeff(3), 1);
        let outcomes = BTreeMap::from([(1, 2), (2, 1), (3, 2)]);
        assert_eq!(a.eval(&outcomes, k).unwrap(), (2 + 2) % 3);
        // s1 -> s1 - s2 applied to 2 s1 + s3
        let s = Signal::from_terms(k, [(1, 2), (3, 1)]);
        let shifted = s.substitute(1, &Signal::from_terms(k, [(2, -1)]), k);
        assert_eq!(shifted, Signal::from_terms(k, [(1, 2), (2, -2), (3, 1)]));
        assert_eq!(
            Signal::from_terms(k, [(3, 1), (2, -1), (1, -1)]).display(k),
            "s3-s2-s1"
        );
        assert!(Signal::zero().eval(&BTreeMap::new(), k).unwrap() == 0);
        assert!(Signal::var(9).eval(&BTreeMap::new(), k).is_err());
    }

    #[test]
    fn cz_pattern_is_valid() {
        let p = Pattern::new(
            dim(2),
            vec![1, 2],
            vec![1, 2],
            vec![1, 2],
            vec![Command::E(1, 2)],
        )
        .unwrap();
        assert!(p.validate().is_ok());
        assert!(p.is_standard());
    }

    #[test]
    fn measuring_an_output_is_rejected() {
        let p = Pattern::new(
            dim(2),
            vec![1, 2],
            vec![1],
            vec![2],
            vec![
                Command::E(1, 2),
                Command::measure(1, vec![0.0; 2]),
                Command::measure(2, vec![0.0; 2]),
            ],
        )
        .unwrap();
        let v = p.validate().unwrap_err();
        assert_eq!(v.command, Some(2));
    }

    #[test]
    fn causality_is_enforced() {
        let p = Pattern::new(
            dim(2),
            vec![1, 2, 3],
            vec![1],
            vec![3],
            vec![
                Command::E(1, 2),
                Command::E(2, 3),
                Command::M {
                    qudit: 1,
                    angles: vec![0.0; 2],
                    s: Signal::var(2),
                    t: Signal::zero(),
                },
                Command::measure(2, vec![0.0; 2]),
            ],
        )
        .unwrap();
        assert_eq!(p.validate().unwrap_err().command, Some(2));
    }

    #[test]
    fn unmeasured_non_output_is_rejected() {
        let p = Pattern::new(dim(2), vec![1, 2], vec![1], vec![2], vec![Command::E(1, 2)]).unwrap();
        assert_eq!(p.validate().unwrap_err().command, None);
    }

    #[test]
    fn zero_corrections_are_dropped() {
        let p = Pattern::new(
            dim(3),
            vec![1],
            vec![1],
            vec![1],
            vec![Command::X {
                qudit: 1,
                signal: Signal::from_terms(dim(3), [(1, 3)]),
            }],
        )
        .unwrap();
        assert!(p.commands().is_empty());
    }

    #[test]
    fn depth_with_dependencies() {
        let p = v_pattern(dim(2), vec![0.1, 0.2]);
        let r = p.depth_and_size();
        assert_eq!((r.depth, r.size), (3, 4));
        assert_eq!(r.longest_path, vec![0, 1, 2]);

        // Independent measurements on distinct qudits after disjoint E's.
        let p = Pattern::new(
            dim(2),
            vec![1, 2, 3, 4],
            vec![],
            vec![2, 4],
            vec![
                Command::E(1, 2),
                Command::E(3, 4),
                Command::measure(1, vec![0.0; 2]),
                Command::measure(3, vec![0.0; 2]),
            ],
        )
        .unwrap();
        assert_eq!(p.depth(), 2);

        // X then Z on the same output qudit stack up.
        let p = Pattern::new(
            dim(2),
            vec![1],
            vec![1],
            vec![1],
            vec![
                Command::X {
                    qudit: 1,
                    signal: Signal::var(1),
                },
                Command::Z {
                    qudit: 1,
                    signal: Signal::var(1),
                },
            ],
        )
        .unwrap();
        assert_eq!(p.depth(), 2);
    }

    #[test]
    fn notation_reads_right_to_left() {
        let p = v_pattern(dim(2), vec![0.1, 0.2]);
        assert_eq!(p.notation(), "X_2^{s1} M_1^θ E_{1,2}");
    }

    #[test]
    fn serial_composition_relabels() {
        let k = dim(2);
        let p = v_pattern(k, vec![0.1, 0.2]);
        let pp = compose_serial(&p, &p).unwrap();
        assert_eq!(pp.qudits(), &[1, 2, 3]);
        assert_eq!(pp.outputs(), &[3]);
        assert!(pp.validate().is_ok());
        assert_eq!(pp.size(), 2 * p.size());
        assert!(pp.depth() <= 2 * p.depth());
    }

    #[test]
    fn angle_classes() {
        let k = dim(3);
        assert_eq!(classify_angles(k, &[0.0; 3]), AngleClass::Zero);
        assert_eq!(
            classify_angles(k, &k.clifford_angles()),
            AngleClass::Clifford
        );
        let wrapped: Vec<f64> = k
            .clifford_angles()
            .iter()
            .map(|x| x + 2.0 * std::f64::consts::PI)
            .collect();
        assert_eq!(classify_angles(k, &wrapped), AngleClass::Clifford);
        assert_eq!(classify_angles(k, &[0.0, 1e-6, 0.0]), AngleClass::Generic);
    }
}
