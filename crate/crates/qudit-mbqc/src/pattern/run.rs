use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pattern::{Command, Pattern};
use crate::sim::{GateKind, StateVector};
use crate::QuditId;

/// How measurement outcomes are produced.
#[derive(Clone, Debug, PartialEq)]
pub enum RunMode {
    /// Outcomes sampled; the draw for qudit `q` comes from a ChaCha8 stream
    /// seeded with `seed` on stream number `q`, so runs are reproducible
    /// independently of execution order.
    Sampled(u64),
    /// Outcomes prescribed per measured qudit.
    Forced(BTreeMap<QuditId, u32>),
    /// Every branch with probability above the zero threshold.
    AllBranches,
}

/// One execution branch: outcomes, probability and the state on the
/// outputs (in `O` order).
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: BTreeMap<QuditId, u32>,
    pub probability: f64,
    pub state: StateVector,
}

/// Draw in `[0, 1)` for the measurement of `qudit` under `seed`.
pub(crate) fn measurement_draw(seed: u64, qudit: QuditId) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(qudit as u64);
    rng.gen::<f64>()
}

struct Frame {
    next: usize,
    state: StateVector,
    outcomes: BTreeMap<QuditId, u32>,
    probability: f64,
}

impl Pattern {
    /// Execution order used by [`Pattern::run`]: a topological order of the
    /// dependency DAG (shared qudits plus signal references) that keeps
    /// the number of simultaneously live qudits small. Commands on
    /// disjoint qudits commute, so any such order has the same semantics.
    pub fn schedule(&self) -> Vec<usize> {
        let n = self.commands.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut last: HashMap<QuditId, usize> = HashMap::new();
        let mut measured_at: HashMap<QuditId, usize> = HashMap::new();
        for (k, c) in self.commands.iter().enumerate() {
            for q in c.qudits() {
                if let Some(&p) = last.get(&q) {
                    preds[k].push(p);
                }
                last.insert(q, k);
            }
            for q in c.dependencies() {
                if let Some(&p) = measured_at.get(&q) {
                    preds[k].push(p);
                }
            }
            if let Command::M { qudit, .. } = c {
                measured_at.insert(*qudit, k);
            }
        }
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut missing = vec![0usize; n];
        for (k, ps) in preds.iter().enumerate() {
            missing[k] = ps.len();
            for &p in ps {
                succ[p].push(k);
            }
        }
        let mut live: HashSet<QuditId> = self.inputs.iter().copied().collect();
        let mut ready: Vec<usize> = (0..n).filter(|&k| missing[k] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while !ready.is_empty() {
            let pick = ready
                .iter()
                .enumerate()
                .min_by_key(|(_, &k)| {
                    let c = &self.commands[k];
                    let class = if c.is_entangling() { 1 } else { 0 };
                    let fresh = c.qudits().iter().filter(|q| !live.contains(q)).count();
                    (class, fresh, k)
                })
                .map(|(i, _)| i)
                .unwrap();
            let k = ready.swap_remove(pick);
            for q in self.commands[k].qudits() {
                live.insert(q);
            }
            if let Command::M { qudit, .. } = &self.commands[k] {
                live.remove(qudit);
            }
            order.push(k);
            for &s in &succ[k] {
                missing[s] -= 1;
                if missing[s] == 0 {
                    ready.push(s);
                }
            }
        }
        order
    }

    /// Largest number of simultaneously allocated qudits under
    /// [`Pattern::schedule`].
    pub fn schedule_width(&self) -> usize {
        let mut live: HashSet<QuditId> = self.inputs.iter().copied().collect();
        let mut width = live.len();
        for k in self.schedule() {
            for q in self.commands[k].qudits() {
                live.insert(q);
            }
            width = width.max(live.len());
            if let Command::M { qudit, .. } = &self.commands[k] {
                live.remove(qudit);
            }
        }
        width
    }

    /// Executes the pattern on `input` (a state on the input qudits).
    /// Non-inputs are prepared in `|+_0>` when first touched.
    pub fn run(&self, input: &StateVector, mode: &RunMode) -> Result<Vec<Branch>> {
        self.ensure_valid()?;
        self.dim.ensure_same(input.dim())?;
        let state = input.reorder(&self.inputs)?;
        let order = self.schedule();
        let mut stack = vec![Frame {
            next: 0,
            state,
            outcomes: BTreeMap::new(),
            probability: 1.0,
        }];
        let mut done = Vec::new();
        while let Some(mut frame) = stack.pop() {
            loop {
                if frame.next == order.len() {
                    done.push(self.finish(frame)?);
                    break;
                }
                let cmd = &self.commands[order[frame.next]];
                frame.next += 1;
                for q in cmd.qudits() {
                    if frame.state.position(q).is_err() {
                        frame.state.push_plus(q)?;
                    }
                }
                match cmd {
                    Command::E(i, j) => frame.state.apply_gate(&GateKind::CZ(1), &[*i, *j])?,
                    Command::X { qudit, signal } | Command::Z { qudit, signal } => {
                        let k = signal.eval(&frame.outcomes, self.dim)?;
                        if k != 0 {
                            let g = if matches!(cmd, Command::X { .. }) {
                                GateKind::X(k)
                            } else {
                                GateKind::Z(k)
                            };
                            frame.state.apply_gate(&g, &[*qudit])?;
                        }
                    }
                    Command::M {
                        qudit,
                        angles,
                        s,
                        t,
                    } => {
                        let sv = s.eval(&frame.outcomes, self.dim)?;
                        let tv = t.eval(&frame.outcomes, self.dim)?;
                        match mode {
                            RunMode::AllBranches => {
                                let branches =
                                    frame.state.measure_branches(*qudit, angles, sv, tv)?;
                                let mut it = branches.into_iter();
                                let first = it.next().ok_or(Error::ZeroProbability {
                                    qudit: *qudit,
                                    outcome: 0,
                                })?;
                                for b in it {
                                    let mut outcomes = frame.outcomes.clone();
                                    outcomes.insert(*qudit, b.outcome);
                                    stack.push(Frame {
                                        next: frame.next,
                                        state: b.state,
                                        outcomes,
                                        probability: frame.probability * b.probability,
                                    });
                                }
                                frame.outcomes.insert(*qudit, first.outcome);
                                frame.probability *= first.probability;
                                frame.state = first.state;
                            }
                            RunMode::Forced(map) => {
                                let j = *map.get(qudit).ok_or(Error::MissingOutcome(*qudit))?;
                                let (p, post) =
                                    frame.state.measure_forced(*qudit, angles, sv, tv, j)?;
                                frame.outcomes.insert(*qudit, j);
                                frame.probability *= p;
                                frame.state = post;
                            }
                            RunMode::Sampled(seed) => {
                                let branches =
                                    frame.state.measure_branches(*qudit, angles, sv, tv)?;
                                let total: f64 = branches.iter().map(|b| b.probability).sum();
                                let r = measurement_draw(*seed, *qudit) * total;
                                let mut acc = 0.0;
                                let mut chosen = branches.len() - 1;
                                for (i, b) in branches.iter().enumerate() {
                                    acc += b.probability;
                                    if r < acc {
                                        chosen = i;
                                        break;
                                    }
                                }
                                let b = branches.into_iter().nth(chosen).unwrap();
                                frame.outcomes.insert(*qudit, b.outcome);
                                frame.probability *= b.probability;
                                frame.state = b.state;
                            }
                        }
                    }
                }
            }
        }
        done.sort_by(|a, b| a.outcomes.cmp(&b.outcomes));
        Ok(done)
    }

    fn finish(&self, mut frame: Frame) -> Result<Branch> {
        for &q in &self.outputs {
            if frame.state.position(q).is_err() {
                frame.state.push_plus(q)?;
            }
        }
        Ok(Branch {
            state: frame.state.reorder(&self.outputs)?,
            outcomes: frame.outcomes,
            probability: frame.probability,
        })
    }
}
