//! Semantic equivalence of circuits and patterns by brute-force simulation.
//!
//! Each artifact maps an input state to an ensemble of output density
//! matrices on `O`: one per measurement branch for a pattern, a single one
//! for a circuit. Two artifacts agree on an input when every pair of
//! branches has fidelity one.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{decode, C64};
use crate::error::{Error, Result};
use crate::io::Artifact;
use crate::pattern::RunMode;
use crate::StateVector;

/// How pattern branches are enumerated during verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchMode {
    /// Every branch with nonzero probability.
    All,
    /// This many sampled runs per input, seeds derived from the base seed.
    Sampled(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub random_states: usize,
    pub seed: u64,
    pub branches: BranchMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            random_states: 5,
            seed: 0,
            branches: BranchMode::All,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub inputs_checked: usize,
    pub branch_pairs: usize,
    pub max_infidelity: f64,
}

/// `1 - F(rho, sigma)` with the Uhlmann fidelity
/// `F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`; uses `tr(rho sigma)` when
/// either side is pure.
pub fn infidelity(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    let purity = |m: &DMatrix<C64>| (m * m).trace().re;
    let f = if purity(rho) > 1.0 - 1e-12 || purity(sigma) > 1.0 - 1e-12 {
        (rho * sigma).trace().re
    } else {
        let s = psd_sqrt(rho);
        let inner = &s * sigma * &s;
        let t: f64 = inner
            .symmetric_eigenvalues()
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .sum();
        t * t
    };
    (1.0 - f).max(0.0)
}

fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let e = m.clone().symmetric_eigen();
    let roots = DMatrix::from_diagonal(&e.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * roots * e.eigenvectors.adjoint()
}

fn pure_density(s: &StateVector) -> DMatrix<C64> {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    &v * v.adjoint()
}

/// Output ensemble `(probability, density on O)` of `a` on the input
/// amplitudes `amps` (indexed over `a.inputs()` in order).
pub fn output_ensemble(
    a: &Artifact,
    amps: &[C64],
    branches: BranchMode,
    seed: u64,
) -> Result<Vec<(f64, DMatrix<C64>)>> {
    let input = StateVector::from_amplitudes(a.dim(), a.inputs(), amps.to_vec())?;
    match a {
        Artifact::Circuit(c) => Ok(vec![(1.0, c.output_density(&input)?)]),
        Artifact::Pattern(p) => {
            let runs = match branches {
                BranchMode::All => p.run(&input, &RunMode::AllBranches)?,
                BranchMode::Sampled(k) => {
                    let mut out = Vec::new();
                    for i in 0..k as u64 {
                        out.extend(p.run(&input, &RunMode::Sampled(seed.wrapping_add(i)))?);
                    }
                    out
                }
            };
            Ok(runs
                .into_iter()
                .map(|b| {
                    let n = b.state.norm();
                    let scaled: Vec<C64> = b.state.amplitudes().iter().map(|z| z / n).collect();
                    let s = StateVector::from_amplitudes(b.state.dim(), b.state.sites(), scaled)
                        .expect("same shape");
                    (b.probability, pure_density(&s))
                })
                .collect())
        }
    }
}

/// Input states used for verification: every basis state of `k` qudits
/// followed by `random` Haar-ish random states from `seed`.
pub fn test_inputs(a: &Artifact, random: usize, seed: u64) -> Result<Vec<Vec<C64>>> {
    let dim = a.dim();
    let k = a.inputs().len();
    let size = dim.checked_pow(k, crate::algebra::MAX_DENSE_DIM)?;
    let mut out = Vec::new();
    let mut digits = vec![0u32; k];
    for idx in 0..size {
        decode(idx, dim.du(), &mut digits);
        out.push(
            StateVector::basis(dim, a.inputs(), &digits)?
                .amplitudes()
                .to_vec(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push(
            StateVector::random(dim, a.inputs(), &mut rng)?
                .amplitudes()
                .to_vec(),
        );
    }
    Ok(out)
}

/// Largest infidelity between any branch of `a` and any branch of `b`
/// over the test inputs. Symmetric in `a` and `b`.
pub fn verify(a: &Artifact, b: &Artifact, opts: &VerifyOptions) -> Result<VerifyReport> {
    a.dim().ensure_same(b.dim())?;
    if a.inputs().len() != b.inputs().len() || a.outputs().len() != b.outputs().len() {
        return Err(Error::Composition(format!(
            "shapes differ: {} -> {} vs {} -> {} qudits",
            a.inputs().len(),
            a.outputs().len(),
            b.inputs().len(),
            b.outputs().len()
        )));
    }
    let inputs = test_inputs(a, opts.random_states, opts.seed)?;
    let mut report = VerifyReport {
        inputs_checked: inputs.len(),
        branch_pairs: 0,
        max_infidelity: 0.0,
    };
    for amps in &inputs {
        let ea = output_ensemble(a, amps, opts.branches, opts.seed)?;
        let eb = output_ensemble(b, amps, opts.branches, opts.seed)?;
        for (_, ra) in &ea {
            for (_, rb) in &eb {
                report.branch_pairs += 1;
                report.max_infidelity = report.max_infidelity.max(infidelity(ra, rb));
            }
        }
    }
    Ok(report)
}
