use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use nalgebra::DMatrix;

use crate::algebra::{Dim, C64, MAX_DENSE_DIM};
use crate::error::{Error, Result};
use crate::sim::state::{check_distinct, StateVector, MAX_AMPLITUDES};
use crate::sim::GateKind;
use crate::QuditId;

type Map = HashMap<Vec<u32>, C64, BuildHasherDefault<DefaultHasher>>;

/// Amplitudes below this magnitude are dropped after each dense gate.
const PRUNE: f64 = 1e-14;

/// Hard cap on the number of stored basis states.
pub const MAX_SUPPORT: usize = 1 << 22;

/// Cap on stored digits (support times width), about 1 GiB of keys.
const MAX_DIGITS: usize = 1 << 28;

/// A pure state stored as a map from basis digit strings to amplitudes.
///
/// Used for wide circuits whose states stay close to the computational
/// basis (fan-out constructions with many clean ancillas), where a dense
/// vector would not fit. Iteration order is deterministic.
#[derive(Clone, Debug)]
pub struct SparseState {
    dim: Dim,
    sites: Vec<QuditId>,
    index: HashMap<QuditId, usize>,
    amps: Map,
}

impl SparseState {
    pub fn from_dense(state: &StateVector) -> Self {
        let dim = state.dim();
        let sites = state.sites().to_vec();
        let mut amps = Map::default();
        let mut digits = vec![0u32; sites.len()];
        for (idx, a) in state.amplitudes().iter().enumerate() {
            if a.norm() > PRUNE {
                crate::algebra::decode(idx, dim.du(), &mut digits);
                amps.insert(digits.clone(), *a);
            }
        }
        let index = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        SparseState {
            dim,
            sites,
            index,
            amps,
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn sites(&self) -> &[QuditId] {
        &self.sites
    }

    pub fn support(&self) -> usize {
        self.amps.len()
    }

    /// Appends sites initialised to `|0>`.
    pub fn push_zeros(&mut self, sites: &[QuditId]) -> Result<()> {
        for &s in sites {
            if self.index.contains_key(&s) {
                return Err(Error::DuplicateQudit(s));
            }
            self.index.insert(s, self.sites.len());
            self.sites.push(s);
        }
        let extra = sites.len();
        let old = std::mem::take(&mut self.amps);
        for (mut k, v) in old {
            k.extend(std::iter::repeat_n(0, extra));
            self.amps.insert(k, v);
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &GateKind, targets: &[QuditId]) -> Result<()> {
        gate.check(self.dim, targets.len())?;
        check_distinct(targets)?;
        let pos: Vec<usize> = targets
            .iter()
            .map(|t| self.index.get(t).copied().ok_or(Error::UnknownQudit(*t)))
            .collect::<Result<_>>()?;
        let old = std::mem::take(&mut self.amps);
        if let Some(u) = gate.local_matrix(self.dim) {
            let d = self.dim.du();
            let p = pos[0];
            let mut next = Map::default();
            let limit = MAX_SUPPORT.min(MAX_DIGITS / self.sites.len().max(1));
            for (key, amp) in old {
                if next.len() > limit {
                    return Err(Error::TooLarge(format!(
                        "sparse support above {limit} states of {} qudits",
                        self.sites.len()
                    )));
                }
                let input = key[p] as usize;
                let mut k = key;
                for out in 0..d {
                    let c = u[out * d + input];
                    if c.norm() < PRUNE {
                        continue;
                    }
                    k[p] = out as u32;
                    *next.entry(k.clone()).or_insert(C64::new(0.0, 0.0)) += c * amp;
                }
            }
            next.retain(|_, v| v.norm() > PRUNE);
            if next.len() > limit {
                return Err(Error::TooLarge(format!("sparse support {}", next.len())));
            }
            self.amps = next;
        } else {
            let mut local = vec![0u32; pos.len()];
            let mut next = Map::with_capacity_and_hasher(old.len(), Default::default());
            for (mut key, amp) in old {
                for (slot, &p) in local.iter_mut().zip(&pos) {
                    *slot = key[p];
                }
                let phase = gate.apply_monomial(self.dim, &mut local);
                for (&v, &p) in local.iter().zip(&pos) {
                    key[p] = v;
                }
                next.insert(key, phase * amp);
            }
            self.amps = next;
        }
        Ok(())
    }

    /// Dense copy with sites in `order` (must be a permutation of the sites).
    pub fn to_dense(&self, order: &[QuditId]) -> Result<StateVector> {
        if order.len() != self.sites.len() {
            return Err(Error::LengthMismatch {
                expected: self.sites.len(),
                got: order.len(),
            });
        }
        let size = self.dim.checked_pow(order.len(), MAX_AMPLITUDES)?;
        let pos: Vec<usize> = order
            .iter()
            .map(|t| self.index.get(t).copied().ok_or(Error::UnknownQudit(*t)))
            .collect::<Result<_>>()?;
        let mut amps = vec![C64::new(0.0, 0.0); size];
        let d = self.dim.du();
        for (key, a) in &self.amps {
            let idx = pos.iter().fold(0usize, |acc, &p| acc * d + key[p] as usize);
            amps[idx] = *a;
        }
        StateVector::from_amplitudes(self.dim, order, amps)
    }

    /// Reduced density matrix on `keep`, tracing out every other site.
    pub fn reduced_density(&self, keep: &[QuditId]) -> Result<DMatrix<C64>> {
        let size = self.dim.checked_pow(keep.len(), MAX_DENSE_DIM)?;
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|t| self.index.get(t).copied().ok_or(Error::UnknownQudit(*t)))
            .collect::<Result<_>>()?;
        let rest_pos: Vec<usize> = (0..self.sites.len())
            .filter(|p| !keep_pos.contains(p))
            .collect();
        let d = self.dim.du();
        // Group amplitudes by the traced-out digits.
        let mut groups: HashMap<Vec<u32>, Vec<(usize, C64)>, BuildHasherDefault<DefaultHasher>> =
            HashMap::default();
        let mut keys: Vec<&Vec<u32>> = self.amps.keys().collect();
        keys.sort();
        for key in keys {
            let a = self.amps[key];
            let rest: Vec<u32> = rest_pos.iter().map(|&p| key[p]).collect();
            let idx = keep_pos
                .iter()
                .fold(0usize, |acc, &p| acc * d + key[p] as usize);
            groups.entry(rest).or_default().push((idx, a));
        }
        let mut rho = DMatrix::<C64>::zeros(size, size);
        for entries in groups.values() {
            for &(i, a) in entries {
                for &(j, b) in entries {
                    rho[(i, j)] += a * b.conj();
                }
            }
        }
        Ok(rho)
    }

    /// If every site outside `keep` is exactly `|0>`, returns the state on
    /// `keep` with its phase intact; otherwise `Error::NotClean`.
    pub fn restrict_clean(&self, keep: &[QuditId], tol: f64) -> Result<StateVector> {
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|t| self.index.get(t).copied().ok_or(Error::UnknownQudit(*t)))
            .collect::<Result<_>>()?;
        let size = self.dim.checked_pow(keep.len(), MAX_AMPLITUDES)?;
        let d = self.dim.du();
        let mut amps = vec![C64::new(0.0, 0.0); size];
        let mut stray = 0.0;
        for (key, a) in &self.amps {
            let clean = key
                .iter()
                .enumerate()
                .all(|(p, &x)| x == 0 || keep_pos.contains(&p));
            if clean {
                let idx = keep_pos
                    .iter()
                    .fold(0usize, |acc, &p| acc * d + key[p] as usize);
                amps[idx] = *a;
            } else {
                stray += a.norm_sqr();
            }
        }
        if stray > tol {
            return Err(Error::NotClean);
        }
        StateVector::from_amplitudes(self.dim, keep, amps)
    }
}
