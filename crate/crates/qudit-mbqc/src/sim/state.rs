use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Dim, C64, MAX_DENSE_DIM};
use crate::error::{Error, Result};
use crate::sim::GateKind;
use crate::QuditId;

/// Largest dense register this simulator will allocate.
pub const MAX_AMPLITUDES: usize = 1 << 24;

/// Branches below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// A dense pure state. Amplitude index is the mixed-radix number formed by
/// the digits of `sites` in order, first site most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dim: Dim,
    sites: Vec<QuditId>,
    amps: Vec<C64>,
}

/// One outcome of a measurement together with its probability and the
/// post-measurement state (measured site removed).
#[derive(Clone, Debug)]
pub struct MeasurementBranch {
    pub outcome: u32,
    pub probability: f64,
    pub state: StateVector,
}

impl StateVector {
    /// The zero-qudit state (the scalar 1).
    pub fn empty(dim: Dim) -> Self {
        StateVector {
            dim,
            sites: Vec::new(),
            amps: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn basis(dim: Dim, sites: &[QuditId], digits: &[u32]) -> Result<Self> {
        if sites.len() != digits.len() {
            return Err(Error::LengthMismatch {
                expected: sites.len(),
                got: digits.len(),
            });
        }
        check_distinct(sites)?;
        let size = dim.checked_pow(sites.len(), MAX_AMPLITUDES)?;
        let mut amps = vec![C64::new(0.0, 0.0); size];
        let mut index = 0usize;
        for &x in digits {
            if x >= dim.d() {
                return Err(Error::InvalidGate {
                    gate: "basis".into(),
                    reason: format!("digit {x} out of range"),
                });
            }
            index = index * dim.du() + x as usize;
        }
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector {
            dim,
            sites: sites.to_vec(),
            amps,
        })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(dim: Dim, sites: &[QuditId], amps: Vec<C64>) -> Result<Self> {
        check_distinct(sites)?;
        let size = dim.checked_pow(sites.len(), MAX_AMPLITUDES)?;
        if amps.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                got: amps.len(),
            });
        }
        let mut s = StateVector {
            dim,
            sites: sites.to_vec(),
            amps,
        };
        let n = s.norm();
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::InvalidGate {
                gate: "state".into(),
                reason: "amplitudes have zero or non-finite norm".into(),
            });
        }
        s.scale(1.0 / n);
        Ok(s)
    }

    /// `|+_0>` on every listed site.
    pub fn plus(dim: Dim, sites: &[QuditId]) -> Result<Self> {
        let size = dim.checked_pow(sites.len(), MAX_AMPLITUDES)?;
        let a = C64::new(1.0 / (size as f64).sqrt(), 0.0);
        check_distinct(sites)?;
        Ok(StateVector {
            dim,
            sites: sites.to_vec(),
            amps: vec![a; size],
        })
    }

    /// Haar-random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(dim: Dim, sites: &[QuditId], rng: &mut R) -> Result<Self> {
        let size = dim.checked_pow(sites.len(), MAX_AMPLITUDES)?;
        let amps = (0..size)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(dim, sites, amps)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn sites(&self) -> &[QuditId] {
        &self.sites
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn scale(&mut self, f: f64) {
        for a in &mut self.amps {
            *a *= f;
        }
    }

    pub fn position(&self, site: QuditId) -> Result<usize> {
        self.sites
            .iter()
            .position(|&s| s == site)
            .ok_or(Error::UnknownQudit(site))
    }

    fn stride(&self, pos: usize) -> usize {
        self.dim.du().pow((self.sites.len() - 1 - pos) as u32)
    }

    /// Appends a fresh site in the given single-qudit state.
    pub fn push_site(&mut self, site: QuditId, local: &[C64]) -> Result<()> {
        if self.sites.contains(&site) {
            return Err(Error::DuplicateQudit(site));
        }
        let d = self.dim.du();
        if local.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: local.len(),
            });
        }
        self.dim.checked_pow(self.sites.len() + 1, MAX_AMPLITUDES)?;
        let mut amps = Vec::with_capacity(self.amps.len() * d);
        for a in &self.amps {
            for l in local {
                amps.push(a * l);
            }
        }
        self.amps = amps;
        self.sites.push(site);
        Ok(())
    }

    /// Appends `|+_0>` on `site`.
    pub fn push_plus(&mut self, site: QuditId) -> Result<()> {
        let d = self.dim.du();
        let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        self.push_site(site, &vec![a; d])
    }

    /// Appends `|0>` on `site`.
    pub fn push_zero(&mut self, site: QuditId) -> Result<()> {
        let mut local = vec![C64::new(0.0, 0.0); self.dim.du()];
        local[0] = C64::new(1.0, 0.0);
        self.push_site(site, &local)
    }

    /// Tensor product with a state on disjoint sites (other's sites appended).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        self.dim.ensure_same(other.dim)?;
        for s in &other.sites {
            if self.sites.contains(s) {
                return Err(Error::DuplicateQudit(*s));
            }
        }
        self.dim
            .checked_pow(self.sites.len() + other.sites.len(), MAX_AMPLITUDES)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&other.sites);
        Ok(StateVector {
            dim: self.dim,
            sites,
            amps,
        })
    }

    /// Applies `gate` to `targets` (in gate-site order).
    pub fn apply_gate(&mut self, gate: &GateKind, targets: &[QuditId]) -> Result<()> {
        gate.check(self.dim, targets.len())?;
        check_distinct(targets)?;
        let pos: Vec<usize> = targets
            .iter()
            .map(|&t| self.position(t))
            .collect::<Result<_>>()?;
        let strides: Vec<usize> = pos.iter().map(|&p| self.stride(p)).collect();
        let d = self.dim.du();
        if let Some(u) = gate.local_matrix(self.dim) {
            let stride = strides[0];
            let block = stride * d;
            let mut buf = vec![C64::new(0.0, 0.0); d];
            for base in (0..self.amps.len()).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (m, slot) in buf.iter_mut().enumerate() {
                        let mut acc = C64::new(0.0, 0.0);
                        for n in 0..d {
                            acc += u[m * d + n] * self.amps[start + n * stride];
                        }
                        *slot = acc;
                    }
                    for (m, v) in buf.iter().enumerate() {
                        self.amps[start + m * stride] = *v;
                    }
                }
            }
            return Ok(());
        }
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut digits = vec![0u32; pos.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            for (slot, &s) in digits.iter_mut().zip(&strides) {
                *slot = ((idx / s) % d) as u32;
            }
            let before = digits.clone();
            let phase = gate.apply_monomial(self.dim, &mut digits);
            let mut target = idx;
            for k in 0..digits.len() {
                target = target + digits[k] as usize * strides[k] - before[k] as usize * strides[k];
            }
            out[target] = phase * amp;
        }
        self.amps = out;
        Ok(())
    }

    /// Rotates `site` into the measurement frame `v(theta) X^s Z^t`.
    fn rotate_for_measurement(
        &mut self,
        site: QuditId,
        theta: &[f64],
        s: u32,
        t: u32,
    ) -> Result<()> {
        if !t.is_multiple_of(self.dim.d()) {
            self.apply_gate(&GateKind::Z(t % self.dim.d()), &[site])?;
        }
        if !s.is_multiple_of(self.dim.d()) {
            self.apply_gate(&GateKind::X(s % self.dim.d()), &[site])?;
        }
        self.apply_gate(&GateKind::V(theta.to_vec()), &[site])
    }

    /// Probability of each computational-basis outcome on `site`.
    pub fn outcome_probabilities(&self, site: QuditId) -> Result<Vec<f64>> {
        let pos = self.position(site)?;
        let stride = self.stride(pos);
        let d = self.dim.du();
        let mut probs = vec![0.0; d];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[(idx / stride) % d] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projects `site` onto `outcome`, removes it and renormalizes.
    /// Returns the branch probability alongside the reduced state.
    pub fn project_out(&self, site: QuditId, outcome: u32) -> Result<(f64, StateVector)> {
        let pos = self.position(site)?;
        let stride = self.stride(pos);
        let d = self.dim.du();
        let mut amps = Vec::with_capacity(self.amps.len() / d);
        let block = stride * d;
        for base in (0..self.amps.len()).step_by(block) {
            let start = base + outcome as usize * stride;
            amps.extend_from_slice(&self.amps[start..start + stride]);
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let mut sites = self.sites.clone();
        sites.remove(pos);
        let mut out = StateVector {
            dim: self.dim,
            sites,
            amps,
        };
        if p > 0.0 {
            out.scale(1.0 / p.sqrt());
        }
        Ok((p, out))
    }

    /// Destructive measurement of `site` in the basis `<j| v(theta) X^s Z^t`,
    /// with the outcome sampled from `rng`.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        site: QuditId,
        theta: &[f64],
        s: u32,
        t: u32,
        rng: &mut R,
    ) -> Result<(u32, StateVector)> {
        let mut rotated = self.clone();
        rotated.rotate_for_measurement(site, theta, s, t)?;
        let probs = rotated.outcome_probabilities(site)?;
        let r: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut choice = None;
        for (j, &p) in probs.iter().enumerate() {
            if p <= ZERO_PROBABILITY {
                continue;
            }
            acc += p;
            choice = Some(j as u32);
            if r < acc {
                break;
            }
        }
        let j = choice.ok_or(Error::ZeroProbability {
            qudit: site,
            outcome: 0,
        })?;
        let (_, post) = rotated.project_out(site, j)?;
        Ok((j, post))
    }

    /// Measurement with a prescribed outcome; errors on an impossible one.
    pub fn measure_forced(
        &self,
        site: QuditId,
        theta: &[f64],
        s: u32,
        t: u32,
        outcome: u32,
    ) -> Result<(f64, StateVector)> {
        let mut rotated = self.clone();
        rotated.rotate_for_measurement(site, theta, s, t)?;
        if outcome >= self.dim.d() {
            return Err(Error::ZeroProbability {
                qudit: site,
                outcome,
            });
        }
        let (p, post) = rotated.project_out(site, outcome)?;
        if p <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbability {
                qudit: site,
                outcome,
            });
        }
        Ok((p, post))
    }

    /// Every outcome with non-negligible probability.
    pub fn measure_branches(
        &self,
        site: QuditId,
        theta: &[f64],
        s: u32,
        t: u32,
    ) -> Result<Vec<MeasurementBranch>> {
        let mut rotated = self.clone();
        rotated.rotate_for_measurement(site, theta, s, t)?;
        let probs = rotated.outcome_probabilities(site)?;
        let mut out = Vec::new();
        for (j, &p) in probs.iter().enumerate() {
            if p > ZERO_PROBABILITY {
                let (_, state) = rotated.project_out(site, j as u32)?;
                out.push(MeasurementBranch {
                    outcome: j as u32,
                    probability: p,
                    state,
                });
            }
        }
        Ok(out)
    }

    /// The same state with sites permuted into `order`.
    pub fn reorder(&self, order: &[QuditId]) -> Result<StateVector> {
        if order.len() != self.sites.len() {
            return Err(Error::LengthMismatch {
                expected: self.sites.len(),
                got: order.len(),
            });
        }
        check_distinct(order)?;
        if order == self.sites.as_slice() {
            return Ok(self.clone());
        }
        let pos: Vec<usize> = order
            .iter()
            .map(|&s| self.position(s))
            .collect::<Result<_>>()?;
        let old_strides: Vec<usize> = pos.iter().map(|&p| self.stride(p)).collect();
        let d = self.dim.du();
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut rem = new_idx;
            let mut old = 0usize;
            for k in (0..order.len()).rev() {
                old += (rem % d) * old_strides[k];
                rem /= d;
            }
            *slot = self.amps[old];
        }
        Ok(StateVector {
            dim: self.dim,
            sites: order.to_vec(),
            amps,
        })
    }

    /// `<self|other>` after aligning site order.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.dim.ensure_same(other.dim)?;
        let other = other.reorder(&self.sites).map_err(|_| Error::InvalidGate {
            gate: "fidelity".into(),
            reason: "states live on different site sets".into(),
        })?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<a|b>|`, invariant under global phase.
    pub fn fidelity_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm().min(1.0))
    }

    /// Reduced density matrix on `keep` (in that order).
    pub fn reduced_density(&self, keep: &[QuditId]) -> Result<DMatrix<C64>> {
        let mut order = keep.to_vec();
        for &s in &self.sites {
            if !keep.contains(&s) {
                order.push(s);
            }
        }
        let r = self.reorder(&order)?;
        let rows = self.dim.checked_pow(keep.len(), MAX_DENSE_DIM)?;
        let cols = self.amps.len() / rows;
        let psi = DMatrix::from_row_slice(rows, cols, &r.amps);
        Ok(&psi * psi.adjoint())
    }
}

pub fn fidelity_up_to_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity_up_to_phase(b)
}

pub(crate) fn check_distinct(sites: &[QuditId]) -> Result<()> {
    for (i, s) in sites.iter().enumerate() {
        if sites[..i].contains(s) {
            return Err(Error::DuplicateQudit(*s));
        }
    }
    Ok(())
}
