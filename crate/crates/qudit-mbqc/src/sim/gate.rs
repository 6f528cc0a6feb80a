use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::algebra::{decode, encode, Dim, C64, MAX_DENSE_DIM};
use crate::error::{Error, Result};

/// Every gate the simulator understands.
///
/// Integer exponents live in `Z(d)`. `R`, `V` and `Diag` carry angles in
/// radians: `R(theta)|n> = e^{i theta_n}|n>`, `V(theta) = F R(theta)`, and
/// `Diag(phi)` multiplies basis state `m` (mixed radix over its sites) by
/// `e^{i phi_m}`.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    F,
    Finv,
    X(u32),
    Z(u32),
    P,
    R(Vec<f64>),
    V(Vec<f64>),
    CZ(u32),
    CX(u32),
    Swap,
    Fanout(Vec<u32>),
    Mod(Vec<u32>),
    Diag(Vec<f64>),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::F => "F",
            GateKind::Finv => "Finv",
            GateKind::X(_) => "X",
            GateKind::Z(_) => "Z",
            GateKind::P => "P",
            GateKind::R(_) => "R",
            GateKind::V(_) => "V",
            GateKind::CZ(_) => "CZ",
            GateKind::CX(_) => "CX",
            GateKind::Swap => "SWAP",
            GateKind::Fanout(_) => "FANOUT",
            GateKind::Mod(_) => "MOD",
            GateKind::Diag(_) => "DIAG",
        }
    }

    /// Number of sites the gate acts on.
    pub fn arity(&self, dim: Dim) -> Result<usize> {
        Ok(match self {
            GateKind::F
            | GateKind::Finv
            | GateKind::X(_)
            | GateKind::Z(_)
            | GateKind::P
            | GateKind::R(_)
            | GateKind::V(_) => 1,
            GateKind::CZ(_) | GateKind::CX(_) | GateKind::Swap => 2,
            GateKind::Fanout(v) | GateKind::Mod(v) => 1 + v.len(),
            GateKind::Diag(phases) => {
                let mut k = 0;
                let mut size = 1usize;
                while size < phases.len() {
                    size *= dim.du();
                    k += 1;
                }
                if size != phases.len() || k == 0 {
                    return Err(self.invalid("phase count must be a positive power of d"));
                }
                k
            }
        })
    }

    fn invalid(&self, reason: &str) -> Error {
        Error::InvalidGate {
            gate: self.name().into(),
            reason: reason.into(),
        }
    }

    /// Checks parameters against `dim` and the number of target sites.
    pub fn check(&self, dim: Dim, sites: usize) -> Result<()> {
        match self {
            GateKind::R(t) | GateKind::V(t) => {
                if t.len() != dim.du() {
                    return Err(self.invalid("angle vector must have length d"));
                }
                if t.iter().any(|x| !x.is_finite()) {
                    return Err(self.invalid("angles must be finite"));
                }
            }
            GateKind::Diag(p) => {
                if p.iter().any(|x| !x.is_finite()) {
                    return Err(self.invalid("phases must be finite"));
                }
            }
            GateKind::Fanout(v) | GateKind::Mod(v) if v.is_empty() => {
                return Err(self.invalid("needs at least one target"));
            }
            _ => {}
        }
        let arity = self.arity(dim)?;
        if arity != sites {
            return Err(Error::ArityMismatch {
                gate: self.name().into(),
                expected: arity,
                got: sites,
            });
        }
        Ok(())
    }

    /// Same gate with every integer exponent reduced into `Z(d)`.
    pub fn normalized(&self, dim: Dim) -> GateKind {
        let r = |k: &u32| k % dim.d();
        match self {
            GateKind::X(k) => GateKind::X(r(k)),
            GateKind::Z(k) => GateKind::Z(r(k)),
            GateKind::CZ(k) => GateKind::CZ(r(k)),
            GateKind::CX(k) => GateKind::CX(r(k)),
            GateKind::Fanout(v) => GateKind::Fanout(v.iter().map(r).collect()),
            GateKind::Mod(v) => GateKind::Mod(v.iter().map(r).collect()),
            g => g.clone(),
        }
    }

    /// True for `F`, `Finv` and `V`, the only gates that are not a phase
    /// times a permutation of basis states.
    pub fn is_dense(&self) -> bool {
        matches!(self, GateKind::F | GateKind::Finv | GateKind::V(_))
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            GateKind::Z(_) | GateKind::P | GateKind::R(_) | GateKind::CZ(_) | GateKind::Diag(_)
        )
    }

    /// The `d x d` matrix (row-major) of a dense single-qudit gate.
    pub fn local_matrix(&self, dim: Dim) -> Option<Vec<C64>> {
        let d = dim.du();
        let norm = 1.0 / (d as f64).sqrt();
        let entry = |m: usize, n: usize, sign: i64| dim.omega_pow(sign * (m * n) as i64) * norm;
        match self {
            GateKind::F => Some((0..d * d).map(|i| entry(i / d, i % d, 1)).collect()),
            GateKind::Finv => Some((0..d * d).map(|i| entry(i / d, i % d, -1)).collect()),
            GateKind::V(theta) => Some(
                (0..d * d)
                    .map(|i| entry(i / d, i % d, 1) * C64::from_polar(1.0, theta[i % d]))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Applies a monomial gate to the digits of its sites in place and
    /// returns the phase picked up. Panics on dense gates.
    pub fn apply_monomial(&self, dim: Dim, digits: &mut [u32]) -> C64 {
        let d = dim.d();
        let dd = d as u64;
        let mul = |a: u32, b: u32| ((a as u64 * b as u64) % dd) as u32;
        match self {
            GateKind::X(k) => {
                digits[0] = (digits[0] + k) % d;
                C64::new(1.0, 0.0)
            }
            GateKind::Z(k) => dim.omega_pow(mul(*k, digits[0]) as i64),
            GateKind::P => {
                let n = digits[0] as f64;
                C64::from_polar(1.0, PI * n * (n + dim.delta() as f64) / d as f64)
            }
            GateKind::R(theta) => C64::from_polar(1.0, theta[digits[0] as usize]),
            GateKind::CZ(k) => dim.omega_pow(mul(*k, mul(digits[0], digits[1])) as i64),
            GateKind::CX(k) => {
                digits[1] = (digits[1] + mul(*k, digits[0])) % d;
                C64::new(1.0, 0.0)
            }
            GateKind::Swap => {
                digits.swap(0, 1);
                C64::new(1.0, 0.0)
            }
            GateKind::Fanout(v) => {
                let x = digits[0];
                for (j, &c) in v.iter().enumerate() {
                    digits[j + 1] = (digits[j + 1] + mul(c, x)) % d;
                }
                C64::new(1.0, 0.0)
            }
            GateKind::Mod(v) => {
                let mut acc = digits[0] as u64;
                for (j, &c) in v.iter().enumerate() {
                    acc += mul(c, digits[j + 1]) as u64;
                }
                digits[0] = (acc % dd) as u32;
                C64::new(1.0, 0.0)
            }
            GateKind::Diag(phases) => C64::from_polar(1.0, phases[encode(digits, dim.du())]),
            GateKind::F | GateKind::Finv | GateKind::V(_) => {
                panic!("apply_monomial called on dense gate {}", self.name())
            }
        }
    }

    /// Dense matrix of the gate on its own sites.
    pub fn matrix(&self, dim: Dim) -> Result<DMatrix<C64>> {
        let k = self.arity(dim)?;
        let sites: Vec<usize> = (0..k).collect();
        self.embedded_matrix(dim, k, &sites)
    }

    /// Dense matrix of the gate acting on `sites` of an `n`-site register.
    pub fn embedded_matrix(&self, dim: Dim, n: usize, sites: &[usize]) -> Result<DMatrix<C64>> {
        self.check(dim, sites.len())?;
        for (i, &s) in sites.iter().enumerate() {
            if s >= n {
                return Err(Error::SiteOutOfRange(s));
            }
            if sites[..i].contains(&s) {
                return Err(Error::InvalidGate {
                    gate: self.name().into(),
                    reason: "repeated site".into(),
                });
            }
        }
        let size = dim.checked_pow(n, MAX_DENSE_DIM)?;
        let d = dim.du();
        let mut m = DMatrix::<C64>::zeros(size, size);
        let mut digits = vec![0u32; n];
        let mut local = vec![0u32; sites.len()];
        let dense = self.local_matrix(dim);
        for col in 0..size {
            decode(col, d, &mut digits);
            for (slot, &s) in local.iter_mut().zip(sites) {
                *slot = digits[s];
            }
            match &dense {
                Some(u) => {
                    let input = local[0] as usize;
                    for out in 0..d {
                        digits[sites[0]] = out as u32;
                        m[(encode(&digits, d), col)] += u[out * d + input];
                    }
                }
                None => {
                    let phase = self.apply_monomial(dim, &mut local);
                    for (&v, &s) in local.iter().zip(sites) {
                        digits[s] = v;
                    }
                    m[(encode(&digits, d), col)] += phase;
                }
            }
        }
        Ok(m)
    }

    /// A temporal gate sequence implementing the inverse.
    pub fn inverse(&self, dim: Dim) -> Vec<GateKind> {
        let neg = |k: &u32| dim.neg(*k % dim.d());
        match self {
            GateKind::F => vec![GateKind::Finv],
            GateKind::Finv => vec![GateKind::F],
            GateKind::X(k) => vec![GateKind::X(neg(k))],
            GateKind::Z(k) => vec![GateKind::Z(neg(k))],
            GateKind::P => {
                let p = dim.clifford_angles();
                vec![GateKind::R(p.iter().map(|x| -x).collect())]
            }
            GateKind::R(t) => vec![GateKind::R(t.iter().map(|x| -x).collect())],
            GateKind::V(t) => vec![GateKind::Finv, GateKind::R(t.iter().map(|x| -x).collect())],
            GateKind::CZ(k) => vec![GateKind::CZ(neg(k))],
            GateKind::CX(k) => vec![GateKind::CX(neg(k))],
            GateKind::Swap => vec![GateKind::Swap],
            GateKind::Fanout(v) => vec![GateKind::Fanout(v.iter().map(neg).collect())],
            GateKind::Mod(v) => vec![GateKind::Mod(v.iter().map(neg).collect())],
            GateKind::Diag(p) => vec![GateKind::Diag(p.iter().map(|x| -x).collect())],
        }
    }
}
