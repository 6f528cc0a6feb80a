//! Exact generalized Pauli algebra over qudits of dimension `d`.
//!
//! Phases are tracked as integers modulo `D` (`D = d` for odd `d`, `2d` for
//! even `d`) so that Clifford conjugation never touches floating point.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest matrix dimension produced by the dense helpers.
pub const MAX_DENSE_DIM: usize = 1 << 14;

/// The dimension context: `d` and the constants derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dim(u32);

impl TryFrom<u32> for Dim {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dim::new(d)
    }
}

impl From<Dim> for u32 {
    fn from(d: Dim) -> u32 {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={}", self.0)
    }
}

impl Dim {
    pub fn new(d: u32) -> Result<Self> {
        if !(2..=1 << 15).contains(&d) {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Dim(d))
    }

    pub fn d(self) -> u32 {
        self.0
    }

    pub fn du(self) -> usize {
        self.0 as usize
    }

    /// `D`: `d` for odd `d`, `2d` for even `d`.
    pub fn big_d(self) -> u32 {
        self.0 * (2 - self.0 % 2)
    }

    /// `delta_d`: 1 for odd `d`, 0 for even `d`.
    pub fn delta(self) -> u32 {
        self.0 % 2
    }

    /// `D / d`, the exponent of `omega_hat` that equals `omega`.
    pub fn hat_ratio(self) -> u32 {
        self.big_d() / self.0
    }

    pub fn omega(self) -> C64 {
        self.omega_pow(1)
    }

    pub fn omega_hat(self) -> C64 {
        self.omega_hat_pow(1)
    }

    /// `omega^k` for any integer `k`.
    pub fn omega_pow(self, k: i64) -> C64 {
        let r = self.modd(k) as f64;
        C64::from_polar(1.0, 2.0 * PI * r / self.0 as f64)
    }

    /// `omega_hat^k` for any integer `k`.
    pub fn omega_hat_pow(self, k: i64) -> C64 {
        let big = self.big_d() as i64;
        let r = k.rem_euclid(big) as f64;
        C64::from_polar(1.0, 2.0 * PI * r / big as f64)
    }

    /// Reduce an integer into `Z(d)`.
    pub fn modd(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    /// Reduce an integer into `Z(D)`.
    pub fn mod_big(self, x: i64) -> u32 {
        x.rem_euclid(self.big_d() as i64) as u32
    }

    /// Additive inverse in `Z(d)`.
    pub fn neg(self, x: u32) -> u32 {
        self.modd(-(x as i64))
    }

    /// The all-zero angle vector; `v(0) = F`.
    pub fn zero_angles(self) -> Vec<f64> {
        vec![0.0; self.du()]
    }

    /// The Clifford angle vector `p_j = pi j (j + delta) / d`; `v(p) = F P`.
    pub fn clifford_angles(self) -> Vec<f64> {
        (0..self.0)
            .map(|j| PI * (j as f64) * ((j + self.delta()) as f64) / self.0 as f64)
            .collect()
    }

    /// Angles of `Z^k` written as `R(theta)`: `theta_n = 2 pi k n / d`.
    pub fn z_angles(self, k: u32) -> Vec<f64> {
        (0..self.0)
            .map(|n| 2.0 * PI * ((k as u64 * n as u64) % self.0 as u64) as f64 / self.0 as f64)
            .collect()
    }

    /// Number of amplitudes for `n` qudits, or an error past `limit`.
    pub fn checked_pow(self, n: usize, limit: usize) -> Result<usize> {
        let mut acc: usize = 1;
        for _ in 0..n {
            acc = acc
                .checked_mul(self.du())
                .filter(|&v| v <= limit)
                .ok_or_else(|| Error::TooLarge(format!("{}^{} exceeds {}", self.0, n, limit)))?;
        }
        Ok(acc)
    }

    pub(crate) fn ensure_same(self, other: Dim) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch(self.0, other.0));
        }
        Ok(())
    }
}

/// Phase function of `F` conjugation: `xi_F(n) = n (delta - 2)`.
pub fn xi_f(dim: Dim, n: i64) -> i64 {
    n * (dim.delta() as i64 - 2)
}

/// Phase function of `P` conjugation: `xi_P(n) = n (1 - (n - 1)(delta - 2) / 2)`.
pub fn xi_p(dim: Dim, n: i64) -> i64 {
    let num = -n * (n - 1) * (dim.delta() as i64 - 2);
    assert!(num % 2 == 0, "xi_P must be integral");
    n + num / 2
}

/// `p_{xi, a, b} = omega_hat^xi * prod_k X^{a_k} Z^{b_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    dim: Dim,
    xi: u32,
    a: Vec<u32>,
    b: Vec<u32>,
}

/// The Clifford generators whose conjugation action is known in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGenerator {
    F(usize),
    P(usize),
    CZ(usize, usize),
}

impl PauliOperator {
    /// Builds an operator, reducing every exponent into range.
    pub fn new(dim: Dim, xi: i64, a: &[i64], b: &[i64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        Ok(PauliOperator {
            dim,
            xi: dim.mod_big(xi),
            a: a.iter().map(|&x| dim.modd(x)).collect(),
            b: b.iter().map(|&x| dim.modd(x)).collect(),
        })
    }

    pub fn identity(dim: Dim, n: usize) -> Self {
        PauliOperator {
            dim,
            xi: 0,
            a: vec![0; n],
            b: vec![0; n],
        }
    }

    /// `X^a Z^b` on a single site of an `n`-qudit register.
    pub fn single(dim: Dim, n: usize, site: usize, a: u32, b: u32) -> Result<Self> {
        if site >= n {
            return Err(Error::SiteOutOfRange(site));
        }
        let mut p = Self::identity(dim, n);
        p.a[site] = a % dim.d();
        p.b[site] = b % dim.d();
        Ok(p)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn xi(&self) -> u32 {
        self.xi
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn is_identity(&self) -> bool {
        self.xi == 0 && self.a.iter().all(|&x| x == 0) && self.b.iter().all(|&x| x == 0)
    }

    pub(crate) fn add_phase(&mut self, k: i64) {
        self.xi = self.dim.mod_big(self.xi as i64 + k);
    }

    pub(crate) fn set_a(&mut self, site: usize, v: i64) {
        self.a[site] = self.dim.modd(v);
    }

    pub(crate) fn set_b(&mut self, site: usize, v: i64) {
        self.b[site] = self.dim.modd(v);
    }

    /// Normal-form product `self * other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.dim.ensure_same(other.dim)?;
        if self.n() != other.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let dim = self.dim;
        // Z^b X^a' = omega^{b a'} X^a' Z^b on every site.
        let swap: i64 = self
            .b
            .iter()
            .zip(&other.a)
            .map(|(&b, &a)| (b as i64 * a as i64) % dim.d() as i64)
            .sum();
        let xi = self.xi as i64 + other.xi as i64 + dim.hat_ratio() as i64 * swap;
        let a: Vec<i64> = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(&x, &y)| x as i64 + y as i64)
            .collect();
        let b: Vec<i64> = self
            .b
            .iter()
            .zip(&other.b)
            .map(|(&x, &y)| x as i64 + y as i64)
            .collect();
        PauliOperator::new(dim, xi, &a, &b)
    }

    /// Returns `U p U^dagger` for a Clifford generator `U`.
    pub fn conjugate(&self, gen: CliffordGenerator) -> Result<PauliOperator> {
        let dim = self.dim;
        let mut out = self.clone();
        match gen {
            CliffordGenerator::F(k) => {
                self.check_site(k)?;
                let (a, b) = (self.a[k] as i64, self.b[k] as i64);
                out.set_a(k, -b);
                out.set_b(k, a);
                out.add_phase(xi_f(dim, a * b));
            }
            CliffordGenerator::P(k) => {
                self.check_site(k)?;
                let (a, b) = (self.a[k] as i64, self.b[k] as i64);
                out.set_b(k, a + b);
                out.add_phase(xi_p(dim, a));
            }
            CliffordGenerator::CZ(i, j) => {
                self.check_site(i)?;
                self.check_site(j)?;
                if i == j {
                    return Err(Error::InvalidGate {
                        gate: "CZ".into(),
                        reason: "sites must differ".into(),
                    });
                }
                let (ai, aj) = (self.a[i] as i64, self.a[j] as i64);
                out.set_b(i, self.b[i] as i64 + aj);
                out.set_b(j, self.b[j] as i64 + ai);
                // CZ (X^ai x X^aj) CZ^dagger carries omega^{ai aj}.
                out.add_phase(dim.hat_ratio() as i64 * ai * aj);
            }
        }
        Ok(out)
    }

    fn check_site(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            return Err(Error::SiteOutOfRange(k));
        }
        Ok(())
    }

    /// Dense matrix; site 0 is the most significant digit.
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        let dim = self.dim;
        let size = dim.checked_pow(self.n(), MAX_DENSE_DIM)?;
        let d = dim.du();
        let n = self.n();
        let global = dim.omega_hat_pow(self.xi as i64);
        let mut m = DMatrix::<C64>::zeros(size, size);
        let mut digits = vec![0u32; n];
        for col in 0..size {
            decode(col, d, &mut digits);
            // X^a Z^b |m> = omega^{b m} |m + a>
            let mut phase: i64 = 0;
            let mut out = 0usize;
            for k in 0..n {
                phase += self.b[k] as i64 * digits[k] as i64;
                out = out * d + ((digits[k] + self.a[k]) % dim.d()) as usize;
            }
            m[(out, col)] = global * dim.omega_pow(phase);
        }
        Ok(m)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^{}", self.xi)?;
        for k in 0..self.n() {
            write!(f, " [X^{} Z^{}]", self.a[k], self.b[k])?;
        }
        Ok(())
    }
}

pub fn pauli_multiply(p: &PauliOperator, q: &PauliOperator) -> Result<PauliOperator> {
    p.multiply(q)
}

pub fn pauli_conjugate(gen: CliffordGenerator, p: &PauliOperator) -> Result<PauliOperator> {
    p.conjugate(gen)
}

pub fn pauli_to_matrix(p: &PauliOperator) -> Result<DMatrix<C64>> {
    p.to_matrix()
}

/// Mixed-radix decode, most significant digit first.
pub(crate) fn decode(mut index: usize, d: usize, digits: &mut [u32]) {
    for slot in digits.iter_mut().rev() {
        *slot = (index % d) as u32;
        index /= d;
    }
}

pub(crate) fn encode(digits: &[u32], d: usize) -> usize {
    digits.iter().fold(0usize, |acc, &x| acc * d + x as usize)
}

/// Dense matrix of a generator on `n` sites (used by tests and oracles).
pub fn generator_matrix(dim: Dim, n: usize, gen: CliffordGenerator) -> Result<DMatrix<C64>> {
    use crate::sim::GateKind;
    let (gate, sites) = match gen {
        CliffordGenerator::F(k) => (GateKind::F, vec![k]),
        CliffordGenerator::P(k) => (GateKind::P, vec![k]),
        CliffordGenerator::CZ(i, j) => (GateKind::CZ(1), vec![i, j]),
    };
    for &s in &sites {
        if s >= n {
            return Err(Error::SiteOutOfRange(s));
        }
    }
    gate.embedded_matrix(dim, n, &sites)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> Dim {
        Dim::new(d).unwrap()
    }

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn constants() {
        assert_eq!(dim(3).big_d(), 3);
        assert_eq!(dim(4).big_d(), 8);
        assert_eq!(dim(2).delta(), 0);
        assert_eq!(dim(5).delta(), 1);
        for d in 2..8 {
            let k = dim(d);
            let w = k.omega_hat().powu(k.big_d());
            assert!((w - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((k.omega_hat().powu(k.hat_ratio()) - k.omega()).norm() < 1e-12);
        }
        assert!(Dim::new(1).is_err());
    }

    #[test]
    fn weyl_relation_d3() {
        let k = dim(3);
        let z = PauliOperator::single(k, 1, 0, 0, 1).unwrap();
        let x = PauliOperator::single(k, 1, 0, 1, 0).unwrap();
        let zx = z.multiply(&x).unwrap();
        assert_eq!(zx.a(), &[1]);
        assert_eq!(zx.b(), &[1]);
        assert_eq!(zx.xi(), k.hat_ratio());
    }

    #[test]
    fn identity_is_neutral() {
        let k = dim(4);
        let p = PauliOperator::new(k, 3, &[1, 2], &[3, 0]).unwrap();
        let id = PauliOperator::identity(k, 2);
        assert_eq!(id.multiply(&p).unwrap(), p);
        assert_eq!(p.multiply(&id).unwrap(), p);
    }

    #[test]
    fn matrices_d2_d3_d4() {
        let x = PauliOperator::single(dim(2), 1, 0, 1, 0)
            .unwrap()
            .to_matrix()
            .unwrap();
        assert_eq!(x[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(x[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(x[(0, 0)], C64::new(0.0, 0.0));

        let k3 = dim(3);
        let z = PauliOperator::single(k3, 1, 0, 0, 1)
            .unwrap()
            .to_matrix()
            .unwrap();
        for n in 0..3 {
            assert!((z[(n, n)] - k3.omega_pow(n as i64)).norm() < 1e-12);
        }

        // d=4: p_{1,1,1} = omega_hat X Z with omega_hat = exp(2 pi i / 8).
        let k4 = dim(4);
        let p = PauliOperator::new(k4, 1, &[1], &[1])
            .unwrap()
            .to_matrix()
            .unwrap();
        let xm = PauliOperator::single(k4, 1, 0, 1, 0)
            .unwrap()
            .to_matrix()
            .unwrap();
        let zm = PauliOperator::single(k4, 1, 0, 0, 1)
            .unwrap()
            .to_matrix()
            .unwrap();
        let w8 = C64::from_polar(1.0, 2.0 * PI / 8.0);
        assert!(close(&p, &(xm * zm * w8), 1e-12));
    }

    #[test]
    fn qubit_examples() {
        let k = dim(2);
        let x = PauliOperator::single(k, 1, 0, 1, 0).unwrap();
        let fx = x.conjugate(CliffordGenerator::F(0)).unwrap();
        assert_eq!((fx.xi(), fx.a()[0], fx.b()[0]), (0, 0, 1));
        let px = x.conjugate(CliffordGenerator::P(0)).unwrap();
        assert_eq!((px.xi(), px.a()[0], px.b()[0]), (1, 1, 1));
        // p_{1,1,1} with omega_hat = i is the qubit Y = i X Z
        let y = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0., 0.),
                C64::new(0., -1.),
                C64::new(0., 1.),
                C64::new(0., 0.),
            ],
        );
        assert!(close(&px.to_matrix().unwrap(), &y, 1e-12));
    }

    #[test]
    fn cz_on_x_d3() {
        let k = dim(3);
        let x1 = PauliOperator::single(k, 2, 0, 1, 0).unwrap();
        let out = x1.conjugate(CliffordGenerator::CZ(0, 1)).unwrap();
        assert_eq!(out.a(), &[1, 0]);
        assert_eq!(out.b(), &[0, 1]);
        assert_eq!(out.xi(), 0);
    }

    #[test]
    fn cz_phase_on_xx() {
        // Both X powers nonzero: the phase omega^{a_i a_j} appears.
        for d in 2..6 {
            let k = dim(d);
            let p = PauliOperator::new(k, 0, &[1, 1], &[0, 0]).unwrap();
            let g = CliffordGenerator::CZ(0, 1);
            let sym = p.conjugate(g).unwrap().to_matrix().unwrap();
            let u = generator_matrix(k, 2, g).unwrap();
            let num = &u * p.to_matrix().unwrap() * u.adjoint();
            assert!(close(&sym, &num, 1e-12), "d={d}");
        }
    }

    #[test]
    fn conjugation_matches_matrices() {
        for d in 2..=5 {
            let k = dim(d);
            for a in 0..d {
                for b in 0..d {
                    for xi in [0, 1] {
                        let p = PauliOperator::new(k, xi, &[a as i64], &[b as i64]).unwrap();
                        for g in [CliffordGenerator::F(0), CliffordGenerator::P(0)] {
                            let u = generator_matrix(k, 1, g).unwrap();
                            let num = &u * p.to_matrix().unwrap() * u.adjoint();
                            let sym = p.conjugate(g).unwrap().to_matrix().unwrap();
                            assert!(close(&sym, &num, 1e-12), "d={d} a={a} b={b} {g:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exponents_wrap() {
        let k = dim(3);
        let z = PauliOperator::single(k, 1, 0, 0, 1).unwrap();
        let mut acc = PauliOperator::identity(k, 1);
        for _ in 0..3 {
            acc = acc.multiply(&z).unwrap();
        }
        assert!(acc.is_identity());
        let k4 = dim(4);
        let xz = PauliOperator::new(k4, 0, &[1], &[1]).unwrap();
        let mut acc = PauliOperator::identity(k4, 1);
        for _ in 0..k4.big_d() {
            acc = acc.multiply(&xz).unwrap();
        }
        assert!(acc.is_identity());
    }

    #[test]
    fn xi_p_is_quadratic() {
        for d in 2..9 {
            let k = dim(d);
            for n in 0..d as i64 {
                let expect = if d % 2 == 1 { n * (n + 1) / 2 } else { n * n };
                assert_eq!(xi_p(k, n), expect);
            }
        }
    }

    #[test]
    fn clifford_angles_give_phase_gate() {
        // R(p) should equal P = diag(omega^{n(n+delta)/2}).
        let k = dim(2);
        let p = k.clifford_angles();
        assert!((C64::from_polar(1.0, p[1]) - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn mismatch_errors() {
        let p = PauliOperator::identity(dim(2), 1);
        let q = PauliOperator::identity(dim(3), 1);
        assert!(p.multiply(&q).is_err());
        let r = PauliOperator::identity(dim(2), 2);
        assert!(p.multiply(&r).is_err());
        assert!(p.conjugate(CliffordGenerator::F(3)).is_err());
    }
}
