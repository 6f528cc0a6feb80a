//! Seeded generators for test and benchmark inputs.

use std::f64::consts::PI;

use rand::Rng;

use crate::circuit::Circuit;
use crate::convert::circuit_to_pattern_standard;
use crate::error::Result;
use crate::pattern::Pattern;
use crate::sim::GateKind;
use crate::{Dim, QuditId};

/// Measurement / rotation angles `theta` with `theta_0 = 0`. A quarter of
/// the draws are the Pauli angles `0` and `p` so the Pauli rewrite rules
/// get exercised; the rest are uniform.
pub fn random_angles<R: Rng + ?Sized>(dim: Dim, rng: &mut R) -> Vec<f64> {
    match rng.gen_range(0..8) {
        0 => dim.zero_angles(),
        1 => dim.clifford_angles(),
        _ => (0..dim.d())
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    rng.gen_range(0.0..2.0 * PI)
                }
            })
            .collect(),
    }
}

fn pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (QuditId, QuditId) {
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    (a as QuditId, b as QuditId)
}

/// Random circuit over the universal set `{CZ, v(theta)}` on qudits
/// `0..n`. With one qudit only `v` gates are drawn.
pub fn random_guni<R: Rng + ?Sized>(
    dim: Dim,
    n: usize,
    gates: usize,
    rng: &mut R,
) -> Result<Circuit> {
    let mut c = Circuit::on(dim, (0..n as QuditId).collect())?;
    for _ in 0..gates {
        if n > 1 && rng.gen_bool(0.4) {
            let (a, b) = pair(n, rng);
            c.push(GateKind::CZ(1), vec![a, b])?;
        } else {
            let q = rng.gen_range(0..n) as QuditId;
            c.push(GateKind::V(random_angles(dim, rng)), vec![q])?;
        }
    }
    Ok(c)
}

/// Random circuit over `{F, P, CZ}` on qudits `0..n`.
pub fn random_clifford<R: Rng + ?Sized>(
    dim: Dim,
    n: usize,
    gates: usize,
    rng: &mut R,
) -> Result<Circuit> {
    let mut c = Circuit::on(dim, (0..n as QuditId).collect())?;
    for _ in 0..gates {
        let pick = if n > 1 {
            rng.gen_range(0..3)
        } else {
            rng.gen_range(0..2)
        };
        match pick {
            0 => c.push(GateKind::F, vec![rng.gen_range(0..n) as QuditId])?,
            1 => c.push(GateKind::P, vec![rng.gen_range(0..n) as QuditId])?,
            _ => {
                let (a, b) = pair(n, rng);
                c.push(GateKind::CZ(1), vec![a, b])?
            }
        }
    }
    Ok(c)
}

/// Random circuit over `{CX^k, CZ^k}` (plus `X^k`, `Z^k` when `paulis`),
/// exponents uniform in `1..d`. Needs `n >= 2`.
pub fn random_controlled_pauli<R: Rng + ?Sized>(
    dim: Dim,
    n: usize,
    gates: usize,
    paulis: bool,
    rng: &mut R,
) -> Result<Circuit> {
    let mut c = Circuit::on(dim, (0..n as QuditId).collect())?;
    for _ in 0..gates {
        let k = rng.gen_range(1..dim.d());
        let (a, b) = pair(n, rng);
        let g = rng.gen_range(0..if paulis { 4 } else { 2 });
        match g {
            0 => c.push(GateKind::CX(k), vec![a, b])?,
            1 => c.push(GateKind::CZ(k), vec![a, b])?,
            2 => c.push(GateKind::X(k), vec![a])?,
            _ => c.push(GateKind::Z(k), vec![a])?,
        }
    }
    Ok(c)
}

/// `CZ(0,1) CZ(1,2) ... CZ(n-2,n-1)`, written in sequence.
pub fn cascade(dim: Dim, n: usize) -> Result<Circuit> {
    let mut c = Circuit::on(dim, (0..n as QuditId).collect())?;
    for q in 1..n as QuditId {
        c.push(GateKind::CZ(1), vec![q - 1, q])?;
    }
    Ok(c)
}

/// A single plain fan-out gate from qudit `0` into qudits `1..=n`.
pub fn fanout_instance(dim: Dim, n: usize) -> Result<Circuit> {
    let sites: Vec<QuditId> = (0..=n as QuditId).collect();
    let mut c = Circuit::on(dim, sites.clone())?;
    c.push(GateKind::Fanout(vec![1; n]), sites)?;
    Ok(c)
}

/// Completely standard pattern of a random `{CZ, v}` circuit with at most
/// `max_measured` measurements, together with that circuit.
pub fn random_guni_pattern<R: Rng + ?Sized>(
    dim: Dim,
    n: usize,
    max_measured: usize,
    rng: &mut R,
) -> Result<(Circuit, Pattern)> {
    let max_v = max_measured.max(1);
    let mut c = Circuit::on(dim, (0..n as QuditId).collect())?;
    let mut vs = 0;
    let budget = rng.gen_range(1..=max_v + n);
    for _ in 0..budget {
        if vs < max_measured && (n == 1 || rng.gen_bool(0.6)) {
            let q = rng.gen_range(0..n) as QuditId;
            c.push(GateKind::V(random_angles(dim, rng)), vec![q])?;
            vs += 1;
        } else if n > 1 {
            let (a, b) = pair(n, rng);
            c.push(GateKind::CZ(1), vec![a, b])?;
        }
    }
    let p = circuit_to_pattern_standard(&c)?;
    Ok((c, p))
}
