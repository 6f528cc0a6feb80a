//! Report payloads. JSON is the contract; the text form prints the same
//! fields.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qudit_mbqc::convert::{ConversionReport, Metrics};
use qudit_mbqc::verify::VerifyReport;
use qudit_mbqc::QuditId;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct BranchReport {
    pub outcomes: BTreeMap<QuditId, u32>,
    pub probability: f64,
    pub purity: f64,
    /// Output state as `[re, im]` pairs, present when the output is pure.
    /// The global phase makes the largest-magnitude entry real positive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub kind: &'static str,
    pub mode: &'static str,
    pub seed: u64,
    pub outputs: Vec<QuditId>,
    pub branches: Vec<BranchReport>,
}

#[derive(Debug, Serialize)]
pub struct CircuitDetails {
    pub gate_counts: BTreeMap<String, usize>,
    pub max_arity: usize,
}

#[derive(Debug, Serialize)]
pub struct PatternDetails {
    pub measured: usize,
    pub dependent_measurements: usize,
    pub standard: bool,
    pub completely_standard: bool,
    pub entangling_edges: usize,
    pub max_degree: usize,
    pub entanglement_depth: usize,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub kind: &'static str,
    pub d: u32,
    pub qudits: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub size: usize,
    pub depth: usize,
    pub longest_path: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitDetails>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternDetails>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub input: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Metrics>,
    /// Edge colors of the entangling layer when the result is a pattern.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entanglement_depth: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub conversion: Option<String>,
    pub d: u32,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

fn metrics_line(m: &Metrics) -> String {
    format!("qudits {} size {} depth {}", m.qudits, m.size, m.depth)
}

pub fn conversion_text(r: &ConversionReport) -> String {
    format!(
        "{}: input {}; output {}; ancillas {}\n",
        r.conversion,
        metrics_line(&r.input),
        metrics_line(&r.output),
        r.ancillas
    )
}

pub fn verify_text(r: &VerifyReport) -> String {
    format!(
        "inputs checked: {}\nbranch pairs: {}\nmax infidelity: {:.3e}\n",
        r.inputs_checked, r.branch_pairs, r.max_infidelity
    )
}

pub fn run_text(r: &RunReport) -> String {
    let mut s = format!(
        "{} run, mode {}, seed {}, outputs {:?}\n",
        r.kind, r.mode, r.seed, r.outputs
    );
    for (i, b) in r.branches.iter().enumerate() {
        let outcomes: Vec<String> = b.outcomes.iter().map(|(q, v)| format!("{q}={v}")).collect();
        let _ = writeln!(
            s,
            "branch {i}: outcomes [{}] probability {:.6} purity {:.6}",
            outcomes.join(","),
            b.probability,
            b.purity
        );
        if let Some(amps) = &b.amplitudes {
            let parts: Vec<String> = amps
                .iter()
                .map(|[re, im]| format!("{re:+.6}{im:+.6}i"))
                .collect();
            let _ = writeln!(s, "  amplitudes [{}]", parts.join(", "));
        }
    }
    s
}

pub fn analysis_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind: {}", r.kind);
    let _ = writeln!(s, "d: {}", r.d);
    let _ = writeln!(s, "qudits: {}", r.qudits);
    let _ = writeln!(s, "inputs: {}", r.inputs);
    let _ = writeln!(s, "outputs: {}", r.outputs);
    let _ = writeln!(s, "size: {}", r.size);
    let _ = writeln!(s, "depth: {}", r.depth);
    let _ = writeln!(s, "longest_path: {:?}", r.longest_path);
    if let Some(c) = &r.circuit {
        let counts: Vec<String> = c
            .gate_counts
            .iter()
            .map(|(g, k)| format!("{g}={k}"))
            .collect();
        let _ = writeln!(s, "gate_counts: {}", counts.join(" "));
        let _ = writeln!(s, "max_arity: {}", c.max_arity);
    }
    if let Some(p) = &r.pattern {
        let _ = writeln!(s, "measured: {}", p.measured);
        let _ = writeln!(s, "dependent_measurements: {}", p.dependent_measurements);
        let _ = writeln!(s, "standard: {}", p.standard);
        let _ = writeln!(s, "completely_standard: {}", p.completely_standard);
        let _ = writeln!(s, "entangling_edges: {}", p.entangling_edges);
        let _ = writeln!(s, "max_degree: {}", p.max_degree);
        let _ = writeln!(s, "entanglement_depth: {}", p.entanglement_depth);
    }
    s
}

pub fn sweep_text(r: &SweepReport) -> String {
    let mut s = format!(
        "family {} conversion {} d {} seed {}\n",
        r.family,
        r.conversion.as_deref().unwrap_or("none"),
        r.d,
        r.seed
    );
    let dash = |o: Option<usize>| o.map_or("-".to_string(), |v| v.to_string());
    let _ = writeln!(
        s,
        "{:>3} {:>9} {:>7} {:>8} {:>10} {:>8} {:>9} {:>9}",
        "n", "in_qudits", "in_size", "in_depth", "out_qudits", "out_size", "out_depth", "ent_depth"
    );
    for row in &r.rows {
        let _ = writeln!(
            s,
            "{:>3} {:>9} {:>7} {:>8} {:>10} {:>8} {:>9} {:>9}",
            row.n,
            row.input.qudits,
            row.input.size,
            row.input.depth,
            dash(row.output.map(|m| m.qudits)),
            dash(row.output.map(|m| m.size)),
            dash(row.output.map(|m| m.depth)),
            dash(row.entanglement_depth)
        );
    }
    s
}
