use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use qudit_mbqc::convert::{
    circuit_to_pattern_cluster, circuit_to_pattern_composite, clifford_constant_depth,
    controlled_pauli_constant_depth, pattern_to_circuit_coherent, pattern_to_fanout_circuit,
    CliffordOutput, CliffordTarget, ConversionReport, Metrics,
};
use qudit_mbqc::io::{artifact_from_json, artifact_to_json, report_to_json, Artifact};
use qudit_mbqc::pattern::{entanglement_depth, EntanglementGraph, RunMode};
use qudit_mbqc::stabilizer::clifford_equivalent;
use qudit_mbqc::verify::{verify as verify_artifacts, BranchMode, VerifyOptions, VerifyReport};
use qudit_mbqc::{random, rewrite, Circuit, Dim, Pattern, QuditId, StateVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{
    AnalyzeArgs, CliffordTargetArg, Conversion, ConvertArgs, Family, Format, GenArgs, Mode, Pass,
    RewriteArgs, RunArgs, VerifyArgs,
};
use crate::report::{
    analysis_text, conversion_text, run_text, sweep_text, verify_text, AnalysisReport,
    BranchReport, CircuitDetails, PatternDetails, RunReport, SweepReport, SweepRow,
};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Settings of one `run` invocation; the seed alone fixes every sampled
/// outcome.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub mode: RunMode,
    pub format: Format,
}

fn read_artifact(path: &Path) -> Result<Artifact> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    artifact_from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => print_stdout(text),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: "<stdout>".to_string(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn render<T: Serialize>(format: Format, report: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => report_to_json(report),
        Format::Text => text(report),
    }
}

fn need_circuit(a: Artifact, what: &str) -> Result<Circuit> {
    match a {
        Artifact::Circuit(c) => Ok(c),
        Artifact::Pattern(_) => Err(CliError::Input(format!(
            "{what} needs a circuit, got a pattern"
        ))),
    }
}

fn need_pattern(a: Artifact, what: &str) -> Result<Pattern> {
    match a {
        Artifact::Pattern(p) => Ok(p),
        Artifact::Circuit(_) => Err(CliError::Input(format!(
            "{what} needs a pattern, got a circuit"
        ))),
    }
}

fn metrics(a: &Artifact) -> Metrics {
    match a {
        Artifact::Circuit(c) => Metrics::from(c),
        Artifact::Pattern(p) => Metrics::from(p),
    }
}

fn generate(family: Family, dim: Dim, n: usize, gates: usize, seed: u64) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = match family {
        Family::Guni => random::random_guni(dim, n, gates, &mut rng)?,
        Family::Clifford => random::random_clifford(dim, n, gates, &mut rng)?,
        Family::Cascade => random::cascade(dim, n)?,
        Family::Fanout => random::fanout_instance(dim, n)?,
        Family::Cpauli => {
            if n < 2 {
                return Err(CliError::Input("cpauli circuits need n >= 2".into()));
            }
            random::random_controlled_pauli(dim, n, gates, false, &mut rng)?
        }
    };
    Ok(c)
}

pub fn gen(a: &GenArgs) -> Result<()> {
    if a.n == 0 {
        return Err(CliError::Input("n must be at least 1".into()));
    }
    let dim = Dim::new(a.d)?;
    let c = generate(a.family, dim, a.n, a.gates.unwrap_or(5 * a.n), a.seed)?;
    emit(a.out.as_deref(), &artifact_to_json(&Artifact::Circuit(c)))
}

fn conversion_name(c: Conversion) -> &'static str {
    match c {
        Conversion::Def7 => "def7",
        Conversion::Def8 => "def8",
        Conversion::Def9 => "def9",
        Conversion::FanoutCompile => "fanout-compile",
        Conversion::CliffordConst => "clifford-const",
    }
}

fn lowered(c: &Circuit) -> Result<Circuit> {
    Ok(if c.is_guni() {
        c.clone()
    } else {
        c.lower_to_guni()?
    })
}

fn apply_conversion(
    conv: Conversion,
    target: CliffordTargetArg,
    input: Artifact,
) -> Result<Artifact> {
    let what = conversion_name(conv);
    Ok(match conv {
        Conversion::Def7 => Artifact::Pattern(circuit_to_pattern_composite(&lowered(
            &need_circuit(input, what)?,
        )?)?),
        Conversion::Def8 => Artifact::Pattern(circuit_to_pattern_cluster(&lowered(
            &need_circuit(input, what)?,
        )?)?),
        Conversion::Def9 => {
            Artifact::Circuit(pattern_to_circuit_coherent(&need_pattern(input, what)?)?)
        }
        Conversion::FanoutCompile => match input {
            Artifact::Circuit(c) => Artifact::Circuit(controlled_pauli_constant_depth(&c)?),
            Artifact::Pattern(p) => Artifact::Circuit(pattern_to_fanout_circuit(&p)?),
        },
        Conversion::CliffordConst => {
            let t = match target {
                CliffordTargetArg::Pattern => CliffordTarget::Pattern,
                CliffordTargetArg::Circuit => CliffordTarget::FanoutCircuit,
            };
            match clifford_constant_depth(&need_circuit(input, what)?, t)? {
                CliffordOutput::Pattern(p) => Artifact::Pattern(p),
                CliffordOutput::Circuit(c) => Artifact::Circuit(c),
            }
        }
    })
}

pub fn convert(a: &ConvertArgs) -> Result<()> {
    let input = read_artifact(&a.input)?;
    let before = metrics(&input);
    let output = apply_conversion(a.conversion, a.target, input)?;
    let report = ConversionReport::new(conversion_name(a.conversion), before, metrics(&output));
    emit(a.out.as_deref(), &artifact_to_json(&output))?;
    if let Some(path) = &a.report {
        emit(Some(path), &report_to_json(&report))?;
    }
    eprint!("{}", render(a.format, &report, conversion_text));
    Ok(())
}

pub fn rewrite(a: &RewriteArgs) -> Result<()> {
    let p = need_pattern(read_artifact(&a.input)?, "rewrite")?;
    let out = match a.pass {
        Pass::Standardise => rewrite::standardise(&p)?,
        Pass::Pauli => rewrite::pauli_simplify(&p)?,
        Pass::Shift => rewrite::signal_shift(&p)?,
        Pass::Complete => rewrite::completely_standardise(&p)?,
    };
    emit(a.out.as_deref(), &artifact_to_json(&Artifact::Pattern(out)))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad {what} entry `{t}`")))
        })
        .collect()
}

fn parse_outcomes(s: &str) -> Result<BTreeMap<QuditId, u32>> {
    let mut out = BTreeMap::new();
    for pair in parse_list::<String>(s, "outcome")? {
        let (q, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("outcome `{pair}` is not qudit=value")))?;
        let q = q
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad qudit in `{pair}`")))?;
        let v = v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad value in `{pair}`")))?;
        out.insert(q, v);
    }
    Ok(out)
}

/// Normalised amplitudes with the largest-magnitude entry made real
/// positive, so equal states print identically.
fn canonical(amps: &[C64]) -> Vec<[f64; 2]> {
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = amps
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, z)| {
            if z.norm() > best.1 + 1e-12 {
                (i, z.norm())
            } else {
                best
            }
        })
        .0;
    let phase = if amps.is_empty() || amps[pivot].norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        amps[pivot].conj() / amps[pivot].norm()
    };
    amps.iter()
        .map(|z| {
            let w = z * phase / norm;
            let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
            [clean(w.re), clean(w.im)]
        })
        .collect()
}

fn input_state(a: &RunArgs, art: &Artifact) -> Result<StateVector> {
    let (dim, inputs) = (art.dim(), art.inputs());
    if a.random_input {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        return Ok(StateVector::random(dim, inputs, &mut rng)?);
    }
    let digits = match &a.state {
        Some(s) => parse_list::<u32>(s, "state digit")?,
        None => vec![0; inputs.len()],
    };
    Ok(StateVector::basis(dim, inputs, &digits)?)
}

pub fn run(a: &RunArgs) -> Result<()> {
    let art = read_artifact(&a.input)?;
    let config = RunConfig {
        seed: a.seed,
        mode: match a.mode {
            Mode::Sampled => RunMode::Sampled(a.seed),
            Mode::AllBranches => RunMode::AllBranches,
            Mode::Forced => {
                RunMode::Forced(parse_outcomes(a.outcomes.as_deref().ok_or_else(|| {
                    CliError::Input("--mode forced needs --outcomes".into())
                })?)?)
            }
        },
        format: a.format,
    };
    let input = input_state(a, &art)?;
    let mode_name = match config.mode {
        RunMode::Sampled(_) => "sampled",
        RunMode::Forced(_) => "forced",
        RunMode::AllBranches => "all_branches",
    };
    let (kind, branches) = match &art {
        Artifact::Pattern(p) => {
            let branches = p
                .run(&input, &config.mode)?
                .into_iter()
                .map(|b| BranchReport {
                    outcomes: b.outcomes,
                    probability: b.probability,
                    purity: 1.0,
                    amplitudes: Some(canonical(b.state.amplitudes())),
                })
                .collect();
            ("pattern", branches)
        }
        Artifact::Circuit(c) => {
            let rho = c.output_density(&input)?;
            let purity = (&rho * &rho).trace().re;
            let amplitudes = (purity > 1.0 - 1e-9).then(|| {
                let k = (0..rho.nrows())
                    .max_by(|&i, &j| rho[(i, i)].re.total_cmp(&rho[(j, j)].re))
                    .unwrap_or(0);
                let col: Vec<C64> = (0..rho.nrows()).map(|i| rho[(i, k)]).collect();
                canonical(&col)
            });
            let branch = BranchReport {
                outcomes: BTreeMap::new(),
                probability: 1.0,
                purity,
                amplitudes,
            };
            ("circuit", vec![branch])
        }
    };
    let report = RunReport {
        kind,
        mode: mode_name,
        seed: config.seed,
        outputs: art.outputs().to_vec(),
        branches,
    };
    emit(a.out.as_deref(), &render(config.format, &report, run_text))
}

/// Above this many branches `verify` samples unless `--sampled` is given.
const MAX_ENUMERATED_BRANCHES: f64 = 4096.0;
const AUTO_SAMPLES: usize = 16;

/// Upper bound on the branch count, `d^m` for `m` measured qudits.
fn branch_count(a: &Artifact) -> f64 {
    match a {
        Artifact::Circuit(_) => 1.0,
        Artifact::Pattern(p) => f64::from(a.dim().d()).powi(p.measured_qudits().len() as i32),
    }
}

/// Circuits too wide to simulate can still be compared exactly when one of
/// them is a unitary Clifford circuit. `None` when that does not apply.
fn clifford_fallback(x: &Artifact, y: &Artifact) -> Option<Result<VerifyReport>> {
    let (Artifact::Circuit(a), Artifact::Circuit(b)) = (x, y) else {
        return None;
    };
    let result = match clifford_equivalent(a, b) {
        Ok(r) => Ok(r),
        Err(_) => clifford_equivalent(b, a),
    };
    let mismatch = match result {
        Ok(m) => m,
        Err(_) => return None,
    };
    eprintln!("note: too wide to simulate; compared with the stabilizer oracle");
    if let Some(m) = &mismatch {
        eprintln!("mismatch: {m}");
    }
    Some(Ok(VerifyReport {
        inputs_checked: 0,
        branch_pairs: 0,
        max_infidelity: if mismatch.is_some() { 1.0 } else { 0.0 },
    }))
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let (x, y) = (read_artifact(&a.a)?, read_artifact(&a.b)?);
    let branches = match a.sampled {
        Some(k) => BranchMode::Sampled(k),
        None if branch_count(&x).max(branch_count(&y)) > MAX_ENUMERATED_BRANCHES => {
            eprintln!(
                "note: too many measurement branches to enumerate; sampling {AUTO_SAMPLES} runs per input"
            );
            BranchMode::Sampled(AUTO_SAMPLES)
        }
        None => BranchMode::All,
    };
    let opts = VerifyOptions {
        random_states: a.random,
        seed: a.seed,
        branches,
    };
    let report = match verify_artifacts(&x, &y, &opts) {
        Err(qudit_mbqc::Error::TooLarge(why)) => clifford_fallback(&x, &y)
            .ok_or(CliError::Library(qudit_mbqc::Error::TooLarge(why)))??,
        other => other?,
    };
    print_stdout(&render(a.format, &report, verify_text))?;
    if report.max_infidelity > a.tol {
        return Err(CliError::VerificationFailed {
            infidelity: report.max_infidelity,
            tol: a.tol,
        });
    }
    Ok(())
}

fn analysis(art: &Artifact) -> AnalysisReport {
    let (r, qudits) = match art {
        Artifact::Circuit(c) => (c.depth_and_size(), c.qudits().len()),
        Artifact::Pattern(p) => (p.depth_and_size(), p.qudits().len()),
    };
    let mut report = AnalysisReport {
        kind: "circuit",
        d: art.dim().d(),
        qudits,
        inputs: art.inputs().len(),
        outputs: art.outputs().len(),
        size: r.size,
        depth: r.depth,
        longest_path: r.longest_path,
        circuit: None,
        pattern: None,
    };
    match art {
        Artifact::Circuit(c) => {
            let mut gate_counts = BTreeMap::new();
            for op in c.ops() {
                *gate_counts.entry(op.gate.name().to_string()).or_insert(0) += 1;
            }
            let max_arity = c.ops().iter().map(|o| o.sites.len()).max().unwrap_or(0);
            report.circuit = Some(CircuitDetails {
                gate_counts,
                max_arity,
            });
        }
        Artifact::Pattern(p) => {
            let g = EntanglementGraph::from_pattern(p);
            let (colors, delta) = entanglement_depth(&g);
            report.kind = "pattern";
            report.pattern = Some(PatternDetails {
                measured: p.measured_qudits().len(),
                dependent_measurements: p.dependent_measurements(),
                standard: p.is_standard(),
                completely_standard: p.is_completely_standard(),
                entangling_edges: g.unit_edges().len(),
                max_degree: delta,
                entanglement_depth: colors,
            });
        }
    }
    report
}

fn parse_sweep(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Input(format!("sweep `{s}` is not of the form n=LO..HI"));
    let range = s.strip_prefix("n=").ok_or_else(bad)?;
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Guni => "guni",
        Family::Clifford => "clifford",
        Family::Cascade => "cascade",
        Family::Fanout => "fanout",
        Family::Cpauli => "cpauli",
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let Some(sweep) = &a.sweep else {
        let path = a
            .input
            .as_deref()
            .expect("clap requires input without --sweep");
        let report = analysis(&read_artifact(path)?);
        return emit(a.out.as_deref(), &render(a.format, &report, analysis_text));
    };
    let (lo, hi) = parse_sweep(sweep)?;
    let dim = Dim::new(a.d)?;
    let mut rows = Vec::new();
    for n in lo..=hi {
        // Each row gets its own seed so adding rows never changes others.
        let c = generate(
            a.family,
            dim,
            n,
            a.gates_per_n * n,
            a.seed.wrapping_add(n as u64),
        )?;
        let input = Artifact::Circuit(c);
        let mut row = SweepRow {
            n,
            input: metrics(&input),
            output: None,
            entanglement_depth: None,
        };
        if let Some(conv) = a.convert {
            let out = apply_conversion(conv, a.target, input)?;
            row.output = Some(metrics(&out));
            if let Artifact::Pattern(p) = &out {
                row.entanglement_depth =
                    Some(entanglement_depth(&EntanglementGraph::from_pattern(p)).0);
            }
        }
        rows.push(row);
    }
    let report = SweepReport {
        family: family_name(a.family).into(),
        conversion: a.convert.map(|c| conversion_name(c).into()),
        d: a.d,
        seed: a.seed,
        rows,
    };
    emit(a.out.as_deref(), &render(a.format, &report, sweep_text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_ranges() {
        assert_eq!(parse_sweep("n=2..6").unwrap(), (2, 6));
        assert!(parse_sweep("n=6..2").is_err());
        assert!(parse_sweep("m=1..2").is_err());
    }

    #[test]
    fn outcome_pairs() {
        let m = parse_outcomes("1=0, 3=2").unwrap();
        assert_eq!(m.get(&1), Some(&0));
        assert_eq!(m.get(&3), Some(&2));
        assert!(parse_outcomes("1:0").is_err());
    }

    #[test]
    fn canonical_phase_fixes_pivot() {
        let i = C64::new(0.0, 1.0);
        let a = canonical(&[C64::new(0.6, 0.0) * i, C64::new(0.8, 0.0) * i]);
        assert!((a[1][0] - 0.8).abs() < 1e-12 && a[1][1].abs() < 1e-12);
        assert!((a[0][0] - 0.6).abs() < 1e-12);
    }
}
