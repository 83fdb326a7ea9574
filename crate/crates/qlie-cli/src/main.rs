//! Batch front end: parse job configs, dispatch verification,
//! classification, equivalence, normal-form and recognition jobs, and emit
//! machine-readable JSON reports.
//!
//! Exit codes: 0 when the job completed and every check passed, 1 when a
//! verification failed, 2 on input errors (bad config, bad scalars,
//! degenerate parameters).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qlie::classify::{self, Reason};
use qlie::qla::{self, build_theorem_c};
use qlie::residual::ResidualReport;
use qlie::rmatrix::{
    build_rhat, build_sigma, check_ice, check_indecomposable, check_unitary, recognize_standard,
    IceMatrix, ParamSpec, StandardForm,
};
use qlie::scalar::{rat, Scalar, Symbol};
use qlie::tensor::{braid_residual, hecke_residual, skew_inverse};
use qlie::uea::{build_rules, DiamondReport, Element, ElementTerm};

#[derive(Parser)]
#[command(
    name = "qlie",
    about = "Exact verification and classification of quantum Lie algebras over ice braidings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the braid, Hecke, ice and skew-invertibility identities of a
    /// parameter spec, and the bracket axioms when a bracket applies.
    Verify(JobArgs),
    /// Sweep all parity vectors and parameter regimes up to a dimension and
    /// compare the computed kernel against the predicted classification.
    Classify(JobArgs),
    /// Compare the packed braid relation with the four separate systems.
    Equivalence(JobArgs),
    /// Reduce words to normal form in the enveloping algebra.
    #[command(name = "normal-form")]
    NormalForm(JobArgs),
    /// Recover spec, permutation and scale from an ice matrix.
    Recognize(JobArgs),
}

#[derive(Args, Clone)]
struct JobArgs {
    /// Job config JSON (spec, bracket coefficient, words, ice matrix).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for sample-point selection.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum dimension for classification sweeps.
    #[arg(long)]
    dmax: Option<usize>,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Keep all parameters symbolic (the default).
    #[arg(long, conflicts_with = "sampled")]
    symbolic: bool,
    /// Evaluate symbolic parameters at a seeded generic rational point.
    #[arg(long)]
    sampled: bool,
    /// Parity vector shorthand, e.g. `0,0,1`.
    #[arg(long, value_delimiter = ',')]
    parity: Option<Vec<u8>>,
    /// Dimension shorthand (cross-checked against the parity length).
    #[arg(long)]
    dim: Option<usize>,
    /// Deformation parameter, e.g. `q` or `5/7`.
    #[arg(long)]
    q: Option<String>,
    /// Bracket coefficient (defaults to 1 where a bracket applies).
    #[arg(long)]
    c: Option<String>,
}

/// On-disk job description; command-line flags override these fields.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    #[serde(default)]
    command: Option<String>,
    #[serde(default)]
    spec: Option<ParamSpec>,
    #[serde(default)]
    c: Option<Scalar>,
    #[serde(default)]
    words: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    ice: Option<IceMatrix>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    dmax: Option<usize>,
    #[serde(default)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Verify(a) => ("verify", a),
        Command::Classify(a) => ("classify", a),
        Command::Equivalence(a) => ("equivalence", a),
        Command::NormalForm(a) => ("normal-form", a),
        Command::Recognize(a) => ("recognize", a),
    };
    match run(name, args.clone()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(name: &str, args: JobArgs) -> Result<bool> {
    let config = load_config(name, &args)?;
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let out_path = args.json.clone().or_else(|| config.output.clone());
    match name {
        "verify" => {
            let spec = resolve_spec(&args, &config, seed)?;
            ensure_nondegenerate(&spec)?;
            let c = resolve_bracket_coefficient(&args, &config)?;
            let report = verify_report(&spec, c)?;
            let passed = report.passed;
            emit(&report, &out_path)?;
            Ok(passed)
        }
        "classify" => {
            let dmax = args.dmax.or(config.dmax).unwrap_or(3);
            let report = classify::run_sweep(dmax, seed).map_err(|e| anyhow!("{e}"))?;
            let passed = report.all_matched();
            emit(&report, &out_path)?;
            Ok(passed)
        }
        "equivalence" => {
            let spec = resolve_spec(&args, &config, seed)?;
            ensure_nondegenerate(&spec)?;
            let c = resolve_bracket_coefficient(&args, &config)?.unwrap_or_else(Scalar::one);
            let sigma = build_sigma(&spec).to_operator();
            let bracket = build_theorem_c(spec.dim(), &c);
            let report = qla::equivalence_report(&sigma, &bracket);
            let passed = report.equivalent;
            emit(&report, &out_path)?;
            Ok(passed)
        }
        "normal-form" => {
            let spec = resolve_spec(&args, &config, seed)?;
            ensure_nondegenerate(&spec)?;
            let c = resolve_bracket_coefficient(&args, &config)?.unwrap_or_else(Scalar::one);
            let words = config
                .words
                .clone()
                .ok_or_else(|| anyhow!("normal-form requires `words` in the config"))?;
            let report = normal_form_report(&spec, &c, &words)?;
            emit(&report, &out_path)?;
            Ok(true)
        }
        "recognize" => {
            let ice = config
                .ice
                .clone()
                .ok_or_else(|| anyhow!("recognize requires `ice` in the config"))?;
            let report = match recognize_standard(&ice) {
                Ok(witness) => RecognizeReport {
                    standard: true,
                    witness: Some(witness),
                    error: None,
                },
                Err(e) => RecognizeReport {
                    standard: false,
                    witness: None,
                    error: Some(e.to_string()),
                },
            };
            let passed = report.standard;
            emit(&report, &out_path)?;
            Ok(passed)
        }
        _ => unreachable!("subcommands are exhaustive"),
    }
}

fn load_config(name: &str, args: &JobArgs) -> Result<JobConfig> {
    let Some(path) = &args.config else {
        return Ok(JobConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config: JobConfig = serde_json::from_str(&text).context("cannot parse config")?;
    if let Some(cmd) = &config.command {
        if cmd != name {
            bail!("config is for command `{cmd}` but `{name}` was invoked");
        }
    }
    Ok(config)
}

/// Spec from flags and config: explicit spec from the config, overridden by
/// the `--parity`/`--dim`/`--q` shorthand (p defaults to all ones in
/// shorthand mode), then optionally evaluated at a seeded sample point.
fn resolve_spec(args: &JobArgs, config: &JobConfig, seed: u64) -> Result<ParamSpec> {
    let mut spec = config.spec.clone();
    if args.parity.is_some() || args.q.is_some() {
        let parity = match (&args.parity, &spec) {
            (Some(p), _) => p.clone(),
            (None, Some(s)) => s.parity().to_vec(),
            (None, None) => bail!("--q without --parity or a config spec"),
        };
        let q: Scalar = match (&args.q, &spec) {
            (Some(text), _) => text.parse().map_err(|e| anyhow!("bad --q: {e}"))?,
            (None, Some(s)) => s.q().clone(),
            (None, None) => Scalar::q(),
        };
        let p = match &spec {
            Some(s) if s.dim() == parity.len() => s.p_matrix().clone(),
            _ => vec![vec![Scalar::one(); parity.len()]; parity.len()],
        };
        spec = Some(ParamSpec::new(parity, q, p).map_err(|e| anyhow!("bad spec: {e}"))?);
    }
    let mut spec = spec.ok_or_else(|| anyhow!("no spec: pass --config or --parity/--q"))?;
    if let Some(dim) = args.dim {
        if dim != spec.dim() {
            bail!("--dim {dim} does not match the parity length {}", spec.dim());
        }
    }
    if args.sampled {
        spec = sample_down(&spec, seed)?;
    }
    Ok(spec)
}

/// Replace every symbol in the spec by a seeded generic rational: `q` from
/// the fixed sample list, everything else by distinct prime ratios.
fn sample_down(spec: &ParamSpec, seed: u64) -> Result<ParamSpec> {
    let mut symbols: Vec<Symbol> = Vec::new();
    let mut collect = |s: &Scalar| {
        for sym in s.symbols() {
            if !symbols.contains(&sym) {
                symbols.push(sym);
            }
        }
    };
    collect(spec.q());
    for row in spec.p_matrix() {
        for v in row {
            collect(v);
        }
    }
    const PRIMES: [i64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let mut point = BTreeMap::new();
    let mut t = seed as usize;
    for sym in symbols {
        let value = if sym.name() == "q" {
            let (n, d) = classify::Q_SAMPLES[seed as usize % classify::Q_SAMPLES.len()];
            rat(n, d)
        } else {
            let a = PRIMES[t % PRIMES.len()];
            let b = PRIMES[(t + 1) % PRIMES.len()];
            t += 2;
            rat(a, b)
        };
        point.insert(sym, value);
    }
    let q = Scalar::from_rat(
        spec.q()
            .evaluate(&point)
            .map_err(|e| anyhow!("sampling q: {e}"))?,
    );
    let dim = spec.dim();
    let mut p = vec![vec![Scalar::one(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            p[i][j] = Scalar::from_rat(
                spec.p(i, j)
                    .evaluate(&point)
                    .map_err(|e| anyhow!("sampling p[{i}][{j}]: {e}"))?,
            );
        }
    }
    ParamSpec::new(spec.parity().to_vec(), q, p).map_err(|e| anyhow!("sampled spec invalid: {e}"))
}

fn resolve_bracket_coefficient(args: &JobArgs, config: &JobConfig) -> Result<Option<Scalar>> {
    if let Some(text) = &args.c {
        return Ok(Some(text.parse().map_err(|e| anyhow!("bad --c: {e}"))?));
    }
    Ok(config.c.clone())
}

fn ensure_nondegenerate(spec: &ParamSpec) -> Result<()> {
    if spec.is_degenerate_q() {
        bail!("degenerate parameters: q^4 = 1 (the checks assume q^4 != 1)");
    }
    Ok(())
}

fn emit<T: Serialize>(report: &T, path: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match path {
        Some(p) => std::fs::write(p, text.as_bytes())
            .with_context(|| format!("cannot write {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CheckOutcome {
    name: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<ResidualReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct VerifyReport {
    /// Structural checks that must all pass.
    checks: Vec<CheckOutcome>,
    /// Informational properties of the operator.
    unitary: bool,
    indecomposable: bool,
    degenerate_q: bool,
    /// Why the bracket axioms were or were not checked.
    bracket_checked: String,
    passed: bool,
}

fn verify_report(spec: &ParamSpec, c: Option<Scalar>) -> Result<VerifyReport> {
    let rhat_ice = build_rhat(spec);
    let sigma_ice = build_sigma(spec);
    let rhat = rhat_ice.to_operator();
    let sigma = sigma_ice.to_operator();
    let q = spec.q();

    let mut checks = Vec::new();
    let mut push = |name: &str, residual: Option<ResidualReport>, passed: bool| {
        checks.push(CheckOutcome {
            name: name.to_string(),
            passed,
            residual,
        });
    };

    push("ice", None, check_ice(&rhat));
    let braid_r = braid_residual(&rhat).to_residual().report();
    let ok = braid_r.zero;
    push("braid_rhat", Some(braid_r), ok);
    let braid_s = braid_residual(&sigma).to_residual().report();
    let ok = braid_s.zero;
    push("braid_sigma", Some(braid_s), ok);
    let hecke = hecke_residual(&sigma, &Scalar::one(), &q.pow(-2).neg())
        .to_residual()
        .report();
    let ok = hecke.zero;
    push("hecke_sigma", Some(hecke), ok);
    push("skew_invertible", None, skew_inverse(&rhat).is_ok());

    // The bracket axioms: checked for an explicit coefficient, or with the
    // default coefficient 1 when the parameters admit the bracket at all.
    let prediction = classify::predict(spec).map_err(|e| anyhow!("{e}"))?;
    let (bracket_c, why): (Option<Scalar>, String) = match (&c, prediction.reason) {
        (Some(v), _) => (Some(v.clone()), "explicit coefficient".to_string()),
        (None, Reason::Admissible) => (Some(Scalar::one()), "admissible parameters".to_string()),
        (None, reason) => (None, format!("skipped: {reason:?}")),
    };
    if let Some(cv) = &bracket_c {
        let bracket = build_theorem_c(spec.dim(), cv);
        let ax = qla::axiom_residuals(&sigma, &bracket, q).map_err(|e| anyhow!("{e}"))?;
        let brs = ax.braided_symmetry.report();
        let ok = brs.zero;
        push("braided_symmetry", Some(brs), ok);
        let jac = ax.jacobi.report();
        let ok = jac.zero;
        push("jacobi", Some(jac), ok);
        let er = ax.e.report();
        let ok = er.zero;
        push("compat_e", Some(er), ok);
        let fr = ax.f.report();
        let ok = fr.zero;
        push("compat_f", Some(fr), ok);
        let eq = qla::equivalence_report(&sigma, &bracket);
        push(
            "packed_braid_equivalence",
            None,
            eq.equivalent && eq.extended_braid_zero,
        );
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        checks,
        unitary: check_unitary(&sigma),
        indecomposable: check_indecomposable(&rhat_ice),
        degenerate_q: spec.is_degenerate_q(),
        bracket_checked: why,
        passed,
    })
}

// ---------------------------------------------------------------------------
// normal-form
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct ReducedWord {
    input: Vec<usize>,
    normal_form: Vec<ElementTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct NormalFormReport {
    reduced: Vec<ReducedWord>,
    diamond: DiamondReport,
}

fn normal_form_report(
    spec: &ParamSpec,
    c: &Scalar,
    words: &[Vec<usize>],
) -> Result<NormalFormReport> {
    let sigma = build_sigma(spec);
    let bracket = build_theorem_c(spec.dim(), c);
    let rules = build_rules(&sigma, &bracket).map_err(|e| anyhow!("{e}"))?;
    let mut reduced = Vec::new();
    for word in words {
        let zero_based: Vec<u8> = word
            .iter()
            .map(|&x| {
                if x == 0 || x > spec.dim() {
                    bail!("generator index {x} out of range 1..={}", spec.dim())
                } else {
                    Ok((x - 1) as u8)
                }
            })
            .collect::<Result<_>>()?;
        let nf = rules.normal_form(&Element::from_word(zero_based));
        reduced.push(ReducedWord {
            input: word.clone(),
            normal_form: nf.to_json(),
        });
    }
    Ok(NormalFormReport {
        reduced,
        diamond: rules.diamond_report(),
    })
}

// ---------------------------------------------------------------------------
// recognize
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RecognizeReport {
    standard: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<StandardForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_admissible_symbolic_spec_passes() {
        let spec = ParamSpec::symbolic_first_row_trivial(vec![0, 0]);
        let report = verify_report(&spec, None).unwrap();
        assert!(report.passed, "failing checks: {:?}", report.checks);
        assert!(!report.unitary);
        assert!(report.indecomposable);
        let json = serde_json::to_string(&report).unwrap();
        let back: VerifyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn verify_skips_bracket_for_non_admissible_spec() {
        let spec = ParamSpec::symbolic(vec![1, 0]);
        let report = verify_report(&spec, None).unwrap();
        assert!(report.passed);
        assert!(report.bracket_checked.contains("skipped"));
    }

    #[test]
    fn sample_down_replaces_symbols() {
        let spec = ParamSpec::symbolic(vec![0, 1]);
        let sampled = sample_down(&spec, 0).unwrap();
        assert!(sampled.q().as_rational().is_some());
        assert!(sampled.p(0, 1).as_rational().is_some());
        assert!(!sampled.is_degenerate_q());
    }

    #[test]
    fn degenerate_q_is_an_input_error() {
        let one = ParamSpec::with_upper_p(vec![0], Scalar::one(), |_, _| Scalar::one()).unwrap();
        assert!(ensure_nondegenerate(&one).is_err());
        let spec = ParamSpec::symbolic(vec![0]);
        assert!(ensure_nondegenerate(&spec).is_ok());
    }
}
