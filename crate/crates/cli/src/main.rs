//! Command-line front end for the gausskit library.
//!
//! Channels and states travel as JSON documents (see `gausskit::json`).
//! Reports are printed either as fixed-format text or, with `--json`, as a
//! machine-readable document with stable field order, so identical inputs
//! produce byte-identical output.
//!
//! Exit codes for `check`: 0 the channel is extreme, 1 completely positive
//! but not extreme, 2 not completely positive, 3 the noise form is
//! degenerate and the analysis does not apply, 64 bad input. `verify-fock`
//! returns 0 when every oracle stays within its bound and 1 otherwise; the
//! other subcommands return 0 on success and the same error codes on
//! failure.

use std::io::Read;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gausskit::channels::{Extremality,GaussianChannel};
use gausskit::fock::{
    sample_nonneg_definite, verify_apply, verify_duality, FockConfig, FockOperator,
};
use gausskit::json::{ChannelDoc, StateDoc};
use gausskit::states::{GaussianState, PurityReport};
use gausskit::Error;

const EXIT_NOT_EXTREME: u8 = 1;
const EXIT_NOT_CP: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;
const EXIT_INPUT: u8 = 64;

/// Oracle bounds for `verify-fock`, matching the library test suite.
const APPLY_BOUND: f64 = 1e-3;
const DUALITY_BOUND: f64 = 1e-6;
const KERNEL_BOUND: f64 = -1e-6;
const KERNEL_SETS: u64 = 100;
const KERNEL_POINTS: usize = 16;

#[derive(Parser)]
#[command(name = "gausskit", version, about = "Gaussian channel analysis")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Residual tolerance for identity checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Relative eigenvalue cliff for numerical rank decisions.
    #[arg(long, global = true, default_value_t = 1e-7)]
    rank_tol: f64,
    /// Fock truncation: the highest retained number state.
    #[arg(long, global = true, default_value_t = 60)]
    nmax: usize,
    /// Half-width of the phase-space quadrature box.
    #[arg(long, global = true, default_value_t = 6.0)]
    grid_extent: f64,
    /// Quadrature step.
    #[arg(long, global = true, default_value_t = 0.05)]
    grid_step: f64,
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized kernel sweep in verify-fock.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a channel and classify its extremality.
    Check {
        /// Channel JSON file, or - for standard input.
        channel: String,
    },
    /// Print the symplectic dilation of a channel with its residuals.
    Dilate { channel: String },
    /// Print the complementary channel.
    Complement { channel: String },
    /// Print the dual channel triple and trace scale.
    Dual { channel: String },
    /// Push a Gaussian state through a channel.
    Apply {
        channel: String,
        /// State JSON file, or - for standard input.
        state: String,
        /// Also write the output state document to this file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Emit a catalog channel as JSON: attenuator ETA [NBAR],
    /// amplifier GAIN [NBAR], classical-noise NU, identity [MODES].
    Catalog { kind: String, params: Vec<f64> },
    /// Cross-check a one-mode channel against truncated Fock numerics.
    VerifyFock { channel: String },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::NotCompletelyPositive { .. } => EXIT_NOT_CP,
            Error::DegenerateNoise(_) => EXIT_INDETERMINATE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return std::process::ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return std::process::ExitCode::from(EXIT_INPUT);
        }
    };
    let outcome = match &cli.cmd {
        Command::Check { channel } => cmd_check(channel, &cli.opts),
        Command::Dilate { channel } => cmd_dilate(channel, &cli.opts),
        Command::Complement { channel } => cmd_complement(channel, &cli.opts),
        Command::Dual { channel } => cmd_dual(channel, &cli.opts),
        Command::Apply {
            channel,
            state,
            out,
        } => cmd_apply(channel, state, out.as_deref(), &cli.opts),
        Command::Catalog { kind, params } => cmd_catalog(kind, params),
        Command::VerifyFock { channel } => cmd_verify_fock(channel, &cli.opts),
    };
    match outcome {
        Ok(code) => std::process::ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::ExitCode::from(failure.code)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("reading standard input: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))
    }
}

fn load_channel(path: &str) -> Result<GaussianChannel, Failure> {
    let text = read_input(path)?;
    let doc: ChannelDoc = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("channel document {path}: {e}")))?;
    Ok(doc.to_channel()?)
}

fn load_state(path: &str) -> Result<GaussianState, Failure> {
    let text = read_input(path)?;
    let doc: StateDoc = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("state document {path}: {e}")))?;
    Ok(doc.to_state()?)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn print_json<T: Serialize>(report: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("report serialization cannot fail")
    );
}

fn print_matrix(label: &str, m: &DMatrix<f64>) {
    println!("{label}:");
    for r in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols())
            .map(|c| format!("{:>20.12e}", m[(r, c)]))
            .collect();
        println!("  [ {} ]", cells.join(" "));
    }
}

fn print_vector(label: &str, v: &DVector<f64>) {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.12e}")).collect();
    println!("{label}: [{}]", cells.join(", "));
}

fn fmt_floats(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|x| format!("{x:.12e}")).collect();
    format!("[{}]", cells.join(", "))
}

#[derive(Serialize)]
struct NoiseJson {
    delta_k: Vec<Vec<f64>>,
    sigma_min: f64,
    sigma_max: f64,
    nondegenerate: bool,
}

#[derive(Serialize)]
struct EnvironmentJson {
    k_d: Vec<Vec<f64>>,
    alpha_d: Vec<Vec<f64>>,
    l_d: Vec<f64>,
    symplectic_eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct PurityJson {
    minimal: bool,
    eigenvalues_half: bool,
    rank_matches: bool,
    inverse_matches: bool,
    complex_structure: bool,
    symplectic_eigenvalues: Vec<f64>,
    eigenvalue_deviation: f64,
    obstruction_rank: usize,
    inverse_residual: f64,
    complex_structure_residual: f64,
}

impl PurityJson {
    fn from_report(report: &PurityReport) -> Self {
        PurityJson {
            minimal: report.verdicts.minimal,
            eigenvalues_half: report.verdicts.eigenvalues_half,
            rank_matches: report.verdicts.rank_matches,
            inverse_matches: report.verdicts.inverse_matches,
            complex_structure: report.verdicts.complex_structure,
            symplectic_eigenvalues: report.symplectic_eigenvalues.clone(),
            eigenvalue_deviation: report.eigenvalue_deviation,
            obstruction_rank: report.obstruction_rank,
            inverse_residual: report.inverse_residual,
            complex_structure_residual: report.complex_structure_residual,
        }
    }
}

#[derive(Serialize)]
struct CheckReport {
    input: ChannelDoc,
    cp: bool,
    cp_margin: f64,
    noise: NoiseJson,
    environment: Option<EnvironmentJson>,
    verdict: String,
    purity: Option<PurityJson>,
    warnings: Vec<String>,
}

fn environment_json(channel: &GaussianChannel, tol: f64) -> Result<EnvironmentJson, Failure> {
    let env = channel.environment(tol)?;
    let eigenvalues = env.state.symplectic_eigenvalues(tol)?;
    Ok(EnvironmentJson {
        k_d: rows(&env.k_d),
        alpha_d: rows(&env.state.cov),
        l_d: env.state.mean.iter().copied().collect(),
        symplectic_eigenvalues: eigenvalues,
    })
}

fn cmd_check(path: &str, opts: &GlobalOpts) -> Result<u8, Failure> {
    let channel = load_channel(path)?;
    let validity = channel.validate(opts.tol)?;
    let noise = channel.noise_form(opts.tol);
    let mut warnings = Vec::new();

    let environment = if validity.cp && noise.nondegenerate {
        Some(environment_json(&channel, opts.tol)?)
    } else {
        None
    };

    let (verdict, purity, code) = if !validity.cp {
        warnings.push("mu fails the complete positivity bound".to_string());
        ("not_cp".to_string(), None, EXIT_NOT_CP)
    } else if !noise.nondegenerate {
        warnings.push(
            "the noise form Delta_K is degenerate; the minimal-noise analysis does not apply"
                .to_string(),
        );
        ("indeterminate".to_string(), None, EXIT_INDETERMINATE)
    } else {
        let report = channel.is_extreme(opts.tol, opts.rank_tol)?;
        let purity = report.environment.as_ref().map(PurityJson::from_report);
        match report.verdict {
            Extremality::Extreme => ("extreme".to_string(), purity, 0),
            Extremality::NotExtreme => ("not_extreme".to_string(), purity, EXIT_NOT_EXTREME),
            Extremality::Indeterminate => {
                ("indeterminate".to_string(), purity, EXIT_INDETERMINATE)
            }
        }
    };

    let report = CheckReport {
        input: ChannelDoc::from_channel(&channel),
        cp: validity.cp,
        cp_margin: validity.cp_margin,
        noise: NoiseJson {
            delta_k: rows(&noise.delta_k),
            sigma_min: noise.sigma_min,
            sigma_max: noise.sigma_max,
            nondegenerate: noise.nondegenerate,
        },
        environment,
        verdict,
        purity,
        warnings,
    };

    if opts.json {
        print_json(&report);
        return Ok(code);
    }

    println!(
        "channel: {} -> {} modes",
        channel.modes_in(),
        channel.modes_out()
    );
    println!(
        "completely positive: {} (margin {:.12e})",
        report.cp, report.cp_margin
    );
    println!(
        "noise form: {} (sigma_min {:.12e}, sigma_max {:.12e})",
        if report.noise.nondegenerate {
            "nondegenerate"
        } else {
            "degenerate"
        },
        report.noise.sigma_min,
        report.noise.sigma_max
    );
    print_matrix("Delta_K", &noise.delta_k);
    if let Some(env) = &report.environment {
        println!(
            "environment symplectic eigenvalues: {}",
            fmt_floats(&env.symplectic_eigenvalues)
        );
    }
    println!("verdict: {}", report.verdict);
    if let Some(purity) = &report.purity {
        println!(
            "purity verdicts: minimal={} eigenvalues_half={} rank={} inverse={} complex_structure={}",
            purity.minimal,
            purity.eigenvalues_half,
            purity.rank_matches,
            purity.inverse_matches,
            purity.complex_structure
        );
        println!(
            "purity residuals: eigenvalue_deviation {:.12e}, inverse {:.12e}, complex_structure {:.12e}, obstruction rank {}",
            purity.eigenvalue_deviation,
            purity.inverse_residual,
            purity.complex_structure_residual,
            purity.obstruction_rank
        );
    }
    for warning in &report.warnings {
        println!("warning: {warning}");
    }
    Ok(code)
}

#[derive(Serialize)]
struct ResidualsJson {
    noise_factor: f64,
    form_sum: f64,
    symplectic: f64,
    det_l: f64,
    env_margin: f64,
}

#[derive(Serialize)]
struct DilateReport {
    input: ChannelDoc,
    k_d: Vec<Vec<f64>>,
    l: Vec<Vec<f64>>,
    l_d: Vec<Vec<f64>>,
    t: Vec<Vec<f64>>,
    environment: EnvironmentJson,
    residuals: ResidualsJson,
}

fn cmd_dilate(path: &str, opts: &GlobalOpts) -> Result<u8, Failure> {
    let channel = load_channel(path)?;
    let dilation = channel.dilate(opts.tol)?;
    let report = DilateReport {
        input: ChannelDoc::from_channel(&channel),
        k_d: rows(&dilation.k_d),
        l: rows(&dilation.l_mat),
        l_d: rows(&dilation.l_d),
        t: rows(&dilation.t),
        environment: EnvironmentJson {
            k_d: rows(&dilation.k_d),
            alpha_d: rows(&dilation.env.cov),
            l_d: dilation.env.mean.iter().copied().collect(),
            symplectic_eigenvalues: dilation.env.symplectic_eigenvalues(opts.tol)?,
        },
        residuals: ResidualsJson {
            noise_factor: dilation.residuals.noise_factor,
            form_sum: dilation.residuals.form_sum,
            symplectic: dilation.residuals.symplectic,
            det_l: dilation.residuals.det_l,
            env_margin: dilation.residuals.env_margin,
        },
    };

    if opts.json {
        print_json(&report);
        return Ok(0);
    }

    println!(
        "dilation of a {} -> {} channel",
        channel.modes_in(),
        channel.modes_out()
    );
    print_matrix("K_D", &dilation.k_d);
    print_matrix("L", &dilation.l_mat);
    print_matrix("L_D", &dilation.l_d);
    print_matrix("T", &dilation.t);
    print_matrix("environment covariance alpha_D", &dilation.env.cov);
    print_vector("environment mean l_D", &dilation.env.mean);
    println!(
        "environment symplectic eigenvalues: {}",
        fmt_floats(&report.environment.symplectic_eigenvalues)
    );
    println!("residuals:");
    println!(
        "  K_D^T Delta_D K_D - Delta_K: {:.12e}",
        report.residuals.noise_factor
    );
    println!(
        "  K^T Delta_A K + K_D^T Delta_D K_D - Delta_B: {:.12e}",
        report.residuals.form_sum
    );
    println!(
        "  T^T diag(Delta) T - diag(Delta): {:.12e}",
        report.residuals.symplectic
    );
    println!("  |det L|: {:.12e}", report.residuals.det_l);
    println!(
        "  environment validity margin: {:.12e}",
        report.residuals.env_margin
    );
    Ok(0)
}

#[derive(Serialize)]
struct ComplementReport {
    input: ChannelDoc,
    complement: ChannelDoc,
    cp: bool,
    cp_margin: f64,
}

fn cmd_complement(path: &str, opts: &GlobalOpts) -> Result<u8, Failure> {
    let channel = load_channel(path)?;
    let complement = channel.complementary(opts.tol)?;
    let validity = complement.validate(opts.tol)?;
    let report = ComplementReport {
        input: ChannelDoc::from_channel(&channel),
        complement: ChannelDoc::from_channel(&complement),
        cp: validity.cp,
        cp_margin: validity.cp_margin,
    };

    if opts.json {
        print_json(&report);
        return Ok(0);
    }

    println!(
        "complementary channel: {} -> {} modes",
        complement.modes_in(),
        complement.modes_out()
    );
    print_matrix("K", &complement.k);
    print_vector("l", &complement.l);
    print_matrix("mu", &complement.mu);
    println!(
        "completely positive: {} (margin {:.12e})",
        report.cp, report.cp_margin
    );
    Ok(0)
}

#[derive(Serialize)]
struct DualReport {
    input: ChannelDoc,
    dual: ChannelDoc,
    scale: f64,
}

fn cmd_dual(path: &str, opts: &GlobalOpts) -> Result<u8, Failure> {
    let channel = load_channel(path)?;
    let dual = channel.dual(opts.tol)?;
    let report = DualReport {
        input: ChannelDoc::from_channel(&channel),
        dual: ChannelDoc::from_channel(&dual.channel),
        scale: dual.scale,
    };

    if opts.json {
        print_json(&report);
        return Ok(0);
    }

    println!(
        "dual channel: {} -> {} modes, trace scale {:.12e}",
        dual.channel.modes_in(),
        dual.channel.modes_out(),
        dual.scale
    );
    print_matrix("K", &dual.channel.k);
    print_vector("l", &dual.channel.l);
    print_matrix("mu", &dual.channel.mu);
    Ok(0)
}

fn cmd_apply(
    channel_path: &str,
    state_path: &str,
    out: Option<&str>,
    opts: &GlobalOpts,
) -> Result<u8, Failure> {
    let channel = load_channel(channel_path)?;
    let state = load_state(state_path)?;
    let output = channel.apply(&state)?;
    let doc = StateDoc::from_state(&output);

    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&doc).expect("state serialization cannot fail");
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::input(format!("writing {path}: {e}")))?;
    }

    if opts.json {
        print_json(&doc);
        return Ok(0);
    }

    println!("output state: {} modes", output.modes());
    print_vector("mean", &output.mean);
    print_matrix("covariance", &output.cov);
    println!("validity margin: {:.12e}", output.validity_margin());
    Ok(0)
}

fn cmd_catalog(kind: &str, params: &[f64]) -> Result<u8, Failure> {
    let channel = match (kind, params) {
        ("attenuator", [eta]) => GaussianChannel::attenuator(*eta, 0.0)?,
        ("attenuator", [eta, nbar]) => GaussianChannel::attenuator(*eta, *nbar)?,
        ("amplifier", [gain]) => GaussianChannel::amplifier(*gain, 0.0)?,
        ("amplifier", [gain, nbar]) => GaussianChannel::amplifier(*gain, *nbar)?,
        ("classical-noise", [nu]) => GaussianChannel::classical_noise(*nu)?,
        ("identity", []) => GaussianChannel::identity(1)?,
        ("identity", [modes]) if modes.fract() == 0.0 && *modes >= 1.0 => {
            GaussianChannel::identity(*modes as usize)?
        }
        ("attenuator" | "amplifier" | "classical-noise" | "identity", _) => {
            return Err(Failure::input(format!(
                "wrong parameter count for {kind}: got {}",
                params.len()
            )));
        }
        _ => {
            return Err(Failure::input(format!(
                "unknown catalog channel {kind}; expected attenuator, amplifier, classical-noise, or identity"
            )));
        }
    };
    print_json(&ChannelDoc::from_channel(&channel));
    Ok(0)
}

#[derive(Serialize)]
struct OracleCheck {
    name: String,
    outcome: String,
    value: Option<f64>,
    bound: f64,
}

#[derive(Serialize)]
struct VerifyFockReport {
    input: ChannelDoc,
    checks: Vec<OracleCheck>,
    passed: bool,
}

fn duality_samples() -> Vec<[f64; 2]> {
    let mut samples = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            samples.push([-1.4 + 0.7 * i as f64, -1.4 + 0.7 * j as f64]);
        }
    }
    samples
}

fn cmd_verify_fock(path: &str, opts: &GlobalOpts) -> Result<u8, Failure> {
    let channel = load_channel(path)?;
    if channel.modes_in() != 1 || channel.modes_out() != 1 {
        return Err(Failure::input(format!(
            "the Fock oracle is one-mode only; got a {} -> {} channel",
            channel.modes_in(),
            channel.modes_out()
        )));
    }
    let cfg = FockConfig {
        n_max: opts.nmax,
        extent: opts.grid_extent,
        step: opts.grid_step,
    };
    let mut checks = Vec::new();

    let inputs: [(&str, FockOperator, GaussianState); 2] = [
        (
            "vacuum",
            FockOperator::vacuum(cfg.n_max)?,
            GaussianState::vacuum(),
        ),
        (
            "thermal(1)",
            FockOperator::thermal(1.0, cfg.n_max)?,
            GaussianState::thermal(1.0)?,
        ),
    ];
    for (name, op, gauss) in &inputs {
        let predicted = channel.apply(gauss)?;
        let deviation = verify_apply(&channel, op, &predicted, &cfg)?;
        checks.push(OracleCheck {
            name: format!("apply {name}"),
            outcome: if deviation <= APPLY_BOUND {
                "pass".to_string()
            } else {
                "fail".to_string()
            },
            value: Some(deviation),
            bound: APPLY_BOUND,
        });
    }

    let singular = channel.k.clone().svd(false, false).singular_values;
    if singular.min() > opts.tol * singular.max() {
        let samples = duality_samples();
        for (name, op, _) in &inputs {
            let check = verify_duality(&channel, op, &samples, &cfg, opts.tol)?;
            checks.push(OracleCheck {
                name: format!("duality tau={name}"),
                outcome: if check.max_deviation <= DUALITY_BOUND {
                    "pass".to_string()
                } else {
                    "fail".to_string()
                },
                value: Some(check.max_deviation),
                bound: DUALITY_BOUND,
            });
        }
    } else {
        checks.push(OracleCheck {
            name: "duality".to_string(),
            outcome: "skipped".to_string(),
            value: None,
            bound: DUALITY_BOUND,
        });
    }

    let noise = channel.noise_form(opts.tol);
    let mut worst = f64::INFINITY;
    for set in 0..KERNEL_SETS {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(set));
        let points: Vec<DVector<f64>> = (0..KERNEL_POINTS)
            .map(|_| DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)))
            .collect();
        let min = sample_nonneg_definite(|z| channel.noise_fn(z), &noise.delta_k, &points)?;
        worst = worst.min(min);
    }
    checks.push(OracleCheck {
        name: format!("twisted kernel over {KERNEL_SETS} point sets"),
        outcome: if worst >= KERNEL_BOUND {
            "pass".to_string()
        } else {
            "fail".to_string()
        },
        value: Some(worst),
        bound: KERNEL_BOUND,
    });

    let passed = checks.iter().all(|c| c.outcome != "fail");
    let report = VerifyFockReport {
        input: ChannelDoc::from_channel(&channel),
        checks,
        passed,
    };

    if opts.json {
        print_json(&report);
    } else {
        for check in &report.checks {
            let tag = match check.outcome.as_str() {
                "pass" => "[PASS]",
                "fail" => "[FAIL]",
                _ => "[SKIP]",
            };
            match check.value {
                Some(value) => println!(
                    "{tag} {}: {:.12e} (bound {:.1e})",
                    check.name, value, check.bound
                ),
                None => println!("{tag} {}: K is not invertible", check.name),
            }
        }
        println!(
            "verify-fock: {}",
            if report.passed { "all checks passed" } else { "FAILED" }
        );
    }
    Ok(if report.passed { 0 } else { EXIT_NOT_EXTREME })
}
