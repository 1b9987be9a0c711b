//! Command-line front end.
//!
//! Four subcommands, each driven by a JSON config document plus flag
//! overrides:
//!
//! ```text
//! uonn decompose --config cfg.json [--output PATH]
//! uonn gradcheck --config cfg.json [--threads N]
//! uonn train     --config cfg.json [--seed N] [--output DIR] [--threads N]
//! uonn forward   --config cfg.json
//! ```
//!
//! Exit codes: 0 success, 1 parse error, 2 validation error, 3 gradient
//! check over tolerance, 4 training divergence, 5 forward-mode error.

use clap::{Parser, Subcommand};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use crate::error::{Error, Result};
use crate::field::FieldVec;
use crate::io;
use crate::mesh::{decompose, mesh_unitary, MeshLayout, MeshScheme};
use crate::network::{forward_field, forward_intensity, Network, Observable};
use crate::oracles::{grad_observable_analytic, FdConfig};
use crate::psr::{grad_intensity_psr, GradMethod};
use crate::trainer::{
    loss_eval, make_unitary_task, train, LossSpec, Optimizer, Sample, Target, TrainConfig,
};

#[derive(Parser)]
#[command(name = "uonn", version, about = "MZI-mesh optical network simulator and trainer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the JSON config document for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on concurrent shift evaluations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the config's output path (decompose: layout file;
    /// train: output directory).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a unitary matrix file into a mesh layout file.
    Decompose,
    /// Compare shift-rule, finite-difference, and analytic gradients.
    Gradcheck,
    /// Train a network and write the loss history and final network.
    Train,
    /// Run a forward pass in field or intensity mode.
    Forward,
}

const EXIT_PARSE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_GRADCHECK: u8 = 3;
const EXIT_DIVERGED: u8 = 4;
const EXIT_MODE: u8 = 5;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Parse(_) => EXIT_PARSE,
        Error::Diverged { .. } => EXIT_DIVERGED,
        Error::Mode(_) => EXIT_MODE,
        _ => EXIT_VALIDATION,
    }
}

/// Parse argv, dispatch, and map errors onto the exit-code contract.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // a failure here means a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = dispatch(&cli);
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    let config = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            "--config PATH is required",
        )))?;
    match cli.command {
        Command::Decompose => cmd_decompose(config, cli.output.as_deref()),
        Command::Gradcheck => cmd_gradcheck(config),
        Command::Train => cmd_train(config, cli.seed, cli.output.as_deref()),
        Command::Forward => cmd_forward(config),
    }
}

fn warn_if_not_unit_power(input: &FieldVec) {
    let p = input.power();
    if (p - 1.0).abs() > 1e-9 {
        eprintln!("warning: input field power is {p:.6e}, not 1");
    }
}

// -- decompose ---------------------------------------------------------------

#[derive(Deserialize)]
struct DecomposeConfig {
    input_matrix: PathBuf,
    scheme: String,
    output: PathBuf,
}

fn cmd_decompose(config: &Path, output_override: Option<&Path>) -> Result<u8> {
    let cfg: DecomposeConfig = io::read_json(config)?;
    let scheme = io::scheme_from_name(&cfg.scheme)?;
    let matrix = io::load_matrix(&cfg.input_matrix)?;
    let layout = decompose(scheme, &matrix)?;
    let rebuilt = mesh_unitary(&layout)?;
    let residual = rebuilt.frobenius_distance(&matrix);
    let out = output_override.unwrap_or(&cfg.output);
    io::save_layout(out, &layout)?;
    println!("scheme: {}", io::scheme_name(scheme));
    println!("modes: {}", layout.n_modes());
    println!("roundtrip_residual: {residual:.16e}");
    println!("layout_written: {}", out.display());
    Ok(0)
}

// -- gradcheck ---------------------------------------------------------------

#[derive(Deserialize)]
struct GradcheckConfig {
    network: PathBuf,
    input_field: Vec<[f64; 2]>,
    methods: Vec<String>,
    tolerance: f64,
    /// Observable diagonal; defaults to the first-mode projector.
    observable: Option<Vec<f64>>,
    fd_step: Option<f64>,
}

fn cmd_gradcheck(config: &Path) -> Result<u8> {
    let cfg: GradcheckConfig = io::read_json(config)?;
    if !cfg.tolerance.is_finite() || cfg.tolerance <= 0.0 {
        return Err(Error::InvalidArgument("gradcheck tolerance must be positive".into()));
    }
    let methods = cfg
        .methods
        .iter()
        .map(|m| io::method_from_name(m))
        .collect::<Result<Vec<_>>>()?;
    let net = io::load_network(&cfg.network)?;
    let input = io::field_from_pairs(&cfg.input_field)?;
    warn_if_not_unit_power(&input);
    let obs = match &cfg.observable {
        Some(diag) => Observable::new(diag.clone())?,
        None => Observable::projector(net.n_modes(), 0)?,
    };
    let fd_cfg = match cfg.fd_step {
        Some(h) => FdConfig::with_step(h)?,
        None => FdConfig::default(),
    };
    let params = net.all_params();
    if params.is_empty() {
        println!("gradcheck: ok (network has no trainable parameters)");
        return Ok(0);
    }

    let psr = grad_intensity_psr(&net, &input, &obs, &params)?;
    for e in &psr.entries {
        // the two-point rule budget: the counting evaluator must see
        // exactly two forward passes per parameter
        if e.n_evals != 2 {
            return Err(Error::InvalidArgument(format!(
                "evaluation budget violated: {} evals for one parameter",
                e.n_evals
            )));
        }
    }

    let analytic: Vec<f64> = params
        .iter()
        .map(|p| grad_observable_analytic(&net, &input, &obs, p))
        .collect::<Result<Vec<_>>>()?;

    let want_fd = methods.contains(&GradMethod::FiniteDifference);
    let fd: Vec<f64> = if want_fd {
        let mut out = Vec::with_capacity(params.len());
        for p in &params {
            let mut probe = net.clone();
            let theta = probe.get_phase(p)?;
            let h = fd_cfg.step;
            probe.set_phase(p, theta + h)?;
            let fp = crate::network::measure_observable(&forward_field(&probe, &input)?, &obs)?;
            probe.set_phase(p, theta - h)?;
            let fm = crate::network::measure_observable(&forward_field(&probe, &input)?, &obs)?;
            out.push((fp - fm) / (2.0 * h));
        }
        out
    } else {
        vec![]
    };

    println!("{:<6} {:<7} {:<6} {:>24} {:>24} {:>13}", "layer", "which", "index", "psr", "analytic", "|psr-exact|");
    let mut max_abs = 0.0f64;
    let mut worst = params[0];
    for (k, (p, e)) in params.iter().zip(psr.entries.iter()).enumerate() {
        let (layer, index, which) = io::param_fields(p);
        let v_psr = e.value.as_real().expect("real gradient");
        let v_exact = analytic[k];
        let d = (v_psr - v_exact).abs();
        if d > max_abs {
            max_abs = d;
            worst = *p;
        }
        println!(
            "{layer:<6} {which:<7} {index:<6} {v_psr:>24.16e} {v_exact:>24.16e} {d:>13.3e}"
        );
        if want_fd {
            let dfd = (v_psr - fd[k]).abs();
            println!("{:<6} {:<7} {:<6} {:>24.16e} {:>37}", "", "fd", "", fd[k], format!("|psr-fd| {dfd:.3e}"));
        }
    }
    println!("max_abs_psr_analytic: {max_abs:.16e}");
    println!("tolerance: {:.16e}", cfg.tolerance);

    if max_abs > cfg.tolerance {
        let (layer, index, which) = io::param_fields(&worst);
        eprintln!(
            "gradcheck failed: worst parameter layer {layer} {which} {index} \
             (|psr - analytic| = {max_abs:.3e} > {:.3e})",
            cfg.tolerance
        );
        return Ok(EXIT_GRADCHECK);
    }
    println!("gradcheck: ok");
    Ok(0)
}

// -- train ----------------------------------------------------------------------

#[derive(Deserialize)]
struct GeneratorSpec {
    scheme: String,
    n_modes: usize,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TaskSpec {
    /// Regression onto the output intensities of a hidden random unitary.
    UnitaryMse { n_modes: usize, seed: u64 },
    /// Drive the network unitary toward a target matrix.
    Fidelity { target_matrix: PathBuf },
}

#[derive(Deserialize)]
struct OptimizerDoc {
    kind: String,
    lr: f64,
    beta1: Option<f64>,
    beta2: Option<f64>,
    eps: Option<f64>,
}

#[derive(Deserialize)]
struct TrainCmdConfig {
    network: Option<PathBuf>,
    generator: Option<GeneratorSpec>,
    task: TaskSpec,
    optimizer: OptimizerDoc,
    iterations: usize,
    #[serde(default)]
    batch_size: usize,
    #[serde(default)]
    seed: u64,
    grad_method: String,
    fd_step: Option<f64>,
    output_dir: PathBuf,
}

fn optimizer_from_doc(doc: &OptimizerDoc) -> Result<Optimizer> {
    match doc.kind.as_str() {
        "sgd" => Ok(Optimizer::Sgd { lr: doc.lr }),
        "adam" => Ok(Optimizer::Adam {
            lr: doc.lr,
            beta1: doc.beta1.unwrap_or(0.9),
            beta2: doc.beta2.unwrap_or(0.999),
            eps: doc.eps.unwrap_or(1e-8),
        }),
        other => Err(Error::InvalidArgument(format!(
            "unknown optimizer '{other}' (expected 'sgd' or 'adam')"
        ))),
    }
}

fn cmd_train(config: &Path, seed_override: Option<u64>, output_override: Option<&Path>) -> Result<u8> {
    let cfg: TrainCmdConfig = io::read_json(config)?;

    let mut net = match (&cfg.network, &cfg.generator) {
        (Some(path), _) => io::load_network(path)?,
        (None, Some(g)) => {
            let scheme = io::scheme_from_name(&g.scheme)?;
            let layout = match scheme {
                MeshScheme::Clements => MeshLayout::clements(g.n_modes)?,
                MeshScheme::Reck => MeshLayout::reck(g.n_modes)?,
            };
            Network::single_mesh(layout)
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "train config needs either 'network' or 'generator'".into(),
            ))
        }
    };

    let (dataset, loss): (Vec<Sample>, LossSpec) = match &cfg.task {
        TaskSpec::UnitaryMse { n_modes, seed } => make_unitary_task(*n_modes, *seed)?,
        TaskSpec::Fidelity { target_matrix } => {
            let m = io::load_matrix(target_matrix)?;
            let target = crate::field::UnitaryMatrix::new(m, 1e-8)?;
            let n = target.dim();
            let dataset =
                vec![Sample { input: FieldVec::basis(n, 0)?, target: Target::None }];
            (dataset, LossSpec::UnitaryFidelity { target })
        }
    };

    let train_cfg = TrainConfig {
        optimizer: optimizer_from_doc(&cfg.optimizer)?,
        iterations: cfg.iterations,
        batch_size: cfg.batch_size,
        seed: seed_override.unwrap_or(cfg.seed),
        grad_method: io::method_from_name(&cfg.grad_method)?,
        fd: match cfg.fd_step {
            Some(h) => FdConfig::with_step(h)?,
            None => FdConfig::default(),
        },
    };

    let out_dir = output_override.unwrap_or(&cfg.output_dir);
    std::fs::create_dir_all(out_dir)?;

    let history = train(&mut net, &dataset, &loss, &train_cfg)?;
    io::save_history_csv(&out_dir.join("history.csv"), &history)?;
    io::save_network(&out_dir.join("network.json"), &net)?;

    match history.final_loss() {
        Some(l) => println!("final_loss: {l:.16e}"),
        None => println!("final_loss: n/a (zero iterations)"),
    }
    println!("iterations_run: {}", history.len());
    println!("artifacts_written: {}", out_dir.display());
    // report the loss on the full dataset at the final parameters
    if history.final_loss().is_some() {
        let mut total = 0.0;
        for s in &dataset {
            total += loss_eval(&net, s, &loss)?;
        }
        println!("full_dataset_loss: {:.16e}", total / dataset.len() as f64);
    }
    Ok(0)
}

// -- forward -----------------------------------------------------------------------

#[derive(Deserialize)]
struct ForwardConfig {
    network: PathBuf,
    input_field: Vec<[f64; 2]>,
    mode: String,
}

fn format_field(v: &FieldVec) -> String {
    let parts: Vec<String> = v
        .amps()
        .iter()
        .map(|z| format!("[{:.16e},{:.16e}]", z.re, z.im))
        .collect();
    format!("[{}]", parts.join(","))
}

fn cmd_forward(config: &Path) -> Result<u8> {
    let cfg: ForwardConfig = io::read_json(config)?;
    let net = io::load_network(&cfg.network)?;
    let input = io::field_from_pairs(&cfg.input_field)?;
    warn_if_not_unit_power(&input);
    match cfg.mode.as_str() {
        "field" => {
            let out = forward_field(&net, &input)?;
            println!("{}", format_field(&out));
        }
        "intensity" => {
            let out = forward_intensity(&net, &input)?;
            let parts: Vec<String> = out.vals().iter().map(|v| format!("{v:.16e}")).collect();
            println!("[{}]", parts.join(","));
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown forward mode '{other}' (expected 'field' or 'intensity')"
            )))
        }
    }
    Ok(0)
}
