//! `metac` — compile, solve, verify, and benchmark metric programs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use metac_core::adapters::{run_external, AdapterError, ExternalModel, SolverKind};
use metac_core::htc::{enumerate_dc_models, HtcError, Valuation};
use metac_core::mht::OracleError;
use metac_core::types::{Backend, GroundProgram, MetricProgram};
use metac_core::verify::{
    bench, crosscheck_bool, crosscheck_dc, random_program, theta, theta_c, CheckConfig,
    GeneratorParams, GeneratorStamp, VerificationReport, VerifyError,
};
use metac_core::{
    compile_bool, compile_dc, emit_asp, emit_dc, emit_json, enumerate_equilibrium_models,
    parse_program, stats, CompileError, EmitError, EnumConfig, HtError,
};

const EXIT_UNSAT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_SOLVER: u8 = 5;

#[derive(Parser)]
#[command(name = "metac", version, about = "Metric program compiler and verification toolkit")]
struct Cli {
    /// Key/value configuration file (solver binaries, caps); environment
    /// variables override it
    #[arg(long, global = true, default_value = "metac.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Bool,
    Dc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Asp,
    Dc,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Internal,
    External,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyBackend {
    Bool,
    Dc,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a metric program and emit solver input
    Compile {
        file: PathBuf,
        #[arg(long)]
        backend: BackendArg,
        #[arg(long)]
        lambda: usize,
        /// Clock bound; required for the bool backend, ignored for dc
        #[arg(long)]
        nu: Option<u32>,
        /// Output format; defaults to the backend's native solver text
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        no_simplify: bool,
        /// Print banned constraint atoms as rule heads in dc output
        #[arg(long, default_value = "on")]
        head_shift: Toggle,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Enumerate models and print them as timed traces
    Solve {
        file: PathBuf,
        #[arg(long)]
        backend: BackendArg,
        #[arg(long)]
        lambda: usize,
        /// Clock bound; required for bool, optional report bound for dc
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long, default_value = "internal")]
        engine: Engine,
        /// Print every model instead of the first
        #[arg(long)]
        all: bool,
        /// External solver timeout in seconds
        #[arg(long, default_value_t = 600)]
        timeout: u64,
    },
    /// Crosscheck the compiled pipelines against the reference semantics
    Verify {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        file: Option<PathBuf>,
        /// Check this many generated programs instead of a file
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        nu: u32,
        #[arg(long, default_value = "both")]
        backend: VerifyBackend,
        #[arg(long)]
        json: bool,
    },
    /// Print compilation size counters
    Stats {
        file: PathBuf,
        #[arg(long)]
        backend: BackendArg,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Compile a corpus directory at several duration scales
    Bench {
        corpus_dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
        scales: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        lambda: usize,
        #[arg(long, default_value_t = 110)]
        base_nu: u32,
        #[arg(long)]
        json: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<HtError> for Failure {
    fn from(e: HtError) -> Self {
        let code = match e {
            HtError::AtomCapExceeded { .. } => EXIT_CAP,
            HtError::NotBoolean => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<HtcError> for Failure {
    fn from(e: HtcError) -> Self {
        match e {
            HtcError::VarCapExceeded { .. } => Failure { code: EXIT_CAP, message: e.to_string() },
            HtcError::Bool(inner) => inner.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::AlphabetTooLarge(..) => EXIT_CAP,
            OracleError::ZeroLength => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<EmitError> for Failure {
    fn from(e: EmitError) -> Self {
        match e {
            EmitError::ExpectedBool | EmitError::ExpectedDc => Failure::usage(e.to_string()),
            EmitError::Json(_) => Failure::input(e.to_string()),
        }
    }
}

impl From<AdapterError> for Failure {
    fn from(e: AdapterError) -> Self {
        Failure { code: EXIT_SOLVER, message: e.to_string() }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Oracle(inner) => inner.into(),
            VerifyError::Compile(inner) => inner.into(),
            VerifyError::Solver(inner) => inner.into(),
            VerifyError::Constraint(inner) => inner.into(),
        }
    }
}

/// Caps and solver paths from `metac.toml`, all optional.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    solvers: SolverPaths,
    #[serde(default)]
    caps: Caps,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverPaths {
    asp_bin: Option<String>,
    asp_dc_bin: Option<String>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Caps {
    atom_cap: Option<usize>,
    var_cap: Option<usize>,
}

fn load_config(path: &Path) -> Result<CheckConfig, Failure> {
    let file: FileConfig = match fs::read_to_string(path) {
        Ok(text) => toml::from_str(&text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => FileConfig::default(),
        Err(e) => return Err(Failure::input(format!("{}: {e}", path.display()))),
    };
    for (value, key) in [
        (&file.solvers.asp_bin, metac_core::adapters::ASP_BIN_ENV),
        (&file.solvers.asp_dc_bin, metac_core::adapters::ASPDC_BIN_ENV),
    ] {
        if let Some(bin) = value {
            if std::env::var_os(key).is_none() {
                std::env::set_var(key, bin);
            }
        }
    }
    let defaults = CheckConfig::default();
    let env_cap = |key: &str| -> Result<Option<usize>, Failure> {
        match std::env::var(key) {
            Ok(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::input(format!("{key} must be an integer, got {v:?}"))),
            Err(_) => Ok(None),
        }
    };
    Ok(CheckConfig {
        atom_cap: env_cap("METAC_ATOM_CAP")?
            .or(file.caps.atom_cap)
            .unwrap_or(defaults.atom_cap),
        var_cap: env_cap("METAC_VAR_CAP")?.or(file.caps.var_cap).unwrap_or(defaults.var_cap),
    })
}

fn read_program(path: &Path) -> Result<MetricProgram, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    match parse_program(&text) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{}: {w}", path.display());
            }
            Ok(outcome.program)
        }
        Err(diags) => {
            let lines: Vec<String> =
                diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
            Err(Failure::input(lines.join("\n")))
        }
    }
}

fn compile(
    p: &MetricProgram,
    backend: BackendArg,
    lambda: usize,
    nu: Option<u32>,
    simplify: bool,
    command: &str,
) -> Result<GroundProgram, Failure> {
    match backend {
        BackendArg::Bool => {
            let nu = nu.ok_or_else(|| {
                Failure::usage("--backend bool needs --nu: the clock program is finite only with a bound")
            })?;
            Ok(compile_bool(p, lambda, nu, simplify)?)
        }
        BackendArg::Dc => {
            if nu.is_some() && command == "compile" {
                eprintln!("warning: --nu is ignored for the dc backend; its clock is unbounded");
            }
            Ok(compile_dc(p, lambda, simplify)?)
        }
    }
}

fn render_external(m: &ExternalModel, backend: BackendArg, lambda: usize) -> String {
    let trace = match backend {
        BackendArg::Bool => theta(&m.atoms, &m.atoms, lambda),
        BackendArg::Dc => {
            let mut v = m.timing.clone().unwrap_or_else(Valuation::new);
            for a in &m.atoms {
                if let metac_core::types::GroundAtom::Step(s) = a {
                    v.set_bool(s.clone());
                }
            }
            theta_c(&v, &v, lambda)
        }
    };
    match trace {
        Some(t) => t.to_string(),
        None => {
            // not in the compiled image; show the raw answer
            let atoms: Vec<String> = m.atoms.iter().map(|a| a.to_string()).collect();
            format!("{{{}}}\n", atoms.join(", "))
        }
    }
}

fn print_models(rendered: &[String], all: bool) -> u8 {
    if rendered.is_empty() {
        println!("UNSATISFIABLE");
        return EXIT_UNSAT;
    }
    let shown = if all { rendered } else { &rendered[..1] };
    for (i, m) in shown.iter().enumerate() {
        println!("model {}:", i + 1);
        print!("{m}");
    }
    println!("{} model{}", rendered.len(), if rendered.len() == 1 { "" } else { "s" });
    0
}

fn solve(
    p: &MetricProgram,
    backend: BackendArg,
    lambda: usize,
    nu: Option<u32>,
    engine: Engine,
    all: bool,
    timeout: u64,
    caps: CheckConfig,
) -> Result<u8, Failure> {
    let rendered: Vec<String> = match engine {
        Engine::Internal => match backend {
            BackendArg::Bool => {
                let compiled = compile(p, backend, lambda, nu, true, "solve")?;
                let models =
                    enumerate_equilibrium_models(&compiled, EnumConfig { atom_cap: caps.atom_cap })?;
                models
                    .iter()
                    .map(|m| match theta(m, m, lambda) {
                        Some(t) => t.to_string(),
                        None => unreachable!("compiled models are timed"),
                    })
                    .collect()
            }
            BackendArg::Dc => {
                let compiled = compile(p, backend, lambda, None, true, "solve")?;
                let models =
                    enumerate_dc_models(&compiled, nu, EnumConfig { atom_cap: caps.atom_cap })?;
                models
                    .iter()
                    .map(|m| {
                        let v = m.as_valuation();
                        match theta_c(&v, &v, lambda) {
                            Some(t) => t.to_string(),
                            None => unreachable!("compiled models are timed"),
                        }
                    })
                    .collect()
            }
        },
        Engine::External => {
            let (kind, text) = match backend {
                BackendArg::Bool => {
                    let compiled = compile(p, backend, lambda, nu, true, "solve")?;
                    (SolverKind::Asp, emit_asp(&compiled)?)
                }
                BackendArg::Dc => {
                    let compiled = compile(p, backend, lambda, None, true, "solve")?;
                    let mut text = emit_dc(&compiled, true)?;
                    if let Some(nu) = nu {
                        // report bound: cap the final clock value
                        text.push_str(&format!("&sum{{t({})}} <= {nu}.\n", lambda - 1));
                    }
                    (SolverKind::AspDc, text)
                }
            };
            let models = run_external(kind, &text, all, timeout)?;
            models.iter().map(|m| render_external(m, backend, lambda)).collect()
        }
    };
    Ok(print_models(&rendered, all))
}

fn verify(
    file: Option<PathBuf>,
    random: Option<usize>,
    seed: Option<u64>,
    lambda: usize,
    nu: u32,
    backend: VerifyBackend,
    json: bool,
    caps: CheckConfig,
) -> Result<u8, Failure> {
    let params = GeneratorParams::default();
    let programs: Vec<(String, MetricProgram, Option<GeneratorStamp>)> = match (&file, random) {
        (Some(path), _) => vec![(path.display().to_string(), read_program(path)?, None)],
        (None, Some(n)) => {
            let seed = seed.expect("clap enforces --seed with --random");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|index| {
                    let p = random_program(&mut rng, &params);
                    (format!("random[{index}]"), p, Some(GeneratorStamp { seed, index, params }))
                })
                .collect()
        }
        (None, None) => unreachable!("clap enforces file or --random"),
    };
    let backends: &[Backend] = match backend {
        VerifyBackend::Bool => &[Backend::Bool],
        VerifyBackend::Dc => &[Backend::Dc],
        VerifyBackend::Both => &[Backend::Bool, Backend::Dc],
    };
    let mut reports: Vec<(String, VerificationReport)> = Vec::new();
    for (label, program, stamp) in &programs {
        for b in backends {
            let mut report = match b {
                Backend::Bool => crosscheck_bool(program, lambda, nu, caps)?,
                Backend::Dc => crosscheck_dc(program, lambda, nu, caps)?,
            };
            report.generator = *stamp;
            reports.push((label.clone(), report));
        }
    }
    let failed = reports.iter().filter(|(_, r)| !r.passed()).count();
    if json {
        let body: Vec<&VerificationReport> = reports.iter().map(|(_, r)| r).collect();
        println!("{}", serde_json::to_string_pretty(&body).expect("report serialization"));
    } else {
        for (label, report) in &reports {
            if report.passed() {
                println!(
                    "{label} {}: PASS — oracle {}, solver {}",
                    report.backend, report.oracle_models, report.solver_models
                );
            } else {
                println!("{label}:");
                println!("{report}");
            }
        }
        let total = reports.len();
        println!("{}/{} checks passed", total - failed, total);
    }
    Ok(if failed == 0 { 0 } else { EXIT_UNSAT })
}

fn run_bench(
    dir: &Path,
    scales: &[u32],
    lambda: usize,
    base_nu: u32,
    json: bool,
) -> Result<u8, Failure> {
    let mut entries = Vec::new();
    let listing =
        fs::read_dir(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    for entry in listing {
        let path = entry.map_err(|e| Failure::input(e.to_string()))?.path();
        if path.extension().is_some_and(|ext| ext == "mlp") {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            entries.push((name, path));
        }
    }
    entries.sort();
    let mut corpus = Vec::with_capacity(entries.len());
    for (name, path) in entries {
        corpus.push((name, read_program(&path)?));
    }
    let report = bench(&corpus, scales, lambda, base_nu)?;
    if json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let caps = load_config(&cli.config)?;
    match cli.command {
        Command::Compile { file, backend, lambda, nu, format, no_simplify, head_shift, out } => {
            let program = read_program(&file)?;
            let compiled = compile(&program, backend, lambda, nu, !no_simplify, "compile")?;
            let format = format.unwrap_or(match backend {
                BackendArg::Bool => Format::Asp,
                BackendArg::Dc => Format::Dc,
            });
            let text = match format {
                Format::Asp => emit_asp(&compiled)?,
                Format::Dc => emit_dc(&compiled, head_shift == Toggle::On)?,
                Format::Json => emit_json(&compiled),
            };
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Solve { file, backend, lambda, nu, engine, all, timeout } => {
            let program = read_program(&file)?;
            solve(&program, backend, lambda, nu, engine, all, timeout, caps)
        }
        Command::Verify { file, random, seed, lambda, nu, backend, json } => {
            verify(file, random, seed, lambda, nu, backend, json, caps)
        }
        Command::Stats { file, backend, lambda, nu, json } => {
            let program = read_program(&file)?;
            let compiled = compile(&program, backend, lambda, nu, true, "stats")?;
            let report = stats(&compiled);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serialization"));
            } else {
                println!("backend: {}", report.backend);
                println!("rules: {}", report.rules);
                println!(
                    "generated: core {} + timing {} + constraints {} = {}",
                    report.generated.core,
                    report.generated.timing,
                    report.generated.constraints,
                    report.generated.total()
                );
                println!(
                    "kept: core {} + timing {} + constraints {} = {}",
                    report.kept.core,
                    report.kept.timing,
                    report.kept.constraints,
                    report.kept.total()
                );
                println!(
                    "atoms: step {} + clock {} + constraint {}",
                    report.step_atoms, report.tbool_atoms, report.constraint_atoms
                );
            }
            Ok(0)
        }
        Command::Bench { corpus_dir, scales, lambda, base_nu, json } => {
            run_bench(&corpus_dir, &scales, lambda, base_nu, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
