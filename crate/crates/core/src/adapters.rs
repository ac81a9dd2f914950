//! Subprocess adapters for external ASP solvers.
//!
//! The adapters pipe emitted program text to a solver binary on stdin and
//! parse the standard `Answer:` output convention back into atom sets.
//! Binaries are found through environment variables, never hard-coded, and
//! a missing binary is its own error so callers can skip instead of fail.
//! Exit statuses follow the usual solver convention: 10 and 30 are
//! satisfiable, 20 is unsatisfiable, everything else is a failure.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::htc::Valuation;
use crate::types::{AtomName, GroundAtom, ModelSet, StepAtom, TimeAtom, TimeVar};

pub const ASP_BIN_ENV: &str = "METAC_ASP_BIN";
pub const ASPDC_BIN_ENV: &str = "METAC_ASPDC_BIN";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Plain ASP solver for the propositional backend.
    Asp,
    /// Hybrid solver that understands `&sum` atoms, for the dc backend.
    AspDc,
}

impl SolverKind {
    pub fn env_key(self) -> &'static str {
        match self {
            SolverKind::Asp => ASP_BIN_ENV,
            SolverKind::AspDc => ASPDC_BIN_ENV,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AdapterError {
    #[error("no external solver configured: set {0} to a solver binary")]
    BinaryNotFound(&'static str),
    #[error("external solver timed out after {0}s")]
    Timeout(u64),
    #[error("could not parse solver output ({reason}); raw output follows\n{raw}")]
    ParseFailure { reason: String, raw: String },
    #[error("external solver exited with status {status}\n{stderr}")]
    SolverFailure { status: i32, stderr: String },
    #[error("i/o failure running external solver: {0}")]
    Io(String),
}

/// One solver answer: shown atoms, plus the integer assignment when the
/// solver reports one (hybrid solvers print `t(k)=d` tokens).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExternalModel {
    pub atoms: BTreeSet<GroundAtom>,
    pub timing: Option<Valuation>,
}

/// The configured binary for a solver kind, if any.
pub fn solver_binary(kind: SolverKind) -> Option<PathBuf> {
    std::env::var_os(kind.env_key()).map(PathBuf::from)
}

/// Run the solver configured for `kind` on the given program text.
pub fn run_external(
    kind: SolverKind,
    program_text: &str,
    enumerate_all: bool,
    timeout_s: u64,
) -> Result<ModelSet<ExternalModel>, AdapterError> {
    let binary =
        solver_binary(kind).ok_or_else(|| AdapterError::BinaryNotFound(kind.env_key()))?;
    run_solver(&binary, program_text, enumerate_all, timeout_s)
}

/// Run an explicit solver binary on the given program text. The program is
/// piped to stdin; the model count argument is `0` (all) or `1`.
pub fn run_solver(
    binary: &Path,
    program_text: &str,
    enumerate_all: bool,
    timeout_s: u64,
) -> Result<ModelSet<ExternalModel>, AdapterError> {
    let mut child = Command::new(binary)
        .arg("-")
        .arg(if enumerate_all { "0" } else { "1" })
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| AdapterError::Io(format!("{}: {e}", binary.display())))?;

    // A solver may exit before consuming all of its input, so a failed
    // write is not an error by itself; the exit status decides.
    if let Some(mut stdin) = child.stdin.take() {
        let _ = stdin.write_all(program_text.as_bytes());
    }
    let stdout = capture(child.stdout.take());
    let stderr = capture(child.stderr.take());

    let status = wait_with_timeout(&mut child, timeout_s)?;
    let stdout = stdout.join().unwrap_or_default();
    let stderr = stderr.join().unwrap_or_default();

    match status {
        10 | 30 => parse_answers(&stdout),
        20 => Ok(ModelSet::new(Vec::new())),
        other => Err(AdapterError::SolverFailure { status: other, stderr }),
    }
}

fn capture(pipe: Option<impl Read + Send + 'static>) -> std::thread::JoinHandle<String> {
    std::thread::spawn(move || {
        let mut out = String::new();
        if let Some(mut pipe) = pipe {
            let _ = pipe.read_to_string(&mut out);
        }
        out
    })
}

fn wait_with_timeout(child: &mut Child, timeout_s: u64) -> Result<i32, AdapterError> {
    let start = Instant::now();
    loop {
        match child.try_wait() {
            Ok(Some(status)) => return Ok(status.code().unwrap_or(-1)),
            Ok(None) => {
                if start.elapsed() >= Duration::from_secs(timeout_s) {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(AdapterError::Timeout(timeout_s));
                }
                std::thread::sleep(Duration::from_millis(20));
            }
            Err(e) => return Err(AdapterError::Io(e.to_string())),
        }
    }
}

fn parse_answers(stdout: &str) -> Result<ModelSet<ExternalModel>, AdapterError> {
    let fail = |reason: String| AdapterError::ParseFailure { reason, raw: stdout.to_string() };
    let mut models = Vec::new();
    let mut lines = stdout.lines().peekable();
    while let Some(line) = lines.next() {
        if !line.trim_start().starts_with("Answer:") {
            continue;
        }
        // the atom line directly follows, and is empty for the empty model
        let atom_line = lines
            .next()
            .ok_or_else(|| fail("output ends after an Answer header".to_string()))?;
        let mut atoms = BTreeSet::new();
        let mut timing = Valuation::new();
        let mut has_timing = false;
        for token in atom_line.split_whitespace() {
            match parse_token(token).map_err(|reason| fail(reason))? {
                Token::Atom(a) => {
                    atoms.insert(a);
                }
                Token::Assigned(var, value) => {
                    timing.set_time(var, value);
                    has_timing = true;
                }
            }
        }
        models.push(ExternalModel { atoms, timing: has_timing.then_some(timing) });
    }
    Ok(ModelSet::new(models))
}

enum Token {
    Atom(GroundAtom),
    Assigned(TimeVar, u32),
}

fn parse_token(token: &str) -> Result<Token, String> {
    let bad = |what: &str| format!("{what} in token {token:?}");
    if let Some(rest) = token.strip_prefix("t(") {
        if let Some((step, value)) = rest.strip_suffix(')').and_then(|s| s.split_once(',')) {
            // boolean clock atom t(k,d)
            let step = step.parse().map_err(|_| bad("bad step"))?;
            let value = value.parse().map_err(|_| bad("bad value"))?;
            return Ok(Token::Atom(GroundAtom::Time(TimeAtom { step, value })));
        }
        if let Some((step, value)) = rest.split_once(")=") {
            // integer assignment t(k)=d
            let step = step.parse().map_err(|_| bad("bad step"))?;
            let value = value.parse().map_err(|_| bad("bad assignment"))?;
            return Ok(Token::Assigned(TimeVar { step }, value));
        }
        return Err(bad("unrecognized timing shape"));
    }
    if let Some(inner) = token.strip_prefix("o(").and_then(|s| s.strip_suffix(')')) {
        let split = top_level_rsplit(inner).ok_or_else(|| bad("missing step argument"))?;
        let (name, step) = split;
        let step = step.parse().map_err(|_| bad("bad step"))?;
        let base = parse_name(name).map_err(|e| bad(&e))?;
        return Ok(Token::Atom(GroundAtom::Step(StepAtom { base, step })));
    }
    Err(bad("not an emitted atom"))
}

/// Split `f(x,y),3` at the last top-level comma.
fn top_level_rsplit(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().rev() {
        match c {
            ')' => depth += 1,
            '(' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn parse_name(s: &str) -> Result<AtomName, String> {
    match s.split_once('(') {
        None => AtomName::new(s, Vec::new()).map_err(|e| e.to_string()),
        Some((symbol, rest)) => {
            let inner = rest.strip_suffix(')').ok_or("unbalanced parentheses")?;
            let args = inner.split(',').map(str::to_string).collect();
            AtomName::new(symbol, args).map_err(|e| e.to_string())
        }
    }
}
