//! Cross-pipeline verification and benchmarking.
//!
//! A compiled program's models carry the timing as clock atoms (`t(k,d)`)
//! or integer variables (`t(k)`), while the reference semantics carries it
//! as a function on steps. The conversions in this module translate between
//! the two shapes; the `crosscheck_*` drivers compute a program's models on
//! both sides independently and compare through them, so a defect in either
//! pipeline surfaces as a set difference reported in the input's own
//! syntax. `bench` is the scaling harness for the compile pipelines.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::compile::{unroll, CompileContext, CompileError};
use crate::ht::{
    enumerate_equilibrium_models, satisfies_program, EnumConfig, HtError, DEFAULT_ATOM_CAP,
};
use crate::htc::{
    enumerate_constraint_equilibrium_models_bounded, enumerate_dc_models, htc_satisfies_program,
    HtcConfig, HtcError, Valuation, DEFAULT_VAR_CAP,
};
use crate::mht::{enumerate_timings, metric_equilibrium_models, OracleError};
use crate::timing_bool::{self, compile_bool, count_constraint_rules};
use crate::timing_dc::{self, compile_dc};
use crate::types::{
    AtomName, Backend, BodyAtom, GroundAtom, GroundProgram, Interval, Literal, MetricProgram,
    MetricRule, RuleHead, StepAtom, TimeAtom, TimeVar, TimedTrace, TimingFunction,
};

#[derive(Error, Debug)]
pub enum VerifyError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Solver(#[from] HtError),
    #[error(transparent)]
    Constraint(#[from] HtcError),
}

/// Caps forwarded to the exhaustive solvers.
#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub atom_cap: usize,
    pub var_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { atom_cap: DEFAULT_ATOM_CAP, var_cap: DEFAULT_VAR_CAP }
    }
}

/// Extract the timing function from a set of ground atoms: exactly one
/// clock atom per step below `lambda`, none elsewhere, and the values must
/// be anchored at zero and strictly increasing.
pub fn is_timed_bool(atoms: &BTreeSet<GroundAtom>, lambda: usize) -> Option<TimingFunction> {
    let mut per_step: Vec<Option<u32>> = vec![None; lambda];
    for a in atoms {
        if let GroundAtom::Time(t) = a {
            if t.step >= lambda || per_step[t.step].is_some() {
                return None;
            }
            per_step[t.step] = Some(t.value);
        }
    }
    let values: Option<Vec<u32>> = per_step.into_iter().collect();
    TimingFunction::new(values?).ok()
}

/// Extract the timing function from a valuation: the time variables defined
/// must be exactly those below `lambda`, anchored and strictly increasing.
pub fn is_timed_valuation(v: &Valuation, lambda: usize) -> Option<TimingFunction> {
    let mut per_step: Vec<Option<u32>> = vec![None; lambda];
    for (var, value) in v.times() {
        if var.step >= lambda {
            return None;
        }
        per_step[var.step] = Some(value);
    }
    let values: Option<Vec<u32>> = per_step.into_iter().collect();
    TimingFunction::new(values?).ok()
}

/// Map a timed trace to the interpretation pair of its compiled image: the
/// here- and there-worlds of step atoms, with the clock atoms of the
/// trace's timing added to both.
pub fn sigma(m: &TimedTrace) -> (BTreeSet<GroundAtom>, BTreeSet<GroundAtom>) {
    let mut here = BTreeSet::new();
    let mut there = BTreeSet::new();
    for k in 0..m.len() {
        for a in m.here(k) {
            here.insert(GroundAtom::step(a.clone(), k));
        }
        for a in m.there(k) {
            there.insert(GroundAtom::step(a.clone(), k));
        }
        let clock = GroundAtom::Time(TimeAtom { step: k, value: m.timing().at(k) });
        here.insert(clock.clone());
        there.insert(clock);
    }
    (here, there)
}

/// Inverse of `sigma`: split step atoms back into per-step sets and read
/// the timing off the clock atoms. Returns nothing unless both sides are
/// timed with the same timing and every step atom lies below `lambda`.
pub fn theta(
    here: &BTreeSet<GroundAtom>,
    there: &BTreeSet<GroundAtom>,
    lambda: usize,
) -> Option<TimedTrace> {
    let tau = is_timed_bool(there, lambda)?;
    if is_timed_bool(here, lambda) != Some(tau.clone()) {
        return None;
    }
    let mut h: Vec<BTreeSet<AtomName>> = vec![BTreeSet::new(); lambda];
    let mut t: Vec<BTreeSet<AtomName>> = vec![BTreeSet::new(); lambda];
    for (src, dst) in [(here, &mut h), (there, &mut t)] {
        for a in src {
            match a {
                GroundAtom::Step(s) => {
                    if s.step >= lambda {
                        return None;
                    }
                    dst[s.step].insert(s.base.clone());
                }
                GroundAtom::Time(_) => {}
                _ => return None,
            }
        }
    }
    TimedTrace::new(h, t, tau).ok()
}

/// Map a timed trace to the valuation pair of its constraint image: step
/// atoms become true booleans, the timing becomes integer assignments to
/// the time variables, in both worlds.
pub fn sigma_c(m: &TimedTrace) -> (Valuation, Valuation) {
    let mut here = Valuation::new();
    let mut there = Valuation::new();
    for k in 0..m.len() {
        for a in m.here(k) {
            here.set_bool(StepAtom { base: a.clone(), step: k });
        }
        for a in m.there(k) {
            there.set_bool(StepAtom { base: a.clone(), step: k });
        }
        here.set_time(TimeVar { step: k }, m.timing().at(k));
        there.set_time(TimeVar { step: k }, m.timing().at(k));
    }
    (here, there)
}

/// Inverse of `sigma_c`, with the same rejection rules as `theta`.
pub fn theta_c(here: &Valuation, there: &Valuation, lambda: usize) -> Option<TimedTrace> {
    let tau = is_timed_valuation(there, lambda)?;
    if is_timed_valuation(here, lambda) != Some(tau.clone()) {
        return None;
    }
    let mut h: Vec<BTreeSet<AtomName>> = vec![BTreeSet::new(); lambda];
    let mut t: Vec<BTreeSet<AtomName>> = vec![BTreeSet::new(); lambda];
    for (src, dst) in [(here, &mut h), (there, &mut t)] {
        for s in src.bools() {
            if s.step >= lambda {
                return None;
            }
            dst[s.step].insert(s.base.clone());
        }
    }
    TimedTrace::new(h, t, tau).ok()
}

/// Knobs of the random program generator. The alphabet is drawn from single
/// letters, so `max_atoms` is capped at 26 in practice; interval endpoints
/// never exceed `max_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorParams {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_bound: u32,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams { max_atoms: 3, max_rules: 4, max_bound: 3 }
    }
}

/// Where a checked program came from, so a failure replays exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorStamp {
    pub seed: u64,
    pub index: usize,
    pub params: GeneratorParams,
}

/// Draw a random metric program. Every rule shape the grammar offers comes
/// up: facts, disjunctions with occasional head negation, constraints, and
/// metric next heads with bounded or unbounded intervals; bodies mix plain
/// and negated atoms with the two position markers.
pub fn random_program<R: Rng>(rng: &mut R, params: &GeneratorParams) -> MetricProgram {
    let letters = ["a", "b", "c", "d", "e", "f"];
    let atoms: Vec<AtomName> = letters
        .iter()
        .take(params.max_atoms.clamp(1, letters.len()))
        .map(|s| AtomName::prop(s))
        .collect();
    let pick = |rng: &mut R| atoms[rng.gen_range(0..atoms.len())].clone();
    let n_rules = rng.gen_range(1..=params.max_rules.max(1));
    let mut rules = Vec::with_capacity(n_rules);
    for _ in 0..n_rules {
        let body_len = rng.gen_range(0..=2usize);
        let head = match rng.gen_range(0..6u8) {
            0 => RuleHead::Disjunction(Vec::new()),
            1 | 2 => {
                let mut lits = Vec::new();
                for _ in 0..rng.gen_range(1..=2usize) {
                    let atom = pick(rng);
                    if rng.gen_ratio(1, 5) {
                        lits.push(Literal::neg(atom));
                    } else {
                        lits.push(Literal::pos(atom));
                    }
                }
                RuleHead::Disjunction(lits)
            }
            _ => {
                let interval = if params.max_bound == 0 || rng.gen_ratio(1, 4) {
                    Interval { lower: rng.gen_range(0..=params.max_bound), upper: None }
                } else {
                    let lower = rng.gen_range(0..params.max_bound);
                    let upper = rng.gen_range(lower + 1..=params.max_bound);
                    Interval::bounded(lower, upper)
                };
                RuleHead::MetricNext(interval, pick(rng))
            }
        };
        let body_len =
            if head == RuleHead::Disjunction(Vec::new()) { body_len.max(1) } else { body_len };
        let mut body = Vec::new();
        for _ in 0..body_len {
            let atom = match rng.gen_range(0..10u8) {
                0 => BodyAtom::Initial,
                1 => BodyAtom::Final,
                _ => BodyAtom::Atom(pick(rng)),
            };
            if rng.gen_ratio(1, 3) {
                body.push(Literal::neg(atom));
            } else {
                body.push(Literal::pos(atom));
            }
        }
        rules.push(MetricRule { head, body });
    }
    MetricProgram { rules }
}

/// One model-set difference, rendered for the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub side: &'static str,
    pub model: String,
}

pub const REPORT_FORMAT: &str = "metac-verify";
pub const REPORT_VERSION: u32 = 1;

/// Outcome of one cross-pipeline check. `mismatches` counts every
/// difference found; `counterexamples` keeps the first three, rendered in
/// the input's surface syntax where a trace shape exists.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub format: &'static str,
    pub version: u32,
    pub backend: Backend,
    pub lambda: usize,
    pub nu: u32,
    pub program: String,
    pub oracle_models: usize,
    pub solver_models: usize,
    pub mismatches: usize,
    pub counterexamples: Vec<Counterexample>,
    pub generator: Option<GeneratorStamp>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {} pipeline", self.backend)?;
        writeln!(f, "lambda: {}  nu: {}", self.lambda, self.nu)?;
        if let Some(g) = &self.generator {
            writeln!(f, "generated: seed {} index {}", g.seed, g.index)?;
        }
        writeln!(f, "oracle models: {}", self.oracle_models)?;
        writeln!(f, "solver models: {}", self.solver_models)?;
        for ce in &self.counterexamples {
            writeln!(f, "{}:", ce.side)?;
            for line in ce.model.lines() {
                writeln!(f, "  {line}")?;
            }
        }
        if self.mismatches > self.counterexamples.len() {
            writeln!(f, "... and {} more", self.mismatches - self.counterexamples.len())?;
        }
        write!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

struct Differences {
    count: usize,
    shown: Vec<Counterexample>,
}

impl Differences {
    fn new() -> Self {
        Differences { count: 0, shown: Vec::new() }
    }

    fn note(&mut self, side: &'static str, model: String) {
        self.count += 1;
        if self.shown.len() < 3 {
            self.shown.push(Counterexample { side, model });
        }
    }
}

fn render_atom_set(atoms: &BTreeSet<GroundAtom>) -> String {
    let inner: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

/// Check the propositional pipeline against the reference semantics: the
/// oracle's models mapped through `sigma` must be exactly the solver's
/// models of the compiled program, and the solver's models must map back
/// through `theta` onto the oracle's.
pub fn crosscheck_bool(
    p: &MetricProgram,
    lambda: usize,
    nu: u32,
    config: CheckConfig,
) -> Result<VerificationReport, VerifyError> {
    let oracle = metric_equilibrium_models(p, lambda, nu)?;
    let compiled = compile_bool(p, lambda, nu, true)?;
    let solver =
        enumerate_equilibrium_models(&compiled, EnumConfig { atom_cap: config.atom_cap })?;

    let solver_set: BTreeSet<&BTreeSet<GroundAtom>> = solver.iter().collect();
    let mapped: BTreeSet<BTreeSet<GroundAtom>> = oracle.iter().map(|m| sigma(m).1).collect();
    let oracle_set: BTreeSet<&TimedTrace> = oracle.iter().collect();

    let mut diff = Differences::new();
    for m in &oracle {
        if !solver_set.contains(&sigma(m).1) {
            diff.note("oracle model missed by the solver", m.to_string());
        }
    }
    for s in &solver {
        if !mapped.contains(s) {
            match theta(s, s, lambda) {
                Some(trace) => diff.note("solver model outside the oracle set", trace.to_string()),
                None => diff.note("solver model is not timed", render_atom_set(s)),
            }
        } else {
            // mapped back, the model must land on an oracle trace
            let trace = theta(s, s, lambda);
            if trace.as_ref().map_or(true, |t| !oracle_set.contains(t)) {
                diff.note(
                    "solver model does not map back",
                    trace.map_or_else(|| render_atom_set(s), |t| t.to_string()),
                );
            }
        }
    }

    Ok(VerificationReport {
        format: REPORT_FORMAT,
        version: REPORT_VERSION,
        backend: Backend::Bool,
        lambda,
        nu,
        program: p.to_string(),
        oracle_models: oracle.len(),
        solver_models: solver.len(),
        mismatches: diff.count,
        counterexamples: diff.shown,
        generator: None,
    })
}

/// Check the constraint pipeline: the oracle versus the bounded two-world
/// enumerator through `sigma_c`/`theta_c`, and the practical enumerator
/// versus the bounded one on identical valuations.
pub fn crosscheck_dc(
    p: &MetricProgram,
    lambda: usize,
    nu: u32,
    config: CheckConfig,
) -> Result<VerificationReport, VerifyError> {
    let oracle = metric_equilibrium_models(p, lambda, nu)?;
    let compiled = compile_dc(p, lambda, true)?;
    let bounded = enumerate_constraint_equilibrium_models_bounded(
        &compiled,
        nu,
        HtcConfig { var_cap: config.var_cap },
    )?;
    let practical =
        enumerate_dc_models(&compiled, Some(nu), EnumConfig { atom_cap: config.atom_cap })?;

    let bounded_set: BTreeSet<&Valuation> = bounded.iter().collect();
    let mapped: BTreeSet<Valuation> = oracle.iter().map(|m| sigma_c(m).1).collect();
    let oracle_set: BTreeSet<&TimedTrace> = oracle.iter().collect();

    let mut diff = Differences::new();
    for m in &oracle {
        if !bounded_set.contains(&sigma_c(m).1) {
            diff.note("oracle model missed by the checker", m.to_string());
        }
    }
    for v in &bounded {
        if !mapped.contains(v) {
            match theta_c(v, v, lambda) {
                Some(trace) => {
                    diff.note("checker model outside the oracle set", trace.to_string())
                }
                None => diff.note("checker model is not timed", v.to_string()),
            }
        } else {
            let trace = theta_c(v, v, lambda);
            if trace.as_ref().map_or(true, |t| !oracle_set.contains(t)) {
                diff.note(
                    "checker model does not map back",
                    trace.map_or_else(|| v.to_string(), |t| t.to_string()),
                );
            }
        }
    }
    let practical_set: BTreeSet<Valuation> =
        practical.iter().map(|m| m.as_valuation()).collect();
    for v in &bounded {
        if !practical_set.contains(v) {
            diff.note("solver missed a checker model", v.to_string());
        }
    }
    for v in &practical_set {
        if !bounded_set.contains(v) {
            diff.note("solver model outside the checker set", v.to_string());
        }
    }

    Ok(VerificationReport {
        format: REPORT_FORMAT,
        version: REPORT_VERSION,
        backend: Backend::Dc,
        lambda,
        nu,
        program: p.to_string(),
        oracle_models: oracle.len(),
        solver_models: bounded.len(),
        mismatches: diff.count,
        counterexamples: diff.shown,
        generator: None,
    })
}

/// Run a crosscheck over many programs in parallel, one report each, in
/// input order. The first error in input order wins.
pub fn crosscheck_many(
    programs: &[MetricProgram],
    lambda: usize,
    nu: u32,
    backend: Backend,
    config: CheckConfig,
) -> Result<Vec<VerificationReport>, VerifyError> {
    if programs.is_empty() {
        return Ok(Vec::new());
    }
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(programs.len());
    let mut slots: Vec<Option<Result<VerificationReport, VerifyError>>> =
        (0..programs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut i = w;
                while i < programs.len() {
                    let r = match backend {
                        Backend::Bool => crosscheck_bool(&programs[i], lambda, nu, config),
                        Backend::Dc => crosscheck_dc(&programs[i], lambda, nu, config),
                    };
                    out.push((i, r));
                    i += workers;
                }
                out
            }));
        }
        for h in handles {
            for (i, r) in h.join().expect("verification worker") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every index visited")).collect()
}

/// The clock program alone must have exactly the valid timings as models.
pub fn delta_bool_models_are_timings(lambda: usize, nu: u32) -> Result<(), String> {
    let mut prog = GroundProgram::new(Backend::Bool);
    prog.rules = timing_bool::timing_rules(lambda, nu).map_err(|e| e.to_string())?;
    let models = enumerate_equilibrium_models(&prog, EnumConfig { atom_cap: 40 })
        .map_err(|e| e.to_string())?;
    let timings = enumerate_timings(lambda, nu);
    if models.len() != timings.len() {
        return Err(format!(
            "lambda={lambda} nu={nu}: {} models vs {} timings",
            models.len(),
            timings.len()
        ));
    }
    for m in &models {
        let tau = is_timed_bool(m, lambda)
            .ok_or_else(|| format!("model {} is not timed", render_atom_set(m)))?;
        if m.len() != lambda {
            return Err(format!("model {} has non-clock atoms", render_atom_set(m)));
        }
        if !timings.contains(&tau) {
            return Err(format!("timing {tau} out of range"));
        }
    }
    Ok(())
}

/// Every timed interpretation satisfies the clock program whose bound is
/// its own final value, whatever its step atoms are.
pub fn timed_interpretations_satisfy_delta<R: Rng>(
    rng: &mut R,
    lambda: usize,
    samples: usize,
) -> Result<(), String> {
    let letters = [AtomName::prop("a"), AtomName::prop("b")];
    for _ in 0..samples {
        let mut values = vec![0u32];
        for _ in 1..lambda {
            values.push(values.last().unwrap() + rng.gen_range(1..=3));
        }
        let tau = TimingFunction::new(values).expect("increasing by construction");
        let nu = tau.at(lambda - 1);
        let mut here: BTreeSet<GroundAtom> = BTreeSet::new();
        let mut there: BTreeSet<GroundAtom> = BTreeSet::new();
        for k in 0..lambda {
            let clock = GroundAtom::Time(TimeAtom { step: k, value: tau.at(k) });
            here.insert(clock.clone());
            there.insert(clock);
            for a in &letters {
                if rng.gen_bool(0.5) {
                    there.insert(GroundAtom::step(a.clone(), k));
                    if rng.gen_bool(0.5) {
                        here.insert(GroundAtom::step(a.clone(), k));
                    }
                }
            }
        }
        let mut prog = GroundProgram::new(Backend::Bool);
        prog.rules = timing_bool::timing_rules(lambda, nu).map_err(|e| e.to_string())?;
        if !satisfies_program(&here, &there, &prog) {
            return Err(format!("timed pair with tau {tau} fails its own clock program"));
        }
    }
    Ok(())
}

/// Two-world satisfaction of the difference-constraint clock program is
/// exactly timedness: both worlds defined on all time variables, equal,
/// anchored and increasing. Checked by exhausting every pair of partial
/// assignments over `{0..nu}`.
pub fn delta_dc_satisfaction_is_timedness(lambda: usize, nu: u32) -> Result<(), String> {
    let mut prog = GroundProgram::new(Backend::Dc);
    prog.rules = timing_dc::timing_rules(lambda).map_err(|e| e.to_string())?;
    let vars: Vec<TimeVar> = (0..lambda).map(|step| TimeVar { step }).collect();
    // every there-assignment: each var undefined or a value in 0..=nu
    let choices = (nu + 2) as usize;
    let total = choices.pow(lambda as u32);
    for code in 0..total {
        let mut c = code;
        let mut there = Valuation::new();
        let mut defined: Vec<Option<u32>> = Vec::new();
        for var in &vars {
            let pick = c % choices;
            c /= choices;
            if pick == 0 {
                defined.push(None);
            } else {
                there.set_time(*var, (pick - 1) as u32);
                defined.push(Some((pick - 1) as u32));
            }
        }
        // every here below it: each defined var kept or dropped
        let kept: Vec<usize> = (0..lambda).filter(|&i| defined[i].is_some()).collect();
        for mask in 0..1usize << kept.len() {
            let mut here = Valuation::new();
            for (j, &i) in kept.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    here.set_time(vars[i], defined[i].unwrap());
                }
            }
            let sat = htc_satisfies_program(&here, &there, &prog);
            let timed = is_timed_valuation(&there, lambda).is_some()
                && is_timed_valuation(&here, lambda) == is_timed_valuation(&there, lambda);
            if sat != timed {
                return Err(format!(
                    "pair ({here}, {there}) satisfaction {sat} but timedness {timed}"
                ));
            }
        }
    }
    Ok(())
}

/// The difference-constraint clock program alone has exactly the valid
/// timings with values up to `nu` as its bounded equilibrium models.
pub fn delta_dc_equilibrium_models_are_timings(lambda: usize, nu: u32) -> Result<(), String> {
    let mut prog = GroundProgram::new(Backend::Dc);
    prog.rules = timing_dc::timing_rules(lambda).map_err(|e| e.to_string())?;
    let models =
        enumerate_constraint_equilibrium_models_bounded(&prog, nu, HtcConfig::default())
            .map_err(|e| e.to_string())?;
    let timings = enumerate_timings(lambda, nu);
    if models.len() != timings.len() {
        return Err(format!(
            "lambda={lambda} nu={nu}: {} models vs {} timings",
            models.len(),
            timings.len()
        ));
    }
    for v in &models {
        if v.bools().next().is_some() {
            return Err(format!("model {v} has boolean assignments"));
        }
        let tau = is_timed_valuation(v, lambda).ok_or_else(|| format!("model {v} not timed"))?;
        if !timings.contains(&tau) {
            return Err(format!("timing {tau} out of range"));
        }
    }
    Ok(())
}

/// Multiply every metric interval's lower bound, keeping its width, so a
/// program's durations scale without changing its rule structure. The
/// unbounded upper stays unbounded.
pub fn scale_intervals(p: &MetricProgram, factor: u32) -> MetricProgram {
    let rules = p
        .rules
        .iter()
        .map(|r| {
            let head = match &r.head {
                RuleHead::MetricNext(i, a) => {
                    let lower = i.lower.checked_mul(factor).expect("interval bound overflow");
                    let upper = i.upper.map(|u| lower + u.saturating_sub(i.lower));
                    RuleHead::MetricNext(Interval { lower, upper }, a.clone())
                }
                h => h.clone(),
            };
            MetricRule { head, body: r.body.clone() }
        })
        .collect();
    MetricProgram { rules }
}

pub const BENCH_FORMAT: &str = "metac-bench";
pub const BENCH_VERSION: u32 = 1;

/// Compile measurements for one program at one duration scale. The
/// constraint-side counts come from the full pipeline; the propositional
/// side records the unrolled core and the arithmetic sizes of its timing
/// and interval parts, which at large bounds would be wasteful to
/// materialize just to count.
#[derive(Debug, Clone, Serialize)]
pub struct BenchEntry {
    pub name: String,
    pub scale: u32,
    pub nu: u32,
    pub dc_rules: usize,
    pub dc_compile_micros: u128,
    pub bool_core_rules: usize,
    pub bool_timing_rules: u64,
    pub bool_constraint_rules: u64,
    pub bool_total_rules: u64,
    pub bool_estimate_micros: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub format: &'static str,
    pub version: u32,
    pub lambda: usize,
    pub base_nu: u32,
    pub scales: Vec<u32>,
    pub entries: Vec<BenchEntry>,
    pub dc_rules_scale_invariant: bool,
    pub bool_rules_strictly_increasing: bool,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda: {}  base nu: {}", self.lambda, self.base_nu)?;
        writeln!(
            f,
            "{:<18} {:>5} {:>7} {:>9} {:>12} {:>13} {:>12}",
            "name", "scale", "nu", "dc rules", "dc compile", "bool rules", "bool count"
        )?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<18} {:>5} {:>7} {:>9} {:>10}us {:>13} {:>10}us",
                e.name,
                e.scale,
                e.nu,
                e.dc_rules,
                e.dc_compile_micros,
                e.bool_total_rules,
                e.bool_estimate_micros
            )?;
        }
        write!(
            f,
            "dc scale-invariant: {}  bool strictly increasing: {}",
            self.dc_rules_scale_invariant, self.bool_rules_strictly_increasing
        )
    }
}

fn best_of<T>(repeats: usize, mut run: impl FnMut() -> T) -> (T, u128) {
    let mut best = u128::MAX;
    let mut result = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let value = run();
        best = best.min(start.elapsed().as_micros());
        result = Some(value);
    }
    (result.expect("at least one run"), best)
}

/// Compile every corpus entry at every duration scale and record sizes and
/// wall-clock times (best of several runs). The propositional bound `nu`
/// scales with the durations, mirroring how a deadline would.
pub fn bench(
    corpus: &[(String, MetricProgram)],
    scales: &[u32],
    lambda: usize,
    base_nu: u32,
) -> Result<BenchReport, VerifyError> {
    let mut entries = Vec::new();
    for (name, program) in corpus {
        for &scale in scales {
            let scaled = scale_intervals(program, scale);
            let nu = base_nu.checked_mul(scale).expect("nu overflow");
            let (dc, dc_micros) = best_of(10, || compile_dc(&scaled, lambda, true));
            let dc = dc?;
            let ctx = CompileContext::new(lambda, Some(nu), true)?;
            let ((core, psi), bool_micros) = best_of(10, || {
                let core = unroll(&scaled, &ctx);
                let psi = count_constraint_rules(&scaled, lambda, nu);
                (core, psi)
            });
            let delta = 1 + (lambda.saturating_sub(1) as u64) * (nu as u64 + 1);
            entries.push(BenchEntry {
                name: name.clone(),
                scale,
                nu,
                dc_rules: dc.rules.len(),
                dc_compile_micros: dc_micros,
                bool_core_rules: core.rules.len(),
                bool_timing_rules: delta,
                bool_constraint_rules: psi,
                bool_total_rules: core.rules.len() as u64 + delta + psi,
                bool_estimate_micros: bool_micros,
            });
        }
    }
    let mut dc_invariant = true;
    let mut bool_increasing = true;
    for (name, _) in corpus {
        let per: Vec<&BenchEntry> = entries.iter().filter(|e| &e.name == name).collect();
        dc_invariant &= per.windows(2).all(|w| w[0].dc_rules == w[1].dc_rules);
        bool_increasing &= per
            .windows(2)
            .all(|w| w[0].scale >= w[1].scale || w[0].bool_total_rules < w[1].bool_total_rules);
    }
    Ok(BenchReport {
        format: BENCH_FORMAT,
        version: BENCH_VERSION,
        lambda,
        base_nu,
        scales: scales.to_vec(),
        entries,
        dc_rules_scale_invariant: dc_invariant,
        bool_rules_strictly_increasing: bool_increasing,
    })
}
