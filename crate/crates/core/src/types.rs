//! Shared vocabulary for the whole toolkit: metric programs as written by the
//! user, and the ground (propositional plus constraint) programs produced by
//! the compilation pipelines.
//!
//! Everything here is plain data with structural equality and a total order,
//! so model sets and emitted programs come out deterministic. Collections are
//! `BTreeSet`/`BTreeMap` for the same reason.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by constructors that guard structural invariants.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("invalid atom symbol {0:?}: expected [a-z][A-Za-z0-9_]*")]
    BadSymbol(String),
    #[error("invalid argument {0:?}: expected [a-z][A-Za-z0-9_]* or a natural number")]
    BadArgument(String),
    #[error("timing function must start at 0, got {0}")]
    TimingNotAnchored(u32),
    #[error("timing function must be strictly increasing, got {0} then {1}")]
    TimingNotIncreasing(u32, u32),
    #[error("timing function must cover at least one step")]
    TimingEmpty,
    #[error("trace length mismatch: {h} here-steps, {t} there-steps, {tau} timing values")]
    TraceLengthMismatch { h: usize, t: usize, tau: usize },
    #[error("here-world at step {0} is not a subset of the there-world")]
    TraceNotSubset(usize),
}

fn symbol_ok(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn argument_ok(s: &str) -> bool {
    !s.is_empty() && (symbol_ok(s) || s.chars().all(|c| c.is_ascii_digit()))
}

/// A ground atom name: a predicate symbol with ground argument terms, for
/// example `at(ram,office)` or `goal`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomName {
    symbol: String,
    args: Vec<String>,
}

impl AtomName {
    pub fn new(symbol: impl Into<String>, args: Vec<String>) -> Result<Self, TypeError> {
        let symbol = symbol.into();
        if !symbol_ok(&symbol) {
            return Err(TypeError::BadSymbol(symbol));
        }
        for a in &args {
            if !argument_ok(a) {
                return Err(TypeError::BadArgument(a.clone()));
            }
        }
        Ok(AtomName { symbol, args })
    }

    /// Convenience for zero-argument atoms with a known-good symbol.
    pub fn prop(symbol: &str) -> Self {
        AtomName::new(symbol, Vec::new()).expect("bad propositional atom symbol")
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }
}

impl fmt::Display for AtomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

/// A half-open interval `[lower, upper)` over naturals; `upper = None` means
/// the interval is unbounded on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lower: u32,
    pub upper: Option<u32>,
}

impl Interval {
    pub const fn bounded(lower: u32, upper: u32) -> Self {
        Interval { lower, upper: Some(upper) }
    }

    pub const fn unbounded(lower: u32) -> Self {
        Interval { lower, upper: None }
    }

    pub const fn full() -> Self {
        Interval::unbounded(0)
    }

    pub fn contains(&self, d: u32) -> bool {
        d >= self.lower && self.upper.map_or(true, |u| d < u)
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_some_and(|u| u <= self.lower)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "({},{})", self.lower, u),
            None => write!(f, "({},w)", self.lower),
        }
    }
}

/// What may appear inside a rule body besides ordinary atoms: the two
/// position markers for the first and the last step of a trace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyAtom {
    Atom(AtomName),
    Initial,
    Final,
}

impl fmt::Display for BodyAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyAtom::Atom(a) => write!(f, "{a}"),
            BodyAtom::Initial => write!(f, "initially"),
            BodyAtom::Final => write!(f, "finally"),
        }
    }
}

/// An atom of type `X`, possibly under default negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal<X> {
    pub atom: X,
    pub negated: bool,
}

impl<X> Literal<X> {
    pub fn pos(atom: X) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: X) -> Self {
        Literal { atom, negated: true }
    }
}

impl<X: fmt::Display> fmt::Display for Literal<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Rule heads: either a (possibly empty) disjunction of literals, or a
/// next-step atom qualified by an interval on the time gap to the successor.
/// The empty disjunction is falsity, so integrity constraints and the head
/// produced for a next operator at the last step share one encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleHead {
    Disjunction(Vec<Literal<AtomName>>),
    MetricNext(Interval, AtomName),
}

/// One rule of a metric program, read as universally quantified over steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricRule {
    pub head: RuleHead,
    pub body: Vec<Literal<BodyAtom>>,
}

impl fmt::Display for MetricRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match &self.head {
            RuleHead::Disjunction(lits) => lits
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("; "),
            RuleHead::MetricNext(i, a) => format!("next({i},{a})"),
        };
        let body = self
            .body
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        match (head.is_empty(), body.is_empty()) {
            (false, true) => write!(f, "{head}."),
            (false, false) => write!(f, "{head} :- {body}."),
            (true, false) => write!(f, ":- {body}."),
            // Not reachable from the parser; printed in the only way the
            // grammar could come close to.
            (true, true) => write!(f, ":- ."),
        }
    }
}

/// A metric program: a finite set of rules, kept in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetricProgram {
    pub rules: Vec<MetricRule>,
}

impl MetricProgram {
    /// All atom names occurring anywhere in the program, in canonical order.
    pub fn alphabet(&self) -> BTreeSet<AtomName> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            match &r.head {
                RuleHead::Disjunction(lits) => {
                    out.extend(lits.iter().map(|l| l.atom.clone()));
                }
                RuleHead::MetricNext(_, a) => {
                    out.insert(a.clone());
                }
            }
            for l in &r.body {
                if let BodyAtom::Atom(a) = &l.atom {
                    out.insert(a.clone());
                }
            }
        }
        out
    }
}

impl fmt::Display for MetricProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// An atom name stamped with the step it talks about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StepAtom {
    pub base: AtomName,
    pub step: usize,
}

impl StepAtom {
    pub fn new(base: AtomName, step: usize) -> Self {
        StepAtom { base, step }
    }
}

impl fmt::Display for StepAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o({},{})", self.base, self.step)
    }
}

/// Propositional timing atom: step `step` happens at absolute time `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeAtom {
    pub step: usize,
    pub value: u32,
}

impl fmt::Display for TimeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t({},{})", self.step, self.value)
    }
}

/// Integer variable holding the absolute time of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeVar {
    pub step: usize,
}

impl fmt::Display for TimeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t({})", self.step)
    }
}

/// Constraint atoms over time variables. `Leq { x, y, bound }` is
/// `x - y <= bound`; the bound is signed, the variables range over naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiffAtom {
    Eq { var: TimeVar, value: u32 },
    Leq { x: TimeVar, y: TimeVar, bound: i64 },
}

impl fmt::Display for DiffAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffAtom::Eq { var, value } => write!(f, "&sum{{{var}}} = {value}"),
            DiffAtom::Leq { x, y, bound } => write!(f, "&sum{{{x} ; -{y}}} <= {bound}"),
        }
    }
}

/// Atoms of ground rules. `True` and `False` only ever appear in rule bodies
/// and only when compiling without simplification; they are what the position
/// markers fold to at a concrete step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundAtom {
    True,
    False,
    Step(StepAtom),
    Time(TimeAtom),
    Diff(DiffAtom),
}

impl GroundAtom {
    pub fn step(base: AtomName, step: usize) -> Self {
        GroundAtom::Step(StepAtom::new(base, step))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, GroundAtom::True | GroundAtom::False)
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundAtom::True => write!(f, "#true"),
            GroundAtom::False => write!(f, "#false"),
            GroundAtom::Step(a) => write!(f, "{a}"),
            GroundAtom::Time(t) => write!(f, "{t}"),
            GroundAtom::Diff(d) => write!(f, "{d}"),
        }
    }
}

/// Ground literals never carry a negated constant: negation on the folded
/// markers is resolved at construction time.
pub type GroundLiteral = Literal<GroundAtom>;

impl GroundLiteral {
    /// Fold a possibly negated constant into its positive form.
    pub fn folded(atom: GroundAtom, negated: bool) -> Self {
        match (&atom, negated) {
            (GroundAtom::True, true) => Literal::pos(GroundAtom::False),
            (GroundAtom::False, true) => Literal::pos(GroundAtom::True),
            _ => Literal { atom, negated },
        }
    }
}

/// A ground rule: disjunctive head (empty list is falsity), conjunctive body.
///
/// Shape invariants maintained by the compilation pipelines: a `Time` atom
/// never occurs together with a `Diff` atom in the same program, and `Diff`
/// atoms occur only as the positive head of a fact or negated in a body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub head: Vec<GroundLiteral>,
    pub body: Vec<GroundLiteral>,
}

impl GroundRule {
    pub fn fact(atom: GroundAtom) -> Self {
        GroundRule { head: vec![Literal::pos(atom)], body: Vec::new() }
    }

    pub fn constraint(body: Vec<GroundLiteral>) -> Self {
        GroundRule { head: Vec::new(), body }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.head.iter().chain(self.body.iter()).map(|l| &l.atom)
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = self
            .head
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ; ");
        let body = self
            .body
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        match (self.head.is_empty(), self.body.is_empty()) {
            (false, true) => write!(f, "{head}."),
            (false, false) => write!(f, "{head} :- {body}."),
            (true, false) => write!(f, ":- {body}."),
            (true, true) => write!(f, "#false."),
        }
    }
}

/// Which timing encoding a ground program uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Bool,
    Dc,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Bool => write!(f, "bool"),
            Backend::Dc => write!(f, "dc"),
        }
    }
}

/// Per-part rule counters for a compiled program: the step-unrolled core,
/// the timing part, and the interval constraints, in that order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PartCounts {
    pub core: usize,
    pub timing: usize,
    pub constraints: usize,
}

impl PartCounts {
    pub fn total(&self) -> usize {
        self.core + self.timing + self.constraints
    }
}

/// A ground program together with its backend tag and bookkeeping about how
/// many rules each part contributed before simplification dropped any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    pub backend: Backend,
    pub rules: Vec<GroundRule>,
    /// Rule counts per part as generated, before simplification.
    pub generated: PartCounts,
    /// Rule counts per part as kept.
    pub kept: PartCounts,
}

impl GroundProgram {
    pub fn new(backend: Backend) -> Self {
        GroundProgram {
            backend,
            rules: Vec::new(),
            generated: PartCounts::default(),
            kept: PartCounts::default(),
        }
    }

    /// Distinct non-constant atoms of the program, in canonical order.
    pub fn atoms(&self) -> BTreeSet<GroundAtom> {
        self.rules
            .iter()
            .flat_map(|r| r.atoms())
            .filter(|a| !a.is_constant())
            .cloned()
            .collect()
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A timing function: absolute times per step, anchored at 0 and strictly
/// increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimingFunction(Vec<u32>);

impl TimingFunction {
    pub fn new(values: Vec<u32>) -> Result<Self, TypeError> {
        match values.first() {
            None => return Err(TypeError::TimingEmpty),
            Some(0) => {}
            Some(&v) => return Err(TypeError::TimingNotAnchored(v)),
        }
        for w in values.windows(2) {
            if w[0] >= w[1] {
                return Err(TypeError::TimingNotIncreasing(w[0], w[1]));
            }
        }
        Ok(TimingFunction(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn at(&self, step: usize) -> u32 {
        self.0[step]
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// Time elapsed between step `k` and step `k + 1 <= len - 1`.
    pub fn gap(&self, k: usize) -> u32 {
        self.0[k + 1] - self.0[k]
    }
}

impl fmt::Display for TimingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A timed trace: a here-world and a there-world per step plus a timing
/// function, with the here-world pointwise included in the there-world.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedTrace {
    here: Vec<BTreeSet<AtomName>>,
    there: Vec<BTreeSet<AtomName>>,
    timing: TimingFunction,
}

impl TimedTrace {
    pub fn new(
        here: Vec<BTreeSet<AtomName>>,
        there: Vec<BTreeSet<AtomName>>,
        timing: TimingFunction,
    ) -> Result<Self, TypeError> {
        if here.len() != there.len() || here.len() != timing.len() {
            return Err(TypeError::TraceLengthMismatch {
                h: here.len(),
                t: there.len(),
                tau: timing.len(),
            });
        }
        for (k, (h, t)) in here.iter().zip(&there).enumerate() {
            if !h.is_subset(t) {
                return Err(TypeError::TraceNotSubset(k));
            }
        }
        Ok(TimedTrace { here, there, timing })
    }

    /// A total trace: here-world equal to the there-world everywhere.
    pub fn total(steps: Vec<BTreeSet<AtomName>>, timing: TimingFunction) -> Result<Self, TypeError> {
        TimedTrace::new(steps.clone(), steps, timing)
    }

    pub fn len(&self) -> usize {
        self.timing.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn here(&self, step: usize) -> &BTreeSet<AtomName> {
        &self.here[step]
    }

    pub fn there(&self, step: usize) -> &BTreeSet<AtomName> {
        &self.there[step]
    }

    pub fn here_steps(&self) -> &[BTreeSet<AtomName>] {
        &self.here
    }

    pub fn there_steps(&self) -> &[BTreeSet<AtomName>] {
        &self.there
    }

    pub fn timing(&self) -> &TimingFunction {
        &self.timing
    }

    pub fn is_total(&self) -> bool {
        self.here == self.there
    }

    /// The trace with the here-world lifted to the there-world.
    pub fn totalized(&self) -> TimedTrace {
        TimedTrace {
            here: self.there.clone(),
            there: self.there.clone(),
            timing: self.timing.clone(),
        }
    }

    /// Same there-world and timing, different here-world. Fails if the new
    /// here-world is not pointwise included in the there-world.
    pub fn with_here(&self, here: Vec<BTreeSet<AtomName>>) -> Result<TimedTrace, TypeError> {
        TimedTrace::new(here, self.there.clone(), self.timing.clone())
    }
}

impl fmt::Display for TimedTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            let atoms: Vec<String> = self.here[k].iter().map(|a| a.to_string()).collect();
            writeln!(f, "step {}: {{{}}} @ time {}", k, atoms.join(", "), self.timing.at(k))?;
        }
        Ok(())
    }
}

/// A deterministically ordered, duplicate-free collection of models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSet<M: Ord>(Vec<M>);

impl<M: Ord> ModelSet<M> {
    pub fn new(mut models: Vec<M>) -> Self {
        models.sort();
        models.dedup();
        ModelSet(models)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, M> {
        self.0.iter()
    }

    pub fn contains(&self, m: &M) -> bool {
        self.0.binary_search(m).is_ok()
    }

    pub fn as_slice(&self) -> &[M] {
        &self.0
    }

    /// Models in `self` missing from `other`, in order.
    pub fn difference<'a>(&'a self, other: &'a ModelSet<M>) -> impl Iterator<Item = &'a M> {
        self.0.iter().filter(|m| !other.contains(m))
    }
}

impl<M: Ord> FromIterator<M> for ModelSet<M> {
    fn from_iter<I: IntoIterator<Item = M>>(iter: I) -> Self {
        ModelSet::new(iter.into_iter().collect())
    }
}

impl<M: Ord> IntoIterator for ModelSet<M> {
    type Item = M;
    type IntoIter = std::vec::IntoIter<M>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a, M: Ord> IntoIterator for &'a ModelSet<M> {
    type Item = &'a M;
    type IntoIter = std::slice::Iter<'a, M>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
