//! Model checking and enumeration for programs with difference constraints.
//!
//! Valuations are partial: a Boolean variable is either assigned the single
//! truth value or left undefined, a time variable carries a natural number or
//! is undefined. A constraint atom whose operands are not all defined is
//! false. Satisfaction again runs over a here/there pair of valuations; since
//! denotations only grow when a valuation is extended, negation can consult
//! the there-world alone, exactly as in the propositional case.
//!
//! Two enumerators live here. The bounded one searches every valuation with
//! time values up to a given bound and is the semantic reference. The
//! practical one never enumerates time values: it finds the Boolean stable
//! models of the constraint-free rules, turns the timing facts plus the
//! triggered constraint rules into a difference system, and solves that
//! system for a witness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ht::{enumerate_equilibrium_models, EnumConfig, HtError};
use crate::types::{
    Backend, DiffAtom, GroundAtom, GroundLiteral, GroundProgram, GroundRule, ModelSet, StepAtom,
    TimeVar,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HtcError {
    #[error(
        "program has {vars} variables, above the cap of {cap}; raise --var-cap if this is intended"
    )]
    VarCapExceeded { vars: usize, cap: usize },
    #[error("expected a difference-constraint program")]
    WrongBackend,
    #[error("boolean timing atoms do not belong in a difference-constraint program")]
    MixedTiming,
    #[error("unsupported rule shape: {0}")]
    UnsupportedShape(&'static str),
    #[error(transparent)]
    Bool(#[from] HtError),
}

/// Partial assignment: Boolean variables are either true or undefined, time
/// variables carry a natural or are undefined.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Valuation {
    bools: BTreeSet<StepAtom>,
    times: BTreeMap<TimeVar, u32>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn set_bool(&mut self, atom: StepAtom) {
        self.bools.insert(atom);
    }

    pub fn set_time(&mut self, var: TimeVar, value: u32) {
        self.times.insert(var, value);
    }

    pub fn bool_holds(&self, atom: &StepAtom) -> bool {
        self.bools.contains(atom)
    }

    pub fn time(&self, var: &TimeVar) -> Option<u32> {
        self.times.get(var).copied()
    }

    /// Number of defined variables.
    pub fn len(&self) -> usize {
        self.bools.len() + self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bools.is_empty() && self.times.is_empty()
    }

    pub fn bools(&self) -> impl Iterator<Item = &StepAtom> {
        self.bools.iter()
    }

    pub fn times(&self) -> impl Iterator<Item = (&TimeVar, u32)> {
        self.times.iter().map(|(v, d)| (v, *d))
    }

    /// Containment as assignment sets: everything defined here is defined in
    /// `other` with the same value.
    pub fn is_subvaluation_of(&self, other: &Valuation) -> bool {
        self.bools.is_subset(&other.bools)
            && self.times.iter().all(|(v, d)| other.times.get(v) == Some(d))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.bools.iter().map(|a| a.to_string()).collect();
        parts.extend(self.times.iter().map(|(v, d)| format!("{v}={d}")));
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Whether the valuation lies in the denotation of the constraint atom.
/// Undefined operands falsify the atom.
pub fn denotes(v: &Valuation, atom: &DiffAtom) -> bool {
    match atom {
        DiffAtom::Eq { var, value } => v.time(var) == Some(*value),
        DiffAtom::Leq { x, y, bound } => match (v.time(x), v.time(y)) {
            (Some(a), Some(b)) => i64::from(a) - i64::from(b) <= *bound,
            _ => false,
        },
    }
}

fn literal_holds(lit: &GroundLiteral, world: &Valuation, there: &Valuation) -> bool {
    let at = |w: &Valuation| match &lit.atom {
        GroundAtom::True => true,
        GroundAtom::False => false,
        GroundAtom::Step(s) => w.bool_holds(s),
        GroundAtom::Time(_) => panic!("boolean timing atom in a constraint rule"),
        GroundAtom::Diff(c) => denotes(w, c),
    };
    if lit.negated {
        // Denotations only grow under extension, so failing at the
        // there-world already covers the here-world.
        !at(there)
    } else {
        at(world)
    }
}

/// Two-world satisfaction of one rule by the valuation pair `(h, t)` with
/// `h` a subvaluation of `t`.
pub fn htc_satisfies(h: &Valuation, t: &Valuation, rule: &GroundRule) -> bool {
    debug_assert!(h.is_subvaluation_of(t));
    for world in [h, t] {
        let body_sat = rule.body.iter().all(|l| literal_holds(l, world, t));
        if body_sat && !rule.head.iter().any(|l| literal_holds(l, world, t)) {
            return false;
        }
    }
    true
}

pub fn htc_satisfies_program(h: &Valuation, t: &Valuation, prog: &GroundProgram) -> bool {
    prog.rules.iter().all(|r| htc_satisfies(h, t, r))
}

/// A finite conjunction of difference constraints over time variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffSystem {
    constraints: BTreeSet<DiffAtom>,
}

impl DiffSystem {
    pub fn new() -> Self {
        DiffSystem::default()
    }

    pub fn insert(&mut self, atom: DiffAtom) {
        self.constraints.insert(atom);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DiffAtom> {
        self.constraints.iter()
    }

    pub fn vars(&self) -> BTreeSet<TimeVar> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            match c {
                DiffAtom::Eq { var, .. } => {
                    out.insert(*var);
                }
                DiffAtom::Leq { x, y, .. } => {
                    out.insert(*x);
                    out.insert(*y);
                }
            }
        }
        out
    }

    pub fn satisfied_by(&self, v: &Valuation) -> bool {
        self.constraints.iter().all(|c| denotes(v, c))
    }
}

impl FromIterator<DiffAtom> for DiffSystem {
    fn from_iter<I: IntoIterator<Item = DiffAtom>>(iter: I) -> Self {
        DiffSystem { constraints: iter.into_iter().collect() }
    }
}

impl Extend<DiffAtom> for DiffSystem {
    fn extend<I: IntoIterator<Item = DiffAtom>>(&mut self, iter: I) {
        self.constraints.extend(iter);
    }
}

/// Least natural solution of a difference system, or `None` if it is
/// infeasible. Equalities act as lower bounds during propagation and are
/// checked exactly on the fixpoint. Starting every variable at zero and only
/// ever raising values yields the component-wise minimal solution, anchored
/// at `t_0 = 0` whenever that equality is part of the system. A pass count
/// beyond the variable count means a cycle keeps pumping values, so the
/// system is infeasible. Values beyond the `u32` timing domain are likewise
/// reported infeasible.
pub fn dc_feasible(sys: &DiffSystem) -> Option<Valuation> {
    let vars: Vec<TimeVar> = sys.vars().into_iter().collect();
    let index: BTreeMap<TimeVar, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut value: Vec<i64> = vec![0; vars.len()];
    let mut eqs: Vec<(usize, i64)> = Vec::new();
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    for c in sys.iter() {
        match c {
            DiffAtom::Eq { var, value: d } => eqs.push((index[var], i64::from(*d))),
            DiffAtom::Leq { x, y, bound } => edges.push((index[x], index[y], *bound)),
        }
    }
    for &(i, d) in &eqs {
        value[i] = value[i].max(d);
    }
    let mut passes = 0usize;
    let mut changed = true;
    while changed {
        if passes > vars.len() {
            return None;
        }
        changed = false;
        for &(x, y, bound) in &edges {
            // x - y <= bound, so y must be at least x - bound
            let needed = value[x] - bound;
            if needed > value[y] {
                value[y] = needed;
                changed = true;
            }
        }
        passes += 1;
    }
    for &(i, d) in &eqs {
        if value[i] != d {
            return None;
        }
    }
    let mut witness = Valuation::new();
    for (i, var) in vars.iter().enumerate() {
        let d = u32::try_from(value[i]).ok()?;
        witness.set_time(*var, d);
    }
    Some(witness)
}

/// Search limit for the bounded enumerator.
#[derive(Debug, Clone, Copy)]
pub struct HtcConfig {
    pub var_cap: usize,
}

pub const DEFAULT_VAR_CAP: usize = 24;

impl Default for HtcConfig {
    fn default() -> Self {
        HtcConfig { var_cap: DEFAULT_VAR_CAP }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Const(bool),
    Bool(usize),
    Diff(usize),
}

struct CLit {
    slot: Slot,
    negated: bool,
}

struct CRule {
    head: Vec<CLit>,
    body: Vec<CLit>,
}

struct Universe {
    bools: Vec<StepAtom>,
    times: Vec<TimeVar>,
    diffs: Vec<DiffAtom>,
    /// time variable indices read by each diff atom
    diff_vars: Vec<Vec<usize>>,
}

/// Search state: `None` is undecided; for time variables, `Some(None)` is a
/// decided undefined.
struct State {
    bools: Vec<Option<bool>>,
    times: Vec<Option<Option<u32>>>,
}

impl Universe {
    fn diff_truth(&self, di: usize, state: &State) -> Option<bool> {
        let decided = self.diff_vars[di].iter().all(|&ti| state.times[ti].is_some());
        if !decided {
            return None;
        }
        let value = |v: &TimeVar| {
            let ti = self.times.binary_search(v).expect("time var collected");
            state.times[ti].expect("decided")
        };
        Some(match &self.diffs[di] {
            DiffAtom::Eq { var, value: d } => value(var) == Some(*d),
            DiffAtom::Leq { x, y, bound } => match (value(x), value(y)) {
                (Some(a), Some(b)) => i64::from(a) - i64::from(b) <= *bound,
                _ => false,
            },
        })
    }

    fn lit_truth(&self, lit: &CLit, state: &State) -> Option<bool> {
        let v = match lit.slot {
            Slot::Const(b) => Some(b),
            Slot::Bool(i) => state.bools[i],
            Slot::Diff(d) => self.diff_truth(d, state),
        };
        v.map(|b| b != lit.negated)
    }

    fn certainly_violated(&self, rule: &CRule, state: &State) -> bool {
        rule.body.iter().all(|l| self.lit_truth(l, state) == Some(true))
            && rule.head.iter().all(|l| self.lit_truth(l, state) == Some(false))
    }
}

/// Exhaustive enumeration of the constraint equilibrium models whose time
/// values stay within `0..=nu`. Reference implementation: every total
/// valuation over the bounded domains is tried, then every strictly smaller
/// here-valuation.
pub fn enumerate_constraint_equilibrium_models_bounded(
    prog: &GroundProgram,
    nu: u32,
    config: HtcConfig,
) -> Result<ModelSet<Valuation>, HtcError> {
    if prog.backend != Backend::Dc {
        return Err(HtcError::WrongBackend);
    }
    let mut bools = BTreeSet::new();
    let mut times = BTreeSet::new();
    let mut diffs = BTreeSet::new();
    for atom in prog.atoms() {
        match atom {
            GroundAtom::Step(s) => {
                bools.insert(s);
            }
            GroundAtom::Time(_) => return Err(HtcError::MixedTiming),
            GroundAtom::Diff(c) => {
                match &c {
                    DiffAtom::Eq { var, .. } => {
                        times.insert(*var);
                    }
                    DiffAtom::Leq { x, y, .. } => {
                        times.insert(*x);
                        times.insert(*y);
                    }
                }
                diffs.insert(c);
            }
            GroundAtom::True | GroundAtom::False => unreachable!("constants filtered"),
        }
    }
    let vars = bools.len() + times.len();
    if vars > config.var_cap {
        return Err(HtcError::VarCapExceeded { vars, cap: config.var_cap });
    }
    let bools: Vec<StepAtom> = bools.into_iter().collect();
    let times: Vec<TimeVar> = times.into_iter().collect();
    let diffs: Vec<DiffAtom> = diffs.into_iter().collect();
    let diff_vars = diffs
        .iter()
        .map(|c| {
            let mut vs: Vec<usize> = match c {
                DiffAtom::Eq { var, .. } => vec![times.binary_search(var).unwrap()],
                DiffAtom::Leq { x, y, .. } => vec![
                    times.binary_search(x).unwrap(),
                    times.binary_search(y).unwrap(),
                ],
            };
            vs.dedup();
            vs
        })
        .collect();
    let universe = Universe { bools, times, diffs, diff_vars };

    let to_lit = |l: &GroundLiteral| CLit {
        slot: match &l.atom {
            GroundAtom::True => Slot::Const(true),
            GroundAtom::False => Slot::Const(false),
            GroundAtom::Step(s) => Slot::Bool(universe.bools.binary_search(s).unwrap()),
            GroundAtom::Diff(c) => Slot::Diff(universe.diffs.binary_search(c).unwrap()),
            GroundAtom::Time(_) => unreachable!("rejected above"),
        },
        negated: l.negated,
    };
    let rules: Vec<CRule> = prog
        .rules
        .iter()
        .map(|r| CRule {
            head: r.head.iter().map(to_lit).collect(),
            body: r.body.iter().map(to_lit).collect(),
        })
        .collect();

    // Assign variables step-major so rules, which couple adjacent steps,
    // prune early: within a step, Booleans first, then the time variable.
    #[derive(Clone, Copy)]
    enum VarId {
        Bool(usize),
        Time(usize),
    }
    let mut order: Vec<(usize, u8, usize)> = universe
        .bools
        .iter()
        .enumerate()
        .map(|(i, a)| (a.step, 0u8, i))
        .chain(universe.times.iter().enumerate().map(|(i, v)| (v.step, 1u8, i)))
        .collect();
    order.sort();
    let order: Vec<VarId> = order
        .into_iter()
        .map(|(_, kind, i)| if kind == 0 { VarId::Bool(i) } else { VarId::Time(i) })
        .collect();

    let empty_state = State {
        bools: vec![None; universe.bools.len()],
        times: vec![None; universe.times.len()],
    };
    for r in &rules {
        let no_vars = r.head.iter().chain(&r.body).all(|l| matches!(l.slot, Slot::Const(_)));
        if no_vars && universe.certainly_violated(r, &empty_state) {
            return Ok(ModelSet::new(Vec::new()));
        }
    }

    // rules touching each variable, found through the diff atoms for times
    let mut bool_rules: Vec<Vec<usize>> = vec![Vec::new(); universe.bools.len()];
    let mut time_rules: Vec<Vec<usize>> = vec![Vec::new(); universe.times.len()];
    for (ri, r) in rules.iter().enumerate() {
        for l in r.head.iter().chain(&r.body) {
            match l.slot {
                Slot::Const(_) => {}
                Slot::Bool(i) => {
                    if !bool_rules[i].contains(&ri) {
                        bool_rules[i].push(ri);
                    }
                }
                Slot::Diff(d) => {
                    for &ti in &universe.diff_vars[d] {
                        if !time_rules[ti].contains(&ri) {
                            time_rules[ti].push(ri);
                        }
                    }
                }
            }
        }
    }

    let mut state = empty_state;
    let mut models = Vec::new();

    fn walk(
        universe: &Universe,
        rules: &[CRule],
        bool_rules: &[Vec<usize>],
        time_rules: &[Vec<usize>],
        order: &[VarId],
        nu: u32,
        state: &mut State,
        next: usize,
        models: &mut Vec<Valuation>,
    ) {
        if next == order.len() {
            if is_constraint_minimal(universe, rules, state) {
                let mut v = Valuation::new();
                for (i, b) in state.bools.iter().enumerate() {
                    if *b == Some(true) {
                        v.set_bool(universe.bools[i].clone());
                    }
                }
                for (i, t) in state.times.iter().enumerate() {
                    if let Some(Some(d)) = t {
                        v.set_time(universe.times[i], *d);
                    }
                }
                models.push(v);
            }
            return;
        }
        let touched: &[usize] = match order[next] {
            VarId::Bool(i) => &bool_rules[i],
            VarId::Time(i) => &time_rules[i],
        };
        match order[next] {
            VarId::Bool(i) => {
                for value in [false, true] {
                    state.bools[i] = Some(value);
                    if !touched.iter().any(|&ri| universe.certainly_violated(&rules[ri], state)) {
                        walk(
                            universe, rules, bool_rules, time_rules, order, nu, state, next + 1,
                            models,
                        );
                    }
                }
                state.bools[i] = None;
            }
            VarId::Time(i) => {
                let mut try_value = |value: Option<u32>, state: &mut State| {
                    state.times[i] = Some(value);
                    if !touched.iter().any(|&ri| universe.certainly_violated(&rules[ri], state)) {
                        walk(
                            universe, rules, bool_rules, time_rules, order, nu, state, next + 1,
                            models,
                        );
                    }
                };
                try_value(None, state);
                for d in 0..=nu {
                    try_value(Some(d), state);
                }
                state.times[i] = None;
            }
        }
    }

    walk(
        &universe,
        &rules,
        &bool_rules,
        &time_rules,
        &order,
        nu,
        &mut state,
        0,
        &mut models,
    );
    Ok(ModelSet::new(models))
}

/// Minimality of a total valuation: no here-valuation keeping a strict
/// subset of the defined variables satisfies every rule. The program reduces
/// to keep-bit implications; a constraint atom below the model holds exactly
/// when it holds at the model and all its variables are kept, so a head
/// disjunct can demand several bits at once.
fn is_constraint_minimal(universe: &Universe, rules: &[CRule], state: &State) -> bool {
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Bit {
        Bool(usize),
        Time(usize),
    }
    let defined: Vec<Bit> = state
        .bools
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == Some(true))
        .map(|(i, _)| Bit::Bool(i))
        .chain(
            state
                .times
                .iter()
                .enumerate()
                .filter(|(_, t)| matches!(t, Some(Some(_))))
                .map(|(i, _)| Bit::Time(i)),
        )
        .collect();
    if defined.is_empty() {
        return true;
    }
    let bit_of_bool = |i: usize| defined.iter().position(|s| *s == Bit::Bool(i));
    let bit_of_time = |i: usize| defined.iter().position(|s| *s == Bit::Time(i));

    struct Reduct {
        body: Vec<usize>,
        head: Vec<Vec<usize>>,
    }
    let mut reduct: Vec<Reduct> = Vec::new();
    'rules: for r in rules {
        let mut body = Vec::new();
        for l in &r.body {
            let t_truth = universe.lit_truth(l, state).expect("total state");
            if l.negated {
                if t_truth {
                    continue; // fixed true, drop
                }
                continue 'rules; // fixed false, rule satisfied below the model
            }
            match l.slot {
                Slot::Const(_) => {
                    if t_truth {
                        continue;
                    }
                    continue 'rules;
                }
                Slot::Bool(i) => {
                    if t_truth {
                        body.push(bit_of_bool(i).expect("true atom is defined"));
                    } else {
                        continue 'rules;
                    }
                }
                Slot::Diff(d) => {
                    if t_truth {
                        for &ti in &universe.diff_vars[d] {
                            body.push(bit_of_time(ti).expect("operand defined"));
                        }
                    } else {
                        continue 'rules;
                    }
                }
            }
        }
        let mut head = Vec::new();
        for l in &r.head {
            let t_truth = universe.lit_truth(l, state).expect("total state");
            if l.negated || matches!(l.slot, Slot::Const(_)) {
                if t_truth {
                    continue 'rules; // fixed true disjunct satisfies the rule
                }
                continue; // fixed false, drop
            }
            match l.slot {
                Slot::Bool(i) => {
                    if t_truth {
                        head.push(vec![bit_of_bool(i).expect("defined")]);
                    }
                }
                Slot::Diff(d) => {
                    if t_truth {
                        head.push(
                            universe.diff_vars[d]
                                .iter()
                                .map(|&ti| bit_of_time(ti).expect("defined"))
                                .collect(),
                        );
                    }
                }
                Slot::Const(_) => unreachable!(),
            }
        }
        body.sort_unstable();
        body.dedup();
        reduct.push(Reduct { body, head });
    }
    debug_assert!(reduct.iter().all(|r| !(r.body.is_empty() && r.head.is_empty())));

    let mut bit_rules: Vec<Vec<usize>> = vec![Vec::new(); defined.len()];
    for (ri, r) in reduct.iter().enumerate() {
        for &b in r.body.iter().chain(r.head.iter().flatten()) {
            if !bit_rules[b].contains(&ri) {
                bit_rules[b].push(ri);
            }
        }
    }

    fn violated(r: &Reduct, keep: &[Option<bool>]) -> bool {
        r.body.iter().all(|&b| keep[b] == Some(true))
            && r.head
                .iter()
                .all(|disjunct| disjunct.iter().any(|&b| keep[b] == Some(false)))
    }

    fn find_proper(
        reduct: &[Reduct],
        bit_rules: &[Vec<usize>],
        keep: &mut Vec<Option<bool>>,
        next: usize,
    ) -> bool {
        if next == keep.len() {
            return keep.iter().any(|v| *v == Some(false));
        }
        for value in [false, true] {
            keep[next] = Some(value);
            let pruned = bit_rules[next].iter().any(|&ri| violated(&reduct[ri], keep));
            if !pruned && find_proper(reduct, bit_rules, keep, next + 1) {
                return true;
            }
        }
        keep[next] = None;
        false
    }

    let mut keep = vec![None; defined.len()];
    !find_proper(&reduct, &bit_rules, &mut keep, 0)
}

/// Boolean stable model plus the timing attached to it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DcModel {
    pub atoms: BTreeSet<GroundAtom>,
    pub timing: Valuation,
}

impl DcModel {
    /// Merge the Boolean part into the timing valuation, for comparison with
    /// the bounded enumerator.
    pub fn as_valuation(&self) -> Valuation {
        let mut v = self.timing.clone();
        for a in &self.atoms {
            if let GroundAtom::Step(s) = a {
                v.set_bool(s.clone());
            }
        }
        v
    }
}

impl fmt::Display for DcModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_valuation())
    }
}

enum RuleClass {
    Boolean(GroundRule),
    TimingFact(DiffAtom),
    Conditional { bools: Vec<GroundLiteral>, requires: Vec<DiffAtom> },
}

fn classify(rule: &GroundRule) -> Result<RuleClass, HtcError> {
    let head_diffs = rule
        .head
        .iter()
        .filter(|l| matches!(l.atom, GroundAtom::Diff(_)))
        .count();
    let body_diffs = rule
        .body
        .iter()
        .filter(|l| matches!(l.atom, GroundAtom::Diff(_)))
        .count();
    if head_diffs > 0 {
        if rule.head.len() != 1 || !rule.body.is_empty() {
            return Err(HtcError::UnsupportedShape(
                "constraint atoms in heads must form plain facts",
            ));
        }
        let lit = &rule.head[0];
        if lit.negated {
            return Err(HtcError::UnsupportedShape("negated constraint facts"));
        }
        if let GroundAtom::Diff(c) = &lit.atom {
            return Ok(RuleClass::TimingFact(c.clone()));
        }
        unreachable!();
    }
    if body_diffs > 0 {
        if !rule.head.is_empty() {
            return Err(HtcError::UnsupportedShape(
                "constraint atoms in bodies are only supported in integrity constraints",
            ));
        }
        let mut bools = Vec::new();
        let mut requires = Vec::new();
        for l in &rule.body {
            match &l.atom {
                GroundAtom::Diff(c) => {
                    if !l.negated {
                        return Err(HtcError::UnsupportedShape(
                            "positive constraint atoms in rule bodies",
                        ));
                    }
                    requires.push(c.clone());
                }
                _ => bools.push(l.clone()),
            }
        }
        return Ok(RuleClass::Conditional { bools, requires });
    }
    Ok(RuleClass::Boolean(rule.clone()))
}

fn boolean_body_holds(bools: &[GroundLiteral], model: &BTreeSet<GroundAtom>) -> bool {
    bools.iter().all(|l| {
        let truth = match &l.atom {
            GroundAtom::True => true,
            GroundAtom::False => false,
            a => model.contains(a),
        };
        truth != l.negated
    })
}

/// All assignments of the system's variables to values in `0..=nu` that
/// satisfy the system, in increasing step order. Constraints prune partial
/// assignments as soon as all their variables are placed.
fn satisfying_timings(sys: &DiffSystem, nu: u32) -> Vec<Valuation> {
    let vars: Vec<TimeVar> = sys.vars().into_iter().collect();
    let position = |v: &TimeVar| vars.binary_search(v).expect("system var");
    // constraints indexed by the last variable they mention
    let mut by_last: Vec<Vec<&DiffAtom>> = vec![Vec::new(); vars.len()];
    for c in sys.iter() {
        let last = match c {
            DiffAtom::Eq { var, .. } => position(var),
            DiffAtom::Leq { x, y, .. } => position(x).max(position(y)),
        };
        by_last[last].push(c);
    }
    let mut out = Vec::new();
    let mut partial = Valuation::new();
    fn assign(
        vars: &[TimeVar],
        by_last: &[Vec<&DiffAtom>],
        nu: u32,
        partial: &mut Valuation,
        next: usize,
        out: &mut Vec<Valuation>,
    ) {
        if next == vars.len() {
            out.push(partial.clone());
            return;
        }
        for d in 0..=nu {
            partial.set_time(vars[next], d);
            if by_last[next].iter().all(|c| denotes(partial, c)) {
                assign(vars, by_last, nu, partial, next + 1, out);
            }
        }
        partial.times.remove(&vars[next]);
    }
    assign(&vars, &by_last, nu, &mut partial, 0, &mut out);
    out
}

/// The practical enumerator for difference-constraint programs: Boolean
/// stable models of the constraint-free rules, each paired with the least
/// witness of its difference system. The system combines the timing facts
/// with the requirements of every integrity constraint whose Boolean body
/// the model satisfies: such a constraint bans the negation of its
/// constraint atom, hence demands the atom itself. With `nu_report` set,
/// every satisfying timing with values up to that bound is attached instead,
/// which makes the result set-comparable to the bounded enumerator and to
/// the propositional backend.
///
/// The split into a Boolean search plus a feasibility check leans on the
/// compiled shape: the timing facts pin every time variable, so minimality
/// never trades a time value away and reduces to Boolean minimality. A
/// hand-built program whose constraints mention variables that no fact
/// defines can fool this shortcut; the bounded enumerator remains the
/// authority there.
pub fn enumerate_dc_models(
    prog: &GroundProgram,
    nu_report: Option<u32>,
    config: EnumConfig,
) -> Result<ModelSet<DcModel>, HtcError> {
    if prog.backend != Backend::Dc {
        return Err(HtcError::WrongBackend);
    }
    if prog
        .atoms()
        .iter()
        .any(|a| matches!(a, GroundAtom::Time(_)))
    {
        return Err(HtcError::MixedTiming);
    }
    let mut boolean_part = GroundProgram::new(Backend::Bool);
    let mut base = DiffSystem::new();
    let mut conditionals: Vec<(Vec<GroundLiteral>, Vec<DiffAtom>)> = Vec::new();
    for rule in &prog.rules {
        match classify(rule)? {
            RuleClass::Boolean(r) => boolean_part.rules.push(r),
            RuleClass::TimingFact(c) => base.insert(c),
            RuleClass::Conditional { bools, requires } => conditionals.push((bools, requires)),
        }
    }
    let candidates = enumerate_equilibrium_models(&boolean_part, config)?;
    let mut out = Vec::new();
    for model in &candidates {
        let mut sys = base.clone();
        for (bools, requires) in &conditionals {
            if boolean_body_holds(bools, model) {
                sys.extend(requires.iter().cloned());
            }
        }
        match nu_report {
            None => {
                if let Some(witness) = dc_feasible(&sys) {
                    out.push(DcModel { atoms: model.clone(), timing: witness });
                }
            }
            Some(nu) => {
                for timing in satisfying_timings(&sys, nu) {
                    out.push(DcModel { atoms: model.clone(), timing });
                }
            }
        }
    }
    Ok(ModelSet::new(out))
}
