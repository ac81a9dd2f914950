//! Metric here-and-there semantics over timed traces, and a brute-force
//! enumerator for metric equilibrium models.
//!
//! This module is the reference the compilation pipelines are checked
//! against, so it stays as close to the defining satisfaction clauses as
//! possible. The enumerator prunes trace prefixes that already violate a
//! rule classically, which is sound because rules reach at most one step
//! ahead; every surviving candidate is still confirmed with the plain
//! recursive evaluator before it is reported.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::types::{
    AtomName, BodyAtom, Interval, MetricProgram, MetricRule, ModelSet, RuleHead,
    TimedTrace, TimingFunction,
};

/// Formulas of the metric temporal language. Rules only ever produce atoms,
/// the position markers, conjunction, disjunction, implication and next;
/// `Eventually` and `Always` are carried so the evaluator covers the full
/// satisfaction relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricFormula {
    Falsity,
    Atom(AtomName),
    Initial,
    And(Box<MetricFormula>, Box<MetricFormula>),
    Or(Box<MetricFormula>, Box<MetricFormula>),
    Implies(Box<MetricFormula>, Box<MetricFormula>),
    Next(Interval, Box<MetricFormula>),
    Eventually(Interval, Box<MetricFormula>),
    Always(Interval, Box<MetricFormula>),
}

impl MetricFormula {
    pub fn truth() -> Self {
        MetricFormula::negation(MetricFormula::Falsity)
    }

    pub fn negation(f: MetricFormula) -> Self {
        MetricFormula::Implies(Box::new(f), Box::new(MetricFormula::Falsity))
    }

    /// The derived marker for the last step: no successor step exists.
    pub fn finality() -> Self {
        MetricFormula::negation(MetricFormula::Next(
            Interval::full(),
            Box::new(MetricFormula::truth()),
        ))
    }
}

/// The satisfaction relation at step `k` of a timed trace.
pub fn satisfies(m: &TimedTrace, k: usize, f: &MetricFormula) -> bool {
    debug_assert!(k < m.len());
    match f {
        MetricFormula::Falsity => false,
        MetricFormula::Atom(a) => m.here(k).contains(a),
        MetricFormula::Initial => k == 0,
        MetricFormula::And(a, b) => satisfies(m, k, a) && satisfies(m, k, b),
        MetricFormula::Or(a, b) => satisfies(m, k, a) || satisfies(m, k, b),
        MetricFormula::Implies(a, b) => {
            if satisfies(m, k, a) && !satisfies(m, k, b) {
                return false;
            }
            if m.is_total() {
                return true;
            }
            let total = m.totalized();
            !satisfies(&total, k, a) || satisfies(&total, k, b)
        }
        MetricFormula::Next(i, f) => {
            k + 1 < m.len() && i.contains(m.timing().gap(k)) && satisfies(m, k + 1, f)
        }
        MetricFormula::Eventually(i, f) => (k..m.len())
            .any(|j| i.contains(m.timing().at(j) - m.timing().at(k)) && satisfies(m, j, f)),
        MetricFormula::Always(i, f) => (k..m.len())
            .all(|j| !i.contains(m.timing().at(j) - m.timing().at(k)) || satisfies(m, j, f)),
    }
}

/// The formula a rule stands for at each step: body implies head.
pub fn rule_formula(r: &MetricRule) -> MetricFormula {
    let mut body = MetricFormula::truth();
    for (idx, lit) in r.body.iter().enumerate() {
        let base = match &lit.atom {
            BodyAtom::Atom(a) => MetricFormula::Atom(a.clone()),
            BodyAtom::Initial => MetricFormula::Initial,
            BodyAtom::Final => MetricFormula::finality(),
        };
        let lit_f = if lit.negated { MetricFormula::negation(base) } else { base };
        body = if idx == 0 { lit_f } else { MetricFormula::And(Box::new(body), Box::new(lit_f)) };
    }
    let head = match &r.head {
        RuleHead::Disjunction(lits) => {
            let mut head = MetricFormula::Falsity;
            for (idx, lit) in lits.iter().enumerate() {
                let base = MetricFormula::Atom(lit.atom.clone());
                let lit_f = if lit.negated { MetricFormula::negation(base) } else { base };
                head = if idx == 0 { lit_f } else { MetricFormula::Or(Box::new(head), Box::new(lit_f)) };
            }
            head
        }
        RuleHead::MetricNext(i, a) => {
            MetricFormula::Next(*i, Box::new(MetricFormula::Atom(a.clone())))
        }
    };
    MetricFormula::Implies(Box::new(body), Box::new(head))
}

/// Whether the always-closed rule holds in the trace: its formula must be
/// satisfied at every step.
pub fn rule_holds(m: &TimedTrace, r: &MetricRule) -> bool {
    let f = rule_formula(r);
    (0..m.len()).all(|k| satisfies(m, k, &f))
}

/// Whether the trace is a model of the whole program.
pub fn is_model(m: &TimedTrace, p: &MetricProgram) -> bool {
    p.rules.iter().all(|r| rule_holds(m, r))
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("trace length must be at least 1")]
    ZeroLength,
    #[error("alphabet has {0} atoms; the exhaustive oracle is capped at {1}")]
    AlphabetTooLarge(usize, usize),
}

/// Largest alphabet the exhaustive oracle will attempt. The search is
/// exponential per step; anything bigger than this is a usage error.
pub const ORACLE_ALPHABET_MAX: usize = 20;

/// All timing functions of the given length with final value at most `nu`,
/// in lexicographic order.
pub fn enumerate_timings(lambda: usize, nu: u32) -> Vec<TimingFunction> {
    let mut out = Vec::new();
    if lambda == 0 {
        return out;
    }
    let mut prefix = vec![0u32];
    fn go(prefix: &mut Vec<u32>, lambda: usize, nu: u32, out: &mut Vec<TimingFunction>) {
        if prefix.len() == lambda {
            out.push(TimingFunction::new(prefix.clone()).expect("built increasing"));
            return;
        }
        let remaining = (lambda - prefix.len() - 1) as u32;
        let last = *prefix.last().unwrap();
        let mut v = last + 1;
        while v + remaining <= nu {
            prefix.push(v);
            go(prefix, lambda, nu, out);
            prefix.pop();
            v += 1;
        }
    }
    if lambda == 1 {
        out.push(TimingFunction::new(prefix.clone()).expect("anchored"));
    } else {
        go(&mut prefix, lambda, nu, &mut out);
    }
    out
}

/// Classical truth of a rule instance at step `k` of a total trace prefix
/// that is defined at least up to the steps the instance mentions.
fn holds_total_at(
    steps: &[BTreeSet<AtomName>],
    tau: &TimingFunction,
    lambda: usize,
    r: &MetricRule,
    k: usize,
) -> bool {
    let body_sat = r.body.iter().all(|lit| {
        let truth = match &lit.atom {
            BodyAtom::Atom(a) => steps[k].contains(a),
            BodyAtom::Initial => k == 0,
            BodyAtom::Final => k == lambda - 1,
        };
        truth != lit.negated
    });
    if !body_sat {
        return true;
    }
    match &r.head {
        RuleHead::Disjunction(lits) => lits
            .iter()
            .any(|lit| steps[k].contains(&lit.atom) != lit.negated),
        RuleHead::MetricNext(i, a) => {
            k + 1 < lambda && i.contains(tau.gap(k)) && steps[k + 1].contains(a)
        }
    }
}

/// Exhaustively enumerate the metric equilibrium models of `p` among traces
/// of length `lambda` whose final time is at most `nu`.
pub fn metric_equilibrium_models(
    p: &MetricProgram,
    lambda: usize,
    nu: u32,
) -> Result<ModelSet<TimedTrace>, OracleError> {
    if lambda == 0 {
        return Err(OracleError::ZeroLength);
    }
    let alphabet: Vec<AtomName> = p.alphabet().into_iter().collect();
    if alphabet.len() > ORACLE_ALPHABET_MAX {
        return Err(OracleError::AlphabetTooLarge(alphabet.len(), ORACLE_ALPHABET_MAX));
    }
    let subsets = all_subsets(&alphabet);
    let formulas: Vec<MetricFormula> = p.rules.iter().map(rule_formula).collect();
    let mut models = Vec::new();
    for tau in enumerate_timings(lambda, nu) {
        let mut steps: Vec<BTreeSet<AtomName>> = Vec::with_capacity(lambda);
        search_traces(p, &formulas, &subsets, &tau, lambda, &mut steps, &mut models);
    }
    Ok(ModelSet::new(models))
}

fn all_subsets(alphabet: &[AtomName]) -> Vec<BTreeSet<AtomName>> {
    let n = alphabet.len();
    (0..1usize << n)
        .map(|mask| {
            alphabet
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

fn search_traces(
    p: &MetricProgram,
    formulas: &[MetricFormula],
    subsets: &[BTreeSet<AtomName>],
    tau: &TimingFunction,
    lambda: usize,
    steps: &mut Vec<BTreeSet<AtomName>>,
    models: &mut Vec<TimedTrace>,
) {
    if steps.len() == lambda {
        let candidate = TimedTrace::total(steps.clone(), tau.clone()).expect("total trace");
        // The prefix checks are an optimization; re-confirm with the
        // reference evaluator before testing minimality.
        if is_model(&candidate, p) && is_minimal(&candidate, formulas) {
            models.push(candidate);
        }
        return;
    }
    for sub in subsets {
        steps.push(sub.clone());
        let j = steps.len() - 1;
        let mut ok = true;
        if j >= 1 {
            ok = p.rules.iter().all(|r| holds_total_at(steps, tau, lambda, r, j - 1));
        }
        if ok && j == lambda - 1 {
            ok = p.rules.iter().all(|r| holds_total_at(steps, tau, lambda, r, j));
        }
        if ok {
            search_traces(p, formulas, subsets, tau, lambda, steps, models);
        }
        steps.pop();
    }
}

/// No proper here-trace below the total candidate may satisfy the program.
fn is_minimal(candidate: &TimedTrace, formulas: &[MetricFormula]) -> bool {
    let lambda = candidate.len();
    let per_step: Vec<Vec<BTreeSet<AtomName>>> = (0..lambda)
        .map(|k| descending_subsets(candidate.there(k)))
        .collect();
    let mut idx = vec![0usize; lambda];
    loop {
        if idx.iter().any(|&i| i != 0) {
            let here: Vec<BTreeSet<AtomName>> =
                (0..lambda).map(|k| per_step[k][idx[k]].clone()).collect();
            let m = candidate.with_here(here).expect("subsets of there");
            if formulas.iter().all(|f| (0..lambda).all(|k| satisfies(&m, k, f))) {
                return false;
            }
        }
        // odometer over per-step subset indices
        let mut pos = lambda;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_step[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All subsets of `set`, largest first, so near-total candidates are tried
/// early; dropping one unsupported atom is the common counterexample.
fn descending_subsets(set: &BTreeSet<AtomName>) -> Vec<BTreeSet<AtomName>> {
    let items: Vec<&AtomName> = set.iter().collect();
    let full = (1usize << items.len()) - 1;
    let mut out = Vec::with_capacity(full + 1);
    let mut mask = full;
    loop {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| (*a).clone())
                .collect(),
        );
        if mask == 0 {
            break;
        }
        mask -= 1;
    }
    out
}
