//! Equilibrium model enumeration for ground propositional programs.
//!
//! `satisfies_rule` is the two-world satisfaction relation on an
//! interpretation pair and is kept as a direct transcription of its
//! definition. The enumerator searches for classical models with a
//! backtracking walk that prunes a branch as soon as some rule has a fully
//! assigned, satisfied body and a fully assigned, unsatisfied head, then
//! checks minimality per model by looking for a strictly smaller here-world
//! that still satisfies every rule at the fixed there-world.
//!
//! The walk additionally prunes on lack of support: in an equilibrium model
//! every true atom has a rule with a true body whose head is true only
//! through that atom (drop the atom from the model and that rule is
//! violated by the smaller here-world; if no rule is, the smaller world is a
//! countermodel). An atom assigned true whose candidate rules are all dead
//! under the partial assignment can therefore be abandoned early. This keeps
//! self-supporting loops — their rules look alive — so the per-model
//! minimality check remains the final authority.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::types::{GroundAtom, GroundProgram, GroundRule, ModelSet};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HtError {
    #[error(
        "program has {atoms} atoms, above the cap of {cap}; raise --atom-cap if this is intended"
    )]
    AtomCapExceeded { atoms: usize, cap: usize },
    #[error("program contains constraint atoms; this solver handles only step and timing atoms")]
    NotBoolean,
}

/// Limits for the exhaustive enumerator. The atom cap is a guardrail against
/// accidental exponential blowups, not a semantic limit.
#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    pub atom_cap: usize,
}

pub const DEFAULT_ATOM_CAP: usize = 24;

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { atom_cap: DEFAULT_ATOM_CAP }
    }
}

fn literal_truth(
    atom: &GroundAtom,
    negated: bool,
    world: &BTreeSet<GroundAtom>,
    there: &BTreeSet<GroundAtom>,
) -> bool {
    match atom {
        GroundAtom::True => !negated,
        GroundAtom::False => negated,
        GroundAtom::Diff(_) => panic!("constraint atom in a propositional rule"),
        _ => {
            if negated {
                !there.contains(atom)
            } else {
                world.contains(atom)
            }
        }
    }
}

/// Two-world satisfaction of one rule by the pair `(here, there)` with
/// `here` included in `there`: at both worlds, a satisfied body requires a
/// satisfied head. Negation consults the there-world at either world.
pub fn satisfies_rule(
    here: &BTreeSet<GroundAtom>,
    there: &BTreeSet<GroundAtom>,
    rule: &GroundRule,
) -> bool {
    debug_assert!(here.is_subset(there));
    for world in [here, there] {
        let body_sat = rule
            .body
            .iter()
            .all(|l| literal_truth(&l.atom, l.negated, world, there));
        if body_sat {
            let head_sat = rule
                .head
                .iter()
                .any(|l| literal_truth(&l.atom, l.negated, world, there));
            if !head_sat {
                return false;
            }
        }
    }
    true
}

/// Whether the pair is a model of the whole program.
pub fn satisfies_program(
    here: &BTreeSet<GroundAtom>,
    there: &BTreeSet<GroundAtom>,
    prog: &GroundProgram,
) -> bool {
    prog.rules.iter().all(|r| satisfies_rule(here, there, r))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IdxAtom {
    Const(bool),
    Var(usize),
}

struct IdxLit {
    atom: IdxAtom,
    negated: bool,
}

struct IdxRule {
    head: Vec<IdxLit>,
    body: Vec<IdxLit>,
}

impl IdxLit {
    /// Three-valued truth under a partial assignment; negation is classical
    /// here because the there-world is what is being searched.
    fn truth(&self, assignment: &[Option<bool>]) -> Option<bool> {
        let v = match self.atom {
            IdxAtom::Const(b) => Some(b),
            IdxAtom::Var(i) => assignment[i],
        };
        v.map(|b| b != self.negated)
    }
}

impl IdxRule {
    fn certainly_violated(&self, assignment: &[Option<bool>]) -> bool {
        self.body.iter().all(|l| l.truth(assignment) == Some(true))
            && self.head.iter().all(|l| l.truth(assignment) == Some(false))
    }
}

/// Incremental support tracking. A rule can witness an atom `a` while its
/// counters say: no positive body literal is false, no negated body atom is
/// true, no negated head disjunct's atom is false, and `a` is its only true
/// positive head disjunct. All four counters only grow along a branch, so a
/// witness lost stays lost and pruning at zero support is safe.
struct SupportState {
    pos_body_false: Vec<u32>,
    neg_body_true: Vec<u32>,
    neg_head_false: Vec<u32>,
    pos_head_true: Vec<u32>,
    occ_pos_body: Vec<Vec<usize>>,
    occ_neg_body: Vec<Vec<usize>>,
    occ_pos_head: Vec<Vec<usize>>,
    occ_neg_head: Vec<Vec<usize>>,
    /// Rules that may witness the atom: it occurs in the positive head and
    /// not in the positive body, so the rule is falsified by removing it.
    witness_rules: Vec<Vec<usize>>,
    rule_pos_head: Vec<Vec<usize>>,
}

impl SupportState {
    fn new(rules: &[IdxRule], vars: usize) -> SupportState {
        let n = rules.len();
        let mut s = SupportState {
            pos_body_false: vec![0; n],
            neg_body_true: vec![0; n],
            neg_head_false: vec![0; n],
            pos_head_true: vec![0; n],
            occ_pos_body: vec![Vec::new(); vars],
            occ_neg_body: vec![Vec::new(); vars],
            occ_pos_head: vec![Vec::new(); vars],
            occ_neg_head: vec![Vec::new(); vars],
            witness_rules: vec![Vec::new(); vars],
            rule_pos_head: vec![Vec::new(); n],
        };
        for (ri, r) in rules.iter().enumerate() {
            let mut pos_body = BTreeSet::new();
            let mut neg_body = BTreeSet::new();
            let mut pos_head = BTreeSet::new();
            let mut neg_head = BTreeSet::new();
            let mut dead = false;
            for l in &r.body {
                match (l.atom, l.negated) {
                    (IdxAtom::Const(true), false) | (IdxAtom::Const(false), true) => {}
                    (IdxAtom::Const(_), _) => dead = true,
                    (IdxAtom::Var(i), false) => {
                        pos_body.insert(i);
                    }
                    (IdxAtom::Var(i), true) => {
                        neg_body.insert(i);
                    }
                }
            }
            for l in &r.head {
                match (l.atom, l.negated) {
                    // a constant-true disjunct satisfies the rule everywhere
                    (IdxAtom::Const(true), false) | (IdxAtom::Const(false), true) => dead = true,
                    (IdxAtom::Const(_), _) => {}
                    (IdxAtom::Var(i), false) => {
                        pos_head.insert(i);
                    }
                    (IdxAtom::Var(i), true) => {
                        neg_head.insert(i);
                    }
                }
            }
            if dead {
                s.pos_body_false[ri] = 1;
                continue;
            }
            for &i in &pos_body {
                s.occ_pos_body[i].push(ri);
            }
            for &i in &neg_body {
                s.occ_neg_body[i].push(ri);
            }
            for &i in &neg_head {
                s.occ_neg_head[i].push(ri);
            }
            for &i in &pos_head {
                s.occ_pos_head[i].push(ri);
                s.rule_pos_head[ri].push(i);
                if !pos_body.contains(&i) {
                    s.witness_rules[i].push(ri);
                }
            }
        }
        s
    }

    fn supported(&self, v: usize) -> bool {
        self.witness_rules[v].iter().any(|&r| {
            self.pos_body_false[r] == 0
                && self.neg_body_true[r] == 0
                && self.neg_head_false[r] == 0
                && self.pos_head_true[r] == 1
        })
    }

    /// Apply the counter updates for an assignment and report whether some
    /// true atom just lost its last potential witness. Counters are applied
    /// unconditionally so `unassign` stays symmetric.
    fn assign(&mut self, v: usize, value: bool, assignment: &[Option<bool>]) -> bool {
        let mut degraded: Vec<usize> = Vec::new();
        if value {
            for &r in &self.occ_neg_body[v] {
                self.neg_body_true[r] += 1;
                if self.neg_body_true[r] == 1 {
                    degraded.push(r);
                }
            }
            for &r in &self.occ_pos_head[v] {
                self.pos_head_true[r] += 1;
                if self.pos_head_true[r] == 2 {
                    degraded.push(r);
                }
            }
        } else {
            for &r in &self.occ_pos_body[v] {
                self.pos_body_false[r] += 1;
                if self.pos_body_false[r] == 1 {
                    degraded.push(r);
                }
            }
            for &r in &self.occ_neg_head[v] {
                self.neg_head_false[r] += 1;
                if self.neg_head_false[r] == 1 {
                    degraded.push(r);
                }
            }
        }
        if value && !self.supported(v) {
            return true;
        }
        for r in degraded {
            for &u in &self.rule_pos_head[r] {
                if assignment[u] == Some(true) && !self.supported(u) {
                    return true;
                }
            }
        }
        false
    }

    fn unassign(&mut self, v: usize, value: bool) {
        if value {
            for &r in &self.occ_neg_body[v] {
                self.neg_body_true[r] -= 1;
            }
            for &r in &self.occ_pos_head[v] {
                self.pos_head_true[r] -= 1;
            }
        } else {
            for &r in &self.occ_pos_body[v] {
                self.pos_body_false[r] -= 1;
            }
            for &r in &self.occ_neg_head[v] {
                self.neg_head_false[r] -= 1;
            }
        }
    }
}

/// Enumerate the equilibrium models of a ground program without constraint
/// atoms: the classical models whose true atoms cannot be shrunk to a
/// strictly smaller here-world that still satisfies the program.
pub fn enumerate_equilibrium_models(
    prog: &GroundProgram,
    config: EnumConfig,
) -> Result<ModelSet<BTreeSet<GroundAtom>>, HtError> {
    let atom_set = prog.atoms();
    if atom_set.iter().any(|a| matches!(a, GroundAtom::Diff(_))) {
        return Err(HtError::NotBoolean);
    }
    if atom_set.len() > config.atom_cap {
        return Err(HtError::AtomCapExceeded { atoms: atom_set.len(), cap: config.atom_cap });
    }
    // Step-major search order so rules, which couple at most two adjacent
    // steps, become checkable as early as possible.
    let mut atoms: Vec<GroundAtom> = atom_set.into_iter().collect();
    atoms.sort_by_key(|a| match a {
        GroundAtom::Step(s) => (s.step, 0u8, Some(s.base.clone()), 0u32),
        GroundAtom::Time(t) => (t.step, 1, None, t.value),
        _ => unreachable!("constants are not part of the atom universe"),
    });
    let index_of = |a: &GroundAtom| atoms.binary_search_by(|probe| {
        let key = |x: &GroundAtom| match x {
            GroundAtom::Step(s) => (s.step, 0u8, Some(s.base.clone()), 0u32),
            GroundAtom::Time(t) => (t.step, 1, None, t.value),
            _ => unreachable!(),
        };
        key(probe).cmp(&key(a))
    });
    let to_idx = |lit: &crate::types::GroundLiteral| IdxLit {
        atom: match &lit.atom {
            GroundAtom::True => IdxAtom::Const(true),
            GroundAtom::False => IdxAtom::Const(false),
            a => IdxAtom::Var(index_of(a).expect("atom collected from program")),
        },
        negated: lit.negated,
    };
    let rules: Vec<IdxRule> = prog
        .rules
        .iter()
        .map(|r| IdxRule {
            head: r.head.iter().map(to_idx).collect(),
            body: r.body.iter().map(to_idx).collect(),
        })
        .collect();

    // Rules without variables never get re-checked during the walk.
    let no_assignment = vec![None; atoms.len()];
    for r in &rules {
        let no_vars = r
            .head
            .iter()
            .chain(&r.body)
            .all(|l| matches!(l.atom, IdxAtom::Const(_)));
        if no_vars && r.certainly_violated(&no_assignment) {
            return Ok(ModelSet::new(Vec::new()));
        }
    }

    let mut var_rules: Vec<Vec<usize>> = vec![Vec::new(); atoms.len()];
    for (ri, r) in rules.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for l in r.head.iter().chain(&r.body) {
            if let IdxAtom::Var(i) = l.atom {
                if seen.insert(i) {
                    var_rules[i].push(ri);
                }
            }
        }
    }

    let mut assignment = vec![None; atoms.len()];
    let mut support = SupportState::new(&rules, atoms.len());
    let mut models = Vec::new();
    search(&rules, &var_rules, &mut support, &mut assignment, 0, &mut |assignment| {
        if is_minimal(&rules, assignment) {
            let model: BTreeSet<GroundAtom> = assignment
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == Some(true))
                .map(|(i, _)| atoms[i].clone())
                .collect();
            models.push(model);
        }
    });
    Ok(ModelSet::new(models))
}

fn search(
    rules: &[IdxRule],
    var_rules: &[Vec<usize>],
    support: &mut SupportState,
    assignment: &mut Vec<Option<bool>>,
    next: usize,
    on_model: &mut impl FnMut(&[Option<bool>]),
) {
    if next == assignment.len() {
        on_model(assignment);
        return;
    }
    for value in [false, true] {
        assignment[next] = Some(value);
        let pruned = var_rules[next]
            .iter()
            .any(|&ri| rules[ri].certainly_violated(assignment));
        let unsupported = support.assign(next, value, assignment);
        if !pruned && !unsupported {
            search(rules, var_rules, support, assignment, next + 1, on_model);
        }
        support.unassign(next, value);
    }
    assignment[next] = None;
}

/// Minimality at a fixed there-world. The program reduces to positive
/// implications over the true atoms: negated literals and constants have a
/// fixed truth there, and positive atoms outside the model can never hold in
/// a here-world below it. A depth-first walk that tries `false` first visits
/// the full here-world last, so any model found earlier is a proper one.
fn is_minimal(rules: &[IdxRule], there: &[Option<bool>]) -> bool {
    let truth = |l: &IdxLit| -> bool {
        match l.atom {
            IdxAtom::Const(b) => b != l.negated,
            IdxAtom::Var(i) => (there[i] == Some(true)) != l.negated,
        }
    };
    let true_atoms: Vec<usize> = (0..there.len()).filter(|&i| there[i] == Some(true)).collect();
    if true_atoms.is_empty() {
        return true;
    }
    let local = |i: usize| true_atoms.binary_search(&i).expect("true atom");

    struct Reduct {
        body: Vec<usize>,
        head: Vec<usize>,
    }
    let mut reduct: Vec<Reduct> = Vec::new();
    'rules: for r in rules {
        let mut body = Vec::new();
        for l in &r.body {
            match l.atom {
                IdxAtom::Var(i) if !l.negated => {
                    if there[i] == Some(true) {
                        body.push(local(i));
                    } else {
                        continue 'rules; // body unsatisfiable below the model
                    }
                }
                _ => {
                    if !truth(l) {
                        continue 'rules; // fixed-false literal satisfies the rule
                    }
                }
            }
        }
        let mut head = Vec::new();
        for l in &r.head {
            match l.atom {
                IdxAtom::Var(i) if !l.negated => {
                    if there[i] == Some(true) {
                        head.push(local(i));
                    }
                }
                _ => {
                    if truth(l) {
                        continue 'rules; // fixed-true disjunct satisfies the rule
                    }
                }
            }
        }
        reduct.push(Reduct { body, head });
    }

    // A rule with nothing left could only exclude every here-world, which
    // contradicts the there-world being a model.
    debug_assert!(reduct.iter().all(|r| !(r.body.is_empty() && r.head.is_empty())));

    let mut var_rules: Vec<Vec<usize>> = vec![Vec::new(); true_atoms.len()];
    for (ri, r) in reduct.iter().enumerate() {
        for &i in r.body.iter().chain(&r.head) {
            if !var_rules[i].contains(&ri) {
                var_rules[i].push(ri);
            }
        }
    }

    fn find_proper(
        reduct: &[Reduct],
        var_rules: &[Vec<usize>],
        keep: &mut Vec<Option<bool>>,
        next: usize,
    ) -> bool {
        if next == keep.len() {
            return keep.iter().any(|v| *v == Some(false));
        }
        for value in [false, true] {
            keep[next] = Some(value);
            let pruned = var_rules[next].iter().any(|&ri| {
                let r = &reduct[ri];
                r.body.iter().all(|&i| keep[i] == Some(true))
                    && r.head.iter().all(|&i| keep[i] == Some(false))
            });
            if !pruned && find_proper(reduct, var_rules, keep, next + 1) {
                return true;
            }
        }
        keep[next] = None;
        false
    }

    let mut keep = vec![None; true_atoms.len()];
    !find_proper(&reduct, &var_rules, &mut keep, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::timing_bool::compile_bool;
    use crate::types::{AtomName, Backend, GroundLiteral, Literal, TimeAtom};

    fn step(name: &str, k: usize) -> GroundAtom {
        GroundAtom::step(AtomName::prop(name), k)
    }

    fn ground(rules: Vec<GroundRule>) -> GroundProgram {
        let mut p = GroundProgram::new(Backend::Bool);
        p.rules = rules;
        p
    }

    fn set(atoms: &[&GroundAtom]) -> BTreeSet<GroundAtom> {
        atoms.iter().map(|a| (*a).clone()).collect()
    }

    fn models_of(rules: Vec<GroundRule>) -> Vec<BTreeSet<GroundAtom>> {
        enumerate_equilibrium_models(&ground(rules), EnumConfig::default())
            .unwrap()
            .into_iter()
            .collect()
    }

    /// Reference implementation: walk every there-world and every smaller
    /// here-world, using only `satisfies_rule`.
    fn naive_models(prog: &GroundProgram) -> Vec<BTreeSet<GroundAtom>> {
        let atoms: Vec<GroundAtom> = prog.atoms().into_iter().collect();
        let n = atoms.len();
        assert!(n <= 16, "naive reference only for small programs");
        let mut out = Vec::new();
        for mask in 0..1usize << n {
            let there: BTreeSet<GroundAtom> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| atoms[i].clone())
                .collect();
            if !satisfies_program(&there, &there, prog) {
                continue;
            }
            let bits: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let mut minimal = true;
            let m = bits.len();
            for sub in 0..(1usize << m).saturating_sub(1) {
                let here: BTreeSet<GroundAtom> = (0..m)
                    .filter(|j| sub >> j & 1 == 1)
                    .map(|j| atoms[bits[j]].clone())
                    .collect();
                if satisfies_program(&here, &there, prog) {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                out.push(there);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn rule_satisfaction_consults_both_worlds() {
        let a = step("a", 0);
        // a or not a, under an empty here-world below {a}: the here-world
        // satisfies neither disjunct, so the rule fails.
        let rule = GroundRule {
            head: vec![Literal::pos(a.clone()), Literal::neg(a.clone())],
            body: vec![],
        };
        assert!(!satisfies_rule(&set(&[]), &set(&[&a]), &rule));
        assert!(satisfies_rule(&set(&[&a]), &set(&[&a]), &rule));
        assert!(satisfies_rule(&set(&[]), &set(&[]), &rule));
    }

    #[test]
    fn negation_is_fixed_by_the_there_world() {
        let a = step("a", 0);
        let b = step("b", 0);
        let rule = GroundRule {
            head: vec![Literal::pos(b.clone())],
            body: vec![Literal::neg(a.clone())],
        };
        // here-world body holds only if a is absent from the there-world
        assert!(!satisfies_rule(&set(&[]), &set(&[&b]), &rule));
        assert!(satisfies_rule(&set(&[&b]), &set(&[&b]), &rule));
        assert!(satisfies_rule(&set(&[]), &set(&[&a]), &rule));
    }

    #[test]
    fn constants_in_bodies() {
        let a = step("a", 0);
        let fact_true = GroundRule {
            head: vec![Literal::pos(a.clone())],
            body: vec![Literal::pos(GroundAtom::True)],
        };
        let fact_false = GroundRule {
            head: vec![Literal::pos(a.clone())],
            body: vec![Literal::pos(GroundAtom::False)],
        };
        assert_eq!(models_of(vec![fact_true]), vec![set(&[&a])]);
        assert_eq!(models_of(vec![fact_false]), vec![set(&[])]);
    }

    #[test]
    fn empty_head_with_true_body_kills_all_models() {
        let rule = GroundRule { head: vec![], body: vec![Literal::pos(GroundAtom::True)] };
        assert!(models_of(vec![rule]).is_empty());
    }

    #[test]
    fn facts_and_unsupported_atoms() {
        let a = step("a", 0);
        let b = step("b", 0);
        let rules = vec![
            GroundRule::fact(a.clone()),
            GroundRule {
                head: vec![Literal::pos(b.clone())],
                body: vec![Literal::pos(b.clone())],
            },
        ];
        // b only supports itself and is minimized away
        assert_eq!(models_of(rules), vec![set(&[&a])]);
    }

    #[test]
    fn choice_by_head_negation() {
        let a = step("a", 0);
        let rule = GroundRule {
            head: vec![Literal::pos(a.clone()), Literal::neg(a.clone())],
            body: vec![],
        };
        assert_eq!(models_of(vec![rule]), vec![set(&[]), set(&[&a])]);
    }

    #[test]
    fn disjunction_gives_minimal_alternatives() {
        let a = step("a", 0);
        let b = step("b", 0);
        let rule = GroundRule {
            head: vec![Literal::pos(a.clone()), Literal::pos(b.clone())],
            body: vec![],
        };
        assert_eq!(models_of(vec![rule]), vec![set(&[&a]), set(&[&b])]);
    }

    #[test]
    fn even_negation_loop_has_two_models() {
        let a = step("a", 0);
        let b = step("b", 0);
        let rules = vec![
            GroundRule { head: vec![Literal::pos(a.clone())], body: vec![Literal::neg(b.clone())] },
            GroundRule { head: vec![Literal::pos(b.clone())], body: vec![Literal::neg(a.clone())] },
        ];
        assert_eq!(models_of(rules), vec![set(&[&a]), set(&[&b])]);
    }

    #[test]
    fn odd_negation_loop_has_none() {
        let a = step("a", 0);
        let rules = vec![GroundRule {
            head: vec![Literal::pos(a.clone())],
            body: vec![Literal::neg(a.clone())],
        }];
        assert!(models_of(rules).is_empty());
    }

    #[test]
    fn positive_loops_are_not_self_supporting() {
        let a = step("a", 0);
        let b = step("b", 0);
        let rules = vec![
            GroundRule { head: vec![Literal::pos(a.clone())], body: vec![Literal::pos(b.clone())] },
            GroundRule { head: vec![Literal::pos(b.clone())], body: vec![Literal::pos(a.clone())] },
        ];
        assert_eq!(models_of(rules), vec![set(&[])]);
    }

    #[test]
    fn atom_cap_is_enforced_and_overridable() {
        let rules: Vec<GroundRule> =
            (0..4).map(|k| GroundRule::fact(step("a", k))).collect();
        let err = enumerate_equilibrium_models(&ground(rules.clone()), EnumConfig { atom_cap: 3 })
            .unwrap_err();
        assert_eq!(err, HtError::AtomCapExceeded { atoms: 4, cap: 3 });
        assert!(err.to_string().contains("--atom-cap"));
        assert!(
            enumerate_equilibrium_models(&ground(rules), EnumConfig { atom_cap: 4 }).is_ok()
        );
    }

    #[test]
    fn constraint_atoms_are_rejected() {
        use crate::types::{DiffAtom, TimeVar};
        let rule = GroundRule::fact(GroundAtom::Diff(DiffAtom::Eq {
            var: TimeVar { step: 0 },
            value: 0,
        }));
        assert_eq!(
            enumerate_equilibrium_models(&ground(vec![rule]), EnumConfig::default()),
            Err(HtError::NotBoolean)
        );
    }

    #[test]
    fn timing_part_alone_yields_exactly_the_timings() {
        use crate::timing_bool::timing_rules;
        let prog = ground(timing_rules(3, 3).unwrap());
        let models = enumerate_equilibrium_models(&prog, EnumConfig::default()).unwrap();
        // timings 0<t1<t2<=3: (0,1,2),(0,1,3),(0,2,3)
        assert_eq!(models.len(), 3);
        for m in &models {
            assert_eq!(m.len(), 3);
            assert!(m.contains(&GroundAtom::Time(TimeAtom { step: 0, value: 0 })));
        }
    }

    #[test]
    fn support_pruning_keeps_larger_timing_parts_tractable() {
        use crate::timing_bool::timing_rules;
        // 36 clock atoms; without support pruning the classical model count
        // alone (any antichain-violating subset pattern) is astronomically
        // larger than the 56 timed shapes.
        let prog = ground(timing_rules(4, 8).unwrap());
        let models =
            enumerate_equilibrium_models(&prog, EnumConfig { atom_cap: 40 }).unwrap();
        assert_eq!(models.len(), 56);
        for m in &models {
            assert_eq!(m.len(), 4);
        }
    }

    #[test]
    fn backtracking_agrees_with_the_naive_reference() {
        let sources = [
            "a :- initially.\nnext((1,3),b) :- a.\nb; c :- not a, b.\nnext((0,w),c) :- c.",
            "a; b :- initially.\nnext((0,2),c) :- a.\nc; not c :- b.\n:- finally, not c.",
            "a; not a.\nb :- a, not c.\nc :- b.\nnext((1,2),a) :- b.",
        ];
        for src in sources {
            let p = parse_program(src).unwrap().program;
            for lambda in 1..=2usize {
                for nu in [1u32, 2] {
                    if (nu as usize) < lambda - 1 {
                        continue;
                    }
                    for simplify in [false, true] {
                        let prog = compile_bool(&p, lambda, nu, simplify).unwrap();
                        let fast: Vec<_> =
                            enumerate_equilibrium_models(&prog, EnumConfig::default())
                                .unwrap()
                                .into_iter()
                                .collect();
                        assert_eq!(fast, naive_models(&prog), "{src:?} lambda={lambda} nu={nu}");
                    }
                }
            }
        }
    }

    #[test]
    fn minimality_rechecked_against_satisfies_rule() {
        let a = step("a", 0);
        let b = step("b", 0);
        let c = step("c", 1);
        let rules = vec![
            GroundRule {
                head: vec![Literal::pos(a.clone()), Literal::pos(b.clone())],
                body: vec![],
            },
            GroundRule {
                head: vec![Literal::pos(c.clone())],
                body: vec![Literal::pos(a.clone())],
            },
            GroundRule::constraint(vec![GroundLiteral::neg(c.clone())]),
        ];
        let prog = ground(rules);
        let models = enumerate_equilibrium_models(&prog, EnumConfig::default()).unwrap();
        // b alone cannot satisfy the constraint that demands c
        assert_eq!(models.len(), 1);
        let model = &models.as_slice()[0];
        assert_eq!(model, &set(&[&a, &c]));
        // re-check minimality directly
        let bits: Vec<&GroundAtom> = model.iter().collect();
        for sub in 0..(1usize << bits.len()) - 1 {
            let here: BTreeSet<GroundAtom> = bits
                .iter()
                .enumerate()
                .filter(|(j, _)| sub >> j & 1 == 1)
                .map(|(_, a)| (*a).clone())
                .collect();
            assert!(!satisfies_program(&here, model, &prog));
        }
    }
}
