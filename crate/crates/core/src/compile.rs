//! Step-unrolling of metric programs into ground rules over step atoms.
//!
//! The translation of a rule at step `k` replaces every atom `a` by `a` at
//! `k`, folds the position markers to constants, and turns a next head into
//! the successor step atom, or falsity at the last step. Intervals on next
//! heads are deliberately ignored here; both timing encodings re-attach them
//! as separate constraints.

use thiserror::Error;

use crate::types::{
    Backend, BodyAtom, GroundAtom, GroundLiteral, GroundProgram, GroundRule, Literal,
    MetricProgram, MetricRule, PartCounts, RuleHead,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("trace length must be at least 1")]
    ZeroSteps,
    #[error("nu = {nu} cannot accommodate {lambda} strictly increasing times from 0")]
    NuTooSmall { lambda: usize, nu: u32 },
}

/// Settings shared by the translation passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileContext {
    pub lambda: usize,
    pub nu: Option<u32>,
    pub simplify: bool,
}

impl CompileContext {
    pub fn new(lambda: usize, nu: Option<u32>, simplify: bool) -> Result<Self, CompileError> {
        if lambda == 0 {
            return Err(CompileError::ZeroSteps);
        }
        if let Some(nu) = nu {
            if (nu as usize) < lambda - 1 {
                return Err(CompileError::NuTooSmall { lambda, nu });
            }
        }
        Ok(CompileContext { lambda, nu, simplify })
    }
}

/// Translate one body literal to step `k`. The position markers fold to the
/// constants they denote at that step.
pub fn translate_body_literal(lit: &Literal<BodyAtom>, k: usize, lambda: usize) -> GroundLiteral {
    let atom = match &lit.atom {
        BodyAtom::Atom(a) => GroundAtom::step(a.clone(), k),
        BodyAtom::Initial => {
            if k == 0 { GroundAtom::True } else { GroundAtom::False }
        }
        BodyAtom::Final => {
            if k == lambda - 1 { GroundAtom::True } else { GroundAtom::False }
        }
    };
    GroundLiteral::folded(atom, lit.negated)
}

/// Translate a rule at step `k`. Returns `None` when simplification drops the
/// instance because its body folded to falsity.
pub fn translate_rule_at(r: &MetricRule, k: usize, ctx: &CompileContext) -> Option<GroundRule> {
    let head = match &r.head {
        RuleHead::Disjunction(lits) => lits
            .iter()
            .map(|l| Literal { atom: GroundAtom::step(l.atom.clone(), k), negated: l.negated })
            .collect(),
        RuleHead::MetricNext(_, a) => {
            if k + 1 == ctx.lambda {
                Vec::new()
            } else {
                vec![Literal::pos(GroundAtom::step(a.clone(), k + 1))]
            }
        }
    };
    let mut body = Vec::with_capacity(r.body.len());
    for lit in &r.body {
        let lit = translate_body_literal(lit, k, ctx.lambda);
        if ctx.simplify {
            match lit.atom {
                GroundAtom::True => continue,
                GroundAtom::False => return None,
                _ => {}
            }
        }
        body.push(lit);
    }
    Some(GroundRule { head, body })
}

/// Unroll the whole program over steps `0..lambda`, in (rule, step) order.
/// The generated count is exactly `lambda * |p|`; simplification may keep
/// fewer rules.
pub fn unroll_rules(p: &MetricProgram, ctx: &CompileContext) -> (Vec<GroundRule>, usize) {
    let generated = ctx.lambda * p.rules.len();
    let mut rules = Vec::with_capacity(generated);
    for r in &p.rules {
        for k in 0..ctx.lambda {
            if let Some(rule) = translate_rule_at(r, k, ctx) {
                rules.push(rule);
            }
        }
    }
    (rules, generated)
}

/// The step-unrolled core as a standalone ground program.
pub fn unroll(p: &MetricProgram, ctx: &CompileContext) -> GroundProgram {
    let (rules, generated) = unroll_rules(p, ctx);
    let kept = rules.len();
    GroundProgram {
        backend: Backend::Bool,
        rules,
        generated: PartCounts { core: generated, ..PartCounts::default() },
        kept: PartCounts { core: kept, ..PartCounts::default() },
    }
}

/// Drop folded truth from bodies and whole rules whose body folded to
/// falsity. Used by the pipelines on parts generated without simplification.
pub fn simplify_rules(rules: Vec<GroundRule>) -> Vec<GroundRule> {
    rules
        .into_iter()
        .filter_map(|r| {
            let mut body = Vec::with_capacity(r.body.len());
            for lit in r.body {
                match lit.atom {
                    GroundAtom::True => continue,
                    GroundAtom::False => return None,
                    _ => body.push(lit),
                }
            }
            Some(GroundRule { head: r.head, body })
        })
        .collect()
}
