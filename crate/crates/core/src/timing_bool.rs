//! Propositional timing encoding.
//!
//! Time is made explicit with atoms `t(k,d)`: step `k` happens at absolute
//! time `d <= nu`. The timing part anchors `t(0,0)` and forces every chosen
//! time to be followed by a strictly larger one; its rule for the maximal
//! time has an empty head, which rules that time out for all but the last
//! step. The constraint part vetoes every pair of successive times whose gap
//! falls outside the interval of a next rule, which is where the quadratic
//! blowup of this encoding comes from.

use crate::compile::{
    simplify_rules, translate_body_literal, unroll_rules, CompileContext, CompileError,
};
use crate::types::{
    Backend, GroundAtom, GroundProgram, GroundRule, Literal, MetricProgram, PartCounts, RuleHead,
    TimeAtom,
};

fn t(step: usize, value: u32) -> GroundAtom {
    GroundAtom::Time(TimeAtom { step, value })
}

/// The timing rules for `lambda` steps over times `0..=nu`. Exactly
/// `1 + (lambda - 1) * (nu + 1)` rules.
pub fn timing_rules(lambda: usize, nu: u32) -> Result<Vec<GroundRule>, CompileError> {
    CompileContext::new(lambda, Some(nu), false)?;
    let mut rules = vec![GroundRule::fact(t(0, 0))];
    for k in 0..lambda - 1 {
        for d in 0..=nu {
            let head = (d + 1..=nu).map(|d2| Literal::pos(t(k + 1, d2))).collect();
            rules.push(GroundRule { head, body: vec![Literal::pos(t(k, d))] });
        }
    }
    Ok(rules)
}

/// One veto per next rule, step and time pair whose gap misses the interval.
/// Emitted in (rule, step, d, d') order; a pair that misses on both sides of
/// an empty interval is vetoed once.
pub fn constraint_rules(p: &MetricProgram, lambda: usize, nu: u32) -> Vec<GroundRule> {
    let mut rules = Vec::new();
    for r in &p.rules {
        let RuleHead::MetricNext(interval, _) = &r.head else { continue };
        for k in 0..lambda.saturating_sub(1) {
            let body_k: Vec<_> = r
                .body
                .iter()
                .map(|lit| translate_body_literal(lit, k, lambda))
                .collect();
            for d in 0..=nu {
                for d2 in d + 1..=nu {
                    let gap = d2 - d;
                    let miss = gap < interval.lower
                        || interval.upper.is_some_and(|u| gap >= u);
                    if miss {
                        let mut body = body_k.clone();
                        body.push(Literal::pos(t(k, d)));
                        body.push(Literal::pos(t(k + 1, d2)));
                        rules.push(GroundRule::constraint(body));
                    }
                }
            }
        }
    }
    rules
}

/// How many rules `constraint_rules` emits, computed arithmetically. Pairs
/// with gap `g` number `nu + 1 - g`; summing over the vetoed gaps per next
/// rule and multiplying by the steps gives the total without materializing
/// anything.
pub fn count_constraint_rules(p: &MetricProgram, lambda: usize, nu: u32) -> u64 {
    // sum of (nu + 1 - g) for g in lo..=hi, clamped to 1..=nu
    fn pairs_with_gap_in(lo: u32, hi: u32, nu: u32) -> u128 {
        let lo = lo.max(1);
        let hi = hi.min(nu);
        if lo > hi {
            return 0;
        }
        let a = (nu + 1 - hi) as u128;
        let b = (nu + 1 - lo) as u128;
        (a + b) * (b - a + 1) / 2
    }
    let mut per_step: u128 = 0;
    for r in &p.rules {
        let RuleHead::MetricNext(interval, _) = &r.head else { continue };
        let m = interval.lower;
        let below = if m >= 1 { pairs_with_gap_in(1, m - 1, nu) } else { 0 };
        let (above, overlap) = match interval.upper {
            Some(n) => {
                let above = pairs_with_gap_in(n, nu, nu);
                // an empty interval makes the two ranges overlap
                let overlap = if m >= 1 { pairs_with_gap_in(n, m - 1, nu) } else { 0 };
                (above, overlap)
            }
            None => (0, 0),
        };
        per_step += below + above - overlap;
    }
    let total = per_step * (lambda.saturating_sub(1) as u128);
    u64::try_from(total).expect("constraint count exceeds u64")
}

/// The full propositional pipeline: unrolled core, timing part, interval
/// constraints, in that order and with per-part counts recorded.
pub fn compile_bool(
    p: &MetricProgram,
    lambda: usize,
    nu: u32,
    simplify: bool,
) -> Result<GroundProgram, CompileError> {
    let ctx = CompileContext::new(lambda, Some(nu), simplify)?;
    let (core, core_generated) = unroll_rules(p, &ctx);
    let timing = timing_rules(lambda, nu)?;
    let constraints = constraint_rules(p, lambda, nu);
    let generated = PartCounts {
        core: core_generated,
        timing: timing.len(),
        constraints: constraints.len(),
    };
    let constraints = if simplify { simplify_rules(constraints) } else { constraints };
    let kept = PartCounts {
        core: core.len(),
        timing: timing.len(),
        constraints: constraints.len(),
    };
    let mut rules = core;
    rules.extend(timing);
    rules.extend(constraints);
    Ok(GroundProgram { backend: Backend::Bool, rules, generated, kept })
}
