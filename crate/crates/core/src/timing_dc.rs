//! Difference-constraint timing encoding.
//!
//! Instead of one propositional atom per step and time, each step gets an
//! integer variable `t(k)`. The timing part anchors `t(0) = 0` and orders
//! successive steps by `t(k) - t(k+1) <= -1`; the constraint part forbids,
//! per next rule and step, gaps below the lower bound and, for finite upper
//! bounds, gaps at or above it. The program size is linear in the number of
//! steps and does not depend on any time horizon.

use crate::compile::{simplify_rules, translate_body_literal, unroll_rules, CompileContext, CompileError};
use crate::types::{
    Backend, DiffAtom, GroundAtom, GroundProgram, GroundRule, Literal, MetricProgram, PartCounts,
    RuleHead, TimeVar,
};

fn tv(step: usize) -> TimeVar {
    TimeVar { step }
}

/// The timing facts for `lambda` steps: exactly `lambda` of them.
pub fn timing_rules(lambda: usize) -> Result<Vec<GroundRule>, CompileError> {
    CompileContext::new(lambda, None, false)?;
    let mut rules = vec![GroundRule::fact(GroundAtom::Diff(DiffAtom::Eq {
        var: tv(0),
        value: 0,
    }))];
    for k in 0..lambda - 1 {
        rules.push(GroundRule::fact(GroundAtom::Diff(DiffAtom::Leq {
            x: tv(k),
            y: tv(k + 1),
            bound: -1,
        })));
    }
    Ok(rules)
}

/// Per next rule and step: a veto on gaps below the lower bound, and for a
/// finite upper bound a veto on gaps reaching it. At most
/// `2 * (lambda - 1) * |p|` rules, in (rule, step, lower-then-upper) order.
pub fn constraint_rules(p: &MetricProgram, lambda: usize) -> Vec<GroundRule> {
    let mut rules = Vec::new();
    for r in &p.rules {
        let RuleHead::MetricNext(interval, _) = &r.head else { continue };
        for k in 0..lambda.saturating_sub(1) {
            let body_k: Vec<_> = r
                .body
                .iter()
                .map(|lit| translate_body_literal(lit, k, lambda))
                .collect();
            // gap >= lower, stated as: not (t(k) - t(k+1) <= -lower) is a veto
            let mut lower = body_k.clone();
            lower.push(Literal::neg(GroundAtom::Diff(DiffAtom::Leq {
                x: tv(k),
                y: tv(k + 1),
                bound: -(interval.lower as i64),
            })));
            rules.push(GroundRule::constraint(lower));
            if let Some(n) = interval.upper {
                // gap < upper, stated as: not (t(k+1) - t(k) <= upper - 1)
                let mut upper = body_k.clone();
                upper.push(Literal::neg(GroundAtom::Diff(DiffAtom::Leq {
                    x: tv(k + 1),
                    y: tv(k),
                    bound: n as i64 - 1,
                })));
                rules.push(GroundRule::constraint(upper));
            }
        }
    }
    rules
}

/// The full difference-constraint pipeline: unrolled core, timing facts,
/// interval constraints. No time horizon is involved.
pub fn compile_dc(
    p: &MetricProgram,
    lambda: usize,
    simplify: bool,
) -> Result<GroundProgram, CompileError> {
    let ctx = CompileContext::new(lambda, None, simplify)?;
    let (core, core_generated) = unroll_rules(p, &ctx);
    let timing = timing_rules(lambda)?;
    let constraints = constraint_rules(p, lambda);
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
    Ok(GroundProgram { backend: Backend::Dc, rules, generated, kept })
}
