//! Bundled metric programs: a small planning scenario in two sizes, with a
//! goal-extended variant, plus the two-rule chain used in examples. The
//! `.mlp` files are the distribution format; the accessors parse them once
//! per call and are cheap enough for tests and benchmarks.

use crate::parser::parse_program;
use crate::types::MetricProgram;

pub const DENTIST: &str = include_str!("../../../corpus/dentist.mlp");
pub const DENTIST_GOAL: &str = include_str!("../../../corpus/dentist_goal.mlp");
pub const DENTIST_REDUCED: &str = include_str!("../../../corpus/dentist_reduced.mlp");
pub const TINY: &str = include_str!("../../../corpus/tiny.mlp");

fn parse(name: &str, text: &str) -> MetricProgram {
    match parse_program(text) {
        Ok(out) => {
            debug_assert!(out.warnings.is_empty(), "{name}: {:?}", out.warnings);
            out.program
        }
        Err(diags) => panic!("bundled program {name} failed to parse: {diags:?}"),
    }
}

/// The full scenario: four locations, two items, durations from the travel
/// table, 45 rules over 26 atom names.
pub fn dentist() -> MetricProgram {
    parse("dentist", DENTIST)
}

/// The full scenario plus a goal atom and the constraint that the goal holds
/// at the final step. The deadline itself is imposed at solve time through
/// the timing bound, not in the program.
pub fn dentist_goal() -> MetricProgram {
    parse("dentist_goal", DENTIST_GOAL)
}

/// Two locations and one item; small enough for the exhaustive oracle.
pub fn dentist_reduced() -> MetricProgram {
    parse("dentist_reduced", DENTIST_REDUCED)
}

/// The two-rule chain: a fact at the first step forcing a successor two to
/// three time units later.
pub fn tiny() -> MetricProgram {
    parse("tiny", TINY)
}

/// All bundled programs, name first, in a stable order.
pub fn bundled() -> Vec<(&'static str, MetricProgram)> {
    vec![
        ("dentist", dentist()),
        ("dentist_goal", dentist_goal()),
        ("dentist_reduced", dentist_reduced()),
        ("tiny", tiny()),
    ]
}
