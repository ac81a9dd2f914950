//! Compiler and verification toolkit for metric logic programs over timed
//! traces.
//!
//! The pipeline: parse a metric program, unroll it over a fixed number of
//! steps, attach one of two timing encodings (propositional clock atoms or
//! difference constraints), and hand the result to a text emitter or to the
//! built-in enumerators. The `mht` module holds the reference semantics the
//! rest of the crate is checked against; `verify` wires compiler and
//! semantics together into cross-checks.

pub mod adapters;
pub mod compile;
pub mod corpus;
pub mod emit;
pub mod ht;
pub mod htc;
pub mod mht;
pub mod parser;
pub mod timing_bool;
pub mod timing_dc;
pub mod types;
pub mod verify;

pub use adapters::{run_external, run_solver, AdapterError, ExternalModel, SolverKind};
pub use compile::{unroll, CompileContext, CompileError};
pub use emit::{emit_asp, emit_dc, emit_json, read_json, stats, EmitError, SizeReport};
pub use ht::{enumerate_equilibrium_models, satisfies_rule, EnumConfig, HtError};
pub use htc::{
    dc_feasible, denotes, enumerate_constraint_equilibrium_models_bounded, enumerate_dc_models,
    htc_satisfies, DcModel, DiffSystem, HtcConfig, HtcError, Valuation,
};
pub use mht::{metric_equilibrium_models, MetricFormula, OracleError};
pub use parser::{parse_program, ParseDiagnostic, ParseOutcome, Severity};
pub use timing_bool::compile_bool;
pub use timing_dc::compile_dc;
pub use verify::{
    bench, crosscheck_bool, crosscheck_dc, crosscheck_many, random_program, scale_intervals,
    BenchReport, CheckConfig, GeneratorParams, VerificationReport, VerifyError,
};
pub use types::{
    AtomName, Backend, BodyAtom, DiffAtom, GroundAtom, GroundLiteral, GroundProgram, GroundRule,
    Interval, Literal, MetricProgram, MetricRule, ModelSet, PartCounts, RuleHead, StepAtom,
    TimeAtom, TimeVar, TimedTrace, TimingFunction, TypeError,
};
