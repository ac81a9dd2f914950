//! Textual output for compiled programs: solver-facing ASP text, the
//! difference-constraint dialect, a versioned JSON interchange format with a
//! paired reader, and size statistics.
//!
//! All emitters are deterministic: rules print in stored order, lines end in
//! a single newline, and nothing depends on locale or platform.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{
    AtomName, Backend, DiffAtom, GroundAtom, GroundLiteral, GroundProgram, GroundRule, PartCounts,
    StepAtom, TimeAtom, TimeVar,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EmitError {
    #[error("the asp emitter expects a propositional program")]
    ExpectedBool,
    #[error("the dc emitter expects a difference-constraint program")]
    ExpectedDc,
    #[error("malformed interchange document: {0}")]
    Json(String),
}

/// Plain ASP text for a propositional program. Atom syntax is `o(name,step)`
/// for step atoms and `t(step,value)` for clock atoms; the `o` wrapper keeps
/// emitted predicates away from user ones.
pub fn emit_asp(prog: &GroundProgram) -> Result<String, EmitError> {
    if prog.backend != Backend::Bool {
        return Err(EmitError::ExpectedBool);
    }
    let mut out = String::new();
    for rule in &prog.rules {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    Ok(out)
}

/// Text for a difference-constraint program. Timing facts print as `&sum`
/// facts. With `head_shift`, an integrity constraint banning exactly one
/// negated constraint atom prints that atom as the rule head instead, which
/// is equivalent because the timing facts define every time variable; other
/// rules print unchanged.
pub fn emit_dc(prog: &GroundProgram, head_shift: bool) -> Result<String, EmitError> {
    if prog.backend != Backend::Dc {
        return Err(EmitError::ExpectedDc);
    }
    let mut out = String::new();
    for rule in &prog.rules {
        let line = match shiftable(rule) {
            Some((atom, rest)) if head_shift => {
                let body = rest
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                if body.is_empty() {
                    format!("{atom}.")
                } else {
                    format!("{atom} :- {body}.")
                }
            }
            _ => rule.to_string(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// The single banned constraint atom and the remaining body, if the rule has
/// the shifted-constraint shape.
fn shiftable(rule: &GroundRule) -> Option<(&DiffAtom, Vec<&GroundLiteral>)> {
    if !rule.head.is_empty() {
        return None;
    }
    let mut banned = None;
    let mut rest = Vec::new();
    for l in &rule.body {
        match &l.atom {
            GroundAtom::Diff(c) if l.negated => {
                if banned.replace(c).is_some() {
                    return None; // two banned atoms form a disjunction, not two heads
                }
            }
            _ => rest.push(l),
        }
    }
    banned.map(|c| (c, rest))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonAtom {
    True,
    False,
    Step { name: String, args: Vec<String>, step: usize },
    Tbool { step: usize, value: u32 },
    Eq {
        step: usize,
        #[serde(rename = "const")]
        value: u32,
    },
    Diffleq { x: usize, y: usize, bound: i64 },
}

#[derive(Serialize, Deserialize)]
struct JsonLit {
    neg: bool,
    atom: JsonAtom,
}

#[derive(Serialize, Deserialize)]
struct JsonRule {
    head: Vec<JsonLit>,
    body: Vec<JsonLit>,
}

#[derive(Serialize, Deserialize)]
struct JsonProgram {
    format: String,
    version: u32,
    backend: Backend,
    rules: Vec<JsonRule>,
}

const JSON_FORMAT: &str = "metac-ground";
const JSON_VERSION: u32 = 1;

fn atom_to_json(atom: &GroundAtom) -> JsonAtom {
    match atom {
        GroundAtom::True => JsonAtom::True,
        GroundAtom::False => JsonAtom::False,
        GroundAtom::Step(s) => JsonAtom::Step {
            name: s.base.symbol().to_string(),
            args: s.base.args().to_vec(),
            step: s.step,
        },
        GroundAtom::Time(t) => JsonAtom::Tbool { step: t.step, value: t.value },
        GroundAtom::Diff(DiffAtom::Eq { var, value }) => {
            JsonAtom::Eq { step: var.step, value: *value }
        }
        GroundAtom::Diff(DiffAtom::Leq { x, y, bound }) => {
            JsonAtom::Diffleq { x: x.step, y: y.step, bound: *bound }
        }
    }
}

fn atom_from_json(atom: JsonAtom) -> Result<GroundAtom, EmitError> {
    Ok(match atom {
        JsonAtom::True => GroundAtom::True,
        JsonAtom::False => GroundAtom::False,
        JsonAtom::Step { name, args, step } => {
            let base = AtomName::new(name, args).map_err(|e| EmitError::Json(e.to_string()))?;
            GroundAtom::Step(StepAtom { base, step })
        }
        JsonAtom::Tbool { step, value } => GroundAtom::Time(TimeAtom { step, value }),
        JsonAtom::Eq { step, value } => {
            GroundAtom::Diff(DiffAtom::Eq { var: TimeVar { step }, value })
        }
        JsonAtom::Diffleq { x, y, bound } => GroundAtom::Diff(DiffAtom::Leq {
            x: TimeVar { step: x },
            y: TimeVar { step: y },
            bound,
        }),
    })
}

fn lit_to_json(lit: &GroundLiteral) -> JsonLit {
    JsonLit { neg: lit.negated, atom: atom_to_json(&lit.atom) }
}

fn lit_from_json(lit: JsonLit) -> Result<GroundLiteral, EmitError> {
    Ok(GroundLiteral { atom: atom_from_json(lit.atom)?, negated: lit.neg })
}

/// Machine-readable form of a ground program. Pre-simplification counters
/// are not part of the document; a round trip preserves backend and rules.
pub fn emit_json(prog: &GroundProgram) -> String {
    let doc = JsonProgram {
        format: JSON_FORMAT.to_string(),
        version: JSON_VERSION,
        backend: prog.backend,
        rules: prog
            .rules
            .iter()
            .map(|r| JsonRule {
                head: r.head.iter().map(lit_to_json).collect(),
                body: r.body.iter().map(lit_to_json).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("infallible serialization")
}

/// Parse a document produced by `emit_json`.
pub fn read_json(text: &str) -> Result<GroundProgram, EmitError> {
    let doc: JsonProgram =
        serde_json::from_str(text).map_err(|e| EmitError::Json(e.to_string()))?;
    if doc.format != JSON_FORMAT {
        return Err(EmitError::Json(format!("unknown format {:?}", doc.format)));
    }
    if doc.version != JSON_VERSION {
        return Err(EmitError::Json(format!(
            "unsupported version {} (expected {JSON_VERSION})",
            doc.version
        )));
    }
    let mut prog = GroundProgram::new(doc.backend);
    for rule in doc.rules {
        let head = rule
            .head
            .into_iter()
            .map(lit_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let body = rule
            .body
            .into_iter()
            .map(lit_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        prog.rules.push(GroundRule { head, body });
    }
    Ok(prog)
}

/// Rule and atom counts of a compiled program, split by part when the
/// program came out of a compilation pipeline (hand-built programs report
/// zero generated/kept counters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub backend: Backend,
    pub rules: usize,
    pub generated: PartCounts,
    pub kept: PartCounts,
    pub step_atoms: usize,
    pub tbool_atoms: usize,
    pub constraint_atoms: usize,
}

pub fn stats(prog: &GroundProgram) -> SizeReport {
    let mut step_atoms = 0;
    let mut tbool_atoms = 0;
    let mut constraint_atoms = 0;
    for atom in prog.atoms() {
        match atom {
            GroundAtom::Step(_) => step_atoms += 1,
            GroundAtom::Time(_) => tbool_atoms += 1,
            GroundAtom::Diff(_) => constraint_atoms += 1,
            GroundAtom::True | GroundAtom::False => {}
        }
    }
    SizeReport {
        backend: prog.backend,
        rules: prog.rules.len(),
        generated: prog.generated,
        kept: prog.kept,
        step_atoms,
        tbool_atoms,
        constraint_atoms,
    }
}

impl std::fmt::Display for SizeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let backend = match self.backend {
            Backend::Bool => "bool",
            Backend::Dc => "dc",
        };
        writeln!(f, "backend: {backend}")?;
        writeln!(f, "rules: {}", self.rules)?;
        writeln!(
            f,
            "  core: {} generated, {} kept",
            self.generated.core, self.kept.core
        )?;
        writeln!(
            f,
            "  timing: {} generated, {} kept",
            self.generated.timing, self.kept.timing
        )?;
        writeln!(
            f,
            "  constraints: {} generated, {} kept",
            self.generated.constraints, self.kept.constraints
        )?;
        write!(
            f,
            "atoms: {} step, {} timing, {} constraint",
            self.step_atoms, self.tbool_atoms, self.constraint_atoms
        )
    }
}
