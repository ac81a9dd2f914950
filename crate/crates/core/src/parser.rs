//! Parser for the metric program surface syntax.
//!
//! ```text
//! program := rule*
//! rule    := head ":-" body "." | head "." | ":-" body "."
//! head    := hlit (";" hlit)*
//!          | "next" "(" "(" nat "," (nat | "w") ")" "," atom ")"
//! hlit    := ("not")? atom
//! body    := blit ("," blit)*
//! blit    := ("not")? (atom | "initially" | "finally")
//! atom    := ident ("(" term ("," term)* ")")?
//! term    := ident | nat
//! ```
//!
//! `%` starts a comment running to the end of the line. The input must be
//! ground: uppercase identifiers are rejected with a dedicated diagnostic.
//! Empty intervals parse but produce a warning. The names `o` and `t` are
//! reserved for the emitters and refused as predicate symbols.

use std::fmt;

use crate::types::{
    AtomName, BodyAtom, Interval, Literal, MetricProgram, MetricRule, RuleHead,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

/// A message tied to a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, kind, self.message)
    }
}

/// A successfully parsed program plus any warnings encountered on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub program: MetricProgram,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Parse a whole source file. On failure every diagnostic collected up to the
/// end of the input is returned, warnings included, so a caller can report
/// more than the first mistake.
pub fn parse_program(source: &str) -> Result<ParseOutcome, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let tokens = lex(source, &mut diags);
    let mut parser = Parser { tokens: &tokens, pos: 0, diags };
    let mut rules = Vec::new();
    while !parser.at_end() {
        match parser.rule() {
            Some(rule) => rules.push(rule),
            None => parser.recover(),
        }
    }
    let (warnings, errors): (Vec<_>, Vec<_>) = parser
        .diags
        .into_iter()
        .partition(|d| d.severity == Severity::Warning);
    if errors.is_empty() {
        Ok(ParseOutcome { program: MetricProgram { rules }, warnings })
    } else {
        let mut all = errors;
        all.extend(warnings);
        all.sort_by_key(|d| (d.line, d.column));
        Err(all)
    }
}

const KEYWORDS: [&str; 4] = ["not", "initially", "finally", "next"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Upper(String),
    Nat(u32),
    Implies,
    Dot,
    Comma,
    Semi,
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "'{s}'"),
            TokenKind::Upper(s) => write!(f, "'{s}'"),
            TokenKind::Nat(n) => write!(f, "'{n}'"),
            TokenKind::Implies => write!(f, "':-'"),
            TokenKind::Dot => write!(f, "'.'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Semi => write!(f, "';'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

fn lex(source: &str, diags: &mut Vec<ParseDiagnostic>) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = source.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '%' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            '.' | ',' | ';' | '(' | ')' => {
                bump(&mut chars);
                let kind = match c {
                    '.' => TokenKind::Dot,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semi,
                    '(' => TokenKind::LParen,
                    _ => TokenKind::RParen,
                };
                tokens.push(Token { kind, line: tline, column: tcol });
            }
            ':' => {
                bump(&mut chars);
                if chars.peek() == Some(&'-') {
                    bump(&mut chars);
                    tokens.push(Token { kind: TokenKind::Implies, line: tline, column: tcol });
                } else {
                    diags.push(ParseDiagnostic {
                        severity: Severity::Error,
                        line: tline,
                        column: tcol,
                        message: "expected ':-'".into(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    text.push(bump(&mut chars));
                }
                match text.parse::<u32>() {
                    Ok(n) => tokens.push(Token { kind: TokenKind::Nat(n), line: tline, column: tcol }),
                    Err(_) => diags.push(ParseDiagnostic {
                        severity: Severity::Error,
                        line: tline,
                        column: tcol,
                        message: format!("number {text} is too large"),
                    }),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while chars.peek().is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_') {
                    text.push(bump(&mut chars));
                }
                let kind = if c.is_ascii_uppercase() {
                    TokenKind::Upper(text)
                } else {
                    TokenKind::Ident(text)
                };
                tokens.push(Token { kind, line: tline, column: tcol });
            }
            c => {
                bump(&mut chars);
                diags.push(ParseDiagnostic {
                    severity: Severity::Error,
                    line: tline,
                    column: tcol,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    tokens
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    diags: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn advance(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn position(&self) -> (usize, usize) {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        }
    }

    fn error(&mut self, message: impl Into<String>) {
        let (line, column) = self.position();
        self.diags.push(ParseDiagnostic {
            severity: Severity::Error,
            line,
            column,
            message: message.into(),
        });
    }

    fn warn(&mut self, message: impl Into<String>) {
        let (line, column) = self.position();
        self.diags.push(ParseDiagnostic {
            severity: Severity::Warning,
            line,
            column,
            message: message.into(),
        });
    }

    /// Skip past the next '.' so later rules still get checked.
    fn recover(&mut self) {
        loop {
            match self.advance() {
                None => return,
                Some(t) if t.kind == TokenKind::Dot => return,
                Some(_) => {}
            }
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Option<()> {
        match self.peek() {
            Some(k) if *k == kind => {
                self.advance();
                Some(())
            }
            Some(k) => {
                self.error(format!("expected {kind}, found {k}"));
                None
            }
            None => {
                self.error(format!("expected {kind}, found end of input"));
                None
            }
        }
    }

    fn rule(&mut self) -> Option<MetricRule> {
        let head = match self.peek() {
            Some(TokenKind::Implies) => RuleHead::Disjunction(Vec::new()),
            _ => self.head()?,
        };
        match self.peek() {
            Some(TokenKind::Dot) => {
                if matches!(&head, RuleHead::Disjunction(lits) if lits.is_empty()) {
                    self.error("a constraint needs a body");
                    return None;
                }
                self.advance();
                Some(MetricRule { head, body: Vec::new() })
            }
            Some(TokenKind::Implies) => {
                self.advance();
                let body = self.body()?;
                self.expect(TokenKind::Dot)?;
                Some(MetricRule { head, body })
            }
            Some(k) => {
                self.error(format!("expected '.' or ':-', found {k}"));
                None
            }
            None => {
                self.error("expected '.' or ':-', found end of input");
                None
            }
        }
    }

    fn head(&mut self) -> Option<RuleHead> {
        if let Some(TokenKind::Ident(s)) = self.peek() {
            if s == "next" {
                return self.next_head();
            }
        }
        let mut lits = vec![self.head_literal()?];
        while self.peek() == Some(&TokenKind::Semi) {
            self.advance();
            lits.push(self.head_literal()?);
        }
        Some(RuleHead::Disjunction(lits))
    }

    fn next_head(&mut self) -> Option<RuleHead> {
        self.advance();
        self.expect(TokenKind::LParen)?;
        self.expect(TokenKind::LParen)?;
        let lower = self.nat()?;
        self.expect(TokenKind::Comma)?;
        let upper = match self.peek() {
            Some(TokenKind::Ident(s)) if s == "w" => {
                self.advance();
                None
            }
            Some(TokenKind::Nat(_)) => Some(self.nat()?),
            _ => {
                self.error("expected an upper bound or 'w'");
                return None;
            }
        };
        let interval = Interval { lower, upper };
        if interval.is_empty() {
            self.warn(format!("interval {interval} is empty"));
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Comma)?;
        let atom = self.atom()?;
        self.expect(TokenKind::RParen)?;
        Some(RuleHead::MetricNext(interval, atom))
    }

    fn head_literal(&mut self) -> Option<Literal<AtomName>> {
        let negated = self.eat_not();
        let atom = self.atom()?;
        Some(Literal { atom, negated })
    }

    fn body(&mut self) -> Option<Vec<Literal<BodyAtom>>> {
        let mut lits = vec![self.body_literal()?];
        while self.peek() == Some(&TokenKind::Comma) {
            self.advance();
            lits.push(self.body_literal()?);
        }
        Some(lits)
    }

    fn body_literal(&mut self) -> Option<Literal<BodyAtom>> {
        let negated = self.eat_not();
        match self.peek() {
            Some(TokenKind::Ident(s)) if s == "initially" => {
                self.advance();
                Some(Literal { atom: BodyAtom::Initial, negated })
            }
            Some(TokenKind::Ident(s)) if s == "finally" => {
                self.advance();
                Some(Literal { atom: BodyAtom::Final, negated })
            }
            Some(TokenKind::Ident(s)) if s == "next" => {
                self.error("'next' is only allowed as a rule head");
                None
            }
            _ => {
                let atom = self.atom()?;
                Some(Literal { atom: BodyAtom::Atom(atom), negated })
            }
        }
    }

    fn eat_not(&mut self) -> bool {
        if let Some(TokenKind::Ident(s)) = self.peek() {
            if s == "not" {
                self.advance();
                return true;
            }
        }
        false
    }

    fn nat(&mut self) -> Option<u32> {
        match self.peek() {
            Some(&TokenKind::Nat(n)) => {
                self.advance();
                Some(n)
            }
            Some(k) => {
                self.error(format!("expected a natural number, found {k}"));
                None
            }
            None => {
                self.error("expected a natural number, found end of input");
                None
            }
        }
    }

    fn atom(&mut self) -> Option<AtomName> {
        let symbol = match self.peek() {
            Some(TokenKind::Ident(s)) if s == "o" || s == "t" => {
                self.error(format!(
                    "atom name '{s}' is reserved for emitted programs; rename the predicate"
                ));
                return None;
            }
            Some(TokenKind::Ident(s)) if KEYWORDS.contains(&s.as_str()) => {
                self.error(format!("'{s}' is a reserved word and cannot name an atom"));
                return None;
            }
            Some(TokenKind::Ident(s)) => {
                let s = s.clone();
                self.advance();
                s
            }
            Some(TokenKind::Upper(s)) => {
                let s = s.clone();
                self.error(format!(
                    "variable '{s}' is not supported: programs must be ground"
                ));
                return None;
            }
            Some(k) => {
                self.error(format!("expected an atom, found {k}"));
                return None;
            }
            None => {
                self.error("expected an atom, found end of input");
                return None;
            }
        };
        let mut args = Vec::new();
        if self.peek() == Some(&TokenKind::LParen) {
            self.advance();
            args.push(self.term()?);
            while self.peek() == Some(&TokenKind::Comma) {
                self.advance();
                args.push(self.term()?);
            }
            self.expect(TokenKind::RParen)?;
        }
        match AtomName::new(symbol, args) {
            Ok(a) => Some(a),
            Err(e) => {
                self.error(e.to_string());
                None
            }
        }
    }

    fn term(&mut self) -> Option<String> {
        match self.peek() {
            Some(TokenKind::Ident(s)) if KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.error(format!("'{s}' is a reserved word and cannot be a term"));
                None
            }
            Some(TokenKind::Ident(s)) => {
                let s = s.clone();
                self.advance();
                Some(s)
            }
            Some(&TokenKind::Nat(n)) => {
                self.advance();
                Some(n.to_string())
            }
            Some(TokenKind::Upper(s)) => {
                let s = s.clone();
                self.error(format!(
                    "variable '{s}' is not supported: programs must be ground"
                ));
                None
            }
            Some(k) => {
                self.error(format!("expected a term, found {k}"));
                None
            }
            None => {
                self.error("expected a term, found end of input");
                None
            }
        }
    }
}
