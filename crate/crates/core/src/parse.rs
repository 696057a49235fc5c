//! The `.lpts` model language.
//!
//! A model file declares one or more named LPTSes, then designates the
//! system (a parallel composition of declared names) and the specification:
//!
//! ```text
//! # client retries until the server acknowledges
//! lpts Client {
//!   alphabet send, ack;
//!   init c0;
//!   c0 - send -> { 1: c1 };
//!   c1 - ack  -> { 9/10: c0, 1/10: c1 };
//! }
//!
//! system = Client || Server;
//! spec = Safe;
//! ```
//!
//! States are implicit: the `init` name and every name mentioned in a
//! transition belong to the state space. Probabilities are exact rationals
//! (`1`, `1/2`, `9/10`); decimal notation is rejected. Action names are
//! interned once per file, so the same name in two blocks is the same
//! action. `#` starts a comment running to the end of the line.
//!
//! [`pretty_print`] renders a model in canonical form — alphabets, entries
//! and transitions ordered by name, probabilities normalized — and its
//! output parses back to the same model.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::model::{ActionTable, Lpts, RawLpts, RawTransition, StateId, Violation};
use crate::rational::{rat_to_string, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

/// A parsed model file: the declared LPTSes, the shared action-name table,
/// and the `system` / `spec` designations (which [`parse_model`] guarantees
/// to resolve).
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub actions: ActionTable,
    pub defs: Vec<Lpts>,
    /// Component names of the `system = …` line, in order.
    pub system: Vec<String>,
    /// Name of the `spec = …` line.
    pub spec: String,
}

impl ModelFile {
    pub fn def(&self, name: &str) -> Option<&Lpts> {
        self.defs.iter().find(|l| l.name() == name)
    }

    /// The system components, in declaration order of the `system` line.
    pub fn system_components(&self) -> Vec<&Lpts> {
        self.system
            .iter()
            .map(|n| self.def(n).expect("system names resolve after parsing"))
            .collect()
    }

    pub fn spec_lpts(&self) -> &Lpts {
        self.def(&self.spec).expect("spec name resolves after parsing")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LBrace,
    RBrace,
    Semi,
    Comma,
    Colon,
    Slash,
    Minus,
    Arrow,
    Par,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(s) => format!("number '{s}'"),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Par => "'||'".into(),
            Tok::Eq => "'='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let (l, c) = (line, col);
        let ch = chars[i];
        let mut push = |tok: Tok| toks.push(Token { tok, line: l, col: c });
        match ch {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            _ if ch.is_whitespace() => {
                col += 1;
                i += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' | '}' | ';' | ',' | ':' | '/' | '=' => {
                push(match ch {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    '/' => Tok::Slash,
                    _ => Tok::Eq,
                });
                col += 1;
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow);
                    col += 2;
                    i += 2;
                } else {
                    push(Tok::Minus);
                    col += 1;
                    i += 1;
                }
            }
            '|' => {
                if chars.get(i + 1) == Some(&'|') {
                    push(Tok::Par);
                    col += 2;
                    i += 2;
                } else {
                    return Err(ParseError::new(l, c, "unexpected character '|'"));
                }
            }
            _ if ch.is_ascii_alphabetic() || ch == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                push(Tok::Ident(text));
            }
            _ if ch.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                push(Tok::Int(text));
            }
            _ => return Err(ParseError::new(l, c, format!("unexpected character '{ch}'"))),
        }
    }
    toks.push(Token { tok: Tok::Eof, line, col });
    Ok(toks)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.i];
        if !matches!(t.tok, Tok::Eof) {
            self.i += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.col, message)
    }

    fn expect(&mut self, want: Tok) -> Result<(usize, usize), ParseError> {
        if self.peek().tok == want {
            let t = self.bump();
            Ok((t.line, t.col))
        } else {
            Err(self.err_here(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().tok.describe()
            )))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match &self.peek().tok {
            Tok::Ident(_) => {
                let t = self.bump();
                match &t.tok {
                    Tok::Ident(s) => Ok((s.clone(), t.line, t.col)),
                    _ => unreachable!(),
                }
            }
            other => Err(self.err_here(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected '{kw}', found {}", self.peek().tok.describe())))
        }
    }
}

/// Parses a model file; see the module documentation for the grammar.
pub fn parse_model(src: &str) -> Result<ModelFile, ParseError> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let mut actions = ActionTable::new();
    let mut defs: Vec<Lpts> = Vec::new();

    if !p.at_keyword("lpts") {
        return Err(p.err_here(format!("expected 'lpts', found {}", p.peek().tok.describe())));
    }
    while p.at_keyword("lpts") {
        let def = parse_block(&mut p, &mut actions)?;
        if defs.iter().any(|d| d.name() == def.name()) {
            return Err(p.err_here(format!("duplicate lpts name '{}'", def.name())));
        }
        defs.push(def);
    }

    p.expect_keyword("system")?;
    p.expect(Tok::Eq)?;
    let mut system = Vec::new();
    loop {
        let (name, line, col) = p.expect_ident("a component name")?;
        if !defs.iter().any(|d| d.name() == name) {
            return Err(ParseError::new(line, col, format!("unknown system component '{name}'")));
        }
        system.push(name);
        if p.peek().tok == Tok::Par {
            p.bump();
        } else {
            break;
        }
    }
    p.expect(Tok::Semi)?;

    p.expect_keyword("spec")?;
    p.expect(Tok::Eq)?;
    let (spec, line, col) = p.expect_ident("a specification name")?;
    if !defs.iter().any(|d| d.name() == spec) {
        return Err(ParseError::new(line, col, format!("unknown specification '{spec}'")));
    }
    p.expect(Tok::Semi)?;

    if p.peek().tok != Tok::Eof {
        return Err(p.err_here(format!("unexpected trailing {}", p.peek().tok.describe())));
    }
    Ok(ModelFile { actions, defs, system, spec })
}

fn parse_block(p: &mut Parser, actions: &mut ActionTable) -> Result<Lpts, ParseError> {
    p.expect_keyword("lpts")?;
    let (name, name_line, name_col) = p.expect_ident("an lpts name")?;
    p.expect(Tok::LBrace)?;

    p.expect_keyword("alphabet")?;
    let mut alphabet = std::collections::BTreeSet::new();
    if p.peek().tok != Tok::Semi {
        loop {
            let (a, line, col) = p.expect_ident("an action name")?;
            if !alphabet.insert(actions.intern(&a)) {
                return Err(ParseError::new(line, col, format!("duplicate action '{a}'")));
            }
            if p.peek().tok == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect(Tok::Semi)?;

    let mut states: Vec<String> = Vec::new();
    let mut state_ids: BTreeMap<String, StateId> = BTreeMap::new();
    let mut intern_state = |states: &mut Vec<String>, name: &str| -> StateId {
        *state_ids.entry(name.to_string()).or_insert_with(|| {
            states.push(name.to_string());
            StateId(states.len() as u32 - 1)
        })
    };

    p.expect_keyword("init")?;
    let (init_name, ..) = p.expect_ident("a state name")?;
    let start = intern_state(&mut states, &init_name);
    p.expect(Tok::Semi)?;

    let mut transitions = Vec::new();
    let mut positions = Vec::new();
    while p.peek().tok != Tok::RBrace {
        let (from_name, line, col) = p.expect_ident("a state name or '}'")?;
        let from = intern_state(&mut states, &from_name);
        p.expect(Tok::Minus)?;
        let (action_name, a_line, a_col) = p.expect_ident("an action name")?;
        let action = match actions.lookup(&action_name) {
            Some(a) if alphabet.contains(&a) => a,
            _ => {
                return Err(ParseError::new(
                    a_line,
                    a_col,
                    format!("action '{action_name}' is not in the alphabet of '{name}'"),
                ));
            }
        };
        p.expect(Tok::Arrow)?;
        p.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        loop {
            let w = parse_prob(p)?;
            p.expect(Tok::Colon)?;
            let (to_name, ..) = p.expect_ident("a state name")?;
            entries.push((intern_state(&mut states, &to_name), w));
            if p.peek().tok == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
        p.expect(Tok::RBrace)?;
        p.expect(Tok::Semi)?;
        transitions.push(RawTransition { from, action, entries });
        positions.push((line, col));
    }
    p.expect(Tok::RBrace)?;

    let raw = RawLpts { name, states, start, alphabet, transitions };
    raw.build().map_err(|violations| {
        let v = &violations[0];
        let (line, col) = match v {
            Violation::MassNotOne { index, .. }
            | Violation::NonPositiveWeight { index, .. }
            | Violation::EmptyDistribution { index }
            | Violation::DanglingState { index, .. }
            | Violation::UnknownAction { index, .. } => positions[*index],
            Violation::StartOutOfRange { .. } | Violation::NoStates => (name_line, name_col),
        };
        let message = match v {
            Violation::MassNotOne { total, .. } => {
                format!("distribution sums to {total}, expected 1")
            }
            Violation::NonPositiveWeight { weight, .. } => {
                format!("non-positive probability {weight}")
            }
            other => other.to_string(),
        };
        ParseError::new(line, col, message)
    })
}

fn parse_prob(p: &mut Parser) -> Result<Rat, ParseError> {
    let expect_int = |p: &mut Parser, what: &str| -> Result<(BigInt, usize, usize), ParseError> {
        match &p.peek().tok {
            Tok::Int(_) => {
                let t = p.bump();
                match &t.tok {
                    Tok::Int(s) => Ok((s.parse().expect("lexed digits"), t.line, t.col)),
                    _ => unreachable!(),
                }
            }
            other => Err(p.err_here(format!("expected {what}, found {}", other.describe()))),
        }
    };
    let (num, ..) = expect_int(p, "a probability")?;
    if p.peek().tok != Tok::Slash {
        return Ok(Rat::from_integer(num));
    }
    p.bump();
    let (den, line, col) = expect_int(p, "a denominator")?;
    if den.is_zero() {
        return Err(ParseError::new(line, col, "probability denominator is zero"));
    }
    Ok(Rat::new(num, den))
}

fn is_lexable_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders a model file in canonical form: alphabets, distribution entries
/// and transitions are ordered by name and probabilities are normalized.
/// The output parses back to the same model, and pretty-printing the
/// reparse reproduces the bytes.
pub fn pretty_print(m: &ModelFile) -> String {
    let mut out = String::new();
    for def in &m.defs {
        debug_assert!(is_lexable_name(def.name()), "unprintable lpts name {:?}", def.name());
        let _ = writeln!(out, "lpts {} {{", def.name());
        let mut alphabet: Vec<&str> = def.alphabet().iter().map(|&a| m.actions.name(a)).collect();
        alphabet.sort_unstable();
        if alphabet.is_empty() {
            out.push_str("  alphabet;\n");
        } else {
            let _ = writeln!(out, "  alphabet {};", alphabet.join(", "));
        }
        let _ = writeln!(out, "  init {};", def.state_name(def.start()));

        let mut lines: Vec<(String, String, Vec<(String, Rat)>)> = def
            .transitions()
            .iter()
            .map(|t| {
                let mut entries: Vec<(String, Rat)> = t
                    .dist
                    .iter()
                    .map(|(s, w)| (def.state_name(s).to_string(), w.clone()))
                    .collect();
                entries.sort();
                (
                    def.state_name(t.from).to_string(),
                    m.actions.name(t.action).to_string(),
                    entries,
                )
            })
            .collect();
        lines.sort();
        for (from, action, entries) in lines {
            debug_assert!(is_lexable_name(&from) && entries.iter().all(|(s, _)| is_lexable_name(s)));
            let body: Vec<String> =
                entries.iter().map(|(s, w)| format!("{}: {}", rat_to_string(w), s)).collect();
            let _ = writeln!(out, "  {} - {} -> {{ {} }};", from, action, body.join(", "));
        }
        out.push_str("}\n\n");
    }
    let _ = writeln!(out, "system = {};", m.system.join(" || "));
    let _ = writeln!(out, "spec = {};", m.spec);
    out
}
