//! Formula ASTs for the three team logics, a text parser, a canonical
//! printer, and structural measures.
//!
//! The surface syntax is plain ASCII:
//!
//! ```text
//! atom      := identifier | "bot" | "top"
//! unary     := "!" f | "<>" f | "[]" f | "might" f | "smight" f
//! inclusion := termlist "<=" termlist     termlist := elem ("," elem)*
//! ```
//!
//! Precedence, tightest first: atoms and parentheses, `<=`, the unary
//! prefixes, `&`, `|`. Both binary connectives are left-associative, so
//! `p & q <= r` is `p & (q <= r)` and `<>top <= p` is `<>(top <= p)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A formula of one of the team logics. `top` is represented as
/// `Neg(Bottom)`, never as a separate node, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Prop(String),
    Bottom,
    /// Negation; the subformula must be classical.
    Neg(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>),
    Box(Box<Formula>),
    /// Inclusion atom; both sides have the same nonzero length and all
    /// side formulas are classical.
    Inc(Vec<Formula>, Vec<Formula>),
    /// Might operator: some nonempty subteam satisfies the body.
    Might(Box<Formula>),
    /// Singular might operator: some singleton subteam satisfies the body.
    SMight(Box<Formula>),
}

/// Which logic a formula is supposed to live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    /// Modal inclusion logic: inclusion atoms, no might operators.
    MLInc,
    /// Modal logic with the might operator.
    MLMight,
    /// Modal logic with the singular might operator.
    MLSMight,
    /// Plain modal logic, classical connectives only.
    MLClassical,
}

impl Logic {
    pub fn name(self) -> &'static str {
        match self {
            Logic::MLInc => "mlinc",
            Logic::MLMight => "mlmight",
            Logic::MLSMight => "mlsmight",
            Logic::MLClassical => "classical",
        }
    }

    pub fn from_name(s: &str) -> Option<Logic> {
        match s {
            "mlinc" => Some(Logic::MLInc),
            "mlmight" => Some(Logic::MLMight),
            "mlsmight" => Some(Logic::MLSMight),
            "classical" => Some(Logic::MLClassical),
            _ => None,
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered, duplicate-free set of proposition names (the signature).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PropSet(Vec<String>);

impl PropSet {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> PropSet {
        let mut v: Vec<String> = names.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        PropSet(v)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.binary_search_by(|n| n.as_str().cmp(name)).is_ok()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn union(&self, other: &PropSet) -> PropSet {
        PropSet::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn is_subset_of(&self, other: &PropSet) -> bool {
        self.0.iter().all(|p| other.contains(p))
    }
}

impl fmt::Display for PropSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("connective `{connective}` is not part of {logic}")]
    Logic { connective: String, logic: Logic },
    #[error("negation applied to the non-classical formula `{0}`")]
    Negation(String),
    #[error("inclusion atom error: {0}")]
    InclusionArity(String),
    #[error("substitution maps `{prop}` to the non-classical formula `{image}`")]
    NonClassicalSubstitution { prop: String, image: String },
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

pub fn prop(name: &str) -> Formula {
    Formula::Prop(name.to_string())
}

pub fn bot() -> Formula {
    Formula::Bottom
}

pub fn top() -> Formula {
    Formula::Neg(Box::new(Formula::Bottom))
}

pub fn neg(f: Formula) -> Formula {
    Formula::Neg(Box::new(f))
}

pub fn or(l: Formula, r: Formula) -> Formula {
    Formula::Or(Box::new(l), Box::new(r))
}

pub fn and(l: Formula, r: Formula) -> Formula {
    Formula::And(Box::new(l), Box::new(r))
}

pub fn dia(f: Formula) -> Formula {
    Formula::Dia(Box::new(f))
}

pub fn boxm(f: Formula) -> Formula {
    Formula::Box(Box::new(f))
}

pub fn inc(lhs: Vec<Formula>, rhs: Vec<Formula>) -> Formula {
    Formula::Inc(lhs, rhs)
}

pub fn might(f: Formula) -> Formula {
    Formula::Might(Box::new(f))
}

pub fn smight(f: Formula) -> Formula {
    Formula::SMight(Box::new(f))
}

/// Left-associative conjunction of a nonempty sequence; `top` for the
/// empty one.
pub fn big_and(fs: impl IntoIterator<Item = Formula>) -> Formula {
    let mut it = fs.into_iter();
    match it.next() {
        None => top(),
        Some(first) => it.fold(first, and),
    }
}

/// Left-associative disjunction of a nonempty sequence; `bot` for the
/// empty one.
pub fn big_or(fs: impl IntoIterator<Item = Formula>) -> Formula {
    let mut it = fs.into_iter();
    match it.next() {
        None => bot(),
        Some(first) => it.fold(first, or),
    }
}

impl Formula {
    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Neg(b) if **b == Formula::Bottom)
    }

    /// True iff the formula contains no inclusion atom and no might
    /// operator.
    pub fn is_classical(&self) -> bool {
        match self {
            Formula::Prop(_) | Formula::Bottom => true,
            Formula::Neg(f) | Formula::Dia(f) | Formula::Box(f) => f.is_classical(),
            Formula::Or(l, r) | Formula::And(l, r) => l.is_classical() && r.is_classical(),
            Formula::Inc(_, _) | Formula::Might(_) | Formula::SMight(_) => false,
        }
    }

    /// Modal depth. The might operators inspect subteams rather than
    /// successors, so they add nothing; inclusion atoms take the maximum
    /// over all side formulas.
    pub fn modal_depth(&self) -> u32 {
        match self {
            Formula::Prop(_) | Formula::Bottom => 0,
            Formula::Neg(f) | Formula::Might(f) | Formula::SMight(f) => f.modal_depth(),
            Formula::Or(l, r) | Formula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Dia(f) | Formula::Box(f) => f.modal_depth() + 1,
            Formula::Inc(lhs, rhs) => lhs
                .iter()
                .chain(rhs.iter())
                .map(Formula::modal_depth)
                .max()
                .unwrap_or(0),
        }
    }

    /// The propositions occurring in the formula, as a signature.
    pub fn props(&self) -> PropSet {
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Prop(p) => out.push(p.clone()),
                Formula::Bottom => {}
                Formula::Neg(g)
                | Formula::Dia(g)
                | Formula::Box(g)
                | Formula::Might(g)
                | Formula::SMight(g) => walk(g, out),
                Formula::Or(l, r) | Formula::And(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Formula::Inc(lhs, rhs) => {
                    for g in lhs.iter().chain(rhs.iter()) {
                        walk(g, out);
                    }
                }
            }
        }
        let mut v = Vec::new();
        walk(self, &mut v);
        PropSet::new(v)
    }

    /// Checks the structural invariants: negation only over classical
    /// subformulas, inclusion atoms with equal nonzero arity, classical
    /// side formulas, and no nested inclusion.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        match self {
            Formula::Prop(_) | Formula::Bottom => Ok(()),
            Formula::Neg(f) => {
                if !f.is_classical() {
                    return Err(SyntaxError::Negation(f.to_string()));
                }
                f.validate()
            }
            Formula::Or(l, r) | Formula::And(l, r) => {
                l.validate()?;
                r.validate()
            }
            Formula::Dia(f) | Formula::Box(f) | Formula::Might(f) | Formula::SMight(f) => {
                f.validate()
            }
            Formula::Inc(lhs, rhs) => {
                if lhs.is_empty() || lhs.len() != rhs.len() {
                    return Err(SyntaxError::InclusionArity(format!(
                        "sides have lengths {} and {}",
                        lhs.len(),
                        rhs.len()
                    )));
                }
                for f in lhs.iter().chain(rhs.iter()) {
                    if !f.is_classical() {
                        return Err(SyntaxError::InclusionArity(format!(
                            "non-classical side formula `{f}`"
                        )));
                    }
                    f.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Checks that the formula uses only connectives of `logic` (on top
    /// of `validate`).
    pub fn check_logic(&self, logic: Logic) -> Result<(), SyntaxError> {
        self.validate()?;
        fn walk(f: &Formula, logic: Logic) -> Result<(), SyntaxError> {
            let bad = |c: &str| {
                Err(SyntaxError::Logic {
                    connective: c.to_string(),
                    logic,
                })
            };
            match f {
                Formula::Prop(_) | Formula::Bottom => Ok(()),
                Formula::Neg(g) | Formula::Dia(g) | Formula::Box(g) => walk(g, logic),
                Formula::Or(l, r) | Formula::And(l, r) => {
                    walk(l, logic)?;
                    walk(r, logic)
                }
                Formula::Inc(lhs, rhs) => {
                    if logic != Logic::MLInc {
                        return bad("<=");
                    }
                    for g in lhs.iter().chain(rhs.iter()) {
                        walk(g, logic)?;
                    }
                    Ok(())
                }
                Formula::Might(g) => {
                    if logic != Logic::MLMight {
                        return bad("might");
                    }
                    walk(g, logic)
                }
                Formula::SMight(g) => {
                    if logic != Logic::MLSMight {
                        return bad("smight");
                    }
                    walk(g, logic)
                }
            }
        }
        walk(self, logic)
    }

    /// The least logic the formula belongs to, or an error when it mixes
    /// inclusion atoms with might operators (no logic has both).
    pub fn infer_logic(&self) -> Result<Logic, SyntaxError> {
        self.validate()?;
        fn scan(f: &Formula, has: &mut [bool; 3]) {
            match f {
                Formula::Prop(_) | Formula::Bottom => {}
                Formula::Neg(g) | Formula::Dia(g) | Formula::Box(g) => scan(g, has),
                Formula::Or(l, r) | Formula::And(l, r) => {
                    scan(l, has);
                    scan(r, has);
                }
                Formula::Inc(lhs, rhs) => {
                    has[0] = true;
                    lhs.iter().chain(rhs.iter()).for_each(|g| scan(g, has));
                }
                Formula::Might(g) => {
                    has[1] = true;
                    scan(g, has);
                }
                Formula::SMight(g) => {
                    has[2] = true;
                    scan(g, has);
                }
            }
        }
        let mut has = [false; 3];
        scan(self, &mut has);
        match has {
            [false, false, false] => Ok(Logic::MLClassical),
            [true, false, false] => Ok(Logic::MLInc),
            [false, true, false] => Ok(Logic::MLMight),
            [false, false, true] => Ok(Logic::MLSMight),
            _ => Err(SyntaxError::Logic {
                connective: "mixed inclusion/might connectives".to_string(),
                logic: Logic::MLInc,
            }),
        }
    }

    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Prop(_) | Formula::Bottom => {}
                Formula::Neg(g)
                | Formula::Dia(g)
                | Formula::Box(g)
                | Formula::Might(g)
                | Formula::SMight(g) => stack.push(g),
                Formula::Or(l, r) | Formula::And(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                Formula::Inc(lhs, rhs) => stack.extend(lhs.iter().chain(rhs.iter())),
            }
        }
        out
    }
}

/// Replaces every proposition by its image under `sigma`, commuting with
/// all connectives, inclusion atoms included. Every image must be
/// classical; propositions outside the map stay put.
pub fn substitute_classical(
    f: &Formula,
    sigma: &BTreeMap<String, Formula>,
) -> Result<Formula, SyntaxError> {
    for (p, image) in sigma {
        if !image.is_classical() {
            return Err(SyntaxError::NonClassicalSubstitution {
                prop: p.clone(),
                image: image.to_string(),
            });
        }
    }
    fn apply(f: &Formula, sigma: &BTreeMap<String, Formula>) -> Formula {
        match f {
            Formula::Prop(p) => sigma.get(p).cloned().unwrap_or_else(|| f.clone()),
            Formula::Bottom => Formula::Bottom,
            Formula::Neg(g) => neg(apply(g, sigma)),
            Formula::Or(l, r) => or(apply(l, sigma), apply(r, sigma)),
            Formula::And(l, r) => and(apply(l, sigma), apply(r, sigma)),
            Formula::Dia(g) => dia(apply(g, sigma)),
            Formula::Box(g) => boxm(apply(g, sigma)),
            Formula::Inc(lhs, rhs) => inc(
                lhs.iter().map(|g| apply(g, sigma)).collect(),
                rhs.iter().map(|g| apply(g, sigma)).collect(),
            ),
            Formula::Might(g) => might(apply(g, sigma)),
            Formula::SMight(g) => smight(apply(g, sigma)),
        }
    }
    Ok(apply(f, sigma))
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

// Positions a subformula can be printed in; determines parenthesization.
#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    OrLeft,
    OrRight,
    AndLeft,
    AndRight,
    Unary,
    IncSide,
    // First left-hand element of an inclusion atom: a leading unary
    // operator there would capture the whole atom, so it needs parens.
    IncFirst,
}

fn needs_parens(f: &Formula, ctx: Ctx) -> bool {
    if f.is_top() {
        return false;
    }
    match f {
        Formula::Or(_, _) => !matches!(ctx, Ctx::OrLeft),
        Formula::And(_, _) => matches!(ctx, Ctx::AndRight | Ctx::Unary | Ctx::IncSide | Ctx::IncFirst),
        Formula::Inc(_, _) => ctx == Ctx::Unary,
        Formula::Neg(_) | Formula::Dia(_) | Formula::Box(_) => ctx == Ctx::IncFirst,
        _ => false,
    }
}

fn write_formula(f: &Formula, ctx: Ctx, out: &mut String) {
    if needs_parens(f, ctx) {
        out.push('(');
        write_formula(f, Ctx::OrLeft, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Bottom => out.push_str("bot"),
        Formula::Neg(g) if g.as_ref() == &Formula::Bottom => out.push_str("top"),
        Formula::Neg(g) => {
            out.push('!');
            write_formula(g, Ctx::Unary, out);
        }
        Formula::Dia(g) => {
            out.push_str("<>");
            write_formula(g, Ctx::Unary, out);
        }
        Formula::Box(g) => {
            out.push_str("[]");
            write_formula(g, Ctx::Unary, out);
        }
        Formula::Might(g) => {
            out.push_str("might ");
            write_formula(g, Ctx::Unary, out);
        }
        Formula::SMight(g) => {
            out.push_str("smight ");
            write_formula(g, Ctx::Unary, out);
        }
        Formula::Or(l, r) => {
            write_formula(l, Ctx::OrLeft, out);
            out.push_str(" | ");
            write_formula(r, Ctx::OrRight, out);
        }
        Formula::And(l, r) => {
            write_formula(l, Ctx::AndLeft, out);
            out.push_str(" & ");
            write_formula(r, Ctx::AndRight, out);
        }
        Formula::Inc(lhs, rhs) => {
            for (i, g) in lhs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(g, if i == 0 { Ctx::IncFirst } else { Ctx::IncSide }, out);
            }
            out.push_str(" <= ");
            for (i, g) in rhs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(g, Ctx::IncSide, out);
            }
        }
    }
}

/// Canonical printing with minimal parentheses; `parse_formula` inverts it.
pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, Ctx::OrLeft, &mut s);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bang,
    Dia,
    Box,
    Might,
    SMight,
    And,
    Or,
    Inc,
    Comma,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                toks.push((Tok::Bang, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::And, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Or, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Dia, i));
                    i += 2;
                } else if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Inc, i));
                    i += 2;
                } else {
                    return Err(SyntaxError::Syntax {
                        pos: i,
                        msg: "expected `<>` or `<=`".to_string(),
                    });
                }
            }
            '[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    toks.push((Tok::Box, i));
                    i += 2;
                } else {
                    return Err(SyntaxError::Syntax {
                        pos: i,
                        msg: "expected `[]`".to_string(),
                    });
                }
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "might" => Tok::Might,
                    "smight" => Tok::SMight,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, start));
            }
            _ => {
                return Err(SyntaxError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn parse_or(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = or(f, self.parse_and()?);
        }
        Ok(f)
    }

    fn parse_and(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.parse_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = and(f, self.parse_unary()?);
        }
        Ok(f)
    }

    fn parse_unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                let body = self.parse_unary()?;
                if !body.is_classical() {
                    return Err(SyntaxError::Negation(body.to_string()));
                }
                Ok(neg(body))
            }
            Some(Tok::Dia) => {
                self.pos += 1;
                Ok(dia(self.parse_unary()?))
            }
            Some(Tok::Box) => {
                self.pos += 1;
                Ok(boxm(self.parse_unary()?))
            }
            Some(Tok::Might) => {
                self.pos += 1;
                Ok(might(self.parse_unary()?))
            }
            Some(Tok::SMight) => {
                self.pos += 1;
                Ok(smight(self.parse_unary()?))
            }
            _ => self.parse_inclusion_or_element(),
        }
    }

    // An element-level formula, optionally continued into an inclusion
    // atom by `,` or `<=`.
    fn parse_inclusion_or_element(&mut self) -> Result<Formula, SyntaxError> {
        let first = self.parse_element()?;
        if self.peek() != Some(&Tok::Comma) && self.peek() != Some(&Tok::Inc) {
            return Ok(first);
        }
        let mut lhs = vec![first];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            lhs.push(self.parse_element()?);
        }
        self.expect(Tok::Inc, "`<=` after term list")?;
        let mut rhs = vec![self.parse_element()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            rhs.push(self.parse_element()?);
        }
        if lhs.len() != rhs.len() {
            return Err(SyntaxError::InclusionArity(format!(
                "sides have lengths {} and {}",
                lhs.len(),
                rhs.len()
            )));
        }
        for f in lhs.iter().chain(rhs.iter()) {
            if !f.is_classical() {
                return Err(SyntaxError::InclusionArity(format!(
                    "non-classical side formula `{f}`"
                )));
            }
        }
        Ok(inc(lhs, rhs))
    }

    // One side formula of an inclusion atom: unary operators allowed,
    // but no bare `&`, `|`, or a further `<=` (use parentheses).
    fn parse_element(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                let body = self.parse_element()?;
                if !body.is_classical() {
                    return Err(SyntaxError::Negation(body.to_string()));
                }
                Ok(neg(body))
            }
            Some(Tok::Dia) => {
                self.pos += 1;
                Ok(dia(self.parse_element()?))
            }
            Some(Tok::Box) => {
                self.pos += 1;
                Ok(boxm(self.parse_element()?))
            }
            Some(Tok::Might) => {
                self.pos += 1;
                Ok(might(self.parse_element()?))
            }
            Some(Tok::SMight) => {
                self.pos += 1;
                Ok(smight(self.parse_element()?))
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<Formula, SyntaxError> {
        match self.bump() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "bot" => Ok(bot()),
                "top" => Ok(top()),
                _ => Ok(Formula::Prop(name)),
            },
            Some(Tok::LParen) => {
                let f = self.parse_or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected a formula")
            }
        }
    }
}

/// Parses `text` and checks it against `logic`.
pub fn parse_formula(text: &str, logic: Logic) -> Result<Formula, SyntaxError> {
    let f = parse_any(text)?;
    f.check_logic(logic)?;
    Ok(f)
}

/// Parses `text` into any well-formed formula, without fixing the logic.
pub fn parse_any(text: &str) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.parse_or()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    f.validate()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_any(s).unwrap()
    }

    #[test]
    fn parse_precedence_examples() {
        // `<=` binds tighter than `&`.
        assert_eq!(p("p & q <= r"), and(prop("p"), inc(vec![prop("q")], vec![prop("r")])));
        assert_eq!(p("bot"), bot());
        assert_eq!(p("top"), top());
        // `&` binds tighter than `|`, both left-associative.
        assert_eq!(p("p | q & r"), or(prop("p"), and(prop("q"), prop("r"))));
        assert_eq!(p("p | q | r"), or(or(prop("p"), prop("q")), prop("r")));
        assert_eq!(p("p & q & r"), and(and(prop("p"), prop("q")), prop("r")));
        // Unary prefixes bind looser than `<=`.
        assert_eq!(p("<>top <= p"), dia(inc(vec![top()], vec![prop("p")])));
        assert_eq!(p("might p & q"), and(might(prop("p")), prop("q")));
        assert_eq!(p("!!p"), neg(neg(prop("p"))));
        // Multi-column atoms.
        assert_eq!(
            p("p, q <= r, s"),
            inc(vec![prop("p"), prop("q")], vec![prop("r"), prop("s")])
        );
        // Unary operators inside term lists.
        assert_eq!(p("top <= !p"), inc(vec![top()], vec![neg(prop("p"))]));
        assert_eq!(p("bot <= <>p"), inc(vec![bot()], vec![dia(prop("p"))]));
    }

    #[test]
    fn parse_rejections() {
        assert!(matches!(parse_any("!(might p)"), Err(SyntaxError::Negation(_))));
        assert!(matches!(parse_any("!might p"), Err(SyntaxError::Negation(_))));
        assert!(matches!(parse_any("!(top <= p)"), Err(SyntaxError::Negation(_))));
        assert!(matches!(
            parse_any("p, q <= r"),
            Err(SyntaxError::InclusionArity(_))
        ));
        assert!(matches!(
            parse_any("p <= (p <= q)"),
            Err(SyntaxError::InclusionArity(_))
        ));
        assert!(matches!(
            parse_any("(might p) <= q"),
            Err(SyntaxError::InclusionArity(_))
        ));
        assert!(matches!(
            parse_any("top <= might p"),
            Err(SyntaxError::InclusionArity(_))
        ));
        // `<=` binds tighter than `might`, so this one is fine.
        assert_eq!(
            parse_any("might p <= q").unwrap(),
            might(inc(vec![prop("p")], vec![prop("q")]))
        );
        assert!(matches!(parse_any("p &"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_any("(p"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_any("p q"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_any(""), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_any("p ? q"), Err(SyntaxError::Syntax { .. })));
    }

    #[test]
    fn logic_gating() {
        assert!(parse_formula("top <= p", Logic::MLInc).is_ok());
        assert!(matches!(
            parse_formula("might p", Logic::MLInc),
            Err(SyntaxError::Logic { .. })
        ));
        assert!(matches!(
            parse_formula("top <= p", Logic::MLMight),
            Err(SyntaxError::Logic { .. })
        ));
        assert!(matches!(
            parse_formula("smight p", Logic::MLMight),
            Err(SyntaxError::Logic { .. })
        ));
        assert!(matches!(
            parse_formula("might p", Logic::MLSMight),
            Err(SyntaxError::Logic { .. })
        ));
        assert!(matches!(
            parse_formula("top <= p", Logic::MLClassical),
            Err(SyntaxError::Logic { .. })
        ));
        assert!(parse_formula("<>(p & !q)", Logic::MLClassical).is_ok());
    }

    #[test]
    fn infer_logic_examples() {
        assert_eq!(p("<>!p").infer_logic().unwrap(), Logic::MLClassical);
        assert_eq!(p("top <= p").infer_logic().unwrap(), Logic::MLInc);
        assert_eq!(p("might p").infer_logic().unwrap(), Logic::MLMight);
        assert_eq!(p("smight p").infer_logic().unwrap(), Logic::MLSMight);
        assert!(and(might(prop("p")), smight(prop("p"))).infer_logic().is_err());
        assert!(and(might(prop("p")), inc(vec![top()], vec![prop("p")]))
            .infer_logic()
            .is_err());
    }

    #[test]
    fn print_examples() {
        assert_eq!(
            print_formula(&and(prop("p"), inc(vec![prop("q")], vec![prop("r")]))),
            "p & q <= r"
        );
        assert_eq!(print_formula(&top()), "top");
        assert_eq!(
            print_formula(&dia(inc(vec![top()], vec![prop("p")]))),
            "<>(top <= p)"
        );
        assert_eq!(print_formula(&or(and(prop("p"), prop("q")), prop("r"))), "p & q | r");
        assert_eq!(print_formula(&and(prop("p"), or(prop("q"), prop("r")))), "p & (q | r)");
        assert_eq!(
            print_formula(&and(prop("p"), and(prop("q"), prop("r")))),
            "p & (q & r)"
        );
        assert_eq!(print_formula(&neg(dia(prop("p")))), "!<>p");
        assert_eq!(
            print_formula(&inc(vec![prop("p"), prop("q")], vec![prop("p"), prop("q")])),
            "p, q <= p, q"
        );
        assert_eq!(print_formula(&might(and(prop("p"), prop("q")))), "might (p & q)");
        // A unary-headed first element must not capture the atom.
        let tricky = inc(vec![neg(prop("p"))], vec![neg(prop("p"))]);
        assert_eq!(print_formula(&tricky), "(!p) <= !p");
        assert_eq!(parse_any(&print_formula(&tricky)).unwrap(), tricky);
        let tricky2 = or(inc(vec![dia(prop("p")), prop("q")], vec![prop("q"), prop("p")]), prop("r"));
        assert_eq!(parse_any(&print_formula(&tricky2)).unwrap(), tricky2);
        // `top` is an identifier, so it never needs the parentheses.
        assert_eq!(print_formula(&inc(vec![top()], vec![prop("p")])), "top <= p");
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(p("p").modal_depth(), 0);
        assert_eq!(p("[]<>p").modal_depth(), 2);
        // md of an inclusion atom is the max over its sides.
        assert_eq!(or(inc(vec![prop("p")], vec![dia(prop("q"))]), prop("p")).modal_depth(), 1);
        assert_eq!(p("might <>p").modal_depth(), 1);
        assert_eq!(p("smight p").modal_depth(), 0);
        assert_eq!(p("!<>p & []q").modal_depth(), 1);
    }

    #[test]
    fn classicality_examples() {
        assert!(p("<>(p & !q)").is_classical());
        assert!(!p("top <= p").is_classical());
        assert!(!p("might p").is_classical());
        // Hereditary: every subformula of a classical formula is classical.
        let f = p("<>(p & !q) | []!r");
        assert!(f.subformulas().iter().all(|g| g.is_classical()));
    }

    #[test]
    fn substitution_examples() {
        let mut sigma = BTreeMap::new();
        sigma.insert("p".to_string(), neg(prop("p")));
        let f = inc(vec![top()], vec![prop("p")]);
        assert_eq!(
            substitute_classical(&f, &sigma).unwrap(),
            inc(vec![top()], vec![neg(prop("p"))])
        );

        let mut sigma2 = BTreeMap::new();
        sigma2.insert("p".to_string(), dia(prop("q")));
        let g = or(prop("p"), neg(prop("p")));
        assert_eq!(
            substitute_classical(&g, &sigma2).unwrap(),
            or(dia(prop("q")), neg(dia(prop("q"))))
        );

        let mut bad = BTreeMap::new();
        bad.insert("q".to_string(), inc(vec![prop("p")], vec![prop("r")]));
        assert!(matches!(
            substitute_classical(&prop("q"), &bad),
            Err(SyntaxError::NonClassicalSubstitution { .. })
        ));
    }

    #[test]
    fn top_is_structural() {
        assert_eq!(top(), neg(bot()));
        assert!(top().is_top());
        assert_eq!(p("top"), neg(bot()));
    }
}
