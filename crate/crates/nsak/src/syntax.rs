//! Abstract syntax, concrete grammar, parser and printer for finite types,
//! terms of Gödel's T, and multi-sorted formulas with standardness predicates.
//!
//! The surface grammar is plain ASCII:
//!
//! ```text
//! type    := "0" | type "->" type (right assoc) | type "*" type ;
//! term    := var | "lam" var ":" type "." term | term term (left assoc)
//!          | "0" | "S" | "Rec[" type "]" | "<" term "," term ">" | "fst" | "snd" | numeral ;
//! formula := "false" | term "=" term | "st[" type "](" term ")"
//!          | formula ("&" | "|" | "->") formula
//!          | ("forall"|"exists"|"forall-st"|"exists-st"|"forall~st"|"exists~st") var ":" type "." formula
//!          | ("forall"|"exists") var "<=" term "." formula ;
//! ```
//!
//! `#` starts a comment running to end of line. Parentheses group everywhere.

use std::fmt;

use thiserror::Error;

/// The finite types: `0`, `ρ -> σ`, `ρ * σ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiniteType {
    Base,
    Arrow(Box<FiniteType>, Box<FiniteType>),
    Product(Box<FiniteType>, Box<FiniteType>),
}

impl FiniteType {
    pub fn arrow(domain: FiniteType, codomain: FiniteType) -> FiniteType {
        FiniteType::Arrow(Box::new(domain), Box::new(codomain))
    }

    pub fn product(left: FiniteType, right: FiniteType) -> FiniteType {
        FiniteType::Product(Box::new(left), Box::new(right))
    }

    /// The pure types written `1` and `2` in the literature.
    pub fn nat_fn() -> FiniteType {
        FiniteType::arrow(FiniteType::Base, FiniteType::Base)
    }

    pub fn type2() -> FiniteType {
        FiniteType::arrow(FiniteType::nat_fn(), FiniteType::Base)
    }

    /// Constructor depth: `0` has depth 0, `0->0` depth 1, `(0->0)->0` depth 2.
    pub fn depth(&self) -> usize {
        match self {
            FiniteType::Base => 0,
            FiniteType::Arrow(a, b) | FiniteType::Product(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

/// Terms of Gödel's T.
///
/// `NumLit(n)` abbreviates `Succⁿ(Zero)`; the parser produces `Zero` for the
/// literal `0`, so `NumLit` always carries `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, FiniteType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Zero,
    Succ,
    Rec(FiniteType),
    Pair(Box<Term>, Box<Term>),
    Fst,
    Snd,
    NumLit(u64),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn lam(name: &str, ty: FiniteType, body: Term) -> Term {
        Term::Lam(name.to_string(), ty, Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application `f a1 a2 ...`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn num(n: u64) -> Term {
        if n == 0 {
            Term::Zero
        } else {
            Term::NumLit(n)
        }
    }

    /// `S t`.
    pub fn succ_of(t: Term) -> Term {
        Term::app(Term::Succ, t)
    }

    /// The numeral value if this term is `Zero` or `NumLit`.
    pub fn as_numeral(&self) -> Option<u64> {
        match self {
            Term::Zero => Some(0),
            Term::NumLit(n) => Some(*n),
            _ => None,
        }
    }
}

/// Formulas over the term language.
///
/// Negation is not a constructor: `¬A` is `A -> false`, and `false` is
/// definitionally `0 = S 0`. Higher-type equality is a defined notion
/// (see `checker::unfold_equality`), so `AtomEq0` always relates terms of
/// type `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Falsum,
    AtomEq0(Term, Term),
    St(FiniteType, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, FiniteType, Box<Formula>),
    Exists(String, FiniteType, Box<Formula>),
    ForallSt(String, FiniteType, Box<Formula>),
    ExistsSt(String, FiniteType, Box<Formula>),
    ForallMonSt(String, FiniteType, Box<Formula>),
    ExistsMonSt(String, FiniteType, Box<Formula>),
    BoundedNumForall(String, Term, Box<Formula>),
    BoundedNumExists(String, Term, Box<Formula>),
}

impl Formula {
    pub fn eq0(lhs: Term, rhs: Term) -> Formula {
        Formula::AtomEq0(lhs, rhs)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::implies(a, Formula::Falsum)
    }

    pub fn forall(x: &str, ty: FiniteType, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), ty, Box::new(body))
    }

    pub fn exists(x: &str, ty: FiniteType, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), ty, Box::new(body))
    }

    pub fn forall_st(x: &str, ty: FiniteType, body: Formula) -> Formula {
        Formula::ForallSt(x.to_string(), ty, Box::new(body))
    }

    pub fn exists_st(x: &str, ty: FiniteType, body: Formula) -> Formula {
        Formula::ExistsSt(x.to_string(), ty, Box::new(body))
    }

    pub fn bforall(x: &str, bound: Term, body: Formula) -> Formula {
        Formula::BoundedNumForall(x.to_string(), bound, Box::new(body))
    }

    pub fn bexists(x: &str, bound: Term, body: Formula) -> Formula {
        Formula::BoundedNumExists(x.to_string(), bound, Box::new(body))
    }

    /// Conjunction of a nonempty list, right-nested.
    pub fn and_all(mut fs: Vec<Formula>) -> Formula {
        let last = fs.pop().expect("and_all on empty list");
        fs.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc))
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Lam,
    Fst,
    Snd,
    RecKw,
    SuccKw,
    FalseKw,
    StKw,
    Forall,
    Exists,
    ForallSt,
    ExistsSt,
    ForallMonSt,
    ExistsMonSt,
    Arrow,
    Eq,
    Leq,
    Amp,
    Bar,
    Star,
    Dot,
    Colon,
    Comma,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Num(n) => return write!(f, "numeral `{n}`"),
            Tok::Lam => "`lam`",
            Tok::Fst => "`fst`",
            Tok::Snd => "`snd`",
            Tok::RecKw => "`Rec`",
            Tok::SuccKw => "`S`",
            Tok::FalseKw => "`false`",
            Tok::StKw => "`st`",
            Tok::Forall => "`forall`",
            Tok::Exists => "`exists`",
            Tok::ForallSt => "`forall-st`",
            Tok::ExistsSt => "`exists-st`",
            Tok::ForallMonSt => "`forall~st`",
            Tok::ExistsMonSt => "`exists~st`",
            Tok::Arrow => "`->`",
            Tok::Eq => "`=`",
            Tok::Leq => "`<=`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Star => "`*`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Comma => "`,`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{pos}: unexpected character `{ch}`")]
    BadChar { pos: Pos, ch: char },
    #[error("{pos}: numeral too large")]
    NumOverflow { pos: Pos },
    #[error("{pos}: found {found}, expected {expected}")]
    Unexpected {
        pos: Pos,
        found: Tok,
        expected: String,
    },
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! pos {
        () => {
            Pos { line, col }
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let p = pos!();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::Arrow, p));
                    i += 2;
                    col += 2;
                } else {
                    return Err(SyntaxError::BadChar { pos: p, ch: '-' });
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Leq, p));
                    i += 2;
                    col += 2;
                } else {
                    toks.push((Tok::LAngle, p));
                    i += 1;
                    col += 1;
                }
            }
            '>' => {
                toks.push((Tok::RAngle, p));
                i += 1;
                col += 1;
            }
            '=' => {
                toks.push((Tok::Eq, p));
                i += 1;
                col += 1;
            }
            '&' => {
                toks.push((Tok::Amp, p));
                i += 1;
                col += 1;
            }
            '|' => {
                toks.push((Tok::Bar, p));
                i += 1;
                col += 1;
            }
            '*' => {
                toks.push((Tok::Star, p));
                i += 1;
                col += 1;
            }
            '.' => {
                toks.push((Tok::Dot, p));
                i += 1;
                col += 1;
            }
            ':' => {
                toks.push((Tok::Colon, p));
                i += 1;
                col += 1;
            }
            ',' => {
                toks.push((Tok::Comma, p));
                i += 1;
                col += 1;
            }
            '(' => {
                toks.push((Tok::LParen, p));
                i += 1;
                col += 1;
            }
            ')' => {
                toks.push((Tok::RParen, p));
                i += 1;
                col += 1;
            }
            '[' => {
                toks.push((Tok::LBrack, p));
                i += 1;
                col += 1;
            }
            ']' => {
                toks.push((Tok::RBrack, p));
                i += 1;
                col += 1;
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n: u64 = s.parse().map_err(|_| SyntaxError::NumOverflow { pos: p })?;
                col += i - start;
                toks.push((Tok::Num(n), p));
            }
            _ if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let mut word: String = chars[start..i].iter().collect();
                // forall-st / forall~st / exists-st / exists~st are single tokens
                if (word == "forall" || word == "exists")
                    && i + 2 < chars.len() + 1
                    && (chars.get(i) == Some(&'-') || chars.get(i) == Some(&'~'))
                    && chars.get(i + 1) == Some(&'s')
                    && chars.get(i + 2) == Some(&'t')
                    && chars.get(i + 3).map_or(true, |c| !is_ident_char(*c))
                {
                    let sep = chars[i];
                    word.push(sep);
                    word.push_str("st");
                    i += 3;
                }
                col += i - start;
                let tok = match word.as_str() {
                    "lam" => Tok::Lam,
                    "fst" => Tok::Fst,
                    "snd" => Tok::Snd,
                    "Rec" => Tok::RecKw,
                    "S" => Tok::SuccKw,
                    "false" => Tok::FalseKw,
                    "st" => Tok::StKw,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "forall-st" => Tok::ForallSt,
                    "exists-st" => Tok::ExistsSt,
                    "forall~st" => Tok::ForallMonSt,
                    "exists~st" => Tok::ExistsMonSt,
                    _ => Tok::Ident(word),
                };
                toks.push((tok, p));
            }
            _ => return Err(SyntaxError::BadChar { pos: p, ch: c }),
        }
    }
    toks.push((
        Tok::Eof,
        Pos { line, col },
    ));
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser: recursive descent with backtracking over the saved position.
// ---------------------------------------------------------------------------

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> Pos {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn err(&self, expected: &str) -> SyntaxError {
        SyntaxError::Unexpected {
            pos: self.here(),
            found: self.peek().clone(),
            expected: expected.to_string(),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Ident(x) => {
                let x = x.clone();
                self.bump();
                Ok(x)
            }
            _ => Err(self.err(what)),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    // -- types --------------------------------------------------------------

    pub fn parse_type(&mut self) -> Result<FiniteType, SyntaxError> {
        let lhs = self.parse_type_prod()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.parse_type()?;
            Ok(FiniteType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_type_prod(&mut self) -> Result<FiniteType, SyntaxError> {
        let lhs = self.parse_type_atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.parse_type_prod()?;
            Ok(FiniteType::product(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_type_atom(&mut self) -> Result<FiniteType, SyntaxError> {
        match self.peek() {
            Tok::Num(0) => {
                self.bump();
                Ok(FiniteType::Base)
            }
            Tok::LParen => {
                self.bump();
                let t = self.parse_type()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err("a type (`0`, `(`)")),
        }
    }

    // -- terms --------------------------------------------------------------

    pub fn parse_term(&mut self) -> Result<Term, SyntaxError> {
        if *self.peek() == Tok::Lam {
            self.bump();
            let x = self.ident("binder name after `lam`")?;
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.parse_type()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.parse_term()?;
            Ok(Term::Lam(x, ty, Box::new(body)))
        } else {
            let mut t = self.parse_term_atom()?;
            while self.starts_term_atom() {
                let arg = self.parse_term_atom()?;
                t = Term::app(t, arg);
            }
            Ok(t)
        }
    }

    fn starts_term_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Num(_)
                | Tok::SuccKw
                | Tok::RecKw
                | Tok::Fst
                | Tok::Snd
                | Tok::LAngle
                | Tok::LParen
        )
    }

    fn parse_term_atom(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Term::Var(x))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Term::num(n))
            }
            Tok::SuccKw => {
                self.bump();
                Ok(Term::Succ)
            }
            Tok::Fst => {
                self.bump();
                Ok(Term::Fst)
            }
            Tok::Snd => {
                self.bump();
                Ok(Term::Snd)
            }
            Tok::RecKw => {
                self.bump();
                self.expect(Tok::LBrack, "`[`")?;
                let ty = self.parse_type()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Term::Rec(ty))
            }
            Tok::LAngle => {
                self.bump();
                let a = self.parse_term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.parse_term()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Term::Pair(Box::new(a), Box::new(b)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.parse_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err("a term")),
        }
    }

    // -- formulas -----------------------------------------------------------

    pub fn parse_formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.parse_formula_or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.parse_formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_formula_or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.parse_formula_and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.parse_formula_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_formula_and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.parse_formula_unit()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.parse_formula_unit()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_quantifier(&mut self) -> Result<Formula, SyntaxError> {
        let q = self.bump();
        let x = self.ident("quantified variable")?;
        match self.peek() {
            Tok::Colon => {
                self.bump();
                let ty = self.parse_type()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.parse_formula()?;
                let b = Box::new(body);
                Ok(match q {
                    Tok::Forall => Formula::Forall(x, ty, b),
                    Tok::Exists => Formula::Exists(x, ty, b),
                    Tok::ForallSt => Formula::ForallSt(x, ty, b),
                    Tok::ExistsSt => Formula::ExistsSt(x, ty, b),
                    Tok::ForallMonSt => Formula::ForallMonSt(x, ty, b),
                    Tok::ExistsMonSt => Formula::ExistsMonSt(x, ty, b),
                    _ => unreachable!(),
                })
            }
            Tok::Leq if q == Tok::Forall || q == Tok::Exists => {
                self.bump();
                let bound = self.parse_term()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.parse_formula()?;
                let b = Box::new(body);
                Ok(match q {
                    Tok::Forall => Formula::BoundedNumForall(x, bound, b),
                    Tok::Exists => Formula::BoundedNumExists(x, bound, b),
                    _ => unreachable!(),
                })
            }
            _ => Err(self.err("`:` or `<=` after quantified variable")),
        }
    }

    fn parse_formula_unit(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::FalseKw => {
                self.bump();
                Ok(Formula::Falsum)
            }
            Tok::StKw => {
                self.bump();
                self.expect(Tok::LBrack, "`[`")?;
                let ty = self.parse_type()?;
                self.expect(Tok::RBrack, "`]`")?;
                self.expect(Tok::LParen, "`(`")?;
                let t = self.parse_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::St(ty, t))
            }
            Tok::Forall | Tok::Exists | Tok::ForallSt | Tok::ExistsSt | Tok::ForallMonSt
            | Tok::ExistsMonSt => self.parse_quantifier(),
            _ => {
                // Either `term = term` or a parenthesised formula. Try the
                // equation first and fall back on the save point.
                let save = self.pos;
                match self.parse_equation() {
                    Ok(f) => Ok(f),
                    Err(eq_err) => {
                        self.pos = save;
                        if *self.peek() == Tok::LParen {
                            self.bump();
                            let f = self.parse_formula()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(f)
                        } else {
                            Err(eq_err)
                        }
                    }
                }
            }
        }
    }

    fn parse_equation(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.parse_term()?;
        self.expect(Tok::Eq, "`=`")?;
        let rhs = self.parse_term()?;
        Ok(Formula::AtomEq0(lhs, rhs))
    }
}

/// Parse a complete type, consuming all input.
pub fn parse_type(text: &str) -> Result<FiniteType, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.parse_type()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parse a complete term, consuming all input.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.parse_term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parse a complete formula, consuming all input.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_formula()?;
    p.expect_eof()?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Printer. parse(print(a)) == a structurally; precedence keeps parentheses
// minimal.
// ---------------------------------------------------------------------------

fn print_type_prec(t: &FiniteType, prec: u8, out: &mut String) {
    match t {
        FiniteType::Base => out.push('0'),
        FiniteType::Arrow(a, b) => {
            let need = prec > 0;
            if need {
                out.push('(');
            }
            print_type_prec(a, 1, out);
            out.push_str("->");
            print_type_prec(b, 0, out);
            if need {
                out.push(')');
            }
        }
        FiniteType::Product(a, b) => {
            let need = prec > 1;
            if need {
                out.push('(');
            }
            print_type_prec(a, 2, out);
            out.push('*');
            print_type_prec(b, 1, out);
            if need {
                out.push(')');
            }
        }
    }
}

pub fn print_type(t: &FiniteType) -> String {
    let mut s = String::new();
    print_type_prec(t, 0, &mut s);
    s
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

fn print_term_prec(t: &Term, prec: u8, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Zero => out.push('0'),
        Term::NumLit(n) => out.push_str(&n.to_string()),
        Term::Succ => out.push('S'),
        Term::Fst => out.push_str("fst"),
        Term::Snd => out.push_str("snd"),
        Term::Rec(ty) => {
            out.push_str("Rec[");
            out.push_str(&print_type(ty));
            out.push(']');
        }
        Term::Pair(a, b) => {
            out.push('<');
            print_term_prec(a, 0, out);
            out.push_str(", ");
            print_term_prec(b, 0, out);
            out.push('>');
        }
        Term::App(f, a) => {
            let need = prec > 1;
            if need {
                out.push('(');
            }
            print_term_prec(f, 1, out);
            out.push(' ');
            print_term_prec(a, 2, out);
            if need {
                out.push(')');
            }
        }
        Term::Lam(x, ty, body) => {
            let need = prec > 0;
            if need {
                out.push('(');
            }
            out.push_str("lam ");
            out.push_str(x);
            out.push(':');
            out.push_str(&print_type(ty));
            out.push_str(". ");
            print_term_prec(body, 0, out);
            if need {
                out.push(')');
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    print_term_prec(t, 0, &mut s);
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

// Formula precedence levels: 0 implies, 1 or, 2 and, 3 unit.
fn print_formula_prec(f: &Formula, prec: u8, out: &mut String) {
    let quant = |kw: &str,
                 x: &str,
                 ty: &FiniteType,
                 body: &Formula,
                 prec: u8,
                 out: &mut String| {
        let need = prec > 0;
        if need {
            out.push('(');
        }
        out.push_str(kw);
        out.push(' ');
        out.push_str(x);
        out.push(':');
        out.push_str(&print_type(ty));
        out.push_str(". ");
        print_formula_prec(body, 0, out);
        if need {
            out.push(')');
        }
    };
    match f {
        Formula::Falsum => out.push_str("false"),
        Formula::AtomEq0(a, b) => {
            // A lam on the left of `=` would swallow the equation when
            // re-parsed, so force it into atom position.
            print_term_prec(a, if matches!(a, Term::Lam(..)) { 2 } else { 1 }, out);
            out.push_str(" = ");
            print_term_prec(b, if matches!(b, Term::Lam(..)) { 2 } else { 1 }, out);
        }
        Formula::St(ty, t) => {
            out.push_str("st[");
            out.push_str(&print_type(ty));
            out.push_str("](");
            print_term_prec(t, 0, out);
            out.push(')');
        }
        Formula::And(a, b) => {
            let need = prec > 2;
            if need {
                out.push('(');
            }
            print_formula_prec(a, 2, out);
            out.push_str(" & ");
            print_formula_prec(b, 3, out);
            if need {
                out.push(')');
            }
        }
        Formula::Or(a, b) => {
            let need = prec > 1;
            if need {
                out.push('(');
            }
            print_formula_prec(a, 1, out);
            out.push_str(" | ");
            print_formula_prec(b, 2, out);
            if need {
                out.push(')');
            }
        }
        Formula::Implies(a, b) => {
            let need = prec > 0;
            if need {
                out.push('(');
            }
            print_formula_prec(a, 1, out);
            out.push_str(" -> ");
            print_formula_prec(b, 0, out);
            if need {
                out.push(')');
            }
        }
        Formula::Forall(x, ty, body) => quant("forall", x, ty, body, prec, out),
        Formula::Exists(x, ty, body) => quant("exists", x, ty, body, prec, out),
        Formula::ForallSt(x, ty, body) => quant("forall-st", x, ty, body, prec, out),
        Formula::ExistsSt(x, ty, body) => quant("exists-st", x, ty, body, prec, out),
        Formula::ForallMonSt(x, ty, body) => quant("forall~st", x, ty, body, prec, out),
        Formula::ExistsMonSt(x, ty, body) => quant("exists~st", x, ty, body, prec, out),
        Formula::BoundedNumForall(x, bound, body) | Formula::BoundedNumExists(x, bound, body) => {
            let need = prec > 0;
            if need {
                out.push('(');
            }
            out.push_str(if matches!(f, Formula::BoundedNumForall(..)) {
                "forall "
            } else {
                "exists "
            });
            out.push_str(x);
            out.push_str(" <= ");
            print_term_prec(bound, 1, out);
            out.push_str(". ");
            print_formula_prec(body, 0, out);
            if need {
                out.push(')');
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    print_formula_prec(f, 0, &mut s);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_grammar_base_cases() {
        assert_eq!(parse_type("0->0").unwrap(), FiniteType::nat_fn());
        assert_eq!(parse_type("(0->0)->0").unwrap(), FiniteType::type2());
        // arrow is right associative, product binds tighter
        assert_eq!(
            parse_type("0->0->0").unwrap(),
            FiniteType::arrow(FiniteType::Base, FiniteType::nat_fn())
        );
        assert_eq!(
            parse_type("0*0->0").unwrap(),
            FiniteType::arrow(
                FiniteType::product(FiniteType::Base, FiniteType::Base),
                FiniteType::Base
            )
        );
    }

    #[test]
    fn term_grammar_examples() {
        let t = parse_term("lam f:0->0. f 0").unwrap();
        assert_eq!(
            t,
            Term::lam(
                "f",
                FiniteType::nat_fn(),
                Term::app(Term::var("f"), Term::Zero)
            )
        );
        assert_eq!(parse_term("3").unwrap(), Term::NumLit(3));
        assert_eq!(parse_term("0").unwrap(), Term::Zero);
        assert_eq!(
            parse_term("Rec[0] 0").unwrap(),
            Term::app(Term::Rec(FiniteType::Base), Term::Zero)
        );
        assert_eq!(
            parse_term("<fst, 2>").unwrap(),
            Term::Pair(Box::new(Term::Fst), Box::new(Term::NumLit(2)))
        );
    }

    #[test]
    fn formula_grammar_examples() {
        let f = parse_formula("forall-st x:0. x = x").unwrap();
        assert_eq!(
            f,
            Formula::forall_st(
                "x",
                FiniteType::Base,
                Formula::eq0(Term::var("x"), Term::var("x"))
            )
        );
        let g = parse_formula("forall n <= t. n = n").unwrap();
        assert_eq!(
            g,
            Formula::bforall(
                "n",
                Term::var("t"),
                Formula::eq0(Term::var("n"), Term::var("n"))
            )
        );
        assert!(parse_formula("st[0->0](lam x:0. x)").is_ok());
        // implication is right associative and binds loosest
        let h = parse_formula("x = x & y = y -> false").unwrap();
        assert!(matches!(h, Formula::Implies(..)));
    }

    #[test]
    fn numerals_print_as_decimals() {
        assert_eq!(print_term(&Term::NumLit(3)), "3");
        assert_eq!(print_term(&Term::Zero), "0");
        assert_eq!(
            print_formula(&Formula::forall_st(
                "x",
                FiniteType::Base,
                Formula::eq0(Term::var("x"), Term::var("x"))
            )),
            "forall-st x:0. x = x"
        );
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            parse_term("S 1 # increments\n").unwrap(),
            Term::succ_of(Term::NumLit(1))
        );
    }

    #[test]
    fn parse_error_reports_position_and_expectation() {
        let err = parse_term("lam x 0. x").unwrap_err();
        match err {
            SyntaxError::Unexpected { pos, expected, .. } => {
                assert_eq!(pos.line, 1);
                assert!(expected.contains(":"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn monotone_quantifier_renders_with_tilde() {
        let f = Formula::ForallMonSt(
            "x".into(),
            FiniteType::nat_fn(),
            Box::new(Formula::eq0(Term::var("y"), Term::var("y"))),
        );
        let s = print_formula(&f);
        assert_eq!(s, "forall~st x:0->0. y = y");
        assert_eq!(parse_formula(&s).unwrap(), f);
    }
}
