//! Concrete syntax for judgements and unification problems.
//!
//! ```text
//! file   := sig? stmt
//! sig    := "sig" { ident ":" nat ("comm")? ";" }*
//! stmt   := judge | goal
//! judge  := binder? ctx "|-" term "=" term
//! goal   := binder? term "=?" term { "," term "=?" term }*
//! binder := "new" atom+ "."
//! ctx    := "{" [ fixc { "," fixc }* ] "}"
//! fixc   := perm "fix" var
//! perm   := cycle+ | "id"
//! cycle  := "(" atom atom+ ")"
//! term   := atom | var | perm "." var | ident "(" term {"," term}* ")" | "[" atom "]" term
//! ```
//!
//! Lowercase identifiers declared in the signature are term-formers; every
//! other lowercase identifier is an atom. Variables start with an uppercase
//! letter. A sequence of cycles denotes their composition, rightmost first.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::context::{Context, FixConstraint};
use crate::equiv::Judgement;
use crate::syntax::{Atom, PermError, Permutation, Signature, SignatureError, Term, Theory, Variable};
use crate::unify::{Constraint, UnificationProblem};

const KEYWORDS: [&str; 5] = ["sig", "comm", "new", "fix", "id"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// Signature errors (undeclared symbols, arity) as opposed to plain
    /// syntax errors.
    pub fn is_signature_error(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Signature(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Judgement(Judgement),
    Goal(UnificationProblem),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub signature: Signature,
    pub statement: Statement,
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.signature.is_empty() {
            f.write_str("sig")?;
            for (name, decl) in self.signature.iter() {
                write!(f, " {name}:{}", decl.arity)?;
                if decl.theory == Theory::C {
                    f.write_str(" comm")?;
                }
                f.write_str(";")?;
            }
            writeln!(f)?;
        }
        match &self.statement {
            Statement::Judgement(j) => write!(f, "{j}"),
            Statement::Goal(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Nat(u64),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: [&str; 13] = ["|-", "=?", "=", "(", ")", "[", "]", "{", "}", ",", ".", ";", ":"];

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    'outer: while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (l, cl) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            let tok = if c.is_ascii_uppercase() {
                Tok::Upper(word)
            } else {
                Tok::Lower(word)
            };
            advance(&mut i, &mut line, &mut col, j - start);
            out.push(Spanned { tok, line: l, col: cl });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[start..j].iter().collect();
            let n = digits.parse().map_err(|_| ParseError {
                line: l,
                col: cl,
                kind: ParseErrorKind::Syntax(format!("number `{digits}` is too large")),
            })?;
            advance(&mut i, &mut line, &mut col, j - start);
            out.push(Spanned { tok: Tok::Nat(n), line: l, col: cl });
            continue;
        }
        for p in PUNCT {
            let pc: Vec<char> = p.chars().collect();
            if chars[i..].starts_with(&pc) {
                advance(&mut i, &mut line, &mut col, pc.len());
                out.push(Spanned { tok: Tok::Punct(p), line: l, col: cl });
                continue 'outer;
            }
        }
        return Err(ParseError {
            line: l,
            col: cl,
            kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
        });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'s Signature,
}

impl<'s> Parser<'s> {
    fn new(text: &str, sig: &'s Signature) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            sig,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, kind: impl Into<ParseErrorKind>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            kind: kind.into(),
        }
    }

    fn syntax(&self, msg: String) -> ParseError {
        self.err_here(ParseErrorKind::Syntax(msg))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Lower(w) if w == k)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{p}`, found {}", self.peek())))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_keyword(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{k}`, found {}", self.peek())))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.syntax(format!("unexpected {t} after end of statement"))),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek().clone() {
            Tok::Lower(w) if KEYWORDS.contains(&w.as_str()) => {
                Err(self.syntax(format!("keyword `{w}` cannot be used as an atom")))
            }
            Tok::Lower(w) if self.sig.get(&w).is_some() => {
                Err(self.syntax(format!("`{w}` is a declared symbol, not an atom")))
            }
            Tok::Lower(w) => match Atom::parse(&w) {
                Some(a) => {
                    self.bump();
                    Ok(a)
                }
                None => Err(self.syntax(format!("`{w}` is not a valid atom"))),
            },
            t => Err(self.syntax(format!("expected an atom, found {t}"))),
        }
    }

    fn var(&mut self) -> Result<Variable, ParseError> {
        match self.bump() {
            Tok::Upper(w) => Ok(Variable::new(&w)),
            t => {
                self.pos -= 1;
                Err(self.syntax(format!("expected a variable, found {t}")))
            }
        }
    }

    fn perm(&mut self) -> Result<Permutation, ParseError> {
        if self.is_keyword("id") {
            self.bump();
            return Ok(Permutation::id());
        }
        if !self.is_punct("(") {
            return Err(self.syntax(format!("expected a permutation, found {}", self.peek())));
        }
        let start = self.pos;
        let mut cycles = Vec::new();
        while self.is_punct("(") {
            self.bump();
            let mut cycle = vec![self.atom()?];
            while !self.is_punct(")") {
                cycle.push(self.atom()?);
            }
            self.bump();
            cycles.push(cycle);
        }
        Permutation::from_cycles(cycles).map_err(|e| {
            let s = &self.toks[start];
            ParseError {
                line: s.line,
                col: s.col,
                kind: e.into(),
            }
        })
    }

    fn binder(&mut self) -> Result<BTreeSet<Atom>, ParseError> {
        let mut nu = BTreeSet::new();
        if self.is_keyword("new") {
            self.bump();
            nu.insert(self.atom()?);
            while !self.is_punct(".") {
                nu.insert(self.atom()?);
            }
            self.bump();
        }
        Ok(nu)
    }

    fn context_body(&mut self, nu: BTreeSet<Atom>) -> Result<Context, ParseError> {
        self.expect_punct("{")?;
        let mut ctx = Context::new(nu, []);
        if !self.is_punct("}") {
            loop {
                let p = self.perm()?;
                self.expect_keyword("fix")?;
                let x = self.var()?;
                ctx.insert(FixConstraint::new(p, x));
                if self.is_punct(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_punct("}")?;
        Ok(ctx)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Upper(w) => {
                self.bump();
                Ok(Term::var(Variable::new(&w)))
            }
            Tok::Punct("[") => {
                self.bump();
                let a = self.atom()?;
                self.expect_punct("]")?;
                Ok(Term::abs(a, self.term()?))
            }
            Tok::Punct("(") => self.suspension(),
            Tok::Lower(w) if w == "id" => self.suspension(),
            Tok::Lower(w) => {
                if let Some(decl) = self.sig.get(&w) {
                    let sym = self.sig.symbol(&w).expect("declared");
                    let at = self.pos;
                    self.bump();
                    let mut args = Vec::new();
                    if self.is_punct("(") {
                        self.bump();
                        if !self.is_punct(")") {
                            args.push(self.term()?);
                            while self.is_punct(",") {
                                self.bump();
                                args.push(self.term()?);
                            }
                        }
                        self.expect_punct(")")?;
                    }
                    if args.len() != decl.arity {
                        let s = &self.toks[at];
                        return Err(ParseError {
                            line: s.line,
                            col: s.col,
                            kind: SignatureError::Arity {
                                name: w,
                                expected: decl.arity,
                                found: args.len(),
                            }
                            .into(),
                        });
                    }
                    Ok(Term::app(sym, args))
                } else if matches!(self.peek_at(1), Tok::Punct("(")) {
                    Err(self.err_here(SignatureError::Undeclared(w)))
                } else {
                    Ok(Term::atom(self.atom()?))
                }
            }
            t => Err(self.syntax(format!("expected a term, found {t}"))),
        }
    }

    fn suspension(&mut self) -> Result<Term, ParseError> {
        let p = self.perm()?;
        self.expect_punct(".")?;
        Ok(Term::susp(p, self.var()?))
    }
}

fn parse_signature(p: &mut Parser<'_>) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    if !p.is_keyword("sig") {
        return Ok(sig);
    }
    p.bump();
    while let (Tok::Lower(name), Tok::Punct(":")) = (p.peek().clone(), p.peek_at(1).clone()) {
        if KEYWORDS.contains(&name.as_str()) || Atom::parse(&name).is_none() && name.contains(char::is_uppercase) {
            return Err(p.syntax(format!("`{name}` cannot be used as a symbol name")));
        }
        p.bump();
        p.bump();
        let arity = match p.bump() {
            Tok::Nat(n) => n as usize,
            t => {
                p.pos -= 1;
                return Err(p.syntax(format!("expected an arity, found {t}")));
            }
        };
        let theory = if p.is_keyword("comm") {
            p.bump();
            Theory::C
        } else {
            Theory::Empty
        };
        sig.declare(&name, arity, theory).map_err(|e| p.err_here(e))?;
        p.expect_punct(";")?;
    }
    Ok(sig)
}

pub fn parse_file(text: &str) -> Result<ProblemFile, ParseError> {
    let empty = Signature::new();
    let mut head = Parser::new(text, &empty)?;
    let signature = parse_signature(&mut head)?;
    let mut p = Parser {
        toks: head.toks,
        pos: head.pos,
        sig: &signature,
    };
    let nu = p.binder()?;
    let statement = if p.is_punct("{") {
        let ctx = p.context_body(nu)?;
        p.expect_punct("|-")?;
        let lhs = p.term()?;
        p.expect_punct("=")?;
        let rhs = p.term()?;
        Statement::Judgement(Judgement { ctx, lhs, rhs })
    } else {
        let mut constraints = Vec::new();
        loop {
            let lhs = p.term()?;
            p.expect_punct("=?")?;
            let rhs = p.term()?;
            constraints.push(Constraint::new(lhs, rhs));
            if p.is_punct(",") {
                p.bump();
            } else {
                break;
            }
        }
        Statement::Goal(UnificationProblem::new(nu, constraints))
    };
    p.expect_eof()?;
    Ok(ProblemFile { signature, statement })
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_perm(text: &str) -> Result<Permutation, ParseError> {
    let sig = Signature::new();
    let mut p = Parser::new(text, &sig)?;
    let perm = p.perm()?;
    p.expect_eof()?;
    Ok(perm)
}

/// Parses `new c̄. { π fix X, ... }` (the binder is optional).
pub fn parse_context(text: &str) -> Result<Context, ParseError> {
    let sig = Signature::new();
    let mut p = Parser::new(text, &sig)?;
    let nu = p.binder()?;
    let ctx = p.context_body(nu)?;
    p.expect_eof()?;
    Ok(ctx)
}
