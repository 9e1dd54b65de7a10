//! Recursive-descent parser for the program text format.
//!
//! ```text
//! program sync(PEER)
//! atoms req;
//! recd := false;
//! do [ not recd & PEER ? x -> recd := true
//!   [] not sent & PEER ! self -> sent := true ] od
//! ```
//!
//! The header is optional; without it the program is named `main` and has
//! no placeholders or atoms.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{BinOp, Branch, Comm, Expr, NameRef, Program, Stmt, Value, VarRef, INT_MAX, INT_MIN};
use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Assign,
    Bang,
    Query,
    Arrow,
    LBrack,
    RBrack,
    Box,
    LParen,
    RParen,
    Comma,
    Semi,
    Amp,
    Eq,
    Ne,
    Lt,
    Plus,
    Minus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Assign => f.write_str("`:=`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Query => f.write_str("`?`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::Box => f.write_str("`[]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Ne => f.write_str("`/=`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "if", "fi", "do", "od", "not", "and", "or", "true", "false", "self", "skip", "program", "atoms",
];

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = match (c, next) {
            (':', Some('=')) => {
                advance(2, &mut i);
                Tok::Assign
            }
            ('-', Some('>')) => {
                advance(2, &mut i);
                Tok::Arrow
            }
            ('/', Some('=')) => {
                advance(2, &mut i);
                Tok::Ne
            }
            ('[', Some(']')) => {
                advance(2, &mut i);
                Tok::Box
            }
            ('!', _) => {
                advance(1, &mut i);
                Tok::Bang
            }
            ('?', _) => {
                advance(1, &mut i);
                Tok::Query
            }
            ('[', _) => {
                advance(1, &mut i);
                Tok::LBrack
            }
            (']', _) => {
                advance(1, &mut i);
                Tok::RBrack
            }
            ('(', _) => {
                advance(1, &mut i);
                Tok::LParen
            }
            (')', _) => {
                advance(1, &mut i);
                Tok::RParen
            }
            (',', _) => {
                advance(1, &mut i);
                Tok::Comma
            }
            (';', _) => {
                advance(1, &mut i);
                Tok::Semi
            }
            ('&', _) => {
                advance(1, &mut i);
                Tok::Amp
            }
            ('=', _) => {
                advance(1, &mut i);
                Tok::Eq
            }
            ('<', _) => {
                advance(1, &mut i);
                Tok::Lt
            }
            ('+', _) => {
                advance(1, &mut i);
                Tok::Plus
            }
            ('-', _) => {
                advance(1, &mut i);
                Tok::Minus
            }
            ('"', _) => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(err(l0, c0, "unterminated name literal".into()));
                }
                let s: String = chars[start..j].iter().collect();
                if s.is_empty() {
                    return Err(err(l0, c0, "empty name literal".into()));
                }
                advance(j + 1 - i, &mut i);
                Tok::Str(s)
            }
            (d, _) if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<i64>()
                    .map_err(|_| err(l0, c0, format!("integer {s} is too large")))?;
                Tok::Int(n)
            }
            (a, _) if a.is_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    col += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            (other, _) => return Err(err(l0, c0, format!("unexpected character {other:?}"))),
        };
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    params: BTreeSet<String>,
    atoms: BTreeSet<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_here<T>(&self, message: String) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(ParseError {
            line: s.line,
            col: s.col,
            message,
        })
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error_here(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.error_here(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.error_here(format!("expected identifier, found {other}")),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut name = "main".to_string();
        let mut params = Vec::new();
        if self.is_keyword("program") {
            self.bump();
            name = self.ident()?;
            if *self.peek() == Tok::LParen {
                self.bump();
                if *self.peek() != Tok::RParen {
                    loop {
                        let p = self.ident()?;
                        if params.contains(&p) {
                            return self.error_here(format!("placeholder {p} declared twice"));
                        }
                        params.push(p);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
            }
        }
        self.params = params.iter().cloned().collect();
        if self.is_keyword("atoms") {
            self.bump();
            while let Tok::Ident(s) = self.peek().clone() {
                if KEYWORDS.contains(&s.as_str()) {
                    break;
                }
                if self.params.contains(&s) {
                    return self.error_here(format!("{s} is already a placeholder"));
                }
                self.bump();
                self.atoms.insert(s);
            }
            self.expect(Tok::Semi)?;
        }
        let body = self.stmt_list()?;
        if *self.peek() != Tok::Eof {
            return self.error_here(format!("unexpected {}", self.peek()));
        }
        Ok(Program {
            name,
            params,
            atoms: std::mem::take(&mut self.atoms),
            body,
        })
    }

    fn at_list_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof | Tok::Box | Tok::RBrack)
    }

    fn stmt_list(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        if self.at_list_end() {
            return Ok(out);
        }
        loop {
            if self.is_keyword("skip") {
                self.bump();
            } else {
                out.push(self.stmt()?);
            }
            if *self.peek() == Tok::Semi {
                self.bump();
                if self.at_list_end() {
                    break;
                }
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn starts_comm(&self) -> bool {
        let peer = match self.peek() {
            Tok::Str(_) => true,
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            _ => false,
        };
        peer && matches!(self.peek_at(1), Tok::Bang | Tok::Query)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.is_keyword("if") {
            self.bump();
            let branches = self.branches()?;
            self.expect_keyword("fi")?;
            return Ok(Stmt::Select(branches));
        }
        if self.is_keyword("do") {
            self.bump();
            let branches = self.branches()?;
            self.expect_keyword("od")?;
            return Ok(Stmt::Repeat(branches));
        }
        if self.starts_comm() {
            return Ok(Stmt::from_comm(self.comm()?));
        }
        let var = self.var_ref()?;
        self.expect(Tok::Assign)?;
        let e = self.expr()?;
        Ok(Stmt::Assign(var, e))
    }

    fn branches(&mut self) -> PResult<Vec<Branch>> {
        self.expect(Tok::LBrack)?;
        let mut out = vec![self.branch()?];
        while *self.peek() == Tok::Box {
            self.bump();
            out.push(self.branch()?);
        }
        self.expect(Tok::RBrack)?;
        Ok(out)
    }

    fn branch(&mut self) -> PResult<Branch> {
        let (cond, comm) = if self.starts_comm() {
            (Expr::truth(), Some(self.comm()?))
        } else {
            let cond = self.expr()?;
            if *self.peek() == Tok::Amp {
                self.bump();
                if !self.starts_comm() {
                    return self.error_here(format!(
                        "expected a communication after `&`, found {}",
                        self.peek()
                    ));
                }
                (cond, Some(self.comm()?))
            } else {
                (cond, None)
            }
        };
        if *self.peek() == Tok::Amp {
            return self.error_here("a guard may contain at most one communication".into());
        }
        self.expect(Tok::Arrow)?;
        let body = self.stmt_list()?;
        Ok(Branch { cond, comm, body })
    }

    fn peer(&mut self) -> PResult<NameRef> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(NameRef::Vertex(Vertex::from(s)))
            }
            Tok::Ident(s) if self.params.contains(&s) => {
                self.bump();
                Ok(NameRef::Placeholder(s))
            }
            Tok::Ident(s) => self.error_here(format!("undeclared peer placeholder {s}")),
            other => self.error_here(format!("expected a peer, found {other}")),
        }
    }

    fn comm(&mut self) -> PResult<Comm> {
        let peer = self.peer()?;
        match self.bump() {
            Tok::Bang => Ok(Comm::Send(peer, self.expr()?)),
            Tok::Query => Ok(Comm::Recv(peer, self.var_ref()?)),
            _ => unreachable!("starts_comm checked the operator"),
        }
    }

    fn name_ref(&mut self) -> PResult<NameRef> {
        if self.is_keyword("self") {
            self.bump();
            return Ok(NameRef::SelfName);
        }
        self.peer()
    }

    fn var_ref(&mut self) -> PResult<VarRef> {
        let name = self.ident()?;
        if self.params.contains(&name) || self.atoms.contains(&name) {
            return self.error_here(format!("{name} is not a variable"));
        }
        if *self.peek() == Tok::LBrack {
            self.bump();
            let index = self.name_ref()?;
            self.expect(Tok::RBrack)?;
            return Ok(VarRef {
                name,
                index: Some(index),
            });
        }
        Ok(VarRef { name, index: None })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.conj()?;
        while self.is_keyword("or") {
            self.bump();
            lhs = Expr::bin(BinOp::Or, lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> PResult<Expr> {
        let mut lhs = self.negation()?;
        while self.is_keyword("and") {
            self.bump();
            lhs = Expr::bin(BinOp::And, lhs, self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> PResult<Expr> {
        if self.is_keyword("not") {
            self.bump();
            return Ok(Expr::negate(self.negation()?));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::bin(op, lhs, self.sum()?))
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut lhs = self.primary()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.primary()?);
        }
    }

    fn int_literal(&self, n: i64) -> PResult<Expr> {
        match Value::int(n) {
            Some(v) => Ok(Expr::Lit(v)),
            None => self.error_here(format!(
                "integer literal {n} outside [{INT_MIN}, {INT_MAX}]"
            )),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let e = self.int_literal(n)?;
                self.bump();
                Ok(e)
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        let e = self.int_literal(-n)?;
                        self.bump();
                        Ok(e)
                    }
                    other => self.error_here(format!("expected integer after `-`, found {other}")),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Lit(Value::Atom(Vertex::from(s))))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::boolean(s == "true"))
                }
                "self" => {
                    self.bump();
                    Ok(Expr::Name(NameRef::SelfName))
                }
                _ if self.params.contains(&s) => {
                    self.bump();
                    Ok(Expr::Name(NameRef::Placeholder(s)))
                }
                _ if self.atoms.contains(&s) => {
                    self.bump();
                    if *self.peek() == Tok::LParen {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Tag(Vertex::from(s), Box::new(arg)))
                    } else {
                        Ok(Expr::Lit(Value::Atom(Vertex::from(s))))
                    }
                }
                _ if KEYWORDS.contains(&s.as_str()) => {
                    self.error_here(format!("unexpected keyword `{s}`"))
                }
                _ => Ok(Expr::Var(self.var_ref()?)),
            },
            other => self.error_here(format!("expected an expression, found {other}")),
        }
    }
}

/// Parses a program. Errors carry the line and column of the offending
/// token.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        params: BTreeSet::new(),
        atoms: BTreeSet::new(),
    };
    p.program()
}
