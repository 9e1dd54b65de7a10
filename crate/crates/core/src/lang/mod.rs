//! Abstract syntax, parser, printer and dialect checks for mini-CSP programs.

mod dialect;
mod parse;
mod print;
mod system;

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::Vertex;

pub use dialect::{check_dialect, Dialect, Violation};
pub use parse::{parse_program, ParseError};
pub use print::{print_expr, print_program};
pub use system::{
    admits, instantiate, load_system, parse_system, render_system, AdmitReport, Binding, Offence,
    Process, System, SystemError, SystemFiles,
};

/// Smallest and largest integer values a program can hold.
pub const INT_MIN: i64 = -64;
pub const INT_MAX: i64 = 63;

/// Runtime values. Atoms cover both declared symbols and vertex names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i8),
    Atom(Vertex),
    /// A tag applied to a vertex name, e.g. `contact("2")`.
    Tagged(Vertex, Vertex),
}

impl Value {
    pub fn int(n: i64) -> Option<Value> {
        (INT_MIN..=INT_MAX)
            .contains(&n)
            .then_some(Value::Int(n as i8))
    }

    pub fn atom(name: &str) -> Value {
        Value::Atom(Vertex::new(name))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Tagged(t, a) => write!(f, "{t}({a})"),
        }
    }
}

/// A reference to a process name: a program placeholder, a concrete vertex
/// or the running process itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NameRef {
    Placeholder(String),
    Vertex(Vertex),
    SelfName,
}

/// A variable, optionally indexed by a process name (`sync["P1"]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub name: String,
    pub index: Option<NameRef>,
}

impl VarRef {
    pub fn plain(name: &str) -> Self {
        VarRef {
            name: name.to_string(),
            index: None,
        }
    }

    pub fn indexed(name: &str, index: NameRef) -> Self {
        VarRef {
            name: name.to_string(),
            index: Some(index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Eq,
    Ne,
    Lt,
    Add,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Var(VarRef),
    Name(NameRef),
    /// Tagged atom constructor; the argument must evaluate to a vertex name.
    Tag(Vertex, Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn truth() -> Expr {
        Expr::Lit(Value::Bool(true))
    }

    pub fn boolean(b: bool) -> Expr {
        Expr::Lit(Value::Bool(b))
    }

    pub fn int(n: i8) -> Expr {
        Expr::Lit(Value::Int(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(VarRef::plain(name))
    }

    pub fn vertex(v: &Vertex) -> Expr {
        Expr::Lit(Value::Atom(v.clone()))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Eq, a, b)
    }

    pub fn is_true_literal(&self) -> bool {
        matches!(self, Expr::Lit(Value::Bool(true)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Comm {
    Send(NameRef, Expr),
    Recv(NameRef, VarRef),
}

impl Comm {
    pub fn peer(&self) -> &NameRef {
        match self {
            Comm::Send(p, _) | Comm::Recv(p, _) => p,
        }
    }

    pub fn is_send(&self) -> bool {
        matches!(self, Comm::Send(..))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    pub cond: Expr,
    pub comm: Option<Comm>,
    pub body: Vec<Stmt>,
}

impl Branch {
    pub fn new(cond: Expr, comm: Option<Comm>, body: Vec<Stmt>) -> Self {
        Branch { cond, comm, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign(VarRef, Expr),
    Send(NameRef, Expr),
    Recv(NameRef, VarRef),
    /// Non-deterministic selection (`if ... fi`).
    Select(Vec<Branch>),
    /// Non-deterministic repetition (`do ... od`).
    Repeat(Vec<Branch>),
}

impl Stmt {
    pub fn assign(var: &str, e: Expr) -> Stmt {
        Stmt::Assign(VarRef::plain(var), e)
    }

    pub fn from_comm(c: Comm) -> Stmt {
        match c {
            Comm::Send(p, e) => Stmt::Send(p, e),
            Comm::Recv(p, v) => Stmt::Recv(p, v),
        }
    }
}

/// A parsed program: placeholders are bound per vertex at instantiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub params: Vec<String>,
    pub atoms: BTreeSet<String>,
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn new(name: &str, body: Vec<Stmt>) -> Self {
        Program {
            name: name.to_string(),
            params: Vec::new(),
            atoms: BTreeSet::new(),
            body,
        }
    }

    pub fn with_atoms<I: IntoIterator<Item = S>, S: Into<String>>(mut self, atoms: I) -> Self {
        self.atoms.extend(atoms.into_iter().map(Into::into));
        self
    }

    /// Visits every statement (pre-order) including branch bodies.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        walk_stmts(&self.body, f);
    }

    /// Every communication in the program, guards included.
    pub fn communications(&self) -> Vec<Comm> {
        let mut out = Vec::new();
        self.walk(&mut |s| match s {
            Stmt::Send(p, e) => out.push(Comm::Send(p.clone(), e.clone())),
            Stmt::Recv(p, v) => out.push(Comm::Recv(p.clone(), v.clone())),
            Stmt::Select(bs) | Stmt::Repeat(bs) => {
                out.extend(bs.iter().filter_map(|b| b.comm.clone()));
            }
            Stmt::Assign(..) => {}
        });
        out
    }

    /// Whether some statement writes variable `name` (any index).
    pub fn writes(&self, name: &str) -> bool {
        let mut found = false;
        self.walk(&mut |s| match s {
            Stmt::Assign(v, _) | Stmt::Recv(_, v) => found |= v.name == name,
            Stmt::Select(bs) | Stmt::Repeat(bs) => {
                for b in bs {
                    if let Some(Comm::Recv(_, v)) = &b.comm {
                        found |= v.name == name;
                    }
                }
            }
            Stmt::Send(..) => {}
        });
        found
    }
}

pub(crate) fn walk_stmts<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        if let Stmt::Select(bs) | Stmt::Repeat(bs) = s {
            for b in bs {
                walk_stmts(&b.body, f);
            }
        }
    }
}
