//! Dialect conformance: `in` admits only input guards, `io` admits both.

use std::fmt;
use std::str::FromStr;

use super::{print_expr, Branch, Comm, Program, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    In,
    Io,
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(Dialect::In),
            "io" | "i/o" => Ok(Dialect::Io),
            other => Err(format!("unknown dialect {other:?} (expected `in` or `io`)")),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::In => "in",
            Dialect::Io => "io",
        })
    }
}

/// An output statement found inside a guard.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    /// Path to the guard, e.g. `2.1` for the first branch of the third
    /// top-level statement (1-based, nested paths joined by dots).
    pub path: String,
    pub guard: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "output guard at {}: {}", self.path, self.guard)
    }
}

fn guard_text(b: &Branch) -> String {
    let comm = match &b.comm {
        Some(Comm::Send(p, e)) => format!("{} ! {}", name(p), print_expr(e)),
        Some(Comm::Recv(p, v)) => format!("{} ? {}", name(p), v.name),
        None => String::new(),
    };
    if b.cond.is_true_literal() {
        comm
    } else {
        format!("{} & {comm}", print_expr(&b.cond))
    }
}

fn name(n: &super::NameRef) -> String {
    print_expr(&super::Expr::Name(n.clone()))
}

fn visit(stmts: &[Stmt], prefix: &str, dialect: Dialect, out: &mut Vec<Violation>) {
    for (i, s) in stmts.iter().enumerate() {
        let here = if prefix.is_empty() {
            format!("{}", i + 1)
        } else {
            format!("{prefix}.{}", i + 1)
        };
        if let Stmt::Select(bs) | Stmt::Repeat(bs) = s {
            for (j, b) in bs.iter().enumerate() {
                let at = format!("{here}.{}", j + 1);
                if dialect == Dialect::In && matches!(b.comm, Some(Comm::Send(..))) {
                    out.push(Violation {
                        path: at.clone(),
                        guard: guard_text(b),
                    });
                }
                visit(&b.body, &at, dialect, out);
            }
        }
    }
}

/// Lists every guard that the dialect forbids; empty iff the program
/// conforms.
pub fn check_dialect(prog: &Program, dialect: Dialect) -> Vec<Violation> {
    let mut out = Vec::new();
    visit(&prog.body, "", dialect, &mut out);
    out
}
