//! Pretty-printer producing text that parses back to the same tree.

use super::{BinOp, Branch, Comm, Expr, NameRef, Program, Stmt, Value, VarRef};

const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const CMP: u8 = 4;
const SUM: u8 = 5;
const ATOM: u8 = 6;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Bin(op, ..) => match op {
            BinOp::Or => OR,
            BinOp::And => AND,
            BinOp::Eq | BinOp::Ne | BinOp::Lt => CMP,
            BinOp::Add | BinOp::Sub => SUM,
        },
        Expr::Not(_) => NOT,
        _ => ATOM,
    }
}

fn op_text(op: BinOp) -> &'static str {
    match op {
        BinOp::And => "and",
        BinOp::Or => "or",
        BinOp::Eq => "=",
        BinOp::Ne => "/=",
        BinOp::Lt => "<",
        BinOp::Add => "+",
        BinOp::Sub => "-",
    }
}

fn name_ref(out: &mut String, n: &NameRef) {
    match n {
        NameRef::Placeholder(p) => out.push_str(p),
        NameRef::Vertex(v) => {
            out.push('"');
            out.push_str(v.as_str());
            out.push('"');
        }
        NameRef::SelfName => out.push_str("self"),
    }
}

fn var_ref(out: &mut String, v: &VarRef) {
    out.push_str(&v.name);
    if let Some(i) = &v.index {
        out.push('[');
        name_ref(out, i);
        out.push(']');
    }
}

fn value(out: &mut String, v: &Value) {
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(n) => out.push_str(&n.to_string()),
        Value::Atom(a) => name_ref(out, &NameRef::Vertex(a.clone())),
        Value::Tagged(t, a) => {
            out.push_str(t.as_str());
            out.push('(');
            name_ref(out, &NameRef::Vertex(a.clone()));
            out.push(')');
        }
    }
}

fn expr_at(out: &mut String, e: &Expr, min: u8) {
    let paren = level(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Lit(v) => value(out, v),
        Expr::Var(v) => var_ref(out, v),
        Expr::Name(n) => name_ref(out, n),
        Expr::Tag(t, arg) => {
            out.push_str(t.as_str());
            out.push('(');
            expr_at(out, arg, OR);
            out.push(')');
        }
        Expr::Not(inner) => {
            out.push_str("not ");
            expr_at(out, inner, NOT);
        }
        Expr::Bin(op, a, b) => {
            let l = level(e);
            let (lmin, rmin) = match l {
                CMP => (SUM, SUM),
                _ => (l, l + 1),
            };
            expr_at(out, a, lmin);
            out.push(' ');
            out.push_str(op_text(*op));
            out.push(' ');
            expr_at(out, b, rmin);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr_at(&mut out, e, OR);
    out
}

fn comm(out: &mut String, c: &Comm) {
    match c {
        Comm::Send(p, e) => {
            name_ref(out, p);
            out.push_str(" ! ");
            expr_at(out, e, OR);
        }
        Comm::Recv(p, v) => {
            name_ref(out, p);
            out.push_str(" ? ");
            var_ref(out, v);
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn stmt_list(out: &mut String, stmts: &[Stmt], depth: usize) {
    if stmts.is_empty() {
        indent(out, depth);
        out.push_str("skip");
        return;
    }
    for (i, s) in stmts.iter().enumerate() {
        if i > 0 {
            out.push_str(";\n");
        }
        stmt(out, s, depth);
    }
}

fn branches(out: &mut String, bs: &[Branch], depth: usize) {
    for (i, b) in bs.iter().enumerate() {
        indent(out, depth);
        out.push_str(if i == 0 { "[ " } else { "[] " });
        match &b.comm {
            Some(c) if b.cond.is_true_literal() => comm(out, c),
            Some(c) => {
                expr_at(out, &b.cond, OR);
                out.push_str(" & ");
                comm(out, c);
            }
            None => expr_at(out, &b.cond, OR),
        }
        out.push_str(" ->\n");
        stmt_list(out, &b.body, depth + 2);
        out.push('\n');
    }
    indent(out, depth);
    out.push_str("]\n");
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    match s {
        Stmt::Assign(v, e) => {
            indent(out, depth);
            var_ref(out, v);
            out.push_str(" := ");
            expr_at(out, e, OR);
        }
        Stmt::Send(p, e) => {
            indent(out, depth);
            comm(out, &Comm::Send(p.clone(), e.clone()));
        }
        Stmt::Recv(p, v) => {
            indent(out, depth);
            comm(out, &Comm::Recv(p.clone(), v.clone()));
        }
        Stmt::Select(bs) | Stmt::Repeat(bs) => {
            let (open, close) = match s {
                Stmt::Select(_) => ("if", "fi"),
                _ => ("do", "od"),
            };
            indent(out, depth);
            out.push_str(open);
            out.push('\n');
            branches(out, bs, depth + 1);
            indent(out, depth);
            out.push_str(close);
        }
    }
}

/// Renders a program in the concrete syntax accepted by
/// [`parse_program`](super::parse_program).
pub fn print_program(p: &Program) -> String {
    let mut out = format!("program {}", p.name);
    if !p.params.is_empty() {
        out.push('(');
        out.push_str(&p.params.join(", "));
        out.push(')');
    }
    out.push('\n');
    if !p.atoms.is_empty() {
        out.push_str("atoms ");
        out.push_str(&p.atoms.iter().cloned().collect::<Vec<_>>().join(" "));
        out.push_str(";\n");
    }
    if !p.body.is_empty() {
        stmt_list(&mut out, &p.body, 0);
        out.push('\n');
    }
    out
}
