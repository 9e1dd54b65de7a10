//! Compiled processes and the one-step transition relation.
//!
//! Each program is flattened into a small instruction list. Values are
//! interned into a compact copyable form so that system states hash fast.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{EngineError, FailReason, GuardKind, GuardSig, Outcome, Step, VarName};
use crate::graph::Vertex;
use crate::lang::{
    admits, BinOp, Branch, Comm, Expr, NameRef, Stmt, System, Value, VarRef, INT_MAX, INT_MIN,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Val {
    Undef,
    Bool(bool),
    Int(i8),
    Sym(u16),
    Tagged(u16, u16),
}

#[derive(Debug)]
enum CExpr {
    Lit(Val),
    Var(u16),
    Tag(u16, Box<CExpr>),
    Not(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

#[derive(Debug)]
enum CComm {
    Send(u16, CExpr),
    Recv(u16, u16),
}

#[derive(Debug)]
struct CBranch {
    cond: CExpr,
    comm: Option<CComm>,
    body: u32,
    kind: GuardKind,
}

#[derive(Debug)]
enum Instr {
    Assign(u16, CExpr),
    Send(u16, CExpr),
    Recv(u16, u16),
    Guarded {
        rep: bool,
        branches: Vec<CBranch>,
        exit: u32,
    },
    Jump(u32),
    Halt,
}

#[derive(Debug)]
struct CProc {
    vertex: Vertex,
    code: Vec<Instr>,
    vars: Vec<VarName>,
    slots: HashMap<VarName, u16>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Mode {
    At(u32),
    /// Guards evaluated; the mask holds the branches whose boolean is true.
    Waiting(u32, u64),
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ProcState {
    mode: Mode,
    store: Box<[Val]>,
}

/// A global state: control point and variable store of every process.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemState {
    procs: Box<[ProcState]>,
}

/// A system compiled for execution.
#[derive(Debug)]
pub struct Machine {
    procs: Vec<CProc>,
    symbols: Vec<Value>,
}

struct Compiler<'a> {
    vertex: &'a Vertex,
    index: &'a BTreeMap<Vertex, u16>,
    syms: &'a HashMap<String, u16>,
    vars: Vec<VarName>,
    slots: HashMap<VarName, u16>,
    code: Vec<Instr>,
}

impl Compiler<'_> {
    fn error<T>(&self, message: String) -> Result<T, EngineError> {
        Err(EngineError::Compile {
            vertex: self.vertex.clone(),
            message,
        })
    }

    fn peer(&self, n: &NameRef) -> Result<u16, EngineError> {
        match n {
            NameRef::Vertex(v) => match self.index.get(v) {
                Some(&i) => Ok(i),
                None => self.error(format!("{v} is not a process")),
            },
            other => self.error(format!("unresolved name {other:?}")),
        }
    }

    fn slot(&mut self, v: &VarRef) -> Result<u16, EngineError> {
        let index = match &v.index {
            None => None,
            Some(NameRef::Vertex(w)) => Some(w.clone()),
            Some(other) => return self.error(format!("unresolved index {other:?}")),
        };
        let name = VarName {
            name: v.name.clone(),
            index,
        };
        if let Some(&s) = self.slots.get(&name) {
            return Ok(s);
        }
        let s = u16::try_from(self.vars.len()).expect("fewer than 65536 variables");
        self.vars.push(name.clone());
        self.slots.insert(name, s);
        Ok(s)
    }

    fn sym(&self, name: &str) -> Result<u16, EngineError> {
        match self.syms.get(name) {
            Some(&s) => Ok(s),
            None => self.error(format!("{name:?} is neither a vertex nor a declared atom")),
        }
    }

    fn value(&self, v: &Value) -> Result<Val, EngineError> {
        Ok(match v {
            Value::Bool(b) => Val::Bool(*b),
            Value::Int(n) => Val::Int(*n),
            Value::Atom(a) => Val::Sym(self.sym(a.as_str())?),
            Value::Tagged(t, a) => Val::Tagged(self.sym(t.as_str())?, self.sym(a.as_str())?),
        })
    }

    fn expr(&mut self, e: &Expr) -> Result<CExpr, EngineError> {
        Ok(match e {
            Expr::Lit(v) => CExpr::Lit(self.value(v)?),
            Expr::Var(v) => CExpr::Var(self.slot(v)?),
            Expr::Name(NameRef::Vertex(v)) => CExpr::Lit(Val::Sym(self.sym(v.as_str())?)),
            Expr::Name(other) => return self.error(format!("unresolved name {other:?}")),
            Expr::Tag(t, a) => CExpr::Tag(self.sym(t.as_str())?, Box::new(self.expr(a)?)),
            Expr::Not(a) => CExpr::Not(Box::new(self.expr(a)?)),
            Expr::Bin(op, a, b) => {
                CExpr::Bin(*op, Box::new(self.expr(a)?), Box::new(self.expr(b)?))
            }
        })
    }

    fn here(&self) -> u32 {
        self.code.len() as u32
    }

    fn guarded(&mut self, rep: bool, bs: &[Branch]) -> Result<(), EngineError> {
        if bs.len() > 64 {
            return self.error("more than 64 branches in one control structure".into());
        }
        let at = self.code.len();
        self.code.push(Instr::Halt);
        let mut branches = Vec::with_capacity(bs.len());
        let mut exits = Vec::new();
        for b in bs {
            let cond = self.expr(&b.cond)?;
            let (comm, kind) = match &b.comm {
                None => (None, GuardKind::Local),
                Some(Comm::Send(p, e)) => {
                    let peer = self.peer(p)?;
                    let NameRef::Vertex(w) = p else {
                        unreachable!()
                    };
                    (
                        Some(CComm::Send(peer, self.expr(e)?)),
                        GuardKind::Send(w.clone()),
                    )
                }
                Some(Comm::Recv(p, v)) => {
                    let peer = self.peer(p)?;
                    let NameRef::Vertex(w) = p else {
                        unreachable!()
                    };
                    (
                        Some(CComm::Recv(peer, self.slot(v)?)),
                        GuardKind::Recv(w.clone()),
                    )
                }
            };
            let body = self.here();
            self.block(&b.body)?;
            if rep {
                self.code.push(Instr::Jump(at as u32));
            } else {
                exits.push(self.code.len());
                self.code.push(Instr::Halt);
            }
            branches.push(CBranch {
                cond,
                comm,
                body,
                kind,
            });
        }
        let exit = self.here();
        for e in exits {
            self.code[e] = Instr::Jump(exit);
        }
        self.code[at] = Instr::Guarded {
            rep,
            branches,
            exit,
        };
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<(), EngineError> {
        for s in stmts {
            match s {
                Stmt::Assign(v, e) => {
                    let e = self.expr(e)?;
                    let slot = self.slot(v)?;
                    self.code.push(Instr::Assign(slot, e));
                }
                Stmt::Send(p, e) => {
                    let peer = self.peer(p)?;
                    let e = self.expr(e)?;
                    self.code.push(Instr::Send(peer, e));
                }
                Stmt::Recv(p, v) => {
                    let peer = self.peer(p)?;
                    let slot = self.slot(v)?;
                    self.code.push(Instr::Recv(peer, slot));
                }
                Stmt::Select(bs) => self.guarded(false, bs)?,
                Stmt::Repeat(bs) => self.guarded(true, bs)?,
            }
        }
        Ok(())
    }
}

struct Offer {
    proc: usize,
    peer: usize,
    branch: Option<usize>,
    /// Payload of a send.
    value: Val,
    /// Target variable of a receive.
    slot: u16,
}

impl Machine {
    /// Compiles a system. The network must admit it.
    pub fn new(sys: &System) -> Result<Machine, EngineError> {
        let report = admits(sys.network(), sys);
        if let Some(o) = report.offending.first() {
            return Err(EngineError::NotAdmitted(o.to_string()));
        }
        let mut symbols: Vec<Value> = Vec::new();
        let mut syms = HashMap::new();
        let mut index = BTreeMap::new();
        for (i, v) in sys.vertices().enumerate() {
            index.insert(v.clone(), i as u16);
            syms.insert(v.as_str().to_string(), i as u16);
            symbols.push(Value::Atom(v.clone()));
        }
        let atoms: BTreeSet<&String> = sys
            .processes()
            .values()
            .flat_map(|p| p.program.atoms.iter())
            .collect();
        for a in atoms {
            syms.insert(a.clone(), symbols.len() as u16);
            symbols.push(Value::atom(a));
        }
        let mut procs = Vec::new();
        for (v, p) in sys.processes() {
            let mut c = Compiler {
                vertex: v,
                index: &index,
                syms: &syms,
                vars: Vec::new(),
                slots: HashMap::new(),
                code: Vec::new(),
            };
            c.block(&p.program.body)?;
            c.code.push(Instr::Halt);
            procs.push(CProc {
                vertex: v.clone(),
                code: c.code,
                vars: c.vars,
                slots: c.slots,
            });
        }
        Ok(Machine { procs, symbols })
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.procs.iter().map(|p| &p.vertex)
    }

    fn settle(&self, p: usize, mut pc: u32) -> Mode {
        loop {
            match self.procs[p].code[pc as usize] {
                Instr::Jump(t) => pc = t,
                Instr::Halt => return Mode::Done,
                _ => return Mode::At(pc),
            }
        }
    }

    pub fn initial(&self) -> SystemState {
        let procs = (0..self.procs.len())
            .map(|p| ProcState {
                mode: self.settle(p, 0),
                store: vec![Val::Undef; self.procs[p].vars.len()].into_boxed_slice(),
            })
            .collect();
        SystemState { procs }
    }

    fn to_value(&self, v: Val) -> Value {
        match v {
            Val::Undef => unreachable!("undefined values never leave the store"),
            Val::Bool(b) => Value::Bool(b),
            Val::Int(n) => Value::Int(n),
            Val::Sym(s) => self.symbols[s as usize].clone(),
            Val::Tagged(t, a) => {
                let (Value::Atom(t), Value::Atom(a)) =
                    (&self.symbols[t as usize], &self.symbols[a as usize])
                else {
                    unreachable!("symbols are atoms")
                };
                Value::Tagged(t.clone(), a.clone())
            }
        }
    }

    fn eval(&self, p: usize, store: &[Val], e: &CExpr) -> Result<Val, FailReason> {
        Ok(match e {
            CExpr::Lit(v) => *v,
            CExpr::Var(s) => match store[*s as usize] {
                Val::Undef => {
                    return Err(FailReason::Undefined(
                        self.procs[p].vars[*s as usize].clone(),
                    ))
                }
                v => v,
            },
            CExpr::Tag(t, a) => match self.eval(p, store, a)? {
                Val::Sym(v) if (v as usize) < self.procs.len() => Val::Tagged(*t, v),
                _ => return Err(FailReason::TypeError),
            },
            CExpr::Not(a) => match self.eval(p, store, a)? {
                Val::Bool(b) => Val::Bool(!b),
                _ => return Err(FailReason::TypeError),
            },
            CExpr::Bin(op, a, b) => {
                let x = self.eval(p, store, a)?;
                match op {
                    BinOp::And | BinOp::Or => {
                        let Val::Bool(x) = x else {
                            return Err(FailReason::TypeError);
                        };
                        if x == (*op == BinOp::Or) {
                            return Ok(Val::Bool(x));
                        }
                        match self.eval(p, store, b)? {
                            Val::Bool(y) => Val::Bool(y),
                            _ => return Err(FailReason::TypeError),
                        }
                    }
                    BinOp::Eq => Val::Bool(x == self.eval(p, store, b)?),
                    BinOp::Ne => Val::Bool(x != self.eval(p, store, b)?),
                    BinOp::Lt | BinOp::Add | BinOp::Sub => {
                        let (Val::Int(x), Val::Int(y)) = (x, self.eval(p, store, b)?) else {
                            return Err(FailReason::TypeError);
                        };
                        let (x, y) = (x as i64, y as i64);
                        match op {
                            BinOp::Lt => Val::Bool(x < y),
                            _ => {
                                let r = if *op == BinOp::Add { x + y } else { x - y };
                                if !(INT_MIN..=INT_MAX).contains(&r) {
                                    return Err(FailReason::Overflow);
                                }
                                Val::Int(r as i8)
                            }
                        }
                    }
                }
            }
        })
    }

    fn with_mode(s: &SystemState, p: usize, mode: Mode) -> SystemState {
        let mut next = s.clone();
        next.procs[p].mode = mode;
        next
    }

    /// All enabled steps with their successor states, sorted by step.
    pub fn successors(&self, s: &SystemState) -> Vec<(Step, SystemState)> {
        let mut out = Vec::new();
        let mut sends: Vec<Offer> = Vec::new();
        let mut recvs: Vec<Offer> = Vec::new();
        for (p, ps) in s.procs.iter().enumerate() {
            let proc = &self.procs[p];
            let vertex = || proc.vertex.clone();
            let fail = |reason| {
                (
                    Step::Fail {
                        vertex: vertex(),
                        reason,
                    },
                    Self::with_mode(s, p, Mode::Failed),
                )
            };
            match &ps.mode {
                Mode::Done | Mode::Failed => {}
                Mode::At(pc) => match &proc.code[*pc as usize] {
                    Instr::Assign(slot, e) => match self.eval(p, &ps.store, e) {
                        Ok(v) => {
                            let mut next = Self::with_mode(s, p, self.settle(p, pc + 1));
                            next.procs[p].store[*slot as usize] = v;
                            out.push((
                                Step::Assign {
                                    vertex: vertex(),
                                    var: proc.vars[*slot as usize].clone(),
                                    value: self.to_value(v),
                                },
                                next,
                            ));
                        }
                        Err(r) => out.push(fail(r)),
                    },
                    Instr::Send(peer, e) => match self.eval(p, &ps.store, e) {
                        Ok(value) => sends.push(Offer {
                            proc: p,
                            peer: *peer as usize,
                            branch: None,
                            value,
                            slot: 0,
                        }),
                        Err(r) => out.push(fail(r)),
                    },
                    Instr::Recv(peer, slot) => recvs.push(Offer {
                        proc: p,
                        peer: *peer as usize,
                        branch: None,
                        value: Val::Undef,
                        slot: *slot,
                    }),
                    Instr::Guarded {
                        rep,
                        branches,
                        exit,
                    } => match self.evaluate_guards(p, &ps.store, branches) {
                        Err(r) => out.push(fail(r)),
                        Ok((mask, pattern)) => {
                            if mask != 0 {
                                out.push((
                                    Step::Guards {
                                        vertex: vertex(),
                                        pattern,
                                        exit: false,
                                    },
                                    Self::with_mode(s, p, Mode::Waiting(*pc, mask)),
                                ));
                            } else if *rep {
                                out.push((
                                    Step::Guards {
                                        vertex: vertex(),
                                        pattern,
                                        exit: true,
                                    },
                                    Self::with_mode(s, p, self.settle(p, *exit)),
                                ));
                            } else {
                                out.push(fail(FailReason::AllGuardsClosed));
                            }
                        }
                    },
                    Instr::Jump(_) | Instr::Halt => unreachable!("control points are settled"),
                },
                Mode::Waiting(pc, mask) => {
                    let Instr::Guarded { branches, .. } = &proc.code[*pc as usize] else {
                        unreachable!("waiting only at guarded commands")
                    };
                    for (k, b) in branches.iter().enumerate() {
                        if mask & (1 << k) == 0 {
                            continue;
                        }
                        match &b.comm {
                            None => out.push((
                                Step::Select { vertex: vertex() },
                                Self::with_mode(s, p, self.settle(p, b.body)),
                            )),
                            Some(CComm::Send(peer, e)) => sends.push(Offer {
                                proc: p,
                                peer: *peer as usize,
                                branch: Some(k),
                                value: self
                                    .eval(p, &ps.store, e)
                                    .expect("payload checked at guard evaluation"),
                                slot: 0,
                            }),
                            Some(CComm::Recv(peer, slot)) => recvs.push(Offer {
                                proc: p,
                                peer: *peer as usize,
                                branch: Some(k),
                                value: Val::Undef,
                                slot: *slot,
                            }),
                        }
                    }
                }
            }
        }
        for snd in &sends {
            for rcv in recvs
                .iter()
                .filter(|r| r.proc == snd.peer && r.peer == snd.proc)
            {
                let mut next = s.clone();
                next.procs[snd.proc].mode = self.after_comm(s, snd);
                next.procs[rcv.proc].mode = self.after_comm(s, rcv);
                next.procs[rcv.proc].store[rcv.slot as usize] = snd.value;
                out.push((
                    Step::Comm {
                        sender: self.procs[snd.proc].vertex.clone(),
                        receiver: self.procs[rcv.proc].vertex.clone(),
                        value: self.to_value(snd.value),
                        var: self.procs[rcv.proc].vars[rcv.slot as usize].clone(),
                    },
                    next,
                ));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn after_comm(&self, s: &SystemState, o: &Offer) -> Mode {
        match (&s.procs[o.proc].mode, o.branch) {
            (Mode::At(pc), None) => self.settle(o.proc, pc + 1),
            (Mode::Waiting(pc, _), Some(k)) => {
                let Instr::Guarded { branches, .. } = &self.procs[o.proc].code[*pc as usize] else {
                    unreachable!()
                };
                self.settle(o.proc, branches[k].body)
            }
            _ => unreachable!("offer does not match control point"),
        }
    }

    fn evaluate_guards(
        &self,
        p: usize,
        store: &[Val],
        branches: &[CBranch],
    ) -> Result<(u64, Vec<GuardSig>), FailReason> {
        let mut mask = 0u64;
        let mut pattern = Vec::with_capacity(branches.len());
        for (k, b) in branches.iter().enumerate() {
            let open = match self.eval(p, store, &b.cond)? {
                Val::Bool(open) => open,
                _ => return Err(FailReason::TypeError),
            };
            if open {
                mask |= 1 << k;
                if let Some(CComm::Send(_, e)) = &b.comm {
                    self.eval(p, store, e)?;
                }
            }
            pattern.push(GuardSig {
                kind: b.kind.clone(),
                open,
            });
        }
        pattern.sort();
        Ok((mask, pattern))
    }

    /// Classification of a state without successors.
    pub fn classify(&self, s: &SystemState) -> Outcome {
        if s.procs.iter().all(|p| p.mode == Mode::Done) {
            Outcome::ProperlyTerminated
        } else if s.procs.iter().any(|p| p.mode == Mode::Failed) {
            Outcome::Failed
        } else {
            Outcome::Deadlocked
        }
    }

    fn proc_index(&self, v: &Vertex) -> Option<usize> {
        self.procs.iter().position(|p| &p.vertex == v)
    }

    /// Current value of a variable, `None` if undefined or unknown.
    pub fn read(&self, s: &SystemState, v: &Vertex, var: &VarName) -> Option<Value> {
        let p = self.proc_index(v)?;
        let slot = *self.procs[p].slots.get(var)?;
        match s.procs[p].store[slot as usize] {
            Val::Undef => None,
            val => Some(self.to_value(val)),
        }
    }

    /// Whether the program of `v` mentions variable `var`.
    pub fn has_var(&self, v: &Vertex, var: &VarName) -> bool {
        self.proc_index(v)
            .is_some_and(|p| self.procs[p].slots.contains_key(var))
    }

    /// One line per process: control point and defined variables.
    pub fn describe(&self, s: &SystemState) -> String {
        let mut out = String::new();
        for (p, ps) in s.procs.iter().enumerate() {
            let proc = &self.procs[p];
            let at = match &ps.mode {
                Mode::At(pc) => format!("at {pc}"),
                Mode::Waiting(pc, mask) => format!("waiting {pc} mask={mask:b}"),
                Mode::Done => "done".into(),
                Mode::Failed => "failed".into(),
            };
            let vars: Vec<String> = ps
                .store
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != Val::Undef)
                .map(|(i, v)| format!("{}={}", proc.vars[i], self.to_value(*v)))
                .collect();
            let _ = writeln!(out, "{}: {at} {{{}}}", proc.vertex, vars.join(", "));
        }
        out
    }
}

/// Enabled steps of `sys` in state `s`, in deterministic order.
pub fn enabled_steps(sys: &System, s: &SystemState) -> Result<Vec<Step>, EngineError> {
    let m = Machine::new(sys)?;
    Ok(m.successors(s).into_iter().map(|(st, _)| st).collect())
}

/// The state reached by taking `step`. When several transitions carry the
/// same label the first in canonical order is taken.
pub fn apply_step(sys: &System, s: &SystemState, step: &Step) -> Result<SystemState, EngineError> {
    let m = Machine::new(sys)?;
    m.successors(s)
        .into_iter()
        .find(|(st, _)| st == step)
        .map(|(_, next)| next)
        .ok_or_else(|| EngineError::NotEnabled {
            index: 0,
            step: step.to_string(),
        })
}
