//! Systems: programs bound to the vertices of a network.
//!
//! System file format:
//!
//! ```text
//! network ring.graph
//! use sync.csp as sync
//! at P0 run sync with PEER=P1
//! at P1 run sync with PEER=P0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::{
    parse_program, print_program, Branch, Comm, Expr, NameRef, ParseError, Program, Stmt, Value,
    VarRef,
};
use crate::graph::{parse_network, render_network, GraphError, Network, Vertex};

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("{file}: {source}")]
    Graph {
        file: String,
        #[source]
        source: GraphError,
    },
    #[error("{file}:{source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("process {vertex} is not a vertex of the network")]
    UnknownVertex { vertex: Vertex },
    #[error("vertex {vertex} has no process")]
    MissingProcess { vertex: Vertex },
    #[error("placeholder {placeholder} of process {vertex} is unbound")]
    UnboundPlaceholder { vertex: Vertex, placeholder: String },
    #[error("process {vertex} binds {placeholder}, which its program does not declare")]
    UnknownPlaceholder { vertex: Vertex, placeholder: String },
    #[error("process {vertex} binds {placeholder} to {target}, which is not a vertex")]
    NotAVertex {
        vertex: Vertex,
        placeholder: String,
        target: String,
    },
    #[error("atom {atom} of process {vertex} clashes with a vertex name")]
    AtomCollision { vertex: Vertex, atom: String },
}

/// A program together with the placeholder assignment for one vertex.
#[derive(Debug, Clone)]
pub struct Binding {
    pub program: Arc<Program>,
    pub args: BTreeMap<String, Vertex>,
}

impl Binding {
    pub fn new(program: Arc<Program>) -> Self {
        Binding {
            program,
            args: BTreeMap::new(),
        }
    }

    pub fn with(mut self, placeholder: &str, target: &str) -> Self {
        self.args
            .insert(placeholder.to_string(), Vertex::new(target));
        self
    }
}

/// One process of a system: the concrete program with every placeholder
/// and `self` replaced by a vertex name.
#[derive(Debug, Clone)]
pub struct Process {
    pub vertex: Vertex,
    pub program: Program,
    pub binding: Binding,
}

#[derive(Debug, Clone)]
pub struct System {
    net: Network,
    processes: BTreeMap<Vertex, Process>,
}

impl System {
    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn processes(&self) -> &BTreeMap<Vertex, Process> {
        &self.processes
    }

    pub fn process(&self, v: &Vertex) -> Option<&Process> {
        self.processes.get(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.processes.keys()
    }

    /// Same processes over another network, e.g. to test admission.
    pub fn with_network(&self, net: Network) -> Result<System, SystemError> {
        let bindings = self
            .processes
            .iter()
            .map(|(v, p)| (v.clone(), p.binding.clone()))
            .collect();
        instantiate(&net, &bindings)
    }
}

fn resolve_name(n: &NameRef, me: &Vertex, args: &BTreeMap<String, Vertex>) -> NameRef {
    match n {
        NameRef::Placeholder(p) => NameRef::Vertex(args[p].clone()),
        NameRef::SelfName => NameRef::Vertex(me.clone()),
        NameRef::Vertex(_) => n.clone(),
    }
}

struct Resolver<'a> {
    me: &'a Vertex,
    args: &'a BTreeMap<String, Vertex>,
}

impl Resolver<'_> {
    fn name(&self, n: &NameRef) -> NameRef {
        resolve_name(n, self.me, self.args)
    }

    fn var(&self, v: &VarRef) -> VarRef {
        VarRef {
            name: v.name.clone(),
            index: v.index.as_ref().map(|i| self.name(i)),
        }
    }

    fn expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Lit(_) => e.clone(),
            Expr::Var(v) => Expr::Var(self.var(v)),
            Expr::Name(n) => match self.name(n) {
                NameRef::Vertex(v) => Expr::Lit(Value::Atom(v)),
                _ => unreachable!("names resolve to vertices"),
            },
            Expr::Tag(t, a) => Expr::Tag(t.clone(), Box::new(self.expr(a))),
            Expr::Not(a) => Expr::negate(self.expr(a)),
            Expr::Bin(op, a, b) => Expr::bin(*op, self.expr(a), self.expr(b)),
        }
    }

    fn comm(&self, c: &Comm) -> Comm {
        match c {
            Comm::Send(p, e) => Comm::Send(self.name(p), self.expr(e)),
            Comm::Recv(p, v) => Comm::Recv(self.name(p), self.var(v)),
        }
    }

    fn branches(&self, bs: &[Branch]) -> Vec<Branch> {
        bs.iter()
            .map(|b| Branch {
                cond: self.expr(&b.cond),
                comm: b.comm.as_ref().map(|c| self.comm(c)),
                body: self.stmts(&b.body),
            })
            .collect()
    }

    fn stmts(&self, stmts: &[Stmt]) -> Vec<Stmt> {
        stmts
            .iter()
            .map(|s| match s {
                Stmt::Assign(v, e) => Stmt::Assign(self.var(v), self.expr(e)),
                Stmt::Send(p, e) => Stmt::Send(self.name(p), self.expr(e)),
                Stmt::Recv(p, v) => Stmt::Recv(self.name(p), self.var(v)),
                Stmt::Select(bs) => Stmt::Select(self.branches(bs)),
                Stmt::Repeat(bs) => Stmt::Repeat(self.branches(bs)),
            })
            .collect()
    }
}

/// Binds a program to every vertex of `net`, replacing placeholders and
/// `self` by concrete names.
pub fn instantiate(
    net: &Network,
    bindings: &BTreeMap<Vertex, Binding>,
) -> Result<System, SystemError> {
    if let Some(v) = bindings.keys().find(|v| !net.vertices().contains(*v)) {
        return Err(SystemError::UnknownVertex { vertex: v.clone() });
    }
    if let Some(v) = net.vertices().iter().find(|v| !bindings.contains_key(*v)) {
        return Err(SystemError::MissingProcess { vertex: v.clone() });
    }
    let mut processes = BTreeMap::new();
    for (v, b) in bindings {
        let prog = &b.program;
        if let Some(p) = prog.params.iter().find(|p| !b.args.contains_key(*p)) {
            return Err(SystemError::UnboundPlaceholder {
                vertex: v.clone(),
                placeholder: p.clone(),
            });
        }
        for (p, target) in &b.args {
            if !prog.params.contains(p) {
                return Err(SystemError::UnknownPlaceholder {
                    vertex: v.clone(),
                    placeholder: p.clone(),
                });
            }
            if !net.vertices().contains(target) {
                return Err(SystemError::NotAVertex {
                    vertex: v.clone(),
                    placeholder: p.clone(),
                    target: target.to_string(),
                });
            }
        }
        if let Some(a) = prog.atoms.iter().find(|a| net.contains(a)) {
            return Err(SystemError::AtomCollision {
                vertex: v.clone(),
                atom: a.clone(),
            });
        }
        let r = Resolver {
            me: v,
            args: &b.args,
        };
        let program = Program {
            name: prog.name.clone(),
            params: Vec::new(),
            atoms: prog.atoms.clone(),
            body: r.stmts(&prog.body),
        };
        processes.insert(
            v.clone(),
            Process {
                vertex: v.clone(),
                program,
                binding: b.clone(),
            },
        );
    }
    Ok(System {
        net: net.clone(),
        processes,
    })
}

/// A communication whose direction has no edge in the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offence {
    pub vertex: Vertex,
    pub peer: Vertex,
    pub is_send: bool,
    pub statement: String,
}

impl fmt::Display for Offence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = if self.is_send {
            (&self.vertex, &self.peer)
        } else {
            (&self.peer, &self.vertex)
        };
        write!(
            f,
            "{}: `{}` needs edge {a} -> {b}",
            self.vertex, self.statement
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdmitReport {
    pub offending: Vec<Offence>,
}

impl AdmitReport {
    pub fn holds(&self) -> bool {
        self.offending.is_empty()
    }
}

fn comm_text(c: &Comm) -> String {
    let body = vec![Stmt::from_comm(c.clone())];
    print_program(&Program::new("x", body))
        .lines()
        .nth(1)
        .unwrap_or_default()
        .trim()
        .to_string()
}

/// Checks that every send from `v` to `w` and every receive at `w` from `v`
/// runs along an edge `(v, w)` of `net`.
pub fn admits(net: &Network, sys: &System) -> AdmitReport {
    let mut offending = Vec::new();
    for (v, p) in &sys.processes {
        for c in p.program.communications() {
            let NameRef::Vertex(peer) = c.peer() else {
                unreachable!("instantiated programs use concrete names")
            };
            let ok = if c.is_send() {
                net.has_edge(v, peer)
            } else {
                net.has_edge(peer, v)
            };
            if !ok {
                offending.push(Offence {
                    vertex: v.clone(),
                    peer: peer.clone(),
                    is_send: c.is_send(),
                    statement: comm_text(&c),
                });
            }
        }
    }
    AdmitReport { offending }
}

/// Parses a system file. `read` maps file names mentioned in it to their
/// contents.
pub fn parse_system(
    text: &str,
    read: &mut dyn FnMut(&str) -> std::io::Result<String>,
) -> Result<System, SystemError> {
    let mut net = None;
    let mut programs: BTreeMap<String, Arc<Program>> = BTreeMap::new();
    let mut bindings = BTreeMap::new();
    let load = |read: &mut dyn FnMut(&str) -> std::io::Result<String>, file: &str| {
        read(file).map_err(|e| SystemError::Io {
            file: file.to_string(),
            message: e.to_string(),
        })
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| SystemError::Syntax { line, message };
        let content = crate::graph::strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "network" => {
                let [_, file] = words[..] else {
                    return Err(syntax("expected `network <file>`".into()));
                };
                if net.is_some() {
                    return Err(syntax("network given twice".into()));
                }
                let text = load(read, file)?;
                net = Some(parse_network(&text).map_err(|source| SystemError::Graph {
                    file: file.to_string(),
                    source,
                })?);
            }
            "use" => {
                let [_, file, "as", name] = words[..] else {
                    return Err(syntax("expected `use <file> as <name>`".into()));
                };
                let text = load(read, file)?;
                let prog = parse_program(&text).map_err(|source| SystemError::Parse {
                    file: file.to_string(),
                    source,
                })?;
                if programs.insert(name.to_string(), Arc::new(prog)).is_some() {
                    return Err(syntax(format!("program name {name} used twice")));
                }
            }
            "at" => {
                if words.len() < 4 || words[2] != "run" {
                    return Err(syntax(
                        "expected `at <vertex> run <name> [with P=v, ...]`".into(),
                    ));
                }
                let vertex = Vertex::new(words[1]);
                let Some(prog) = programs.get(words[3]) else {
                    return Err(syntax(format!("unknown program {}", words[3])));
                };
                let mut binding = Binding::new(prog.clone());
                if words.len() > 4 {
                    if words[4] != "with" {
                        return Err(syntax(format!("expected `with`, found {:?}", words[4])));
                    }
                    let rest = words[5..].join(" ");
                    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let Some((k, v)) = item.split_once('=') else {
                            return Err(syntax(format!("expected P=v, found {item:?}")));
                        };
                        let (k, v) = (k.trim(), v.trim());
                        if binding.args.insert(k.to_string(), Vertex::new(v)).is_some() {
                            return Err(syntax(format!("{k} bound twice")));
                        }
                    }
                }
                if bindings.insert(vertex.clone(), binding).is_some() {
                    return Err(syntax(format!("vertex {vertex} bound twice")));
                }
            }
            other => return Err(syntax(format!("unknown keyword {other:?}"))),
        }
    }
    let net = net.ok_or(SystemError::Syntax {
        line: text.lines().count().max(1),
        message: "missing `network <file>` line".into(),
    })?;
    instantiate(&net, &bindings)
}

/// Loads a system file from disk, resolving names relative to its directory.
pub fn load_system(path: &Path) -> Result<System, SystemError> {
    let io = |p: &Path, e: std::io::Error| SystemError::Io {
        file: p.display().to_string(),
        message: e.to_string(),
    };
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_system(&text, &mut |name| std::fs::read_to_string(dir.join(name)))
}

/// The files making up a system: a network, one file per distinct program
/// and the system file binding them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFiles {
    pub system: String,
    pub files: BTreeMap<String, String>,
}

impl SystemFiles {
    /// Writes every file into `dir` and returns the path of the system file.
    pub fn write(&self, dir: &Path, stem: &str) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        for (name, text) in &self.files {
            std::fs::write(dir.join(name), text)?;
        }
        let path = dir.join(format!("{stem}.sys"));
        std::fs::write(&path, &self.system)?;
        Ok(path)
    }

    /// Parses the rendered files back without touching the disk.
    pub fn parse(&self) -> Result<System, SystemError> {
        parse_system(&self.system, &mut |name| {
            self.files
                .get(name)
                .cloned()
                .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"))
        })
    }
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Renders a system as a set of text files. Processes sharing the same
/// source program share one program file.
pub fn render_system(sys: &System) -> SystemFiles {
    let mut files = BTreeMap::new();
    files.insert("network.graph".to_string(), render_network(&sys.net));
    let mut out = String::from("network network.graph\n");
    let mut names: Vec<(Arc<Program>, String)> = Vec::new();
    for p in sys.processes.values() {
        let prog = &p.binding.program;
        if names
            .iter()
            .any(|(q, _)| Arc::ptr_eq(q, prog) || **q == **prog)
        {
            continue;
        }
        let base = file_safe(&prog.name);
        let mut alias = base.clone();
        let mut k = 2;
        while names.iter().any(|(_, a)| *a == alias) {
            alias = format!("{base}{k}");
            k += 1;
        }
        files.insert(format!("{alias}.csp"), print_program(prog));
        out.push_str(&format!("use {alias}.csp as {alias}\n"));
        names.push((prog.clone(), alias));
    }
    for (v, p) in &sys.processes {
        let prog = &p.binding.program;
        let alias = &names
            .iter()
            .find(|(q, _)| Arc::ptr_eq(q, prog) || **q == **prog)
            .expect("every program was named")
            .1;
        out.push_str(&format!("at {v} run {alias}"));
        if !p.binding.args.is_empty() {
            let args: Vec<String> = p
                .binding
                .args
                .iter()
                .map(|(k, t)| format!("{k}={t}"))
                .collect();
            out.push_str(&format!(" with {}", args.join(", ")));
        }
        out.push('\n');
    }
    SystemFiles { system: out, files }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYNC: &str = "program sync(PEER)
recd := false; sent := false;
do [ not recd & PEER ? x -> recd := true [] not sent & PEER ! self -> sent := true ] od";

    fn pair(edges: &[(&str, &str)]) -> System {
        let net = Network::from_strs(&["P0", "P1"], edges).unwrap();
        let prog = Arc::new(parse_program(SYNC).unwrap());
        let bindings = BTreeMap::from([
            (
                Vertex::new("P0"),
                Binding::new(prog.clone()).with("PEER", "P1"),
            ),
            (Vertex::new("P1"), Binding::new(prog).with("PEER", "P0")),
        ]);
        instantiate(&net, &bindings).unwrap()
    }

    #[test]
    fn instantiation_resolves_names() {
        let sys = pair(&[("P0", "P1"), ("P1", "P0")]);
        let p0 = &sys.process(&Vertex::new("P0")).unwrap().program;
        let text = print_program(p0);
        assert!(text.contains("\"P1\" ! \"P0\""), "{text}");
        assert!(admits(sys.network(), &sys).holds());
    }

    #[test]
    fn admission_reports_missing_direction() {
        let sys = pair(&[("P0", "P1")]);
        let r = admits(sys.network(), &sys);
        assert!(!r.holds());
        assert!(r.offending.iter().all(|o| {
            (o.vertex.as_str() == "P1" && o.is_send) || (o.vertex.as_str() == "P0" && !o.is_send)
        }));
        assert!(r
            .offending
            .iter()
            .any(|o| o.vertex.as_str() == "P1" && o.is_send));
    }

    #[test]
    fn binding_errors() {
        let net = Network::from_strs(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap();
        let prog = Arc::new(parse_program(SYNC).unwrap());
        let bad = BTreeMap::from([
            (
                Vertex::new("a"),
                Binding::new(prog.clone()).with("PEER", "zz"),
            ),
            (
                Vertex::new("b"),
                Binding::new(prog.clone()).with("PEER", "a"),
            ),
        ]);
        assert!(matches!(
            instantiate(&net, &bad),
            Err(SystemError::NotAVertex { .. })
        ));
        let unbound = BTreeMap::from([
            (Vertex::new("a"), Binding::new(prog.clone())),
            (Vertex::new("b"), Binding::new(prog).with("PEER", "a")),
        ]);
        assert!(matches!(
            instantiate(&net, &unbound),
            Err(SystemError::UnboundPlaceholder { .. })
        ));
        let empty = Arc::new(Program::new("idle", vec![]));
        let idle = BTreeMap::from([
            (Vertex::new("a"), Binding::new(empty.clone())),
            (Vertex::new("b"), Binding::new(empty)),
        ]);
        let sys = instantiate(&net, &idle).unwrap();
        assert!(admits(&net, &sys).holds());
    }

    #[test]
    fn system_files_round_trip() {
        let sys = pair(&[("P0", "P1"), ("P1", "P0")]);
        let files = render_system(&sys);
        assert_eq!(files.files.len(), 2);
        let back = files.parse().unwrap();
        assert_eq!(render_system(&back), files);
        let dir = tempdir();
        let path = files.write(&dir, "pair").unwrap();
        let loaded = load_system(&path).unwrap();
        assert_eq!(render_system(&loaded), files);
        std::fs::remove_dir_all(dir).ok();
    }

    fn tempdir() -> PathBuf {
        let d = std::env::temp_dir().join(format!("symcsp-sys-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn system_file_errors_carry_lines() {
        let mut read = |_: &str| Ok("vertex a\n".to_string());
        let e = parse_system("network n\nat a go x\n", &mut read).unwrap_err();
        assert!(matches!(e, SystemError::Syntax { line: 2, .. }), "{e}");
        let mut read = |f: &str| Ok(if f == "n" { "vertex a\n" } else { "x := \n" }.to_string());
        let e = parse_system("network n\nuse p.csp as p\n", &mut read).unwrap_err();
        assert!(e.to_string().starts_with("p.csp:"), "{e}");
    }
}
