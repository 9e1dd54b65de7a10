//! Batch front end: loads networks, extensions and systems, runs the
//! generators and checkers, and maps verdicts to exit codes.
//!
//! Exit codes: 0 pass, 1 fail, 2 unknown or limit overrun, 3 input error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use symcsp::checkers::{
    check_electoral, check_pairwise_sync, check_symmetric, count_computations, sample_check,
    CheckError, PropertyReport, SampleSpec, Verdict,
};
use symcsp::engine::{computations, render_trace, Computation, EngineError, Outcome};
use symcsp::extension::{
    check_identifying_structure, g_automorphisms, identifying_structure, parse_extension,
    render_extension, slice_orbits, verify_extension, ExtensionError,
};
use symcsp::graph::{automorphisms, is_peer_to_peer, parse_network, GraphError};
use symcsp::lang::{load_system, render_system};
use symcsp::library::{
    gen_asymmetric, gen_buffer_system, gen_election_majority_in, gen_election_sync_in, gen_sync_io,
    gen_two_process_deadlock_in, gen_two_process_sync_io, knockout_transform, networks,
    ElectionPhase, HubChoice, LibraryError,
};
use symcsp::{explore, ExtendedNetwork, Limits, Network, Permutation, StateGraph, System, Vertex};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Environment variables holding default limits.
pub const ENV_MAX_STATES: &str = "SYMCSP_MAX_STATES";
pub const ENV_MAX_DEPTH: &str = "SYMCSP_MAX_DEPTH";
pub const ENV_COMPUTATION_CAP: &str = "SYMCSP_COMPUTATION_CAP";

/// Names accepted by `gen`.
pub const GENERATORS: &[&str] = &[
    "two-process-sync-io",
    "two-process-deadlock-in",
    "buffer",
    "asymmetric",
    "sync-io",
    "two-process-knockout",
    "election-sync-in",
    "election-majority-in",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    /// A search or exploration bound was hit before an answer was found.
    #[error("{0}")]
    Limit(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Limit(_) => EXIT_UNKNOWN,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::SearchBoundExceeded { .. } => CliError::Limit(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<ExtensionError> for CliError {
    fn from(e: ExtensionError) -> Self {
        match e {
            ExtensionError::Graph(g) => g.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<LibraryError> for CliError {
    fn from(e: LibraryError) -> Self {
        match e {
            LibraryError::Graph(g) => g.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Engine(e @ EngineError::LimitExceeded { .. }) => {
                CliError::Limit(e.to_string())
            }
            e => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "symcsp",
    version,
    about = "Explore and check CSP systems on peer-to-peer networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Network commands.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Extended network commands.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// System exploration and property checks.
    #[command(subcommand)]
    Sys(SysCmd),
    /// Generate a named system as text files.
    Gen(GenArgs),
}

#[derive(Debug, Subcommand)]
enum GraphCmd {
    /// Peer-to-peer predicate and automorphism summary.
    Check { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum ExtCmd {
    /// Check the symmetry-preserving extension conditions.
    Verify { file: PathBuf },
    /// Cut the orbits of an extending automorphism to the base period.
    Slice {
        file: PathBuf,
        /// Base automorphism in cycle notation, e.g. `(1 2)`.
        #[arg(long)]
        sigma: String,
        /// Its extension in cycle notation.
        #[arg(long)]
        iota: String,
        /// One representative per orbit of sigma, comma-separated;
        /// defaults to the least vertex of each orbit.
        #[arg(long)]
        reps: Option<String>,
    },
    /// Build the identifying structure and check its automorphisms.
    Idstruct {
        file: PathBuf,
        /// Largest vertex count for the brute-force automorphism check.
        #[arg(long, default_value_t = 16)]
        bound: usize,
    },
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long)]
    max_states: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    computation_cap: Option<usize>,
    /// Write a step log to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SysCmd {
    /// Explore the full state graph.
    Explore {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        /// List every computation, up to the computation cap.
        #[arg(long)]
        list: bool,
    },
    /// Pairwise synchronization over a set of processes.
    CheckSync {
        file: PathBuf,
        /// `all` or a comma-separated list of processes.
        #[arg(long, default_value = "all")]
        pairs: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Every computation agrees on one process name in `leader`.
    CheckElection {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Symmetry under the network's automorphisms.
    CheckSymmetry {
        file: PathBuf,
        /// Extension file; restricts the group to block-respecting
        /// automorphisms of its extension network.
        #[arg(long)]
        g_filter: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Seeded random runs for systems too large to explore.
    Sample {
        file: PathBuf,
        /// Seed range `A..B`, end exclusive.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        max_steps: usize,
        /// `all` or a comma-separated list of processes every run must pair.
        #[arg(long)]
        pairs: Option<String>,
        /// Require agreeing `leader` values at the end of each run.
        #[arg(long)]
        electoral: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    /// One of the generator names listed by `gen list`.
    name: String,
    /// Network file, for generators that take one.
    #[arg(long)]
    net: Option<PathBuf>,
    /// Directory to write into; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Limits after applying defaults, environment and flags, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub limits: Limits,
    pub computation_cap: usize,
}

impl Settings {
    /// Defaults overridden by the environment, read through `env`.
    pub fn from_env(env: &dyn Fn(&str) -> Option<String>) -> Result<Self, CliError> {
        let read = |key: &str, default: usize| -> Result<usize, CliError> {
            match env(key) {
                None => Ok(default),
                Some(s) => s.trim().parse().map_err(|_| {
                    CliError::Input(format!("{key}={s:?} is not a non-negative integer"))
                }),
            }
        };
        Ok(Settings {
            limits: Limits {
                max_states: read(ENV_MAX_STATES, Limits::DEFAULT_MAX_STATES)?,
                max_depth: read(ENV_MAX_DEPTH, Limits::DEFAULT_MAX_DEPTH)?,
            },
            computation_cap: read(ENV_COMPUTATION_CAP, Limits::DEFAULT_COMPUTATION_CAP)?,
        })
    }

    fn with(mut self, a: &LimitArgs) -> Self {
        if let Some(n) = a.max_states {
            self.limits.max_states = n;
        }
        if let Some(n) = a.max_depth {
            self.limits.max_depth = n;
        }
        if let Some(n) = a.computation_cap {
            self.computation_cap = n;
        }
        self
    }

    fn header(&self, title: &str) -> String {
        format!(
            "# {title} (max_states={} max_depth={} computation_cap={})\n",
            self.limits.max_states, self.limits.max_depth, self.computation_cap
        )
    }
}

/// Runs one invocation with the process environment.
pub fn run_command<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_env(argv, &|k| std::env::var(k).ok(), out, err)
}

/// Runs one invocation, reading limit defaults through `env`.
pub fn run_with_env<I, S>(
    argv: I,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = Settings::from_env(env).and_then(|s| dispatch(cli.command, s));
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// Report text and exit code.
type Run = Result<(String, i32), CliError>;

fn dispatch(cmd: Command, settings: Settings) -> Run {
    match cmd {
        Command::Graph(GraphCmd::Check { file }) => graph_check(&file),
        Command::Ext(ExtCmd::Verify { file }) => ext_verify(&file),
        Command::Ext(ExtCmd::Slice {
            file,
            sigma,
            iota,
            reps,
        }) => ext_slice(&file, &sigma, &iota, reps.as_deref()),
        Command::Ext(ExtCmd::Idstruct { file, bound }) => ext_idstruct(&file, bound),
        Command::Sys(cmd) => sys(cmd, settings),
        Command::Gen(a) => gen(&a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<Network, CliError> {
    parse_network(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_extension(path: &Path) -> Result<ExtendedNetwork, CliError> {
    parse_extension(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_sys(path: &Path) -> Result<System, CliError> {
    load_system(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn pass_fail(ok: bool) -> i32 {
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn graph_check(file: &Path) -> Run {
    let net = load_network(file)?;
    let r = is_peer_to_peer(&net)?;
    let mut text = format!("# graph check {}\n", file.display());
    let _ = writeln!(text, "vertices={}", net.len());
    let _ = writeln!(text, "edges={}", net.edges().len());
    let _ = writeln!(text, "{r}");
    let wamoti_count = automorphisms(&net)?
        .iter()
        .filter(|p| p.period() > 1 && p.is_well_balanced())
        .count();
    let _ = writeln!(text, "wamoti={wamoti_count}");
    Ok((text, pass_fail(r.holds())))
}

fn ext_verify(file: &Path) -> Run {
    let x = load_extension(file)?;
    let r = verify_extension(&x)?;
    let mut text = format!("# ext verify {}\n", file.display());
    let _ = writeln!(text, "base_vertices={}", x.base().len());
    let _ = writeln!(text, "extension_vertices={}", x.ext().len());
    let _ = writeln!(text, "{r}");
    Ok((text, pass_fail(r.holds())))
}

fn permutation(domain: &BTreeSet<Vertex>, spec: &str, what: &str) -> Result<Permutation, CliError> {
    Permutation::parse_cycles(domain, spec)
        .map_err(|e| CliError::Input(format!("--{what} {spec:?}: {e}")))
}

fn ext_slice(file: &Path, sigma: &str, iota: &str, reps: Option<&str>) -> Run {
    let x = load_extension(file)?;
    let sigma = permutation(x.base().vertices(), sigma, "sigma")?;
    let iota = permutation(x.ext().vertices(), iota, "iota")?;
    let mut text = format!("# ext slice {}\n", file.display());
    let _ = writeln!(text, "sigma={sigma}");
    let _ = writeln!(text, "iota={iota}");
    let reps: Option<Vec<Vertex>> = reps.map(|r| {
        r.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Vertex::new)
            .collect()
    });
    match slice_orbits(&x, &sigma, &iota, reps.as_deref()) {
        Ok(s) => {
            let _ = writeln!(text, "sliced={s}");
            let _ = writeln!(text, "period={}", s.period());
            let _ = writeln!(text, "well_balanced={}", s.is_well_balanced());
            for orbit in s.orbits() {
                let names: Vec<&str> = orbit.iter().map(Vertex::as_str).collect();
                let _ = writeln!(text, "orbit {}", names.join(" "));
            }
            Ok((text, EXIT_PASS))
        }
        Err(ExtensionError::Postcondition(m)) => {
            let _ = writeln!(text, "postcondition violated: {m}");
            Ok((text, EXIT_FAIL))
        }
        Err(e) => Err(e.into()),
    }
}

fn ext_idstruct(file: &Path, bound: usize) -> Run {
    let x = load_extension(file)?;
    let h = identifying_structure(&x)?;
    let c = check_identifying_structure(&x, &h, bound)?;
    let mut text = format!("# ext idstruct {}\n", file.display());
    let _ = writeln!(text, "vertices={}", c.vertex_count);
    let _ = writeln!(text, "expected_vertices={}", c.expected_vertex_count);
    let _ = writeln!(text, "automorphisms={}", c.automorphism_count);
    match &c.offending {
        Some(p) => {
            let _ = writeln!(text, "respects_blocks=false witness={p}");
        }
        None => {
            let _ = writeln!(text, "respects_blocks=true");
        }
    }
    match &c.lifted_wamoti {
        Some(p) => {
            let _ = writeln!(text, "lifted_wamoti={p}");
        }
        None => {
            let _ = writeln!(text, "lifted_wamoti=none");
        }
    }
    let _ = writeln!(text, "holds={}", c.holds());
    text.push_str("---\n");
    text.push_str(&render_extension(&h));
    Ok((text, pass_fail(c.holds())))
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn process_set(sys: &System, spec: &str) -> Result<BTreeSet<Vertex>, CliError> {
    if spec.trim() == "all" {
        return Ok(sys.vertices().cloned().collect());
    }
    let set: BTreeSet<Vertex> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Vertex::new)
        .collect();
    if let Some(v) = set.iter().find(|v| sys.process(v).is_none()) {
        return Err(CliError::Input(format!("--pairs: {v} is not a process")));
    }
    Ok(set)
}

fn seed_range(spec: &str) -> Result<std::ops::Range<u64>, CliError> {
    let bad = || CliError::Input(format!("--seeds {spec:?}: expected A..B with A <= B"));
    let (a, b) = spec.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..b)
}

fn trace_text(c: &Computation) -> String {
    format!("{}outcome: {}\n", render_trace(&c.steps), c.outcome)
}

/// The computation that always takes the first listed step, cut at the
/// depth limit if the graph is cyclic.
fn first_computation(g: &StateGraph, max_depth: usize) -> Computation {
    let mut s = g.initial();
    let mut steps = Vec::new();
    loop {
        if let Some(outcome) = g.terminal(s) {
            return Computation { steps, outcome };
        }
        if steps.len() >= max_depth {
            return Computation {
                steps,
                outcome: Outcome::Truncated,
            };
        }
        let (step, t) = g
            .successors(s)
            .next()
            .expect("non-terminal state has a step");
        steps.push(step.clone());
        s = t;
    }
}

fn write_trace(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Renders a report and writes the trace of its first witness, or of a
/// representative computation when there is none.
fn finish(
    r: &PropertyReport,
    s: Settings,
    trace: &Option<PathBuf>,
    fallback: impl FnOnce() -> Option<Computation>,
) -> Run {
    let mut text = r.render(s.limits, s.computation_cap);
    text.push_str("---\n");
    text.push_str(&r.summary());
    if trace.is_some() {
        let c = r
            .witnesses
            .iter()
            .find_map(|w| w.computation.clone())
            .or_else(fallback);
        write_trace(trace, &c.map(|c| trace_text(&c)).unwrap_or_default())?;
    }
    Ok((text, verdict_code(r.verdict)))
}

/// Representative computation for a passing check, from a fresh
/// exploration that is known to fit within the limits.
fn representative(sys: &System, s: Settings) -> Option<Computation> {
    explore(sys, s.limits)
        .ok()
        .map(|g| first_computation(&g, s.limits.max_depth))
}

fn sys(cmd: SysCmd, base: Settings) -> Run {
    match cmd {
        SysCmd::Explore { file, limits, list } => {
            let s = base.with(&limits);
            sys_explore(&load_sys(&file)?, s, list, &limits.trace)
        }
        SysCmd::CheckSync {
            file,
            pairs,
            limits,
        } => {
            let s = base.with(&limits);
            let sys = load_sys(&file)?;
            let q = process_set(&sys, &pairs)?;
            let r = check_pairwise_sync(&sys, &q, s.limits)?;
            finish(&r, s, &limits.trace, || representative(&sys, s))
        }
        SysCmd::CheckElection { file, limits } => {
            let s = base.with(&limits);
            let sys = load_sys(&file)?;
            let r = check_electoral(&sys, s.limits)?;
            finish(&r, s, &limits.trace, || representative(&sys, s))
        }
        SysCmd::CheckSymmetry {
            file,
            g_filter,
            limits,
        } => {
            let s = base.with(&limits);
            let sys = load_sys(&file)?;
            let group = match &g_filter {
                None => automorphisms(sys.network())?,
                Some(path) => {
                    let x = load_extension(path)?;
                    if x.ext() != sys.network() {
                        return Err(CliError::Input(format!(
                            "{}: extension network differs from the system's network",
                            path.display()
                        )));
                    }
                    g_automorphisms(&x)?
                }
            };
            let mut r = check_symmetric(&sys, &group, s.limits)?;
            let names: Vec<String> = group.iter().map(|p| p.to_string()).collect();
            r.notes
                .push(format!("group ({}): {}", group.len(), names.join(" ")));
            finish(&r, s, &limits.trace, || representative(&sys, s))
        }
        SysCmd::Sample {
            file,
            seeds,
            max_steps,
            pairs,
            electoral,
            limits,
        } => {
            let s = base.with(&limits);
            let sys = load_sys(&file)?;
            let spec = SampleSpec {
                seeds: seed_range(&seeds)?,
                max_steps,
                pairs: pairs.map(|p| process_set(&sys, &p)).transpose()?,
                electoral,
            };
            let r = sample_check(&sys, &spec)?;
            let first = spec.seeds.start;
            finish(&r, s, &limits.trace, || {
                symcsp::engine::random_run(&sys, first, max_steps).ok()
            })
        }
    }
}

fn sys_explore(sys: &System, s: Settings, list: bool, trace: &Option<PathBuf>) -> Run {
    let mut text = s.header("explore");
    let g = match explore(sys, s.limits) {
        Ok(g) => g,
        Err(e @ EngineError::LimitExceeded { .. }) => {
            let _ = writeln!(text, "complete=false");
            let _ = writeln!(text, "note: {e}");
            write_trace(trace, "")?;
            return Ok((text, EXIT_UNKNOWN));
        }
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let _ = writeln!(text, "complete=true");
    let _ = writeln!(text, "states={}", g.len());
    let _ = writeln!(text, "transitions={}", g.transition_count());
    let _ = writeln!(text, "depth={}", g.depth());
    let _ = writeln!(text, "cyclic={}", g.is_cyclic());
    for (o, n) in g.outcome_counts() {
        let _ = writeln!(text, "terminals.{}={n}", o);
    }
    if let Some(c) = count_computations(&g) {
        let _ = writeln!(text, "computations={c}");
    }
    let mut code = if g.is_cyclic() {
        EXIT_UNKNOWN
    } else {
        EXIT_PASS
    };
    if list {
        match computations(&g, s.computation_cap) {
            Ok(all) => {
                for (i, c) in all.iter().enumerate() {
                    let _ = writeln!(text, "computation {} ({})", i + 1, c.outcome);
                    for line in render_trace(&c.steps).lines() {
                        let _ = writeln!(text, "  {line}");
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(text, "note: not listing computations: {e}");
                code = EXIT_UNKNOWN;
            }
        }
    }
    write_trace(
        trace,
        &trace_text(&first_computation(&g, s.limits.max_depth)),
    )?;
    Ok((text, code))
}

/// First vertex linked both ways to every other vertex.
fn first_hub(net: &Network) -> Option<Vertex> {
    net.vertices()
        .iter()
        .find(|h| {
            net.vertices()
                .iter()
                .filter(|w| w != h)
                .all(|w| net.has_edge(h, w) && net.has_edge(w, h))
        })
        .cloned()
}

fn generate(name: &str, net: Option<&Network>) -> Result<System, CliError> {
    let need = || {
        net.cloned()
            .ok_or_else(|| CliError::Input(format!("generator {name} needs --net <file>")))
    };
    Ok(match name {
        "two-process-sync-io" => gen_two_process_sync_io()?,
        "two-process-deadlock-in" => gen_two_process_deadlock_in()?,
        "buffer" => gen_buffer_system()?,
        "asymmetric" => gen_asymmetric()?,
        "sync-io" => gen_sync_io(&need()?, true)?,
        "two-process-knockout" => {
            let s = gen_two_process_sync_io()?;
            let all = s.vertices().cloned().collect();
            knockout_transform(&s, &all)?
        }
        "election-sync-in" => {
            let net = need()?;
            let hub = first_hub(&net).ok_or_else(|| {
                CliError::Input("no vertex is linked both ways to all others".into())
            })?;
            let phase = ElectionPhase::stub(&net, &hub)?;
            gen_election_sync_in(&net, HubChoice::Fixed(hub), phase)?
        }
        "election-majority-in" => {
            let net = net.cloned().unwrap_or_else(networks::positive);
            let phase = gen_election_majority_in(&net)?;
            gen_election_sync_in(&net, HubChoice::Fixed(Vertex::new("1")), phase)?
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown generator {other:?}; known: {}",
                GENERATORS.join(", ")
            )))
        }
    })
}

fn gen(a: &GenArgs) -> Run {
    if a.name == "list" {
        return Ok((GENERATORS.join("\n") + "\n", EXIT_PASS));
    }
    let net = a.net.as_deref().map(load_network).transpose()?;
    let sys = generate(&a.name, net.as_ref())?;
    let files = render_system(&sys);
    match &a.out {
        Some(dir) => {
            let path = files
                .write(dir, &a.name)
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
            Ok((format!("wrote {}\n", path.display()), EXIT_PASS))
        }
        None => {
            let mut text = String::new();
            for (name, body) in &files.files {
                let _ = writeln!(text, "== {name}");
                text.push_str(body);
            }
            let _ = writeln!(text, "== {}.sys", a.name);
            text.push_str(&files.system);
            Ok((text, EXIT_PASS))
        }
    }
}
