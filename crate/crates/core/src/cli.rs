//! The `girthforge` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{
    entropy_lp_complexity, entropy_lp_set_query, multipartite_cover_minmax, star_cover_minmax, verify_cover,
    BoundsError, EntropyObjective,
};
use crate::certificate::{audit_certificate, certify_sum_bound, CertError, Certificate};
use crate::family::{
    build_cycle, build_gd, build_h, build_large_girth, build_pi_graph_with, canonical_relabel, lift_pi, Bijection,
    FamilyError, GdGraph, GdSidecar, LargeGirth, LargeGirthOptions, PiGraph, PiGraphOptions, SizePolicy,
};
use crate::graph::{girth_with_jobs, two_color, Graph, GraphError, Vertex};
use crate::rational::Rational;
use crate::scheme::{
    enumerate_joint_with_budget, make_star_decomposition, measured_ratio, realize_scheme, verify_perfect,
    DecompositionScheme, SchemeError, ENUMERATION_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "girthforge",
    version,
    about = "Large-girth regular graphs, information-ratio bounds and secret-sharing checks"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "GIRTHFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel inner loops.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Also print 6-place decimal approximations of rationals.
    #[arg(long, global = true)]
    pub decimal: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a graph and write it as an edge list plus a JSON sidecar.
    #[command(subcommand)]
    Gen(Gen),
    /// Check a property of a graph.
    #[command(subcommand)]
    Check(Check),
    /// Compute an exact bound on the information ratio.
    #[command(subcommand)]
    Bound(Bound),
    /// Emit a certificate for the vertex-sum bound of a family member.
    Certify(CertifyArgs),
    /// Re-check a certificate against a graph.
    Audit(AuditArgs),
    /// Build or verify a star-decomposition secret-sharing scheme.
    #[command(subcommand)]
    Scheme(SchemeCmd),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Edge list path; the sidecar goes to `<out>.json`.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Gen {
    Cycle {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    Gd {
        /// `n_2,...,n_d`.
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        /// Relabel so that edges join nearby labels.
        #[arg(long)]
        canonical: bool,
        #[command(flatten)]
        out: OutArg,
    },
    Pigraph {
        #[arg(long)]
        girth: usize,
        /// Half the vertex count.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_retries: usize,
        /// Retry until the measured girth exceeds the target.
        #[arg(long)]
        strict: bool,
        /// Longest surgery interval.
        #[arg(long)]
        max_interval: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    H {
        /// Family member to copy.
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        m: usize,
        /// Bijection `A -> B` as a JSON list of `[a, b]` pairs.
        #[arg(long, conflicts_with = "pigraph", required_unless_present = "pigraph")]
        pi: Option<PathBuf>,
        /// π-graph JSON, lifted onto a canonically labeled cycle.
        #[arg(long)]
        pigraph: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    LargeGirth {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long, value_enum, default_value_t = Policy::Practical)]
        policy: Policy,
        #[arg(long, default_value_t = 2_000_000)]
        max_vertices: usize,
        /// Also find a bijection for the top level, written to `<out>.pi.json`.
        #[arg(long)]
        final_pi: bool,
        #[arg(long, default_value_t = 4)]
        retries: usize,
        /// Required with the practical policy.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Practical,
    PaperBound,
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// Edge list; a sidecar is read from `<input>.json` when needed.
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Check {
    Girth {
        #[command(flatten)]
        input: InputArg,
        /// Fail unless the girth is strictly larger.
        #[arg(long)]
        exceeds: Option<usize>,
    },
    Regular {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        d: Option<usize>,
    },
    Bipartite {
        #[command(flatten)]
        input: InputArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    Minmax,
    Sum,
}

#[derive(Debug, Subcommand)]
pub enum Bound {
    StarCover {
        #[command(flatten)]
        input: InputArg,
        /// Print the full cover as JSON.
        #[arg(long)]
        json: bool,
    },
    MultipartiteCover {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        json: bool,
    },
    Entropy {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = Objective::Minmax, conflicts_with = "set")]
        objective: Objective,
        /// Minimize `f` of this vertex set, e.g. `v2,v3`.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<String>>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: InputArg,
    /// Certificate path; printed to stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub input: InputArg,
    #[arg(long, short)]
    pub certificate: PathBuf,
    /// Random set functions used to check identities.
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
}

#[derive(Debug, Subcommand)]
pub enum SchemeCmd {
    Realize {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        q: u64,
        /// Make star `TO` reuse the randomness of star `FROM`.
        #[arg(long, value_delimiter = ',', value_name = "FROM,TO")]
        share_randomness: Option<Vec<usize>>,
        /// Drop one star.
        #[arg(long)]
        drop_star: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    Verify {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, short)]
        scheme: PathBuf,
        #[arg(long, default_value_t = ENUMERATION_BUDGET)]
        budget: u64,
        /// Report the structural ratio without enumerating.
        #[arg(long)]
        structural: bool,
    },
}

/// Failure with an exit code and a machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub detail: Value,
}

impl CliError {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        CliError { code, kind, message: message.into(), detail: Value::Null }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError::new(EXIT_USAGE, "USAGE", message)
    }

    fn failed(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::new(EXIT_FAILED, kind, message)
    }

    fn with(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn to_json(&self) -> String {
        let mut v = json!({ "error": self.kind, "message": self.message, "exit": self.code });
        if !self.detail.is_null() {
            v["detail"] = self.detail.clone();
        }
        v.to_string()
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::RetriesExhausted { .. } => CliError::new(EXIT_BUDGET, "RETRIES_EXHAUSTED", e.to_string()),
            FamilyError::InfeasibleAtBudget { .. } => CliError::new(EXIT_BUDGET, "INFEASIBLE_AT_BUDGET", e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::SizeLimit { .. } => CliError::new(EXIT_BUDGET, "SIZE_LIMIT", e.to_string()),
            BoundsError::VertexOutOfRange(_) => CliError::usage(e.to_string()),
            _ => CliError::failed("SOLVER", e.to_string()),
        }
    }
}

impl From<CertError> for CliError {
    fn from(e: CertError) -> Self {
        match e {
            CertError::Family(f) => f.into(),
            CertError::Precondition(_) => CliError::usage(e.to_string()),
            _ => CliError::failed("CERTIFICATE", e.to_string()),
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::BudgetExceeded { .. } => CliError::new(EXIT_BUDGET, "BUDGET_EXCEEDED", e.to_string()),
            SchemeError::NotPerfect | SchemeError::NonuniformShare(_) => CliError::failed("NOT_PERFECT", e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

type CliResult = Result<String, CliError>;

/// Parses `args`, runs the command and returns the exit code, writing
/// results to stdout and JSON errors to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::usage(first).to_json());
            return EXIT_USAGE;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    }
}

/// Runs a parsed command and returns its stdout.
pub fn run(cli: &Cli) -> CliResult {
    let ctx = Ctx { seed: cli.seed, jobs: cli.jobs as usize, decimal: cli.decimal };
    match &cli.command {
        Command::Gen(g) => ctx.gen(g),
        Command::Check(c) => ctx.check(c),
        Command::Bound(b) => ctx.bound(b),
        Command::Certify(a) => ctx.certify(a),
        Command::Audit(a) => ctx.audit(a),
        Command::Scheme(s) => ctx.scheme(s),
    }
}

struct Ctx {
    seed: u64,
    jobs: usize,
    decimal: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::parse_edge_list(&read(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn load_gd(path: &Path) -> Result<GdGraph, CliError> {
    let graph = load_graph(path)?;
    let side = sidecar_path(path);
    let sidecar: GdSidecar = serde_json::from_str(&read(&side)?)
        .map_err(|e| CliError::usage(format!("{}: not a family sidecar: {e}", side.display())))?;
    Ok(GdGraph::from_sidecar(graph, sidecar)?)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Vertex names `v3` or `3`.
fn parse_vertex(s: &str) -> Result<Vertex, CliError> {
    let t = s.trim();
    t.strip_prefix('v').unwrap_or(t).parse().map_err(|_| CliError::usage(format!("bad vertex name {s:?}")))
}

impl Ctx {
    fn rational(&self, r: &Rational) -> String {
        if self.decimal {
            format!("{r} {}\n", r.to_decimal(6))
        } else {
            format!("{r}\n")
        }
    }

    fn annotate(&self, v: &mut Value, key: &str, r: &Rational) {
        if self.decimal {
            v[format!("{key}_decimal")] = Value::String(r.to_decimal(6));
        }
    }

    fn emit_gd(&self, kind: &str, g: &GdGraph, out: &Path) -> CliResult {
        write(out, &g.graph.to_edge_list())?;
        write(&sidecar_path(out), &pretty(&g.sidecar()))?;
        Ok(pretty(&json!({
            "kind": kind,
            "seed": self.seed,
            "n": g.n(),
            "m": g.graph.m(),
            "d": g.d,
            "part_sizes": g.part_sizes,
            "member": g.member,
        })))
    }

    fn gen(&self, g: &Gen) -> CliResult {
        match g {
            Gen::Cycle { n, out } => self.emit_gd("cycle", &build_cycle(*n)?, &out.out),
            Gen::Gd { parts, canonical, out } => {
                let mut gd = build_gd(parts, self.seed)?;
                if *canonical {
                    gd = canonical_relabel(&gd)?;
                }
                self.emit_gd("gd", &gd, &out.out)
            }
            Gen::Pigraph { girth, n, max_retries, strict, max_interval, out } => {
                let opts = PiGraphOptions {
                    strict: *strict,
                    max_interval: *max_interval,
                    ..PiGraphOptions::new(*girth, *n, self.seed, *max_retries)
                };
                let p = build_pi_graph_with(&opts)?;
                write(&out.out, &p.graph.to_edge_list())?;
                write(&sidecar_path(&out.out), &format!("{}\n", p.to_json()))?;
                Ok(pretty(&json!({
                    "kind": "pigraph",
                    "seed": self.seed,
                    "n": p.n,
                    "vertices": p.graph.n(),
                    "girth": p.girth,
                    "target": girth,
                    "exceeds_target": p.girth.exceeds(*girth),
                    "leftovers": p.leftovers,
                    "attempts": p.attempts,
                })))
            }
            Gen::H { input, m, pi, pigraph, out } => {
                let base = load_gd(input)?;
                let bij = match (pi, pigraph) {
                    (Some(path), _) => {
                        let pairs: Vec<(Vertex, Vertex)> = serde_json::from_str(&read(path)?)
                            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
                        Bijection::new(pairs)
                    }
                    (None, Some(path)) => lift_pi(&base, &PiGraph::from_json(&read(path)?)?)?,
                    (None, None) => return Err(CliError::usage("one of --pi or --pigraph is required")),
                };
                self.emit_gd("h", &build_h(*m, &base, &bij)?, &out.out)
            }
            Gen::LargeGirth { d, gamma, policy, max_vertices, final_pi, retries, out } => {
                let policy = match policy {
                    Policy::Practical => SizePolicy::Practical(self.seed),
                    Policy::PaperBound => SizePolicy::PaperBound,
                };
                if policy != SizePolicy::PaperBound && out.is_none() {
                    return Err(CliError::usage("--out is required with the practical policy"));
                }
                let opts = LargeGirthOptions {
                    max_vertices: *max_vertices,
                    final_pi: *final_pi,
                    retries: *retries,
                    ..LargeGirthOptions::new(*d, *gamma, policy)
                };
                match build_large_girth(&opts)? {
                    LargeGirth::Sizes { guaranteed_n, sizes } => Ok(pretty(&json!({
                        "kind": "large-girth",
                        "policy": "PAPER_BOUND",
                        "d": d,
                        "gamma": gamma,
                        "guaranteed_n": guaranteed_n.to_string(),
                        "sizes": sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    }))),
                    LargeGirth::Built { graph, pi, girth, levels } => {
                        let out = out.as_ref().expect("checked above");
                        write(out, &graph.graph.to_edge_list())?;
                        write(&sidecar_path(out), &pretty(&graph.sidecar()))?;
                        if let Some(p) = &pi {
                            let mut pi_path = out.as_os_str().to_owned();
                            pi_path.push(".pi.json");
                            write(Path::new(&pi_path), &pretty(&p.pairs))?;
                        }
                        Ok(pretty(&json!({
                            "kind": "large-girth",
                            "policy": "PRACTICAL",
                            "seed": self.seed,
                            "d": d,
                            "gamma": gamma,
                            "n": graph.n(),
                            "girth": girth,
                            "exceeds_gamma": girth.exceeds(*gamma),
                            "levels": levels,
                        })))
                    }
                }
            }
        }
    }

    fn check(&self, c: &Check) -> CliResult {
        match c {
            Check::Girth { input, exceeds } => {
                let g = load_graph(&input.input)?;
                let gi = girth_with_jobs(&g, self.jobs);
                if let Some(t) = exceeds {
                    if !gi.exceeds(*t) {
                        return Err(CliError::failed("CHECK_FAILED", format!("girth {gi} does not exceed {t}"))
                            .with(json!({ "girth": gi })));
                    }
                }
                Ok(format!("{gi}\n"))
            }
            Check::Regular { input, d } => {
                let g = load_graph(&input.input)?;
                let degree = if g.n() == 0 { 0 } else { g.degree(0) };
                let want = d.unwrap_or(degree);
                if let Some(v) = (0..g.n()).find(|&v| g.degree(v) != want) {
                    return Err(CliError::failed(
                        "CHECK_FAILED",
                        format!("vertex {v} has degree {}, expected {want}", g.degree(v)),
                    ));
                }
                Ok(format!("{want}\n"))
            }
            Check::Bipartite { input } => {
                let g = load_graph(&input.input)?;
                let bip = match two_color(&g) {
                    Ok(b) => b,
                    Err(GraphError::NotBipartite(cycle)) => {
                        return Err(CliError::failed("CHECK_FAILED", "graph is not bipartite")
                            .with(json!({ "odd_cycle": cycle })));
                    }
                    Err(e) => return Err(e.into()),
                };
                let side = sidecar_path(&input.input);
                let claimed = fs::read_to_string(&side).ok().and_then(|s| serde_json::from_str::<GdSidecar>(&s).ok());
                let bip = match claimed {
                    Some(s) if !s.bipartition.is_valid_for(&g) => {
                        return Err(CliError::failed("CHECK_FAILED", "sidecar bipartition is not proper"));
                    }
                    Some(s) => s.bipartition,
                    None => bip,
                };
                Ok(pretty(&json!({ "bipartite": true, "A": bip.a.len(), "B": bip.b.len() })))
            }
        }
    }

    fn bound(&self, b: &Bound) -> CliResult {
        match b {
            Bound::StarCover { input, json } | Bound::MultipartiteCover { input, json } => {
                let g = load_graph(&input.input)?;
                let sol = match b {
                    Bound::StarCover { .. } => star_cover_minmax(&g)?,
                    _ => multipartite_cover_minmax(&g)?,
                };
                verify_cover(&g, &sol).map_err(|e| CliError::failed("SOLVER", e.to_string()))?;
                if *json {
                    let mut v = serde_json::to_value(&sol).expect("serializable");
                    self.annotate(&mut v, "max_load", &sol.max_load);
                    Ok(pretty(&v))
                } else {
                    Ok(self.rational(&sol.max_load))
                }
            }
            Bound::Entropy { input, objective, set, json } => {
                let g = load_graph(&input.input)?;
                let bound = match set {
                    Some(names) => {
                        let s = names.iter().map(|x| parse_vertex(x)).collect::<Result<Vec<_>, _>>()?;
                        entropy_lp_set_query(&g, &s)?
                    }
                    None => {
                        let o = match objective {
                            Objective::Minmax => EntropyObjective::MinMax,
                            Objective::Sum => EntropyObjective::Sum,
                        };
                        entropy_lp_complexity(&g, o)?
                    }
                };
                bound.verify(&g)?;
                if *json {
                    let mut v = serde_json::to_value(&bound).expect("serializable");
                    self.annotate(&mut v, "value", &bound.value);
                    Ok(pretty(&v))
                } else {
                    Ok(self.rational(&bound.value))
                }
            }
        }
    }

    fn certify(&self, a: &CertifyArgs) -> CliResult {
        let g = load_gd(&a.input.input)?;
        let cert = certify_sum_bound(&g)?;
        let text = format!("{}\n", cert.to_json());
        match &a.out {
            None => Ok(text),
            Some(path) => {
                write(path, &text)?;
                let mut v =
                    json!({ "n": cert.n, "level": cert.level, "terms": cert.term_count(), "total": cert.total });
                self.annotate(&mut v, "total", &cert.total);
                Ok(pretty(&v))
            }
        }
    }

    fn audit(&self, a: &AuditArgs) -> CliResult {
        let g = load_graph(&a.input.input)?;
        let cert = Certificate::from_json(&read(&a.certificate)?)
            .map_err(|e| CliError::usage(format!("{}: {e}", a.certificate.display())))?;
        audit_certificate(&g, &cert, a.trials, self.seed).map_err(|f| {
            CliError::failed("AUDIT_FAILED", f.to_string()).with(json!({ "path": f.path, "reason": f.reason }))
        })?;
        let mut v = json!({ "verified": true, "seed": self.seed, "terms": cert.term_count(), "total": cert.total });
        self.annotate(&mut v, "total", &cert.total);
        Ok(pretty(&v))
    }

    fn scheme(&self, s: &SchemeCmd) -> CliResult {
        match s {
            SchemeCmd::Realize { input, q, share_randomness, drop_star, out } => {
                let g = load_graph(&input.input)?;
                let mut d = realize_scheme(&make_star_decomposition(&g)?, *q)?;
                let t = d.stars.len();
                if let Some(pair) = share_randomness {
                    let &[from, to] = pair.as_slice() else {
                        return Err(CliError::usage("--share-randomness takes two star indices"));
                    };
                    if from >= t || to >= t {
                        return Err(CliError::usage(format!("star index out of range, scheme has {t} stars")));
                    }
                    d = d.with_shared_randomness(from, to);
                }
                if let Some(i) = drop_star {
                    if *i >= t {
                        return Err(CliError::usage(format!("star index out of range, scheme has {t} stars")));
                    }
                    d = d.without_star(*i);
                }
                let text = format!("{}\n", d.to_json());
                match out {
                    None => Ok(text),
                    Some(path) => {
                        write(path, &text)?;
                        let mut v = json!({
                            "q": q,
                            "lambda": d.lambda,
                            "stars": d.stars.len(),
                            "structural_ratio": d.structural_ratio(),
                        });
                        self.annotate(&mut v, "structural_ratio", &d.structural_ratio());
                        Ok(pretty(&v))
                    }
                }
            }
            SchemeCmd::Verify { input, scheme, budget, structural } => {
                let g = load_graph(&input.input)?;
                let d = DecompositionScheme::from_json(&read(scheme)?, &g)?;
                if *structural {
                    let r = d.structural_ratio();
                    let mut v = json!({
                        "status": "STRUCTURAL_ONLY",
                        "ratio": r,
                        "coverage_defects": d.coverage_defects(),
                    });
                    self.annotate(&mut v, "ratio", &r);
                    return Ok(pretty(&v));
                }
                let jd = enumerate_joint_with_budget(&d, *budget).map_err(|e| {
                    let r = d.structural_ratio();
                    CliError::from(e).with(json!({ "structural_ratio": r }))
                })?;
                let report = verify_perfect(&jd, self.jobs)?;
                let mut v = serde_json::to_value(&report).expect("serializable");
                if let Some(r) = &report.ratio {
                    self.annotate(&mut v, "ratio", r);
                }
                if report.perfect {
                    measured_ratio(&report)?;
                    Ok(pretty(&v))
                } else {
                    Err(CliError::failed("NOT_PERFECT", "scheme is not perfect").with(v))
                }
            }
        }
    }
}
