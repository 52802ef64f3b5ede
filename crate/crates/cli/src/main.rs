use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rankmin::combinatorics::{
    count_non_minimal, count_r_minimal, evasive_bound_certifies, omega_bounds, parse_rational, product_inequality,
    psi_bounds, qbinom, qdelta, rank_sum_inequality, CountReport,
};
use rankmin::geometry::{is_cutting, is_evasive, linearity_index, CuttingRoute};
use rankmin::linalg::Subspace;
use rankmin::minimality::{all_verdicts, is_r_minimal, is_rank_minimal, is_sigma_maximal, Method, SubcodeMethod};
use rankmin::rank_metric::{chi, chi_of_vectors, grw_sequence, CodeRepr, RankCode};
use rankmin::search::{
    census_codes, max_evasive_dim, merge_shards, omega_exhaustive, scan_shard, verify_certificate, CensusOptions,
    Certificate, OmegaOutcome, SearchOptions, ShardReport,
};
use rankmin::verify::{run_suite, suite_names, SUITES};
use rankmin::{Error, FieldTower, Gf};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::process::ExitCode;
use std::sync::Arc;

/// Exact computations for r-minimal rank-metric codes over GF(q^m)/GF(q).
///
/// Codes, vectors and subspaces are JSON given inline, as @file, or as '-' for stdin.
/// Field specs look like `p=2,e=1,m=3,ext=1,1,0,1` (coefficients in ascending degree);
/// `ext` and `base` may be omitted to use the default irreducible polynomials.
#[derive(Parser)]
#[command(name = "rankmin", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 1 when a decision command answers false.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads for searches (0 = all cores).
    #[arg(long, global = true, env = "RANKMIN_THREADS", default_value_t = 0)]
    threads: usize,
    /// Cap on candidates examined by searches.
    #[arg(long, global = true)]
    budget: Option<u128>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Describe a field tower; optionally expand a vector over the basis.
    Field {
        #[arg(long)]
        field: String,
        /// Vector over E to expand into its m x n coordinate matrix.
        #[arg(long)]
        expand: Option<String>,
    },
    /// Rank support weight of vectors, a code or a subcode.
    Wt {
        #[command(flatten)]
        code: CodeArgs,
        /// List of vectors over E (instead of --code).
        #[arg(long, conflicts_with = "code")]
        vectors: Option<String>,
        /// Message space B of the subcode {bG : b in B}.
        #[arg(long, requires = "code")]
        subcode: Option<String>,
    },
    /// Generalized rank weights.
    Grw {
        #[command(flatten)]
        code: CodeArgs,
        /// Single index r; without it the whole sequence is printed.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Decide r-minimality of a code, or rank minimality of a subcode.
    Minimal {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, required_unless_present = "subcode")]
        r: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Grw)]
        method: MethodArg,
        /// Message space of a subcode to test for rank minimality instead.
        #[arg(long, conflicts_with = "r")]
        subcode: Option<String>,
        #[arg(long, value_enum, default_value_t = SubcodeMethodArg::DualSupport)]
        subcode_method: SubcodeMethodArg,
    },
    /// Decide whether a subcode is sigma-maximal (no other subcode of its
    /// dimension has support containing its support).
    Maximal {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        subcode: String,
    },
    /// Decide whether an F-subspace of E^k (flattened to F^(km)) is a cutting r-blocking set.
    Cutting {
        #[arg(long)]
        field: String,
        #[arg(long)]
        subspace: String,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = RouteArg::LineMeeting)]
        route: RouteArg,
    },
    /// Decide (h, t)-evasiveness of an F-subspace of E^k.
    Evasive {
        #[arg(long)]
        field: String,
        #[arg(long)]
        subspace: String,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        t: i64,
    },
    /// Largest dimension of an (h, t)-evasive subspace of E^k, by exhaustive search.
    EvasiveMax {
        #[arg(long)]
        field: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        dim_cap: Option<usize>,
    },
    /// Linearity index: the largest E-subspace inside an F-subspace of E^k.
    Linearity {
        #[arg(long)]
        field: String,
        #[arg(long)]
        subspace: String,
    },
    /// Exact counts: r-minimal codes, q-binomials, rank counts, non-minimal codes.
    Count {
        #[arg(long, value_enum, default_value_t = CountKind::RMinimal)]
        kind: CountKind,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        /// Field spec, for the enumeration-based kinds.
        #[arg(long)]
        field: Option<String>,
        /// Intermediate dimension t for the non-minimal code bound.
        #[arg(long)]
        t: Option<u64>,
    },
    /// Closed-form bounds on the minimal length, evasive-dimension certificates
    /// and the exact inequality checks.
    Bounds {
        #[arg(long, value_enum, default_value_t = BoundsKind::Omega)]
        kind: BoundsKind,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        h: Option<u64>,
        /// Rational a > 1, e.g. 2 or 5/3.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        lambda: Option<u64>,
        #[arg(long)]
        u: Option<u64>,
    },
    /// Minimal length of k-dimensional r-minimal codes by exhaustive search, with certificates.
    Omega(OmegaArgs),
    /// Enumerate every [n, k] code and count predicates.
    Census {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Values of r for the minimality counts (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
        r: Vec<usize>,
        /// Exemplar codes kept per weight.
        #[arg(long, default_value_t = 0)]
        exemplars: usize,
        /// Also count codes with constant r-dimensional subcode weight.
        #[arg(long)]
        constant_weight: bool,
    },
    /// Run a seeded property suite.
    Verify {
        #[arg(long, required_unless_present = "list")]
        suite: Option<String>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Field specs separated by ';' (default: GF(4)/GF(2), GF(8)/GF(2), GF(9)/GF(3)).
        #[arg(long, value_delimiter = ';')]
        towers: Vec<String>,
        #[arg(long)]
        only_trial: Option<u64>,
        /// List suite names.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// Field spec; optional when the code JSON names its field.
    #[arg(long)]
    field: Option<String>,
    /// Code as {"field"?, "n"?, "gen": [[..], ..]} or a bare generator matrix.
    #[arg(long)]
    code: Option<String>,
}

#[derive(Args)]
struct OmegaArgs {
    #[arg(long, required_unless_present_any = ["merge", "check"])]
    field: Option<String>,
    #[arg(long, required_unless_present_any = ["merge", "check"])]
    k: Option<usize>,
    #[arg(long, required_unless_present_any = ["merge", "check"])]
    r: Option<usize>,
    #[arg(long)]
    dim_cap: Option<usize>,
    /// Scan one dimension only, split into this many shards.
    #[arg(long, requires_all = ["shard_index", "dim"])]
    shards: Option<usize>,
    #[arg(long, requires = "shards")]
    shard_index: Option<usize>,
    /// Dimension scanned by a shard.
    #[arg(long)]
    dim: Option<usize>,
    /// Merge shard reports (files) into one level result.
    #[arg(long, num_args = 1.., conflicts_with_all = ["field", "shards", "check"])]
    merge: Vec<String>,
    /// Re-verify a certificate or omega result (JSON).
    #[arg(long, conflicts_with_all = ["field", "shards"])]
    check: Option<String>,
    /// With --check: re-run exhaustion scans too.
    #[arg(long)]
    rescan: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Grw,
    Cutting,
    Definition,
    Dual,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubcodeMethodArg {
    DualSupport,
    Definition,
    Closure,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Definition,
    LineMeeting,
    Evasive,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountKind {
    /// r-minimal [n, r+1] codes by closed formula (q, m, n, r).
    RMinimal,
    /// Gaussian binomial bin_q(n, r).
    Qbinom,
    /// Number of rank-r m x n matrices divided by bin_q(n, r): delta_q(m, r).
    Qdelta,
    /// Non-r-minimal [n, k] codes by enumeration (field, n, k, r).
    NonMinimal,
    /// Bound and existence test for non-minimal codes (field, n, k, r, t).
    Psi,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundsKind {
    /// Lower/upper bounds on the minimal length (m, k, r).
    Omega,
    /// Evasive-dimension certificate (m, lambda, a, u, k).
    Evasive,
    /// Product inequality (a, n).
    Product,
    /// Rank-count sum inequality (a, m, n, h).
    RankSum,
}

/// Failure that maps to a specific exit status.
struct Exit(u8);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(Exit(c)) = e.downcast_ref::<Exit>() {
                return ExitCode::from(*c);
            }
            eprintln!("error: {e:#}");
            let status = match e.downcast_ref::<Error>() {
                Some(Error::BudgetExceeded { .. }) => 3,
                _ => 2,
            };
            ExitCode::from(status)
        }
    }
}

impl std::fmt::Debug for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}
impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}
impl std::error::Error for Exit {}

// input

fn read_arg(arg: &str) -> anyhow::Result<String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    } else {
        Ok(arg.to_string())
    }
}

fn read_json(arg: &str) -> anyhow::Result<Value> {
    let s = read_arg(arg)?;
    serde_json::from_str(&s).context("invalid JSON")
}

fn tower(spec: &str) -> anyhow::Result<Arc<FieldTower>> {
    Ok(Arc::new(FieldTower::parse(spec)?))
}

fn matrix(v: &Value) -> anyhow::Result<Vec<Vec<u32>>> {
    serde_json::from_value(v.clone()).context("expected a list of integer rows")
}

fn load_code(args: &CodeArgs) -> anyhow::Result<RankCode> {
    let raw = args.code.as_deref().ok_or_else(|| anyhow!("--code is required"))?;
    let v = read_json(raw)?;
    let mut repr: CodeRepr = if v.is_array() {
        let gen = matrix(&v)?;
        let n = gen.first().map(|r| r.len()).ok_or_else(|| anyhow!("a bare generator matrix needs at least one row"))?;
        CodeRepr { field: String::new(), n, k: None, gen }
    } else {
        serde_json::from_value(v).context("expected a code object with gen")?
    };
    match (&args.field, repr.field.is_empty()) {
        (Some(f), true) => repr.field = f.clone(),
        (Some(f), false) => {
            if tower(f)?.spec() != tower(&repr.field)?.spec() {
                bail!("--field differs from the field named in the code");
            }
        }
        (None, true) => bail!("--field is required when the code does not name its field"),
        (None, false) => {}
    }
    Ok(RankCode::from_repr(&repr)?)
}

/// A subspace given as {"ambient", "rref_basis"} or as a list of spanning rows.
fn load_subspace(raw: &str, f: &Gf, ambient: Option<usize>) -> anyhow::Result<Subspace> {
    let v = read_json(raw)?;
    let s = if v.is_array() {
        let rows = matrix(&v)?;
        let n = rows.first().map(|r| r.len()).or(ambient).ok_or_else(|| anyhow!("cannot infer the ambient dimension"))?;
        if rows.iter().any(|r| r.len() != n) {
            bail!("rows of different lengths");
        }
        if rows.iter().flatten().any(|&x| x >= f.order()) {
            bail!("entry out of range for GF({})", f.order());
        }
        Subspace::span(f, n, &rows)
    } else {
        let s: Subspace = serde_json::from_value(v).context("expected a subspace object")?;
        if s.basis().iter().flatten().any(|&x| x >= f.order()) {
            bail!("entry out of range for GF({})", f.order());
        }
        s.recanonicalize(f)
    };
    if let Some(a) = ambient {
        if s.ambient() != a {
            bail!("subspace lives in dimension {}, expected {a}", s.ambient());
        }
    }
    Ok(s)
}

fn flat_ambient(t: &FieldTower, s: &Subspace) -> anyhow::Result<usize> {
    if !s.ambient().is_multiple_of(t.m()) {
        bail!("ambient dimension {} is not a multiple of m = {}", s.ambient(), t.m());
    }
    Ok(s.ambient() / t.m())
}

// output

struct Out {
    json: bool,
}

impl Out {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
        let body = if self.json { serde_json::to_string_pretty(value)? } else { text() };
        let mut stdout = std::io::stdout().lock();
        match writeln!(stdout, "{body}").and_then(|_| stdout.flush()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => Ok(other?),
        }
    }
}

fn rows_text(rows: &[Vec<u32>]) -> String {
    if rows.is_empty() {
        return "  (zero space)".into();
    }
    rows.iter()
        .map(|r| format!("  [{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
        .collect::<Vec<_>>()
        .join("\n")
}

fn decision(g: &Global, verdict: bool) -> u8 {
    if g.strict && !verdict {
        1
    } else {
        0
    }
}

fn need<T>(v: Option<T>, name: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("--{name} is required here"))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let g = cli.global;
    let out = Out { json: g.json };
    let search = SearchOptions { threads: g.threads, budget: g.budget, dim_cap: None };
    match cli.cmd {
        Cmd::Field { field, expand } => {
            let t = tower(&field)?;
            let mut v = json!({
                "schema": "rankmin-field/v1",
                "field": t.spec(),
                "p": t.p(),
                "e": t.e(),
                "q": t.q(),
                "m": t.m(),
                "order": t.qm(),
                "ext_modulus": t.e_field().modulus(),
                "basis": t.basis(),
            });
            let mut text = format!("GF({})/GF({}), m = {}\nspec: {}\nbasis: {:?}", t.qm(), t.q(), t.m(), t.spec(), t.basis());
            if let Some(a) = expand {
                let alpha: Vec<u32> = serde_json::from_value(read_json(&a)?).context("expected a vector")?;
                if alpha.iter().any(|&x| x >= t.qm()) {
                    bail!("entry out of range for GF({})", t.qm());
                }
                let mx = t.expand(&alpha);
                text.push_str(&format!("\nexpansion:\n{}", rows_text(&mx)));
                v["expansion"] = json!(mx);
            }
            out.emit(&v, || text)?;
            Ok(0)
        }
        Cmd::Wt { code, vectors, subcode } => {
            let (support, field) = if let Some(vs) = vectors {
                let t = tower(&need(code.field.clone(), "field")?)?;
                let rows = matrix(&read_json(&vs)?)?;
                let n = rows.first().map(|r| r.len()).ok_or_else(|| anyhow!("no vectors given"))?;
                if rows.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= t.qm())) {
                    bail!("vectors must share one length and have entries below {}", t.qm());
                }
                (chi_of_vectors(&t, n, &rows), t.spec())
            } else {
                let c = load_code(&code)?;
                let t = c.tower_arc();
                let d = match subcode {
                    Some(b) => c.encode(&load_subspace(&b, t.e_field(), Some(c.k()))?),
                    None => c.as_subspace(),
                };
                (chi(&t, &d), t.spec())
            };
            let v = json!({ "schema": "rankmin-weight/v1", "field": field, "weight": support.dim(), "support": support });
            out.emit(&v, || format!("{}", support.dim()))?;
            Ok(0)
        }
        Cmd::Grw { code, r } => {
            let c = load_code(&code)?;
            let seq = grw_sequence(&c)?;
            match r {
                Some(r) => {
                    let value = *seq.get(r).ok_or_else(|| Error::PreconditionViolated(format!("r = {r} exceeds k = {}", c.k())))?;
                    let v = json!({ "schema": "rankmin-grw/v1", "field": c.tower().spec(), "r": r, "value": value, "d_sequence": seq });
                    out.emit(&v, || value.to_string())?;
                }
                None => {
                    let v = json!({ "schema": "rankmin-grw/v1", "field": c.tower().spec(), "d_sequence": seq });
                    out.emit(&v, || seq.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
                }
            }
            Ok(0)
        }
        Cmd::Minimal { code, r, method, subcode, subcode_method } => {
            let c = load_code(&code)?;
            if let Some(b) = subcode {
                let b = load_subspace(&b, c.tower().e_field(), Some(c.k()))?;
                let m = match subcode_method {
                    SubcodeMethodArg::DualSupport => SubcodeMethod::DualSupport,
                    SubcodeMethodArg::Definition => SubcodeMethod::Definition,
                    SubcodeMethodArg::Closure => SubcodeMethod::Closure,
                };
                let v = is_rank_minimal(&c, &b, m)?;
                out.emit(&v, || verdict_text(v.verdict, "rank minimal"))?;
                return Ok(decision(&g, v.verdict));
            }
            let r = need(r, "r")?;
            let m = match method {
                MethodArg::Grw => Method::Grw,
                MethodArg::Cutting => Method::Cutting,
                MethodArg::Definition => Method::Definition,
                MethodArg::Dual => Method::Dual,
                MethodArg::All => {
                    let vs = all_verdicts(&c, r)?;
                    let agree = vs.iter().all(|v| v.verdict == vs[0].verdict);
                    if !agree {
                        bail!("deciders disagree: {:?}", vs.iter().map(|v| (v.method, v.verdict)).collect::<Vec<_>>());
                    }
                    let verdict = vs[0].verdict;
                    out.emit(&vs, || {
                        let names: Vec<String> = vs.iter().map(|v| format!("{:?}", v.method).to_lowercase()).collect();
                        format!("{} (methods: {})", verdict_text(verdict, &format!("{r}-minimal")), names.join(", "))
                    })?;
                    return Ok(decision(&g, verdict));
                }
            };
            let v = is_r_minimal(&c, r, m)?;
            out.emit(&v, || {
                let mut s = verdict_text(v.verdict, &format!("{r}-minimal"));
                if let Some(w) = &v.witness {
                    s.push_str(&format!(
                        "\nsubcode with message space\n{}\nhas support strictly containing that of the subcode with message space\n{}",
                        rows_text(w.d.basis()),
                        rows_text(w.b.basis())
                    ));
                }
                s
            })?;
            Ok(decision(&g, v.verdict))
        }
        Cmd::Maximal { code, subcode } => {
            let c = load_code(&code)?;
            let b = load_subspace(&subcode, c.tower().e_field(), Some(c.k()))?;
            let (verdict, witness) = is_sigma_maximal(&c, &b)?;
            let v = json!({ "schema": "rankmin-maximal/v1", "verdict": verdict, "witness": witness });
            out.emit(&v, || verdict_text(verdict, "sigma-maximal"))?;
            Ok(decision(&g, verdict))
        }
        Cmd::Cutting { field, subspace, r, route } => {
            let t = tower(&field)?;
            let s = load_subspace(&subspace, t.f(), None)?;
            flat_ambient(&t, &s)?;
            let route = match route {
                RouteArg::Definition => CuttingRoute::Definition,
                RouteArg::LineMeeting => CuttingRoute::LineMeeting,
                RouteArg::Evasive => CuttingRoute::Evasive,
            };
            let v = is_cutting(&t, &s, r, route)?;
            out.emit(&v, || {
                let mut s = verdict_text(v.verdict, &format!("cutting {r}-blocking"));
                if let Some(rf) = &v.refuting {
                    s.push_str(&format!("\nrefuting E-subspace V:\n{}", rows_text(rf.v.basis())));
                }
                s
            })?;
            Ok(decision(&g, v.verdict))
        }
        Cmd::Evasive { field, subspace, h, t: tt } => {
            let t = tower(&field)?;
            let s = load_subspace(&subspace, t.f(), None)?;
            flat_ambient(&t, &s)?;
            let v = is_evasive(&t, &s, h, tt)?;
            out.emit(&v, || {
                let mut s = verdict_text(v.evasive, &format!("({h},{tt})-evasive"));
                s.push_str(&format!("\nspanning: {}, largest meet with an {h}-dimensional E-subspace: {}", v.spanning, v.max_meet));
                s
            })?;
            Ok(decision(&g, v.evasive))
        }
        Cmd::EvasiveMax { field, k, h, t: tt, dim_cap } => {
            let t = tower(&field)?;
            let res = max_evasive_dim(&t, k, h, tt, &SearchOptions { dim_cap, ..search })?;
            out.emit(&res, || match res.value {
                Some(d) => format!("{d}"),
                None => "none".into(),
            })?;
            Ok(0)
        }
        Cmd::Linearity { field, subspace } => {
            let t = tower(&field)?;
            let s = load_subspace(&subspace, t.f(), None)?;
            flat_ambient(&t, &s)?;
            let (l, w) = linearity_index(&t, &s)?;
            let v = json!({ "schema": "rankmin-linearity/v1", "field": t.spec(), "linearity_index": l, "witness": w });
            out.emit(&v, || l.to_string())?;
            Ok(0)
        }
        Cmd::Count { kind, q, m, n, r, k, field, t: tt } => {
            let report = match kind {
                CountKind::RMinimal => {
                    let (q, m, n, r) = (need(q, "q")?, need(m, "m")?, need(n, "n")?, need(r, "r")?);
                    let v = count_r_minimal(q, m, n, r)?;
                    CountReport::new("r-minimal-codes", &[("q", q), ("m", m), ("n", n), ("r", r)], &v)
                }
                CountKind::Qbinom => {
                    let (q, n, r) = (need(q, "q")?, need(n, "n")?, need(r, "r")?);
                    CountReport::new("gaussian-binomial", &[("q", q), ("n", n), ("r", r)], &qbinom(q, n, r))
                }
                CountKind::Qdelta => {
                    let (q, m, r) = (need(q, "q")?, need(m, "m")?, need(r, "r")?);
                    CountReport::new("rank-delta", &[("q", q), ("m", m), ("r", r)], &qdelta(q, m, r))
                }
                CountKind::NonMinimal => {
                    let t = tower(&need(field, "field")?)?;
                    let (n, k, r) = (need(n, "n")?, need(k, "k")?, need(r, "r")?);
                    let v = count_non_minimal(&t, n as usize, k as usize, r as usize)?;
                    CountReport::new("non-minimal-codes", &[("n", n), ("k", k), ("r", r)], &v)
                }
                CountKind::Psi => {
                    let t = tower(&need(field, "field")?)?;
                    let (n, k, r, tt) = (need(n, "n")?, need(k, "k")?, need(r, "r")?, need(tt, "t")?);
                    let rep = psi_bounds(&t, n as usize, k as usize, r as usize, tt as usize, None)?;
                    out.emit(&rep, || serde_json::to_string_pretty(&rep).unwrap_or_default())?;
                    return Ok(0);
                }
            };
            out.emit(&report, || report.value.clone())?;
            Ok(0)
        }
        Cmd::Bounds { kind, m, k, r, n, h, a, lambda, u } => {
            match kind {
                BoundsKind::Omega => {
                    let b = omega_bounds(need(m, "m")?, need(k, "k")?, need(r, "r")?)?;
                    out.emit(&b, || match b.exact {
                        Some(e) => format!("{e} (exact)"),
                        None => format!("{} <= value <= {}", b.lower, b.upper),
                    })?;
                }
                BoundsKind::Evasive => {
                    let c = evasive_bound_certifies(
                        need(m, "m")?,
                        need(lambda, "lambda")?,
                        need(a.as_deref().map(|s| s.parse::<u64>()).transpose()?, "a")?,
                        need(u, "u")?,
                        need(k, "k")?,
                    );
                    out.emit(&c, || format!("{}", c.certified))?;
                }
                BoundsKind::Product => {
                    let c = product_inequality(&parse_rational(&need(a, "a")?)?, need(n, "n")?)?;
                    out.emit(&c, || format!("{}: {} > {}", c.holds, c.lhs, c.rhs))?;
                    return Ok(decision(&g, c.holds));
                }
                BoundsKind::RankSum => {
                    let c = rank_sum_inequality(&parse_rational(&need(a, "a")?)?, need(m, "m")?, need(n, "n")?, need(h, "h")?)?;
                    out.emit(&c, || format!("{}: {} < {}", c.holds, c.lhs, c.rhs))?;
                    return Ok(decision(&g, c.holds));
                }
            }
            Ok(0)
        }
        Cmd::Omega(args) => omega(&g, &out, args, search),
        Cmd::Census { field, n, k, r, exemplars, constant_weight } => {
            let t = tower(&field)?;
            let rep = census_codes(
                &t,
                n,
                k,
                &CensusOptions { rs: r, exemplars, constant_weight, threads: g.threads, budget: g.budget },
            )?;
            out.emit(&rep, || {
                let mut s = format!("codes: {}", rep.total);
                for (r, c) in &rep.minimal {
                    s.push_str(&format!("\n{r}-minimal: {c} (not: {})", rep.non_minimal[r]));
                }
                for (w, c) in &rep.weights {
                    s.push_str(&format!("\nweight {w}: {c}"));
                }
                for (r, c) in &rep.constant_weight {
                    s.push_str(&format!("\nconstant {r}-dimensional weight: {c}"));
                }
                s
            })?;
            Ok(0)
        }
        Cmd::Verify { suite, trials, seed, towers, only_trial, list } => {
            if list {
                let v: Vec<Value> = SUITES.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect();
                out.emit(&v, || SUITES.iter().map(|(n, d)| format!("{n:28} {d}")).collect::<Vec<_>>().join("\n"))?;
                return Ok(0);
            }
            let name = need(suite, "suite")?;
            let rep = match run_suite(&name, trials, seed, &towers, only_trial) {
                Err(Error::UnknownSuite(s)) => bail!("unknown suite {s:?}; known suites: {}", suite_names().join(", ")),
                other => other?,
            };
            out.emit(&rep, || {
                let mut s = format!(
                    "{}: {} ({} trials, {} checks, {} ms)",
                    rep.suite,
                    if rep.passed { "pass" } else { "FAIL" },
                    rep.trials,
                    rep.instances,
                    rep.wall_time_ms
                );
                for p in &rep.properties {
                    s.push_str(&format!("\n  {:32} {}/{}", p.name, p.checked - p.failed, p.checked));
                    for c in &p.counterexamples {
                        s.push_str(&format!("\n    trial {}: {}\n    rerun: {}", c.trial, c.detail, c.rerun));
                    }
                }
                s
            })?;
            Ok(if rep.passed { 0 } else { 1 })
        }
    }
}

fn verdict_text(v: bool, what: &str) -> String {
    if v {
        format!("yes: {what}")
    } else {
        format!("no: not {what}")
    }
}

fn omega(g: &Global, out: &Out, args: OmegaArgs, search: SearchOptions) -> anyhow::Result<u8> {
    if !args.merge.is_empty() {
        let reps: Vec<ShardReport> = args
            .merge
            .iter()
            .map(|p| -> anyhow::Result<ShardReport> {
                let s = read_arg(&format!("@{}", p.trim_start_matches('@')))?;
                serde_json::from_str(&s).with_context(|| format!("{p}: not a shard report"))
            })
            .collect::<anyhow::Result<_>>()?;
        let level = merge_shards(&reps)?;
        out.emit(&level, || {
            if level.exhausted {
                format!("dimension {}: no cutting set among {} subspaces", level.dimension, level.total)
            } else {
                format!("dimension {}: first cutting set at index {}", level.dimension, level.witness_index.clone().unwrap_or_default())
            }
        })?;
        return Ok(0);
    }
    if let Some(path) = args.check {
        let v = read_json(&path)?;
        let certs: Vec<Certificate> = if v.get("kind").is_some() {
            vec![serde_json::from_value(v).context("not a certificate")?]
        } else {
            let mut cs = Vec::new();
            for key in ["witness", "exhaustion"] {
                if let Some(c) = v.get(key).filter(|c| !c.is_null()) {
                    cs.push(serde_json::from_value(c.clone()).with_context(|| format!("{key} is not a certificate"))?);
                }
            }
            cs
        };
        if certs.is_empty() {
            bail!("no certificate found");
        }
        let mut all = true;
        let mut results = Vec::new();
        for c in &certs {
            let ok = verify_certificate(c, args.rescan)?;
            all &= ok;
            results.push(json!({ "kind": c.kind, "dimension": c.dimension, "valid": ok }));
        }
        let v = json!({ "schema": "rankmin-certificate-check/v1", "valid": all, "certificates": results });
        out.emit(&v, || {
            results
                .iter()
                .map(|r| format!("{} at dimension {}: {}", r["kind"].as_str().unwrap_or(""), r["dimension"], if r["valid"] == true { "valid" } else { "INVALID" }))
                .collect::<Vec<_>>()
                .join("\n")
        })?;
        return Ok(if all { 0 } else { 1 });
    }
    let t = tower(&need(args.field, "field")?)?;
    let (k, r) = (need(args.k, "k")?, need(args.r, "r")?);
    if let Some(shards) = args.shards {
        let rep = scan_shard(&t, k, r, need(args.dim, "dim")?, shards, need(args.shard_index, "shard-index")?, g.threads)?;
        out.emit(&rep, || match &rep.witness_index {
            Some(i) => format!("shard {}/{}: cutting set at index {i}", rep.shard_index, rep.shards),
            None => format!("shard {}/{}: none in [{}, {})", rep.shard_index, rep.shards, rep.start, rep.end),
        })?;
        return Ok(0);
    }
    let outcome = omega_exhaustive(&t, k, r, &SearchOptions { dim_cap: args.dim_cap, ..search })?;
    match &outcome {
        OmegaOutcome::Solved(res) => {
            out.emit(&outcome, || {
                format!(
                    "{}\nstatus: {}\nbounds: {} <= value <= {}\nwitness dimension {} at index {}; dimension {} exhausted over {} subspaces",
                    res.value,
                    res.status,
                    res.bounds.lower,
                    res.bounds.upper,
                    res.witness.dimension,
                    res.witness.witness_index.clone().unwrap_or_default(),
                    res.exhaustion.dimension,
                    res.exhaustion.visited
                )
            })?;
            Ok(0)
        }
        OmegaOutcome::BudgetExceeded(b) => {
            out.emit(&outcome, || {
                let upper = b.upper.map_or("unknown".to_string(), |u| u.to_string());
                format!("budget exhausted after {} candidates: {} <= value <= {upper}", b.visited, b.lower)
            })?;
            Err(Exit(3).into())
        }
    }
}
