//! Batch command-line front end for the envalg engine.
//!
//! Exit codes: 0 success, 1 property failure (`verify`), 2 input error,
//! 3 internal consistency failure (`env pbw` mismatch). Identical
//! invocations (including the seed) produce byte-identical output.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use envalg::ce::ce_complex;
use envalg::confspace::{
    arnold_dims, betti_unordered, builtin_descriptor, ordered_series_oracle, ManifoldDescriptor,
};
use envalg::envelope::{free_en_series, pbw_check, u_n_underlying};
use envalg::graded::GradedVectorSpace;
use envalg::lie::{free_lie, GradedLieAlgebra};
use envalg::ranconv::{compose, enumerate_covers, Cover};
use envalg::verify::run_suite;

#[derive(Parser)]
#[command(
    name = "envalg",
    about = "Exact computational algebra: Lie algebra homology, enveloping algebras, configuration spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Configuration-space computations
    #[command(subcommand)]
    Conf(ConfCommand),
    /// Free graded Lie algebras
    #[command(subcommand)]
    Lie(LieCommand),
    /// Chevalley-Eilenberg homology
    #[command(subcommand)]
    Ce(CeCommand),
    /// Higher enveloping algebras
    #[command(subcommand)]
    Env(EnvCommand),
    /// The category of covers
    #[command(subcommand)]
    Cov(CovCommand),
    /// Property-verification suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand)]
enum ConfCommand {
    /// Betti numbers of unordered configuration spaces B_k(M)
    Betti(ConfBettiArgs),
    /// Dimensions of H^*(Conf_k(R^n)) from the Arnold presentation
    Ordered(ConfOrderedArgs),
}

#[derive(Args)]
struct ConfBettiArgs {
    /// Manifold descriptor: a file path or builtin:NAME (R1..R4, S1, S2,
    /// T2, Sigma2, Sigma1P, Sigma2P)
    #[arg(long)]
    manifold: String,
    #[arg(long = "max-k")]
    max_k: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfOrderedArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: u32,
    /// Defaults to the top degree (k-1)(n-1)
    #[arg(long = "max-degree")]
    max_degree: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LieCommand {
    /// Free graded Lie algebra on weight-1 generators
    Free(LieFreeArgs),
}

#[derive(Args)]
struct LieFreeArgs {
    /// Comma-separated generator degrees, e.g. 0,1
    #[arg(long)]
    degrees: String,
    #[arg(long = "max-weight")]
    max_weight: u32,
    /// Write the algebra in the structured text format
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CeCommand {
    /// Homology of the Chevalley-Eilenberg complex
    Homology(CeHomologyArgs),
}

#[derive(Args)]
struct CeHomologyArgs {
    /// Lie algebra: a builtin spec (abelian:DEG, sl2, freelie:DEG:GENS) or a
    /// file path in the structured text format
    #[arg(long)]
    lie: String,
    #[arg(long = "max-weight")]
    max_weight: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EnvCommand {
    /// PBW check: dims of U_n(L) against Sym(L[1-n])
    Pbw(EnvPbwArgs),
    /// Homology series of the free E_n-algebra on one generator
    FreeSeries(EnvFreeSeriesArgs),
}

#[derive(Args)]
struct EnvPbwArgs {
    #[arg(long)]
    lie: String,
    #[arg(long)]
    n: u32,
    #[arg(long = "max-weight")]
    max_weight: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnvFreeSeriesArgs {
    #[arg(long)]
    n: u32,
    #[arg(long = "max-weight")]
    max_weight: u32,
    /// Degree of the single generator
    #[arg(long, default_value = "0")]
    degree: i32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CovCommand {
    /// Enumerate all J-covers of I
    Enum(CovEnumArgs),
    /// Compose two covers from a JSON file [inner, outer]
    Compose(CovComposeArgs),
}

#[derive(Args)]
struct CovEnumArgs {
    #[arg(long)]
    i: usize,
    #[arg(long)]
    j: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CovComposeArgs {
    /// JSON file holding an array [s, t]; the output is t ∘ s
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: exactla, graded, lie, ce, envelope, confspace, ranconv, all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value = "0")]
    seed: u64,
}

/// Input or environment error: exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), InputError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_manifold(spec: &str) -> Result<ManifoldDescriptor, InputError> {
    let text = if let Some(name) = spec.strip_prefix("builtin:") {
        builtin_descriptor(name)
            .ok_or_else(|| InputError(format!("unknown builtin manifold {name:?}")))?
            .to_string()
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| InputError(format!("cannot read manifold file {spec}: {e}")))?
    };
    let m = ManifoldDescriptor::parse(&text)?;
    m.validate()?;
    Ok(m)
}

fn load_lie(spec: &str) -> Result<GradedLieAlgebra, InputError> {
    if spec == "sl2" {
        return Ok(GradedLieAlgebra::sl2());
    }
    if let Some(rest) = spec.strip_prefix("abelian:") {
        let degree: i32 = rest
            .parse()
            .map_err(|_| InputError(format!("bad abelian degree {rest:?}")))?;
        return Ok(GradedLieAlgebra::abelian(GradedVectorSpace::single(
            "x", degree, 1,
        )));
    }
    if let Some(rest) = spec.strip_prefix("freelie:") {
        let (deg, gens) = rest
            .split_once(':')
            .ok_or_else(|| InputError(format!("freelie spec {spec:?} needs freelie:DEG:GENS")))?;
        let degree: i32 = deg
            .parse()
            .map_err(|_| InputError(format!("bad degree {deg:?}")))?;
        let count: usize = gens
            .parse()
            .map_err(|_| InputError(format!("bad generator count {gens:?}")))?;
        let basis = (0..count)
            .map(|i| envalg::graded::BasisElement::new(format!("x{i}"), degree, 1))
            .collect();
        let v = GradedVectorSpace::new(basis)?;
        // the basis is only built out to the weights the consumer asks for;
        // 8 covers every CLI use without letting specs explode
        return Ok(free_lie(&v, 8)?);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| InputError(format!("cannot read Lie algebra file {spec}: {e}")))?;
    let l = GradedLieAlgebra::from_text(&text)?;
    let report = l.validate();
    if !report.is_clean() {
        return Err(InputError(format!(
            "Lie algebra file fails validation:\n{report}"
        )));
    }
    Ok(l)
}

fn betti_json(manifold: &str, n: u32, max_k: u32, entries: &std::collections::BTreeMap<(u32, i32), usize>) -> String {
    let triples: Vec<String> = entries
        .iter()
        .map(|(&(k, d), &b)| format!("[{k},{d},{b}]"))
        .collect();
    format!(
        "{{\"schema\":\"envalg.conf.betti/1\",\"manifold\":\"{manifold}\",\"n\":{n},\"max_k\":{max_k},\"betti\":[{}]}}\n",
        triples.join(",")
    )
}

fn cmd_conf_betti(args: &ConfBettiArgs) -> Result<u8, InputError> {
    let m = load_manifold(&args.manifold)?;
    if args.max_k < 1 {
        return Err(InputError("--max-k must be >= 1".into()));
    }
    let table = betti_unordered(&m, args.max_k)?;
    print!("{}", table.to_polynomials(args.max_k));
    let rendered = match args.format {
        Format::Csv => table.to_csv(),
        Format::Text => table.to_polynomials(args.max_k),
        Format::Json => betti_json(&m.name, m.n, args.max_k, &table.entries),
    };
    match &args.out {
        Some(_) => emit(&args.out, &rendered)?,
        None if args.format != Format::Text => print!("{rendered}"),
        None => {}
    }
    Ok(0)
}

fn cmd_conf_ordered(args: &ConfOrderedArgs) -> Result<u8, InputError> {
    if args.k < 1 || args.n < 2 {
        return Err(InputError("conf ordered needs --k >= 1 and --n >= 2".into()));
    }
    let top = (args.k - 1) * (args.n - 1);
    let max_degree = args.max_degree.unwrap_or(top);
    let dims = arnold_dims(args.k, args.n, max_degree)?;
    let oracle = ordered_series_oracle(args.k, args.n);
    let rendered = match args.format {
        Format::Csv => {
            let mut s = String::from("degree,dim\n");
            for (&d, &c) in &dims {
                writeln!(s, "{d},{c}").unwrap();
            }
            s
        }
        Format::Json => {
            let pairs: Vec<String> = dims.iter().map(|(&d, &c)| format!("[{d},{c}]")).collect();
            format!(
                "{{\"schema\":\"envalg.conf.ordered/1\",\"k\":{},\"n\":{},\"dims\":[{}]}}\n",
                args.k,
                args.n,
                pairs.join(",")
            )
        }
        Format::Text => {
            let mut s = String::new();
            for (&d, &c) in &dims {
                let oracle_c = oracle.coeff(d as i32, 0);
                let marker = if oracle_c == c as i64 { "" } else { "  [differs from oracle]" };
                writeln!(s, "H^{d}(Conf_{}(R^{})) = Q^{c}{marker}", args.k, args.n).unwrap();
            }
            writeln!(s, "oracle: {}", oracle.to_text()).unwrap();
            s
        }
    };
    emit(&args.out, &rendered)?;
    Ok(0)
}

fn cmd_lie_free(args: &LieFreeArgs) -> Result<u8, InputError> {
    if args.max_weight < 1 {
        return Err(InputError("--max-weight must be >= 1".into()));
    }
    let degrees: Result<Vec<i32>, _> = args
        .degrees
        .split(',')
        .map(|t| t.trim().parse::<i32>())
        .collect();
    let degrees = degrees.map_err(|_| InputError(format!("bad degree list {:?}", args.degrees)))?;
    let basis = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| envalg::graded::BasisElement::new(format!("x{i}"), d, 1))
        .collect();
    let v = GradedVectorSpace::new(basis)?;
    let l = free_lie(&v, args.max_weight)?;
    let mut s = String::new();
    for b in l.space().basis() {
        writeln!(s, "{}\tdegree {}\tweight {}", b.label, b.degree, b.weight).unwrap();
    }
    for (w, d) in l.space().dims_by_weight() {
        writeln!(s, "dim weight {w}: {d}").unwrap();
    }
    print!("{s}");
    if args.out.is_some() {
        emit(&args.out, &l.to_text())?;
    }
    Ok(0)
}

fn cmd_ce_homology(args: &CeHomologyArgs) -> Result<u8, InputError> {
    if args.max_weight < 1 {
        return Err(InputError("--max-weight must be >= 1".into()));
    }
    let l = load_lie(&args.lie)?;
    let ce = ce_complex(&l, args.max_weight)?;
    let h = ce.homology();
    let rendered = match args.format {
        Format::Csv => {
            let mut s = String::from("weight,degree,betti\n");
            for (&(w, d), &b) in &h {
                writeln!(s, "{w},{d},{b}").unwrap();
            }
            s
        }
        Format::Json => {
            let triples: Vec<String> = h
                .iter()
                .map(|(&(w, d), &b)| format!("[{w},{d},{b}]"))
                .collect();
            format!(
                "{{\"schema\":\"envalg.ce.homology/1\",\"max_weight\":{},\"betti\":[{}]}}\n",
                args.max_weight,
                triples.join(",")
            )
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "weight 0 carries the trivial class of the unit word").unwrap();
            for (&(w, d), &b) in &h {
                writeln!(s, "H_{d} at weight {w}: Q^{b}").unwrap();
            }
            s
        }
    };
    emit(&args.out, &rendered)?;
    Ok(0)
}

fn cmd_env_pbw(args: &EnvPbwArgs) -> Result<u8, InputError> {
    if args.n < 1 || args.max_weight < 1 {
        return Err(InputError("env pbw needs --n >= 1 and --max-weight >= 1".into()));
    }
    let l = load_lie(&args.lie)?;
    let report = pbw_check(&l, args.n, args.max_weight)?;
    let result = u_n_underlying(&l, args.n, args.max_weight)?;
    let rendered = match args.format {
        Format::Json => {
            let triples: Vec<String> = result
                .complex
                .homology()
                .iter()
                .map(|(&(w, d), &b)| format!("[{w},{d},{b}]"))
                .collect();
            format!(
                "{{\"schema\":\"envalg.env.pbw/1\",\"n\":{},\"max_weight\":{},\"betti\":[{}],\"pbw_match\":{}}}\n",
                args.n,
                args.max_weight,
                triples.join(","),
                report.all_match()
            )
        }
        _ => {
            let mut s = String::from("weight degree dim(U_n) dim(Sym(L[1-n])) match\n");
            for &(w, d, got, want) in &report.entries {
                writeln!(
                    s,
                    "{w:6} {d:6} {got:8} {want:16} {}",
                    if got as i64 == want { "ok" } else { "MISMATCH" }
                )
                .unwrap();
            }
            writeln!(s, "pbw_match: {}", report.all_match()).unwrap();
            s
        }
    };
    emit(&args.out, &rendered)?;
    Ok(if report.all_match() { 0 } else { 3 })
}

fn cmd_env_free_series(args: &EnvFreeSeriesArgs) -> Result<u8, InputError> {
    if args.n < 1 || args.max_weight < 1 {
        return Err(InputError(
            "env free-series needs --n >= 1 and --max-weight >= 1".into(),
        ));
    }
    let v = GradedVectorSpace::single("x", args.degree, 1);
    let series = free_en_series(&v, args.n, args.max_weight)?;
    let rendered = match args.format {
        Format::Json => {
            let triples: Vec<String> = series
                .coefficients
                .iter()
                .map(|(&(d, w), &c)| format!("[{w},{d},{c}]"))
                .collect();
            format!(
                "{{\"schema\":\"envalg.env.free_series/1\",\"n\":{},\"max_weight\":{},\"degree\":{},\"series\":[{}]}}\n",
                args.n,
                args.max_weight,
                args.degree,
                triples.join(",")
            )
        }
        Format::Csv => {
            let mut s = String::from("weight,degree,dim\n");
            for (&(d, w), &c) in &series.coefficients {
                writeln!(s, "{w},{d},{c}").unwrap();
            }
            s
        }
        Format::Text => format!("{}\n", series.to_text()),
    };
    emit(&args.out, &rendered)?;
    Ok(0)
}

fn cmd_cov_enum(args: &CovEnumArgs) -> Result<u8, InputError> {
    let count = if args.j == 0 {
        if args.i == 0 { 1.0 } else { 0.0 }
    } else {
        (((1u64 << args.j.min(40)) - 1) as f64).powi(args.i as i32)
    };
    if count > 1e6 {
        return Err(InputError(format!(
            "(2^{} - 1)^{} covers is too many to enumerate",
            args.j, args.i
        )));
    }
    let source: Vec<String> = (1..=args.i).map(|x| x.to_string()).collect();
    let target: Vec<String> = (0..args.j)
        .map(|x| {
            if x < 26 {
                ((b'a' + x as u8) as char).to_string()
            } else {
                format!("j{x}")
            }
        })
        .collect();
    let covers = enumerate_covers(&source, &target);
    let rendered = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&covers)
                .map_err(|e| InputError(e.to_string()))?;
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::new();
            for c in &covers {
                let parts: Vec<String> = c
                    .parts
                    .iter()
                    .map(|(j, p)| {
                        let elems: Vec<&str> = p.iter().map(|x| x.as_str()).collect();
                        format!("{j}:{{{}}}", elems.join(","))
                    })
                    .collect();
                writeln!(s, "{}", parts.join(" ")).unwrap();
            }
            writeln!(s, "count: {}", covers.len()).unwrap();
            s
        }
    };
    emit(&args.out, &rendered)?;
    Ok(0)
}

fn cmd_cov_compose(args: &CovComposeArgs) -> Result<u8, InputError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| InputError(format!("cannot read {}: {e}", args.input.display())))?;
    let covers: Vec<Cover> =
        serde_json::from_str(&text).map_err(|e| InputError(format!("bad cover JSON: {e}")))?;
    let [s, t] = covers.as_slice() else {
        return Err(InputError(format!(
            "expected a JSON array of exactly two covers, got {}",
            covers.len()
        )));
    };
    s.validate()?;
    t.validate()?;
    let composite = compose(t, s)?;
    let mut rendered =
        serde_json::to_string_pretty(&composite).map_err(|e| InputError(e.to_string()))?;
    rendered.push('\n');
    emit(&args.out, &rendered)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, InputError> {
    let results = run_suite(&args.suite, args.seed)
        .ok_or_else(|| InputError(format!("unknown suite {:?}", args.suite)))?;
    let mut all_pass = true;
    for r in &results {
        all_pass &= r.pass;
        println!(
            "[{}] {} ... {} ({})",
            r.suite,
            r.name,
            if r.pass { "ok" } else { "FAIL" },
            r.detail
        );
    }
    println!(
        "{} checks, {} failed",
        results.len(),
        results.iter().filter(|r| !r.pass).count()
    );
    Ok(if all_pass { 0 } else { 1 })
}

fn run() -> Result<u8, InputError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Conf(ConfCommand::Betti(args)) => cmd_conf_betti(args),
        Command::Conf(ConfCommand::Ordered(args)) => cmd_conf_ordered(args),
        Command::Lie(LieCommand::Free(args)) => cmd_lie_free(args),
        Command::Ce(CeCommand::Homology(args)) => cmd_ce_homology(args),
        Command::Env(EnvCommand::Pbw(args)) => cmd_env_pbw(args),
        Command::Env(EnvCommand::FreeSeries(args)) => cmd_env_free_series(args),
        Command::Cov(CovCommand::Enum(args)) => cmd_cov_enum(args),
        Command::Cov(CovCommand::Compose(args)) => cmd_cov_compose(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
