mod cache;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use zetahopf_core::bigfloat::{bits_for_digits, BigFloat};
use zetahopf_core::bridge::DEFAULT_FIT_HEIGHT;
use zetahopf_core::exact::{LinComb, Rational};
use zetahopf_core::graph::OrderedRootedGraph;
use zetahopf_core::matrix::{genus_expansion, gue_moment, mc_moment, TraceWord};
use zetahopf_core::numerics::{NumericResult, Rigor, ZetaCache, MAX_DIGITS, MIN_DIGITS};
use zetahopf_core::quadrature::iterated_integral;
use zetahopf_core::relation::{fit_to_mzv, MzvFit};
use zetahopf_core::selberg::{epsilon_expand, normalized_expand, selberg_value, EpsilonExpansion, SelbergSpec};
use zetahopf_core::trees::{antipode, coproduct, RootedTree};
use zetahopf_core::verify::{run_suite, SuiteReport, VerifyConfig, SUITES};
use zetahopf_core::words::{composition_from_word, dual, shuffle, stuffle, Composition, Word};
use zetahopf_core::Error;

use cache::DiskCache;

#[derive(Parser)]
#[command(name = "zetahopf", version, about = "Multiple zeta values, rooted-tree Hopf algebras, Selberg integrals and GUE moments")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct RunConfig {
    /// Significant decimal digits
    #[arg(long, global = true, default_value_t = 30, value_parser = clap::value_parser!(u32).range(MIN_DIGITS as i64..=MAX_DIGITS as i64))]
    digits: u32,
    /// Seed for randomized computations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    jobs: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Multiple zeta values
    #[command(subcommand)]
    Mzv(MzvCommand),
    /// Word algebra operations
    #[command(subcommand)]
    Word(WordCommand),
    /// Rooted-tree Hopf algebra operations
    #[command(subcommand)]
    Tree(TreeCommand),
    /// ζ(w) as an iterated integral over the simplex, by quadrature
    Iterint { word: String },
    /// Selberg-type integrals of ordered rooted graphs
    #[command(subcommand)]
    Selberg(SelbergCommand),
    /// GUE matrix-model moments
    #[command(subcommand)]
    Matrix(MatrixCommand),
    /// Fit a number to a rational combination of MZVs of one weight
    Fit {
        /// File holding a decimal number or a JSON object with "value" and "error_bound"
        value_file: PathBuf,
        #[arg(long)]
        weight: usize,
        #[arg(long, default_value_t = DEFAULT_FIT_HEIGHT)]
        height: u64,
    },
    /// Run a verification suite, or all of them
    Verify { suite: String },
}

#[derive(Subcommand)]
enum MzvCommand {
    /// ζ(s₁, …, s_k) for a composition such as 2,1
    Eval { composition: String },
}

#[derive(Subcommand)]
enum WordCommand {
    Shuffle { w1: String, w2: String },
    Stuffle { c1: String, c2: String },
    Dual { w: String },
}

#[derive(Subcommand)]
enum TreeCommand {
    Coproduct { tree: String },
    Antipode { tree: String },
}

#[derive(Subcommand)]
enum SelbergCommand {
    Value {
        graph: PathBuf,
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        eps: f64,
        /// Position of the interior root, if the graph has one
        #[arg(long)]
        x: Option<f64>,
    },
    Expand {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        x: Option<f64>,
        /// Divide out the Γ-type normalization of free vertices
        #[arg(long)]
        normalized: bool,
    },
}

#[derive(Subcommand)]
enum MatrixCommand {
    Moment {
        trace_word: String,
        /// Evaluate the polynomial at this N
        #[arg(long = "N")]
        n: Option<u64>,
    },
    Genus { trace_word: String },
    Mc {
        trace_word: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

/// Failures split by exit code: 2 for bad input, 1 for everything else.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = format!("{}: {e}", e.kind());
        if e.is_usage() {
            Failure::Usage(msg)
        } else {
            Failure::Compute(msg)
        }
    }
}

/// Parse a positional argument, naming the token on failure.
fn arg<T: std::str::FromStr<Err = Error>>(token: &str) -> Result<T, Failure> {
    token.parse().map_err(|e: Error| Failure::Usage(format!("{}: {e} in {token:?}", e.kind())))
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

struct Output {
    json: bool,
    text: String,
    value: Value,
}

impl Output {
    fn new(cfg: &RunConfig, text: impl Into<String>, value: Value) -> Self {
        Output { json: cfg.json, text: text.into(), value }
    }
}

fn zeta_term(w: &Word) -> String {
    match composition_from_word(w) {
        Ok(c) => format!("ζ{c}"),
        Err(_) => w.to_string(),
    }
}

fn fit_text(f: &MzvFit) -> String {
    if f.combo.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (w, c)) in f.combo.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else { "+" };
        match (i, c.is_negative()) {
            (0, false) => {}
            (0, true) => s.push('-'),
            _ => s.push_str(&format!(" {sign} ")),
        }
        let mag = c.abs();
        if mag != Rational::one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&zeta_term(w));
    }
    s
}

fn lincomb_json<B: Ord + Clone + std::fmt::Display>(l: &LinComb<B>, key: &str) -> Value {
    Value::Array(l.iter().map(|(b, c)| json!({key: b.to_string(), "coefficient": c.to_string()})).collect())
}

fn expansion_text(e: &EpsilonExpansion) -> String {
    e.coefficients
        .iter()
        .enumerate()
        .map(|(m, c)| format!("eps^{m}: {} ± {}", c.value_string(), c.error_string()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Half a unit in the last written place of a decimal string.
fn half_ulp(token: &str) -> BigFloat {
    let (mant, exp) = match token.find(['e', 'E']) {
        Some(i) => (&token[..i], token[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (token, 0),
    };
    let frac = mant.split_once('.').map_or(0, |(_, f)| f.len() as i64);
    let ulp = Rational::from(10).pow((exp - frac).clamp(-10_000, 10_000) as i32) / Rational::from(2);
    BigFloat::from_rational(&ulp, 64)
}

/// A target read from a file: a decimal, or a JSON object with "value" and
/// optionally "error_bound". The rounding of the written value is added to
/// the bound.
fn read_target(text: &str, digits: u32) -> Result<NumericResult, Failure> {
    let prec = bits_for_digits(digits + 10);
    let bad = |m: String| Failure::Usage(format!("value file: {m}"));
    let parse = |s: &str| BigFloat::parse_decimal(s, prec).map_err(|e| bad(format!("{}: {e} in {s:?}", e.kind())));
    let trimmed = text.trim();
    let (token, stated, rigor) = if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| bad(e.to_string()))?;
        let field = |k: &str| v.get(k).and_then(Value::as_str).map(str::to_string);
        let token = field("value").ok_or_else(|| bad("missing \"value\"".into()))?;
        let stated = match field("error_bound") {
            Some(e) => parse(&e)?,
            None => BigFloat::zero(64),
        };
        let rigor = field("rigor").and_then(|r| Rigor::parse(&r)).unwrap_or(Rigor::RigorousTail);
        (token, stated, rigor)
    } else {
        let token = trimmed.split_whitespace().next().ok_or_else(|| bad("empty".into()))?;
        (token.to_string(), BigFloat::zero(64), Rigor::RigorousTail)
    };
    let value = parse(&token)?;
    let err = &stated.with_prec(64) + &half_ulp(&token);
    Ok(NumericResult::new(value, err, rigor, digits))
}

fn verify_text(reports: &[SuiteReport]) -> String {
    let mut s: String = reports.iter().map(SuiteReport::to_text).collect();
    let failed: usize = reports.iter().map(|r| r.checks.iter().filter(|c| !c.pass).count()).sum();
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    if failed == 0 {
        s.push_str(&format!("all {total} checks passed"));
    } else {
        s.push_str(&format!("{failed} of {total} checks failed"));
    }
    s
}

fn run(cli: Cli, cache: &ZetaCache) -> Result<Output, Failure> {
    let cfg = cli.config;
    let digits = cfg.digits;
    match cli.command {
        Command::Mzv(MzvCommand::Eval { composition }) => {
            let c: Composition = arg(&composition)?;
            let r = cache.zeta(&c, digits)?;
            let mut v = r.to_json();
            v["composition"] = json!(c.to_string());
            Ok(Output::new(&cfg, r.value_string(), v))
        }
        Command::Word(WordCommand::Shuffle { w1, w2 }) => {
            let l = shuffle(&arg(&w1)?, &arg(&w2)?);
            Ok(Output::new(&cfg, l.to_string(), json!({"terms": lincomb_json(&l, "word")})))
        }
        Command::Word(WordCommand::Stuffle { c1, c2 }) => {
            let l = stuffle(&arg(&c1)?, &arg(&c2)?);
            Ok(Output::new(&cfg, l.to_string(), json!({"terms": lincomb_json(&l, "composition")})))
        }
        Command::Word(WordCommand::Dual { w }) => {
            let d = dual(&arg(&w)?)?;
            Ok(Output::new(&cfg, d.to_string(), json!({"word": w, "dual": d.to_string()})))
        }
        Command::Tree(TreeCommand::Coproduct { tree }) => {
            let t: RootedTree = arg(&tree)?;
            let d = coproduct(&t);
            let text = d
                .iter()
                .map(|((a, b), c)| format!("{c}\t{a} ⊗ {b}"))
                .collect::<Vec<_>>()
                .join("\n");
            let terms: Vec<Value> = d
                .iter()
                .map(|((a, b), c)| json!({"left": a.to_string(), "right": b.to_string(), "coefficient": c.to_string()}))
                .collect();
            Ok(Output::new(&cfg, text, json!({"tree": t.to_string(), "terms": terms})))
        }
        Command::Tree(TreeCommand::Antipode { tree }) => {
            let t: RootedTree = arg(&tree)?;
            let s = antipode(&t);
            let text = s.iter().map(|(f, c)| format!("{c}\t{f}")).collect::<Vec<_>>().join("\n");
            Ok(Output::new(&cfg, text, json!({"tree": t.to_string(), "terms": lincomb_json(&s, "forest")})))
        }
        Command::Iterint { word } => {
            let w: Word = arg(&word)?;
            let r = iterated_integral(&w, digits)?;
            let mut v = r.to_json();
            v["word"] = json!(w.to_string());
            Ok(Output::new(&cfg, r.value_string(), v))
        }
        Command::Selberg(SelbergCommand::Value { graph, eps, x }) => {
            let g = OrderedRootedGraph::from_json(&read_file(&graph)?)?;
            let r = selberg_value(&SelbergSpec::new(g, x)?, eps, digits)?;
            Ok(Output::new(&cfg, format!("{} ± {}", r.value_string(), r.error_string()), r.to_json()))
        }
        Command::Selberg(SelbergCommand::Expand { graph, order, x, normalized }) => {
            let g = OrderedRootedGraph::from_json(&read_file(&graph)?)?;
            let spec = SelbergSpec::new(g, x)?;
            let e = if normalized { normalized_expand(&spec, order, digits)? } else { epsilon_expand(&spec, order, digits)? };
            Ok(Output::new(&cfg, expansion_text(&e), e.to_json()))
        }
        Command::Matrix(MatrixCommand::Moment { trace_word, n }) => {
            let tw: TraceWord = arg(&trace_word)?;
            let p = gue_moment(&tw)?;
            let mut v = json!({"trace_word": tw.to_string(), "polynomial": p.to_json()});
            let mut text = p.to_string();
            if let Some(n) = n {
                let x = p.eval(n);
                text.push_str(&format!("\nN={n}: {x}"));
                v["N"] = json!(n);
                v["value"] = json!(x.to_string());
            }
            Ok(Output::new(&cfg, text, v))
        }
        Command::Matrix(MatrixCommand::Genus { trace_word }) => {
            let tw: TraceWord = arg(&trace_word)?;
            let g = genus_expansion(&tw)?;
            let text = g.iter().map(|(k, c)| format!("g{k}: {c}")).collect::<Vec<_>>().join("\n");
            let map: serde_json::Map<String, Value> = g.iter().map(|(k, c)| (format!("g{k}"), json!(c))).collect();
            Ok(Output::new(&cfg, text, json!({"trace_word": tw.to_string(), "genus": map})))
        }
        Command::Matrix(MatrixCommand::Mc { trace_word, n, samples }) => {
            let tw: TraceWord = arg(&trace_word)?;
            let r = mc_moment(&tw, n, samples, cfg.seed, cfg.jobs as usize)?;
            let v = r.to_json(digits);
            let text = format!(
                "{} ± {}",
                v["estimate"].as_str().unwrap_or_default(),
                v["stderr"].as_str().unwrap_or_default()
            );
            Ok(Output::new(&cfg, text, v))
        }
        Command::Fit { value_file, weight, height } => {
            let target = read_target(&read_file(&value_file)?, digits)?;
            let fit_digits = target.supported_digits().min(digits);
            match fit_to_mzv(&target, weight, fit_digits, height, cache)? {
                Some(f) => Ok(Output::new(&cfg, fit_text(&f), f.to_json())),
                None => Err(Failure::Compute(format!(
                    "NoRelation: no combination of weight {weight} within height {height} at {fit_digits} digits"
                ))),
            }
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = match suite.as_str() {
                "all" => SUITES.to_vec(),
                s if SUITES.contains(&s) => vec![s],
                other => {
                    return Err(Failure::Usage(format!(
                        "UnknownSuite: {other:?} (expected one of {}, all)",
                        SUITES.join(", ")
                    )))
                }
            };
            let vc = VerifyConfig { digits, seed: cfg.seed, jobs: cfg.jobs as usize };
            let reports = names.iter().map(|s| run_suite(s, &vc, cache)).collect::<Result<Vec<_>, _>>()?;
            let pass = reports.iter().all(SuiteReport::pass);
            let v = json!({
                "pass": pass,
                "digits": digits,
                "seed": cfg.seed,
                "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
            });
            let out = Output::new(&cfg, verify_text(&reports), v);
            if pass {
                Ok(out)
            } else {
                emit(&out);
                Err(Failure::Compute("verification failed".into()))
            }
        }
    }
}

fn emit(out: &Output) {
    let mut stdout = std::io::stdout().lock();
    let body = if out.json { out.value.to_string() } else { out.text.clone() };
    let _ = writeln!(stdout, "{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("usage error");
            eprintln!("{}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let cache = ZetaCache::new();
    let disk = DiskCache::load(&cache);
    let result = run(cli, &cache);
    disk.store(&cache);
    match result {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
    }
}
