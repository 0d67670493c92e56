//! Command-line front end: set generation, decomposition runs, size sweeps,
//! verification batteries, exponential sums and Littlewood norms.
//!
//! Exit codes: 0 success; 1 a constant-free battery check failed; 2 usage,
//! parse or degeneracy errors; 3 an internal post-condition failed (a bug).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use addcomb_core::decompose::{balog_wooley_decompose, Decomposition};
use addcomb_core::expsum::{
    check_holder4, check_holder8, check_konyagin_shkredov, check_vinogradov, double_sum,
    littlewood_l1,
};
use addcomb_core::field::FieldCtx;
use addcomb_core::poly::{BivariateQuadratic, UnivariatePoly};
use addcomb_core::report::{BoundReport, DigestBuilder, Value};
use addcomb_core::sets::{
    generate, orbit, read_set_file, univariate_image, write_set, write_set_file, GenSpec,
};
use addcomb_core::verify::{run_battery, BatteryConfig, BatteryFailure, Suite};
use addcomb_core::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "addcomb",
    about = "Additive combinatorics over finite fields: energies, decompositions, exponential sums",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a structured set and write it as a set file.
    Gen(GenArgs),
    /// Run the low-energy decomposition on a set file.
    Decompose(DecomposeArgs),
    /// Sweep the decomposition over a list of sizes, emitting CSV rows.
    Sweep(SweepArgs),
    /// Run the inequality battery.
    Verify(VerifyArgs),
    /// Evaluate a double exponential sum, optionally against a named bound.
    Expsum(ExpsumArgs),
    /// Littlewood l1 norm of a set (or of its image under a polynomial).
    Littlewood(LittlewoodArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Prime modulus p.
    #[arg(long)]
    p: u64,
    /// Extension modulus coefficients (little-endian, monic) for F_{p^n}.
    #[arg(long = "mod", value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

impl FieldArgs {
    fn ctx(&self) -> Result<FieldCtx, Error> {
        match &self.modulus {
            Some(m) => FieldCtx::extension(self.p, m),
            None => FieldCtx::prime(self.p),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// ap | gp | subgroup | random | interval | union | orbit
    #[arg(long)]
    kind: String,
    /// Comma-separated key=value parameters, e.g. start=0,diff=1,len=10.
    /// For union: sub-specs joined by '|', e.g. "ap:start=0,diff=1,len=8|gp:start=1,ratio=3,len=8".
    #[arg(long, default_value = "")]
    params: String,
    /// Seed for the random generator (params seed= takes precedence).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input set file.
    #[arg(long)]
    set: PathBuf,
    /// Bivariate quadratic, e.g. "x^2+y".
    #[arg(long)]
    f: String,
    /// Energy threshold parameter M in [1, |A|]; defaults to |A|^(1/5).
    #[arg(long = "M", value_name = "M")]
    m: Option<f64>,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Suppress wall-clock fields for byte-identical output.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Ascending sizes, e.g. 64,128,256,512.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,
    /// ap | gp | random | interval | apgp
    #[arg(long, default_value = "apgp")]
    kind: String,
    #[arg(long)]
    p: u64,
    /// Bivariate quadratic for the f-energy side.
    #[arg(long, default_value = "x^2+y")]
    f: String,
    /// Rows per size (distinct seeds; only random kind varies).
    #[arg(long, default_value_t = 1)]
    repeats: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Zero the seconds column for byte-identical output.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// constant-free | reports | all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1)]
    corpus_seed: u64,
    #[arg(long, default_value_t = 50)]
    instances: u32,
    /// Multiplicative constant for the report-tier bounds.
    #[arg(long, default_value_t = 64.0)]
    constant: f64,
    /// Kept for symmetry; reports always stream as JSON lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExpsumArgs {
    /// Set file for S.
    #[arg(long = "S", visible_alias = "s")]
    s: PathBuf,
    /// Set file for T.
    #[arg(long = "T", visible_alias = "t")]
    t: PathBuf,
    /// vinogradov | holder4 | holder8 | konshk (konshk reads S as the subset X1 of T = X)
    #[arg(long)]
    bound: Option<String>,
    /// Maximum |S| * |T| terms for the pairwise summation.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LittlewoodArgs {
    /// Input set file.
    #[arg(long)]
    set: PathBuf,
    /// Optional univariate polynomial; the norm is taken over f(A).
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct ExperimentReport<T: Serialize> {
    schema_version: u32,
    command: String,
    /// Full command-line echo; identical argv and seeds reproduce the report.
    argv: Vec<String>,
    field: FieldInfo,
    inputs: BTreeMap<String, String>,
    results: T,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    reports: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

fn argv_echo() -> Vec<String> {
    std::env::args().collect()
}

#[derive(Serialize)]
struct FieldInfo {
    p: u64,
    n: usize,
}

#[derive(Serialize)]
struct Timings {
    seconds: f64,
}

fn main() -> ExitCode {
    // restore conventional SIGPIPE handling so piping into `head` terminates
    // the stream quietly instead of panicking on a closed stdout
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Expsum(args) => cmd_expsum(args),
        Command::Littlewood(args) => cmd_littlewood(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn parse_kv(params: &str) -> BTreeMap<String, String> {
    params
        .split(',')
        .filter(|s| !s.is_empty())
        .filter_map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn need(map: &BTreeMap<String, String>, key: &str) -> Result<u64, Error> {
    map.get(key)
        .ok_or_else(|| Error::InvalidParams(format!("missing parameter `{key}`")))?
        .parse()
        .map_err(|_| Error::InvalidParams(format!("parameter `{key}` is not an integer")))
}

fn parse_genspec(kind: &str, params: &str, default_seed: u64) -> Result<GenSpec, Error> {
    let map = parse_kv(params);
    match kind {
        "ap" => Ok(GenSpec::Ap {
            start: need(&map, "start")?,
            diff: need(&map, "diff")?,
            len: need(&map, "len")?,
        }),
        "gp" => Ok(GenSpec::Gp {
            start: need(&map, "start")?,
            ratio: need(&map, "ratio")?,
            len: need(&map, "len")?,
        }),
        "subgroup" => Ok(GenSpec::Subgroup {
            order: need(&map, "order")?,
        }),
        "random" => Ok(GenSpec::Random {
            seed: need(&map, "seed").unwrap_or(default_seed),
            size: need(&map, "size")?,
        }),
        "interval" => Ok(GenSpec::Interval {
            start: need(&map, "start")?,
            len: need(&map, "len")?,
        }),
        "union" => {
            let parts: Result<Vec<GenSpec>, Error> = params
                .split('|')
                .map(|sub| {
                    let (k, p) = sub.split_once(':').ok_or_else(|| {
                        Error::InvalidParams(format!(
                            "union part `{sub}` must look like kind:params"
                        ))
                    })?;
                    parse_genspec(k, p, default_seed)
                })
                .collect();
            Ok(GenSpec::Union(parts?))
        }
        other => Err(Error::InvalidParams(format!(
            "unknown generator kind `{other}`"
        ))),
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let ctx = args.field.ctx()?;
    let set = if args.kind == "orbit" {
        let map = parse_kv(&args.params);
        let f_src = map
            .get("f")
            .ok_or_else(|| Error::InvalidParams("orbit needs f=<poly>".into()))?;
        let f = UnivariatePoly::parse(f_src, &ctx)?;
        let u = ctx.elem(need(&map, "u")?)?;
        let cap = need(&map, "cap").unwrap_or(ctx.q());
        let o = orbit(&f, u, cap)?;
        if !o.closed {
            eprintln!("note: orbit did not close within cap; the set is a partial orbit");
        }
        o.set
    } else {
        let spec = parse_genspec(&args.kind, &args.params, args.seed)?;
        generate(&ctx, &spec)?
    };
    match args.out {
        Some(path) => write_set_file(&path, &set)?,
        None => {
            let stdout = std::io::stdout();
            write_set(stdout.lock(), &set)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct DecomposeResults {
    a_size: usize,
    s_size: usize,
    t_size: usize,
    e_s: u128,
    e_f_t: u128,
    m: f64,
    threshold: f64,
    rounds: Vec<RoundRow>,
    p_constraint_ok: bool,
    safeguard_events: u32,
}

#[derive(Serialize)]
struct RoundRow {
    index: u32,
    s_size: u64,
    s_energy: u128,
    extracted: u64,
}

fn cmd_decompose(args: DecomposeArgs) -> Result<ExitCode, Error> {
    let a = read_set_file(&args.set)?;
    let ctx = a.ctx().clone();
    let f = BivariateQuadratic::parse(&args.f, &ctx)?;
    let started = Instant::now();
    let run = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        balog_wooley_decompose(&a, &f, args.m)
    }));
    let decomposition: Decomposition = match run {
        Err(_) => {
            eprintln!("internal assertion failed during decomposition");
            return Ok(ExitCode::from(3));
        }
        Ok(Err(err)) => return Err(err),
        Ok(Ok(d)) => d,
    };
    if !decomposition.verify(&a) {
        eprintln!("post-condition check failed");
        return Ok(ExitCode::from(3));
    }
    let seconds = started.elapsed().as_secs_f64();

    if !decomposition.p_constraint_ok {
        eprintln!(
            "warning: |A| = {} exceeds p^(5/8); the decomposition still runs but the size guarantee lapses",
            a.len()
        );
    }

    let results = DecomposeResults {
        a_size: a.len(),
        s_size: decomposition.s.len(),
        t_size: decomposition.t.len(),
        e_s: decomposition.final_s_energy,
        e_f_t: decomposition.f_energy_t,
        m: decomposition.m,
        threshold: decomposition.threshold,
        rounds: decomposition
            .rounds
            .iter()
            .map(|r| RoundRow {
                index: r.index,
                s_size: r.s_size,
                s_energy: r.s_energy,
                extracted: r.extracted,
            })
            .collect(),
        p_constraint_ok: decomposition.p_constraint_ok,
        safeguard_events: decomposition.safeguard_events,
    };
    if args.json {
        let post_condition = BoundReport::new(
            "decomposition_post_condition",
            Value::Exact(decomposition.final_s_energy),
            Value::Float(decomposition.threshold),
            1.0,
            BTreeMap::from([("p_constraint".to_string(), decomposition.p_constraint_ok)]),
            DigestBuilder::new("decomposition")
                .set(&a)
                .text(&f.to_string())
                .finish(),
        );
        let report = ExperimentReport {
            schema_version: SCHEMA_VERSION,
            command: "decompose".into(),
            argv: argv_echo(),
            field: FieldInfo {
                p: ctx.p(),
                n: ctx.n(),
            },
            inputs: BTreeMap::from([
                (
                    "set_digest".to_string(),
                    DigestBuilder::new("set").set(&a).finish(),
                ),
                ("f".to_string(), f.to_string()),
            ]),
            results,
            reports: vec![serde_json::from_str(&post_condition.to_json_line()).unwrap()],
            timings: if args.deterministic {
                None
            } else {
                Some(Timings { seconds })
            },
        };
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        println!("A: {} elements over {}", results.a_size, ctx);
        println!("S: {} elements, E(S) = {}", results.s_size, results.e_s);
        println!("T: {} elements, E_f(T) = {}", results.t_size, results.e_f_t);
        println!(
            "threshold |A|^3/M = {:.3} with M = {:.3}",
            results.threshold, results.m
        );
        for r in &results.rounds {
            println!(
                "  round {}: |S| = {}, E(S) = {}, extracted {}",
                r.index, r.s_size, r.s_energy, r.extracted
            );
        }
        if !args.deterministic {
            println!("elapsed: {seconds:.3} s");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_spec(kind: &str, n: u64, seed: u64, p: u64) -> Result<GenSpec, Error> {
    match kind {
        "ap" => Ok(GenSpec::Ap {
            start: 0,
            diff: 1,
            len: n,
        }),
        "gp" => Ok(GenSpec::Gp {
            start: 1,
            ratio: addcomb_core::sets::smallest_primitive_root(p),
            len: n,
        }),
        "random" => Ok(GenSpec::Random { seed, size: n }),
        "interval" => Ok(GenSpec::Interval { start: 0, len: n }),
        "apgp" => Ok(GenSpec::Union(vec![
            GenSpec::Ap {
                start: 0,
                diff: 1,
                len: n,
            },
            GenSpec::Gp {
                start: 1,
                ratio: addcomb_core::sets::smallest_primitive_root(p),
                len: n,
            },
        ])),
        other => Err(Error::InvalidParams(format!(
            "unknown sweep kind `{other}`"
        ))),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    if args.sizes.is_empty() {
        return Err(Error::InvalidParams("need at least one size".into()));
    }
    if args.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "sizes must be strictly ascending".into(),
        ));
    }
    let ctx = FieldCtx::prime(args.p)?;
    let f = BivariateQuadratic::parse(&args.f, &ctx)?;
    let mut rows = vec!["n,set_size,e_s,e_f_t,ratio,seconds".to_string()];
    for &n in &args.sizes {
        for rep in 0..args.repeats.max(1) {
            let seed = args
                .seed
                .wrapping_add(rep as u64)
                .wrapping_mul(0x9e3779b97f4a7c15);
            let row = (|| -> Result<String, Error> {
                let spec = sweep_spec(&args.kind, n, seed, args.p)?;
                let a = generate(&ctx, &spec)?;
                let started = Instant::now();
                let d = balog_wooley_decompose(&a, &f, None)?;
                let seconds = if args.deterministic {
                    0.0
                } else {
                    started.elapsed().as_secs_f64()
                };
                let size = a.len() as f64;
                let ratio = d.final_s_energy.max(d.f_energy_t) as f64
                    / (size.powf(2.8) * size.log2().powi(4));
                Ok(format!(
                    "{n},{},{},{},{ratio:.6e},{seconds:.3}",
                    a.len(),
                    d.final_s_energy,
                    d.f_energy_t
                ))
            })();
            match row {
                Ok(r) => rows.push(r),
                Err(err) => rows.push(format!("{n},ERROR,{err},,,")),
            }
        }
    }
    let body = rows.join("\n") + "\n";
    match args.csv {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let suite = Suite::parse(&args.suite)?;
    let cfg = BatteryConfig {
        suite,
        seed: args.corpus_seed,
        instances: args.instances,
        constant: args.constant,
    };
    match run_battery(&cfg) {
        Ok(reports) => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for report in &reports {
                writeln!(w, "{}", report.to_json_line())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => {
            if let Some(failure) = err.downcast_ref::<BatteryFailure>() {
                eprintln!("{failure}");
                println!("{}", failure.report.to_json_line());
                Ok(ExitCode::from(1))
            } else {
                Err(Error::InvalidInputs(err.to_string()))
            }
        }
    }
}

#[derive(Serialize)]
struct ExpsumResults {
    magnitude: f64,
    re: f64,
    im: f64,
    terms: u64,
}

fn cmd_expsum(args: ExpsumArgs) -> Result<ExitCode, Error> {
    let s = read_set_file(&args.s)?;
    let t = read_set_file(&args.t)?;
    if (s.len() as u64).saturating_mul(t.len() as u64) > args.budget {
        return Err(Error::TooLarge(format!(
            "|S| * |T| = {} exceeds --budget {}",
            s.len() * t.len(),
            args.budget
        )));
    }
    let ds = double_sum(&s, &t)?;
    let bound_report = match args.bound.as_deref() {
        None => None,
        Some("vinogradov") => Some(check_vinogradov(&s, &t)?),
        Some("holder4") => Some(check_holder4(&s, &t)?),
        Some("holder8") => Some(check_holder8(&s, &t)?),
        Some("konshk") => Some(check_konyagin_shkredov(&s, &t)?),
        Some(other) => return Err(Error::UnknownCheckName(other.to_string())),
    };
    if args.json {
        let report = ExperimentReport {
            schema_version: SCHEMA_VERSION,
            command: "expsum".into(),
            argv: argv_echo(),
            field: FieldInfo {
                p: s.ctx().p(),
                n: s.ctx().n(),
            },
            inputs: BTreeMap::from([
                (
                    "s_digest".to_string(),
                    DigestBuilder::new("set").set(&s).finish(),
                ),
                (
                    "t_digest".to_string(),
                    DigestBuilder::new("set").set(&t).finish(),
                ),
            ]),
            results: ExpsumResults {
                magnitude: ds.magnitude,
                re: ds.value.re,
                im: ds.value.im,
                terms: ds.terms,
            },
            reports: bound_report
                .iter()
                .map(|r| serde_json::from_str(&r.to_json_line()).unwrap())
                .collect(),
            timings: None,
        };
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        println!(
            "|sum psi(st)| = {:.6} over {} terms (value {:.6} + {:.6}i)",
            ds.magnitude, ds.terms, ds.value.re, ds.value.im
        );
        if let Some(r) = &bound_report {
            println!(
                "bound {}: lhs = {}, rhs = {}, pass = {}",
                r.name, r.lhs, r.rhs, r.pass
            );
        }
    }
    if bound_report.is_none_or(|r| r.pass) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

#[derive(Serialize)]
struct LittlewoodResults {
    l1: f64,
    base_size: usize,
    image_size: usize,
    quarter_power_reference: f64,
    tenth_power_reference: f64,
}

fn cmd_littlewood(args: LittlewoodArgs) -> Result<ExitCode, Error> {
    let a = read_set_file(&args.set)?;
    let ctx = a.ctx().clone();
    let target = match &args.f {
        Some(src) => {
            let f = UnivariatePoly::parse(src, &ctx)?;
            univariate_image(&f, &a)
        }
        None => a.clone(),
    };
    let l1 = littlewood_l1(&target)?;
    let results = LittlewoodResults {
        l1,
        base_size: a.len(),
        image_size: target.len(),
        quarter_power_reference: (a.len() as f64).powf(0.25),
        tenth_power_reference: (a.len() as f64).powf(0.1),
    };
    if args.json {
        let report = ExperimentReport {
            schema_version: SCHEMA_VERSION,
            command: "littlewood".into(),
            argv: argv_echo(),
            field: FieldInfo {
                p: ctx.p(),
                n: ctx.n(),
            },
            inputs: BTreeMap::from([
                (
                    "set_digest".to_string(),
                    DigestBuilder::new("set").set(&a).finish(),
                ),
                (
                    "f".to_string(),
                    args.f.clone().unwrap_or_else(|| "identity".into()),
                ),
            ]),
            results,
            reports: Vec::new(),
            timings: None,
        };
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        println!("l1 = {:.6} over {} frequencies", results.l1, ctx.p());
        println!(
            "references: |A|^(1/4) = {:.6}, |A|^(1/10) = {:.6} (|A| = {})",
            results.quarter_power_reference, results.tenth_power_reference, results.base_size
        );
    }
    Ok(ExitCode::SUCCESS)
}
