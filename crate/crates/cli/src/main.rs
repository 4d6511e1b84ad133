mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use toeplitz_core::extended_bratteli::{
    essential_thickness, find_double_path, thickness_census, DiagramSpec,
};
use toeplitz_core::gtheta::{build_gtheta, tameness_verdict};
use toeplitz_core::independence::{scan_fixed_point, synthesize_scheme, verify_patterns};
use toeplitz_core::odometer::{OdometerHead, Scale};
use toeplitz_core::semicocycle::{
    build_d_stage, build_f_family, build_level_family, check_p1, check_p2, check_translate_disjointness,
    default_zhat, heads_and_special, realize_prefix, toeplitz5_window, LanguageHandle,
};
use toeplitz_core::substitution::{parse, Substitution, Verdict};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "toeplitz", version, about = "Tameness analysis for substitution and Toeplitz shifts")]
struct Cli {
    /// Worker threads for parallel checks (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Substitution file (`a -> aaca` lines or JSON `{"rules": {...}}`)
    file: Option<PathBuf>,

    /// Substitution given on the command line, e.g. "a->ab; b->ba"
    #[arg(long, conflicts_with = "file")]
    inline: Option<String>,
}

impl Input {
    fn text(&self) -> anyhow::Result<String> {
        match (&self.file, &self.inline) {
            (_, Some(s)) => Ok(s.clone()),
            (Some(p), None) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
            (None, None) => bail!("give an input file or --inline"),
        }
    }

    fn substitution(&self) -> anyhow::Result<Substitution> {
        Ok(parse(&self.text()?)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Primitivity, aperiodicity, pure base, coincidence and verdict
    Analyze(Input),
    /// Subset graph of the pure base as JSON or DOT
    Gtheta {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        dot: bool,
    },
    /// Path census of the extended diagram
    Thickness {
        /// Substitution file or diagram JSON (`{"stationary": ...}` / `{"levels": [...]}`)
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        max_power: usize,
    },
    /// Independence scheme, times and pattern verification
    Independence {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_power: usize,
        /// Also look the patterns up in a two-sided fixed point
        #[arg(long)]
        scan: bool,
    },
    /// Explicit semicocycle constructions
    #[command(subcommand)]
    Semicocycle(Semi),
    /// Head arithmetic on an odometer
    Odometer {
        /// `constant:L`, `powers:B` or `explicit:L1,L2,...;constant:L`
        #[arg(long)]
        scale: String,
        /// Digits `z_1,z_2,...`
        #[arg(long)]
        head: String,
        #[arg(long, conflicts_with = "translate")]
        add: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
        #[arg(long)]
        neg: bool,
        /// Report the common head length with this head
        #[arg(long)]
        compare: Option<String>,
    },
}

#[derive(Subcommand)]
enum Semi {
    /// Points of the stage and its head statistics
    DSet {
        #[arg(long, default_value_t = 3)]
        stage: usize,
    },
    /// Letters `f(zhat + n)` over a range of offsets
    Window {
        /// Base-4^n digits, defaults to sixteen 2s
        #[arg(long)]
        zhat: Option<String>,
        #[arg(long, default_value = "0:64", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 3)]
        stage: usize,
    },
    /// Realise a word of the language along the times t_1..t_N
    Realize {
        /// `full`, `sturmian` or a comma-separated list of words
        #[arg(long, default_value = "full")]
        lang: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 4096)]
        horizon: u64,
        /// Binary digits; defaults to 0,1,0,1,... past the horizon
        #[arg(long)]
        zhat: Option<String>,
    },
    /// Sampling check that translates of stage points meet D at most once
    Disjointness {
        #[arg(long, default_value_t = 3)]
        stage: usize,
        #[arg(long, default_value_t = 16)]
        t_range: i64,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// What a command produced: a JSON report, raw text, and whether the
/// outcome was inconclusive.
enum Output {
    Json(Value, bool),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match run(cli.command) {
        Ok(Output::Text(s)) => {
            emit(&s);
            ExitCode::SUCCESS
        }
        Ok(Output::Json(mut v, inconclusive)) => {
            if let Value::Object(m) = &mut v {
                m.insert("schema".into(), json!(SCHEMA));
            }
            emit(&(serde_json::to_string_pretty(&v).expect("serialisable") + "\n"));
            if inconclusive {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let report = json!({"schema": SCHEMA, "error": {"code": error_code(&e), "message": format!("{e:#}")}});
            eprintln!("{report}");
            ExitCode::from(1)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn run(cmd: Command) -> anyhow::Result<Output> {
    match cmd {
        Command::Analyze(input) => {
            let t = input.substitution()?;
            let report = tameness_verdict(&t)?;
            let inconclusive = matches!(report.verdict, Verdict::Inconclusive { .. });
            Ok(Output::Json(render::analysis(&report), inconclusive))
        }
        Command::Gtheta { input, dot } => {
            let t = input.substitution()?;
            let (_, base) = t.height_and_pure_base()?;
            let g = build_gtheta(&base);
            if dot {
                Ok(Output::Text(g.to_dot(&base)))
            } else {
                Ok(Output::Json(json!({"command": "gtheta", "graph": render::graph(&base, &g)}), false))
            }
        }
        Command::Thickness {
            input,
            depth,
            max_power,
        } => {
            let text = input.text()?;
            let spec = if text.trim_start().starts_with('{') && !text.contains("\"rules\"") {
                DiagramSpec::from_json(&text)?
            } else {
                DiagramSpec::Stationary(parse(&text)?)
            };
            let e = essential_thickness(&spec)?;
            let census = thickness_census(&spec, depth)?;
            let witness = if e >= 2 {
                find_double_path(&spec, e, max_power)?
            } else {
                None
            };
            let names = spec.tail().lower;
            Ok(Output::Json(
                json!({
                    "command": "thickness",
                    "rank": spec.rank(),
                    "essential_thickness": e,
                    "census": census.iter().map(|c| json!({
                        "k": c.k,
                        "class": c.class,
                        "cyclic_components": c.cyclic_components,
                        "head_counts": c.head_counts,
                        "oracle_exponential": c.oracle_exponential,
                        "oracle_agrees": c.oracle_agrees(),
                    })).collect::<Vec<_>>(),
                    "double_path": witness.map(|w| json!({
                        "power": w.power,
                        "set": render::names(&names, w.upper),
                        "labels": [w.labels.0, w.labels.1],
                        "verified": w.check(&spec),
                    })),
                }),
                false,
            ))
        }
        Command::Independence {
            input,
            n,
            max_power,
            scan,
        } => {
            let t = input.substitution()?;
            let Some(s) = synthesize_scheme(&t, max_power)? else {
                return Ok(Output::Json(
                    json!({"command": "independence", "scheme": null,
                           "reason": format!("no double path up to power {max_power}")}),
                    true,
                ));
            };
            let report = verify_patterns(&s, n)?;
            let scan = if scan { Some(scan_fixed_point(&s, &report)?) } else { None };
            Ok(Output::Json(render::independence(&s, &report, scan.as_deref()), !report.all_realized))
        }
        Command::Semicocycle(semi) => semicocycle(semi),
        Command::Odometer {
            scale,
            head,
            add,
            translate,
            neg,
            compare,
        } => {
            let scale = parse_scale(&scale)?;
            let x = OdometerHead::new(scale.clone(), parse_digits(&head)?)?;
            let mut y = x.clone();
            if let Some(a) = add {
                y = y.add(&OdometerHead::new(scale.clone(), parse_digits(&a)?)?)?;
            }
            if let Some(t) = translate {
                let t: BigInt = t.trim().parse().with_context(|| format!("bad integer {t:?}"))?;
                y = y.add_integer(&t);
            }
            if neg {
                y = y.neg();
            }
            let agreement = match compare {
                Some(c) => {
                    let other = OdometerHead::new(scale.clone(), parse_digits(&c)?)?;
                    let a = y.common_head_length(&other)?;
                    json!({"length": a.length, "saturated": a.saturated})
                }
                None => Value::Null,
            };
            Ok(Output::Json(
                json!({
                    "command": "odometer",
                    "scale": scale,
                    "input": render::digits(&x),
                    "result": render::digits(&y),
                    "index": y.index().to_string(),
                    "common_head": agreement,
                }),
                false,
            ))
        }
    }
}

fn semicocycle(cmd: Semi) -> anyhow::Result<Output> {
    match cmd {
        Semi::DSet { stage } => {
            let d = build_d_stage(stage)?;
            let stable = (1usize << stage).saturating_sub(1).min(16);
            let mut heads = Vec::new();
            for m in 1..=stable {
                let r = heads_and_special(m, &d)?;
                heads.push(json!({
                    "m": m,
                    "count": r.heads.len(),
                    "special": render::power_digits(&r.special),
                }));
            }
            Ok(Output::Json(
                json!({
                    "command": "semicocycle d-set",
                    "stage": stage,
                    "points": d.points.iter().map(|p| json!({
                        "notation": p.notation(),
                        "tail": p.tail,
                        "head": p.head.iter().rev().collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                    "heads": heads,
                    "p1": check_p1(&d).is_none(),
                    "p2": check_p2(&d, 1000, 12).is_ok(),
                }),
                false,
            ))
        }
        Semi::Window { zhat, range, stage } => {
            let digits = match zhat {
                Some(z) => parse_digits(&z)?,
                None => vec![BigUint::from(2u32); 16],
            };
            let z = OdometerHead::new(Scale::powers(4), digits)?;
            let (n0, n1) = parse_range(&range)?;
            let d = build_d_stage(stage)?;
            let letters = toeplitz5_window(&z, n0, n1, &d)?;
            Ok(Output::Json(
                json!({
                    "command": "semicocycle window",
                    "stage": stage.max(stage_for(z.depth())),
                    "depth": z.depth(),
                    "range": [n0, n1],
                    "letters": letters,
                }),
                false,
            ))
        }
        Semi::Realize {
            lang,
            word,
            n_max,
            horizon,
            zhat,
        } => {
            let language = LanguageHandle::parse(&lang)?;
            let lf = build_level_family(n_max, horizon)?;
            let fam = build_f_family(&language, &lf, n_max, horizon)?;
            let z = match zhat {
                Some(z) => OdometerHead::new(Scale::constant(2), parse_digits(&z)?)?,
                None => default_zhat(2 * horizon as usize + 2),
            };
            let r = realize_prefix(&word, &fam, &lf, &language, &z)?;
            Ok(Output::Json(
                json!({
                    "command": "semicocycle realize",
                    "language": language,
                    "horizon": horizon,
                    "n_max": n_max,
                    "choices": {"first_level": "alternating a, b", "below_domain": "a", "t_w": "smallest positive"},
                    "times": (1..=word.len()).map(|n| lf.time(n).to_string()).collect::<Vec<_>>(),
                    "realization": r,
                }),
                false,
            ))
        }
        Semi::Disjointness {
            stage,
            t_range,
            depth,
            samples,
            seed,
        } => {
            let d = build_d_stage(stage)?;
            let r = check_translate_disjointness(&d, t_range, depth, samples, seed)?;
            Ok(Output::Json(
                json!({
                    "command": "semicocycle disjointness",
                    "stage": stage,
                    "t_range": t_range,
                    "seed": seed,
                    "report": r,
                }),
                false,
            ))
        }
    }
}

/// Module-qualified code of the innermost library error.
fn error_code(e: &anyhow::Error) -> String {
    use toeplitz_core::{extended_bratteli, gtheta, independence, odometer, semicocycle, substitution};
    for cause in e.chain() {
        if let Some(x) = cause.downcast_ref::<toeplitz_core::Error>() {
            return x.code();
        }
        let code = if let Some(x) = cause.downcast_ref::<odometer::OdometerError>() {
            format!("odometer.{}", x.kind())
        } else if let Some(x) = cause.downcast_ref::<substitution::SubstitutionError>() {
            format!("substitution.{}", x.kind())
        } else if let Some(x) = cause.downcast_ref::<gtheta::GraphError>() {
            format!("gtheta.{}", x.kind())
        } else if let Some(x) = cause.downcast_ref::<extended_bratteli::DiagramError>() {
            format!("extended_bratteli.{}", x.kind())
        } else if let Some(x) = cause.downcast_ref::<independence::IndependenceError>() {
            format!("independence.{}", x.kind())
        } else if let Some(x) = cause.downcast_ref::<semicocycle::SemicocycleError>() {
            format!("semicocycle.{}", x.kind())
        } else if cause.downcast_ref::<std::io::Error>().is_some() {
            "cli.io".to_string()
        } else {
            continue;
        };
        return code;
    }
    "cli.usage".to_string()
}

fn stage_for(depth: usize) -> usize {
    (0..).find(|&i| (1usize << i) >= depth).unwrap()
}

fn parse_digits(s: &str) -> anyhow::Result<Vec<BigUint>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<BigUint>().map_err(|_| anyhow!("bad digit {x:?}")))
        .collect()
}

fn parse_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| anyhow!("range must be FROM:TO"))?;
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty range {s}");
    }
    Ok((a, b))
}

fn parse_scale(s: &str) -> anyhow::Result<Scale> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| anyhow!("scale must be KIND:VALUE"))?;
    let scale = match kind {
        "constant" => Scale::constant(rest.parse()?),
        "powers" => Scale::powers(rest.parse()?),
        "explicit" => {
            let (prefix, tail) = rest.split_once(';').ok_or_else(|| anyhow!("explicit scale needs ;TAIL"))?;
            let prefix = prefix
                .split(',')
                .map(|x| x.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()?;
            Scale::explicit(prefix, parse_scale(tail)?)?
        }
        other => bail!("unknown scale kind {other:?}"),
    };
    scale.validate()?;
    Ok(scale)
}
