//! `m24`: command-line front end for the moonshine Borcherds products.

mod cache;
mod ingest;
mod render;

use anyhow::{anyhow, bail, Context, Result};
use cache::{Cache, Source};
use clap::{Parser, Subcommand};
use m24_core::borcherds_lifts::{borcherds_product, divisors, LiftFamily, ProductMode};
use m24_core::cusp_transform::{genus_at_cusp, SL2Matrix};
use m24_core::data::builtin;
use m24_core::exact_algebra::rational::{parse_q, qi};
use m24_core::modular_blocks::{phi_0, phi_m2};
use m24_core::twisted_genera::genus_family;
use m24_core::verify::{additive_lift, run_suites, Orders, Suite, Workspace};
use m24_core::weil_lift::{jmap, jmap_theta_route, principal_part, JInput};
use m24_core::{class_table, find_class, ClassRecord, Q};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "m24", version, about = "Exact Borcherds products attached to the cycle shapes of M24")]
struct Cli {
    /// Directory holding classes.toml, ttilde.toml, appendix_a.toml and appendix_b.toml.
    #[arg(long, global = true, env = "M24_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Emit JSON, to stdout or to the given file.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "PATH")]
    json: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The 21 cycle shapes with order, level, weight and χ(g).
    Classes,
    /// φ₀,₁ and φ₋₂,₁ below q^rows.
    Blocks {
        #[arg(long, default_value_t = 4)]
        rows: i64,
    },
    /// The twisted elliptic genus φ_g and its family (φ_{g^d})_{d | N_g}.
    Genus {
        class: String,
        #[arg(long, default_value_t = 4)]
        rows: i64,
    },
    /// φ_{g^d}|A at another cusp.
    Cusp {
        class: String,
        /// The matrix A as "a,b,c,d".
        #[arg(long, default_value = "0,-1,1,0")]
        matrix: String,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long, default_value = "1")]
        trunc: String,
    },
    /// The vector-valued form Ĵ of the genus family and its principal part.
    Jmap {
        class: String,
        /// Use the theta-decomposition route instead of the direct one.
        #[arg(long)]
        theta_route: bool,
        #[arg(long, default_value = "1/4")]
        trunc: String,
    },
    /// The additive lift G(η_gφ₋₂,₁).
    Gritsenko {
        class: String,
        #[arg(long, default_value_t = 3)]
        qmax: i64,
        #[arg(long, default_value_t = 3)]
        smax: i64,
    },
    /// The Borcherds product Φ_g.
    Borcherds {
        class: String,
        /// product, fj or exp.
        #[arg(long, default_value = "product")]
        mode: String,
        #[arg(long, default_value_t = 3)]
        qmax: i64,
        #[arg(long, default_value_t = 3)]
        smax: i64,
    },
    /// Zeros and poles of Φ_g on Humbert surfaces of discriminant at most dmax.
    Divisors {
        class: String,
        #[arg(long, default_value = "1")]
        dmax: String,
    },
    /// Runs verification suites; exits with status 1 if any check fails.
    Verify {
        /// Suites to run (appendix-a, appendix-b, weights, weyl, classification, modes, leading,
        /// duality, pullback, additive-lift, hecke-identity, cusp) or "all".
        #[arg(default_value = "all")]
        suites: Vec<String>,
        /// Restrict to these classes.
        #[arg(long = "class")]
        classes: Vec<String>,
        /// Include runtimes in the JSON report.
        #[arg(long)]
        timings: bool,
    },
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

fn class(name: &str) -> Result<&'static ClassRecord> {
    find_class(name).ok_or_else(|| anyhow!("unknown class {name}; run `m24 classes` for the list"))
}

fn rational(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| anyhow!("not a rational number: {s}"))
}

/// Runs `produce` through the cache when M24_CACHE_DIR is set.
fn cached(key: &str, produce: impl FnOnce() -> Result<Value>) -> Result<Value> {
    let Some(cache) = Cache::from_env() else { return produce() };
    let key = format!("{key}|data:{:016x}", builtin().fingerprint);
    let (text, source) = cache.get_or_compute(&key, || Ok(serde_json::to_string(&produce()?)?))?;
    if source == Source::Hit {
        eprintln!("(served from cache)");
    }
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: &Cli) -> Result<Output> {
    let ok = |text: String, json: Value| Ok(Output { text, json, ok: true });
    match &cli.command {
        Command::Classes => {
            let j = json!(class_table().iter().map(render::class_json).collect::<Vec<_>>());
            ok(render::classes_text(class_table()), j)
        }
        Command::Blocks { rows } => {
            let (a, b) = (phi_0(*rows), phi_m2(*rows));
            ok(format!("φ₀,₁:\n{a}\n\nφ₋₂,₁:\n{b}\n"), json!({ "phi_0_1": a.to_json(), "phi_m2_1": b.to_json() }))
        }
        Command::Genus { class: name, rows } => {
            let fam = genus_family(class(name)?, *rows)?;
            ok(render::genus_text(&fam), render::genus_json(&fam))
        }
        Command::Cusp { class: name, matrix, d, trunc } => {
            let rec = class(name)?;
            let a = SL2Matrix::parse(matrix).ok_or_else(|| anyhow!("{matrix} is not \"a,b,c,d\" with determinant 1"))?;
            if rec.level % d != 0 {
                bail!("{d} does not divide N = {}", rec.level);
            }
            let s = genus_at_cusp(rec, *d, &a, &rational(trunc)?)?;
            ok(
                format!("φ_{{g^{d}}} | {a} for g = {}:\n{s}\n", rec.name),
                json!({ "class": rec.name, "d": d, "matrix": [a.a, a.b, a.c, a.d], "series": s.to_json() }),
            )
        }
        Command::Jmap { class: name, theta_route, trunc } => {
            let rec = class(name)?;
            let t = rational(trunc)?;
            let key = format!("jmap|{}|{}|{}", rec.name, theta_route, m24_core::exact_algebra::rational::fmt_q(&t));
            let j = cached(&key, || {
                let input = JInput::from_class(rec)?;
                let f = if *theta_route { jmap_theta_route(&input, &t)? } else { jmap(&input, &t)? };
                Ok(render::jmap_json(rec, &f))
            })?;
            ok(render::jmap_text(&j), j)
        }
        Command::Gritsenko { class: name, qmax, smax } => {
            let rec = class(name)?;
            let key = format!("gritsenko|{}|{qmax}|{smax}", rec.name);
            let j = cached(&key, || Ok(additive_lift(rec, *qmax, *smax)?.to_json()))?;
            ok(render::expansion_text(&format!("G(η_gφ₋₂,₁) for {}", rec.name), &j, false), j)
        }
        Command::Borcherds { class: name, mode, qmax, smax } => {
            let rec = class(name)?;
            let m: ProductMode = mode.parse().map_err(|e| anyhow!("{e}"))?;
            // the three modes give the same series, so they share a cache entry
            let key = format!("borcherds|{}|{qmax}|{smax}", rec.name);
            let compute = || -> Result<Value> {
                let rows = (qmax - 1).max(0) * (smax - 1).max(0) + 1;
                let fam = LiftFamily::from_class(rec, rows)?;
                Ok(borcherds_product(&fam, m, *qmax, *smax)?.to_json())
            };
            let j = if m == ProductMode::Product { cached(&key, compute)? } else { compute()? };
            ok(render::expansion_text(&format!("Φ_{} ({mode} form)", rec.name), &j, true), j)
        }
        Command::Divisors { class: name, dmax } => {
            let rec = class(name)?;
            let f = jmap(&JInput::from_class(rec)?, &qi(0))?;
            let entries = divisors(&principal_part(&f), &rational(dmax)?);
            let j = json!({
                "class": rec.name,
                "divisors": entries.iter().map(|e| e.to_json(rec.level, 1)).collect::<Vec<_>>(),
            });
            ok(render::divisors_text(rec, &entries), j)
        }
        Command::Verify { suites, classes, timings } => {
            let suites: Vec<Suite> = if suites.iter().any(|s| s == "all") {
                Suite::ALL.to_vec()
            } else {
                suites.iter().map(|s| s.parse::<Suite>().map_err(|e| anyhow!(e))).collect::<Result<_>>()?
            };
            let ws = Workspace::new(Orders::default());
            let filter = (!classes.is_empty()).then_some(classes.as_slice());
            let report = run_suites(&ws, &suites, filter).map_err(|e| anyhow!(e))?;
            Ok(Output { text: report.to_text(), json: report.to_json(*timings), ok: report.passed() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<bool> {
        if let Some(dir) = &cli.data_dir {
            ingest::ingest(dir)?;
        }
        let out = run(&cli)?;
        match cli.json.as_deref() {
            Some("-") => println!("{}", serde_json::to_string_pretty(&out.json)?),
            Some(path) => {
                std::fs::write(path, serde_json::to_string_pretty(&out.json)? + "\n")
                    .with_context(|| format!("writing {path}"))?;
                print!("{}", out.text);
            }
            None => print!("{}", out.text),
        }
        Ok(out.ok)
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
