//! `qmod`: command-line front end for moduli of representations of one-point
//! extensions.

mod check;
mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use config::Config;
use output::{motive_json, poly_json, Out};
use qmod::grothendieck::class_pg;
use qmod::motive::{MotiveEngine, RepFullMotiveSource};
use qmod::oracle::rep::random_full_point;
use qmod::oracle::{count_rep_full_points, stratum_census, ProbeGamma};
use qmod::quiver::{euler_form_ext, expected_dims, format_slope, slope};
use qmod::semiinv::{evaluate_si, quotient_coords, verify_weight, BlockDetSI, Family};
use qmod::stability::{hn_stratum_codim, GammaOracle, GammaTable, StabilityEngine};
use qmod::{ExtDimVector, ExtensionData, HNType, MotiveExpr, PrimeField};

#[derive(Parser, Debug)]
#[command(name = "qmod", version, about = "Moduli of representations of one-point extensions A[T]")]
struct Cli {
    /// JSON configuration (quiver, extension, budgets, seed, overrides).
    #[arg(long, global = true)]
    quiver: Option<PathBuf>,
    /// Dimension vector `s:d1,d2,...` in the vertex order of the config.
    #[arg(long, global = true)]
    dim: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for all sampling; overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON map `s:d1,d2` → motive string, used for [Rep^full].
    #[arg(long, global = true)]
    user_table: Option<PathBuf>,
    /// Interpolate [Rep^full] from exact point counts at small primes.
    #[arg(long, global = true)]
    interpolate: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MotiveKind {
    RepFull,
    Sst,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extended Euler form ⟨dim, with⟩ (⟨dim, dim⟩ without --with).
    Euler {
        #[arg(long)]
        with: Option<String>,
    },
    /// Slope s/(s + |d|).
    Slope,
    /// Dimensions of Rep(Q), Rep^full and the moduli space.
    Dims,
    /// HN types of weight --dim with at least two steps.
    HnTypes,
    /// Whether --dim is a semistable type.
    Semistable,
    /// Codimension of an HN stratum, or of every stratum of --dim.
    Codim {
        /// An HN type such as `(1|2,0) > (1|2,1)`.
        #[arg(long)]
        hn: Option<String>,
    },
    /// Motive of Rep^full or Rep^sst.
    Motive {
        #[arg(value_enum)]
        kind: MotiveKind,
    },
    /// Poincaré polynomial of the moduli space.
    Poincare,
    /// Exact number of full points over F_p.
    Count {
        #[arg(long)]
        prime: u64,
    },
    /// Stratum-by-stratum comparison of point counts with predicted classes.
    Census {
        #[arg(long)]
        prime: u64,
    },
    /// Runs the invariant suite on the configured extension.
    Check {
        /// Prime used for sampled checks.
        #[arg(long, default_value_t = 101)]
        prime: u64,
    },
    /// Evaluates semi-invariants on a seeded random full point.
    SiEval {
        #[arg(long, default_value_t = 101)]
        prime: u64,
        /// Only the semi-invariant with this name.
        #[arg(long)]
        name: Option<String>,
        /// Also fit the weight of each semi-invariant.
        #[arg(long)]
        weights: bool,
        /// Samples for the weight fit.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

/// Maps an error chain to the documented exit codes.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<qmod::Error>() {
            use qmod::Error::*;
            return match e {
                BudgetExceeded { .. } => 4,
                Unsupported(_) | ExplicitTRequired => 3,
                RigidityUnasserted | Assumption(_) | GammaOracle(_) | WeightFit(_) | DivisionByZero | Pole(_) => 2,
                InvalidQuiver(_) | VertexMismatch { .. } | ZeroVector | Shape(_) | Parse(_) | InvalidPrime(_) => 1,
            };
        }
        if cause.downcast_ref::<AssumptionFailed>().is_some() {
            return 2;
        }
    }
    1
}

/// A check or comparison came out false.
#[derive(Debug)]
pub struct AssumptionFailed(pub String);

impl std::fmt::Display for AssumptionFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AssumptionFailed {}

fn budget(cfg: Option<&Config>) -> Result<u128> {
    if let Ok(text) = std::env::var("QMOD_BUDGET") {
        return text.trim().parse().map_err(|_| anyhow!(qmod::Error::Parse(format!("QMOD_BUDGET='{text}' is not an integer"))));
    }
    Ok(cfg.map_or(config::DEFAULT_BUDGET, |c| c.budgets.max_enumeration))
}

struct Ctx {
    cfg: Config,
    ext: ExtensionData,
    seed: u64,
    budget: u128,
    gamma: Box<dyn GammaOracle>,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Ctx> {
        let path = cli.quiver.as_ref().ok_or_else(|| anyhow!(qmod::Error::Parse("--quiver <file> is required".into())))?;
        let cfg = Config::load(path).map_err(|e| anyhow!(qmod::Error::Parse(format!("{e:#}"))))?;
        let ext = cfg.extension()?;
        let seed = cli.seed.unwrap_or(cfg.seed);
        let budget = budget(Some(&cfg))?;
        let table = cfg.gamma_table()?;
        let gamma: Box<dyn GammaOracle> = if ext.t_matrices().is_some() {
            let probe = ProbeGamma::new(&ext, PrimeField::new(101)?, 20, seed)?;
            Box::new(GammaTable::with_fallback(table, Box::new(probe)))
        } else {
            Box::new(GammaTable::new(table))
        };
        Ok(Ctx { cfg, ext, seed, budget, gamma })
    }

    fn source(&self, cli: &Cli) -> Result<RepFullMotiveSource> {
        if let Some(path) = &cli.user_table {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let raw: BTreeMap<String, String> =
                serde_json::from_str(&text).map_err(|e| anyhow!(qmod::Error::Parse(format!("{}: {e}", path.display()))))?;
            let table = raw
                .iter()
                .map(|(k, m)| Ok((ExtDimVector::parse(k)?, m.parse::<MotiveExpr>()?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            return Ok(RepFullMotiveSource::UserTable(table));
        }
        if cli.interpolate {
            return Ok(RepFullMotiveSource::InterpolatedAuto { budget: self.budget });
        }
        Ok(RepFullMotiveSource::SymbolicA2)
    }
}

fn dim_arg(cli: &Cli) -> Result<ExtDimVector> {
    let text = cli.dim.as_ref().ok_or_else(|| anyhow!(qmod::Error::Parse("--dim s:d1,d2,... is required".into())))?;
    Ok(ExtDimVector::parse(text)?)
}

fn run(cli: &Cli, out: &mut Out) -> Result<()> {
    if let Command::Slope = cli.command {
        let v = dim_arg(cli)?;
        let s = format_slope(&slope(&v)?);
        out.line(&s);
        out.json(json!({ "dim": v.to_string(), "slope": s }));
        return Ok(());
    }
    let ctx = Ctx::new(cli)?;
    let ext = &ctx.ext;
    match &cli.command {
        Command::Slope => unreachable!(),
        Command::Euler { with } => {
            let a = dim_arg(cli)?;
            let b = match with {
                Some(w) => ExtDimVector::parse(w)?,
                None => a.clone(),
            };
            let e = euler_form_ext(ext, &a, &b)?;
            out.line(&e.to_string());
            out.json(json!({ "left": a.to_string(), "right": b.to_string(), "euler": e }));
        }
        Command::Dims => {
            let v = dim_arg(cli)?;
            let d = expected_dims(ext, &v)?;
            out.line(&format!("rep_q {}", d.dim_rep_q));
            out.line(&format!("rep_full {}", d.dim_rep_full));
            out.line(&format!("moduli {}", d.dim_moduli));
            out.json(json!({ "dim": v.to_string(), "rep_q": d.dim_rep_q, "rep_full": d.dim_rep_full, "moduli": d.dim_moduli }));
        }
        Command::HnTypes => {
            let v = dim_arg(cli)?;
            let st = StabilityEngine::new(ext, ctx.gamma.as_ref())?;
            let types = st.enumerate_hn_types(&v)?;
            let names: Vec<String> = types.iter().map(|h| h.to_string()).collect();
            names.iter().for_each(|n| out.line(n));
            out.json(json!({ "dim": v.to_string(), "types": names }));
        }
        Command::Semistable => {
            let v = dim_arg(cli)?;
            let st = StabilityEngine::new(ext, ctx.gamma.as_ref())?;
            let ss = st.is_semistable_type(&v)?;
            let stable_eq = if ss { Some(st.stable_equals_semistable(&v)?) } else { None };
            out.line(&ss.to_string());
            out.json(json!({ "dim": v.to_string(), "semistable": ss, "stable_equals_semistable": stable_eq }));
        }
        Command::Codim { hn } => {
            let types: Vec<HNType> = match hn {
                Some(h) => vec![HNType::parse(h)?],
                None => {
                    let v = dim_arg(cli)?;
                    let st = StabilityEngine::new(ext, ctx.gamma.as_ref())?;
                    st.enumerate_hn_types(&v)?.iter().cloned().collect()
                }
            };
            let mut rows = Vec::new();
            for h in &types {
                ext.check_vector(h.weight())?;
                let c = hn_stratum_codim(ext, h);
                if hn.is_some() {
                    out.line(&c.to_string());
                } else {
                    out.line(&format!("{h}\t{c}"));
                }
                rows.push(json!({ "type": h.to_string(), "codim": c }));
            }
            out.json(json!({ "strata": rows }));
        }
        Command::Motive { kind } => {
            let v = dim_arg(cli)?;
            let st = StabilityEngine::new(ext, ctx.gamma.as_ref())?;
            let me = MotiveEngine::new(&st, ctx.source(cli)?)?;
            let m = match kind {
                MotiveKind::RepFull => me.motive_rep_full(&v)?,
                MotiveKind::Sst => me.motive_sst(&v)?,
            };
            let semistable = st.is_semistable_type(&v)?;
            out.line(&m.to_string());
            if *kind == MotiveKind::Sst && !semistable {
                out.note(&format!("{v} is not a semistable type; the motive is 0 by convention"));
            }
            let over_pg = m.checked_div(&class_pg(&v))?;
            out.json(json!({
                "dim": v.to_string(),
                "kind": match kind { MotiveKind::RepFull => "rep-full", MotiveKind::Sst => "sst" },
                "motive": motive_json(&m),
                "over_pg": motive_json(&over_pg),
                "semistable": semistable,
            }));
        }
        Command::Poincare => {
            let v = dim_arg(cli)?;
            let st = StabilityEngine::new(ext, ctx.gamma.as_ref())?;
            let me = MotiveEngine::new(&st, ctx.source(cli)?)?;
            let p = me.poincare_polynomial(&v)?;
            out.line(&p.polynomial.to_string());
            out.json(json!({
                "dim": v.to_string(),
                "dim_moduli": p.dim_moduli,
                "poincare": poly_json(&p.polynomial),
                "text": p.polynomial.to_string(),
            }));
        }
        Command::Count { prime } => {
            let v = dim_arg(cli)?;
            let field = PrimeField::new(*prime)?;
            let n = count_rep_full_points(ext, &v, field, ctx.budget)?;
            out.line(&n.to_string());
            out.json(json!({ "dim": v.to_string(), "prime": prime, "full_points": n.to_string() }));
        }
        Command::Census { prime } => {
            let v = dim_arg(cli)?;
            let field = PrimeField::new(*prime)?;
            let st = StabilityEngine::new(ext, ctx.gamma.as_ref())?;
            let me = MotiveEngine::new(&st, ctx.source(cli)?)?;
            let r = stratum_census(&me, &v, field, ctx.budget)?;
            let mut rows = Vec::new();
            for l in &r.lines {
                let status = if l.matches() { "ok" } else { "MISMATCH" };
                out.line(&format!("{}\t{}\t{}\t{status}", l.hn, l.observed, l.predicted));
                rows.push(json!({
                    "type": l.hn.to_string(),
                    "observed": l.observed.to_string(),
                    "predicted": l.predicted.to_string(),
                    "ok": l.matches(),
                }));
            }
            let c = &r.counts;
            out.line(&format!("full\t{}\t{}", c.full, r.full_predicted));
            out.line(&format!("king_semistable\t{}", c.king_semistable));
            out.line(&format!("king_stable\t{}", c.king_stable));
            out.json(json!({
                "dim": v.to_string(),
                "prime": prime,
                "strata": rows,
                "full": c.full.to_string(),
                "full_predicted": r.full_predicted.to_string(),
                "king_semistable": c.king_semistable.to_string(),
                "king_stable": c.king_stable.to_string(),
                "king_hn_disagreements": c.king_hn_disagreements.to_string(),
                "surjectivity_hn_disagreements": c.surjectivity_hn_disagreements.to_string(),
                "all_match": r.all_match(),
            }));
            if !r.all_match() {
                return Err(AssumptionFailed(format!("census at p = {prime} disagrees with the predicted classes")).into());
            }
        }
        Command::Check { prime } => {
            let report = check::run_suite(&ctx.ext, &ctx.cfg, ctx.gamma.as_ref(), cli.dim.as_deref(), *prime, ctx.seed, ctx.budget)?;
            let mut rows = Vec::new();
            for c in &report {
                out.line(&format!("{} {}: {}", if c.ok { "ok" } else { "FAIL" }, c.name, c.detail));
                rows.push(json!({ "name": c.name, "ok": c.ok, "detail": c.detail }));
            }
            let failed = report.iter().filter(|c| !c.ok).count();
            out.json(json!({ "checks": rows, "failed": failed }));
            if failed > 0 {
                return Err(AssumptionFailed(format!("{failed} checks failed")).into());
            }
        }
        Command::SiEval { prime, name, weights, trials } => {
            let v = dim_arg(cli)?;
            let field = PrimeField::new(*prime)?;
            let mut sis: Vec<BlockDetSI> = Family::from_dim(&v).map(|f| f.functions()).unwrap_or_default();
            sis.extend(ctx.cfg.semi_invariants()?.into_iter().filter(|s| s.dim == v));
            if let Some(n) = name {
                sis.retain(|s| &s.name == n);
            }
            if sis.is_empty() {
                bail!(qmod::Error::Parse(format!("no semi-invariant for {v}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let point = random_full_point(ext, &v, field, &mut rng, 100)?
                .ok_or_else(|| anyhow!(qmod::Error::Assumption(format!("no full point of {v} found over F_{prime}"))))?;
            let mut rows = Vec::new();
            for si in &sis {
                let val = evaluate_si(si, ext, &point, field)?;
                let mut row = json!({ "name": si.name, "value": val });
                let mut text = format!("{}\t{val}", si.name);
                if *weights {
                    let w = verify_weight(si, ext, *prime, *trials, ctx.seed)?;
                    text.push_str(&format!("\t{w}"));
                    row["weight"] = json!({ "inf": w.w_inf, "vertices": w.w });
                }
                out.line(&text);
                rows.push(row);
            }
            let mut doc = json!({ "dim": v.to_string(), "prime": prime, "seed": ctx.seed, "values": rows });
            if let Some(f) = Family::from_dim(&v).filter(|_| name.is_none()) {
                match quotient_coords(ext, &point, f, field) {
                    Ok(c) => {
                        let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                        out.line(&format!("coords\t({})", s.join(" : ")));
                        doc["coords"] = json!(c);
                    }
                    Err(_) => {
                        out.line("coords\tundefined");
                        doc["coords"] = Value::Null;
                    }
                }
            }
            out.json(doc);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let mut out = Out::new(cli.format == Format::Json);
    let result = run(&cli, &mut out);
    out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
