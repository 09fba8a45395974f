//! Command-line runner: stratification, resolution trees, Lojasiewicz
//! fits, Hardy-quotient sweeps, and sublevel growth profiles, each emitted
//! as a reproducible JSON report.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hardy_forge_core::blowup::resolve;
use hardy_forge_core::field::Zeta;
use hardy_forge_core::fixtures;
use hardy_forge_core::growth::{
    build_profile, doubling_check, eta_derivative_check, fit_differential_inequality,
};
use hardy_forge_core::hardy::{estimate_constant, FamilySpec, InequalityKind};
use hardy_forge_core::loja::{
    fit_distance_exponent, fit_gradient_exponent, verify_conic_refinement,
};
use hardy_forge_core::poly::{parse, Polynomial, RationalPoint};
use hardy_forge_core::strata::{class_gh_check, stratify};
use hardy_forge_core::Error;

use report::Report;

#[derive(Parser)]
#[command(
    name = "hardy-forge",
    version,
    about = "Singular-variety toolkit: blow-up resolution, multiplicity strata, \
             Hardy-quotient sweeps, Lojasiewicz fits, sublevel growth"
)]
struct Cli {
    /// Upper bound on worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Serialize)]
struct PolyArgs {
    /// Polynomial in the text grammar (variables x1..xn, + - * ^, rationals).
    #[arg(long, conflicts_with = "fixture", requires = "nvars")]
    poly: Option<String>,

    /// Number of variables for --poly.
    #[arg(long)]
    nvars: Option<usize>,

    /// Name from the built-in fixture registry (see `fixtures`).
    #[arg(long)]
    fixture: Option<String>,
}

impl PolyArgs {
    fn resolve(&self) -> anyhow::Result<Polynomial> {
        match (&self.poly, &self.fixture) {
            (Some(text), None) => {
                let nvars = self.nvars.context("--poly requires --nvars")?;
                Ok(parse(text, nvars)?)
            }
            (None, Some(name)) => {
                fixtures::get(name).with_context(|| format!("unknown fixture '{name}'"))
            }
            _ => bail!("exactly one of --poly or --fixture is required"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in fixture polynomials.
    Fixtures,

    /// Sample the multiplicity strata and run the admissibility check.
    Stratify(StratifyArgs),

    /// Reduce the multiplicity at a point by blow-ups and dump the tree.
    Resolve(ResolveArgs),

    /// Fit Lojasiewicz gradient and distance exponents.
    Loja(LojaArgs),

    /// Sweep Hardy-type quotients over a random test-function family.
    Hardy(HardyArgs),

    /// Profile the growth of localized integrals over sublevel sets.
    Growth(GrowthArgs),
}

#[derive(Args, Serialize)]
struct StratifyArgs {
    #[command(flatten)]
    poly: PolyArgs,

    /// Multi-start budget for the witness search.
    #[arg(long, default_value_t = 256)]
    sample_budget: usize,

    /// Budget for the admissibility slice search.
    #[arg(long, default_value_t = 32)]
    gh_budget: usize,

    #[serde(skip)]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ResolveArgs {
    #[command(flatten)]
    poly: PolyArgs,

    /// Base point coordinates (comma-separated rationals), default origin.
    #[arg(long, value_delimiter = ',')]
    point: Option<Vec<String>>,

    /// Node budget for the tree.
    #[arg(long, default_value_t = 512)]
    max_nodes: usize,

    /// Print the indented trace to stdout.
    #[arg(long, default_value_t = true)]
    trace: bool,

    #[serde(skip)]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct LojaArgs {
    #[command(flatten)]
    poly: PolyArgs,

    #[arg(long, default_value_t = 1200)]
    samples: usize,

    /// Samples for the (slower) distance fit.
    #[arg(long, default_value_t = 240)]
    distance_samples: usize,

    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Half-width of the centered sampling box.
    #[arg(long, default_value_t = 2.0)]
    box_half_width: f64,

    #[serde(skip)]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct HardyArgs {
    #[command(flatten)]
    poly: PolyArgs,

    /// Inequality: ghi1, ghi2, weighted, inhom, laplacian.
    #[arg(long, default_value = "ghi1")]
    ineq: String,

    /// Sobolev order for ghi1/ghi2 denominators.
    #[arg(long, default_value_t = 1)]
    h: u32,

    /// Weight exponent for the weighted inequality.
    #[arg(long, default_value_t = 0.0)]
    s: f64,

    #[arg(long, default_value_t = 64)]
    trials: usize,

    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Dyadic refinement depth of the quadrature grids.
    #[arg(long)]
    depth: Option<u32>,

    #[serde(skip)]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GrowthArgs {
    #[command(flatten)]
    poly: PolyArgs,

    /// Weight field: one, exp1 (e^{x1}), sin1 (sin x1).
    #[arg(long, default_value = "one")]
    zeta: String,

    #[arg(long, default_value_t = 0.1)]
    eta_min: f64,

    #[arg(long, default_value_t = 0.8)]
    eta_max: f64,

    /// Lower localization cutoff (default eta_min / 8).
    #[arg(long)]
    eps: Option<f64>,

    #[arg(long, default_value_t = 8)]
    depth: u32,

    /// Half-width of the centered integration box.
    #[arg(long, default_value_t = 1.2)]
    box_half_width: f64,

    #[serde(skip)]
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit code for malformed input.
const EXIT_PARSE: u8 = 2;
/// Exit code when a budget ran out and the result is partial.
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let parse_like = err.downcast_ref::<Error>().map_or(false, |e| {
                matches!(e, Error::Parse { .. } | Error::VarOutOfRange { .. })
            }) || err.to_string().contains("unknown fixture")
                || err.to_string().contains("--poly")
                || err.to_string().contains("--nvars");
            if parse_like {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Fixtures => {
            for f in fixtures::FIXTURES {
                println!("{:<12} {} vars  {:<24} {}", f.name, f.nvars, f.text, f.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Stratify(args) => cmd_stratify(args),
        Command::Resolve(args) => cmd_resolve(args),
        Command::Loja(args) => cmd_loja(args),
        Command::Hardy(args) => cmd_hardy(args),
        Command::Growth(args) => cmd_growth(args),
    }
}

fn cmd_stratify(args: StratifyArgs) -> anyhow::Result<ExitCode> {
    let p = args.poly.resolve()?;

    #[derive(Serialize)]
    struct StratifyResult {
        stratification: hardy_forge_core::strata::Stratification,
        admissibility: hardy_forge_core::strata::GhReport,
    }

    let stratification = stratify(&p, args.sample_budget);
    let admissibility = class_gh_check(&p, &stratification, args.gh_budget);
    let report = Report::new(
        "stratify",
        &args,
        p.to_text(),
        p.nvars(),
        StratifyResult {
            stratification,
            admissibility,
        },
    );
    report.write(args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_resolve(args: ResolveArgs) -> anyhow::Result<ExitCode> {
    let p = args.poly.resolve()?;
    let point = match &args.point {
        None => RationalPoint::origin(p.nvars()),
        Some(coords) => {
            let mut parsed = Vec::new();
            for c in coords {
                parsed.push(
                    c.trim()
                        .parse::<hardy_forge_core::Rat>()
                        .map_err(|e| Error::Parse {
                            pos: 0,
                            msg: format!("bad coordinate '{c}': {e}"),
                        })?,
                );
            }
            RationalPoint(parsed)
        }
    };
    let tree = resolve(&p, &point, args.max_nodes)?;
    if args.trace {
        print!("{}", tree.render_trace());
    }
    let budget_exhausted = tree.budget_exhausted;
    let report = Report::new("resolve", &args, p.to_text(), p.nvars(), tree);
    report.write(args.out.as_deref())?;
    Ok(if budget_exhausted {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_loja(args: LojaArgs) -> anyhow::Result<ExitCode> {
    let p = args.poly.resolve()?;
    let bounds = vec![(-args.box_half_width, args.box_half_width); p.nvars()];

    #[derive(Serialize)]
    struct LojaResult {
        gradient: hardy_forge_core::loja::LojasiewiczFit,
        distance: hardy_forge_core::loja::LojasiewiczFit,
        conic: Option<hardy_forge_core::loja::ConicReport>,
    }

    let gradient = fit_gradient_exponent(&p, &bounds, args.samples, args.seed)?;
    let distance = fit_distance_exponent(&p, &bounds, args.distance_samples, args.seed)?;
    let conic = if p.is_homogeneous() {
        Some(verify_conic_refinement(&p, &bounds, args.samples, args.seed)?)
    } else {
        None
    };
    let report = Report::new(
        "loja",
        &args,
        p.to_text(),
        p.nvars(),
        LojaResult {
            gradient,
            distance,
            conic,
        },
    );
    report.write(args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_hardy(args: HardyArgs) -> anyhow::Result<ExitCode> {
    let p = args.poly.resolve()?;
    let kind = match args.ineq.as_str() {
        "ghi1" => InequalityKind::Ghi1 { h: args.h },
        "ghi2" => InequalityKind::Ghi2 { h: args.h },
        "weighted" => InequalityKind::Weighted { s: args.s },
        "inhom" => InequalityKind::Inhom,
        "laplacian" => InequalityKind::LaplacianRatio,
        other => bail!("unknown inequality '{other}'"),
    };
    let mut spec = FamilySpec::for_dim(p.nvars());
    if let Some(depth) = args.depth {
        spec.depth = depth;
    }

    #[derive(Serialize)]
    struct HardyResult {
        family: FamilySpec,
        report: hardy_forge_core::hardy::QuotientReport,
        budgets: Option<hardy_forge_core::hardy::DerivativeBudget>,
    }

    let quotients = estimate_constant(&p, kind, &spec, args.trials, args.seed)?;
    // Derivative budgets from the resolution tree at the origin, when the
    // origin is singular enough to resolve.
    let budgets = resolve(&p, &RationalPoint::origin(p.nvars()), 512)
        .ok()
        .and_then(|tree| hardy_forge_core::hardy::derivative_budget(&tree).ok());
    let report = Report::new(
        "hardy",
        &args,
        p.to_text(),
        p.nvars(),
        HardyResult {
            family: spec,
            report: quotients,
            budgets,
        },
    );
    report.write(args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_growth(args: GrowthArgs) -> anyhow::Result<ExitCode> {
    let p = args.poly.resolve()?;
    let zeta = match args.zeta.as_str() {
        "one" => Zeta::One,
        "exp1" => Zeta::ExpX1,
        "sin1" => Zeta::SinX1,
        other => bail!("unknown zeta '{other}'"),
    };
    let bounds = vec![(-args.box_half_width, args.box_half_width); p.nvars()];

    #[derive(Serialize)]
    struct GrowthResult {
        profile: hardy_forge_core::growth::GrowthProfile,
        identity_checks: Vec<hardy_forge_core::growth::EtaDerivativeCheck>,
        differential_fit: hardy_forge_core::growth::DifferentialFit,
        doubling: hardy_forge_core::growth::DoublingReport,
    }

    let profile = build_profile(
        &p,
        zeta,
        &bounds,
        args.depth,
        args.eta_min,
        args.eta_max,
        args.eps,
    )?;
    let interior = 1..profile.eta_grid.len().saturating_sub(1);
    let step = (interior.len() / 3).max(1);
    let identity_checks = interior
        .step_by(step)
        .map(|i| eta_derivative_check(&profile, i))
        .collect::<hardy_forge_core::Result<Vec<_>>>()?;
    let differential_fit = fit_differential_inequality(&profile)?;
    let doubling = doubling_check(&profile, None, None)?;
    let report = Report::new(
        "growth",
        &args,
        p.to_text(),
        p.nvars(),
        GrowthResult {
            profile,
            identity_checks,
            differential_fit,
            doubling,
        },
    );
    report.write(args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}
