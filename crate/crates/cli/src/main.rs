//! Experiment driver: one experiment per invocation, reproducible from
//! (config, seed), reports as CSV or JSON.

mod config;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use cubesense_core::fixed_noise::var_fixed;
use cubesense_core::function::BooleanFunction;
use cubesense_core::influence::influence_profile;
use cubesense_core::majority::{
    correlation_with_majority, lambda, stability_deficit, LambdaMode, WeightedMajority,
};
use cubesense_core::noise::{gauge_phi, var_noise, NoiseModel};
use cubesense_core::percolation::{
    build_grid, dynamical_replicas, estimate_crossing, estimate_majority_correlation,
    estimate_noise_sensitivity, exact_crossing, EdgeSubset,
};
use cubesense_core::spectrum::Spectrum;
use cubesense_core::table_io;
use cubesense_core::walk::{mixing_time, tv_distance, walk_evolve, walk_start};
use cubesense_core::Error;

use config::{build_family, load_config, load_weights, parse_grid, parse_noise};
use report::{Cell, Format, Report};

/// Fixed default seed so bare invocations are reproducible.
const DEFAULT_SEED: u64 = 24301;

#[derive(Parser)]
#[command(name = "cubesense", version, about = "Noise sensitivity experiments on Boolean functions")]
struct Cli {
    /// 64-bit seed for every sampler (defaults to a fixed constant).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv (default) or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker thread count; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// key=value file supplying defaults for the subcommand parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Truth table and Fourier-Walsh spectrum of a function.
    Spectrum {
        #[arg(long)]
        family: Option<String>,
        /// Truth-table file as an alternative to --family.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Per-variable influences, aggregates and level weights.
    Influence {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Exact noise variance under Bernoulli or fixed-size noise.
    Noise {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Noise model, e.g. '{bernoulli: 0.1}' or '{fixed: 12}'.
        #[arg(long)]
        noise: Option<String>,
        /// Bernoulli rates to sweep, e.g. 0.05,0.1,0.2.
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Exact sensitivity gauge phi with its variance sandwich.
    Gauge {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Correlation with majority on a subset, or the exact/heuristic maximum.
    Majority {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Subset bitmask for M_K; defaults to all variables.
        #[arg(long)]
        k_mask: Option<u64>,
        /// Compute the maximal correlation instead: exact | heuristic.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Stability deficit P[M triangle N_eps M] of a weighted majority.
    Stability {
        /// Weight file, one real per line (threshold 0).
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Uniform weights on this many variables.
        #[arg(long)]
        uniform: Option<usize>,
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Emit a family member in the truth-table file format.
    Family {
        #[arg(long)]
        family: Option<String>,
    },
    /// Bond-percolation experiments on the (m+1) x m rectangle.
    Perc {
        #[command(subcommand)]
        cmd: PercCommand,
    },
    /// Lazy-walk mixing curve and mixing time.
    Walk {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        /// Cap on emitted t,tv rows.
        #[arg(long)]
        max_rows: Option<u64>,
    },
}

#[derive(Subcommand)]
enum PercCommand {
    /// Crossing probability (Monte Carlo, or exact enumeration with --exact).
    Crossing {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        exact: bool,
    },
    /// Nested noise-sensitivity experiment.
    Sensitivity {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        outer: Option<u64>,
        #[arg(long)]
        inner: Option<u64>,
        #[arg(long)]
        delta_grid: Option<String>,
    },
    /// Correlation of the crossing with majority over an edge subset.
    Majcorr {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        samples: Option<u64>,
        /// Explicit comma-separated edge indices; default is the right half.
        #[arg(long)]
        edges: Option<String>,
    },
    /// Dynamical percolation switching statistics.
    Dynamical {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Resource { .. } => 3,
                Error::Io { .. } => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

struct Ctx {
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    cfg: BTreeMap<String, String>,
}

impl Ctx {
    /// Flag wins, then config file, then the built-in default.
    fn resolve<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str, default: Option<T>) -> Result<T, Error>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v.clone());
        }
        if let Some(raw) = self.cfg.get(key) {
            return raw
                .parse::<T>()
                .map_err(|e| Error::parse(format!("config key {key}: {e}")));
        }
        default.ok_or_else(|| Error::contract(format!("missing required parameter `{key}`")))
    }

    fn resolve_opt<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> Result<Option<T>, Error>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        match self.cfg.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::parse(format!("config key {key}: {e}"))),
            None => Ok(None),
        }
    }

    fn emit(&self, report: &Report) -> Result<(), Error> {
        report
            .write(self.format, self.out.as_deref())
            .map_err(|e| {
                Error::io(
                    self.out
                        .as_ref()
                        .map(|p| p.display().to_string())
                        .unwrap_or_else(|| "<stdout>".into()),
                    e,
                )
            })
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let ctx = Ctx {
        seed: cli
            .seed
            .or_else(|| cfg.get("seed").and_then(|s| s.parse().ok()))
            .unwrap_or(DEFAULT_SEED),
        format: match &cli.format {
            Some(f) => f.parse::<Format>().map_err(Error::Parse)?,
            None => match cfg.get("format") {
                Some(f) => f.parse::<Format>().map_err(Error::Parse)?,
                None => Format::Csv,
            },
        },
        out: cli.out.clone(),
        cfg,
    };

    if let Some(workers) = cli.workers.or_else(|| ctx.cfg.get("workers").and_then(|w| w.parse().ok())) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::contract(format!("worker pool: {e}")))?;
    }

    match cli.command {
        Command::Spectrum { family, input } => cmd_spectrum(&ctx, family, input),
        Command::Influence { family, input } => cmd_influence(&ctx, family, input),
        Command::Noise {
            family,
            input,
            noise,
            eps_grid,
        } => cmd_noise(&ctx, family, input, noise, eps_grid),
        Command::Gauge {
            family,
            input,
            eps_grid,
        } => cmd_gauge(&ctx, family, input, eps_grid),
        Command::Majority {
            family,
            input,
            k_mask,
            lambda,
        } => cmd_majority(&ctx, family, input, k_mask, lambda),
        Command::Stability {
            weights,
            uniform,
            eps_grid,
            samples,
        } => cmd_stability(&ctx, weights, uniform, eps_grid, samples),
        Command::Family { family } => cmd_family(&ctx, family),
        Command::Perc { cmd } => match cmd {
            PercCommand::Crossing { m, samples, exact } => cmd_crossing(&ctx, m, samples, exact),
            PercCommand::Sensitivity {
                m,
                eps,
                outer,
                inner,
                delta_grid,
            } => cmd_sensitivity(&ctx, m, eps, outer, inner, delta_grid),
            PercCommand::Majcorr { m, samples, edges } => cmd_majcorr(&ctx, m, samples, edges),
            PercCommand::Dynamical {
                m,
                duration,
                rate,
                replicas,
            } => cmd_dynamical(&ctx, m, duration, rate, replicas),
        },
        Command::Walk {
            family,
            input,
            eps,
            max_rows,
        } => cmd_walk(&ctx, family, input, eps, max_rows),
    }
}

/// Resolves the analyzed function from --family or --input (or config keys).
fn load_function(
    ctx: &Ctx,
    family: Option<String>,
    input: Option<PathBuf>,
) -> Result<(BooleanFunction, String), Error> {
    let family = ctx.resolve_opt(&family, "family")?;
    let input = ctx.resolve_opt(&input, "input")?;
    match (family, input) {
        (Some(spec), None) => {
            let f = build_family(&spec)?;
            Ok((f, spec))
        }
        (None, Some(path)) => {
            let f = table_io::read_function(Path::new(&path))?;
            Ok((f, path.display().to_string()))
        }
        (Some(_), Some(_)) => Err(Error::contract("give either --family or --input, not both")),
        (None, None) => Err(Error::contract("one of --family or --input is required")),
    }
}

fn cmd_spectrum(ctx: &Ctx, family: Option<String>, input: Option<PathBuf>) -> Result<(), Error> {
    let (f, source) = load_function(ctx, family, input)?;
    let sp = Spectrum::transform(&f)?;
    match &ctx.out {
        Some(base) => {
            let table_path = base.with_extension("table");
            let spectrum_path = base.with_extension("spectrum");
            table_io::write_function(&table_path, &f)?;
            table_io::write_spectrum(&spectrum_path, &sp, f.kind())?;
            eprintln!(
                "wrote {} and {} (source: {source})",
                table_path.display(),
                spectrum_path.display()
            );
        }
        None => {
            print!("{}", table_io::render_function(&f));
            print!("{}", table_io::render_spectrum(&sp, f.kind()));
        }
    }
    Ok(())
}

fn cmd_influence(ctx: &Ctx, family: Option<String>, input: Option<PathBuf>) -> Result<(), Error> {
    let (f, source) = load_function(ctx, family, input)?;
    let profile = influence_profile(&f)?;
    let mut r = Report::new("influence", ctx.seed);
    r.config("source", &source).config("n", f.n());
    r.note("total_i", report::format_float(profile.total_i));
    r.note("total_ii", report::format_float(profile.total_ii));
    r.note("j_weight", report::format_float(profile.j_weight));
    if let Some(a) = profile.alpha {
        r.note("alpha", report::format_float(a));
    }
    if let Some(b) = profile.beta {
        r.note("beta", report::format_float(b));
    }
    r.columns = vec!["index", "influence", "level_weight"];
    for k in 0..=f.n() {
        r.rows.push(vec![
            Cell::UInt(k as u64),
            Cell::Float(profile.per_var.get(k).copied().unwrap_or(f64::NAN)),
            Cell::Float(profile.level_weights[k]),
        ]);
    }
    ctx.emit(&r)
}

fn cmd_noise(
    ctx: &Ctx,
    family: Option<String>,
    input: Option<PathBuf>,
    noise: Option<String>,
    eps_grid: Option<String>,
) -> Result<(), Error> {
    let (f, source) = load_function(ctx, family, input)?;
    let sp = Spectrum::transform(&f)?;
    let mut r = Report::new("noise", ctx.seed);
    r.config("source", &source).config("n", f.n());
    r.columns = vec!["model", "param", "variance"];

    let noise = ctx.resolve_opt(&noise, "noise")?;
    let eps_grid = ctx.resolve_opt(&eps_grid, "eps_grid")?;
    let mut emitted = false;
    if let Some(spec) = noise {
        match parse_noise(&spec)? {
            NoiseModel::Bernoulli(eps) => r.rows.push(vec![
                Cell::Text("bernoulli".into()),
                Cell::Float(eps),
                Cell::Float(var_noise(&sp, eps)?),
            ]),
            NoiseModel::FixedSize(q) => r.rows.push(vec![
                Cell::Text("fixed".into()),
                Cell::Float(q as f64),
                Cell::Float(var_fixed(&sp, q)?),
            ]),
        }
        emitted = true;
    }
    if let Some(grid) = eps_grid {
        for eps in parse_grid(&grid)? {
            r.rows.push(vec![
                Cell::Text("bernoulli".into()),
                Cell::Float(eps),
                Cell::Float(var_noise(&sp, eps)?),
            ]);
        }
        emitted = true;
    }
    if !emitted {
        return Err(Error::contract("give --noise or --eps-grid"));
    }
    ctx.emit(&r)
}

fn cmd_gauge(
    ctx: &Ctx,
    family: Option<String>,
    input: Option<PathBuf>,
    eps_grid: Option<String>,
) -> Result<(), Error> {
    let (f, source) = load_function(ctx, family, input)?;
    let grid = parse_grid(&ctx.resolve(&eps_grid, "eps_grid", Some("0.05,0.1,0.2,0.3".into()))?)?;
    let mut r = Report::new("gauge", ctx.seed);
    r.config("source", &source).config("n", f.n());
    r.columns = vec!["eps", "phi", "var_noise", "half_var", "var_cuberoot"];
    for eps in grid {
        let g = gauge_phi(&f, eps)?;
        r.rows.push(vec![
            Cell::Float(eps),
            Cell::Float(g.phi),
            Cell::Float(g.var_noise),
            Cell::Float(0.5 * g.var_noise),
            Cell::Float(g.var_noise.powf(1.0 / 3.0)),
        ]);
    }
    ctx.emit(&r)
}

fn cmd_majority(
    ctx: &Ctx,
    family: Option<String>,
    input: Option<PathBuf>,
    k_mask: Option<u64>,
    lambda_mode: Option<String>,
) -> Result<(), Error> {
    let (f, source) = load_function(ctx, family, input)?;
    let mut r = Report::new("majority", ctx.seed);
    r.config("source", &source).config("n", f.n());
    match ctx.resolve_opt(&lambda_mode, "lambda")? {
        Some(mode) => {
            let mode = match mode.as_str() {
                "exact" => LambdaMode::Exact,
                "heuristic" => LambdaMode::Heuristic,
                other => {
                    return Err(Error::parse(format!(
                        "lambda mode `{other}` (expected exact or heuristic)"
                    )))
                }
            };
            let value = lambda(&f, mode)?;
            r.columns = vec!["mode", "lambda"];
            r.rows.push(vec![
                Cell::Text(format!("{mode:?}").to_lowercase()),
                Cell::Float(value),
            ]);
        }
        None => {
            let mask = ctx.resolve(&k_mask, "k_mask", Some((1u64 << f.n()) - 1))?;
            let rep = correlation_with_majority(&f, mask)?;
            if let Some(bound) = rep.bound_rhs {
                // Diagnostic only: the influence bound holds up to an
                // unspecified universal constant, so the ratio is reported
                // and never asserted.
                let profile = influence_profile(&f)?;
                let i_subset: f64 = (0..f.n())
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| profile.per_var[k])
                    .sum();
                r.note("i_subset", report::format_float(i_subset));
                r.note("i_bound_ratio", report::format_float(i_subset / bound));
            }
            r.columns = vec!["k_mask", "value", "bound_rhs"];
            r.rows.push(vec![
                Cell::UInt(rep.subset),
                Cell::Float(rep.value),
                Cell::Float(rep.bound_rhs.unwrap_or(f64::NAN)),
            ]);
        }
    }
    ctx.emit(&r)
}

fn cmd_stability(
    ctx: &Ctx,
    weights: Option<PathBuf>,
    uniform: Option<usize>,
    eps_grid: Option<String>,
    samples: Option<u64>,
) -> Result<(), Error> {
    let weights = ctx.resolve_opt(&weights, "weights")?;
    let uniform = ctx.resolve_opt(&uniform, "uniform")?;
    let wm = match (weights, uniform) {
        (Some(path), None) => load_weights(Path::new(&path))?,
        (None, Some(n)) => WeightedMajority::uniform(n)?,
        _ => return Err(Error::contract("give exactly one of --weights or --uniform")),
    };
    let grid = parse_grid(&ctx.resolve(&eps_grid, "eps_grid", Some("0.01,0.04,0.16".into()))?)?;
    let samples = ctx.resolve(&samples, "samples", Some(100_000))?;

    let mut r = Report::new("stability", ctx.seed);
    r.config("n", wm.n()).config("samples", samples);
    r.columns = vec!["n", "eps", "deficit", "stderr", "samples", "exact"];
    for eps in grid {
        let est = stability_deficit(&wm, eps, samples, ctx.seed)?;
        r.rows.push(vec![
            Cell::UInt(wm.n() as u64),
            Cell::Float(eps),
            Cell::Float(est.value),
            Cell::Float(est.std_error),
            Cell::UInt(est.samples),
            Cell::UInt(u64::from(est.samples == 0)),
        ]);
    }
    ctx.emit(&r)
}

fn cmd_family(ctx: &Ctx, family: Option<String>) -> Result<(), Error> {
    let spec = ctx
        .resolve_opt(&family, "family")?
        .ok_or_else(|| Error::contract("--family is required"))?;
    let f = build_family(&spec)?;
    match &ctx.out {
        Some(path) => table_io::write_function(path, &f)?,
        None => print!("{}", table_io::render_function(&f)),
    }
    Ok(())
}

fn cmd_crossing(
    ctx: &Ctx,
    m: Option<usize>,
    samples: Option<u64>,
    exact: bool,
) -> Result<(), Error> {
    let m = ctx.resolve(&m, "m", None)?;
    let grid = build_grid(m)?;
    let mut r = Report::new("perc crossing", ctx.seed);
    r.config("m", m);
    r.columns = vec!["m", "estimate", "stderr", "samples", "exact"];
    let exact = exact || ctx.cfg.get("exact").map(|v| v == "true").unwrap_or(false);
    if exact {
        let p = exact_crossing(&grid)?;
        r.config("exact", true);
        r.rows.push(vec![
            Cell::UInt(m as u64),
            Cell::Float(p),
            Cell::Float(0.0),
            Cell::UInt(0),
            Cell::UInt(1),
        ]);
    } else {
        let samples = ctx.resolve(&samples, "samples", Some(10_000))?;
        r.config("samples", samples);
        let est = estimate_crossing(&grid, samples, ctx.seed)?;
        r.rows.push(vec![
            Cell::UInt(m as u64),
            Cell::Float(est.value),
            Cell::Float(est.std_error),
            Cell::UInt(est.samples),
            Cell::UInt(0),
        ]);
    }
    ctx.emit(&r)
}

fn cmd_sensitivity(
    ctx: &Ctx,
    m: Option<usize>,
    eps: Option<f64>,
    outer: Option<u64>,
    inner: Option<u64>,
    delta_grid: Option<String>,
) -> Result<(), Error> {
    let m = ctx.resolve(&m, "m", None)?;
    let eps = ctx.resolve(&eps, "eps", None)?;
    let outer = ctx.resolve(&outer, "outer", Some(2_000))?;
    let inner = ctx.resolve(&inner, "inner", Some(200))?;
    let grid = parse_grid(&ctx.resolve(&delta_grid, "delta_grid", Some("0.05,0.1,0.2".into()))?)?;
    let g = build_grid(m)?;
    let rep = estimate_noise_sensitivity(&g, eps, &grid, outer, inner, ctx.seed)?;

    let mut r = Report::new("perc sensitivity", ctx.seed);
    r.config("m", m)
        .config("eps", eps)
        .config("outer", outer)
        .config("inner", inner);
    r.note("p_bar", report::format_float(rep.p_bar));
    r.note("covariance", report::format_float(rep.covariance));
    r.note("cov_stderr", report::format_float(rep.covariance_std_error));
    r.note("switch_prob", report::format_float(rep.switch_prob));
    r.note("inner_sigma", report::format_float(rep.inner_sigma));
    r.note(
        "bias",
        format!(
            "gamma_hat inflated for delta below {}",
            report::format_float(3.0 * rep.inner_sigma)
        ),
    );
    r.columns = vec![
        "m",
        "eps",
        "delta",
        "gamma_hat",
        "covariance",
        "cov_stderr",
        "outer",
        "inner",
    ];
    for (delta, frac) in &rep.gamma_hat {
        r.rows.push(vec![
            Cell::UInt(m as u64),
            Cell::Float(eps),
            Cell::Float(*delta),
            Cell::Float(*frac),
            Cell::Float(rep.covariance),
            Cell::Float(rep.covariance_std_error),
            Cell::UInt(outer),
            Cell::UInt(inner),
        ]);
    }
    ctx.emit(&r)
}

fn cmd_majcorr(
    ctx: &Ctx,
    m: Option<usize>,
    samples: Option<u64>,
    edges: Option<String>,
) -> Result<(), Error> {
    let m = ctx.resolve(&m, "m", None)?;
    let samples = ctx.resolve(&samples, "samples", Some(50_000))?;
    let g = build_grid(m)?;
    let edges = ctx.resolve_opt(&edges, "edges")?;
    let (subset, label) = match edges {
        Some(list) => {
            let idx: Vec<usize> = list
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::parse(format!("bad edge index `{tok}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
            (EdgeSubset::Explicit(idx), "explicit".to_string())
        }
        None => (EdgeSubset::RightHalf, "right-half".to_string()),
    };
    let k_size = match &subset {
        EdgeSubset::RightHalf => g.right_half_edges().len(),
        EdgeSubset::Explicit(v) => v.len(),
    };
    let est = estimate_majority_correlation(&g, &subset, samples, ctx.seed)?;

    let mut r = Report::new("perc majcorr", ctx.seed);
    r.config("m", m).config("samples", samples).config("subset", &label);
    r.columns = vec!["m", "k_size", "estimate", "stderr", "samples"];
    r.rows.push(vec![
        Cell::UInt(m as u64),
        Cell::UInt(k_size as u64),
        Cell::Float(est.value),
        Cell::Float(est.std_error),
        Cell::UInt(est.samples),
    ]);
    ctx.emit(&r)
}

fn cmd_dynamical(
    ctx: &Ctx,
    m: Option<usize>,
    duration: Option<f64>,
    rate: Option<f64>,
    replicas: Option<u64>,
) -> Result<(), Error> {
    let m = ctx.resolve(&m, "m", None)?;
    let duration = ctx.resolve(&duration, "duration", Some(1.0))?;
    let rate = ctx.resolve(&rate, "rate", Some(1.0))?;
    let replicas = ctx.resolve(&replicas, "replicas", Some(200))?;
    let g = build_grid(m)?;
    let records = dynamical_replicas(&g, duration, rate, replicas, ctx.seed)?;

    let counts: Vec<f64> = records.iter().map(|r| r.switch_times.len() as f64).collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / counts.len() as f64;

    let mut r = Report::new("perc dynamical", ctx.seed);
    r.config("m", m)
        .config("duration", duration)
        .config("rate", rate)
        .config("replicas", replicas);
    r.note("mean_switches", report::format_float(mean));
    r.note(
        "stderr",
        report::format_float((var / counts.len() as f64).sqrt()),
    );
    r.columns = vec!["m", "replica", "switch_count", "initial_state", "final_state"];
    for (i, rec) in records.iter().enumerate() {
        r.rows.push(vec![
            Cell::UInt(m as u64),
            Cell::UInt(i as u64),
            Cell::UInt(rec.switch_times.len() as u64),
            Cell::UInt(u64::from(rec.initial_state)),
            Cell::UInt(u64::from(rec.final_state)),
        ]);
    }
    ctx.emit(&r)
}

fn cmd_walk(
    ctx: &Ctx,
    family: Option<String>,
    input: Option<PathBuf>,
    eps: Option<f64>,
    max_rows: Option<u64>,
) -> Result<(), Error> {
    let (f, source) = load_function(ctx, family, input)?;
    let eps = ctx.resolve(&eps, "eps", Some(0.1))?;
    let max_rows = ctx.resolve(&max_rows, "max_rows", Some(512))?;
    let mixing = mixing_time(&f, eps)?;
    let start = walk_start(&f)?;

    let mut r = Report::new("walk", ctx.seed);
    r.config("source", &source)
        .config("n", f.n())
        .config("eps", eps);
    r.note("mixing_steps", mixing.steps);
    r.note("l2_bound_steps", mixing.l2_bound_steps);
    r.columns = vec!["t", "tv"];
    let last = mixing.steps.min(max_rows);
    for t in 0..=last {
        let tv = tv_distance(&walk_evolve(&start, t));
        r.rows.push(vec![Cell::UInt(t), Cell::Float(tv)]);
    }
    ctx.emit(&r)
}
