//! oscimax: oscillatory-integral laboratory for maximal-in-time estimates
//! of the fractional Schrodinger evolution.

mod out;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use oscimax::geometry::{minkowski_dim_estimate, DirectionSet, PathSpec};
use oscimax::kernelcheck::{
    classify_region, ineq_constant_case, kernel_eval, seeded_samples, vdc_decay_fit, IneqMode,
    PhaseFamily, Region, young_hls_check, PSI_SQ_INTEGRAL,
};
use oscimax::maximal::{maximal_in_time, mixed_norm, AxisDomain, MeasureKind, MixedNormSpec, XDomain};
use oscimax::point::Point;
use oscimax::propagator::{evaluate, evaluate_oracle, EvalRequest};
use oscimax::scenarios::{
    run_scaling, DirectionMode, ScenarioId, ScenarioParams,
};
use oscimax::spectral::profile_from_json;

use out::{fmt_f64, CsvWriter, Manifest};

#[derive(Parser)]
#[command(
    name = "oscimax",
    version,
    about = "Numerical probes of maximal estimates for the fractional Schrodinger evolution",
    after_help = "Every run with --out writes <out>.manifest.json recording the resolved \
                  parameters and seed; re-running with --config <manifest> reproduces the CSV."
)]
struct Cli {
    /// Worker threads (fallback: OSCIMAX_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON parameter file (flat map or a manifest); command-line flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate S_t^m f at one space-time point
    Propagate(PropagateArgs),
    /// Mixed norm L^q_x L^inf_t (L^inf_theta) of the evolution along a path
    Maximal(MaximalArgs),
    /// Run a scenario ladder and fit its scaling exponent
    Scaling(ScalingArgs),
    /// Alias of `scaling --scenario sufficiency-probe`
    Sufficiency(ScalingArgs),
    /// Box-counting dimension of the r-Cantor set
    CantorDim(CantorArgs),
    /// Oscillatory decay-rate fits for the model phase families
    Vdc(VdcArgs),
    /// Kernel bound, symmetry and region-decay checks
    Kernel(KernelArgs),
    /// Young / HLS-type inequality sweep with random step functions
    Ineq(IneqArgs),
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct PropagateArgs {
    /// Profile JSON: inline string or a file path
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    /// Second coordinate; its presence selects dimension 2
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Also run the midpoint oracle with this many nodes
    #[arg(long)]
    oracle_n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct MaximalArgs {
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    m: Option<f64>,
    /// vertical | power:<kappa> | exp | line:singleton:<v> |
    /// line:interval:<a>:<b> | line:cantor:<r>:<k>
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    /// Spatial measure: a real alpha in (0,1], or "none" for Lebesgue
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    x_lo: Option<f64>,
    #[arg(long)]
    x_hi: Option<f64>,
    #[arg(long)]
    t_lo: Option<f64>,
    #[arg(long)]
    t_hi: Option<f64>,
    #[arg(long)]
    x_nodes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct ScalingArgs {
    /// tangential-row1|tangential-row2|tangential-row3|exp-tangential|
    /// fractal-lines-1d|fractal-lines-2d-low|fractal-lines-2d-high|
    /// alpha-fractal-remark|sufficiency-probe
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Band constant for the fractal-lines data
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k_min: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sufficiency probe: random profiles per rung
    #[arg(long)]
    trials: Option<usize>,
    /// Direction set of the fractal-lines family: cantor | zero | interval
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct CantorArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct VdcArgs {
    /// quadratic | monotone | fractional:<m>
    #[arg(long)]
    phase: Option<String>,
    /// log2 of the smallest lambda
    #[arg(long)]
    lambda_min: Option<u32>,
    /// log2 of the largest lambda
    #[arg(long)]
    lambda_max: Option<u32>,
    /// van der Corput order (defaults to the family's canonical k)
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct KernelArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Samples per lambda rung
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    m: Option<f64>,
    /// log2 of the smallest lambda
    #[arg(long)]
    lambda_min: Option<u32>,
    /// log2 of the largest lambda
    #[arg(long)]
    lambda_max: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct IneqArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// young | hls
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    /// Young interval endpoints
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    doublings: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parameter defaults loaded from --config: either a flat JSON map or a
/// manifest file (whose "params" object is used).
struct Cfg(Map<String, Value>);

impl Cfg {
    fn load(path: Option<&Path>) -> Result<Cfg, String> {
        let Some(path) = path else { return Ok(Cfg(Map::new())) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| format!("config is not JSON: {e}"))?;
        let map = match value {
            Value::Object(map) => {
                if let Some(Value::Object(params)) = map.get("params") {
                    params.clone()
                } else {
                    map
                }
            }
            _ => return Err("config must be a JSON object".into()),
        };
        Ok(Cfg(map))
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(Value::as_f64)
    }
    fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(Value::as_u64)
    }
    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).and_then(Value::as_str).map(str::to_string)
    }
}

fn parse_alpha(text: &str) -> Result<Option<f64>, String> {
    if text.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).map_err(|e| format!("bad alpha '{text}': {e}"))
}

fn parse_path_spec(text: &str) -> Result<PathSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let parse = |v: &str| v.parse::<f64>().map_err(|e| format!("bad number '{v}': {e}"));
    match parts.as_slice() {
        ["vertical"] => Ok(PathSpec::Vertical),
        ["power", kappa] => Ok(PathSpec::PowerCurve { kappa: parse(kappa)? }),
        ["exp"] => Ok(PathSpec::ExpTangential),
        ["line", "singleton", v] => {
            Ok(PathSpec::LineField { directions: DirectionSet::Singleton(parse(v)?) })
        }
        ["line", "interval", a, b] => {
            Ok(PathSpec::LineField { directions: DirectionSet::Interval(parse(a)?, parse(b)?) })
        }
        ["line", "cantor", r, k] => Ok(PathSpec::LineField {
            directions: DirectionSet::Cantor {
                r: parse(r)?,
                k: k.parse().map_err(|e| format!("bad k '{k}': {e}"))?,
            },
        }),
        _ => Err(format!("unrecognized path spec '{text}'")),
    }
}

fn load_profile(text: &str) -> Result<oscimax::spectral::SpectralProfile, String> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| format!("cannot read profile {text}: {e}"))?
    };
    profile_from_json(&json).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("OSCIMAX_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("warning: thread pool already initialized");
        }
    }
    let cfg = match Cfg::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.cmd {
        Cmd::Propagate(args) => run_propagate(args, &cfg),
        Cmd::Maximal(args) => run_maximal(args, &cfg),
        Cmd::Scaling(args) => run_scaling_cmd(args, &cfg, false),
        Cmd::Sufficiency(args) => run_scaling_cmd(args, &cfg, true),
        Cmd::CantorDim(args) => run_cantor(args, &cfg),
        Cmd::Vdc(args) => run_vdc(args, &cfg),
        Cmd::Kernel(args) => run_kernel(args, &cfg),
        Cmd::Ineq(args) => run_ineq(args, &cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Usage(String),
    Numeric(oscimax::Error),
    Io(std::io::Error),
}

impl From<oscimax::Error> for CliError {
    fn from(e: oscimax::Error) -> Self {
        CliError::Numeric(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Usage(msg)
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

fn run_propagate(args: PropagateArgs, cfg: &Cfg) -> Result<(), CliError> {
    let profile_text = require(args.profile.or_else(|| cfg.string("profile")), "profile")?;
    let profile = load_profile(&profile_text)?;
    let m = require(args.m.or_else(|| cfg.f64("m")), "m")?;
    let x = require(args.x.or_else(|| cfg.f64("x")), "x")?;
    let y = args.y.or_else(|| cfg.f64("y"));
    let t = require(args.t.or_else(|| cfg.f64("t")), "t")?;
    let rel_tol = args.rel_tol.or_else(|| cfg.f64("rel_tol")).unwrap_or(1e-8);
    let position = match y {
        Some(y) => Point::D2([x, y]),
        None => Point::D1(x),
    };
    let mut req = EvalRequest::new(&profile, m, position, t);
    req.rel_tol = rel_tol;
    let v = evaluate(&req)?;

    let mut manifest = Manifest::new("propagate", 0);
    manifest.param("profile", json!(profile_text));
    manifest.param("m", json!(m));
    manifest.param("x", json!(x));
    if let Some(y) = y {
        manifest.param("y", json!(y));
    }
    manifest.param("t", json!(t));
    manifest.param("rel_tol", json!(rel_tol));

    let oracle_n = args.oracle_n.or_else(|| cfg.u64("oracle_n").map(|v| v as usize));
    let mut csv = if let Some(n) = oracle_n {
        let o = evaluate_oracle(&req, n)?;
        let rel = (v - o).norm() / v.norm().max(o.norm()).max(f64::MIN_POSITIVE);
        manifest.param("oracle_n", json!(n));
        let mut csv = CsvWriter::new(&["re", "im", "oracle_re", "oracle_im", "rel_diff"]);
        csv.row(&[fmt_f64(v.re), fmt_f64(v.im), fmt_f64(o.re), fmt_f64(o.im), fmt_f64(rel)]);
        csv
    } else {
        let mut csv = CsvWriter::new(&["re", "im"]);
        csv.row(&[fmt_f64(v.re), fmt_f64(v.im)]);
        csv
    };
    let _ = &mut csv;
    csv.emit(args.out.as_deref())?;
    manifest.emit(args.out.as_deref())?;
    Ok(())
}

fn run_maximal(args: MaximalArgs, cfg: &Cfg) -> Result<(), CliError> {
    let profile_text = require(args.profile.or_else(|| cfg.string("profile")), "profile")?;
    let profile = load_profile(&profile_text)?;
    let m = require(args.m.or_else(|| cfg.f64("m")), "m")?;
    let path_text = require(args.path.or_else(|| cfg.string("path")), "path")?;
    let path = parse_path_spec(&path_text)?;
    let q = require(args.q.or_else(|| cfg.f64("q")), "q")?;
    let alpha = parse_alpha(&args.alpha.or_else(|| cfg.string("alpha")).unwrap_or("none".into()))?;
    let x_lo = args.x_lo.or_else(|| cfg.f64("x_lo")).unwrap_or(0.0);
    let x_hi = args.x_hi.or_else(|| cfg.f64("x_hi")).unwrap_or(1.0);
    let t_lo = args.t_lo.or_else(|| cfg.f64("t_lo")).unwrap_or(1e-3);
    let t_hi = args.t_hi.or_else(|| cfg.f64("t_hi")).unwrap_or(1.0);
    let x_nodes = args.x_nodes.or_else(|| cfg.u64("x_nodes").map(|v| v as usize)).unwrap_or(16);

    let measure = match alpha {
        Some(a) if a < 1.0 => MeasureKind::Alpha(a),
        _ => MeasureKind::Lebesgue,
    };
    let mut spec = MixedNormSpec::new(
        q,
        measure,
        XDomain::Line { axis: AxisDomain::Interval { lo: x_lo, hi: x_hi }, negate: false },
        (t_lo, t_hi),
    );
    spec.x_nodes = x_nodes;
    let norm = mixed_norm(&profile, m, &path, &spec, None)?;

    let mut csv = CsvWriter::new(&["x", "sup_value"]);
    let rule = oscimax::quad::GaussRule::legendre(x_nodes.max(2));
    for node in &rule.nodes {
        let x = 0.5 * (x_lo + x_hi) + 0.5 * (x_hi - x_lo) * node;
        let v = maximal_in_time(&profile, m, &path, Point::D1(x), &spec, None)?;
        csv.row(&[fmt_f64(x), fmt_f64(v)]);
    }
    csv.emit(args.out.as_deref())?;

    let mut manifest = Manifest::new("maximal", 0);
    manifest.param("profile", json!(profile_text));
    manifest.param("m", json!(m));
    manifest.param("path", json!(path_text));
    manifest.param("q", json!(q));
    manifest.param("alpha", json!(alpha.map_or("none".to_string(), |a| a.to_string())));
    manifest.param("x_lo", json!(x_lo));
    manifest.param("x_hi", json!(x_hi));
    manifest.param("t_lo", json!(t_lo));
    manifest.param("t_hi", json!(t_hi));
    manifest.param("x_nodes", json!(x_nodes));
    manifest.extra("mixed_norm", json!(norm));
    manifest.emit(args.out.as_deref())?;
    Ok(())
}

fn run_scaling_cmd(args: ScalingArgs, cfg: &Cfg, sufficiency_alias: bool) -> Result<(), CliError> {
    let scenario_name = if sufficiency_alias {
        "sufficiency-probe".to_string()
    } else {
        require(args.scenario.or_else(|| cfg.string("scenario")), "scenario")?
    };
    let id = ScenarioId::from_name(&scenario_name)?;
    let defaults = ScenarioParams::default();
    let alpha = match args.alpha.or_else(|| cfg.string("alpha")) {
        Some(text) => parse_alpha(&text)?,
        None => defaults.alpha,
    };
    let direction = match args
        .theta
        .or_else(|| cfg.string("theta"))
        .unwrap_or("cantor".into())
        .as_str()
    {
        "cantor" => DirectionMode::Cantor,
        "zero" => DirectionMode::Origin,
        "interval" => DirectionMode::UnitInterval,
        other => return Err(CliError::Usage(format!("bad --theta '{other}'"))),
    };
    let params = ScenarioParams {
        m: args.m.or_else(|| cfg.f64("m")).unwrap_or(defaults.m),
        kappa: args.kappa.or_else(|| cfg.f64("kappa")).unwrap_or(defaults.kappa),
        q: args.q.or_else(|| cfg.f64("q")).unwrap_or(defaults.q),
        alpha,
        s: args.s.or_else(|| cfg.f64("s")).unwrap_or(defaults.s),
        r: args.r.or_else(|| cfg.f64("r")).unwrap_or(defaults.r),
        c: args.c.or_else(|| cfg.f64("c")).unwrap_or(defaults.c),
        seed: args.seed.or_else(|| cfg.u64("seed")).unwrap_or(defaults.seed),
        trials: args
            .trials
            .or_else(|| cfg.u64("trials").map(|v| v as usize))
            .unwrap_or(defaults.trials),
        direction,
    };
    let k_min = require(args.k_min.or_else(|| cfg.u64("k_min").map(|v| v as u32)), "k-min")?;
    let k_max = require(args.k_max.or_else(|| cfg.u64("k_max").map(|v| v as u32)), "k-max")?;
    if k_min > k_max {
        return Err(CliError::Usage(format!("k-min {k_min} exceeds k-max {k_max}")));
    }
    let ks: Vec<u32> = (k_min..=k_max).collect();
    let report = run_scaling(id, &params, &ks)?;

    let mut csv = CsvWriter::new(&["lambda", "k", "norm", "sobolev", "ratio"]);
    for row in &report.rows {
        csv.row(&[
            fmt_f64(row.lambda),
            row.k.to_string(),
            fmt_f64(row.norm),
            fmt_f64(row.sobolev),
            fmt_f64(row.ratio),
        ]);
    }
    csv.emit(args.out.as_deref())?;

    let mut manifest = Manifest::new("scaling", params.seed);
    manifest.param("scenario", json!(scenario_name));
    manifest.param("m", json!(params.m));
    manifest.param("kappa", json!(params.kappa));
    manifest.param("q", json!(params.q));
    manifest.param("alpha", json!(alpha.map_or("none".to_string(), |a| a.to_string())));
    manifest.param("s", json!(params.s));
    manifest.param("r", json!(params.r));
    manifest.param("c", json!(params.c));
    manifest.param("k_min", json!(k_min));
    manifest.param("k_max", json!(k_max));
    manifest.param("seed", json!(params.seed));
    manifest.param("trials", json!(params.trials));
    manifest.param(
        "theta",
        json!(match direction {
            DirectionMode::Cantor => "cantor",
            DirectionMode::Origin => "zero",
            DirectionMode::UnitInterval => "interval",
        }),
    );
    manifest.extra("fitted_slope", json!(report.fitted_slope));
    manifest.extra("stderr", json!(report.stderr));
    manifest.extra("theoretical_slope", json!(report.theoretical_slope));
    manifest.emit(args.out.as_deref())?;
    Ok(())
}

fn run_cantor(args: CantorArgs, cfg: &Cfg) -> Result<(), CliError> {
    let r = require(args.r.or_else(|| cfg.f64("r")), "r")?;
    let k_max = require(args.k_max.or_else(|| cfg.u64("k_max").map(|v| v as u32)), "k-max")?;
    let report = minkowski_dim_estimate(r, k_max)?;
    let mut csv = CsvWriter::new(&["j", "delta", "n_delta", "slope"]);
    for (j, delta, n) in &report.counts {
        csv.row(&[j.to_string(), fmt_f64(*delta), n.to_string(), fmt_f64(report.slope)]);
    }
    csv.emit(args.out.as_deref())?;
    let mut manifest = Manifest::new("cantor-dim", 0);
    manifest.param("r", json!(r));
    manifest.param("k_max", json!(k_max));
    manifest.extra("slope", json!(report.slope));
    manifest.extra("stderr", json!(report.stderr));
    manifest.emit(args.out.as_deref())?;
    Ok(())
}

fn run_vdc(args: VdcArgs, cfg: &Cfg) -> Result<(), CliError> {
    let phase_text = require(args.phase.or_else(|| cfg.string("phase")), "phase")?;
    let family = match phase_text.split(':').collect::<Vec<_>>().as_slice() {
        ["quadratic"] => PhaseFamily::Quadratic,
        ["monotone"] | ["monotone_linearized"] => PhaseFamily::MonotoneLinearized,
        ["fractional", m] => PhaseFamily::Fractional(
            m.parse().map_err(|e| CliError::Usage(format!("bad m '{m}': {e}")))?,
        ),
        _ => return Err(CliError::Usage(format!("unknown phase family '{phase_text}'"))),
    };
    let e_min = require(args.lambda_min.or_else(|| cfg.u64("lambda_min").map(|v| v as u32)), "lambda-min")?;
    let e_max = require(args.lambda_max.or_else(|| cfg.u64("lambda_max").map(|v| v as u32)), "lambda-max")?;
    let k = args.k.or_else(|| cfg.u64("k").map(|v| v as u32)).unwrap_or(family.canonical_k());
    let ladder: Vec<f64> = (e_min..=e_max).map(|e| (2f64).powi(e as i32)).collect();
    let report = vdc_decay_fit(family, k, &ladder)?;

    let mut csv = CsvWriter::new(&["lambda", "envelope", "normalized_constant"]);
    for (lambda, env, c) in &report.rows {
        csv.row(&[fmt_f64(*lambda), fmt_f64(*env), fmt_f64(*c)]);
    }
    csv.emit(args.out.as_deref())?;
    let mut manifest = Manifest::new("vdc", 0);
    manifest.param("phase", json!(phase_text));
    manifest.param("lambda_min", json!(e_min));
    manifest.param("lambda_max", json!(e_max));
    manifest.param("k", json!(k));
    manifest.extra("slope", json!(report.slope));
    manifest.extra("stderr", json!(report.stderr));
    manifest.extra("sup_constant", json!(report.sup_constant));
    manifest.extra("top_decade_spread", json!(report.top_decade_spread));
    manifest.emit(args.out.as_deref())?;
    Ok(())
}

fn run_kernel(args: KernelArgs, cfg: &Cfg) -> Result<(), CliError> {
    let alpha = require(args.alpha.or_else(|| cfg.f64("alpha")), "alpha")?;
    let q = require(args.q.or_else(|| cfg.f64("q")), "q")?;
    let samples = require(
        args.samples.or_else(|| cfg.u64("samples").map(|v| v as usize)),
        "samples",
    )?;
    let seed = args.seed.or_else(|| cfg.u64("seed")).unwrap_or(0);
    let m = args.m.or_else(|| cfg.f64("m")).unwrap_or(2.0);
    let e_min = args.lambda_min.or_else(|| cfg.u64("lambda_min").map(|v| v as u32)).unwrap_or(8);
    let e_max = args.lambda_max.or_else(|| cfg.u64("lambda_max").map(|v| v as u32)).unwrap_or(14);

    let mut csv = CsvWriter::new(&[
        "lambda", "x", "t", "theta", "x_prime", "t_prime", "theta_prime", "region", "re", "im",
        "abs", "decay_statistic",
    ]);
    let mut worst_bound_ratio: f64 = 0.0;
    let mut c_max: f64 = 0.0;
    for (stream, e) in (e_min..=e_max).enumerate() {
        let lambda = (2f64).powi(e as i32);
        for sample in seeded_samples(lambda, m, q, alpha, samples, seed, stream as u64) {
            let v = kernel_eval(&sample)?;
            let region = classify_region(&sample, q, alpha);
            let stat =
                v.norm() * (lambda * sample.delta_x().abs()).sqrt() / lambda;
            if region != Region::V1 {
                c_max = c_max.max(stat);
            }
            worst_bound_ratio = worst_bound_ratio.max(v.norm() / (lambda * *PSI_SQ_INTEGRAL));
            csv.row(&[
                fmt_f64(lambda),
                fmt_f64(sample.w.x),
                fmt_f64(sample.w.t),
                fmt_f64(sample.w.theta),
                fmt_f64(sample.w_prime.x),
                fmt_f64(sample.w_prime.t),
                fmt_f64(sample.w_prime.theta),
                format!("{region:?}"),
                fmt_f64(v.re),
                fmt_f64(v.im),
                fmt_f64(v.norm()),
                fmt_f64(stat),
            ]);
        }
    }
    csv.emit(args.out.as_deref())?;
    let mut manifest = Manifest::new("kernel", seed);
    manifest.param("alpha", json!(alpha));
    manifest.param("q", json!(q));
    manifest.param("samples", json!(samples));
    manifest.param("seed", json!(seed));
    manifest.param("m", json!(m));
    manifest.param("lambda_min", json!(e_min));
    manifest.param("lambda_max", json!(e_max));
    manifest.extra("worst_bound_ratio", json!(worst_bound_ratio));
    manifest.extra("c_max", json!(c_max));
    manifest.emit(args.out.as_deref())?;
    Ok(())
}

fn run_ineq(args: IneqArgs, cfg: &Cfg) -> Result<(), CliError> {
    let alpha = require(args.alpha.or_else(|| cfg.f64("alpha")), "alpha")?;
    let q = require(args.q.or_else(|| cfg.f64("q")), "q")?;
    let mode_text = require(args.mode.or_else(|| cfg.string("mode")), "mode")?;
    let mode = match mode_text.as_str() {
        "young" => IneqMode::Young {
            a: args.a.or_else(|| cfg.f64("a")).unwrap_or(-1.0),
            b: args.b.or_else(|| cfg.f64("b")).unwrap_or(1.0),
        },
        "hls" => IneqMode::Hls { rho: require(args.rho.or_else(|| cfg.f64("rho")), "rho")? },
        other => return Err(CliError::Usage(format!("bad --mode '{other}'"))),
    };
    let trials = args.trials.or_else(|| cfg.u64("trials").map(|v| v as usize)).unwrap_or(100);
    let resolution =
        args.resolution.or_else(|| cfg.u64("resolution").map(|v| v as usize)).unwrap_or(256);
    let doublings = args.doublings.or_else(|| cfg.u64("doublings").map(|v| v as u32)).unwrap_or(2);
    let seed = args.seed.or_else(|| cfg.u64("seed")).unwrap_or(0);

    let report = young_hls_check(alpha, q, mode, trials, resolution, doublings, seed)?;
    let constant_case = ineq_constant_case(alpha, q, &mode, resolution)?;

    let mut csv = CsvWriter::new(&["resolution", "max_ratio"]);
    for (n, ratio) in &report.per_resolution {
        csv.row(&[n.to_string(), fmt_f64(*ratio)]);
    }
    csv.emit(args.out.as_deref())?;
    let mut manifest = Manifest::new("ineq", seed);
    manifest.param("alpha", json!(alpha));
    manifest.param("q", json!(q));
    manifest.param("mode", json!(mode_text));
    if let IneqMode::Hls { rho } = mode {
        manifest.param("rho", json!(rho));
    }
    if let IneqMode::Young { a, b } = mode {
        manifest.param("a", json!(a));
        manifest.param("b", json!(b));
    }
    manifest.param("trials", json!(trials));
    manifest.param("resolution", json!(resolution));
    manifest.param("doublings", json!(doublings));
    manifest.param("seed", json!(seed));
    manifest.extra("max_ratio", json!(report.max_ratio));
    manifest.extra("constant_case_ratio", json!(constant_case));
    manifest.emit(args.out.as_deref())?;
    Ok(())
}
