//! Command definitions and dispatch for the `tsd` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tsd_core::bias::{bias_moment, mean_abs_bias, BiasDistribution};
use tsd_core::bounds::{
    bound_cpd, bound_h3_two_tsd, bound_normal_example, bound_stable, bound_vg_example,
    m_alpha, rate_sweep, SweepSpec,
};
use tsd_core::charfn::CharFn;
use tsd_core::distance::{kolmogorov_laws, smooth_h3_lower_laws, wasserstein1_empirical};
use tsd_core::inversion::{invert_pdf, NumericLaw};
use tsd_core::model::StableParams;
use tsd_core::sampling::{sample_batch, sample_cpd_approximant, sample_tempered};
use tsd_core::stein::{
    expectation_of, solve_stein, stein_apply, verify_derivative_bounds_on, TestFunction,
};
use tsd_core::TsdParams;

use crate::checks::{run_checks, ALL_CHECKS};
use crate::output::{csv, emit};

/// Application-level error split by exit-code class: configuration
/// problems exit 2, computation failures exit 1.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Compute(String),
}

impl From<tsd_core::Error> for AppError {
    fn from(e: tsd_core::Error) -> Self {
        match e {
            tsd_core::Error::InvalidParams(_) | tsd_core::Error::Serde(_) => {
                AppError::Config(e.to_string())
            }
            other => AppError::Compute(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Compute(format!("i/o: {e}"))
    }
}

type AppResult<T> = Result<T, AppError>;

fn config_err<T>(msg: impl Into<String>) -> AppResult<T> {
    Err(AppError::Config(msg.into()))
}

/// Numerical toolkit for tempered stable distributions: cumulants,
/// characteristic functions, CDF/density inversion, samplers, Stein
/// machinery, probability distances and approximation-bound sweeps.
#[derive(Debug, Parser, Serialize)]
#[command(name = "tsd", version, about)]
pub struct Cli {
    /// Worker threads for parallel sweeps (default: all logical cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Run the command described by a JSON config file instead of flags
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Source of the six tempered stable parameters: a JSON file or an inline
/// JSON object `{"m1":..,"alpha1":..,"lambda1":..,"m2":..,"alpha2":..,"lambda2":..}`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ParamsArg {
    /// Path to a params JSON file
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Inline params JSON
    #[arg(long, value_name = "JSON")]
    pub params_json: Option<String>,
}

impl ParamsArg {
    pub fn load(&self) -> AppResult<TsdParams> {
        let text = match (&self.params, &self.params_json) {
            (Some(path), None) => std::fs::read_to_string(path)
                .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?,
            (None, Some(s)) => s.clone(),
            (None, None) => return config_err("provide --params FILE or --params-json JSON"),
            (Some(_), Some(_)) => {
                return config_err("provide only one of --params and --params-json")
            }
        };
        let p: TsdParams = serde_json::from_str(&text)
            .map_err(|e| AppError::Config(format!("params JSON: {e}")))?;
        p.validate().map_err(|e| AppError::Config(e.to_string()))?;
        Ok(p)
    }
}

/// Which law a cf/density/cdf/sample command addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    /// The tempered stable law itself
    Tempered,
    /// Compound-Poisson approximant of order --n
    Cpd,
    /// Self-decomposition increment at time --t
    Ratio,
    /// Strictly stable law from --stable-json
    Stable,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form cumulants, mean, variance and sub-family of a law
    Cumulants {
        #[command(flatten)]
        params: ParamsArg,
        /// Highest cumulant order to report
        #[arg(long, default_value_t = 4)]
        #[serde(default = "default_n_max")]
        n_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Characteristic function values on a list of arguments (CSV)
    Cf {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, value_enum, default_value_t = LawKind::Tempered)]
        #[serde(default = "default_kind")]
        kind: LawKind,
        /// Approximant order for --kind cpd
        #[arg(long)]
        n: Option<u32>,
        /// Time parameter for --kind ratio
        #[arg(long)]
        t: Option<f64>,
        /// Stable parameters JSON {"m1":..,"alpha":..,"m2":..} for --kind stable
        #[arg(long, value_name = "JSON")]
        stable_json: Option<String>,
        /// Comma-separated cf arguments
        #[arg(long, default_value = "-10,-1,-0.1,0.1,1,10", allow_hyphen_values = true)]
        #[serde(default = "default_z")]
        z: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density on a uniform grid, by characteristic-function inversion (CSV)
    Density {
        #[command(flatten)]
        law: LawArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CDF on a uniform grid, by characteristic-function inversion (CSV)
    Cdf {
        #[command(flatten)]
        law: LawArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw reproducible samples (CSV, one value per row)
    Sample {
        #[command(flatten)]
        params: ParamsArg,
        /// tempered draws the law itself; cpd its order---n approximant
        #[arg(long, value_enum, default_value_t = LawKind::Tempered)]
        #[serde(default = "default_kind")]
        kind: LawKind,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        #[serde(default = "default_count")]
        count: usize,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        stream: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Non-zero bias distribution: moments, mean-absolute value, quantiles
    Bias {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stein-equation machinery
    Stein {
        #[command(subcommand)]
        #[serde(flatten)]
        action: SteinCmd,
    },
    /// Distances between two laws or sample batches
    Distance {
        #[arg(long, value_enum)]
        kind: DistanceKind,
        /// First law: params JSON file
        #[arg(long)]
        params_a: PathBuf,
        /// Second law: params JSON file
        #[arg(long)]
        params_b: PathBuf,
        /// Sample count for the empirical Wasserstein distance
        #[arg(long, default_value_t = 100_000)]
        #[serde(default = "default_count")]
        count: usize,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        #[serde(default = "default_tol")]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Approximation-bound calculators and rate sweeps
    Bounds {
        #[command(subcommand)]
        #[serde(flatten)]
        action: BoundsCmd,
    },
    /// Run the verification suite (all checks or a comma-separated subset)
    Verify {
        /// "all" or comma-separated check ids, e.g. "1,5,10"
        #[arg(default_value = "all")]
        #[serde(default = "default_which")]
        which: String,
        #[arg(long, default_value_t = 42)]
        #[serde(default = "default_seed")]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_n_max() -> u32 {
    4
}
fn default_kind() -> LawKind {
    LawKind::Tempered
}
fn default_z() -> String {
    "-10,-1,-0.1,0.1,1,10".into()
}
fn default_count() -> usize {
    10_000
}
fn default_tol() -> f64 {
    1e-7
}
fn default_which() -> String {
    "all".into()
}
fn default_seed() -> u64 {
    42
}

/// Law selection shared by density/cdf.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct LawArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    #[arg(long, value_enum, default_value_t = LawKind::Tempered)]
    #[serde(default = "default_kind")]
    pub kind: LawKind,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_name = "JSON")]
    pub stable_json: Option<String>,
}

impl Default for LawKind {
    fn default() -> Self {
        LawKind::Tempered
    }
}

impl LawArgs {
    pub fn charfn(&self) -> AppResult<CharFn> {
        build_charfn(self.kind, &self.params, self.n, self.t, &self.stable_json)
    }
}

/// Evaluation grid shared by density/cdf.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Lower edge (default: left end of the law's support window)
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    /// Upper edge (default: right end of the law's support window)
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    #[serde(default = "default_points")]
    pub points: usize,
    #[arg(long, default_value_t = 1e-8)]
    #[serde(default = "default_grid_tol")]
    pub tol: f64,
}

fn default_points() -> usize {
    201
}
fn default_grid_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum SteinCmd {
    /// Solve the Stein equation for a test function and report the
    /// equation residuals and the derivative-bound checks
    Verify {
        #[command(flatten)]
        params: ParamsArg,
        /// Test function: tanh | sin:OMEGA | cos:OMEGA | gauss-x
        #[arg(long, default_value = "tanh")]
        #[serde(default = "default_test_fn")]
        test_fn: String,
        /// Residual evaluation points
        #[arg(long, default_value = "-2,0,2", allow_hyphen_values = true)]
        #[serde(default = "default_xs")]
        xs: String,
        #[arg(long, default_value_t = 1e-6)]
        #[serde(default = "default_stein_tol")]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_test_fn() -> String {
    "tanh".into()
}
fn default_xs() -> String {
    "-2,0,2".into()
}
fn default_stein_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    Kolmogorov,
    Wasserstein1,
    H3Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTheorem {
    Cpd,
    Stable,
    Continuity,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum BoundsCmd {
    /// Compound-Poisson Kolmogorov bound c (|C1|+|C2|)^{2/5} n^{-1/5}
    Cpd {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "default_one")]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stable-approximation bound C1 l1^{a+1/2} + C2 l2^{a+1/2}
    Stable {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "default_one")]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "default_one")]
        c2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smooth-Wasserstein cumulant bound between two laws
    H3 {
        #[arg(long)]
        params_a: PathBuf,
        #[arg(long)]
        params_b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal-limit bound against N(0, lam^2)
    Normal {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        lam: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variance-gamma example bound against VG(m, lam1, lam2)
    Vg {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        lam1: f64,
        #[arg(long)]
        lam2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The constant M(alpha) of the stable theorem
    MAlpha {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-10)]
        #[serde(default = "default_m_tol")]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical rate sweep confronting a theorem's exponent
    Sweep {
        #[arg(long, value_enum)]
        theorem: SweepTheorem,
        /// Target law for cpd / continuity sweeps
        #[command(flatten)]
        params: ParamsArg,
        /// Stable parameters JSON for the stable sweep
        #[arg(long, value_name = "JSON")]
        stable_json: Option<String>,
        /// Approximant orders for the cpd sweep
        #[arg(long, default_value = "1,2,4,8,16,32,64,128,256")]
        #[serde(default = "default_ns")]
        ns: String,
        /// Tempering rates for the stable sweep
        #[arg(long, default_value = "0.4,0.2,0.1,0.05")]
        #[serde(default = "default_lambdas")]
        lambdas: String,
        /// Perturbation indices for the continuity sweep
        #[arg(long, default_value = "1,2,4,8,16")]
        #[serde(default = "default_ks")]
        ks: String,
        #[arg(long, default_value_t = 1e-7)]
        #[serde(default = "default_tol")]
        tol: f64,
        /// JSON report destination
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional CSV sweep table destination
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
}

fn default_one() -> f64 {
    1.0
}
fn default_m_tol() -> f64 {
    1e-10
}
fn default_ns() -> String {
    "1,2,4,8,16,32,64,128,256".into()
}
fn default_lambdas() -> String {
    "0.4,0.2,0.1,0.05".into()
}
fn default_ks() -> String {
    "1,2,4,8,16".into()
}

// ---------------------------------------------------------------------------
// helpers

fn parse_f64_list(s: &str) -> AppResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| AppError::Config(format!("number '{t}': {e}"))))
        .collect()
}

fn parse_u32_list(s: &str) -> AppResult<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| AppError::Config(format!("integer '{t}': {e}"))))
        .collect()
}

fn load_params_file(path: &PathBuf) -> AppResult<TsdParams> {
    ParamsArg { params: Some(path.clone()), params_json: None }.load()
}

fn parse_stable(json: &Option<String>) -> AppResult<StableParams> {
    let Some(s) = json else {
        return config_err("--kind stable needs --stable-json");
    };
    let raw: serde_json::Value =
        serde_json::from_str(s).map_err(|e| AppError::Config(format!("stable JSON: {e}")))?;
    let get = |k: &str| -> AppResult<f64> {
        raw.get(k)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| AppError::Config(format!("stable JSON needs numeric field '{k}'")))
    };
    StableParams::new(get("m1")?, get("alpha")?, get("m2")?)
        .map_err(|e| AppError::Config(e.to_string()))
}

fn build_charfn(
    kind: LawKind,
    params: &ParamsArg,
    n: Option<u32>,
    t: Option<f64>,
    stable_json: &Option<String>,
) -> AppResult<CharFn> {
    match kind {
        LawKind::Tempered => Ok(CharFn::Tempered(params.load()?)),
        LawKind::Cpd => {
            let n = n.ok_or_else(|| AppError::Config("--kind cpd needs --n".into()))?;
            if n == 0 {
                return config_err("--n must be at least 1");
            }
            Ok(CharFn::CompoundPoisson { params: params.load()?, n })
        }
        LawKind::Ratio => {
            let t = t.ok_or_else(|| AppError::Config("--kind ratio needs --t".into()))?;
            CharFn::ratio(params.load()?, t).map_err(AppError::from)
        }
        LawKind::Stable => Ok(CharFn::Stable(parse_stable(stable_json)?)),
    }
}

fn parse_test_fn(spec: &str) -> AppResult<TestFunction> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let omega = |a: Option<&str>| -> AppResult<f64> {
        let Some(a) = a else {
            return config_err(format!("test function '{name}' needs a frequency, e.g. {name}:1.0"));
        };
        a.parse::<f64>().map_err(|e| AppError::Config(format!("frequency '{a}': {e}")))
    };
    match name {
        "tanh" => Ok(TestFunction::tanh()),
        "gauss-x" | "gauss_x" => Ok(TestFunction::gauss_x()),
        "sin" => Ok(TestFunction::sin(omega(arg)?)),
        "cos" => Ok(TestFunction::cos(omega(arg)?)),
        other => config_err(format!(
            "unknown test function '{other}' (expected tanh, sin:W, cos:W, gauss-x)"
        )),
    }
}

fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Wrap a result payload with the reproducibility envelope: the full
/// config that produced it and a timestamp (the one field excluded from
/// byte comparisons).
fn report(config: &Command, payload: serde_json::Value) -> serde_json::Value {
    json!({
        "tool": "tsd",
        "config": serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
        "timestamp_unix_s": unix_timestamp(),
        "result": payload,
    })
}

fn emit_json(out: &Option<PathBuf>, value: &serde_json::Value) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Compute(format!("serialize: {e}")))?;
    text.push('\n');
    emit(out, &text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// dispatch

/// Run a parsed invocation. Exit-code mapping happens in `main`.
pub fn run(cli: Cli) -> AppResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return config_err("--threads must be positive");
        }
        // ignore the error if a global pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let command = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<Command>(&text)
                .map_err(|e| AppError::Config(format!("config JSON: {e}")))?
        }
        (None, Some(cmd)) => cmd,
        (Some(_), Some(_)) => return config_err("provide either --config or a subcommand, not both"),
        (None, None) => return config_err("no command given (try --help)"),
    };
    dispatch(command)
}

fn dispatch(command: Command) -> AppResult<()> {
    match command.clone() {
        Command::Cumulants { params, n_max, out } => {
            if !(1..=8).contains(&n_max) {
                return config_err("--n-max must be in 1..=8");
            }
            let p = params.load()?;
            let mut cs = serde_json::Map::new();
            for n in 1..=n_max {
                cs.insert(format!("C{n}"), json!(p.cumulant(n)));
            }
            let payload = json!({
                "params": p,
                "sub_family": p.sub_family(),
                "cumulants": cs,
                "mean": p.mean(),
                "variance": p.variance(),
            });
            emit_json(&out, &report(&command, payload))
        }
        Command::Cf { params, kind, n, t, stable_json, z, out } => {
            let cf = build_charfn(kind, &params, n, t, &stable_json)?;
            let zs = parse_f64_list(&z)?;
            let rows: Vec<Vec<f64>> = zs
                .iter()
                .map(|&zv| {
                    let v = cf.eval(zv);
                    vec![zv, v.re, v.im, v.norm()]
                })
                .collect();
            emit(&out, &csv(&["z", "re", "im", "modulus"], &rows))?;
            Ok(())
        }
        Command::Density { law, grid, out } => {
            let cf = law.charfn()?;
            let (xs, _law) = grid_points(&cf, &grid)?;
            let mut rows = Vec::with_capacity(xs.len());
            for x in xs {
                let d = invert_pdf(&cf, x, grid.tol)?;
                rows.push(vec![x, d]);
            }
            emit(&out, &csv(&["x", "density"], &rows))?;
            Ok(())
        }
        Command::Cdf { law, grid, out } => {
            let cf = law.charfn()?;
            let (xs, law_tab) = grid_points(&cf, &grid)?;
            let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, law_tab.cdf(x)]).collect();
            emit(&out, &csv(&["x", "cdf"], &rows))?;
            Ok(())
        }
        Command::Sample { params, kind, n, count, seed, stream, out } => {
            let p = params.load()?;
            if count == 0 {
                return config_err("--count must be positive");
            }
            let batch = match kind {
                LawKind::Tempered => sample_batch(count, seed, stream, |r| sample_tempered(&p, r))?,
                LawKind::Cpd => {
                    let n = n.ok_or_else(|| AppError::Config("--kind cpd needs --n".into()))?;
                    sample_batch(count, seed, stream, |r| sample_cpd_approximant(&p, n, r))?
                }
                other => {
                    return config_err(format!("sampling not supported for --kind {other:?}"))
                }
            };
            let rows: Vec<Vec<f64>> = batch.values.iter().map(|&v| vec![v]).collect();
            emit(&out, &csv(&["value"], &rows))?;
            Ok(())
        }
        Command::Bias { params, out } => {
            let p = params.load()?;
            let mab = mean_abs_bias(&p);
            let bd = BiasDistribution::new(&p, 1e-8)?;
            let quantiles: Vec<serde_json::Value> = [0.05, 0.25, 0.5, 0.75, 0.95]
                .iter()
                .map(|&q| json!({ "q": q, "value": bd.quantile(q) }))
                .collect();
            let payload = json!({
                "params": p,
                "moment1": bias_moment(&p, 1),
                "moment2": bias_moment(&p, 2),
                "mean_abs_exact": mab.exact,
                "mean_abs_signed_formula": mab.signed_formula,
                "mean_abs_discrepancy": mab.discrepancy(),
                "quantiles": quantiles,
            });
            emit_json(&out, &report(&command, payload))
        }
        Command::Stein { action } => {
            let SteinCmd::Verify { params, test_fn, xs, tol, out } = action;
            let p = params.load()?;
            let h = parse_test_fn(&test_fn)?;
            let sol = solve_stein(&p, &h, tol)?;
            let eh = expectation_of(&p, |x| h.h(x), |x| h.d1(x), tol.min(1e-8))?;
            let mut residuals = Vec::new();
            for x in parse_f64_list(&xs)? {
                let af = stein_apply(&p, &|y| sol.eval(y), x, tol)?;
                residuals.push(json!({
                    "x": x,
                    "residual": af - (h.h(x) - eh),
                }));
            }
            let mut bound_reports = Vec::new();
            for r in 0..=1u32 {
                let rep = verify_derivative_bounds_on(&sol, r)?;
                bound_reports.push(json!({
                    "r": rep.r,
                    "max_observed": rep.max_observed,
                    "bound": rep.bound,
                    "lipschitz_observed": rep.lipschitz_observed,
                    "lipschitz_bound": rep.lipschitz_bound,
                    "slack": rep.slack,
                    "passes": rep.passes(),
                }));
            }
            let payload = json!({
                "params": p,
                "test_fn": test_fn,
                "expectation_of_h": eh,
                "residuals": residuals,
                "derivative_bounds": bound_reports,
            });
            emit_json(&out, &report(&command, payload))
        }
        Command::Distance { kind, params_a, params_b, count, seed, tol, out } => {
            let a = load_params_file(&params_a)?;
            let b = load_params_file(&params_b)?;
            let estimate = match kind {
                DistanceKind::Kolmogorov => {
                    let la = NumericLaw::from_charfn(&CharFn::Tempered(a), tol)?;
                    let lb = NumericLaw::from_charfn(&CharFn::Tempered(b), tol)?;
                    kolmogorov_laws(&la, &lb, tol)?
                }
                DistanceKind::H3Lower => {
                    let la = NumericLaw::from_charfn(&CharFn::Tempered(a), tol)?;
                    let lb = NumericLaw::from_charfn(&CharFn::Tempered(b), tol)?;
                    smooth_h3_lower_laws(&la, &lb, tol)?
                }
                DistanceKind::Wasserstein1 => {
                    if count == 0 {
                        return config_err("--count must be positive");
                    }
                    let ba = sample_batch(count, seed, 0, |r| sample_tempered(&a, r))?;
                    let bb = sample_batch(count, seed, 1, |r| sample_tempered(&b, r))?;
                    wasserstein1_empirical(&ba, &bb)?
                }
            };
            emit_json(&out, &report(&command, serde_json::to_value(&estimate).unwrap()))
        }
        Command::Bounds { action } => run_bounds(&command, action),
        Command::Verify { which, seed, out } => {
            let ids: Vec<u32> = if which.trim() == "all" {
                ALL_CHECKS.to_vec()
            } else {
                parse_u32_list(&which)?
            };
            if let Some(bad) = ids.iter().find(|id| !ALL_CHECKS.contains(id)) {
                return config_err(format!("unknown check id {bad} (valid: 1..=13 or 'all')"));
            }
            let results = run_checks(&ids, seed);
            for r in &results {
                eprintln!("{r}");
            }
            let all_passed = results.iter().all(|r| r.passed);
            let payload = json!({
                "seed": seed,
                "checks": results,
                "all_passed": all_passed,
            });
            emit_json(&out, &report(&command, payload))?;
            if all_passed {
                Ok(())
            } else {
                let failed: Vec<String> = results
                    .iter()
                    .filter(|r| !r.passed)
                    .map(|r| r.id.to_string())
                    .collect();
                Err(AppError::Compute(format!("checks failed: {}", failed.join(", "))))
            }
        }
    }
}

fn grid_points(cf: &CharFn, grid: &GridArgs) -> AppResult<(Vec<f64>, NumericLaw)> {
    if grid.points < 2 {
        return config_err("--points must be at least 2");
    }
    let law = NumericLaw::from_charfn(cf, grid.tol)?;
    let (wlo, whi) = law.support_window();
    let lo = grid.min.unwrap_or(wlo);
    let hi = grid.max.unwrap_or(whi);
    if !(lo < hi) {
        return config_err(format!("empty grid [{lo}, {hi}]"));
    }
    let xs = (0..grid.points)
        .map(|i| lo + (hi - lo) * i as f64 / (grid.points - 1) as f64)
        .collect();
    Ok((xs, law))
}

fn run_bounds(command: &Command, action: BoundsCmd) -> AppResult<()> {
    match action {
        BoundsCmd::Cpd { params, n, c, out } => {
            let p = params.load()?;
            let v = bound_cpd(&p, n, c)?;
            emit_json(&out, &report(command, json!({ "bound": v, "n": n, "c": c })))
        }
        BoundsCmd::Stable { params, c1, c2, out } => {
            let p = params.load()?;
            let v = bound_stable(&p, c1, c2)?;
            emit_json(&out, &report(command, json!({ "bound": v, "c1": c1, "c2": c2 })))
        }
        BoundsCmd::H3 { params_a, params_b, out } => {
            let a = load_params_file(&params_a)?;
            let b = load_params_file(&params_b)?;
            let v = bound_h3_two_tsd(&a, &b);
            emit_json(&out, &report(command, json!({ "bound": v })))
        }
        BoundsCmd::Normal { params, lam, out } => {
            let p = params.load()?;
            let v = bound_normal_example(&p, lam)?;
            emit_json(&out, &report(command, json!({ "bound": v, "lam": lam })))
        }
        BoundsCmd::Vg { params, m, lam1, lam2, out } => {
            let p = params.load()?;
            let v = bound_vg_example(&p, m, lam1, lam2)?;
            emit_json(&out, &report(command, json!({ "bound": v })))
        }
        BoundsCmd::MAlpha { alpha, tol, out } => {
            let v = m_alpha(alpha, tol)?;
            emit_json(&out, &report(command, json!({ "m_alpha": v, "alpha": alpha })))
        }
        BoundsCmd::Sweep { theorem, params, stable_json, ns, lambdas, ks, tol, out, csv_out } => {
            let spec = match theorem {
                SweepTheorem::Cpd => SweepSpec::Cpd { params: params.load()?, ns: parse_u32_list(&ns)? },
                SweepTheorem::Stable => SweepSpec::Stable {
                    stable: parse_stable(&stable_json)?,
                    lambdas: parse_f64_list(&lambdas)?,
                },
                SweepTheorem::Continuity => SweepSpec::Continuity {
                    target: params.load()?,
                    ks: parse_u32_list(&ks)?,
                },
            };
            let rep = rate_sweep(&spec, tol)?;
            if let Some(path) = &csv_out {
                let rows: Vec<Vec<f64>> = rep
                    .points
                    .iter()
                    .map(|p| {
                        vec![
                            p.index as f64,
                            p.x,
                            p.distance,
                            p.error_bar,
                            p.bound.unwrap_or(f64::NAN),
                        ]
                    })
                    .collect();
                crate::output::atomic_write(
                    path,
                    &csv(&["index", "x", "distance", "error_bar", "bound"], &rows),
                )?;
            }
            emit_json(&out, &report(command, serde_json::to_value(&rep).unwrap()))
        }
    }
}
