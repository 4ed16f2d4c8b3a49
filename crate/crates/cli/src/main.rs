use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlc_core::bounds::{self, EasyBase, MuBar, RateBoundParams};
use rlc_core::checkers::{check, reverify, CheckOptions, OmegaMode};
use rlc_core::codes::{dimension_for_rate, sample_with_dimension, SampleOptions};
use rlc_core::harness::{self, make_property, ExperimentSpec, PropertyKind};
use rlc_core::rational::parse_rational;
use rlc_core::sigma::{self, DEFAULT_SEARCH_BUDGET};
use rlc_core::{FieldSpec, Rational};
use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "rlc", version, about = "List-decoding and list-recovery workbench for random linear codes")]
struct Cli {
    /// Seed for every random choice; experiments use it as the master seed when given.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; relative paths resolve against $RLC_OUT_DIR when set. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exit with status 1 when the result is a property violation.
    #[arg(long, global = true)]
    assert: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random linear code and write it as JSON.
    Gen(GenArgs),
    /// Decide a list-decoding or list-recovery property for a code file.
    Check(CheckArgs),
    /// σ profile of a message-set file.
    Sigma(SigmaArgs),
    /// Extract a large low-dimensional subset from a bad message set.
    Extract(ExtractArgs),
    /// Closed-form calculators.
    Bounds {
        #[command(subcommand)]
        calc: BoundsCmd,
    },
    /// Rate curve CSV "eps,R0,R1,R,binding".
    Rates(RatesArgs),
    /// Run an experiment config.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Field order p^m.
    #[arg(long)]
    q: u32,
    /// Monic modulus coefficients c_0,…,c_m (extension fields only).
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

impl FieldArgs {
    fn spec(&self) -> rlc_core::Result<FieldSpec> {
        let base = FieldSpec::with_order(self.q)?;
        match &self.modulus {
            Some(m) => FieldSpec::new(base.p(), base.m(), Some(m)),
            None => Ok(base),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: usize,
    /// Rate k/n; give this or --k.
    #[arg(long, value_parser = rational, conflicts_with = "k")]
    rate: Option<Rational>,
    #[arg(long)]
    k: Option<usize>,
    /// Redraw until the generator has full column rank.
    #[arg(long)]
    full_rank: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OmegaArg {
    TopL,
    Exhaustive,
}

#[derive(Args)]
struct CheckArgs {
    /// Code JSON file.
    code: PathBuf,
    #[arg(long, value_parser = property_kind)]
    property: PropertyKind,
    #[arg(long, value_parser = rational)]
    rho: Option<Rational>,
    /// Agreement threshold for LR and ARLR.
    #[arg(long, value_parser = rational, visible_alias = "alpha")]
    eps: Option<Rational>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long = "L")]
    big_l: usize,
    #[arg(long, value_enum, default_value = "top-l")]
    omega: OmegaArg,
    /// Recheck a returned witness from first principles.
    #[arg(long)]
    reverify: bool,
}

#[derive(Args)]
struct SigmaArgs {
    /// Message-set JSON file.
    lambda: PathBuf,
    /// Largest p; defaults to d.
    #[arg(long)]
    p_max: Option<usize>,
    /// Samples per p where exact computation exceeds its cap.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// With --ell, also report average-radius goodness at this ζ.
    #[arg(long, value_parser = rational, requires = "ell")]
    zeta: Option<Rational>,
    #[arg(long)]
    ell: Option<usize>,
}

#[derive(Args)]
struct ExtractArgs {
    lambda: PathBuf,
    #[arg(long, value_parser = rational)]
    zeta: Rational,
    #[arg(long)]
    ell: usize,
    /// Largest number of subsets the exhaustive search may visit.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, value_parser = rational)]
    zeta: Rational,
    #[arg(long, default_value_t = 1)]
    ell: u64,
    /// First ε; defaults to the first grid point above ℓ/q.
    #[arg(long)]
    start: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    end: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON.
    config: PathBuf,
    /// Also run the iid uniform-word baseline on the same seeds.
    #[arg(long)]
    compare_uniform: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MuBarArg {
    Zero,
    EllOverQ,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Full,
    Q,
}

#[derive(Args)]
struct AvgRadArgs {
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    zeta: f64,
    #[arg(long)]
    xi: f64,
    #[arg(long, value_enum, default_value = "zero")]
    mu_bar: MuBarArg,
}

impl AvgRadArgs {
    fn params(&self) -> RateBoundParams {
        let mu_bar = match self.mu_bar {
            MuBarArg::Zero => MuBar::Zero,
            MuBarArg::EllOverQ => MuBar::EllOverQ,
        };
        RateBoundParams { q: self.q, ell: self.ell, eps: self.eps, eta: self.eta, zeta: self.zeta, xi: self.xi, mu_bar }
    }
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// q-ary entropy H_q(x).
    Entropy {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        q: f64,
    },
    /// Series for H_q(1 − 1/q − x).
    ExpandUniform {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Series for H_q(y) in powers of 1/q.
    ExpandLargeQ {
        #[arg(long)]
        y: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Exact Hamming ball volume and its rate.
    Volume {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational)]
        rho: Rational,
    },
    /// 1 − H_q(ρ).
    LdCapacity {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        rho: f64,
    },
    /// 1 − H_{q/ℓ}(1 − α) − log_q ℓ.
    LrCapacity {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Rate bound for average-radius list-recovery.
    AvgradRate(AvgRadArgs),
    /// List-size bound for average-radius list-recovery.
    AvgradListSize {
        #[command(flatten)]
        params: AvgRadArgs,
        #[arg(long, default_value_t = 1.0)]
        c_prime: f64,
    },
    /// Linear rate term, general and simplified.
    R0 {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        zeta: f64,
    },
    /// Agreement window where the linear term binds.
    Window {
        #[arg(long)]
        q: u64,
    },
    /// Large-alphabet corollary.
    LargeQ {
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        c_prime: f64,
    },
    /// High-rate corollary.
    HighRate {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Zero-error list-recovery rate and list size.
    Easy {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        zeta: f64,
        #[arg(long)]
        xi: f64,
        #[arg(long, value_enum, default_value = "full")]
        base: BaseArg,
    },
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn property_kind(s: &str) -> Result<PropertyKind, String> {
    s.parse().map_err(|e: rlc_core::Error| e.to_string())
}

/// Failures reported to the user; exit status 2.
struct Failure(String);

impl From<rlc_core::Error> for Failure {
    fn from(e: rlc_core::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure(e.to_string())
    }
}

/// Rendered output plus whether it records a violation.
struct Report {
    body: Vec<u8>,
    violation: bool,
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn json_body<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Flattens nested JSON into `key,value` rows with dotted keys.
fn flat_csv(value: &Value) -> Result<Vec<u8>, Failure> {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| walk(&key(k), v, rows)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| walk(&key(&i.to_string()), v, rows)),
            Value::String(s) => rows.push((prefix.to_string(), s.clone())),
            Value::Null => rows.push((prefix.to_string(), String::new())),
            other => rows.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.into_inner().map_err(|e| Failure(e.to_string()))
}

fn render<T: Serialize>(format: Format, value: &T) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => json_body(value),
        Format::Csv => flat_csv(&serde_json::to_value(value)?),
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let format = cli.format.unwrap_or(Format::Json);
    match &cli.command {
        Command::Gen(a) => {
            let field = Arc::new(a.field.spec()?);
            let k = match (a.rate, a.k) {
                (Some(r), _) => dimension_for_rate(a.n, r)?,
                (None, Some(k)) => k,
                (None, None) => return Err(Failure("give --rate or --k".into())),
            };
            let seed = cli.seed.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let code = sample_with_dimension(field, a.n, k, &mut rng, SampleOptions { condition_on_full_rank: a.full_rank })?.with_seed(Some(seed));
            Ok(Report { body: render(format, &harness::CodeFile::from_code(&code))?, violation: false })
        }
        Command::Check(a) => {
            let code = harness::code_from_json(&read(&a.code)?)?;
            let prop = make_property(a.property, a.rho, a.eps, a.ell, a.big_l)?;
            let omega = match a.omega {
                OmegaArg::TopL => OmegaMode::TopL,
                OmegaArg::Exhaustive => OmegaMode::Exhaustive,
            };
            let verdict = check(&code, &prop, &CheckOptions { omega, ..CheckOptions::default() })?;
            let mut value = serde_json::to_value(&verdict)?;
            if a.reverify {
                value["reverified"] = Value::Bool(reverify(&code, &prop, &verdict)?);
            }
            Ok(Report { body: render(format, &value)?, violation: !verdict.holds })
        }
        Command::Sigma(a) => {
            let set = harness::lambda_from_json(&read(&a.lambda)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0));
            let profile = sigma::sigma_profile(&set.field, set.d, &set.vectors, a.p_max.unwrap_or(set.d), a.samples, &mut rng)?;
            let goodness = match (a.zeta, a.ell) {
                (Some(z), Some(ell)) => Some(sigma::is_good_average(&set.field, set.d, &set.vectors, z, ell)?),
                _ => None,
            };
            let violation = goodness.as_ref().is_some_and(|g| !g.good);
            let body = if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["p", "exact", "value", "std_error", "mode", "sample_count"])?;
                for e in &profile.values {
                    let mode = serde_json::to_value(e.mode)?.as_str().unwrap_or_default().to_string();
                    w.write_record([
                        e.p.to_string(),
                        e.exact.clone().unwrap_or_default(),
                        e.value.to_string(),
                        e.std_error.map(|s| s.to_string()).unwrap_or_default(),
                        mode,
                        e.sample_count.to_string(),
                    ])?;
                }
                w.into_inner().map_err(|e| Failure(e.to_string()))?
            } else {
                json_body(&serde_json::json!({ "profile": profile, "goodness": goodness }))?
            };
            Ok(Report { body, violation })
        }
        Command::Extract(a) => {
            let set = harness::lambda_from_json(&read(&a.lambda)?)?;
            let found = sigma::extract_low_dim_subset(&set.field, set.d, &set.vectors, a.zeta, a.ell, a.budget)?;
            let violation = found.as_ref().is_some_and(|x| !x.meets_bound);
            let value = serde_json::json!({ "good": found.is_none(), "extraction": found });
            Ok(Report { body: render(format, &value)?, violation })
        }
        Command::Bounds { calc } => Ok(Report { body: render(format, &bounds_value(calc)?)?, violation: false }),
        Command::Rates(a) => {
            let (q, ell) = (a.q as f64, a.ell as f64);
            let start = a.start.unwrap_or_else(|| ((ell / q) / a.step + 1e-9).floor() * a.step + a.step);
            let points = bounds::rate_curve(q, ell, rlc_core::rational::to_f64(&a.zeta), &bounds::grid(start, a.end, a.step))?;
            let body = if cli.format == Some(Format::Json) {
                json_body(&points)?
            } else {
                let mut buf = Vec::new();
                bounds::write_rate_curve_csv(&points, &mut buf)?;
                buf
            };
            Ok(Report { body, violation: false })
        }
        Command::Experiment(a) => {
            let mut spec: ExperimentSpec = serde_json::from_str(&read(&a.config)?)?;
            if let Some(seed) = cli.seed {
                spec.master_seed = seed;
            }
            let results = if a.compare_uniform {
                let paired = harness::compare_random_vs_linear(&spec)?;
                vec![paired.linear, paired.uniform]
            } else {
                vec![harness::run_experiment(&spec)?]
            };
            let violation = results.iter().any(|r| r.failures > 0);
            let body = if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["ensemble", "index", "seed", "outcome"])?;
                for r in &results {
                    let ens = serde_json::to_value(r.ensemble)?.as_str().unwrap_or_default().to_string();
                    for t in &r.records {
                        let outcome = match &t.outcome {
                            harness::Outcome::Holds => "holds".to_string(),
                            harness::Outcome::Fails => "fails".to_string(),
                            harness::Outcome::Error(e) => format!("error: {e}"),
                        };
                        w.write_record([ens.clone(), t.index.to_string(), t.seed.to_string(), outcome])?;
                    }
                }
                w.into_inner().map_err(|e| Failure(e.to_string()))?
            } else if results.len() == 1 {
                json_body(&results[0])?
            } else {
                json_body(&serde_json::json!({ "schema": harness::PAIRED_SCHEMA, "linear": results[0], "uniform": results[1] }))?
            };
            Ok(Report { body, violation })
        }
    }
}

fn bounds_value(calc: &BoundsCmd) -> Result<Value, Failure> {
    use serde_json::json;
    Ok(match calc {
        BoundsCmd::Entropy { x, q } => json!({ "x": x, "q": q, "entropy": bounds::entropy_q(*x, *q)? }),
        BoundsCmd::ExpandUniform { x, q, terms } => {
            let series = bounds::entropy_expansion_around_uniform(*x, *q, *terms)?;
            let direct = bounds::entropy_q(1.0 - 1.0 / q - x, *q)?;
            json!({ "x": x, "q": q, "terms": terms, "series": series, "direct": direct, "abs_error": (series - direct).abs() })
        }
        BoundsCmd::ExpandLargeQ { y, q, terms } => {
            let series = bounds::entropy_expansion_large_q(*y, *q, *terms)?;
            let direct = bounds::entropy_q(*y, *q)?;
            json!({ "y": y, "q": q, "terms": terms, "series": series, "direct": direct, "abs_error": (series - direct).abs() })
        }
        BoundsCmd::Volume { q, n, rho } => {
            let vol = bounds::hamming_volume(*q, *n, *rho)?;
            json!({
                "q": q, "n": n, "rho": rlc_core::rational::format_rational(rho),
                "volume": vol.to_string(),
                "rate": bounds::volume_rate(*q, *n, *rho)?,
                "entropy": bounds::entropy_q(rlc_core::rational::to_f64(rho), *q as f64)?,
            })
        }
        BoundsCmd::LdCapacity { q, rho } => json!({ "q": q, "rho": rho, "capacity": bounds::ld_capacity(*q, *rho)? }),
        BoundsCmd::LrCapacity { q, ell, alpha } => json!({ "q": q, "ell": ell, "alpha": alpha, "capacity": bounds::lr_capacity(*q, *ell, *alpha)? }),
        BoundsCmd::AvgradRate(a) => {
            let p = a.params();
            json!({ "params": p, "bound": bounds::thm_avgrad_rate(&p)? })
        }
        BoundsCmd::AvgradListSize { params, c_prime } => {
            let p = params.params();
            json!({ "params": p, "c_prime": c_prime, "list_size": bounds::thm_avgrad_list_size(&p, *c_prime)? })
        }
        BoundsCmd::R0 { q, ell, eps, zeta } => serde_json::to_value(bounds::cor_avgrad_r0(*q, *ell, *eps, *zeta)?)?,
        BoundsCmd::Window { q } => {
            let (lo, hi) = bounds::cor_constantagr_window(*q);
            json!({ "q": q, "eps_low": lo, "eps_high": hi })
        }
        BoundsCmd::LargeQ { ell, gamma, delta, q, c, c_prime } => serde_json::to_value(bounds::cor_largeq_check(*ell, *gamma, *delta, *q, *c, *c_prime)?)?,
        BoundsCmd::HighRate { gamma, ell, q, c } => serde_json::to_value(bounds::cor_highratelr_check(*gamma, *ell, *q, *c)?)?,
        BoundsCmd::Easy { q, ell, zeta, xi, base } => {
            let base = match base {
                BaseArg::Full => EasyBase::Full,
                BaseArg::Q => EasyBase::Q,
            };
            serde_json::to_value(bounds::thm_easy_bounds(*q, *ell, *zeta, *xi, base)?)?
        }
    })
}

fn emit(cli: &Cli, body: &[u8]) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            let path = if path.is_relative() { harness::default_out_dir().join(path) } else { path.clone() };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, body)?;
        }
        None => std::io::stdout().lock().write_all(body)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&cli, &r.body).map(|_| r.violation)) {
        Ok(true) if cli.assert => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
