//! File formats and seeded Monte Carlo experiments.
//!
//! Trial i of an experiment draws its code from `ChaCha8Rng` seeded with
//! [`trial_seed`]`(master_seed, i)`, a SplitMix64 hash of the pair. Trials are
//! therefore independent of scheduling, and the same master seed gives the same
//! codes across every point of a parameter sweep (common random numbers).

use crate::checkers::{check_codebook, CheckOptions, Codebook, Property};
use crate::codes::{sample_with_dimension, LinearCode, SampleOptions};
use crate::error::{Error, Result};
use crate::fqla::{from_indices, to_indices, MatrixFq};
use crate::galois::{Fe, Field, FieldSpec};
use crate::rational::{serde_rational, serde_rational_opt, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

pub const CODE_SCHEMA: &str = "rlc.code/1";
pub const LAMBDA_SCHEMA: &str = "rlc.lambda/1";
pub const EXPERIMENT_SCHEMA: &str = "rlc.experiment/1";
pub const RESULT_SCHEMA: &str = "rlc.experiment-result/1";
pub const PAIRED_SCHEMA: &str = "rlc.paired-result/1";

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RLC_OUT_DIR";

/// `$RLC_OUT_DIR`, or the current directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn expect_schema(found: &str, wanted: &str) -> Result<()> {
    if found != wanted {
        return Err(Error::InvalidInput(format!("schema {found:?} where {wanted:?} was expected")));
    }
    Ok(())
}

fn code_schema() -> String {
    CODE_SCHEMA.into()
}

fn lambda_schema() -> String {
    LAMBDA_SCHEMA.into()
}

/// On-disk form of a linear code. A missing `schema` reads as the current one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(default = "code_schema")]
    pub schema: String,
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
    /// Row-major n × k generator, entries as element indices.
    pub generator: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CodeFile {
    pub fn from_code(code: &LinearCode) -> CodeFile {
        CodeFile {
            schema: CODE_SCHEMA.into(),
            field: (**code.field()).clone(),
            n: code.n(),
            k: code.k(),
            generator: code.generator().row_vecs().iter().map(|r| to_indices(r)).collect(),
            seed: code.seed(),
        }
    }

    pub fn to_code(&self) -> Result<LinearCode> {
        expect_schema(&self.schema, CODE_SCHEMA)?;
        if self.generator.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: self.generator.len() });
        }
        let f: Field = Arc::new(self.field.clone());
        let rows = self
            .generator
            .iter()
            .map(|r| from_indices(&f, r))
            .collect::<Result<Vec<Vec<Fe>>>>()?;
        let g = MatrixFq::from_rows(f, self.k, &rows)?;
        Ok(LinearCode::new(g)?.with_seed(self.seed))
    }
}

pub fn code_to_json(code: &LinearCode) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CodeFile::from_code(code))?)
}

pub fn code_from_json(s: &str) -> Result<LinearCode> {
    serde_json::from_str::<CodeFile>(s)?.to_code()
}

/// On-disk form of a message set Λ ⊆ F^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaFile {
    #[serde(default = "lambda_schema")]
    pub schema: String,
    pub field: FieldSpec,
    pub d: usize,
    pub vectors: Vec<Vec<u32>>,
}

/// A parsed Λ file.
#[derive(Clone, Debug)]
pub struct LambdaSet {
    pub field: Field,
    pub d: usize,
    pub vectors: Vec<Vec<Fe>>,
}

impl LambdaFile {
    pub fn new(field: &FieldSpec, d: usize, vectors: &[Vec<Fe>]) -> LambdaFile {
        LambdaFile { schema: LAMBDA_SCHEMA.into(), field: field.clone(), d, vectors: vectors.iter().map(|v| to_indices(v)).collect() }
    }

    /// Validates lengths and entries and rejects repeated vectors.
    pub fn parse(&self) -> Result<LambdaSet> {
        expect_schema(&self.schema, LAMBDA_SCHEMA)?;
        let field: Field = Arc::new(self.field.clone());
        let mut seen = HashSet::with_capacity(self.vectors.len());
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: v.len() });
            }
            if !seen.insert(v) {
                return Err(Error::DuplicateVector(i));
            }
            vectors.push(from_indices(&field, v)?);
        }
        Ok(LambdaSet { field, d: self.d, vectors })
    }
}

pub fn lambda_from_json(s: &str) -> Result<LambdaSet> {
    serde_json::from_str::<LambdaFile>(s)?.parse()
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Wilson score interval at z = 1.96.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyKind {
    #[serde(rename = "LD")]
    ListDecoding,
    #[serde(rename = "ARLD")]
    AvgRadiusListDecoding,
    #[serde(rename = "LR")]
    ListRecovery,
    #[serde(rename = "ARLR")]
    AvgRadiusListRecovery,
    #[serde(rename = "ZELR")]
    ZeroErrorListRecovery,
}

impl std::str::FromStr for PropertyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "LD" => PropertyKind::ListDecoding,
            "ARLD" => PropertyKind::AvgRadiusListDecoding,
            "LR" => PropertyKind::ListRecovery,
            "ARLR" => PropertyKind::AvgRadiusListRecovery,
            "ZELR" => PropertyKind::ZeroErrorListRecovery,
            _ => return Err(Error::InvalidInput(format!("unknown property {s:?}; expected LD, ARLD, LR, ARLR or ZELR"))),
        })
    }
}

/// Builds a [`Property`]. Decoding properties read `rho`; recovery ones read
/// `eps` as the agreement parameter.
pub fn make_property(kind: PropertyKind, rho: Option<Rational>, eps: Option<Rational>, ell: Option<usize>, big_l: usize) -> Result<Property> {
    let need = |v: Option<Rational>, name: &str| v.ok_or_else(|| Error::InvalidInput(format!("property needs {name}")));
    let ell_v = || ell.ok_or_else(|| Error::InvalidInput("property needs ell".into()));
    Ok(match kind {
        PropertyKind::ListDecoding => Property::ListDecoding { rho: need(rho, "rho")?, big_l },
        PropertyKind::AvgRadiusListDecoding => Property::AvgRadiusListDecoding { rho: need(rho, "rho")?, big_l },
        PropertyKind::ListRecovery => Property::ListRecovery { alpha: need(eps, "eps")?, ell: ell_v()?, big_l },
        PropertyKind::AvgRadiusListRecovery => Property::AvgRadiusListRecovery { eps: need(eps, "eps")?, ell: ell_v()?, big_l },
        PropertyKind::ZeroErrorListRecovery => Property::ZeroErrorListRecovery { ell: ell_v()?, big_l },
    })
}

fn default_schema() -> String {
    EXPERIMENT_SCHEMA.into()
}

/// A Monte Carlo experiment over random linear codes of rate R.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub field: FieldSpec,
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub rate: Rational,
    pub property: PropertyKind,
    #[serde(default, with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub rho: Option<Rational>,
    #[serde(default, with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub eps: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(rename = "L")]
    pub big_l: usize,
    pub trials: u64,
    pub master_seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default)]
    pub condition_on_full_rank: bool,
}

impl ExperimentSpec {
    pub fn property_value(&self) -> Result<Property> {
        make_property(self.property, self.rho, self.eps, self.ell, self.big_l)
    }

    pub fn dimension(&self) -> Result<usize> {
        crate::codes::dimension_for_rate(self.n, self.rate)
    }

    pub fn validate(&self) -> Result<()> {
        expect_schema(&self.schema, EXPERIMENT_SCHEMA)?;
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        self.dimension()?;
        self.property_value()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Random linear codes.
    Linear,
    /// q^k iid uniform words.
    Uniform,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema: String,
    pub spec: ExperimentSpec,
    pub ensemble: Ensemble,
    pub trials: u64,
    pub failures: u64,
    /// Trials whose check raised an error; excluded from the rate.
    pub errors: u64,
    pub failure_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub records: Vec<TrialRecord>,
    pub wall_time_secs: f64,
}

impl ExperimentResult {
    /// Whether trial i failed.
    pub fn failed(&self, i: usize) -> bool {
        self.records[i].outcome == Outcome::Fails
    }
}

/// The code of trial `index`.
pub fn trial_code(spec: &ExperimentSpec, index: u64) -> Result<LinearCode> {
    let seed = trial_seed(spec.master_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SampleOptions { condition_on_full_rank: spec.condition_on_full_rank };
    let code = sample_with_dimension(Arc::new(spec.field.clone()), spec.n, spec.dimension()?, &mut rng, opts)?;
    Ok(code.with_seed(Some(seed)))
}

/// q^k iid uniform words of length n drawn from trial `index`'s seed.
pub fn trial_uniform_words(spec: &ExperimentSpec, index: u64) -> Result<Vec<Vec<Fe>>> {
    let k = spec.dimension()?;
    let q = spec.field.q();
    let count = (q as u64).checked_pow(k as u32).filter(|&c| c <= crate::codes::DEFAULT_CODEWORD_CAP).ok_or(Error::EnumerationTooLarge {
        needed: (q as u128).saturating_pow(k as u32),
        cap: crate::codes::DEFAULT_CODEWORD_CAP as u128,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.master_seed, index));
    Ok((0..count).map(|_| (0..spec.n).map(|_| Fe(rng.gen_range(0..q) as u16)).collect()).collect())
}

fn run_trial(spec: &ExperimentSpec, prop: &Property, ensemble: Ensemble, index: u64) -> TrialRecord {
    let seed = trial_seed(spec.master_seed, index);
    let opts = CheckOptions::default();
    let field: Field = Arc::new(spec.field.clone());
    let verdict = match ensemble {
        Ensemble::Linear => trial_code(spec, index).and_then(|c| Codebook::from_code(&c, opts.caps.codewords)),
        Ensemble::Uniform => trial_uniform_words(spec, index).and_then(|w| Codebook::from_words(field, spec.dimension()?, &w)),
    }
    .and_then(|book| check_codebook(&book, prop, &opts));
    let outcome = match verdict {
        Ok(v) if v.holds => Outcome::Holds,
        Ok(_) => Outcome::Fails,
        Err(e) => Outcome::Error(e.to_string()),
    };
    TrialRecord { index, seed, outcome }
}

fn run_ensemble(spec: &ExperimentSpec, ensemble: Ensemble) -> Result<ExperimentResult> {
    spec.validate()?;
    let prop = spec.property_value()?;
    let start = Instant::now();
    let work = || -> Vec<TrialRecord> { (0..spec.trials).into_par_iter().map(|i| run_trial(spec, &prop, ensemble, i)).collect() };
    let records = if spec.parallelism == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.parallelism)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(work)
    };
    let failures = records.iter().filter(|r| r.outcome == Outcome::Fails).count() as u64;
    let errors = records.iter().filter(|r| matches!(r.outcome, Outcome::Error(_))).count() as u64;
    let done = spec.trials - errors;
    let (wilson_low, wilson_high) = wilson_interval(failures, done);
    Ok(ExperimentResult {
        schema: RESULT_SCHEMA.into(),
        spec: spec.clone(),
        ensemble,
        trials: spec.trials,
        failures,
        errors,
        failure_rate: if done == 0 { 0.0 } else { failures as f64 / done as f64 },
        wilson_low,
        wilson_high,
        records,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Estimates the probability that a random linear code fails the property.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_ensemble(spec, Ensemble::Linear)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairedResult {
    pub schema: String,
    pub linear: ExperimentResult,
    pub uniform: ExperimentResult,
}

/// Runs the same spec on random linear codes and on q^k iid uniform words,
/// with the same trial seeds.
pub fn compare_random_vs_linear(spec: &ExperimentSpec) -> Result<PairedResult> {
    Ok(PairedResult { schema: PAIRED_SCHEMA.into(), linear: run_ensemble(spec, Ensemble::Linear)?, uniform: run_ensemble(spec, Ensemble::Uniform)? })
}

/// Writes pretty JSON to `path`, creating parent directories.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
