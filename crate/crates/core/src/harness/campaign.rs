use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::suites;
use crate::error::{invalid, Error, Result};
use crate::radii::{solve_radius, RadiusFamily, DEFAULT_TOL};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BOHRLAB_THREADS";

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_GRID_POINTS: usize = 20;
pub const MAX_DIM: usize = 16;
pub const MAX_DEGREE: usize = 256;

/// Radii at which the algebra suite checks the operator identities.
pub const ALGEBRA_RADII: [f64; 4] = [0.1, 0.3, 0.6, 0.9];

/// Largest sample modulus of the composition suite.
pub const COMPOSITION_RADIUS: f64 = 0.3;

/// A family of randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
pub enum Suite {
    /// Subadditivity, homogeneity, submultiplicativity and `M_r(I) = 1`.
    Algebra,
    /// `M_r(φ) ≤ r` for self-maps fixing the origin, `r ≤ 1/3`.
    Schwarz,
    /// `M_r(g ∘ φ) ≤ M_r(g)` for `r ≤ 1/3`.
    Subordination,
    /// `M_r(h · (g ∘ φ)) ≤ M · M_r(g)` for `r ≤ β/3`.
    QuasiSubordination { bound: f64, beta: f64 },
    /// `M_r(f ∘ φ) ≤ ‖f‖_∞` for `r ≤ 1/3` when `f(0)` is scalar.
    VonNeumann,
    /// `‖A_n‖ ≤ ‖I − |A_0|²‖` for contractions with scalar head.
    CoefficientBound,
    /// `M_r(F) ≤ 1` up to the radius solved for the family.
    Polyanalytic { family: RadiusFamily },
    /// Truncated composition against pointwise evaluation.
    Composition,
}

impl Suite {
    pub fn id(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Schwarz => "schwarz",
            Suite::Subordination => "subordination",
            Suite::QuasiSubordination { .. } => "quasi-subordination",
            Suite::VonNeumann => "von-neumann",
            Suite::CoefficientBound => "coefficient-bound",
            Suite::Polyanalytic { .. } => "polyanalytic",
            Suite::Composition => "composition",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Suite::QuasiSubordination { bound, beta } => {
                if !(bound > 0.0 && bound.is_finite()) {
                    return Err(invalid(format!("quasi-subordination bound M must be > 0, got {bound}")));
                }
                if !(beta > 0.0 && beta <= 1.0) {
                    return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
                }
                Ok(())
            }
            Suite::Polyanalytic { family } => suites::check_polyanalytic_family(&family),
            _ => Ok(()),
        }
    }

    /// Largest radius the suite's inequality is claimed for, if any.
    pub fn radius_limit(&self) -> Result<Option<f64>> {
        self.validate()?;
        Ok(match *self {
            Suite::Algebra | Suite::CoefficientBound => None,
            Suite::Schwarz | Suite::Subordination | Suite::VonNeumann => Some(1.0 / 3.0),
            Suite::QuasiSubordination { beta, .. } => Some(beta / 3.0),
            Suite::Polyanalytic { family } => Some(solve_radius(&family, DEFAULT_TOL)?.radius),
            Suite::Composition => Some(COMPOSITION_RADIUS),
        })
    }

    /// Twenty equispaced radii on `(0, R]`; the algebra suite uses a fixed
    /// list spread over the whole disk.
    pub fn default_grid(&self) -> Result<Vec<f64>> {
        Ok(match self.radius_limit()? {
            Some(max) => equispaced_grid(max, DEFAULT_GRID_POINTS),
            None => ALGEBRA_RADII.to_vec(),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `max · i / points` for `i = 1..=points`.
pub fn equispaced_grid(max: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|i| max * i as f64 / points as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(invalid(format!("unknown format '{s}', expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: ReportFormat,
}

impl OutputSpec {
    pub fn new(path: impl Into<PathBuf>, format: ReportFormat) -> Self {
        Self {
            path: path.into(),
            format,
        }
    }

    /// Directory receiving the instances of failed trials.
    pub fn failure_dir(&self) -> PathBuf {
        let mut name = self.path.file_name().unwrap_or_default().to_os_string();
        name.push(".failures");
        self.path.with_file_name(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub degree: usize,
    pub r_grid: Vec<f64>,
    pub tolerance: f64,
    /// Permit radii beyond the range the suite's inequality is claimed for.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub explore: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl CampaignConfig {
    /// Defaults: `dim = 3`, `degree = 64`, the suite's default grid and
    /// tolerance `1e-8`.
    pub fn new(suite: Suite, trials: usize, seed: u64) -> Result<Self> {
        let (dim, degree) = match suite {
            Suite::Algebra => (4, 32),
            _ => (3, 64),
        };
        Ok(Self {
            suite,
            trials,
            seed,
            dim,
            degree,
            r_grid: suite.default_grid()?,
            tolerance: DEFAULT_TOLERANCE,
            explore: false,
            output: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.suite.validate()?;
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if !(1..=MAX_DIM).contains(&self.dim) {
            return Err(invalid(format!("dim must lie in 1..={MAX_DIM}, got {}", self.dim)));
        }
        if !(1..=MAX_DEGREE).contains(&self.degree) {
            return Err(invalid(format!("degree must lie in 1..={MAX_DEGREE}, got {}", self.degree)));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(invalid(format!("tolerance must be finite and >= 0, got {}", self.tolerance)));
        }
        if self.r_grid.is_empty() {
            return Err(invalid("radius grid is empty"));
        }
        if let Some(r) = self.r_grid.iter().find(|r| !(r.is_finite() && (0.0..1.0).contains(*r))) {
            return Err(Error::RadiusOutOfRange(*r));
        }
        if let Some(max) = self.suite.radius_limit()?.filter(|_| !self.explore) {
            // Grids built from the limit itself must pass despite rounding.
            let slack = 4.0 * f64::EPSILON * max;
            if let Some(r) = self.r_grid.iter().find(|r| **r > max + slack) {
                return Err(invalid(format!(
                    "radius {r} exceeds the {} range {max}",
                    self.suite.id()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub instance_seed: u64,
    pub params: BTreeMap<String, Value>,
    /// Minimum over the grid of bound minus value; `None` if the trial errored.
    pub worst_margin: Option<f64>,
    pub worst_r: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_file: Option<PathBuf>,
}

/// Order-independent aggregate of trial outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass_count: usize,
    pub fail_count: usize,
    pub min_margin: Option<f64>,
}

impl Summary {
    pub fn of(record: &TrialRecord) -> Self {
        Self {
            pass_count: record.pass as usize,
            fail_count: !record.pass as usize,
            min_margin: record.worst_margin,
        }
    }

    /// Associative and commutative.
    pub fn merge(self, other: Self) -> Self {
        Self {
            pass_count: self.pass_count + other.pass_count,
            fail_count: self.fail_count + other.fail_count,
            min_margin: match (self.min_margin, other.min_margin) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

impl<'a> FromIterator<&'a TrialRecord> for Summary {
    fn from_iter<I: IntoIterator<Item = &'a TrialRecord>>(iter: I) -> Self {
        iter.into_iter().map(Summary::of).fold(Summary::default(), Summary::merge)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: CampaignConfig,
    #[serde(flatten)]
    pub summary: Summary,
    pub wall_time_secs: f64,
    pub trials: Vec<TrialRecord>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.fail_count == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.trials.iter().filter(|t| !t.pass)
    }

    pub fn write(&self, out: &OutputSpec) -> Result<()> {
        if let Some(parent) = out.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        match out.format {
            ReportFormat::Json => fs::write(&out.path, serde_json::to_string_pretty(self)? + "\n")?,
            ReportFormat::Csv => self.write_csv(&out.path)?,
        }
        Ok(())
    }

    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["trial", "instance_seed", "pass", "worst_margin", "worst_r", "params", "error"])?;
        for t in &self.trials {
            w.write_record([
                t.trial.to_string(),
                t.instance_seed.to_string(),
                t.pass.to_string(),
                t.worst_margin.map(|m| m.to_string()).unwrap_or_default(),
                t.worst_r.map(|r| r.to_string()).unwrap_or_default(),
                serde_json::to_string(&t.params)?,
                t.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seed of trial `trial`: the first output of the ChaCha stream `trial`
/// under the campaign seed.
pub fn derive_instance_seed(seed: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng.next_u64()
}

/// Thread cap from `BOHRLAB_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `f` on a pool capped at `threads` workers, or on the global pool.
pub fn with_thread_cap<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Runs a campaign with the thread cap taken from `BOHRLAB_THREADS`.
pub fn run_campaign(config: &CampaignConfig) -> Result<Report> {
    run_campaign_with_threads(config, threads_from_env()?)
}

pub fn run_campaign_with_threads(config: &CampaignConfig, threads: Option<usize>) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut trials: Vec<TrialRecord> = with_thread_cap(threads, || {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| run_trial(config, trial))
            .collect()
    })?;

    if let Some(out) = &config.output {
        let failed: Vec<usize> = trials.iter().filter(|t| !t.pass).map(|t| t.trial).collect();
        if !failed.is_empty() {
            let dir = out.failure_dir();
            fs::create_dir_all(&dir)?;
            for idx in failed {
                let path = dir.join(format!("trial-{idx}.json"));
                write_instance(config, &trials[idx], &path)?;
                trials[idx].instance_file = Some(path);
            }
        }
    }

    let summary = trials.iter().collect();
    Ok(Report {
        suite: config.suite.id().to_string(),
        config: config.clone(),
        summary,
        wall_time_secs: start.elapsed().as_secs_f64(),
        trials,
    })
}

fn run_trial(config: &CampaignConfig, trial: usize) -> TrialRecord {
    let instance_seed = derive_instance_seed(config.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
    match suites::evaluate(config, &mut rng, false) {
        Ok(eval) => TrialRecord {
            trial,
            instance_seed,
            params: eval.params,
            worst_margin: Some(eval.worst.margin),
            worst_r: eval.worst.r,
            pass: eval.worst.margin >= -config.tolerance,
            error: None,
            instance_file: None,
        },
        Err(e) => TrialRecord {
            trial,
            instance_seed,
            params: BTreeMap::new(),
            worst_margin: None,
            worst_r: None,
            pass: false,
            error: Some(e.to_string()),
            instance_file: None,
        },
    }
}

/// Regenerates a trial from its seed and writes the instance for replay.
fn write_instance(config: &CampaignConfig, record: &TrialRecord, path: &Path) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(record.instance_seed);
    let instance = match suites::evaluate(config, &mut rng, true) {
        Ok(eval) => eval.instance.unwrap_or(Value::Null),
        Err(e) => Value::String(e.to_string()),
    };
    let doc = serde_json::json!({
        "suite": config.suite,
        "trial": record.trial,
        "instance_seed": record.instance_seed,
        "worst_margin": record.worst_margin,
        "worst_r": record.worst_r,
        "instance": instance,
    });
    fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

/// Replays one trial and returns its record together with the instance.
pub fn replay_trial(config: &CampaignConfig, trial: usize) -> Result<(TrialRecord, Value)> {
    config.validate()?;
    let record = run_trial(config, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(record.instance_seed);
    let instance = suites::evaluate(config, &mut rng, true)?.instance.unwrap_or(Value::Null);
    Ok((record, instance))
}
