//! Experiment configuration, execution, and deterministic data export.
//!
//! A JSON config selects one experiment kind and its parameters; `run`
//! executes it into an output directory, writing plot-ready CSV/JSON data
//! plus a `manifest.json` with the fully resolved config, the crate
//! version, and SHA-256 checksums of every data file. Runs are
//! deterministic: same config and seed give byte-identical files.
//!
//! Parsing is strict: unknown fields anywhere in the document are rejected
//! with the offending path, so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dynamics::{AtomCase, DKParams, DEFAULT_TOL, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::filters::{
    adiabatic_filter, dk_filter, numeric_filter, resonant_filter, FilterTable, Kappa,
};
use crate::fockspace::{make_distribution, InitialFieldSpec, PhotonDistribution};
use crate::measurement::{
    binomial_closed_form, brute_force_ensemble, ensemble_run, sample_trajectories,
};
use crate::seeding::derive_seed;
use crate::trapping::{run_schedule, NoiseModel, Schedule, ScheduleOutcome};

/// Tabular output encoding. Structured outputs (trajectories, manifests)
/// are always JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// How to build the per-manifold stay-probability table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FilterSpec {
    /// Exact pulse-shaped crossing result.
    Dk { lambda1: f64, lambda2: f64, eta: f64 },
    /// Constant resonant coupling, cos^2(pi eta sqrt(n)).
    Resonant { eta: f64 },
    /// Adiabatic limit: constant stay probability kappa for n >= 1.
    Adiabatic { kappa: f64 },
    /// Numerically integrated propagator (the oracle route).
    Numeric {
        lambda1: f64,
        lambda2: f64,
        eta: f64,
        #[serde(default = "default_window")]
        window: f64,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

impl FilterSpec {
    pub fn build(&self, case: AtomCase, nmax: usize) -> Result<FilterTable> {
        match self {
            FilterSpec::Dk {
                lambda1,
                lambda2,
                eta,
            } => dk_filter(*lambda1, *lambda2, *eta, nmax),
            FilterSpec::Resonant { eta } => {
                if !(*eta >= 0.0) || !eta.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "resonant filter needs eta >= 0, got {eta}"
                    )));
                }
                Ok(resonant_filter(*eta, nmax))
            }
            FilterSpec::Adiabatic { kappa } => Ok(adiabatic_filter(Kappa::new(*kappa)?, nmax)),
            FilterSpec::Numeric {
                lambda1,
                lambda2,
                eta,
                window,
                tol,
            } => {
                let params = DKParams::from_dimensionless(*lambda1, *lambda2, *eta)?;
                numeric_filter(&params, case, nmax, *window, *tol)
            }
        }
    }
}

/// Velocity schedule shape; the trapping target and atom count come from
/// the surrounding config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ScheduleKind {
    /// Every atom at the coupling trapping (target, q).
    Fixed { q: u64 },
    /// Atom j at the coupling trapping (target, q_start + j - 1).
    Incrementing { q_start: u64 },
    /// Explicit per-atom eta list; its length overrides the atom count.
    Custom { etas: Vec<f64> },
}

impl ScheduleKind {
    pub fn build(&self, target: usize, atoms: usize) -> Result<Schedule> {
        match self {
            ScheduleKind::Fixed { q } => crate::trapping::make_schedule_fixed(target, *q, atoms),
            ScheduleKind::Incrementing { q_start } => {
                crate::trapping::make_schedule_incrementing(target, *q_start, atoms)
            }
            ScheduleKind::Custom { etas } => Schedule::new(etas.clone()),
        }
    }
}

/// One curve of a trap-schedule experiment: a schedule shape plus the
/// relative velocity noise applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    /// Output name; also the data file suffix, so it must be nonempty and
    /// use only `[A-Za-z0-9_-]`.
    pub label: String,
    pub schedule: ScheduleKind,
    #[serde(default)]
    pub sigma: f64,
}

/// Options shared by every experiment kind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CommonOpts {
    /// Master seed; every random stream in the run derives from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    /// Default output directory (CLI flag takes precedence).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_filter_nmax() -> usize {
    100
}
fn default_count() -> usize {
    1000
}
fn default_realizations() -> usize {
    200
}
fn default_case() -> AtomCase {
    AtomCase::A
}
fn default_oracle_tolerance() -> f64 {
    1e-6
}
fn default_oracle_nmax() -> usize {
    30
}
fn default_window() -> f64 {
    DEFAULT_WINDOW
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// A fully described experiment, selected by the JSON field "kind".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    /// Tabulate a filter and write it out.
    FilterDump {
        filter: FilterSpec,
        #[serde(default = "default_filter_nmax")]
        nmax: usize,
        #[serde(default = "default_case")]
        case: AtomCase,
        #[serde(flatten)]
        common: CommonOpts,
    },
    /// Nonselective evolution: full P_m(n) history.
    Ensemble {
        initial: InitialFieldSpec,
        filter: FilterSpec,
        case: AtomCase,
        atoms: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nmax: Option<usize>,
        #[serde(flatten)]
        common: CommonOpts,
    },
    /// Monte Carlo selective records.
    Trajectories {
        initial: InitialFieldSpec,
        filter: FilterSpec,
        case: AtomCase,
        atoms: usize,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nmax: Option<usize>,
        #[serde(flatten)]
        common: CommonOpts,
    },
    /// Exhaustive outcome average, cross-checked against the recurrence.
    BruteForce {
        initial: InitialFieldSpec,
        filter: FilterSpec,
        case: AtomCase,
        atoms: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nmax: Option<usize>,
        #[serde(flatten)]
        common: CommonOpts,
    },
    /// Closed-form adiabatic pumping distribution.
    Binomial {
        kappa: f64,
        atoms: usize,
        #[serde(flatten)]
        common: CommonOpts,
    },
    /// Velocity schedules toward a trapped Fock state, optionally noisy.
    TrapSchedule {
        initial: InitialFieldSpec,
        target: usize,
        atoms: usize,
        curves: Vec<CurveSpec>,
        #[serde(default = "default_case")]
        case: AtomCase,
        #[serde(default = "default_realizations")]
        realizations: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nmax: Option<usize>,
        #[serde(flatten)]
        common: CommonOpts,
    },
    /// Sweep the exact filter against the integrated propagator.
    ValidateOracle {
        #[serde(default = "default_oracle_tolerance")]
        tolerance: f64,
        #[serde(default = "default_oracle_nmax")]
        nmax: usize,
        #[serde(default = "default_window")]
        window: f64,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(flatten)]
        common: CommonOpts,
    },
}

impl ExperimentConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::FilterDump { .. } => "filter-dump",
            Self::Ensemble { .. } => "ensemble",
            Self::Trajectories { .. } => "trajectories",
            Self::BruteForce { .. } => "brute-force",
            Self::Binomial { .. } => "binomial",
            Self::TrapSchedule { .. } => "trap-schedule",
            Self::ValidateOracle { .. } => "validate-oracle",
        }
    }

    pub fn common(&self) -> &CommonOpts {
        match self {
            Self::FilterDump { common, .. }
            | Self::Ensemble { common, .. }
            | Self::Trajectories { common, .. }
            | Self::BruteForce { common, .. }
            | Self::Binomial { common, .. }
            | Self::TrapSchedule { common, .. }
            | Self::ValidateOracle { common, .. } => common,
        }
    }

    pub fn common_mut(&mut self) -> &mut CommonOpts {
        match self {
            Self::FilterDump { common, .. }
            | Self::Ensemble { common, .. }
            | Self::Trajectories { common, .. }
            | Self::BruteForce { common, .. }
            | Self::Binomial { common, .. }
            | Self::TrapSchedule { common, .. }
            | Self::ValidateOracle { common, .. } => common,
        }
    }

    /// Cheap semantic validation beyond what serde can express: parameter
    /// ranges, curve labels, and initial-state truncation feasibility.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::FilterDump { filter, case, .. } => {
                filter.build(*case, 0)?;
            }
            Self::Ensemble {
                initial,
                filter,
                case,
                nmax,
                ..
            }
            | Self::Trajectories {
                initial,
                filter,
                case,
                nmax,
                ..
            }
            | Self::BruteForce {
                initial,
                filter,
                case,
                nmax,
                ..
            } => {
                filter.build(*case, 0)?;
                resolve_initial(initial, *nmax)?;
            }
            Self::Binomial { kappa, .. } => {
                Kappa::new(*kappa)?;
            }
            Self::TrapSchedule {
                initial,
                target,
                atoms,
                curves,
                realizations,
                nmax,
                ..
            } => {
                resolve_initial(initial, *nmax)?;
                if curves.is_empty() {
                    return Err(Error::Config("curves must not be empty".into()));
                }
                if *realizations == 0 {
                    return Err(Error::Config("realizations must be >= 1".into()));
                }
                let mut seen = std::collections::BTreeSet::new();
                for curve in curves {
                    let ok_label = !curve.label.is_empty()
                        && curve
                            .label
                            .chars()
                            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
                    if !ok_label {
                        return Err(Error::Config(format!(
                            "curve label {:?} must be nonempty and use only letters, digits, '_', '-'",
                            curve.label
                        )));
                    }
                    if !seen.insert(curve.label.clone()) {
                        return Err(Error::Config(format!(
                            "duplicate curve label {:?}",
                            curve.label
                        )));
                    }
                    NoiseModel::new(curve.sigma, 0)?;
                    curve.schedule.build(*target, (*atoms).max(1))?;
                }
            }
            Self::ValidateOracle {
                tolerance,
                window,
                tol,
                ..
            } => {
                if !(*tolerance > 0.0) {
                    return Err(Error::Config(format!(
                        "tolerance must be > 0, got {tolerance}"
                    )));
                }
                if !(*window >= 10.0) {
                    return Err(Error::Config(format!(
                        "window must be >= 10, got {window}"
                    )));
                }
                if !(*tol > 0.0) {
                    return Err(Error::Config(format!(
                        "integrator tol must be > 0, got {tol}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn resolve_initial(
    initial: &InitialFieldSpec,
    nmax: Option<usize>,
) -> Result<PhotonDistribution> {
    let nmax = nmax.unwrap_or_else(|| initial.default_nmax());
    make_distribution(initial, nmax)
}

// ---------------------------------------------------------------------------
// Strict parsing

const COMMON_KEYS: &[&str] = &["kind", "seed", "format", "out"];

fn kind_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "filter-dump" => &["filter", "nmax", "case"],
        "ensemble" => &["initial", "filter", "case", "atoms", "nmax"],
        "trajectories" => &["initial", "filter", "case", "atoms", "count", "nmax"],
        "brute-force" => &["initial", "filter", "case", "atoms", "nmax"],
        "binomial" => &["kappa", "atoms"],
        "trap-schedule" => &[
            "initial",
            "target",
            "atoms",
            "curves",
            "case",
            "realizations",
            "nmax",
        ],
        "validate-oracle" => &["tolerance", "nmax", "window", "tol"],
        _ => return None,
    })
}

fn tagged_keys(path: &str, tag: &str) -> Option<&'static [&'static str]> {
    Some(match (path, tag) {
        ("filter", "dk") => &["type", "lambda1", "lambda2", "eta"],
        ("filter", "resonant") => &["type", "eta"],
        ("filter", "adiabatic") => &["type", "kappa"],
        ("filter", "numeric") => &["type", "lambda1", "lambda2", "eta", "window", "tol"],
        ("initial", "vacuum") => &["kind"],
        ("initial", "fock") => &["kind", "n"],
        ("initial", "coherent") => &["kind", "nbar", "tail_epsilon"],
        ("schedule", "fixed") => &["type", "q"],
        ("schedule", "incrementing") => &["type", "q_start"],
        ("schedule", "custom") => &["type", "etas"],
        _ => return None,
    })
}

fn check_object<'a>(
    value: &'a Value,
    path: &str,
    tag_field: &str,
    lookup: impl Fn(&str) -> Option<&'static [&'static str]>,
) -> Result<&'a serde_json::Map<String, Value>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Config(format!("{path}: expected a JSON object")))?;
    let tag = obj
        .get(tag_field)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Config(format!("{path}: missing string field \"{tag_field}\"")))?;
    let allowed = lookup(tag)
        .ok_or_else(|| Error::Config(format!("{path}: unknown {tag_field} \"{tag}\"")))?;
    for key in obj.keys() {
        let known = allowed.contains(&key.as_str())
            || (tag_field == "kind" && path == "config" && COMMON_KEYS.contains(&key.as_str()));
        if !known {
            return Err(Error::Config(format!(
                "{path}: unknown field \"{key}\" for {tag_field} \"{tag}\""
            )));
        }
    }
    Ok(obj)
}

/// Rejects unknown fields anywhere in the document, with the field's path.
fn check_unknown_fields(root: &Value) -> Result<()> {
    let obj = check_object(root, "config", "kind", kind_keys)?;
    if let Some(filter) = obj.get("filter") {
        check_object(filter, "filter", "type", |t| tagged_keys("filter", t))?;
    }
    if let Some(initial) = obj.get("initial") {
        check_object(initial, "initial", "kind", |t| tagged_keys("initial", t))?;
    }
    if let Some(curves) = obj.get("curves") {
        let arr = curves
            .as_array()
            .ok_or_else(|| Error::Config("curves: expected a JSON array".into()))?;
        for (i, curve) in arr.iter().enumerate() {
            let path = format!("curves[{i}]");
            let cobj = curve
                .as_object()
                .ok_or_else(|| Error::Config(format!("{path}: expected a JSON object")))?;
            for key in cobj.keys() {
                if !["label", "schedule", "sigma"].contains(&key.as_str()) {
                    return Err(Error::Config(format!("{path}: unknown field \"{key}\"")));
                }
            }
            let schedule = cobj
                .get("schedule")
                .ok_or_else(|| Error::Config(format!("{path}: missing field \"schedule\"")))?;
            check_object(schedule, &format!("{path}.schedule"), "type", |t| {
                tagged_keys("schedule", t)
            })?;
        }
    }
    Ok(())
}

/// Parses and validates a JSON experiment config. Unknown fields are
/// rejected with their path; type and range problems name the field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
    check_unknown_fields(&root)?;
    let config: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("config rejected: {e}")))?;
    config.validate()?;
    Ok(config)
}

// ---------------------------------------------------------------------------
// Presets

/// Named ready-made configs. `fig1`: nonselective resonant pumping of a
/// bright coherent state, showing mass piling up on trapped photon numbers.
/// `fig2`: fixed vs q-incrementing velocity schedules toward the Fock state
/// |10>, noiseless and with 2% velocity noise.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    preset_with(name, None, None, None)
}

/// Preset with the parameters the experiments leave free: atom count,
/// truncation bound, and (fig2) noise realizations.
pub fn preset_with(
    name: &str,
    atoms: Option<usize>,
    nmax: Option<usize>,
    realizations: Option<usize>,
) -> Result<ExperimentConfig> {
    match name {
        "fig1" => Ok(ExperimentConfig::Ensemble {
            initial: InitialFieldSpec::coherent(47.0),
            filter: FilterSpec::Resonant { eta: 1.0 },
            case: AtomCase::A,
            atoms: atoms.unwrap_or(1000),
            nmax,
            common: CommonOpts::default(),
        }),
        "fig2" => {
            let fixed = ScheduleKind::Fixed { q: 1 };
            let inc = ScheduleKind::Incrementing { q_start: 1 };
            Ok(ExperimentConfig::TrapSchedule {
                initial: InitialFieldSpec::coherent(4.0),
                target: 10,
                atoms: atoms.unwrap_or(150),
                curves: vec![
                    CurveSpec {
                        label: "fixed_noiseless".into(),
                        schedule: fixed.clone(),
                        sigma: 0.0,
                    },
                    CurveSpec {
                        label: "incrementing_noiseless".into(),
                        schedule: inc.clone(),
                        sigma: 0.0,
                    },
                    CurveSpec {
                        label: "fixed_noisy".into(),
                        schedule: fixed,
                        sigma: 0.02,
                    },
                    CurveSpec {
                        label: "incrementing_noisy".into(),
                        schedule: inc,
                        sigma: 0.02,
                    },
                ],
                case: AtomCase::A,
                realizations: realizations.unwrap_or(200),
                nmax,
                common: CommonOpts::default(),
            })
        }
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; available: fig1, fig2"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Execution

/// What a run produced: file list (manifest last), human-readable summary
/// lines, and whether all internal checks held (false only when
/// validate-oracle exceeds its tolerance).
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub ok: bool,
}

#[derive(Serialize)]
struct Manifest<'a> {
    crate_version: &'a str,
    config: Value,
    /// file name -> SHA-256 of its bytes.
    checksums: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(64);
    for byte in Sha256::digest(bytes) {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn ensemble_csv(history: &[PhotonDistribution]) -> String {
    let mut out = String::from("m,n,probability\n");
    for (m, d) in history.iter().enumerate() {
        for (n, &p) in d.probs().iter().enumerate() {
            let _ = writeln!(out, "{m},{n},{}", fmt_f64(p));
        }
    }
    out
}

fn distribution_file(
    name: &str,
    d: &PhotonDistribution,
    format: OutputFormat,
) -> Result<(String, String)> {
    Ok(match format {
        OutputFormat::Csv => (format!("{name}.csv"), d.to_csv()),
        OutputFormat::Json => (format!("{name}.json"), to_pretty_json(d)?),
    })
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct CurveResult<'a> {
    label: &'a str,
    sigma: f64,
    #[serde(flatten)]
    outcome: &'a ScheduleOutcome,
}

/// Executes a validated config, writing data files and `manifest.json`
/// into `out_dir` (created if missing).
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    let mut files: Vec<(String, String)> = Vec::new();
    let mut summary: Vec<String> = Vec::new();
    let mut ok = true;
    let format = config.common().format;
    let seed = config.common().seed;

    match config {
        ExperimentConfig::FilterDump {
            filter, nmax, case, ..
        } => {
            let table = filter.build(*case, *nmax)?;
            files.push(match format {
                OutputFormat::Csv => ("filter.csv".into(), table.to_csv()),
                OutputFormat::Json => ("filter.json".into(), to_pretty_json(&table)?),
            });
            summary.push(format!(
                "filter table over manifolds 0..={nmax} ({:?} provenance)",
                table.provenance()
            ));
        }

        ExperimentConfig::Ensemble {
            initial,
            filter,
            case,
            atoms,
            nmax,
            ..
        } => {
            let d0 = resolve_initial(initial, *nmax)?;
            let table = filter.build(*case, d0.nmax() + atoms + 2)?;
            let history = ensemble_run(&d0, &table, *case, *atoms)?;
            files.push(match format {
                OutputFormat::Csv => ("ensemble.csv".into(), ensemble_csv(&history)),
                OutputFormat::Json => ("ensemble.json".into(), to_pretty_json(&history)?),
            });
            let last = history.last().unwrap();
            summary.push(format!(
                "{atoms} unrecorded case-{case} atoms: mean photon number {:.6}, variance {:.6}",
                last.mean_photon(),
                last.variance()
            ));
        }

        ExperimentConfig::Trajectories {
            initial,
            filter,
            case,
            atoms,
            count,
            nmax,
            ..
        } => {
            let d0 = resolve_initial(initial, *nmax)?;
            let table = filter.build(*case, d0.nmax() + atoms + 2)?;
            let filters = vec![&table; *atoms];
            let cases = vec![*case; *atoms];
            let trajectories = sample_trajectories(&d0, &filters, &cases, *count, seed)?;
            let mut lines = String::new();
            for t in &trajectories {
                let row = serde_json::to_string(t)
                    .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
                lines.push_str(&row);
                lines.push('\n');
            }
            files.push(("trajectories.jsonl".into(), lines));
            let mean_nu = trajectories.iter().map(|t| t.sequence.nu()).sum::<i64>() as f64
                / *count as f64;
            summary.push(format!(
                "{count} recorded trajectories of {atoms} case-{case} atoms (seed {seed}); mean net flip count {mean_nu:.4}"
            ));
        }

        ExperimentConfig::BruteForce {
            initial,
            filter,
            case,
            atoms,
            nmax,
            ..
        } => {
            let d0 = resolve_initial(initial, *nmax)?;
            let table = filter.build(*case, d0.nmax() + atoms + 2)?;
            let brute = brute_force_ensemble(&d0, &table, *case, *atoms)?;
            let recurrence = ensemble_run(&d0, &table, *case, *atoms)?.pop().unwrap();
            let top = brute.nmax().max(recurrence.nmax());
            let sup = (0..=top)
                .map(|n| (brute.prob(n) - recurrence.prob(n)).abs())
                .fold(0.0f64, f64::max);
            files.push(distribution_file("brute_force", &brute, format)?);
            files.push(distribution_file("recurrence", &recurrence, format)?);
            summary.push(format!(
                "enumerated all 2^{atoms} outcome records; max |average - recurrence| = {sup:.3e}"
            ));
        }

        ExperimentConfig::Binomial { kappa, atoms, .. } => {
            let d = binomial_closed_form(Kappa::new(*kappa)?, *atoms);
            files.push(distribution_file("binomial", &d, format)?);
            summary.push(format!(
                "binomial distribution for {atoms} adiabatic atoms at kappa = {kappa}: mean {:.6}, variance {:.6}",
                d.mean_photon(),
                d.variance()
            ));
        }

        ExperimentConfig::TrapSchedule {
            initial,
            target,
            atoms,
            curves,
            case,
            realizations,
            nmax,
            ..
        } => {
            let d0 = resolve_initial(initial, *nmax)?;
            let mut results: Vec<(String, f64, ScheduleOutcome)> = Vec::new();
            for (i, curve) in curves.iter().enumerate() {
                let schedule = curve.schedule.build(*target, *atoms)?;
                let noise = NoiseModel::new(curve.sigma, derive_seed(seed, i as u64, 0))?;
                let reals = if noise.is_noiseless() {
                    1
                } else {
                    *realizations
                };
                let outcome = run_schedule(&d0, &schedule, *case, &noise, *target, reals)?;
                if outcome.resamples > 0 {
                    summary.push(format!(
                        "warning: curve {:?} redrew {} negative couplings",
                        curve.label, outcome.resamples
                    ));
                }
                summary.push(format!(
                    "curve {:?}: P({target}) reaches {:.6} after {} atoms ({} realization{})",
                    curve.label,
                    outcome.mean_probability.last().unwrap(),
                    schedule.len(),
                    reals,
                    if reals == 1 { "" } else { "s" }
                ));
                results.push((curve.label.clone(), curve.sigma, outcome));
            }
            match format {
                OutputFormat::Csv => {
                    for (label, _, outcome) in &results {
                        files.push((format!("schedule_{label}.csv"), outcome.to_csv()));
                    }
                }
                OutputFormat::Json => {
                    let wire: Vec<CurveResult> = results
                        .iter()
                        .map(|(label, sigma, outcome)| CurveResult {
                            label,
                            sigma: *sigma,
                            outcome,
                        })
                        .collect();
                    files.push(("schedules.json".into(), to_pretty_json(&wire)?));
                }
            }
        }

        ExperimentConfig::ValidateOracle {
            tolerance,
            nmax,
            window,
            tol,
            ..
        } => {
            let lambdas = [0.0, 0.5, 1.0, 2.0];
            let etas = [0.3, 1.0, 2.0];
            let mut csv = String::from("lambda1,lambda2,eta,n,analytic,numeric,abs_diff\n");
            let mut max_diff = 0.0f64;
            for &l1 in &lambdas {
                for &l2 in &lambdas {
                    for &eta in &etas {
                        let analytic = dk_filter(l1, l2, eta, *nmax)?;
                        let params = DKParams::from_dimensionless(l1, l2, eta)?;
                        let numeric =
                            numeric_filter(&params, AtomCase::A, *nmax, *window, *tol)?;
                        for n in 0..=*nmax {
                            let (a, b) = (analytic.p_plus(n), numeric.p_plus(n));
                            let diff = (a - b).abs();
                            max_diff = max_diff.max(diff);
                            let _ = writeln!(
                                csv,
                                "{l1},{l2},{eta},{n},{},{},{}",
                                fmt_f64(a),
                                fmt_f64(b),
                                fmt_f64(diff)
                            );
                        }
                    }
                }
            }
            files.push(("oracle_grid.csv".into(), csv));
            ok = max_diff <= *tolerance;
            summary.push(format!(
                "max |closed form - integrated| = {max_diff:.3e} over {} grid points (tolerance {tolerance:.1e}): {}",
                16 * etas.len() * (nmax + 1),
                if ok { "ok" } else { "EXCEEDED" }
            ));
        }
    }

    fs::create_dir_all(out_dir)?;
    let mut checksums = BTreeMap::new();
    let mut written = Vec::new();
    for (name, contents) in &files {
        let path = out_dir.join(name);
        fs::write(&path, contents)?;
        checksums.insert(name.clone(), sha256_hex(contents.as_bytes()));
        written.push(path);
    }
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION"),
        config: serde_json::to_value(config)
            .map_err(|e| Error::Config(format!("serialization failed: {e}")))?,
        checksums,
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, to_pretty_json(&manifest)?)?;
    written.push(manifest_path);

    Ok(RunReport {
        out_dir: out_dir.to_path_buf(),
        files: written,
        summary,
        ok,
    })
}
