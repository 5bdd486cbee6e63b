//! Reproducible experiments driven by a TOML file.
//!
//! ```toml
//! seed = 7
//! method = "sa-mc"
//! schedule = "inv_log:c=3"
//! steps = 1000
//! n_runs = 50
//!
//! [model]
//! family = "sk"
//! n = 8
//! ```
//!
//! Unknown keys are rejected. [`run_experiment`] writes `<output>.csv` and a
//! JSON sidecar `<output>.json` describing how the file was produced. The
//! CSV depends only on the configuration; the sidecar adds wall time and a
//! timestamp.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{
    evolve_imaginary_time, evolve_schrodinger, log_spaced, master_evolve, EvolveOptions, MasterOptions, OverlapTrajectory,
    MAX_EXACT_SPINS,
};
use crate::ising::{
    enumerate_ground_states, make_ea2d, make_ferromagnet, make_frustrated8, make_sk, read_instance, write_instance,
    IsingInstance, MAX_ENUMERATION_SPINS,
};
use crate::mc::{
    log_record_steps, merge_records, quench_vs_anneal_report, run_pimc, run_qmc_ensemble, run_sa, McPlan, PimcParams,
    QuenchOptions, QuenchReport, RunRecord,
};
use crate::schedule::Schedule;
use crate::tsp::{
    generate_instance, held_karp_length, merge_tsp_records, qa_tsp_ensemble, random_instance, read_tsplib, sa_tsp,
    TspInstance, TspKind, TspRecord, MAX_HELD_KARP_CITIES,
};

/// Version of the CSV and sidecar layout written by [`run_experiment`].
pub const ARTIFACT_VERSION: u32 = 1;

/// Sampling density used when a configuration does not set one.
pub const DEFAULT_POINTS_PER_DECADE: usize = 50;

/// How sub-seeds are derived, recorded verbatim in every sidecar.
pub const SEED_DERIVATION: &str = "sub_seed(master, run, slice) = splitmix64 chain over (master, run*0x9E3779B97F4A7C15, \
slice*0xD1B54A32D192ED03); slice 0 drives the dynamics of run r, slice k+1 seeds Trotter slice k";

/// The problem instance of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Complete-graph ferromagnet with coupling `j`.
    Ferromagnet { n: usize, j: f64, field: Option<f64> },
    /// The seed defaults to the master seed.
    Sk { n: usize, seed: Option<u64>, field: Option<f64> },
    Ea2d { side: usize, periodic: bool, seed: Option<u64>, field: Option<f64> },
    Frustrated8 { field: Option<f64> },
    /// A built-in traveling-salesman family.
    Tsp { kind: TspKind, seed: Option<u64> },
    /// `n` uniform cities on the `√n × √n` square.
    TspRandom { n: usize, seed: Option<u64> },
    /// An instance file: `.tsp` (TSPLIB), `.json` (saved TSP instance) or
    /// the Ising text format. Relative paths resolve against the config file.
    File { path: PathBuf },
}

/// A built instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Ising(IsingInstance),
    Tsp(TspInstance),
}

impl Model {
    pub fn size(&self) -> usize {
        match self {
            Model::Ising(i) => i.n_spins(),
            Model::Tsp(t) => t.n_cities(),
        }
    }

    /// SHA-256 of the serialized instance.
    pub fn content_hash(&self) -> String {
        match self {
            Model::Ising(i) => i.content_hash(),
            Model::Tsp(t) => hex(&Sha256::digest(serde_json::to_vec(t).expect("instance serializes"))),
        }
    }

    /// File name used by [`write_model`].
    pub fn file_name(&self) -> &'static str {
        match self {
            Model::Ising(_) => "instance.txt",
            Model::Tsp(_) => "instance.json",
        }
    }
}

impl ModelSpec {
    pub fn build(&self, master_seed: u64, base_dir: &Path) -> Result<Model> {
        let with_field = |inst: IsingInstance, field: &Option<f64>| match field {
            Some(h) => inst.with_field(*h),
            None => inst,
        };
        Ok(match self {
            ModelSpec::Ferromagnet { n, j, field } => Model::Ising(with_field(make_ferromagnet(*n, *j)?, field)),
            ModelSpec::Sk { n, seed, field } => Model::Ising(with_field(make_sk(*n, seed.unwrap_or(master_seed))?, field)),
            ModelSpec::Ea2d { side, periodic, seed, field } => {
                Model::Ising(with_field(make_ea2d(*side, *periodic, seed.unwrap_or(master_seed))?, field))
            }
            ModelSpec::Frustrated8 { field } => Model::Ising(with_field(make_frustrated8(), field)),
            ModelSpec::Tsp { kind, seed } => Model::Tsp(generate_instance(*kind, seed.unwrap_or(master_seed))?),
            ModelSpec::TspRandom { n, seed } => Model::Tsp(random_instance(*n, seed.unwrap_or(master_seed))?),
            ModelSpec::File { path } => {
                let path = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                match path.extension().and_then(|e| e.to_str()) {
                    Some("tsp") => Model::Tsp(read_tsplib(&path)?.to_instance()?),
                    Some("json") => Model::Tsp(
                        serde_json::from_slice(&fs::read(&path)?).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
                    ),
                    _ => Model::Ising(read_instance(std::io::BufReader::new(fs::File::open(&path)?))?),
                }
            }
        })
    }
}

/// Solver of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Schrodinger,
    SchrodingerImag,
    Master,
    SaMc,
    Qmc,
    Pimc,
    TspSa,
    TspQa,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(self, Method::Schrodinger | Method::SchrodingerImag | Method::Master)
    }

    pub fn is_tsp(self) -> bool {
        matches!(self, Method::TspSa | Method::TspQa)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Schrodinger => "schrodinger",
            Method::SchrodingerImag => "schrodinger-imag",
            Method::Master => "master",
            Method::SaMc => "sa-mc",
            Method::Qmc => "qmc",
            Method::Pimc => "pimc",
            Method::TspSa => "tsp-sa",
            Method::TspQa => "tsp-qa",
        }
    }
}

/// Settings for the `quench` verb; see [`quench_vs_anneal_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchConfig {
    /// Value held by the quenched processes; defaults to `schedule(steps)`.
    pub value: Option<f64>,
    pub sa_runs: Option<usize>,
    pub qa_runs: Option<usize>,
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Required by [`run_experiment`]; the `quench` verb ignores it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Schedule descriptor such as `inv_sqrt:c=3`.
    pub schedule: String,
    /// Final time of the exact methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    /// Monte Carlo steps; for `pimc`, the measurement steps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_runs: Option<usize>,
    /// Trotter slices `M`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_eff: Option<f64>,
    /// Total imaginary time of `pimc`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equil_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_decade: Option<usize>,
    /// Reference energy (or optimal length) for instances too large to solve exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_energy: Option<f64>,
    /// Stem of the output files; defaults to the method name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub model: ModelSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quench: Option<QuenchConfig>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn parsed_schedule(&self) -> Result<Schedule> {
        self.schedule.parse().map_err(|e: Error| Error::Config(format!("schedule: {e}")))
    }

    fn points_per_decade(&self) -> usize {
        self.points_per_decade.unwrap_or(DEFAULT_POINTS_PER_DECADE)
    }

    fn stem(&self, fallback: &str) -> String {
        self.output.clone().unwrap_or_else(|| fallback.to_string())
    }
}

fn required<T: Copy>(v: Option<T>, key: &str, method: Method) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("method `{}` needs `{key}`", method.name())))
}

/// Files written by [`run_experiment`] and [`run_quench`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
}

/// Metadata written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub artifact_version: u32,
    pub crate_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub seed_derivation: String,
    pub method: String,
    pub schedule: String,
    pub instance_hash: String,
    pub size: usize,
    pub reference_energy: Option<f64>,
    /// Integrator settings of the exact methods.
    pub integrator: Option<String>,
    pub wall_time_s: f64,
    pub timestamp_unix: u64,
}

/// Run `config`, writing into `out_dir`. `base_dir` resolves relative
/// instance paths.
///
/// Exact methods refuse instances above [`MAX_EXACT_SPINS`] spins with
/// [`Error::SizeLimit`]; method/model mismatches and missing keys are
/// [`Error::Config`].
pub fn run_experiment(config: &ExperimentConfig, base_dir: &Path, out_dir: &Path) -> Result<RunOutput> {
    let start = Instant::now();
    let method = config.method.ok_or_else(|| Error::Config("`method` is required".into()))?;
    let schedule = config.parsed_schedule()?;
    let model = config.model.build(config.seed, base_dir)?;
    let mut integrator = None;
    let mut csv = Vec::new();
    let reference = match (&model, method.is_tsp()) {
        (Model::Ising(inst), false) => {
            if method.is_exact() && inst.n_spins() > MAX_EXACT_SPINS {
                return Err(Error::SizeLimit { what: "exact dynamics", limit: MAX_EXACT_SPINS, got: inst.n_spins() });
            }
            let ground = ising_reference(inst, config.ground_energy)?;
            if method.is_exact() {
                let (traj, desc) = run_exact(inst, &schedule, method, config)?;
                integrator = Some(desc);
                traj.write_csv(&mut csv)?;
            } else {
                run_ising_mc(inst, &schedule, method, config, ground)?.write_csv(&mut csv)?;
            }
            ground
        }
        (Model::Tsp(inst), true) => {
            let optimum = match config.ground_energy {
                Some(l) => Some(l),
                None if inst.n_cities() <= MAX_HELD_KARP_CITIES => Some(held_karp_length(inst)?),
                None => None,
            };
            run_tsp(inst, &schedule, method, config, optimum)?.write_csv(&mut csv)?;
            optimum
        }
        (Model::Ising(_), true) => return Err(Error::Config(format!("method `{}` needs a TSP model", method.name()))),
        (Model::Tsp(_), false) => return Err(Error::Config(format!("method `{}` needs an Ising model", method.name()))),
    };
    let sidecar = Sidecar {
        artifact_version: ARTIFACT_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        master_seed: config.seed,
        seed_derivation: SEED_DERIVATION.to_string(),
        method: method.name().to_string(),
        schedule: schedule.descriptor(),
        instance_hash: model.content_hash(),
        size: model.size(),
        reference_energy: reference,
        integrator,
        wall_time_s: start.elapsed().as_secs_f64(),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    write_outputs(out_dir, &config.stem(method.name()), &csv, &sidecar)
}

fn ising_reference(inst: &IsingInstance, given: Option<f64>) -> Result<Option<f64>> {
    Ok(match given {
        Some(e) => Some(e),
        None if inst.n_spins() <= MAX_ENUMERATION_SPINS => Some(enumerate_ground_states(inst)?.energy),
        None => None,
    })
}

fn run_exact(inst: &IsingInstance, schedule: &Schedule, method: Method, config: &ExperimentConfig) -> Result<(OverlapTrajectory, String)> {
    let t_end = required(config.duration, "duration", method)?;
    let lo = if schedule.t_start > 0.0 { schedule.t_start } else { crate::schedule::DEFAULT_T_START };
    if !(t_end > lo) {
        return Err(Error::Config(format!("duration {t_end} must exceed the first sample time {lo}")));
    }
    let samples = log_spaced(lo, t_end, config.points_per_decade())?;
    if method == Method::Master {
        let opts = MasterOptions::default();
        let desc = format!("rk4 dt_max={} stability={}", opts.dt_max, opts.stability);
        Ok((master_evolve(inst, schedule, t_end, &samples, &opts)?, desc))
    } else {
        let opts = EvolveOptions::default();
        let desc = format!("rk4 dt_max={} courant={}", opts.dt_max, opts.courant);
        let traj = if method == Method::Schrodinger {
            evolve_schrodinger(inst, schedule, t_end, &samples, &opts)?
        } else {
            evolve_imaginary_time(inst, schedule, t_end, &samples, &opts)?
        };
        Ok((traj, desc))
    }
}

fn mc_plan(config: &ExperimentConfig, method: Method, ground: Option<f64>) -> Result<McPlan> {
    let steps = required(config.steps, "steps", method)?;
    let mut plan = McPlan::new(steps).with_record_at(log_record_steps(steps, config.points_per_decade()));
    plan.ground_energy = ground;
    Ok(plan)
}

fn run_ising_mc(
    inst: &IsingInstance,
    schedule: &Schedule,
    method: Method,
    config: &ExperimentConfig,
    ground: Option<f64>,
) -> Result<RunRecord> {
    let n_runs = config.n_runs.unwrap_or(1);
    match method {
        Method::SaMc => merge_records(&run_sa(inst, schedule, &mc_plan(config, method, ground)?, n_runs, config.seed)?),
        Method::Qmc => {
            let m = required(config.replicas, "replicas", method)?;
            let beta_eff = required(config.beta_eff, "beta_eff", method)?;
            let plan = mc_plan(config, method, ground)?;
            merge_records(&run_qmc_ensemble(inst, schedule, beta_eff, m, &plan, n_runs, config.seed)?)
        }
        Method::Pimc => {
            let params = PimcParams {
                beta: required(config.beta, "beta", method)?,
                m: required(config.replicas, "replicas", method)?,
                equil_steps: config.equil_steps.unwrap_or(1000),
                measure_steps: required(config.steps, "steps", method)?,
            };
            let runs: Vec<RunRecord> = (0..n_runs as u64)
                .map(|r| run_pimc(inst, schedule, &params, ground, crate::rng::sub_seed(config.seed, r, 0)))
                .collect::<Result<_>>()?;
            merge_records(&runs)
        }
        _ => unreachable!("exact and TSP methods are dispatched elsewhere"),
    }
}

fn run_tsp(
    inst: &TspInstance,
    schedule: &Schedule,
    method: Method,
    config: &ExperimentConfig,
    optimum: Option<f64>,
) -> Result<TspRecord> {
    let n_runs = config.n_runs.unwrap_or(1);
    let plan = mc_plan(config, method, optimum)?;
    let records = if method == Method::TspSa {
        sa_tsp(inst, schedule, &plan, n_runs, config.seed)?
    } else {
        let m = required(config.replicas, "replicas", method)?;
        let beta_eff = required(config.beta_eff, "beta_eff", method)?;
        qa_tsp_ensemble(inst, schedule, beta_eff, m, &plan, n_runs, config.seed)?
    };
    merge_tsp_records(&records)
}

/// The `quench` verb: anneal versus quench on an Ising model.
pub fn run_quench(config: &ExperimentConfig, base_dir: &Path, out_dir: &Path) -> Result<(RunOutput, QuenchReport)> {
    let start = Instant::now();
    let schedule = config.parsed_schedule()?;
    let Model::Ising(inst) = config.model.build(config.seed, base_dir)? else {
        return Err(Error::Config("quench needs an Ising model".into()));
    };
    let steps = config.steps.ok_or_else(|| Error::Config("quench needs `steps`".into()))?;
    let q = config.quench.clone().unwrap_or(QuenchConfig { value: None, sa_runs: None, qa_runs: None });
    let defaults = QuenchOptions::default();
    let options = QuenchOptions {
        beta_eff: config.beta_eff.unwrap_or(defaults.beta_eff),
        m: config.replicas.unwrap_or(defaults.m),
        sa_runs: q.sa_runs.unwrap_or(defaults.sa_runs),
        qa_runs: q.qa_runs.unwrap_or(defaults.qa_runs),
    };
    let value = match q.value {
        Some(v) => v,
        None => schedule.value(steps as f64)?,
    };
    let report = quench_vs_anneal_report(&inst, value, &schedule, steps, &options, config.seed)?;
    let sidecar = Sidecar {
        artifact_version: ARTIFACT_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        master_seed: config.seed,
        seed_derivation: SEED_DERIVATION.to_string(),
        method: "quench".into(),
        schedule: schedule.descriptor(),
        instance_hash: inst.content_hash(),
        size: inst.n_spins(),
        reference_energy: None,
        integrator: None,
        wall_time_s: start.elapsed().as_secs_f64(),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let out = write_outputs(out_dir, &config.stem("quench"), report.to_csv().as_bytes(), &sidecar)?;
    Ok((out, report))
}

/// The `gen` verb: write the model of `config` into `out_dir`.
pub fn write_model(config: &ExperimentConfig, base_dir: &Path, out_dir: &Path) -> Result<PathBuf> {
    let model = config.model.build(config.seed, base_dir)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(model.file_name());
    match &model {
        Model::Ising(i) => write_instance(i, fs::File::create(&path)?)?,
        Model::Tsp(t) => fs::write(&path, serde_json::to_vec_pretty(t).expect("instance serializes"))?,
    }
    Ok(path)
}

fn write_outputs(out_dir: &Path, stem: &str, csv: &[u8], sidecar: &Sidecar) -> Result<RunOutput> {
    fs::create_dir_all(out_dir)?;
    let out = RunOutput { csv: out_dir.join(format!("{stem}.csv")), sidecar: out_dir.join(format!("{stem}.json")) };
    fs::write(&out.csv, csv)?;
    fs::write(&out.sidecar, serde_json::to_vec_pretty(sidecar).expect("sidecar serializes"))?;
    Ok(out)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
