//! Batch orchestration: resolves a [`PipelineConfig`] into concrete objects,
//! runs the sweep / cluster / refine / noise-study stages, and persists
//! results. Every output file is stamped with the producing config's
//! manifest hash, and identical config + seed reruns are byte-identical.
//!
//! Seeding: the grid point at index `i` runs with
//! `base_seed XOR (i * SEED_STRIDE)` where [`SEED_STRIDE`] is a large odd
//! constant, so any implementation of the documented generator reproduces
//! the stream. The sweep is the only concurrent stage; results are ordered
//! by grid index before writing.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{
    embed_angles, estimate_spectrum, select_k_and_cluster_tuned, ClusterReport, ClusterTuning,
    ClusteringError, SpectrumEstimates,
};
use crate::config::{
    ConfigError, HamiltonianSpec, PipelineConfig, RefineMethod,
};
use crate::hamiltonian::{
    build_heisenberg_1d, parse_hamiltonian_file, HamiltonianError, PauliSumHamiltonian,
};
use crate::ite::{
    nearest_eigenvalue, records_to_csv, vite_run, IteError, ParameterRecord,
};
use crate::numerics::{hermitian_eigendecomposition, NumericsError};
use crate::refine::{
    inverse_power_iterate, polynomial_inverse_power, reconstruct_state_from_params, RefineError,
    RefinementResult,
};
use crate::rng::SplitMix64;
use crate::simulator::{
    build_ansatz, AnsatzCircuit, NoiseModel, SimulatorError, Statevector,
};
use crate::stats::{mann_kendall, MannKendallResult, StatsError};

use num_complex::Complex64;

/// Large odd constant separating per-index seed streams.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Dense diagonalization cap for ground-truth export.
pub const EXACT_QUBIT_CAP: usize = 13;

/// Density-matrix cap for the noise study.
pub const NOISE_STUDY_QUBIT_CAP: usize = 8;

/// Eigenvalues closer than this are reported as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Shift nudge applied when a refinement shift is numerically singular.
const SHIFT_NUDGE: f64 = 1e-6;

/// Polynomial refinement needs the shift a finite distance from the
/// spectrum for a valid surrogate window; closer shifts are pushed out.
const POLY_SHIFT_FLOOR: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("operator on {0} qubits exceeds the stage cap")]
    TooLarge(usize),
    #[error("every grid point failed; first error: {0}")]
    EmptySweep(String),
    #[error("{0}")]
    MissingData(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Ite(#[from] IteError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

/// Per-grid-point seed: `base XOR (index * SEED_STRIDE)`.
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    base_seed ^ index.wrapping_mul(SEED_STRIDE)
}

/// Seed for clustering one recorded step of one noise level, kept disjoint
/// from the sweep streams by a high tag.
pub fn noise_study_cluster_seed(base_seed: u64, level_index: usize, step: usize) -> u64 {
    let tag = (0x4E53u64 << 48) | ((level_index as u64) << 24) | step as u64;
    derive_seed(base_seed, tag)
}

/// A config resolved into its operator; the ansatz is built on demand so
/// stages that never simulate (ground-truth export) accept any qubit count.
pub struct PipelineContext {
    pub config: PipelineConfig,
    pub hamiltonian: PauliSumHamiltonian,
    pub manifest_hash: String,
}

impl PipelineContext {
    pub fn new(config: PipelineConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let hamiltonian = match &config.hamiltonian {
            HamiltonianSpec::Heisenberg { n, jx, jy, jz, h, field_all_sites } => {
                build_heisenberg_1d(*n, *jx, *jy, *jz, *h, *field_all_sites)?
            }
            HamiltonianSpec::File { path } => {
                let text = fs::read_to_string(path)?;
                parse_hamiltonian_file(&text)?
            }
        };
        let manifest_hash = config.hash();
        Ok(Self { config, hamiltonian, manifest_hash })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)?;
        Self::new(PipelineConfig::parse(&text)?)
    }

    pub fn build_ansatz(&self) -> Result<AnsatzCircuit, PipelineError> {
        Ok(build_ansatz(
            self.config.ansatz_family,
            self.hamiltonian.n_qubits(),
            self.config.layers,
        )?)
    }

    fn noise_model(&self) -> Result<Option<NoiseModel>, PipelineError> {
        match &self.config.noise {
            Some(spec) if spec.p1 > 0.0 || spec.p2 > 0.0 => {
                Ok(Some(NoiseModel::new(spec.p1, spec.p2)?))
            }
            _ => Ok(None),
        }
    }
}

/// Dense eigenvalues, ascending.
pub fn exact_spectrum(h: &PauliSumHamiltonian) -> Result<Vec<f64>, PipelineError> {
    if h.n_qubits() > EXACT_QUBIT_CAP {
        return Err(PipelineError::TooLarge(h.n_qubits()));
    }
    let eigen = hermitian_eigendecomposition(&h.to_dense()?)?;
    Ok(eigen.eigenvalues)
}

/// Groups an ascending spectrum into distinct levels: (mean value,
/// multiplicity) for each run of eigenvalues within [`DEGENERACY_TOL`].
pub fn distinct_eigenvalues(eigenvalues: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &value in eigenvalues {
        match out.last_mut() {
            Some((rep, count)) if (value - *rep).abs() <= DEGENERACY_TOL => {
                *rep = (*rep * *count as f64 + value) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => out.push((value, 1)),
        }
    }
    out
}

/// The drift interval owned by each distinct level: midpoints to its
/// neighbors, clipped to the sweep window. A level whose interval falls
/// entirely outside the window collapses to the nearest window edge.
pub fn theoretical_intervals(levels: &[f64], window: (f64, f64)) -> Vec<(f64, f64)> {
    let (w_lo, w_hi) = window;
    let m = levels.len();
    (0..m)
        .map(|i| {
            let lo = if i == 0 { w_lo } else { 0.5 * (levels[i - 1] + levels[i]) };
            let hi = if i + 1 == m { w_hi } else { 0.5 * (levels[i] + levels[i + 1]) };
            let (lo, hi) = (lo.max(w_lo), hi.min(w_hi));
            if lo > hi {
                let edge = if levels[i] <= w_lo { w_lo } else { w_hi };
                (edge, edge)
            } else {
                (lo, hi)
            }
        })
        .collect()
}

/// Interval centers: where the drift median of a perfectly resolved level
/// would sit.
pub fn theoretical_medians(intervals: &[(f64, f64)]) -> Vec<f64> {
    intervals.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
}

/// Which level a cluster votes for: each retained drift value picks its
/// nearest level, majority wins, ties toward the lower level index.
pub fn associate_clusters(
    report: &ClusterReport,
    levels: &[f64],
) -> Result<Vec<usize>, PipelineError> {
    let mut owners = Vec::with_capacity(report.clusters.len());
    for cluster in &report.clusters {
        let mut votes: HashMap<usize, usize> = HashMap::new();
        for &s in &cluster.filtered_s {
            let nearest = nearest_eigenvalue(levels, s)?;
            *votes.entry(nearest.index).or_insert(0) += 1;
        }
        let winner = votes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(index, _)| index)
            .ok_or_else(|| {
                PipelineError::MissingData(format!(
                    "cluster {} has no retained members",
                    cluster.cluster_id
                ))
            })?;
        owners.push(winner);
    }
    Ok(owners)
}

/// Per-level resolution summary against a known spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub eigenvalue_index: usize,
    pub eigenvalue: f64,
    pub interval: (f64, f64),
    pub theoretical_median: f64,
    /// Largest cluster owning this level, if any (ties toward lower id).
    pub dominant_cluster: Option<usize>,
    pub cluster_median: Option<f64>,
    pub abs_error: Option<f64>,
}

/// Matches clusters to distinct levels and reports, per level, the
/// dominant cluster's drift median against the theoretical one.
pub fn compare_to_spectrum(
    report: &ClusterReport,
    levels: &[f64],
    window: (f64, f64),
) -> Result<Vec<SpectrumComparison>, PipelineError> {
    let intervals = theoretical_intervals(levels, window);
    let medians = theoretical_medians(&intervals);
    let owners = associate_clusters(report, levels)?;
    Ok((0..levels.len())
        .map(|i| {
            let dominant = report
                .clusters
                .iter()
                .zip(&owners)
                .filter(|(_, &owner)| owner == i)
                .max_by(|(a, _), (b, _)| {
                    a.member_s.len().cmp(&b.member_s.len()).then(
                        b.cluster_id.cmp(&a.cluster_id),
                    )
                })
                .map(|(cluster, _)| cluster);
            SpectrumComparison {
                eigenvalue_index: i,
                eigenvalue: levels[i],
                interval: intervals[i],
                theoretical_median: medians[i],
                dominant_cluster: dominant.map(|c| c.cluster_id),
                cluster_median: dominant.map(|c| c.median_s),
                abs_error: dominant.map(|c| (c.median_s - medians[i]).abs()),
            }
        })
        .collect())
}

/// Mean over clusters of the distance from the cluster's drift median to
/// the nearest theoretical median.
pub fn mean_cluster_error(report: &ClusterReport, medians: &[f64]) -> Result<f64, PipelineError> {
    if report.clusters.is_empty() {
        return Err(PipelineError::MissingData("report has no clusters".into()));
    }
    let mut total = 0.0;
    for cluster in &report.clusters {
        let nearest = nearest_eigenvalue(medians, cluster.median_s)?;
        total += (cluster.median_s - nearest.value).abs();
    }
    Ok(total / report.clusters.len() as f64)
}

/// Initial parameters for a sweep: one shared random draw, or per-point
/// warm starts read off a prior report's cluster medians.
pub enum SweepStart<'a> {
    Cold,
    Warm(&'a ClusterReport),
}

/// One failed grid point: the drift value and the error text.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepFailure {
    pub s: f64,
    pub message: String,
}

pub struct SweepOutcome {
    /// All records in grid order (each point contributes its recorded steps).
    pub records: Vec<ParameterRecord>,
    pub failures: Vec<SweepFailure>,
    pub grid: Vec<f64>,
    pub derived_seeds: Vec<u64>,
}

/// Runs the drift sweep with the config's noise setting.
pub fn sweep_records(
    ctx: &PipelineContext,
    start: SweepStart<'_>,
) -> Result<SweepOutcome, PipelineError> {
    let noise = ctx.noise_model()?;
    sweep_with(ctx, start, noise.as_ref())
}

fn sweep_with(
    ctx: &PipelineContext,
    start: SweepStart<'_>,
    noise: Option<&NoiseModel>,
) -> Result<SweepOutcome, PipelineError> {
    let ansatz = ctx.build_ansatz()?;
    let grid = ctx.config.grid.points();
    let base_seed = ctx.config.base_seed;
    let derived_seeds: Vec<u64> =
        (0..grid.len()).map(|i| derive_seed(base_seed, i as u64)).collect();

    let cold_theta0: Vec<f64> = {
        let mut rng = SplitMix64::new(base_seed);
        (0..ansatz.n_params())
            .map(|_| rng.uniform(0.0, 2.0 * std::f64::consts::PI))
            .collect()
    };
    let theta0_for = |s: f64| -> Result<Vec<f64>, PipelineError> {
        match &start {
            SweepStart::Cold => Ok(cold_theta0.clone()),
            SweepStart::Warm(report) => {
                let cluster = report
                    .clusters
                    .iter()
                    .min_by(|a, b| {
                        (a.median_s - s)
                            .abs()
                            .partial_cmp(&(b.median_s - s).abs())
                            .unwrap()
                            .then(a.cluster_id.cmp(&b.cluster_id))
                    })
                    .ok_or_else(|| {
                        PipelineError::MissingData("warm-start report has no clusters".into())
                    })?;
                if cluster.median_theta.len() != ansatz.n_params() {
                    return Err(PipelineError::MissingData(format!(
                        "warm-start report carries {} parameters, ansatz needs {}",
                        cluster.median_theta.len(),
                        ansatz.n_params()
                    )));
                }
                Ok(cluster.median_theta.clone())
            }
        }
    };

    let starts = grid
        .iter()
        .map(|&s| theta0_for(s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut results: Vec<(usize, Result<Vec<ParameterRecord>, IteError>)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let run = vite_run(
                &ctx.hamiltonian,
                s,
                &ansatz,
                &starts[i],
                &ctx.config.vite,
                noise,
                derived_seeds[i],
            );
            (i, run)
        })
        .collect();
    results.sort_by_key(|(i, _)| *i);

    let mut records = Vec::with_capacity(grid.len() * ctx.config.vite.record_at.len());
    let mut failures = Vec::new();
    for (i, run) in results {
        match run {
            Ok(point_records) => records.extend(point_records),
            Err(err) => failures.push(SweepFailure { s: grid[i], message: err.to_string() }),
        }
    }
    if records.is_empty() {
        let first = failures
            .first()
            .map(|f| f.message.clone())
            .unwrap_or_else(|| "empty grid".into());
        return Err(PipelineError::EmptySweep(first));
    }
    Ok(SweepOutcome { records, failures, grid, derived_seeds })
}

/// Sidecar written with every records file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_hash: String,
    pub package_version: String,
    pub base_seed: u64,
    pub n_grid_points: usize,
    pub n_failed: usize,
    pub failures: Vec<SweepFailure>,
    pub grid: Vec<f64>,
    pub derived_seeds: Vec<u64>,
    pub config_text: String,
}

impl RunManifest {
    fn new(ctx: &PipelineContext, outcome: &SweepOutcome) -> Self {
        Self {
            manifest_hash: ctx.manifest_hash.clone(),
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            base_seed: ctx.config.base_seed,
            n_grid_points: outcome.grid.len(),
            n_failed: outcome.failures.len(),
            failures: outcome.failures.clone(),
            grid: outcome.grid.clone(),
            derived_seeds: outcome.derived_seeds.clone(),
            config_text: ctx.config.canonical_text(),
        }
    }
}

/// Clustering stage output: the report plus sorted spectrum estimates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterArtifacts {
    pub manifest_hash: String,
    pub report: ClusterReport,
    pub estimates: SpectrumEstimates,
}

/// Parses a report file written by [`run_cluster`].
pub fn parse_cluster_artifacts(text: &str) -> Result<ClusterArtifacts, PipelineError> {
    Ok(serde_json::from_str(text)?)
}

/// Embeds the records and runs model selection with the config's tuning.
pub fn cluster_records(
    config: &PipelineConfig,
    records: &[ParameterRecord],
) -> Result<ClusterArtifacts, PipelineError> {
    let data = embed_angles(records)?;
    let n = data.n_points();
    if n < 3 {
        return Err(PipelineError::MissingData(format!(
            "{n} records cannot support cluster selection"
        )));
    }
    let k_lo = config.clustering.k_min;
    let k_hi = config.clustering.k_max.min(n - 1);
    let tuning = ClusterTuning {
        hopkins_repeats: config.clustering.hopkins_repeats,
        hopkins_fraction: config.clustering.hopkins_fraction,
        iqr_multiplier: config.clustering.iqr_multiplier,
    };
    let report = select_k_and_cluster_tuned(
        &data,
        k_lo..=k_hi,
        config.clustering.restarts,
        config.base_seed,
        &tuning,
    )?;
    let estimates = estimate_spectrum(&report)?;
    Ok(ClusterArtifacts { manifest_hash: config.hash(), report, estimates })
}

/// One refined level: warm start against the uniform-superposition
/// baseline, same method and shift.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefineRow {
    pub cluster_id: usize,
    pub method: String,
    pub s: f64,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub baseline_eigenvalue: f64,
    pub baseline_iterations: usize,
    pub baseline_residual: f64,
    pub baseline_converged: bool,
}

fn refine_from(
    ctx: &PipelineContext,
    levels: &[f64],
    s: f64,
    state: &Statevector,
) -> Result<RefinementResult, PipelineError> {
    let spec = &ctx.config.refine;
    match spec.method {
        RefineMethod::ExactInverse => {
            match inverse_power_iterate(&ctx.hamiltonian, s, state, spec.tol, spec.max_iters) {
                Err(RefineError::SingularShift(_)) => Ok(inverse_power_iterate(
                    &ctx.hamiltonian,
                    s + SHIFT_NUDGE,
                    state,
                    spec.tol,
                    spec.max_iters,
                )?),
                other => Ok(other?),
            }
        }
        RefineMethod::PolyInverse => {
            let min_dist = levels.iter().map(|l| (l - s).abs()).fold(f64::INFINITY, f64::min);
            let s_eff = if min_dist < POLY_SHIFT_FLOOR { s + POLY_SHIFT_FLOOR } else { s };
            Ok(polynomial_inverse_power(
                &ctx.hamiltonian,
                s_eff,
                state,
                spec.degree,
                spec.tol,
                spec.max_iters,
                None,
            )?)
        }
    }
}

/// Equal-amplitude state, the cold-start baseline for refinement.
pub fn uniform_superposition(n_qubits: usize) -> Result<Statevector, PipelineError> {
    let dim = 1usize << n_qubits;
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    Ok(Statevector::from_amplitudes(n_qubits, vec![amp; dim])?)
}

/// Refines every cluster median: shift = median drift, warm state = the
/// ansatz at the cluster's median parameters.
pub fn refine_clusters(
    ctx: &PipelineContext,
    report: &ClusterReport,
) -> Result<Vec<RefineRow>, PipelineError> {
    let ansatz = ctx.build_ansatz()?;
    let levels: Vec<f64> = match ctx.config.refine.method {
        RefineMethod::PolyInverse => {
            distinct_eigenvalues(&exact_spectrum(&ctx.hamiltonian)?)
                .into_iter()
                .map(|(v, _)| v)
                .collect()
        }
        RefineMethod::ExactInverse => Vec::new(),
    };
    let baseline_state = uniform_superposition(ctx.hamiltonian.n_qubits())?;
    let method = ctx.config.refine.method.tag().to_string();
    let mut rows = Vec::with_capacity(report.clusters.len());
    for cluster in &report.clusters {
        let warm_state = reconstruct_state_from_params(&ansatz, &cluster.median_theta)?;
        let s = cluster.median_s;
        let warm = refine_from(ctx, &levels, s, &warm_state)?;
        let baseline = refine_from(ctx, &levels, s, &baseline_state)?;
        rows.push(RefineRow {
            cluster_id: cluster.cluster_id,
            method: method.clone(),
            s,
            eigenvalue: warm.eigenvalue_estimate,
            iterations: warm.iterations,
            residual: warm.residual,
            converged: warm.converged,
            baseline_eigenvalue: baseline.eigenvalue_estimate,
            baseline_iterations: baseline.iterations,
            baseline_residual: baseline.residual,
            baseline_converged: baseline.converged,
        });
    }
    Ok(rows)
}

/// Average estimation error for one recorded step of one noise level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoiseStudyRow {
    pub p2: f64,
    pub step: usize,
    pub k: usize,
    pub avg_error: f64,
}

/// Trend of error versus two-qubit noise at one recorded step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepTrend {
    pub step: usize,
    pub mk: MannKendallResult,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoiseStudyOutcome {
    pub p1: f64,
    /// Two-qubit levels actually swept, ascending (baseline included).
    pub levels: Vec<f64>,
    pub rows: Vec<NoiseStudyRow>,
    /// Empty when fewer than four levels were swept.
    pub trends: Vec<StepTrend>,
}

/// Sweeps each two-qubit noise level with identical seeds and initial
/// parameters, clusters every recorded step, and tests the error trend
/// across levels per step.
pub fn noise_study(ctx: &PipelineContext) -> Result<NoiseStudyOutcome, PipelineError> {
    let n = ctx.hamiltonian.n_qubits();
    if n > NOISE_STUDY_QUBIT_CAP {
        return Err(PipelineError::TooLarge(n));
    }
    let spec = &ctx.config.noise_study;
    let mut levels = spec.p2_levels.clone();
    if spec.include_baseline && !levels.contains(&0.0) {
        levels.push(0.0);
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let eigenvalues = exact_spectrum(&ctx.hamiltonian)?;
    let distinct: Vec<f64> = distinct_eigenvalues(&eigenvalues).into_iter().map(|(v, _)| v).collect();
    let intervals = theoretical_intervals(&distinct, ctx.config.grid.window());
    let medians = theoretical_medians(&intervals);

    let mut rows = Vec::new();
    let mut per_step_errors: HashMap<usize, Vec<f64>> = HashMap::new();
    for (li, &p2) in levels.iter().enumerate() {
        let noise = if spec.p1 > 0.0 || p2 > 0.0 {
            Some(NoiseModel::new(spec.p1, p2)?)
        } else {
            None
        };
        let outcome = sweep_with(ctx, SweepStart::Cold, noise.as_ref())?;
        for &step in &ctx.config.vite.record_at {
            let step_records: Vec<ParameterRecord> = outcome
                .records
                .iter()
                .filter(|r| r.step == step)
                .cloned()
                .collect();
            let data = embed_angles(&step_records)?;
            let n_points = data.n_points();
            if n_points < 3 {
                return Err(PipelineError::MissingData(format!(
                    "step {step} kept only {n_points} records"
                )));
            }
            let tuning = ClusterTuning {
                hopkins_repeats: ctx.config.clustering.hopkins_repeats,
                hopkins_fraction: ctx.config.clustering.hopkins_fraction,
                iqr_multiplier: ctx.config.clustering.iqr_multiplier,
            };
            let k_hi = ctx.config.clustering.k_max.min(n_points - 1);
            let report = select_k_and_cluster_tuned(
                &data,
                ctx.config.clustering.k_min..=k_hi,
                ctx.config.clustering.restarts,
                noise_study_cluster_seed(ctx.config.base_seed, li, step),
                &tuning,
            )?;
            let avg_error = mean_cluster_error(&report, &medians)?;
            rows.push(NoiseStudyRow { p2, step, k: report.k, avg_error });
            per_step_errors.entry(step).or_default().push(avg_error);
        }
    }

    let mut trends = Vec::new();
    if levels.len() >= 4 {
        for &step in &ctx.config.vite.record_at {
            let series = &per_step_errors[&step];
            trends.push(StepTrend { step, mk: mann_kendall(series)? });
        }
    }
    Ok(NoiseStudyOutcome { p1: spec.p1, levels, rows, trends })
}

fn format_float(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e15 {
        format!("{value:.1}")
    } else {
        format!("{value}")
    }
}

fn hash_header(manifest_hash: &str) -> String {
    format!("# manifest_hash={manifest_hash}\n")
}

/// Ground-truth export: distinct levels, their drift intervals under the
/// config's window, and the interval centers.
pub fn run_exact(ctx: &PipelineContext, out_dir: impl AsRef<Path>) -> Result<PathBuf, PipelineError> {
    let eigenvalues = exact_spectrum(&ctx.hamiltonian)?;
    let distinct = distinct_eigenvalues(&eigenvalues);
    let values: Vec<f64> = distinct.iter().map(|&(v, _)| v).collect();
    let intervals = theoretical_intervals(&values, ctx.config.grid.window());
    let medians = theoretical_medians(&intervals);

    let mut csv = hash_header(&ctx.manifest_hash);
    csv.push_str("index,eigenvalue,multiplicity,v_lo,v_hi,theoretical_median\n");
    for (i, ((value, mult), (interval, median))) in
        distinct.iter().zip(intervals.iter().zip(&medians)).enumerate()
    {
        csv.push_str(&format!(
            "{i},{},{mult},{},{},{}\n",
            format_float(*value),
            format_float(interval.0),
            format_float(interval.1),
            format_float(*median),
        ));
    }
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let path = dir.join("spectrum.csv");
    fs::write(&path, csv)?;
    Ok(path)
}

/// Drift sweep: records CSV plus a manifest echoing the config, seeds,
/// and any skipped grid points.
pub fn run_sweep(
    ctx: &PipelineContext,
    start: SweepStart<'_>,
    out_dir: impl AsRef<Path>,
) -> Result<SweepOutcome, PipelineError> {
    let outcome = sweep_records(ctx, start)?;
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut csv = hash_header(&ctx.manifest_hash);
    csv.push_str(&records_to_csv(&outcome.records));
    fs::write(dir.join("records.csv"), csv)?;
    let manifest = RunManifest::new(ctx, &outcome);
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(outcome)
}

/// Clustering stage: report JSON plus per-cluster box-plot rows over the
/// retained drift values.
pub fn run_cluster(
    config: &PipelineConfig,
    records: &[ParameterRecord],
    out_dir: impl AsRef<Path>,
) -> Result<ClusterArtifacts, PipelineError> {
    let artifacts = cluster_records(config, records)?;
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&artifacts)?)?;

    let mut csv = hash_header(&artifacts.manifest_hash);
    csv.push_str("cluster_id,min,q1,median,q3,max,n_members,n_outliers\n");
    for cluster in &artifacts.report.clusters {
        let mut sorted = cluster.filtered_s.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let at = |q: f64| -> f64 {
            let h = (sorted.len() - 1) as f64 * q;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            if lo + 1 < sorted.len() {
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            } else {
                sorted[lo]
            }
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            cluster.cluster_id,
            format_float(sorted[0]),
            format_float(at(0.25)),
            format_float(at(0.5)),
            format_float(at(0.75)),
            format_float(*sorted.last().unwrap()),
            cluster.member_s.len(),
            cluster.n_outliers,
        ));
    }
    fs::write(dir.join("boxplot.csv"), csv)?;
    Ok(artifacts)
}

/// Refinement stage: one row per cluster with warm and baseline columns.
pub fn run_refine(
    ctx: &PipelineContext,
    report: &ClusterReport,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<RefineRow>, PipelineError> {
    let rows = refine_clusters(ctx, report)?;
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut csv = hash_header(&ctx.manifest_hash);
    csv.push_str(
        "cluster_id,method,s,eigenvalue,iterations,residual,converged,\
         baseline_eigenvalue,baseline_iterations,baseline_residual,baseline_converged\n",
    );
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.cluster_id,
            row.method,
            format_float(row.s),
            format_float(row.eigenvalue),
            row.iterations,
            format_float(row.residual),
            row.converged,
            format_float(row.baseline_eigenvalue),
            row.baseline_iterations,
            format_float(row.baseline_residual),
            row.baseline_converged,
        ));
    }
    fs::write(dir.join("refined.csv"), csv)?;
    Ok(rows)
}

/// Noise-robustness file pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoiseStudyFile {
    pub manifest_hash: String,
    pub outcome: NoiseStudyOutcome,
}

/// Noise study: error table CSV plus the per-step trend verdicts as JSON.
pub fn run_noise_study(
    ctx: &PipelineContext,
    out_dir: impl AsRef<Path>,
) -> Result<NoiseStudyOutcome, PipelineError> {
    let outcome = noise_study(ctx)?;
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut csv = hash_header(&ctx.manifest_hash);
    csv.push_str("p2,step,k,avg_error\n");
    for row in &outcome.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            format_float(row.p2),
            row.step,
            row.k,
            format_float(row.avg_error),
        ));
    }
    fs::write(dir.join("noise_study.csv"), csv)?;
    let file = NoiseStudyFile { manifest_hash: ctx.manifest_hash.clone(), outcome };
    fs::write(dir.join("noise_mk.json"), serde_json::to_string_pretty(&file)?)?;
    Ok(file.outcome)
}
