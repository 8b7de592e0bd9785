//! End-to-end acceptance checks. Each test prints exactly one
//! `<id> <name>: PASS/FAIL (<measured margins>)` line, so a full run with
//! `--nocapture` reads as ten verdicts; the assertion message carries the
//! same data when a criterion fails.
//!
//! Every tolerance, seed, window, and iteration budget is pinned here as a
//! named constant. The stochastic criteria (A6) document a primary seed set
//! plus two alternates that are tried in order before the check fails.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use eigensweep::clustering::{embed_angles, hopkins_statistic};
use eigensweep::config::PipelineConfig;
use eigensweep::hamiltonian::{
    build_heisenberg_1d, shift_and_square, Pauli, PauliString, PauliSumHamiltonian, PauliTerm,
};
use eigensweep::ite::{exact_ite_energy, exact_ite_state, nearest_eigenvalue, ParameterRecord};
use eigensweep::numerics::{hermitian_eigendecomposition, ComplexMatrix};
use eigensweep::pipeline::{
    associate_clusters, cluster_records, compare_to_spectrum, distinct_eigenvalues,
    exact_spectrum, noise_study, sweep_records, theoretical_intervals, uniform_superposition,
    PipelineContext, SweepStart,
};
use eigensweep::refine::{
    inverse_power_iterate, polynomial_inverse_power, reconstruct_state_from_params, RefineError,
    RefinementResult,
};
use eigensweep::rng::SplitMix64;
use eigensweep::simulator::{build_ansatz, expectation, AnsatzFamily, Statevector};
use eigensweep::stats::{tau_save, tau_weakest, SpeedLimitInput};

const A1_SEED: u64 = 11;
const A1_DRAWS: usize = 50;
const A1_MIDPOINT_EXCLUSION: f64 = 1e-3;
const A1_ENERGY_TOL: f64 = 1e-6;
const A1_TIME_SCALE: f64 = 10.0;
const A1_RUNTIME_LIMIT: Duration = Duration::from_secs(10);

const A2_SEED: u64 = 7;
const A2_DRAWS: usize = 20;
const A2_DESCENT_SLACK: f64 = 1e-10;
const A2_TIME_STEP: f64 = 0.25;
const A2_TIME_POINTS: usize = 11;

const A3_SEED: u64 = 264;
const A3_MIN_CLUSTERS: usize = 4;
const A3_AVG_ERROR_LIMIT: f64 = 0.15;
const A3_INTERVAL_SLACK: f64 = 1e-12;
const A3_RUNTIME_LIMIT: Duration = Duration::from_secs(300);

const A4_HOPKINS_FLOOR: f64 = 0.75;
const A4_P_CEILING: f64 = 0.05;
const A4_CONTROL_LO: f64 = 0.4;
const A4_CONTROL_HI: f64 = 0.6;
const A4_CONTROL_SEED: u64 = 1;
const A4_CONTROL_SALT: u64 = 0xC0FFEE;

const A5_SEED: u64 = 45;
const A5_AVG_ERROR_LIMIT: f64 = 0.25;
const A5_RUNTIME_LIMIT: Duration = Duration::from_secs(1800);

const A6_SEED_SETS: [u64; 3] = [24, 13, 39];
const A6_MIN_CLUSTERS: usize = 3;
const A6_TREND_P_FLOOR: f64 = 0.05;

const A7_ENERGY_THRESHOLD: f64 = 1e-8;
const A7_REFINE_TOL: f64 = 1e-13;
const A7_REFINE_MAX_ITERS: usize = 2000;
const A7_LE_QUOTA: f64 = 0.80;
const A7_LT_QUOTA: f64 = 0.50;

const A8_DEGREE: usize = 31;
const A8_AGREEMENT_TOL: f64 = 1e-6;
const A8_REFINE_TOL: f64 = 1e-12;
const A8_REFINE_MAX_ITERS: usize = 2000;
const A8_SEED: u64 = 3;

const A9_SEED: u64 = 5;
const A9_DRAWS: usize = 200;
const A9_ALGEBRA_TOL: f64 = 1e-10;

const A10_TOL: f64 = 1e-12;
const A10_BETA: f64 = 0.724;
const A10_GRID_POINTS: usize = 100;

/// Shift retry used when a cluster median lands exactly on an eigenvalue.
const SINGULAR_SHIFT_NUDGE: f64 = 1e-6;

fn verdict(id: &str, name: &str, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    println!("{id} {name}: {word} ({detail})");
    assert!(pass, "{id} {name}: {word} ({detail})");
}

fn random_state(rng: &mut SplitMix64, n_qubits: usize) -> Statevector {
    let dim = 1usize << n_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    Statevector::from_amplitudes(n_qubits, amps).unwrap()
}

fn random_hamiltonian(rng: &mut SplitMix64, n_qubits: usize) -> PauliSumHamiltonian {
    let terms: Vec<PauliTerm> = (0..2 * n_qubits + 3)
        .map(|_| {
            let paulis: Vec<Pauli> = (0..n_qubits)
                .map(|_| match rng.next_u64() % 4 {
                    0 => Pauli::I,
                    1 => Pauli::X,
                    2 => Pauli::Y,
                    _ => Pauli::Z,
                })
                .collect();
            PauliTerm::new(rng.uniform(-1.0, 1.0), PauliString::new(paulis))
        })
        .collect();
    PauliSumHamiltonian::new(n_qubits, terms).unwrap()
}

fn heisenberg4() -> PauliSumHamiltonian {
    build_heisenberg_1d(4, 0.5, 0.5, 0.6, 1.0, false).unwrap()
}

fn distinct_levels(h: &PauliSumHamiltonian) -> Vec<f64> {
    distinct_eigenvalues(&exact_spectrum(h).unwrap())
        .into_iter()
        .map(|(value, _)| value)
        .collect()
}

fn recovery_config(seed: u64) -> PipelineConfig {
    PipelineConfig::parse(&format!(
        "hamiltonian.kind = heisenberg\nhamiltonian.n = 4\nansatz.family = c0\n\
         grid.start = -2.65\ngrid.stop = -0.4\ngrid.step = 0.25\n\
         vite.dt = 0.15\nvite.steps = 25\nvite.lambda_reg = 1e-6\n\
         clustering.k_min = 4\nclustering.k_max = 12\n\
         seed = {seed}\n"
    ))
    .unwrap()
}

/// One full sweep-and-cluster run shared by the recovery, clusterability,
/// scaling, and refinement checks.
struct RecoveryArtifacts {
    ctx: PipelineContext,
    report: eigensweep::clustering::ClusterReport,
    levels: Vec<f64>,
    owners: Vec<usize>,
    intervals: Vec<(f64, f64)>,
    avg4: Option<f64>,
    elapsed: Duration,
}

static RECOVERY: OnceLock<RecoveryArtifacts> = OnceLock::new();

fn recovery() -> &'static RecoveryArtifacts {
    RECOVERY.get_or_init(|| {
        let config = recovery_config(A3_SEED);
        let window = config.grid.window();
        let started = Instant::now();
        let ctx = PipelineContext::new(config.clone()).unwrap();
        let sweep = sweep_records(&ctx, SweepStart::Cold).unwrap();
        let artifacts = cluster_records(&config, &sweep.records).unwrap();
        let elapsed = started.elapsed();
        let levels = distinct_levels(&ctx.hamiltonian);
        let comparison = compare_to_spectrum(&artifacts.report, &levels, window).unwrap();
        let owners = associate_clusters(&artifacts.report, &levels).unwrap();
        let intervals = theoretical_intervals(&levels, window);
        let lowest4: Vec<Option<f64>> = comparison.iter().take(4).map(|c| c.abs_error).collect();
        let avg4 = lowest4
            .iter()
            .copied()
            .collect::<Option<Vec<f64>>>()
            .map(|errors| errors.iter().sum::<f64>() / errors.len() as f64);
        RecoveryArtifacts {
            ctx,
            report: artifacts.report,
            levels,
            owners,
            intervals,
            avg4,
            elapsed,
        }
    })
}

#[test]
fn a1_exact_ite_lands_on_nearest_eigenvalue() {
    let started = Instant::now();
    let h = heisenberg4();
    let levels = distinct_levels(&h);
    let midpoints: Vec<f64> = levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let lo = levels[0] - 0.5;
    let hi = levels[levels.len() - 1] + 0.5;

    let mut rng = SplitMix64::new(A1_SEED);
    let mut max_error = 0.0f64;
    let mut accepted = 0usize;
    while accepted < A1_DRAWS {
        let s = rng.uniform(lo, hi);
        if midpoints.iter().any(|&m| (s - m).abs() < A1_MIDPOINT_EXCLUSION) {
            continue;
        }
        accepted += 1;
        let mut dists: Vec<f64> = levels.iter().map(|&l| (l - s).abs()).collect();
        dists.sort_by(f64::total_cmp);
        let gap = dists[1] - dists[0];
        let t = A1_TIME_SCALE / (gap * gap);
        let v0 = random_state(&mut rng, 4);
        let energy = exact_ite_energy(&h, s, t, &v0).unwrap();
        let nearest = nearest_eigenvalue(&levels, s).unwrap().value;
        max_error = max_error.max((energy - nearest).abs());
    }
    let elapsed = started.elapsed();

    let pass = max_error < A1_ENERGY_TOL && elapsed < A1_RUNTIME_LIMIT;
    verdict(
        "A1",
        "ite-oracle",
        pass,
        &format!(
            "{A1_DRAWS} drifts, max |energy - nearest level| = {max_error:.3e} vs {A1_ENERGY_TOL:.0e}, \
             elapsed {elapsed:.2?} vs {A1_RUNTIME_LIMIT:?}"
        ),
    );
}

#[test]
fn a2_shifted_square_energy_never_increases_along_ite() {
    let mut rng = SplitMix64::new(A2_SEED);
    let mut worst_increase = 0.0f64;
    for draw in 0..A2_DRAWS {
        let n = 1 + draw % 3;
        let h = random_hamiltonian(&mut rng, n);
        let s = rng.uniform(-2.0, 2.0);
        let squared = shift_and_square(&h, s);
        let v0 = random_state(&mut rng, n);
        let mut previous: Option<f64> = None;
        for j in 0..A2_TIME_POINTS {
            let t = A2_TIME_STEP * j as f64;
            let state = exact_ite_state(&h, s, t, &v0).unwrap();
            let energy = expectation(&state, &squared).unwrap();
            if let Some(prev) = previous {
                worst_increase = worst_increase.max(energy - prev);
            }
            previous = Some(energy);
        }
    }

    let pass = worst_increase <= A2_DESCENT_SLACK;
    verdict(
        "A2",
        "ite-descent",
        pass,
        &format!(
            "{A2_DRAWS} draws x {A2_TIME_POINTS} times, max increase = {worst_increase:.3e} vs \
             {A2_DESCENT_SLACK:.0e}"
        ),
    );
}

#[test]
fn a3_cluster_medians_track_lowest_levels() {
    let art = recovery();
    let mut interval_violations = 0usize;
    for (cluster, &owner) in art.report.clusters.iter().zip(&art.owners) {
        let (lo, hi) = art.intervals[owner];
        if cluster.median_s < lo - A3_INTERVAL_SLACK || cluster.median_s > hi + A3_INTERVAL_SLACK {
            interval_violations += 1;
        }
    }

    let k_ok = art.report.k >= A3_MIN_CLUSTERS;
    let avg_ok = art.avg4.is_some_and(|e| e <= A3_AVG_ERROR_LIMIT);
    let time_ok = art.elapsed < A3_RUNTIME_LIMIT;
    let pass = k_ok && interval_violations == 0 && avg_ok && time_ok;
    verdict(
        "A3",
        "spectrum-recovery",
        pass,
        &format!(
            "k = {} (need >= {A3_MIN_CLUSTERS}), medians outside own interval = \
             {interval_violations}, avg error over lowest four = {:?} vs {A3_AVG_ERROR_LIMIT}, \
             elapsed {:.2?} vs {A3_RUNTIME_LIMIT:?}",
            art.report.k, art.avg4, art.elapsed
        ),
    );
}

#[test]
fn a4_sweep_angles_cluster_while_uniform_control_does_not() {
    let art = recovery();
    let mean = art.report.hopkins_mean;
    let p = art.report.hopkins_p;

    let mut rng = SplitMix64::new(A4_CONTROL_SALT ^ A4_CONTROL_SEED);
    let records: Vec<ParameterRecord> = (0..50)
        .map(|i| ParameterRecord {
            s: -2.65 + 0.25 * (i % 10) as f64,
            ansatz_tag: "c0-n4-L1".into(),
            seed: A4_CONTROL_SEED,
            step: 25,
            energy: 0.0,
            theta: (0..10)
                .map(|_| rng.uniform(0.0, 2.0 * std::f64::consts::PI))
                .collect(),
        })
        .collect();
    let data = embed_angles(&records).unwrap();
    let control = hopkins_statistic(&data, 0.5, 100, A4_CONTROL_SEED).unwrap();

    let data_ok = mean > A4_HOPKINS_FLOOR && p < A4_P_CEILING;
    let control_ok = control.mean >= A4_CONTROL_LO && control.mean <= A4_CONTROL_HI;
    let pass = data_ok && control_ok;
    verdict(
        "A4",
        "clusterability",
        pass,
        &format!(
            "sweep Hopkins = {mean:.4} (need > {A4_HOPKINS_FLOOR}) with p = {p:.2e} (need < \
             {A4_P_CEILING}), uniform control Hopkins = {:.4} (need in [{A4_CONTROL_LO}, \
             {A4_CONTROL_HI}])",
            control.mean
        ),
    );
}

fn scaling_config(n: usize, start: f64, stop: f64, step: f64, seed: u64) -> PipelineConfig {
    PipelineConfig::parse(&format!(
        "hamiltonian.kind = heisenberg\nhamiltonian.n = {n}\nansatz.family = c0_hat\n\
         grid.start = {start}\ngrid.stop = {stop}\ngrid.step = {step}\n\
         vite.dt = 0.15\nvite.steps = 25\nvite.lambda_reg = 1e-6\n\
         clustering.k_min = 4\nclustering.k_max = 12\n\
         seed = {seed}\n"
    ))
    .unwrap()
}

fn scaling_error(n: usize, start: f64, stop: f64, step: f64) -> Option<f64> {
    let config = scaling_config(n, start, stop, step, A5_SEED);
    let window = config.grid.window();
    let ctx = PipelineContext::new(config.clone()).unwrap();
    let sweep = sweep_records(&ctx, SweepStart::Cold).unwrap();
    let artifacts = cluster_records(&config, &sweep.records).unwrap();
    let levels = distinct_levels(&ctx.hamiltonian);
    let comparison = compare_to_spectrum(&artifacts.report, &levels, window).unwrap();
    let lowest4: Vec<Option<f64>> = comparison.iter().take(4).map(|c| c.abs_error).collect();
    lowest4
        .into_iter()
        .collect::<Option<Vec<f64>>>()
        .map(|errors| errors.iter().sum::<f64>() / errors.len() as f64)
}

#[test]
fn a5_estimate_error_bounded_and_nonmonotonic_in_size() {
    let params6 = build_ansatz(AnsatzFamily::C0Hat, 6, 1).unwrap().n_params();
    let params8 = build_ansatz(AnsatzFamily::C0Hat, 8, 1).unwrap().n_params();

    let e4 = recovery().avg4;
    let e6 = scaling_error(6, -4.25, -2.55, 0.05);
    let started8 = Instant::now();
    let e8 = scaling_error(8, -5.85, -4.23, 0.04);
    let elapsed8 = started8.elapsed();

    let params_ok = params6 == 10 && params8 == 14;
    let bounded = e6.is_some_and(|e| e <= A5_AVG_ERROR_LIMIT)
        && e8.is_some_and(|e| e <= A5_AVG_ERROR_LIMIT);
    let monotone_growth = match (e4, e6, e8) {
        (Some(a), Some(b), Some(c)) => a < b && b < c,
        _ => false,
    };
    let time_ok = elapsed8 < A5_RUNTIME_LIMIT;
    let pass = params_ok && bounded && !monotone_growth && time_ok;
    verdict(
        "A5",
        "size-scaling",
        pass,
        &format!(
            "params = {params6}/{params8} (need 10/14), avg errors n=4/6/8 = {e4:?}/{e6:?}/{e8:?} \
             (need <= {A5_AVG_ERROR_LIMIT} at 6 and 8, not strictly increasing), n=8 elapsed \
             {elapsed8:.2?} vs {A5_RUNTIME_LIMIT:?}"
        ),
    );
}

fn noise_config(seed: u64) -> PipelineConfig {
    PipelineConfig::parse(&format!(
        "hamiltonian.kind = heisenberg\nhamiltonian.n = 4\nansatz.family = c0\n\
         grid.start = -2.65\ngrid.stop = -0.4\ngrid.step = 0.25\n\
         vite.dt = 0.15\nvite.steps = 25\nvite.lambda_reg = 1e-6\n\
         clustering.k_min = 2\nclustering.k_max = 9\n\
         noise_study.p1 = 0.001\nnoise_study.p2_levels = 0.005,0.010,0.030\n\
         noise_study.include_baseline = true\n\
         seed = {seed}\n"
    ))
    .unwrap()
}

#[test]
fn a6_noise_study_keeps_clusters_and_flat_error_trend() {
    let mut chosen: Option<u64> = None;
    let mut attempts: Vec<String> = Vec::new();
    for &seed in &A6_SEED_SETS {
        let ctx = PipelineContext::new(noise_config(seed)).unwrap();
        match noise_study(&ctx) {
            Ok(outcome) => {
                let min_k = outcome.rows.iter().map(|r| r.k).min().unwrap_or(0);
                let min_p = outcome
                    .trends
                    .iter()
                    .map(|t| t.mk.p_value)
                    .fold(f64::INFINITY, f64::min);
                let ok = !outcome.rows.is_empty()
                    && !outcome.trends.is_empty()
                    && min_k >= A6_MIN_CLUSTERS
                    && min_p >= A6_TREND_P_FLOOR;
                attempts.push(format!("seed {seed}: min k = {min_k}, min trend p = {min_p:.3}"));
                if ok {
                    chosen = Some(seed);
                    break;
                }
            }
            Err(err) => attempts.push(format!("seed {seed}: error {err}")),
        }
    }

    let pass = chosen.is_some();
    verdict(
        "A6",
        "noise-robustness",
        pass,
        &format!(
            "need min k >= {A6_MIN_CLUSTERS} and every per-step trend p >= {A6_TREND_P_FLOOR}; \
             {}",
            attempts.join("; ")
        ),
    );
}

fn inverse_power_retrying(
    h: &PauliSumHamiltonian,
    s: f64,
    v0: &Statevector,
) -> RefinementResult {
    match inverse_power_iterate(h, s, v0, A7_REFINE_TOL, A7_REFINE_MAX_ITERS) {
        Err(RefineError::SingularShift(_)) => {
            inverse_power_iterate(h, s + SINGULAR_SHIFT_NUDGE, v0, A7_REFINE_TOL, A7_REFINE_MAX_ITERS)
                .unwrap()
        }
        other => other.unwrap(),
    }
}

/// Iterations until |energy - target| < tol: 0 when the start already
/// qualifies, j+1 when iteration j+1 first reaches it, None when never.
fn steps_to_threshold(initial: f64, history: &[f64], target: f64, tol: f64) -> Option<usize> {
    if (initial - target).abs() < tol {
        return Some(0);
    }
    history
        .iter()
        .position(|e| (e - target).abs() < tol)
        .map(|j| j + 1)
}

#[test]
fn a7_warm_start_refines_in_fewer_iterations_than_uniform() {
    let art = recovery();
    let ansatz = art.ctx.build_ansatz().unwrap();
    let uniform = uniform_superposition(4).unwrap();

    let mut le = 0usize;
    let mut lt = 0usize;
    let total = art.report.clusters.len();
    for cluster in &art.report.clusters {
        let s = cluster.median_s;
        let target = nearest_eigenvalue(&art.levels, s).unwrap().value;
        let warm = reconstruct_state_from_params(&ansatz, &cluster.median_theta).unwrap();
        let warm_initial = expectation(&warm, &art.ctx.hamiltonian).unwrap();
        let uniform_initial = expectation(&uniform, &art.ctx.hamiltonian).unwrap();
        let warm_run = inverse_power_retrying(&art.ctx.hamiltonian, s, &warm);
        let uniform_run = inverse_power_retrying(&art.ctx.hamiltonian, s, &uniform);
        let warm_steps =
            steps_to_threshold(warm_initial, &warm_run.history, target, A7_ENERGY_THRESHOLD);
        let uniform_steps =
            steps_to_threshold(uniform_initial, &uniform_run.history, target, A7_ENERGY_THRESHOLD);
        match (warm_steps, uniform_steps) {
            (Some(w), Some(u)) => {
                if w <= u {
                    le += 1;
                }
                if w < u {
                    lt += 1;
                }
            }
            (Some(_), None) => {
                le += 1;
                lt += 1;
            }
            _ => {}
        }
    }

    let le_fraction = le as f64 / total as f64;
    let lt_fraction = lt as f64 / total as f64;
    let pass = le_fraction >= A7_LE_QUOTA && lt_fraction >= A7_LT_QUOTA;
    verdict(
        "A7",
        "warm-start-speedup",
        pass,
        &format!(
            "warm <= uniform on {le}/{total} clusters (need fraction >= {A7_LE_QUOTA}), strictly \
             fewer on {lt}/{total} (need fraction >= {A7_LT_QUOTA})"
        ),
    );
}

#[test]
fn a8_polynomial_surrogate_matches_exact_inverse_power() {
    // diag(1, 2, 4, 8) expressed over I/Z strings on two qubits.
    let diag = PauliSumHamiltonian::new(
        2,
        vec![
            PauliTerm::new(3.75, PauliString::identity(2)),
            PauliTerm::new(-1.25, PauliString::single(2, 0, Pauli::Z)),
            PauliTerm::new(-2.25, PauliString::single(2, 1, Pauli::Z)),
            PauliTerm::new(0.75, PauliString::parse("ZZ").unwrap()),
        ],
    )
    .unwrap();
    let heisenberg = heisenberg4();

    let mut rng = SplitMix64::new(A8_SEED);
    let mut max_disagreement = 0.0f64;
    let mut all_converged = true;
    let mut run_case = |h: &PauliSumHamiltonian, s: f64| {
        let v0 = random_state(&mut rng, h.n_qubits());
        let exact = inverse_power_iterate(h, s, &v0, A8_REFINE_TOL, A8_REFINE_MAX_ITERS).unwrap();
        let poly =
            polynomial_inverse_power(h, s, &v0, A8_DEGREE, A8_REFINE_TOL, A8_REFINE_MAX_ITERS, None)
                .unwrap();
        all_converged &= exact.converged && poly.converged;
        max_disagreement = max_disagreement
            .max((exact.eigenvalue_estimate - poly.eigenvalue_estimate).abs());
    };
    for s in [0.9, 2.2, 3.5, 7.0] {
        run_case(&diag, s);
    }
    for s in [-2.3, -1.5, 0.55] {
        run_case(&heisenberg, s);
    }

    let pass = max_disagreement < A8_AGREEMENT_TOL && all_converged;
    verdict(
        "A8",
        "polynomial-surrogate",
        pass,
        &format!(
            "degree {A8_DEGREE}, max |exact - polynomial| = {max_disagreement:.3e} vs \
             {A8_AGREEMENT_TOL:.0e}, all converged = {all_converged}"
        ),
    );
}

#[test]
fn a9_shift_square_algebra_and_eigendecomposition_agree_dense() {
    let mut rng = SplitMix64::new(A9_SEED);
    let mut max_algebra = 0.0f64;
    let mut max_reconstruction = 0.0f64;
    let mut max_orthonormality = 0.0f64;
    let mut ascending = true;
    for draw in 0..A9_DRAWS {
        let n = 1 + draw % 3;
        let h = random_hamiltonian(&mut rng, n);
        let s = rng.uniform(-2.0, 2.0);
        let dense = h.to_dense().unwrap();
        let dim = dense.dim();

        let shifted = dense.sub(&ComplexMatrix::identity(dim).scaled(Complex64::new(s, 0.0)));
        let squared = shifted.matmul(&shifted);
        let via_pauli = shift_and_square(&h, s).to_dense().unwrap();
        for (a, b) in via_pauli.data().iter().zip(squared.data()) {
            max_algebra = max_algebra.max((a - b).norm());
        }

        let eig = hermitian_eigendecomposition(&dense).unwrap();
        ascending &= eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]);
        let mut lambda = ComplexMatrix::zeros(dim);
        for (j, &value) in eig.eigenvalues.iter().enumerate() {
            lambda.set(j, j, Complex64::new(value, 0.0));
        }
        let reconstruction =
            eig.eigenvectors.matmul(&lambda).matmul(&eig.eigenvectors.adjoint());
        for (a, b) in reconstruction.data().iter().zip(dense.data()) {
            max_reconstruction = max_reconstruction.max((a - b).norm());
        }
        let gram = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors);
        let identity = ComplexMatrix::identity(dim);
        for (a, b) in gram.data().iter().zip(identity.data()) {
            max_orthonormality = max_orthonormality.max((a - b).norm());
        }
    }

    let pass = max_algebra < A9_ALGEBRA_TOL
        && max_reconstruction < A9_ALGEBRA_TOL
        && max_orthonormality < A9_ALGEBRA_TOL
        && ascending;
    verdict(
        "A9",
        "algebra-oracle",
        pass,
        &format!(
            "{A9_DRAWS} draws, max |pauli square - dense square| = {max_algebra:.3e}, max \
             round-trip entry error = {max_reconstruction:.3e}, max Gram deviation = \
             {max_orthonormality:.3e} (all vs {A9_ALGEBRA_TOL:.0e}), ascending = {ascending}"
        ),
    );
}

#[test]
fn a10_minimum_time_bounds_agree_on_common_domain() {
    let anchor = tau_weakest(&SpeedLimitInput::with_beta(0.0, 1.0, A10_BETA)).unwrap();
    let anchor_error = (anchor - 1.0 / A10_BETA).abs();

    let mut max_identity_gap = 0.0f64;
    for i in 0..A10_GRID_POINTS {
        let fidelity = i as f64 / (A10_GRID_POINTS - 1) as f64;
        let mean_excess = 0.3 + fidelity;
        let delta = fidelity.sqrt().acos();
        let weakest =
            tau_weakest(&SpeedLimitInput::with_beta(fidelity, mean_excess, A10_BETA)).unwrap();
        let saved = tau_save(delta, mean_excess, A10_BETA).unwrap();
        max_identity_gap = max_identity_gap.max((weakest - saved).abs());
    }

    let pass = anchor_error <= A10_TOL && max_identity_gap <= A10_TOL;
    verdict(
        "A10",
        "time-bound-consistency",
        pass,
        &format!(
            "|tau_weakest(0, 1, {A10_BETA}) - 1/{A10_BETA}| = {anchor_error:.3e}, max \
             |tau_weakest - tau_save| over {A10_GRID_POINTS} fidelities = \
             {max_identity_gap:.3e} (both vs {A10_TOL:.0e})"
        ),
    );
}
