//! Classical analysis stage: embeds swept parameter records on the torus,
//! tests clusterability with the Hopkins statistic, clusters with k-means++
//! under silhouette-selected k, filters outliers by interquartile range, and
//! turns cluster medians of the drift parameter into spectrum estimates.
//!
//! Also houses the eigenvector-separation validator that checks a record set
//! against the disjoint-basin hypothesis.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ite::{reduce_angle, ParameterRecord};
use crate::numerics::EigenDecomposition;
use crate::rng::SplitMix64;
use crate::simulator::{apply_circuit, AnsatzCircuit, Statevector};
use crate::stats::regularized_incomplete_beta;

#[derive(Debug, Error, PartialEq)]
pub enum ClusteringError {
    #[error("records mix ansatz layouts: {0}")]
    MixedAnsatz(String),
    #[error("too few points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("sample fraction {0} outside (0, 0.5]")]
    InvalidFraction(f64),
    #[error("k = {k} invalid for {n} points")]
    KTooLarge { k: usize, n: usize },
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("quartiles need at least 4 values, got {0}")]
    TooFewValues(usize),
    #[error("cluster {0} has no members after filtering")]
    EmptyCluster(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid separation criteria: {0}")]
    InvalidCriteria(String),
}

pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_HOPKINS_REPEATS: usize = 100;
pub const DEFAULT_HOPKINS_FRACTION: f64 = 0.5;

/// Eigenvalues closer than this form one degenerate class in the
/// separation validator.
const DEGENERACY_TOL: f64 = 1e-9;

const STREAM_SPACING: u64 = 0x9E37_79B9_7F4A_7C15;

fn derived_stream(base: u64, tag: u64) -> SplitMix64 {
    SplitMix64::new(base ^ tag.wrapping_mul(STREAM_SPACING))
}

/// Sweep records mapped to points on the flat torus: each angle becomes its
/// (cos, sin) pair, so Euclidean distance respects angle periodicity.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedDataset {
    /// Row i = (cos t0, sin t0, .., cos t_{P-1}, sin t_{P-1}) for record i.
    pub points: Vec<Vec<f64>>,
    /// Parallel (drift value, index into the source record slice).
    pub meta: Vec<(f64, usize)>,
}

impl EmbeddedDataset {
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |row| row.len())
    }

    /// Checks that every (cos, sin) pair sits on the unit circle.
    pub fn on_unit_circles(&self, tol: f64) -> bool {
        self.points.iter().all(|row| {
            row.chunks_exact(2)
                .all(|pair| (pair[0] * pair[0] + pair[1] * pair[1] - 1.0).abs() <= tol)
        })
    }
}

/// Embeds records that share one ansatz layout.
pub fn embed_angles(records: &[ParameterRecord]) -> Result<EmbeddedDataset, ClusteringError> {
    if records.is_empty() {
        return Ok(EmbeddedDataset { points: Vec::new(), meta: Vec::new() });
    }
    let tag = &records[0].ansatz_tag;
    let n_params = records[0].theta.len();
    for (i, record) in records.iter().enumerate() {
        if record.ansatz_tag != *tag {
            return Err(ClusteringError::MixedAnsatz(format!(
                "record {i} has tag {} but record 0 has {tag}",
                record.ansatz_tag
            )));
        }
        if record.theta.len() != n_params {
            return Err(ClusteringError::MixedAnsatz(format!(
                "record {i} has {} parameters but record 0 has {n_params}",
                record.theta.len()
            )));
        }
    }
    let points = records
        .iter()
        .map(|r| {
            r.theta
                .iter()
                .flat_map(|&t| [t.cos(), t.sin()])
                .collect::<Vec<f64>>()
        })
        .collect();
    let meta = records.iter().enumerate().map(|(i, r)| (r.s, i)).collect();
    Ok(EmbeddedDataset { points, meta })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Hopkins clusterability test outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopkinsResult {
    /// Mean statistic over the repeats; near 0.5 for spatially random data,
    /// near 1 for clustered data.
    pub mean: f64,
    /// Upper-tail probability of the mean under the Beta(m, m) null.
    pub p_value: f64,
    /// Set when nearest-neighbor distances vanish (for example all points
    /// identical), in which case the statistic is pinned to 1.
    pub degenerate: bool,
    /// Per-repeat statistics, in order.
    pub values: Vec<f64>,
}

/// Hopkins statistic averaged over `repeats` resamples. Each repeat draws
/// m = ceil(fraction * N) data points plus m uniform probes in the data
/// bounding box; H = sum(u) / (sum(u) + sum(w)) where u holds each probe's
/// nearest-data distance and w each sampled point's nearest-other-data
/// distance.
pub fn hopkins_statistic(
    data: &EmbeddedDataset,
    sample_fraction: f64,
    repeats: usize,
    seed: u64,
) -> Result<HopkinsResult, ClusteringError> {
    let n = data.n_points();
    if n < 10 {
        return Err(ClusteringError::TooFewPoints { needed: 10, got: n });
    }
    if !(sample_fraction > 0.0 && sample_fraction <= 0.5) {
        return Err(ClusteringError::InvalidFraction(sample_fraction));
    }
    let dim = data.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for row in &data.points {
        for (d, &x) in row.iter().enumerate() {
            lo[d] = lo[d].min(x);
            hi[d] = hi[d].max(x);
        }
    }
    let m = (sample_fraction * n as f64).ceil() as usize;
    let mut rng = SplitMix64::new(seed);
    let mut values = Vec::with_capacity(repeats);
    let mut degenerate = false;
    for _ in 0..repeats {
        let sampled = rng.sample_indices(n, m);
        let mut u_sum = 0.0;
        for _ in 0..m {
            let probe: Vec<f64> =
                (0..dim).map(|d| rng.uniform(lo[d], hi[d])).collect();
            let nearest = data
                .points
                .iter()
                .map(|p| distance(&probe, p))
                .fold(f64::INFINITY, f64::min);
            u_sum += nearest;
        }
        let mut w_sum = 0.0;
        for &i in &sampled {
            let nearest = data
                .points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| distance(&data.points[i], p))
                .fold(f64::INFINITY, f64::min);
            w_sum += nearest;
        }
        if u_sum + w_sum < 1e-300 {
            degenerate = true;
            values.push(1.0);
        } else {
            values.push(u_sum / (u_sum + w_sum));
        }
    }
    let mean = values.iter().sum::<f64>() / repeats as f64;
    let p_value = 1.0 - regularized_incomplete_beta(m as f64, m as f64, mean.clamp(0.0, 1.0));
    Ok(HopkinsResult { mean, p_value, degenerate, values })
}

/// One k-means solution.
#[derive(Clone, Debug, PartialEq)]
pub struct KmeansOutcome {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
}

fn assign_points(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect()
}

fn recompute_centroids(
    points: &[Vec<f64>],
    assignment: &[usize],
    k: usize,
    dim: usize,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for d in 0..dim {
            sums[c][d] += p[d];
        }
    }
    for (c, sum) in sums.iter_mut().enumerate() {
        if counts[c] > 0 {
            for x in sum.iter_mut() {
                *x /= counts[c] as f64;
            }
        }
    }
    (sums, counts)
}

fn inertia_of(points: &[Vec<f64>], assignment: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| squared_distance(p, &centroids[c]))
        .sum()
}

fn kmeans_plus_plus_seed(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut SplitMix64,
) -> Vec<Vec<f64>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.index(points.len())].clone());
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let idx = rng.weighted_index(&d2);
        centroids.push(points[idx].clone());
        let last = centroids.last().unwrap();
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, last));
        }
    }
    centroids
}

fn lloyd_run(
    points: &[Vec<f64>],
    k: usize,
    max_iters: usize,
    rng: &mut SplitMix64,
) -> KmeansOutcome {
    let dim = points[0].len();
    let mut centroids = kmeans_plus_plus_seed(points, k, rng);
    let mut assignment = assign_points(points, &centroids);
    let mut prev_inertia = f64::INFINITY;
    for _ in 0..max_iters {
        let (mut new_centroids, mut counts) =
            recompute_centroids(points, &assignment, k, dim);
        // Revive any emptied cluster with the point farthest from its
        // centroid among clusters that can spare one.
        loop {
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let mut far_idx = usize::MAX;
            let mut far_d = -1.0;
            for (i, p) in points.iter().enumerate() {
                if counts[assignment[i]] < 2 {
                    continue;
                }
                let d = squared_distance(p, &new_centroids[assignment[i]]);
                if d > far_d {
                    far_d = d;
                    far_idx = i;
                }
            }
            counts[assignment[far_idx]] -= 1;
            assignment[far_idx] = empty;
            counts[empty] = 1;
            new_centroids[empty] = points[far_idx].clone();
        }
        centroids = new_centroids;
        let new_assignment = assign_points(points, &centroids);
        let inertia = inertia_of(points, &new_assignment, &centroids);
        assert!(
            inertia <= prev_inertia * (1.0 + 1e-12) + 1e-12,
            "inertia rose from {prev_inertia} to {inertia}"
        );
        let converged = new_assignment == assignment;
        assignment = new_assignment;
        prev_inertia = inertia;
        if converged {
            break;
        }
    }
    let (centroids, _) = recompute_centroids(points, &assignment, k, dim);
    let inertia = inertia_of(points, &assignment, &centroids);
    KmeansOutcome { assignment, centroids, inertia }
}

/// Best-of-restarts k-means with k-means++ seeding. Deterministic for a
/// fixed seed; ties between restarts keep the earliest.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<KmeansOutcome, ClusteringError> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(ClusteringError::KTooLarge { k, n });
    }
    let mut best: Option<KmeansOutcome> = None;
    for r in 0..restarts.max(1) {
        let mut rng = SplitMix64::new(seed.wrapping_add(r as u64));
        let outcome = lloyd_run(points, k, max_iters, &mut rng);
        if best.as_ref().is_none_or(|b| outcome.inertia < b.inertia) {
            best = Some(outcome);
        }
    }
    Ok(best.unwrap())
}

/// Mean silhouette over all points; singleton clusters contribute 0 for
/// their lone member.
pub fn silhouette(points: &[Vec<f64>], assignment: &[usize]) -> Result<f64, ClusteringError> {
    if points.len() != assignment.len() {
        return Err(ClusteringError::DimensionMismatch(format!(
            "{} points but {} labels",
            points.len(),
            assignment.len()
        )));
    }
    let k = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; k];
    for &c in assignment {
        counts[c] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(ClusteringError::SingleCluster);
    }
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let ci = assignment[i];
        if counts[ci] == 1 {
            continue;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[assignment[j]] += distance(&points[i], &points[j]);
            }
        }
        let a = sums[ci] / (counts[ci] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != ci && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Per-cluster drift-value summary inside a [`ClusterReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub cluster_id: usize,
    /// Drift values of all member records, in point order.
    pub member_s: Vec<f64>,
    /// Members surviving the interquartile fence (all members when the
    /// cluster is too small to filter).
    pub filtered_s: Vec<f64>,
    pub median_s: f64,
    /// [min, max] of the filtered members.
    pub s_interval: (f64, f64),
    /// Centroid pulled back to angles: atan2 of each (cos, sin) pair.
    pub centroid_theta: Vec<f64>,
    /// Componentwise median on the unit circle: per slot, the medians of
    /// the members' cos and sin values re-projected through atan2. Used as
    /// the cluster's representative parameter vector downstream.
    pub median_theta: Vec<f64>,
    pub n_outliers: usize,
}

/// Full clustering outcome: chosen k, geometry, quality diagnostics, and
/// per-cluster drift summaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub mean_silhouette: f64,
    pub hopkins_mean: f64,
    pub hopkins_p: f64,
    pub hopkins_degenerate: bool,
    pub clusters: Vec<ClusterSummary>,
}

/// Default k candidates for an N-point dataset.
pub fn default_k_range(n_points: usize) -> RangeInclusive<usize> {
    2..=12.min(n_points.saturating_sub(1))
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Type-7 quartiles (linear interpolation of order statistics) of unsorted
/// input.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64, f64), ClusteringError> {
    if values.len() < 4 {
        return Err(ClusteringError::TooFewValues(values.len()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let at = |p: f64| {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if lo + 1 < sorted.len() {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        } else {
            sorted[lo]
        }
    };
    Ok((at(0.25), median_sorted(&sorted), at(0.75)))
}

/// Removes values outside the Tukey fences Q1 - 1.5 IQR and Q3 + 1.5 IQR,
/// preserving input order.
pub fn iqr_filter(values: &[f64]) -> Result<Vec<f64>, ClusteringError> {
    iqr_filter_with(values, 1.5)
}

/// [`iqr_filter`] with a configurable fence multiplier.
pub fn iqr_filter_with(values: &[f64], multiplier: f64) -> Result<Vec<f64>, ClusteringError> {
    if !(multiplier > 0.0) {
        return Err(ClusteringError::InvalidFraction(multiplier));
    }
    let (q1, _, q3) = quartiles(values)?;
    let iqr = q3 - q1;
    let lo = q1 - multiplier * iqr;
    let hi = q3 + multiplier * iqr;
    Ok(values.iter().copied().filter(|&v| v >= lo && v <= hi).collect())
}

/// Per-slot circular median of embedded points: median cos and median sin,
/// re-projected to an angle in [0, 2pi).
pub fn circular_median_theta(member_points: &[&[f64]]) -> Vec<f64> {
    if member_points.is_empty() {
        return Vec::new();
    }
    let dim = member_points[0].len();
    let mut theta = Vec::with_capacity(dim / 2);
    let mut column = Vec::with_capacity(member_points.len());
    for slot in 0..dim / 2 {
        let mut med = [0.0; 2];
        for (axis, m) in med.iter_mut().enumerate() {
            column.clear();
            column.extend(member_points.iter().map(|p| p[2 * slot + axis]));
            column.sort_by(|a, b| a.partial_cmp(b).unwrap());
            *m = median_sorted(&column);
        }
        theta.push(reduce_angle(med[1].atan2(med[0])));
    }
    theta
}

fn summarize_cluster(
    cluster_id: usize,
    member_s: Vec<f64>,
    member_points: &[&[f64]],
    centroid: &[f64],
    iqr_multiplier: f64,
) -> Result<ClusterSummary, ClusteringError> {
    if member_s.is_empty() {
        return Err(ClusteringError::EmptyCluster(cluster_id));
    }
    let filtered_s = if member_s.len() >= 4 {
        iqr_filter_with(&member_s, iqr_multiplier)?
    } else {
        member_s.clone()
    };
    if filtered_s.is_empty() {
        return Err(ClusteringError::EmptyCluster(cluster_id));
    }
    let mut sorted = filtered_s.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let centroid_theta = centroid
        .chunks_exact(2)
        .map(|pair| reduce_angle(pair[1].atan2(pair[0])))
        .collect();
    let n_outliers = member_s.len() - filtered_s.len();
    Ok(ClusterSummary {
        cluster_id,
        median_s: median_sorted(&sorted),
        s_interval: (sorted[0], *sorted.last().unwrap()),
        member_s,
        filtered_s,
        centroid_theta,
        median_theta: circular_median_theta(member_points),
        n_outliers,
    })
}

/// Knobs for [`select_k_and_cluster_tuned`] beyond the k range and restarts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterTuning {
    pub hopkins_repeats: usize,
    pub hopkins_fraction: f64,
    pub iqr_multiplier: f64,
}

impl Default for ClusterTuning {
    fn default() -> Self {
        Self {
            hopkins_repeats: DEFAULT_HOPKINS_REPEATS,
            hopkins_fraction: DEFAULT_HOPKINS_FRACTION,
            iqr_multiplier: 1.5,
        }
    }
}

/// Clusters the embedding at every k in `k_range`, keeps the k with the
/// best mean silhouette (ties toward smaller k), and assembles the report
/// with Hopkins diagnostics and per-cluster drift summaries.
pub fn select_k_and_cluster(
    data: &EmbeddedDataset,
    k_range: RangeInclusive<usize>,
    restarts: usize,
    seed: u64,
) -> Result<ClusterReport, ClusteringError> {
    select_k_and_cluster_tuned(data, k_range, restarts, seed, &ClusterTuning::default())
}

/// [`select_k_and_cluster`] with explicit diagnostic and filter tuning.
pub fn select_k_and_cluster_tuned(
    data: &EmbeddedDataset,
    k_range: RangeInclusive<usize>,
    restarts: usize,
    seed: u64,
    tuning: &ClusterTuning,
) -> Result<ClusterReport, ClusteringError> {
    let n = data.n_points();
    let (k_lo, k_hi) = (*k_range.start(), *k_range.end());
    if k_lo < 2 || k_hi >= n || k_lo > k_hi {
        return Err(ClusteringError::KTooLarge { k: k_hi.max(k_lo), n });
    }
    let hopkins = hopkins_statistic(
        data,
        tuning.hopkins_fraction,
        tuning.hopkins_repeats,
        derived_stream(seed, 0x684F).next_u64(),
    )?;
    let mut best: Option<(usize, KmeansOutcome, f64)> = None;
    for k in k_range {
        let outcome = kmeans(
            &data.points,
            k,
            restarts,
            DEFAULT_MAX_ITERS,
            derived_stream(seed, k as u64).next_u64(),
        )?;
        let sil = match silhouette(&data.points, &outcome.assignment) {
            Ok(sil) => sil,
            // Lloyd collapsed every point into one occupied cluster for
            // this k; skip the candidate rather than abort the selection.
            Err(ClusteringError::SingleCluster) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|(_, _, s)| sil > *s) {
            best = Some((k, outcome, sil));
        }
    }
    let Some((k, outcome, mean_silhouette)) = best else {
        // Degenerate data (typically all records identical): report the
        // single cluster honestly instead of failing.
        return degenerate_single_cluster_report(data, &hopkins, tuning.iqr_multiplier);
    };
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut member_points: Vec<Vec<&[f64]>> = vec![Vec::new(); k];
    for (i, &c) in outcome.assignment.iter().enumerate() {
        members[c].push(data.meta[i].0);
        member_points[c].push(&data.points[i]);
    }
    let clusters = members
        .into_iter()
        .enumerate()
        .map(|(c, s_values)| {
            summarize_cluster(
                c,
                s_values,
                &member_points[c],
                &outcome.centroids[c],
                tuning.iqr_multiplier,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClusterReport {
        k,
        assignment: outcome.assignment,
        centroids: outcome.centroids,
        inertia: outcome.inertia,
        mean_silhouette,
        hopkins_mean: hopkins.mean,
        hopkins_p: hopkins.p_value,
        hopkins_degenerate: hopkins.degenerate,
        clusters,
    })
}

fn degenerate_single_cluster_report(
    data: &EmbeddedDataset,
    hopkins: &HopkinsResult,
    iqr_multiplier: f64,
) -> Result<ClusterReport, ClusteringError> {
    let n = data.n_points();
    let dim = data.dim();
    let mut centroid = vec![0.0; dim];
    for point in &data.points {
        for (c, &x) in centroid.iter_mut().zip(point) {
            *c += x / n as f64;
        }
    }
    let inertia: f64 =
        data.points.iter().map(|p| squared_distance(p, &centroid)).sum();
    let member_s: Vec<f64> = data.meta.iter().map(|&(s, _)| s).collect();
    let member_points: Vec<&[f64]> = data.points.iter().map(|p| p.as_slice()).collect();
    let cluster = summarize_cluster(0, member_s, &member_points, &centroid, iqr_multiplier)?;
    Ok(ClusterReport {
        k: 1,
        assignment: vec![0; n],
        centroids: vec![centroid],
        inertia,
        mean_silhouette: 0.0,
        hopkins_mean: hopkins.mean,
        hopkins_p: hopkins.p_value,
        hopkins_degenerate: hopkins.degenerate,
        clusters: vec![cluster],
    })
}

/// One spectrum candidate from a cluster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub median_s: f64,
    pub s_interval: (f64, f64),
}

/// Cluster medians sorted ascending, plus a flag when everything collapsed
/// into a single cluster and the estimates cannot resolve separate levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimates {
    pub points: Vec<SpectrumEstimate>,
    pub single_cluster: bool,
}

pub fn estimate_spectrum(report: &ClusterReport) -> Result<SpectrumEstimates, ClusteringError> {
    let mut points = Vec::with_capacity(report.clusters.len());
    for cluster in &report.clusters {
        if cluster.filtered_s.is_empty() {
            return Err(ClusteringError::EmptyCluster(cluster.cluster_id));
        }
        points.push(SpectrumEstimate {
            median_s: cluster.median_s,
            s_interval: cluster.s_interval,
        });
    }
    points.sort_by(|a, b| a.median_s.partial_cmp(&b.median_s).unwrap());
    Ok(SpectrumEstimates { points, single_cluster: report.clusters.len() == 1 })
}

/// Thresholds for the disjoint-basin hypothesis: intra-class spread below
/// eps1, inter-class gaps above eps2, records within delta of their class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSeparationCriteria {
    pub delta: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl ClusterSeparationCriteria {
    pub fn validate(&self) -> Result<(), ClusteringError> {
        let ok = std::f64::consts::FRAC_PI_2 > self.eps2
            && self.eps2 > 2.0 * self.delta
            && self.delta > self.eps1
            && self.eps1 > 0.0;
        if ok {
            Ok(())
        } else {
            Err(ClusteringError::InvalidCriteria(format!(
                "need pi/2 > eps2 > 2 delta > delta > eps1 > 0, got delta={} eps1={} eps2={}",
                self.delta, self.eps1, self.eps2
            )))
        }
    }
}

/// Distance between rays: min over global phase of the 2-norm difference,
/// which equals sqrt(2 - 2 |<a|b>|) for normalized states.
pub fn ray_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (2.0 - 2.0 * overlap.norm()).max(0.0).sqrt()
}

/// Where one record landed relative to the eigenvector classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordSeparation {
    pub record_index: usize,
    /// Eigenvalue class of the nearest eigenvector.
    pub class: usize,
    pub distance: f64,
    /// Smallest distance to any other class.
    pub next_distance: f64,
    pub within_delta: bool,
    /// Within delta of the nearest class and at least delta from all others.
    pub unambiguous: bool,
}

/// Outcome of [`validate_separation`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub records: Vec<RecordSeparation>,
    /// Eigenvalue classes holding at least one record.
    pub occupied_classes: Vec<usize>,
    /// Largest eigenvector spread inside any occupied class.
    pub max_intra_class: f64,
    /// Smallest eigenvector gap between distinct occupied classes.
    pub min_inter_class: f64,
    /// True when the class geometry satisfies the criteria and every record
    /// sits unambiguously inside one class basin.
    pub disjoint: bool,
}

/// Reconstructs each record's state and checks the record set against the
/// separation criteria: eigenvector classes (eigenvalues grouped within a
/// degeneracy tolerance) must have intra-class spread below eps1 and
/// pairwise gaps above eps2 among the occupied classes, and every record
/// must lie within delta of exactly one class.
pub fn validate_separation(
    records: &[ParameterRecord],
    ansatz: &AnsatzCircuit,
    criteria: &ClusterSeparationCriteria,
    eigen: &EigenDecomposition,
) -> Result<SeparationReport, ClusteringError> {
    criteria.validate()?;
    let dim = 1usize << ansatz.n_qubits();
    if eigen.eigenvalues.len() != dim {
        return Err(ClusteringError::DimensionMismatch(format!(
            "ansatz acts on dimension {dim} but eigensystem has {}",
            eigen.eigenvalues.len()
        )));
    }
    // Group eigenvalue indices into degenerate classes.
    let mut class_of = vec![0usize; dim];
    let mut n_classes = 0usize;
    for j in 0..dim {
        if j > 0 && (eigen.eigenvalues[j] - eigen.eigenvalues[j - 1]).abs() > DEGENERACY_TOL {
            n_classes += 1;
        }
        class_of[j] = n_classes;
    }
    n_classes += 1;
    let eigvecs: Vec<Vec<Complex64>> = (0..dim).map(|j| eigen.eigenvector(j)).collect();

    let mut record_rows = Vec::with_capacity(records.len());
    for (idx, record) in records.iter().enumerate() {
        if record.theta.len() != ansatz.n_params() {
            return Err(ClusteringError::DimensionMismatch(format!(
                "record {idx} has {} parameters but the ansatz takes {}",
                record.theta.len(),
                ansatz.n_params()
            )));
        }
        let state = apply_circuit(ansatz, &record.theta, &Statevector::zero_state(ansatz.n_qubits()))
            .map_err(|e| ClusteringError::DimensionMismatch(e.to_string()))?;
        // Distance to a class = distance to its nearest member eigenvector.
        let mut class_dist = vec![f64::INFINITY; n_classes];
        for (j, v) in eigvecs.iter().enumerate() {
            let d = ray_distance(state.amplitudes(), v);
            class_dist[class_of[j]] = class_dist[class_of[j]].min(d);
        }
        let (class, &distance) = class_dist
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let next_distance = class_dist
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != class)
            .map(|(_, &d)| d)
            .fold(f64::INFINITY, f64::min);
        let within_delta = distance < criteria.delta;
        record_rows.push(RecordSeparation {
            record_index: idx,
            class,
            distance,
            next_distance,
            within_delta,
            unambiguous: within_delta && next_distance >= criteria.delta,
        });
    }

    let mut occupied_classes: Vec<usize> = record_rows.iter().map(|r| r.class).collect();
    occupied_classes.sort_unstable();
    occupied_classes.dedup();

    let mut max_intra_class = 0.0f64;
    let mut min_inter_class = f64::INFINITY;
    for &ci in &occupied_classes {
        for (j1, v1) in eigvecs.iter().enumerate() {
            if class_of[j1] != ci {
                continue;
            }
            for (j2, v2) in eigvecs.iter().enumerate() {
                if j2 <= j1 {
                    continue;
                }
                let d = ray_distance(v1, v2);
                if class_of[j2] == ci {
                    max_intra_class = max_intra_class.max(d);
                } else if occupied_classes.contains(&class_of[j2]) {
                    min_inter_class = min_inter_class.min(d);
                }
            }
        }
    }

    let geometry_ok = max_intra_class < criteria.eps1
        && (occupied_classes.len() < 2 || min_inter_class > criteria.eps2);
    let disjoint = geometry_ok && record_rows.iter().all(|r| r.unambiguous);
    Ok(SeparationReport {
        records: record_rows,
        occupied_classes,
        max_intra_class,
        min_inter_class,
        disjoint,
    })
}
