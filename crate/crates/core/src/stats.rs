//! Statistical instruments: quantum-speed-limit bound calculators, the
//! Mann-Kendall trend test, the Fisher score for parameter contributions,
//! and the special functions they and the clustering diagnostics rest on.
//!
//! The special functions (log-gamma, regularized incomplete beta and gamma,
//! normal CDF) are implemented from scratch and frozen against independent
//! reference values, so no statistics dependency is needed anywhere in the
//! crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("argument outside valid domain: {0}")]
    DomainError(String),
    #[error("series too short: need at least 4 values, got {0}")]
    TooShort(usize),
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),
}

/// Constant in the Margolus-Levitin-type bounds.
pub const DEFAULT_BETA: f64 = 0.724;

/// Inputs for the minimum-evolution-time bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedLimitInput {
    /// Fidelity threshold in [0, 1].
    pub delta_fid: f64,
    /// <H0 - sigma_min>, strictly positive.
    pub mean_excess: f64,
    pub beta: f64,
}

impl SpeedLimitInput {
    pub fn new(delta_fid: f64, mean_excess: f64) -> Self {
        Self { delta_fid, mean_excess, beta: DEFAULT_BETA }
    }

    pub fn with_beta(delta_fid: f64, mean_excess: f64, beta: f64) -> Self {
        Self { delta_fid, mean_excess, beta }
    }
}

/// Weakest lower bound on the evolution time to reach fidelity delta_fid:
/// 4 arccos^2(sqrt(delta_fid)) / (beta pi^2 <H0 - sigma_min>).
pub fn tau_weakest(input: &SpeedLimitInput) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&input.delta_fid) || input.delta_fid.is_nan() {
        return Err(StatsError::DomainError(format!(
            "delta_fid {} outside [0, 1]",
            input.delta_fid
        )));
    }
    if !(input.mean_excess > 0.0) {
        return Err(StatsError::DomainError(format!(
            "mean_excess {} must be positive",
            input.mean_excess
        )));
    }
    if !(input.beta > 0.0) {
        return Err(StatsError::DomainError(format!(
            "beta {} must be positive",
            input.beta
        )));
    }
    let delta = input.delta_fid.sqrt().acos();
    Ok(4.0 * delta * delta / (input.beta * std::f64::consts::PI.powi(2) * input.mean_excess))
}

/// Time saved per sweep point: 4 delta^2 / (beta pi^2 mean_excess), with
/// delta the geodesic threshold in [0, pi/2]. Equals `tau_weakest` under
/// delta = arccos(sqrt(delta_fid)).
pub fn tau_save(delta: f64, mean_excess: f64, beta: f64) -> Result<f64, StatsError> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&delta) || delta.is_nan() {
        return Err(StatsError::DomainError(format!(
            "delta {delta} outside [0, pi/2]"
        )));
    }
    if !(mean_excess > 0.0) {
        return Err(StatsError::DomainError(format!(
            "mean_excess {mean_excess} must be positive"
        )));
    }
    if !(beta > 0.0) {
        return Err(StatsError::DomainError(format!("beta {beta} must be positive")));
    }
    Ok(4.0 * delta * delta / (beta * std::f64::consts::PI.powi(2) * mean_excess))
}

/// Mann-Kendall trend test result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannKendallResult {
    /// S = sum over i<j of sign(x_j - x_i).
    pub s: i64,
    /// Kendall's tau = S / (n(n-1)/2).
    pub tau: f64,
    /// Continuity-corrected normal deviate (0 when the variance vanishes).
    pub z: f64,
    pub p_value: f64,
}

fn mann_kendall_s(series: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..series.len() {
        for j in (i + 1)..series.len() {
            s += match series[j].partial_cmp(&series[i]).unwrap() {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            };
        }
    }
    s
}

fn tie_groups(series: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = series.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut groups = Vec::new();
    let mut run = 1usize;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            if run > 1 {
                groups.push(run);
            }
            run = 1;
        }
    }
    if run > 1 {
        groups.push(run);
    }
    groups
}

/// Two-sided Mann-Kendall test under the normal approximation with
/// tie-corrected variance and continuity correction. A series of all ties
/// has zero variance and reports tau = 0, p = 1.
pub fn mann_kendall(series: &[f64]) -> Result<MannKendallResult, StatsError> {
    let n = series.len();
    if n < 4 {
        return Err(StatsError::TooShort(n));
    }
    if series.iter().any(|x| x.is_nan()) {
        return Err(StatsError::DomainError("series contains NaN".into()));
    }
    let s = mann_kendall_s(series);
    let pairs = (n * (n - 1) / 2) as f64;
    let tau = s as f64 / pairs;
    let nf = n as f64;
    let tie_term: f64 = tie_groups(series)
        .iter()
        .map(|&t| {
            let tf = t as f64;
            tf * (tf - 1.0) * (2.0 * tf + 5.0)
        })
        .sum();
    let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term) / 18.0;
    if var <= 0.0 {
        return Ok(MannKendallResult { s, tau, z: 0.0, p_value: 1.0 });
    }
    let z = match s.cmp(&0) {
        std::cmp::Ordering::Greater => (s as f64 - 1.0) / var.sqrt(),
        std::cmp::Ordering::Less => (s as f64 + 1.0) / var.sqrt(),
        std::cmp::Ordering::Equal => 0.0,
    };
    let p_value = (2.0 * (1.0 - normal_cdf(z.abs()))).min(1.0);
    Ok(MannKendallResult { s, tau, z, p_value })
}

/// Exact-distribution Mann-Kendall p-value for short tie-free series
/// (n <= 10), enumerating S over all permutations via the inversion-count
/// recurrence.
pub fn mann_kendall_exact(series: &[f64]) -> Result<MannKendallResult, StatsError> {
    let n = series.len();
    if n < 4 {
        return Err(StatsError::TooShort(n));
    }
    if n > 10 {
        return Err(StatsError::DomainError(format!(
            "exact mode capped at length 10, got {n}"
        )));
    }
    if !tie_groups(series).is_empty() {
        return Err(StatsError::DomainError(
            "exact mode requires a tie-free series".into(),
        ));
    }
    let s = mann_kendall_s(series);
    let pairs = n * (n - 1) / 2;
    let tau = s as f64 / pairs as f64;
    // counts[k] = number of permutations of n items with k inversions.
    let mut counts = vec![1u64];
    for m in 2..=n {
        let mut next = vec![0u64; counts.len() + m - 1];
        for (k, &c) in counts.iter().enumerate() {
            for shift in 0..m {
                next[k + shift] += c;
            }
        }
        counts = next;
    }
    let total: u64 = counts.iter().sum();
    let abs_s = s.unsigned_abs() as usize;
    let mut extreme = 0u64;
    for (inv, &c) in counts.iter().enumerate() {
        let s_val = pairs as i64 - 2 * inv as i64;
        if s_val.unsigned_abs() as usize >= abs_s {
            extreme += c;
        }
    }
    let p_value = extreme as f64 / total as f64;
    Ok(MannKendallResult { s, tau, z: 0.0, p_value })
}

/// Per-feature Fisher scores with the degenerate cases flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherScores {
    pub scores: Vec<f64>,
    /// Zero within-class variance under distinct class means.
    pub infinite: Vec<bool>,
    /// Feature indices sorted by score, best first (infinite scores lead).
    pub ranking: Vec<usize>,
}

const FISHER_DENOM_GUARD: f64 = 1e-15;

/// Fisher score per feature j:
/// sum_c n_c (mu_cj - mu_j)^2 / sum_c n_c sigma_cj^2.
/// Needs at least two classes, each with at least two members.
pub fn fisher_score(
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<FisherScores, StatsError> {
    let n = features.len();
    if n != labels.len() {
        return Err(StatsError::DegenerateLabels(format!(
            "{n} rows but {} labels",
            labels.len()
        )));
    }
    if n == 0 {
        return Err(StatsError::DegenerateLabels("no data".into()));
    }
    let d = features[0].len();
    if features.iter().any(|row| row.len() != d) {
        return Err(StatsError::DegenerateLabels("ragged feature rows".into()));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(StatsError::DegenerateLabels(format!(
            "need at least 2 classes, got {}",
            classes.len()
        )));
    }
    for &c in &classes {
        let count = labels.iter().filter(|&&l| l == c).count();
        if count < 2 {
            return Err(StatsError::DegenerateLabels(format!(
                "class {c} has {count} member(s), need at least 2"
            )));
        }
    }
    let mut scores = vec![0.0; d];
    let mut infinite = vec![false; d];
    for j in 0..d {
        let global_mean: f64 = features.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let mut between = 0.0;
        let mut within = 0.0;
        for &c in &classes {
            let members: Vec<f64> = features
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(r, _)| r[j])
                .collect();
            let nc = members.len() as f64;
            let mean = members.iter().sum::<f64>() / nc;
            let var = members.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nc;
            between += nc * (mean - global_mean).powi(2);
            within += nc * var;
        }
        if within < FISHER_DENOM_GUARD {
            if between < FISHER_DENOM_GUARD {
                scores[j] = 0.0;
            } else {
                scores[j] = f64::INFINITY;
                infinite[j] = true;
            }
        } else {
            scores[j] = between / within;
        }
    }
    let mut ranking: Vec<usize> = (0..d).collect();
    ranking.sort_by(|&a, &b| {
        scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b))
    });
    Ok(FisherScores { scores, infinite, ranking })
}

// Lanczos approximation, g = 7, 9 coefficients. Relative error ~ 1e-14
// over the positive reals.
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (std::f64::consts::TAU).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const MAX_SERIES_ITER: usize = 500;
const SERIES_EPS: f64 = 1e-16;

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // Series representation converges fastest here.
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_SERIES_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * SERIES_EPS {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        1.0 - regularized_gamma_q_cf(a, x)
    }
}

/// Continued fraction for Q(a, x), valid for x >= a + 1.
fn regularized_gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_SERIES_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < SERIES_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

fn erf(x: f64) -> f64 {
    if x < 0.0 {
        -erf(-x)
    } else {
        regularized_gamma_p(0.5, x * x)
    }
}

fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x * x < 1.5 {
        1.0 - erf(x)
    } else {
        regularized_gamma_q_cf(0.5, x * x)
    }
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_SERIES_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < SERIES_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
/// This is the CDF of the Beta(a, b) distribution.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn tau_weakest_examples() {
        let zero = tau_weakest(&SpeedLimitInput::new(1.0, 2.0)).unwrap();
        assert!(zero.abs() < 1e-15);
        let full = tau_weakest(&SpeedLimitInput::with_beta(0.0, 1.0, 0.724)).unwrap();
        assert!((full - 1.0 / 0.724).abs() < 1e-12);
    }

    #[test]
    fn tau_weakest_monotone_in_fidelity_threshold() {
        let mut last = f64::INFINITY;
        for i in 0..=100 {
            let f = i as f64 / 100.0;
            let tau = tau_weakest(&SpeedLimitInput::new(f, 1.3)).unwrap();
            assert!(tau >= 0.0);
            assert!(tau <= last);
            last = tau;
        }
    }

    #[test]
    fn tau_weakest_domain_errors() {
        assert!(tau_weakest(&SpeedLimitInput::new(-0.1, 1.0)).is_err());
        assert!(tau_weakest(&SpeedLimitInput::new(1.1, 1.0)).is_err());
        assert!(tau_weakest(&SpeedLimitInput::new(0.5, 0.0)).is_err());
        assert!(tau_weakest(&SpeedLimitInput::new(0.5, -1.0)).is_err());
    }

    #[test]
    fn tau_save_matches_tau_weakest_under_substitution() {
        let endpoint =
            tau_save(std::f64::consts::FRAC_PI_2, 1.0, 0.724).unwrap();
        assert!((endpoint - 1.0 / 0.724).abs() < 1e-12);
        assert!(tau_save(0.0, 1.0, 0.724).unwrap().abs() < 1e-15);
        for i in 0..100 {
            let f = (i as f64 + 0.5) / 100.0;
            let delta = f.sqrt().acos();
            let via_save = tau_save(delta, 0.8, 0.724).unwrap();
            let via_weakest =
                tau_weakest(&SpeedLimitInput::with_beta(f, 0.8, 0.724)).unwrap();
            assert!((via_save - via_weakest).abs() < 1e-12);
        }
        assert!(tau_save(2.0, 1.0, 0.724).is_err());
        assert!(tau_save(0.3, 0.0, 0.724).is_err());
    }

    #[test]
    fn mann_kendall_monotone_series() {
        let result = mann_kendall(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(result.s, 10);
        assert!((result.tau - 1.0).abs() < 1e-15);
        assert!(result.p_value < 0.05);
        // z = (10 - 1)/sqrt(300/18) with Var = 16.666..
        assert!((result.z - 9.0 / (300.0 / 18.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mann_kendall_all_ties() {
        let result = mann_kendall(&[3.0; 5]).unwrap();
        assert_eq!(result.s, 0);
        assert_eq!(result.tau, 0.0);
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn mann_kendall_antisymmetry_and_range() {
        let mut rng = SplitMix64::new(404);
        for _ in 0..20 {
            let n = 4 + rng.index(7);
            let series: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let forward = mann_kendall(&series).unwrap();
            let reversed: Vec<f64> = series.iter().rev().cloned().collect();
            let backward = mann_kendall(&reversed).unwrap();
            assert!((forward.tau + backward.tau).abs() < 1e-12);
            assert!((-1.0..=1.0).contains(&forward.tau));
            assert!((forward.p_value - backward.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn mann_kendall_too_short() {
        assert!(matches!(
            mann_kendall(&[1.0, 2.0, 3.0]),
            Err(StatsError::TooShort(3))
        ));
    }

    #[test]
    fn mann_kendall_exact_small_series() {
        // P(|S| >= 10) over all 120 permutations of 5 items: only the two
        // fully sorted orders, so p = 2/120.
        let result = mann_kendall_exact(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!((result.p_value - 1.0 / 60.0).abs() < 1e-15);
        assert!((result.tau - 1.0).abs() < 1e-15);

        assert!(mann_kendall_exact(&[1.0, 1.0, 2.0, 3.0]).is_err());
        let long: Vec<f64> = (0..11).map(|i| i as f64).collect();
        assert!(mann_kendall_exact(&long).is_err());
    }

    #[test]
    fn mann_kendall_exact_agrees_with_approximation_in_direction() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..10 {
            let series: Vec<f64> = (0..7).map(|_| rng.uniform(0.0, 1.0)).collect();
            let exact = mann_kendall_exact(&series).unwrap();
            let approx = mann_kendall(&series).unwrap();
            assert_eq!(exact.s, approx.s);
            // Both are valid p-values for the same statistic; they should
            // agree loosely for n = 7.
            assert!((exact.p_value - approx.p_value).abs() < 0.1);
        }
    }

    #[test]
    fn fisher_score_flat_feature_scores_zero() {
        let features = vec![
            vec![1.0, 0.0],
            vec![1.0, 0.1],
            vec![1.0, 5.0],
            vec![1.0, 5.2],
        ];
        let labels = vec![0, 0, 1, 1];
        let result = fisher_score(&features, &labels).unwrap();
        assert_eq!(result.scores[0], 0.0);
        assert!(!result.infinite[0]);
        assert!(result.scores[1] > 10.0);
        assert_eq!(result.ranking, vec![1, 0]);
    }

    #[test]
    fn fisher_score_flags_zero_variance_with_distinct_means() {
        let features = vec![
            vec![0.0],
            vec![0.0],
            vec![1.0],
            vec![1.0],
        ];
        let labels = vec![0, 0, 1, 1];
        let result = fisher_score(&features, &labels).unwrap();
        assert!(result.infinite[0]);
        assert!(result.scores[0].is_infinite());
    }

    #[test]
    fn fisher_score_shift_and_scale_invariance() {
        let mut rng = SplitMix64::new(3030);
        let features: Vec<Vec<f64>> =
            (0..12).map(|i| vec![rng.uniform(0.0, 1.0) + (i % 3) as f64]).collect();
        let labels: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let base = fisher_score(&features, &labels).unwrap();
        let shifted: Vec<Vec<f64>> =
            features.iter().map(|r| vec![r[0] + 17.5]).collect();
        let scaled: Vec<Vec<f64>> = features.iter().map(|r| vec![r[0] * -3.2]).collect();
        let shifted_scores = fisher_score(&shifted, &labels).unwrap();
        let scaled_scores = fisher_score(&scaled, &labels).unwrap();
        assert!((base.scores[0] - shifted_scores.scores[0]).abs() < 1e-9);
        assert!((base.scores[0] - scaled_scores.scores[0]).abs() < 1e-9);
    }

    #[test]
    fn fisher_score_degenerate_labels() {
        let features = vec![vec![1.0], vec![2.0], vec![3.0]];
        assert!(fisher_score(&features, &[0, 0, 0]).is_err());
        assert!(fisher_score(&features, &[0, 0, 1]).is_err());
    }

    #[test]
    fn ln_gamma_frozen_values() {
        let cases = [
            (0.5f64, 0.5723649429247004f64),
            (1.0, 0.0),
            (1.5, -0.12078223763524543),
            (2.0, 0.0),
            (3.7, 1.4280723266653883),
            (10.3, 13.48203678613836),
            (25.0, 54.78472939811232),
            (100.5, 361.4355404677776),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x);
            assert!(
                (got - want).abs() <= 1e-11 * want.abs().max(1.0),
                "ln_gamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn normal_cdf_frozen_values() {
        let cases = [
            (-3.0f64, 0.0013498980316300957f64),
            (-1.0, 0.15865525393145707),
            (-0.5, 0.3085375387259869),
            (0.0, 0.5),
            (0.7, 0.758036347776927),
            (1.96, 0.9750021048517795),
            (4.2, 0.9999866542509841),
        ];
        for (x, want) in cases {
            let got = normal_cdf(x);
            assert!(
                (got - want).abs() < 1e-12,
                "normal_cdf({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn incomplete_beta_frozen_values() {
        let cases = [
            (2.5f64, 3.5f64, 0.3f64, 0.29675298929566646f64),
            (13.0, 13.0, 0.5, 0.5),
            (13.0, 13.0, 0.7, 0.9825302594739422),
            (0.5, 0.5, 0.25, 1.0 / 3.0),
            (1.0, 1.0, 0.42, 0.42),
            (5.0, 2.0, 0.9, 0.885735),
        ];
        for (a, b, x, want) in cases {
            let got = regularized_incomplete_beta(a, b, x);
            assert!(
                (got - want).abs() < 1e-12,
                "I_{x}({a},{b}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn incomplete_beta_symmetry() {
        let mut rng = SplitMix64::new(88);
        for _ in 0..50 {
            let a = rng.uniform(0.3, 20.0);
            let b = rng.uniform(0.3, 20.0);
            let x = rng.uniform(0.0, 1.0);
            let lhs = regularized_incomplete_beta(a, b, x);
            let rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
            assert!((lhs - rhs).abs() < 1e-12, "a={a} b={b} x={x}");
            assert!((0.0..=1.0).contains(&lhs));
        }
    }
}
