//! Small statistical toolkit used by the Monte Carlo verifiers: KS tests,
//! exact binomial lower bounds, a Hill tail-index estimator, two-sample
//! chi-square comparison, and batch-means standard errors.

use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::CoreError;

/// Sample mean and standard error of the mean.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    assert!(!samples.is_empty());
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Asymptotic Kolmogorov survival function `Q_KS(lambda)`.
pub fn ks_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_from_d(d: f64, n_eff: f64) -> f64 {
    let sqrt_n = n_eff.sqrt();
    ks_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
/// Returns `(d, p)`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    assert!(!samples.is_empty());
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let hi = (i as f64 + 1.0) / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    (d, ks_p_from_d(d, n))
}

/// Two-sample KS test. Returns `(d, p)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (na, nb) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < na && xs[i] <= t {
            i += 1;
        }
        while j < nb && ys[j] <= t {
            j += 1;
        }
        let fa = i as f64 / na as f64;
        let fb = j as f64 / nb as f64;
        d = d.max((fa - fb).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    (d, ks_p_from_d(d, n_eff))
}

/// Sign-flip symmetry test: two-sample KS between one half of the samples
/// and the negated other half. The halves are disjoint so the KS null
/// calibration applies.
pub fn sign_flip_ks(samples: &[f64]) -> (f64, f64) {
    assert!(samples.len() >= 4, "need at least four samples");
    let mid = samples.len() / 2;
    let flipped: Vec<f64> = samples[mid..].iter().map(|x| -x).collect();
    ks_two_sample(&samples[..mid], &flipped)
}

/// One-sided Clopper-Pearson lower confidence bound for a binomial
/// proportion: positive if and only if at least one success was observed.
pub fn clopper_pearson_lower(successes: u64, trials: u64, level: f64) -> f64 {
    assert!(trials > 0 && successes <= trials);
    assert!(level > 0.0 && level < 1.0);
    if successes == 0 {
        return 0.0;
    }
    if successes == trials {
        // Beta(n, 1) quantile in closed form.
        return level.powf(1.0 / trials as f64);
    }
    let beta = Beta::new(successes as f64, (trials - successes + 1) as f64).unwrap();
    beta.inverse_cdf(level)
}

/// Two-sample chi-square homogeneity test on matched histogram counts.
/// Returns `(statistic, dof, p)`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<(f64, usize, f64), CoreError> {
    if a.len() != b.len() {
        return Err(CoreError::invalid("histogram length mismatch"));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(CoreError::EmptySamples {
            context: "chi-square histogram",
        });
    }
    let ka = ((nb as f64) / (na as f64)).sqrt();
    let kb = 1.0 / ka;
    let mut stat = 0.0;
    let mut used = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let total = x + y;
        if total == 0 {
            continue;
        }
        used += 1;
        let diff = ka * x as f64 - kb * y as f64;
        stat += diff * diff / total as f64;
    }
    if used < 2 {
        return Err(CoreError::invalid("need at least two occupied bins"));
    }
    let dof = used - 1;
    let chi = ChiSquared::new(dof as f64).unwrap();
    let p = 1.0 - chi.cdf(stat);
    Ok((stat, dof, p))
}

/// Hill estimator of the tail exponent from the top `k` order statistics.
pub fn hill_tail_exponent(samples: &[f64], k: usize) -> Result<f64, CoreError> {
    if samples.len() < k + 1 || k == 0 {
        return Err(CoreError::invalid(
            "Hill estimator needs more samples than tail order statistics",
        ));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let x_k = xs[k];
    if x_k <= 0.0 {
        return Err(CoreError::invalid("Hill estimator needs positive samples"));
    }
    let mean_log: f64 = xs[..k].iter().map(|x| (x / x_k).ln()).sum::<f64>() / k as f64;
    Ok(1.0 / mean_log)
}

/// Batch-means estimate of the mean and its standard error for a correlated
/// series.
pub fn batch_means_se(samples: &[f64], batches: usize) -> (f64, f64) {
    assert!(batches >= 2 && samples.len() >= batches);
    let per = samples.len() / batches;
    let used = per * batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| samples[b * per..(b + 1) * per].iter().sum::<f64>() / per as f64)
        .collect();
    let grand = samples[..used].iter().sum::<f64>() / used as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>()
        / (batches as f64 - 1.0);
    (grand, (var / batches as f64).sqrt())
}

/// Empirical quantile by linear interpolation on sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() as f64 - 1.0);
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[sorted.len() - 1]
    }
}
