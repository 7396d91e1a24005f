//! Sample-moment helpers used by the Monte Carlo engine and estimator bench.
//!
//! All reductions run sequentially over index order with compensated
//! accumulation, so results do not depend on how trials were produced
//! (serial or sharded across workers).

/// Kahan-compensated sum.
pub fn ksum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn mean(values: &[f64]) -> f64 {
    ksum(values.iter().copied()) / values.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 2, "variance needs at least two samples");
    let m = mean(values);
    ksum(values.iter().map(|&v| (v - m) * (v - m))) / (n - 1) as f64
}

/// Unbiased sample covariance of paired samples.
pub fn sample_covariance(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, y.len());
    assert!(n >= 2);
    let mx = mean(x);
    let my = mean(y);
    ksum(x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my))) / (n - 1) as f64
}

/// Standard error of the sample mean.
pub fn mean_std_error(values: &[f64]) -> f64 {
    (sample_variance(values) / values.len() as f64).sqrt()
}

/// Central moments of a single sample up to fourth order.
pub struct CentralMoments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
    pub m4: f64,
}

pub fn central_moments(values: &[f64]) -> CentralMoments {
    let n = values.len();
    let m = mean(values);
    let m2 = ksum(values.iter().map(|&v| (v - m).powi(2))) / n as f64;
    let m4 = ksum(values.iter().map(|&v| (v - m).powi(4))) / n as f64;
    CentralMoments { n, mean: m, m2, m4 }
}

/// Delta-method standard error of the ratio statistic Var(x) / Mean(y).
///
/// Covers both the NRF (x = N1 - N2, y = N1 + N2) and the per-channel Fano
/// factor (x = y = channel counts). Uses the large-sample variances
/// Var(s^2) ~ (m4 - m2^2)/n, Var(ybar) = Var(y)/n and their cross term.
pub fn variance_over_mean_se(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let cm = central_moments(x);
    let s2 = cm.m2 * n / (n - 1.0);
    let var_s2 = (cm.m4 - cm.m2 * cm.m2) / n;
    let var_ybar = sample_variance(y) / n;
    // Cov(s^2, ybar) ~ E[(x-mux)^2 (y-muy)] / n
    let cov = ksum(
        x.iter()
            .zip(y)
            .map(|(&a, &b)| (a - mx) * (a - mx) * (b - my)),
    ) / (n * n);
    let r = s2 / my;
    let rel = var_s2 / (s2 * s2) + var_ybar / (my * my) - 2.0 * cov / (s2 * my);
    (r * r * rel.max(0.0)).sqrt()
}

/// Standard error of the sample covariance: Var(cov) ~ (m22 - cov^2)/n.
pub fn covariance_std_error(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let cov = sample_covariance(x, y);
    let m22 = ksum(
        x.iter()
            .zip(y)
            .map(|(&a, &b)| (a - mx).powi(2) * (b - my).powi(2)),
    ) / n;
    (((m22 - cov * cov) / n).max(0.0)).sqrt()
}
