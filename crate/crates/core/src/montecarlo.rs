//! Statistical simulation of twin-beam detection.
//!
//! Each trial samples one shared pre-loss count for both channels (the
//! correlation mechanism) plus independent optical-noise counts per channel;
//! loss is applied by binomial thinning (or the literal per-photon Bernoulli
//! comparison), and detector noise is added after thinning since dark counts
//! do not pass through the optical path.
//!
//! Every random draw derives its generator from (master seed, stream id,
//! trial index), so results are reproducible and independent of how trials
//! are sharded across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::noise_model::{ChannelNoiseModel, TwinBeamSource};
use crate::stats;

/// A sample statistic with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// How per-photon loss is realized. The two are distributionally identical;
/// the Bernoulli form exists as the literal experimental procedure and as a
/// cross-check for the binomial draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThinningMethod {
    #[default]
    Binomial,
    PerPhotonBernoulli,
}

/// Standard-error method for the NRF ratio statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum ErrorMethod {
    DeltaMethod,
    Bootstrap { resamples: usize },
}

impl Default for ErrorMethod {
    fn default() -> Self {
        ErrorMethod::DeltaMethod
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: usize,
    pub source: TwinBeamSource,
    pub noise: ChannelNoiseModel,
    pub seed: u64,
    #[serde(default)]
    pub thinning: ThinningMethod,
    #[serde(default)]
    pub error_method: ErrorMethod,
    /// Reuse the pre-loss samples across eta2 sweep points (the literal
    /// procedure fixes them before the loop); disable for fully independent
    /// draws per point.
    #[serde(default = "default_true")]
    pub reuse_source_samples: bool,
}

fn default_true() -> bool {
    true
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(ModelError::Config(format!(
                "trials must be >= 2 (variance needs two samples), got {}",
                self.trials
            )));
        }
        self.source.validate()?;
        self.noise.validate()?;
        if let ErrorMethod::Bootstrap { resamples } = self.error_method {
            if resamples < 2 {
                return Err(ModelError::Config(
                    "bootstrap needs at least 2 resamples".into(),
                ));
            }
        }
        Ok(())
    }

    /// Pre-loss mean of the optical-noise distribution on channel i.
    pub fn mean_photons_rho(&self, channel: usize) -> f64 {
        let rho = if channel == 1 {
            self.noise.rho1
        } else {
            self.noise.rho2
        };
        rho * self.source.mean_photons
    }

    /// Mean of the detector-noise distribution on channel i.
    pub fn mean_photons_d(&self, channel: usize) -> f64 {
        let d = if channel == 1 {
            self.noise.d1
        } else {
            self.noise.d2
        };
        d * self.source.mean_photons
    }

    /// True when Gaussian count sampling could clamp at zero with
    /// non-negligible probability (mean < 10 standard deviations).
    pub fn gaussian_validity_warning(&self) -> Option<String> {
        let check = |label: &str, mean: f64, fano: f64| -> Option<String> {
            if mean > 0.0 && mean < 10.0 * (fano * mean).sqrt() {
                Some(format!(
                    "{label}: mean {mean} is below 10 standard deviations ({:.1}); \
                     zero-clamping of Gaussian counts may bias the statistics",
                    10.0 * (fano * mean).sqrt()
                ))
            } else {
                None
            }
        };
        check("source", self.source.mean_photons, self.source.fano)
            .or_else(|| check("optical noise 1", self.mean_photons_rho(1), self.noise.fano_rho1))
            .or_else(|| check("optical noise 2", self.mean_photons_rho(2), self.noise.fano_rho2))
            .or_else(|| check("detector noise 1", self.mean_photons_d(1), self.noise.fano_d1))
            .or_else(|| check("detector noise 2", self.mean_photons_d(2), self.noise.fano_d2))
    }
}

/// RNG stream identifiers. Sweep points shift these by `point * STREAM_SPAN`.
pub mod streams {
    pub const SOURCE: u64 = 0;
    pub const RHO1: u64 = 1;
    pub const RHO2: u64 = 2;
    pub const DARK1: u64 = 3;
    pub const DARK2: u64 = 4;
    pub const THIN1: u64 = 5;
    pub const THIN2: u64 = 6;
    pub const THIN_RHO1: u64 = 7;
    pub const THIN_RHO2: u64 = 8;
    pub const ABSORPTION: u64 = 9;
    pub const BOOTSTRAP: u64 = 10;
    pub const STREAM_SPAN: u64 = 16;
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator for one (stream, trial) pair.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut state = mix64(seed ^ mix64(stream.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    state = mix64(state ^ mix64(trial.wrapping_add(0xD1B5_4A32_D192_ED03)));
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn gaussian_count(mean: f64, fano: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let normal = Normal::new(mean, (fano * mean).sqrt()).expect("valid parameters");
    let x: f64 = normal.sample(rng);
    x.round_ties_even().max(0.0) as u64
}

/// Sample photon counts from a Gaussian with mean m and variance F m,
/// rounded half-to-even and clamped at zero.
pub fn sample_source_counts(
    mean: f64,
    fano: f64,
    trials: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<u64>> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(ModelError::Domain(format!(
            "mean must be finite and >= 0, got {mean}"
        )));
    }
    if !(fano >= 1.0) || !fano.is_finite() {
        return Err(ModelError::Domain(format!(
            "fano must be finite and >= 1, got {fano}"
        )));
    }
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|t| gaussian_count(mean, fano, &mut trial_rng(seed, stream, t)))
        .collect())
}

fn thin_one(count: u64, eta: f64, method: ThinningMethod, rng: &mut ChaCha8Rng) -> u64 {
    if eta >= 1.0 {
        return count;
    }
    if eta <= 0.0 || count == 0 {
        return 0;
    }
    match method {
        ThinningMethod::Binomial => Binomial::new(count, eta)
            .expect("eta in (0,1)")
            .sample(rng),
        ThinningMethod::PerPhotonBernoulli => {
            (0..count).filter(|_| rng.random::<f64>() < eta).count() as u64
        }
    }
}

/// Apply per-trial random loss: each detected count is binomially
/// distributed with parameters (pre-loss count, eta).
pub fn thin_counts(
    pre_loss: &[u64],
    eta: f64,
    seed: u64,
    stream: u64,
    method: ThinningMethod,
) -> Result<Vec<u64>> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(ModelError::Domain(format!(
            "eta must lie in [0,1], got {eta}"
        )));
    }
    Ok(pre_loss
        .par_iter()
        .enumerate()
        .map(|(t, &n)| thin_one(n, eta, method, &mut trial_rng(seed, stream, t as u64)))
        .collect())
}

/// Pre-loss samples shared across sweep points.
pub struct PreSamples {
    pub source: Vec<u64>,
    pub rho1: Vec<u64>,
    pub rho2: Vec<u64>,
    pub dark1: Vec<u64>,
    pub dark2: Vec<u64>,
}

pub fn presample(config: &SimulationConfig, point: u64) -> Result<PreSamples> {
    use streams::*;
    let base = point * STREAM_SPAN;
    let t = config.trials;
    let seed = config.seed;
    let n = config.source.mean_photons;
    Ok(PreSamples {
        source: sample_source_counts(n, config.source.fano, t, seed, base + SOURCE)?,
        rho1: sample_source_counts(
            config.mean_photons_rho(1),
            config.noise.fano_rho1,
            t,
            seed,
            base + RHO1,
        )?,
        rho2: sample_source_counts(
            config.mean_photons_rho(2),
            config.noise.fano_rho2,
            t,
            seed,
            base + RHO2,
        )?,
        dark1: sample_source_counts(
            config.mean_photons_d(1),
            config.noise.fano_d1,
            t,
            seed,
            base + DARK1,
        )?,
        dark2: sample_source_counts(
            config.mean_photons_d(2),
            config.noise.fano_d2,
            t,
            seed,
            base + DARK2,
        )?,
    })
}

/// Detected per-trial counts on both channels.
pub struct DetectedCounts {
    pub detected1: Vec<f64>,
    pub detected2: Vec<f64>,
}

/// Thin the pre-loss samples through the channel model and add dark counts.
/// `point` selects the thinning substreams so sweep points stay independent.
pub fn detect(config: &SimulationConfig, pre: &PreSamples, point: u64) -> Result<DetectedCounts> {
    use streams::*;
    let base = point * STREAM_SPAN;
    let seed = config.seed;
    let m = config.thinning;
    let s1 = thin_counts(&pre.source, config.noise.eta1, seed, base + THIN1, m)?;
    let s2 = thin_counts(&pre.source, config.noise.eta2, seed, base + THIN2, m)?;
    let r1 = thin_counts(&pre.rho1, config.noise.eta1, seed, base + THIN_RHO1, m)?;
    let r2 = thin_counts(&pre.rho2, config.noise.eta2, seed, base + THIN_RHO2, m)?;
    let detected1 = (0..config.trials)
        .map(|t| (s1[t] + r1[t] + pre.dark1[t]) as f64)
        .collect();
    let detected2 = (0..config.trials)
        .map(|t| (s2[t] + r2[t] + pre.dark2[t]) as f64)
        .collect();
    Ok(DetectedCounts {
        detected1,
        detected2,
    })
}

/// Full per-run statistics with uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NrfSimResult {
    pub nrf: StatEstimate,
    pub fano1: StatEstimate,
    pub fano2: StatEstimate,
    pub covariance: StatEstimate,
    pub mean1: StatEstimate,
    pub mean2: StatEstimate,
}

fn nrf_point_estimate(detected1: &[f64], detected2: &[f64]) -> f64 {
    let diff: Vec<f64> = detected1
        .iter()
        .zip(detected2)
        .map(|(&a, &b)| a - b)
        .collect();
    let sum: Vec<f64> = detected1
        .iter()
        .zip(detected2)
        .map(|(&a, &b)| a + b)
        .collect();
    stats::sample_variance(&diff) / stats::mean(&sum)
}

fn nrf_estimate(
    detected1: &[f64],
    detected2: &[f64],
    error_method: ErrorMethod,
    seed: u64,
    point: u64,
) -> StatEstimate {
    let diff: Vec<f64> = detected1
        .iter()
        .zip(detected2)
        .map(|(&a, &b)| a - b)
        .collect();
    let sum: Vec<f64> = detected1
        .iter()
        .zip(detected2)
        .map(|(&a, &b)| a + b)
        .collect();
    let value = stats::sample_variance(&diff) / stats::mean(&sum);
    let std_error = match error_method {
        ErrorMethod::DeltaMethod => stats::variance_over_mean_se(&diff, &sum),
        ErrorMethod::Bootstrap { resamples } => {
            let t = detected1.len();
            let estimates: Vec<f64> = (0..resamples as u64)
                .into_par_iter()
                .map(|b| {
                    let mut rng = trial_rng(
                        seed,
                        point * streams::STREAM_SPAN + streams::BOOTSTRAP,
                        b,
                    );
                    let mut d1 = Vec::with_capacity(t);
                    let mut d2 = Vec::with_capacity(t);
                    for _ in 0..t {
                        let i = rng.random_range(0..t);
                        d1.push(detected1[i]);
                        d2.push(detected2[i]);
                    }
                    nrf_point_estimate(&d1, &d2)
                })
                .collect();
            stats::sample_variance(&estimates).sqrt()
        }
    };
    StatEstimate { value, std_error }
}

fn summarize(
    config: &SimulationConfig,
    counts: &DetectedCounts,
    point: u64,
) -> NrfSimResult {
    let d1 = &counts.detected1;
    let d2 = &counts.detected2;
    let fano = |v: &[f64]| StatEstimate {
        value: stats::sample_variance(v) / stats::mean(v),
        std_error: stats::variance_over_mean_se(v, v),
    };
    NrfSimResult {
        nrf: nrf_estimate(d1, d2, config.error_method, config.seed, point),
        fano1: fano(d1),
        fano2: fano(d2),
        covariance: StatEstimate {
            value: stats::sample_covariance(d1, d2),
            std_error: stats::covariance_std_error(d1, d2),
        },
        mean1: StatEstimate {
            value: stats::mean(d1),
            std_error: stats::mean_std_error(d1),
        },
        mean2: StatEstimate {
            value: stats::mean(d2),
            std_error: stats::mean_std_error(d2),
        },
    }
}

/// Run one full simulation at the configured channel efficiencies.
pub fn run_nrf_simulation(config: &SimulationConfig) -> Result<NrfSimResult> {
    config.validate()?;
    let pre = presample(config, 0)?;
    let counts = detect(config, &pre, 0)?;
    Ok(summarize(config, &counts, 0))
}

/// Sweep the simulated NRF over an eta2 grid.
///
/// With `reuse_source_samples` the pre-loss lists are fixed before the loop;
/// otherwise each point draws fresh source and noise samples.
pub fn sweep_eta2(
    config: &SimulationConfig,
    eta2_grid: &[f64],
) -> Result<Vec<(f64, StatEstimate)>> {
    config.validate()?;
    for &eta2 in eta2_grid {
        if !(0.0..=1.0).contains(&eta2) {
            return Err(ModelError::Config(format!(
                "eta2 grid value {eta2} outside [0,1]"
            )));
        }
    }
    let shared = if config.reuse_source_samples {
        Some(presample(config, 0)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(eta2_grid.len());
    for (i, &eta2) in eta2_grid.iter().enumerate() {
        let point = i as u64;
        let cfg = SimulationConfig {
            noise: config.noise.with_eta2(eta2),
            ..*config
        };
        let result = match &shared {
            Some(pre) => {
                let counts = detect(&cfg, pre, point)?;
                summarize(&cfg, &counts, point)
            }
            None => {
                let pre = presample(&cfg, point)?;
                let counts = detect(&cfg, &pre, point)?;
                summarize(&cfg, &counts, point)
            }
        };
        out.push((eta2, result.nrf));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise_model::{nrf_full, nrf_noiseless};

    fn base_config(trials: usize, fano: f64, noise: ChannelNoiseModel) -> SimulationConfig {
        SimulationConfig {
            trials,
            source: TwinBeamSource::new(1e4, fano).unwrap(),
            noise,
            seed: 42,
            thinning: ThinningMethod::default(),
            error_method: ErrorMethod::default(),
            reuse_source_samples: true,
        }
    }

    #[test]
    fn zero_mean_samples_are_zero() {
        let v = sample_source_counts(0.0, 1.0, 100, 1, 0).unwrap();
        assert!(v.iter().all(|&x| x == 0));
    }

    #[test]
    fn sample_fano_tracks_target() {
        for (fano, tol) in [(1.0, 0.02), (4.0, 0.08)] {
            let v = sample_source_counts(1e4, fano, 100_000, 7, 0).unwrap();
            let v: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            let f = stats::sample_variance(&v) / stats::mean(&v);
            assert!(
                (f - fano).abs() < tol,
                "sample fano {f} not within {tol} of {fano}"
            );
        }
    }

    #[test]
    fn thinning_endpoints_are_exact() {
        let pre: Vec<u64> = (0..1000).collect();
        let kept = thin_counts(&pre, 1.0, 3, 5, ThinningMethod::Binomial).unwrap();
        assert_eq!(kept, pre);
        let none = thin_counts(&pre, 0.0, 3, 5, ThinningMethod::Binomial).unwrap();
        assert!(none.iter().all(|&x| x == 0));
        assert!(thin_counts(&pre, 1.5, 3, 5, ThinningMethod::Binomial).is_err());
    }

    #[test]
    fn thinning_matches_binomial_moments() {
        let pre = vec![1000u64; 100_000];
        for method in [ThinningMethod::Binomial, ThinningMethod::PerPhotonBernoulli] {
            let kept = thin_counts(&pre, 0.5, 11, 5, method).unwrap();
            let kept: Vec<f64> = kept.iter().map(|&x| x as f64).collect();
            let m = stats::mean(&kept);
            let v = stats::sample_variance(&kept);
            let se_mean = (250.0f64 / 100_000.0).sqrt();
            assert!((m - 500.0).abs() < 3.0 * se_mean, "mean {m}");
            assert!((v - 250.0).abs() / 250.0 < 0.03, "variance {v}");
        }
    }

    #[test]
    fn detected_counts_never_exceed_inputs() {
        let cfg = base_config(
            1000,
            4.0,
            ChannelNoiseModel::paper_simple(0.75, 0.6, 0.45, 1.2, 0.01, 3.0).unwrap(),
        );
        let pre = presample(&cfg, 0).unwrap();
        let counts = detect(&cfg, &pre, 0).unwrap();
        for t in 0..cfg.trials {
            let cap1 = (pre.source[t] + pre.rho1[t] + pre.dark1[t]) as f64;
            let cap2 = (pre.source[t] + pre.rho2[t] + pre.dark2[t]) as f64;
            assert!(counts.detected1[t] <= cap1);
            assert!(counts.detected2[t] <= cap2);
        }
    }

    #[test]
    fn noiseless_balanced_nrf_matches_analytic() {
        let cfg = base_config(
            100_000,
            1.0,
            ChannelNoiseModel::noiseless(0.75, 0.75).unwrap(),
        );
        let r = run_nrf_simulation(&cfg).unwrap();
        assert!(
            (r.nrf.value - 0.25).abs() < 3.0 * r.nrf.std_error,
            "nrf {} +- {}",
            r.nrf.value,
            r.nrf.std_error
        );
    }

    #[test]
    fn detector_noise_only_channel() {
        // eta1 = eta2 = 0 with Poissonian dark counts: NRF = F_d = 1
        let noise =
            ChannelNoiseModel::new(0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.05, 0.05, 1.0, 1.0).unwrap();
        let cfg = base_config(100_000, 1.0, noise);
        let r = run_nrf_simulation(&cfg).unwrap();
        assert!((r.nrf.value - 1.0).abs() < 3.0 * r.nrf.std_error);
    }

    #[test]
    fn mean_preservation_with_noise() {
        let noise =
            ChannelNoiseModel::paper_simple(0.75, 0.6, 0.45, 1.2, 0.01, 3.0).unwrap();
        let cfg = base_config(100_000, 4.0, noise);
        let r = run_nrf_simulation(&cfg).unwrap();
        let n = cfg.source.mean_photons;
        let expect1 = cfg.noise.eta1 * n * (1.0 + cfg.noise.rho1) + cfg.noise.d1 * n;
        let expect2 = cfg.noise.eta2 * n * (1.0 + cfg.noise.rho2) + cfg.noise.d2 * n;
        assert!((r.mean1.value - expect1).abs() < 3.0 * r.mean1.std_error);
        assert!((r.mean2.value - expect2).abs() < 3.0 * r.mean2.std_error);
    }

    #[test]
    fn covariance_and_fano_laws() {
        let cfg = base_config(
            100_000,
            4.0,
            ChannelNoiseModel::noiseless(0.75, 0.5).unwrap(),
        );
        let r = run_nrf_simulation(&cfg).unwrap();
        let n = cfg.source.mean_photons;
        let cov_expect = 0.75 * 0.5 * (n + 3.0 * n); // eta1 eta2 (N + beta N^2)
        assert!(
            (r.covariance.value - cov_expect).abs() < 3.0 * r.covariance.std_error,
            "cov {} +- {} vs {cov_expect}",
            r.covariance.value,
            r.covariance.std_error
        );
        let f1_expect = 1.0 + 0.75 * 3.0;
        let f2_expect = 1.0 + 0.5 * 3.0;
        assert!((r.fano1.value - f1_expect).abs() < 3.0 * r.fano1.std_error);
        assert!((r.fano2.value - f2_expect).abs() < 3.0 * r.fano2.std_error);
    }

    #[test]
    fn full_model_nrf_matches_analytic() {
        let noise =
            ChannelNoiseModel::paper_simple(0.75, 0.6, 0.45, 1.2, 0.01, 3.0).unwrap();
        let cfg = base_config(100_000, 4.0, noise);
        let r = run_nrf_simulation(&cfg).unwrap();
        let analytic = nrf_full(&cfg.source, &cfg.noise).unwrap().total;
        assert!(
            (r.nrf.value - analytic).abs() < 3.0 * r.nrf.std_error,
            "mc {} +- {} vs analytic {analytic}",
            r.nrf.value,
            r.nrf.std_error
        );
    }

    #[test]
    fn sweep_endpoints() {
        let cfg = base_config(
            50_000,
            1.0,
            ChannelNoiseModel::noiseless(1.0, 1.0).unwrap(),
        );
        let sweep = sweep_eta2(&cfg, &[0.0, 1.0]).unwrap();
        assert!((sweep[0].1.value - 1.0).abs() < 3.0 * sweep[0].1.std_error);
        // eta2 = 1 reproduces the shared counts exactly: zero difference
        assert!(sweep[1].1.value.abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_analytic_curve() {
        let cfg = base_config(
            50_000,
            4.0,
            ChannelNoiseModel::noiseless(0.75, 0.0).unwrap(),
        );
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let sweep = sweep_eta2(&cfg, &grid).unwrap();
        for (eta2, est) in sweep {
            let analytic = nrf_noiseless(&cfg.source, 0.75, eta2).unwrap().total;
            assert!(
                (est.value - analytic).abs() < 3.0 * est.std_error,
                "eta2={eta2}: mc {} +- {} vs {analytic}",
                est.value,
                est.std_error
            );
        }
    }

    #[test]
    fn identical_seeds_are_bitwise_identical() {
        let cfg = base_config(
            5_000,
            4.0,
            ChannelNoiseModel::paper_simple(0.75, 0.6, 0.45, 1.2, 0.01, 3.0).unwrap(),
        );
        let a = run_nrf_simulation(&cfg).unwrap();
        let b = run_nrf_simulation(&cfg).unwrap();
        assert_eq!(a.nrf.value.to_bits(), b.nrf.value.to_bits());
        assert_eq!(a.nrf.std_error.to_bits(), b.nrf.std_error.to_bits());
    }

    #[test]
    fn bootstrap_agrees_with_delta_method() {
        let mut cfg = base_config(
            20_000,
            4.0,
            ChannelNoiseModel::noiseless(0.75, 0.6).unwrap(),
        );
        let delta = run_nrf_simulation(&cfg).unwrap();
        cfg.error_method = ErrorMethod::Bootstrap { resamples: 200 };
        let boot = run_nrf_simulation(&cfg).unwrap();
        assert_eq!(delta.nrf.value, boot.nrf.value);
        let ratio = boot.nrf.std_error / delta.nrf.std_error;
        assert!(
            (0.7..1.4).contains(&ratio),
            "bootstrap/delta SE ratio {ratio}"
        );
    }

    #[test]
    fn trials_below_two_rejected() {
        let mut cfg = base_config(
            10,
            1.0,
            ChannelNoiseModel::noiseless(0.5, 0.5).unwrap(),
        );
        cfg.trials = 1;
        assert!(run_nrf_simulation(&cfg).is_err());
    }

    #[test]
    fn validity_warning_fires_for_small_means() {
        let mut cfg = base_config(
            10,
            1.0,
            ChannelNoiseModel::noiseless(0.5, 0.5).unwrap(),
        );
        assert!(cfg.gaussian_validity_warning().is_none());
        cfg.source = TwinBeamSource::new(50.0, 1.0).unwrap();
        assert!(cfg.gaussian_validity_warning().is_some());
    }
}
