//! Analytic beam statistics and the noise reduction factor (NRF).
//!
//! The NRF of two beams is Var(N1 - N2) / Mean(N1 + N2). For twin beams it
//! decomposes into four additive components: a Poissonian term, a
//! super-Poissonian term driven by efficiency mismatch, and two noise terms
//! from uncorrelated optical and detector noise.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Lossless correlated-pair statistics: mean photon number per acquisition
/// window and the pre-loss Fano factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinBeamSource {
    pub mean_photons: f64,
    pub fano: f64,
}

impl TwinBeamSource {
    pub fn new(mean_photons: f64, fano: f64) -> Result<Self> {
        let s = Self { mean_photons, fano };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_photons >= 0.0) || !self.mean_photons.is_finite() {
            return Err(ModelError::Domain(format!(
                "mean_photons must be finite and >= 0, got {}",
                self.mean_photons
            )));
        }
        if !(self.fano >= 1.0) || !self.fano.is_finite() {
            return Err(ModelError::Domain(format!(
                "source fano must be finite and >= 1 (sub-Poissonian sources are not representable), got {}",
                self.fano
            )));
        }
        // beta = (F-1)/<N> is undefined for an empty super-Poissonian beam.
        if self.mean_photons == 0.0 && self.fano > 1.0 {
            return Err(ModelError::Domain(
                "mean_photons = 0 with fano > 1 leaves beta undefined".into(),
            ));
        }
        Ok(())
    }

    /// Excess-noise parameter beta = (F - 1) / <N>; zero for an empty
    /// Poissonian source.
    pub fn beta(&self) -> f64 {
        if self.mean_photons == 0.0 {
            0.0
        } else {
            (self.fano - 1.0) / self.mean_photons
        }
    }
}

/// Per-channel efficiencies and uncorrelated noise parameters.
///
/// Optical-noise means are expressed as fractions `rho_i` of the mean signal,
/// detector-noise means as fractions `d_i` of the lossless mean; each noise
/// source carries its own Fano factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelNoiseModel {
    pub eta1: f64,
    pub eta2: f64,
    #[serde(default)]
    pub rho1: f64,
    #[serde(default)]
    pub rho2: f64,
    #[serde(default = "one")]
    pub fano_rho1: f64,
    #[serde(default = "one")]
    pub fano_rho2: f64,
    #[serde(default)]
    pub d1: f64,
    #[serde(default)]
    pub d2: f64,
    #[serde(default = "one")]
    pub fano_d1: f64,
    #[serde(default = "one")]
    pub fano_d2: f64,
}

fn one() -> f64 {
    1.0
}

impl ChannelNoiseModel {
    /// Both channels lossy but otherwise noise-free.
    pub fn noiseless(eta1: f64, eta2: f64) -> Result<Self> {
        Self::new(eta1, eta2, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    }

    /// The single-channel-optical-noise, balanced-detector-noise
    /// configuration: optical noise only on channel 2, identical dark
    /// counts on both channels.
    pub fn paper_simple(
        eta1: f64,
        eta2: f64,
        rho: f64,
        fano_rho: f64,
        d: f64,
        fano_d: f64,
    ) -> Result<Self> {
        Self::new(eta1, eta2, 0.0, rho, 1.0, fano_rho, d, d, fano_d, fano_d)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        eta1: f64,
        eta2: f64,
        rho1: f64,
        rho2: f64,
        fano_rho1: f64,
        fano_rho2: f64,
        d1: f64,
        d2: f64,
        fano_d1: f64,
        fano_d2: f64,
    ) -> Result<Self> {
        let m = Self {
            eta1,
            eta2,
            rho1,
            rho2,
            fano_rho1,
            fano_rho2,
            d1,
            d2,
            fano_d1,
            fano_d2,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
                return Err(ModelError::Domain(format!(
                    "{name} must lie in [0,1], got {eta}"
                )));
            }
        }
        for (name, frac) in [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("d1", self.d1),
            ("d2", self.d2),
        ] {
            if !(frac >= 0.0) || !frac.is_finite() {
                return Err(ModelError::Domain(format!(
                    "{name} must be finite and >= 0, got {frac}"
                )));
            }
        }
        for (name, fano) in [
            ("fano_rho1", self.fano_rho1),
            ("fano_rho2", self.fano_rho2),
            ("fano_d1", self.fano_d1),
            ("fano_d2", self.fano_d2),
        ] {
            if !(fano >= 1.0) || !fano.is_finite() {
                return Err(ModelError::Domain(format!(
                    "{name} must be finite and >= 1, got {fano}"
                )));
            }
        }
        Ok(())
    }

    /// Replace the channel-2 efficiency (the optimizer's free variable).
    pub fn with_eta2(mut self, eta2: f64) -> Self {
        self.eta2 = eta2;
        self
    }

    /// The intensity-sum denominator (1+rho1)eta1 + (1+rho2)eta2 + d1 + d2,
    /// in units of the lossless mean.
    pub fn sum_denominator(&self) -> f64 {
        (1.0 + self.rho1) * self.eta1 + (1.0 + self.rho2) * self.eta2 + self.d1 + self.d2
    }
}

/// Additive decomposition of the NRF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NrfBreakdown {
    pub sigma_p: f64,
    pub sigma_sp: f64,
    pub sigma_rho: f64,
    pub sigma_d: f64,
    pub total: f64,
}

impl NrfBreakdown {
    fn from_components(sigma_p: f64, sigma_sp: f64, sigma_rho: f64, sigma_d: f64) -> Self {
        Self {
            sigma_p,
            sigma_sp,
            sigma_rho,
            sigma_d,
            total: sigma_p + sigma_sp + sigma_rho + sigma_d,
        }
    }
}

/// Fano factor of a single beam: variance over mean.
pub fn fano_factor(variance: f64, mean: f64) -> Result<f64> {
    if !(mean > 0.0) {
        return Err(ModelError::Domain(format!(
            "fano factor needs mean > 0, got {mean}"
        )));
    }
    if !(variance >= 0.0) {
        return Err(ModelError::Domain(format!(
            "variance must be >= 0, got {variance}"
        )));
    }
    Ok(variance / mean)
}

/// Mean and variance of one beam after loss with survival probability `eta`:
/// mean = eta <N>, variance = eta <N> + eta^2 (F - 1) <N>.
pub fn lossy_beam_moments(source: &TwinBeamSource, eta: f64) -> Result<(f64, f64)> {
    source.validate()?;
    check_eta("eta", eta)?;
    let n = source.mean_photons;
    let mean = eta * n;
    let variance = eta * n + eta * eta * (source.fano - 1.0) * n;
    Ok((mean, variance))
}

/// Covariance of the two detected beams: eta1 eta2 (<N> + beta <N>^2).
pub fn twin_covariance(source: &TwinBeamSource, eta1: f64, eta2: f64) -> Result<f64> {
    source.validate()?;
    check_eta("eta1", eta1)?;
    check_eta("eta2", eta2)?;
    let n = source.mean_photons;
    Ok(eta1 * eta2 * (n + source.beta() * n * n))
}

/// NRF of noiseless lossy twin beams, decomposed into the Poissonian and
/// super-Poissonian components.
pub fn nrf_noiseless(source: &TwinBeamSource, eta1: f64, eta2: f64) -> Result<NrfBreakdown> {
    source.validate()?;
    check_eta("eta1", eta1)?;
    check_eta("eta2", eta2)?;
    let denom = eta1 + eta2;
    if denom <= 0.0 {
        return Err(ModelError::DegenerateDenominator(
            "eta1 = eta2 = 0 leaves the NRF undefined".into(),
        ));
    }
    let sigma_p = 1.0 - 2.0 * eta1 * eta2 / denom;
    let sigma_sp = (eta1 - eta2).powi(2) * (source.fano - 1.0) / denom;
    Ok(NrfBreakdown::from_components(sigma_p, sigma_sp, 0.0, 0.0))
}

/// NRF with uncorrelated optical and detector noise on each channel.
///
/// With rho1 = 0 and identical detector noise on both channels this reduces
/// term-by-term to the single-channel-noise form.
pub fn nrf_full(source: &TwinBeamSource, noise: &ChannelNoiseModel) -> Result<NrfBreakdown> {
    source.validate()?;
    noise.validate()?;
    let denom = noise.sum_denominator();
    if denom <= 0.0 {
        return Err(ModelError::DegenerateDenominator(
            "all channel means vanish; the NRF denominator is zero".into(),
        ));
    }
    let f = source.fano;
    let sigma_p = 1.0 - 2.0 * noise.eta1 * noise.eta2 / denom;
    let sigma_sp = (noise.eta1 - noise.eta2).powi(2) * (f - 1.0) / denom;
    let sigma_rho = (noise.eta1 * noise.eta1 * noise.rho1 * (noise.fano_rho1 - 1.0)
        + noise.eta2 * noise.eta2 * noise.rho2 * (noise.fano_rho2 - 1.0))
        / denom;
    let sigma_d =
        (noise.d1 * (noise.fano_d1 - 1.0) + noise.d2 * (noise.fano_d2 - 1.0)) / denom;
    Ok(NrfBreakdown::from_components(
        sigma_p, sigma_sp, sigma_rho, sigma_d,
    ))
}

fn check_eta(name: &str, eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(ModelError::Domain(format!(
            "{name} must lie in [0,1], got {eta}"
        )));
    }
    Ok(())
}
