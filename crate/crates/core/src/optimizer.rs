//! Channel-efficiency balance minimizing the NRF.
//!
//! Closed forms exist for the noiseless case and for optical noise with
//! negligible detector noise; the general case is served by a deterministic
//! coarse-grid + golden-section minimizer over eta2 in [0,1], which also
//! acts as an independent oracle for the closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::noise_model::{nrf_full, ChannelNoiseModel, TwinBeamSource};

/// Whether the optimum saturates at eta2 = 1 or sits strictly inside (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SaturatedAtUnity,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    pub eta2_opt: f64,
    pub regime: Regime,
    /// Fano threshold below which the optimum saturates at unity; +inf when
    /// the threshold denominator vanishes.
    pub threshold: f64,
    pub nrf_at_opt: f64,
}

const THRESHOLD_DENOM_EPS: f64 = 1e-12;

/// Fano threshold F' separating saturated from interior optima in the
/// noiseless model: (eta1^2 - 2 eta1 - 1)/(3 eta1^2 - 2 eta1 - 1).
pub fn fano_threshold_noiseless(eta1: f64) -> f64 {
    let num = eta1 * eta1 - 2.0 * eta1 - 1.0;
    let den = 3.0 * eta1 * eta1 - 2.0 * eta1 - 1.0;
    if den.abs() < THRESHOLD_DENOM_EPS {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Fano threshold F'' for the optical-noise model with negligible detector
/// noise.
pub fn fano_threshold_noisy(eta1: f64, rho: f64) -> f64 {
    let bracket = eta1 * eta1 * (rho + 3.0)
        - (2.0 * eta1 + rho + 1.0) * (1.0 + rho * rho);
    if bracket.abs() < THRESHOLD_DENOM_EPS {
        f64::INFINITY
    } else {
        1.0 - 2.0 * eta1 * eta1 / bracket
    }
}

/// Closed-form eta2 minimizing the noiseless NRF: unity for F <= F', else
/// eta1 (sqrt(4 + 2/(F-1)) - 1), clamped to [0,1].
pub fn optimal_eta2_noiseless(eta1: f64, fano: f64) -> Result<OptimumReport> {
    check_inputs(eta1, fano)?;
    let threshold = fano_threshold_noiseless(eta1);
    let source = TwinBeamSource::new(1.0, fano)?;
    let report = |eta2: f64, regime: Regime| -> Result<OptimumReport> {
        let noise = ChannelNoiseModel::noiseless(eta1, eta2)?;
        Ok(OptimumReport {
            eta2_opt: eta2,
            regime,
            threshold,
            nrf_at_opt: nrf_full(&source, &noise)?.total,
        })
    };
    if fano <= threshold {
        return report(1.0, Regime::SaturatedAtUnity);
    }
    let raw = eta1 * ((4.0 + 2.0 / (fano - 1.0)).sqrt() - 1.0);
    let eta2 = raw.clamp(0.0, 1.0);
    let regime = if eta2 >= 1.0 {
        Regime::SaturatedAtUnity
    } else {
        Regime::Interior
    };
    report(eta2, regime)
}

/// Closed-form eta2 under optical noise with d = 0, assuming the
/// optical-noise Fano is tied to the source as F_rho - 1 = rho (F - 1).
pub fn optimal_eta2_noisy(eta1: f64, fano: f64, rho: f64) -> Result<OptimumReport> {
    check_inputs(eta1, fano)?;
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(ModelError::Domain(format!(
            "rho must be finite and >= 0, got {rho}"
        )));
    }
    let threshold = fano_threshold_noisy(eta1, rho);
    let source = TwinBeamSource::new(1.0, fano)?;
    let fano_rho = 1.0 + rho * (fano - 1.0);
    let noise_at = |eta2: f64| -> Result<ChannelNoiseModel> {
        ChannelNoiseModel::paper_simple(eta1, eta2, rho, fano_rho, 0.0, 1.0)
    };
    let report = |eta2: f64, regime: Regime| -> Result<OptimumReport> {
        Ok(OptimumReport {
            eta2_opt: eta2,
            regime,
            threshold,
            nrf_at_opt: nrf_full(&source, &noise_at(eta2)?)?.total,
        })
    };
    if !threshold.is_finite() {
        // near-singular threshold: let the numeric minimizer decide the regime
        let numeric = numeric_min_eta2(&source, &noise_at(0.0)?)?;
        let regime = if numeric.eta2_opt >= 1.0 - 1e-9 {
            Regime::SaturatedAtUnity
        } else {
            Regime::Interior
        };
        let eta2 = if regime == Regime::SaturatedAtUnity {
            1.0
        } else {
            numeric.eta2_opt
        };
        return report(eta2, regime);
    }
    if fano <= threshold {
        return report(1.0, Regime::SaturatedAtUnity);
    }
    let inner = 2.0
        + 2.0 * (2.0 * rho * fano + fano - rho) / ((fano - 1.0) * (1.0 + rho * rho));
    let raw = eta1 / (1.0 + rho) * (inner.sqrt() - 1.0);
    let eta2 = raw.clamp(0.0, 1.0);
    let regime = if eta2 >= 1.0 {
        Regime::SaturatedAtUnity
    } else {
        Regime::Interior
    };
    report(eta2, regime)
}

/// Number of cells in the coarse scan that brackets the golden-section stage.
const COARSE_CELLS: usize = 1000;
const GOLDEN_TOL: f64 = 1e-9;

/// Deterministic numeric minimizer of the full-model NRF over eta2 in [0,1].
///
/// A 1e-3 coarse grid locates the global cell (guarding against mode misses),
/// then golden-section search refines the bracket. Flat objectives resolve to
/// the smallest minimizing eta2.
pub fn numeric_min_eta2(
    source: &TwinBeamSource,
    noise_template: &ChannelNoiseModel,
) -> Result<OptimumReport> {
    source.validate()?;
    noise_template.validate()?;
    let f = |eta2: f64| -> f64 {
        let noise = noise_template.with_eta2(eta2);
        match nrf_full(source, &noise) {
            Ok(b) => b.total,
            Err(_) => f64::INFINITY,
        }
    };

    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..=COARSE_CELLS {
        let x = i as f64 / COARSE_CELLS as f64;
        let v = f(x);
        // strict inequality keeps the smallest minimizer on flat objectives
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 {
        0.0
    } else {
        (best_i - 1) as f64 / COARSE_CELLS as f64
    };
    let hi = ((best_i + 1).min(COARSE_CELLS)) as f64 / COARSE_CELLS as f64;
    let eta2 = golden_section_min(&f, lo, hi, GOLDEN_TOL);
    // snap to the boundary when the refinement lands inside tolerance of it
    let eta2 = if eta2 > 1.0 - 1e-7 && f(1.0) <= f(eta2) {
        1.0
    } else if eta2 < 1e-7 && f(0.0) <= f(eta2) {
        0.0
    } else {
        eta2
    };
    let regime = if eta2 >= 1.0 {
        Regime::SaturatedAtUnity
    } else {
        Regime::Interior
    };
    Ok(OptimumReport {
        eta2_opt: eta2,
        regime,
        threshold: f64::NAN,
        nrf_at_opt: f(eta2),
    })
}

/// Golden-section minimization on [a, b] down to bracket width `tol`.
fn golden_section_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn check_inputs(eta1: f64, fano: f64) -> Result<()> {
    if !(eta1 > 0.0 && eta1 <= 1.0) {
        return Err(ModelError::Domain(format!(
            "eta1 must lie in (0,1], got {eta1}"
        )));
    }
    if !(fano >= 1.0) || !fano.is_finite() {
        return Err(ModelError::Domain(format!(
            "fano must be finite and >= 1, got {fano}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_closed_form_examples() {
        let r = optimal_eta2_noiseless(0.7, 10.0).unwrap();
        assert_relative_eq!(r.eta2_opt, 0.7 * ((4.0 + 2.0 / 9.0f64).sqrt() - 1.0));
        assert_relative_eq!(r.eta2_opt, 0.73836, max_relative = 1e-4);
        assert_eq!(r.regime, Regime::Interior);

        // F' ~ 2.054 at eta1 = 0.7, so F = 1.5 saturates
        let r = optimal_eta2_noiseless(0.7, 1.5).unwrap();
        assert_eq!(r.eta2_opt, 1.0);
        assert_eq!(r.regime, Regime::SaturatedAtUnity);
        assert_relative_eq!(r.threshold, 2.0538, max_relative = 1e-4);

        // large-F limit: eta2 -> eta1
        let r = optimal_eta2_noiseless(0.55, 1e6).unwrap();
        assert!((r.eta2_opt - 0.55).abs() < 1e-3);

        assert!(optimal_eta2_noiseless(0.0, 2.0).is_err());
        assert!(optimal_eta2_noiseless(0.7, 0.5).is_err());
    }

    #[test]
    fn noisy_reduces_to_noiseless_at_zero_rho() {
        for (eta1, fano) in [(0.7, 10.0), (0.3, 1.2), (0.9, 3.0), (0.5, 1.0)] {
            let a = optimal_eta2_noiseless(eta1, fano).unwrap();
            let b = optimal_eta2_noisy(eta1, fano, 0.0).unwrap();
            assert_relative_eq!(a.eta2_opt, b.eta2_opt, max_relative = 1e-12);
            assert_relative_eq!(a.threshold, b.threshold, max_relative = 1e-9);
        }
    }

    #[test]
    fn noisy_optimum_matches_grid_search() {
        let eta1 = 0.75;
        let fano = 4.0;
        let rho = 0.45;
        let r = optimal_eta2_noisy(eta1, fano, rho).unwrap();
        // fine-grid oracle over eta2 with the linked optical-noise Fano
        let source = TwinBeamSource::new(1.0, fano).unwrap();
        let fano_rho = 1.0 + rho * (fano - 1.0);
        let mut best = (f64::INFINITY, 0.0);
        let steps = 1_000_000;
        for i in 0..=steps {
            let eta2 = i as f64 / steps as f64;
            let noise =
                ChannelNoiseModel::paper_simple(eta1, eta2, rho, fano_rho, 0.0, 1.0).unwrap();
            let v = nrf_full(&source, &noise).unwrap().total;
            if v < best.0 {
                best = (v, eta2);
            }
        }
        assert!((r.eta2_opt - best.1).abs() <= 1e-4);
    }

    #[test]
    fn heavy_optical_noise_drives_eta2_to_zero() {
        let r = optimal_eta2_noisy(0.75, 4.0, 1e4).unwrap();
        assert!(r.eta2_opt < 1e-2);
    }

    #[test]
    fn eta2_shrinks_monotonically_on_rho_ladder() {
        let mut prev = f64::INFINITY;
        let mut rho = 1.0;
        for _ in 0..10 {
            let r = optimal_eta2_noisy(0.8, 5.0, rho).unwrap();
            assert!(r.eta2_opt <= prev + 1e-12);
            prev = r.eta2_opt;
            rho *= 2.0;
        }
    }

    #[test]
    fn numeric_matches_closed_form() {
        let source = TwinBeamSource::new(1.0, 4.0).unwrap();
        let noise = ChannelNoiseModel::noiseless(0.7, 0.5).unwrap();
        let numeric = numeric_min_eta2(&source, &noise).unwrap();
        let closed = optimal_eta2_noiseless(0.7, 4.0).unwrap();
        assert!((numeric.eta2_opt - closed.eta2_opt).abs() < 1e-6);
        assert_relative_eq!(
            numeric.nrf_at_opt,
            closed.nrf_at_opt,
            max_relative = 1e-9
        );
    }

    #[test]
    fn numeric_saturates_for_poissonian_beams() {
        let source = TwinBeamSource::new(1.0, 1.0).unwrap();
        let noise = ChannelNoiseModel::noiseless(0.75, 0.5).unwrap();
        let r = numeric_min_eta2(&source, &noise).unwrap();
        assert_eq!(r.eta2_opt, 1.0);
        assert_eq!(r.regime, Regime::SaturatedAtUnity);
    }

    #[test]
    fn numeric_handles_general_detector_noise() {
        // no closed form with d > 0; interior minimum per the full model
        let source = TwinBeamSource::new(1.0, 4.0).unwrap();
        let noise =
            ChannelNoiseModel::paper_simple(0.75, 0.5, 0.45, 1.2, 0.01, 3.0).unwrap();
        let r = numeric_min_eta2(&source, &noise).unwrap();
        assert_eq!(r.regime, Regime::Interior);
        // optimum must beat a coarse scan everywhere
        for i in 0..=100 {
            let eta2 = i as f64 / 100.0;
            let v = nrf_full(&source, &noise.with_eta2(eta2)).unwrap().total;
            assert!(r.nrf_at_opt <= v + 1e-12);
        }
    }

    #[test]
    fn unity_eta1_singularity() {
        assert!(fano_threshold_noiseless(1.0).is_infinite());
        for fano in [1.0, 2.0, 10.0, 100.0] {
            let r = optimal_eta2_noiseless(1.0, fano).unwrap();
            assert_eq!(r.eta2_opt, 1.0);
            let source = TwinBeamSource::new(1.0, fano).unwrap();
            let noise = ChannelNoiseModel::noiseless(1.0, 0.5).unwrap();
            let numeric = numeric_min_eta2(&source, &noise).unwrap();
            assert_eq!(numeric.eta2_opt, 1.0);
        }
    }

    #[test]
    fn threshold_consistency_near_f_prime() {
        let eta1 = 0.7;
        let fp = fano_threshold_noiseless(eta1);
        let source_below = TwinBeamSource::new(1.0, fp - 1e-3).unwrap();
        let noise = ChannelNoiseModel::noiseless(eta1, 0.5).unwrap();
        let below = numeric_min_eta2(&source_below, &noise).unwrap();
        assert!(below.eta2_opt >= 1.0 - 1e-3);

        let source_above = TwinBeamSource::new(1.0, fp + 1e-2).unwrap();
        let above = numeric_min_eta2(&source_above, &noise).unwrap();
        assert!(above.eta2_opt < 1.0);
    }
}
