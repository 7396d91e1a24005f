//! Subcommand implementations. Every command validates its inputs before any
//! computation starts, writes a CSV (the contract), and optionally an SVG
//! next to it.

use std::path::{Path, PathBuf};

use twinbeam_core::estimators::{analytic_gamma, run_estimator_bench, AbsorptionExperiment};
use twinbeam_core::fwm::{nrf_vs_pump, PumpScenario};
use twinbeam_core::montecarlo::{ErrorMethod, SimulationConfig, ThinningMethod, sweep_eta2};
use twinbeam_core::noise_model::nrf_full;
use twinbeam_core::optimizer::{
    numeric_min_eta2, optimal_eta2_noiseless, optimal_eta2_noisy, Regime,
};
use twinbeam_core::{ChannelNoiseModel, NrfBreakdown, TwinBeamSource};

use crate::config::{
    EstimatorBenchConfig, GridSpec, ModelSpec, NrfSweepConfig, OptimizeEtaConfig,
    ScenarioSweepConfig, SimulateNrfConfig, SweepAxis,
};
use crate::output::{fmt_f64, Csv, Plot, Series};
use crate::CliError;

fn write_plot(plot: &Plot, csv_path: &Path) {
    let svg_path = csv_path.with_extension("svg");
    match plot.write_svg(&svg_path) {
        Ok(()) => eprintln!("wrote {}", svg_path.display()),
        Err(e) => eprintln!("warning: plot skipped: {e}"),
    }
}

fn model_for(spec: &ModelSpec, eta1: f64) -> Result<ChannelNoiseModel, CliError> {
    ChannelNoiseModel::paper_simple(eta1, 0.0, spec.rho, spec.fano_rho, spec.d, spec.fano_d)
        .map_err(CliError::from)
}

fn sim_config(
    trials: usize,
    source: TwinBeamSource,
    noise: ChannelNoiseModel,
    seed: u64,
) -> SimulationConfig {
    SimulationConfig {
        trials,
        source,
        noise,
        seed,
        thinning: ThinningMethod::Binomial,
        error_method: ErrorMethod::DeltaMethod,
        reuse_source_samples: true,
    }
}

fn breakdown_cells(b: &NrfBreakdown) -> [String; 5] {
    [
        fmt_f64(b.sigma_p),
        fmt_f64(b.sigma_sp),
        fmt_f64(b.sigma_rho),
        fmt_f64(b.sigma_d),
        fmt_f64(b.total),
    ]
}

pub fn nrf_sweep(cfg: &NrfSweepConfig, seed: u64, out: &Path, plot: bool) -> Result<(), CliError> {
    let grid = cfg.eta2_grid.values()?;
    if cfg.models.is_empty() {
        return Err(CliError::Usage("nrf_sweep.models must be nonempty".into()));
    }
    // fail-fast: validate every model before emitting anything
    let mut prepared = Vec::new();
    for spec in &cfg.models {
        let source = TwinBeamSource::new(cfg.mean_photons, spec.fano)?;
        let noise = model_for(spec, cfg.eta1)?;
        prepared.push((spec, source, noise));
    }

    let simulate = cfg.trials.is_some();
    let mut header = vec![
        "eta2",
        "model",
        "sigma_p",
        "sigma_sp",
        "sigma_rho",
        "sigma_d",
        "sigma_total",
    ];
    if simulate {
        header.extend(["mc_sigma", "mc_stderr"]);
    }
    let mut csv = Csv::new(header);
    let mut fig = Plot {
        title: format!("NRF vs eta2 (eta1 = {})", cfg.eta1),
        x_label: "eta2".into(),
        y_label: "sigma".into(),
        log_x: false,
        series: Vec::new(),
        h_lines: vec![1.0],
    };

    for (idx, (spec, source, noise)) in prepared.iter().enumerate() {
        let mc = match cfg.trials {
            Some(trials) => {
                let sim = sim_config(trials, *source, *noise, seed.wrapping_add(idx as u64));
                Some(sweep_eta2(&sim, &grid)?)
            }
            None => None,
        };
        let mut analytic_xy = Vec::with_capacity(grid.len());
        for (j, &eta2) in grid.iter().enumerate() {
            let b = nrf_full(source, &noise.with_eta2(eta2))?;
            analytic_xy.push((eta2, b.total));
            let mut row = vec![fmt_f64(eta2), spec.id.clone()];
            row.extend(breakdown_cells(&b));
            if let Some(mc) = &mc {
                row.push(fmt_f64(mc[j].1.value));
                row.push(fmt_f64(mc[j].1.std_error));
            }
            csv.push(row);
        }
        fig.series.push(Series {
            label: spec.id.clone(),
            xy: analytic_xy,
            points: false,
        });
        if let Some(mc) = &mc {
            fig.series.push(Series {
                label: format!("{} (MC)", spec.id),
                xy: mc.iter().map(|(x, e)| (*x, e.value)).collect(),
                points: true,
            });
        }
    }

    csv.write_to(out)?;
    if plot {
        write_plot(&fig, out);
    }
    Ok(())
}

pub fn optimize_eta(cfg: &OptimizeEtaConfig, out: &Path) -> Result<(), CliError> {
    let closed = if cfg.rho == 0.0 {
        optimal_eta2_noiseless(cfg.eta1, cfg.fano)?
    } else {
        optimal_eta2_noisy(cfg.eta1, cfg.fano, cfg.rho)?
    };
    // numeric oracle over the same model family: optical noise on channel 2
    // with its Fano excess tied to the source excess
    let source = TwinBeamSource::new(1e4, cfg.fano)?;
    let fano_rho = 1.0 + cfg.rho * (cfg.fano - 1.0);
    let template = ChannelNoiseModel::paper_simple(cfg.eta1, 0.0, cfg.rho, fano_rho, 0.0, 1.0)?;
    let numeric = numeric_min_eta2(&source, &template)?;
    let diff = (closed.eta2_opt - numeric.eta2_opt).abs();

    let regime = match closed.regime {
        Regime::SaturatedAtUnity => "saturated_at_unity",
        Regime::Interior => "interior",
    };
    println!("eta1 = {}, F = {}, rho = {}", cfg.eta1, cfg.fano, cfg.rho);
    println!("closed-form eta2_opt  = {:.12}", closed.eta2_opt);
    println!("numeric eta2_opt      = {:.12}", numeric.eta2_opt);
    println!("abs difference        = {diff:.3e}");
    println!("regime                = {regime}");
    println!("fano threshold        = {}", closed.threshold);
    println!("sigma at optimum      = {:.12}", closed.nrf_at_opt);

    let mut csv = Csv::new(vec![
        "eta1",
        "fano",
        "rho",
        "eta2_closed",
        "eta2_numeric",
        "abs_diff",
        "regime",
        "threshold",
        "sigma_closed",
        "sigma_numeric",
    ]);
    csv.push(vec![
        fmt_f64(cfg.eta1),
        fmt_f64(cfg.fano),
        fmt_f64(cfg.rho),
        fmt_f64(closed.eta2_opt),
        fmt_f64(numeric.eta2_opt),
        fmt_f64(diff),
        regime.to_string(),
        fmt_f64(closed.threshold),
        fmt_f64(closed.nrf_at_opt),
        fmt_f64(numeric.nrf_at_opt),
    ]);
    csv.write_to(out)
}

pub fn scenario_sweep(cfg: &ScenarioSweepConfig, out: &Path, plot: bool) -> Result<(), CliError> {
    if cfg.sweep_values.is_empty() {
        return Err(CliError::Usage(
            "scenario_sweep.sweep_values must be nonempty".into(),
        ));
    }
    let p_grid = cfg.pump_grid.values()?;
    // fail-fast: build every scenario variant up front
    let mut variants = Vec::new();
    for &v in &cfg.sweep_values {
        let mut lambdas = cfg.lambdas;
        let mut eta2 = cfg.eta2;
        match cfg.sweep_axis {
            SweepAxis::Lambda6 => lambdas[5] = v,
            SweepAxis::Lambda8 => lambdas[7] = v,
            SweepAxis::Eta2Offset => eta2 = cfg.eta1 + v,
        }
        variants.push((v, PumpScenario::new(lambdas, cfg.w, cfg.eta1, eta2)?));
    }

    let mut csv = Csv::new(vec![
        "sweep_value",
        "p",
        "sigma_p",
        "sigma_sp",
        "sigma_rho",
        "sigma_d",
        "sigma_total",
    ]);
    let mut fig = Plot {
        title: format!("NRF vs pump power, sweeping {}", cfg.sweep_axis.as_str()),
        x_label: "pump power p".into(),
        y_label: "sigma".into(),
        log_x: cfg.pump_grid.scale == twinbeam_core::fwm::GridScale::Log,
        series: Vec::new(),
        h_lines: vec![1.0],
    };
    for (v, scenario) in &variants {
        let curve = nrf_vs_pump(&p_grid, scenario)?;
        for (p, b) in &curve {
            let mut row = vec![fmt_f64(*v), fmt_f64(*p)];
            row.extend(breakdown_cells(b));
            csv.push(row);
        }
        fig.series.push(Series {
            label: format!("{} = {v}", cfg.sweep_axis.as_str()),
            xy: curve.iter().map(|(p, b)| (*p, b.total)).collect(),
            points: false,
        });
    }
    csv.write_to(out)?;
    if plot {
        write_plot(&fig, out);
    }
    Ok(())
}

pub fn simulate_nrf(cfg: &SimulateNrfConfig, seed: u64, out: &Path) -> Result<(), CliError> {
    let grid = cfg.eta2_grid.values()?;
    let source = TwinBeamSource::new(cfg.mean_photons, cfg.fano)?;
    let noise =
        ChannelNoiseModel::paper_simple(cfg.eta1, 0.0, cfg.rho, cfg.fano_rho, cfg.d, cfg.fano_d)?;
    let sim = sim_config(cfg.trials, source, noise, seed);
    sim.validate()?;
    if let Some(warning) = sim.gaussian_validity_warning() {
        eprintln!("warning: {warning}");
    }
    let results = sweep_eta2(&sim, &grid)?;

    let mut csv = Csv::new(vec!["eta2", "mc_sigma", "mc_stderr", "analytic_sigma"]);
    for (eta2, est) in &results {
        let analytic = nrf_full(&source, &noise.with_eta2(*eta2))?.total;
        csv.push(vec![
            fmt_f64(*eta2),
            fmt_f64(est.value),
            fmt_f64(est.std_error),
            fmt_f64(analytic),
        ]);
    }
    csv.write_to(out)
}

pub fn estimator_bench(
    cfg: &EstimatorBenchConfig,
    seed: u64,
    out: &Path,
    plot: bool,
) -> Result<(), CliError> {
    if cfg.alpha_values.is_empty() || cfg.sigma_star_values.is_empty() {
        return Err(CliError::Usage(
            "estimator_bench needs nonempty alpha_values and sigma_star_values".into(),
        ));
    }
    let source = TwinBeamSource::new(cfg.mean_photons, cfg.fano)?;
    // fail-fast: validate the whole grid before running any batch
    let mut points = Vec::new();
    for &alpha in &cfg.alpha_values {
        for &sigma_star in &cfg.sigma_star_values {
            let eta = 1.0 - sigma_star;
            let exp = AbsorptionExperiment {
                alpha,
                epsilon: cfg.epsilon,
                calibration_trials: cfg.calibration_trials,
                measurement_trials: cfg.measurement_trials,
                source,
                noise: ChannelNoiseModel::noiseless(eta, eta)?,
                seed: seed.wrapping_add(points.len() as u64),
            };
            exp.validate()?;
            points.push((alpha, sigma_star, exp));
        }
    }

    let mut csv = Csv::new(vec![
        "estimator",
        "alpha",
        "sigma_star",
        "epsilon",
        "mean",
        "bias",
        "variance",
        "mse",
        "gamma_empirical",
        "gamma_analytic",
    ]);
    let mut curves: Vec<Series> = Vec::new();
    for (alpha, sigma_star, exp) in &points {
        let reports = run_estimator_bench(exp)?;
        for r in &reports {
            if r.gamma.is_nan() {
                eprintln!(
                    "warning: {} at alpha={alpha}, sigma_star={sigma_star}: \
                     degenerate SNL baseline, gamma reported as NaN",
                    r.estimator.as_str()
                );
            }
            csv.push(vec![
                r.estimator.as_str().to_string(),
                fmt_f64(*alpha),
                fmt_f64(*sigma_star),
                fmt_f64(cfg.epsilon),
                fmt_f64(r.mean),
                fmt_f64(r.bias),
                fmt_f64(r.variance),
                fmt_f64(r.mse),
                fmt_f64(r.gamma),
                fmt_f64(analytic_gamma(r.estimator, *alpha, *sigma_star)),
            ]);
            // plot gamma vs sigma_star at the first alpha only
            if *alpha == cfg.alpha_values[0] {
                let label = r.estimator.as_str().to_string();
                match curves.iter_mut().find(|s| s.label == label) {
                    Some(s) => s.xy.push((*sigma_star, r.gamma)),
                    None => curves.push(Series {
                        label,
                        xy: vec![(*sigma_star, r.gamma)],
                        points: false,
                    }),
                }
            }
        }
    }
    csv.write_to(out)?;
    if plot {
        let fig = Plot {
            title: format!(
                "MSE relative to shot-noise limit (alpha = {})",
                cfg.alpha_values[0]
            ),
            x_label: "sigma* = 1 - eta".into(),
            y_label: "Gamma".into(),
            log_x: false,
            series: curves,
            h_lines: vec![1.0],
        };
        write_plot(&fig, out);
    }
    Ok(())
}

/// Regenerates the bundled figure data files from built-in configs.
pub fn figures(seed: u64, out_dir: &Path, plot: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = |name: &str| -> PathBuf { out_dir.join(name) };

    // fig1: noiseless NRF curves, eta1 = 0.7, F = 1..10
    let fig1 = NrfSweepConfig {
        eta1: 0.7,
        eta2_grid: GridSpec::parse("0:1:201")?,
        models: (1..=10)
            .map(|f| ModelSpec {
                id: format!("F{f}"),
                fano: f as f64,
                rho: 0.0,
                fano_rho: 1.0,
                d: 0.0,
                fano_d: 1.0,
            })
            .collect(),
        mean_photons: 1e4,
        trials: None,
    };
    nrf_sweep(&fig1, seed, &path("fig1.csv"), plot)?;
    eprintln!("wrote {}", path("fig1.csv").display());

    // fig2: the four noise variants with Monte Carlo overlay
    let fig2 = NrfSweepConfig {
        trials: Some(100_000),
        ..NrfSweepConfig::default()
    };
    nrf_sweep(&fig2, seed, &path("fig2.csv"), plot)?;
    eprintln!("wrote {}", path("fig2.csv").display());

    // fig3: pump-power scan over efficiency-offset ladder
    let fig3 = ScenarioSweepConfig::default();
    scenario_sweep(&fig3, &path("fig3.csv"), plot)?;
    eprintln!("wrote {}", path("fig3.csv").display());

    // fig4: estimator efficiency surfaces on the (alpha, sigma*) grid
    let fig4 = EstimatorBenchConfig::default();
    estimator_bench(&fig4, seed, &path("fig4.csv"), plot)?;
    eprintln!("wrote {}", path("fig4.csv").display());
    Ok(())
}
