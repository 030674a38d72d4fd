//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines appear in order
//! and unbuffered; exits non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ionheat::config::{parse_config, Engine};
use ionheat::{preset, run_scenario, RunOptions};
use ionheat_core::analytic::{self, InitialCondition};
use ionheat_core::mcwf::{ensemble_average, RateModelKind, Scheme, SimConfig};
use ionheat_core::reservoir::{lindblad_validity, markovian_limit, tcl_coefficients, TclCoefficients};
use ionheat_core::{PhysicalParams, HBAR, K_B};

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn options(dir: &Path) -> RunOptions {
    RunOptions {
        out_dir: dir.to_path_buf(),
        workers: ionheat::parallel::resolve_workers(None),
        progress: false,
    }
}

fn reference_params(temperature: f64) -> PhysicalParams {
    PhysicalParams::new(0.1, 1e7, 10.0, temperature).unwrap()
}

/// Preset fig2: saturation of the exact curve and 3-sem agreement of the
/// ensemble on the 50-point grid.
fn thermalization() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let scenario = preset("fig2", false).unwrap();
    let outcome = run_scenario(&scenario, &options(dir.path())).map_err(err)?;
    let p = &scenario.params;
    let (_, gamma_inf) = TclCoefficients::new(p).asymptotic();
    let late = analytic::heating_function(50.0 / gamma_inf, scenario.init, p).map_err(err)?;
    let limit = 1.0 / p.hbar_beta_omega0() - 0.5;
    let rel = (late.mean_n / limit - 1.0).abs();
    let frac = outcome.report.summary.fraction_within.ok_or("no mcwf comparison")?;
    let stats = outcome.stats.as_ref().ok_or("no ensemble")?;
    let pass = rel < 1e-3 && frac >= 0.99;
    Ok((
        pass,
        format!(
            "<n>(50/Gamma) = {:.6} vs {limit:.6} (rel {rel:.2e} < 1e-3); {:.1}% of {} points within 3 sem (>= 99%); max dev {:.2} sem; {} trajectories, {} aborted, dim {}",
            late.mean_n,
            100.0 * frac,
            outcome.report.summary.points_compared,
            outcome.report.summary.max_sigma_deviation.unwrap_or(f64::NAN),
            stats.n_traj,
            stats.aborted,
            outcome.dim.unwrap_or(0)
        ),
    ))
}

/// Preset fig1 exact curve versus `C t²`, memoryless law versus `t`.
fn short_time_law() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut scenario = preset("fig1", false).unwrap();
    scenario.engines = vec![Engine::Analytic, Engine::Markovian];
    scenario.sim.n_traj = 0;
    let outcome = run_scenario(&scenario, &options(dir.path())).map_err(err)?;
    let s = &outcome.report.summary;
    let fit = s.analytic_fit.ok_or("no analytic fit")?;
    let markov = s.markovian_fit.ok_or("no markovian fit")?;
    let c = s.analytic_t2_prefactor.ok_or("no prefactor")?;
    let taylor = outcome.report.reference.taylor_prefactor;
    let c_rel = (c / taylor - 1.0).abs();
    let pass = (fit.exponent - 2.0).abs() <= 0.05 && c_rel < 0.02 && (markov.exponent - 1.0).abs() <= 0.05;
    Ok((
        pass,
        format!(
            "exponent {:.4} (2 +/- 0.05) over {} points; C = {c:.5e} vs {taylor:.5e} (rel {c_rel:.2e} < 2e-2); markovian exponent {:.4} (1 +/- 0.05)",
            fit.exponent, fit.points, markov.exponent
        ),
    ))
}

/// r = 50: exact curve against the memoryless law over `[5/ω_c, 3/Γ]`.
fn markov_recovery() -> Outcome {
    let text = "alpha = 0.1\nomega0 = 1e7\nr = 50\ntemperature_K = 300\nk = 0\nengines = analytic, markovian\n";
    let scenario = parse_config(text, "markov_r50").map_err(err)?;
    let p = &scenario.params;
    let m = markovian_limit(p).map_err(err)?;
    let (t0, t1) = (5.0 / p.omega_c(), 3.0 / m.gamma);
    let n = 2000;
    let mut grid: Vec<f64> = (0..n).map(|i| t0 * (t1 / t0).powf(i as f64 / (n - 1) as f64)).collect();
    grid.extend((1..=200).map(|i| t1 * i as f64 / 200.0));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let curve = analytic::heating_curve(&grid, scenario.init, p, analytic::DEFAULT_DELTA_TOLERANCE).map_err(err)?;
    let mut worst: (f64, f64) = (0.0, 0.0);
    for s in &curve {
        let law = analytic::markovian_heating(s.t, 0, p).map_err(err)?.mean_n;
        let dev = (s.mean_n - law).abs() / m.n_thermal;
        if dev > worst.0 {
            worst = (dev, s.t);
        }
    }
    Ok((
        worst.0 < 0.02,
        format!(
            "max |exact - markovian|/n(w0) = {:.3e} at t = {:.3e} s over {} times in [5/omega_c, 3/Gamma] (< 2e-2)",
            worst.0,
            worst.1,
            curve.len()
        ),
    ))
}

fn lindblad() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for temperature in [300.0, 0.010] {
        let p = reference_params(temperature);
        let rep = lindblad_validity(&p, 20.0 / p.omega_c(), 10_000).map_err(err)?;
        pass &= rep.valid && rep.min_sum >= -1e-18 && rep.min_difference >= -1e-18;
        parts.push(format!(
            "T = {temperature} K: min(D+g) = {:.3e}, min(D-g) = {:.3e}, {}",
            rep.min_sum,
            rep.min_difference,
            if rep.valid { "valid" } else { "violated" }
        ));
    }
    Ok((pass, format!("{} on 10^4 points over [0, 20/omega_c]", parts.join("; "))))
}

/// Dense density-matrix propagation in 12 levels against the exact solution.
fn dense_cross_check() -> Outcome {
    // Temperature at which 1/(ħβω₀) = 3.
    let temperature = 3.0 * HBAR * 1e7 / K_B;
    let p = reference_params(temperature);
    let coeffs = TclCoefficients::new(&p);
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5 / p.omega_c()).collect();
    let dense = common::dense_populations(
        12,
        0,
        |t| {
            let c = coeffs.at(t);
            (c.delta_bar + c.gamma, c.delta_bar - c.gamma)
        },
        &grid,
        400,
    );
    let evolution = analytic::evolution_on_grid(&p, &grid, 1e-12).map_err(err)?;
    let (mut worst_mean, mut worst_tv) = (0.0f64, 0.0f64);
    for (ev, rho) in evolution.iter().zip(&dense) {
        let exact = ev.mean_phonons(0);
        worst_mean = worst_mean.max((common::mean_level(rho) / exact - 1.0).abs());
        let pops = analytic::populations_from(ev, 0, 11, 1e-13).map_err(err)?;
        worst_tv = worst_tv.max(common::total_variation(&pops.probs, rho));
    }
    Ok((
        worst_mean < 1e-6 && worst_tv < 1e-5,
        format!(
            "dim 12, 1/(hbar beta omega0) = 3, t in (0, 10/omega_c]: max rel err of <n> = {worst_mean:.2e} (< 1e-6), max TV = {worst_tv:.2e} (< 1e-5)"
        ),
    ))
}

/// Frozen asymptotic rates at 10 mK against `n(ω₀)(1 − e^{−2Γt})`.
fn constant_rate_ensemble() -> Outcome {
    let p = reference_params(0.010);
    let m = markovian_limit(&p).map_err(err)?;
    let grid: Vec<f64> = (0..21).map(|i| i as f64 * 0.1 / m.gamma).collect();
    let dim = ionheat_core::mcwf::default_dim(m.n_thermal, 1e-6);
    let mut cfg = SimConfig::new(dim, 10_000, ionheat::config::DEFAULT_SEED, grid.clone());
    cfg.rate_model = RateModelKind::FrozenAsymptotic;
    let stats = ensemble_average(InitialCondition::ground(), &cfg, &p).map_err(err)?;
    let mut worst = 0.0f64;
    let mut within = 0;
    for (i, &t) in grid.iter().enumerate() {
        let law = analytic::markovian_heating(t, 0, &p).map_err(err)?.mean_n;
        let dev = ionheat::report::sigma_deviation(law, stats.mean_n[i], stats.sem[i], stats.n_traj);
        worst = worst.max(dev);
        within += usize::from(dev <= 3.0);
    }
    Ok((
        within == grid.len(),
        format!(
            "{} trajectories, t in [0, 2/Gamma]: {within}/{} points within 3 sem, max dev {worst:.2} sem",
            stats.n_traj,
            grid.len()
        ),
    ))
}

fn self_consistency() -> Outcome {
    // Closed-form ∫γ against Simpson quadrature of γ(t).
    let p = reference_params(300.0);
    let wc = p.omega_c();
    let mut worst_tg = 0.0f64;
    let mut worst_int = 0.0f64;
    for x in [0.1, 1.0, 5.0, 20.0] {
        let t = x / wc;
        let integral = common::simpson(|s| tcl_coefficients(s, &p).gamma, 0.0, t, 20_000);
        let tg_quad = (-2.0 * integral).exp();
        let tg = analytic::t_gamma_factor(t, &p);
        worst_tg = worst_tg.max((tg / tg_quad - 1.0).abs());
        let (_, g) = TclCoefficients::new(&p).integrals(t);
        worst_int = worst_int.max((g / integral - 1.0).abs());
    }

    // Δ(t) at two tolerances on both preset grids.
    let mut worst_delta = 0.0f64;
    for name in ["fig1", "fig2"] {
        let s = preset(name, false).unwrap();
        let grid = s.grid.times();
        let fine = analytic::evolution_on_grid(&s.params, &grid, 1e-10).map_err(err)?;
        let coarse = analytic::evolution_on_grid(&s.params, &grid, 1e-6).map_err(err)?;
        for (a, b) in fine.iter().zip(&coarse).skip(1) {
            worst_delta = worst_delta.max((a.big_delta / b.big_delta - 1.0).abs());
        }
    }

    // Stepped ensembles at dp_max and dp_max/2 with common random numbers.
    let mut worst_shift = 0.0f64;
    let fig1 = preset("fig1", false).unwrap();
    let cold = reference_params(0.010);
    let m = markovian_limit(&cold).map_err(err)?;
    let cases = [
        (fig1.params, fig1.grid.times(), 20_000, RateModelKind::TimeDependent, 40),
        (
            cold,
            (0..11).map(|i| i as f64 * 0.01 / m.gamma).collect::<Vec<_>>(),
            1_000,
            RateModelKind::FrozenAsymptotic,
            400,
        ),
    ];
    for (params, grid, n_traj, rates, dim) in cases {
        let mut cfg = SimConfig::new(dim, n_traj, 11, grid);
        cfg.scheme = Scheme::Stepped;
        cfg.rate_model = rates;
        let base = ensemble_average(InitialCondition::ground(), &cfg, &params).map_err(err)?;
        cfg.dt_policy.dp_max /= 2.0;
        let half = ensemble_average(InitialCondition::ground(), &cfg, &params).map_err(err)?;
        for i in 1..base.t.len() {
            let shift = ionheat::report::sigma_deviation(base.mean_n[i], half.mean_n[i], base.sem[i], base.n_traj);
            worst_shift = worst_shift.max(shift);
        }
    }

    let pass = worst_tg < 1e-8 && worst_delta < 1e-6 && worst_shift < 1.0;
    Ok((
        pass,
        format!(
            "T_gamma closed form vs quadrature {worst_tg:.2e} (integral itself {worst_int:.2e}) < 1e-8; Delta tol 1e-10 vs 1e-6 {worst_delta:.2e} < 1e-6; dp_max halving shift {worst_shift:.3} sem < 1"
        ),
    ))
}

/// The binary with two worker counts must emit identical files.
fn reproducibility() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_ionheat");
    let root = tempfile::tempdir().map_err(err)?;
    let mut compared = 0;
    for name in ["fig1", "fig3"] {
        let mut outputs = Vec::new();
        for workers in [1, 3] {
            let dir = root.path().join(format!("{name}_w{workers}"));
            let status = Command::new(exe)
                .args(["run", "--scenario", name, "--quiet", "--workers", &workers.to_string(), "--out"])
                .arg(&dir)
                .status()
                .map_err(err)?;
            if status.code() != Some(0) {
                return Ok((false, format!("{name} with {workers} workers exited with {status}")));
            }
            outputs.push(dir);
        }
        let mut files: Vec<_> = std::fs::read_dir(&outputs[0]).map_err(err)?.map(|e| e.unwrap().file_name()).collect();
        files.sort();
        for f in files {
            let a = std::fs::read(outputs[0].join(&f)).map_err(err)?;
            let b = std::fs::read(outputs[1].join(&f)).map_err(err)?;
            if a != b {
                return Ok((false, format!("{} differs between 1 and 3 workers", f.to_string_lossy())));
            }
            compared += 1;
        }
    }
    Ok((true, format!("fig1 and fig3 with --workers 1 and 3: {compared} files byte-identical")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("thermalization", thermalization),
        ("short-time quadratic law", short_time_law),
        ("markovian limit recovery", markov_recovery),
        ("lindblad validity", lindblad),
        ("dense cross-oracle", dense_cross_check),
        ("constant-rate ensemble", constant_rate_ensemble),
        ("numerical self-consistency", self_consistency),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {} [{}] {name}: {detail} ({:.1} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
