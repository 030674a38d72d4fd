//! Scenario execution and artifact output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ionheat_core::analytic::{self, MARKOV_REFERENCE_FORMULA};
use ionheat_core::mcwf::{self, DtPolicy, EnsembleStats, RateModelKind, Scheme, SimConfig, Simulation};
use ionheat_core::reservoir::markovian_limit;
use ionheat_core::{HBAR, K_B};
use thiserror::Error;

use crate::config::{Engine, Scenario, Spacing};
use crate::csv_io::{self, SeriesRow};
use crate::report::{ComparisonReport, ComparisonRow, Reference};
use crate::{parallel, BUILD_ID};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{engine} engine: {source}")]
    Engine {
        engine: &'static str,
        #[source]
        source: ionheat_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub const EXIT_CODE: i32 = 2;
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub workers: usize,
    pub progress: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ComparisonReport,
    pub stats: Option<EnsembleStats>,
    pub dim: Option<usize>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    /// 0 on success, 1 when the ensemble failed the agreement check.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }
}

fn engine_error(engine: Engine) -> impl Fn(ionheat_core::Error) -> RunError {
    move |source| RunError::Engine {
        engine: engine.as_str(),
        source,
    }
}

/// Runs every selected engine on the scenario grid, then writes
/// `<name>_<engine>.csv`, `<name>_combined.csv` and `<name>_report.txt`.
///
/// All numerics finish before the first file is written; if writing fails,
/// the files already written by this call are removed.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    scenario.validate()?;
    let grid = scenario.grid.times();
    let params = &scenario.params;
    let k = scenario.init.k();

    let analytic = if scenario.has(Engine::Analytic) {
        let curve = analytic::heating_curve(&grid, scenario.init, params, analytic::DEFAULT_DELTA_TOLERANCE)
            .map_err(engine_error(Engine::Analytic))?;
        Some(curve.into_iter().map(|s| s.mean_n).collect::<Vec<_>>())
    } else {
        None
    };

    let markov = markovian_limit(params).map_err(engine_error(Engine::Markovian))?;
    let markovian = if scenario.has(Engine::Markovian) {
        let values = grid
            .iter()
            .map(|&t| analytic::markovian_heating(t, k, params).map(|s| s.mean_n))
            .collect::<Result<Vec<_>, _>>()
            .map_err(engine_error(Engine::Markovian))?;
        Some(values)
    } else {
        None
    };

    let mut dim = None;
    let stats = if scenario.has(Engine::Mcwf) {
        let sim_err = engine_error(Engine::Mcwf);
        let d = match scenario.sim.dim {
            Some(d) => d,
            None => mcwf::default_dim_for(scenario.init, params, &grid, scenario.sim.leak_tol).map_err(&sim_err)?,
        };
        dim = Some(d);
        let mut config = SimConfig::new(d, scenario.sim.n_traj, scenario.sim.seed, grid.clone());
        config.dt_policy = DtPolicy {
            dp_max: scenario.sim.dp_max,
            ..DtPolicy::default()
        };
        config.leak_tol = scenario.sim.leak_tol;
        config.scheme = scenario.sim.scheme;
        config.rate_model = scenario.sim.rate_model;
        let sim = Simulation::new(scenario.init, config, params).map_err(&sim_err)?;
        log::info!(
            "{}: {} trajectories, dim {d}, {} workers",
            scenario.name,
            scenario.sim.n_traj,
            opts.workers
        );
        Some(parallel::ensemble(&sim, opts.workers, opts.progress).map_err(&sim_err)?)
    } else {
        None
    };

    let rows: Vec<ComparisonRow> = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| ComparisonRow {
            t,
            analytic: analytic.as_ref().map(|v| v[i]),
            mcwf_mean: stats.as_ref().map(|s| s.mean_n[i]),
            mcwf_sem: stats.as_ref().map(|s| s.sem[i]),
            markovian: markovian.as_ref().map(|v| v[i]),
        })
        .collect();
    let x = params.hbar_beta_omega0();
    let reference = Reference {
        omega_c: params.omega_c(),
        taylor_prefactor: params.alpha() * params.omega_c() / (2.0 * x),
        analytic_asymptote: 1.0 / x - 0.5,
        markov_asymptote: markov.n_thermal,
        n_traj: stats.as_ref().map(|s| s.n_traj),
    };
    let report = ComparisonReport::new(rows, reference);

    let mut outputs: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let path = |suffix: &str| opts.out_dir.join(format!("{}_{suffix}", scenario.name));
    for engine in &scenario.engines {
        let series: Vec<SeriesRow> = report
            .rows
            .iter()
            .map(|r| {
                let (mean_n, sem) = match engine {
                    Engine::Analytic => (r.analytic.unwrap_or(f64::NAN), f64::NAN),
                    Engine::Mcwf => (r.mcwf_mean.unwrap_or(f64::NAN), r.mcwf_sem.unwrap_or(f64::NAN)),
                    Engine::Markovian => (r.markovian.unwrap_or(f64::NAN), f64::NAN),
                };
                SeriesRow {
                    t: r.t,
                    mean_n,
                    sem,
                    engine: *engine,
                }
            })
            .collect();
        let mut buf = Vec::new();
        csv_io::write_series(&mut buf, &series).expect("in-memory CSV");
        outputs.push((path(&format!("{engine}.csv")), buf));
    }
    let mut combined = Vec::new();
    csv_io::write_combined(&mut combined, &report.rows, &scenario.engines).expect("in-memory CSV");
    outputs.push((path("combined.csv"), combined));
    let text = report_text(scenario, &report, stats.as_ref(), dim, &markov);
    outputs.push((path("report.txt"), text.into_bytes()));

    let files = write_all(&opts.out_dir, outputs)?;
    Ok(RunOutcome {
        report,
        stats,
        dim,
        files,
    })
}

fn write_all(dir: &Path, outputs: Vec<(PathBuf, Vec<u8>)>) -> Result<Vec<PathBuf>, RunError> {
    let mut written = Vec::new();
    let result = (|| {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for (path, bytes) in outputs {
            fs::write(&path, bytes).map_err(|source| RunError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            Err(e)
        }
    }
}

fn report_text(
    scenario: &Scenario,
    report: &ComparisonReport,
    stats: Option<&EnsembleStats>,
    dim: Option<usize>,
    markov: &ionheat_core::reservoir::MarkovRates,
) -> String {
    let p = &scenario.params;
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("# ionheat report: {}", scenario.name));
    line(format!("build                : {} (ionheat {})", BUILD_ID, env!("CARGO_PKG_VERSION")));
    line(format!("hbar [J s]           : {HBAR:e}"));
    line(format!("k_B [J/K]            : {K_B:e}"));
    line(format!("alpha [1/s]          : {:e}", p.alpha()));
    line(format!("omega0 [rad/s]       : {:e}", p.omega0()));
    line(format!("r                    : {}", p.r()));
    line(format!("omega_c [rad/s]      : {:e}", p.omega_c()));
    line(format!("temperature [K]      : {}", p.temperature()));
    line(format!("hbar beta omega0     : {:.6e}", p.hbar_beta_omega0()));
    line(format!(
        "high temperature     : {}",
        if p.is_high_temperature() { "yes" } else { "no (coefficients outside their regime)" }
    ));
    line(format!("initial Fock state   : {}", scenario.init.k()));
    line(format!(
        "grid                 : {} points, {}, t_max = {:e} s",
        scenario.grid.n_points,
        match scenario.grid.spacing {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        },
        scenario.grid.t_max
    ));
    let engines: Vec<&str> = scenario.engines.iter().map(|e| e.as_str()).collect();
    line(format!("engines              : {}", engines.join(", ")));
    line(format!("markovian law        : {MARKOV_REFERENCE_FORMULA}"));
    line(format!("Gamma [1/s]          : {:.10e}", markov.gamma));
    line(format!("n(w0)                : {:.10e}", markov.n_thermal));
    line(format!("matched N            : {:.10e}", markov.n_matched));
    line(format!("|N - n(w0)|/n(w0)    : {:.3e}", markov.occupation_gap));
    if let (Some(stats), Some(dim)) = (stats, dim) {
        line(format!("seed                 : {}", stats.seed));
        line(format!("trajectories         : {} accepted, {} aborted", stats.n_traj, stats.aborted));
        line(format!("truncation dim       : {dim}"));
        line(format!(
            "scheme               : {}",
            match scenario.sim.scheme {
                Scheme::Exact => "exact waiting times",
                Scheme::Stepped => "stepped",
            }
        ));
        line(format!(
            "rates                : {}",
            match scenario.sim.rate_model {
                RateModelKind::TimeDependent => "time dependent",
                RateModelKind::FrozenAsymptotic => "frozen at asymptotic values",
            }
        ));
        line(format!("dp_max               : {}", scenario.sim.dp_max));
        line(format!("leak_tol             : {:e}", scenario.sim.leak_tol));
        line(format!("jumps (a, a+)        : {}, {}", stats.jumps_down, stats.jumps_up));
    }
    line(String::new());
    line("## summary".into());
    out.push_str(&report.summary_text());
    out.push_str("\n## rows\n");
    let _ = writeln!(out, "{:>24} {:>24} {:>24} {:>24} {:>24}", "t", "analytic", "mcwf_mean", "mcwf_sem", "markovian");
    let cell = |v: Option<f64>| v.map_or("-".to_string(), csv_io::format_value);
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>24} {:>24} {:>24} {:>24} {:>24}",
            csv_io::format_value(r.t),
            cell(r.analytic),
            cell(r.mcwf_mean),
            cell(r.mcwf_sem),
            cell(r.markovian)
        );
    }
    out
}
