//! The three reference scenarios.
//!
//! All share `α = 0.1 s⁻¹`, `ω₀ = 10⁷ rad/s`, `r = 10` and start in the
//! ground state:
//!
//! | name | T      | window   | engines             | trajectories (paper scale) |
//! |------|--------|----------|---------------------|----------------------------|
//! | fig1 | 300 K  | `2/ω_c`  | analytic, mcwf      | 10⁵ (10⁷)                  |
//! | fig2 | 10 mK  | `5/Γ`    | analytic, mcwf      | 10⁴ (10⁴)                  |
//! | fig3 | 300 K  | `1/ω_c`  | analytic, markovian | none                       |

use ionheat_core::analytic::InitialCondition;
use ionheat_core::reservoir::TclCoefficients;
use ionheat_core::PhysicalParams;

use crate::config::{Engine, GridSpec, Scenario, SimOverrides, Spacing, DEFAULT_POINTS};

pub const ALPHA: f64 = 0.1;
pub const OMEGA0: f64 = 1e7;
pub const R: f64 = 10.0;

fn params(temperature: f64) -> PhysicalParams {
    PhysicalParams::new(ALPHA, OMEGA0, R, temperature).expect("preset parameters are valid")
}

fn scenario(name: &str, temperature: f64, t_max: f64, spacing: Spacing, engines: &[Engine], n_traj: usize) -> Scenario {
    Scenario {
        name: name.to_string(),
        params: params(temperature),
        init: InitialCondition::ground(),
        grid: GridSpec {
            t_max,
            n_points: DEFAULT_POINTS,
            spacing,
        },
        engines: engines.to_vec(),
        sim: SimOverrides {
            n_traj,
            ..SimOverrides::default()
        },
    }
}

/// fig1, fig2 and fig3; `paper_scale` raises fig1 to 10⁷ trajectories.
pub fn presets(paper_scale: bool) -> Vec<Scenario> {
    let hot = params(300.0);
    let cold = params(0.010);
    let (_, gamma_inf) = TclCoefficients::new(&cold).asymptotic();
    vec![
        scenario(
            "fig1",
            300.0,
            2.0 / hot.omega_c(),
            Spacing::Log,
            &[Engine::Analytic, Engine::Mcwf],
            if paper_scale { 10_000_000 } else { 100_000 },
        ),
        scenario(
            "fig2",
            0.010,
            5.0 / gamma_inf,
            Spacing::Linear,
            &[Engine::Analytic, Engine::Mcwf],
            10_000,
        ),
        scenario(
            "fig3",
            300.0,
            1.0 / hot.omega_c(),
            Spacing::Log,
            &[Engine::Analytic, Engine::Markovian],
            0,
        ),
    ]
}

pub fn preset(name: &str, paper_scale: bool) -> Option<Scenario> {
    presets(paper_scale).into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_table() {
        let all = presets(false);
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|s| s.params.r() == 10.0 && s.init.k() == 0));
        assert!(all.iter().all(|s| s.validate().is_ok()));
        let fig2 = preset("fig2", false).unwrap();
        assert_eq!(fig2.params.temperature(), 0.010);
        assert_eq!(fig2.sim.n_traj, 10_000);
        assert_eq!(preset("fig1", false).unwrap().sim.n_traj, 100_000);
        assert_eq!(preset("fig1", true).unwrap().sim.n_traj, 10_000_000);
        let fig3 = preset("fig3", false).unwrap();
        assert_eq!(fig3.engines, vec![Engine::Analytic, Engine::Markovian]);
        assert!((fig3.grid.t_max * fig3.params.omega_c() - 1.0).abs() < 1e-12);
        assert!(preset("fig4", false).is_none());
    }
}
