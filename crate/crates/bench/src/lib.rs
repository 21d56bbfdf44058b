//! Fixtures shared by the benchmarks in `benches/`: the figure presets at a
//! chosen cutoff with short time grids.

use cantisim_core::model::LindbladModel;
use cantisim_core::quantum::thermal_state;
use cantisim_core::scenario::{build_model, preset, solver_options, ScenarioConfig};
use cantisim_core::{QuantumState, SolverOptions};

pub struct Fixture {
    pub config: ScenarioConfig,
    pub model: LindbladModel,
    pub initial: QuantumState,
    pub options: SolverOptions,
}

/// `name` preset at cutoff `fock`, integrated to `t_dimless` with 11 samples.
/// Cooling presets start thermal at n̄ = 1 (roughly the handoff state);
/// squeezing presets start in the vacuum.
pub fn fixture(name: &str, fock: usize, t_dimless: f64) -> Fixture {
    let mut config = preset(name).expect("known preset");
    config.sweep = None;
    config.solver.fock_cutoff = fock;
    config.solver.t_final_dimless = t_dimless;
    config.solver.n_samples = 11;
    let r = config.resolve().expect("preset resolves");
    let model = build_model(&config, &r, fock).expect("model builds");
    let initial = if name == "fig3" || name == "fig4" {
        thermal_state(1.0, model.space).expect("thermal state")
    } else {
        QuantumState::ground(model.space)
    };
    let options = solver_options(&config, &r.sample_times_s);
    Fixture { config, model, initial, options }
}
