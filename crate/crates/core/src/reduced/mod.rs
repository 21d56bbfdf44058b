//! Closed-form and oscillator-only surrogates of the qubit ⊗ oscillator models.

mod closed_form;
mod phonon;

pub use closed_form::{
    adiabatic_rates, rate_equation, rate_equation_fixed_point, residual_dissipator_rates, steady_phonon_closed_form,
    AdiabaticRates, ClosedFormPhonon, ResidualRates, SqueezeParams,
};
pub use phonon::{evolve_populations, evolve_reduced, reduced_model, PopulationSeries};
