use serde::{Deserialize, Serialize};

use crate::quantum::QuantumState;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StdErrors {
    pub mean_phonon: Vec<f64>,
    pub excited_pop: Vec<f64>,
    pub variance_v: Vec<f64>,
}

/// What a run saw while stepping, beyond the observables.
impl StdErrors {
    /// Placeholder for stretches of a series that have no ensemble.
    pub fn nan(len: usize) -> Self {
        Self { mean_phonon: vec![f64::NAN; len], excited_pop: vec![f64::NAN; len], variance_v: vec![f64::NAN; len] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub rejected_steps: usize,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_error: f64,
    pub jumps: usize,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub mean_phonon: Vec<f64>,
    pub excited_pop: Vec<f64>,
    pub variance_v: Vec<f64>,
    pub std_errors: Option<StdErrors>,
    pub final_state: QuantumState,
    pub diagnostics: Diagnostics,
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_phonon(&self) -> Option<f64> {
        self.mean_phonon.last().copied()
    }

    /// Series values of `other` are appended after this run's; the final state
    /// and diagnostics are taken from `other`, counts are added.
    pub fn concat(mut self, other: EvolutionResult) -> EvolutionResult {
        let skip = match (self.times.last(), other.times.first()) {
            (Some(a), Some(b)) if a == b => 1,
            _ => 0,
        };
        self.times.extend_from_slice(&other.times[skip..]);
        self.mean_phonon.extend_from_slice(&other.mean_phonon[skip..]);
        self.excited_pop.extend_from_slice(&other.excited_pop[skip..]);
        self.variance_v.extend_from_slice(&other.variance_v[skip..]);
        let n_self = self.times.len() - (other.times.len() - skip);
        let n_other = other.times.len() - skip;
        self.std_errors = match (self.std_errors, other.std_errors) {
            (None, None) => None,
            (a, b) => {
                let mut a = a.unwrap_or_else(|| StdErrors::nan(n_self));
                let b = b.unwrap_or_else(|| StdErrors::nan(n_other + skip));
                a.mean_phonon.extend_from_slice(&b.mean_phonon[skip..]);
                a.excited_pop.extend_from_slice(&b.excited_pop[skip..]);
                a.variance_v.extend_from_slice(&b.variance_v[skip..]);
                Some(a)
            }
        };
        let d = other.diagnostics;
        self.diagnostics = Diagnostics {
            steps: self.diagnostics.steps + d.steps,
            rejected_steps: self.diagnostics.rejected_steps + d.rejected_steps,
            max_trace_error: self.diagnostics.max_trace_error.max(d.max_trace_error),
            min_eigenvalue: self.diagnostics.min_eigenvalue.min(d.min_eigenvalue),
            max_hermiticity_error: self.diagnostics.max_hermiticity_error.max(d.max_hermiticity_error),
            jumps: self.diagnostics.jumps + d.jumps,
        };
        self.final_state = other.final_state;
        self
    }
}
