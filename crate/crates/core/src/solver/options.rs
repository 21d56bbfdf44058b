use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    #[default]
    Rk4,
    /// Dormand–Prince 5(4) with step-size control. Master equation only;
    /// trajectories always use fixed RK4 steps.
    Rk45,
}

/// Integration controls. Times are in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    #[serde(default)]
    pub integrator: Integrator,
    /// Fixed RK4 step, or the initial step for RK45. `None` picks
    /// 1/(20 · fastest rate in the model).
    #[serde(default)]
    pub dt: Option<f64>,
    /// Relative tolerance for RK45 (absolute tolerance is the same number,
    /// states being O(1)).
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Time of the initial state; lets a run continue from a hand-off.
    #[serde(default)]
    pub t_start: f64,
    pub t_final: f64,
    pub sample_times: Vec<f64>,
    /// Abort when |Tr ρ − 1| exceeds this at a sample time.
    #[serde(default = "default_monitor")]
    pub trace_tolerance: f64,
    /// Abort when the smallest eigenvalue drops below minus this.
    #[serde(default = "default_monitor")]
    pub positivity_tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_monitor() -> f64 {
    1e-6
}

impl SolverOptions {
    /// `n_samples` equally spaced samples on [0, t_final], both ends included.
    pub fn uniform(t_final: f64, n_samples: usize) -> Self {
        Self::uniform_from(0.0, t_final, n_samples)
    }

    pub fn uniform_from(t_start: f64, t_final: f64, n_samples: usize) -> Self {
        let sample_times = match n_samples {
            0 => Vec::new(),
            1 => vec![t_final],
            k => (0..k).map(|i| t_start + (t_final - t_start) * i as f64 / (k - 1) as f64).collect(),
        };
        Self {
            integrator: Integrator::Rk4,
            dt: None,
            tolerance: default_tolerance(),
            t_start,
            t_final,
            sample_times,
            trace_tolerance: default_monitor(),
            positivity_tolerance: default_monitor(),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_final.is_finite() && self.t_final >= self.t_start) {
            return Err(Error::invalid(format!("need t_start ≤ t_final, got [{}, {}]", self.t_start, self.t_final)));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::invalid(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if self.sample_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("sample_times must be sorted"));
        }
        if let (Some(&first), Some(&last)) = (self.sample_times.first(), self.sample_times.last()) {
            // Allow rounding slack from the uniform grid builder.
            let slack = 1e-12 * (self.t_final - self.t_start).abs().max(self.t_final.abs());
            if first < self.t_start - slack || last > self.t_final + slack {
                return Err(Error::invalid("sample_times must lie within [t_start, t_final]"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    pub master_seed: u64,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(Error::invalid("n_trajectories must be ≥ 1"));
        }
        Ok(())
    }
}
