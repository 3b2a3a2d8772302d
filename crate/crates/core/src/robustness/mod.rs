//! Error experiments on the protocol-driven moment dynamics.
//!
//! Two kinds of imperfection are studied: protocols designed for the wrong
//! initial condition, and protocols contaminated by a deterministic but
//! chaotic noise signal `delta = epsilon <q>(t)` taken from an independent
//! copy of the reduced system in its chaotic regime.
//!
//! Randomness only enters through the initial conditions of the noise
//! sources. Each source draws from its own ChaCha8 stream, selected by
//! [`stream_id`] from the realization index, the signal role and the
//! regeneration attempt, so every realization is reproducible on its own.

mod fit;
mod perturbed;
mod statistics;

pub use fit::{fit_power_law, linear_fit, LinearFit, PowerLawFit};
pub use perturbed::{
    ensemble_max_error, ic_error_experiment, ic_error_on_grid, run_perturbed, ErrorEnvelope,
    IcErrorExperiment, PerturbedRun,
};
pub use statistics::{integrated_q_statistics, source_integral, QStatistics, SourceIntegral};

use crate::error::{Error, Result};
use crate::integrator::{
    integrate_dense, AgentSignal, ClosedFormProtocols, DenseTrajectory, IntegratorConfig,
    ReducedSystem,
};
use crate::model::{Params, ProtocolSample, SINGULAR_GUARD};
use alloc::vec::Vec;
use core::f64::consts::TAU;
use libm::{cos, sin, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Start of the power-law fit window.
pub const FIT_WINDOW_START: f64 = 10.0;

/// Largest fraction of realizations an ensemble may lose to numerical failure.
pub const MAX_FAILED_FRACTION: f64 = 0.1;

/// Which protocol a noise source contaminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalRole {
    /// Added to the field protocol `B`.
    Field,
    /// Added to the stiffness protocol `mu`.
    Stiffness,
}

impl SignalRole {
    fn index(self) -> u64 {
        match self {
            SignalRole::Field => 0,
            SignalRole::Stiffness => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Noise intensity.
    pub epsilon: f64,
    pub seed: u64,
    /// Parameters of the chaotic source orbits.
    pub source_params: Params,
    /// Radius of the origin-centred disk the source initial conditions are drawn from.
    pub ic_radius: f64,
    pub n_realizations: usize,
    /// Fresh initial conditions tried per source before a realization is given up.
    pub max_regenerations: u32,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            epsilon: 0.0,
            seed: 0,
            source_params: Params {
                m: 0.4,
                h: 0.1,
                omega: 1.0,
                purity: 1.0,
                ..Params::default()
            },
            ic_radius: 0.05,
            n_realizations: 100,
            max_regenerations: 8,
        }
    }
}

impl NoiseConfig {
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        NoiseConfig { epsilon, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name, constraint| Err(Error::InvalidParameter { name, constraint });
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return invalid("epsilon", "epsilon >= 0");
        }
        if !(self.ic_radius >= 0.0
            && self.ic_radius < SINGULAR_GUARD * sqrt(self.source_params.lambda))
        {
            return invalid("ic_radius", "0 <= ic_radius < guard");
        }
        if self.max_regenerations >= 256 {
            return invalid("max_regenerations", "max_regenerations < 256");
        }
        self.source_params.validate()
    }

    /// Initial condition of a noise source, uniform in the disk of `ic_radius`.
    pub fn source_ic(&self, realization: u64, role: SignalRole, attempt: u32) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream_id(realization, role, attempt));
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let r = self.ic_radius * sqrt(u);
        let theta = TAU * v;
        (r * cos(theta), r * sin(theta))
    }
}

/// ChaCha stream for one source: `realization << 16 | role << 8 | attempt`.
pub fn stream_id(realization: u64, role: SignalRole, attempt: u32) -> u64 {
    (realization << 16) | (role.index() << 8) | (attempt as u64 & 0xff)
}

/// Continuously evaluable noise `epsilon <q>(t)` from one chaotic source orbit.
#[derive(Debug, Clone)]
pub struct NoiseSignal {
    pub epsilon: f64,
    pub role: SignalRole,
    /// Initial condition of the source orbit actually used.
    pub ic: (f64, f64),
    /// Initial conditions discarded after their orbit hit the guard.
    pub regenerations: u32,
    orbit: DenseTrajectory<[f64; 2]>,
}

impl NoiseSignal {
    /// Signal value, or `None` outside the integrated span.
    pub fn value(&self, t: f64) -> Option<f64> {
        self.orbit.eval(t).map(|y| self.epsilon * y[0])
    }

    pub fn t_end(&self) -> f64 {
        self.orbit.t_end()
    }

    pub fn source(&self) -> &DenseTrajectory<[f64; 2]> {
        &self.orbit
    }
}

/// Closed-form protocols with precomputed noise added to `B` and `mu`.
#[derive(Debug, Clone)]
pub struct NoisyProtocols {
    pub base: ClosedFormProtocols,
    pub field: NoiseSignal,
    pub stiffness: NoiseSignal,
}

impl AgentSignal for NoisyProtocols {
    type Aux = [f64; 2];

    fn initial_aux(&self) -> [f64; 2] {
        self.base.initial_aux()
    }

    fn aux_rhs(&self, t: f64, aux: &[f64; 2]) -> Result<[f64; 2]> {
        self.base.aux_rhs(t, aux)
    }

    fn agents(&self, t: f64, aux: &[f64; 2]) -> Result<ProtocolSample> {
        let mut agents = self.base.agents(t, aux)?;
        let outside = || Error::InsufficientData {
            needed: t,
            got: self.field.t_end().min(self.stiffness.t_end()),
        };
        agents.b += self.field.value(t).ok_or_else(outside)?;
        agents.mu += self.stiffness.value(t).ok_or_else(outside)?;
        Ok(agents)
    }

    fn aux_within_guard(&self, aux: &[f64; 2], guard: f64) -> bool {
        self.base.aux_within_guard(aux, guard)
    }
}

/// Integrates a source orbit over `[0, t_end]`, redrawing its initial
/// condition whenever the orbit reaches the guard.
pub fn chaotic_noise_signal(
    cfg: &NoiseConfig,
    realization: u64,
    role: SignalRole,
    t_end: f64,
    integ: &IntegratorConfig,
) -> Result<NoiseSignal> {
    cfg.validate()?;
    let sys = ReducedSystem::new(cfg.source_params);
    let mut last_t = 0.0;
    for attempt in 0..=cfg.max_regenerations {
        let ic = cfg.source_ic(realization, role, attempt);
        let orbit = integrate_dense(&sys, 0.0, [ic.0, ic.1], t_end, integ)?;
        match orbit.status.into_result() {
            Ok(()) => {
                return Ok(NoiseSignal {
                    epsilon: cfg.epsilon,
                    role,
                    ic,
                    regenerations: attempt,
                    orbit,
                })
            }
            Err(Error::GuardHit { t }) => last_t = t,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GuardHit { t: last_t })
}

/// `times[k] = k * dt` for all `k` with `k dt <= t_end`.
pub fn uniform_grid(dt: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_end",
            constraint: "t_end >= 0 with a positive sample spacing",
        });
    }
    let n = libm::floor(t_end / dt * (1.0 + 1e-12)) as usize;
    Ok((0..=n).map(|k| k as f64 * dt).collect())
}
