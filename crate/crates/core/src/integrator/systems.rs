use super::{
    integrate_adaptive, integrate_on_grid, IntegratorConfig, OdeSystem, Termination, Trajectory,
};
use crate::dynamics::{protocols, rhs_full, rhs_reduced_raw};
use crate::error::Result;
use crate::model::{MomentState, Params, ProtocolSample};
use crate::vector::Vector;
use alloc::vec::Vec;

#[inline]
fn q_within(q: f64, params: &Params, guard: f64) -> bool {
    (q / libm::sqrt(params.lambda)).abs() < guard
}

/// Reduced nonlinear system for `(<q>, <p>)`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSystem {
    pub params: Params,
}

impl ReducedSystem {
    pub fn new(params: Params) -> Self {
        ReducedSystem { params }
    }
}

impl OdeSystem for ReducedSystem {
    type State = [f64; 2];

    #[inline]
    fn rhs(&self, t: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
        rhs_reduced_raw(y[0], y[1], t, &self.params)
    }

    fn within_guard(&self, y: &[f64; 2], guard: f64) -> bool {
        q_within(y[0], &self.params, guard)
    }
}

/// Fiducial and companion copies of the reduced system, stepped together.
#[derive(Debug, Clone, Copy)]
pub struct ReducedPair {
    pub params: Params,
}

impl OdeSystem for ReducedPair {
    type State = ([f64; 2], [f64; 2]);

    #[inline]
    fn rhs(&self, t: f64, y: &Self::State) -> Result<Self::State> {
        Ok((
            rhs_reduced_raw(y.0[0], y.0[1], t, &self.params)?,
            rhs_reduced_raw(y.1[0], y.1[1], t, &self.params)?,
        ))
    }

    fn within_guard(&self, y: &Self::State, guard: f64) -> bool {
        q_within(y.0[0], &self.params, guard) && q_within(y.1[0], &self.params, guard)
    }
}

/// Source of the agents `(B_t, mu_t)` driving the full moment system.
///
/// Signals that depend on their own dynamical variables (such as a copy of
/// the reduced system) evolve them as an auxiliary state integrated in
/// lockstep with the moments.
pub trait AgentSignal {
    type Aux: Vector;

    fn initial_aux(&self) -> Self::Aux;

    fn aux_rhs(&self, t: f64, aux: &Self::Aux) -> Result<Self::Aux>;

    fn agents(&self, t: f64, aux: &Self::Aux) -> Result<ProtocolSample>;

    fn aux_within_guard(&self, _aux: &Self::Aux, _guard: f64) -> bool {
        true
    }
}

/// The closed-form protocols designed for the initial condition `(q0, p0)`.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormProtocols {
    pub params: Params,
    pub q0: f64,
    pub p0: f64,
}

impl AgentSignal for ClosedFormProtocols {
    type Aux = [f64; 2];

    fn initial_aux(&self) -> [f64; 2] {
        [self.q0, self.p0]
    }

    #[inline]
    fn aux_rhs(&self, t: f64, aux: &[f64; 2]) -> Result<[f64; 2]> {
        rhs_reduced_raw(aux[0], aux[1], t, &self.params)
    }

    #[inline]
    fn agents(&self, t: f64, aux: &[f64; 2]) -> Result<ProtocolSample> {
        protocols(aux[0], aux[1], t, &self.params)
    }

    fn aux_within_guard(&self, aux: &[f64; 2], guard: f64) -> bool {
        q_within(aux[0], &self.params, guard)
    }
}

/// Agents given as an explicit function of time.
pub struct ExplicitAgents<F>(pub F);

impl<F: Fn(f64) -> ProtocolSample> AgentSignal for ExplicitAgents<F> {
    type Aux = [f64; 0];

    fn initial_aux(&self) -> [f64; 0] {
        []
    }

    fn aux_rhs(&self, _t: f64, _aux: &[f64; 0]) -> Result<[f64; 0]> {
        Ok([])
    }

    fn agents(&self, t: f64, _aux: &[f64; 0]) -> Result<ProtocolSample> {
        Ok((self.0)(t))
    }
}

/// Full five-moment system driven by an [`AgentSignal`].
#[derive(Debug, Clone, Copy)]
pub struct FullSystem<A> {
    pub params: Params,
    pub signal: A,
}

impl<A: AgentSignal> FullSystem<A> {
    pub fn initial_state(&self, actual: &MomentState) -> (A::Aux, [f64; 5]) {
        (self.signal.initial_aux(), actual.as_array())
    }
}

impl<A: AgentSignal> OdeSystem for FullSystem<A> {
    type State = (A::Aux, [f64; 5]);

    #[inline]
    fn rhs(&self, t: f64, y: &Self::State) -> Result<Self::State> {
        let agents = self.signal.agents(t, &y.0)?;
        Ok((
            self.signal.aux_rhs(t, &y.0)?,
            rhs_full(&y.1, &agents, &self.params),
        ))
    }

    fn within_guard(&self, y: &Self::State, guard: f64) -> bool {
        self.signal.aux_within_guard(&y.0, guard)
    }
}

/// Moment state together with the agents applied at the same instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSample {
    pub state: MomentState,
    pub agents: ProtocolSample,
}

#[derive(Debug, Clone)]
pub struct FullTrajectory {
    pub samples: Vec<FullSample>,
    pub status: Termination,
}

impl FullTrajectory {
    /// `max |<q^2> - lambda|` over the samples.
    pub fn max_q2_deviation(&self, lambda: f64) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.state.q2 - lambda).abs())
            .fold(0.0, f64::max)
    }

    /// `max |Z|` over the samples.
    pub fn max_z_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.state.z.abs())
            .fold(0.0, f64::max)
    }

    fn from_raw<A: AgentSignal>(sys: &FullSystem<A>, raw: Trajectory<(A::Aux, [f64; 5])>) -> Self {
        let samples = raw
            .samples
            .iter()
            .map_while(|(t, y)| {
                let agents = sys.signal.agents(*t, &y.0).ok()?;
                Some(FullSample {
                    state: MomentState::from_array(y.1, *t),
                    agents,
                })
            })
            .collect();
        FullTrajectory {
            samples,
            status: raw.status,
        }
    }
}

/// Evolves the full moment system from `actual` under `signal` over `[0, t_end]`,
/// recording every accepted step.
pub fn integrate_full_with_protocols<A: AgentSignal>(
    actual: &MomentState,
    params: &Params,
    signal: A,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<FullTrajectory> {
    let sys = FullSystem {
        params: *params,
        signal,
    };
    let raw = integrate_adaptive(&sys, 0.0, sys.initial_state(actual), t_end, cfg)?;
    Ok(FullTrajectory::from_raw(&sys, raw))
}

/// As [`integrate_full_with_protocols`], sampled at `times` via dense output.
pub fn integrate_full_on_grid<A: AgentSignal>(
    actual: &MomentState,
    params: &Params,
    signal: A,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<FullTrajectory> {
    let sys = FullSystem {
        params: *params,
        signal,
    };
    let raw = integrate_on_grid(&sys, 0.0, sys.initial_state(actual), times, cfg)?;
    Ok(FullTrajectory::from_raw(&sys, raw))
}
