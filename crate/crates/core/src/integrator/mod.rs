//! Time stepping for the reduced and full moment systems.
//!
//! The workhorse is an embedded Dormand-Prince 5(4) pair with dense output
//! ([`Solver`]); [`step_rk4`] is a fixed-step reference used to cross-check it.
//! All drivers return partial data together with a [`Termination`] status
//! instead of discarding the run when the guard or the step budget is hit.

mod dopri5;
mod systems;

pub use dopri5::{DenseSegment, Solver};
pub use systems::{
    integrate_full_on_grid, integrate_full_with_protocols, AgentSignal, ClosedFormProtocols,
    ExplicitAgents, FullSample, FullSystem, FullTrajectory, ReducedPair, ReducedSystem,
};

use crate::error::{Error, Result};
use crate::model::SINGULAR_GUARD;
use crate::vector::Vector;
use alloc::vec::Vec;
use core::f64::consts::TAU;

/// Error tolerances, step bounds and the `|q|` guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Largest admissible `|<q>| / sqrt(lambda)`.
    pub guard: f64,
    /// Hard cap on attempted steps per solver.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            dt_init: 1e-3,
            dt_min: 1e-12,
            dt_max: 1.0,
            guard: SINGULAR_GUARD,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(self, tol: f64) -> Self {
        IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name, constraint| Err(Error::InvalidParameter { name, constraint });
        if !(self.rel_tol > 0.0) {
            return invalid("rel_tol", "rel_tol > 0");
        }
        if !(self.abs_tol > 0.0) {
            return invalid("abs_tol", "abs_tol > 0");
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return invalid("dt_init", "0 < dt_min <= dt_init <= dt_max");
        }
        if !(self.guard > 0.0 && self.guard < 1.0) {
            return invalid("guard", "0 < guard < 1");
        }
        if self.max_steps == 0 {
            return invalid("max_steps", "max_steps >= 1");
        }
        Ok(())
    }
}

/// A first-order system `dy/dt = f(t, y)`.
pub trait OdeSystem {
    type State: Vector;

    fn rhs(&self, t: f64, y: &Self::State) -> Result<Self::State>;

    /// Whether `y` lies inside the region where the system is regular.
    fn within_guard(&self, _y: &Self::State, _guard: f64) -> bool {
        true
    }
}

/// Adapter turning a closure into an [`OdeSystem`].
pub struct FnSystem<V, F> {
    f: F,
    _state: core::marker::PhantomData<V>,
}

impl<V, F> FnSystem<V, F>
where
    V: Vector,
    F: Fn(f64, &V) -> Result<V>,
{
    pub fn new(f: F) -> Self {
        FnSystem {
            f,
            _state: core::marker::PhantomData,
        }
    }
}

impl<V, F> OdeSystem for FnSystem<V, F>
where
    V: Vector,
    F: Fn(f64, &V) -> Result<V>,
{
    type State = V;

    fn rhs(&self, t: f64, y: &V) -> Result<V> {
        (self.f)(t, y)
    }
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    GuardHit { t: f64 },
    StepLimit { t: f64 },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }

    /// Converts a non-completed status into the matching error.
    pub fn into_result(self) -> Result<()> {
        match self {
            Termination::Completed => Ok(()),
            Termination::GuardHit { t } => Err(Error::GuardHit { t }),
            Termination::StepLimit { t } => Err(Error::StepLimit { t }),
        }
    }

    fn from_error(e: Error) -> Result<Self> {
        match e {
            Error::GuardHit { t } => Ok(Termination::GuardHit { t }),
            Error::StepLimit { t } => Ok(Termination::StepLimit { t }),
            other => Err(other),
        }
    }
}

/// Time-ordered samples of a run plus its termination status.
#[derive(Debug, Clone)]
pub struct Trajectory<V> {
    pub samples: Vec<(f64, V)>,
    pub status: Termination,
}

impl<V: Vector> Trajectory<V> {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }

    pub fn last(&self) -> Option<&(f64, V)> {
        self.samples.last()
    }
}

/// Classical fixed-step fourth-order Runge-Kutta step.
pub fn step_rk4<S: OdeSystem>(sys: &S, t: f64, y: &S::State, dt: f64) -> Result<S::State> {
    let guard_err = |_| Error::GuardHit { t };
    let k1 = sys.rhs(t, y).map_err(guard_err)?;
    let k2 = sys
        .rhs(t + 0.5 * dt, &y.axpy(0.5 * dt, &k1))
        .map_err(guard_err)?;
    let k3 = sys
        .rhs(t + 0.5 * dt, &y.axpy(0.5 * dt, &k2))
        .map_err(guard_err)?;
    let k4 = sys.rhs(t + dt, &y.axpy(dt, &k3)).map_err(guard_err)?;
    Ok(y.axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4))
}

/// Adaptive run recording every accepted step, starting with `(t0, y0)`.
pub fn integrate_adaptive<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: S::State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S::State>> {
    cfg.validate()?;
    let mut samples = alloc::vec![(t0, y0)];
    let mut solver = match Solver::new(sys, t0, y0, *cfg) {
        Ok(s) => s,
        Err(e) => {
            return Ok(Trajectory {
                samples,
                status: Termination::from_error(e)?,
            })
        }
    };
    let status = match solver.advance_to(t_end, |s| samples.push((s.t(), *s.state()))) {
        Ok(()) => Termination::Completed,
        Err(e) => Termination::from_error(e)?,
    };
    Ok(Trajectory { samples, status })
}

/// Samples the solution at the requested (monotone) times through dense output.
pub fn integrate_on_grid<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: S::State,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S::State>> {
    let mut samples = Vec::with_capacity(times.len());
    let status = sample_into(sys, t0, y0, times, cfg, |t, y| samples.push((t, *y)))?;
    Ok(Trajectory { samples, status })
}

/// Streams dense-output samples at `times` into `sink`; returns the status.
pub fn sample_into<S, F>(
    sys: &S,
    t0: f64,
    y0: S::State,
    times: &[f64],
    cfg: &IntegratorConfig,
    sink: F,
) -> Result<Termination>
where
    S: OdeSystem,
    F: FnMut(f64, &S::State),
{
    cfg.validate()?;
    let mut solver = match Solver::new(sys, t0, y0, *cfg) {
        Ok(s) => s,
        Err(e) => return Termination::from_error(e),
    };
    sample_solver(&mut solver, times, sink)
}

/// Drives an existing solver through `times`, streaming dense-output samples.
///
/// On a guard or step-limit termination the solver is left at its last
/// state, so callers can inspect which component failed.
pub fn sample_solver<S, F>(
    solver: &mut Solver<'_, S>,
    times: &[f64],
    mut sink: F,
) -> Result<Termination>
where
    S: OdeSystem,
    F: FnMut(f64, &S::State),
{
    let Some(&t_last) = times.last() else {
        return Ok(Termination::Completed);
    };
    let t0 = solver.t();
    let y0 = *solver.state();
    let forward = t_last >= t0;
    let mut idx = 0;
    while idx < times.len() && times[idx] == t0 {
        sink(t0, &y0);
        idx += 1;
    }
    while idx < times.len() {
        if let Err(e) = solver.step(t_last) {
            return Termination::from_error(e);
        }
        let t_now = solver.t();
        let seg = solver.last_segment().copied();
        while idx < times.len() {
            let tk = times[idx];
            let reached = if forward { tk <= t_now } else { tk >= t_now };
            if !reached {
                break;
            }
            let y = if tk == t_now {
                *solver.state()
            } else {
                seg.map(|s| s.eval(tk)).unwrap_or(*solver.state())
            };
            sink(tk, &y);
            idx += 1;
        }
    }
    Ok(Termination::Completed)
}

/// Piecewise dense representation of a solution, evaluable anywhere in its span.
#[derive(Debug, Clone)]
pub struct DenseTrajectory<V> {
    pub t0: f64,
    pub y0: V,
    segments: Vec<DenseSegment<V>>,
    pub status: Termination,
}

impl<V: Vector> DenseTrajectory<V> {
    /// End of the covered span.
    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(self.t0, |s| s.t1())
    }

    /// Interpolated state, or `None` outside `[t0, t_end]`.
    pub fn eval(&self, t: f64) -> Option<V> {
        if t == self.t0 {
            return Some(self.y0);
        }
        if t < self.t0 || t > self.t_end() {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.t1() < t);
        self.segments.get(idx).map(|s| s.eval(t))
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }
}

/// Forward adaptive run keeping the continuous extension of every step.
pub fn integrate_dense<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: S::State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<DenseTrajectory<S::State>> {
    if !(t_end >= t0) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            constraint: "t_end >= t0",
        });
    }
    cfg.validate()?;
    let mut segments = Vec::new();
    let status = match Solver::new(sys, t0, y0, *cfg) {
        Err(e) => Termination::from_error(e)?,
        Ok(mut solver) => {
            let r = solver.advance_to(t_end, |s| {
                if let Some(seg) = s.last_segment() {
                    segments.push(*seg);
                }
            });
            match r {
                Ok(()) => Termination::Completed,
                Err(e) => Termination::from_error(e)?,
            }
        }
    };
    Ok(DenseTrajectory {
        t0,
        y0,
        segments,
        status,
    })
}

/// Stroboscopic samples `t_k = (phase + 2 pi k) / omega`, `k = 0..=n_periods`.
#[derive(Debug, Clone)]
pub struct Stroboscopic<V> {
    pub points: Vec<(usize, f64, V)>,
    pub status: Termination,
}

/// Samples a run (started at `t = 0`) at integer multiples of the drive period.
pub fn stroboscopic_sample<S: OdeSystem>(
    sys: &S,
    y0: S::State,
    omega: f64,
    phase: f64,
    n_periods: usize,
    cfg: &IntegratorConfig,
) -> Result<Stroboscopic<S::State>> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            constraint: "omega > 0",
        });
    }
    if !(0.0..TAU).contains(&phase) {
        return Err(Error::InvalidParameter {
            name: "phase",
            constraint: "0 <= phase < 2 pi",
        });
    }
    let times: Vec<f64> = (0..=n_periods)
        .map(|k| (phase + TAU * k as f64) / omega)
        .collect();
    let traj = integrate_on_grid(sys, 0.0, y0, &times, cfg)?;
    let points = traj
        .samples
        .into_iter()
        .enumerate()
        .map(|(k, (t, y))| (k, t, y))
        .collect();
    Ok(Stroboscopic {
        points,
        status: traj.status,
    })
}
