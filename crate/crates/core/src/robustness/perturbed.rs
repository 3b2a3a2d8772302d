use super::{uniform_grid, NoiseConfig, SignalRole, MAX_FAILED_FRACTION};
use crate::dynamics::{initial_moments, protocols, rhs_full, rhs_reduced_raw};
use crate::error::{Error, Result};
use crate::integrator::{sample_solver, IntegratorConfig, OdeSystem, Solver, Termination};
use crate::model::Params;
use crate::vector::Passive;
use alloc::vec::Vec;
use libm::sqrt;

type Reduced = [f64; 2];
type Moments = [f64; 5];

#[inline]
fn guard_ratio(q: f64, params: &Params) -> f64 {
    (q / sqrt(params.lambda)).abs()
}

/// Design orbit, two noise sources and the moments driven by the noisy agents.
///
/// The moments are passive in the step-size control, so the step sequence and
/// hence the numerically computed chaotic orbits are the same for every
/// `epsilon`. Without this, a realization would see a different noise history
/// for each intensity once round-off has been amplified by the chaos.
struct NoisySystem {
    design: Params,
    source: Params,
    epsilon: f64,
}

impl OdeSystem for NoisySystem {
    type State = ((Reduced, (Reduced, Reduced)), Passive<Moments>);

    #[inline]
    fn rhs(&self, t: f64, y: &Self::State) -> Result<Self::State> {
        let ((theory, (field, stiffness)), moments) = y;
        let mut agents = protocols(theory[0], theory[1], t, &self.design)?;
        agents.b += self.epsilon * field[0];
        agents.mu += self.epsilon * stiffness[0];
        Ok((
            (
                rhs_reduced_raw(theory[0], theory[1], t, &self.design)?,
                (
                    rhs_reduced_raw(field[0], field[1], t, &self.source)?,
                    rhs_reduced_raw(stiffness[0], stiffness[1], t, &self.source)?,
                ),
            ),
            Passive(rhs_full(&moments.0, &agents, &self.design)),
        ))
    }

    fn within_guard(&self, y: &Self::State, guard: f64) -> bool {
        let (theory, (field, stiffness)) = y.0;
        guard_ratio(theory[0], &self.design) < guard
            && guard_ratio(field[0], &self.source) < guard
            && guard_ratio(stiffness[0], &self.source) < guard
    }
}

impl NoisySystem {
    /// The reduced copy closest to the guard, `None` meaning the design orbit.
    fn culprit(&self, y: &<Self as OdeSystem>::State) -> Option<SignalRole> {
        let (theory, (field, stiffness)) = y.0;
        let r_theory = guard_ratio(theory[0], &self.design);
        let r_field = guard_ratio(field[0], &self.source);
        let r_stiff = guard_ratio(stiffness[0], &self.source);
        if r_theory >= r_field && r_theory >= r_stiff {
            None
        } else if r_field >= r_stiff {
            Some(SignalRole::Field)
        } else {
            Some(SignalRole::Stiffness)
        }
    }
}

/// Constraint deviation `<q^2> - lambda` of one noisy realization.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedRun {
    pub realization: u64,
    /// Uniform grid with one drive period spacing.
    pub times: Vec<f64>,
    pub deviation: Vec<f64>,
    pub status: Termination,
    /// Source initial conditions used for `(delta_B, delta_mu)`.
    pub source_ics: [(f64, f64); 2],
    /// Source initial conditions discarded because their orbit hit the guard.
    pub regenerations: u32,
}

impl PerturbedRun {
    pub fn is_completed(&self) -> bool {
        self.status.is_completed()
    }
}

/// One realization of the protocol-noise experiment on `[0, t_end]`.
///
/// The design orbit, both noise sources and the moment system are integrated
/// in lockstep. A source that reaches the guard is redrawn and the
/// realization restarted; a guard hit of the design orbit ends the run with
/// partial data.
pub fn run_perturbed(
    q0: f64,
    p0: f64,
    params: &Params,
    noise: &NoiseConfig,
    realization: u64,
    t_end: f64,
    integ: &IntegratorConfig,
) -> Result<PerturbedRun> {
    noise.validate()?;
    params.validate()?;
    let actual = initial_moments(q0, p0, params)?;
    let times = uniform_grid(params.period(), t_end)?;
    let sys = NoisySystem {
        design: *params,
        source: noise.source_params,
        epsilon: noise.epsilon,
    };
    let mut attempts = [0u32; 2];
    loop {
        let ics = [
            noise.source_ic(realization, SignalRole::Field, attempts[0]),
            noise.source_ic(realization, SignalRole::Stiffness, attempts[1]),
        ];
        let y0 = (
            ([q0, p0], ([ics[0].0, ics[0].1], [ics[1].0, ics[1].1])),
            Passive(actual.as_array()),
        );
        let mut deviation = Vec::with_capacity(times.len());
        let mut solver = Solver::new(&sys, 0.0, y0, *integ)?;
        let status = sample_solver(&mut solver, &times, |_, y| {
            deviation.push(y.1 .0[2] - params.lambda)
        })?;
        let regenerations = attempts[0] + attempts[1];
        let finish = |status| PerturbedRun {
            realization,
            times: times[..deviation.len()].to_vec(),
            deviation: deviation.clone(),
            status,
            source_ics: ics,
            regenerations,
        };
        let Termination::GuardHit { .. } = status else {
            return Ok(finish(status));
        };
        let slot = match sys.culprit(solver.state()) {
            Some(SignalRole::Field) => 0,
            Some(SignalRole::Stiffness) => 1,
            None => return Ok(finish(status)),
        };
        if attempts[slot] >= noise.max_regenerations {
            return Ok(finish(status));
        }
        attempts[slot] += 1;
    }
}

/// Per-time maxima of the constraint deviation across an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEnvelope {
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// `max(<q^2> - lambda, 0)` over realizations.
    pub above: Vec<f64>,
    /// `max(lambda - <q^2>, 0)` over realizations.
    pub below: Vec<f64>,
    /// Realizations that entered the maxima.
    pub realizations: usize,
    /// Realizations dropped after a numerical failure.
    pub excluded: usize,
    /// Source regenerations summed over the included realizations.
    pub regenerations: u64,
}

impl ErrorEnvelope {
    /// Combines realization outcomes, dropping numerically failed or
    /// incomplete ones. Fails when more than a tenth are dropped.
    pub fn from_runs<I>(epsilon: f64, times: Vec<f64>, runs: I) -> Result<Self>
    where
        I: IntoIterator<Item = Result<PerturbedRun>>,
    {
        let mut above = alloc::vec![0.0; times.len()];
        let mut below = alloc::vec![0.0; times.len()];
        let (mut included, mut excluded, mut regenerations) = (0usize, 0usize, 0u64);
        for run in runs {
            let run = match run {
                Ok(r) if r.is_completed() && r.deviation.len() == times.len() => r,
                Ok(_) => {
                    excluded += 1;
                    continue;
                }
                Err(e) if e.is_numerical() => {
                    excluded += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            included += 1;
            regenerations += run.regenerations as u64;
            for (k, d) in run.deviation.iter().enumerate() {
                above[k] = f64::max(above[k], *d);
                below[k] = f64::max(below[k], -*d);
            }
        }
        let total = included + excluded;
        if included == 0 || excluded as f64 > MAX_FAILED_FRACTION * total as f64 {
            return Err(Error::TooManyFailures {
                failed: excluded,
                total,
            });
        }
        Ok(ErrorEnvelope {
            epsilon,
            times,
            above,
            below,
            realizations: included,
            excluded,
            regenerations,
        })
    }

    /// `max(above, below)` at every sample.
    pub fn max_abs(&self) -> Vec<f64> {
        self.above
            .iter()
            .zip(&self.below)
            .map(|(a, b)| a.max(*b))
            .collect()
    }

    /// Running maximum of [`ErrorEnvelope::max_abs`] over time.
    pub fn running_max(&self) -> Vec<f64> {
        let mut acc = 0.0f64;
        self.max_abs()
            .into_iter()
            .map(|v| {
                acc = acc.max(v);
                acc
            })
            .collect()
    }

    /// Envelope divided by `epsilon`, `None` for the noiseless ensemble.
    pub fn scaled(&self) -> Option<Vec<f64>> {
        if self.epsilon > 0.0 {
            Some(
                self.max_abs()
                    .into_iter()
                    .map(|v| v / self.epsilon)
                    .collect(),
            )
        } else {
            None
        }
    }
}

/// Runs `noise.n_realizations` realizations sequentially and builds their envelope.
pub fn ensemble_max_error(
    q0: f64,
    p0: f64,
    params: &Params,
    noise: &NoiseConfig,
    t_end: f64,
    integ: &IntegratorConfig,
) -> Result<ErrorEnvelope> {
    if noise.n_realizations < 2 {
        return Err(Error::InvalidParameter {
            name: "n_realizations",
            constraint: "n_realizations >= 2",
        });
    }
    let times = uniform_grid(params.period(), t_end)?;
    let runs = (0..noise.n_realizations as u64)
        .map(|r| run_perturbed(q0, p0, params, noise, r, t_end, integ));
    ErrorEnvelope::from_runs(noise.epsilon, times, runs)
}

/// Design orbit, the moments it was designed for, and two mismatched copies.
struct MismatchSystem {
    params: Params,
}

impl OdeSystem for MismatchSystem {
    type State = (Reduced, (Moments, (Moments, Moments)));

    #[inline]
    fn rhs(&self, t: f64, y: &Self::State) -> Result<Self::State> {
        let (theory, (design, (single, double))) = y;
        let agents = protocols(theory[0], theory[1], t, &self.params)?;
        Ok((
            rhs_reduced_raw(theory[0], theory[1], t, &self.params)?,
            (
                rhs_full(design, &agents, &self.params),
                (
                    rhs_full(single, &agents, &self.params),
                    rhs_full(double, &agents, &self.params),
                ),
            ),
        ))
    }

    fn within_guard(&self, y: &Self::State, guard: f64) -> bool {
        guard_ratio(y.0[0], &self.params) < guard
    }
}

/// Constraint error caused by protocols designed for the wrong initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct IcErrorExperiment {
    pub delta: f64,
    pub times: Vec<f64>,
    /// Error of the run started at `(q0 + delta, p0 + delta)`.
    pub error: Vec<f64>,
    /// Error of the run started at `(q0 + 2 delta, p0 + 2 delta)`.
    pub error_double: Vec<f64>,
    /// `error_double / error` pointwise (NaN where both vanish).
    pub ratio: Vec<f64>,
    pub status: Termination,
}

/// Protocols for `(q0, p0)` applied to pure states displaced by `delta` and `2 delta`.
///
/// The error is measured against a copy of the moment system started at the
/// design point, so `delta = 0` yields an identically zero error.
pub fn ic_error_experiment(
    q0: f64,
    p0: f64,
    delta: f64,
    params: &Params,
    t_end: f64,
    integ: &IntegratorConfig,
) -> Result<IcErrorExperiment> {
    let times = uniform_grid(params.period(), t_end)?;
    ic_error_on_grid(q0, p0, delta, params, &times, integ)
}

/// As [`ic_error_experiment`], sampled at the given monotone `times` from 0.
pub fn ic_error_on_grid(
    q0: f64,
    p0: f64,
    delta: f64,
    params: &Params,
    times: &[f64],
    integ: &IntegratorConfig,
) -> Result<IcErrorExperiment> {
    params.validate()?;
    let design = initial_moments(q0, p0, params)?;
    let single = initial_moments(q0 + delta, p0 + delta, params)?;
    let double = initial_moments(q0 + 2.0 * delta, p0 + 2.0 * delta, params)?;
    let sys = MismatchSystem { params: *params };
    let y0 = (
        [q0, p0],
        (design.as_array(), (single.as_array(), double.as_array())),
    );
    let mut error = Vec::with_capacity(times.len());
    let mut error_double = Vec::with_capacity(times.len());
    let mut solver = Solver::new(&sys, 0.0, y0, *integ)?;
    let status = sample_solver(&mut solver, times, |_, y| {
        let (_, (d, (s, w))) = y;
        error.push(s[2] - d[2]);
        error_double.push(w[2] - d[2]);
    })?;
    let ratio = error
        .iter()
        .zip(&error_double)
        .map(|(a, b)| b / a)
        .collect();
    Ok(IcErrorExperiment {
        delta,
        times: times[..error.len()].to_vec(),
        error,
        error_double,
        ratio,
        status,
    })
}
