use super::{linear_fit, uniform_grid, LinearFit, NoiseConfig, SignalRole, MAX_FAILED_FRACTION};
use crate::dynamics::rhs_reduced_raw;
use crate::error::{Error, Result};
use crate::integrator::{integrate_on_grid, IntegratorConfig, OdeSystem};
use crate::model::Params;
use alloc::vec::Vec;

/// Source orbit augmented with the running integral of `<q>`.
struct IntegratedSource {
    params: Params,
}

impl OdeSystem for IntegratedSource {
    type State = [f64; 3];

    #[inline]
    fn rhs(&self, t: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        let [dq, dp] = rhs_reduced_raw(y[0], y[1], t, &self.params)?;
        Ok([dq, dp, y[0]])
    }

    fn within_guard(&self, y: &[f64; 3], guard: f64) -> bool {
        (y[0] / libm::sqrt(self.params.lambda)).abs() < guard
    }
}

/// `<q>(t)` and `int_0^t <q> ds` of one source orbit on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceIntegral {
    pub realization: u64,
    pub q: Vec<f64>,
    pub integral: Vec<f64>,
    pub regenerations: u32,
}

impl SourceIntegral {
    /// Running time average `integral / t`; the first entry is `<q>(0)`.
    pub fn running_average(&self, times: &[f64]) -> Vec<f64> {
        times
            .iter()
            .zip(&self.integral)
            .zip(&self.q)
            .map(|((&t, &i), &q)| if t > 0.0 { i / t } else { q })
            .collect()
    }
}

/// Integrates one source orbit on `times`, redrawing its initial condition on a guard hit.
pub fn source_integral(
    noise: &NoiseConfig,
    realization: u64,
    times: &[f64],
    integ: &IntegratorConfig,
) -> Result<SourceIntegral> {
    noise.validate()?;
    let sys = IntegratedSource {
        params: noise.source_params,
    };
    let mut last_t = 0.0;
    for attempt in 0..=noise.max_regenerations {
        let (q0, p0) = noise.source_ic(realization, SignalRole::Field, attempt);
        let traj = integrate_on_grid(&sys, 0.0, [q0, p0, 0.0], times, integ)?;
        match traj.status.into_result() {
            Ok(()) => {
                return Ok(SourceIntegral {
                    realization,
                    q: traj.samples.iter().map(|(_, y)| y[0]).collect(),
                    integral: traj.samples.iter().map(|(_, y)| y[2]).collect(),
                    regenerations: attempt,
                })
            }
            Err(Error::GuardHit { t }) => last_t = t,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GuardHit { t: last_t })
}

/// Ensemble statistics of the integrated source signal.
#[derive(Debug, Clone, PartialEq)]
pub struct QStatistics {
    pub times: Vec<f64>,
    pub realizations: Vec<SourceIntegral>,
    /// Cross-realization sample variance of the integral.
    pub variance: Vec<f64>,
    /// Straight-line fit of `variance` against `t`.
    pub variance_fit: LinearFit,
    pub excluded: usize,
}

impl QStatistics {
    pub fn from_realizations<I>(times: Vec<f64>, outcomes: I) -> Result<Self>
    where
        I: IntoIterator<Item = Result<SourceIntegral>>,
    {
        let mut realizations = Vec::new();
        let mut excluded = 0;
        for outcome in outcomes {
            match outcome {
                Ok(r) => realizations.push(r),
                Err(e) if e.is_numerical() => excluded += 1,
                Err(e) => return Err(e),
            }
        }
        let total = realizations.len() + excluded;
        if realizations.len() < 2 || excluded as f64 > MAX_FAILED_FRACTION * total as f64 {
            return Err(Error::TooManyFailures {
                failed: excluded,
                total,
            });
        }
        let n = realizations.len() as f64;
        let variance: Vec<f64> = (0..times.len())
            .map(|k| {
                let mean = realizations.iter().map(|r| r.integral[k]).sum::<f64>() / n;
                realizations
                    .iter()
                    .map(|r| (r.integral[k] - mean) * (r.integral[k] - mean))
                    .sum::<f64>()
                    / (n - 1.0)
            })
            .collect();
        let variance_fit = linear_fit(&times, &variance)?;
        Ok(QStatistics {
            times,
            realizations,
            variance,
            variance_fit,
            excluded,
        })
    }

    /// Largest `|running average|` across realizations at the final time.
    pub fn final_mean_bound(&self) -> f64 {
        self.realizations
            .iter()
            .filter_map(|r| r.running_average(&self.times).last().copied())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Source-orbit statistics over `noise.n_realizations` orbits, sampled once per source period.
pub fn integrated_q_statistics(
    noise: &NoiseConfig,
    t_end: f64,
    integ: &IntegratorConfig,
) -> Result<QStatistics> {
    if noise.n_realizations < 10 {
        return Err(Error::InvalidParameter {
            name: "n_realizations",
            constraint: "n_realizations >= 10",
        });
    }
    let times = uniform_grid(noise.source_params.period(), t_end)?;
    let outcomes: Vec<_> = (0..noise.n_realizations as u64)
        .map(|r| source_integral(noise, r, &times, integ))
        .collect();
    QStatistics::from_realizations(times, outcomes)
}
