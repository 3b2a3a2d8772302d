//! Largest Lyapunov exponent by two-trajectory renormalization.
//!
//! A fiducial orbit and a companion displaced by `d0` are integrated in
//! lockstep. After every renormalization interval the separation `d` is
//! measured, `ln(d / d0)` is accumulated, and the companion is pulled back
//! to distance `d0` along the current separation direction.

use super::order::TimeAverage;
use super::ClassifierConfig;
use crate::error::{Error, Result};
use crate::integrator::{IntegratorConfig, ReducedPair, Solver};
use crate::model::Params;
use alloc::vec::Vec;
use libm::{log, sqrt};

/// Exponent estimate together with the order parameter of the fiducial orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    /// Largest exponent per unit time.
    pub exponent: f64,
    /// Time average of the fiducial `<q>` over the measurement window.
    pub qbar: f64,
    /// False when the running estimate still drifts over the last half window.
    pub converged: bool,
}

/// Relative spread of the running average that marks an estimate as unconverged.
const CONVERGENCE_SPREAD: f64 = 0.2;

pub fn lyapunov_max(
    params: &Params,
    ic: (f64, f64),
    config: &ClassifierConfig,
    integ: &IntegratorConfig,
) -> Result<LyapunovEstimate> {
    config.validate()?;
    params.validate()?;
    let sys = ReducedPair { params: *params };
    let d0 = config.perturbation_size;
    let offset = d0 / core::f64::consts::SQRT_2;
    let fiducial = [ic.0, ic.1];
    let companion = [ic.0 + offset, ic.1 + offset];

    let interval = config.renorm_interval as f64 * params.period();
    let transient_renorms = config.transient_periods / config.renorm_interval;
    let measure_renorms = config.measure_periods / config.renorm_interval;
    let t_measure = transient_renorms as f64 * interval;

    let mut solver = Solver::new(&sys, 0.0, (fiducial, companion), *integ)?;
    let mut avg = TimeAverage::new(t_measure);
    avg.push(0.0, ic.0);
    let mut log_sum = 0.0;
    let mut running = Vec::with_capacity(measure_renorms);

    for k in 1..=(transient_renorms + measure_renorms) {
        let t_k = k as f64 * interval;
        solver.advance_to(t_k, |s| avg.push(s.t(), s.state().0[0]))?;
        let (a, b) = *solver.state();
        let dq = b[0] - a[0];
        let dp = b[1] - a[1];
        let d = sqrt(dq * dq + dp * dp);
        if k > transient_renorms {
            log_sum += log(d / d0);
            let elapsed = (k - transient_renorms) as f64 * interval;
            running.push(log_sum / elapsed);
        }
        let scale = if d > 0.0 { d0 / d } else { 0.0 };
        let rescaled = if d > 0.0 {
            [a[0] + scale * dq, a[1] + scale * dp]
        } else {
            [a[0] + offset, a[1] + offset]
        };
        solver.reset(t_k, (a, rescaled))?;
    }

    let exponent = *running.last().ok_or(Error::InsufficientData {
        needed: interval,
        got: 0.0,
    })?;
    let qbar = avg.mean().ok_or(Error::InsufficientData {
        needed: interval,
        got: 0.0,
    })?;
    let tail = &running[running.len() / 2..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let scale = exponent.abs().max(config.lyapunov_threshold);
    Ok(LyapunovEstimate {
        exponent,
        qbar,
        converged: hi - lo <= CONVERGENCE_SPREAD * scale,
    })
}
