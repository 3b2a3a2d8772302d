//! Dormand-Prince 5(4) pair with PI step control and 4th order dense output.

use super::{IntegratorConfig, OdeSystem};
use crate::error::{Error, Result};
use crate::vector::Vector;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment<V> {
    pub t0: f64,
    pub h: f64,
    coeffs: [V; 5],
}

impl<V: Vector> DenseSegment<V> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t`, nominally inside `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> V {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        // r1 + theta (r2 + theta1 (r3 + theta (r4 + theta1 r5)))
        let inner = r4.axpy(theta1, r5);
        let inner = r3.axpy(theta, &inner);
        let inner = r2.axpy(theta1, &inner);
        r1.axpy(theta, &inner)
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 {
            (self.t0, self.t0 + self.h)
        } else {
            (self.t0 + self.h, self.t0)
        };
        t >= lo && t <= hi
    }
}

/// Stateful adaptive solver; advances one accepted step at a time.
#[derive(Debug)]
pub struct Solver<'a, S: OdeSystem> {
    sys: &'a S,
    cfg: IntegratorConfig,
    t: f64,
    y: S::State,
    f: S::State,
    h: f64,
    facold: f64,
    rejected_last: bool,
    evaluations: usize,
    steps: usize,
    dense: Option<DenseSegment<S::State>>,
}

impl<'a, S: OdeSystem> Solver<'a, S> {
    /// Fails with `GuardHit` when `y0` already violates the guard.
    pub fn new(sys: &'a S, t0: f64, y0: S::State, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if !y0.all_finite() || !sys.within_guard(&y0, cfg.guard) {
            return Err(Error::GuardHit { t: t0 });
        }
        let f = sys.rhs(t0, &y0).map_err(|_| Error::GuardHit { t: t0 })?;
        Ok(Solver {
            sys,
            cfg,
            t: t0,
            y: y0,
            f,
            h: cfg.dt_init,
            facold: 1e-4,
            rejected_last: false,
            evaluations: 1,
            steps: 0,
            dense: None,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &S::State {
        &self.y
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Dense segment of the most recent accepted step.
    pub fn last_segment(&self) -> Option<&DenseSegment<S::State>> {
        self.dense.as_ref()
    }

    /// Replaces the current state, e.g. after a renormalization; keeps the step size.
    pub fn reset(&mut self, t: f64, y: S::State) -> Result<()> {
        if !y.all_finite() || !self.sys.within_guard(&y, self.cfg.guard) {
            return Err(Error::GuardHit { t });
        }
        self.f = self.sys.rhs(t, &y).map_err(|_| Error::GuardHit { t })?;
        self.evaluations += 1;
        self.t = t;
        self.y = y;
        self.dense = None;
        Ok(())
    }

    /// Takes one accepted step toward `t_bound` without passing it.
    pub fn step(&mut self, t_bound: f64) -> Result<()> {
        let span = t_bound - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let dir = if span > 0.0 { 1.0 } else { -1.0 };
        let cfg = self.cfg;
        let mut h_abs = self.h.abs().min(cfg.dt_max);
        loop {
            if self.steps >= cfg.max_steps {
                return Err(Error::StepLimit { t: self.t });
            }
            self.steps += 1;
            let mut last = false;
            if h_abs >= span.abs() {
                h_abs = span.abs();
                last = true;
            }
            let h = dir * h_abs;
            match self.attempt(h) {
                Attempt::Failed => {
                    h_abs *= 0.25;
                    self.rejected_last = true;
                    if h_abs < cfg.dt_min {
                        return Err(Error::GuardHit { t: self.t });
                    }
                }
                Attempt::Rejected { err } => {
                    let fac11 = libm::pow(err, EXPO);
                    h_abs /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
                    self.rejected_last = true;
                    if h_abs < cfg.dt_min {
                        return Err(Error::StepLimit { t: self.t });
                    }
                }
                Attempt::Accepted {
                    err,
                    y_new,
                    f_new,
                    segment,
                } => {
                    let fac11 = libm::pow(err, EXPO);
                    let fac = fac11 / libm::pow(self.facold, BETA);
                    let fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFETY));
                    let mut h_new = h_abs / fac;
                    if self.rejected_last {
                        h_new = h_new.min(h_abs);
                    }
                    self.facold = err.max(1e-4);
                    self.rejected_last = false;
                    let t_new = if last { t_bound } else { self.t + h };
                    self.t = t_new;
                    self.y = y_new;
                    self.f = f_new;
                    self.dense = Some(segment);
                    // a truncated final step says nothing about the natural step size
                    if !last || h_new > self.h.abs() {
                        self.h = h_new.clamp(cfg.dt_min, cfg.dt_max);
                    }
                    if !self.sys.within_guard(&self.y, cfg.guard) {
                        return Err(Error::GuardHit { t: t_new });
                    }
                    return Ok(());
                }
            }
        }
    }

    /// Steps until exactly `t_end`, calling `on_step` after every accepted step.
    pub fn advance_to<F>(&mut self, t_end: f64, mut on_step: F) -> Result<()>
    where
        F: FnMut(&Self),
    {
        while self.t != t_end {
            self.step(t_end)?;
            on_step(self);
        }
        Ok(())
    }

    fn attempt(&mut self, h: f64) -> Attempt<S::State> {
        let sys = self.sys;
        let (t, y, k1) = (self.t, self.y, self.f);
        macro_rules! eval {
            ($tt:expr, $yy:expr) => {{
                let yy = $yy;
                self.evaluations += 1;
                match sys.rhs($tt, &yy) {
                    Ok(k) if k.all_finite() => k,
                    _ => return Attempt::Failed,
                }
            }};
        }
        let k2 = eval!(t + C2 * h, y.axpy(h * A21, &k1));
        let k3 = eval!(t + C3 * h, y.axpy(h * A31, &k1).axpy(h * A32, &k2));
        let k4 = eval!(
            t + C4 * h,
            y.axpy(h * A41, &k1).axpy(h * A42, &k2).axpy(h * A43, &k3)
        );
        let k5 = eval!(
            t + C5 * h,
            y.axpy(h * A51, &k1)
                .axpy(h * A52, &k2)
                .axpy(h * A53, &k3)
                .axpy(h * A54, &k4)
        );
        let k6 = eval!(
            t + h,
            y.axpy(h * A61, &k1)
                .axpy(h * A62, &k2)
                .axpy(h * A63, &k3)
                .axpy(h * A64, &k4)
                .axpy(h * A65, &k5)
        );
        let y_new = y
            .axpy(h * A71, &k1)
            .axpy(h * A73, &k3)
            .axpy(h * A74, &k4)
            .axpy(h * A75, &k5)
            .axpy(h * A76, &k6);
        if !y_new.all_finite() {
            return Attempt::Failed;
        }
        let k7 = eval!(t + h, y_new);
        let err_vec = S::State::zeroed()
            .axpy(h * E1, &k1)
            .axpy(h * E3, &k3)
            .axpy(h * E4, &k4)
            .axpy(h * E5, &k5)
            .axpy(h * E6, &k6)
            .axpy(h * E7, &k7);
        let mut acc = (0.0, 0usize);
        err_vec.accumulate_error(&y, &y_new, self.cfg.rel_tol, self.cfg.abs_tol, &mut acc);
        let err = if acc.1 == 0 {
            0.0
        } else {
            libm::sqrt(acc.0 / acc.1 as f64)
        };
        if !err.is_finite() {
            return Attempt::Failed;
        }
        if err > 1.0 {
            return Attempt::Rejected { err };
        }
        let r1 = y;
        let r2 = y_new.axpy(-1.0, &y);
        let r3 = S::State::zeroed().axpy(h, &k1).axpy(-1.0, &r2);
        let r4 = r2.axpy(-h, &k7).axpy(-1.0, &r3);
        let r5 = S::State::zeroed()
            .axpy(h * D1, &k1)
            .axpy(h * D3, &k3)
            .axpy(h * D4, &k4)
            .axpy(h * D5, &k5)
            .axpy(h * D6, &k6)
            .axpy(h * D7, &k7);
        Attempt::Accepted {
            err,
            y_new,
            f_new: k7,
            segment: DenseSegment {
                t0: t,
                h,
                coeffs: [r1, r2, r3, r4, r5],
            },
        }
    }
}

enum Attempt<V> {
    Failed,
    Rejected {
        err: f64,
    },
    Accepted {
        err: f64,
        y_new: V,
        f_new: V,
        segment: DenseSegment<V>,
    },
}
