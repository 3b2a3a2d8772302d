//! Time averages of `<q>`, the dynamical order parameter.

use crate::error::{Error, Result};

/// Streaming trapezoidal time average over `[start, inf)`.
#[derive(Debug, Clone, Copy)]
pub struct TimeAverage {
    start: f64,
    prev: Option<(f64, f64)>,
    integral: f64,
    covered: f64,
}

impl TimeAverage {
    pub fn new(start: f64) -> Self {
        TimeAverage {
            start,
            prev: None,
            integral: 0.0,
            covered: 0.0,
        }
    }

    /// Adds the sample `x(t)`; samples must arrive in increasing `t`.
    pub fn push(&mut self, t: f64, x: f64) {
        if let Some((t0, x0)) = self.prev {
            if t > self.start {
                let (ta, xa) = if t0 >= self.start {
                    (t0, x0)
                } else {
                    let w = (self.start - t0) / (t - t0);
                    (self.start, x0 + w * (x - x0))
                };
                self.integral += 0.5 * (t - ta) * (xa + x);
                self.covered += t - ta;
            }
        }
        self.prev = Some((t, x));
    }

    /// Length of the averaged window so far.
    pub fn covered(&self) -> f64 {
        self.covered
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn mean(&self) -> Option<f64> {
        (self.covered > 0.0).then(|| self.integral / self.covered)
    }
}

/// `q-bar`: time average of `<q>` after discarding everything before `window_start`.
///
/// Fails when the remaining window is shorter than `min_window`.
pub fn order_parameter(
    samples: &[(f64, [f64; 2])],
    window_start: f64,
    min_window: f64,
) -> Result<f64> {
    let mut avg = TimeAverage::new(window_start);
    for (t, y) in samples {
        avg.push(*t, y[0]);
    }
    match avg.mean() {
        Some(mean) if avg.covered() >= min_window * (1.0 - 1e-12) => Ok(mean),
        _ => Err(Error::InsufficientData {
            needed: min_window,
            got: avg.covered(),
        }),
    }
}
