use crate::error::{Error, Result};
use libm::{exp, log, sqrt};

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub n: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(Error::FitWindow {
            reason: "fewer than 3 points",
        });
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys).take(n) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::FitWindow {
            reason: "degenerate abscissae",
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_stderr = sqrt(sse / (nf - 2.0) / sxx);
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
        n,
    })
}

/// `value ~ prefactor * t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub prefactor: f64,
    pub n: usize,
}

/// Log-log least squares over the samples with `t >= t_min`.
pub fn fit_power_law(times: &[f64], values: &[f64], t_min: f64) -> Result<PowerLawFit> {
    let mut xs = alloc::vec::Vec::new();
    let mut ys = alloc::vec::Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < t_min {
            continue;
        }
        if !(v > 0.0) || !(t > 0.0) {
            return Err(Error::FitWindow {
                reason: "non-positive value in fit window",
            });
        }
        xs.push(log(t));
        ys.push(log(v));
    }
    let fit = linear_fit(&xs, &ys)?;
    Ok(PowerLawFit {
        exponent: fit.slope,
        exponent_stderr: fit.slope_stderr,
        prefactor: exp(fit.intercept),
        n: fit.n,
    })
}
