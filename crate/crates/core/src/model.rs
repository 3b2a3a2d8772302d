//! Domain types shared by every dynamical routine.

use crate::error::{Error, Result};

/// `|<q>|` beyond which any `1 - q^2` denominator is rejected.
pub const SINGULAR_GUARD: f64 = 1.0 - 1e-9;

/// Physical and drive parameters of the constrained oscillator (`hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Oscillator mass.
    pub m: f64,
    /// Drive amplitude added to the field protocol.
    pub h: f64,
    /// Drive angular frequency.
    pub omega: f64,
    /// Energy scale of the field protocol.
    pub kappa: f64,
    /// Value the constraint pins `<q^2>` to.
    pub lambda: f64,
    /// Purity `tr(rho^2)` of the Gaussian state.
    pub purity: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            m: 1.0,
            h: 0.0,
            omega: 1.0,
            kappa: 1.0,
            lambda: 1.0,
            purity: 1.0,
        }
    }
}

impl Params {
    /// Parameters with `kappa = lambda = 1`, validated.
    pub fn new(m: f64, h: f64, omega: f64, purity: f64) -> Result<Self> {
        let p = Params {
            m,
            h,
            omega,
            purity,
            ..Params::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_h(self, h: f64) -> Self {
        Params { h, ..self }
    }

    pub fn with_m(self, m: f64) -> Self {
        Params { m, ..self }
    }

    pub fn with_purity(self, purity: f64) -> Self {
        Params { purity, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &'static str, &'static str); 6] = [
            (self.m > 0.0 && self.m.is_finite(), "m", "m > 0"),
            (self.h >= 0.0 && self.h.is_finite(), "h", "h >= 0"),
            (
                self.omega > 0.0 && self.omega.is_finite(),
                "omega",
                "omega > 0",
            ),
            (self.kappa.is_finite(), "kappa", "finite kappa"),
            (
                self.lambda > 0.0 && self.lambda.is_finite(),
                "lambda",
                "lambda > 0",
            ),
            (
                self.purity > 0.0 && self.purity <= 1.0,
                "purity",
                "0 < purity <= 1",
            ),
        ];
        for (ok, name, constraint) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, constraint });
            }
        }
        Ok(())
    }

    /// Drive period `2 pi / omega`.
    pub fn period(&self) -> f64 {
        core::f64::consts::TAU / self.omega
    }
}

/// State `(<q>, <p>)` of the effective two-dimensional system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub q: f64,
    pub p: f64,
    pub t: f64,
}

impl ReducedState {
    pub fn new(q: f64, p: f64, t: f64) -> Self {
        ReducedState { q, p, t }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.q, self.p]
    }

    pub fn from_array(y: [f64; 2], t: f64) -> Self {
        ReducedState {
            q: y[0],
            p: y[1],
            t,
        }
    }
}

/// First and second moments of the full linear Gaussian system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub q: f64,
    pub p: f64,
    pub q2: f64,
    pub p2: f64,
    /// Symmetrized correlation `<qp + pq> / 2`.
    pub z: f64,
    pub t: f64,
}

impl MomentState {
    pub fn as_array(&self) -> [f64; 5] {
        [self.q, self.p, self.q2, self.p2, self.z]
    }

    pub fn from_array(y: [f64; 5], t: f64) -> Self {
        MomentState {
            q: y[0],
            p: y[1],
            q2: y[2],
            p2: y[3],
            z: y[4],
            t,
        }
    }

    /// Determinant of the covariance matrix of `(q, p)`.
    pub fn covariance_determinant(&self) -> f64 {
        let var_q = self.q2 - self.q * self.q;
        let var_p = self.p2 - self.p * self.p;
        let cov = self.z - self.q * self.p;
        var_q * var_p - cov * cov
    }

    pub fn reduced(&self) -> ReducedState {
        ReducedState::new(self.q, self.p, self.t)
    }
}

/// Values of the two work agents at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSample {
    /// Linear field agent `B_t`.
    pub b: f64,
    /// Stiffness agent `mu_t`.
    pub mu: f64,
    pub t: f64,
}

impl ProtocolSample {
    pub fn is_finite(&self) -> bool {
        self.b.is_finite() && self.mu.is_finite()
    }
}

/// Conserved and derived quantities evaluated on one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// `<p^2>/m - <q>^2`, conserved for `h = 0`.
    pub omega_inv: f64,
    /// Purity computed from the moments.
    pub purity_val: f64,
    /// Left minus right side of the undriven orbit equation.
    pub orbit_residual: f64,
    /// Critical purity `1 / (2 sqrt m)`.
    pub p_c: f64,
}
