//! Right-hand sides of the reduced and full moment systems, the closed-form
//! work protocols and the quantities conserved by the undriven flow.
//!
//! The protocols keep the state on the surface `<q^2> = lambda`, `Z = 0`.
//! On that surface the purity fixes `<p^2>` as a function of `(<q>, <p>)`,
//! which closes the first-moment equations into a nonlinear planar system.

use crate::error::{Error, Result};
use crate::model::{
    DerivedQuantities, MomentState, Params, ProtocolSample, ReducedState, SINGULAR_GUARD,
};
use libm::{sin, sqrt};

/// Relative slack on the Heisenberg bound `|sigma| >= 1/4`.
const HEISENBERG_SLACK: f64 = 1e-10;

fn check_regular(q: f64, params: &Params) -> Result<()> {
    let s = q / sqrt(params.lambda);
    if !(s.abs() < SINGULAR_GUARD) {
        return Err(Error::Singular { q });
    }
    Ok(())
}

/// Purity `1 / (2 sqrt|sigma|)` of the Gaussian state with these moments.
pub fn purity_from_moments(s: &MomentState) -> Result<f64> {
    let var_q = s.q2 - s.q * s.q;
    let det = s.covariance_determinant();
    if !(var_q > 0.0) || !(det >= 0.25 * (1.0 - HEISENBERG_SLACK)) {
        return Err(Error::UnphysicalMoments { determinant: det });
    }
    Ok(0.5 / sqrt(det))
}

/// `<p^2>` fixed by the purity on the constraint surface.
pub fn p2_from_purity(q: f64, p: f64, params: &Params) -> Result<f64> {
    check_regular(q, params)?;
    let purity = params.purity;
    let lambda = params.lambda;
    Ok((0.25 / (purity * purity) + lambda * p * p) / (lambda - q * q))
}

/// Field agent `B_t = kappa (<q> + h sin(omega t))`.
pub fn protocol_b(q: f64, t: f64, params: &Params) -> f64 {
    params.kappa * (q + params.h * sin(params.omega * t))
}

/// Stiffness agent solving `dZ/dt = 0`, i.e. `mu_t = (B_t <q> + <p^2>/m) / lambda`.
pub fn protocol_mu(q: f64, p: f64, t: f64, params: &Params) -> Result<f64> {
    let p2 = p2_from_purity(q, p, params)?;
    let b = protocol_b(q, t, params);
    Ok((b * q + p2 / params.m) / params.lambda)
}

/// Both agents prescribed by the closed-form protocols.
pub fn protocols(q: f64, p: f64, t: f64, params: &Params) -> Result<ProtocolSample> {
    Ok(ProtocolSample {
        b: protocol_b(q, t, params),
        mu: protocol_mu(q, p, t, params)?,
        t,
    })
}

/// Time derivative of `(<q>, <p>)` on the constraint surface.
pub fn rhs_reduced(s: &ReducedState, params: &Params) -> Result<[f64; 2]> {
    rhs_reduced_raw(s.q, s.p, s.t, params)
}

#[inline]
pub(crate) fn rhs_reduced_raw(q: f64, p: f64, t: f64, params: &Params) -> Result<[f64; 2]> {
    check_regular(q, params)?;
    let lambda = params.lambda;
    let purity = params.purity;
    let b = params.kappa * (q + params.h * sin(params.omega * t));
    let gap = lambda - q * q;
    let p2 = (0.25 / (purity * purity) + lambda * p * p) / gap;
    let dp = b * gap / lambda - q * p2 / (params.m * lambda);
    Ok([p / params.m, dp])
}

/// Raw linear moment flow `(q, p, q2, p2, z)` under arbitrary agents.
pub fn rhs_full(y: &[f64; 5], agents: &ProtocolSample, params: &Params) -> [f64; 5] {
    let [q, p, q2, p2, z] = *y;
    let m = params.m;
    let ProtocolSample { b, mu, .. } = *agents;
    [
        p / m,
        b - mu * q,
        2.0 * z / m,
        2.0 * b * p - 2.0 * mu * z,
        b * q + p2 / m - mu * q2,
    ]
}

/// `Omega = <p^2>/m - kappa <q>^2`.
pub fn omega_invariant(q: f64, p2: f64, params: &Params) -> f64 {
    p2 / params.m - params.kappa * q * q
}

/// Residual of `m (Omega + kappa q^2)(lambda - q^2) - lambda p^2 = 1/(4 P^2)`.
pub fn orbit_residual(q: f64, p: f64, omega_inv: f64, params: &Params) -> f64 {
    let purity = params.purity;
    params.m * (omega_inv + params.kappa * q * q) * (params.lambda - q * q)
        - params.lambda * p * p
        - 0.25 / (purity * purity)
}

/// Critical purity `1 / (2 sqrt m)` (at `kappa = lambda = 1`).
pub fn critical_purity(m: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "m",
            constraint: "m > 0",
        });
    }
    Ok(0.5 / sqrt(m))
}

/// `Omega` on the orbit through the origin, `1 / (4 m P^2)`.
pub fn homoclinic_omega(m: f64, purity: f64) -> f64 {
    0.25 / (m * purity * purity)
}

/// Whether the undriven flow has a homoclinic orbit (and asymmetric orbits),
/// i.e. `1 / (4 m P^2) < 1`, equivalently `P > 1 / (2 sqrt m)`.
pub fn homoclinic_exists(m: f64, purity: f64) -> Result<bool> {
    critical_purity(m)?;
    Ok(homoclinic_omega(m, purity) < 1.0)
}

/// Constraint-compatible initial moments for `(<q>_0, <p>_0)`.
pub fn initial_moments(q0: f64, p0: f64, params: &Params) -> Result<MomentState> {
    let p2 = p2_from_purity(q0, p0, params)?;
    Ok(MomentState {
        q: q0,
        p: p0,
        q2: params.lambda,
        p2,
        z: 0.0,
        t: 0.0,
    })
}

/// Conserved and derived quantities of a moment state.
///
/// The orbit residual uses the state's own `Omega`, so it tests the purity
/// relation rather than conservation; compare `omega_inv` across time for that.
pub fn derived_quantities(s: &MomentState, params: &Params) -> Result<DerivedQuantities> {
    let omega_inv = omega_invariant(s.q, s.p2, params);
    Ok(DerivedQuantities {
        omega_inv,
        purity_val: purity_from_moments(s)?,
        orbit_residual: orbit_residual(s.q, s.p, omega_inv, params),
        p_c: critical_purity(params.m)?,
    })
}
