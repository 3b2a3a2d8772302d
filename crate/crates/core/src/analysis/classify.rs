use super::{lyapunov_max, ClassifierConfig};
use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::{Params, SINGULAR_GUARD};
use alloc::vec::Vec;

/// Dynamical phase of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Symmetric,
    BrokenSymmetry,
    Chaotic,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Symmetric => "symmetric",
            Phase::BrokenSymmetry => "broken",
            Phase::Chaotic => "chaotic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "symmetric" => Some(Phase::Symmetric),
            "broken" => Some(Phase::BrokenSymmetry),
            "chaotic" => Some(Phase::Chaotic),
            _ => None,
        }
    }
}

/// Phase together with the diagnostics it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLabel {
    pub phase: Phase,
    pub qbar: f64,
    pub lyapunov: f64,
    pub converged: bool,
}

impl PhaseLabel {
    /// Threshold rule: chaotic if the exponent exceeds its threshold, broken
    /// symmetry if `|q-bar|` exceeds its threshold, symmetric otherwise.
    pub fn from_diagnostics(qbar: f64, lyapunov: f64, config: &ClassifierConfig) -> Phase {
        if lyapunov > config.lyapunov_threshold {
            Phase::Chaotic
        } else if qbar.abs() > config.qbar_threshold {
            Phase::BrokenSymmetry
        } else {
            Phase::Symmetric
        }
    }
}

/// Classifies the orbit starting at `ic`.
pub fn classify_phase(
    params: &Params,
    ic: (f64, f64),
    config: &ClassifierConfig,
    integ: &IntegratorConfig,
) -> Result<PhaseLabel> {
    let est = lyapunov_max(params, ic, config, integ)?;
    Ok(PhaseLabel {
        phase: PhaseLabel::from_diagnostics(est.qbar, est.exponent, config),
        qbar: est.qbar,
        lyapunov: est.exponent,
        converged: est.converged,
    })
}

/// Regular grid of initial conditions `(q0, p0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub q_min: f64,
    pub q_max: f64,
    pub nq: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.nq < 2 || self.np < 2 {
            return Err(Error::InvalidParameter {
                name: "grid",
                constraint: "at least 2 points per axis",
            });
        }
        if !(self.q_min < self.q_max && self.p_min < self.p_max) {
            return Err(Error::InvalidParameter {
                name: "grid",
                constraint: "min < max on both axes",
            });
        }
        if !(self.q_min.abs().max(self.q_max.abs()) < SINGULAR_GUARD) {
            return Err(Error::InvalidParameter {
                name: "grid",
                constraint: "|q0| < 1 on every grid point",
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point of cell `idx` in row-major order (`p0` rows, `q0` columns).
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (row, col) = (idx / self.nq, idx % self.nq);
        let q = self.q_min + (self.q_max - self.q_min) * col as f64 / (self.nq - 1) as f64;
        let p = self.p_min + (self.p_max - self.p_min) * row as f64 / (self.np - 1) as f64;
        (q, p)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// One classified grid cell; failures are kept in place.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub q0: f64,
    pub p0: f64,
    pub outcome: Result<PhaseLabel>,
}

#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub params: Params,
    pub grid: Grid,
    pub cells: Vec<GridCell>,
}

impl PhaseDiagram {
    /// Assembles a diagram from per-cell outcomes given in cell order.
    pub fn from_outcomes(params: Params, grid: Grid, outcomes: Vec<Result<PhaseLabel>>) -> Self {
        let cells = outcomes
            .into_iter()
            .enumerate()
            .map(|(i, outcome)| {
                let (q0, p0) = grid.point(i);
                GridCell { q0, p0, outcome }
            })
            .collect();
        PhaseDiagram {
            params,
            grid,
            cells,
        }
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(&c.outcome, Ok(l) if l.phase == phase))
            .count()
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }
}

/// Classifies every grid cell independently, in cell order.
pub fn phase_diagram(
    params: &Params,
    grid: &Grid,
    config: &ClassifierConfig,
    integ: &IntegratorConfig,
) -> Result<PhaseDiagram> {
    grid.validate()?;
    config.validate()?;
    params.validate()?;
    let outcomes = grid
        .points()
        .map(|ic| classify_phase(params, ic, config, integ))
        .collect();
    Ok(PhaseDiagram::from_outcomes(*params, *grid, outcomes))
}
