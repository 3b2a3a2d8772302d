//! Poincare sections, Lyapunov exponents, the order parameter, phase
//! classification and the undriven separatrix.

mod classify;
mod lyapunov;
mod order;
mod poincare;
mod separatrix;

pub use classify::{
    classify_phase, phase_diagram, Grid, GridCell, Phase, PhaseDiagram, PhaseLabel,
};
pub use lyapunov::{lyapunov_max, LyapunovEstimate};
pub use order::{order_parameter, TimeAverage};
pub use poincare::{
    poincare_gallery, poincare_section, GalleryEntry, PoincareSection, ROUTE_TO_CHAOS_SCAN,
};
pub use separatrix::separatrix;

use crate::error::{Error, Result};

/// Windows and thresholds of the phase classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Drive periods discarded before any statistic.
    pub transient_periods: usize,
    /// Drive periods over which the exponent and `q-bar` are measured.
    pub measure_periods: usize,
    /// Exponents strictly above this are chaotic.
    pub lyapunov_threshold: f64,
    /// `|q-bar|` strictly above this breaks the symmetry.
    pub qbar_threshold: f64,
    /// Drive periods between renormalizations.
    pub renorm_interval: usize,
    /// Initial separation of the companion orbit.
    pub perturbation_size: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            transient_periods: 200,
            measure_periods: 2000,
            lyapunov_threshold: 0.01,
            qbar_threshold: 0.05,
            renorm_interval: 1,
            perturbation_size: 1e-8,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |name, constraint| Err(Error::InvalidParameter { name, constraint });
        if self.transient_periods == 0 || self.transient_periods >= self.measure_periods {
            return invalid(
                "transient_periods",
                "0 < transient_periods < measure_periods",
            );
        }
        if !(self.lyapunov_threshold > 0.0) {
            return invalid("lyapunov_threshold", "lyapunov_threshold > 0");
        }
        if !(self.qbar_threshold > 0.0) {
            return invalid("qbar_threshold", "qbar_threshold > 0");
        }
        if self.renorm_interval == 0 || self.renorm_interval > self.measure_periods {
            return invalid("renorm_interval", "1 <= renorm_interval <= measure_periods");
        }
        if !(self.perturbation_size > 0.0) {
            return invalid("perturbation_size", "perturbation_size > 0");
        }
        Ok(())
    }
}
