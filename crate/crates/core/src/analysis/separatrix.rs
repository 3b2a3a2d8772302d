use crate::dynamics::{critical_purity, homoclinic_omega};
use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

/// Points on the undriven homoclinic orbit `p^2 = m q^2 (1 - Omega_h - q^2)`,
/// `Omega_h = 1 / (4 m P^2)` (at `kappa = lambda = 1`).
///
/// The closed curve is traced as the upper branch left to right followed by
/// the lower branch right to left, `n` points per branch. At the critical
/// purity the loop degenerates to the origin.
pub fn separatrix(m: f64, purity: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    critical_purity(m)?;
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "purity",
            constraint: "0 < purity <= 1",
        });
    }
    let omega_h = homoclinic_omega(m, purity);
    let gap = 1.0 - omega_h;
    if gap.abs() <= 1e-12 {
        return Ok(vec![(0.0, 0.0)]);
    }
    if gap < 0.0 {
        return Err(Error::NoHomoclinic { m, purity });
    }
    let n = n.max(2);
    let q_max = sqrt(gap);
    let branch = |i: usize| {
        let q = -q_max + 2.0 * q_max * i as f64 / (n - 1) as f64;
        let q = q.clamp(-q_max, q_max);
        (q, sqrt((m * q * q * (gap - q * q)).max(0.0)))
    };
    let mut pts: Vec<(f64, f64)> = (0..n).map(branch).collect();
    pts.extend((0..n).rev().map(branch).map(|(q, p)| (q, -p)));
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit_residual;
    use crate::model::Params;

    #[test]
    fn crossings_and_origin() {
        let pts = separatrix(1.0, 0.7, 201).unwrap();
        let q_cross = sqrt(1.0 - 1.0 / 1.96);
        assert!((q_cross - 0.6998542).abs() < 1e-6);
        let (qmin, qmax) = pts
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &(q, _)| (a.min(q), b.max(q)));
        assert!((qmax - q_cross).abs() < 1e-15 && (qmin + q_cross).abs() < 1e-15);
        // odd n puts a sample on q = 0
        assert!(pts.iter().any(|&(q, p)| q.abs() < 1e-15 && p.abs() < 1e-15));
        let prm = Params::new(1.0, 0.0, 1.0, 0.7).unwrap();
        let om = homoclinic_omega(1.0, 0.7);
        for (q, p) in pts {
            assert!(orbit_residual(q, p, om, &prm).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_and_missing() {
        assert_eq!(separatrix(1.0, 0.5, 10).unwrap(), vec![(0.0, 0.0)]);
        assert_eq!(
            separatrix(1.0, 0.4, 10),
            Err(Error::NoHomoclinic {
                m: 1.0,
                purity: 0.4
            })
        );
        assert!(separatrix(0.0, 0.4, 10).is_err());
    }
}
