use crate::error::Result;
use crate::integrator::{stroboscopic_sample, IntegratorConfig, ReducedSystem, Termination};
use crate::model::Params;
use alloc::vec::Vec;

/// Stroboscopic point cloud of one orbit.
#[derive(Debug, Clone)]
pub struct PoincareSection {
    pub params: Params,
    pub ic: (f64, f64),
    pub phase: f64,
    pub n_periods: usize,
    /// `(k, t_k, q, p)` with `t_k = (phase + 2 pi k) / omega`.
    pub points: Vec<(usize, f64, f64, f64)>,
    pub status: Termination,
}

impl PoincareSection {
    /// Median distance of each point from the chord through its two nearest
    /// neighbours. Small for points on a smooth curve, of the order of the
    /// point spacing for an area-filling cloud.
    pub fn thickness(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.points.iter().map(|&(_, _, q, p)| (q, p)).collect();
        let n = pts.len();
        if n < 3 {
            return 0.0;
        }
        let mut dists: Vec<f64> = Vec::with_capacity(n);
        for (i, &(x, y)) in pts.iter().enumerate() {
            let mut best = [(f64::INFINITY, 0usize); 2];
            for (j, &(u, v)) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = (u - x) * (u - x) + (v - y) * (v - y);
                if d < best[0].0 {
                    best[1] = best[0];
                    best[0] = (d, j);
                } else if d < best[1].0 {
                    best[1] = (d, j);
                }
            }
            let (a, b) = (pts[best[0].1], pts[best[1].1]);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let len = libm::sqrt(ex * ex + ey * ey);
            let d = if len > 0.0 {
                ((x - a.0) * ey - (y - a.1) * ex).abs() / len
            } else {
                libm::sqrt(best[0].0)
            };
            dists.push(d);
        }
        dists.sort_by(f64::total_cmp);
        dists[n / 2]
    }
}

pub fn poincare_section(
    params: &Params,
    ic: (f64, f64),
    phase: f64,
    n_periods: usize,
    integ: &IntegratorConfig,
) -> Result<PoincareSection> {
    params.validate()?;
    let sys = ReducedSystem::new(*params);
    let s = stroboscopic_sample(&sys, [ic.0, ic.1], params.omega, phase, n_periods, integ)?;
    Ok(PoincareSection {
        params: *params,
        ic,
        phase,
        n_periods,
        points: s
            .points
            .into_iter()
            .map(|(k, t, y)| (k, t, y[0], y[1]))
            .collect(),
        status: s.status,
    })
}

/// One gallery run; failures are recorded and the batch continues.
#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub params: Params,
    pub ic: (f64, f64),
    pub section: Result<PoincareSection>,
}

/// Sections for every `(params, ic)` combination, in input order.
pub fn poincare_gallery(
    runs: &[(Params, Vec<(f64, f64)>)],
    phase: f64,
    n_periods: usize,
    integ: &IntegratorConfig,
) -> Vec<GalleryEntry> {
    runs.iter()
        .flat_map(|(params, ics)| {
            ics.iter().map(move |&ic| GalleryEntry {
                params: *params,
                ic,
                section: poincare_section(params, ic, phase, n_periods, integ),
            })
        })
        .collect()
}

/// The `(h, m)` pairs of the route-to-chaos scan, `omega = P = 1`.
pub const ROUTE_TO_CHAOS_SCAN: [(f64, f64); 12] = [
    (1e-3, 0.1),
    (1e-3, 0.2105),
    (1e-3, 0.22),
    (1e-3, 0.4),
    (1e-2, 0.229),
    (1e-2, 0.242),
    (1e-2, 0.25),
    (1e-2, 0.34),
    (1e-2, 0.4),
    (1e-1, 0.22),
    (1e-1, 0.25),
    (1e-1, 0.4),
];
