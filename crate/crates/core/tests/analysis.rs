use constrained_oscillator_core::analysis::*;
use constrained_oscillator_core::integrator::IntegratorConfig;
use constrained_oscillator_core::{Error, Params};

fn scan_config() -> (ClassifierConfig, IntegratorConfig) {
    let cfg = ClassifierConfig {
        transient_periods: 50,
        measure_periods: 300,
        ..ClassifierConfig::default()
    };
    (cfg, IntegratorConfig::default().with_tolerance(1e-9))
}

#[test]
fn driven_chaos_is_labelled_chaotic() {
    let params = Params::new(0.4, 0.1, 1.0, 1.0).unwrap();
    let label = classify_phase(
        &params,
        (0.01, 0.0),
        &ClassifierConfig::default(),
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert_eq!(label.phase, Phase::Chaotic);
    assert!(
        label.lyapunov > 0.01 && label.qbar.abs() < 0.05,
        "{label:?}"
    );
}

#[test]
fn weak_drive_light_mass_is_regular() {
    let params = Params::new(0.1, 1e-3, 1.0, 1.0).unwrap();
    let label = classify_phase(
        &params,
        (0.3, 0.0),
        &ClassifierConfig::default(),
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert_ne!(label.phase, Phase::Chaotic);
    assert!(label.lyapunov.abs() < 0.01, "{label:?}");
}

#[test]
fn undriven_lobe_orbits_follow_purity() {
    let (cfg, integ) = scan_config();
    let low = classify_phase(
        &Params::new(1.0, 0.0, 1.0, 0.4).unwrap(),
        (0.5, 0.2),
        &cfg,
        &integ,
    )
    .unwrap();
    assert_eq!(low.phase, Phase::Symmetric, "{low:?}");
    let high = classify_phase(
        &Params::new(1.0, 0.0, 1.0, 0.7).unwrap(),
        (0.5, 0.2),
        &cfg,
        &integ,
    )
    .unwrap();
    assert_eq!(high.phase, Phase::BrokenSymmetry, "{high:?}");
    assert!(high.qbar > 0.05);
}

#[test]
fn undriven_phase_diagram_has_no_chaos() {
    let (cfg, integ) = scan_config();
    let grid = Grid {
        q_min: -0.6,
        q_max: 0.6,
        nq: 5,
        p_min: -0.3,
        p_max: 0.3,
        np: 5,
    };
    let d = phase_diagram(
        &Params::new(0.25, 0.0, 1.0, 1.0).unwrap(),
        &grid,
        &cfg,
        &integ,
    )
    .unwrap();
    assert_eq!(d.cells.len(), 25);
    assert_eq!(d.failures(), 0);
    assert_eq!(d.count(Phase::Chaotic), 0);
}

#[test]
fn quasi_periodic_section_is_a_curve() {
    let params = Params::new(0.1, 1e-3, 1.0, 1.0).unwrap();
    let s = poincare_section(&params, (0.3, 0.0), 0.0, 2000, &IntegratorConfig::default()).unwrap();
    assert!(s.status.is_completed());
    assert_eq!(s.points.len(), 2001);
    assert!(s.thickness() < 1e-3, "thickness {}", s.thickness());

    let chaotic = Params::new(0.4, 0.1, 1.0, 1.0).unwrap();
    let c = poincare_section(
        &chaotic,
        (0.01, 0.0),
        0.0,
        2000,
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!(
        c.thickness() > 10.0 * s.thickness(),
        "{} vs {}",
        c.thickness(),
        s.thickness()
    );
}

#[test]
fn chaotic_section_histogram_is_even() {
    let params = Params::new(0.4, 0.1, 1.0, 1.0).unwrap();
    let s = poincare_section(
        &params,
        (0.01, 0.0),
        0.0,
        20_000,
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!(s.status.is_completed());
    const BINS: usize = 8;
    let mut pos = [0f64; BINS];
    let mut neg = [0f64; BINS];
    for &(_, _, q, _) in &s.points {
        let b = ((q.abs() * BINS as f64) as usize).min(BINS - 1);
        if q >= 0.0 {
            pos[b] += 1.0;
        } else {
            neg[b] += 1.0;
        }
    }
    for b in 0..BINS {
        let sigma = (pos[b] + neg[b]).sqrt();
        assert!(
            (pos[b] - neg[b]).abs() <= 3.0 * sigma.max(1.0),
            "bin {b}: {} vs {}",
            pos[b],
            neg[b]
        );
    }
}

#[test]
fn gallery_records_failures_and_continues() {
    let params = Params::new(0.1, 1e-3, 1.0, 1.0).unwrap();
    let runs = vec![(params, vec![(0.3, 0.0), (1.5, 0.0), (0.2, 0.0)])];
    let g = poincare_gallery(&runs, 0.0, 20, &IntegratorConfig::default());
    assert_eq!(g.len(), 3);
    assert!(g[0].section.is_ok() && g[2].section.is_ok());
    let bad = g[1].section.as_ref().unwrap();
    assert!(!bad.status.is_completed());
}

#[test]
fn separatrix_requires_homoclinic_orbit() {
    assert!(matches!(
        separatrix(1.0, 0.4, 10),
        Err(Error::NoHomoclinic { .. })
    ));
    assert_eq!(separatrix(1.0, 0.5, 10).unwrap(), vec![(0.0, 0.0)]);
    let pts = separatrix(1.0, 0.7, 101).unwrap();
    assert_eq!(pts.len(), 202);
}

#[test]
fn undriven_exponent_vanishes() {
    let (cfg, integ) = scan_config();
    let est = lyapunov_max(
        &Params::new(1.0, 0.0, 1.0, 0.7).unwrap(),
        (0.5, 0.2),
        &cfg,
        &integ,
    )
    .unwrap();
    assert!(est.exponent.abs() < 0.01, "{est:?}");
}
