//! Acceptance suite: one check per criterion, each printing a PASS/FAIL line.
//!
//! Runs without the libtest harness so the lines are always shown. Arguments
//! that do not start with `-` select criteria by substring. Runtime budgets
//! stated for 8 workers are checked against the measured wall time scaled by
//! `workers / 8`.

use constrained_oscillator::config::{self, Command, RunConfig};
use constrained_oscillator::output::read_csv;
use constrained_oscillator::run_command;
use constrained_oscillator_core::analysis::{classify_phase, separatrix, ClassifierConfig, Phase};
use constrained_oscillator_core::dynamics::{
    critical_purity, derived_quantities, homoclinic_omega, initial_moments, orbit_residual,
    protocols, purity_from_moments, rhs_full, rhs_reduced,
};
use constrained_oscillator_core::integrator::{
    integrate_full_on_grid, integrate_full_with_protocols, integrate_on_grid, ClosedFormProtocols,
    IntegratorConfig, ReducedSystem,
};
use constrained_oscillator_core::robustness::{
    ic_error_on_grid, integrated_q_statistics, NoiseConfig,
};
use constrained_oscillator_core::{Params, ReducedState};
use std::path::Path;
use std::time::{Duration, Instant};

fn report(criterion: u32, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict}  {detail}");
    pass
}

/// `(m=1, P=0.7, (0.5, 0.2), h=0)` and `(m=0.4, h=0.1, P=1, (0.01, 0))`.
fn verify_cases() -> [(Params, (f64, f64)); 2] {
    [
        (Params::new(1.0, 0.0, 1.0, 0.7).unwrap(), (0.5, 0.2)),
        (Params::new(0.4, 0.1, 1.0, 1.0).unwrap(), (0.01, 0.0)),
    ]
}

fn closed_form(params: &Params, ic: (f64, f64)) -> ClosedFormProtocols {
    ClosedFormProtocols {
        params: *params,
        q0: ic.0,
        p0: ic.1,
    }
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn at_eight_workers(elapsed: Duration, workers: usize) -> f64 {
    elapsed.as_secs_f64() * workers as f64 / 8.0
}

fn criterion_01_constraint_enforcement() -> bool {
    let integ = IntegratorConfig::default().with_tolerance(1e-10);
    let mut pass = true;
    let mut detail = Vec::new();
    for (params, ic) in verify_cases() {
        let start = Instant::now();
        let actual = initial_moments(ic.0, ic.1, &params).unwrap();
        let traj = integrate_full_with_protocols(
            &actual,
            &params,
            closed_form(&params, ic),
            1000.0,
            &integ,
        )
        .unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let dq2 = traj.max_q2_deviation(params.lambda);
        let dz = traj.max_z_deviation();
        let completed =
            traj.status.is_completed() && traj.samples.last().is_some_and(|s| s.state.t == 1000.0);
        pass &= completed && dq2 < 1e-6 && dz < 1e-6 && elapsed < 10.0;
        detail.push(format!(
            "m={} h={}: max|q2-1|={dq2:.2e} max|Z|={dz:.2e} steps={} {elapsed:.2}s",
            params.m,
            params.h,
            traj.samples.len()
        ));
    }
    report(1, pass, &detail.join("; "))
}

fn criterion_02_conserved_quantities() -> bool {
    let integ = IntegratorConfig::default();
    let mut pass = true;
    let mut detail = Vec::new();
    for purity in [0.4, 0.7] {
        let params = Params::new(1.0, 0.0, 1.0, purity).unwrap();
        let actual = initial_moments(0.5, 0.2, &params).unwrap();
        let d0 = derived_quantities(&actual, &params).unwrap();
        let traj = integrate_full_with_protocols(
            &actual,
            &params,
            closed_form(&params, (0.5, 0.2)),
            1000.0,
            &integ,
        )
        .unwrap();
        let (mut d_omega, mut d_purity, mut residual) = (0.0f64, 0.0f64, 0.0f64);
        for s in &traj.samples {
            let d = derived_quantities(&s.state, &params).unwrap();
            d_omega = d_omega.max((d.omega_inv - d0.omega_inv).abs());
            d_purity = d_purity.max((d.purity_val - purity).abs());
            residual =
                residual.max(orbit_residual(s.state.q, s.state.p, d0.omega_inv, &params).abs());
        }
        pass &= traj.status.is_completed() && d_omega < 1e-8 && d_purity < 1e-8 && residual < 1e-8;
        detail.push(format!(
            "P={purity}: dOmega={d_omega:.2e} dP={d_purity:.2e} orbit={residual:.2e}"
        ));
    }
    report(2, pass, &detail.join("; "))
}

fn criterion_03_reduced_full_equivalence() -> bool {
    let integ = IntegratorConfig::default().with_tolerance(1e-12);
    let times: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.1).collect();
    let mut pass = true;
    let mut detail = Vec::new();
    for (params, ic) in verify_cases() {
        let reduced = integrate_on_grid(
            &ReducedSystem::new(params),
            0.0,
            [ic.0, ic.1],
            &times,
            &integ,
        )
        .unwrap();
        let actual = initial_moments(ic.0, ic.1, &params).unwrap();
        let full =
            integrate_full_on_grid(&actual, &params, closed_form(&params, ic), &times, &integ)
                .unwrap();
        let complete = reduced.samples.len() == times.len() && full.samples.len() == times.len();
        let diff = max_abs(
            reduced
                .samples
                .iter()
                .zip(&full.samples)
                .flat_map(|((_, r), f)| [r[0] - f.state.q, r[1] - f.state.p]),
        );
        pass &= complete && diff < 1e-6;
        detail.push(format!(
            "m={} h={}: max|dq,dp|={diff:.2e}",
            params.m, params.h
        ));
    }
    report(3, pass, &detail.join("; "))
}

/// Whether any lobe initial condition `(q0, 0)`, `0 < q0 <= 0.3`, breaks the symmetry.
fn broken_symmetry_exists(
    params: &Params,
    cfg: &ClassifierConfig,
    integ: &IntegratorConfig,
) -> bool {
    (1..=15).any(|k| {
        let label = classify_phase(params, (0.02 * k as f64, 0.0), cfg, integ).unwrap();
        label.phase == Phase::BrokenSymmetry
    })
}

fn only_symmetric(params: &Params, cfg: &ClassifierConfig, integ: &IntegratorConfig) -> bool {
    (1..=15).all(|k| {
        classify_phase(params, (0.02 * k as f64, 0.0), cfg, integ)
            .unwrap()
            .phase
            == Phase::Symmetric
    })
}

/// Bisects the flip of `pred` on `[lo, hi]` given `pred(lo) = false`, `pred(hi) = true`.
fn bisect(mut lo: f64, mut hi: f64, width: f64, pred: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_04_critical_purity_boundary() -> bool {
    let cfg = ClassifierConfig::default();
    let integ = IntegratorConfig::default();
    let fig2 = |purity| Params::new(1.0, 0.0, 1.0, purity).unwrap();
    let low_sym = only_symmetric(&fig2(0.4), &cfg, &integ);
    let high_broken = broken_symmetry_exists(&fig2(0.7), &cfg, &integ);

    let by_purity = |purity: f64| broken_symmetry_exists(&fig2(purity), &cfg, &integ);
    let ends_p = !by_purity(0.3) && by_purity(0.9);
    let p_flip = bisect(0.3, 0.9, 0.005, by_purity);

    let by_mass =
        |m: f64| broken_symmetry_exists(&Params::new(m, 0.0, 1.0, 1.0).unwrap(), &cfg, &integ);
    let ends_m = !by_mass(0.15) && by_mass(0.4);
    let m_flip = bisect(0.15, 0.4, 0.005, by_mass);

    let pass = low_sym
        && high_broken
        && ends_p
        && ends_m
        && (p_flip - 0.5).abs() <= 0.01
        && (m_flip - 0.25).abs() <= 0.01;
    report(
        4,
        pass,
        &format!(
            "P=0.4 only symmetric={low_sym}; P=0.7 broken={high_broken}; flip P={p_flip:.4} (m=1); flip m={m_flip:.4} (P=1)"
        ),
    )
}

fn criterion_05_chaotic_phase() -> bool {
    let cfg = ClassifierConfig::default();
    let integ = IntegratorConfig::default();
    let start = Instant::now();
    let chaotic = classify_phase(
        &Params::new(0.4, 0.1, 1.0, 1.0).unwrap(),
        (0.01, 0.0),
        &cfg,
        &integ,
    )
    .unwrap();
    let t_chaotic = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let regular = classify_phase(
        &Params::new(0.1, 1e-3, 1.0, 1.0).unwrap(),
        (0.01, 0.0),
        &cfg,
        &integ,
    )
    .unwrap();
    let t_regular = start.elapsed().as_secs_f64();
    let pass = chaotic.phase == Phase::Chaotic
        && chaotic.lyapunov > 0.01
        && chaotic.qbar.abs() < 0.05
        && regular.phase != Phase::Chaotic
        && regular.lyapunov.abs() <= 0.01
        && t_chaotic < 60.0
        && t_regular < 60.0;
    report(
        5,
        pass,
        &format!(
            "m=0.4 h=0.1: {} lyap={:.4} qbar={:.4} {t_chaotic:.1}s; m=0.1 h=1e-3: {} lyap={:.2e} {t_regular:.1}s; {} periods",
            chaotic.phase.as_str(),
            chaotic.lyapunov,
            chaotic.qbar,
            regular.phase.as_str(),
            regular.lyapunov,
            cfg.measure_periods
        ),
    )
}

fn run_cli(command: Command, text: &str, dir: &Path) -> (RunConfig, serde_json::Value, Duration) {
    let file = config::parse_text(text).unwrap();
    let over = vec![("output".to_string(), dir.display().to_string())];
    let cfg = RunConfig::build(command, &file, &over).unwrap();
    let start = Instant::now();
    let report = run_command(&cfg).unwrap();
    let elapsed = start.elapsed();
    assert!(report.failure.is_none(), "{:?}", report.failure);
    (cfg, report.summary, elapsed)
}

fn chaotic_counts(summary: &serde_json::Value) -> Vec<(f64, f64, u64)> {
    summary["panels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            (
                p["m"].as_f64().unwrap(),
                p["h"].as_f64().unwrap(),
                p["chaotic"].as_u64().unwrap(),
            )
        })
        .collect()
}

const SCAN: &str = "nq = 101\nnp = 101\nq_min = -0.6\nq_max = 0.6\np_min = -0.3\np_max = 0.3\n\
transient_periods = 200\nmeasure_periods = 1200\nrel_tol = 1e-9\nabs_tol = 1e-9\n";

fn criterion_06_phase_diagram_growth() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let left = format!("{SCAN}m_list = 0.23,0.25,0.27\nh = 0.001\n");
    let (cfg, by_mass, t_left) = run_cli(Command::PhaseDiagram, &left, &dir.path().join("mass"));
    let right = format!("{SCAN}m = 0.24\nh_list = 0.001,0.005,0.008\n");
    let (_, by_drive, t_right) = run_cli(Command::PhaseDiagram, &right, &dir.path().join("drive"));
    let mass = chaotic_counts(&by_mass);
    let drive = chaotic_counts(&by_drive);
    let [(_, _, c023), (_, _, c025), (_, _, c027)] = mass[..] else {
        panic!("{mass:?}")
    };
    let [(_, _, d1), (_, _, d5), (_, _, d8)] = drive[..] else {
        panic!("{drive:?}")
    };
    let projected = at_eight_workers(t_left + t_right, cfg.workers);
    let pass = c025 > 0 && c027 > c023 && d1 < d5 && d5 < d8 && projected < 1800.0;
    report(
        6,
        pass,
        &format!(
            "h=0.001 chaotic cells m=0.23/0.25/0.27: {c023}/{c025}/{c027}; m=0.24 h=0.001/0.005/0.008: {d1}/{d5}/{d8}; \
             {:.0}s on {} workers, {projected:.0}s projected at 8",
            (t_left + t_right).as_secs_f64(),
            cfg.workers
        ),
    )
}

fn criterion_07_initial_condition_error() -> bool {
    let params = Params::new(0.4, 0.1, 1.0, 1.0).unwrap();
    let times: Vec<f64> = (0..=10_000).map(|k| k as f64 * 0.1).collect();
    let e = ic_error_on_grid(
        0.01,
        0.0,
        1e-3,
        &params,
        &times,
        &IntegratorConfig::default(),
    )
    .unwrap();
    let window: Vec<usize> = (0..e.times.len()).filter(|&k| e.times[k] >= 1.0).collect();
    let outside: Vec<usize> = window
        .iter()
        .copied()
        .filter(|&k| !(1.8..=2.2).contains(&e.ratio[k]))
        .collect();
    let (lo, hi) = window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| {
            (lo.min(e.ratio[k]), hi.max(e.ratio[k]))
        });
    let decade_mean = |a: f64, b: f64| {
        let v: Vec<f64> = (0..e.times.len())
            .filter(|&k| e.times[k] >= a && e.times[k] <= b)
            .map(|k| e.error[k].abs())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (first, last) = (decade_mean(1.0, 10.0), decade_mean(100.0, 1000.0));
    let worst = outside
        .iter()
        .max_by(|&&a, &&b| {
            (e.ratio[a] - 2.0)
                .abs()
                .total_cmp(&(e.ratio[b] - 2.0).abs())
        })
        .map(|&k| format!(" (worst t={:.1} error={:.1e})", e.times[k], e.error[k]))
        .unwrap_or_default();
    let pass = e.status.is_completed() && outside.is_empty() && last <= 2.0 * first;
    report(
        7,
        pass,
        &format!(
            "ratio range [{lo:.3}, {hi:.3}], {}/{} samples outside [1.8, 2.2]{worst}; \
             mean |error| first decade {first:.2e}, final decade {last:.2e}",
            outside.len(),
            window.len()
        ),
    )
}

fn criterion_08_protocol_noise_scaling() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let text = "m = 0.4\nh = 0.1\nq0 = 0.01\np0 = 0\nt_end = 1000\nn_realizations = 100\nepsilons = 1e-4,1e-3,1e-2\n";
    let (cfg, summary, elapsed) = run_cli(Command::Robustness, text, dir.path());
    let envelope = |eps: f64| {
        let name = format!("robustness-envelope-eps{eps}-{}.csv", cfg.hash());
        let csv = read_csv(&dir.path().join(name)).unwrap();
        (csv.column("t").unwrap(), csv.column("scaled").unwrap())
    };
    let (times, reference) = envelope(1e-4);
    let mut pass = true;
    let mut detail = Vec::new();
    for eps in [1e-3, 1e-2] {
        let (_, scaled) = envelope(eps);
        let ratios: Vec<(f64, f64)> = times
            .iter()
            .zip(scaled.iter().zip(&reference))
            .filter(|(_, (_, r))| **r > 0.0)
            .map(|(t, (s, r))| (*t, s / r))
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, x)| {
                (lo.min(*x), hi.max(*x))
            });
        let first_off = ratios
            .iter()
            .find(|(_, x)| (x - 1.0).abs() > 0.2)
            .map(|(t, _)| *t);
        pass &= (0.8..=1.2).contains(&lo) && (0.8..=1.2).contains(&hi);
        detail.push(match first_off {
            Some(t) => {
                format!("eps={eps}: scaled/ref in [{lo:.3}, {hi:.3}], leaves 20% at t={t:.0}")
            }
            None => format!("eps={eps}: scaled/ref in [{lo:.3}, {hi:.3}]"),
        });
    }
    for fit in summary["noise"].as_array().unwrap() {
        let alpha = fit["alpha"].as_f64().unwrap_or(f64::NAN);
        let excluded = fit["excluded"].as_u64().unwrap();
        pass &= (alpha - 0.5).abs() <= 0.15;
        detail.push(format!(
            "eps={}: alpha={alpha:.3}+-{:.3} ({} realizations, {excluded} excluded)",
            fit["epsilon"],
            fit["alpha_stderr"].as_f64().unwrap_or(f64::NAN),
            fit["realizations"]
        ));
    }
    let projected = at_eight_workers(elapsed, cfg.workers);
    pass &= projected < 1200.0;
    detail.push(format!(
        "{:.0}s on {} workers, {projected:.0}s projected at 8",
        elapsed.as_secs_f64(),
        cfg.workers
    ));
    report(8, pass, &detail.join("; "))
}

fn criterion_09_noise_source_statistics() -> bool {
    let noise = NoiseConfig::default();
    let stats = integrated_q_statistics(&noise, 1e4, &IntegratorConfig::default()).unwrap();
    let bound = stats.final_mean_bound();
    let fit = &stats.variance_fit;
    let pass = bound < 0.05 && fit.r_squared > 0.9;
    report(
        9,
        pass,
        &format!(
            "max |running mean| at t={:.0}: {bound:.4}; variance slope {:.4} R^2={:.4} over {} realizations ({} excluded)",
            stats.times.last().unwrap(),
            fit.slope,
            fit.r_squared,
            stats.realizations.len(),
            stats.excluded
        ),
    )
}

mod identities {
    use super::*;
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestRunner};

    const REL: f64 = 1e-12;
    pub const CASES: u32 = 10_000;

    fn close(a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= REL * scale.max(a.abs()).max(b.abs()).max(f64::MIN_POSITIVE)
    }

    fn params() -> impl Strategy<Value = Params> {
        (
            0.05f64..5.0,
            0.0f64..1.0,
            0.1f64..5.0,
            0.2f64..3.0,
            0.2f64..3.0,
            0.05f64..=1.0,
        )
            .prop_map(|(m, h, omega, kappa, lambda, purity)| Params {
                m,
                h,
                omega,
                kappa,
                lambda,
                purity,
            })
    }

    fn point() -> impl Strategy<Value = (Params, f64, f64, f64)> {
        (params(), -0.95f64..0.95, -3.0f64..3.0, -100.0f64..100.0)
            .prop_map(|(prm, s, p, t)| (prm, s * prm.lambda.sqrt(), p, t))
    }

    fn runner() -> TestRunner {
        TestRunner::new(Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        })
    }

    pub fn stationarity() -> Result<(), String> {
        runner()
            .run(&point(), |(prm, q, p, t)| {
                let s = initial_moments(q, p, &prm).unwrap();
                let agents = protocols(q, p, t, &prm).unwrap();
                let d = rhs_full(&s.as_array(), &agents, &prm);
                let scale =
                    (agents.b * q).abs() + (s.p2 / prm.m).abs() + (agents.mu * prm.lambda).abs();
                prop_assert!(d[2] == 0.0 && d[4].abs() <= REL * scale, "d = {:?}", d);
                Ok(())
            })
            .map_err(|e| e.to_string())
    }

    pub fn purity_round_trip() -> Result<(), String> {
        runner()
            .run(&(params(), -0.9f64..0.9, -3.0f64..3.0), |(prm, q0, p0)| {
                let prm = Params { lambda: 1.0, ..prm };
                let back = purity_from_moments(&initial_moments(q0, p0, &prm).unwrap()).unwrap();
                prop_assert!(close(back, prm.purity, 0.0), "{} vs {}", back, prm.purity);
                Ok(())
            })
            .map_err(|e| e.to_string())
    }

    pub fn separatrix_residual() -> Result<(), String> {
        runner()
            .run(&(0.3f64..5.0, 0.0f64..1.0, 2usize..40), |(m, frac, n)| {
                let p_c = critical_purity(m).unwrap().min(1.0);
                let purity = p_c + (1.0 - p_c) * frac;
                let omega_h = homoclinic_omega(m, purity);
                if omega_h >= 1.0 - 1e-9 {
                    return Ok(());
                }
                let prm = Params {
                    m,
                    purity,
                    ..Params::default()
                };
                for (q, p) in separatrix(m, purity, n).unwrap() {
                    let r = orbit_residual(q, p, omega_h, &prm);
                    let scale = 0.25 / (purity * purity) + p * p + m * (omega_h + q * q);
                    prop_assert!(r.abs() <= REL * scale, "residual {} at ({}, {})", r, q, p);
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    }

    pub fn oddness() -> Result<(), String> {
        runner()
            .run(&point(), |(prm, q, p, t)| {
                let a = rhs_reduced(&ReducedState { q, p, t }, &prm).unwrap();
                let b = rhs_reduced(
                    &ReducedState {
                        q: -q,
                        p: -p,
                        t: -t,
                    },
                    &prm,
                )
                .unwrap();
                prop_assert!(
                    close(a[0], -b[0], 0.0) && close(a[1], -b[1], 0.0),
                    "{:?} vs {:?}",
                    a,
                    b
                );
                Ok(())
            })
            .map_err(|e| e.to_string())
    }
}

fn criterion_10_algebraic_identities() -> bool {
    let checks = [
        ("constraint stationarity", identities::stationarity()),
        ("purity round trip", identities::purity_round_trip()),
        ("separatrix residual", identities::separatrix_residual()),
        ("rhs oddness", identities::oddness()),
    ];
    let pass = checks.iter().all(|(_, r)| r.is_ok());
    let detail: Vec<String> = checks
        .iter()
        .map(|(name, r)| match r {
            Ok(()) => format!("{name} ok"),
            Err(e) => format!("{name} failed: {e}"),
        })
        .collect();
    report(
        10,
        pass,
        &format!(
            "{} cases each at 1e-12 relative: {}",
            identities::CASES,
            detail.join(", ")
        ),
    )
}

type Check = fn() -> bool;

const CRITERIA: [(&str, Check); 10] = [
    (
        "criterion_01_constraint_enforcement",
        criterion_01_constraint_enforcement,
    ),
    (
        "criterion_02_conserved_quantities",
        criterion_02_conserved_quantities,
    ),
    (
        "criterion_03_reduced_full_equivalence",
        criterion_03_reduced_full_equivalence,
    ),
    (
        "criterion_04_critical_purity_boundary",
        criterion_04_critical_purity_boundary,
    ),
    ("criterion_05_chaotic_phase", criterion_05_chaotic_phase),
    (
        "criterion_06_phase_diagram_growth",
        criterion_06_phase_diagram_growth,
    ),
    (
        "criterion_07_initial_condition_error",
        criterion_07_initial_condition_error,
    ),
    (
        "criterion_08_protocol_noise_scaling",
        criterion_08_protocol_noise_scaling,
    ),
    (
        "criterion_09_noise_source_statistics",
        criterion_09_noise_source_statistics,
    ),
    (
        "criterion_10_algebraic_identities",
        criterion_10_algebraic_identities,
    ),
];

fn main() -> std::process::ExitCode {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, check) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let pass = std::panic::catch_unwind(check).unwrap_or_else(|_| {
            println!("{name}: FAIL  panicked");
            false
        });
        println!("    {name} took {:.1}s", start.elapsed().as_secs_f64());
        if !pass {
            failed.push(name);
        }
    }
    println!(
        "acceptance: {} of {ran} criteria passed",
        ran - failed.len()
    );
    if failed.is_empty() {
        std::process::ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        std::process::ExitCode::FAILURE
    }
}
