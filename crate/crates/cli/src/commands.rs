//! The five subcommands. Each writes its data files, then the index.

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_f64, Emitter, FileEntry};
use constrained_oscillator_core::analysis::{
    classify_phase, poincare_section, Phase, PhaseDiagram, PhaseLabel, PoincareSection,
    ROUTE_TO_CHAOS_SCAN,
};
use constrained_oscillator_core::dynamics::{initial_moments, protocols};
use constrained_oscillator_core::integrator::{
    integrate_full_on_grid, integrate_on_grid, AgentSignal, ClosedFormProtocols, FullTrajectory,
    ReducedSystem, Termination,
};
use constrained_oscillator_core::robustness::{
    chaotic_noise_signal, fit_power_law, ic_error_experiment, run_perturbed, source_integral,
    uniform_grid, ErrorEnvelope, NoisyProtocols, QStatistics, SignalRole,
};
use constrained_oscillator_core::{Error as CoreError, Params};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Files written by a command plus the first numerical failure, if any.
///
/// A failed integration still leaves its partial data on disk.
#[derive(Debug)]
pub struct Report {
    pub files: Vec<FileEntry>,
    pub summary: Value,
    pub failure: Option<CliError>,
    pub index: PathBuf,
}

struct Collected {
    files: Vec<FileEntry>,
    summary: Value,
    failure: Option<CliError>,
}

impl Collected {
    fn new() -> Self {
        Collected {
            files: Vec::new(),
            summary: Value::Null,
            failure: None,
        }
    }

    fn note(&mut self, context: impl Into<String>, status: Termination) {
        if let (None, Err(e)) = (&self.failure, status.into_result()) {
            self.failure = Some(CliError::core(context, e));
        }
    }

    fn note_error(&mut self, context: impl Into<String>, e: CoreError) {
        if self.failure.is_none() {
            self.failure = Some(CliError::core(context, e));
        }
    }
}

fn status_str(status: Termination) -> String {
    match status {
        Termination::Completed => "completed".into(),
        Termination::GuardHit { t } => format!("guard hit at t = {t}"),
        Termination::StepLimit { t } => format!("step limit at t = {t}"),
    }
}

fn core(context: &str) -> impl Fn(CoreError) -> CliError + '_ {
    move |e| CliError::core(context, e)
}

fn sample_times(dt: f64, t_end: f64) -> Result<Vec<f64>, CliError> {
    uniform_grid(dt, t_end).map_err(core("sample grid"))
}

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::config("workers", e.to_string()))
}

/// Runs `cfg.command` and writes its output directory.
pub fn run_command(cfg: &RunConfig) -> Result<Report, CliError> {
    let out = Emitter::new(cfg)?;
    let collected = match cfg.command {
        Command::Simulate => simulate(cfg, &out)?,
        Command::Verify => verify(cfg, &out)?,
        Command::Poincare => poincare(cfg, &out)?,
        Command::PhaseDiagram => phase_diagram(cfg, &out)?,
        Command::Robustness => robustness(cfg, &out)?,
    };
    let failure_text = collected.failure.as_ref().map(|e| e.to_string());
    let index = out.write_index(
        &collected.files,
        &collected.summary,
        failure_text.as_deref(),
    )?;
    Ok(Report {
        files: collected.files,
        summary: collected.summary,
        failure: collected.failure,
        index,
    })
}

fn simulate(cfg: &RunConfig, out: &Emitter) -> Result<Collected, CliError> {
    let params = &cfg.params;
    let (q0, p0) = cfg.ic;
    initial_moments(q0, p0, params).map_err(core("initial condition"))?;
    let times = sample_times(cfg.sample_dt, cfg.t_end)?;
    let traj = integrate_on_grid(
        &ReducedSystem::new(*params),
        0.0,
        [q0, p0],
        &times,
        &cfg.integ,
    )
    .map_err(core("simulate"))?;
    let mut c = Collected::new();
    let mut rows = Vec::with_capacity(traj.samples.len());
    for (t, y) in &traj.samples {
        match protocols(y[0], y[1], *t, params) {
            Ok(a) => rows.push(vec![
                fmt_f64(*t),
                fmt_f64(y[0]),
                fmt_f64(y[1]),
                fmt_f64(a.b),
                fmt_f64(a.mu),
            ]),
            Err(e) => {
                c.note_error(format!("simulate: protocols at t = {t}"), e);
                break;
            }
        }
    }
    c.note("simulate", traj.status);
    let status = status_str(traj.status);
    c.files
        .push(out.write_csv("", Vec::new(), &["t", "q", "p", "B", "mu"], &rows, &status)?);
    c.summary = json!({ "samples": rows.len(), "status": status });
    Ok(c)
}

fn verify(cfg: &RunConfig, out: &Emitter) -> Result<Collected, CliError> {
    let params = &cfg.params;
    let (q0, p0) = cfg.ic;
    let actual = initial_moments(q0, p0, params).map_err(core("initial condition"))?;
    let times = sample_times(cfg.sample_dt, cfg.t_end)?;
    let base = ClosedFormProtocols {
        params: *params,
        q0,
        p0,
    };
    let (traj, sources) = if cfg.noise.epsilon > 0.0 {
        let signal = |role| {
            chaotic_noise_signal(&cfg.noise, 0, role, cfg.t_end, &cfg.integ)
                .map_err(core("noise source"))
        };
        let field = signal(SignalRole::Field)?;
        let stiffness = signal(SignalRole::Stiffness)?;
        let sources = json!({
            "field_ic": [field.ic.0, field.ic.1],
            "stiffness_ic": [stiffness.ic.0, stiffness.ic.1],
            "regenerations": field.regenerations + stiffness.regenerations,
        });
        let noisy = NoisyProtocols {
            base,
            field,
            stiffness,
        };
        (full_run(&actual, params, noisy, &times, cfg)?, sources)
    } else {
        (full_run(&actual, params, base, &times, cfg)?, Value::Null)
    };

    let header = ["t", "q", "p", "q2", "p2", "Z", "B", "mu", "q2_dev", "Z_dev"];
    let rows: Vec<Vec<String>> = traj
        .samples
        .iter()
        .map(|s| {
            let m = &s.state;
            [
                m.t,
                m.q,
                m.p,
                m.q2,
                m.p2,
                m.z,
                s.agents.b,
                s.agents.mu,
                m.q2 - params.lambda,
                m.z,
            ]
            .into_iter()
            .map(fmt_f64)
            .collect()
        })
        .collect();
    let mut c = Collected::new();
    c.note("verify", traj.status);
    let status = status_str(traj.status);
    c.files
        .push(out.write_csv("", Vec::new(), &header, &rows, &status)?);
    c.summary = json!({
        "epsilon": cfg.noise.epsilon,
        "samples": rows.len(),
        "max_abs_q2_dev": traj.max_q2_deviation(params.lambda),
        "max_abs_Z": traj.max_z_deviation(),
        "status": status,
        "noise_sources": sources,
    });
    c.files.push(out.write_json("summary", &c.summary)?);
    Ok(c)
}

fn full_run<A: AgentSignal>(
    actual: &constrained_oscillator_core::MomentState,
    params: &Params,
    signal: A,
    times: &[f64],
    cfg: &RunConfig,
) -> Result<FullTrajectory, CliError> {
    integrate_full_on_grid(actual, params, signal, times, &cfg.integ).map_err(core("verify"))
}

fn section_rows(s: &PoincareSection) -> Vec<Vec<String>> {
    s.points
        .iter()
        .map(|&(k, t, q, p)| vec![k.to_string(), fmt_f64(t), fmt_f64(q), fmt_f64(p)])
        .collect()
}

fn poincare(cfg: &RunConfig, out: &Emitter) -> Result<Collected, CliError> {
    let runs: Vec<(usize, Params)> = if cfg.gallery {
        ROUTE_TO_CHAOS_SCAN
            .iter()
            .enumerate()
            .map(|(i, &(h, m))| (i, cfg.params.with_h(h).with_m(m)))
            .collect()
    } else {
        vec![(0, cfg.params)]
    };
    let jobs: Vec<(usize, Params, usize, (f64, f64))> = runs
        .iter()
        .flat_map(|&(r, p)| {
            cfg.ics
                .iter()
                .enumerate()
                .map(move |(i, &ic)| (r, p, i, ic))
        })
        .collect();
    let sections: Vec<_> = pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|&(_, p, _, ic)| poincare_section(&p, ic, cfg.phase, cfg.n_periods, &cfg.integ))
            .collect()
    });

    let mut c = Collected::new();
    let mut entries = Vec::new();
    for (&(r, params, i, ic), section) in jobs.iter().zip(sections) {
        let tag = if cfg.gallery {
            format!("run{r}-ic{i}")
        } else {
            format!("ic{i}")
        };
        let mut panel = vec![
            ("q0".to_string(), ic.0.to_string()),
            ("p0".to_string(), ic.1.to_string()),
        ];
        if cfg.gallery {
            panel.push(("m".into(), params.m.to_string()));
            panel.push(("h".into(), params.h.to_string()));
        }
        let context = format!("poincare {tag}");
        match section {
            Ok(s) => {
                c.note(&context, s.status);
                let status = status_str(s.status);
                let rows = section_rows(&s);
                entries.push(json!({
                    "tag": tag, "m": params.m, "h": params.h, "ic": [ic.0, ic.1],
                    "points": rows.len(), "thickness": s.thickness(), "status": status,
                }));
                c.files
                    .push(out.write_csv(&tag, panel, &["k", "t", "q", "p"], &rows, &status)?);
            }
            Err(e) if cfg.gallery => {
                entries.push(json!({
                    "tag": tag, "m": params.m, "h": params.h, "ic": [ic.0, ic.1], "error": e.to_string(),
                }));
                c.note_error(context, e);
            }
            Err(e) => return Err(CliError::core(context, e)),
        }
    }
    c.summary = json!({ "sections": entries });
    Ok(c)
}

fn phase_diagram(cfg: &RunConfig, out: &Emitter) -> Result<Collected, CliError> {
    let masses = if cfg.m_list.is_empty() {
        vec![cfg.params.m]
    } else {
        cfg.m_list.clone()
    };
    let drives = if cfg.h_list.is_empty() {
        vec![cfg.params.h]
    } else {
        cfg.h_list.clone()
    };
    let panels: Vec<Params> = masses
        .iter()
        .flat_map(|&m| drives.iter().map(move |&h| cfg.params.with_m(m).with_h(h)))
        .collect();
    for p in &panels {
        p.validate().map_err(core("phase-diagram panel"))?;
    }
    let points: Vec<(f64, f64)> = cfg.grid.points().collect();
    let jobs: Vec<(usize, (f64, f64))> = (0..panels.len())
        .flat_map(|i| points.iter().map(move |&ic| (i, ic)))
        .collect();
    let mut outcomes: Vec<Result<PhaseLabel, CoreError>> = pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|&(i, ic)| classify_phase(&panels[i], ic, &cfg.classifier, &cfg.integ))
            .collect()
    });

    let mut c = Collected::new();
    let mut counts = Vec::new();
    for (i, params) in panels.iter().enumerate() {
        let rest = outcomes.split_off(points.len());
        let diagram =
            PhaseDiagram::from_outcomes(*params, cfg.grid, std::mem::replace(&mut outcomes, rest));
        let rows: Vec<Vec<String>> = diagram
            .cells
            .iter()
            .map(|cell| {
                let (q0, p0) = (cell.q0, cell.p0);
                match &cell.outcome {
                    Ok(l) => vec![
                        fmt_f64(q0),
                        fmt_f64(p0),
                        l.phase.as_str().to_string(),
                        fmt_f64(l.qbar),
                        fmt_f64(l.lyapunov),
                    ],
                    Err(_) => vec![
                        fmt_f64(q0),
                        fmt_f64(p0),
                        "failed".into(),
                        fmt_f64(f64::NAN),
                        fmt_f64(f64::NAN),
                    ],
                }
            })
            .collect();
        if let Some(e) = diagram
            .cells
            .iter()
            .find_map(|cell| cell.outcome.as_ref().err())
        {
            c.note_error(
                format!("phase-diagram m = {} h = {}", params.m, params.h),
                e.clone(),
            );
        }
        let tag = format!("m{}-h{}", params.m, params.h);
        let panel = vec![
            ("m".to_string(), params.m.to_string()),
            ("h".to_string(), params.h.to_string()),
        ];
        let failed = diagram.failures();
        let status = if failed == 0 {
            "completed".to_string()
        } else {
            format!("{failed} cells failed")
        };
        c.files.push(out.write_csv(
            &tag,
            panel,
            &["q0", "p0", "label", "qbar", "lyap"],
            &rows,
            &status,
        )?);
        counts.push(json!({
            "panel": i,
            "m": params.m,
            "h": params.h,
            "symmetric": diagram.count(Phase::Symmetric),
            "broken_symmetry": diagram.count(Phase::BrokenSymmetry),
            "chaotic": diagram.count(Phase::Chaotic),
            "failed": failed,
        }));
    }
    c.summary = json!({ "panels": counts });
    Ok(c)
}

fn robustness(cfg: &RunConfig, out: &Emitter) -> Result<Collected, CliError> {
    let params = &cfg.params;
    let (q0, p0) = cfg.ic;
    let pool = pool(cfg)?;
    let mut c = Collected::new();

    let ic = ic_error_experiment(q0, p0, cfg.delta, params, cfg.t_end, &cfg.integ)
        .map_err(core("ic error"))?;
    c.note("ic error", ic.status);
    let rows: Vec<Vec<String>> = (0..ic.times.len())
        .map(|k| {
            [ic.times[k], ic.error[k], ic.error_double[k], ic.ratio[k]]
                .into_iter()
                .map(fmt_f64)
                .collect()
        })
        .collect();
    let panel = vec![("delta".to_string(), cfg.delta.to_string())];
    c.files.push(out.write_csv(
        "ic-error",
        panel,
        &["t", "error", "error_double", "ratio"],
        &rows,
        &status_str(ic.status),
    )?);

    let times = sample_times(params.period(), cfg.t_end)?;
    let mut envelopes: Vec<ErrorEnvelope> = Vec::new();
    for &epsilon in &cfg.epsilons {
        let noise = cfg.noise.with_epsilon(epsilon);
        let runs: Vec<_> = pool.install(|| {
            (0..noise.n_realizations as u64)
                .into_par_iter()
                .map(|r| run_perturbed(q0, p0, params, &noise, r, cfg.t_end, &cfg.integ))
                .collect()
        });
        let env = ErrorEnvelope::from_runs(epsilon, times.clone(), runs)
            .map_err(core(&format!("noise ensemble epsilon = {epsilon}")))?;
        let scaled = env.scaled();
        let max_abs = env.max_abs();
        let rows: Vec<Vec<String>> = (0..times.len())
            .map(|k| {
                let s = scaled.as_ref().map_or(f64::NAN, |s| s[k]);
                [times[k], env.above[k], env.below[k], max_abs[k], s]
                    .into_iter()
                    .map(fmt_f64)
                    .collect()
            })
            .collect();
        let panel = vec![("epsilon".to_string(), epsilon.to_string())];
        c.files.push(out.write_csv(
            &format!("envelope-eps{epsilon}"),
            panel,
            &["t", "above", "below", "max_abs", "scaled"],
            &rows,
            "completed",
        )?);
        envelopes.push(env);
    }

    // collapse is measured against the smallest positive intensity
    let reference = envelopes
        .iter()
        .filter(|e| e.epsilon > 0.0)
        .min_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
        .and_then(|e| e.scaled());
    let mut fits = Vec::new();
    let mut fit_rows = Vec::new();
    for env in &envelopes {
        let fit = fit_power_law(&env.times, &env.max_abs(), cfg.fit_t_min);
        let (lo, hi) = match (env.scaled(), &reference) {
            (Some(s), Some(r)) => collapse_range(&env.times, &s, r, cfg.fit_t_min),
            _ => (f64::NAN, f64::NAN),
        };
        let (alpha, stderr, prefactor, n) = match &fit {
            Ok(f) => (f.exponent, f.exponent_stderr, f.prefactor, f.n),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, 0),
        };
        fit_rows.push(vec![
            fmt_f64(env.epsilon),
            fmt_f64(alpha),
            fmt_f64(stderr),
            fmt_f64(prefactor),
            n.to_string(),
            fmt_f64(lo),
            fmt_f64(hi),
            env.realizations.to_string(),
            env.excluded.to_string(),
        ]);
        fits.push(json!({
            "epsilon": env.epsilon,
            "alpha": alpha,
            "alpha_stderr": stderr,
            "prefactor": prefactor,
            "fit_points": n,
            "fit_error": fit.as_ref().err().map(|e| e.to_string()),
            "collapse_ratio_min": lo,
            "collapse_ratio_max": hi,
            "realizations": env.realizations,
            "excluded": env.excluded,
            "regenerations": env.regenerations,
        }));
    }
    c.files.push(out.write_csv(
        "fit",
        Vec::new(),
        &[
            "epsilon",
            "alpha",
            "alpha_stderr",
            "prefactor",
            "fit_points",
            "collapse_min",
            "collapse_max",
            "realizations",
            "excluded",
        ],
        &fit_rows,
        "completed",
    )?);

    let ratio: Vec<f64> = ic
        .times
        .iter()
        .zip(&ic.ratio)
        .filter(|(t, r)| **t >= 1.0 && r.is_finite())
        .map(|(_, r)| *r)
        .collect();
    let mut summary = json!({
        "ic_error": {
            "delta": cfg.delta,
            "max_abs_error": ic.error.iter().fold(0.0f64, |a, e| a.max(e.abs())),
            "ratio_min": ratio.iter().copied().fold(f64::INFINITY, f64::min),
            "ratio_max": ratio.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "status": status_str(ic.status),
        },
        "noise": fits,
    });

    if cfg.q_statistics {
        let stats = q_statistics(cfg, &pool)?;
        let mut mean_bound = vec![0.0f64; stats.times.len()];
        for r in &stats.realizations {
            for (b, a) in mean_bound.iter_mut().zip(r.running_average(&stats.times)) {
                *b = b.max(a.abs());
            }
        }
        let rows: Vec<Vec<String>> = (0..stats.times.len())
            .map(|k| {
                vec![
                    fmt_f64(stats.times[k]),
                    fmt_f64(stats.variance[k]),
                    fmt_f64(mean_bound[k]),
                ]
            })
            .collect();
        c.files.push(out.write_csv(
            "q-statistics",
            Vec::new(),
            &["t", "variance", "max_abs_running_mean"],
            &rows,
            "completed",
        )?);
        summary["q_statistics"] = json!({
            "t_end": stats.times.last().copied().unwrap_or(0.0),
            "final_mean_bound": stats.final_mean_bound(),
            "variance_slope": stats.variance_fit.slope,
            "variance_intercept": stats.variance_fit.intercept,
            "variance_r_squared": stats.variance_fit.r_squared,
            "realizations": stats.realizations.len(),
            "excluded": stats.excluded,
        });
    }
    c.files.push(out.write_json("summary", &summary)?);
    c.summary = summary;
    Ok(c)
}

/// Range of `scaled / reference` over `t >= t_min`.
pub fn collapse_range(times: &[f64], scaled: &[f64], reference: &[f64], t_min: f64) -> (f64, f64) {
    times
        .iter()
        .zip(scaled.iter().zip(reference))
        .filter(|(t, (_, r))| **t >= t_min && **r > 0.0)
        .map(|(_, (s, r))| s / r)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

fn q_statistics(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<QStatistics, CliError> {
    let noise = &cfg.noise;
    let times = sample_times(noise.source_params.period(), cfg.statistics_t_end)?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..noise.n_realizations as u64)
            .into_par_iter()
            .map(|r| source_integral(noise, r, &times, &cfg.integ))
            .collect()
    });
    QStatistics::from_realizations(times, outcomes).map_err(core("q statistics"))
}
