//! Flat `key = value` configuration with a fixed key registry.
//!
//! Values are layered: registry defaults, then the config file, then
//! command-line overrides. Every key a command consumes is echoed into the
//! preamble of its output files.

use crate::error::CliError;
use constrained_oscillator_core::analysis::{ClassifierConfig, Grid};
use constrained_oscillator_core::integrator::IntegratorConfig;
use constrained_oscillator_core::robustness::NoiseConfig;
use constrained_oscillator_core::{Error, Params};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CONSTRAINED_OSCILLATOR_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Simulate,
    Verify,
    Poincare,
    PhaseDiagram,
    Robustness,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Simulate,
        Command::Verify,
        Command::Poincare,
        Command::PhaseDiagram,
        Command::Robustness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Poincare => "poincare",
            Command::PhaseDiagram => "phase-diagram",
            Command::Robustness => "robustness",
        }
    }
}

const ALL: &[Command] = &Command::ALL;
const TRAJ: &[Command] = &[Command::Simulate, Command::Verify];
const IC: &[Command] = &[Command::Simulate, Command::Verify, Command::Robustness];
const T_END: &[Command] = &[Command::Simulate, Command::Verify, Command::Robustness];
const NOISE: &[Command] = &[Command::Verify, Command::Robustness];
const POINCARE: &[Command] = &[Command::Poincare];
const DIAGRAM: &[Command] = &[Command::PhaseDiagram];
const ROBUST: &[Command] = &[Command::Robustness];

/// Whether a key influences results or only how a run is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Echoed into every data file and hashed into its name.
    Model,
    /// Recorded in the index file only.
    Execution,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub default: &'static str,
    pub commands: &'static [Command],
    pub scope: Scope,
    pub help: &'static str,
}

const fn key(
    name: &'static str,
    default: &'static str,
    commands: &'static [Command],
    help: &'static str,
) -> KeySpec {
    KeySpec {
        name,
        default,
        commands,
        scope: Scope::Model,
        help,
    }
}

pub const REGISTRY: &[KeySpec] = &[
    key("m", "1", ALL, "oscillator mass"),
    key("h", "0", ALL, "drive amplitude"),
    key("omega", "1", ALL, "drive angular frequency"),
    key("kappa", "1", ALL, "field protocol energy scale"),
    key("lambda", "1", ALL, "constraint value of <q^2>"),
    key("purity", "1", ALL, "state purity, 0 < purity <= 1"),
    key("rel_tol", "1e-10", ALL, "relative integration tolerance"),
    key("abs_tol", "1e-10", ALL, "absolute integration tolerance"),
    key("dt_init", "1e-3", ALL, "initial step size"),
    key("dt_min", "1e-12", ALL, "smallest step size"),
    key("dt_max", "1", ALL, "largest step size"),
    key(
        "guard",
        "0.999999999",
        ALL,
        "largest admissible |<q>|/sqrt(lambda)",
    ),
    key("max_steps", "50000000", ALL, "step budget per integration"),
    key("q0", "0.5", IC, "initial <q>"),
    key("p0", "0.2", IC, "initial <p>"),
    key("t_end", "100", T_END, "end of the integration span"),
    key("sample_dt", "0.1", TRAJ, "output sample spacing"),
    key(
        "epsilon",
        "0",
        &[Command::Verify],
        "noise intensity added to both protocols",
    ),
    key(
        "seed",
        "0",
        NOISE,
        "master seed of the noise-source streams",
    ),
    key(
        "ic_radius",
        "0.05",
        NOISE,
        "radius of the disk noise-source initial conditions are drawn from",
    ),
    key(
        "max_regenerations",
        "8",
        NOISE,
        "redraws per noise source after a guard hit",
    ),
    key("source_m", "0.4", NOISE, "noise-source mass"),
    key("source_h", "0.1", NOISE, "noise-source drive amplitude"),
    key("source_omega", "1", NOISE, "noise-source drive frequency"),
    key("source_purity", "1", NOISE, "noise-source purity"),
    key("phase", "0", POINCARE, "section phase in [0, 2 pi)"),
    key("n_periods", "1000", POINCARE, "drive periods per section"),
    key(
        "ics",
        "0.5:0.2",
        POINCARE,
        "initial conditions q:p, comma separated",
    ),
    key(
        "gallery",
        "false",
        POINCARE,
        "run the route-to-chaos (h, m) scan instead of (m, h)",
    ),
    key("q_min", "-0.6", DIAGRAM, "grid lower q0"),
    key("q_max", "0.6", DIAGRAM, "grid upper q0"),
    key("nq", "101", DIAGRAM, "grid points along q0"),
    key("p_min", "-0.3", DIAGRAM, "grid lower p0"),
    key("p_max", "0.3", DIAGRAM, "grid upper p0"),
    key("np", "101", DIAGRAM, "grid points along p0"),
    key(
        "m_list",
        "",
        DIAGRAM,
        "masses, comma separated; empty uses m",
    ),
    key(
        "h_list",
        "",
        DIAGRAM,
        "drive amplitudes, comma separated; empty uses h",
    ),
    key(
        "transient_periods",
        "200",
        DIAGRAM,
        "discarded drive periods",
    ),
    key(
        "measure_periods",
        "2000",
        DIAGRAM,
        "drive periods measured after the transient",
    ),
    key(
        "lyapunov_threshold",
        "0.01",
        DIAGRAM,
        "exponent above which an orbit is chaotic",
    ),
    key(
        "qbar_threshold",
        "0.05",
        DIAGRAM,
        "|q-bar| above which an orbit breaks the symmetry",
    ),
    key(
        "renorm_interval",
        "1",
        DIAGRAM,
        "drive periods between renormalizations",
    ),
    key(
        "perturbation_size",
        "1e-8",
        DIAGRAM,
        "companion-orbit separation",
    ),
    key(
        "epsilons",
        "1e-4,1e-3,1e-2",
        ROBUST,
        "noise intensities, comma separated",
    ),
    key("delta", "1e-3", ROBUST, "initial-condition mismatch"),
    key(
        "n_realizations",
        "100",
        ROBUST,
        "noise realizations per intensity",
    ),
    key(
        "fit_t_min",
        "10",
        ROBUST,
        "start of the power-law fit window",
    ),
    key(
        "q_statistics",
        "false",
        ROBUST,
        "also compute noise-source statistics",
    ),
    key(
        "statistics_t_end",
        "10000",
        ROBUST,
        "span of the noise-source statistics",
    ),
    KeySpec {
        name: "output",
        default: "output",
        commands: ALL,
        scope: Scope::Execution,
        help: "output directory",
    },
    KeySpec {
        name: "workers",
        default: "0",
        commands: ALL,
        scope: Scope::Execution,
        help: "worker threads; 0 reads CONSTRAINED_OSCILLATOR_WORKERS, then the CPU count",
    },
];

pub fn spec(name: &str) -> Option<&'static KeySpec> {
    REGISTRY.iter().find(|k| k.name == name)
}

/// Model keys consumed by `command`, in registry order.
pub fn model_keys(command: Command) -> impl Iterator<Item = &'static KeySpec> {
    REGISTRY
        .iter()
        .filter(move |k| k.scope == Scope::Model && k.commands.contains(&command))
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::config(
                "<file>",
                format!("line {}: expected `key = value`", n + 1),
            ));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// `--key value` and `--key=value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(body) = arg.strip_prefix("--") else {
            return Err(CliError::config(arg, "expected `--key value`".into()));
        };
        if let Some((k, v)) = body.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            let v = it
                .next()
                .ok_or_else(|| CliError::config(body, "missing value".into()))?;
            out.push((body.to_string(), v.clone()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub integ: IntegratorConfig,
    pub classifier: ClassifierConfig,
    pub noise: NoiseConfig,
    pub ic: (f64, f64),
    pub t_end: f64,
    pub sample_dt: f64,
    pub phase: f64,
    pub n_periods: usize,
    pub ics: Vec<(f64, f64)>,
    pub gallery: bool,
    pub grid: Grid,
    pub m_list: Vec<f64>,
    pub h_list: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub fit_t_min: f64,
    pub q_statistics: bool,
    pub statistics_t_end: f64,
    pub output: PathBuf,
    pub workers: usize,
    /// Effective value of every model key the command consumes.
    pub echo: Vec<(&'static str, String)>,
}

struct Values<'a> {
    map: &'a BTreeMap<&'static str, String>,
}

impl Values<'_> {
    fn raw(&self, key: &'static str) -> Result<&str, CliError> {
        let v = self.map[key].as_str();
        if v.is_empty() && !spec(key).is_some_and(|s| s.default.is_empty()) {
            return Err(CliError::config(key, "missing value".into()));
        }
        Ok(v)
    }

    fn f64(&self, key: &'static str) -> Result<f64, CliError> {
        let v = self.raw(key)?;
        let x: f64 = v
            .parse()
            .map_err(|_| CliError::config(key, format!("`{v}` is not a number")))?;
        if !x.is_finite() {
            return Err(CliError::config(key, format!("`{v}` is not finite")));
        }
        Ok(x)
    }

    fn uint(&self, key: &'static str) -> Result<u64, CliError> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| CliError::config(key, format!("`{v}` is not a non-negative integer")))
    }

    fn usize(&self, key: &'static str) -> Result<usize, CliError> {
        Ok(self.uint(key)? as usize)
    }

    fn bool(&self, key: &'static str) -> Result<bool, CliError> {
        match self.raw(key)? {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(CliError::config(key, format!("`{v}` is not a boolean"))),
        }
    }

    fn list(&self, key: &'static str) -> Result<Vec<f64>, CliError> {
        let v = self.raw(key)?;
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::config(key, format!("`{s}` is not a number")))
            })
            .collect()
    }

    fn pairs(&self, key: &'static str) -> Result<Vec<(f64, f64)>, CliError> {
        let v = self.raw(key)?;
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                let parsed = s.split_once(':').and_then(|(a, b)| {
                    let q = a.trim().parse::<f64>().ok()?;
                    let p = b.trim().parse::<f64>().ok()?;
                    (q.is_finite() && p.is_finite()).then_some((q, p))
                });
                parsed.ok_or_else(|| CliError::config(key, format!("`{s}` is not a `q:p` pair")))
            })
            .collect()
    }
}

/// Attributes a core validation error to the config key it came from.
fn constraint(key_prefix: &str, e: Error) -> CliError {
    match e {
        Error::InvalidParameter { name, constraint } => CliError::Config {
            key: format!("{key_prefix}{name}"),
            message: format!("requires {constraint}"),
        },
        other => CliError::core("configuration", other),
    }
}

fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

impl RunConfig {
    /// Layers `file` and then `overrides` over the registry defaults and validates the result.
    pub fn build(
        command: Command,
        file: &[(String, String)],
        overrides: &[(String, String)],
    ) -> Result<RunConfig, CliError> {
        let mut map: BTreeMap<&'static str, String> = REGISTRY
            .iter()
            .map(|k| (k.name, k.default.to_string()))
            .collect();
        for (k, v) in file.iter().chain(overrides) {
            let spec = spec(k).ok_or_else(|| CliError::config(k, "unknown key".into()))?;
            map.insert(spec.name, v.clone());
        }
        let vals = Values { map: &map };

        let params = Params {
            m: vals.f64("m")?,
            h: vals.f64("h")?,
            omega: vals.f64("omega")?,
            kappa: vals.f64("kappa")?,
            lambda: vals.f64("lambda")?,
            purity: vals.f64("purity")?,
        };
        params.validate().map_err(|e| constraint("", e))?;
        let integ = IntegratorConfig {
            rel_tol: vals.f64("rel_tol")?,
            abs_tol: vals.f64("abs_tol")?,
            dt_init: vals.f64("dt_init")?,
            dt_min: vals.f64("dt_min")?,
            dt_max: vals.f64("dt_max")?,
            guard: vals.f64("guard")?,
            max_steps: vals.usize("max_steps")?,
        };
        integ.validate().map_err(|e| constraint("", e))?;

        let classifier = ClassifierConfig {
            transient_periods: vals.usize("transient_periods")?,
            measure_periods: vals.usize("measure_periods")?,
            lyapunov_threshold: vals.f64("lyapunov_threshold")?,
            qbar_threshold: vals.f64("qbar_threshold")?,
            renorm_interval: vals.usize("renorm_interval")?,
            perturbation_size: vals.f64("perturbation_size")?,
        };
        let source_params = Params {
            m: vals.f64("source_m")?,
            h: vals.f64("source_h")?,
            omega: vals.f64("source_omega")?,
            purity: vals.f64("source_purity")?,
            ..Params::default()
        };
        let noise = NoiseConfig {
            epsilon: vals.f64("epsilon")?,
            seed: vals.uint("seed")?,
            source_params,
            ic_radius: vals.f64("ic_radius")?,
            n_realizations: vals.usize("n_realizations")?,
            max_regenerations: vals.uint("max_regenerations")?.min(u32::MAX as u64) as u32,
        };
        let grid = Grid {
            q_min: vals.f64("q_min")?,
            q_max: vals.f64("q_max")?,
            nq: vals.usize("nq")?,
            p_min: vals.f64("p_min")?,
            p_max: vals.f64("p_max")?,
            np: vals.usize("np")?,
        };

        let workers = match vals.usize("workers")? {
            0 => default_workers(),
            n => n,
        };
        let cfg = RunConfig {
            command,
            params,
            integ,
            classifier,
            noise,
            ic: (vals.f64("q0")?, vals.f64("p0")?),
            t_end: vals.f64("t_end")?,
            sample_dt: vals.f64("sample_dt")?,
            phase: vals.f64("phase")?,
            n_periods: vals.usize("n_periods")?,
            ics: vals.pairs("ics")?,
            gallery: vals.bool("gallery")?,
            grid,
            m_list: vals.list("m_list")?,
            h_list: vals.list("h_list")?,
            epsilons: vals.list("epsilons")?,
            delta: vals.f64("delta")?,
            fit_t_min: vals.f64("fit_t_min")?,
            q_statistics: vals.bool("q_statistics")?,
            statistics_t_end: vals.f64("statistics_t_end")?,
            output: PathBuf::from(vals.raw("output")?),
            workers,
            echo: model_keys(command)
                .map(|k| (k.name, map[k.name].clone()))
                .collect(),
        };
        cfg.validate_for_command()?;
        Ok(cfg)
    }

    fn validate_for_command(&self) -> Result<(), CliError> {
        let need = |ok: bool, key: &str, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::config(key, format!("requires {what}")))
            }
        };
        match self.command {
            Command::Simulate | Command::Verify => {
                need(self.t_end >= 0.0, "t_end", "t_end >= 0")?;
                need(self.sample_dt > 0.0, "sample_dt", "sample_dt > 0")?;
                if self.command == Command::Verify {
                    self.validate_noise()?;
                }
            }
            Command::Poincare => {
                need(!self.ics.is_empty(), "ics", "at least one q:p pair")?;
                need(
                    (0.0..std::f64::consts::TAU).contains(&self.phase),
                    "phase",
                    "0 <= phase < 2 pi",
                )?;
            }
            Command::PhaseDiagram => {
                self.classifier.validate().map_err(|e| constraint("", e))?;
                self.grid.validate().map_err(|e| match e {
                    Error::InvalidParameter { constraint, .. } => CliError::Config {
                        key: "nq".into(),
                        message: format!("grid requires {constraint}"),
                    },
                    other => CliError::core("configuration", other),
                })?;
                for &m in &self.m_list {
                    need(m > 0.0, "m_list", "every mass > 0")?;
                }
            }
            Command::Robustness => {
                need(self.t_end > 0.0, "t_end", "t_end > 0")?;
                need(
                    !self.epsilons.is_empty(),
                    "epsilons",
                    "at least one intensity",
                )?;
                need(
                    self.epsilons.iter().all(|e| *e >= 0.0),
                    "epsilons",
                    "every epsilon >= 0",
                )?;
                need(
                    self.noise.n_realizations >= 2,
                    "n_realizations",
                    "n_realizations >= 2",
                )?;
                need(self.fit_t_min > 0.0, "fit_t_min", "fit_t_min > 0")?;
                if self.q_statistics {
                    need(
                        self.noise.n_realizations >= 10,
                        "n_realizations",
                        "n_realizations >= 10 for q_statistics",
                    )?;
                    need(
                        self.statistics_t_end > 0.0,
                        "statistics_t_end",
                        "statistics_t_end > 0",
                    )?;
                }
                self.validate_noise()?;
            }
        }
        Ok(())
    }

    fn validate_noise(&self) -> Result<(), CliError> {
        self.noise
            .source_params
            .validate()
            .map_err(|e| constraint("source_", e))?;
        self.noise.validate().map_err(|e| constraint("", e))
    }

    /// Hex SHA-256 prefix over the command and its echoed model keys.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.command.name().as_bytes());
        for (k, v) in &self.echo {
            hasher.update(b"\n");
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
        }
        hex::encode(hasher.finalize())[..12].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(command: Command, text: &str) -> Result<RunConfig, CliError> {
        RunConfig::build(command, &parse_text(text)?, &[])
    }

    #[test]
    fn chaotic_parameters_from_file() {
        let cfg = build(
            Command::Simulate,
            "m = 0.4\nh = 0.1 # drive\nomega = 1\npurity = 1\n",
        )
        .unwrap();
        assert_eq!(cfg.params, Params::new(0.4, 0.1, 1.0, 1.0).unwrap());
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = build(Command::Verify, "").unwrap();
        assert_eq!(cfg.params, Params::default());
        assert_eq!(cfg.integ, IntegratorConfig::default());
        assert!(cfg
            .echo
            .iter()
            .any(|(k, v)| *k == "rel_tol" && v == "1e-10"));
        assert!(cfg.echo.iter().any(|(k, v)| *k == "kappa" && v == "1"));
    }

    #[test]
    fn purity_out_of_range_names_constraint() {
        let err = build(Command::Simulate, "purity = 1.5").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("purity") && msg.contains("0 < purity <= 1"),
            "{msg}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_and_malformed_keys() {
        assert!(build(Command::Simulate, "mass = 1")
            .unwrap_err()
            .to_string()
            .contains("mass"));
        assert!(build(Command::Simulate, "m 1").is_err());
        assert!(build(Command::Simulate, "m =")
            .unwrap_err()
            .to_string()
            .contains("missing"));
        assert!(build(Command::Simulate, "m = heavy").is_err());
        let err = build(Command::Verify, "source_purity = 2").unwrap_err();
        assert!(err.to_string().contains("source_purity"), "{err}");
    }

    #[test]
    fn overrides_win_over_file() {
        let file = parse_text("m = 0.4\nh = 0.1").unwrap();
        let over = parse_overrides(&["--m".into(), "0.3".into(), "--h=0.2".into()]).unwrap();
        let cfg = RunConfig::build(Command::Simulate, &file, &over).unwrap();
        assert_eq!((cfg.params.m, cfg.params.h), (0.3, 0.2));
        assert!(parse_overrides(&["--m".into()]).is_err());
        assert!(parse_overrides(&["m".into(), "1".into()]).is_err());
    }

    #[test]
    fn lists_and_pairs() {
        let cfg = build(
            Command::PhaseDiagram,
            "m_list = 0.23, 0.25,0.27\nnq = 3\nnp = 3",
        )
        .unwrap();
        assert_eq!(cfg.m_list, [0.23, 0.25, 0.27]);
        assert!(cfg.h_list.is_empty());
        let cfg = build(Command::Poincare, "ics = 0.1:0, -0.2:0.3").unwrap();
        assert_eq!(cfg.ics, [(0.1, 0.0), (-0.2, 0.3)]);
        assert!(build(Command::Poincare, "ics = 0.1").is_err());
        assert!(build(Command::Poincare, "ics =").is_err());
    }

    #[test]
    fn command_specific_checks() {
        assert!(build(Command::PhaseDiagram, "nq = 1").is_err());
        assert!(build(Command::PhaseDiagram, "transient_periods = 3000").is_err());
        assert!(build(Command::Robustness, "n_realizations = 1").is_err());
        assert!(build(Command::Robustness, "epsilons = -1e-3").is_err());
        // keys of other commands are accepted but not validated
        assert!(build(Command::Simulate, "nq = 1").is_ok());
    }

    #[test]
    fn echo_covers_consumed_keys_only() {
        for command in Command::ALL {
            let cfg = build(command, "").unwrap();
            let echoed: Vec<&str> = cfg.echo.iter().map(|(k, _)| *k).collect();
            let expected: Vec<&str> = model_keys(command).map(|k| k.name).collect();
            assert_eq!(echoed, expected);
            assert!(!echoed.contains(&"workers") && !echoed.contains(&"output"));
        }
        let sim: Vec<&str> = model_keys(Command::Simulate).map(|k| k.name).collect();
        assert!(!sim.contains(&"epsilons") && sim.contains(&"q0"));
    }

    #[test]
    fn hash_depends_on_model_keys_only() {
        let a = build(Command::Simulate, "").unwrap();
        let b = build(Command::Simulate, "workers = 3\noutput = elsewhere").unwrap();
        let c = build(Command::Simulate, "m = 0.9").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 12);
        assert_eq!(b.workers, 3);
    }
}
