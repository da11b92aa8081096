//! Flat `key = value` run configuration. Every key mirrors a command-line flag.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use trimap::classical_otoc::{DEFAULT_CENTERS, DEFAULT_SAMPLES};
use trimap::potential::{MapParams, DEFAULT_ALPHA};
use trimap::rng::DEFAULT_SEED;
use trimap::AveragingScheme;

use crate::CliError;

pub const DEFAULT_MAX_DIM: usize = 1 << 18;
pub const COMPANION_R: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Lyapunov,
    ClassicalOtoc,
    QuantumOtoc,
    Compare,
    ReturnTimes,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Lyapunov => "lyapunov",
            Command::ClassicalOtoc => "classical-otoc",
            Command::QuantumOtoc => "quantum-otoc",
            Command::Compare => "compare",
            Command::ReturnTimes => "return-times",
            Command::Sweep => "sweep",
        }
    }
}

pub const KEYS: &[&str] = &[
    "alpha",
    "beta",
    "r",
    "hbar-exp",
    "dim",
    "steps",
    "centers",
    "samples",
    "scheme",
    "prefactor",
    "fit-window",
    "t0",
    "trajectories",
    "traj-steps",
    "companion",
    "max-dim",
    "seed",
    "threads",
    "out",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub beta: f64,
    /// Round-off radii; lists are comma separated.
    pub r: Vec<f64>,
    /// `n` in `ħ = π⁻¹ 2^-n`, equivalently `D = 2^(n+1)`.
    pub hbar_exp: Vec<u32>,
    /// Explicit Hilbert dimension; replaces `hbar_exp` for quantum runs.
    pub dim: Option<usize>,
    pub steps: usize,
    pub centers: usize,
    pub samples: usize,
    /// `None` runs all three schemes.
    pub scheme: Option<AveragingScheme>,
    pub prefactor: bool,
    pub fit_window: Option<(usize, usize)>,
    pub t0: Vec<usize>,
    pub trajectories: usize,
    pub traj_steps: usize,
    /// Add an `r = 1e-6` run next to every quantum run.
    pub companion: bool,
    pub max_dim: usize,
    pub seed: u64,
    /// 0 uses the rayon default.
    pub threads: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            alpha: DEFAULT_ALPHA,
            beta: 0.0,
            r: vec![0.2],
            hbar_exp: vec![9],
            dim: None,
            steps: 10,
            centers: DEFAULT_CENTERS,
            samples: DEFAULT_SAMPLES,
            scheme: None,
            prefactor: true,
            fit_window: None,
            t0: vec![6, 10],
            trajectories: 16,
            traj_steps: 1_000_000,
            companion: false,
            max_dim: DEFAULT_MAX_DIM,
            seed: DEFAULT_SEED,
            threads: 0,
            out: PathBuf::from("out"),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "alpha" => self.alpha = parse(v)?,
            "beta" => self.beta = parse(v)?,
            "r" => self.r = parse_list(v)?,
            "hbar-exp" => self.hbar_exp = parse_list(v)?,
            "dim" => self.dim = if v == "none" { None } else { Some(parse(v)?) },
            "steps" => self.steps = parse(v)?,
            "centers" => self.centers = parse(v)?,
            "samples" => self.samples = parse(v)?,
            "scheme" => {
                self.scheme = if v.eq_ignore_ascii_case("all") {
                    None
                } else {
                    Some(v.parse()?)
                }
            }
            "prefactor" => self.prefactor = parse_switch(v)?,
            "fit-window" => {
                self.fit_window = if v == "none" {
                    None
                } else {
                    let (a, b) = v
                        .split_once(':')
                        .ok_or_else(|| format!("expected A:B, got '{v}'"))?;
                    Some((parse(a)?, parse(b)?))
                }
            }
            "t0" => self.t0 = parse_list(v)?,
            "trajectories" => self.trajectories = parse(v)?,
            "traj-steps" => self.traj_steps = parse(v)?,
            "companion" => self.companion = parse_switch(v)?,
            "max-dim" => self.max_dim = parse(v)?,
            "seed" => self.seed = parse(v)?,
            "threads" => self.threads = parse(v)?,
            "out" => self.out = PathBuf::from(v),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("{origin}:{}: expected 'key = value'", i + 1))
            })?;
            let key = key.trim();
            self.set(key, value).map_err(|e| {
                CliError::Validation(format!("{origin}:{}: key '{key}': {e}", i + 1))
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// The resolved configuration in config-file form.
    pub fn to_config_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "# trimap {}", self.command.as_str());
        let _ = writeln!(s, "alpha = {:?}", self.alpha);
        let _ = writeln!(s, "beta = {:?}", self.beta);
        let _ = writeln!(
            s,
            "r = {}",
            join(self.r.iter().map(|r| format!("{r:?}")).collect())
        );
        let _ = writeln!(
            s,
            "hbar-exp = {}",
            join(self.hbar_exp.iter().map(|n| n.to_string()).collect())
        );
        let _ = writeln!(
            s,
            "dim = {}",
            self.dim.map_or("none".into(), |d| d.to_string())
        );
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "centers = {}", self.centers);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "scheme = {}", self.scheme.map_or("all", |x| x.as_str()));
        let _ = writeln!(s, "prefactor = {}", switch(self.prefactor));
        let _ = writeln!(
            s,
            "fit-window = {}",
            self.fit_window
                .map_or("none".into(), |(a, b)| format!("{a}:{b}"))
        );
        let _ = writeln!(
            s,
            "t0 = {}",
            join(self.t0.iter().map(|t| t.to_string()).collect())
        );
        let _ = writeln!(s, "trajectories = {}", self.trajectories);
        let _ = writeln!(s, "traj-steps = {}", self.traj_steps);
        let _ = writeln!(s, "companion = {}", switch(self.companion));
        let _ = writeln!(s, "max-dim = {}", self.max_dim);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }

    pub fn params(&self, r: f64) -> Result<MapParams, CliError> {
        MapParams::new(self.alpha, self.beta, r).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn schemes(&self) -> Vec<AveragingScheme> {
        self.scheme
            .map_or(AveragingScheme::ALL.to_vec(), |s| vec![s])
    }

    /// Hilbert dimensions of a quantum run, in order.
    pub fn dims(&self) -> Vec<usize> {
        match self.dim {
            Some(d) => vec![d],
            None => self.hbar_exp.iter().map(|&n| 1usize << (n + 1)).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.r.is_empty() {
            return fail("r list is empty".into());
        }
        for &r in &self.r {
            self.params(r)?;
        }
        if let Some(&n) = self.hbar_exp.iter().find(|&&n| n > 40) {
            return fail(format!("hbar-exp {n} is out of range (max 40)"));
        }
        if let Some((a, b)) = self.fit_window {
            if a >= b || b > self.steps {
                return fail(format!(
                    "fit-window {a}:{b} must satisfy A < B <= steps ({})",
                    self.steps
                ));
            }
        }
        let single_r = || {
            if self.r.len() != 1 {
                return fail(format!(
                    "{} takes a single r; use sweep for lists",
                    self.command.as_str()
                ));
            }
            Ok(())
        };
        let positive_r = || {
            if let Some(r) = self.r.iter().find(|&&r| r <= 0.0) {
                return fail(format!("{} needs r > 0, got {r}", self.command.as_str()));
            }
            Ok(())
        };
        let ensembles = || {
            if self.centers == 0 {
                return fail("centers must be at least 1".into());
            }
            if self.hbar_exp.is_empty() && self.dim.is_none() {
                return fail("hbar-exp list is empty".into());
            }
            Ok(())
        };
        let dims = || {
            for d in self.dims() {
                if d < 2 || d % 2 != 0 {
                    return fail(format!("dim must be a positive even integer, got {d}"));
                }
                if d > self.max_dim {
                    return fail(format!(
                        "dim {d} exceeds max-dim {}; raise max-dim if the memory is available",
                        self.max_dim
                    ));
                }
            }
            Ok(())
        };
        match self.command {
            Command::Lyapunov | Command::ReturnTimes => {
                positive_r()?;
                if self.trajectories == 0 || self.traj_steps == 0 {
                    return fail("trajectories and traj-steps must be positive".into());
                }
            }
            Command::ClassicalOtoc => {
                single_r()?;
                ensembles()?;
                if self.samples == 0 {
                    return fail("samples must be at least 1".into());
                }
            }
            Command::QuantumOtoc => {
                single_r()?;
                ensembles()?;
                dims()?;
            }
            Command::Compare => {
                ensembles()?;
                dims()?;
                if self.samples == 0 {
                    return fail("samples must be at least 1".into());
                }
                if self.t0.is_empty() {
                    return fail("t0 list is empty".into());
                }
                if let Some(t) = self.t0.iter().find(|&&t| t > self.steps) {
                    return fail(format!("t0 = {t} is beyond steps = {}", self.steps));
                }
            }
            Command::Sweep => {
                ensembles()?;
                dims()?;
                if self.samples == 0 {
                    return fail("samples must be at least 1".into());
                }
            }
        }
        Ok(())
    }
}

fn parse<T: std::str::FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| format!("cannot parse '{}': {e}", v.trim()))
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn parse_switch(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on or off, got '{v}'")),
    }
}

fn switch(on: bool) -> &'static str {
    if on {
        "on"
    } else {
        "off"
    }
}
