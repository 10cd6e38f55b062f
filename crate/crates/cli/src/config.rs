//! Flat `key = value` scenario files.
//!
//! Blank lines and `#` comments are ignored. Unknown and repeated keys are
//! errors. Every key has a default, so an empty file is a valid scenario.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use stochvort::noise::fmt17;
use stochvort::operators::Kernel;
use stochvort::presets::InitialPreset;
use stochvort::solver::{Constants, Exponents};

use crate::error::{CliError, Result};

/// How the initial data are scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum U0Scale {
    /// Fixed `|U₀|_{3/2}`.
    Absolute(f64),
    /// `|U₀|_{3/2} = f · C* / sup η` with the analytic `η` of the path.
    RelativeToThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    /// Full solve per path.
    Solve,
    /// Noise diagnostics only.
    Noise,
    /// Hitting probability of `exp(β(t) − νt)`.
    Hitting,
}

impl FromStr for McMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "solve" => Ok(Self::Solve),
            "noise" => Ok(Self::Noise),
            "hitting" => Ok(Self::Hitting),
            o => Err(format!("unknown mc.mode '{o}' (solve, noise, hitting)")),
        }
    }
}

impl McMode {
    fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Noise => "noise",
            Self::Hitting => "hitting",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub p: f64,
    pub horizon: f64,
    pub intervals: usize,
    pub grading: f64,
    pub n: usize,
    pub length: f64,
    pub channels: usize,
    pub kernel: Kernel,
    pub lambdas: Vec<f64>,
    pub u0_preset: InitialPreset,
    pub u0_seed: u64,
    pub u0_scale: U0Scale,
    pub tol: f64,
    pub max_iter: usize,
    pub probe: bool,
    pub constants: Option<Constants>,
    pub nonlinear: bool,
    pub calibration_seed: u64,
    pub snapshots: Vec<f64>,
    /// Test functions `cos(k·ξ) e_c` as `(mode, component)`, component from 0.
    pub pairing_modes: Vec<([i64; 3], usize)>,
    pub seed: u64,
    pub mc_mode: McMode,
    pub mc_paths: usize,
    pub mc_nu: f64,
    pub mc_r: f64,
    pub mc_t_max: f64,
    pub mc_steps: usize,
    pub mc_tail_r: Vec<f64>,
    pub mc_moments: Vec<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            p: 1.8,
            horizon: 0.04,
            intervals: 64,
            grading: 2.0,
            n: 32,
            length: 2.0 * std::f64::consts::PI,
            channels: 1,
            kernel: Kernel::Gaussian { eps: 0.5, mass: 1.0 },
            lambdas: vec![7.0],
            u0_preset: InitialPreset::TaylorGreen,
            u0_seed: 0,
            u0_scale: U0Scale::RelativeToThreshold(0.5),
            tol: 1e-8,
            max_iter: 12,
            probe: true,
            constants: None,
            nonlinear: true,
            calibration_seed: 5,
            snapshots: Vec::new(),
            pairing_modes: vec![([1, 0, 0], 1), ([0, 1, 1], 0)],
            seed: 1,
            mc_mode: McMode::Noise,
            mc_paths: 100,
            mc_nu: 1.0,
            mc_r: 2.0,
            mc_t_max: 50.0,
            mc_steps: 50_000,
            mc_tail_r: vec![2.0, 4.0, 8.0],
            mc_moments: vec![1.0, 2.0, 4.0],
        }
    }
}

pub const KEYS: &[&str] = &[
    "p",
    "T",
    "grid.M",
    "grid.gamma",
    "grid.n",
    "grid.L",
    "noise.N",
    "noise.kernel",
    "noise.eps",
    "noise.mass",
    "noise.lambda",
    "u0.preset",
    "u0.seed",
    "u0.norm32",
    "u0.relative_to_threshold",
    "picard.tol",
    "picard.max_iter",
    "picard.probe",
    "constants.C1",
    "constants.C2",
    "constants.Cstar",
    "model.nonlinear",
    "calibration.seed",
    "output.snapshots",
    "pairing.modes",
    "seed",
    "mc.mode",
    "mc.paths",
    "mc.nu",
    "mc.r",
    "mc.T_max",
    "mc.steps",
    "mc.tail_r",
    "mc.moments",
    "derived.q",
    "derived.r1",
    "derived.q_prime",
];

fn parse<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CliError::config(line, format!("{key}: cannot parse '{v}'")))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse(line, key, s.trim())).collect()
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(CliError::config(line, format!("{key}: expected true or false, got '{v}'"))),
    }
}

fn parse_modes(line: usize, v: &str) -> Result<Vec<([i64; 3], usize)>> {
    let mut out = Vec::new();
    for item in v.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(CliError::config(
                line,
                format!("pairing.modes: '{item}' must be k1,k2,k3,component"),
            ));
        }
        let k = [
            parse(line, "pairing.modes", parts[0])?,
            parse(line, "pairing.modes", parts[1])?,
            parse(line, "pairing.modes", parts[2])?,
        ];
        let c: usize = parse(line, "pairing.modes", parts[3])?;
        if !(1..=3).contains(&c) {
            return Err(CliError::config(line, "pairing.modes: component must be 1, 2 or 3"));
        }
        out.push((k, c - 1));
    }
    Ok(out)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(",")
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| CliError::config(line, format!("expected 'key = value', got '{content}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::config(line, format!("unknown key '{k}'")));
            }
            if let Some((first, _)) = entries.insert(k, (line, v)) {
                return Err(CliError::config(line, format!("key '{k}' repeated (first on line {first})")));
            }
        }

        let mut c = Self::default();
        let get = |k: &str| entries.get(k).copied();
        if let Some((l, v)) = get("p") {
            c.p = parse(l, "p", v)?;
        }
        if let Some((l, v)) = get("T") {
            c.horizon = parse(l, "T", v)?;
        }
        if let Some((l, v)) = get("grid.M") {
            c.intervals = parse(l, "grid.M", v)?;
        }
        if let Some((l, v)) = get("grid.gamma") {
            c.grading = parse(l, "grid.gamma", v)?;
        }
        if let Some((l, v)) = get("grid.n") {
            c.n = parse(l, "grid.n", v)?;
        }
        if let Some((l, v)) = get("grid.L") {
            c.length = parse(l, "grid.L", v)?;
        }
        if let Some((l, v)) = get("noise.N") {
            c.channels = parse(l, "noise.N", v)?;
        }
        let eps = get("noise.eps").map(|(l, v)| parse::<f64>(l, "noise.eps", v)).transpose()?;
        let mass = get("noise.mass").map(|(l, v)| parse::<f64>(l, "noise.mass", v)).transpose()?;
        if let Some((l, v)) = get("noise.kernel") {
            c.kernel = match v {
                "gaussian" => Kernel::Gaussian {
                    eps: eps.unwrap_or(0.5),
                    mass: mass.unwrap_or(1.0),
                },
                "mollified_dirac" => Kernel::MollifiedDirac { eps: eps.unwrap_or(0.5) },
                "zero" => Kernel::Zero,
                o => {
                    return Err(CliError::config(
                        l,
                        format!("noise.kernel: unknown kernel '{o}' (gaussian, mollified_dirac, zero)"),
                    ))
                }
            };
        } else if let Kernel::Gaussian { eps: e0, mass: m0 } = c.kernel {
            c.kernel = Kernel::Gaussian {
                eps: eps.unwrap_or(e0),
                mass: mass.unwrap_or(m0),
            };
        }
        if let Kernel::MollifiedDirac { .. } | Kernel::Zero = c.kernel {
            if let Some((l, _)) = get("noise.mass") {
                return Err(CliError::config(l, "noise.mass only applies to the gaussian kernel"));
            }
        }
        if let Kernel::Zero = c.kernel {
            if let Some((l, _)) = get("noise.eps") {
                return Err(CliError::config(l, "noise.eps does not apply to the zero kernel"));
            }
        }
        if let Err(e) = c.kernel.validate() {
            let line = get("noise.kernel").or(get("noise.eps")).map_or(0, |x| x.0);
            return Err(CliError::config(line, e.to_string()));
        }
        let lambda_line = get("noise.lambda").map_or(0, |x| x.0);
        if let Some((l, v)) = get("noise.lambda") {
            c.lambdas = parse_list(l, "noise.lambda", v)?;
        }
        if c.lambdas.len() == 1 && c.channels != 1 {
            c.lambdas = vec![c.lambdas[0]; c.channels];
        }
        if c.lambdas.len() != c.channels {
            return Err(CliError::config(
                lambda_line,
                format!("noise.lambda has {} values for {} channels", c.lambdas.len(), c.channels),
            ));
        }
        if let Some((l, v)) = get("u0.preset") {
            c.u0_preset = v.parse().map_err(|e: String| CliError::config(l, e))?;
        }
        if let Some((l, v)) = get("u0.seed") {
            c.u0_seed = parse(l, "u0.seed", v)?;
        }
        match (get("u0.norm32"), get("u0.relative_to_threshold")) {
            (Some(_), Some((l, _))) => {
                return Err(CliError::config(
                    l,
                    "set only one of u0.norm32 and u0.relative_to_threshold",
                ))
            }
            (Some((l, v)), None) => c.u0_scale = U0Scale::Absolute(parse(l, "u0.norm32", v)?),
            (None, Some((l, v))) => {
                c.u0_scale = U0Scale::RelativeToThreshold(parse(l, "u0.relative_to_threshold", v)?)
            }
            (None, None) => {}
        }
        if let Some((l, v)) = get("picard.tol") {
            c.tol = parse(l, "picard.tol", v)?;
        }
        if let Some((l, v)) = get("picard.max_iter") {
            c.max_iter = parse(l, "picard.max_iter", v)?;
        }
        if let Some((l, v)) = get("picard.probe") {
            c.probe = parse_bool(l, "picard.probe", v)?;
        }
        match (get("constants.C1"), get("constants.C2")) {
            (Some((l1, v1)), Some((l2, v2))) => {
                let c1: f64 = parse(l1, "constants.C1", v1)?;
                let c2: f64 = parse(l2, "constants.C2", v2)?;
                if !(c1 > 0.0 && c2 > 0.0) {
                    return Err(CliError::config(l1, "constants must be positive"));
                }
                let mut k = Constants::from_c1_c2(c1, c2);
                if let Some((l, v)) = get("constants.Cstar") {
                    k.c_star = parse(l, "constants.Cstar", v)?;
                }
                c.constants = Some(k);
            }
            (None, None) => {
                if let Some((l, _)) = get("constants.Cstar") {
                    return Err(CliError::config(l, "constants.Cstar needs constants.C1 and constants.C2"));
                }
            }
            (Some((l, _)), None) | (None, Some((l, _))) => {
                return Err(CliError::config(l, "set both constants.C1 and constants.C2"))
            }
        }
        if let Some((l, v)) = get("model.nonlinear") {
            c.nonlinear = parse_bool(l, "model.nonlinear", v)?;
        }
        if let Some((l, v)) = get("calibration.seed") {
            c.calibration_seed = parse(l, "calibration.seed", v)?;
        }
        if let Some((l, v)) = get("output.snapshots") {
            c.snapshots = parse_list(l, "output.snapshots", v)?;
        }
        if let Some((l, v)) = get("pairing.modes") {
            c.pairing_modes = parse_modes(l, v)?;
        }
        if let Some((l, v)) = get("seed") {
            c.seed = parse(l, "seed", v)?;
        }
        if let Some((l, v)) = get("mc.mode") {
            c.mc_mode = v.parse().map_err(|e: String| CliError::config(l, e))?;
        }
        if let Some((l, v)) = get("mc.paths") {
            c.mc_paths = parse(l, "mc.paths", v)?;
        }
        if let Some((l, v)) = get("mc.nu") {
            c.mc_nu = parse(l, "mc.nu", v)?;
        }
        if let Some((l, v)) = get("mc.r") {
            c.mc_r = parse(l, "mc.r", v)?;
        }
        if let Some((l, v)) = get("mc.T_max") {
            c.mc_t_max = parse(l, "mc.T_max", v)?;
        }
        if let Some((l, v)) = get("mc.steps") {
            c.mc_steps = parse(l, "mc.steps", v)?;
        }
        if let Some((l, v)) = get("mc.tail_r") {
            c.mc_tail_r = parse_list(l, "mc.tail_r", v)?;
        }
        if let Some((l, v)) = get("mc.moments") {
            c.mc_moments = parse_list(l, "mc.moments", v)?;
        }

        // Derived exponents are recomputed; echoed values must agree.
        let line_p = get("p").map_or(0, |x| x.0);
        let e = Exponents::new(c.p).map_err(|e| CliError::config(line_p, e.to_string()))?;
        for (key, value) in [("derived.q", e.q), ("derived.r1", e.r1), ("derived.q_prime", e.q_prime)] {
            if let Some((l, v)) = get(key) {
                let given: f64 = parse(l, key, v)?;
                if (given - value).abs() > 1e-12 * value.abs() {
                    return Err(CliError::config(l, format!("{key} = {given} disagrees with p (expected {value})")));
                }
            }
        }
        c.validate(|k| get(k).map_or(0, |x| x.0))?;
        Ok(c)
    }

    fn validate(&self, line: impl Fn(&str) -> usize) -> Result<()> {
        let bad = |k: &str, m: String| Err(CliError::config(line(k), m));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("T", format!("T must be positive, got {}", self.horizon));
        }
        if self.intervals == 0 {
            return bad("grid.M", "grid.M must be positive".into());
        }
        if !(self.grading >= 1.0) {
            return bad("grid.gamma", format!("grid.gamma must be ≥ 1, got {}", self.grading));
        }
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return bad("grid.n", format!("grid.n must be even and ≥ 8, got {}", self.n));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return bad("grid.L", format!("grid.L must be positive, got {}", self.length));
        }
        if self.lambdas.iter().any(|l| !l.is_finite()) {
            return bad("noise.lambda", "noise.lambda must be finite".into());
        }
        match self.u0_scale {
            U0Scale::Absolute(v) if !(v >= 0.0 && v.is_finite()) => {
                return bad("u0.norm32", format!("u0.norm32 must be non-negative, got {v}"))
            }
            U0Scale::RelativeToThreshold(v) if !(v >= 0.0 && v.is_finite()) => {
                return bad(
                    "u0.relative_to_threshold",
                    format!("u0.relative_to_threshold must be non-negative, got {v}"),
                )
            }
            _ => {}
        }
        if !(self.tol > 0.0) {
            return bad("picard.tol", "picard.tol must be positive".into());
        }
        if self.max_iter == 0 {
            return bad("picard.max_iter", "picard.max_iter must be positive".into());
        }
        if self.snapshots.iter().any(|t| !(*t >= 0.0 && *t <= self.horizon)) {
            return bad("output.snapshots", "snapshot times must lie in [0, T]".into());
        }
        if !(self.mc_nu > 0.0) {
            return bad("mc.nu", "mc.nu must be positive".into());
        }
        if !(self.mc_r > 1.0) {
            return bad("mc.r", "mc.r must exceed 1".into());
        }
        if self.mc_tail_r.iter().any(|r| !(*r > 1.0)) {
            return bad("mc.tail_r", "mc.tail_r values must exceed 1".into());
        }
        if !(self.mc_t_max > 0.0) || self.mc_steps == 0 {
            return bad("mc.T_max", "mc.T_max and mc.steps must be positive".into());
        }
        Ok(())
    }

    pub fn exponents(&self) -> Exponents {
        Exponents::new(self.p).expect("validated on load")
    }

    /// The effective configuration, re-loadable with [`ScenarioConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let e = self.exponents();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("seed", self.seed.to_string());
        kv("p", fmt17(self.p));
        kv("derived.q", fmt17(e.q));
        kv("derived.r1", fmt17(e.r1));
        kv("derived.q_prime", fmt17(e.q_prime));
        kv("T", fmt17(self.horizon));
        kv("grid.M", self.intervals.to_string());
        kv("grid.gamma", fmt17(self.grading));
        kv("grid.n", self.n.to_string());
        kv("grid.L", fmt17(self.length));
        kv("noise.N", self.channels.to_string());
        match self.kernel {
            Kernel::Gaussian { eps, mass } => {
                kv("noise.kernel", "gaussian".into());
                kv("noise.eps", fmt17(eps));
                kv("noise.mass", fmt17(mass));
            }
            Kernel::MollifiedDirac { eps } => {
                kv("noise.kernel", "mollified_dirac".into());
                kv("noise.eps", fmt17(eps));
            }
            Kernel::Zero => kv("noise.kernel", "zero".into()),
        }
        kv("noise.lambda", join(&self.lambdas));
        kv("u0.preset", self.u0_preset.to_string());
        kv("u0.seed", self.u0_seed.to_string());
        match self.u0_scale {
            U0Scale::Absolute(v) => kv("u0.norm32", fmt17(v)),
            U0Scale::RelativeToThreshold(v) => kv("u0.relative_to_threshold", fmt17(v)),
        }
        kv("picard.tol", fmt17(self.tol));
        kv("picard.max_iter", self.max_iter.to_string());
        kv("picard.probe", self.probe.to_string());
        if let Some(c) = self.constants {
            kv("constants.C1", fmt17(c.c1));
            kv("constants.C2", fmt17(c.c2));
            kv("constants.Cstar", fmt17(c.c_star));
        }
        kv("model.nonlinear", self.nonlinear.to_string());
        kv("calibration.seed", self.calibration_seed.to_string());
        kv("output.snapshots", join(&self.snapshots));
        kv(
            "pairing.modes",
            self.pairing_modes
                .iter()
                .map(|(k, c)| format!("{},{},{},{}", k[0], k[1], k[2], c + 1))
                .collect::<Vec<_>>()
                .join(";"),
        );
        kv("mc.mode", self.mc_mode.name().into());
        kv("mc.paths", self.mc_paths.to_string());
        kv("mc.nu", fmt17(self.mc_nu));
        kv("mc.r", fmt17(self.mc_r));
        kv("mc.T_max", fmt17(self.mc_t_max));
        kv("mc.steps", self.mc_steps.to_string());
        kv("mc.tail_r", join(&self.mc_tail_r));
        kv("mc.moments", join(&self.mc_moments));
        s
    }
}

/// Shipped scenarios.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "kato_small" => Some(include_str!("../../../configs/kato_small.cfg")),
        "linear_check" => Some(include_str!("../../../configs/linear_check.cfg")),
        "dirac_limit" => Some(include_str!("../../../configs/dirac_limit.cfg")),
        "hitting" => Some(include_str!("../../../configs/hitting.cfg")),
        "tail" => Some(include_str!("../../../configs/tail.cfg")),
        "moments_small" => Some(include_str!("../../../configs/moments_small.cfg")),
        _ => None,
    }
}

pub const BUILTIN_NAMES: &[&str] = &["kato_small", "linear_check", "dirac_limit", "hitting", "tail", "moments_small"];
