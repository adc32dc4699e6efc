use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::schemes::Scheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Friction,
    Delamination,
    Bulk,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "friction" => Ok(ExperimentKind::Friction),
            "delamination" => Ok(ExperimentKind::Delamination),
            "bulk" => Ok(ExperimentKind::Bulk),
            _ => Err(Error::Config(format!("unknown experiment '{s}'"))),
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExperimentKind::Friction => "friction",
            ExperimentKind::Delamination => "delamination",
            ExperimentKind::Bulk => "bulk",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveformKind {
    TriangleCyclic,
    RampThenDrop,
}

impl FromStr for WaveformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "triangle_cyclic" | "triangle" => Ok(WaveformKind::TriangleCyclic),
            "ramp_then_drop" | "ramp" => Ok(WaveformKind::RampThenDrop),
            _ => Err(Error::Config(format!("unknown waveform '{s}'"))),
        }
    }
}

impl std::fmt::Display for WaveformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WaveformKind::TriangleCyclic => "triangle_cyclic",
            WaveformKind::RampThenDrop => "ramp_then_drop",
        })
    }
}

/// Everything needed to reproduce one run. Parsed from `key=value` lines; see
/// [`ExperimentConfig::set`] for the keys.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// 1, 2 or 3: `40 l x 2 l` elements.
    pub mesh_level: usize,
    pub tau: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub waveform: WaveformKind,
    /// Peak edge traction [Pa].
    pub amplitude: f64,
    pub period: f64,
    pub ramp_end: f64,
    pub contact_fraction: f64,
    pub sigma_y: f64,
    pub toughness: f64,
    pub k_adh: f64,
    pub young: f64,
    pub poisson: f64,
    pub density: f64,
    pub chi: f64,
    pub h_hard: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub eps: f64,
    pub alpha: f64,
    pub parallel: bool,
    pub out: PathBuf,
}

pub const BAR_LENGTH: f64 = 0.25;
pub const BAR_HEIGHT: f64 = 0.0125;

/// Loading amplitude that ruptures the delamination interface near 30% of a
/// 1 ms horizon.
pub const DELAMINATION_AMPLITUDE: f64 = 32e6;

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            experiment,
            mesh_level: 1,
            tau: 2e-6,
            t_end: 1e-3,
            scheme: Scheme::FractionalStep,
            waveform: WaveformKind::TriangleCyclic,
            amplitude: 60e6,
            period: 4e-4,
            ramp_end: 1e-3,
            contact_fraction: 0.9,
            sigma_y: 3e6,
            toughness: 187.5,
            k_adh: 75e9,
            young: 70e9,
            poisson: 0.35,
            density: 2700.0,
            chi: 2e-9,
            h_hard: 5e9,
            kappa1: 0.0,
            kappa2: 0.0,
            eps: 1e-3,
            alpha: 4e4,
            parallel: true,
            out: PathBuf::from("out"),
        };
        match experiment {
            ExperimentKind::Friction => base,
            ExperimentKind::Delamination => ExperimentConfig {
                tau: 2e-7,
                waveform: WaveformKind::RampThenDrop,
                amplitude: DELAMINATION_AMPLITUDE,
                contact_fraction: 0.1,
                ..base
            },
            ExperimentKind::Bulk => ExperimentConfig {
                tau: 1e-6,
                t_end: 2e-4,
                waveform: WaveformKind::RampThenDrop,
                amplitude: 150e6,
                ramp_end: 1e-4,
                sigma_y: 50e6,
                ..base
            },
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let num = || -> Result<f64> {
            let x: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("{key}: '{v}' is not a number")))?;
            if x.is_nan() {
                return Err(Error::Config(format!("{key}: NaN")));
            }
            Ok(x)
        };
        match key.trim() {
            "experiment" => {
                let kind: ExperimentKind = v.parse()?;
                if kind != self.experiment {
                    let out = std::mem::take(&mut self.out);
                    *self = ExperimentConfig::defaults(kind);
                    self.out = out;
                }
            }
            "mesh_level" => {
                self.mesh_level = v
                    .parse()
                    .map_err(|_| Error::Config(format!("mesh_level: '{v}' is not an integer")))?
            }
            "dt" | "tau" => self.tau = num()?,
            "t_end" => self.t_end = num()?,
            "scheme" => {
                self.scheme = v
                    .parse()
                    .map_err(|_| Error::Config(format!("unknown scheme '{v}' (cn, split, be)")))?
            }
            "waveform" => self.waveform = v.parse()?,
            "amplitude" => self.amplitude = num()?,
            "period" => self.period = num()?,
            "ramp_end" => self.ramp_end = num()?,
            "contact_fraction" => self.contact_fraction = num()?,
            "sigma_y" => self.sigma_y = num()?,
            "toughness" | "a2" => self.toughness = num()?,
            "k_adh" => self.k_adh = num()?,
            "young" => self.young = num()?,
            "poisson" => self.poisson = num()?,
            "density" => self.density = num()?,
            "chi" => self.chi = num()?,
            "h_hard" => self.h_hard = num()?,
            "kappa1" => self.kappa1 = num()?,
            "kappa2" => self.kappa2 = num()?,
            "eps" => self.eps = num()?,
            "alpha" => self.alpha = num()?,
            "parallel" => {
                self.parallel = match v {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(Error::Config(format!("parallel: '{v}' is not a boolean"))),
                }
            }
            "out" => self.out = PathBuf::from(v),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines; `#` starts a comment. An `experiment` line
    /// resets the defaults, so it is applied first.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let kind = match pairs.iter().rev().find(|(k, _)| k == "experiment") {
            Some((_, v)) => v.parse()?,
            None => ExperimentKind::Friction,
        };
        let mut cfg = ExperimentConfig::defaults(kind);
        for (k, v) in pairs.iter().filter(|(k, _)| k != "experiment") {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.tau).round() as usize
    }

    pub fn execution(&self) -> Execution {
        if self.parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if !(1..=3).contains(&self.mesh_level) {
            return err(format!("mesh_level {} not in 1..=3", self.mesh_level));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return err(format!("dt {} must be > 0", self.tau));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return err(format!("t_end {} must be > 0", self.t_end));
        }
        let ratio = self.t_end / self.tau;
        if ratio.round() < 1.0 {
            return err(format!("t_end / dt = {ratio} gives no time step"));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return err(format!("amplitude {} must be >= 0", self.amplitude));
        }
        if !(self.period > 0.0) || !(self.ramp_end > 0.0) {
            return err("period and ramp_end must be > 0".into());
        }
        if !(self.contact_fraction > 0.0 && self.contact_fraction <= 1.0) {
            return err(format!("contact_fraction {} not in (0, 1]", self.contact_fraction));
        }
        let nonneg = [
            ("sigma_y", self.sigma_y),
            ("toughness", self.toughness),
            ("chi", self.chi),
            ("h_hard", self.h_hard),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("alpha", self.alpha),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return err(format!("{name} {v} must be >= 0"));
            }
        }
        let positive = [
            ("k_adh", self.k_adh),
            ("young", self.young),
            ("density", self.density),
            ("eps", self.eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return err(format!("{name} {v} must be > 0"));
            }
        }
        if !(self.poisson > 0.0 && self.poisson < 0.5) {
            return err(format!("poisson {} not in (0, 0.5)", self.poisson));
        }
        match self.experiment {
            ExperimentKind::Friction if !(self.sigma_y > 0.0) => err("friction needs sigma_y > 0".into()),
            ExperimentKind::Delamination if !(self.toughness > 0.0) => err("delamination needs toughness > 0".into()),
            _ => Ok(()),
        }
    }

    /// `key=value` listing readable by [`ExperimentConfig::parse_str`].
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let invented = " # invented default, not a measured value";
        let w = &mut s;
        let _ = writeln!(w, "experiment={}", self.experiment);
        let _ = writeln!(w, "mesh_level={}", self.mesh_level);
        let _ = writeln!(w, "dt={:e}", self.tau);
        let _ = writeln!(w, "t_end={:e}", self.t_end);
        let _ = writeln!(w, "scheme={}", self.scheme);
        let _ = writeln!(w, "waveform={}", self.waveform);
        let default = ExperimentConfig::defaults(self.experiment);
        let tag = |same: bool| if same { invented } else { "" };
        let _ = writeln!(w, "amplitude={:e}{}", self.amplitude, tag(self.amplitude == default.amplitude));
        let _ = writeln!(w, "period={:e}{}", self.period, tag(self.period == default.period));
        let _ = writeln!(w, "ramp_end={:e}", self.ramp_end);
        let _ = writeln!(w, "contact_fraction={}", self.contact_fraction);
        let _ = writeln!(w, "sigma_y={:e}", self.sigma_y);
        let _ = writeln!(w, "toughness={}", self.toughness);
        let _ = writeln!(w, "k_adh={:e}", self.k_adh);
        let _ = writeln!(w, "young={:e}", self.young);
        let _ = writeln!(w, "poisson={}", self.poisson);
        let _ = writeln!(w, "density={}", self.density);
        let _ = writeln!(w, "chi={:e}", self.chi);
        if self.experiment == ExperimentKind::Bulk {
            let _ = writeln!(w, "h_hard={:e}{}", self.h_hard, tag(self.h_hard == default.h_hard));
            let _ = writeln!(w, "kappa1={:e}", self.kappa1);
            let _ = writeln!(w, "kappa2={:e}", self.kappa2);
            let _ = writeln!(w, "eps={:e}", self.eps);
            let _ = writeln!(w, "alpha={:e}{}", self.alpha, tag(self.alpha == default.alpha));
        }
        let _ = writeln!(w, "parallel={}", self.parallel);
        let _ = writeln!(w, "out={}", self.out.display());
        s
    }
}
