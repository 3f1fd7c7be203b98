//! Experiment configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, ModeSet};
use crate::geometry::{standard_warping, FourVector, LorentzMap, WarpingMatrix, Wedge};
use crate::wavepacket::{KgSolution, MomentumProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelConfig,
    pub modes: ModesConfig,
    #[serde(default)]
    pub wedge: WedgeConfig,
    #[serde(default)]
    pub packets: Vec<PacketConfig>,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: usize,
    pub mass: f64,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub momenta: Vec<Vec<f64>>,
    pub n_max: usize,
}

/// Wedge `Λ W_R` with `Λ` a boost along axis 1 followed by a rotation in the
/// (1,2) plane; `complement` selects the causal complement.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeConfig {
    #[serde(default)]
    pub rapidity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<f64>,
    #[serde(default)]
    pub complement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "one")]
    pub smoothness: f64,
}

/// Profile and rays for the propagation-cone decay scans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    #[serde(default = "zero_vec")]
    pub center: Vec<f64>,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "one")]
    pub smoothness: f64,
    #[serde(default = "outside_velocity")]
    pub outside_velocity: f64,
    #[serde(default)]
    pub inside_velocity: f64,
    #[serde(default = "ten")]
    pub tau_start: f64,
    #[serde(default = "hundred")]
    pub tau_end: f64,
    #[serde(default = "samples")]
    pub samples: usize,
    #[serde(default = "grid_points")]
    pub grid_points: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            center: zero_vec(),
            radius: 1.0,
            smoothness: 1.0,
            outside_velocity: outside_velocity(),
            inside_velocity: 0.0,
            tau_start: 10.0,
            tau_end: 100.0,
            samples: samples(),
            grid_points: grid_points(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub lorentz: f64,
    pub antisymmetry: f64,
    pub mass_shell: f64,
    pub warp: f64,
    pub defw: f64,
    pub unitarity: f64,
    pub identity: f64,
    pub quadrature: f64,
    pub eps_slope: f64,
    pub dreg: f64,
    pub regularizer: f64,
    pub decay_outside_slope: f64,
    pub decay_inside_slope: f64,
    pub order_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lorentz: 1e-12,
            antisymmetry: 1e-14,
            mass_shell: 1e-12,
            warp: 1e-12,
            defw: 1e-11,
            unitarity: 1e-12,
            identity: 1e-13,
            quadrature: 1e-6,
            eps_slope: 0.15,
            dreg: 1e-6,
            regularizer: 1e-3,
            decay_outside_slope: -4.0,
            decay_inside_slope: -1.0,
            order_margin: 1e-9,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn ten() -> f64 {
    10.0
}
fn hundred() -> f64 {
    100.0
}
fn zero_vec() -> Vec<f64> {
    vec![0.0]
}
fn outside_velocity() -> f64 {
    3.0
}
fn samples() -> usize {
    24
}
fn grid_points() -> usize {
    4096
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .unwrap_or("<document>")
                .to_string();
            bad(&field, e.message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad("--config", format!("cannot read {}: {e}", path.display())))?;
        Config::from_toml_str(&text)
    }

    /// The bundled default experiment.
    pub fn default_experiment() -> Config {
        Config::from_toml_str(DEFAULT_CONFIG).expect("bundled config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.model.dimension;
        if d < 2 {
            return Err(bad("model.dimension", "must be >= 2"));
        }
        if !(self.model.mass > 0.0) || !self.model.mass.is_finite() {
            return Err(bad("model.mass", "must be positive"));
        }
        if !(self.model.kappa >= 0.0) || !self.model.kappa.is_finite() {
            return Err(bad("model.kappa", "must be finite and >= 0"));
        }
        if self.model.eta.is_some() && d != 4 {
            return Err(bad("model.eta", format!("only allowed for dimension 4, got {d}")));
        }
        if self.modes.momenta.is_empty() {
            return Err(bad("modes.momenta", "need at least one mode"));
        }
        if let Some(k) = self.modes.momenta.iter().find(|k| k.len() != d - 1) {
            return Err(bad("modes.momenta", format!("mode {k:?} needs {} components", d - 1)));
        }
        ModeSet::new(d, self.model.mass, self.modes.momenta.clone())
            .map_err(|e| bad("modes.momenta", e.to_string()))?;
        if self.modes.n_max == 0 || self.modes.n_max > 6 {
            return Err(bad("modes.n_max", "must lie in 1..=6"));
        }
        if self.modes.momenta.len().pow(self.modes.n_max as u32) > 20_000 {
            return Err(bad("modes.n_max", "top sector exceeds 20000 tuples"));
        }
        if self.wedge.rotation.is_some() && d < 3 {
            return Err(bad("wedge.rotation", "needs dimension >= 3"));
        }
        if !self.wedge.rapidity.is_finite() {
            return Err(bad("wedge.rapidity", "must be finite"));
        }
        for (j, p) in self.packets.iter().enumerate() {
            if p.center.len() != d - 1 {
                return Err(bad(&format!("packets[{j}].center"), format!("needs {} components", d - 1)));
            }
            if !(p.radius > 0.0) {
                return Err(bad(&format!("packets[{j}].radius"), "must be positive"));
            }
            if !(p.smoothness > 0.0) {
                return Err(bad(&format!("packets[{j}].smoothness"), "must be positive"));
            }
        }
        if self.packets.len() > self.modes.n_max {
            return Err(bad("packets", "more packets than n_max"));
        }
        let dc = &self.decay;
        if dc.center.len() != d - 1 {
            return Err(bad("decay.center", format!("needs {} components", d - 1)));
        }
        if !(dc.radius > 0.0) {
            return Err(bad("decay.radius", "must be positive"));
        }
        if !(dc.tau_start > 0.0 && dc.tau_end > dc.tau_start) {
            return Err(bad("decay.tau_end", "need 0 < tau_start < tau_end"));
        }
        if dc.samples < 2 {
            return Err(bad("decay.samples", "need at least 2"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.lorentz", t.lorentz),
            ("tolerances.antisymmetry", t.antisymmetry),
            ("tolerances.mass_shell", t.mass_shell),
            ("tolerances.warp", t.warp),
            ("tolerances.defw", t.defw),
            ("tolerances.unitarity", t.unitarity),
            ("tolerances.identity", t.identity),
            ("tolerances.quadrature", t.quadrature),
            ("tolerances.eps_slope", t.eps_slope),
            ("tolerances.dreg", t.dreg),
            ("tolerances.regularizer", t.regularizer),
        ] {
            if !(v > 0.0) {
                return Err(bad(name, "must be positive"));
            }
        }
        if !(t.order_margin >= 0.0) {
            return Err(bad("tolerances.order_margin", "must be >= 0"));
        }
        Ok(())
    }

    pub fn mode_set(&self) -> Result<ModeSet> {
        ModeSet::new(self.model.dimension, self.model.mass, self.modes.momenta.clone())
    }

    pub fn space(&self) -> Result<FockSpace> {
        Ok(FockSpace::new(self.mode_set()?, self.modes.n_max))
    }

    pub fn warping(&self) -> Result<WarpingMatrix> {
        standard_warping(self.model.dimension, self.model.kappa, self.model.eta)
    }

    pub fn wedge(&self) -> Result<Wedge> {
        let d = self.model.dimension;
        let mut lambda = LorentzMap::boost(d, 1, self.wedge.rapidity)?;
        if let Some(angle) = self.wedge.rotation {
            lambda = LorentzMap::rotation(d, 1, 2, angle)?.compose(&lambda);
        }
        let w = Wedge::new(lambda, FourVector::zeros(d))?;
        Ok(if self.wedge.complement { w.complement() } else { w })
    }

    pub fn packets(&self) -> Result<Vec<KgSolution>> {
        self.packets
            .iter()
            .map(|p| {
                KgSolution::new(
                    MomentumProfile::bump(p.center.clone(), p.radius, p.smoothness)?,
                    self.model.mass,
                )
            })
            .collect()
    }

    pub fn decay_packet(&self) -> Result<KgSolution> {
        KgSolution::new(
            MomentumProfile::bump(self.decay.center.clone(), self.decay.radius, self.decay.smoothness)?,
            self.model.mass,
        )
    }
}

/// Text of the bundled default configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");
