use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{Impairments, LinkConfig};
use crate::error::{Error, Result};
use crate::ofdm::OfdmConfig;
use crate::plan::{PlanOptions, QuantizerProfile};
use crate::quantizer::{QuantizerMode, QuantizerSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// 2^14 symbols per frame.
    Desk,
    /// 2^16 symbols per frame.
    Paper,
}

impl Preset {
    pub fn n_symbols(self) -> usize {
        match self {
            Preset::Desk => 1 << 14,
            Preset::Paper => 1 << 16,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::config(format!(
                "unknown preset {other:?} (desk|paper)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConfig {
    pub mode: QuantizerMode,
    /// Amplitude levels of the first stage.
    pub first_levels: u32,
    /// Amplitude levels of every later stage.
    pub rest_levels: u32,
    /// Phase sectors, polar mode only.
    pub phase_levels: u32,
    pub r_a: f64,
    pub r_b: f64,
    pub alpha_r: f64,
    pub alpha_d: f64,
    pub alpha_a: f64,
    pub interleaver_seed: u64,
}

impl Default for PlanConfig {
    fn default() -> Self {
        let opts = PlanOptions::default();
        Self {
            mode: QuantizerMode::Cartesian,
            first_levels: opts.profile.first.n_a,
            rest_levels: opts.profile.rest.n_a,
            phase_levels: 8,
            r_a: opts.r_a,
            r_b: opts.r_b,
            alpha_r: opts.alpha_r,
            // digital corners sit near amplifier saturation at equal power
            alpha_d: 0.7,
            alpha_a: opts.alpha_a,
            interleaver_seed: opts.interleaver_seed,
        }
    }
}

impl PlanConfig {
    fn spec(&self, levels: u32) -> QuantizerSpec {
        match self.mode {
            QuantizerMode::Cartesian => QuantizerSpec::cartesian(levels, 1.0),
            QuantizerMode::Polar => QuantizerSpec::polar(levels, self.phase_levels, 1.0),
        }
    }

    pub fn options(&self) -> PlanOptions {
        PlanOptions {
            profile: QuantizerProfile {
                first: self.spec(self.first_levels),
                rest: self.spec(self.rest_levels),
            },
            r_a: self.r_a,
            r_b: self.r_b,
            alpha_r: self.alpha_r,
            alpha_d: self.alpha_d,
            alpha_a: self.alpha_a,
            interleaver_seed: self.interleaver_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let opts = self.options();
        opts.profile.first.validate()?;
        opts.profile.rest.validate()?;
        for (name, v) in [
            ("r_a", self.r_a),
            ("r_b", self.r_b),
            ("alpha_r", self.alpha_r),
            ("alpha_d", self.alpha_d),
            ("alpha_a", self.alpha_a),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("plan.{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            start: 1.0,
            stop: 5.0,
            step: 0.1,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::config("sweep.step must be positive"));
        }
        if !(self.start >= 1.0) || !(self.stop >= self.start) {
            return Err(Error::config("sweep needs 1 <= start <= stop"));
        }
        Ok(())
    }

    /// Grid values; decimal steps are generated as `(start * k + i) / k` so
    /// points such as 1.3 come out as the nearest double to the decimal.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        let k = 1.0 / self.step;
        let decimal = (k - k.round()).abs() < 1e-9
            && (self.start * k - (self.start * k).round()).abs() < 1e-9;
        (0..count)
            .map(|i| {
                if decimal {
                    ((self.start * k).round() + i as f64) / k.round()
                } else {
                    self.start + i as f64 * self.step
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrofConfig {
    pub order: usize,
    /// Link impairments used for the digital-only runs.
    pub impairments: Impairments,
}

impl Default for DrofConfig {
    fn default() -> Self {
        Self {
            order: 7,
            impairments: Impairments::converters_only(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    /// Two-column `inv_eta snr_db` file for plotting.
    pub plot: Option<PathBuf>,
    /// Write measured wall time instead of 0 (makes the CSV non-reproducible).
    pub record_wall_time: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub ofdm: OfdmConfig,
    pub link: LinkConfig,
    pub plan: PlanConfig,
    pub sweep: SweepGrid,
    pub drof: DrofConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            ofdm: OfdmConfig::default(),
            link: LinkConfig::default(),
            plan: PlanConfig::default(),
            sweep: SweepGrid::default(),
            drof: DrofConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut cfg = Self::default();
        cfg.apply_preset(preset);
        cfg
    }

    pub fn apply_preset(&mut self, preset: Preset) {
        self.ofdm.n_symbols = preset.n_symbols();
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    /// Loads a TOML file; a relative response-table path is resolved against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let crate::channel::ResponseSpec::Table { file } = &mut cfg.link.tx_response {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&*file);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serialisable")
    }

    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.link.validate()?;
        self.plan.validate()?;
        self.sweep.validate()?;
        if self.drof.order == 0 {
            return Err(Error::config("drof.order must be at least 1"));
        }
        Ok(())
    }
}
