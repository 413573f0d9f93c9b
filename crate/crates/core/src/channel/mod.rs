//! Optical back-to-back coherent link.

mod devices;
mod optics;
mod response;

pub use devices::{
    adc_quantize, dac_quantize, iq_mzm_modulate, mzm_slope, rapp_amplify, rapp_saturation,
};
pub use optics::{coherent_receive, laser_field, LaserParams, ReceiverParams, Q_E};
pub use response::{FrequencyResponse, ResponseSpec};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{apply_spectral_gain, mean_power, rms};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Per-impairment switches; a disabled stage is an exact identity (or its
/// linear small-signal equivalent for the modulator).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Impairments {
    pub tx_response: bool,
    pub dac: bool,
    pub adc: bool,
    pub rapp: bool,
    pub mzm_nonlinearity: bool,
    pub phase_noise: bool,
    pub rin: bool,
    pub shot: bool,
    pub thermal: bool,
    pub dark_current: bool,
    pub frequency_offset: bool,
}

impl Default for Impairments {
    fn default() -> Self {
        Self::all()
    }
}

impl Impairments {
    pub const NAMES: [&'static str; 11] = [
        "tx_response",
        "dac",
        "adc",
        "rapp",
        "mzm_nonlinearity",
        "phase_noise",
        "rin",
        "shot",
        "thermal",
        "dark_current",
        "frequency_offset",
    ];

    pub fn all() -> Self {
        Self::uniform(true)
    }

    pub fn none() -> Self {
        Self::uniform(false)
    }

    pub fn converters_only() -> Self {
        Self {
            dac: true,
            adc: true,
            ..Self::none()
        }
    }

    fn uniform(on: bool) -> Self {
        Self {
            tx_response: on,
            dac: on,
            adc: on,
            rapp: on,
            mzm_nonlinearity: on,
            phase_noise: on,
            rin: on,
            shot: on,
            thermal: on,
            dark_current: on,
            frequency_offset: on,
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "tx_response" => &mut self.tx_response,
            "dac" => &mut self.dac,
            "adc" => &mut self.adc,
            "rapp" => &mut self.rapp,
            "mzm_nonlinearity" => &mut self.mzm_nonlinearity,
            "phase_noise" => &mut self.phase_noise,
            "rin" => &mut self.rin,
            "shot" => &mut self.shot,
            "thermal" => &mut self.thermal,
            "dark_current" => &mut self.dark_current,
            "frequency_offset" => &mut self.frequency_offset,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, on: bool) -> Result<()> {
        match self.slot(name) {
            Some(v) => {
                *v = on;
                Ok(())
            }
            None => Err(Error::config(format!(
                "unknown impairment {name:?}; expected one of {}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub enob_bits: f64,
    pub adc_clip_ratio_db: f64,
    pub rapp_backoff_db: f64,
    pub rapp_smoothness: f64,
    pub v_pi: f64,
    /// RMS drive voltage per modulator arm.
    pub drive_rms_v: f64,
    pub pd_responsivity: f64,
    pub pd_dark_current: f64,
    pub pd_thermal_psd: f64,
    pub laser_wavelength_m: f64,
    pub laser_linewidth_hz: f64,
    pub rin_db_hz: f64,
    pub rop_dbm: f64,
    pub lo_power_dbm: f64,
    pub lo_frequency_offset_hz: f64,
    pub tx_response: ResponseSpec,
    pub impairments: Impairments,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            enob_bits: 6.0,
            adc_clip_ratio_db: 12.0,
            rapp_backoff_db: 9.0,
            rapp_smoothness: 2.0,
            v_pi: 4.0,
            drive_rms_v: 0.3,
            pd_responsivity: 0.8,
            pd_dark_current: 5e-9,
            pd_thermal_psd: 10e-12,
            laser_wavelength_m: 1550e-9,
            laser_linewidth_hz: 100e3,
            rin_db_hz: -150.0,
            rop_dbm: 0.0,
            lo_power_dbm: 13.0,
            lo_frequency_offset_hz: 200e6,
            tx_response: ResponseSpec::default(),
            impairments: Impairments::all(),
        }
    }
}

fn dbm_to_w(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("enob_bits", self.enob_bits),
            ("v_pi", self.v_pi),
            ("drive_rms_v", self.drive_rms_v),
            ("pd_responsivity", self.pd_responsivity),
            ("rapp_smoothness", self.rapp_smoothness),
            ("laser_wavelength_m", self.laser_wavelength_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        let non_negative = [
            ("pd_dark_current", self.pd_dark_current),
            ("pd_thermal_psd", self.pd_thermal_psd),
            ("laser_linewidth_hz", self.laser_linewidth_hz),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be non-negative")));
            }
        }
        if !(-40.0..=20.0).contains(&self.rop_dbm) {
            return Err(Error::config(
                "rop_dbm outside the modelled -40..20 dBm range",
            ));
        }
        self.tx_response.resolve()?;
        Ok(())
    }

    fn receiver(&self, fs: f64) -> ReceiverParams {
        ReceiverParams {
            responsivity: self.pd_responsivity,
            dark_current: self.pd_dark_current,
            thermal_psd: self.pd_thermal_psd,
            shot: self.impairments.shot,
            thermal: self.impairments.thermal,
            dark: self.impairments.dark_current,
            sample_rate: fs,
        }
    }

    fn laser(&self, fs: f64) -> LaserParams {
        LaserParams {
            linewidth_hz: if self.impairments.phase_noise {
                self.laser_linewidth_hz
            } else {
                0.0
            },
            rin_db_hz: self.impairments.rin.then_some(self.rin_db_hz),
            sample_rate: fs,
        }
    }
}

/// Transmitter response, driver, modulator, VOA, coherent receiver and ADC.
///
/// The output is divided by the link's nominal small-signal gain, so with all
/// impairments disabled it equals the input up to rounding.
pub fn run_ob2b(tx: &[Complex64], cfg: &LinkConfig, fs: f64, seed: u64) -> Result<Vec<Complex64>> {
    let imp = &cfg.impairments;
    let n = tx.len();
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut x = if imp.tx_response {
        let resp = cfg.tx_response.resolve()?;
        apply_spectral_gain(tx, fs, |f| Complex64::new(resp.magnitude(f), 0.0))
    } else {
        tx.to_vec()
    };

    let level = rms(&x);
    if level == 0.0 {
        return Err(Error::Degenerate("transmit waveform has zero power".into()));
    }
    let drive_gain = cfg.drive_rms_v * 2f64.sqrt() / level;
    x.iter_mut().for_each(|v| *v *= drive_gain);
    if imp.rapp {
        let v_sat = rapp_saturation(mean_power(&x), cfg.rapp_backoff_db);
        x = rapp_amplify(&x, v_sat, cfg.rapp_smoothness);
    }

    let slope = mzm_slope(cfg.v_pi);
    let mut field = if imp.mzm_nonlinearity {
        iq_mzm_modulate(&x, cfg.v_pi)
    } else {
        x.iter().map(|v| v * slope).collect()
    };
    let laser = cfg.laser(fs);
    if laser.linewidth_hz > 0.0 || laser.rin_db_hz.is_some() {
        let carrier = laser_field(n, &laser, derive_seed(seed, 1));
        field.iter_mut().zip(&carrier).for_each(|(e, c)| *e *= c);
    }

    let p_rop = dbm_to_w(cfg.rop_dbm);
    let voa = (p_rop / mean_power(&field)).sqrt();
    field.iter_mut().for_each(|e| *e *= voa);

    let p_lo = dbm_to_w(cfg.lo_power_dbm);
    let mut lo = if laser.linewidth_hz > 0.0 || laser.rin_db_hz.is_some() {
        laser_field(n, &laser, derive_seed(seed, 2))
    } else {
        vec![Complex64::new(1.0, 0.0); n]
    };
    let lo_amp = p_lo.sqrt();
    for (k, l) in lo.iter_mut().enumerate() {
        *l *= lo_amp;
        if imp.frequency_offset && cfg.lo_frequency_offset_hz != 0.0 {
            *l *= Complex64::from_polar(1.0, 2.0 * PI * cfg.lo_frequency_offset_hz * k as f64 / fs);
        }
    }

    let current = coherent_receive(&field, &lo, &cfg.receiver(fs), derive_seed(seed, 3));
    let gain = drive_gain * slope * voa * cfg.pd_responsivity * lo_amp;
    let out: Vec<Complex64> = current.iter().map(|v| v / gain).collect();

    Ok(if imp.adc {
        adc_quantize(&out, cfg.enob_bits, cfg.adc_clip_ratio_db)
    } else {
        out
    })
}
