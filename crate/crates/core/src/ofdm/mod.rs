//! Wireless OFDM signal generation and the transmitter/receiver DSP chains.

mod chain;
mod gsop;
mod lms;
mod pilot;
mod pulse;
mod qam;
mod sync;

pub use chain::{preamble_symbols, rx_chain, tx_chain, RxOutput, TxFrame};
pub use gsop::gram_schmidt_orthonormalize;
pub use lms::{lms_equalize, LmsConfig, LmsOutput};
pub use pilot::{check_pilot_placement, insert_pilot, pilot_foc_cpr};
pub use pulse::{matched_filter, pre_emphasize, pulse_shape, rrc_filter, rrc_taps};
pub use qam::{qam_demap, qam_map, QamConstellation};
pub use sync::synchronize;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{fft, ifft};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmConfig {
    pub fft_size: usize,
    pub qam_order: usize,
    /// QAM symbols per frame; also the EDA frame length.
    pub n_symbols: usize,
    /// Preamble length in OFDM symbols.
    pub preamble_len: usize,
    pub rolloff: f64,
    pub sps: usize,
    pub rrc_taps: usize,
    pub signal_bandwidth_hz: f64,
    pub pilot_offset_hz: f64,
    pub pilot_power_ratio_db: f64,
    pub pilot_filter_bw_hz: f64,
    /// Half-width of the window searched for the received pilot.
    pub pilot_search_hz: f64,
    pub clip_ratio_db: f64,
    pub preemphasis_clamp_db: f64,
    /// Zero symbols before and after the burst.
    pub guard_symbols: usize,
    pub sync_threshold: f64,
    pub lms_taps: usize,
    pub lms_step: f64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            fft_size: 1024,
            qam_order: 1024,
            n_symbols: 1 << 14,
            preamble_len: 64,
            rolloff: 0.1,
            sps: 2,
            rrc_taps: 1025,
            signal_bandwidth_hz: 38.5e9,
            pilot_offset_hz: 27e9,
            pilot_power_ratio_db: -12.0,
            pilot_filter_bw_hz: 1e9,
            pilot_search_hz: 2e9,
            clip_ratio_db: 12.0,
            preemphasis_clamp_db: 15.0,
            guard_symbols: 1024,
            sync_threshold: 0.5,
            lms_taps: 31,
            lms_step: 1e-3,
        }
    }
}

impl OfdmConfig {
    pub fn symbol_rate(&self) -> f64 {
        self.signal_bandwidth_hz / (1.0 + self.rolloff)
    }

    pub fn sample_rate(&self) -> f64 {
        self.symbol_rate() * self.sps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size == 0
            || self.n_symbols == 0
            || !self.n_symbols.is_multiple_of(self.fft_size)
        {
            return Err(Error::config(format!(
                "n_symbols {} must be a positive multiple of fft_size {}",
                self.n_symbols, self.fft_size
            )));
        }
        if !(self.rolloff > 0.0 && self.rolloff <= 1.0) {
            return Err(Error::config("rolloff must lie in (0, 1]"));
        }
        if self.sps < 2 {
            return Err(Error::config("sps must be at least 2"));
        }
        if self.rrc_taps.is_multiple_of(2) {
            return Err(Error::config("rrc_taps must be odd"));
        }
        if self.preamble_len == 0 {
            return Err(Error::config("preamble_len must be positive"));
        }
        if !(self.signal_bandwidth_hz > 0.0) {
            return Err(Error::config("signal_bandwidth_hz must be positive"));
        }
        if !(self.lms_step > 0.0) || self.lms_taps == 0 {
            return Err(Error::config("LMS needs a positive step and tap count"));
        }
        QamConstellation::new(self.qam_order).map_err(|e| Error::config(e.to_string()))?;
        check_pilot_placement(self)
    }
}

fn transform_blocks(x: &[Complex64], n: usize, inverse: bool) -> Result<Vec<Complex64>> {
    if n == 0 || !x.len().is_multiple_of(n) {
        return Err(Error::domain(format!(
            "{} samples is not a multiple of the FFT size {n}",
            x.len()
        )));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = x.to_vec();
    for block in out.chunks_exact_mut(n) {
        if inverse {
            ifft(block);
        } else {
            fft(block);
        }
        block.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(out)
}

/// Unitary IFFT per OFDM symbol of `fft_size` subcarriers.
pub fn ofdm_modulate(symbols: &[Complex64], fft_size: usize) -> Result<Vec<Complex64>> {
    transform_blocks(symbols, fft_size, true)
}

pub fn ofdm_demodulate(samples: &[Complex64], fft_size: usize) -> Result<Vec<Complex64>> {
    transform_blocks(samples, fft_size, false)
}
