//! Root-raised-cosine shaping, matched filtering and zero-forcing pre-emphasis.
//!
//! Filters are applied with their group delay removed, so output sample `m`
//! lines up with input sample `m` (after upsampling).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::FrequencyResponse;
use crate::dsp::{apply_spectral_gain, convolve};

/// Unit-energy RRC taps sampled at `sps` per symbol; `n_taps` should be odd.
pub fn rrc_taps(rolloff: f64, sps: usize, n_taps: usize) -> Vec<f64> {
    let center = (n_taps / 2) as f64;
    let b = rolloff;
    let mut h: Vec<f64> = (0..n_taps)
        .map(|i| {
            let t = (i as f64 - center) / sps as f64;
            if t == 0.0 {
                1.0 - b + 4.0 * b / PI
            } else if (4.0 * b * t).abs() == 1.0 || ((4.0 * b * t).abs() - 1.0).abs() < 1e-12 {
                b / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * b)).sin()
                        + (1.0 - 2.0 / PI) * (PI / (4.0 * b)).cos())
            } else {
                ((PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos())
                    / (PI * t * (1.0 - (4.0 * b * t).powi(2)))
            }
        })
        .collect();
    let energy: f64 = h.iter().map(|v| v * v).sum();
    let norm = energy.sqrt();
    h.iter_mut().for_each(|v| *v /= norm);
    h
}

fn filter_same(x: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    let full = convolve(x, taps);
    let delay = taps.len() / 2;
    full.into_iter().skip(delay).take(x.len()).collect()
}

/// Upsamples by `sps` and filters with `taps`; output has `symbols.len() * sps` samples.
pub fn pulse_shape(symbols: &[Complex64], taps: &[f64], sps: usize) -> Vec<Complex64> {
    let mut up = vec![Complex64::new(0.0, 0.0); symbols.len() * sps];
    for (i, s) in symbols.iter().enumerate() {
        up[i * sps] = *s;
    }
    filter_same(&up, taps)
}

/// Matched filtering at the oversampled rate.
pub fn rrc_filter(waveform: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    filter_same(waveform, taps)
}

/// Matched filtering followed by decimation to one sample per symbol.
pub fn matched_filter(waveform: &[Complex64], taps: &[f64], sps: usize) -> Vec<Complex64> {
    rrc_filter(waveform, taps)
        .into_iter()
        .step_by(sps)
        .collect()
}

/// Multiplies the spectrum by `1 / |H(f)|`, limited to `clamp_db` of gain.
pub fn pre_emphasize(
    waveform: &[Complex64],
    fs: f64,
    response: &FrequencyResponse,
    clamp_db: f64,
) -> Vec<Complex64> {
    if response.is_flat() {
        return waveform.to_vec();
    }
    let limit = 10f64.powf(clamp_db / 20.0);
    apply_spectral_gain(waveform, fs, |f| {
        Complex64::new((1.0 / response.magnitude(f)).min(limit), 0.0)
    })
}
