//! RF pilot insertion and pilot-aided frequency-offset/phase recovery.
//!
//! The pilot sits outside the occupied band. The EDA multiplex is a
//! time-interleaved sequence with a white spectrum, so no subcarrier gap
//! survives inside the band.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::OfdmConfig;
use crate::dsp::{bin_frequency, fft, ifft, mean_power};
use crate::error::{Error, Result};

/// Rejects pilot settings whose search window or filter overlaps the signal band
/// or crosses the Nyquist edge.
pub fn check_pilot_placement(cfg: &OfdmConfig) -> Result<()> {
    let occupied = cfg.signal_bandwidth_hz / 2.0;
    let reach = cfg.pilot_search_hz + cfg.pilot_filter_bw_hz;
    let f = cfg.pilot_offset_hz.abs();
    if f - reach <= occupied {
        return Err(Error::config(format!(
            "pilot at {:.3e} Hz collides with occupied spectrum (+/-{occupied:.3e} Hz)",
            cfg.pilot_offset_hz
        )));
    }
    if f + reach >= cfg.sample_rate() / 2.0 {
        return Err(Error::config("pilot window exceeds the Nyquist frequency"));
    }
    if !(cfg.pilot_filter_bw_hz > 0.0) || cfg.pilot_search_hz < 0.0 {
        return Err(Error::config("pilot filter width must be positive"));
    }
    Ok(())
}

fn tone(n: usize, freq: f64, fs: f64) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |i| Complex64::from_polar(1.0, 2.0 * PI * freq * i as f64 / fs))
}

/// Adds a tone at `pilot_offset_hz` whose power is `pilot_power_ratio_db` relative to the waveform.
pub fn insert_pilot(waveform: &[Complex64], cfg: &OfdmConfig) -> Vec<Complex64> {
    let amp = (mean_power(waveform) * 10f64.powf(cfg.pilot_power_ratio_db / 10.0)).sqrt();
    waveform
        .iter()
        .zip(tone(waveform.len(), cfg.pilot_offset_hz, cfg.sample_rate()))
        .map(|(x, t)| x + t * amp)
        .collect()
}

/// Locates the pilot, isolates it with a zero-phase Hann-shaped band-pass
/// (-6 dB width `pilot_filter_bw_hz`) and derotates the waveform by its phase.
pub fn pilot_foc_cpr(waveform: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    let n = waveform.len();
    let fs = cfg.sample_rate();
    let mut spec = waveform.to_vec();
    fft(&mut spec);

    let lo = cfg.pilot_offset_hz - cfg.pilot_search_hz;
    let hi = cfg.pilot_offset_hz + cfg.pilot_search_hz;
    let peak = (0..n)
        .filter(|&k| {
            let f = bin_frequency(k, n, fs);
            f >= lo && f <= hi
        })
        .max_by(|&a, &b| spec[a].norm_sqr().total_cmp(&spec[b].norm_sqr()))
        .ok_or_else(|| Error::Degenerate("pilot search window holds no bins".into()))?;
    if spec[peak].norm_sqr() == 0.0 {
        return Err(Error::Degenerate("no pilot energy found".into()));
    }
    let f_peak = bin_frequency(peak, n, fs);

    let bw = cfg.pilot_filter_bw_hz;
    for (k, v) in spec.iter_mut().enumerate() {
        let mut d = bin_frequency(k, n, fs) - f_peak;
        // distance on the circle of aliases
        d -= fs * (d / fs).round();
        let w = if d.abs() < bw {
            (PI * d / (2.0 * bw)).cos().powi(2)
        } else {
            0.0
        };
        *v *= w;
    }
    ifft(&mut spec);

    Ok(waveform
        .iter()
        .zip(&spec)
        .zip(tone(n, cfg.pilot_offset_hz, fs))
        .map(|((y, p), t)| {
            let m = p.norm();
            if m > 0.0 {
                y * p.conj() / m * t
            } else {
                *y
            }
        })
        .collect())
}
