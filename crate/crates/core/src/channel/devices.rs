//! Memoryless electrical devices: data converters, driver amplifier, IQ modulator.

use num_complex::Complex64;

/// Levels of a converter with `enob` effective bits.
fn converter_levels(enob: f64) -> f64 {
    2f64.powf(enob).round().max(1.0)
}

fn quantize_axis(v: f64, full_scale: f64, levels: f64) -> f64 {
    if full_scale <= 0.0 {
        return 0.0;
    }
    let step = 2.0 * full_scale / levels;
    let idx = ((v + full_scale) / step).floor().clamp(0.0, levels - 1.0);
    -full_scale + (idx + 0.5) * step
}

fn axis_rms(x: &[Complex64], pick: fn(&Complex64) -> f64) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| pick(v).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Clips each axis at `clip_ratio_db` above its RMS and quantises it to
/// `2^enob` mid-rise levels spanning the clip range.
pub fn dac_quantize(x: &[Complex64], enob: f64, clip_ratio_db: f64) -> Vec<Complex64> {
    let levels = converter_levels(enob);
    let ratio = 10f64.powf(clip_ratio_db / 20.0);
    let fs_i = axis_rms(x, |v| v.re) * ratio;
    let fs_q = axis_rms(x, |v| v.im) * ratio;
    x.iter()
        .map(|v| {
            Complex64::new(
                quantize_axis(v.re, fs_i, levels),
                quantize_axis(v.im, fs_q, levels),
            )
        })
        .collect()
}

pub fn adc_quantize(x: &[Complex64], enob: f64, clip_ratio_db: f64) -> Vec<Complex64> {
    dac_quantize(x, enob, clip_ratio_db)
}

/// Rapp saturation of the complex envelope with unit small-signal gain.
pub fn rapp_amplify(x: &[Complex64], v_sat: f64, p: f64) -> Vec<Complex64> {
    x.iter()
        .map(|v| {
            let r = v.norm();
            if r == 0.0 {
                *v
            } else {
                v / (1.0 + (r / v_sat).powf(2.0 * p)).powf(1.0 / (2.0 * p))
            }
        })
        .collect()
}

/// Saturation amplitude placing the mean input power `backoff_db` below saturation.
pub fn rapp_saturation(mean_power: f64, backoff_db: f64) -> f64 {
    (mean_power * 10f64.powf(backoff_db / 10.0)).sqrt()
}

/// Null-biased nested MZM field transfer (unit optical input).
pub fn iq_mzm_modulate(v: &[Complex64], v_pi: f64) -> Vec<Complex64> {
    let k = std::f64::consts::PI / (2.0 * v_pi);
    v.iter()
        .map(|d| Complex64::new((k * d.re).sin(), (k * d.im).sin()))
        .collect()
}

/// Small-signal slope of [`iq_mzm_modulate`], used when its nonlinearity is disabled.
pub fn mzm_slope(v_pi: f64) -> f64 {
    std::f64::consts::PI / (2.0 * v_pi)
}
