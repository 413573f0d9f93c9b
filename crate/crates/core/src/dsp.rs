//! FFT plumbing shared by the DSP and channel modules.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type Plans = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANS: RefCell<Plans> = RefCell::new(HashMap::new());
}

// A shared planner picks algorithms from whatever it has cached, so the
// rounding of a transform would depend on the thread's history. Each length
// is planned by a fresh planner instead.
fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let forward = direction == FftDirection::Forward;
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
            .clone()
    })
}

/// In-place unnormalized forward DFT.
pub fn fft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), FftDirection::Forward).process(buf);
}

/// In-place unnormalized inverse DFT.
pub fn ifft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), FftDirection::Inverse).process(buf);
}

/// Signed frequency of DFT bin `k` for an `n`-point transform at `fs`.
pub fn bin_frequency(k: usize, n: usize, fs: f64) -> f64 {
    if k <= n / 2 {
        k as f64 * fs / n as f64
    } else {
        (k as f64 - n as f64) * fs / n as f64
    }
}

/// Multiplies the spectrum of `x` by `gain(f_hz)` (circular, zero-phase when `gain` is real).
pub fn apply_spectral_gain<F>(x: &[Complex64], fs: f64, gain: F) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let n = x.len();
    let mut buf = x.to_vec();
    fft(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= gain(bin_frequency(k, n, fs));
    }
    ifft(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Full linear convolution of a complex sequence with real taps.
pub fn convolve(x: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    if x.is_empty() || taps.is_empty() {
        return Vec::new();
    }
    let out_len = x.len() + taps.len() - 1;
    if x.len().min(taps.len()) <= 32 {
        let mut out = vec![Complex64::new(0.0, 0.0); out_len];
        for (i, &xv) in x.iter().enumerate() {
            for (j, &h) in taps.iter().enumerate() {
                out[i + j] += xv * h;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    a[..x.len()].copy_from_slice(x);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for (dst, &h) in b.iter_mut().zip(taps) {
        *dst = Complex64::new(h, 0.0);
    }
    fft(&mut a);
    fft(&mut b);
    a.iter_mut().zip(&b).for_each(|(u, v)| *u *= v);
    ifft(&mut a);
    let scale = 1.0 / n as f64;
    a.truncate(out_len);
    a.iter_mut().for_each(|v| *v *= scale);
    a
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

pub fn rms(x: &[Complex64]) -> f64 {
    mean_power(x).sqrt()
}
