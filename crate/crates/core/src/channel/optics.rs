//! Laser source and balanced coherent receiver.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Elementary charge in coulombs.
pub const Q_E: f64 = 1.602_176_634e-19;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaserParams {
    pub linewidth_hz: f64,
    /// One-sided RIN spectral density; `None` disables intensity noise.
    pub rin_db_hz: Option<f64>,
    pub sample_rate: f64,
}

/// Unit-mean-power field with Wiener phase noise and white intensity noise.
pub fn laser_field(n: usize, params: &LaserParams, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase_var = 2.0 * PI * params.linewidth_hz / params.sample_rate;
    let phase_step = Normal::new(0.0, phase_var.sqrt()).expect("finite variance");
    let rin_sd = params
        .rin_db_hz
        .map(|r| (10f64.powf(r / 10.0) * params.sample_rate / 2.0).sqrt())
        .unwrap_or(0.0);
    let rin = Normal::new(0.0, rin_sd).expect("finite variance");
    let mut phi = 0.0;
    (0..n)
        .map(|_| {
            if phase_var > 0.0 {
                phi += phase_step.sample(&mut rng);
            }
            let amp = if rin_sd > 0.0 {
                (1.0 + rin.sample(&mut rng)).max(0.0).sqrt()
            } else {
                1.0
            };
            Complex64::from_polar(amp, phi)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverParams {
    pub responsivity: f64,
    pub dark_current: f64,
    /// Input-referred thermal noise density in A/sqrt(Hz) per balanced output.
    pub thermal_psd: f64,
    pub shot: bool,
    pub thermal: bool,
    pub dark: bool,
    pub sample_rate: f64,
}

impl ReceiverParams {
    /// Noise bandwidth of one real output.
    pub fn bandwidth(&self) -> f64 {
        self.sample_rate / 2.0
    }

    /// Noise variance of each quadrature current for the given mean powers (W).
    ///
    /// A 90-degree hybrid gives each of the four diodes a quarter of the
    /// signal plus LO power; each balanced pair sums two diodes' shot noise.
    pub fn noise_variance(&self, p_signal: f64, p_lo: f64) -> f64 {
        let b = self.bandwidth();
        let photo = self.responsivity * (p_signal + p_lo) / 4.0;
        let mut var = 0.0;
        if self.shot {
            var += 2.0 * 2.0 * Q_E * photo * b;
        }
        if self.dark {
            var += 2.0 * 2.0 * Q_E * self.dark_current * b;
        }
        if self.thermal {
            var += self.thermal_psd.powi(2) * b;
        }
        var
    }
}

/// Balanced I/Q photocurrents `R * E_s * conj(E_lo)` plus receiver noise.
pub fn coherent_receive(
    signal: &[Complex64],
    lo: &[Complex64],
    params: &ReceiverParams,
    seed: u64,
) -> Vec<Complex64> {
    let mean = |x: &[Complex64]| {
        if x.is_empty() {
            0.0
        } else {
            x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
        }
    };
    let sd = params.noise_variance(mean(signal), mean(lo)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sd).expect("finite variance");
    signal
        .iter()
        .zip(lo)
        .map(|(s, l)| {
            let i = params.responsivity * s * l.conj();
            if sd > 0.0 {
                i + Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                i
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fft;

    const FS: f64 = 70e9;

    #[test]
    fn quiet_laser_is_constant() {
        let p = LaserParams {
            linewidth_hz: 0.0,
            rin_db_hz: None,
            sample_rate: FS,
        };
        assert!(laser_field(1000, &p, 1)
            .iter()
            .all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn phase_increment_variance() {
        let p = LaserParams {
            linewidth_hz: 100e3,
            rin_db_hz: None,
            sample_rate: FS,
        };
        let f = laser_field(1_000_001, &p, 2);
        let inc: Vec<f64> = f.windows(2).map(|w| (w[1] * w[0].conj()).arg()).collect();
        let var = inc.iter().map(|v| v * v).sum::<f64>() / inc.len() as f64;
        let expect = 2.0 * PI * 100e3 / FS;
        assert!((var / expect - 1.0).abs() <= 0.05, "{var} vs {expect}");
    }

    #[test]
    fn rin_spectral_density() {
        let n = 1 << 20;
        let p = LaserParams {
            linewidth_hz: 0.0,
            rin_db_hz: Some(-150.0),
            sample_rate: FS,
        };
        let f = laser_field(n, &p, 3);
        let mut d: Vec<Complex64> = f
            .iter()
            .map(|v| Complex64::new(v.norm_sqr() - 1.0, 0.0))
            .collect();
        fft(&mut d);
        // one-sided periodogram averaged over positive frequencies
        let two_sided: f64 = d[1..n / 2].iter().map(|v| v.norm_sqr()).sum::<f64>()
            / (n / 2 - 1) as f64
            / (n as f64 * FS);
        let got = 10.0 * (2.0 * two_sided).log10();
        assert!((got + 150.0).abs() <= 1.0, "RIN {got} dB/Hz");
    }

    fn rx(shot: bool, thermal: bool, dark: bool) -> ReceiverParams {
        ReceiverParams {
            responsivity: 0.8,
            dark_current: 5e-9,
            thermal_psd: 10e-12,
            shot,
            thermal,
            dark,
            sample_rate: FS,
        }
    }

    #[test]
    fn noiseless_receiver_is_proportional() {
        let s: Vec<Complex64> = (0..100)
            .map(|k| Complex64::new(k as f64, -(k as f64)) * 1e-3)
            .collect();
        let lo = vec![Complex64::new(0.1, 0.0); 100];
        let out = coherent_receive(&s, &lo, &rx(false, false, false), 4);
        for (a, b) in out.iter().zip(&s) {
            assert!((a - b * 0.08).norm() <= 1e-12 * (b * 0.08).norm());
        }
    }

    #[test]
    fn lo_only_noise_matches_closed_form() {
        let p_lo = 10f64.powf(1.3) * 1e-3;
        let n = 400_000;
        let s = vec![Complex64::new(0.0, 0.0); n];
        let lo = vec![Complex64::new(p_lo.sqrt(), 0.0); n];
        let out = coherent_receive(&s, &lo, &rx(true, true, true), 5);
        let var = out.iter().map(|v| v.re * v.re).sum::<f64>() / n as f64;
        let b = FS / 2.0;
        let expect = 4.0 * Q_E * (0.8 * p_lo / 4.0 + 5e-9) * b + (10e-12f64).powi(2) * b;
        assert!((var / expect - 1.0).abs() <= 0.05);
    }
}
