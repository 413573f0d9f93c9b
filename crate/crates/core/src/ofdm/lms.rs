use num_complex::Complex64;

use crate::dsp::rms;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmsConfig {
    pub taps: usize,
    pub step: f64,
    /// Input samples per output symbol.
    pub sps: usize,
}

#[derive(Clone, Debug)]
pub struct LmsOutput {
    pub symbols: Vec<Complex64>,
    /// Converged taps in input units (the training normalisation is folded in).
    pub taps: Vec<Complex64>,
    /// MSE over the last tenth of the training run.
    pub training_mse: f64,
}

const DIVERGENCE_BLOCKS: usize = 8;

fn output(x: &[Complex64], w: &[Complex64], k: usize, sps: usize) -> Complex64 {
    let center = w.len() / 2;
    let base = (sps * k) as isize - center as isize;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, wj) in w.iter().enumerate() {
        let idx = base + j as isize;
        if idx >= 0 && (idx as usize) < x.len() {
            acc += wj * x[idx as usize];
        }
    }
    acc
}

/// Fractionally spaced LMS equaliser trained once on `training` (aligned with
/// the first `training.len()` symbols of `samples`) and then frozen to produce
/// `n_out` symbols.
pub fn lms_equalize(
    samples: &[Complex64],
    training: &[Complex64],
    n_out: usize,
    cfg: &LmsConfig,
) -> Result<LmsOutput> {
    if cfg.taps == 0 || cfg.sps == 0 {
        return Err(Error::domain("equaliser needs taps and a positive sps"));
    }
    if training.len() > n_out || samples.len() < cfg.sps * n_out.saturating_sub(1) + 1 {
        return Err(Error::domain(
            "not enough samples for the requested symbols",
        ));
    }
    let train_end = (cfg.sps * training.len()).min(samples.len());
    let r = rms(&samples[..train_end]);
    let norm = if r > 0.0 { 1.0 / r } else { 1.0 };
    let x: Vec<Complex64> = samples.iter().map(|v| v * norm).collect();

    let mut w = vec![Complex64::new(0.0, 0.0); cfg.taps];
    w[cfg.taps / 2] = Complex64::new(1.0, 0.0);
    let center = cfg.taps / 2;

    let block = (training.len() / DIVERGENCE_BLOCKS).max(1);
    let mut block_mse = Vec::new();
    let mut acc = 0.0;
    let tail_start = training.len() - training.len() / 10;
    let mut tail = (0.0, 0usize);
    for (k, d) in training.iter().enumerate() {
        let y = output(&x, &w, k, cfg.sps);
        let e = d - y;
        let base = (cfg.sps * k) as isize - center as isize;
        for (j, wj) in w.iter_mut().enumerate() {
            let idx = base + j as isize;
            if idx >= 0 && (idx as usize) < x.len() {
                *wj += cfg.step * e * x[idx as usize].conj();
            }
        }
        let e2 = e.norm_sqr();
        acc += e2;
        if (k + 1) % block == 0 {
            block_mse.push(acc / block as f64);
            acc = 0.0;
        }
        if k >= tail_start {
            tail.0 += e2;
            tail.1 += 1;
        }
    }
    if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::EqualizerDivergence {
            first: block_mse.first().copied().unwrap_or(f64::NAN),
            last: f64::INFINITY,
        });
    }
    if block_mse.len() >= 3 && block_mse.windows(2).all(|p| p[1] > p[0]) {
        return Err(Error::EqualizerDivergence {
            first: block_mse[0],
            last: *block_mse.last().unwrap(),
        });
    }

    let symbols = (0..n_out).map(|k| output(&x, &w, k, cfg.sps)).collect();
    Ok(LmsOutput {
        symbols,
        taps: w.iter().map(|v| v * norm).collect(),
        training_mse: if tail.1 > 0 {
            tail.0 / tail.1 as f64
        } else {
            0.0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::convolve;
    use crate::ofdm::{pulse_shape, rrc_filter, rrc_taps};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    const CFG: LmsConfig = LmsConfig {
        taps: 31,
        step: 1e-3,
        sps: 2,
    };

    fn symbols(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = crate::ofdm::QamConstellation::new(16).unwrap();
        let bits: Vec<u8> = (0..4 * n).map(|_| rng.gen_range(0..2)).collect();
        q.map(&bits).unwrap()
    }

    fn link(s: &[Complex64], channel: &[f64], snr_db: f64, seed: u64) -> Vec<Complex64> {
        let taps = rrc_taps(0.1, 2, 257);
        let tx = pulse_shape(s, &taps, 2);
        let mut y: Vec<Complex64> = convolve(&tx, channel).into_iter().take(tx.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = (0.5 * 0.5 * 10f64.powf(-snr_db / 10.0)).sqrt();
        let n = Normal::new(0.0, sigma).unwrap();
        y.iter_mut()
            .for_each(|v| *v += Complex64::new(n.sample(&mut rng), n.sample(&mut rng)));
        rrc_filter(&y, &taps)
    }

    fn evm(a: &[Complex64], b: &[Complex64]) -> f64 {
        let e: f64 = a.iter().zip(b).map(|(u, v)| (u - v).norm_sqr()).sum();
        (e / b.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    #[test]
    fn identity_channel_keeps_delta() {
        let s = symbols(20000, 1);
        let y = link(&s, &[1.0], 200.0, 2);
        let out = lms_equalize(&y, &s[..16000], s.len(), &CFG).unwrap();
        let total: f64 = out.taps.iter().map(|v| v.norm_sqr()).sum();
        assert!(out.taps[15].norm_sqr() / total >= 0.99);
    }

    #[test]
    fn two_tap_channel_equalised() {
        let s = symbols(40000, 3);
        let floor = {
            let y = link(&s, &[1.0], 30.0, 4);
            let out = lms_equalize(&y, &s[..30000], s.len(), &CFG).unwrap();
            evm(&out.symbols[30000..39000], &s[30000..39000])
        };
        let y = link(&s, &[1.0, 0.0, 0.3], 30.0, 4);
        let out = lms_equalize(&y, &s[..30000], s.len(), &CFG).unwrap();
        let e = evm(&out.symbols[30000..39000], &s[30000..39000]);
        assert!(e <= 2.0 * floor, "evm {e} floor {floor}");
    }

    #[test]
    fn zero_input_leaves_taps() {
        let x = vec![Complex64::new(0.0, 0.0); 400];
        let t = vec![Complex64::new(0.0, 0.0); 100];
        let out = lms_equalize(&x, &t, 200, &CFG).unwrap();
        for (j, w) in out.taps.iter().enumerate() {
            let expect = if j == 15 { 1.0 } else { 0.0 };
            assert_eq!(*w, Complex64::new(expect, 0.0));
        }
    }

    #[test]
    fn oversized_step_diverges() {
        let s = symbols(4000, 5);
        let y = link(&s, &[1.0], 30.0, 6);
        let cfg = LmsConfig { step: 0.5, ..CFG };
        assert!(matches!(
            lms_equalize(&y, &s[..4000], s.len(), &cfg),
            Err(Error::EqualizerDivergence { .. })
        ));
    }
}
