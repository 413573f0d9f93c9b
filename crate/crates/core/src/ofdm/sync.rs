use num_complex::Complex64;

use crate::dsp::{fft, ifft};
use crate::error::{Error, Result};

/// Sample offset at which `preamble` (one value every `sps` samples) best
/// matches `waveform` by normalised cross-correlation.
pub fn synchronize(
    waveform: &[Complex64],
    preamble: &[Complex64],
    sps: usize,
    threshold: f64,
) -> Result<usize> {
    if preamble.is_empty() || sps == 0 {
        return Err(Error::domain("empty preamble"));
    }
    let span = sps * (preamble.len() - 1) + 1;
    if waveform.len() < span {
        return Err(Error::domain("waveform shorter than the preamble"));
    }
    let n_lags = waveform.len() - span + 1;
    let size = (waveform.len() + span).next_power_of_two();

    let mut y = vec![Complex64::new(0.0, 0.0); size];
    y[..waveform.len()].copy_from_slice(waveform);
    let mut r = vec![Complex64::new(0.0, 0.0); size];
    for (k, p) in preamble.iter().enumerate() {
        r[k * sps] = *p;
    }
    fft(&mut y);
    fft(&mut r);
    y.iter_mut().zip(&r).for_each(|(a, b)| *a *= b.conj());
    ifft(&mut y);

    // strided running energy: cum[j] = sum of |x[j - m*sps]|^2
    let mut cum = vec![0.0; waveform.len()];
    for j in 0..waveform.len() {
        cum[j] = waveform[j].norm_sqr() + if j >= sps { cum[j - sps] } else { 0.0 };
    }
    let e_ref: f64 = preamble.iter().map(|v| v.norm_sqr()).sum();

    let mut best = (0usize, -1.0f64);
    for d in 0..n_lags {
        let end = cum[d + span - 1];
        let e = if d >= sps { end - cum[d - sps] } else { end };
        let denom = (e.max(0.0) * e_ref).sqrt();
        let metric = if denom > 0.0 {
            y[d].norm() / size as f64 / denom
        } else {
            0.0
        };
        if metric > best.1 {
            best = (d, metric);
        }
    }
    if best.1 < threshold {
        return Err(Error::SyncFailure {
            metric: best.1,
            threshold,
        });
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn qpsk(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| {
                Complex64::new(
                    if rng.gen::<bool>() { 1.0 } else { -1.0 },
                    if rng.gen::<bool>() { 1.0 } else { -1.0 },
                ) / 2f64.sqrt()
            })
            .collect()
    }

    fn frame(pre: &[Complex64], delay: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); delay];
        x.extend_from_slice(pre);
        x.extend(qpsk(1024, rng));
        x
    }

    #[test]
    fn exact_delay_noiseless() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pre = qpsk(512, &mut rng);
        for d in 0..1000 {
            let x = frame(&pre, d, &mut rng);
            assert_eq!(synchronize(&x, &pre, 1, 0.5).unwrap(), d);
        }
    }

    #[test]
    fn strided_preamble() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pre = qpsk(256, &mut rng);
        let mut x = vec![Complex64::new(0.0, 0.0); 2 * 700 + 1];
        for p in &pre {
            x.push(*p);
            x.push(Complex64::new(0.3, -0.2));
        }
        assert_eq!(synchronize(&x, &pre, 2, 0.5).unwrap(), 1401);
    }

    #[test]
    fn robust_at_10_db() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pre = qpsk(1024, &mut rng);
        let noise = Normal::new(0.0, (0.1f64 / 2.0).sqrt()).unwrap();
        let mut hits = 0;
        for trial in 0..1000 {
            let d = (trial * 37) % 1000;
            let mut x = frame(&pre, d, &mut rng);
            for v in x.iter_mut() {
                *v += Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng));
            }
            if synchronize(&x, &pre, 1, 0.5).ok() == Some(d) {
                hits += 1;
            }
        }
        assert!(hits >= 999, "{hits}/1000");
    }

    #[test]
    fn noise_only_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pre = qpsk(512, &mut rng);
        let x = qpsk(4096, &mut rng);
        assert!(matches!(
            synchronize(&x, &pre, 1, 0.5),
            Err(Error::SyncFailure { .. })
        ));
    }
}
