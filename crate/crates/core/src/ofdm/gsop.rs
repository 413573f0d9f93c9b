use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gram-Schmidt IQ orthonormalisation.
///
/// The in-phase branch is taken as reference; the quadrature branch has its
/// projection onto it removed. Both outputs carry the mean of the two input
/// powers, so total power is preserved for a balanced input.
pub fn gram_schmidt_orthonormalize(i: &[f64], q: &[f64]) -> Result<Vec<Complex64>> {
    if i.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: i.len(),
            actual: q.len(),
        });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let p_i = dot(i, i);
    let p_q = dot(q, q);
    if p_i == 0.0 || p_q == 0.0 {
        return Err(Error::Degenerate("IQ branch with zero energy".into()));
    }
    let rho = dot(q, i) / p_i;
    let q_o: Vec<f64> = q.iter().zip(i).map(|(qv, iv)| qv - rho * iv).collect();
    let p_o = dot(&q_o, &q_o);
    if p_o == 0.0 {
        return Err(Error::Degenerate(
            "quadrature branch is collinear with in-phase".into(),
        ));
    }
    let target = 0.5 * (p_i + p_q);
    let gi = (target / p_i).sqrt();
    let gq = (target / p_o).sqrt();
    Ok(i.iter()
        .zip(&q_o)
        .map(|(a, b)| Complex64::new(a * gi, b * gq))
        .collect())
}

pub(crate) fn split_iq(x: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (
        x.iter().map(|v| v.re).collect(),
        x.iter().map(|v| v.im).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fft;
    use std::f64::consts::PI;

    fn tone(n: usize, k: usize, gain_q: f64, skew: f64) -> (Vec<f64>, Vec<f64>) {
        let w = 2.0 * PI * k as f64 / n as f64;
        (
            (0..n).map(|t| (w * t as f64).cos()).collect(),
            (0..n)
                .map(|t| gain_q * (w * t as f64 + skew).sin())
                .collect(),
        )
    }

    #[test]
    fn orthonormal_input_unchanged() {
        let (i, q) = tone(1024, 17, 1.0, 0.0);
        let y = gram_schmidt_orthonormalize(&i, &q).unwrap();
        for (t, v) in y.iter().enumerate() {
            assert!((v.re - i[t]).abs() < 1e-9 && (v.im - q[t]).abs() < 1e-9);
        }
    }

    #[test]
    fn skew_image_rejected() {
        let n = 4096;
        let k = 100;
        let (i, q) = tone(n, k, 1.0, 10f64.to_radians());
        let mut y = gram_schmidt_orthonormalize(&i, &q).unwrap();
        fft(&mut y);
        let irr = 20.0 * (y[k].norm() / y[n - k].norm()).log10();
        assert!(irr >= 40.0, "image rejection {irr} dB");
    }

    #[test]
    fn gain_imbalance_equalised() {
        let (i, q) = tone(4096, 33, 10f64.powf(2.0 / 20.0), 0.0);
        let y = gram_schmidt_orthonormalize(&i, &q).unwrap();
        let pi: f64 = y.iter().map(|v| v.re * v.re).sum();
        let pq: f64 = y.iter().map(|v| v.im * v.im).sum();
        assert!((pi / pq - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn zero_branch_is_degenerate() {
        assert!(matches!(
            gram_schmidt_orthonormalize(&[1.0, 2.0], &[0.0, 0.0]),
            Err(Error::Degenerate(_))
        ));
    }
}
