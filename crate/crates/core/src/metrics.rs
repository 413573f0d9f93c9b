//! EVM/SNR measurement and the least-squares line fit used for sweeps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SNR reported when the error vector is exactly zero.
pub const SNR_CAP_DB: f64 = 120.0;

/// `sqrt(mean|rx - ref|^2 / mean|ref|^2)`.
pub fn evm_rms(rx: &[Complex64], reference: &[Complex64]) -> Result<f64> {
    if rx.is_empty() {
        return Err(Error::domain("EVM of an empty sequence"));
    }
    if rx.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: rx.len(),
        });
    }
    let err: f64 = rx
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let sig: f64 = reference.iter().map(|v| v.norm_sqr()).sum();
    if sig == 0.0 {
        return Err(Error::domain("reference has zero power"));
    }
    Ok((err / sig).sqrt())
}

pub fn snr_db_from_evm(evm: f64) -> f64 {
    if evm <= 0.0 {
        return SNR_CAP_DB;
    }
    (-20.0 * evm.log10()).min(SNR_CAP_DB)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "line fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0) {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn qpsk(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                Complex64::new(
                    if k % 3 == 0 { 1.0 } else { -1.0 },
                    if k % 5 < 2 { 1.0 } else { -1.0 },
                ) / 2f64.sqrt()
            })
            .collect()
    }

    #[test]
    fn identical_gives_cap() {
        let s = qpsk(100);
        let e = evm_rms(&s, &s).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(snr_db_from_evm(e), SNR_CAP_DB);
    }

    #[test]
    fn known_noise_injection() {
        let s = qpsk(1 << 16);
        let sigma2: f64 = 10f64.powf(-2.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = Normal::new(0.0, (sigma2 / 2.0).sqrt()).unwrap();
        let rx: Vec<Complex64> = s
            .iter()
            .map(|v| v + Complex64::new(n.sample(&mut rng), n.sample(&mut rng)))
            .collect();
        let snr = snr_db_from_evm(evm_rms(&rx, &s).unwrap());
        assert!((snr - 25.0).abs() <= 0.2, "{snr}");
    }

    #[test]
    fn evm_invariances() {
        let s = qpsk(64);
        let rx: Vec<Complex64> = s
            .iter()
            .enumerate()
            .map(|(k, v)| v + Complex64::new(0.01 * k as f64, -0.02))
            .collect();
        let e = evm_rms(&rx, &s).unwrap();
        let c = Complex64::from_polar(3.7, 1.1);
        let rs: Vec<Complex64> = rx.iter().map(|v| v * c).collect();
        let ss: Vec<Complex64> = s.iter().map(|v| v * c).collect();
        assert!((evm_rms(&rs, &ss).unwrap() - e).abs() < 1e-12);
    }

    #[test]
    fn evm_errors() {
        assert!(evm_rms(&[], &[]).is_err());
        assert!(evm_rms(&qpsk(3), &qpsk(4)).is_err());
    }

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..41)
            .map(|i| {
                let x = 1.0 + i as f64 / 10.0;
                (x, 12.0 * x + 13.0)
            })
            .collect();
        let f = linear_fit(&pts).unwrap();
        assert!((f.slope - 12.0).abs() < 1e-9 && (f.intercept - 13.0).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_perturbation_keeps_slope() {
        // residuals +d, -2d, +d at each of x = -1, 0, 1 around 5; orthogonal to 1 and x
        let mut pts = Vec::new();
        for &c in &[2.0, 5.0, 8.0] {
            for (dx, r) in [(-1.0, 0.3), (0.0, -0.6), (1.0, 0.3)] {
                let x = c + dx;
                pts.push((x, 2.0 * x + 1.0 + r));
            }
        }
        let f = linear_fit(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-9);
        assert!(f.r_squared < 1.0);
    }

    #[test]
    fn order_invariant() {
        let pts = vec![(1.0, 2.0), (2.0, 2.5), (3.0, 4.5), (4.0, 4.0)];
        let mut rev = pts.clone();
        rev.reverse();
        let a = linear_fit(&pts).unwrap();
        let b = linear_fit(&rev).unwrap();
        assert!((a.slope - b.slope).abs() < 1e-12 && (a.r_squared - b.r_squared).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            linear_fit(&[(1.0, 2.0)]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            linear_fit(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]),
            Err(Error::Degenerate(_))
        ));
    }
}
