//! Uniform Cartesian and polar quantizers, the residual subtraction that
//! pairs with them, and the receiver-side lattice slicer.
//!
//! Both modes reconstruct at bin centres (mid-rise). A value that falls
//! exactly on a bin boundary goes to the upper bin, i.e. ties round toward
//! +inf on each Cartesian axis and toward +pi in phase. Inputs beyond the
//! full-scale amplitude saturate to the outermost reconstruction point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantizerMode {
    Cartesian,
    Polar,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub mode: QuantizerMode,
    /// Amplitude levels: per axis for Cartesian, radial for polar.
    pub n_a: u32,
    /// Phase levels; ignored in Cartesian mode.
    pub n_phi: u32,
    /// Clip amplitude: per axis for Cartesian, radial maximum for polar.
    pub full_scale: f64,
}

impl QuantizerSpec {
    pub fn cartesian(n_a: u32, full_scale: f64) -> Self {
        Self {
            mode: QuantizerMode::Cartesian,
            n_a,
            n_phi: 1,
            full_scale,
        }
    }

    pub fn polar(n_a: u32, n_phi: u32, full_scale: f64) -> Self {
        Self {
            mode: QuantizerMode::Polar,
            n_a,
            n_phi,
            full_scale,
        }
    }

    pub fn with_full_scale(self, full_scale: f64) -> Self {
        Self { full_scale, ..self }
    }

    /// The quantization factor set: `[n_a]` for Cartesian, `[n_a, n_phi]` for polar.
    pub fn levels(&self) -> Vec<u32> {
        match self.mode {
            QuantizerMode::Cartesian => vec![self.n_a],
            QuantizerMode::Polar => vec![self.n_a, self.n_phi],
        }
    }

    /// Amplitude step: `2A/n_a` per axis (Cartesian) or `A/n_a` radially (polar).
    pub fn step(&self) -> f64 {
        match self.mode {
            QuantizerMode::Cartesian => 2.0 * self.full_scale / self.n_a as f64,
            QuantizerMode::Polar => self.full_scale / self.n_a as f64,
        }
    }

    pub fn phase_step(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_a == 0 {
            return Err(Error::domain(
                "quantizer needs at least one amplitude level",
            ));
        }
        if self.mode == QuantizerMode::Polar && self.n_phi == 0 {
            return Err(Error::domain(
                "polar quantizer needs at least one phase level",
            ));
        }
        if !(self.full_scale > 0.0 && self.full_scale.is_finite()) {
            return Err(Error::domain(format!(
                "full scale must be positive and finite, got {}",
                self.full_scale
            )));
        }
        Ok(())
    }

    /// Largest amplitude of `x` as this quantizer measures it: per-axis for
    /// Cartesian, modulus for polar.
    pub fn peak_of(&self, x: &[Complex64]) -> f64 {
        match self.mode {
            QuantizerMode::Cartesian => x
                .iter()
                .map(|v| v.re.abs().max(v.im.abs()))
                .fold(0.0, f64::max),
            QuantizerMode::Polar => x.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }
}

/// Quantized samples plus the number of saturated input samples.
#[derive(Clone, Debug)]
pub struct Quantized {
    pub samples: Vec<Complex64>,
    pub clipped: usize,
}

#[inline]
fn uniform_index(v: f64, lo: f64, step: f64, n: u32) -> (u32, bool) {
    let k = ((v - lo) / step).floor();
    if k < 0.0 {
        (0, true)
    } else if k >= n as f64 {
        // a value exactly at +A sits on the upper edge of the last bin
        (n - 1, v - lo > step * n as f64)
    } else {
        (k as u32, false)
    }
}

#[inline]
fn cartesian_axis(v: f64, a: f64, step: f64, n: u32) -> (f64, bool) {
    let (k, clipped) = uniform_index(v, -a, step, n);
    (-a + (k as f64 + 0.5) * step, clipped)
}

#[inline]
fn polar_point(v: Complex64, spec: &QuantizerSpec) -> (Complex64, bool) {
    let r_step = spec.step();
    let (k, clipped) = uniform_index(v.norm(), 0.0, r_step, spec.n_a);
    let r = (k as f64 + 0.5) * r_step;
    let p_step = spec.phase_step();
    let m = (((v.arg() + PI) / p_step).floor() as i64).rem_euclid(spec.n_phi as i64);
    let phi = (m as f64 + 0.5) * p_step - PI;
    (Complex64::from_polar(r, phi), clipped)
}

/// Quantizes `x` with `spec`, counting saturations.
pub fn quantize(x: &[Complex64], spec: &QuantizerSpec) -> Quantized {
    let mut clipped = 0;
    let samples = match spec.mode {
        QuantizerMode::Cartesian => {
            let a = spec.full_scale;
            let step = spec.step();
            x.iter()
                .map(|v| {
                    let (re, c1) = cartesian_axis(v.re, a, step, spec.n_a);
                    let (im, c2) = cartesian_axis(v.im, a, step, spec.n_a);
                    clipped += usize::from(c1 || c2);
                    Complex64::new(re, im)
                })
                .collect()
        }
        QuantizerMode::Polar => x
            .iter()
            .map(|&v| {
                let (q, c) = polar_point(v, spec);
                clipped += usize::from(c);
                q
            })
            .collect(),
    };
    Quantized { samples, clipped }
}

/// Cartesian quantizer `Q_C`: each axis independently to the nearest of `n_a` bin centres.
pub fn quantize_cartesian(x: &[Complex64], spec: &QuantizerSpec) -> Result<Vec<Complex64>> {
    if spec.mode != QuantizerMode::Cartesian {
        return Err(Error::domain("quantize_cartesian called with a polar spec"));
    }
    spec.validate()?;
    Ok(quantize(x, spec).samples)
}

/// Polar quantizer `Q_P`: modulus to `n_a` radial centres, phase to `n_phi` sector centres.
pub fn quantize_polar(x: &[Complex64], spec: &QuantizerSpec) -> Result<Vec<Complex64>> {
    if spec.mode != QuantizerMode::Polar {
        return Err(Error::domain("quantize_polar called with a Cartesian spec"));
    }
    spec.validate()?;
    Ok(quantize(x, spec).samples)
}

/// Element-wise `s_p - s_d`.
pub fn residual(s_p: &[Complex64], s_d: &[Complex64]) -> Result<Vec<Complex64>> {
    ensure_len(s_p.len(), s_d.len())?;
    Ok(s_p.iter().zip(s_d).map(|(p, d)| p - d).collect())
}

/// Hard decision onto the reconstruction lattice of `spec`.
///
/// Shares its geometry with [`quantize`], so a received digital segment whose
/// per-axis perturbation stays inside its cell is restored exactly.
pub fn slice_to_lattice(y: &[Complex64], spec: &QuantizerSpec) -> Vec<Complex64> {
    quantize(y, spec).samples
}
