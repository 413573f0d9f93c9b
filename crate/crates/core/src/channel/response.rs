//! Magnitude-only transmitter frequency responses.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration form of a response; `Table` names a file to load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ResponseSpec {
    Flat,
    Bessel { order: u32, cutoff_hz: f64 },
    Butterworth { order: u32, cutoff_hz: f64 },
    Table { file: PathBuf },
}

impl Default for ResponseSpec {
    fn default() -> Self {
        ResponseSpec::Bessel {
            order: 4,
            cutoff_hz: 30e9,
        }
    }
}

impl ResponseSpec {
    pub fn resolve(&self) -> Result<FrequencyResponse> {
        match self {
            ResponseSpec::Flat => Ok(FrequencyResponse::Flat),
            ResponseSpec::Bessel { order, cutoff_hz } => {
                FrequencyResponse::bessel(*order, *cutoff_hz)
            }
            ResponseSpec::Butterworth { order, cutoff_hz } => {
                FrequencyResponse::butterworth(*order, *cutoff_hz)
            }
            ResponseSpec::Table { file } => FrequencyResponse::load_table(file),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FrequencyResponse {
    Flat,
    Bessel {
        /// Reverse Bessel polynomial coefficients, constant term first.
        coeffs: Vec<f64>,
        cutoff_hz: f64,
        /// Normalised angular frequency of the 3 dB point.
        w3db: f64,
    },
    Butterworth {
        order: u32,
        cutoff_hz: f64,
    },
    /// `(frequency_hz, magnitude_db)` sorted by frequency.
    Table(Vec<(f64, f64)>),
}

fn check_lowpass(order: u32, cutoff_hz: f64) -> Result<()> {
    if order == 0 || order > 12 {
        return Err(Error::config(format!(
            "filter order {order} outside 1..=12"
        )));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz.is_finite()) {
        return Err(Error::config("cutoff must be positive"));
    }
    Ok(())
}

fn bessel_gain(coeffs: &[f64], w: f64) -> f64 {
    // |theta(0)| / |theta(jw)|
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        let p = c * w.powi(k as i32);
        match k % 4 {
            0 => re += p,
            1 => im += p,
            2 => re -= p,
            _ => im -= p,
        }
    }
    coeffs[0] / re.hypot(im)
}

impl FrequencyResponse {
    pub fn bessel(order: u32, cutoff_hz: f64) -> Result<Self> {
        check_lowpass(order, cutoff_hz)?;
        let n = order as usize;
        let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
        let coeffs: Vec<f64> = (0..=n)
            .map(|k| fact(2 * n - k) / (2f64.powi((n - k) as i32) * fact(k) * fact(n - k)))
            .collect();
        let target = std::f64::consts::FRAC_1_SQRT_2;
        let (mut lo, mut hi) = (0.0, 1.0);
        while bessel_gain(&coeffs, hi) > target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if bessel_gain(&coeffs, mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(FrequencyResponse::Bessel {
            coeffs,
            cutoff_hz,
            w3db: 0.5 * (lo + hi),
        })
    }

    pub fn butterworth(order: u32, cutoff_hz: f64) -> Result<Self> {
        check_lowpass(order, cutoff_hz)?;
        Ok(FrequencyResponse::Butterworth { order, cutoff_hz })
    }

    /// Parses `frequency_hz magnitude_db` rows; `#` starts a comment, commas are separators.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::config(format!(
                        "response table line {}: bad number {s:?}",
                        lineno + 1
                    ))
                })
            };
            if cols.len() != 2 {
                return Err(Error::config(format!(
                    "response table line {}: expected two columns",
                    lineno + 1
                )));
            }
            rows.push((parse(cols[0])?.abs(), parse(cols[1])?));
        }
        if rows.is_empty() {
            return Err(Error::config("response table is empty"));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(FrequencyResponse::Table(rows))
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_table(&text)
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, FrequencyResponse::Flat)
    }

    /// Linear magnitude at `f_hz` (the response is even in frequency).
    pub fn magnitude(&self, f_hz: f64) -> f64 {
        let f = f_hz.abs();
        match self {
            FrequencyResponse::Flat => 1.0,
            FrequencyResponse::Bessel {
                coeffs,
                cutoff_hz,
                w3db,
            } => bessel_gain(coeffs, w3db * f / cutoff_hz),
            FrequencyResponse::Butterworth { order, cutoff_hz } => {
                1.0 / (1.0 + (f / cutoff_hz).powi(2 * *order as i32)).sqrt()
            }
            FrequencyResponse::Table(rows) => {
                let db = match rows.iter().position(|r| r.0 >= f) {
                    Some(0) => rows[0].1,
                    None => rows[rows.len() - 1].1,
                    Some(i) => {
                        let (f0, d0) = rows[i - 1];
                        let (f1, d1) = rows[i];
                        d0 + (d1 - d0) * (f - f0) / (f1 - f0)
                    }
                };
                10f64.powf(db / 20.0)
            }
        }
    }
}
