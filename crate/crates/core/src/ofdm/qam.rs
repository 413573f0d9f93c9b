//! Square Gray-coded QAM.
//!
//! Each symbol carries `2k` bits: the first `k` select the in-phase level and
//! the last `k` the quadrature level, each Gray-coded along its axis. Bits are
//! `u8` values 0 or 1, most significant first.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QamConstellation {
    order: usize,
    bits_per_axis: usize,
    scale: f64,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        let ok = order >= 4 && order.is_power_of_two() && order.trailing_zeros().is_multiple_of(2);
        if !ok {
            return Err(Error::UnsupportedFormat(format!(
                "QAM order {order} is not a square power of two"
            )));
        }
        Ok(Self {
            order,
            bits_per_axis: order.trailing_zeros() as usize / 2,
            // unit average power: E|a|^2 = 2 (M - 1) / 3 on odd-integer levels
            scale: (1.5 / (order as f64 - 1.0)).sqrt(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    fn levels(&self) -> usize {
        1 << self.bits_per_axis
    }

    fn axis_value(&self, bits: &[u8]) -> f64 {
        let gray = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let index = gray_decode(gray);
        (2.0 * index as f64 - (self.levels() - 1) as f64) * self.scale
    }

    fn axis_bits(&self, v: f64, out: &mut Vec<u8>) {
        let top = (self.levels() - 1) as f64;
        let index = ((v / self.scale + top) / 2.0).round().clamp(0.0, top) as usize;
        let gray = index ^ (index >> 1);
        for shift in (0..self.bits_per_axis).rev() {
            out.push(((gray >> shift) & 1) as u8);
        }
    }

    pub fn map(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let bps = self.bits_per_symbol();
        if !bits.len().is_multiple_of(bps) {
            return Err(Error::domain(format!(
                "{} bits is not a multiple of {bps}",
                bits.len()
            )));
        }
        let k = self.bits_per_axis;
        Ok(bits
            .chunks_exact(bps)
            .map(|c| Complex64::new(self.axis_value(&c[..k]), self.axis_value(&c[k..])))
            .collect())
    }

    /// Nearest-point decision followed by Gray decoding.
    pub fn demap(&self, symbols: &[Complex64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for s in symbols {
            self.axis_bits(s.re, &mut out);
            self.axis_bits(s.im, &mut out);
        }
        out
    }

    /// Every constellation point, indexed by its bit label.
    pub fn points(&self) -> Vec<Complex64> {
        let bps = self.bits_per_symbol();
        let bits: Vec<u8> = (0..self.order)
            .flat_map(|label| (0..bps).rev().map(move |s| ((label >> s) & 1) as u8))
            .collect();
        self.map(&bits).expect("label bits are well formed")
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut n = 0;
    while g != 0 {
        n ^= g;
        g >>= 1;
    }
    n
}

pub fn qam_map(bits: &[u8], order: usize) -> Result<Vec<Complex64>> {
    QamConstellation::new(order)?.map(bits)
}

pub fn qam_demap(symbols: &[Complex64], order: usize) -> Result<Vec<u8>> {
    Ok(QamConstellation::new(order)?.demap(symbols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_square_orders() {
        for order in [0, 2, 8, 32, 100, 512, 2048] {
            assert!(matches!(
                QamConstellation::new(order),
                Err(Error::UnsupportedFormat(_))
            ));
        }
        for order in [4, 16, 64, 256, 1024, 4096] {
            assert!(QamConstellation::new(order).is_ok());
        }
    }

    #[test]
    fn round_trip_random_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for order in [4, 16, 1024] {
            let q = QamConstellation::new(order).unwrap();
            let bits: Vec<u8> = (0..q.bits_per_symbol() * 5000)
                .map(|_| rng.gen_range(0..2))
                .collect();
            assert_eq!(q.demap(&q.map(&bits).unwrap()), bits);
        }
    }

    #[test]
    fn unit_average_power() {
        let pts = QamConstellation::new(1024).unwrap().points();
        let p = pts.iter().map(|v| v.norm_sqr()).sum::<f64>() / pts.len() as f64;
        assert!((p - 1.0).abs() < 1e-12);
        assert!((pts[0].re.abs() - 31.0 / 682f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let q = QamConstellation::new(1024).unwrap();
        let pts = q.points();
        let step = 2.0 * q.scale;
        let mut checked = 0;
        for (a, pa) in pts.iter().enumerate() {
            for (b, pb) in pts.iter().enumerate() {
                let d = pa - pb;
                let horizontal = (d.re.abs() - step).abs() < 1e-9 && d.im.abs() < 1e-9;
                let vertical = (d.im.abs() - step).abs() < 1e-9 && d.re.abs() < 1e-9;
                if horizontal || vertical {
                    assert_eq!((a ^ b).count_ones(), 1, "{a} vs {b}");
                    checked += 1;
                }
            }
        }
        // 2 axes * 32 rows * 31 adjacent pairs, counted in both directions
        assert_eq!(checked, 2 * 2 * 32 * 31);
    }

    #[test]
    fn bad_bit_count() {
        assert!(qam_map(&[0, 1, 1], 16).is_err());
    }
}
