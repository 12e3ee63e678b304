//! Iterative in-place radix-2 Cooley-Tukey FFT.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Precomputed plan for power-of-two transforms of one length.
#[derive(Clone, Debug)]
pub struct Radix2Fft<F> {
    len: usize,
    /// `exp(-2πik/len)` for `k < len/2`, evaluated in f64.
    twiddles: Vec<Complex<F>>,
    bitrev: Vec<usize>,
}

impl<F: Scalar> Radix2Fft<F> {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("FFT length {len} is not a power of two")));
        }
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..len / 2)
            .map(|k| {
                let phase = -2.0 * std::f64::consts::PI * k as f64 / len as f64;
                Complex::new(F::of(phase.cos()), F::of(phase.sin()))
            })
            .collect();
        Ok(Radix2Fft { len, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized forward transform `X[k] = Σ x[n] e^{-2πikn/N}`.
    pub fn forward(&self, buf: &mut [Complex<F>]) {
        self.transform(buf, false);
    }

    /// Inverse transform including the `1/N` factor.
    pub fn inverse(&self, buf: &mut [Complex<F>]) {
        self.transform(buf, true);
        let scale = F::of_usize(self.len).recip();
        for x in buf.iter_mut() {
            *x = x.scale(scale);
        }
    }

    fn transform(&self, buf: &mut [Complex<F>], inverse: bool) {
        assert_eq!(buf.len(), self.len, "buffer length must match the plan");
        for i in 0..self.len {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (t, &v)| {
                    let ph = -2.0 * std::f64::consts::PI * (k * t % n) as f64 / n as f64;
                    acc + v * Complex::new(ph.cos(), ph.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for len in [1usize, 2, 4, 8, 64, 256] {
            let x: Vec<Complex<f64>> = (0..len)
                .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos() - 0.2))
                .collect();
            let mut y = x.clone();
            Radix2Fft::new(len).unwrap().forward(&mut y);
            for (a, b) in y.iter().zip(naive_dft(&x)) {
                assert!((a - b).norm() < 1e-10 * len as f64, "len {len}");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let plan = Radix2Fft::<f64>::new(32).unwrap();
        let x: Vec<Complex<f64>> = (0..32).map(|i| Complex::new(i as f64, -(i as f64) / 3.0)).collect();
        let mut y = x.clone();
        plan.forward(&mut y);
        plan.inverse(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Radix2Fft::<f64>::new(0).is_err());
        assert!(Radix2Fft::<f64>::new(1000).is_err());
        assert!(Radix2Fft::<f32>::new(1024).is_ok());
    }
}
