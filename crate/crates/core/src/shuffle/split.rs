//! The block-split law `D(a, b, n)` on `{0, ..., n}`.
//!
//! `Prob{k}` is proportional to `(a)_k (b+k)_{n-k}`, which equals
//! `(a)_k / (b)_k` up to the constant `(b)_n` and stays finite at `b = 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e250;
/// Products of `n` factors below `2^bits` stay finite while `n * bits` is at most this.
const PRODUCT_BITS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitDistribution {
    pub a: i64,
    pub b: i64,
    pub n: usize,
}

impl SplitDistribution {
    pub fn new(a: i64, b: i64, n: usize) -> Result<Self> {
        if a < 0 || b < 0 {
            return Err(Error::Domain(format!(
                "split parameters must be nonnegative, got a={a}, b={b}"
            )));
        }
        if a == 0 && b == 0 && n > 0 {
            return Err(Error::InvalidSplit { a, b, n });
        }
        Ok(SplitDistribution { a, b, n })
    }

    /// The single outcome when the law is a point mass.
    fn point_mass(&self) -> Option<usize> {
        if self.n == 0 || self.a == 0 {
            Some(0)
        } else if self.b == 0 && self.n == 1 {
            Some(1)
        } else {
            None
        }
    }

    /// Unnormalized weights written into `buf`; returns their sum.
    fn fill_weights(&self, buf: &mut Vec<f64>) -> f64 {
        if buf.len() <= self.n {
            buf.resize(self.n + 1, 0.0);
        }
        let buf = &mut buf[..=self.n];
        let largest = (self.a.max(self.b) as u64 + self.n as u64).max(2);
        if self.n as u64 * u64::from(64 - largest.leading_zeros()) <= PRODUCT_BITS {
            self.product_weights(buf)
        } else {
            self.ratio_weights(buf)
        }
    }

    /// `(a)_k (b+k)_{n-k}` as plain products; every factor is below `2^bits`.
    fn product_weights(&self, buf: &mut [f64]) -> f64 {
        let mut q = 1.0;
        for k in (0..self.n).rev() {
            buf[k + 1] = q;
            q *= (self.b + k as i64) as f64;
        }
        buf[0] = q;
        let (mut p, mut total) = (1.0, 0.0);
        for (k, w) in buf.iter_mut().enumerate() {
            *w *= p;
            total += *w;
            p *= (self.a + k as i64) as f64;
        }
        total
    }

    /// Ratio recurrence `w_{k+1} = w_k (a+k)/(b+k)`, rescaled to stay finite.
    fn ratio_weights(&self, buf: &mut [f64]) -> f64 {
        // b = 0 kills k = 0; the ratio recurrence then starts at k = 1
        let first = usize::from(self.b == 0);
        buf[0] = 0.0;
        buf[first] = 1.0;
        let mut total = 1.0;
        for k in first..self.n {
            let next = buf[k] * (self.a + k as i64) as f64 / (self.b + k as i64) as f64;
            buf[k + 1] = next;
            total += next;
            if next > RESCALE_ABOVE {
                for w in buf[first..=k + 1].iter_mut() {
                    *w /= RESCALE_ABOVE;
                }
                total /= RESCALE_ABOVE;
            }
        }
        total
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let mut buf = Vec::new();
        if let Some(k) = self.point_mass() {
            buf.resize(self.n + 1, 0.0);
            buf[k] = 1.0;
            return buf;
        }
        let total = self.fill_weights(&mut buf);
        buf.truncate(self.n + 1);
        buf.iter_mut().for_each(|w| *w /= total);
        buf
    }

    pub fn probabilities_exact(&self) -> Vec<BigRational> {
        let n = self.n as i64;
        let w: Vec<BigInt> = (0..=n)
            .map(|k| {
                let up = (0..k).fold(BigInt::one(), |acc, j| acc * (self.a + j));
                (k..n).fold(up, |acc, j| acc * (self.b + j))
            })
            .collect();
        let total: BigInt = w.iter().sum();
        debug_assert!(!total.is_zero());
        w.into_iter()
            .map(|v| BigRational::new(v, total.clone()))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng, &mut Vec::new())
    }

    /// Inverse-CDF draw reusing `scratch`; point masses consume no randomness.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Vec<f64>) -> usize {
        if let Some(k) = self.point_mass() {
            return k;
        }
        if self.n == 1 {
            let u = rng.gen::<f64>() * (self.a + self.b) as f64;
            return usize::from(u >= self.b as f64);
        }
        let total = self.fill_weights(scratch);
        let u = rng.gen::<f64>() * total;
        // the outcome is the number of partial sums at or below u
        let mut acc = 0.0;
        let mut k = 0;
        for &w in &scratch[..self.n] {
            acc += w;
            k += usize::from(acc <= u);
        }
        k
    }
}

/// One draw from `D(a, b, n)`.
pub fn sample_split<R: Rng + ?Sized>(a: i64, b: i64, n: usize, rng: &mut R) -> Result<usize> {
    Ok(SplitDistribution::new(a, b, n)?.sample(rng))
}
