//! Arithmetic backends shared by the matrix and spectral code.
//!
//! Exact work uses [`BigRational`]; large parameters go through
//! log-factorials so that weights like `1/(x!(t+N-1-x)!...)` never underflow.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const LN_FACT_TABLE: usize = 1 << 16;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACT_TABLE);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..LN_FACT_TABLE {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln(n!)`; table lookup below 2^16, Stirling series above.
pub fn ln_factorial(n: i64) -> f64 {
    assert!(n >= 0, "ln_factorial of negative argument {n}");
    let n = n as usize;
    if n < LN_FACT_TABLE {
        return ln_fact_table()[n];
    }
    let x = n as f64 + 1.0;
    // ln Gamma(x), error far below f64 resolution at this size
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

/// `ln((a)_k)` for `a >= 1`.
pub fn ln_pochhammer(a: i64, k: i64) -> f64 {
    debug_assert!(a >= 1 && k >= 0);
    ln_factorial(a + k - 1) - ln_factorial(a - 1)
}

/// Field operations needed by the generic formulas.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(v: i64) -> Self;
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn one() -> Self {
        Self::from_int(1)
    }
    fn is_zero(&self) -> bool;
    /// Pivot score for elimination; larger is preferred.
    fn magnitude(&self) -> f64;
    fn to_f64(&self) -> f64;
    fn from_factors(f: &Factors) -> Self;
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_factors(f: &Factors) -> Self {
        f.to_f64()
    }
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        // any nonzero pivot is exact; prefer small denominators implicitly
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
    fn from_factors(f: &Factors) -> Self {
        f.exact()
    }
}

/// Exact rational from an integer.
pub fn rat(v: i64) -> BigRational {
    <BigRational as Scalar>::from_int(v)
}

pub fn factorial_big(n: i64) -> BigInt {
    assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Rising factorial `(a)_k = a(a+1)...(a+k-1)`.
pub fn pochhammer<S: Scalar>(a: i64, k: i64) -> S {
    (0..k).fold(S::one(), |acc, j| acc * S::from_int(a + j))
}

/// Determinant by Gaussian elimination with pivoting on [`Scalar::magnitude`].
pub fn det<S: Scalar>(rows: &[Vec<S>]) -> S {
    let n = rows.len();
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let mut sign_flip = false;
    let mut acc = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()))
            .expect("non-empty range");
        if m[pivot][col].is_zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            sign_flip = !sign_flip;
        }
        let p = m[col][col].clone();
        acc = acc * p.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / p.clone();
            let (top, bottom) = m.split_at_mut(r);
            for (v, pivot) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *v = v.clone() - f.clone() * pivot.clone();
            }
        }
    }
    if sign_flip {
        -acc
    } else {
        acc
    }
}

/// A probability written as a ratio of integer products.
///
/// Every closed-form weight in this crate is of that shape, so one list of
/// factors serves both the exact and the log-space backend.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Factors {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl Factors {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.num.contains(&0)
    }

    pub fn push_pochhammer_den(&mut self, a: i64, k: i64) {
        self.den.extend((0..k).map(|j| a + j));
    }

    pub fn exact(&self) -> BigRational {
        if self.is_zero() {
            return <BigRational as Scalar>::zero();
        }
        let num = self
            .num
            .iter()
            .fold(BigInt::one(), |acc, &v| acc * BigInt::from(v));
        let den = self
            .den
            .iter()
            .fold(BigInt::one(), |acc, &v| acc * BigInt::from(v));
        BigRational::new(num, den)
    }

    /// Natural log of the value; `None` when the value is zero.
    pub fn ln(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let mut sign = 1i32;
        let mut acc = 0.0;
        for &v in &self.num {
            if v < 0 {
                sign = -sign;
            }
            acc += (v.unsigned_abs() as f64).ln();
        }
        for &v in &self.den {
            if v < 0 {
                sign = -sign;
            }
            acc -= (v.unsigned_abs() as f64).ln();
        }
        debug_assert!(sign > 0, "negative probability factors {self:?}");
        Some(acc)
    }

    pub fn to_f64(&self) -> f64 {
        self.ln().map_or(0.0, f64::exp)
    }
}
