//! Exact values of the form `a + b·e^{−1}` with rational `a`, `b`: every
//! probability built from Poisson(1) weights and finite combinatorics.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpLinear {
    /// Rational part `a`.
    pub rational: BigRational,
    /// Coefficient `b` of `e^{−1}`.
    pub inv_e: BigRational,
}

impl ExpLinear {
    pub fn zero() -> Self {
        Self {
            rational: BigRational::zero(),
            inv_e: BigRational::zero(),
        }
    }

    pub fn rational(r: BigRational) -> Self {
        Self {
            rational: r,
            inv_e: BigRational::zero(),
        }
    }

    pub fn inv_e(b: BigRational) -> Self {
        Self {
            rational: BigRational::zero(),
            inv_e: b,
        }
    }

    /// `(num/den) · e^{−1}`.
    pub fn inv_e_fraction(num: i64, den: i64) -> Self {
        Self::inv_e(ratio(BigInt::from(num), BigInt::from(den)))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            rational: &self.rational * r,
            inv_e: &self.inv_e * r,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        let b = self.inv_e.to_f64().unwrap_or(f64::NAN);
        a + b * (-1.0f64).exp()
    }
}

impl Add for ExpLinear {
    type Output = ExpLinear;

    fn add(self, o: ExpLinear) -> ExpLinear {
        ExpLinear {
            rational: self.rational + o.rational,
            inv_e: self.inv_e + o.inv_e,
        }
    }
}

impl Mul<&BigRational> for ExpLinear {
    type Output = ExpLinear;

    fn mul(self, r: &BigRational) -> ExpLinear {
        self.scale(r)
    }
}

impl fmt::Display for ExpLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.inv_e.is_zero()) {
            (true, true) => f.write_str("0"),
            (false, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "({})/e", self.inv_e),
            (false, false) => write!(f, "{} + ({})/e", self.rational, self.inv_e),
        }
    }
}

pub fn big_factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Exact Poisson(1) weight of `k`, with all mass of `[n, ∞)` moved onto `n`
/// (the scramble operator's clamp).
pub fn poisson1_clamped(k: usize, n: usize) -> ExpLinear {
    use std::cmp::Ordering;
    match k.cmp(&n) {
        Ordering::Less => ExpLinear::inv_e(ratio(BigInt::one(), big_factorial(k))),
        Ordering::Equal => {
            let head: BigRational = (0..n)
                .map(|j| ratio(BigInt::one(), big_factorial(j)))
                .fold(BigRational::zero(), |a, b| a + b);
            ExpLinear {
                rational: BigRational::one(),
                inv_e: -head,
            }
        }
        Ordering::Greater => ExpLinear::zero(),
    }
}
