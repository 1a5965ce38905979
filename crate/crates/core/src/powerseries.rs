//! Truncated formal power series in one variable with exact rational
//! coefficients.
//!
//! The truncation order travels with each value. Combining series of
//! different orders is an error, never an implicit truncation.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{self, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("log needs constant term 1")]
    LogConstant,
    #[error("exp needs constant term 0")]
    ExpConstant,
    #[error("inverse needs a nonzero constant term")]
    NotInvertible,
    #[error("a series needs at least one coefficient")]
    Empty,
}

/// `c_0 + c_1 t + ... + c_N t^N + O(t^(N+1))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalSeries {
    coeffs: Vec<Scalar>,
}

impl FormalSeries {
    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(FormalSeries { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        FormalSeries {
            coeffs: vec![Scalar::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Scalar::one(), order)
    }

    pub fn constant(c: Scalar, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Highest retained power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    fn same_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        Ok(FormalSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k)
                    .map(|j| &self.coeffs[j] * &other.coeffs[k - j])
                    .sum()
            })
            .collect();
        Ok(FormalSeries { coeffs })
    }

    /// Multiplicative inverse, defined when `c_0 != 0`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = a0.recip();
        let mut b: Vec<Scalar> = vec![inv0.clone()];
        for k in 1..=self.order() {
            let acc: Scalar = (1..=k).map(|j| &self.coeffs[j] * &b[k - j]).sum();
            b.push(-acc * &inv0);
        }
        Ok(FormalSeries { coeffs: b })
    }

    /// Logarithm of a series with `c_0 = 1`, from `a L' = a'`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::LogConstant);
        }
        let a = &self.coeffs;
        let mut l = vec![Scalar::zero()];
        for k in 1..=self.order() {
            // k l_k = k a_k - sum_{j=1}^{k-1} j l_j a_{k-j}
            let acc: Scalar = (1..k)
                .map(|j| scalar::from_i64(j as i64) * &l[j] * &a[k - j])
                .sum();
            l.push(&a[k] - acc / scalar::from_i64(k as i64));
        }
        Ok(FormalSeries { coeffs: l })
    }

    /// Exponential of a series with `c_0 = 0`, from `E' = a' E`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ExpConstant);
        }
        let a = &self.coeffs;
        let mut e = vec![Scalar::one()];
        for k in 1..=self.order() {
            let acc: Scalar = (1..=k)
                .map(|j| scalar::from_i64(j as i64) * &a[j] * &e[k - j])
                .sum();
            e.push(acc / scalar::from_i64(k as i64));
        }
        Ok(FormalSeries { coeffs: e })
    }

    /// Horner evaluation of the truncated polynomial in binary64.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + scalar::to_f64(c))
    }

    /// Coefficients as exact-rational strings, lowest order first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(scalar::format).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string arrays always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            match k {
                0 => write!(f, "{}", scalar::format(c))?,
                1 => write!(f, "({}) t", scalar::format(c))?,
                _ => write!(f, "({}) t^{k}", scalar::format(c))?,
            }
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

impl Serialize for FormalSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        scalar::serde_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for FormalSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coeffs = scalar::serde_vec::deserialize(d)?;
        FormalSeries::from_coeffs(coeffs).map_err(serde::de::Error::custom)
    }
}
