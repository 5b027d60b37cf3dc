//! Finite fields `F_{p^w}` and power series over them truncated modulo `X^N`.
//!
//! Everything downstream (substitution groups, truncated rings, reductions of
//! p-adic series) is built on [`TruncSeries`].

mod field;
mod poly;
mod series;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{FFElem, FiniteField, MAX_PRIME};
pub(crate) use field::is_prime;
pub use series::TruncSeries;


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("bad field modulus: {0}")]
    BadModulus(String),
    #[error("bad coefficient: {0}")]
    BadCoefficient(String),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("series is not invertible for substitution (needs c0 = 0 and c1 != 0)")]
    NotSubstitutionUnit,
    #[error("series is not divisible by the requested power of X")]
    NotDivisible,
    #[error("no coefficients left after the requested shift")]
    PrecisionExhausted,
}

pub fn series_add(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    a.add(b)
}

pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    a.mul(b)
}

pub fn series_compose(outer: &TruncSeries, inner: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    outer.compose(inner)
}

pub fn series_comp_inverse(g: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    g.comp_inverse()
}

pub fn frobenius_twist(g: &TruncSeries, j: i64) -> TruncSeries {
    g.frobenius_twist(j)
}

/// One coefficient in the interchange format: a bare integer over a prime
/// field, or a length-`w` coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Scalar(i64),
    Coords(Vec<i64>),
}

/// Interchange form of a [`TruncSeries`]:
/// `{ "p", "w", "modulus"?, "trunc", "coeffs" }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub p: u64,
    pub w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub trunc: usize,
    pub coeffs: Vec<CoeffJson>,
}

impl SeriesJson {
    pub fn field(&self) -> Result<FiniteField, SeriesError> {
        let k = match &self.modulus {
            Some(m) => FiniteField::extension(self.p, m)?,
            None if self.w == 1 => FiniteField::prime(self.p)?,
            None => return Err(SeriesError::BadModulus(format!("w = {} needs a modulus", self.w))),
        };
        if k.w() != self.w {
            return Err(SeriesError::BadModulus(format!(
                "modulus has degree {} but w = {}",
                k.w(),
                self.w
            )));
        }
        Ok(k)
    }

    pub fn to_series(&self) -> Result<TruncSeries, SeriesError> {
        let k = self.field()?;
        if self.trunc == 0 {
            return Err(SeriesError::BadCoefficient("trunc must be at least 1".into()));
        }
        if self.coeffs.len() > self.trunc {
            return Err(SeriesError::BadCoefficient(format!(
                "{} coefficients exceed trunc = {}",
                self.coeffs.len(),
                self.trunc
            )));
        }
        let elems = self
            .coeffs
            .iter()
            .map(|c| match c {
                CoeffJson::Scalar(v) => Ok(k.from_int(*v)),
                CoeffJson::Coords(v) => k.elem(v),
            })
            .collect::<Result<Vec<_>, _>>()?;
        TruncSeries::from_coeffs(&k, self.trunc, &elems)
    }

    pub fn from_series(s: &TruncSeries) -> Self {
        let k = s.field();
        let coeffs = (0..s.trunc())
            .map(|i| {
                let c = s.coeff(i);
                if k.w() == 1 {
                    CoeffJson::Scalar(c.coords()[0] as i64)
                } else {
                    CoeffJson::Coords(c.coords().iter().map(|&x| x as i64).collect())
                }
            })
            .collect();
        Self {
            p: k.p(),
            w: k.w(),
            modulus: k.modulus().map(|m| m.to_vec()),
            trunc: s.trunc(),
            coeffs,
        }
    }
}
