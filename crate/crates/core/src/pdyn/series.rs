use serde::{Deserialize, Serialize};

use super::PdynError;
use crate::gfseries::{is_prime, FiniteField, TruncSeries};
use crate::interchange;

/// Power series over `Z_p` known modulo `(p^prec, X^trunc)`.
///
/// Coefficients are stored in `[0, p^prec)`; all operations are ring
/// operations modulo `p^prec`, so no coefficient precision is lost.
///
/// JSON: `{"p", "prec", "trunc", "coeffs"}`; `coeffs` may be shorter than
/// `trunc` (missing terms are zero) and may hold negative integers, which
/// are reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PadicJson", into = "PadicJson")]
pub struct PadicSeries {
    p: u64,
    prec: u32,
    modulus: u64,
    coeffs: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct PadicJson {
    p: u64,
    prec: u32,
    trunc: usize,
    coeffs: Vec<CoeffRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Str(String),
}

impl TryFrom<PadicJson> for PadicSeries {
    type Error = PdynError;
    fn try_from(j: PadicJson) -> Result<Self, Self::Error> {
        let coeffs = j
            .coeffs
            .into_iter()
            .map(|c| match c {
                CoeffRepr::Int(v) => Ok(v as i128),
                CoeffRepr::Str(s) => s
                    .trim()
                    .parse::<i128>()
                    .map_err(|e| PdynError::BadSeries(format!("bad coefficient {s:?}: {e}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        PadicSeries::from_i128(j.p, j.prec, j.trunc, &coeffs)
    }
}

impl From<PadicSeries> for PadicJson {
    fn from(s: PadicSeries) -> Self {
        PadicJson {
            p: s.p,
            prec: s.prec,
            trunc: s.trunc(),
            coeffs: s
                .coeffs
                .iter()
                .map(|&c| {
                    if c < interchange::SAFE_INT_LIMIT {
                        CoeffRepr::Int(c as i64)
                    } else {
                        CoeffRepr::Str(c.to_string())
                    }
                })
                .collect(),
        }
    }
}

// p^prec, kept below 2^63 so sums of two residues never overflow.
fn modulus_for(p: u64, prec: u32) -> Result<u64, PdynError> {
    if !is_prime(p) {
        return Err(PdynError::BadSeries(format!("{p} is not prime")));
    }
    if prec == 0 {
        return Err(PdynError::BadSeries("prec must be at least 1".into()));
    }
    p.checked_pow(prec)
        .filter(|&m| m < 1 << 63)
        .ok_or_else(|| PdynError::BadSeries(format!("p^prec = {p}^{prec} does not fit below 2^63")))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

// Truncated product with lazy reduction: products are accumulated in u128
// and reduced only when another one could overflow.
pub(crate) fn mul_trunc(a: &[u64], b: &[u64], n: usize, m: u64) -> Vec<u64> {
    let sq = (m as u128 - 1) * (m as u128 - 1);
    let batch = if sq == 0 { usize::MAX } else { (u128::MAX / sq).min(usize::MAX as u128) as usize };
    let mut out = vec![0u64; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let lo = k.saturating_sub(b.len().saturating_sub(1));
        let hi = k.min(a.len().saturating_sub(1));
        let mut acc: u128 = 0;
        let mut count = 0;
        for i in lo..=hi {
            if a.is_empty() || b.is_empty() {
                break;
            }
            let (x, y) = (a[i], b[k - i]);
            if x == 0 || y == 0 {
                continue;
            }
            if count == batch {
                acc %= m as u128;
                count = 1;
            }
            acc += x as u128 * y as u128;
            count += 1;
        }
        *slot = (acc % m as u128) as u64;
    }
    out
}

impl PadicSeries {
    pub fn new(p: u64, prec: u32, trunc: usize, coeffs: Vec<u64>) -> Result<Self, PdynError> {
        let modulus = modulus_for(p, prec)?;
        check_trunc(trunc, coeffs.len())?;
        if let Some(c) = coeffs.iter().find(|&&c| c >= modulus) {
            return Err(PdynError::BadSeries(format!("coefficient {c} is not reduced modulo {p}^{prec}")));
        }
        let mut coeffs = coeffs;
        coeffs.resize(trunc, 0);
        Ok(PadicSeries { p, prec, modulus, coeffs })
    }

    pub fn from_i128(p: u64, prec: u32, trunc: usize, coeffs: &[i128]) -> Result<Self, PdynError> {
        let modulus = modulus_for(p, prec)?;
        check_trunc(trunc, coeffs.len())?;
        let mut v: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(modulus as i128) as u64).collect();
        v.resize(trunc, 0);
        Ok(PadicSeries {
            p,
            prec,
            modulus,
            coeffs: v,
        })
    }

    pub fn from_ints(p: u64, prec: u32, trunc: usize, coeffs: &[i64]) -> Result<Self, PdynError> {
        let wide: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
        Self::from_i128(p, prec, trunc, &wide)
    }

    /// `(1 + X)^k - 1`.
    pub fn binomial_minus_one(p: u64, prec: u32, trunc: usize, k: u64) -> Result<Self, PdynError> {
        let modulus = modulus_for(p, prec)?;
        check_trunc(trunc, 0)?;
        let base = Self::new(p, prec, trunc, vec![1, 1])?;
        let mut acc = Self::new(p, prec, trunc, vec![1])?;
        let mut sq = base;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        acc.coeffs[0] = (acc.coeffs[0] + modulus - 1) % modulus;
        Ok(acc)
    }

    pub fn x(p: u64, prec: u32, trunc: usize) -> Result<Self, PdynError> {
        Self::new(p, prec, trunc, vec![0, 1])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `p^prec`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// `v_p` of coefficient `i`, or `None` when it is `0 mod p^prec`
    /// (valuation at least `prec`).
    pub fn coeff_valuation(&self, i: usize) -> Option<u32> {
        let mut c = self.coeffs[i];
        if c == 0 {
            return None;
        }
        let mut v = 0;
        while c % self.p == 0 {
            c /= self.p;
            v += 1;
        }
        Some(v)
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(trunc.max(1));
        s
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PdynError> {
        if self.p != other.p || self.prec != other.prec {
            return Err(PdynError::BadSeries("operands have different p or precision".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PdynError> {
        self.check_compatible(other)?;
        let n = self.trunc().min(other.trunc());
        let m = self.modulus;
        let coeffs = (0..n).map(|i| (self.coeffs[i] + other.coeffs[i]) % m).collect();
        Ok(Self { coeffs, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PdynError> {
        self.check_compatible(other)?;
        let n = self.trunc().min(other.trunc());
        let m = self.modulus;
        let coeffs = (0..n).map(|i| (self.coeffs[i] + m - other.coeffs[i]) % m).collect();
        Ok(Self { coeffs, ..self.clone() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PdynError> {
        self.check_compatible(other)?;
        let n = self.trunc().min(other.trunc());
        Ok(Self {
            coeffs: mul_trunc(&self.coeffs, &other.coeffs, n, self.modulus),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        let coeffs = self.coeffs.iter().map(|&x| mulmod(x, c % m, m)).collect();
        Self { coeffs, ..self.clone() }
    }

    /// `self(inner(X))` by Horner's rule; at step `i` only `trunc - i`
    /// terms of the accumulator can still matter.
    pub fn compose(&self, inner: &Self) -> Result<Self, PdynError> {
        self.check_compatible(inner)?;
        if inner.coeffs[0] != 0 {
            return Err(PdynError::NonzeroConstantTerm);
        }
        let n = self.trunc().min(inner.trunc());
        let m = self.modulus;
        let mut acc: Vec<u64> = vec![self.coeffs[n - 1]];
        for i in (0..n - 1).rev() {
            let len = n - i;
            let mut next = vec![0u64; len];
            // inner * acc, shifted: inner has no constant term
            let prod = mul_trunc(&inner.coeffs[..len], &acc, len, m);
            next[..len].copy_from_slice(&prod);
            next[0] = (next[0] + self.coeffs[i]) % m;
            acc = next;
        }
        Ok(Self { coeffs: acc, ..self.clone() })
    }

    /// `k`-fold composite by binary powering; `k = 0` gives `X`.
    pub fn iterate(&self, mut k: u64) -> Result<Self, PdynError> {
        if self.coeffs[0] != 0 {
            return Err(PdynError::NonzeroConstantTerm);
        }
        let mut acc = Self::x(self.p, self.prec, self.trunc().max(2))?.truncate(self.trunc());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// Divides by `X^k`, which must divide exactly modulo `p^prec`.
    pub fn shift_down(&self, k: usize) -> Result<Self, PdynError> {
        if k >= self.trunc() {
            return Err(PdynError::Precision(format!("no terms left after dividing by X^{k}")));
        }
        if self.coeffs[..k].iter().any(|&c| c != 0) {
            return Err(PdynError::Inexact(format!("series is not divisible by X^{k}")));
        }
        Ok(Self {
            coeffs: self.coeffs[k..].to_vec(),
            ..self.clone()
        })
    }

    /// Inverse of a series whose constant term is a unit.
    pub fn inverse(&self) -> Result<Self, PdynError> {
        let m = self.modulus;
        let c0 = self.coeffs[0];
        if c0 % self.p == 0 {
            return Err(PdynError::BadSeries("constant term is not a unit".into()));
        }
        let inv0 = inv_mod(c0, m);
        let n = self.trunc();
        let mut out = vec![0u64; n];
        out[0] = inv0;
        for k in 1..n {
            let mut acc: u128 = 0;
            for i in 1..=k {
                acc = (acc + self.coeffs[i] as u128 * out[k - i] as u128) % m as u128;
            }
            let s = (m - acc as u64) % m;
            out[k] = mulmod(s, inv0, m);
        }
        Ok(Self { coeffs: out, ..self.clone() })
    }

    pub fn is_x(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| c == if i == 1 { 1 % self.modulus } else { 0 })
    }
}

fn check_trunc(trunc: usize, len: usize) -> Result<(), PdynError> {
    if trunc == 0 {
        return Err(PdynError::BadSeries("trunc must be at least 1".into()));
    }
    if len > trunc {
        return Err(PdynError::BadSeries(format!("{len} coefficients exceed trunc = {trunc}")));
    }
    Ok(())
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(m as i128) as u64
}

/// Coefficientwise reduction modulo `p`.
pub fn reduce_mod_p(u: &PadicSeries) -> TruncSeries {
    let k = FiniteField::prime(u.p).expect("p was checked prime");
    let ints: Vec<i64> = u.coeffs.iter().map(|&c| (c % u.p) as i64).collect();
    TruncSeries::from_ints(&k, u.trunc(), &ints)
}

/// `outer ∘ inner`.
pub fn pad_compose(outer: &PadicSeries, inner: &PadicSeries) -> Result<PadicSeries, PdynError> {
    outer.compose(inner)
}

pub fn pad_iterate(u: &PadicSeries, k: u64) -> Result<PadicSeries, PdynError> {
    u.iterate(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nottingham::p_iterate;

    fn cyc(p: u64, prec: u32, trunc: usize) -> PadicSeries {
        PadicSeries::binomial_minus_one(p, prec, trunc, p + 1).unwrap()
    }

    #[test]
    fn binomial_coefficients() {
        let u = cyc(5, 5, 8);
        assert_eq!(u.coeffs(), &[0, 6, 15, 20, 15, 6, 1, 0]);
    }

    #[test]
    fn negative_coefficients_reduce() {
        let f = PadicSeries::from_ints(5, 2, 3, &[-5, 0, 1]).unwrap();
        assert_eq!(f.coeffs(), &[20, 0, 1]);
        assert!(PadicSeries::new(5, 2, 2, vec![25]).is_err());
        assert!(PadicSeries::new(4, 2, 2, vec![1]).is_err());
        assert!(PadicSeries::new(5, 40, 2, vec![1]).is_err());
    }

    #[test]
    fn iterate_examples() {
        let u = cyc(5, 5, 30);
        assert_eq!(u.iterate(1).unwrap(), u);
        let u5 = u.iterate(5).unwrap();
        assert_eq!(u5.coeff(1), 7776 % 3125);
        assert!(u.iterate(0).unwrap().is_x());
    }

    #[test]
    fn compose_matches_naive() {
        let a = PadicSeries::from_ints(7, 3, 6, &[0, 2, 5, -1, 3, 1]).unwrap();
        let b = PadicSeries::from_ints(7, 3, 6, &[0, 1, 7, 0, 2]).unwrap();
        // naive: Σ a_i b^i
        let mut acc = PadicSeries::from_ints(7, 3, 6, &[]).unwrap();
        let mut pw = PadicSeries::from_ints(7, 3, 6, &[1]).unwrap();
        for i in 0..6 {
            acc = acc.add(&pw.scale(a.coeff(i))).unwrap();
            pw = pw.mul(&b).unwrap();
        }
        assert_eq!(a.compose(&b).unwrap(), acc);
    }

    #[test]
    fn reduction_examples() {
        let u = cyc(5, 4, 7);
        let k = FiniteField::prime(5).unwrap();
        assert_eq!(reduce_mod_p(&u), TruncSeries::from_terms(&k, 7, &[(1, 1), (5, 1), (6, 1)]));
        let v = PadicSeries::from_ints(5, 3, 4, &[0, 1, 5]).unwrap();
        assert_eq!(reduce_mod_p(&v), TruncSeries::x(&k, 4));
    }

    #[test]
    fn reduction_commutes_with_iteration() {
        let u = cyc(5, 4, 40);
        let lhs = reduce_mod_p(&u.iterate(5).unwrap());
        let rhs = p_iterate(&reduce_mod_p(&u), 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_series() {
        let f = PadicSeries::from_ints(5, 4, 6, &[3, 1, 0, 7]).unwrap();
        let g = f.inverse().unwrap();
        let one = f.mul(&g).unwrap();
        assert_eq!(one.coeffs(), &[1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn lazy_reduction_with_large_modulus() {
        let m = 3u64.pow(39);
        let a = vec![m - 1; 8];
        let got = mul_trunc(&a, &a, 8, m);
        for (k, &g) in got.iter().enumerate() {
            // (m-1)^2 ≡ 1, so coefficient k is k+1
            assert_eq!(g, (k as u64 + 1) % m);
        }
    }

    #[test]
    fn json_roundtrip() {
        let doc = r#"{"p":5,"prec":3,"trunc":4,"coeffs":[0,6,15,-1]}"#;
        let u: PadicSeries = serde_json::from_str(doc).unwrap();
        assert_eq!(u.coeffs(), &[0, 6, 15, 124]);
        let text = serde_json::to_string(&u).unwrap();
        assert_eq!(text, r#"{"p":5,"prec":3,"trunc":4,"coeffs":[0,6,15,124]}"#);
        assert_eq!(serde_json::from_str::<PadicSeries>(&text).unwrap(), u);
    }
}
