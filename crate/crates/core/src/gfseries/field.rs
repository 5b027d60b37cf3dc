use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::poly;
use super::SeriesError;

/// Largest prime accepted: products of two residues must fit in `u64`.
pub const MAX_PRIME: u64 = u32::MAX as u64;

/// The finite field `F_{p^w}`, presented as `F_p[t]/(modulus)`.
///
/// Cheap to clone; equality compares `p` and the modulus.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldData>);

struct FieldData {
    p: u64,
    w: usize,
    // monic, low to high, length w + 1; `[0, 1]` for the prime field
    modulus: Vec<u64>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// X^{p^k} mod m, by k successive p-th powers.
fn frobenius_power_of_x(k: usize, m: &[u64], p: u64) -> Vec<u64> {
    let mut y = poly::rem(&[0, 1], m, p);
    for _ in 0..k {
        y = poly::powmod(&y, p, m, p);
    }
    y
}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self, SeriesError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(SeriesError::NotPrime(p));
        }
        Ok(Self(Arc::new(FieldData {
            p,
            w: 1,
            modulus: vec![0, 1],
        })))
    }

    /// `F_p[t]/(modulus)`. `modulus` lists coefficients from the constant
    /// term up; it must be monic and irreducible of degree `w >= 1`.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Self, SeriesError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(SeriesError::NotPrime(p));
        }
        let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        poly::trim(&mut m);
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(SeriesError::BadModulus("modulus must be monic of degree >= 1".into()));
        }
        let w = m.len() - 1;
        if w == 1 {
            // any monic linear modulus gives the prime field
            return Self::prime(p);
        }
        // Rabin: X^{p^w} = X mod m, and gcd(X^{p^{w/r}} - X, m) = 1 for primes r | w
        let x = vec![0, 1];
        if poly::sub(&frobenius_power_of_x(w, &m, p), &x, p) != Vec::<u64>::new() {
            return Err(SeriesError::BadModulus("modulus is not irreducible".into()));
        }
        for r in prime_divisors(w) {
            let h = poly::sub(&frobenius_power_of_x(w / r, &m, p), &x, p);
            if poly::gcd(&h, &m, p).len() != 1 {
                return Err(SeriesError::BadModulus("modulus is not irreducible".into()));
            }
        }
        Ok(Self(Arc::new(FieldData { p, w, modulus: m })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Degree over the prime field.
    pub fn w(&self) -> usize {
        self.0.w
    }

    /// The defining modulus, constant term first, or `None` for a prime field.
    pub fn modulus(&self) -> Option<&[u64]> {
        (self.0.w > 1).then_some(&self.0.modulus[..])
    }

    pub fn zero(&self) -> FFElem {
        FFElem {
            field: self.clone(),
            rep: vec![0; self.w()],
        }
    }

    pub fn one(&self) -> FFElem {
        self.from_int(1)
    }

    /// Image of an integer under `Z -> F_p -> F_{p^w}`.
    pub fn from_int(&self, c: i64) -> FFElem {
        let mut rep = vec![0; self.w()];
        rep[0] = c.rem_euclid(self.p() as i64) as u64;
        FFElem {
            field: self.clone(),
            rep,
        }
    }

    /// Element with the given coordinates in the basis `1, t, ..., t^{w-1}`.
    pub fn elem(&self, coords: &[i64]) -> Result<FFElem, SeriesError> {
        if coords.len() > self.w() {
            return Err(SeriesError::BadCoefficient(format!(
                "expected at most {} coordinates, got {}",
                self.w(),
                coords.len()
            )));
        }
        let mut rep = vec![0; self.w()];
        for (r, &c) in rep.iter_mut().zip(coords) {
            *r = c.rem_euclid(self.p() as i64) as u64;
        }
        Ok(FFElem {
            field: self.clone(),
            rep,
        })
    }

    // ---- raw kernels on length-w coordinate slices ----

    pub(crate) fn raw_add(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let p = self.p();
        for i in 0..self.w() {
            let s = a[i] + b[i];
            out[i] = if s >= p { s - p } else { s };
        }
    }

    pub(crate) fn raw_sub(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let p = self.p();
        for i in 0..self.w() {
            out[i] = if a[i] >= b[i] { a[i] - b[i] } else { a[i] + p - b[i] };
        }
    }

    /// Reduces an unreduced product (length `2w - 1`, entries < 2^127) into `out`.
    pub(crate) fn raw_reduce_wide(&self, acc: &[u128], out: &mut [u64]) {
        let p = self.p();
        let w = self.w();
        if w == 1 {
            out[0] = (acc[0] % p as u128) as u64;
            return;
        }
        let mut t: Vec<u64> = acc.iter().map(|&c| (c % p as u128) as u64).collect();
        let m = &self.0.modulus;
        for k in (w..t.len()).rev() {
            let c = t[k];
            if c == 0 {
                continue;
            }
            t[k] = 0;
            // t^k = t^{k-w} * t^w and t^w = -(m_0 + ... + m_{w-1} t^{w-1})
            for j in 0..w {
                if m[j] != 0 {
                    let sub = poly::mul_mod_p(c, m[j], p);
                    let idx = k - w + j;
                    t[idx] = (t[idx] + p - sub) % p;
                }
            }
        }
        out.copy_from_slice(&t[..w]);
    }

    pub(crate) fn raw_mul(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let w = self.w();
        if w == 1 {
            out[0] = poly::mul_mod_p(a[0], b[0], self.p());
            return;
        }
        let mut acc = vec![0u128; 2 * w - 1];
        for i in 0..w {
            if a[i] == 0 {
                continue;
            }
            for j in 0..w {
                acc[i + j] += a[i] as u128 * b[j] as u128;
            }
        }
        self.raw_reduce_wide(&acc, out);
    }

    pub(crate) fn raw_pow(&self, a: &[u64], mut exp: u64) -> Vec<u64> {
        let w = self.w();
        let mut acc = vec![0; w];
        acc[0] = 1;
        let mut base = a.to_vec();
        let mut tmp = vec![0; w];
        while exp > 0 {
            if exp & 1 == 1 {
                self.raw_mul(&acc, &base, &mut tmp);
                acc.copy_from_slice(&tmp);
            }
            self.raw_mul(&base, &base, &mut tmp);
            base.copy_from_slice(&tmp);
            exp >>= 1;
        }
        acc
    }

    pub(crate) fn raw_inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        let p = self.p();
        if self.w() == 1 {
            return poly::inv_mod_p(a[0], p).map(|x| vec![x]);
        }
        let mut v = a.to_vec();
        poly::trim(&mut v);
        if v.is_empty() {
            return None;
        }
        let mut inv = poly::inv_mod(&v, &self.0.modulus, p)?;
        inv.resize(self.w(), 0);
        Some(inv)
    }

    /// `x -> x^{p^j}`, with `j` taken modulo `w`.
    pub(crate) fn raw_frobenius(&self, a: &[u64], j: i64) -> Vec<u64> {
        let k = j.rem_euclid(self.w() as i64) as usize;
        let mut out = a.to_vec();
        for _ in 0..k {
            out = self.raw_pow(&out, self.p());
        }
        out
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.w() == 1 {
            write!(f, "F_{}", self.p())
        } else {
            write!(f, "F_{}^{}[{:?}]", self.p(), self.w(), self.0.modulus)
        }
    }
}

/// An element of a [`FiniteField`].
///
/// Arithmetic operators panic when the operands live in different fields.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElem {
    pub(crate) field: FiniteField,
    pub(crate) rep: Vec<u64>,
}

impl FFElem {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// Coordinates in the basis `1, t, ..., t^{w-1}`, each in `[0, p)`.
    pub fn coords(&self) -> &[u64] {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.rep[0] == 1 && self.rep[1..].iter().all(|&c| c == 0)
    }

    pub fn inv(&self) -> Option<FFElem> {
        self.field.raw_inv(&self.rep).map(|rep| FFElem {
            field: self.field.clone(),
            rep,
        })
    }

    pub fn pow(&self, exp: u64) -> FFElem {
        FFElem {
            field: self.field.clone(),
            rep: self.field.raw_pow(&self.rep, exp),
        }
    }

    /// The `j`-th power of the absolute Frobenius `x -> x^p`.
    pub fn frobenius(&self, j: i64) -> FFElem {
        FFElem {
            field: self.field.clone(),
            rep: self.field.raw_frobenius(&self.rep, j),
        }
    }
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rep.len() == 1 {
            write!(f, "{}", self.rep[0])
        } else {
            write!(f, "{:?}", self.rep)
        }
    }
}

fn check_same(a: &FFElem, b: &FFElem) {
    assert!(a.field == b.field, "field mismatch: {:?} vs {:?}", a.field, b.field);
}

impl Add for &FFElem {
    type Output = FFElem;
    fn add(self, rhs: &FFElem) -> FFElem {
        check_same(self, rhs);
        let mut rep = vec![0; self.rep.len()];
        self.field.raw_add(&self.rep, &rhs.rep, &mut rep);
        FFElem {
            field: self.field.clone(),
            rep,
        }
    }
}

impl Sub for &FFElem {
    type Output = FFElem;
    fn sub(self, rhs: &FFElem) -> FFElem {
        check_same(self, rhs);
        let mut rep = vec![0; self.rep.len()];
        self.field.raw_sub(&self.rep, &rhs.rep, &mut rep);
        FFElem {
            field: self.field.clone(),
            rep,
        }
    }
}

impl Mul for &FFElem {
    type Output = FFElem;
    fn mul(self, rhs: &FFElem) -> FFElem {
        check_same(self, rhs);
        let mut rep = vec![0; self.rep.len()];
        self.field.raw_mul(&self.rep, &rhs.rep, &mut rep);
        FFElem {
            field: self.field.clone(),
            rep,
        }
    }
}

impl Neg for &FFElem {
    type Output = FFElem;
    fn neg(self) -> FFElem {
        &self.field.zero() - self
    }
}
