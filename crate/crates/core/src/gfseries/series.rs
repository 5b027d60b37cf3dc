use std::fmt;

use super::field::{FFElem, FiniteField};
use super::SeriesError;

/// A power series over `F_{p^w}` known modulo `X^trunc`.
///
/// Coefficients are stored flat: coefficient `i` occupies
/// `coeffs[i*w .. (i+1)*w]`. Binary operations return the smaller of the
/// two truncations and never extend precision.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    field: FiniteField,
    trunc: usize,
    coeffs: Vec<u64>,
}

impl TruncSeries {
    pub fn zero(field: &FiniteField, trunc: usize) -> Self {
        assert!(trunc >= 1, "truncation must be at least 1");
        Self {
            field: field.clone(),
            trunc,
            coeffs: vec![0; trunc * field.w()],
        }
    }

    pub fn one(field: &FiniteField, trunc: usize) -> Self {
        Self::monomial(field, trunc, 0)
    }

    /// The identity for substitution, `X`.
    pub fn x(field: &FiniteField, trunc: usize) -> Self {
        Self::monomial(field, trunc, 1)
    }

    pub fn monomial(field: &FiniteField, trunc: usize, k: usize) -> Self {
        let mut s = Self::zero(field, trunc);
        if k < trunc {
            s.coeffs[k * field.w()] = 1;
        }
        s
    }

    /// Builds a series from field elements; missing coefficients are zero and
    /// coefficients at or beyond `trunc` are dropped.
    pub fn from_coeffs(field: &FiniteField, trunc: usize, coeffs: &[FFElem]) -> Result<Self, SeriesError> {
        let mut s = Self::zero(field, trunc);
        let w = field.w();
        for (i, c) in coeffs.iter().enumerate().take(trunc) {
            if c.field() != field {
                return Err(SeriesError::FieldMismatch);
            }
            s.coeffs[i * w..(i + 1) * w].copy_from_slice(c.coords());
        }
        Ok(s)
    }

    /// Coefficients given as integers, embedded through `F_p`.
    pub fn from_ints(field: &FiniteField, trunc: usize, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(field, trunc);
        let w = field.w();
        let p = field.p() as i64;
        for (i, &c) in coeffs.iter().enumerate().take(trunc) {
            s.coeffs[i * w] = c.rem_euclid(p) as u64;
        }
        s
    }

    /// Sparse constructor: `(degree, integer coefficient)` pairs.
    pub fn from_terms(field: &FiniteField, trunc: usize, terms: &[(usize, i64)]) -> Self {
        let mut s = Self::zero(field, trunc);
        let w = field.w();
        let p = field.p() as i64;
        for &(k, c) in terms {
            if k < trunc {
                let cur = s.coeffs[k * w] as i64;
                s.coeffs[k * w] = (cur + c).rem_euclid(p) as u64;
            }
        }
        s
    }

    pub(crate) fn from_raw(field: &FiniteField, trunc: usize, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(coeffs.len(), trunc * field.w());
        Self {
            field: field.clone(),
            trunc,
            coeffs,
        }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub(crate) fn raw_coeff(&self, i: usize) -> &[u64] {
        let w = self.field.w();
        &self.coeffs[i * w..(i + 1) * w]
    }

    /// Coefficient of `X^i`.
    ///
    /// # Panics
    /// If `i >= trunc`.
    pub fn coeff(&self, i: usize) -> FFElem {
        assert!(i < self.trunc, "coefficient {i} beyond truncation {}", self.trunc);
        FFElem {
            field: self.field.clone(),
            rep: self.raw_coeff(i).to_vec(),
        }
    }

    pub fn coeff_is_zero(&self, i: usize) -> bool {
        self.raw_coeff(i).iter().all(|&c| c == 0)
    }

    pub fn coeffs(&self) -> Vec<FFElem> {
        (0..self.trunc).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Index of the first nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<usize> {
        (0..self.trunc).find(|&i| !self.coeff_is_zero(i))
    }

    /// The same series known to fewer terms.
    pub fn truncate(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc);
        assert!(t >= 1, "truncation must be at least 1");
        Self {
            field: self.field.clone(),
            trunc: t,
            coeffs: self.coeffs[..t * self.field.w()].to_vec(),
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), SeriesError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(SeriesError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_field(other)?;
        let n = self.trunc.min(other.trunc);
        let w = self.field.w();
        let mut out = vec![0; n * w];
        for i in 0..n {
            self.field
                .raw_add(self.raw_coeff(i), other.raw_coeff(i), &mut out[i * w..(i + 1) * w]);
        }
        Ok(Self::from_raw(&self.field, n, out))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_field(other)?;
        let n = self.trunc.min(other.trunc);
        let w = self.field.w();
        let mut out = vec![0; n * w];
        for i in 0..n {
            self.field
                .raw_sub(self.raw_coeff(i), other.raw_coeff(i), &mut out[i * w..(i + 1) * w]);
        }
        Ok(Self::from_raw(&self.field, n, out))
    }

    pub fn neg(&self) -> Self {
        Self::zero(&self.field, self.trunc).sub(self).expect("same field")
    }

    pub fn scale(&self, c: &FFElem) -> Result<Self, SeriesError> {
        if c.field() != &self.field {
            return Err(SeriesError::FieldMismatch);
        }
        let w = self.field.w();
        let mut out = vec![0; self.coeffs.len()];
        for i in 0..self.trunc {
            self.field
                .raw_mul(self.raw_coeff(i), c.coords(), &mut out[i * w..(i + 1) * w]);
        }
        Ok(Self::from_raw(&self.field, self.trunc, out))
    }

    /// Cauchy product truncated at the smaller truncation.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_field(other)?;
        let n = self.trunc.min(other.trunc);
        Ok(Self::from_raw(&self.field, n, mul_raw(&self.field, &self.coeffs, &other.coeffs, n)))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(&self.field, self.trunc);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        acc
    }

    /// `self(inner(X))` by Horner evaluation, truncated at the smaller
    /// truncation.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_field(inner)?;
        if !inner.coeff_is_zero(0) {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let n = self.trunc.min(inner.trunc);
        Ok(Self::from_raw(&self.field, n, compose_raw(&self.field, &self.coeffs, &inner.coeffs, n)))
    }

    /// The inverse for substitution: `h` with `g(h(X)) = h(g(X)) = X`.
    ///
    /// Solved degree by degree from `sum_j h_j g(X)^j = X`; the powers of `g`
    /// are precomputed once, so the cost is that of `N` truncated products.
    pub fn comp_inverse(&self) -> Result<Self, SeriesError> {
        let n = self.trunc;
        let w = self.field.w();
        if !self.coeff_is_zero(0) || n < 2 || self.coeff_is_zero(1) {
            return Err(SeriesError::NotSubstitutionUnit);
        }
        let k = &self.field;
        let c1 = self.coeff(1);
        let c1_inv = c1.inv().expect("nonzero");
        // powers[j] = g^j mod X^n, j = 1..n-1
        let mut powers: Vec<Vec<u64>> = Vec::with_capacity(n);
        powers.push(Vec::new());
        powers.push(self.coeffs.clone());
        for j in 2..n {
            let next = mul_raw(k, &powers[j - 1], &self.coeffs, n);
            powers.push(next);
        }
        let mut h = vec![0u64; n * w];
        let mut acc = vec![0u64; w];
        let mut tmp = vec![0u64; w];
        let mut c1_pow_inv = c1_inv.coords().to_vec();
        for deg in 1..n {
            // coefficient of X^deg in sum_{j<deg} h_j g^j
            acc.iter_mut().for_each(|a| *a = 0);
            for (j, pw) in powers.iter().enumerate().take(deg).skip(1) {
                let hj = &h[j * w..(j + 1) * w];
                if hj.iter().all(|&c| c == 0) {
                    continue;
                }
                k.raw_mul(hj, &pw[deg * w..(deg + 1) * w], &mut tmp);
                let prev = acc.clone();
                k.raw_add(&prev, &tmp, &mut acc);
            }
            let mut target = vec![0u64; w];
            if deg == 1 {
                target[0] = 1;
            }
            let mut rhs = vec![0u64; w];
            k.raw_sub(&target, &acc, &mut rhs);
            // (g^deg)_deg = c1^deg
            k.raw_mul(&rhs, &c1_pow_inv, &mut h[deg * w..(deg + 1) * w]);
            let prev = c1_pow_inv.clone();
            k.raw_mul(&prev, c1_inv.coords(), &mut c1_pow_inv);
        }
        Ok(Self::from_raw(k, n, h))
    }

    /// Applies `x -> x^{p^j}` to every coefficient; negative `j` uses the
    /// inverse automorphism.
    pub fn frobenius_twist(&self, j: i64) -> Self {
        let w = self.field.w();
        if w == 1 || j.rem_euclid(w as i64) == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.trunc {
            out.extend(self.field.raw_frobenius(self.raw_coeff(i), j));
        }
        Self::from_raw(&self.field, self.trunc, out)
    }

    /// Divides by `X^k`; the result is known to `trunc - k` terms.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if k >= self.trunc {
            return Err(SeriesError::PrecisionExhausted);
        }
        if (0..k).any(|i| !self.coeff_is_zero(i)) {
            return Err(SeriesError::NotDivisible);
        }
        let w = self.field.w();
        Ok(Self::from_raw(&self.field, self.trunc - k, self.coeffs[k * w..].to_vec()))
    }

    /// Multiplies by `X^k`, keeping the truncation.
    pub fn shift_up(&self, k: usize) -> Self {
        let w = self.field.w();
        let mut out = vec![0; self.coeffs.len()];
        if k < self.trunc {
            out[k * w..].copy_from_slice(&self.coeffs[..(self.trunc - k) * w]);
        }
        Self::from_raw(&self.field, self.trunc, out)
    }
}

/// Truncated product of two flat coefficient arrays, `n` output terms.
pub(crate) fn mul_raw(k: &FiniteField, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let w = k.w();
    let la = (a.len() / w).min(n);
    let lb = (b.len() / w).min(n);
    let mut out = vec![0u64; n * w];
    if w == 1 {
        let p = k.p() as u128;
        let nz_a: Vec<(usize, u64)> = a[..la].iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        let nz_b: Vec<(usize, u64)> = b[..lb].iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        let mut acc = vec![0u128; n];
        for &(i, x) in &nz_a {
            for &(j, y) in &nz_b {
                if i + j >= n {
                    break;
                }
                acc[i + j] += x as u128 * y as u128;
            }
        }
        for (o, c) in out.iter_mut().zip(acc) {
            *o = (c % p) as u64;
        }
        return out;
    }
    let mut wide = vec![0u128; n * (2 * w - 1)];
    for i in 0..la {
        let ai = &a[i * w..(i + 1) * w];
        if ai.iter().all(|&c| c == 0) {
            continue;
        }
        for j in 0..lb.min(n - i) {
            let bj = &b[j * w..(j + 1) * w];
            let slot = &mut wide[(i + j) * (2 * w - 1)..(i + j + 1) * (2 * w - 1)];
            for (s, &x) in ai.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (t, &y) in bj.iter().enumerate() {
                    slot[s + t] += x as u128 * y as u128;
                }
            }
        }
    }
    for m in 0..n {
        k.raw_reduce_wide(&wide[m * (2 * w - 1)..(m + 1) * (2 * w - 1)], &mut out[m * w..(m + 1) * w]);
    }
    out
}

/// Horner evaluation of `outer(inner)` modulo `X^n`; `inner` has zero
/// constant term. After consuming `a_i` the partial value is later multiplied
/// by `inner^i`, so it only needs `n - i` terms.
pub(crate) fn compose_raw(k: &FiniteField, outer: &[u64], inner: &[u64], n: usize) -> Vec<u64> {
    let w = k.w();
    let lo = (outer.len() / w).min(n);
    let top = (0..lo).rev().find(|&i| outer[i * w..(i + 1) * w].iter().any(|&c| c != 0));
    let mut out = vec![0u64; n * w];
    let Some(top) = top else {
        return out;
    };
    let mut acc: Vec<u64> = outer[top * w..(top + 1) * w].to_vec();
    for i in (0..top).rev() {
        let len = n - i;
        let mut next = mul_raw(k, &acc, inner, len);
        let ai = &outer[i * w..(i + 1) * w];
        let c0 = next[..w].to_vec();
        k.raw_add(&c0, ai, &mut next[..w]);
        acc = next;
    }
    out[..acc.len()].copy_from_slice(&acc);
    out
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..self.trunc {
            if self.coeff_is_zero(i) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = self.coeff(i);
            let one = c.is_one();
            match (i, one) {
                (0, _) => write!(f, "{c:?}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{c:?}*X")?,
                (_, true) => write!(f, "X^{i}")?,
                (_, false) => write!(f, "{c:?}*X^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(X^{})", self.trunc)
    }
}
