#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use ramforge::gfseries::{FiniteField, TruncSeries};
use ramforge::herbrand::BreakData;
use ramforge::pdyn::PadicSeries;
use ramforge::truncation::{TruncMorphism, TruncObject};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn qi(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

pub fn qpow(p: u64, k: usize) -> Q {
    qi(BigInt::from(p).pow(k as u32))
}

/// Random admissible break data: `b_0` in `[1, pe/(p-1)]`, then steps of at
/// least a factor `p` while below `e/(p-1)`, then steps of exactly `e`.
/// With `rational` the breaks below `e/(p-1)` may have denominators 2 or 3.
pub fn random_breaks(rng: &mut StdRng, p: u64, e: u64, n_max: usize, rational: bool) -> BreakData {
    let pq = qi(p);
    let eq = qi(e);
    let tb = &eq / qi(p - 1);
    let top = &tb * &pq;
    let pick = |rng: &mut StdRng, lo: &Q, hi: &Q| -> Option<Q> {
        let den: i64 = if rational { rng.gen_range(1..=3) } else { 1 };
        let d = qi(den);
        let lo_n = (lo * &d).ceil().to_integer();
        let hi_n = (hi * &d).floor().to_integer();
        if lo_n > hi_n {
            return None;
        }
        let span: i64 = (&hi_n - &lo_n).try_into().unwrap_or(i64::MAX / 2);
        let k = rng.gen_range(0..=span.min(1 << 40));
        Some(Q::new(lo_n + k, den.into()))
    };
    let n = rng.gen_range(1..=n_max);
    let mut upper = vec![pick(rng, &Q::one(), &top).expect("[1, top] holds an integer")];
    while upper.len() < n {
        let b = upper.last().unwrap().clone();
        let next = if b >= tb {
            &b + &eq
        } else {
            match pick(rng, &(&b * &pq), &top) {
                Some(v) => v,
                None => break,
            }
        };
        upper.push(next);
    }
    BreakData::new(p, eq, upper).unwrap()
}

/// `ψ(x)` by integrating the slope `p^j` over `[b_{j-1}, b_j]`.
pub fn oracle_psi(bd: &BreakData, x: &Q) -> Q {
    let mut total = Q::zero();
    let mut left = Q::zero();
    for (j, b) in bd.upper.iter().chain(std::iter::once(&(x.clone() + Q::one()))).enumerate() {
        let right = if b < x { b.clone() } else { x.clone() };
        if right > left {
            total += qpow(bd.p, j) * (&right - &left);
            left = right;
        }
        if b >= x {
            break;
        }
    }
    total
}

/// `φ(y)` by integrating `p^{-j}` between the lower breaks `ψ(b_j)`.
pub fn oracle_phi(bd: &BreakData, y: &Q) -> Q {
    let lower: Vec<Q> = bd.upper.iter().map(|b| oracle_psi(bd, b)).collect();
    oracle_phi_with(bd.p, &lower, y)
}

/// `φ(y)` given the lower breaks.
pub fn oracle_phi_with(p: u64, lower: &[Q], y: &Q) -> Q {
    let mut total = Q::zero();
    let mut left = Q::zero();
    for (j, b) in lower.iter().chain(std::iter::once(&(y.clone() + Q::one()))).enumerate() {
        let right = if b < y { b.clone() } else { y.clone() };
        if right > left {
            total += (&right - &left) / qpow(p, j);
            left = right;
        }
        if b >= y {
            break;
        }
    }
    total
}

pub fn random_rational(rng: &mut StdRng, hi: i64) -> Q {
    let den = rng.gen_range(1..=12);
    q(rng.gen_range(0..=hi * den), den)
}

/// `X + c X^{i+1} + ...` over `F_p` with `c != 0`, so its depth is `i`.
pub fn random_nottingham(rng: &mut StdRng, field: &FiniteField, trunc: usize, depth: usize) -> TruncSeries {
    let p = field.p() as i64;
    let mut terms = vec![(1, 1), (depth + 1, rng.gen_range(1..p))];
    for k in depth + 2..trunc {
        if rng.gen_bool(0.3) {
            terms.push((k, rng.gen_range(0..p)));
        }
    }
    TruncSeries::from_terms(field, trunc, &terms)
}

pub fn random_unit(rng: &mut StdRng, field: &FiniteField, trunc: usize) -> TruncSeries {
    let p = field.p() as i64;
    let w = field.w();
    let mut coeffs = Vec::new();
    for i in 0..trunc {
        loop {
            let coords: Vec<i64> = (0..w).map(|_| rng.gen_range(0..p)).collect();
            let c = field.elem(&coords).unwrap();
            if i > 0 || !c.is_zero() {
                coeffs.push(c);
                break;
            }
        }
    }
    TruncSeries::from_coeffs(field, trunc, &coeffs).unwrap()
}

/// A random valid morphism `src -> dst` (choosing `r` large enough).
pub fn random_morphism(rng: &mut StdRng, src: &TruncObject, dst: &TruncObject) -> TruncMorphism {
    let min_r = dst.e.div_ceil(src.e) as u64;
    let r = rng.gen_range(min_r.max(1)..=min_r.max(1) + 2);
    let twist = rng.gen_range(0..src.field.w() as i64);
    let eta = random_unit(rng, &dst.field, dst.e);
    TruncMorphism::new(src, dst, r, twist, &eta).unwrap()
}

/// `(1+X)^k - 1` over `F_p` by Lucas' theorem, without any composition.
pub fn binomial_series_mod_p(field: &FiniteField, trunc: usize, k: &BigInt) -> TruncSeries {
    let p = field.p();
    let digits = |mut m: BigInt| {
        let mut out = Vec::new();
        let pb = BigInt::from(p);
        while !m.is_zero() {
            let d: u64 = (&m % &pb).try_into().unwrap();
            out.push(d);
            m /= &pb;
        }
        out
    };
    let kd = digits(k.clone());
    let small_binom = |n: u64, r: u64| -> u64 {
        if r > n {
            return 0;
        }
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..r {
            num = num * (n - i) as u128 % p as u128;
            den = den * (i + 1) as u128 % p as u128;
        }
        let inv = mod_pow(den as u64, p - 2, p);
        (num as u64 * inv) % p
    };
    let mut terms = Vec::new();
    for j in 1..trunc {
        let jd = digits(BigInt::from(j));
        let mut c = 1u64;
        for (i, &ji) in jd.iter().enumerate() {
            c = c * small_binom(kd.get(i).copied().unwrap_or(0), ji) % p;
        }
        if c != 0 {
            terms.push((j, c as i64));
        }
    }
    TruncSeries::from_terms(field, trunc, &terms)
}

pub fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// `(1+X)^{1+p} - 1` over `Z_p` to the given precision.
pub fn cyclotomic_u(p: u64, prec: u32, trunc: usize) -> PadicSeries {
    let coeffs: Vec<i128> = (0..=p + 1).map(|k| binom_i128(p + 1, k)).collect();
    let mut c = coeffs;
    c[0] = 0;
    c.truncate(trunc);
    PadicSeries::from_i128(p, prec, trunc, &c).unwrap()
}

fn binom_i128(n: u64, k: u64) -> i128 {
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// `u(0) = 0`, `u'(0)` a random 1-unit, other coefficients random.
pub fn random_dynamical(rng: &mut StdRng, p: u64, prec: u32, trunc: usize) -> PadicSeries {
    let m = (p as i128).pow(prec);
    let mut c = vec![0i128; trunc];
    c[1] = 1 + p as i128 * rng.gen_range(0..m / p as i128);
    for v in c.iter_mut().skip(2) {
        *v = rng.gen_range(0..m);
    }
    PadicSeries::from_i128(p, prec, trunc, &c).unwrap()
}
