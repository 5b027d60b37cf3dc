//! Closed-form quantities and sufficient conditions for two totally ramified
//! `Z/p^n`-extensions of a tame base with congruent Galois actions to share a
//! subextension of degree `p^m`.
//!
//! The conditions are stated for auxiliary fields `E = K(ζ_{p^{m+1}})` and
//! `M = LE` that are never constructed. Each one is reduced to data of
//! `L/K` alone:
//!
//! * `ψ_{M/L}(a) > p^{n+t-m} q` uses a certified lower bound for
//!   `ψ_{M/L}(a)`: the last linear piece of `ψ_{M/L}` written in terms of its
//!   upper breaks `β_i`, with each `β_i` replaced by its upper bound
//!   `ψ_{L/K}((i+1)e)`. The piece is decreasing in every `β_i` and, by
//!   convexity, lies below `ψ_{M/L}` everywhere.
//! * `ψ_{M/L}(a) > ψ_{M/E}(r)` becomes `φ_{L/K}(a) > φ_{E/K}(r)`.
//! * `ψ_{M/L}(a) > ψ_{M/K}(u_{L/K})` becomes `a > ψ_{L/K}(u_{L/K})`.
//!
//! The ramification index of `M/L` is `s p^t` with `t` unknown unless
//! `y ≠ e`, where `t = m`; otherwise every `t` in `0..=m` is checked.
//! Every comparison is strict.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfseries::is_prime;
use crate::herbrand::{self, extract_yhz, psi_from_breaks, validate_breaks, BreakData, HerbrandError, Yhz};
use crate::interchange;

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamcheckError {
    #[error(transparent)]
    Herbrand(#[from] HerbrandError),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("no m >= 0 satisfies ψ((m+1+1/(p-1))e) < e p^n")]
    NoAdmissibleM,
    #[error("m0 = {m0} exceeds the bound n - h - 1 = {bound}")]
    BoundViolated { m0: u32, bound: i64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("integer overflow")]
    Overflow,
}

/// `s = (p-1)/gcd(e, p-1)`, `e0 = e/gcd(e, p-1) = es/(p-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TameParams {
    pub p: u64,
    pub e: u64,
    pub s: u64,
    pub e0: u64,
    /// Residue degree of `K(ζ)/K`; carried along, never used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<u64>,
}

pub fn tame_params(p: u64, e: u64) -> Result<TameParams, RamcheckError> {
    if !is_prime(p) {
        return Err(RamcheckError::BadParams(format!("{p} is not prime")));
    }
    if e == 0 || e % p == 0 {
        return Err(RamcheckError::BadParams(format!("e = {e} must be positive and prime to p = {p}")));
    }
    let g = e.gcd(&(p - 1));
    Ok(TameParams {
        p,
        e,
        s: (p - 1) / g,
        e0: e / g,
        w: None,
    })
}

fn pow_i128(p: u64, k: u32) -> Result<i128, RamcheckError> {
    (p as i128).checked_pow(k).ok_or(RamcheckError::Overflow)
}

fn big_pow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

fn qi(v: impl Into<BigInt>) -> Q {
    Q::from_integer(v.into())
}

/// The shift function: with `t0 = t - e0 p^m`, `0` if `s ∤ t0`,
/// `e0(p^{v+1}-1)` if `v = v_p(t0) < m`, and `e0(p^{m+1}-1)` otherwise
/// (including `t0 = 0`). Periodic in `t` with period `s p^m`.
pub fn f_shift(tp: &TameParams, m: u32, t: i128) -> Result<i128, RamcheckError> {
    let pm = pow_i128(tp.p, m)?;
    let e0 = tp.e0 as i128;
    let t0 = t - e0 * pm;
    if t0 % tp.s as i128 != 0 {
        return Ok(0);
    }
    let p = tp.p as i128;
    let mut v = 0u32;
    let mut x = t0;
    while x != 0 && x % p == 0 && v < m {
        x /= p;
        v += 1;
    }
    let v = if t0 == 0 { m } else { v };
    Ok(e0 * (pow_i128(tp.p, v + 1)? - 1))
}

/// Sum of `f` over `[e0 p^m, (e0+s) p^m)` and the closed form
/// `(m+1) e0 (p^{m+1} - p^m)` it should equal.
pub fn f_shift_period_sum(tp: &TameParams, m: u32) -> Result<(i128, i128), RamcheckError> {
    let pm = pow_i128(tp.p, m)?;
    let (e0, s) = (tp.e0 as i128, tp.s as i128);
    let mut sum = 0i128;
    for t in e0 * pm..(e0 + s) * pm {
        sum += f_shift(tp, m, t)?;
    }
    Ok((sum, (m as i128 + 1) * e0 * (pow_i128(tp.p, m + 1)? - pm)))
}

pub fn f_shift_sum_check(tp: &TameParams, m: u32) -> Result<bool, RamcheckError> {
    let (sum, expected) = f_shift_period_sum(tp, m)?;
    Ok(sum == expected)
}

/// `⌈(n - e0(p^{m+1} + p^m - 1)) / (s p^m)⌉`.
pub fn g_floor(tp: &TameParams, m: u32, n_val: i128) -> Result<i128, RamcheckError> {
    let pm = pow_i128(tp.p, m)?;
    let num = n_val - tp.e0 as i128 * (tp.p as i128 * pm + pm - 1);
    Ok(Integer::div_ceil(&num, &(tp.s as i128 * pm)))
}

/// Inputs of the condition checker: break data of `L/K` (with `n` its
/// length), the congruence length `a` (default `e p^n`), whether `L` lies in
/// a `Z_p`-extension (supplied, not computed), and optionally `m`.
///
/// JSON: `{"p", "e", "upper", "a"?, "contained_in_zp", "m"?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremInputs {
    #[serde(flatten)]
    pub bd: BreakData,
    #[serde(default, with = "interchange::bigint_opt", skip_serializing_if = "Option::is_none")]
    pub a: Option<BigInt>,
    pub contained_in_zp: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

// Validated view of the inputs.
struct Ctx {
    tp: TameParams,
    bd: BreakData,
    n: u32,
    yhz: Yhz,
    psi: herbrand::PLFunc,
    a: BigInt,
}

impl TheoremInputs {
    pub fn new(bd: BreakData, contained_in_zp: bool) -> Self {
        TheoremInputs {
            bd,
            a: None,
            contained_in_zp,
            m: None,
        }
    }

    pub fn n(&self) -> usize {
        self.bd.n()
    }

    /// `e p^n`.
    pub fn default_a(&self) -> BigInt {
        self.bd.e.to_integer() * big_pow(self.bd.p, self.bd.n() as u32)
    }

    fn ctx(&self) -> Result<Ctx, RamcheckError> {
        let bd = &self.bd;
        if bd.p <= 3 {
            return Err(RamcheckError::BadParams(format!("p = {} must exceed 3", bd.p)));
        }
        if !bd.e.is_integer() {
            return Err(RamcheckError::BadParams("e must be an integer".into()));
        }
        if bd.upper.iter().any(|b| !b.is_integer()) {
            return Err(RamcheckError::BadParams("upper breaks of an abelian extension are integers".into()));
        }
        let e = bd.e.to_integer().to_u64().ok_or(RamcheckError::Overflow)?;
        let tp = tame_params(bd.p, e)?;
        if let Some(v) = validate_breaks(bd).violations.into_iter().next() {
            return Err(HerbrandError::Inadmissible(v).into());
        }
        let a = self.a.clone().unwrap_or_else(|| self.default_a());
        if a < BigInt::one() || a > self.default_a() {
            return Err(RamcheckError::BadParams(format!("a = {a} must lie in [1, e p^n]")));
        }
        Ok(Ctx {
            tp,
            bd: bd.clone(),
            n: bd.n() as u32,
            yhz: extract_yhz(bd),
            psi: psi_from_breaks(bd),
            a,
        })
    }
}

// ψ_{L/K}((m + 1 + 1/(p-1)) e)
fn psi_m_point(psi: &herbrand::PLFunc, bd: &BreakData, m: u32) -> Q {
    let x = (qi(m + 1) + Q::new(1.into(), (bd.p - 1).into())) * &bd.e;
    psi.eval(&x)
}

fn m0_ctx(c: &Ctx) -> Result<u32, RamcheckError> {
    let target = &c.bd.e * qi(big_pow(c.bd.p, c.n));
    if psi_m_point(&c.psi, &c.bd, 0) >= target {
        return Err(RamcheckError::NoAdmissibleM);
    }
    let mut m = 0;
    while psi_m_point(&c.psi, &c.bd, m + 1) < target {
        m += 1;
    }
    let bound = c.n as i64 - c.yhz.h as i64 - 1;
    if m as i64 > bound {
        return Err(RamcheckError::BoundViolated { m0: m, bound });
    }
    Ok(m)
}

/// Largest `m >= 0` with `ψ_{L/K}((m + 1 + 1/(p-1)) e) < e p^n`.
pub fn m0(ti: &TheoremInputs) -> Result<u32, RamcheckError> {
    m0_ctx(&ti.ctx()?)
}

/// `q = ((y-e)s + e0) p^m` if `h = 0` and `y > e`, else `e0 p^m`;
/// `r = q + e0(p^{m+1} - 1)`.
pub fn q_r_values(tp: &TameParams, yhz: &Yhz, e: u64, m: u32) -> Result<(BigInt, BigInt), RamcheckError> {
    if !yhz.y.is_integer() {
        return Err(RamcheckError::BadParams("y must be an integer".into()));
    }
    let pm = big_pow(tp.p, m);
    let y = yhz.y.to_integer();
    let e = BigInt::from(e);
    let e0 = BigInt::from(tp.e0);
    let q = if yhz.h == 0 && y > e {
        ((&y - &e) * tp.s + &e0) * &pm
    } else {
        &e0 * &pm
    };
    let r = &q + &e0 * (big_pow(tp.p, m + 1) - 1);
    Ok((q, r))
}

/// Lower bound for `ψ_{M/L}(a)`:
/// `s p^t a - s(p-1) Σ_{j<t} p^j β_{m-t+j}` with `β_i = ψ_{L/K}((i+1)e)`.
pub fn psi_ml_lower_bound(bd: &BreakData, tp: &TameParams, a: &Q, m: u32, t: u32) -> Result<Q, RamcheckError> {
    if t > m {
        return Err(RamcheckError::BadParams(format!("t = {t} exceeds m = {m}")));
    }
    let psi = psi_from_breaks(bd);
    let s = qi(tp.s);
    let mut sum = Q::zero();
    for j in 0..t {
        let i = m - t + j;
        let beta = psi.eval(&(qi(i + 1) * &bd.e));
        sum += qi(big_pow(tp.p, j)) * beta;
    }
    Ok(&s * qi(big_pow(tp.p, t)) * a - s * qi(tp.p - 1) * sum)
}

// Intermediate closed-form bounds for the same quantity at
// a = e(p^n - p^{n-1}); psi_ml_lower_bound must dominate them.
pub(crate) fn closed_form_bound(bd: &BreakData, tp: &TameParams, yhz: &Yhz, m: u32, t: u32) -> Q {
    let p = tp.p;
    let pq = qi(p);
    let e = &bd.e;
    let n = bd.n() as u32;
    let s = qi(tp.s);
    let h = yhz.h as u32;
    let a_tilde = e * qi(big_pow(p, n) - big_pow(p, n - 1));
    let tame = e * qi(big_pow(p, h + 1)) / qi(p - 1) - &yhz.z;
    if yhz.y <= *e {
        let tail = qi(big_pow(p, m + h + 1 - t)) * qi(big_pow(p, 2 * t) - 1) / qi(p + 1)
            * (&pq * e / qi(p - 1) - &yhz.y);
        &s * qi(big_pow(p, t)) * a_tilde + &s * qi(big_pow(p, t) - 1) * tame - s * tail
    } else {
        let tail = qi(big_pow(p, h)) * qi(big_pow(p, 2 * m) - 1) / qi(p + 1)
            * ((qi(2 * p - 1)) * e / qi(p - 1) - &yhz.y);
        &s * qi(big_pow(p, m)) * a_tilde + &s * qi(big_pow(p, m) - 1) * tame - s * tail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cond1Check {
    pub t: u32,
    /// Certified lower bound for `ψ_{M/L}(a)`.
    #[serde(with = "interchange::rational")]
    pub psi_ml_lower_bound: Q,
    /// `p^{n+t-m} q`.
    #[serde(with = "interchange::bigint")]
    pub threshold: BigInt,
    pub pass: bool,
}

/// Passes when `lhs > rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    #[serde(with = "interchange::rational")]
    pub lhs: Q,
    #[serde(with = "interchange::rational")]
    pub rhs: Q,
    pub pass: bool,
}

impl Comparison {
    fn strict(lhs: Q, rhs: Q) -> Self {
        let pass = lhs > rhs;
        Comparison { lhs, rhs, pass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guarantee {
    /// The extensions share a subextension of degree at least `p^exponent`.
    Main { exponent: u32 },
    /// The same, obtained from the degree `p^{n-1}` subextensions.
    Proot { exponent: u32 },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub m: u32,
    /// Cutoff used for the congruence (`l` on the `p`-th root path).
    #[serde(with = "interchange::bigint")]
    pub a: BigInt,
    /// Degree exponent of the extension the conditions were checked on.
    pub n: u32,
    pub t_range: Vec<u32>,
    #[serde(with = "interchange::bigint")]
    pub q: BigInt,
    #[serde(with = "interchange::bigint")]
    pub r: BigInt,
    pub cond1: Vec<Cond1Check>,
    /// `φ_{L/K}(a)` against `φ_{E/K}(r)`.
    pub cond2: Comparison,
    /// `a` against `ψ_{L/K}(u_{L/K})`.
    pub cond3: Comparison,
    pub all_pass: bool,
    pub contained_in_zp: bool,
    pub guarantee: Guarantee,
    /// The `p`-th root path, run when `contained_in_zp` is false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Box<ConditionReport>>,
    /// Why the fallback could not run, if it could not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_note: Option<String>,
}

// φ_{E/K}(r) = (m + 1 + 1/(p-1)) e, plus (y - e) when h = 0 and y > e
fn phi_ek_r(bd: &BreakData, yhz: &Yhz, m: u32) -> Q {
    let base = (qi(m + 1) + Q::new(1.into(), (bd.p - 1).into())) * &bd.e;
    if yhz.h == 0 && yhz.y > bd.e {
        base + &yhz.y - &bd.e
    } else {
        base
    }
}

fn run_conditions(bd: &BreakData, tp: &TameParams, a: &BigInt, m: u32, zp: bool) -> Result<ConditionReport, RamcheckError> {
    let n = bd.n() as u32;
    if m < 1 || m > n {
        return Err(RamcheckError::NotApplicable(format!("m = {m} must lie in [1, n = {n}]")));
    }
    let yhz = extract_yhz(bd);
    let e = bd.e.to_integer().to_u64().ok_or(RamcheckError::Overflow)?;
    let (q, r) = q_r_values(tp, &yhz, e, m)?;
    let t_range: Vec<u32> = if yhz.y == bd.e { (0..=m).collect() } else { vec![m] };
    let aq = qi(a.clone());
    let mut cond1 = Vec::new();
    for &t in &t_range {
        let bound = psi_ml_lower_bound(bd, tp, &aq, m, t)?;
        let threshold = big_pow(tp.p, n + t - m) * &q;
        let pass = bound > qi(threshold.clone());
        debug_assert!({
            let a_tilde = &bd.e * qi(big_pow(tp.p, n) - big_pow(tp.p, n - 1));
            psi_ml_lower_bound(bd, tp, &a_tilde, m, t)? >= closed_form_bound(bd, tp, &yhz, m, t)
        });
        cond1.push(Cond1Check {
            t,
            psi_ml_lower_bound: bound,
            threshold,
            pass,
        });
    }
    let psi = psi_from_breaks(bd);
    let cond2 = Comparison::strict(psi.inverse().eval(&aq), phi_ek_r(bd, &yhz, m));
    let cond3 = Comparison::strict(aq, psi.eval(bd.u()));
    let all_pass = cond1.iter().all(|c| c.pass) && cond2.pass && cond3.pass;
    Ok(ConditionReport {
        m,
        a: a.clone(),
        n,
        t_range,
        q,
        r,
        cond1,
        cond2,
        cond3,
        all_pass,
        contained_in_zp: zp,
        guarantee: Guarantee::None,
        fallback: None,
        fallback_note: None,
    })
}

/// Evaluates the three conditions at `m` (default `m0`) and `a` (default
/// `e p^n`). The main guarantee needs every condition for every examined `t`
/// and `contained_in_zp`; without the flag the `p`-th root path is tried.
pub fn check_conditions(ti: &TheoremInputs) -> Result<ConditionReport, RamcheckError> {
    let c = ti.ctx()?;
    let m = match ti.m {
        Some(m) => m,
        None => m0_ctx(&c)?,
    };
    let mut report = run_conditions(&c.bd, &c.tp, &c.a, m, ti.contained_in_zp)?;
    if report.all_pass && ti.contained_in_zp {
        report.guarantee = Guarantee::Main { exponent: m };
    } else if !ti.contained_in_zp {
        match proot_check(ti) {
            Ok(fb) => {
                report.guarantee = fb.guarantee;
                report.fallback = Some(Box::new(fb));
            }
            Err(e) => report.fallback_note = Some(e.to_string()),
        }
    }
    Ok(report)
}

/// The conditions for the degree `p^{n-1}` subextension at `m = m0 - 1`
/// with cutoff `l = ⌈(p-1)/p · ψ_{L/K}(u_{L/K})⌉`. Needs `n >= 3` and
/// `m0 >= 2`.
pub fn proot_check(ti: &TheoremInputs) -> Result<ConditionReport, RamcheckError> {
    let c = ti.ctx()?;
    if c.n < 3 {
        return Err(RamcheckError::NotApplicable(format!("needs n >= 3, got n = {}", c.n)));
    }
    let m0 = m0_ctx(&c)?;
    if m0 < 2 {
        return Err(RamcheckError::NotApplicable(format!("needs m0 >= 2, got m0 = {m0}")));
    }
    let j = c.psi.eval(c.bd.u());
    let l = (qi(c.tp.p - 1) / qi(c.tp.p) * j).ceil().to_integer();
    let sub = c.bd.subextension(c.bd.n() - 1)?;
    let mut report = run_conditions(&sub, &c.tp, &l, m0 - 1, ti.contained_in_zp)?;
    if report.all_pass {
        report.guarantee = Guarantee::Proot { exponent: m0 - 1 };
    }
    Ok(report)
}
