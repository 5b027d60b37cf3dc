//! The substitution group `A(k)` of series `c1*X + c2*X^2 + ...` (`c1 != 0`)
//! and its Nottingham subgroup `N(k)` (`c1 = 1`): depths, p-power iterates,
//! ramification break sequences of the procyclic group a series generates,
//! the index of that group, and comparison of generated subgroups modulo a
//! power of `X`.
//!
//! Truncated data never proves more than it contains. A depth that is not
//! visible below `X^{N-1}` is reported as [`Depth::AtLeast`], and every
//! routine that needs a certified depth fails with
//! [`NottinghamError::Precision`] instead of guessing; retry with a larger
//! truncation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfseries::{SeriesError, TruncSeries};
use crate::interchange;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NottinghamError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("series is not in A(k): needs c0 = 0 and c1 != 0")]
    NotInA,
    #[error("series is not in the Nottingham group: needs c1 = 1")]
    NotNottingham,
    #[error("depth of the p^{level}-th iterate is not certified at truncation {trunc}; retry with a larger truncation")]
    Precision { level: usize, trunc: usize },
    #[error("Sen integrality fails at n = {n}: {diff} is not divisible by {modulus}")]
    SenViolation { n: usize, diff: u64, modulus: u64 },
    #[error("break sequence is not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("upper break sequence is inconsistent with the cyclic break pattern: {0}")]
    Inadmissible(String),
    #[error("need at least {need} breaks, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("modulus X^{m} exceeds a truncation ({trunc})")]
    ModulusTooLarge { m: usize, trunc: usize },
}

/// Depth of a substitution series: the degree of the leading term of
/// `(g(X) - X)/X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Finite(usize),
    /// No nonzero term of `(g - X)/X` is known; the depth is at least this
    /// value and may be infinite (as for `g = X`).
    AtLeast(usize),
}

impl Depth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(d) => Some(d),
            Depth::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::AtLeast(d) => write!(f, ">= {d}"),
        }
    }
}

fn check_in_a(g: &TruncSeries) -> Result<(), NottinghamError> {
    if g.trunc() < 2 || !g.coeff_is_zero(0) || g.coeff_is_zero(1) {
        return Err(NottinghamError::NotInA);
    }
    Ok(())
}

fn check_nottingham(g: &TruncSeries) -> Result<(), NottinghamError> {
    check_in_a(g)?;
    if !g.coeff(1).is_one() {
        return Err(NottinghamError::NotNottingham);
    }
    Ok(())
}

pub fn depth(g: &TruncSeries) -> Result<Depth, NottinghamError> {
    check_in_a(g)?;
    let n = g.trunc();
    if !g.coeff(1).is_one() {
        return Ok(Depth::Finite(0));
    }
    // coefficient of X^k in (g - X)/X is c_{k+1}, known for k <= n - 2
    Ok((1..n - 1)
        .find(|&k| !g.coeff_is_zero(k + 1))
        .map_or(Depth::AtLeast(n - 1), Depth::Finite))
}

/// `g` composed with itself `k` times (`k = 0` gives `X`).
pub fn iterate(g: &TruncSeries, mut k: u64) -> Result<TruncSeries, NottinghamError> {
    check_in_a(g)?;
    let mut acc = TruncSeries::x(g.field(), g.trunc());
    let mut base = g.clone();
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

/// `g^{∘p^n}` at the input truncation.
pub fn p_iterate(g: &TruncSeries, n: usize) -> Result<TruncSeries, NottinghamError> {
    let p = g.field().p();
    let mut cur = g.clone();
    for _ in 0..n {
        cur = iterate(&cur, p)?;
    }
    Ok(cur)
}

/// Lower breaks `i_0, ..., i_{n_max}`: the depths of `g^{∘p^n}`.
pub fn lower_breaks(g: &TruncSeries, n_max: usize) -> Result<Vec<u64>, NottinghamError> {
    check_in_a(g)?;
    let p = g.field().p();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut cur = g.clone();
    for level in 0..=n_max {
        if level > 0 {
            cur = iterate(&cur, p)?;
        }
        match depth(&cur)? {
            Depth::Finite(d) => out.push(d as u64),
            Depth::AtLeast(_) => {
                return Err(NottinghamError::Precision {
                    level,
                    trunc: g.trunc(),
                })
            }
        }
    }
    Ok(out)
}

/// `b_0 = i_0`, `b_n = b_{n-1} + (i_n - i_{n-1})/p^n`. A difference not
/// divisible by `p^n` cannot come from a group isomorphic to `Z_p`.
pub fn upper_from_lower(p: u64, lower: &[u64]) -> Result<Vec<u64>, NottinghamError> {
    let mut out = Vec::with_capacity(lower.len());
    let mut pn: u64 = 1;
    for (n, &i_n) in lower.iter().enumerate() {
        if n == 0 {
            out.push(i_n);
            continue;
        }
        if i_n <= lower[n - 1] {
            return Err(NottinghamError::NotIncreasing(n));
        }
        pn = pn.checked_mul(p).expect("p^n overflows u64");
        let diff = i_n - lower[n - 1];
        if diff % pn != 0 {
            return Err(NottinghamError::SenViolation { n, diff, modulus: pn });
        }
        out.push(out[n - 1] + diff / pn);
    }
    Ok(out)
}

/// Lower and upper breaks of the group generated by a series, with the
/// truncation that certified them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamSequence {
    pub p: u64,
    #[serde(with = "interchange::u64_vec")]
    pub lower: Vec<u64>,
    #[serde(with = "interchange::u64_vec")]
    pub upper: Vec<u64>,
    pub certified_to: usize,
}

pub fn ram_sequence(g: &TruncSeries, n_max: usize) -> Result<RamSequence, NottinghamError> {
    let lower = lower_breaks(g, n_max)?;
    let p = g.field().p();
    let upper = upper_from_lower(p, &lower)?;
    Ok(RamSequence {
        p,
        lower,
        upper,
        certified_to: g.trunc(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexValue {
    Finite(u64),
    /// Every observed step has `b_n >= p b_{n-1}`; more breaks are needed.
    Undetermined(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub d: IndexValue,
    /// False when `d` rests on a single trailing difference.
    pub confirmed: bool,
    pub stabilized_at: Option<usize>,
    /// The observed differences `b_n - b_{n-1}`.
    #[serde(with = "interchange::u64_vec")]
    pub evidence: Vec<u64>,
}

/// Index of the group from its upper breaks: eventually `b_n - b_{n-1} = d`,
/// and before that every step multiplies by at least `p`.
pub fn index_of(p: u64, upper: &[u64]) -> Result<IndexReport, NottinghamError> {
    if upper.len() < 2 {
        return Err(NottinghamError::TooShort {
            need: 2,
            got: upper.len(),
        });
    }
    for n in 1..upper.len() {
        if upper[n] <= upper[n - 1] {
            return Err(NottinghamError::NotIncreasing(n));
        }
    }
    let diffs: Vec<u64> = upper.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *diffs.last().unwrap();
    // diffs[k] is b_{k+1} - b_k; the constant tail starts at b_{stab}
    let stab = diffs.iter().rposition(|&d| d != last).map_or(1, |k| k + 2);
    let multiplies = |n: usize| upper[n] >= p * upper[n - 1];
    if let Some(bad) = (1..stab).find(|&n| !multiplies(n)) {
        return Err(NottinghamError::Inadmissible(format!(
            "step {bad} neither multiplies by p nor continues the final difference {last}"
        )));
    }
    let tail_len = upper.len() - stab;
    // once b_{n-1} >= d/(p-1) every later difference is d
    let pattern_ok = upper[stab - 1] * (p - 1) >= last;
    let report = |d, confirmed, stabilized_at| IndexReport {
        d,
        confirmed,
        stabilized_at,
        evidence: diffs.clone(),
    };
    if tail_len >= 2 && pattern_ok {
        return Ok(report(IndexValue::Finite(last), true, Some(stab)));
    }
    if (1..upper.len()).all(multiplies) {
        return Ok(report(IndexValue::Undetermined(upper.len() - 1), false, None));
    }
    if tail_len >= 2 {
        return Err(NottinghamError::Inadmissible(format!(
            "constant difference {last} starts at b_{} = {} < d/(p-1)",
            stab - 1,
            upper[stab - 1]
        )));
    }
    Ok(report(IndexValue::Finite(last), false, Some(stab)))
}

/// `h` with `g(X) = X h(X)`; one term of precision is spent.
pub fn unit_part(g: &TruncSeries) -> Result<TruncSeries, NottinghamError> {
    if !g.coeff_is_zero(0) {
        return Err(SeriesError::NonzeroConstantTerm.into());
    }
    Ok(g.shift_down(1)?)
}

/// Whether `a` and `b` agree modulo `X^m`.
pub fn series_agree_mod(a: &TruncSeries, b: &TruncSeries, m: usize) -> Result<bool, NottinghamError> {
    if a.field() != b.field() {
        return Err(SeriesError::FieldMismatch.into());
    }
    let t = a.trunc().min(b.trunc());
    if m > t {
        return Err(NottinghamError::ModulusTooLarge { m, trunc: t });
    }
    Ok((0..m).all(|i| a.coeff(i) == b.coeff(i)))
}

/// `h ∘ g ∘ h^{-1}`.
pub fn conjugate(h: &TruncSeries, g: &TruncSeries) -> Result<TruncSeries, NottinghamError> {
    check_in_a(h)?;
    check_in_a(g)?;
    let h_inv = h.comp_inverse()?;
    Ok(h.compose(&g.compose(&h_inv)?)?)
}

// Number of n with depth(g^{∘p^n}) <= m - 1: the order of the image of the
// closed subgroup generated by g modulo X^{m+1} is p to this power.
fn quotient_exponent(g: &TruncSeries, m: usize) -> Result<u32, NottinghamError> {
    let p = g.field().p();
    let mut cur = g.truncate(m + 1);
    let mut j = 0;
    loop {
        match depth(&cur)? {
            Depth::Finite(d) if d < m => {
                j += 1;
                cur = iterate(&cur, p)?;
            }
            _ => return Ok(j),
        }
    }
}

/// Whether the closed subgroups generated by `g` and `g2` have the same
/// image modulo `X^{m+1}`. The images are cyclic p-groups; they coincide iff
/// their orders agree and `g2` is a power of `g` there, found by exhaustive
/// search over the exponents.
pub fn subgroup_equal_mod(g: &TruncSeries, g2: &TruncSeries, m: usize) -> Result<bool, NottinghamError> {
    check_nottingham(g)?;
    check_nottingham(g2)?;
    if g.field() != g2.field() {
        return Err(SeriesError::FieldMismatch.into());
    }
    let t = g.trunc().min(g2.trunc());
    if t <= m {
        return Err(NottinghamError::ModulusTooLarge { m: m + 1, trunc: t });
    }
    let j = quotient_exponent(g, m)?;
    if j != quotient_exponent(g2, m)? {
        return Ok(false);
    }
    let gm = g.truncate(m + 1);
    let target = g2.truncate(m + 1);
    let order = g.field().p().pow(j);
    let mut cur = TruncSeries::x(g.field(), m + 1);
    for _ in 0..order {
        if cur == target {
            return Ok(true);
        }
        cur = cur.compose(&gm)?;
    }
    Ok(false)
}
