//! Dynamics of power series over `Z_p` with known coefficient precision.
//!
//! For `u(X) = a_0 X + ...` with `u(0) = 0` and `a_0` a 1-unit, the
//! reduction `ū` generates a subgroup of the Nottingham group whose depths
//! `i_n` and index `d` control the periodic points of `u`. The quotients
//!
//! ```text
//! q_n(X) = (u^{∘p^n}(X) - X) / (u^{∘p^{n-1}}(X) - X)
//! ```
//!
//! are computed after cancelling the common factor `X`, so the constant
//! term of `q_n` here is the ratio of the linear coefficients. Nothing is
//! reported beyond the precision that was actually certified.

mod newton;
mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfseries::SeriesError;
use crate::interchange;
use crate::nottingham::{self, Depth, IndexReport, IndexValue, NottinghamError};

pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use series::{pad_compose, pad_iterate, reduce_mod_p, PadicSeries};

type Q = BigRational;

#[derive(Debug, Error)]
pub enum PdynError {
    #[error("invalid series: {0}")]
    BadSeries(String),
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("not a dynamical series: {0}")]
    NotDynamical(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("inexact division: {0}")]
    Inexact(String),
    #[error(transparent)]
    Nottingham(#[from] NottinghamError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Index of the first coefficient that is a unit, or `None` if every known
/// coefficient is divisible by `p`.
pub fn weierstrass_degree(f: &PadicSeries) -> Option<usize> {
    (0..f.trunc()).find(|&i| f.coeff(i) % f.p() != 0)
}

fn check_dynamical(u: &PadicSeries) -> Result<(), PdynError> {
    if u.trunc() < 3 {
        return Err(PdynError::BadSeries("need trunc >= 3".into()));
    }
    if u.coeff(0) != 0 {
        return Err(PdynError::NonzeroConstantTerm);
    }
    if u.coeff(1) % u.p() != 1 % u.p() {
        return Err(PdynError::NotDynamical("linear coefficient is not a 1-unit".into()));
    }
    Ok(())
}

/// `q_n` for `u`, computed from `u^{∘p^{n-1}}` and `u^{∘p^n}`.
pub fn qn_divide(u: &PadicSeries, n: u32) -> Result<PadicSeries, PdynError> {
    if n == 0 {
        return Err(PdynError::BadSeries("q_n needs n >= 1".into()));
    }
    check_dynamical(u)?;
    let lower = u.iterate(u.p().pow(n - 1))?;
    let upper = lower.iterate(u.p())?;
    qn_from_iterates(&lower, &upper)
}

/// `(upper - X)/(lower - X)` with the factor `X` cancelled first.
///
/// With `D = (lower - X)/X = P + X^W U`, `W` its Weierstrass degree, `P` of
/// degree `< W` and divisible by `p`, and `U` a unit, the quotient is the
/// fixed point of `q ↦ U^{-1} ⌊(N - P q)/X^W⌋`. Each step gains a factor
/// `p^v` (`v` the least valuation in `P`) and loses `W` terms, so after
/// `K = ⌈prec/v⌉` steps `q` is exact modulo `p^prec` to `len(N) - K W` terms.
/// The discarded low part `(N - P q) mod X^W` must then vanish.
pub fn qn_from_iterates(lower: &PadicSeries, upper: &PadicSeries) -> Result<PadicSeries, PdynError> {
    let x = PadicSeries::x(lower.p(), lower.prec(), lower.trunc())?;
    let den = lower.sub(&x)?.shift_down(1)?;
    let num = upper.sub(&x.truncate(upper.trunc()))?.shift_down(1)?;
    let w = weierstrass_degree(&den).ok_or_else(|| {
        PdynError::Precision(format!(
            "denominator has no unit coefficient below X^{}; raise trunc",
            den.trunc()
        ))
    })?;
    let prec = lower.prec();
    let v = (0..w).filter_map(|i| den.coeff_valuation(i)).min().unwrap_or(prec);
    let steps = prec.div_ceil(v.max(1)) as usize;
    let len = num.trunc().min(den.trunc());
    let certified = (len as i64) - (steps as i64) * (w as i64);
    if certified < 1 {
        return Err(PdynError::Precision(format!(
            "division by a series of Weierstrass degree {w} needs trunc above {} (have {})",
            steps * w + 2,
            len + 1
        )));
    }
    let certified = certified as usize;
    let pol = PadicSeries::new(lower.p(), prec, w.max(1), den.coeffs()[..w].to_vec())?;
    let unit = den.coeffs()[w..len].to_vec();
    let unit_inv = PadicSeries::new(lower.p(), prec, unit.len(), unit)?.inverse()?;
    let num = num.truncate(len);
    let m = lower.modulus();
    let mut q = vec![0u64; 0];
    for _ in 0..steps {
        let t = num.trunc();
        let pq = series::mul_trunc(pol.coeffs(), &q, t, m);
        let rest: Vec<u64> = (w..t).map(|i| (num.coeff(i) + m - pq[i]) % m).collect();
        let rest = PadicSeries::new(lower.p(), prec, rest.len(), rest)?;
        let next = rest.mul(&unit_inv.truncate(rest.trunc()))?;
        q = next.coeffs().to_vec();
    }
    q.truncate(certified);
    let pq = series::mul_trunc(pol.coeffs(), &q, w, m);
    if let Some(i) = (0..w).find(|&i| (num.coeff(i) + m - pq[i]) % m != 0) {
        return Err(PdynError::Inexact(format!(
            "remainder coefficient of X^{i} is nonzero; u^(p^n) - X is not divisible by u^(p^(n-1)) - X"
        )));
    }
    PadicSeries::new(lower.p(), prec, certified, q)
}

/// `r_n = ⌈(p-1) i_n / p⌉`.
pub fn rn_values(p: u64, lower: &[u64]) -> Vec<u64> {
    lower.iter().map(|&i| ((p - 1) * i).div_ceil(p)).collect()
}

/// `r_n > d (p^n - 1)`.
pub fn snbound(p: u64, d: u64, n: u32, r_n: u64) -> bool {
    r_n as u128 > d as u128 * (p as u128).pow(n).saturating_sub(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnEntry {
    pub n: u32,
    #[serde(with = "interchange::bigint")]
    pub i_n: BigInt,
    #[serde(with = "interchange::bigint")]
    pub r_n: BigInt,
    pub snbound: Option<bool>,
}

pub fn rn_report(p: u64, lower: &[u64], d: Option<u64>) -> Vec<RnEntry> {
    rn_values(p, lower)
        .into_iter()
        .zip(lower)
        .enumerate()
        .map(|(n, (r, &i))| RnEntry {
            n: n as u32,
            i_n: i.into(),
            r_n: r.into(),
            snbound: d.map(|d| snbound(p, d, n as u32, r)),
        })
        .collect()
}

/// Quantities attached to an index `d` over a base of ramification `e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtQuantities {
    pub p: u64,
    pub d: u64,
    pub e: u64,
    /// `d! e / d`; absent for `d = 0`.
    #[serde(with = "interchange::bigint_opt")]
    pub t: Option<BigInt>,
    /// `1 <= d <= p - 2` and `e <= p - 1`.
    pub admissible: bool,
}

impl ExtQuantities {
    /// Predicted valuation `1/(d p^n)` of a point of exact period `p^n`;
    /// guaranteed only for `n >= 3`.
    pub fn predicted_valuation(&self, n: u32) -> Option<Q> {
        (self.d > 0).then(|| Q::new(BigInt::one(), BigInt::from(self.d) * BigInt::from(self.p).pow(n)))
    }
}

pub fn ext_quantities(p: u64, d: u64, e: u64) -> ExtQuantities {
    let t = (d > 0).then(|| (1..d).fold(BigInt::one(), |acc, k| acc * k) * e);
    ExtQuantities {
        p,
        d,
        e,
        t,
        admissible: d >= 1 && d + 2 <= p && e >= 1 && e < p,
    }
}

/// A quantity that could not be certified at the given `(prec, trunc)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub quantity: String,
    pub level: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub n: u32,
    /// Terms of `q_n` known exactly modulo `p^prec`.
    pub certified_trunc: Option<usize>,
    pub weierstrass_degree: Option<usize>,
    /// `d p^n`.
    pub expected_degree: Option<u64>,
    /// `i_n - i_{n-1}`.
    pub break_difference: Option<u64>,
    pub degree_matches_index: Option<bool>,
    pub degree_matches_breaks: Option<bool>,
    pub newton: Option<NewtonPolygon>,
    /// `1/(d p^n)`.
    #[serde(with = "interchange::rational_opt")]
    pub predicted_valuation: Option<Q>,
    pub polygon_matches: Option<bool>,
    /// `d` is known and `n >= 3`, so a mismatch is an inconsistency.
    pub polygon_required: bool,
    pub constant_valuation: Option<u32>,
    pub expected_constant_valuation: Option<u32>,
    pub constant_matches: Option<bool>,
    /// Root valuations on the polygon add up to the constant term's valuation.
    pub valuation_sum_matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub p: u64,
    pub prec: u32,
    pub trunc: usize,
    pub n_max: u32,
    /// Certified depths `i_0, i_1, ...`; stops at the first undetermined one.
    #[serde(with = "interchange::u64_vec")]
    pub depths: Vec<u64>,
    /// `i_n + 1` fixed points of `u^{∘p^n}` in the open unit disc.
    #[serde(with = "interchange::u64_vec")]
    pub fixed_points: Vec<u64>,
    #[serde(with = "interchange::u64_vec")]
    pub upper: Vec<u64>,
    pub index: Option<IndexReport>,
    pub levels: Vec<LevelReport>,
    pub rn: Vec<RnEntry>,
    pub markers: Vec<Marker>,
    /// Failed checks that the theory requires within certified precision.
    pub violations: Vec<String>,
}

impl DynamicsReport {
    pub fn index_d(&self) -> Option<u64> {
        match self.index.as_ref()?.d {
            IndexValue::Finite(d) => Some(d),
            IndexValue::Undetermined(_) => None,
        }
    }

    pub fn level(&self, n: u32) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.n == n)
    }
}

/// Full analysis of `u` for levels `0..=n_max`.
///
/// Only invalid input is an error; everything that runs out of precision
/// is left empty and listed in `markers`.
pub fn analyze(u: &PadicSeries, n_max: u32) -> Result<DynamicsReport, PdynError> {
    check_dynamical(u)?;
    if u.is_x() {
        return Err(PdynError::NotDynamical(
            "u = X generates the trivial group, not one isomorphic to Z_p".into(),
        ));
    }
    let p = u.p();
    let mut markers = Vec::new();
    let mut violations = Vec::new();
    let mark = |markers: &mut Vec<Marker>, quantity: &str, level: u32, reason: String| {
        markers.push(Marker {
            quantity: quantity.into(),
            level,
            reason,
        })
    };

    let mut iterates = vec![u.clone()];
    for _ in 0..n_max {
        let next = iterates.last().unwrap().iterate(p)?;
        iterates.push(next);
    }

    let mut depths = Vec::new();
    for (n, it) in iterates.iter().enumerate() {
        match nottingham::depth(&reduce_mod_p(it))? {
            Depth::Finite(i) => depths.push(i as u64),
            Depth::AtLeast(b) => {
                mark(
                    &mut markers,
                    "depth",
                    n as u32,
                    format!("depth is at least {b}; raise trunc above {}", u.trunc()),
                );
                break;
            }
        }
    }
    let upper = match nottingham::upper_from_lower(p, &depths) {
        Ok(b) => b,
        Err(e @ NottinghamError::SenViolation { .. }) => {
            violations.push(format!("depths violate Sen's theorem: {e}"));
            Vec::new()
        }
        Err(e) => return Err(e.into()),
    };
    let index = if upper.len() >= 2 {
        match nottingham::index_of(p, &upper) {
            Ok(r) => Some(r),
            Err(e) => {
                violations.push(format!("upper breaks are inadmissible: {e}"));
                None
            }
        }
    } else {
        mark(&mut markers, "index", 0, "needs at least two certified depths".into());
        None
    };
    let d = index.as_ref().and_then(|r| match r.d {
        IndexValue::Finite(d) => Some(d),
        IndexValue::Undetermined(_) => None,
    });
    if index.is_some() && d.is_none() {
        mark(&mut markers, "index", 0, "upper breaks have not stabilized; raise n_max".into());
    }

    let mut levels = Vec::new();
    for n in 1..=n_max {
        let expected_degree = d.map(|d| d * p.pow(n));
        let break_difference = (depths.len() > n as usize).then(|| depths[n as usize] - depths[n as usize - 1]);
        let predicted_valuation =
            d.map(|d| Q::new(BigInt::one(), BigInt::from(d) * BigInt::from(p).pow(n)));
        let mut lv = LevelReport {
            n,
            certified_trunc: None,
            weierstrass_degree: None,
            expected_degree,
            break_difference,
            degree_matches_index: None,
            degree_matches_breaks: None,
            newton: None,
            predicted_valuation: predicted_valuation.clone(),
            polygon_matches: None,
            polygon_required: d.is_some() && n >= 3,
            constant_valuation: None,
            expected_constant_valuation: (p != 2 || n >= 2).then_some(1),
            constant_matches: None,
            valuation_sum_matches: None,
        };
        let q = match qn_from_iterates(&iterates[n as usize - 1], &iterates[n as usize]) {
            Ok(q) => q,
            Err(PdynError::Precision(msg)) => {
                mark(&mut markers, "q_n", n, msg);
                levels.push(lv);
                continue;
            }
            Err(e) => return Err(e),
        };
        lv.certified_trunc = Some(q.trunc());
        lv.constant_valuation = q.coeff_valuation(0);
        if lv.constant_valuation.is_none() {
            mark(&mut markers, "constant_valuation", n, format!("constant term of q_n vanishes mod p^{}", q.prec()));
        }
        lv.constant_matches = lv.expected_constant_valuation.zip(lv.constant_valuation).map(|(a, b)| a == b);
        lv.weierstrass_degree = weierstrass_degree(&q);
        let Some(wd) = lv.weierstrass_degree else {
            mark(
                &mut markers,
                "weierstrass_degree",
                n,
                format!("no unit among the {} certified coefficients of q_n", q.trunc()),
            );
            levels.push(lv);
            continue;
        };
        lv.degree_matches_index = expected_degree.map(|e| e == wd as u64);
        lv.degree_matches_breaks = break_difference.map(|b| b == wd as u64);
        if lv.degree_matches_breaks == Some(false) {
            violations.push(format!(
                "level {n}: Weierstrass degree {wd} of q_n differs from i_n - i_(n-1) = {}",
                break_difference.unwrap()
            ));
        }
        match newton_polygon(&q, wd) {
            Ok(np) => {
                lv.polygon_matches = predicted_valuation
                    .as_ref()
                    .map(|pv| np.is_single_segment() && np.segments[0].root_valuation == *pv);
                lv.valuation_sum_matches = lv
                    .constant_valuation
                    .map(|c| np.total_root_valuation() == Q::from_integer(BigInt::from(c)));
                if lv.valuation_sum_matches == Some(false) {
                    violations.push(format!("level {n}: root valuations do not add up to v(q_n(0))"));
                }
                if lv.polygon_required && lv.polygon_matches == Some(false) {
                    violations.push(format!("level {n}: polygon of q_n is not a single segment of slope -1/(d p^n)"));
                }
                lv.newton = Some(np);
            }
            Err(PdynError::Precision(msg)) => mark(&mut markers, "newton_polygon", n, msg),
            Err(e) => return Err(e),
        }
        levels.push(lv);
    }

    Ok(DynamicsReport {
        p,
        prec: u.prec(),
        trunc: u.trunc(),
        n_max,
        fixed_points: depths.iter().map(|i| i + 1).collect(),
        rn: rn_report(p, &depths, d),
        depths,
        upper,
        index,
        levels,
        markers,
        violations,
    })
}

/// `v_p` of the linear coefficient ratio `(a^{p^n} - 1)/(a^{p^{n-1}} - 1)`,
/// computed directly from `a`; `None` when the precision is insufficient.
pub fn constant_term_valuation(a0: u64, p: u64, prec: u32, n: u32) -> Option<u32> {
    let m = p.checked_pow(prec)?;
    let pow = |base: u64, e: u64| -> u64 {
        let (mut acc, mut b, mut e) = (1u128, base as u128 % m as u128, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m as u128;
            }
            b = b * b % m as u128;
            e >>= 1;
        }
        acc as u64
    };
    let v = |x: u64| -> Option<u32> {
        if x == 0 {
            return None;
        }
        let (mut x, mut k) = (x, 0);
        while x % p == 0 {
            x /= p;
            k += 1;
        }
        Some(k)
    };
    let lo = pow(a0, p.pow(n - 1));
    if lo == 1 % m {
        // a0 = 1 to this precision: the ratio is p
        return Some(1);
    }
    let hi = pow(a0, p.pow(n));
    Some(v((hi + m - 1) % m)? - v((lo + m - 1) % m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn cyc(p: u64, prec: u32, trunc: usize) -> PadicSeries {
        PadicSeries::binomial_minus_one(p, prec, trunc, p + 1).unwrap()
    }

    #[test]
    fn weierstrass_examples() {
        let f = PadicSeries::from_ints(5, 3, 5, &[5, 10, 3, 1]).unwrap();
        assert_eq!(weierstrass_degree(&f), Some(2));
        let u = cyc(5, 4, 10);
        let f = u.sub(&PadicSeries::x(5, 4, 10).unwrap()).unwrap();
        assert_eq!(weierstrass_degree(&f), Some(5));
        let g = PadicSeries::from_ints(5, 3, 3, &[5, 25, 0]).unwrap();
        assert_eq!(weierstrass_degree(&g), None);
    }

    #[test]
    fn q1_cyclotomic() {
        let u = cyc(5, 8, 130);
        let q1 = qn_divide(&u, 1).unwrap();
        assert_eq!(q1.trunc(), 97);
        assert_eq!(q1.coeff_valuation(0), Some(1));
        // (6^5 - 1)/(6 - 1) = 1555
        assert_eq!(q1.coeff(0), 1555);
        assert_eq!(weierstrass_degree(&q1), Some(20));
        let np = newton_polygon(&q1, 20).unwrap();
        assert!(np.is_single_segment());
        assert_eq!(np.segments[0].root_valuation, q(1, 20));
    }

    #[test]
    fn q1_times_denominator_is_numerator() {
        let u = cyc(7, 5, 60);
        let q1 = qn_divide(&u, 1).unwrap();
        let x = PadicSeries::x(7, 5, 60).unwrap();
        let den = u.sub(&x).unwrap().shift_down(1).unwrap();
        let num = u.iterate(7).unwrap().sub(&x).unwrap().shift_down(1).unwrap();
        let t = q1.trunc();
        assert_eq!(den.truncate(t).mul(&q1).unwrap(), num.truncate(t));
    }

    #[test]
    fn q1_with_unit_linear_coefficient_one() {
        let u = PadicSeries::from_ints(5, 6, 40, &[0, 1, 1]).unwrap();
        let q1 = qn_divide(&u, 1).unwrap();
        assert_eq!(q1.coeff(0), 5);
    }

    #[test]
    fn q2_needs_more_terms() {
        let u = cyc(5, 8, 130);
        assert!(matches!(qn_divide(&u, 2), Err(PdynError::Precision(_))));
    }

    #[test]
    fn inexact_division_detected() {
        let lower = PadicSeries::from_ints(5, 3, 20, &[0, 1, 5, 1]).unwrap();
        let upper = PadicSeries::from_ints(5, 3, 20, &[0, 1, 0, 0, 1]).unwrap();
        assert!(matches!(qn_from_iterates(&lower, &upper), Err(PdynError::Inexact(_))));
    }

    #[test]
    fn rn_examples() {
        assert_eq!(rn_values(5, &[4, 24]), vec![4, 20]);
        assert!(snbound(5, 4, 1, 20));
        assert!(!snbound(5, 4, 1, 16));
        let rep = rn_report(5, &[4, 24, 124], Some(4));
        assert!(rep.iter().all(|r| r.snbound == Some(true)));
    }

    #[test]
    fn ext_examples() {
        let a = ext_quantities(7, 2, 1);
        assert_eq!(a.t, Some(BigInt::from(1)));
        assert!(a.admissible);
        assert_eq!(a.predicted_valuation(3), Some(q(1, 686)));
        assert!(!ext_quantities(5, 4, 1).admissible);
        assert_eq!(ext_quantities(11, 4, 3).t, Some(BigInt::from(18)));
        assert!(!ext_quantities(7, 0, 1).admissible);
    }

    #[test]
    fn analyze_cyclotomic() {
        let r = analyze(&cyc(5, 8, 130), 2).unwrap();
        assert_eq!(r.depths, vec![4, 24, 124]);
        assert_eq!(r.upper, vec![4, 8, 12]);
        assert_eq!(r.index_d(), Some(4));
        let l1 = r.level(1).unwrap();
        assert_eq!(l1.weierstrass_degree, Some(20));
        assert_eq!(l1.polygon_matches, Some(true));
        assert_eq!(l1.constant_matches, Some(true));
        assert_eq!(l1.valuation_sum_matches, Some(true));
        let l2 = r.level(2).unwrap();
        assert_eq!(l2.certified_trunc, None);
        assert!(r.markers.iter().any(|m| m.quantity == "q_n" && m.level == 2));
        assert!(r.violations.is_empty());
        assert_eq!(r.fixed_points, vec![5, 25, 125]);
    }

    #[test]
    fn analyze_rejects_identity() {
        let u = PadicSeries::x(5, 4, 20).unwrap();
        assert!(matches!(analyze(&u, 2), Err(PdynError::NotDynamical(_))));
        let bad = PadicSeries::from_ints(5, 4, 20, &[0, 2]).unwrap();
        assert!(analyze(&bad, 1).is_err());
    }

    #[test]
    fn analyze_marks_trivial_reduction() {
        let u = PadicSeries::from_ints(5, 3, 12, &[0, 6, 5]).unwrap();
        let r = analyze(&u, 2).unwrap();
        assert!(r.depths.is_empty());
        assert!(r.markers.iter().any(|m| m.quantity == "depth" && m.level == 0));
        assert!(r.markers.iter().any(|m| m.quantity == "q_n"));
    }

    #[test]
    fn constant_term_valuation_formula() {
        assert_eq!(constant_term_valuation(6, 5, 8, 1), Some(1));
        assert_eq!(constant_term_valuation(1, 5, 8, 2), Some(1));
        assert_eq!(constant_term_valuation(26, 5, 8, 2), Some(1));
    }

    #[test]
    fn report_json_roundtrip() {
        let r = analyze(&cyc(5, 6, 40), 1).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: DynamicsReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
