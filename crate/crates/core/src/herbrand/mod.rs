//! Hasse-Herbrand functions of totally ramified cyclic extensions of degree
//! `p^n`, described by their upper breaks, and the closed forms for lower
//! breaks that follow from the standard constraints on those breaks.
//!
//! All arithmetic is over exact rationals.

mod pl;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfseries::is_prime;
use crate::interchange;

pub use pl::{pl_compose, PLFunc};

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HerbrandError {
    #[error("malformed piecewise-linear function: {0}")]
    BadPL(String),
    #[error("malformed break data: {0}")]
    BadBreakData(String),
    #[error("break data violates {0}")]
    Inadmissible(Violation),
    #[error("index {i} outside the valid range {lo}..={hi}")]
    OutOfRange { i: usize, lo: usize, hi: usize },
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn qpow(p: u64, k: usize) -> Q {
    Q::from_integer(BigInt::from(p).pow(k as u32))
}

/// Upper breaks `b_0 < ... < b_{n-1}` of a totally ramified cyclic extension
/// of degree `p^n` over a base in which `p` has valuation `e`.
///
/// JSON: `{"p": 5, "e": [1, 1], "upper": [[1, 1], [2, 1]]}`; strings such as
/// `"9/4"` are accepted wherever a pair is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BreakDataJson")]
pub struct BreakData {
    pub p: u64,
    #[serde(with = "interchange::rational_pair")]
    pub e: Q,
    #[serde(with = "interchange::rational_pair_vec")]
    pub upper: Vec<Q>,
}

#[derive(Deserialize)]
struct BreakDataJson {
    p: u64,
    #[serde(with = "interchange::rational")]
    e: Q,
    #[serde(with = "interchange::rational_vec")]
    upper: Vec<Q>,
}

impl TryFrom<BreakDataJson> for BreakData {
    type Error = HerbrandError;
    fn try_from(j: BreakDataJson) -> Result<Self, Self::Error> {
        BreakData::new(j.p, j.e, j.upper)
    }
}

impl BreakData {
    /// Checks shape only: `p` prime, `e > 0`, breaks positive and strictly
    /// increasing. Use [`validate_breaks`] for admissibility.
    pub fn new(p: u64, e: Q, upper: Vec<Q>) -> Result<Self, HerbrandError> {
        if !is_prime(p) {
            return Err(HerbrandError::BadBreakData(format!("{p} is not prime")));
        }
        if !e.is_positive() {
            return Err(HerbrandError::BadBreakData("e must be positive".into()));
        }
        if upper.is_empty() {
            return Err(HerbrandError::BadBreakData("need at least one break".into()));
        }
        if !upper[0].is_positive() {
            return Err(HerbrandError::BadBreakData("breaks must be positive".into()));
        }
        if upper.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HerbrandError::BadBreakData("breaks must increase strictly".into()));
        }
        Ok(BreakData { p, e, upper })
    }

    pub fn from_ints(p: u64, e: i64, upper: &[i64]) -> Result<Self, HerbrandError> {
        Self::new(p, q(e), upper.iter().map(|&b| q(b)).collect())
    }

    pub fn n(&self) -> usize {
        self.upper.len()
    }

    /// `e/(p-1)`.
    pub fn tame_bound(&self) -> Q {
        &self.e / q(self.p as i64 - 1)
    }

    /// Break data of the subextension of degree `p^k`: the first `k` breaks.
    pub fn subextension(&self, k: usize) -> Result<Self, HerbrandError> {
        if k == 0 || k > self.n() {
            return Err(HerbrandError::OutOfRange {
                i: k,
                lo: 1,
                hi: self.n(),
            });
        }
        Ok(BreakData {
            p: self.p,
            e: self.e.clone(),
            upper: self.upper[..k].to_vec(),
        })
    }

    /// Largest upper break.
    pub fn u(&self) -> &Q {
        self.upper.last().unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// `1 <= b_0 <= pe/(p-1)`
    A,
    /// `b_i <= e/(p-1)` forces `p b_i <= b_{i+1} <= pe/(p-1)`
    B,
    /// `b_i >= e/(p-1)` forces `b_{i+1} = b_i + e`
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Index of the offending break.
    pub index: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule ({:?}) at b_{}: {}", self.rule, self.index, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

pub fn validate_breaks(bd: &BreakData) -> Verdict {
    let fmt = interchange::format_rational;
    let tb = bd.tame_bound();
    let top = &tb * q(bd.p as i64);
    let pq = q(bd.p as i64);
    let mut violations = Vec::new();
    let b0 = &bd.upper[0];
    if *b0 < Q::one() || *b0 > top {
        violations.push(Violation {
            rule: Rule::A,
            index: 0,
            message: format!("b_0 = {} must lie in [1, {}]", fmt(b0), fmt(&top)),
        });
    }
    for i in 0..bd.n() - 1 {
        let (b, next) = (&bd.upper[i], &bd.upper[i + 1]);
        if *b <= tb {
            let lo = b * &pq;
            if *next < lo || *next > top {
                violations.push(Violation {
                    rule: Rule::B,
                    index: i + 1,
                    message: format!("b_{} = {} must lie in [{}, {}]", i + 1, fmt(next), fmt(&lo), fmt(&top)),
                });
            }
        }
        if *b >= tb {
            let want = b + &bd.e;
            if *next != want {
                violations.push(Violation {
                    rule: Rule::C,
                    index: i + 1,
                    message: format!("b_{} = {} must equal {}", i + 1, fmt(next), fmt(&want)),
                });
            }
        }
    }
    Verdict {
        valid: violations.is_empty(),
        violations,
    }
}

fn require_valid(bd: &BreakData) -> Result<(), HerbrandError> {
    match validate_breaks(bd).violations.into_iter().next() {
        Some(v) => Err(HerbrandError::Inadmissible(v)),
        None => Ok(()),
    }
}

/// `ψ_{L/K}`: identity up to `b_0`, slope `p^{j+1}` on `[b_j, b_{j+1}]`,
/// slope `p^n` beyond the last break.
pub fn psi_from_breaks(bd: &BreakData) -> PLFunc {
    let mut bps = vec![Q::zero()];
    bps.extend(bd.upper.iter().cloned());
    let slopes = (0..=bd.n()).map(|j| qpow(bd.p, j)).collect();
    PLFunc::new(bps, slopes, Q::zero()).expect("break data is increasing and positive")
}

pub fn phi_from_breaks(bd: &BreakData) -> PLFunc {
    psi_from_breaks(bd).inverse()
}

/// `ψ` of a tamely ramified extension of index `e`: `x ↦ e·x` for `x >= 0`.
/// Composing it after a `φ` scales positive upper breaks by `e`.
pub fn tame_psi(e: &Q) -> PLFunc {
    PLFunc::linear(e.clone())
}

/// `φ` of a tamely ramified extension of index `e`: `x ↦ x/e`.
pub fn tame_phi(e: &Q) -> PLFunc {
    PLFunc::linear(e.recip())
}

/// The degree-`p` steps `L_j ⊂ L_{j+1}` of the tower, each as single-break
/// data over its own base: the break of `L_{j+1}/L_j` is `ψ_{L_j/K}(b_j)`
/// and `p` has valuation `e p^j` there.
pub fn tower_layers(bd: &BreakData) -> Vec<BreakData> {
    (0..bd.n())
        .map(|j| {
            let b = if j == 0 {
                bd.upper[0].clone()
            } else {
                psi_from_breaks(&bd.subextension(j).unwrap()).eval(&bd.upper[j])
            };
            BreakData {
                p: bd.p,
                e: &bd.e * qpow(bd.p, j),
                upper: vec![b],
            }
        })
        .collect()
}

/// `ψ_{L/K}` rebuilt as `ψ_{L_n/L_{n-1}} ∘ ... ∘ ψ_{L_1/K}`.
pub fn psi_via_tower(bd: &BreakData) -> PLFunc {
    tower_layers(bd)
        .iter()
        .fold(PLFunc::identity(), |acc, layer| psi_from_breaks(layer).compose(&acc))
}

/// `y`: the smallest upper break above `e/(p-1)` (else the largest break),
/// `h` its index, `z = ψ_{L/K}(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Yhz {
    #[serde(with = "interchange::rational")]
    pub y: Q,
    pub h: usize,
    #[serde(with = "interchange::rational")]
    pub z: Q,
}

pub fn extract_yhz(bd: &BreakData) -> Yhz {
    let tb = bd.tame_bound();
    let h = bd.upper.iter().position(|b| *b > tb).unwrap_or(bd.n() - 1);
    let y = bd.upper[h].clone();
    let z = psi_from_breaks(bd).eval(&y);
    Yhz { y, h, z }
}

/// Closed form of the `i`-th lower break for `h <= i < n`:
/// `z + e p^{h+1} (p^{i-h} - 1)/(p - 1)`.
pub fn lower_break_formula(bd: &BreakData, yhz: &Yhz, i: usize) -> Result<Q, HerbrandError> {
    require_valid(bd)?;
    if i < yhz.h || i >= bd.n() {
        return Err(HerbrandError::OutOfRange {
            i,
            lo: yhz.h,
            hi: bd.n() - 1,
        });
    }
    let geo = (qpow(bd.p, i - yhz.h) - Q::one()) / q(bd.p as i64 - 1);
    Ok(&yhz.z + &bd.e * qpow(bd.p, yhz.h + 1) * geo)
}

/// Closed form of `ψ_{L/K}((i+1)e)`:
/// `z + e p^{h+1}(p^i - 1)/(p - 1) + p^{h+i+1}(e - y)` when `y <= e`
/// (valid for `i <= n-h-1`), and the same with `p^{h+i}(e - y)` when `y > e`
/// (valid for `i <= n-h`). Outside those ranges `(i+1)e` has left the
/// segments the formula describes.
pub fn psi_ie_formula(bd: &BreakData, yhz: &Yhz, i: usize) -> Result<Q, HerbrandError> {
    require_valid(bd)?;
    let e = &bd.e;
    let above = yhz.y > *e;
    let hi = if above { bd.n() - yhz.h } else { bd.n() - yhz.h - 1 };
    if i > hi {
        return Err(HerbrandError::OutOfRange { i, lo: 0, hi });
    }
    let geo = (qpow(bd.p, i) - Q::one()) / q(bd.p as i64 - 1);
    let last = if above { qpow(bd.p, yhz.h + i) } else { qpow(bd.p, yhz.h + i + 1) };
    Ok(&yhz.z + e * qpow(bd.p, yhz.h + 1) * geo + last * (e - &yhz.y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn bd(p: u64, e: i64, upper: &[i64]) -> BreakData {
        BreakData::from_ints(p, e, upper).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_from_breaks(&bd(5, 1, &[1])).eval(&q(1)), q(1));
        assert_eq!(psi_from_breaks(&bd(5, 1, &[1])).eval(&q(2)), q(6));
        let psi = psi_from_breaks(&bd(5, 1, &[1, 2]));
        assert_eq!(psi.eval(&q(2)), q(6));
        assert_eq!(psi.eval(&q(3)), q(31));
        let psi = psi_from_breaks(&bd(5, 1, &[1, 2, 3]));
        assert_eq!(psi.eval(&r(13, 4)), r(249, 4));
    }

    #[test]
    fn phi_examples() {
        let b = bd(5, 1, &[1, 2]);
        let phi = phi_from_breaks(&b);
        assert_eq!(phi.eval(&q(31)), q(3));
        assert_eq!(phi.eval(&r(1, 2)), r(1, 2));
        let psi = psi_from_breaks(&b);
        for k in 0..30 {
            let x = r(k, 3);
            assert_eq!(phi.eval(&psi.eval(&x)), x);
        }
    }

    #[test]
    fn psi_after_phi_is_identity() {
        let b = bd(7, 3, &[2, 5, 8]);
        assert_eq!(pl_compose(&psi_from_breaks(&b), &phi_from_breaks(&b)), PLFunc::identity());
    }

    #[test]
    fn tower_layers_compose_to_psi() {
        let b = bd(5, 1, &[1, 2]);
        let layers = tower_layers(&b);
        assert_eq!(layers[1].upper, vec![q(6)]);
        assert_eq!(layers[1].e, q(5));
        assert_eq!(psi_via_tower(&b), psi_from_breaks(&b));
        let b = bd(7, 6, &[1, 7, 13, 19]);
        assert_eq!(psi_via_tower(&b), psi_from_breaks(&b));
    }

    #[test]
    fn tame_scaling() {
        let e = q(3);
        let phi = phi_from_breaks(&bd(5, 1, &[1, 2]));
        // upper breaks over a tame base of index e are e times larger
        let over = pl_compose(&tame_psi(&e), &phi);
        let lower2 = psi_from_breaks(&bd(5, 1, &[1, 2])).eval(&q(2));
        assert_eq!(over.eval(&lower2), q(6));
        assert_eq!(pl_compose(&tame_phi(&e), &tame_psi(&e)), PLFunc::identity());
    }

    #[test]
    fn validate_examples() {
        assert!(validate_breaks(&bd(5, 1, &[1, 2, 3])).valid);
        let v = validate_breaks(&bd(5, 1, &[1, 3]));
        assert_eq!(v.first_violation().unwrap().rule, Rule::C);
        assert_eq!(v.first_violation().unwrap().message, "b_1 = 3 must equal 2");
        let v = validate_breaks(&bd(5, 1, &[2, 3]));
        assert_eq!(v.first_violation().unwrap().rule, Rule::A);
        // rule (b): b_0 = 1 <= 4/4, next must be in [5, 5]
        assert!(validate_breaks(&bd(5, 4, &[1, 5, 9])).valid);
        let v = validate_breaks(&bd(5, 8, &[1, 4]));
        assert_eq!(v.first_violation().unwrap().rule, Rule::B);
    }

    #[test]
    fn validate_at_tame_bound() {
        // b_0 = e/(p-1) exactly: (b) and (c) both apply and agree
        assert!(validate_breaks(&bd(5, 4, &[1, 5])).valid);
        assert!(!validate_breaks(&bd(5, 4, &[1, 4])).valid);
    }

    #[test]
    fn yhz_examples() {
        assert_eq!(
            extract_yhz(&bd(5, 1, &[1, 2, 3])),
            Yhz {
                y: q(1),
                h: 0,
                z: q(1)
            }
        );
        assert_eq!(
            extract_yhz(&bd(5, 4, &[5, 9, 13])),
            Yhz {
                y: q(5),
                h: 0,
                z: q(5)
            }
        );
        assert_eq!(
            extract_yhz(&bd(5, 4, &[1, 5, 9])),
            Yhz {
                y: q(5),
                h: 1,
                z: q(21)
            }
        );
        // every break at most e/(p-1): fall back to the largest
        let y = extract_yhz(&bd(5, 8, &[1, 2]));
        assert_eq!((y.y, y.h), (q(2), 1));
    }

    #[test]
    fn lower_break_formula_examples() {
        let b = bd(5, 1, &[1, 2, 3]);
        let y = extract_yhz(&b);
        assert_eq!(lower_break_formula(&b, &y, 0).unwrap(), y.z);
        assert_eq!(lower_break_formula(&b, &y, 2).unwrap(), q(31));
        let b = bd(5, 4, &[5, 9]);
        let y = extract_yhz(&b);
        assert_eq!(lower_break_formula(&b, &y, 1).unwrap(), q(25));
        assert!(matches!(lower_break_formula(&b, &y, 2), Err(HerbrandError::OutOfRange { .. })));
        assert!(matches!(
            lower_break_formula(&bd(5, 1, &[1, 3]), &y, 0),
            Err(HerbrandError::Inadmissible(_))
        ));
    }

    #[test]
    fn psi_ie_examples() {
        let b = bd(5, 1, &[1, 2, 3]);
        let y = extract_yhz(&b);
        assert_eq!(psi_ie_formula(&b, &y, 1).unwrap(), q(6));
        assert_eq!(psi_ie_formula(&b, &y, 0).unwrap(), q(1));
        assert!(psi_ie_formula(&b, &y, 3).is_err());
        let b = bd(5, 4, &[5, 9]);
        let y = extract_yhz(&b);
        assert_eq!(psi_ie_formula(&b, &y, 1).unwrap(), q(20));
        assert_eq!(psi_from_breaks(&b).eval(&q(8)), q(20));
        assert_eq!(psi_ie_formula(&b, &y, 2).unwrap(), psi_from_breaks(&b).eval(&q(12)));
    }

    #[test]
    fn json_format() {
        let b = bd(5, 1, &[1, 2]);
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(text, r#"{"p":5,"e":[1,1],"upper":[[1,1],[2,1]]}"#);
        assert_eq!(serde_json::from_str::<BreakData>(&text).unwrap(), b);
        let b: BreakData = serde_json::from_str(r#"{"p":5,"e":"1","upper":["1/2",[3,2]]}"#).unwrap();
        assert_eq!(b.upper, vec![r(1, 2), r(3, 2)]);
        assert!(serde_json::from_str::<BreakData>(r#"{"p":4,"e":[1,1],"upper":[[1,1]]}"#).is_err());
        assert!(serde_json::from_str::<BreakData>(r#"{"p":5,"e":[1,1],"upper":[[2,1],[1,1]]}"#).is_err());
    }
}
