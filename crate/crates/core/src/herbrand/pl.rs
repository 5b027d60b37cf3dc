use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::HerbrandError;
use crate::interchange;

type Q = BigRational;

/// Continuous, strictly increasing piecewise-linear function on `[0, ∞)`.
///
/// `slopes[i]` holds on `[breakpoints[i], breakpoints[i+1]]`, the last slope
/// continues to infinity. The domain starts at 0 rather than −1; evaluation
/// left of 0 extends the first segment. Redundant breakpoints (equal slopes
/// on both sides) are merged, so equal functions have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PLFuncJson", into = "PLFuncJson")]
pub struct PLFunc {
    breakpoints: Vec<Q>,
    slopes: Vec<Q>,
    values: Vec<Q>,
}

#[derive(Serialize, Deserialize)]
struct PLFuncJson {
    #[serde(with = "interchange::rational_vec")]
    breakpoints: Vec<Q>,
    #[serde(with = "interchange::rational_vec")]
    slopes: Vec<Q>,
    #[serde(with = "interchange::rational")]
    value_at_origin: Q,
}

impl TryFrom<PLFuncJson> for PLFunc {
    type Error = HerbrandError;
    fn try_from(j: PLFuncJson) -> Result<Self, Self::Error> {
        PLFunc::new(j.breakpoints, j.slopes, j.value_at_origin)
    }
}

impl From<PLFunc> for PLFuncJson {
    fn from(f: PLFunc) -> Self {
        PLFuncJson {
            value_at_origin: f.values[0].clone(),
            breakpoints: f.breakpoints,
            slopes: f.slopes,
        }
    }
}

impl PLFunc {
    pub fn new(breakpoints: Vec<Q>, slopes: Vec<Q>, value_at_origin: Q) -> Result<Self, HerbrandError> {
        if breakpoints.is_empty() || breakpoints.len() != slopes.len() {
            return Err(HerbrandError::BadPL("need one slope per breakpoint".into()));
        }
        if !breakpoints[0].is_zero() {
            return Err(HerbrandError::BadPL("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HerbrandError::BadPL("breakpoints must increase strictly".into()));
        }
        if slopes.iter().any(|s| !s.is_positive()) {
            return Err(HerbrandError::BadPL("slopes must be positive".into()));
        }
        Ok(Self::build(breakpoints, slopes, value_at_origin))
    }

    // Trusted inputs: breakpoints start at 0, increase, slopes positive.
    fn build(breakpoints: Vec<Q>, slopes: Vec<Q>, value_at_origin: Q) -> Self {
        let mut bps = vec![breakpoints[0].clone()];
        let mut ss = vec![slopes[0].clone()];
        for (b, s) in breakpoints.into_iter().zip(slopes).skip(1) {
            if *ss.last().unwrap() != s {
                bps.push(b);
                ss.push(s);
            }
        }
        let mut values = vec![value_at_origin];
        for i in 1..bps.len() {
            let v = &values[i - 1] + &ss[i - 1] * (&bps[i] - &bps[i - 1]);
            values.push(v);
        }
        PLFunc {
            breakpoints: bps,
            slopes: ss,
            values,
        }
    }

    // Knots `xs` (increasing, any start), value `y0` at `xs[0]`; the result is
    // restricted to `[0, ∞)` with the first segment extended if needed.
    fn rebased(xs: Vec<Q>, y0: Q, slopes: Vec<Q>) -> Self {
        let mut ys = vec![y0];
        for i in 1..xs.len() {
            let v = &ys[i - 1] + &slopes[i - 1] * (&xs[i] - &xs[i - 1]);
            ys.push(v);
        }
        // last knot at or below 0
        let k = xs.iter().rposition(|x| !x.is_positive()).unwrap_or(0);
        let at0 = &ys[k] + &slopes[k] * (-&xs[k]);
        let mut bps = vec![Q::zero()];
        let mut ss = vec![slopes[k].clone()];
        for i in k + 1..xs.len() {
            if xs[i].is_positive() {
                bps.push(xs[i].clone());
                ss.push(slopes[i].clone());
            }
        }
        Self::build(bps, ss, at0)
    }

    pub fn identity() -> Self {
        Self::linear(Q::one())
    }

    /// `x ↦ c·x`.
    pub fn linear(c: Q) -> Self {
        Self::build(vec![Q::zero()], vec![c], Q::zero())
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Q] {
        &self.slopes
    }

    pub fn value_at_origin(&self) -> &Q {
        &self.values[0]
    }

    // index of the segment containing x (right-continuous)
    fn segment(&self, x: &Q) -> usize {
        self.breakpoints.partition_point(|b| b <= x).saturating_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let i = self.segment(x);
        &self.values[i] + &self.slopes[i] * (x - &self.breakpoints[i])
    }

    /// Slope immediately to the right of `x`.
    pub fn right_slope(&self, x: &Q) -> &Q {
        &self.slopes[self.segment(x)]
    }

    pub fn inverse(&self) -> Self {
        let slopes = self.slopes.iter().map(|s| s.recip()).collect();
        Self::rebased(self.values.clone(), Q::zero(), slopes)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PLFunc) -> Self {
        let lo = inner.values[0].clone();
        let inv = inner.inverse();
        let mut xs: Vec<Q> = inner.breakpoints.clone();
        xs.extend(self.breakpoints.iter().filter(|b| **b > lo).map(|b| inv.eval(b)));
        xs.sort();
        xs.dedup();
        let slopes = xs
            .iter()
            .map(|x| self.right_slope(&inner.eval(x)) * inner.right_slope(x))
            .collect();
        let y0 = self.eval(&inner.eval(&xs[0]));
        Self::rebased(xs, y0, slopes)
    }
}

/// `f ∘ g`.
pub fn pl_compose(f: &PLFunc, g: &PLFunc) -> PLFunc {
    f.compose(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn zig() -> PLFunc {
        PLFunc::new(vec![q(0, 1), q(1, 1), q(3, 1)], vec![q(1, 1), q(5, 1), q(25, 1)], q(0, 1)).unwrap()
    }

    #[test]
    fn eval_and_merge() {
        let f = zig();
        assert_eq!(f.eval(&q(2, 1)), q(6, 1));
        assert_eq!(f.eval(&q(4, 1)), q(36, 1));
        assert_eq!(f.eval(&q(-1, 1)), q(-1, 1));
        let g = PLFunc::new(vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(3, 1)], q(1, 1)).unwrap();
        assert_eq!(g.breakpoints().len(), 1);
        assert_eq!(g.eval(&q(1, 2)), q(5, 2));
    }

    #[test]
    fn rejects_malformed() {
        assert!(PLFunc::new(vec![q(1, 1)], vec![q(1, 1)], q(0, 1)).is_err());
        assert!(PLFunc::new(vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(2, 1)], q(0, 1)).is_err());
        assert!(PLFunc::new(vec![q(0, 1)], vec![q(0, 1)], q(0, 1)).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = zig();
        let g = f.inverse();
        assert_eq!(g.breakpoints(), &[q(0, 1), q(1, 1), q(11, 1)]);
        for x in [q(0, 1), q(1, 3), q(2, 1), q(7, 2), q(40, 1)] {
            assert_eq!(g.eval(&f.eval(&x)), x);
        }
        assert_eq!(f.compose(&g), PLFunc::identity());
        assert_eq!(g.compose(&f), PLFunc::identity());
    }

    #[test]
    fn inverse_with_offset_origin() {
        let f = PLFunc::new(vec![q(0, 1), q(2, 1)], vec![q(2, 1), q(4, 1)], q(3, 1)).unwrap();
        let g = f.inverse();
        assert_eq!(*g.value_at_origin(), q(-3, 2));
        for x in [q(0, 1), q(1, 1), q(5, 1)] {
            assert_eq!(g.eval(&f.eval(&x)), x);
        }
    }

    #[test]
    fn compose_with_identity() {
        let f = zig();
        assert_eq!(f.compose(&PLFunc::identity()), f);
        assert_eq!(PLFunc::identity().compose(&f), f);
    }

    #[test]
    fn compose_matches_pointwise() {
        let f = zig();
        let g = PLFunc::new(vec![q(0, 1), q(1, 2)], vec![q(2, 1), q(3, 1)], q(0, 1)).unwrap();
        let h = f.compose(&g);
        for k in 0..40 {
            let x = q(k, 7);
            assert_eq!(h.eval(&x), f.eval(&g.eval(&x)));
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = zig().inverse();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"breakpoints":["0","1","11"],"slopes":["1","1/5","1/25"],"value_at_origin":"0"}"#
        );
        assert_eq!(serde_json::from_str::<PLFunc>(&text).unwrap(), f);
    }
}
