use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{PadicSeries, PdynError};
use crate::interchange;

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "interchange::rational")]
    pub slope: Q,
    pub length: usize,
    /// `-slope`: the common valuation of the `length` roots on this segment.
    #[serde(with = "interchange::rational")]
    pub root_valuation: Q,
}

/// Lower convex hull of `(i, v_p(c_i))`, `0 <= i <= degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, u32)>,
    pub segments: Vec<Segment>,
    /// Indices whose coefficient is `0 mod p^prec`; none of them is a vertex.
    pub uncertain: Vec<usize>,
}

impl NewtonPolygon {
    pub fn degree(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    pub fn is_single_segment(&self) -> bool {
        self.segments.len() == 1
    }

    /// `Σ root_valuation · length`, i.e. `v(c_0) - v(c_degree)`.
    pub fn total_root_valuation(&self) -> Q {
        self.segments
            .iter()
            .map(|s| &s.root_valuation * Q::from_integer(BigInt::from(s.length)))
            .sum()
    }
}

/// Newton polygon of the polynomial part `c_0 + ... + c_degree X^degree`.
///
/// Coefficients that vanish modulo `p^prec` are placed at height `prec`, the
/// lowest they could be; if such a point ends up as a vertex the polygon
/// depends on digits we do not have and an error is returned.
pub fn newton_polygon(f: &PadicSeries, degree: usize) -> Result<NewtonPolygon, PdynError> {
    if degree >= f.trunc() {
        return Err(PdynError::Precision(format!(
            "Newton polygon needs coefficients up to X^{degree}, series is known mod X^{}",
            f.trunc()
        )));
    }
    if degree == 0 {
        return Err(PdynError::BadSeries("Newton polygon needs degree at least 1".into()));
    }
    let pts: Vec<(usize, u32, bool)> = (0..=degree)
        .map(|i| match f.coeff_valuation(i) {
            Some(v) => (i, v, true),
            None => (i, f.prec(), false),
        })
        .collect();
    // monotone chain; cross product of (b - a) and (c - a)
    let mut hull: Vec<(usize, u32, bool)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as i128 - a.0 as i128) * (pt.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (pt.0 as i128 - a.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    if let Some(bad) = hull.iter().find(|v| !v.2) {
        return Err(PdynError::Precision(format!(
            "coefficient of X^{} vanishes mod {}^{} but would be a Newton polygon vertex",
            bad.0,
            f.p(),
            f.prec()
        )));
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            let slope = Q::new(BigInt::from(w[1].1 as i64 - w[0].1 as i64), BigInt::from(len));
            Segment {
                root_valuation: -slope.clone(),
                slope,
                length: len,
            }
        })
        .collect();
    Ok(NewtonPolygon {
        vertices: hull.iter().map(|v| (v.0, v.1)).collect(),
        segments,
        uncertain: pts.iter().filter(|p| !p.2).map(|p| p.0).collect(),
    })
}
