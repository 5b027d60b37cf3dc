//! Truncated valuation rings in equal characteristic.
//!
//! An object of length `e` is `A = k[π]/(π^e)` with `M = A·μ̂` and
//! `ε(μ̂) = π`. A morphism `(r, μ, η)` from length `e1` to length `e2` is
//! stored as
//!
//! * `res_twist = j`: `μ` acts on `k` as `x ↦ x^{p^j}`,
//! * `eta_coeff`: the unit `η0` with `η(μ̂₁) = η0·μ̂₂^{⊗r}`,
//! * `mu_image = μ(π₁)`, which the compatibility `μ∘ε₁ = ε₂^{⊗r}∘η`
//!   forces to be `η0·π₂^r`.
//!
//! `μ` is well defined on `k[π]/(π^{e1})` exactly when `r·e1 >= e2`.
//! Elements of `A` are [`TruncSeries`] with truncation `e`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfseries::{FiniteField, SeriesError, SeriesJson, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruncError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("invalid morphism: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncObject {
    pub field: FiniteField,
    pub e: usize,
}

impl TruncObject {
    pub fn new(field: &FiniteField, e: usize) -> Result<Self, TruncError> {
        if e == 0 {
            return Err(TruncError::Invalid("length must be at least 1".into()));
        }
        Ok(TruncObject {
            field: field.clone(),
            e,
        })
    }

    pub fn length(&self) -> usize {
        self.e
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncMorphism {
    src: TruncObject,
    dst: TruncObject,
    r: u64,
    res_twist: i64,
    mu_image: TruncSeries,
    eta_coeff: TruncSeries,
}

fn pad(a: &TruncSeries, n: usize) -> TruncSeries {
    if n <= a.trunc() {
        return a.truncate(n);
    }
    TruncSeries::from_coeffs(a.field(), n, &a.coeffs()).expect("same field")
}

fn is_unit(a: &TruncSeries) -> bool {
    !a.coeff_is_zero(0)
}

impl TruncMorphism {
    /// Builds the morphism with `η(μ̂₁) = eta_coeff·μ̂₂^{⊗r}`; `mu_image` is
    /// derived.
    pub fn new(
        src: &TruncObject,
        dst: &TruncObject,
        r: u64,
        res_twist: i64,
        eta_coeff: &TruncSeries,
    ) -> Result<Self, TruncError> {
        let eta = pad(eta_coeff, dst.e);
        let mu = eta.mul(&x_power(&dst.field, dst.e, r))?;
        Self::from_parts(src, dst, r, res_twist, mu, eta)
    }

    /// Builds from all four pieces and checks every constraint.
    pub fn from_parts(
        src: &TruncObject,
        dst: &TruncObject,
        r: u64,
        res_twist: i64,
        mu_image: TruncSeries,
        eta_coeff: TruncSeries,
    ) -> Result<Self, TruncError> {
        let w = src.field.w() as i64;
        let f = TruncMorphism {
            src: src.clone(),
            dst: dst.clone(),
            r,
            res_twist: res_twist.rem_euclid(w),
            mu_image,
            eta_coeff,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(obj: &TruncObject) -> Self {
        TruncMorphism {
            src: obj.clone(),
            dst: obj.clone(),
            r: 1,
            res_twist: 0,
            mu_image: TruncSeries::x(&obj.field, obj.e),
            eta_coeff: TruncSeries::one(&obj.field, obj.e),
        }
    }

    pub fn validate(&self) -> Result<(), TruncError> {
        let (src, dst) = (&self.src, &self.dst);
        if src.field != dst.field {
            return Err(TruncError::ObjectMismatch("source and target residue fields differ".into()));
        }
        if self.r == 0 {
            return Err(TruncError::Invalid("r must be positive".into()));
        }
        if self.mu_image.trunc() != dst.e || self.eta_coeff.trunc() != dst.e {
            return Err(TruncError::Invalid(format!("μ and η data must live modulo π^{}", dst.e)));
        }
        if self.mu_image.field() != &dst.field || self.eta_coeff.field() != &dst.field {
            return Err(SeriesError::FieldMismatch.into());
        }
        if !is_unit(&self.eta_coeff) {
            return Err(TruncError::Invalid("η must be an isomorphism: eta_coeff is not a unit".into()));
        }
        if (src.e as u128) * (self.r as u128) < dst.e as u128 {
            return Err(TruncError::Invalid(format!(
                "π^{} = 0 in the source but its image has valuation {} < {}",
                src.e,
                self.r as u128 * src.e as u128,
                dst.e
            )));
        }
        let want = self.eta_coeff.mul(&x_power(&dst.field, dst.e, self.r))?;
        if want != self.mu_image {
            return Err(TruncError::Invalid("μ∘ε₁ ≠ ε₂^{⊗r}∘η".into()));
        }
        Ok(())
    }

    pub fn src(&self) -> &TruncObject {
        &self.src
    }

    pub fn dst(&self) -> &TruncObject {
        &self.dst
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn res_twist(&self) -> i64 {
        self.res_twist
    }

    pub fn mu_image(&self) -> &TruncSeries {
        &self.mu_image
    }

    pub fn eta_coeff(&self) -> &TruncSeries {
        &self.eta_coeff
    }

    /// The ring map `μ` applied to an element of the source.
    pub fn apply_ring(&self, a: &TruncSeries) -> Result<TruncSeries, TruncError> {
        if a.field() != &self.src.field || a.trunc() != self.src.e {
            return Err(TruncError::ObjectMismatch("element does not live in the source ring".into()));
        }
        let twisted = pad(&a.frobenius_twist(self.res_twist), self.dst.e);
        Ok(twisted.compose(&self.mu_image)?)
    }
}

// π^r in k[π]/(π^e)
fn x_power(field: &FiniteField, e: usize, r: u64) -> TruncSeries {
    if r >= e as u64 {
        TruncSeries::zero(field, e)
    } else {
        TruncSeries::monomial(field, e, r as usize)
    }
}

/// `g ∘ f = (s·r, ν∘μ, θ^{⊗r}∘η)`.
pub fn compose_morphism(g: &TruncMorphism, f: &TruncMorphism) -> Result<TruncMorphism, TruncError> {
    if f.dst != g.src {
        return Err(TruncError::ObjectMismatch("target of f is not the source of g".into()));
    }
    let r = g
        .r
        .checked_mul(f.r)
        .ok_or_else(|| TruncError::Invalid("r overflows".into()))?;
    let mu = g.apply_ring(&f.mu_image)?;
    let eta = g.apply_ring(&f.eta_coeff)?.mul(&g.eta_coeff.pow(f.r))?;
    TruncMorphism::from_parts(&f.src, &g.dst, r, f.res_twist + g.res_twist, mu, eta).map_err(|e| match e {
        TruncError::Invalid(m) => TruncError::Invalid(format!("composite fails validation ({m}); inputs are corrupted")),
        other => other,
    })
}

/// `length(A₂) = r·length(A₁)`.
pub fn is_extension(f: &TruncMorphism) -> bool {
    f.dst.e as u128 == f.r as u128 * f.src.e as u128
}

/// `r = r'`, equal residue maps, and `η(μ̂₁) - η'(μ̂₁) ∈ m^{rc} M₂^{⊗r}`,
/// i.e. the eta coefficients agree modulo `π^{rc}` (exactly, once
/// `rc >= e2`).
pub fn r_equivalent(f: &TruncMorphism, f2: &TruncMorphism, c: u64) -> Result<bool, TruncError> {
    if f.src != f2.src || f.dst != f2.dst {
        return Err(TruncError::ObjectMismatch("morphisms have different endpoints".into()));
    }
    if f.r != f2.r || f.res_twist != f2.res_twist {
        return Ok(false);
    }
    let diff = f.eta_coeff.sub(&f2.eta_coeff)?;
    Ok(match diff.valuation() {
        None => true,
        Some(v) => v as u128 >= f.r as u128 * c as u128,
    })
}

/// `r = 1`, `μ(π₁)` a uniformizer and `η0` a unit. A ring isomorphism
/// also needs equal lengths.
pub fn is_isomorphism(f: &TruncMorphism) -> bool {
    f.r == 1 && f.src.e == f.dst.e && f.mu_image.valuation() == Some(1) && is_unit(&f.eta_coeff)
}

/// `{"p", "w", "modulus"?, "e"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectJson {
    pub p: u64,
    pub w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub e: usize,
}

impl ObjectJson {
    pub fn to_object(&self) -> Result<TruncObject, TruncError> {
        let probe = SeriesJson {
            p: self.p,
            w: self.w,
            modulus: self.modulus.clone(),
            trunc: 1,
            coeffs: vec![],
        };
        TruncObject::new(&probe.field()?, self.e)
    }

    pub fn from_object(o: &TruncObject) -> Self {
        ObjectJson {
            p: o.field.p(),
            w: o.field.w(),
            modulus: o.field.modulus().map(|m| m.to_vec()),
            e: o.e,
        }
    }
}

/// `{"src", "dst", "r", "res_twist", "eta_coeff", "mu_image"?}`; when
/// `mu_image` is omitted it is derived from `eta_coeff`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub src: ObjectJson,
    pub dst: ObjectJson,
    pub r: u64,
    #[serde(default)]
    pub res_twist: i64,
    pub eta_coeff: SeriesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_image: Option<SeriesJson>,
}

impl MorphismJson {
    pub fn to_morphism(&self) -> Result<TruncMorphism, TruncError> {
        let src = self.src.to_object()?;
        let dst = self.dst.to_object()?;
        let eta = self.eta_coeff.to_series()?;
        match &self.mu_image {
            None => TruncMorphism::new(&src, &dst, self.r, self.res_twist, &eta),
            Some(mu) => TruncMorphism::from_parts(&src, &dst, self.r, self.res_twist, mu.to_series()?, eta),
        }
    }

    pub fn from_morphism(f: &TruncMorphism) -> Self {
        MorphismJson {
            src: ObjectJson::from_object(&f.src),
            dst: ObjectJson::from_object(&f.dst),
            r: f.r,
            res_twist: f.res_twist,
            eta_coeff: SeriesJson::from_series(&f.eta_coeff),
            mu_image: Some(SeriesJson::from_series(&f.mu_image)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k5() -> FiniteField {
        FiniteField::prime(5).unwrap()
    }

    fn obj(e: usize) -> TruncObject {
        TruncObject::new(&k5(), e).unwrap()
    }

    fn eta(e: usize, terms: &[(usize, i64)]) -> TruncSeries {
        TruncSeries::from_terms(&k5(), e, terms)
    }

    #[test]
    fn identity_laws() {
        let f = TruncMorphism::new(&obj(2), &obj(6), 3, 0, &eta(6, &[(0, 2), (1, 1), (4, 3)])).unwrap();
        assert_eq!(compose_morphism(&TruncMorphism::identity(&obj(6)), &f).unwrap(), f);
        assert_eq!(compose_morphism(&f, &TruncMorphism::identity(&obj(2))).unwrap(), f);
    }

    #[test]
    fn composite_by_substitution() {
        // e1 = 1, e2 = 2, e3 = 6 with r = 2, s = 3
        let f = TruncMorphism::new(&obj(1), &obj(2), 2, 0, &eta(2, &[(0, 3), (1, 1)])).unwrap();
        let g = TruncMorphism::new(&obj(2), &obj(6), 3, 0, &eta(6, &[(0, 2), (1, 4), (2, 1)])).unwrap();
        let gf = compose_morphism(&g, &f).unwrap();
        assert_eq!(gf.r(), 6);
        // π₁^1 = 0 already, so μ(π₁) = 0 and η0 = ν(3 + π₂)·η_g^2
        assert!(gf.mu_image().is_zero());
        let ng = g.eta_coeff().mul(&TruncSeries::x(&k5(), 6).pow(3)).unwrap();
        let direct = eta(6, &[(0, 3)]).add(&ng).unwrap().mul(&g.eta_coeff().pow(2)).unwrap();
        assert_eq!(gf.eta_coeff(), &direct);
    }

    #[test]
    fn r_multiplies_and_twists_add() {
        let k4 = FiniteField::extension(2, &[1, 1, 1]).unwrap();
        let a = TruncObject::new(&k4, 2).unwrap();
        let b = TruncObject::new(&k4, 4).unwrap();
        let c = TruncObject::new(&k4, 12).unwrap();
        let one_b = TruncSeries::one(&k4, 4);
        let f = TruncMorphism::new(&a, &b, 2, 1, &one_b).unwrap();
        let g = TruncMorphism::new(&b, &c, 3, 0, &TruncSeries::one(&k4, 12)).unwrap();
        let gf = compose_morphism(&g, &f).unwrap();
        assert_eq!((gf.r(), gf.res_twist()), (6, 1));
        let ff = TruncMorphism::new(&b, &b, 1, 1, &one_b).unwrap();
        assert_eq!(compose_morphism(&ff, &ff).unwrap().res_twist(), 0);
        assert!(is_extension(&gf));
    }

    #[test]
    fn validation() {
        // π^2 = 0 in the source cannot map to π^2 ≠ 0 in k[π]/π^6
        assert!(TruncMorphism::new(&obj(2), &obj(6), 2, 0, &eta(6, &[(0, 1)])).is_err());
        assert!(TruncMorphism::new(&obj(2), &obj(6), 3, 0, &eta(6, &[(1, 1)])).is_err());
        let bad_mu = TruncSeries::monomial(&k5(), 6, 2);
        assert!(TruncMorphism::from_parts(&obj(2), &obj(6), 3, 0, bad_mu, eta(6, &[(0, 1)])).is_err());
        let f = TruncMorphism::new(&obj(2), &obj(6), 3, 0, &eta(6, &[(0, 1)])).unwrap();
        assert!(compose_morphism(&f, &f).is_err());
    }

    #[test]
    fn extension_examples() {
        let one6 = eta(6, &[(0, 1)]);
        assert!(is_extension(&TruncMorphism::new(&obj(2), &obj(6), 3, 0, &one6).unwrap()));
        let one5 = eta(5, &[(0, 1)]);
        assert!(!is_extension(&TruncMorphism::new(&obj(2), &obj(5), 3, 0, &one5).unwrap()));
        assert!(is_extension(&TruncMorphism::identity(&obj(4))));
    }

    #[test]
    fn r_equivalence_threshold() {
        let (a, b) = (obj(8), obj(8));
        let c = 3;
        let f = TruncMorphism::new(&a, &b, 1, 0, &eta(8, &[(0, 1)])).unwrap();
        let f2 = TruncMorphism::new(&a, &b, 1, 0, &eta(8, &[(0, 1), (c, 2)])).unwrap();
        assert!(r_equivalent(&f, &f, 8).unwrap());
        assert!(r_equivalent(&f, &f2, c as u64).unwrap());
        assert!(!r_equivalent(&f, &f2, c as u64 + 1).unwrap());
        let g = TruncMorphism::new(&obj(4), &b, 2, 0, &eta(8, &[(0, 1)])).unwrap();
        let g2 = TruncMorphism::new(&obj(4), &b, 3, 0, &eta(8, &[(0, 1)])).unwrap();
        assert!(!r_equivalent(&g, &g2, 1).unwrap());
        assert!(r_equivalent(&f, &g, 1).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        assert!(is_isomorphism(&TruncMorphism::identity(&obj(3))));
        let f = TruncMorphism::new(&obj(2), &obj(4), 2, 0, &eta(4, &[(0, 1)])).unwrap();
        assert!(!is_isomorphism(&f));
        // r = 1 but μ(π) = π^2: rejected at construction, and never an isomorphism
        let mu = TruncSeries::monomial(&k5(), 3, 2);
        assert!(TruncMorphism::from_parts(&obj(3), &obj(3), 1, 0, mu, eta(3, &[(0, 1)])).is_err());
        let g = TruncMorphism::new(&obj(3), &obj(3), 1, 0, &eta(3, &[(0, 4), (2, 1)])).unwrap();
        assert!(is_isomorphism(&g));
    }

    #[test]
    fn json_roundtrip() {
        let f = TruncMorphism::new(&obj(2), &obj(6), 3, 0, &eta(6, &[(0, 2), (1, 1)])).unwrap();
        let doc = MorphismJson::from_morphism(&f);
        let text = serde_json::to_string(&doc).unwrap();
        let back: MorphismJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_morphism().unwrap(), f);
        let short = r#"{"src":{"p":5,"w":1,"e":2},"dst":{"p":5,"w":1,"e":6},"r":3,"eta_coeff":{"p":5,"w":1,"trunc":6,"coeffs":[2,1]}}"#;
        let g = serde_json::from_str::<MorphismJson>(short).unwrap().to_morphism().unwrap();
        assert_eq!(g, f);
    }
}
