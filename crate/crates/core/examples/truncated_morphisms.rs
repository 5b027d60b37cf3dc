//! Morphisms of truncated discrete valuation rings and r-equivalence.

use ramforge::gfseries::{FiniteField, TruncSeries};
use ramforge::truncation::{compose_morphism, is_extension, is_isomorphism, r_equivalent, TruncMorphism, TruncObject};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f5 = FiniteField::prime(5)?;
    let a = TruncObject::new(&f5, 3)?;
    let b = TruncObject::new(&f5, 6)?;

    // π_a ↦ η π_b^2
    let eta = TruncSeries::from_ints(&f5, 6, &[1, 1]);
    let f = TruncMorphism::new(&a, &b, 2, 0, &eta)?;
    println!("f: r = {}, extension = {}, isomorphism = {}", f.r(), is_extension(&f), is_isomorphism(&f));
    println!("f(π_a) = {:?}", f.mu_image().coeffs().iter().map(|c| c.coords()[0]).collect::<Vec<_>>());

    let eta2 = TruncSeries::from_ints(&f5, 6, &[1, 1, 0, 0, 1]);
    let f2 = TruncMorphism::new(&a, &b, 2, 0, &eta2)?;
    for c in 1..=3 {
        println!("f ~ f2 at c = {c}: {}", r_equivalent(&f, &f2, c)?);
    }

    let g = TruncMorphism::new(&b, &b, 1, 0, &TruncSeries::from_ints(&f5, 6, &[2]))?;
    let gf = compose_morphism(&g, &f)?;
    let gf2 = compose_morphism(&g, &f2)?;
    println!("g∘f: r = {}, g∘f ~ g∘f2 at c = 2: {}", gf.r(), r_equivalent(&gf, &gf2, 2)?);
    Ok(())
}
