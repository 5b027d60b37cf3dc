//! Truncated power series over a finite field: composition, inverses and
//! Frobenius twists.

use ramforge::gfseries::{FiniteField, TruncSeries};
use ramforge::nottingham::depth;

fn show(s: &TruncSeries) -> String {
    let terms: Vec<String> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{:?}·X^{i}", c.coords()))
        .collect();
    format!("{} + O(X^{})", terms.join(" + "), s.trunc())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f5 = FiniteField::prime(5)?;
    let u = TruncSeries::from_ints(&f5, 12, &[0, 1, 0, 0, 0, 1, 1]);
    println!("u       = {}", show(&u));
    println!("u∘u     = {}", show(&u.compose(&u)?));
    let inv = u.comp_inverse()?;
    println!("u^-1    = {}", show(&inv));
    println!("u∘u^-1  = {}", show(&u.compose(&inv)?));
    println!("depth(u) = {}", depth(&u)?);

    // F_25 = F_5[t]/(t^2 - 2)
    let f25 = FiniteField::extension(5, &[3, 0, 1])?;
    let t = f25.elem(&[0, 1])?;
    let v = TruncSeries::from_coeffs(&f25, 6, &[f25.zero(), f25.one(), t.clone(), f25.zero(), t])?;
    println!("v       = {}", show(&v));
    println!("v^(σ)   = {}", show(&v.frobenius_twist(1)));
    Ok(())
}
