//! Hasse-Herbrand functions from upper breaks, checked against the layer by
//! layer composite.

use num_rational::BigRational;
use ramforge::herbrand::{
    extract_yhz, lower_break_formula, phi_from_breaks, psi_from_breaks, psi_via_tower, validate_breaks, BreakData,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bd = BreakData::from_ints(3, 2, &[1, 3, 5])?;
    let verdict = validate_breaks(&bd);
    println!("valid: {}", verdict.valid);

    let psi = psi_from_breaks(&bd);
    let phi = phi_from_breaks(&bd);
    println!("psi breakpoints {:?}", psi.breakpoints().iter().map(|q| q.to_string()).collect::<Vec<_>>());
    println!("psi slopes      {:?}", psi.slopes().iter().map(|q| q.to_string()).collect::<Vec<_>>());
    for x in [1i64, 2, 4, 6] {
        let x = BigRational::from_integer(x.into());
        let y = psi.eval(&x);
        println!("psi({x}) = {y}, phi(psi({x})) = {}", phi.eval(&y));
    }
    println!("tower composite agrees: {}", psi_via_tower(&bd) == psi);

    let yhz = extract_yhz(&bd);
    println!("y = {}, h = {}, z = {}", yhz.y, yhz.h, yhz.z);
    for i in 1..bd.n() {
        println!("lower break {i}: {}", lower_break_formula(&bd, &yhz, i)?);
    }

    let bad = BreakData::from_ints(3, 2, &[1, 2])?;
    for v in validate_breaks(&bad).violations {
        println!("rejected: {v}");
    }
    Ok(())
}
