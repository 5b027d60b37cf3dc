//! Lower and upper ramification breaks of a Nottingham element, and the
//! index of the group it generates.

use ramforge::gfseries::{FiniteField, TruncSeries};
use ramforge::nottingham::{index_of, ram_sequence, IndexValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f5 = FiniteField::prime(5)?;
    // reduction of (1+X)^6 - 1
    let g = TruncSeries::from_ints(&f5, 700, &[0, 1, 0, 0, 0, 1, 1]);
    let seq = ram_sequence(&g, 3)?;
    println!("p = {}", seq.p);
    println!("lower breaks  {:?}", seq.lower);
    println!("upper breaks  {:?}", seq.upper);
    println!("certified to X^{}", seq.certified_to);

    let idx = index_of(seq.p, &seq.upper)?;
    match idx.d {
        IndexValue::Finite(d) => println!("index d = {d} (confirmed: {})", idx.confirmed),
        IndexValue::Undetermined(n) => println!("index undetermined after {n} breaks"),
    }
    Ok(())
}
