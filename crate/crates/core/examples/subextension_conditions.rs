//! Checking the sufficient conditions for a common subextension.

use ramforge::herbrand::BreakData;
use ramforge::ramcheck::{check_conditions, f_shift, m0, proot_check, tame_params, Guarantee, TheoremInputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tp = tame_params(7, 3)?;
    println!("tame parameters {tp:?}");
    let f: Vec<i128> = (0..10).map(|t| f_shift(&tp, 2, t)).collect::<Result<_, _>>()?;
    println!("f_2(t), t < 10: {f:?}");

    let ti = TheoremInputs::new(BreakData::from_ints(5, 1, &[1, 2, 3])?, true);
    println!("m0 = {}", m0(&ti)?);
    let rep = check_conditions(&ti)?;
    println!("m = {}, a = {}, q = {}, r = {}", rep.m, rep.a, rep.q, rep.r);
    println!("cond2 {} > {}: {}", rep.cond2.lhs, rep.cond2.rhs, rep.cond2.pass);
    println!("cond3 {} > {}: {}", rep.cond3.lhs, rep.cond3.rhs, rep.cond3.pass);
    match rep.guarantee {
        Guarantee::Main { exponent } | Guarantee::Proot { exponent } => {
            println!("common subextension of degree at least 5^{exponent}")
        }
        Guarantee::None => println!("no guarantee"),
    }

    let not_zp = TheoremInputs::new(BreakData::from_ints(7, 1, &[1, 2, 3, 4])?, false);
    let rep = proot_check(&not_zp)?;
    println!("p-th root path: all pass = {}, guarantee = {:?}", rep.all_pass, rep.guarantee);
    Ok(())
}
