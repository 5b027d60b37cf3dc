//! Dynamics of an invertible series over Z_p: fixed points of p-power
//! iterates, the quotients q_n and their Newton polygons.

use ramforge::pdyn::{analyze, newton_polygon, qn_divide, PadicSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, prec, trunc) = (5, 8, 130);
    // (1+X)^6 - 1
    let u = PadicSeries::binomial_minus_one(p, prec, trunc, p + 1)?;

    let q1 = qn_divide(&u, 1)?;
    println!("q_1 known mod X^{}, q_1(0) = {}", q1.trunc(), q1.coeff(0));
    let np = newton_polygon(&q1, 20)?;
    for s in &np.segments {
        println!("segment: {} roots of valuation {}", s.length, s.root_valuation);
    }

    let rep = analyze(&u, 2)?;
    println!("depths {:?}, fixed points {:?}, upper {:?}", rep.depths, rep.fixed_points, rep.upper);
    println!("index d = {:?}", rep.index_d());
    for level in &rep.levels {
        println!(
            "level {}: degree {:?} (expected {:?}), predicted root valuation {:?}",
            level.n,
            level.weierstrass_degree,
            level.expected_degree,
            level.predicted_valuation.as_ref().map(|q| q.to_string())
        );
    }
    for m in &rep.markers {
        println!("not certified: {} at level {:?}: {}", m.quantity, m.level, m.reason);
    }
    Ok(())
}
