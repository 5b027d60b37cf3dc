//! Driving the command line interface in process and feeding one command's
//! JSON output into the next.

use ramforge::cli::{run_with, DEFAULT_MAX_PRECISION};

fn call(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        std::iter::once("ramforge").chain(args.iter().copied()),
        DEFAULT_MAX_PRECISION,
        &mut out,
        &mut err,
    );
    if code != 0 {
        eprintln!("exit {code}: {}", String::from_utf8_lossy(&err));
    }
    String::from_utf8(out).unwrap().trim().to_string()
}

fn main() {
    let u = r#"{"p":5,"w":1,"trunc":7,"coeffs":[0,1,0,0,0,1,1]}"#;
    println!("{}", call(&["series", "depth", "--series", u]));
    let inv = call(&["series", "inverse", "--series", u]);
    println!("inverse: {inv}");
    println!("u∘u^-1: {}", call(&["series", "compose", "--outer", u, "--inner", &inv]));

    println!("{}", call(&["breaks", "upper", "--p", "5", "--lower", "4,24,124"]));
    println!("{}", call(&["check", "m0", "--p", "5", "--e", "1", "--upper", "1,2,3"]));

    let psi = call(&["herbrand", "psi", "--p", "5", "--e", "1", "--upper", "1,2,3"]);
    println!("psi: {psi}");
    println!("{}", call(&["herbrand", "eval", "--func", &psi, "--x", "2,7/2"]));
    println!("{}", call(&["--format", "table", "breaks", "index", "--p", "5", "--upper", "4,8,12"]));
}
