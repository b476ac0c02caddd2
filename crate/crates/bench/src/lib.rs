//! Inputs shared by the benchmarks.

use nomc::text::{parse_file, Statement};
use nomc::{Judgement, UnificationProblem};

pub const CHECK_EXAMPLE: &str =
    "sig f:2 comm; new c. {(d e c) fix X, (a b) fix Y} |- f([d]X, (a b).Y) = f(Y, [e]X)";

pub const UNIFY_EXAMPLE: &str = "sig and:2 comm; [a]and(X, Y) =? [b]and(Y, X)";

pub fn judgement(text: &str) -> Judgement {
    match parse_file(text).expect("valid input").statement {
        Statement::Judgement(j) => j,
        Statement::Goal(_) => panic!("expected a judgement"),
    }
}

pub fn problem(text: &str) -> UnificationProblem {
    match parse_file(text).expect("valid input").statement {
        Statement::Goal(p) => p,
        Statement::Judgement(_) => panic!("expected a goal"),
    }
}
