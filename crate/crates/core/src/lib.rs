//! Nominal terms modulo commutativity: α,C-equivalence under permutation
//! fixed-point contexts, and C-unification with finite complete sets of
//! solutions.

pub mod context;
pub mod equiv;
pub mod groups;
pub mod oracle;
pub mod syntax;
pub mod text;
pub mod unify;

pub use context::{Context, ContextError, FixConstraint};
pub use equiv::{check, prove, Checker, EquivError, Judgement, ProofTree, Rule};
pub use groups::{coset_product_member, split, subgroup_member, GroupError, GroupSpec, DEFAULT_GROUP_CAP};
pub use syntax::{
    fresh_atom, Atom, PermError, Permutation, Signature, SignatureError, Substitution, Symbol, Term, Theory, Variable,
};
pub use text::{parse_file, ParseError, ProblemFile, Statement};
pub use unify::{
    check_instance, find_instance_witness, solve, solve_detailed, Constraint, ProblemMeasure, Reason, Solution,
    UnificationProblem,
};
