//! Brute-force reference procedures for the test suite.
//!
//! Nothing here uses the group or context machinery of the checker, so
//! agreement between the two is meaningful.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::context::{Context, ContextError};
use crate::syntax::{Atom, Signature, Substitution, Symbol, Term, Theory, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("term `{0}` contains a variable")]
    NonGround(Term),
    #[error("context is not in normal form")]
    NotNormalized,
}

impl From<ContextError> for OracleError {
    fn from(_: ContextError) -> Self {
        OracleError::NotNormalized
    }
}

fn ensure_ground(t: &Term) -> Result<(), OracleError> {
    if t.is_ground() {
        Ok(())
    } else {
        Err(OracleError::NonGround(t.clone()))
    }
}

fn swap_atom(a: &Atom, b: &Atom, x: &Atom) -> Atom {
    if x == a {
        b.clone()
    } else if x == b {
        a.clone()
    } else {
        x.clone()
    }
}

fn swap(a: &Atom, b: &Atom, t: &Term) -> Term {
    match t {
        Term::Atom(x) => Term::Atom(swap_atom(a, b, x)),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|u| swap(a, b, u)).collect()),
        Term::Abs(x, body) => Term::Abs(swap_atom(a, b, x), Box::new(swap(a, b, body))),
        Term::Susp(..) => unreachable!("ground terms only"),
    }
}

fn all_atoms(t: &Term, out: &mut BTreeSet<Atom>) {
    match t {
        Term::Atom(a) => {
            out.insert(a.clone());
        }
        Term::App(_, args) => args.iter().for_each(|u| all_atoms(u, out)),
        Term::Abs(a, body) => {
            out.insert(a.clone());
            all_atoms(body, out);
        }
        Term::Susp(..) => {}
    }
}

/// A name outside `avoid`, from a family of its own.
fn unused(avoid: &BTreeSet<Atom>) -> Atom {
    let next = avoid
        .iter()
        .filter(|a| a.family() == "z")
        .map(|a| a.index().unwrap_or(0) + 1)
        .max()
        .unwrap_or(0);
    Atom::new("z", Some(next))
}

fn equal(s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Atom(a), Term::Atom(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            if f != g || xs.len() != ys.len() {
                return false;
            }
            let pointwise = |ys: &[&Term]| xs.iter().zip(ys).all(|(x, y)| equal(x, y));
            let direct: Vec<&Term> = ys.iter().collect();
            pointwise(&direct) || (f.is_commutative() && xs.len() == 2 && pointwise(&[&ys[1], &ys[0]]))
        }
        (Term::Abs(a, u), Term::Abs(b, v)) if a == b => equal(u, v),
        (Term::Abs(a, u), Term::Abs(b, v)) => {
            let mut avoid = BTreeSet::new();
            all_atoms(s, &mut avoid);
            all_atoms(t, &mut avoid);
            let c = unused(&avoid);
            equal(&swap(a, &c, u), &swap(b, &c, v))
        }
        _ => false,
    }
}

/// `g1 ≈C g2` for ground terms.
pub fn ground_alpha_c_equal(g1: &Term, g2: &Term) -> Result<bool, OracleError> {
    ensure_ground(g1)?;
    ensure_ground(g2)?;
    Ok(equal(g1, g2))
}

/// `fn(g)`
pub fn free_names(g: &Term) -> Result<BTreeSet<Atom>, OracleError> {
    ensure_ground(g)?;
    fn go(t: &Term) -> BTreeSet<Atom> {
        match t {
            Term::Atom(a) => BTreeSet::from([a.clone()]),
            Term::App(_, args) => args.iter().flat_map(go).collect(),
            Term::Abs(a, body) => {
                let mut names = go(body);
                names.remove(a);
                names
            }
            Term::Susp(..) => unreachable!("ground terms only"),
        }
    }
    Ok(go(g))
}

/// `X ↦ d_X(a_1, …, a_k)` for each variable, with the `d_X` declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grounding {
    pub subst: Substitution,
    pub signature: Signature,
}

/// Maps every variable `X` of `vars` to a fresh term-former applied to the
/// atoms of `ctx` and `query_atoms` that are neither ν-quantified nor moved
/// by a fresh-part constraint on `X`, in ascending order.
pub fn grounding_substitution(
    ctx: &Context,
    query_atoms: &BTreeSet<Atom>,
    vars: &BTreeSet<Variable>,
) -> Result<Grounding, OracleError> {
    if !ctx.is_normalized() {
        return Err(OracleError::NotNormalized);
    }
    let mut universe = ctx.atoms();
    universe.extend(query_atoms.iter().cloned());
    let mut bindings = BTreeMap::new();
    let mut signature = Signature::new();
    for x in vars {
        let (fresh, _) = ctx.fresh_fix_split(x)?;
        let excluded: BTreeSet<Atom> = fresh.iter().flat_map(|c| c.perm.domain()).collect();
        let args: Vec<Term> = universe
            .iter()
            .filter(|a| !ctx.nu().contains(*a) && !excluded.contains(*a))
            .cloned()
            .map(Term::atom)
            .collect();
        let name = format!("d_{x}");
        signature
            .declare(&name, args.len(), Theory::Empty)
            .expect("plain symbols accept any arity");
        bindings.insert(x.clone(), Term::app(Symbol::new(&name, Theory::Empty), args));
    }
    Ok(Grounding {
        subst: Substitution::from_bindings(bindings),
        signature,
    })
}
