//! ν-quantified fixed-point contexts and their normal forms.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::equiv::{Checker, EquivError};
use crate::groups::{split, GroupSpec};
use crate::syntax::{Atom, Permutation, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("context is not in normal form")]
    NotNormalized,
}

/// A primitive fixed-point constraint `π fix X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixConstraint {
    pub var: Variable,
    pub perm: Permutation,
}

impl FixConstraint {
    pub fn new(perm: Permutation, var: Variable) -> Self {
        FixConstraint { var, perm }
    }
}

impl fmt::Display for FixConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fix {}", self.perm, self.var)
    }
}

/// `ν c̄. Υ` where `Υ` is a finite set of primitive fixed-point constraints.
///
/// Identity constraints are dropped on insertion. Vacuous ν-names are kept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    nu: BTreeSet<Atom>,
    constraints: BTreeSet<FixConstraint>,
}

impl Context {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(nu: impl IntoIterator<Item = Atom>, constraints: impl IntoIterator<Item = FixConstraint>) -> Self {
        let mut ctx = Context {
            nu: nu.into_iter().collect(),
            constraints: BTreeSet::new(),
        };
        for c in constraints {
            ctx.insert(c);
        }
        ctx
    }

    pub fn insert(&mut self, c: FixConstraint) {
        if !c.perm.is_id() {
            self.constraints.insert(c);
        }
    }

    pub fn with_constraint(mut self, c: FixConstraint) -> Self {
        self.insert(c);
        self
    }

    pub fn with_nu(mut self, a: Atom) -> Self {
        self.nu.insert(a);
        self
    }

    pub fn nu(&self) -> &BTreeSet<Atom> {
        &self.nu
    }

    pub fn constraints(&self) -> impl Iterator<Item = &FixConstraint> {
        self.constraints.iter()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn remove(&mut self, c: &FixConstraint) -> bool {
        self.constraints.remove(c)
    }

    /// `atm(Υ_c̄)`, including vacuous ν-names.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.nu.clone();
        for c in &self.constraints {
            out.extend(c.perm.domain());
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.constraints.iter().map(|c| c.var.clone()).collect()
    }

    fn perms_of<'a>(&'a self, x: &'a Variable) -> impl Iterator<Item = &'a Permutation> + 'a {
        self.constraints
            .iter()
            .filter(move |c| &c.var == x)
            .map(|c| &c.perm)
    }

    /// `Υ_c̄|X`
    pub fn restrict(&self, x: &Variable) -> Context {
        Context {
            nu: self.nu.clone(),
            constraints: self
                .constraints
                .iter()
                .filter(|c| &c.var == x)
                .cloned()
                .collect(),
        }
    }

    /// Exhaustive (R1) followed by (R2), merging fix-part cycles in
    /// canonical order.
    pub fn normalize(&self) -> Context {
        self.normalize_with(|_| 0)
    }

    /// Like [`Context::normalize`], but `choose(n)` picks which of the `n`
    /// currently applicable (R2) merges to perform next.
    pub fn normalize_with(&self, mut choose: impl FnMut(usize) -> usize) -> Context {
        let mut out = Context {
            nu: self.nu.clone(),
            constraints: BTreeSet::new(),
        };
        for x in self.vars() {
            let mut fresh: Vec<Permutation> = Vec::new();
            let mut fix: Vec<Vec<Vec<Atom>>> = Vec::new();
            for p in self.perms_of(&x) {
                let s = split(p, &self.nu);
                if !s.quantified.is_id() {
                    fresh.push(s.quantified);
                }
                if !s.unquantified.is_id() {
                    fix.push(s.unquantified.cycles().to_vec());
                }
            }
            loop {
                let mut merges = Vec::new();
                for (fi, fp) in fresh.iter().enumerate() {
                    for (ki, cycles) in fix.iter().enumerate() {
                        for (ci, cycle) in cycles.iter().enumerate() {
                            if cycle.iter().any(|a| fp.moves(a)) {
                                merges.push((fi, ki, ci));
                            }
                        }
                    }
                }
                if merges.is_empty() {
                    break;
                }
                let pick = choose(merges.len()).min(merges.len() - 1);
                let (fi, ki, ci) = merges[pick];
                let cycle = fix[ki].remove(ci);
                fresh[fi] = absorb(&fresh[fi], &cycle);
            }
            for p in fresh {
                out.insert(FixConstraint::new(p, x.clone()));
            }
            for cycles in fix {
                let p = Permutation::from_cycles(cycles).expect("disjoint cycles");
                out.insert(FixConstraint::new(p, x.clone()));
            }
        }
        out
    }

    /// True when every constraint is purely fresh or purely fix and no fix
    /// cycle of a variable meets the domain of one of its fresh constraints.
    pub fn is_normalized(&self) -> bool {
        for x in self.vars() {
            let mut fresh_dom = BTreeSet::new();
            let mut fix_cycles = Vec::new();
            for p in self.perms_of(&x) {
                let s = split(p, &self.nu);
                if !s.quantified.is_id() && !s.unquantified.is_id() {
                    return false;
                }
                fresh_dom.extend(s.quantified.domain());
                fix_cycles.extend(s.unquantified.cycles().iter().cloned());
            }
            if fix_cycles.iter().flatten().any(|a| fresh_dom.contains(a)) {
                return false;
            }
        }
        true
    }

    /// `((Υ_c̄|X)♯, (Υ_c̄|X)fix)`
    pub fn fresh_fix_split(&self, x: &Variable) -> Result<(Vec<FixConstraint>, Vec<FixConstraint>), ContextError> {
        if !self.is_normalized() {
            return Err(ContextError::NotNormalized);
        }
        let mut fresh = Vec::new();
        let mut fix = Vec::new();
        for p in self.perms_of(x) {
            let c = FixConstraint::new(p.clone(), x.clone());
            if p.cycles().iter().flatten().any(|a| self.nu.contains(a)) {
                fresh.push(c);
            } else {
                fix.push(c);
            }
        }
        Ok((fresh, fix))
    }

    /// The group `Perm(A) ∘ ⟨K⟩` of permutations known to fix `X`.
    ///
    /// `A` holds the atoms of `X`'s fresh part together with every ν-name of
    /// the context: any two ν-names can be swapped under any term.
    pub fn membership_group(&self, x: &Variable) -> Result<GroupSpec, ContextError> {
        let (fresh, fix) = self.fresh_fix_split(x)?;
        let mut fresh_atoms = self.nu.clone();
        for c in &fresh {
            fresh_atoms.extend(c.perm.domain());
        }
        Ok(GroupSpec {
            fresh_atoms,
            fix_generators: fix.into_iter().map(|c| c.perm).collect(),
        })
    }

    /// `Υ ⊢ π fix t`, i.e. `Υ ⊢ π·t ≈C t`.
    pub fn entails(&self, p: &Permutation, t: &Term) -> Result<bool, EquivError> {
        Checker::default().entails(self, p, t)
    }
}

/// Merges a fix cycle that meets `fresh` into it.
///
/// When the cycle shares one atom with `fresh` this is the plain product
/// `fresh ∘ cycle`. Otherwise atoms already in `fresh` (except the first one
/// met) are dropped from the cycle first, so that the merged permutation moves
/// every atom of both.
fn absorb(fresh: &Permutation, cycle: &[Atom]) -> Permutation {
    let mut seen_shared = false;
    let spliced: Vec<Atom> = cycle
        .iter()
        .filter(|a| {
            if fresh.moves(a) {
                !std::mem::replace(&mut seen_shared, true)
            } else {
                true
            }
        })
        .cloned()
        .collect();
    if spliced.len() < 2 {
        return fresh.clone();
    }
    let rho = Permutation::cycle(spliced).expect("distinct atoms");
    fresh.compose(&rho)
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.nu.is_empty() {
            f.write_str("new")?;
            for a in &self.nu {
                write!(f, " {a}")?;
            }
            f.write_str(". ")?;
        }
        f.write_str("{")?;
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}
