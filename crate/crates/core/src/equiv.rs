//! Decision procedure for judgements `Υ_c̄ ⊢ s ≈C t`.
//!
//! The checker is syntax directed: at most one rule matches the shapes of the
//! two sides, except for commutative applications where the aligned pairing is
//! tried before the swapped one. Contexts are normalised on entry.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::context::{Context, ContextError};
use crate::groups::{coset_product_member, GroupError, GroupSpec, DEFAULT_GROUP_CAP};
use crate::syntax::{fresh_atom, Atom, Permutation, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("ill-formed term: {0}")]
    SignatureMismatch(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// `Υ_c̄ ⊢ lhs ≈C rhs`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgement {
    pub ctx: Context,
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {} = {}", self.ctx, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    Aligned,
    Swapped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    AtomRefl,
    /// The side condition `π'⁻¹ ∘ π ∈ group`.
    Var { witness: Permutation, group: GroupSpec },
    Fun,
    FunC(Pairing),
    AbsSame,
    /// Records the generated name.
    AbsDiff { fresh: Atom },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::AtomRefl => "atom",
            Rule::Var { .. } => "var",
            Rule::Fun => "f",
            Rule::FunC(Pairing::Aligned) => "fC-aligned",
            Rule::FunC(Pairing::Swapped) => "fC-swapped",
            Rule::AbsSame => "[a]",
            Rule::AbsDiff { .. } => "ab",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub rule: Rule,
    pub premises: Vec<ProofTree>,
    pub conclusion: Judgement,
}

impl ProofTree {
    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule.name()];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut node = json!({
            "rule": self.rule.name(),
            "conclusion": self.conclusion.to_string(),
            "premises": self.premises.iter().map(ProofTree::to_json).collect::<Vec<_>>(),
        });
        match &self.rule {
            Rule::AbsDiff { fresh } => node["fresh"] = json!(fresh.to_string()),
            Rule::Var { witness, group } => {
                node["side"] = json!(format!("{witness} in {group}"));
            }
            _ => {}
        }
        node
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        write!(f, "{:indent$}({}) {}", "", self.rule.name(), self.conclusion, indent = depth * 2)?;
        match &self.rule {
            Rule::AbsDiff { fresh } => write!(f, "  [fresh {fresh}]")?,
            Rule::Var { witness, group } => write!(f, "  [{witness} in {group}]")?,
            _ => {}
        }
        writeln!(f)?;
        for p in &self.premises {
            p.write_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

/// Checker configuration. `group_cap` bounds the size of enumerated
/// fix-part groups.
#[derive(Debug, Clone, Copy)]
pub struct Checker {
    pub group_cap: usize,
}

impl Default for Checker {
    fn default() -> Self {
        Checker {
            group_cap: DEFAULT_GROUP_CAP,
        }
    }
}

#[allow(clippy::large_enum_variant)]
enum Outcome {
    No,
    Yes(Option<ProofTree>),
}

impl Checker {
    pub fn with_group_cap(group_cap: usize) -> Self {
        Checker { group_cap }
    }

    pub fn check(&self, ctx: &Context, s: &Term, t: &Term) -> Result<bool, EquivError> {
        let ctx = ctx.normalize();
        Ok(matches!(self.derive(&ctx, s, t, false)?, Outcome::Yes(_)))
    }

    /// Returns the proof tree when the judgement is derivable.
    pub fn prove(&self, ctx: &Context, s: &Term, t: &Term) -> Result<Option<ProofTree>, EquivError> {
        let ctx = ctx.normalize();
        Ok(match self.derive(&ctx, s, t, true)? {
            Outcome::Yes(tree) => tree,
            Outcome::No => None,
        })
    }

    /// `check(ctx, ρ·s, ρ·t)`
    pub fn check_equivariant(&self, ctx: &Context, rho: &Permutation, s: &Term, t: &Term) -> Result<bool, EquivError> {
        self.check(ctx, &s.act(rho), &t.act(rho))
    }

    /// `Υ ⊢ π fix t`
    pub fn entails(&self, ctx: &Context, p: &Permutation, t: &Term) -> Result<bool, EquivError> {
        self.check(ctx, &t.act(p), t)
    }

    fn derive(&self, ctx: &Context, s: &Term, t: &Term, proof: bool) -> Result<Outcome, EquivError> {
        let node = |rule: Rule, premises: Vec<ProofTree>| {
            proof.then(|| ProofTree {
                rule,
                premises,
                conclusion: Judgement {
                    ctx: ctx.clone(),
                    lhs: s.clone(),
                    rhs: t.clone(),
                },
            })
        };
        match (s, t) {
            (Term::Atom(a), Term::Atom(b)) => Ok(if a == b {
                Outcome::Yes(node(Rule::AtomRefl, vec![]))
            } else {
                Outcome::No
            }),
            (Term::Susp(p, x), Term::Susp(q, y)) if x == y => {
                let witness = q.inverse().compose(p);
                let group = ctx.membership_group(x)?;
                if coset_product_member(&witness, &group, self.group_cap)? {
                    Ok(Outcome::Yes(node(Rule::Var { witness, group }, vec![])))
                } else {
                    Ok(Outcome::No)
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f.name() != g.name() || xs.len() != ys.len() {
                    return Ok(Outcome::No);
                }
                if f.theory() != g.theory() {
                    return Err(EquivError::SignatureMismatch(format!(
                        "`{}` used with two different theories",
                        f.name()
                    )));
                }
                if f.is_commutative() {
                    if xs.len() != 2 {
                        return Err(EquivError::SignatureMismatch(format!(
                            "commutative `{}` applied to {} arguments",
                            f.name(),
                            xs.len()
                        )));
                    }
                    for (pairing, (l, r)) in [
                        (Pairing::Aligned, (&ys[0], &ys[1])),
                        (Pairing::Swapped, (&ys[1], &ys[0])),
                    ] {
                        if let Some(premises) = self.all(ctx, [(&xs[0], l), (&xs[1], r)], proof)? {
                            return Ok(Outcome::Yes(node(Rule::FunC(pairing), premises)));
                        }
                    }
                    Ok(Outcome::No)
                } else {
                    match self.all(ctx, xs.iter().zip(ys), proof)? {
                        Some(premises) => Ok(Outcome::Yes(node(Rule::Fun, premises))),
                        None => Ok(Outcome::No),
                    }
                }
            }
            (Term::Abs(a, body_s), Term::Abs(b, body_t)) if a == b => {
                match self.derive(ctx, body_s, body_t, proof)? {
                    Outcome::Yes(p) => Ok(Outcome::Yes(node(Rule::AbsSame, p.into_iter().collect()))),
                    Outcome::No => Ok(Outcome::No),
                }
            }
            (Term::Abs(a, body_s), Term::Abs(b, body_t)) => {
                let mut avoid: BTreeSet<Atom> = ctx.atoms();
                s.collect_atoms(&mut avoid);
                t.collect_atoms(&mut avoid);
                let c1 = fresh_atom(&avoid);
                let inner = ctx.clone().with_nu(c1.clone());
                let ls = body_s.act(&Permutation::swap(a.clone(), c1.clone()));
                let rs = body_t.act(&Permutation::swap(b.clone(), c1.clone()));
                match self.derive(&inner, &ls, &rs, proof)? {
                    Outcome::Yes(p) => Ok(Outcome::Yes(node(
                        Rule::AbsDiff { fresh: c1 },
                        p.into_iter().collect(),
                    ))),
                    Outcome::No => Ok(Outcome::No),
                }
            }
            _ => Ok(Outcome::No),
        }
    }

    fn all<'a>(
        &self,
        ctx: &Context,
        pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>,
        proof: bool,
    ) -> Result<Option<Vec<ProofTree>>, EquivError> {
        let mut premises = Vec::new();
        for (l, r) in pairs {
            match self.derive(ctx, l, r, proof)? {
                Outcome::Yes(p) => premises.extend(p),
                Outcome::No => return Ok(None),
            }
        }
        Ok(Some(premises))
    }
}

/// `check` with the default group cap.
pub fn check(ctx: &Context, s: &Term, t: &Term) -> Result<bool, EquivError> {
    Checker::default().check(ctx, s, t)
}

pub fn prove(ctx: &Context, s: &Term, t: &Term) -> Result<Option<ProofTree>, EquivError> {
    Checker::default().prove(ctx, s, t)
}

pub fn check_equivariant(ctx: &Context, rho: &Permutation, s: &Term, t: &Term) -> Result<bool, EquivError> {
    Checker::default().check_equivariant(ctx, rho, s, t)
}
