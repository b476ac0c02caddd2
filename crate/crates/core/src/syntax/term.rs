use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{Atom, Permutation, Substitution, Variable};

/// Equational theory attached to a term-former.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Theory {
    #[default]
    Empty,
    /// `f(x, y) = f(y, x)`
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    theory: Theory,
}

impl Symbol {
    pub fn new(name: &str, theory: Theory) -> Self {
        Symbol {
            name: Arc::from(name),
            theory,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn is_commutative(&self) -> bool {
        self.theory == Theory::C
    }
}

/// Nominal terms: `a | π·X | f(t1, ..., tn) | [a]t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Atom(Atom),
    Susp(Permutation, Variable),
    App(Symbol, Vec<Term>),
    Abs(Atom, Box<Term>),
}

impl Term {
    pub fn atom(a: Atom) -> Term {
        Term::Atom(a)
    }

    /// The bare variable, i.e. the identity suspension.
    pub fn var(x: Variable) -> Term {
        Term::Susp(Permutation::id(), x)
    }

    pub fn susp(p: Permutation, x: Variable) -> Term {
        Term::Susp(p, x)
    }

    pub fn app(f: Symbol, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    pub fn abs(a: Atom, body: Term) -> Term {
        Term::Abs(a, Box::new(body))
    }

    /// `π·t`, pushed homomorphically down to atoms and suspensions.
    pub fn act(&self, p: &Permutation) -> Term {
        if p.is_id() {
            return self.clone();
        }
        match self {
            Term::Atom(a) => Term::Atom(p.apply(a)),
            Term::Susp(q, x) => Term::Susp(p.compose(q), x.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|t| t.act(p)).collect()),
            Term::Abs(a, body) => Term::Abs(p.apply(a), Box::new(body.act(p))),
        }
    }

    pub fn subst(&self, s: &Substitution) -> Term {
        s.apply(self)
    }

    /// `|a| = |π·X| = 1`, `|f(t1..tn)| = 1 + Σ|ti|`, `|[a]t| = 1 + |t|`.
    pub fn size(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Susp(..) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Abs(_, body) => 1 + body.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Susp(..) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Abs(_, body) => 1 + body.depth(),
        }
    }

    /// Every atom occurring in the term, including binders and atoms in
    /// suspension permutations.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Term::Atom(a) => {
                out.insert(a.clone());
            }
            Term::Susp(p, _) => out.extend(p.domain()),
            Term::App(_, args) => args.iter().for_each(|t| t.collect_atoms(out)),
            Term::Abs(a, body) => {
                out.insert(a.clone());
                body.collect_atoms(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Atom(_) => {}
            Term::Susp(_, x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Term::Abs(_, body) => body.collect_vars(out),
        }
    }

    pub fn mentions_var(&self, x: &Variable) -> bool {
        match self {
            Term::Atom(_) => false,
            Term::Susp(_, y) => y == x,
            Term::App(_, args) => args.iter().any(|t| t.mentions_var(x)),
            Term::Abs(_, body) => body.mentions_var(x),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Atom(_) => true,
            Term::Susp(..) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
            Term::Abs(_, body) => body.is_ground(),
        }
    }

    /// Number of applications of commutative symbols.
    pub fn commutative_occurrences(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Susp(..) => 0,
            Term::App(f, args) => {
                usize::from(f.is_commutative())
                    + args.iter().map(Term::commutative_occurrences).sum::<usize>()
            }
            Term::Abs(_, body) => body.commutative_occurrences(),
        }
    }

    pub fn as_susp(&self) -> Option<(&Permutation, &Variable)> {
        match self {
            Term::Susp(p, x) => Some((p, x)),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => write!(f, "{a}"),
            Term::Susp(p, x) if p.is_id() => write!(f, "{x}"),
            Term::Susp(p, x) => write!(f, "{p}.{x}"),
            Term::App(s, args) if args.is_empty() => f.write_str(s.name()),
            Term::App(s, args) => {
                write!(f, "{}(", s.name())?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Term::Abs(a, body) => write!(f, "[{a}]{body}"),
        }
    }
}
