use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Atom, Term, Variable};

/// A finite map from variables to terms, together with the ν-quantified
/// names that may occur in its image.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<Variable, Term>,
    nu: BTreeSet<Atom>,
}

impl Substitution {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(x: Variable, t: Term) -> Self {
        let mut s = Self::identity();
        s.bind(x, t);
        s
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (Variable, Term)>) -> Self {
        let mut s = Self::identity();
        for (x, t) in bindings {
            s.bind(x, t);
        }
        s
    }

    /// Adds or replaces a binding. `X ↦ X` is dropped.
    pub fn bind(&mut self, x: Variable, t: Term) {
        if matches!(&t, Term::Susp(p, y) if p.is_id() && *y == x) {
            self.map.remove(&x);
        } else {
            self.map.insert(x, t);
        }
    }

    pub fn with_nu(mut self, nu: impl IntoIterator<Item = Atom>) -> Self {
        self.nu.extend(nu);
        self
    }

    pub fn nu(&self) -> &BTreeSet<Atom> {
        &self.nu
    }

    pub fn get(&self, x: &Variable) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.map.keys()
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Homomorphic extension: `(π·X)σ = π·(Xσ)`.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Atom(_) => t.clone(),
            Term::Susp(p, x) => match self.map.get(x) {
                Some(image) => image.act(p),
                None => t.clone(),
            },
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
            Term::Abs(a, body) => Term::Abs(a.clone(), Box::new(self.apply(body))),
        }
    }

    /// The substitution `self` followed by `then`: `t(self.then(δ)) = (tσ)δ`.
    pub fn then(&self, next: &Substitution) -> Substitution {
        let mut map: BTreeMap<Variable, Term> = self
            .map
            .iter()
            .map(|(x, t)| (x.clone(), next.apply(t)))
            .collect();
        for (x, t) in &next.map {
            map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        let mut out = Substitution::identity();
        for (x, t) in map {
            out.bind(x, t);
        }
        out.nu = self.nu.union(&next.nu).cloned().collect();
        out
    }

    /// Keeps only the bindings of the given variables.
    pub fn restrict(&self, keep: &BTreeSet<Variable>) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(x, _)| keep.contains(*x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
            nu: self.nu.clone(),
        }
    }

    pub fn image_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_atoms(&mut out);
        }
        out
    }

    pub fn image_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return f.write_str("Id");
        }
        f.write_str("[")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("]")
    }
}
