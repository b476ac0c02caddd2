//! Atoms, variables, permutations and nominal terms.

mod perm;
mod subst;
mod term;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use perm::{PermError, Permutation};
pub use subst::Substitution;
pub use term::{Symbol, Term, Theory};

/// An object-level name such as `a`, `b` or `c1`.
///
/// Atoms are ordered by family and then by index, with the unindexed atom of a
/// family (`c`) before all indexed ones (`c0`, `c1`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    family: Arc<str>,
    index: Option<u32>,
}

impl Atom {
    pub fn new(family: &str, index: Option<u32>) -> Self {
        Atom {
            family: Arc::from(family),
            index,
        }
    }

    /// Splits `c12` into family `c` and index `12`. Returns `None` unless the
    /// text is lowercase letters followed by optional digits.
    pub fn parse(text: &str) -> Option<Self> {
        let split = text
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(text.len());
        let (family, digits) = text.split_at(split);
        if family.is_empty() || !family.chars().all(|c| c.is_ascii_lowercase()) {
            return None;
        }
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let index = if digits.is_empty() {
            None
        } else {
            Some(digits.parse().ok()?)
        };
        Some(Atom::new(family, index))
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn index(&self) -> Option<u32> {
        self.index
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}{}", self.family, i),
            None => f.write_str(&self.family),
        }
    }
}

/// Family used for every generated name.
pub const FRESH_FAMILY: &str = "c";

/// Least atom of the fresh family whose index is above every index of that
/// family among `avoid`. The unindexed atom `c` counts as index 0.
pub fn fresh_atom<'a>(avoid: impl IntoIterator<Item = &'a Atom>) -> Atom {
    let top = avoid
        .into_iter()
        .filter(|a| a.family() == FRESH_FAMILY)
        .map(|a| a.index().unwrap_or(0))
        .max()
        .unwrap_or(0);
    Atom::new(FRESH_FAMILY, Some(top + 1))
}

/// A meta-level unknown such as `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Self {
        Variable(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` is declared commutative but has arity {1}, expected 2")]
    CommutativeArity(String, usize),
    #[error("symbol `{0}` is not declared")]
    Undeclared(String),
    #[error("symbol `{name}` expects {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` is used with a different theory than declared")]
    Theory(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolDecl {
    pub arity: usize,
    pub theory: Theory,
}

/// Declared term-formers with their arity and equational theory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    entries: BTreeMap<String, SymbolDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, arity: usize, theory: Theory) -> Result<Symbol, SignatureError> {
        if theory == Theory::C && arity != 2 {
            return Err(SignatureError::CommutativeArity(name.to_string(), arity));
        }
        self.entries
            .insert(name.to_string(), SymbolDecl { arity, theory });
        Ok(Symbol::new(name, theory))
    }

    pub fn with(mut self, name: &str, arity: usize, theory: Theory) -> Result<Self, SignatureError> {
        self.declare(name, arity, theory)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<SymbolDecl> {
        self.entries.get(name).copied()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.get(name).map(|d| Symbol::new(name, d.theory))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, SymbolDecl)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks that every application in `t` uses a declared symbol with the
    /// declared arity and theory.
    pub fn check_term(&self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Atom(_) | Term::Susp(..) => Ok(()),
            Term::Abs(_, body) => self.check_term(body),
            Term::App(sym, args) => {
                let decl = self
                    .get(sym.name())
                    .ok_or_else(|| SignatureError::Undeclared(sym.name().to_string()))?;
                if decl.arity != args.len() {
                    return Err(SignatureError::Arity {
                        name: sym.name().to_string(),
                        expected: decl.arity,
                        found: args.len(),
                    });
                }
                if decl.theory != sym.theory() {
                    return Err(SignatureError::Theory(sym.name().to_string()));
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }
}
