use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("cycle ({0}) mentions atom `{1}` more than once")]
    RepeatedAtom(String, Atom),
    #[error("a cycle needs at least two atoms")]
    ShortCycle,
}

/// A finite permutation of atoms in canonical disjoint-cycle form.
///
/// Cycles are sorted by their least atom and each cycle is rotated so that
/// its least atom comes first. Fixed atoms are never stored, so two
/// permutations are equal as functions iff their representations are equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    cycles: Vec<Vec<Atom>>,
}

impl Permutation {
    pub fn id() -> Self {
        Permutation { cycles: Vec::new() }
    }

    pub fn swap(a: Atom, b: Atom) -> Self {
        if a == b {
            return Self::id();
        }
        Self::canonical(vec![vec![a, b]])
    }

    /// A single cycle `(x1 x2 ... xn)` sending each atom to its successor.
    pub fn cycle(atoms: Vec<Atom>) -> Result<Self, PermError> {
        Self::check_cycle(&atoms)?;
        Ok(Self::canonical(vec![atoms]))
    }

    /// The product `c1 ∘ c2 ∘ ... ∘ cn` of the given cycles (rightmost applied
    /// first). Cycles may overlap.
    pub fn from_cycles(cycles: Vec<Vec<Atom>>) -> Result<Self, PermError> {
        let mut acc = Self::id();
        for c in cycles.into_iter().rev() {
            Self::check_cycle(&c)?;
            acc = Self::canonical(vec![c]).compose(&acc);
        }
        Ok(acc)
    }

    fn check_cycle(atoms: &[Atom]) -> Result<(), PermError> {
        if atoms.len() < 2 {
            return Err(PermError::ShortCycle);
        }
        let mut seen = BTreeSet::new();
        for a in atoms {
            if !seen.insert(a) {
                let shown: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
                return Err(PermError::RepeatedAtom(shown.join(" "), a.clone()));
            }
        }
        Ok(())
    }

    /// Builds from pairwise disjoint cycles, normalising rotation and order.
    fn canonical(mut cycles: Vec<Vec<Atom>>) -> Self {
        cycles.retain(|c| c.len() > 1);
        for c in &mut cycles {
            let min = c
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.cmp(y.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            c.rotate_left(min);
        }
        cycles.sort();
        Permutation { cycles }
    }

    /// Builds the canonical form of a bijection given as a finite map.
    /// Entries `a ↦ a` are ignored.
    pub(crate) fn from_map(map: &BTreeMap<Atom, Atom>) -> Self {
        let mut seen = BTreeSet::new();
        let mut cycles = Vec::new();
        for start in map.keys() {
            if seen.contains(start) || map[start] == *start {
                continue;
            }
            let mut cycle = vec![start.clone()];
            seen.insert(start.clone());
            let mut next = map[start].clone();
            while next != *start {
                seen.insert(next.clone());
                cycle.push(next.clone());
                next = map.get(&next).cloned().unwrap_or_else(|| start.clone());
            }
            cycles.push(cycle);
        }
        // keys are visited in order, so every cycle already starts at its least atom
        cycles.sort();
        Permutation { cycles }
    }

    pub fn to_map(&self) -> BTreeMap<Atom, Atom> {
        let mut map = BTreeMap::new();
        for c in &self.cycles {
            for (i, a) in c.iter().enumerate() {
                map.insert(a.clone(), c[(i + 1) % c.len()].clone());
            }
        }
        map
    }

    pub fn cycles(&self) -> &[Vec<Atom>] {
        &self.cycles
    }

    /// The cycles as individual permutations, in canonical order.
    pub fn cycle_factors(&self) -> impl Iterator<Item = Permutation> + '_ {
        self.cycles.iter().map(|c| Permutation {
            cycles: vec![c.clone()],
        })
    }

    pub fn is_id(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        for c in &self.cycles {
            if let Some(i) = c.iter().position(|x| x == a) {
                return c[(i + 1) % c.len()].clone();
            }
        }
        a.clone()
    }

    pub fn moves(&self, a: &Atom) -> bool {
        self.cycles.iter().any(|c| c.contains(a))
    }

    /// `dom(π) = {a | π(a) ≠ a}`
    pub fn domain(&self) -> BTreeSet<Atom> {
        self.cycles.iter().flatten().cloned().collect()
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        if other.is_id() {
            return self.clone();
        }
        if self.is_id() {
            return other.clone();
        }
        let mut map = BTreeMap::new();
        for a in self.domain().into_iter().chain(other.domain()) {
            let image = self.apply(&other.apply(&a));
            map.insert(a, image);
        }
        Self::from_map(&map)
    }

    pub fn inverse(&self) -> Permutation {
        let cycles = self
            .cycles
            .iter()
            .map(|c| {
                let mut r = c.clone();
                r[1..].reverse();
                r
            })
            .collect();
        Self::canonical(cycles)
    }

    /// The conjugate `ρ ∘ self ∘ ρ⁻¹`, i.e. `self` with its cycle atoms
    /// relabelled through `ρ`.
    pub fn conjugate(&self, rho: &Permutation) -> Permutation {
        let cycles = self
            .cycles
            .iter()
            .map(|c| c.iter().map(|a| rho.apply(a)).collect())
            .collect();
        Self::canonical(cycles)
    }

    pub fn pow(&self, n: u32) -> Permutation {
        (0..n).fold(Permutation::id(), |acc, _| acc.compose(self))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_id() {
            return f.write_str("id");
        }
        for c in &self.cycles {
            f.write_str("(")?;
            for (i, a) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}
