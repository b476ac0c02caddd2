//! Cycle classification relative to ν-quantified atoms, and membership in
//! the groups `⟨S⟩` and `Perm(A) ∘ ⟨K⟩` used by the variable rule.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::syntax::{Atom, Permutation};

/// Element budget used when no other cap is configured.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generated group has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("fix generator {0} moves an atom of the fresh set")]
    SpecInvalid(Permutation),
}

/// `π = π_c̄ ∘ π_¬c̄`, the cycles of `π` that mention a quantified atom and
/// the ones that do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSplit {
    pub quantified: Permutation,
    pub unquantified: Permutation,
}

pub fn split(p: &Permutation, quantified: &BTreeSet<Atom>) -> CycleSplit {
    let (q, u): (Vec<_>, Vec<_>) = p
        .cycles()
        .iter()
        .cloned()
        .partition(|c| c.iter().any(|a| quantified.contains(a)));
    // disjoint cycles, so the product never fails
    CycleSplit {
        quantified: Permutation::from_cycles(q).expect("cycles of a permutation"),
        unquantified: Permutation::from_cycles(u).expect("cycles of a permutation"),
    }
}

/// Describes `Perm(fresh_atoms) ∘ ⟨fix_generators⟩`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupSpec {
    pub fresh_atoms: BTreeSet<Atom>,
    pub fix_generators: Vec<Permutation>,
}

impl GroupSpec {
    pub fn validate(&self) -> Result<(), GroupError> {
        for g in &self.fix_generators {
            if g.cycles().iter().flatten().any(|a| self.fresh_atoms.contains(a)) {
                return Err(GroupError::SpecInvalid(g.clone()));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fresh: Vec<String> = self.fresh_atoms.iter().map(|a| a.to_string()).collect();
        let gens: Vec<String> = self.fix_generators.iter().map(|g| g.to_string()).collect();
        write!(f, "Perm{{{}}}∘⟨{}⟩", fresh.join(","), gens.join(","))
    }
}

/// Every element of a finite permutation group, stored as image arrays over
/// the union of the generator domains.
struct Closure {
    atoms: Vec<Atom>,
    elements: HashSet<Box<[u16]>>,
}

impl Closure {
    fn build(gens: &[Permutation], cap: usize) -> Result<Closure, GroupError> {
        let atoms: Vec<Atom> = gens
            .iter()
            .flat_map(|g| g.domain())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&Atom, u16> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a, i as u16))
            .collect();
        let images: Vec<Vec<u16>> = gens
            .iter()
            .map(|g| atoms.iter().map(|a| index[&g.apply(a)]).collect())
            .collect();

        let id: Box<[u16]> = (0..atoms.len() as u16).collect();
        let mut elements = HashSet::new();
        let mut queue = VecDeque::new();
        elements.insert(id.clone());
        queue.push_back(id);
        while let Some(e) = queue.pop_front() {
            for g in &images {
                let next: Box<[u16]> = e.iter().map(|&i| g[i as usize]).collect();
                if !elements.contains(&next) {
                    if elements.len() >= cap {
                        return Err(GroupError::CapExceeded { cap });
                    }
                    elements.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(Closure { atoms, elements })
    }

    fn contains(&self, p: &Permutation) -> bool {
        let mut image = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let b = p.apply(a);
            match self.atoms.binary_search(&b) {
                Ok(i) => image.push(i as u16),
                Err(_) => return false,
            }
        }
        self.elements.contains(image.as_slice())
    }
}

const MEMO_LIMIT: usize = 4096;

fn memo() -> &'static Mutex<HashMap<Vec<Permutation>, Arc<Closure>>> {
    static MEMO: OnceLock<Mutex<HashMap<Vec<Permutation>, Arc<Closure>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn closure_of(gens: Vec<Permutation>, cap: usize) -> Result<Arc<Closure>, GroupError> {
    if let Some(c) = memo().lock().unwrap().get(&gens).cloned() {
        if c.elements.len() > cap {
            return Err(GroupError::CapExceeded { cap });
        }
        return Ok(c);
    }
    let closure = Arc::new(Closure::build(&gens, cap)?);
    let mut table = memo().lock().unwrap();
    if table.len() >= MEMO_LIMIT {
        table.clear();
    }
    table.insert(gens, closure.clone());
    Ok(closure)
}

/// Decides `p ∈ ⟨gens⟩` by enumerating the generated group.
///
/// Fails with [`GroupError::CapExceeded`] when the group has more than `cap`
/// elements.
pub fn subgroup_member(p: &Permutation, gens: &[Permutation], cap: usize) -> Result<bool, GroupError> {
    if p.is_id() {
        return Ok(true);
    }
    let mut key: Vec<Permutation> = gens.iter().filter(|g| !g.is_id()).cloned().collect();
    key.sort();
    key.dedup();
    let support: BTreeSet<Atom> = key.iter().flat_map(|g| g.domain()).collect();
    if !p.domain().is_subset(&support) {
        return Ok(false);
    }
    Ok(closure_of(key, cap)?.contains(p))
}

/// Decides `p ∈ Perm(A) ∘ ⟨K⟩` for a spec whose generators avoid `A`.
///
/// Every cycle of `p` must lie inside `A` or outside it; the cycles outside
/// must form an element of `⟨K⟩`.
pub fn coset_product_member(p: &Permutation, spec: &GroupSpec, cap: usize) -> Result<bool, GroupError> {
    spec.validate()?;
    let mut outside = Vec::new();
    for c in p.cycles() {
        let inside = c.iter().filter(|a| spec.fresh_atoms.contains(*a)).count();
        if inside == 0 {
            outside.push(c.clone());
        } else if inside != c.len() {
            return Ok(false);
        }
    }
    let rest = Permutation::from_cycles(outside).expect("cycles of a permutation");
    subgroup_member(&rest, &spec.fix_generators, cap)
}
