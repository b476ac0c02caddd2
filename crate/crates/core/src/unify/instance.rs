//! The instantiation order on solutions and a bounded search for witnesses.

use std::collections::{BTreeMap, BTreeSet};

use super::Solution;
use crate::equiv::Checker;
use crate::syntax::{Atom, Permutation, Substitution, Symbol, Term, Variable};

/// Decides `s1 ≼ s2` for the given `δ`: the ν-names of `s1` are among those
/// of `s2`, `Ψ2 ⊢ Ψ1δ`, and `Ψ2 ⊢ Xσ2 ≈C Xσ1δ` for every variable mentioned
/// by either solution or by `δ`.
pub fn check_instance(s1: &Solution, s2: &Solution, delta: &Substitution) -> bool {
    if !s1.nu().is_subset(s2.nu()) {
        return false;
    }
    let checker = Checker::default();
    let ctx = s2.ctx.normalize();
    for c in s1.ctx.constraints() {
        let image = delta.apply(&Term::var(c.var.clone()));
        if !matches!(checker.entails(&ctx, &c.perm, &image), Ok(true)) {
            return false;
        }
    }
    let mut vars = s1.vars();
    vars.extend(s2.vars());
    vars.extend(delta.domain().cloned());
    vars.iter().all(|x| {
        let t = Term::var(x.clone());
        let lhs = s2.subst.apply(&t);
        let rhs = delta.apply(&s1.subst.apply(&t));
        matches!(checker.check(&ctx, &lhs, &rhs), Ok(true))
    })
}

/// Budget on the number of partial assignments the search may examine.
const NODE_BUDGET: usize = 200_000;

enum Obligation {
    Fix(Permutation, Variable),
    /// `Ψ2 ⊢ target ≈C pattern δ`
    Eq { target: Term, pattern: Term },
}

impl Obligation {
    fn holds(&self, checker: &Checker, s2: &Solution, delta: &Substitution) -> bool {
        let ctx = &s2.ctx;
        match self {
            Obligation::Fix(p, x) => {
                let image = delta.apply(&Term::var(x.clone()));
                matches!(checker.entails(ctx, p, &image), Ok(true))
            }
            Obligation::Eq { target, pattern } => {
                matches!(checker.check(ctx, target, &delta.apply(pattern)), Ok(true))
            }
        }
    }

    fn vars(&self) -> BTreeSet<Variable> {
        match self {
            Obligation::Fix(_, x) => BTreeSet::from([x.clone()]),
            Obligation::Eq { pattern, .. } => pattern.vars(),
        }
    }
}

/// Searches for `δ` with `check_instance(s1, s2, δ)`.
///
/// Each variable is tried against, in order: the images suggested by
/// matching `Xσ1` against `Xσ2`, the variable itself, and every term of depth
/// at most `bound` built from the atoms, symbols, variables and permutations
/// occurring in the two solutions. The search is exhaustive within that space
/// unless it exceeds an internal node budget.
pub fn find_instance_witness(s1: &Solution, s2: &Solution, bound: usize) -> Option<Substitution> {
    if !s1.nu().is_subset(s2.nu()) {
        return None;
    }
    let s2 = Solution::new(s2.ctx.normalize(), s2.subst.clone());
    let checker = Checker::default();

    let mut vars = s1.vars();
    vars.extend(s2.vars());
    let mut obligations: Vec<Obligation> = s1
        .ctx
        .constraints()
        .map(|c| Obligation::Fix(c.perm.clone(), c.var.clone()))
        .collect();
    for x in &vars {
        let t = Term::var(x.clone());
        obligations.push(Obligation::Eq {
            target: s2.subst.apply(&t),
            pattern: s1.subst.apply(&t),
        });
    }

    let mut unknowns: BTreeSet<Variable> = BTreeSet::new();
    for o in &obligations {
        unknowns.extend(o.vars());
    }
    let order: Vec<Variable> = unknowns.into_iter().collect();
    let position: BTreeMap<&Variable, usize> = order.iter().enumerate().map(|(i, x)| (x, i)).collect();

    // obligations grouped by the index of their last unknown
    let mut due: Vec<Vec<&Obligation>> = vec![Vec::new(); order.len() + 1];
    for o in &obligations {
        let last = o.vars().iter().map(|x| position[x] + 1).max().unwrap_or(0);
        due[last].push(o);
    }
    if !due[0].iter().all(|o| o.holds(&checker, &s2, &Substitution::identity())) {
        return None;
    }

    let pool = Pool::of(s1, &s2).terms(bound);
    let candidates: Vec<Vec<Term>> = order
        .iter()
        .map(|x| {
            let mut out = Vec::new();
            for o in &obligations {
                if let Obligation::Eq { target, pattern } = o {
                    suggest(pattern, target, x, &mut out);
                }
            }
            out.push(Term::var(x.clone()));
            out.extend(pool.iter().cloned());
            let mut seen = BTreeSet::new();
            out.retain(|t| seen.insert(t.clone()));
            out
        })
        .collect();

    let mut search = Search {
        checker,
        s2: &s2,
        order: &order,
        due: &due,
        candidates: &candidates,
        nodes: 0,
    };
    let mut delta = Substitution::identity();
    if search.assign(0, &mut delta) {
        Some(delta.with_nu(s2.nu().iter().cloned()))
    } else {
        None
    }
}

struct Search<'a> {
    checker: Checker,
    s2: &'a Solution,
    order: &'a [Variable],
    due: &'a [Vec<&'a Obligation>],
    candidates: &'a [Vec<Term>],
    nodes: usize,
}

impl Search<'_> {
    fn assign(&mut self, i: usize, delta: &mut Substitution) -> bool {
        if i == self.order.len() {
            return true;
        }
        let x = &self.order[i];
        for t in &self.candidates[i] {
            self.nodes += 1;
            if self.nodes > NODE_BUDGET {
                return false;
            }
            delta.bind(x.clone(), t.clone());
            if self.due[i + 1].iter().all(|o| o.holds(&self.checker, self.s2, delta)) && self.assign(i + 1, delta) {
                return true;
            }
        }
        delta.bind(x.clone(), Term::var(x.clone()));
        false
    }
}

/// Images for `x` read off by matching `pattern` against `target`.
fn suggest(pattern: &Term, target: &Term, x: &Variable, out: &mut Vec<Term>) {
    match (pattern, target) {
        (Term::Susp(p, y), _) if y == x => out.push(target.act(&p.inverse())),
        (Term::App(f, ps), Term::App(g, ts)) if f.name() == g.name() && ps.len() == ts.len() => {
            for (p, t) in ps.iter().zip(ts) {
                suggest(p, t, x, out);
            }
            if f.is_commutative() && ps.len() == 2 {
                suggest(&ps[0], &ts[1], x, out);
                suggest(&ps[1], &ts[0], x, out);
            }
        }
        (Term::Abs(a, p), Term::Abs(b, t)) => {
            if a == b {
                suggest(p, t, x, out);
            } else {
                suggest(p, &t.act(&Permutation::swap(a.clone(), b.clone())), x, out);
            }
        }
        _ => {}
    }
}

/// Ingredients of the generic candidate terms.
struct Pool {
    atoms: BTreeSet<Atom>,
    symbols: BTreeMap<(Symbol, usize), ()>,
    vars: BTreeSet<Variable>,
    perms: BTreeSet<Permutation>,
}

impl Pool {
    fn of(s1: &Solution, s2: &Solution) -> Pool {
        let mut pool = Pool {
            atoms: BTreeSet::new(),
            symbols: BTreeMap::new(),
            vars: BTreeSet::new(),
            perms: BTreeSet::from([Permutation::id()]),
        };
        for s in [s1, s2] {
            pool.atoms.extend(s.ctx.atoms());
            pool.atoms.extend(s.subst.image_atoms());
            pool.vars.extend(s.vars());
            for c in s.ctx.constraints() {
                pool.perms.insert(c.perm.clone());
                pool.perms.insert(c.perm.inverse());
            }
            for (_, t) in s.subst.bindings() {
                pool.scan(t);
            }
        }
        pool
    }

    fn scan(&mut self, t: &Term) {
        match t {
            Term::Atom(_) => {}
            Term::Susp(p, _) => {
                self.perms.insert(p.clone());
                self.perms.insert(p.inverse());
            }
            Term::App(f, args) => {
                self.symbols.insert((f.clone(), args.len()), ());
                args.iter().for_each(|a| self.scan(a));
            }
            Term::Abs(_, body) => self.scan(body),
        }
    }

    /// All terms of depth at most `bound`, shallowest first.
    fn terms(&self, bound: usize) -> Vec<Term> {
        if bound == 0 {
            return Vec::new();
        }
        let mut layers: Vec<Vec<Term>> = Vec::new();
        let mut leaves: Vec<Term> = self.atoms.iter().cloned().map(Term::atom).collect();
        for x in &self.vars {
            for p in &self.perms {
                leaves.push(Term::susp(p.clone(), x.clone()));
            }
        }
        for (f, n) in self.symbols.keys() {
            if *n == 0 {
                leaves.push(Term::app(f.clone(), vec![]));
            }
        }
        layers.push(leaves);
        for depth in 2..=bound {
            let below: Vec<Term> = layers.iter().flatten().cloned().collect();
            let newest = &layers[depth - 2];
            let mut layer = Vec::new();
            for (f, n) in self.symbols.keys() {
                if *n == 0 {
                    continue;
                }
                for args in tuples(&below, *n) {
                    // at least one argument from the previous layer
                    if args.iter().any(|a| newest.contains(a)) {
                        layer.push(Term::app(f.clone(), args));
                    }
                }
            }
            for a in &self.atoms {
                for t in newest {
                    layer.push(Term::abs(a.clone(), t.clone()));
                }
            }
            layers.push(layer);
        }
        layers.into_iter().flatten().collect()
    }
}

fn tuples(items: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for t in items {
                let mut v = prefix.clone();
                v.push(t.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}
