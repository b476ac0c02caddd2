//! Seeded generators and brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nomc::context::{Context, FixConstraint};
use nomc::syntax::{Atom, Permutation, Signature, Symbol, Term, Theory, Variable};
use nomc::unify::{Constraint, UnificationProblem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn at(s: &str) -> Atom {
    Atom::parse(s).unwrap()
}

pub fn atoms(names: &str) -> Vec<Atom> {
    names.split_whitespace().map(at).collect()
}

pub fn vars(names: &str) -> Vec<Variable> {
    names.split_whitespace().map(Variable::new).collect()
}

pub fn perm(s: &str) -> Permutation {
    let cycles = s
        .split(')')
        .filter(|c| !c.trim().is_empty())
        .map(|c| c.trim().trim_start_matches('(').split_whitespace().map(at).collect())
        .collect();
    Permutation::from_cycles(cycles).unwrap()
}

/// A signature with one commutative symbol.
#[derive(Clone)]
pub struct Sig {
    pub symbols: Vec<(Symbol, usize)>,
}

impl Sig {
    /// `f:2 comm; g:1; k:2; o:0`
    pub fn standard() -> Self {
        Sig {
            symbols: vec![
                (Symbol::new("f", Theory::C), 2),
                (Symbol::new("g", Theory::Empty), 1),
                (Symbol::new("k", Theory::Empty), 2),
                (Symbol::new("o", Theory::Empty), 0),
            ],
        }
    }

    /// `f:1; g:2 comm`
    pub fn ground() -> Self {
        Sig {
            symbols: vec![(Symbol::new("f", Theory::Empty), 1), (Symbol::new("g", Theory::C), 2)],
        }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (f, n) in &self.symbols {
            sig.declare(f.name(), *n, f.theory()).unwrap();
        }
        sig
    }

    /// `f:2 comm; g:1`
    pub fn tiny() -> Self {
        Sig {
            symbols: vec![(Symbol::new("f", Theory::C), 2), (Symbol::new("g", Theory::Empty), 1)],
        }
    }
}

/// A random permutation of `pool`: a product of up to two random cycles.
pub fn random_perm(r: &mut Rand, pool: &[Atom]) -> Permutation {
    let mut p = Permutation::id();
    if pool.len() < 2 {
        return p;
    }
    for _ in 0..r.gen_range(0..=2) {
        let len = r.gen_range(2..=pool.len().min(3));
        let cycle: Vec<Atom> = pool.choose_multiple(r, len).cloned().collect();
        p = p.compose(&Permutation::cycle(cycle).unwrap());
    }
    p
}

pub struct TermGen<'a> {
    pub sig: &'a Sig,
    pub atoms: &'a [Atom],
    pub vars: &'a [Variable],
    /// Atoms that may appear in suspension permutations.
    pub perm_atoms: &'a [Atom],
}

impl TermGen<'_> {
    pub fn term(&self, r: &mut Rand, depth: usize) -> Term {
        let leaf = depth <= 1 || r.gen_bool(0.3);
        if leaf {
            let choice = r.gen_range(0..3);
            if choice == 0 && !self.vars.is_empty() {
                let x = self.vars.choose(r).unwrap().clone();
                let p = if r.gen_bool(0.5) {
                    Permutation::id()
                } else {
                    random_perm(r, self.perm_atoms)
                };
                return Term::susp(p, x);
            }
            if choice == 1 {
                let consts: Vec<&(Symbol, usize)> = self.sig.symbols.iter().filter(|(_, n)| *n == 0).collect();
                if let Some((f, _)) = consts.choose(r) {
                    return Term::app(f.clone(), vec![]);
                }
            }
            return Term::atom(self.atoms.choose(r).unwrap().clone());
        }
        if r.gen_bool(0.25) {
            let a = self.atoms.choose(r).unwrap().clone();
            return Term::abs(a, self.term(r, depth - 1));
        }
        let funs: Vec<&(Symbol, usize)> = self.sig.symbols.iter().filter(|(_, n)| *n > 0).collect();
        let (f, n) = funs.choose(r).unwrap();
        Term::app(f.clone(), (0..*n).map(|_| self.term(r, depth - 1)).collect())
    }
}

/// A context over `vars` whose permutations use `pool`, with ν-names `nu`.
pub fn random_context(r: &mut Rand, vars: &[Variable], pool: &[Atom], nu: &[Atom]) -> Context {
    let mut all: Vec<Atom> = pool.to_vec();
    all.extend(nu.iter().cloned());
    let mut ctx = Context::new(nu.iter().cloned(), []);
    for _ in 0..r.gen_range(0..=3) {
        let x = vars.choose(r).unwrap().clone();
        let src = if r.gen_bool(0.5) { &all } else { pool };
        ctx.insert(FixConstraint::new(random_perm(r, src), x));
    }
    ctx
}

/// Permutations that fix `X` according to the (normalised) context.
pub fn fixers(ctx: &Context, x: &Variable) -> Vec<Permutation> {
    let group = ctx.membership_group(x).unwrap();
    let mut out = group.fix_generators.clone();
    let fresh: Vec<Atom> = group.fresh_atoms.iter().cloned().collect();
    for i in 0..fresh.len() {
        for j in i + 1..fresh.len() {
            out.push(Permutation::swap(fresh[i].clone(), fresh[j].clone()));
        }
    }
    out
}

/// A term that the context should prove equal to `t`: commutative arguments
/// are swapped, binders renamed through unused ν-names, and suspensions
/// composed with permutations that fix their variable.
pub fn variant(r: &mut Rand, ctx: &Context, t: &Term) -> Term {
    let ctx = ctx.normalize();
    let mut spare: Vec<Atom> = ctx.nu().iter().filter(|c| !t.atoms().contains(*c)).cloned().collect();
    spare.shuffle(r);
    go(r, &ctx, t, &mut spare)
}

fn go(r: &mut Rand, ctx: &Context, t: &Term, spare: &mut Vec<Atom>) -> Term {
    match t {
        Term::Atom(_) => t.clone(),
        Term::Susp(p, x) => {
            let fs = fixers(ctx, x);
            match fs.choose(r) {
                Some(g) if r.gen_bool(0.7) => Term::susp(p.compose(g), x.clone()),
                _ => t.clone(),
            }
        }
        Term::App(f, args) => {
            let mut args: Vec<Term> = args.iter().map(|a| go(r, ctx, a, spare)).collect();
            if f.is_commutative() && r.gen_bool(0.5) {
                args.swap(0, 1);
            }
            Term::App(f.clone(), args)
        }
        Term::Abs(a, body) => {
            let body = go(r, ctx, body, spare);
            if r.gen_bool(0.5) {
                if let Some(b) = spare.pop() {
                    return Term::abs(b.clone(), body.act(&Permutation::swap(a.clone(), b)));
                }
            }
            Term::abs(a.clone(), body)
        }
    }
}

/// Random problem: at most three variables and six atoms, terms of depth at
/// most four, one commutative symbol. Half of the right-hand sides are
/// perturbations of the left-hand side, so that many problems are solvable.
pub fn random_problem(r: &mut Rand) -> UnificationProblem {
    let sig = Sig::standard();
    let all_atoms = atoms("a b d h m n");
    let n_atoms = r.gen_range(2..=6);
    let pool: Vec<Atom> = all_atoms[..n_atoms].to_vec();
    let all_vars = vars("X Y Z");
    let n_vars = r.gen_range(1..=3);
    let vs: Vec<Variable> = all_vars[..n_vars].to_vec();
    let gen = TermGen {
        sig: &sig,
        atoms: &pool,
        vars: &vs,
        perm_atoms: &pool,
    };
    let mut constraints = Vec::new();
    for _ in 0..r.gen_range(1..=2) {
        let depth = r.gen_range(1..=4);
        let s = gen.term(r, depth);
        let t = if r.gen_bool(0.5) {
            perturb(r, &gen, &s)
        } else {
            { let d = r.gen_range(1..=4); gen.term(r, d) }
        };
        constraints.push(Constraint::new(s, t));
    }
    UnificationProblem::new([], constraints)
}

/// Replaces random subterms by suspensions, swaps commutative arguments and
/// renames binders.
fn perturb(r: &mut Rand, gen: &TermGen<'_>, t: &Term) -> Term {
    if r.gen_bool(0.2) && !gen.vars.is_empty() {
        let x = gen.vars.choose(r).unwrap().clone();
        return Term::susp(random_perm(r, gen.perm_atoms), x);
    }
    match t {
        Term::App(f, args) => {
            let mut args: Vec<Term> = args.iter().map(|a| perturb(r, gen, a)).collect();
            if f.is_commutative() && r.gen_bool(0.5) {
                args.swap(0, 1);
            }
            Term::App(f.clone(), args)
        }
        Term::Abs(a, body) => {
            let b = if r.gen_bool(0.5) {
                gen.atoms.choose(r).unwrap().clone()
            } else {
                a.clone()
            };
            Term::abs(b.clone(), perturb(r, gen, &body.act(&Permutation::swap(a.clone(), b))))
        }
        _ => t.clone(),
    }
}

/// A tiny problem over `f:2 comm; g:1`, atoms `a b`, one or two variables.
pub fn tiny_problem(r: &mut Rand) -> UnificationProblem {
    let sig = Sig::tiny();
    let pool = atoms("a b");
    let vs: Vec<Variable> = vars("X Y")[..r.gen_range(1..=2)].to_vec();
    let gen = TermGen {
        sig: &sig,
        atoms: &pool,
        vars: &vs,
        perm_atoms: &pool,
    };
    let s = { let d = r.gen_range(1..=3); gen.term(r, d) };
    let t = perturb(r, &gen, &s);
    UnificationProblem::new([], [Constraint::new(s, t)])
}

/// Ground terms of depth at most `depth`.
pub fn ground_terms(sig: &Sig, pool: &[Atom], depth: usize) -> Vec<Term> {
    let mut layers: Vec<Vec<Term>> = vec![pool.iter().cloned().map(Term::atom).collect()];
    for (f, n) in &sig.symbols {
        if *n == 0 {
            layers[0].push(Term::app(f.clone(), vec![]));
        }
    }
    for d in 1..depth {
        let below: Vec<Term> = layers.iter().flatten().cloned().collect();
        let newest = layers[d - 1].clone();
        let mut layer = Vec::new();
        for (f, n) in &sig.symbols {
            match n {
                1 => layer.extend(newest.iter().map(|t| Term::app(f.clone(), vec![t.clone()]))),
                2 => {
                    for x in &below {
                        for y in &below {
                            if newest.contains(x) || newest.contains(y) {
                                layer.push(Term::app(f.clone(), vec![x.clone(), y.clone()]));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        for a in pool {
            layer.extend(newest.iter().map(|t| Term::abs(a.clone(), t.clone())));
        }
        layers.push(layer);
    }
    layers.into_iter().flatten().collect()
}

/// Every element of `⟨gens⟩`, by closure under composition.
pub fn brute_closure(gens: &[Permutation]) -> BTreeSet<Permutation> {
    let mut seen = BTreeSet::from([Permutation::id()]);
    let mut queue = VecDeque::from([Permutation::id()]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen
}

/// Every permutation of `pool`.
pub fn symmetric_group(pool: &[Atom]) -> BTreeSet<Permutation> {
    fn perms(items: &[Atom]) -> Vec<Vec<Atom>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in perms(&rest) {
                tail.insert(0, head.clone());
                out.push(tail);
            }
        }
        out
    }
    perms(pool)
        .into_iter()
        .map(|image| {
            let map: BTreeMap<Atom, Atom> = pool.iter().cloned().zip(image).collect();
            let mut seen = BTreeSet::new();
            let mut cycles = Vec::new();
            for a in pool {
                if seen.contains(a) || map[a] == *a {
                    continue;
                }
                let mut cycle = vec![a.clone()];
                seen.insert(a.clone());
                let mut b = map[a].clone();
                while b != *a {
                    seen.insert(b.clone());
                    cycle.push(b.clone());
                    b = map[&b].clone();
                }
                cycles.push(cycle);
            }
            Permutation::from_cycles(cycles).unwrap()
        })
        .collect()
}
