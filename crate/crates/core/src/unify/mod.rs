//! Rule-based C-unification: simplification to normal form, classification
//! of reduced constraints, and extraction of solutions.
//!
//! The most recently added constraint that is not reduced is selected first.
//! With the example `[a](X∧Y) =? [b](Y∧X)` this binds `Y` rather than `X` in
//! the aligned branch, which gives back the textbook solution verbatim.

mod instance;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::context::{Context, FixConstraint};
use crate::equiv::Pairing;
use crate::syntax::{fresh_atom, Atom, Permutation, Substitution, Term, Variable};

pub use instance::{check_instance, find_instance_witness};

/// `lhs ≈C? rhs`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub lhs: Term,
    pub rhs: Term,
}

impl Constraint {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Constraint { lhs, rhs }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }

    /// `π·X ≈? X` with `π ≠ id`.
    pub fn is_fixed_point(&self) -> bool {
        matches!(
            (&self.lhs, &self.rhs),
            (Term::Susp(p, x), Term::Susp(q, y)) if x == y && q.is_id() && !p.is_id()
        )
    }

    fn map(&self, f: impl Fn(&Term) -> Term) -> Constraint {
        Constraint::new(f(&self.lhs), f(&self.rhs))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =? {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    AtomClash,
    SymbolClash,
    ConstructorClash,
    Occurs,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::AtomClash => "AtomClash",
            Reason::SymbolClash => "SymbolClash",
            Reason::ConstructorClash => "ConstructorClash",
            Reason::Occurs => "Occurs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    ConsistentFixedPoint,
    Inconsistent(Reason),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("constraint `{0}` is not reduced")]
    NotReduced(Constraint),
}

/// The simplification rule applied by one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpRule {
    Del,
    Fun,
    FunC,
    Abs,
    Ab { fresh: Atom },
    Var,
    Inst1 { var: Variable, term: Term },
    Inst2 { var: Variable, term: Term },
}

impl SimpRule {
    pub fn name(&self) -> &'static str {
        match self {
            SimpRule::Del => "del",
            SimpRule::Fun => "f",
            SimpRule::FunC => "fC",
            SimpRule::Abs => "[a]",
            SimpRule::Ab { .. } => "ab",
            SimpRule::Var => "var",
            SimpRule::Inst1 { .. } => "inst1",
            SimpRule::Inst2 { .. } => "inst2",
        }
    }
}

impl fmt::Display for SimpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpRule::Ab { fresh } => write!(f, "ab [fresh {fresh}]"),
            SimpRule::Inst1 { var, term } | SimpRule::Inst2 { var, term } => {
                write!(f, "{} [{var} -> {term}]", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

enum Action {
    Rule(SimpRule),
    Reduced(Classification),
}

fn analyse(c: &Constraint) -> Action {
    use Action::*;
    let (s, t) = (&c.lhs, &c.rhs);
    if s == t {
        return Rule(SimpRule::Del);
    }
    match (s, t) {
        (Term::App(f, xs), Term::App(g, ys)) => {
            if f.name() != g.name() || xs.len() != ys.len() {
                Reduced(Classification::Inconsistent(Reason::SymbolClash))
            } else if f.is_commutative() && xs.len() == 2 {
                Rule(SimpRule::FunC)
            } else {
                Rule(SimpRule::Fun)
            }
        }
        (Term::Abs(a, _), Term::Abs(b, _)) if a == b => Rule(SimpRule::Abs),
        // the name is chosen when the step is taken
        (Term::Abs(..), Term::Abs(..)) => Rule(SimpRule::Ab {
            fresh: Atom::new(crate::syntax::FRESH_FAMILY, None),
        }),
        (Term::Susp(_, x), Term::Susp(q, y)) if x == y => {
            if q.is_id() {
                Reduced(Classification::ConsistentFixedPoint)
            } else {
                Rule(SimpRule::Var)
            }
        }
        (Term::Susp(p, x), _) if !t.mentions_var(x) => Rule(SimpRule::Inst1 {
            var: x.clone(),
            term: t.act(&p.inverse()),
        }),
        (_, Term::Susp(p, x)) if !s.mentions_var(x) => Rule(SimpRule::Inst2 {
            var: x.clone(),
            term: s.act(&p.inverse()),
        }),
        (Term::Susp(..), _) | (_, Term::Susp(..)) => Reduced(Classification::Inconsistent(Reason::Occurs)),
        (Term::Atom(_), Term::Atom(_)) => Reduced(Classification::Inconsistent(Reason::AtomClash)),
        _ => Reduced(Classification::Inconsistent(Reason::ConstructorClash)),
    }
}

/// Classifies a constraint to which no simplification rule applies.
pub fn classify_reduced(c: &Constraint) -> Result<Classification, UnifyError> {
    match analyse(c) {
        Action::Reduced(class) => Ok(class),
        Action::Rule(_) => Err(UnifyError::NotReduced(c.clone())),
    }
}

/// `[P] = (n, M)`: the number of distinct variables, and the multiset of
/// constraint sizes excluding fixed-point equations `π·X ≈? X` (`π ≠ id`).
///
/// The multiset is kept sorted in descending order, so the derived
/// lexicographic order on `(n, M)` is the multiset extension on `M`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProblemMeasure {
    pub var_count: usize,
    pub sizes: Vec<usize>,
}

impl fmt::Display for ProblemMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "({}, {{{}}})", self.var_count, sizes.join(", "))
    }
}

/// `ν c̄. Pr`, together with the bindings made so far on this branch.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnificationProblem {
    nu: BTreeSet<Atom>,
    constraints: Vec<Constraint>,
    pending: Vec<(Variable, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Normal,
    Branches {
        rule: SimpRule,
        selected: Constraint,
        problems: Vec<UnificationProblem>,
    },
}

impl UnificationProblem {
    pub fn new(nu: impl IntoIterator<Item = Atom>, constraints: impl IntoIterator<Item = Constraint>) -> Self {
        let mut p = UnificationProblem {
            nu: nu.into_iter().collect(),
            ..Default::default()
        };
        for c in constraints {
            p.push(c);
        }
        p
    }

    pub fn nu(&self) -> &BTreeSet<Atom> {
        &self.nu
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Bindings in the order they were made.
    pub fn pending(&self) -> &[(Variable, Term)] {
        &self.pending
    }

    /// Composition of the pending bindings, first binding applied first.
    pub fn pending_subst(&self) -> Substitution {
        self.pending
            .iter()
            .fold(Substitution::identity(), |acc, (x, t)| {
                acc.then(&Substitution::single(x.clone(), t.clone()))
            })
            .with_nu(self.nu.iter().cloned())
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            c.lhs.collect_vars(&mut out);
            c.rhs.collect_vars(&mut out);
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.nu.clone();
        for c in &self.constraints {
            c.lhs.collect_atoms(&mut out);
            c.rhs.collect_atoms(&mut out);
        }
        for (_, t) in &self.pending {
            t.collect_atoms(&mut out);
        }
        out
    }

    /// Number of commutative symbol occurrences in the constraints.
    pub fn commutative_occurrences(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.lhs.commutative_occurrences() + c.rhs.commutative_occurrences())
            .sum()
    }

    pub fn measure(&self) -> ProblemMeasure {
        let mut sizes: Vec<usize> = self
            .constraints
            .iter()
            .filter(|c| !c.is_fixed_point())
            .map(Constraint::size)
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        ProblemMeasure {
            var_count: self.vars().len(),
            sizes,
        }
    }

    pub fn is_normal(&self) -> bool {
        self.constraints.iter().all(|c| matches!(analyse(c), Action::Reduced(_)))
    }

    /// The reduced problem's classification: the first inconsistent constraint,
    /// if any.
    pub fn first_inconsistency(&self) -> Option<(&Constraint, Reason)> {
        self.constraints.iter().find_map(|c| match analyse(c) {
            Action::Reduced(Classification::Inconsistent(r)) => Some((c, r)),
            _ => None,
        })
    }

    fn push(&mut self, c: Constraint) {
        if !self.constraints.contains(&c) {
            self.constraints.push(c);
        }
    }

    /// One simplification step. Fresh names avoid the atoms of the problem.
    pub fn step(&self) -> Step {
        self.step_avoiding(&mut BTreeSet::new())
    }

    /// One simplification step. A fresh name for `(ab)` avoids the problem's
    /// atoms and `used`, and is added to `used`.
    pub fn step_avoiding(&self, used: &mut BTreeSet<Atom>) -> Step {
        let selected = self
            .constraints
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, c)| match analyse(c) {
                Action::Rule(r) => Some((i, r)),
                Action::Reduced(_) => None,
            });
        let Some((i, rule)) = selected else {
            return Step::Normal;
        };
        let c = self.constraints[i].clone();
        let mut rest = self.clone();
        rest.constraints.remove(i);

        let (rule, problems) = match rule {
            SimpRule::Del => (SimpRule::Del, vec![rest]),
            SimpRule::Fun => {
                let (Term::App(_, xs), Term::App(_, ys)) = (&c.lhs, &c.rhs) else {
                    unreachable!()
                };
                for (l, r) in xs.iter().zip(ys) {
                    rest.push(Constraint::new(l.clone(), r.clone()));
                }
                (SimpRule::Fun, vec![rest])
            }
            SimpRule::FunC => {
                let (Term::App(_, xs), Term::App(_, ys)) = (&c.lhs, &c.rhs) else {
                    unreachable!()
                };
                let branch = |pairing: Pairing| {
                    let (r0, r1) = match pairing {
                        Pairing::Aligned => (&ys[0], &ys[1]),
                        Pairing::Swapped => (&ys[1], &ys[0]),
                    };
                    let mut p = rest.clone();
                    p.push(Constraint::new(xs[0].clone(), r0.clone()));
                    p.push(Constraint::new(xs[1].clone(), r1.clone()));
                    p
                };
                (SimpRule::FunC, vec![branch(Pairing::Aligned), branch(Pairing::Swapped)])
            }
            SimpRule::Abs => {
                let (Term::Abs(_, l), Term::Abs(_, r)) = (&c.lhs, &c.rhs) else {
                    unreachable!()
                };
                rest.push(Constraint::new((**l).clone(), (**r).clone()));
                (SimpRule::Abs, vec![rest])
            }
            SimpRule::Ab { .. } => {
                let (Term::Abs(a, l), Term::Abs(b, r)) = (&c.lhs, &c.rhs) else {
                    unreachable!()
                };
                let mut avoid = self.atoms();
                avoid.extend(used.iter().cloned());
                let c1 = fresh_atom(&avoid);
                used.insert(c1.clone());
                rest.nu.insert(c1.clone());
                rest.push(Constraint::new(
                    l.act(&Permutation::swap(a.clone(), c1.clone())),
                    r.act(&Permutation::swap(b.clone(), c1.clone())),
                ));
                (SimpRule::Ab { fresh: c1 }, vec![rest])
            }
            SimpRule::Var => {
                let (Term::Susp(p, x), Term::Susp(q, _)) = (&c.lhs, &c.rhs) else {
                    unreachable!()
                };
                rest.push(Constraint::new(
                    Term::susp(q.inverse().compose(p), x.clone()),
                    Term::var(x.clone()),
                ));
                (SimpRule::Var, vec![rest])
            }
            rule @ (SimpRule::Inst1 { .. } | SimpRule::Inst2 { .. }) => {
                let (SimpRule::Inst1 { var, term } | SimpRule::Inst2 { var, term }) = &rule else {
                    unreachable!()
                };
                let binding = Substitution::single(var.clone(), term.clone());
                let mut next = UnificationProblem {
                    nu: rest.nu.clone(),
                    constraints: Vec::new(),
                    pending: rest.pending.clone(),
                };
                for k in &rest.constraints {
                    next.push(k.map(|t| binding.apply(t)));
                }
                next.pending.push((var.clone(), term.clone()));
                (rule, vec![next])
            }
        };
        let result = Step::Branches {
            rule,
            selected: c,
            problems,
        };
        if cfg!(debug_assertions) {
            if let Step::Branches { problems, .. } = &result {
                let before = self.measure();
                for p in problems {
                    debug_assert!(p.measure() < before, "measure did not decrease: {before} to {}", p.measure());
                }
            }
        }
        result
    }
}

impl fmt::Display for UnificationProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.nu.is_empty() {
            f.write_str("new")?;
            for a in &self.nu {
                write!(f, " {a}")?;
            }
            f.write_str(". ")?;
        }
        if self.constraints.is_empty() {
            return f.write_str("{}");
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `⟨Ψ, σ⟩_c̄′`. The ν-names are those of the context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution {
    pub ctx: Context,
    pub subst: Substitution,
}

impl Solution {
    pub fn new(ctx: Context, subst: Substitution) -> Self {
        let subst = subst.with_nu(ctx.nu().iter().cloned());
        Solution { ctx, subst }
    }

    pub fn nu(&self) -> &BTreeSet<Atom> {
        self.ctx.nu()
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = self.ctx.vars();
        out.extend(self.subst.domain().cloned());
        out.extend(self.subst.image_vars());
        out
    }

    /// `{ "new": [..], "context": [{"perm": [[..]], "var": X}], "subst": {X: t} }`
    pub fn to_json(&self) -> Value {
        let context: Vec<Value> = self
            .ctx
            .constraints()
            .map(|c| {
                let cycles: Vec<Vec<String>> = c
                    .perm
                    .cycles()
                    .iter()
                    .map(|cy| cy.iter().map(|a| a.to_string()).collect())
                    .collect();
                json!({ "perm": cycles, "var": c.var.to_string() })
            })
            .collect();
        let subst: serde_json::Map<String, Value> = self
            .subst
            .bindings()
            .map(|(x, t)| (x.to_string(), Value::String(t.to_string())))
            .collect();
        json!({
            "new": self.nu().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "context": context,
            "subst": subst,
        })
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.ctx, self.subst)
    }
}

/// One step on the path from the initial problem to a normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: SimpRule,
    pub selected: Constraint,
    pub before: ProblemMeasure,
    pub after: ProblemMeasure,
}

/// A normal form reached by the search, with the path that led to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub path: Vec<TraceStep>,
    pub normal_form: UnificationProblem,
    pub outcome: Result<Solution, (Constraint, Reason)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolveReport {
    pub solutions: Vec<Solution>,
    pub branches: Vec<Branch>,
    pub steps: usize,
}

impl SolveReport {
    pub fn failures(&self) -> impl Iterator<Item = &(Constraint, Reason)> {
        self.branches.iter().filter_map(|b| b.outcome.as_ref().err())
    }
}

/// Solutions of `p`, deduplicated, in the order they were found.
pub fn solve(p: &UnificationProblem) -> Vec<Solution> {
    solve_detailed(p, false).solutions
}

/// Exhausts simplification on `{p}` depth first. With `trace`, every branch
/// records the steps that led to its normal form.
pub fn solve_detailed(p: &UnificationProblem, trace: bool) -> SolveReport {
    let original_vars = p.vars();
    let mut used: BTreeSet<Atom> = BTreeSet::new();
    let mut report = SolveReport::default();
    let mut seen: BTreeMap<Solution, ()> = BTreeMap::new();
    let mut stack: Vec<(UnificationProblem, Vec<TraceStep>)> = vec![(p.clone(), Vec::new())];

    while let Some((problem, path)) = stack.pop() {
        match problem.step_avoiding(&mut used) {
            Step::Normal => {
                let outcome = match problem.first_inconsistency() {
                    Some((c, r)) => Err((c.clone(), r)),
                    None => Ok(extract(&problem, &original_vars)),
                };
                if let Ok(sol) = &outcome {
                    if seen.insert(sol.clone(), ()).is_none() {
                        report.solutions.push(sol.clone());
                    }
                }
                report.branches.push(Branch {
                    path,
                    normal_form: problem,
                    outcome,
                });
            }
            Step::Branches {
                rule,
                selected,
                problems,
            } => {
                report.steps += 1;
                let before = if trace { Some(problem.measure()) } else { None };
                // pushed in reverse so the first branch is explored first
                for next in problems.into_iter().rev() {
                    let mut path = path.clone();
                    if let Some(before) = &before {
                        path.push(TraceStep {
                            rule: rule.clone(),
                            selected: selected.clone(),
                            before: before.clone(),
                            after: next.measure(),
                        });
                    }
                    stack.push((next, path));
                }
            }
        }
    }
    report
}

fn extract(p: &UnificationProblem, original_vars: &BTreeSet<Variable>) -> Solution {
    let fixes = p.constraints.iter().filter_map(|c| match (&c.lhs, &c.rhs) {
        (Term::Susp(perm, x), _) => Some(FixConstraint::new(perm.clone(), x.clone())),
        _ => None,
    });
    let ctx = Context::new(p.nu.iter().cloned(), fixes).normalize();
    let subst = p.pending_subst().restrict(original_vars);
    Solution::new(ctx, subst)
}
