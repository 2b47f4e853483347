//! Rigid first-order unification over a global substitution.
//!
//! Bindings are recorded on a trail so that any prefix of the work can be
//! undone exactly. Every binding also carries the set of constraint atoms that
//! justify it: the atom being asserted when the binding was made plus the
//! justifications of every binding that was dereferenced on the way. Those sets
//! are closed under that relation, so a failure can be explained by collecting
//! the sets of the bindings it looked at.

use std::cmp::Ordering;

use crate::problem::{Term, VarId};

/// Sorted, duplicate-free set of constraint atom ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Reasons(Vec<u32>);

impl Reasons {
    pub fn new() -> Reasons {
        Reasons(Vec::new())
    }

    pub fn single(atom: u32) -> Reasons {
        Reasons(vec![atom])
    }

    pub fn insert(&mut self, atom: u32) {
        if let Err(at) = self.0.binary_search(&atom) {
            self.0.insert(at, atom);
        }
    }

    pub fn extend(&mut self, other: &Reasons) {
        if other.0.is_empty() {
            return;
        }
        if self.0.is_empty() {
            self.0.clone_from(&other.0);
            return;
        }
        let mut merged = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    merged.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    merged.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    merged.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.0[i..]);
        merged.extend_from_slice(&other.0[j..]);
        self.0 = merged;
    }

    pub fn atoms(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub term: Term,
    pub reasons: Reasons,
}

/// Position in the binding trail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrailMark(usize);

#[derive(Clone, Debug, Default)]
pub struct Substitution {
    bindings: Vec<Option<Binding>>,
    trail: Vec<VarId>,
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Substitution) -> bool {
        self.trail == other.trail && self.trail.iter().all(|&v| self.binding(v) == other.binding(v))
    }
}

impl Eq for Substitution {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn binding(&self, v: VarId) -> Option<&Binding> {
        self.bindings.get(v as usize).and_then(Option::as_ref)
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.binding(v).is_some()
    }

    pub fn bound_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.trail.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.trail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trail.is_empty()
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.trail.len())
    }

    pub fn retract_to(&mut self, mark: TrailMark) {
        while self.trail.len() > mark.0 {
            let v = self.trail.pop().unwrap();
            self.bindings[v as usize] = None;
        }
    }

    fn bind(&mut self, v: VarId, term: Term, reasons: Reasons) {
        let idx = v as usize;
        if self.bindings.len() <= idx {
            self.bindings.resize(idx + 1, None);
        }
        debug_assert!(self.bindings[idx].is_none());
        self.bindings[idx] = Some(Binding { term, reasons });
        self.trail.push(v);
    }

    /// Follow variable bindings at the top of `t`.
    pub fn walk<'a>(&'a self, mut t: &'a Term, seen: &mut Reasons) -> &'a Term {
        while let Term::Var(v) = t {
            match self.binding(*v) {
                Some(b) => {
                    seen.extend(&b.reasons);
                    t = &b.term;
                }
                None => break,
            }
        }
        t
    }

    /// Apply the substitution exhaustively.
    pub fn resolve(&self, t: &Term) -> Term {
        self.resolve_noting(t, &mut Reasons::new())
    }

    pub fn resolve_noting(&self, t: &Term, seen: &mut Reasons) -> Term {
        match self.walk(t, seen) {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.resolve_noting(a, seen)).collect()),
        }
    }

    fn occurs(&self, v: VarId, t: &Term, seen: &mut Reasons) -> bool {
        match self.walk(t, seen) {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a, seen)),
        }
    }

    pub fn unify(&mut self, t: &Term, s: &Term) -> bool {
        self.unify_pairs(vec![(t.clone(), s.clone())], None).is_ok()
    }

    pub fn unify_args(&mut self, ts: &[Term], ss: &[Term]) -> bool {
        ts.len() == ss.len()
            && self
                .unify_pairs(ts.iter().cloned().zip(ss.iter().cloned()).collect(), None)
                .is_ok()
    }

    /// Unify pairwise on behalf of `atom`. On failure the substitution is
    /// unchanged and the returned set explains the failure.
    pub fn unify_explained(&mut self, ts: &[Term], ss: &[Term], atom: u32) -> Result<(), Reasons> {
        if ts.len() != ss.len() {
            return Err(Reasons::single(atom));
        }
        self.unify_pairs(ts.iter().cloned().zip(ss.iter().cloned()).collect(), Some(atom))
    }

    fn unify_pairs(&mut self, mut stack: Vec<(Term, Term)>, atom: Option<u32>) -> Result<(), Reasons> {
        let mark = self.mark();
        let mut seen = Reasons::new();
        if let Some(a) = atom {
            seen.insert(a);
        }
        while let Some((a, b)) = stack.pop() {
            let a = self.walk(&a, &mut seen).clone();
            let b = self.walk(&b, &mut seen).clone();
            match (a, b) {
                (Term::Var(x), Term::Var(y)) if x == y => {}
                (Term::Var(x), t) | (t, Term::Var(x)) => {
                    if self.occurs(x, &t, &mut seen) {
                        self.retract_to(mark);
                        return Err(seen);
                    }
                    self.bind(x, t, seen.clone());
                }
                (Term::App(f, fa), Term::App(g, ga)) => {
                    if f != g || fa.len() != ga.len() {
                        self.retract_to(mark);
                        return Err(seen);
                    }
                    stack.extend(fa.into_iter().zip(ga));
                }
            }
        }
        Ok(())
    }

    /// Lexicographic path-free ordering: `f(t̄) ≺ g(s̄)` iff `f ≺ g`, or `f = g` and
    /// `t̄ ≺ s̄` lexicographically. Symbol precedence is symbol id order. Reaching an
    /// unbound variable (other than two occurrences of the same one) is `Incomparable`.
    pub fn compare_terms(&self, t: &Term, s: &Term) -> TermOrder {
        self.compare_noting(t, s, &mut Reasons::new())
    }

    pub fn compare_noting(&self, t: &Term, s: &Term, seen: &mut Reasons) -> TermOrder {
        let t = self.walk(t, seen);
        let s = self.walk(s, seen);
        match (t, s) {
            (Term::Var(x), Term::Var(y)) if x == y => TermOrder::Equal,
            (Term::Var(_), _) | (_, Term::Var(_)) => TermOrder::Incomparable,
            (Term::App(f, fa), Term::App(g, ga)) => match f.cmp(g) {
                Ordering::Less => TermOrder::Less,
                Ordering::Greater => TermOrder::Greater,
                Ordering::Equal => self.compare_tuples_noting(fa, ga, seen),
            },
        }
    }

    pub fn compare_tuples(&self, ts: &[Term], ss: &[Term]) -> TermOrder {
        self.compare_tuples_noting(ts, ss, &mut Reasons::new())
    }

    pub fn compare_tuples_noting(&self, ts: &[Term], ss: &[Term], seen: &mut Reasons) -> TermOrder {
        for (t, s) in ts.iter().zip(ss) {
            match self.compare_noting(t, s, seen) {
                TermOrder::Equal => continue,
                other => return other,
            }
        }
        match ts.len().cmp(&ss.len()) {
            Ordering::Less => TermOrder::Less,
            Ordering::Equal => TermOrder::Equal,
            Ordering::Greater => TermOrder::Greater,
        }
    }

    /// Syntactic identity after dereferencing.
    pub fn identical_noting(&self, t: &Term, s: &Term, seen: &mut Reasons) -> bool {
        let t = self.walk(t, seen);
        let s = self.walk(s, seen);
        match (t, s) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(a, b)| self.identical_noting(a, b, seen))
            }
            _ => false,
        }
    }
}
