//! Constraint atoms over the global substitution: connections, copy
//! disequalities, substitution-ordering constraints, plus finite-universe
//! reasoning for effectively propositional problems.

use crate::problem::{Literal, Sym, Term, VarId};
use crate::unify::{Reasons, Substitution, TermOrder, TrailMark};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `σ(left)` and `σ(right)` are dual.
    Connect { left: Literal, right: Literal },
    /// `σ(left) ≠ σ(right)` as tuples.
    DistinctTuple { left: Vec<Term>, right: Vec<Term> },
    /// `σ(first) ⋡ σ(second)` under the lexicographic term order.
    OrderTuple { first: Vec<Term>, second: Vec<Term> },
}

/// Atoms whose joint truth caused a failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub atoms: Vec<AtomId>,
}

impl Explanation {
    fn from_reasons(r: Reasons) -> Explanation {
        Explanation {
            atoms: r.into_vec().into_iter().map(AtomId).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TheoryMark {
    frames: usize,
}

#[derive(Clone, Debug)]
struct Frame {
    atom: AtomId,
    subst: TrailMark,
    watched: usize,
}

#[derive(Clone, Debug, Default)]
pub struct UnificationTheory {
    subst: Substitution,
    atoms: Vec<ConstraintKind>,
    /// True distinct/order atoms, re-checked whenever bindings change.
    watched: Vec<AtomId>,
    frames: Vec<Frame>,
    truth: Vec<bool>,
}

impl UnificationTheory {
    pub fn new() -> UnificationTheory {
        UnificationTheory::default()
    }

    pub fn register(&mut self, kind: ConstraintKind) -> AtomId {
        let id = AtomId(self.atoms.len() as u32);
        self.atoms.push(kind);
        self.truth.push(false);
        id
    }

    pub fn atom(&self, id: AtomId) -> &ConstraintKind {
        &self.atoms[id.0 as usize]
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn substitution(&self) -> &Substitution {
        &self.subst
    }

    pub fn is_true(&self, id: AtomId) -> bool {
        self.truth[id.0 as usize]
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.truth
            .iter()
            .enumerate()
            .filter(|(_, t)| **t)
            .map(|(i, _)| AtomId(i as u32))
    }

    pub fn mark(&self) -> TheoryMark {
        TheoryMark {
            frames: self.frames.len(),
        }
    }

    pub fn retract_to(&mut self, mark: TheoryMark) {
        while self.frames.len() > mark.frames {
            let f = self.frames.pop().unwrap();
            self.subst.retract_to(f.subst);
            self.watched.truncate(f.watched);
            self.truth[f.atom.0 as usize] = false;
        }
    }

    /// Assert `atom = value`. Only true atoms constrain the substitution; on
    /// conflict the state is exactly as before the call.
    pub fn assert_atom(&mut self, atom: AtomId, value: bool) -> Result<(), Explanation> {
        if !value || self.is_true(atom) {
            return Ok(());
        }
        let frame = Frame {
            atom,
            subst: self.subst.mark(),
            watched: self.watched.len(),
        };
        match self.atoms[atom.0 as usize].clone() {
            ConstraintKind::Connect { left, right } => {
                if left.positive == right.positive || left.pred != right.pred {
                    return Err(Explanation { atoms: vec![atom] });
                }
                self.subst
                    .unify_explained(&left.args, &right.args, atom.0)
                    .map_err(Explanation::from_reasons)?;
                if let Err(e) = self.check_watched() {
                    self.subst.retract_to(frame.subst);
                    return Err(e);
                }
            }
            ConstraintKind::DistinctTuple { .. } | ConstraintKind::OrderTuple { .. } => {
                self.check_one(atom)?;
                self.watched.push(atom);
            }
        }
        self.frames.push(frame);
        self.truth[atom.0 as usize] = true;
        Ok(())
    }

    fn check_watched(&self) -> Result<(), Explanation> {
        self.watched.iter().try_for_each(|&a| self.check_one(a))
    }

    /// Whether a single distinct/order atom is violated by the current bindings.
    pub fn check_one(&self, atom: AtomId) -> Result<(), Explanation> {
        let mut seen = Reasons::single(atom.0);
        let violated = match &self.atoms[atom.0 as usize] {
            ConstraintKind::Connect { .. } => false,
            ConstraintKind::DistinctTuple { left, right } => {
                left.len() == right.len()
                    && left
                        .iter()
                        .zip(right)
                        .all(|(a, b)| self.subst.identical_noting(a, b, &mut seen))
            }
            ConstraintKind::OrderTuple { first, second } => matches!(
                self.subst.compare_tuples_noting(first, second, &mut seen),
                TermOrder::Greater | TermOrder::Equal
            ),
        };
        if violated {
            Err(Explanation::from_reasons(seen))
        } else {
            Ok(())
        }
    }

    /// Re-check every true distinct/order atom.
    pub fn check_all(&self) -> Result<(), Explanation> {
        self.check_watched()
    }

    /// Domain reasoning over the given finite universe (constants in
    /// precedence order) for the currently true distinct/order atoms.
    pub fn finite_domain_check(&self, universe: &[Sym]) -> Result<(), Explanation> {
        finite_domain_check(&self.subst, &self.atoms_of(&self.watched), universe)
    }

    fn atoms_of(&self, ids: &[AtomId]) -> Vec<(AtomId, ConstraintKind)> {
        ids.iter().map(|&a| (a, self.atom(a).clone())).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Var(VarId),
    Const(usize),
}

#[derive(Clone, Debug)]
enum Simple {
    Neq(Node, Node),
    /// `a ≺ b` when strict, else `a ⪯ b`.
    Le(Node, Node, bool),
}

fn node_of(t: &Term, universe: &[Sym]) -> Option<Node> {
    match t {
        Term::Var(v) => Some(Node::Var(*v)),
        Term::App(f, args) if args.is_empty() => universe.iter().position(|u| u == f).map(Node::Const),
        _ => None,
    }
}

/// Detect sets of disequality/ordering constraints that are individually
/// satisfiable but jointly exclude every element of a finite universe.
///
/// `universe` lists the constants in precedence order. Each distinct-tuple atom
/// contributes `x ≠ t` once all but one position are identical; each order
/// atom contributes `a ⪯ b` (strict when nothing follows) at its first
/// undecided position. Domains are then narrowed to a fixpoint; an empty
/// domain is a conflict explained by every contributing atom.
pub fn finite_domain_check(
    subst: &Substitution,
    atoms: &[(AtomId, ConstraintKind)],
    universe: &[Sym],
) -> Result<(), Explanation> {
    let mut simple: Vec<Simple> = Vec::new();
    let mut why = Reasons::new();
    for (id, kind) in atoms {
        let mut seen = Reasons::single(id.0);
        let derived = match kind {
            ConstraintKind::Connect { .. } => None,
            ConstraintKind::DistinctTuple { left, right } => {
                let mut rest: Vec<(Term, Term)> = Vec::new();
                for (a, b) in left.iter().zip(right) {
                    if !subst.identical_noting(a, b, &mut seen) {
                        rest.push((subst.resolve_noting(a, &mut seen), subst.resolve_noting(b, &mut seen)));
                    }
                }
                match rest.as_slice() {
                    [] => return Err(Explanation::from_reasons(seen)),
                    [(a, b)] => match (node_of(a, universe), node_of(b, universe)) {
                        (Some(x), Some(y)) => Some(Simple::Neq(x, y)),
                        _ => None,
                    },
                    _ => None,
                }
            }
            ConstraintKind::OrderTuple { first, second } => {
                let pairs: Vec<(Term, Term)> = first
                    .iter()
                    .zip(second)
                    .map(|(a, b)| (subst.resolve_noting(a, &mut seen), subst.resolve_noting(b, &mut seen)))
                    .collect();
                let mut out = None;
                for (i, (a, b)) in pairs.iter().enumerate() {
                    match subst.compare_terms(a, b) {
                        TermOrder::Equal => continue,
                        TermOrder::Less => break,
                        TermOrder::Greater => return Err(Explanation::from_reasons(seen)),
                        TermOrder::Incomparable => {
                            let strict = pairs[i + 1..].iter().all(|(c, d)| c == d) && first.len() == second.len();
                            if let (Some(x), Some(y)) = (node_of(a, universe), node_of(b, universe)) {
                                out = Some(Simple::Le(x, y, strict));
                            }
                            break;
                        }
                    }
                }
                if out.is_none() && pairs.iter().all(|(a, b)| a == b) && first.len() >= second.len() {
                    return Err(Explanation::from_reasons(seen));
                }
                out
            }
        };
        if let Some(s) = derived {
            simple.push(s);
            why.extend(&seen);
        }
    }
    if simple.is_empty() {
        return Ok(());
    }
    if universe.is_empty() {
        return Err(Explanation::from_reasons(why));
    }

    let n = universe.len();
    let mut domains: std::collections::HashMap<VarId, Vec<bool>> = Default::default();
    for s in &simple {
        let (Simple::Neq(a, b) | Simple::Le(a, b, _)) = s;
        for x in [a, b] {
            if let Node::Var(v) = x {
                domains.entry(*v).or_insert_with(|| vec![true; n]);
            }
        }
    }
    let dom = |d: &std::collections::HashMap<VarId, Vec<bool>>, x: Node| -> Vec<bool> {
        match x {
            Node::Var(v) => d[&v].clone(),
            Node::Const(c) => (0..n).map(|i| i == c).collect(),
        }
    };
    let mut changed = true;
    while changed {
        changed = false;
        for s in &simple {
            let (a, b) = match s {
                Simple::Neq(a, b) | Simple::Le(a, b, _) => (*a, *b),
            };
            let da = dom(&domains, a);
            let db = dom(&domains, b);
            let (na, nb) = match s {
                Simple::Neq(..) => {
                    let single = |d: &Vec<bool>| {
                        let vals: Vec<usize> = (0..n).filter(|&i| d[i]).collect();
                        if vals.len() == 1 {
                            Some(vals[0])
                        } else {
                            None
                        }
                    };
                    let mut na = da.clone();
                    let mut nb = db.clone();
                    if let Some(v) = single(&db) {
                        na[v] = false;
                    }
                    if let Some(v) = single(&da) {
                        nb[v] = false;
                    }
                    if a == b {
                        na = vec![false; n];
                        nb = vec![false; n];
                    }
                    (na, nb)
                }
                Simple::Le(_, _, strict) => {
                    let max_b = (0..n).rev().find(|&i| db[i]);
                    let min_a = (0..n).find(|&i| da[i]);
                    let na: Vec<bool> = (0..n)
                        .map(|i| da[i] && max_b.is_some_and(|m| if *strict { i < m } else { i <= m }))
                        .collect();
                    let nb: Vec<bool> = (0..n)
                        .map(|i| db[i] && min_a.is_some_and(|m| if *strict { i > m } else { i >= m }))
                        .collect();
                    if a == b && *strict {
                        (vec![false; n], vec![false; n])
                    } else {
                        (na, nb)
                    }
                }
            };
            for (x, old, new) in [(a, da, na), (b, db, nb)] {
                if new.iter().all(|v| !v) {
                    return Err(Explanation::from_reasons(why));
                }
                if new != old {
                    if let Node::Var(v) = x {
                        domains.insert(v, new);
                        changed = true;
                    }
                }
            }
        }
    }
    Ok(())
}
