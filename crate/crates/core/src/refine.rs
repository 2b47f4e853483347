//! Search-space refinements shared by the matrix encodings: the clause order
//! used by instance symmetry, within-matrix subsumption, copy caps for
//! effectively propositional problems, and variable-disjoint components.

use std::collections::HashMap;

use crate::matrix::{copy_id, CopyId};
use crate::problem::{ClauseCopy, Literal, Problem, Term, VarId};
use crate::theory::{AtomId, UnificationTheory};
use crate::unify::Reasons;

/// Start clauses first, then input order.
#[derive(Clone, Debug)]
pub struct ClauseOrder {
    rank: Vec<usize>,
}

impl ClauseOrder {
    pub fn new(problem: &Problem) -> ClauseOrder {
        let n = problem.clauses.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&c| (!problem.is_start(c), c));
        let mut rank = vec![0; n];
        for (r, c) in order.into_iter().enumerate() {
            rank[c] = r;
        }
        ClauseOrder { rank }
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// Most copies of a function-free clause that can be pairwise distinct:
/// `c^v` for `c` constants (at least one) and `v` variables.
pub fn epr_cap(problem: &Problem, clause: usize) -> u32 {
    let c = problem.constants().len().max(1) as u64;
    let v = problem.clauses[clause].num_vars;
    let mut cap: u64 = 1;
    for _ in 0..v {
        cap = cap.saturating_mul(c);
        if cap >= u32::MAX as u64 {
            return u32::MAX;
        }
    }
    cap as u32
}

/// Copies that may not be selected together while the named atoms hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub copies: Vec<CopyId>,
    pub atoms: Vec<AtomId>,
}

fn match_term(pattern: &Term, target: &Term, rho: &mut HashMap<VarId, Term>) -> bool {
    match pattern {
        Term::Var(v) => match rho.get(v) {
            Some(t) => t == target,
            None => {
                rho.insert(*v, target.clone());
                true
            }
        },
        Term::App(f, ps) => match target {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => ps.iter().zip(ts).all(|(p, t)| match_term(p, t, rho)),
            _ => false,
        },
    }
}

fn match_literal(p: &Literal, t: &Literal, rho: &mut HashMap<VarId, Term>) -> bool {
    p.positive == t.positive
        && p.pred == t.pred
        && p.args.len() == t.args.len()
        && p.args.iter().zip(&t.args).all(|(a, b)| match_term(a, b, rho))
}

/// Is there a renaming/instantiation `ρ` of `pattern` whose literal set is
/// exactly `target`? Variables in `target` are rigid.
pub fn instance_equal(pattern: &[Literal], target: &[Literal]) -> bool {
    let mut target = target.to_vec();
    target.sort();
    target.dedup();
    if target.len() > pattern.len() {
        return false;
    }
    fn go(i: usize, pattern: &[Literal], target: &[Literal], hit: &mut [usize], rho: &HashMap<VarId, Term>) -> bool {
        if i == pattern.len() {
            return hit.iter().all(|&h| h > 0);
        }
        for (j, t) in target.iter().enumerate() {
            let mut r = rho.clone();
            if match_literal(&pattern[i], t, &mut r) {
                hit[j] += 1;
                if go(i + 1, pattern, target, hit, &r) {
                    return true;
                }
                hit[j] -= 1;
            }
        }
        false
    }
    let mut hit = vec![0; target.len()];
    go(0, pattern, &target, &mut hit, &HashMap::new())
}

fn resolved_noting(theory: &UnificationTheory, c: &ClauseCopy, why: &mut Reasons) -> Vec<Literal> {
    let s = theory.substitution();
    c.literals
        .iter()
        .map(|l| Literal {
            positive: l.positive,
            pred: l.pred,
            args: l.args.iter().map(|t| s.resolve_noting(t, why)).collect(),
        })
        .collect()
}

fn atoms_of(r: Reasons) -> Vec<AtomId> {
    r.into_vec().into_iter().map(AtomId).collect()
}

/// Symmetry violations in the selected matrix:
///
/// * a copy `σ(D^k)` equal (as a literal set) to an instance of an input
///   clause `C` preceding `D` — the proof could use `C` instead;
/// * two copies with `σ(X) ⊆ σ(Y)` — `Y` is redundant. Skipped when dropping
///   `Y` could remove the only start clause.
pub fn symmetry_blocks(
    problem: &Problem,
    order: &ClauseOrder,
    selected: &[&ClauseCopy],
    theory: &UnificationTheory,
) -> Vec<Block> {
    let mut out = Vec::new();
    let mut why: Vec<Reasons> = Vec::with_capacity(selected.len());
    let mut lits: Vec<Vec<Literal>> = Vec::with_capacity(selected.len());
    for c in selected {
        let mut r = Reasons::new();
        lits.push(resolved_noting(theory, c, &mut r));
        why.push(r);
    }
    for (i, c) in selected.iter().enumerate() {
        for (e, input) in problem.clauses.iter().enumerate() {
            if e == c.clause || !order.precedes(e, c.clause) || problem.is_tautology(e) {
                continue;
            }
            if instance_equal(&input.literals, &lits[i]) {
                out.push(Block {
                    copies: vec![copy_id(c)],
                    atoms: atoms_of(why[i].clone()),
                });
                break;
            }
        }
    }
    for (i, x) in selected.iter().enumerate() {
        for (j, y) in selected.iter().enumerate() {
            if i == j || (problem.is_start(y.clause) && !problem.is_start(x.clause)) {
                continue;
            }
            if lits[i].iter().all(|l| lits[j].contains(l)) {
                let mut pair = vec![copy_id(x), copy_id(y)];
                pair.sort();
                if out.iter().any(|b: &Block| b.copies == pair) {
                    continue;
                }
                let mut r = why[i].clone();
                r.extend(&why[j]);
                out.push(Block {
                    copies: pair,
                    atoms: atoms_of(r),
                });
            }
        }
    }
    out
}

/// Partition each clause's literals into classes connected by shared
/// variables; ground literals form singleton classes.
pub fn components(literals: &[Literal]) -> Vec<Vec<usize>> {
    let n = literals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut owner: HashMap<VarId, usize> = HashMap::new();
    for (i, l) in literals.iter().enumerate() {
        for v in l.vars() {
            match owner.get(&v) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                None => {
                    owner.insert(v, i);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let g = *index.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}
