//! Exhaustive reference provers for small problems. Nothing here touches the
//! encodings: the matrix oracle enumerates clause multisets and closes paths
//! by backtracking rigid unification, the ground oracle instantiates an EPR
//! problem over its constants and decides the result propositionally.

use std::collections::HashMap;

use crate::problem::{ClauseCopy, Literal, Problem, Sym, Term, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleProof {
    pub copies: Vec<ClauseCopy>,
    pub bindings: Vec<(VarId, Term)>,
    /// Every pair of literals in different copies that the bindings make dual.
    pub connections: Vec<((usize, usize), (usize, usize))>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Theorem(OracleProof),
    NoProofWithin(u32),
}

type Subst = HashMap<VarId, Term>;

fn walk<'a>(s: &'a Subst, mut t: &'a Term) -> &'a Term {
    while let Term::Var(v) = t {
        match s.get(v) {
            Some(b) => t = b,
            None => break,
        }
    }
    t
}

fn occurs(s: &Subst, v: VarId, t: &Term) -> bool {
    match walk(s, t) {
        Term::Var(w) => *w == v,
        Term::App(_, args) => args.iter().any(|a| occurs(s, v, a)),
    }
}

fn unify(s: &mut Subst, a: &Term, b: &Term) -> bool {
    let (a, b) = (walk(s, a).clone(), walk(s, b).clone());
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(s, *x, t) {
                return false;
            }
            s.insert(*x, t.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(s, x, y))
        }
    }
}

fn resolve(s: &Subst, t: &Term) -> Term {
    match walk(s, t) {
        Term::Var(v) => Term::Var(*v),
        Term::App(f, args) => Term::App(*f, args.iter().map(|a| resolve(s, a)).collect()),
    }
}

fn dual(s: &Subst, l: &Literal, k: &Literal) -> bool {
    l.positive != k.positive
        && l.pred == k.pred
        && l.args.len() == k.args.len()
        && l.args.iter().zip(&k.args).all(|(a, b)| resolve(s, a) == resolve(s, b))
}

/// One literal per copy with no two dual under `s`.
fn open_path(copies: &[ClauseCopy], s: &Subst) -> Option<Vec<usize>> {
    fn go(copies: &[ClauseCopy], s: &Subst, picked: &mut Vec<usize>) -> bool {
        let row = picked.len();
        if row == copies.len() {
            return true;
        }
        for (i, l) in copies[row].literals.iter().enumerate() {
            let clash = picked
                .iter()
                .enumerate()
                .any(|(r, &j)| dual(s, l, &copies[r].literals[j]));
            if !clash {
                picked.push(i);
                if go(copies, s, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
    let mut picked = Vec::new();
    go(copies, s, &mut picked).then_some(picked)
}

/// Closes every path of the matrix by unifying pairs found on open paths.
/// Each step binds at least one more variable, so the recursion is finite.
fn close(copies: &[ClauseCopy], s: &Subst) -> Option<Subst> {
    let Some(path) = open_path(copies, s) else {
        return Some(s.clone());
    };
    for a in 0..path.len() {
        for b in a + 1..path.len() {
            let (l, k) = (&copies[a].literals[path[a]], &copies[b].literals[path[b]]);
            if l.positive == k.positive || l.pred != k.pred || l.args.len() != k.args.len() {
                continue;
            }
            let mut t = s.clone();
            if l.args.iter().zip(&k.args).all(|(x, y)| unify(&mut t, x, y)) {
                if let Some(done) = close(copies, &t) {
                    return Some(done);
                }
            }
        }
    }
    None
}

fn multisets(n: usize, size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for c in from..n {
        cur.push(c);
        multisets(n, size, c, cur, out);
        cur.pop();
    }
}

pub fn oracle_prove(problem: &Problem, d_max: u32) -> OracleVerdict {
    let n = problem.clauses.len();
    for size in 1..=d_max as usize {
        let mut all = Vec::new();
        multisets(n, size, 0, &mut Vec::new(), &mut all);
        for ms in all {
            if !ms.iter().any(|&c| problem.is_start(c)) {
                continue;
            }
            let mut seen: HashMap<usize, u32> = HashMap::new();
            let copies: Vec<ClauseCopy> = ms
                .iter()
                .map(|&c| {
                    let k = seen.entry(c).or_insert(0);
                    *k += 1;
                    problem.rename_copy(c, *k)
                })
                .collect();
            if let Some(s) = close(&copies, &Subst::new()) {
                return OracleVerdict::Theorem(proof_of(copies, &s));
            }
        }
    }
    OracleVerdict::NoProofWithin(d_max)
}

fn proof_of(copies: Vec<ClauseCopy>, s: &Subst) -> OracleProof {
    let mut bindings: Vec<(VarId, Term)> = copies
        .iter()
        .flat_map(|c| c.var_ids())
        .filter(|v| s.contains_key(v))
        .map(|v| (v, resolve(s, &Term::Var(v))))
        .collect();
    bindings.sort();
    let mut connections = Vec::new();
    for a in 0..copies.len() {
        for b in a + 1..copies.len() {
            for (i, l) in copies[a].literals.iter().enumerate() {
                for (j, k) in copies[b].literals.iter().enumerate() {
                    if dual(s, l, k) {
                        connections.push(((a, i), (b, j)));
                    }
                }
            }
        }
    }
    OracleProof {
        copies,
        bindings,
        connections,
    }
}

/// Decides an EPR problem by grounding it over its constants (or one fresh
/// constant if it has none). `Some(true)` means unsatisfiable. `None` when
/// the problem has function symbols or the grounding exceeds `max_ground`.
pub fn ground_unsat(problem: &Problem, max_ground: usize) -> Option<bool> {
    if !problem.epr {
        return None;
    }
    let mut consts: Vec<Term> = problem.constants().into_iter().map(Term::constant).collect();
    if consts.is_empty() {
        consts.push(Term::constant(Sym(u32::MAX)));
    }
    let mut atoms: HashMap<(u32, Vec<Term>), i64> = HashMap::new();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    for c in &problem.clauses {
        let width = c.num_vars as usize;
        let total = consts.len().checked_pow(width as u32)?;
        if clauses.len() + total > max_ground {
            return None;
        }
        for mut code in 0..total {
            let mut g: Vec<Term> = Vec::with_capacity(width);
            for _ in 0..width {
                g.push(consts[code % consts.len()].clone());
                code /= consts.len();
            }
            let mut clause = Vec::with_capacity(c.literals.len());
            for l in &c.literals {
                let inst = l.map_vars(&mut |v| g[v as usize].clone());
                let next = atoms.len() as i64 + 1;
                let id = *atoms.entry((inst.pred.0, inst.args)).or_insert(next);
                clause.push(if l.positive { id } else { -id });
            }
            clauses.push(clause);
        }
    }
    Some(!crate::check::satisfiable(&clauses, atoms.len()))
}
