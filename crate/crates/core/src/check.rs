//! Independent proof checking. Deliberately shares nothing with the search
//! code beyond the problem and document types: unification, path checking
//! and the propositional back end are re-implemented here in the simplest
//! possible way.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::problem::{Literal, Problem, Term, VarId};
use crate::proof::{problem_hash, DocCopy, Mode, ProofDocument, SubProof};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Reject {
    #[error("document is for a different problem")]
    ProblemMismatch,
    #[error("instance record {0} is not an instance of its parent")]
    BadInstance(usize),
    #[error("document has no sub-proof")]
    NoSubproof,
    #[error("{0} mode documents have exactly one sub-proof and no splitting records")]
    Shape(Mode),
    #[error("copy {id}: {why}")]
    BadCopy { id: usize, why: String },
    #[error("copies {0} and {1} share variables")]
    SharedVariables(usize, usize),
    #[error("sub-proof {0} contains no start clause")]
    NoStartClause(usize),
    #[error("binding of X{0} is invalid")]
    BadBinding(VarId),
    #[error("bindings are cyclic")]
    CyclicBindings,
    #[error("connection {0}.{1} ~ {2}.{3} is malformed")]
    BadConnection(usize, usize, usize, usize),
    #[error("connection {0}.{1} ~ {2}.{3} is not dual under the bindings")]
    NotDual(usize, usize, usize, usize),
    #[error("dual pair {0}.{1} ~ {2}.{3} is missing from the connection list")]
    MissingConnection(usize, usize, usize, usize),
    #[error("bindings are not a most general unifier of the connections")]
    NotMostGeneral,
    #[error("open path: {0:?}")]
    OpenPath(Vec<(usize, usize)>),
    #[error("copy {0}: active literals are not a union of components")]
    BadActive(usize),
    #[error("sub-proofs do not cover every combination of components")]
    NotCovered,
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

fn apply(s: &Subst, t: &Term, depth: usize) -> Option<Term> {
    if depth > 10_000 {
        return None;
    }
    match t {
        Term::Var(v) => match s.get(v) {
            Some(b) => apply(s, b, depth + 1),
            None => Some(t.clone()),
        },
        Term::App(f, args) => Some(Term::App(
            *f,
            args.iter()
                .map(|a| apply(s, a, depth + 1))
                .collect::<Option<Vec<_>>>()?,
        )),
    }
}

fn apply_lit(s: &Subst, l: &Literal) -> Option<Literal> {
    Some(Literal {
        positive: l.positive,
        pred: l.pred,
        args: l.args.iter().map(|t| apply(s, t, 0)).collect::<Option<Vec<_>>>()?,
    })
}

fn term_vars(t: &Term, out: &mut Vec<VarId>) {
    match t {
        Term::Var(v) => out.push(*v),
        Term::App(_, args) => args.iter().for_each(|a| term_vars(a, out)),
    }
}

fn lit_vars(l: &Literal) -> Vec<VarId> {
    let mut out = Vec::new();
    l.args.iter().for_each(|t| term_vars(t, &mut out));
    out
}

/// Positional one-way matching: is `target = ρ(pattern)`?
fn matches(pattern: &Term, target: &Term, rho: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match rho.get(v) {
            Some(t) => t == target,
            None => {
                rho.insert(*v, target.clone());
                true
            }
        },
        Term::App(f, ps) => matches!(target, Term::App(g, ts)
            if f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| matches(p, t, rho))),
    }
}

/// Is `target` the image of `pattern` under an injective variable renaming?
fn renaming(pattern: &[Literal], target: &[Literal]) -> Result<Vec<VarId>, String> {
    if pattern.len() != target.len() {
        return Err("wrong number of literals".into());
    }
    let mut fwd: HashMap<VarId, VarId> = HashMap::new();
    let mut back: HashMap<VarId, VarId> = HashMap::new();
    fn go(p: &Term, t: &Term, fwd: &mut HashMap<VarId, VarId>, back: &mut HashMap<VarId, VarId>) -> bool {
        match (p, t) {
            (Term::Var(x), Term::Var(y)) => *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| go(a, b, fwd, back))
            }
            _ => false,
        }
    }
    for (i, (p, t)) in pattern.iter().zip(target).enumerate() {
        if p.positive != t.positive || p.pred != t.pred || p.args.len() != t.args.len() {
            return Err(format!("literal {i} differs from the input clause"));
        }
        if !p.args.iter().zip(&t.args).all(|(a, b)| go(a, b, &mut fwd, &mut back)) {
            return Err(format!("literal {i} is not a renaming of the input clause"));
        }
    }
    Ok(back.keys().copied().collect())
}

/// Components: literals linked by shared variables.
fn components(lits: &[Literal]) -> Vec<BTreeSet<usize>> {
    let mut comp: Vec<usize> = (0..lits.len()).collect();
    let vars: Vec<Vec<VarId>> = lits.iter().map(lit_vars).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..lits.len() {
            for j in 0..lits.len() {
                if comp[i] != comp[j] && vars[i].iter().any(|v| vars[j].contains(v)) {
                    let (a, b) = (comp[i].min(comp[j]), comp[i].max(comp[j]));
                    comp.iter_mut().filter(|c| **c == b).for_each(|c| *c = a);
                    changed = true;
                }
            }
        }
    }
    let mut groups: Vec<BTreeSet<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (i, &c) in comp.iter().enumerate() {
        match seen.iter().position(|&s| s == c) {
            Some(g) => {
                groups[g].insert(i);
            }
            None => {
                seen.push(c);
                groups.push(BTreeSet::from([i]));
            }
        }
    }
    groups
}

pub(crate) fn satisfiable(clauses: &[Vec<i64>], num_vars: usize) -> bool {
    dpll(clauses, num_vars).is_some()
}

/// Plain DPLL; literals are `±(var + 1)`. Returns a total model.
fn dpll(clauses: &[Vec<i64>], num_vars: usize) -> Option<Vec<i8>> {
    fn go(clauses: &[Vec<i64>], assign: &mut Vec<i8>) -> bool {
        loop {
            let mut unit = None;
            for c in clauses {
                let mut open = None;
                let mut n_open = 0;
                let mut sat = false;
                for &l in c {
                    let v = assign[(l.unsigned_abs() - 1) as usize];
                    if v == 0 {
                        n_open += 1;
                        open = Some(l);
                    } else if (v > 0) == (l > 0) {
                        sat = true;
                        break;
                    }
                }
                if sat {
                    continue;
                }
                match n_open {
                    0 => return false,
                    1 => {
                        unit = open;
                        break;
                    }
                    _ => {}
                }
            }
            match unit {
                Some(l) => assign[(l.unsigned_abs() - 1) as usize] = if l > 0 { 1 } else { -1 },
                None => break,
            }
        }
        let Some(v) = assign.iter().position(|&a| a == 0) else {
            return true;
        };
        for val in [1, -1] {
            let mut a = assign.clone();
            a[v] = val;
            if go(clauses, &mut a) {
                *assign = a;
                return true;
            }
        }
        false
    }
    let mut assign = vec![0; num_vars];
    go(clauses, &mut assign).then_some(assign)
}

struct Clauses<'a> {
    problem: &'a Problem,
    instances: Vec<Vec<Literal>>,
    start: HashSet<usize>,
}

impl Clauses<'_> {
    fn literals(&self, clause: usize) -> Option<&[Literal]> {
        let n = self.problem.clauses.len();
        if clause < n {
            Some(&self.problem.clauses[clause].literals)
        } else {
            self.instances.get(clause - n).map(|v| v.as_slice())
        }
    }
}

fn check_copies(cl: &Clauses<'_>, sp: &SubProof) -> Result<(), Reject> {
    let mut owner: HashMap<VarId, usize> = HashMap::new();
    let mut keys = HashSet::new();
    for c in &sp.copies {
        let bad = |why: &str| Reject::BadCopy {
            id: c.id,
            why: why.to_owned(),
        };
        let input = cl.literals(c.clause).ok_or_else(|| bad("unknown clause"))?;
        if c.k == 0 || !keys.insert((c.clause, c.k)) {
            return Err(bad("copy index is zero or repeated"));
        }
        let vars = renaming(input, &c.literals).map_err(|w| bad(&w))?;
        let width = input.iter().flat_map(lit_vars).collect::<BTreeSet<_>>().len() as VarId;
        for v in vars {
            if v < c.var_base || v >= c.var_base + width {
                return Err(bad("variable outside the copy's range"));
            }
            if let Some(other) = owner.insert(v, c.id) {
                return Err(Reject::SharedVariables(other, c.id));
            }
        }
        if let Some(active) = &c.active {
            if active.iter().any(|&i| i >= c.literals.len()) {
                return Err(Reject::BadActive(c.id));
            }
            let set: BTreeSet<usize> = active.iter().copied().collect();
            if components(input)
                .iter()
                .any(|g| !g.is_subset(&set) && !g.is_disjoint(&set))
            {
                return Err(Reject::BadActive(c.id));
            }
        }
    }
    Ok(())
}

fn is_active(c: &DocCopy, i: usize) -> bool {
    c.active.as_ref().is_none_or(|a| a.contains(&i))
}

fn check_subproof(cl: &Clauses<'_>, index: usize, sp: &SubProof) -> Result<(), Reject> {
    check_copies(cl, sp)?;
    if !sp.copies.iter().any(|c| cl.start.contains(&c.clause)) {
        return Err(Reject::NoStartClause(index));
    }

    let copy_vars: HashSet<VarId> = sp
        .copies
        .iter()
        .flat_map(|c| c.literals.iter().flat_map(lit_vars))
        .collect();
    let mut sigma = Subst::new();
    for (v, t) in &sp.bindings {
        if !copy_vars.contains(v) || sigma.insert(*v, t.clone()).is_some() {
            return Err(Reject::BadBinding(*v));
        }
    }
    let lits: Vec<Vec<Literal>> = sp
        .copies
        .iter()
        .map(|c| {
            c.literals
                .iter()
                .map(|l| apply_lit(&sigma, l))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()
        .ok_or(Reject::CyclicBindings)?;
    for v in &copy_vars {
        if occurs_strictly(&sigma, *v) {
            return Err(Reject::CyclicBindings);
        }
    }

    // connections: well formed, dual, and exactly the dual pairs
    let pos: HashMap<usize, usize> = sp.copies.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let mut listed: BTreeSet<((usize, usize), (usize, usize))> = BTreeSet::new();
    let mut theta = Subst::new();
    for &((a, i), (b, j)) in &sp.connections {
        let malformed = Reject::BadConnection(a, i, b, j);
        let (Some(&x), Some(&y)) = (pos.get(&a), pos.get(&b)) else {
            return Err(malformed);
        };
        if x == y
            || i >= lits[x].len()
            || j >= lits[y].len()
            || !is_active(&sp.copies[x], i)
            || !is_active(&sp.copies[y], j)
        {
            return Err(malformed);
        }
        let (l, k) = (&lits[x][i], &lits[y][j]);
        if l.positive == k.positive || l.pred != k.pred || l.args != k.args {
            return Err(Reject::NotDual(a, i, b, j));
        }
        let key = if (a, i) <= (b, j) {
            ((a, i), (b, j))
        } else {
            ((b, j), (a, i))
        };
        listed.insert(key);
        let (l0, k0) = (&sp.copies[x].literals[i], &sp.copies[y].literals[j]);
        if !l0.args.iter().zip(&k0.args).all(|(s, t)| unify(&mut theta, s, t)) {
            return Err(Reject::NotDual(a, i, b, j));
        }
    }
    for x in 0..sp.copies.len() {
        for y in x + 1..sp.copies.len() {
            for (i, l) in lits[x].iter().enumerate() {
                for (j, k) in lits[y].iter().enumerate() {
                    if !is_active(&sp.copies[x], i) || !is_active(&sp.copies[y], j) {
                        continue;
                    }
                    if l.positive != k.positive && l.pred == k.pred && l.args == k.args {
                        let (a, b) = ((sp.copies[x].id, i), (sp.copies[y].id, j));
                        let key = if a <= b { (a, b) } else { (b, a) };
                        if !listed.contains(&key) {
                            return Err(Reject::MissingConnection(a.0, a.1, b.0, b.1));
                        }
                    }
                }
            }
        }
    }
    // the bindings must be the unifier of the connections, up to renaming
    let mut fwd: HashMap<VarId, VarId> = HashMap::new();
    let mut back: HashMap<VarId, VarId> = HashMap::new();
    fn variant(s: &Term, t: &Term, fwd: &mut HashMap<VarId, VarId>, back: &mut HashMap<VarId, VarId>) -> bool {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| variant(a, b, fwd, back))
            }
            _ => false,
        }
    }
    let mut sorted: Vec<VarId> = copy_vars.iter().copied().collect();
    sorted.sort_unstable();
    for v in sorted {
        let mine = apply(&theta, &Term::Var(v), 0).ok_or(Reject::CyclicBindings)?;
        let theirs = apply(&sigma, &Term::Var(v), 0).ok_or(Reject::CyclicBindings)?;
        if !variant(&mine, &theirs, &mut fwd, &mut back) {
            return Err(Reject::NotMostGeneral);
        }
    }

    // every path through the active literals is closed
    let rows: Vec<Vec<(usize, &Literal)>> = sp
        .copies
        .iter()
        .zip(&lits)
        .map(|(c, ls)| ls.iter().enumerate().filter(|(i, _)| is_active(c, *i)).collect())
        .collect();
    if let Some(path) = open_path(&rows) {
        let named = path.iter().enumerate().map(|(x, &i)| (sp.copies[x].id, i)).collect();
        return Err(Reject::OpenPath(named));
    }
    Ok(())
}

fn occurs_strictly(s: &Subst, v: VarId) -> bool {
    match s.get(&v) {
        Some(t) => occurs(s, v, t),
        None => false,
    }
}

/// An open path (one literal index per row) if any.
fn open_path(rows: &[Vec<(usize, &Literal)>]) -> Option<Vec<usize>> {
    if rows.len() <= 6 {
        fn dfs<'a>(rows: &[Vec<(usize, &'a Literal)>], picked: &mut Vec<(usize, &'a Literal)>) -> bool {
            let Some(row) = rows.get(picked.len()) else {
                return true;
            };
            for &(i, l) in row {
                if picked
                    .iter()
                    .any(|(_, p)| p.positive != l.positive && p.pred == l.pred && p.args == l.args)
                {
                    continue;
                }
                picked.push((i, l));
                if dfs(rows, picked) {
                    return true;
                }
                picked.pop();
            }
            false
        }
        let mut picked = Vec::new();
        return dfs(rows, &mut picked).then(|| picked.iter().map(|(i, _)| *i).collect());
    }
    // a path is open iff the rows, read as propositional clauses, are satisfiable
    let mut atoms: HashMap<(crate::problem::Pred, Vec<Term>), i64> = HashMap::new();
    let clauses: Vec<Vec<i64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|(_, l)| {
                    let next = atoms.len() as i64 + 1;
                    let a = *atoms.entry((l.pred, l.args.clone())).or_insert(next);
                    if l.positive {
                        a
                    } else {
                        -a
                    }
                })
                .collect()
        })
        .collect();
    let model = dpll(&clauses, atoms.len())?;
    Some(
        rows.iter()
            .zip(&clauses)
            .map(|(row, cl)| {
                let k = cl
                    .iter()
                    .position(|&l| (model[(l.unsigned_abs() - 1) as usize] > 0) == (l > 0));
                row[k.expect("model satisfies every row")].0
            })
            .collect(),
    )
}

/// Every assignment to the component guards is refuted by some sub-proof.
fn check_coverage(cl: &Clauses<'_>, doc: &ProofDocument) -> Result<(), Reject> {
    let total = cl.problem.clauses.len() + cl.instances.len();
    let mut guard: HashMap<(usize, usize), i64> = HashMap::new();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut comps: HashMap<usize, Vec<BTreeSet<usize>>> = HashMap::new();
    for c in 0..total {
        let g = components(cl.literals(c).unwrap_or(&[]));
        if g.len() > 1 {
            let mut cover = Vec::new();
            for i in 0..g.len() {
                let v = guard.len() as i64 + 1;
                guard.insert((c, i), v);
                cover.push(v);
            }
            clauses.push(cover);
            comps.insert(c, g);
        }
    }
    for sp in &doc.subproofs {
        let mut block: BTreeSet<i64> = BTreeSet::new();
        for c in &sp.copies {
            let Some(g) = comps.get(&c.clause) else {
                if c.active.as_ref().is_some_and(|a| a.len() != c.literals.len()) {
                    return Err(Reject::BadActive(c.id));
                }
                continue;
            };
            let active: BTreeSet<usize> = match &c.active {
                Some(a) => a.iter().copied().collect(),
                None => (0..c.literals.len()).collect(),
            };
            for (i, comp) in g.iter().enumerate() {
                if comp.is_subset(&active) {
                    block.insert(-guard[&(c.clause, i)]);
                }
            }
        }
        clauses.push(block.into_iter().collect());
    }
    if satisfiable(&clauses, guard.len()) {
        return Err(Reject::NotCovered);
    }
    Ok(())
}

pub fn check_proof(doc: &ProofDocument, problem: &Problem) -> Result<(), Reject> {
    if doc.problem_hash != problem_hash(problem) {
        return Err(Reject::ProblemMismatch);
    }
    if doc.subproofs.is_empty() {
        return Err(Reject::NoSubproof);
    }
    let split = doc.mode == Mode::Avatar;
    if !split
        && (doc.subproofs.len() != 1
            || !doc.instances.is_empty()
            || doc.subproofs[0].copies.iter().any(|c| c.active.is_some()))
    {
        return Err(Reject::Shape(doc.mode));
    }
    let n = problem.clauses.len();
    let mut cl = Clauses {
        problem,
        instances: Vec::new(),
        start: problem.start.iter().copied().collect(),
    };
    for (i, inst) in doc.instances.iter().enumerate() {
        let parent = cl.literals(inst.parent).map(|l| l.to_vec());
        let ok = inst.clause == n + i
            && parent.is_some_and(|p| {
                let mut rho = Subst::new();
                p.len() == inst.literals.len()
                    && p.iter().zip(&inst.literals).all(|(a, b)| {
                        a.positive == b.positive
                            && a.pred == b.pred
                            && a.args.len() == b.args.len()
                            && a.args.iter().zip(&b.args).all(|(s, t)| matches(s, t, &mut rho))
                    })
            });
        if !ok {
            return Err(Reject::BadInstance(i));
        }
        if cl.start.contains(&inst.parent) {
            cl.start.insert(inst.clause);
        }
        cl.instances.push(inst.literals.clone());
    }
    for (i, sp) in doc.subproofs.iter().enumerate() {
        check_subproof(&cl, i, sp)?;
    }
    if split {
        check_coverage(&cl, doc)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    #[test]
    fn dpll_basics() {
        assert!(satisfiable(&[vec![1, 2], vec![-1]], 2));
        assert!(!satisfiable(&[vec![1], vec![-1, 2], vec![-2]], 2));
        assert!(!satisfiable(&[vec![]], 0));
    }

    #[test]
    fn components_follow_shared_variables() {
        let p = parse_problem("cnf(a, axiom, p(X) | q(Y) | r(X, Z) | s(Z)).").unwrap();
        let g = components(&p.clauses[0].literals);
        assert_eq!(g, vec![BTreeSet::from([0, 2, 3]), BTreeSet::from([1])]);
    }

    #[test]
    fn renaming_must_be_injective() {
        let p = parse_problem("cnf(a, axiom, p(X, Y)). cnf(b, axiom, p(Z, Z)).").unwrap();
        assert!(renaming(&p.clauses[0].literals, &p.clauses[1].literals).is_err());
        assert!(renaming(&p.clauses[1].literals, &p.clauses[0].literals).is_err());
    }
}
