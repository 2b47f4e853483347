//! Matrix encodings: a fixed number of clause copies (`fixed_depth`) or
//! multiplicities grown from unsatisfiable cores (`with_cores`). The SAT
//! solver picks copies and connections; the unification theory keeps the
//! substitution consistent; complete models are checked for spanning and
//! refuted with open-path clauses.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use crate::problem::{ClauseCopy, LitRef, Literal, Pred, Problem, Sym, Term, VarId};
use crate::refine::{self, ClauseOrder};
use crate::sat::{cardinality, ClauseSink, Context, LBool, Lit, Propagator, SolveResult, Solver, Var};
use crate::theory::{AtomId, ConstraintKind, Explanation, TheoryMark, UnificationTheory};
use crate::unify::Substitution;

/// Copy `k` (1-based) of input clause `clause`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopyId {
    pub clause: usize,
    pub k: u32,
}

/// A literal occurrence inside a clause copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occ {
    pub copy: CopyId,
    pub lit: usize,
}

impl Occ {
    pub fn new(clause: usize, k: u32, lit: usize) -> Occ {
        Occ {
            copy: CopyId { clause, k },
            lit,
        }
    }

    pub fn lit_ref(self) -> LitRef {
        LitRef {
            clause: self.copy.clause as u32,
            lit: self.lit as u32,
        }
    }
}

pub fn copy_id(c: &ClauseCopy) -> CopyId {
    CopyId {
        clause: c.clause,
        k: c.index,
    }
}

/// A spanning matrix with its substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixProof {
    pub copies: Vec<ClauseCopy>,
    /// Every pair of (active) literals in different copies made dual by the bindings.
    pub connections: Vec<(Occ, Occ)>,
    /// Fully resolved terms for every bound copy variable.
    pub bindings: Vec<(VarId, Term)>,
    /// Per copy, which literals are active; `None` means all of them.
    pub active: Option<Vec<Vec<bool>>>,
}

impl MatrixProof {
    pub fn num_copies(&self) -> usize {
        self.copies.len()
    }
}

pub fn resolve_literal(subst: &Substitution, l: &Literal) -> Literal {
    Literal {
        positive: l.positive,
        pred: l.pred,
        args: l.args.iter().map(|t| subst.resolve(t)).collect(),
    }
}

/// Package the selected copies and substitution as a proof.
pub fn decode_matrix(copies: Vec<ClauseCopy>, subst: &Substitution, active: Option<Vec<Vec<bool>>>) -> MatrixProof {
    let is_active = |ci: usize, li: usize| active.as_ref().is_none_or(|a| a[ci][li]);
    let resolved: Vec<Vec<Literal>> = copies
        .iter()
        .map(|c| c.literals.iter().map(|l| resolve_literal(subst, l)).collect())
        .collect();
    let mut connections = Vec::new();
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            for (a, la) in resolved[i].iter().enumerate() {
                for (b, lb) in resolved[j].iter().enumerate() {
                    if is_active(i, a) && is_active(j, b) && la.is_dual_of(lb) {
                        connections.push((
                            Occ {
                                copy: copy_id(&copies[i]),
                                lit: a,
                            },
                            Occ {
                                copy: copy_id(&copies[j]),
                                lit: b,
                            },
                        ));
                    }
                }
            }
        }
    }
    let mut bindings = Vec::new();
    for c in &copies {
        for v in c.var_ids() {
            if subst.is_bound(v) {
                bindings.push((v, subst.resolve(&Term::Var(v))));
            }
        }
    }
    MatrixProof {
        copies,
        connections,
        bindings,
        active,
    }
}

/// The sub-matrix on `keep` with the most general unifier of the
/// connections it retains, if that still spans.
fn restrict(proof: &MatrixProof, keep: &[usize]) -> Option<MatrixProof> {
    let copies: Vec<ClauseCopy> = keep.iter().map(|&i| proof.copies[i].clone()).collect();
    let active: Option<Vec<Vec<bool>>> = proof
        .active
        .as_ref()
        .map(|a| keep.iter().map(|&i| a[i].clone()).collect());
    let lit = |o: &Occ| copies.iter().find(|c| copy_id(c) == o.copy).map(|c| &c.literals[o.lit]);
    let mut subst = Substitution::new();
    for (a, b) in &proof.connections {
        if let (Some(l), Some(k)) = (lit(a), lit(b)) {
            if !subst.unify_args(&l.args, &k.args) {
                return None;
            }
        }
    }
    let on = |ci: usize, li: usize| active.as_ref().is_none_or(|a| a[ci][li]);
    let mut budget = 200;
    close(&copies, &mut subst, &on, &mut budget).then(|| decode_matrix(copies, &subst, active))
}

/// Extends `subst` until every path is complementary, trying the pairs of
/// each open path in turn; gives up after `budget` open paths.
fn close(copies: &[ClauseCopy], subst: &mut Substitution, on: &dyn Fn(usize, usize) -> bool, budget: &mut u32) -> bool {
    let Spanning::OpenPath(path) = spanning_check(copies, subst, on) else {
        return true;
    };
    let lit = |o: &Occ| {
        &copies
            .iter()
            .find(|c| copy_id(c) == o.copy)
            .expect("path copy")
            .literals[o.lit]
    };
    for (i, a) in path.iter().enumerate() {
        for b in &path[i + 1..] {
            let (l, k) = (lit(a), lit(b));
            if l.positive == k.positive || l.pred != k.pred {
                continue;
            }
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let mark = subst.mark();
            if subst.unify_args(&l.args, &k.args) && close(copies, subst, on, budget) {
                return true;
            }
            subst.retract_to(mark);
        }
    }
    false
}

/// Greedily drops copies a proof does not need, latest first, keeping at
/// least one start clause.
pub fn compact(problem: &Problem, proof: MatrixProof) -> MatrixProof {
    let mut keep: Vec<usize> = (0..proof.copies.len()).collect();
    let mut best = None;
    for i in (0..proof.copies.len()).rev() {
        let trial: Vec<usize> = keep.iter().copied().filter(|&j| j != i).collect();
        if !trial.iter().any(|&j| problem.is_start(proof.copies[j].clause)) {
            continue;
        }
        if let Some(p) = restrict(&proof, &trial) {
            keep = trial;
            best = Some(p);
        }
    }
    best.unwrap_or(proof)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spanning {
    Spanning,
    /// One active literal per copy, pairwise non-complementary.
    OpenPath(Vec<Occ>),
}

/// Is every path through `σ(copies)` complementary? Unbound variables are
/// treated as distinct constants. Inactive literals are left out, so a copy
/// without active literals spans trivially.
pub fn spanning_check(copies: &[ClauseCopy], subst: &Substitution, active: &dyn Fn(usize, usize) -> bool) -> Spanning {
    let mut atoms: HashMap<(Pred, Vec<Term>), Var> = HashMap::new();
    let mut solver = Solver::new();
    let mut rows: Vec<Vec<(usize, Lit)>> = Vec::with_capacity(copies.len());
    for (ci, c) in copies.iter().enumerate() {
        let mut row = Vec::new();
        for (li, l) in c.literals.iter().enumerate() {
            if !active(ci, li) {
                continue;
            }
            let args: Vec<Term> = l.args.iter().map(|t| subst.resolve(t)).collect();
            let v = *atoms.entry((l.pred, args)).or_insert_with(|| solver.new_var());
            row.push((li, Lit::new(v, l.positive)));
        }
        let lits: Vec<Lit> = row.iter().map(|x| x.1).collect();
        solver.add_clause(&lits);
        rows.push(row);
    }
    match solver.solve(&[]) {
        SolveResult::Sat => Spanning::OpenPath(
            rows.iter()
                .enumerate()
                .map(|(ci, row)| {
                    let (li, _) = row
                        .iter()
                        .rev()
                        .find(|(_, l)| solver.model_value(*l))
                        .expect("model satisfies every row");
                    Occ {
                        copy: copy_id(&copies[ci]),
                        lit: *li,
                    }
                })
                .collect(),
        ),
        _ => Spanning::Spanning,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IncrementPolicy {
    /// Grow every clause whose multiplicity assumption is in the core.
    Fair,
    /// Only ever grow this clause (for experiments; not complete).
    OnlyClause(usize),
}

#[derive(Clone, Debug)]
pub struct MatrixOptions {
    pub copy_order: bool,
    pub subst_order: bool,
    pub instance_sym: bool,
    pub epr_caps: bool,
    pub finite_domain: bool,
    pub increment: IncrementPolicy,
    pub max_rounds: Option<u64>,
    pub max_solves: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Default for MatrixOptions {
    fn default() -> MatrixOptions {
        MatrixOptions {
            copy_order: true,
            subst_order: true,
            instance_sym: true,
            epr_caps: true,
            finite_domain: true,
            increment: IncrementPolicy::Fair,
            max_rounds: None,
            max_solves: None,
            deadline: None,
        }
    }
}

impl MatrixOptions {
    pub fn plain() -> MatrixOptions {
        MatrixOptions {
            copy_order: false,
            subst_order: false,
            instance_sym: false,
            ..MatrixOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub solve_calls: u64,
    pub rounds: u64,
    pub selectors: u64,
    pub connection_vars: u64,
    pub theory_atoms: u64,
    pub sat_vars: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub models: u64,
    pub open_paths: u64,
    pub symmetry_blocks: u64,
    pub theory_conflicts: u64,
    pub domain_conflicts: u64,
    /// Largest number of copies of one clause available to the solver.
    pub depth: u32,
}

impl SearchStats {
    pub fn absorb(&mut self, o: &SearchStats) {
        self.solve_calls += o.solve_calls;
        self.rounds += o.rounds;
        self.selectors += o.selectors;
        self.connection_vars += o.connection_vars;
        self.theory_atoms += o.theory_atoms;
        self.sat_vars += o.sat_vars;
        self.conflicts += o.conflicts;
        self.decisions += o.decisions;
        self.models += o.models;
        self.open_paths += o.open_paths;
        self.symmetry_blocks += o.symmetry_blocks;
        self.theory_conflicts += o.theory_conflicts;
        self.domain_conflicts += o.domain_conflicts;
        self.depth = self.depth.max(o.depth);
    }

    pub fn pairs(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("solve_calls", self.solve_calls),
            ("rounds", self.rounds),
            ("selectors", self.selectors),
            ("connection_vars", self.connection_vars),
            ("theory_atoms", self.theory_atoms),
            ("sat_vars", self.sat_vars),
            ("conflicts", self.conflicts),
            ("decisions", self.decisions),
            ("models", self.models),
            ("open_paths", self.open_paths),
            ("symmetry_blocks", self.symmetry_blocks),
            ("theory_conflicts", self.theory_conflicts),
            ("domain_conflicts", self.domain_conflicts),
            ("depth", self.depth as u64),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Timeout,
    SolveLimit,
    RoundLimit,
    DepthLimit,
    /// A proof was found but failed independent checking.
    InvalidProof,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Timeout => "timeout",
            StopReason::SolveLimit => "solve-limit",
            StopReason::RoundLimit => "round-limit",
            StopReason::DepthLimit => "depth-limit",
            StopReason::InvalidProof => "invalid-proof",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Proof(MatrixProof),
    /// No proof with this many copies (fixed-depth search only).
    Exhausted,
    /// The core loop ran out of multiplicity assumptions to relax.
    NonTheorem,
    Unknown(StopReason),
}

#[derive(Clone, Copy, Debug)]
enum VarKind {
    Other,
    Selector(CopyId),
    Atom(AtomId),
}

struct Engine<'p> {
    problem: &'p Problem,
    opts: MatrixOptions,
    order: ClauseOrder,
    depth: Option<u32>,
    theory: UnificationTheory,
    kinds: Vec<VarKind>,
    atom_vars: Vec<Var>,
    selectors: BTreeMap<CopyId, Var>,
    copies: HashMap<CopyId, ClauseCopy>,
    conns: HashMap<(Occ, Occ), Var>,
    mu: Vec<u32>,
    caps: Vec<Option<u32>>,
    capped: Vec<bool>,
    guard: Option<Lit>,
    emitted: HashSet<CopyId>,
    level_marks: Vec<(u32, TheoryMark)>,
    active: Option<Vec<Vec<bool>>>,
    universe: Vec<Sym>,
    proof: Option<MatrixProof>,
    stats: SearchStats,
}

impl<'p> Engine<'p> {
    fn new(
        problem: &'p Problem,
        opts: MatrixOptions,
        depth: Option<u32>,
        active: Option<Vec<Vec<bool>>>,
    ) -> Engine<'p> {
        let n = problem.clauses.len();
        let caps = (0..n)
            .map(|c| (opts.epr_caps && problem.epr).then(|| refine::epr_cap(problem, c)))
            .collect();
        let mut universe = problem.constants();
        universe.sort();
        if universe.is_empty() {
            universe.push(Sym(u32::MAX));
        }
        let symmetry = opts.instance_sym && active.is_none();
        Engine {
            problem,
            order: ClauseOrder::new(problem),
            opts: MatrixOptions {
                instance_sym: symmetry,
                ..opts
            },
            depth,
            theory: UnificationTheory::new(),
            kinds: Vec::new(),
            atom_vars: Vec::new(),
            selectors: BTreeMap::new(),
            copies: HashMap::new(),
            conns: HashMap::new(),
            mu: (0..n).map(|c| problem.is_start(c) as u32).collect(),
            caps,
            capped: vec![false; n],
            guard: None,
            emitted: HashSet::new(),
            level_marks: Vec::new(),
            active,
            universe,
            proof: None,
            stats: SearchStats::default(),
        }
    }

    fn usable(&self, clause: usize) -> bool {
        !self.problem.is_tautology(clause)
    }

    fn is_active(&self, clause: usize, lit: usize) -> bool {
        self.active.as_ref().is_none_or(|a| a[clause][lit])
    }

    /// Copies of `clause` the solver may currently select.
    fn available(&self, clause: usize) -> u32 {
        if !self.usable(clause) {
            return 0;
        }
        match self.depth {
            Some(d) => d,
            None if self.capped[clause] => self.mu[clause],
            None => self.mu[clause] + 1,
        }
    }

    fn note_var(&mut self, v: Var, kind: VarKind) {
        if self.kinds.len() <= v.index() {
            self.kinds.resize(v.index() + 1, VarKind::Other);
        }
        self.kinds[v.index()] = kind;
    }

    fn kind(&self, v: Var) -> VarKind {
        self.kinds.get(v.index()).copied().unwrap_or(VarKind::Other)
    }

    fn copy(&mut self, id: CopyId) -> &ClauseCopy {
        let p = self.problem;
        self.copies.entry(id).or_insert_with(|| p.rename_copy(id.clause, id.k))
    }

    fn atom_var<S: ClauseSink>(&mut self, sink: &mut S, kind: ConstraintKind) -> Var {
        let a = self.theory.register(kind);
        let v = sink.fresh_observed_var();
        self.atom_vars.push(v);
        self.note_var(v, VarKind::Atom(a));
        self.stats.theory_atoms += 1;
        v
    }

    /// `atom ⇔ a ∧ b`.
    fn tie<S: ClauseSink>(sink: &mut S, atom: Var, a: Var, b: Var) {
        sink.add(&[a.neg(), b.neg(), atom.pos()]);
        sink.add(&[atom.neg(), a.pos()]);
        sink.add(&[atom.neg(), b.pos()]);
    }

    fn ensure_selectors<S: ClauseSink>(&mut self, sink: &mut S, clause: usize, upto: u32) {
        for k in 1..=upto {
            let id = CopyId { clause, k };
            if self.selectors.contains_key(&id) {
                continue;
            }
            let s = sink.fresh_observed_var();
            self.selectors.insert(id, s);
            self.note_var(s, VarKind::Selector(id));
            self.stats.selectors += 1;
            self.stats.depth = self.stats.depth.max(k);
            let tuple = self.copy(id).var_tuple();
            if self.opts.copy_order && k > 1 {
                sink.add(&[s.neg(), self.selectors[&CopyId { clause, k: k - 1 }].pos()]);
            }
            for j in 1..k {
                let other = CopyId { clause, k: j };
                let so = self.selectors[&other];
                let earlier = self.copy(other).var_tuple();
                let d = self.atom_var(
                    sink,
                    ConstraintKind::DistinctTuple {
                        left: earlier.clone(),
                        right: tuple.clone(),
                    },
                );
                Self::tie(sink, d, so, s);
                if self.opts.subst_order && !tuple.is_empty() {
                    let o = self.atom_var(
                        sink,
                        ConstraintKind::OrderTuple {
                            first: earlier,
                            second: tuple.clone(),
                        },
                    );
                    Self::tie(sink, o, so, s);
                }
            }
        }
    }

    fn conn<S: ClauseSink>(&mut self, sink: &mut S, a: Occ, b: Occ) -> Var {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&v) = self.conns.get(&key) {
            return v;
        }
        let left = self.copy(a.copy).literals[a.lit].clone();
        let right = self.copy(b.copy).literals[b.lit].clone();
        let v = self.atom_var(sink, ConstraintKind::Connect { left, right });
        sink.add(&[v.neg(), self.selectors[&a.copy].pos()]);
        sink.add(&[v.neg(), self.selectors[&b.copy].pos()]);
        self.conns.insert(key, v);
        self.stats.connection_vars += 1;
        v
    }

    /// Every active literal of a selected copy is connected somewhere.
    fn emit_connect<S: ClauseSink>(&mut self, sink: &mut S, c: CopyId) {
        if !self.emitted.insert(c) {
            return;
        }
        let s = self.selectors[&c];
        let p = self.problem;
        for li in 0..p.clauses[c.clause].literals.len() {
            if !self.is_active(c.clause, li) {
                continue;
            }
            let mut clause = vec![s.neg()];
            clause.extend(self.guard.map(|g| !g));
            let here = Occ { copy: c, lit: li };
            for &k in p.partners(here.lit_ref()) {
                let d = k.clause as usize;
                for kk in 1..=self.available(d) {
                    let other = Occ::new(d, kk, k.lit as usize);
                    if other.copy == c {
                        continue;
                    }
                    if self.is_active(d, other.lit) {
                        clause.push(self.conn(sink, here, other).pos());
                    } else {
                        clause.push(self.selectors[&other.copy].pos());
                    }
                }
            }
            sink.add(&clause);
        }
    }

    fn block_open_path<S: ClauseSink>(&mut self, sink: &mut S, path: &[Occ], selected: &[CopyId]) -> Vec<Lit> {
        let mut clause: Vec<Lit> = selected.iter().map(|c| self.selectors[c].neg()).collect();
        clause.extend(self.guard.map(|g| !g));
        let p = self.problem;
        for (i, &a) in path.iter().enumerate() {
            for &b in &path[i + 1..] {
                if a.copy != b.copy && p.partners(a.lit_ref()).contains(&b.lit_ref()) {
                    clause.push(self.conn(sink, a, b).pos());
                }
            }
        }
        if self.depth.is_none() {
            // connections that would pull a further copy into the matrix
            for &a in path {
                for &k in p.partners(a.lit_ref()) {
                    let d = k.clause as usize;
                    for kk in 1..=self.available(d) {
                        let other = Occ::new(d, kk, k.lit as usize);
                        if selected.contains(&other.copy) {
                            continue;
                        }
                        if self.is_active(d, other.lit) {
                            clause.push(self.conn(sink, a, other).pos());
                        } else {
                            clause.push(self.selectors[&other.copy].pos());
                        }
                    }
                }
            }
        }
        clause.sort();
        clause.dedup();
        clause
    }

    fn explanation_clause(&self, e: &Explanation) -> Vec<Lit> {
        e.atoms.iter().map(|a| self.atom_vars[a.0 as usize].neg()).collect()
    }

    fn selected(&self, ctx: &Context<'_>) -> Vec<CopyId> {
        self.selectors
            .iter()
            .filter(|(_, v)| ctx.value(v.pos()) == LBool::True)
            .map(|(c, _)| *c)
            .collect()
    }

    fn fully_connected(&self, ctx: &Context<'_>, selected: &[CopyId]) -> bool {
        selected.iter().all(|&c| {
            (0..self.problem.clauses[c.clause].literals.len())
                .filter(|&li| self.is_active(c.clause, li))
                .all(|li| {
                    let o = Occ { copy: c, lit: li };
                    let via_conn = self
                        .conns
                        .iter()
                        .any(|((a, b), v)| (*a == o || *b == o) && ctx.value(v.pos()) == LBool::True);
                    // in relaxed mode a copy containing an inactive partner stands in
                    via_conn || self.active.is_some()
                })
        })
    }

    fn begin_round(&mut self, solver: &mut Solver) -> Vec<Lit> {
        if let Some(g) = self.guard.take() {
            solver.add_clause(&[!g]);
        }
        let g = solver.new_var().pos();
        self.guard = Some(g);
        self.emitted.clear();
        for c in 0..self.problem.clauses.len() {
            let upto = self.available(c);
            self.ensure_selectors(solver, c, upto);
        }
        let roots: Vec<CopyId> = self
            .selectors
            .iter()
            .filter(|(_, v)| solver.root_value(v.pos()) == LBool::True)
            .map(|(c, _)| *c)
            .collect();
        for c in roots {
            self.emit_connect(solver, c);
        }
        // κ first: the guard must not select a copy beyond μ before its κ
        // assumption is in place, or the conflict would not mention it
        let mut assumptions = Vec::new();
        for c in 0..self.problem.clauses.len() {
            if self.usable(c) && !self.capped[c] {
                assumptions.push(
                    self.selectors[&CopyId {
                        clause: c,
                        k: self.mu[c] + 1,
                    }]
                        .neg(),
                );
            }
        }
        assumptions.push(g);
        assumptions
    }

    /// Grow multiplicities for the clauses named in a core. Returns false when
    /// the core names none (so no relaxation can help).
    fn grow(&mut self, core: &[Lit]) -> bool {
        let mut named: Vec<usize> = core
            .iter()
            .filter_map(|l| match self.kind(l.var()) {
                VarKind::Selector(id) if !l.is_positive() && id.k == self.mu[id.clause] + 1 => Some(id.clause),
                _ => None,
            })
            .collect();
        named.sort_unstable();
        named.dedup();
        if named.is_empty() {
            return false;
        }
        for c in named {
            if let IncrementPolicy::OnlyClause(d) = self.opts.increment {
                if c != d {
                    continue;
                }
            }
            self.mu[c] += 1;
            if let Some(cap) = self.caps[c] {
                if self.mu[c] >= cap {
                    self.mu[c] = cap;
                    self.capped[c] = true;
                }
            }
        }
        true
    }

    fn init_caps(&mut self) {
        for c in 0..self.problem.clauses.len() {
            if let Some(cap) = self.caps[c] {
                if self.mu[c] >= cap {
                    self.mu[c] = cap;
                    self.capped[c] = true;
                }
            }
        }
    }
}

impl Propagator for Engine<'_> {
    fn notify_assignment(&mut self, lit: Lit, ctx: &mut Context<'_>) {
        if !lit.is_positive() {
            return;
        }
        match self.kind(lit.var()) {
            VarKind::Selector(c) => self.emit_connect(ctx, c),
            VarKind::Atom(a) => {
                let level = ctx.decision_level();
                if level > 0 && self.level_marks.last().is_none_or(|(l, _)| *l < level) {
                    self.level_marks.push((level, self.theory.mark()));
                }
                if let Err(e) = self.theory.assert_atom(a, true) {
                    self.stats.theory_conflicts += 1;
                    let clause = self.explanation_clause(&e);
                    ctx.add_clause(&clause);
                }
            }
            VarKind::Other => {}
        }
    }

    fn notify_backtrack(&mut self, level: u32) {
        let mut target = None;
        while let Some(&(l, m)) = self.level_marks.last() {
            if l <= level {
                break;
            }
            target = Some(m);
            self.level_marks.pop();
        }
        if let Some(m) = target {
            self.theory.retract_to(m);
        }
    }

    fn check_model(&mut self, ctx: &mut Context<'_>) {
        self.stats.models += 1;
        debug_assert!(self.theory.check_all().is_ok());
        if self.problem.epr && self.opts.finite_domain {
            if let Err(e) = self.theory.finite_domain_check(&self.universe) {
                self.stats.domain_conflicts += 1;
                let clause = self.explanation_clause(&e);
                ctx.add_clause(&clause);
                return;
            }
        }
        let selected = self.selected(ctx);
        debug_assert!(self.fully_connected(ctx, &selected));
        let copies: Vec<ClauseCopy> = selected.iter().map(|c| self.copies[c].clone()).collect();
        let active_of = |ci: usize, li: usize| self.is_active(copies[ci].clause, li);
        match spanning_check(&copies, self.theory.substitution(), &active_of) {
            Spanning::Spanning => {
                let active = self
                    .active
                    .as_ref()
                    .map(|a| copies.iter().map(|c| a[c.clause].clone()).collect());
                self.proof = Some(decode_matrix(copies, self.theory.substitution(), active));
            }
            Spanning::OpenPath(path) => {
                self.stats.open_paths += 1;
                let clause = self.block_open_path(ctx, &path, &selected);
                ctx.add_clause(&clause);
                if self.opts.instance_sym {
                    let refs: Vec<&ClauseCopy> = copies.iter().collect();
                    for b in refine::symmetry_blocks(self.problem, &self.order, &refs, &self.theory) {
                        self.stats.symmetry_blocks += 1;
                        let mut clause: Vec<Lit> = b.copies.iter().map(|c| self.selectors[c].neg()).collect();
                        clause.extend(b.atoms.iter().map(|a| self.atom_vars[a.0 as usize].neg()));
                        ctx.add_clause(&clause);
                    }
                }
            }
        }
    }
}

/// A matrix search over one problem: the SAT solver plus the encoding state.
pub struct MatrixSearch<'p> {
    solver: Solver,
    engine: Engine<'p>,
}

impl<'p> MatrixSearch<'p> {
    /// Exactly `d` clause copies in total.
    pub fn fixed_depth(problem: &'p Problem, d: u32, opts: MatrixOptions) -> MatrixSearch<'p> {
        let mut solver = Solver::new();
        let mut engine = Engine::new(problem, opts, Some(d), None);
        let n = problem.clauses.len();
        for c in 0..n {
            if engine.usable(c) {
                engine.ensure_selectors(&mut solver, c, d);
            }
        }
        let all: Vec<Lit> = engine.selectors.values().map(|v| v.pos()).collect();
        cardinality::exactly(&mut solver, &all, d as usize);
        let mut search = MatrixSearch { solver, engine };
        search.add_start_clause();
        search
    }

    /// Multiplicities grown on demand from unsatisfiable cores.
    pub fn with_cores(problem: &'p Problem, opts: MatrixOptions) -> MatrixSearch<'p> {
        MatrixSearch::relaxed(problem, opts, None)
    }

    /// Core-driven search in which only the marked literals of each input
    /// clause have to be connected and covered by paths.
    pub fn relaxed(problem: &'p Problem, opts: MatrixOptions, active: Option<Vec<Vec<bool>>>) -> MatrixSearch<'p> {
        let mut engine = Engine::new(problem, opts, None, active);
        engine.init_caps();
        let mut search = MatrixSearch {
            solver: Solver::new(),
            engine,
        };
        for c in 0..problem.clauses.len() {
            let upto = search.engine.available(c);
            search.engine.ensure_selectors(&mut search.solver, c, upto);
        }
        search.add_start_clause();
        search
    }

    fn add_start_clause(&mut self) {
        let starts: Vec<Lit> = self
            .engine
            .problem
            .start
            .iter()
            .filter_map(|&c| self.engine.selectors.get(&CopyId { clause: c, k: 1 }))
            .map(|v| v.pos())
            .collect();
        self.solver.add_clause(&starts);
    }

    pub fn problem(&self) -> &'p Problem {
        self.engine.problem
    }

    pub fn selector(&self, c: CopyId) -> Option<Lit> {
        self.engine.selectors.get(&c).map(|v| v.pos())
    }

    /// The connection variable for two occurrences, created if needed.
    pub fn connection(&mut self, a: Occ, b: Occ) -> Lit {
        self.engine.conn(&mut self.solver, a, b).pos()
    }

    /// Add the clause refuting an open path through the `selected` copies.
    pub fn block_open_path(&mut self, path: &[Occ], selected: &[CopyId]) {
        let clause = self.engine.block_open_path(&mut self.solver, path, selected);
        self.solver.add_clause(&clause);
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.engine.mu
    }

    pub fn stats(&self) -> SearchStats {
        let mut s = self.engine.stats;
        let st = self.solver.stats();
        s.conflicts = st.conflicts;
        s.decisions = st.decisions;
        s.sat_vars = self.solver.num_vars() as u64;
        s
    }

    pub fn dimacs(&self) -> String {
        self.solver.to_dimacs()
    }

    fn out_of_time(&self) -> bool {
        self.engine.opts.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn solve_once(&mut self, assumptions: &[Lit]) -> Result<SolveResult, StopReason> {
        if self
            .engine
            .opts
            .max_solves
            .is_some_and(|m| self.engine.stats.solve_calls >= m)
        {
            return Err(StopReason::SolveLimit);
        }
        if self.out_of_time() {
            return Err(StopReason::Timeout);
        }
        self.engine.stats.solve_calls += 1;
        self.engine.proof = None;
        self.solver.budget.deadline = self.engine.opts.deadline;
        let r = self.solver.solve_with(assumptions, &mut self.engine);
        if r == SolveResult::Unknown {
            return Err(StopReason::Timeout);
        }
        Ok(r)
    }

    /// One solver call under the given assumptions, returning the proof on success.
    pub fn solve_assuming(&mut self, assumptions: &[Lit]) -> Result<Option<MatrixProof>, StopReason> {
        match self.solve_once(assumptions)? {
            SolveResult::Sat => Ok(self.engine.proof.take()),
            _ => Ok(None),
        }
    }

    pub fn run(&mut self) -> SearchOutcome {
        if self.engine.depth.is_some() {
            return match self.solve_assuming(&[]) {
                Ok(Some(p)) => SearchOutcome::Proof(p),
                Ok(None) => SearchOutcome::Exhausted,
                Err(r) => SearchOutcome::Unknown(r),
            };
        }
        loop {
            if self
                .engine
                .opts
                .max_rounds
                .is_some_and(|m| self.engine.stats.rounds >= m)
            {
                return SearchOutcome::Unknown(StopReason::RoundLimit);
            }
            self.engine.stats.rounds += 1;
            let assumptions = self.engine.begin_round(&mut self.solver);
            match self.solve_once(&assumptions) {
                Err(r) => return SearchOutcome::Unknown(r),
                Ok(SolveResult::Sat) => {
                    let proof = self.engine.proof.take().expect("accepted model carries a proof");
                    return SearchOutcome::Proof(compact(self.engine.problem, proof));
                }
                Ok(_) => {
                    let core = self.solver.core().to_vec();
                    if !self.engine.grow(&core) {
                        return SearchOutcome::NonTheorem;
                    }
                }
            }
        }
    }
}
