//! Connection tableaux as SAT: a variable per literal-at-path, start and
//! closure clauses emitted lazily as nodes are assumed present, and
//! iterative deepening on branch length.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use crate::matrix::{SearchStats, StopReason};
use crate::problem::{LitRef, Literal, Problem, Term, VarId};
use crate::sat::{ClauseSink, Context, Lit, Propagator, SolveResult, Solver, Var};
use crate::theory::{AtomId, ConstraintKind, TheoryMark, UnificationTheory};
use crate::unify::Substitution;

/// A node is a literal of a tableau clause copy: `(copy, literal index)`.
pub type Node = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabCopy {
    pub clause: usize,
    pub var_base: VarId,
    pub literals: Vec<Literal>,
    /// The node this copy extends; `None` at the root.
    pub parent: Option<Node>,
    /// Number of ancestors of each node in the copy.
    pub depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    Extension { child: usize, via: usize },
    Reduction { ancestor: Node },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauProof {
    /// Copies in the closed tableau; index 0 is the root.
    pub copies: Vec<TabCopy>,
    pub closures: BTreeMap<Node, Closure>,
    /// Most general unifier of the closing connections.
    pub bindings: Vec<(VarId, Term)>,
    /// All pairs of literals in different copies that the bindings make dual.
    pub connections: Vec<(Node, Node)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableauOutcome {
    Proof(TableauProof),
    NonTheorem,
    Unknown(StopReason),
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Other,
    Node(Node),
    Atom(AtomId),
}

struct Engine<'p> {
    problem: &'p Problem,
    limit: u32,
    theory: UnificationTheory,
    copies: Vec<TabCopy>,
    children: HashMap<(Node, usize), usize>,
    nodes: HashMap<Node, Var>,
    conns: HashMap<(Node, Node), Var>,
    exts: HashMap<(Node, LitRef), Var>,
    roots: Vec<(usize, Var)>,
    atom_vars: Vec<Var>,
    kinds: Vec<Kind>,
    next_var: VarId,
    level_marks: Vec<(u32, TheoryMark)>,
    cut: bool,
    stats: SearchStats,
}

impl<'p> Engine<'p> {
    fn note(&mut self, v: Var, k: Kind) {
        if self.kinds.len() <= v.index() {
            self.kinds.resize(v.index() + 1, Kind::Other);
        }
        self.kinds[v.index()] = k;
    }

    fn new_copy(&mut self, clause: usize, parent: Option<Node>) -> usize {
        let base = self.next_var;
        let c = &self.problem.clauses[clause];
        self.next_var += c.num_vars;
        let depth = parent.map_or(0, |(p, _)| self.copies[p].depth + 1);
        self.copies.push(TabCopy {
            clause,
            var_base: base,
            literals: c.literals.iter().map(|l| l.offset(base)).collect(),
            parent,
            depth,
        });
        self.stats.selectors += 1;
        self.stats.depth = self.stats.depth.max(depth);
        self.copies.len() - 1
    }

    fn node<S: ClauseSink>(&mut self, sink: &mut S, n: Node) -> Var {
        if let Some(&v) = self.nodes.get(&n) {
            return v;
        }
        let v = sink.fresh_observed_var();
        self.nodes.insert(n, v);
        self.note(v, Kind::Node(n));
        v
    }

    fn conn<S: ClauseSink>(&mut self, sink: &mut S, a: Node, b: Node) -> Var {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&v) = self.conns.get(&key) {
            return v;
        }
        let atom = self.theory.register(ConstraintKind::Connect {
            left: self.copies[a.0].literals[a.1].clone(),
            right: self.copies[b.0].literals[b.1].clone(),
        });
        let v = sink.fresh_observed_var();
        self.atom_vars.push(v);
        self.note(v, Kind::Atom(atom));
        self.conns.insert(key, v);
        self.stats.connection_vars += 1;
        self.stats.theory_atoms += 1;
        v
    }

    fn ancestors(&self, copy: usize) -> Vec<Node> {
        let mut out = Vec::new();
        let mut at = self.copies[copy].parent;
        while let Some(n) = at {
            out.push(n);
            at = self.copies[n.0].parent;
        }
        out
    }

    fn lit_ref(&self, n: Node) -> LitRef {
        LitRef {
            clause: self.copies[n.0].clause as u32,
            lit: n.1 as u32,
        }
    }

    /// A present node must be closed by reduction or extension.
    fn close<S: ClauseSink>(&mut self, sink: &mut S, n: Node) {
        let v = self.nodes[&n];
        let here = self.lit_ref(n);
        let partners = self.problem.partners(here).to_vec();
        let mut clause = vec![v.neg()];
        for a in self.ancestors(n.0) {
            if partners.contains(&self.lit_ref(a)) {
                clause.push(self.conn(sink, n, a).pos());
            }
        }
        if self.copies[n.0].depth < self.limit {
            for k in partners {
                let d = k.clause as usize;
                let child = match self.children.get(&(n, d)) {
                    Some(&c) => c,
                    None => {
                        let c = self.new_copy(d, Some(n));
                        self.children.insert((n, d), c);
                        c
                    }
                };
                let e = match self.exts.get(&(n, k)) {
                    Some(&e) => e,
                    None => {
                        let e = sink.fresh_var();
                        let c = self.conn(sink, n, (child, k.lit as usize));
                        sink.add(&[e.neg(), c.pos()]);
                        for j in 0..self.copies[child].literals.len() {
                            if j != k.lit as usize {
                                let m = self.node(sink, (child, j));
                                sink.add(&[e.neg(), m.pos()]);
                            }
                        }
                        self.exts.insert((n, k), e);
                        e
                    }
                };
                clause.push(e.pos());
            }
        } else if !partners.is_empty() {
            self.cut = true;
        }
        sink.add(&clause);
    }

    fn decode(&self, solver: &Solver) -> Option<TableauProof> {
        let value = |v: Var| solver.model_value(v.pos());
        let &(root, _) = self.roots.iter().find(|(_, r)| value(*r))?;
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut copies = Vec::new();
        let mut closures = BTreeMap::new();
        let mut subst = Substitution::new();
        let mut stack = vec![(root, None::<Node>, None::<usize>)];
        while let Some((c, parent, via)) = stack.pop() {
            let id = copies.len();
            map.insert(c, id);
            let mut copy = self.copies[c].clone();
            copy.parent = parent.map(|(p, l)| (map[&p], l));
            copies.push(copy);
            for j in 0..self.copies[c].literals.len() {
                if Some(j) == via {
                    continue;
                }
                let n = (c, j);
                let ext = self.problem.partners(self.lit_ref(n)).iter().find_map(|k| {
                    let e = self.exts.get(&(n, *k))?;
                    value(*e).then_some(*k)
                });
                let closure = match ext {
                    Some(k) => {
                        let child = self.children[&(n, k.clause as usize)];
                        stack.push((child, Some(n), Some(k.lit as usize)));
                        (
                            Closure::Extension {
                                child,
                                via: k.lit as usize,
                            },
                            (child, k.lit as usize),
                        )
                    }
                    None => {
                        let a = self.ancestors(c).into_iter().find(|a| {
                            self.conns
                                .get(&if n <= *a { (n, *a) } else { (*a, n) })
                                .is_some_and(|v| value(*v))
                        })?;
                        (Closure::Reduction { ancestor: a }, a)
                    }
                };
                let (l, k) = (
                    &self.copies[c].literals[j],
                    &self.copies[closure.1 .0].literals[closure.1 .1],
                );
                if !subst.unify_args(&l.args, &k.args) {
                    return None;
                }
                closures.insert(n, closure.0);
            }
        }
        // renumber copy references now that every copy has an id
        let closures = closures
            .into_iter()
            .map(|((c, j), cl)| {
                let cl = match cl {
                    Closure::Extension { child, via } => Closure::Extension {
                        child: map[&child],
                        via,
                    },
                    Closure::Reduction { ancestor } => Closure::Reduction {
                        ancestor: (map[&ancestor.0], ancestor.1),
                    },
                };
                ((map[&c], j), cl)
            })
            .collect();
        let resolved: Vec<Vec<Literal>> = copies
            .iter()
            .map(|c| {
                c.literals
                    .iter()
                    .map(|l| crate::matrix::resolve_literal(&subst, l))
                    .collect()
            })
            .collect();
        let mut connections = Vec::new();
        for x in 0..copies.len() {
            for y in x + 1..copies.len() {
                for (i, l) in resolved[x].iter().enumerate() {
                    for (j, k) in resolved[y].iter().enumerate() {
                        if l.is_dual_of(k) {
                            connections.push(((x, i), (y, j)));
                        }
                    }
                }
            }
        }
        let mut bindings = Vec::new();
        for c in &copies {
            for v in c.var_base..c.var_base + self.problem.clauses[c.clause].num_vars {
                if subst.is_bound(v) {
                    bindings.push((v, subst.resolve(&Term::Var(v))));
                }
            }
        }
        Some(TableauProof {
            copies,
            closures,
            bindings,
            connections,
        })
    }
}

impl Propagator for Engine<'_> {
    fn notify_assignment(&mut self, lit: Lit, ctx: &mut Context<'_>) {
        if !lit.is_positive() {
            return;
        }
        match self.kinds.get(lit.var().index()).copied().unwrap_or(Kind::Other) {
            Kind::Node(n) => self.close(ctx, n),
            Kind::Atom(a) => {
                let level = ctx.decision_level();
                if level > 0 && self.level_marks.last().is_none_or(|(l, _)| *l < level) {
                    self.level_marks.push((level, self.theory.mark()));
                }
                if let Err(e) = self.theory.assert_atom(a, true) {
                    self.stats.theory_conflicts += 1;
                    let clause: Vec<Lit> = e.atoms.iter().map(|a| self.atom_vars[a.0 as usize].neg()).collect();
                    ctx.add_clause(&clause);
                }
            }
            Kind::Other => {}
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

    fn check_model(&mut self, _ctx: &mut Context<'_>) {
        self.stats.models += 1;
    }
}

#[derive(Clone, Debug, Default)]
pub struct TableauOptions {
    pub max_depth: u32,
    pub deadline: Option<Instant>,
    pub max_solves: Option<u64>,
}

/// One run with branches limited to `limit` extension steps. `Ok(None)`
/// means no proof within the limit; the flag says whether the limit cut
/// anything off.
pub fn prove_at_depth(
    problem: &Problem,
    limit: u32,
    deadline: Option<Instant>,
) -> (Result<Option<TableauProof>, StopReason>, bool, SearchStats) {
    let mut solver = Solver::new();
    let mut e = Engine {
        problem,
        limit,
        theory: UnificationTheory::new(),
        copies: Vec::new(),
        children: HashMap::new(),
        nodes: HashMap::new(),
        conns: HashMap::new(),
        exts: HashMap::new(),
        roots: Vec::new(),
        atom_vars: Vec::new(),
        kinds: Vec::new(),
        next_var: 0,
        level_marks: Vec::new(),
        cut: false,
        stats: SearchStats::default(),
    };
    let mut any = Vec::new();
    for &s in &problem.start {
        if problem.is_tautology(s) {
            continue;
        }
        let c = e.new_copy(s, None);
        let r = solver.new_var();
        any.push(r.pos());
        e.roots.push((c, r));
        for j in 0..e.copies[c].literals.len() {
            let n = e.node(&mut solver, (c, j));
            solver.add_clause(&[r.neg(), n.pos()]);
        }
    }
    solver.add_clause(&any);
    solver.budget.deadline = deadline;
    e.stats.solve_calls = 1;
    let r = solver.solve_with(&[], &mut e);
    let st = solver.stats();
    e.stats.conflicts = st.conflicts;
    e.stats.decisions = st.decisions;
    e.stats.sat_vars = solver.num_vars() as u64;
    let out = match r {
        SolveResult::Sat => {
            let proof = e.decode(&solver);
            debug_assert!(proof.is_some(), "model does not describe a closed tableau");
            Ok(proof)
        }
        SolveResult::Unsat => Ok(None),
        SolveResult::Unknown => Err(StopReason::Timeout),
    };
    (out, e.cut, e.stats)
}

pub fn prove_tableau(problem: &Problem, opts: &TableauOptions) -> (TableauOutcome, SearchStats) {
    let mut total = SearchStats::default();
    for limit in 1..=opts.max_depth.max(1) {
        if opts.max_solves.is_some_and(|m| total.solve_calls >= m) {
            return (TableauOutcome::Unknown(StopReason::SolveLimit), total);
        }
        let (r, cut, stats) = prove_at_depth(problem, limit, opts.deadline);
        total.absorb(&stats);
        total.depth = limit;
        match r {
            Err(reason) => return (TableauOutcome::Unknown(reason), total),
            Ok(Some(p)) => return (TableauOutcome::Proof(p), total),
            Ok(None) if !cut => return (TableauOutcome::NonTheorem, total),
            Ok(None) => {}
        }
    }
    (TableauOutcome::Unknown(StopReason::DepthLimit), total)
}
