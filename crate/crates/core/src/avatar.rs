//! Clause splitting: an outer SAT solver chooses which variable-disjoint
//! components of each splittable clause are active; an inner core-driven
//! matrix search only has to connect and close paths through active
//! literals. Each inner proof blocks the guards it relied on.

use std::collections::HashMap;
use std::time::Instant;

use crate::matrix::{MatrixOptions, MatrixProof, MatrixSearch, SearchOutcome, SearchStats, StopReason};
use crate::problem::{Clause, Literal, Problem, Role, Term, VarId};
use crate::refine::components;
use crate::sat::{Lit, SolveResult, Solver, Var};

/// Recorded σ-instances are capped so the guard space stays finite.
pub const MAX_INSTANCES: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitProof {
    /// Instance clauses appended after the input, as `(parent, literals)`.
    pub instances: Vec<(usize, Vec<Literal>)>,
    pub subproofs: Vec<MatrixProof>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AvatarOutcome {
    Proof(SplitProof),
    NonTheorem,
    Unknown(StopReason),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AvatarStats {
    pub guard_models: u64,
    pub guards: u64,
    pub instances: u64,
    pub inner: SearchStats,
}

struct Guards {
    comps: Vec<Vec<Vec<usize>>>,
    vars: Vec<Vec<Var>>,
}

impl Guards {
    fn register(&mut self, outer: &mut Solver, literals: &[Literal]) {
        let comps = components(literals);
        let vars: Vec<Var> = if comps.len() > 1 {
            let vs = outer.new_vars(comps.len());
            let any: Vec<Lit> = vs.iter().map(|v| v.pos()).collect();
            outer.add_clause(&any);
            vs
        } else {
            Vec::new()
        };
        self.comps.push(comps);
        self.vars.push(vars);
    }

    fn split(&self, clause: usize) -> bool {
        !self.vars[clause].is_empty()
    }

    fn active(&self, outer: &Solver, clause: usize, width: usize) -> Vec<bool> {
        let mut a = vec![!self.split(clause); width];
        for (g, comp) in self.comps[clause].iter().enumerate() {
            if self.split(clause) && outer.model_value(self.vars[clause][g].pos()) {
                comp.iter().for_each(|&i| a[i] = true);
            }
        }
        a
    }
}

fn normalize(lits: &[Literal]) -> Vec<Literal> {
    let mut map: HashMap<VarId, VarId> = HashMap::new();
    lits.iter()
        .map(|l| {
            l.map_vars(&mut |v| {
                let n = map.len() as VarId;
                Term::Var(*map.entry(v).or_insert(n))
            })
        })
        .collect()
}

/// Copies whose σ-image splits into more components than their clause does.
fn splittable_instances(proof: &MatrixProof, comps: &[Vec<Vec<usize>>]) -> Vec<(usize, Vec<Literal>)> {
    let sigma: HashMap<VarId, Term> = proof.bindings.iter().cloned().collect();
    proof
        .copies
        .iter()
        .filter_map(|c| {
            let image: Vec<Literal> = c
                .literals
                .iter()
                .map(|l| l.map_vars(&mut |v| sigma.get(&v).cloned().unwrap_or(Term::Var(v))))
                .collect();
            (components(&image).len() > comps[c.clause].len()).then(|| (c.clause, normalize(&image)))
        })
        .collect()
}

pub fn prove_avatar(problem: &Problem, opts: &MatrixOptions) -> (AvatarOutcome, AvatarStats) {
    let mut stats = AvatarStats::default();
    let mut outer = Solver::new();
    let mut guards = Guards {
        comps: Vec::new(),
        vars: Vec::new(),
    };
    for c in &problem.clauses {
        guards.register(&mut outer, &c.literals);
    }
    let mut clauses = problem.clauses.clone();
    let mut start = problem.start.clone();
    let mut instances: Vec<(usize, Vec<Literal>)> = Vec::new();
    let mut proofs = Vec::new();
    loop {
        if opts.deadline.is_some_and(|d| Instant::now() >= d) {
            return (AvatarOutcome::Unknown(StopReason::Timeout), stats);
        }
        outer.budget.deadline = opts.deadline;
        match outer.solve(&[]) {
            SolveResult::Unsat => {
                stats.guards = guards.vars.iter().map(|v| v.len() as u64).sum();
                return (
                    AvatarOutcome::Proof(SplitProof {
                        instances,
                        subproofs: proofs,
                    }),
                    stats,
                );
            }
            SolveResult::Unknown => return (AvatarOutcome::Unknown(StopReason::Timeout), stats),
            SolveResult::Sat => {}
        }
        stats.guard_models += 1;
        let active: Vec<Vec<bool>> = clauses
            .iter()
            .enumerate()
            .map(|(i, c)| guards.active(&outer, i, c.literals.len()))
            .collect();
        let augmented;
        let current = if instances.is_empty() {
            problem
        } else {
            augmented = Problem::new(clauses.clone(), problem.symbols.clone(), problem.start_policy)
                .with_start_clauses(start.clone());
            &augmented
        };
        let mut inner_opts = opts.clone();
        if let Some(m) = opts.max_solves {
            inner_opts.max_solves = Some(m.saturating_sub(stats.inner.solve_calls));
        }
        let mut search = MatrixSearch::relaxed(current, inner_opts, Some(active));
        let outcome = search.run();
        stats.inner.absorb(&search.stats());
        let proof = match outcome {
            SearchOutcome::Proof(p) => p,
            SearchOutcome::NonTheorem | SearchOutcome::Exhausted => return (AvatarOutcome::NonTheorem, stats),
            SearchOutcome::Unknown(r) => return (AvatarOutcome::Unknown(r), stats),
        };
        let mut block: Vec<Lit> = Vec::new();
        for c in &proof.copies {
            if guards.split(c.clause) {
                for v in &guards.vars[c.clause] {
                    if outer.model_value(v.pos()) {
                        block.push(v.neg());
                    }
                }
            }
        }
        block.sort();
        block.dedup();
        let fresh = splittable_instances(&proof, &guards.comps);
        if block.is_empty() {
            // no split clause involved: this proof stands on its own
            stats.guards = guards.vars.iter().map(|v| v.len() as u64).sum();
            return (
                AvatarOutcome::Proof(SplitProof {
                    instances,
                    subproofs: vec![proof],
                }),
                stats,
            );
        }
        outer.add_clause(&block);
        proofs.push(proof);
        for (parent, lits) in fresh {
            if instances.len() >= MAX_INSTANCES || instances.iter().any(|(_, l)| *l == lits) {
                continue;
            }
            let index = clauses.len();
            clauses.push(Clause::new(
                format!("{}_inst{}", clauses[parent].name, index),
                Role::Axiom,
                lits.clone(),
            ));
            if start.contains(&parent) {
                start.push(index);
            }
            guards.register(&mut outer, &lits);
            instances.push((parent, lits));
            stats.instances += 1;
        }
    }
}
