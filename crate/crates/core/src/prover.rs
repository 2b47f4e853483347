//! Strategy dispatch. Every proof leaves here as a document the
//! independent checker has already accepted.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::avatar::{prove_avatar, AvatarOutcome, SplitProof};
use crate::check::check_proof;
use crate::matrix::{
    IncrementPolicy, MatrixOptions, MatrixProof, MatrixSearch, SearchOutcome, SearchStats, StopReason,
};
use crate::problem::{Problem, StartPolicy};
use crate::proof::{DocCopy, InstanceRecord, Mode, ProofDocument, SubProof};
use crate::tableau::{prove_tableau, TableauOptions, TableauOutcome, TableauProof};

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    /// Overrides the start clauses chosen at parse time.
    pub start: Option<StartPolicy>,
    /// Largest copy count (matrix mode) or branch length (tableau mode).
    pub max_depth: u32,
    pub timeout: Option<Duration>,
    pub max_solves: Option<u64>,
    pub max_rounds: Option<u64>,
    pub copy_order: bool,
    pub subst_order: bool,
    pub instance_sym: bool,
    pub epr_caps: bool,
    pub increment: IncrementPolicy,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            mode: Mode::Core,
            start: None,
            max_depth: 16,
            timeout: None,
            max_solves: None,
            max_rounds: None,
            copy_order: true,
            subst_order: true,
            instance_sym: true,
            epr_caps: true,
            increment: IncrementPolicy::Fair,
        }
    }
}

impl Config {
    pub fn matrix_options(&self, deadline: Option<Instant>) -> MatrixOptions {
        MatrixOptions {
            copy_order: self.copy_order,
            subst_order: self.subst_order,
            instance_sym: self.instance_sym,
            epr_caps: self.epr_caps,
            finite_domain: self.epr_caps,
            increment: self.increment,
            max_rounds: self.max_rounds,
            max_solves: self.max_solves,
            deadline,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Theorem(ProofDocument),
    NonTheorem,
    Unknown(StopReason),
}

impl Verdict {
    pub fn is_theorem(&self) -> bool {
        matches!(self, Verdict::Theorem(_))
    }

    /// SZS-style status word.
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Theorem(_) => "Unsatisfiable",
            Verdict::NonTheorem => "Satisfiable",
            Verdict::Unknown(StopReason::Timeout) => "Timeout",
            Verdict::Unknown(_) => "GaveUp",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

pub fn prove(problem: &Problem, config: &Config) -> Report {
    let started = Instant::now();
    let restarted;
    let problem = match config.start {
        Some(policy) if policy != problem.start_policy => {
            restarted = problem.clone().with_start_policy(policy);
            &restarted
        }
        _ => problem,
    };
    let deadline = config.timeout.map(|t| started + t);
    let (verdict, stats) = match config.mode {
        Mode::Matrix => prove_matrix(problem, config, deadline),
        Mode::Core => {
            let mut search = MatrixSearch::with_cores(problem, config.matrix_options(deadline));
            let outcome = search.run();
            let stats = search.stats();
            let v = match outcome {
                SearchOutcome::Proof(p) => certify(problem, matrix_document(problem, Mode::Core, &p, &stats)),
                SearchOutcome::NonTheorem => Verdict::NonTheorem,
                SearchOutcome::Exhausted => Verdict::Unknown(StopReason::DepthLimit),
                SearchOutcome::Unknown(r) => Verdict::Unknown(r),
            };
            (v, stats)
        }
        Mode::Avatar => {
            let (outcome, st) = prove_avatar(problem, &config.matrix_options(deadline));
            let v = match outcome {
                AvatarOutcome::Proof(sp) => certify(problem, split_document(problem, &sp, &st.inner, st.guard_models)),
                AvatarOutcome::NonTheorem => Verdict::NonTheorem,
                AvatarOutcome::Unknown(r) => Verdict::Unknown(r),
            };
            (v, st.inner)
        }
        Mode::Tableau => {
            let opts = TableauOptions {
                max_depth: config.max_depth,
                deadline,
                max_solves: config.max_solves,
            };
            let (outcome, stats) = prove_tableau(problem, &opts);
            let v = match outcome {
                TableauOutcome::Proof(t) => certify(problem, tableau_document(problem, &t, &stats)),
                TableauOutcome::NonTheorem => Verdict::NonTheorem,
                TableauOutcome::Unknown(r) => Verdict::Unknown(r),
            };
            (v, stats)
        }
    };
    Report {
        verdict,
        stats,
        elapsed: started.elapsed(),
    }
}

/// Fixed-size searches with one, two, ... copies per clause. Size
/// statistics describe the last run; effort statistics are summed.
fn prove_matrix(problem: &Problem, config: &Config, deadline: Option<Instant>) -> (Verdict, SearchStats) {
    let mut total = SearchStats::default();
    for d in 1..=config.max_depth.max(1) {
        let mut opts = config.matrix_options(deadline);
        if let Some(m) = config.max_solves {
            if total.solve_calls >= m {
                return (Verdict::Unknown(StopReason::SolveLimit), total);
            }
            opts.max_solves = Some(m - total.solve_calls);
        }
        let mut search = MatrixSearch::fixed_depth(problem, d, opts);
        let outcome = search.run();
        let last = search.stats();
        total.absorb(&last);
        total.selectors = last.selectors;
        total.connection_vars = last.connection_vars;
        total.theory_atoms = last.theory_atoms;
        total.sat_vars = last.sat_vars;
        total.depth = d;
        match outcome {
            SearchOutcome::Proof(p) => {
                return (
                    certify(problem, matrix_document(problem, Mode::Matrix, &p, &total)),
                    total,
                )
            }
            SearchOutcome::Exhausted => {}
            SearchOutcome::NonTheorem => return (Verdict::NonTheorem, total),
            SearchOutcome::Unknown(r) => return (Verdict::Unknown(r), total),
        }
    }
    (Verdict::Unknown(StopReason::DepthLimit), total)
}

fn certify(problem: &Problem, doc: ProofDocument) -> Verdict {
    match check_proof(&doc, problem) {
        Ok(()) => Verdict::Theorem(doc),
        Err(e) => {
            debug_assert!(false, "checker rejected a found proof: {e:?}");
            Verdict::Unknown(StopReason::InvalidProof)
        }
    }
}

fn size_stats(problem: &Problem, stats: &SearchStats) -> Vec<(String, u64)> {
    let mut out = vec![
        ("clauses".to_string(), problem.clauses.len() as u64),
        ("literals".to_string(), problem.total_literals() as u64),
    ];
    out.extend(stats.pairs().into_iter().map(|(k, v)| (k.to_string(), v)));
    out
}

fn subproof(p: &MatrixProof) -> SubProof {
    let index: HashMap<(usize, u32), usize> = p
        .copies
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.clause, c.index), i))
        .collect();
    let copies = p
        .copies
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let active = p.active.as_ref().and_then(|a| {
                let on = &a[i];
                (!on.iter().all(|&x| x)).then(|| (0..on.len()).filter(|&j| on[j]).collect())
            });
            DocCopy {
                id: i,
                clause: c.clause,
                k: c.index,
                var_base: c.var_base,
                literals: c.literals.clone(),
                active,
            }
        })
        .collect();
    let connections = p
        .connections
        .iter()
        .map(|(a, b)| {
            (
                (index[&(a.copy.clause, a.copy.k)], a.lit),
                (index[&(b.copy.clause, b.copy.k)], b.lit),
            )
        })
        .collect();
    SubProof {
        copies,
        bindings: p.bindings.clone(),
        connections,
    }
}

pub fn matrix_document(problem: &Problem, mode: Mode, p: &MatrixProof, stats: &SearchStats) -> ProofDocument {
    let mut doc = ProofDocument::new(problem, mode);
    doc.subproofs.push(subproof(p));
    doc.stats = size_stats(problem, stats);
    doc
}

pub fn split_document(problem: &Problem, sp: &SplitProof, stats: &SearchStats, guard_models: u64) -> ProofDocument {
    let mut doc = ProofDocument::new(problem, Mode::Avatar);
    let n = problem.clauses.len();
    doc.instances = sp
        .instances
        .iter()
        .enumerate()
        .map(|(i, (parent, lits))| InstanceRecord {
            clause: n + i,
            parent: *parent,
            literals: lits.clone(),
        })
        .collect();
    doc.subproofs = sp.subproofs.iter().map(subproof).collect();
    doc.stats = size_stats(problem, stats);
    doc.stats.push(("guard_models".to_string(), guard_models));
    doc
}

pub fn tableau_document(problem: &Problem, t: &TableauProof, stats: &SearchStats) -> ProofDocument {
    let mut doc = ProofDocument::new(problem, Mode::Tableau);
    let mut seen: HashMap<usize, u32> = HashMap::new();
    let copies = t
        .copies
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = seen.entry(c.clause).or_insert(0);
            *k += 1;
            DocCopy {
                id: i,
                clause: c.clause,
                k: *k,
                var_base: c.var_base,
                literals: c.literals.clone(),
                active: None,
            }
        })
        .collect();
    doc.subproofs.push(SubProof {
        copies,
        bindings: t.bindings.clone(),
        connections: t.connections.clone(),
    });
    doc.stats = size_stats(problem, stats);
    doc
}
