//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use matcop::check::check_proof;
use matcop::gen::{generate, Profile};
use matcop::matrix::{
    spanning_check, CopyId, IncrementPolicy, MatrixOptions, MatrixSearch, Occ, SearchOutcome, Spanning,
};
use matcop::oracle::{ground_unsat, oracle_prove, OracleVerdict};
use matcop::parse::parse_problem;
use matcop::problem::{Problem, Term};
use matcop::proof::{Mode, ProofDocument};
use matcop::prover::{prove, Config, Verdict};
use matcop::unify::Substitution;

const MODES: [Mode; 4] = [Mode::Tableau, Mode::Matrix, Mode::Core, Mode::Avatar];

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// `(name, problem, is_theorem)`; non-theorem files end in `.sat.p`.
fn corpus() -> Vec<(String, Problem, bool)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "p"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let problem = parse_problem(&std::fs::read_to_string(&p).unwrap()).unwrap();
            let theorem = !name.ends_with(".sat.p");
            (name, problem, theorem)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn load(name: &str) -> Problem {
    parse_problem(&std::fs::read_to_string(corpus_dir().join(name)).unwrap()).unwrap()
}

fn cfg(mode: Mode) -> Config {
    Config {
        mode,
        timeout: Some(Duration::from_secs(20)),
        ..Config::default()
    }
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, why: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why.into())
    }
}

fn theorem(v: Verdict) -> Result<ProofDocument, String> {
    match v {
        Verdict::Theorem(d) => Ok(d),
        other => Err(format!("expected a theorem, got {other:?}")),
    }
}

fn figure_two() -> Outcome {
    let p = load("fig2.p");
    let t = Instant::now();
    let r = prove(&p, &cfg(Mode::Matrix));
    let elapsed = t.elapsed();
    let doc = theorem(r.verdict)?;
    let sp = &doc.subproofs[0];
    let pos = p.clause_index("pos").unwrap();
    let npos = sp.copies.iter().filter(|c| c.clause == pos).count();
    ensure(sp.copies.len() == 3, format!("{} copies", sp.copies.len()))?;
    ensure(npos == 1, format!("{npos} positive copies"))?;
    ensure(
        sp.connections.len() == 4,
        format!("{} connections", sp.connections.len()),
    )?;
    check_proof(&doc, &p).map_err(|e| e.to_string())?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("3 copies, 4 connections, accepted, {elapsed:?}"))
}

fn figure_three() -> Outcome {
    let p = load("fig2.p");
    let (neg, pos) = (p.clause_index("neg").unwrap(), p.clause_index("pos").unwrap());
    let copies = vec![p.rename_copy(pos, 1), p.rename_copy(neg, 1), p.rename_copy(neg, 2)];
    let links = [
        (Occ::new(neg, 1, 0), Occ::new(pos, 1, 0)),
        (Occ::new(neg, 1, 1), Occ::new(pos, 1, 0)),
        (Occ::new(neg, 2, 0), Occ::new(pos, 1, 0)),
        (Occ::new(neg, 2, 1), Occ::new(pos, 1, 1)),
    ];
    let lit = |o: Occ| {
        copies
            .iter()
            .find(|c| c.clause == o.copy.clause && c.index == o.copy.k)
            .unwrap()
            .literals[o.lit]
            .clone()
    };
    let mut subst = Substitution::new();
    for (a, b) in links {
        ensure(
            subst.unify_args(&lit(a).args, &lit(b).args),
            "seeded connections do not unify",
        )?;
    }
    let Spanning::OpenPath(path) = spanning_check(&copies, &subst, &|_, _| true) else {
        return Err("seeded matrix reported spanning".into());
    };
    let bold = vec![Occ::new(pos, 1, 1), Occ::new(neg, 1, 1), Occ::new(neg, 2, 0)];
    ensure(path == bold, format!("open path {path:?}"))?;
    let mut search = MatrixSearch::fixed_depth(&p, 3, MatrixOptions::plain());
    let selected: Vec<CopyId> = copies.iter().map(matcop::matrix::copy_id).collect();
    let sel: Vec<_> = selected.iter().map(|c| search.selector(*c).unwrap()).collect();
    search.block_open_path(&path, &selected);
    match search.solve_assuming(&sel) {
        Ok(Some(proof)) if proof.connections.len() == 4 => {
            Ok("open path = the three bold literals; re-solve spans".into())
        }
        other => Err(format!("after blocking: {other:?}")),
    }
}

fn fairness() -> Outcome {
    let p = load("example1.p");
    let doc = theorem(prove(&p, &cfg(Mode::Core)).verdict)?;
    let used: Vec<usize> = doc.subproofs[0].copies.iter().map(|c| c.clause).collect();
    ensure(used == vec![0, 2], format!("fair proof uses clauses {used:?}"))?;
    let d = p.clause_index("d").unwrap();
    let opts = MatrixOptions {
        increment: IncrementPolicy::OnlyClause(d),
        max_rounds: Some(10),
        ..MatrixOptions::default()
    };
    let mut s = MatrixSearch::with_cores(&p, opts);
    let out = s.run();
    ensure(
        matches!(out, SearchOutcome::Unknown(_)),
        format!("unfair policy ended with {out:?}"),
    )?;
    let rounds = s.stats().rounds;
    ensure(rounds >= 10, format!("{rounds} rounds"))?;
    Ok(format!("fair: {{C, E}}; unfair: {rounds} refinements, no proof"))
}

fn subsumption() -> Outcome {
    let p = load("subsumed.p");
    let doc = theorem(prove(&p, &cfg(Mode::Core)).verdict)?;
    let mut used: Vec<&str> = doc.subproofs[0]
        .copies
        .iter()
        .map(|c| p.clauses[c.clause].name.as_str())
        .collect();
    used.sort();
    ensure(used == ["c", "e", "f"], format!("proof uses {used:?}"))?;
    check_proof(&doc, &p).map_err(|e| e.to_string())?;
    Ok("proof via C, E, F with instance symmetry on; accepted".into())
}

fn splitting() -> Outcome {
    let p = load("split.p");
    let doc = theorem(prove(&p, &cfg(Mode::Avatar)).verdict)?;
    check_proof(&doc, &p).map_err(|e| e.to_string())?;
    ensure(doc.subproofs.len() >= 2, format!("{} subproofs", doc.subproofs.len()))?;
    let binary = 1;
    let mut covered = [false; 2];
    let mut q_branch = false;
    for sp in &doc.subproofs {
        for c in sp.copies.iter().filter(|c| c.clause == binary) {
            let active = c.active.clone().unwrap_or(vec![0, 1]);
            for &i in &active {
                covered[i] = true;
            }
            if active == [1] && sp.connections.iter().any(|&(a, b)| a == (c.id, 1) || b == (c.id, 1)) {
                q_branch = true;
            }
        }
    }
    ensure(covered == [true, true], "components not covered")?;
    ensure(q_branch, "no sub-proof connects q(a) of the binary clause")?;
    Ok(format!("{} sub-proofs cover both components", doc.subproofs.len()))
}

fn epr_decision() -> Outcome {
    let mut suite = Vec::new();
    let mut seed = 0;
    while suite.len() < 50 {
        let p = generate(seed, Profile::Epr);
        if ground_unsat(&p, 100_000) == Some(false) {
            suite.push((seed, p));
        }
        seed += 1;
    }
    let mut worst = Duration::ZERO;
    for (seed, p) in &suite {
        let t = Instant::now();
        let r = prove(
            p,
            &Config {
                timeout: Some(Duration::from_secs(10)),
                ..Config::default()
            },
        );
        worst = worst.max(t.elapsed());
        ensure(
            r.verdict == Verdict::NonTheorem,
            format!("seed {seed}: {:?}", r.verdict),
        )?;
    }
    Ok(format!("50/50 NonTheorem, slowest {worst:?}"))
}

fn differential() -> Outcome {
    let mut theorems = 0;
    for seed in 0..200 {
        let p = generate(seed, Profile::Epr);
        let truth = ground_unsat(&p, 100_000).ok_or(format!("seed {seed}: grounding too large"))?;
        let r = prove(&p, &cfg(Mode::Core));
        let got = match &r.verdict {
            Verdict::Theorem(_) => true,
            Verdict::NonTheorem => false,
            Verdict::Unknown(why) => return Err(format!("seed {seed}: unknown ({why})")),
        };
        ensure(got == truth, format!("seed {seed}: prover {got}, oracle {truth}"))?;
        let bounded = oracle_prove(&p, 4);
        if let OracleVerdict::Theorem(_) = bounded {
            ensure(got, format!("seed {seed}: oracle finds a 4-copy proof"))?;
        }
        if let Verdict::Theorem(doc) = &r.verdict {
            let size = doc.subproofs[0].copies.len() as u32;
            if size <= 4 {
                ensure(
                    matches!(oracle_prove(&p, size), OracleVerdict::Theorem(_)),
                    format!("seed {seed}: oracle misses a {size}-copy proof"),
                )?;
            }
        }
        theorems += got as usize;
    }
    Ok(format!("200 problems ({theorems} theorems), 0 disagreements"))
}

fn verdict_class(v: &Verdict) -> &'static str {
    match v {
        Verdict::Theorem(_) => "theorem",
        Verdict::NonTheorem => "non-theorem",
        Verdict::Unknown(_) => "unknown",
    }
}

fn refinements() -> Outcome {
    let mut problems: Vec<(String, Problem)> = corpus().into_iter().map(|(n, p, _)| (n, p)).collect();
    problems.extend((0..200).map(|s| (format!("seed {s}"), generate(s, Profile::Epr))));
    for (name, p) in &problems {
        let mut seen = None;
        for bits in 0..8u8 {
            let c = Config {
                copy_order: bits & 1 != 0,
                subst_order: bits & 2 != 0,
                instance_sym: bits & 4 != 0,
                ..cfg(Mode::Core)
            };
            let v = verdict_class(&prove(p, &c).verdict);
            match seen {
                None => seen = Some(v),
                Some(w) => ensure(v == w, format!("{name}: {w} vs {v} with flags {bits:03b}"))?,
            }
        }
    }
    // pruning only has room to show where the unrefined search does real work
    let mut better = 0;
    let mut total = 0;
    for (name, p, theorem) in corpus() {
        if !theorem {
            continue;
        }
        let off = prove(
            &p,
            &Config {
                copy_order: false,
                subst_order: false,
                instance_sym: false,
                ..cfg(Mode::Matrix)
            },
        );
        let on = prove(&p, &cfg(Mode::Matrix));
        ensure(
            verdict_class(&on.verdict) == verdict_class(&off.verdict),
            format!("{name}: matrix verdicts differ"),
        )?;
        if off.stats.conflicts < 10 {
            continue;
        }
        total += 1;
        better += (on.stats.conflicts < off.stats.conflicts) as usize;
    }
    ensure(
        total > 0 && better * 10 >= total * 6,
        format!("fewer conflicts on {better}/{total}"),
    )?;
    Ok(format!(
        "{} problems x 8 flag sets stable; fewer conflicts on {better}/{total} non-trivial theorems",
        problems.len()
    ))
}

fn bounds() -> Outcome {
    let mut runs = 0;
    for (name, p, _) in corpus() {
        let c = p.clauses.len() as u64;
        let l = p.total_literals() as u64;
        for d in 1..=4u32 {
            let mut s = MatrixSearch::fixed_depth(
                &p,
                d,
                MatrixOptions {
                    deadline: Some(Instant::now() + Duration::from_secs(20)),
                    ..MatrixOptions::default()
                },
            );
            s.run();
            let st = s.stats();
            let d = d as u64;
            ensure(
                st.selectors <= d * c,
                format!("{name} d={d}: {} selectors", st.selectors),
            )?;
            ensure(
                st.connection_vars <= (d * l).pow(2),
                format!("{name} d={d}: {} connection variables", st.connection_vars),
            )?;
            runs += 1;
        }
        let mut s = MatrixSearch::with_cores(
            &p,
            MatrixOptions {
                deadline: Some(Instant::now() + Duration::from_secs(20)),
                ..MatrixOptions::default()
            },
        );
        s.run();
        let st = s.stats();
        let d = st.depth as u64;
        ensure(
            st.selectors <= d * c,
            format!("{name} core: {} selectors at depth {d}", st.selectors),
        )?;
        ensure(
            st.connection_vars <= (d * l).pow(2),
            format!("{name} core: {} connection variables", st.connection_vars),
        )?;
        runs += 1;
    }
    Ok(format!(
        "{runs} runs within #selectors <= d*c and #connections <= (d*l)^2"
    ))
}

/// The substitution a binding list denotes, applied to every variable of the
/// copies; `None` when the bindings are cyclic.
fn applied(sp: &matcop::proof::SubProof) -> Option<Vec<Term>> {
    let mut s = Substitution::new();
    for (v, t) in &sp.bindings {
        if !s.unify(&Term::Var(*v), t) {
            return None;
        }
    }
    let vars = sp.copies.iter().flat_map(|c| c.literals.iter().flat_map(|l| l.vars()));
    Some(vars.map(|v| s.resolve(&Term::Var(v))).collect())
}

fn mutants(doc: &ProofDocument, p: &Problem) -> Vec<(usize, ProofDocument)> {
    let mut out = Vec::new();
    let constants: Vec<Term> = p.constants().into_iter().map(Term::constant).collect();
    for (si, sp) in doc.subproofs.iter().enumerate() {
        // drop connection
        for ci in 0..sp.connections.len() {
            let mut m = doc.clone();
            m.subproofs[si].connections.remove(ci);
            out.push((0, m));
        }
        // alter binding
        for bi in 0..sp.bindings.len() {
            let (v, t) = &sp.bindings[bi];
            let mut alternatives: Vec<Term> = constants.iter().filter(|c| *c != t).cloned().collect();
            let free = sp.copies.iter().flat_map(|c| {
                let w = p.clauses.get(c.clause).map_or(0, |cl| cl.num_vars);
                c.var_base..c.var_base + w
            });
            alternatives.extend(free.filter(|w| w != v).map(Term::Var).filter(|w| w != t).take(2));
            for alt in alternatives {
                let mut m = doc.clone();
                m.subproofs[si].bindings[bi].1 = alt;
                // rebinding to a variable that is itself bound can spell the same unifier
                if applied(&m.subproofs[si]) != applied(sp) {
                    out.push((1, m));
                }
            }
        }
        // change copy: a variable out of range, or a different clause
        for (ci, c) in sp.copies.iter().enumerate() {
            if let Some(v) = c.literals.iter().flat_map(|l| l.vars()).next() {
                let mut m = doc.clone();
                let far = 1_000_000;
                m.subproofs[si].copies[ci].literals = c
                    .literals
                    .iter()
                    .map(|l| l.map_vars(&mut |w| Term::Var(if w == v { far } else { w })))
                    .collect();
                out.push((2, m));
            }
            for other in 0..p.clauses.len() {
                if other != c.clause && p.clauses[other].literals != p.clauses[c.clause].literals {
                    let mut m = doc.clone();
                    m.subproofs[si].copies[ci].clause = other;
                    out.push((2, m));
                }
            }
        }
        // remove start clause copies
        let keep: Vec<usize> = sp
            .copies
            .iter()
            .enumerate()
            .filter(|(_, c)| !p.start.contains(&c.clause))
            .map(|(i, _)| i)
            .collect();
        let mut m = doc.clone();
        let msp = &mut m.subproofs[si];
        let renumber = |i: usize| keep.iter().position(|&k| k == i);
        msp.connections = sp
            .connections
            .iter()
            .filter_map(|&((a, i), (b, j))| Some(((renumber(a)?, i), (renumber(b)?, j))))
            .collect();
        msp.copies = keep
            .iter()
            .enumerate()
            .map(|(n, &i)| {
                let mut c = sp.copies[i].clone();
                c.id = n;
                c
            })
            .collect();
        out.push((3, m));
        // flip polarity
        for (ci, c) in sp.copies.iter().enumerate() {
            for li in 0..c.literals.len() {
                let mut m = doc.clone();
                let l = &mut m.subproofs[si].copies[ci].literals[li];
                l.positive = !l.positive;
                out.push((4, m));
            }
        }
    }
    out
}

fn mutation_suite() -> Outcome {
    let mut docs = Vec::new();
    for (_, p, theorem) in corpus() {
        if !theorem {
            continue;
        }
        for mode in MODES {
            if let Verdict::Theorem(d) = prove(&p, &cfg(mode)).verdict {
                docs.push((d, p.clone()));
            }
        }
    }
    for seed in 0..60 {
        let p = generate(seed, Profile::Epr);
        if let Verdict::Theorem(d) = prove(&p, &cfg(Mode::Core)).verdict {
            docs.push((d, p));
        }
    }
    let mut counts = [(0usize, 0usize); 5];
    for (doc, p) in &docs {
        check_proof(doc, p).map_err(|e| format!("valid document rejected: {e}"))?;
        // the text form must survive a round trip too
        let again = ProofDocument::parse(&doc.render(p), p).map_err(|e| e.to_string())?;
        ensure(&again == doc, "document changed in a render/parse round trip")?;
        for (op, m) in mutants(doc, p) {
            counts[op].0 += 1;
            if check_proof(&m, p).is_err() {
                counts[op].1 += 1;
            }
        }
    }
    let names = [
        "drop connection",
        "alter binding",
        "change copy",
        "remove start",
        "flip polarity",
    ];
    let summary: Vec<String> = names
        .iter()
        .zip(counts)
        .map(|(n, (total, rejected))| format!("{n} {rejected}/{total}"))
        .collect();
    ensure(counts.iter().all(|&(t, r)| t > 0 && t == r), summary.join(", "))?;
    Ok(format!("{} documents; {}", docs.len(), summary.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("two-clause problem: 3 copies, 4 connections", figure_two),
        ("open path through a seeded matrix", figure_three),
        ("fair multiplicity growth", fairness),
        ("input-level subsumption is not applied", subsumption),
        ("clause splitting covers both components", splitting),
        ("EPR non-theorems terminate", epr_decision),
        ("differential test against the oracles", differential),
        ("refinements keep verdicts and prune", refinements),
        ("encoding size bounds", bounds),
        ("checker mutation suite", mutation_suite),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2}: PASS  {title}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {title}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
