use matcop::matrix::{
    spanning_check, CopyId, IncrementPolicy, MatrixOptions, MatrixSearch, Occ, SearchOutcome, Spanning,
};
use matcop::parse::parse_problem;
use matcop::problem::Problem;
use matcop::unify::Substitution;

const FIG2: &str = "cnf(neg, axiom, ~p(X) | ~p(f(Y))). cnf(pos, axiom, p(Z) | p(f(Z))).";

fn two_clause() -> Problem {
    parse_problem(FIG2).unwrap()
}

fn fixed(p: &Problem, d: u32, opts: MatrixOptions) -> SearchOutcome {
    MatrixSearch::fixed_depth(p, d, opts).run()
}

#[test]
fn two_copies_are_not_enough() {
    let p = two_clause();
    for d in 1..=2 {
        assert_eq!(fixed(&p, d, MatrixOptions::default()), SearchOutcome::Exhausted);
    }
}

#[test]
fn three_copies_give_the_textbook_proof() {
    let p = two_clause();
    for opts in [MatrixOptions::default(), MatrixOptions::plain()] {
        let SearchOutcome::Proof(proof) = fixed(&p, 3, opts) else {
            panic!("expected a proof");
        };
        assert_eq!(proof.copies.len(), 3);
        assert_eq!(proof.connections.len(), 4);
        let pos = p.clause_index("pos").unwrap();
        assert_eq!(proof.copies.iter().filter(|c| c.clause == pos).count(), 1);
    }
}

#[test]
fn open_path_clause_moves_search_on() {
    let p = two_clause();
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
        assert!(subst.unify_args(&lit(a).args, &lit(b).args));
    }
    let Spanning::OpenPath(path) = spanning_check(&copies, &subst, &|_, _| true) else {
        panic!("matrix should have an open path");
    };
    assert_eq!(
        path,
        vec![Occ::new(pos, 1, 1), Occ::new(neg, 1, 1), Occ::new(neg, 2, 0)]
    );

    let mut search = MatrixSearch::fixed_depth(&p, 3, MatrixOptions::plain());
    let selected: Vec<CopyId> = copies.iter().map(matcop::matrix::copy_id).collect();
    let mut assume: Vec<_> = selected.iter().map(|c| search.selector(*c).unwrap()).collect();
    let sel_only = assume.clone();
    for (a, b) in links {
        assume.push(search.connection(a, b));
    }
    // the seeded connections by themselves cannot be completed
    assert_eq!(search.solve_assuming(&assume), Ok(None));
    search.block_open_path(&path, &selected);
    let proof = search.solve_assuming(&sel_only).unwrap().expect("spanning model");
    assert_eq!(proof.connections.len(), 4);
}

#[test]
fn core_loop_finds_chain_proof() {
    let p = parse_problem("cnf(c, axiom, p(a)). cnf(d, axiom, ~p(X) | p(f(X))). cnf(e, axiom, ~p(Y)).")
        .unwrap()
        .with_start_clauses(vec![0]);
    let mut s = MatrixSearch::with_cores(&p, MatrixOptions::default());
    match s.run() {
        SearchOutcome::Proof(proof) => assert_eq!(proof.copies.len(), 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unfair_increments_never_finish() {
    let p = parse_problem("cnf(c, axiom, p(a)). cnf(d, axiom, ~p(X) | p(f(X))). cnf(e, axiom, ~p(Y)).")
        .unwrap()
        .with_start_clauses(vec![0]);
    let opts = MatrixOptions {
        increment: IncrementPolicy::OnlyClause(1),
        max_rounds: Some(10),
        ..MatrixOptions::default()
    };
    let mut s = MatrixSearch::with_cores(&p, opts);
    assert!(matches!(s.run(), SearchOutcome::Unknown(_)));
    assert!(s.stats().rounds >= 10);
    assert!(s.multiplicities()[1] >= 10);
}

#[test]
fn subsumed_input_clause_does_not_hide_proof() {
    let p =
        parse_problem("cnf(c, axiom, p(a)). cnf(d, axiom, q(a)). cnf(e, axiom, ~p(X) | q(X)). cnf(f, axiom, ~q(Y)).")
            .unwrap()
            .with_start_clauses(vec![0]);
    let mut s = MatrixSearch::with_cores(&p, MatrixOptions::default());
    let SearchOutcome::Proof(proof) = s.run() else {
        panic!("expected proof");
    };
    let mut used: Vec<usize> = proof.copies.iter().map(|c| c.clause).collect();
    used.sort();
    assert_eq!(used, vec![0, 2, 3]);
}

#[test]
fn satisfiable_epr_terminates() {
    let p = parse_problem("cnf(a, axiom, p(X) | q(X)). cnf(b, axiom, ~p(a)). cnf(c, axiom, ~q(b)).").unwrap();
    let mut s = MatrixSearch::with_cores(&p, MatrixOptions::default());
    assert_eq!(s.run(), SearchOutcome::NonTheorem);
}

#[test]
fn ground_contradiction() {
    let p = parse_problem("cnf(a, axiom, p). cnf(b, axiom, ~p).").unwrap();
    let mut s = MatrixSearch::with_cores(&p, MatrixOptions::default());
    assert!(matches!(s.run(), SearchOutcome::Proof(_)));
}

#[test]
fn chain_from_the_goal_side() {
    for n in 1..=5 {
        let goal = (0..n).fold("a".to_string(), |t, _| format!("f({t})"));
        let p = parse_problem(&format!(
            "cnf(c, axiom, p(a)). cnf(d, axiom, ~p(X) | p(f(X))). cnf(e, negated_conjecture, ~p({goal}))."
        ))
        .unwrap();
        let mut s = MatrixSearch::with_cores(&p, MatrixOptions::default());
        let SearchOutcome::Proof(proof) = s.run() else {
            panic!("chain of length {n} not proved");
        };
        assert_eq!(proof.copies.len(), n + 2);
        assert!(s.multiplicities()[1] >= n as u32);
    }
}
