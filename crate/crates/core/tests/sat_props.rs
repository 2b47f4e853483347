use matcop::sat::{Context, LBool, Lit, Propagator, SolveResult, Solver, Var};
use proptest::prelude::*;

fn brute_force_sat(n: usize, clauses: &[Vec<i32>], assumptions: &[i32]) -> bool {
    (0..1u32 << n).any(|m| {
        let val = |d: i32| ((m >> (d.unsigned_abs() - 1)) & 1 == 1) == (d > 0);
        assumptions.iter().all(|&a| val(a)) && clauses.iter().all(|c| c.iter().any(|&d| val(d)))
    })
}

fn cnf(max_vars: i32) -> impl Strategy<Value = Vec<Vec<i32>>> {
    let lit = (1..=max_vars, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
    prop::collection::vec(prop::collection::vec(lit, 0..4), 0..14)
}

fn build(n: usize, clauses: &[Vec<i32>]) -> Solver {
    let mut s = Solver::new();
    s.new_vars(n);
    for c in clauses {
        let lits: Vec<Lit> = c.iter().map(|&d| Lit::from_dimacs(d)).collect();
        s.add_clause(&lits);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn agrees_with_enumeration_on_three_variables(clauses in cnf(3)) {
        let mut s = build(3, &clauses);
        let expect = brute_force_sat(3, &clauses, &[]);
        let got = s.solve(&[]);
        prop_assert_eq!(got == SolveResult::Sat, expect);
        if got == SolveResult::Sat {
            for c in &clauses {
                prop_assert!(c.iter().any(|&d| s.model_value(Lit::from_dimacs(d))));
            }
        }
    }

    #[test]
    fn models_and_cores_under_assumptions(
        clauses in cnf(6),
        assumed in prop::collection::vec((1..=6i32, any::<bool>()), 0..5),
    ) {
        let assumptions: Vec<i32> = assumed.iter().map(|&(v, s)| if s { v } else { -v }).collect();
        let lits: Vec<Lit> = assumptions.iter().map(|&d| Lit::from_dimacs(d)).collect();
        let mut s = build(6, &clauses);
        let got = s.solve(&lits);
        prop_assert_eq!(got == SolveResult::Sat, brute_force_sat(6, &clauses, &assumptions));
        if got == SolveResult::Unsat {
            let core: Vec<Lit> = s.core().to_vec();
            prop_assert!(core.iter().all(|l| lits.contains(l)));
            // the core alone is still contradictory
            let core_d: Vec<i32> = core.iter().map(|l| l.to_dimacs()).collect();
            prop_assert!(!brute_force_sat(6, &clauses, &core_d));
            let mut again = build(6, &clauses);
            prop_assert_eq!(again.solve(&core), SolveResult::Unsat);
        }
    }

    #[test]
    fn solving_is_incremental(clauses in cnf(5), extra in cnf(5)) {
        let mut s = build(5, &clauses);
        s.solve(&[]);
        for c in &extra {
            let lits: Vec<Lit> = c.iter().map(|&d| Lit::from_dimacs(d)).collect();
            s.add_clause(&lits);
        }
        let all: Vec<Vec<i32>> = clauses.iter().chain(&extra).cloned().collect();
        prop_assert_eq!(s.solve(&[]) == SolveResult::Sat, brute_force_sat(5, &all, &[]));
    }

    #[test]
    fn lazy_clauses_match_eager_ones(clauses in cnf(5), lazy in cnf(5)) {
        // clauses delivered only through the model hook
        struct Lazy(Vec<Vec<Lit>>);
        impl Propagator for Lazy {
            fn check_model(&mut self, ctx: &mut Context<'_>) {
                if let Some(c) = self.0.iter().find(|c| c.iter().all(|&l| ctx.value(l) == LBool::False)) {
                    ctx.add_clause(c);
                }
            }
        }
        let mut s = build(5, &clauses);
        let mut hook = Lazy(lazy.iter().map(|c| c.iter().map(|&d| Lit::from_dimacs(d)).collect()).collect());
        let all: Vec<Vec<i32>> = clauses.iter().chain(&lazy).cloned().collect();
        let got = s.solve_with(&[], &mut hook);
        prop_assert_eq!(got == SolveResult::Sat, brute_force_sat(5, &all, &[]));
    }

    #[test]
    fn observed_assignments_are_consistent(clauses in cnf(5)) {
        // a shadow trail kept from notifications must match the solver's values
        struct Shadow(Vec<(u32, Lit)>, bool);
        impl Propagator for Shadow {
            fn notify_assignment(&mut self, lit: Lit, ctx: &mut Context<'_>) {
                self.0.push((ctx.decision_level(), lit));
            }
            fn notify_backtrack(&mut self, level: u32) {
                self.0.retain(|(l, _)| *l <= level);
            }
            fn check_model(&mut self, ctx: &mut Context<'_>) {
                for &(_, l) in &self.0 {
                    if ctx.value(l) != LBool::True {
                        self.1 = false;
                    }
                }
                self.1 &= self.0.len() == ctx.num_vars();
            }
        }
        let mut s = build(5, &clauses);
        for v in 0..5 {
            s.set_observed(Var(v), true);
        }
        let mut sh = Shadow(Vec::new(), true);
        s.solve_with(&[], &mut sh);
        prop_assert!(sh.1);
    }
}
