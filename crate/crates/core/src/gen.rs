//! Seeded random CNF problems for differential testing.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parse::parse_problem;
use crate::problem::Problem;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Profile {
    /// Function-free: at most 4 clauses, 2 variables per clause, 2 constants.
    #[default]
    Epr,
    /// Like `Epr` but unary predicates and at most 3 clauses.
    Small,
    /// Adds a unary function symbol.
    Fo,
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epr" => Ok(Profile::Epr),
            "small" => Ok(Profile::Small),
            "fo" => Ok(Profile::Fo),
            other => Err(format!("unknown profile `{other}`")),
        }
    }
}

struct Shape {
    clauses: (usize, usize),
    preds: &'static [(&'static str, usize)],
    consts: &'static [&'static str],
    funcs: bool,
}

fn shape(p: Profile) -> Shape {
    match p {
        Profile::Epr => Shape {
            clauses: (3, 4),
            preds: &[("p", 1), ("q", 1), ("p", 1), ("q", 1), ("p", 1), ("q", 1), ("r", 2)],
            consts: &["a", "b"],
            funcs: false,
        },
        Profile::Small => Shape {
            clauses: (2, 3),
            preds: &[("p", 1), ("q", 1)],
            consts: &["a", "b"],
            funcs: false,
        },
        Profile::Fo => Shape {
            clauses: (2, 4),
            preds: &[("p", 1), ("q", 1)],
            consts: &["a"],
            funcs: true,
        },
    }
}

fn term(rng: &mut ChaCha8Rng, s: &Shape, vars: &[&str], depth: u32) -> String {
    let roll = rng.gen_range(0..10);
    if s.funcs && depth == 0 && roll < 3 {
        return format!("f({})", term(rng, s, vars, 1));
    }
    if roll < 6 {
        vars[rng.gen_range(0..vars.len())].to_string()
    } else {
        s.consts[rng.gen_range(0..s.consts.len())].to_string()
    }
}

/// The problem text for `seed`; deterministic in `(seed, profile)`.
pub fn generate_text(seed: u64, profile: Profile) -> String {
    let s = shape(profile);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(s.clauses.0..=s.clauses.1);
    let mut out = String::new();
    for i in 0..n {
        let width = if rng.gen_bool(0.6) { 1 } else { 2 };
        let vars: &[&str] = if rng.gen_bool(0.5) { &["X"] } else { &["X", "Y"] };
        let lits: Vec<String> = (0..width)
            .map(|_| {
                let (name, arity) = s.preds[rng.gen_range(0..s.preds.len())];
                let args: Vec<String> = (0..arity).map(|_| term(&mut rng, &s, vars, 0)).collect();
                let sign = if rng.gen_bool(0.5) { "~" } else { "" };
                format!("{sign}{name}({})", args.join(","))
            })
            .collect();
        let _ = writeln!(out, "cnf(c{i}, axiom, {}).", lits.join(" | "));
    }
    out
}

pub fn generate(seed: u64, profile: Profile) -> Problem {
    parse_problem(&generate_text(seed, profile)).expect("generated text parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ground_unsat;

    #[test]
    fn same_seed_same_problem() {
        for p in [Profile::Epr, Profile::Small, Profile::Fo] {
            assert_eq!(generate_text(7, p), generate_text(7, p));
        }
        assert_ne!(generate_text(0, Profile::Epr), generate_text(1, Profile::Epr));
    }

    #[test]
    fn epr_profile_stays_small() {
        for seed in 0..200 {
            let p = generate(seed, Profile::Epr);
            assert!(p.epr);
            assert!(p.clauses.len() <= 4);
            assert!(p.clauses.iter().all(|c| c.num_vars <= 2));
            assert!(p.constants().len() <= 2);
        }
    }

    #[test]
    fn enough_theorems() {
        let theorems = (0..200)
            .filter(|&s| ground_unsat(&generate(s, Profile::Epr), 10_000) == Some(true))
            .count();
        assert!(theorems >= 60, "{theorems}");
    }
}
