//! First-order clausal problems: terms, literals, clauses, the symbol table,
//! start-clause selection and the precomputed potential-connection table.

use std::collections::HashMap;
use std::fmt;

use crate::unify::Substitution;

/// Copy-scoped variable identifier.
pub type VarId = u32;

/// Interned function symbol. Ids follow order of first appearance, which is
/// also the symbol precedence used by the substitution ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

/// Interned predicate symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pred(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(VarId),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn constant(sym: Sym) -> Term {
        Term::App(sym, Vec::new())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn offset(&self, by: VarId) -> Term {
        self.map_vars(&mut |v| Term::Var(v + by))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub pred: Pred,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(positive: bool, pred: Pred, args: Vec<Term>) -> Literal {
        Literal { positive, pred, args }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            ..self.clone()
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<VarId>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Term) -> Literal {
        Literal {
            positive: self.positive,
            pred: self.pred,
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }

    pub fn offset(&self, by: VarId) -> Literal {
        self.map_vars(&mut |v| Term::Var(v + by))
    }

    /// Same atom, opposite polarity.
    pub fn is_dual_of(&self, other: &Literal) -> bool {
        self.positive != other.positive && self.pred == other.pred && self.args == other.args
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Hypothesis,
    NegatedConjecture,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Hypothesis => "hypothesis",
            Role::NegatedConjecture => "negated_conjecture",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub role: Role,
    pub literals: Vec<Literal>,
    /// Variables are numbered `0..num_vars` in left-to-right order of first occurrence.
    pub num_vars: u32,
}

impl Clause {
    pub fn new(name: impl Into<String>, role: Role, literals: Vec<Literal>) -> Clause {
        let mut seen = Vec::new();
        literals.iter().for_each(|l| l.collect_vars(&mut seen));
        let num_vars = seen.iter().map(|v| v + 1).max().unwrap_or(0);
        Clause {
            name: name.into(),
            role,
            literals,
            num_vars,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.literals.iter().all(|l| l.positive)
    }

    pub fn is_tautology(&self) -> bool {
        self.literals
            .iter()
            .enumerate()
            .any(|(i, l)| self.literals[i + 1..].iter().any(|k| l.is_dual_of(k)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub functions: Vec<SymbolInfo>,
    pub predicates: Vec<SymbolInfo>,
    function_ids: HashMap<String, Sym>,
    predicate_ids: HashMap<String, Pred>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityClash {
    pub name: String,
    pub expected: usize,
    pub found: usize,
}

impl SymbolTable {
    pub fn intern_function(&mut self, name: &str, arity: usize) -> Result<Sym, ArityClash> {
        if let Some(&id) = self.function_ids.get(name) {
            let expected = self.functions[id.0 as usize].arity;
            return if expected == arity {
                Ok(id)
            } else {
                Err(ArityClash {
                    name: name.to_owned(),
                    expected,
                    found: arity,
                })
            };
        }
        let id = Sym(self.functions.len() as u32);
        self.functions.push(SymbolInfo {
            name: name.to_owned(),
            arity,
        });
        self.function_ids.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn intern_predicate(&mut self, name: &str, arity: usize) -> Result<Pred, ArityClash> {
        if let Some(&id) = self.predicate_ids.get(name) {
            let expected = self.predicates[id.0 as usize].arity;
            return if expected == arity {
                Ok(id)
            } else {
                Err(ArityClash {
                    name: name.to_owned(),
                    expected,
                    found: arity,
                })
            };
        }
        let id = Pred(self.predicates.len() as u32);
        self.predicates.push(SymbolInfo {
            name: name.to_owned(),
            arity,
        });
        self.predicate_ids.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn function(&self, name: &str) -> Option<Sym> {
        self.function_ids.get(name).copied()
    }

    pub fn predicate(&self, name: &str) -> Option<Pred> {
        self.predicate_ids.get(name).copied()
    }

    pub fn function_name(&self, sym: Sym) -> &str {
        &self.functions[sym.0 as usize].name
    }

    pub fn predicate_name(&self, pred: Pred) -> &str {
        &self.predicates[pred.0 as usize].name
    }

    pub fn function_arity(&self, sym: Sym) -> usize {
        self.functions[sym.0 as usize].arity
    }

    pub fn predicate_arity(&self, pred: Pred) -> usize {
        self.predicates[pred.0 as usize].arity
    }

    /// Constants in precedence order.
    pub fn constants(&self) -> Vec<Sym> {
        (0..self.functions.len() as u32)
            .map(Sym)
            .filter(|s| self.function_arity(*s) == 0)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StartPolicy {
    /// negated_conjecture clauses, else all-positive clauses, else everything.
    #[default]
    Ladder,
    Declared,
    Positive,
    All,
}

impl std::str::FromStr for StartPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ladder" | "auto" => Ok(StartPolicy::Ladder),
            "declared" | "conjecture" => Ok(StartPolicy::Declared),
            "positive" => Ok(StartPolicy::Positive),
            "all" => Ok(StartPolicy::All),
            other => Err(format!("unknown start policy `{other}`")),
        }
    }
}

impl fmt::Display for StartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StartPolicy::Ladder => "ladder",
            StartPolicy::Declared => "declared",
            StartPolicy::Positive => "positive",
            StartPolicy::All => "all",
        })
    }
}

/// A literal position inside an input clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LitRef {
    pub clause: u32,
    pub lit: u32,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub clauses: Vec<Clause>,
    pub symbols: SymbolTable,
    pub start: Vec<usize>,
    pub start_policy: StartPolicy,
    pub epr: bool,
    tautology: Vec<bool>,
    var_prefix: Vec<u32>,
    vars_per_layer: u32,
    partners: Vec<Vec<Vec<LitRef>>>,
}

impl Problem {
    pub fn new(clauses: Vec<Clause>, symbols: SymbolTable, policy: StartPolicy) -> Problem {
        let epr = symbols.functions.iter().all(|f| f.arity == 0);
        let tautology: Vec<bool> = clauses.iter().map(Clause::is_tautology).collect();
        let mut var_prefix = Vec::with_capacity(clauses.len());
        let mut acc = 0;
        for c in &clauses {
            var_prefix.push(acc);
            acc += c.num_vars;
        }
        let mut problem = Problem {
            clauses,
            symbols,
            start: Vec::new(),
            start_policy: policy,
            epr,
            tautology,
            var_prefix,
            vars_per_layer: acc,
            partners: Vec::new(),
        };
        problem.start = choose_start_clauses(&problem, policy);
        problem.partners = problem.compute_partners();
        problem
    }

    pub fn with_start_policy(mut self, policy: StartPolicy) -> Problem {
        self.start_policy = policy;
        self.start = choose_start_clauses(&self, policy);
        self
    }

    /// Replace the start set with an explicit list of clause indices.
    pub fn with_start_clauses(mut self, start: Vec<usize>) -> Problem {
        assert!(!start.is_empty());
        self.start = start;
        self
    }

    pub fn is_start(&self, clause: usize) -> bool {
        self.start.contains(&clause)
    }

    pub fn is_tautology(&self, clause: usize) -> bool {
        self.tautology[clause]
    }

    pub fn literal(&self, r: LitRef) -> &Literal {
        &self.clauses[r.clause as usize].literals[r.lit as usize]
    }

    /// Literals `K` with `L ⋈ K`, over non-tautological clauses.
    pub fn partners(&self, r: LitRef) -> &[LitRef] {
        &self.partners[r.clause as usize][r.lit as usize]
    }

    pub fn total_literals(&self) -> usize {
        self.clauses.iter().map(|c| c.literals.len()).sum()
    }

    pub fn constants(&self) -> Vec<Sym> {
        self.symbols.constants()
    }

    pub fn clause_index(&self, name: &str) -> Option<usize> {
        self.clauses.iter().position(|c| c.name == name)
    }

    /// First variable id of copy `k` (1-based) of `clause`. Layers of `sum(num_vars)`
    /// ids are handed out per copy index, so distinct `(clause, k)` never overlap.
    pub fn copy_var_base(&self, clause: usize, k: u32) -> VarId {
        assert!(k >= 1, "copy indices start at 1");
        (k - 1) * self.vars_per_layer + self.var_prefix[clause]
    }

    /// The `k`-th copy of `clause`, variables renamed into copy scope.
    pub fn rename_copy(&self, clause: usize, k: u32) -> ClauseCopy {
        let base = self.copy_var_base(clause, k);
        let c = &self.clauses[clause];
        ClauseCopy {
            clause,
            index: k,
            var_base: base,
            num_vars: c.num_vars,
            literals: c.literals.iter().map(|l| l.offset(base)).collect(),
        }
    }

    fn compute_partners(&self) -> Vec<Vec<Vec<LitRef>>> {
        let refs: Vec<LitRef> = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(ci, _)| !self.tautology[*ci])
            .flat_map(|(ci, c)| {
                (0..c.literals.len()).map(move |li| LitRef {
                    clause: ci as u32,
                    lit: li as u32,
                })
            })
            .collect();
        self.clauses
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                (0..c.literals.len())
                    .map(|li| {
                        if self.tautology[ci] {
                            return Vec::new();
                        }
                        let lit = &c.literals[li];
                        refs.iter()
                            .copied()
                            .filter(|r| can_connect(lit, self.literal(*r)))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// A renamed-apart copy `C^k` of an input clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseCopy {
    pub clause: usize,
    pub index: u32,
    pub var_base: VarId,
    pub num_vars: u32,
    pub literals: Vec<Literal>,
}

impl ClauseCopy {
    /// The copy's variables in left-to-right order of first occurrence.
    pub fn var_tuple(&self) -> Vec<Term> {
        (0..self.num_vars).map(|v| Term::Var(self.var_base + v)).collect()
    }

    pub fn var_ids(&self) -> std::ops::Range<VarId> {
        self.var_base..self.var_base + self.num_vars
    }
}

/// `L ⋈ K`: opposite polarity, same predicate, and the atoms unify once the two
/// literals are renamed apart. The current global substitution plays no part.
pub fn can_connect(l: &Literal, k: &Literal) -> bool {
    if l.positive == k.positive || l.pred != k.pred || l.args.len() != k.args.len() {
        return false;
    }
    let shift = l.vars().into_iter().map(|v| v + 1).max().unwrap_or(0);
    let k = k.offset(shift);
    let mut subst = Substitution::new();
    subst.unify_args(&l.args, &k.args)
}

pub fn choose_start_clauses(problem: &Problem, policy: StartPolicy) -> Vec<usize> {
    let usable = |i: &usize| !problem.tautology[*i] && !problem.clauses[*i].literals.is_empty();
    let all: Vec<usize> = (0..problem.clauses.len()).filter(usable).collect();
    let declared: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| problem.clauses[i].role == Role::NegatedConjecture)
        .collect();
    let positive: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| problem.clauses[i].is_positive())
        .collect();
    let pick = match policy {
        StartPolicy::Ladder if !declared.is_empty() => declared,
        StartPolicy::Ladder if !positive.is_empty() => positive,
        StartPolicy::Ladder => all.clone(),
        StartPolicy::Declared => declared,
        StartPolicy::Positive => positive,
        StartPolicy::All => all.clone(),
    };
    // an empty clause spans on its own, so it may always start a proof
    let empty = (0..problem.clauses.len()).filter(|&i| problem.clauses[i].literals.is_empty());
    let mut pick = if pick.is_empty() { all } else { pick };
    pick.extend(empty);
    pick.sort_unstable();
    pick.dedup();
    if pick.is_empty() {
        pick = (0..problem.clauses.len()).collect();
    }
    pick
}

pub struct TermDisplay<'a> {
    pub term: &'a Term,
    pub symbols: &'a SymbolTable,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => write!(f, "X{v}"),
            Term::App(s, args) => {
                f.write_str(self.symbols.function_name(*s))?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(
                            f,
                            "{}",
                            TermDisplay {
                                term: a,
                                symbols: self.symbols
                            }
                        )?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

pub struct LiteralDisplay<'a> {
    pub literal: &'a Literal,
    pub symbols: &'a SymbolTable,
}

impl fmt::Display for LiteralDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.literal.positive {
            f.write_str("~")?;
        }
        f.write_str(self.symbols.predicate_name(self.literal.pred))?;
        if !self.literal.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.literal.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(
                    f,
                    "{}",
                    TermDisplay {
                        term: a,
                        symbols: self.symbols
                    }
                )?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Problem {
    pub fn show_term<'a>(&'a self, term: &'a Term) -> TermDisplay<'a> {
        TermDisplay {
            term,
            symbols: &self.symbols,
        }
    }

    pub fn show_literal<'a>(&'a self, literal: &'a Literal) -> LiteralDisplay<'a> {
        LiteralDisplay {
            literal,
            symbols: &self.symbols,
        }
    }

    pub fn show_literals(&self, lits: &[Literal]) -> String {
        if lits.is_empty() {
            return "$false".to_owned();
        }
        lits.iter()
            .map(|l| self.show_literal(l).to_string())
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Prints the problem back in the accepted TPTP-CNF subset.
impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(
                f,
                "cnf({}, {}, ({})).",
                c.name,
                c.role.as_str(),
                self.show_literals(&c.literals)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    const FIG2: &str = "cnf(neg, axiom, (~p(X) | ~p(f(Y)))).\ncnf(pos, axiom, (p(Z) | p(f(Z)))).\n";

    #[test]
    fn rename_copy_of_fig2_positive_clause() {
        let p = parse_problem(FIG2).unwrap();
        let c1 = p.rename_copy(1, 1);
        let z = c1.var_base;
        let f = p.symbols.function("f").unwrap();
        assert_eq!(c1.literals[0].args, vec![Term::Var(z)]);
        assert_eq!(c1.literals[1].args, vec![Term::App(f, vec![Term::Var(z)])]);
    }

    #[test]
    fn rename_copy_of_ground_clause_is_identity() {
        let p = parse_problem("cnf(c1, axiom, p(a)).").unwrap();
        for k in 1..4 {
            assert_eq!(p.rename_copy(0, k).literals, p.clauses[0].literals);
        }
    }

    #[test]
    fn copies_are_variable_disjoint() {
        let p = parse_problem(FIG2).unwrap();
        let mut seen = std::collections::HashSet::new();
        for ci in 0..2 {
            for k in 1..5 {
                for v in p.rename_copy(ci, k).var_ids() {
                    assert!(seen.insert(v), "variable {v} reused");
                }
            }
        }
    }

    #[test]
    fn can_connect_examples() {
        let p = parse_problem(FIG2).unwrap();
        let neg = &p.clauses[0].literals;
        let pos = &p.clauses[1].literals;
        assert!(can_connect(&neg[0], &pos[0]));
        assert!(!can_connect(&pos[0], &pos[1]));
        assert!(can_connect(&neg[1], &pos[1]));
    }

    #[test]
    fn occurs_check_within_a_copy_but_not_across_copies() {
        let p = parse_problem("cnf(c, axiom, (~p(X) | p(f(X)))).").unwrap();
        let lits = &p.clauses[0].literals;
        let mut s = Substitution::new();
        assert!(!s.unify_args(&lits[0].args, &lits[1].args));
        assert!(can_connect(&lits[0], &lits[1]));
        let c1 = p.rename_copy(0, 1);
        let c2 = p.rename_copy(0, 2);
        let mut s = Substitution::new();
        assert!(s.unify_args(&c1.literals[0].args, &c2.literals[1].args));
    }

    #[test]
    fn start_policies() {
        let p = parse_problem(FIG2).unwrap();
        assert_eq!(p.start, vec![1]);
        assert_eq!(choose_start_clauses(&p, StartPolicy::Positive), vec![1]);
        assert_eq!(choose_start_clauses(&p, StartPolicy::All), vec![0, 1]);
        // nothing declared falls through to everything
        assert_eq!(choose_start_clauses(&p, StartPolicy::Declared), vec![0, 1]);

        let ex1 = parse_problem(
            "cnf(c, negated_conjecture, p(a)).\ncnf(d, axiom, (~p(X) | p(f(X)))).\ncnf(e, axiom, ~p(Y)).",
        )
        .unwrap();
        assert_eq!(choose_start_clauses(&ex1, StartPolicy::Declared), vec![0]);
    }

    #[test]
    fn partner_table_matches_can_connect() {
        let p = parse_problem(FIG2).unwrap();
        let r = LitRef { clause: 0, lit: 0 };
        assert_eq!(
            p.partners(r),
            &[LitRef { clause: 1, lit: 0 }, LitRef { clause: 1, lit: 1 }]
        );
        let r = LitRef { clause: 0, lit: 1 };
        assert_eq!(
            p.partners(r),
            &[LitRef { clause: 1, lit: 0 }, LitRef { clause: 1, lit: 1 }]
        );
    }

    #[test]
    fn tautologies_are_excluded_from_partners_and_start() {
        let p = parse_problem("cnf(t, axiom, (p(X) | ~p(X))).\ncnf(u, axiom, ~p(a)).").unwrap();
        assert!(p.is_tautology(0));
        assert!(p.partners(LitRef { clause: 1, lit: 0 }).is_empty());
        assert_eq!(p.start, vec![1]);
    }
}
