//! Reader for the `cnf(...)` subset of TPTP.

use std::collections::HashMap;

use thiserror::Error;

use crate::problem::{Clause, Literal, Problem, Role, StartPolicy, SymbolTable, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: symbol `{name}` used with arity {found}, previously {expected}")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: equality is not supported; axiomatise it before proving")]
    Equality { line: usize, col: usize },
    #[error("{line}:{col}: unsupported role `{role}`")]
    Role { line: usize, col: usize, role: String },
    #[error("problem contains no clauses")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Upper(String),
    Dollar(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Pipe,
    Tilde,
    Eq,
    Neq,
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '|' => Tok::Pipe,
                '~' => Tok::Tilde,
                '=' => Tok::Eq,
                '!' if self.chars.peek() == Some(&'=') => {
                    self.bump();
                    Tok::Neq
                }
                '\'' => {
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('\'') => break,
                            Some('\\') => {
                                if let Some(c) = self.bump() {
                                    s.push(c);
                                }
                            }
                            Some(c) => s.push(c),
                            None => return Err(self.error(line, col, "unterminated quoted name")),
                        }
                    }
                    Tok::Word(s)
                }
                '$' => Tok::Dollar(self.word(String::new())),
                c if c.is_ascii_uppercase() || c == '_' => Tok::Upper(self.word(c.to_string())),
                c if c.is_ascii_alphanumeric() => Tok::Word(self.word(c.to_string())),
                other => return Err(self.error(line, col, format!("unexpected character `{other}`"))),
            };
            out.push((tok, line, col));
        }
    }

    fn word(&mut self, mut s: String) -> String {
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    symbols: SymbolTable,
    vars: HashMap<String, u32>,
    /// Read `X<n>` as variable id `n` instead of numbering by first occurrence.
    raw_vars: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.fail(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        match self.next() {
            Tok::Word(w) if w == "cnf" => {}
            other => return self.fail(format!("expected `cnf`, found {other:?}")),
        }
        self.expect(Tok::LParen, "`(`")?;
        let name = match self.next() {
            Tok::Word(w) | Tok::Upper(w) => w,
            other => return self.fail(format!("expected clause name, found {other:?}")),
        };
        self.expect(Tok::Comma, "`,`")?;
        let (line, col) = self.here();
        let role = match self.next() {
            Tok::Word(w) => match w.as_str() {
                "axiom" => Role::Axiom,
                "hypothesis" => Role::Hypothesis,
                "negated_conjecture" => Role::NegatedConjecture,
                _ => return Err(ParseError::Role { line, col, role: w }),
            },
            other => return self.fail(format!("expected role, found {other:?}")),
        };
        self.expect(Tok::Comma, "`,`")?;
        self.vars.clear();
        let literals = if *self.peek() == Tok::LParen {
            self.next();
            let lits = self.disjunction()?;
            self.expect(Tok::RParen, "`)`")?;
            lits
        } else {
            self.disjunction()?
        };
        // optional annotations are skipped up to the closing paren
        let mut depth = 0usize;
        while !(depth == 0 && *self.peek() == Tok::RParen) {
            match self.next() {
                Tok::LParen => depth += 1,
                Tok::RParen => depth -= 1,
                Tok::Eof => return self.fail("unexpected end of input"),
                _ => {}
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(Clause::new(name, role, literals))
    }

    fn disjunction(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut lits = Vec::new();
        loop {
            if let Some(l) = self.literal()? {
                lits.push(l);
            }
            if *self.peek() == Tok::Pipe {
                self.next();
            } else {
                return Ok(lits);
            }
        }
    }

    /// `None` for `$false`.
    fn literal(&mut self) -> Result<Option<Literal>, ParseError> {
        let mut positive = true;
        while *self.peek() == Tok::Tilde {
            self.next();
            positive = !positive;
        }
        if *self.peek() == Tok::LParen {
            self.next();
            let l = self.literal()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(l.map(|l| if positive { l } else { l.negated() }));
        }
        let (line, col) = self.here();
        let name = match self.next() {
            Tok::Word(w) => w,
            Tok::Dollar(w) if w == "false" && positive => return Ok(None),
            Tok::Dollar(w) => return self.fail(format!("unsupported `${w}`")),
            // a variable cannot stand as a literal, so an uppercase word here names a predicate
            Tok::Upper(w) => {
                if matches!(self.peek(), Tok::Eq | Tok::Neq) {
                    return Err(ParseError::Equality { line, col });
                }
                w
            }
            other => return self.fail(format!("expected literal, found {other:?}")),
        };
        let args = self.arguments()?;
        if matches!(self.peek(), Tok::Eq | Tok::Neq) {
            return Err(ParseError::Equality { line, col });
        }
        let pred = self
            .symbols
            .intern_predicate(&name, args.len())
            .map_err(|e| ParseError::Arity {
                line,
                col,
                name: e.name,
                expected: e.expected,
                found: e.found,
            })?;
        Ok(Some(Literal::new(positive, pred, args)))
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            loop {
                args.push(self.term()?);
                match self.next() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    other => return self.fail(format!("expected `,` or `)`, found {other:?}")),
                }
            }
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Upper(v) if self.raw_vars => match v.strip_prefix('X').and_then(|n| n.parse().ok()) {
                Some(id) => Ok(Term::Var(id)),
                None => self.fail(format!("expected variable `X<n>`, found `{v}`")),
            },
            Tok::Upper(v) => {
                let next = self.vars.len() as u32;
                Ok(Term::Var(*self.vars.entry(v).or_insert(next)))
            }
            Tok::Word(f) => {
                let args = self.arguments()?;
                let sym = self
                    .symbols
                    .intern_function(&f, args.len())
                    .map_err(|e| ParseError::Arity {
                        line,
                        col,
                        name: e.name,
                        expected: e.expected,
                        found: e.found,
                    })?;
                Ok(Term::App(sym, args))
            }
            other => self.fail(format!("expected term, found {other:?}")),
        }
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    parse_problem_with(text, StartPolicy::default())
}

pub fn parse_problem_with(text: &str, policy: StartPolicy) -> Result<Problem, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        symbols: SymbolTable::default(),
        vars: HashMap::new(),
        raw_vars: false,
    };
    let mut clauses = Vec::new();
    while *p.peek() != Tok::Eof {
        clauses.push(p.clause()?);
    }
    if clauses.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(Problem::new(clauses, p.symbols, policy))
}

fn raw_parser(text: &str, symbols: &SymbolTable) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: Lexer::new(text).tokens()?,
        pos: 0,
        symbols: symbols.clone(),
        vars: HashMap::new(),
        raw_vars: true,
    })
}

fn finish<T>(p: &Parser, known: &SymbolTable, value: T) -> Result<T, ParseError> {
    if *p.peek() != Tok::Eof {
        return p.fail("trailing input");
    }
    if p.symbols.functions.len() != known.functions.len() || p.symbols.predicates.len() != known.predicates.len() {
        return Err(ParseError::Syntax {
            line: 1,
            col: 1,
            msg: "unknown symbol".into(),
        });
    }
    Ok(value)
}

/// Read `l1 | l2 | ...` over an existing symbol table, with `X<n>` naming
/// variable `n` directly. `$false` is the empty list.
pub fn parse_literals(text: &str, symbols: &SymbolTable) -> Result<Vec<Literal>, ParseError> {
    let mut p = raw_parser(text, symbols)?;
    let lits = p.disjunction()?;
    finish(&p, symbols, lits)
}

pub fn parse_term(text: &str, symbols: &SymbolTable) -> Result<Term, ParseError> {
    let mut p = raw_parser(text, symbols)?;
    let t = p.term()?;
    finish(&p, symbols, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_clause() {
        let p = parse_problem("cnf(c1, axiom, P(a)).").unwrap();
        assert_eq!(p.clauses.len(), 1);
        assert_eq!(p.clauses[0].literals.len(), 1);
        assert_eq!(p.symbols.constants().len(), 1);
        assert!(p.epr);
    }

    #[test]
    fn fig2_problem() {
        let p = parse_problem(
            "% matrix versus tableau\ncnf(neg, axiom, (~p(X) | ~p(f(Y)))).\ncnf(pos, axiom, (p(Z) | p(f(Z)))).",
        )
        .unwrap();
        assert_eq!(p.clauses.len(), 2);
        let pr = p.symbols.predicate("p").unwrap();
        assert_eq!(p.symbols.predicate_arity(pr), 1);
        let f = p.symbols.function("f").unwrap();
        assert_eq!(p.symbols.function_arity(f), 1);
        assert_eq!(p.clauses[0].num_vars, 2);
        assert_eq!(p.clauses[1].num_vars, 1);
        assert!(!p.epr);
    }

    #[test]
    fn arity_clash() {
        let e = parse_problem("cnf(c1, axiom, p(a,b)).\ncnf(c2, axiom, p(a)).").unwrap_err();
        assert!(matches!(
            e,
            ParseError::Arity {
                line: 2,
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn equality_rejected() {
        let e = parse_problem("cnf(c1, axiom, X = a).").unwrap_err();
        assert!(matches!(e, ParseError::Equality { .. }));
        let e = parse_problem("cnf(c1, axiom, f(X) != a).").unwrap_err();
        assert!(matches!(e, ParseError::Equality { .. }));
    }

    #[test]
    fn empty_problem() {
        assert_eq!(parse_problem("% nothing\n").unwrap_err(), ParseError::Empty);
    }

    #[test]
    fn error_positions() {
        let e = parse_problem("cnf(c1, axiom, p(a)).\ncnf(c2, axiom, p(a) & q).").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }), "{e}");
        let e = parse_problem("cnf(c1, lemma, p(a)).").unwrap_err();
        assert!(matches!(e, ParseError::Role { .. }));
    }

    #[test]
    fn roles_and_false() {
        let p = parse_problem("cnf(a1, hypothesis, q).\ncnf(a2, negated_conjecture, ~q).\ncnf(a3, axiom, $false).")
            .unwrap();
        assert_eq!(p.clauses[0].role, Role::Hypothesis);
        assert_eq!(p.clauses[1].role, Role::NegatedConjecture);
        assert!(p.clauses[2].literals.is_empty());
        // the empty clause refutes on its own and is always a start candidate
        assert_eq!(p.start, vec![1, 2]);
    }

    #[test]
    fn print_then_parse_is_stable() {
        let text = "cnf(neg, axiom, (~p(X) | ~p(f(Y)))).\ncnf(pos, negated_conjecture, (p(Z) | q(g(Z,a),b))).";
        let p = parse_problem(text).unwrap();
        let q = parse_problem(&p.to_string()).unwrap();
        assert_eq!(p.clauses, q.clauses);
        assert_eq!(p.symbols, q.symbols);
    }
}
