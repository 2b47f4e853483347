//! Line-oriented proof documents.
//!
//! ```text
//! matcop-proof 1
//! problem <fnv-1a hex of the printed problem>
//! mode matrix
//! instance <clause> <parent> : <literals>
//! subproof <n>
//! copy <id> <clause> <k> <var-base> : <literals>
//! active <id> <literal index>...
//! bind X<v> <term>
//! connect <id>.<lit> <id>.<lit>
//! stat <key> <value>
//! ```
//!
//! Records after a `subproof` line belong to that sub-proof; documents
//! without one have a single implicit sub-proof.

use std::fmt::{self, Write as _};

use crate::parse::{parse_literals, parse_term};
use crate::problem::{Literal, Problem, Term, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Tableau,
    Matrix,
    Core,
    Avatar,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Tableau => "tableau",
            Mode::Matrix => "matrix",
            Mode::Core => "core",
            Mode::Avatar => "avatar",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "tableau" => Ok(Mode::Tableau),
            "matrix" => Ok(Mode::Matrix),
            "core" => Ok(Mode::Core),
            "avatar" => Ok(Mode::Avatar),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An instance of an input clause added during splitting; it gets clause
/// index `clause`, past the end of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceRecord {
    pub clause: usize,
    pub parent: usize,
    pub literals: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocCopy {
    pub id: usize,
    pub clause: usize,
    pub k: u32,
    pub var_base: VarId,
    pub literals: Vec<Literal>,
    /// Active literal indices; `None` when all are active.
    pub active: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubProof {
    pub copies: Vec<DocCopy>,
    pub bindings: Vec<(VarId, Term)>,
    pub connections: Vec<((usize, usize), (usize, usize))>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDocument {
    pub problem_hash: u64,
    pub mode: Mode,
    pub instances: Vec<InstanceRecord>,
    pub subproofs: Vec<SubProof>,
    pub stats: Vec<(String, u64)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct DocError {
    pub line: usize,
    pub msg: String,
}

/// FNV-1a over the printed problem.
pub fn problem_hash(problem: &Problem) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in problem.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl ProofDocument {
    pub fn new(problem: &Problem, mode: Mode) -> ProofDocument {
        ProofDocument {
            problem_hash: problem_hash(problem),
            mode,
            instances: Vec::new(),
            subproofs: Vec::new(),
            stats: Vec::new(),
        }
    }

    pub fn stat(&self, key: &str) -> Option<u64> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Symbols come from `problem`; instance clauses only add clause indices.
    pub fn render(&self, problem: &Problem) -> String {
        let mut out = String::new();
        let lits = |ls: &[Literal]| problem.show_literals(ls);
        let _ = writeln!(out, "matcop-proof 1");
        let _ = writeln!(out, "problem {:016x}", self.problem_hash);
        let _ = writeln!(out, "mode {}", self.mode);
        for i in &self.instances {
            let _ = writeln!(out, "instance {} {} : {}", i.clause, i.parent, lits(&i.literals));
        }
        let explicit = self.subproofs.len() != 1 || self.mode == Mode::Avatar;
        for (n, sp) in self.subproofs.iter().enumerate() {
            if explicit {
                let _ = writeln!(out, "subproof {n}");
            }
            for c in &sp.copies {
                let _ = writeln!(
                    out,
                    "copy {} {} {} {} : {}",
                    c.id,
                    c.clause,
                    c.k,
                    c.var_base,
                    lits(&c.literals)
                );
                if let Some(a) = &c.active {
                    let idx: Vec<String> = a.iter().map(|i| i.to_string()).collect();
                    let _ = writeln!(out, "active {} {}", c.id, idx.join(" "));
                }
            }
            for (v, t) in &sp.bindings {
                let _ = writeln!(out, "bind X{v} {}", problem.show_term(t));
            }
            for ((a, i), (b, j)) in &sp.connections {
                let _ = writeln!(out, "connect {a}.{i} {b}.{j}");
            }
        }
        for (k, v) in &self.stats {
            let _ = writeln!(out, "stat {k} {v}");
        }
        out
    }

    pub fn parse(text: &str, problem: &Problem) -> Result<ProofDocument, DocError> {
        let mut hash = None;
        let mut mode = None;
        let mut doc = ProofDocument {
            problem_hash: 0,
            mode: Mode::Matrix,
            instances: Vec::new(),
            subproofs: Vec::new(),
            stats: Vec::new(),
        };
        let mut seen_header = false;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |msg: String| DocError { line, msg };
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (kw, rest) = l.split_once(' ').unwrap_or((l, ""));
            let rest = rest.trim();
            if !seen_header {
                if kw != "matcop-proof" || rest != "1" {
                    return Err(err("expected `matcop-proof 1` header".into()));
                }
                seen_header = true;
                continue;
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad number `{s}`")));
            let literals = |s: &str| parse_literals(s, &problem.symbols).map_err(|e| err(e.to_string()));
            let current = |doc: &mut ProofDocument| -> usize {
                if doc.subproofs.is_empty() {
                    doc.subproofs.push(SubProof::default());
                }
                doc.subproofs.len() - 1
            };
            match kw {
                "problem" => {
                    hash = Some(u64::from_str_radix(rest, 16).map_err(|_| err("bad problem hash".into()))?);
                }
                "mode" => mode = Some(rest.parse::<Mode>().map_err(err)?),
                "instance" => {
                    let (head, body) = rest.split_once(':').ok_or_else(|| err("missing `:`".into()))?;
                    let f: Vec<&str> = head.split_whitespace().collect();
                    if f.len() != 2 {
                        return Err(err("expected `instance <clause> <parent> : ...`".into()));
                    }
                    doc.instances.push(InstanceRecord {
                        clause: num(f[0])?,
                        parent: num(f[1])?,
                        literals: literals(body.trim())?,
                    });
                }
                "subproof" => {
                    if num(rest)? != doc.subproofs.len() {
                        return Err(err("sub-proofs must be numbered consecutively".into()));
                    }
                    doc.subproofs.push(SubProof::default());
                }
                "copy" => {
                    let (head, body) = rest.split_once(':').ok_or_else(|| err("missing `:`".into()))?;
                    let f: Vec<&str> = head.split_whitespace().collect();
                    if f.len() != 4 {
                        return Err(err("expected `copy <id> <clause> <k> <var-base> : ...`".into()));
                    }
                    let c = DocCopy {
                        id: num(f[0])?,
                        clause: num(f[1])?,
                        k: num(f[2])? as u32,
                        var_base: num(f[3])? as VarId,
                        literals: literals(body.trim())?,
                        active: None,
                    };
                    let i = current(&mut doc);
                    if doc.subproofs[i].copies.iter().any(|d| d.id == c.id) {
                        return Err(err(format!("duplicate copy id {}", c.id)));
                    }
                    doc.subproofs[i].copies.push(c);
                }
                "active" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    let id = num(f.first().copied().unwrap_or(""))?;
                    let idx = f[1..].iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?;
                    let i = current(&mut doc);
                    let c = doc.subproofs[i]
                        .copies
                        .iter_mut()
                        .find(|c| c.id == id)
                        .ok_or_else(|| err(format!("unknown copy {id}")))?;
                    c.active = Some(idx);
                }
                "bind" => {
                    let (v, t) = rest
                        .split_once(' ')
                        .ok_or_else(|| err("expected `bind X<n> <term>`".into()))?;
                    let v = v
                        .strip_prefix('X')
                        .and_then(|s| s.parse::<VarId>().ok())
                        .ok_or_else(|| err(format!("bad variable `{v}`")))?;
                    let t = parse_term(t.trim(), &problem.symbols).map_err(|e| err(e.to_string()))?;
                    let i = current(&mut doc);
                    doc.subproofs[i].bindings.push((v, t));
                }
                "connect" => {
                    let occ = |s: &str| -> Result<(usize, usize), DocError> {
                        let (a, b) = s.split_once('.').ok_or_else(|| err(format!("bad occurrence `{s}`")))?;
                        Ok((num(a)?, num(b)?))
                    };
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    if f.len() != 2 {
                        return Err(err("expected `connect <id>.<lit> <id>.<lit>`".into()));
                    }
                    let pair = (occ(f[0])?, occ(f[1])?);
                    let i = current(&mut doc);
                    doc.subproofs[i].connections.push(pair);
                }
                "stat" => {
                    let (k, v) = rest
                        .split_once(' ')
                        .ok_or_else(|| err("expected `stat <key> <value>`".into()))?;
                    doc.stats.push((
                        k.to_owned(),
                        v.trim().parse().map_err(|_| err("bad stat value".into()))?,
                    ));
                }
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }
        if !seen_header {
            return Err(DocError {
                line: 1,
                msg: "empty document".into(),
            });
        }
        doc.problem_hash = hash.ok_or(DocError {
            line: 0,
            msg: "missing `problem` record".into(),
        })?;
        doc.mode = mode.ok_or(DocError {
            line: 0,
            msg: "missing `mode` record".into(),
        })?;
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    #[test]
    fn render_then_parse_is_identity() {
        let p = parse_problem("cnf(a, axiom, p(X) | ~q(f(X), c)). cnf(b, axiom, q(Y, Y)).").unwrap();
        let c = p.rename_copy(0, 2);
        let mut doc = ProofDocument::new(&p, Mode::Core);
        doc.subproofs.push(SubProof {
            copies: vec![DocCopy {
                id: 0,
                clause: 0,
                k: 2,
                var_base: c.var_base,
                literals: c.literals.clone(),
                active: Some(vec![1]),
            }],
            bindings: vec![(c.var_base, p.clauses[1].literals[0].args[0].offset(40))],
            connections: vec![((0, 1), (1, 0))],
        });
        doc.stats.push(("conflicts".into(), 17));
        let text = doc.render(&p);
        assert_eq!(ProofDocument::parse(&text, &p).unwrap(), doc);
    }

    #[test]
    fn rejects_unknown_symbols_and_records() {
        let p = parse_problem("cnf(a, axiom, p(X)).").unwrap();
        let bad = "matcop-proof 1\nproblem 0\nmode core\ncopy 0 0 1 0 : r(X0)\n";
        assert!(ProofDocument::parse(bad, &p).is_err());
        let bad = "matcop-proof 1\nproblem 0\nmode core\nfoo\n";
        assert_eq!(ProofDocument::parse(bad, &p).unwrap_err().line, 4);
    }
}
