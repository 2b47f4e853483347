//! Exactly-k constraints via a sequential counter.

use super::{ClauseSink, Lit};

#[derive(Clone, Copy)]
enum Node {
    Const(bool),
    Lit(Lit),
}

fn or<S: ClauseSink + ?Sized>(s: &mut S, a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(true), _) | (_, Node::Const(true)) => Node::Const(true),
        (Node::Const(false), x) | (x, Node::Const(false)) => x,
        (Node::Lit(x), Node::Lit(y)) => {
            let o = s.fresh_var().pos();
            s.add(&[!o, x, y]);
            s.add(&[o, !x]);
            s.add(&[o, !y]);
            Node::Lit(o)
        }
    }
}

fn and<S: ClauseSink + ?Sized>(s: &mut S, a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(false), _) | (_, Node::Const(false)) => Node::Const(false),
        (Node::Const(true), x) | (x, Node::Const(true)) => x,
        (Node::Lit(x), Node::Lit(y)) => {
            let o = s.fresh_var().pos();
            s.add(&[o, !x, !y]);
            s.add(&[!o, x]);
            s.add(&[!o, y]);
            Node::Lit(o)
        }
    }
}

fn assert_node<S: ClauseSink + ?Sized>(s: &mut S, n: Node, value: bool) {
    match n {
        Node::Const(c) if c == value => {}
        Node::Const(_) => s.add(&[]),
        Node::Lit(l) => s.add(&[if value { l } else { !l }]),
    }
}

/// Constrain exactly `k` of `lits` to be true. Counter cell `s[i][j]` holds
/// iff at least `j` of the first `i` literals are true.
pub fn exactly<S: ClauseSink + ?Sized>(sink: &mut S, lits: &[Lit], k: usize) {
    if k > lits.len() {
        sink.add(&[]);
        return;
    }
    // row[j] = at least j of the literals seen so far, j = 0..=k+1
    let mut row: Vec<Node> = (0..=k + 1).map(|j| Node::Const(j == 0)).collect();
    for &x in lits {
        let mut next = vec![Node::Const(true)];
        for j in 1..=k + 1 {
            let carry = and(sink, Node::Lit(x), row[j - 1]);
            next.push(or(sink, row[j], carry));
        }
        row = next;
    }
    assert_node(sink, row[k], true);
    assert_node(sink, row[k + 1], false);
}
