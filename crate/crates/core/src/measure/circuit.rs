//! Hash-consed arithmetic circuits over the gate basis
//! `{c, +, −, ×, max, min, step}`, recorded by running the measure function
//! against a [`Gates`] implementation that builds nodes instead of numbers.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::numeric::{Eval, Gates, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Const(Rational),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Neg(usize),
    Max(usize, usize),
    Min(usize, usize),
    Step(usize),
}

impl Node {
    pub fn is_gate(&self) -> bool {
        matches!(self, Node::Max(..) | Node::Min(..) | Node::Step(_))
    }

    fn args(&self) -> Vec<usize> {
        match *self {
            Node::Const(_) | Node::Var(_) => vec![],
            Node::Neg(a) | Node::Step(a) => vec![a],
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Max(a, b) | Node::Min(a, b) => vec![a, b],
        }
    }
}

/// Circuit under construction. Nodes are numbered in creation order, which
/// is a topological order.
#[derive(Debug, Default)]
pub struct Circuit {
    nodes: RefCell<Vec<Node>>,
    index: RefCell<HashMap<Node, usize>>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&self, i: usize) -> usize {
        self.intern(Node::Var(i))
    }

    pub fn node(&self, id: usize) -> Node {
        self.nodes.borrow()[id].clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn intern(&self, node: Node) -> usize {
        if let Some(&id) = self.index.borrow().get(&node) {
            return id;
        }
        let mut nodes = self.nodes.borrow_mut();
        let id = nodes.len();
        nodes.push(node.clone());
        self.index.borrow_mut().insert(node, id);
        id
    }

    fn constant(&self, id: usize) -> Option<Rational> {
        match &self.nodes.borrow()[id] {
            Node::Const(c) => Some(c.clone()),
            _ => None,
        }
    }

    fn fold2(&self, a: usize, b: usize, f: impl Fn(&Eval<Rational>, &Rational, &Rational) -> Rational) -> Option<usize> {
        match (self.constant(a), self.constant(b)) {
            (Some(x), Some(y)) => Some(self.konst(&f(&Eval::new(), &x, &y))),
            _ => None,
        }
    }

    /// Value of every node with the variables bound to `vars`.
    pub fn evaluate(&self, vars: &[Rational]) -> Vec<Rational> {
        let g = Eval::<Rational>::new();
        let nodes = self.nodes.borrow();
        let mut val: Vec<Rational> = Vec::with_capacity(nodes.len());
        for n in nodes.iter() {
            let v = match n {
                Node::Const(c) => c.clone(),
                Node::Var(i) => vars[*i].clone(),
                Node::Add(a, b) => g.add(&val[*a], &val[*b]),
                Node::Sub(a, b) => g.sub(&val[*a], &val[*b]),
                Node::Mul(a, b) => g.mul(&val[*a], &val[*b]),
                Node::Neg(a) => g.neg(&val[*a]),
                Node::Max(a, b) => g.max(&val[*a], &val[*b]),
                Node::Min(a, b) => g.min(&val[*a], &val[*b]),
                Node::Step(a) => g.step(&val[*a]),
            };
            val.push(v);
        }
        val
    }

    /// Gate nodes reachable from `roots`, in topological order.
    pub fn reachable_gates(&self, roots: &[usize]) -> Vec<usize> {
        let nodes = self.nodes.borrow();
        let mut seen = vec![false; nodes.len()];
        let mut stack: Vec<usize> = roots.to_vec();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                continue;
            }
            stack.extend(nodes[id].args());
        }
        (0..nodes.len()).filter(|&i| seen[i] && nodes[i].is_gate()).collect()
    }
}

impl Gates for Circuit {
    type V = usize;

    fn konst(&self, r: &Rational) -> usize {
        self.intern(Node::Const(r.clone()))
    }

    fn add(&self, a: &usize, b: &usize) -> usize {
        if let Some(id) = self.fold2(*a, *b, |g, x, y| g.add(x, y)) {
            return id;
        }
        match (self.constant(*a), self.constant(*b)) {
            (Some(c), _) if c.is_zero() => *b,
            (_, Some(c)) if c.is_zero() => *a,
            _ => self.intern(Node::Add(*a.min(b), *a.max(b))),
        }
    }

    fn sub(&self, a: &usize, b: &usize) -> usize {
        if a == b {
            return self.konst(&Rational::zero());
        }
        if let Some(id) = self.fold2(*a, *b, |g, x, y| g.sub(x, y)) {
            return id;
        }
        match (self.constant(*a), self.constant(*b)) {
            (_, Some(c)) if c.is_zero() => *a,
            (Some(c), _) if c.is_zero() => self.neg(b),
            _ => self.intern(Node::Sub(*a, *b)),
        }
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        if let Some(id) = self.fold2(*a, *b, |g, x, y| g.mul(x, y)) {
            return id;
        }
        match (self.constant(*a), self.constant(*b)) {
            (Some(c), _) | (_, Some(c)) if c.is_zero() => self.konst(&Rational::zero()),
            (Some(c), _) if c.is_one() => *b,
            (_, Some(c)) if c.is_one() => *a,
            _ => self.intern(Node::Mul(*a.min(b), *a.max(b))),
        }
    }

    fn neg(&self, a: &usize) -> usize {
        if let Some(c) = self.constant(*a) {
            return self.konst(&-c);
        }
        if let Node::Neg(inner) = self.node(*a) {
            return inner;
        }
        self.intern(Node::Neg(*a))
    }

    fn max(&self, a: &usize, b: &usize) -> usize {
        if a == b {
            return *a;
        }
        if let Some(id) = self.fold2(*a, *b, |g, x, y| g.max(x, y)) {
            return id;
        }
        self.intern(Node::Max(*a.min(b), *a.max(b)))
    }

    fn min(&self, a: &usize, b: &usize) -> usize {
        if a == b {
            return *a;
        }
        if let Some(id) = self.fold2(*a, *b, |g, x, y| g.min(x, y)) {
            return id;
        }
        self.intern(Node::Min(*a.min(b), *a.max(b)))
    }

    fn step(&self, a: &usize) -> usize {
        if let Some(c) = self.constant(*a) {
            return self.konst(&Eval::<Rational>::new().step(&c));
        }
        self.intern(Node::Step(*a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};

    #[test]
    fn folding_and_sharing() {
        let c = Circuit::new();
        let x = c.var(0);
        let zero = c.konst(&int(0));
        let m1 = c.max(&x, &zero);
        let m2 = c.max(&zero, &x);
        assert_eq!(m1, m2);
        let two = c.konst(&int(2));
        let three = c.konst(&int(3));
        assert_eq!(c.node(c.add(&two, &three)), Node::Const(int(5)));
        assert_eq!(c.add(&x, &zero), x);
        assert_eq!(c.neg(&c.neg(&x)), x);
        let vals = c.evaluate(&[frac(-1, 2)]);
        assert_eq!(vals[m1], int(0));
        assert_eq!(c.reachable_gates(&[m1]), vec![m1]);
    }
}
