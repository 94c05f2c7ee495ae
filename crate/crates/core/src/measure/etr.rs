//! Export of the antipodal equations as an existential formula over the
//! reals, and a small interpreter to check a formula at a given assignment.
//!
//! Every max/min/step gate of the measure circuit becomes an auxiliary
//! variable `g` pinned by a two-branch disjunction; what remains between
//! gates is polynomial.
//!
//! Grammar of the emitted text:
//! ```text
//! formula := "exists" name ("," name)* ":" bool
//! bool    := conj ("|" conj)*        conj := unary ("&" unary)*
//! unary   := "!" unary | "[" bool "]" | poly rel poly
//! rel     := "<" | "<=" | "=" | ">=" | ">"
//! poly    := term (("+" | "-") term)*   term := factor ("*" factor)*
//! factor  := "-" factor | "(" poly ")" | numeral | name
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Zero;

use super::circuit::{Circuit, Node};
use super::CompiledInstance;
use crate::error::{Error, Result};
use crate::numeric::{format_rational, int, parse_numeral, Gates, Rational};

/// Formula text plus the circuit it was read from, for building witnesses.
#[derive(Debug)]
pub struct EtrFormula {
    pub k: usize,
    /// `P1..P{k+2}` followed by `g1..g{m'}`.
    pub variables: Vec<String>,
    /// Top-level conjuncts, in order: sphere constraint, gate constraints,
    /// then one antipodal equality per color.
    pub conjuncts: Vec<String>,
    pub gate_count: usize,
    circuit: Circuit,
    gates: Vec<usize>,
}

impl EtrFormula {
    pub fn text(&self) -> String {
        let mut s = format!("exists {} :\n", self.variables.join(", "));
        for (i, c) in self.conjuncts.iter().enumerate() {
            let sep = if i == 0 { "  " } else { "& " };
            let _ = writeln!(s, "{sep}[{c}]");
        }
        s
    }

    /// Values for every variable at sphere point `p`, with each `g` set to
    /// its gate's value.
    pub fn witness(&self, p: &[Rational]) -> Result<HashMap<String, Rational>> {
        if p.len() != self.k + 2 {
            return Err(Error::Etr(format!("expected {} coordinates, got {}", self.k + 2, p.len())));
        }
        let vals = self.circuit.evaluate(p);
        let mut out: HashMap<String, Rational> = p.iter().enumerate().map(|(i, v)| (format!("P{}", i + 1), v.clone())).collect();
        for (j, &id) in self.gates.iter().enumerate() {
            out.insert(format!("g{}", j + 1), vals[id].clone());
        }
        Ok(out)
    }
}

struct Renderer<'a> {
    circuit: &'a Circuit,
    gate_name: HashMap<usize, String>,
    memo: HashMap<usize, String>,
}

impl Renderer<'_> {
    fn expr(&mut self, id: usize) -> String {
        if let Some(name) = self.gate_name.get(&id) {
            return name.clone();
        }
        if let Some(s) = self.memo.get(&id) {
            return s.clone();
        }
        let s = match self.circuit.node(id) {
            Node::Const(c) => {
                let t = format_rational(&c);
                if c < Rational::zero() { format!("({t})") } else { t }
            }
            Node::Var(i) => format!("P{}", i + 1),
            Node::Add(a, b) => format!("({} + {})", self.expr(a), self.expr(b)),
            Node::Sub(a, b) => format!("({} - {})", self.expr(a), self.expr(b)),
            Node::Mul(a, b) => format!("({} * {})", self.expr(a), self.expr(b)),
            Node::Neg(a) => format!("(-{})", self.expr(a)),
            Node::Max(..) | Node::Min(..) | Node::Step(_) => unreachable!("gates are named"),
        };
        self.memo.insert(id, s.clone());
        s
    }

    fn gate_constraint(&mut self, id: usize) -> String {
        let g = self.gate_name[&id].clone();
        match self.circuit.node(id) {
            Node::Max(a, b) => {
                let (y, z) = (self.expr(a), self.expr(b));
                format!("[{g} = {y} & {y} >= {z}] | [{g} = {z} & {z} > {y}]")
            }
            Node::Min(a, b) => {
                let (y, z) = (self.expr(a), self.expr(b));
                format!("[{g} = {y} & {z} >= {y}] | [{g} = {z} & {y} > {z}]")
            }
            Node::Step(a) => {
                let t = self.expr(a);
                format!("[{g} = 1 & {t} >= 0] | [{g} = 0 & 0 > {t}]")
            }
            _ => unreachable!("only gates have constraints"),
        }
    }
}

/// Emits `∃P,g: Σ|P_j| = k+1 ∧ (gate constraints) ∧ ⋀_i f_i(P) = f_i(−P)`.
pub fn export_etr(ci: &CompiledInstance, k: usize) -> EtrFormula {
    let c = Circuit::new();
    let p: Vec<usize> = (0..k + 2).map(|i| c.var(i)).collect();
    let minus_p: Vec<usize> = p.iter().map(|v| c.neg(v)).collect();
    let atoms: Vec<Vec<_>> = ci
        .atoms
        .iter()
        .map(|list| list.iter().map(|a| super::strip::prepare(&c, a)).collect())
        .collect();
    let zero = c.konst(&int(0));
    let norm = p
        .iter()
        .map(|v| c.add(&c.max(v, &zero), &c.max(&c.neg(v), &zero)))
        .reduce(|a, b| c.add(&a, &b))
        .expect("at least two coordinates");
    let fp = super::side_a_masses(&c, &atoms, &p);
    let fm = super::side_a_masses(&c, &atoms, &minus_p);

    let mut roots = vec![norm];
    roots.extend(&fp);
    roots.extend(&fm);
    let gates = c.reachable_gates(&roots);
    let gate_name: HashMap<usize, String> = gates.iter().enumerate().map(|(j, &id)| (id, format!("g{}", j + 1))).collect();
    let mut variables: Vec<String> = (1..=k + 2).map(|i| format!("P{i}")).collect();
    variables.extend((1..=gates.len()).map(|j| format!("g{j}")));

    let mut r = Renderer { circuit: &c, gate_name, memo: HashMap::new() };
    let mut conjuncts = vec![format!("{} = {}", r.expr(norm), k + 1)];
    for &g in &gates {
        conjuncts.push(r.gate_constraint(g));
    }
    for (a, b) in fp.iter().zip(&fm) {
        conjuncts.push(format!("{} = {}", r.expr(*a), r.expr(*b)));
    }
    drop(r);
    let gate_count = gates.len();
    EtrFormula { k, variables, conjuncts, gate_count, circuit: c, gates }
}

#[derive(Debug, Clone, PartialEq)]
enum Poly {
    Num(Rational),
    Var(String),
    Neg(Box<Poly>),
    Add(Box<Poly>, Box<Poly>),
    Sub(Box<Poly>, Box<Poly>),
    Mul(Box<Poly>, Box<Poly>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

#[derive(Debug, Clone, PartialEq)]
enum Bool {
    Atom(Poly, Rel, Poly),
    Not(Box<Bool>),
    And(Vec<Bool>),
    Or(Vec<Bool>),
}

/// A parsed formula, ready for evaluation at an assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFormula {
    pub variables: Vec<String>,
    body: Bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(text[start..i].to_string()));
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'/') {
                i += 1;
            }
            out.push(Tok::Num(text[start..i].to_string()));
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let sym: &'static str = match two {
            "<=" => "<=",
            ">=" => ">=",
            _ => match ch {
                '<' => "<",
                '>' => ">",
                '=' => "=",
                '&' => "&",
                '|' => "|",
                '!' => "!",
                '[' => "[",
                ']' => "]",
                '(' => "(",
                ')' => ")",
                '+' => "+",
                '-' => "-",
                '*' => "*",
                ',' => ",",
                ':' => ":",
                _ => return Err(Error::Etr(format!("unexpected character {ch:?}"))),
            },
        };
        i += sym.len();
        out.push(Tok::Sym(sym));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) { Ok(()) } else { Err(Error::Etr(format!("expected {sym:?} at token {}", self.pos))) }
    }

    fn bool_or(&mut self) -> Result<Bool> {
        let mut parts = vec![self.bool_and()?];
        while self.eat("|") {
            parts.push(self.bool_and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Bool::Or(parts) })
    }

    fn bool_and(&mut self) -> Result<Bool> {
        let mut parts = vec![self.bool_unary()?];
        while self.eat("&") {
            parts.push(self.bool_unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Bool::And(parts) })
    }

    fn bool_unary(&mut self) -> Result<Bool> {
        if self.eat("!") {
            return Ok(Bool::Not(Box::new(self.bool_unary()?)));
        }
        if self.eat("[") {
            let b = self.bool_or()?;
            self.expect("]")?;
            return Ok(b);
        }
        let lhs = self.poly()?;
        let rel = match self.peek() {
            Some(Tok::Sym("<")) => Rel::Lt,
            Some(Tok::Sym("<=")) => Rel::Le,
            Some(Tok::Sym("=")) => Rel::Eq,
            Some(Tok::Sym(">=")) => Rel::Ge,
            Some(Tok::Sym(">")) => Rel::Gt,
            _ => return Err(Error::Etr(format!("expected a relation at token {}", self.pos))),
        };
        self.pos += 1;
        Ok(Bool::Atom(lhs, rel, self.poly()?))
    }

    fn poly(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = Poly::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat("-") {
                acc = Poly::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.eat("*") {
            acc = Poly::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        if self.eat("-") {
            return Ok(Poly::Neg(Box::new(self.factor()?)));
        }
        if self.eat("(") {
            let p = self.poly()?;
            self.expect(")")?;
            return Ok(p);
        }
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::Num(parse_numeral(&n)?))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Poly::Var(v))
            }
            _ => Err(Error::Etr(format!("expected a term at token {}", self.pos))),
        }
    }
}

pub fn parse_etr(text: &str) -> Result<ParsedFormula> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    if p.peek() != Some(&Tok::Ident("exists".into())) {
        return Err(Error::Etr("formula must start with `exists`".into()));
    }
    p.pos += 1;
    let mut variables = Vec::new();
    loop {
        match p.peek().cloned() {
            Some(Tok::Ident(v)) => {
                p.pos += 1;
                variables.push(v);
            }
            _ => return Err(Error::Etr("expected a variable name".into())),
        }
        if !p.eat(",") {
            break;
        }
    }
    p.expect(":")?;
    let body = p.bool_or()?;
    if p.pos != p.toks.len() {
        return Err(Error::Etr(format!("trailing input at token {}", p.pos)));
    }
    Ok(ParsedFormula { variables, body })
}

fn eval_poly(p: &Poly, env: &HashMap<String, Rational>) -> Result<Rational> {
    Ok(match p {
        Poly::Num(r) => r.clone(),
        Poly::Var(v) => env.get(v).cloned().ok_or_else(|| Error::Etr(format!("unbound variable {v}")))?,
        Poly::Neg(a) => -eval_poly(a, env)?,
        Poly::Add(a, b) => eval_poly(a, env)? + eval_poly(b, env)?,
        Poly::Sub(a, b) => eval_poly(a, env)? - eval_poly(b, env)?,
        Poly::Mul(a, b) => eval_poly(a, env)? * eval_poly(b, env)?,
    })
}

fn eval_bool(b: &Bool, env: &HashMap<String, Rational>) -> Result<bool> {
    Ok(match b {
        Bool::Atom(l, rel, r) => {
            let (l, r) = (eval_poly(l, env)?, eval_poly(r, env)?);
            match rel {
                Rel::Lt => l < r,
                Rel::Le => l <= r,
                Rel::Eq => l == r,
                Rel::Ge => l >= r,
                Rel::Gt => l > r,
            }
        }
        Bool::Not(a) => !eval_bool(a, env)?,
        Bool::And(v) => {
            for x in v {
                if !eval_bool(x, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Bool::Or(v) => {
            for x in v {
                if eval_bool(x, env)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

impl ParsedFormula {
    /// Truth of the body under `env`; every quantified variable must be bound.
    pub fn eval(&self, env: &HashMap<String, Rational>) -> Result<bool> {
        eval_bool(&self.body, env)
    }

    /// Truth of each top-level conjunct.
    pub fn eval_conjuncts(&self, env: &HashMap<String, Rational>) -> Result<Vec<bool>> {
        match &self.body {
            Bool::And(parts) => parts.iter().map(|b| eval_bool(b, env)).collect(),
            other => Ok(vec![eval_bool(other, env)?]),
        }
    }
}
