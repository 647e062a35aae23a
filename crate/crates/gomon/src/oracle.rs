//! Brute-force checks over finite balls of P.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{int, Rational};
use crate::graph::{Graph, OEdge};
use crate::lcm::{divides, join, Ideal, LcmError};
use crate::words::{self, canonical, in_p, inv, mul, Element, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("ball exceeds {0} elements")]
    BudgetExceeded(usize),
    #[error("graph has infinite families")]
    Families,
}

pub const BALL_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallSpec {
    pub max_letters: usize,
    /// Largest multiple of a vertex generator used as a single letter.
    pub max_exp: i64,
    /// Largest power of each prime in denominators at dense vertices.
    pub max_den_exp: u32,
}

impl BallSpec {
    pub fn new(max_letters: usize, max_exp: i64) -> Self {
        BallSpec { max_letters, max_exp, max_den_exp: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct Ball {
    pub elements: Vec<Element>,
    pub set: HashSet<Element>,
    /// `layer[k]` = number of elements reached with at most `k` letters.
    pub layers: Vec<usize>,
    pub exhaustive: bool,
}

impl Ball {
    pub fn contains(&self, x: &Element) -> bool {
        self.set.contains(x)
    }
}

pub fn generators(g: &Graph, spec: &BallSpec) -> Vec<Letter> {
    let mut out = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        let unit = v.group.base().cloned().unwrap_or_else(|| int(1));
        let mut dens = vec![int(1)];
        if !v.is_cyclic() {
            for p in v.group.primes() {
                for j in 1..=spec.max_den_exp {
                    dens.push(num::pow(int(p as i64), j as usize));
                }
            }
        }
        let mut vals: Vec<Rational> = Vec::new();
        for d in &dens {
            for k in 1..=spec.max_exp {
                let x = &unit * int(k) / d;
                if !vals.contains(&x) {
                    vals.push(x);
                }
            }
        }
        vals.sort();
        out.extend(vals.into_iter().map(|value| Letter::Vertex { v: i, value }));
    }
    out.extend((0..g.aedges.len()).map(Letter::Edge));
    out
}

/// All products of at most `max_letters` generators, deduplicated by canonical form.
pub fn enumerate_ball(g: &Graph, spec: &BallSpec, cap: usize) -> Result<Ball, OracleError> {
    if g.has_families() {
        return Err(OracleError::Families);
    }
    let gens: Vec<Element> = generators(g, spec)
        .iter()
        .map(|l| canonical(g, &Word(vec![l.clone()])))
        .collect();
    let mut elements = vec![Element::identity()];
    let mut set: HashSet<Element> = elements.iter().cloned().collect();
    let mut layers = vec![1];
    let mut frontier = elements.clone();
    for _ in 0..spec.max_letters {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = mul(g, x, s);
                if set.insert(y.clone()) {
                    if set.len() > cap {
                        return Err(OracleError::BudgetExceeded(cap));
                    }
                    next.push(y.clone());
                    elements.push(y);
                }
            }
        }
        layers.push(elements.len());
        frontier = next;
    }
    Ok(Ball { elements, set, layers, exhaustive: true })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteJoin {
    NoCommonMultiple,
    Minimum(Element),
    /// Common multiples exist in the ball but none of them divides all others.
    Inconclusive(usize),
}

pub fn brute_join(g: &Graph, p: &Element, q: &Element, ball: &Ball) -> BruteJoin {
    let common: Vec<&Element> = ball
        .elements
        .iter()
        .filter(|x| divides(g, p, x).is_some() && divides(g, q, x).is_some())
        .collect();
    if common.is_empty() {
        return BruteJoin::NoCommonMultiple;
    }
    for m in &common {
        if common.iter().all(|c| divides(g, m, c).is_some()) {
            return BruteJoin::Minimum((*m).clone());
        }
    }
    BruteJoin::Inconclusive(common.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Agree,
    Mismatch(String),
    Inconclusive(String),
}

/// Compares an engine join against the ball; the ball can refute but not prove emptiness.
pub fn check_join(g: &Graph, p: &Element, q: &Element, ball: &Ball) -> Result<Verdict, LcmError> {
    let engine = join(g, p, q)?;
    let brute = brute_join(g, p, q, ball);
    Ok(match (engine, brute) {
        (Ideal::Empty, BruteJoin::NoCommonMultiple) => Verdict::Agree,
        (Ideal::Empty, _) => Verdict::Mismatch("engine empty, ball has a common multiple".into()),
        (Ideal::Principal(r), b) => {
            if divides(g, p, &r).is_none() || divides(g, q, &r).is_none() {
                return Ok(Verdict::Mismatch("engine result is not a common multiple".into()));
            }
            match b {
                BruteJoin::Minimum(m) if m == r => Verdict::Agree,
                BruteJoin::Minimum(m) => {
                    if divides(g, &r, &m).is_some() && !ball.contains(&r) {
                        Verdict::Inconclusive("engine result divides the ball minimum".into())
                    } else {
                        Verdict::Mismatch(format!(
                            "engine {} vs ball {}",
                            words::show_elem(g, &r),
                            words::show_elem(g, &m)
                        ))
                    }
                }
                BruteJoin::NoCommonMultiple if !ball.contains(&r) => {
                    Verdict::Inconclusive("result outside the ball".into())
                }
                BruteJoin::NoCommonMultiple => Verdict::Mismatch("ball misses the engine result".into()),
                BruteJoin::Inconclusive(n) => {
                    if ball.elements.iter().filter(|c| divides(g, p, c).is_some() && divides(g, q, c).is_some()).all(|c| divides(g, &r, c).is_some()) {
                        Verdict::Inconclusive(format!("{n} common multiples, no ball minimum"))
                    } else {
                        Verdict::Mismatch("engine result does not divide every common multiple".into())
                    }
                }
            }
        }
    })
}

/// `h ∈ P P^{-1}`. Writing `h = a c^{-1}` with `a, c ∈ P`, the reduced loop of `h`
/// splits at some vertex into a prefix of `a` and a suffix of `c^{-1}`; at the split
/// both sides stay positive once a large enough value is inserted there.
pub fn in_pp_inv(g: &Graph, h: &Element) -> bool {
    let steps = &h.steps;
    let last_fwd = steps.iter().rposition(|(_, y)| matches!(y, OEdge::A { fwd: true, .. }));
    let first_rev = steps.iter().position(|(_, y)| matches!(y, OEdge::A { fwd: false, .. }));
    if let (Some(a), Some(b)) = (last_fwd, first_rev) {
        if a > b {
            return false;
        }
    }
    let lo = last_fwd.map_or(0, |a| a + 1);
    let hi = first_rev.unwrap_or(steps.len());
    (lo..=hi).any(|k| split_ok(g, h, k))
}

fn step_letters(g: &Graph, steps: &[(Rational, OEdge)]) -> Vec<Letter> {
    let mut out = Vec::new();
    for (r, y) in steps {
        out.push(Letter::Vertex { v: g.origin(*y), value: r.clone() });
        if let OEdge::A { idx, fwd } = *y {
            out.push(if fwd { Letter::Edge(idx) } else { Letter::EdgeInv(idx) });
        }
    }
    out
}

fn split_ok(g: &Graph, h: &Element, k: usize) -> bool {
    let v = h.steps.get(k).map_or(g.base, |(_, y)| g.origin(*y));
    let unit = g.vertices[v].group.base().cloned().unwrap_or_else(|| int(1));
    let left = step_letters(g, &h.steps[..k]);
    let mut right = step_letters(g, &h.steps[k..]);
    right.push(Letter::Vertex { v: g.base, value: h.tail.clone() });
    // both conditions are monotone in the inserted value
    let mut x = unit;
    for _ in 0..256 {
        let mut a = left.clone();
        a.push(Letter::Vertex { v, value: x.clone() });
        let mut c_inv = vec![Letter::Vertex { v, value: -x.clone() }];
        c_inv.extend(right.iter().cloned());
        if in_p(g, &canonical(g, &Word(a))) && in_p(g, &inv(g, &canonical(g, &Word(c_inv)))) {
            return true;
        }
        x *= int(2);
    }
    false
}

/// `g·pP ∩ pP ≠ ∅` for every `p` in the ball, or the first `p` where it fails.
pub fn gc_witness_search(g: &Graph, candidate: &Element, ball: &Ball) -> Option<Element> {
    for p in &ball.elements {
        let h = mul(g, &inv(g, p), &mul(g, candidate, p));
        if !in_pp_inv(g, &h) {
            return Some(p.clone());
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub relations_checked: usize,
    pub relation_failures: Vec<String>,
    pub unit_failures: Vec<String>,
}

impl PresentationReport {
    pub fn ok(&self) -> bool {
        self.relation_failures.is_empty() && self.unit_failures.is_empty()
    }
}

/// Checks the defining relations of `rel` inside balls computed with `engine`, and
/// that no nontrivial ball element has an inverse in P. Passing the same graph twice
/// is the normal use; a perturbed `engine` is the negative control.
pub fn presentation_check(rel: &Graph, engine: &Graph, spec: &BallSpec) -> Result<PresentationReport, OracleError> {
    let ball = enumerate_ball(engine, &BallSpec { max_letters: spec.max_letters.min(2), ..*spec }, BALL_CAP)?;
    let mut rels: Vec<(Word, Word, String)> = Vec::new();
    for (i, d) in rel.tree.iter().enumerate() {
        if let Some((a, b)) = &d.images {
            for k in 1..=spec.max_exp {
                let lhs = Word(vec![Letter::Vertex { v: d.v, value: a * int(k) }]);
                let rhs = Word(vec![Letter::Vertex { v: d.w, value: b * int(k) }]);
                rels.push((lhs, rhs, format!("tree edge {i}, k={k}")));
            }
        }
    }
    for (i, e) in rel.aedges.iter().enumerate() {
        for k in 1..=spec.max_exp {
            let a = Letter::Vertex { v: e.o, value: &e.x_obar * int(k) };
            let b = Letter::Vertex { v: e.t, value: num::Signed::abs(&e.x_o) * int(k) };
            let (lhs, rhs) = if e.is_positive() {
                (Word(vec![a, Letter::Edge(i)]), Word(vec![Letter::Edge(i), b]))
            } else {
                (Word(vec![a, Letter::Edge(i), b]), Word(vec![Letter::Edge(i)]))
            };
            rels.push((lhs, rhs, format!("{}, k={k}", e.name)));
        }
    }
    let mut relation_failures = Vec::new();
    let mut checked = 0;
    for (lhs, rhs, name) in &rels {
        let l = canonical(engine, lhs);
        let r = canonical(engine, rhs);
        for u in &ball.elements {
            checked += 1;
            if mul(engine, u, &l) != mul(engine, u, &r) {
                relation_failures.push(name.clone());
                break;
            }
        }
    }
    let mut unit_failures = Vec::new();
    for x in ball.elements.iter().skip(1) {
        if in_p(engine, &inv(engine, x)) {
            unit_failures.push(words::show_elem(engine, x));
        }
    }
    Ok(PresentationReport { relations_checked: checked, relation_failures, unit_failures })
}
