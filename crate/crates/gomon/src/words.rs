//! Words, canonical forms, positivity and reduction.
//!
//! Group elements are stored as reduced loops at the base vertex:
//! `r_1 y_1 r_2 y_2 ... r_n y_n tail`, each `r_i` a residue modulo the image of
//! `y_i` at its origin. Two words are equal iff their loops are identical.

use std::fmt;

use num::{BigInt, Signed, Zero};
use thiserror::Error;

use crate::arith::{ceil_div, floor_div, fmt_rational, int, is_integer, parse_rational, Rational};
use crate::graph::{Graph, OEdge};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Vertex { v: usize, value: Rational },
    Edge(usize),
    EdgeInv(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| match l {
            Letter::Vertex { value, .. } => !value.is_negative(),
            Letter::Edge(_) => true,
            Letter::EdgeInv(_) => false,
        })
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown token {0}")]
    UnknownToken(String),
    #[error("bad value in token {0}")]
    BadValue(String),
    #[error("{0} is not in the vertex group")]
    NotInGroup(String),
    #[error("vertex {0} has no generator; give an explicit value")]
    NoGenerator(String),
    #[error("element is not in P")]
    NotInP,
    #[error("graph has infinite families; word operations need a finite graph")]
    Families,
}

/// Reduced loop at the base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub steps: Vec<(Rational, OEdge)>,
    pub tail: Rational,
}

impl Element {
    pub fn identity() -> Self {
        Element { steps: Vec::new(), tail: Rational::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty() && self.tail.is_zero()
    }

    pub fn a_edges(&self) -> impl Iterator<Item = OEdge> + '_ {
        self.steps.iter().map(|s| s.1).filter(|y| !y.is_tree())
    }
}

struct Reducer<'g> {
    g: &'g Graph,
    stack: Vec<(Rational, OEdge)>,
    cur: Rational,
    at: usize,
}

impl<'g> Reducer<'g> {
    fn new(g: &'g Graph) -> Self {
        Reducer { g, stack: Vec::new(), cur: Rational::zero(), at: g.base }
    }

    fn from(g: &'g Graph, x: &Element) -> Self {
        Reducer { g, stack: x.steps.clone(), cur: x.tail.clone(), at: g.base }
    }

    fn value(&mut self, x: &Rational) {
        self.cur += x;
    }

    fn edge(&mut self, y: OEdge) {
        debug_assert_eq!(self.g.origin(y), self.at);
        let s = self.g.src_img(y);
        let t = self.g.tgt_img(y);
        let (r, z) = if s.is_zero() {
            (self.cur.clone(), Rational::zero())
        } else {
            let q = Rational::from_integer(floor_div(&self.cur, &s.abs()));
            let r = &self.cur - &q * s.abs();
            let z = if s.is_negative() { -q } else { q };
            (r, z)
        };
        if r.is_zero() && matches!(self.stack.last(), Some((_, top)) if *top == y.rev()) {
            let (prev, _) = self.stack.pop().unwrap();
            self.cur = prev + t * z;
        } else {
            self.stack.push((r, y));
            self.cur = t * z;
        }
        self.at = self.g.target(y);
    }

    fn goto(&mut self, v: usize) {
        for y in self.g.path(self.at, v) {
            self.edge(y);
        }
    }

    fn letter(&mut self, l: &Letter) {
        match l {
            Letter::Vertex { v, value } => {
                self.goto(*v);
                self.value(value);
            }
            Letter::Edge(i) => {
                self.goto(self.g.aedges[*i].o);
                self.edge(OEdge::A { idx: *i, fwd: true });
            }
            Letter::EdgeInv(i) => {
                self.goto(self.g.aedges[*i].t);
                self.edge(OEdge::A { idx: *i, fwd: false });
            }
        }
    }

    fn element(&mut self, x: &Element) {
        for (r, y) in &x.steps {
            self.value(r);
            self.edge(*y);
        }
        self.value(&x.tail);
    }

    fn finish(mut self) -> Element {
        self.goto(self.g.base);
        Element { steps: self.stack, tail: self.cur }
    }
}

pub fn canonical(g: &Graph, w: &Word) -> Element {
    let mut r = Reducer::new(g);
    for l in &w.0 {
        r.letter(l);
    }
    r.finish()
}

pub fn mul(g: &Graph, a: &Element, b: &Element) -> Element {
    let mut r = Reducer::from(g, a);
    r.element(b);
    r.finish()
}

pub fn inv(g: &Graph, a: &Element) -> Element {
    let mut r = Reducer::new(g);
    r.value(&-&a.tail);
    for (res, y) in a.steps.iter().rev() {
        r.edge(y.rev());
        r.value(&-res);
    }
    r.finish()
}

/// `a^{-1} b`.
pub fn ldiv(g: &Graph, a: &Element, b: &Element) -> Element {
    mul(g, &inv(g, a), b)
}

pub fn pow(g: &Graph, a: &Element, k: u64) -> Element {
    let mut out = Element::identity();
    let mut base = a.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = mul(g, &out, &base);
        }
        base = mul(g, &base, &base);
        k >>= 1;
    }
    out
}

pub fn vertex_elem(g: &Graph, v: usize, value: Rational) -> Element {
    canonical(g, &Word(vec![Letter::Vertex { v, value }]))
}

pub fn edge_elem(g: &Graph, i: usize) -> Element {
    canonical(g, &Word(vec![Letter::Edge(i)]))
}

/// Path form ending wherever the element naturally lives: the tail is pulled back
/// across trailing tree edges while it lies in their image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenForm {
    pub steps: Vec<(Rational, OEdge)>,
    pub end: usize,
    pub tail: Rational,
}

pub fn open_form(g: &Graph, x: &Element) -> OpenForm {
    let mut steps = x.steps.clone();
    let mut tail = x.tail.clone();
    let mut end = g.base;
    while let Some(&(ref r, y)) = steps.last() {
        if !y.is_tree() {
            break;
        }
        let t = g.tgt_img(y);
        let z = if t.is_zero() {
            if !tail.is_zero() {
                break;
            }
            Rational::zero()
        } else {
            let z = &tail / &t;
            if !is_integer(&z) {
                break;
            }
            z
        };
        tail = r + g.src_img(y) * z;
        end = g.origin(y);
        steps.pop();
    }
    OpenForm { steps, end, tail }
}

/// Letters of the canonical form, zero residues and tree crossings omitted.
pub fn render(g: &Graph, x: &Element) -> Word {
    let f = open_form(g, x);
    let mut out = Vec::new();
    for (r, y) in &f.steps {
        if !r.is_zero() {
            out.push(Letter::Vertex { v: g.origin(*y), value: r.clone() });
        }
        if let OEdge::A { idx, fwd } = *y {
            out.push(if fwd { Letter::Edge(idx) } else { Letter::EdgeInv(idx) });
        }
    }
    if !f.tail.is_zero() {
        out.push(Letter::Vertex { v: f.end, value: f.tail });
    }
    Word(out)
}

/// Whether a loop with the given steps admits nonnegative entries once `tail` is appended.
fn feasible(g: &Graph, steps: &[(Rational, OEdge)], tail: &Rational) -> bool {
    // None stands for "as large as needed"
    let mut t: Option<Rational> = Some(tail.clone());
    for (r, y) in steps.iter().rev() {
        let OEdgeInfo { s, tt, trivial, reversed_a } = info(g, *y);
        if reversed_a {
            return false;
        }
        t = if trivial {
            match &t {
                Some(v) if v.is_negative() => return false,
                _ => Some(r.clone()),
            }
        } else if tt.is_negative() {
            None
        } else {
            t.map(|v| r + &s * Rational::from_integer(floor_div(&v, &tt)))
        };
    }
    t.map_or(true, |v| !v.is_negative())
}

struct OEdgeInfo {
    s: Rational,
    tt: Rational,
    trivial: bool,
    reversed_a: bool,
}

fn info(g: &Graph, y: OEdge) -> OEdgeInfo {
    OEdgeInfo {
        s: g.src_img(y),
        tt: g.tgt_img(y),
        trivial: g.is_trivial(y),
        reversed_a: matches!(y, OEdge::A { fwd: false, .. }),
    }
}

pub fn in_p(g: &Graph, x: &Element) -> bool {
    feasible(g, &x.steps, &x.tail)
}

/// A positive word for an element of `P`, found by a backward sweep that pushes as
/// much as possible towards the front.
pub fn positivize(g: &Graph, x: &Element) -> Option<Word> {
    if !in_p(g, x) {
        return None;
    }
    let n = x.steps.len();
    let mut entries = vec![Rational::zero(); n + 1];
    let mut t = x.tail.clone();
    for i in (0..n).rev() {
        let (r, y) = &x.steps[i];
        let OEdgeInfo { s, tt, trivial, .. } = info(g, *y);
        let prefix = &x.steps[..i];
        let ok = |z: &BigInt| feasible(g, prefix, &(r + &s * Rational::from_integer(z.clone())));
        // keep the canonical entries where possible, push back only what is needed
        let z: BigInt = if trivial {
            BigInt::zero()
        } else if tt.is_negative() {
            let lo = ceil_div(&-&t, &tt.abs()).max(BigInt::zero());
            least_satisfying(lo, ok)
        } else {
            let hi = floor_div(&t, &tt);
            if hi.is_negative() {
                hi
            } else if ok(&BigInt::zero()) {
                BigInt::zero()
            } else {
                least_satisfying(BigInt::zero(), ok).min(hi)
            }
        };
        let zq = Rational::from_integer(z);
        entries[i + 1] = &t - &tt * &zq;
        t = r + &s * zq;
    }
    entries[0] = t;
    debug_assert!(entries.iter().all(|e| !e.is_negative()));
    let mut out = Vec::new();
    for i in 0..n {
        let (_, y) = x.steps[i];
        if !entries[i].is_zero() {
            out.push(Letter::Vertex { v: g.origin(y), value: entries[i].clone() });
        }
        if let OEdge::A { idx, .. } = y {
            out.push(Letter::Edge(idx));
        }
    }
    if !entries[n].is_zero() {
        out.push(Letter::Vertex { v: g.base, value: entries[n].clone() });
    }
    Some(Word(out))
}

/// Smallest integer `>= lo` satisfying a monotone predicate that holds eventually.
fn least_satisfying(lo: BigInt, ok: impl Fn(&BigInt) -> bool) -> BigInt {
    if ok(&lo) {
        return lo;
    }
    let mut step = BigInt::from(1);
    let mut bad = lo.clone();
    loop {
        let cand = &lo + &step;
        if ok(&cand) {
            let mut good = cand;
            while &good - &bad > BigInt::from(1) {
                let mid: BigInt = (&good + &bad) / 2;
                if ok(&mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            return good;
        }
        bad = cand;
        step *= 2;
    }
}

/// First letter of the positive rendering, and the remaining element.
pub fn head(g: &Graph, x: &Element) -> Option<Letter> {
    positivize(g, x)?.0.first().cloned()
}

pub fn letter_elem(g: &Graph, l: &Letter) -> Element {
    canonical(g, &Word(vec![l.clone()]))
}

// ---------------------------------------------------------------------------
// Expansion into paths, tree rewriting and metrics.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Letter(usize, Rational),
    Edge(OEdge),
}

/// Inserts tree geodesics between letters, from the base and back to it.
pub fn expand(g: &Graph, w: &Word) -> Vec<Item> {
    let mut out = Vec::new();
    let mut at = g.base;
    let go = |out: &mut Vec<Item>, at: &mut usize, v: usize| {
        for y in g.path(*at, v) {
            out.push(Item::Edge(y));
        }
        *at = v;
    };
    for l in &w.0 {
        match l {
            Letter::Vertex { v, value } => {
                go(&mut out, &mut at, *v);
                out.push(Item::Letter(*v, value.clone()));
            }
            Letter::Edge(i) => {
                let a = &g.aedges[*i];
                go(&mut out, &mut at, a.o);
                out.push(Item::Edge(OEdge::A { idx: *i, fwd: true }));
                at = a.t;
            }
            Letter::EdgeInv(i) => {
                let a = &g.aedges[*i];
                go(&mut out, &mut at, a.t);
                out.push(Item::Edge(OEdge::A { idx: *i, fwd: false }));
                at = a.o;
            }
        }
    }
    go(&mut out, &mut at, g.base);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    /// Edges in the expansion.
    pub ell: usize,
    /// Tree edges strictly between the first and last letter of each A-free segment.
    pub inner: usize,
}

fn vertex_of(g: &Graph, l: &Letter, start: bool) -> usize {
    match l {
        Letter::Vertex { v, .. } => *v,
        Letter::Edge(i) => {
            if start { g.aedges[*i].o } else { g.aedges[*i].t }
        }
        Letter::EdgeInv(i) => {
            if start { g.aedges[*i].t } else { g.aedges[*i].o }
        }
    }
}

pub fn metrics(g: &Graph, w: &Word) -> Metrics {
    let ell = expand(g, w).iter().filter(|i| matches!(i, Item::Edge(_))).count();
    let mut inner = 0;
    for k in 1..w.0.len() {
        let a = vertex_of(g, &w.0[k - 1], false);
        let b = vertex_of(g, &w.0[k], true);
        inner += g.path(a, b).len();
    }
    Metrics { ell, inner }
}

/// One rewrite that shortens the inner tree paths or merges letters; `None` if the
/// word is properly reduced.
fn tree_step(g: &Graph, w: &Word) -> Option<Word> {
    let ls = &w.0;
    for (k, l) in ls.iter().enumerate() {
        if let Letter::Vertex { value, .. } = l {
            if value.is_zero() {
                let mut v = ls.clone();
                v.remove(k);
                return Some(Word(v));
            }
        }
    }
    for k in 1..ls.len() {
        if let (Letter::Vertex { v: a, value: x }, Letter::Vertex { v: b, value: y }) = (&ls[k - 1], &ls[k]) {
            if a == b {
                let mut v = ls.clone();
                v[k - 1] = Letter::Vertex { v: *a, value: x + y };
                v.remove(k);
                return Some(Word(v));
            }
        }
    }
    for k in 0..ls.len() {
        let Letter::Vertex { v, value } = &ls[k] else { continue };
        let before = (k > 0).then(|| vertex_of(g, &ls[k - 1], false));
        let after = (k + 1 < ls.len()).then(|| vertex_of(g, &ls[k + 1], true));
        let first_out = after.and_then(|b| g.path(*v, b).first().copied());
        let last_in = before.and_then(|a| g.path(a, *v).last().copied());
        // a letter that can slide one edge towards a neighbour shortens the inner path
        let slide = match (last_in, first_out) {
            (Some(i), Some(o)) if o == i.rev() => Some(o),
            (None, Some(o)) if before.is_none() => Some(o),
            (Some(i), None) if after.is_none() => Some(i.rev()),
            _ => None,
        };
        if let Some(y) = slide {
            let s = g.src_img(y);
            if s.is_zero() {
                continue;
            }
            let z = value / &s;
            if is_integer(&z) {
                let mut out = ls.clone();
                out[k] = Letter::Vertex { v: g.target(y), value: g.tgt_img(y) * z };
                return Some(Word(out));
            }
        }
    }
    None
}

/// Tree-only rewriting to a properly reduced word. Returns the word and the
/// `(inner, letters)` measure after every step.
pub fn tree_reduce(g: &Graph, w: &Word) -> (Word, Vec<(usize, usize)>) {
    let mut w = w.clone();
    let mut trace = vec![(metrics(g, &w).inner, w.0.len())];
    while let Some(next) = tree_step(g, &w) {
        w = next;
        trace.push((metrics(g, &w).inner, w.0.len()));
    }
    (w, trace)
}

/// Properly reduced positive word for the same element.
pub fn reduce(g: &Graph, w: &Word) -> Result<Word, WordError> {
    let x = canonical(g, w);
    let p = positivize(g, &x).ok_or(WordError::NotInP)?;
    Ok(tree_reduce(g, &p).0)
}

/// Letters of a canonical element from `P`, with cached metrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub element: Element,
    pub letters: Word,
    pub metrics: Metrics,
}

pub fn normal_form(g: &Graph, w: &Word) -> Result<NormalForm, WordError> {
    let element = canonical(g, w);
    if !in_p(g, &element) {
        return Err(WordError::NotInP);
    }
    Ok(normal_form_of(g, element))
}

pub fn normal_form_of(g: &Graph, element: Element) -> NormalForm {
    let letters = render(g, &element);
    let metrics = metrics(g, &letters);
    NormalForm { element, letters, metrics }
}

pub fn equal(g: &Graph, a: &Word, b: &Word) -> bool {
    canonical(g, a) == canonical(g, b)
}

/// Equality of positive words by aligning reduced expansions edge by edge,
/// carrying the difference across each edge. Independent of [`canonical`].
pub fn equal_by_alignment(g: &Graph, a: &Word, b: &Word) -> bool {
    let sa = segments(g, &tree_reduce(g, a).0);
    let sb = segments(g, &tree_reduce(g, b).0);
    if sa.1 != sb.1 {
        return false;
    }
    let mut carry = Rational::zero();
    for (i, y) in sa.1.iter().enumerate() {
        let d = &carry + &sb.0[i] - &sa.0[i];
        let s = g.src_img(*y);
        carry = if s.is_zero() {
            if !d.is_zero() {
                return false;
            }
            Rational::zero()
        } else {
            let z = &d / &s;
            if !is_integer(&z) {
                return false;
            }
            g.tgt_img(*y) * z
        };
    }
    carry + &sb.0[sb.1.len()] == sa.0[sa.1.len()]
}

/// `(values at each position, edges)` of the expansion with every backtrack
/// `ȳ c y`, `c` in the edge image, folded into the previous position.
fn segments(g: &Graph, w: &Word) -> (Vec<Rational>, Vec<OEdge>) {
    let mut vals = vec![Rational::zero()];
    let mut edges: Vec<OEdge> = Vec::new();
    for it in expand(g, w) {
        match it {
            Item::Letter(_, x) => *vals.last_mut().unwrap() += x,
            Item::Edge(y) => {
                let c = vals.last().unwrap().clone();
                let s = g.src_img(y);
                let fold = edges.last() == Some(&y.rev())
                    && if s.is_zero() { c.is_zero() } else { is_integer(&(&c / &s)) };
                if fold {
                    let z = if s.is_zero() { Rational::zero() } else { &c / &s };
                    vals.pop();
                    edges.pop();
                    *vals.last_mut().unwrap() += g.tgt_img(y) * z;
                } else {
                    edges.push(y);
                    vals.push(Rational::zero());
                }
            }
        }
    }
    (vals, edges)
}

// ---------------------------------------------------------------------------
// Tokens.

pub fn parse_word(g: &Graph, s: &str) -> Result<Word, WordError> {
    if g.has_families() {
        return Err(WordError::Families);
    }
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "eps" || tok == "ε" {
            continue;
        }
        if let Some(name) = tok.strip_prefix("e:") {
            let (name, inverse) = match name.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (name, false),
            };
            let i = g.aedge_index(name).ok_or_else(|| WordError::UnknownToken(tok.into()))?;
            out.push(if inverse { Letter::EdgeInv(i) } else { Letter::Edge(i) });
            continue;
        }
        if let Some((id, val)) = tok.split_once(':') {
            let v = g.vertex_index(id).ok_or_else(|| WordError::UnknownToken(tok.into()))?;
            let value = parse_rational(val).ok_or_else(|| WordError::BadValue(tok.into()))?;
            if !g.vertices[v].group.contains(&value) {
                return Err(WordError::NotInGroup(tok.into()));
            }
            out.push(Letter::Vertex { v, value });
            continue;
        }
        let (name, k) = match tok.split_once('^') {
            Some((n, k)) => (n, k.parse::<i64>().map_err(|_| WordError::BadValue(tok.into()))?),
            None => (tok, 1),
        };
        if let Some(i) = g.aedge_index(name) {
            let l = if k < 0 { Letter::EdgeInv(i) } else { Letter::Edge(i) };
            out.extend(std::iter::repeat(l).take(k.unsigned_abs() as usize));
            continue;
        }
        let v = match g.vertex_index(name) {
            Some(v) => v,
            None if name == "b" => g.base,
            None => return Err(WordError::UnknownToken(tok.into())),
        };
        let gen = g.vertices[v]
            .generator()
            .ok_or_else(|| WordError::NoGenerator(g.vertices[v].id.clone()))?;
        out.push(Letter::Vertex { v, value: gen * int(k) });
    }
    Ok(Word(out))
}

pub struct Show<'a>(pub &'a Graph, pub &'a Word);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Show(g, w) = self;
        if w.0.is_empty() {
            return write!(f, "eps");
        }
        let toks: Vec<String> = w
            .0
            .iter()
            .map(|l| match l {
                Letter::Vertex { v, value } => format!("{}:{}", g.vertices[*v].id, fmt_rational(value)),
                Letter::Edge(i) => format!("e:{}", g.aedges[*i].name),
                Letter::EdgeInv(i) => format!("e:{}^-1", g.aedges[*i].name),
            })
            .collect();
        write!(f, "{}", toks.join(" "))
    }
}

pub fn show(g: &Graph, w: &Word) -> String {
    Show(g, w).to_string()
}

pub fn show_elem(g: &Graph, x: &Element) -> String {
    show(g, &render(g, x))
}
