//! Divisibility and least common right multiples in P.

use num::{BigInt, Signed, Zero};
use thiserror::Error;

use crate::arith::{ceil_div, Rational};
use crate::graph::{Graph, OEdge};
use crate::words::{
    self, canonical, head, in_p, ldiv, letter_elem, mul, vertex_elem, Element, Letter,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ideal {
    Empty,
    Principal(Element),
}

impl Ideal {
    pub fn generator(&self) -> Option<&Element> {
        match self {
            Ideal::Principal(x) => Some(x),
            Ideal::Empty => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LcmError {
    #[error("argument is not in P")]
    NotInP,
    #[error("recursion budget exhausted after {0} steps")]
    RecursionDepthExceeded(usize),
}

pub const JOIN_BUDGET: usize = 200_000;

/// `x ∈ pP`: returns `p^{-1} x` when it lies in `P`.
pub fn divides(g: &Graph, p: &Element, x: &Element) -> Option<Element> {
    let y = ldiv(g, p, x);
    in_p(g, &y).then_some(y)
}

/// Steps of the loop up to and including the last extra edge. Every element of
/// `pP` has this prefix in its own loop.
pub fn skeleton(x: &Element) -> &[(Rational, OEdge)] {
    let k = x.steps.iter().rposition(|(_, y)| !y.is_tree()).map_or(0, |i| i + 1);
    &x.steps[..k]
}

fn comparable(a: &[(Rational, OEdge)], b: &[(Rational, OEdge)]) -> bool {
    a.iter().zip(b).all(|(x, y)| x == y)
}

/// Rounds `a` up to the edge images along the tree path and carries it to `z`.
pub fn climb(g: &Graph, a: &Rational, u: usize, z: usize) -> Option<Rational> {
    let mut a = a.clone();
    for y in g.path(u, z) {
        let s = g.src_img(y);
        if s.is_zero() {
            return None;
        }
        let k = Rational::from_integer(ceil_div(&a, &s));
        a = g.tgt_img(y) * k;
    }
    Some(a)
}

fn letter_join(g: &Graph, x: &Letter, y: &Letter) -> Option<Element> {
    match (x, y) {
        (Letter::Vertex { v: u, value: a }, Letter::Vertex { v: w, value: b }) => {
            if u == w {
                return Some(vertex_elem(g, *u, a.max(b).clone()));
            }
            let cands: Vec<Element> = g
                .path_vertices(*u, *w)
                .into_iter()
                .filter_map(|z| {
                    let alpha = climb(g, a, *u, z)?;
                    let beta = climb(g, b, *w, z)?;
                    Some(vertex_elem(g, z, alpha.max(beta)))
                })
                .collect();
            cands
                .iter()
                .find(|c| cands.iter().all(|d| divides(g, c, d).is_some()))
                .cloned()
        }
        (Letter::Vertex { v, value }, Letter::Edge(e)) | (Letter::Edge(e), Letter::Vertex { v, value }) => {
            let edge = &g.aedges[*e];
            let alpha = climb(g, value, *v, edge.o)?;
            let k = Rational::from_integer(ceil_div(&alpha, &edge.x_obar));
            let ee = letter_elem(g, &Letter::Edge(*e));
            if edge.is_positive() {
                Some(mul(g, &vertex_elem(g, edge.o, &edge.x_obar * k), &ee))
            } else {
                Some(ee)
            }
        }
        (Letter::Edge(d), Letter::Edge(e)) => (d == e).then(|| letter_elem(g, x)),
        _ => None,
    }
}

struct Budget {
    used: usize,
    limit: usize,
}

impl Budget {
    fn tick(&mut self) -> Result<(), LcmError> {
        self.used += 1;
        if self.used > self.limit {
            return Err(LcmError::RecursionDepthExceeded(self.used));
        }
        Ok(())
    }
}

pub fn join(g: &Graph, p: &Element, q: &Element) -> Result<Ideal, LcmError> {
    join_with_budget(g, p, q, JOIN_BUDGET)
}

pub fn join_with_budget(g: &Graph, p: &Element, q: &Element, limit: usize) -> Result<Ideal, LcmError> {
    if !in_p(g, p) || !in_p(g, q) {
        return Err(LcmError::NotInP);
    }
    let mut b = Budget { used: 0, limit };
    Ok(match join_rec(g, p, q, &mut b)? {
        Some(r) => Ideal::Principal(r),
        None => Ideal::Empty,
    })
}

// p ∨ q = x (x⁻¹p ∨ x⁻¹(x ∨ q)) for the first letter x of p
fn join_rec(g: &Graph, p: &Element, q: &Element, b: &mut Budget) -> Result<Option<Element>, LcmError> {
    b.tick()?;
    if p.is_identity() || divides(g, p, q).is_some() {
        return Ok(Some(q.clone()));
    }
    if q.is_identity() || divides(g, q, p).is_some() {
        return Ok(Some(p.clone()));
    }
    if !comparable(skeleton(p), skeleton(q)) {
        return Ok(None);
    }
    let x = head(g, p).expect("p is in P");
    let Some(s) = join_letter(g, &x, q, b)? else { return Ok(None) };
    let xe = letter_elem(g, &x);
    let rest = join_rec(g, &ldiv(g, &xe, p), &ldiv(g, &xe, &s), b)?;
    Ok(rest.map(|r| mul(g, &xe, &r)))
}

// x ∨ q = y ((y⁻¹(x ∨ y)) ∨ y⁻¹q) for the first letter y of q
fn join_letter(g: &Graph, x: &Letter, q: &Element, b: &mut Budget) -> Result<Option<Element>, LcmError> {
    b.tick()?;
    let xe = letter_elem(g, x);
    if q.is_identity() {
        return Ok(Some(xe));
    }
    if divides(g, &xe, q).is_some() {
        return Ok(Some(q.clone()));
    }
    let y = head(g, q).expect("q is in P");
    let Some(m) = letter_join(g, x, &y) else { return Ok(None) };
    let ye = letter_elem(g, &y);
    let rest = join_rec(g, &ldiv(g, &ye, &m), &ldiv(g, &ye, q), b)?;
    Ok(rest.map(|r| mul(g, &ye, &r)))
}

/// The `q` with `p^{-1}(P_ē^ē) = q P_ē^ē`, where `P_ē^ē` is the positive part of the
/// image of the edge monoid at the origin of `e`; `None` when that set is empty.
pub fn p_inv_e(g: &Graph, p: &Element, e: OEdge) -> Option<Element> {
    let c = g.src_img(e);
    if c.is_zero() || !in_p(g, p) || p.a_edges().next().is_some() {
        return None;
    }
    let c = c.abs();
    let o = g.origin(e);
    let w = words::render(g, p);
    // single vertex letter: q = c⌈p/c⌉ - p
    if let [Letter::Vertex { v, value }] = w.0.as_slice() {
        if *v == o {
            let k = Rational::from_integer(ceil_div(value, &c));
            return Some(vertex_elem(g, o, &c * k - value));
        }
    }
    if p.is_identity() {
        return Some(Element::identity());
    }
    let reaches = |k: &BigInt| divides(g, p, &vertex_elem(g, o, &c * Rational::from_integer(k.clone())));
    let mut hi = BigInt::from(1);
    let mut rounds = 0;
    while reaches(&hi).is_none() {
        hi *= 2;
        rounds += 1;
        if rounds > 64 {
            return None;
        }
    }
    let mut lo = BigInt::zero();
    while &hi - &lo > BigInt::from(1) {
        let mid: BigInt = (&hi + &lo) / 2;
        if reaches(&mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(!hi.is_negative());
    reaches(&hi)
}

pub fn parse_elem(g: &Graph, s: &str) -> Result<Element, words::WordError> {
    Ok(canonical(g, &words::parse_word(g, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::graph::build::*;
    use crate::words::show_elem;

    fn el(g: &Graph, s: &str) -> Element {
        parse_elem(g, s).unwrap()
    }

    fn free() -> Graph {
        Graph::new(vec![cyclic("a", int(1)), cyclic("c", int(1))], vec![trivial(0, 1)], vec![], 0).unwrap()
    }

    #[test]
    fn divides_examples() {
        let g = bs(1, 2);
        assert_eq!(divides(&g, &el(&g, "b"), &el(&g, "b^3")), Some(el(&g, "b^2")));
        assert_eq!(divides(&g, &el(&g, "b"), &el(&g, "e")), None);
        let p = el(&g, "e b e");
        assert_eq!(divides(&g, &p, &p), Some(Element::identity()));
    }

    #[test]
    fn join_examples() {
        let g = bs(1, 2);
        let r = join(&g, &el(&g, "b"), &el(&g, "e")).unwrap();
        assert_eq!(r, Ideal::Principal(el(&g, "e b^2")));
        assert_eq!(join(&g, &Element::identity(), &el(&g, "e")).unwrap(), Ideal::Principal(el(&g, "e")));
        let f = free();
        assert_eq!(join(&f, &el(&f, "a"), &el(&f, "c")).unwrap(), Ideal::Empty);
        let h = bs(2, 3);
        assert_eq!(join(&h, &el(&h, "e"), &el(&h, "b e")).unwrap(), Ideal::Empty);
        assert_eq!(
            join(&h, &el(&h, "b"), &el(&h, "e")).unwrap(),
            Ideal::Principal(el(&h, "b^2 e"))
        );
    }

    #[test]
    fn negative_edge_join() {
        // b f b = f, so f is a multiple of b
        let g = gbs(&[("f", 1, -1)]);
        let r = join(&g, &el(&g, "f"), &el(&g, "b f")).unwrap();
        assert_eq!(r, Ideal::Principal(el(&g, "f")));
        let r = join(&g, &el(&g, "b^3"), &el(&g, "f")).unwrap();
        assert_eq!(r, Ideal::Principal(el(&g, "f")));
    }

    #[test]
    fn p_inv_e_examples() {
        let g = bs(2, 3);
        let e = OEdge::A { idx: 0, fwd: true };
        assert_eq!(p_inv_e(&g, &el(&g, "b"), e), Some(el(&g, "b")));
        assert_eq!(p_inv_e(&g, &el(&g, "b^2"), e), Some(Element::identity()));
        assert_eq!(p_inv_e(&g, &el(&g, "e"), e), None);
        let two = Graph::new(vec![cyclic("v", int(1)), cyclic("w", int(1))], vec![tedge(0, 1, 2, 3)], vec![], 0)
            .unwrap();
        let d = OEdge::Tree { idx: 0, fwd: false };
        // w:1 needs w:2 more to reach the image <3> at w
        let q = p_inv_e(&two, &el(&two, "w:1"), d).unwrap();
        assert_eq!(show_elem(&two, &q), "w:2");
        let q = p_inv_e(&two, &el(&two, "v:1 w:1"), d).unwrap();
        let prod = mul(&two, &el(&two, "v:1 w:1"), &q);
        assert!((1..40).any(|k| prod == vertex_elem(&two, 1, int(3 * k))));
    }
}
