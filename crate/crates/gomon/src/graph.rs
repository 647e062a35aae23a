//! Graphs of monoids over subgroups of Q: vertices, tree edges, extra edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{fmt_rational, is_integer, Rational, RationalSubgroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// `G_v`; the positive cone is `P_v = G_v ∩ [0, ∞)`.
    pub group: RationalSubgroup,
    /// Marks infinitely many copies hanging off the same tree neighbour.
    pub family: bool,
}

impl Vertex {
    pub fn is_cyclic(&self) -> bool {
        self.group.is_cyclic()
    }

    pub fn generator(&self) -> Option<&Rational> {
        self.group.generator()
    }
}

/// Undirected tree edge between `v` and `w`. `images = (x_ē in G_v, x_e in G_w)`;
/// `None` is a trivial edge monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub v: usize,
    pub w: usize,
    pub images: Option<(Rational, Rational)>,
}

impl TreeEdge {
    pub fn is_trivial(&self) -> bool {
        self.images.is_none()
    }
}

/// Edge outside the tree with `(x_ē z) e = e (x_e z)`; `x_e < 0` puts it in `A₋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AEdge {
    pub name: String,
    pub o: usize,
    pub t: usize,
    pub x_obar: Rational,
    pub x_o: Rational,
    pub family: bool,
}

impl AEdge {
    pub fn is_positive(&self) -> bool {
        self.x_o.is_positive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OEdge {
    Tree { idx: usize, fwd: bool },
    A { idx: usize, fwd: bool },
}

impl OEdge {
    pub fn rev(self) -> Self {
        match self {
            OEdge::Tree { idx, fwd } => OEdge::Tree { idx, fwd: !fwd },
            OEdge::A { idx, fwd } => OEdge::A { idx, fwd: !fwd },
        }
    }

    pub fn is_tree(self) -> bool {
        matches!(self, OEdge::Tree { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Card {
    Finite(usize),
    Infinite,
}

impl Card {
    pub fn is_zero(self) -> bool {
        self == Card::Finite(0)
    }
    pub fn is_finite(self) -> bool {
        matches!(self, Card::Finite(_))
    }
    pub fn positive_finite(self) -> bool {
        matches!(self, Card::Finite(n) if n > 0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("no vertices")]
    Empty,
    #[error("duplicate identifier {0}")]
    Duplicate(String),
    #[error("invalid identifier {0}")]
    BadId(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("tree edges do not form a spanning tree")]
    NotATree,
    #[error("vertex {0}: group must be nontrivial")]
    TrivialVertex(String),
    #[error("{0}: image {1} is not a positive element of the vertex group")]
    BadImage(String, String),
    #[error("{0}: x_o must be nonzero")]
    ZeroImage(String),
    #[error("family marker on vertex {0} is not allowed on the base vertex")]
    BadFamily(String),
}

#[derive(Clone, Debug)]
pub struct Graph {
    pub vertices: Vec<Vertex>,
    pub tree: Vec<TreeEdge>,
    pub aedges: Vec<AEdge>,
    pub base: usize,
    parent: Vec<Option<OEdge>>,
    depth: Vec<usize>,
}

impl Graph {
    pub fn new(
        vertices: Vec<Vertex>,
        tree: Vec<TreeEdge>,
        aedges: Vec<AEdge>,
        base: usize,
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !valid_id(&v.id) || v.id == "e" {
                return Err(GraphError::BadId(v.id.clone()));
            }
            if !seen.insert(v.id.clone()) {
                return Err(GraphError::Duplicate(v.id.clone()));
            }
            if v.group.is_trivial() {
                return Err(GraphError::TrivialVertex(v.id.clone()));
            }
        }
        for a in &aedges {
            if !valid_id(&a.name) {
                return Err(GraphError::BadId(a.name.clone()));
            }
            if !seen.insert(a.name.clone()) {
                return Err(GraphError::Duplicate(a.name.clone()));
            }
        }
        let n = vertices.len();
        if base >= n || tree.len() + 1 != n {
            return Err(GraphError::NotATree);
        }
        let check = |vi: usize, x: &Rational, what: &str| -> Result<(), GraphError> {
            if !x.is_positive() || !vertices[vi].group.contains(x) {
                return Err(GraphError::BadImage(what.to_string(), fmt_rational(x)));
            }
            Ok(())
        };
        for (i, d) in tree.iter().enumerate() {
            if d.v >= n || d.w >= n || d.v == d.w {
                return Err(GraphError::NotATree);
            }
            if let Some((a, b)) = &d.images {
                check(d.v, a, &format!("tree edge {i}"))?;
                check(d.w, b, &format!("tree edge {i}"))?;
            }
        }
        for a in &aedges {
            if a.o >= n || a.t >= n {
                return Err(GraphError::NotATree);
            }
            check(a.o, &a.x_obar, &a.name)?;
            if a.x_o.is_zero() {
                return Err(GraphError::ZeroImage(a.name.clone()));
            }
            check(a.t, &a.x_o.abs(), &a.name)?;
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        seen[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            for (i, d) in tree.iter().enumerate() {
                let (next, e) = if d.v == u {
                    (d.w, OEdge::Tree { idx: i, fwd: true })
                } else if d.w == u {
                    (d.v, OEdge::Tree { idx: i, fwd: false })
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some(e);
                    depth[next] = depth[u] + 1;
                    queue.push_back(next);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::NotATree);
        }
        let g = Graph { vertices, tree, aedges, base, parent, depth };
        for (i, v) in g.vertices.iter().enumerate() {
            if v.family {
                if g.parent[i].is_none() {
                    return Err(GraphError::BadFamily(v.id.clone()));
                }
            }
        }
        Ok(g)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn aedge_index(&self, name: &str) -> Option<usize> {
        self.aedges.iter().position(|a| a.name == name)
    }

    pub fn origin(&self, y: OEdge) -> usize {
        match y {
            OEdge::Tree { idx, fwd } => {
                let d = &self.tree[idx];
                if fwd { d.v } else { d.w }
            }
            OEdge::A { idx, fwd } => {
                let a = &self.aedges[idx];
                if fwd { a.o } else { a.t }
            }
        }
    }

    pub fn target(&self, y: OEdge) -> usize {
        self.origin(y.rev())
    }

    /// Image of the edge generator at the origin of `y` (zero for a trivial edge).
    pub fn src_img(&self, y: OEdge) -> Rational {
        match y {
            OEdge::Tree { idx, fwd } => match &self.tree[idx].images {
                None => Rational::zero(),
                Some((a, b)) => {
                    if fwd { a.clone() } else { b.clone() }
                }
            },
            OEdge::A { idx, fwd } => {
                let a = &self.aedges[idx];
                if fwd { a.x_obar.clone() } else { a.x_o.clone() }
            }
        }
    }

    /// Image at the target, so that `(src z) y = y (tgt z)`.
    pub fn tgt_img(&self, y: OEdge) -> Rational {
        self.src_img(y.rev())
    }

    pub fn is_trivial(&self, y: OEdge) -> bool {
        match y {
            OEdge::Tree { idx, .. } => self.tree[idx].is_trivial(),
            OEdge::A { .. } => false,
        }
    }

    /// Oriented tree path from `u` to `w`.
    pub fn path(&self, u: usize, w: usize) -> Vec<OEdge> {
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut a, mut b) = (u, w);
        while self.depth[a] > self.depth[b] {
            let e = self.parent[a].unwrap();
            up.push(e.rev());
            a = self.origin(e);
        }
        while self.depth[b] > self.depth[a] {
            let e = self.parent[b].unwrap();
            down.push(e);
            b = self.origin(e);
        }
        while a != b {
            let ea = self.parent[a].unwrap();
            up.push(ea.rev());
            a = self.origin(ea);
            let eb = self.parent[b].unwrap();
            down.push(eb);
            b = self.origin(eb);
        }
        down.reverse();
        up.extend(down);
        up
    }

    pub fn path_vertices(&self, u: usize, w: usize) -> Vec<usize> {
        let mut out = vec![u];
        for y in self.path(u, w) {
            out.push(self.target(y));
        }
        out
    }

    /// Moves an element of `G_u` to `G_w` along the tree, if it lies in every edge image.
    pub fn transport(&self, x: &Rational, u: usize, w: usize) -> Option<Rational> {
        let mut x = x.clone();
        for y in self.path(u, w) {
            let s = self.src_img(y);
            if s.is_zero() {
                if x.is_zero() {
                    continue;
                }
                return None;
            }
            let z = &x / &s;
            if !is_integer(&z) {
                return None;
            }
            x = self.tgt_img(y) * z;
        }
        Some(x)
    }

    /// Largest subgroup of `H ⊆ G_u` that survives transport to `w`, expressed in `G_w`.
    pub fn transport_subgroup(&self, h: &RationalSubgroup, u: usize, w: usize) -> RationalSubgroup {
        let mut h = h.clone();
        for y in self.path(u, w) {
            let s = self.src_img(y);
            if s.is_zero() {
                return RationalSubgroup::Trivial;
            }
            h = h.intersect(&RationalSubgroup::cyclic(s.clone()));
            h = h.scale(&(self.tgt_img(y) / s));
        }
        h
    }

    pub fn num_vertices(&self) -> Card {
        if self.vertices.iter().any(|v| v.family) {
            Card::Infinite
        } else {
            Card::Finite(self.vertices.len())
        }
    }

    fn count_a(&self, positive: bool) -> Card {
        let es: Vec<&AEdge> = self.aedges.iter().filter(|a| a.is_positive() == positive).collect();
        if es.iter().any(|a| a.family) {
            Card::Infinite
        } else {
            Card::Finite(es.len())
        }
    }

    pub fn num_a_plus(&self) -> Card {
        self.count_a(true)
    }

    pub fn num_a_minus(&self) -> Card {
        self.count_a(false)
    }

    pub fn num_a(&self) -> Card {
        match (self.num_a_plus(), self.num_a_minus()) {
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a + b),
            _ => Card::Infinite,
        }
    }

    pub fn has_families(&self) -> bool {
        self.vertices.iter().any(|v| v.family) || self.aedges.iter().any(|a| a.family)
    }

    pub fn has_trivial_tree_edge(&self) -> bool {
        self.tree.iter().any(|d| d.is_trivial())
    }

    pub fn all_cyclic(&self) -> bool {
        self.vertices.iter().all(|v| v.is_cyclic())
    }

    pub fn has_dense(&self) -> bool {
        !self.all_cyclic()
    }

    /// `(n_e, m_e)` with `x_ē = n b_o`, `|x_e| = m b_t`, for cyclic endpoints.
    pub fn edge_multipliers(&self, i: usize) -> Option<(Rational, Rational)> {
        let a = &self.aedges[i];
        let bo = self.vertices[a.o].generator()?;
        let bt = self.vertices[a.t].generator()?;
        Some((&a.x_obar / bo, a.x_o.abs() / bt))
    }

    /// `(k_e, l_e)` for an extra edge: with `g` generating `<n b_o> ∩ <m b_t>` in `G_{o(e)}`,
    /// `g = l n b_o` and `g = k m b_t` after transport to `t(e)`.
    pub fn edge_invariants(&self, i: usize) -> Result<(i64, i64), EdgeInvariantError> {
        let a = &self.aedges[i];
        let (n, m) = self.edge_multipliers(i).ok_or(EdgeInvariantError::Dense)?;
        if !is_integer(&n) || !is_integer(&m) {
            return Err(EdgeInvariantError::NonIntegral);
        }
        let h_o = RationalSubgroup::cyclic(a.x_obar.clone());
        let h_t = RationalSubgroup::cyclic(a.x_o.abs());
        let moved = self.transport_subgroup(&h_t, a.t, a.o);
        if moved.is_trivial() {
            return Err(EdgeInvariantError::Separated);
        }
        let g = h_o.intersect(&moved);
        let g = g.generator().ok_or(EdgeInvariantError::Separated)?.clone();
        let l = &g / &a.x_obar;
        let back = self.transport(&g, a.o, a.t).ok_or(EdgeInvariantError::Separated)?;
        let k = back / a.x_o.abs();
        if !is_integer(&k) || !is_integer(&l) {
            return Err(EdgeInvariantError::NonIntegral);
        }
        let to = |q: Rational| i64::try_from(q.to_integer()).map_err(|_| EdgeInvariantError::NonIntegral);
        Ok((to(k)?, to(l)?))
    }

    /// `(x_ē / b_v, x_e / b_w)` for a nontrivial tree edge between cyclic vertices.
    pub fn tree_edge_index(&self, i: usize) -> Option<(Rational, Rational)> {
        let d = &self.tree[i];
        let (a, b) = d.images.as_ref()?;
        let bv = self.vertices[d.v].generator()?;
        let bw = self.vertices[d.w].generator()?;
        Some((a / bv, b / bw))
    }

    /// Largest ratio a value can grow by when moved across one tree edge.
    pub fn transport_ratio(&self) -> Rational {
        let mut r = Rational::one();
        for d in &self.tree {
            if let Some((a, b)) = &d.images {
                let q = if a > b { a / b } else { b / a };
                if q > r {
                    r = q;
                }
            }
        }
        r
    }

    pub fn tree_diameter(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) * 2
    }

    /// Vertex ids by index, for rendering.
    pub fn vertex_ids(&self) -> BTreeMap<usize, String> {
        self.vertices.iter().enumerate().map(|(i, v)| (i, v.id.clone())).collect()
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeInvariantError {
    #[error("endpoint group is not cyclic")]
    Dense,
    #[error("edge ratio is not integral")]
    NonIntegral,
    #[error("endpoints separated by a trivial tree edge")]
    Separated,
}

fn valid_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.chars().next().unwrap().is_ascii_digit()
}

/// Small constructors used by tests, the catalog and the CLI.
pub mod build {
    use super::*;
    use crate::arith::int;

    pub fn cyclic(id: &str, gen: Rational) -> Vertex {
        Vertex { id: id.into(), group: RationalSubgroup::cyclic(gen), family: false }
    }

    pub fn dense(id: &str, base: Rational, primes: &[u64]) -> Vertex {
        Vertex {
            id: id.into(),
            group: RationalSubgroup::new(base, primes.iter().copied().collect()),
            family: false,
        }
    }

    pub fn aedge(name: &str, o: usize, t: usize, x_obar: Rational, x_o: Rational) -> AEdge {
        AEdge { name: name.into(), o, t, x_obar, x_o, family: false }
    }

    pub fn tedge(v: usize, w: usize, a: i64, b: i64) -> TreeEdge {
        TreeEdge { v, w, images: Some((int(a), int(b))) }
    }

    pub fn trivial(v: usize, w: usize) -> TreeEdge {
        TreeEdge { v, w, images: None }
    }

    /// One vertex `Z`, edges `b^n e = e b^m` (m > 0) or `b^n e b^|m| = e` (m < 0).
    pub fn gbs(edges: &[(&str, i64, i64)]) -> Graph {
        let es = edges
            .iter()
            .map(|(name, n, m)| aedge(name, 0, 0, int(*n), int(*m)))
            .collect();
        Graph::new(vec![cyclic("v", int(1))], vec![], es, 0).expect("valid GBS graph")
    }

    pub fn bs(n: i64, m: i64) -> Graph {
        gbs(&[("e", n, m)])
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;
    use crate::arith::{frac, int};

    fn chain() -> Graph {
        let vs = vec![cyclic("a", int(1)), cyclic("b", int(1)), cyclic("c", int(1))];
        Graph::new(vs, vec![tedge(0, 1, 2, 3), tedge(1, 2, 2, 5)], vec![], 1).unwrap()
    }

    #[test]
    fn paths() {
        let g = chain();
        assert_eq!(g.path_vertices(0, 2), vec![0, 1, 2]);
        assert_eq!(g.path_vertices(2, 0), vec![2, 1, 0]);
        assert!(g.path(1, 1).is_empty());
    }

    #[test]
    fn transport_values() {
        let g = chain();
        assert_eq!(g.transport(&int(4), 0, 1), Some(int(6)));
        assert_eq!(g.transport(&int(3), 0, 1), None);
        assert_eq!(g.transport(&int(4), 0, 2), Some(int(15)));
        let h = g.transport_subgroup(&RationalSubgroup::cyclic(int(1)), 0, 2);
        assert_eq!(h, RationalSubgroup::cyclic(int(15)));
    }

    #[test]
    fn bs_invariants() {
        assert_eq!(bs(2, 3).edge_invariants(0), Ok((2, 3)));
        assert_eq!(bs(1, 2).edge_invariants(0), Ok((1, 2)));
        assert_eq!(bs(2, 4).edge_invariants(0), Ok((1, 2)));
        assert_eq!(bs(2, -3).edge_invariants(0), Ok((2, 3)));
    }

    #[test]
    fn dense_endpoint_is_not_defined() {
        let vs = vec![dense("v", int(1), &[2])];
        let g = Graph::new(vs, vec![], vec![aedge("e", 0, 0, int(1), int(2))], 0).unwrap();
        assert_eq!(g.edge_invariants(0), Err(EdgeInvariantError::Dense));
    }

    #[test]
    fn validation_errors() {
        let vs = vec![cyclic("v", int(2))];
        let bad = Graph::new(vs.clone(), vec![], vec![aedge("e", 0, 0, int(3), int(2))], 0);
        assert!(matches!(bad, Err(GraphError::BadImage(..))));
        let bad = Graph::new(vec![cyclic("e", int(1))], vec![], vec![], 0);
        assert!(matches!(bad, Err(GraphError::BadId(_))));
        let bad = Graph::new(vec![cyclic("v", int(1)), cyclic("w", int(1))], vec![], vec![], 0);
        assert_eq!(bad.unwrap_err(), GraphError::NotATree);
        let ok = Graph::new(vs, vec![], vec![aedge("e", 0, 0, int(2), frac(-4, 1))], 0);
        assert!(ok.is_ok());
    }

    #[test]
    fn counts() {
        let g = gbs(&[("e", 1, 2), ("f", 2, -3)]);
        assert_eq!(g.num_a_plus(), Card::Finite(1));
        assert_eq!(g.num_a_minus(), Card::Finite(1));
        assert_eq!(g.num_vertices(), Card::Finite(1));
    }
}
