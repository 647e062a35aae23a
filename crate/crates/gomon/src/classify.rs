//! Invariant subspaces of Ω, topological freeness, nuclearity and K-theory read off
//! from graph data.

use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{int, RationalSubgroup};
use crate::graph::{build, Card, EdgeInvariantError, Graph};
use crate::omega::{chi_eval, classify_character, is_one_vertex_gbs, parse_character, Character};
use crate::words::{vertex_elem, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("edge invariants not defined: {0}")]
    NotDefined(EdgeInvariantError),
    #[error("case not covered: {0}")]
    CaseNotCovered(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Label {
    Omega,
    ClosureOmegaInfty,
    OmegaInfty,
    OmegaBInfty,
    OmegaAInfty,
    BoundaryOmega,
    PointInfty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b { Verdict::Yes } else { Verdict::No }
    }
}

/// Finitely generated abelian group, or a named group we do not compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    Fg { free_rank: u32, torsion: Vec<BigInt> },
    Opaque(String),
}

impl Group {
    pub fn trivial() -> Self {
        Group::Fg { free_rank: 0, torsion: vec![] }
    }

    pub fn z() -> Self {
        Group::Fg { free_rank: 1, torsion: vec![] }
    }

    /// `Z/n`, with `Z/0 = Z` and `Z/±1 = 0`.
    pub fn zmod(n: &BigInt) -> Self {
        let n = n.abs();
        if n.is_zero() {
            Group::z()
        } else if n.is_one() {
            Group::trivial()
        } else {
            Group::Fg { free_rank: 0, torsion: vec![n] }
        }
    }

    pub fn sum(&self, other: &Group) -> Group {
        match (self, other) {
            (Group::Fg { free_rank: a, torsion: s }, Group::Fg { free_rank: b, torsion: t }) => {
                let mut torsion: Vec<BigInt> = s.iter().chain(t).cloned().collect();
                torsion.sort();
                Group::Fg { free_rank: a + b, torsion }
            }
            _ => Group::Opaque(format!("{self} + {other}")),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Group::Fg { free_rank: 0, torsion } if torsion.is_empty())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Opaque(s) => write!(f, "{s}"),
            Group::Fg { free_rank, torsion } => {
                let mut parts = Vec::new();
                match free_rank {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    r => parts.push(format!("Z^{r}")),
                }
                parts.extend(torsion.iter().map(|n| format!("Z/{n}")));
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", parts.join(" + "))
                }
            }
        }
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `(K_0, [1]_0, K_1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KTriple {
    #[serde(rename = "K0")]
    pub k0: Group,
    pub unit: String,
    #[serde(rename = "K1")]
    pub k1: Group,
}

impl KTriple {
    /// Unit `1` in the first summand; written `0` when `K_0` is trivial.
    fn new(k0: Group, unit: &str, k1: Group) -> Self {
        let unit = if k0.is_trivial() { "0".to_string() } else { unit.to_string() };
        KTriple { k0, unit, k1 }
    }

    pub fn of_c() -> Self {
        KTriple::new(Group::z(), "1", Group::trivial())
    }
}

impl fmt::Display for KTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.k0, self.unit, self.k1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopFree {
    pub verdict: Verdict,
    pub reason: String,
}

fn tf(verdict: impl Into<Verdict>, reason: impl Into<String>) -> TopFree {
    TopFree { verdict: verdict.into(), reason: reason.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceNode {
    /// Names of the subspaces that coincide at this node.
    pub labels: Vec<Label>,
    pub is_boundary: bool,
    pub is_minimal: bool,
    pub top_free: TopFree,
    pub k_theory: Option<KTriple>,
    pub algebra_label: Option<String>,
}

impl SubspaceNode {
    pub fn has(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }

    pub fn name(&self) -> String {
        self.labels.iter().map(|l| format!("{l:?}")).collect::<Vec<_>>().join("=")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inclusion {
    pub lower: usize,
    pub upper: usize,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice {
    pub case: String,
    pub nodes: Vec<SubspaceNode>,
    pub inclusions: Vec<Inclusion>,
}

impl Lattice {
    /// `A < B` for strict inclusions, `A <= B` otherwise, one per line.
    pub fn render(&self) -> String {
        if self.inclusions.is_empty() {
            return self.nodes.iter().map(|n| n.name()).collect::<Vec<_>>().join("\n");
        }
        self.inclusions
            .iter()
            .map(|i| {
                let op = if i.strict { "<" } else { "<=" };
                format!("{} {op} {}", self.nodes[i.lower].name(), self.nodes[i.upper].name())
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn boundary(&self) -> &SubspaceNode {
        self.nodes.iter().find(|n| n.is_boundary).expect("one boundary node")
    }
}

fn card_pos(c: Card) -> bool {
    !c.is_zero()
}

fn finite_pos(c: Card) -> bool {
    c.positive_finite()
}

fn a_is_zero(g: &Graph) -> bool {
    g.num_a().is_zero()
}

/// `Ω̄_∞ = Ω`: a dense vertex, or infinitely many vertices or `A₊` edges.
pub fn closure_infty_is_omega(g: &Graph) -> bool {
    g.has_dense() || !g.num_vertices().is_finite() || !g.num_a_plus().is_finite()
}

fn node(labels: &[Label]) -> SubspaceNode {
    SubspaceNode {
        labels: labels.to_vec(),
        is_boundary: labels.contains(&Label::BoundaryOmega),
        is_minimal: labels.contains(&Label::BoundaryOmega),
        top_free: tf(Verdict::Unknown, ""),
        k_theory: None,
        algebra_label: None,
    }
}

/// A chain `n0 ⊆ n1 ⊆ ...` with the given strictness between consecutive nodes.
fn chain(case: &str, nodes: Vec<&[Label]>, strict: &[bool]) -> Lattice {
    let inclusions = strict
        .iter()
        .enumerate()
        .map(|(i, s)| Inclusion { lower: i, upper: i + 1, strict: *s })
        .collect();
    Lattice { case: case.into(), nodes: nodes.into_iter().map(node).collect(), inclusions }
}

/// The lattice of closed invariant subspaces, before node attributes are filled in.
pub fn lattice_shape(g: &Graph) -> Result<Lattice, ClassifyError> {
    use Label::*;
    let one_vertex = g.vertices.len() == 1 && !g.vertices[0].family;
    if g.has_trivial_tree_edge() {
        if g.has_dense() {
            return Ok(chain("(i1)", vec![&[BoundaryOmega, Omega]], &[]));
        }
        if closure_infty_is_omega(g) {
            return Ok(chain("(i2)", vec![&[BoundaryOmega, ClosureOmegaInfty, Omega]], &[]));
        }
        return Ok(chain("(i2)", vec![&[BoundaryOmega, ClosureOmegaInfty], &[Omega]], &[true]));
    }
    if a_is_zero(g) {
        if one_vertex {
            return Err(ClassifyError::HypothesesNotMet("one vertex and no extra edges".into()));
        }
        if closure_infty_is_omega(g) {
            return Ok(chain("(ii2)", vec![&[PointInfty, BoundaryOmega], &[ClosureOmegaInfty, Omega]], &[true]));
        }
        return Ok(chain(
            "(ii2)",
            vec![&[PointInfty, BoundaryOmega], &[ClosureOmegaInfty], &[Omega]],
            &[true, true],
        ));
    }
    if g.has_dense() {
        return Ok(chain("(ii1)", vec![&[OmegaBInfty, BoundaryOmega], &[ClosureOmegaInfty, Omega]], &[true]));
    }
    if !one_vertex {
        if closure_infty_is_omega(g) {
            return Ok(chain("(ii3)", vec![&[OmegaBInfty, BoundaryOmega], &[ClosureOmegaInfty, Omega]], &[true]));
        }
        return Ok(chain(
            "(ii3)",
            vec![&[OmegaBInfty, BoundaryOmega], &[ClosureOmegaInfty], &[Omega]],
            &[true, true],
        ));
    }
    let ap = g.num_a_plus();
    let am = g.num_a_minus();
    let fin = |c: Card| c.is_finite();
    let lat = if finite_pos(ap) && am.is_zero() {
        let nodes: Vec<&[Label]> = vec![&[BoundaryOmega], &[OmegaAInfty], &[OmegaBInfty], &[OmegaInfty], &[Omega]];
        let edges = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)];
        Lattice {
            case: "GBS(i)".into(),
            nodes: nodes.into_iter().map(node).collect(),
            inclusions: edges.iter().map(|&(a, b)| Inclusion { lower: a, upper: b, strict: true }).collect(),
        }
    } else if ap.is_zero() && finite_pos(am) {
        chain("GBS(ii)", vec![&[BoundaryOmega, OmegaAInfty], &[OmegaInfty, OmegaBInfty], &[Omega]], &[true, true])
    } else if finite_pos(ap) && finite_pos(am) {
        chain(
            "GBS(iii)",
            vec![&[BoundaryOmega], &[OmegaBInfty], &[OmegaInfty], &[Omega]],
            &[true, true, true],
        )
    } else if ap.is_zero() && !fin(am) {
        chain("GBS(iv)", vec![&[BoundaryOmega, OmegaBInfty, OmegaInfty], &[Omega]], &[true])
    } else if finite_pos(ap) && !fin(am) {
        chain("GBS(v)", vec![&[BoundaryOmega, OmegaBInfty], &[OmegaInfty], &[Omega]], &[true, true])
    } else if !fin(ap) {
        chain("GBS(vi)", vec![&[BoundaryOmega, OmegaBInfty], &[Omega]], &[true])
    } else {
        return Err(ClassifyError::CaseNotCovered("edge counts".into()));
    };
    Ok(lat)
}

// ---------------------------------------------------------------------------
// G^c and topological freeness

/// `k_e | l_e` for every extra edge; `Err` when some invariant is undefined.
fn all_k_divide_l(g: &Graph) -> Result<Option<String>, ClassifyError> {
    for i in 0..g.aedges.len() {
        let (k, l) = g.edge_invariants(i).map_err(ClassifyError::NotDefined)?;
        if l % k != 0 {
            return Ok(Some(g.aedges[i].name.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gc {
    /// Subgroup of `G_base`; `Trivial` means `{ε}`.
    pub group: RationalSubgroup,
    /// The same intersection with the edge subgroups taken at `t(e)`.
    pub group_at_targets: RationalSubgroup,
    pub readings_differ: bool,
}

fn vertex_intersection(g: &Graph) -> RationalSubgroup {
    let mut h = g.vertices[g.base].group.clone();
    for v in 0..g.vertices.len() {
        h = h.intersect(&g.transport_subgroup(&g.vertices[v].group, v, g.base));
    }
    h
}

pub fn compute_gc(g: &Graph) -> Result<Gc, ClassifyError> {
    if g.has_trivial_tree_edge() {
        return Err(ClassifyError::HypothesesNotMet("trivial tree edge".into()));
    }
    if a_is_zero(g) {
        return Err(ClassifyError::HypothesesNotMet("no extra edges".into()));
    }
    if all_k_divide_l(g)?.is_some() {
        let t = RationalSubgroup::Trivial;
        return Ok(Gc { group: t.clone(), group_at_targets: t, readings_differ: false });
    }
    let mut at_o = vertex_intersection(g);
    let mut at_t = at_o.clone();
    for (i, e) in g.aedges.iter().enumerate() {
        let (k, _) = g.edge_invariants(i).map_err(ClassifyError::NotDefined)?;
        let (n, _) = g.edge_multipliers(i).expect("cyclic endpoints");
        let kn = int(k) * n;
        let bo = g.vertices[e.o].generator().expect("cyclic").clone();
        let bt = g.vertices[e.t].generator().expect("cyclic").clone();
        at_o = at_o.intersect(&g.transport_subgroup(&RationalSubgroup::cyclic(&kn * bo), e.o, g.base));
        at_t = at_t.intersect(&g.transport_subgroup(&RationalSubgroup::cyclic(&kn * bt), e.t, g.base));
    }
    let differ = at_o != at_t;
    Ok(Gc { group: at_o, group_at_targets: at_t, readings_differ: differ })
}

/// Topological freeness of the boundary action, with the clause that decided it.
pub fn boundary_top_free(g: &Graph) -> TopFree {
    if let Some(i) = g.tree.iter().position(|d| d.is_trivial()) {
        return tf(true, format!("tree edge {i} is trivial"));
    }
    if a_is_zero(g) {
        return tf(false, "no extra edges: the boundary is a fixed point");
    }
    match all_k_divide_l(g) {
        Err(e) => tf(Verdict::Unknown, e.to_string()),
        Ok(Some(name)) => tf(true, format!("k does not divide l for {name}")),
        Ok(None) => match compute_gc(g) {
            Ok(gc) if gc.group.is_trivial() => tf(true, "G^c is trivial"),
            Ok(gc) => tf(false, format!("G^c = {}", gc.group)),
            Err(e) => tf(Verdict::Unknown, e.to_string()),
        },
    }
}

fn single_edge_m(g: &Graph) -> Option<BigInt> {
    let pos: Vec<usize> = (0..g.aedges.len()).filter(|&i| g.aedges[i].is_positive()).collect();
    if let [i] = pos.as_slice() {
        return g.edge_multipliers(*i).map(|(_, m)| m.to_integer());
    }
    None
}

/// `#A₊ >= 2`, or a single positive edge with `m_e != 1`.
fn enough_positive(g: &Graph) -> bool {
    match g.num_a_plus() {
        Card::Infinite => true,
        Card::Finite(n) if n >= 2 => true,
        Card::Finite(1) => single_edge_m(g).map_or(false, |m| !m.is_one()),
        _ => false,
    }
}

fn node_top_free(g: &Graph, n: &SubspaceNode) -> TopFree {
    use Label::*;
    if n.has(Omega) {
        return tf(true, "always free on all of Omega");
    }
    if n.is_boundary {
        return boundary_top_free(g);
    }
    let nv = g.num_vertices();
    let one = nv == Card::Finite(1);
    let finite_a = g.num_a().is_finite();
    if n.has(OmegaInfty) || n.has(ClosureOmegaInfty) {
        if let Card::Finite(k) = nv {
            if k > 1 && g.all_cyclic() && g.num_a_plus().is_finite() {
                if g.has_trivial_tree_edge() {
                    return tf(true, "trivial tree edge");
                }
                if card_pos(g.num_a_plus()) {
                    return tf(true, "some positive extra edge");
                }
                if k > 2 {
                    return tf(true, "more than two vertices");
                }
                let idx = g.tree_edge_index(0);
                let doubling = idx.map_or(false, |(a, b)| a == int(2) && b == int(2));
                return tf(!doubling, "two vertices, no positive extra edge; free unless the edge doubles both sides");
            }
        }
        if one && finite_a {
            return tf(false, "one vertex with finitely many extra edges");
        }
        if one && finite_pos(g.num_a_plus()) && !g.num_a_minus().is_finite() {
            return tf(enough_positive(g), "one vertex, infinitely many negative edges");
        }
        return tf(Verdict::Unknown, "shape not covered");
    }
    if n.has(OmegaBInfty) {
        if one && finite_a {
            return tf(false, "one vertex with finitely many extra edges");
        }
        return tf(Verdict::Unknown, "shape not covered");
    }
    if n.has(OmegaAInfty) {
        if one && finite_pos(g.num_a_plus()) && g.num_a_minus().is_zero() {
            return tf(enough_positive(g), "one vertex, only positive extra edges");
        }
        return tf(Verdict::Unknown, "shape not covered");
    }
    tf(Verdict::Unknown, "shape not covered")
}

// ---------------------------------------------------------------------------
// Ideals, nuclearity, pure infiniteness

/// Whether every closed invariant subspace carries a topologically free action, which
/// makes ideals correspond to closed invariant subspaces.
pub fn ideal_correspondence(g: &Graph) -> Verdict {
    if g.has_trivial_tree_edge() {
        return Verdict::Yes;
    }
    let free_boundary = || -> Result<bool, ClassifyError> {
        if a_is_zero(g) {
            return Ok(false);
        }
        if all_k_divide_l(g)?.is_some() {
            return Ok(true);
        }
        Ok(compute_gc(g)?.group.is_trivial())
    };
    let nv = g.num_vertices();
    let one = nv == Card::Finite(1);
    let inf_a = !g.num_a().is_finite();
    let ap = g.num_a_plus();
    let gate = if !one {
        !a_is_zero(g)
    } else if inf_a && (ap.is_zero() || !ap.is_finite()) {
        true
    } else if inf_a {
        enough_positive(g)
    } else {
        false
    };
    if !gate {
        return Verdict::No;
    }
    match free_boundary() {
        Ok(b) => b.into(),
        Err(_) => Verdict::Unknown,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Nuclearity {
    pub nuclear: bool,
    /// Vertex ids of an offending subtree with nontrivial edges.
    pub witness: Option<Vec<String>>,
}

pub fn nuclearity(g: &Graph) -> Nuclearity {
    let ids = |vs: &[usize]| vs.iter().map(|&v| g.vertices[v].id.clone()).collect::<Vec<_>>();
    let mut nontrivial_deg = vec![0usize; g.vertices.len()];
    for d in g.tree.iter().filter(|d| !d.is_trivial()) {
        nontrivial_deg[d.v] += 1;
        nontrivial_deg[d.w] += 1;
    }
    // a family hanging off a nontrivial edge gives its parent several such edges
    for (i, d) in g.tree.iter().enumerate() {
        if d.is_trivial() {
            continue;
        }
        let doubling = g.tree_edge_index(i).map_or(false, |(a, b)| a == int(2) && b == int(2));
        if !doubling {
            return Nuclearity { nuclear: false, witness: Some(ids(&[d.v, d.w])) };
        }
        for &(x, y) in &[(d.v, d.w), (d.w, d.v)] {
            if g.vertices[x].family {
                return Nuclearity { nuclear: false, witness: Some(ids(&[y, x, x])) };
            }
            if nontrivial_deg[x] > 1 {
                let other = g
                    .tree
                    .iter()
                    .find(|e| !e.is_trivial() && (e.v == x || e.w == x) && !(e.v == y || e.w == y))
                    .map(|e| if e.v == x { e.w } else { e.v })
                    .unwrap_or(x);
                return Nuclearity { nuclear: false, witness: Some(ids(&[y, x, other])) };
            }
        }
    }
    Nuclearity { nuclear: true, witness: None }
}

/// A trivial tree edge together with a dense vertex gives a purely infinite simple
/// algebra; without them nothing is claimed.
pub fn pure_infiniteness_simple(g: &Graph) -> Verdict {
    if g.has_trivial_tree_edge() && g.has_dense() {
        Verdict::Yes
    } else {
        Verdict::Unknown
    }
}

// ---------------------------------------------------------------------------
// K-theory

fn sum_n(g: &Graph) -> Option<BigInt> {
    (0..g.aedges.len()).map(|i| g.edge_multipliers(i).map(|(n, _)| n.to_integer())).sum()
}

fn sum_signed_m(g: &Graph) -> Option<BigInt> {
    (0..g.aedges.len())
        .map(|i| {
            let (_, m) = g.edge_multipliers(i)?;
            let m = m.to_integer();
            Some(if g.aedges[i].is_positive() { m } else { -m })
        })
        .sum()
}

fn sum_neg_m(g: &Graph) -> Option<BigInt> {
    (0..g.aedges.len())
        .filter(|&i| !g.aedges[i].is_positive())
        .map(|i| g.edge_multipliers(i).map(|(_, m)| m.to_integer()))
        .sum()
}

fn trivial_tree_edges(g: &Graph) -> usize {
    g.tree.iter().filter(|d| d.is_trivial()).count()
}

/// The group algebra of `G_T`; explicit only when `G_T = Z`.
fn k_of_tree_group(g: &Graph) -> KTriple {
    if g.vertices.len() == 1 && g.vertices[0].is_cyclic() && !g.vertices[0].family {
        return KTriple::new(Group::z(), "1", Group::z());
    }
    let opaque = Group::Opaque("K_*(C*(G_T))".into());
    KTriple { k0: opaque.clone(), unit: "[1]".into(), k1: opaque }
}

fn k_one_vertex_boundary(g: &Graph) -> KTriple {
    let one = BigInt::one();
    let sn = sum_n(g).expect("cyclic");
    let sm = sum_signed_m(g).expect("cyclic");
    if sn != one {
        let k0 = Group::zmod(&(&one - &sn));
        if sm != one {
            KTriple::new(k0, "1", Group::zmod(&(&one - &sm)))
        } else {
            KTriple::new(k0.sum(&Group::z()), "(1,0)", Group::z())
        }
    } else {
        let m = single_edge_m(g).expect("one positive edge");
        if m != one {
            KTriple::new(Group::z(), "1", Group::z().sum(&Group::zmod(&(&one - &m))))
        } else {
            KTriple::new(Group::z().sum(&Group::z()), "(1,0)", Group::z().sum(&Group::z()))
        }
    }
}

pub fn k_theory(g: &Graph, n: &SubspaceNode) -> Result<KTriple, ClassifyError> {
    use Label::*;
    if n.has(Omega) {
        return Ok(KTriple::of_c());
    }
    let nv = g.num_vertices();
    let one = nv == Card::Finite(1) && g.all_cyclic();
    let cyc = g.all_cyclic();
    let finite_a = g.num_a().is_finite();
    if (n.has(OmegaInfty) || n.has(ClosureOmegaInfty)) && g.num_a_plus().is_finite() && nv.is_finite() && cyc {
        if !g.has_trivial_tree_edge() {
            return Ok(KTriple::new(Group::z(), "1", Group::z()));
        }
        let big_n = BigInt::from(trivial_tree_edges(g));
        return Ok(KTriple::new(Group::zmod(&big_n), "1", Group::trivial()));
    }
    if n.has(OmegaAInfty) && one && finite_a && (g.num_a_plus().is_zero() || g.num_a_minus().is_zero()) {
        let one_i = BigInt::one();
        let sn = sum_n(g).expect("cyclic");
        let k1_tail = Group::zmod(&(&one_i + sum_neg_m(g).expect("cyclic")));
        return Ok(if sn != one_i {
            KTriple::new(Group::zmod(&(&one_i - &sn)), "1", k1_tail)
        } else {
            KTriple::new(Group::z(), "1", Group::z().sum(&k1_tail))
        });
    }
    if n.is_boundary && one && finite_a && card_pos(g.num_a_plus()) {
        return Ok(k_one_vertex_boundary(g));
    }
    if n.has(OmegaBInfty) && !g.has_trivial_tree_edge() && card_pos(g.num_a()) && (cyc || nv != Card::Finite(1)) {
        return Ok(k_of_tree_group(g));
    }
    if n.has(PointInfty) && a_is_zero(g) {
        let opaque = Group::Opaque("K_*(C*(G))".into());
        return Ok(KTriple { k0: opaque.clone(), unit: "[1]".into(), k1: opaque });
    }
    Err(ClassifyError::CaseNotCovered(format!("no formula for {}", n.name())))
}

// ---------------------------------------------------------------------------
// Boundary quotient

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub tf: TopFree,
    /// True when the two readings of the intersection condition disagree.
    pub tf_readings_differ: bool,
    pub nuclear: Nuclearity,
    pub is_uct_kirchberg: bool,
    #[serde(rename = "K_boundary")]
    pub k_theory: Option<KTriple>,
    pub label: Option<String>,
    pub consistency_failures: Vec<String>,
}

/// K-theory of the boundary quotient read from the boundary clauses alone.
fn boundary_k_direct(g: &Graph) -> Option<(KTriple, Option<String>)> {
    let trivial = g.has_trivial_tree_edge();
    let nv = g.num_vertices();
    if trivial && (g.has_dense() || !nv.is_finite() || !g.num_a_plus().is_finite()) {
        return Some((KTriple::of_c(), Some("O_inf".into())));
    }
    if trivial {
        let n = trivial_tree_edges(g);
        return Some((KTriple::new(Group::zmod(&BigInt::from(n)), "1", Group::trivial()), Some(format!("O_{}", n + 1))));
    }
    let one = nv == Card::Finite(1);
    if nv != Card::Finite(1) || g.has_dense() || (one && !g.num_a().is_finite()) {
        return Some((k_of_tree_group(g), None));
    }
    if one && card_pos(g.num_a_plus()) {
        return Some((k_one_vertex_boundary(g), None));
    }
    None
}

pub fn boundary_report(g: &Graph) -> Result<BoundaryReport, ClassifyError> {
    let lat = subspace_lattice(g)?;
    let tfv = boundary_top_free(g);
    let differ = compute_gc(g).map_or(false, |gc| gc.readings_differ);
    let nuc = nuclearity(g);
    let kirchberg = tfv.verdict == Verdict::Yes && nuc.nuclear;
    let node_k = lat.boundary().k_theory.clone();
    let mut failures = Vec::new();
    let (k_theory, label) = match (kirchberg, boundary_k_direct(g)) {
        (true, Some((k, label))) => {
            if node_k.as_ref().map_or(false, |nk| *nk != k) {
                failures.push(format!("boundary node K-theory {} vs direct {}", node_k.clone().unwrap(), k));
            }
            (Some(k), label)
        }
        _ => (node_k, None),
    };
    if kirchberg && g.num_vertices() == Card::Finite(1) && g.all_cyclic() && g.num_a().is_finite() && card_pos(g.num_a_plus()) && sum_n(g) == Some(BigInt::one()) {
        failures.push("sum of n_e is 1 although the boundary algebra is Kirchberg".into());
    }
    Ok(BoundaryReport {
        tf: tfv,
        tf_readings_differ: differ,
        nuclear: nuc,
        is_uct_kirchberg: kirchberg,
        k_theory,
        label,
        consistency_failures: failures,
    })
}

/// The lattice with topological freeness, K-theory and algebra labels on each node.
pub fn subspace_lattice(g: &Graph) -> Result<Lattice, ClassifyError> {
    let mut lat = lattice_shape(g)?;
    let kirchberg_label = {
        let t = boundary_top_free(g).verdict == Verdict::Yes && nuclearity(g).nuclear;
        if t { boundary_k_direct(g).and_then(|(_, l)| l) } else { None }
    };
    for n in lat.nodes.iter_mut() {
        n.top_free = node_top_free(g, n);
        n.k_theory = k_theory(g, n).ok();
        if n.is_boundary {
            n.algebra_label = kirchberg_label.clone();
        }
    }
    Ok(lat)
}

// ---------------------------------------------------------------------------
// Strict inclusions, witnessed by characters

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub lower: String,
    pub upper: String,
    pub character: Option<String>,
    /// `None` when word operations are unavailable (graphs with families).
    pub certified: Option<bool>,
}

/// Some `b^i`, `i <= 8`, with `χ(b^i) = 0`, for `b` a tree-edge image.
fn misses_tree_power(g: &Graph, chi: &Character) -> bool {
    let Some(d) = g.tree.iter().find(|d| !d.is_trivial()) else { return false };
    let (a, _) = d.images.clone().expect("nontrivial");
    (1..=8).any(|k| !chi_eval(g, chi, &vertex_elem(g, d.v, &a * int(k))))
}

fn alternating(g: &Graph) -> Option<Character> {
    let d = g.tree.iter().find(|d| !d.is_trivial())?;
    let unit = |v: usize| g.vertices[v].group.base().cloned().unwrap_or_else(|| int(1));
    let w = Word(vec![Letter::Vertex { v: d.v, value: unit(d.v) }, Letter::Vertex { v: d.w, value: unit(d.w) }]);
    Character::periodic(g, crate::words::Element::identity(), &w).ok()
}

pub fn strictness_witnesses(g: &Graph, lat: &Lattice) -> Vec<Witness> {
    use Label::*;
    let mut out = Vec::new();
    for inc in lat.inclusions.iter().filter(|i| i.strict) {
        let lo = &lat.nodes[inc.lower];
        let up = &lat.nodes[inc.upper];
        let mut w = Witness { lower: lo.name(), upper: up.name(), character: None, certified: None };
        if g.has_families() {
            out.push(w);
            continue;
        }
        let gbs = is_one_vertex_gbs(g);
        let pos_edge = g.aedges.iter().find(|e| e.is_positive()).map(|e| e.name.clone());
        let (chi, ok): (Option<Character>, bool) = if up.has(Omega) && !lo.has(Omega) {
            let c = Character::Finite(crate::words::Element::identity());
            let ok = !classify_character(g, &c).in_omega_infty;
            (Some(c), ok)
        } else if gbs && lo.is_boundary && up.has(OmegaBInfty) && !lo.has(OmegaBInfty) {
            let c = Character::BInfinity(0);
            let f = classify_character(g, &c);
            (Some(c), f.in_omega_b_inf == Some(true) && f.in_omega_max == Some(false))
        } else if gbs && lo.is_boundary && up.has(OmegaAInfty) && !lo.has(OmegaAInfty) {
            let c = pos_edge.and_then(|e| parse_character(g, &format!("periodic: eps | {e}")).ok());
            let ok = c.as_ref().map_or(false, |c| {
                let f = classify_character(g, c);
                f.in_omega_a_inf && f.in_omega_max == Some(false)
            });
            (c, ok)
        } else if gbs && lo.has(OmegaAInfty) && !lo.has(OmegaBInfty) && up.has(OmegaInfty) {
            let c = Character::BInfinity(0);
            let f = classify_character(g, &c);
            (Some(c), f.in_omega_infty && !f.in_omega_a_inf)
        } else if gbs && lo.has(OmegaBInfty) && up.has(OmegaInfty) {
            let c = pos_edge.and_then(|e| parse_character(g, &format!("periodic: eps | {e}")).ok());
            let ok = c.as_ref().map_or(false, |c| {
                let f = classify_character(g, c);
                f.in_omega_infty && f.in_omega_b_inf == Some(false)
            });
            (c, ok)
        } else if !gbs && (up.has(ClosureOmegaInfty) || up.has(OmegaInfty)) {
            let c = alternating(g);
            let ok = c.as_ref().map_or(false, |c| classify_character(g, c).in_omega_infty && misses_tree_power(g, c));
            (c, ok)
        } else {
            (None, false)
        };
        w.character = chi.map(|c| c.render(g));
        w.certified = Some(ok && w.character.is_some());
        out.push(w);
    }
    out
}

// ---------------------------------------------------------------------------
// Full report

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub case: String,
    pub lattice: Vec<String>,
    pub nodes: Vec<SubspaceNode>,
    pub inclusions: Vec<Inclusion>,
    pub gc: Option<String>,
    pub ideal_correspondence: Verdict,
    pub nuclearity: Nuclearity,
    pub pure_infinite_simple: Verdict,
    pub boundary: BoundaryReport,
    pub witnesses: Vec<Witness>,
}

pub fn classify(g: &Graph) -> Result<ClassificationReport, ClassifyError> {
    let lat = subspace_lattice(g)?;
    let gc = compute_gc(g).ok().map(|gc| gc.group.to_string());
    Ok(ClassificationReport {
        case: lat.case.clone(),
        lattice: lat.render().lines().map(String::from).collect(),
        witnesses: strictness_witnesses(g, &lat),
        nodes: lat.nodes,
        inclusions: lat.inclusions,
        gc,
        ideal_correspondence: ideal_correspondence(g),
        nuclearity: nuclearity(g),
        pure_infinite_simple: pure_infiniteness_simple(g),
        boundary: boundary_report(g)?,
    })
}

/// Named example graphs covering every lattice case.
pub fn catalog() -> Vec<(&'static str, Graph)> {
    use build::*;
    let two = |a: i64, b: i64, edges: Vec<crate::graph::AEdge>| {
        Graph::new(vec![cyclic("v", int(1)), cyclic("w", int(1))], vec![tedge(0, 1, a, b)], edges, 0).unwrap()
    };
    let fam = |mut e: crate::graph::AEdge| {
        e.family = true;
        e
    };
    let mut fam_vertex = cyclic("w", int(1));
    fam_vertex.family = true;
    vec![
        ("free-product", Graph::new(vec![cyclic("a", int(1)), cyclic("c", int(1))], vec![trivial(0, 1)], vec![], 0).unwrap()),
        (
            "free-product-dense",
            Graph::new(vec![cyclic("a", int(1)), dense("d", int(1), &[2])], vec![trivial(0, 1)], vec![], 0).unwrap(),
        ),
        (
            "free-product-family",
            Graph::new(vec![cyclic("a", int(1)), fam_vertex], vec![trivial(0, 1)], vec![], 0).unwrap(),
        ),
        ("dense-loop", Graph::new(vec![dense("v", int(1), &[2])], vec![], vec![aedge("e", 0, 0, int(1), int(3))], 0).unwrap()),
        ("amalgam-2-3", two(2, 3, vec![])),
        ("amalgam-2-2", two(2, 2, vec![])),
        ("amalgam-2-3-loop", two(2, 3, vec![aedge("e", 0, 0, int(1), int(2))])),
        ("BS(1,2)", bs(1, 2)),
        ("BS(2,3)", bs(2, 3)),
        ("BS(2,4)", bs(2, 4)),
        ("negative-2-3", gbs(&[("f", 2, -3)])),
        ("mixed-signs", gbs(&[("e", 2, 3), ("f", 1, -1)])),
        (
            "negative-family",
            Graph::new(vec![cyclic("v", int(1))], vec![], vec![fam(aedge("f", 0, 0, int(2), int(-3)))], 0).unwrap(),
        ),
        (
            "mixed-negative-family",
            Graph::new(
                vec![cyclic("v", int(1))],
                vec![],
                vec![aedge("e", 0, 0, int(1), int(2)), fam(aedge("f", 0, 0, int(2), int(-3)))],
                0,
            )
            .unwrap(),
        ),
        (
            "positive-family",
            Graph::new(vec![cyclic("v", int(1))], vec![], vec![fam(aedge("e", 0, 0, int(2), int(3)))], 0).unwrap(),
        ),
    ]
}

/// Graph by catalog name.
pub fn catalog_graph(name: &str) -> Option<Graph> {
    catalog().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}
