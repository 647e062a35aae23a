//! Characters of the ideal semilattice, the partial action of G, and subspace flags.

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{floor_div, int, Rational, RationalSubgroup};
use crate::graph::Graph;
use crate::lcm::{divides, join, Ideal};
use crate::oracle::Ball;
use crate::words::{self, canonical, in_p, inv, mul, parse_word, show, show_elem, Element, Letter, Word, WordError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Character {
    /// `χ_w` for a finite positive word.
    Finite(Element),
    /// `χ_{u v^∞}`; the period is positive, nonempty and primitive.
    Periodic { prefix: Element, period: Word },
    /// `χ_{b_v^∞}`.
    BInfinity(usize),
    /// The point `∞` of `P_T`, moved by a positive prefix.
    OreInfinity { prefix: Element },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmegaError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("period must be a nonempty positive word")]
    BadPeriod,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("P_T is not Ore here: some tree edge is trivial")]
    NotOre,
    #[error("expected finite:, periodic:, binf: or oreinf")]
    BadSyntax,
    #[error("maximality criterion only available for one-vertex GBS graphs")]
    UnsupportedGraphShape,
}

/// Positive generator of `∩_v G_v`, seen at the base vertex.
pub fn ore_unit(g: &Graph) -> Result<Rational, OmegaError> {
    if g.has_trivial_tree_edge() || g.has_families() {
        return Err(OmegaError::NotOre);
    }
    let mut h = g.vertices[g.base].group.clone();
    for v in 0..g.vertices.len() {
        h = h.intersect(&g.transport_subgroup(&g.vertices[v].group, v, g.base));
    }
    match h {
        RationalSubgroup::Sub { base, .. } => Ok(base),
        RationalSubgroup::Trivial => Err(OmegaError::NotOre),
    }
}

fn unit(g: &Graph, v: usize) -> Rational {
    g.vertices[v].group.base().cloned().unwrap_or_else(|| int(1))
}

/// Merges adjacent vertex letters, replaces a single vertex letter by the vertex unit
/// (both give the same character) and takes the primitive root.
pub fn normalize_period(g: &Graph, w: &Word) -> Result<Word, OmegaError> {
    if !w.is_positive() {
        return Err(OmegaError::BadPeriod);
    }
    let mut ls: Vec<Letter> = Vec::new();
    for l in &w.0 {
        match (ls.last_mut(), l) {
            (_, Letter::Vertex { value, .. }) if value.is_zero() => {}
            (Some(Letter::Vertex { v: a, value: x }), Letter::Vertex { v: b, value: y }) if a == b => *x += y,
            _ => ls.push(l.clone()),
        }
    }
    if ls.is_empty() {
        return Err(OmegaError::BadPeriod);
    }
    if let [Letter::Vertex { v, .. }] = ls.as_slice() {
        return Ok(Word(vec![Letter::Vertex { v: *v, value: unit(g, *v) }]));
    }
    let n = ls.len();
    let d = (1..=n).find(|d| n % d == 0 && (0..n).all(|i| ls[i] == ls[i % d])).unwrap();
    ls.truncate(d);
    Ok(Word(ls))
}

impl Character {
    pub fn periodic(g: &Graph, prefix: Element, period: &Word) -> Result<Self, OmegaError> {
        if !in_p(g, &prefix) {
            return Err(WordError::NotInP.into());
        }
        Ok(Character::Periodic { prefix, period: normalize_period(g, period)? })
    }

    pub fn ore(g: &Graph, prefix: Element) -> Result<Self, OmegaError> {
        ore_unit(g)?;
        if !in_p(g, &prefix) {
            return Err(WordError::NotInP.into());
        }
        Ok(Character::OreInfinity { prefix })
    }

    /// `(u, v)` with the character equal to `χ_{u v^∞}`; `None` for finite characters.
    pub fn parts(&self, g: &Graph) -> Option<(Element, Word)> {
        match self {
            Character::Finite(_) => None,
            Character::Periodic { prefix, period } => Some((prefix.clone(), period.clone())),
            Character::BInfinity(v) => {
                Some((Element::identity(), Word(vec![Letter::Vertex { v: *v, value: unit(g, *v) }])))
            }
            Character::OreInfinity { prefix } => {
                let c = ore_unit(g).ok()?;
                Some((prefix.clone(), Word(vec![Letter::Vertex { v: g.base, value: c }])))
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Character::Finite(_))
    }

    pub fn render(&self, g: &Graph) -> String {
        match self {
            Character::Finite(w) => format!("finite: {}", show_elem(g, w)),
            Character::Periodic { prefix, period } => {
                format!("periodic: {} | {}", show_elem(g, prefix), show(g, period))
            }
            Character::BInfinity(v) => format!("binf: {}", g.vertices[*v].id),
            Character::OreInfinity { prefix } if prefix.is_identity() => "oreinf".into(),
            Character::OreInfinity { prefix } => format!("oreinf: {}", show_elem(g, prefix)),
        }
    }
}

pub fn parse_character(g: &Graph, s: &str) -> Result<Character, OmegaError> {
    let s = s.trim();
    let (kind, rest) = s.split_once(':').map_or((s, ""), |(a, b)| (a.trim(), b.trim()));
    let elem = |t: &str| -> Result<Element, OmegaError> {
        let x = canonical(g, &parse_word(g, t)?);
        if !in_p(g, &x) {
            return Err(WordError::NotInP.into());
        }
        Ok(x)
    };
    match kind {
        "finite" => Ok(Character::Finite(elem(rest)?)),
        "periodic" => {
            let (u, v) = rest.split_once('|').ok_or(OmegaError::BadSyntax)?;
            Character::periodic(g, elem(u)?, &parse_word(g, v)?)
        }
        "binf" => {
            let v = g.vertex_index(rest).ok_or_else(|| OmegaError::UnknownVertex(rest.into()))?;
            Ok(Character::BInfinity(v))
        }
        "oreinf" => Character::ore(g, if rest.is_empty() { Element::identity() } else { elem(rest)? }),
        _ => Err(OmegaError::BadSyntax),
    }
}

pub const SCAN_CAP: usize = 4096;

/// Number of periods scanned when absorbing `h` into `P` by appending periods:
/// edge count of `h` plus two, plus its letter magnitude scaled by the tree ratio.
pub fn scan_bound(g: &Graph, h: &Element) -> usize {
    let mut mag = BigInt::zero();
    let mut ell = 0usize;
    for (r, y) in &h.steps {
        mag += (r.abs() / unit(g, g.origin(*y))).ceil().to_integer();
        if !y.is_tree() {
            ell += 1;
        }
    }
    mag += (h.tail.abs() / unit(g, g.base)).ceil().to_integer();
    let rho = g.transport_ratio().ceil().to_integer();
    let r = BigInt::from(ell + 2) + mag * rho;
    r.to_usize().unwrap_or(SCAN_CAP).min(SCAN_CAP)
}

/// Least `k <= bound` with `h v^k ∈ P`. A single vertex letter as period is searched
/// exactly, since then `h v^k` is monotone in `k` without growing in length.
pub fn absorb(g: &Graph, h: &Element, period: &Word, bound: usize) -> Option<usize> {
    if let [Letter::Vertex { v, value }] = period.0.as_slice() {
        let at = |k: &BigInt| {
            let x = words::vertex_elem(g, *v, value * Rational::from_integer(k.clone()));
            in_p(g, &mul(g, h, &x))
        };
        if at(&BigInt::zero()) {
            return Some(0);
        }
        let mut hi = BigInt::one();
        let mut rounds = 0;
        while !at(&hi) {
            hi *= 2;
            rounds += 1;
            if rounds > 200 {
                return None;
            }
        }
        let mut lo = &hi / 2;
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&hi + &lo) / 2;
            if at(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi.to_usize();
    }
    let v = canonical(g, period);
    let mut x = h.clone();
    for k in 0..=bound {
        if in_p(g, &x) {
            return Some(k);
        }
        x = mul(g, &x, &v);
    }
    None
}

fn times(g: &Graph, x: &Element, period: &Word, k: usize) -> Element {
    let v = canonical(g, period);
    (0..k).fold(x.clone(), |acc, _| mul(g, &acc, &v))
}

/// `χ(p)` with the scan bound multiplied by `scale`.
pub fn chi_eval_scaled(g: &Graph, chi: &Character, p: &Element, scale: usize) -> bool {
    match chi {
        Character::Finite(w) => divides(g, p, w).is_some(),
        _ => {
            let (u, v) = chi.parts(g).expect("infinite character");
            let h = mul(g, &inv(g, p), &u);
            let bound = (scan_bound(g, &h) * scale).min(SCAN_CAP * scale);
            absorb(g, &h, &v, bound).is_some()
        }
    }
}

pub fn chi_eval(g: &Graph, chi: &Character, p: &Element) -> bool {
    chi_eval_scaled(g, chi, p, 1)
}

/// `g.χ`, defined when some prefix of the character word is moved into `P`.
pub fn act(g: &Graph, x: &Element, chi: &Character) -> Option<Character> {
    if let Character::Finite(w) = chi {
        let y = mul(g, x, w);
        return in_p(g, &y).then_some(Character::Finite(y));
    }
    let (u, v) = chi.parts(g)?;
    let h = mul(g, x, &u);
    let k = absorb(g, &h, &v, scan_bound(g, &h))?;
    let prefix = times(g, &h, &v, k);
    Some(match chi {
        Character::OreInfinity { .. } => Character::OreInfinity { prefix },
        Character::BInfinity(w) if prefix.is_identity() => Character::BInfinity(*w),
        _ => Character::Periodic { prefix, period: v },
    })
}

/// The prefix of length `j` periods (the word itself for finite characters).
pub fn prefix_at(g: &Graph, chi: &Character, j: usize) -> Element {
    match chi {
        Character::Finite(w) => w.clone(),
        _ => {
            let (u, v) = chi.parts(g).expect("infinite character");
            times(g, &u, &v, j)
        }
    }
}

/// Equality of characters, checked on the first `depth` period prefixes of each side.
pub fn same_character(g: &Graph, a: &Character, b: &Character, depth: usize) -> bool {
    match (a, b) {
        (Character::Finite(x), Character::Finite(y)) => x == y,
        (Character::Finite(_), _) | (_, Character::Finite(_)) => false,
        _ => (0..depth).all(|j| chi_eval(g, b, &prefix_at(g, a, j)) && chi_eval(g, a, &prefix_at(g, b, j))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharFlags {
    pub in_omega_infty: bool,
    /// `None` outside one-vertex GBS graphs.
    pub in_omega_max: Option<bool>,
    pub in_omega_b_inf: Option<bool>,
    pub in_omega_a_inf: bool,
}

pub fn is_one_vertex_gbs(g: &Graph) -> bool {
    g.vertices.len() == 1 && g.vertices[0].is_cyclic() && !g.has_families()
}

fn theta(g: &Graph, w: &Word) -> (usize, usize) {
    let mut plus = 0;
    let mut minus = 0;
    for l in &w.0 {
        if let Letter::Edge(i) = l {
            if g.aedges[*i].is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
        }
    }
    (plus, minus)
}

pub const CARRY_CAP: i64 = 1_000_000;

/// For a period without `A₋` letters: every `b^i` divides some prefix of `v^∞`.
/// The carry `F(x)` through one period satisfies `F(x + N) = F(x) + M`, so this holds
/// iff `M <= N` and `F(x) > x` on `[-N, -1]`.
fn b_divisible_tail(g: &Graph, period: &Word) -> Result<bool, OmegaError> {
    let b = g.vertices[0].generator().ok_or(OmegaError::UnsupportedGraphShape)?.clone();
    let mut big_n = BigInt::one();
    let mut big_m = BigInt::one();
    let mut steps: Vec<(Option<(BigInt, BigInt)>, BigInt)> = Vec::new();
    for l in &period.0 {
        match l {
            Letter::Vertex { value, .. } => steps.push((None, (value / &b).to_integer())),
            Letter::Edge(i) => {
                let (n, m) = g.edge_multipliers(*i).ok_or(OmegaError::UnsupportedGraphShape)?;
                let (n, m) = (n.to_integer(), m.to_integer());
                big_n *= &n;
                big_m *= &m;
                steps.push((Some((n, m)), BigInt::zero()));
            }
            Letter::EdgeInv(_) => return Err(OmegaError::BadPeriod),
        }
    }
    if big_m > big_n {
        return Ok(false);
    }
    let n = big_n.to_i64().filter(|n| *n <= CARRY_CAP).ok_or(OmegaError::UnsupportedGraphShape)?;
    let carry = |x: i64| -> BigInt {
        let mut c = BigInt::from(x);
        for (edge, add) in &steps {
            match edge {
                None => c += add,
                Some((n, m)) => c = m * floor_div(&Rational::from_integer(c), &Rational::from_integer(n.clone())),
            }
        }
        c
    };
    Ok((-n..0).all(|x| carry(x) > BigInt::from(x)))
}

pub fn classify_character(g: &Graph, chi: &Character) -> CharFlags {
    let Some((_, period)) = chi.parts(g) else {
        return CharFlags {
            in_omega_infty: false,
            in_omega_max: Some(false).filter(|_| is_one_vertex_gbs(g)),
            in_omega_b_inf: Some(false).filter(|_| is_one_vertex_gbs(g)),
            in_omega_a_inf: false,
        };
    };
    let (plus, minus) = theta(g, &period);
    let (max, b_inf) = if is_one_vertex_gbs(g) {
        let max = if minus > 0 {
            Some(true)
        } else if plus == 0 {
            Some(false)
        } else {
            b_divisible_tail(g, &period).ok()
        };
        let b_inf = max.map(|m| m || plus + minus == 0);
        (max, b_inf)
    } else {
        (None, None)
    };
    CharFlags { in_omega_infty: true, in_omega_max: max, in_omega_b_inf: b_inf, in_omega_a_inf: plus + minus > 0 }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxCheck {
    Consistent,
    CounterexampleFound(Element),
}

/// Bounded check of maximality: every `p` in the ball with `χ(p) = 0` must be
/// separated from some prefix of the character word (`pP ∩ qP = ∅`).
pub fn is_maximal_by_definition(g: &Graph, chi: &Character, ball: &Ball) -> MaxCheck {
    for p in &ball.elements {
        if chi_eval(g, chi, p) {
            continue;
        }
        let depth = match chi {
            Character::Finite(_) => 1,
            _ => {
                let (u, _) = chi.parts(g).expect("infinite character");
                scan_bound(g, &mul(g, &inv(g, p), &u)) + 2
            }
        };
        let separated = (0..depth).any(|j| matches!(join(g, p, &prefix_at(g, chi, j)), Ok(Ideal::Empty)));
        if !separated {
            return MaxCheck::CounterexampleFound(p.clone());
        }
    }
    MaxCheck::Consistent
}
