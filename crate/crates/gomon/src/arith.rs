//! Exact rational arithmetic and subgroups of (Q, +).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn floor_div(a: &Rational, b: &Rational) -> BigInt {
    (a / b).floor().to_integer()
}

pub fn ceil_div(a: &Rational, b: &Rational) -> BigInt {
    (a / b).ceil().to_integer()
}

/// `a mod |b|` in `[0, |b|)`. `b` must be nonzero.
pub fn rem_euclid(a: &Rational, b: &Rational) -> Rational {
    let b = b.abs();
    let q = floor_div(a, &b);
    a - &b * Rational::from_integer(q)
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Trial-division factorisation of `|n|`. Zero and units give an empty map.
pub fn factor(n: &BigInt) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut n = n.abs();
    if n.is_zero() {
        return out;
    }
    let mut p = 2u64;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            break;
        }
        while (&n % &pb).is_zero() {
            n /= &pb;
            *out.entry(p).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let last = n.to_u64().expect("prime factor beyond u64");
        *out.entry(last).or_insert(0) += 1;
    }
    out
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(q: &Rational, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut v = 0i64;
    let mut n = q.numer().abs();
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    let mut d = q.denom().abs();
    while (&d % &pb).is_zero() {
        d /= &pb;
        v -= 1;
    }
    v
}

fn prime_support(q: &Rational) -> BTreeSet<u64> {
    let mut s: BTreeSet<u64> = factor(q.numer()).into_keys().collect();
    s.extend(factor(q.denom()).into_keys());
    s
}

fn pow(p: u64, e: i64) -> Rational {
    let b = Rational::from_integer(BigInt::from(p));
    if e >= 0 {
        num::pow(b, e as usize)
    } else {
        num::pow(b, (-e) as usize).recip()
    }
}

/// A subgroup of (Q, +): either `{0}` or `base * Z[1/S]` for a finite prime set `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RationalSubgroup {
    Trivial,
    Sub {
        #[serde(serialize_with = "ser_rat")]
        base: Rational,
        primes: BTreeSet<u64>,
    },
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

impl RationalSubgroup {
    pub fn cyclic(g: Rational) -> Self {
        Self::new(g, BTreeSet::new())
    }

    /// Normalises the base so equal subgroups compare equal.
    pub fn new(base: Rational, primes: BTreeSet<u64>) -> Self {
        if base.is_zero() {
            return RationalSubgroup::Trivial;
        }
        let mut b = base.abs();
        for &p in &primes {
            let v = valuation(&b, p);
            b *= pow(p, -v);
        }
        RationalSubgroup::Sub { base: b, primes }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, RationalSubgroup::Trivial)
    }

    pub fn is_cyclic(&self) -> bool {
        match self {
            RationalSubgroup::Trivial => true,
            RationalSubgroup::Sub { primes, .. } => primes.is_empty(),
        }
    }

    /// Positive generator of a nontrivial cyclic subgroup.
    pub fn generator(&self) -> Option<&Rational> {
        match self {
            RationalSubgroup::Sub { base, primes } if primes.is_empty() => Some(base),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<&Rational> {
        match self {
            RationalSubgroup::Sub { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn primes(&self) -> BTreeSet<u64> {
        match self {
            RationalSubgroup::Sub { primes, .. } => primes.clone(),
            _ => BTreeSet::new(),
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        if q.is_zero() {
            return true;
        }
        match self {
            RationalSubgroup::Trivial => false,
            RationalSubgroup::Sub { base, primes } => {
                let r = q / base;
                factor(r.denom()).keys().all(|p| primes.contains(p))
            }
        }
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        match self {
            RationalSubgroup::Trivial => true,
            RationalSubgroup::Sub { base, primes } => {
                if !other.contains(base) {
                    return false;
                }
                let op = other.primes();
                primes.iter().all(|p| op.contains(p))
            }
        }
    }

    pub fn scale(&self, f: &Rational) -> Self {
        match self {
            RationalSubgroup::Trivial => RationalSubgroup::Trivial,
            RationalSubgroup::Sub { base, primes } => Self::new(base * f, primes.clone()),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (b1, s1, b2, s2) = match (self, other) {
            (
                RationalSubgroup::Sub { base: b1, primes: s1 },
                RationalSubgroup::Sub { base: b2, primes: s2 },
            ) => (b1, s1, b2, s2),
            _ => return RationalSubgroup::Trivial,
        };
        let mut relevant = prime_support(b1);
        relevant.extend(prime_support(b2));
        relevant.extend(s1.iter().copied());
        relevant.extend(s2.iter().copied());
        let mut base = Rational::one();
        for p in relevant {
            let c1 = (!s1.contains(&p)).then(|| valuation(b1, p));
            let c2 = (!s2.contains(&p)).then(|| valuation(b2, p));
            let e = match (c1, c2) {
                (Some(a), Some(b)) => a.max(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => 0,
            };
            base *= pow(p, e);
        }
        Self::new(base, s1.intersection(s2).copied().collect())
    }
}

impl fmt::Display for RationalSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalSubgroup::Trivial => write!(f, "0"),
            RationalSubgroup::Sub { base, primes } if primes.is_empty() => {
                write!(f, "{}Z", fmt_rational(base))
            }
            RationalSubgroup::Sub { base, primes } => {
                let ps: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
                write!(f, "{}Z[1/{}]", fmt_rational(base), ps.join(","))
            }
        }
    }
}

/// For nontrivial cyclic `H1 = <a>`, `H2 = <b>` with `H1 ∩ H2 = <g>`:
/// returns `(k, l)` with `g = l*a = k*b`.
pub fn index_data(h1: &RationalSubgroup, h2: &RationalSubgroup) -> Option<(BigInt, BigInt)> {
    let a = h1.generator()?;
    let b = h2.generator()?;
    let g = h1.intersect(h2);
    let g = g.generator()?;
    let l = g / a;
    let k = g / b;
    if !is_integer(&l) || !is_integer(&k) {
        return None;
    }
    Some((k.to_integer(), l.to_integer()))
}
