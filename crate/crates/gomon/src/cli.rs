//! Spec-file parsing and the `gomon` command line.
//!
//! Spec files have four sections; `#` starts a comment.
//!
//! ```text
//! [vertices]
//! v 1                 # id, generator of G_v (a cyclic group)
//! d 1 [2,3]           # id, base, inverted primes: 1 * Z[1/2, 1/3]
//! w 1 family = infinite
//! [tree]
//! v w 2 3             # x_ē in G_v, x_e in G_w
//! v d trivial
//! [aedges]
//! e v v 1 2           # name o t x_ē x_e; negative x_e puts the edge in A₋
//! f v v 2 -3 family = infinite
//! [base]
//! v
//! ```
//!
//! Tokens: identifiers `[A-Za-z_][A-Za-z0-9_']*`, rationals `-?N(/N)?`, prime lists
//! `[p,q,...]`, the keyword `trivial` and the suffix `family = infinite`.

use std::collections::BTreeSet;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{fmt_rational, parse_rational, RationalSubgroup};
use crate::classify::{self, boundary_report, classify, k_theory, subspace_lattice, Label};
use crate::graph::{AEdge, Card, Graph, GraphError, TreeEdge, Vertex};
use crate::lcm::{divides, join, Ideal};
use crate::omega::{act, chi_eval, parse_character};
use crate::oracle::{self, enumerate_ball, BallSpec, BruteJoin, BALL_CAP};
use crate::words::{self, canonical, in_p, inv, mul, parse_word, show, show_elem, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] GraphError),
}

fn syntax(line: usize, msg: impl Into<String>) -> SpecError {
    SpecError::Syntax { line, msg: msg.into() }
}

fn rat(line: usize, s: &str) -> Result<num::BigRational, SpecError> {
    parse_rational(s).ok_or_else(|| syntax(line, format!("bad rational {s:?}")))
}

pub fn parse_spec(text: &str) -> Result<Graph, SpecError> {
    let mut section = String::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut tree_raw: Vec<(usize, String, String, Option<(String, String)>)> = Vec::new();
    let mut a_raw: Vec<(usize, String, String, String, String, String, bool)> = Vec::new();
    let mut base: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') && !line.contains(' ') && section_name(line) {
            section = line[1..line.len() - 1].to_string();
            continue;
        }
        let joined = line.split_whitespace().collect::<Vec<_>>().join(" ");
        let (body, family) = match joined.strip_suffix("family = infinite") {
            Some(b) => (b.trim().to_string(), true),
            None => (joined.clone(), false),
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        match section.as_str() {
            "vertices" => {
                let (id, gen, primes) = match toks.as_slice() {
                    [id, gen] => (*id, *gen, BTreeSet::new()),
                    [id, gen, ps] => (*id, *gen, parse_primes(ln, ps)?),
                    _ => return Err(syntax(ln, "expected: id generator [primes]")),
                };
                let group = RationalSubgroup::new(rat(ln, gen)?, primes);
                vertices.push(Vertex { id: id.to_string(), group, family });
            }
            "tree" => {
                if family {
                    return Err(syntax(ln, "families belong on vertices"));
                }
                match toks.as_slice() {
                    [v, w, "trivial"] => tree_raw.push((ln, v.to_string(), w.to_string(), None)),
                    [v, w, a, b] => tree_raw.push((ln, v.to_string(), w.to_string(), Some((a.to_string(), b.to_string())))),
                    _ => return Err(syntax(ln, "expected: v w x_obar x_o | v w trivial")),
                }
            }
            "aedges" => match toks.as_slice() {
                [n, o, t, a, b] => {
                    a_raw.push((ln, n.to_string(), o.to_string(), t.to_string(), a.to_string(), b.to_string(), family))
                }
                _ => return Err(syntax(ln, "expected: name o t x_obar x_o")),
            },
            "base" => match toks.as_slice() {
                [v] if base.is_none() => base = Some((ln, v.to_string())),
                _ => return Err(syntax(ln, "expected a single base vertex")),
            },
            "" => return Err(syntax(ln, "content before the first section")),
            s => return Err(syntax(ln, format!("unknown section [{s}]"))),
        }
    }
    let idx = |ln: usize, id: &str| -> Result<usize, SpecError> {
        vertices.iter().position(|v| v.id == id).ok_or_else(|| syntax(ln, format!("unknown vertex {id}")))
    };
    let mut tree = Vec::new();
    for (ln, v, w, im) in &tree_raw {
        let images = match im {
            None => None,
            Some((a, b)) => Some((rat(*ln, a)?, rat(*ln, b)?)),
        };
        tree.push(TreeEdge { v: idx(*ln, v)?, w: idx(*ln, w)?, images });
    }
    let mut aedges = Vec::new();
    for (ln, n, o, t, a, b, family) in &a_raw {
        aedges.push(AEdge {
            name: n.clone(),
            o: idx(*ln, o)?,
            t: idx(*ln, t)?,
            x_obar: rat(*ln, a)?,
            x_o: rat(*ln, b)?,
            family: *family,
        });
    }
    let base = match &base {
        Some((ln, v)) => idx(*ln, v)?,
        None => 0,
    };
    Ok(Graph::new(vertices, tree, aedges, base)?)
}

fn section_name(line: &str) -> bool {
    matches!(&line[1..line.len() - 1], "vertices" | "tree" | "aedges" | "base")
        || line[1..line.len() - 1].chars().all(|c| c.is_ascii_alphabetic())
}

fn parse_primes(ln: usize, s: &str) -> Result<BTreeSet<u64>, SpecError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| syntax(ln, format!("bad prime list {s:?}")))?;
    inner
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let n: u64 = p.trim().parse().map_err(|_| syntax(ln, format!("bad prime {p:?}")))?;
            let is_prime = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            if is_prime { Ok(n) } else { Err(syntax(ln, format!("{n} is not prime"))) }
        })
        .collect()
}

/// Spec-file text for a graph; `parse_spec` reads it back to the same graph.
pub fn render_spec(g: &Graph) -> String {
    let fam = |f: bool| if f { " family = infinite" } else { "" };
    let mut out = String::from("[vertices]\n");
    for v in &g.vertices {
        let (base, primes) = match &v.group {
            RationalSubgroup::Sub { base, primes } => (fmt_rational(base), primes.clone()),
            RationalSubgroup::Trivial => ("0".into(), BTreeSet::new()),
        };
        let ps = if primes.is_empty() {
            String::new()
        } else {
            format!(" [{}]", primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
        };
        out += &format!("{} {}{}{}\n", v.id, base, ps, fam(v.family));
    }
    out += "[tree]\n";
    for d in &g.tree {
        let (v, w) = (&g.vertices[d.v].id, &g.vertices[d.w].id);
        match &d.images {
            None => out += &format!("{v} {w} trivial\n"),
            Some((a, b)) => out += &format!("{v} {w} {} {}\n", fmt_rational(a), fmt_rational(b)),
        }
    }
    out += "[aedges]\n";
    for e in &g.aedges {
        out += &format!(
            "{} {} {} {} {}{}\n",
            e.name,
            g.vertices[e.o].id,
            g.vertices[e.t].id,
            fmt_rational(&e.x_obar),
            fmt_rational(&e.x_o),
            fam(e.family)
        );
    }
    out += &format!("[base]\n{}\n", g.vertices[g.base].id);
    out
}

#[derive(Parser, Debug)]
#[command(name = "gomon", about = "Graphs of monoids over subgroups of Q")]
struct Cli {
    /// Spec file describing the graph.
    #[arg(short, long, global = true)]
    graph: Option<String>,
    /// Built-in example graph instead of a spec file.
    #[arg(long, global = true)]
    catalog: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the graph and print its counts.
    Validate,
    /// Canonical and reduced positive form of a word.
    Normalize { word: String },
    Equal { w1: String, w2: String },
    /// Whether `x ∈ pP`.
    Divides { p: String, x: String },
    /// Least common right multiple.
    Join { p: String, q: String },
    ChiEval { character: String, p: String },
    /// Acts by `p q^-1` on a character.
    Act { p: String, q: String, character: String },
    Classify,
    /// K-theory of the lattice node carrying the given label.
    Ktheory { node: String },
    Boundary,
    /// List catalog graph names.
    Catalog,
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    Ball {
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 2)]
        exp: i64,
    },
    BruteJoin {
        p: String,
        q: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = 2)]
        exp: i64,
    },
    Presentation {
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 2)]
        exp: i64,
    },
    Gc {
        element: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 2)]
        exp: i64,
    },
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
    message: String,
}

struct Failure {
    code: i32,
    out: ErrorOut,
}

fn variant<E: std::fmt::Debug>(e: &E) -> String {
    let s = format!("{e:?}");
    s.split(|c| c == '(' || c == ' ' || c == '{').next().unwrap_or("").to_string()
}

fn fail<E: std::fmt::Debug + std::fmt::Display>(module: &str, code: i32, e: E) -> Failure {
    Failure { code, out: ErrorOut { error: format!("{module}::{}", variant(&e)), message: e.to_string() } }
}

fn word_fail(e: WordError) -> Failure {
    let code = match e {
        WordError::UnknownToken(_) | WordError::BadValue(_) => 2,
        _ => 1,
    };
    fail("WordError", code, e)
}

fn json<T: Serialize>(t: &T) -> String {
    serde_json::to_string(t).expect("serializable")
}

fn load(cli: &Cli) -> Result<Graph, Failure> {
    match (&cli.graph, &cli.catalog) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| fail("Io", 2, e))?;
            parse_spec(&text).map_err(|e| match e {
                SpecError::Syntax { .. } => fail("SpecError", 2, e),
                SpecError::Invalid(g) => fail("GraphError", 1, g),
            })
        }
        (None, Some(name)) => classify::catalog_graph(name)
            .ok_or_else(|| fail("Catalog", 2, format!("no catalog graph {name:?}")).with_variant("UnknownGraph")),
        _ => Err(fail("Cli", 2, "give exactly one of --graph FILE or --catalog NAME").with_variant("MissingGraph")),
    }
}

impl Failure {
    fn with_variant(mut self, v: &str) -> Self {
        let module = self.out.error.split("::").next().unwrap_or("").to_string();
        self.out.error = format!("{module}::{v}");
        self
    }
}

fn elem(g: &Graph, s: &str) -> Result<words::Element, Failure> {
    Ok(canonical(g, &parse_word(g, s).map_err(word_fail)?))
}

fn pos_elem(g: &Graph, s: &str) -> Result<words::Element, Failure> {
    let x = elem(g, s)?;
    if !in_p(g, &x) {
        return Err(word_fail(WordError::NotInP));
    }
    Ok(x)
}

fn no_families(g: &Graph) -> Result<(), Failure> {
    if g.has_families() {
        return Err(word_fail(WordError::Families));
    }
    Ok(())
}

fn card(c: Card) -> String {
    match c {
        Card::Finite(n) => n.to_string(),
        Card::Infinite => "infinite".into(),
    }
}

fn label(s: &str) -> Option<Label> {
    use Label::*;
    Some(match s {
        "Omega" => Omega,
        "ClosureOmegaInfty" => ClosureOmegaInfty,
        "OmegaInfty" => OmegaInfty,
        "OmegaBInfty" => OmegaBInfty,
        "OmegaAInfty" => OmegaAInfty,
        "BoundaryOmega" => BoundaryOmega,
        "PointInfty" => PointInfty,
        _ => return None,
    })
}

fn dispatch(cli: &Cli) -> Result<String, Failure> {
    if let Cmd::Catalog = cli.cmd {
        let names: Vec<&str> = classify::catalog().iter().map(|(n, _)| *n).collect();
        return Ok(json(&names));
    }
    let g = load(cli)?;
    let word_cmd = !matches!(cli.cmd, Cmd::Validate | Cmd::Classify | Cmd::Ktheory { .. } | Cmd::Boundary);
    if word_cmd {
        no_families(&g)?;
    }
    Ok(match &cli.cmd {
        Cmd::Catalog => unreachable!(),
        Cmd::Validate => {
            #[derive(Serialize)]
            struct Out {
                valid: bool,
                vertices: String,
                tree_edges: usize,
                a_plus: String,
                a_minus: String,
                spec: String,
            }
            json(&Out {
                valid: true,
                vertices: card(g.num_vertices()),
                tree_edges: g.tree.len(),
                a_plus: card(g.num_a_plus()),
                a_minus: card(g.num_a_minus()),
                spec: render_spec(&g),
            })
        }
        Cmd::Normalize { word } => {
            #[derive(Serialize)]
            struct Out {
                canonical: String,
                in_p: bool,
                reduced: Option<String>,
                ell: Option<usize>,
            }
            let w = parse_word(&g, word).map_err(word_fail)?;
            let x = canonical(&g, &w);
            let reduced = words::reduce(&g, &w).ok();
            json(&Out {
                canonical: show_elem(&g, &x),
                in_p: in_p(&g, &x),
                ell: reduced.as_ref().map(|r| words::metrics(&g, r).ell),
                reduced: reduced.map(|r| show(&g, &r)),
            })
        }
        Cmd::Equal { w1, w2 } => {
            #[derive(Serialize)]
            struct Out {
                equal: bool,
            }
            let a = parse_word(&g, w1).map_err(word_fail)?;
            let b = parse_word(&g, w2).map_err(word_fail)?;
            json(&Out { equal: words::equal(&g, &a, &b) })
        }
        Cmd::Divides { p, x } => {
            #[derive(Serialize)]
            struct Out {
                divides: bool,
                quotient: Option<String>,
            }
            let (p, x) = (pos_elem(&g, p)?, pos_elem(&g, x)?);
            let q = divides(&g, &p, &x);
            json(&Out { divides: q.is_some(), quotient: q.map(|q| show_elem(&g, &q)) })
        }
        Cmd::Join { p, q } => {
            #[derive(Serialize)]
            struct Out {
                result: &'static str,
                #[serde(skip_serializing_if = "Option::is_none")]
                generator: Option<String>,
            }
            let (p, q) = (pos_elem(&g, p)?, pos_elem(&g, q)?);
            match join(&g, &p, &q).map_err(|e| fail("LcmError", 1, e))? {
                Ideal::Principal(r) => json(&Out { result: "principal", generator: Some(show_elem(&g, &r)) }),
                Ideal::Empty => json(&Out { result: "empty", generator: None }),
            }
        }
        Cmd::ChiEval { character, p } => {
            #[derive(Serialize)]
            struct Out {
                value: u8,
            }
            let chi = parse_character(&g, character).map_err(|e| fail("OmegaError", 2, e))?;
            let p = pos_elem(&g, p)?;
            json(&Out { value: chi_eval(&g, &chi, &p) as u8 })
        }
        Cmd::Act { p, q, character } => {
            #[derive(Serialize)]
            struct Out {
                result: &'static str,
                #[serde(skip_serializing_if = "Option::is_none")]
                character: Option<String>,
            }
            let chi = parse_character(&g, character).map_err(|e| fail("OmegaError", 2, e))?;
            let x = mul(&g, &pos_elem(&g, p)?, &inv(&g, &pos_elem(&g, q)?));
            match act(&g, &x, &chi) {
                Some(c) => json(&Out { result: "defined", character: Some(c.render(&g)) }),
                None => json(&Out { result: "undefined", character: None }),
            }
        }
        Cmd::Classify => json(&classify(&g).map_err(|e| fail("ClassifyError", 1, e))?),
        Cmd::Ktheory { node } => {
            #[derive(Serialize)]
            struct Out {
                node: String,
                #[serde(rename = "K")]
                k: classify::KTriple,
            }
            let l = label(node).ok_or_else(|| fail("Cli", 2, format!("unknown node {node:?}")).with_variant("UnknownNode"))?;
            let lat = subspace_lattice(&g).map_err(|e| fail("ClassifyError", 1, e))?;
            let n = lat.nodes.iter().find(|n| n.has(l)).ok_or_else(|| {
                fail("ClassifyError", 1, classify::ClassifyError::CaseNotCovered(format!("{node} is not a node here")))
            })?;
            let k = k_theory(&g, n).map_err(|e| fail("ClassifyError", 1, e))?;
            json(&Out { node: n.name(), k })
        }
        Cmd::Boundary => json(&boundary_report(&g).map_err(|e| fail("ClassifyError", 1, e))?),
        Cmd::Oracle(o) => oracle_cmd(&g, o)?,
    })
}

fn oracle_cmd(g: &Graph, o: &OracleCmd) -> Result<String, Failure> {
    let ball = |bound: usize, exp: i64| {
        enumerate_ball(g, &BallSpec::new(bound, exp), BALL_CAP).map_err(|e| fail("OracleError", 1, e))
    };
    Ok(match o {
        OracleCmd::Ball { bound, exp } => {
            #[derive(Serialize)]
            struct Out {
                elements: usize,
                layers: Vec<usize>,
                exhaustive: bool,
            }
            let b = ball(*bound, *exp)?;
            json(&Out { elements: b.elements.len(), layers: b.layers, exhaustive: b.exhaustive })
        }
        OracleCmd::BruteJoin { p, q, bound, exp } => {
            #[derive(Serialize)]
            struct Out {
                result: String,
                #[serde(skip_serializing_if = "Option::is_none")]
                generator: Option<String>,
                agrees_with_join: oracle::Verdict,
            }
            let (p, q) = (pos_elem(g, p)?, pos_elem(g, q)?);
            let b = ball(*bound, *exp)?;
            let verdict = oracle::check_join(g, &p, &q, &b).map_err(|e| fail("LcmError", 1, e))?;
            let (result, generator) = match oracle::brute_join(g, &p, &q, &b) {
                BruteJoin::Minimum(m) => ("principal".to_string(), Some(show_elem(g, &m))),
                BruteJoin::NoCommonMultiple => ("empty".to_string(), None),
                BruteJoin::Inconclusive(n) => (format!("inconclusive ({n} common multiples)"), None),
            };
            json(&Out { result, generator, agrees_with_join: verdict })
        }
        OracleCmd::Presentation { bound, exp } => {
            json(&oracle::presentation_check(g, g, &BallSpec::new(*bound, *exp)).map_err(|e| fail("OracleError", 1, e))?)
        }
        OracleCmd::Gc { element, bound, exp } => {
            #[derive(Serialize)]
            struct Out {
                result: &'static str,
                #[serde(skip_serializing_if = "Option::is_none")]
                witness: Option<String>,
            }
            let x = elem(g, element)?;
            let b = ball(*bound, *exp)?;
            match oracle::gc_witness_search(g, &x, &b) {
                None => json(&Out { result: "all-pass", witness: None }),
                Some(p) => json(&Out { result: "witness", witness: Some(show_elem(g, &p)) }),
            }
        }
    })
}

/// Runs one command; returns the exit status and the output document.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    match dispatch(&cli) {
        Ok(s) => (0, s),
        Err(f) => (f.code, json(&f.out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_c(args: &[&str]) -> (i32, String) {
        let mut v = vec!["gomon"];
        v.extend_from_slice(args);
        run(v)
    }

    #[test]
    fn join_bs12() {
        let (c, out) = run_c(&["--catalog", "BS(1,2)", "join", "b", "e"]);
        assert_eq!((c, out.as_str()), (0, r#"{"result":"principal","generator":"e:e v:2"}"#));
    }

    #[test]
    fn malformed_token() {
        assert_eq!(run_c(&["--catalog", "BS(1,2)", "equal", "b", "q:?"]).0, 2);
        assert_eq!(run_c(&["--catalog", "BS(1,2)", "join", "b^-1", "e"]).0, 1);
        assert_eq!(run_c(&["--catalog", "BS(1,2)", "frobnicate"]).0, 2);
    }

    #[test]
    fn classify_free_product() {
        let (c, out) = run_c(&["--catalog", "free-product", "classify"]);
        assert_eq!(c, 0);
        assert!(out.contains(r#""case":"(i2)""#));
        assert!(out.contains(r#""label":"O_2""#));
        let (_, again) = run_c(&["--catalog", "free-product", "classify"]);
        assert_eq!(out, again);
    }

    #[test]
    fn bs12_report() {
        let (_, out) = run_c(&["--catalog", "BS(1,2)", "classify"]);
        assert!(out.contains(r#""case":"GBS(i)""#));
        assert!(out.contains(r#""K_boundary":{"K0":"Z","unit":"1","K1":"Z"}"#));
    }

    #[test]
    fn spec_round_trip() {
        for (name, g) in classify::catalog() {
            let text = render_spec(&g);
            let h = parse_spec(&text).unwrap();
            assert_eq!(render_spec(&h), text, "{name}");
            assert_eq!(h.vertices, g.vertices);
            assert_eq!(h.tree, g.tree);
            assert_eq!(h.aedges, g.aedges);
            assert_eq!(h.base, g.base);
        }
    }

    #[test]
    fn spec_errors() {
        assert!(matches!(parse_spec("[vertices]\nv x\n"), Err(SpecError::Syntax { line: 2, .. })));
        assert!(matches!(parse_spec("[vertices]\nv 1\n[tree]\nv w 1 1\n"), Err(SpecError::Syntax { line: 4, .. })));
        assert!(matches!(parse_spec("[vertices]\nv 1\nw 1\n"), Err(SpecError::Invalid(GraphError::NotATree))));
        let g = parse_spec("# BS(1,2)\n[vertices]\nv 1\n[aedges]\ne v v 1 2\n").unwrap();
        assert_eq!(g.aedges.len(), 1);
    }
}
