//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every function takes spec-file text and returns a JSON document; failures come
//! back as `{"error": ..., "message": ...}` rather than exceptions.

use gomon::cli::parse_spec;
use gomon::graph::Graph;
use gomon::lcm::{join as join_ideal, Ideal};
use gomon::words::{canonical, in_p, parse_word, show_elem, Element};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn error(kind: &str, e: impl std::fmt::Display) -> String {
    json!({"error": kind, "message": e.to_string()}).to_string()
}

fn graph(spec: &str) -> Result<Graph, String> {
    parse_spec(spec).map_err(|e| error("SpecError", e))
}

fn element(g: &Graph, w: &str) -> Result<Element, String> {
    parse_word(g, w).map(|w| canonical(g, &w)).map_err(|e| error("WordError", e))
}

fn flatten(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| e)
}

/// Canonical form of a word and whether it lies in the positive monoid.
#[wasm_bindgen]
pub fn normalize(spec: &str, word: &str) -> String {
    flatten((|| {
        let g = graph(spec)?;
        let x = element(&g, word)?;
        Ok(json!({"canonical": show_elem(&g, &x), "in_p": in_p(&g, &x)}).to_string())
    })())
}

/// Least common right multiple of two positive words.
#[wasm_bindgen]
pub fn join(spec: &str, p: &str, q: &str) -> String {
    flatten((|| {
        let g = graph(spec)?;
        let (p, q) = (element(&g, p)?, element(&g, q)?);
        Ok(match join_ideal(&g, &p, &q).map_err(|e| error("LcmError", e))? {
            Ideal::Principal(r) => json!({"result": "principal", "generator": show_elem(&g, &r)}).to_string(),
            Ideal::Empty => json!({"result": "empty"}).to_string(),
        })
    })())
}

/// Full classification report for the graph.
#[wasm_bindgen]
pub fn classify(spec: &str) -> String {
    flatten((|| {
        let g = graph(spec)?;
        let r = gomon::classify::classify(&g).map_err(|e| error("ClassifyError", e))?;
        Ok(serde_json::to_string(&r).expect("serializable"))
    })())
}
