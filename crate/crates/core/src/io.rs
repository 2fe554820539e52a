//! File formats.
//!
//! Hypergraphs are JSON objects `{"r": 3, "n": 5, "edges": [[1,2,3], ...]}`; extra keys
//! (such as an embedded run manifest) are ignored on input. Every float written by this
//! crate uses 17 significant digits so doubles round-trip exactly.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph};

/// serde_json formatter that prints every `f64` as `d.dddddddddddddddde±x`.
#[derive(Clone, Debug, Default)]
pub struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no representation for NaN or infinities
            writer.write_all(b"null")
        }
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[derive(Deserialize)]
struct RawHypergraph {
    r: u32,
    n: u32,
    edges: Vec<Vec<u32>>,
}

/// Wire form of a hypergraph, optionally carrying extra metadata.
#[derive(Serialize)]
pub struct HypergraphFile<'a, M: Serialize> {
    pub r: u32,
    pub n: u32,
    pub edges: Vec<&'a [u32]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<M>,
}

impl<'a, M: Serialize> HypergraphFile<'a, M> {
    pub fn new(g: &'a Hypergraph, manifest: Option<M>) -> Self {
        HypergraphFile {
            r: g.r(),
            n: g.n(),
            edges: g.edges().map(Edge::vertices).collect(),
            manifest,
        }
    }
}

pub fn hypergraph_to_json<M: Serialize>(g: &Hypergraph, manifest: Option<M>) -> Result<String> {
    to_json_string(&HypergraphFile::new(g, manifest))
}

/// Lines (1-based) on which each inner array of the `"edges"` array opens.
fn edge_lines(text: &str) -> Vec<usize> {
    let Some(key) = text.find("\"edges\"") else {
        return Vec::new();
    };
    let mut line = 1 + text[..key].matches('\n').count();
    let mut depth = 0usize;
    let mut out = Vec::new();
    for ch in text[key..].chars() {
        match ch {
            '\n' => line += 1,
            '[' => {
                depth += 1;
                if depth == 2 {
                    out.push(line);
                }
            }
            ']' => {
                if depth <= 1 {
                    break;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    out
}

/// Parses and validates a hypergraph file. Errors carry the line of the offending edge.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let raw: RawHypergraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if raw.r == 0 {
        return Err(Error::Parse {
            line: 1 + text[..text.find("\"r\"").unwrap_or(0)].matches('\n').count(),
            message: "uniformity r must be at least 1".into(),
        });
    }
    let lines = edge_lines(text);
    let at = |k: usize, message: String| Error::Parse {
        line: lines.get(k).copied().unwrap_or(1),
        message,
    };
    let mut edges = Vec::with_capacity(raw.edges.len());
    let mut seen = std::collections::BTreeSet::new();
    for (k, list) in raw.edges.into_iter().enumerate() {
        if list.len() != raw.r as usize {
            return Err(at(
                k,
                format!("edge {list:?} has {} vertices, expected {}", list.len(), raw.r),
            ));
        }
        if let Some(v) = list.iter().find(|&&v| v == 0 || v > raw.n) {
            return Err(at(k, format!("vertex {v} in edge {list:?} is outside [1, {}]", raw.n)));
        }
        let edge = Edge::from_unsorted(list.clone())
            .map_err(|_| at(k, format!("edge {list:?} repeats a vertex")))?;
        if !seen.insert(edge.clone()) {
            return Err(at(k, format!("duplicate edge {list:?}")));
        }
        edges.push(edge);
    }
    Hypergraph::new(raw.r, raw.n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::build_colex;

    #[test]
    fn floats_use_17_digits() {
        assert_eq!(to_json_string(&0.0625).unwrap(), "6.2500000000000000e-2");
        assert_eq!(to_json_string(&vec![1.0 / 3.0]).unwrap(), "[3.3333333333333331e-1]");
        let back: f64 = serde_json::from_str(&to_json_string(&0.1f64).unwrap()).unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn hypergraph_roundtrip() {
        let g = build_colex(3, 5).unwrap();
        let text = hypergraph_to_json::<()>(&g, None).unwrap();
        assert_eq!(
            text,
            r#"{"r":3,"n":5,"edges":[[1,2,3],[1,2,4],[1,3,4],[2,3,4],[1,2,5]]}"#
        );
        assert_eq!(parse_hypergraph(&text).unwrap(), g);
    }

    #[test]
    fn extra_keys_are_ignored() {
        let g = parse_hypergraph(r#"{"r":2,"n":3,"edges":[[1,2]],"manifest":{"command":"x"}}"#)
            .unwrap();
        assert_eq!(g.m(), 1);
    }

    fn parse_line(text: &str) -> usize {
        match parse_hypergraph(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_point_at_the_edge() {
        let dup = "{\n  \"r\": 3,\n  \"n\": 4,\n  \"edges\": [\n    [1,2,3],\n    [3,2,1]\n  ]\n}";
        assert_eq!(parse_line(dup), 6);
        let short = "{\"r\": 3, \"n\": 4, \"edges\": [\n[1,2,3],\n[1,2],\n[2,3,4]]}";
        assert_eq!(parse_line(short), 3);
        let range = "{\"r\": 3, \"n\": 4,\n\"edges\": [[1,2,5]]}";
        assert_eq!(parse_line(range), 2);
        let repeated = "{\"r\": 3, \"n\": 4, \"edges\": [\n\n[1,1,2]]}";
        assert_eq!(parse_line(repeated), 3);
        let zero = "{\"r\": 2, \"n\": 4, \"edges\": [[0,1]]}";
        assert_eq!(parse_line(zero), 1);
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert_eq!(parse_line("{\"r\": 3,\n\"n\": 4,\n\"edges\": [[1,2,3],]\n}"), 3);
        assert_eq!(parse_line("{\"r\": 3,\n\"n\": 4\n}"), 3);
    }
}
