//! Text and JSON file formats.
//!
//! * Graph: text `n m` followed by `m` lines `u v`, or JSON
//!   `{"n": .., "edges": [[u, v], ..]}`.
//! * Embedding: JSON `{"host": <graph>, "d": .., "map": [[v, i], ..]}`.
//! * Decomposition: JSON `{"nodes": N, "parent": [..], "bags": [[..], ..]}`
//!   with `-1` as the parent of the root.
//! * Vertex set: whitespace-separated vertex ids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, ProductEmbedding, VertexSet};
use crate::treewidth::TreeDecomposition;

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl GraphJson {
    fn from_graph(g: &Graph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    fn into_graph(self) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    host: GraphJson,
    d: usize,
    map: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    nodes: usize,
    parent: Vec<i64>,
    bags: Vec<Vec<usize>>,
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("line {line}: missing {what}")))?;
    tok.parse().map_err(|_| {
        Error::Parse(format!(
            "line {line}: {what} {tok:?} is not a nonnegative integer"
        ))
    })
}

/// Parses either graph format, deciding by the first non-blank character.
pub fn parse_graph(s: &str) -> Result<Graph> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str::<GraphJson>(s)?.into_graph();
    }
    let mut lines = s
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let mut toks = header.split_whitespace();
    let n = parse_usize(toks.next(), hl, "vertex count")?;
    let m = parse_usize(toks.next(), hl, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let u = parse_usize(toks.next(), line, "endpoint")?;
        let v = parse_usize(toks.next(), line, "endpoint")?;
        if toks.next().is_some() {
            return Err(Error::Parse(format!("line {line}: extra tokens")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, edges)
}

pub fn graph_to_text(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(&GraphJson::from_graph(g)).expect("graph serializes")
}

pub fn parse_embedding(s: &str) -> Result<ProductEmbedding> {
    let e: EmbeddingJson = serde_json::from_str(s)?;
    ProductEmbedding::new(
        e.host.into_graph()?,
        e.d,
        e.map.into_iter().map(|[v, i]| (v, i)).collect(),
    )
}

pub fn embedding_to_json(e: &ProductEmbedding) -> String {
    serde_json::to_string(&EmbeddingJson {
        host: GraphJson::from_graph(&e.host),
        d: e.path_len,
        map: e.map.iter().map(|&(v, i)| [v, i]).collect(),
    })
    .expect("embedding serializes")
}

pub fn parse_decomposition(s: &str) -> Result<TreeDecomposition> {
    let d: DecompositionJson = serde_json::from_str(s)?;
    if d.parent.len() != d.nodes || d.bags.len() != d.nodes {
        return Err(Error::Parse(format!(
            "decomposition announces {} nodes but has {} parents and {} bags",
            d.nodes,
            d.parent.len(),
            d.bags.len()
        )));
    }
    let parent = d
        .parent
        .iter()
        .map(|&p| match p {
            -1 => Ok(None),
            p if p >= 0 => Ok(Some(p as usize)),
            p => Err(Error::Parse(format!("invalid parent {p}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    TreeDecomposition::from_parts(parent, d.bags)
}

pub fn decomposition_to_json(td: &TreeDecomposition) -> String {
    serde_json::to_string(&DecompositionJson {
        nodes: td.num_nodes(),
        parent: td
            .parents()
            .iter()
            .map(|p| p.map_or(-1, |p| p as i64))
            .collect(),
        bags: td.bags().to_vec(),
    })
    .expect("decomposition serializes")
}

pub fn parse_vertex_set(s: &str, n: usize) -> Result<VertexSet> {
    let members = s
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("vertex id {t:?} is not a nonnegative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    VertexSet::new(members, n)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn read_embedding(path: &Path) -> Result<ProductEmbedding> {
    parse_embedding(&std::fs::read_to_string(path)?)
}

pub fn read_decomposition(path: &Path) -> Result<TreeDecomposition> {
    parse_decomposition(&std::fs::read_to_string(path)?)
}

pub fn read_vertex_set(path: &Path, n: usize) -> Result<VertexSet> {
    parse_vertex_set(&std::fs::read_to_string(path)?, n)
}
