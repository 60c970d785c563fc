use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{HeuristicKind, SearchSpace};

/// Road network parsed from a DIMACS shortest-path pair: arcs from a `.gr`
/// file, node coordinates from a `.co` file.
///
/// Directed arcs are symmetrized into undirected edges keeping the minimum
/// weight seen in either direction; self-loops are dropped. Nodes are
/// relabeled densely in ascending original id; isolated nodes without
/// coordinates are dropped, but an arc endpoint without coordinates is an
/// error.
#[derive(Clone, Debug)]
pub struct RoadGraph {
    /// Original 1-based DIMACS id per dense state.
    pub original_ids: Vec<u32>,
    coords: Vec<(f64, f64)>,
    edges: Vec<(u32, u32, f64)>,
}

pub fn parse_dimacs(gr_text: &str, co_text: &str) -> Result<RoadGraph> {
    // --- arcs ---
    let mut declared_n: Option<usize> = None;
    let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
    for (no, raw) in gr_text.lines().enumerate() {
        let no = no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let mut it = rest.split_whitespace();
            if it.next() != Some("sp") {
                return Err(Error::parse(no, format!("expected `p sp n m`, got `{line}`")));
            }
            let n: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(no, "bad node count in problem line"))?;
            declared_n = Some(n);
            continue;
        }
        if let Some(rest) = line.strip_prefix("a ") {
            let n = declared_n
                .ok_or_else(|| Error::parse(no, "arc before `p sp` problem line"))?;
            let mut it = rest.split_whitespace();
            let mut field = |name: &str| -> Result<i64> {
                it.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::parse(no, format!("bad arc {name}")))
            };
            let u = field("tail")?;
            let v = field("head")?;
            let w = field("weight")?;
            if u < 1 || u as usize > n || v < 1 || v as usize > n {
                return Err(Error::parse(no, format!("arc endpoint out of range 1..={n}")));
            }
            if w <= 0 {
                return Err(Error::parse(no, format!("non-positive arc weight {w}")));
            }
            if u != v {
                arcs.push((u as u32, v as u32, w as f64));
            }
            continue;
        }
        return Err(Error::parse(no, format!("unrecognized line `{line}`")));
    }
    let declared_n =
        declared_n.ok_or_else(|| Error::parse(0, "missing `p sp` problem line in .gr input"))?;

    // --- coordinates ---
    let mut coords: HashMap<u32, (f64, f64)> = HashMap::new();
    for (no, raw) in co_text.lines().enumerate() {
        let no = no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('p') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("v ") {
            let mut it = rest.split_whitespace();
            let mut field = |name: &str| -> Result<i64> {
                it.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::parse(no, format!("bad coordinate {name}")))
            };
            let id = field("id")?;
            let x = field("x")?;
            let y = field("y")?;
            if id < 1 || id as usize > declared_n {
                return Err(Error::parse(no, format!("coordinate id {id} out of range")));
            }
            coords.insert(id as u32, (x as f64, y as f64));
            continue;
        }
        return Err(Error::parse(no, format!("unrecognized line `{line}`")));
    }

    // --- dense relabel: referenced nodes need coords, lonely nodes need coords to survive ---
    let mut keep: Vec<u32> = Vec::new();
    let mut referenced = vec![false; declared_n + 1];
    for &(u, v, _) in &arcs {
        referenced[u as usize] = true;
        referenced[v as usize] = true;
    }
    for id in 1..=declared_n as u32 {
        if referenced[id as usize] {
            if !coords.contains_key(&id) {
                return Err(Error::parse(0, format!("node {id} appears in arcs but has no coordinate")));
            }
            keep.push(id);
        } else if coords.contains_key(&id) {
            keep.push(id);
        }
    }
    let mut dense: HashMap<u32, u32> = HashMap::with_capacity(keep.len());
    for (i, &id) in keep.iter().enumerate() {
        dense.insert(id, i as u32);
    }

    // --- symmetrize, min weight on duplicates ---
    let mut best: HashMap<(u32, u32), f64> = HashMap::new();
    for &(u, v, w) in &arcs {
        let (a, b) = (dense[&u], dense[&v]);
        let key = (a.min(b), a.max(b));
        best.entry(key).and_modify(|cur| *cur = cur.min(w)).or_insert(w);
    }
    let mut edges: Vec<(u32, u32, f64)> = best.into_iter().map(|((a, b), w)| (a, b, w)).collect();
    edges.sort_unstable_by_key(|&(a, b, _)| (a, b));

    let dense_coords = keep.iter().map(|id| coords[id]).collect();
    Ok(RoadGraph { original_ids: keep, coords: dense_coords, edges })
}

impl RoadGraph {
    pub fn num_nodes(&self) -> usize {
        self.original_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Search space with the straight-line heuristic over the raw
    /// coordinates. See `SearchSpace::admissible_h_scale` when edge weights
    /// undercut coordinate distance.
    pub fn to_space<S: Scalar>(&self) -> SearchSpace<S> {
        let edges: Vec<(u32, u32, S)> =
            self.edges.iter().map(|&(a, b, w)| (a, b, S::of(w))).collect();
        SearchSpace::from_edges(self.coords.clone(), &edges, HeuristicKind::Euclidean)
            .expect("validated while parsing")
    }

    /// Canonical `.gr` / `.co` pair for this (already symmetrized) graph,
    /// with both arc directions written out.
    pub fn emit(&self) -> (String, String) {
        let n = self.num_nodes();
        let mut gr = format!("p sp {} {}\n", n, self.edges.len() * 2);
        for &(a, b, w) in &self.edges {
            gr.push_str(&format!("a {} {} {}\n", a + 1, b + 1, w as i64));
            gr.push_str(&format!("a {} {} {}\n", b + 1, a + 1, w as i64));
        }
        let mut co = format!("p aux sp co {}\n", n);
        for (i, &(x, y)) in self.coords.iter().enumerate() {
            co.push_str(&format!("v {} {} {}\n", i + 1, x as i64, y as i64));
        }
        (gr, co)
    }
}
