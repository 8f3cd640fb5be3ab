// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Simple hypergraphs (pairwise edge intersections of size at most one)
//! with stable edge ids and per-vertex incidence lists.

use std::collections::HashMap;

use crate::error::{GraphError, HypergraphError};
use crate::graph::{norm, Graph};

pub type EdgeId = usize;

/// A simple hypergraph. Edges are sorted vertex sets of size >= 2; any two
/// distinct edges share at most one vertex. Removal keeps ids stable.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    alive: Vec<bool>,
    inc: Vec<Vec<EdgeId>>,
    // Every unordered vertex pair inside an edge maps to that edge; by
    // simplicity the map is single-valued.
    pair_owner: HashMap<(usize, usize), EdgeId>,
    live_count: usize,
}

impl Hypergraph {
    pub fn new(n: usize) -> Self {
        Hypergraph {
            n,
            edges: Vec::new(),
            alive: Vec::new(),
            inc: vec![Vec::new(); n],
            pair_owner: HashMap::new(),
            live_count: 0,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut h = Hypergraph::new(n);
        for e in edges {
            h.add_edge(e)?;
        }
        Ok(h)
    }

    /// Views a simple graph as a rank-2 hypergraph, preserving the order of
    /// `g.edges()` as edge ids.
    pub fn from_graph(g: &Graph) -> Self {
        let mut h = Hypergraph::new(g.n());
        for &(u, v) in g.edges() {
            h.add_edge(vec![u, v]).expect("simple graph edges");
        }
        h
    }

    pub fn add_edge(&mut self, mut verts: Vec<usize>) -> Result<EdgeId, HypergraphError> {
        if verts.len() < 2 {
            return Err(HypergraphError::EdgeTooSmall { size: verts.len() });
        }
        verts.sort_unstable();
        for w in verts.windows(2) {
            if w[0] == w[1] {
                return Err(HypergraphError::RepeatedVertex { v: w[0] });
            }
        }
        if let Some(&v) = verts.iter().find(|&&v| v >= self.n) {
            return Err(HypergraphError::OutOfRange { v, n: self.n });
        }
        let id = self.edges.len();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                let key = norm(verts[i], verts[j]);
                if let Some(&other) = self.pair_owner.get(&key) {
                    return Err(HypergraphError::NotSimple { e1: other, e2: id });
                }
            }
        }
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                self.pair_owner.insert(norm(verts[i], verts[j]), id);
            }
        }
        for &v in &verts {
            self.inc[v].push(id);
        }
        self.edges.push(verts);
        self.alive.push(true);
        self.live_count += 1;
        Ok(id)
    }

    /// Removes an edge, keeping all other ids stable.
    pub fn remove_edge(&mut self, id: EdgeId) {
        assert!(self.alive[id], "edge {id} already removed");
        self.alive[id] = false;
        self.live_count -= 1;
        let verts = self.edges[id].clone();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                self.pair_owner.remove(&norm(verts[i], verts[j]));
            }
        }
        for &v in &verts {
            self.inc[v].retain(|&e| e != id);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of live edges.
    pub fn m(&self) -> usize {
        self.live_count
    }

    /// Upper bound on edge ids (dead ids included).
    pub fn id_bound(&self) -> usize {
        self.edges.len()
    }

    pub fn is_live(&self, id: EdgeId) -> bool {
        self.alive[id]
    }

    pub fn edge(&self, id: EdgeId) -> &[usize] {
        debug_assert!(self.alive[id]);
        &self.edges[id]
    }

    pub fn live_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(move |&id| self.alive[id])
    }

    /// Incident edge ids of `v`, in insertion order.
    pub fn incident(&self, v: usize) -> &[EdgeId] {
        &self.inc[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.inc[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.inc.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Rank: size of the largest live edge.
    pub fn rank(&self) -> usize {
        self.live_edges().map(|id| self.edges[id].len()).max().unwrap_or(0)
    }

    /// The unique live edge containing both `u` and `v`, if any.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<EdgeId> {
        self.pair_owner.get(&norm(u, v)).copied()
    }

    /// The other endpoint of a size-2 edge.
    pub fn other_end(&self, id: EdgeId, v: usize) -> usize {
        let e = self.edge(id);
        debug_assert_eq!(e.len(), 2);
        if e[0] == v {
            e[1]
        } else {
            debug_assert_eq!(e[1], v);
            e[0]
        }
    }

    /// All vertices sharing a live edge with `x`.
    pub fn neighborhood(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &id in &self.inc[x] {
            for &v in self.edge(id) {
                if v != x && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Re-checks the simplicity invariant from scratch. `O(sum c^2)`.
    pub fn validate_simple(&self) -> Result<(), HypergraphError> {
        let mut seen: HashMap<(usize, usize), EdgeId> = HashMap::new();
        for id in self.live_edges() {
            let e = &self.edges[id];
            for i in 0..e.len() {
                for j in i + 1..e.len() {
                    if let Some(other) = seen.insert(norm(e[i], e[j]), id) {
                        return Err(HypergraphError::NotSimple { e1: other, e2: id });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses the text hypergraph format: header `ph <n> <m>`, hyperedge lines
/// `he <v1> <v2> ...`, comment lines starting with `c`.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, GraphError> {
    let mut h: Option<Hypergraph> = None;
    let mut declared = 0usize;
    let mut count = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let malformed = || GraphError::Malformed {
            line: lineno + 1,
            content: raw.to_string(),
        };
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let fields: Vec<&str> = parts.collect();
        match tag {
            "ph" => {
                if h.is_some() || fields.len() != 2 {
                    return Err(malformed());
                }
                let n: usize = fields[0].parse().map_err(|_| malformed())?;
                declared = fields[1].parse().map_err(|_| malformed())?;
                h = Some(Hypergraph::new(n));
            }
            "he" => {
                let host = h.as_mut().ok_or_else(malformed)?;
                let verts: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse().map_err(|_| malformed()))
                    .collect::<Result<_, _>>()?;
                host.add_edge(verts).map_err(|_| malformed())?;
                count += 1;
            }
            _ => return Err(malformed()),
        }
    }
    let h = h.ok_or(GraphError::MissingHeader)?;
    if count != declared {
        return Err(GraphError::EdgeCountMismatch {
            declared,
            actual: count,
        });
    }
    Ok(h)
}

/// Serializes a hypergraph in the same text format `parse_hypergraph`
/// reads, listing live edges in id order.
pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "ph {} {}", h.n(), h.m()).unwrap();
    for id in h.live_edges() {
        out.push_str("he");
        for &v in h.edge(id) {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// A matching: a set of pairwise vertex-disjoint edge ids.
#[derive(Clone, Debug, Default)]
pub struct Matching {
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(edges: Vec<EdgeId>) -> Self {
        Matching { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The saturated vertex set `V(M)`.
    pub fn saturated(&self, h: &Hypergraph) -> Vec<usize> {
        let mut out = Vec::new();
        for &id in &self.edges {
            out.extend_from_slice(h.edge(id));
        }
        out.sort_unstable();
        out
    }

    /// Checks pairwise disjointness against a host.
    pub fn is_valid(&self, h: &Hypergraph) -> bool {
        let sat = self.saturated(h);
        sat.windows(2).all(|w| w[0] != w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_big_intersection() {
        let r = Hypergraph::from_edges(4, [vec![0, 1, 2], vec![1, 2, 3]]);
        assert!(matches!(r, Err(HypergraphError::NotSimple { .. })));
    }

    #[test]
    fn rejects_parallel_pair_edges() {
        let r = Hypergraph::from_edges(3, [vec![0, 1], vec![1, 0]]);
        assert!(matches!(r, Err(HypergraphError::NotSimple { .. })));
    }

    #[test]
    fn incidence_and_rank() {
        let h = Hypergraph::from_edges(5, [vec![0, 1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        assert_eq!(h.rank(), 3);
        assert_eq!(h.degree(2), 2);
        assert_eq!(h.degree(3), 2);
        assert_eq!(h.edge_between(0, 2), Some(0));
        assert_eq!(h.edge_between(0, 3), None);
        assert_eq!(h.neighborhood(3), vec![2, 4]);
    }

    #[test]
    fn remove_edge_keeps_ids_and_invariant() {
        let mut h = Hypergraph::from_edges(4, [vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        h.remove_edge(1);
        assert_eq!(h.m(), 2);
        assert!(h.is_live(0) && !h.is_live(1) && h.is_live(2));
        assert_eq!(h.edge_between(1, 2), None);
        // The freed slot can be reused by a new edge id.
        let id = h.add_edge(vec![1, 3]).unwrap();
        assert_eq!(id, 3);
        h.validate_simple().unwrap();
    }

    #[test]
    fn matching_saturation() {
        let h = Hypergraph::from_edges(6, [vec![0, 1], vec![2, 3, 4], vec![4, 5]]).unwrap();
        let m = Matching::new(vec![0, 1]);
        assert!(m.is_valid(&h));
        assert_eq!(m.saturated(&h), vec![0, 1, 2, 3, 4]);
        let bad = Matching::new(vec![1, 2]);
        assert!(!bad.is_valid(&h));
    }
}
