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

//! Partial edge colorings with incremental missing-color bookkeeping,
//! total colorings, and the validity verifiers.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::graph::{norm, Graph};
use crate::hypergraph::{EdgeId, Hypergraph};

pub type Color = u32;

const NO_EDGE: u32 = u32::MAX;

/// A set of colors drawn from a palette `{1..k}`, stored as a bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorSet {
    bits: Vec<u64>,
    k: usize,
}

impl ColorSet {
    pub fn empty(k: usize) -> Self {
        ColorSet {
            bits: vec![0; (k + 63) / 64],
            k,
        }
    }

    pub fn full(k: usize) -> Self {
        let mut s = ColorSet::empty(k);
        for c in 1..=k as Color {
            s.insert(c);
        }
        s
    }

    #[inline]
    pub fn contains(&self, c: Color) -> bool {
        debug_assert!(c >= 1 && c as usize <= self.k);
        let i = (c - 1) as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, c: Color) {
        debug_assert!(c >= 1 && c as usize <= self.k);
        let i = (c - 1) as usize;
        self.bits[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, c: Color) {
        debug_assert!(c >= 1 && c as usize <= self.k);
        let i = (c - 1) as usize;
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Colors in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Color> + '_ {
        (1..=self.k as Color).filter(move |&c| self.contains(c))
    }

    pub fn smallest(&self) -> Option<Color> {
        for (w, &b) in self.bits.iter().enumerate() {
            if b != 0 {
                return Some((w * 64 + b.trailing_zeros() as usize) as Color + 1);
            }
        }
        None
    }

    pub fn intersection(&self, other: &ColorSet) -> ColorSet {
        debug_assert_eq!(self.k, other.k);
        ColorSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a & b)
                .collect(),
            k: self.k,
        }
    }

    /// The complement within `{1..k}`.
    pub fn complement(&self) -> ColorSet {
        let mut out = ColorSet::full(self.k);
        for (o, &b) in out.bits.iter_mut().zip(&self.bits) {
            *o &= !b;
        }
        out
    }
}

/// A pair of incident edges carrying the same color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoringViolation {
    pub shared_vertex: usize,
    pub e1: EdgeId,
    pub e2: EdgeId,
    pub color: Color,
}

/// A proper partial `k`-edge-coloring of a host hypergraph, with per-vertex
/// present-color bitsets and an O(1) "which edge carries color c at v" table.
///
/// Color 0 is the internal uncolored sentinel; the public surface speaks in
/// `Option<Color>` with colors in `{1..k}`.
#[derive(Clone, Debug)]
pub struct PartialEdgeColoring {
    k: usize,
    color: Vec<Color>,
    present: Vec<ColorSet>,
    slot: Vec<Vec<u32>>,
}

impl PartialEdgeColoring {
    pub fn new(h: &Hypergraph, k: usize) -> Self {
        PartialEdgeColoring {
            k,
            color: vec![0; h.id_bound()],
            present: vec![ColorSet::empty(k); h.n()],
            slot: vec![vec![NO_EDGE; k]; h.n()],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color_of(&self, id: EdgeId) -> Option<Color> {
        if id < self.color.len() && self.color[id] != 0 {
            Some(self.color[id])
        } else {
            None
        }
    }

    /// Grows internal storage after the host gained edges.
    pub fn sync_ids(&mut self, h: &Hypergraph) {
        if self.color.len() < h.id_bound() {
            self.color.resize(h.id_bound(), 0);
        }
    }

    /// Assigns color `c` to an uncolored edge. Panics if the assignment
    /// breaks properness; callers check availability first.
    pub fn assign(&mut self, h: &Hypergraph, id: EdgeId, c: Color) {
        self.sync_ids(h);
        assert!(c >= 1 && c as usize <= self.k, "color {c} out of palette 1..={}", self.k);
        assert_eq!(self.color[id], 0, "edge {id} already colored");
        for &v in h.edge(id) {
            assert!(
                !self.present[v].contains(c),
                "color {c} already present at vertex {v} (edge {id})"
            );
        }
        self.color[id] = c;
        for &v in h.edge(id) {
            self.present[v].insert(c);
            self.slot[v][(c - 1) as usize] = id as u32;
        }
    }

    /// Removes the color from a colored edge and returns it.
    pub fn unassign(&mut self, h: &Hypergraph, id: EdgeId) -> Color {
        let c = self.color[id];
        assert_ne!(c, 0, "edge {id} not colored");
        self.color[id] = 0;
        for &v in h.edge(id) {
            self.present[v].remove(c);
            self.slot[v][(c - 1) as usize] = NO_EDGE;
        }
        c
    }

    /// The edge carrying color `c` at vertex `v`, if any.
    pub fn edge_with_color_at(&self, v: usize, c: Color) -> Option<EdgeId> {
        let id = self.slot[v][(c - 1) as usize];
        if id == NO_EDGE {
            None
        } else {
            Some(id as usize)
        }
    }

    pub fn is_missing(&self, v: usize, c: Color) -> bool {
        !self.present[v].contains(c)
    }

    /// The missing-color set of `v`: palette colors absent from its
    /// incident colored edges.
    pub fn missing(&self, v: usize) -> ColorSet {
        self.present[v].complement()
    }

    pub fn present(&self, v: usize) -> &ColorSet {
        &self.present[v]
    }

    /// The missing class: all vertices of the host missing color `i`.
    pub fn missing_class(&self, h: &Hypergraph, i: Color) -> Result<Vec<usize>, ColorOutOfRange> {
        if i < 1 || i as usize > self.k {
            return Err(ColorOutOfRange { color: i, k: self.k });
        }
        Ok((0..h.n()).filter(|&v| self.is_missing(v, i)).collect())
    }

    pub fn colored_count(&self, h: &Hypergraph) -> usize {
        h.live_edges().filter(|&id| self.color[id] != 0).count()
    }

    pub fn uncolored_edges(&self, h: &Hypergraph) -> Vec<EdgeId> {
        h.live_edges().filter(|&id| self.color[id] == 0).collect()
    }

    pub fn is_total(&self, h: &Hypergraph) -> bool {
        h.live_edges().all(|id| self.color[id] != 0)
    }

    /// Full properness scan; the incremental bookkeeping makes improper
    /// states unrepresentable, this re-derives the fact from scratch.
    pub fn verify(&self, h: &Hypergraph) -> Result<(), EdgeColoringViolation> {
        let mut at: Vec<HashMap<Color, EdgeId>> = vec![HashMap::new(); h.n()];
        for id in h.live_edges() {
            let Some(c) = self.color_of(id) else { continue };
            for &v in h.edge(id) {
                if let Some(&other) = at[v].get(&c) {
                    return Err(EdgeColoringViolation {
                        shared_vertex: v,
                        e1: other,
                        e2: id,
                        color: c,
                    });
                }
                at[v].insert(c, id);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("color {color} outside palette 1..={k}")]
pub struct ColorOutOfRange {
    pub color: Color,
    pub k: usize,
}

/// Standalone free-function form of the verifier.
pub fn verify_edge_coloring(
    h: &Hypergraph,
    phi: &PartialEdgeColoring,
) -> Result<(), EdgeColoringViolation> {
    phi.verify(h)
}

/// A joint vertex+edge coloring of a graph.
#[derive(Clone, Debug)]
pub struct TotalColoring {
    pub k: usize,
    pub vertex_colors: Vec<Color>,
    pub edge_colors: HashMap<(usize, usize), Color>,
}

/// First violated constraint of a total coloring, in deterministic scan
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TotalViolation {
    AdjacentVertices { u: usize, v: usize, color: Color },
    AdjacentEdges { e1: (usize, usize), e2: (usize, usize), color: Color },
    IncidentVertexEdge { v: usize, e: (usize, usize), color: Color },
    UncoloredVertex { v: usize },
    UncoloredEdge { e: (usize, usize) },
    OverBudget { color: Color, budget: usize },
}

impl std::fmt::Display for TotalViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TotalViolation::AdjacentVertices { u, v, color } => {
                write!(f, "adjacent vertices {u}, {v} share color {color}")
            }
            TotalViolation::AdjacentEdges { e1, e2, color } => write!(
                f,
                "adjacent edges ({},{}) and ({},{}) share color {color}",
                e1.0, e1.1, e2.0, e2.1
            ),
            TotalViolation::IncidentVertexEdge { v, e, color } => write!(
                f,
                "vertex {v} and incident edge ({},{}) share color {color}",
                e.0, e.1
            ),
            TotalViolation::UncoloredVertex { v } => write!(f, "vertex {v} has no color"),
            TotalViolation::UncoloredEdge { e } => write!(f, "edge ({},{}) has no color", e.0, e.1),
            TotalViolation::OverBudget { color, budget } => {
                write!(f, "color {color} exceeds budget {budget}")
            }
        }
    }
}

/// Checks all three constraint families of a total coloring and that every
/// used color fits within `budget`.
pub fn verify_total_coloring(
    tc: &TotalColoring,
    g: &Graph,
    budget: usize,
) -> Result<(), TotalViolation> {
    for v in 0..g.n() {
        let cv = *tc.vertex_colors.get(v).unwrap_or(&0);
        if cv == 0 {
            return Err(TotalViolation::UncoloredVertex { v });
        }
        if cv as usize > budget {
            return Err(TotalViolation::OverBudget { color: cv, budget });
        }
    }
    for &(u, v) in g.edges() {
        let Some(&ce) = tc.edge_colors.get(&norm(u, v)) else {
            return Err(TotalViolation::UncoloredEdge { e: (u, v) });
        };
        if ce == 0 {
            return Err(TotalViolation::UncoloredEdge { e: (u, v) });
        }
        if ce as usize > budget {
            return Err(TotalViolation::OverBudget { color: ce, budget });
        }
    }
    for &(u, v) in g.edges() {
        if tc.vertex_colors[u] == tc.vertex_colors[v] {
            return Err(TotalViolation::AdjacentVertices {
                u,
                v,
                color: tc.vertex_colors[u],
            });
        }
        let ce = tc.edge_colors[&(u, v)];
        if ce == tc.vertex_colors[u] {
            return Err(TotalViolation::IncidentVertexEdge { v: u, e: (u, v), color: ce });
        }
        if ce == tc.vertex_colors[v] {
            return Err(TotalViolation::IncidentVertexEdge { v, e: (u, v), color: ce });
        }
    }
    for v in 0..g.n() {
        let mut seen: HashMap<Color, (usize, usize)> = HashMap::new();
        for &w in g.neighbors(v) {
            let e = norm(v, w);
            let c = tc.edge_colors[&e];
            if let Some(&other) = seen.get(&c) {
                return Err(TotalViolation::AdjacentEdges { e1: other, e2: e, color: c });
            }
            seen.insert(c, e);
        }
    }
    Ok(())
}

/// On-disk interchange form for colorings:
/// `{k, vertex_colors?, edge_colors: [[u, v, c], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoringJson {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_colors: Option<Vec<Color>>,
    pub edge_colors: Vec<(usize, usize, Color)>,
}

impl ColoringJson {
    pub fn from_total(tc: &TotalColoring) -> Self {
        let mut edge_colors: Vec<(usize, usize, Color)> = tc
            .edge_colors
            .iter()
            .map(|(&(u, v), &c)| (u, v, c))
            .collect();
        edge_colors.sort_unstable();
        ColoringJson {
            k: tc.k,
            vertex_colors: Some(tc.vertex_colors.clone()),
            edge_colors,
        }
    }

    pub fn to_total(&self) -> TotalColoring {
        TotalColoring {
            k: self.k,
            vertex_colors: self.vertex_colors.clone().unwrap_or_default(),
            edge_colors: self
                .edge_colors
                .iter()
                .map(|&(u, v, c)| (norm(u, v), c))
                .collect(),
        }
    }
}
