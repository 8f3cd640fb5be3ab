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

//! Local recoloring primitives: two-color chains with switching, multifans
//! with justification links, linear sequences, and shifts.

use std::collections::{HashMap, HashSet};

use crate::coloring::{Color, PartialEdgeColoring};
use crate::hypergraph::{EdgeId, Hypergraph};

/// A maximal two-color chain: the connected component, within the
/// sub-hypergraph of edges colored `alpha` or `gamma`, of a start vertex.
/// In a graph this is an alternating path or cycle; hyperedges can make it
/// tree-like.
#[derive(Clone, Debug)]
pub struct Chain {
    pub alpha: Color,
    pub gamma: Color,
    /// Vertices in BFS discovery order; the start vertex comes first.
    pub vertices: Vec<usize>,
    /// Edge ids in BFS discovery order.
    pub edge_ids: Vec<EdgeId>,
}

impl Chain {
    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_any_edge(&self, ids: &[EdgeId]) -> bool {
        if ids.len() <= 8 {
            return self.edge_ids.iter().any(|id| ids.contains(id));
        }
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        self.edge_ids.iter().any(|id| sorted.binary_search(id).is_ok())
    }

    /// Vertices of degree one within the chain.
    pub fn end_vertices(&self, h: &Hypergraph) -> Vec<usize> {
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for &id in &self.edge_ids {
            for &v in h.edge(id) {
                *deg.entry(v).or_insert(0) += 1;
            }
        }
        let mut ends: Vec<usize> = deg
            .iter()
            .filter(|&(_, &d)| d == 1)
            .map(|(&v, _)| v)
            .collect();
        ends.sort_unstable();
        ends
    }

    pub fn is_end(&self, h: &Hypergraph, v: usize) -> bool {
        self.end_vertices(h).contains(&v)
    }
}

/// The maximal `(alpha, gamma)`-chain beginning at `v`: breadth-first
/// component of `v` over edges colored with either of the two colors.
pub fn kempe_chain(
    h: &Hypergraph,
    phi: &PartialEdgeColoring,
    v: usize,
    alpha: Color,
    gamma: Color,
) -> Chain {
    debug_assert_ne!(alpha, gamma);
    let mut chain = Chain {
        alpha,
        gamma,
        vertices: vec![v],
        edge_ids: Vec::new(),
    };
    let mut seen_v: HashSet<usize> = HashSet::from([v]);
    let mut seen_e: HashSet<EdgeId> = HashSet::new();
    let mut queue = vec![v];
    let mut head = 0;
    while head < queue.len() {
        let w = queue[head];
        head += 1;
        // Deterministic order: at most one edge of each color at w.
        for c in [alpha, gamma] {
            let Some(id) = phi.edge_with_color_at(w, c) else { continue };
            if !seen_e.insert(id) {
                continue;
            }
            chain.edge_ids.push(id);
            for &z in h.edge(id) {
                if seen_v.insert(z) {
                    chain.vertices.push(z);
                    queue.push(z);
                }
            }
        }
    }
    chain
}

/// Swaps the two colors on every edge of the chain. Applying it twice
/// restores the original coloring.
pub fn switch_chain(h: &Hypergraph, phi: &mut PartialEdgeColoring, chain: &Chain) {
    let mut relabeled: Vec<(EdgeId, Color)> = Vec::with_capacity(chain.edge_ids.len());
    for &id in &chain.edge_ids {
        let c = phi.unassign(h, id);
        let swapped = if c == chain.alpha { chain.gamma } else { chain.alpha };
        relabeled.push((id, swapped));
    }
    for (id, c) in relabeled {
        phi.assign(h, id, c);
    }
}

/// One leaf of a multifan. `pred` indexes the earlier fan entry whose
/// missing set justified admitting this edge; `None` for the seed.
#[derive(Clone, Debug)]
pub struct FanEntry {
    pub edge: EdgeId,
    pub leaf: usize,
    pub pred: Option<usize>,
}

/// A multifan centered at `center` with respect to an uncolored seed edge:
/// a sequence of distinct colored size-2 edges at the center, each colored
/// with a color missing at some earlier leaf.
#[derive(Clone, Debug)]
pub struct Multifan {
    pub center: usize,
    pub entries: Vec<FanEntry>,
}

impl Multifan {
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.leaf)
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.entries.iter().any(|e| e.edge == id)
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.center == v || self.entries.iter().any(|e| e.leaf == v)
    }

    /// The linear sequence ending at entry `i`: fan indices from the seed
    /// to `i`, each justified by its predecessor.
    pub fn linear_sequence(&self, i: usize) -> Vec<usize> {
        let mut seq = Vec::new();
        let mut cur = Some(i);
        while let Some(j) = cur {
            seq.push(j);
            cur = self.entries[j].pred;
        }
        seq.reverse();
        debug_assert_eq!(seq[0], 0);
        seq
    }
}

/// Builds a maximal multifan at `center` seeded by the uncolored edge
/// `e0`, admitting only colored size-2 edges accepted by `admit`. Greedy
/// closure: repeatedly scan the center's incident edges in ascending id
/// order and append any edge whose color is missing at an earlier leaf
/// (smallest justifying index wins), until nothing can be added.
pub fn build_multifan<F>(
    h: &Hypergraph,
    phi: &PartialEdgeColoring,
    center: usize,
    e0: EdgeId,
    mut admit: F,
) -> Multifan
where
    F: FnMut(EdgeId) -> bool,
{
    debug_assert!(phi.color_of(e0).is_none());
    debug_assert_eq!(h.edge(e0).len(), 2);
    let w0 = h.other_end(e0, center);
    let mut fan = Multifan {
        center,
        entries: vec![FanEntry { edge: e0, leaf: w0, pred: None }],
    };
    let mut candidates: Vec<EdgeId> = h
        .incident(center)
        .iter()
        .copied()
        .filter(|&id| id != e0 && h.edge(id).len() == 2 && phi.color_of(id).is_some())
        .filter(|&id| admit(id))
        .collect();
    candidates.sort_unstable();
    let mut used = vec![false; candidates.len()];
    loop {
        let mut grew = false;
        for (ci, &id) in candidates.iter().enumerate() {
            if used[ci] {
                continue;
            }
            let c = phi.color_of(id).expect("candidate is colored");
            let just = fan
                .entries
                .iter()
                .position(|entry| phi.is_missing(entry.leaf, c));
            if let Some(j) = just {
                fan.entries.push(FanEntry {
                    edge: id,
                    leaf: h.other_end(id, center),
                    pred: Some(j),
                });
                used[ci] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    fan
}

/// Restricts a multifan to the entries reachable through justification
/// chains that avoid the given edges: an entry survives when some kept
/// entry's leaf misses its color and the entry itself is not forbidden.
/// Iterates to a fixed point so the result is closed — any admissible fan
/// edge justified by a surviving leaf survives too, regardless of the
/// order in which the original fan found them.
pub fn restrict_to_clean_sequences(
    fan: &Multifan,
    phi: &PartialEdgeColoring,
    forbidden: &[EdgeId],
) -> Multifan {
    let mut out = Multifan {
        center: fan.center,
        entries: vec![fan.entries[0].clone()],
    };
    // kept[i] = index of fan entry i inside `out`, if it survived.
    let mut kept: Vec<Option<usize>> = vec![None; fan.entries.len()];
    kept[0] = Some(0);
    loop {
        let mut grew = false;
        for (i, entry) in fan.entries.iter().enumerate().skip(1) {
            if kept[i].is_some() || forbidden.contains(&entry.edge) {
                continue;
            }
            let c = phi.color_of(entry.edge).expect("fan edges are colored");
            let just = (0..fan.entries.len())
                .filter(|&j| kept[j].is_some())
                .find(|&j| phi.is_missing(fan.entries[j].leaf, c));
            if let Some(j) = just {
                kept[i] = Some(out.entries.len());
                out.entries.push(FanEntry {
                    edge: entry.edge,
                    leaf: entry.leaf,
                    pred: Some(kept[j].unwrap()),
                });
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    out
}

/// Shifts along a linear sequence of fan-entry indices: each edge takes
/// the color of its successor, so the seed edge ends up colored and the
/// last edge of the sequence ends up uncolored. The colored-edge count is
/// unchanged.
pub fn shift(h: &Hypergraph, phi: &mut PartialEdgeColoring, fan: &Multifan, seq: &[usize]) {
    debug_assert!(!seq.is_empty() && seq[0] == 0);
    let before = phi.colored_count(h);
    for t in 1..seq.len() {
        let from = fan.entries[seq[t]].edge;
        let to = fan.entries[seq[t - 1]].edge;
        let c = phi.unassign(h, from);
        phi.assign(h, to, c);
    }
    debug_assert_eq!(phi.colored_count(h), before);
}

/// The smallest color missing at both vertices, if any.
pub fn common_missing(phi: &PartialEdgeColoring, u: usize, v: usize) -> Option<Color> {
    phi.missing(u).intersection(&phi.missing(v)).smallest()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn kempe_chain_on_two_colored_cycle() {
        let g = Graph::cycle(4);
        let h = Hypergraph::from_graph(&g);
        let mut phi = PartialEdgeColoring::new(&h, 2);
        for id in 0..4 {
            let e = h.edge(id);
            let c = if e == [0, 1] || e == [2, 3] { 1 } else { 2 };
            phi.assign(&h, id, c);
        }
        let chain = kempe_chain(&h, &phi, 0, 1, 2);
        assert_eq!(chain.edge_ids.len(), 4);
        assert_eq!(chain.vertices.len(), 4);
        // A cycle has no degree-one vertices.
        assert!(chain.end_vertices(&h).is_empty());
    }

    #[test]
    fn kempe_chain_path_ends() {
        // Path 0-1-2-3 colored 1,2,1.
        let h = Hypergraph::from_edges(4, [vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 3);
        phi.assign(&h, 0, 1);
        phi.assign(&h, 1, 2);
        phi.assign(&h, 2, 1);
        let chain = kempe_chain(&h, &phi, 3, 1, 2);
        assert_eq!(chain.edge_ids.len(), 3);
        assert_eq!(chain.end_vertices(&h), vec![0, 3]);
        // A (1,3)-chain from vertex 3 only picks up the color-1 edge at 3.
        let short = kempe_chain(&h, &phi, 3, 1, 3);
        assert_eq!(short.edge_ids, vec![2]);
    }

    #[test]
    fn switch_chain_is_an_involution() {
        let h = Hypergraph::from_edges(4, [vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 2);
        phi.assign(&h, 0, 1);
        phi.assign(&h, 1, 2);
        phi.assign(&h, 2, 1);
        let chain = kempe_chain(&h, &phi, 0, 1, 2);
        switch_chain(&h, &mut phi, &chain);
        assert_eq!(phi.color_of(0), Some(2));
        assert_eq!(phi.color_of(1), Some(1));
        assert_eq!(phi.color_of(2), Some(2));
        phi.verify(&h).unwrap();
        switch_chain(&h, &mut phi, &chain);
        assert_eq!(phi.color_of(0), Some(1));
        assert_eq!(phi.color_of(1), Some(2));
        assert_eq!(phi.color_of(2), Some(1));
    }

    #[test]
    fn chain_through_hyperedge_component() {
        // Hyperedge {1,2,3} colored 1 links two pair edges colored 2.
        let h = Hypergraph::from_edges(5, [vec![0, 1], vec![1, 2, 3], vec![3, 4]]).unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 2);
        phi.assign(&h, 0, 2);
        phi.assign(&h, 1, 1);
        phi.assign(&h, 2, 2);
        let chain = kempe_chain(&h, &phi, 0, 1, 2);
        assert_eq!(chain.edge_ids.len(), 3);
        assert_eq!(chain.vertices.len(), 5);
        assert_eq!(chain.end_vertices(&h), vec![0, 2, 4]);
        switch_chain(&h, &mut phi, &chain);
        phi.verify(&h).unwrap();
    }

    #[test]
    fn multifan_growth_and_shift() {
        // Star at 0 with leaves 1..=3; k = 3.
        // Edge (0,1) uncolored; (0,2) colored 1; (0,3) colored 2.
        // Leaf 1 misses {1,2,3}, so both colored edges join the fan.
        let h = Hypergraph::from_edges(4, [vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 3);
        phi.assign(&h, 1, 1);
        phi.assign(&h, 2, 2);
        let fan = build_multifan(&h, &phi, 0, 0, |_| true);
        assert_eq!(fan.entries.len(), 3);
        assert_eq!(fan.entries[1].pred, Some(0));
        assert_eq!(fan.entries[2].pred, Some(0));
        let seq = fan.linear_sequence(2);
        assert_eq!(seq, vec![0, 2]);
        shift(&h, &mut phi, &fan, &seq);
        // The seed edge took color 2; edge (0,3) is now uncolored.
        assert_eq!(phi.color_of(0), Some(2));
        assert_eq!(phi.color_of(2), None);
        phi.verify(&h).unwrap();
    }

    #[test]
    fn restriction_drops_forbidden_and_dependents() {
        // Center 0; seed (0,1). Edge (0,2) colored 1 is justified by leaf
        // 1; edge (0,3) colored 2 is justified only by leaf 2, because
        // color 2 is present at vertex 1 via the pendant edge (1,4).
        // Forbidding (0,2) must therefore also drop (0,3).
        let h = Hypergraph::from_edges(
            5,
            [vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 4]],
        )
        .unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 4);
        phi.assign(&h, 1, 1);
        phi.assign(&h, 2, 2);
        phi.assign(&h, 3, 2);
        let fan = build_multifan(&h, &phi, 0, 0, |_| true);
        assert_eq!(fan.entries.len(), 3);
        let f1 = restrict_to_clean_sequences(&fan, &phi, &[1]);
        assert_eq!(f1.entries.len(), 1);
        let f2 = restrict_to_clean_sequences(&fan, &phi, &[2]);
        assert_eq!(f2.entries.len(), 2);
        assert_eq!(f2.entries[1].edge, 1);
        let all = restrict_to_clean_sequences(&fan, &phi, &[]);
        assert_eq!(all.entries.len(), 3);
    }

    #[test]
    fn common_missing_prefers_smallest() {
        let h = Hypergraph::from_edges(3, [vec![0, 1], vec![1, 2]]).unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 4);
        phi.assign(&h, 0, 1);
        assert_eq!(common_missing(&phi, 0, 2), Some(2));
        assert_eq!(common_missing(&phi, 0, 1), Some(2));
    }
}
