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

//! Edge-coloring extension engine: colors all edges of a host hypergraph
//! with a fixed palette while a reserved edge set stays rainbow.
//!
//! The engine seeds the reserved edges with distinct colors, colors the
//! rest greedily, and then clears every remaining uncolored edge with
//! three escalating moves: a directly available color, a fan shift that
//! frees a shared color, or a two-color chain switch that avoids the
//! reserved edges. Vertex colorings never enter the picture; rainbowness
//! of the reserved set is preserved because no move ever touches it.

use thiserror::Error;

use crate::coloring::{Color, PartialEdgeColoring};
use crate::fans::{
    build_multifan, common_missing, kempe_chain, restrict_to_clean_sequences, shift,
    switch_chain,
};
use crate::graph::Graph;
use crate::hypergraph::{EdgeId, Hypergraph, Matching};

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no applicable move with {colored}/{total} edges colored")]
    Stalled { colored: usize, total: usize },
    #[error("recoloring budget exhausted with {colored}/{total} edges colored")]
    Budget { colored: usize, total: usize },
}

/// The smallest color missing at every vertex of the edge, if any.
fn free_color(h: &Hypergraph, phi: &PartialEdgeColoring, id: EdgeId) -> Option<Color> {
    let verts = h.edge(id);
    let mut set = phi.missing(verts[0]);
    for &v in &verts[1..] {
        set = set.intersection(&phi.missing(v));
    }
    set.smallest()
}

/// Colors every edge of `h` from the palette `{1..k}` so that the edges
/// of `reserved` carry distinct colors `1..reserved.len()`.
///
/// `is_center` optionally restricts which endpoint of an uncolored edge
/// anchors the fan; when given, the endpoint marked `true` is chosen.
/// This is what makes the near-bipartite variant work with a palette as
/// small as one more than the maximum degree on the non-center side.
///
/// Sufficient palettes: `k >= max_degree + 2*rank - 1` when all
/// non-reserved edges have size two and the reserved set is a matching
/// plus the star of one vertex whose neighborhood avoids the matching.
/// Larger palettes only help; callers enforce their own preconditions.
pub fn extend_with_palette(
    h: &Hypergraph,
    reserved: &[EdgeId],
    k: usize,
    is_center: Option<&[bool]>,
) -> Result<PartialEdgeColoring, ExtendError> {
    if reserved.len() > k {
        return Err(ExtendError::Precondition(format!(
            "{} reserved edges exceed palette size {k}",
            reserved.len()
        )));
    }
    for (i, &id) in reserved.iter().enumerate() {
        if !h.is_live(id) {
            return Err(ExtendError::Precondition(format!("reserved edge {id} not live")));
        }
        if reserved[..i].contains(&id) {
            return Err(ExtendError::Precondition(format!("reserved edge {id} repeated")));
        }
    }
    let total = h.m();
    let mut phi = PartialEdgeColoring::new(h, k);
    // Distinct colors on the reserved edges are automatically proper:
    // incident edges only ever need *different* colors.
    for (i, &id) in reserved.iter().enumerate() {
        phi.assign(h, id, (i + 1) as Color);
    }
    for id in h.live_edges() {
        if phi.color_of(id).is_none() {
            if let Some(c) = free_color(h, &phi, id) {
                phi.assign(h, id, c);
            }
        }
    }

    let mut ops: usize = 0;
    let limit = 40 * k * (total + 1) + 1000;
    'outer: loop {
        let Some(e0) = h.live_edges().find(|&id| phi.color_of(id).is_none()) else {
            return Ok(phi);
        };
        loop {
            if ops > limit {
                return Err(ExtendError::Budget {
                    colored: phi.colored_count(h),
                    total,
                });
            }
            if let Some(c) = free_color(h, &phi, e0) {
                phi.assign(h, e0, c);
                ops += 1;
                continue 'outer;
            }
            let verts = h.edge(e0);
            if verts.len() != 2 {
                // Only size-2 edges support fan moves; a blocked hyperedge
                // means the caller's preconditions were not met.
                return Err(ExtendError::Stalled {
                    colored: phi.colored_count(h),
                    total,
                });
            }
            let (a, b) = (verts[0], verts[1]);
            let u = match is_center {
                Some(marks) if marks[a] && !marks[b] => a,
                Some(marks) if marks[b] && !marks[a] => b,
                _ => a,
            };
            let fan = build_multifan(h, &phi, u, e0, |_| true);
            let f1 = restrict_to_clean_sequences(&fan, &phi, reserved);

            // Fan shift: some leaf shares a missing color with the center.
            let mut shifted = false;
            for i in 1..f1.entries.len() {
                if let Some(c) = common_missing(&phi, u, f1.entries[i].leaf) {
                    let seq = f1.linear_sequence(i);
                    ops += 2 * seq.len();
                    shift(h, &mut phi, &f1, &seq);
                    phi.assign(h, f1.entries[i].edge, c);
                    shifted = true;
                    break;
                }
            }
            if shifted {
                continue 'outer;
            }

            // Chain switch: find a color missing at two fan leaves, then a
            // two-color chain from the center or one of those leaves that
            // avoids the reserved edges, and swap its colors.
            let center_missing: Vec<Color> = (1..=k as Color)
                .filter(|&c| phi.is_missing(u, c))
                .collect();
            let leaves: Vec<usize> = f1.leaves().collect();
            let mut switched = false;
            'gamma: for gamma in 1..=k as Color {
                if phi.is_missing(u, gamma) {
                    continue;
                }
                let missing_leaves: Vec<usize> = leaves
                    .iter()
                    .copied()
                    .filter(|&w| phi.is_missing(w, gamma))
                    .collect();
                if missing_leaves.len() < 2 {
                    continue;
                }
                for &alpha in &center_missing {
                    for &s in std::iter::once(&u).chain(missing_leaves.iter()) {
                        let chain = kempe_chain(h, &phi, s, alpha, gamma);
                        if chain.edge_ids.is_empty() || chain.contains_any_edge(reserved) {
                            continue;
                        }
                        ops += 2 * chain.edge_ids.len();
                        switch_chain(h, &mut phi, &chain);
                        switched = true;
                        break 'gamma;
                    }
                }
            }
            if !switched {
                return Err(ExtendError::Stalled {
                    colored: phi.colored_count(h),
                    total,
                });
            }
        }
    }
}

/// Rainbow extension in a hypergraph that is nearly a graph: all edges
/// outside the matching `m` have size two, and the distinguished vertex
/// `x` has its whole neighborhood outside the matching. Returns a proper
/// coloring with `max_degree + 2*rank - 1` colors in which the matching
/// and the star of `x` are rainbow, together with the palette size used.
pub fn extend_hypergraph(
    h: &Hypergraph,
    m: &Matching,
    x: usize,
) -> Result<(PartialEdgeColoring, usize), ExtendError> {
    if !m.is_valid(h) {
        return Err(ExtendError::Precondition("matching edges overlap".into()));
    }
    let in_m = |id: EdgeId| m.edges().contains(&id);
    for id in h.live_edges() {
        if !in_m(id) && h.edge(id).len() != 2 {
            return Err(ExtendError::Precondition(format!(
                "non-matching edge {id} has size {}",
                h.edge(id).len()
            )));
        }
    }
    let saturated = m.saturated(h);
    for v in h.neighborhood(x) {
        if saturated.binary_search(&v).is_ok() {
            return Err(ExtendError::Precondition(format!(
                "neighbor {v} of the distinguished vertex is saturated"
            )));
        }
    }
    let c = h.rank().max(2);
    let k = h.max_degree() + 2 * c - 1;
    let delta_x = h.incident(x).to_vec();
    if m.len() + delta_x.len() > k {
        return Err(ExtendError::Precondition(format!(
            "reserved set of size {} exceeds palette {k}",
            m.len() + delta_x.len()
        )));
    }
    let mut reserved = m.edges().to_vec();
    reserved.extend(delta_x);
    let phi = extend_with_palette(h, &reserved, k, None)?;
    Ok((phi, k))
}

/// Rainbow extension in a graph that is nearly bipartite: removing `x`
/// leaves a bipartite graph (sides given by `is_a`), `x`'s neighbors
/// avoid the matching `m`, and the palette is the larger of the maximum
/// degree and one more than the maximum degree on side B. Returns the
/// rank-2 host, the coloring, and the palette size.
pub fn extend_near_bipartite(
    g: &Graph,
    is_a: &[bool],
    x: usize,
    m: &[(usize, usize)],
) -> Result<(Hypergraph, PartialEdgeColoring, usize), ExtendError> {
    let mut in_matching = vec![false; g.n()];
    for &(u, v) in m {
        if !g.has_edge(u, v) {
            return Err(ExtendError::Precondition(format!(
                "matching edge ({u}, {v}) absent from the graph"
            )));
        }
        if in_matching[u] || in_matching[v] {
            return Err(ExtendError::Precondition("matching edges overlap".into()));
        }
        in_matching[u] = true;
        in_matching[v] = true;
    }
    let mut k_b = 0;
    for v in 0..g.n() {
        if v != x && !is_a[v] {
            k_b = k_b.max(g.degree(v));
        }
    }
    for &(u, v) in g.edges() {
        if u != x && v != x && is_a[u] == is_a[v] {
            return Err(ExtendError::Precondition(format!(
                "edge ({u}, {v}) does not cross the bipartition"
            )));
        }
    }
    for &v in g.neighbors(x) {
        if in_matching[v] {
            return Err(ExtendError::Precondition(format!(
                "neighbor {v} of the distinguished vertex is saturated"
            )));
        }
    }
    let k = g.max_degree().max(k_b + 1);
    if m.len() + g.degree(x) > k {
        return Err(ExtendError::Precondition(format!(
            "reserved set of size {} exceeds palette {k}",
            m.len() + g.degree(x)
        )));
    }
    let h = Hypergraph::from_graph(g);
    let mut reserved: Vec<EdgeId> = m
        .iter()
        .map(|&(u, v)| h.edge_between(u, v).expect("checked above"))
        .collect();
    reserved.extend(g.neighbors(x).iter().map(|&v| {
        h.edge_between(x, v).expect("incident edge")
    }));
    let mut centers = is_a.to_vec();
    centers[x] = false;
    let phi = extend_with_palette(&h, &reserved, k, Some(&centers))?;
    Ok((h, phi, k))
}

/// Proper edge coloring of a graph with `max_degree + 1` colors: the
/// extension engine with an empty reserved set.
pub fn edge_color_graph(g: &Graph) -> Result<(Hypergraph, PartialEdgeColoring), ExtendError> {
    let h = Hypergraph::from_graph(g);
    let k = g.max_degree() + 1;
    let phi = extend_with_palette(&h, &[], k.max(1), None)?;
    Ok((h, phi))
}

/// Checks that the given edges all carry distinct colors.
pub fn is_rainbow(phi: &PartialEdgeColoring, edges: &[EdgeId]) -> bool {
    let mut seen: Vec<Color> = Vec::with_capacity(edges.len());
    for &id in edges {
        match phi.color_of(id) {
            None => return false,
            Some(c) => {
                if seen.contains(&c) {
                    return false;
                }
                seen.push(c);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::verify_edge_coloring;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_total_proper(h: &Hypergraph, phi: &PartialEdgeColoring) {
        assert!(phi.is_total(h), "some edge left uncolored");
        verify_edge_coloring(h, phi).unwrap();
    }

    #[test]
    fn edge_colors_complete_graphs() {
        for n in 2..=8 {
            let g = Graph::complete(n);
            let (h, phi) = edge_color_graph(&g).unwrap();
            assert_total_proper(&h, &phi);
            assert_eq!(phi.k(), n);
        }
    }

    #[test]
    fn edge_colors_petersen() {
        let g = Graph::from_edges(
            10,
            [
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            ],
        )
        .unwrap();
        let (h, phi) = edge_color_graph(&g).unwrap();
        assert_total_proper(&h, &phi);
    }

    #[test]
    fn edge_colors_random_graphs() {
        let mut seed = 11u64;
        for n in [6, 10, 14, 20] {
            for p in [0.2, 0.5, 0.8] {
                for _ in 0..5 {
                    seed += 1;
                    let g = crate::graph::gen_gnp(n, p, seed);
                    if g.m() == 0 {
                        continue;
                    }
                    let (h, phi) = edge_color_graph(&g).unwrap();
                    assert_total_proper(&h, &phi);
                }
            }
        }
    }

    /// Random nearly-a-graph instance: a matching of
    /// hyperedges, a vertex `x` adjacent only to unsaturated vertices,
    /// and random pair edges everywhere.
    fn random_hyper_instance(seed: u64) -> (Hypergraph, Matching, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(8..18);
        let c = rng.gen_range(2..=4usize);
        let x = n - 1;
        let mut h = Hypergraph::new(n);
        let mut pool: Vec<usize> = (0..n - 1).collect();
        let mut m_ids = Vec::new();
        let matching_target = rng.gen_range(0..=2);
        for _ in 0..matching_target {
            let size = rng.gen_range(2..=c.min(pool.len()));
            if pool.len() < size + 2 {
                break;
            }
            let mut verts = Vec::new();
            for _ in 0..size {
                let i = rng.gen_range(0..pool.len());
                verts.push(pool.swap_remove(i));
            }
            m_ids.push(h.add_edge(verts).unwrap());
        }
        // Star of x over a few unsaturated vertices.
        let star = rng.gen_range(1..=3.min(pool.len()));
        for i in 0..star {
            h.add_edge(vec![x, pool[i]]).unwrap();
        }
        // Random pair edges avoiding x.
        for u in 0..n - 1 {
            for v in u + 1..n - 1 {
                if h.edge_between(u, v).is_none() && rng.gen_bool(0.35) {
                    let _ = h.add_edge(vec![u, v]);
                }
            }
        }
        (h, Matching::new(m_ids), x)
    }

    #[test]
    fn hypergraph_extension_random_instances() {
        let mut done = 0;
        let mut seed = 1000;
        while done < 120 {
            seed += 1;
            let (h, m, x) = random_hyper_instance(seed);
            let c = h.rank().max(2);
            if m.len() + h.degree(x) > h.max_degree() + 2 * c - 1 {
                continue;
            }
            let (phi, k) = extend_hypergraph(&h, &m, x).unwrap();
            assert_eq!(k, h.max_degree() + 2 * c - 1);
            assert_total_proper(&h, &phi);
            let mut reserved = m.edges().to_vec();
            reserved.extend(h.incident(x));
            assert!(is_rainbow(&phi, &reserved));
            done += 1;
        }
    }

    /// Random nearly-bipartite instance.
    fn random_bipartite_instance(seed: u64) -> (Graph, Vec<bool>, usize, Vec<(usize, usize)>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let na = rng.gen_range(3..9);
        let nb = rng.gen_range(3..9);
        let n = na + nb + 1;
        let x = n - 1;
        let mut is_a = vec![false; n];
        for v in 0..na {
            is_a[v] = true;
        }
        let mut edges = Vec::new();
        for u in 0..na {
            for v in na..na + nb {
                if rng.gen_bool(0.4) {
                    edges.push((u, v));
                }
            }
        }
        // A matching inside the bipartite part.
        let mut m = Vec::new();
        let mut used = vec![false; n];
        for &(u, v) in &edges {
            if m.len() < 3 && !used[u] && !used[v] && rng.gen_bool(0.5) {
                used[u] = true;
                used[v] = true;
                m.push((u, v));
            }
        }
        // x joins a few unsaturated vertices.
        let free: Vec<usize> = (0..n - 1).filter(|&v| !used[v]).collect();
        for &v in free.iter().take(rng.gen_range(1..=2)) {
            edges.push((v, x));
        }
        (Graph::from_edges(n, edges).unwrap(), is_a, x, m)
    }

    #[test]
    fn near_bipartite_extension_random_instances() {
        let mut done = 0;
        let mut seed = 5000;
        while done < 120 {
            seed += 1;
            let (g, is_a, x, m) = random_bipartite_instance(seed);
            let k_b = (0..g.n())
                .filter(|&v| v != x && !is_a[v])
                .map(|v| g.degree(v))
                .max()
                .unwrap_or(0);
            let k = g.max_degree().max(k_b + 1);
            if m.len() + g.degree(x) > k || g.m() == 0 {
                continue;
            }
            let (h, phi, got_k) = extend_near_bipartite(&g, &is_a, x, &m).unwrap();
            assert_eq!(got_k, k);
            assert_total_proper(&h, &phi);
            let mut reserved: Vec<EdgeId> = m
                .iter()
                .map(|&(u, v)| h.edge_between(u, v).unwrap())
                .collect();
            reserved.extend(h.incident(x));
            assert!(is_rainbow(&phi, &reserved));
            done += 1;
        }
    }

    #[test]
    fn extension_is_deterministic() {
        let (h, m, x) = random_hyper_instance(1234);
        let c = h.rank().max(2);
        if m.len() + h.degree(x) <= h.max_degree() + 2 * c - 1 {
            let (phi1, _) = extend_hypergraph(&h, &m, x).unwrap();
            let (phi2, _) = extend_hypergraph(&h, &m, x).unwrap();
            for id in h.live_edges() {
                assert_eq!(phi1.color_of(id), phi2.color_of(id));
            }
        }
    }

    #[test]
    fn rejects_saturated_neighborhood() {
        // x adjacent to a matched vertex.
        let mut h = Hypergraph::new(4);
        let e = h.add_edge(vec![0, 1]).unwrap();
        h.add_edge(vec![3, 0]).unwrap();
        let m = Matching::new(vec![e]);
        assert!(matches!(
            extend_hypergraph(&h, &m, 3),
            Err(ExtendError::Precondition(_))
        ));
    }
}
