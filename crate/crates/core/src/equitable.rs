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

//! Equitable colorings: vertex colorings with near-equal class sizes,
//! edge colorings with near-equal class sizes, and edge colorings whose
//! missing-color classes have near-equal sizes.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::{Color, PartialEdgeColoring};
use crate::fans::{kempe_chain, switch_chain};
use crate::graph::Graph;
use crate::hypergraph::{EdgeId, Hypergraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquitableError {
    #[error("need at least max_degree+1 = {need} classes, got {got}")]
    TooFewClasses { need: usize, got: usize },
    #[error("class-size rebalancing stalled (residual gap {gap})")]
    RebalanceStalled { gap: usize },
    #[error("missing-class balancing stalled at gap {gap}")]
    MissingBalanceStalled { gap: usize },
    #[error("edges {0:?} are not distinctly colored")]
    NotRainbow(Vec<EdgeId>),
}

const UNSET: usize = usize::MAX;

/// Greedy proper coloring into `k` classes, preferring the currently
/// smallest admissible class.
fn greedy_classes(g: &Graph, k: usize, order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut class = vec![UNSET; g.n()];
    let mut size = vec![0usize; k];
    for &v in order {
        let mut banned = vec![false; k];
        for &w in g.neighbors(v) {
            if class[w] != UNSET {
                banned[class[w]] = true;
            }
        }
        let c = (0..k)
            .filter(|&c| !banned[c])
            .min_by_key(|&c| (size[c], c))
            .expect("k >= max_degree+1 leaves an admissible class");
        class[v] = c;
        size[c] += 1;
    }
    (class, size)
}

/// Moves one vertex from the largest class toward a class at least two
/// smaller, along a cascade of moves that never breaks properness.
/// Returns false when no cascade exists.
fn cascade_once(g: &Graph, class: &mut [usize], size: &mut [usize]) -> bool {
    let k = size.len();
    let start = (0..k).max_by_key(|&c| (size[c], std::cmp::Reverse(c))).unwrap();
    let threshold = size[start] - 2;
    // BFS over classes; remember which vertex witnesses each class edge.
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; k]; // (from class, vertex)
    let mut seen = vec![false; k];
    seen[start] = true;
    let mut q = VecDeque::from([start]);
    let mut target = None;
    'bfs: while let Some(x) = q.pop_front() {
        for v in 0..g.n() {
            if class[v] != x {
                continue;
            }
            let mut banned = vec![false; k];
            for &w in g.neighbors(v) {
                banned[class[w]] = true;
            }
            for y in 0..k {
                if y == x || seen[y] || banned[y] {
                    continue;
                }
                seen[y] = true;
                prev[y] = Some((x, v));
                if size[y] <= threshold {
                    target = Some(y);
                    break 'bfs;
                }
                q.push_back(y);
            }
        }
    }
    let Some(mut y) = target else { return false };
    // Unwind: apply moves from the far end back to the start class. Each
    // move only removes vertices from upstream classes, so the recorded
    // witnesses stay valid.
    while let Some((x, v)) = prev[y] {
        debug_assert_eq!(class[v], x);
        debug_assert!(g.neighbors(v).iter().all(|&w| class[w] != y || w == v));
        class[v] = y;
        size[x] -= 1;
        size[y] += 1;
        y = x;
    }
    true
}

/// Proper vertex `k`-coloring in which any two class sizes differ by at
/// most one. Requires `k >= max_degree + 1`. Colors are `1..=k`.
pub fn equitable_vertex_coloring(g: &Graph, k: usize) -> Result<Vec<Color>, EquitableError> {
    if k < g.max_degree() + 1 {
        return Err(EquitableError::TooFewClasses {
            need: g.max_degree() + 1,
            got: k,
        });
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6571_7569);
    for _restart in 0..20 {
        let (mut class, mut size) = greedy_classes(g, k, &order);
        let mut budget = 4 * g.n() * k + 64;
        loop {
            let max = *size.iter().max().unwrap();
            let min = *size.iter().min().unwrap();
            if max - min <= 1 {
                return Ok(class.iter().map(|&c| (c + 1) as Color).collect());
            }
            if budget == 0 || !cascade_once(g, &mut class, &mut size) {
                break;
            }
            budget -= 1;
        }
        order.shuffle(&mut rng);
    }
    Err(EquitableError::RebalanceStalled { gap: 0 })
}

/// Sizes of the color classes of a total edge coloring.
pub fn class_sizes(h: &Hypergraph, phi: &PartialEdgeColoring) -> Vec<usize> {
    let mut size = vec![0usize; phi.k()];
    for id in h.live_edges() {
        if let Some(c) = phi.color_of(id) {
            size[(c - 1) as usize] += 1;
        }
    }
    size
}

/// Rebalances a total edge coloring so every color class has either
/// `floor(m/k)` or `ceil(m/k)` edges, by switching two-color components
/// that carry one excess edge of the larger class. In a graph every such
/// component is an alternating path or even cycle, so its two color
/// counts differ by at most one and each switch makes strict progress.
pub fn balance_class_sizes(h: &Hypergraph, phi: &mut PartialEdgeColoring) {
    debug_assert!(phi.is_total(h));
    loop {
        let size = class_sizes(h, phi);
        let hi = (0..size.len()).max_by_key(|&c| (size[c], std::cmp::Reverse(c))).unwrap();
        let lo = (0..size.len()).min_by_key(|&c| (size[c], c)).unwrap();
        if size[hi] - size[lo] <= 1 {
            return;
        }
        let alpha = (hi + 1) as Color;
        let beta = (lo + 1) as Color;
        let mut visited = vec![false; h.n()];
        let mut switched = false;
        for v in 0..h.n() {
            if visited[v] {
                continue;
            }
            let chain = kempe_chain(h, phi, v, alpha, beta);
            for &w in &chain.vertices {
                visited[w] = true;
            }
            let a_count = chain
                .edge_ids
                .iter()
                .filter(|&&id| phi.color_of(id) == Some(alpha))
                .count();
            if 2 * a_count > chain.edge_ids.len() {
                switch_chain(h, phi, &chain);
                switched = true;
                break;
            }
        }
        assert!(switched, "some component must carry an excess edge");
    }
}

/// Number of vertices missing each color: the missing-class sizes.
pub fn missing_class_sizes(h: &Hypergraph, phi: &PartialEdgeColoring) -> Vec<usize> {
    (1..=phi.k() as Color)
        .map(|c| (0..h.n()).filter(|&v| phi.is_missing(v, c)).count())
        .collect()
}

/// The pair (gap, pair count): the largest difference between two
/// missing-class sizes and how many color pairs attain it.
pub fn missing_gap(sizes: &[usize]) -> (usize, usize) {
    let max = *sizes.iter().max().unwrap_or(&0);
    let min = *sizes.iter().min().unwrap_or(&0);
    let gap = max - min;
    if gap == 0 {
        return (0, 0);
    }
    let hi = sizes.iter().filter(|&&s| s == max).count();
    let lo = sizes.iter().filter(|&&s| s == min).count();
    (gap, hi * lo)
}

/// Rebalances the missing-color classes of a total edge coloring until
/// any two sizes differ by at most 5, while the edges of `f` keep
/// distinct colors. Requires `k >= max_degree`.
///
/// Each round picks two colors realizing the gap and switches a
/// two-color path whose ends both miss the larger color, skipping paths
/// through `f`. The potential (gap, number of extremal pairs) strictly
/// decreases lexicographically, which bounds the number of rounds.
pub fn balance_missing(
    h: &Hypergraph,
    phi: &mut PartialEdgeColoring,
    f: &[EdgeId],
) -> Result<(), EquitableError> {
    debug_assert!(phi.is_total(h));
    debug_assert!(phi.k() >= h.max_degree());
    if !crate::extension::is_rainbow(phi, f) {
        return Err(EquitableError::NotRainbow(f.to_vec()));
    }
    let mut sizes = missing_class_sizes(h, phi);
    let (mut gap, mut pairs) = missing_gap(&sizes);
    let mut budget = gap.saturating_mul(phi.k() * phi.k()) + 16;
    while gap >= 6 {
        if budget == 0 {
            return Err(EquitableError::MissingBalanceStalled { gap });
        }
        budget -= 1;
        let max = *sizes.iter().max().unwrap();
        let min = *sizes.iter().min().unwrap();
        let alpha = (sizes.iter().position(|&s| s == max).unwrap() + 1) as Color;
        let beta = (sizes.iter().position(|&s| s == min).unwrap() + 1) as Color;
        // Scan the vertices missing alpha; each sits at the end of at
        // most one (alpha, beta)-path. Take the first path whose other
        // end also misses alpha and which avoids f.
        let mut visited = vec![false; h.n()];
        let mut done = false;
        for x in 0..h.n() {
            if visited[x] || !phi.is_missing(x, alpha) {
                continue;
            }
            let chain = kempe_chain(h, phi, x, alpha, beta);
            for &w in &chain.vertices {
                visited[w] = true;
            }
            if chain.edge_ids.is_empty() || chain.contains_any_edge(f) {
                continue;
            }
            let ends = chain.end_vertices(h);
            let missing_alpha: Vec<usize> = ends
                .iter()
                .copied()
                .filter(|&v| phi.is_missing(v, alpha))
                .collect();
            if missing_alpha.len() == 2 {
                switch_chain(h, phi, &chain);
                done = true;
                break;
            }
        }
        if !done {
            return Err(EquitableError::MissingBalanceStalled { gap });
        }
        // Both ends of the switched path missed alpha and now miss beta;
        // interior vertices keep both colors.
        sizes[alpha as usize - 1] -= 2;
        sizes[beta as usize - 1] += 2;
        if h.n() <= 64 {
            debug_assert_eq!(sizes, missing_class_sizes(h, phi));
        }
        let (g2, p2) = missing_gap(&sizes);
        assert!(
            g2 < gap || (g2 == gap && p2 < pairs),
            "potential must decrease: ({gap},{pairs}) -> ({g2},{p2})"
        );
        gap = g2;
        pairs = p2;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::verify_edge_coloring;
    use crate::extension::{edge_color_graph, is_rainbow};
    use crate::graph::gen_gnp;

    fn check_equitable(g: &Graph, k: usize, colors: &[Color]) {
        for &(u, v) in g.edges() {
            assert_ne!(colors[u], colors[v]);
        }
        let mut size = vec![0usize; k];
        for &c in colors {
            size[(c - 1) as usize] += 1;
        }
        let max = size.iter().max().unwrap();
        let min = size.iter().min().unwrap();
        assert!(max - min <= 1, "sizes {size:?}");
    }

    #[test]
    fn equitable_on_empty_graph() {
        let g = Graph::empty(5);
        let colors = equitable_vertex_coloring(&g, 2).unwrap();
        check_equitable(&g, 2, &colors);
    }

    #[test]
    fn equitable_on_k4_with_four_classes() {
        let g = Graph::complete(4);
        let colors = equitable_vertex_coloring(&g, 4).unwrap();
        check_equitable(&g, 4, &colors);
    }

    #[test]
    fn equitable_on_random_graphs() {
        for seed in 0..10 {
            let g = gen_gnp(60, 0.2, 7000 + seed);
            let k = g.max_degree() + 1;
            let colors = equitable_vertex_coloring(&g, k).unwrap();
            check_equitable(&g, k, &colors);
        }
    }

    #[test]
    fn equitable_rejects_small_k() {
        let g = Graph::complete(4);
        assert!(matches!(
            equitable_vertex_coloring(&g, 3),
            Err(EquitableError::TooFewClasses { .. })
        ));
    }

    #[test]
    fn class_size_balancing_on_skewed_coloring() {
        // Path with 7 edges all colorable skewed: k=3 must end {3,2,2}.
        let g = Graph::from_edges(
            8,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)],
        )
        .unwrap();
        let h = Hypergraph::from_graph(&g);
        let mut phi = PartialEdgeColoring::new(&h, 3);
        // Alternate 1,2 along the path: sizes {4,3,0}.
        for id in 0..7 {
            phi.assign(&h, id, if id % 2 == 0 { 1 } else { 2 });
        }
        balance_class_sizes(&h, &mut phi);
        verify_edge_coloring(&h, &phi).unwrap();
        let mut sizes = class_sizes(&h, &phi);
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 3]);
    }

    #[test]
    fn class_size_balancing_even_split() {
        let g = Graph::cycle(6);
        let h = Hypergraph::from_graph(&g);
        let (h2, mut phi) = edge_color_graph(&g).unwrap();
        balance_class_sizes(&h2, &mut phi);
        verify_edge_coloring(&h2, &phi).unwrap();
        let sizes = class_sizes(&h2, &phi);
        assert_eq!(sizes.iter().sum::<usize>(), h.m());
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn missing_balance_on_skewed_matching() {
        // Ten disjoint edges, eight colored 1 and two colored 2: the
        // missing classes have sizes 4 and 16.
        let edges: Vec<(usize, usize)> = (0..10).map(|i| (2 * i, 2 * i + 1)).collect();
        let g = Graph::from_edges(20, edges).unwrap();
        let h = Hypergraph::from_graph(&g);
        let mut phi = PartialEdgeColoring::new(&h, 2);
        for id in 0..10 {
            phi.assign(&h, id, if id < 8 { 1 } else { 2 });
        }
        let (gap0, _) = missing_gap(&missing_class_sizes(&h, &phi));
        assert_eq!(gap0, 12);
        balance_missing(&h, &mut phi, &[]).unwrap();
        verify_edge_coloring(&h, &phi).unwrap();
        let (gap, _) = missing_gap(&missing_class_sizes(&h, &phi));
        assert!(gap <= 5, "gap {gap}");
    }

    #[test]
    fn missing_balance_preserves_rainbow_set() {
        for seed in 0..20 {
            let g = gen_gnp(24, 0.3, 8800 + seed);
            if g.m() == 0 {
                continue;
            }
            let (h, mut phi) = edge_color_graph(&g).unwrap();
            // One edge per color where available.
            let mut f: Vec<EdgeId> = Vec::new();
            for c in 1..=phi.k() as Color {
                if let Some(id) = h.live_edges().find(|&id| phi.color_of(id) == Some(c)) {
                    f.push(id);
                }
            }
            balance_missing(&h, &mut phi, &f).unwrap();
            verify_edge_coloring(&h, &phi).unwrap();
            assert!(is_rainbow(&phi, &f));
            let sizes = missing_class_sizes(&h, &phi);
            let (gap, _) = missing_gap(&sizes);
            assert!(gap <= 5, "gap {gap}");
            // Parity: every missing-class size has the parity of n.
            for s in sizes {
                assert_eq!(s % 2, h.n() % 2);
            }
        }
    }
}
