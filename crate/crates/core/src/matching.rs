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

//! Matching machinery: maximum matching via blossom contraction,
//! bipartite perfect matching with a Hall-violator witness, and the two
//! complement-matching guarantees the dense pipeline consumes.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{norm, Bipartition, Graph, Side};

const NONE: usize = usize::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("no perfect matching; Hall violator {witness:?} has a smaller neighborhood")]
    NoPerfectMatching { witness: Vec<usize> },
    #[error("complement matching covers {covered} vertices, need {required}")]
    CoverageShortfall { covered: usize, required: usize },
    #[error("graph is not regular")]
    NotRegular,
}

/// Normalized, sorted pair list from a mate array.
fn pairs_from_mates(mate: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..mate.len())
        .filter(|&v| mate[v] != NONE && v < mate[v])
        .map(|v| (v, mate[v]))
        .collect();
    out.sort_unstable();
    out
}

/// Maximum-cardinality matching by augmenting paths with blossom
/// contraction. Returns normalized vertex pairs.
pub fn max_matching(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut mate = vec![NONE; n];
    // Greedy warm start saves most augmentation rounds.
    for v in 0..n {
        if mate[v] == NONE {
            for &w in g.neighbors(v) {
                if mate[w] == NONE {
                    mate[v] = w;
                    mate[w] = v;
                    break;
                }
            }
        }
    }
    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        if let Some((endpoint, parents)) = find_augmenting_path(g, root, &mate) {
            // Flip matched/unmatched along the stored parent links.
            let mut v = endpoint;
            while v != NONE {
                let pv = parents[v];
                let ppv = mate[pv];
                mate[v] = pv;
                mate[pv] = v;
                v = ppv;
            }
        }
    }
    pairs_from_mates(&mate)
}

/// Walks from `a` up to the blossom base, marking contracted bases and
/// rethreading parent links through `child` so later augmentations can
/// traverse the odd cycle either way.
fn mark_blossom_path(
    mut a: usize,
    mut child: usize,
    cur_base: usize,
    mate: &[usize],
    base: &[usize],
    parent: &mut [usize],
    blossom: &mut [bool],
) {
    while base[a] != cur_base {
        blossom[base[a]] = true;
        blossom[base[mate[a]]] = true;
        parent[a] = child;
        child = mate[a];
        a = parent[mate[a]];
    }
}

/// BFS forest search from an exposed root; contracts blossoms by
/// collapsing bases. Returns the exposed endpoint of an augmenting path
/// together with the parent links needed to flip it.
fn find_augmenting_path(g: &Graph, root: usize, mate: &[usize]) -> Option<(usize, Vec<usize>)> {
    let n = g.n();
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    used[root] = true;
    let mut q = VecDeque::new();
    q.push_back(root);

    let lca = |a: usize, b: usize, base: &[usize], parent: &[usize]| -> usize {
        let mut seen = vec![false; n];
        let mut cur = a;
        loop {
            cur = base[cur];
            seen[cur] = true;
            if mate[cur] == NONE {
                break;
            }
            cur = parent[mate[cur]];
        }
        let mut cur = b;
        while !seen[base[cur]] {
            cur = parent[mate[cur]];
        }
        base[cur]
    };

    while let Some(v) = q.pop_front() {
        for &to in g.neighbors(v) {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                // Odd cycle through two even-level vertices: contract it.
                let cur_base = lca(v, to, &base, &parent);
                let mut blossom = vec![false; n];
                mark_blossom_path(v, to, cur_base, mate, &base, &mut parent, &mut blossom);
                mark_blossom_path(to, v, cur_base, mate, &base, &mut parent, &mut blossom);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur_base;
                        if !used[i] {
                            used[i] = true;
                            q.push_back(i);
                        }
                    }
                }
            } else if parent[to] == NONE {
                parent[to] = v;
                if mate[to] == NONE {
                    return Some((to, parent));
                }
                used[mate[to]] = true;
                q.push_back(mate[to]);
            }
        }
    }
    None
}

/// Perfect matching in a bipartite graph via Hopcroft–Karp. On failure
/// the error carries a Hall violator: a side-A vertex set whose joint
/// neighborhood is strictly smaller.
pub fn bipartite_perfect_matching(
    g: &Graph,
    bip: &Bipartition,
) -> Result<Vec<(usize, usize)>, MatchingError> {
    let n = g.n();
    let a: Vec<usize> = (0..n).filter(|&v| bip.side(v) == Side::A).collect();
    let mut mate = vec![NONE; n];

    // Hopcroft–Karp: batches of shortest augmenting paths.
    loop {
        // BFS layering from exposed A-vertices.
        let mut dist = vec![NONE; n];
        let mut q = VecDeque::new();
        for &u in &a {
            if mate[u] == NONE {
                dist[u] = 0;
                q.push_back(u);
            }
        }
        let mut reachable_exposed = false;
        while let Some(u) = q.pop_front() {
            for &w in g.neighbors(u) {
                if bip.side(w) == Side::A {
                    continue;
                }
                let next = mate[w];
                if next == NONE {
                    reachable_exposed = true;
                } else if dist[next] == NONE {
                    dist[next] = dist[u] + 1;
                    q.push_back(next);
                }
            }
        }
        if !reachable_exposed {
            break;
        }
        // Layered DFS augmentation.
        fn try_augment(
            g: &Graph,
            bip: &Bipartition,
            u: usize,
            mate: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for i in 0..g.neighbors(u).len() {
                let w = g.neighbors(u)[i];
                if bip.side(w) == Side::A {
                    continue;
                }
                let next = mate[w];
                if next == NONE
                    || (dist[next] == dist[u].wrapping_add(1)
                        && try_augment(g, bip, next, mate, dist))
                {
                    mate[u] = w;
                    mate[w] = u;
                    return true;
                }
            }
            dist[u] = NONE;
            false
        }
        for &u in &a {
            if mate[u] == NONE {
                try_augment(g, bip, u, &mut mate, &mut dist);
            }
        }
    }

    let exposed: Vec<usize> = (0..n).filter(|&v| mate[v] == NONE).collect();
    if exposed.is_empty() {
        return Ok(pairs_from_mates(&mate));
    }
    // Hall violator: A-vertices alternating-reachable from an exposed
    // A-vertex (if any); their joint neighborhood is fully matched into
    // a strictly smaller set.
    let Some(&start) = exposed.iter().find(|&&v| bip.side(v) == Side::A) else {
        // Only B-vertices exposed: sides have unequal usable size; the
        // violator is all of A's matched partners... report whole A side.
        return Err(MatchingError::NoPerfectMatching { witness: a });
    };
    let mut in_s = vec![false; n];
    in_s[start] = true;
    let mut q = VecDeque::from([start]);
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if bip.side(w) == Side::A {
                continue;
            }
            let next = mate[w];
            if next != NONE && !in_s[next] {
                in_s[next] = true;
                q.push_back(next);
            }
        }
    }
    let witness: Vec<usize> = (0..n).filter(|&v| in_s[v]).collect();
    Err(MatchingError::NoPerfectMatching { witness })
}

/// The ceiling of `n * (n - r - 1) / (n - r)`: minimum number of
/// vertices any maximum matching of the complement of an r-regular
/// graph must cover (0 when the complement is empty).
pub fn complement_coverage_bound(n: usize, r: usize) -> usize {
    if r + 1 >= n {
        return 0;
    }
    let num = n * (n - r - 1);
    let den = n - r;
    (num + den - 1) / den
}

/// Maximum matching of the complement of an r-regular graph, verified
/// against the coverage guarantee `n - n/(n-r)`.
pub fn complement_matching(g: &Graph) -> Result<Vec<(usize, usize)>, MatchingError> {
    if g.is_regular().is_none() {
        return Err(MatchingError::NotRegular);
    }
    let n = g.n();
    let r = g.max_degree();
    let m = max_matching(&g.complement());
    let covered = 2 * m.len();
    let required = complement_coverage_bound(n, r);
    if covered < required {
        return Err(MatchingError::CoverageShortfall { covered, required });
    }
    Ok(m)
}

/// A matching of the complement covering exactly n-2 vertices (n even)
/// or n-3 (n odd), trimmed from a maximum complement matching by
/// dropping lexicographically largest edges first.
pub fn spine_matching(g: &Graph) -> Result<Vec<(usize, usize)>, MatchingError> {
    let mut m = complement_matching(g)?;
    let n = g.n();
    let target = if n % 2 == 0 { n - 2 } else { n - 3 };
    let covered = 2 * m.len();
    if covered < target {
        return Err(MatchingError::CoverageShortfall { covered, required: target });
    }
    m.sort_unstable();
    m.truncate(target / 2);
    Ok(m)
}

/// True when the pairs form a matching inside `g`.
pub fn is_graph_matching(g: &Graph, m: &[(usize, usize)]) -> bool {
    let mut used = vec![false; g.n()];
    for &(u, v) in m {
        if !g.has_edge(u, v) || used[u] || used[v] {
            return false;
        }
        used[u] = true;
        used[v] = true;
    }
    true
}

/// Vertices covered by a pair matching, sorted.
pub fn covered_vertices(m: &[(usize, usize)]) -> Vec<usize> {
    let mut out: Vec<usize> = m.iter().flat_map(|&(u, v)| [u, v]).collect();
    out.sort_unstable();
    out
}

/// Normalizes and sorts a pair list.
pub fn normalize_pairs(m: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = m.iter().map(|&(u, v)| norm(u, v)).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_gnp;
    use crate::oracle::brute_force_max_matching;
    use std::collections::HashSet;

    #[test]
    fn max_matching_matches_oracle_exhaustively() {
        // Every graph on 5 vertices.
        let all_pairs: Vec<(usize, usize)> =
            (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << all_pairs.len()) {
            let edges: Vec<(usize, usize)> = all_pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::from_edges(5, edges).unwrap();
            let m = max_matching(&g);
            assert!(is_graph_matching(&g, &m));
            assert_eq!(m.len(), brute_force_max_matching(&g), "mask {mask}");
        }
    }

    #[test]
    fn max_matching_matches_oracle_on_random_graphs() {
        for seed in 0..300 {
            let n = 6 + (seed as usize % 7);
            let p = 0.15 + 0.1 * (seed % 7) as f64;
            let g = gen_gnp(n, p, 90_000 + seed);
            let m = max_matching(&g);
            assert!(is_graph_matching(&g, &m));
            assert_eq!(m.len(), brute_force_max_matching(&g), "seed {seed}");
        }
    }

    #[test]
    fn perfect_matchings_in_k33_and_c6() {
        let k33 = Graph::from_edges(
            6,
            [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        )
        .unwrap();
        let bip = Bipartition::new(6, &HashSet::from([0, 1, 2]));
        let m = bipartite_perfect_matching(&k33, &bip).unwrap();
        assert_eq!(m.len(), 3);
        assert!(is_graph_matching(&k33, &m));

        let c6 = Graph::cycle(6);
        let bip = Bipartition::new(6, &HashSet::from([0, 2, 4]));
        let m = bipartite_perfect_matching(&c6, &bip).unwrap();
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn hall_witness_on_star() {
        // K_{1,3} split {center, leaf} vs {leaf, leaf}: two A-leaves see
        // only the center.
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let bip = Bipartition::new(4, &HashSet::from([0, 1]));
        let err = bipartite_perfect_matching(&star, &bip).unwrap_err();
        let MatchingError::NoPerfectMatching { witness } = err else {
            panic!("expected Hall witness");
        };
        // The witness must actually violate Hall's condition over the
        // cross edges of the partition.
        let nbhd: HashSet<usize> = witness
            .iter()
            .flat_map(|&v| star.neighbors(v).iter().copied())
            .filter(|&w| bip.side(w) == Side::B)
            .collect();
        assert!(nbhd.len() < witness.len(), "{witness:?} -> {nbhd:?}");
    }

    #[test]
    fn complement_matching_of_c5() {
        // The complement of C5 is again a 5-cycle: max matching covers 4,
        // and the bound requires ceil(5 * 2 / 3) = 4.
        let g = Graph::cycle(5);
        let m = complement_matching(&g).unwrap();
        assert_eq!(2 * m.len(), 4);
        assert_eq!(complement_coverage_bound(5, 2), 4);
        assert!(is_graph_matching(&g.complement(), &m));
    }

    #[test]
    fn complement_matching_of_complete_graph_is_empty() {
        let g = Graph::complete(6);
        let m = complement_matching(&g).unwrap();
        assert!(m.is_empty());
        assert_eq!(complement_coverage_bound(6, 5), 0);
    }

    #[test]
    fn spine_matching_parity_targets() {
        // n even: complement of C6 has a perfect matching; spine keeps
        // n-2 = 4 covered.
        let m = spine_matching(&Graph::cycle(6)).unwrap();
        assert_eq!(2 * m.len(), 4);
        // n odd: complement of C5 covers 4 = n-1; spine trims to n-3 = 2.
        let m = spine_matching(&Graph::cycle(5)).unwrap();
        assert_eq!(2 * m.len(), 2);
    }

    #[test]
    fn spine_matching_on_random_regular_graphs() {
        for (n, r, seed) in [(12, 4, 1u64), (16, 6, 2), (15, 4, 3), (20, 8, 4), (21, 10, 5)] {
            let g = crate::graph::gen_random_regular(n, r, seed).unwrap();
            let m = spine_matching(&g).unwrap();
            let target = if n % 2 == 0 { n - 2 } else { n - 3 };
            assert_eq!(2 * m.len(), target);
            assert!(is_graph_matching(&g.complement(), &m));
        }
    }
}
