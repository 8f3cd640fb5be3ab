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

//! Brute-force reference implementations, used only to validate the fast
//! algorithms on small instances.

use crate::coloring::PartialEdgeColoring;
use crate::graph::Graph;
use crate::hypergraph::EdgeId;

/// Size of a maximum matching by exhaustive branching over the lowest
/// unmatched vertex. Exponential; intended for n <= 14 or so.
pub fn brute_force_max_matching(g: &Graph) -> usize {
    fn rec(g: &Graph, v: usize, used: &mut [bool]) -> usize {
        if v == g.n() {
            return 0;
        }
        if used[v] {
            return rec(g, v + 1, used);
        }
        // Leave v unmatched.
        let mut best = rec(g, v + 1, used);
        used[v] = true;
        for &w in g.neighbors(v) {
            if !used[w] {
                used[w] = true;
                best = best.max(1 + rec(g, v + 1, used));
                used[w] = false;
            }
        }
        used[v] = false;
        best
    }
    rec(g, 0, &mut vec![false; g.n()])
}

/// Exceeded the search cap without finding a coloring.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no total coloring found with at most {cap} colors")]
pub struct CapExceeded {
    pub cap: usize,
}

/// The exact total chromatic number by backtracking on the total graph
/// (vertices and edges of `g` as elements, adjacent when they touch),
/// trying k = max_degree+1 upward until `cap`. Exponential; intended for
/// n <= 8.
pub fn brute_force_total_chromatic(g: &Graph, cap: usize) -> Result<usize, CapExceeded> {
    let n = g.n();
    let m = g.m();
    if n == 0 {
        return Ok(0);
    }
    // Elements 0..n are vertices, n..n+m are edges.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let e = n + i;
        adj[u].push(v);
        adj[v].push(u);
        adj[u].push(e);
        adj[e].push(u);
        adj[v].push(e);
        adj[e].push(v);
        for (j, &(a, b)) in g.edges().iter().enumerate().skip(i + 1) {
            if a == u || a == v || b == u || b == v {
                let f = n + j;
                adj[e].push(f);
                adj[f].push(e);
            }
        }
    }
    // Static order: highest element degree first, for earlier pruning.
    let mut order: Vec<usize> = (0..n + m).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(adj[i].len()));

    fn color_with(
        adj: &[Vec<usize>],
        order: &[usize],
        k: usize,
        pos: usize,
        colors: &mut [usize],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let el = order[pos];
        let mut banned = vec![false; k + 1];
        let mut max_used = 0;
        for &o in order[..pos].iter() {
            max_used = max_used.max(colors[o]);
        }
        for &nb in &adj[el] {
            if colors[nb] != 0 {
                banned[colors[nb]] = true;
            }
        }
        // Symmetry break: never skip more than one fresh color.
        let top = k.min(max_used + 1);
        for c in 1..=top {
            if banned[c] {
                continue;
            }
            colors[el] = c;
            if color_with(adj, order, k, pos + 1, colors) {
                return true;
            }
            colors[el] = 0;
        }
        false
    }

    let lower = g.max_degree() + 1;
    for k in lower..=cap {
        let mut colors = vec![0usize; n + m];
        if color_with(&adj, &order, k, 0, &mut colors) {
            return Ok(k);
        }
    }
    Err(CapExceeded { cap })
}

/// True iff every listed edge is colored and no color repeats. Kept
/// independent of the extension machinery so it can check its outputs.
pub fn verify_rainbow(phi: &PartialEdgeColoring, f: &[EdgeId]) -> bool {
    let Some(mut colors) = f
        .iter()
        .map(|&id| phi.color_of(id))
        .collect::<Option<Vec<_>>>()
    else {
        return false;
    };
    colors.sort_unstable();
    colors.windows(2).all(|w| w[0] != w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_sizes_on_known_graphs() {
        assert_eq!(brute_force_max_matching(&Graph::complete(4)), 2);
        assert_eq!(brute_force_max_matching(&Graph::complete(5)), 2);
        assert_eq!(brute_force_max_matching(&Graph::cycle(5)), 2);
        assert_eq!(brute_force_max_matching(&Graph::cycle(6)), 3);
        // Star: center can only be matched once.
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(brute_force_max_matching(&star), 1);
    }

    #[test]
    fn total_chromatic_of_small_graphs() {
        // K2: two vertices and one edge, pairwise adjacent in the total
        // graph, so three colors are necessary and sufficient.
        let k2 = Graph::complete(2);
        assert_eq!(brute_force_total_chromatic(&k2, 5), Ok(3));
        // Cycles: C5 needs 4, C6 needs 3 (degree 2 in both cases).
        assert_eq!(brute_force_total_chromatic(&Graph::cycle(5), 6), Ok(4));
        assert_eq!(brute_force_total_chromatic(&Graph::cycle(6), 6), Ok(3));
        // K4 is total-colorable with 5 colors.
        assert_eq!(brute_force_total_chromatic(&Graph::complete(4), 6), Ok(5));
    }

    #[test]
    fn rainbow_checks() {
        use crate::hypergraph::Hypergraph;
        let h = Hypergraph::from_edges(4, [vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let mut phi = PartialEdgeColoring::new(&h, 3);
        assert!(verify_rainbow(&phi, &[]));
        assert!(!verify_rainbow(&phi, &[0]), "uncolored member");
        phi.assign(&h, 0, 1);
        phi.assign(&h, 2, 1);
        phi.assign(&h, 1, 2);
        assert!(verify_rainbow(&phi, &[0, 1]));
        assert!(!verify_rainbow(&phi, &[0, 2]), "repeated color");
    }

    #[test]
    fn total_chromatic_cap_exceeded() {
        let c5 = Graph::cycle(5);
        assert_eq!(
            brute_force_total_chromatic(&c5, 3),
            Err(CapExceeded { cap: 3 })
        );
    }
}
