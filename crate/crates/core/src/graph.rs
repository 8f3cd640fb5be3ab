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

//! Simple undirected graphs with dense integer vertex ids, plus the
//! generators and text serialization used by the rest of the crate.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;

/// Normalizes an unordered vertex pair to `(min, max)`.
#[inline]
pub fn norm(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A simple undirected graph: no loops, no parallel edges, vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { v: u });
            }
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange {
                    v: u.max(v),
                    n,
                });
            }
            let e = norm(u, v);
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge { u: e.0, v: e.1 });
            }
            g.adj[u].push(v);
            g.adj[v].push(u);
            g.edges.push(e);
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(u, v)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.max_degree();
        if self.min_degree() == d {
            Some(d)
        } else {
            None
        }
    }

    /// The complement graph: `{u,v}` is an edge iff it is not one here.
    pub fn complement(&self) -> Graph {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(self.n, edges).expect("complement of a simple graph is simple")
    }

    /// The bipartite subgraph induced by a partition: only edges with one
    /// end in each part are retained.
    pub fn induced_bipartite(&self, p: &Bipartition) -> Result<Graph, GraphError> {
        p.check(self.n)?;
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| p.side(u) != p.side(v));
        Graph::from_edges(self.n, edges)
    }

    /// The subgraph induced on one side of a partition, keeping the full
    /// vertex id space.
    pub fn induced_side(&self, p: &Bipartition, side: Side) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| p.side(u) == side && p.side(v) == side);
        Graph::from_edges(self.n, edges).expect("subgraph of simple graph")
    }
}

/// Which part of a [`Bipartition`] a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// A two-part vertex partition `A ∪ B` of `0..n`.
#[derive(Clone, Debug)]
pub struct Bipartition {
    sides: Vec<Side>,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, a_set: &HashSet<usize>) -> Self {
        let mut sides = Vec::with_capacity(n);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for v in 0..n {
            if a_set.contains(&v) {
                sides.push(Side::A);
                a.push(v);
            } else {
                sides.push(Side::B);
                b.push(v);
            }
        }
        Bipartition { sides, a, b }
    }

    pub fn from_sides(sides: Vec<Side>) -> Self {
        let a = (0..sides.len()).filter(|&v| sides[v] == Side::A).collect();
        let b = (0..sides.len()).filter(|&v| sides[v] == Side::B).collect();
        Bipartition { sides, a, b }
    }

    pub fn n(&self) -> usize {
        self.sides.len()
    }

    pub fn side(&self, v: usize) -> Side {
        self.sides[v]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn part(&self, side: Side) -> &[usize] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    fn check(&self, n: usize) -> Result<(), GraphError> {
        if self.sides.len() != n {
            return Err(GraphError::InvalidPartition {
                reason: format!("partition covers {} vertices, graph has {}", self.sides.len(), n),
            });
        }
        Ok(())
    }

    /// Degree of `v` into part A and into part B of `g`.
    pub fn degrees_into(&self, g: &Graph, v: usize) -> (usize, usize) {
        let mut da = 0;
        let mut db = 0;
        for &w in g.neighbors(v) {
            match self.side(w) {
                Side::A => da += 1,
                Side::B => db += 1,
            }
        }
        (da, db)
    }
}

/// Generates a simple `r`-regular graph on `n` vertices via the pairing
/// model with swap repair. Deterministic for a fixed seed.
pub fn gen_random_regular(n: usize, r: usize, seed: u64) -> Result<Graph, GraphError> {
    if r >= n || (n * r) % 2 != 0 {
        return Err(GraphError::InfeasibleRegular { n, r });
    }
    if r == 0 {
        return Ok(Graph::empty(n));
    }
    // Dense side is easier to hit through the complement.
    if r > n / 2 && n >= 2 {
        let comp = gen_random_regular(n, n - 1 - r, seed)?;
        return Ok(comp.complement());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7265_6775_6c61_72);
    for _attempt in 0..60 {
        if let Some(g) = pairing_attempt(n, r, &mut rng) {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed { n, r })
}

fn pairing_attempt(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Option<Graph> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(r)).collect();
    points.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = points.chunks(2).map(|c| norm(c[0], c[1])).collect();
    // Swap repair: resolve loops and duplicates by crossing with a random
    // other pair.
    let mut budget = 20 * n * r + 200;
    loop {
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut bad: Vec<usize> = Vec::new();
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if u == v || !seen.insert((u, v)) {
                bad.push(i);
            }
        }
        if bad.is_empty() {
            return Graph::from_edges(n, pairs).ok();
        }
        for i in bad {
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let j = rng.gen_range(0..pairs.len());
            if j == i {
                continue;
            }
            let (u, v) = pairs[i];
            let (a, b) = pairs[j];
            // Cross (u,v),(a,b) -> (u,a),(v,b) when that removes the defect.
            if u != a && v != b && u != b && v != a {
                pairs[i] = norm(u, a);
                pairs[j] = norm(v, b);
            }
        }
    }
}

/// Generates an Erdős–Rényi `G(n, p)` graph, used only by tests and the
/// benchmark harness for mixed-density instances.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x676e_70);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("gnp edges are simple")
}

/// Parses the text graph format: header `p <n> <m>`, edge lines `e <u> <v>`,
/// comment lines starting with `c`.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let fields: Vec<&str> = parts.collect();
        match tag {
            "p" => {
                if header.is_some() || fields.len() != 2 {
                    return Err(GraphError::Malformed {
                        line: lineno + 1,
                        content: raw.to_string(),
                    });
                }
                let n = fields[0].parse().map_err(|_| GraphError::Malformed {
                    line: lineno + 1,
                    content: raw.to_string(),
                })?;
                let m = fields[1].parse().map_err(|_| GraphError::Malformed {
                    line: lineno + 1,
                    content: raw.to_string(),
                })?;
                header = Some((n, m));
            }
            "e" => {
                if header.is_none() || fields.len() != 2 {
                    return Err(GraphError::Malformed {
                        line: lineno + 1,
                        content: raw.to_string(),
                    });
                }
                let u = fields[0].parse().map_err(|_| GraphError::Malformed {
                    line: lineno + 1,
                    content: raw.to_string(),
                })?;
                let v = fields[1].parse().map_err(|_| GraphError::Malformed {
                    line: lineno + 1,
                    content: raw.to_string(),
                })?;
                edges.push((u, v));
            }
            _ => {
                return Err(GraphError::Malformed {
                    line: lineno + 1,
                    content: raw.to_string(),
                })
            }
        }
    }
    let (n, m) = header.ok_or(GraphError::MissingHeader)?;
    if edges.len() != m {
        return Err(GraphError::EdgeCountMismatch {
            declared: m,
            actual: edges.len(),
        });
    }
    Graph::from_edges(n, edges)
}

/// Serializes a graph in the same text format `parse_graph` reads.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p {} {}", g.n(), g.m()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "e {} {}", u, v).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_complete_is_empty() {
        let g = Graph::complete(4);
        assert_eq!(g.complement().m(), 0);
    }

    #[test]
    fn complement_of_empty_is_complete() {
        let g = Graph::empty(3);
        assert_eq!(g.complement(), Graph::complete(3));
    }

    #[test]
    fn complement_of_c5_is_a_five_cycle() {
        // Oracle: enumerate all 10 pairs and check membership directly.
        let g = Graph::cycle(5);
        let c = g.complement();
        for u in 0..5 {
            for v in u + 1..5 {
                assert_eq!(c.has_edge(u, v), !g.has_edge(u, v));
            }
        }
        assert_eq!(c.is_regular(), Some(2));
        assert_eq!(c.m(), 5);
    }

    #[test]
    fn induced_bipartite_path() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let p = Bipartition::new(3, &HashSet::from([0, 2]));
        let q = g.induced_bipartite(&p).unwrap();
        assert_eq!(q.m(), 2);
    }

    #[test]
    fn induced_bipartite_k4_even_split() {
        let g = Graph::complete(4);
        let p = Bipartition::new(4, &HashSet::from([0, 1]));
        // 6 edges minus the two intra-part edges.
        assert_eq!(g.induced_bipartite(&p).unwrap().m(), 4);
    }

    #[test]
    fn induced_bipartite_triangle() {
        let g = Graph::complete(3);
        let p = Bipartition::new(3, &HashSet::from([0]));
        let q = g.induced_bipartite(&p).unwrap();
        assert!(q.has_edge(0, 1) && q.has_edge(0, 2) && !q.has_edge(1, 2));
    }

    #[test]
    fn regular_gen_k4() {
        let g = gen_random_regular(4, 3, 7).unwrap();
        assert_eq!(g, Graph::complete(4));
    }

    #[test]
    fn regular_gen_two_regular_is_cycle_cover() {
        let g = gen_random_regular(6, 2, 3).unwrap();
        assert_eq!(g.is_regular(), Some(2));
        assert_eq!(g.m(), 6);
    }

    #[test]
    fn regular_gen_odd_degree_sum_rejected() {
        assert!(matches!(
            gen_random_regular(5, 3, 0),
            Err(GraphError::InfeasibleRegular { .. })
        ));
    }

    #[test]
    fn regular_gen_deterministic_and_valid() {
        for seed in 0..20 {
            let g = gen_random_regular(20, 7, seed).unwrap();
            assert_eq!(g.is_regular(), Some(7), "seed {seed}");
            assert_eq!(g, gen_random_regular(20, 7, seed).unwrap());
        }
        // Dense side through the complement path.
        let g = gen_random_regular(30, 21, 5).unwrap();
        assert_eq!(g.is_regular(), Some(21));
    }

    #[test]
    fn parse_round_trip() {
        let g = parse_graph("c a path\np 3 2\ne 0 1\ne 1 2\n").unwrap();
        assert_eq!(g.m(), 2);
        let g2 = parse_graph(&serialize_graph(&g)).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn serialize_k3_header() {
        let text = serialize_graph(&Graph::complete(3));
        assert!(text.starts_with("p 3 3\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn parse_rejects_self_loop() {
        assert!(matches!(
            parse_graph("p 2 1\ne 0 0\n"),
            Err(GraphError::SelfLoop { .. })
        ));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_graph("p 2 1\nq 0 1\n").is_err());
        assert!(parse_graph("e 0 1\n").is_err());
        assert!(parse_graph("p 2 2\ne 0 1\n").is_err());
        assert!(matches!(
            parse_graph("p 2 1\ne 0 5\n"),
            Err(GraphError::OutOfRange { .. })
        ));
        assert!(matches!(
            parse_graph("p 3 2\ne 0 1\ne 1 0\n"),
            Err(GraphError::DuplicateEdge { .. })
        ));
    }
}
