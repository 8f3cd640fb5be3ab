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

//! Degree-balanced bipartition that splits designated vertex pairs: equal
//! halves, one vertex of each pair per side, and every vertex sees both
//! sides almost equally.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Bipartition, Graph, Side};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no balanced partition found; best attempt has max imbalance {max_imbalance} (threshold {threshold})")]
    RetryExhausted {
        best: Bipartition,
        max_imbalance: usize,
        threshold: usize,
    },
}

/// The per-vertex imbalance threshold: floor((|V|/2)^(2/3)). The floor
/// makes the check conservative at integer boundaries.
pub fn imbalance_threshold(n_vertices: usize) -> usize {
    ((n_vertices as f64 / 2.0).powf(2.0 / 3.0)).floor() as usize
}

/// Signed imbalance of every vertex: (neighbors in A) - (neighbors in B).
fn imbalances(q: &Graph, side: &[Side]) -> Vec<i64> {
    (0..q.n())
        .map(|v| {
            let mut i = 0i64;
            for &w in q.neighbors(v) {
                i += if side[w] == Side::A { 1 } else { -1 };
            }
            i
        })
        .collect()
}

fn potential(imb: &[i64], t: i64) -> i64 {
    imb.iter()
        .map(|&i| {
            let over = i.abs() - t;
            if over > 0 { over * over } else { 0 }
        })
        .sum()
}

/// Partitions the vertices of `q` into equal halves A and B such that
/// every designated pair is split between the sides and every vertex has
/// `|d_A(v) - d_B(v)|` at most `floor((|V|/2)^(2/3))`.
///
/// Randomized: one coin per pair, leftover vertices paired up arbitrarily,
/// then a local search that flips whole pairs while the clamped quadratic
/// excess decreases; up to 20 seeded restarts.
pub fn balanced_partition(
    q: &Graph,
    pairs: &[(usize, usize)],
    seed: u64,
) -> Result<Bipartition, PartitionError> {
    let n = q.n();
    if n % 2 != 0 {
        return Err(PartitionError::Invalid(format!("odd vertex count {n}")));
    }
    let mut in_pair = vec![false; n];
    for &(x, y) in pairs {
        if x >= n || y >= n {
            return Err(PartitionError::Invalid(format!("pair ({x}, {y}) out of range")));
        }
        if x == y || in_pair[x] || in_pair[y] {
            return Err(PartitionError::Invalid("pairs are not disjoint".into()));
        }
        in_pair[x] = true;
        in_pair[y] = true;
    }
    let unpaired: Vec<usize> = (0..n).filter(|&v| !in_pair[v]).collect();
    let t = imbalance_threshold(n) as i64;

    let mut best: Option<(usize, Vec<Side>)> = None;
    for restart in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart.wrapping_mul(0x9e37_79b9)));
        let mut side = vec![Side::A; n];
        // One coin per designated pair.
        let mut flip_pairs: Vec<(usize, usize)> = pairs.to_vec();
        // Leftover vertices are paired up arbitrarily so that every
        // repair move is a whole-pair flip preserving (i) and (ii).
        let mut rest = unpaired.clone();
        rest.shuffle(&mut rng);
        for chunk in rest.chunks(2) {
            if let [x, y] = *chunk {
                flip_pairs.push((x, y));
            }
        }
        for &(x, y) in &flip_pairs {
            if rng.gen_bool(0.5) {
                side[x] = Side::A;
                side[y] = Side::B;
            } else {
                side[x] = Side::B;
                side[y] = Side::A;
            }
        }

        let mut imb = imbalances(q, &side);
        let mut phi = potential(&imb, t);
        let mut budget = 40 * n + 400;
        while phi > 0 && budget > 0 {
            budget -= 1;
            // Find the pair flip with the best improvement.
            let mut best_move: Option<(usize, i64)> = None;
            for (pi, &(x, y)) in flip_pairs.iter().enumerate() {
                // Flipping (x, y) changes I_w by -2 sign(x side) for
                // w ~ x and -2 sign(y side) for w ~ y.
                let dx: i64 = if side[x] == Side::A { -2 } else { 2 };
                let dy: i64 = if side[y] == Side::A { -2 } else { 2 };
                let mut delta = 0i64;
                let excess = |i: i64| -> i64 {
                    let over = i.abs() - t;
                    if over > 0 { over * over } else { 0 }
                };
                for &w in q.neighbors(x) {
                    let adj = if w == y { dx + dy } else { dx };
                    // w adjacent to both x and y is handled when seen
                    // from x; skip it from y's loop below.
                    delta += excess(imb[w] + adj) - excess(imb[w]);
                }
                for &w in q.neighbors(y) {
                    if w == x || q.has_edge(w, x) {
                        continue;
                    }
                    delta += excess(imb[w] + dy) - excess(imb[w]);
                }
                // w adjacent to both: add the joint effect.
                for &w in q.neighbors(x) {
                    if w != y && q.has_edge(w, y) {
                        delta += excess(imb[w] + dx + dy) - excess(imb[w] + dx);
                    }
                }
                if delta < best_move.map_or(0, |(_, d)| d) {
                    best_move = Some((pi, delta));
                }
            }
            let Some((pi, _)) = best_move else { break };
            let (x, y) = flip_pairs[pi];
            let dx: i64 = if side[x] == Side::A { -2 } else { 2 };
            let dy: i64 = if side[y] == Side::A { -2 } else { 2 };
            for &w in q.neighbors(x) {
                imb[w] += dx;
            }
            for &w in q.neighbors(y) {
                imb[w] += dy;
            }
            side[x] = side[x].other();
            side[y] = side[y].other();
            phi = potential(&imb, t);
        }
        let max_imb = imb.iter().map(|&i| i.unsigned_abs() as usize).max().unwrap_or(0);
        if phi == 0 {
            debug_assert!(max_imb <= t as usize);
            return Ok(Bipartition::from_sides(side));
        }
        if best.as_ref().map_or(true, |(b, _)| max_imb < *b) {
            best = Some((max_imb, side));
        }
    }
    let (max_imbalance, side) = best.expect("at least one restart ran");
    Err(PartitionError::RetryExhausted {
        best: Bipartition::from_sides(side),
        max_imbalance,
        threshold: t as usize,
    })
}

/// Checks properties (i)-(iii) of a candidate partition; returns the
/// first failure as text.
pub fn validate_partition(
    q: &Graph,
    pairs: &[(usize, usize)],
    bip: &Bipartition,
) -> Result<(), String> {
    if bip.a().len() != bip.b().len() {
        return Err(format!("|A| = {} but |B| = {}", bip.a().len(), bip.b().len()));
    }
    for &(x, y) in pairs {
        if bip.side(x) == bip.side(y) {
            return Err(format!("pair ({x}, {y}) on one side"));
        }
    }
    let t = imbalance_threshold(q.n()) as i64;
    for (v, &i) in imbalances(q, sides_of(bip)).iter().enumerate() {
        if i.abs() > t {
            return Err(format!("vertex {v} imbalance {} exceeds {t}", i.abs()));
        }
    }
    Ok(())
}

fn sides_of(bip: &Bipartition) -> &[Side] {
    bip.sides()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random_regular, Graph};

    #[test]
    fn empty_graph_splits_evenly() {
        let q = Graph::empty(10);
        let pairs = [(0, 1), (2, 3)];
        let bip = balanced_partition(&q, &pairs, 7).unwrap();
        validate_partition(&q, &pairs, &bip).unwrap();
    }

    #[test]
    fn matching_on_the_pairs_is_trivially_balanced() {
        let pairs: Vec<(usize, usize)> = (0..5).map(|i| (2 * i, 2 * i + 1)).collect();
        let q = Graph::from_edges(10, pairs.clone()).unwrap();
        let bip = balanced_partition(&q, &pairs, 3).unwrap();
        validate_partition(&q, &pairs, &bip).unwrap();
    }

    #[test]
    fn dense_regular_instances_balance() {
        // Graph on 2n vertices, 0.6*(2n)-regular, pairs covering all.
        for (nv, seed) in [(100usize, 5u64), (200, 6)] {
            let r = (6 * nv) / 10;
            let q = gen_random_regular(nv, r, seed).unwrap();
            let pairs: Vec<(usize, usize)> = (0..nv / 2).map(|i| (2 * i, 2 * i + 1)).collect();
            let bip = balanced_partition(&q, &pairs, seed).unwrap();
            validate_partition(&q, &pairs, &bip).unwrap();
        }
    }

    #[test]
    fn rejects_overlapping_pairs() {
        let q = Graph::empty(4);
        assert!(matches!(
            balanced_partition(&q, &[(0, 1), (1, 2)], 0),
            Err(PartitionError::Invalid(_))
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let q = gen_random_regular(40, 20, 9).unwrap();
        let pairs: Vec<(usize, usize)> = (0..10).map(|i| (2 * i, 2 * i + 1)).collect();
        let b1 = balanced_partition(&q, &pairs, 42).unwrap();
        let b2 = balanced_partition(&q, &pairs, 42).unwrap();
        assert_eq!(b1.a(), b2.a());
    }
}
