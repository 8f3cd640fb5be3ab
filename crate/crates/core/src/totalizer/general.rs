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

//! Total coloring of an arbitrary graph with at most
//! `max_degree + 2 * ceil(n / (max_degree + 1))` colors.
//!
//! Construction: take an equitable vertex coloring with `max_degree + 1`
//! classes, turn each class of size >= 2 into a hyperedge and join each
//! singleton class to a fresh vertex `x`, then edge-color the resulting
//! hypergraph so the class edges and the star of `x` are rainbow. Edge
//! colors pull back directly; each vertex inherits the color of the
//! hyperedge (or x-edge) that represents its class.

use std::collections::HashMap;

use thiserror::Error;

use crate::coloring::{verify_total_coloring, Color, TotalColoring};
use crate::equitable::{equitable_vertex_coloring, EquitableError};
use crate::extension::{extend_with_palette, ExtendError};
use crate::graph::{norm, Graph};
use crate::hypergraph::{EdgeId, Hypergraph};

#[derive(Debug, Error)]
pub enum GeneralError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error(transparent)]
    Equitable(#[from] EquitableError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
}

/// The color budget `max_degree + 2 * ceil(n / (max_degree + 1))`.
pub fn general_budget(g: &Graph) -> usize {
    let d = g.max_degree();
    d + 2 * g.n().div_ceil(d + 1)
}

/// Totally colors any nonempty graph within `general_budget` colors.
pub fn total_color_general(g: &Graph) -> Result<TotalColoring, GeneralError> {
    let n = g.n();
    if n == 0 {
        return Err(GeneralError::EmptyGraph);
    }
    let delta = g.max_degree();
    let classes = equitable_vertex_coloring(g, delta + 1)?;
    let c = n.div_ceil(delta + 1);

    // Host hypergraph: the graph, plus one element per color class.
    let x = n;
    let mut h = Hypergraph::new(n + 1);
    for &(u, v) in g.edges() {
        h.add_edge(vec![u, v]).expect("simple graph edges");
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); delta + 1];
    for v in 0..n {
        members[(classes[v] - 1) as usize].push(v);
    }
    // class_edge[i] = hyperedge or x-edge carrying class i's color.
    let mut class_edge: Vec<EdgeId> = Vec::with_capacity(delta + 1);
    let mut m_edges: Vec<EdgeId> = Vec::new();
    let mut x_edges: Vec<EdgeId> = Vec::new();
    for cls in &members {
        debug_assert!(!cls.is_empty(), "equitable classes are nonempty");
        let id = if cls.len() >= 2 {
            let id = h.add_edge(cls.clone()).expect("class is independent");
            m_edges.push(id);
            id
        } else {
            let id = h.add_edge(vec![cls[0], x]).expect("fresh x edge");
            x_edges.push(id);
            id
        };
        class_edge.push(id);
    }
    debug_assert_eq!(h.max_degree(), delta + 1);

    // Palette per the extension guarantee. When every class is a
    // singleton the host is a plain graph and the star of x is rainbow
    // in any proper coloring, so max_degree(H)+1 colors suffice without
    // reserving anything.
    let (reserved, k) = if c == 1 {
        debug_assert!(m_edges.is_empty());
        (Vec::new(), delta + 2)
    } else {
        debug_assert_eq!(h.rank(), c.max(2));
        let mut reserved = m_edges.clone();
        reserved.extend(&x_edges);
        (reserved, delta + 2 * c)
    };
    let phi = extend_with_palette(&h, &reserved, k, None)?;

    let mut edge_colors: HashMap<(usize, usize), Color> = HashMap::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        edge_colors.insert(norm(u, v), phi.color_of(i).expect("total coloring"));
    }
    let mut vertex_colors = vec![0 as Color; n];
    for (i, cls) in members.iter().enumerate() {
        let color = phi.color_of(class_edge[i]).expect("total coloring");
        for &v in cls {
            vertex_colors[v] = color;
        }
    }
    let tc = TotalColoring {
        k: general_budget(g),
        vertex_colors,
        edge_colors,
    };
    debug_assert!(verify_total_coloring(&tc, g, general_budget(g)).is_ok());
    Ok(tc)
}
