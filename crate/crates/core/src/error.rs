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

//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {v} out of range for n={n}")]
    OutOfRange { v: usize, n: usize },
    #[error("malformed line {line}: {content:?}")]
    Malformed { line: usize, content: String },
    #[error("missing `p`/`ph` header line")]
    MissingHeader,
    #[error("header declares {declared} edges, found {actual}")]
    EdgeCountMismatch { declared: usize, actual: usize },
    #[error("no {r}-regular graph on {n} vertices (degree sum must be even, r < n)")]
    InfeasibleRegular { n: usize, r: usize },
    #[error("regular generation failed for n={n}, r={r} within the retry budget")]
    GenerationFailed { n: usize, r: usize },
    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("hyperedge of size {size} (need >= 2)")]
    EdgeTooSmall { size: usize },
    #[error("vertex {v} out of range for n={n}")]
    OutOfRange { v: usize, n: usize },
    #[error("repeated vertex {v} within one hyperedge")]
    RepeatedVertex { v: usize },
    #[error("edges {e1} and {e2} intersect in more than one vertex")]
    NotSimple { e1: usize, e2: usize },
}
