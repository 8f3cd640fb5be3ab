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

//! Total-coloring toolkit: a rainbow-matching edge-coloring extension
//! engine, equitable vertex colorings, matching and partition machinery,
//! and two end-to-end total-coloring algorithms (a general bound of
//! maximum degree plus a class-count term, and a tight bound of degree
//! plus two for dense regular graphs).

pub mod coloring;
pub mod equitable;
pub mod error;
pub mod extension;
pub mod fans;
pub mod graph;
pub mod hypergraph;
pub mod matching;
pub mod oracle;
pub mod partition;
pub mod totalizer;
