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

//! End-to-end total-coloring algorithms: the general bound of
//! `max_degree + 2 * ceil(n / (max_degree + 1))` colors for any graph,
//! and the five-step pipeline achieving `degree + 2` colors on dense
//! regular graphs.

mod dense;
mod general;
mod report;

pub use dense::{total_color_dense_regular, Mode, PipelineError, StepFailure};
pub use general::{general_budget, total_color_general, GeneralError};
pub use report::{InequalityCheck, RunReport, StepReport};
