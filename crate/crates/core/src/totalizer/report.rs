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

//! Structured run reports: per-step timings, the inequality ledger, and
//! exchange statistics, serialized as JSON.

use serde::{Deserialize, Serialize};

/// One recorded inequality: `lhs` compared against `rhs` with the given
/// comparison symbol (">=", ">", "<", "<=").
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub cmp: String,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityCheck {
    pub fn new(name: &str, lhs: f64, cmp: &str, rhs: f64) -> Self {
        let pass = match cmp {
            ">=" => lhs >= rhs,
            ">" => lhs > rhs,
            "<=" => lhs <= rhs,
            "<" => lhs < rhs,
            "==" => lhs == rhs,
            other => panic!("unknown comparison {other:?}"),
        };
        InequalityCheck {
            name: name.to_string(),
            lhs,
            cmp: cmp.to_string(),
            rhs,
            pass,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StepReport {
    pub step: String,
    pub millis: u128,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Full pipeline run report.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub n: usize,
    pub r: usize,
    pub mode: String,
    pub k: usize,
    pub ell: usize,
    pub checks: Vec<InequalityCheck>,
    pub steps: Vec<StepReport>,
    pub exchanges: usize,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl RunReport {
    pub fn check(&mut self, name: &str, lhs: f64, cmp: &str, rhs: f64) -> bool {
        let c = InequalityCheck::new(name, lhs, cmp, rhs);
        let pass = c.pass;
        self.checks.push(c);
        pass
    }

    pub fn note_step(&mut self, step: &str, millis: u128, notes: Vec<String>) {
        self.steps.push(StepReport {
            step: step.to_string(),
            millis,
            notes,
        });
    }
}
