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

//! Total coloring of dense regular graphs with `degree + 2` colors.
//!
//! For an r-regular graph on n vertices with r >= (1 + eps) * n / 2 the
//! pipeline runs five steps: (0) augment the graph with a spine matching
//! taken from the complement and split the vertices into two balanced
//! halves, (1) edge-color both halves together so the spine is rainbow,
//! (2, odd n only) rearrange the colors around the auxiliary vertex,
//! (3) grow each of the first k color classes into a perfect matching by
//! local path exchanges across the cut, (4) spend ell fresh colors on the
//! uncolored intra-half edges, and (5) color the remaining cut edges with
//! the last few colors so the spine stays rainbow. The spine then hands
//! one private color to every vertex.
//!
//! Strict mode refuses to run when the counting margins behind the five
//! steps fail at the given size; opportunistic mode always attempts the
//! construction and reports the first step whose concrete subproblem is
//! infeasible.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{verify_total_coloring, Color, PartialEdgeColoring, TotalColoring};
use crate::equitable::{balance_class_sizes, balance_missing, missing_class_sizes, missing_gap};
use crate::extension::{extend_near_bipartite, extend_with_palette};
use crate::graph::{norm, Bipartition, Graph};
use crate::hypergraph::{EdgeId, Hypergraph};
use crate::matching::{bipartite_perfect_matching, spine_matching};
use crate::partition::balanced_partition;
use crate::totalizer::report::RunReport;

/// How to treat sizes where the counting margins are not yet positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Refuse to run unless every counting margin holds.
    Strict,
    /// Run the construction regardless and report concrete infeasibility.
    Opportunistic,
}

impl Mode {
    fn label(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Opportunistic => "opportunistic",
        }
    }
}

/// A structured step failure: which step, which inequality or subproblem
/// gave out, and the full run report accumulated so far.
#[derive(Clone, Debug, Serialize)]
pub struct StepFailure {
    pub step: usize,
    pub inequality: String,
    pub details: String,
    pub report: RunReport,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("step {} infeasible ({}): {}", .0.step, .0.inequality, .0.details)]
    Step(Box<StepFailure>),
}

/// Totally colors a regular graph with `r + 2` colors, provided
/// `r >= (1 + eps) * n / 2` and `r < 3n/4`. Returns the coloring together
/// with a report of timings, exchanges and the inequality ledger.
pub fn total_color_dense_regular(
    g: &Graph,
    eps: f64,
    mode: Mode,
    seed: u64,
) -> Result<(TotalColoring, RunReport), PipelineError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(PipelineError::Precondition(format!(
            "eps must lie strictly between 0 and 1, got {eps}"
        )));
    }
    let n = g.n();
    if n < 6 {
        return Err(PipelineError::Precondition(format!(
            "need at least 6 vertices, got {n}"
        )));
    }
    let Some(r) = g.is_regular() else {
        return Err(PipelineError::Precondition("graph is not regular".into()));
    };
    if ((2 * r) as f64) < (1.0 + eps) * n as f64 {
        return Err(PipelineError::Precondition(format!(
            "degree {r} is below the density threshold (1 + {eps}) * {n} / 2"
        )));
    }
    if 4 * r >= 3 * n {
        return Err(PipelineError::Precondition(format!(
            "degree {r} >= 3/4 * {n}: this regime is out of scope here; \
             very dense graphs need a different argument"
        )));
    }
    // An odd vertex count forces the degree to be even.
    assert!(n % 2 == 0 || r % 2 == 0, "odd-order graphs have even degree");

    Pipeline::new(g, eps, mode, seed, n, r).run()
}

/// One half of the split; `true` means side A throughout.
type SideMap = Vec<bool>;

struct Pipeline<'g> {
    g: &'g Graph,
    eps: f64,
    mode: Mode,
    seed: u64,
    n: usize,
    r: usize,
    m: usize,
    odd: bool,
    mp23: f64,
    mp56: f64,
    mp53: f64,
    k: usize,
    ell: usize,
    report: RunReport,
    exchanges: usize,
}

/// Mutable construction state threaded between the steps.
struct State {
    /// The auxiliary vertex (n for even n; the fresh vertex for odd n).
    x: usize,
    /// Vertex count of the augmented graph Q.
    nq: usize,
    /// Current edge set of Q, normalized pairs.
    q_edges: BTreeSet<(usize, usize)>,
    side_a: SideMap,
    /// Pair i = (xi[i], yi[i]) with xi on side A; the last one or two
    /// entries are the leftover vertices not covered by the spine.
    xi: Vec<usize>,
    yi: Vec<usize>,
    /// Number of spine pairs (edges of the complement matching).
    spine_len: usize,
    /// Pair indices forming the reservoir next to x (odd n only).
    mstar: BTreeSet<usize>,
    /// Colors assigned before the main host exists, keyed by pair.
    color_map: BTreeMap<(usize, usize), Color>,
    /// Rainbow edge of color c+1, one per color 1..=k.
    m1: Vec<(usize, usize)>,
    /// Pair indices whose colors had to move onto the star of x (odd).
    mx1: Vec<usize>,
    mx3: Vec<usize>,
    qg: Option<Graph>,
    hq: Option<Hypergraph>,
    phi: Option<PartialEdgeColoring>,
}

impl<'g> Pipeline<'g> {
    fn new(g: &'g Graph, eps: f64, mode: Mode, seed: u64, n: usize, r: usize) -> Self {
        let m = n.div_ceil(2);
        let mf = m as f64;
        let mp23 = mf.powf(2.0 / 3.0);
        let mp56 = mf.powf(5.0 / 6.0);
        let mp53 = mf.powf(5.0 / 3.0);
        let k = (((r + 2) as f64 + mp23) / 2.0).ceil() as usize + 4;
        let ell = mp56.ceil() as usize + 1;
        let report = RunReport {
            n,
            r,
            mode: mode.label().to_string(),
            k,
            ell,
            ..RunReport::default()
        };
        Pipeline {
            g,
            eps,
            mode,
            seed,
            n,
            r,
            m,
            odd: n % 2 == 1,
            mp23,
            mp56,
            mp53,
            k,
            ell,
            report,
            exchanges: 0,
        }
    }

    fn fail(&self, step: usize, inequality: &str, details: String) -> PipelineError {
        let mut report = self.report.clone();
        report.exchanges = self.exchanges;
        report.success = false;
        report.failure = Some(format!("step {step} ({inequality}): {details}"));
        PipelineError::Step(Box::new(StepFailure {
            step,
            inequality: inequality.to_string(),
            details,
            report,
        }))
    }

    /// Records the counting margins behind each step, in step order, and
    /// returns the first failing one.
    fn margins(&mut self) -> Option<(usize, &'static str)> {
        let (nf, rf, mf) = (self.n as f64, self.r as f64, self.m as f64);
        let (kf, lf) = (self.k as f64, self.ell as f64);
        let eps = self.eps;
        let mut first: Option<(usize, &'static str)> = None;
        let mut record = |report: &mut RunReport,
                          step: usize,
                          name: &'static str,
                          lhs: f64,
                          cmp: &str,
                          rhs: f64| {
            if !report.check(name, lhs, cmp, rhs) && first.is_none() {
                first = Some((step, name));
            }
        };
        record(
            &mut self.report,
            1,
            "margin.step1.class_missing",
            2.0 * mf * (self.mp23 + 5.0) / kf,
            "<",
            4.0 * self.mp23 - 4.0,
        );
        if self.odd {
            record(
                &mut self.report,
                2,
                "margin.step2.mstar_reservoir",
                (rf - 2.0) / 2.0 - 2.0 * (self.mp23 + 5.0) - 4.0 * lf,
                ">=",
                1.0,
            );
        }
        record(
            &mut self.report,
            3,
            "margin.step3.n1_margin",
            0.5 * ((1.0 + eps) * nf - self.mp23) - 22.0 * self.mp56,
            ">",
            0.5 * (1.0 + 0.5 * eps) * mf,
        );
        record(
            &mut self.report,
            4,
            "margin.step4.hi_min_degree",
            0.5 * ((1.0 + eps) * mf - self.mp23)
                - 4.0 * self.mp56
                - 2.0 * (4.0 * self.mp56 + 1.0)
                - 2.0,
            ">",
            0.5 * (1.0 + 0.5 * eps) * mf,
        );
        record(
            &mut self.report,
            5,
            "margin.step5.m2_bound",
            mf - 1.0 - kf + (self.mp23 + 5.0) + lf,
            "<",
            mf / 2.0,
        );
        record(
            &mut self.report,
            5,
            "margin.step5.degree_margin",
            rf - kf - lf,
            ">",
            0.5 * (1.0 + 0.5 * eps) * mf,
        );
        first
    }

    fn run(mut self) -> Result<(TotalColoring, RunReport), PipelineError> {
        if let Some((step, name)) = self.margins() {
            if self.mode == Mode::Strict {
                return Err(self.fail(
                    step,
                    name,
                    format!(
                        "counting margin fails at n = {}, r = {}; rerun in \
                         opportunistic mode to attempt the construction anyway",
                        self.n, self.r
                    ),
                ));
            }
        }
        let mut st = self.step0()?;
        self.step1(&mut st)?;
        self.step2(&mut st)?;
        self.step3(&mut st)?;
        self.step4(&mut st)?;
        let tc = self.step5(&mut st)?;
        self.report.exchanges = self.exchanges;
        self.report.success = true;
        Ok((tc, self.report))
    }

    // Step 0: spine matching from the complement, the augmented graph Q,
    // and a balanced split that separates every pair.
    fn step0(&mut self) -> Result<State, PipelineError> {
        let t = Instant::now();
        let spine =
            spine_matching(self.g).map_err(|e| self.fail(0, "spine_matching", e.to_string()))?;
        let spine_len = spine.len();
        let mut covered = vec![false; self.n];
        for &(u, v) in &spine {
            covered[u] = true;
            covered[v] = true;
        }
        let unsat: Vec<usize> = (0..self.n).filter(|&v| !covered[v]).collect();
        debug_assert_eq!(unsat.len(), if self.odd { 3 } else { 2 });
        debug_assert_eq!(spine_len, if self.odd { self.m - 2 } else { self.m - 1 });

        let x = self.n;
        let nq = if self.odd { self.n + 1 } else { self.n };
        let mut q_edges: BTreeSet<(usize, usize)> =
            self.g.edges().iter().map(|&(u, v)| norm(u, v)).collect();
        for &(u, v) in &spine {
            q_edges.insert(norm(u, v));
        }
        // Pair list for the split: the spine plus the leftover vertices,
        // with x tied to one leftover when n is odd.
        let mut pairs = spine.clone();
        let mstar_len = if self.odd { (self.r - 2) / 2 } else { 0 };
        if self.odd {
            for &w in &unsat {
                q_edges.insert(norm(x, w));
            }
            for &(u, v) in spine.iter().take(mstar_len) {
                q_edges.insert(norm(x, u));
                q_edges.insert(norm(x, v));
            }
            pairs.push((x, unsat[0]));
            pairs.push((unsat[1], unsat[2]));
        } else {
            pairs.push((unsat[0], unsat[1]));
        }

        let qg = Graph::from_edges(nq, q_edges.iter().copied()).expect("Q is simple");
        let bip = balanced_partition(&qg, &pairs, self.seed)
            .map_err(|e| self.fail(0, "balanced_partition", e.to_string()))?;
        let mut side_a: SideMap = (0..nq)
            .map(|v| bip.side(v) == crate::graph::Side::A)
            .collect();
        if self.odd && !side_a[x] {
            for s in side_a.iter_mut() {
                *s = !*s;
            }
        }
        let mut xi = Vec::with_capacity(self.m);
        let mut yi = Vec::with_capacity(self.m);
        for &(u, v) in &pairs {
            debug_assert_ne!(side_a[u], side_a[v], "split separates every pair");
            if side_a[u] {
                xi.push(u);
                yi.push(v);
            } else {
                xi.push(v);
                yi.push(u);
            }
        }
        debug_assert_eq!(xi.len(), self.m);
        if self.odd {
            assert_eq!(xi[self.m - 2], x, "x sits on side A");
        }

        // Split quality for the ledger.
        let mut max_imb = 0usize;
        let mut min_own = usize::MAX;
        for v in 0..nq {
            let mut da = 0usize;
            for &w in qg.neighbors(v) {
                if side_a[w] {
                    da += 1;
                }
            }
            let db = qg.degree(v) - da;
            max_imb = max_imb.max(da.abs_diff(db));
            min_own = min_own.min(if side_a[v] { da } else { db });
        }
        self.report.check(
            "step0.split_imbalance",
            max_imb as f64,
            "<=",
            self.mp23.floor(),
        );
        self.report.check(
            "step0.min_intra_degree",
            min_own as f64,
            ">=",
            (self.r as f64 - self.mp23) / 2.0,
        );

        // Concrete feasibility known already at this point.
        if !self
            .report
            .check("step1.m1_fits", self.k as f64, "<=", (self.m - 1) as f64)
        {
            return Err(self.fail(
                1,
                "step1.m1_fits",
                format!("need k = {} rainbow spine pairs but only {} exist", self.k, self.m - 1),
            ));
        }
        if self.odd
            && !self.report.check(
                "step1.mstar_inside_m1",
                mstar_len as f64,
                "<=",
                (self.k - 1) as f64,
            )
        {
            return Err(self.fail(
                1,
                "step1.mstar_inside_m1",
                format!("reservoir of {mstar_len} pairs exceeds the k - 1 rainbow pairs"),
            ));
        }
        if !self.odd {
            // |M2| + deg(x) <= final palette is forced exactly: the spine
            // keeps m - 1 - k uncolored pairs for the last step.
            let lhs = (self.m + 1) as f64 - self.k as f64;
            let rhs = (self.r + 2) as f64 - (self.k + self.ell) as f64;
            if !self.report.check("step5.reserved_fit", lhs, "<=", rhs) {
                return Err(self.fail(
                    5,
                    "step5.reserved_fit",
                    format!(
                        "the {} uncolored spine pairs plus the star of x cannot fit \
                         in the {} colors left for the final step (predicted exactly \
                         from degree accounting)",
                        self.m - 1 - self.k,
                        (self.r + 2).saturating_sub(self.k + self.ell)
                    ),
                ));
            }
        } else if 2 * self.ell > self.k {
            self.report
                .check("step2.m1_capacity", (2 * self.ell) as f64, "<=", self.k as f64);
            return Err(self.fail(
                2,
                "step2.m1_capacity",
                format!(
                    "the rainbow set has k = {} edges but the rearrangement around x \
                     must set aside at least 2 * ell = {} of them",
                    self.k,
                    2 * self.ell
                ),
            ));
        }

        self.report.note_step(
            "step0",
            t.elapsed().as_millis(),
            vec![format!(
                "spine {spine_len} pairs, split imbalance {max_imb}, min intra degree {min_own}"
            )],
        );
        Ok(State {
            x,
            nq,
            q_edges,
            side_a,
            xi,
            yi,
            spine_len,
            mstar: (0..mstar_len).collect(),
            color_map: BTreeMap::new(),
            m1: Vec::new(),
            mx1: Vec::new(),
            mx3: Vec::new(),
            qg: Some(qg),
            hq: None,
            phi: None,
        })
    }

    // Step 1: color both halves plus k rainbow spine pairs with k colors,
    // then balance the per-color deficiency counts.
    fn step1(&mut self, st: &mut State) -> Result<(), PipelineError> {
        let t = Instant::now();
        let mut m1: Vec<(usize, usize)> = if self.odd {
            let mut v: Vec<(usize, usize)> = (0..self.k - 1)
                .map(|i| norm(st.xi[i], st.yi[i]))
                .collect();
            v.push(norm(st.x, st.xi[self.m - 1]));
            v
        } else {
            (0..self.k).map(|i| norm(st.xi[i], st.yi[i])).collect()
        };
        let m1_set: HashSet<(usize, usize)> = m1.iter().copied().collect();
        let mut edges: Vec<(usize, usize)> = m1.clone();
        for &(u, v) in &st.q_edges {
            if st.side_a[u] == st.side_a[v] && !m1_set.contains(&norm(u, v)) {
                edges.push((u, v));
            }
        }
        let h1 = Hypergraph::from_edges(st.nq, edges.iter().map(|&(u, v)| vec![u, v]))
            .expect("half edges are simple");
        self.report.check(
            "step1.palette_margin",
            (h1.max_degree() + 3) as f64,
            "<=",
            self.k as f64,
        );
        let reserved: Vec<EdgeId> = (0..self.k).collect();
        let mut phi0 = extend_with_palette(&h1, &reserved, self.k, None)
            .map_err(|e| self.fail(1, "rainbow_extension", e.to_string()))?;
        balance_missing(&h1, &mut phi0, &reserved)
            .map_err(|e| self.fail(1, "missing_balance", e.to_string()))?;

        let sizes = missing_class_sizes(&h1, &phi0);
        let (gap, _) = missing_gap(&sizes);
        if !self.report.check("step1.missing_gap", gap as f64, "<=", 4.0) {
            return Err(self.fail(
                1,
                "step1.missing_gap",
                format!("deficiency gap {gap} after balancing"),
            ));
        }
        let max_class = *sizes.iter().max().unwrap();
        self.report.check(
            "step1.class_missing_max",
            max_class as f64,
            "<",
            4.0 * self.mp23,
        );
        let max_vertex_missing = (0..st.nq)
            .map(|v| self.k.saturating_sub(h1.degree(v)))
            .max()
            .unwrap();
        self.report.check(
            "step1.vertex_missing_max",
            max_vertex_missing as f64,
            "<=",
            self.mp23 + 5.0,
        );

        for id in h1.live_edges() {
            let e = h1.edge(id);
            st.color_map
                .insert(norm(e[0], e[1]), phi0.color_of(id).expect("total"));
        }
        for (i, pair) in m1.iter().enumerate() {
            debug_assert_eq!(st.color_map[pair], (i + 1) as Color, "rainbow seed kept");
        }
        st.m1 = std::mem::take(&mut m1);
        self.report.note_step(
            "step1",
            t.elapsed().as_millis(),
            vec![format!(
                "deficiency gap {gap}, largest class deficiency {max_class}"
            )],
        );
        Ok(())
    }

    // Step 2 (odd n): make every color deficient at x live on a reservoir
    // pair, then move a block of colors onto the star of x, uncoloring the
    // pairs they came from. Finally freeze Q and build the master coloring.
    fn step2(&mut self, st: &mut State) -> Result<(), PipelineError> {
        let t = Instant::now();
        if self.odd {
            self.rearrange_around_x(st)?;
        }
        // Freeze Q and replay all colors on the master host.
        let qg = Graph::from_edges(st.nq, st.q_edges.iter().copied()).expect("Q is simple");
        let hq = Hypergraph::from_graph(&qg);
        let k_master = (self.r + 2).max(self.k + self.ell);
        let mut phi = PartialEdgeColoring::new(&hq, k_master);
        for (&(u, v), &c) in &st.color_map {
            let id = hq.edge_between(u, v).expect("colored edge survives");
            phi.assign(&hq, id, c);
        }
        st.qg = Some(qg);
        st.hq = Some(hq);
        st.phi = Some(phi);

        if self.odd {
            self.release_block_at_x(st)?;
        }
        self.report.note_step(
            "step2",
            t.elapsed().as_millis(),
            if self.odd {
                vec![format!(
                    "moved {} deficient colors, released {} reservoir pairs",
                    st.mx1.len(),
                    st.mx1.len() + st.mx3.len()
                )]
            } else {
                vec!["nothing to do for even order".into()]
            },
        );
        Ok(())
    }

    /// The swap loop: every color deficient at x must sit on a pair whose
    /// both ends are adjacent to x. Swapping a reservoir pair out for the
    /// deficient pair keeps the color multiset at x unchanged.
    fn rearrange_around_x(&mut self, st: &mut State) -> Result<(), PipelineError> {
        let x = st.x;
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); st.nq];
        for &(u, v) in &st.q_edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let present: BTreeSet<Color> = adj[x]
            .iter()
            .filter_map(|&w| st.color_map.get(&norm(x, w)).copied())
            .collect();
        let missing_x: Vec<Color> = (1..=self.k as Color)
            .filter(|c| !present.contains(c))
            .collect();
        // Exact feasibility of the upcoming block release.
        if !self.report.check(
            "step2.m1_capacity",
            (2 * missing_x.len() + 2 * self.ell) as f64,
            "<=",
            self.k as f64,
        ) {
            return Err(self.fail(
                2,
                "step2.m1_capacity",
                format!(
                    "rearrangement needs 2 * {} + 2 * {} rainbow edges out of k = {}",
                    missing_x.len(),
                    self.ell,
                    self.k
                ),
            ));
        }
        self.report.check(
            "step2.mstar_reservoir_exact",
            (self.r as f64 - 2.0) / 2.0 - 2.0 * missing_x.len() as f64 - 4.0 * self.ell as f64,
            ">=",
            1.0,
        );

        for &i in &missing_x {
            let pi = i as usize - 1;
            if st.mstar.contains(&pi) {
                continue;
            }
            // Donor pair: in the reservoir, and its index color present at x.
            let Some(&pj) = st
                .mstar
                .iter()
                .find(|&&p| present.contains(&((p + 1) as Color)))
            else {
                return Err(self.fail(
                    2,
                    "step2.donor_exhausted",
                    format!("no reservoir pair can host deficient color {i}"),
                ));
            };
            let (xj, yj) = (st.xi[pj], st.yi[pj]);
            let (xi_v, yi_v) = (st.xi[pi], st.yi[pi]);
            let cj = st
                .color_map
                .remove(&norm(x, xj))
                .expect("reservoir edge to x is colored");
            debug_assert!(!st.color_map.contains_key(&norm(x, yj)));
            for w in [xj, yj] {
                adj[x].remove(&w);
                adj[w].remove(&x);
                st.q_edges.remove(&norm(x, w));
            }
            for w in [xi_v, yi_v] {
                assert!(st.q_edges.insert(norm(x, w)), "pair joins the reservoir once");
                adj[x].insert(w);
                adj[w].insert(x);
            }
            st.mstar.remove(&pj);
            st.mstar.insert(pi);
            // Clear the one conflicting edge at the new neighbor first.
            let conflict = adj[xi_v]
                .iter()
                .copied()
                .find(|&w| {
                    w != x
                        && st.side_a[w]
                        && st.color_map.get(&norm(xi_v, w)) == Some(&cj)
                })
                .map(|w| norm(xi_v, w));
            if let Some(e) = conflict {
                st.color_map.remove(&e);
            }
            st.color_map.insert(norm(x, xi_v), cj);
        }
        st.mx1 = missing_x.iter().map(|&c| c as usize - 1).collect();
        for &p in &st.mx1 {
            debug_assert!(st.mstar.contains(&p));
        }
        Ok(())
    }

    /// Moves the deficient colors and a block of ell further colors onto
    /// the star of x, uncoloring the pairs and rainbow edges they replace.
    fn release_block_at_x(&mut self, st: &mut State) -> Result<(), PipelineError> {
        let x = st.x;
        let hq = st.hq.take().expect("host built");
        let mut phi = st.phi.take().expect("master coloring");
        let mut result: Result<(), PipelineError> = Ok(());

        // Deficient pairs: free the pair, give its color to the cut edge at x.
        for &p in &st.mx1 {
            phi.unassign(&hq, hq.edge_between(st.xi[p], st.yi[p]).unwrap());
        }
        for &p in &st.mx1 {
            phi.assign(&hq, hq.edge_between(x, st.yi[p]).unwrap(), (p + 1) as Color);
        }
        // Each deficient pair's edge to x carries some color; free the
        // rainbow pair currently holding that color.
        let mut mx2_idx: Vec<usize> = Vec::with_capacity(st.mx1.len());
        for &p in &st.mx1 {
            let c = phi
                .color_of(hq.edge_between(x, st.xi[p]).unwrap())
                .expect("star edge colored");
            assert!((c as usize) < self.k, "the top color never leaves the star");
            let q = c as usize - 1;
            debug_assert!(q < st.spine_len);
            phi.unassign(&hq, hq.edge_between(st.xi[q], st.yi[q]).unwrap());
            mx2_idx.push(q);
        }
        // Greedy block of ell reservoir pairs whose index colors and star
        // colors stay disjoint from everything chosen so far.
        let blocked: HashSet<usize> = st.mx1.iter().chain(mx2_idx.iter()).copied().collect();
        let mut chosen: Vec<usize> = Vec::with_capacity(self.ell);
        let mut chosen_star_colors: HashSet<Color> = HashSet::new();
        let mut mx4_idx: Vec<usize> = Vec::new();
        for &p in st.mstar.iter() {
            if chosen.len() == self.ell {
                break;
            }
            if blocked.contains(&p) {
                continue;
            }
            let c = phi
                .color_of(hq.edge_between(x, st.xi[p]).unwrap())
                .expect("star edge colored");
            if chosen_star_colors.contains(&((p + 1) as Color)) {
                continue;
            }
            if chosen.contains(&(c as usize - 1)) {
                continue;
            }
            assert!((c as usize) < self.k);
            let q = c as usize - 1;
            debug_assert!(q < st.spine_len && !blocked.contains(&q) && q != p);
            chosen.push(p);
            chosen_star_colors.insert(c);
            mx4_idx.push(q);
        }
        if chosen.len() < self.ell {
            result = Err(self.fail(
                2,
                "step2.block_selection",
                format!(
                    "only {} of the required {} reservoir pairs can be released",
                    chosen.len(),
                    self.ell
                ),
            ));
        }
        if result.is_ok() {
            for &p in &chosen {
                phi.unassign(&hq, hq.edge_between(st.xi[p], st.yi[p]).unwrap());
            }
            for &q in &mx4_idx {
                phi.unassign(&hq, hq.edge_between(st.xi[q], st.yi[q]).unwrap());
            }
            // Every color freed from the rainbow set reappears on the star.
            let lost: Vec<Color> = st
                .mx1
                .iter()
                .chain(mx2_idx.iter())
                .chain(chosen.iter())
                .chain(mx4_idx.iter())
                .map(|&p| (p + 1) as Color)
                .collect();
            for c in lost {
                let id = phi
                    .edge_with_color_at(x, c)
                    .expect("freed color lands on the star of x");
                let e = hq.edge(id);
                st.m1[c as usize - 1] = norm(e[0], e[1]);
            }
            let distinct: HashSet<(usize, usize)> = st.m1.iter().copied().collect();
            assert_eq!(distinct.len(), self.k, "rainbow set stays k distinct edges");
            self.report.check(
                "step2.uncolored_budget",
                (2 * st.mx1.len() + 2 * self.ell) as f64,
                "<=",
                2.0 * (self.mp23 + 5.0) + 2.0 * self.ell as f64,
            );
            st.mx3 = chosen;
        }
        st.hq = Some(hq);
        st.phi = Some(phi);
        result
    }

    // Step 3: grow every color class 1..=k into a perfect matching of Q by
    // 5- or 7-edge alternating path exchanges across the cut.
    fn step3(&mut self, st: &mut State) -> Result<(), PipelineError> {
        let t = Instant::now();
        let hq = st.hq.take().expect("host built");
        let qg = st.qg.take().expect("Q finalized");
        let mut phi = st.phi.take().expect("master coloring");

        let m1_ids: Vec<EdgeId> = st
            .m1
            .iter()
            .map(|&(u, v)| hq.edge_between(u, v).expect("rainbow edge in Q"))
            .collect();
        let m1_id_set: HashSet<EdgeId> = m1_ids.iter().copied().collect();
        let mut protected: HashSet<EdgeId> = (0..st.spine_len)
            .map(|p| hq.edge_between(st.xi[p], st.yi[p]).expect("spine pair in Q"))
            .filter(|id| !m1_id_set.contains(id))
            .collect();
        if self.odd {
            for p in [self.m - 2, self.m - 1] {
                let id = hq.edge_between(st.x, st.yi[p]).expect("leftover cut edge");
                if !m1_id_set.contains(&id) {
                    protected.insert(id);
                }
            }
        }
        let mut banned = vec![false; st.nq];
        let mut block_b = vec![false; st.nq];
        if self.odd {
            banned[st.x] = true;
            for &p in &st.mx3 {
                banned[st.xi[p]] = true;
                banned[st.yi[p]] = true;
                block_b[st.yi[p]] = true;
            }
        }
        let mut ex = Exchanger {
            hq: &hq,
            qg: &qg,
            side_a: &st.side_a,
            protected: &protected,
            banned: &banned,
            block_b: &block_b,
            cap: self.mp56 - 1.0,
            deg_own: vec![0; st.nq],
            count_a: 0,
            count_b: 0,
        };
        for id in phi.uncolored_edges(&hq) {
            let e = hq.edge(id);
            if st.side_a[e[0]] == st.side_a[e[1]] {
                ex.track_uncolored(e[0], e[1]);
            }
        }

        let mut exchanges = 0usize;
        let mut stuck: Option<(Color, usize, usize)> = None;
        'colors: for c in 1..=self.k as Color {
            let miss = phi.missing_class(&hq, c).expect("color in palette");
            let e_c = st.m1[c as usize - 1];
            debug_assert!(!self.odd || !miss.contains(&st.x), "x keeps every low color");
            let (ma, mb): (Vec<usize>, Vec<usize>) =
                miss.into_iter().partition(|&v| st.side_a[v]);
            let cross = ma.len().min(mb.len());
            let mut pairs: Vec<(usize, usize)> = ma[..cross]
                .iter()
                .zip(&mb[..cross])
                .map(|(&a, &b)| (a, b))
                .collect();
            let rest = if ma.len() > cross { &ma[cross..] } else { &mb[cross..] };
            debug_assert_eq!(rest.len() % 2, 0, "leftover deficiency count is even");
            pairs.extend(rest.chunks(2).map(|w| (w[0], w[1])));
            for (a, b) in pairs {
                let done = if st.side_a[a] != st.side_a[b] {
                    ex.exchange_cross(&mut phi, c, e_c, a, b)
                } else {
                    ex.exchange_same_side(&mut phi, c, e_c, a, b)
                };
                if !done {
                    stuck = Some((c, a, b));
                    break 'colors;
                }
                exchanges += 1;
            }
        }
        self.exchanges = exchanges;

        self.report.check(
            "step3.uncolored_sides_equal",
            ex.count_a as f64,
            "==",
            ex.count_b as f64,
        );
        self.report
            .check("step3.uncolored_count", ex.count_a as f64, "<", 4.0 * self.mp53);
        let max_own = *ex.deg_own.iter().max().unwrap();
        self.report
            .check("step3.uncolored_max_degree", max_own as f64, "<", self.mp56);
        let mut cut_deg = vec![0usize; st.nq];
        for id in hq.live_edges() {
            let e = hq.edge(id);
            if st.side_a[e[0]] != st.side_a[e[1]]
                && phi.color_of(id).is_some()
                && !protected.contains(&id)
            {
                cut_deg[e[0]] += 1;
                cut_deg[e[1]] += 1;
            }
        }
        self.report.check(
            "step3.cut_degree_max",
            *cut_deg.iter().max().unwrap() as f64,
            "<",
            2.0 * self.mp56,
        );
        let (count_a, count_b) = (ex.count_a, ex.count_b);
        drop(ex);
        if stuck.is_none() {
            for c in 1..=self.k as Color {
                assert!(
                    phi.missing_class(&hq, c).unwrap().is_empty(),
                    "class {c} is a perfect matching"
                );
            }
        }
        self.report.note_step(
            "step3",
            t.elapsed().as_millis(),
            vec![format!(
                "{exchanges} exchanges, {count_a} + {count_b} intra edges left uncolored"
            )],
        );
        st.hq = Some(hq);
        st.qg = Some(qg);
        st.phi = Some(phi);
        if let Some((c, a, b)) = stuck {
            return Err(self.fail(
                3,
                "step3.path_exchange",
                format!("no alternating path for color {c} between {a} and {b}"),
            ));
        }
        Ok(())
    }

    // Step 4: color the uncolored intra edges of both halves with ell new
    // colors, pairing classes of equal size across the cut, and complete
    // each new class to a perfect matching through the cut.
    fn step4(&mut self, st: &mut State) -> Result<(), PipelineError> {
        let t = Instant::now();
        let hq = st.hq.take().expect("host built");
        let qg = st.qg.take().expect("Q finalized");
        let mut phi = st.phi.take().expect("master coloring");
        let put_back = |st: &mut State, hq, qg, phi| {
            st.hq = Some(hq);
            st.qg = Some(qg);
            st.phi = Some(phi);
        };

        let mut side_edges: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
        for id in phi.uncolored_edges(&hq) {
            let e = hq.edge(id);
            if st.side_a[e[0]] == st.side_a[e[1]] {
                side_edges[usize::from(!st.side_a[e[0]])].push(norm(e[0], e[1]));
            }
        }
        if side_edges[0].len() != side_edges[1].len() {
            let msg = format!(
                "uncolored intra edge counts differ: {} vs {}",
                side_edges[0].len(),
                side_edges[1].len()
            );
            put_back(st, hq, qg, phi);
            return Err(self.fail(4, "step4.side_balance", msg));
        }
        // Color each side separately with ell colors and balance class sizes.
        let mut classes: [Vec<Vec<(usize, usize)>>; 2] =
            [vec![Vec::new(); self.ell], vec![Vec::new(); self.ell]];
        for s in 0..2 {
            side_edges[s].sort_unstable();
            let hs = Hypergraph::from_edges(st.nq, side_edges[s].iter().map(|&(u, v)| vec![u, v]))
                .expect("leftover edges are simple");
            if hs.max_degree() >= self.ell {
                let msg = format!(
                    "leftover degree {} needs more than the {} fresh colors",
                    hs.max_degree(),
                    self.ell
                );
                put_back(st, hq, qg, phi);
                return Err(self.fail(4, "step4.side_palette", msg));
            }
            let mut ps = match extend_with_palette(&hs, &[], self.ell, None) {
                Ok(ps) => ps,
                Err(e) => {
                    put_back(st, hq, qg, phi);
                    return Err(self.fail(4, "step4.side_coloring", e.to_string()));
                }
            };
            balance_class_sizes(&hs, &mut ps);
            for id in hs.live_edges() {
                let e = hs.edge(id);
                let c = ps.color_of(id).expect("total side coloring") as usize - 1;
                classes[s][c].push(norm(e[0], e[1]));
            }
        }
        // Pair classes of equal size across the cut: sort by size.
        let order = |cls: &Vec<Vec<(usize, usize)>>| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..self.ell).collect();
            idx.sort_by_key(|&i| (std::cmp::Reverse(cls[i].len()), i));
            idx
        };
        let (ord_a, ord_b) = (order(&classes[0]), order(&classes[1]));

        // Cut edges available for completion, in a fixed order.
        let cut_list: Vec<(usize, usize, EdgeId)> = {
            let spine_set: HashSet<(usize, usize)> = (0..st.spine_len)
                .map(|p| norm(st.xi[p], st.yi[p]))
                .collect();
            qg.edges()
                .iter()
                .filter(|&&(u, v)| st.side_a[u] != st.side_a[v])
                .filter(|&&(u, v)| !spine_set.contains(&norm(u, v)))
                .map(|&(u, v)| (u, v, hq.edge_between(u, v).unwrap()))
                .collect()
        };

        for tix in 0..self.ell {
            let (ca, cb) = (&classes[0][ord_a[tix]], &classes[1][ord_b[tix]]);
            if ca.len() != cb.len() {
                let msg = format!(
                    "class sizes {} vs {} cannot be paired across the cut",
                    ca.len(),
                    cb.len()
                );
                put_back(st, hq, qg, phi);
                return Err(self.fail(4, "step4.class_pairing", msg));
            }
            let c = (self.k + 1 + tix) as Color;
            let mut covered = vec![false; st.nq];
            if self.odd {
                // One reserved cut edge at x per fresh color.
                let y = st.yi[st.mx3[tix]];
                phi.assign(&hq, hq.edge_between(st.x, y).unwrap(), c);
                covered[st.x] = true;
                covered[y] = true;
            }
            for &(u, v) in ca.iter().chain(cb.iter()) {
                phi.assign(&hq, hq.edge_between(u, v).unwrap(), c);
                covered[u] = true;
                covered[v] = true;
            }
            // Perfect matching on the uncovered vertices through the cut.
            let mut label = vec![usize::MAX; st.nq];
            let mut back: Vec<usize> = Vec::new();
            for v in 0..st.nq {
                if !covered[v] && st.side_a[v] {
                    label[v] = back.len();
                    back.push(v);
                }
            }
            let a_count = back.len();
            for v in 0..st.nq {
                if !covered[v] && !st.side_a[v] {
                    label[v] = back.len();
                    back.push(v);
                }
            }
            if back.len() != 2 * a_count {
                let msg = format!(
                    "uncovered sides differ for color {c}: {} vs {}",
                    a_count,
                    back.len() - a_count
                );
                put_back(st, hq, qg, phi);
                return Err(self.fail(4, "step4.completion_sides", msg));
            }
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for &(u, v, id) in &cut_list {
                if !covered[u] && !covered[v] && phi.color_of(id).is_none() {
                    edges.push((label[u], label[v]));
                }
            }
            let gi = Graph::from_edges(back.len(), edges).expect("completion graph is simple");
            let bip = Bipartition::new(back.len(), &(0..a_count).collect::<HashSet<usize>>());
            let pm = match bipartite_perfect_matching(&gi, &bip) {
                Ok(pm) => pm,
                Err(e) => {
                    let msg = format!("color {c}: {e}");
                    put_back(st, hq, qg, phi);
                    return Err(self.fail(4, "step4.completion_matching", msg));
                }
            };
            for (u, v) in pm {
                phi.assign(&hq, hq.edge_between(back[u], back[v]).unwrap(), c);
            }
        }
        for id in phi.uncolored_edges(&hq) {
            let e = hq.edge(id);
            assert_ne!(
                st.side_a[e[0]], st.side_a[e[1]],
                "only cut edges stay uncolored after step 4"
            );
        }
        self.report.note_step(
            "step4",
            t.elapsed().as_millis(),
            vec![format!(
                "{} intra edges per side over {} fresh colors",
                side_edges[0].len(),
                self.ell
            )],
        );
        put_back(st, hq, qg, phi);
        Ok(())
    }

    // Step 5: color the remaining cut edges, keeping the uncolored spine
    // pairs plus the star of x rainbow, then read off vertex colors.
    fn step5(&mut self, st: &mut State) -> Result<TotalColoring, PipelineError> {
        let t = Instant::now();
        let hq = st.hq.take().expect("host built");
        let phi = st.phi.take().expect("master coloring");
        let x = st.x;

        let m1_vals: HashSet<(usize, usize)> = st.m1.iter().copied().collect();
        let excluded_pairs: HashSet<usize> =
            st.mx1.iter().chain(st.mx3.iter()).copied().collect();
        let m2: Vec<(usize, usize)> = (0..st.spine_len)
            .filter(|p| !excluded_pairs.contains(p))
            .map(|p| norm(st.xi[p], st.yi[p]))
            .filter(|pair| !m1_vals.contains(pair))
            .collect();
        let excluded_edges: HashSet<(usize, usize)> = excluded_pairs
            .iter()
            .map(|&p| norm(st.xi[p], st.yi[p]))
            .collect();
        let keep_at_x: HashSet<(usize, usize)> = if self.odd {
            [norm(x, st.yi[self.m - 2]), norm(x, st.yi[self.m - 1])].into()
        } else {
            HashSet::new()
        };

        let mut rest: Vec<(usize, usize)> = Vec::new();
        for id in phi.uncolored_edges(&hq) {
            let e = hq.edge(id);
            let pair = norm(e[0], e[1]);
            if excluded_edges.contains(&pair) {
                continue;
            }
            if self.odd && (e[0] == x || e[1] == x) && !keep_at_x.contains(&pair) {
                continue;
            }
            debug_assert_ne!(st.side_a[e[0]], st.side_a[e[1]]);
            rest.push(pair);
        }
        // Attach x for even order; it is already present for odd order.
        let (rn, is_a) = if self.odd {
            debug_assert_eq!(rest.iter().filter(|&&(u, v)| u == x || v == x).count(), 2);
            (st.nq, st.side_a.clone())
        } else {
            rest.push(norm(x, st.xi[self.m - 1]));
            rest.push(norm(x, st.yi[self.m - 1]));
            let mut is_a = st.side_a.clone();
            is_a.push(false);
            (self.n + 1, is_a)
        };
        rest.sort_unstable();
        let rg = Graph::from_edges(rn, rest.iter().copied()).expect("leftover cut graph");
        let (h5, phi5, k5) = extend_near_bipartite(&rg, &is_a, x, &m2)
            .map_err(|e| self.fail(5, "step5.rainbow_extension", e.to_string()))?;
        if !self.report.check(
            "step5.total_colors",
            (self.k + self.ell + k5) as f64,
            "<=",
            (self.r + 2) as f64,
        ) {
            return Err(self.fail(
                5,
                "step5.total_colors",
                format!(
                    "the last step needs {} colors but only {} remain under the budget",
                    k5,
                    (self.r + 2).saturating_sub(self.k + self.ell)
                ),
            ));
        }
        let shift = (self.k + self.ell) as Color;

        let mut all: HashMap<(usize, usize), Color> = HashMap::new();
        for id in hq.live_edges() {
            if let Some(c) = phi.color_of(id) {
                let e = hq.edge(id);
                all.insert(norm(e[0], e[1]), c);
            }
        }
        for id in h5.live_edges() {
            let e = h5.edge(id);
            let c = phi5.color_of(id).expect("leftover edges all colored");
            let prev = all.insert(norm(e[0], e[1]), c + shift);
            debug_assert!(prev.is_none());
        }

        // Vertex colors come from the rainbow system covering each vertex
        // exactly once: the spine (minus the released pairs), the star of
        // x over the released pairs, and the leftover vertices through x.
        let mut placeholders: Vec<(usize, usize)> = (0..st.spine_len)
            .filter(|p| !excluded_pairs.contains(p))
            .map(|p| norm(st.xi[p], st.yi[p]))
            .collect();
        if self.odd {
            let mut released: Vec<usize> = excluded_pairs.iter().copied().collect();
            released.sort_unstable();
            for p in released {
                placeholders.push(norm(x, st.xi[p]));
                placeholders.push(norm(x, st.yi[p]));
            }
            placeholders.push(norm(x, st.xi[self.m - 1]));
            placeholders.push(norm(x, st.yi[self.m - 2]));
            placeholders.push(norm(x, st.yi[self.m - 1]));
        } else {
            placeholders.push(norm(x, st.xi[self.m - 1]));
            placeholders.push(norm(x, st.yi[self.m - 1]));
        }
        let mut vertex_colors = vec![0 as Color; self.n];
        let mut seen_colors: HashSet<Color> = HashSet::new();
        for &(u, v) in &placeholders {
            let Some(&c) = all.get(&norm(u, v)) else {
                return Err(self.fail(
                    5,
                    "step5.placeholder",
                    format!("placeholder edge ({u},{v}) ended up uncolored"),
                ));
            };
            if !seen_colors.insert(c) {
                return Err(self.fail(
                    5,
                    "step5.placeholder",
                    format!("placeholder color {c} repeats"),
                ));
            }
            for w in [u, v] {
                if w < self.n {
                    assert_eq!(vertex_colors[w], 0, "each vertex has one placeholder");
                    vertex_colors[w] = c;
                }
            }
        }
        assert!(
            vertex_colors.iter().all(|&c| c != 0),
            "placeholders cover every vertex"
        );

        let mut edge_colors: HashMap<(usize, usize), Color> =
            HashMap::with_capacity(self.g.m());
        for &(u, v) in self.g.edges() {
            let Some(&c) = all.get(&norm(u, v)) else {
                return Err(self.fail(
                    5,
                    "step5.coverage",
                    format!("graph edge ({u},{v}) ended up uncolored"),
                ));
            };
            edge_colors.insert(norm(u, v), c);
        }
        let tc = TotalColoring {
            k: self.r + 2,
            vertex_colors,
            edge_colors,
        };
        if let Err(v) = verify_total_coloring(&tc, self.g, self.r + 2) {
            return Err(self.fail(5, "step5.verification", format!("{v:?}")));
        }
        self.report.note_step(
            "step5",
            t.elapsed().as_millis(),
            vec![format!(
                "{} cut edges under {} closing colors, {} reserved pairs",
                rest.len(),
                k5,
                m2.len()
            )],
        );
        st.hq = Some(hq);
        st.phi = Some(phi);
        Ok(tc)
    }
}

/// Path-exchange machinery for step 3.
struct Exchanger<'a> {
    hq: &'a Hypergraph,
    qg: &'a Graph,
    side_a: &'a [bool],
    protected: &'a HashSet<EdgeId>,
    banned: &'a [bool],
    block_b: &'a [bool],
    /// Per-vertex degree cap for edges worth uncoloring.
    cap: f64,
    deg_own: Vec<usize>,
    count_a: usize,
    count_b: usize,
}

/// One admissible arc at v: an uncolored edge v-w across the cut followed
/// by w's intra-side edge w-w2 of the working color.
#[derive(Clone, Copy)]
struct Arc {
    w: usize,
    w2: usize,
    uncolored: EdgeId,
    colored: EdgeId,
}

impl<'a> Exchanger<'a> {
    fn track_uncolored(&mut self, u: usize, v: usize) {
        self.deg_own[u] += 1;
        self.deg_own[v] += 1;
        if self.side_a[u] {
            self.count_a += 1;
        } else {
            self.count_b += 1;
        }
    }

    /// An intra-side edge is worth uncoloring while its endpoints stay
    /// below the degree cap and clear of the released block.
    fn removable(&self, u: usize, v: usize) -> bool {
        (self.deg_own[u] as f64) < self.cap
            && (self.deg_own[v] as f64) < self.cap
            && !self.block_b[u]
            && !self.block_b[v]
    }

    fn arcs(&self, phi: &PartialEdgeColoring, v: usize, c: Color, e_c: (usize, usize)) -> Vec<Arc> {
        let mut out = Vec::new();
        for &w in self.qg.neighbors(v) {
            if self.side_a[w] == self.side_a[v]
                || self.banned[w]
                || w == e_c.0
                || w == e_c.1
            {
                continue;
            }
            let uncolored = self.hq.edge_between(v, w).expect("Q edge");
            if phi.color_of(uncolored).is_some() || self.protected.contains(&uncolored) {
                continue;
            }
            let Some(colored) = phi.edge_with_color_at(w, c) else { continue };
            let w2 = self.hq.other_end(colored, w);
            if self.side_a[w2] != self.side_a[w]
                || self.banned[w2]
                || w2 == e_c.0
                || w2 == e_c.1
                || !self.removable(w, w2)
            {
                continue;
            }
            out.push(Arc { w, w2, uncolored, colored });
        }
        out
    }

    fn apply_uncolor(&mut self, phi: &mut PartialEdgeColoring, id: EdgeId) {
        phi.unassign(self.hq, id);
        let e = self.hq.edge(id);
        self.track_uncolored(e[0], e[1]);
    }

    /// Deficient pair on opposite sides: a 5-edge alternating path
    /// a w1 w2 v2 v1 b uncoloring one intra edge per side.
    fn exchange_cross(
        &mut self,
        phi: &mut PartialEdgeColoring,
        c: Color,
        e_c: (usize, usize),
        a: usize,
        b: usize,
    ) -> bool {
        // Arcs at a land on b's side; key them by the far endpoint.
        let mut reach_a: BTreeMap<usize, Arc> = BTreeMap::new();
        for arc in self.arcs(phi, a, c, e_c) {
            reach_a.entry(arc.w2).or_insert(arc);
        }
        for arc_b in self.arcs(phi, b, c, e_c) {
            let v2 = arc_b.w2;
            for &w2 in self.qg.neighbors(v2) {
                if self.side_a[w2] != self.side_a[b] || self.banned[w2] || w2 == e_c.0 || w2 == e_c.1
                {
                    continue;
                }
                let Some(mid) = self.hq.edge_between(v2, w2) else { continue };
                if phi.color_of(mid).is_some() || self.protected.contains(&mid) {
                    continue;
                }
                let Some(arc_a) = reach_a.get(&w2).copied() else { continue };
                self.apply_uncolor(phi, arc_b.colored);
                self.apply_uncolor(phi, arc_a.colored);
                phi.assign(self.hq, arc_a.uncolored, c);
                phi.assign(self.hq, mid, c);
                phi.assign(self.hq, arc_b.uncolored, c);
                return true;
            }
        }
        false
    }

    /// Deficient pair on the same side: a 7-edge alternating path
    /// a w1 w2 v2 v2* w2* w1* a2 uncoloring one edge on the pair's side and
    /// two on the other.
    fn exchange_same_side(
        &mut self,
        phi: &mut PartialEdgeColoring,
        c: Color,
        e_c: (usize, usize),
        a: usize,
        a2: usize,
    ) -> bool {
        let mut reach_a: BTreeMap<usize, Arc> = BTreeMap::new();
        for arc in self.arcs(phi, a, c, e_c) {
            reach_a.entry(arc.w2).or_insert(arc);
        }
        for far in self.arcs(phi, a2, c, e_c) {
            // far: a2 - far.w (uncolored), far.w - far.w2 colored c.
            for step in self.arcs(phi, far.w2, c, e_c) {
                // step: far.w2 - step.w (uncolored), step.w - step.w2 colored c,
                // both on the pair's own side.
                let v2 = step.w2;
                for &w2 in self.qg.neighbors(v2) {
                    if self.side_a[w2] == self.side_a[a]
                        || self.banned[w2]
                        || w2 == e_c.0
                        || w2 == e_c.1
                        || w2 == far.w
                        || w2 == far.w2
                    {
                        continue;
                    }
                    let Some(mid) = self.hq.edge_between(v2, w2) else { continue };
                    if phi.color_of(mid).is_some() || self.protected.contains(&mid) {
                        continue;
                    }
                    let Some(arc_a) = reach_a.get(&w2).copied() else { continue };
                    debug_assert!(arc_a.w != far.w && arc_a.w != far.w2);
                    self.apply_uncolor(phi, arc_a.colored);
                    self.apply_uncolor(phi, step.colored);
                    self.apply_uncolor(phi, far.colored);
                    phi.assign(self.hq, arc_a.uncolored, c);
                    phi.assign(self.hq, mid, c);
                    phi.assign(self.hq, step.uncolored, c);
                    phi.assign(self.hq, far.uncolored, c);
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random_regular;

    /// r-regular circulant graph: v joined to v +- 1..=r/2 (mod n).
    fn circulant(n: usize, r: usize) -> Graph {
        assert_eq!(r % 2, 0);
        let mut edges = Vec::new();
        for v in 0..n {
            for d in 1..=r / 2 {
                edges.push(norm(v, (v + d) % n));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    fn step_failure(err: PipelineError) -> StepFailure {
        match err {
            PipelineError::Step(f) => *f,
            other => panic!("expected step failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let path = Graph::from_edges(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(matches!(
            total_color_dense_regular(&path, 0.3, Mode::Opportunistic, 1),
            Err(PipelineError::Precondition(_))
        ));
        let k8 = Graph::complete(8);
        assert!(matches!(
            total_color_dense_regular(&k8, 0.3, Mode::Opportunistic, 1),
            Err(PipelineError::Precondition(_))
        ));
        let c = circulant(20, 14);
        assert!(matches!(
            total_color_dense_regular(&c, 1.5, Mode::Opportunistic, 1),
            Err(PipelineError::Precondition(_))
        ));
        // 14 < (1 + 0.5) * 20 / 2.
        assert!(matches!(
            total_color_dense_regular(&c, 0.5, Mode::Opportunistic, 1),
            Err(PipelineError::Precondition(_))
        ));
    }

    #[test]
    fn strict_mode_reports_first_failing_margin() {
        let g = circulant(2000, 1400);
        let f = step_failure(
            total_color_dense_regular(&g, 0.4, Mode::Strict, 7).unwrap_err(),
        );
        assert_eq!(f.report.k, 755);
        assert_eq!(f.report.ell, 318);
        assert_eq!(f.step, 3);
        assert_eq!(f.inequality, "margin.step3.n1_margin");
        assert!(f.report.checks.iter().any(|c| c.name == "margin.step5.m2_bound"));
    }

    #[test]
    fn small_even_order_fails_fast_at_the_last_step() {
        let g = circulant(200, 140);
        let f = step_failure(
            total_color_dense_regular(&g, 0.3, Mode::Opportunistic, 7).unwrap_err(),
        );
        assert_eq!(f.step, 5);
        assert_eq!(f.inequality, "step5.reserved_fit");
    }

    #[test]
    fn small_odd_order_fails_fast_at_the_rearrangement() {
        let g = circulant(201, 140);
        let f = step_failure(
            total_color_dense_regular(&g, 0.3, Mode::Opportunistic, 7).unwrap_err(),
        );
        assert_eq!(f.step, 2);
        assert_eq!(f.inequality, "step2.m1_capacity");
    }

    #[test]
    fn colors_a_dense_even_order_graph_with_r_plus_2_colors() {
        let g = gen_random_regular(600, 420, 42).unwrap();
        let (tc, report) =
            total_color_dense_regular(&g, 0.3, Mode::Opportunistic, 42).unwrap();
        verify_total_coloring(&tc, &g, 422).unwrap();
        assert!(report.success);
        assert!(report.exchanges > 0);
        assert_eq!(report.steps.len(), 6);
    }
}
