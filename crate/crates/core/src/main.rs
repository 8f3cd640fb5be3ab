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

//! Command-line front end: total-coloring runs, verification, instance
//! generation, batch benchmarks, and the raw edge-coloring extension
//! engine. JSON for colorings and reports, CSV for benchmarks; stdout
//! carries a human-readable summary only.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 structured step
//! failure from the dense pipeline.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use totalchroma::coloring::{ColoringJson, TotalColoring, verify_total_coloring};
use totalchroma::extension::extend_with_palette;
use totalchroma::graph::{gen_random_regular, parse_graph, serialize_graph, Graph};
use totalchroma::hypergraph::parse_hypergraph;
use totalchroma::totalizer::{
    general_budget, total_color_dense_regular, total_color_general, Mode, PipelineError,
    RunReport,
};

#[derive(Parser)]
#[command(name = "totalchroma", version, about = "Total-coloring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    /// Bound of max degree plus twice the class count; any graph.
    General,
    /// Degree-plus-two pipeline for dense regular graphs.
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Refuse to run unless every counting margin holds.
    Strict,
    /// Run the construction regardless and report concrete infeasibility.
    Opportunistic,
}

#[derive(Subcommand)]
enum Command {
    /// Totally color a graph and write the coloring plus a run report.
    Total {
        /// Graph file (`p <n> <m>` header, `e <u> <v>` lines).
        input: PathBuf,
        #[arg(long, value_enum, default_value = "general")]
        algorithm: Algorithm,
        /// Density parameter for the dense pipeline: requires 2r >= (1+eps)n.
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, value_enum, default_value = "strict")]
        mode: ModeArg,
        /// RNG seed; falls back to TOTALCHROMA_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the coloring JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the run report JSON (ledger included on failure).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a coloring file against a graph file.
    Verify {
        graph: PathBuf,
        coloring: PathBuf,
        /// Largest color allowed; defaults to the coloring's own palette.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Generate a random regular graph file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the dense pipeline across sizes and write aggregate CSV.
    Bench {
        /// Comma-separated vertex counts, e.g. 200,400,800.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Color a hypergraph's edges, keeping the listed edge ids rainbow.
    Extend {
        /// Hypergraph file (`ph <n> <m>` header, `he <v1> <v2> ...` lines).
        input: PathBuf,
        /// Comma-separated edge ids that must receive distinct colors.
        #[arg(long, value_delimiter = ',')]
        reserved: Vec<usize>,
        /// Palette size; defaults to max_degree + 2*rank - 1.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn env_seed() -> u64 {
    std::env::var("TOTALCHROMA_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn read_graph(path: &PathBuf) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_total(
    input: PathBuf,
    algorithm: Algorithm,
    eps: f64,
    mode: ModeArg,
    seed: u64,
    out: Option<PathBuf>,
    report_path: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let g = read_graph(&input)?;
    let (tc, report): (TotalColoring, RunReport) = match algorithm {
        Algorithm::General => {
            let tc = total_color_general(&g).map_err(|e| e.to_string())?;
            let mut report = RunReport {
                n: g.n(),
                r: g.max_degree(),
                mode: "general".to_string(),
                k: tc.k,
                success: true,
                ..RunReport::default()
            };
            report.check(
                "general.budget",
                tc.k as f64,
                "<=",
                general_budget(&g) as f64,
            );
            (tc, report)
        }
        Algorithm::Dense => {
            let mode = match mode {
                ModeArg::Strict => Mode::Strict,
                ModeArg::Opportunistic => Mode::Opportunistic,
            };
            match total_color_dense_regular(&g, eps, mode, seed) {
                Ok(pair) => pair,
                Err(PipelineError::Precondition(msg)) => return Err(msg),
                Err(PipelineError::Step(fail)) => {
                    println!(
                        "step {} failed: {} ({})",
                        fail.step, fail.inequality, fail.details
                    );
                    for c in &fail.report.checks {
                        println!(
                            "  {} {} {} {}  [{}]",
                            c.name,
                            c.lhs,
                            c.cmp,
                            c.rhs,
                            if c.pass { "pass" } else { "FAIL" }
                        );
                    }
                    if let Some(path) = &report_path {
                        write_json(path, &*fail)?;
                    }
                    return Ok(ExitCode::from(2));
                }
            }
        }
    };
    verify_total_coloring(&tc, &g, tc.k).map_err(|v| format!("output failed check: {v}"))?;
    println!(
        "colored n={} m={} with {} colors (verified)",
        g.n(),
        g.m(),
        tc.k
    );
    if let Some(path) = &out {
        write_json(path, &ColoringJson::from_total(&tc))?;
    }
    if let Some(path) = &report_path {
        write_json(path, &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(graph: PathBuf, coloring: PathBuf, budget: Option<usize>) -> Result<ExitCode, String> {
    let g = read_graph(&graph)?;
    let text =
        fs::read_to_string(&coloring).map_err(|e| format!("{}: {e}", coloring.display()))?;
    let cj: ColoringJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let tc = cj.to_total();
    let budget = budget.unwrap_or(tc.k);
    match verify_total_coloring(&tc, &g, budget) {
        Ok(()) => {
            println!("valid total coloring within budget {budget}");
            Ok(ExitCode::SUCCESS)
        }
        Err(v) => {
            println!("invalid: {v}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_gen(n: usize, r: usize, seed: u64, out: PathBuf) -> Result<ExitCode, String> {
    let g = gen_random_regular(n, r, seed).map_err(|e| e.to_string())?;
    fs::write(&out, serialize_graph(&g)).map_err(|e| format!("{}: {e}", out.display()))?;
    println!("wrote {}-regular graph on {} vertices to {}", r, n, out.display());
    Ok(ExitCode::SUCCESS)
}

/// Degree near 0.7n that keeps the instance regular-feasible and, for odd
/// orders, even as the pipeline requires.
fn bench_degree(n: usize) -> usize {
    let mut r = (7 * n) / 10;
    if n % 2 == 1 {
        r &= !1;
    }
    r
}

fn cmd_bench(sizes: Vec<usize>, trials: usize, report: PathBuf, seed: u64) -> Result<ExitCode, String> {
    let mut csv = String::from("n,r,trial,seed,success,k,ell,millis,failed_step,failed_inequality\n");
    for &n in &sizes {
        let r = bench_degree(n);
        let eps = ((2.0 * r as f64 / n as f64) - 1.0) * 0.9;
        for trial in 0..trials {
            let trial_seed = seed ^ ((n as u64) << 20) ^ trial as u64;
            let g = gen_random_regular(n, r, trial_seed).map_err(|e| e.to_string())?;
            let start = std::time::Instant::now();
            let outcome = total_color_dense_regular(&g, eps, Mode::Opportunistic, trial_seed);
            let millis = start.elapsed().as_millis();
            let row = match outcome {
                Ok((tc, rep)) => {
                    verify_total_coloring(&tc, &g, r + 2)
                        .map_err(|v| format!("n={n} trial={trial}: invalid output: {v}"))?;
                    format!("{n},{r},{trial},{trial_seed},true,{},{},{millis},,\n", rep.k, rep.ell)
                }
                Err(PipelineError::Step(fail)) => format!(
                    "{n},{r},{trial},{trial_seed},false,{},{},{millis},{},{}\n",
                    fail.report.k, fail.report.ell, fail.step, fail.inequality
                ),
                Err(PipelineError::Precondition(msg)) => return Err(msg),
            };
            print!("{row}");
            csv.push_str(&row);
        }
    }
    fs::write(&report, csv).map_err(|e| format!("{}: {e}", report.display()))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ExtendOutput {
    k: usize,
    /// `[edge id, color]` pairs in id order.
    colors: Vec<(usize, u32)>,
}

fn cmd_extend(
    input: PathBuf,
    reserved: Vec<usize>,
    k: Option<usize>,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&input).map_err(|e| format!("{}: {e}", input.display()))?;
    let h = parse_hypergraph(&text).map_err(|e| format!("{}: {e}", input.display()))?;
    let k = k.unwrap_or(h.max_degree() + 2 * h.rank() - 1);
    let phi = extend_with_palette(&h, &reserved, k, None).map_err(|e| e.to_string())?;
    let colors: Vec<(usize, u32)> = h
        .live_edges()
        .map(|id| (id, phi.color_of(id).expect("extension colors everything")))
        .collect();
    println!(
        "colored {} edges with palette {k}; {} reserved edges rainbow",
        colors.len(),
        reserved.len()
    );
    if let Some(path) = &out {
        write_json(path, &ExtendOutput { k, colors })?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Total {
            input,
            algorithm,
            eps,
            mode,
            seed,
            out,
            report,
        } => cmd_total(input, algorithm, eps, mode, seed.unwrap_or_else(env_seed), out, report),
        Command::Verify { graph, coloring, budget } => cmd_verify(graph, coloring, budget),
        Command::Gen { n, r, seed, out } => cmd_gen(n, r, seed.unwrap_or_else(env_seed), out),
        Command::Bench { sizes, trials, report, seed } => {
            cmd_bench(sizes, trials, report, seed.unwrap_or_else(env_seed))
        }
        Command::Extend { input, reserved, k, out } => cmd_extend(input, reserved, k, out),
    };
    match run {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
