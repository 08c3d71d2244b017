use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use liquid_core::analysis::{alpha_sequence, expected_first_voter_weight, first_voter_bounds};
use liquid_core::experiments::{
    run_bench, run_comparison, run_histogram, run_k_sweep, run_p_sweep, write_records, write_records_to,
    ExperimentPlan, ExperimentRecord,
};
use liquid_core::generator::{generate, GeneratorParams};
use liquid_core::graph::{active_nodes, NominationGraph};
use liquid_core::resolvers::{resolve, resolve_splittable, Mechanism};
use serde_json::json;

#[derive(Parser)]
#[command(name = "liquid", version, about = "Resolve liquid democracy delegations and run simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph with the random arrival process
    Generate {
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Probability of a second nomination; replaces --k
        #[arg(long)]
        p_two: Option<f64>,
        #[arg(long)]
        voter_bias: bool,
        #[arg(long, default_value_t = 100)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Graph JSON; the arrival trace goes next to it with a `.trace` suffix
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolve a graph file with one mechanism and print a JSON summary
    Resolve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "optimal")]
        mechanism: Mechanism,
        /// Seed for the random mechanism
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the chosen nomination index of every agent to this JSON file
        #[arg(long)]
        emit_assignment: Option<PathBuf>,
    },
    /// Print the alpha sequence and the expected first voter weight as CSV
    Oracle {
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = 1000)]
        t: u64,
        #[arg(long, default_value_t = 100)]
        sample_every: u64,
    },
    /// Single delegation against mechanisms on multi-nomination graphs
    Compare(ExperimentArgs),
    /// Mechanisms across nomination counts
    SweepK(ExperimentArgs),
    /// Mechanisms across second-nomination probabilities
    SweepP(ExperimentArgs),
    /// Maximum weight of every run at step --t
    Histogram(ExperimentArgs),
    /// Wall time of mechanisms on growing prefixes
    Bench(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 0.5)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Nominations per delegator, comma separated for sweeps
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Second-nomination probabilities, comma separated
    #[arg(long, value_delimiter = ',')]
    p_two: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    t: usize,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 10)]
    sample_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    mechanisms: Vec<Mechanism>,
    /// CSV output; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    voter_bias: bool,
    #[arg(long)]
    time_budget_secs: Option<f64>,
}

impl ExperimentArgs {
    fn plan(&self, ks: &[usize], mechanisms: &[Mechanism]) -> ExperimentPlan {
        ExperimentPlan {
            d: self.d,
            gamma: self.gamma,
            voter_bias: self.voter_bias,
            ks: if self.k.is_empty() { ks.to_vec() } else { self.k.clone() },
            p_twos: self.p_two.clone(),
            t_max: self.t,
            sample_every: self.sample_every,
            runs: self.runs,
            mechanisms: if self.mechanisms.is_empty() {
                mechanisms.to_vec()
            } else {
                self.mechanisms.clone()
            },
            master_seed: self.seed,
            time_budget: self.time_budget_secs,
        }
    }
}

fn emit(records: &[ExperimentRecord], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_records_to(path, records).with_context(|| format!("writing {}", path.display()))?,
        None => write_records(io::stdout().lock(), records)?,
    }
    Ok(())
}

fn trace_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".trace");
    PathBuf::from(name)
}

fn run(cli: Cli) -> Result<()> {
    use Mechanism::*;
    match cli.command {
        Command::Generate {
            d,
            gamma,
            k,
            p_two,
            voter_bias,
            t,
            seed,
            out,
        } => {
            let mut params = GeneratorParams::new(d, k, gamma, seed).with_voter_bias(voter_bias);
            if let Some(p) = p_two {
                params = params.with_p_two(p);
            }
            let (g, trace) = generate(&params, t)?;
            g.save(&out).with_context(|| format!("writing {}", out.display()))?;
            std::fs::write(trace_path(&out), trace.to_text())?;
        }
        Command::Resolve {
            graph,
            mechanism,
            seed,
            emit_assignment,
        } => {
            let g = NominationGraph::load(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let summary = if mechanism == Splittable {
                let start = std::time::Instant::now();
                let s = resolve_splittable(&g);
                json!({
                    "mechanism": mechanism.name(),
                    "max_weight": s.max_congestion,
                    "utilized_votes": active_nodes(&g).len(),
                    "wall_time": start.elapsed().as_secs_f64(),
                    "ratio": [s.ratio.0, s.ratio.1],
                })
            } else {
                let r = resolve(&g, mechanism, seed)?;
                if let Some(path) = emit_assignment {
                    std::fs::write(&path, serde_json::to_string(r.assignment.choices())?)
                        .with_context(|| format!("writing {}", path.display()))?;
                }
                json!({
                    "mechanism": mechanism.name(),
                    "max_weight": r.max_weight(),
                    "utilized_votes": r.report.utilized_votes,
                    "wall_time": r.wall_time,
                })
            };
            println!("{summary}");
        }
        Command::Oracle {
            d,
            k_max,
            t,
            sample_every,
        } => {
            if sample_every == 0 || t == 0 {
                bail!("t and sample_every must be at least 1");
            }
            let alpha = alpha_sequence(d, k_max)?;
            println!("kind,d,n,value,lower,upper");
            for (i, a) in alpha.values.iter().enumerate() {
                println!("alpha,{d},{},{a},,", i + 1);
            }
            let mut steps: Vec<u64> = (1..=t / sample_every).map(|i| i * sample_every).collect();
            steps.insert(0, 1);
            if steps.last() != Some(&t) {
                steps.push(t);
            }
            steps.dedup();
            for s in steps {
                let (lo, hi) = first_voter_bounds(s, d)?;
                println!("expected_first_voter_weight,{d},{s},{},{lo},{hi}", expected_first_voter_weight(s, d)?);
            }
        }
        Command::Compare(args) => {
            let plan = args.plan(&[2], &[Single, Optimal, Greedy, Random]);
            emit(&run_comparison(&plan)?, args.out.as_deref())?;
        }
        Command::SweepK(args) => {
            let plan = args.plan(&[1, 2, 3], &[Optimal]);
            emit(&run_k_sweep(&plan)?, args.out.as_deref())?;
        }
        Command::SweepP(args) => {
            let mut plan = args.plan(&[2], &[Optimal]);
            if plan.p_twos.is_empty() {
                plan.p_twos = vec![0.0, 0.25, 0.5, 0.75, 1.0];
            }
            emit(&run_p_sweep(&plan)?, args.out.as_deref())?;
        }
        Command::Histogram(args) => {
            let plan = args.plan(&[2], &[Optimal, Approx, Greedy, Random, Splittable]);
            emit(&run_histogram(&plan, args.t)?, args.out.as_deref())?;
        }
        Command::Bench(args) => {
            let plan = args.plan(&[2], &[Optimal, Approx, Greedy, Random, Splittable]);
            emit(&run_bench(&plan)?, args.out.as_deref())?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
