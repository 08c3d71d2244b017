//! Simulation campaigns: generate graphs, resolve sampled prefixes with a
//! set of mechanisms and collect one CSV row per measurement.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{generate, ArrivalTrace, GeneratorParams};
use crate::graph::{active_nodes, NominationGraph};
use crate::resolvers::{resolve, resolve_single, resolve_splittable, GreedyOnline, Mechanism};

/// Sweep point reserved for the arrival coins, shared by every point of a run.
const ARRIVAL_POINT: u64 = u64::MAX;
/// Sweep point of the single-nomination companion graph in comparisons.
const SINGLE_POINT: u64 = u64::MAX - 1;
/// Offset of the seeds handed to the random mechanism.
const RANDOM_POINT: u64 = 1 << 32;

/// Seed for `(run, point)` under `master`: a ChaCha8 stream per run, one
/// 64-bit word per sweep point.
pub fn derive_seed(master: u64, run: u64, point: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run);
    rng.set_word_pos(u128::from(point) * 2);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub d: f64,
    pub gamma: f64,
    pub voter_bias: bool,
    /// Nominations per delegator; a list for k sweeps.
    pub ks: Vec<usize>,
    /// Probabilities of a second nomination, for p sweeps.
    pub p_twos: Vec<f64>,
    pub t_max: usize,
    pub sample_every: usize,
    pub runs: usize,
    pub mechanisms: Vec<Mechanism>,
    pub master_seed: u64,
    /// Seconds after which a mechanism is dropped for the rest of a run.
    pub time_budget: Option<f64>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            d: 0.5,
            gamma: 1.0,
            voter_bias: false,
            ks: vec![2],
            p_twos: Vec::new(),
            t_max: 100,
            sample_every: 10,
            runs: 10,
            mechanisms: vec![
                Mechanism::Single,
                Mechanism::Optimal,
                Mechanism::Greedy,
                Mechanism::Random,
            ],
            master_seed: 0,
            time_budget: None,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.t_max == 0 || self.sample_every == 0 {
            return bad("t and sample_every must be at least 1");
        }
        if self.ks.is_empty() {
            return bad("no k given");
        }
        if self.mechanisms.is_empty() {
            return bad("no mechanisms given");
        }
        if self.time_budget.is_some_and(|b| b.is_nan() || b <= 0.0) {
            return bad("time budget must be positive");
        }
        for &k in &self.ks {
            self.params(k, None, 0).validate()?;
        }
        for &p in &self.p_twos {
            self.params(2, Some(p), 0).validate()?;
        }
        Ok(())
    }

    /// Multiples of `sample_every` up to `t_max`, and `t_max` itself.
    pub fn schedule(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (1..=self.t_max / self.sample_every)
            .map(|i| i * self.sample_every)
            .collect();
        if s.last() != Some(&self.t_max) {
            s.push(self.t_max);
        }
        s
    }

    fn params(&self, k: usize, p_two: Option<f64>, seed: u64) -> GeneratorParams {
        let mut p = GeneratorParams::new(self.d, k, self.gamma, seed).with_voter_bias(self.voter_bias);
        if let Some(x) = p_two {
            p = p.with_p_two(x);
        }
        p
    }
}

/// One measurement. Column order is the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub mechanism: String,
    pub run: usize,
    pub t: usize,
    /// Maximum weight, or maximum congestion for the splittable relaxation.
    pub max_weight: f64,
    pub utilized_votes: u64,
    pub wall_time_seconds: f64,
    pub d: f64,
    pub gamma: f64,
    pub k: usize,
    pub p_two: Option<f64>,
    /// Seed of the graph the row was measured on.
    pub seed: u64,
}

pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_to(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    write_records(std::fs::File::create(path)?, records)
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// One generated graph family of a campaign.
struct Point {
    index: u64,
    k: usize,
    p_two: Option<f64>,
    suffix: String,
}

/// How graphs are resolved at each sampled step.
#[derive(Clone, Copy, PartialEq)]
enum Replay {
    /// Greedy follows the arrivals incrementally; single runs on its own
    /// one-nomination graph.
    Online,
    /// Every mechanism resolves the snapshot from scratch.
    Snapshot,
}

fn simulate(plan: &ExperimentPlan, points: &[Point], schedule: &[usize], replay: Replay) -> Result<Vec<ExperimentRecord>> {
    let jobs: Vec<(&Point, usize)> = points
        .iter()
        .flat_map(|p| (0..plan.runs).map(move |r| (p, r)))
        .collect();
    let results: Vec<Result<Vec<ExperimentRecord>>> = jobs
        .par_iter()
        .map(|&(point, run)| simulate_run(plan, point, run, schedule, replay))
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn simulate_run(
    plan: &ExperimentPlan,
    point: &Point,
    run: usize,
    schedule: &[usize],
    replay: Replay,
) -> Result<Vec<ExperimentRecord>> {
    let master = plan.master_seed;
    let t_max = *schedule.last().expect("schedule is never empty");
    let arrival = derive_seed(master, run as u64, ARRIVAL_POINT);
    let seed = derive_seed(master, run as u64, point.index);
    let params = plan.params(point.k, point.p_two, seed).with_arrival_seed(arrival);
    let (graph, trace) = generate(&params, t_max)?;

    let single = if replay == Replay::Online && plan.mechanisms.contains(&Mechanism::Single) {
        let seed = derive_seed(master, run as u64, SINGLE_POINT);
        let p = plan.params(1, None, seed).with_arrival_seed(arrival);
        Some((generate(&p, t_max)?.0, seed))
    } else {
        None
    };

    let mut online = GreedyOnline::new();
    let mut online_time = 0.0;
    let mut dropped = vec![false; plan.mechanisms.len()];
    let mut rows = Vec::new();
    for (sample, &t) in schedule.iter().enumerate() {
        let prefix = graph.prefix(t)?;
        if replay == Replay::Online && plan.mechanisms.contains(&Mechanism::Greedy) {
            let start = Instant::now();
            for event in &trace.events[online.len()..t] {
                online.push(event)?;
            }
            online_time += start.elapsed().as_secs_f64();
        }
        for (m_index, &m) in plan.mechanisms.iter().enumerate() {
            if dropped[m_index] {
                continue;
            }
            let random_seed = derive_seed(master, run as u64, RANDOM_POINT + sample as u64);
            let measured = match (m, replay, &single) {
                (Mechanism::Single, Replay::Online, Some((g1, s1))) => {
                    measure_confluent(&g1.prefix(t)?, m, 0).map(|x| (x, 1, None, *s1))
                }
                (Mechanism::Greedy, Replay::Online, _) => Ok((
                    (online.max_weight() as f64, t as u64, online_time),
                    point.k,
                    point.p_two,
                    seed,
                )),
                _ => measure(&prefix, m, random_seed).map(|x| (x, point.k, point.p_two, seed)),
            };
            let ((max_weight, utilized_votes, wall), k, p_two, row_seed) = match measured {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("run {run}: {} failed at t={t}: {e}", m.name());
                    dropped[m_index] = true;
                    continue;
                }
            };
            rows.push(ExperimentRecord {
                mechanism: format!("{}{}", m.name(), point.suffix),
                run,
                t,
                max_weight,
                utilized_votes,
                wall_time_seconds: wall,
                d: plan.d,
                gamma: plan.gamma,
                k,
                p_two,
                seed: row_seed,
            });
            if plan.time_budget.is_some_and(|b| wall > b) {
                dropped[m_index] = true;
            }
        }
    }
    Ok(rows)
}

/// `(max weight, utilized votes, wall time)` of one mechanism on a graph.
fn measure(g: &NominationGraph, m: Mechanism, seed: u64) -> Result<(f64, u64, f64)> {
    if m == Mechanism::Splittable {
        let start = Instant::now();
        let s = resolve_splittable(g);
        let wall = start.elapsed().as_secs_f64();
        return Ok((s.max_congestion, active_nodes(g).len() as u64, wall));
    }
    measure_confluent(g, m, seed)
}

fn measure_confluent(g: &NominationGraph, m: Mechanism, seed: u64) -> Result<(f64, u64, f64)> {
    let r = if m == Mechanism::Single {
        resolve_single(g)?
    } else {
        resolve(g, m, seed)?
    };
    Ok((r.max_weight() as f64, r.report.utilized_votes, r.wall_time))
}

fn plain_point(k: usize) -> Point {
    Point {
        index: 0,
        k,
        p_two: None,
        suffix: String::new(),
    }
}

/// Single delegation on a one-nomination graph against the other mechanisms
/// on a graph with `ks[0]` nominations, sharing the arrival coins.
pub fn run_comparison(plan: &ExperimentPlan) -> Result<Vec<ExperimentRecord>> {
    plan.validate()?;
    simulate(plan, &[plain_point(plan.ks[0])], &plan.schedule(), Replay::Online)
}

/// The plan's mechanisms for every `k` in `ks`. Rows are labelled like
/// `optimal_k2`.
pub fn run_k_sweep(plan: &ExperimentPlan) -> Result<Vec<ExperimentRecord>> {
    plan.validate()?;
    let points: Vec<Point> = plan
        .ks
        .iter()
        .enumerate()
        .map(|(i, &k)| Point {
            index: i as u64,
            k,
            p_two: None,
            suffix: format!("_k{k}"),
        })
        .collect();
    simulate(plan, &points, &plan.schedule(), Replay::Snapshot)
}

/// The plan's mechanisms for every second-nomination probability in
/// `p_twos`. Rows are labelled like `optimal_p0.5`.
pub fn run_p_sweep(plan: &ExperimentPlan) -> Result<Vec<ExperimentRecord>> {
    plan.validate()?;
    if plan.p_twos.is_empty() {
        return Err(Error::InvalidParams("no p_two values given".into()));
    }
    let points: Vec<Point> = plan
        .p_twos
        .iter()
        .enumerate()
        .map(|(i, &p)| Point {
            index: i as u64,
            k: 2,
            p_two: Some(p),
            suffix: format!("_p{p}"),
        })
        .collect();
    simulate(plan, &points, &plan.schedule(), Replay::Snapshot)
}

/// Maximum weight of every mechanism at a single step, one row per run.
pub fn run_histogram(plan: &ExperimentPlan, t_snapshot: usize) -> Result<Vec<ExperimentRecord>> {
    plan.validate()?;
    if t_snapshot == 0 {
        return Err(Error::InvalidParams("snapshot step must be at least 1".into()));
    }
    simulate(plan, &[plain_point(plan.ks[0])], &[t_snapshot], Replay::Snapshot)
}

/// Wall time of every mechanism on growing prefixes. A mechanism is dropped
/// from a run once it exceeds the time budget.
pub fn run_bench(plan: &ExperimentPlan) -> Result<Vec<ExperimentRecord>> {
    plan.validate()?;
    simulate(plan, &[plain_point(plan.ks[0])], &plan.schedule(), Replay::Snapshot)
}

/// Replay the first `t` arrivals with the online greedy mechanism.
pub fn greedy_prefix(trace: &ArrivalTrace, t: usize) -> Result<GreedyOnline> {
    let mut online = GreedyOnline::new();
    for event in trace.events.iter().take(t) {
        online.push(event)?;
    }
    Ok(online)
}
