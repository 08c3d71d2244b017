//! The preferential delegation process.
//!
//! Agents arrive one per time step. The first agent votes. Every later agent
//! delegates with probability `d`; a delegator nominates `k` agents (or one
//! or two when `p_two` is set), each drawn independently from the agents
//! inserted so far with probability proportional to `(indegree + 1)^gamma`.
//! With `voter_bias`, voters are weighted `(indegree + 2)^gamma` instead.
//! Indegrees count parallel edges and only change once the whole agent has
//! been inserted.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::graph::{AgentId, NominationGraph};

const TARGET_STREAM: u64 = 1;
const COUNT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Probability that an arriving agent delegates.
    pub d: f64,
    /// Nominations per delegator; ignored when `p_two` is set.
    pub k: usize,
    /// Indegree bias exponent.
    pub gamma: f64,
    pub voter_bias: bool,
    /// Probability of two nominations instead of one.
    pub p_two: Option<f64>,
    pub seed: u64,
    /// Seed for the vote/delegate coin flips only. Sharing it between two
    /// parameter sets couples their arrival sequences.
    pub arrival_seed: Option<u64>,
}

impl GeneratorParams {
    pub fn new(d: f64, k: usize, gamma: f64, seed: u64) -> Self {
        Self {
            d,
            k,
            gamma,
            voter_bias: false,
            p_two: None,
            seed,
            arrival_seed: None,
        }
    }

    pub fn with_p_two(mut self, p: f64) -> Self {
        self.p_two = Some(p);
        self
    }

    pub fn with_voter_bias(mut self, on: bool) -> Self {
        self.voter_bias = on;
        self
    }

    pub fn with_arrival_seed(mut self, seed: u64) -> Self {
        self.arrival_seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(Error::InvalidParams(format!("d must lie in (0, 1), got {}", self.d)));
        }
        if self.k < 1 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if let Some(p) = self.p_two {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("p_two must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arrival {
    Voter,
    /// Nomination targets in draw order.
    Delegator(Vec<AgentId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArrivalTrace {
    pub events: Vec<Arrival>,
}

impl ArrivalTrace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Check that every event only references agents inserted before it.
    pub fn validate(&self) -> Result<()> {
        for (step, ev) in self.events.iter().enumerate() {
            if let Arrival::Delegator(targets) = ev {
                if let Some(&target) = targets.iter().find(|&&t| t >= step) {
                    return Err(Error::FutureReference { step, target });
                }
                if targets.is_empty() {
                    return Err(Error::DelegatorWithoutNominations { agent: step });
                }
            }
        }
        Ok(())
    }

    pub fn to_graph(&self) -> Result<NominationGraph> {
        self.validate()?;
        let lists = self
            .events
            .iter()
            .map(|ev| match ev {
                Arrival::Voter => None,
                Arrival::Delegator(t) => Some(t.clone()),
            })
            .collect();
        NominationGraph::from_lists(lists)
    }

    /// One line per event: `V`, or `D` followed by the targets.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            match ev {
                Arrival::Voter => out.push('V'),
                Arrival::Delegator(targets) => {
                    out.push('D');
                    for t in targets {
                        write!(out, " {t}").unwrap();
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

impl FromStr for ArrivalTrace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut events = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = |reason: &str| Error::TraceFormat {
                line: i + 1,
                reason: reason.to_string(),
            };
            match parts.next() {
                Some("V") => {
                    if parts.next().is_some() {
                        return Err(bad("voter line carries targets"));
                    }
                    events.push(Arrival::Voter);
                }
                Some("D") => {
                    let targets = parts
                        .map(|p| p.parse::<AgentId>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| bad(&e.to_string()))?;
                    events.push(Arrival::Delegator(targets));
                }
                _ => return Err(bad("expected `V` or `D`")),
            }
        }
        let trace = Self { events };
        trace.validate()?;
        Ok(trace)
    }
}

fn attachment_weight(indegree: u64, is_voter: bool, params: &GeneratorParams) -> f64 {
    let offset = if is_voter && params.voter_bias { 2.0 } else { 1.0 };
    (indegree as f64 + offset).powf(params.gamma)
}

/// Run the process for `t` steps.
pub fn generate(params: &GeneratorParams, t: usize) -> Result<(NominationGraph, ArrivalTrace)> {
    params.validate()?;
    if t == 0 {
        return Err(Error::InvalidParams("t must be at least 1".into()));
    }
    let mut arrivals = ChaCha8Rng::seed_from_u64(params.arrival_seed.unwrap_or(params.seed));
    let mut targets_rng = ChaCha8Rng::seed_from_u64(params.seed);
    targets_rng.set_stream(TARGET_STREAM);
    let mut counts = ChaCha8Rng::seed_from_u64(params.seed);
    counts.set_stream(COUNT_STREAM);

    let uniform = params.gamma == 0.0;
    let mut indegree = vec![0u64; t];
    let mut is_voter = Vec::with_capacity(t);
    let mut sampler = Fenwick::with_capacity(t);
    let mut events = Vec::with_capacity(t);

    events.push(Arrival::Voter);
    is_voter.push(true);
    sampler.push(attachment_weight(0, true, params));

    for step in 1..t {
        if arrivals.gen_bool(params.d) {
            let count = match params.p_two {
                Some(p) => {
                    if counts.gen_bool(p) {
                        2
                    } else {
                        1
                    }
                }
                None => params.k,
            };
            let mut targets = Vec::with_capacity(count);
            for _ in 0..count {
                let j = if uniform {
                    targets_rng.gen_range(0..step)
                } else {
                    let total = sampler.total();
                    sampler.find(targets_rng.gen::<f64>() * total)
                };
                targets.push(j);
            }
            for &j in &targets {
                let before = attachment_weight(indegree[j], is_voter[j], params);
                indegree[j] += 1;
                let after = attachment_weight(indegree[j], is_voter[j], params);
                sampler.add(j, after - before);
            }
            events.push(Arrival::Delegator(targets));
            is_voter.push(false);
            sampler.push(attachment_weight(0, false, params));
        } else {
            events.push(Arrival::Voter);
            is_voter.push(true);
            sampler.push(attachment_weight(0, true, params));
        }
    }
    let trace = ArrivalTrace { events };
    let graph = trace.to_graph()?;
    Ok((graph, trace))
}

/// Fraction of delegators whose two nominations name the same agent.
pub fn identical_pair_fraction(g: &NominationGraph) -> Result<f64> {
    let mut delegators = 0usize;
    let mut identical = 0usize;
    for a in g.delegators() {
        let noms = g.nominations(a);
        if noms.len() != 2 {
            return Err(Error::NotTwoNominations {
                agent: a,
                count: noms.len(),
            });
        }
        delegators += 1;
        identical += usize::from(noms[0] == noms[1]);
    }
    if delegators == 0 {
        return Ok(0.0);
    }
    Ok(identical as f64 / delegators as f64)
}
