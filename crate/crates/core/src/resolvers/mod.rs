//! Mechanisms that turn a nomination graph into a delegation.
//!
//! Every mechanism works on the active subgraph and lifts its answer back to
//! the original ids, so inactive delegators always end up unused and the
//! result is maximal.

mod approx;
mod brute;
mod confluent;
mod greedy;
mod optimal;
mod random;
mod splittable;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use approx::resolve_approx;
pub use brute::{resolve_brute_force, BRUTE_FORCE_BUDGET};
pub use greedy::{resolve_greedy_generalized, resolve_greedy_online, GreedyOnline};
pub use optimal::resolve_optimal;
pub use random::resolve_random;
pub use splittable::{resolve_splittable, SplittableSolution};

use crate::error::{Error, Result};
use crate::graph::{
    compute_weights, shortest_path_assignment, ActiveSubgraph,
    DelegationAssignment, NominationGraph, WeightReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    /// The only delegation of a single-nomination graph.
    Single,
    Optimal,
    BruteForce,
    Approx,
    Greedy,
    Random,
    Splittable,
    Shortest,
}

impl Mechanism {
    pub const ALL: [Mechanism; 8] = [
        Mechanism::Single,
        Mechanism::Optimal,
        Mechanism::BruteForce,
        Mechanism::Approx,
        Mechanism::Greedy,
        Mechanism::Random,
        Mechanism::Splittable,
        Mechanism::Shortest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Single => "single",
            Mechanism::Optimal => "optimal",
            Mechanism::BruteForce => "brute_force",
            Mechanism::Approx => "approx",
            Mechanism::Greedy => "greedy",
            Mechanism::Random => "random",
            Mechanism::Splittable => "splittable",
            Mechanism::Shortest => "shortest",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name() == s || (s == "brute" && *m == Mechanism::BruteForce))
            .ok_or_else(|| Error::UnknownMechanism(s.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionResult {
    pub assignment: DelegationAssignment,
    pub report: WeightReport,
    pub mechanism: Mechanism,
    /// Seconds.
    pub wall_time: f64,
}

impl ResolutionResult {
    pub fn max_weight(&self) -> u64 {
        self.report.max_weight
    }
}

/// Lift an assignment of the active subgraph and score it on `g`.
pub(crate) fn finish(
    g: &NominationGraph,
    active: &ActiveSubgraph,
    sub: &DelegationAssignment,
    mechanism: Mechanism,
    start: Instant,
) -> Result<ResolutionResult> {
    let assignment = active.lift(sub);
    let report = compute_weights(g, &assignment)?;
    Ok(ResolutionResult {
        assignment,
        report,
        mechanism,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Delegate along shortest paths to the voters.
pub fn resolve_shortest(g: &NominationGraph) -> Result<ResolutionResult> {
    let start = Instant::now();
    let assignment = shortest_path_assignment(g);
    let report = compute_weights(g, &assignment)?;
    Ok(ResolutionResult {
        assignment,
        report,
        mechanism: Mechanism::Shortest,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// The forced delegation of a graph where every delegator names one agent.
/// On graphs with more options this is the shortest path forest.
pub fn resolve_single(g: &NominationGraph) -> Result<ResolutionResult> {
    let mut r = resolve_shortest(g)?;
    r.mechanism = Mechanism::Single;
    Ok(r)
}

/// Run a confluent mechanism by tag. The splittable relaxation has no
/// assignment and the online greedy needs an arrival order, so `Splittable`
/// is rejected and `Greedy` runs the generalized variant.
pub fn resolve(g: &NominationGraph, mechanism: Mechanism, seed: u64) -> Result<ResolutionResult> {
    match mechanism {
        Mechanism::Single => resolve_single(g),
        Mechanism::Optimal => resolve_optimal(g),
        Mechanism::BruteForce => resolve_brute_force(g),
        Mechanism::Approx => resolve_approx(g),
        Mechanism::Greedy => resolve_greedy_generalized(g),
        Mechanism::Random => resolve_random(g, seed),
        Mechanism::Shortest => resolve_shortest(g),
        Mechanism::Splittable => Err(Error::UnknownMechanism(
            "splittable has no confluent assignment; use resolve_splittable".into(),
        )),
    }
}
