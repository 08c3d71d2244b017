use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("agent {agent}: voters must not nominate anyone")]
    VoterWithNominations { agent: AgentId },
    #[error("agent {agent}: delegators need at least one nomination")]
    DelegatorWithoutNominations { agent: AgentId },
    #[error("agent {agent} nominates unknown agent {target}")]
    UnknownTarget { agent: AgentId, target: AgentId },
    #[error("agent {agent} nominates itself")]
    SelfLoop { agent: AgentId },
    #[error("agent ids must be exactly 0..{n}, got {found:?}")]
    NonContiguousIds { n: usize, found: Vec<AgentId> },
    #[error("assignment covers {got} agents but the graph has {expected}")]
    AssignmentSize { expected: usize, got: usize },
    #[error("agent {agent}: invalid choice {choice}")]
    InvalidChoice { agent: AgentId, choice: usize },
    #[error("delegation cycle through agent {agent}")]
    Cycle { agent: AgentId },
    #[error("agent {agent} delegates but never reaches a voter")]
    DeadEnd { agent: AgentId },
    #[error("assignment is not maximal: delegator {agent} is unresolved")]
    NotMaximal { agent: AgentId },
    #[error("flow has the wrong shape for this graph")]
    FlowShape,
    #[error("flow on an edge of agent {agent} is negative or not finite")]
    NegativeFlow { agent: AgentId },
    #[error("flow is not confluent at agent {agent}: {positive} positive out-edges")]
    NotConfluent { agent: AgentId, positive: usize },
    #[error("flow conservation violated at agent {agent}: out {out} vs 1 + in {inflow}")]
    Conservation { agent: AgentId, out: f64, inflow: f64 },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("trace event {step} references agent {target}, which is not yet inserted")]
    FutureReference { step: usize, target: AgentId },
    #[error("malformed trace line {line}: {reason}")]
    TraceFormat { line: usize, reason: String },
    #[error("agent {agent} has {count} nominations, expected 2")]
    NotTwoNominations { agent: AgentId, count: usize },
    #[error("brute force budget exceeded: {delegators} delegators, {combinations} combinations")]
    BudgetExceeded { delegators: usize, combinations: u128 },
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("unknown mechanism `{0}`")]
    UnknownMechanism(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
