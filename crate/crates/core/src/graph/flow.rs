use super::weights::validate_assignment;
use super::{compute_weights, AgentId, DelegationAssignment, NominationGraph};
use crate::error::{Error, Result};

/// Absolute tolerance for conservation checks and for treating an edge as
/// carrying flow.
pub const FLOW_TOLERANCE: f64 = 1e-6;

/// Per-edge flow values, indexed like the nomination lists.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Flow {
    pub values: Vec<Vec<f64>>,
}

impl Flow {
    pub fn zero(g: &NominationGraph) -> Self {
        Self {
            values: (0..g.len())
                .map(|a| vec![0.0; g.nominations(a).len()])
                .collect(),
        }
    }

    pub fn outflow(&self, agent: AgentId) -> f64 {
        self.values[agent].iter().sum()
    }

    /// Inflow of every agent.
    pub fn inflows(&self, g: &NominationGraph) -> Vec<f64> {
        let mut inflow = vec![0.0; g.len()];
        for (a, row) in self.values.iter().enumerate() {
            for (idx, &f) in row.iter().enumerate() {
                inflow[g.nominations(a)[idx]] += f;
            }
        }
        inflow
    }

    /// Congestion `1 + in(n)` at every agent.
    pub fn congestion(&self, g: &NominationGraph) -> Vec<f64> {
        self.inflows(g).into_iter().map(|x| 1.0 + x).collect()
    }

    /// Largest conservation violation over all delegators.
    pub fn conservation_error(&self, g: &NominationGraph) -> f64 {
        let inflow = self.inflows(g);
        g.delegators()
            .map(|a| (self.outflow(a) - 1.0 - inflow[a]).abs())
            .fold(0.0, f64::max)
    }
}

/// Route each resolved delegator's weight along its chosen edge.
pub fn delegation_to_flow(g: &NominationGraph, a: &DelegationAssignment) -> Result<Flow> {
    validate_assignment(g, a)?;
    if let Some(agent) = g.delegators().find(|&x| a.choice(x).is_none()) {
        return Err(Error::NotMaximal { agent });
    }
    let report = compute_weights(g, a)?;
    let mut flow = Flow::zero(g);
    for x in g.delegators() {
        let idx = a.choice(x).unwrap();
        flow.values[x][idx] = report.weight[x] as f64;
    }
    Ok(flow)
}

/// Drop zero-flow edges of a confluent flow to recover the delegation.
pub fn flow_to_delegation(g: &NominationGraph, f: &Flow) -> Result<DelegationAssignment> {
    if f.values.len() != g.len()
        || (0..g.len()).any(|a| f.values[a].len() != g.nominations(a).len())
    {
        return Err(Error::FlowShape);
    }
    for (agent, row) in f.values.iter().enumerate() {
        if row.iter().any(|x| !x.is_finite() || *x < -FLOW_TOLERANCE) {
            return Err(Error::NegativeFlow { agent });
        }
    }
    let inflow = f.inflows(g);
    let mut out = DelegationAssignment::unused(g.len());
    for agent in g.delegators() {
        let out_flow = f.outflow(agent);
        if (out_flow - 1.0 - inflow[agent]).abs() > FLOW_TOLERANCE {
            return Err(Error::Conservation {
                agent,
                out: out_flow,
                inflow: inflow[agent],
            });
        }
        let positive: Vec<usize> = f.values[agent]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > FLOW_TOLERANCE)
            .map(|(i, _)| i)
            .collect();
        if positive.len() != 1 {
            return Err(Error::NotConfluent {
                agent,
                positive: positive.len(),
            });
        }
        out.set(agent, Some(positive[0]));
    }
    Ok(out)
}
