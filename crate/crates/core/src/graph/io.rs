use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AgentId, NominationGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub id: AgentId,
    pub voter: bool,
    #[serde(default)]
    pub nominations: Vec<AgentId>,
}

/// On-disk JSON form: `{"agents": [{"id": 0, "voter": true, "nominations": []}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub agents: Vec<AgentRecord>,
}

impl From<&NominationGraph> for GraphFile {
    fn from(g: &NominationGraph) -> Self {
        let agents = (0..g.len())
            .map(|id| AgentRecord {
                id,
                voter: g.is_voter(id),
                nominations: g.nominations(id).to_vec(),
            })
            .collect();
        Self { agents }
    }
}

impl TryFrom<GraphFile> for NominationGraph {
    type Error = Error;

    fn try_from(mut file: GraphFile) -> Result<Self> {
        let n = file.agents.len();
        file.agents.sort_by_key(|r| r.id);
        if file.agents.iter().enumerate().any(|(i, r)| r.id != i) {
            return Err(Error::NonContiguousIds {
                n,
                found: file.agents.iter().map(|r| r.id).collect(),
            });
        }
        let is_voter = file.agents.iter().map(|r| r.voter).collect();
        let nominations = file.agents.into_iter().map(|r| r.nominations).collect();
        NominationGraph::new(is_voter, nominations)
    }
}

impl NominationGraph {
    pub fn from_json(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile::from(self)).expect("graph serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let s = r#"{"agents":[{"id":0,"voter":true,"nominations":[]},{"id":1,"voter":false,"nominations":[0,0]}]}"#;
        let g = NominationGraph::from_json(s).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.nominations(1), &[0, 0]);
        assert_eq!(g.to_json(), s);
    }

    #[test]
    fn accepts_unordered_ids() {
        let s = r#"{"agents":[{"id":1,"voter":false,"nominations":[0]},{"id":0,"voter":true}]}"#;
        let g = NominationGraph::from_json(s).unwrap();
        assert!(g.is_voter(0));
    }

    #[test]
    fn rejects_gaps_and_invariant_violations() {
        let gap = r#"{"agents":[{"id":0,"voter":true},{"id":2,"voter":true}]}"#;
        assert!(matches!(
            NominationGraph::from_json(gap),
            Err(Error::NonContiguousIds { .. })
        ));
        let voter_edge = r#"{"agents":[{"id":0,"voter":true,"nominations":[1]},{"id":1,"voter":true}]}"#;
        assert!(matches!(
            NominationGraph::from_json(voter_edge),
            Err(Error::VoterWithNominations { agent: 0 })
        ));
        assert!(matches!(
            NominationGraph::from_json("{"),
            Err(Error::Json(_))
        ));
    }
}
