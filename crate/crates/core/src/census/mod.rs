//! Node counts of converted games and closed-form size formulas.

mod formulas;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

pub use formulas::{
    count_basic, count_folded, count_normal_plans, count_pruned, exclusion_children, format_sci, level_profile,
    LevelProfile,
};

use crate::convert::{ConvertedGame, OriginRole};
use crate::error::GameError;
use crate::game::{InfosetTable, NodeKind};

/// Counts by node category of a converted game.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeCensus {
    pub coordinator_nodes: u64,
    pub adversary_nodes: u64,
    pub terminal_nodes: u64,
    /// Includes the chance nodes that play a prescribed action.
    pub chance_nodes: u64,
    pub chance_single_child: u64,
    pub total_nodes: u64,
    pub coordinator_infosets: u64,
    pub adversary_infosets: u64,
    /// Coordinator nodes split by the team member whose turn they replace.
    pub coordinator_nodes_by_member: Vec<u64>,
    /// Prescription chance nodes split the same way.
    pub prescription_chance_by_member: Vec<u64>,
    /// Prescription chance nodes with a single outcome.
    pub prescription_single_child: u64,
}

impl NodeCensus {
    /// Counts after merging single-outcome prescription chance nodes into
    /// the prescription edge above them.
    pub fn compacted(&self) -> NodeCensus {
        let gone = self.prescription_single_child;
        let mut c = self.clone();
        c.chance_nodes -= gone;
        c.chance_single_child -= gone;
        c.total_nodes -= gone;
        c.prescription_single_child = 0;
        c
    }

    pub fn coordinator_nodes_of(&self, member: usize) -> u64 {
        self.coordinator_nodes_by_member.get(member).copied().unwrap_or(0)
    }

    pub fn prescription_chance_of(&self, member: usize) -> u64 {
        self.prescription_chance_by_member.get(member).copied().unwrap_or(0)
    }

    pub(crate) fn bump_member(v: &mut Vec<u64>, member: u8) {
        let m = member as usize;
        if v.len() <= m {
            v.resize(m + 1, 0);
        }
        v[m] += 1;
    }

    pub(crate) fn finish_total(&mut self) {
        self.total_nodes = self.coordinator_nodes + self.adversary_nodes + self.terminal_nodes + self.chance_nodes;
    }
}

/// Census of a built converted game. Coordinator infosets follow the safe
/// imperfect-recall grouping when it has been applied.
pub fn census(cg: &ConvertedGame) -> Result<NodeCensus, GameError> {
    let mut c = NodeCensus::default();
    for (id, node) in cg.game.nodes().iter().enumerate() {
        match (&node.kind, cg.origin[id].role) {
            (NodeKind::Terminal { .. }, _) => c.terminal_nodes += 1,
            (NodeKind::Chance, role) => {
                c.chance_nodes += 1;
                let single = node.edges.len() == 1;
                if single {
                    c.chance_single_child += 1;
                }
                if let OriginRole::PrescriptionChance { member } = role {
                    NodeCensus::bump_member(&mut c.prescription_chance_by_member, member);
                    if single {
                        c.prescription_single_child += 1;
                    }
                }
            }
            (NodeKind::Decision { .. }, OriginRole::Coordinator { member }) => {
                c.coordinator_nodes += 1;
                NodeCensus::bump_member(&mut c.coordinator_nodes_by_member, member);
            }
            (NodeKind::Decision { .. }, _) => c.adversary_nodes += 1,
        }
    }
    c.finish_total();
    let table = InfosetTable::build(&cg.game)?;
    let coord = cg.game.player_index(crate::game::PlayerRole::Coordinator).unwrap_or(0);
    let opp = cg.game.opponent().unwrap_or(1);
    c.adversary_infosets = table.count_for(opp) as u64;
    c.coordinator_infosets = match &cg.coordinator_groups {
        Some(groups) => groups.iter().flatten().collect::<BTreeSet<_>>().len() as u64,
        None => table.count_for(coord) as u64,
    };
    Ok(c)
}
