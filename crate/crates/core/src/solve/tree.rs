use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::convert::ConvertedGame;
use crate::error::SolverError;
use crate::game::{validate_perfect_recall, InfosetTable, NodeKind, PlayerRole, Vefg};

const NONE: u32 = u32::MAX;

/// Which side of the zero-sum game a player is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Team or coordinator.
    Max,
    Min,
}

impl Side {
    pub(crate) fn index(self) -> usize {
        match self {
            Side::Max => 0,
            Side::Min => 1,
        }
    }

    pub(crate) fn other(self) -> Side {
        match self {
            Side::Max => Side::Min,
            Side::Min => Side::Max,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum TNode {
    Terminal(f64),
    Chance(Vec<(f64, usize)>),
    Decision { side: Side, children: Vec<usize> },
}

/// Two-player zero-sum game flattened for solving.
///
/// Strategies live on *strategy infosets*: the perfect-recall infosets, or
/// for the maximizer the coarser groups of a safe imperfect-recall
/// abstraction when one is supplied. Best responses always use the
/// perfect-recall infosets.
#[derive(Clone, Debug)]
pub struct TreeGame {
    pub(crate) nodes: Vec<TNode>,
    pub(crate) strat_of: Vec<u32>,
    pub(crate) strat_side: Vec<Side>,
    pub(crate) strat_offset: Vec<usize>,
    pub(crate) strat_names: Vec<String>,
    pub(crate) action_names: Vec<Vec<String>>,
    pub(crate) pr_of: Vec<u32>,
    pub(crate) pr_side: Vec<Side>,
    /// Per side, number of that side's decisions strictly above each node.
    pub(crate) own_depth: [Vec<u32>; 2],
}

impl TreeGame {
    pub fn new(game: &Vefg, groups: Option<&[Option<u32>]>) -> Result<Self, SolverError> {
        let players = game.players();
        let opp = game
            .opponent()
            .ok_or_else(|| SolverError::NotTwoPlayerZeroSum("no opponent".into()))?;
        if players.len() != 2 || players.contains(&PlayerRole::Chance) {
            return Err(SolverError::NotTwoPlayerZeroSum(format!("{} players", players.len())));
        }
        let side_of = |p: usize| if p == opp { Side::Min } else { Side::Max };
        let report = validate_perfect_recall(game);
        if let Some(v) = report.violations.first() {
            return Err(SolverError::ImperfectRecallPlayer(v.player));
        }
        let table = InfosetTable::build(game)?;

        let n = game.len();
        let mut nodes = Vec::with_capacity(n);
        for node in game.nodes() {
            nodes.push(match node.kind {
                NodeKind::Terminal { team_utility } => TNode::Terminal(team_utility),
                NodeKind::Chance => TNode::Chance(node.edges.iter().map(|e| (e.prob, e.child)).collect()),
                NodeKind::Decision { player } => {
                    TNode::Decision { side: side_of(player), children: node.edges.iter().map(|e| e.child).collect() }
                }
            });
        }

        let mut pr_of = vec![NONE; n];
        let mut own_depth = [vec![0u32; n], vec![0u32; n]];
        for (id, node) in game.nodes().iter().enumerate() {
            if let Some(i) = table.infoset(id) {
                pr_of[id] = i as u32;
            }
            if let Some(p) = node.parent {
                for side in [Side::Max, Side::Min] {
                    let step = match game.node(p).kind {
                        NodeKind::Decision { player } => u32::from(side_of(player) == side),
                        _ => 0,
                    };
                    own_depth[side.index()][id] = own_depth[side.index()][p] + step;
                }
            }
        }
        let pr_side = table.sets.iter().map(|s| side_of(s.player)).collect();

        // Strategy infosets, in order of first appearance.
        let mut strat_of = vec![NONE; n];
        let mut index: BTreeMap<(bool, u32), u32> = BTreeMap::new();
        let mut strat_side = Vec::new();
        let mut strat_offset = vec![0usize];
        let mut strat_names = Vec::new();
        let mut action_names = Vec::new();
        for (id, node) in game.nodes().iter().enumerate() {
            let NodeKind::Decision { player } = node.kind else { continue };
            let pr = pr_of[id];
            let key = match groups.and_then(|g| g.get(id).copied().flatten()) {
                Some(g) if side_of(player) == Side::Max => (true, g),
                _ => (false, pr),
            };
            let next = index.len() as u32;
            let s = *index.entry(key).or_insert(next);
            if s == next {
                let set = &table.sets[pr as usize];
                strat_side.push(side_of(player));
                strat_offset.push(strat_offset.last().copied().unwrap_or(0) + set.actions.len());
                strat_names.push(game.key_string(&set.key));
                action_names.push(set.actions.iter().map(|l| game.label(*l).to_string()).collect());
            }
            strat_of[id] = s;
        }
        Ok(TreeGame { nodes, strat_of, strat_side, strat_offset, strat_names, action_names, pr_of, pr_side, own_depth })
    }

    /// Solver view of a converted game, using its safe imperfect-recall
    /// groups when present.
    pub fn from_converted(cg: &ConvertedGame) -> Result<Self, SolverError> {
        TreeGame::new(&cg.game, cg.coordinator_groups.as_deref())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn strategy_infosets(&self) -> usize {
        self.strat_side.len()
    }

    pub fn actions(&self, s: usize) -> usize {
        self.strat_offset[s + 1] - self.strat_offset[s]
    }

    pub fn side(&self, s: usize) -> Side {
        self.strat_side[s]
    }

    /// Display key of a strategy infoset (its first perfect-recall member).
    pub fn infoset_name(&self, s: usize) -> &str {
        &self.strat_names[s]
    }

    pub fn action_names(&self, s: usize) -> &[String] {
        &self.action_names[s]
    }

    pub(crate) fn perfect_recall_infosets(&self) -> usize {
        self.pr_side.len()
    }
}

/// Behavioral profile: a distribution per strategy infoset.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub probs: Vec<Vec<f64>>,
}

impl Profile {
    pub fn uniform(tree: &TreeGame) -> Profile {
        Profile {
            probs: (0..tree.strategy_infosets())
                .map(|s| {
                    let k = tree.actions(s);
                    vec![1.0 / k as f64; k]
                })
                .collect(),
        }
    }

    pub(crate) fn check(&self, tree: &TreeGame, side: Option<Side>) -> Result<(), SolverError> {
        for s in 0..tree.strategy_infosets() {
            if side.is_some_and(|x| tree.side(s) != x) {
                continue;
            }
            match self.probs.get(s) {
                Some(p) if p.len() == tree.actions(s) => {}
                _ => return Err(SolverError::IncompleteProfile(s)),
            }
        }
        Ok(())
    }
}
