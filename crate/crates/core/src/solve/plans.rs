use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::convert::PurePlan;
use crate::error::SolverError;
use crate::game::{validate_perfect_recall, InfosetId, InfosetTable, NodeId, NodeKind, Vefg};

/// A sequence: the last (infoset, action index) of a player, or the empty
/// sequence before the player's first decision.
type Seq = Option<(InfosetId, usize)>;

/// Sequence-form view of a game used by plan enumeration and the TMECor
/// oracles.
#[derive(Clone, Debug)]
pub struct PlanSpace {
    pub table: InfosetTable,
    players: usize,
    /// Parent sequence of every infoset.
    parent: Vec<Seq>,
    /// Infosets whose parent sequence is the key, per player.
    children: BTreeMap<(usize, Seq), Vec<InfosetId>>,
    /// Own depth (number of own earlier decisions) of every infoset.
    depth: Vec<usize>,
    pub terminals: Vec<NodeId>,
    /// Chance probability times team utility, per terminal.
    pub payoff: Vec<f64>,
    /// Decisions on the path to each terminal.
    path: Vec<Vec<(InfosetId, usize)>>,
    /// Last sequence of every player, per terminal.
    last: Vec<Vec<Seq>>,
}

impl PlanSpace {
    pub fn new(game: &Vefg) -> Result<Self, SolverError> {
        let report = validate_perfect_recall(game);
        if let Some(v) = report.violations.first() {
            return Err(SolverError::ImperfectRecallPlayer(v.player));
        }
        let table = InfosetTable::build(game)?;
        let np = game.players().len();
        let mut parent = vec![None; table.len()];
        let mut depth = vec![0usize; table.len()];
        let mut terminals = Vec::new();
        let mut payoff = Vec::new();
        let mut path = Vec::new();
        let mut last = Vec::new();
        // (node, chance reach, decisions so far, last sequence per player)
        let mut stack = vec![(game.root(), 1.0f64, Vec::new(), vec![None; np])];
        while let Some((n, c, decisions, seqs)) = stack.pop() {
            let node = game.node(n);
            match node.kind {
                NodeKind::Terminal { team_utility } => {
                    terminals.push(n);
                    payoff.push(c * team_utility);
                    path.push(decisions);
                    last.push(seqs);
                }
                NodeKind::Chance => {
                    for e in node.edges.iter().filter(|e| e.prob > 0.0) {
                        stack.push((e.child, c * e.prob, decisions.clone(), seqs.clone()));
                    }
                }
                NodeKind::Decision { player } => {
                    let i = table.infoset(n).expect("decision nodes have infosets");
                    parent[i] = seqs[player];
                    depth[i] = decisions.iter().filter(|d: &&(InfosetId, usize)| table.sets[d.0].player == player).count();
                    for (a, e) in node.edges.iter().enumerate() {
                        let mut d = decisions.clone();
                        d.push((i, a));
                        let mut s = seqs.clone();
                        s[player] = Some((i, a));
                        stack.push((e.child, c, d, s));
                    }
                }
            }
        }
        let mut children: BTreeMap<(usize, Seq), Vec<InfosetId>> = BTreeMap::new();
        for (i, s) in table.sets.iter().enumerate() {
            children.entry((s.player, parent[i])).or_default().push(i);
        }
        Ok(PlanSpace { table, players: np, parent, children, depth, terminals, payoff, path, last })
    }

    fn kids(&self, player: usize, seq: Seq) -> &[InfosetId] {
        self.children.get(&(player, seq)).map_or(&[], |v| v.as_slice())
    }

    fn check_player(&self, player: usize) -> Result<(), SolverError> {
        if player >= self.players {
            return Err(SolverError::Game(crate::error::GameError::UnknownPlayer(player)));
        }
        Ok(())
    }

    /// Number of reduced plans of `player`.
    pub fn count(&self, player: usize) -> Result<BigUint, SolverError> {
        self.check_player(player)?;
        Ok(self.count_below(player, None))
    }

    fn count_below(&self, player: usize, seq: Seq) -> BigUint {
        let mut total = BigUint::one();
        for &i in self.kids(player, seq) {
            let mut here = BigUint::zero();
            for a in 0..self.table.sets[i].actions.len() {
                here += self.count_below(player, Some((i, a)));
            }
            total *= here;
        }
        total
    }

    /// All reduced plans of `player`, refusing to list more than `limit`.
    pub fn plans(&self, player: usize, limit: u64) -> Result<Vec<PurePlan>, SolverError> {
        let count = self.count(player)?;
        if count > BigUint::from(limit) {
            return Err(SolverError::GameTooLarge(format!("player {player} has {count} reduced plans (limit {limit})")));
        }
        let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
        let mut plan = vec![None; self.table.len()];
        let mut pending = self.kids(player, None).to_vec();
        self.enumerate(player, &mut pending, &mut plan, &mut out);
        Ok(out)
    }

    /// Assigns every infoset in `pending` (and, recursively, the infosets
    /// its choices unlock) in all possible ways.
    fn enumerate(&self, player: usize, pending: &mut Vec<InfosetId>, plan: &mut Vec<Option<usize>>, out: &mut Vec<PurePlan>) {
        let Some(i) = pending.pop() else {
            out.push(PurePlan(plan.clone()));
            return;
        };
        for a in 0..self.table.sets[i].actions.len() {
            plan[i] = Some(a);
            let unlocked = self.kids(player, Some((i, a)));
            let before = pending.len();
            pending.extend_from_slice(unlocked);
            self.enumerate(player, pending, plan, out);
            pending.truncate(before);
        }
        plan[i] = None;
        pending.push(i);
    }

    /// True iff every decision of the given players on the path to terminal
    /// `z` agrees with `plan`.
    pub fn reaches(&self, plan: &PurePlan, players: &[usize], z: usize) -> bool {
        self.path[z]
            .iter()
            .filter(|(i, _)| players.contains(&self.table.sets[*i].player))
            .all(|&(i, a)| plan.0[i] == Some(a))
    }

    /// Best reduced plan of `player` when terminal `z` is worth `weight[z]`
    /// (already multiplied by every other factor of its probability).
    pub fn best_plan(&self, player: usize, weight: &[f64], maximize: bool) -> (f64, PurePlan) {
        let mut seq_value: BTreeMap<Seq, f64> = BTreeMap::new();
        for (z, w) in weight.iter().enumerate() {
            if *w != 0.0 {
                *seq_value.entry(self.last[z][player]).or_insert(0.0) += w;
            }
        }
        let mut order: Vec<InfosetId> = self.table.of_player(player).collect();
        order.sort_by_key(|&i| core::cmp::Reverse(self.depth[i]));
        let mut plan = vec![None; self.table.len()];
        let mut best_value = vec![0.0f64; self.table.len()];
        for i in order {
            let mut best: Option<(usize, f64)> = None;
            for a in 0..self.table.sets[i].actions.len() {
                let seq = Some((i, a));
                let v = seq_value.get(&seq).copied().unwrap_or(0.0)
                    + self.kids(player, seq).iter().map(|&j| best_value[j]).sum::<f64>();
                let better = match best {
                    None => true,
                    Some((_, b)) => if maximize { v > b } else { v < b },
                };
                if better {
                    best = Some((a, v));
                }
            }
            let (a, v) = best.expect("infosets have actions");
            plan[i] = Some(a);
            best_value[i] = v;
        }
        let value = seq_value.get(&None).copied().unwrap_or(0.0)
            + self.kids(player, None).iter().map(|&j| best_value[j]).sum::<f64>();
        (value, PurePlan(self.reduce(player, plan)))
    }

    /// Drops assignments at infosets the plan itself makes unreachable.
    fn reduce(&self, player: usize, plan: Vec<Option<usize>>) -> Vec<Option<usize>> {
        let mut out = vec![None; plan.len()];
        let mut stack = self.kids(player, None).to_vec();
        while let Some(i) = stack.pop() {
            if let Some(a) = plan[i] {
                out[i] = Some(a);
                stack.extend_from_slice(self.kids(player, Some((i, a))));
            }
        }
        out
    }

    pub fn parent_sequence(&self, i: InfosetId) -> Option<(InfosetId, usize)> {
        self.parent[i]
    }
}

/// All reduced normal-form plans of `player`: plans that only assign
/// actions at infosets their own earlier choices leave reachable.
pub fn reduced_normal_form_plans(game: &Vefg, player: usize) -> Result<Vec<PurePlan>, SolverError> {
    PlanSpace::new(game)?.plans(player, 10_000_000)
}

pub fn count_reduced_plans(game: &Vefg, player: usize) -> Result<BigUint, SolverError> {
    PlanSpace::new(game)?.count(player)
}
