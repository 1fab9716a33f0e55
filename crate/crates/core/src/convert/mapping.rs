//! Strategy maps between the team game and its coordinator game.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConvertedGame, OriginRole};
use crate::error::ConversionError;
use crate::game::{ActionLabel, InfosetId, InfosetTable, Vefg};

/// Pure plan over original infosets: action index per infoset, `None` where
/// the plan is silent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurePlan(pub Vec<Option<usize>>);

/// Pure coordinator strategy: edge index at every converted coordinator node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinatorPlan {
    pub choice: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayoffReport {
    pub samples: usize,
    pub max_abs_diff: f64,
}

/// Precomputed correspondence between an original game and a converted game
/// derived from it.
#[derive(Clone, Debug)]
pub struct ConversionLink<'a> {
    pub game: &'a Vefg,
    pub cg: &'a ConvertedGame,
    pub table: InfosetTable,
    /// Per converted coordinator node: domain and per-edge action indices.
    coord: Vec<Option<(Vec<InfosetId>, Vec<Vec<usize>>)>>,
    /// Per converted opponent node: original infoset.
    opp: Vec<Option<InfosetId>>,
}

fn mismatch(msg: impl Into<alloc::string::String>) -> ConversionError {
    ConversionError::OriginMismatch(msg.into())
}

impl<'a> ConversionLink<'a> {
    pub fn new(game: &'a Vefg, cg: &'a ConvertedGame) -> Result<Self, ConversionError> {
        let src = &cg.source;
        if src.node_count != game.len() || src.players != game.players() || src.name != game.name() {
            return Err(mismatch(format!(
                "converted from {:?} ({} nodes), given {:?} ({} nodes)",
                src.name,
                src.node_count,
                game.name(),
                game.len()
            )));
        }
        if cg.origin.len() != cg.game.len() {
            return Err(mismatch("origin table does not cover every node"));
        }
        let table = InfosetTable::build(game)?;
        if table.len() != src.infosets.len() {
            return Err(mismatch("infoset count differs"));
        }
        for (i, s) in table.sets.iter().enumerate() {
            if game.key_string(&s.key) != cg.game.key_string(&src.infosets[i]) {
                return Err(mismatch(format!("infoset {i} differs")));
            }
        }
        let to_game = |l: ActionLabel| game.find_label(cg.game.label(l));
        let mut coord = vec![None; cg.game.len()];
        let mut opp = vec![None; cg.game.len()];
        for (id, o) in cg.origin.iter().enumerate() {
            let node = cg.game.node(id);
            match o.role {
                OriginRole::Coordinator { .. } => {
                    if o.prescriptions.len() != node.edges.len() {
                        return Err(mismatch(format!("node {id}: prescriptions do not match edges")));
                    }
                    let mut sigs = Vec::with_capacity(o.prescriptions.len());
                    for rx in &o.prescriptions {
                        let mut sig = Vec::with_capacity(rx.assignments.len());
                        for &(i, l) in &rx.assignments {
                            let set = table.sets.get(i).ok_or_else(|| mismatch(format!("node {id}: unknown infoset {i}")))?;
                            let a = to_game(l)
                                .and_then(|gl| set.actions.iter().position(|x| *x == gl))
                                .ok_or_else(|| mismatch(format!("node {id}: unknown action")))?;
                            sig.push(a);
                        }
                        sigs.push(sig);
                    }
                    coord[id] = Some((o.domain.clone(), sigs));
                }
                OriginRole::Opponent => {
                    let &(n, _) = o.belief.weights.first().ok_or_else(|| mismatch(format!("node {id}: empty belief")))?;
                    if n >= game.len() {
                        return Err(mismatch(format!("node {id}: unknown original node {n}")));
                    }
                    opp[id] = Some(table.infoset(n).ok_or_else(|| mismatch(format!("node {id}: not a decision")))?);
                }
                _ => {}
            }
        }
        Ok(ConversionLink { game, cg, table, coord, opp })
    }

    fn check_plan(&self, plan: &PurePlan) -> Result<(), ConversionError> {
        for (i, a) in plan.0.iter().enumerate() {
            if let Some(a) = a {
                match self.table.sets.get(i) {
                    Some(s) if *a < s.actions.len() => {}
                    _ => return Err(ConversionError::IllegalActionInPlan(i)),
                }
            }
        }
        Ok(())
    }

    /// Coordinator plan that prescribes the joint plan's action for every
    /// domain infoset. Infosets the plan leaves open get their first action.
    pub fn team_to_coordinator(&self, joint: &PurePlan) -> Result<CoordinatorPlan, ConversionError> {
        self.check_plan(joint)?;
        let mut choice = vec![None; self.cg.game.len()];
        let mut target = Vec::new();
        for (id, entry) in self.coord.iter().enumerate() {
            let Some((domain, sigs)) = entry else { continue };
            target.clear();
            target.extend(domain.iter().map(|&i| joint.0.get(i).copied().flatten().unwrap_or(0)));
            let k = sigs.iter().position(|s| *s == target).ok_or(ConversionError::IllegalPrescription(id))?;
            choice[id] = Some(k);
        }
        Ok(CoordinatorPlan { choice })
    }

    /// Joint plan read off the prescriptions the coordinator plan actually
    /// issues. Infosets never prescribed stay `None`.
    pub fn coordinator_to_team(&self, plan: &CoordinatorPlan) -> Result<PurePlan, ConversionError> {
        let mut joint = vec![None; self.table.len()];
        let mut stack = vec![self.cg.game.root()];
        while let Some(id) = stack.pop() {
            let node = self.cg.game.node(id);
            match &self.coord[id] {
                Some((domain, sigs)) => {
                    let e = plan.choice.get(id).copied().flatten().ok_or(ConversionError::IllegalPrescription(id))?;
                    let sig = sigs.get(e).ok_or(ConversionError::IllegalPrescription(id))?;
                    for (&i, &a) in domain.iter().zip(sig) {
                        match joint[i] {
                            Some(b) if b != a => return Err(ConversionError::IllegalPrescription(id)),
                            _ => joint[i] = Some(a),
                        }
                    }
                    stack.push(node.edges[e].child);
                }
                None => stack.extend(node.edges.iter().map(|e| e.child)),
            }
        }
        Ok(PurePlan(joint))
    }

    /// Expected team utility of the original game.
    pub fn original_value(&self, joint: &PurePlan, opponent: &PurePlan) -> Result<f64, ConversionError> {
        self.check_plan(joint)?;
        self.check_plan(opponent)?;
        let opp = self.game.opponent();
        let table = &self.table;
        let game = self.game;
        let mut missing = None;
        let v = game.expected_utility_with(&mut |n| {
            let i = table.infoset(n).unwrap_or(0);
            let plan = if game.node(n).player() == opp { opponent } else { joint };
            plan.0.get(i).copied().flatten().unwrap_or_else(|| {
                missing.get_or_insert(i);
                0
            })
        });
        match missing {
            Some(i) => Err(ConversionError::IllegalActionInPlan(i)),
            None => Ok(v),
        }
    }

    /// Expected team utility of the converted game.
    pub fn converted_value(&self, plan: &CoordinatorPlan, opponent: &PurePlan) -> Result<f64, ConversionError> {
        self.check_plan(opponent)?;
        let mut missing = None;
        let v = self.cg.game.expected_utility_with(&mut |n| match self.opp[n] {
            Some(i) => opponent.0.get(i).copied().flatten().unwrap_or_else(|| {
                missing.get_or_insert(ConversionError::IllegalActionInPlan(i));
                0
            }),
            None => plan.choice.get(n).copied().flatten().unwrap_or_else(|| {
                missing.get_or_insert(ConversionError::IllegalPrescription(n));
                0
            }),
        });
        match missing {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// Uniformly random full plan for every infoset of the given players.
    pub fn random_plan(&self, players: &[usize], rng: &mut impl Rng) -> PurePlan {
        PurePlan(
            self.table
                .sets
                .iter()
                .map(|s| players.contains(&s.player).then(|| rng.random_range(0..s.actions.len())))
                .collect(),
        )
    }
}

pub fn map_team_to_coordinator(game: &Vefg, cg: &ConvertedGame, joint: &PurePlan) -> Result<CoordinatorPlan, ConversionError> {
    ConversionLink::new(game, cg)?.team_to_coordinator(joint)
}

pub fn map_coordinator_to_team(game: &Vefg, cg: &ConvertedGame, plan: &CoordinatorPlan) -> Result<PurePlan, ConversionError> {
    ConversionLink::new(game, cg)?.coordinator_to_team(plan)
}

/// Draws random team and opponent pure plans and compares the expected
/// utility of each pair in both games.
pub fn check_payoff_equivalence(
    game: &Vefg,
    cg: &ConvertedGame,
    samples: usize,
    seed: u64,
) -> Result<PayoffReport, ConversionError> {
    let link = ConversionLink::new(game, cg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let team = game.team();
    let opp: Vec<usize> = game.opponent().into_iter().collect();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let joint = link.random_plan(&team, &mut rng);
        let adversary = link.random_plan(&opp, &mut rng);
        let a = link.original_value(&joint, &adversary)?;
        let b = link.converted_value(&link.team_to_coordinator(&joint)?, &adversary)?;
        worst = worst.max((a - b).abs());
    }
    Ok(PayoffReport { samples, max_abs_diff: worst })
}
