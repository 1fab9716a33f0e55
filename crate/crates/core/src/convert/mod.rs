//! Team-to-coordinator conversion.
//!
//! The team is replaced by a coordinator that sees only team-public labels
//! and, at each team member's turn, picks a prescription: one action for
//! every infoset of that member still consistent with its observations. A
//! chance node then plays the prescribed action of the actual history. The
//! result is a two-player zero-sum game with the original opponent.
//!
//! * [`Mode::Basic`] keeps every infoset of the current team-public state.
//! * [`Mode::Pruned`] drops states ruled out by earlier prescriptions.
//! * [`Mode::Folded`] also merges chance outcomes seen by no one except a
//!   proper subset of the team, so one converted node covers many histories.

mod engine;
mod mapping;
mod safe_ir;

use alloc::string::String;
use alloc::vec::Vec;

pub use engine::PRESCRIPTION_LIMIT;
pub use mapping::{
    check_payoff_equivalence, map_coordinator_to_team, map_team_to_coordinator, ConversionLink, CoordinatorPlan,
    PayoffReport, PurePlan,
};
pub use safe_ir::apply_safe_imperfect_recall;

use engine::{CountSink, Engine, NodeCtx, OutKind, OutLabel, OutEdge, Sink};

use crate::census::NodeCensus;
use crate::error::{ConversionError, GameError};
use crate::game::{
    is_public_turn_taking, validate_perfect_recall, ActionLabel, Edge, GameBuilder, InfoSetKey, InfosetId,
    InfosetTable, NodeId, PlayerRole, Vefg,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Basic,
    Pruned,
    Folded,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Basic => "basic",
            Mode::Pruned => "pruned",
            Mode::Folded => "folded",
        }
    }
}

impl core::str::FromStr for Mode {
    type Err = ConversionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Mode::Basic),
            "pruned" | "pruning" => Ok(Mode::Pruned),
            "folded" | "folding" => Ok(Mode::Folded),
            _ => Err(ConversionError::OriginMismatch(alloc::format!("unknown mode {s:?}"))),
        }
    }
}

/// Role a converted node plays with respect to the original game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OriginRole {
    /// Coordinator choosing a prescription for team member `member`.
    Coordinator { member: u8 },
    /// Chance node playing the prescribed action.
    PrescriptionChance { member: u8 },
    Opponent,
    Chance,
    Terminal,
}

/// One action per domain infoset, in domain order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prescription {
    pub assignments: Vec<(InfosetId, ActionLabel)>,
}

/// Team infosets ruled out by earlier prescriptions, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExclusionSet {
    pub infosets: Vec<InfosetId>,
}

impl ExclusionSet {
    pub fn contains(&self, i: InfosetId) -> bool {
        self.infosets.binary_search(&i).is_ok()
    }
}

/// Original histories behind a converted node with their conditional
/// probabilities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Belief {
    pub weights: Vec<(NodeId, f64)>,
}

/// Link from a converted node back to the original game. Infoset ids refer
/// to [`SourceInfo::infosets`]; labels are shared with the converted game,
/// which interns the original labels first.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeOrigin {
    pub role: OriginRole,
    /// Original labels the coordinator has seen, played team actions included.
    pub observed: Vec<ActionLabel>,
    pub excluded: ExclusionSet,
    pub belief: Belief,
    /// Coordinator nodes only: histories consistent with the coordinator's view.
    pub support: Vec<NodeId>,
    /// Coordinator nodes only: infosets receiving an action.
    pub domain: Vec<InfosetId>,
    /// Coordinator nodes only: the prescription behind each edge.
    pub prescriptions: Vec<Prescription>,
}

/// Summary of the original game, enough to check that a converted game
/// belongs to it.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceInfo {
    pub name: String,
    pub node_count: usize,
    pub players: Vec<PlayerRole>,
    /// Infoset keys in id order; labels are converted-game labels.
    pub infosets: Vec<InfoSetKey>,
    /// Optional content digest, filled in by callers that have one.
    pub digest: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvertedGame {
    /// Players are `[Coordinator, Opponent]`.
    pub game: Vefg,
    /// Indexed by converted node id.
    pub origin: Vec<NodeOrigin>,
    pub mode: Mode,
    pub safe_ir_applied: bool,
    /// Per node, the imperfect-recall infoset group of coordinator nodes.
    pub coordinator_groups: Option<Vec<Option<u32>>>,
    pub source: SourceInfo,
}

impl ConvertedGame {
    pub const COORDINATOR: usize = 0;
    pub const OPPONENT: usize = 1;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvertOptions {
    pub mode: Mode,
    /// Largest number of prescriptions allowed at one coordinator node.
    pub prescription_limit: u128,
}

impl ConvertOptions {
    pub fn new(mode: Mode) -> Self {
        ConvertOptions { mode, prescription_limit: PRESCRIPTION_LIMIT }
    }
}

pub fn convert_basic(game: &Vefg) -> Result<ConvertedGame, ConversionError> {
    convert(game, ConvertOptions::new(Mode::Basic))
}

pub fn convert_pruned(game: &Vefg) -> Result<ConvertedGame, ConversionError> {
    convert(game, ConvertOptions::new(Mode::Pruned))
}

pub fn convert_folded(game: &Vefg) -> Result<ConvertedGame, ConversionError> {
    convert(game, ConvertOptions::new(Mode::Folded))
}

/// Checks the input conditions and returns the infoset table and opponent.
fn prepare(game: &Vefg) -> Result<(InfosetTable, usize), ConversionError> {
    let opp = game
        .opponent()
        .ok_or_else(|| GameError::NotATeamGame("no opponent".into()))?;
    if game.team().is_empty() {
        return Err(GameError::NotATeamGame("no team members".into()).into());
    }
    if game.players().iter().filter(|r| **r == PlayerRole::Opponent).count() != 1 {
        return Err(GameError::NotATeamGame("more than one opponent".into()).into());
    }
    let report = validate_perfect_recall(game);
    if let Some(v) = report.violations.first() {
        return Err(ConversionError::ImperfectRecallInput(v.player));
    }
    let table = InfosetTable::build(game)?;
    if !is_public_turn_taking(game) {
        return Err(ConversionError::NotPublicTurnTaking(game.root()));
    }
    Ok((table, opp))
}

pub fn convert(game: &Vefg, options: ConvertOptions) -> Result<ConvertedGame, ConversionError> {
    let (table, opp) = prepare(game)?;
    let mut b = GameBuilder::new(
        alloc::format!("{}-{}", game.name(), options.mode.as_str()),
        alloc::vec![PlayerRole::Coordinator, PlayerRole::Opponent],
    );
    for l in game.labels() {
        b.label(l);
    }
    let sink = BuildSink { source: game, table: &table, b, origin: Vec::new() };
    let mut engine = Engine::new(game, &table, options.mode, opp, options.prescription_limit, sink);
    let root = engine.run()?;
    let BuildSink { b, origin, .. } = engine.sink;
    let (converted, ids) = b.finish_with_map(root)?;
    let mut slots: Vec<Option<NodeOrigin>> = alloc::vec![None; converted.len()];
    for (old, o) in origin.into_iter().enumerate() {
        slots[ids[old]] = Some(o);
    }
    let origin = slots.into_iter().map(|o| o.expect("every node has an origin")).collect();
    Ok(ConvertedGame {
        game: converted,
        origin,
        mode: options.mode,
        safe_ir_applied: false,
        coordinator_groups: None,
        source: SourceInfo {
            name: game.name().into(),
            node_count: game.len(),
            players: game.players().to_vec(),
            infosets: table.sets.iter().map(|s| s.key.clone()).collect(),
            digest: None,
        },
    })
}

/// Census of the converted game computed during the recursion, without
/// building it. With `infosets` set, coordinator and opponent infosets are
/// counted too (coordinator ones under safe imperfect recall if `safe_ir`).
pub fn convert_census(
    game: &Vefg,
    options: ConvertOptions,
    infosets: bool,
    safe_ir: bool,
) -> Result<NodeCensus, ConversionError> {
    if safe_ir && options.mode == Mode::Basic {
        return Err(ConversionError::ExclusionDataMissing);
    }
    let (table, opp) = prepare(game)?;
    let mut engine = Engine::new(game, &table, options.mode, opp, options.prescription_limit, CountSink::new(infosets, safe_ir));
    engine.run()?;
    Ok(engine.sink.finish())
}

struct BuildSink<'g> {
    source: &'g Vefg,
    table: &'g InfosetTable,
    b: GameBuilder,
    origin: Vec<NodeOrigin>,
}

impl BuildSink<'_> {
    fn prescription_label(&mut self, ctx: &NodeCtx<'_>, k: usize) -> ActionLabel {
        let mut s = String::from("[");
        for (d, &a) in ctx.prescriptions[k].iter().enumerate() {
            if d > 0 {
                s.push(',');
            }
            s.push_str(self.source.label(self.table.sets[ctx.domain[d]].actions[a]));
        }
        s.push(']');
        self.b.label(&s)
    }
}

impl Sink for BuildSink<'_> {
    type Id = NodeId;

    fn node(&mut self, ctx: &NodeCtx<'_>, edges: Vec<OutEdge<NodeId>>) -> NodeId {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge {
                label: match e.label {
                    OutLabel::Original(l) => l,
                    OutLabel::Prescription(k) => self.prescription_label(ctx, k),
                },
                child: e.child,
                prob: e.prob,
                seen: (e.coord_seen as u32) | ((e.opp_seen as u32) << 1),
            })
            .collect();
        let (id, role) = match ctx.kind {
            OutKind::Coordinator { member } => {
                (self.b.decision(ConvertedGame::COORDINATOR, edges), OriginRole::Coordinator { member })
            }
            OutKind::Opponent => (self.b.decision(ConvertedGame::OPPONENT, edges), OriginRole::Opponent),
            OutKind::Terminal(u) => (self.b.terminal(u), OriginRole::Terminal),
            OutKind::Chance => (self.b.chance(edges), OriginRole::Chance),
            OutKind::PrescriptionChance { member } => (self.b.chance(edges), OriginRole::PrescriptionChance { member }),
        };
        let mut excluded = ctx.excluded.to_vec();
        excluded.sort_unstable();
        excluded.dedup();
        let table = self.table;
        let prescriptions = ctx
            .prescriptions
            .iter()
            .map(|rx| Prescription {
                assignments: ctx.domain.iter().zip(rx).map(|(&i, &a)| (i, table.sets[i].actions[a])).collect(),
            })
            .collect();
        self.origin.push(NodeOrigin {
            role,
            observed: ctx.observed.to_vec(),
            excluded: ExclusionSet { infosets: excluded },
            belief: Belief { weights: ctx.belief.to_vec() },
            support: ctx.support.to_vec(),
            domain: ctx.domain.to_vec(),
            prescriptions,
        });
        id
    }
}
