//! The conversion recursion. One pass walks the original game while tracking
//! two particle lists:
//!
//! * `belief`: original histories represented by the current converted node,
//!   with conditional probabilities. A singleton unless chance is folded.
//! * `support`: original histories consistent with everything the
//!   coordinator has observed. Its infosets form the prescription domain.
//!
//! The recursion hands each finished node to a [`Sink`], which either builds
//! the converted tree or just counts it.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::Mode;
use crate::census::NodeCensus;
use crate::error::ConversionError;
use crate::game::{ActionLabel, Edge, GameNode, InfosetId, InfosetTable, NodeId, NodeKind, PlayerRole, Vefg};

/// Default cap on prescriptions at a single coordinator node.
pub const PRESCRIPTION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum OutKind {
    Coordinator { member: u8 },
    PrescriptionChance { member: u8 },
    Opponent,
    Chance,
    Terminal(f64),
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum OutLabel {
    Original(ActionLabel),
    /// Index into the prescriptions of the coordinator node.
    Prescription(usize),
}

pub(crate) struct OutEdge<I> {
    pub label: OutLabel,
    pub prob: f64,
    pub coord_seen: bool,
    pub opp_seen: bool,
    pub child: I,
}

/// Everything known about a converted node when it is emitted.
pub(crate) struct NodeCtx<'b> {
    pub kind: OutKind,
    pub observed: &'b [ActionLabel],
    pub excluded: &'b [InfosetId],
    pub belief: &'b [(NodeId, f64)],
    pub support: &'b [NodeId],
    pub domain: &'b [InfosetId],
    /// Action index per domain position, one entry per prescription.
    pub prescriptions: &'b [Vec<usize>],
    /// Coordinator observations: label `l` as `2l`, prescription `k` as `2k+1`.
    pub coord_trace: &'b [u32],
    pub opp_trace: &'b [ActionLabel],
}

pub(crate) trait Sink {
    type Id: Copy;
    fn node(&mut self, ctx: &NodeCtx<'_>, edges: Vec<OutEdge<Self::Id>>) -> Self::Id;
}

pub(crate) struct Engine<'a, S: Sink> {
    game: &'a Vefg,
    table: &'a InfosetTable,
    mode: Mode,
    team_mask: u32,
    opp: usize,
    member_of: Vec<Option<u8>>,
    foldable: Vec<bool>,
    limit: u128,
    pub sink: S,
    observed: Vec<ActionLabel>,
    excluded: Vec<InfosetId>,
    coord_trace: Vec<u32>,
    opp_trace: Vec<ActionLabel>,
}

impl<'a, S: Sink> Engine<'a, S> {
    pub fn new(game: &'a Vefg, table: &'a InfosetTable, mode: Mode, opp: usize, limit: u128, sink: S) -> Self {
        let team_mask = game.team_mask();
        let member_of = game
            .players()
            .iter()
            .map(|r| match r {
                PlayerRole::TeamMember(k) => Some(*k),
                _ => None,
            })
            .collect();
        let foldable = game
            .nodes()
            .iter()
            .map(|n| {
                mode == Mode::Folded
                    && n.is_chance()
                    && n.edges.iter().all(|e| !e.seen_by(opp) && !e.public_to(team_mask))
            })
            .collect();
        Engine {
            game,
            table,
            mode,
            team_mask,
            opp,
            member_of,
            foldable,
            limit,
            sink,
            observed: Vec::new(),
            excluded: Vec::new(),
            coord_trace: Vec::new(),
            opp_trace: Vec::new(),
        }
    }

    pub fn run(&mut self) -> Result<S::Id, ConversionError> {
        let root = self.game.root();
        self.visit(vec![(root, 1.0)], vec![root])
    }

    fn fold_belief(&self, parts: Vec<(NodeId, f64)>) -> Vec<(NodeId, f64)> {
        if !parts.iter().any(|(n, _)| self.foldable[*n]) {
            return parts;
        }
        let mut out = Vec::new();
        let mut stack = parts;
        while let Some((n, w)) = stack.pop() {
            if self.foldable[n] {
                stack.extend(self.game.node(n).edges.iter().filter(|e| e.prob > 0.0).map(|e| (e.child, w * e.prob)));
            } else {
                out.push((n, w));
            }
        }
        out.sort_by_key(|p| p.0);
        out
    }

    fn fold_support(&self, parts: Vec<NodeId>) -> Vec<NodeId> {
        if !parts.iter().any(|n| self.foldable[*n]) {
            return parts;
        }
        let mut out = Vec::new();
        let mut stack = parts;
        while let Some(n) = stack.pop() {
            if self.foldable[n] {
                stack.extend(self.game.node(n).edges.iter().filter(|e| e.prob > 0.0).map(|e| e.child));
            } else {
                out.push(n);
            }
        }
        out.sort_unstable();
        out
    }

    fn same_actor(a: &GameNode, b: &GameNode) -> bool {
        match (&a.kind, &b.kind) {
            (NodeKind::Decision { player: p }, NodeKind::Decision { player: q }) => p == q,
            (NodeKind::Chance, NodeKind::Chance) | (NodeKind::Terminal { .. }, NodeKind::Terminal { .. }) => true,
            _ => false,
        }
    }

    fn emit(&mut self, kind: OutKind, belief: &[(NodeId, f64)], edges: Vec<OutEdge<S::Id>>) -> S::Id {
        let ctx = NodeCtx {
            kind,
            observed: &self.observed,
            excluded: &self.excluded,
            belief,
            support: &[],
            domain: &[],
            prescriptions: &[],
            coord_trace: &self.coord_trace,
            opp_trace: &self.opp_trace,
        };
        self.sink.node(&ctx, edges)
    }

    fn visit(&mut self, belief: Vec<(NodeId, f64)>, support: Vec<NodeId>) -> Result<S::Id, ConversionError> {
        let (belief, support) = if self.mode == Mode::Folded {
            (self.fold_belief(belief), self.fold_support(support))
        } else {
            (belief, support)
        };
        let game = self.game;
        let head_id = belief[0].0;
        let head = game.node(head_id);
        let lockstep = belief.iter().map(|p| p.0).chain(support.iter().copied());
        if lockstep.map(|n| game.node(n)).any(|n| !Self::same_actor(head, n)) {
            return Err(ConversionError::NotPublicTurnTaking(head_id));
        }
        match head.kind {
            NodeKind::Terminal { .. } => {
                let mass: f64 = belief.iter().map(|p| p.1).sum();
                let value: f64 = belief
                    .iter()
                    .map(|&(n, w)| match game.node(n).kind {
                        NodeKind::Terminal { team_utility } => w * team_utility,
                        _ => 0.0,
                    })
                    .sum();
                Ok(self.emit(OutKind::Terminal(value / mass), &belief, Vec::new()))
            }
            NodeKind::Chance => self.chance(belief, support),
            NodeKind::Decision { player } if player == self.opp => self.opponent(belief, support),
            NodeKind::Decision { player } => match self.member_of[player] {
                Some(member) => self.team(member, belief, support),
                None => Err(ConversionError::NotPublicTurnTaking(head_id)),
            },
        }
    }

    /// Support after an edge with the given label and team visibility:
    /// filtered by label if team-public, otherwise every team-hidden branch.
    fn step_support(&self, support: &[NodeId], label: ActionLabel, team_pub: bool) -> Vec<NodeId> {
        let mut out = Vec::new();
        for &q in support {
            for e in &self.game.node(q).edges {
                if e.prob > 0.0 && e.public_to(self.team_mask) == team_pub && (!team_pub || e.label == label) {
                    out.push(e.child);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn descend(
        &mut self,
        edge: &Edge,
        belief: Vec<(NodeId, f64)>,
        support: Vec<NodeId>,
    ) -> Result<(S::Id, bool, bool), ConversionError> {
        let team_pub = edge.public_to(self.team_mask);
        let opp_seen = edge.seen_by(self.opp);
        if team_pub {
            self.observed.push(edge.label);
            self.coord_trace.push(2 * edge.label.0);
        }
        if opp_seen {
            self.opp_trace.push(edge.label);
        }
        let id = self.visit(belief, support)?;
        if team_pub {
            self.observed.pop();
            self.coord_trace.pop();
        }
        if opp_seen {
            self.opp_trace.pop();
        }
        Ok((id, team_pub, opp_seen))
    }

    fn chance(&mut self, belief: Vec<(NodeId, f64)>, support: Vec<NodeId>) -> Result<S::Id, ConversionError> {
        let game = self.game;
        let total: f64 = belief.iter().map(|p| p.1).sum();
        let mut outcomes: Vec<(&Edge, f64)> = Vec::new();
        for &(n, w) in &belief {
            for e in game.node(n).edges.iter().filter(|e| e.prob > 0.0) {
                match outcomes.iter_mut().find(|o| o.0.label == e.label) {
                    Some(o) => o.1 += w * e.prob,
                    None => outcomes.push((e, w * e.prob)),
                }
            }
        }
        let mut edges = Vec::with_capacity(outcomes.len());
        for (edge, mass) in outcomes {
            let child_belief: Vec<(NodeId, f64)> = belief
                .iter()
                .flat_map(|&(n, w)| {
                    game.node(n)
                        .edges
                        .iter()
                        .filter(|e| e.label == edge.label && e.prob > 0.0)
                        .map(move |e| (e.child, w * e.prob / mass))
                })
                .collect();
            let child_support = self.step_support(&support, edge.label, edge.public_to(self.team_mask));
            let (child, coord_seen, opp_seen) = self.descend(edge, child_belief, child_support)?;
            edges.push(OutEdge {
                label: OutLabel::Original(edge.label),
                prob: mass / total,
                coord_seen,
                opp_seen,
                child,
            });
        }
        Ok(self.emit(OutKind::Chance, &belief, edges))
    }

    fn opponent(&mut self, belief: Vec<(NodeId, f64)>, support: Vec<NodeId>) -> Result<S::Id, ConversionError> {
        let game = self.game;
        let head = game.node(belief[0].0);
        let mut edges = Vec::with_capacity(head.edges.len());
        for (k, edge) in head.edges.iter().enumerate() {
            let mut child_belief = Vec::with_capacity(belief.len());
            for &(n, w) in &belief {
                match game.node(n).edges.get(k) {
                    Some(e) if e.label == edge.label => child_belief.push((e.child, w)),
                    _ => return Err(ConversionError::NotPublicTurnTaking(n)),
                }
            }
            let child_support = self.step_support(&support, edge.label, edge.public_to(self.team_mask));
            let (child, coord_seen, opp_seen) = self.descend(edge, child_belief, child_support)?;
            edges.push(OutEdge { label: OutLabel::Original(edge.label), prob: 1.0, coord_seen, opp_seen, child });
        }
        Ok(self.emit(OutKind::Opponent, &belief, edges))
    }

    fn infoset_of(&self, n: NodeId) -> Result<InfosetId, ConversionError> {
        self.table.infoset(n).ok_or(ConversionError::NotPublicTurnTaking(n))
    }

    fn team(&mut self, member: u8, belief: Vec<(NodeId, f64)>, support: Vec<NodeId>) -> Result<S::Id, ConversionError> {
        let game = self.game;
        let table = self.table;
        let head_id = belief[0].0;
        let head = game.node(head_id);

        let mut domain = support.iter().map(|&q| self.infoset_of(q)).collect::<Result<Vec<_>, _>>()?;
        domain.sort_unstable();
        domain.dedup();
        let position = |n: NodeId| -> Result<usize, ConversionError> {
            let i = table.infoset(n).ok_or(ConversionError::NotPublicTurnTaking(n))?;
            domain.binary_search(&i).map_err(|_| ConversionError::NotPublicTurnTaking(n))
        };
        let belief_pos = belief.iter().map(|p| position(p.0)).collect::<Result<Vec<_>, _>>()?;
        let support_pos = support.iter().map(|&q| position(q)).collect::<Result<Vec<_>, _>>()?;
        let widths: Vec<usize> = domain.iter().map(|&i| table.sets[i].actions.len()).collect();

        let count = widths.iter().try_fold(1u128, |acc, &w| acc.checked_mul(w as u128)).unwrap_or(u128::MAX);
        if count > self.limit {
            return Err(ConversionError::TooManyPrescriptions(head_id, count));
        }
        let prescriptions = odometer(&widths);

        let total: f64 = belief.iter().map(|p| p.1).sum();
        let head_rank = |l: ActionLabel| (head.edges.iter().position(|e| e.label == l).unwrap_or(usize::MAX), l);
        let mut coord_edges = Vec::with_capacity(prescriptions.len());
        for (k, rx) in prescriptions.iter().enumerate() {
            self.coord_trace.push(2 * k as u32 + 1);
            let mut outcomes: Vec<(ActionLabel, f64, &Edge)> = Vec::new();
            for (&(n, w), &pos) in belief.iter().zip(&belief_pos) {
                let e = &game.node(n).edges[rx[pos]];
                match outcomes.iter_mut().find(|o| o.0 == e.label) {
                    Some(o) => o.1 += w,
                    None => outcomes.push((e.label, w, e)),
                }
            }
            outcomes.sort_by_key(|o| head_rank(o.0));

            let mut chance_edges = Vec::with_capacity(outcomes.len());
            for (label, mass, edge) in outcomes {
                let child_belief: Vec<(NodeId, f64)> = belief
                    .iter()
                    .zip(&belief_pos)
                    .filter_map(|(&(n, w), &pos)| {
                        let e = &game.node(n).edges[rx[pos]];
                        (e.label == label).then_some((e.child, w / mass))
                    })
                    .collect();
                let played_pub = edge.public_to(self.team_mask);
                let mut child_support: Vec<NodeId> = support
                    .iter()
                    .zip(&support_pos)
                    .filter_map(|(&q, &pos)| {
                        let e = &game.node(q).edges[rx[pos]];
                        let keep = match self.mode {
                            Mode::Basic => e.public_to(self.team_mask) == played_pub && (!played_pub || e.label == label),
                            Mode::Pruned | Mode::Folded => e.label == label,
                        };
                        keep.then_some(e.child)
                    })
                    .collect();
                child_support.sort_unstable();

                let excluded_len = self.excluded.len();
                if self.mode != Mode::Basic {
                    for (d, &i) in domain.iter().enumerate() {
                        if table.sets[i].actions[rx[d]] != label {
                            self.excluded.push(i);
                        }
                    }
                }
                let opp_seen = edge.seen_by(self.opp);
                self.observed.push(label);
                self.coord_trace.push(2 * label.0);
                if opp_seen {
                    self.opp_trace.push(label);
                }
                let child = self.visit(child_belief, child_support)?;
                if opp_seen {
                    self.opp_trace.pop();
                }
                self.coord_trace.pop();
                self.observed.pop();
                self.excluded.truncate(excluded_len);
                chance_edges.push(OutEdge {
                    label: OutLabel::Original(label),
                    prob: mass / total,
                    coord_seen: true,
                    opp_seen,
                    child,
                });
            }
            let cid = self.emit(OutKind::PrescriptionChance { member }, &belief, chance_edges);
            self.coord_trace.pop();
            coord_edges.push(OutEdge { label: OutLabel::Prescription(k), prob: 1.0, coord_seen: true, opp_seen: false, child: cid });
        }
        let ctx = NodeCtx {
            kind: OutKind::Coordinator { member },
            observed: &self.observed,
            excluded: &self.excluded,
            belief: &belief,
            support: &support,
            domain: &domain,
            prescriptions: &prescriptions,
            coord_trace: &self.coord_trace,
            opp_trace: &self.opp_trace,
        };
        Ok(self.sink.node(&ctx, coord_edges))
    }
}

/// All index tuples with `t[i] < widths[i]`, last position varying fastest.
pub(crate) fn odometer(widths: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if widths.contains(&0) {
        return out;
    }
    let mut cur = vec![0usize; widths.len()];
    loop {
        out.push(cur.clone());
        let mut i = widths.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < widths[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Counts nodes and, optionally, infosets without materialising the tree.
pub(crate) struct CountSink {
    pub census: NodeCensus,
    infosets: bool,
    safe_ir: bool,
    coord_keys: BTreeSet<Vec<u32>>,
    safe_keys: BTreeSet<(Vec<ActionLabel>, Vec<NodeId>)>,
    opp_keys: BTreeSet<Vec<ActionLabel>>,
}

impl CountSink {
    pub fn new(infosets: bool, safe_ir: bool) -> Self {
        CountSink {
            census: NodeCensus::default(),
            infosets,
            safe_ir,
            coord_keys: BTreeSet::new(),
            safe_keys: BTreeSet::new(),
            opp_keys: BTreeSet::new(),
        }
    }

    pub fn finish(mut self) -> NodeCensus {
        self.census.finish_total();
        if self.infosets {
            self.census.coordinator_infosets =
                if self.safe_ir { self.safe_keys.len() } else { self.coord_keys.len() } as u64;
            self.census.adversary_infosets = self.opp_keys.len() as u64;
        }
        self.census
    }
}

impl Sink for CountSink {
    type Id = ();

    fn node(&mut self, ctx: &NodeCtx<'_>, edges: Vec<OutEdge<()>>) {
        let c = &mut self.census;
        match ctx.kind {
            OutKind::Terminal(_) => c.terminal_nodes += 1,
            OutKind::Chance | OutKind::PrescriptionChance { .. } => {
                c.chance_nodes += 1;
                let single = edges.len() == 1;
                if single {
                    c.chance_single_child += 1;
                }
                if let OutKind::PrescriptionChance { member } = ctx.kind {
                    NodeCensus::bump_member(&mut c.prescription_chance_by_member, member);
                    if single {
                        c.prescription_single_child += 1;
                    }
                }
            }
            OutKind::Coordinator { member } => {
                c.coordinator_nodes += 1;
                NodeCensus::bump_member(&mut c.coordinator_nodes_by_member, member);
                if self.infosets {
                    if self.safe_ir {
                        self.safe_keys.insert((ctx.observed.to_vec(), ctx.support.to_vec()));
                    } else {
                        self.coord_keys.insert(ctx.coord_trace.to_vec());
                    }
                }
            }
            OutKind::Opponent => {
                c.adversary_nodes += 1;
                if self.infosets {
                    self.opp_keys.insert(ctx.opp_trace.to_vec());
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::odometer;
    use alloc::vec;

    #[test]
    fn odometer_order() {
        assert_eq!(odometer(&[2, 3]).len(), 6);
        assert_eq!(odometer(&[2, 2]), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(odometer(&[]), vec![vec![]]);
    }
}
