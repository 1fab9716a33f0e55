//! Padding a game with single-action nodes so that every infoset has a
//! common acting-player sequence.

use alloc::vec;
use alloc::vec::Vec;

use crate::game::{is_public_turn_taking, Edge, GameBuilder, InfosetTable, NodeId, NodeKind, Vefg};

/// Label used by inserted single-action nodes.
pub const NOOP: &str = "noop";

/// Result of [`make_public_turn_taking_mapped`].
#[derive(Clone, Debug, PartialEq)]
pub struct TurnTakingMap {
    pub game: Vefg,
    /// Original node for every output node, `None` for inserted nodes.
    pub source: Vec<Option<NodeId>>,
}

/// Returns a public turn-taking game equivalent to `game`.
///
/// Play is cut into rounds; a round has one slot per player plus one for
/// chance, visited in a fixed order. Every original node gets a round such
/// that nodes of one infoset share it and children come after parents, then
/// sits in its actor's slot. Single-action nodes fill every other slot. A
/// noop is seen only by the player taking it, so each player counts rounds
/// through its own observations. Inputs that already satisfy the property
/// are returned unchanged.
pub fn make_public_turn_taking(game: &Vefg) -> Vefg {
    make_public_turn_taking_mapped(game).game
}

pub fn make_public_turn_taking_mapped(game: &Vefg) -> TurnTakingMap {
    if is_public_turn_taking(game) {
        return TurnTakingMap { game: game.clone(), source: (0..game.len()).map(Some).collect() };
    }
    let mut pad = Padder {
        game,
        b: GameBuilder::new(game.name(), game.players().to_vec()),
        source: Vec::new(),
        slots: game.players().len() + 1,
        round: rounds(game),
    };
    for l in game.labels() {
        pad.b.label(l);
    }
    let root = pad.emit(game.root(), 0);
    let Padder { b, source, .. } = pad;
    let (out, ids) = b.finish_with_map(root).expect("padding preserves validity");
    let mut mapped = vec![None; out.len()];
    for (old, new) in ids.into_iter().enumerate() {
        mapped[new] = source[old];
    }
    TurnTakingMap { game: out, source: mapped }
}

/// Smallest rounds with `round(child) > round(parent)` and equal rounds
/// within an infoset.
fn rounds(game: &Vefg) -> Vec<usize> {
    let groups: Vec<Vec<NodeId>> = match InfosetTable::build(game) {
        Ok(t) => t.sets.into_iter().map(|s| s.nodes).collect(),
        Err(_) => Vec::new(),
    };
    let mut round = vec![0usize; game.len()];
    loop {
        let mut changed = false;
        // Preorder: parents are settled before their children.
        for (id, node) in game.nodes().iter().enumerate() {
            if let Some(p) = node.parent {
                if round[id] <= round[p] {
                    round[id] = round[p] + 1;
                    changed = true;
                }
            }
        }
        for g in &groups {
            let top = g.iter().map(|n| round[*n]).max().unwrap_or(0);
            for &n in g {
                if round[n] < top {
                    round[n] = top;
                    changed = true;
                }
            }
        }
        if !changed {
            return round;
        }
    }
}

struct Padder<'a> {
    game: &'a Vefg,
    b: GameBuilder,
    source: Vec<Option<NodeId>>,
    slots: usize,
    round: Vec<usize>,
}

impl Padder<'_> {
    /// Position of `id` in the global slot sequence.
    fn position(&self, id: NodeId) -> usize {
        let slot = match self.game.node(id).kind {
            NodeKind::Decision { player } => player,
            _ => self.slots - 1,
        };
        self.round[id] * self.slots + slot
    }

    /// Emits original node `id`, padding from position `from` onwards.
    fn emit(&mut self, id: NodeId, from: usize) -> NodeId {
        let node = self.game.node(id);
        if let NodeKind::Terminal { team_utility } = node.kind {
            let t = self.b.terminal(team_utility);
            self.source.push(Some(id));
            return t;
        }
        let at = self.position(id);
        let mut edges = Vec::with_capacity(node.edges.len());
        for e in &node.edges {
            let child = self.emit(e.child, at + 1);
            edges.push(Edge { child, ..e.clone() });
        }
        let real = match node.kind {
            NodeKind::Decision { player } => self.b.decision(player, edges),
            _ => self.b.chance(edges),
        };
        self.source.push(Some(id));
        self.noops(from, at, real)
    }

    /// Chain of single-action nodes for positions `from..to`, ending in `tail`.
    fn noops(&mut self, from: usize, to: usize, tail: NodeId) -> NodeId {
        let noop = self.b.label(NOOP);
        let mut child = tail;
        for pos in (from..to).rev() {
            let slot = pos % self.slots;
            child = if slot == self.slots - 1 {
                self.b.chance(vec![Edge { label: noop, child, prob: 1.0, seen: 0 }])
            } else {
                self.b.decision(slot, vec![Edge { label: noop, child, prob: 1.0, seen: 1 << slot }])
            };
            self.source.push(None);
        }
        child
    }
}
