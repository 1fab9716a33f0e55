use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GameError;
use crate::game::{ActionLabel, Edge, GameBuilder, NodeId, PlayerRole, Vefg};

/// Largest toy game (in original nodes) the generator will build.
pub const TOY_NODE_LIMIT: u128 = 20_000_000;

const P1: u32 = 0b001;
const P2: u32 = 0b010;
const ALL: u32 = 0b111;

/// Parametric toy game.
///
/// Chance deals one of `chance_outcomes` private states to P1 (and, with
/// `both_private`, another to P2). P1 then acts `depth` times with `actions`
/// actions each, unseen by everyone else. An opponent who observes nothing
/// picks one of `actions` actions, seen by the whole table, and P2 closes with
/// one decision of `actions` actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToySpec {
    pub chance_outcomes: usize,
    pub actions: usize,
    pub depth: usize,
    pub both_private: bool,
    /// Seed for integer terminal payoffs in [-10, 10]; all zero when absent.
    pub payoff_seed: Option<u64>,
}

impl ToySpec {
    pub fn new(chance_outcomes: usize, actions: usize, depth: usize) -> Self {
        ToySpec { chance_outcomes, actions, depth, both_private: false, payoff_seed: None }
    }

    pub fn with_payoffs(mut self, seed: u64) -> Self {
        self.payoff_seed = Some(seed);
        self
    }

    pub fn with_both_private(mut self, on: bool) -> Self {
        self.both_private = on;
        self
    }
}

/// Node count of the generated game, saturating.
pub fn toy_node_count(spec: &ToySpec) -> u128 {
    let (c, a) = (spec.chance_outcomes as u128, spec.actions as u128);
    let deals = if spec.both_private { c.saturating_mul(c) } else { c };
    let chance = if spec.both_private { 1 + c } else { 1 };
    let mut level = 1u128;
    let mut p1 = 0u128;
    for _ in 0..spec.depth {
        p1 = p1.saturating_add(level);
        level = level.saturating_mul(a);
    }
    // Each P1 leaf: opponent node, `a` P2 nodes and `a^2` terminals.
    let tail = level.saturating_mul(1 + a + a.saturating_mul(a));
    deals.saturating_mul(p1.saturating_add(tail)).saturating_add(chance)
}

pub fn gen_toy(spec: &ToySpec) -> Result<Vefg, GameError> {
    if spec.chance_outcomes < 1 || spec.actions < 2 || spec.depth < 1 {
        return Err(GameError::SpecOutOfBounds(format!(
            "need chance >= 1, actions >= 2, depth >= 1; got {:?}",
            (spec.chance_outcomes, spec.actions, spec.depth)
        )));
    }
    let size = toy_node_count(spec);
    if size > TOY_NODE_LIMIT {
        return Err(GameError::SpecOutOfBounds(format!("{size} nodes exceeds {TOY_NODE_LIMIT}")));
    }
    let players = vec![PlayerRole::TeamMember(0), PlayerRole::TeamMember(1), PlayerRole::Opponent];
    let name = format!(
        "toy-c{}-a{}-h{}{}",
        spec.chance_outcomes,
        spec.actions,
        spec.depth,
        if spec.both_private { "-bp" } else { "" }
    );
    let mut g = Toy {
        b: GameBuilder::new(name, players),
        rng: spec.payoff_seed.map(ChaCha8Rng::seed_from_u64),
        spec: *spec,
        deal1: Vec::new(),
        deal2: Vec::new(),
        p1: Vec::new(),
        opp: Vec::new(),
        p2: Vec::new(),
    };
    for i in 0..spec.chance_outcomes {
        let l = g.b.label(&format!("c{i}"));
        g.deal1.push(l);
    }
    if spec.both_private {
        for i in 0..spec.chance_outcomes {
            let l = g.b.label(&format!("e{i}"));
            g.deal2.push(l);
        }
    }
    for i in 0..spec.actions {
        let a = g.b.label(&format!("a{i}"));
        g.p1.push(a);
    }
    for i in 0..spec.actions {
        let o = g.b.label(&format!("o{i}"));
        g.opp.push(o);
    }
    for i in 0..spec.actions {
        let p = g.b.label(&format!("b{i}"));
        g.p2.push(p);
    }
    let root = g.root();
    g.b.finish(root)
}

struct Toy {
    b: GameBuilder,
    rng: Option<ChaCha8Rng>,
    spec: ToySpec,
    deal1: Vec<ActionLabel>,
    deal2: Vec<ActionLabel>,
    p1: Vec<ActionLabel>,
    opp: Vec<ActionLabel>,
    p2: Vec<ActionLabel>,
}

impl Toy {
    fn root(&mut self) -> NodeId {
        let p = 1.0 / self.spec.chance_outcomes as f64;
        let mut edges = Vec::new();
        for i in 0..self.spec.chance_outcomes {
            let child = if self.spec.both_private {
                let mut inner = Vec::new();
                for j in 0..self.spec.chance_outcomes {
                    let c = self.p1_level(0);
                    inner.push(Edge { label: self.deal2[j], child: c, prob: p, seen: P2 });
                }
                self.b.chance(inner)
            } else {
                self.p1_level(0)
            };
            edges.push(Edge { label: self.deal1[i], child, prob: p, seen: P1 });
        }
        self.b.chance(edges)
    }

    fn p1_level(&mut self, level: usize) -> NodeId {
        if level == self.spec.depth {
            return self.opponent();
        }
        let mut edges = Vec::new();
        for k in 0..self.spec.actions {
            let child = self.p1_level(level + 1);
            edges.push(Edge { label: self.p1[k], child, prob: 1.0, seen: P1 });
        }
        self.b.decision(0, edges)
    }

    fn opponent(&mut self) -> NodeId {
        let mut edges = Vec::new();
        for k in 0..self.spec.actions {
            let mut inner = Vec::new();
            for j in 0..self.spec.actions {
                let u = match self.rng.as_mut() {
                    Some(r) => r.random_range(-10i32..=10) as f64,
                    None => 0.0,
                };
                let t = self.b.terminal(u);
                inner.push(Edge { label: self.p2[j], child: t, prob: 1.0, seen: P2 });
            }
            let child = self.b.decision(1, inner);
            edges.push(Edge { label: self.opp[k], child, prob: 1.0, seen: ALL });
        }
        self.b.decision(2, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{is_public_turn_taking, validate_perfect_recall, InfosetTable};

    #[test]
    fn node_count_matches_construction() {
        for (c, a, h, bp) in [(1, 2, 1, false), (3, 2, 2, false), (2, 3, 2, true), (3, 2, 3, true)] {
            let spec = ToySpec::new(c, a, h).with_both_private(bp);
            assert_eq!(gen_toy(&spec).unwrap().len() as u128, toy_node_count(&spec));
        }
    }

    #[test]
    fn p1_infosets_and_p2_blindness() {
        let g = gen_toy(&ToySpec::new(3, 2, 2)).unwrap();
        let t = InfosetTable::build(&g).unwrap();
        // P1 sees its state and own moves: 3 + 3*2 infosets.
        assert_eq!(t.count_for(0), 9);
        // P2 sees only the opponent's move.
        assert_eq!(t.count_for(1), 2);
        assert_eq!(t.count_for(2), 1);
        assert!(validate_perfect_recall(&g).ok());
        assert!(is_public_turn_taking(&g));
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(gen_toy(&ToySpec::new(3, 1, 2)).is_err());
        assert!(gen_toy(&ToySpec::new(0, 2, 2)).is_err());
        assert!(gen_toy(&ToySpec::new(3, 3, 30)).is_err());
    }

    #[test]
    fn seeded_payoffs_are_deterministic() {
        let a = gen_toy(&ToySpec::new(2, 2, 1).with_payoffs(7)).unwrap();
        let b = gen_toy(&ToySpec::new(2, 2, 1).with_payoffs(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.nodes().iter().any(|n| matches!(n.kind, crate::game::NodeKind::Terminal { team_utility } if team_utility != 0.0)));
    }
}
