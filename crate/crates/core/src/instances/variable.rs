use alloc::vec;

use crate::game::{Edge, GameBuilder, PlayerRole, Vefg};

/// Small game that is not public turn-taking: chance seen only by team0
/// decides whether team0 moves once or twice before team1, which sees
/// neither the chance outcome nor team0's moves. The opponent then answers
/// team1 in the dark.
pub fn variable_turns() -> Vefg {
    let mut b = GameBuilder::new("variable-turns", vec![PlayerRole::TeamMember(0), PlayerRole::TeamMember(1), PlayerRole::Opponent]);
    let (one, two, a, c, x, y, u, v) =
        (b.label("one"), b.label("two"), b.label("a"), b.label("c"), b.label("x"), b.label("y"), b.label("u"), b.label("v"));
    let mut payoff = 0.0;
    let mut tail = |b: &mut GameBuilder| {
        let mut t1 = [0; 2];
        for (k, slot) in t1.iter_mut().enumerate() {
            let z1 = b.terminal(payoff);
            let z2 = b.terminal(-payoff / 2.0 + k as f64);
            payoff += 1.0;
            *slot = b.decision(2, vec![
                Edge { label: u, child: z1, prob: 1.0, seen: 0b100 },
                Edge { label: v, child: z2, prob: 1.0, seen: 0b100 },
            ]);
        }
        b.decision(1, vec![
            Edge { label: x, child: t1[0], prob: 1.0, seen: 0b010 },
            Edge { label: y, child: t1[1], prob: 1.0, seen: 0b010 },
        ])
    };
    let q1 = tail(&mut b);
    let q2 = tail(&mut b);
    let once = b.decision(0, vec![Edge { label: a, child: q1, prob: 1.0, seen: 0b001 }, Edge { label: c, child: q2, prob: 1.0, seen: 0b001 }]);
    let q3 = tail(&mut b);
    let q4 = tail(&mut b);
    let second = b.decision(0, vec![Edge { label: a, child: q3, prob: 1.0, seen: 0b001 }, Edge { label: c, child: q4, prob: 1.0, seen: 0b001 }]);
    let q5 = tail(&mut b);
    let first = b.decision(0, vec![Edge { label: a, child: second, prob: 1.0, seen: 0b001 }, Edge { label: c, child: q5, prob: 1.0, seen: 0b001 }]);
    let root = b.chance(vec![
        Edge { label: one, child: once, prob: 0.25, seen: 0b001 },
        Edge { label: two, child: first, prob: 0.75, seen: 0b001 },
    ]);
    b.finish(root).expect("valid by construction")
}
