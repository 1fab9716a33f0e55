use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::GameError;
use crate::game::{ActionLabel, Edge, GameBuilder, NodeId, PlayerRole, Vefg};

const SEATS: usize = 3;
const EVERYONE: u32 = 0b111;
const ANTE: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PokerVariant {
    Kuhn,
    Leduc,
}

/// Three-player poker with two team members and one adversary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PokerSpec {
    pub variant: PokerVariant,
    pub ranks: usize,
    /// Raises allowed per betting round (always 1 for Kuhn).
    pub raises: usize,
    /// Seat of the adversary; seat 0 acts first.
    pub adversary_position: usize,
}

impl PokerSpec {
    pub fn kuhn(ranks: usize, adversary_position: usize) -> Self {
        PokerSpec { variant: PokerVariant::Kuhn, ranks, raises: 1, adversary_position }
    }

    pub fn leduc(ranks: usize, raises: usize, adversary_position: usize) -> Self {
        PokerSpec { variant: PokerVariant::Leduc, ranks, raises, adversary_position }
    }

    fn check(&self) -> Result<(), GameError> {
        let bad = |m: &str| Err(GameError::SpecOutOfBounds(m.into()));
        if self.adversary_position >= SEATS {
            return bad("adversary position must be 0, 1 or 2");
        }
        match self.variant {
            PokerVariant::Kuhn if self.ranks < 3 || self.ranks > 13 => bad("Kuhn needs 3 to 13 ranks"),
            PokerVariant::Kuhn if self.raises != 1 => bad("Kuhn allows exactly one raise"),
            PokerVariant::Leduc if self.ranks < 2 || self.ranks > 13 => bad("Leduc needs 2 to 13 ranks"),
            PokerVariant::Leduc if !(1..=2).contains(&self.raises) => bad("Leduc raises must be 1 or 2"),
            _ => Ok(()),
        }
    }
}

pub fn gen_kuhn3(spec: &PokerSpec) -> Result<Vefg, GameError> {
    if spec.variant != PokerVariant::Kuhn {
        return Err(GameError::SpecOutOfBounds("expected a Kuhn spec".into()));
    }
    gen_poker(spec)
}

pub fn gen_leduc3(spec: &PokerSpec) -> Result<Vefg, GameError> {
    if spec.variant != PokerVariant::Leduc {
        return Err(GameError::SpecOutOfBounds("expected a Leduc spec".into()));
    }
    gen_poker(spec)
}

/// Builds the game tree.
///
/// Every player antes 1. Cards are dealt in seat order, each seen only by its
/// holder. Check/call (`c`), raise (`r`) and fold (`f`, only when facing a
/// bet) are public. A round ends once every live player other than the last
/// raiser has acted since the last raise. Kuhn raises by 1 and the highest
/// card wins. Leduc raises by 2 in the first round and 4 in the second, shows
/// a public board card between rounds, and a card pairing the board beats
/// any unpaired card. Ties split the pot.
pub fn gen_poker(spec: &PokerSpec) -> Result<Vefg, GameError> {
    spec.check()?;
    let mut players = Vec::with_capacity(SEATS);
    let mut member = 0u8;
    for seat in 0..SEATS {
        if seat == spec.adversary_position {
            players.push(PlayerRole::Opponent);
        } else {
            players.push(PlayerRole::TeamMember(member));
            member += 1;
        }
    }
    let name = match spec.variant {
        PokerVariant::Kuhn => format!("kuhn3-r{}-adv{}", spec.ranks, spec.adversary_position),
        PokerVariant::Leduc => format!("leduc3-r{}-x{}-adv{}", spec.ranks, spec.raises, spec.adversary_position),
    };
    let mut b = GameBuilder::new(name, players);
    let mut deal = Vec::new();
    for seat in 0..SEATS {
        let labels: Vec<ActionLabel> = (0..spec.ranks).map(|r| b.label(&format!("d{seat}:{r}"))).collect();
        deal.push(labels);
    }
    let mut bet = Vec::new();
    for seat in 0..SEATS {
        bet.push([b.label(&format!("p{seat}:c")), b.label(&format!("p{seat}:r")), b.label(&format!("p{seat}:f"))]);
    }
    let board = (0..spec.ranks).map(|r| b.label(&format!("b:{r}"))).collect();
    let per_rank = match spec.variant {
        PokerVariant::Kuhn => 1,
        PokerVariant::Leduc => 3,
    };
    let mut gen = Gen { b, spec: *spec, deal, bet, board };
    let root = gen.deal(0, vec![per_rank; spec.ranks], [0; SEATS]);
    gen.b.finish(root)
}

struct Gen {
    b: GameBuilder,
    spec: PokerSpec,
    deal: Vec<Vec<ActionLabel>>,
    bet: Vec<[ActionLabel; 3]>,
    board: Vec<ActionLabel>,
}

#[derive(Clone)]
struct Hand {
    cards: [usize; SEATS],
    deck: Vec<u32>,
    round: usize,
    board: Option<usize>,
    bets: [f64; SEATS],
    folded: [bool; SEATS],
    cur: usize,
    raises: usize,
    /// Seats that still have to act in this round.
    need: u32,
}

impl Hand {
    fn live(&self) -> usize {
        self.folded.iter().filter(|f| !**f).count()
    }

    fn live_mask(&self) -> u32 {
        (0..SEATS).filter(|s| !self.folded[*s]).fold(0, |m, s| m | (1 << s))
    }

    fn first_live(&self) -> usize {
        (0..SEATS).find(|s| !self.folded[*s]).unwrap_or(0)
    }

    fn max_bet(&self) -> f64 {
        self.bets.iter().cloned().fold(f64::MIN, f64::max)
    }
}

impl Gen {
    fn deal(&mut self, seat: usize, deck: Vec<u32>, cards: [usize; SEATS]) -> NodeId {
        if seat == SEATS {
            let hand = Hand {
                cards,
                deck,
                round: 0,
                board: None,
                bets: [ANTE; SEATS],
                folded: [false; SEATS],
                cur: 0,
                raises: 0,
                need: (1 << SEATS) - 1,
            };
            return self.betting(hand);
        }
        let total: u32 = deck.iter().sum();
        let mut edges = Vec::new();
        for r in 0..deck.len() {
            if deck[r] == 0 {
                continue;
            }
            let mut rest = deck.clone();
            rest[r] -= 1;
            let mut c = cards;
            c[seat] = r;
            let child = self.deal(seat + 1, rest, c);
            edges.push(Edge { label: self.deal[seat][r], child, prob: deck[r] as f64 / total as f64, seen: 1 << seat });
        }
        self.b.chance(edges)
    }

    fn raise_amount(&self, round: usize) -> f64 {
        match self.spec.variant {
            PokerVariant::Kuhn => 1.0,
            PokerVariant::Leduc if round == 0 => 2.0,
            PokerVariant::Leduc => 4.0,
        }
    }

    fn betting(&mut self, hand: Hand) -> NodeId {
        let p = hand.cur;
        let facing = hand.max_bet() > hand.bets[p];
        let mut actions = vec![0usize];
        if hand.raises < self.spec.raises {
            actions.push(1);
        }
        if facing {
            actions.push(2);
        }
        let mut edges = Vec::new();
        for a in actions {
            let mut s = hand.clone();
            s.need &= !(1 << p);
            match a {
                0 => s.bets[p] = hand.max_bet(),
                1 => {
                    s.bets[p] = hand.max_bet() + self.raise_amount(hand.round);
                    s.raises += 1;
                    s.need = s.live_mask() & !(1 << p);
                }
                _ => s.folded[p] = true,
            }
            let child = if s.live() == 1 {
                self.terminal(&s)
            } else if s.need == 0 {
                if self.spec.variant == PokerVariant::Leduc && s.round == 0 {
                    self.board(s)
                } else {
                    self.terminal(&s)
                }
            } else {
                let mut q = (p + 1) % SEATS;
                while s.need & (1 << q) == 0 {
                    q = (q + 1) % SEATS;
                }
                s.cur = q;
                self.betting(s)
            };
            edges.push(Edge { label: self.bet[p][a], child, prob: 1.0, seen: EVERYONE });
        }
        self.b.decision(p, edges)
    }

    fn board(&mut self, hand: Hand) -> NodeId {
        let total: u32 = hand.deck.iter().sum();
        let mut edges = Vec::new();
        for r in 0..hand.deck.len() {
            if hand.deck[r] == 0 {
                continue;
            }
            let mut s = hand.clone();
            s.deck[r] -= 1;
            s.board = Some(r);
            s.round = 1;
            s.raises = 0;
            s.need = s.live_mask();
            s.cur = s.first_live();
            let child = self.betting(s);
            edges.push(Edge { label: self.board[r], child, prob: hand.deck[r] as f64 / total as f64, seen: EVERYONE });
        }
        self.b.chance(edges)
    }

    fn terminal(&mut self, hand: &Hand) -> NodeId {
        let pot: f64 = hand.bets.iter().sum();
        let strength = |s: usize| {
            let c = hand.cards[s];
            (usize::from(hand.board == Some(c)), c)
        };
        let best = (0..SEATS).filter(|s| !hand.folded[*s]).map(strength).max().unwrap_or((0, 0));
        let winners: Vec<usize> = (0..SEATS).filter(|s| !hand.folded[*s] && strength(*s) == best).collect();
        let share = pot / winners.len() as f64;
        let team: f64 = (0..SEATS)
            .filter(|s| *s != self.spec.adversary_position)
            .map(|s| if winners.contains(&s) { share } else { 0.0 } - hand.bets[s])
            .sum();
        self.b.terminal(team)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{is_public_turn_taking, validate_perfect_recall, InfosetTable, NodeKind};

    /// Independent count of Kuhn betting sequences: walk action strings.
    fn kuhn_sequences() -> usize {
        // (history, bets, raised, folded, acted-since-raise)
        fn rec(bets: [i32; 3], folded: [bool; 3], cur: usize, raised: bool, need: [bool; 3]) -> usize {
            let live = folded.iter().filter(|f| !**f).count();
            if live == 1 || !need.iter().any(|x| *x) {
                return 1;
            }
            let max = *bets.iter().max().unwrap();
            let mut total = 0;
            let mut opts = vec!['c'];
            if !raised {
                opts.push('r');
            }
            if max > bets[cur] {
                opts.push('f');
            }
            for a in opts {
                let (mut b, mut f, mut n, mut r) = (bets, folded, need, raised);
                n[cur] = false;
                match a {
                    'c' => b[cur] = max,
                    'r' => {
                        b[cur] = max + 1;
                        r = true;
                        for s in 0..3 {
                            n[s] = s != cur && !f[s];
                        }
                    }
                    _ => f[cur] = true,
                }
                let live = f.iter().filter(|x| !**x).count();
                if live == 1 || !n.iter().any(|x| *x) {
                    total += 1;
                    continue;
                }
                let mut q = (cur + 1) % 3;
                while !n[q] {
                    q = (q + 1) % 3;
                }
                total += rec(b, f, q, r, n);
            }
            total
        }
        rec([1; 3], [false; 3], 0, false, [true; 3])
    }

    #[test]
    fn kuhn_terminals_are_deals_times_sequences() {
        let g = gen_kuhn3(&PokerSpec::kuhn(3, 0)).unwrap();
        assert_eq!(kuhn_sequences(), 13);
        assert_eq!(g.terminal_count(), 6 * 13);
        let g4 = gen_kuhn3(&PokerSpec::kuhn(4, 1)).unwrap();
        assert_eq!(g4.terminal_count(), 24 * 13);
    }

    #[test]
    fn kuhn_opponent_infosets() {
        for adv in 0..3 {
            let g = gen_kuhn3(&PokerSpec::kuhn(3, adv)).unwrap();
            let t = InfosetTable::build(&g).unwrap();
            assert_eq!(t.count_for(adv), 12);
            assert!(validate_perfect_recall(&g).ok());
            assert!(is_public_turn_taking(&g));
        }
    }

    #[test]
    fn deals_are_uniform() {
        let g = gen_leduc3(&PokerSpec::leduc(2, 1, 0)).unwrap();
        // Probability of each full private deal sequence: walk the three deal levels.
        let mut probs = Vec::new();
        let mut stack = vec![(0usize, 1.0f64, 0usize)];
        while let Some((id, p, depth)) = stack.pop() {
            if depth == 3 {
                probs.push(p);
                continue;
            }
            for e in &g.node(id).edges {
                stack.push((e.child, p * e.prob, depth + 1));
            }
        }
        // 6 cards, 3 per rank: sequences as multisets of ranks differ in
        // multiplicity, but each concrete card sequence has probability 1/120.
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let aab = 3.0 / 6.0 * 2.0 / 5.0 * 3.0 / 4.0;
        assert!(probs.iter().any(|p| (p - aab).abs() < 1e-15));
    }

    #[test]
    fn leduc_shape() {
        let g = gen_leduc3(&PokerSpec::leduc(3, 1, 0)).unwrap();
        let t = InfosetTable::build(&g).unwrap();
        assert_eq!(t.count_for(0), 228);
        assert!(validate_perfect_recall(&g).ok());
        assert!(is_public_turn_taking(&g));
        let g2 = gen_leduc3(&PokerSpec::leduc(2, 2, 1)).unwrap();
        assert_eq!(InfosetTable::build(&g2).unwrap().count_for(1), 630);
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(gen_leduc3(&PokerSpec::leduc(3, 3, 0)).is_err());
        assert!(gen_kuhn3(&PokerSpec::kuhn(2, 0)).is_err());
        assert!(gen_kuhn3(&PokerSpec::kuhn(3, 3)).is_err());
        assert!(gen_kuhn3(&PokerSpec::leduc(3, 1, 0)).is_err());
    }

    #[test]
    fn showdown_pays_highest_card() {
        let g = gen_kuhn3(&PokerSpec::kuhn(3, 2)).unwrap();
        // Deal 2,1,0 to seats 0,1,2 and check around: seat 0 wins the antes.
        let mut id = 0;
        for seat in 0..3 {
            let want = g.find_label(&format!("d{seat}:{}", 2 - seat)).unwrap();
            id = g.node(id).edges.iter().find(|e| e.label == want).unwrap().child;
        }
        for seat in 0..3 {
            let want = g.find_label(&format!("p{seat}:c")).unwrap();
            id = g.node(id).edges.iter().find(|e| e.label == want).unwrap().child;
        }
        // Team = seats 0 and 1: +2 for seat 0, -1 for seat 1.
        assert_eq!(g.node(id).kind, NodeKind::Terminal { team_utility: 1.0 });
    }
}
