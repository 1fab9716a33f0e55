//! Extensive-form games with per-edge, per-player visibility.
//!
//! Information sets and public states are not declared; they are derived from
//! which edges each player sees along a history.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::GameError;

pub type NodeId = usize;
pub type InfosetId = usize;

/// Tolerance on the sum of chance probabilities at a node.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Largest number of non-chance players (visibility is a bitmask).
pub const MAX_PLAYERS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlayerRole {
    TeamMember(u8),
    Opponent,
    Chance,
    Coordinator,
}

impl PlayerRole {
    pub fn is_team(&self) -> bool {
        matches!(self, PlayerRole::TeamMember(_))
    }
}

impl fmt::Display for PlayerRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerRole::TeamMember(k) => write!(f, "team{k}"),
            PlayerRole::Opponent => f.write_str("opponent"),
            PlayerRole::Chance => f.write_str("chance"),
            PlayerRole::Coordinator => f.write_str("coordinator"),
        }
    }
}

impl FromStr for PlayerRole {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "opponent" => Ok(PlayerRole::Opponent),
            "chance" => Ok(PlayerRole::Chance),
            "coordinator" => Ok(PlayerRole::Coordinator),
            _ => s
                .strip_prefix("team")
                .and_then(|k| k.parse::<u8>().ok())
                .map(PlayerRole::TeamMember)
                .ok_or_else(|| GameError::InvalidPlayers(format!("unknown role {s:?}"))),
        }
    }
}

/// Interned action label; the display string lives in the game's label table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionLabel(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visibility {
    Seen,
    Unseen,
}

/// Visibility of an edge for a set of observers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VisibilityClass {
    Pub,
    Priv,
    Hidden,
}

impl VisibilityClass {
    pub fn from_mask(seen: u32, observers: u32) -> Self {
        let hit = seen & observers;
        if hit == observers {
            VisibilityClass::Pub
        } else if hit == 0 {
            VisibilityClass::Hidden
        } else {
            VisibilityClass::Priv
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub label: ActionLabel,
    pub child: NodeId,
    /// Chance probability; 1.0 on decision edges.
    pub prob: f64,
    /// Bit `p` set iff player `p` sees this edge.
    pub seen: u32,
}

impl Edge {
    pub fn seen_by(&self, player: usize) -> bool {
        self.seen & (1 << player) != 0
    }

    pub fn public_to(&self, mask: u32) -> bool {
        self.seen & mask == mask
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Decision { player: usize },
    Chance,
    Terminal { team_utility: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameNode {
    pub kind: NodeKind,
    pub edges: Vec<Edge>,
    pub parent: Option<NodeId>,
    pub depth: u32,
}

impl GameNode {
    pub fn player(&self) -> Option<usize> {
        match self.kind {
            NodeKind::Decision { player } => Some(player),
            _ => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }

    pub fn is_chance(&self) -> bool {
        matches!(self.kind, NodeKind::Chance)
    }
}

/// Immutable game tree. Nodes are stored in preorder with the root at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Vefg {
    name: String,
    players: Vec<PlayerRole>,
    labels: Vec<String>,
    nodes: Vec<GameNode>,
}

impl Vefg {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> &[PlayerRole] {
        &self.players
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, l: ActionLabel) -> &str {
        &self.labels[l.0 as usize]
    }

    pub fn find_label(&self, s: &str) -> Option<ActionLabel> {
        self.labels.iter().position(|x| x == s).map(|i| ActionLabel(i as u32))
    }

    pub fn nodes(&self) -> &[GameNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &GameNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn player_index(&self, role: PlayerRole) -> Option<usize> {
        self.players.iter().position(|r| *r == role)
    }

    pub fn opponent(&self) -> Option<usize> {
        self.player_index(PlayerRole::Opponent)
    }

    /// Indices of the team members, ordered by member index.
    pub fn team(&self) -> Vec<usize> {
        let mut t: Vec<(u8, usize)> = self
            .players
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match r {
                PlayerRole::TeamMember(k) => Some((*k, i)),
                _ => None,
            })
            .collect();
        t.sort();
        t.into_iter().map(|(_, i)| i).collect()
    }

    pub fn team_mask(&self) -> u32 {
        self.team().iter().fold(0, |m, p| m | (1 << p))
    }

    pub fn visibility(&self, node: NodeId, edge: usize, player: usize) -> Result<Visibility, GameError> {
        if player >= self.players.len() {
            return Err(GameError::UnknownPlayer(player));
        }
        Ok(if self.nodes[node].edges[edge].seen_by(player) { Visibility::Seen } else { Visibility::Unseen })
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_terminal()).count()
    }

    /// Display form of an infoset key, e.g. `team0|d1:2,p0:c`.
    pub fn key_string(&self, key: &InfoSetKey) -> String {
        let mut s = key.player.to_string();
        s.push('|');
        for (i, l) in key.observations.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(self.label(*l));
        }
        s
    }

    /// Sum of chance-weighted terminal utilities when `choose` picks the edge
    /// index at every decision node reached.
    pub fn expected_utility_with(&self, choose: &mut dyn FnMut(NodeId) -> usize) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![(self.root(), 1.0f64)];
        while let Some((id, w)) = stack.pop() {
            let node = &self.nodes[id];
            match node.kind {
                NodeKind::Terminal { team_utility } => total += w * team_utility,
                NodeKind::Chance => {
                    for e in &node.edges {
                        if e.prob > 0.0 {
                            stack.push((e.child, w * e.prob));
                        }
                    }
                }
                NodeKind::Decision { .. } => {
                    let k = choose(id);
                    stack.push((node.edges[k].child, w));
                }
            }
        }
        total
    }

    /// Structured description equivalent to this game.
    pub fn to_spec(&self) -> GameSpec {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeSpec {
                id: id as u64,
                kind: match n.kind {
                    NodeKind::Decision { player } => NodeSpecKind::Decision { player },
                    NodeKind::Chance => NodeSpecKind::Chance,
                    NodeKind::Terminal { team_utility } => NodeSpecKind::Terminal { team_utility },
                },
                edges: n
                    .edges
                    .iter()
                    .map(|e| EdgeSpec {
                        label: self.label(e.label).to_string(),
                        child: e.child as u64,
                        prob: if n.is_chance() { Some(e.prob) } else { None },
                        visibility: (0..self.players.len())
                            .map(|p| Some(if e.seen_by(p) { Visibility::Seen } else { Visibility::Unseen }))
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        GameSpec { name: self.name.clone(), players: self.players.clone(), labels: self.labels.clone(), nodes, root: 0 }
    }

    /// Copy with the visibility mask of every edge rewritten by `f`.
    pub(crate) fn map_visibility(&self, mut f: impl FnMut(&GameNode, &Edge) -> u32) -> Vefg {
        let mut g = self.clone();
        for (id, node) in self.nodes.iter().enumerate() {
            for (k, e) in node.edges.iter().enumerate() {
                g.nodes[id].edges[k].seen = f(node, e);
            }
        }
        g
    }
}

/// Structured game description, the input of [`build_game`].
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub name: String,
    pub players: Vec<PlayerRole>,
    /// Label table interned before any edge label; may be empty.
    pub labels: Vec<String>,
    pub nodes: Vec<NodeSpec>,
    pub root: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec {
    pub id: u64,
    pub kind: NodeSpecKind,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeSpecKind {
    Decision { player: usize },
    Chance,
    Terminal { team_utility: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub label: String,
    pub child: u64,
    pub prob: Option<f64>,
    /// One entry per player, in player order.
    pub visibility: Vec<Option<Visibility>>,
}

/// Validates a structured description and returns the game.
pub fn build_game(spec: &GameSpec) -> Result<Vefg, GameError> {
    let mut index = BTreeMap::new();
    for (i, n) in spec.nodes.iter().enumerate() {
        if index.insert(n.id, i).is_some() {
            return Err(GameError::DuplicateNodeId(n.id));
        }
    }
    let root = *index.get(&spec.root).ok_or(GameError::UnknownRoot(spec.root))?;
    let mut b = GameBuilder::new(spec.name.clone(), spec.players.clone());
    b.external_ids = spec.nodes.iter().map(|n| n.id).collect();
    for l in &spec.labels {
        b.label(l);
    }
    for n in &spec.nodes {
        let mut edges = Vec::with_capacity(n.edges.len());
        for e in &n.edges {
            let child = *index.get(&e.child).ok_or(GameError::UnknownChild(n.id, e.child))?;
            let mut seen = 0u32;
            for p in 0..spec.players.len() {
                match e.visibility.get(p).copied().flatten() {
                    Some(Visibility::Seen) => seen |= 1 << p,
                    Some(Visibility::Unseen) => {}
                    None => {
                        return Err(GameError::MissingVisibilityEntry {
                            node: n.id,
                            label: e.label.clone(),
                            player: p,
                        })
                    }
                }
            }
            let prob = match n.kind {
                NodeSpecKind::Chance => e.prob.unwrap_or(f64::NAN),
                _ => 1.0,
            };
            let label = b.label(&e.label);
            edges.push(Edge { label, child, prob, seen });
        }
        match n.kind {
            NodeSpecKind::Terminal { team_utility } => {
                b.push(NodeKind::Terminal { team_utility }, edges);
            }
            NodeSpecKind::Chance => {
                b.push(NodeKind::Chance, edges);
            }
            NodeSpecKind::Decision { player } => {
                b.push(NodeKind::Decision { player }, edges);
            }
        }
    }
    b.finish(root)
}

/// Incremental construction of a game; children may be added before or
/// after their parents. `finish` validates and renumbers in preorder.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    name: String,
    players: Vec<PlayerRole>,
    labels: Vec<String>,
    index: BTreeMap<String, ActionLabel>,
    nodes: Vec<GameNode>,
    external_ids: Vec<u64>,
}

impl GameBuilder {
    pub fn new(name: impl Into<String>, players: Vec<PlayerRole>) -> Self {
        GameBuilder {
            name: name.into(),
            players,
            labels: Vec::new(),
            index: BTreeMap::new(),
            nodes: Vec::new(),
            external_ids: Vec::new(),
        }
    }

    pub fn label(&mut self, s: &str) -> ActionLabel {
        if let Some(l) = self.index.get(s) {
            return *l;
        }
        let l = ActionLabel(self.labels.len() as u32);
        self.labels.push(s.to_string());
        self.index.insert(s.to_string(), l);
        l
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn terminal(&mut self, team_utility: f64) -> NodeId {
        self.push(NodeKind::Terminal { team_utility }, Vec::new())
    }

    pub fn chance(&mut self, edges: Vec<Edge>) -> NodeId {
        self.push(NodeKind::Chance, edges)
    }

    pub fn decision(&mut self, player: usize, edges: Vec<Edge>) -> NodeId {
        let edges = edges.into_iter().map(|e| Edge { prob: 1.0, ..e }).collect();
        self.push(NodeKind::Decision { player }, edges)
    }

    fn push(&mut self, kind: NodeKind, edges: Vec<Edge>) -> NodeId {
        self.nodes.push(GameNode { kind, edges, parent: None, depth: 0 });
        self.nodes.len() - 1
    }

    fn ext(&self, id: NodeId) -> u64 {
        self.external_ids.get(id).copied().unwrap_or(id as u64)
    }

    pub fn finish(self, root: NodeId) -> Result<Vefg, GameError> {
        self.finish_with_map(root).map(|(g, _)| g)
    }

    /// Like `finish`, also returning the new id of every builder node.
    pub fn finish_with_map(self, root: NodeId) -> Result<(Vefg, Vec<NodeId>), GameError> {
        validate_players(&self.players)?;
        let n = self.nodes.len();
        if root >= n {
            return Err(GameError::UnknownRoot(root as u64));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            self.check_node(id, node)?;
        }
        // Preorder walk; a node met twice is either on a cycle or shared.
        const UNSEEN: usize = usize::MAX;
        let mut new_id = vec![UNSEEN; n];
        let mut on_path = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<(NodeId, bool)> = vec![(root, true)];
        while let Some((id, enter)) = stack.pop() {
            if !enter {
                on_path[id] = false;
                continue;
            }
            if new_id[id] != UNSEEN {
                return Err(if on_path[id] {
                    GameError::CyclicStructure(self.ext(id))
                } else {
                    GameError::MultipleParents(self.ext(id))
                });
            }
            new_id[id] = order.len();
            order.push(id);
            on_path[id] = true;
            stack.push((id, false));
            for e in self.nodes[id].edges.iter().rev() {
                if on_path[e.child] {
                    return Err(GameError::CyclicStructure(self.ext(e.child)));
                }
                stack.push((e.child, true));
            }
        }
        if let Some(id) = new_id.iter().position(|x| *x == UNSEEN) {
            return Err(GameError::UnreachableNode(self.ext(id)));
        }
        let GameBuilder { name, players, labels, mut nodes, .. } = self;
        let mut out: Vec<GameNode> = Vec::with_capacity(n);
        for &old in &order {
            let mut node = core::mem::replace(
                &mut nodes[old],
                GameNode { kind: NodeKind::Chance, edges: Vec::new(), parent: None, depth: 0 },
            );
            for e in &mut node.edges {
                e.child = new_id[e.child];
            }
            out.push(node);
        }
        for id in 0..n {
            let depth = out[id].depth;
            for k in 0..out[id].edges.len() {
                let c = out[id].edges[k].child;
                out[c].parent = Some(id);
                out[c].depth = depth + 1;
            }
        }
        Ok((Vefg { name, players, labels, nodes: out }, new_id))
    }

    fn check_node(&self, id: NodeId, node: &GameNode) -> Result<(), GameError> {
        let ext = self.ext(id);
        let nplayers = self.players.len();
        let all = if nplayers == MAX_PLAYERS { u32::MAX } else { (1u32 << nplayers) - 1 };
        if !node.is_terminal() && node.edges.is_empty() {
            return Err(GameError::EmptyNode(ext));
        }
        if let NodeKind::Decision { player } = node.kind {
            if player >= nplayers {
                return Err(GameError::UnknownPlayer(player));
            }
        }
        for (k, e) in node.edges.iter().enumerate() {
            if e.child >= self.nodes.len() {
                return Err(GameError::UnknownChild(ext, e.child as u64));
            }
            if e.seen & !all != 0 {
                return Err(GameError::UnknownPlayer(32 - e.seen.leading_zeros() as usize - 1));
            }
            if node.edges[..k].iter().any(|o| o.label == e.label) {
                return Err(GameError::DuplicateLabel { node: ext, label: self.labels[e.label.0 as usize].clone() });
            }
        }
        if node.is_chance() {
            let mut sum = 0.0;
            for e in &node.edges {
                if !(0.0..=1.0).contains(&e.prob) {
                    return Err(GameError::InvalidProbability { node: ext, prob: e.prob });
                }
                sum += e.prob;
            }
            if (sum - 1.0).abs() > PROB_TOLERANCE {
                return Err(GameError::ProbabilityNotNormalized { node: ext, sum });
            }
        }
        Ok(())
    }
}

fn validate_players(players: &[PlayerRole]) -> Result<(), GameError> {
    if players.len() > MAX_PLAYERS {
        return Err(GameError::InvalidPlayers(format!("{} players, at most {MAX_PLAYERS}", players.len())));
    }
    let mut members: Vec<u8> = Vec::new();
    for (i, r) in players.iter().enumerate() {
        match r {
            PlayerRole::Chance => return Err(GameError::InvalidPlayers("chance is not a listed player".into())),
            PlayerRole::TeamMember(k) => members.push(*k),
            _ => {}
        }
        if players[..i].contains(r) {
            return Err(GameError::InvalidPlayers(format!("role {r} listed twice")));
        }
    }
    members.sort();
    if members.iter().enumerate().any(|(i, k)| *k as usize != i) {
        return Err(GameError::InvalidPlayers("team member indices must be contiguous from 0".into()));
    }
    if !members.is_empty() && players.contains(&PlayerRole::Coordinator) {
        return Err(GameError::InvalidPlayers("coordinator and team members cannot coexist".into()));
    }
    Ok(())
}

/// Class of an edge for an observer set.
pub fn derive_visibility_class(
    game: &Vefg,
    node: NodeId,
    edge: usize,
    observers: &[usize],
) -> Result<VisibilityClass, GameError> {
    let mut mask = 0u32;
    for &p in observers {
        if p >= game.players().len() {
            return Err(GameError::UnknownPlayer(p));
        }
        mask |= 1 << p;
    }
    Ok(VisibilityClass::from_mask(game.node(node).edges[edge].seen, mask))
}

/// Acting player plus the labels that player has seen along the history.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoSetKey {
    pub player: PlayerRole,
    pub observations: Vec<ActionLabel>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfosetEntry {
    pub key: InfoSetKey,
    pub player: usize,
    pub nodes: Vec<NodeId>,
    pub actions: Vec<ActionLabel>,
}

/// Partition of all decision nodes into infosets. Ids follow canonical key
/// order (player index, then observation sequence).
#[derive(Clone, Debug, PartialEq)]
pub struct InfosetTable {
    pub node_infoset: Vec<Option<InfosetId>>,
    pub sets: Vec<InfosetEntry>,
}

impl InfosetTable {
    pub fn build(game: &Vefg) -> Result<Self, GameError> {
        let np = game.players().len();
        let mut groups: BTreeMap<(usize, Vec<ActionLabel>), Vec<NodeId>> = BTreeMap::new();
        let mut obs: Vec<Vec<ActionLabel>> = vec![Vec::new(); np];
        collect_infosets(game, game.root(), &mut obs, &mut groups);
        let mut node_infoset = vec![None; game.len()];
        let mut sets = Vec::with_capacity(groups.len());
        for ((player, observations), nodes) in groups {
            let id = sets.len();
            let actions: Vec<ActionLabel> = game.node(nodes[0]).edges.iter().map(|e| e.label).collect();
            for &n in &nodes {
                let same = game.node(n).edges.len() == actions.len()
                    && game.node(n).edges.iter().zip(&actions).all(|(e, a)| e.label == *a);
                if !same {
                    return Err(GameError::ActionMismatchWithinInfoset(n));
                }
                node_infoset[n] = Some(id);
            }
            let key = InfoSetKey { player: game.players()[player], observations };
            sets.push(InfosetEntry { key, player, nodes, actions });
        }
        Ok(InfosetTable { node_infoset, sets })
    }

    pub fn infoset(&self, node: NodeId) -> Option<InfosetId> {
        self.node_infoset[node]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn of_player(&self, player: usize) -> impl Iterator<Item = InfosetId> + '_ {
        self.sets.iter().enumerate().filter(move |(_, s)| s.player == player).map(|(i, _)| i)
    }

    pub fn count_for(&self, player: usize) -> usize {
        self.of_player(player).count()
    }

    pub fn find(&self, key: &InfoSetKey) -> Option<InfosetId> {
        self.sets.iter().position(|s| &s.key == key)
    }
}

fn collect_infosets(
    game: &Vefg,
    id: NodeId,
    obs: &mut [Vec<ActionLabel>],
    groups: &mut BTreeMap<(usize, Vec<ActionLabel>), Vec<NodeId>>,
) {
    let node = game.node(id);
    if let NodeKind::Decision { player } = node.kind {
        groups.entry((player, obs[player].clone())).or_default().push(id);
    }
    for e in &node.edges {
        for (p, o) in obs.iter_mut().enumerate() {
            if e.seen_by(p) {
                o.push(e.label);
            }
        }
        collect_infosets(game, e.child, obs, groups);
        for (p, o) in obs.iter_mut().enumerate() {
            if e.seen_by(p) {
                o.pop();
            }
        }
    }
}

/// Infosets of one player as (key, member nodes), in canonical order.
pub fn infosets(game: &Vefg, player: PlayerRole) -> Result<Vec<(InfoSetKey, Vec<NodeId>)>, GameError> {
    let p = game
        .player_index(player)
        .ok_or_else(|| GameError::InvalidPlayers(format!("no player {player}")))?;
    let table = InfosetTable::build(game)?;
    Ok(table.sets.into_iter().filter(|s| s.player == p).map(|s| (s.key, s.nodes)).collect())
}

/// Observer set plus the labels that are public to all of its members.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PublicStateKey {
    pub observers: Vec<usize>,
    pub observations: Vec<ActionLabel>,
}

/// Groups every history (node) by the subsequence of edges that are public
/// to the observer set.
pub fn public_states(game: &Vefg, observers: &[usize]) -> Result<BTreeMap<PublicStateKey, Vec<NodeId>>, GameError> {
    let mut mask = 0u32;
    for &p in observers {
        if p >= game.players().len() {
            return Err(GameError::UnknownPlayer(p));
        }
        mask |= 1 << p;
    }
    let mut sorted = observers.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: BTreeMap<PublicStateKey, Vec<NodeId>> = BTreeMap::new();
    let mut stack = vec![(game.root(), Vec::new())];
    while let Some((id, seq)) = stack.pop() {
        for e in game.node(id).edges.iter().rev() {
            let mut s = seq.clone();
            if e.public_to(mask) {
                s.push(e.label);
            }
            stack.push((e.child, s));
        }
        out.entry(PublicStateKey { observers: sorted.clone(), observations: seq }).or_default().push(id);
    }
    for nodes in out.values_mut() {
        nodes.sort();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecallViolationKind {
    /// The player does not see one of its own actions at this node.
    SelfUnseen,
    /// Two nodes of one infoset differ in the player's own past.
    DifferentHistory,
    /// Nodes of one infoset expose different action lists.
    ActionMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecallViolation {
    pub player: usize,
    pub kind: RecallViolationKind,
    pub node: NodeId,
    pub other: Option<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PerfectRecallReport {
    pub violations: Vec<RecallViolation>,
}

impl PerfectRecallReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn ok_for(&self, player: usize) -> bool {
        self.violations.iter().all(|v| v.player != player)
    }
}

pub fn validate_perfect_recall(game: &Vefg) -> PerfectRecallReport {
    let mut report = PerfectRecallReport::default();
    for (id, node) in game.nodes().iter().enumerate() {
        if let NodeKind::Decision { player } = node.kind {
            if node.edges.iter().any(|e| !e.seen_by(player)) {
                report.violations.push(RecallViolation {
                    player,
                    kind: RecallViolationKind::SelfUnseen,
                    node: id,
                    other: None,
                });
            }
        }
    }
    let table = match InfosetTable::build(game) {
        Ok(t) => t,
        Err(GameError::ActionMismatchWithinInfoset(n)) => {
            report.violations.push(RecallViolation {
                player: game.node(n).player().unwrap_or(0),
                kind: RecallViolationKind::ActionMismatch,
                node: n,
                other: None,
            });
            return report;
        }
        Err(_) => return report,
    };
    let seqs = own_sequences(game, &table);
    for set in &table.sets {
        let first = set.nodes[0];
        for &n in &set.nodes[1..] {
            if seqs[n] != seqs[first] {
                report.violations.push(RecallViolation {
                    player: set.player,
                    kind: RecallViolationKind::DifferentHistory,
                    node: first,
                    other: Some(n),
                });
                break;
            }
        }
    }
    report
}

/// For every decision node, an id of the acting player's own sequence of
/// (infoset, action) pairs leading to it. Equal ids mean equal sequences.
pub(crate) fn own_sequences(game: &Vefg, table: &InfosetTable) -> Vec<u32> {
    let np = game.players().len();
    let mut trie: BTreeMap<(u32, u32, u32), u32> = BTreeMap::new();
    let mut out = vec![u32::MAX; game.len()];
    let mut stack = vec![(game.root(), vec![0u32; np])];
    while let Some((id, seq)) = stack.pop() {
        let node = game.node(id);
        if let NodeKind::Decision { player } = node.kind {
            out[id] = seq[player];
        }
        for (k, e) in node.edges.iter().enumerate() {
            let mut s = seq.clone();
            if let NodeKind::Decision { player } = node.kind {
                let info = table.infoset(id).unwrap_or(usize::MAX) as u32;
                let next = trie.len() as u32 + 1;
                s[player] = *trie.entry((seq[player], info, k as u32)).or_insert(next);
            }
            stack.push((e.child, s));
        }
    }
    out
}

/// Makes every team member's action seen by all team members.
pub fn team_perfect_recall_refinement(game: &Vefg) -> Result<Vefg, GameError> {
    if game.players().contains(&PlayerRole::Coordinator) {
        return Err(GameError::NotATeamGame("game already has a coordinator".into()));
    }
    let mask = game.team_mask();
    if mask == 0 {
        return Err(GameError::NotATeamGame("no team members".into()));
    }
    Ok(game.map_visibility(|node, e| match node.kind {
        NodeKind::Decision { player } if mask & (1 << player) != 0 => e.seen | mask,
        _ => e.seen,
    }))
}

/// True iff all histories of every infoset share the acting-player sequence.
pub fn is_public_turn_taking(game: &Vefg) -> bool {
    let Ok(table) = InfosetTable::build(game) else {
        return false;
    };
    let actors = actor_sequences(game);
    table.sets.iter().all(|s| s.nodes.iter().all(|n| actors[*n] == actors[s.nodes[0]]))
}

/// Interned acting-player sequence of the history ending at each node.
fn actor_sequences(game: &Vefg) -> Vec<u32> {
    let mut trie: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut out = vec![0u32; game.len()];
    for (id, node) in game.nodes().iter().enumerate() {
        // Preorder: the parent is always assigned before its children.
        let actor = match node.kind {
            NodeKind::Decision { player } => player as u32,
            NodeKind::Chance => u32::MAX,
            NodeKind::Terminal { .. } => continue,
        };
        for e in &node.edges {
            let next = trie.len() as u32 + 1;
            out[e.child] = *trie.entry((out[id], actor)).or_insert(next);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seen(mask: u32) -> u32 {
        mask
    }

    /// Chance deals one of two cards to team0; team0 then acts, team1 acts blind.
    fn small() -> Vefg {
        let mut b = GameBuilder::new("small", vec![PlayerRole::TeamMember(0), PlayerRole::TeamMember(1), PlayerRole::Opponent]);
        let (x, y, l, r, c0, c1) = (b.label("x"), b.label("y"), b.label("l"), b.label("r"), b.label("c0"), b.label("c1"));
        let mut p0 = Vec::new();
        for (ci, c) in [c0, c1].into_iter().enumerate() {
            let mut es = Vec::new();
            for (ai, a) in [l, r].into_iter().enumerate() {
                let t1 = b.terminal((ci + ai) as f64);
                let t2 = b.terminal(-((ci * ai) as f64));
                let p1 = b.decision(1, vec![
                    Edge { label: x, child: t1, prob: 1.0, seen: seen(0b010) },
                    Edge { label: y, child: t2, prob: 1.0, seen: seen(0b010) },
                ]);
                es.push(Edge { label: a, child: p1, prob: 1.0, seen: seen(0b001) });
            }
            let d = b.decision(0, es);
            p0.push(Edge { label: c, child: d, prob: 0.5, seen: seen(0b001) });
        }
        let root = b.chance(p0);
        b.finish(root).unwrap()
    }

    #[test]
    fn single_terminal_game() {
        let mut b = GameBuilder::new("t", vec![PlayerRole::Opponent]);
        let t = b.terminal(1.0);
        let g = b.finish(t).unwrap();
        assert_eq!(g.len(), 1);
        assert!(InfosetTable::build(&g).unwrap().is_empty());
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let mut b = GameBuilder::new("t", vec![PlayerRole::Opponent]);
        let (a, c) = (b.label("a"), b.label("b"));
        let t1 = b.terminal(0.0);
        let t2 = b.terminal(0.0);
        let root = b.chance(vec![
            Edge { label: a, child: t1, prob: 0.5, seen: 0 },
            Edge { label: c, child: t2, prob: 0.6, seen: 0 },
        ]);
        assert!(matches!(b.finish(root), Err(GameError::ProbabilityNotNormalized { .. })));
    }

    #[test]
    fn uniform_three_way_chance_is_accepted() {
        let mut b = GameBuilder::new("t", vec![PlayerRole::Opponent]);
        let mut edges = Vec::new();
        for i in 0..3 {
            let l = b.label(&format!("o{i}"));
            let t = b.terminal(i as f64);
            edges.push(Edge { label: l, child: t, prob: 1.0 / 3.0, seen: 1 });
        }
        let root = b.chance(edges);
        assert_eq!(b.finish(root).unwrap().len(), 4);
    }

    #[test]
    fn shared_child_and_cycles_are_rejected() {
        let spec = GameSpec {
            name: "cyc".into(),
            players: vec![PlayerRole::Opponent],
            labels: vec![],
            nodes: vec![NodeSpec {
                id: 7,
                kind: NodeSpecKind::Decision { player: 0 },
                edges: vec![EdgeSpec { label: "a".into(), child: 7, prob: None, visibility: vec![Some(Visibility::Seen)] }],
            }],
            root: 7,
        };
        assert_eq!(build_game(&spec), Err(GameError::CyclicStructure(7)));
        let mut dup = spec.clone();
        dup.nodes.push(dup.nodes[0].clone());
        assert_eq!(build_game(&dup), Err(GameError::DuplicateNodeId(7)));
    }

    #[test]
    fn missing_visibility_is_reported() {
        let spec = GameSpec {
            name: "m".into(),
            players: vec![PlayerRole::TeamMember(0), PlayerRole::Opponent],
            labels: vec![],
            nodes: vec![
                NodeSpec {
                    id: 0,
                    kind: NodeSpecKind::Decision { player: 0 },
                    edges: vec![EdgeSpec { label: "a".into(), child: 1, prob: None, visibility: vec![Some(Visibility::Seen)] }],
                },
                NodeSpec { id: 1, kind: NodeSpecKind::Terminal { team_utility: 0.0 }, edges: vec![] },
            ],
            root: 0,
        };
        assert!(matches!(build_game(&spec), Err(GameError::MissingVisibilityEntry { player: 1, .. })));
    }

    #[test]
    fn spec_round_trip() {
        let g = small();
        assert_eq!(build_game(&g.to_spec()).unwrap(), g);
    }

    #[test]
    fn visibility_classes() {
        let g = small();
        // Root edge: dealt card seen by team0 only.
        assert_eq!(derive_visibility_class(&g, 0, 0, &[0, 1]).unwrap(), VisibilityClass::Priv);
        assert_eq!(derive_visibility_class(&g, 0, 0, &[0]).unwrap(), VisibilityClass::Pub);
        assert_eq!(derive_visibility_class(&g, 0, 0, &[1, 2]).unwrap(), VisibilityClass::Hidden);
        assert_eq!(derive_visibility_class(&g, 0, 0, &[5]), Err(GameError::UnknownPlayer(5)));
    }

    #[test]
    fn infosets_follow_seen_labels() {
        let g = small();
        let t = InfosetTable::build(&g).unwrap();
        assert_eq!(t.count_for(0), 2);
        // team1 sees nothing before acting: one infoset holding all four nodes.
        assert_eq!(t.count_for(1), 1);
        assert_eq!(t.sets[t.of_player(1).next().unwrap()].nodes.len(), 4);
        assert_eq!(g.key_string(&t.sets[0].key), "team0|c0");
    }

    #[test]
    fn team_public_state_merges_private_deal() {
        let g = small();
        let ps = public_states(&g, &[0, 1]).unwrap();
        assert_eq!(ps.len(), 1);
        let all = public_states(&g, &[0]).unwrap();
        // team0 sees the deal and its own move but not team1's.
        assert_eq!(all.len(), 1 + 2 + 4);
    }

    #[test]
    fn perfect_recall_and_refinement() {
        let g = small();
        assert!(validate_perfect_recall(&g).ok());
        let refined = team_perfect_recall_refinement(&g).unwrap();
        let t = InfosetTable::build(&refined).unwrap();
        assert_eq!(t.count_for(1), 2);
        assert_eq!(team_perfect_recall_refinement(&refined).unwrap(), refined);
        let forgetful = g.map_visibility(|n, e| if n.player() == Some(0) { 0 } else { e.seen });
        let r = validate_perfect_recall(&forgetful);
        assert!(r.violations.iter().any(|v| v.kind == RecallViolationKind::SelfUnseen && v.player == 0));
    }

    #[test]
    fn chance_only_game_has_perfect_recall() {
        let mut b = GameBuilder::new("c", vec![PlayerRole::Opponent]);
        let l = b.label("a");
        let t = b.terminal(0.0);
        let root = b.chance(vec![Edge { label: l, child: t, prob: 1.0, seen: 0 }]);
        let g = b.finish(root).unwrap();
        assert!(validate_perfect_recall(&g).ok());
        assert!(is_public_turn_taking(&g));
    }

    #[test]
    fn turn_taking_of_small_game() {
        assert!(is_public_turn_taking(&small()));
    }
}
