//! JSON file formats for games and converted games.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use teamcoord::convert::{
    Belief, ConvertedGame, ExclusionSet, Mode, NodeOrigin, OriginRole, Prescription, SourceInfo,
};
use teamcoord::game::{build_game, EdgeSpec, GameSpec, NodeSpec, NodeSpecKind};
use teamcoord::{ActionLabel, InfoSetKey, PlayerRole, Vefg, Visibility};

use crate::error::CliError;

pub const CONVERTED_FORMAT: &str = "teamcoord-converted/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub name: String,
    pub players: Vec<String>,
    /// Label table in interning order. Optional on input.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub nodes: Vec<NodeFile>,
    pub root: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindFile {
    Decision,
    Chance,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeFile {
    pub id: u64,
    pub kind: KindFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub team_utility: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VisFile {
    Seen,
    Unseen,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub label: String,
    pub child: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prob: Option<f64>,
    /// Keyed `p0`, `p1`, ... by player index.
    pub vis: BTreeMap<String, VisFile>,
}

impl GameFile {
    pub fn from_game(game: &Vefg) -> GameFile {
        let spec = game.to_spec();
        GameFile {
            name: spec.name,
            players: spec.players.iter().map(|p| p.to_string()).collect(),
            labels: spec.labels,
            nodes: spec
                .nodes
                .into_iter()
                .map(|n| {
                    let (kind, player, team_utility) = match n.kind {
                        NodeSpecKind::Decision { player } => (KindFile::Decision, Some(player), None),
                        NodeSpecKind::Chance => (KindFile::Chance, None, None),
                        NodeSpecKind::Terminal { team_utility } => (KindFile::Terminal, None, Some(team_utility)),
                    };
                    let edges = n
                        .edges
                        .into_iter()
                        .map(|e| EdgeFile {
                            label: e.label,
                            child: e.child,
                            prob: e.prob,
                            vis: e
                                .visibility
                                .iter()
                                .enumerate()
                                .filter_map(|(p, v)| {
                                    let v = match (*v)? {
                                        Visibility::Seen => VisFile::Seen,
                                        Visibility::Unseen => VisFile::Unseen,
                                    };
                                    Some((format!("p{p}"), v))
                                })
                                .collect(),
                        })
                        .collect();
                    NodeFile { id: n.id, kind, player, edges, team_utility }
                })
                .collect(),
            root: spec.root,
        }
    }

    pub fn to_game(&self) -> Result<Vefg, CliError> {
        let players = self
            .players
            .iter()
            .map(|p| p.parse::<PlayerRole>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let kind = match n.kind {
                KindFile::Decision => NodeSpecKind::Decision {
                    player: n.player.ok_or_else(|| CliError::Invalid(format!("decision node {} has no player", n.id)))?,
                },
                KindFile::Chance => NodeSpecKind::Chance,
                KindFile::Terminal => NodeSpecKind::Terminal {
                    team_utility: n
                        .team_utility
                        .ok_or_else(|| CliError::Invalid(format!("terminal node {} has no team_utility", n.id)))?,
                },
            };
            let edges = n
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    label: e.label.clone(),
                    child: e.child,
                    prob: e.prob,
                    visibility: (0..players.len())
                        .map(|p| {
                            e.vis.get(&format!("p{p}")).map(|v| match v {
                                VisFile::Seen => Visibility::Seen,
                                VisFile::Unseen => Visibility::Unseen,
                            })
                        })
                        .collect(),
                })
                .collect();
            nodes.push(NodeSpec { id: n.id, kind, edges });
        }
        let spec = GameSpec { name: self.name.clone(), players, labels: self.labels.clone(), nodes, root: self.root };
        Ok(build_game(&spec)?)
    }
}

/// Hex SHA-256 of the canonical JSON form of a game.
pub fn digest(game: &Vefg) -> String {
    let bytes = serde_json::to_vec(&GameFile::from_game(game)).expect("game files always serialize");
    Sha256::digest(&bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyFile {
    pub player: String,
    /// Label ids of the converted game.
    pub observations: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceFile {
    pub name: String,
    pub node_count: usize,
    pub players: Vec<String>,
    pub infosets: Vec<KeyFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginFile {
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observed: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub belief: Vec<(usize, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<usize>,
    /// Per edge, `(infoset, label id)` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prescriptions: Vec<Vec<(usize, u32)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvertedFile {
    pub format: String,
    pub mode: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub safe_ir: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinator_groups: Option<Vec<Option<u32>>>,
    pub source: SourceFile,
    pub game: GameFile,
    pub origin: Vec<OriginFile>,
}

fn role_names(role: OriginRole) -> (&'static str, Option<u8>) {
    match role {
        OriginRole::Coordinator { member } => ("coordinator", Some(member)),
        OriginRole::PrescriptionChance { member } => ("prescription_chance", Some(member)),
        OriginRole::Opponent => ("opponent", None),
        OriginRole::Chance => ("chance", None),
        OriginRole::Terminal => ("terminal", None),
    }
}

fn parse_role(name: &str, member: Option<u8>) -> Result<OriginRole, CliError> {
    let need = || member.ok_or_else(|| CliError::Invalid(format!("origin role {name} needs a member")));
    Ok(match name {
        "coordinator" => OriginRole::Coordinator { member: need()? },
        "prescription_chance" => OriginRole::PrescriptionChance { member: need()? },
        "opponent" => OriginRole::Opponent,
        "chance" => OriginRole::Chance,
        "terminal" => OriginRole::Terminal,
        _ => return Err(CliError::Invalid(format!("unknown origin role {name:?}"))),
    })
}

impl ConvertedFile {
    pub fn from_converted(cg: &ConvertedGame) -> ConvertedFile {
        let src = &cg.source;
        ConvertedFile {
            format: CONVERTED_FORMAT.to_string(),
            mode: cg.mode.as_str().to_string(),
            safe_ir: cg.safe_ir_applied,
            coordinator_groups: cg.coordinator_groups.clone(),
            source: SourceFile {
                name: src.name.clone(),
                node_count: src.node_count,
                players: src.players.iter().map(|p| p.to_string()).collect(),
                infosets: src
                    .infosets
                    .iter()
                    .map(|k| KeyFile { player: k.player.to_string(), observations: k.observations.iter().map(|l| l.0).collect() })
                    .collect(),
                digest: src.digest.clone(),
            },
            game: GameFile::from_game(&cg.game),
            origin: cg
                .origin
                .iter()
                .map(|o| {
                    let (role, member) = role_names(o.role);
                    OriginFile {
                        role: role.to_string(),
                        member,
                        observed: o.observed.iter().map(|l| l.0).collect(),
                        excluded: o.excluded.infosets.clone(),
                        belief: o.belief.weights.clone(),
                        support: o.support.clone(),
                        domain: o.domain.clone(),
                        prescriptions: o
                            .prescriptions
                            .iter()
                            .map(|p| p.assignments.iter().map(|&(i, l)| (i, l.0)).collect())
                            .collect(),
                    }
                })
                .collect(),
        }
    }

    pub fn to_converted(&self) -> Result<ConvertedGame, CliError> {
        if self.format != CONVERTED_FORMAT {
            return Err(CliError::Invalid(format!("unsupported converted format {:?}", self.format)));
        }
        let mode: Mode = self.mode.parse().map_err(|_| CliError::Invalid(format!("unknown mode {:?}", self.mode)))?;
        let game = self.game.to_game()?;
        if self.origin.len() != game.len() {
            return Err(CliError::Invalid("origin table does not cover every node".into()));
        }
        let labels = |ids: &[u32]| ids.iter().map(|&l| ActionLabel(l)).collect::<Vec<_>>();
        let players = self.source.players.iter().map(|p| p.parse()).collect::<Result<Vec<PlayerRole>, _>>()?;
        let infosets = self
            .source
            .infosets
            .iter()
            .map(|k| Ok(InfoSetKey { player: k.player.parse()?, observations: labels(&k.observations) }))
            .collect::<Result<Vec<_>, CliError>>()?;
        let origin = self
            .origin
            .iter()
            .map(|o| {
                Ok(NodeOrigin {
                    role: parse_role(&o.role, o.member)?,
                    observed: labels(&o.observed),
                    excluded: ExclusionSet { infosets: o.excluded.clone() },
                    belief: Belief { weights: o.belief.clone() },
                    support: o.support.clone(),
                    domain: o.domain.clone(),
                    prescriptions: o
                        .prescriptions
                        .iter()
                        .map(|p| Prescription { assignments: p.iter().map(|&(i, l)| (i, ActionLabel(l))).collect() })
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(ConvertedGame {
            game,
            origin,
            mode,
            safe_ir_applied: self.safe_ir,
            coordinator_groups: self.coordinator_groups.clone(),
            source: SourceInfo {
                name: self.source.name.clone(),
                node_count: self.source.node_count,
                players,
                infosets,
                digest: self.source.digest.clone(),
            },
        })
    }
}

/// Either kind of game file, told apart by the `format` field.
pub enum Loaded {
    Game(Vefg),
    Converted(Box<ConvertedGame>),
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = read_text(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| CliError::Invalid(format!("{}: {e}", path.display()));
    if value.get("format").is_some() {
        let file: ConvertedFile = serde_json::from_value(value).map_err(bad)?;
        Ok(Loaded::Converted(Box::new(file.to_converted()?)))
    } else {
        let file: GameFile = serde_json::from_value(value).map_err(bad)?;
        Ok(Loaded::Game(file.to_game()?))
    }
}

pub fn load_game(path: &Path) -> Result<Vefg, CliError> {
    match load(path)? {
        Loaded::Game(g) => Ok(g),
        Loaded::Converted(_) => Err(CliError::Invalid(format!("{}: expected an original game, found a converted game", path.display()))),
    }
}

pub fn load_converted(path: &Path) -> Result<ConvertedGame, CliError> {
    match load(path)? {
        Loaded::Converted(cg) => Ok(*cg),
        Loaded::Game(_) => Err(CliError::Invalid(format!("{}: expected a converted game", path.display()))),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use teamcoord::convert::{apply_safe_imperfect_recall, convert, ConvertOptions};
    use teamcoord::instances::{gen_kuhn3, gen_toy, PokerSpec, ToySpec};

    #[test]
    fn game_round_trip() {
        let g = gen_toy(&ToySpec::new(2, 2, 2).with_payoffs(1)).unwrap();
        let text = to_json(&GameFile::from_game(&g));
        let back: GameFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_game().unwrap(), g);
    }

    #[test]
    fn converted_round_trip() {
        let g = gen_kuhn3(&PokerSpec::kuhn(3, 1)).unwrap();
        let mut cg = apply_safe_imperfect_recall(&convert(&g, ConvertOptions::new(Mode::Folded)).unwrap()).unwrap();
        cg.source.digest = Some(digest(&g));
        let text = to_json(&ConvertedFile::from_converted(&cg));
        let back: ConvertedFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_converted().unwrap(), cg);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = gen_toy(&ToySpec::new(2, 2, 1).with_payoffs(1)).unwrap();
        let b = gen_toy(&ToySpec::new(2, 2, 1).with_payoffs(2)).unwrap();
        assert_eq!(digest(&a), digest(&a.clone()));
        assert_eq!(digest(&a).len(), 64);
        assert_ne!(digest(&a), digest(&b));
    }

    #[test]
    fn missing_visibility_is_invalid() {
        let g = gen_toy(&ToySpec::new(1, 2, 1)).unwrap();
        let mut f = GameFile::from_game(&g);
        f.nodes[0].edges[0].vis.remove("p1");
        assert!(matches!(f.to_game(), Err(CliError::Invalid(_))));
    }
}
