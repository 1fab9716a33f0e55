use alloc::string::String;

use crate::game::NodeId;

/// Errors raised while building or inspecting a game.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("duplicate node id {0}")]
    DuplicateNodeId(u64),
    #[error("node {0} references unknown child {1}")]
    UnknownChild(u64, u64),
    #[error("unknown root node {0}")]
    UnknownRoot(u64),
    #[error("chance probabilities at node {node} sum to {sum}")]
    ProbabilityNotNormalized { node: u64, sum: f64 },
    #[error("invalid probability {prob} at node {node}")]
    InvalidProbability { node: u64, prob: f64 },
    #[error("edge {label:?} at node {node} has no visibility entry for player {player}")]
    MissingVisibilityEntry { node: u64, label: String, player: usize },
    #[error("cycle through node {0}")]
    CyclicStructure(u64),
    #[error("node {0} has more than one parent")]
    MultipleParents(u64),
    #[error("node {0} is not reachable from the root")]
    UnreachableNode(u64),
    #[error("non-terminal node {0} has no edges")]
    EmptyNode(u64),
    #[error("label {label:?} repeated at node {node}")]
    DuplicateLabel { node: u64, label: String },
    #[error("player index {0} out of range")]
    UnknownPlayer(usize),
    #[error("invalid player list: {0}")]
    InvalidPlayers(String),
    #[error("infoset of node {0} mixes different action lists")]
    ActionMismatchWithinInfoset(NodeId),
    #[error("not a team game: {0}")]
    NotATeamGame(String),
    #[error("generator parameters out of bounds: {0}")]
    SpecOutOfBounds(String),
}

/// Errors raised by the team conversions and strategy mappings.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConversionError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("histories grouped together have different actors near original node {0}")]
    NotPublicTurnTaking(NodeId),
    #[error("input lacks perfect recall for player {0}")]
    ImperfectRecallInput(usize),
    #[error("conversion needs exclusion data (pruned or folded mode)")]
    ExclusionDataMissing,
    #[error("coordinator node {0} would have {1} prescriptions")]
    TooManyPrescriptions(NodeId, u128),
    #[error("plan assigns an illegal action at team infoset {0}")]
    IllegalActionInPlan(usize),
    #[error("coordinator plan at node {0} is not a valid prescription choice")]
    IllegalPrescription(NodeId),
    #[error("converted game does not derive from this game: {0}")]
    OriginMismatch(String),
}

/// Errors raised by solvers and oracles.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("expected a two-player zero-sum game: {0}")]
    NotTwoPlayerZeroSum(String),
    #[error("player {0} does not have perfect recall")]
    ImperfectRecallPlayer(usize),
    #[error("game too large: {0}")]
    GameTooLarge(String),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("invalid iteration count: {0}")]
    InvalidIterationCount(String),
    #[error("profile is missing infoset {0}")]
    IncompleteProfile(usize),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

/// Errors raised by the closed-form size formulas.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CensusError {
    #[error("parameters out of range: {0}")]
    InvalidParameters(String),
    #[error("level profile entry {count} at c = {c} is not divisible by c")]
    NonDivisibleLevelProfile { c: usize, count: String },
}
