//! Adversarial team games converted into two-player zero-sum games.
//!
//! A team of players with ex-ante coordination faces a single opponent. The
//! [`convert`] module replaces the team with a coordinator that observes only
//! team-public information and issues prescriptions (one action per private
//! state of the acting member). Three lossless abstractions are available:
//! belief pruning, folding of team-private chance, and safe imperfect recall.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod census;
pub mod convert;
pub mod error;
pub mod game;
pub mod instances;
pub mod solve;
pub mod turn_taking;

pub use error::{CensusError, ConversionError, GameError, SolverError};
pub use game::{
    ActionLabel, GameBuilder, GameNode, InfoSetKey, InfosetId, InfosetTable, NodeId, NodeKind,
    PlayerRole, PublicStateKey, Vefg, Visibility, VisibilityClass,
};
