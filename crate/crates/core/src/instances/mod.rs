//! Benchmark games: the parametric toy game and three-player Kuhn and Leduc poker.

mod poker;
mod toy;
mod variable;

pub use poker::{gen_kuhn3, gen_leduc3, gen_poker, PokerSpec, PokerVariant};
pub use toy::{gen_toy, toy_node_count, ToySpec, TOY_NODE_LIMIT};
pub use variable::variable_turns;
