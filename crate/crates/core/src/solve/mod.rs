//! Solvers for two-player zero-sum games and the TMECor oracle.
//!
//! Values are always team utilities: the team (or coordinator) maximizes,
//! the opponent minimizes.

mod br;
mod cfr;
mod matrix;
mod plans;
mod tmecor;
mod tree;

pub use br::{best_response, expected_value, exploitability, BestResponse};
pub use cfr::{solve_cfr, Algorithm, CfrSolver, ConvergenceLog, LogRow, RegretTable, MAX_ITERATIONS};
pub use matrix::{matrix_game_solve, MatrixGame, MatrixSolution, MixedStrategy};
pub use plans::{count_reduced_plans, reduced_normal_form_plans, PlanSpace};
pub use tmecor::{tmecor_bruteforce, tmecor_double_oracle, TmecorOptions, TmecorSolution};
pub use tree::{Profile, Side, TreeGame};

#[cfg(test)]
mod tests;
