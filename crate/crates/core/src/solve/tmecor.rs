//! Team-maxmin equilibrium with correlation: the team commits to a
//! distribution over joint reduced plans, the opponent best responds.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::matrix::{matrix_game_solve, MatrixGame, MixedStrategy};
use super::plans::PlanSpace;
use crate::convert::PurePlan;
use crate::error::SolverError;
use crate::game::{PlayerRole, Vefg};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TmecorOptions {
    /// Pure-response gap tolerance.
    pub tol: f64,
    /// Largest payoff matrix the brute force builds.
    pub max_entries: u64,
    /// Largest number of plan combinations of all team members but the
    /// last that the double oracle enumerates per best response.
    pub max_member_plans: u64,
    pub max_rounds: usize,
}

impl Default for TmecorOptions {
    fn default() -> Self {
        TmecorOptions { tol: 1e-9, max_entries: 10_000_000, max_member_plans: 100_000, max_rounds: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TmecorSolution {
    /// Distribution over joint team plans.
    pub team: MixedStrategy<PurePlan>,
    pub opponent: MixedStrategy<PurePlan>,
    pub value: f64,
    /// Certified bounds on the value: what the team strategy guarantees,
    /// and what the opponent strategy concedes.
    pub lower: f64,
    pub upper: f64,
}

struct Setup {
    space: PlanSpace,
    team: Vec<usize>,
    opp: usize,
}

fn setup(game: &Vefg) -> Result<Setup, SolverError> {
    let opp = game.opponent().ok_or_else(|| SolverError::NotTwoPlayerZeroSum("no opponent".into()))?;
    // A converted game's coordinator is a team of one.
    let mut team = game.team();
    if team.is_empty() {
        team = game.player_index(PlayerRole::Coordinator).into_iter().collect();
    }
    if team.is_empty() {
        return Err(SolverError::NotTwoPlayerZeroSum("no team members".into()));
    }
    Ok(Setup { space: PlanSpace::new(game)?, team, opp })
}

fn merge(plans: &[&PurePlan]) -> PurePlan {
    let mut out = plans[0].clone();
    for p in &plans[1..] {
        for (slot, a) in out.0.iter_mut().zip(&p.0) {
            if a.is_some() {
                *slot = *a;
            }
        }
    }
    out
}

/// Every combination of one plan per list.
fn product(lists: &[Vec<PurePlan>]) -> Vec<PurePlan> {
    let mut out = Vec::new();
    let widths: Vec<usize> = lists.iter().map(|l| l.len()).collect();
    if widths.contains(&0) {
        return out;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let picked: Vec<&PurePlan> = idx.iter().zip(lists).map(|(&k, l)| &l[k]).collect();
        out.push(merge(&picked));
        let mut d = lists.len();
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < widths[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

impl Setup {
    fn entry(&self, team: &PurePlan, opp: &PurePlan) -> f64 {
        let s = &self.space;
        (0..s.terminals.len())
            .filter(|&z| s.reaches(team, &self.team, z) && s.reaches(opp, &[self.opp], z))
            .map(|z| s.payoff[z])
            .sum()
    }

    /// Terminal weights when the opponent mixes over `plans`.
    fn weights_vs_opponent(&self, plans: &[PurePlan], probs: &[f64]) -> Vec<f64> {
        let s = &self.space;
        (0..s.terminals.len())
            .map(|z| {
                let p: f64 = plans.iter().zip(probs).filter(|(o, _)| s.reaches(o, &[self.opp], z)).map(|(_, q)| q).sum();
                p * s.payoff[z]
            })
            .collect()
    }

    fn weights_vs_team(&self, plans: &[PurePlan], probs: &[f64]) -> Vec<f64> {
        let s = &self.space;
        (0..s.terminals.len())
            .map(|z| {
                let p: f64 = plans.iter().zip(probs).filter(|(t, _)| s.reaches(t, &self.team, z)).map(|(_, q)| q).sum();
                p * s.payoff[z]
            })
            .collect()
    }

    /// Best joint team plan: enumerate all members but the last, solve the
    /// last by backward induction.
    fn team_best_response(&self, prefixes: &[PurePlan], weight: &[f64]) -> (f64, PurePlan) {
        let (&last, head) = self.team.split_last().expect("team is non-empty");
        let mut best: Option<(f64, PurePlan)> = None;
        let mut masked = vec![0.0; weight.len()];
        for prefix in prefixes {
            for (z, w) in weight.iter().enumerate() {
                masked[z] = if self.space.reaches(prefix, head, z) { *w } else { 0.0 };
            }
            let (v, plan) = self.space.best_plan(last, &masked, true);
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, merge(&[prefix, &plan])));
            }
        }
        best.expect("at least one prefix")
    }
}

/// Builds the full joint-plan payoff matrix and solves it.
pub fn tmecor_bruteforce(game: &Vefg, options: TmecorOptions) -> Result<TmecorSolution, SolverError> {
    let st = setup(game)?;
    let mut entries = st.space.count(st.opp)?;
    for &p in &st.team {
        entries *= st.space.count(p)?;
    }
    if entries > BigUint::from(options.max_entries) {
        return Err(SolverError::GameTooLarge(format!("{entries} matrix entries (limit {})", options.max_entries)));
    }
    let lists = st.team.iter().map(|&p| st.space.plans(p, options.max_entries)).collect::<Result<Vec<_>, _>>()?;
    let team_plans = product(&lists);
    let opp_plans = st.space.plans(st.opp, options.max_entries)?;
    let rows = team_plans.iter().map(|t| opp_plans.iter().map(|o| st.entry(t, o)).collect()).collect();
    let sol = matrix_game_solve(&MatrixGame::new(rows)?, options.tol)?;
    Ok(TmecorSolution {
        value: sol.value,
        lower: sol.value - sol.row_gap,
        upper: sol.value + sol.col_gap,
        team: MixedStrategy { support: sol.row.support.into_iter().map(|(i, p)| (team_plans[i].clone(), p)).collect() },
        opponent: MixedStrategy { support: sol.col.support.into_iter().map(|(j, p)| (opp_plans[j].clone(), p)).collect() },
    })
}

/// Double oracle over joint team plans and opponent plans. Each round solves
/// the restricted matrix game and adds both players' best responses; the
/// team response against the restricted opponent mix bounds the value from
/// above, the opponent response against the team mix from below.
pub fn tmecor_double_oracle(game: &Vefg, options: TmecorOptions) -> Result<TmecorSolution, SolverError> {
    let st = setup(game)?;
    let (_, head) = st.team.split_last().expect("team is non-empty");
    let mut combos = BigUint::from(1u8);
    for &p in head {
        combos *= st.space.count(p)?;
    }
    if combos > BigUint::from(options.max_member_plans) {
        return Err(SolverError::GameTooLarge(format!(
            "{combos} plan combinations for the enumerated team members (limit {})",
            options.max_member_plans
        )));
    }
    let lists = head.iter().map(|&p| st.space.plans(p, options.max_member_plans)).collect::<Result<Vec<_>, _>>()?;
    let prefixes = if head.is_empty() { vec![PurePlan(vec![None; st.space.table.len()])] } else { product(&lists) };

    let uniform_weights = vec![0.0; st.space.terminals.len()];
    let mut team_plans = vec![st.team_best_response(&prefixes, &uniform_weights).1];
    let mut opp_plans = vec![st.space.best_plan(st.opp, &uniform_weights, false).1];
    let mut matrix = vec![vec![st.entry(&team_plans[0], &opp_plans[0])]];

    for _ in 0..options.max_rounds {
        let sol = matrix_game_solve(&MatrixGame::new(matrix.clone())?, options.tol.max(1e-12))?;
        let mut x = vec![0.0; team_plans.len()];
        for &(i, p) in &sol.row.support {
            x[i] = p;
        }
        let mut y = vec![0.0; opp_plans.len()];
        for &(j, p) in &sol.col.support {
            y[j] = p;
        }
        let (upper, team_br) = st.team_best_response(&prefixes, &st.weights_vs_opponent(&opp_plans, &y));
        let (lower, opp_br) = st.space.best_plan(st.opp, &st.weights_vs_team(&team_plans, &x), false);
        let done = upper - lower <= options.tol;
        let new_team = !team_plans.contains(&team_br);
        let new_opp = !opp_plans.contains(&opp_br);
        if done || (!new_team && !new_opp) {
            let pick = |plans: &[PurePlan], s: MixedStrategy<usize>| MixedStrategy {
                support: s.support.into_iter().map(|(i, p)| (plans[i].clone(), p)).collect(),
            };
            return Ok(TmecorSolution {
                team: pick(&team_plans, sol.row),
                opponent: pick(&opp_plans, sol.col),
                value: sol.value,
                lower,
                upper,
            });
        }
        if new_team {
            let row = opp_plans.iter().map(|o| st.entry(&team_br, o)).collect();
            matrix.push(row);
            team_plans.push(team_br);
        }
        if new_opp {
            for (row, t) in matrix.iter_mut().zip(&team_plans) {
                row.push(st.entry(t, &opp_br));
            }
            opp_plans.push(opp_br);
        }
    }
    Err(SolverError::NoConvergence(format!("double oracle did not close the gap in {} rounds", options.max_rounds)))
}
