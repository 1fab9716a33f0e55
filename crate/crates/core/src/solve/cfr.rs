use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::br::{expected_value, exploitability};
use super::tree::{Profile, Side, TNode, TreeGame};
use crate::error::SolverError;

/// Upper bound on the iteration count accepted by [`solve_cfr`].
pub const MAX_ITERATIONS: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Regret matching with simultaneous updates and uniform averaging.
    Cfr,
    /// Regret matching+, alternating updates, uniform averaging.
    CfrPlus,
    /// CFR+ with iteration `t` weighted by `t` in the average.
    LinearCfrPlus,
}

impl Algorithm {
    /// Command-line spelling: `cfr`, `cfr+` or `lcfr+`.
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Cfr => "cfr",
            Algorithm::CfrPlus => "cfr+",
            Algorithm::LinearCfrPlus => "lcfr+",
        }
    }
}

impl core::str::FromStr for Algorithm {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cfr" => Ok(Algorithm::Cfr),
            "cfr+" | "cfrplus" => Ok(Algorithm::CfrPlus),
            "lcfr+" | "linear-cfr+" | "linearcfrplus" => Ok(Algorithm::LinearCfrPlus),
            _ => Err(SolverError::InvalidIterationCount(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Cumulative regrets and weighted strategy sums, flat per strategy infoset.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretTable {
    offset: Vec<usize>,
    pub regret: Vec<f64>,
    pub strategy_sum: Vec<f64>,
}

impl RegretTable {
    pub fn new(tree: &TreeGame) -> Self {
        let total = *tree.strat_offset.last().unwrap_or(&0);
        RegretTable { offset: tree.strat_offset.clone(), regret: vec![0.0; total], strategy_sum: vec![0.0; total] }
    }

    fn range(&self, s: usize) -> core::ops::Range<usize> {
        self.offset[s]..self.offset[s + 1]
    }

    /// Regret matching: proportional to positive regret, uniform if none.
    pub fn current(&self, s: usize, out: &mut [f64]) {
        let r = &self.regret[self.range(s)];
        let pos: f64 = r.iter().map(|x| x.max(0.0)).sum();
        if pos > 0.0 {
            for (o, x) in out.iter_mut().zip(r) {
                *o = x.max(0.0) / pos;
            }
        } else {
            out.fill(1.0 / r.len() as f64);
        }
    }

    pub fn average(&self, s: usize) -> Vec<f64> {
        let w = &self.strategy_sum[self.range(s)];
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter().map(|x| x / total).collect()
        } else {
            vec![1.0 / w.len() as f64; w.len()]
        }
    }

    pub fn average_profile(&self) -> Profile {
        Profile { probs: (0..self.offset.len() - 1).map(|s| self.average(s)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRow {
    pub iteration: u64,
    pub team_value: f64,
    pub exploitability: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceLog {
    pub rows: Vec<LogRow>,
}

struct Run<'t> {
    tree: &'t TreeGame,
    table: RegretTable,
    current: Vec<f64>,
}

impl Run<'_> {
    fn refresh(&mut self) {
        for s in 0..self.tree.strategy_infosets() {
            let r = self.table.range(s);
            let (table, current) = (&self.table, &mut self.current);
            table.current(s, &mut current[r]);
        }
    }

    /// Returns the team value of the subtree under the current strategies
    /// and accumulates regrets and averages for the sides in `update`.
    fn walk(&mut self, n: usize, reach: [f64; 2], chance: f64, update: [bool; 2], weight: f64) -> f64 {
        let tree = self.tree;
        match &tree.nodes[n] {
            TNode::Terminal(u) => *u,
            TNode::Chance(edges) => {
                let mut v = 0.0;
                for &(p, c) in edges {
                    if p > 0.0 {
                        v += p * self.walk(c, reach, chance * p, update, weight);
                    }
                }
                v
            }
            TNode::Decision { side, children } => {
                let k = side.index();
                let s = tree.strat_of[n] as usize;
                let base = self.table.offset[s];
                let mut values = [0.0f64; 64];
                let mut heap = Vec::new();
                let vals: &mut [f64] = if children.len() <= 64 {
                    &mut values[..children.len()]
                } else {
                    heap.resize(children.len(), 0.0);
                    &mut heap
                };
                let mut v = 0.0;
                for (a, &c) in children.iter().enumerate() {
                    let p = self.current[base + a];
                    let mut r = reach;
                    r[k] *= p;
                    if r[0] == 0.0 && r[1] == 0.0 {
                        continue;
                    }
                    vals[a] = self.walk(c, r, chance, update, weight);
                    v += p * vals[a];
                }
                if update[k] {
                    let cf = reach[1 - k] * chance;
                    let sign = if *side == Side::Max { 1.0 } else { -1.0 };
                    for a in 0..children.len() {
                        self.table.regret[base + a] += cf * sign * (vals[a] - v);
                        self.table.strategy_sum[base + a] += weight * reach[k] * self.current[base + a];
                    }
                }
                v
            }
        }
    }

    fn floor_regrets(&mut self, side: Side) {
        for s in 0..self.tree.strategy_infosets() {
            if self.tree.side(s) == side {
                let r = self.table.range(s);
                for x in &mut self.table.regret[r] {
                    *x = x.max(0.0);
                }
            }
        }
    }
}

/// Incremental CFR-family solver; `solve_cfr` drives one of these.
pub struct CfrSolver<'t> {
    run: Run<'t>,
    algorithm: Algorithm,
    t: u64,
}

impl<'t> CfrSolver<'t> {
    pub fn new(tree: &'t TreeGame, algorithm: Algorithm) -> Self {
        let total = *tree.strat_offset.last().unwrap_or(&0);
        CfrSolver { run: Run { tree, table: RegretTable::new(tree), current: vec![0.0; total] }, algorithm, t: 0 }
    }

    /// Completed iterations.
    pub fn iteration(&self) -> u64 {
        self.t
    }

    pub fn table(&self) -> &RegretTable {
        &self.run.table
    }

    pub fn average(&self) -> Profile {
        self.run.table.average_profile()
    }

    pub fn step(&mut self) {
        self.t += 1;
        let run = &mut self.run;
        match self.algorithm {
            Algorithm::Cfr => {
                run.refresh();
                run.walk(0, [1.0, 1.0], 1.0, [true, true], 1.0);
            }
            Algorithm::CfrPlus | Algorithm::LinearCfrPlus => {
                let weight = if self.algorithm == Algorithm::LinearCfrPlus { self.t as f64 } else { 1.0 };
                for side in [Side::Max, Side::Min] {
                    run.refresh();
                    let mut update = [false; 2];
                    update[side.index()] = true;
                    run.walk(0, [1.0, 1.0], 1.0, update, weight);
                    run.floor_regrets(side);
                }
            }
        }
    }
}

/// Runs `iterations` of the chosen algorithm from uniform strategies and
/// returns the normalized average profile. Every `log_every` iterations
/// (never if 0) the value and exploitability of the average are logged.
pub fn solve_cfr(
    tree: &TreeGame,
    algorithm: Algorithm,
    iterations: u64,
    log_every: u64,
) -> Result<(Profile, ConvergenceLog), SolverError> {
    if iterations > MAX_ITERATIONS {
        return Err(SolverError::InvalidIterationCount(format!("{iterations} exceeds {MAX_ITERATIONS}")));
    }
    let mut solver = CfrSolver::new(tree, algorithm);
    let mut log = ConvergenceLog::default();
    while solver.iteration() < iterations {
        solver.step();
        let t = solver.iteration();
        if log_every > 0 && t.is_multiple_of(log_every) {
            let avg = solver.average();
            log.rows.push(LogRow {
                iteration: t,
                team_value: expected_value(tree, &avg)?,
                exploitability: exploitability(tree, &avg)?,
            });
        }
    }
    Ok((solver.average(), log))
}
