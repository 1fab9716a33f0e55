use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::SolverError;
use crate::game::{team_perfect_recall_refinement, Edge, GameBuilder, InfosetTable, NodeKind, PlayerRole, Vefg};
use crate::instances::{gen_kuhn3, gen_toy, PokerSpec, ToySpec};

/// Matching pennies: the team member moves first, the opponent does not see it.
fn pennies() -> Vefg {
    let mut b = GameBuilder::new("pennies", vec![PlayerRole::TeamMember(0), PlayerRole::Opponent]);
    let (h, t) = (b.label("h"), b.label("t"));
    let mut top = Vec::new();
    for (i, x) in [h, t].into_iter().enumerate() {
        let mut es = Vec::new();
        for (j, y) in [h, t].into_iter().enumerate() {
            let z = b.terminal(if i == j { 1.0 } else { -1.0 });
            es.push(Edge { label: y, child: z, prob: 1.0, seen: 0b10 });
        }
        let o = b.decision(1, es);
        top.push(Edge { label: x, child: o, prob: 1.0, seen: 0b01 });
    }
    let root = b.decision(0, top);
    b.finish(root).unwrap()
}

#[test]
fn pennies_converges_under_every_algorithm() {
    let tree = TreeGame::new(&pennies(), None).unwrap();
    for algo in [Algorithm::Cfr, Algorithm::CfrPlus, Algorithm::LinearCfrPlus] {
        let (p, _) = solve_cfr(&tree, algo, 10_000, 0).unwrap();
        assert!(exploitability(&tree, &p).unwrap() <= 1e-2, "{algo:?}");
    }
}

#[test]
fn zero_iterations_give_uniform_profile_and_empty_log() {
    let tree = TreeGame::new(&pennies(), None).unwrap();
    let (p, log) = solve_cfr(&tree, Algorithm::Cfr, 0, 1).unwrap();
    assert_eq!(p, Profile::uniform(&tree));
    assert!(log.rows.is_empty());
}

#[test]
fn best_response_against_uniform_pennies_is_zero() {
    let tree = TreeGame::new(&pennies(), None).unwrap();
    let u = Profile::uniform(&tree);
    assert_eq!(best_response(&tree, &u, Side::Max).unwrap().value, 0.0);
    assert_eq!(best_response(&tree, &u, Side::Min).unwrap().value, 0.0);
    assert_eq!(exploitability(&tree, &u).unwrap(), 0.0);
}

#[test]
fn log_rows_are_strictly_increasing() {
    let tree = TreeGame::new(&pennies(), None).unwrap();
    let (_, log) = solve_cfr(&tree, Algorithm::LinearCfrPlus, 100, 7).unwrap();
    assert_eq!(log.rows.len(), 14);
    assert!(log.rows.windows(2).all(|w| w[0].iteration < w[1].iteration));
}

#[test]
fn incomplete_profiles_are_rejected() {
    let tree = TreeGame::new(&pennies(), None).unwrap();
    let p = Profile { probs: vec![] };
    assert!(matches!(best_response(&tree, &p, Side::Max), Err(SolverError::IncompleteProfile(_))));
    assert!(matches!(expected_value(&tree, &p), Err(SolverError::IncompleteProfile(_))));
}

#[test]
fn three_player_games_are_not_two_player() {
    let g = gen_kuhn3(&PokerSpec::kuhn(3, 0)).unwrap();
    assert!(matches!(TreeGame::new(&g, None), Err(SolverError::NotTwoPlayerZeroSum(_))));
}

fn random_profile(tree: &TreeGame, rng: &mut ChaCha8Rng) -> Profile {
    Profile {
        probs: (0..tree.strategy_infosets())
            .map(|s| {
                let w: Vec<f64> = (0..tree.actions(s)).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
                let t: f64 = w.iter().sum();
                w.into_iter().map(|x| x / t).collect()
            })
            .collect(),
    }
}

#[test]
fn best_response_dominates_random_strategies() {
    let g = gen_kuhn3(&PokerSpec::kuhn(3, 1)).unwrap();
    let cg = crate::convert::convert_folded(&g).unwrap();
    let tree = TreeGame::from_converted(&cg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = random_profile(&tree, &mut rng);
    let br = best_response(&tree, &base, Side::Min).unwrap();
    for _ in 0..100 {
        let mut p = base.clone();
        let other = random_profile(&tree, &mut rng);
        for s in 0..tree.strategy_infosets() {
            if tree.side(s) == Side::Min {
                p.probs[s] = other.probs[s].clone();
            }
        }
        assert!(br.value <= expected_value(&tree, &p).unwrap() + 1e-12);
    }
}

#[test]
fn regret_matching_yields_distributions() {
    let tree = TreeGame::new(&pennies(), None).unwrap();
    let mut t = RegretTable::new(&tree);
    t.regret = vec![-1.0, 3.0, -2.0, -5.0];
    let mut out = [0.0; 2];
    t.current(0, &mut out);
    assert_eq!(out, [0.0, 1.0]);
    t.current(1, &mut out);
    assert_eq!(out, [0.5, 0.5]);
}

/// Reduced plans by brute force: enumerate full plans, blank out the
/// infosets each plan cannot reach, deduplicate.
fn reduced_by_dfs(game: &Vefg, player: usize) -> usize {
    let t = InfosetTable::build(game).unwrap();
    let mine: Vec<usize> = t.of_player(player).collect();
    let mut seen = BTreeSet::new();
    let total: usize = mine.iter().map(|&i| t.sets[i].actions.len()).product();
    for mut code in 0..total {
        let mut full = vec![0usize; t.len()];
        for &i in &mine {
            let k = t.sets[i].actions.len();
            full[i] = code % k;
            code /= k;
        }
        let mut reached = vec![None; t.len()];
        let mut stack = vec![game.root()];
        while let Some(n) = stack.pop() {
            let node = game.node(n);
            match node.kind {
                NodeKind::Decision { player: p } if p == player => {
                    let i = t.infoset(n).unwrap();
                    reached[i] = Some(full[i]);
                    stack.push(node.edges[full[i]].child);
                }
                _ => stack.extend(node.edges.iter().map(|e| e.child)),
            }
        }
        seen.insert(reached);
    }
    seen.len()
}

#[test]
fn reduced_plan_counts_match_exhaustive_enumeration() {
    let kuhn = gen_kuhn3(&PokerSpec::kuhn(3, 0)).unwrap();
    for p in 0..3 {
        let listed = reduced_normal_form_plans(&kuhn, p).unwrap();
        assert_eq!(listed.len(), reduced_by_dfs(&kuhn, p));
        assert_eq!(count_reduced_plans(&kuhn, p).unwrap(), num_bigint::BigUint::from(listed.len()));
        let distinct: BTreeSet<_> = listed.iter().map(|x| x.0.clone()).collect();
        assert_eq!(distinct.len(), listed.len());
    }
    let toy = gen_toy(&ToySpec::new(3, 2, 2)).unwrap();
    assert_eq!(reduced_normal_form_plans(&toy, 0).unwrap().len(), 64);
}

#[test]
fn single_infoset_has_one_plan_per_action() {
    let g = pennies();
    assert_eq!(reduced_normal_form_plans(&g, 0).unwrap().len(), 2);
}

/// Value of a small matrix game by support enumeration: for every pair of
/// equal-size supports, solve the indifference equations and keep
/// solutions that are mutual best responses.
fn support_enumeration(u: &[Vec<f64>]) -> f64 {
    let (m, n) = (u.len(), u[0].len());
    let mut best = None;
    for k in 1..=m.min(n) {
        for rs in subsets(m, k) {
            for cs in subsets(n, k) {
                // Column mix y on cs with rows in rs indifferent, value v.
                let Some(y) = solve_indifference(&rs, &cs, |i, j| u[i][j]) else { continue };
                let Some(x) = solve_indifference(&cs, &rs, |j, i| u[i][j]) else { continue };
                let v: f64 = cs.iter().zip(&y).map(|(&j, &q)| u[rs[0]][j] * q).sum();
                let row_ok = (0..m).all(|i| cs.iter().zip(&y).map(|(&j, &q)| u[i][j] * q).sum::<f64>() <= v + 1e-9);
                let col_ok = (0..n).all(|j| rs.iter().zip(&x).map(|(&i, &p)| u[i][j] * p).sum::<f64>() >= v - 1e-9);
                if row_ok && col_ok {
                    best = Some(v);
                }
            }
        }
    }
    best.expect("every finite game has an equilibrium")
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

/// Probability vector on `cols` making all `rows` earn the same payoff.
fn solve_indifference(rows: &[usize], cols: &[usize], u: impl Fn(usize, usize) -> f64) -> Option<Vec<f64>> {
    let k = cols.len();
    // Unknowns: q_1..q_k and v. Equations: sum_j u(r, j) q_j - v = 0 for
    // each row, and sum q = 1.
    let mut a = vec![vec![0.0; k + 2]; k + 1];
    for (e, &r) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            a[e][c] = u(r, j);
        }
        a[e][k] = -1.0;
    }
    for c in 0..k {
        a[k][c] = 1.0;
    }
    a[k][k + 1] = 1.0;
    for col in 0..=k {
        let piv = (col..=k).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..=k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..k + 2 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let q: Vec<f64> = (0..k).map(|c| a[c][k + 1] / a[c][c]).collect();
    q.iter().all(|&x| x >= -1e-12).then_some(q)
}

#[test]
fn matrix_solver_matches_support_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let (m, n) = (rng.random_range(1..5), rng.random_range(1..5));
        let u: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-5..=5) as f64).collect()).collect();
        let sol = matrix_game_solve(&MatrixGame::new(u.clone()).unwrap(), 1e-9).unwrap();
        assert!((sol.value - support_enumeration(&u)).abs() < 1e-9);
        assert!((sol.row.total() - 1.0).abs() < 1e-12 && (sol.col.total() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bruteforce_on_small_toy_matches_support_enumeration() {
    let g = gen_toy(&ToySpec::new(2, 2, 1).with_payoffs(3)).unwrap();
    let sol = tmecor_bruteforce(&g, TmecorOptions::default()).unwrap();
    let space = PlanSpace::new(&g).unwrap();
    let team = g.team();
    let opp = g.opponent().unwrap();
    let p1 = space.plans(team[0], 100).unwrap();
    let p2 = space.plans(team[1], 100).unwrap();
    let po = space.plans(opp, 100).unwrap();
    let mut rows = Vec::new();
    for a in &p1 {
        for b in &p2 {
            let joint = crate::convert::PurePlan(a.0.iter().zip(&b.0).map(|(x, y)| x.or(*y)).collect());
            rows.push(
                po.iter()
                    .map(|o| {
                        g.expected_utility_with(&mut |n| {
                            let i = space.table.infoset(n).unwrap();
                            joint.0[i].or(o.0[i]).unwrap()
                        })
                    })
                    .collect::<Vec<f64>>(),
            );
        }
    }
    assert!((sol.value - support_enumeration(&rows)).abs() < 1e-9);
}

#[test]
fn double_oracle_agrees_with_bruteforce() {
    for (c, a, h, seed) in [(2, 2, 1, 1), (2, 2, 2, 2), (3, 2, 1, 3), (2, 3, 1, 4)] {
        let g = team_perfect_recall_refinement(&gen_toy(&ToySpec::new(c, a, h).with_payoffs(seed)).unwrap()).unwrap();
        let b = tmecor_bruteforce(&g, TmecorOptions::default()).unwrap();
        let d = tmecor_double_oracle(&g, TmecorOptions::default()).unwrap();
        assert!((b.value - d.value).abs() < 1e-9, "({c},{a},{h}): {} vs {}", b.value, d.value);
        assert!(d.lower <= d.value + 1e-9 && d.value <= d.upper + 1e-9);
    }
}

#[test]
fn one_joint_plan_reduces_to_opponent_minimum() {
    // Team member with a single action: value is the opponent's best pure reply.
    let mut b = GameBuilder::new("forced", vec![PlayerRole::TeamMember(0), PlayerRole::Opponent]);
    let (f, x, y) = (b.label("f"), b.label("x"), b.label("y"));
    let z1 = b.terminal(2.0);
    let z2 = b.terminal(-1.0);
    let o = b.decision(1, vec![Edge { label: x, child: z1, prob: 1.0, seen: 0b11 }, Edge { label: y, child: z2, prob: 1.0, seen: 0b11 }]);
    let root = b.decision(0, vec![Edge { label: f, child: o, prob: 1.0, seen: 0b11 }]);
    let g = b.finish(root).unwrap();
    assert_eq!(tmecor_bruteforce(&g, TmecorOptions::default()).unwrap().value, -1.0);
}

#[test]
fn bruteforce_guard_trips() {
    let g = gen_kuhn3(&PokerSpec::kuhn(3, 0)).unwrap();
    assert!(matches!(tmecor_bruteforce(&g, TmecorOptions::default()), Err(SolverError::GameTooLarge(_))));
}
