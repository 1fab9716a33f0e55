use alloc::vec;
use alloc::vec::Vec;

use super::tree::{Profile, Side, TNode, TreeGame};
use crate::error::SolverError;

/// Best pure response over perfect-recall infosets.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    /// Team value when the responder plays `actions`.
    pub value: f64,
    /// Chosen action per perfect-recall infoset of the responder; `None`
    /// elsewhere and at infosets the responder never reaches.
    pub actions: Vec<Option<usize>>,
}

fn behavior<'p>(tree: &TreeGame, profile: &'p Profile, node: usize) -> &'p [f64] {
    &profile.probs[tree.strat_of[node] as usize]
}

/// Expected team value of a full profile.
pub fn expected_value(tree: &TreeGame, profile: &Profile) -> Result<f64, SolverError> {
    profile.check(tree, None)?;
    let mut total = 0.0;
    let mut stack = vec![(0usize, 1.0f64)];
    while let Some((n, w)) = stack.pop() {
        match &tree.nodes[n] {
            TNode::Terminal(u) => total += w * u,
            TNode::Chance(edges) => stack.extend(edges.iter().filter(|e| e.0 > 0.0).map(|&(p, c)| (c, w * p))),
            TNode::Decision { children, .. } => {
                let sigma = behavior(tree, profile, n);
                stack.extend(children.iter().zip(sigma).filter(|e| *e.1 > 0.0).map(|(&c, &p)| (c, w * p)));
            }
        }
    }
    Ok(total)
}

/// Pure best response of `responder` to the other side's profile.
///
/// Responder infosets are settled from the deepest (in the responder's own
/// sequence) upwards. Every node's value is weighted by the probability of
/// reaching it under chance and the fixed side, so summing values over the
/// nodes of an infoset compares actions correctly.
pub fn best_response(tree: &TreeGame, profile: &Profile, responder: Side) -> Result<BestResponse, SolverError> {
    profile.check(tree, Some(responder.other()))?;
    let n = tree.len();
    let mut reach = vec![0.0f64; n];
    reach[0] = 1.0;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); tree.perfect_recall_infosets()];
    // Preorder ids: a parent precedes its children.
    for id in 0..n {
        match &tree.nodes[id] {
            TNode::Terminal(_) => {}
            TNode::Chance(edges) => {
                for &(p, c) in edges {
                    reach[c] = reach[id] * p;
                }
            }
            TNode::Decision { side, children } => {
                if *side == responder {
                    members[tree.pr_of[id] as usize].push(id);
                    for &c in children {
                        reach[c] = reach[id];
                    }
                } else {
                    let sigma = behavior(tree, profile, id);
                    for (&c, &p) in children.iter().zip(sigma) {
                        reach[c] = reach[id] * p;
                    }
                }
            }
        }
    }

    let depth = &tree.own_depth[responder.index()];
    let mut order: Vec<usize> = (0..members.len()).filter(|&i| !members[i].is_empty()).collect();
    order.sort_by_key(|&i| core::cmp::Reverse(depth[members[i][0]]));

    let mut actions = vec![None; members.len()];
    let mut memo: Vec<Option<f64>> = vec![None; n];
    for i in order {
        let k = match &tree.nodes[members[i][0]] {
            TNode::Decision { children, .. } => children.len(),
            _ => unreachable!("infoset members are decision nodes"),
        };
        let mut best: Option<(usize, f64)> = None;
        for a in 0..k {
            let mut v = 0.0;
            for &m in &members[i] {
                if let TNode::Decision { children, .. } = &tree.nodes[m] {
                    v += weighted(tree, children[a], &reach, &actions, &mut memo, responder, profile);
                }
            }
            let better = match best {
                None => true,
                Some((_, b)) => match responder {
                    Side::Max => v > b,
                    Side::Min => v < b,
                },
            };
            if better {
                best = Some((a, v));
            }
        }
        actions[i] = best.map(|b| b.0);
    }
    let value = weighted(tree, 0, &reach, &actions, &mut memo, responder, profile);
    Ok(BestResponse { value, actions })
}

/// Reach-weighted value of the subtree at `n` with the responder following
/// the settled `actions`.
fn weighted(
    tree: &TreeGame,
    n: usize,
    reach: &[f64],
    actions: &[Option<usize>],
    memo: &mut [Option<f64>],
    responder: Side,
    profile: &Profile,
) -> f64 {
    if let Some(v) = memo[n] {
        return v;
    }
    let v = match &tree.nodes[n] {
        TNode::Terminal(u) => reach[n] * u,
        TNode::Chance(edges) => edges.iter().map(|&(_, c)| weighted(tree, c, reach, actions, memo, responder, profile)).sum(),
        TNode::Decision { side, children } => {
            if *side == responder {
                let a = actions[tree.pr_of[n] as usize].expect("deeper infosets are settled first");
                weighted(tree, children[a], reach, actions, memo, responder, profile)
            } else {
                children.iter().map(|&c| weighted(tree, c, reach, actions, memo, responder, profile)).sum()
            }
        }
    };
    memo[n] = Some(v);
    v
}

/// Sum of both best-response gaps; zero exactly at an equilibrium.
pub fn exploitability(tree: &TreeGame, profile: &Profile) -> Result<f64, SolverError> {
    let up = best_response(tree, profile, Side::Max)?.value;
    let down = best_response(tree, profile, Side::Min)?.value;
    Ok((up - down).max(0.0))
}
