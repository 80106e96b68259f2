//! Exact solvers: policy evaluation, value iteration, repeated-action
//! values and the price of inertia.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::mdp::{induce_mdp, TabularMdp};
use super::mrp::TabularMrp;
use super::{ActionValues, DeterministicPolicy, StateValues};

/// Residual required of every linear-system and fixed-point solve.
pub const DEFAULT_SOLVE_RESIDUAL: f64 = 1e-10;

/// Above this size, policy evaluation switches from a direct linear solve
/// to fixed-point iteration.
const DIRECT_SOLVE_LIMIT: usize = 2000;

const FIXED_POINT_MAX_ITERS: usize = 10_000_000;

/// Solves `V = R + gamma T V` for the value function of an MRP.
///
/// Discounted chains (`gamma < 1`) always have a solution. With `gamma = 1`
/// the chain must be episodic: states that self-loop with zero reward are
/// treated as absorbing and the reduced system over the remaining states is
/// solved; if that system is singular the chain cannot terminate from
/// everywhere and an error is returned.
pub fn evaluate_mrp(p: &TabularMrp) -> Result<StateValues> {
    let n = p.n_states();
    let gamma = p.gamma();
    if gamma < 1.0 {
        let v = if n <= DIRECT_SOLVE_LIMIT {
            solve_discounted_direct(p)?
        } else {
            solve_fixed_point(p)?
        };
        return finish_evaluation(p, v);
    }

    // Undiscounted: identify absorbing zero-reward states.
    let absorbing: Vec<bool> = (0..n)
        .map(|s| p.transition(s, s) == 1.0 && p.reward(s) == 0.0)
        .collect();
    let live: Vec<usize> = (0..n).filter(|&s| !absorbing[s]).collect();
    if live.is_empty() {
        return finish_evaluation(p, vec![0.0; n]);
    }
    if live.len() == n {
        return Err(Error::invalid(
            "gamma = 1 requires an episodic chain with absorbing zero-reward states",
        ));
    }
    let m = live.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (i, &s) in live.iter().enumerate() {
        b[i] = p.reward(s);
        for (j, &t) in live.iter().enumerate() {
            let coeff = if i == j { 1.0 } else { 0.0 };
            a[(i, j)] = coeff - p.transition(s, t);
        }
    }
    let lu = a.lu();
    let x = lu.solve(&b).ok_or_else(|| {
        Error::invalid("gamma = 1 on a non-episodic chain: reduced system is singular")
    })?;
    let mut v = vec![0.0; n];
    for (i, &s) in live.iter().enumerate() {
        v[s] = x[i];
    }
    finish_evaluation(p, v)
}

fn solve_discounted_direct(p: &TabularMrp) -> Result<Vec<f64>> {
    let n = p.n_states();
    let gamma = p.gamma();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for s in 0..n {
        for t in 0..n {
            let coeff = if s == t { 1.0 } else { 0.0 };
            a[(s, t)] = coeff - gamma * p.transition(s, t);
        }
    }
    let b = DVector::from_column_slice(p.rewards());
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::structure("policy-evaluation system is singular"))?;
    Ok(x.as_slice().to_vec())
}

fn solve_fixed_point(p: &TabularMrp) -> Result<Vec<f64>> {
    let gamma = p.gamma();
    let mut v = vec![0.0; p.n_states()];
    for it in 0..FIXED_POINT_MAX_ITERS {
        let tv = p.apply(&v);
        let mut change: f64 = 0.0;
        for (s, val) in v.iter_mut().enumerate() {
            let new = p.reward(s) + gamma * tv[s];
            change = change.max((new - *val).abs());
            *val = new;
        }
        if change * gamma / (1.0 - gamma).max(1e-16) <= DEFAULT_SOLVE_RESIDUAL {
            return Ok(v);
        }
        if it == FIXED_POINT_MAX_ITERS - 1 {
            return Err(Error::NoConvergence {
                iterations: FIXED_POINT_MAX_ITERS,
                residual: change,
            });
        }
    }
    unreachable!()
}

fn finish_evaluation(p: &TabularMrp, v: Vec<f64>) -> Result<StateValues> {
    let tv = p.apply(&v);
    let mut residual: f64 = 0.0;
    for s in 0..p.n_states() {
        residual = residual.max((v[s] - (p.reward(s) + p.gamma() * tv[s])).abs());
    }
    // Scale-aware residual check; exact inputs stay far below the bound.
    let scale = v.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    if residual > DEFAULT_SOLVE_RESIDUAL * scale.max(1.0) {
        return Err(Error::NoConvergence {
            iterations: 1,
            residual,
        });
    }
    super::check_finite(&v, "value function")?;
    Ok(StateValues(v))
}

/// Options for [`value_iteration_with`].
#[derive(Debug, Clone, Copy)]
pub struct ViOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for ViOptions {
    fn default() -> Self {
        ViOptions {
            tol: 1e-12,
            max_iters: 500_000,
        }
    }
}

/// Value iteration to a Bellman residual of at most `tol`.
pub fn value_iteration(m: &TabularMdp, tol: f64) -> Result<ActionValues> {
    value_iteration_with(
        m,
        ViOptions {
            tol,
            ..ViOptions::default()
        },
    )
}

/// Value iteration with an explicit iteration budget.
///
/// The sweep `Q <- R + gamma T max_a Q` stops once the sup-norm change is
/// at most `tol`; the Bellman operator is a sup-norm nonexpansion for
/// `gamma <= 1`, so the returned table has Bellman residual at most `tol`.
pub fn value_iteration_with(m: &TabularMdp, opts: ViOptions) -> Result<ActionValues> {
    let n = m.n_states();
    let na = m.n_actions();
    let mut q = ActionValues::zeros(n, na);
    let mut v = vec![0.0; n];
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_iters {
        change = 0.0;
        for a in 0..na {
            let t_a = m.action_matrix(a);
            for s in 0..n {
                let row = &t_a[s * n..(s + 1) * n];
                let mut dot = 0.0;
                for (p, val) in row.iter().zip(&v) {
                    dot += p * val;
                }
                let new = m.reward(s, a) + m.gamma() * dot;
                let old = q.get(s, a);
                change = change.max((new - old).abs());
                q.set(s, a, new);
            }
        }
        for s in 0..n {
            v[s] = q.row(s).iter().fold(f64::NEG_INFINITY, |mx, &x| mx.max(x));
        }
        if change <= opts.tol {
            return Ok(q);
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iters,
        residual: change,
    })
}

/// `||Q - B(Q)||_inf` for the Bellman optimality operator of `m`.
pub fn bellman_residual(m: &TabularMdp, q: &ActionValues) -> f64 {
    let n = m.n_states();
    let v = q.state_values();
    let mut residual: f64 = 0.0;
    for a in 0..m.n_actions() {
        let t_a = m.action_matrix(a);
        for s in 0..n {
            let row = &t_a[s * n..(s + 1) * n];
            let mut dot = 0.0;
            for (p, val) in row.iter().zip(&v.0) {
                dot += p * val;
            }
            let backed_up = m.reward(s, a) + m.gamma() * dot;
            residual = residual.max((q.get(s, a) - backed_up).abs());
        }
    }
    residual
}

/// Greedy policy with ties broken toward the lowest action index.
pub fn greedy_policy(q: &ActionValues) -> DeterministicPolicy {
    DeterministicPolicy(
        (0..q.n_states())
            .map(|s| {
                let row = q.row(s);
                let mut best = 0;
                for (a, &val) in row.iter().enumerate().skip(1) {
                    if val > row[best] {
                        best = a;
                    }
                }
                best
            })
            .collect(),
    )
}

/// Exact value of a deterministic policy on `m`.
pub fn evaluate_policy(m: &TabularMdp, policy: &DeterministicPolicy) -> Result<StateValues> {
    evaluate_mrp(&m.policy_mrp(policy)?)
}

/// Exact value, in `m`, of executing `policy` with every action repeated
/// `d` times. Computed by evaluating the policy on the induced MDP; the
/// induced value equals the value in `m` because the collapsed rewards and
/// discount reproduce the original return.
pub fn evaluate_policy_with_repeat(
    m: &TabularMdp,
    policy: &DeterministicPolicy,
    d: usize,
) -> Result<StateValues> {
    let md = induce_mdp(m, d)?;
    evaluate_policy(&md, policy)
}

/// `Q*(s, a^d)` for every state: the value of repeating `a` for `d` steps
/// and acting optimally thereafter. `q_star` must be a converged optimal
/// action-value table for `m`.
pub fn q_star_repeat_all(m: &TabularMdp, q_star: &ActionValues, a: usize, d: usize) -> Vec<f64> {
    let n = m.n_states();
    let t_a = m.action_matrix(a);
    // Base case d = 1: Q*(s, a).
    let mut vals: Vec<f64> = (0..n).map(|s| q_star.get(s, a)).collect();
    for _ in 1..d {
        let mut next = vec![0.0; n];
        for s in 0..n {
            let row = &t_a[s * n..(s + 1) * n];
            let mut dot = 0.0;
            for (p, val) in row.iter().zip(&vals) {
                dot += p * val;
            }
            next[s] = m.reward(s, a) + m.gamma() * dot;
        }
        vals = next;
    }
    vals
}

/// `Q*(s, a^d)` for a single state.
pub fn q_star_repeat(m: &TabularMdp, q_star: &ActionValues, s: usize, a: usize, d: usize) -> f64 {
    q_star_repeat_all(m, q_star, a, d)[s]
}

/// The price of inertia: the largest value lost to one forced repetition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceOfInertia {
    pub delta: f64,
    /// State achieving the maximum.
    pub state: usize,
    /// Action achieving the maximum.
    pub action: usize,
}

/// Computes the price of inertia, solving `m` to a tight tolerance first.
pub fn price_of_inertia(m: &TabularMdp) -> Result<PriceOfInertia> {
    let q = value_iteration(m, 1e-12)?;
    Ok(price_of_inertia_with(m, &q))
}

/// Price of inertia given a converged optimal action-value table:
/// `max_{s,a} (Q*(s, a) - Q*(s, a^2))`. Always nonnegative because the
/// optimal action at the maximizing state can only lose value when forced
/// to repeat.
pub fn price_of_inertia_with(m: &TabularMdp, q_star: &ActionValues) -> PriceOfInertia {
    let mut best = PriceOfInertia {
        delta: f64::NEG_INFINITY,
        state: 0,
        action: 0,
    };
    for a in 0..m.n_actions() {
        let repeated = q_star_repeat_all(m, q_star, a, 2);
        for s in 0..m.n_states() {
            let gap = q_star.get(s, a) - repeated[s];
            if gap > best.delta {
                best = PriceOfInertia {
                    delta: gap,
                    state: s,
                    action: a,
                };
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn absorbing_zero_reward_state_has_zero_value() {
        let p = TabularMrp::new(vec![0.0], vec![vec![1.0]], 1.0, 1.0).unwrap();
        let v = evaluate_mrp(&p).unwrap();
        assert_eq!(v.0, vec![0.0]);
    }

    #[test]
    fn self_loop_geometric_series() {
        let p = TabularMrp::new(vec![1.0], vec![vec![1.0]], 0.9, 1.0).unwrap();
        let v = evaluate_mrp(&p).unwrap();
        assert!((v.0[0] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn undiscounted_needs_absorbing_state() {
        let p = TabularMrp::new(
            vec![1.0, 1.0],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(evaluate_mrp(&p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn undiscounted_episodic_chain() {
        // State 0 reaches the absorbing state 1 with prob 0.5 per step;
        // expected number of exits from 0 is 2, each paying 1.
        let p = TabularMrp::new(
            vec![1.0, 0.0],
            vec![vec![0.5, 0.5], vec![0.0, 1.0]],
            1.0,
            1.0,
        )
        .unwrap();
        let v = evaluate_mrp(&p).unwrap();
        assert!((v.0[0] - 2.0).abs() < 1e-10);
        assert_eq!(v.0[1], 0.0);
    }

    #[test]
    fn single_state_value_iteration() {
        let m = TabularMdp::new(
            vec![vec![1.0]],
            vec![vec![vec![1.0]]],
            0.5,
            1.0,
            BTreeSet::new(),
        )
        .unwrap();
        let q = value_iteration(&m, 1e-12).unwrap();
        assert!((q.get(0, 0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn greedy_breaks_ties_low() {
        let q = ActionValues::from_values(2, 3, vec![1.0, 1.0, 1.0, 0.0, 2.0, 2.0]);
        let pi = greedy_policy(&q);
        assert_eq!(pi.0, vec![0, 1]);
    }

    #[test]
    fn q_star_repeat_base_case() {
        let m = TabularMdp::new(
            vec![vec![1.0, 0.5]],
            vec![vec![vec![1.0]], vec![vec![1.0]]],
            0.5,
            1.0,
            BTreeSet::new(),
        )
        .unwrap();
        let q = value_iteration(&m, 1e-13).unwrap();
        assert_eq!(q_star_repeat(&m, &q, 0, 1, 1), q.get(0, 1));
    }

    #[test]
    fn self_loop_actions_have_zero_inertia_price() {
        // Every action self-loops: repetition changes nothing.
        let m = TabularMdp::new(
            vec![vec![0.3, -0.2], vec![0.9, 0.1]],
            vec![
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            ],
            0.9,
            1.0,
            BTreeSet::new(),
        )
        .unwrap();
        let poi = price_of_inertia(&m).unwrap();
        assert!(poi.delta.abs() < 1e-9, "delta = {}", poi.delta);
    }
}
