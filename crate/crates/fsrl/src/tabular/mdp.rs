//! Markov decision problems and the induced `d`-step construction.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::mrp::{matrix_power, TabularMrp};
use super::{check_finite, check_stochastic_row};

/// A finite MDP `(S, A, R, T, gamma)` with dense tables.
///
/// `rewards` is indexed `s * n_actions + a`; transitions hold one
/// `n_states x n_states` row-stochastic matrix per action, stored
/// action-major. Terminal states, when declared, must be absorbing
/// self-loops with zero reward under every action.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    rewards: Vec<f64>,
    transitions: Vec<f64>,
    gamma: f64,
    r_max: f64,
    terminal_states: BTreeSet<usize>,
}

impl TabularMdp {
    /// Builds an MDP from nested tables: `rewards[s][a]` and
    /// `transitions[a][s][s']`.
    pub fn new(
        rewards: Vec<Vec<f64>>,
        transitions: Vec<Vec<Vec<f64>>>,
        gamma: f64,
        r_max: f64,
        terminal_states: BTreeSet<usize>,
    ) -> Result<Self> {
        let n = rewards.len();
        if n == 0 {
            return Err(Error::invalid("MDP must have at least one state"));
        }
        let a = rewards[0].len();
        if a == 0 {
            return Err(Error::invalid("MDP must have at least one action"));
        }
        let mut flat_r = Vec::with_capacity(n * a);
        for (s, row) in rewards.iter().enumerate() {
            if row.len() != a {
                return Err(Error::invalid(format!(
                    "reward row {s} has {} entries, expected {a}",
                    row.len()
                )));
            }
            flat_r.extend_from_slice(row);
        }
        if transitions.len() != a {
            return Err(Error::invalid(format!(
                "expected {a} transition matrices, got {}",
                transitions.len()
            )));
        }
        let mut flat_t = Vec::with_capacity(a * n * n);
        for (ai, mat) in transitions.iter().enumerate() {
            if mat.len() != n {
                return Err(Error::invalid(format!(
                    "transition matrix for action {ai} has {} rows, expected {n}",
                    mat.len()
                )));
            }
            for (s, row) in mat.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::invalid(format!(
                        "transition row ({s}, action {ai}) has length {}, expected {n}",
                        row.len()
                    )));
                }
                flat_t.extend_from_slice(row);
            }
        }
        Self::from_flat(n, a, flat_r, flat_t, gamma, r_max, terminal_states)
    }

    /// Builds an MDP from flat tables (`rewards[s*A+a]`,
    /// `transitions[a*S*S + s*S + s']`).
    #[allow(clippy::too_many_arguments)]
    pub fn from_flat(
        n_states: usize,
        n_actions: usize,
        rewards: Vec<f64>,
        transitions: Vec<f64>,
        gamma: f64,
        r_max: f64,
        terminal_states: BTreeSet<usize>,
    ) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::invalid("MDP needs at least one state and action"));
        }
        if rewards.len() != n_states * n_actions {
            return Err(Error::invalid(format!(
                "expected {} rewards, got {}",
                n_states * n_actions,
                rewards.len()
            )));
        }
        if transitions.len() != n_actions * n_states * n_states {
            return Err(Error::invalid(format!(
                "expected {} transition entries, got {}",
                n_actions * n_states * n_states,
                transitions.len()
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::invalid(format!("r_max {r_max} must be positive")));
        }
        check_finite(&rewards, "rewards")?;
        for (i, &r) in rewards.iter().enumerate() {
            if r.abs() > r_max + 1e-15 {
                return Err(Error::structure(format!(
                    "|reward({}, {})| = {} exceeds r_max = {r_max}",
                    i / n_actions,
                    i % n_actions,
                    r.abs()
                )));
            }
        }
        let mdp = TabularMdp {
            n_states,
            n_actions,
            rewards,
            transitions,
            gamma,
            r_max,
            terminal_states,
        };
        for a in 0..n_actions {
            for s in 0..n_states {
                check_stochastic_row(mdp.row(s, a), &format!("transition row ({s}, action {a})"))?;
            }
        }
        for &t in &mdp.terminal_states {
            if t >= n_states {
                return Err(Error::invalid(format!("terminal state {t} out of range")));
            }
            for a in 0..n_actions {
                if (mdp.transition(t, a, t) - 1.0).abs() > super::ROW_SUM_TOL {
                    return Err(Error::structure(format!(
                        "terminal state {t} must self-loop under action {a}"
                    )));
                }
                if mdp.reward(t, a) != 0.0 {
                    return Err(Error::structure(format!(
                        "terminal state {t} must have zero reward under action {a}"
                    )));
                }
            }
        }
        Ok(mdp)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn terminal_states(&self) -> &BTreeSet<usize> {
        &self.terminal_states
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal_states.contains(&s)
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.rewards[s * self.n_actions + a]
    }

    pub fn transition(&self, s: usize, a: usize, next: usize) -> f64 {
        self.transitions[a * self.n_states * self.n_states + s * self.n_states + next]
    }

    /// Transition row for `(s, a)` as a probability slice.
    pub fn row(&self, s: usize, a: usize) -> &[f64] {
        let n = self.n_states;
        let base = a * n * n + s * n;
        &self.transitions[base..base + n]
    }

    /// Whole transition matrix of one action (row-major `S x S`).
    pub fn action_matrix(&self, a: usize) -> &[f64] {
        let n = self.n_states;
        &self.transitions[a * n * n..(a + 1) * n * n]
    }

    /// The MRP obtained by fixing a deterministic policy.
    pub fn policy_mrp(&self, policy: &super::DeterministicPolicy) -> Result<TabularMrp> {
        if policy.len() != self.n_states {
            return Err(Error::invalid(format!(
                "policy has {} entries, expected {}",
                policy.len(),
                self.n_states
            )));
        }
        let n = self.n_states;
        let mut rewards = Vec::with_capacity(n);
        let mut transitions = Vec::with_capacity(n * n);
        for s in 0..n {
            let a = policy.action(s);
            if a >= self.n_actions {
                return Err(Error::invalid(format!(
                    "policy action {a} at state {s} out of range"
                )));
            }
            rewards.push(self.reward(s, a));
            transitions.extend_from_slice(self.row(s, a));
        }
        TabularMrp::from_flat(rewards, transitions, self.gamma, self.r_max)
    }

    /// The MRP of a single-action MDP.
    pub fn as_mrp(&self) -> Result<TabularMrp> {
        if self.n_actions != 1 {
            return Err(Error::invalid("as_mrp requires a single-action MDP"));
        }
        self.policy_mrp(&super::DeterministicPolicy(vec![0; self.n_states]))
    }
}

/// Collapses `d` repetitions of each action into one step: per action,
/// `R_d^a = sum_{j<d} (gamma T^a)^j R^a` and `T_d^a = (T^a)^d`, with
/// discount `gamma^d`. The action set is unchanged.
pub fn induce_mdp(m: &TabularMdp, d: usize) -> Result<TabularMdp> {
    if d == 0 {
        return Err(Error::invalid("frame-skip d must be at least 1"));
    }
    if d == 1 {
        return Ok(m.clone());
    }
    let n = m.n_states;
    let na = m.n_actions;
    let gamma = m.gamma;

    let mut rewards = vec![0.0; n * na];
    let mut transitions = Vec::with_capacity(na * n * n);
    for a in 0..na {
        let t_a = m.action_matrix(a);
        // Accumulate R^a_d term by term.
        let mut term: Vec<f64> = (0..n).map(|s| m.reward(s, a)).collect();
        let mut acc = term.clone();
        for _ in 1..d {
            let mut next = vec![0.0; n];
            for s in 0..n {
                let row = &t_a[s * n..(s + 1) * n];
                let mut dot = 0.0;
                for (p, v) in row.iter().zip(&term) {
                    dot += p * v;
                }
                next[s] = gamma * dot;
            }
            for (av, nv) in acc.iter_mut().zip(&next) {
                *av += nv;
            }
            term = next;
        }
        for s in 0..n {
            rewards[s * na + a] = acc[s];
        }
        transitions.extend_from_slice(&matrix_power(t_a, n, d));
    }
    let horizon_sum: f64 = (0..d).map(|j| gamma.powi(j as i32)).sum();
    TabularMdp::from_flat(
        n,
        na,
        rewards,
        transitions,
        gamma.powi(d as i32),
        m.r_max * horizon_sum,
        m.terminal_states.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::super::{evaluate_mrp, induce_mrp};
    use super::*;

    fn single_action_chain() -> TabularMdp {
        TabularMdp::new(
            vec![vec![1.0], vec![0.0]],
            vec![vec![vec![0.2, 0.8], vec![0.6, 0.4]]],
            0.9,
            1.0,
            BTreeSet::new(),
        )
        .unwrap()
    }

    #[test]
    fn induce_d_one_is_identity() {
        let m = single_action_chain();
        let m1 = induce_mdp(&m, 1).unwrap();
        assert_eq!(m, m1);
    }

    #[test]
    fn single_action_induction_matches_mrp_induction() {
        let m = single_action_chain();
        let p = m.as_mrp().unwrap();
        for d in 1..=5 {
            let md = induce_mdp(&m, d).unwrap();
            let pd = induce_mrp(&p, d).unwrap();
            for s in 0..2 {
                assert!((md.reward(s, 0) - pd.reward(s)).abs() < 1e-14);
                for next in 0..2 {
                    assert!((md.transition(s, 0, next) - pd.transition(s, next)).abs() < 1e-14);
                }
            }
            assert_eq!(md.gamma(), pd.gamma());
            // Values agree as well.
            let va = evaluate_mrp(&md.as_mrp().unwrap()).unwrap();
            let vb = evaluate_mrp(&pd).unwrap();
            assert!(va.max_norm_diff(&vb) < 1e-12);
        }
    }

    #[test]
    fn terminal_states_must_be_absorbing() {
        let bad = TabularMdp::new(
            vec![vec![0.0], vec![0.0]],
            vec![vec![vec![0.0, 1.0], vec![1.0, 0.0]]],
            1.0,
            1.0,
            BTreeSet::from([1]),
        );
        assert!(matches!(bad, Err(Error::Structure(_))));
    }
}
