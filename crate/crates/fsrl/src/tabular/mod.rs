//! Finite Markov reward processes and decision problems with exact solvers.
//!
//! Models are dense: an MRP stores a reward per state and a row-stochastic
//! transition matrix; an MDP stores per-(state, action) rewards and one
//! transition matrix per action. All solver outputs are plain `f64` arrays
//! behind thin newtypes with max-norm helpers.
//!
//! The induced-model constructions ([`induce_mrp`], [`induce_mdp`]) collapse
//! `d` consecutive steps of a model into one step of a new model whose
//! discount is `gamma^d`; they are the bridge between frame-skipped
//! interaction and ordinary one-step analysis.

mod ergodic;
mod generate;
mod io;
mod mdp;
mod mrp;
mod solve;

pub use ergodic::{check_ergodic, stationary_distribution, ErgodicReport};
pub use generate::{
    random_low_inertia_mdp, random_mdp, random_mrp, random_reversible_mdp, RandomMdpConfig,
};
pub use io::{parse_model, write_mdp, write_mrp, Model};
pub use mdp::{induce_mdp, TabularMdp};
pub use mrp::{induce_mrp, TabularMrp};
pub use solve::{
    bellman_residual, evaluate_mrp, evaluate_policy, evaluate_policy_with_repeat, greedy_policy,
    price_of_inertia, price_of_inertia_with, q_star_repeat, q_star_repeat_all, value_iteration,
    value_iteration_with, PriceOfInertia, DEFAULT_SOLVE_RESIDUAL,
};

/// Tolerance used when validating that transition rows sum to one.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// A state-value function `V` as a dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateValues(pub Vec<f64>);

impl StateValues {
    pub fn zeros(n: usize) -> Self {
        StateValues(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Max norm `||V||_inf`.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `||self - other||_inf`.
    pub fn max_norm_diff(&self, other: &StateValues) -> f64 {
        assert_eq!(self.len(), other.len(), "state-value length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// An action-value function `Q` as a dense `n_states x n_actions` table.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionValues {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl ActionValues {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        ActionValues {
            n_states,
            n_actions,
            values: vec![0.0; n_states * n_actions],
        }
    }

    pub fn from_values(n_states: usize, n_actions: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n_states * n_actions);
        ActionValues {
            n_states,
            n_actions,
            values,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.n_actions + a] = v;
    }

    /// Row of action values for one state.
    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    /// `max_a Q(s, a)` for every state.
    pub fn state_values(&self) -> StateValues {
        StateValues(
            (0..self.n_states)
                .map(|s| self.row(s).iter().fold(f64::NEG_INFINITY, |m, &q| m.max(q)))
                .collect(),
        )
    }

    /// `||self - other||_inf` over all (state, action) entries.
    pub fn max_norm_diff(&self, other: &ActionValues) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// A deterministic stationary policy: one action index per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicPolicy(pub Vec<usize>);

impl DeterministicPolicy {
    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn check_finite(values: &[f64], what: &str) -> crate::error::Result<()> {
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(crate::error::Error::structure(format!(
            "{what} contains non-finite entry {v} at index {i}"
        )));
    }
    Ok(())
}

/// Validates one probability row: entries in `[0, 1]`, sum within
/// [`ROW_SUM_TOL`] of one.
pub(crate) fn check_stochastic_row(row: &[f64], what: &str) -> crate::error::Result<()> {
    let mut sum = 0.0;
    for &p in row {
        if !(0.0..=1.0).contains(&p) {
            return Err(crate::error::Error::structure(format!(
                "{what} has entry {p} outside [0, 1]"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(crate::error::Error::structure(format!(
            "{what} sums to {sum}, expected 1 within {ROW_SUM_TOL:e}"
        )));
    }
    Ok(())
}
