//! Markov reward processes and the induced `d`-step construction.

use crate::error::{Error, Result};

use super::{check_finite, check_stochastic_row};

/// A finite Markov reward process `(S, R, T, gamma)`.
///
/// `rewards[s]` is the expected reward received on exiting state `s`;
/// `transitions` is a dense row-stochastic matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMrp {
    n_states: usize,
    rewards: Vec<f64>,
    transitions: Vec<f64>,
    gamma: f64,
    r_max: f64,
}

impl TabularMrp {
    /// Builds an MRP from per-state rewards and transition rows.
    pub fn new(
        rewards: Vec<f64>,
        transitions: Vec<Vec<f64>>,
        gamma: f64,
        r_max: f64,
    ) -> Result<Self> {
        let n = rewards.len();
        if n == 0 {
            return Err(Error::invalid("MRP must have at least one state"));
        }
        if transitions.len() != n {
            return Err(Error::invalid(format!(
                "expected {n} transition rows, got {}",
                transitions.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (s, row) in transitions.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "transition row {s} has length {}, expected {n}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(rewards, flat, gamma, r_max)
    }

    /// Builds an MRP from a flat row-major transition matrix.
    pub fn from_flat(
        rewards: Vec<f64>,
        transitions: Vec<f64>,
        gamma: f64,
        r_max: f64,
    ) -> Result<Self> {
        let n = rewards.len();
        if n == 0 {
            return Err(Error::invalid("MRP must have at least one state"));
        }
        if transitions.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} transition entries, got {}",
                n * n,
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
        for (s, &r) in rewards.iter().enumerate() {
            if r.abs() > r_max {
                return Err(Error::structure(format!(
                    "|rewards[{s}]| = {} exceeds r_max = {r_max}",
                    r.abs()
                )));
            }
        }
        for s in 0..n {
            check_stochastic_row(&transitions[s * n..(s + 1) * n], &format!("transition row {s}"))?;
        }
        Ok(TabularMrp {
            n_states: n,
            rewards,
            transitions,
            gamma,
            r_max,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn reward(&self, s: usize) -> f64 {
        self.rewards[s]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn transition(&self, s: usize, next: usize) -> f64 {
        self.transitions[s * self.n_states + next]
    }

    /// One transition row as a probability slice.
    pub fn row(&self, s: usize) -> &[f64] {
        &self.transitions[s * self.n_states..(s + 1) * self.n_states]
    }

    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    /// `T x` for a column vector `x`.
    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n_states;
        let mut out = vec![0.0; n];
        for s in 0..n {
            let row = self.row(s);
            let mut acc = 0.0;
            for (p, v) in row.iter().zip(x) {
                acc += p * v;
            }
            out[s] = acc;
        }
        out
    }
}

/// Collapses `d` steps of `p` into one step: rewards become the expected
/// discounted `d`-step return, transitions become `T^d`, and the discount
/// becomes `gamma^d`. With `d = 1` the input is returned unchanged.
pub fn induce_mrp(p: &TabularMrp, d: usize) -> Result<TabularMrp> {
    if d == 0 {
        return Err(Error::invalid("frame-skip d must be at least 1"));
    }
    if d == 1 {
        return Ok(p.clone());
    }
    let n = p.n_states;
    let gamma = p.gamma;

    // R_d = sum_{j<d} gamma^j T^j R, accumulated term by term.
    let mut term = p.rewards.clone();
    let mut rewards = p.rewards.clone();
    for _ in 1..d {
        let mut next = p.apply(&term);
        for v in &mut next {
            *v *= gamma;
        }
        for (acc, v) in rewards.iter_mut().zip(&next) {
            *acc += v;
        }
        term = next;
    }

    let transitions = matrix_power(&p.transitions, n, d);
    let horizon_sum: f64 = (0..d).map(|j| gamma.powi(j as i32)).sum();
    TabularMrp::from_flat(rewards, transitions, gamma.powi(d as i32), p.r_max * horizon_sum)
}

/// `m^d` for a square row-major matrix, by repeated multiplication.
pub(crate) fn matrix_power(m: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut out = m.to_vec();
    for _ in 1..d {
        out = matrix_product(&out, m, n);
    }
    out
}

pub(crate) fn matrix_product(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_chain() -> TabularMrp {
        // Two states that deterministically swap; rewards (1, 0).
        TabularMrp::new(
            vec![1.0, 0.0],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            0.5,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn induce_with_d_one_is_identity() {
        let p = swap_chain();
        let q = induce_mrp(&p, 1).unwrap();
        assert_eq!(p.rewards(), q.rewards());
        assert_eq!(p.transitions(), q.transitions());
        assert_eq!(p.gamma(), q.gamma());
    }

    #[test]
    fn induce_swap_chain_d_two() {
        let p = swap_chain();
        let q = induce_mrp(&p, 2).unwrap();
        // T^2 = identity, R_2 = [1 + 0.5*0, 0 + 0.5*1], discount 0.25.
        assert_eq!(q.transitions(), &[1.0, 0.0, 0.0, 1.0]);
        assert!((q.reward(0) - 1.0).abs() < 1e-15);
        assert!((q.reward(1) - 0.5).abs() < 1e-15);
        assert!((q.gamma() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn induce_rejects_zero_d() {
        let p = swap_chain();
        assert!(matches!(
            induce_mrp(&p, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let bad = TabularMrp::new(
            vec![0.0, 0.0],
            vec![vec![0.5, 0.4], vec![0.0, 1.0]],
            0.9,
            1.0,
        );
        assert!(matches!(bad, Err(Error::Structure(_))));
    }

    #[test]
    fn rejects_reward_beyond_bound() {
        let bad = TabularMrp::new(
            vec![2.0, 0.0],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            0.9,
            1.0,
        );
        assert!(matches!(bad, Err(Error::Structure(_))));
    }
}
