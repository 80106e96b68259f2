//! Random model generators for property suites and bound verification.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::Result;

use super::mdp::TabularMdp;
use super::mrp::TabularMrp;

/// Configuration for [`random_mdp`].
#[derive(Debug, Clone, Copy)]
pub struct RandomMdpConfig {
    pub n_states: usize,
    pub n_actions: usize,
    pub gamma: f64,
}

/// Samples one row from the flat Dirichlet (uniform on the simplex).
fn dirichlet_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    // Exponential(1) draws, normalized.
    let mut row: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = row.iter().sum();
    for x in &mut row {
        *x /= sum;
    }
    // Repair rounding drift on the largest entry so the row sums exactly.
    let drift: f64 = 1.0 - row.iter().sum::<f64>();
    let argmax = (0..n)
        .max_by(|&i, &j| row[i].partial_cmp(&row[j]).unwrap())
        .unwrap();
    row[argmax] += drift;
    row
}

/// Random ergodic MRP: Dirichlet transition rows (strictly positive, hence
/// ergodic) and rewards uniform in `[-1, 1]`.
pub fn random_mrp<R: Rng>(rng: &mut R, n_states: usize, gamma: f64) -> Result<TabularMrp> {
    let rewards: Vec<f64> = (0..n_states).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let transitions: Vec<Vec<f64>> = (0..n_states).map(|_| dirichlet_row(rng, n_states)).collect();
    TabularMrp::new(rewards, transitions, gamma, 1.0)
}

/// Random MDP: per-(state, action) Dirichlet rows, rewards uniform in
/// `[-1, 1]`.
pub fn random_mdp<R: Rng>(rng: &mut R, cfg: RandomMdpConfig) -> Result<TabularMdp> {
    let n = cfg.n_states;
    let rewards: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..cfg.n_actions)
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect()
        })
        .collect();
    let transitions: Vec<Vec<Vec<f64>>> = (0..cfg.n_actions)
        .map(|_| (0..n).map(|_| dirichlet_row(rng, n)).collect())
        .collect();
    TabularMdp::new(rewards, transitions, cfg.gamma, 1.0, BTreeSet::new())
}

/// Random deterministic MDP with reversible transitions: states form a
/// `width x height` torus and the four move actions wrap around, so every
/// move has an inverse move. Rewards are uniform in `[-1, 1]` with
/// `r_max = 1`.
pub fn random_reversible_mdp<R: Rng>(
    rng: &mut R,
    width: usize,
    height: usize,
    gamma: f64,
) -> Result<TabularMdp> {
    let n = width * height;
    let idx = |x: usize, y: usize| y * width + x;
    let mut transitions = vec![vec![vec![0.0; n]; n]; 4];
    for y in 0..height {
        for x in 0..width {
            let s = idx(x, y);
            let up = idx(x, (y + height - 1) % height);
            let down = idx(x, (y + 1) % height);
            let left = idx((x + width - 1) % width, y);
            let right = idx((x + 1) % width, y);
            transitions[0][s][up] = 1.0;
            transitions[1][s][down] = 1.0;
            transitions[2][s][left] = 1.0;
            transitions[3][s][right] = 1.0;
        }
    }
    let rewards: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    TabularMdp::new(rewards, transitions, gamma, 1.0, BTreeSet::new())
}

/// Random MDP with a small price of inertia: states sit on a ring and all
/// actions are gentle stochastic drifts (left, stay, right), so one extra
/// repetition of any action is cheap to undo. Rewards depend on position
/// only, shaped as a smooth bump with uniformly random phase.
pub fn random_low_inertia_mdp<R: Rng>(rng: &mut R, n_states: usize, gamma: f64) -> Result<TabularMdp> {
    let n = n_states;
    // Drift kernels: action 0 drifts left, 1 stays, 2 drifts right.
    let drift = [
        [0.70, 0.20, 0.10],
        [0.15, 0.70, 0.15],
        [0.10, 0.20, 0.70],
    ];
    let mut transitions = vec![vec![vec![0.0; n]; n]; 3];
    for (a, probs) in drift.iter().enumerate() {
        for s in 0..n {
            let left = (s + n - 1) % n;
            let right = (s + 1) % n;
            transitions[a][s][left] += probs[0];
            transitions[a][s][s] += probs[1];
            transitions[a][s][right] += probs[2];
        }
    }
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let amp: f64 = rng.random_range(0.5..1.0);
    let rewards: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let pos = std::f64::consts::TAU * s as f64 / n as f64;
            let r = amp * (pos + phase).cos();
            vec![r; 3]
        })
        .collect();
    TabularMdp::new(rewards, transitions, gamma, 1.0, BTreeSet::new())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use super::super::{check_ergodic, price_of_inertia};
    use super::*;

    #[test]
    fn dirichlet_rows_are_ergodic() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [2, 5, 9] {
            let p = random_mrp(&mut rng, n, 0.9).unwrap();
            assert!(check_ergodic(&p).is_ergodic());
        }
    }

    #[test]
    fn low_inertia_generator_has_small_delta() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let m = random_low_inertia_mdp(&mut rng, 8, 0.9).unwrap();
        let poi = price_of_inertia(&m).unwrap();
        assert!(poi.delta >= -1e-12);
        assert!(poi.delta < 0.5, "delta = {}", poi.delta);
    }
}
