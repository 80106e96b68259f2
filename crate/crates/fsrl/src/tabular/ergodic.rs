//! Ergodicity analysis and the stationary distribution.

use crate::error::{Error, Result};

use super::mrp::TabularMrp;

/// Outcome of the ergodicity check, with enough detail to name the
/// failing property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgodicReport {
    pub strongly_connected: bool,
    /// Period of the chain (gcd of cycle lengths); meaningful only when
    /// strongly connected. An aperiodic chain has period 1.
    pub period: usize,
    pub detail: String,
}

impl ErgodicReport {
    pub fn is_ergodic(&self) -> bool {
        self.strongly_connected && self.period == 1
    }
}

/// Tests irreducibility (strong connectivity of the transition graph) and
/// aperiodicity (gcd of cycle lengths equals one, computed from
/// breadth-first levels).
pub fn check_ergodic(p: &TabularMrp) -> ErgodicReport {
    let n = p.n_states();
    let edge = |s: usize, t: usize| p.transition(s, t) > 0.0;

    let forward = reachable(n, 0, |s| (0..n).filter(move |&t| edge(s, t)).collect());
    let backward = reachable(n, 0, |s| (0..n).filter(move |&t| edge(t, s)).collect());
    if let Some(s) = (0..n).find(|&s| !forward[s] || !backward[s]) {
        return ErgodicReport {
            strongly_connected: false,
            period: 0,
            detail: format!("not irreducible: state {s} is not on a cycle through state 0"),
        };
    }

    // BFS levels from state 0; every edge (u, v) closes a cycle of length
    // level(u) + 1 - level(v) modulo the period.
    let mut level = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    level[0] = 0;
    while let Some(u) = queue.pop_front() {
        for t in 0..n {
            if edge(u, t) && level[t] == usize::MAX {
                level[t] = level[u] + 1;
                queue.push_back(t);
            }
        }
    }
    let mut g: usize = 0;
    for u in 0..n {
        for v in 0..n {
            if edge(u, v) {
                let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
                g = gcd(g, diff);
            }
        }
    }
    // All edges consistent with levels (diff = 0 everywhere) cannot happen
    // on a strongly connected graph with a cycle; g = 0 only for the
    // single-state self-loop, which is aperiodic.
    let period = if g == 0 { 1 } else { g };
    ErgodicReport {
        strongly_connected: true,
        period,
        detail: if period == 1 {
            "ergodic".to_string()
        } else {
            format!("irreducible but periodic with period {period}")
        },
    }
}

fn reachable(n: usize, from: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(s) = stack.pop() {
        for t in succ(s) {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

const POWER_ITER_TOL: f64 = 1e-12;
const POWER_ITER_MAX: usize = 1_000_000;

/// Stationary distribution of an ergodic chain, by power iteration from
/// the uniform distribution. Returns `mu` with positive entries summing to
/// one and `||mu T - mu||_inf <= 1e-10` (`mu` as a row vector).
pub fn stationary_distribution(p: &TabularMrp) -> Result<Vec<f64>> {
    let report = check_ergodic(p);
    if !report.is_ergodic() {
        return Err(Error::structure(format!(
            "stationary distribution requires an ergodic chain: {}",
            report.detail
        )));
    }
    let n = p.n_states();
    let mut mu = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_ITER_MAX {
        // next = mu T (row-vector product).
        next.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..n {
            let w = mu[s];
            if w == 0.0 {
                continue;
            }
            for (t, &pr) in p.row(s).iter().enumerate() {
                next[t] += w * pr;
            }
        }
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        let change = mu
            .iter()
            .zip(&next)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut mu, &mut next);
        if change <= POWER_ITER_TOL {
            let residual = stationarity_residual(p, &mu);
            if residual <= 1e-10 {
                return Ok(mu);
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITER_MAX,
        residual: stationarity_residual(p, &mu),
    })
}

fn stationarity_residual(p: &TabularMrp, mu: &[f64]) -> f64 {
    let n = p.n_states();
    let mut res: f64 = 0.0;
    for t in 0..n {
        let mut acc = 0.0;
        for s in 0..n {
            acc += mu[s] * p.transition(s, t);
        }
        res = res.max((acc - mu[t]).abs());
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_chain_is_periodic() {
        let p = TabularMrp::new(
            vec![0.0, 0.0],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            0.9,
            1.0,
        )
        .unwrap();
        let report = check_ergodic(&p);
        assert!(report.strongly_connected);
        assert_eq!(report.period, 2);
        assert!(!report.is_ergodic());
    }

    #[test]
    fn positive_chain_is_ergodic() {
        let p = TabularMrp::new(
            vec![0.0, 0.0],
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            0.9,
            1.0,
        )
        .unwrap();
        assert!(check_ergodic(&p).is_ergodic());
    }

    #[test]
    fn ring_with_self_loop_is_ergodic() {
        // 3-state ring plus one self-loop: cycle lengths 3 and 1, gcd 1.
        let p = TabularMrp::new(
            vec![0.0, 0.0, 0.0],
            vec![
                vec![0.5, 0.5, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0],
            ],
            0.9,
            1.0,
        )
        .unwrap();
        let report = check_ergodic(&p);
        assert!(report.is_ergodic(), "{}", report.detail);
    }

    #[test]
    fn symmetric_two_state_distribution() {
        let p = TabularMrp::new(
            vec![0.0, 0.0],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            0.9,
            1.0,
        )
        .unwrap();
        let mu = stationary_distribution(&p).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-11);
        assert!((mu[1] - 0.5).abs() < 1e-11);
    }

    #[test]
    fn balance_equation_distribution() {
        // 0.1 mu0 = 0.5 mu1 -> mu = (5/6, 1/6).
        let p = TabularMrp::new(
            vec![0.0, 0.0],
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            0.9,
            1.0,
        )
        .unwrap();
        let mu = stationary_distribution(&p).unwrap();
        assert!((mu[0] - 5.0 / 6.0).abs() < 1e-10);
        assert!((mu[1] - 1.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn periodic_chain_rejected() {
        let p = TabularMrp::new(
            vec![0.0, 0.0],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            0.9,
            1.0,
        )
        .unwrap();
        assert!(matches!(
            stationary_distribution(&p),
            Err(Error::Structure(_))
        ));
    }
}
