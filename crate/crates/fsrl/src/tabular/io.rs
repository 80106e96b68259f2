//! Plain-text serialization of tabular models.
//!
//! The format is line oriented. A header names the model kind:
//!
//! ```text
//! mdp <n_states> <n_actions> <gamma> <r_max>
//! ```
//!
//! followed by one line per (state, action) pair in state-major order,
//! each holding the reward and then `n_states` transition probabilities.
//! An MRP uses the header `mrp <n_states> <gamma> <r_max>` and one line
//! per state. Blank lines are skipped and `#` starts a comment.
//!
//! Terminal states are not stored explicitly; on read, any state that
//! self-loops with zero reward under every action is marked terminal.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::mdp::TabularMdp;
use super::mrp::TabularMrp;

/// A parsed tabular model.
#[derive(Debug, Clone)]
pub enum Model {
    Mdp(TabularMdp),
    Mrp(TabularMrp),
}

/// Serializes an MDP in the plain-text matrix format.
pub fn write_mdp(m: &TabularMdp) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "mdp {} {} {} {}\n",
        m.n_states(),
        m.n_actions(),
        m.gamma(),
        m.r_max()
    ));
    for s in 0..m.n_states() {
        for a in 0..m.n_actions() {
            out.push_str(&format!("{}", m.reward(s, a)));
            for next in 0..m.n_states() {
                out.push_str(&format!(" {}", m.transition(s, a, next)));
            }
            out.push('\n');
        }
    }
    out
}

/// Serializes an MRP in the plain-text matrix format.
pub fn write_mrp(p: &TabularMrp) -> String {
    let mut out = String::new();
    out.push_str(&format!("mrp {} {} {}\n", p.n_states(), p.gamma(), p.r_max()));
    for s in 0..p.n_states() {
        out.push_str(&format!("{}", p.reward(s)));
        for next in 0..p.n_states() {
            out.push_str(&format!(" {}", p.transition(s, next)));
        }
        out.push('\n');
    }
    out
}

/// Parses a tabular model from its plain-text form.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: "empty model file".into(),
        })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    match fields.first().copied() {
        Some("mdp") => {
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: header_line,
                    msg: "expected: mdp <n_states> <n_actions> <gamma> <r_max>".into(),
                });
            }
            let n: usize = parse_field(fields[1], header_line, "n_states")?;
            let na: usize = parse_field(fields[2], header_line, "n_actions")?;
            let gamma: f64 = parse_field(fields[3], header_line, "gamma")?;
            let r_max: f64 = parse_field(fields[4], header_line, "r_max")?;
            let mut rewards = vec![0.0; n * na];
            let mut transitions = vec![0.0; na * n * n];
            for s in 0..n {
                for a in 0..na {
                    let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
                        line: header_line,
                        msg: format!("missing row for state {s}, action {a}"),
                    })?;
                    let row = parse_row(&line, line_no, n)?;
                    rewards[s * na + a] = row.0;
                    transitions[a * n * n + s * n..a * n * n + (s + 1) * n]
                        .copy_from_slice(&row.1);
                }
            }
            if let Some((line_no, _)) = lines.next() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "trailing content after model rows".into(),
                });
            }
            let mut terminal = BTreeSet::new();
            'state: for s in 0..n {
                for a in 0..na {
                    let self_loop = transitions[a * n * n + s * n + s];
                    if self_loop != 1.0 || rewards[s * na + a] != 0.0 {
                        continue 'state;
                    }
                }
                terminal.insert(s);
            }
            Ok(Model::Mdp(TabularMdp::from_flat(
                n, na, rewards, transitions, gamma, r_max, terminal,
            )?))
        }
        Some("mrp") => {
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: header_line,
                    msg: "expected: mrp <n_states> <gamma> <r_max>".into(),
                });
            }
            let n: usize = parse_field(fields[1], header_line, "n_states")?;
            let gamma: f64 = parse_field(fields[2], header_line, "gamma")?;
            let r_max: f64 = parse_field(fields[3], header_line, "r_max")?;
            let mut rewards = vec![0.0; n];
            let mut transitions = vec![0.0; n * n];
            for s in 0..n {
                let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
                    line: header_line,
                    msg: format!("missing row for state {s}"),
                })?;
                let row = parse_row(&line, line_no, n)?;
                rewards[s] = row.0;
                transitions[s * n..(s + 1) * n].copy_from_slice(&row.1);
            }
            if let Some((line_no, _)) = lines.next() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "trailing content after model rows".into(),
                });
            }
            Ok(Model::Mrp(TabularMrp::from_flat(
                rewards,
                transitions,
                gamma,
                r_max,
            )?))
        }
        _ => Err(Error::Parse {
            line: header_line,
            msg: "model header must start with 'mdp' or 'mrp'".into(),
        }),
    }
}

fn strip_comment(line: &str) -> String {
    match line.find('#') {
        Some(i) => line[..i].to_string(),
        None => line.to_string(),
    }
}

fn parse_field<T: std::str::FromStr>(text: &str, line: usize, what: &str) -> Result<T> {
    text.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("could not parse {what} from {text:?}"),
    })
}

fn parse_row(line: &str, line_no: usize, n: usize) -> Result<(f64, Vec<f64>)> {
    let mut fields = line.split_whitespace();
    let reward: f64 = parse_field(
        fields.next().ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "empty row".into(),
        })?,
        line_no,
        "reward",
    )?;
    let probs: Vec<f64> = fields
        .map(|f| parse_field(f, line_no, "transition probability"))
        .collect::<Result<_>>()?;
    if probs.len() != n {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("expected {n} probabilities, found {}", probs.len()),
        });
    }
    Ok((reward, probs))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use super::super::generate::{random_mdp, random_mrp, RandomMdpConfig};
    use super::*;

    #[test]
    fn mdp_round_trip_is_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let m = random_mdp(
            &mut rng,
            RandomMdpConfig {
                n_states: 4,
                n_actions: 3,
                gamma: 0.9,
            },
        )
        .unwrap();
        let text = write_mdp(&m);
        match parse_model(&text).unwrap() {
            Model::Mdp(parsed) => assert_eq!(parsed, m),
            Model::Mrp(_) => panic!("parsed wrong kind"),
        }
    }

    #[test]
    fn mrp_round_trip_is_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let p = random_mrp(&mut rng, 5, 0.95).unwrap();
        let text = write_mrp(&p);
        match parse_model(&text).unwrap() {
            Model::Mrp(parsed) => assert_eq!(parsed, p),
            Model::Mdp(_) => panic!("parsed wrong kind"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a model\n\nmrp 1 0.5 1\n1 1  # self loop\n";
        assert!(matches!(parse_model(text), Ok(Model::Mrp(_))));
    }

    #[test]
    fn terminal_states_are_inferred() {
        let text = "mdp 2 1 1 1\n-1 0 1\n0 0 1\n";
        match parse_model(text).unwrap() {
            Model::Mdp(m) => assert!(m.is_terminal(1) && !m.is_terminal(0)),
            _ => panic!(),
        }
    }

    #[test]
    fn bad_header_is_a_parse_error() {
        assert!(matches!(
            parse_model("markov 2 0.5 1\n"),
            Err(Error::Parse { .. })
        ));
    }
}
