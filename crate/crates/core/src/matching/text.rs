//! Plain-text instance format:
//!
//! ```text
//! M N
//! q_min[0] .. q_min[N-1]
//! q_max[0] .. q_max[N-1]
//! prefs of agent 0 (host indices, most preferred first)
//! ...
//! prefs of agent M-1
//! master list (agent indices, highest priority first)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Matching, MatchingInstance, VerifierReport};
use crate::error::{Error, Result};

fn parse_row(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("`{tok}`: {e}"),
            })
        })
        .collect()
}

struct Rows<'a, I: Iterator<Item = (usize, &'a str)>> {
    lines: I,
    total: usize,
}

impl<'a, I: Iterator<Item = (usize, &'a str)>> Rows<'a, I> {
    fn next(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        let (no, line) = self.lines.next().ok_or_else(|| Error::Parse {
            line: self.total,
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        Ok((no, parse_row(no, line)?))
    }

    fn next_of_len(&mut self, what: &str, len: usize) -> Result<Vec<usize>> {
        let (no, row) = self.next(what)?;
        if row.len() != len {
            return Err(Error::Parse {
                line: no,
                msg: format!("expected {len} values for {what}, got {}", row.len()),
            });
        }
        Ok(row)
    }
}

impl FromStr for MatchingInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut rows = Rows {
            lines,
            total: s.lines().count(),
        };

        let (no, header) = rows.next("header `M N`")?;
        let [m, n] = header[..] else {
            return Err(Error::Parse {
                line: no,
                msg: "header must be `M N`".into(),
            });
        };
        let q_min = rows.next_of_len("q_min", n)?;
        let q_max = rows.next_of_len("q_max", n)?;
        let mut prefs = Vec::with_capacity(m);
        for a in 0..m {
            prefs.push(rows.next(&format!("preferences of agent {a}"))?.1);
        }
        let master_list = if m == 0 {
            Vec::new()
        } else {
            rows.next_of_len("master list", m)?
        };
        MatchingInstance::new(n, prefs, master_list, q_min, q_max)
    }
}

fn join(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

impl MatchingInstance {
    /// Serializes with each agent's explicitly listed preferences.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_agents(), self.n_hosts());
        out.push_str(&join(self.q_min()));
        out.push('\n');
        out.push_str(&join(self.q_max()));
        out.push('\n');
        for a in 0..self.n_agents() {
            out.push_str(&join(self.listed_prefs(a)));
            out.push('\n');
        }
        out.push_str(&join(self.master_list()));
        out.push('\n');
        out
    }
}

/// Human-readable dump of a matching and its verification.
pub fn describe(matching: &Matching, report: &VerifierReport) -> String {
    let mut out = String::new();
    for (h, members) in matching.host_to_agents.iter().enumerate() {
        let _ = writeln!(out, "host {h}: [{}]", join(members));
    }
    let _ = writeln!(out, "loads: {}", join(&matching.loads));
    let _ = writeln!(out, "feasible: {}", report.feasible);
    if !report.unmatched.is_empty() {
        let _ = writeln!(out, "unmatched agents: {}", join(&report.unmatched));
    }
    if !report.quota_violations.is_empty() {
        let _ = writeln!(out, "quota violations at hosts: {}", join(&report.quota_violations));
    }
    let _ = writeln!(out, "blocking pairs: {}", report.blocking_pairs.len());
    let _ = writeln!(out, "literal blocking pairs: {}", report.literal_blocking_pairs.len());
    let pareto = report.pareto_optimal.map_or("not checked".to_string(), |p| p.to_string());
    let _ = writeln!(out, "pareto optimal: {pareto}");
    out
}
