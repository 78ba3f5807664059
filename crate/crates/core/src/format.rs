//! Line-oriented model files.
//!
//! ```text
//! # comment
//! #! init: q_init
//! #! target: q2
//! states: q_init q1 q2
//! actions: a
//! trans: q_init a q_init 1/2
//! ```
//!
//! `#!` lines carry an optional default query; other `#` text is ignored.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::{format_rational, parse_rational, Dist};
use crate::error::{Error, Result};
use crate::mdp::Mdp;

/// A parsed model with its optional default query.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub mdp: Mdp,
    pub init: Option<String>,
    pub target: Option<Vec<String>>,
}

struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str, offset: usize) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Tok {
                    text: &line[s..i],
                    column: offset + line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    let mut states: Option<(usize, Vec<String>)> = None;
    let mut actions: Option<(usize, Vec<String>)> = None;
    let mut state_ix: HashMap<String, usize> = HashMap::new();
    let mut action_ix: HashMap<String, usize> = HashMap::new();
    // (state, action) -> (first line, successor -> probability)
    let mut rows: BTreeMap<(usize, usize), (usize, BTreeMap<usize, BigRational>)> = BTreeMap::new();
    let mut init = None;
    let mut target = None;
    let mut last_line = 0;

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        last_line = ln;
        if let Some(rest) = raw.trim_start().strip_prefix("#!") {
            let (key, value) = rest
                .split_once(':')
                .ok_or_else(|| err(ln, 1, "directive needs `key: value`"))?;
            let value = value.trim();
            match key.trim() {
                "init" => init = Some(value.to_string()),
                "target" => {
                    target = Some(
                        value
                            .split(|c: char| c == ',' || c.is_whitespace())
                            .filter(|s| !s.is_empty())
                            .map(str::to_string)
                            .collect(),
                    )
                }
                other => return Err(err(ln, 1, format!("unknown directive `{other}`"))),
            }
            continue;
        }
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            return Err(err(ln, 1, "expected `states:`, `actions:` or `trans:`"));
        };
        let offset = key.chars().count() + 1;
        let toks = tokens(rest, offset);
        match key.trim() {
            "states" | "actions" => {
                let is_states = key.trim() == "states";
                let slot = if is_states { &mut states } else { &mut actions };
                if slot.is_some() {
                    return Err(err(ln, 1, format!("`{}` declared twice", key.trim())));
                }
                if toks.is_empty() {
                    return Err(err(ln, offset + 1, format!("empty `{}` section", key.trim())));
                }
                let ix = if is_states { &mut state_ix } else { &mut action_ix };
                for t in &toks {
                    if ix.insert(t.text.to_string(), ix.len()).is_some() {
                        return Err(err(ln, t.column, format!("duplicate name `{}`", t.text)));
                    }
                }
                *slot = Some((ln, toks.iter().map(|t| t.text.to_string()).collect()));
            }
            "trans" => {
                if states.is_none() || actions.is_none() {
                    return Err(err(ln, 1, "`trans` before `states` and `actions`"));
                }
                if toks.len() != 4 {
                    return Err(err(
                        ln,
                        offset + 1,
                        "expected `trans: <state> <action> <state> <probability>`",
                    ));
                }
                let look = |ix: &HashMap<String, usize>, t: &Tok, what: &str| {
                    ix.get(t.text)
                        .copied()
                        .ok_or_else(|| err(ln, t.column, format!("unknown {what} `{}`", t.text)))
                };
                let q = look(&state_ix, &toks[0], "state")?;
                let a = look(&action_ix, &toks[1], "action")?;
                let q2 = look(&state_ix, &toks[2], "state")?;
                let p = parse_rational(toks[3].text)
                    .ok_or_else(|| err(ln, toks[3].column, format!("bad probability `{}`", toks[3].text)))?;
                if p <= BigRational::zero() || p > BigRational::one() {
                    return Err(err(ln, toks[3].column, "probability must lie in (0, 1]"));
                }
                let row = &mut rows.entry((q, a)).or_insert_with(|| (ln, BTreeMap::new())).1;
                if row.insert(q2, p).is_some() {
                    return Err(err(
                        ln,
                        toks[0].column,
                        format!(
                            "duplicate transition `{} {} {}`",
                            toks[0].text, toks[1].text, toks[2].text
                        ),
                    ));
                }
            }
            other => return Err(err(ln, 1, format!("unknown section `{other}`"))),
        }
    }

    let (_, state_names) = states.ok_or_else(|| err(last_line + 1, 1, "missing `states` section"))?;
    let (_, action_names) = actions.ok_or_else(|| err(last_line + 1, 1, "missing `actions` section"))?;
    let (ns, na) = (state_names.len(), action_names.len());
    let mut delta = Vec::with_capacity(ns * na);
    for q in 0..ns {
        for a in 0..na {
            let Some((ln, row)) = rows.remove(&(q, a)) else {
                return Err(err(
                    last_line + 1,
                    1,
                    format!(
                        "no transitions for state `{}` action `{}`",
                        state_names[q], action_names[a]
                    ),
                ));
            };
            let sum: BigRational = row.values().sum();
            if !sum.is_one() {
                return Err(err(
                    ln,
                    1,
                    format!(
                        "row of state `{}` action `{}` sums to {}",
                        state_names[q],
                        action_names[a],
                        format_rational(&sum)
                    ),
                ));
            }
            delta.push(Dist::new(row)?);
        }
    }
    Ok(ModelFile {
        mdp: Mdp::new(state_names, action_names, delta)?,
        init,
        target,
    })
}

/// Canonical text: names in index order, exact `p/q` probabilities.
pub fn write_model(m: &Mdp) -> String {
    write_model_with(m, None, None)
}

pub fn write_model_with(m: &Mdp, init: Option<&str>, target: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(i) = init {
        let _ = writeln!(out, "#! init: {i}");
    }
    if let Some(t) = target {
        let _ = writeln!(out, "#! target: {}", t.join(","));
    }
    let _ = writeln!(out, "states: {}", m.state_names().join(" "));
    let _ = writeln!(out, "actions: {}", m.action_names().join(" "));
    for q in 0..m.num_states() {
        for a in 0..m.num_actions() {
            for (q2, p) in m.delta(q, a).iter() {
                let _ = writeln!(
                    out,
                    "trans: {} {} {} {}",
                    m.state_name(q),
                    m.action_name(a),
                    m.state_name(q2),
                    format_rational(p)
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_model(text) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn differ_in_three_lines() {
        let text = "states: q_init q\nactions: a\n\
                    trans: q_init a q_init 1/2\ntrans: q_init a q 0.5\ntrans: q a q 1\n";
        let f = parse_model(text).unwrap();
        let want = fixtures::example("almost-limit-strongly-differ").unwrap().mdp;
        assert_eq!(write_model(&f.mdp), write_model(&want));
    }

    #[test]
    fn fixtures_round_trip() {
        for f in fixtures::all() {
            let text = write_model(&f.mdp);
            let back = parse_model(&text).unwrap();
            assert_eq!(write_model(&back.mdp), text);
        }
    }

    #[test]
    fn directives_survive() {
        let f = fixtures::example("coBuchi").unwrap();
        let t = vec!["q_init".to_string(), "q2".to_string()];
        let text = write_model_with(&f.mdp, Some("q_init"), Some(&t));
        let back = parse_model(&text).unwrap();
        assert_eq!(back.init.as_deref(), Some("q_init"));
        assert_eq!(back.target, Some(t));
    }

    #[test]
    fn row_sum_error_points_at_row() {
        let text = "states: x y\nactions: a\ntrans: x a y 0.9\ntrans: y a y 1\n";
        let (line, _, msg) = parse_err(text);
        assert_eq!(line, 3);
        assert!(msg.contains("`x`") && msg.contains("9/10"), "{msg}");
    }

    #[test]
    fn unknown_name_has_column() {
        let (line, column, msg) = parse_err("states: x\nactions: a\ntrans: x b x 1\n");
        assert_eq!((line, column), (3, 10));
        assert!(msg.contains("unknown action"));
    }

    #[test]
    fn duplicate_and_empty() {
        let (line, _, msg) = parse_err("states: x\nactions: a\ntrans: x a x 1/2\ntrans: x a x 1/2\n");
        assert_eq!(line, 4);
        assert!(msg.contains("duplicate"));
        let (line, _, msg) = parse_err("states:\nactions: a\n");
        assert_eq!(line, 1);
        assert!(msg.contains("empty"));
        let (_, _, msg) = parse_err("states: x y\nactions: a\ntrans: x a x 1\n");
        assert!(msg.contains("no transitions for state `y`"));
    }

    #[test]
    fn comments_ignored() {
        let f = parse_model("# hi\nstates: x # one state\nactions: a\ntrans: x a x 1 # loop\n").unwrap();
        assert_eq!(f.mdp.num_states(), 1);
    }
}
