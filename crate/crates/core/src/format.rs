//! The line-oriented instance format.
//!
//! ```text
//! # comment
//! vass 2
//! state p
//! state q
//! trans p q 1 -1
//! init p 0 0
//! target q 1 0
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{IntVec, StateId, Vass};

/// A VASS with a reachability query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub vass: Vass,
    pub init: (StateId, IntVec),
    pub target: (StateId, IntVec),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive {0}")]
    UnknownDirective(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("state {0} declared twice")]
    DuplicateState(String),
    #[error("{directive} expects {expected} arguments, found {found}")]
    Arity {
        directive: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("not an integer: {0}")]
    NotAnInteger(String),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("negative boundary entry {0}")]
    NegativeEntry(i64),
    #[error("duplicate {0} line")]
    Duplicate(&'static str),
    #[error("{0} must come first")]
    VassFirst(&'static str),
    #[error("missing {0} line")]
    Missing(&'static str),
}

/// 1-based line and column of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut vass: Option<Vass> = None;
    let mut init = None;
    let mut target = None;
    let mut last_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        last_line = line;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        let err = |column: usize, kind| ParseError { line, column, kind };
        let int = |t: &Token| -> Result<i64, ParseError> {
            t.text
                .parse::<i64>()
                .map_err(|_| err(t.column, ParseErrorKind::NotAnInteger(t.text.to_string())))
        };
        let arity = |directive: &'static str, expected: usize| -> Result<(), ParseError> {
            let found = toks.len() - 1;
            if found == expected {
                Ok(())
            } else {
                let col = toks.get(expected + 1).map_or(head.column, |t| t.column);
                Err(err(
                    col,
                    ParseErrorKind::Arity {
                        directive,
                        expected,
                        found,
                    },
                ))
            }
        };
        if head.text == "vass" {
            if vass.is_some() {
                return Err(err(head.column, ParseErrorKind::Duplicate("vass")));
            }
            arity("vass", 1)?;
            let d = int(&toks[1])?;
            if d < 1 {
                return Err(err(toks[1].column, ParseErrorKind::ZeroDimension));
            }
            vass = Some(Vass::new(d as usize).expect("positive dimension"));
            continue;
        }
        let Some(v) = vass.as_mut() else {
            return Err(err(head.column, ParseErrorKind::VassFirst("vass")));
        };
        let dim = v.dim();
        let state = |v: &Vass, t: &Token| -> Result<StateId, ParseError> {
            v.state_by_name(t.text)
                .ok_or_else(|| err(t.column, ParseErrorKind::UnknownState(t.text.to_string())))
        };
        let vector = |ts: &[Token]| -> Result<Vec<i64>, ParseError> { ts.iter().map(int).collect() };
        match head.text {
            "state" => {
                arity("state", 1)?;
                if v.state_by_name(toks[1].text).is_some() {
                    return Err(err(
                        toks[1].column,
                        ParseErrorKind::DuplicateState(toks[1].text.to_string()),
                    ));
                }
                v.add_state(toks[1].text);
            }
            "trans" => {
                arity("trans", 2 + dim)?;
                let src = state(v, &toks[1])?;
                let dst = state(v, &toks[2])?;
                let delta = vector(&toks[3..])?;
                v.add_transition(src, dst, IntVec::from(delta))
                    .expect("checked states and arity");
            }
            d @ ("init" | "target") => {
                let name: &'static str = if d == "init" { "init" } else { "target" };
                let slot = if d == "init" { &mut init } else { &mut target };
                if slot.is_some() {
                    return Err(err(head.column, ParseErrorKind::Duplicate(name)));
                }
                arity(name, 1 + dim)?;
                let s = state(v, &toks[1])?;
                let vals = vector(&toks[2..])?;
                if let Some((k, &x)) = vals.iter().enumerate().find(|(_, &x)| x < 0) {
                    return Err(err(toks[2 + k].column, ParseErrorKind::NegativeEntry(x)));
                }
                *slot = Some((s, IntVec::from(vals)));
            }
            other => {
                return Err(err(
                    head.column,
                    ParseErrorKind::UnknownDirective(other.to_string()),
                ))
            }
        }
    }
    let missing = |what| ParseError {
        line: last_line + 1,
        column: 1,
        kind: ParseErrorKind::Missing(what),
    };
    let vass = vass.ok_or_else(|| missing("vass"))?;
    let init = init.ok_or_else(|| missing("init"))?;
    let target = target.ok_or_else(|| missing("target"))?;
    Ok(Instance { vass, init, target })
}

fn push_vec(out: &mut String, v: &IntVec) {
    for x in v.iter() {
        write!(out, " {x}").unwrap();
    }
}

/// Renders an instance so that [`parse_instance`] gives it back.
pub fn print_instance(inst: &Instance) -> String {
    let v = &inst.vass;
    let mut out = format!("vass {}\n", v.dim());
    for s in v.states() {
        writeln!(out, "state {}", s.name).unwrap();
    }
    for t in v.transitions() {
        write!(out, "trans {} {}", v.state(t.src).name, v.state(t.dst).name).unwrap();
        push_vec(&mut out, &t.delta);
        out.push('\n');
    }
    for (word, (s, x)) in [("init", &inst.init), ("target", &inst.target)] {
        write!(out, "{word} {}", v.state(*s).name).unwrap();
        push_vec(&mut out, x);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let inst = parse_instance("vass 1\nstate p\ntrans p p 1\ninit p 0\ntarget p 5\n").unwrap();
        assert_eq!(inst.vass.num_states(), 1);
        assert_eq!(inst.vass.num_transitions(), 1);
        assert_eq!(inst.init, (0, IntVec::from([0])));
        assert_eq!(inst.target, (0, IntVec::from([5])));
    }

    #[test]
    fn missing_target() {
        let e = parse_instance("vass 1\nstate p\ninit p 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Missing("target"));
        assert!(e.to_string().contains("target"));
    }

    #[test]
    fn unknown_state_is_positioned() {
        let e = parse_instance("vass 1\nstate p\ntrans p q 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 9));
        assert_eq!(e.kind, ParseErrorKind::UnknownState("q".into()));
        assert_eq!(e.to_string(), "3:9: unknown state q");
    }

    #[test]
    fn arity_integers_and_duplicates() {
        let e = parse_instance("vass 2\nstate p\ntrans p p 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { expected: 4, found: 3, .. }));
        let e = parse_instance("vass 1\nstate p\ntrans p p x1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 11));
        assert_eq!(e.kind, ParseErrorKind::NotAnInteger("x1".into()));
        let e = parse_instance("vass 1\nstate p\ninit p 0\ninit p 1\n").unwrap_err();
        assert_eq!((e.line, e.kind), (4, ParseErrorKind::Duplicate("init")));
        let e = parse_instance("state p\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::VassFirst("vass"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\nvass 1   # one counter\nstate p\n  trans p p -1\ninit p 3\ntarget p 0\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.vass.transition(0).delta, IntVec::from([-1]));
    }

    #[test]
    fn round_trip() {
        let text = "vass 2\nstate a\nstate b\ntrans a b 1 -2\ntrans b a 0 0\ninit a 1 2\ntarget b 0 3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(print_instance(&inst), text);
        assert_eq!(parse_instance(&print_instance(&inst)).unwrap(), inst);
    }
}
