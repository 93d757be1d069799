//! The `.lops` system description format.
//!
//! One declaration per line; `#` starts a comment and a trailing `\` joins
//! the next line. Component indices are 0-based.
//!
//! ```text
//! system   <name>
//! param    <name>... [positive | nonzero | constraint: positive | constraint: nonzero]
//! let      <name> := <poly>
//! unknown  <name> multiplicity <k> index <m>
//! equation <name> multiplicity <k> index <n>
//! entry    <eq>[<i>] <unk>[<j>] := <poly>
//! depends  <eq> on <unk> order <d>
//! bind     <param> := <poly in parameters>
//! state    <param> := <rational>
//! factors:
//!   prefactor := <poly>
//!   factor <name> multiplicity <k> := <poly>
//! end
//! ```
//!
//! Polynomials use `+ - * ^`, parentheses, integer literals and division
//! by nonzero constants. Atoms are `xi0..xi3`, declared parameters (plain
//! or indexed as `name[k]`) and previously defined `let` names. Omitted
//! entries are zero.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::*;
use crate::poly::{parse_expr, Atom};
use crate::rational::{fmt_q, parse_q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: duplicate entry {eq}[{eq_index}] {unk}[{unk_index}]")]
    DuplicateEntry {
        line: usize,
        eq: String,
        eq_index: usize,
        unk: String,
        unk_index: usize,
    },
    #[error("line {line}, column {col}: unknown atom `{name}`")]
    UnknownAtom { line: usize, col: usize, name: String },
    #[error("line {line}: no block named `{name}`")]
    UnknownBlock { line: usize, name: String },
    #[error("line {line}: component {index} out of range for `{block}` (multiplicity {multiplicity})")]
    IndexOutOfRange {
        line: usize,
        block: String,
        index: usize,
        multiplicity: usize,
    },
    #[error("line {line}: `{name}` is already defined")]
    Redefined { line: usize, name: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::DuplicateEntry { line, .. }
            | ParseError::UnknownAtom { line, .. }
            | ParseError::UnknownBlock { line, .. }
            | ParseError::IndexOutOfRange { line, .. }
            | ParseError::Redefined { line, .. } => *line,
        }
    }
}

/// A logical line: text after comment stripping and continuation joining.
struct Line {
    no: usize,
    text: String,
}

fn logical_lines(src: &str) -> Vec<Line> {
    let mut out = Vec::new();
    let mut pending: Option<Line> = None;
    for (i, raw) in src.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let (body, cont) = match body.trim_end().strip_suffix('\\') {
            Some(b) => (b, true),
            None => (body, false),
        };
        let line = match pending.take() {
            Some(mut l) => {
                l.text.push(' ');
                l.text.push_str(body);
                l
            }
            None => Line {
                no: i + 1,
                text: body.to_string(),
            },
        };
        if cont {
            pending = Some(line);
        } else if !line.text.trim().is_empty() {
            out.push(line);
        }
    }
    if let Some(l) = pending {
        if !l.text.trim().is_empty() {
            out.push(l);
        }
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_covector_name(s: &str) -> bool {
    matches!(s, "xi0" | "xi1" | "xi2" | "xi3" | "xi")
}

struct Parser {
    sys: LeraySystem,
    params: HashSet<String>,
    lets: HashMap<String, Poly>,
    entry_keys: HashSet<(String, usize, String, usize)>,
    in_factors: bool,
}

impl Parser {
    fn syntax<T>(line: &Line, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: line.no,
            col,
            msg: msg.into(),
        })
    }

    /// Column (1-based) of `needle` inside the line, for diagnostics.
    fn col_of(line: &Line, needle: &str) -> usize {
        line.text.find(needle).map(|i| i + 1).unwrap_or(1)
    }

    fn expr(&self, line: &Line, rhs_start: usize) -> Result<Poly, ParseError> {
        let text = &line.text[rhs_start..];
        let unknown: RefCell<Option<String>> = RefCell::new(None);
        let resolve = |name: &str, index: Option<u32>| -> Result<Poly, String> {
            let atom = match index {
                None if is_covector_name(name) && name != "xi" => Some(Atom::from_text(name)),
                None => {
                    if let Some(p) = self.lets.get(name) {
                        return Ok(p.clone());
                    }
                    self.params.contains(name).then(|| Atom::param(name))
                }
                Some(k) if name == "xi" && k < 4 => Some(Atom::xi(k as usize)),
                Some(k) => self.params.contains(name).then(|| Atom::param_indexed(name, k)),
            };
            atom.map(Poly::var).ok_or_else(|| {
                let shown = match index {
                    Some(k) => format!("{name}[{k}]"),
                    None => name.to_string(),
                };
                *unknown.borrow_mut() = Some(shown.clone());
                format!("unknown atom `{shown}`")
            })
        };
        parse_expr(text, &resolve).map_err(|e| {
            let col = rhs_start + e.col;
            match unknown.borrow_mut().take() {
                Some(name) => ParseError::UnknownAtom {
                    line: line.no,
                    col,
                    name,
                },
                None => ParseError::Syntax {
                    line: line.no,
                    col,
                    msg: e.msg,
                },
            }
        })
    }

    /// Splits `head := rhs`, returning the head words and the rhs offset.
    fn split_def<'a>(line: &'a Line) -> Result<(Vec<&'a str>, usize), ParseError> {
        match line.text.find(":=") {
            Some(i) => Ok((line.text[..i].split_whitespace().collect(), i + 2)),
            None => Parser::syntax(line, line.text.len() + 1, "expected `:=`"),
        }
    }

    fn int(line: &Line, word: &str) -> Result<i64, ParseError> {
        word.parse()
            .or_else(|_| Parser::syntax(line, Parser::col_of(line, word), format!("expected an integer, found `{word}`")))
    }

    fn fresh_name(&self, line: &Line, name: &str) -> Result<(), ParseError> {
        if !is_ident(name) || is_covector_name(name) {
            return Parser::syntax(line, Parser::col_of(line, name), format!("invalid name `{name}`"));
        }
        if self.params.contains(name) || self.lets.contains_key(name) {
            return Err(ParseError::Redefined {
                line: line.no,
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn component(&self, line: &Line, word: &str, unknown_side: bool) -> Result<(String, usize), ParseError> {
        let bad = || Parser::syntax(line, Parser::col_of(line, word), format!("expected `block[index]`, found `{word}`"));
        let Some((name, rest)) = word.split_once('[') else {
            return bad();
        };
        let Some(idx) = rest.strip_suffix(']').and_then(|i| i.parse::<usize>().ok()) else {
            return bad();
        };
        let mult = if unknown_side {
            self.sys.unknown(name).map(|b| b.multiplicity)
        } else {
            self.sys.equation(name).map(|b| b.multiplicity)
        };
        let Some(mult) = mult else {
            return Err(ParseError::UnknownBlock {
                line: line.no,
                name: name.to_string(),
            });
        };
        if idx >= mult {
            return Err(ParseError::IndexOutOfRange {
                line: line.no,
                block: name.to_string(),
                index: idx,
                multiplicity: mult,
            });
        }
        Ok((name.to_string(), idx))
    }

    fn statement(&mut self, line: &Line) -> Result<(), ParseError> {
        let words: Vec<&str> = line.text.split_whitespace().collect();
        let kw = words[0];
        if self.in_factors {
            return self.factor_statement(line, &words);
        }
        match kw {
            "system" => {
                if words.len() != 2 {
                    return Parser::syntax(line, 1, "expected `system <name>`");
                }
                self.sys.name = words[1].to_string();
            }
            "param" => {
                let mut names = &words[1..];
                let mut constraint = ParamConstraint::Free;
                let tail = match names {
                    [rest @ .., "constraint:", c] => Some((rest, *c)),
                    [rest @ .., c] if matches!(*c, "positive" | "nonzero") => Some((rest, *c)),
                    _ => None,
                };
                if let Some((rest, c)) = tail {
                    constraint = match c {
                        "positive" => ParamConstraint::Positive,
                        "nonzero" => ParamConstraint::Nonzero,
                        other => {
                            return Parser::syntax(line, Parser::col_of(line, other), format!("unknown constraint `{other}`"))
                        }
                    };
                    names = rest;
                }
                if names.is_empty() {
                    return Parser::syntax(line, 1, "expected at least one parameter name");
                }
                for name in names {
                    self.fresh_name(line, name)?;
                    self.params.insert(name.to_string());
                    self.sys.params.push(ParamDecl {
                        name: name.to_string(),
                        constraint,
                    });
                }
            }
            "let" => {
                let (head, at) = Parser::split_def(line)?;
                if head.len() != 2 {
                    return Parser::syntax(line, 1, "expected `let <name> := <poly>`");
                }
                self.fresh_name(line, head[1])?;
                let value = self.expr(line, at)?;
                self.lets.insert(head[1].to_string(), value);
            }
            "unknown" | "equation" => {
                if words.len() != 6 || words[2] != "multiplicity" || words[4] != "index" {
                    return Parser::syntax(line, 1, format!("expected `{kw} <name> multiplicity <k> index <i>`"));
                }
                let name = words[1];
                if !is_ident(name) {
                    return Parser::syntax(line, Parser::col_of(line, name), format!("invalid name `{name}`"));
                }
                let mult = Parser::int(line, words[3])?;
                if mult < 1 {
                    return Parser::syntax(line, Parser::col_of(line, words[3]), "multiplicity must be at least 1");
                }
                let index = Parser::int(line, words[5])?;
                if index < 0 {
                    return Parser::syntax(line, Parser::col_of(line, words[5]), "index must be non-negative");
                }
                let taken = if kw == "unknown" {
                    self.sys.unknown(name).is_some()
                } else {
                    self.sys.equation(name).is_some()
                };
                if taken {
                    return Err(ParseError::Redefined {
                        line: line.no,
                        name: name.to_string(),
                    });
                }
                if kw == "unknown" {
                    self.sys.unknowns.push(UnknownBlock {
                        name: name.to_string(),
                        multiplicity: mult as usize,
                        m: index,
                    });
                } else {
                    self.sys.equations.push(EquationBlock {
                        name: name.to_string(),
                        multiplicity: mult as usize,
                        n: index,
                    });
                }
            }
            "entry" => {
                let (head, at) = Parser::split_def(line)?;
                if head.len() != 3 {
                    return Parser::syntax(line, 1, "expected `entry <eq>[i] <unk>[j] := <poly>`");
                }
                let (eq, eq_index) = self.component(line, head[1], false)?;
                let (unk, unk_index) = self.component(line, head[2], true)?;
                let key = (eq.clone(), eq_index, unk.clone(), unk_index);
                if !self.entry_keys.insert(key) {
                    return Err(ParseError::DuplicateEntry {
                        line: line.no,
                        eq,
                        eq_index,
                        unk,
                        unk_index,
                    });
                }
                let symbol = self.expr(line, at)?;
                self.sys.entries.push(SymbolEntry {
                    eq,
                    eq_index,
                    unk,
                    unk_index,
                    symbol,
                });
            }
            "depends" => {
                if words.len() != 6 || words[2] != "on" || words[4] != "order" {
                    return Parser::syntax(line, 1, "expected `depends <eq> on <unk> order <d>`");
                }
                for (name, unknown_side) in [(words[1], false), (words[3], true)] {
                    let found = if unknown_side {
                        self.sys.unknown(name).is_some()
                    } else {
                        self.sys.equation(name).is_some()
                    };
                    if !found {
                        return Err(ParseError::UnknownBlock {
                            line: line.no,
                            name: name.to_string(),
                        });
                    }
                }
                let order = Parser::int(line, words[5])?;
                self.sys.deps.push(DependencyDecl {
                    eq: words[1].to_string(),
                    unk: words[3].to_string(),
                    order,
                });
            }
            "bind" | "state" => {
                let (head, at) = Parser::split_def(line)?;
                if head.len() != 2 {
                    return Parser::syntax(line, 1, format!("expected `{kw} <param> := <value>`"));
                }
                if !self.params.contains(head[1]) {
                    return Err(ParseError::UnknownAtom {
                        line: line.no,
                        col: Parser::col_of(line, head[1]),
                        name: head[1].to_string(),
                    });
                }
                let atom = Atom::param(head[1]);
                if kw == "bind" {
                    let value = self.expr(line, at)?;
                    if !value.is_parameter_only() {
                        return Parser::syntax(line, at + 1, "a binding may not involve the covector");
                    }
                    self.sys.bindings.push((atom, value));
                } else {
                    let Some(value) = parse_q(&line.text[at..]) else {
                        return Parser::syntax(line, at + 1, "expected a rational number `n` or `n/d`");
                    };
                    self.sys.state.push((atom, value));
                }
            }
            "factors:" => {
                if words.len() != 1 || self.sys.factors.is_some() {
                    return Parser::syntax(line, 1, "a single `factors:` block is allowed");
                }
                self.sys.factors = Some(FactorsDecl {
                    prefactor: Poly::one(),
                    factors: Vec::new(),
                });
                self.in_factors = true;
            }
            other => return Parser::syntax(line, Parser::col_of(line, other), format!("unknown declaration `{other}`")),
        }
        Ok(())
    }

    fn factor_statement(&mut self, line: &Line, words: &[&str]) -> Result<(), ParseError> {
        match words[0] {
            "end" if words.len() == 1 => {
                self.in_factors = false;
            }
            "prefactor" => {
                let (head, at) = Parser::split_def(line)?;
                if head.len() != 1 {
                    return Parser::syntax(line, 1, "expected `prefactor := <poly>`");
                }
                let value = self.expr(line, at)?;
                self.sys.factors.as_mut().unwrap().prefactor = value;
            }
            "factor" => {
                let (head, at) = Parser::split_def(line)?;
                if head.len() != 4 || head[2] != "multiplicity" {
                    return Parser::syntax(line, 1, "expected `factor <name> multiplicity <k> := <poly>`");
                }
                let mult = Parser::int(line, head[3])?;
                if mult < 1 {
                    return Parser::syntax(line, Parser::col_of(line, head[3]), "multiplicity must be at least 1");
                }
                let poly = self.expr(line, at)?;
                self.sys.factors.as_mut().unwrap().factors.push(FactorDecl {
                    name: head[1].to_string(),
                    multiplicity: mult as u32,
                    poly,
                });
            }
            other => {
                return Parser::syntax(line, Parser::col_of(line, other), format!("unexpected `{other}` inside `factors:`"))
            }
        }
        Ok(())
    }
}

pub fn parse_system(src: &str) -> Result<LeraySystem, ParseError> {
    let mut parser = Parser {
        sys: LeraySystem::default(),
        params: HashSet::new(),
        lets: HashMap::new(),
        entry_keys: HashSet::new(),
        in_factors: false,
    };
    let lines = logical_lines(src);
    for line in &lines {
        parser.statement(line)?;
    }
    if parser.in_factors {
        let last = lines.last().map(|l| l.no).unwrap_or(0);
        return Err(ParseError::Syntax {
            line: last,
            col: 1,
            msg: "`factors:` block is missing `end`".into(),
        });
    }
    Ok(parser.sys)
}

/// Canonical text form; `parse_system(print_system(s)) == s`.
pub fn print_system(s: &LeraySystem) -> String {
    let mut out = String::new();
    if !s.name.is_empty() {
        writeln!(out, "system {}", s.name).unwrap();
    }
    for p in &s.params {
        match p.constraint {
            ParamConstraint::Free => writeln!(out, "param {}", p.name),
            ParamConstraint::Positive => writeln!(out, "param {} positive", p.name),
            ParamConstraint::Nonzero => writeln!(out, "param {} nonzero", p.name),
        }
        .unwrap();
    }
    for u in &s.unknowns {
        writeln!(out, "unknown {} multiplicity {} index {}", u.name, u.multiplicity, u.m).unwrap();
    }
    for e in &s.equations {
        writeln!(out, "equation {} multiplicity {} index {}", e.name, e.multiplicity, e.n).unwrap();
    }
    for e in &s.entries {
        writeln!(out, "entry {}[{}] {}[{}] := {}", e.eq, e.eq_index, e.unk, e.unk_index, e.symbol).unwrap();
    }
    for d in &s.deps {
        writeln!(out, "depends {} on {} order {}", d.eq, d.unk, d.order).unwrap();
    }
    for (a, v) in &s.bindings {
        writeln!(out, "bind {a} := {v}").unwrap();
    }
    for (a, v) in &s.state {
        writeln!(out, "state {a} := {}", fmt_q(v)).unwrap();
    }
    if let Some(f) = &s.factors {
        writeln!(out, "factors:").unwrap();
        writeln!(out, "  prefactor := {}", f.prefactor).unwrap();
        for d in &f.factors {
            writeln!(out, "  factor {} multiplicity {} := {}", d.name, d.multiplicity, d.poly).unwrap();
        }
        writeln!(out, "end").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;
    use crate::rational::ratio;

    const SMALL: &str = "\
# two coupled blocks
system small
param a positive
param b c constraint: nonzero
let lc := xi0^2 - xi1^2 - xi2^2 - xi3^2
unknown v multiplicity 2 index 2
unknown w multiplicity 1 index 1
equation ev multiplicity 2 index 0
equation ew multiplicity 1 index 0
entry ev[0] v[0] := lc
entry ev[1] v[1] := a*lc \\
    + 0
entry ev[0] w[0] := b*xi1
entry ew[0] w[0] := c*xi0
depends ev on v order 1
bind c := 2*a
state a := 3/2
factors:
  prefactor := c
  factor light multiplicity 2 := lc
end
";

    #[test]
    fn parses_every_declaration() {
        let s = parse_system(SMALL).unwrap();
        assert_eq!(s.name, "small");
        assert_eq!(s.params.len(), 3);
        assert_eq!(s.params[1].constraint, ParamConstraint::Nonzero);
        assert_eq!(s.entries.len(), 4);
        assert_eq!(s.entries[1].symbol, p("a*(xi0^2 - xi1^2 - xi2^2 - xi3^2)"));
        assert_eq!(s.bindings, vec![(Atom::param("c"), p("2*a"))]);
        assert_eq!(s.state, vec![(Atom::param("a"), ratio(3, 2))]);
        let f = s.factors.as_ref().unwrap();
        assert_eq!(f.factors[0].multiplicity, 2);
        assert_eq!(s.total_order(), 2 + 2 + 1);
    }

    #[test]
    fn print_parse_round_trip() {
        let s = parse_system(SMALL).unwrap();
        let again = parse_system(&print_system(&s)).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn malformed_index_line_names_the_line() {
        let text = SMALL.replace("unknown w multiplicity 1 index 1", "unknown w multiplicity 1 index x");
        let err = parse_system(&text).unwrap_err();
        assert_eq!(err.line(), 7);
        assert!(err.to_string().starts_with("line 7"), "{err}");
    }

    #[test]
    fn rejects_trailing_garbage() {
        let text = SMALL.replace("entry ew[0] w[0] := c*xi0", "entry ew[0] w[0] := c*xi0 )");
        assert!(matches!(parse_system(&text), Err(ParseError::Syntax { line: 14, .. })));
        let text = SMALL.replace("depends ev on v order 1", "depends ev on v order 1 extra");
        assert!(parse_system(&text).is_err());
    }

    #[test]
    fn duplicate_and_unknown() {
        let text = SMALL.replace("entry ew[0] w[0]", "entry ev[0] w[0]");
        assert!(matches!(parse_system(&text), Err(ParseError::DuplicateEntry { line: 14, .. })));
        let text = SMALL.replace("c*xi0", "zeta*xi0");
        match parse_system(&text) {
            Err(ParseError::UnknownAtom { line, name, col }) => {
                assert_eq!((line, name.as_str()), (14, "zeta"));
                assert_eq!(col, 21);
            }
            other => panic!("{other:?}"),
        }
        let text = SMALL.replace("entry ew[0] w[0]", "entry ew[1] w[0]");
        assert!(matches!(parse_system(&text), Err(ParseError::IndexOutOfRange { .. })));
        let text = SMALL.replace("end\n", "");
        assert!(parse_system(&text).is_err());
    }
}
