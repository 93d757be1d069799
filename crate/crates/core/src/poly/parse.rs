//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*        '/' needs a constant divisor
//! unary  := '-' unary | power
//! power  := primary ['^' INT]
//! primary:= INT | IDENT ['[' INT ']'] | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::Poly;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {col}: {msg}")]
pub struct ExprError {
    /// 1-based column within the parsed text.
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().unwrap()), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()[]".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(ExprError {
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Resolves an identifier (with optional `[k]` index) to a polynomial.
pub type Resolver<'a> = dyn Fn(&str, Option<u32>) -> Result<Poly, String> + 'a;

struct Parser<'a, 'r> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    resolve: &'a Resolver<'r>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ExprError> {
        let mut acc = if self.eat('-') {
            -self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let col = self.col();
                let den = self.unary()?;
                match den.constant_value() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    Some(_) => return Err(ExprError { col, msg: "division by zero".into() }),
                    None => {
                        return Err(ExprError {
                            col,
                            msg: "divisor must be a nonzero constant".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ExprError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        let base = self.primary()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e: u32 = match n.try_into() {
                        Ok(e) if e <= 4096 => e,
                        _ => return self.err("exponent out of range"),
                    };
                    return Ok(base.pow(e));
                }
                _ => return self.err("expected a non-negative integer exponent"),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Poly, ExprError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Poly::constant(Q::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut index = None;
                if self.eat('[') {
                    match self.peek().cloned() {
                        Some(Tok::Int(n)) => {
                            self.pos += 1;
                            index = Some(u32::try_from(n).or_else(|_| self.err("index too large"))?);
                        }
                        _ => return self.err("expected an integer index"),
                    }
                    if !self.eat(']') {
                        return self.err("expected `]`");
                    }
                }
                (self.resolve)(&name, index).map_err(|msg| ExprError { col, msg })
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses `text` completely; trailing tokens are an error.
pub fn parse_expr(text: &str, resolve: &Resolver<'_>) -> Result<Poly, ExprError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        resolve,
    };
    let value = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.err("trailing input after expression");
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;

    #[test]
    fn precedence() {
        assert_eq!(p("2*xi0^2 - -xi1"), p("xi1 + 2*xi0*xi0"));
        assert_eq!(p("-xi0^2"), -p("xi0^2"));
        assert_eq!(p("3/4*F"), p("F*3/4"));
    }

    #[test]
    fn errors_carry_columns() {
        let e = "xi0 + * xi1".parse::<Poly>().unwrap_err();
        assert_eq!(e.col, 7);
        let e = "xi0 xi1".parse::<Poly>().unwrap_err();
        assert_eq!(e.col, 5);
        assert!("F/q".parse::<Poly>().is_err());
        assert!("F/0".parse::<Poly>().is_err());
        assert!("(xi0".parse::<Poly>().is_err());
        assert!("xi0 $".parse::<Poly>().is_err());
    }
}
