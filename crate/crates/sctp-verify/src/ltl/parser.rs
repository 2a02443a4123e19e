// Copyright 2026 The sctp-verify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Recursive-descent parser for the property syntax.
//!
//! Precedence from loosest to tightest: `->` (right associative), `||`,
//! `&&`, `U`/`R` (right associative), then the prefix operators `!`, `X`,
//! `G`, `F`.

use super::formula::{Atom, Formula};
use crate::protocol::PeerState;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Not,
    And,
    Or,
    Implies,
    Eq,
    Ne,
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let two = |s: &str| text[i..].starts_with(s);
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            _ if two("&&") => Tok::And,
            _ if two("||") => Tok::Or,
            _ if two("->") => Tok::Implies,
            _ if two("==") => Tok::Eq,
            _ if two("!=") => Tok::Ne,
            b'!' => Tok::Not,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| ParseError {
                    pos: start,
                    msg: "number out of range".into(),
                })?;
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(ParseError {
                    pos: start,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        };
        i += match tok {
            Tok::And | Tok::Or | Tok::Implies | Tok::Eq | Tok::Ne => 2,
            _ => 1,
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn is_op(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.is_op("U") {
            self.bump();
            return Ok(Formula::until(lhs, self.until()?));
        }
        if self.is_op("R") {
            self.bump();
            return Ok(Formula::release(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        for (op, build) in [
            ("X", Formula::next as fn(Formula) -> Formula),
            ("G", Formula::globally),
            ("F", Formula::finally),
        ] {
            if self.is_op(op) {
                self.bump();
                return Ok(build(self.unary()?));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(name) => self.atom(&name),
            Tok::End => self.err("unexpected end of input"),
            _ => self.err("expected a formula"),
        }
    }

    fn index(&mut self) -> Result<u8, ParseError> {
        self.expect(Tok::LBrack, "'['")?;
        let pos = self.pos();
        let n = match self.bump() {
            Tok::Num(n) if n < 2 => n as u8,
            _ => {
                return Err(ParseError {
                    pos,
                    msg: "peer index must be 0 or 1".into(),
                })
            }
        };
        self.expect(Tok::RBrack, "']'")?;
        Ok(n)
    }

    /// Parses `== rhs` or `!= rhs`, returning whether it was equality.
    fn comparison(&mut self) -> Result<bool, ParseError> {
        match self.bump() {
            Tok::Eq => Ok(true),
            Tok::Ne => Ok(false),
            _ => {
                self.at -= 1;
                self.err("expected '==' or '!='")
            }
        }
    }

    fn polarity(eq: bool, a: Atom) -> Formula {
        if eq {
            Formula::Atom(a)
        } else {
            Formula::not(Formula::Atom(a))
        }
    }

    fn atom(&mut self, name: &str) -> Result<Formula, ParseError> {
        let start = self.pos();
        self.bump();
        match name {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            "st" | "ost" => {
                let i = self.index()?;
                let eq = self.comparison()?;
                let pos = self.pos();
                let rhs = match self.bump() {
                    Tok::Ident(r) => r,
                    _ => {
                        return Err(ParseError {
                            pos,
                            msg: "expected a state name".into(),
                        })
                    }
                };
                if rhs == "st" || rhs == "ost" {
                    let j = self.index()?;
                    if j != i || rhs == name {
                        return Err(ParseError {
                            pos,
                            msg: "only st[i] against ost[i] is supported".into(),
                        });
                    }
                    return Ok(Self::polarity(eq, Atom::StEqOst(i)));
                }
                let p = PeerState::from_ltl_name(&rhs).ok_or(ParseError {
                    pos,
                    msg: format!("unknown state {rhs}"),
                })?;
                let a = if name == "st" {
                    Atom::St(i, p)
                } else {
                    Atom::Ost(i, p)
                };
                Ok(Self::polarity(eq, a))
            }
            "timers" => {
                let i = self.index()?;
                let eq = self.comparison()?;
                let pos = self.pos();
                match self.bump() {
                    Tok::Ident(t) if t == "T1_COOKIE" => {
                        Ok(Self::polarity(eq, Atom::CookieTimer(i)))
                    }
                    _ => Err(ParseError {
                        pos,
                        msg: "only T1_COOKIE is observable".into(),
                    }),
                }
            }
            "everAborted" | "everTimedOut" | "attackerTerminated" | "term" => {
                let a = match name {
                    "everAborted" => Atom::EverAborted,
                    "everTimedOut" => Atom::EverTimedOut,
                    _ => Atom::AttackerTerminated,
                };
                if !matches!(self.peek(), Tok::Eq | Tok::Ne) {
                    return Ok(Formula::Atom(a));
                }
                let eq = self.comparison()?;
                let pos = self.pos();
                let value = match self.bump() {
                    Tok::Ident(v) if v == "true" => true,
                    Tok::Ident(v) if v == "false" => false,
                    _ => {
                        return Err(ParseError {
                            pos,
                            msg: "expected true or false".into(),
                        })
                    }
                };
                Ok(Self::polarity(eq == value, a))
            }
            _ => {
                if let Some(k) = name.strip_prefix('p').and_then(|k| k.parse::<u8>().ok()) {
                    return Ok(Formula::Atom(Atom::Prop(k)));
                }
                Err(ParseError {
                    pos: start,
                    msg: format!("unknown identifier {name}"),
                })
            }
        }
    }
}

/// Parses a formula in the documented concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutual_shutdown_received_property() {
        let f = parse_formula("G(st[0] != ShutdownReceived || st[1] != ShutdownReceived)").unwrap();
        let lit = |i| Formula::not(Formula::Atom(Atom::St(i, PeerState::ShutdownReceived)));
        assert_eq!(f, Formula::globally(Formula::or(lit(0), lit(1))));
    }

    #[test]
    fn trivial_and_malformed() {
        assert_eq!(
            parse_formula("G(true)").unwrap(),
            Formula::globally(Formula::True)
        );
        let e = parse_formula("G((").unwrap_err();
        assert_eq!(e.pos, 3);
    }

    #[test]
    fn state_history_comparison() {
        let f = parse_formula("st[1] != ost[1]").unwrap();
        assert_eq!(f, Formula::not(Formula::Atom(Atom::StEqOst(1))));
        assert!(parse_formula("st[0] == ost[1]").is_err());
    }

    #[test]
    fn precedence() {
        let f = parse_formula("p0 && p1 || p2 -> p3 -> p4").unwrap();
        let p = |k| Formula::Atom(Atom::Prop(k));
        let expect = Formula::implies(
            Formula::or(Formula::and(p(0), p(1)), p(2)),
            Formula::implies(p(3), p(4)),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn builtins_round_trip() {
        for p in super::super::builtin_properties() {
            let printed = p.formula.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), p.formula, "{printed}");
        }
    }
}
