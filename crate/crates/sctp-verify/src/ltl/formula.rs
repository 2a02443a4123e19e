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

//! Formula AST, atoms, printer and the built-in property list.

use crate::protocol::PeerState;
use std::fmt;

/// Atomic propositions over a global state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `st[i] == S`
    St(u8, PeerState),
    /// `ost[i] == S`
    Ost(u8, PeerState),
    /// `st[i] == ost[i]`
    StEqOst(u8),
    /// `timers[i] == T1_COOKIE`
    CookieTimer(u8),
    EverAborted,
    EverTimedOut,
    AttackerTerminated,
    /// Free proposition `pK`, used by generic Kripke structures.
    Prop(u8),
}

impl Atom {
    fn fmt_eq(&self, f: &mut fmt::Formatter<'_>, eq: bool) -> fmt::Result {
        let op = if eq { "==" } else { "!=" };
        match *self {
            Atom::St(i, p) => write!(f, "st[{i}] {op} {}", p.ltl_name()),
            Atom::Ost(i, p) => write!(f, "ost[{i}] {op} {}", p.ltl_name()),
            Atom::StEqOst(i) => write!(f, "st[{i}] {op} ost[{i}]"),
            Atom::CookieTimer(i) => write!(f, "timers[{i}] {op} T1_COOKIE"),
            Atom::EverAborted => write!(f, "everAborted == {eq}"),
            Atom::EverTimedOut => write!(f, "everTimedOut == {eq}"),
            Atom::AttackerTerminated => write!(f, "attackerTerminated == {eq}"),
            Atom::Prop(k) if eq => write!(f, "p{k}"),
            Atom::Prop(k) => write!(f, "!p{k}"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_eq(f, true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Globally(Box<Formula>),
    Finally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    /// Nesting depth of operators; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(a) | Formula::Next(a) | Formula::Globally(a) | Formula::Finally(a) => {
                1 + a.depth()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// All atoms, sorted and deduplicated.
    pub fn atoms(&self) -> Vec<Atom> {
        fn walk(f: &Formula, out: &mut Vec<Atom>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(a) => out.push(*a),
                Formula::Not(a) | Formula::Next(a) | Formula::Globally(a) | Formula::Finally(a) => {
                    walk(a, out)
                }
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Until(a, b)
                | Formula::Release(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Until(..) | Formula::Release(..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Binary operands are parenthesized unless they bind strictly tighter,
        // which keeps the output unambiguous for the parser.
        let operand = |f: &mut fmt::Formatter<'_>, sub: &Formula, parent: u8| {
            if sub.precedence() > parent {
                write!(f, "{sub}")
            } else {
                write!(f, "({sub})")
            }
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => a.fmt_eq(f, false),
                other => write!(f, "!({other})"),
            },
            Formula::Next(a) => write!(f, "X({a})"),
            Formula::Globally(a) => write!(f, "G({a})"),
            Formula::Finally(a) => write!(f, "F({a})"),
            Formula::And(a, b) => {
                operand(f, a, 3)?;
                write!(f, " && ")?;
                operand(f, b, 3)
            }
            Formula::Or(a, b) => {
                operand(f, a, 2)?;
                write!(f, " || ")?;
                operand(f, b, 2)
            }
            Formula::Implies(a, b) => {
                operand(f, a, 1)?;
                write!(f, " -> ")?;
                operand(f, b, 1)
            }
            Formula::Until(a, b) => {
                operand(f, a, 4)?;
                write!(f, " U ")?;
                operand(f, b, 4)
            }
            Formula::Release(a, b) => {
                operand(f, a, 4)?;
                write!(f, " R ")?;
                operand(f, b, 4)
            }
        }
    }
}

/// A property with a stable name and its source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedProperty {
    pub name: &'static str,
    pub text: &'static str,
    pub formula: Formula,
}

/// Source text of the ten protocol properties, in order.
pub const PROPERTY_TEXTS: [(&str, &str); 10] = [
    (
        "phi1",
        "G((st[0] == Closed) -> (X(F(st[0] == Closed || st[0] == Established || st[0] == CookieWait))))",
    ),
    (
        "phi2",
        "G(F(st[0] != ost[0] || st[1] != ost[1] || (st[0] == Closed && st[1] == Closed) || \
         (st[0] == Established && st[1] == Established)))",
    ),
    ("phi3", "G((st[0] != ost[0] && ost[0] == ShutdownAckSent) -> (st[0] == Closed))"),
    ("phi4", "G(F(st[0] != CookieEchoed || timers[0] == T1_COOKIE))"),
    ("phi5", "G(st[0] != ShutdownReceived || st[1] != ShutdownReceived)"),
    (
        "phi6",
        "G((st[0] != ost[0] && ost[0] == ShutdownReceived) -> (st[0] == ShutdownAckSent || st[0] == Closed))",
    ),
    ("phi7", "G(st[0] != CookieEchoed || st[1] != ShutdownReceived)"),
    (
        "phi8",
        "G((ost[1] == Established && ost[0] == Closed && everAborted == false && everTimedOut == false && \
         ost[0] != st[0]) -> (st[0] == Established || st[0] == IntermediaryCookieWait))",
    ),
    (
        "phi9",
        "G((ost[0] == Established && ost[1] == Closed && everAborted == false && everTimedOut == false && \
         ost[1] != st[1]) -> (st[1] == Established || st[1] == IntermediaryCookieWait))",
    ),
    (
        "phi10",
        "G((ost[0] == Established && (st[0] == ShutdownSent || st[0] == ShutdownReceived)) -> F(st[0] == Closed))",
    ),
];

/// Invariant reading of the cookie-timer property.
pub const PHI4_STRICT: &str = "G(st[0] != CookieEchoed || timers[0] == T1_COOKIE)";

/// The ten protocol properties.
pub fn builtin_properties() -> Vec<NamedProperty> {
    PROPERTY_TEXTS
        .iter()
        .map(|&(name, text)| NamedProperty {
            name,
            text,
            formula: super::parse_formula(text).expect("built-in property parses"),
        })
        .collect()
}

/// Looks up a built-in property by name (`phi1`..`phi10`, `phi4-strict`,
/// or the bare index `1`..`10`).
pub fn builtin_property(name: &str) -> Option<NamedProperty> {
    if name == "phi4-strict" {
        return Some(NamedProperty {
            name: "phi4-strict",
            text: PHI4_STRICT,
            formula: super::parse_formula(PHI4_STRICT).expect("built-in property parses"),
        });
    }
    let key = if name.starts_with("phi") {
        name.to_string()
    } else {
        format!("phi{name}")
    };
    builtin_properties().into_iter().find(|p| p.name == key)
}
