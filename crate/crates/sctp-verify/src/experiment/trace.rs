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

//! Versioned JSON traces and their replay through the transition relation.

use crate::attacker::{build_daisy, vocab_for, AttackAction, AttackerModelKind, Direction, Phase};
use crate::ltl::Counterexample;
use crate::protocol::{
    AbortScope, ChunkType, Message, PeerConfig, PeerId, TagClass, TimerId, UserCommand,
};
use crate::system::{
    initial_state, successors, Action, Actor, ScenarioConfig, SystemState, TimerMode,
    TransitionLabel,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace schema error: {0}")]
    Schema(String),
    #[error("unsupported trace version {0}")]
    Version(u32),
    #[error("invalid trace scenario: {0}")]
    Scenario(String),
    #[error("step {index} (`{action}`) is not enabled")]
    StepNotEnabled { index: usize, action: String },
    #[error("the loop does not close on state {0}")]
    LassoOpen(usize),
}

/// Everything needed to rebuild the transition relation a trace ran in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<AttackerModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    pub patch: bool,
    pub misinterpret: bool,
    pub tsn: bool,
    pub phase: Phase,
    pub budget: u8,
    pub replay_capacity: u8,
    pub replay_reemit: bool,
    pub timer_mode: TimerMode,
    pub abort_scope: AbortScope,
}

impl TraceConfig {
    pub fn peer(&self) -> PeerConfig {
        PeerConfig {
            patch_enabled: self.patch,
            misinterpret_521: self.misinterpret,
            tsn_enabled: self.tsn,
            abort_scope: self.abort_scope,
            ..PeerConfig::default()
        }
    }

    /// The scenario with the attacker, if any, scripted to `attack`.
    pub fn scenario(&self, attack: &[AttackAction]) -> Result<ScenarioConfig, TraceError> {
        let attacker = match self.model {
            None if !attack.is_empty() => {
                return Err(TraceError::Scenario(
                    "attacker actions without an attacker model".into(),
                ))
            }
            None => None,
            Some(kind) => {
                let mut spec = build_daisy(kind, vocab_for(kind, self.phase), self.budget)
                    .map_err(|e| TraceError::Scenario(e.to_string()))?;
                spec.replay_capacity = self.replay_capacity;
                spec.replay_reemit = self.replay_reemit;
                Some(spec.scripted(attack.to_vec()))
            }
        };
        Ok(ScenarioConfig {
            peer: self.peer(),
            timer_mode: self.timer_mode,
            attacker,
            ..ScenarioConfig::default()
        })
    }
}

/// One step of a trace in a flat, tool-friendly form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceAction {
    pub actor: String,
    pub kind: String,
    pub chunk: Option<String>,
    pub vtag: Option<String>,
    pub itag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tsn: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emitted: Option<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub choice: u8,
}

fn is_zero(c: &u8) -> bool {
    *c == 0
}

fn peer_name(p: PeerId) -> &'static str {
    match p {
        PeerId::A => "A",
        PeerId::B => "B",
    }
}

fn schema(msg: impl Into<String>) -> TraceError {
    TraceError::Schema(msg.into())
}

/// Parses the `CHUNK,VTAG,ITAG[,tsn=N]` message notation.
pub fn parse_message(s: &str) -> Result<Message, TraceError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(schema(format!("malformed message `{s}`")));
    }
    let chunk = ChunkType::from_name(parts[0])
        .ok_or_else(|| schema(format!("unknown chunk `{}`", parts[0])))?;
    let vtag = TagClass::from_name(parts[1])
        .ok_or_else(|| schema(format!("unknown tag class `{}`", parts[1])))?;
    let itag = TagClass::from_name(parts[2])
        .ok_or_else(|| schema(format!("unknown tag class `{}`", parts[2])))?;
    let tsn = match parts.get(3) {
        None => None,
        Some(t) => Some(
            t.strip_prefix("tsn=")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| schema(format!("malformed TSN `{t}`")))?,
        ),
    };
    Ok(Message::new(chunk, vtag, itag).with_tsn(tsn))
}

impl TraceAction {
    fn bare(actor: Actor, kind: &str) -> Self {
        TraceAction {
            actor: actor.name().to_string(),
            kind: kind.to_string(),
            chunk: None,
            vtag: None,
            itag: None,
            tsn: None,
            to: None,
            dir: None,
            timer: None,
            emitted: None,
            choice: 0,
        }
    }

    fn with_message(mut self, m: Message) -> Self {
        self.chunk = Some(m.chunk.name().to_string());
        self.vtag = Some(m.vtag.name().to_string());
        self.itag = Some(m.itag.name().to_string());
        self.tsn = m.tsn;
        self
    }

    pub fn from_label(l: &TransitionLabel) -> Self {
        let mut a = match l.action {
            Action::Command { cmd, .. } => {
                TraceAction::bare(l.actor, &cmd.name().to_ascii_lowercase())
            }
            Action::Internal { .. } => TraceAction::bare(l.actor, "step"),
            Action::Timeout { timer, .. } => TraceAction {
                timer: Some(timer.name().to_string()),
                ..TraceAction::bare(l.actor, "timeout")
            },
            Action::Deliver { to, msg } => TraceAction {
                to: Some(peer_name(to).to_string()),
                ..TraceAction::bare(l.actor, "deliver").with_message(msg)
            },
            Action::Flush { msg, .. } => TraceAction::bare(l.actor, "flush").with_message(msg),
            Action::Attack(att) => {
                let mut a = TraceAction::bare(l.actor, att.kind_name());
                if let Some(m) = att.message() {
                    a = a.with_message(m);
                }
                if let AttackAction::Send { dir, .. }
                | AttackAction::Consume { dir, .. }
                | AttackAction::Replay { dir, .. } = att
                {
                    a.dir = Some(dir.name().to_string());
                }
                a
            }
            Action::Stutter => TraceAction::bare(l.actor, "stutter"),
        };
        a.emitted = l.emitted.map(|m| m.to_string());
        a.choice = l.choice;
        a
    }

    /// The message carried by the action, if any.
    pub fn message(&self) -> Result<Option<Message>, TraceError> {
        match (&self.chunk, &self.vtag, &self.itag) {
            (None, None, None) => Ok(None),
            (Some(c), Some(v), Some(i)) => {
                let mut text = format!("{c},{v},{i}");
                if let Some(t) = self.tsn {
                    text.push_str(&format!(",tsn={t}"));
                }
                parse_message(&text).map(Some)
            }
            _ => Err(schema("chunk, vtag and itag must be given together")),
        }
    }

    pub fn emitted_message(&self) -> Result<Option<Message>, TraceError> {
        self.emitted.as_deref().map(parse_message).transpose()
    }

    pub fn to_label(&self) -> Result<TransitionLabel, TraceError> {
        let actor = Actor::from_name(&self.actor)
            .ok_or_else(|| schema(format!("unknown actor `{}`", self.actor)))?;
        let msg = self.message()?;
        let need_msg = || msg.ok_or_else(|| schema(format!("`{}` needs a message", self.kind)));
        let peer = match actor {
            Actor::UserA | Actor::PeerA => Some(PeerId::A),
            Actor::UserB | Actor::PeerB => Some(PeerId::B),
            _ => None,
        };
        let dir = || {
            self.dir
                .as_deref()
                .and_then(Direction::from_name)
                .ok_or_else(|| schema(format!("`{}` needs a direction", self.kind)))
        };
        let bad = || schema(format!("actor {} cannot `{}`", self.actor, self.kind));
        let action = match (actor, self.kind.as_str()) {
            (Actor::UserA | Actor::UserB, k) => {
                let cmd = UserCommand::from_name(&k.to_ascii_uppercase()).ok_or_else(bad)?;
                Action::Command {
                    peer: peer.ok_or_else(bad)?,
                    cmd,
                }
            }
            (Actor::PeerA | Actor::PeerB, "step") => Action::Internal {
                peer: peer.ok_or_else(bad)?,
            },
            (Actor::PeerA | Actor::PeerB, "timeout") => {
                let timer = self
                    .timer
                    .as_deref()
                    .and_then(TimerId::from_name)
                    .ok_or_else(|| schema("timeout needs a known timer"))?;
                Action::Timeout {
                    peer: peer.ok_or_else(bad)?,
                    timer,
                }
            }
            (Actor::PeerA | Actor::PeerB, "flush") => Action::Flush {
                peer: peer.ok_or_else(bad)?,
                msg: need_msg()?,
            },
            (Actor::Channel, "deliver") => {
                let to = match self.to.as_deref() {
                    Some("A") => PeerId::A,
                    Some("B") => PeerId::B,
                    _ => return Err(schema("deliver needs `to` of A or B")),
                };
                Action::Deliver {
                    to,
                    msg: need_msg()?,
                }
            }
            (_, "stutter") => Action::Stutter,
            (Actor::Attacker, k) => Action::Attack(match k {
                "send" => AttackAction::Send {
                    dir: dir()?,
                    msg: need_msg()?,
                },
                "consume" => AttackAction::Consume {
                    dir: dir()?,
                    msg: need_msg()?,
                },
                "capture" => AttackAction::Capture { msg: need_msg()? },
                "replay" => AttackAction::Replay {
                    dir: dir()?,
                    msg: need_msg()?,
                },
                "forget" => AttackAction::Forget { msg: need_msg()? },
                "terminate" => AttackAction::Terminate,
                _ => return Err(bad()),
            }),
            _ => return Err(bad()),
        };
        Ok(TransitionLabel {
            actor,
            action,
            emitted: self.emitted_message()?,
            choice: self.choice,
        })
    }

    /// Parses the one-line form produced by `Display`.
    pub fn parse_line(line: &str) -> Result<Self, TraceError> {
        let mut tokens = line.split_whitespace();
        let actor = tokens.next().ok_or_else(|| schema("empty action line"))?;
        let kind = tokens
            .next()
            .ok_or_else(|| schema("action line without a kind"))?;
        let mut a = TraceAction::bare(Actor::Channel, kind);
        a.actor = actor.to_string();
        while let Some(tok) = tokens.next() {
            if let Some(v) = tok.strip_prefix("to=") {
                a.to = Some(v.to_string());
            } else if let Some(v) = tok.strip_prefix("dir=") {
                a.dir = Some(v.to_string());
            } else if let Some(v) = tok.strip_prefix("timer=") {
                a.timer = Some(v.to_string());
            } else if let Some(v) = tok.strip_prefix('#') {
                a.choice = v
                    .parse()
                    .map_err(|_| schema(format!("malformed choice `{tok}`")))?;
            } else if tok == "=>" {
                let m = tokens
                    .next()
                    .ok_or_else(|| schema("`=>` without a message"))?;
                a.emitted = Some(parse_message(m)?.to_string());
            } else {
                a = a.with_message(parse_message(tok)?);
            }
        }
        Ok(a)
    }
}

impl fmt::Display for TraceAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.actor, self.kind)?;
        if let Ok(Some(m)) = self.message() {
            write!(f, " {m}")?;
        }
        if let Some(to) = &self.to {
            write!(f, " to={to}")?;
        }
        if let Some(d) = &self.dir {
            write!(f, " dir={d}")?;
        }
        if let Some(t) = &self.timer {
            write!(f, " timer={t}")?;
        }
        if let Some(e) = &self.emitted {
            write!(f, " => {e}")?;
        }
        if self.choice > 0 {
            write!(f, " #{}", self.choice)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub version: u32,
    pub config: TraceConfig,
    pub actions: Vec<TraceAction>,
    /// Index of the state the final action loops back to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lasso_split_index: Option<usize>,
}

impl Trace {
    pub fn new(config: TraceConfig) -> Self {
        Trace {
            version: TRACE_VERSION,
            config,
            actions: Vec::new(),
            lasso_split_index: None,
        }
    }

    pub fn from_labels(
        config: TraceConfig,
        labels: &[TransitionLabel],
        lasso_split_index: Option<usize>,
    ) -> Self {
        Trace {
            version: TRACE_VERSION,
            config,
            actions: labels.iter().map(TraceAction::from_label).collect(),
            lasso_split_index,
        }
    }

    pub fn from_counterexample(config: TraceConfig, cx: &Counterexample) -> Self {
        Trace::from_labels(config, &cx.labels, Some(cx.loop_start))
    }

    pub fn from_json(text: &str) -> Result<Self, TraceError> {
        let t: Trace = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        if t.version != TRACE_VERSION {
            return Err(TraceError::Version(t.version));
        }
        t.labels()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn labels(&self) -> Result<Vec<TransitionLabel>, TraceError> {
        self.actions.iter().map(TraceAction::to_label).collect()
    }

    /// The attacker's actions up to its termination.
    pub fn attack_actions(&self) -> Result<Vec<AttackAction>, TraceError> {
        Ok(self
            .labels()?
            .into_iter()
            .filter_map(|l| match l.action {
                Action::Attack(a) => Some(a),
                _ => None,
            })
            .take_while(|a| *a != AttackAction::Terminate)
            .collect())
    }
}

/// Replays `trace` step by step. Returns the visited states, starting with
/// the initial state, and checks that a lasso closes.
pub fn replay_trace(trace: &Trace) -> Result<Vec<SystemState>, TraceError> {
    let labels = trace.labels()?;
    let cfg = trace.config.scenario(&trace.attack_actions()?)?;
    let mut states = vec![initial_state(&cfg).map_err(|e| TraceError::Scenario(e.to_string()))?];
    for (index, label) in labels.iter().enumerate() {
        let cur = states.last().expect("nonempty");
        let succ = successors(&cfg, cur);
        let next = if label.action == Action::Stutter {
            succ.is_empty().then(|| cur.clone())
        } else {
            succ.into_iter().find(|(l, _)| l == label).map(|(_, s)| s)
        };
        match next {
            Some(s) => states.push(s),
            None => {
                return Err(TraceError::StepNotEnabled {
                    index,
                    action: trace.actions[index].to_string(),
                })
            }
        }
    }
    if let Some(k) = trace.lasso_split_index {
        if k >= labels.len() || states.last() != states.get(k) {
            return Err(TraceError::LassoOpen(k));
        }
    }
    Ok(states)
}
