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

//! Attacker gadgets: message vocabularies, placements and the per-step
//! action generator shared by synthesis and scripted replay.

use crate::protocol::{ChunkType, Message, TagClass};
use crate::system::{Channel, Stamp};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackerModelKind {
    OffPath,
    EvilServer,
    Replay,
    OnPath,
}

impl AttackerModelKind {
    pub const ALL: [AttackerModelKind; 4] = [
        AttackerModelKind::OffPath,
        AttackerModelKind::EvilServer,
        AttackerModelKind::Replay,
        AttackerModelKind::OnPath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackerModelKind::OffPath => "off-path",
            AttackerModelKind::EvilServer => "evil-server",
            AttackerModelKind::Replay => "replay",
            AttackerModelKind::OnPath => "on-path",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        let norm = match norm.as_str() {
            "offpath" => "off-path",
            "evilserver" => "evil-server",
            "onpath" => "on-path",
            other => other,
        }
        .to_string();
        AttackerModelKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
    }

    /// Default daisy budget for the model.
    pub fn default_budget(self) -> u8 {
        match self {
            AttackerModelKind::OffPath | AttackerModelKind::EvilServer => DEFAULT_BUDGET,
            AttackerModelKind::Replay | AttackerModelKind::OnPath => OBSERVING_BUDGET,
        }
    }

    /// Models whose synthesis is split into establishment and teardown runs.
    pub fn uses_phase_split(self) -> bool {
        matches!(self, AttackerModelKind::OffPath | AttackerModelKind::OnPath)
    }
}

impl fmt::Display for AttackerModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Establishment,
    Teardown,
    Full,
}

impl Phase {
    pub fn chunks(self) -> &'static [ChunkType] {
        use ChunkType::*;
        match self {
            Phase::Establishment => &[Init, InitAck, CookieEcho, CookieAck, Abort],
            Phase::Teardown => &[Shutdown, ShutdownAck, ShutdownComplete, Abort],
            Phase::Full => &[
                Init,
                InitAck,
                CookieEcho,
                CookieAck,
                Shutdown,
                ShutdownAck,
                ShutdownComplete,
                Abort,
            ],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Establishment => "establishment",
            Phase::Teardown => "teardown",
            Phase::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    AToB,
    BToA,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::AToB => "AtoB",
            Direction::BToA => "BtoA",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "atob" | "a_to_b" | "a-to-b" => Some(Direction::AToB),
            "btoa" | "b_to_a" | "b-to-a" => Some(Direction::BToA),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub sendable: Vec<Message>,
    pub receivable: Vec<Message>,
    pub phase: Phase,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttackerError {
    #[error("vocabulary for {kind} contains a forbidden message {msg}")]
    InvalidVocabulary {
        kind: AttackerModelKind,
        msg: Message,
    },
}

/// Phase-restricted vocabulary intersected with the model's tag discipline.
pub fn vocab_for(kind: AttackerModelKind, phase: Phase) -> Vocabulary {
    use TagClass::*;
    let chunks = phase.chunks();
    let all = Message::all_grammar_valid();
    let in_phase = |m: &Message| chunks.contains(&m.chunk);
    let sendable: Vec<Message> = match kind {
        AttackerModelKind::OffPath => all
            .into_iter()
            .filter(in_phase)
            .filter(|m| m.vtag != E && m.itag != E)
            .collect(),
        AttackerModelKind::EvilServer | AttackerModelKind::OnPath => all
            .into_iter()
            .filter(in_phase)
            .filter(|m| m.vtag != U && m.itag != U)
            .collect(),
        AttackerModelKind::Replay => Vec::new(),
    };
    let receivable = match kind {
        AttackerModelKind::OffPath => Vec::new(),
        _ => Message::all_grammar_valid(),
    };
    Vocabulary {
        sendable,
        receivable,
        phase,
    }
}

/// Checks a vocabulary against the model's placement and tag rules.
pub fn check_vocabulary(kind: AttackerModelKind, vocab: &Vocabulary) -> Result<(), AttackerError> {
    for m in &vocab.sendable {
        let bad = !crate::protocol::validate_message(m)
            || match kind {
                AttackerModelKind::OffPath => {
                    m.vtag == TagClass::E
                        || m.itag == TagClass::E
                        || matches!(m.chunk, ChunkType::Data | ChunkType::CookieError)
                }
                AttackerModelKind::EvilServer => {
                    m.vtag == TagClass::U || m.itag == TagClass::U || m.chunk == ChunkType::Data
                }
                AttackerModelKind::OnPath => m.vtag == TagClass::U || m.itag == TagClass::U,
                AttackerModelKind::Replay => true,
            };
        if bad {
            return Err(AttackerError::InvalidVocabulary { kind, msg: *m });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AttackAction {
    /// Inject a message into a buffer.
    Send {
        dir: Direction,
        msg: Message,
    },
    /// Take the in-flight message out of a buffer.
    Consume {
        dir: Direction,
        msg: Message,
    },
    /// Copy the in-flight message on the tapped buffer into memory.
    Capture {
        msg: Message,
    },
    /// Re-emit a remembered message.
    Replay {
        dir: Direction,
        msg: Message,
    },
    /// Drop a remembered message.
    Forget {
        msg: Message,
    },
    Terminate,
}

impl AttackAction {
    pub fn message(&self) -> Option<Message> {
        match *self {
            AttackAction::Send { msg, .. }
            | AttackAction::Consume { msg, .. }
            | AttackAction::Capture { msg }
            | AttackAction::Replay { msg, .. }
            | AttackAction::Forget { msg } => Some(msg),
            AttackAction::Terminate => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AttackAction::Send { .. } => "send",
            AttackAction::Consume { .. } => "consume",
            AttackAction::Capture { .. } => "capture",
            AttackAction::Replay { .. } => "replay",
            AttackAction::Forget { .. } => "forget",
            AttackAction::Terminate => "terminate",
        }
    }
}

impl fmt::Display for AttackAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackAction::Send { dir, msg } => write!(f, "{} ! {}", dir.name(), msg),
            AttackAction::Consume { dir, msg } => write!(f, "{} ? {}", dir.name(), msg),
            AttackAction::Capture { msg } => write!(f, "capture {msg}"),
            AttackAction::Replay { dir, msg } => write!(f, "{} ! {} (replayed)", dir.name(), msg),
            AttackAction::Forget { msg } => write!(f, "forget {msg}"),
            AttackAction::Terminate => f.write_str("terminate"),
        }
    }
}

/// Forbidden complete action sequences, stored as a trie so the daisy can
/// track its position with a single integer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForbiddenTrie {
    nodes: Vec<TrieNode>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct TrieNode {
    children: Vec<(AttackAction, u32)>,
    terminal: bool,
}

/// Cursor value once the daisy has left every forbidden prefix.
pub const OFF_TRIE: u32 = u32::MAX;

impl ForbiddenTrie {
    pub fn new() -> Self {
        ForbiddenTrie {
            nodes: vec![TrieNode::default()],
        }
    }

    pub fn insert(&mut self, seq: &[AttackAction]) {
        if self.nodes.is_empty() {
            self.nodes.push(TrieNode::default());
        }
        let mut cur = 0usize;
        for a in seq {
            let found = self.nodes[cur]
                .children
                .iter()
                .find(|(b, _)| b == a)
                .map(|&(_, n)| n);
            cur = match found {
                Some(n) => n as usize,
                None => {
                    let id = self.nodes.len() as u32;
                    self.nodes.push(TrieNode::default());
                    self.nodes[cur].children.push((*a, id));
                    id as usize
                }
            };
        }
        self.nodes[cur].terminal = true;
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().filter(|n| n.terminal).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self, cursor: u32, a: &AttackAction) -> u32 {
        if cursor == OFF_TRIE || self.nodes.is_empty() {
            return OFF_TRIE;
        }
        self.nodes[cursor as usize]
            .children
            .iter()
            .find(|(b, _)| b == a)
            .map_or(OFF_TRIE, |&(_, n)| n)
    }

    pub fn is_terminal(&self, cursor: u32) -> bool {
        cursor != OFF_TRIE && self.nodes.get(cursor as usize).is_some_and(|n| n.terminal)
    }
}

/// Static description of an attacker process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackerSpec {
    pub kind: AttackerModelKind,
    pub vocab: Vocabulary,
    pub budget: u8,
    pub replay_capacity: u8,
    pub replay_tap: Direction,
    pub replay_inject: Direction,
    pub replay_reemit: bool,
    pub forbidden: ForbiddenTrie,
    /// When set, the attacker follows this exact action list and nothing else.
    pub script: Option<Vec<AttackAction>>,
}

pub const DEFAULT_BUDGET: u8 = 12;
/// Budget for the models that can both observe and inject, whose state
/// spaces grow fastest with the number of actions.
pub const OBSERVING_BUDGET: u8 = 4;
pub const DEFAULT_REPLAY_CAPACITY: u8 = 2;

/// Builds the nondeterministic daisy for a model.
pub fn build_daisy(
    kind: AttackerModelKind,
    vocab: Vocabulary,
    budget: u8,
) -> Result<AttackerSpec, AttackerError> {
    check_vocabulary(kind, &vocab)?;
    Ok(AttackerSpec {
        kind,
        vocab,
        budget,
        replay_capacity: DEFAULT_REPLAY_CAPACITY,
        replay_tap: Direction::BToA,
        replay_inject: Direction::BToA,
        replay_reemit: true,
        forbidden: ForbiddenTrie::new(),
        script: None,
    })
}

impl AttackerSpec {
    /// A deterministic attacker that performs `actions` in order and then stops.
    pub fn scripted(&self, actions: Vec<AttackAction>) -> AttackerSpec {
        AttackerSpec {
            script: Some(actions),
            forbidden: ForbiddenTrie::new(),
            ..self.clone()
        }
    }

    pub fn initial_runtime(&self) -> AttackerRuntime {
        AttackerRuntime {
            kind: self.kind,
            steps: 0,
            terminated: false,
            memory: SmallVec::new(),
            cursor: 0,
        }
    }

    /// Whether honest peer B is replaced while the attacker runs.
    pub fn replaces_peer_b(&self, rt: &AttackerRuntime) -> bool {
        self.kind == AttackerModelKind::EvilServer && !rt.terminated
    }
}

/// Dynamic attacker state, part of the global system state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttackerRuntime {
    pub kind: AttackerModelKind,
    pub steps: u8,
    pub terminated: bool,
    /// Replay memory, kept sorted so equal multisets compare equal.
    pub memory: SmallVec<[Message; 2]>,
    /// Trie position for the daisy, script index for a scripted attacker.
    pub cursor: u32,
}

impl AttackerRuntime {
    fn remember(&mut self, m: Message) {
        let pos = self.memory.binary_search(&m).unwrap_or_else(|p| p);
        self.memory.insert(pos, m);
    }

    fn forget(&mut self, m: &Message) {
        if let Ok(pos) = self.memory.binary_search(m) {
            self.memory.remove(pos);
        }
    }

    /// Applies the INIT flush rule for the replay memory.
    pub fn observe(&mut self, seen: Option<Message>) {
        if self.kind == AttackerModelKind::Replay
            && seen.is_some_and(|m| m.chunk == ChunkType::Init)
        {
            self.memory.clear();
        }
    }
}

/// Candidate actions before the script or trie filter is applied.
fn raw_actions(spec: &AttackerSpec, rt: &AttackerRuntime, ch: &Channel) -> Vec<AttackAction> {
    let mut out = Vec::new();
    match spec.kind {
        AttackerModelKind::OffPath => {
            if ch.get(Direction::BToA).is_none() {
                for &m in &spec.vocab.sendable {
                    out.push(AttackAction::Send {
                        dir: Direction::BToA,
                        msg: m,
                    });
                }
            }
        }
        AttackerModelKind::EvilServer => {
            if let Some(m) = ch.get(Direction::AToB) {
                out.push(AttackAction::Consume {
                    dir: Direction::AToB,
                    msg: m,
                });
            }
            if ch.get(Direction::BToA).is_none() {
                for &m in &spec.vocab.sendable {
                    out.push(AttackAction::Send {
                        dir: Direction::BToA,
                        msg: m,
                    });
                }
            }
        }
        AttackerModelKind::OnPath => {
            for dir in [Direction::AToB, Direction::BToA] {
                match ch.get(dir) {
                    Some(m) => out.push(AttackAction::Consume { dir, msg: m }),
                    None => {
                        for &m in &spec.vocab.sendable {
                            out.push(AttackAction::Send { dir, msg: m });
                        }
                    }
                }
            }
        }
        AttackerModelKind::Replay => {
            if let Some(m) = ch.get(spec.replay_tap) {
                if rt.memory.len() < spec.replay_capacity as usize {
                    out.push(AttackAction::Capture { msg: m });
                }
            }
            let mut distinct: SmallVec<[Message; 2]> = rt.memory.clone();
            distinct.dedup();
            if spec.replay_reemit && ch.get(spec.replay_inject).is_none() {
                for &m in &distinct {
                    out.push(AttackAction::Replay {
                        dir: spec.replay_inject,
                        msg: m,
                    });
                }
            }
            for &m in &distinct {
                out.push(AttackAction::Forget { msg: m });
            }
        }
    }
    out
}

/// Applies one non-terminating action to the runtime and channel.
pub fn apply_action(
    spec: &AttackerSpec,
    rt: &AttackerRuntime,
    ch: &Channel,
    a: &AttackAction,
) -> (AttackerRuntime, Channel) {
    let mut rt = rt.clone();
    let mut ch = *ch;
    match *a {
        AttackAction::Send { dir, msg } => ch.set(dir, Some(msg)),
        // Re-emitting keeps the copy, so a message can be replayed repeatedly.
        AttackAction::Replay { dir, msg } => ch.set_stamped(dir, Some(msg), Stamp::replayed()),
        AttackAction::Consume { dir, .. } => ch.set(dir, None),
        AttackAction::Capture { msg } => {
            if msg.chunk == ChunkType::Init {
                rt.memory.clear();
            } else {
                rt.remember(msg);
            }
        }
        AttackAction::Forget { msg } => rt.forget(&msg),
        AttackAction::Terminate => {
            // A stopped attacker has no further influence, so its history is
            // dropped to keep equal post-attack states equal.
            rt = AttackerRuntime {
                terminated: true,
                ..spec.initial_runtime()
            };
        }
    }
    if *a != AttackAction::Terminate {
        rt.steps = rt.steps.saturating_add(1);
        rt.cursor = match &spec.script {
            Some(_) => rt.cursor + 1,
            None => spec.forbidden.step(rt.cursor, a),
        };
    }
    (rt, ch)
}

/// Every enabled attacker move, in a fixed order, ending with termination
/// when it is allowed.
pub fn attacker_moves(
    spec: &AttackerSpec,
    rt: &AttackerRuntime,
    ch: &Channel,
) -> Vec<(AttackAction, AttackerRuntime, Channel)> {
    let mut out = Vec::new();
    if rt.terminated {
        return out;
    }
    if let Some(script) = &spec.script {
        let idx = rt.cursor as usize;
        match script.get(idx) {
            Some(a) => {
                if raw_actions(spec, rt, ch).contains(a) {
                    let (r, c) = apply_action(spec, rt, ch, a);
                    out.push((*a, r, c));
                }
            }
            None => {
                let (r, c) = apply_action(spec, rt, ch, &AttackAction::Terminate);
                out.push((AttackAction::Terminate, r, c));
            }
        }
        return out;
    }
    if rt.steps < spec.budget {
        for a in raw_actions(spec, rt, ch) {
            let (r, c) = apply_action(spec, rt, ch, &a);
            out.push((a, r, c));
        }
    }
    if !spec.forbidden.is_terminal(rt.cursor) {
        let (r, c) = apply_action(spec, rt, ch, &AttackAction::Terminate);
        out.push((AttackAction::Terminate, r, c));
    }
    out
}

/// The replay gadget's branches from a given runtime and an optional
/// in-flight message on the tapped buffer.
pub fn replay_step(
    spec: &AttackerSpec,
    rt: &AttackerRuntime,
    observation: Option<Message>,
) -> Vec<(AttackAction, AttackerRuntime)> {
    let mut rt = rt.clone();
    rt.observe(observation);
    let mut ch = Channel::default();
    ch.set(spec.replay_tap, observation);
    attacker_moves(spec, &rt, &ch)
        .into_iter()
        .map(|(a, r, _)| (a, r))
        .collect()
}
