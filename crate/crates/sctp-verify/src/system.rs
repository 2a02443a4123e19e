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

//! Global composition UserA | PeerA | Channel | PeerB | UserB, with an
//! optional attacker process, and an explicit-state explorer.

use crate::attacker::{attacker_moves, AttackAction, AttackerRuntime, AttackerSpec, Direction};
use crate::ltl::Atom;
use crate::protocol::{
    peer_step, ChunkType, Message, PeerConfig, PeerEvent, PeerId, PeerOutput, PeerProcess,
    PeerState, TagClass, TimerId, UserCommand,
};
use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use thiserror::Error;

/// Freshness of a buffered honest packet relative to the tags its
/// endpoints currently hold. Injected packets carry the default stamp and
/// are never marked: their tag class is taken at face value.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Stamp {
    pub honest: bool,
    /// The receiver has discarded the tag the packet is addressed to.
    pub dst_stale: bool,
    /// The sender has discarded the tag the packet advertises.
    pub src_stale: bool,
    /// A re-emitted copy of a packet that was already delivered.
    #[serde(default)]
    pub replayed: bool,
}

impl Stamp {
    fn honest(dst_stale: bool) -> Stamp {
        Stamp {
            honest: true,
            dst_stale,
            ..Stamp::default()
        }
    }

    pub fn replayed() -> Stamp {
        Stamp {
            replayed: true,
            ..Stamp::default()
        }
    }
}

/// One single-slot lossless FIFO buffer per direction.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Channel {
    pub a_to_b: Option<Message>,
    pub b_to_a: Option<Message>,
    #[serde(default)]
    pub stamps: [Stamp; 2],
}

impl Channel {
    pub fn get(&self, dir: Direction) -> Option<Message> {
        match dir {
            Direction::AToB => self.a_to_b,
            Direction::BToA => self.b_to_a,
        }
    }

    /// Writes a slot as an injector would: the stamp is reset.
    pub fn set(&mut self, dir: Direction, m: Option<Message>) {
        self.set_stamped(dir, m, Stamp::default());
    }

    pub fn set_stamped(&mut self, dir: Direction, m: Option<Message>, stamp: Stamp) {
        match dir {
            Direction::AToB => self.a_to_b = m,
            Direction::BToA => self.b_to_a = m,
        }
        self.stamps[dir as usize] = if m.is_some() { stamp } else { Stamp::default() };
    }

    pub fn stamp(&self, dir: Direction) -> Stamp {
        self.stamps[dir as usize]
    }

    /// Buffer a peer sends into.
    pub fn outbound(peer: PeerId) -> Direction {
        match peer {
            PeerId::A => Direction::AToB,
            PeerId::B => Direction::BToA,
        }
    }

    /// Buffer a peer receives from.
    pub fn inbound(peer: PeerId) -> Direction {
        Channel::outbound(peer.other())
    }
}

/// When an active timer may fire.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimerMode {
    /// Whenever the timer is active.
    Eager,
    /// Only when no delivery or spontaneous peer step is enabled, i.e. the
    /// guarded reply can no longer arrive.
    #[default]
    Quiescent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub state_cap: usize,
    pub search_depth: usize,
    pub max_depth: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            state_cap: 5_000_000,
            search_depth: 600_000,
            max_depth: 2_400_000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioConfig {
    pub peer: PeerConfig,
    pub timer_mode: TimerMode,
    pub attacker: Option<AttackerSpec>,
    pub bounds: Bounds,
    /// Take the tag class of stale honest packets at face value.
    pub ignore_stale_tags: bool,
}

impl ScenarioConfig {
    pub fn baseline(patch_enabled: bool) -> Self {
        let mut cfg = ScenarioConfig::default();
        cfg.peer.patch_enabled = patch_enabled;
        cfg
    }

    pub fn with_attacker(mut self, spec: AttackerSpec) -> Self {
        self.attacker = Some(spec);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("state space exceeds the cap of {cap} states")]
    BoundExceeded { cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemState {
    pub peers: [PeerProcess; 2],
    pub ost: [PeerState; 2],
    pub channel: Channel,
    /// Reply a peer produced on delivery while its outbound buffer was full.
    /// The peer takes no other step until the reply is flushed.
    pub pending: [Option<(Message, Stamp)>; 2],
    /// Whether each peer holds the other endpoint's current tag.
    pub peer_tag_known: [bool; 2],
    pub attacker: Option<AttackerRuntime>,
    pub ever_aborted: bool,
    pub ever_timed_out: bool,
}

impl SystemState {
    pub fn peer(&self, id: PeerId) -> &PeerProcess {
        &self.peers[id.index()]
    }

    pub fn states(&self) -> [PeerState; 2] {
        [self.peers[0].state, self.peers[1].state]
    }

    /// An absent attacker counts as terminated.
    pub fn attacker_terminated(&self) -> bool {
        self.attacker.as_ref().is_none_or(|a| a.terminated)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Actor {
    UserA,
    PeerA,
    Channel,
    PeerB,
    UserB,
    Attacker,
}

impl Actor {
    pub fn name(self) -> &'static str {
        match self {
            Actor::UserA => "UserA",
            Actor::PeerA => "PeerA",
            Actor::Channel => "Channel",
            Actor::PeerB => "PeerB",
            Actor::UserB => "UserB",
            Actor::Attacker => "Attacker",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Actor::UserA,
            Actor::PeerA,
            Actor::Channel,
            Actor::PeerB,
            Actor::UserB,
            Actor::Attacker,
        ]
        .into_iter()
        .find(|a| a.name() == s)
    }

    fn user(p: PeerId) -> Actor {
        match p {
            PeerId::A => Actor::UserA,
            PeerId::B => Actor::UserB,
        }
    }

    fn peer(p: PeerId) -> Actor {
        match p {
            PeerId::A => Actor::PeerA,
            PeerId::B => Actor::PeerB,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Command {
        peer: PeerId,
        cmd: UserCommand,
    },
    Internal {
        peer: PeerId,
    },
    Timeout {
        peer: PeerId,
        timer: TimerId,
    },
    Deliver {
        to: PeerId,
        msg: Message,
    },
    Flush {
        peer: PeerId,
        msg: Message,
    },
    Attack(AttackAction),
    /// Repetition of a state with no successors.
    Stutter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionLabel {
    pub actor: Actor,
    pub action: Action,
    /// Message the stepping peer put on the wire, if any.
    pub emitted: Option<Message>,
    /// Index of the outcome when the step is nondeterministic.
    pub choice: u8,
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = self.actor.name();
        match self.action {
            Action::Command { cmd, .. } => write!(f, "{who}: {}", cmd.name())?,
            Action::Internal { .. } => write!(f, "{who}: step")?,
            Action::Timeout { timer, .. } => write!(f, "{who}: timeout {}", timer.name())?,
            Action::Deliver { to, msg } => write!(f, "{who}: deliver {msg} to Peer{to:?}")?,
            Action::Flush { msg, .. } => write!(f, "{who}: send {msg}")?,
            Action::Attack(a) => write!(f, "{who}: {a}")?,
            Action::Stutter => write!(f, "(stutter)")?,
        }
        if let Some(m) = self.emitted {
            write!(f, " => {m}")?;
        }
        if self.choice > 0 {
            write!(f, " [#{}]", self.choice)?;
        }
        Ok(())
    }
}

/// Validates the configuration and returns the initial global state.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<SystemState, SystemError> {
    if cfg.peer.tsn_max == 0 && cfg.peer.tsn_enabled {
        return Err(SystemError::InvalidConfig(
            "tsn_max must be positive".into(),
        ));
    }
    if cfg.bounds.search_depth == 0 || cfg.bounds.search_depth > cfg.bounds.max_depth {
        return Err(SystemError::InvalidConfig(
            "search depth must be positive and at most the maximum depth".into(),
        ));
    }
    if let Some(spec) = &cfg.attacker {
        crate::attacker::check_vocabulary(spec.kind, &spec.vocab)
            .map_err(|e| SystemError::InvalidConfig(e.to_string()))?;
        if spec.kind == crate::attacker::AttackerModelKind::Replay && spec.replay_capacity == 0 {
            return Err(SystemError::InvalidConfig(
                "replay capacity must be positive".into(),
            ));
        }
    }
    Ok(SystemState {
        peers: [
            PeerProcess::new(PeerId::A, cfg.peer),
            PeerProcess::new(PeerId::B, cfg.peer),
        ],
        ost: [PeerState::Closed; 2],
        channel: Channel::default(),
        pending: [None; 2],
        peer_tag_known: [false; 2],
        attacker: cfg.attacker.as_ref().map(|a| a.initial_runtime()),
        ever_aborted: false,
        ever_timed_out: false,
    })
}

fn b_replaced(cfg: &ScenarioConfig, s: &SystemState) -> bool {
    match (&cfg.attacker, &s.attacker) {
        (Some(spec), Some(rt)) => spec.replaces_peer_b(rt),
        _ => false,
    }
}

/// Applies the INIT flush rule once a successor has been assembled.
fn finish(cfg: &ScenarioConfig, mut next: SystemState) -> SystemState {
    if let (Some(spec), Some(rt)) = (&cfg.attacker, next.attacker.as_mut()) {
        rt.observe(next.channel.get(spec.replay_tap));
    }
    next
}

/// Packet whose freshness is decided by the incoming packet rather than by
/// the sender's association state: replies that echo a received tag.
fn echoes_incoming_tag(incoming: ChunkType, emitted: ChunkType) -> bool {
    use ChunkType::*;
    matches!(
        (incoming, emitted),
        (Init, InitAck)
            | (InitAck, Abort)
            | (ShutdownAck, ShutdownComplete)
            | (CookieEcho, CookieAck)
            | (CookieEcho, CookieError)
    )
}

/// The peer discarded its tag: honest packets addressed to it or
/// advertising its old tag go stale, and neither side holds a current
/// peer tag any longer.
fn retire_tag(next: &mut SystemState, who: PeerId) {
    let other = who.other();
    let inbound = Channel::inbound(who) as usize;
    let outbound = Channel::outbound(who) as usize;
    if next.channel.get(Channel::inbound(who)).is_some() && next.channel.stamps[inbound].honest {
        next.channel.stamps[inbound].dst_stale = true;
    }
    if next.channel.get(Channel::outbound(who)).is_some() && next.channel.stamps[outbound].honest {
        next.channel.stamps[outbound].src_stale = true;
    }
    if let Some((_, st)) = next.pending[other.index()].as_mut() {
        st.dst_stale = true;
    }
    next.peer_tag_known = [false; 2];
}

fn apply_peer(
    s: &SystemState,
    who: PeerId,
    out: &PeerOutput,
    incoming: Option<(Direction, Message, Stamp)>,
) -> Option<SystemState> {
    let mut next = s.clone();
    next.ost = s.states();
    if let Some((dir, _, _)) = incoming {
        next.channel.set(dir, None);
    }
    let (old, new) = (s.peer(who).state, out.next.state);
    if let Some((_, m, st)) = incoming {
        let learns = match m.chunk {
            ChunkType::InitAck => new != old && new != PeerState::Closed,
            ChunkType::CookieEcho => out
                .emissions
                .iter()
                .any(|e| e.chunk == ChunkType::CookieAck),
            _ => false,
        };
        if learns {
            next.peer_tag_known[who.index()] = !st.src_stale;
        }
    }
    // Stamps reflect what the sender knew when it built the packet.
    let stamped: Vec<(Message, Stamp)> = out
        .emissions
        .iter()
        .map(|m| {
            let dst_stale = match incoming {
                Some((_, i, st)) if echoes_incoming_tag(i.chunk, m.chunk) => st.src_stale,
                _ => m.vtag != TagClass::N && !next.peer_tag_known[who.index()],
            };
            (*m, Stamp::honest(dst_stale))
        })
        .collect();
    if new == PeerState::Closed && old != PeerState::Closed {
        retire_tag(&mut next, who);
    }
    let dir = Channel::outbound(who);
    for (m, stamp) in stamped {
        if next.channel.get(dir).is_none() {
            next.channel.set_stamped(dir, Some(m), stamp);
        } else if incoming.is_some() && next.pending[who.index()].is_none() {
            next.pending[who.index()] = Some((m, stamp));
        } else {
            return None;
        }
    }
    next.peers[who.index()] = out.next;
    next.ever_aborted |= out.flags.aborted;
    next.ever_timed_out |= out.flags.timed_out;
    Some(next)
}

#[allow(clippy::too_many_arguments)]
fn push_outcomes(
    cfg: &ScenarioConfig,
    s: &SystemState,
    who: PeerId,
    actor: Actor,
    action: Action,
    event: PeerEvent,
    incoming: Option<(Direction, Message, Stamp)>,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    let Ok(outcomes) = peer_step(s.peer(who), event) else {
        return;
    };
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(next) = apply_peer(s, who, o, incoming) {
            let label = TransitionLabel {
                actor,
                action,
                emitted: o.emissions.first().copied(),
                choice: i as u8,
            };
            out.push((label, finish(cfg, next)));
        }
    }
}

fn user_moves(
    cfg: &ScenarioConfig,
    s: &SystemState,
    who: PeerId,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    for cmd in UserCommand::ALL {
        if s.peer(who).admits(cmd) {
            let action = Action::Command { peer: who, cmd };
            push_outcomes(
                cfg,
                s,
                who,
                Actor::user(who),
                action,
                PeerEvent::UserCmd(cmd),
                None,
                out,
            );
        }
    }
}

fn internal_moves(
    cfg: &ScenarioConfig,
    s: &SystemState,
    who: PeerId,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    if s.peer(who).has_internal_step() {
        let action = Action::Internal { peer: who };
        push_outcomes(
            cfg,
            s,
            who,
            Actor::peer(who),
            action,
            PeerEvent::Internal,
            None,
            out,
        );
    }
}

fn timer_moves(
    cfg: &ScenarioConfig,
    s: &SystemState,
    who: PeerId,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    for timer in TimerId::ALL {
        if s.peer(who).timers.is_active(timer) {
            let action = Action::Timeout { peer: who, timer };
            push_outcomes(
                cfg,
                s,
                who,
                Actor::peer(who),
                action,
                PeerEvent::Timeout(timer),
                None,
                out,
            );
        }
    }
}

fn flush_move(
    cfg: &ScenarioConfig,
    s: &SystemState,
    who: PeerId,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    let dir = Channel::outbound(who);
    if let (Some((msg, stamp)), None) = (s.pending[who.index()], s.channel.get(dir)) {
        let mut next = s.clone();
        next.ost = s.states();
        next.pending[who.index()] = None;
        next.channel.set_stamped(dir, Some(msg), stamp);
        let action = Action::Flush { peer: who, msg };
        let label = TransitionLabel {
            actor: Actor::peer(who),
            action,
            emitted: Some(msg),
            choice: 0,
        };
        out.push((label, finish(cfg, next)));
    }
}

fn busy_move(
    cfg: &ScenarioConfig,
    s: &SystemState,
    who: PeerId,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    if s.pending[who.index()].is_some() {
        flush_move(cfg, s, who, out);
    } else {
        internal_moves(cfg, s, who, out);
    }
}

/// TSNs advance with every transmission, so once a receiver knows its
/// peer's TSN any duplicate of an earlier packet is out of sequence. The
/// bounded TSN field cannot express that, so the replay stamp stands in.
fn is_detected_duplicate(receiver: &PeerProcess, msg: &Message, stamp: Stamp) -> bool {
    stamp.replayed
        && receiver.config.tsn_enabled
        && receiver.expected_peer_tsn.is_some()
        && crate::protocol::tsn_checked(msg.chunk)
}

fn delivery_moves(
    cfg: &ScenarioConfig,
    s: &SystemState,
    to: PeerId,
    out: &mut Vec<(TransitionLabel, SystemState)>,
) {
    let dir = Channel::inbound(to);
    if let Some(msg) = s.channel.get(dir) {
        let stamp = s.channel.stamp(dir);
        let mut seen = msg;
        // Without an association a SHUTDOWN_ACK is answered whatever its
        // tag, and the answer reflects that tag back to the sender.
        let reflected = msg.chunk == ChunkType::ShutdownAck && !s.peer(to).state.has_association();
        let stale_tag = stamp.dst_stale && !reflected && !cfg.ignore_stale_tags;
        if (stale_tag || is_detected_duplicate(s.peer(to), &msg, stamp)) && seen.vtag == TagClass::E
        {
            seen.vtag = TagClass::U;
        }
        let action = Action::Deliver { to, msg };
        let event = PeerEvent::Deliver(seen);
        push_outcomes(
            cfg,
            s,
            to,
            Actor::Channel,
            action,
            event,
            Some((dir, msg, stamp)),
            out,
        );
    }
}

/// All global successors in the documented actor order: UserA, PeerA,
/// deliveries A to B then B to A, PeerB, UserB, Attacker.
pub fn successors(cfg: &ScenarioConfig, s: &SystemState) -> Vec<(TransitionLabel, SystemState)> {
    let b_honest = !b_replaced(cfg, s);
    // A peer with a parked reply or a pending close has exactly one move.
    let free = |p: PeerId| s.pending[p.index()].is_none() && !s.peer(p).closing;
    let (a_free, b_free) = (free(PeerId::A), b_honest && free(PeerId::B));

    let mut internal_a = Vec::new();
    let mut to_a = Vec::new();
    if a_free {
        internal_moves(cfg, s, PeerId::A, &mut internal_a);
        delivery_moves(cfg, s, PeerId::A, &mut to_a);
    } else {
        busy_move(cfg, s, PeerId::A, &mut internal_a);
    }
    let mut internal_b = Vec::new();
    let mut to_b = Vec::new();
    if b_free {
        internal_moves(cfg, s, PeerId::B, &mut internal_b);
        delivery_moves(cfg, s, PeerId::B, &mut to_b);
    } else if b_honest {
        busy_move(cfg, s, PeerId::B, &mut internal_b);
    }

    let protocol_busy =
        !(internal_a.is_empty() && internal_b.is_empty() && to_a.is_empty() && to_b.is_empty());
    let timers_allowed = match cfg.timer_mode {
        TimerMode::Eager => true,
        TimerMode::Quiescent => !protocol_busy,
    };

    let mut out = Vec::new();
    if a_free {
        user_moves(cfg, s, PeerId::A, &mut out);
    }
    out.append(&mut internal_a);
    if a_free && timers_allowed {
        timer_moves(cfg, s, PeerId::A, &mut out);
    }
    out.append(&mut to_b);
    out.append(&mut to_a);
    out.append(&mut internal_b);
    if b_free {
        if timers_allowed {
            timer_moves(cfg, s, PeerId::B, &mut out);
        }
        user_moves(cfg, s, PeerId::B, &mut out);
    }
    if let (Some(spec), Some(rt)) = (&cfg.attacker, &s.attacker) {
        for (a, rt2, ch) in attacker_moves(spec, rt, &s.channel) {
            // A peer blocked on its own send cannot be handed a packet.
            if let AttackAction::Send { dir, .. } | AttackAction::Replay { dir, .. } = a {
                let to = match dir {
                    Direction::AToB => PeerId::B,
                    Direction::BToA => PeerId::A,
                };
                if s.pending[to.index()].is_some() || s.peer(to).closing {
                    continue;
                }
            }
            let mut next = s.clone();
            next.ost = s.states();
            next.channel = ch;
            next.attacker = Some(rt2);
            let label = TransitionLabel {
                actor: Actor::Attacker,
                action: Action::Attack(a),
                emitted: None,
                choice: 0,
            };
            out.push((label, finish(cfg, next)));
        }
    }
    out
}

/// Truth values of the fixed proposition vocabulary in one state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation {
    pub st: [PeerState; 2],
    pub ost: [PeerState; 2],
    pub cookie_timer_active: [bool; 2],
    pub ever_aborted: bool,
    pub ever_timed_out: bool,
    pub attacker_terminated: bool,
}

impl Valuation {
    pub fn holds(&self, atom: &Atom) -> bool {
        match *atom {
            Atom::St(i, p) => self.st[i as usize] == p,
            Atom::Ost(i, p) => self.ost[i as usize] == p,
            Atom::StEqOst(i) => self.st[i as usize] == self.ost[i as usize],
            Atom::CookieTimer(i) => self.cookie_timer_active[i as usize],
            Atom::EverAborted => self.ever_aborted,
            Atom::EverTimedOut => self.ever_timed_out,
            Atom::AttackerTerminated => self.attacker_terminated,
            Atom::Prop(_) => false,
        }
    }
}

pub fn atomic_valuation(s: &SystemState) -> Valuation {
    Valuation {
        st: s.states(),
        ost: s.ost,
        cookie_timer_active: [
            s.peers[0].timers.is_active(TimerId::Cookie),
            s.peers[1].timers.is_active(TimerId::Cookie),
        ],
        ever_aborted: s.ever_aborted,
        ever_timed_out: s.ever_timed_out,
        attacker_terminated: s.attacker_terminated(),
    }
}

/// Explicit reachable graph in breadth-first order with compact edges.
pub struct StateGraph {
    states: IndexSet<SystemState, FxBuildHasher>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    labels: Vec<TransitionLabel>,
}

impl StateGraph {
    pub fn build(cfg: &ScenarioConfig) -> Result<StateGraph, SystemError> {
        let init = initial_state(cfg)?;
        let cap = cfg.bounds.state_cap;
        let mut states: IndexSet<SystemState, FxBuildHasher> = IndexSet::default();
        states.insert(init);
        let mut offsets = vec![0u32];
        let mut targets = Vec::new();
        let mut labels = Vec::new();
        let mut i = 0usize;
        while i < states.len() {
            let s = states[i].clone();
            for (label, next) in successors(cfg, &s) {
                let (idx, _) = states.insert_full(next);
                targets.push(idx as u32);
                labels.push(label);
            }
            if states.len() > cap {
                return Err(SystemError::BoundExceeded { cap });
            }
            offsets.push(targets.len() as u32);
            i += 1;
        }
        Ok(StateGraph {
            states,
            offsets,
            targets,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn state(&self, i: u32) -> &SystemState {
        &self.states[i as usize]
    }

    pub fn index_of(&self, s: &SystemState) -> Option<u32> {
        self.states.get_index_of(s).map(|i| i as u32)
    }

    pub fn edges(&self, i: u32) -> impl Iterator<Item = (&TransitionLabel, u32)> + '_ {
        let lo = self.offsets[i as usize] as usize;
        let hi = self.offsets[i as usize + 1] as usize;
        self.labels[lo..hi]
            .iter()
            .zip(self.targets[lo..hi].iter().copied())
    }

    pub fn out_degree(&self, i: u32) -> usize {
        (self.offsets[i as usize + 1] - self.offsets[i as usize]) as usize
    }

    pub fn targets(&self, i: u32) -> &[u32] {
        let lo = self.offsets[i as usize] as usize;
        let hi = self.offsets[i as usize + 1] as usize;
        &self.targets[lo..hi]
    }

    pub fn summary(&self) -> StateGraphSummary {
        let mut seen = [false; 9];
        let mut deadlocks = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            for p in s.states() {
                seen[p.index()] = true;
            }
            if self.out_degree(i as u32) == 0 {
                deadlocks.push(i as u32);
            }
        }
        let reachable = PeerState::ALL
            .into_iter()
            .filter(|p| seen[p.index()])
            .collect();
        let unreachable = PeerState::ALL
            .into_iter()
            .filter(|p| !seen[p.index()])
            .collect();
        StateGraphSummary {
            states: self.len(),
            edges: self.edge_count(),
            deadlocks: deadlocks.len(),
            deadlock_examples: deadlocks
                .iter()
                .take(5)
                .map(|&d| self.state(d).clone())
                .collect(),
            reachable,
            unreachable,
        }
    }

    /// Shortest label path from the initial state to `target`.
    pub fn path_to(&self, target: u32) -> Vec<(TransitionLabel, u32)> {
        let n = self.len();
        let mut parent: Vec<Option<(u32, TransitionLabel)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([0u32]);
        seen[0] = true;
        while let Some(u) = q.pop_front() {
            if u == target {
                break;
            }
            for (l, v) in self.edges(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    parent[v as usize] = Some((u, *l));
                    q.push_back(v);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = target;
        while let Some((p, l)) = parent[cur as usize] {
            path.push((l, cur));
            cur = p;
        }
        path.reverse();
        path
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateGraphSummary {
    pub states: usize,
    pub edges: usize,
    pub deadlocks: usize,
    #[serde(skip)]
    pub deadlock_examples: Vec<SystemState>,
    pub reachable: Vec<PeerState>,
    pub unreachable: Vec<PeerState>,
}

/// Exhaustive exploration from the initial state.
pub fn explore(cfg: &ScenarioConfig) -> Result<StateGraphSummary, SystemError> {
    Ok(StateGraph::build(cfg)?.summary())
}
