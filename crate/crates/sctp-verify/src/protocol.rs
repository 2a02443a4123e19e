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

//! A single SCTP endpoint: message grammar, tag checks, out-of-the-blue
//! classification, unexpected-packet handling and the peer state machine.

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChunkType {
    Init,
    InitAck,
    CookieEcho,
    CookieAck,
    CookieError,
    Data,
    DataAck,
    Shutdown,
    ShutdownAck,
    ShutdownComplete,
    Abort,
}

impl ChunkType {
    pub const ALL: [ChunkType; 11] = [
        ChunkType::Init,
        ChunkType::InitAck,
        ChunkType::CookieEcho,
        ChunkType::CookieAck,
        ChunkType::CookieError,
        ChunkType::Data,
        ChunkType::DataAck,
        ChunkType::Shutdown,
        ChunkType::ShutdownAck,
        ChunkType::ShutdownComplete,
        ChunkType::Abort,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChunkType::Init => "INIT",
            ChunkType::InitAck => "INIT_ACK",
            ChunkType::CookieEcho => "COOKIE_ECHO",
            ChunkType::CookieAck => "COOKIE_ACK",
            ChunkType::CookieError => "COOKIE_ERROR",
            ChunkType::Data => "DATA",
            ChunkType::DataAck => "DATA_ACK",
            ChunkType::Shutdown => "SHUTDOWN",
            ChunkType::ShutdownAck => "SHUTDOWN_ACK",
            ChunkType::ShutdownComplete => "SHUTDOWN_COMPLETE",
            ChunkType::Abort => "ABORT",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        ChunkType::ALL.into_iter().find(|c| c.name() == s)
    }

    /// True for the two chunks that carry an initiate tag.
    pub fn carries_itag(self) -> bool {
        matches!(self, ChunkType::Init | ChunkType::InitAck)
    }
}

/// Abstract tag value, always relative to the receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TagClass {
    E,
    U,
    N,
}

impl TagClass {
    pub fn name(self) -> &'static str {
        match self {
            TagClass::E => "E",
            TagClass::U => "U",
            TagClass::N => "N",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "E" => Some(TagClass::E),
            "U" => Some(TagClass::U),
            "N" => Some(TagClass::N),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    pub chunk: ChunkType,
    pub vtag: TagClass,
    pub itag: TagClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tsn: Option<u8>,
}

impl Message {
    pub const fn new(chunk: ChunkType, vtag: TagClass, itag: TagClass) -> Self {
        Message {
            chunk,
            vtag,
            itag,
            tsn: None,
        }
    }

    pub const fn with_tsn(self, tsn: Option<u8>) -> Self {
        Message { tsn, ..self }
    }

    /// Every message the grammar admits, without a TSN.
    pub fn all_grammar_valid() -> Vec<Message> {
        let ex = [TagClass::E, TagClass::U];
        let mut out = Vec::new();
        for chunk in ChunkType::ALL {
            match chunk {
                ChunkType::Init => {
                    for i in ex {
                        out.push(Message::new(chunk, TagClass::N, i));
                    }
                }
                ChunkType::InitAck => {
                    for v in ex {
                        for i in ex {
                            out.push(Message::new(chunk, v, i));
                        }
                    }
                }
                _ => {
                    for v in ex {
                        out.push(Message::new(chunk, v, TagClass::N));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            self.chunk.name(),
            self.vtag.name(),
            self.itag.name()
        )?;
        if let Some(t) = self.tsn {
            write!(f, ",tsn={t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PeerState {
    Closed,
    CookieWait,
    CookieWaitIntermediary,
    CookieEchoed,
    Established,
    ShutdownPending,
    ShutdownSent,
    ShutdownReceived,
    ShutdownAckSent,
}

impl PeerState {
    pub const ALL: [PeerState; 9] = [
        PeerState::Closed,
        PeerState::CookieWait,
        PeerState::CookieWaitIntermediary,
        PeerState::CookieEchoed,
        PeerState::Established,
        PeerState::ShutdownPending,
        PeerState::ShutdownSent,
        PeerState::ShutdownReceived,
        PeerState::ShutdownAckSent,
    ];

    /// Name used in property formulas.
    pub fn ltl_name(self) -> &'static str {
        match self {
            PeerState::Closed => "Closed",
            PeerState::CookieWait => "CookieWait",
            PeerState::CookieWaitIntermediary => "IntermediaryCookieWait",
            PeerState::CookieEchoed => "CookieEchoed",
            PeerState::Established => "Established",
            PeerState::ShutdownPending => "ShutdownPending",
            PeerState::ShutdownSent => "ShutdownSent",
            PeerState::ShutdownReceived => "ShutdownReceived",
            PeerState::ShutdownAckSent => "ShutdownAckSent",
        }
    }

    pub fn from_ltl_name(s: &str) -> Option<Self> {
        PeerState::ALL.into_iter().find(|p| p.ltl_name() == s)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// States that own an association vtag the CVE response can use.
    pub fn has_association(self) -> bool {
        matches!(
            self,
            PeerState::Established
                | PeerState::ShutdownPending
                | PeerState::ShutdownSent
                | PeerState::ShutdownReceived
                | PeerState::ShutdownAckSent
        )
    }

    /// States where the endpoint is still forming an association.
    pub fn is_forming(self) -> bool {
        matches!(
            self,
            PeerState::CookieWait | PeerState::CookieWaitIntermediary | PeerState::CookieEchoed
        )
    }
}

impl fmt::Display for PeerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ltl_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TimerStatus {
    Active,
    Inactive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TimerId {
    Init,
    Cookie,
    Shutdown,
}

impl TimerId {
    pub const ALL: [TimerId; 3] = [TimerId::Init, TimerId::Cookie, TimerId::Shutdown];

    pub fn name(self) -> &'static str {
        match self {
            TimerId::Init => "T1_INIT",
            TimerId::Cookie => "T1_COOKIE",
            TimerId::Shutdown => "T2_SHUTDOWN",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        TimerId::ALL.into_iter().find(|t| t.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimerBank {
    pub init_timer: TimerStatus,
    pub cookie_timer: TimerStatus,
    pub shutdown_timer: TimerStatus,
    pub cookie_retries_left: u8,
}

impl TimerBank {
    pub const IDLE: TimerBank = TimerBank {
        init_timer: TimerStatus::Inactive,
        cookie_timer: TimerStatus::Inactive,
        shutdown_timer: TimerStatus::Inactive,
        cookie_retries_left: 0,
    };

    pub fn status(&self, id: TimerId) -> TimerStatus {
        match id {
            TimerId::Init => self.init_timer,
            TimerId::Cookie => self.cookie_timer,
            TimerId::Shutdown => self.shutdown_timer,
        }
    }

    pub fn is_active(&self, id: TimerId) -> bool {
        self.status(id) == TimerStatus::Active
    }

    /// Checks the coupling between timers and the owning peer's state.
    pub fn consistent_with(&self, state: PeerState) -> bool {
        let cookie_ok = self.is_active(TimerId::Cookie) == (state == PeerState::CookieEchoed);
        let init_ok = !self.is_active(TimerId::Init) || state == PeerState::CookieWait;
        let shut_ok = !self.is_active(TimerId::Shutdown)
            || matches!(state, PeerState::ShutdownPending | PeerState::ShutdownSent);
        let closed_ok = state != PeerState::Closed || *self == TimerBank::IDLE;
        cookie_ok && init_ok && shut_ok && closed_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeerConfig {
    pub patch_enabled: bool,
    pub misinterpret_521: bool,
    pub tsn_enabled: bool,
    pub cookie_max_retries: u8,
    pub tsn_max: u8,
    pub abort_scope: AbortScope,
}

/// States in which the user may issue ABORT.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum AbortScope {
    /// ESTABLISHED only.
    #[default]
    Established,
    /// ESTABLISHED and the teardown states.
    Association,
    /// Any state other than CLOSED.
    Open,
}

impl Default for PeerConfig {
    fn default() -> Self {
        PeerConfig {
            patch_enabled: false,
            misinterpret_521: false,
            tsn_enabled: false,
            cookie_max_retries: 2,
            tsn_max: 2,
            abort_scope: AbortScope::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PeerId {
    A,
    B,
}

impl PeerId {
    pub fn index(self) -> usize {
        match self {
            PeerId::A => 0,
            PeerId::B => 1,
        }
    }

    pub fn other(self) -> PeerId {
        match self {
            PeerId::A => PeerId::B,
            PeerId::B => PeerId::A,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeerProcess {
    pub id: PeerId,
    pub state: PeerState,
    pub timers: TimerBank,
    pub config: PeerConfig,
    /// TSN this endpoint proposed for its current or most recent association.
    pub local_tsn: Option<u8>,
    /// TSN learned from the other endpoint during the handshake.
    pub expected_peer_tsn: Option<u8>,
    /// Answered an out-of-the-blue INIT with an ABORT and still has to
    /// close. The close is the peer's only enabled step.
    pub closing: bool,
}

impl PeerProcess {
    pub fn new(id: PeerId, config: PeerConfig) -> Self {
        PeerProcess {
            id,
            state: PeerState::Closed,
            timers: TimerBank::IDLE,
            config,
            local_tsn: None,
            expected_peer_tsn: None,
            closing: false,
        }
    }

    /// Whether a user command is offered in the current state.
    pub fn admits(&self, cmd: UserCommand) -> bool {
        if self.closing {
            return false;
        }
        match cmd {
            UserCommand::Associate => self.state == PeerState::Closed,
            UserCommand::Shutdown => self.state == PeerState::Established,
            UserCommand::Abort => match self.config.abort_scope {
                AbortScope::Established => self.state == PeerState::Established,
                AbortScope::Association => self.state.has_association(),
                AbortScope::Open => self.state != PeerState::Closed,
            },
        }
    }

    /// Whether the peer owes a spontaneous emission in its current state.
    pub fn has_internal_step(&self) -> bool {
        self.closing
            || matches!(
                self.state,
                PeerState::CookieWaitIntermediary
                    | PeerState::ShutdownPending
                    | PeerState::ShutdownReceived
            )
    }

    fn next_tsn(&self) -> Option<u8> {
        if !self.config.tsn_enabled {
            return None;
        }
        Some(match self.local_tsn {
            None => 0,
            Some(t) => t.saturating_add(1).min(self.config.tsn_max),
        })
    }

    fn stamp(&self, msg: Message) -> Message {
        if self.config.tsn_enabled && msg.tsn.is_none() {
            msg.with_tsn(self.local_tsn)
        } else {
            msg
        }
    }

    fn goto(&self, state: PeerState) -> PeerProcess {
        let mut next = *self;
        next.state = state;
        next.timers = TimerBank::IDLE;
        next.closing = false;
        match state {
            PeerState::Closed => {
                next.expected_peer_tsn = None;
            }
            PeerState::CookieWait => next.timers.init_timer = TimerStatus::Active,
            PeerState::CookieEchoed => {
                next.timers.cookie_timer = TimerStatus::Active;
                next.timers.cookie_retries_left = self.config.cookie_max_retries;
            }
            PeerState::ShutdownSent => next.timers.shutdown_timer = TimerStatus::Active,
            _ => {}
        }
        next
    }
}

/// Whether a chunk is checked against the peer's learned TSN. An INIT
/// proposes a new one and so is exempt.
pub fn tsn_checked(chunk: ChunkType) -> bool {
    chunk != ChunkType::Init
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UserCommand {
    Associate,
    Abort,
    Shutdown,
}

impl UserCommand {
    pub const ALL: [UserCommand; 3] = [
        UserCommand::Associate,
        UserCommand::Shutdown,
        UserCommand::Abort,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UserCommand::Associate => "ASSOCIATE",
            UserCommand::Abort => "ABORT",
            UserCommand::Shutdown => "SHUTDOWN",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        UserCommand::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PeerEvent {
    Deliver(Message),
    UserCmd(UserCommand),
    Timeout(TimerId),
    /// Spontaneous emission owed by the intermediary and pending states.
    Internal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutputFlags {
    /// A user-issued abort.
    pub aborted: bool,
    /// A timer gave up and closed the association.
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeerOutput {
    pub next: PeerProcess,
    pub emissions: SmallVec<[Message; 2]>,
    pub flags: OutputFlags,
}

impl PeerOutput {
    pub fn new_state(&self) -> PeerState {
        self.next.state
    }

    fn stay(peer: &PeerProcess) -> Self {
        PeerOutput {
            next: *peer,
            emissions: SmallVec::new(),
            flags: OutputFlags::default(),
        }
    }

    /// Emits `msg` stamped with the sender's current TSN when TSNs are on.
    fn emit(next: PeerProcess, msg: Message) -> Self {
        let msg = next.stamp(msg);
        PeerOutput {
            next,
            emissions: smallvec![msg],
            flags: OutputFlags::default(),
        }
    }
}

pub type Outcomes = SmallVec<[PeerOutput; 3]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OotbVerdict {
    NotOotb,
    Discard,
    RespondAbortWithAssocVtag,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("event {event:?} is not admissible in state {state}")]
    IllegalEvent { state: PeerState, event: PeerEvent },
}

const fn msg(chunk: ChunkType, vtag: TagClass, itag: TagClass) -> Message {
    Message::new(chunk, vtag, itag)
}

/// Grammar check, plus the TSN bound when a TSN is present.
pub fn validate_message(m: &Message) -> bool {
    validate_message_with(m, PeerConfig::default().tsn_max)
}

pub fn validate_message_with(m: &Message, tsn_max: u8) -> bool {
    use TagClass::*;
    let ex = |t: TagClass| matches!(t, E | U);
    let shape = match m.chunk {
        ChunkType::Init => m.vtag == N && ex(m.itag),
        ChunkType::InitAck => ex(m.vtag) && ex(m.itag),
        _ => ex(m.vtag) && m.itag == N,
    };
    shape && m.tsn.is_none_or(|t| t <= tsn_max)
}

/// Out-of-the-blue rules 2 to 5. Rule 1 (non-unicast) does not apply to a
/// unicast-only model.
pub fn classify_ootb(peer: &PeerProcess, m: &Message) -> OotbVerdict {
    use TagClass::*;
    match m.chunk {
        ChunkType::Init => {
            if m.itag == U && peer.state.has_association() {
                if peer.config.patch_enabled {
                    OotbVerdict::Discard
                } else {
                    OotbVerdict::RespondAbortWithAssocVtag
                }
            } else if m.itag == U && peer.state == PeerState::Closed {
                OotbVerdict::Discard
            } else {
                OotbVerdict::NotOotb
            }
        }
        ChunkType::InitAck if m.vtag == U || m.itag == U => OotbVerdict::Discard,
        _ if m.vtag == U => OotbVerdict::Discard,
        _ => OotbVerdict::NotOotb,
    }
}

/// Unexpected-packet handling. Returns every admissible outcome; only the
/// cookie freshness branch is nondeterministic (expired first, then fresh).
pub fn handle_unexpected(peer: &PeerProcess, m: &Message) -> Outcomes {
    use TagClass::*;
    match m.chunk {
        ChunkType::Init => {
            if peer.state == PeerState::ShutdownAckSent {
                // Shutdown still in progress: repeat the SHUTDOWN_ACK instead.
                return smallvec![PeerOutput::emit(*peer, msg(ChunkType::ShutdownAck, E, N))];
            }
            let vtag = if peer.config.misinterpret_521 && peer.state.is_forming() {
                E
            } else {
                m.itag
            };
            let reply = peer.stamp(msg(ChunkType::InitAck, vtag, E));
            smallvec![PeerOutput::emit(*peer, reply)]
        }
        ChunkType::CookieEcho => {
            let expired = PeerOutput::emit(*peer, msg(ChunkType::CookieError, E, N));
            let fresh = if peer.state == PeerState::ShutdownAckSent {
                PeerOutput::emit(*peer, msg(ChunkType::ShutdownAck, E, N))
            } else {
                // The cookie carries the TSN this peer already advertised.
                let mut next = peer.goto(PeerState::Established);
                if peer.config.tsn_enabled {
                    next.expected_peer_tsn = m.tsn;
                }
                PeerOutput::emit(next, msg(ChunkType::CookieAck, E, N))
            };
            smallvec![expired, fresh]
        }
        ChunkType::ShutdownAck => {
            smallvec![PeerOutput::emit(
                *peer,
                msg(ChunkType::ShutdownComplete, m.vtag, N)
            )]
        }
        _ => smallvec![PeerOutput::stay(peer)],
    }
}

/// The complete transition function. Nondeterministic events return every
/// admissible outcome in a fixed order.
pub fn peer_step(peer: &PeerProcess, event: PeerEvent) -> Result<Outcomes, ProtocolError> {
    use PeerState::*;
    use TagClass::*;
    let illegal = || ProtocolError::IllegalEvent {
        state: peer.state,
        event,
    };
    if peer.closing {
        return match event {
            PeerEvent::Internal => Ok(smallvec![PeerOutput::stay(&peer.goto(Closed))]),
            _ => Err(illegal()),
        };
    }
    match event {
        PeerEvent::UserCmd(cmd) => {
            if !peer.admits(cmd) {
                return Err(illegal());
            }
            Ok(match cmd {
                UserCommand::Associate => {
                    let mut next = peer.goto(CookieWait);
                    next.local_tsn = peer.next_tsn();
                    let init = next.stamp(msg(ChunkType::Init, N, E));
                    smallvec![PeerOutput::emit(next, init)]
                }
                UserCommand::Shutdown => smallvec![PeerOutput::stay(&peer.goto(ShutdownPending))],
                UserCommand::Abort => {
                    let abort = peer.stamp(msg(ChunkType::Abort, E, N));
                    let mut out = PeerOutput::emit(peer.goto(Closed), abort);
                    out.flags.aborted = true;
                    smallvec![out]
                }
            })
        }
        PeerEvent::Internal => Ok(match peer.state {
            CookieWaitIntermediary => {
                let echo = peer.stamp(msg(ChunkType::CookieEcho, E, N));
                smallvec![PeerOutput::emit(peer.goto(CookieEchoed), echo)]
            }
            ShutdownPending => {
                smallvec![PeerOutput::emit(
                    peer.goto(ShutdownSent),
                    msg(ChunkType::Shutdown, E, N)
                )]
            }
            ShutdownReceived => smallvec![PeerOutput::emit(
                peer.goto(ShutdownAckSent),
                msg(ChunkType::ShutdownAck, E, N)
            )],
            _ => return Err(illegal()),
        }),
        PeerEvent::Timeout(id) => {
            if !peer.timers.is_active(id) {
                return Err(illegal());
            }
            let mut give_up = PeerOutput::stay(&peer.goto(Closed));
            give_up.flags.timed_out = true;
            Ok(match id {
                TimerId::Init => {
                    let mut next = *peer;
                    next.timers.init_timer = TimerStatus::Inactive;
                    let init = peer.stamp(msg(ChunkType::Init, N, E));
                    smallvec![PeerOutput::emit(next, init), give_up]
                }
                TimerId::Cookie => {
                    if peer.timers.cookie_retries_left > 0 {
                        let mut next = *peer;
                        next.timers.cookie_retries_left -= 1;
                        let echo = peer.stamp(msg(ChunkType::CookieEcho, E, N));
                        smallvec![PeerOutput::emit(next, echo)]
                    } else {
                        smallvec![give_up]
                    }
                }
                TimerId::Shutdown => {
                    let mut next = *peer;
                    next.timers.shutdown_timer = TimerStatus::Inactive;
                    smallvec![
                        PeerOutput::emit(next, msg(ChunkType::Shutdown, E, N)),
                        give_up
                    ]
                }
            })
        }
        PeerEvent::Deliver(m) => {
            if !validate_message_with(&m, peer.config.tsn_max) {
                return Err(illegal());
            }
            Ok(deliver(peer, &m))
        }
    }
}

/// Same as [`peer_step`]; named for the explorer's use.
pub fn successors_of_peer(peer: &PeerProcess, event: PeerEvent) -> Result<Outcomes, ProtocolError> {
    peer_step(peer, event)
}

fn stale_tsn(peer: &PeerProcess, m: &Message) -> bool {
    peer.config.tsn_enabled
        && tsn_checked(m.chunk)
        && matches!((peer.expected_peer_tsn, m.tsn), (Some(want), Some(got)) if want != got)
}

fn deliver(peer: &PeerProcess, m: &Message) -> Outcomes {
    use ChunkType as C;
    use PeerState::*;
    use TagClass::*;
    match classify_ootb(peer, m) {
        OotbVerdict::Discard => return smallvec![PeerOutput::stay(peer)],
        OotbVerdict::RespondAbortWithAssocVtag => {
            let abort = peer.stamp(msg(C::Abort, E, N));
            let mut next = *peer;
            next.closing = true;
            return smallvec![PeerOutput::emit(next, abort)];
        }
        OotbVerdict::NotOotb => {}
    }
    if stale_tsn(peer, m) {
        return smallvec![PeerOutput::stay(peer)];
    }
    if m.chunk == C::Abort {
        if peer.state == Closed {
            return smallvec![PeerOutput::stay(peer)];
        }
        return smallvec![PeerOutput::stay(&peer.goto(Closed))];
    }
    let expected: Option<Outcomes> = match (peer.state, m.chunk) {
        (Closed, C::Init) => {
            let mut reply = msg(C::InitAck, E, E);
            if peer.config.tsn_enabled {
                reply.tsn = peer.next_tsn();
            }
            Some(smallvec![PeerOutput::emit(*peer, reply)])
        }
        (Closed, C::CookieEcho) => {
            let mut next = peer.goto(Established);
            if peer.config.tsn_enabled {
                next.local_tsn = peer.next_tsn();
                next.expected_peer_tsn = m.tsn;
            }
            Some(smallvec![PeerOutput::emit(next, msg(C::CookieAck, E, N))])
        }
        // An INIT_ACK with no association behind it is answered with an
        // ABORT that reflects its verification tag.
        (Closed, C::InitAck) => Some(smallvec![PeerOutput::emit(*peer, msg(C::Abort, m.vtag, N))]),
        (CookieWait, C::InitAck) => {
            let mut next = peer.goto(CookieWaitIntermediary);
            next.expected_peer_tsn = m.tsn;
            Some(smallvec![PeerOutput::stay(&next)])
        }
        (CookieEchoed, C::CookieAck) => Some(smallvec![PeerOutput::stay(&peer.goto(Established))]),
        (CookieEchoed, C::CookieError) => {
            let init = peer.stamp(msg(C::Init, N, E));
            let mut back = peer.goto(CookieWait);
            back.expected_peer_tsn = None;
            Some(smallvec![
                PeerOutput::stay(peer),
                PeerOutput::emit(*peer, init),
                PeerOutput::emit(back, init),
            ])
        }
        (Established, C::Shutdown) => {
            Some(smallvec![PeerOutput::stay(&peer.goto(ShutdownReceived))])
        }
        (ShutdownSent, C::ShutdownAck) => Some(smallvec![PeerOutput::emit(
            peer.goto(Closed),
            msg(C::ShutdownComplete, E, N)
        )]),
        (ShutdownSent, C::Shutdown) => Some(smallvec![PeerOutput::emit(
            peer.goto(ShutdownAckSent),
            msg(C::ShutdownAck, E, N)
        )]),
        (ShutdownAckSent, C::ShutdownComplete) => {
            Some(smallvec![PeerOutput::stay(&peer.goto(Closed))])
        }
        (ShutdownAckSent, C::ShutdownAck) => Some(smallvec![PeerOutput::emit(
            peer.goto(Closed),
            msg(C::ShutdownComplete, E, N)
        )]),
        _ => None,
    };
    expected.unwrap_or_else(|| handle_unexpected(peer, m))
}
