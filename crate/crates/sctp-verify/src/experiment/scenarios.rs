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

//! The CVE reproduction and the guided tag-ambiguity schedule.

use super::matrix::{row_config, trace_config};
use super::trace::{Trace, TraceConfig};
use super::{ExperimentConfig, ExperimentError};
use crate::attacker::{build_daisy, vocab_for, AttackAction, AttackerModelKind, Direction, Phase};
use crate::ltl::builtin_property;
use crate::protocol::{ChunkType, Message, PeerConfig, PeerId, PeerState, TagClass, UserCommand};
use crate::synthesis::{attack_witness, shrink_attack, synthesize, validate_attack};
use crate::system::{initial_state, successors, Action, Actor, ScenarioConfig, TransitionLabel};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CveOutcome {
    Attack {
        phase: Phase,
        actions: Vec<AttackAction>,
        shrunk: Vec<AttackAction>,
        validated: bool,
        /// Peer A answered the injected INIT with an ABORT carrying the
        /// association vtag.
        victim_abort: bool,
        trace: Trace,
    },
    /// Certificate that the search space holds no attack.
    NoAttack {
        exhausted: bool,
        states_explored: usize,
    },
}

fn victim_aborts(labels: &[TransitionLabel]) -> bool {
    labels.iter().any(|l| {
        matches!(l.action, Action::Deliver { to: PeerId::A, msg } if msg.chunk == ChunkType::Init)
            && l.emitted
                .is_some_and(|m| m.chunk == ChunkType::Abort && m.vtag == TagClass::E)
    })
}

/// Searches the off-path cell of the half-open property. Without the patch
/// an attack is required; with it, the result is a no-attack certificate.
pub fn reproduce_cve(cfg: &ExperimentConfig, patch: bool) -> Result<CveOutcome, ExperimentError> {
    let prop = builtin_property("phi9").expect("built-in property");
    let mut exhausted = true;
    let mut states_explored = 0;
    for phase in [Phase::Establishment, Phase::Teardown] {
        let mut s = row_config(cfg, patch, AttackerModelKind::OffPath, phase, &prop);
        s.max_attacks = 1;
        let result = synthesize(&s)?;
        states_explored += result.stats.states_explored;
        exhausted &= result.exhausted;
        if let Some(a) = result.attacks.first() {
            let shrunk = shrink_attack(&a.actions, &s);
            let witness = attack_witness(&shrunk, &s)?.unwrap_or_else(|| a.witness.clone());
            let validated = validate_attack(&a.actions, &s) && validate_attack(&shrunk, &s);
            return Ok(CveOutcome::Attack {
                phase,
                actions: a.actions.clone(),
                shrunk,
                validated,
                victim_abort: victim_aborts(&witness.labels),
                trace: Trace::from_counterexample(trace_config(&s), &witness),
            });
        }
    }
    if patch {
        Ok(CveOutcome::NoAttack {
            exhausted,
            states_explored,
        })
    } else {
        Err(ExperimentError::CveNotFound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityOutcome {
    pub trace: Trace,
    pub final_states: [PeerState; 2],
    /// Only user commands remain enabled in the final state.
    pub persistent: bool,
    pub caveat: String,
}

/// Zero-based index of the step where A answers the injected INIT.
pub const AMBIGUITY_WRONG_VTAG_STEP: usize = 4;

type Guide = (&'static str, Box<dyn Fn(&TransitionLabel) -> bool>);

fn msg(chunk: ChunkType, vtag: TagClass, itag: TagClass) -> Message {
    Message::new(chunk, vtag, itag)
}

fn deliver(
    to: PeerId,
    m: Message,
    emitted: Option<Message>,
) -> Box<dyn Fn(&TransitionLabel) -> bool> {
    Box::new(move |l| l.action == Action::Deliver { to, msg: m } && l.emitted == emitted)
}

fn guided_steps() -> Vec<Guide> {
    use ChunkType::*;
    use TagClass::{E, N, U};
    let injected = msg(Init, N, U);
    vec![
        (
            "UserA: ASSOCIATE sends INIT,N,E",
            Box::new(|l| {
                l.action
                    == Action::Command {
                        peer: PeerId::A,
                        cmd: UserCommand::Associate,
                    }
                    && l.emitted == Some(msg(Init, N, E))
            }),
        ),
        (
            "PeerB answers INIT,N,E with INIT_ACK,E,E",
            deliver(PeerId::B, msg(Init, N, E), Some(msg(InitAck, E, E))),
        ),
        (
            "PeerA accepts INIT_ACK,E,E",
            deliver(PeerId::A, msg(InitAck, E, E), None),
        ),
        (
            "Attacker injects INIT,N,U toward PeerA",
            Box::new(move |l| {
                l.action
                    == Action::Attack(AttackAction::Send {
                        dir: Direction::BToA,
                        msg: injected,
                    })
            }),
        ),
        (
            "PeerA answers INIT,N,U with INIT_ACK,E,E (its own tag as vtag)",
            deliver(PeerId::A, injected, Some(msg(InitAck, E, E))),
        ),
        (
            "Attacker terminates",
            Box::new(|l| l.action == Action::Attack(AttackAction::Terminate)),
        ),
        (
            "PeerB reflects INIT_ACK,E,E as ABORT,E,N",
            deliver(PeerId::B, msg(InitAck, E, E), Some(msg(Abort, E, N))),
        ),
        (
            "PeerA sends COOKIE_ECHO,E,N",
            Box::new(|l| {
                l.action == Action::Internal { peer: PeerId::A }
                    && l.emitted == Some(msg(CookieEcho, E, N))
            }),
        ),
        (
            "PeerA accepts ABORT,E,N",
            deliver(PeerId::A, msg(Abort, E, N), None),
        ),
        (
            "PeerB builds an association from COOKIE_ECHO,E,N",
            deliver(PeerId::B, msg(CookieEcho, E, N), Some(msg(CookieAck, E, N))),
        ),
        (
            "PeerA drops the COOKIE_ACK",
            Box::new(
                |l| matches!(l.action, Action::Deliver { to: PeerId::A, msg } if msg.chunk == CookieAck),
            ),
        ),
    ]
}

fn ambiguity_trace_config(misinterpret: bool) -> TraceConfig {
    TraceConfig {
        model: Some(AttackerModelKind::OffPath),
        property: None,
        patch: false,
        misinterpret,
        tsn: false,
        phase: Phase::Establishment,
        budget: AttackerModelKind::OffPath.default_budget(),
        replay_capacity: 0,
        replay_reemit: false,
        timer_mode: Default::default(),
        abort_scope: Default::default(),
    }
}

/// Drives the scripted schedule in which an injected INIT makes a forming
/// peer disclose its own tag. Ends with A closed and B established.
pub fn ambiguity_demo(misinterpret: bool) -> Result<AmbiguityOutcome, ExperimentError> {
    let tc = ambiguity_trace_config(misinterpret);
    let script = vec![AttackAction::Send {
        dir: Direction::BToA,
        msg: msg(ChunkType::Init, TagClass::N, TagClass::U),
    }];
    let mut spec = build_daisy(
        AttackerModelKind::OffPath,
        vocab_for(AttackerModelKind::OffPath, tc.phase),
        tc.budget,
    )?;
    spec.replay_capacity = tc.replay_capacity;
    spec.replay_reemit = tc.replay_reemit;
    let cfg = ScenarioConfig {
        peer: PeerConfig {
            misinterpret_521: misinterpret,
            ..PeerConfig::default()
        },
        attacker: Some(spec.scripted(script)),
        ..ScenarioConfig::default()
    };
    let mut state = initial_state(&cfg)?;
    let mut labels = Vec::new();
    for (step, (expected, matches)) in guided_steps().into_iter().enumerate() {
        let succ = successors(&cfg, &state);
        match succ.iter().find(|(l, _)| matches(l)) {
            Some((l, next)) => {
                labels.push(*l);
                state = next.clone();
            }
            None => {
                return Err(ExperimentError::ScheduleInfeasible {
                    step,
                    expected: expected.to_string(),
                    enabled: succ.iter().map(|(l, _)| l.to_string()).collect(),
                })
            }
        }
    }
    let persistent = state.attacker_terminated()
        && successors(&cfg, &state)
            .iter()
            .all(|(l, _)| matches!(l.actor, Actor::UserA | Actor::UserB));
    Ok(AmbiguityOutcome {
        trace: Trace::from_labels(tc, &labels, None),
        final_states: state.states(),
        persistent,
        caveat: "the half-open state lasts as long as neither user issues a command".to_string(),
    })
}
