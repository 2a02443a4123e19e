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

use super::check;
use proptest::prelude::*;
use sctp_verify::attacker::{
    build_daisy, vocab_for, AttackAction, AttackerModelKind, Direction, Phase,
};
use sctp_verify::protocol::{Message, PeerConfig, TagClass};
use sctp_verify::system::{
    initial_state, successors, Action, Actor, Channel, ScenarioConfig, SystemState, TransitionLabel,
};

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (
        0..5usize,
        0..3usize,
        1..5u8,
        any::<bool>(),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(m, ph, budget, patch, mis, tsn)| {
            let attacker = (m < 4).then(|| {
                let kind = AttackerModelKind::ALL[m];
                let phase = [Phase::Establishment, Phase::Teardown, Phase::Full][ph];
                build_daisy(kind, vocab_for(kind, phase), budget)
                    .expect("built-in vocabulary is valid")
            });
            ScenarioConfig {
                peer: PeerConfig {
                    patch_enabled: patch,
                    misinterpret_521: mis,
                    tsn_enabled: tsn || m == 2,
                    ..PeerConfig::default()
                },
                attacker,
                ..ScenarioConfig::default()
            }
        })
}

/// Follows a pseudo-random path and hands every transition to `check`.
fn walk(
    cfg: &ScenarioConfig,
    choices: &[u16],
    mut check: impl FnMut(&SystemState, &TransitionLabel, &SystemState) -> Result<(), TestCaseError>,
) -> Result<(), TestCaseError> {
    let mut s = initial_state(cfg).expect("valid scenario");
    for &c in choices {
        let succ = successors(cfg, &s);
        if succ.is_empty() {
            break;
        }
        let (label, next) = &succ[c as usize % succ.len()];
        check(&s, label, next)?;
        s = next.clone();
    }
    Ok(())
}

const DIRS: [Direction; 2] = [Direction::AToB, Direction::BToA];

/// Whether `seen` is `sent` as the receiver classifies it: identical, or
/// with a stale expected tag downgraded to unknown.
fn same_packet(sent: Message, seen: Message) -> bool {
    sent.chunk == seen.chunk
        && sent.itag == seen.itag
        && sent.tsn == seen.tsn
        && (sent.vtag == seen.vtag || (sent.vtag == TagClass::E && seen.vtag == TagClass::U))
}

pub fn channel_is_fifo_and_lossless(cases: u32) -> Result<(), String> {
    check(
        cases,
        (scenario(), proptest::collection::vec(any::<u16>(), 1..80)),
        |(cfg, path)| {
            walk(&cfg, &path, |pre, label, post| {
                if let Action::Deliver { to, msg } = label.action {
                    let dir = Channel::inbound(to);
                    let sent = pre.channel.get(dir);
                    prop_assert!(
                        sent.is_some_and(|m| same_packet(m, msg)),
                        "{label} but buffer held {sent:?}"
                    );
                    prop_assert_eq!(post.channel.get(dir), None);
                }
                for d in DIRS {
                    let Some(m) = pre.channel.get(d) else {
                        continue;
                    };
                    let taken = match label.action {
                        Action::Deliver { to, .. } => Channel::inbound(to) == d,
                        Action::Attack(AttackAction::Consume { dir, .. }) => dir == d,
                        _ => false,
                    };
                    if !taken {
                        prop_assert_eq!(
                            post.channel.get(d),
                            Some(m),
                            "{} lost or overwrote a packet",
                            label
                        );
                    }
                }
                Ok(())
            })?;
            Ok(())
        },
    )
}

pub fn old_state_records_the_previous_state(cases: u32) -> Result<(), String> {
    check(
        cases,
        (scenario(), proptest::collection::vec(any::<u16>(), 1..80)),
        |(cfg, path)| {
            walk(&cfg, &path, |pre, _, post| {
                prop_assert_eq!(post.ost, pre.states());
                Ok(())
            })?;
            Ok(())
        },
    )
}

pub fn termination_is_absorbing(cases: u32) -> Result<(), String> {
    check(
        cases,
        (scenario(), proptest::collection::vec(any::<u16>(), 1..80)),
        |(cfg, path)| {
            walk(&cfg, &path, |pre, label, post| {
                if pre.attacker_terminated() {
                    prop_assert!(post.attacker_terminated());
                    prop_assert_ne!(label.actor, Actor::Attacker);
                }
                Ok(())
            })?;
            Ok(())
        },
    )
}

pub fn attacker_stays_within_its_vocabulary(cases: u32) -> Result<(), String> {
    check(
        cases,
        (scenario(), proptest::collection::vec(any::<u16>(), 1..80)),
        |(cfg, path)| {
            let Some(spec) = cfg.attacker.clone() else {
                return Ok(());
            };
            walk(&cfg, &path, |pre, label, _| {
                let Action::Attack(a) = label.action else {
                    return Ok(());
                };
                match a {
                    AttackAction::Send { msg, .. } => {
                        prop_assert!(
                            spec.vocab.sendable.contains(&msg.with_tsn(None)),
                            "{a} outside the vocabulary"
                        );
                        if spec.kind == AttackerModelKind::OffPath {
                            prop_assert!(
                                msg.vtag != TagClass::E && msg.itag != TagClass::E,
                                "off-path sent {msg}"
                            );
                        }
                    }
                    AttackAction::Consume { dir, msg } => {
                        prop_assert_eq!(pre.channel.get(dir), Some(msg))
                    }
                    AttackAction::Capture { msg } => {
                        prop_assert_eq!(pre.channel.get(spec.replay_tap), Some(msg))
                    }
                    AttackAction::Replay { msg, .. } => {
                        let rt = pre.attacker.as_ref().expect("attacker runtime");
                        prop_assert!(
                            rt.memory.contains(&msg),
                            "replayed {msg} that was never captured"
                        );
                    }
                    AttackAction::Forget { .. } | AttackAction::Terminate => {}
                }
                if spec.kind == AttackerModelKind::Replay {
                    prop_assert!(
                        !matches!(a, AttackAction::Send { .. }),
                        "replay attacker forged {a}"
                    );
                }
                Ok(())
            })?;
            Ok(())
        },
    )
}

pub fn timers_match_peer_states(cases: u32) -> Result<(), String> {
    check(
        cases,
        (scenario(), proptest::collection::vec(any::<u16>(), 1..80)),
        |(cfg, path)| {
            walk(&cfg, &path, |_, _, post| {
                for p in &post.peers {
                    prop_assert!(p.timers.consistent_with(p.state), "{:?}", p);
                }
                Ok(())
            })?;
            Ok(())
        },
    )
}
