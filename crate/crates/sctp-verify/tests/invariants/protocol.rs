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
use sctp_verify::protocol::{
    classify_ootb, peer_step, validate_message_with, AbortScope, ChunkType, Message, OotbVerdict,
    PeerConfig, PeerEvent, PeerId, PeerProcess, PeerState, TagClass, TimerBank, TimerId,
    TimerStatus, UserCommand,
};

fn config() -> impl Strategy<Value = PeerConfig> {
    (any::<bool>(), any::<bool>(), any::<bool>(), 0..3usize).prop_map(|(patch, mis, tsn, scope)| {
        PeerConfig {
            patch_enabled: patch,
            misinterpret_521: mis,
            tsn_enabled: tsn,
            abort_scope: [
                AbortScope::Established,
                AbortScope::Association,
                AbortScope::Open,
            ][scope],
            ..PeerConfig::default()
        }
    })
}

fn timers_for(state: PeerState, retries: u8) -> TimerBank {
    let mut t = TimerBank::IDLE;
    match state {
        PeerState::CookieWait => t.init_timer = TimerStatus::Active,
        PeerState::CookieEchoed => {
            t.cookie_timer = TimerStatus::Active;
            t.cookie_retries_left = retries;
        }
        PeerState::ShutdownSent => t.shutdown_timer = TimerStatus::Active,
        _ => {}
    }
    t
}

/// A peer in an arbitrary state with consistent timers.
fn peer() -> impl Strategy<Value = PeerProcess> {
    (
        config(),
        0..9usize,
        0..3u8,
        proptest::option::of(0..4u8),
        proptest::option::of(0..4u8),
    )
        .prop_map(|(cfg, st, retries, local, expected)| {
            let state = PeerState::ALL[st];
            let mut p = PeerProcess::new(PeerId::A, cfg);
            p.state = state;
            p.timers = timers_for(state, retries.min(cfg.cookie_max_retries));
            if cfg.tsn_enabled && state != PeerState::Closed {
                p.local_tsn = local.map(|t| t.min(cfg.tsn_max));
                p.expected_peer_tsn = expected.map(|t| t.min(cfg.tsn_max));
            }
            p
        })
}

fn message(tsn_max: u8) -> impl Strategy<Value = Message> {
    let all = Message::all_grammar_valid();
    (0..all.len(), proptest::option::of(0..=tsn_max)).prop_map(move |(i, t)| all[i].with_tsn(t))
}

fn unknown_vtag_message() -> impl Strategy<Value = Message> {
    let all: Vec<Message> = Message::all_grammar_valid()
        .into_iter()
        .filter(|m| m.chunk != ChunkType::Init && m.vtag == TagClass::U)
        .collect();
    (
        0..all.len(),
        proptest::option::of(0..=PeerConfig::default().tsn_max),
    )
        .prop_map(move |(i, t)| all[i].with_tsn(t))
}

fn event() -> impl Strategy<Value = PeerEvent> {
    prop_oneof![
        4 => message(PeerConfig::default().tsn_max).prop_map(PeerEvent::Deliver),
        1 => (0..3usize).prop_map(|i| PeerEvent::UserCmd(UserCommand::ALL[i])),
        1 => (0..3usize).prop_map(|i| PeerEvent::Timeout(TimerId::ALL[i])),
        1 => Just(PeerEvent::Internal),
    ]
}

fn has_u(m: &Message) -> bool {
    m.vtag == TagClass::U || m.itag == TagClass::U
}

pub fn emissions_are_grammar_valid(cases: u32) -> Result<(), String> {
    check(cases, (peer(), event()), |(p, ev)| {
        if let Ok(outs) = peer_step(&p, ev) {
            for o in &outs {
                for m in &o.emissions {
                    prop_assert!(
                        validate_message_with(m, p.config.tsn_max),
                        "{m} from {:?} on {ev:?}",
                        p.state
                    );
                }
            }
        }
        Ok(())
    })
}

pub fn honest_tags_follow_the_discipline(cases: u32) -> Result<(), String> {
    check(cases, (peer(), event()), |(p, ev)| {
        let input_u = matches!(ev, PeerEvent::Deliver(m) if has_u(&m));
        if let Ok(outs) = peer_step(&p, ev) {
            for o in &outs {
                for m in &o.emissions {
                    prop_assert_ne!(m.itag, TagClass::U);
                    prop_assert_eq!(m.chunk == ChunkType::Init, m.vtag == TagClass::N);
                    if m.vtag == TagClass::U {
                        prop_assert!(input_u, "{m} invents an unknown tag");
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn timers_stay_coupled_to_state(cases: u32) -> Result<(), String> {
    check(cases, (peer(), event()), |(p, ev)| {
        if let Ok(outs) = peer_step(&p, ev) {
            for o in &outs {
                prop_assert!(o.next.timers.consistent_with(o.next.state), "{:?}", o.next);
            }
        }
        Ok(())
    })
}

pub fn ootb_init_handling_depends_only_on_the_patch(cases: u32) -> Result<(), String> {
    check(cases, (peer(), 0..2usize), |(p, v)| {
        let itag = [TagClass::E, TagClass::U][v];
        let init = Message::new(ChunkType::Init, TagClass::N, itag);
        let verdict = classify_ootb(&p, &init);
        let expected = if itag == TagClass::U && p.state.has_association() {
            if p.config.patch_enabled {
                OotbVerdict::Discard
            } else {
                OotbVerdict::RespondAbortWithAssocVtag
            }
        } else if itag == TagClass::U && p.state == PeerState::Closed {
            OotbVerdict::Discard
        } else {
            OotbVerdict::NotOotb
        };
        prop_assert_eq!(verdict, expected);
        if let Ok(outs) = peer_step(&p, PeerEvent::Deliver(init)) {
            let aborts = outs
                .iter()
                .flat_map(|o| o.emissions.iter())
                .any(|m| m.chunk == ChunkType::Abort);
            if p.config.patch_enabled && itag == TagClass::U {
                prop_assert!(!aborts);
            }
        }
        Ok(())
    })
}

pub fn unknown_vtags_are_silently_dropped(cases: u32) -> Result<(), String> {
    check(cases, (peer(), unknown_vtag_message()), |(p, m)| {
        let outs = peer_step(&p, PeerEvent::Deliver(m)).expect("deliveries are always admissible");
        for o in &outs {
            prop_assert!(o.emissions.is_empty());
            prop_assert_eq!(o.next.state, p.state);
        }
        Ok(())
    })
}
