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

use sctp_verify::attacker::{AttackAction, AttackerModelKind, Direction, Phase};
use sctp_verify::ltl::{builtin_property, check_graph, Atom, DepthBounds, Formula, Verdict};
use sctp_verify::protocol::{ChunkType, Message, TagClass};
use sctp_verify::synthesis::{
    daisy_graph, precondition_property, shrink_attack, synthesize, validate_attack,
    SynthesisConfig, SynthesisError,
};

fn off_path(property: &str, phase: Phase, patch: bool) -> SynthesisConfig {
    let p = builtin_property(property).expect("built-in property");
    let mut cfg = SynthesisConfig::new(AttackerModelKind::OffPath, p.name, p.formula);
    cfg.phase = phase;
    cfg.peer.patch_enabled = patch;
    cfg
}

fn to_a(chunk: ChunkType, vtag: TagClass, itag: TagClass) -> AttackAction {
    AttackAction::Send {
        dir: Direction::BToA,
        msg: Message::new(chunk, vtag, itag),
    }
}

fn cve_injection() -> AttackAction {
    to_a(ChunkType::Init, TagClass::N, TagClass::U)
}

/// Out-of-the-blue noise followed by the injected INIT.
fn noisy_cve_attack() -> Vec<AttackAction> {
    let ack = to_a(ChunkType::CookieAck, TagClass::U, TagClass::N);
    let echo = to_a(ChunkType::CookieEcho, TagClass::U, TagClass::N);
    let mut v = vec![ack; 3];
    v.push(echo);
    v.extend(std::iter::repeat_n(ack, 7));
    v.push(echo);
    v.push(cve_injection());
    v
}

#[test]
fn preconditioned_property_guards_on_termination() {
    let p = builtin_property("phi9").unwrap();
    let pre = precondition_property(&p.formula);
    let term = Formula::finally(Formula::atom(Atom::AttackerTerminated));
    assert_eq!(pre, Formula::implies(term, p.formula));
}

#[test]
fn vacuously_true_property_has_no_attacks() {
    let mut cfg = SynthesisConfig::new(AttackerModelKind::OffPath, "true", Formula::True);
    cfg.phase = Phase::Teardown;
    let r = synthesize(&cfg).unwrap();
    assert!(r.attacks.is_empty());
    assert!(r.exhausted);
}

#[test]
fn false_property_yields_the_empty_attack() {
    let mut cfg = SynthesisConfig::new(AttackerModelKind::OffPath, "false", Formula::False);
    cfg.phase = Phase::Teardown;
    assert_eq!(
        synthesize(&cfg),
        Err(SynthesisError::BaselineViolated("false".into()))
    );
    cfg.precheck_baseline = false;
    cfg.max_attacks = 1;
    let r = synthesize(&cfg).unwrap();
    assert_eq!(r.attacks.len(), 1);
    assert!(validate_attack(&[], &cfg));
    assert!(shrink_attack(&r.attacks[0].actions, &cfg).is_empty());
}

#[test]
fn off_path_finds_the_injected_init_without_the_patch() {
    let cfg = off_path("phi9", Phase::Establishment, false);
    let r = synthesize(&cfg).unwrap();
    let attack = r.attacks.first().expect("an attack exists");
    assert_eq!(attack.actions.last(), Some(&cve_injection()));
    assert!(validate_attack(&attack.actions, &cfg));
    assert_eq!(shrink_attack(&attack.actions, &cfg), vec![cve_injection()]);
}

#[test]
fn off_path_is_exhausted_with_the_patch() {
    for phase in [Phase::Establishment, Phase::Teardown] {
        let cfg = off_path("phi9", phase, true);
        let r = synthesize(&cfg).unwrap();
        assert!(r.attacks.is_empty(), "{phase:?}");
        assert!(r.exhausted, "{phase:?}");
        assert!(!r.stats.bound_exceeded);
    }
}

#[test]
fn exhaustion_agrees_with_an_independent_check() {
    let cfg = off_path("phi9", Phase::Teardown, false);
    let r = synthesize(&cfg).unwrap();
    assert!(r.attacks.is_empty() && r.exhausted);
    let g = daisy_graph(&cfg).unwrap().expect("within the state cap");
    let f = precondition_property(&cfg.property);
    let bounds = DepthBounds {
        initial: cfg.bounds.search_depth,
        max: cfg.bounds.max_depth,
    };
    assert_eq!(check_graph(&g, &f, bounds).unwrap(), Verdict::Holds);
}

#[test]
fn distinct_attacks_are_never_repeated() {
    let mut cfg = off_path("phi9", Phase::Establishment, false);
    cfg.max_attacks = 4;
    let r = synthesize(&cfg).unwrap();
    assert!(r.attacks.len() >= 2);
    for (i, a) in r.attacks.iter().enumerate() {
        assert!(validate_attack(&a.actions, &cfg), "attack {i} is not sound");
        for b in &r.attacks[i + 1..] {
            assert_ne!(a.actions, b.actions);
        }
    }
}

#[test]
fn hand_written_noisy_attack_validates_and_shrinks() {
    let attack = noisy_cve_attack();
    let mut cfg = off_path("phi9", Phase::Establishment, false);
    cfg.budget = attack.len() as u8;
    assert!(validate_attack(&attack, &cfg));
    assert_eq!(shrink_attack(&attack, &cfg), vec![cve_injection()]);
    assert_eq!(
        shrink_attack(&[cve_injection()], &cfg),
        vec![cve_injection()]
    );
    cfg.peer.patch_enabled = true;
    assert!(!validate_attack(&attack, &cfg));
}

#[test]
fn empty_attack_is_invalid_on_the_patched_baseline() {
    let cfg = off_path("phi9", Phase::Establishment, true);
    assert!(!validate_attack(&[], &cfg));
}

#[test]
fn replay_attacker_reemits_what_it_captured() {
    let p = builtin_property("phi2").unwrap();
    let mut cfg = SynthesisConfig::new(AttackerModelKind::Replay, p.name, p.formula);
    cfg.max_attacks = 1;
    let r = synthesize(&cfg).unwrap();
    let attack = r.attacks.first().expect("an attack exists");
    let shrunk = shrink_attack(&attack.actions, &cfg);
    assert!(validate_attack(&shrunk, &cfg));
    let captured: Vec<Message> = shrunk
        .iter()
        .filter_map(|a| match a {
            AttackAction::Capture { msg } => Some(*msg),
            _ => None,
        })
        .collect();
    assert!(shrunk
        .iter()
        .any(|a| matches!(a, AttackAction::Replay { msg, .. } if captured.contains(msg))));
}

#[test]
fn captured_abort_replay_does_not_break_progress() {
    let p = builtin_property("phi2").unwrap();
    let mut cfg = SynthesisConfig::new(AttackerModelKind::Replay, p.name, p.formula);
    cfg.budget = 2;
    let tsns = std::iter::once(None).chain((0..=cfg.peer.tsn_max).map(Some));
    for (vtag, tsn) in tsns.flat_map(|t| [(TagClass::E, t), (TagClass::U, t)]) {
        let abort = Message::new(ChunkType::Abort, vtag, TagClass::N).with_tsn(tsn);
        let script = [
            AttackAction::Capture { msg: abort },
            AttackAction::Replay {
                dir: Direction::BToA,
                msg: abort,
            },
        ];
        assert!(!validate_attack(&script, &cfg), "{abort}");
    }
}
