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
    check_vocabulary, vocab_for, AttackAction, AttackerModelKind, Direction, ForbiddenTrie, Phase,
};
use sctp_verify::protocol::{validate_message, Message, TagClass};
use sctp_verify::synthesis::shrink_sequence;

fn action() -> impl Strategy<Value = AttackAction> {
    let msgs = Message::all_grammar_valid();
    (0..4usize, 0..msgs.len(), any::<bool>()).prop_map(move |(k, i, d)| {
        let msg = msgs[i];
        let dir = if d { Direction::AToB } else { Direction::BToA };
        match k {
            0 => AttackAction::Send { dir, msg },
            1 => AttackAction::Consume { dir, msg },
            2 => AttackAction::Capture { msg },
            _ => AttackAction::Replay { dir, msg },
        }
    })
}

fn walk(trie: &ForbiddenTrie, seq: &[AttackAction]) -> u32 {
    seq.iter().fold(0, |cur, a| trie.step(cur, a))
}

/// Deterministic: every model and phase is checked once, whatever `_cases`.
pub fn every_builtin_vocabulary_is_sound(_cases: u32) -> Result<(), String> {
    for kind in AttackerModelKind::ALL {
        for phase in [Phase::Establishment, Phase::Teardown, Phase::Full] {
            let v = vocab_for(kind, phase);
            check_vocabulary(kind, &v).map_err(|e| format!("{kind} {phase:?}: {e}"))?;
            for m in &v.sendable {
                let ok = validate_message(m)
                    && phase.chunks().contains(&m.chunk)
                    && match kind {
                        AttackerModelKind::OffPath => {
                            m.vtag != TagClass::E && m.itag != TagClass::E
                        }
                        AttackerModelKind::EvilServer | AttackerModelKind::OnPath => {
                            m.vtag != TagClass::U && m.itag != TagClass::U
                        }
                        AttackerModelKind::Replay => false,
                    };
                if !ok {
                    return Err(format!("{kind} {phase:?} may send {m}"));
                }
            }
        }
    }
    Ok(())
}

pub fn forbidden_trie_blocks_exactly_its_sequences(cases: u32) -> Result<(), String> {
    let strategy = (
        proptest::collection::vec(proptest::collection::vec(action(), 0..5), 0..6),
        proptest::collection::vec(action(), 0..5),
    );
    check(cases, strategy, |(inserted, probe)| {
        let mut trie = ForbiddenTrie::new();
        for seq in &inserted {
            trie.insert(seq);
        }
        for seq in &inserted {
            prop_assert!(trie.is_terminal(walk(&trie, seq)));
        }
        prop_assert_eq!(
            trie.is_terminal(walk(&trie, &probe)),
            inserted.contains(&probe)
        );
        Ok(())
    })
}

pub fn shrinking_is_one_minimal(cases: u32) -> Result<(), String> {
    let strategy = (
        proptest::collection::vec(0..6u8, 0..12),
        proptest::collection::vec(0..6u8, 0..4),
        any::<u64>(),
        any::<bool>(),
    );
    check(cases, strategy, |(items, needles, salt, monotone)| {
        // Either "contains `needles` as a subsequence", or an arbitrary
        // predicate that happens to accept the full input.
        let mut items = items;
        let mut at = 0;
        for n in &needles {
            at = (at + usize::from(*n)).min(items.len());
            items.insert(at, *n);
            at += 1;
        }
        let full = items.clone();
        let keep = |c: &[u8]| -> bool {
            if monotone {
                let mut it = c.iter();
                needles.iter().all(|n| it.any(|x| x == n))
            } else {
                let h = c.iter().fold(salt, |h, &x| {
                    h.rotate_left(5) ^ u64::from(x).wrapping_mul(0x9E37_79B9)
                });
                c == full.as_slice() || h % 3 == 0
            }
        };
        let out = shrink_sequence(&items, keep);
        prop_assert!(keep(&out));
        let mut it = items.iter();
        prop_assert!(
            out.iter().all(|x| it.any(|y| y == x)),
            "result is not a subsequence"
        );
        for i in 0..out.len() {
            let mut cand = out.clone();
            cand.remove(i);
            prop_assert!(
                !keep(&cand),
                "dropping index {i} of {out:?} is still accepted"
            );
        }
        Ok(())
    })
}
