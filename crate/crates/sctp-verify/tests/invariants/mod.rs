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

//! Randomized invariants shared by the per-module suites and the acceptance
//! run. Each check takes a case count and reports the first failure.

#![allow(dead_code)]

pub mod attacker;
pub mod ltl;
pub mod protocol;
pub mod system;

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use std::fmt::Debug;

/// Cases per invariant in the regular suites.
pub const CASES: u32 = 10_000;

pub type Check = fn(u32) -> Result<(), String>;

/// Runs `test` on `cases` inputs drawn from `strategy`.
pub fn check<S>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// Every invariant with its name, for reporting.
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("grammar closure", protocol::emissions_are_grammar_valid),
        (
            "tag discipline",
            protocol::honest_tags_follow_the_discipline,
        ),
        ("timer coupling", protocol::timers_stay_coupled_to_state),
        (
            "OOTB INIT handling",
            protocol::ootb_init_handling_depends_only_on_the_patch,
        ),
        (
            "unknown vtag drop",
            protocol::unknown_vtags_are_silently_dropped,
        ),
        (
            "FIFO/lossless channel",
            system::channel_is_fifo_and_lossless,
        ),
        (
            "ost correctness",
            system::old_state_records_the_previous_state,
        ),
        ("termination absorption", system::termination_is_absorbing),
        (
            "attacker vocabulary",
            system::attacker_stays_within_its_vocabulary,
        ),
        ("system timers", system::timers_match_peer_states),
        (
            "vocabulary soundness",
            attacker::every_builtin_vocabulary_is_sound,
        ),
        (
            "forbidden-sequence trie",
            attacker::forbidden_trie_blocks_exactly_its_sequences,
        ),
        ("shrink 1-minimality", attacker::shrinking_is_one_minimal),
    ]
}
