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

mod invariants;

use invariants::{protocol, CASES};

#[test]
fn emissions_are_grammar_valid() {
    protocol::emissions_are_grammar_valid(CASES).unwrap();
}

#[test]
fn honest_tags_follow_the_discipline() {
    protocol::honest_tags_follow_the_discipline(CASES).unwrap();
}

#[test]
fn timers_stay_coupled_to_state() {
    protocol::timers_stay_coupled_to_state(CASES).unwrap();
}

#[test]
fn ootb_init_handling_depends_only_on_the_patch() {
    protocol::ootb_init_handling_depends_only_on_the_patch(CASES).unwrap();
}

#[test]
fn unknown_vtags_are_silently_dropped() {
    protocol::unknown_vtags_are_silently_dropped(CASES).unwrap();
}
