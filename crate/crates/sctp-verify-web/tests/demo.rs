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

use sctp_verify_web::{ambiguity, cve, render};

#[test]
fn cve_toggle_switches_between_attack_and_certificate() {
    let off = cve(false);
    assert!(off.ok);
    assert!(off.summary.contains("INIT,N,U"), "{}", off.summary);
    assert!(!off.chart.is_empty() && !off.trace.is_empty());

    let on = cve(true);
    assert!(on.ok);
    assert!(on.summary.starts_with("no attack exists"), "{}", on.summary);
    assert!(on.chart.is_empty());
}

#[test]
fn ambiguity_toggle_controls_the_schedule() {
    let on = ambiguity(true);
    assert!(on.ok && !on.chart.is_empty());
    assert!(
        on.summary.contains("A=CLOSED") || on.summary.contains("A=Closed"),
        "{}",
        on.summary
    );
    let off = ambiguity(false);
    assert!(off.ok && off.chart.is_empty());
    assert!(off.summary.contains("blocked at step 5"), "{}", off.summary);
}

#[test]
fn render_round_trips_demo_traces_and_rejects_garbage() {
    let demo = ambiguity(true);
    let rendered = render(&demo.trace);
    assert!(rendered.ok);
    assert_eq!(rendered.chart, demo.chart);
    assert!(!render("not json").ok);
}
