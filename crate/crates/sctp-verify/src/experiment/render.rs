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

//! Deterministic ASCII message-sequence charts.

use super::trace::{replay_trace, Trace, TraceAction, TraceError};
use crate::attacker::{AttackAction, Direction};
use crate::system::Action;

const LANE_A: usize = 2;
const LANE_B: usize = 34;
const LANE_ATTACKER: usize = 58;
const LANE_WIDTH: usize = 64;
const STATE_WIDTH: usize = 24;

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn empty_lanes() -> Vec<char> {
    let mut row = vec![' '; LANE_WIDTH];
    for lane in [LANE_A, LANE_B, LANE_ATTACKER] {
        row[lane] = '|';
    }
    row
}

fn arrow(row: &mut [char], from: usize, to: usize, text: &str) {
    let (lo, hi) = (from.min(to), from.max(to));
    for c in row.iter_mut().take(hi).skip(lo + 1) {
        *c = '-';
    }
    if to > from {
        row[hi - 1] = '>';
    } else {
        row[lo + 1] = '<';
    }
    let span = hi - lo - 3;
    let text: String = text.chars().take(span.saturating_sub(2)).collect();
    let start = lo + 2 + (span - text.len()) / 2;
    for (i, ch) in text.chars().enumerate() {
        row[start + i] = ch;
    }
}

fn lane_of_actor(actor: &str) -> usize {
    match actor {
        "UserA" | "PeerA" => LANE_A,
        "UserB" | "PeerB" => LANE_B,
        "Attacker" => LANE_ATTACKER,
        _ => (LANE_A + LANE_B) / 2,
    }
}

fn marker(a: &TraceAction) -> char {
    match (a.actor.as_str(), a.kind.as_str()) {
        ("UserA" | "UserB", _) => 'o',
        (_, "consume") => 'x',
        (_, "stutter") => '~',
        _ => '*',
    }
}

fn centered(name: &str, lane: usize, row: &mut [char]) {
    let start = lane.saturating_sub(name.len() / 2);
    for (i, ch) in name.chars().enumerate() {
        if start + i < row.len() {
            row[start + i] = ch;
        }
    }
}

/// Renders `trace` as a chart with lanes for both peers and the attacker.
/// Peer states are shown when the trace replays.
pub fn render_trace(trace: &Trace) -> String {
    let c = &trace.config;
    let mut out = format!(
        "trace v{}  model={} property={} patch={} misinterpret={} tsn={}\n",
        trace.version,
        c.model.map(|m| m.name()).unwrap_or("none"),
        c.property.as_deref().unwrap_or("none"),
        on_off(c.patch),
        on_off(c.misinterpret),
        on_off(c.tsn)
    );
    let mut head = vec![' '; LANE_WIDTH];
    centered("PeerA", LANE_A + 2, &mut head);
    centered("PeerB", LANE_B, &mut head);
    centered("Attacker", LANE_ATTACKER, &mut head);
    let head: String = head.into_iter().collect();
    out.push_str(&format!(
        "{:>3} {} | {:<w$} {:<w$} | action\n",
        "#",
        head,
        "A",
        "B",
        w = STATE_WIDTH
    ));
    let replayed = replay_trace(trace);
    if let Some(s) = replayed.as_ref().ok().and_then(|s| s.first()) {
        let [a, b] = s.states();
        out.push_str(&format!(
            "{:>3} {} | {:<w$} {:<w$} | (initial)\n",
            "",
            empty_lanes().into_iter().collect::<String>(),
            a.ltl_name(),
            b.ltl_name(),
            w = STATE_WIDTH
        ));
    }
    let labels = trace.labels();
    let mut injected = [false; 2];
    for (i, a) in trace.actions.iter().enumerate() {
        let mut row = empty_lanes();
        let action = labels.as_ref().ok().map(|l| l[i].action);
        match action {
            Some(Action::Deliver { to, msg }) => {
                let d = to.index();
                let dest = if d == 0 { LANE_A } else { LANE_B };
                let src = if injected[d] {
                    LANE_ATTACKER
                } else if d == 0 {
                    LANE_B
                } else {
                    LANE_A
                };
                injected[d] = false;
                let text = format!(
                    "{},{},{}",
                    msg.chunk.name(),
                    msg.vtag.name(),
                    msg.itag.name()
                );
                arrow(&mut row, src, dest, &text);
            }
            Some(Action::Attack(
                AttackAction::Send { dir, .. } | AttackAction::Replay { dir, .. },
            )) => {
                injected[dest_index(dir)] = true;
                row[LANE_ATTACKER] = '*';
            }
            Some(Action::Attack(AttackAction::Consume { dir, .. })) => {
                injected[dest_index(dir)] = false;
                row[LANE_ATTACKER] = 'x';
            }
            _ => row[lane_of_actor(&a.actor)] = marker(a),
        }
        let row: String = row.into_iter().collect();
        let (sa, sb) = match &replayed {
            Ok(states) => {
                let [x, y] = states[i + 1].states();
                (x.ltl_name(), y.ltl_name())
            }
            Err(_) => ("?", "?"),
        };
        out.push_str(&format!(
            "{:>3} {} | {:<w$} {:<w$} | {}\n",
            i + 1,
            row,
            sa,
            sb,
            a,
            w = STATE_WIDTH
        ));
    }
    if let Some(k) = trace.lasso_split_index {
        out.push_str(&format!("loop: back to the state before step {}\n", k + 1));
    }
    if let Err(e) = replayed {
        out.push_str(&format!("note: trace does not replay: {e}\n"));
    }
    out
}

/// Index of the peer a direction delivers to.
fn dest_index(dir: Direction) -> usize {
    match dir {
        Direction::AToB => 1,
        Direction::BToA => 0,
    }
}

/// Recovers the action column of a rendered chart.
pub fn parse_chart_labels(chart: &str) -> Result<Vec<TraceAction>, TraceError> {
    chart
        .lines()
        .filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit()))
        .map(|l| {
            let label = l.rsplit(" | ").next().unwrap_or_default();
            TraceAction::parse_line(label)
        })
        .collect()
}
