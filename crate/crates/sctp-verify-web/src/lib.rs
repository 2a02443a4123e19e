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

//! Browser bindings: the CVE reproduction with a patch toggle, the tag
//! ambiguity schedule with a misinterpretation toggle, and trace rendering.
//!
//! Each export returns a JSON object `{ ok, summary, chart, trace }`. The
//! plain Rust functions behind them are usable and tested natively.

use sctp_verify::experiment::{
    ambiguity_demo, render_trace, reproduce_cve, CveOutcome, ExperimentConfig, ExperimentError,
    Trace,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoOutput {
    pub ok: bool,
    pub summary: String,
    pub chart: String,
    /// Trace JSON, empty when there is no trace.
    pub trace: String,
}

impl DemoOutput {
    fn failure(summary: String) -> Self {
        DemoOutput {
            ok: false,
            summary,
            chart: String::new(),
            trace: String::new(),
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(self).expect("output serializes")
    }
}

pub fn cve(patch: bool) -> DemoOutput {
    let cfg = ExperimentConfig {
        jobs: 1,
        ..ExperimentConfig::default()
    };
    match reproduce_cve(&cfg, patch) {
        Ok(CveOutcome::Attack {
            shrunk,
            trace,
            victim_abort,
            ..
        }) => {
            let steps: Vec<String> = shrunk.iter().map(|a| a.to_string()).collect();
            DemoOutput {
                ok: true,
                summary: format!(
                    "attack found: [{}]; victim sends an ABORT with the association tag: {victim_abort}",
                    steps.join("; ")
                ),
                chart: render_trace(&trace),
                trace: trace.to_json(),
            }
        }
        Ok(CveOutcome::NoAttack {
            exhausted,
            states_explored,
        }) => DemoOutput {
            ok: true,
            summary: format!(
                "no attack exists (search exhausted: {exhausted}, {states_explored} states)"
            ),
            chart: String::new(),
            trace: String::new(),
        },
        Err(e) => DemoOutput::failure(e.to_string()),
    }
}

pub fn ambiguity(misinterpret: bool) -> DemoOutput {
    match ambiguity_demo(misinterpret) {
        Ok(o) => {
            let [a, b] = o.final_states;
            DemoOutput {
                ok: true,
                summary: format!(
                    "final states A={a} B={b}; persistent: {} ({})",
                    o.persistent, o.caveat
                ),
                chart: render_trace(&o.trace),
                trace: o.trace.to_json(),
            }
        }
        Err(ExperimentError::ScheduleInfeasible { step, expected, .. }) => DemoOutput {
            ok: true,
            summary: format!("schedule blocked at step {}: {expected}", step + 1),
            chart: String::new(),
            trace: String::new(),
        },
        Err(e) => DemoOutput::failure(e.to_string()),
    }
}

pub fn render(trace_json: &str) -> DemoOutput {
    match Trace::from_json(trace_json) {
        Ok(t) => DemoOutput {
            ok: true,
            summary: format!("{} steps", t.actions.len()),
            chart: render_trace(&t),
            trace: t.to_json(),
        },
        Err(e) => DemoOutput::failure(e.to_string()),
    }
}

#[wasm_bindgen(js_name = reproduceCve)]
pub fn reproduce_cve_js(patch: bool) -> String {
    cve(patch).to_json()
}

#[wasm_bindgen(js_name = ambiguityDemo)]
pub fn ambiguity_demo_js(misinterpret: bool) -> String {
    ambiguity(misinterpret).to_json()
}

#[wasm_bindgen(js_name = renderTrace)]
pub fn render_trace_js(trace_json: &str) -> String {
    render(trace_json).to_json()
}
