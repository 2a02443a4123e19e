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

//! Batch experiments: baseline verification, the attack matrix, the two
//! scripted scenarios, and trace serialization and rendering.

mod matrix;
mod render;
mod scenarios;
mod trace;

pub use matrix::{
    check_against_reference, run_matrix, verify_baseline, BaselineReport, BaselineRun,
    CellMismatch, MatrixRun, PropertyVerdict, ReferenceMatrix,
};
pub use render::{parse_chart_labels, render_trace};
pub use scenarios::{
    ambiguity_demo, reproduce_cve, AmbiguityOutcome, CveOutcome, AMBIGUITY_WRONG_VTAG_STEP,
};
pub use trace::{
    parse_message, replay_trace, Trace, TraceAction, TraceConfig, TraceError, TRACE_VERSION,
};

use crate::attacker::{
    AttackAction, AttackerError, AttackerModelKind, Phase, DEFAULT_REPLAY_CAPACITY,
};
use crate::ltl::{builtin_property, NamedProperty};
use crate::protocol::{AbortScope, PeerConfig};
use crate::synthesis::SynthesisError;
use crate::system::{Bounds, SystemError, TimerMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchMode {
    On,
    Off,
    #[default]
    Both,
}

impl PatchMode {
    pub fn settings(self) -> Vec<bool> {
        match self {
            PatchMode::On => vec![true],
            PatchMode::Off => vec![false],
            PatchMode::Both => vec![false, true],
        }
    }
}

/// Settings shared by every batch command. Mirrors the CLI flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub patch: PatchMode,
    pub misinterpret: bool,
    /// Overrides the per-model TSN default (on for Replay only).
    pub tsn: Option<bool>,
    pub models: Vec<AttackerModelKind>,
    pub properties: Vec<String>,
    pub max_attacks: usize,
    /// Overrides the per-model attacker budget.
    pub budget: Option<u8>,
    pub replay_capacity: u8,
    pub replay_reemit: bool,
    pub search_depth: usize,
    pub max_depth: usize,
    pub state_cap: usize,
    /// Worker threads for the matrix; 0 means all available cores.
    pub jobs: usize,
    pub shrink: bool,
    pub timer_mode: TimerMode,
    pub abort_scope: AbortScope,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let bounds = Bounds::default();
        ExperimentConfig {
            patch: PatchMode::Both,
            misinterpret: false,
            tsn: None,
            models: AttackerModelKind::ALL.to_vec(),
            properties: (1..=10).map(|i| format!("phi{i}")).collect(),
            max_attacks: 1,
            budget: None,
            replay_capacity: DEFAULT_REPLAY_CAPACITY,
            replay_reemit: true,
            search_depth: bounds.search_depth,
            max_depth: bounds.max_depth,
            state_cap: bounds.state_cap,
            jobs: 0,
            shrink: true,
            timer_mode: TimerMode::default(),
            abort_scope: AbortScope::default(),
        }
    }
}

impl ExperimentConfig {
    /// Checks the configuration. Questionable but runnable settings come
    /// back as warnings.
    pub fn validate(&self) -> Result<Vec<String>, ExperimentError> {
        self.resolved_properties()?;
        if self.search_depth == 0 || self.search_depth > self.max_depth {
            return Err(ExperimentError::Config(format!(
                "search depth {} must be positive and at most the maximum depth {}",
                self.search_depth, self.max_depth
            )));
        }
        if self.state_cap == 0 {
            return Err(ExperimentError::Config("state cap must be positive".into()));
        }
        if self.max_attacks == 0 {
            return Err(ExperimentError::Config(
                "max attacks must be positive".into(),
            ));
        }
        let mut warnings = Vec::new();
        if self.tsn == Some(false) && self.models.contains(&AttackerModelKind::Replay) {
            warnings
                .push("replay attacker without TSNs: every replayed chunk is fresh".to_string());
        }
        if self.tsn == Some(true) && self.models.iter().any(|m| *m != AttackerModelKind::Replay) {
            warnings.push("TSNs enabled for a model that is normally run without them".to_string());
        }
        if self.misinterpret {
            warnings.push(
                "misinterpretation on: outcomes are not comparable with the reference matrix"
                    .to_string(),
            );
        }
        if !self.replay_reemit && self.models.contains(&AttackerModelKind::Replay) {
            warnings.push("replay attacker cannot re-emit: it can only drop traffic".to_string());
        }
        Ok(warnings)
    }

    pub fn resolved_properties(&self) -> Result<Vec<NamedProperty>, ExperimentError> {
        self.properties
            .iter()
            .map(|p| {
                builtin_property(p)
                    .ok_or_else(|| ExperimentError::Config(format!("unknown property `{p}`")))
            })
            .collect()
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            state_cap: self.state_cap,
            search_depth: self.search_depth,
            max_depth: self.max_depth,
        }
    }

    pub fn tsn_for(&self, model: Option<AttackerModelKind>) -> bool {
        self.tsn.unwrap_or(model == Some(AttackerModelKind::Replay))
    }

    pub fn budget_for(&self, model: AttackerModelKind) -> u8 {
        self.budget.unwrap_or_else(|| model.default_budget())
    }

    pub fn peer_config(&self, patch: bool, model: Option<AttackerModelKind>) -> PeerConfig {
        PeerConfig {
            patch_enabled: patch,
            misinterpret_521: self.misinterpret,
            tsn_enabled: self.tsn_for(model),
            abort_scope: self.abort_scope,
            ..PeerConfig::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Attacker(#[from] AttackerError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("state space bound exceeded")]
    BoundExceeded,
    #[error("no attack found in the off-path establishment cell")]
    CveNotFound,
    #[error("guided schedule blocked at step {step}: expected `{expected}`")]
    ScheduleInfeasible {
        step: usize,
        expected: String,
        enabled: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellOutcome {
    AttackFound {
        count: usize,
    },
    NoneExhausted,
    NoneBounded,
    /// The property fails without an attacker, so the cell is not searched.
    BaselineViolated,
}

impl CellOutcome {
    pub fn has_attack(self) -> bool {
        matches!(self, CellOutcome::AttackFound { .. })
    }

    pub fn label(self) -> String {
        match self {
            CellOutcome::AttackFound { count } => format!("attack({count})"),
            CellOutcome::NoneExhausted => "none".into(),
            CellOutcome::NoneBounded => "bounded".into(),
            CellOutcome::BaselineViolated => "baseline".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackRecord {
    pub phase: Phase,
    pub actions: Vec<AttackAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<Vec<AttackAction>>,
    /// The attack, and its shrunk form if any, revalidated against the model.
    pub validated: bool,
    /// Name of the trace file written for this attack.
    pub trace: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: Phase,
    pub attacks: usize,
    pub exhausted: bool,
    pub bound_exceeded: bool,
    pub iterations: usize,
    pub states_explored: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub model: AttackerModelKind,
    pub property: String,
    pub patch: bool,
    pub outcome: CellOutcome,
    pub phases: Vec<PhaseRecord>,
    pub attacks: Vec<AttackRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellTiming {
    pub model: AttackerModelKind,
    pub property: String,
    pub patch: bool,
    pub ms: u64,
}

/// Wall-clock data, kept apart so the rest of a report is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: u64,
    pub jobs: usize,
    pub cells: Vec<CellTiming>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub tool_version: String,
    pub report_version: u32,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            report_version: REPORT_VERSION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub environment: Environment,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    pub cells: Vec<CellReport>,
    /// Caveats that apply to the whole run.
    pub notes: Vec<String>,
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn cell(
        &self,
        model: AttackerModelKind,
        property: &str,
        patch: bool,
    ) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.property == property && c.patch == patch)
    }

    /// The report as JSON with the timing block cleared.
    pub fn deterministic_json(&self) -> String {
        let mut r = self.clone();
        r.timing = Timing::default();
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn any_bounded(&self) -> bool {
        self.cells
            .iter()
            .any(|c| c.outcome == CellOutcome::NoneBounded)
    }

    /// Text table of outcomes, one row per model and patch setting.
    pub fn summary_table(&self) -> String {
        let mut props: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !props.contains(&c.property.as_str()) {
                props.push(&c.property);
            }
        }
        let mut out = format!("{:<22}", "model");
        for p in &props {
            out.push_str(&format!("{p:>11}"));
        }
        out.push('\n');
        let mut rows: Vec<(AttackerModelKind, bool)> = Vec::new();
        for c in &self.cells {
            if !rows.contains(&(c.model, c.patch)) {
                rows.push((c.model, c.patch));
            }
        }
        for (model, patch) in rows {
            let name = format!("{model} (patch {})", if patch { "on" } else { "off" });
            out.push_str(&format!("{name:<22}"));
            for p in &props {
                let cell = self
                    .cell(model, p, patch)
                    .map(|c| c.outcome.label())
                    .unwrap_or_else(|| "-".into());
                out.push_str(&format!("{cell:>11}"));
            }
            out.push('\n');
        }
        out
    }
}

/// File stem used for the trace of one attack.
pub fn trace_file_name(
    model: AttackerModelKind,
    property: &str,
    patch: bool,
    index: usize,
) -> String {
    format!(
        "{}_{}_patch-{}_{}",
        model.name(),
        property,
        if patch { "on" } else { "off" },
        index
    )
}
