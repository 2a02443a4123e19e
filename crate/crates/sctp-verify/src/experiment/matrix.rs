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

//! Baseline verification and the attacker-model by property matrix.

use super::trace::{Trace, TraceConfig};
use super::{
    trace_file_name, AttackRecord, CellOutcome, CellReport, CellTiming, Environment,
    ExperimentConfig, ExperimentError, ExperimentReport, PhaseRecord, Timing,
};
use crate::attacker::{AttackerModelKind, Phase};
use crate::clock::Stopwatch;
use crate::ltl::{check_graph, CheckError, DepthBounds, NamedProperty, Verdict};
use crate::protocol::PeerState;
use crate::synthesis::{
    attack_witness, daisy_graph, shrink_attack, synthesize_from, validate_attack, SynthesisConfig,
};
use crate::system::{ScenarioConfig, StateGraph, SystemError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: String,
    pub holds: bool,
    /// Length of the counterexample when the property fails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample_len: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub patch: bool,
    pub misinterpret: bool,
    pub tsn: bool,
    pub states: usize,
    pub edges: usize,
    pub deadlocks: usize,
    pub reachable: Vec<PeerState>,
    pub unreachable: Vec<PeerState>,
    pub verdicts: Vec<PropertyVerdict>,
}

impl BaselineRun {
    pub fn passed(&self) -> bool {
        self.deadlocks == 0 && self.unreachable.is_empty() && self.verdicts.iter().all(|v| v.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub runs: Vec<BaselineRun>,
}

impl BaselineReport {
    pub fn passed(&self) -> bool {
        self.runs.iter().all(BaselineRun::passed)
    }
}

fn depth_bounds(cfg: &ExperimentConfig) -> DepthBounds {
    DepthBounds {
        initial: cfg.search_depth,
        max: cfg.max_depth,
    }
}

fn baseline_verdicts(
    g: &StateGraph,
    props: &[NamedProperty],
    bounds: DepthBounds,
) -> Result<Vec<PropertyVerdict>, ExperimentError> {
    props
        .iter()
        .map(|p| match check_graph(g, &p.formula, bounds) {
            Ok(Verdict::Holds) => Ok(PropertyVerdict {
                property: p.name.to_string(),
                holds: true,
                counterexample_len: None,
            }),
            Ok(Verdict::Violated(cx)) => Ok(PropertyVerdict {
                property: p.name.to_string(),
                holds: false,
                counterexample_len: Some(cx.labels.len()),
            }),
            Err(CheckError::DepthExceeded { .. }) => Err(ExperimentError::BoundExceeded),
            Err(CheckError::System(e)) => Err(e.into()),
        })
        .collect()
}

fn build(scenario: &ScenarioConfig) -> Result<StateGraph, ExperimentError> {
    StateGraph::build(scenario).map_err(|e| match e {
        SystemError::BoundExceeded { .. } => ExperimentError::BoundExceeded,
        e => e.into(),
    })
}

/// Explores the attacker-free system and checks every selected property,
/// once per patch setting.
pub fn verify_baseline(cfg: &ExperimentConfig) -> Result<BaselineReport, ExperimentError> {
    cfg.validate()?;
    let props = cfg.resolved_properties()?;
    let mut runs = Vec::new();
    for patch in cfg.patch.settings() {
        let scenario = ScenarioConfig {
            peer: cfg.peer_config(patch, None),
            timer_mode: cfg.timer_mode,
            attacker: None,
            bounds: cfg.bounds(),
            ignore_stale_tags: false,
        };
        let g = build(&scenario)?;
        let summary = g.summary();
        runs.push(BaselineRun {
            patch,
            misinterpret: cfg.misinterpret,
            tsn: scenario.peer.tsn_enabled,
            states: summary.states,
            edges: summary.edges,
            deadlocks: summary.deadlocks,
            reachable: summary.reachable,
            unreachable: summary.unreachable,
            verdicts: baseline_verdicts(&g, &props, depth_bounds(cfg))?,
        });
    }
    Ok(BaselineReport { runs })
}

/// A matrix report together with one trace per reported attack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixRun {
    pub report: ExperimentReport,
    /// Trace file stem and trace, in report order.
    pub traces: Vec<(String, Trace)>,
}

struct PhaseCell {
    property: String,
    record: PhaseRecord,
    baseline_violated: bool,
    attacks: Vec<(AttackRecord, Trace)>,
    ms: u64,
}

struct Row {
    patch: bool,
    model: AttackerModelKind,
    phase: Phase,
}

fn phases(model: AttackerModelKind) -> Vec<Phase> {
    if model.uses_phase_split() {
        vec![Phase::Establishment, Phase::Teardown]
    } else {
        vec![Phase::Full]
    }
}

/// Synthesis settings for one matrix row.
pub(crate) fn row_config(
    cfg: &ExperimentConfig,
    patch: bool,
    model: AttackerModelKind,
    phase: Phase,
    prop: &NamedProperty,
) -> SynthesisConfig {
    let mut s = SynthesisConfig::new(model, prop.name, prop.formula.clone());
    s.phase = phase;
    s.budget = cfg.budget_for(model);
    s.replay_capacity = cfg.replay_capacity;
    s.replay_reemit = cfg.replay_reemit;
    s.max_attacks = cfg.max_attacks;
    s.peer = cfg.peer_config(patch, Some(model));
    s.timer_mode = cfg.timer_mode;
    s.bounds = cfg.bounds();
    s.precheck_baseline = false;
    s
}

pub(crate) fn trace_config(s: &SynthesisConfig) -> TraceConfig {
    TraceConfig {
        model: Some(s.model),
        property: Some(s.property_name.clone()),
        patch: s.peer.patch_enabled,
        misinterpret: s.peer.misinterpret_521,
        tsn: s.peer.tsn_enabled,
        phase: s.phase,
        budget: s.budget,
        replay_capacity: s.replay_capacity,
        replay_reemit: s.replay_reemit,
        timer_mode: s.timer_mode,
        abort_scope: s.peer.abort_scope,
    }
}

fn run_row(
    cfg: &ExperimentConfig,
    row: &Row,
    props: &[NamedProperty],
) -> Result<Vec<PhaseCell>, ExperimentError> {
    let Some(first) = props.first() else {
        return Ok(Vec::new());
    };
    let base = row_config(cfg, row.patch, row.model, row.phase, first);
    let baseline = match build(&base.scenario(None)) {
        Ok(g) => Some(baseline_verdicts(&g, props, depth_bounds(cfg))),
        Err(ExperimentError::BoundExceeded) => None,
        Err(e) => return Err(e),
    };
    let graph = daisy_graph(&base)?;
    let mut out = Vec::new();
    for (k, prop) in props.iter().enumerate() {
        let start = Stopwatch::start();
        let violated = matches!(&baseline, Some(Ok(v)) if !v[k].holds);
        if violated {
            out.push(PhaseCell {
                property: prop.name.to_string(),
                record: PhaseRecord {
                    phase: row.phase,
                    attacks: 0,
                    exhausted: false,
                    bound_exceeded: false,
                    iterations: 0,
                    states_explored: 0,
                },
                baseline_violated: true,
                attacks: Vec::new(),
                ms: start.elapsed_ms(),
            });
            continue;
        }
        let s = row_config(cfg, row.patch, row.model, row.phase, prop);
        let result = synthesize_from(&s, Some(graph.as_ref()))?;
        let mut attacks = Vec::new();
        for a in &result.attacks {
            let shrunk = cfg.shrink.then(|| shrink_attack(&a.actions, &s));
            let validated = validate_attack(&a.actions, &s)
                && shrunk.as_ref().is_none_or(|x| validate_attack(x, &s));
            let witness = match &shrunk {
                Some(x) => attack_witness(x, &s)?.unwrap_or_else(|| a.witness.clone()),
                None => a.witness.clone(),
            };
            let trace = Trace::from_counterexample(trace_config(&s), &witness);
            let record = AttackRecord {
                phase: row.phase,
                actions: a.actions.clone(),
                shrunk,
                validated,
                trace: String::new(),
            };
            attacks.push((record, trace));
        }
        out.push(PhaseCell {
            property: prop.name.to_string(),
            record: PhaseRecord {
                phase: row.phase,
                attacks: result.attacks.len(),
                exhausted: result.exhausted,
                bound_exceeded: result.stats.bound_exceeded,
                iterations: result.stats.iterations,
                states_explored: result.stats.states_explored,
            },
            baseline_violated: false,
            attacks,
            ms: start.elapsed_ms(),
        });
    }
    Ok(out)
}

fn merge(phases: &[&PhaseCell]) -> CellOutcome {
    let count: usize = phases.iter().map(|p| p.record.attacks).sum();
    if count > 0 {
        CellOutcome::AttackFound { count }
    } else if phases.iter().any(|p| p.baseline_violated) {
        CellOutcome::BaselineViolated
    } else if phases.iter().all(|p| p.record.exhausted) {
        CellOutcome::NoneExhausted
    } else {
        CellOutcome::NoneBounded
    }
}

fn worker_count(jobs: usize) -> usize {
    if jobs > 0 {
        jobs
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
}

/// Runs synthesis for every selected (patch, model, property) cell. Models
/// with a phase split are searched once per phase and the phases merged.
pub fn run_matrix(cfg: &ExperimentConfig) -> Result<MatrixRun, ExperimentError> {
    let warnings = cfg.validate()?;
    let props = cfg.resolved_properties()?;
    let start = Stopwatch::start();
    let mut rows = Vec::new();
    for patch in cfg.patch.settings() {
        for &model in &cfg.models {
            for phase in phases(model) {
                rows.push(Row {
                    patch,
                    model,
                    phase,
                });
            }
        }
    }
    let jobs = worker_count(cfg.jobs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<Vec<PhaseCell>, ExperimentError>> = pool.install(|| {
        rows.par_iter()
            .map(|row| run_row(cfg, row, &props))
            .collect()
    });
    let mut by_row = Vec::with_capacity(rows.len());
    for (row, r) in rows.iter().zip(results) {
        by_row.push((row, r?));
    }

    let mut cells = Vec::new();
    let mut traces = Vec::new();
    let mut timing = Timing {
        total_ms: 0,
        jobs,
        cells: Vec::new(),
    };
    for patch in cfg.patch.settings() {
        for &model in &cfg.models {
            for prop in &props {
                let parts: Vec<&PhaseCell> = by_row
                    .iter()
                    .filter(|(row, _)| row.patch == patch && row.model == model)
                    .flat_map(|(_, cells)| cells.iter().filter(|c| c.property == prop.name))
                    .collect();
                let mut attacks = Vec::new();
                for (record, trace) in parts.iter().flat_map(|p| p.attacks.iter()) {
                    let name = trace_file_name(model, prop.name, patch, attacks.len());
                    attacks.push(AttackRecord {
                        trace: name.clone(),
                        ..record.clone()
                    });
                    traces.push((name, trace.clone()));
                }
                timing.cells.push(CellTiming {
                    model,
                    property: prop.name.to_string(),
                    patch,
                    ms: parts.iter().map(|p| p.ms).sum(),
                });
                cells.push(CellReport {
                    model,
                    property: prop.name.to_string(),
                    patch,
                    outcome: merge(&parts),
                    phases: parts.iter().map(|p| p.record.clone()).collect(),
                    attacks,
                });
            }
        }
    }
    timing.total_ms = start.elapsed_ms();
    let notes = vec![
        "attack counts depend on enumeration order and are capped by max_attacks per phase"
            .to_string(),
        "timers fire only when no delivery or peer step is enabled".to_string(),
    ];
    let report = ExperimentReport {
        environment: Environment::default(),
        config: cfg.clone(),
        warnings,
        cells,
        notes,
        timing,
    };
    Ok(MatrixRun { report, traces })
}

/// Expected attack cells for the reference configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceMatrix {
    pub version: u32,
    pub patch_off: BTreeMap<String, Vec<String>>,
    pub patch_on: BTreeMap<String, Vec<String>>,
}

impl ReferenceMatrix {
    pub fn load() -> Self {
        serde_json::from_str(include_str!("../../fixtures/reference_matrix.json"))
            .expect("reference fixture parses")
    }

    pub fn expects_attack(&self, model: AttackerModelKind, property: &str, patch: bool) -> bool {
        let table = if patch {
            &self.patch_on
        } else {
            &self.patch_off
        };
        table
            .get(model.name())
            .is_some_and(|ps| ps.iter().any(|p| p == property))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMismatch {
    pub model: AttackerModelKind,
    pub property: String,
    pub patch: bool,
    pub expected_attack: bool,
    pub outcome: CellOutcome,
}

/// Cells whose outcome disagrees with the reference matrix. A cell without
/// an attack counts as agreeing only if its search was exhaustive.
pub fn check_against_reference(report: &ExperimentReport) -> Vec<CellMismatch> {
    let reference = ReferenceMatrix::load();
    report
        .cells
        .iter()
        .filter_map(|c| {
            let expected = reference.expects_attack(c.model, &c.property, c.patch);
            let agrees = if expected {
                c.outcome.has_attack()
            } else {
                c.outcome == CellOutcome::NoneExhausted
            };
            (!agrees).then(|| CellMismatch {
                model: c.model,
                property: c.property.clone(),
                patch: c.patch,
                expected_attack: expected,
                outcome: c.outcome,
            })
        })
        .collect()
}
