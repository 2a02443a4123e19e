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

//! Attack synthesis: search the system composed with a nondeterministic
//! attacker for runs where the attacker stops and a property then fails.

use crate::attacker::{
    build_daisy, vocab_for, AttackAction, AttackerError, AttackerModelKind, AttackerSpec,
    ForbiddenTrie, Phase, DEFAULT_REPLAY_CAPACITY,
};
use crate::clock::Stopwatch;
use crate::ltl::{check_graph, Atom, CheckError, Counterexample, DepthBounds, Formula, Verdict};
use crate::protocol::PeerConfig;
use crate::system::{Action, Bounds, ScenarioConfig, StateGraph, SystemError, TimerMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct SynthesisConfig {
    pub property_name: String,
    pub property: Formula,
    pub model: AttackerModelKind,
    pub phase: Phase,
    pub budget: u8,
    pub replay_capacity: u8,
    /// Whether the replay attacker may re-emit what it captured.
    pub replay_reemit: bool,
    pub max_attacks: usize,
    pub peer: PeerConfig,
    pub timer_mode: TimerMode,
    pub bounds: Bounds,
    /// Check that the property holds without an attacker before searching.
    pub precheck_baseline: bool,
}

impl SynthesisConfig {
    pub fn new(
        model: AttackerModelKind,
        property_name: impl Into<String>,
        property: Formula,
    ) -> Self {
        let peer = PeerConfig {
            tsn_enabled: model == AttackerModelKind::Replay,
            ..PeerConfig::default()
        };
        SynthesisConfig {
            property_name: property_name.into(),
            property,
            model,
            phase: Phase::Full,
            budget: model.default_budget(),
            replay_capacity: DEFAULT_REPLAY_CAPACITY,
            replay_reemit: true,
            max_attacks: 10,
            peer,
            timer_mode: TimerMode::default(),
            bounds: Bounds::default(),
            precheck_baseline: true,
        }
    }

    fn depth_bounds(&self) -> DepthBounds {
        DepthBounds {
            initial: self.bounds.search_depth,
            max: self.bounds.max_depth,
        }
    }

    /// The nondeterministic attacker with `forbidden` sequences excluded.
    pub fn daisy(&self, forbidden: ForbiddenTrie) -> Result<AttackerSpec, AttackerError> {
        let mut spec = build_daisy(self.model, vocab_for(self.model, self.phase), self.budget)?;
        spec.replay_capacity = self.replay_capacity;
        spec.replay_reemit = self.replay_reemit;
        spec.forbidden = forbidden;
        Ok(spec)
    }

    pub fn scenario(&self, attacker: Option<AttackerSpec>) -> ScenarioConfig {
        ScenarioConfig {
            peer: self.peer,
            timer_mode: self.timer_mode,
            attacker,
            bounds: self.bounds,
            ignore_stale_tags: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attack {
    /// Attacker actions in order, without the final termination.
    pub actions: Vec<AttackAction>,
    /// 1-minimal subsequence, when shrinking was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<Vec<AttackAction>>,
    /// The counterexample the attack was read from.
    pub witness: Counterexample,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisStats {
    pub iterations: usize,
    pub states_explored: usize,
    /// Set when a state or depth bound stopped the search.
    pub bound_exceeded: bool,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub attacks: Vec<Attack>,
    /// The search covered the whole space: with no attacks, none exist.
    pub exhausted: bool,
    pub stats: SynthesisStats,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error(transparent)]
    Attacker(#[from] AttackerError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("property {0} is already violated without an attacker")]
    BaselineViolated(String),
}

/// `F(term) -> f`: only runs in which the attacker stops count.
pub fn precondition_property(f: &Formula) -> Formula {
    Formula::implies(
        Formula::finally(Formula::atom(Atom::AttackerTerminated)),
        f.clone(),
    )
}

/// Attacker actions of a counterexample up to its termination.
pub fn attack_actions(cx: &Counterexample) -> Vec<AttackAction> {
    cx.labels
        .iter()
        .filter_map(|l| match l.action {
            Action::Attack(a) => Some(a),
            _ => None,
        })
        .take_while(|a| *a != AttackAction::Terminate)
        .collect()
}

/// Model-checks the preconditioned property; `None` when a bound stops it.
fn violation(
    cfg: &SynthesisConfig,
    attacker: Option<AttackerSpec>,
    f: &Formula,
    explored: &mut usize,
) -> Result<Option<Option<Counterexample>>, SynthesisError> {
    match build_graph(cfg, attacker)? {
        Some(g) => violation_in(cfg, &g, f, explored),
        None => Ok(None),
    }
}

/// The state graph of a scenario; `None` when the state cap is hit.
fn build_graph(
    cfg: &SynthesisConfig,
    attacker: Option<AttackerSpec>,
) -> Result<Option<StateGraph>, SynthesisError> {
    match StateGraph::build(&cfg.scenario(attacker)) {
        Ok(g) => Ok(Some(g)),
        Err(SystemError::BoundExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// The graph of `cfg` composed with its unrestricted daisy. Every property
/// of a matrix row shares it for the first search, so the experiment layer
/// builds it once. `None` when the state cap is hit.
pub fn daisy_graph(cfg: &SynthesisConfig) -> Result<Option<StateGraph>, SynthesisError> {
    build_graph(cfg, Some(cfg.daisy(ForbiddenTrie::new())?))
}

fn violation_in(
    cfg: &SynthesisConfig,
    g: &StateGraph,
    f: &Formula,
    explored: &mut usize,
) -> Result<Option<Option<Counterexample>>, SynthesisError> {
    *explored += g.len();
    match check_graph(g, f, cfg.depth_bounds()) {
        Ok(Verdict::Holds) => Ok(Some(None)),
        Ok(Verdict::Violated(cx)) => Ok(Some(Some(cx))),
        Err(CheckError::DepthExceeded { .. }) => Ok(None),
        Err(CheckError::System(e)) => Err(e.into()),
    }
}

/// Finds up to `max_attacks` distinct attacks, excluding each found action
/// sequence before searching again.
pub fn synthesize(cfg: &SynthesisConfig) -> Result<SynthesisResult, SynthesisError> {
    synthesize_from(cfg, None)
}

/// [`synthesize`] with the first search run on `first`, which must be
/// [`daisy_graph`] of an equivalent configuration. `Some(None)` records that
/// building it hit the state cap.
pub fn synthesize_from(
    cfg: &SynthesisConfig,
    first: Option<Option<&StateGraph>>,
) -> Result<SynthesisResult, SynthesisError> {
    let start = Stopwatch::start();
    let mut stats = SynthesisStats::default();
    if cfg.precheck_baseline {
        match violation(cfg, None, &cfg.property, &mut stats.states_explored)? {
            Some(Some(_)) => {
                return Err(SynthesisError::BaselineViolated(cfg.property_name.clone()))
            }
            Some(None) => {}
            None => stats.bound_exceeded = true,
        }
    }
    let f = precondition_property(&cfg.property);
    let mut forbidden = ForbiddenTrie::new();
    let mut attacks: Vec<Attack> = Vec::new();
    let mut exhausted = false;
    while attacks.len() < cfg.max_attacks {
        stats.iterations += 1;
        let outcome = match (stats.iterations, first) {
            (1, Some(Some(g))) => violation_in(cfg, g, &f, &mut stats.states_explored)?,
            (1, Some(None)) => None,
            _ => violation(
                cfg,
                Some(cfg.daisy(forbidden.clone())?),
                &f,
                &mut stats.states_explored,
            )?,
        };
        match outcome {
            None => {
                stats.bound_exceeded = true;
                break;
            }
            Some(None) => {
                exhausted = true;
                break;
            }
            Some(Some(cx)) => {
                let actions = attack_actions(&cx);
                forbidden.insert(&actions);
                attacks.push(Attack {
                    actions,
                    shrunk: None,
                    witness: cx,
                });
            }
        }
    }
    stats.elapsed_ms = start.elapsed_ms();
    Ok(SynthesisResult {
        attacks,
        exhausted,
        stats,
    })
}

/// A counterexample in which the attacker follows exactly `actions`.
pub fn attack_witness(
    actions: &[AttackAction],
    cfg: &SynthesisConfig,
) -> Result<Option<Counterexample>, SynthesisError> {
    let spec = cfg.daisy(ForbiddenTrie::new())?.scripted(actions.to_vec());
    let f = precondition_property(&cfg.property);
    let mut explored = 0;
    Ok(violation(cfg, Some(spec), &f, &mut explored)?.flatten())
}

/// Whether the deterministic attacker performing `actions` and then
/// stopping admits a run that violates the property.
pub fn validate_attack(actions: &[AttackAction], cfg: &SynthesisConfig) -> bool {
    matches!(attack_witness(actions, cfg), Ok(Some(_)))
}

/// Greedily drops actions while the attack stays valid. The result is
/// 1-minimal: removing any single remaining action invalidates it.
/// Deletes single elements while `keep` still accepts the rest, until no
/// single deletion is accepted. The result is 1-minimal for `keep`.
pub fn shrink_sequence<T: Clone>(items: &[T], mut keep: impl FnMut(&[T]) -> bool) -> Vec<T> {
    let mut cur = items.to_vec();
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < cur.len() {
            let mut cand = cur.clone();
            cand.remove(i);
            if keep(&cand) {
                cur = cand;
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return cur;
        }
    }
}

pub fn shrink_attack(actions: &[AttackAction], cfg: &SynthesisConfig) -> Vec<AttackAction> {
    shrink_sequence(actions, |cand| validate_attack(cand, cfg))
}

pub fn shrink_all(result: &mut SynthesisResult, cfg: &SynthesisConfig) {
    for a in &mut result.attacks {
        a.shrunk = Some(shrink_attack(&a.actions, cfg));
    }
}
