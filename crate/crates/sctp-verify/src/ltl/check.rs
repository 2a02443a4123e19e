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

//! Product construction and nested depth-first emptiness check.

use super::buchi::{to_buchi, BuchiAutomaton};
use super::formula::{Atom, Formula};
use crate::system::{
    atomic_valuation, Action, Actor, ScenarioConfig, StateGraph, SystemError, SystemState,
    TransitionLabel,
};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::hash::Hash;
use thiserror::Error;

/// A total-or-stuttered transition system with labeled states.
///
/// States without successors are treated as repeating forever.
pub trait Kripke {
    type State: Clone + Eq + Hash;
    fn initial(&self) -> Vec<Self::State>;
    fn successors(&self, s: &Self::State) -> Vec<Self::State>;
    fn holds(&self, s: &Self::State, atom: &Atom) -> bool;
}

/// The infinite path `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso<S> {
    pub prefix: Vec<S>,
    pub cycle: Vec<S>,
}

impl<S: Clone> Lasso<S> {
    /// States in order with the index where the cycle starts.
    pub fn unrolled(&self) -> (Vec<S>, usize) {
        let mut v = self.prefix.clone();
        v.extend(self.cycle.iter().cloned());
        (v, self.prefix.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KripkeVerdict<S> {
    Holds,
    Violated(Lasso<S>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthBounds {
    pub initial: usize,
    pub max: usize,
}

impl Default for DepthBounds {
    fn default() -> Self {
        DepthBounds {
            initial: 600_000,
            max: 2_400_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("search depth exceeds the maximum of {max}")]
    DepthExceeded { max: usize },
}

struct Product<'a, K: Kripke> {
    k: &'a K,
    aut: &'a BuchiAutomaton,
}

type P<S> = (S, u32);

impl<K: Kripke> Product<'_, K> {
    fn letter_ok(&self, s: &K::State, q: u32) -> bool {
        self.aut.accepts_letter(q, |a| self.k.holds(s, a))
    }

    fn initial(&self) -> Vec<P<K::State>> {
        let mut out = Vec::new();
        for s in self.k.initial() {
            for &q in &self.aut.initial {
                if self.letter_ok(&s, q) {
                    out.push((s.clone(), q));
                }
            }
        }
        out
    }

    fn successors(&self, (s, q): &P<K::State>) -> Vec<P<K::State>> {
        let mut ks = self.k.successors(s);
        if ks.is_empty() {
            ks.push(s.clone());
        }
        let mut out = Vec::new();
        let mut seen = FxHashSet::default();
        for t in ks {
            if !seen.insert(t.clone()) {
                continue;
            }
            for &r in &self.aut.states[*q as usize].successors {
                if self.letter_ok(&t, r) {
                    out.push((t.clone(), r));
                }
            }
        }
        out
    }

    fn accepting(&self, p: &P<K::State>) -> bool {
        self.aut.states[p.1 as usize].accepting
    }

    /// Shortest path from any of `from` to `to`, both ends included.
    fn bfs(&self, from: Vec<P<K::State>>, to: &P<K::State>) -> Option<Vec<P<K::State>>> {
        self.bfs_to(from, |p| p == to)
    }

    /// Shortest path from any of `from` to the first node satisfying `goal`.
    fn bfs_to(
        &self,
        from: Vec<P<K::State>>,
        goal: impl Fn(&P<K::State>) -> bool,
    ) -> Option<Vec<P<K::State>>> {
        let mut parent: FxHashMap<P<K::State>, Option<P<K::State>>> = FxHashMap::default();
        let mut q = VecDeque::new();
        for p in from {
            if !parent.contains_key(&p) {
                parent.insert(p.clone(), None);
                q.push_back(p);
            }
        }
        while let Some(u) = q.pop_front() {
            if goal(&u) {
                let mut path = vec![u.clone()];
                let mut cur = u;
                while let Some(Some(prev)) = parent.get(&cur) {
                    path.push(prev.clone());
                    cur = prev.clone();
                }
                path.reverse();
                return Some(path);
            }
            for v in self.successors(&u) {
                if !parent.contains_key(&v) {
                    parent.insert(v.clone(), Some(u.clone()));
                    q.push_back(v);
                }
            }
        }
        None
    }

    /// Builds a short lasso through an accepting `seed` on a cycle. The
    /// prefix leads to the nearest state of the cycle.
    fn lasso(&self, seed: &P<K::State>) -> Lasso<K::State> {
        let back = self
            .bfs(self.successors(seed), seed)
            .expect("seed lies on a cycle");
        let mut cycle = vec![seed.clone()];
        cycle.extend(back.into_iter().take_while(|p| p != seed));
        let index: FxHashMap<&P<K::State>, usize> =
            cycle.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut prefix = self
            .bfs_to(self.initial(), |p| index.contains_key(p))
            .expect("cycle is reachable");
        let entry = prefix.pop().expect("nonempty path");
        let at = index[&entry];
        drop(index);
        cycle.rotate_left(at);
        Lasso {
            prefix: prefix.into_iter().map(|p| p.0).collect(),
            cycle: cycle.into_iter().map(|p| p.0).collect(),
        }
    }

    fn inner(
        &self,
        seed: &P<K::State>,
        on_stack: &FxHashSet<P<K::State>>,
        visited2: &mut FxHashSet<P<K::State>>,
    ) -> bool {
        let mut stack = vec![self.successors(seed)];
        while let Some(top) = stack.last_mut() {
            let Some(t) = top.pop() else {
                stack.pop();
                continue;
            };
            if &t == seed || on_stack.contains(&t) {
                return true;
            }
            if visited2.insert(t.clone()) {
                let next = self.successors(&t);
                stack.push(next);
            }
        }
        false
    }

    /// One nested DFS pass. Returns the accepting seed, if any, and whether
    /// the depth limit cut the search.
    fn ndfs(&self, depth: usize) -> (Option<P<K::State>>, bool) {
        let mut visited1: FxHashSet<P<K::State>> = FxHashSet::default();
        let mut visited2: FxHashSet<P<K::State>> = FxHashSet::default();
        let mut on_stack: FxHashSet<P<K::State>> = FxHashSet::default();
        let mut truncated = false;
        for root in self.initial() {
            if !visited1.insert(root.clone()) {
                continue;
            }
            let mut succ = self.successors(&root);
            succ.reverse();
            on_stack.insert(root.clone());
            let mut stack = vec![(root, succ)];
            while let Some((node, pending)) = stack.last_mut() {
                if let Some(t) = pending.pop() {
                    if visited1.contains(&t) {
                        continue;
                    }
                    if stack.len() >= depth {
                        truncated = true;
                        continue;
                    }
                    visited1.insert(t.clone());
                    on_stack.insert(t.clone());
                    let mut succ = self.successors(&t);
                    succ.reverse();
                    stack.push((t, succ));
                    continue;
                }
                let node = node.clone();
                stack.pop();
                on_stack.remove(&node);
                if self.accepting(&node) && self.inner(&node, &on_stack, &mut visited2) {
                    return (Some(node), truncated);
                }
            }
        }
        (None, truncated)
    }
}

/// Decides `k ⊨ f`, doubling the depth limit until the search completes.
pub fn check_kripke<K: Kripke>(
    k: &K,
    f: &Formula,
    bounds: DepthBounds,
) -> Result<KripkeVerdict<K::State>, CheckError> {
    let aut = to_buchi(&Formula::not(f.clone()));
    let product = Product { k, aut: &aut };
    let mut depth = bounds.initial.max(1);
    loop {
        let (seed, truncated) = product.ndfs(depth);
        if let Some(seed) = seed {
            return Ok(KripkeVerdict::Violated(product.lasso(&seed)));
        }
        if !truncated {
            return Ok(KripkeVerdict::Holds);
        }
        if depth >= bounds.max {
            return Err(CheckError::DepthExceeded { max: bounds.max });
        }
        depth = (depth * 2).min(bounds.max);
    }
}

impl Kripke for StateGraph {
    type State = u32;

    fn initial(&self) -> Vec<u32> {
        vec![0]
    }

    fn successors(&self, s: &u32) -> Vec<u32> {
        self.targets(*s).to_vec()
    }

    fn holds(&self, s: &u32, atom: &Atom) -> bool {
        atomic_valuation(self.state(*s)).holds(atom)
    }
}

/// A counterexample as concrete states and the transitions between them.
/// `labels[i]` leads from `states[i]` to `states[i + 1]`; the last label
/// leads back to `states[loop_start]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub states: Vec<SystemState>,
    pub labels: Vec<TransitionLabel>,
    pub loop_start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

pub const STUTTER: TransitionLabel = TransitionLabel {
    actor: Actor::Channel,
    action: Action::Stutter,
    emitted: None,
    choice: 0,
};

fn edge_label(g: &StateGraph, u: u32, v: u32) -> TransitionLabel {
    g.edges(u)
        .find(|(_, t)| *t == v)
        .map(|(l, _)| *l)
        .unwrap_or(STUTTER)
}

/// Checks `f` on an already built graph.
pub fn check_graph(
    g: &StateGraph,
    f: &Formula,
    bounds: DepthBounds,
) -> Result<Verdict, CheckError> {
    match check_kripke(g, f, bounds)? {
        KripkeVerdict::Holds => Ok(Verdict::Holds),
        KripkeVerdict::Violated(lasso) => {
            let (seq, loop_start) = lasso.unrolled();
            let labels = (0..seq.len())
                .map(|i| {
                    let next = if i + 1 < seq.len() {
                        seq[i + 1]
                    } else {
                        seq[loop_start]
                    };
                    edge_label(g, seq[i], next)
                })
                .collect();
            let states = seq.iter().map(|&i| g.state(i).clone()).collect();
            Ok(Verdict::Violated(Counterexample {
                states,
                labels,
                loop_start,
            }))
        }
    }
}

/// Builds the reachable graph of `cfg` and checks `f` on it.
pub fn check(cfg: &ScenarioConfig, f: &Formula) -> Result<Verdict, CheckError> {
    let g = StateGraph::build(cfg)?;
    check_graph(
        &g,
        f,
        DepthBounds {
            initial: cfg.bounds.search_depth,
            max: cfg.bounds.max_depth,
        },
    )
}
