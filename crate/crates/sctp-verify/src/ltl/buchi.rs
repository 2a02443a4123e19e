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

//! LTL to Büchi translation: negation normal form, the tableau expansion of
//! Gerth, Peled, Vardi and Wolper, and counter-based degeneralization.
//!
//! The resulting automaton is state-labeled. A run reads letter `i` in its
//! `i`-th state, which must satisfy that state's literals; runs start in
//! one of `initial`.

use super::formula::{Atom, Formula};
use rustc_hash::FxHashMap;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    True,
    False,
    Lit(Atom, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    ids: FxHashMap<Node, u32>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.ids.insert(n, id);
        id
    }

    /// Interns `f` (negated when `neg`) in negation normal form.
    fn nnf(&mut self, f: &Formula, neg: bool) -> u32 {
        let n = match f {
            Formula::True => {
                if neg {
                    Node::False
                } else {
                    Node::True
                }
            }
            Formula::False => {
                if neg {
                    Node::True
                } else {
                    Node::False
                }
            }
            Formula::Atom(a) => Node::Lit(*a, !neg),
            Formula::Not(a) => return self.nnf(a, !neg),
            Formula::And(a, b) => {
                let (x, y) = (self.nnf(a, neg), self.nnf(b, neg));
                if neg {
                    Node::Or(x, y)
                } else {
                    Node::And(x, y)
                }
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.nnf(a, neg), self.nnf(b, neg));
                if neg {
                    Node::And(x, y)
                } else {
                    Node::Or(x, y)
                }
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.nnf(a, !neg), self.nnf(b, neg));
                if neg {
                    Node::And(x, y)
                } else {
                    Node::Or(x, y)
                }
            }
            Formula::Next(a) => Node::Next(self.nnf(a, neg)),
            Formula::Globally(a) => {
                let x = self.nnf(a, neg);
                if neg {
                    Node::Until(self.intern(Node::True), x)
                } else {
                    Node::Release(self.intern(Node::False), x)
                }
            }
            Formula::Finally(a) => {
                let x = self.nnf(a, neg);
                if neg {
                    Node::Release(self.intern(Node::False), x)
                } else {
                    Node::Until(self.intern(Node::True), x)
                }
            }
            Formula::Until(a, b) => {
                let (x, y) = (self.nnf(a, neg), self.nnf(b, neg));
                if neg {
                    Node::Release(x, y)
                } else {
                    Node::Until(x, y)
                }
            }
            Formula::Release(a, b) => {
                let (x, y) = (self.nnf(a, neg), self.nnf(b, neg));
                if neg {
                    Node::Until(x, y)
                } else {
                    Node::Release(x, y)
                }
            }
        };
        self.intern(n)
    }
}

const INIT: u32 = u32::MAX;

#[derive(Clone)]
struct Pending {
    incoming: BTreeSet<u32>,
    new: BTreeSet<u32>,
    old: BTreeSet<u32>,
    next: BTreeSet<u32>,
}

struct TableauNode {
    incoming: BTreeSet<u32>,
    old: BTreeSet<u32>,
    next: BTreeSet<u32>,
}

fn expand(arena: &Arena, root: u32) -> Vec<TableauNode> {
    let mut graph: Vec<TableauNode> = Vec::new();
    let mut work = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    while let Some(mut node) = work.pop() {
        let Some(eta) = node.new.pop_first() else {
            if let Some(g) = graph
                .iter_mut()
                .find(|g| g.old == node.old && g.next == node.next)
            {
                g.incoming.extend(node.incoming);
                continue;
            }
            let id = graph.len() as u32;
            work.push(Pending {
                incoming: BTreeSet::from([id]),
                new: node.next.clone(),
                old: BTreeSet::new(),
                next: BTreeSet::new(),
            });
            graph.push(TableauNode {
                incoming: node.incoming,
                old: node.old,
                next: node.next,
            });
            continue;
        };
        if node.old.contains(&eta) {
            work.push(node);
            continue;
        }
        let add = |node: &mut Pending, xs: &[u32]| {
            for &x in xs {
                if !node.old.contains(&x) {
                    node.new.insert(x);
                }
            }
        };
        match arena.nodes[eta as usize] {
            Node::False => {}
            Node::True => {
                node.old.insert(eta);
                work.push(node);
            }
            Node::Lit(a, pos) => {
                let clash = arena
                    .ids
                    .get(&Node::Lit(a, !pos))
                    .is_some_and(|n| node.old.contains(n));
                if !clash {
                    node.old.insert(eta);
                    work.push(node);
                }
            }
            Node::And(x, y) => {
                node.old.insert(eta);
                add(&mut node, &[x, y]);
                work.push(node);
            }
            Node::Next(x) => {
                node.old.insert(eta);
                node.next.insert(x);
                work.push(node);
            }
            Node::Or(x, y) | Node::Until(x, y) | Node::Release(x, y) => {
                node.old.insert(eta);
                let mut first = node.clone();
                let mut second = node;
                match arena.nodes[eta as usize] {
                    Node::Or(..) => {
                        add(&mut first, &[x]);
                        add(&mut second, &[y]);
                    }
                    Node::Until(..) => {
                        add(&mut first, &[x]);
                        first.next.insert(eta);
                        add(&mut second, &[y]);
                    }
                    _ => {
                        add(&mut first, &[y]);
                        first.next.insert(eta);
                        add(&mut second, &[x, y]);
                    }
                }
                // Pushed in reverse so the first branch is expanded first.
                work.push(second);
                work.push(first);
            }
        }
    }
    graph
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiState {
    /// Literals the current letter must satisfy.
    pub label: Vec<(Atom, bool)>,
    pub successors: Vec<u32>,
    pub accepting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub states: Vec<BuchiState>,
    pub initial: Vec<u32>,
}

impl BuchiAutomaton {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn accepts_letter(&self, q: u32, holds: impl Fn(&Atom) -> bool) -> bool {
        self.states[q as usize]
            .label
            .iter()
            .all(|(a, pos)| holds(a) == *pos)
    }
}

/// Translates `f` into a Büchi automaton accepting exactly its models.
pub fn to_buchi(f: &Formula) -> BuchiAutomaton {
    let mut arena = Arena::default();
    let root = arena.nnf(f, false);
    let graph = expand(&arena, root);

    let untils: Vec<(u32, u32)> = arena
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n {
            Node::Until(_, b) => Some((i as u32, *b)),
            _ => None,
        })
        .collect();
    let in_set = |g: usize, k: usize| {
        let (u, b) = untils[k];
        !graph[g].old.contains(&u) || graph[g].old.contains(&b)
    };

    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); graph.len()];
    let mut init = Vec::new();
    for (j, g) in graph.iter().enumerate() {
        for &i in &g.incoming {
            if i == INIT {
                init.push(j as u32);
            } else {
                succ[i as usize].push(j as u32);
            }
        }
    }
    let label = |g: usize| -> Vec<(Atom, bool)> {
        graph[g]
            .old
            .iter()
            .filter_map(|&n| match arena.nodes[n as usize] {
                Node::Lit(a, p) => Some((a, p)),
                _ => None,
            })
            .collect()
    };

    let k = untils.len();
    if k == 0 {
        let states = (0..graph.len())
            .map(|g| BuchiState {
                label: label(g),
                successors: succ[g].clone(),
                accepting: true,
            })
            .collect();
        return BuchiAutomaton {
            states,
            initial: init,
        };
    }

    // Degeneralize over (node, counter); the counter advances when the
    // source node is in the counter's acceptance set.
    let mut index: FxHashMap<(u32, usize), u32> = FxHashMap::default();
    let mut order: Vec<(u32, usize)> = Vec::new();
    let mut intern = |key: (u32, usize), order: &mut Vec<(u32, usize)>| -> u32 {
        *index.entry(key).or_insert_with(|| {
            order.push(key);
            (order.len() - 1) as u32
        })
    };
    let initial: Vec<u32> = init.iter().map(|&g| intern((g, 0), &mut order)).collect();
    let mut states = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (g, c) = order[i];
        let c2 = if in_set(g as usize, c) {
            (c + 1) % k
        } else {
            c
        };
        let successors = succ[g as usize]
            .iter()
            .map(|&h| intern((h, c2), &mut order))
            .collect();
        states.push(BuchiState {
            label: label(g as usize),
            successors,
            accepting: c == 0 && in_set(g as usize, 0),
        });
        i += 1;
    }
    BuchiAutomaton { states, initial }
}
