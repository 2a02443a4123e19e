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

//! Brute-force reference semantics: direct evaluation on ultimately
//! periodic words and exhaustive lasso enumeration.

use super::check::Kripke;
use super::formula::{Atom, Formula};

/// Evaluates `f` at position 0 of the word `w[0..n]` whose last position
/// continues at `loop_start`. `holds(i, a)` gives atom truth at position i.
pub fn eval_lasso(
    f: &Formula,
    n: usize,
    loop_start: usize,
    holds: &dyn Fn(usize, &Atom) -> bool,
) -> bool {
    assert!(n > 0 && loop_start < n);
    eval(f, n, loop_start, holds)[0]
}

fn succ(i: usize, n: usize, loop_start: usize) -> usize {
    if i + 1 < n {
        i + 1
    } else {
        loop_start
    }
}

fn eval(f: &Formula, n: usize, l: usize, holds: &dyn Fn(usize, &Atom) -> bool) -> Vec<bool> {
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => (0..n).map(|i| holds(i, a)).collect(),
        Formula::Not(a) => eval(a, n, l, holds).into_iter().map(|x| !x).collect(),
        Formula::And(a, b) => zip(eval(a, n, l, holds), eval(b, n, l, holds), |x, y| x && y),
        Formula::Or(a, b) => zip(eval(a, n, l, holds), eval(b, n, l, holds), |x, y| x || y),
        Formula::Implies(a, b) => zip(eval(a, n, l, holds), eval(b, n, l, holds), |x, y| !x || y),
        Formula::Next(a) => {
            let v = eval(a, n, l, holds);
            (0..n).map(|i| v[succ(i, n, l)]).collect()
        }
        Formula::Finally(a) => until(&vec![true; n], &eval(a, n, l, holds), n, l),
        Formula::Globally(a) => {
            let v = eval(a, n, l, holds);
            let neg: Vec<bool> = v.iter().map(|x| !x).collect();
            until(&vec![true; n], &neg, n, l)
                .into_iter()
                .map(|x| !x)
                .collect()
        }
        Formula::Until(a, b) => until(&eval(a, n, l, holds), &eval(b, n, l, holds), n, l),
        Formula::Release(a, b) => {
            let na: Vec<bool> = eval(a, n, l, holds).iter().map(|x| !x).collect();
            let nb: Vec<bool> = eval(b, n, l, holds).iter().map(|x| !x).collect();
            until(&na, &nb, n, l).into_iter().map(|x| !x).collect()
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Least fixpoint of `b ∨ (a ∧ X ·)` over the finite position graph.
fn until(a: &[bool], b: &[bool], n: usize, l: usize) -> Vec<bool> {
    let mut v = b.to_vec();
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            if !v[i] && a[i] && v[succ(i, n, l)] {
                v[i] = true;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Enumerates every lasso of at most `max_len` distinct positions from the
/// initial states and reports the first one falsifying `f`.
pub fn brute_force_check<K: Kripke>(
    k: &K,
    f: &Formula,
    max_len: usize,
) -> Option<(Vec<K::State>, usize)> {
    fn rec<K: Kripke>(
        k: &K,
        f: &Formula,
        path: &mut Vec<K::State>,
        max_len: usize,
    ) -> Option<(Vec<K::State>, usize)> {
        let last = path.last().unwrap().clone();
        let mut next = k.successors(&last);
        if next.is_empty() {
            next.push(last);
        }
        for t in &next {
            for (j, s) in path.iter().enumerate() {
                if s == t {
                    let holds = |i: usize, a: &Atom| k.holds(&path[i], a);
                    if !eval_lasso(f, path.len(), j, &holds) {
                        return Some((path.clone(), j));
                    }
                }
            }
        }
        if path.len() < max_len {
            for t in next {
                path.push(t);
                if let Some(hit) = rec(k, f, path, max_len) {
                    return Some(hit);
                }
                path.pop();
            }
        }
        None
    }
    for s in k.initial() {
        let mut path = vec![s];
        if let Some(hit) = rec(k, f, &mut path, max_len) {
            return Some(hit);
        }
    }
    None
}

/// Small explicit structure over free propositions, for testing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitKripke {
    /// Bit `k` of `labels[s]` is the truth of `pK` in state `s`.
    pub labels: Vec<u32>,
    pub succ: Vec<Vec<u32>>,
    pub initial: u32,
}

impl Kripke for ExplicitKripke {
    type State = u32;

    fn initial(&self) -> Vec<u32> {
        vec![self.initial]
    }

    fn successors(&self, s: &u32) -> Vec<u32> {
        self.succ[*s as usize].clone()
    }

    fn holds(&self, s: &u32, atom: &Atom) -> bool {
        match atom {
            Atom::Prop(k) => self.labels[*s as usize] >> k & 1 == 1,
            _ => false,
        }
    }
}
