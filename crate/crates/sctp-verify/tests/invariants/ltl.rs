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

use super::check;
use proptest::prelude::*;
use sctp_verify::ltl::oracle::{brute_force_check, eval_lasso, ExplicitKripke};
use sctp_verify::ltl::{check_kripke, Atom, DepthBounds, Formula, Kripke, KripkeVerdict};

/// Formulas of depth at most 3 over two free propositions.
fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (0..2u8).prop_map(|k| Formula::atom(Atom::Prop(k))),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::globally),
            inner.clone().prop_map(Formula::finally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::release(a, b)),
        ]
    })
}

/// Structures with one to five states, possibly with dead ends.
fn kripke() -> impl Strategy<Value = ExplicitKripke> {
    (1..=5usize).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..4u32, n),
            proptest::collection::vec(proptest::collection::vec(0..n as u32, 0..=2), n),
        )
            .prop_map(|(labels, succ)| {
                let succ = succ
                    .into_iter()
                    .map(|mut v| {
                        v.sort_unstable();
                        v.dedup();
                        v
                    })
                    .collect();
                ExplicitKripke {
                    labels,
                    succ,
                    initial: 0,
                }
            })
    })
}

/// Long enough for every lasso the structures above can need in practice.
const ORACLE_LEN: usize = 12;

pub fn checker_agrees_with_lasso_enumeration(cases: u32) -> Result<(), String> {
    check(cases, (formula(), kripke()), |(f, k)| {
        prop_assume!(f.depth() <= 3);
        let verdict = check_kripke(&k, &f, DepthBounds::default())
            .expect("tiny structures never hit the bound");
        let oracle = brute_force_check(&k, &f, ORACLE_LEN);
        match verdict {
            KripkeVerdict::Holds => {
                prop_assert!(oracle.is_none(), "oracle refutes {f} on {k:?}: {oracle:?}")
            }
            KripkeVerdict::Violated(lasso) => {
                prop_assert!(
                    oracle.is_some(),
                    "oracle finds no counterexample to {f} on {k:?}"
                );
                let (states, loop_start) = lasso.unrolled();
                prop_assert_eq!(states[0], k.initial);
                for (i, s) in states.iter().enumerate() {
                    let next = if i + 1 < states.len() {
                        states[i + 1]
                    } else {
                        states[loop_start]
                    };
                    let succ = k.successors(s);
                    prop_assert!(
                        succ.contains(&next) || (succ.is_empty() && next == *s),
                        "lasso leaves the structure"
                    );
                }
                let holds = |i: usize, a: &Atom| k.holds(&states[i], a);
                prop_assert!(
                    !eval_lasso(&f, states.len(), loop_start, &holds),
                    "lasso satisfies {f}"
                );
            }
        }
        Ok(())
    })
}
