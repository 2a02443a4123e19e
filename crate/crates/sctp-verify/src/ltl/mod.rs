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

//! Linear temporal logic: syntax, translation and model checking.

mod buchi;
mod check;
mod formula;
pub mod oracle;
mod parser;

pub use buchi::{to_buchi, BuchiAutomaton, BuchiState};
pub use check::{
    check, check_graph, check_kripke, CheckError, Counterexample, DepthBounds, Kripke,
    KripkeVerdict, Lasso, Verdict, STUTTER,
};
pub use formula::{
    builtin_properties, builtin_property, Atom, Formula, NamedProperty, PHI4_STRICT, PROPERTY_TEXTS,
};
pub use parser::{parse_formula, ParseError};
