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

//! Command-line driver for baseline checks, the attack matrix and traces.

use clap::{Args, Parser, Subcommand, ValueEnum};
use sctp_verify::attacker::{build_daisy, vocab_for, AttackerModelKind, Phase};
use sctp_verify::experiment::{
    ambiguity_demo, check_against_reference, render_trace, replay_trace, reproduce_cve, run_matrix,
    verify_baseline, CveOutcome, ExperimentConfig, ExperimentError, PatchMode, Trace,
    AMBIGUITY_WRONG_VTAG_STEP,
};
use sctp_verify::protocol::PeerState;
use sctp_verify::system::{explore, ScenarioConfig, SystemError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BOUND: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sctp-verify",
    version,
    about = "Model checking and attack synthesis for SCTP"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every property without an attacker.
    VerifyBaseline(Common),
    /// Synthesize attacks for each model and property.
    Matrix {
        #[command(flatten)]
        common: Common,
        /// Compare cell outcomes with the bundled reference matrix.
        #[arg(long)]
        check_against_paper: bool,
    },
    /// Rediscover the off-path INIT attack and shrink it.
    ReproduceCve(Common),
    /// Run the guided tag-ambiguity schedule.
    AmbiguityDemo {
        /// Output directory for the trace and chart.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace file and print it as a sequence chart.
    RenderTrace { file: PathBuf },
    /// Summarize the reachable state space.
    Explore(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Patch {
    On,
    Off,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    patch: Option<Patch>,
    /// Answer unexpected INITs in forming states with the held tag.
    #[arg(long)]
    misinterpret: bool,
    /// Force TSNs on or off for every model.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "on")]
    tsn: Option<Toggle>,
    /// Attacker models, comma separated or repeated.
    #[arg(long = "model", value_delimiter = ',')]
    models: Vec<String>,
    /// Properties, comma separated or repeated.
    #[arg(long = "property", value_delimiter = ',')]
    properties: Vec<String>,
    #[arg(long)]
    max_attacks: Option<usize>,
    /// Initial search depth.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    budget: Option<u8>,
    #[arg(long)]
    replay_capacity: Option<u8>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Experiment(ExperimentError::Config(_)) => EXIT_USAGE,
            CliError::Experiment(ExperimentError::BoundExceeded)
            | CliError::Experiment(ExperimentError::System(SystemError::BoundExceeded {
                ..
            })) => EXIT_BOUND,
            CliError::Experiment(ExperimentError::Trace(_)) => EXIT_USAGE,
            _ => EXIT_FAILED,
        }
    }
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("invalid config {}: {e}", path.display()))
                })?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(p) = self.patch {
            cfg.patch = match p {
                Patch::On => PatchMode::On,
                Patch::Off => PatchMode::Off,
                Patch::Both => PatchMode::Both,
            };
        }
        cfg.misinterpret |= self.misinterpret;
        if let Some(t) = self.tsn {
            cfg.tsn = Some(matches!(t, Toggle::On));
        }
        if !self.models.is_empty() {
            cfg.models = self
                .models
                .iter()
                .map(|m| {
                    AttackerModelKind::from_name(m)
                        .ok_or_else(|| CliError::Usage(format!("unknown model `{m}`")))
                })
                .collect::<Result<_, _>>()?;
        }
        if !self.properties.is_empty() {
            cfg.properties = self.properties.clone();
        }
        if let Some(n) = self.max_attacks {
            cfg.max_attacks = n;
        }
        if let Some(n) = self.depth {
            cfg.search_depth = n;
        }
        if let Some(n) = self.max_depth {
            cfg.max_depth = n;
        }
        if self.budget.is_some() {
            cfg.budget = self.budget;
        }
        if let Some(n) = self.replay_capacity {
            cfg.replay_capacity = n;
        }
        if let Some(n) = self.jobs {
            cfg.jobs = n;
        }
        for w in cfg.validate()? {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_trace(out: &Path, name: &str, trace: &Trace) -> Result<(), CliError> {
    write(
        &out.join("traces").join(format!("{name}.json")),
        &trace.to_json(),
    )?;
    write(
        &out.join("charts").join(format!("{name}.txt")),
        &render_trace(trace),
    )
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_baseline(common: &Common) -> Result<u8, CliError> {
    let cfg = common.resolve()?;
    let report = verify_baseline(&cfg)?;
    for run in &report.runs {
        println!(
            "patch {}: {} states, {} edges, {} deadlocks, {}/9 states reachable",
            if run.patch { "on" } else { "off" },
            run.states,
            run.edges,
            run.deadlocks,
            run.reachable.len()
        );
        for v in &run.verdicts {
            println!(
                "  {:<6} {}",
                v.property,
                if v.holds { "holds" } else { "VIOLATED" }
            );
        }
    }
    if let Some(out) = &common.out {
        write(&out.join("report.json"), &to_json(&report))?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_matrix(common: &Common, check: bool) -> Result<u8, CliError> {
    let cfg = common.resolve()?;
    let run = run_matrix(&cfg)?;
    print!("{}", run.report.summary_table());
    if let Some(out) = &common.out {
        write(&out.join("report.json"), &to_json(&run.report))?;
        write(&out.join("summary.txt"), &run.report.summary_table())?;
        for (name, trace) in &run.traces {
            write_trace(out, name, trace)?;
        }
    }
    let invalid = run
        .report
        .cells
        .iter()
        .flat_map(|c| &c.attacks)
        .filter(|a| !a.validated)
        .count();
    if invalid > 0 {
        eprintln!("{invalid} synthesized attacks failed revalidation");
    }
    let mismatches = if check {
        check_against_reference(&run.report)
    } else {
        Vec::new()
    };
    for m in &mismatches {
        println!(
            "mismatch: {} {} patch {}: expected {}, got {}",
            m.model,
            m.property,
            if m.patch { "on" } else { "off" },
            if m.expected_attack {
                "an attack"
            } else {
                "none"
            },
            m.outcome.label()
        );
    }
    Ok(if run.report.any_bounded() {
        EXIT_BOUND
    } else if invalid > 0 || !mismatches.is_empty() {
        EXIT_FAILED
    } else {
        EXIT_OK
    })
}

fn cmd_cve(common: &Common) -> Result<u8, CliError> {
    let cfg = common.resolve()?;
    let mut code = EXIT_OK;
    for patch in cfg.patch.settings() {
        let label = if patch { "on" } else { "off" };
        let outcome = reproduce_cve(&cfg, patch)?;
        match &outcome {
            CveOutcome::Attack {
                shrunk,
                victim_abort,
                validated,
                trace,
                ..
            } => {
                let steps: Vec<String> = shrunk.iter().map(|a| a.to_string()).collect();
                println!(
                    "patch {label}: attack [{}] validated={validated}",
                    steps.join("; ")
                );
                print!("{}", render_trace(trace));
                if patch || !victim_abort || !validated {
                    code = EXIT_FAILED;
                }
                if let Some(out) = &common.out {
                    write_trace(out, &format!("cve_patch-{label}"), trace)?;
                }
            }
            CveOutcome::NoAttack {
                exhausted,
                states_explored,
            } => {
                println!(
                    "patch {label}: no attack exists (search exhausted: {exhausted}, {states_explored} states)"
                );
                if !exhausted {
                    code = EXIT_BOUND;
                }
            }
        }
        if let Some(out) = &common.out {
            write(
                &out.join(format!("cve_patch-{label}.json")),
                &to_json(&outcome),
            )?;
        }
    }
    Ok(code)
}

fn cmd_ambiguity(out: Option<&Path>) -> Result<u8, CliError> {
    let on = ambiguity_demo(true)?;
    let [a, b] = on.final_states;
    println!(
        "misinterpretation on: A={a} B={b} persistent={} ({})",
        on.persistent, on.caveat
    );
    print!("{}", render_trace(&on.trace));
    if let Some(out) = out {
        write_trace(out, "ambiguity", &on.trace)?;
    }
    let blocked = match ambiguity_demo(false) {
        Err(ExperimentError::ScheduleInfeasible { step, expected, .. }) => {
            println!(
                "misinterpretation off: blocked at step {} ({expected})",
                step + 1
            );
            step == AMBIGUITY_WRONG_VTAG_STEP
        }
        Ok(_) => {
            println!("misinterpretation off: schedule unexpectedly completed");
            false
        }
        Err(e) => return Err(e.into()),
    };
    let reached = on.persistent && on.final_states == [PeerState::Closed, PeerState::Established];
    Ok(if reached && blocked {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_render(file: &Path) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", file.display())))?;
    let trace = Trace::from_json(&text).map_err(ExperimentError::from)?;
    print!("{}", render_trace(&trace));
    Ok(if replay_trace(&trace).is_ok() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_explore(common: &Common) -> Result<u8, CliError> {
    let cfg = common.resolve()?;
    let models: Vec<Option<AttackerModelKind>> = if common.models.is_empty() {
        vec![None]
    } else {
        cfg.models.iter().copied().map(Some).collect()
    };
    let mut code = EXIT_OK;
    for patch in cfg.patch.settings() {
        for model in &models {
            let attacker = match model {
                Some(m) => Some(
                    build_daisy(*m, vocab_for(*m, Phase::Full), cfg.budget_for(*m))
                        .map_err(ExperimentError::from)?,
                ),
                None => None,
            };
            let scenario = ScenarioConfig {
                peer: cfg.peer_config(patch, *model),
                timer_mode: cfg.timer_mode,
                attacker,
                bounds: cfg.bounds(),
                ignore_stale_tags: false,
            };
            match explore(&scenario) {
                Ok(s) => {
                    let name = model.map(|m| m.name()).unwrap_or("no attacker");
                    println!(
                        "{name}, patch {}: {} states, {} edges, {} deadlocks, {} reachable, unreachable {:?}",
                        if patch { "on" } else { "off" },
                        s.states,
                        s.edges,
                        s.deadlocks,
                        s.reachable.len(),
                        s.unreachable
                    );
                    if model.is_none() && (s.deadlocks > 0 || !s.unreachable.is_empty()) {
                        code = EXIT_FAILED;
                    }
                }
                Err(SystemError::BoundExceeded { cap }) => {
                    println!("state cap of {cap} exceeded");
                    code = EXIT_BOUND;
                }
                Err(e) => return Err(ExperimentError::from(e).into()),
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyBaseline(c) => cmd_baseline(c),
        Command::Matrix {
            common,
            check_against_paper,
        } => cmd_matrix(common, *check_against_paper),
        Command::ReproduceCve(c) => cmd_cve(c),
        Command::AmbiguityDemo { out } => cmd_ambiguity(out.as_deref()),
        Command::RenderTrace { file } => cmd_render(file),
        Command::Explore(c) => cmd_explore(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
