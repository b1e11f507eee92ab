// SPDX-License-Identifier: Apache-2.0

//! `railnet`: command-line analysis of Y-switch rail networks.
//!
//! Exit codes: 0 success or one-way, 1 file or validation failure,
//! 2 usage error, 3 two-way, 4 no witness (the network is one-way).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use railnet::classify::{
    classify_by_angles, classify_by_components, classify_by_parity, oracle_enumerate, track_class, CycleAnalysis,
    Method, Verdict,
};
use railnet::double_track::{ArcId, DoubleTrackGraph, Orientation, PolarityMap};
use railnet::io::{export_dot, parse_network, View};
use railnet::journey::{check_functioning, journey_to_walk, simulate, ReachMode, SwitchPolicy};
use railnet::model::EndKind;
use railnet::randomgen::{monte_carlo, DisconnectedPolicy, GenConfig};
use railnet::{classify, Execution, RailNetwork};

/// `println!` that stops quietly when stdout is closed.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

fn emit(text: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TWO_WAY: u8 = 3;
const EXIT_NO_WITNESS: u8 = 4;

#[derive(Parser)]
#[command(name = "railnet", version, about = "Analyse Y-switch rail networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a network file is well formed and valid.
    Validate { file: PathBuf },
    /// Decide whether a network is one-way or two-way.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[arg(long)]
        json: bool,
    },
    /// Print a cycle with an odd number of cross tracks.
    Witness {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the canonical one-way orientation and switch polarities.
    Orient {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a train and print its journey.
    Simulate {
        file: PathBuf,
        /// Starting arc, e.g. `t1:forward` (forward runs from a track's first end to its second).
        #[arg(long)]
        start: ArcId,
        /// `a`, `b`, `random`, or `map:s1=a,s2=b,...`.
        #[arg(long, default_value = "a")]
        policy: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Seed for the `random` policy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check whether every track is reachable from every start.
    Functioning {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Search from every start separately instead of using the condensation.
        #[arg(long)]
        naive: bool,
    },
    /// Estimate functioning and one-way probabilities of random networks.
    Montecarlo {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
        /// Keep disconnected draws instead of redrawing.
        #[arg(long)]
        keep_disconnected: bool,
        #[arg(long)]
        sequential: bool,
    },
    /// Write Graphviz DOT for the network or its double-track graph.
    Dot {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ViewArg::Network)]
        view: ViewArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Label the graph with its classification.
        #[arg(long)]
        annotate: bool,
    },
    /// Try every orientation and print the one-way ones.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = railnet::classify::DEFAULT_ORACLE_BOUND)]
        bound: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Components,
    Parity,
    Angles,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Network,
    Double,
}

enum Failure {
    Usage(String),
    Invalid(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<RailNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_network(&text).with_context(|| format!("in {}", path.display()))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::OneWay => 0,
        Verdict::TwoWay => EXIT_TWO_WAY,
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn orientation_line(o: &Orientation) -> String {
    o.arcs().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

fn polarity_line(net: &RailNetwork, p: &PolarityMap) -> String {
    p.iter()
        .map(|(s, pol)| format!("{}={pol}", net.name(s)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn witness_summary(net: &RailNetwork, w: &CycleAnalysis) -> String {
    format!(
        "{} (cross {}, angles {})",
        w.cycle.display(net),
        w.cross_count,
        w.angle_count
    )
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { file } => {
            let net = load(&file)?;
            say!("valid: {} switches, {} tracks", net.switch_count(), net.track_count());
            Ok(0)
        }
        Command::Classify {
            file,
            method,
            json: as_json,
        } => {
            let net = load(&file)?;
            let single = match method {
                MethodArg::All => None,
                MethodArg::Components => Some(Method::Components),
                MethodArg::Parity => Some(Method::Parity),
                MethodArg::Angles => Some(Method::Angles),
            };
            if let Some(m) = single {
                let verdict = match m {
                    Method::Components => {
                        classify_by_components(&net)
                            .context("building the double-track graph")?
                            .verdict
                    }
                    Method::Parity => classify_by_parity(&net).verdict,
                    Method::Angles => classify_by_angles(&net),
                };
                if as_json {
                    say!("{}", json(&serde_json::json!({ "method": m, "verdict": verdict })));
                } else {
                    say!("{verdict}");
                }
                return Ok(verdict_code(verdict));
            }
            let report = classify(&net).context("classifying")?;
            if as_json {
                say!("{}", json(&report));
                return Ok(verdict_code(report.verdict));
            }
            let mut out = format!("{}\n", report.verdict);
            let m = report.methods;
            writeln!(out, "components: {}", report.component_count).unwrap();
            writeln!(
                out,
                "methods: components={} parity={} angles={}",
                m.components, m.parity, m.angles
            )
            .unwrap();
            if let Some((o, _)) = &report.orientation_pair {
                writeln!(out, "orientation: {}", orientation_line(o)).unwrap();
            }
            if let Some(p) = &report.polarity {
                writeln!(out, "polarity: {}", polarity_line(&net, p)).unwrap();
            }
            if let Some(w) = &report.witness {
                writeln!(out, "witness: {}", witness_summary(&net, w)).unwrap();
            }
            emit(&out);
            Ok(verdict_code(report.verdict))
        }
        Command::Witness { file, json: as_json } => {
            let net = load(&file)?;
            let report = classify(&net).context("classifying")?;
            let Some(w) = report.witness else {
                eprintln!("no witness: the network is one-way");
                return Ok(EXIT_NO_WITNESS);
            };
            if as_json {
                say!("{}", json(&w));
                return Ok(0);
            }
            say!("cycle: {}", w.cycle.display(&net));
            for (i, s) in w.cycle.steps().iter().enumerate() {
                say!(
                    "  {:>3} {} {} -> {} {}",
                    i + 1,
                    s.track,
                    net.end_label(s.exit),
                    net.end_label(s.entry),
                    track_class(net.track(s.track))
                );
            }
            say!("cross_count: {}", w.cross_count);
            say!("angle_count: {}", w.angle_count);
            let seq: Vec<String> = w.state_sequence.iter().map(|s| s.to_string()).collect();
            say!("state_sequence: {}", seq.join(" "));
            Ok(0)
        }
        Command::Orient { file, json: as_json } => {
            let net = load(&file)?;
            let report = classify(&net).context("classifying")?;
            let (Some((o, _)), Some(p)) = (&report.orientation_pair, &report.polarity) else {
                eprintln!("the network is two-way and has no one-way orientation");
                return Ok(EXIT_TWO_WAY);
            };
            if as_json {
                say!("{}", json(&serde_json::json!({ "orientation": o, "polarity": p })));
            } else {
                say!("orientation: {}", orientation_line(o));
                say!("polarity: {}", polarity_line(&net, p));
            }
            Ok(0)
        }
        Command::Simulate {
            file,
            start,
            policy,
            steps,
            seed,
        } => {
            let net = load(&file)?;
            if start.track().index() >= net.track_count() {
                return Err(Failure::Usage(format!(
                    "--start {start}: the network has {} tracks",
                    net.track_count()
                )));
            }
            let policy = parse_policy(&net, &policy, seed)?;
            let graph = DoubleTrackGraph::new(&net);
            let journey = simulate(&graph, start, &policy, steps);
            let arcs: Vec<String> = journey.arcs().iter().map(|a| a.to_string()).collect();
            say!("journey: {}", arcs.join(" "));
            say!("walk: {}", journey_to_walk(&net, &graph, &journey).display(&net));
            match journey.recurrence() {
                Some(r) => say!(
                    "recurrence: {} at steps {} and {}",
                    journey.arcs()[r.first],
                    r.first + 1,
                    r.again + 1
                ),
                None => say!("recurrence: none"),
            }
            Ok(0)
        }
        Command::Functioning {
            file,
            json: as_json,
            naive,
        } => {
            let net = load(&file)?;
            let mode = if naive {
                ReachMode::Naive
            } else {
                ReachMode::Condensation
            };
            let report = check_functioning(&net, mode);
            if as_json {
                say!("{}", json(&report));
                return Ok(0);
            }
            say!("functioning: {}", report.functioning);
            say!("unreachable pairs: {}", report.unreachable_pairs.len());
            for (start, track) in &report.unreachable_pairs {
                say!("  from {start}: {track}");
            }
            say!("coverage:");
            for (t, c) in net.track_ids().zip(&report.direction_coverage) {
                say!("  {t} {c}");
            }
            Ok(0)
        }
        Command::Montecarlo {
            sizes,
            samples,
            seed,
            csv,
            json: as_json,
            keep_disconnected,
            sequential,
        } => {
            let policy = if keep_disconnected {
                DisconnectedPolicy::Keep
            } else {
                DisconnectedPolicy::Reject
            };
            let sweep: Vec<GenConfig> = sizes
                .iter()
                .map(|&n| GenConfig {
                    disconnected_policy: policy,
                    ..GenConfig::new(n, seed, samples)
                })
                .collect();
            for cfg in &sweep {
                cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let report = monte_carlo(&sweep, exec).context("sampling")?;
            if csv {
                emit(&report.to_csv());
            } else if as_json {
                say!("{}", json(&report));
            } else {
                emit(&report.to_string());
            }
            Ok(0)
        }
        Command::Dot {
            file,
            view,
            out,
            annotate,
        } => {
            let net = load(&file)?;
            let report = if annotate {
                Some(classify(&net).context("classifying")?)
            } else {
                None
            };
            let view = match view {
                ViewArg::Network => View::Network,
                ViewArg::Double => View::DoubleTrack,
            };
            let dot = export_dot(&net, view, report.as_ref());
            match out {
                Some(path) => fs::write(&path, dot).with_context(|| format!("writing {}", path.display()))?,
                None => emit(&dot),
            }
            Ok(0)
        }
        Command::Oracle { file, bound } => {
            let net = load(&file)?;
            let found = oracle_enumerate(&net, bound, Execution::Parallel).context("enumerating orientations")?;
            say!("one-way orientations: {}", found.len());
            for o in &found {
                say!("  {}", orientation_line(o));
            }
            Ok(0)
        }
    }
}

fn parse_policy(net: &RailNetwork, spec: &str, seed: u64) -> Result<SwitchPolicy, Failure> {
    let branch = |s: &str| match s {
        "a" | "branch_a" => Ok(EndKind::BranchA),
        "b" | "branch_b" => Ok(EndKind::BranchB),
        _ => Err(Failure::Usage(format!("branch must be a or b, got `{s}`"))),
    };
    match spec {
        "a" => Ok(SwitchPolicy::AlwaysA),
        "b" => Ok(SwitchPolicy::AlwaysB),
        "random" => Ok(SwitchPolicy::SeededRandom(seed)),
        _ => {
            let Some(map) = spec.strip_prefix("map:") else {
                return Err(Failure::Usage(format!("unknown policy `{spec}`")));
            };
            let mut choices = Vec::new();
            for item in map.split(',') {
                let (name, b) = item
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("expected <switch>=<a|b>, got `{item}`")))?;
                choices.push((name, branch(b)?));
            }
            SwitchPolicy::fixed_map(net, choices).map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}
