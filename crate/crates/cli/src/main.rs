use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lossmon_core::automata::json::AutomatonDoc;
use lossmon_core::bundled::BundledProperty;
use lossmon_core::dot::{dfa_to_dot, nfa_to_dot};
use lossmon_core::experiment::{run_and_write, ExperimentConfig};
use lossmon_core::injector::{inject_dropped_count, LossConfig};
use lossmon_core::lossmodel::LossSpec;
use lossmon_core::oracle::{check_monitor_against_oracle, OracleReport};
use lossmon_core::specio::{load_property, LoadedProperty};
use lossmon_core::synthesis::{
    approximate, default_keep_heuristic, synthesize, AlternateMonitor, MonitorDoc, SynthesisOptions,
};
use lossmon_core::{LossModel, Monitor, MonitorMode};

#[derive(Parser)]
#[command(name = "lossmon", version, about = "Monitors for finite-state properties over lossy event streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Complete,
    Sound,
}

impl From<Mode> for MonitorMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Complete => MonitorMode::Complete,
            Mode::Sound => MonitorMode::Sound,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Complete,
    Sound,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DotTarget {
    /// The property automaton.
    Property,
    /// The alternate NFA over the lossy alphabet.
    Alternate,
    /// The minimized alternate monitor.
    Monitor,
}

#[derive(clap::Args)]
struct PropertyArgs {
    /// `builtin:NAME`, a property spec JSON, or an automaton JSON.
    #[arg(long)]
    property: String,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize an alternate monitor and write it as JSON.
    Synth {
        #[command(flatten)]
        property: PropertyArgs,
        /// Loss model: identity, dropped_count:N, silent_drop:a,b,
        /// frequency_count:N, merged_objects:N:a,b, or inline/file JSON.
        #[arg(long)]
        loss: String,
        #[arg(long, value_enum, default_value = "complete")]
        mode: Mode,
        /// Approximate with the default heuristic, keeping this many labels.
        #[arg(long)]
        approx_budget: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a monitor over symbols read from a file or standard input and
    /// print one TSV row per step.
    Run {
        /// Monitor JSON written by `synth`.
        #[arg(long, conflicts_with = "property")]
        monitor: Option<PathBuf>,
        /// Monitor a property directly.
        #[arg(long)]
        property: Option<String>,
        /// Symbol file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Apply dropped-count loss to a trace.
    Inject {
        #[command(flatten)]
        property: PropertyArgs,
        /// Trace file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[arg(long, default_value_t = 3.0)]
        eta: f64,
        #[arg(long, default_value_t = 5)]
        bound_n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a synthesized monitor against the brute-force oracle.
    Verify {
        #[command(flatten)]
        property: PropertyArgs,
        #[arg(long)]
        loss: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: VerifyMode,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Run the simulation matrix and write results.csv and curves.csv.
    Experiment {
        /// JSON config; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's traces_per_length.
        #[arg(long)]
        traces: Option<usize>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a Graphviz description of an automaton.
    ExportDot {
        #[command(flatten)]
        property: PropertyArgs,
        #[arg(long)]
        loss: Option<String>,
        #[arg(long, value_enum, default_value = "property")]
        what: DotTarget,
        #[arg(long, value_enum, default_value = "complete")]
        mode: Mode,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Synth { property, loss, mode, approx_budget, out } => {
            let monitor = build_monitor(&property.property, &loss, mode.into(), approx_budget)?;
            let json = serde_json::to_string_pretty(&monitor.to_doc())?;
            match out {
                Some(path) => fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            eprintln!("{} states over {} lossy symbols", monitor.num_states(), monitor.gamma().len());
        }
        Command::Run { monitor, property, input } => {
            let m = match (monitor, property) {
                (Some(path), _) => load_monitor(&path)?,
                (None, Some(src)) => Monitor::from_property(load(&src)?.dfa()?),
                (None, None) => bail!("one of --monitor or --property is required"),
            };
            run(&m, &read_symbols(input.as_deref())?)?;
        }
        Command::Inject { property, input, rho, eta, bound_n, seed } => {
            let p = load(&property.property)?;
            let sigma = p.automaton.alphabet();
            let tokens = read_symbols(input.as_deref())?;
            let trace = sigma.encode(tokens.iter().map(String::as_str))?;
            let prefix = usize::from(trace.first().is_some_and(|a| p.creation.contains(a)));
            let out = inject_dropped_count(&trace, prefix, &LossConfig { rho, eta, bound_n, seed })?;
            let s = out.stats;
            println!("{}", out.to_names(sigma).join(" "));
            println!(
                "# creation={} kept={} skipped={} emitted={} kept_pct={:.2}",
                s.creation,
                s.kept,
                s.skipped,
                out.symbols.len(),
                100.0 * s.kept_fraction()
            );
        }
        Command::Verify { property, loss, mode, max_len } => {
            let p = load(&property.property)?;
            let modes: &[MonitorMode] = match mode {
                VerifyMode::Complete => &[MonitorMode::Complete],
                VerifyMode::Sound => &[MonitorMode::Sound],
                VerifyMode::Both => &[MonitorMode::Complete, MonitorMode::Sound],
            };
            let mut passed = true;
            for &m in modes {
                if m == MonitorMode::Sound && matches!(p.automaton, BundledProperty::Nfa(_)) {
                    println!("sound: skipped (NFA property)");
                    continue;
                }
                let (model, report) = verify(&p, &loss, m, max_len)?;
                passed &= report.passed();
                print_report(m, &model, &report);
            }
            return Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Experiment { config, out, traces, seed } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::from_json(&read(&path)?)?,
                None => ExperimentConfig::default(),
            };
            if let Some(t) = traces {
                cfg.traces_per_length = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let results = run_and_write(&cfg, &out)?;
            for w in &results.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("wrote {} result rows to {}", results.results.len(), out.display());
        }
        Command::ExportDot { property, loss, what, mode } => {
            let p = load(&property.property)?;
            let dot = match what {
                DotTarget::Property => match &p.automaton {
                    BundledProperty::Dfa(d) => dfa_to_dot(&p.name, d, None),
                    BundledProperty::Nfa(n) => nfa_to_dot(&p.name, n),
                },
                DotTarget::Alternate | DotTarget::Monitor => {
                    let loss = loss.context("--loss is required for alternate and monitor graphs")?;
                    let m = build_monitor(&property.property, &loss, mode.into(), None)?;
                    let name = format!("{} / {}", p.name, m.source.loss);
                    match what {
                        DotTarget::Alternate => nfa_to_dot(&name, &m.alternate),
                        _ => dfa_to_dot(&name, &m.minimal.dfa, Some(&m.minimal.labels)),
                    }
                }
            };
            print!("{dot}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(source: &str) -> Result<LoadedProperty> {
    load_property(source).with_context(|| format!("loading property `{source}`"))
}

fn loss_spec(text: &str) -> Result<LossSpec> {
    let path = Path::new(text);
    if text.ends_with(".json") && path.exists() {
        return Ok(LossSpec::from_json(&read(path)?)?);
    }
    Ok(text.parse::<LossSpec>()?)
}

fn build_model(p: &LoadedProperty, loss: &str) -> Result<LossModel> {
    let spec = loss_spec(loss)?;
    Ok(match &p.automaton {
        BundledProperty::Dfa(d) => spec.build(d)?,
        BundledProperty::Nfa(n) => spec.build(n)?,
    })
}

fn build_monitor(source: &str, loss: &str, mode: MonitorMode, budget: Option<usize>) -> Result<AlternateMonitor> {
    let p = load(source)?;
    let model = build_model(&p, loss)?;
    let opts = SynthesisOptions::default();
    let mut m = match &p.automaton {
        BundledProperty::Dfa(d) => synthesize(d, &model, mode, opts)?,
        BundledProperty::Nfa(n) => synthesize(n, &model, mode, opts)?,
    };
    if let Some(b) = budget {
        let keep = default_keep_heuristic(&m, b)?;
        m = approximate(&m, &keep)?;
    }
    m.source.property = p.name;
    Ok(m)
}

fn verify(p: &LoadedProperty, loss: &str, mode: MonitorMode, max_len: usize) -> Result<(LossModel, OracleReport)> {
    let model = build_model(p, loss)?;
    let opts = SynthesisOptions::default();
    let report = match &p.automaton {
        BundledProperty::Dfa(d) => {
            let m = synthesize(d, &model, mode, opts)?;
            check_monitor_against_oracle(d, &model, &m, max_len)?
        }
        BundledProperty::Nfa(n) => {
            let m = synthesize(n, &model, mode, opts)?;
            check_monitor_against_oracle(n, &model, &m, max_len)?
        }
    };
    Ok((model, report))
}

fn print_report(mode: MonitorMode, model: &LossModel, r: &OracleReport) {
    let mode = match mode {
        MonitorMode::Complete => "complete",
        MonitorMode::Sound => "sound",
    };
    let status = if r.passed() { "PASS" } else { "FAIL" };
    println!(
        "{mode}: {status} loss={} checked={} rejected={} counterexamples={} label_violations={}",
        model.descriptor(),
        r.checked,
        r.rejected,
        r.counterexamples.len(),
        r.label_violations.len()
    );
    for c in r.counterexamples.iter().take(20) {
        println!(
            "  counterexample y=\"{}\" oracle={:?} monitor_rejects={}",
            c.y.join(" "),
            c.classification,
            c.monitor_rejects
        );
    }
    for v in r.label_violations.iter().take(20) {
        println!("  label y=\"{}\" label={} missing={:?}", v.y.join(" "), v.label, v.missing);
    }
}

fn load_monitor(path: &Path) -> Result<Monitor> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("mode").is_some() {
        let doc: MonitorDoc = serde_json::from_value(value).context("monitor document")?;
        return Ok(Monitor::from_labeled(&doc.automaton.to_labeled_dfa()?));
    }
    let doc: AutomatonDoc = serde_json::from_value(value).context("automaton document")?;
    Ok(match doc.labels {
        Some(_) => Monitor::from_labeled(&doc.to_labeled_dfa()?),
        None => Monitor::from_property(&doc.to_dfa()?),
    })
}

fn read_symbols(input: Option<&Path>) -> Result<Vec<String>> {
    let text = match input {
        Some(path) => read(path)?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        }
    };
    Ok(text.split_whitespace().map(String::from).collect())
}

fn run(monitor: &Monitor, tokens: &[String]) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "step\tsymbol\tstate\tlabel\tverdict")?;
    let mut session = monitor.session();
    let label = |s: &lossmon_core::MonitorSession<'_>| s.label().map_or_else(|| "-".to_string(), |l| l.to_string());
    writeln!(out, "0\t-\t{}\t{}\t{}", session.current(), label(&session), session.verdict())?;
    for (i, t) in tokens.iter().enumerate() {
        session.step_symbol(t).with_context(|| format!("symbol {} (`{t}`)", i + 1))?;
        writeln!(out, "{}\t{t}\t{}\t{}\t{}", i + 1, session.current(), label(&session), session.verdict())?;
    }
    Ok(())
}
