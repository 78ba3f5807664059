//! `syncmdp`: decide synchronizing objectives on model files.
//!
//! Exit codes: 0 yes, 1 no, 2 inconclusive, 3 or more on errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use syncmdp::decision::{Ctx, Function, Mode, Objective};
use syncmdp::dist::parse_rational;
use syncmdp::fixtures::example;
use syncmdp::format::{parse_model, write_model_with, ModelFile};
use syncmdp::generators::{prime_cycle_mdp, random_mdp, random_subset};
use syncmdp::play::witness_strategy;
use syncmdp::query::{run_query, Answer, Query, Verdict};
use syncmdp::set::StateSet;
use syncmdp::transforms::{mbc_to_mdp, reduce_event_to_weak, reduce_preempty_to_almostweak, MonotoneCircuit};
use syncmdp::validation::{
    check_sync, oracle_sure_event, oracle_sure_strong_max, oracle_sure_strong_sum, oracle_sure_weak, run_trace,
    trace_csv, verify_witness, SyncKind, VerifyOptions,
};
use syncmdp::{event, strong, weak, Mdp};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "syncmdp",
    version,
    about = "Synchronizing objectives in Markov decision processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a query and print the JSON verdict.
    Check {
        model: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// Also write the verdict to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the witness strategy of a yes-verdict and write a CSV trace.
    Trace {
        model: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 30)]
        horizon: usize,
        /// CSV destination; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Decimal digits in the CSV.
        #[arg(long, default_value_t = 6)]
        digits: usize,
        /// Synchronization threshold for the report; 1 in sure mode, 0.99 otherwise.
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Write generated models.
    Generate(GenerateArgs),
    /// Compare the sure-mode deciders against the support-graph oracle.
    OracleCompare(CompareArgs),
    /// Re-verify the witness of a JSON verdict.
    VerifyWitness {
        model: PathBuf,
        verdict: PathBuf,
        #[arg(long, default_value_t = 10)]
        phases: usize,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    objective: Objective,
    #[arg(long)]
    mode: Mode,
    #[arg(long, default_value = "sum")]
    function: Function,
    /// Comma-separated target states; defaults to the model's `#! target`.
    #[arg(long, value_delimiter = ',')]
    target: Option<Vec<String>>,
    /// A state name or `name:p,...`; defaults to the model's `#! init`.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    max_period: Option<usize>,
}

impl QueryArgs {
    fn resolve(&self, file: &ModelFile) -> Result<Query> {
        let target = self
            .target
            .clone()
            .or_else(|| file.target.clone())
            .ok_or_else(|| anyhow!("no --target given and the model has no `#! target`"))?;
        let init = self
            .init
            .clone()
            .or_else(|| file.init.clone())
            .ok_or_else(|| anyhow!("no --init given and the model has no `#! init`"))?;
        Ok(Query {
            objective: self.objective,
            function: self.function,
            mode: self.mode,
            target,
            init,
            max_period: self.max_period,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Random,
    PrimeCycle,
    Mbc,
    EventToWeak,
    Preempty,
    Fixture,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of cycles for `prime-cycle`.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 3)]
    branching: usize,
    /// Name for `fixture`.
    #[arg(long)]
    name: Option<String>,
    /// Circuit depth for `mbc`.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Emit this many models with consecutive seeds into the `--out` directory.
    #[arg(long)]
    count: Option<u64>,
    /// File, or directory with `--count`; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory of model files with `#! init` and `#! target`.
    corpus: Option<PathBuf>,
    /// Instead of a corpus, this many random models from `--seed` on.
    #[arg(long)]
    random: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 3)]
    branching: usize,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { model, query, out } => {
            let file = load(&model)?;
            let v = run_query(&file.mdp, &query.resolve(&file)?)?;
            let text = serde_json::to_string_pretty(&v)?;
            println!("{text}");
            if let Some(out) = out {
                fs::write(&out, format!("{text}\n")).with_context(|| format!("writing {}", out.display()))?;
            }
            Ok(v.verdict.exit_code() as u8)
        }
        Command::Trace {
            model,
            query,
            horizon,
            out,
            digits,
            threshold,
        } => {
            let file = load(&model)?;
            let q = query.resolve(&file)?;
            let v = run_query(&file.mdp, &q)?;
            if v.verdict != Answer::Yes {
                bail!("verdict is {:?}; only yes-verdicts have a strategy to trace", v.verdict);
            }
            trace(&file.mdp, &v, horizon, out.as_deref(), digits, threshold.as_deref())?;
            Ok(0)
        }
        Command::Generate(args) => generate(&args).map(|()| 0),
        Command::OracleCompare(args) => compare(&args),
        Command::VerifyWitness { model, verdict, phases } => {
            let file = load(&model)?;
            let text = fs::read_to_string(&verdict).with_context(|| format!("reading {}", verdict.display()))?;
            let v: Verdict = serde_json::from_str(&text).context("parsing verdict")?;
            let opts = VerifyOptions {
                phases,
                ..VerifyOptions::default()
            };
            let report = verify_witness(&file.mdp, &v, &opts)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.ok { 0 } else { 1 })
        }
    }
}

fn load(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text).with_context(|| format!("in {}", path.display()))
}

fn trace(
    m: &Mdp,
    v: &Verdict,
    horizon: usize,
    out: Option<&Path>,
    digits: usize,
    threshold: Option<&str>,
) -> Result<()> {
    let q = &v.query;
    let (mut strategy, d0) = witness_strategy(m, v)?;
    let tr = run_trace(m, &mut strategy, &d0, horizon)?;
    let t = q.target_set(m)?;
    let csv = trace_csv(m, &tr, &t, digits);
    let p = match threshold {
        Some(s) => parse_rational(s).ok_or_else(|| anyhow!("bad threshold `{s}`"))?,
        None if q.mode == Mode::Sure => parse_rational("1").expect("literal"),
        None => parse_rational("0.99").expect("literal"),
    };
    let kind = match q.objective {
        Objective::Event => SyncKind::Event,
        Objective::Weak => SyncKind::Weak,
        Objective::Strong => SyncKind::Strong,
    };
    let report = check_sync(&tr, &t, q.function, kind, &p);
    match out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        None => {
            print!("{csv}");
            eprintln!("{}", serde_json::to_string(&report)?);
        }
    }
    Ok(())
}

fn generate_one(args: &GenerateArgs, seed: u64) -> Result<String> {
    let text = match args.family {
        Family::Random => {
            let m = random_mdp(seed, args.states, args.actions, args.branching)?;
            let t = random_subset(seed, args.states);
            write_model_with(&m, Some(m.state_name(0)), Some(&m.set_names(&t)))
        }
        Family::PrimeCycle => {
            let m = prime_cycle_mdp(args.n)?;
            write_model_with(&m, Some("q_init"), Some(&["qT".to_string()]))
        }
        Family::Mbc => {
            let c = MonotoneCircuit::random(seed, args.depth);
            let (m, root, sync) = mbc_to_mdp(&c)?;
            let mut out = format!("# circuit value: {}\n", c.eval());
            out.push_str(&write_model_with(
                &m,
                Some(m.state_name(root)),
                Some(&[m.state_name(sync).to_string()]),
            ));
            out
        }
        Family::EventToWeak => {
            let base = random_mdp(seed, args.states, args.actions, args.branching)?;
            let qhat = (seed as usize) % args.states;
            let (m, phat) = reduce_event_to_weak(&base, 0, qhat)?;
            write_model_with(&m, Some(m.state_name(phat)), Some(&[m.state_name(phat).to_string()]))
        }
        Family::Preempty => {
            let base = random_mdp(seed, args.states, args.actions, args.branching)?;
            let t = StateSet::singleton(args.states, (seed as usize) % args.states);
            let (m, init) = reduce_preempty_to_almostweak(&base, &t)?;
            let t2 = t.widened(m.num_states());
            write_model_with(&m, Some(m.state_name(init)), Some(&m.set_names(&t2)))
        }
        Family::Fixture => {
            let name = args
                .name
                .as_deref()
                .ok_or_else(|| anyhow!("--family fixture needs --name"))?;
            let f = example(name)?;
            let t: Vec<String> = f.target.iter().map(|s| s.to_string()).collect();
            write_model_with(&f.mdp, Some(f.init), Some(&t))
        }
    };
    Ok(text)
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Random => "random",
        Family::PrimeCycle => "prime-cycle",
        Family::Mbc => "mbc",
        Family::EventToWeak => "event-to-weak",
        Family::Preempty => "preempty",
        Family::Fixture => "fixture",
    }
}

fn generate(args: &GenerateArgs) -> Result<()> {
    match (args.count, &args.out) {
        (Some(count), Some(dir)) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for seed in args.seed..args.seed + count {
                let path = dir.join(format!("{}-{seed}.mdp", family_name(args.family)));
                fs::write(&path, generate_one(args, seed)?).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        (Some(_), None) => bail!("--count needs an --out directory"),
        (None, Some(path)) => {
            fs::write(path, generate_one(args, args.seed)?).with_context(|| format!("writing {}", path.display()))
        }
        (None, None) => {
            print!("{}", generate_one(args, args.seed)?);
            Ok(())
        }
    }
}

/// Four sure-mode questions, decider versus oracle.
fn compare_one(m: &Mdp, init: &StateSet, t: &StateSet) -> Result<Vec<String>> {
    let ctx = Ctx::default();
    let mut bad = Vec::new();
    let mut cmp = |name: &str, got: Option<bool>, want: bool| {
        if got != Some(want) {
            bad.push(format!("{name}: decider {got:?}, oracle {want}"));
        }
    };
    cmp(
        "event",
        event::decide_sure_event(m, init, t, &ctx).answer(),
        oracle_sure_event(m, init, t)?,
    );
    cmp(
        "weak",
        weak::decide_sure_weak(m, init, t, &ctx).answer(),
        oracle_sure_weak(m, init, t)?,
    );
    cmp(
        "strong sum",
        strong::decide_strong_sum(m, init, t, Mode::Sure, &ctx).answer(),
        oracle_sure_strong_sum(m, init, t)?,
    );
    if !t.is_empty() {
        cmp(
            "strong max",
            strong::decide_strong_max(m, init, t, Mode::Sure, &ctx)?.answer(),
            oracle_sure_strong_max(m, init, t)?,
        );
    }
    Ok(bad)
}

fn compare(args: &CompareArgs) -> Result<u8> {
    let mut cases: Vec<(String, Mdp, StateSet, StateSet)> = Vec::new();
    match (&args.corpus, args.random) {
        (Some(dir), None) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            paths.retain(|p| p.extension().is_some_and(|e| e == "mdp"));
            paths.sort();
            for p in paths {
                let f = load(&p)?;
                let q = Query {
                    objective: Objective::Event,
                    function: Function::Sum,
                    mode: Mode::Sure,
                    target: f
                        .target
                        .clone()
                        .ok_or_else(|| anyhow!("{}: no `#! target`", p.display()))?,
                    init: f.init.clone().ok_or_else(|| anyhow!("{}: no `#! init`", p.display()))?,
                    max_period: None,
                };
                let init = syncmdp::query::parse_init(&f.mdp, &q.init)?.support(f.mdp.num_states());
                let t = q.target_set(&f.mdp)?;
                cases.push((p.display().to_string(), f.mdp, init, t));
            }
        }
        (None, Some(count)) => {
            for seed in args.seed..args.seed + count {
                let m = random_mdp(seed, args.states, args.actions, args.branching)?;
                let init = StateSet::singleton(args.states, 0);
                let t = random_subset(seed, args.states);
                cases.push((format!("seed {seed}"), m, init, t));
            }
        }
        _ => bail!("give either a corpus directory or --random N"),
    }
    let mut mismatches = 0;
    for (name, m, init, t) in &cases {
        let bad = compare_one(m, init, t)?;
        if !bad.is_empty() {
            mismatches += 1;
            println!("mismatch on {name}: {}", bad.join("; "));
        }
    }
    println!("{} models, {mismatches} mismatches", cases.len());
    Ok(if mismatches == 0 { 0 } else { 1 })
}
