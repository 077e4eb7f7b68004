//! `dstit`: load, check and query models of epistemic, doxastic and deontic
//! stit logic.
//!
//! Exit codes: 0 for a positive answer, 1 for a negative one (a failed check,
//! a false formula, a counterexample, an exhausted search), 2 for usage
//! errors and 3 when the question cannot be answered.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dstit_core::harness::{
    catalog, find_countermodel, generated_pool, sweep_axioms, SearchOutcome, SweepConfig, SweepModel,
};
use dstit_core::{load_document, load_model, parse, Evaluator, Formula, Model, ModelDocument, Validity};

#[derive(Parser)]
#[command(name = "dstit", version, about = "Model checker for epistemic, doxastic and deontic stit logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the frame constraints and the probability axioms.
    Check { model: PathBuf },
    /// Evaluate a formula at one index.
    Eval {
        model: PathBuf,
        /// Index as `moment/history`.
        #[arg(short, long)]
        index: String,
        #[arg(short, long)]
        formula: String,
        /// Print the clause-by-clause trace.
        #[arg(long)]
        explain: bool,
    },
    /// List the indices where a formula holds.
    Truthset {
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
    },
    /// Check a formula at every index of the model.
    Valid {
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
    },
    /// Dominance and expected-utility report for one agent at one moment.
    Deontic {
        model: PathBuf,
        #[arg(short, long)]
        agent: String,
        #[arg(short, long)]
        moment: String,
        #[arg(long)]
        json: bool,
    },
    /// Sweep the axiom catalog over the given models and generated ones.
    Axioms {
        models: Vec<PathBuf>,
        /// Number of generated models to add.
        #[arg(long, default_value_t = 0)]
        generate: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        instantiations: usize,
        /// Also write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Look for a model and index falsifying a formula.
    Search {
        #[arg(short, long)]
        formula: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Models to try before generating any.
        #[arg(long = "pool")]
        pool: Vec<PathBuf>,
        /// Where to write the countermodel; stdout if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn answer(yes: bool) -> ExitCode {
    if yes {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn open(path: &Path) -> Result<Model> {
    load_model(path).with_context(|| format!("cannot load {}", path.display()))
}

fn formula(text: &str) -> Result<Formula> {
    parse(text).with_context(|| format!("cannot parse formula `{text}`"))
}

fn check(path: &Path) -> Result<ExitCode> {
    let doc = load_document(path).with_context(|| format!("cannot load {}", path.display()))?;
    let report = doc.check().with_context(|| format!("cannot check {}", path.display()))?;
    print!("{}", report.frame);
    if let Some(model) = &report.model {
        for (agent, r) in &report.probability {
            let mode = if r.exhaustive { "exhaustive" } else { "sampled" };
            if r.passed() {
                println!("measure {agent}: pass ({mode}, {} checks)", r.checks);
            } else {
                println!("measure {agent}: FAIL ({mode}, {} violations)", r.violation_count);
                for v in &r.violations {
                    println!("          {}", v.describe(model.frame()));
                }
            }
        }
    }
    Ok(answer(report.passed()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { model } => check(&model),
        Command::Eval {
            model,
            index,
            formula: text,
            explain,
        } => {
            let model = open(&model)?;
            let f = formula(&text)?;
            let i = model.frame().parse_index(&index)?;
            let mut ev = Evaluator::new(&model);
            let holds = ev.eval(i, &f)?;
            if explain {
                for line in ev.explain(i, &f)? {
                    println!("{line}");
                }
            }
            println!("{holds}");
            Ok(answer(holds))
        }
        Command::Truthset { model, formula: text } => {
            let model = open(&model)?;
            let f = formula(&text)?;
            let t = Evaluator::new(&model).truth_set(&f)?;
            for label in model.frame().index_labels(&t.indices) {
                println!("{label}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Valid { model, formula: text } => {
            let model = open(&model)?;
            let f = formula(&text)?;
            match Evaluator::new(&model).valid_on_model(&f)? {
                Validity::Valid => {
                    println!("valid");
                    Ok(ExitCode::SUCCESS)
                }
                Validity::Counterexample(i) => {
                    println!("counterexample at {}", model.frame().index_label(i));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Deontic {
            model,
            agent,
            moment,
            json,
        } => {
            let model = open(&model)?;
            let frame = model.frame();
            let a = frame.agent_id(&agent)?;
            let m = frame.moment_id(&moment)?;
            let summary = model.deontic_report(a, m).summary(frame);
            if json {
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                print!("{summary}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Axioms {
            models,
            generate,
            seed,
            instantiations,
            json,
        } => {
            if models.is_empty() && generate == 0 {
                bail!("nothing to sweep: give model files or --generate N");
            }
            let mut pool = Vec::new();
            for path in &models {
                pool.push(SweepModel::fixture(path.display().to_string(), open(path)?));
            }
            pool.extend(generated_pool(seed, generate));
            let config = SweepConfig {
                seed,
                instantiations,
                ..SweepConfig::default()
            };
            let report = sweep_axioms(&catalog(), &pool, &config);
            print!("{report}");
            if let Some(path) = json {
                fs::write(&path, report.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(answer(report.asserted_failures().is_empty()))
        }
        Command::Search {
            formula: text,
            seed,
            budget,
            pool,
            out,
        } => {
            let f = formula(&text)?;
            let mut models = Vec::new();
            for path in &pool {
                models.push(SweepModel::fixture(path.display().to_string(), open(path)?));
            }
            match find_countermodel(&f, &models, seed, budget)? {
                SearchOutcome::Exhausted { generated } => {
                    println!("exhausted after {generated} generated models");
                    Ok(ExitCode::from(1))
                }
                SearchOutcome::Found(c) => {
                    let frame = c.model.model.frame();
                    let mut notes = vec![
                        format!("countermodel to `{text}`"),
                        format!("`{}` fails at {}", c.instance, frame.index_label(c.index)),
                    ];
                    match &c.model.params {
                        Some(p) => notes.push(format!("generated: {}", serde_json::to_string(p)?)),
                        None => notes.push(format!("from {}", c.model.label)),
                    }
                    let doc = ModelDocument::from_model(&c.model.model, notes);
                    match out {
                        Some(path) => {
                            fs::write(&path, doc.to_json())
                                .with_context(|| format!("cannot write {}", path.display()))?;
                            println!(
                                "countermodel written to {}: `{}` fails at {}",
                                path.display(),
                                c.instance,
                                frame.index_label(c.index)
                            );
                        }
                        None => print!("{}", doc.to_json()),
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
