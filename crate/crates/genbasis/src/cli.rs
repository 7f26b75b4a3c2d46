//! Command-line front end. Every subcommand is deterministic given its
//! flags; all randomness flows from explicit seeds.
//!
//! Exit codes: 0 success, 1 invariant or acceptance failure, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{self, LabeledPool, SyntheticKind, SyntheticSpec};
use crate::error::{Error, Result};
use crate::finite_core::{self, DatasetMask};
use crate::nn::{Architecture, ModelConfig};
use crate::plot;
use crate::property_oracle::{
    run_sweep, Mutant, MutantEngine, RealEngine, SpaceLimit, StructureLimits, SweepReport,
};
use crate::surrogate::{
    self, evaluate_ensemble, load_manifest, retrain_trials, save_manifest, train_round_ensemble,
    write_round_csv, BasisManifest, LoopConfig, SelectionRule,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "genbasis",
    version,
    about = "Exact generalization calculus and ensemble-driven sample basis selection"
)]
pub struct Cli {
    /// Worker threads for model fits and property checks (default: logical cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every set-calculus law over randomized finite structures
    Verify(VerifyArgs),
    /// Walk the exact calculus on a universe fixture file
    ExactDemo(ExactDemoArgs),
    /// Grow a sample basis until the ensemble is consistent on the pool
    SelectBases(SelectBasesArgs),
    /// Retrain fresh models on a basis (or a prefix) and report accuracy
    RetrainEval(RetrainEvalArgs),
    /// Export every unanimously mispredicted sample as a PGM gallery
    MispredictReport(MispredictArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Number of random structures to sweep
    #[arg(long, default_value_t = 1000)]
    pub seeds: u64,
    /// Largest universe (feature count) to generate
    #[arg(long, default_value_t = 6)]
    pub max_x: usize,
    /// Largest label count to generate
    #[arg(long, default_value_t = 3)]
    pub max_y: usize,
    /// Hypothesis space size: `all` for full enumeration or a sample cap
    #[arg(long, default_value = "all")]
    pub space: String,
    /// Base seed; structure i uses seed + i
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run against a deliberately broken engine
    /// (invert-feasible | skip-oracle-check)
    #[arg(long)]
    pub mutant: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExactDemoArgs {
    /// Universe fixture file (`universe x=.. y=..` / `oracle ..` / `hyp ..`)
    pub fixture: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PoolKind {
    Mnist,
    Gauss2,
    Rings,
    Parity,
}

#[derive(Args, Debug)]
pub struct PoolArgs {
    /// Dataset source
    #[arg(long, value_enum, default_value_t = PoolKind::Gauss2)]
    pub pool: PoolKind,
    /// IDX image file (mnist pool)
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// IDX label file (mnist pool)
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Keep only the first N samples
    #[arg(long)]
    pub subset: Option<usize>,
    /// Synthetic pool size (gauss2, rings)
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// Synthetic noise level
    #[arg(long, default_value_t = 0.08)]
    pub noise: f64,
    /// Bit width for the parity pool (always yields 2^bits samples)
    #[arg(long, default_value_t = 4)]
    pub bits: u32,
    /// Synthetic generator seed
    #[arg(long, default_value_t = 1)]
    pub data_seed: u64,
}

impl PoolArgs {
    pub fn load(&self) -> Result<LabeledPool> {
        let pool = match self.pool {
            PoolKind::Mnist => {
                let images = self.images.as_ref().ok_or_else(|| {
                    Error::input("--pool mnist needs --images <path>")
                })?;
                let labels = self.labels.as_ref().ok_or_else(|| {
                    Error::input("--pool mnist needs --labels <path>")
                })?;
                data::load_idx(images, labels)?
            }
            PoolKind::Gauss2 | PoolKind::Rings => {
                let kind = if self.pool == PoolKind::Gauss2 {
                    SyntheticKind::Gauss2
                } else {
                    SyntheticKind::Rings
                };
                data::generate_synthetic(&SyntheticSpec {
                    kind,
                    n_samples: self.samples,
                    noise: self.noise,
                    seed: self.data_seed,
                })?
            }
            PoolKind::Parity => data::generate_synthetic(&SyntheticSpec {
                kind: SyntheticKind::ParityBits(self.bits),
                n_samples: 0,
                noise: 0.0,
                seed: self.data_seed,
            })?,
        };
        match self.subset {
            Some(n) => pool.take_first(n),
            None => Ok(pool),
        }
    }
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Architecture: mlp:H[,H..] or conv:H
    #[arg(long, default_value = "mlp:100")]
    pub model: String,
    /// Base training seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer step budget per fit attempt
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
}

impl ModelArgs {
    pub fn config(&self, pool: &LabeledPool) -> Result<ModelConfig> {
        let arch: Architecture = self.model.parse()?;
        let mut config = ModelConfig::new(arch, pool.num_classes(), pool.shape().to_vec());
        config.seed = self.seed;
        config.max_steps = self.max_steps;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Debug)]
pub struct SelectBasesArgs {
    #[command(flatten)]
    pub pool: PoolArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Ensemble size per round
    #[arg(long = "n", default_value_t = 5)]
    pub n_models: usize,
    /// Samples admitted per round
    #[arg(long, default_value_t = 8)]
    pub batch_add: usize,
    /// Admission rule: most-disagreed | first | random
    #[arg(long, default_value = "most-disagreed")]
    pub rule: String,
    /// Initial seed samples per class
    #[arg(long, default_value_t = 10)]
    pub initial_per_class: usize,
    /// Safety cap on rounds
    #[arg(long, default_value_t = 10_000)]
    pub max_rounds: usize,
    /// Output directory (manifest, round CSV, progress SVG)
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RetrainEvalArgs {
    #[command(flatten)]
    pub pool: PoolArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Basis manifest to retrain on
    #[arg(long, conflicts_with = "prefix")]
    pub manifest: Option<PathBuf>,
    /// Baseline: use the first N pool samples as the basis instead
    #[arg(long)]
    pub prefix: Option<usize>,
    /// Fresh models to train
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Output directory for the per-trial CSV and accuracy bar chart
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MispredictArgs {
    #[command(flatten)]
    pub pool: PoolArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Basis manifest the ensemble is trained on
    #[arg(long)]
    pub manifest: PathBuf,
    /// Ensemble size
    #[arg(long = "n", default_value_t = 5)]
    pub n_models: usize,
    /// Gallery output directory
    #[arg(long, default_value = "out/mispredictions")]
    pub out: PathBuf,
}

fn parse_rule(rule: &str, seed: u64) -> Result<SelectionRule> {
    match rule {
        "first" => Ok(SelectionRule::FirstIndex),
        "random" => Ok(SelectionRule::Random(seed)),
        other => other.parse(),
    }
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::input("--jobs must be >= 1"));
        }
        // Ignore the error if a global pool already exists (tests, repeat calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Verify(args) => cmd_verify(&args),
        Command::ExactDemo(args) => cmd_exact_demo(&args),
        Command::SelectBases(args) => cmd_select_bases(&args),
        Command::RetrainEval(args) => cmd_retrain_eval(&args),
        Command::MispredictReport(args) => cmd_mispredict_report(&args),
    }
}

fn print_sweep(report: &SweepReport) {
    println!("property,checked,failures");
    for (id, checked, failed) in &report.per_property {
        println!("{id},{checked},{failed}");
    }
    for failure in report.failures.iter().take(3) {
        let cx = failure.verdict.counterexample.as_ref().unwrap();
        eprintln!(
            "counterexample: seed={} property={} {}",
            failure.seed, failure.verdict.id, cx.detail
        );
        for line in cx.fixture.lines() {
            eprintln!("  {line}");
        }
    }
    if report.failures.len() > 3 {
        eprintln!("({} more counterexamples suppressed)", report.failures.len() - 3);
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let space = match args.space.as_str() {
        "all" => SpaceLimit::All,
        n => SpaceLimit::AtMost(
            n.parse()
                .map_err(|_| Error::input(format!("--space wants `all` or a number, got `{n}`")))?,
        ),
    };
    let limits = StructureLimits {
        max_x: args.max_x,
        max_y: args.max_y,
        max_space: space,
        seed: args.seed,
        ..StructureLimits::default()
    };
    let mutant = args
        .mutant
        .as_deref()
        .map(str::parse::<Mutant>)
        .transpose()?;
    // The oracle is only guaranteed to be a space member when the generator
    // forces it in; the skip-oracle mutant exists to test exactly that.
    let force_oracle = mutant != Some(Mutant::SkipOracleCheck);
    let report = match mutant {
        None => run_sweep(&RealEngine, &limits, args.seeds, force_oracle)?,
        Some(m) => run_sweep(&MutantEngine(m), &limits, args.seeds, force_oracle)?,
    };
    print_sweep(&report);
    if report.all_hold() {
        println!("all {} structures passed every property", report.structures);
        Ok(EXIT_OK)
    } else {
        println!(
            "{} counterexamples across properties: {}",
            report.failures.len(),
            report
                .failing_ids()
                .iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        Ok(EXIT_FAILED)
    }
}

fn mask_to_string(mask: &DatasetMask) -> String {
    format!("{mask}")
}

pub fn cmd_exact_demo(args: &ExactDemoArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.fixture)?;
    let parsed = finite_core::parse_fixture(&text, &args.fixture.display().to_string())?;
    let universe = &parsed.universe;
    let space = &parsed.space;
    let z = parsed
        .masks
        .first()
        .cloned()
        .unwrap_or_else(|| DatasetMask::empty(universe.x_size()));

    println!(
        "universe: {} features, {} labels, space of {} hypotheses",
        universe.x_size(),
        universe.y_size(),
        space.len()
    );
    println!("Z = {}", mask_to_string(&z));

    let feasible = finite_core::feasible_set(space, &z, universe)?;
    println!("feasible hypotheses T(Z): {} of {}", feasible.len(), space.len());
    if z.is_empty() {
        println!("  (empty Z leaves the whole space feasible)");
    }
    let gen = finite_core::generalization(space, &z, universe)?;
    println!("generalization set gen(Z) = {}", mask_to_string(&gen));

    let uncovered = gen.complement();
    match uncovered.indices().next() {
        None => println!("gen(Z) already covers every feature; nothing left to admit"),
        Some(pick) => {
            let mut grown = z.clone();
            grown.insert(pick);
            let gen2 = finite_core::generalization(space, &grown, universe)?;
            println!(
                "admitting uncovered feature {pick}: gen({}) = {}",
                mask_to_string(&grown),
                mask_to_string(&gen2)
            );
            println!(
                "growth: {} -> {} covered features (strict, since {pick} was uncovered)",
                gen.count(),
                gen2.count()
            );
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_select_bases(args: &SelectBasesArgs) -> Result<i32> {
    let pool = args.pool.load()?;
    let model = args.model.config(&pool)?;
    let config = LoopConfig {
        n_models: args.n_models,
        batch_add: args.batch_add,
        selection_rule: parse_rule(&args.rule, args.model.seed)?,
        initial_per_class: args.initial_per_class,
        model,
        max_rounds: args.max_rounds,
    };
    println!(
        "pool: {} samples, {} classes, digest {:016x}",
        pool.len(),
        pool.num_classes(),
        pool.digest()
    );
    println!("config: {}", config.canonical_string());

    let (manifest, records) = surrogate::run_with_progress(&pool, &config, |r| {
        println!(
            "round {:4}: basis {:5}, unanimous correct {:5}, wrong {:4}, disagreement {:4} ({:.1}s)",
            r.round,
            r.basis_size,
            r.unanimous_correct_count,
            r.unanimous_wrong_count,
            r.disagreement_count,
            r.wall_time
        );
    })?;

    fs::create_dir_all(&args.out)?;
    let manifest_path = args.out.join("basis.manifest");
    let csv_path = args.out.join("rounds.csv");
    let svg_path = args.out.join("progress.svg");
    save_manifest(&manifest, &manifest_path)?;
    write_round_csv(&records, &csv_path)?;
    let series = [
        plot::Series {
            name: "basis size",
            points: records
                .iter()
                .map(|r| (r.round as f64, r.basis_size as f64))
                .collect(),
        },
        plot::Series {
            name: "unanimous correct",
            points: records
                .iter()
                .map(|r| (r.round as f64, r.unanimous_correct_count as f64))
                .collect(),
        },
    ];
    plot::line_chart("consistency vs round", "round", "count", &series, &svg_path)?;

    println!(
        "finished after {} rounds: basis {} of {} samples ({})",
        records.len(),
        manifest.ids.len(),
        pool.len(),
        if manifest.complete { "complete" } else { "hit max_rounds" }
    );
    for path in [&manifest_path, &csv_path, &svg_path] {
        println!("wrote {}", path.display());
    }
    Ok(if manifest.complete { EXIT_OK } else { EXIT_FAILED })
}

fn load_basis(
    pool: &LabeledPool,
    manifest: Option<&Path>,
    prefix: Option<usize>,
) -> Result<(Vec<u32>, String)> {
    match (manifest, prefix) {
        (Some(path), None) => {
            let m: BasisManifest = load_manifest(path, Some(pool.digest()))?;
            Ok((m.ids, format!("manifest {} ({} ids)", path.display(), 0)))
        }
        (None, Some(n)) => {
            if n == 0 || n > pool.len() {
                return Err(Error::input(format!(
                    "--prefix {n} out of range 1..={}",
                    pool.len()
                )));
            }
            let ids = (0..n).map(|i| pool.id(i)).collect();
            Ok((ids, format!("first {n} pool samples")))
        }
        _ => Err(Error::input("need exactly one of --manifest or --prefix")),
    }
}

pub fn cmd_retrain_eval(args: &RetrainEvalArgs) -> Result<i32> {
    let pool = args.pool.load()?;
    let model = args.model.config(&pool)?;
    let (basis, description) = load_basis(&pool, args.manifest.as_deref(), args.prefix)?;
    let description = if args.manifest.is_some() {
        format!(
            "manifest {} ({} ids)",
            args.manifest.as_ref().unwrap().display(),
            basis.len()
        )
    } else {
        description
    };
    println!("basis: {description}");

    let attempts = retrain_trials(&pool, &basis, &model, args.trials)?;
    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("retrain_trials.csv");
    let mut csv = String::from("trial,fit,accuracy\n");
    for (t, acc) in attempts.iter().enumerate() {
        match acc {
            Some(a) => csv.push_str(&format!("{t},ok,{a:.6}\n")),
            None => csv.push_str(&format!("{t},failed,\n")),
        }
    }
    fs::write(&csv_path, csv)?;

    let accs: Vec<f64> = attempts.iter().flatten().copied().collect();
    if accs.is_empty() {
        println!("all {} trials failed to fit the basis", args.trials);
        return Ok(EXIT_FAILED);
    }
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    let var = if accs.len() > 1 {
        accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (accs.len() - 1) as f64
    } else {
        0.0
    };
    let stdev = var.sqrt();
    println!(
        "accuracy {:.5} +/- {:.5} % over {} trials ({} skipped)",
        mean * 100.0,
        stdev * 100.0,
        accs.len(),
        args.trials - accs.len()
    );

    let svg_path = args.out.join("accuracy.svg");
    plot::bar_chart(
        "full-pool accuracy after retraining",
        "accuracy",
        &[(description, mean, stdev)],
        &svg_path,
    )?;

    let ckpt_path = args.out.join("model.sgnn");
    let reference = crate::nn::train_to_fit(&pool, &basis, &model)?;
    crate::nn::save_checkpoint(&reference, &ckpt_path)?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    println!("wrote {}", ckpt_path.display());
    Ok(EXIT_OK)
}

pub fn cmd_mispredict_report(args: &MispredictArgs) -> Result<i32> {
    let pool = args.pool.load()?;
    let model = args.model.config(&pool)?;
    let manifest = load_manifest(&args.manifest, Some(pool.digest()))?;
    if args.n_models < 2 {
        return Err(Error::input("--n must be >= 2"));
    }
    let config = LoopConfig {
        n_models: args.n_models,
        model,
        ..LoopConfig::new(args.model.config(&pool)?)
    };
    let models = train_round_ensemble(&pool, &manifest.ids, &config, 0)?;
    let eval = evaluate_ensemble(&models, &pool)?;
    let (c, w, d) = eval.counts();
    println!(
        "ensemble of {} on {}-sample pool: {c} unanimous correct, {w} unanimous wrong, {d} disagreements",
        args.n_models,
        pool.len()
    );

    fs::create_dir_all(&args.out)?;
    let mut index = String::from("id,oracle,predicted\n");
    let mut written = 0usize;
    for i in 0..pool.len() {
        if !eval.unanimous_wrong[i] {
            continue;
        }
        let oracle = pool.label(i);
        let predicted = eval.votes[i][0];
        let (h, wd) = match pool.shape() {
            [h, w] => (*h, *w),
            other => (1, other.iter().product()),
        };
        let pixels: Vec<u8> = pool
            .sample(i)
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        let name = format!("{}_{}to{}.pgm", pool.id(i), oracle, predicted);
        data::write_pgm(&args.out.join(&name), wd, h, &pixels)?;
        index.push_str(&format!("{},{oracle},{predicted}\n", pool.id(i)));
        written += 1;
    }
    let index_path = args.out.join("index.csv");
    fs::write(&index_path, index)?;
    println!("wrote {written} PGM images and {}", index_path.display());
    Ok(EXIT_OK)
}
