//! `subsel fass`: run filtered active-learning arms side by side on a shared
//! seed and emit per-round accuracy curves.

use super::{write_csv_file, KernelArg, MeasureArg};
use crate::summary::{write_summary, RunSummary};
use crate::{CliError, Ctx};
use clap::{Args, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;
use subsel::{
    fass_run, random_baseline_run, ClassifierKind, DataError, FassConfig, FassKernel, FassRun,
    LogRegConfig, RngSeed, SelectionStrategy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArmArg {
    /// Uncertainty filter followed by facility-location selection.
    FassFl,
    /// Uncertainty filter followed by dispersion selection.
    FassDispersion,
    /// Pure uncertainty sampling (top of the filtered set).
    Uncertainty,
    /// Uniform random batches.
    Random,
}

impl ArmArg {
    fn name(self) -> &'static str {
        match self {
            ArmArg::FassFl => "fass-fl",
            ArmArg::FassDispersion => "fass-dispersion",
            ArmArg::Uncertainty => "uncertainty",
            ArmArg::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassifierArg {
    Logreg,
    Knn,
}

#[derive(Debug, Args)]
pub struct FassArgs {
    /// Labeled pool the loop draws batches from.
    #[arg(long)]
    pub train: PathBuf,

    /// Labeled holdout used for the per-round accuracy.
    #[arg(long)]
    pub holdout: PathBuf,

    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = vec![ArmArg::FassFl, ArmArg::FassDispersion,
                                  ArmArg::Uncertainty, ArmArg::Random])]
    pub arms: Vec<ArmArg>,

    /// Batch size as a percent of the pool.
    #[arg(long, default_value_t = 1.0)]
    pub batch_percent: f64,

    /// Uncertainty filter size as a percent of the unlabeled pool.
    #[arg(long, default_value_t = 10.0)]
    pub filter_percent: f64,

    #[arg(long, default_value_t = 5)]
    pub rounds: usize,

    /// Size of the stratified seed set; defaults to max(classes, batch size).
    #[arg(long)]
    pub seed_size: Option<usize>,

    #[arg(long, value_enum, default_value_t = MeasureArg::Entropy)]
    pub measure: MeasureArg,

    #[arg(long, value_enum, default_value_t = ClassifierArg::Logreg)]
    pub classifier: ClassifierArg,

    /// Neighbor count when --classifier knn.
    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,

    /// Gradient steps when --classifier logreg.
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,

    #[arg(long, default_value_t = 0.5)]
    pub step_size: f64,

    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,

    /// Kernel for the facility-location arm.
    #[arg(long, value_enum, default_value_t = KernelArg::Cosine)]
    pub kernel: KernelArg,

    /// RBF bandwidth (required with --kernel rbf).
    #[arg(long)]
    pub gamma: Option<f64>,
}

pub fn run(ctx: &Ctx, args: FassArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&ctx.out)?;
    let start = Instant::now();
    if args.arms.is_empty() {
        return Err(CliError::Usage("--arms is empty".to_string()));
    }

    let loaded = load_pool(&args.train)?;
    let train = loaded.dataset;
    let holdout = load_pool(&args.holdout)?.dataset;
    if !train.is_labeled() || !holdout.is_labeled() {
        return Err(CliError::Data(DataError::MissingLabels));
    }

    let mut summary = RunSummary::new("fass", ctx.rng_seed, config_echo(&args));
    summary.set_label_mapping(&loaded.label_mapping);

    let mut rows: Vec<Vec<String>> = Vec::new();
    for &arm in &args.arms {
        let config = arm_config(&args, arm, &train, ctx.rng_seed)?;
        let run: FassRun = match arm {
            ArmArg::Random => random_baseline_run(&train, &holdout, &config)?,
            _ => fass_run(&train, &holdout, &config)?,
        };
        for record in &run.records[1..] {
            rows.push(vec![
                arm.name().to_string(),
                record.round.to_string(),
                record.labeled_count.to_string(),
                record.accuracy.to_string(),
            ]);
        }
        let name = arm.name();
        summary
            .metrics
            .insert(format!("auc_{name}"), run.accuracy_auc());
        summary.metrics.insert(
            format!("seed_accuracy_{name}"),
            run.records.first().map_or(f64::NAN, |r| r.accuracy),
        );
        summary.metrics.insert(
            format!("final_accuracy_{name}"),
            run.records.last().map_or(f64::NAN, |r| r.accuracy),
        );
        summary
            .warnings
            .extend(run.warnings.iter().map(|w| format!("{name}: {w}")));
    }

    write_csv_file(
        &ctx.out,
        "fass_curves.csv",
        &["arm", "round", "labeled_count", "accuracy"],
        rows,
    )?;
    summary
        .metrics
        .insert("n_train".to_string(), train.n() as f64);
    summary
        .metrics
        .insert("n_holdout".to_string(), holdout.n() as f64);
    summary.outputs = vec!["fass_curves.csv".to_string()];
    summary.add_timing(ctx.timings, "total", start.elapsed());
    write_summary(&ctx.out, &mut summary)?;
    Ok(())
}

fn load_pool(path: &std::path::Path) -> Result<subsel::LoadedDataset, CliError> {
    Ok(subsel::load_dataset(path)?)
}

fn arm_config(
    args: &FassArgs,
    arm: ArmArg,
    train: &subsel::FeatureDataset,
    rng_seed: u64,
) -> Result<FassConfig, CliError> {
    let classifier = match args.classifier {
        ClassifierArg::Logreg => ClassifierKind::LogReg(LogRegConfig {
            epochs: args.epochs,
            step_size: args.step_size,
            l2: args.l2,
            seed: RngSeed(rng_seed),
        }),
        ClassifierArg::Knn => ClassifierKind::Knn { k: args.knn_k },
    };
    let kernel = match args.kernel {
        KernelArg::Cosine => FassKernel::Cosine,
        KernelArg::Rbf => {
            let gamma = args.gamma.ok_or_else(|| {
                CliError::Usage("--kernel rbf requires --gamma".to_string())
            })?;
            FassKernel::Rbf { gamma }
        }
    };
    let selection = match arm {
        ArmArg::FassFl => Some(SelectionStrategy::FacilityLocation),
        ArmArg::FassDispersion => Some(SelectionStrategy::Dispersion),
        ArmArg::Uncertainty | ArmArg::Random => None,
    };
    let batch = subsel::percent_floor(args.batch_percent, train.n()).max(1);
    let classes = train.num_classes().map_or(0, |c| c as usize);
    let seed_size = args.seed_size.unwrap_or(classes.max(batch).max(1));
    Ok(FassConfig {
        batch_percent: args.batch_percent,
        filter_percent: args.filter_percent,
        rounds: args.rounds,
        seed_size,
        measure: args.measure.into(),
        selection,
        classifier,
        kernel,
        seed: RngSeed(rng_seed),
    })
}

fn config_echo(args: &FassArgs) -> serde_json::Value {
    json!({
        "train": args.train.display().to_string(),
        "holdout": args.holdout.display().to_string(),
        "arms": args.arms.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "batch_percent": args.batch_percent,
        "filter_percent": args.filter_percent,
        "rounds": args.rounds,
        "seed_size": args.seed_size,
        "measure": format!("{:?}", args.measure),
        "classifier": format!("{:?}", args.classifier).to_lowercase(),
        "knn_k": args.knn_k,
        "epochs": args.epochs,
        "step_size": args.step_size,
        "l2": args.l2,
        "kernel": format!("{:?}", args.kernel).to_lowercase(),
        "gamma": args.gamma,
    })
}
