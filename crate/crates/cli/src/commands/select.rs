//! `subsel select`: pick a budget-k subset under a chosen objective and
//! write the ids, the greedy trace, and a run summary.

use super::{build_distances, build_similarity, write_csv_file, KernelArg};
use crate::summary::{write_summary, RunSummary};
use crate::{CliError, Ctx};
use clap::{Args, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;
use subsel::{
    dispersion_greedy_traced, lazy_greedy_traced, load_dataset, naive_greedy_traced,
    partition_by_label, DispersionSeeding, FacilityLocation, GreedyStats, knn_sparsify,
    LabelAwareDispersion, LabelAwareFacilityLocation, MixtureObjective, Selection,
    SparseFacilityLocation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    /// Facility location: reward subsets similar to everything.
    Fl,
    /// Dispersion: maximize the minimum pairwise distance.
    Dispersion,
    /// Weighted sum of facility location and dispersion.
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedingArg {
    /// Start dispersion from the farthest pair (carries the 1/2 guarantee).
    FarthestPair,
    /// Start dispersion from element 0 (cheaper, no guarantee).
    Single,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Input feature file (CSV or SUBSEL01 binary).
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum)]
    pub objective: ObjectiveArg,

    /// Subset size.
    #[arg(long)]
    pub k: usize,

    /// Optimize the objective summed per class over the label partition.
    #[arg(long)]
    pub label_aware: bool,

    #[arg(long, value_enum, default_value_t = KernelArg::Cosine)]
    pub kernel: KernelArg,

    /// RBF bandwidth (required with --kernel rbf).
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Keep only the g strongest similarities per row (facility location
    /// only); trades exactness for memory.
    #[arg(long)]
    pub sparse_neighbors: Option<usize>,

    /// Facility-location weight of the mixture objective.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_fl: f64,

    /// Dispersion weight of the mixture objective.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_disp: f64,

    #[arg(long, value_enum, default_value_t = SeedingArg::FarthestPair)]
    pub seeding: SeedingArg,

    /// Dense kernel memory budget in MiB.
    #[arg(long)]
    pub dense_budget_mb: Option<usize>,
}

pub fn run(ctx: &Ctx, args: SelectArgs) -> Result<(), CliError> {
    check_flag_combinations(&args)?;
    std::fs::create_dir_all(&ctx.out)?;
    let start = Instant::now();
    let loaded = load_dataset(&args.input)?;
    let dataset = loaded.dataset;

    let mut summary = RunSummary::new("select", ctx.rng_seed, config_echo(&args));
    summary.set_label_mapping(&loaded.label_mapping);
    summary.add_timing(ctx.timings, "load", start.elapsed());

    let solve = Instant::now();
    let (selection, stats) = optimize(&args, &dataset)?;
    summary.add_timing(ctx.timings, "solve", solve.elapsed());

    let ids: Vec<String> = selection
        .order
        .iter()
        .map(|&i| dataset.ids()[i].clone())
        .collect();
    std::fs::write(ctx.out.join("selected_ids.txt"), ids_file(&ids))?;
    write_csv_file(
        &ctx.out,
        "trace.csv",
        &["step", "id", "gain", "value"],
        selection.order.iter().enumerate().map(|(step, &i)| {
            vec![
                (step + 1).to_string(),
                dataset.ids()[i].clone(),
                selection.gains[step].to_string(),
                selection.values[step].to_string(),
            ]
        }),
    )?;

    summary.selected_ids = Some(ids);
    summary
        .metrics
        .insert("objective_value".to_string(), selection.final_value().unwrap_or(0.0));
    summary.metrics.insert("k".to_string(), args.k as f64);
    summary.metrics.insert("n".to_string(), dataset.n() as f64);
    summary.metrics.insert(
        "gain_evaluations".to_string(),
        stats.gain_evaluations as f64,
    );
    summary.outputs = vec!["selected_ids.txt".to_string(), "trace.csv".to_string()];
    summary.add_timing(ctx.timings, "total", start.elapsed());
    write_summary(&ctx.out, &mut summary)?;
    Ok(())
}

fn check_flag_combinations(args: &SelectArgs) -> Result<(), CliError> {
    let usage = |message: &str| Err(CliError::Usage(message.to_string()));
    if args.sparse_neighbors.is_some() && args.objective != ObjectiveArg::Fl {
        return usage("--sparse-neighbors only applies to --objective fl");
    }
    if args.sparse_neighbors.is_some() && args.label_aware {
        return usage("--sparse-neighbors cannot be combined with --label-aware");
    }
    if args.label_aware && args.objective == ObjectiveArg::Mixture {
        return usage("--label-aware applies to fl and dispersion, not mixture");
    }
    Ok(())
}

fn optimize(
    args: &SelectArgs,
    dataset: &subsel::FeatureDataset,
) -> Result<(Selection, GreedyStats), CliError> {
    if args.k == 0 {
        return Ok((Selection::empty(0), GreedyStats::default()));
    }
    let features = dataset.features();
    match (args.objective, args.label_aware) {
        (ObjectiveArg::Fl, false) => {
            let sim = build_similarity(features, args.kernel, args.gamma, args.dense_budget_mb)?;
            match args.sparse_neighbors {
                None => Ok(lazy_greedy_traced(&FacilityLocation::new(&sim), args.k)?),
                Some(g) => {
                    let graph = knn_sparsify(&sim, g)?;
                    Ok(lazy_greedy_traced(
                        &SparseFacilityLocation::new(&graph),
                        args.k,
                    )?)
                }
            }
        }
        (ObjectiveArg::Fl, true) => {
            let sim = build_similarity(features, args.kernel, args.gamma, args.dense_budget_mb)?;
            let partition = partition_by_label(dataset)?;
            Ok(lazy_greedy_traced(
                &LabelAwareFacilityLocation::new(&sim, &partition)?,
                args.k,
            )?)
        }
        (ObjectiveArg::Dispersion, false) => {
            let dist = build_distances(features, args.dense_budget_mb)?;
            let seeding = match args.seeding {
                SeedingArg::FarthestPair => DispersionSeeding::FarthestPair,
                SeedingArg::Single => DispersionSeeding::Single,
            };
            Ok(dispersion_greedy_traced(&dist, args.k, seeding)?)
        }
        (ObjectiveArg::Dispersion, true) => {
            let dist = build_distances(features, args.dense_budget_mb)?;
            let partition = partition_by_label(dataset)?;
            Ok(naive_greedy_traced(
                &LabelAwareDispersion::new(&dist, &partition)?,
                args.k,
            )?)
        }
        (ObjectiveArg::Mixture, _) => {
            let sim = build_similarity(features, args.kernel, args.gamma, args.dense_budget_mb)?;
            let dist = build_distances(features, args.dense_budget_mb)?;
            let objective = MixtureObjective::new(&sim, &dist, args.lambda_fl, args.lambda_disp)?;
            if args.lambda_disp == 0.0 {
                Ok(lazy_greedy_traced(&objective, args.k)?)
            } else {
                Ok(naive_greedy_traced(&objective, args.k)?)
            }
        }
    }
}

fn ids_file(ids: &[String]) -> String {
    let mut text = ids.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    text
}

fn config_echo(args: &SelectArgs) -> serde_json::Value {
    json!({
        "input": args.input.display().to_string(),
        "objective": format!("{:?}", args.objective).to_lowercase(),
        "k": args.k,
        "label_aware": args.label_aware,
        "kernel": format!("{:?}", args.kernel).to_lowercase(),
        "gamma": args.gamma,
        "sparse_neighbors": args.sparse_neighbors,
        "lambda_fl": args.lambda_fl,
        "lambda_disp": args.lambda_disp,
        "seeding": format!("{:?}", args.seeding).to_lowercase(),
        "dense_budget_mb": args.dense_budget_mb,
    })
}
