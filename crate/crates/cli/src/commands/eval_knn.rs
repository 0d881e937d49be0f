//! `subsel eval-knn`: sweep subset fractions, select per method, train kNN
//! on each subset, and emit the accuracy curve behind the quality-vs-size
//! comparison.

use super::{build_distances, build_similarity, write_csv_file, KernelArg};
use crate::summary::{write_summary, RunSummary};
use crate::{CliError, Ctx};
use clap::{Args, ValueEnum};
use rand::seq::SliceRandom;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;
use subsel::{
    dispersion_greedy, knn_accuracy, lazy_greedy, load_dataset, percent_floor, DataError,
    FacilityLocation, FeatureDataset, RngSeed,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Facility-location greedy subsets.
    Fl,
    /// Dispersion greedy subsets.
    Dispersion,
    /// Mean over uniformly drawn subsets (see --random-repeats).
    Random,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Fl => "fl",
            MethodArg::Dispersion => "dispersion",
            MethodArg::Random => "random",
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalKnnArgs {
    /// Labeled training pool.
    #[arg(long)]
    pub train: PathBuf,

    /// Labeled holdout set.
    #[arg(long)]
    pub holdout: PathBuf,

    /// Subset sizes in percent: "start:stop:step" or a comma list.
    #[arg(long, default_value = "5:100:5")]
    pub fractions: String,

    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = vec![MethodArg::Fl, MethodArg::Dispersion, MethodArg::Random])]
    pub methods: Vec<MethodArg>,

    /// Neighbor count for the kNN evaluator (clamped to the subset size).
    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,

    /// Number of random subsets averaged per fraction.
    #[arg(long, default_value_t = 20)]
    pub random_repeats: usize,

    #[arg(long, value_enum, default_value_t = KernelArg::Cosine)]
    pub kernel: KernelArg,

    /// RBF bandwidth (required with --kernel rbf).
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Dense kernel memory budget in MiB.
    #[arg(long)]
    pub dense_budget_mb: Option<usize>,
}

pub fn run(ctx: &Ctx, args: EvalKnnArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&ctx.out)?;
    let start = Instant::now();
    let fractions = parse_fractions(&args.fractions)?;
    if args.random_repeats == 0 && args.methods.contains(&MethodArg::Random) {
        return Err(CliError::Usage(
            "--random-repeats must be at least 1".to_string(),
        ));
    }

    let loaded = load_dataset(&args.train)?;
    let train = loaded.dataset;
    let holdout = load_dataset(&args.holdout)?.dataset;
    if !train.is_labeled() || !holdout.is_labeled() {
        return Err(CliError::Data(DataError::MissingLabels));
    }

    let mut summary = RunSummary::new("eval-knn", ctx.rng_seed, config_echo(&args, &fractions));
    summary.set_label_mapping(&loaded.label_mapping);

    let n = train.n();
    let sizes: Vec<usize> = fractions
        .iter()
        .map(|&f| percent_floor(f, n).max(1))
        .collect();

    let mut rows: Vec<Vec<String>> = Vec::new();
    for &method in &args.methods {
        let accuracies = match method {
            MethodArg::Fl => {
                let sim = build_similarity(
                    train.features(),
                    args.kernel,
                    args.gamma,
                    args.dense_budget_mb,
                )?;
                let order = lazy_greedy(&FacilityLocation::new(&sim), *sizes.iter().max().unwrap())?
                    .order;
                prefix_accuracies(&train, &holdout, &order, &sizes, args.knn_k)?
            }
            MethodArg::Dispersion => {
                let dist = build_distances(train.features(), args.dense_budget_mb)?;
                let max_size = sizes.iter().map(|&s| s.max(2)).max().unwrap().min(n);
                if sizes.iter().any(|&s| s < 2) {
                    summary.warnings.push(
                        "dispersion subsets below size 2 were widened to 2".to_string(),
                    );
                }
                let order = dispersion_greedy(&dist, max_size)?.order;
                let widened: Vec<usize> = sizes.iter().map(|&s| s.max(2).min(n)).collect();
                prefix_accuracies(&train, &holdout, &order, &widened, args.knn_k)?
            }
            MethodArg::Random => {
                let mut totals = vec![0.0; sizes.len()];
                for repeat in 0..args.random_repeats {
                    let mut order: Vec<usize> = (0..n).collect();
                    let mut rng = RngSeed(ctx.rng_seed)
                        .derive(1000 + repeat as u64)
                        .rng();
                    order.shuffle(&mut rng);
                    let accs = prefix_accuracies(&train, &holdout, &order, &sizes, args.knn_k)?;
                    for (total, a) in totals.iter_mut().zip(accs) {
                        *total += a;
                    }
                }
                totals
                    .into_iter()
                    .map(|t| t / args.random_repeats as f64)
                    .collect()
            }
        };
        for (&fraction, accuracy) in fractions.iter().zip(&accuracies) {
            rows.push(vec![
                fraction.to_string(),
                method.name().to_string(),
                accuracy.to_string(),
            ]);
        }
        let auc = curve_auc(&fractions, &accuracies);
        summary
            .metrics
            .insert(format!("auc_{}", method.name()), auc);
    }

    write_csv_file(
        &ctx.out,
        "knn_curve.csv",
        &["fraction", "method", "accuracy"],
        rows,
    )?;
    summary.metrics.insert("n_train".to_string(), n as f64);
    summary
        .metrics
        .insert("n_holdout".to_string(), holdout.n() as f64);
    summary.outputs = vec!["knn_curve.csv".to_string()];
    summary.add_timing(ctx.timings, "total", start.elapsed());
    write_summary(&ctx.out, &mut summary)?;
    Ok(())
}

/// Greedy orders are nested, so one full-budget run yields every fraction's
/// subset as a prefix.
fn prefix_accuracies(
    train: &FeatureDataset,
    holdout: &FeatureDataset,
    order: &[usize],
    sizes: &[usize],
    knn_k: usize,
) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mut subset: Vec<usize> = order[..size.min(order.len())].to_vec();
        subset.sort_unstable();
        let view = train.gather_labeled(&subset)?;
        let k = knn_k.min(subset.len()).max(1);
        out.push(knn_accuracy(
            &view,
            holdout.features(),
            holdout.labels().expect("checked labeled"),
            k,
        )?);
    }
    Ok(out)
}

fn curve_auc(fractions: &[f64], accuracies: &[f64]) -> f64 {
    fractions
        .windows(2)
        .zip(accuracies.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum()
}

/// "a:b:s" expands to a, a+s, … up to b; otherwise a comma list. All values
/// must be percents in (0, 100].
fn parse_fractions(text: &str) -> Result<Vec<f64>, CliError> {
    let usage = |message: String| CliError::Usage(message);
    let parse = |piece: &str| -> Result<f64, CliError> {
        piece
            .trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("not a number in --fractions: {piece:?}")))
    };
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "--fractions range must be start:stop:step, got {text:?}"
            )));
        }
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step <= 0.0 {
            return Err(usage("--fractions step must be positive".to_string()));
        }
        let mut values = Vec::new();
        let mut i = 0u32;
        loop {
            let x = start + step * f64::from(i);
            if x > stop + 1e-9 {
                break;
            }
            values.push(x);
            i += 1;
        }
        values
    } else {
        text.split(',').map(parse).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(usage("--fractions is empty".to_string()));
    }
    for &f in &values {
        if !(f > 0.0 && f <= 100.0) {
            return Err(usage(format!("fraction {f} must lie in (0, 100]")));
        }
    }
    Ok(values)
}

fn config_echo(args: &EvalKnnArgs, fractions: &[f64]) -> serde_json::Value {
    json!({
        "train": args.train.display().to_string(),
        "holdout": args.holdout.display().to_string(),
        "fractions": fractions,
        "methods": args.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "knn_k": args.knn_k,
        "random_repeats": args.random_repeats,
        "kernel": format!("{:?}", args.kernel).to_lowercase(),
        "gamma": args.gamma,
        "dense_budget_mb": args.dense_budget_mb,
    })
}
