//! `subsel kernel`: materialize a similarity or distance matrix, optionally
//! sparsified, for inspection or downstream tooling.

use super::{build_distances, build_similarity, write_csv_file, KernelArg};
use crate::summary::{write_summary, RunSummary};
use crate::{CliError, Ctx};
use clap::{Args, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;
use subsel::{knn_sparsify, load_dataset};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Cosine,
    Rbf,
    Euclidean,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Input dataset (CSV or binary).
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = KindArg::Cosine)]
    pub kind: KindArg,

    /// RBF bandwidth (required with --kind rbf).
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Keep only the g strongest neighbors per row (similarities only).
    #[arg(long)]
    pub sparsify: Option<usize>,

    /// Dense kernel memory budget in MiB.
    #[arg(long)]
    pub dense_budget_mb: Option<usize>,
}

pub fn run(ctx: &Ctx, args: KernelArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&ctx.out)?;
    let start = Instant::now();
    if matches!(args.kind, KindArg::Euclidean) && args.sparsify.is_some() {
        return Err(CliError::Usage(
            "--sparsify applies to similarity kernels, not euclidean distances".to_string(),
        ));
    }

    let loaded = load_dataset(&args.input)?;
    let dataset = loaded.dataset;
    let mut summary = RunSummary::new("kernel", ctx.rng_seed, config_echo(&args));
    summary.set_label_mapping(&loaded.label_mapping);
    let n = dataset.n();

    match args.kind {
        KindArg::Euclidean => {
            let dist = build_distances(dataset.features(), args.dense_budget_mb)?;
            write_dense(&ctx.out, n, |i, j| dist.get(i, j))?;
        }
        KindArg::Cosine | KindArg::Rbf => {
            let kernel_arg = match args.kind {
                KindArg::Cosine => KernelArg::Cosine,
                _ => KernelArg::Rbf,
            };
            let sim = build_similarity(
                dataset.features(),
                kernel_arg,
                args.gamma,
                args.dense_budget_mb,
            )?;
            match args.sparsify {
                None => write_dense(&ctx.out, n, |i, j| sim.get(i, j))?,
                Some(g) => {
                    let sparse = knn_sparsify(&sim, g)?;
                    let mut rows = Vec::new();
                    for i in 0..n {
                        for &(j, value) in sparse.neighbors(i) {
                            rows.push(vec![i.to_string(), j.to_string(), value.to_string()]);
                        }
                    }
                    summary
                        .metrics
                        .insert("num_edges".to_string(), rows.len() as f64);
                    write_csv_file(&ctx.out, "kernel.csv", &["i", "j", "value"], rows)?;
                }
            }
        }
    }

    summary.metrics.insert("n".to_string(), n as f64);
    summary.outputs = vec!["kernel.csv".to_string()];
    summary.add_timing(ctx.timings, "total", start.elapsed());
    write_summary(&ctx.out, &mut summary)?;
    Ok(())
}

/// Dense matrices go out as headerless CSV: row i holds entries (i, 0..n).
fn write_dense(
    out: &std::path::Path,
    n: usize,
    entry: impl Fn(usize, usize) -> f64,
) -> Result<(), CliError> {
    let mut text = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| entry(i, j).to_string()).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(out.join("kernel.csv"), text).map_err(CliError::Output)?;
    Ok(())
}

fn config_echo(args: &KernelArgs) -> serde_json::Value {
    json!({
        "input": args.input.display().to_string(),
        "kind": format!("{:?}", args.kind).to_lowercase(),
        "gamma": args.gamma,
        "sparsify": args.sparsify,
        "dense_budget_mb": args.dense_budget_mb,
    })
}
