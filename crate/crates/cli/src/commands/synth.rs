//! `subsel synth`: generate a clustered synthetic dataset and write it in the
//! selected on-disk format.

use crate::summary::{write_summary, RunSummary};
use crate::{CliError, Ctx};
use clap::Args;
use serde_json::json;
use std::time::Instant;
use subsel::{generate, save_dataset, ClassRule, FileFormat, RngSeed, SyntheticSpec};

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2)]
    pub clusters: usize,

    #[arg(long, default_value_t = 50)]
    pub per_cluster: usize,

    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    /// Standard deviation of each cluster.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,

    /// Label assignment: "cluster", "modulo:C", or "blocks:C".
    #[arg(long, default_value = "cluster")]
    pub class_rule: String,

    /// Near-duplicate copies per base point (1 = no duplication).
    #[arg(long, default_value_t = 1)]
    pub redundancy: usize,

    /// Distance between adjacent cluster centers.
    #[arg(long, default_value_t = 3.0)]
    pub center_distance: f64,

    /// Output file stem; the extension follows --format.
    #[arg(long, default_value = "synth")]
    pub name: String,

    /// Prefix prepended to every row id, e.g. to keep separately generated
    /// train and holdout pools id-disjoint.
    #[arg(long, default_value = "")]
    pub id_prefix: String,
}

pub fn run(ctx: &Ctx, args: SynthArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&ctx.out)?;
    let start = Instant::now();
    let spec = SyntheticSpec {
        clusters: args.clusters,
        points_per_cluster: args.per_cluster,
        dim: args.dim,
        sigma: args.sigma,
        class_rule: parse_class_rule(&args.class_rule)?,
        redundancy: args.redundancy,
        center_distance: args.center_distance,
    };
    let mut dataset = generate(&spec, RngSeed(ctx.rng_seed))?;
    if !args.id_prefix.is_empty() {
        let ids = dataset
            .ids()
            .iter()
            .map(|id| format!("{}{id}", args.id_prefix))
            .collect();
        dataset = subsel::FeatureDataset::new(
            dataset.features().to_owned(),
            dataset.labels().map(<[u32]>::to_vec),
            ids,
        )?;
    }

    let extension = match ctx.format {
        FileFormat::Csv => "csv",
        FileFormat::Binary => "bin",
    };
    let file_name = format!("{}.{extension}", args.name);
    save_dataset(&ctx.out.join(&file_name), &dataset, ctx.format)?;

    let mut summary = RunSummary::new("synth", ctx.rng_seed, config_echo(&args));
    summary.metrics.insert("n".to_string(), dataset.n() as f64);
    summary
        .metrics
        .insert("dim".to_string(), dataset.dim() as f64);
    summary.metrics.insert(
        "num_classes".to_string(),
        spec.num_classes() as f64,
    );
    summary.outputs = vec![file_name];
    summary.add_timing(ctx.timings, "total", start.elapsed());
    write_summary(&ctx.out, &mut summary)?;
    Ok(())
}

fn parse_class_rule(text: &str) -> Result<ClassRule, CliError> {
    let lower = text.trim().to_ascii_lowercase();
    if lower == "cluster" {
        return Ok(ClassRule::ClusterIsClass);
    }
    let parse_count = |piece: &str| {
        piece
            .parse::<u32>()
            .map_err(|_| CliError::Usage(format!("bad class count in --class-rule: {text:?}")))
    };
    if let Some(rest) = lower.strip_prefix("modulo:") {
        return Ok(ClassRule::Modulo(parse_count(rest)?));
    }
    if let Some(rest) = lower.strip_prefix("blocks:") {
        return Ok(ClassRule::Blocks(parse_count(rest)?));
    }
    Err(CliError::Usage(format!(
        "--class-rule must be \"cluster\", \"modulo:C\", or \"blocks:C\", got {text:?}"
    )))
}

fn config_echo(args: &SynthArgs) -> serde_json::Value {
    json!({
        "clusters": args.clusters,
        "per_cluster": args.per_cluster,
        "dim": args.dim,
        "sigma": args.sigma,
        "class_rule": args.class_rule,
        "redundancy": args.redundancy,
        "center_distance": args.center_distance,
        "name": args.name,
        "id_prefix": args.id_prefix,
    })
}
