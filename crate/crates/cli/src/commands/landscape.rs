use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use shotqaoa::landscape::{centered_bounds, compute_landscape};
use shotqaoa::problems::rescale_instance;
use shotqaoa::protocol::{build_param_scaling, initial_parameters, ProblemFamily};
use shotqaoa::simulator::MixerKind;

use crate::record::ProtocolRecord;
use crate::CommandResult;

#[derive(Parser, Debug)]
pub struct Args {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// QAOA depth (grid has 2p dimensions).
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Points along each dimension.
    #[arg(long, default_value_t = 128)]
    resolution: usize,
    /// Box width per dimension, centered on the protocol initial point.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    box_width: f64,
    /// Output prefix; writes PREFIX.qgrd and PREFIX.csv.
    #[arg(long)]
    out_prefix: PathBuf,
    /// Protocol record whose optimizer queries are exported as ordered
    /// rows to PREFIX_overlay.csv.
    #[arg(long)]
    overlay: Option<PathBuf>,
    /// Fixed-parameter table override.
    #[arg(long)]
    table: Option<PathBuf>,
}

pub fn run(args: Args) -> CommandResult {
    let instance = super::load_instance(&args.instance)?;
    let table = super::load_table(args.table.as_deref())?;
    let (rescaled, _) = rescale_instance(&instance)?;
    let initial = initial_parameters(ProblemFamily::of(instance.kind()), args.p, &table)?;
    let bounds = centered_bounds(&initial.to_point(), args.box_width);
    let grid = compute_landscape(
        &rescaled,
        args.p,
        MixerKind::default_for(instance.kind()),
        &bounds,
        args.resolution,
    )?;

    let grid_path = args.out_prefix.with_extension("qgrd");
    grid.export(&grid_path)
        .with_context(|| format!("writing {}", grid_path.display()))?;
    let csv_path = args.out_prefix.with_extension("csv");
    let file =
        File::create(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
    grid.write_csv(BufWriter::new(file))?;

    if let Some(overlay) = &args.overlay {
        let text = std::fs::read_to_string(overlay)
            .with_context(|| format!("reading {}", overlay.display()))?;
        let record: ProtocolRecord = serde_json::from_str(text.trim())
            .with_context(|| format!("parsing protocol record {}", overlay.display()))?;
        let scaling = build_param_scaling(&record.result.initial_params);
        let overlay_path = overlay_path_for(&args.out_prefix);
        let mut out = BufWriter::new(
            File::create(&overlay_path)
                .with_context(|| format!("writing {}", overlay_path.display()))?,
        );
        let p = record.result.initial_params.p();
        let mut header = Vec::new();
        if p == 1 {
            header.push("gamma".to_string());
            header.push("beta".to_string());
        } else {
            for i in 1..=p {
                header.push(format!("gamma_{i}"));
            }
            for i in 1..=p {
                header.push(format!("beta_{i}"));
            }
        }
        writeln!(out, "order,{},value", header.join(","))?;
        for (order, step) in record.result.trace.records.iter().enumerate() {
            let params = scaling.unscale(&step.point);
            write!(out, "{order}")?;
            for value in params.gamma.iter().chain(&params.beta) {
                write!(out, ",{value}")?;
            }
            writeln!(out, ",{}", step.value)?;
        }
    }
    Ok(())
}

fn overlay_path_for(prefix: &std::path::Path) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "landscape".into());
    name.push_str("_overlay.csv");
    prefix.with_file_name(name)
}
