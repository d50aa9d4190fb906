use anyhow::Result;
use gridcast_core::data::STEP_SECONDS;
use gridcast_core::synth::{generate_synthetic, SYNTH_START};

use super::GenerateArgs;
use crate::artifacts::write_json;
use crate::dataio::{write_csv, DataManifest};
use crate::layout;

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let per_type = args.per_type as usize;
    let weeks = args.weeks as usize;
    let set = generate_synthetic(args.seed, per_type, weeks);

    let csv_path = args
        .out
        .clone()
        .unwrap_or_else(|| layout::data_csv(&args.workdir));
    write_csv(&csv_path, &set)?;
    let manifest_path = csv_path.with_extension("manifest.json");
    write_json(
        &manifest_path,
        &DataManifest {
            seed: args.seed,
            per_type,
            weeks,
            n_series: set.len(),
            start_timestamp: SYNTH_START,
            step_seconds: STEP_SECONDS,
        },
    )?;
    println!(
        "generated {} series x {} steps -> {}",
        set.len(),
        set.series_len(),
        csv_path.display()
    );
    Ok(())
}
