use anyhow::Result;
use gridcast_core::training::train_global;

use super::{data_path, TrainGlobalArgs};
use crate::artifacts::write_train_report_csv;
use crate::config::PipelineConfig;
use crate::layout;
use crate::model_io::write_model;
use crate::pipeline::prepare;

fn resolve_config(args: &TrainGlobalArgs) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(args.config.as_deref())?;
    macro_rules! over {
        ($($flag:expr => $field:expr),* $(,)?) => {
            $(if let Some(v) = $flag { $field = v; })*
        };
    }
    over! {
        args.width => cfg.model.width,
        args.blocks => cfg.model.blocks,
        args.layers => cfg.model.layers,
        args.lags => cfg.model.lags,
        args.horizon => cfg.model.horizon,
        args.train_weeks => cfg.split.train_weeks,
        args.val_weeks => cfg.split.val_weeks,
        args.test_weeks => cfg.split.test_weeks,
        args.lr => cfg.train.lr,
        args.lambda => cfg.train.lambda,
        args.batch_size => cfg.train.batch_size,
        args.max_epochs => cfg.train.max_epochs,
        args.patience => cfg.train.patience,
        args.min_delta => cfg.train.min_delta,
        args.seed => cfg.train.seed,
        args.subsample => cfg.train.subsample,
    }
    Ok(cfg)
}

pub fn cmd_train_global(args: &TrainGlobalArgs) -> Result<()> {
    let cfg = resolve_config(args)?;
    let data = data_path(&args.data, &args.workdir);
    let prepared = prepare(&data, &cfg)?;

    let full_rows = prepared.set.len()
        * (cfg.split.train_weeks * gridcast_core::data::WEEK_STEPS - cfg.model.lags
            - cfg.model.horizon
            + 1);
    println!(
        "training rows: {} (full {}, subsample factor {})",
        prepared.split.train.len(),
        full_rows,
        cfg.train.subsample
    );

    let (params, report) = train_global(&prepared.split, &cfg.model_config(), &cfg.train_config())?;
    write_model(&layout::global_model(&args.workdir), &params)?;
    write_train_report_csv(
        &layout::reports_dir(&args.workdir).join("train_global.csv"),
        &report,
    )?;
    cfg.store(&args.workdir)?;

    println!(
        "trained {} epochs in {:.1}s; best validation MAE {:.6} at epoch {}",
        report.epochs.len(),
        report.wall_time_s,
        report.best_val_loss,
        report.best_epoch
    );
    println!("model -> {}", layout::global_model(&args.workdir).display());
    Ok(())
}
