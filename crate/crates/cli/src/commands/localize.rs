use anyhow::{Context, Result};
use gridcast_core::clustering::build_hierarchy;
use gridcast_core::localization::{localization_jobs, localize_one};
use rayon::prelude::*;

use super::{data_path, LocalizeArgs};
use crate::artifacts::{write_json, HierarchyFile, LocalizeManifest};
use crate::config::PipelineConfig;
use crate::layout;
use crate::model_io::{read_model, write_model};
use crate::pipeline::{feature_matrix, prepare, train_segment_len};

pub fn cmd_localize(args: &LocalizeArgs) -> Result<()> {
    let mut cfg = PipelineConfig::load_pinned(&args.workdir)?;
    if let Some(v) = args.clusters {
        cfg.cluster.clusters = v;
    }
    if let Some(v) = args.epsilon {
        cfg.cluster.epsilon = v;
    }
    if let Some(v) = args.cluster_seed {
        cfg.cluster.seed = v;
    }
    if let Some(v) = args.ft_lr {
        cfg.finetune.lr = v;
    }
    if let Some(v) = args.ft_epochs {
        cfg.finetune.max_epochs = v;
    }
    if let Some(v) = args.ft_patience {
        cfg.finetune.patience = v;
    }
    if let Some(v) = args.ft_min_delta {
        cfg.finetune.min_delta = v;
    }

    let data = data_path(&args.data, &args.workdir);
    let prepared = prepare(&data, &cfg)?;
    let global = read_model(&layout::global_model(&args.workdir))?;
    anyhow::ensure!(
        global.config == cfg.model_config(),
        "global model on disk does not match the pinned pipeline configuration"
    );

    let features = feature_matrix(&prepared.set, train_segment_len(&cfg))?;
    let hierarchy = build_hierarchy(
        &features,
        cfg.cluster.clusters,
        cfg.cluster.seed,
        cfg.cluster.epsilon,
    )?;
    write_json(
        &layout::hierarchy(&args.workdir),
        &HierarchyFile {
            series_ids: prepared.set.series().iter().map(|s| s.id.clone()).collect(),
            hierarchy: hierarchy.clone(),
        },
    )?;

    let tc = cfg.finetune_config();
    let jobs = localization_jobs(&hierarchy);
    let total = jobs.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .context("building worker pool")?;
    pool.install(|| -> Result<()> {
        jobs.par_iter().try_for_each(|&(l, i)| -> Result<()> {
            let path = layout::localized_model(&args.workdir, l, i);
            if args.resume && path.exists() {
                let existing = read_model(&path)
                    .with_context(|| format!("resuming from {}", path.display()))?;
                anyhow::ensure!(
                    existing.config == global.config,
                    "{}: existing model does not match the global configuration",
                    path.display()
                );
                return Ok(());
            }
            let (params, report) = localize_one(&global, &hierarchy, &prepared.split, &tc, l, i)?;
            write_model(&path, &params)?;
            println!(
                "localized (level {l}, cluster {i}): {} epochs, best val MAE {:.6}",
                report.epochs.len(),
                report.best_val_loss
            );
            Ok(())
        })
    })?;

    write_json(
        &layout::localize_manifest(&args.workdir),
        &LocalizeManifest {
            clusters: cfg.cluster.clusters,
            epsilon: cfg.cluster.epsilon,
            cluster_seed: cfg.cluster.seed,
            finetune: cfg.finetune.clone(),
            base_seed: tc.seed,
            jobs_completed: total,
        },
    )?;
    println!(
        "store complete: global + {} localized models -> {}",
        total,
        layout::models_dir(&args.workdir).display()
    );
    Ok(())
}
