//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with:
//!
//! ```text
//! cargo test -p gridcast-cli --test acceptance -- --nocapture
//! ```
//!
//! Criteria 4, 6 and 7 share one desk-scale pipeline execution (two
//! identical runs into separate workdirs) built on first use.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use gridcast_cli::commands::{
    cmd_ensemble, cmd_evaluate, cmd_generate, cmd_localize, cmd_train_global, EnsembleArgs,
    EvaluateArgs, GenerateArgs, LocalizeArgs, TrainGlobalArgs,
};
use gridcast_cli::layout;
use gridcast_core::clustering::{build_hierarchy, sse};
use gridcast_core::data::split_by_time_subsampled;
use gridcast_core::features::standardize;
use gridcast_core::metrics::{evaluate, mape, mase, naive_seasonal, nmae, SEASON};
use gridcast_core::model::{
    backward, init_params, parameter_count, predict, Dense, ModelConfig, ModelParams,
};
use gridcast_core::synth::generate_synthetic;
use gridcast_core::training::{train_global, TrainConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Criterion 1: parameter-count oracle.
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_parameter_count_oracle() {
    let t0 = Instant::now();
    let local = ModelConfig::with_width(32);
    assert_eq!(parameter_count(&local), 78_848, "width-32 parameter count");

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let cfg = ModelConfig {
            n_blocks: rng.random_range(1..=4),
            n_fc_layers: rng.random_range(1..=4),
            width: rng.random_range(1..=24),
            k: rng.random_range(1..=48),
            h: rng.random_range(1..=16),
            cat_dim: rng.random_range(0..=67),
            share_weights: false,
        };
        let params = init_params(&cfg, rng.random()).unwrap();
        assert_eq!(
            params.scalar_count(),
            parameter_count(&cfg),
            "closed form differs from traversal for {cfg:?}"
        );
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "criterion 1 took {elapsed:.3}s (budget 1s)");
    println!("ACCEPTANCE 1 (parameter-count oracle): PASS — 78,848 anchor + 50 random configs in {elapsed:.3}s");
}

// ---------------------------------------------------------------------------
// Criterion 2: gradient correctness against an independent reference.
// ---------------------------------------------------------------------------

/// Plain-loop forward pass plus loss, independent of the ndarray
/// implementation under test. Returns the loss and a kink signature (ReLU
/// activity bits, error signs and parameter signs); a finite-difference
/// probe is only trusted when the signature is identical on both sides of
/// the perturbation, i.e. when no kink was crossed.
fn reference_loss(
    p: &ModelParams,
    x: &[Vec<f64>],
    exog: &[Vec<f64>],
    y: &[Vec<f64>],
    lambda: f64,
) -> (f64, Vec<i8>) {
    fn sign8(v: f64) -> i8 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }
    fn apply(a: &[f64], d: &Dense) -> Vec<f64> {
        (0..d.bias.len())
            .map(|o| {
                let mut acc = d.bias[o];
                for (i, &ai) in a.iter().enumerate() {
                    acc += ai * d.weights[[i, o]];
                }
                acc
            })
            .collect()
    }

    let cfg = &p.config;
    let mut sig = Vec::new();
    let mut total_abs = 0.0;
    for s in 0..x.len() {
        let mut residual = x[s].clone();
        let mut forecast = vec![0.0; cfg.h];
        for (b, block) in p.blocks.iter().enumerate() {
            let mut a = residual.clone();
            if b == 0 {
                a.extend_from_slice(&exog[s]);
            }
            for dense in &block.fc {
                let z = apply(&a, dense);
                sig.extend(z.iter().map(|&v| sign8(v)));
                a = z.into_iter().map(|v| v.max(0.0)).collect();
            }
            let backcast = apply(&a, &block.backcast);
            let partial = apply(&a, &block.forecast);
            for j in 0..cfg.k {
                residual[j] -= backcast[j];
            }
            for j in 0..cfg.h {
                forecast[j] += partial[j];
            }
        }
        for j in 0..cfg.h {
            let e = forecast[j] - y[s][j];
            sig.push(sign8(e));
            total_abs += e.abs();
        }
    }
    let mut l1 = 0.0;
    for slice in p.param_slices() {
        for &t in slice {
            l1 += t.abs();
            // |theta| only contributes a kink when it is penalized.
            if lambda > 0.0 {
                sig.push(sign8(t));
            }
        }
    }
    let loss = total_abs / (x.len() * cfg.h) as f64 + lambda * l1;
    (loss, sig)
}

#[test]
fn criterion_2_gradient_matches_central_differences() {
    let t0 = Instant::now();
    let eps = 1e-6;
    let mut checked = 0usize;
    let mut skipped = 0usize;

    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = ModelConfig {
            n_blocks: rng.random_range(1..=2),
            n_fc_layers: rng.random_range(1..=2),
            width: rng.random_range(1..=4),
            k: rng.random_range(1..=8),
            h: rng.random_range(1..=2),
            cat_dim: if seed % 3 == 0 { 0 } else { 3 },
            share_weights: false,
        };
        let m = rng.random_range(1..=3);
        let lambda = if seed % 2 == 0 { 0.0 } else { 1e-3 };
        let params = init_params(&cfg, seed.wrapping_add(99)).unwrap();

        let x: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..cfg.k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let exog: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let mut row = vec![0.0; cfg.cat_dim];
                if cfg.cat_dim > 0 {
                    row[rng.random_range(0..cfg.cat_dim)] = 1.0;
                }
                row
            })
            .collect();
        let y: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..cfg.h).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();

        let xa = Array2::from_shape_fn((m, cfg.k), |(r, c)| x[r][c]);
        let ea = Array2::from_shape_fn((m, cfg.cat_dim), |(r, c)| exog[r][c]);
        let ya = Array2::from_shape_fn((m, cfg.h), |(r, c)| y[r][c]);
        let (loss, grads) = backward(&params, xa.view(), ea.view(), ya.view(), lambda).unwrap();
        let (ref_loss, _) = reference_loss(&params, &x, &exog, &y, lambda);
        assert!(
            (loss - ref_loss).abs() <= 1e-12 * (1.0 + ref_loss.abs()),
            "seed {seed}: loss {loss} differs from reference {ref_loss}"
        );

        let flat_grads: Vec<f64> = grads.param_slices().iter().flat_map(|s| s.iter().copied()).collect();
        let n = flat_grads.len();
        for j in 0..n {
            let probe = |delta: f64| {
                let mut p2 = params.clone();
                let mut remaining = j;
                for slice in p2.param_slices_mut() {
                    if remaining < slice.len() {
                        slice[remaining] += delta;
                        break;
                    }
                    remaining -= slice.len();
                }
                reference_loss(&p2, &x, &exog, &y, lambda)
            };
            let (loss_plus, sig_plus) = probe(eps);
            let (loss_minus, sig_minus) = probe(-eps);
            if sig_plus != sig_minus {
                // The probe interval crosses a ReLU / |error| / |theta|
                // kink; central differences are meaningless there.
                skipped += 1;
                continue;
            }
            let fd = (loss_plus - loss_minus) / (2.0 * eps);
            let a = flat_grads[j];
            let abs_err = (a - fd).abs();
            let rel_err = abs_err / a.abs().max(fd.abs()).max(1e-8);
            assert!(
                abs_err < 1e-8 || rel_err < 1e-5,
                "seed {seed} coordinate {j}: analytic {a} vs FD {fd} (rel {rel_err:.2e})"
            );
            checked += 1;
        }
    }

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "criterion 2 took {elapsed:.1}s (budget 30s)");
    assert!(checked > 500, "oracle barely exercised: only {checked} coordinates checked");
    assert!(
        skipped * 100 <= (checked + skipped) * 30,
        "too many kink exclusions: {skipped} of {}",
        checked + skipped
    );
    println!(
        "ACCEPTANCE 2 (gradient correctness): PASS — {checked} coordinates checked, {skipped} kink-adjacent excluded, {elapsed:.1}s"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: metric identities.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_metric_identities() {
    let t0 = Instant::now();
    let set = generate_synthetic(11, 2, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let series = &set.series()[rng.random_range(0..set.len())];
        let origin = rng.random_range(SEASON..=series.len() - 48);
        let actual = &series.values[origin..origin + 48];
        let history = &series.values[..origin];
        let naive = naive_seasonal(series, origin, 48, SEASON).unwrap();
        let m_naive = mase(actual, &naive, history, SEASON).unwrap();
        assert!(
            (m_naive - 1.0).abs() <= 1e-12,
            "MASE of the seasonal naive forecast must be 1, got {m_naive}"
        );
        let m_perfect = mase(actual, actual, history, SEASON).unwrap();
        assert_eq!(m_perfect, 0.0, "MASE of a perfect forecast must be 0");
    }

    // Hand cases reproduce exactly.
    assert_eq!(
        mase(&[10.0, 12.0], &[9.0, 13.0], &[8.0, 8.0], 2).unwrap(),
        1.0 / 3.0
    );
    assert_eq!(mape(&[100.0], &[90.0]).unwrap(), 10.0);
    assert_eq!(mape(&[50.0, 200.0], &[55.0, 180.0]).unwrap(), 10.0);
    assert_eq!(mape(&[100.0], &[100.0]).unwrap(), 0.0);
    assert_eq!(nmae(&[10.0, 10.0], &[9.0, 11.0]).unwrap(), 0.1);
    assert_eq!(nmae(&[10.0, 10.0], &[10.0, 10.0]).unwrap(), 0.0);

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion 3 took {elapsed:.1}s (budget 5s)");
    println!("ACCEPTANCE 3 (metric identities): PASS — 100 random windows + hand cases in {elapsed:.2}s");
}

// ---------------------------------------------------------------------------
// Criterion 5: clustering oracle.
// ---------------------------------------------------------------------------

/// Optimal SSE over all labelings of `z` into at most `k` clusters, with
/// mean centroids. Exhaustive; feasible for n <= 10, k <= 3.
fn brute_force_optimal_sse(z: &Array2<f64>, k: usize) -> f64 {
    let n = z.nrows();
    let dim = z.ncols();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sq = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for d in 0..dim {
                let v = z[[p, d]];
                sums[c][d] += v;
                sq[c] += v * v;
            }
        }
        let mut total = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let mut norm2 = 0.0;
            for d in 0..dim {
                norm2 += sums[c][d] * sums[c][d];
            }
            total += sq[c] - norm2 / counts[c] as f64;
        }
        best = best.min(total);

        // Odometer increment over k^n labelings.
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn criterion_5_clustering_oracle() {
    let t0 = Instant::now();

    // Part 1: split-initialized Lloyd refinement vs exhaustive optimum on
    // clustered instances (cluster-structured points, like series features).
    let mut optimal = 0usize;
    let trials = 200usize;
    for seed in 0..trials as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(4..=10);
        let k = rng.random_range(2..=3.min(n));
        let centers: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..8).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect())
            .collect();
        let pts = Array2::from_shape_fn((n, 8), |(p, d)| {
            centers[p % k][d] + (rng.random::<f64>() - 0.5) * 0.5
        });
        let hierarchy = build_hierarchy(&pts, k, seed, 0.05).unwrap();
        let level = hierarchy.level(k - 1).unwrap();
        let (z, _) = standardize(&pts).unwrap();
        let got = sse(&z.view(), &level.assignments, &level.centroids);
        let opt = brute_force_optimal_sse(&z, k);
        assert!(
            got >= opt - 1e-9,
            "seed {seed}: SSE {got} beats the brute-force optimum {opt}"
        );
        if got <= opt + 1e-7 * opt.max(1.0) {
            optimal += 1;
        }
    }
    assert!(
        optimal * 100 >= trials * 95,
        "only {optimal}/{trials} runs reached the brute-force optimum"
    );

    // Part 2: partition property and SSE monotonicity across 50 seeded
    // hierarchies.
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.random_range(6..=24);
        let c = rng.random_range(2..=8.min(n));
        let pts = Array2::from_shape_fn((n, 8), |_| rng.random::<f64>() * 4.0 - 2.0);
        let hierarchy = build_hierarchy(&pts, c, seed, 0.05).unwrap();
        let (z, _) = standardize(&pts).unwrap();
        let mut prev = f64::INFINITY;
        for (idx, level) in hierarchy.levels.iter().enumerate() {
            let k = idx + 2;
            assert_eq!(level.n_clusters(), k);
            let mut counts = vec![0usize; k];
            for &a in &level.assignments {
                counts[a] += 1;
            }
            assert_eq!(counts.iter().sum::<usize>(), n, "every series assigned once");
            assert!(counts.iter().all(|&s| s > 0), "no empty cluster allowed");
            let cur = sse(&z.view(), &level.assignments, &level.centroids);
            assert!(
                cur <= prev + 1e-9,
                "seed {seed}: SSE rose from {prev} to {cur} at level {}",
                idx + 1
            );
            prev = cur;
        }
    }

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 5 took {elapsed:.1}s (budget 60s)");
    println!(
        "ACCEPTANCE 5 (clustering oracle): PASS — {optimal}/{trials} brute-force optimal, 50 hierarchies partition/monotone, {elapsed:.1}s"
    );
}

// ---------------------------------------------------------------------------
// Shared desk-scale pipeline for criteria 4, 6 and 7.
// ---------------------------------------------------------------------------

struct PipelineRun {
    dir: tempfile::TempDir,
    seconds: f64,
}

impl PipelineRun {
    fn workdir(&self) -> &Path {
        self.dir.path()
    }
}

struct SharedRuns {
    first: PipelineRun,
    second: PipelineRun,
}

static RUNS: OnceLock<SharedRuns> = OnceLock::new();

/// 40 series (10 per type), 20 weeks, 16/2/2 split, width 64, C = 6,
/// subsample 4.
fn run_desk_scale_pipeline() -> PipelineRun {
    let dir = tempfile::tempdir().expect("temp workdir");
    let wd = dir.path().to_path_buf();
    let t0 = Instant::now();
    cmd_generate(&GenerateArgs {
        seed: 42,
        per_type: 10,
        weeks: 20,
        workdir: wd.clone(),
        out: None,
    })
    .expect("generate");
    cmd_train_global(&TrainGlobalArgs {
        data: None,
        workdir: wd.clone(),
        config: None,
        width: Some(64),
        blocks: None,
        layers: None,
        lags: None,
        horizon: None,
        train_weeks: Some(16),
        val_weeks: Some(2),
        test_weeks: Some(2),
        lr: None,
        lambda: None,
        batch_size: None,
        max_epochs: Some(25),
        patience: None,
        min_delta: None,
        seed: Some(7),
        subsample: Some(4),
    })
    .expect("train-global");
    cmd_localize(&LocalizeArgs {
        data: None,
        workdir: wd.clone(),
        clusters: Some(6),
        epsilon: None,
        cluster_seed: Some(3),
        ft_lr: None,
        ft_epochs: Some(4),
        ft_patience: None,
        ft_min_delta: None,
        jobs: 2,
        resume: false,
    })
    .expect("localize");
    cmd_ensemble(&EnsembleArgs {
        data: None,
        workdir: wd.clone(),
    })
    .expect("ensemble");
    cmd_evaluate(&EvaluateArgs {
        data: None,
        workdir: wd.clone(),
    })
    .expect("evaluate");
    PipelineRun {
        dir,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

fn shared_runs() -> &'static SharedRuns {
    RUNS.get_or_init(|| SharedRuns {
        first: run_desk_scale_pipeline(),
        second: run_desk_scale_pipeline(),
    })
}

fn read_csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("non-empty csv")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("column {name} missing from {header:?}"))
}

// ---------------------------------------------------------------------------
// Criterion 4: ensemble dominance on validation, per series.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_ensemble_dominance() {
    let runs = shared_runs();
    let path = layout::reports_dir(runs.first.workdir()).join("val_per_series.csv");
    let (header, rows) = read_csv_rows(&path);
    let (ig, ia, ib, ie) = (
        column(&header, "global"),
        column(&header, "all"),
        column(&header, "best"),
        column(&header, "ens"),
    );
    assert_eq!(rows.len(), 40, "expected one row per series");
    for row in &rows {
        let id = &row[0];
        let global: f64 = row[ig].parse().unwrap();
        let all: f64 = row[ia].parse().unwrap();
        let best: f64 = row[ib].parse().unwrap();
        let ens: f64 = row[ie].parse().unwrap();
        assert!(ens <= best, "{id}: ENS {ens} > BEST {best}");
        assert!(best <= all, "{id}: BEST {best} > ALL {all}");
        assert!(ens <= global, "{id}: ENS {ens} > global {global}");
    }
    println!("ACCEPTANCE 4 (ensemble dominance): PASS — ENS <= BEST <= ALL and ENS <= global for all 40 series");
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end desk-scale run.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_end_to_end_desk_scale() {
    let runs = shared_runs();
    let run = &runs.first;
    assert!(
        run.seconds < 1200.0,
        "pipeline took {:.0}s (budget 20 minutes)",
        run.seconds
    );

    let (header, rows) = read_csv_rows(&layout::reports_dir(run.workdir()).join("summary.csv"));
    let find = |strategy: &str| -> &Vec<String> {
        rows.iter()
            .find(|r| r[0] == strategy)
            .unwrap_or_else(|| panic!("strategy {strategy} missing from summary"))
    };
    let global = find("global");
    let overall: f64 = global[column(&header, "all")].parse().unwrap();
    let single: f64 = global[column(&header, "single")].parse().unwrap();
    let lts: f64 = global[column(&header, "lTS")].parse().unwrap();
    assert!(overall < 1.0, "(a) global test MASE {overall} must beat naive");
    assert!(
        lts < single,
        "(b) lTS group MASE {lts} must be below the Single group's {single}"
    );

    let (vheader, vrows) =
        read_csv_rows(&layout::reports_dir(run.workdir()).join("val_per_series.csv"));
    let (ig, ie) = (column(&vheader, "global"), column(&vheader, "ens"));
    let mean = |idx: usize| -> f64 {
        vrows.iter().map(|r| r[idx].parse::<f64>().unwrap()).sum::<f64>() / vrows.len() as f64
    };
    let (val_global, val_ens) = (mean(ig), mean(ie));
    assert!(
        val_ens <= val_global,
        "(c) ENS validation MASE {val_ens} must not exceed global-only {val_global}"
    );

    println!(
        "ACCEPTANCE 6 (end-to-end desk scale): PASS — global test MASE {overall:.4} (<1), lTS {lts:.4} < single {single:.4}, ENS val {val_ens:.4} <= global val {val_global:.4}, {:.0}s",
        run.seconds
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: bit-identical artifacts across identically seeded runs.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_reproducibility() {
    let runs = shared_runs();
    let (a, b) = (runs.first.workdir(), runs.second.workdir());

    let mut compared = 0usize;
    let mut check = |rel: &Path| {
        let fa = fs::read(a.join(rel)).unwrap_or_else(|e| panic!("{}: {e}", rel.display()));
        let fb = fs::read(b.join(rel)).unwrap_or_else(|e| panic!("{}: {e}", rel.display()));
        assert!(
            fa == fb,
            "artifact {} differs between identically seeded runs",
            rel.display()
        );
        compared += 1;
    };

    check(Path::new("data/synthetic.csv"));
    check(Path::new("hierarchy.json"));
    check(Path::new("selections.json"));

    let models_a: Vec<String> = {
        let mut names: Vec<String> = fs::read_dir(layout::models_dir(a))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    assert!(models_a.contains(&"global.gcm".to_string()));
    assert_eq!(models_a.len(), 21, "global + 20 localized models for C = 6");
    for name in &models_a {
        check(&Path::new("models").join(name));
    }

    let mut reports: Vec<String> = fs::read_dir(layout::reports_dir(a))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    reports.sort();
    assert!(reports.len() >= 10, "expected the full report set, got {reports:?}");
    for name in &reports {
        check(&Path::new("reports").join(name));
    }

    println!("ACCEPTANCE 7 (reproducibility): PASS — {compared} artifacts bit-identical across two runs");
}

// ---------------------------------------------------------------------------
// Criterion 8: subsampling contract.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_subsampling_contract() {
    let t0 = Instant::now();
    let set = generate_synthetic(42, 10, 20);
    let split = split_by_time_subsampled(&set, 16, 2, 2, 336, 48, 12).unwrap();

    // Full per-series window count before subsampling.
    let m_full = 16 * 336 - 336 - 48 + 1;
    for index in 0..set.len() {
        let kept = split.train.rows_of_series(index).len() as f64;
        let target = m_full as f64 / 12.0;
        assert!(
            (kept - target).abs() <= 1.0,
            "series {index}: kept {kept} rows, expected {target:.2} +/- 1"
        );
    }

    // Training on the 12x-reduced rows still beats the naive baseline.
    let cfg = ModelConfig::with_width(64);
    let tc = TrainConfig {
        max_epochs: 25,
        seed: 7,
        ..TrainConfig::global()
    };
    let (params, report) = train_global(&split, &cfg, &tc).unwrap();
    let forecasts = predict(&params, &split.test).unwrap();
    let result = evaluate(&forecasts.view(), &split.test, &set, SEASON).unwrap();
    assert!(
        result.overall_mase < 1.0,
        "overall test MASE {} must beat naive after 12x subsampling",
        result.overall_mase
    );

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 1200.0, "criterion 8 took {elapsed:.0}s (budget 20 minutes)");
    println!(
        "ACCEPTANCE 8 (subsampling contract): PASS — per-series rows within ±1 of m/12, test MASE {:.4} (<1) after {} epochs, {elapsed:.0}s",
        result.overall_mase,
        report.epochs.len()
    );
}
