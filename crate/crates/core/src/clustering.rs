//! Split-based cluster hierarchy over series features.
//!
//! Starting from the single global centroid, the cluster with the largest SSE
//! is repeatedly split in two by perturbing its centroid by `±epsilon` along
//! the feature of largest within-cluster variance, followed by full Lloyd
//! refinement over all centroids. Every step breaks ties toward the lowest
//! index, so the whole construction is deterministic and reproducible.

use alloc::vec::Vec;
use ndarray::{Array2, ArrayView2};

use crate::features::{standardize, StandardizeParams};
use crate::{Error, Result};

/// Lloyd iteration cap per refinement.
const MAX_LLOYD_ITERATIONS: usize = 300;

/// One level of the hierarchy: level `l` partitions the series into `l + 1`
/// clusters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HierarchyLevel {
    /// Cluster index of every series.
    pub assignments: Vec<usize>,
    /// Cluster centroids in standardized feature space.
    pub centroids: Vec<Vec<f64>>,
}

impl HierarchyLevel {
    pub fn n_clusters(&self) -> usize {
        self.centroids.len()
    }

    /// Series indices belonging to cluster `i`, ascending.
    pub fn members(&self, i: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == i)
            .map(|(s, _)| s)
            .collect()
    }
}

/// The full nested sequence of partitions, levels `1..=C-1`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClusterHierarchy {
    /// Requested cluster count `C`; the deepest level has `C` clusters.
    pub c: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub standardize: StandardizeParams,
    /// `levels[l - 1]` holds level `l`.
    pub levels: Vec<HierarchyLevel>,
}

impl ClusterHierarchy {
    pub fn n_series(&self) -> usize {
        self.levels.first().map_or(0, |l| l.assignments.len())
    }

    /// Number of partition levels (`C - 1`).
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Level `l`, for `l` in `1..=n_levels()`.
    pub fn level(&self, l: usize) -> Option<&HierarchyLevel> {
        if l == 0 {
            return None;
        }
        self.levels.get(l - 1)
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Total within-cluster sum of squared distances.
pub fn sse(points: &ArrayView2<f64>, assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    assignments
        .iter()
        .enumerate()
        .map(|(p, &c)| squared_distance(points.row(p).as_slice().expect("contiguous"), &centroids[c]))
        .sum()
}

fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        // Strict improvement only: ties stay with the lower index.
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn cluster_sizes(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = alloc::vec![0usize; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    sizes
}

/// Lloyd refinement of `centroids` over `points`.
///
/// Iterates assignment and centroid updates until the assignment is stable
/// (or 300 iterations). Nearest-centroid ties break toward the lowest
/// centroid index; an empty cluster seizes the point farthest from its own
/// centroid (never emptying a singleton donor, lowest point index on ties).
pub fn kmeans_refine(points: &ArrayView2<f64>, mut centroids: Vec<Vec<f64>>) -> (Vec<usize>, Vec<Vec<f64>>) {
    let n = points.nrows();
    let k = centroids.len();
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let row = |p: usize| points.row(p).as_slice().expect("contiguous").to_vec();

    let mut assignments = alloc::vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut next: Vec<usize> = (0..n)
            .map(|p| nearest_centroid(points.row(p).as_slice().expect("contiguous"), &centroids))
            .collect();

        let mut sizes = cluster_sizes(&next, k);
        for empty in 0..k {
            while sizes[empty] == 0 {
                let victim = (0..n)
                    .filter(|&p| sizes[next[p]] > 1)
                    .max_by(|&a, &b| {
                        let da = squared_distance(
                            points.row(a).as_slice().expect("contiguous"),
                            &centroids[next[a]],
                        );
                        let db = squared_distance(
                            points.row(b).as_slice().expect("contiguous"),
                            &centroids[next[b]],
                        );
                        // Farthest wins; ties go to the lowest point index.
                        da.partial_cmp(&db)
                            .expect("distances are finite")
                            .then(b.cmp(&a))
                    })
                    .expect("some cluster has at least two points");
                sizes[next[victim]] -= 1;
                next[victim] = empty;
                sizes[empty] += 1;
            }
        }

        let stable = next == assignments;
        assignments = next;
        // Update step: centroids become the means of their members.
        let dim = points.ncols();
        let mut sums = alloc::vec![alloc::vec![0.0; dim]; k];
        for (p, &c) in assignments.iter().enumerate() {
            for (acc, &v) in sums[c].iter_mut().zip(row(p).iter()) {
                *acc += v;
            }
        }
        for (c, sum) in sums.into_iter().enumerate() {
            let size = sizes[c] as f64;
            centroids[c] = sum.into_iter().map(|s| s / size).collect();
        }
        if stable {
            break;
        }
    }
    (assignments, centroids)
}

/// Builds the deterministic split-based hierarchy for `C` clusters from raw
/// (unstandardized) feature rows.
pub fn build_hierarchy(features: &Array2<f64>, c: usize, seed: u64, epsilon: f64) -> Result<ClusterHierarchy> {
    let n = features.nrows();
    if c < 2 || c > n {
        return Err(Error::Cardinality {
            requested: c,
            available: n,
        });
    }
    let (z, params) = standardize(features)?;
    let zv = z.view();
    let dim = z.ncols();

    let global: Vec<f64> = (0..dim).map(|d| z.column(d).sum() / n as f64).collect();
    let mut centroids = alloc::vec![global];
    let mut assignments = alloc::vec![0usize; n];
    let mut levels = Vec::with_capacity(c - 1);

    for _k in 2..=c {
        // Split the cluster with the largest SSE.
        let k_now = centroids.len();
        let mut cluster_sse = alloc::vec![0.0; k_now];
        for (p, &a) in assignments.iter().enumerate() {
            cluster_sse[a] += squared_distance(zv.row(p).as_slice().expect("contiguous"), &centroids[a]);
        }
        let split = cluster_sse
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite").then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("at least one cluster");

        // Perturb along the member feature of largest within-cluster
        // variance.
        let members: Vec<usize> = (0..n).filter(|&p| assignments[p] == split).collect();
        let axis = {
            let mut best_axis = 0;
            let mut best_var = -1.0;
            for d in 0..dim {
                let mean: f64 = members.iter().map(|&p| z[[p, d]]).sum::<f64>() / members.len() as f64;
                let var: f64 = members
                    .iter()
                    .map(|&p| (z[[p, d]] - mean) * (z[[p, d]] - mean))
                    .sum::<f64>()
                    / members.len() as f64;
                if var > best_var {
                    best_var = var;
                    best_axis = d;
                }
            }
            best_axis
        };
        let mut low = centroids[split].clone();
        let mut high = centroids[split].clone();
        low[axis] -= epsilon;
        high[axis] += epsilon;
        centroids[split] = low;
        centroids.push(high);

        let refined = kmeans_refine(&zv, centroids);
        assignments = refined.0;
        centroids = refined.1;
        levels.push(HierarchyLevel {
            assignments: assignments.clone(),
            centroids: centroids.clone(),
        });
    }

    Ok(ClusterHierarchy {
        c,
        seed,
        epsilon,
        standardize: params,
        levels,
    })
}
