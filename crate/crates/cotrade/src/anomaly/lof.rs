//! Local outlier factor in a 2-D feature space with Euclidean distance.
//!
//! Standard construction: k-distance neighborhoods (including all ties at
//! the k-distance), reachability distances, local reachability density, and
//! the LOF ratio. Duplicate points make reachability sums zero; those lrd
//! values are capped at a large finite sentinel so every LOF stays finite.

use super::AnomalyError;
use crate::exec::{map_ordered, Exec};

/// Cap for local reachability density when a point's neighborhood collapses
/// onto it (duplicate points).
const LRD_SENTINEL: f64 = 1e12;

struct Neighborhood {
    /// Indices of all points within the k-distance (ties included).
    members: Vec<usize>,
    /// Squared k-distance.
    k_dist_sq: f64,
}

/// LOF for every point, in input order. `k` must satisfy `1 <= k < n`.
pub fn lof_scores(points: &[(f64, f64)], k: usize, exec: Exec) -> Result<Vec<f64>, AnomalyError> {
    let n = points.len();
    if k < 1 || k >= n {
        return Err(AnomalyError::DegenerateInput(format!(
            "lof needs 1 <= k < n, got k={k} with n={n}"
        )));
    }

    let dist_sq = |i: usize, j: usize| -> f64 {
        let dx = points[i].0 - points[j].0;
        let dy = points[i].1 - points[j].1;
        dx * dx + dy * dy
    };

    let indices: Vec<usize> = (0..n).collect();
    let hoods: Vec<Neighborhood> = map_ordered(exec, indices.clone(), |i| {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (dist_sq(i, j), j))
            .collect();
        dists.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let k_dist_sq = dists[k - 1].0;
        let members = dists
            .iter()
            .take_while(|(d, _)| *d <= k_dist_sq)
            .map(|&(_, j)| j)
            .collect();
        Neighborhood { members, k_dist_sq }
    });

    let hoods_ref = &hoods;
    let lrd: Vec<f64> = map_ordered(exec, indices.clone(), |i| {
        let hood = &hoods_ref[i];
        let reach_sum: f64 = hood
            .members
            .iter()
            .map(|&o| dist_sq(i, o).max(hoods_ref[o].k_dist_sq).sqrt())
            .sum();
        if reach_sum == 0.0 {
            LRD_SENTINEL
        } else {
            (hood.members.len() as f64 / reach_sum).min(LRD_SENTINEL)
        }
    });

    let lrd_ref = &lrd;
    Ok(map_ordered(exec, indices, |i| {
        let hood = &hoods_ref[i];
        let neighbor_lrd_sum: f64 = hood.members.iter().map(|&o| lrd_ref[o]).sum();
        neighbor_lrd_sum / (hood.members.len() as f64 * lrd_ref[i])
    }))
}
