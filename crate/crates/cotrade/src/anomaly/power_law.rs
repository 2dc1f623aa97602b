//! Least-squares power-law fit of egonet edge counts against node counts in
//! log-log space, over the median edge count per node-count group.

use serde::{Deserialize, Serialize};

use super::AnomalyError;

/// One fitted point: an egonet node-count value (or bin representative) and
/// the lower median of the edge counts observed at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub v: f64,
    pub median_e: f64,
}

/// `f(V) = exp(intercept) * V^exponent`, fitted by ordinary least squares of
/// `ln E` on `ln V`. Natural logarithm throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub points: Vec<FitPoint>,
}

impl PowerLawFit {
    pub fn eval(&self, v: f64) -> f64 {
        self.intercept.exp() * v.powf(self.exponent)
    }
}

/// Lower median: the middle element for odd counts, the lower of the two
/// middles for even counts.
fn lower_median(sorted: &[f64]) -> f64 {
    sorted[(sorted.len() - 1) / 2]
}

/// Fits the power law over per-V medians. With `bin_base` set, V values are
/// grouped into logarithmic bins `[b^i, b^(i+1))` instead of exact values,
/// and each bin is represented by the geometric mean of its members.
pub fn fit_power_law(
    egonets: &[(usize, f64)],
    bin_base: Option<f64>,
) -> Result<PowerLawFit, AnomalyError> {
    let mut groups: std::collections::BTreeMap<i64, (Vec<f64>, Vec<f64>)> =
        std::collections::BTreeMap::new();
    for &(v, e) in egonets {
        if v < 2 {
            return Err(AnomalyError::DegenerateInput(format!(
                "egonet node count {v} below 2"
            )));
        }
        let key = match bin_base {
            None => v as i64,
            Some(b) => ((v as f64).ln() / b.ln()).floor() as i64,
        };
        let entry = groups.entry(key).or_default();
        entry.0.push(v as f64);
        entry.1.push(e);
    }
    if groups.len() < 2 {
        return Err(AnomalyError::DegenerateInput(format!(
            "power-law fit needs >= 2 distinct V groups, got {}",
            groups.len()
        )));
    }

    let points: Vec<FitPoint> = groups
        .into_values()
        .map(|(vs, mut es)| {
            es.sort_by(f64::total_cmp);
            // Exact V for per-value groups, geometric mean for bins.
            let v = if bin_base.is_none() {
                vs[0]
            } else {
                (vs.iter().map(|v| v.ln()).sum::<f64>() / vs.len() as f64).exp()
            };
            FitPoint {
                v,
                median_e: lower_median(&es),
            }
        })
        .collect();

    let xs: Vec<f64> = points.iter().map(|p| p.v.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.median_e.ln()).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    let exponent = sxy / sxx;
    let intercept = y_mean - exponent * x_mean;

    Ok(PowerLawFit { exponent, intercept, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let egonets: Vec<(usize, f64)> =
            (2..52).map(|v| (v, 2.0 * (v as f64).powf(1.3))).collect();
        let fit = fit_power_law(&egonets, None).unwrap();
        assert!((fit.exponent - 1.3).abs() < 1e-9, "exponent {}", fit.exponent);
        assert!((fit.intercept.exp() - 2.0).abs() < 1e-9);
        for &(v, e) in &egonets {
            assert!((fit.eval(v as f64) - e).abs() < 1e-9 * e.max(1.0));
        }
    }

    #[test]
    fn single_v_value_is_degenerate() {
        let egonets = vec![(4, 6.0), (4, 6.0), (4, 6.0)];
        assert!(matches!(
            fit_power_law(&egonets, None),
            Err(AnomalyError::DegenerateInput(_))
        ));
    }

    #[test]
    fn two_point_fit_passes_through_both() {
        // V in {2,4}, medians {1,4}: slope = ln4 / ln2 = 2.
        let egonets = vec![(2, 1.0), (4, 4.0)];
        let fit = fit_power_law(&egonets, None).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.eval(2.0) - 1.0).abs() < 1e-12);
        assert!((fit.eval(4.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn median_is_the_lower_middle_for_even_counts() {
        let egonets = vec![(3, 10.0), (3, 2.0), (3, 4.0), (3, 8.0), (5, 7.0)];
        let fit = fit_power_law(&egonets, None).unwrap();
        let p3 = fit.points.iter().find(|p| p.v == 3.0).unwrap();
        assert_eq!(p3.median_e, 4.0);
    }

    #[test]
    fn fit_points_have_strictly_increasing_v() {
        let egonets = vec![(5, 7.0), (2, 1.0), (9, 30.0), (2, 2.0), (5, 8.0)];
        let fit = fit_power_law(&egonets, None).unwrap();
        for w in fit.points.windows(2) {
            assert!(w[0].v < w[1].v);
        }
        for p in &fit.points {
            assert!(fit.eval(p.v) > 0.0);
        }
    }

    #[test]
    fn binning_groups_nearby_v_values() {
        let egonets = vec![(2, 2.0), (3, 3.0), (8, 20.0), (9, 25.0), (30, 200.0)];
        let fit = fit_power_law(&egonets, Some(2.0)).unwrap();
        // bins: [2,4), [8,16), [16,32) -> 3 points.
        assert_eq!(fit.points.len(), 3);
        let unbinned = fit_power_law(&egonets, None).unwrap();
        assert_eq!(unbinned.points.len(), 5);
    }
}
