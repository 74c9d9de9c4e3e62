//! Checks against independent oracles: simulated covariances, binomial tail
//! counts, direct sort-and-sum partial sums and closed-form share laws.

use paretail_core::estimators::{ml_grouped, mu_segment, sigma2_segment, sigma_cross};
use paretail_core::pareto::{interpolate_share, top_share, ShareCurve};
use paretail_core::simulate::{sample_pareto, tabulate_sample};
use paretail_core::{Boundaries, SimConfig};

fn cfg(alpha: f64, n: usize, seed: u64) -> SimConfig {
    SimConfig { alpha_true: alpha, n_draws: n, seed, replications: 1, ..SimConfig::default() }
}

// group sums over rank slices (n p_k, n p_{k+1}] of a sample sorted from the top
fn group_sums(sample: &mut [f64], fractiles: &[f64]) -> Vec<f64> {
    sample.sort_unstable_by(|a, b| b.total_cmp(a));
    let n = sample.len() as f64;
    let ranks: Vec<usize> = fractiles.iter().map(|p| (p * n).round() as usize).collect();
    ranks.windows(2).map(|w| sample[w[0]..w[1]].iter().sum()).collect()
}

#[test]
fn covariance_kernel_matches_simulated_group_sums() {
    let alpha = 3.0;
    let xi = 1.0 / alpha;
    let n = 1000;
    let reps = 100_000;
    let p = [0.1, 0.2, 0.3, 0.5];
    let base = cfg(alpha, n, 7);
    let mut sum = [0.0f64; 3];
    let mut cross = [[0.0f64; 3]; 3];
    for r in 0..reps {
        let mut y = sample_pareto(&base, r);
        let g = group_sums(&mut y, &p);
        for j in 0..3 {
            sum[j] += g[j];
            for k in 0..3 {
                cross[j][k] += g[j] * g[k];
            }
        }
    }
    let rf = reps as f64;
    let cov = |j: usize, k: usize| (cross[j][k] - sum[j] * sum[k] / rf) / (rf - 1.0) / n as f64;

    for j in 0..3 {
        let mean = sum[j] / rf / n as f64;
        let mu = mu_segment(p[j], p[j + 1], xi).unwrap();
        assert!((mean / mu - 1.0).abs() < 0.01, "mean of group {j}: {mean} vs {mu}");
        let s2 = sigma2_segment(p[j], p[j + 1], xi).unwrap();
        assert!((cov(j, j) / s2 - 1.0).abs() < 0.05, "variance of group {j}: {} vs {s2}", cov(j, j));
    }
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        let s = sigma_cross(p[j], p[j + 1], p[k], p[k + 1], xi).unwrap();
        assert!((cov(j, k) / s - 1.0).abs() < 0.05, "covariance ({j},{k}): {} vs {s}", cov(j, k));
    }
}

#[test]
fn tail_fraction_matches_binomial() {
    let alpha = 1.5;
    let n = 1_000_000;
    let y = sample_pareto(&cfg(alpha, n, 11), 0);
    let above = y.iter().filter(|&&v| v > 2.0).count() as f64;
    let prob = 2f64.powf(-alpha);
    let se = (n as f64 * prob * (1.0 - prob)).sqrt();
    assert!((above - n as f64 * prob).abs() < 3.0 * se, "{above} vs {}", n as f64 * prob);
    assert!(y.iter().all(|&v| v >= 1.0));
}

#[test]
fn cumulate_reproduces_sorted_partial_sums() {
    let resolution = 1000.0;
    let fractiles = vec![0.001, 0.004, 0.01, 0.05, 0.2];
    let sample = sample_pareto(&cfg(1.7, 50_000, 3), 0);
    let t = tabulate_sample(&sample, &Boundaries::Fractiles(fractiles.clone()), resolution).unwrap();

    let mut units: Vec<i64> = sample.iter().map(|y| (y * resolution).round() as i64).collect();
    units.sort_unstable_by(|a, b| b.cmp(a));
    let cv = t.cumulate(false);
    for (k, p) in fractiles.iter().enumerate() {
        let m = (p * sample.len() as f64).round() as usize;
        assert_eq!(cv.cum_counts[k], m as u64);
        assert_eq!(cv.cum_totals[k], units[..m].iter().sum::<i64>());
    }
    assert_eq!(*cv.cum_counts.last().unwrap(), sample.len() as u64);
    assert_eq!(*cv.cum_totals.last().unwrap(), units.iter().sum::<i64>());
}

#[test]
fn threshold_tabulation_conserves_mass() {
    let resolution = 100.0;
    let sample = sample_pareto(&cfg(2.0, 20_000, 5), 0);
    let t = tabulate_sample(&sample, &Boundaries::Thresholds(vec![8.0, 1.5, 3.0]), resolution).unwrap();
    let (count, total) = t.column_sums();
    assert_eq!(count, sample.len() as i128);
    let direct: i64 = sample.iter().map(|y| (y * resolution).round() as i64).sum();
    assert_eq!(total, direct as i128);
    let expected_top = sample.iter().filter(|&&y| y >= 8.0).count() as u64;
    assert_eq!(t.groups()[0].count, expected_top);
}

#[test]
fn grouped_ml_on_simulated_counts() {
    let alpha = 2.5;
    let sample = sample_pareto(&cfg(alpha, 1_000_000, 13), 0);
    let t = tabulate_sample(&sample, &Boundaries::Thresholds(vec![1.0, 2.0, 4.0, 8.0]), 1000.0).unwrap();
    let thresholds: Vec<f64> = t.groups().iter().map(|g| g.lower_threshold.unwrap()).collect();
    let counts: Vec<u64> = t.groups().iter().map(|g| g.count).collect();
    let est = ml_grouped(&thresholds, &counts, 4).unwrap();
    let se = est.se.unwrap();
    assert!((est.alpha_hat - alpha).abs() < 3.0 * se, "{} +- {se}", est.alpha_hat);
}

#[test]
fn spline_follows_square_root_law() {
    let knots: Vec<f64> = vec![0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05];
    let curve = ShareCurve::new(knots.iter().map(|&p| (p, top_share(2.0, p).unwrap())).collect()).unwrap();
    for i in 0..200 {
        let p = 0.0005 + (0.05 - 0.0005) * i as f64 / 199.0;
        let exact = p.sqrt();
        let got = interpolate_share(&curve, p).unwrap();
        assert!((got / exact - 1.0).abs() < 1e-4, "{p}: {got} vs {exact}");
    }
    assert!(interpolate_share(&curve, 0.06).is_err());
}
