//! Leave-one-out ridge influence checked against the closed-form rank-one
//! update, computed with nalgebra so nothing is shared with the crate's solver.

use airoyalties_core::influence::{loo_influence, RidgeProblem};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Removing row i from ridge regression:
/// `w_-i = w - A^-1 x_i (y_i - x_i'w) / (1 - x_i' A^-1 x_i)`.
fn rank_one_oracle(
    design: &[Vec<f64>],
    targets: &[f64],
    lambda: f64,
    q: &[f64],
    qy: f64,
) -> Vec<f64> {
    let n = design.len();
    let d = q.len();
    let x = DMatrix::from_fn(n, d, |r, c| design[r][c]);
    let y = DVector::from_column_slice(targets);
    let a = x.transpose() * &x + DMatrix::identity(d, d) * lambda;
    let a_inv = a.try_inverse().expect("ridge gram is positive definite");
    let w = &a_inv * x.transpose() * &y;
    let q = DVector::from_column_slice(q);
    let loss = |w: &DVector<f64>| (w.dot(&q) - qy).powi(2);
    let full = loss(&w);
    (0..n)
        .map(|i| {
            let xi = x.row(i).transpose();
            let ai_x = &a_inv * &xi;
            let leverage = xi.dot(&ai_x);
            let residual = y[i] - xi.dot(&w);
            let w_minus = &w - ai_x * (residual / (1.0 - leverage));
            loss(&w_minus) - full
        })
        .collect()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn fixture() -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, f64) {
    let design = vec![
        vec![1.0, 0.5],
        vec![0.8, -0.3],
        vec![-0.2, 1.1],
        vec![1.5, 0.9],
        vec![-0.7, -0.4],
        vec![0.3, 2.0],
    ];
    let targets = vec![1.2, 0.4, 0.9, 2.6, -1.0, 1.7];
    (design, targets, vec![0.6, 0.8], 1.1)
}

#[test]
fn six_point_fixture_matches_rank_one_update() {
    let (design, targets, q, qy) = fixture();
    let oracle = rank_one_oracle(&design, &targets, 0.1, &q, qy);
    let problem = RidgeProblem::new(design, targets, 0.1, q, qy).unwrap();
    let scores = loo_influence(&problem).unwrap();
    for (s, o) in scores.iter().zip(&oracle) {
        assert!((s - o).abs() <= 1e-8, "{s} vs {o}");
    }
}

#[test]
fn random_instances_correlate_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.random_range(6..20);
        let d = rng.random_range(1..5);
        let design: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let targets: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let q: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let qy = rng.random_range(-3.0..3.0);
        let lambda = rng.random_range(0.01..2.0);
        let oracle = rank_one_oracle(&design, &targets, lambda, &q, qy);
        let problem = RidgeProblem::new(design, targets, lambda, q, qy).unwrap();
        let scores = loo_influence(&problem).unwrap();
        let r = pearson(&scores, &oracle);
        assert!(r > 0.99, "correlation {r}");
        for (s, o) in scores.iter().zip(&oracle) {
            assert!((s - o).abs() <= 1e-6 * (1.0 + o.abs()));
        }
    }
}

#[test]
fn heavy_regularization_silences_every_point() {
    let (design, targets, q, qy) = fixture();
    let mut previous = f64::INFINITY;
    for lambda in [1e2, 1e3, 1e4, 1e6] {
        let problem =
            RidgeProblem::new(design.clone(), targets.clone(), lambda, q.clone(), qy).unwrap();
        let largest = loo_influence(&problem)
            .unwrap()
            .into_iter()
            .fold(0.0_f64, |m, s| m.max(s.abs()));
        assert!(largest < previous);
        previous = largest;
    }
    assert!(previous < 1e-5);
}
