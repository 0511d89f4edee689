//! Cross-module checks: the sample-based pipeline against the closed-form
//! Gaussian engine, and the resampler against the cut covariance.

use causal_strength::estimation::{estimate_causal_strength, virtual_samples, EstimationConfig};
use causal_strength::gaussian::{causal_strength_linear, cut_covariance, LinearSem};
use causal_strength::graph::{Dag, EdgeSet};
use causal_strength::Base;

fn chain_sem(b: f64, c: f64) -> LinearSem {
    let dag = Dag::new(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z")]).unwrap();
    LinearSem::new(dag, &[("X", "Y", b), ("Y", "Z", c)], &[("X", 1.0), ("Y", 1.0), ("Z", 1.0)])
        .unwrap()
}

#[test]
fn virtual_sample_covariance_matches_cut_covariance() {
    let sem = chain_sem(0.9, -0.7);
    let s = EdgeSet::single("X", "Y");
    let expected = cut_covariance(&sem, &s).unwrap();
    let data = sem.simulate(40_000, 123);
    let virt = virtual_samples(&data, &sem, &s, 7).unwrap();
    let emp = virt.centered().empirical_covariance();
    let gap = (expected.matrix() - emp).abs().max();
    assert!(gap < 0.08, "covariance gap {gap}");
}

#[test]
fn estimates_track_closed_form_across_arrows() {
    let sem = {
        let dag =
            Dag::new(&["X1", "X2", "X3"], &[("X1", "X2"), ("X1", "X3"), ("X2", "X3")]).unwrap();
        LinearSem::new(
            dag,
            &[("X1", "X2", 0.9), ("X1", "X3", -0.6), ("X2", "X3", 0.8)],
            &[("X1", 1.0), ("X2", 1.0), ("X3", 1.0)],
        )
        .unwrap()
    };
    for (src, tgt) in sem.dag().edges() {
        let s = EdgeSet::single(&src, &tgt);
        let truth = causal_strength_linear(&sem, &s, Base::Nats).unwrap();
        let mut sum = 0.0;
        let seeds = 5;
        for seed in 0..seeds {
            let data = sem.simulate(2_000, 700 + seed);
            let cfg = EstimationConfig { seed: 700 + seed, ..Default::default() };
            sum += estimate_causal_strength(&data, sem.dag(), &s, &cfg).unwrap();
        }
        let mean = sum / seeds as f64;
        assert!(
            (mean - truth).abs() < 0.15,
            "arrow {src}->{tgt}: estimate {mean} vs computed {truth}"
        );
    }
}

#[test]
fn estimation_error_decreases_with_sample_size() {
    let sem = chain_sem(1.0, 0.5);
    let s = EdgeSet::single("X", "Y");
    let truth = causal_strength_linear(&sem, &s, Base::Nats).unwrap();
    let mut errors = Vec::new();
    for &count in &[500usize, 2_000, 8_000] {
        let seeds = 10;
        let mut err_sum = 0.0;
        for seed in 0..seeds {
            let data = sem.simulate(count, 9000 + seed);
            let cfg = EstimationConfig { seed: 9000 + seed, ..Default::default() };
            let est = estimate_causal_strength(&data, sem.dag(), &s, &cfg).unwrap();
            err_sum += (est - truth).abs();
        }
        errors.push(err_sum / seeds as f64);
    }
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "errors not decreasing: {errors:?}"
    );
}

#[test]
fn estimate_insensitive_to_column_relabeling() {
    let sem = chain_sem(1.0, 0.0);
    let s = EdgeSet::single("X", "Y");
    let data = sem.simulate(2_000, 55);
    // Reverse the observation order: the estimate distribution over seeds
    // must be unchanged up to noise.
    let reversed = data.columns(&(0..data.count()).rev().collect::<Vec<_>>());
    let mean_over_seeds = |d: &causal_strength::estimation::SampleMatrix| -> f64 {
        let seeds = 10;
        (0..seeds)
            .map(|seed| {
                let cfg = EstimationConfig { seed, ..Default::default() };
                estimate_causal_strength(d, sem.dag(), &s, &cfg).unwrap()
            })
            .sum::<f64>()
            / seeds as f64
    };
    let a = mean_over_seeds(&data);
    let b = mean_over_seeds(&reversed);
    assert!((a - b).abs() < 0.05, "relabeled mean {b} vs {a}");
}
