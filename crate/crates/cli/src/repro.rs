//! Experiment presets: each regenerates one dataset as CSV rows, byte-stable
//! for a fixed seed. Sweeps run in parallel but rows are emitted in grid
//! order.

use anyhow::{bail, Result};
use rayon::prelude::*;

use causal_strength::discrete::{causal_strength, transfer_entropy_exact};
use causal_strength::estimation::{estimate_causal_strength, EstimationConfig};
use causal_strength::fixtures;
use causal_strength::gaussian::{causal_strength_linear, LinearSem};
use causal_strength::graph::{Dag, EdgeSet};
use causal_strength::timeseries::{
    estimate_strength_ts, exact_perturbed_copy, exact_strength_var, simulate_var1,
    transfer_entropy_var1, Var1Model,
};
use causal_strength::Base;

use crate::fmt;

type Table = (Vec<&'static str>, Vec<Vec<String>>);

pub fn run(preset: &str, seed: u64) -> Result<Table> {
    match preset {
        "xor" => xor(),
        "code" => code(),
        "broadcast" => broadcast(),
        "example7" => example7(),
        "fig6" => fig6(seed),
        "fig7" => fig7(seed),
        "fig9" => fig9(seed),
        other => bail!(
            "unknown preset {other:?}; expected fig6, fig7, fig9, example7, xor, code, broadcast"
        ),
    }
}

/// Copied-input XOR sweep: strength of one XOR input arrow versus both, in
/// bits, over the source bias grid.
fn xor() -> Result<Table> {
    let header = vec!["a", "strength_single", "strength_pair"];
    let mut rows = Vec::new();
    for i in 1..=19 {
        let a = i as f64 * 0.05;
        let model = fixtures::confounded_xor(a, 0.0)?;
        let single = causal_strength(&model, &EdgeSet::single("X", "Y"), Base::Bits)
            ?;
        let pair = causal_strength(
            &model,
            &EdgeSet::from_pairs([
                ("X".to_owned(), "Y".to_owned()),
                ("Z".to_owned(), "Y".to_owned()),
            ]),
            Base::Bits,
        )
        ?;
        rows.push(vec![format!("{a:.2}"), fmt(single), fmt(pair)]);
    }
    Ok((header, rows))
}

/// Repetition code with five channel bits: strength of cutting the first j
/// decoder inputs, j = 0..=5.
fn code() -> Result<Table> {
    let header = vec!["arrows_cut", "strength_bits"];
    let model = fixtures::repetition_code(2)?;
    let mut rows = Vec::new();
    for j in 0..=5usize {
        let s = EdgeSet::from_pairs((1..=j).map(|i| (format!("B{i}"), "D".to_owned())));
        let v = causal_strength(&model, &s, Base::Bits)?;
        rows.push(vec![j.to_string(), fmt(v)]);
    }
    Ok((header, rows))
}

/// Broadcasting sweep: strength of all n copy arrows out of one fair bit.
fn broadcast() -> Result<Table> {
    let header = vec!["n", "strength_bits"];
    let mut rows = Vec::new();
    for n in 1..=5usize {
        let model = fixtures::broadcast(n)?;
        let s = EdgeSet::from_pairs(model.dag().edges());
        let v = causal_strength(&model, &s, Base::Bits)?;
        rows.push(vec![n.to_string(), fmt(v)]);
    }
    Ok((header, rows))
}

/// Perturbed-copy chain: closed forms and brute-force chain enumeration for
/// transfer entropy and causal strength over the error-rate grid, in bits.
fn example7() -> Result<Table> {
    let header =
        vec!["epsilon", "te_closed", "cs_closed", "te_chain", "cs_chain"];
    let mut rows = Vec::new();
    for i in 0..=20 {
        let eps = i as f64 * 0.025;
        let closed = exact_perturbed_copy(eps, Base::Bits)?;
        let chain = fixtures::perturbed_copy_chain(eps, 3)?;
        let te_chain =
            transfer_entropy_exact(&chain, "X", "Y", 3, Base::Bits)?;
        let cs_chain = causal_strength(&chain, &EdgeSet::single("X2", "Y3"), Base::Bits)
            ?;
        rows.push(vec![
            format!("{eps:.3}"),
            fmt(closed.transfer_entropy),
            fmt(closed.causal_strength),
            fmt(te_chain),
            fmt(cs_chain),
        ]);
    }
    Ok((header, rows))
}

fn two_node_sem(a: f64) -> LinearSem {
    let dag = Dag::new(&["X1", "X2"], &[("X1", "X2")]).expect("static dag");
    LinearSem::new(dag, &[("X1", "X2", a)], &[("X1", 1.0), ("X2", 1.0)]).expect("static sem")
}

/// Bivariate sweep: estimated vs computed strength of X1 -> X2 over the
/// coefficient grid, 2000 samples, 10 seeds per grid point, in nats.
fn fig6(seed: u64) -> Result<Table> {
    let header = vec!["a", "seed", "computed", "estimated"];
    let grid: Vec<(usize, u64)> =
        (1..=10).flat_map(|i| (0..10u64).map(move |s| (i, s))).collect();
    let rows: Vec<Vec<String>> = grid
        .par_iter()
        .map(|&(i, s)| {
            let a = i as f64 * 0.2;
            let sem = two_node_sem(a);
            let edge = EdgeSet::single("X1", "X2");
            let computed = causal_strength_linear(&sem, &edge, Base::Nats).expect("pd");
            let sim_seed = seed ^ (i as u64) << 32 ^ s;
            let data = sem.simulate(2_000, sim_seed);
            let cfg = EstimationConfig { seed: sim_seed, ..Default::default() };
            let estimated =
                estimate_causal_strength(&data, sem.dag(), &edge, &cfg).expect("estimate");
            vec![format!("{a:.1}"), s.to_string(), fmt(computed), fmt(estimated)]
        })
        .collect();
    Ok((header, rows))
}

/// Random complete DAGs on 3 and 6 nodes: computed vs estimated strength of
/// every arrow, 100 structure matrices per size, 1000 samples, 5 seeds
/// averaged, in nats.
fn fig7(seed: u64) -> Result<Table> {
    let header = vec!["n", "run", "edge", "computed", "estimated"];
    let mut jobs: Vec<(usize, u64)> = Vec::new();
    for &n in &[3usize, 6] {
        for run in 0..100u64 {
            jobs.push((n, run));
        }
    }
    let groups: Vec<Vec<Vec<String>>> = jobs
        .par_iter()
        .map(|&(n, run)| {
            let mut rng = rand_seed(seed ^ (n as u64) << 48 ^ run);
            let sem = fixtures::random_complete_sem(&mut rng, n).expect("sem");
            sem.dag()
                .edges()
                .into_iter()
                .map(|(src, tgt)| {
                    let s = EdgeSet::single(&src, &tgt);
                    let computed = causal_strength_linear(&sem, &s, Base::Nats).expect("pd");
                    let mut sum = 0.0;
                    let seeds = 5;
                    for k in 0..seeds {
                        let sim_seed = seed ^ (n as u64) << 48 ^ run << 8 ^ k;
                        let data = sem.simulate(1_000, sim_seed);
                        let cfg = EstimationConfig { seed: sim_seed, ..Default::default() };
                        sum += estimate_causal_strength(&data, sem.dag(), &s, &cfg)
                            .expect("estimate");
                    }
                    vec![
                        n.to_string(),
                        run.to_string(),
                        format!("{src}->{tgt}"),
                        fmt(computed),
                        fmt(sum / seeds as f64),
                    ]
                })
                .collect()
        })
        .collect();
    Ok((header, groups.into_iter().flatten().collect()))
}

/// Mutual noisy-copy VAR(1): computed strength (m ln 2), trajectory-based
/// estimate (T = 50,000), and exact transfer entropy for eps = 2^-m, in nats.
fn fig9(seed: u64) -> Result<Table> {
    let header = vec!["m", "epsilon", "computed", "estimated", "transfer_entropy"];
    let rows: Vec<Vec<String>> = (1..=10i32)
        .into_par_iter()
        .map(|m| {
            let eps = 0.5f64.powi(m);
            let model = Var1Model::cross_copy(eps).expect("stationary");
            let computed = exact_strength_var(&model, 1, Base::Nats).expect("pd");
            let te = transfer_entropy_var1(&model, 1, Base::Nats).expect("pd");
            let sim_seed = seed ^ (m as u64) << 16;
            let traj = simulate_var1(&model, 50_000, sim_seed, 1_000);
            let cfg = EstimationConfig { seed: sim_seed, ..Default::default() };
            let estimated = estimate_strength_ts(&traj, 1, 1, None, &cfg).expect("estimate");
            vec![m.to_string(), fmt(eps), fmt(computed), fmt(estimated), fmt(te)]
        })
        .collect();
    Ok((header, rows))
}

fn rand_seed(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
