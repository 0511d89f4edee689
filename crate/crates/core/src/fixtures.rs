//! Small reference systems used by the test suites and the `repro` presets.

use rand::Rng;

use crate::discrete::{Cpt, DiscreteModel};
use crate::error::Result;
use crate::gaussian::LinearSem;
use crate::graph::Dag;

fn one_hot(card: usize, value: usize) -> Vec<f64> {
    let mut row = vec![0.0; card];
    row[value] = 1.0;
    row
}

/// Noisy-copy flip matrix as CPT rows: value kept with probability `1 - q`.
fn flip_rows(q: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - q, q], vec![q, 1.0 - q]]
}

/// Z -> X, Z -> Y, X -> Y with `Y = X xor Z`; `P(Z=0) = a` and X a noisy
/// copy of Z with symmetric error rate `q`. `q = 0` gives the
/// copy-plus-XOR system (an extreme case of confounding), `a = 1/2, q = 0`
/// the uniform variant.
pub fn confounded_xor(a: f64, q: f64) -> Result<DiscreteModel> {
    let dag = Dag::new(&["Z", "X", "Y"], &[("Z", "X"), ("Z", "Y"), ("X", "Y")])?;
    let cpts = vec![
        Cpt::root("Z", vec![a, 1.0 - a])?,
        Cpt::new("X", 2, vec!["Z".into()], vec![2], flip_rows(q))?,
        Cpt::new(
            "Y",
            2,
            vec!["X".into(), "Z".into()],
            vec![2, 2],
            // (x, z) rows, z fastest: y = x xor z.
            vec![one_hot(2, 0), one_hot(2, 1), one_hot(2, 1), one_hot(2, 0)],
        )?,
    ];
    DiscreteModel::new(dag, cpts)
}

/// X -> Y, Z -> Y with independent inputs and `Y = X xor Z`.
pub fn xor_independent_inputs(x0: f64, z0: f64) -> Result<DiscreteModel> {
    let dag = Dag::new(&["X", "Z", "Y"], &[("X", "Y"), ("Z", "Y")])?;
    let cpts = vec![
        Cpt::root("X", vec![x0, 1.0 - x0])?,
        Cpt::root("Z", vec![z0, 1.0 - z0])?,
        Cpt::new(
            "Y",
            2,
            vec!["X".into(), "Z".into()],
            vec![2, 2],
            vec![one_hot(2, 0), one_hot(2, 1), one_hot(2, 1), one_hot(2, 0)],
        )?,
    ];
    DiscreteModel::new(dag, cpts)
}

/// Two-node X -> Y where Y copies X and `P(X=0) = x0`.
pub fn binary_copy(x0: f64) -> Result<DiscreteModel> {
    let dag = Dag::new(&["X", "Y"], &[("X", "Y")])?;
    let cpts = vec![
        Cpt::root("X", vec![x0, 1.0 - x0])?,
        Cpt::new("Y", 2, vec!["X".into()], vec![2], flip_rows(0.0))?,
    ];
    DiscreteModel::new(dag, cpts)
}

/// Two-node X -> Y where Y negates X.
pub fn binary_inverter(x0: f64) -> Result<DiscreteModel> {
    let dag = Dag::new(&["X", "Y"], &[("X", "Y")])?;
    let cpts = vec![
        Cpt::root("X", vec![x0, 1.0 - x0])?,
        Cpt::new("Y", 2, vec!["X".into()], vec![2], flip_rows(1.0))?,
    ];
    DiscreteModel::new(dag, cpts)
}

/// Repetition code with `2k + 1` channel bits: a uniform encoder bit E is
/// copied to B1..B{2k+1}, and the decoder D takes the majority vote, so any
/// k channel arrows can be severed without effect.
pub fn repetition_code(k: usize) -> Result<DiscreteModel> {
    let n_bits = 2 * k + 1;
    let bits: Vec<String> = (1..=n_bits).map(|i| format!("B{i}")).collect();
    let mut nodes = vec!["E".to_owned()];
    nodes.extend(bits.iter().cloned());
    nodes.push("D".to_owned());
    let mut edges: Vec<(String, String)> =
        bits.iter().map(|b| ("E".to_owned(), b.clone())).collect();
    edges.extend(bits.iter().map(|b| (b.clone(), "D".to_owned())));
    let dag = Dag::new(
        &nodes.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )?;
    let mut cpts = vec![Cpt::root("E", vec![0.5, 0.5])?];
    for b in &bits {
        cpts.push(Cpt::new(b.clone(), 2, vec!["E".into()], vec![2], flip_rows(0.0))?);
    }
    let rows: Vec<Vec<f64>> = (0..1usize << n_bits)
        .map(|cfg| {
            let ones = (0..n_bits).filter(|i| cfg >> (n_bits - 1 - i) & 1 == 1).count();
            one_hot(2, usize::from(ones > n_bits / 2))
        })
        .collect();
    cpts.push(Cpt::new("D", 2, bits.clone(), vec![2; n_bits], rows)?);
    DiscreteModel::new(dag, cpts)
}

/// One uniform source X broadcast to n perfect copies Y1..Yn.
pub fn broadcast(n: usize) -> Result<DiscreteModel> {
    let targets: Vec<String> = (1..=n).map(|i| format!("Y{i}")).collect();
    let mut nodes = vec!["X".to_owned()];
    nodes.extend(targets.iter().cloned());
    let edges: Vec<(String, String)> =
        targets.iter().map(|t| ("X".to_owned(), t.clone())).collect();
    let dag = Dag::new(
        &nodes.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )?;
    let mut cpts = vec![Cpt::root("X", vec![0.5, 0.5])?];
    for t in &targets {
        cpts.push(Cpt::new(t.clone(), 2, vec!["X".into()], vec![2], flip_rows(0.0))?);
    }
    DiscreteModel::new(dag, cpts)
}

/// Unrolled bivariate chain X0,Y0,...,XT,YT where each step copies the other
/// component's previous value with symmetric error rate `epsilon`, starting
/// from independent uniform bits (the stationary initialization).
pub fn perturbed_copy_chain(epsilon: f64, t_len: usize) -> Result<DiscreteModel> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for t in 0..=t_len {
        nodes.push(format!("X{t}"));
        nodes.push(format!("Y{t}"));
        if t > 0 {
            edges.push((format!("Y{}", t - 1), format!("X{t}")));
            edges.push((format!("X{}", t - 1), format!("Y{t}")));
        }
    }
    let dag = Dag::new(
        &nodes.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )?;
    let mut cpts = vec![Cpt::root("X0", vec![0.5, 0.5])?, Cpt::root("Y0", vec![0.5, 0.5])?];
    for t in 1..=t_len {
        cpts.push(Cpt::new(
            format!("X{t}"),
            2,
            vec![format!("Y{}", t - 1)],
            vec![2],
            flip_rows(epsilon),
        )?);
        cpts.push(Cpt::new(
            format!("Y{t}"),
            2,
            vec![format!("X{}", t - 1)],
            vec![2],
            flip_rows(epsilon),
        )?);
    }
    DiscreteModel::new(dag, cpts)
}

/// Random dense model for property sweeps: `n_nodes` nodes with random
/// cardinalities in `2..=max_card`, each forward edge present with
/// probability `edge_prob`, CPT rows drawn bounded away from zero.
pub fn random_dense_model<R: Rng>(
    rng: &mut R,
    n_nodes: usize,
    max_card: usize,
    edge_prob: f64,
) -> Result<DiscreteModel> {
    let names: Vec<String> = (0..n_nodes).map(|i| format!("N{i}")).collect();
    let cards: Vec<usize> = (0..n_nodes).map(|_| rng.random_range(2..=max_card)).collect();
    let mut edges = Vec::new();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for i in 0..n_nodes {
        for j in (i + 1)..n_nodes {
            if rng.random_bool(edge_prob) {
                edges.push((names[i].clone(), names[j].clone()));
                parents[j].push(i);
            }
        }
    }
    let dag = Dag::new(
        &names.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )?;
    let mut cpts = Vec::new();
    for j in 0..n_nodes {
        let p_cards: Vec<usize> = parents[j].iter().map(|&i| cards[i]).collect();
        let n_rows: usize = p_cards.iter().product();
        let rows: Vec<Vec<f64>> = (0..n_rows).map(|_| random_row(rng, cards[j])).collect();
        cpts.push(Cpt::new(
            names[j].clone(),
            cards[j],
            parents[j].iter().map(|&i| names[i].clone()).collect(),
            p_cards,
            rows,
        )?);
    }
    DiscreteModel::new(dag, cpts)
}

/// Random model with `n_parents` independent root nodes all pointing into a
/// single sink (the setting where monotonicity of strength holds).
pub fn random_sink_model<R: Rng>(
    rng: &mut R,
    n_parents: usize,
    max_card: usize,
) -> Result<DiscreteModel> {
    let names: Vec<String> = (0..n_parents).map(|i| format!("P{i}")).collect();
    let cards: Vec<usize> = (0..n_parents).map(|_| rng.random_range(2..=max_card)).collect();
    let sink_card = rng.random_range(2..=max_card);
    let mut nodes: Vec<&str> = names.iter().map(String::as_str).collect();
    nodes.push("S");
    let edges: Vec<(&str, &str)> = names.iter().map(|n| (n.as_str(), "S")).collect();
    let dag = Dag::new(&nodes, &edges)?;
    let mut cpts = Vec::new();
    for (name, &card) in names.iter().zip(&cards) {
        cpts.push(Cpt::root(name.clone(), random_row(rng, card))?);
    }
    let n_rows: usize = cards.iter().product();
    let rows: Vec<Vec<f64>> = (0..n_rows).map(|_| random_row(rng, sink_card)).collect();
    cpts.push(Cpt::new("S", sink_card, names.clone(), cards, rows)?);
    DiscreteModel::new(dag, cpts)
}

fn random_row<R: Rng>(rng: &mut R, card: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..card).map(|_| rng.random_range(0.1..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Complete DAG on `n` nodes X1..Xn with every coefficient drawn from a
/// standard normal and unit noise variances.
pub fn random_complete_sem<R: Rng>(rng: &mut R, n: usize) -> Result<LinearSem> {
    let names: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let mut edges = Vec::new();
    let mut coeffs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((names[i].clone(), names[j].clone()));
            let w: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
            coeffs.push((names[i].clone(), names[j].clone(), w));
        }
    }
    let dag = Dag::new(
        &names.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )?;
    LinearSem::new(
        dag,
        &coeffs.iter().map(|(a, b, w)| (a.as_str(), b.as_str(), *w)).collect::<Vec<_>>(),
        &names.iter().map(|n| (n.as_str(), 1.0)).collect::<Vec<_>>(),
    )
}
