//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`) and panicking with the full
//! list of failed checks otherwise. Tolerances are pinned in the assertions.

use std::time::Instant;

use causal_strength::discrete::{
    ace, causal_strength, cut_edges, ignored_model, information_flow, joint_from_model,
    kl_divergence, observed_influence, transfer_entropy_exact, Cpt, DiscreteModel, Feeding,
    JointTable,
};
use causal_strength::estimation::{estimate_causal_strength, knn_kl_estimate, EstimationConfig, SampleMatrix};
use causal_strength::fixtures;
use causal_strength::gaussian::{causal_strength_linear, LinearSem};
use causal_strength::graph::{Dag, EdgeSet};
use causal_strength::timeseries::{
    estimate_strength_ts, exact_perturbed_copy, exact_strength_var, simulate_var1,
    transfer_entropy_var1, Var1Model,
};
use causal_strength::Base;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn h2(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

struct Criterion {
    id: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str) -> Self {
        Criterion { id, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn close(&mut self, x: f64, expected: f64, tol: f64, what: impl FnOnce() -> String) {
        self.check((x - expected).abs() <= tol, || {
            format!("{}: got {x}, expected {expected} (tol {tol})", what())
        });
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("criterion {}: PASS", self.id);
        } else {
            println!("criterion {}: FAIL ({} checks)", self.id, self.failures.len());
            for f in &self.failures {
                println!("  - {f}");
            }
            panic!("criterion {} failed:\n{}", self.id, self.failures.join("\n"));
        }
    }
}

fn pairs(list: &[(&str, &str)]) -> EdgeSet {
    EdgeSet::from_pairs(list.iter().map(|(a, b)| (a.to_string(), b.to_string())))
}

#[test]
fn criterion_1_golden_fixtures() {
    let mut c = Criterion::new("1 (golden fixtures)");
    let tol = 1e-10;

    // Copied-input XOR: single-arrow strength h(a), both-input strength
    // -log2(a^2 + (1-a)^2), strictly smaller.
    for &a in &[0.1, 0.25, 0.4] {
        let model = fixtures::confounded_xor(a, 0.0).unwrap();
        let single = causal_strength(&model, &EdgeSet::single("X", "Y"), Base::Bits).unwrap();
        c.close(single, h2(a), tol, || format!("xor a={a} single arrow"));
        let copy_arrow = causal_strength(&model, &EdgeSet::single("Z", "X"), Base::Bits).unwrap();
        c.close(copy_arrow, h2(a), tol, || format!("xor a={a} copy arrow"));
        let both =
            causal_strength(&model, &pairs(&[("X", "Y"), ("Z", "Y")]), Base::Bits).unwrap();
        let expected = -(a * a + (1.0 - a) * (1.0 - a)).log2();
        c.close(both, expected, tol, || format!("xor a={a} both arrows"));
        c.check(both < single, || {
            format!("xor a={a}: monotonicity should fail strictly ({both} vs {single})")
        });
    }

    // Repetition code with five channel bits: any <= 2 arrows are free,
    // all five carry one bit.
    let code = fixtures::repetition_code(2).unwrap();
    let bits: Vec<String> = (1..=5).map(|i| format!("B{i}")).collect();
    let mut small_subsets: Vec<EdgeSet> = vec![EdgeSet::empty()];
    for i in 0..5 {
        small_subsets.push(EdgeSet::single(&bits[i], "D"));
        for j in (i + 1)..5 {
            small_subsets.push(EdgeSet::from_pairs([
                (bits[i].clone(), "D".to_owned()),
                (bits[j].clone(), "D".to_owned()),
            ]));
        }
    }
    for s in &small_subsets {
        let v = causal_strength(&code, s, Base::Bits).unwrap();
        c.close(v, 0.0, tol, || format!("repetition code subset {{{s}}}"));
    }
    let all = EdgeSet::from_pairs(bits.iter().map(|b| (b.clone(), "D".to_owned())));
    let v = causal_strength(&code, &all, Base::Bits).unwrap();
    c.close(v, 1.0, tol, || "repetition code full cut".to_owned());

    // Broadcasting: n perfect copies carry n bits.
    for &n in &[1usize, 2, 3, 5] {
        let model = fixtures::broadcast(n).unwrap();
        let s = EdgeSet::from_pairs(model.dag().edges());
        let v = causal_strength(&model, &s, Base::Bits).unwrap();
        c.close(v, n as f64, tol, || format!("broadcast n={n}"));
    }

    // Uniform XOR: every single arrow and the pair all cost one bit.
    let uniform = fixtures::confounded_xor(0.5, 0.0).unwrap();
    for s in [
        EdgeSet::single("X", "Y"),
        EdgeSet::single("Z", "Y"),
        pairs(&[("X", "Y"), ("Z", "Y")]),
    ] {
        let v = causal_strength(&uniform, &s, Base::Bits).unwrap();
        c.close(v, 1.0, tol, || format!("uniform xor {{{s}}}"));
    }

    // Confounded XOR at a = 1/2: strong influence without conditional
    // dependence.
    let v = causal_strength(&uniform, &EdgeSet::single("X", "Y"), Base::Bits).unwrap();
    c.close(v, 1.0, tol, || "confounded xor strength".to_owned());
    let joint = joint_from_model(&uniform).unwrap();
    let cmi = joint.conditional_mutual_information(&["X"], &["Y"], &["Z"], Base::Bits).unwrap();
    c.close(cmi, 0.0, tol, || "confounded xor I(X;Y|Z)".to_owned());

    // Perturbed-copy chain: closed forms against brute-force enumeration.
    for &eps in &[0.0, 0.1, 0.25, 0.5] {
        let closed = exact_perturbed_copy(eps, Base::Bits).unwrap();
        let chain = fixtures::perturbed_copy_chain(eps, 3).unwrap();
        let te = transfer_entropy_exact(&chain, "X", "Y", 3, Base::Bits).unwrap();
        let cs = causal_strength(&chain, &EdgeSet::single("X2", "Y3"), Base::Bits).unwrap();
        c.close(te, closed.transfer_entropy, tol, || format!("chain te eps={eps}"));
        c.close(cs, closed.causal_strength, tol, || format!("chain cs eps={eps}"));
    }
    let at_zero = exact_perturbed_copy(0.0, Base::Bits).unwrap();
    c.close(at_zero.transfer_entropy, 0.0, tol, || "te at eps=0".to_owned());
    c.close(at_zero.causal_strength, 1.0, tol, || "cs at eps=0".to_owned());

    c.finish();
}

/// Row-level KL in nats with the usual conventions.
fn row_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pv, &qv)| {
            if pv == 0.0 {
                0.0
            } else if qv == 0.0 {
                f64::INFINITY
            } else {
                pv * (pv / qv).ln()
            }
        })
        .sum()
}

/// Correction term of the strength = observed-influence decomposition:
/// per target, the kept-parent-weighted divergence between the "ignored" and
/// "cut" conditionals.
fn decomposition_correction(model: &DiscreteModel, s: &EdgeSet) -> f64 {
    let joint = joint_from_model(model).unwrap();
    let cut = cut_edges(model, s, Feeding::Product).unwrap();
    let ignored = ignored_model(model, s).unwrap();
    let mut total = 0.0;
    for target in s.targets() {
        let cut_cpt = cut.cpt(&target).unwrap();
        let ig_cpt = ignored.cpt(&target).unwrap();
        assert_eq!(cut_cpt.parents(), ig_cpt.parents());
        if cut_cpt.parents().is_empty() {
            total += row_kl(&ig_cpt.rows()[0], &cut_cpt.rows()[0]);
            continue;
        }
        let kept: Vec<&str> = cut_cpt.parents().iter().map(String::as_str).collect();
        let weights = joint.marginal(&kept).unwrap();
        for (flat, ig_row) in ig_cpt.rows().iter().enumerate() {
            let w = weights.probabilities()[flat];
            if w > 0.0 {
                total += w * row_kl(ig_row, &cut_cpt.rows()[flat]);
            }
        }
    }
    total
}

/// Second term of the single-arrow decomposition: the kept-parent-weighted
/// divergence between the observed conditional of the target given its kept
/// parents and the post-cutting one.
fn single_arrow_second_term(model: &DiscreteModel, source: &str, target: &str) -> f64 {
    let joint = joint_from_model(model).unwrap();
    let s = EdgeSet::single(source, target);
    let cut = cut_edges(model, &s, Feeding::Product).unwrap();
    let cut_cpt = cut.cpt(target).unwrap();
    let kept: Vec<&str> = cut_cpt.parents().iter().map(String::as_str).collect();
    let card = cut_cpt.node_cardinality();
    let mut sel: Vec<&str> = kept.clone();
    sel.push(target);
    let m = joint.marginal(&sel).unwrap();
    let mut total = 0.0;
    for (flat, cut_row) in cut_cpt.rows().iter().enumerate() {
        let slice = &m.probabilities()[flat * card..(flat + 1) * card];
        let w: f64 = slice.iter().sum();
        if w == 0.0 {
            continue;
        }
        let observed: Vec<f64> = slice.iter().map(|&p| p / w).collect();
        total += w * row_kl(&observed, cut_row);
    }
    total
}

/// Ordered Markov condition of `joint` with respect to `dag`: every node is
/// independent of its earlier non-parents given its parents. Returns the
/// largest violating CMI in nats.
fn max_markov_violation(joint: &JointTable, dag: &Dag) -> f64 {
    let order = dag.topological_order();
    let mut worst = 0.0f64;
    for (pos, node) in order.iter().enumerate() {
        let parents = dag.parents(node).unwrap();
        let predecessors: Vec<&str> = order[..pos]
            .iter()
            .filter(|p| !parents.contains(p))
            .map(String::as_str)
            .collect();
        if predecessors.is_empty() {
            continue;
        }
        let given: Vec<&str> = parents.iter().map(String::as_str).collect();
        let v = joint
            .conditional_mutual_information(&[node.as_str()], &predecessors, &given, Base::Nats)
            .unwrap();
        worst = worst.max(v);
    }
    worst
}

#[test]
fn criterion_2_property_suite() {
    let started = Instant::now();
    let mut c = Criterion::new("2 (property suite on random models)");
    let tol = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(2020);

    let mut models = Vec::new();
    while models.len() < 100 {
        let n = rng.random_range(3..=5);
        let model = fixtures::random_dense_model(&mut rng, n, 3, 0.7).unwrap();
        if model.dag().edge_count() > 0 {
            models.push(model);
        }
    }

    for (k, model) in models.iter().enumerate() {
        let edges = model.dag().edges();
        let mut subset: Vec<(String, String)> =
            edges.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        if subset.is_empty() {
            subset.push(edges[rng.random_range(0..edges.len())].clone());
        }
        let s = EdgeSet::from_pairs(subset);

        // Strength decomposes into observed influence plus a nonnegative
        // correction, term by term.
        let cs = causal_strength(model, &s, Base::Nats).unwrap();
        let oi = observed_influence(model, &s, Base::Nats).unwrap();
        let corr = decomposition_correction(model, &s);
        c.check(corr >= -1e-12, || format!("model {k}: negative correction {corr}"));
        c.close(cs, oi + corr, tol, || format!("model {k}: strength vs influence+correction"));
        c.check(cs >= oi - tol, || format!("model {k}: strength {cs} < influence {oi}"));

        // Additivity over targets, against the full-joint route.
        let p = joint_from_model(model).unwrap();
        let p_cut =
            joint_from_model(&cut_edges(model, &s, Feeding::Product).unwrap()).unwrap();
        let direct = kl_divergence(&p, &p_cut, Base::Nats).unwrap();
        let per_target: f64 = s
            .targets()
            .iter()
            .map(|t| causal_strength(model, &s.into_target(t), Base::Nats).unwrap())
            .sum();
        c.close(per_target, direct, tol, || format!("model {k}: additivity over targets"));

        // The post-cutting joint is Markov with respect to the reduced DAG.
        let reduced = model.dag().remove_edges(&s).unwrap();
        let violation = max_markov_violation(&p_cut, &reduced);
        c.check(violation <= tol, || {
            format!("model {k}: post-cutting Markov violation {violation}")
        });

        // Per arrow: strength = CMI + nonnegative second term, so strength
        // dominates the conditional dependence.
        for (src, tgt) in &edges {
            let arrow = EdgeSet::single(src, tgt);
            let cs_a = causal_strength(model, &arrow, Base::Nats).unwrap();
            let others: Vec<String> =
                model.dag().parents(tgt).unwrap().into_iter().filter(|p| p != src).collect();
            let cmi = p
                .conditional_mutual_information(
                    &[src.as_str()],
                    &[tgt.as_str()],
                    &others.iter().map(String::as_str).collect::<Vec<_>>(),
                    Base::Nats,
                )
                .unwrap();
            let second = single_arrow_second_term(model, src, tgt);
            c.check(second >= -1e-12, || {
                format!("model {k} {src}->{tgt}: negative second term {second}")
            });
            c.close(cs_a, cmi + second, tol, || {
                format!("model {k} {src}->{tgt}: single-arrow decomposition")
            });
            c.check(cs_a >= cmi - tol, || {
                format!("model {k} {src}->{tgt}: strength {cs_a} below CMI {cmi}")
            });
        }
    }

    // Independent parents: the second term vanishes, subsets are monotone,
    // and the nested cuts satisfy the Pythagorean identity.
    for i in 0..30 {
        let model = fixtures::random_sink_model(&mut rng, 3, 3).unwrap();
        let parents = model.dag().parents("S").unwrap();
        for p in &parents {
            let arrow = EdgeSet::single(p, "S");
            let cs_a = causal_strength(&model, &arrow, Base::Nats).unwrap();
            let joint = joint_from_model(&model).unwrap();
            let others: Vec<&str> =
                parents.iter().filter(|q| *q != p).map(String::as_str).collect();
            let cmi = joint
                .conditional_mutual_information(&[p.as_str()], &["S"], &others, Base::Nats)
                .unwrap();
            c.close(cs_a, cmi, tol, || {
                format!("sink model {i} {p}->S: strength != CMI under independent parents")
            });
        }
        let nested: Vec<EdgeSet> = (1..=parents.len())
            .map(|k| {
                EdgeSet::from_pairs(parents[..k].iter().map(|p| (p.clone(), "S".to_owned())))
            })
            .collect();
        let mut last = 0.0;
        for s in &nested {
            let v = causal_strength(&model, s, Base::Nats).unwrap();
            c.check(v >= last - tol, || {
                format!("sink model {i}: monotonicity broke at {{{s}}} ({v} < {last})")
            });
            last = v;
        }
        for w in nested.windows(2) {
            let (s1, s2) = (&w[0], &w[1]);
            let cs1 = causal_strength(&model, s1, Base::Nats).unwrap();
            let cs2 = causal_strength(&model, s2, Base::Nats).unwrap();
            let j1 = joint_from_model(&cut_edges(&model, s1, Feeding::Product).unwrap()).unwrap();
            let j2 = joint_from_model(&cut_edges(&model, s2, Feeding::Product).unwrap()).unwrap();
            let between = kl_divergence(&j1, &j2, Base::Nats).unwrap();
            c.close(cs2, cs1 + between, tol, || {
                format!("sink model {i}: Pythagorean identity for {{{s1}}} in {{{s2}}}")
            });
        }
    }

    // Zero strength of a set implies the observed joint is Markov for the
    // reduced DAG (checked on the redundant-code fixture) and all subsets of
    // the set vanish (heredity).
    let code = fixtures::repetition_code(2).unwrap();
    let t = pairs(&[("B1", "D"), ("B2", "D")]);
    let cs_t = causal_strength(&code, &t, Base::Nats).unwrap();
    c.close(cs_t, 0.0, 1e-10, || "repetition code size-2 cut".to_owned());
    let joint = joint_from_model(&code).unwrap();
    let reduced = code.dag().remove_edges(&t).unwrap();
    let violation = max_markov_violation(&joint, &reduced);
    c.check(violation <= tol, || {
        format!("observed joint not Markov after removing a zero-strength set: {violation}")
    });
    for sub in [pairs(&[("B1", "D")]), pairs(&[("B2", "D")]), EdgeSet::empty()] {
        let v = causal_strength(&code, &sub, Base::Nats).unwrap();
        c.close(v, 0.0, 1e-10, || format!("heredity: subset {{{sub}}} of a zero-strength set"));
    }

    let elapsed = started.elapsed();
    c.check(elapsed.as_secs() < 60, || {
        format!("property suite took {elapsed:?}, budget is 60 s")
    });
    c.finish();
}

#[test]
fn criterion_3_baseline_failures() {
    let mut c = Criterion::new("3 (baseline-measure failure fixtures)");
    let tol = 1e-9;

    // Intervention information flow stays zero as the copy error approaches
    // one half, while the conditional dependence approaches one bit.
    for &q in &[0.5, 0.45, 0.4] {
        let model = fixtures::confounded_xor(0.5, q).unwrap();
        let flow = information_flow(&model, &["X"], &["Y"], &[], Base::Bits).unwrap();
        c.close(flow, 0.0, tol, || format!("information flow at error {q}"));
        let joint = joint_from_model(&model).unwrap();
        let cmi =
            joint.conditional_mutual_information(&["Y"], &["X"], &["Z"], Base::Bits).unwrap();
        c.close(cmi, h2(q), tol, || format!("I(Y;X|Z) at error {q}"));
    }
    let half = fixtures::confounded_xor(0.5, 0.5).unwrap();
    let joint = joint_from_model(&half).unwrap();
    let cmi = joint.conditional_mutual_information(&["Y"], &["X"], &["Z"], Base::Bits).unwrap();
    c.close(cmi, 1.0, tol, || "I(Y;X|Z) at error 1/2".to_owned());

    // Transfer entropy vanishes on the perfect-copy chain.
    let chain = fixtures::perturbed_copy_chain(0.0, 3).unwrap();
    let te = transfer_entropy_exact(&chain, "X", "Y", 3, Base::Bits).unwrap();
    c.close(te, 0.0, tol, || "transfer entropy on the perfect-copy chain".to_owned());

    // ACE is blind to the XOR-screened influence.
    let xor = fixtures::xor_independent_inputs(0.5, 0.5).unwrap();
    let effect = ace(&xor, "X", "Y").unwrap();
    c.close(effect, 0.0, tol, || "ACE on the XOR screen".to_owned());

    c.finish();
}

/// Closed-form strength for a single sink with jointly independent parents:
/// half the log ratio of the conditional variance before and after removing
/// the cut parents' contributions.
fn independent_parent_closed_form(
    coeffs: &[f64],
    parent_vars: &[f64],
    sink_noise: f64,
    cut: &[bool],
) -> f64 {
    let cut_sum: f64 = coeffs
        .iter()
        .zip(parent_vars)
        .zip(cut)
        .filter(|&(_, &is_cut)| is_cut)
        .map(|((a, v), _)| a * a * v)
        .sum();
    0.5 * ((sink_noise + cut_sum) / sink_noise).ln()
}

#[test]
fn criterion_4_gaussian_engine_and_estimates() {
    let mut c = Criterion::new("4 (Gaussian engine vs closed form and kNN estimates)");

    // Closed form for independent parents, random instances.
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for i in 0..50 {
        let n_parents = rng.random_range(1..=5);
        let names: Vec<String> = (1..=n_parents).map(|k| format!("P{k}")).collect();
        let coeffs: Vec<f64> = (0..n_parents).map(|_| rng.random_range(-2.0..2.0)).collect();
        let vars: Vec<f64> = (0..n_parents).map(|_| rng.random_range(0.2..3.0)).collect();
        let noise: f64 = rng.random_range(0.2..2.0);
        let mut nodes: Vec<&str> = names.iter().map(String::as_str).collect();
        nodes.push("S");
        let edges: Vec<(&str, &str)> = names.iter().map(|p| (p.as_str(), "S")).collect();
        let dag = Dag::new(&nodes, &edges).unwrap();
        let mut triples: Vec<(&str, &str, f64)> = Vec::new();
        for (p, &a) in names.iter().zip(&coeffs) {
            triples.push((p.as_str(), "S", a));
        }
        let mut noise_vars: Vec<(&str, f64)> =
            names.iter().zip(&vars).map(|(p, &v)| (p.as_str(), v)).collect();
        noise_vars.push(("S", noise));
        let sem = LinearSem::new(dag, &triples, &noise_vars).unwrap();
        let cut: Vec<bool> = (0..n_parents).map(|_| rng.random_bool(0.5)).collect();
        if !cut.iter().any(|&b| b) {
            continue;
        }
        let s = EdgeSet::from_pairs(
            names
                .iter()
                .zip(&cut)
                .filter(|&(_, &b)| b)
                .map(|(p, _)| (p.clone(), "S".to_owned())),
        );
        let engine = causal_strength_linear(&sem, &s, Base::Nats).unwrap();
        let closed = independent_parent_closed_form(&coeffs, &vars, noise, &cut);
        c.close(engine, closed, 1e-10, || format!("independent-parents instance {i}"));
    }

    // Complete DAGs with standard-normal coefficients and unit noise:
    // closed form where applicable, estimator correlation across arrows.
    for &n in &[3usize, 6] {
        let results: Vec<(f64, f64)> = (0..100u64)
            .map(|run| {
                let mut rng = ChaCha8Rng::seed_from_u64(7_000 + (n as u64) << 32 | run);
                let sem = fixtures::random_complete_sem(&mut rng, n).unwrap();
                (run, sem)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flat_map(|(run, sem)| {
                // Single-parent target: the variance-ratio closed form holds.
                let a = sem.coefficient("X1", "X2").unwrap();
                let first = causal_strength_linear(
                    &sem,
                    &EdgeSet::single("X1", "X2"),
                    Base::Nats,
                )
                .unwrap();
                let expected = 0.5 * (1.0 + a * a).ln();
                if (first - expected).abs() > 1e-10 {
                    panic!(
                        "closed form mismatch on run {run}: {first} vs {expected} (n={n})"
                    );
                }
                sem.dag()
                    .edges()
                    .into_iter()
                    .map(|(src, tgt)| {
                        let s = EdgeSet::single(&src, &tgt);
                        let computed =
                            causal_strength_linear(&sem, &s, Base::Nats).unwrap();
                        let seeds = 5;
                        let mut sum = 0.0;
                        for k in 0..seeds {
                            let sim_seed = 9_000 + (n as u64) << 40 | run << 8 | k;
                            let data = sem.simulate(1_000, sim_seed);
                            let cfg =
                                EstimationConfig { seed: sim_seed, ..Default::default() };
                            sum += estimate_causal_strength(&data, sem.dag(), &s, &cfg)
                                .unwrap();
                        }
                        (computed, sum / seeds as f64)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = results.into_iter().unzip();
        let r = pearson(&xs, &ys);
        c.check(r >= 0.9, || {
            format!("n={n}: Pearson correlation {r:.4} below 0.9 over {} arrows", xs.len())
        });
        println!("  [criterion 4] n={n}: {} arrows, correlation {r:.4}", xs.len());
    }

    c.finish();
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>().sqrt();
    let sy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum::<f64>().sqrt();
    cov / (sx * sy)
}

#[test]
fn criterion_5_bivariate_sweep() {
    let mut c = Criterion::new("5 (bivariate estimated-vs-computed sweep)");
    for i in 1..=10 {
        let a = i as f64 * 0.2;
        let dag = Dag::new(&["X1", "X2"], &[("X1", "X2")]).unwrap();
        let sem =
            LinearSem::new(dag, &[("X1", "X2", a)], &[("X1", 1.0), ("X2", 1.0)]).unwrap();
        let edge = EdgeSet::single("X1", "X2");
        let computed = causal_strength_linear(&sem, &edge, Base::Nats).unwrap();
        assert!(computed <= 1.5, "grid point outside the calibrated range");
        let seeds = 10;
        let mut sum = 0.0;
        for k in 0..seeds {
            let sim_seed = 500 + i as u64 * 100 + k;
            let data = sem.simulate(2_000, sim_seed);
            let cfg = EstimationConfig { seed: sim_seed, ..Default::default() };
            sum += estimate_causal_strength(&data, sem.dag(), &edge, &cfg).unwrap();
        }
        let mean = sum / seeds as f64;
        c.check((mean - computed).abs() <= 0.15, || {
            format!("a={a:.1}: seed-averaged estimate {mean} vs computed {computed} (tol 0.15)")
        });
    }
    c.finish();
}

#[test]
fn criterion_6_var_model_reproduction() {
    let mut c = Criterion::new("6 (VAR model: exact strengths, estimates, transfer entropy)");
    for m in 1..=5i32 {
        let eps = 0.5f64.powi(m);
        let model = Var1Model::cross_copy(eps).unwrap();
        let computed = exact_strength_var(&model, 1, Base::Nats).unwrap();
        c.close(computed, m as f64 * LN2, 1e-10, || format!("m={m}: computed strength"));

        if m <= 4 {
            let sim_seed = 600 + m as u64;
            let traj = simulate_var1(&model, 50_000, sim_seed, 1_000);
            let cfg = EstimationConfig { seed: sim_seed, ..Default::default() };
            let est = estimate_strength_ts(&traj, 1, 1, None, &cfg).unwrap();
            let rel = (est - computed).abs() / computed;
            c.check(rel <= 0.25, || {
                format!("m={m}: estimate {est} vs {computed}, relative error {rel:.3} > 0.25")
            });
        }

        // Pinned as stated: transfer entropy equal to (ln 2)/2 for every m
        // at 1e-9. The exact conditional-variance ratio of this model is
        // 0.5 ln(2 - eps^2), which approaches (ln 2)/2 only as m grows, so
        // this check documents a discrepancy rather than a code defect; see
        // the perturbation analysis in the failure message.
        let te = transfer_entropy_var1(&model, 1, Base::Nats).unwrap();
        c.close(te, 0.5 * LN2, 1e-9, || {
            format!(
                "m={m}: transfer entropy {te} != ln(2)/2; exact value is \
                 0.5 ln(2 - eps^2) = {} because the one-step prediction \
                 variance of the target given its own past is \
                 (2 - eps^2) eps^2, not 2 eps^2",
                0.5 * (2.0 - eps * eps).ln()
            )
        });
    }
    c.finish();
}

#[test]
fn criterion_7_estimator_null_test() {
    let mut c = Criterion::new("7 (divergence estimator null test)");
    let mut sum = 0.0;
    let seeds = 20;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(7_700 + seed);
        let draw = |rng: &mut ChaCha8Rng, count: usize| -> SampleMatrix {
            let data: Vec<f64> = (0..count)
                .map(|_| {
                    rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)
                })
                .collect();
            SampleMatrix::new(
                vec!["X".into()],
                nalgebra::DMatrix::from_row_slice(1, count, &data),
            )
            .unwrap()
        };
        let p = draw(&mut rng, 1_000);
        let q = draw(&mut rng, 1_000);
        sum += knn_kl_estimate(&p, &q, 4, Base::Nats).unwrap();
    }
    let mean = sum / seeds as f64;
    c.check(mean.abs() <= 0.05, || {
        format!("null-test mean {mean} exceeds 0.05 nats over {seeds} seeds")
    });
    println!("  [criterion 7] null mean over {seeds} seeds: {mean:.5} nats");
    c.finish();
}

#[test]
fn criterion_8_repro_sweep_deterministic_and_fast() {
    let mut c = Criterion::new("8 (full repro sweep: runtime and determinism)");
    let bin = env!("CARGO_BIN_EXE_causal-strength");
    let dir = tempfile::tempdir().unwrap();
    let presets = ["xor", "code", "broadcast", "example7", "fig6", "fig7", "fig9"];
    let started = Instant::now();
    for preset in presets {
        for pass in 0..2 {
            let out = dir.path().join(format!("{preset}.{pass}.csv"));
            let status = std::process::Command::new(bin)
                .args(["repro", preset, "--seed", "1", "--out"])
                .arg(&out)
                .status()
                .unwrap();
            c.check(status.success(), || format!("repro {preset} pass {pass} failed"));
        }
        let a = std::fs::read(dir.path().join(format!("{preset}.0.csv"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("{preset}.1.csv"))).unwrap();
        c.check(a == b, || format!("repro {preset} not byte-identical across runs"));
        c.check(!a.is_empty(), || format!("repro {preset} produced no output"));
    }
    let elapsed = started.elapsed();
    // Two full sweeps ran back to back; each single sweep must fit the
    // ten-minute budget with room to spare.
    c.check(elapsed.as_secs() < 1_200, || {
        format!("two repro sweeps took {elapsed:?}, budget 2 x 600 s")
    });
    println!("  [criterion 8] two full sweeps in {elapsed:?}");
    c.finish();
}
