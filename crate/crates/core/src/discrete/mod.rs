//! Exact engine for finite categorical causal Bayesian networks.
//!
//! Everything here works by dense enumeration of the joint state space
//! (desk scale, capped at [`DEFAULT_STATE_CAP`] entries, overridable via the
//! `CS_STATE_CAP` environment variable). Causal strength is computed through
//! its per-target decomposition into conditional relative entropies; tests
//! check it against the direct route `KL(P || P_S)` over the full joints.
//!
//! Log base is a parameter everywhere; the discrete convention in file
//! formats and the CLI defaults to bits.

mod table;

use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeSet};
use crate::Base;

pub use table::{kl_divergence, JointTable};

/// Default cap on the number of joint-state entries a dense enumeration may
/// produce.
pub const DEFAULT_STATE_CAP: u128 = 10_000_000;

fn state_cap() -> u128 {
    std::env::var("CS_STATE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

/// How the open ends of cut arrows into one node are fed.
///
/// `Product` is the defining choice for causal strength: each cut parent is
/// fed independently with its own marginal. `Joint` feeds them with their
/// joint marginal instead, which reproduces the "source exclusion" flavor of
/// information flow for edge sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feeding {
    Product,
    Joint,
}

/// Conditional probability table of one node given an ordered parent list.
///
/// Rows are indexed by parent configuration in mixed-radix order with the
/// last parent fastest, and must be supplied for every configuration,
/// including those with zero marginal probability; the engine never invents
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    node: String,
    node_card: usize,
    parents: Vec<String>,
    parent_cards: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new(
        node: impl Into<String>,
        node_card: usize,
        parents: Vec<String>,
        parent_cards: Vec<usize>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let node = node.into();
        if node_card == 0 {
            return Err(Error::ModelInvalid(format!("node {node:?} has cardinality 0")));
        }
        if parents.len() != parent_cards.len() {
            return Err(Error::ModelInvalid(format!(
                "CPT for {node:?}: parent/cardinality length mismatch"
            )));
        }
        let expected_rows: usize = parent_cards.iter().product();
        if rows.len() != expected_rows {
            return Err(Error::ModelInvalid(format!(
                "CPT for {node:?}: expected {expected_rows} rows, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != node_card {
                return Err(Error::ModelInvalid(format!(
                    "CPT for {node:?}: row {i} has {} entries, expected {node_card}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                    return Err(Error::ModelInvalid(format!(
                        "CPT for {node:?}: entry {p} outside [0,1]"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::ModelInvalid(format!(
                    "CPT for {node:?}: row {i} sums to {sum}"
                )));
            }
        }
        Ok(Cpt { node, node_card, parents, parent_cards, rows })
    }

    /// CPT of a parentless node: a single row.
    pub fn root(node: impl Into<String>, probs: Vec<f64>) -> Result<Self> {
        let card = probs.len();
        Cpt::new(node, card, vec![], vec![], vec![probs])
    }

    pub fn node(&self) -> &str {
        &self.node
    }

    pub fn node_cardinality(&self) -> usize {
        self.node_card
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row for a parent configuration given in this CPT's parent order.
    pub fn row(&self, parent_states: &[usize]) -> &[f64] {
        &self.rows[mixed_radix_index(&self.parent_cards, parent_states)]
    }
}

/// A causal Bayesian network: DAG plus one CPT per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    dag: Dag,
    cards: Vec<usize>,
    cpts: Vec<Cpt>,
}

impl DiscreteModel {
    /// Assemble and validate: exactly one CPT per node, CPT parents matching
    /// the DAG parents, and consistent cardinalities across tables.
    pub fn new(dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        let n = dag.node_count();
        if cpts.len() != n {
            return Err(Error::ModelInvalid(format!(
                "expected {n} CPTs, got {}",
                cpts.len()
            )));
        }
        let mut by_node: Vec<Option<Cpt>> = vec![None; n];
        for cpt in cpts {
            let idx = dag
                .node_index(cpt.node())
                .map_err(|_| Error::ModelInvalid(format!("CPT for unknown node {:?}", cpt.node())))?;
            if by_node[idx].is_some() {
                return Err(Error::ModelInvalid(format!("duplicate CPT for {:?}", cpt.node())));
            }
            by_node[idx] = Some(cpt);
        }
        let cpts: Vec<Cpt> = by_node.into_iter().map(|c| c.unwrap()).collect();
        let cards: Vec<usize> = cpts.iter().map(|c| c.node_card).collect();
        for (idx, cpt) in cpts.iter().enumerate() {
            let mut declared: Vec<&str> = cpt.parents.iter().map(String::as_str).collect();
            declared.sort_unstable();
            let dag_parents = dag.parents(dag.node_name(idx))?;
            let mut expected: Vec<&str> = dag_parents.iter().map(String::as_str).collect();
            expected.sort_unstable();
            if declared != expected {
                return Err(Error::ModelInvalid(format!(
                    "CPT for {:?} lists parents {:?}, DAG has {:?}",
                    cpt.node(),
                    cpt.parents,
                    dag_parents
                )));
            }
            for (p, &pc) in cpt.parents.iter().zip(&cpt.parent_cards) {
                let p_idx = dag.node_index(p)?;
                if cards[p_idx] != pc {
                    return Err(Error::ModelInvalid(format!(
                        "CPT for {:?} declares cardinality {pc} for parent {p:?}, \
                         but {p:?} has cardinality {}",
                        cpt.node(),
                        cards[p_idx]
                    )));
                }
            }
        }
        Ok(DiscreteModel { dag, cards, cpts })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cardinality(&self, node: &str) -> Result<usize> {
        Ok(self.cards[self.dag.node_index(node)?])
    }

    pub fn cpt(&self, node: &str) -> Result<&Cpt> {
        Ok(&self.cpts[self.dag.node_index(node)?])
    }
}

pub(crate) fn mixed_radix_index(cards: &[usize], states: &[usize]) -> usize {
    debug_assert_eq!(cards.len(), states.len());
    let mut idx = 0;
    for (c, s) in cards.iter().zip(states) {
        debug_assert!(s < c);
        idx = idx * c + s;
    }
    idx
}

pub(crate) fn decode_config(cards: &[usize], mut flat: usize, out: &mut [usize]) {
    for i in (0..cards.len()).rev() {
        out[i] = flat % cards[i];
        flat /= cards[i];
    }
}

/// The exact joint distribution `prod_j P(x_j | pa_j)`, with variables laid
/// out in the DAG's topological order.
pub fn joint_from_model(model: &DiscreteModel) -> Result<JointTable> {
    let dag = model.dag();
    let topo = dag.topological_indices();
    let cards: Vec<usize> = topo.iter().map(|&i| model.cards[i]).collect();
    let size: u128 = cards.iter().map(|&c| c as u128).product();
    let cap = state_cap();
    if size > cap {
        return Err(Error::StateSpaceTooLarge { size, cap });
    }
    // Axis position of each node (by declaration index) in the table layout.
    let mut axis_of = vec![0usize; dag.node_count()];
    for (axis, &decl) in topo.iter().enumerate() {
        axis_of[decl] = axis;
    }
    // Per node: axis positions of its CPT parents, in CPT order.
    let per_node: Vec<(usize, Vec<usize>)> = topo
        .iter()
        .map(|&decl| {
            let cpt = &model.cpts[decl];
            let parent_axes = cpt
                .parents
                .iter()
                .map(|p| axis_of[dag.node_index(p).expect("validated")])
                .collect();
            (decl, parent_axes)
        })
        .collect();

    let total = size as usize;
    let mut probs = vec![0.0f64; total];
    let mut state = vec![0usize; cards.len()];
    let mut parent_state = Vec::with_capacity(cards.len());
    let strides = {
        let mut s = vec![1usize; cards.len()];
        for i in (0..cards.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * cards[i + 1];
        }
        s
    };
    for (flat, slot) in probs.iter_mut().enumerate() {
        for i in 0..cards.len() {
            state[i] = (flat / strides[i]) % cards[i];
        }
        let mut p = 1.0;
        for (axis, (decl, parent_axes)) in per_node.iter().enumerate() {
            let cpt = &model.cpts[*decl];
            parent_state.clear();
            parent_state.extend(parent_axes.iter().map(|&a| state[a]));
            p *= cpt.row(&parent_state)[state[axis]];
            if p == 0.0 {
                break;
            }
        }
        *slot = p;
    }
    let variables = topo.iter().map(|&i| dag.node_name(i).to_owned()).collect();
    JointTable::new(variables, cards, probs)
}

/// Weighting scheme used when a node's cut parents are marginalized out of
/// its CPT.
enum WeightMode {
    Feed(Feeding),
    /// Condition on the kept parents ("ignoring" rather than "cutting");
    /// rows whose kept-parent configuration has probability zero fall back
    /// to product feeding.
    Conditional,
}

/// Replacement CPT for `target` after cutting/ignoring the arrows of `s`
/// that point into it. The new parent list is the kept sublist of the old
/// one, in unchanged order.
fn modified_cpt(
    model: &DiscreteModel,
    joint: &JointTable,
    target: &str,
    s: &EdgeSet,
    mode: &WeightMode,
) -> Result<Cpt> {
    let cpt = model.cpt(target)?;
    let mut cut_pos = Vec::new();
    let mut kept_pos = Vec::new();
    for (i, p) in cpt.parents.iter().enumerate() {
        if s.contains(p, target) {
            cut_pos.push(i);
        } else {
            kept_pos.push(i);
        }
    }
    if cut_pos.is_empty() {
        return Ok(cpt.clone());
    }
    let cut_names: Vec<&str> = cut_pos.iter().map(|&i| cpt.parents[i].as_str()).collect();
    let kept_names: Vec<&str> = kept_pos.iter().map(|&i| cpt.parents[i].as_str()).collect();
    let cut_cards: Vec<usize> = cut_pos.iter().map(|&i| cpt.parent_cards[i]).collect();
    let kept_cards: Vec<usize> = kept_pos.iter().map(|&i| cpt.parent_cards[i]).collect();
    let cut_total: usize = cut_cards.iter().product();
    let kept_total: usize = kept_cards.iter().product();

    // Product-of-marginals weights; also the fallback for conditional rows.
    let product_weights: Vec<f64> = {
        let margs: Vec<JointTable> =
            cut_names.iter().map(|n| joint.marginal(&[n])).collect::<Result<_>>()?;
        let mut w = vec![1.0; cut_total];
        let mut cfg = vec![0usize; cut_cards.len()];
        for (flat, slot) in w.iter_mut().enumerate() {
            decode_config(&cut_cards, flat, &mut cfg);
            *slot = margs.iter().zip(&cfg).map(|(m, &s)| m.probabilities()[s]).product();
        }
        w
    };
    let joint_weights = match mode {
        WeightMode::Feed(Feeding::Joint) => {
            Some(joint.marginal(&cut_names)?.probabilities().to_vec())
        }
        _ => None,
    };
    // For conditional weights: P(kept, cut) with kept axes first, so the
    // entries for one kept configuration are contiguous.
    let kept_cut_marginal = match mode {
        WeightMode::Conditional => {
            let names: Vec<&str> = kept_names.iter().chain(cut_names.iter()).copied().collect();
            Some(joint.marginal(&names)?)
        }
        _ => None,
    };

    let mut rows = Vec::with_capacity(kept_total);
    let mut kept_cfg = vec![0usize; kept_cards.len()];
    let mut cut_cfg = vec![0usize; cut_cards.len()];
    let mut full_cfg = vec![0usize; cpt.parents.len()];
    let mut cond_row = vec![0.0f64; cut_total];
    for kept_flat in 0..kept_total {
        decode_config(&kept_cards, kept_flat, &mut kept_cfg);
        let weights: &[f64] = match mode {
            WeightMode::Feed(Feeding::Product) => &product_weights,
            WeightMode::Feed(Feeding::Joint) => joint_weights.as_ref().unwrap(),
            WeightMode::Conditional => {
                let m = kept_cut_marginal.as_ref().unwrap();
                let slice = &m.probabilities()[kept_flat * cut_total..(kept_flat + 1) * cut_total];
                let denom: f64 = slice.iter().sum();
                if denom > 0.0 {
                    for (dst, &p) in cond_row.iter_mut().zip(slice) {
                        *dst = p / denom;
                    }
                    &cond_row
                } else {
                    &product_weights
                }
            }
        };
        let mut row = vec![0.0f64; cpt.node_card];
        for (cut_flat, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            decode_config(&cut_cards, cut_flat, &mut cut_cfg);
            for (slot, &i) in kept_pos.iter().enumerate() {
                full_cfg[i] = kept_cfg[slot];
            }
            for (slot, &i) in cut_pos.iter().enumerate() {
                full_cfg[i] = cut_cfg[slot];
            }
            for (dst, &p) in row.iter_mut().zip(cpt.row(&full_cfg)) {
                *dst += w * p;
            }
        }
        // Guard against accumulation drift before re-validation.
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() <= 1e-9 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        rows.push(row);
    }
    Cpt::new(
        target,
        cpt.node_card,
        kept_names.iter().map(|s| s.to_string()).collect(),
        kept_cards,
        rows,
    )
}

fn modified_model(model: &DiscreteModel, s: &EdgeSet, mode: WeightMode) -> Result<DiscreteModel> {
    model.dag().validate_edge_set(s)?;
    if s.is_empty() {
        return Ok(model.clone());
    }
    let joint = joint_from_model(model)?;
    let new_dag = model.dag().remove_edges(s)?;
    let cpts = model
        .cpts
        .iter()
        .map(|cpt| {
            if s.into_target(cpt.node()).is_empty() {
                Ok(cpt.clone())
            } else {
                modified_cpt(model, &joint, cpt.node(), s, &mode)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteModel::new(new_dag, cpts)
}

/// The post-cutting model on `G_S`: arrows in `s` are severed and each open
/// end is fed with the source's marginal (`Feeding::Product`) or with the
/// joint marginal of all cut parents of the same target (`Feeding::Joint`).
pub fn cut_edges(model: &DiscreteModel, s: &EdgeSet, feeding: Feeding) -> Result<DiscreteModel> {
    modified_model(model, s, WeightMode::Feed(feeding))
}

/// The model obtained by merely *ignoring* the arrows in `s`: cut parents
/// are marginalized out under their conditional distribution given the kept
/// parents. Where the kept-parent configuration has probability zero the
/// conditional is undefined and the row falls back to product feeding.
pub fn ignored_model(model: &DiscreteModel, s: &EdgeSet) -> Result<DiscreteModel> {
    modified_model(model, s, WeightMode::Conditional)
}

/// Joint distribution of [`ignored_model`].
pub fn ignore_edges(model: &DiscreteModel, s: &EdgeSet) -> Result<JointTable> {
    joint_from_model(&ignored_model(model, s)?)
}

/// Sum over target nodes of the conditional relative entropy between the
/// original CPT and `replacement`, weighted by the joint of the parents.
/// Both `KL(P || P_S)` and `KL(P || P~_S)` reduce to this form because only
/// the targets' conditionals change.
fn per_target_divergence(
    model: &DiscreteModel,
    joint: &JointTable,
    target: &str,
    replacement: &Cpt,
) -> Result<f64> {
    let cpt = model.cpt(target)?;
    let names: Vec<&str> =
        cpt.parents.iter().map(String::as_str).chain([target]).collect();
    let m = joint.marginal(&names)?;
    // Positions of the replacement's (kept) parents within the full list.
    let kept_pos: Vec<usize> = replacement
        .parents
        .iter()
        .map(|p| cpt.parents.iter().position(|q| q == p).expect("kept parent"))
        .collect();
    let card = cpt.node_card;
    let mut total = 0.0;
    let mut full_cfg = vec![0usize; cpt.parents.len()];
    let mut kept_cfg = vec![0usize; kept_pos.len()];
    for (p_flat, row) in cpt.rows.iter().enumerate() {
        decode_config(&cpt.parent_cards, p_flat, &mut full_cfg);
        for (slot, &i) in kept_pos.iter().enumerate() {
            kept_cfg[slot] = full_cfg[i];
        }
        let new_row = replacement.row(&kept_cfg);
        for v in 0..card {
            let w = m.probabilities()[p_flat * card + v];
            if w == 0.0 {
                continue;
            }
            let p = row[v];
            if p == 0.0 {
                // P(pa) * P(v|pa) = 0 exactly whenever the CPT entry is 0.
                continue;
            }
            let q = new_row[v];
            if q == 0.0 {
                return Ok(f64::INFINITY);
            }
            total += w * (p / q).ln();
        }
    }
    Ok(total)
}

/// Causal strength of the arrow set `s`: `KL(P || P_S)` with `P_S` the
/// product-feeding post-cutting distribution. Computed per target node via
/// the locality decomposition; only the CPTs of targets of `s` and the joint
/// of their parents enter.
pub fn causal_strength(model: &DiscreteModel, s: &EdgeSet, base: Base) -> Result<f64> {
    strength_against(model, s, WeightMode::Feed(Feeding::Product), base)
}

/// Observed influence of `s`: `KL(P || P~_S)` with `P~_S` the distribution
/// after merely ignoring the arrows.
pub fn observed_influence(model: &DiscreteModel, s: &EdgeSet, base: Base) -> Result<f64> {
    strength_against(model, s, WeightMode::Conditional, base)
}

fn strength_against(
    model: &DiscreteModel,
    s: &EdgeSet,
    mode: WeightMode,
    base: Base,
) -> Result<f64> {
    model.dag().validate_edge_set(s)?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let joint = joint_from_model(model)?;
    let mut total = 0.0;
    for target in s.targets() {
        let replacement = modified_cpt(model, &joint, &target, s, &mode)?;
        total += per_target_divergence(model, &joint, &target, &replacement)?;
        if total.is_infinite() {
            break;
        }
    }
    Ok(base.from_nats(total))
}

/// Joint distribution after forcing each listed node to a fixed state
/// (truncated factorization: the intervened nodes' conditionals become point
/// masses and their incoming arrows disappear).
pub fn do_intervention(model: &DiscreteModel, assignments: &[(&str, usize)]) -> Result<JointTable> {
    let dag = model.dag();
    let mut seen = std::collections::HashSet::new();
    let mut removed = Vec::new();
    for &(node, state) in assignments {
        let idx = dag.node_index(node)?;
        if !seen.insert(idx) {
            return Err(Error::Usage(format!("node {node:?} intervened twice")));
        }
        if state >= model.cards[idx] {
            return Err(Error::Usage(format!(
                "state {state} out of range for {node:?} (cardinality {})",
                model.cards[idx]
            )));
        }
        for p in dag.parents(node)? {
            removed.push((p, node.to_owned()));
        }
    }
    let new_dag = dag.remove_edges(&EdgeSet::from_pairs(removed))?;
    let cpts = model
        .cpts
        .iter()
        .map(|cpt| {
            if let Some(&(_, state)) = assignments.iter().find(|(n, _)| *n == cpt.node()) {
                let mut probs = vec![0.0; cpt.node_card];
                probs[state] = 1.0;
                Cpt::root(cpt.node(), probs)
            } else {
                Ok(cpt.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    joint_from_model(&DiscreteModel::new(new_dag, cpts)?)
}

/// Average causal effect of a binary `cause` on a binary `effect`:
/// `P(effect=1 | do(cause=1)) - P(effect=1 | do(cause=0))`.
pub fn ace(model: &DiscreteModel, cause: &str, effect: &str) -> Result<f64> {
    for node in [cause, effect] {
        if model.cardinality(node)? != 2 {
            return Err(Error::Usage(format!("ACE requires binary variables, {node:?} is not")));
        }
    }
    if cause == effect {
        return Err(Error::Usage("ACE cause and effect must differ".into()));
    }
    let p = |state: usize| -> Result<f64> {
        Ok(do_intervention(model, &[(cause, state)])?.marginal(&[effect])?.prob(&[1]))
    };
    Ok(p(1)? - p(0)?)
}

/// Intervention-based information flow `I(X_A -> X_B | do(X_C))`:
/// the dependence created by feeding the channel
/// `x_A -> P(X_B | do(x_A, x_C))` with the input distribution
/// `P(X_A | do(x_C))`, averaged over `P(x_C)`. Empty `c` gives
/// `I(X_A -> X_B)`.
pub fn information_flow(
    model: &DiscreteModel,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    base: Base,
) -> Result<f64> {
    for (left, right, what) in [(a, b, "a/b"), (a, c, "a/c"), (b, c, "b/c")] {
        if left.iter().any(|x| right.contains(x)) {
            return Err(Error::Usage(format!("information flow: overlapping sets {what}")));
        }
    }
    let joint = joint_from_model(model)?;
    let pc = joint.marginal(c)?;
    let c_cards: Vec<usize> =
        c.iter().map(|n| model.cardinality(n)).collect::<Result<_>>()?;
    let mut c_cfg = vec![0usize; c.len()];
    let mut total = 0.0;
    for (c_flat, &pcv) in pc.probabilities().iter().enumerate() {
        if pcv == 0.0 {
            continue;
        }
        decode_config(&c_cards, c_flat, &mut c_cfg);
        let c_assign: Vec<(&str, usize)> = c.iter().copied().zip(c_cfg.iter().copied()).collect();
        let pa = do_intervention(model, &c_assign)?.marginal(a)?;
        let a_cards = pa.cardinalities().to_vec();
        let mut a_cfg = vec![0usize; a.len()];
        let mut channels: Vec<Option<Vec<f64>>> = vec![None; pa.len()];
        for (a_flat, &pav) in pa.probabilities().iter().enumerate() {
            if pav == 0.0 {
                continue;
            }
            decode_config(&a_cards, a_flat, &mut a_cfg);
            let mut assign = c_assign.clone();
            assign.extend(a.iter().copied().zip(a_cfg.iter().copied()));
            let pb = do_intervention(model, &assign)?.marginal(b)?;
            channels[a_flat] = Some(pb.probabilities().to_vec());
        }
        let b_total: usize = channels.iter().flatten().next().map_or(1, |v| v.len());
        let mut mixture = vec![0.0f64; b_total];
        for (a_flat, ch) in channels.iter().enumerate() {
            if let Some(pb) = ch {
                for (m, &p) in mixture.iter_mut().zip(pb) {
                    *m += pa.probabilities()[a_flat] * p;
                }
            }
        }
        for (a_flat, ch) in channels.iter().enumerate() {
            let Some(pb) = ch else { continue };
            let pav = pa.probabilities()[a_flat];
            for (bv, &pbv) in pb.iter().enumerate() {
                if pbv == 0.0 {
                    continue;
                }
                total += pcv * pav * pbv * (pbv / mixture[bv]).ln();
            }
        }
    }
    Ok(base.from_nats(total.max(0.0)))
}

/// "Source exclusion" information flow of an arrow set: like causal strength
/// but with the open ends of each target fed with the *joint* marginal of
/// its cut parents. Coincides with causal strength on single arrows.
pub fn information_flow_source_exclusion(
    model: &DiscreteModel,
    s: &EdgeSet,
    base: Base,
) -> Result<f64> {
    strength_against(model, s, WeightMode::Feed(Feeding::Joint), base)
}

/// Exact transfer entropy on an unrolled bivariate chain whose nodes are
/// named `{x_prefix}{t}` / `{y_prefix}{t}` for t = 0..=T:
/// `I(X_{t-h..t-1}; Y_t | Y_{t-h..t-1})` at the final time step, where `h`
/// is `horizon`. The horizon must cover the d-separating past of the chain.
pub fn transfer_entropy_exact(
    model: &DiscreteModel,
    x_prefix: &str,
    y_prefix: &str,
    horizon: usize,
    base: Base,
) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::Usage("transfer entropy horizon must be >= 1".into()));
    }
    let max_index = |prefix: &str| -> Option<usize> {
        model
            .dag()
            .nodes()
            .iter()
            .filter_map(|n| n.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok()))
            .max()
    };
    let (Some(tx), Some(ty)) = (max_index(x_prefix), max_index(y_prefix)) else {
        return Err(Error::Usage(format!(
            "no nodes named {x_prefix}<t> / {y_prefix}<t> found"
        )));
    };
    let t = tx.min(ty);
    if t == 0 {
        return Err(Error::Usage("chain too short for transfer entropy".into()));
    }
    let lo = t.saturating_sub(horizon);
    let x_past: Vec<String> = (lo..t).map(|i| format!("{x_prefix}{i}")).collect();
    let y_past: Vec<String> = (lo..t).map(|i| format!("{y_prefix}{i}")).collect();
    let y_now = format!("{y_prefix}{t}");
    let joint = joint_from_model(model)?;
    joint.conditional_mutual_information(
        &x_past.iter().map(String::as_str).collect::<Vec<_>>(),
        &[y_now.as_str()],
        &y_past.iter().map(String::as_str).collect::<Vec<_>>(),
        base,
    )
}
