//! Directed acyclic graphs and arrow sets.
//!
//! Node identifiers are strings; internal indices follow declaration order.
//! A topological order is computed once at construction (ties broken by
//! declaration order) and every downstream tensor is laid out in that order,
//! so all engines share one canonical axis order.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};

/// A directed acyclic graph over named nodes.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl Dag {
    /// Build a DAG from declared nodes and (source, target) edges.
    ///
    /// Rejects duplicate node names, unknown endpoints, self-loops,
    /// duplicate edges, and cycles.
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let nodes: Vec<String> = nodes.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut index = HashMap::new();
        for (i, name) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::GraphInvalid(format!("duplicate node {name:?}")));
            }
        }
        let mut edge_set = BTreeSet::new();
        for (src, tgt) in edges {
            let (src, tgt) = (src.as_ref(), tgt.as_ref());
            let s = *index
                .get(src)
                .ok_or_else(|| Error::GraphInvalid(format!("unknown edge source {src:?}")))?;
            let t = *index
                .get(tgt)
                .ok_or_else(|| Error::GraphInvalid(format!("unknown edge target {tgt:?}")))?;
            if s == t {
                return Err(Error::GraphInvalid(format!("self-loop on {src:?}")));
            }
            if !edge_set.insert((s, t)) {
                return Err(Error::GraphInvalid(format!("duplicate edge {src:?}->{tgt:?}")));
            }
        }
        let mut parents = vec![Vec::new(); nodes.len()];
        for &(s, t) in &edge_set {
            parents[t].push(s);
        }
        let topo = toposort(nodes.len(), &edge_set)
            .ok_or_else(|| Error::GraphInvalid("cycle detected".into()))?;
        Ok(Dag { nodes, index, edges: edge_set, parents, topo })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Node names in declaration order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::GraphInvalid(format!("unknown node {name:?}")))
    }

    pub fn contains_edge(&self, source: &str, target: &str) -> bool {
        match (self.index.get(source), self.index.get(target)) {
            (Some(&s), Some(&t)) => self.edges.contains(&(s, t)),
            _ => false,
        }
    }

    /// All edges as (source, target) names, sorted by declaration indices.
    pub fn edges(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(s, t)| (self.nodes[s].clone(), self.nodes[t].clone()))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Parent names of `node`, ordered by declaration index.
    pub fn parents(&self, node: &str) -> Result<Vec<String>> {
        let idx = self.node_index(node)?;
        Ok(self.parents[idx].iter().map(|&p| self.nodes[p].clone()).collect())
    }

    pub(crate) fn parent_indices(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    /// Topological order of node names: every edge points forward, ties
    /// broken by declaration order. Deterministic.
    pub fn topological_order(&self) -> Vec<String> {
        self.topo.iter().map(|&i| self.nodes[i].clone()).collect()
    }

    pub(crate) fn topological_indices(&self) -> &[usize] {
        &self.topo
    }

    /// Check that every member of `s` is an edge of this DAG.
    pub fn validate_edge_set(&self, s: &EdgeSet) -> Result<()> {
        for (src, tgt) in s.iter() {
            if !self.contains_edge(src, tgt) {
                return Err(Error::InvalidEdge { from: src.clone(), to: tgt.clone() });
            }
        }
        Ok(())
    }

    /// Partition the parents of `node` into those whose arrow into `node`
    /// lies in `s` (cut) and the rest (kept). Both lists are ordered by
    /// declaration index; together they are exactly the parents of `node`.
    pub fn split_parents(&self, node: &str, s: &EdgeSet) -> Result<(Vec<String>, Vec<String>)> {
        self.validate_edge_set(s)?;
        let idx = self.node_index(node)?;
        let mut cut = Vec::new();
        let mut kept = Vec::new();
        for &p in &self.parents[idx] {
            if s.contains(&self.nodes[p], node) {
                cut.push(self.nodes[p].clone());
            } else {
                kept.push(self.nodes[p].clone());
            }
        }
        Ok((cut, kept))
    }

    /// The DAG obtained by removing the arrows in `s`; node set unchanged.
    pub fn remove_edges(&self, s: &EdgeSet) -> Result<Dag> {
        self.validate_edge_set(s)?;
        let remaining: Vec<(String, String)> = self
            .edges()
            .into_iter()
            .filter(|(src, tgt)| !s.contains(src, tgt))
            .collect();
        Dag::new(
            &self.nodes.iter().map(String::as_str).collect::<Vec<_>>(),
            &remaining.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
        )
    }

    /// Set of all arrows pointing into `node`.
    pub fn edges_into(&self, node: &str) -> Result<EdgeSet> {
        let idx = self.node_index(node)?;
        Ok(EdgeSet::from_pairs(
            self.parents[idx].iter().map(|&p| (self.nodes[p].clone(), self.nodes[idx].clone())),
        ))
    }
}

/// Kahn's algorithm with the smallest declaration index dequeued first.
fn toposort(n: usize, edges: &BTreeSet<(usize, usize)>) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for &(s, t) in edges {
        indegree[t] += 1;
        children[s].push(t);
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for &c in &children[next] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// A set of arrows, the object whose causal strength is measured.
///
/// Membership in a concrete DAG is checked at use sites, so the same set can
/// be matched against several graphs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    edges: BTreeSet<(String, String)>,
}

impl EdgeSet {
    pub fn empty() -> Self {
        EdgeSet::default()
    }

    pub fn single(source: &str, target: &str) -> Self {
        EdgeSet::from_pairs([(source.to_owned(), target.to_owned())])
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        EdgeSet { edges: pairs.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.edges.contains(&(source.to_owned(), target.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, String)> {
        self.edges.iter()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet { edges: self.edges.union(&other.edges).cloned().collect() }
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Distinct target nodes of the arrows in this set, sorted.
    pub fn targets(&self) -> Vec<String> {
        let targets: HashSet<&String> = self.edges.iter().map(|(_, t)| t).collect();
        let mut v: Vec<String> = targets.into_iter().cloned().collect();
        v.sort();
        v
    }

    /// Arrows of this set pointing into `target`.
    pub fn into_target(&self, target: &str) -> EdgeSet {
        EdgeSet::from_pairs(self.edges.iter().filter(|(_, t)| t == target).cloned())
    }
}

impl std::fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (s, t) in &self.edges {
            if !first {
                write!(f, ";")?;
            }
            write!(f, "{s}->{t}")?;
            first = false;
        }
        Ok(())
    }
}
