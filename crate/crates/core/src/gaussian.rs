//! Closed-form causal strength for linear structural equation models with
//! jointly Gaussian noise.
//!
//! With `X = AX + E` (A strictly lower triangular under the topological
//! order, E independent zero-mean noises) the observed covariance is
//! `Sigma = (I-A)^{-1} Sigma_E (I-A)^{-T}`. Cutting the arrows in S replaces
//! the noise by `E' = E + A_S X'` with independent copies X', giving
//! `Sigma_E' = Sigma_E + A_S diag(Sigma) A_S^T` and
//! `Sigma_S = (I-A_Sbar)^{-1} Sigma_E' (I-A_Sbar)^{-T}`; the strength is the
//! zero-mean Gaussian relative entropy between the two covariances.
//!
//! Everything is computed in nats internally; conversion happens at the
//! boundary. Means are assumed to be zero (data is centered upstream).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimation::SampleMatrix;
use crate::graph::{Dag, EdgeSet};
use crate::Base;

/// Relative eigenvalue threshold below which a covariance is treated as
/// singular for KL purposes.
const PD_TOLERANCE: f64 = 1e-12;

/// A linear Gaussian structural equation model over a DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSem {
    dag: Dag,
    /// `coeffs[(j, i)]` is the coefficient of node i in the equation for
    /// node j; nonzero only where the DAG has an arrow i -> j.
    coeffs: DMatrix<f64>,
    noise_vars: DVector<f64>,
}

impl LinearSem {
    /// Build from coefficient triples `(source, target, weight)` and one
    /// noise variance per node. Every triple must name a DAG edge; edges
    /// without a triple get coefficient zero.
    pub fn new(
        dag: Dag,
        coefficients: &[(&str, &str, f64)],
        noise_vars: &[(&str, f64)],
    ) -> Result<Self> {
        let n = dag.node_count();
        let mut coeffs = DMatrix::zeros(n, n);
        for &(src, tgt, w) in coefficients {
            if !dag.contains_edge(src, tgt) {
                return Err(Error::InvalidEdge { from: src.into(), to: tgt.into() });
            }
            let (i, j) = (dag.node_index(src)?, dag.node_index(tgt)?);
            coeffs[(j, i)] = w;
        }
        let mut vars = DVector::from_element(n, f64::NAN);
        for &(node, v) in noise_vars {
            if v < 0.0 {
                return Err(Error::ModelInvalid(format!(
                    "negative noise variance {v} for {node:?}"
                )));
            }
            vars[dag.node_index(node)?] = v;
        }
        if let Some(i) = vars.iter().position(|v| v.is_nan()) {
            return Err(Error::ModelInvalid(format!(
                "missing noise variance for {:?}",
                dag.node_name(i)
            )));
        }
        Ok(LinearSem { dag, coeffs, noise_vars: vars })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Structure matrix indexed by node declaration order:
    /// row = equation/target, column = source.
    pub fn structure_matrix(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn noise_variances(&self) -> &DVector<f64> {
        &self.noise_vars
    }

    pub fn coefficient(&self, source: &str, target: &str) -> Result<f64> {
        Ok(self.coeffs[(self.dag.node_index(target)?, self.dag.node_index(source)?)])
    }

    /// Entries of the structure matrix restricted to the arrows in `s`
    /// (and its complement).
    fn split_structure(&self, s: &EdgeSet) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        self.dag.validate_edge_set(s)?;
        let n = self.dag.node_count();
        let mut a_cut = DMatrix::zeros(n, n);
        let mut a_kept = self.coeffs.clone();
        for (src, tgt) in s.iter() {
            let (i, j) = (self.dag.node_index(src)?, self.dag.node_index(tgt)?);
            a_cut[(j, i)] = self.coeffs[(j, i)];
            a_kept[(j, i)] = 0.0;
        }
        Ok((a_cut, a_kept))
    }

    /// Draw `count` observations (one column each) by pushing seeded
    /// standard-normal noise through the structural equations.
    pub fn simulate(&self, count: usize, seed: u64) -> SampleMatrix {
        let n = self.dag.node_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = DMatrix::zeros(n, count);
        for &j in self.dag.topological_indices() {
            let sd = self.noise_vars[j].sqrt();
            for c in 0..count {
                let e: f64 = StandardNormal.sample(&mut rng);
                let mut x = e * sd;
                for &i in self.dag.parent_indices(j) {
                    x += self.coeffs[(j, i)] * data[(i, c)];
                }
                data[(j, c)] = x;
            }
        }
        SampleMatrix::new(self.dag.nodes().to_vec(), data).expect("finite simulation output")
    }
}

/// Symmetric positive-semidefinite matrix over the model's node order.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    matrix: DMatrix<f64>,
}

impl Covariance {
    /// Validate symmetry (within 1e-10, relative to the largest entry) and
    /// that eigenvalues are >= -1e-10 on the same scale.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Numeric("covariance must be square".into()));
        }
        let scale = matrix.iter().fold(1.0f64, |m, &v| m.max(v.abs()));
        for i in 0..matrix.nrows() {
            for j in (i + 1)..matrix.ncols() {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::Numeric("covariance not symmetric".into()));
                }
            }
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let eigs = sym.clone().symmetric_eigenvalues();
        let max_eig = eigs.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if eigs.iter().any(|&v| v < -1e-10 * max_eig.max(1.0)) {
            return Err(Error::Numeric("covariance not positive semidefinite".into()));
        }
        Ok(Covariance { matrix: sym })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Strict positive definiteness at the KL tolerance:
    /// smallest eigenvalue > 1e-12 times the largest.
    pub fn is_strictly_positive_definite(&self) -> bool {
        let eigs = self.matrix.clone().symmetric_eigenvalues();
        let max = eigs.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let min = eigs.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        max > 0.0 && min > PD_TOLERANCE * max
    }
}

/// Columns of `(I - A)^{-1}` by forward substitution along the topological
/// order; exact for any DAG-compatible structure matrix.
fn inverse_i_minus(dag: &Dag, a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = dag.node_count();
    let mut b = DMatrix::zeros(n, n);
    for c in 0..n {
        for &j in dag.topological_indices() {
            let mut v = if j == c { 1.0 } else { 0.0 };
            for &i in dag.parent_indices(j) {
                if a[(j, i)] != 0.0 {
                    v += a[(j, i)] * b[(i, c)];
                }
            }
            b[(j, c)] = v;
        }
    }
    b
}

fn sandwich(dag: &Dag, a: &DMatrix<f64>, noise: &DMatrix<f64>) -> Result<Covariance> {
    let b = inverse_i_minus(dag, a);
    Covariance::new(&b * noise * b.transpose())
}

/// Observed covariance `Sigma = (I-A)^{-1} Sigma_E (I-A)^{-T}`.
pub fn observational_covariance(sem: &LinearSem) -> Result<Covariance> {
    sandwich(&sem.dag, &sem.coeffs, &DMatrix::from_diagonal(&sem.noise_vars))
}

/// Post-cutting covariance: cut sources are replaced by independent copies,
/// inflating the noise by `A_S diag(Sigma) A_S^T`.
pub fn cut_covariance(sem: &LinearSem, s: &EdgeSet) -> Result<Covariance> {
    let (a_cut, a_kept) = sem.split_structure(s)?;
    let observed = observational_covariance(sem)?;
    let diag = DMatrix::from_diagonal(&observed.matrix().diagonal());
    let modified_noise = DMatrix::from_diagonal(&sem.noise_vars) + &a_cut * diag * a_cut.transpose();
    sandwich(&sem.dag, &a_kept, &modified_noise)
}

/// Zero-mean Gaussian relative entropy
/// `0.5 (tr[Sq^{-1} Sp] - log det Sp / det Sq - n)`.
///
/// A singular `sigma_q` yields `f64::INFINITY`; a singular `sigma_p` is
/// rejected with an error (no pseudo-determinant convention).
pub fn gaussian_kl(sigma_p: &Covariance, sigma_q: &Covariance, base: Base) -> Result<f64> {
    if sigma_p.dim() != sigma_q.dim() {
        return Err(Error::Usage("covariance dimension mismatch".into()));
    }
    if !sigma_p.is_strictly_positive_definite() {
        return Err(Error::Numeric("sigma_p is singular".into()));
    }
    if !sigma_q.is_strictly_positive_definite() {
        return Ok(f64::INFINITY);
    }
    let n = sigma_p.dim() as f64;
    let chol_p = nalgebra::Cholesky::new(sigma_p.matrix.clone())
        .ok_or_else(|| Error::Numeric("Cholesky of sigma_p failed".into()))?;
    let Some(chol_q) = nalgebra::Cholesky::new(sigma_q.matrix.clone()) else {
        return Ok(f64::INFINITY);
    };
    let trace = chol_q.solve(&sigma_p.matrix).trace();
    let log_det = |c: &nalgebra::Cholesky<f64, nalgebra::Dyn>| {
        2.0 * c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    };
    let nats = 0.5 * (trace - (log_det(&chol_p) - log_det(&chol_q)) - n);
    Ok(base.from_nats(nats.max(0.0)))
}

/// Causal strength of `s` in a linear Gaussian model:
/// `KL(N(0, Sigma) || N(0, Sigma_S))`. A degenerate covariance on either
/// side (deterministic coupling) yields infinite strength.
pub fn causal_strength_linear(sem: &LinearSem, s: &EdgeSet, base: Base) -> Result<f64> {
    let observed = observational_covariance(sem)?;
    let cut = cut_covariance(sem, s)?;
    if !observed.is_strictly_positive_definite() || !cut.is_strictly_positive_definite() {
        return Ok(f64::INFINITY);
    }
    gaussian_kl(&observed, &cut, base)
}
