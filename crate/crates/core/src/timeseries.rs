//! Causal strength between two stationary time series.
//!
//! An order-1 vector autoregression `x_t = C x_{t-1} + e_t` unrolls into a
//! DAG with one node per component per time step; the strength of "series X
//! on Y_t" is the strength of the set of all arrows from X's past into Y_t.
//! By locality this only needs the stationary joint of one time window, so
//! the exact value is delegated to the Gaussian engine on a small unrolled
//! model. Transfer entropy is computed exactly from the steady-state
//! one-step prediction variance of the target given its own past.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimation::{estimate_causal_strength, EstimationConfig, SampleMatrix};
use crate::gaussian::{causal_strength_linear, LinearSem};
use crate::graph::{Dag, EdgeSet};
use crate::Base;

/// Order-1 vector autoregression with independent Gaussian innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct Var1Model {
    coeffs: DMatrix<f64>,
    noise_vars: DVector<f64>,
    names: Vec<String>,
}

impl Var1Model {
    /// `coeffs[(i, j)]` multiplies component j at time t-1 in the equation
    /// for component i at time t. The spectral radius must be < 1
    /// (stationarity). Components are named X, Y for two series, C1..Cd
    /// otherwise.
    pub fn new(coeffs: DMatrix<f64>, noise_vars: Vec<f64>) -> Result<Self> {
        if !coeffs.is_square() || coeffs.nrows() != noise_vars.len() {
            return Err(Error::Usage("coefficient/noise dimension mismatch".into()));
        }
        if noise_vars.iter().any(|&v| v < 0.0) {
            return Err(Error::ModelInvalid("negative noise variance".into()));
        }
        let radius =
            coeffs.complex_eigenvalues().iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if radius >= 1.0 - 1e-9 {
            return Err(Error::Usage(format!(
                "non-stationary model: spectral radius {radius:.6} >= 1"
            )));
        }
        let d = coeffs.nrows();
        let names = if d == 2 {
            vec!["X".to_owned(), "Y".to_owned()]
        } else {
            (1..=d).map(|i| format!("C{i}")).collect()
        };
        Ok(Var1Model { coeffs, noise_vars: DVector::from_vec(noise_vars), names })
    }

    /// The bivariate mutual-copy model: each component is a noisy copy of
    /// the other's previous value, tuned to unit stationary variance.
    /// `X_t = sqrt(1-e^2) Y_{t-1} + E`, `Y_t = sqrt(1-e^2) X_{t-1} + E`,
    /// `Var E = e^2`. Requires `0 < epsilon <= 1`.
    pub fn cross_copy(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Usage(format!(
                "cross-copy model needs epsilon in (0, 1], got {epsilon}"
            )));
        }
        let c = (1.0 - epsilon * epsilon).sqrt();
        Var1Model::new(
            DMatrix::from_row_slice(2, 2, &[0.0, c, c, 0.0]),
            vec![epsilon * epsilon, epsilon * epsilon],
        )
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn component_names(&self) -> &[String] {
        &self.names
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn noise_variances(&self) -> &DVector<f64> {
        &self.noise_vars
    }

    /// Stationary covariance, solving `G = C G C^T + Sigma_E` by
    /// vectorization.
    pub fn stationary_covariance(&self) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let kron = self.coeffs.kronecker(&self.coeffs);
        let lhs = DMatrix::identity(d * d, d * d) - kron;
        let sigma_e = DMatrix::from_diagonal(&self.noise_vars);
        let rhs = DVector::from_column_slice(sigma_e.as_slice());
        let sol = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numeric("Lyapunov system singular".into()))?;
        let g = DMatrix::from_column_slice(d, d, sol.as_slice());
        Ok((&g + g.transpose()) * 0.5)
    }
}

/// Time-indexed observations, one row per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    names: Vec<String>,
    data: DMatrix<f64>,
}

impl Trajectory {
    pub fn new(names: Vec<String>, data: DMatrix<f64>) -> Result<Self> {
        if names.len() != data.nrows() {
            return Err(Error::Usage("component/row mismatch".into()));
        }
        Ok(Trajectory { names, data })
    }

    pub fn component_names(&self) -> &[String] {
        &self.names
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }
}

/// Simulate a stationary trajectory with Gaussian innovations: the first
/// `burn_in` steps are discarded. Deterministic per seed.
pub fn simulate_var1(model: &Var1Model, t_len: usize, seed: u64, burn_in: usize) -> Trajectory {
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sds: Vec<f64> = model.noise_vars.iter().map(|v| v.sqrt()).collect();
    let mut state = DVector::zeros(d);
    let mut data = DMatrix::zeros(d, t_len);
    for t in 0..burn_in + t_len {
        let noise = DVector::from_fn(d, |i, _| {
            let e: f64 = StandardNormal.sample(&mut rng);
            sds[i] * e
        });
        state = &model.coeffs * state + noise;
        if t >= burn_in {
            data.set_column(t - burn_in, &state);
        }
    }
    Trajectory { names: model.names.clone(), data }
}

/// Names for the window variables of the unrolled one-step model.
fn window_names(model: &Var1Model, target: usize) -> (String, String, String) {
    let source = 1 - target;
    (
        format!("{}_lag1", model.names[source]),
        format!("{}_lag1", model.names[target]),
        format!("{}_now", model.names[target]),
    )
}

/// Unrolled window model over (source lag, target lag, target now) whose
/// observational law equals the stationary joint: the lag block reproduces
/// the stationary covariance via a regression edge, the target equation is
/// the VAR row. Returns the model and the arrow set "source past -> Y_t".
fn unrolled_window(model: &Var1Model, target: usize) -> Result<(LinearSem, EdgeSet)> {
    if model.dim() != 2 {
        return Err(Error::Usage("time-series strength is defined for two components".into()));
    }
    let source = 1 - target;
    let gamma = model.stationary_covariance()?;
    let (g_ss, g_st, g_tt) = (gamma[(source, source)], gamma[(source, target)], gamma[(target, target)]);
    let (src_lag, tgt_lag, now) = window_names(model, target);
    let c_from_src = model.coeffs[(target, source)];
    let c_from_tgt = model.coeffs[(target, target)];

    let mut edges: Vec<(&str, &str)> = Vec::new();
    let mut coeffs: Vec<(&str, &str, f64)> = Vec::new();
    // Lag block: tgt_lag regressed on src_lag reproduces the stationary
    // joint of the two lagged components.
    let beta = if g_ss > 0.0 { g_st / g_ss } else { 0.0 };
    if beta != 0.0 {
        edges.push((&src_lag, &tgt_lag));
        coeffs.push((&src_lag, &tgt_lag, beta));
    }
    if c_from_src != 0.0 {
        edges.push((&src_lag, &now));
        coeffs.push((&src_lag, &now, c_from_src));
    }
    if c_from_tgt != 0.0 {
        edges.push((&tgt_lag, &now));
        coeffs.push((&tgt_lag, &now, c_from_tgt));
    }
    let dag = Dag::new(&[src_lag.as_str(), tgt_lag.as_str(), now.as_str()], &edges)?;
    let sem = LinearSem::new(
        dag,
        &coeffs,
        &[
            (src_lag.as_str(), g_ss),
            (tgt_lag.as_str(), g_tt - beta * g_st),
            (now.as_str(), model.noise_vars[target]),
        ],
    )?;
    let s = if c_from_src != 0.0 {
        EdgeSet::single(&src_lag, &now)
    } else {
        EdgeSet::empty()
    };
    Ok((sem, s))
}

/// Exact strength of the arrows from the other component's past into the
/// target component at one time step, via the Gaussian engine on the
/// unrolled window model. Deterministic coupling (vanishing innovation)
/// yields infinity.
pub fn exact_strength_var(model: &Var1Model, target: usize, base: Base) -> Result<f64> {
    let (sem, s) = unrolled_window(model, target)?;
    causal_strength_linear(&sem, &s, base)
}

/// Exact transfer entropy into `target`:
/// `0.5 log( Var(Y_t | Y-past) / Var(Y_t | X-past, Y-past) )`.
///
/// The denominator is the target's innovation variance; the numerator is the
/// steady-state one-step prediction variance of a Kalman filter that
/// observes only the target component.
pub fn transfer_entropy_var1(model: &Var1Model, target: usize, base: Base) -> Result<f64> {
    if model.dim() != 2 {
        return Err(Error::Usage("transfer entropy is defined for two components".into()));
    }
    if target >= 2 {
        return Err(Error::Usage(format!("target index {target} out of range")));
    }
    let innovation = model.noise_vars[target];
    if innovation <= 0.0 {
        return Err(Error::Numeric("degenerate innovation variance".into()));
    }
    let d = model.dim();
    let sigma_e = DMatrix::from_diagonal(&model.noise_vars);
    let condition_on_target = |m: &DMatrix<f64>| -> DMatrix<f64> {
        let v = m[(target, target)];
        if v <= 0.0 {
            return m.clone();
        }
        let col = m.column(target).into_owned();
        m - &col * col.transpose() / v
    };
    // Filtered state covariance given the target's past, iterated to its
    // fixed point (geometric convergence for stationary models).
    let mut filtered = condition_on_target(&model.stationary_covariance()?);
    let mut predicted_var = f64::INFINITY;
    for _ in 0..10_000 {
        let predicted = &model.coeffs * &filtered * model.coeffs.transpose() + &sigma_e;
        let v = predicted[(target, target)];
        filtered = condition_on_target(&predicted);
        if (v - predicted_var).abs() <= 1e-14 * v.max(1.0) {
            predicted_var = v;
            break;
        }
        predicted_var = v;
    }
    debug_assert_eq!(d, 2);
    Ok(base.from_nats(0.5 * (predicted_var / innovation).ln().max(0.0)))
}

/// Exact values for the binary perturbed-copy chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedCopyValues {
    pub transfer_entropy: f64,
    pub causal_strength: f64,
}

/// Closed forms for the chain where each step copies the other component
/// with symmetric error rate `epsilon`:
/// transfer entropy `h(2e(1-e)) - h(e)` and causal strength `1 - h(e)`
/// (bits), with `h` the binary entropy and `0 log 0 = 0`.
pub fn exact_perturbed_copy(epsilon: f64, base: Base) -> Result<PerturbedCopyValues> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Usage(format!("epsilon {epsilon} outside [0,1]")));
    }
    let h = |p: f64| -> f64 {
        let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
        term(p) + term(1.0 - p)
    };
    let te_bits = (h(2.0 * epsilon * (1.0 - epsilon)) - h(epsilon)).max(0.0);
    let cs_bits = (1.0 - h(epsilon)).max(0.0);
    let ln2 = std::f64::consts::LN_2;
    Ok(PerturbedCopyValues {
        transfer_entropy: base.from_nats(te_bits * ln2),
        causal_strength: base.from_nats(cs_bits * ln2),
    })
}

/// Estimate the strength of "series X on Y_t" from a single stationary
/// trajectory: embed windows `(X_{t-p..t-1}, Y_{t-p..t-1}, Y_t)` at the given
/// stride (default `10 p`, approximating independent draws), then run the
/// sample-based pipeline on the arrow set {X lags -> Y_t}.
pub fn estimate_strength_ts(
    traj: &Trajectory,
    lag_order: usize,
    target: usize,
    stride: Option<usize>,
    cfg: &EstimationConfig,
) -> Result<f64> {
    if traj.names.len() != 2 {
        return Err(Error::Usage("time-series estimation needs two components".into()));
    }
    if lag_order == 0 {
        return Err(Error::Usage("lag order must be >= 1".into()));
    }
    let stride = stride.unwrap_or(10 * lag_order).max(1);
    let source = 1 - target;
    let t_len = traj.len();
    let window_starts: Vec<usize> = (lag_order..t_len).step_by(stride).collect();
    let min_windows = 8 * cfg.knn_r.max(2);
    if window_starts.len() < min_windows {
        return Err(Error::Usage(format!(
            "trajectory too short: {} windows, need at least {min_windows}",
            window_starts.len()
        )));
    }

    let mut names: Vec<String> = Vec::new();
    for lag in 1..=lag_order {
        names.push(format!("{}_lag{lag}", traj.names[source]));
        names.push(format!("{}_lag{lag}", traj.names[target]));
    }
    let now = format!("{}_now", traj.names[target]);
    names.push(now.clone());

    let mut data = DMatrix::zeros(names.len(), window_starts.len());
    for (c, &t) in window_starts.iter().enumerate() {
        for lag in 1..=lag_order {
            data[(2 * (lag - 1), c)] = traj.data[(source, t - lag)];
            data[(2 * (lag - 1) + 1, c)] = traj.data[(target, t - lag)];
        }
        data[(names.len() - 1, c)] = traj.data[(target, t)];
    }
    let embedded = SampleMatrix::new(names.clone(), data)?;

    // Y_t's parents are all lagged variables; the lag block itself is left
    // unstructured (its observed joint is kept as-is by the resampler).
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut cut: Vec<(String, String)> = Vec::new();
    for lag in 1..=lag_order {
        let src_name = format!("{}_lag{lag}", traj.names[source]);
        let tgt_name = format!("{}_lag{lag}", traj.names[target]);
        edges.push((src_name.clone(), now.clone()));
        edges.push((tgt_name, now.clone()));
        cut.push((src_name, now.clone()));
    }
    let dag = Dag::new(
        &names.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )?;
    estimate_causal_strength(&embedded, &dag, &EdgeSet::from_pairs(cut), cfg)
}
