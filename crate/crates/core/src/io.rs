//! File formats.
//!
//! - DAG JSON: `{"nodes": [...], "edges": [["src","dst"], ...]}`
//! - Discrete model JSON: `{"dag": {...}, "cardinalities": {"X": 2, ...},
//!   "cpts": {"Y": {"parents": ["X","Z"], "table": [[...], ...]}}}` with
//!   parent-configuration rows in mixed-radix order, last parent fastest.
//!   Root nodes use `"parents": []` and a single row.
//! - SEM JSON: `{"dag": {...}, "coefficients": [["X","Y",0.7], ...],
//!   "noise_vars": {"X": 1.0, ...}}`
//! - VAR model JSON: `{"coefficients": [[...], ...], "noise_vars": [...]}`
//! - Sample CSV: header row of variable names, one row per observation
//!   (transposed into columns on load).
//! - Trajectory CSV: columns `t, X, Y`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::discrete::{Cpt, DiscreteModel};
use crate::error::{Error, Result};
use crate::estimation::SampleMatrix;
use crate::gaussian::LinearSem;
use crate::graph::Dag;
use crate::timeseries::{Trajectory, Var1Model};

#[derive(Debug, Serialize, Deserialize)]
struct DagSchema {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

impl DagSchema {
    fn from_dag(dag: &Dag) -> Self {
        DagSchema { nodes: dag.nodes().to_vec(), edges: dag.edges() }
    }

    fn build(&self) -> Result<Dag> {
        Dag::new(
            &self.nodes.iter().map(String::as_str).collect::<Vec<_>>(),
            &self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
        )
    }
}

pub fn parse_dag(json: &str) -> Result<Dag> {
    serde_json::from_str::<DagSchema>(json)?.build()
}

pub fn dag_to_json(dag: &Dag) -> String {
    serde_json::to_string_pretty(&DagSchema::from_dag(dag)).expect("serializable")
}

pub fn load_dag(path: impl AsRef<Path>) -> Result<Dag> {
    parse_dag(&read(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct CptSchema {
    parents: Vec<String>,
    table: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DiscreteModelSchema {
    dag: DagSchema,
    cardinalities: BTreeMap<String, usize>,
    cpts: BTreeMap<String, CptSchema>,
}

pub fn parse_discrete_model(json: &str) -> Result<DiscreteModel> {
    let schema: DiscreteModelSchema = serde_json::from_str(json)?;
    let dag = schema.dag.build()?;
    let card = |node: &str| -> Result<usize> {
        schema
            .cardinalities
            .get(node)
            .copied()
            .ok_or_else(|| Error::ModelInvalid(format!("missing cardinality for {node:?}")))
    };
    let mut cpts = Vec::new();
    for node in dag.nodes() {
        let spec = schema
            .cpts
            .get(node)
            .ok_or_else(|| Error::ModelInvalid(format!("missing CPT for {node:?}")))?;
        let parent_cards =
            spec.parents.iter().map(|p| card(p)).collect::<Result<Vec<_>>>()?;
        cpts.push(Cpt::new(
            node.clone(),
            card(node)?,
            spec.parents.clone(),
            parent_cards,
            spec.table.clone(),
        )?);
    }
    DiscreteModel::new(dag, cpts)
}

pub fn discrete_model_to_json(model: &DiscreteModel) -> String {
    let dag = model.dag();
    let cardinalities = dag
        .nodes()
        .iter()
        .map(|n| (n.clone(), model.cardinality(n).expect("node")))
        .collect();
    let cpts = dag
        .nodes()
        .iter()
        .map(|n| {
            let cpt = model.cpt(n).expect("node");
            (
                n.clone(),
                CptSchema { parents: cpt.parents().to_vec(), table: cpt.rows().to_vec() },
            )
        })
        .collect();
    let schema = DiscreteModelSchema { dag: DagSchema::from_dag(dag), cardinalities, cpts };
    serde_json::to_string_pretty(&schema).expect("serializable")
}

pub fn load_discrete_model(path: impl AsRef<Path>) -> Result<DiscreteModel> {
    parse_discrete_model(&read(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct SemSchema {
    dag: DagSchema,
    coefficients: Vec<(String, String, f64)>,
    noise_vars: BTreeMap<String, f64>,
}

pub fn parse_sem(json: &str) -> Result<LinearSem> {
    let schema: SemSchema = serde_json::from_str(json)?;
    let dag = schema.dag.build()?;
    LinearSem::new(
        dag,
        &schema
            .coefficients
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect::<Vec<_>>(),
        &schema.noise_vars.iter().map(|(n, v)| (n.as_str(), *v)).collect::<Vec<_>>(),
    )
}

pub fn sem_to_json(sem: &LinearSem) -> String {
    let dag = sem.dag();
    let mut coefficients = Vec::new();
    for (src, tgt) in dag.edges() {
        coefficients.push((src.clone(), tgt.clone(), sem.coefficient(&src, &tgt).expect("edge")));
    }
    let noise_vars = dag
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), sem.noise_variances()[i]))
        .collect();
    let schema = SemSchema { dag: DagSchema::from_dag(dag), coefficients, noise_vars };
    serde_json::to_string_pretty(&schema).expect("serializable")
}

pub fn load_sem(path: impl AsRef<Path>) -> Result<LinearSem> {
    parse_sem(&read(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct VarModelSchema {
    coefficients: Vec<Vec<f64>>,
    noise_vars: Vec<f64>,
}

pub fn parse_var_model(json: &str) -> Result<Var1Model> {
    let schema: VarModelSchema = serde_json::from_str(json)?;
    let d = schema.coefficients.len();
    if schema.coefficients.iter().any(|row| row.len() != d) {
        return Err(Error::ModelInvalid("coefficient matrix is not square".into()));
    }
    let flat: Vec<f64> = schema.coefficients.iter().flatten().copied().collect();
    Var1Model::new(DMatrix::from_row_slice(d, d, &flat), schema.noise_vars)
}

pub fn var_model_to_json(model: &Var1Model) -> String {
    let d = model.dim();
    let coefficients: Vec<Vec<f64>> =
        (0..d).map(|i| (0..d).map(|j| model.coefficients()[(i, j)]).collect()).collect();
    let schema = VarModelSchema {
        coefficients,
        noise_vars: model.noise_variances().iter().copied().collect(),
    };
    serde_json::to_string_pretty(&schema).expect("serializable")
}

pub fn load_var_model(path: impl AsRef<Path>) -> Result<Var1Model> {
    parse_var_model(&read(path)?)
}

/// Sample CSV: header = variable names, one row per observation.
pub fn load_samples(path: impl AsRef<Path>) -> Result<SampleMatrix> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let variables: Vec<String> =
        reader.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Io(format!("bad numeric field {v:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != variables.len() {
            return Err(Error::Io(format!(
                "row with {} fields under {} headers",
                row.len(),
                variables.len()
            )));
        }
        rows.push(row);
    }
    let data = DMatrix::from_fn(variables.len(), rows.len(), |v, obs| rows[obs][v]);
    SampleMatrix::new(variables, data)
}

pub fn save_samples(path: impl AsRef<Path>, samples: &SampleMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(samples.variables())?;
    for obs in 0..samples.count() {
        let row: Vec<String> =
            (0..samples.dim()).map(|v| samples.data()[(v, obs)].to_string()).collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Trajectory CSV: columns `t, <component names...>`.
pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    if headers.first().map(String::as_str) != Some("t") {
        return Err(Error::Io("trajectory CSV must start with a \"t\" column".into()));
    }
    let names: Vec<String> = headers[1..].to_vec();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .skip(1)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Io(format!("bad numeric field {v:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let data = DMatrix::from_fn(names.len(), rows.len(), |c, t| rows[t][c]);
    Trajectory::new(names, data)
}

pub fn save_trajectory(path: impl AsRef<Path>, traj: &Trajectory) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["t".to_owned()];
    header.extend(traj.component_names().iter().cloned());
    writer.write_record(&header)?;
    for t in 0..traj.len() {
        let mut row = vec![t.to_string()];
        row.extend((0..traj.component_names().len()).map(|c| traj.data()[(c, t)].to_string()));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

fn read(path: impl AsRef<Path>) -> Result<String> {
    std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}
