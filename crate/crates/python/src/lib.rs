use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use tensorkit_core::mech::{self, CanonicalName, ConstraintPreset};
use tensorkit_core::solve::{invariant_basis, sparsify_single, Algorithm, SolveOptions};
use tensorkit_core::spaces::predict_dimension as predict;
use tensorkit_core::{DenseTensor, Error, GroupSpec, OrthogonalMatrix, SpaceSpec};

fn err(e: Error) -> PyErr {
    match e {
        Error::NoSpectralGap { .. } | Error::NotConverged { .. } | Error::Svd | Error::Lp(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// `{index tuple: value}` over the nonzero entries.
fn to_entries<'py>(py: Python<'py>, t: &DenseTensor) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (idx, v) in t.entries(1e-12) {
        d.set_item(PyTuple::new(py, idx)?, v)?;
    }
    Ok(d)
}

#[pyclass(name = "Group", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGroup(GroupSpec);

#[pymethods]
impl PyGroup {
    /// A catalog crystal class: `convention` is "so3_kb" or "o3_zheng".
    #[staticmethod]
    #[pyo3(signature = (name, convention = "so3_kb"))]
    fn catalog(name: &str, convention: &str) -> PyResult<Self> {
        let c = convention.parse().map_err(err)?;
        GroupSpec::catalog(name, c).map(Self).map_err(err)
    }

    /// A custom group from 3x3 (or dxd) generator matrices.
    #[staticmethod]
    #[pyo3(signature = (name, generators, finite = true))]
    fn from_generators(name: &str, generators: Vec<Vec<Vec<f64>>>, finite: bool) -> PyResult<Self> {
        let gens = generators
            .iter()
            .map(|g| {
                let d = g.len();
                let flat: Vec<f64> = g.concat();
                OrthogonalMatrix::from_row_slice(d, &flat)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        GroupSpec::custom(name, gens, finite).map(Self).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn convention(&self) -> String {
        self.0.convention.to_string()
    }

    #[getter]
    fn finite(&self) -> bool {
        self.0.finite_hint
    }

    fn generators(&self) -> Vec<Vec<Vec<f64>>> {
        self.0.generators.iter().map(|g| g.rows()).collect()
    }

    /// Number of elements of the closed group.
    fn order(&self) -> PyResult<usize> {
        Ok(self.0.close().map_err(err)?.order())
    }

    fn __repr__(&self) -> String {
        format!("Group('{}', '{}')", self.0.name, self.0.convention)
    }
}

#[pyclass(name = "Space", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace(SpaceSpec);

#[pymethods]
impl PySpace {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        SpaceSpec::parse(spec).map(Self).map_err(err)
    }

    #[getter]
    fn dimension(&self) -> u64 {
        self.0.dimension()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.ambient_order()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Space('{}')", self.0)
    }
}

fn resolve(space: Option<&PySpace>, preset: &str) -> PyResult<(SpaceSpec, Vec<(usize, usize)>)> {
    let p: ConstraintPreset = preset.parse().map_err(err)?;
    match (p.space(), space) {
        (Some(s), _) => Ok((s, p.traces())),
        (None, Some(s)) => Ok((s.0.clone(), vec![])),
        (None, None) => Err(PyValueError::new_err("a space is required without a preset")),
    }
}

fn solve(
    group: &PyGroup,
    space: Option<&PySpace>,
    preset: &str,
    algorithm: &str,
    seed: u64,
    rank: Option<usize>,
) -> PyResult<tensorkit_core::solve::BasisSet> {
    let (sp, traces) = resolve(space, preset)?;
    let opts = SolveOptions {
        algorithm: algorithm.parse::<Algorithm>().map_err(err)?,
        rank,
        seed,
        ..Default::default()
    };
    invariant_basis(&group.0, &sp, &traces, &opts).map_err(err)
}

/// Invariant basis as `{index tuple: value}` dicts (0-based indices),
/// display-normalized unless `orthonormal` is set.
#[pyfunction]
#[pyo3(signature = (group, space = None, preset = "none", algorithm = "svd", seed = 0, rank = None, orthonormal = false))]
fn basis<'py>(
    py: Python<'py>,
    group: &PyGroup,
    space: Option<&PySpace>,
    preset: &str,
    algorithm: &str,
    seed: u64,
    rank: Option<usize>,
    orthonormal: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let b = solve(group, space, preset, algorithm, seed, rank)?;
    let elems = if orthonormal { b.elements.clone() } else { b.display_elements() };
    elems.iter().map(|t| to_entries(py, t)).collect()
}

/// Sparsest tensor in the invariant span: `(entries, nnz, l1)`.
#[pyfunction]
#[pyo3(signature = (group, space = None, preset = "none"))]
fn sparsify<'py>(
    py: Python<'py>,
    group: &PyGroup,
    space: Option<&PySpace>,
    preset: &str,
) -> PyResult<(Bound<'py, PyDict>, usize, f64)> {
    let b = solve(group, space, preset, "svd", 0, None)?;
    let s = sparsify_single(&b).map_err(err)?;
    Ok((to_entries(py, &s.tensor)?, s.nnz, s.l1))
}

#[pyfunction]
fn predict_dimension(group: &PyGroup, space: &PySpace) -> PyResult<u64> {
    let g = group.0.close().map_err(err)?;
    predict(&space.0, &g).map_err(err)
}

/// One of II, JJ, KK, Oh, D4h as a flat row-major list of 81 values.
#[pyfunction]
fn canonical(name: &str) -> PyResult<Vec<f64>> {
    let n: CanonicalName = name.parse().map_err(err)?;
    Ok(mech::canonical(n).into_vec())
}

fn inputs(e: Vec<Vec<f64>>, a: Vec<f64>) -> PyResult<(DenseTensor, DenseTensor)> {
    let e = DenseTensor::from_vec(2, 3, e.concat()).map_err(err)?;
    let a = DenseTensor::from_vec(4, 3, a).map_err(err)?;
    Ok((e, a))
}

/// `(I1, .., I6)` for a 3x3 `e` and a flat 81-entry structure tensor `a`.
#[pyfunction]
fn kambouchev_invariants(e: Vec<Vec<f64>>, a: Vec<f64>) -> PyResult<Vec<f64>> {
    let (e, a) = inputs(e, a)?;
    Ok(mech::kambouchev_invariants(&e, &a).map_err(err)?.0.to_vec())
}

/// Gradients of the six invariants, each as a 3x3 nested list.
#[pyfunction]
fn kambouchev_basis(e: Vec<Vec<f64>>, a: Vec<f64>) -> PyResult<Vec<Vec<Vec<f64>>>> {
    let (e, a) = inputs(e, a)?;
    let b = mech::kambouchev_basis(&e, &a).map_err(err)?;
    Ok(b
        .iter()
        .map(|t| t.as_slice().chunks(3).map(|r| r.to_vec()).collect())
        .collect())
}

/// Report for a published table as a JSON string.
#[pyfunction]
#[pyo3(signature = (table, group = None))]
fn reproduce(table: &str, group: Option<&str>) -> PyResult<String> {
    let r = tensorkit_core::reproduce::reproduce(table, group).map_err(err)?;
    serde_json::to_string(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn tensorkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PySpace>()?;
    m.add_function(wrap_pyfunction!(basis, m)?)?;
    m.add_function(wrap_pyfunction!(sparsify, m)?)?;
    m.add_function(wrap_pyfunction!(predict_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(kambouchev_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(kambouchev_basis, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
