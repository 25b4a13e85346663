//! Python bindings. Build with
//! `cargo build --release -p syzygy5-py --features extension-module` and copy
//! `target/release/libpysyzygy5.so` to `pysyzygy5.so` somewhere on `sys.path`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use syzygy5::comparison::{self, ComparisonError};
use syzygy5::gonal5::{self, BundleJson, CurveBundle, GonalError};
use syzygy5::koszul::{self, MonomialOrder};
use syzygy5::linalg::{PrimeField, DEFAULT_MEMORY_BUDGET, DEFAULT_PRIME};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn gonal_err(e: GonalError) -> PyErr {
    match e {
        GonalError::GenusTooSmall(_) | GonalError::InvalidBundle(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn comparison_err(e: ComparisonError) -> PyErr {
    match e {
        ComparisonError::WindowViolated { .. } | ComparisonError::Threshold { .. } => value_err(e),
        ComparisonError::Gonal(g) => gonal_err(g),
        _ => runtime_err(e),
    }
}

fn field(prime: u32) -> PyResult<PrimeField> {
    PrimeField::new(prime).map_err(value_err)
}

/// Numerical data of a genus: scroll type, splitting `a`, `b` and type tag.
#[pyclass(name = "GonalConfig", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyGonalConfig {
    inner: gonal5::GonalConfig,
}

#[pymethods]
impl PyGonalConfig {
    #[new]
    fn new(genus: u32) -> PyResult<Self> {
        Ok(PyGonalConfig {
            inner: gonal5::config_for_genus(genus).map_err(gonal_err)?,
        })
    }

    #[getter]
    fn genus(&self) -> u32 {
        self.inner.g
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter]
    fn f(&self) -> u32 {
        self.inner.f
    }

    #[getter]
    fn a(&self) -> Vec<i64> {
        self.inner.a.clone()
    }

    #[getter]
    fn b(&self) -> Vec<i64> {
        self.inner.b.clone()
    }

    #[getter]
    fn scroll(&self) -> Vec<u32> {
        self.inner.scroll().e().to_vec()
    }

    #[getter]
    fn type_tag(&self) -> String {
        self.inner.type_tag.to_string()
    }

    fn quadric_count(&self) -> usize {
        self.inner.quadric_count()
    }

    fn bertini(&self) -> bool {
        gonal5::bertini_predicate(&self.inner, &self.inner.scroll())
    }

    fn __repr__(&self) -> String {
        format!(
            "GonalConfig(genus={}, type={}, a={:?}, b={:?})",
            self.inner.g, self.inner.type_tag, self.inner.a, self.inner.b
        )
    }
}

/// A random 5-gonal canonical curve with its skew matrix, Pfaffians and quadrics.
#[pyclass(name = "Curve", frozen)]
pub struct PyCurve {
    inner: CurveBundle,
}

#[pymethods]
impl PyCurve {
    #[new]
    #[pyo3(signature = (genus, seed = 1, prime = DEFAULT_PRIME))]
    fn new(genus: u32, seed: u64, prime: u32) -> PyResult<Self> {
        Ok(PyCurve {
            inner: gonal5::generate_curve(genus, &field(prime)?, seed).map_err(gonal_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: BundleJson = serde_json::from_str(text).map_err(value_err)?;
        Ok(PyCurve {
            inner: CurveBundle::from_json(&j).map_err(gonal_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json()).map_err(runtime_err)
    }

    #[getter]
    fn genus(&self) -> u32 {
        self.inner.genus()
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.inner.field().p()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.psi.seed
    }

    #[getter]
    fn config(&self) -> PyGonalConfig {
        PyGonalConfig {
            inner: self.inner.config().clone(),
        }
    }

    #[getter]
    fn quadric_count(&self) -> usize {
        self.inner.quadrics.len()
    }

    /// `dim (S_C)_m` for `m` in {2, 3}.
    fn hilbert(&self, m: usize) -> PyResult<usize> {
        if !(2..=3).contains(&m) {
            return Err(value_err("m must be 2 or 3"));
        }
        Ok(gonal5::hilbert_check(
            &self.inner.field(),
            &self.inner.quadrics,
            self.inner.genus() as usize,
            m,
        ))
    }

    fn laplace_identity(&self) -> PyResult<bool> {
        gonal5::laplace_identity(&self.inner.psi, &self.inner.pfaffians).map_err(gonal_err)
    }

    /// `(dim_ker, betti_C, betti_X)` at `j = n - 2`.
    fn betti_delta(&self) -> PyResult<(usize, usize, usize)> {
        let d = comparison::betti_delta(&self.inner.psi).map_err(comparison_err)?;
        Ok((d.dim_ker, d.betti_c, d.betti_x))
    }

    /// Whether the decomposable kernel element of `ψ_{n-2+shift}` verifies.
    #[pyo3(signature = (shift = 0, seed = 0))]
    fn certificate(&self, shift: usize, seed: u64) -> PyResult<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let el = comparison::kernel_element(&self.inner.psi, shift, &mut rng).map_err(comparison_err)?;
        Ok(el.certificate.verified)
    }

    /// `β_{p,p+1}` from the mapping cone, `None` where a scalar map was too large.
    #[pyo3(signature = (max_dim = 4000))]
    fn mapping_cone_linear_strand(&self, max_dim: usize) -> PyResult<Vec<Option<usize>>> {
        Ok(comparison::mapping_cone_betti(&self.inner.psi, max_dim)
            .map_err(comparison_err)?
            .linear)
    }

    /// `β_{p,p+1}` by Koszul cohomology.
    #[pyo3(signature = (p, memory_budget = DEFAULT_MEMORY_BUDGET))]
    fn koszul_betti(&self, py: Python<'_>, p: usize, memory_budget: usize) -> PyResult<usize> {
        let bundle = &self.inner;
        py.detach(|| {
            let q = koszul::curve_quotient(bundle, MonomialOrder::Lex)?;
            koszul::koszul_betti(&bundle.field(), &q, p, memory_budget)
        })
        .map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Curve(genus={}, seed={}, prime={})",
            self.inner.genus(),
            self.inner.psi.seed,
            self.inner.field().p()
        )
    }
}

/// `(dim_ker, betti_C, betti_X)` for a random curve of genus `genus`.
#[pyfunction]
#[pyo3(signature = (genus, seed = 1, prime = DEFAULT_PRIME))]
fn betti_delta(py: Python<'_>, genus: u32, seed: u64, prime: u32) -> PyResult<(usize, usize, usize)> {
    let field = field(prime)?;
    let cfg = gonal5::config_for_genus(genus).map_err(gonal_err)?;
    let d = py
        .detach(|| comparison::betti_delta(&gonal5::random_psi(&cfg, &field, seed)))
        .map_err(comparison_err)?;
    Ok((d.dim_ker, d.betti_c, d.betti_x))
}

/// Sweep rows as JSON strings, one per genus.
#[pyfunction]
#[pyo3(signature = (genera, shift = 0, full = false, seed = 1, prime = DEFAULT_PRIME))]
fn sweep(py: Python<'_>, genera: Vec<u32>, shift: usize, full: bool, seed: u64, prime: u32) -> PyResult<Vec<String>> {
    use syzygy5::cli::{sweep_rows, SweepMode};
    let field = field(prime)?;
    let mode = if full { SweepMode::Full } else { SweepMode::Certificate };
    let rows = py.detach(|| sweep_rows(&genera, shift, mode, &field, seed));
    rows.iter()
        .map(|r| serde_json::to_string(r).map_err(runtime_err))
        .collect()
}

#[pyfunction]
fn theorem_threshold(genus: u32, shift: usize) -> bool {
    comparison::theorem_threshold(genus, shift)
}

#[pymodule]
fn pysyzygy5(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_PRIME", DEFAULT_PRIME)?;
    m.add_class::<PyGonalConfig>()?;
    m.add_class::<PyCurve>()?;
    m.add_function(wrap_pyfunction!(betti_delta, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_threshold, m)?)?;
    Ok(())
}
