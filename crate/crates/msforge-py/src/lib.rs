//! Python bindings: surfaces, period solvers, verification, meshes and the
//! classification tables. Structured results come back as plain dicts and
//! lists.

use std::path::PathBuf;

use msforge_core::classify::{candidate_catalog, render_table, tables};
use msforge_core::families::Surface as CoreSurface;
use msforge_core::geometry::{
    self, build_mesh, calibrate, end_orders, family_symmetries, jorge_meeks_check,
    symmetry_check_many, symmetry_group, Immersion, MeshOptions, SurfaceMesh,
};
use msforge_core::integrator::verify_periods;
use msforge_core::periods::{self, closure_residual, NonexistenceCase, SolvedParams};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(
    msforge,
    MsforgeError,
    PyException,
    "Raised for invalid input and failed computations."
);
create_exception!(
    msforge,
    NoConvergenceError,
    MsforgeError,
    "A solver or integral did not converge."
);

fn err(e: msforge_core::Error) -> PyErr {
    match e {
        msforge_core::Error::NoConvergence(_) => NoConvergenceError::new_err(e.to_string()),
        _ => MsforgeError::new_err(e.to_string()),
    }
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for msforge_core::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Serialize to JSON and hand the text to `json.loads`.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| MsforgeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A member of one of the surface families, or the catenoid.
#[pyclass(module = "msforge", frozen)]
struct Surface {
    inner: CoreSurface,
}

#[pymethods]
impl Surface {
    #[staticmethod]
    fn genus_family(gamma: u32, c: f64) -> PyResult<Self> {
        Ok(Surface {
            inner: CoreSurface::genus_family(gamma, c).or_raise()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (k, a, c=None))]
    fn even_family(k: u32, a: f64, c: Option<f64>) -> PyResult<Self> {
        let inner = match c {
            Some(c) => CoreSurface::even_family_with_c(k, a, c),
            None => CoreSurface::even_family(k, a),
        };
        Ok(Surface {
            inner: inner.or_raise()?,
        })
    }

    #[staticmethod]
    fn weber_family(gamma: u32, c: f64, a: Vec<f64>) -> PyResult<Self> {
        Ok(Surface {
            inner: CoreSurface::weber_family(gamma, c, &a).or_raise()?,
        })
    }

    #[staticmethod]
    fn catenoid() -> Self {
        Surface {
            inner: CoreSurface::catenoid(),
        }
    }

    /// Read a parameter file written by the command line tool.
    #[staticmethod]
    fn from_params(path: PathBuf) -> PyResult<Self> {
        let text =
            std::fs::read_to_string(&path).map_err(|e| MsforgeError::new_err(e.to_string()))?;
        let p: SolvedParams =
            serde_json::from_str(&text).map_err(|e| MsforgeError::new_err(e.to_string()))?;
        Ok(Surface {
            inner: p.surface().or_raise()?,
        })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.name()
    }

    #[getter]
    fn param(&self) -> u32 {
        self.inner.param
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn a(&self) -> Vec<f64> {
        self.inner.a.clone()
    }

    #[getter]
    fn genus(&self) -> u32 {
        self.inner.genus()
    }

    #[getter]
    fn deg_g(&self) -> PyResult<u32> {
        self.inner.curve.degree(&self.inner.data.g).or_raise()
    }

    /// Largest period residual over the generating cycles.
    fn closure_residual(&self, py: Python<'_>) -> PyResult<f64> {
        let s = &self.inner;
        py.detach(|| closure_residual(s)).or_raise()
    }

    /// Per-cycle period residuals and the residues at the punctures.
    #[pyo3(signature = (tol=1e-8))]
    fn verify_periods<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        let r = py
            .detach(|| verify_periods(&s.curve, &s.data, &s.generators()?, tol))
            .or_raise()?;
        to_py(py, &r)
    }

    /// End multiplicities, kinds, limit normals and residues.
    fn end_orders<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &end_orders(&self.inner.data, &self.inner.curve).or_raise()?,
        )
    }

    /// Both sides of the Jorge-Meeks identity for this surface.
    fn jorge_meeks<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        let ends = end_orders(&s.data, &s.curve).or_raise()?;
        let deg = s.curve.degree(&s.data.g).or_raise()?;
        to_py(py, &jorge_meeks_check(s.genus(), &ends.d_profile(), deg))
    }

    #[pyo3(signature = (levels=2))]
    fn total_curvature<'py>(&self, py: Python<'py>, levels: usize) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        let r = py
            .detach(|| geometry::total_curvature(&s.data, &s.curve, levels))
            .or_raise()?;
        to_py(py, &r)
    }

    /// The immersion at `(z, w)`; `w` defaults to the principal branch.
    #[pyo3(signature = (z, w=None))]
    fn f(
        &self,
        z: msforge_core::Complex64,
        w: Option<msforge_core::Complex64>,
    ) -> PyResult<[f64; 3]> {
        let imm = Immersion::new(&self.inner).or_raise()?;
        let w = w.unwrap_or_else(|| self.inner.curve.principal_w(z));
        imm.f(z, w).or_raise()
    }

    /// Order of the symmetry group and the deviation of each element.
    #[pyo3(signature = (samples=200, seed=1))]
    fn symmetries<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        let reports = py
            .detach(|| {
                let imm = Immersion::new(s)?;
                let gens = family_symmetries(s)
                    .iter()
                    .map(|op| calibrate(&imm, op))
                    .collect::<msforge_core::Result<Vec<_>>>()?;
                let group = symmetry_group(&gens)?;
                symmetry_check_many(&imm, &group, samples, seed)
            })
            .or_raise()?;
        to_py(py, &reports)
    }

    #[pyo3(signature = (radial=64, angular=64, range=None, force=false))]
    fn mesh(
        &self,
        py: Python<'_>,
        radial: usize,
        angular: usize,
        range: Option<(f64, f64)>,
        force: bool,
    ) -> PyResult<Mesh> {
        let opts = MeshOptions {
            radial,
            angular,
            range,
            force,
            ..Default::default()
        };
        let s = &self.inner;
        let inner = py.detach(|| build_mesh(s, &opts)).or_raise()?;
        Ok(Mesh { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface({}, param={}, c={}, a={:?})",
            self.inner.family.name(),
            self.inner.param,
            self.inner.c,
            self.inner.a
        )
    }
}

/// A triangulated surface with per-vertex normals.
#[pyclass(module = "msforge", frozen)]
struct Mesh {
    inner: SurfaceMesh,
}

#[pymethods]
impl Mesh {
    #[getter]
    fn vertices(&self) -> Vec<[f64; 3]> {
        self.inner.vertices.clone()
    }

    #[getter]
    fn faces(&self) -> Vec<[usize; 3]> {
        self.inner.faces.clone()
    }

    #[getter]
    fn normals(&self) -> Vec<[f64; 3]> {
        self.inner.gauss_map.clone()
    }

    #[getter]
    fn conformal_factor(&self) -> Vec<f64> {
        self.inner.conformal_factor.clone()
    }

    fn max_edge_length(&self) -> f64 {
        self.inner.max_edge_length()
    }

    /// Discrete mean curvature per vertex, `None` on the boundary.
    fn mean_curvature(&self) -> Vec<Option<f64>> {
        geometry::discrete_mean_curvature(&self.inner)
    }

    fn write_obj(&self, path: PathBuf) -> PyResult<()> {
        geometry::export_obj(&self.inner, &path).or_raise()
    }

    fn write_ply(&self, path: PathBuf) -> PyResult<()> {
        let file =
            std::fs::File::create(&path).map_err(|e| MsforgeError::new_err(e.to_string()))?;
        geometry::write_ply(&self.inner, std::io::BufWriter::new(file)).or_raise()
    }

    fn __len__(&self) -> usize {
        self.inner.faces.len()
    }
}

/// Solve the genus family; returns the surface and its period residual.
#[pyfunction]
fn solve_genus(gamma: u32) -> PyResult<(Surface, f64)> {
    let (inner, r) = periods::solve_genus_family(gamma).or_raise()?;
    Ok((Surface { inner }, r))
}

/// Solve the even family for `a`; returns the surface and `F(a)`.
#[pyfunction]
#[pyo3(signature = (k, tol=1e-12))]
fn solve_even(py: Python<'_>, k: u32, tol: f64) -> PyResult<(Surface, f64)> {
    let sol = py.detach(|| periods::solve_a(k, tol)).or_raise()?;
    Ok((
        Surface {
            inner: CoreSurface::even_family(k, sol.a).or_raise()?,
        },
        sol.defect,
    ))
}

/// Solve the Weber family; returns the surface and the period residual.
#[pyfunction]
#[pyo3(signature = (gamma, tol=1e-10))]
fn solve_weber(py: Python<'_>, gamma: u32, tol: f64) -> PyResult<(Surface, f64)> {
    let sol = py
        .detach(|| periods::weber_solve(gamma, tol, None))
        .or_raise()?;
    Ok((
        Surface {
            inner: CoreSurface::weber_family(gamma, sol.c, &sol.a).or_raise()?,
        },
        sol.residual,
    ))
}

/// `F(a)` for the even family.
#[pyfunction]
fn even_defect(k: u32, a: f64) -> PyResult<f64> {
    periods::even_family_defect(k, a).or_raise()
}

/// The ramification tables for `γ ≤ max_gamma`.
#[pyfunction]
#[pyo3(signature = (max_gamma=60))]
fn classification_tables<'py>(py: Python<'py>, max_gamma: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &tables(max_gamma).or_raise()?)
}

/// Aligned text of every table, restricted to one genus when given.
#[pyfunction]
#[pyo3(signature = (gamma=None, max_gamma=60))]
fn render_tables(gamma: Option<u32>, max_gamma: u32) -> PyResult<String> {
    let top = gamma.unwrap_or(max_gamma);
    let mut out = String::new();
    for mut t in tables(top).or_raise()? {
        if let Some(g) = gamma {
            t.rows.retain(|r| r.gamma == g);
        }
        out += &render_table(&t);
        out.push('\n');
    }
    Ok(out)
}

#[pyfunction]
fn candidates<'py>(py: Python<'py>, gamma: u32, d: (u32, u32)) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &candidate_catalog(gamma, d).or_raise()?)
}

/// Obstruction report for one excluded case on its default grid.
#[pyfunction]
fn nonexistence<'py>(py: Python<'py>, case: &str) -> PyResult<Bound<'py, PyAny>> {
    let c = NonexistenceCase::parse(case).or_raise()?;
    let r = py
        .detach(|| periods::nonexistence_report(c, &c.default_grid()))
        .or_raise()?;
    to_py(py, &r)
}

#[pyfunction]
fn nonexistence_cases() -> Vec<&'static str> {
    NonexistenceCase::ALL.iter().map(|c| c.name()).collect()
}

#[pymodule]
fn msforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MsforgeError", m.py().get_type::<MsforgeError>())?;
    m.add(
        "NoConvergenceError",
        m.py().get_type::<NoConvergenceError>(),
    )?;
    m.add_class::<Surface>()?;
    m.add_class::<Mesh>()?;
    m.add_function(wrap_pyfunction!(solve_genus, m)?)?;
    m.add_function(wrap_pyfunction!(solve_even, m)?)?;
    m.add_function(wrap_pyfunction!(solve_weber, m)?)?;
    m.add_function(wrap_pyfunction!(even_defect, m)?)?;
    m.add_function(wrap_pyfunction!(classification_tables, m)?)?;
    m.add_function(wrap_pyfunction!(render_tables, m)?)?;
    m.add_function(wrap_pyfunction!(candidates, m)?)?;
    m.add_function(wrap_pyfunction!(nonexistence, m)?)?;
    m.add_function(wrap_pyfunction!(nonexistence_cases, m)?)?;
    Ok(())
}
