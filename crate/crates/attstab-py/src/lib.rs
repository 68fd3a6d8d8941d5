//! Python bindings for the attitude-stability toolkit: ratio construction,
//! stability classification, closed-form eigenvalues, Lyapunov solutions,
//! simulation, and stability-region sweeps.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyList};

use attstab::control::{simulate as simulate_rs, SaturatedFeedback};
use attstab::lyapunov::{
    constraint_residual as constraint_residual_rs, find_positive_definite as find_pd_rs,
    solution_family as solution_family_rs, special_solution as special_solution_rs, AlphaParams,
    LyapunovSolution, PdSearch,
};
use attstab::model::{
    build_system as build_system_rs, sigmas_from_beta as sigmas_from_beta_rs, OrbitalRate,
    SigmaTriple, SpacecraftInertia,
};
use attstab::smallmat::Matrix;
use attstab::stability::{
    classify as classify_rs, classify_numeric as classify_numeric_rs,
    closed_form_eigenvalues as eigs_rs, phis as phis_rs, DEFAULT_TOL,
};

fn err(e: attstab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn inertia(jx: f64, jy: f64, jz: f64) -> PyResult<SpacecraftInertia> {
    SpacecraftInertia::new(jx, jy, jz).map_err(err)
}

fn rate(omega0: f64) -> PyResult<OrbitalRate> {
    OrbitalRate::new(omega0).map_err(err)
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Dimensionless inertia ratios (sigma1, sigma2, sigma3) of a rigid body.
#[pyfunction]
fn sigmas(jx: f64, jy: f64, jz: f64) -> PyResult<(f64, f64, f64)> {
    let s = inertia(jx, jy, jz)?.sigmas();
    Ok((s.sigma1, s.sigma2, s.sigma3))
}

/// Ratios from the shape scalars beta1 = Jx/Jy and beta2 = Jy/Jz.
#[pyfunction]
fn sigmas_from_beta(beta1: f64, beta2: f64) -> PyResult<(f64, f64, f64)> {
    let s = sigmas_from_beta_rs(beta1, beta2).map_err(err)?;
    Ok((s.sigma1, s.sigma2, s.sigma3))
}

/// Circular-orbit rate sqrt(mu/r^3) in rad/s for a semimajor axis in meters.
#[pyfunction]
fn orbital_rate(r: f64) -> PyResult<f64> {
    Ok(OrbitalRate::from_semimajor(r).map_err(err)?.omega0())
}

/// The stability condition quantities (phi1, phi2, delta).
#[pyfunction]
fn phis(sigma1: f64, sigma2: f64, sigma3: f64) -> (f64, f64, f64) {
    let p = phis_rs(&SigmaTriple::new(sigma1, sigma2, sigma3));
    (p.phi1, p.phi2, p.delta)
}

fn classify_dict<'py>(py: Python<'py>, s: &SigmaTriple, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let p = phis_rs(s);
    let c = classify_rs(s, tol);
    let d = PyDict::new(py);
    d.set_item("sigma", (s.sigma1, s.sigma2, s.sigma3))?;
    d.set_item("phi1", p.phi1)?;
    d.set_item("phi2", p.phi2)?;
    d.set_item("delta", p.delta)?;
    d.set_item("class", c.verdict.as_str())?;
    d.set_item("boundary", c.boundary)?;
    Ok(d)
}

/// Predicate-based stability classification of a ratio triple.
#[pyfunction]
#[pyo3(signature = (sigma1, sigma2, sigma3, tol=DEFAULT_TOL))]
fn classify<'py>(
    py: Python<'py>,
    sigma1: f64,
    sigma2: f64,
    sigma3: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    classify_dict(py, &SigmaTriple::new(sigma1, sigma2, sigma3), tol)
}

/// Classification of an inertia triple.
#[pyfunction]
#[pyo3(signature = (jx, jy, jz, tol=DEFAULT_TOL))]
fn classify_inertia<'py>(
    py: Python<'py>,
    jx: f64,
    jy: f64,
    jz: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    classify_dict(py, &inertia(jx, jy, jz)?.sigmas(), tol)
}

/// Independent numeric classification (root finder plus rank tests) of the
/// concrete system matrix at the given orbital rate.
#[pyfunction]
#[pyo3(signature = (jx, jy, jz, omega0, tol=DEFAULT_TOL))]
fn classify_numeric(jx: f64, jy: f64, jz: f64, omega0: f64, tol: f64) -> PyResult<(String, bool)> {
    let sys = build_system_rs(&inertia(jx, jy, jz)?, &rate(omega0)?);
    let c = classify_numeric_rs(&sys, tol).map_err(err)?;
    Ok((c.verdict.as_str().to_string(), c.boundary))
}

/// The six closed-form eigenvalues as Python complex numbers.
#[pyfunction]
fn eigenvalues<'py>(
    py: Python<'py>,
    jx: f64,
    jy: f64,
    jz: f64,
    omega0: f64,
) -> PyResult<Bound<'py, PyList>> {
    let eigs = eigs_rs(&inertia(jx, jy, jz)?.sigmas(), &rate(omega0)?).map_err(err)?;
    let items: Vec<Bound<'py, PyComplex>> = eigs
        .values()
        .iter()
        .map(|v| PyComplex::from_doubles(py, v.re, v.im))
        .collect();
    PyList::new(py, items)
}

/// The state matrix A and input matrix B as nested lists.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn system_matrices(
    jx: f64,
    jy: f64,
    jz: f64,
    omega0: f64,
) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let sys = build_system_rs(&inertia(jx, jy, jz)?, &rate(omega0)?);
    Ok((matrix_rows(sys.a()), matrix_rows(sys.b())))
}

/// Residual of the solution-family parameter constraint.
#[pyfunction]
fn constraint_residual(
    jx: f64,
    jy: f64,
    jz: f64,
    alpha1: f64,
    alpha3: f64,
    alpha13: f64,
) -> PyResult<f64> {
    Ok(constraint_residual_rs(
        &inertia(jx, jy, jz)?,
        alpha1,
        alpha3,
        alpha13,
    ))
}

fn solution_dict<'py>(py: Python<'py>, sol: &LyapunovSolution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let a = sol.params();
    d.set_item("alpha", (a.alpha1, a.alpha2, a.alpha3, a.alpha13))?;
    d.set_item("p1", matrix_rows(sol.p1()))?;
    d.set_item("p2", matrix_rows(sol.p2()))?;
    d.set_item("p3", matrix_rows(sol.p3()))?;
    d.set_item("p", matrix_rows(sol.p()))?;
    d.set_item("is_pd", sol.is_pd())?;
    d.set_item("residual", sol.residual())?;
    Ok(d)
}

/// A member of the solution family for explicit parameters
/// (alpha1 must satisfy the constraint).
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn solution_family<'py>(
    py: Python<'py>,
    jx: f64,
    jy: f64,
    jz: f64,
    omega0: f64,
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    alpha13: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sol = solution_family_rs(
        &inertia(jx, jy, jz)?,
        &rate(omega0)?,
        &AlphaParams::new(alpha1, alpha2, alpha3, alpha13),
    )
    .map_err(err)?;
    solution_dict(py, &sol)
}

/// The diagonal special member with alpha13 = 0.
#[pyfunction]
#[pyo3(signature = (jx, jy, jz, omega0, alpha2=1.0, alpha3=1.0))]
fn special_solution<'py>(
    py: Python<'py>,
    jx: f64,
    jy: f64,
    jz: f64,
    omega0: f64,
    alpha2: f64,
    alpha3: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sol =
        special_solution_rs(&inertia(jx, jy, jz)?, &rate(omega0)?, alpha2, alpha3).map_err(err)?;
    solution_dict(py, &sol)
}

/// Deterministic search for a positive definite family member; returns the
/// solution dict or None when the scan finds nothing.
#[pyfunction]
fn find_positive_definite<'py>(
    py: Python<'py>,
    jx: f64,
    jy: f64,
    jz: f64,
    omega0: f64,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    match find_pd_rs(&inertia(jx, jy, jz)?, &rate(omega0)?).map_err(err)? {
        PdSearch::Found(sol) => Ok(Some(solution_dict(py, &sol)?)),
        PdSearch::NotFound(_) => Ok(None),
    }
}

/// RK4 simulation; with feedback=True a positive definite weight is searched,
/// rescaled to unit norm, and used in the saturated law u = sat(-kappa B^T P x).
#[pyfunction]
#[pyo3(signature = (jx, jy, jz, omega0, x0, dt, horizon, kappa=1.0, umax=(0.1, 0.1, 0.1), feedback=true))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    jx: f64,
    jy: f64,
    jz: f64,
    omega0: f64,
    x0: [f64; 6],
    dt: f64,
    horizon: f64,
    kappa: f64,
    umax: (f64, f64, f64),
    feedback: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let j = inertia(jx, jy, jz)?;
    let w = rate(omega0)?;
    let sys = build_system_rs(&j, &w);
    let weight = match find_pd_rs(&j, &w) {
        Ok(PdSearch::Found(sol)) => Some(sol.p().scale(1.0 / sol.p().inf_norm())),
        Ok(PdSearch::NotFound(_)) | Err(attstab::Error::Degenerate(_)) => None,
        Err(e) => return Err(err(e)),
    };
    let fb = match (&weight, feedback) {
        (Some(p), true) => {
            Some(SaturatedFeedback::new(p.clone(), kappa, [umax.0, umax.1, umax.2]).map_err(err)?)
        }
        _ => None,
    };
    let traj = simulate_rs(&sys, fb.as_ref(), weight.as_ref(), x0, dt, horizon).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", &traj.times)?;
    d.set_item(
        "states",
        traj.states.iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "controls",
        traj.controls.iter().map(|u| u.to_vec()).collect::<Vec<_>>(),
    )?;
    d.set_item("energies", &traj.energies)?;
    d.set_item("closed_loop", fb.is_some())?;
    Ok(d)
}

/// Verdict map over a (beta1, beta2) window: returns a dict with the grid
/// axes and rows of verdict strings, max beta2 first (image convention).
#[pyfunction]
#[pyo3(signature = (b1min=0.3, b1max=2.5, b2min=0.3, b2max=2.5, n1=100, n2=100, tol=DEFAULT_TOL))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    b1min: f64,
    b1max: f64,
    b2min: f64,
    b2max: f64,
    n1: usize,
    n2: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n <= 1 {
            vec![lo]
        } else {
            (0..n)
                .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let b1 = axis(b1min, b1max, n1);
    let b2 = axis(b2min, b2max, n2);
    let result = attstab::cli::run_sweep(b1.clone(), b2.clone(), tol, 0).map_err(err)?;
    let mut rows: Vec<Vec<&'static str>> = Vec::with_capacity(n2);
    for r in 0..result.n2() {
        let i2 = result.n2() - 1 - r;
        rows.push(
            (0..result.n1())
                .map(|i1| result.cell(i1, i2).verdict.as_str())
                .collect(),
        );
    }
    let d = PyDict::new(py);
    d.set_item("beta1", b1)?;
    d.set_item("beta2", b2)?;
    d.set_item("classes", rows)?;
    Ok(d)
}

#[pymodule]
fn attstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MU_EARTH", attstab::model::MU_EARTH)?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    m.add_function(wrap_pyfunction!(sigmas, m)?)?;
    m.add_function(wrap_pyfunction!(sigmas_from_beta, m)?)?;
    m.add_function(wrap_pyfunction!(orbital_rate, m)?)?;
    m.add_function(wrap_pyfunction!(phis, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(classify_inertia, m)?)?;
    m.add_function(wrap_pyfunction!(classify_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(system_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(constraint_residual, m)?)?;
    m.add_function(wrap_pyfunction!(solution_family, m)?)?;
    m.add_function(wrap_pyfunction!(special_solution, m)?)?;
    m.add_function(wrap_pyfunction!(find_positive_definite, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
