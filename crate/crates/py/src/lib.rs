//! Python bindings: apparatus configuration, triality reports, scenario
//! files, and screen sampling.

use std::collections::HashMap;
use std::str::FromStr;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use eraser_core::linalg::ComplexMat;
use eraser_core::metrics::{closed_form_triality, evolved_triality, triality_pair, Route};
use eraser_core::model::{detect_all, evolve, ApparatusConfig, Detector};
use eraser_core::run::{run_screen, run_sweep, sweep_csv};
use eraser_core::scenario::{parse_scenario, render_diagnostics, serialize_scenario, Scenario};
use eraser_core::screen::fringe_profile;
use eraser_core::{Error, TrialityReport};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::ZeroProbability(_) => PyValueError::new_err(e.to_string()),
        Error::Contract(_) | Error::Dimension(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_detector(s: &str) -> PyResult<Detector> {
    Detector::from_str(s).map_err(to_py_err)
}

fn mat_to_rows(m: &ComplexMat) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn rows_to_mat(rows: &[Vec<Complex64>]) -> PyResult<ComplexMat> {
    ComplexMat::from_rows(rows).map_err(to_py_err)
}

/// Predictability, visibility, concurrence and distinguishability of one
/// conditional state, with the identity residuals.
#[pyclass(name = "TrialityReport", frozen)]
struct PyTrialityReport {
    #[pyo3(get)]
    p: f64,
    #[pyo3(get)]
    v: f64,
    #[pyo3(get)]
    c: f64,
    #[pyo3(get)]
    d: f64,
    #[pyo3(get)]
    purity: f64,
    #[pyo3(get)]
    residual_triality: f64,
    #[pyo3(get)]
    residual_duality_purity: f64,
    #[pyo3(get)]
    residual_distinguishability: f64,
    #[pyo3(get)]
    route: String,
}

impl From<TrialityReport> for PyTrialityReport {
    fn from(r: TrialityReport) -> Self {
        Self {
            p: r.p,
            v: r.v,
            c: r.c,
            d: r.d,
            purity: r.purity,
            residual_triality: r.residual_triality,
            residual_duality_purity: r.residual_duality_purity,
            residual_distinguishability: r.residual_distinguishability,
            route: match r.route {
                Route::Evolved => "evolved".into(),
                Route::ClosedForm => "closed_form".into(),
            },
        }
    }
}

#[pymethods]
impl PyTrialityReport {
    fn __repr__(&self) -> String {
        format!(
            "TrialityReport(route={:?}, p={}, v={}, c={}, d={}, purity={})",
            self.route, self.p, self.v, self.c, self.d, self.purity
        )
    }
}

/// One Monte Carlo screen run: analytic profile plus sampled estimate.
#[pyclass(name = "ScreenSample", frozen)]
struct PyScreenSample {
    #[pyo3(get)]
    analytic_v: f64,
    #[pyo3(get)]
    analytic_offset: f64,
    #[pyo3(get)]
    estimated_v: f64,
    #[pyo3(get)]
    estimated_v_stderr: f64,
    #[pyo3(get)]
    estimated_offset: f64,
    #[pyo3(get)]
    agrees_3sigma: bool,
    #[pyo3(get)]
    positions: Vec<f64>,
    #[pyo3(get)]
    histogram: Vec<u64>,
}

/// All free parameters of the apparatus, built from squared moduli and
/// optional phases (radians).
#[pyclass(name = "ApparatusConfig", frozen)]
struct PyApparatusConfig {
    inner: ApparatusConfig,
}

#[pymethods]
impl PyApparatusConfig {
    #[new]
    #[pyo3(signature = (c1_sq, r1_sq, r2_sq, r3_sq, q_abs, *,
        c1_phase = 0.0, c2_phase = 0.0,
        r1_phase = 0.0, t1_phase = 0.0,
        r2_phase = 0.0, t2_phase = 0.0,
        r3_phase = 0.0, t3_phase = 0.0,
        q_phase = 0.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        c1_sq: f64,
        r1_sq: f64,
        r2_sq: f64,
        r3_sq: f64,
        q_abs: f64,
        c1_phase: f64,
        c2_phase: f64,
        r1_phase: f64,
        t1_phase: f64,
        r2_phase: f64,
        t2_phase: f64,
        r3_phase: f64,
        t3_phase: f64,
        q_phase: f64,
    ) -> PyResult<Self> {
        for (name, v) in [
            ("c1_sq", c1_sq),
            ("r1_sq", r1_sq),
            ("r2_sq", r2_sq),
            ("r3_sq", r3_sq),
            ("q_abs", q_abs),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(PyValueError::new_err(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        let amp = eraser_core::model::amp_from_sq;
        let inner = ApparatusConfig::new(
            amp(c1_sq, c1_phase),
            amp(1.0 - c1_sq, c2_phase),
            amp(r1_sq, r1_phase),
            amp(1.0 - r1_sq, t1_phase),
            amp(r2_sq, r2_phase),
            amp(1.0 - r2_sq, t2_phase),
            amp(r3_sq, r3_phase),
            amp(1.0 - r3_sq, t3_phase),
            Complex64::from_polar(q_abs, q_phase),
        )
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Symmetric source, mirrors, 50:50 recombiner, identical polarizers.
    #[staticmethod]
    fn conventional_eraser() -> Self {
        Self {
            inner: ApparatusConfig::conventional_eraser(),
        }
    }

    /// Click probabilities for D1..D4 as a dict.
    fn detector_probabilities(&self) -> PyResult<HashMap<String, f64>> {
        let outcomes = detect_all(&evolve(&self.inner).map_err(to_py_err)?).map_err(to_py_err)?;
        Ok(outcomes
            .iter()
            .map(|o| (o.detector.to_string(), o.probability))
            .collect())
    }

    /// Triality report for one detector branch.
    #[pyo3(signature = (detector, route = "evolved"))]
    fn triality(&self, detector: &str, route: &str) -> PyResult<PyTrialityReport> {
        let det = parse_detector(detector)?;
        let report = match route {
            "evolved" => evolved_triality(&self.inner, det),
            "closed_form" => closed_form_triality(&self.inner, det),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown route {other:?} (expected 'evolved' or 'closed_form')"
                )))
            }
        }
        .map_err(to_py_err)?;
        Ok(report.into())
    }

    /// Largest metric difference between the two routes.
    fn route_discrepancy(&self, detector: &str) -> PyResult<f64> {
        let det = parse_detector(detector)?;
        let (_, _, disc) = triality_pair(&self.inner, det).map_err(to_py_err)?;
        Ok(disc)
    }

    /// Conditional 2×2 path state behind a detector, as nested lists of
    /// complex numbers.
    fn conditional_rho_gamma(&self, detector: &str) -> PyResult<Vec<Vec<Complex64>>> {
        let det = parse_detector(detector)?;
        let outcome = eraser_core::model::detect(&evolve(&self.inner).map_err(to_py_err)?, det)
            .map_err(to_py_err)?;
        match outcome.rho_gamma {
            Some(rho) => Ok(mat_to_rows(&rho)),
            None => Err(PyValueError::new_err(format!(
                "detector {det} has zero click probability; conditional state undefined"
            ))),
        }
    }

    /// Source-level path ⊗ partner-path state after tracing polarization.
    fn reduced_gamma_phi(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = eraser_core::model::reduced_gamma_phi(&self.inner).map_err(to_py_err)?;
        Ok(mat_to_rows(&rho))
    }

    /// `(V, offset)` of the fringe behind a detector, or of the
    /// unconditioned ensemble when `detector` is None.
    #[pyo3(signature = (detector = None))]
    fn fringe(&self, detector: Option<&str>) -> PyResult<(f64, f64)> {
        let rho = match detector {
            Some(d) => {
                let det = parse_detector(d)?;
                let outcome =
                    eraser_core::model::detect(&evolve(&self.inner).map_err(to_py_err)?, det)
                        .map_err(to_py_err)?;
                outcome.rho_gamma.ok_or_else(|| {
                    PyValueError::new_err(format!("detector {det} has zero click probability"))
                })?
            }
            None => eraser_core::model::unconditioned_rho_gamma(&self.inner).map_err(to_py_err)?,
        };
        let profile = fringe_profile(&rho).map_err(to_py_err)?;
        Ok((profile.analytic_v, profile.analytic_offset))
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "ApparatusConfig(c1_sq={}, r1_sq={}, r2_sq={}, r3_sq={}, q_abs={})",
            c.c1.norm_sqr(),
            c.r1.norm_sqr(),
            c.r2.norm_sqr(),
            c.r3.norm_sqr(),
            c.q.norm()
        )
    }
}

/// A parsed scenario file.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    /// Apparatus configuration at the nominal parameters.
    fn config(&self) -> PyResult<PyApparatusConfig> {
        Ok(PyApparatusConfig {
            inner: self.inner.config().map_err(to_py_err)?,
        })
    }

    /// Canonical text form.
    fn serialize(&self) -> String {
        serialize_scenario(&self.inner)
    }

    /// Sweep rows `(swept_value, P, V, C, D, p_detector)` for one detector.
    #[allow(clippy::type_complexity)]
    fn sweep_rows(&self, detector: &str) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64)>> {
        let det = parse_detector(detector)?;
        let rows = run_sweep(&self.inner, det).map_err(to_py_err)?;
        Ok(rows
            .iter()
            .map(|r| (r.swept_value, r.p, r.v, r.c, r.d, r.p_detector))
            .collect())
    }

    /// Sweep CSV with header `swept_value,P,V,C,D,p_detector`.
    fn sweep_csv(&self, detector: &str) -> PyResult<String> {
        let det = parse_detector(detector)?;
        let rows = run_sweep(&self.inner, det).map_err(to_py_err)?;
        Ok(sweep_csv(&rows))
    }

    /// Monte Carlo screen run behind a detector (or unconditioned).
    #[pyo3(signature = (detector = None))]
    fn screen(&self, detector: Option<&str>) -> PyResult<PyScreenSample> {
        let det = detector.map(parse_detector).transpose()?;
        let run = run_screen(&self.inner, det).map_err(to_py_err)?;
        Ok(PyScreenSample {
            analytic_v: run.profile.analytic_v,
            analytic_offset: run.profile.analytic_offset,
            estimated_v: run.samples.estimated_v,
            estimated_v_stderr: run.samples.estimated_v_stderr,
            estimated_offset: run.estimated_offset,
            agrees_3sigma: run.agrees_3sigma,
            positions: run.samples.positions.clone(),
            histogram: run.samples.histogram.clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(c1_sq={}, r_sq=({}, {}, {}), q_abs={}, sweep={})",
            self.inner.source.c1_sq,
            self.inner.bs[0].r_sq,
            self.inner.bs[1].r_sq,
            self.inner.bs[2].r_sq,
            self.inner.polarizer.q_abs,
            self.inner.sweep.parameter,
        )
    }
}

/// Parse scenario text; raises ValueError listing every diagnostic.
#[pyfunction]
#[pyo3(name = "parse_scenario")]
fn py_parse_scenario(text: &str) -> PyResult<PyScenario> {
    match parse_scenario(text) {
        Ok(inner) => Ok(PyScenario { inner }),
        Err(diags) => Err(PyValueError::new_err(render_diagnostics(&diags))),
    }
}

/// Built-in sweep preset (fig4a, fig4b, fig4c or fig4d).
#[pyfunction]
fn preset_scenario(name: &str) -> PyResult<PyScenario> {
    Scenario::preset(name)
        .map(|inner| PyScenario { inner })
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))
}

/// Wootters concurrence of a 4×4 two-qubit density matrix given as nested
/// lists of complex numbers.
#[pyfunction]
#[pyo3(name = "concurrence_mixed")]
fn py_concurrence_mixed(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    eraser_core::metrics::concurrence_mixed(&rows_to_mat(&rho)?).map_err(to_py_err)
}

/// Nonincreasing eigenvalues of a Hermitian matrix given as nested lists.
#[pyfunction]
#[pyo3(name = "herm_eigvals")]
fn py_herm_eigvals(m: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    rows_to_mat(&m)?.herm_eigvals().map_err(to_py_err)
}

#[pymodule]
fn eraser_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyApparatusConfig>()?;
    m.add_class::<PyTrialityReport>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyScreenSample>()?;
    m.add_function(wrap_pyfunction!(py_parse_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(preset_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(py_concurrence_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(py_herm_eigvals, m)?)?;
    Ok(())
}
