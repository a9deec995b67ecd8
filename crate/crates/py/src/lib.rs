//! Python bindings: scenes, run configurations, the planner and a few
//! geometric helpers. Import as `sss_delta`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sss_delta::footprint::{exact_footprint, DeltaRobot};
use sss_delta::geom::{dist_se3, Configuration, Point3, Quaternion};
use sss_delta::io::{parse_scene, ResultFile, RunConfig};
use sss_delta::oracle::configuration_clearance;
use sss_delta::planner::{self, PlannerOptions, SplitPolicy, Strategy, Verdict};
use sss_delta::predicate::ObstacleSet;

fn err(e: sss_delta::Error) -> PyErr {
    match e {
        sss_delta::Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn read(path: &str) -> PyResult<String> {
    std::fs::read_to_string(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))
}

/// Rigid placement: translation `t` and unit quaternion `q = (w, x, y, z)`.
#[pyclass(name = "Configuration", from_py_object)]
#[derive(Clone, Copy)]
struct PyConfiguration {
    inner: Configuration,
}

#[pymethods]
impl PyConfiguration {
    /// The quaternion is normalized; a zero quaternion is rejected.
    #[new]
    #[pyo3(signature = (t, q = [1.0, 0.0, 0.0, 0.0]))]
    fn new(t: [f64; 3], q: [f64; 4]) -> PyResult<Self> {
        let q = Quaternion::new(q[0], q[1], q[2], q[3]).normalized().map_err(err)?;
        Ok(PyConfiguration { inner: Configuration::new(Point3::from_array(t), q) })
    }

    #[getter]
    fn t(&self) -> [f64; 3] {
        self.inner.t.to_array()
    }

    #[getter]
    fn q(&self) -> [f64; 4] {
        self.inner.r.to_array()
    }

    /// Linear in translation, shortest-arc in rotation.
    fn interpolate(&self, other: &PyConfiguration, s: f64) -> PyConfiguration {
        PyConfiguration { inner: self.inner.interpolate(&other.inner, s) }
    }

    /// Translation distance plus rotation angle.
    fn distance(&self, other: &PyConfiguration) -> PyResult<f64> {
        dist_se3(&self.inner, &other.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        let (t, q) = (self.t(), self.q());
        format!("Configuration(t={t:?}, q={q:?})")
    }
}

/// The triangle robot `A = (s, 0, 0)`, `O = 0`, `B = (0, s, 0)`.
#[pyclass(name = "Robot", from_py_object)]
#[derive(Clone, Copy)]
struct PyRobot {
    inner: DeltaRobot,
}

#[pymethods]
impl PyRobot {
    #[new]
    #[pyo3(signature = (scale = 1.0))]
    fn new(scale: f64) -> PyResult<Self> {
        Ok(PyRobot { inner: DeltaRobot::scaled(scale).map_err(err)? })
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    /// World positions of `A`, `O`, `B` at configuration `g`.
    fn footprint(&self, g: &PyConfiguration) -> [[f64; 3]; 3] {
        exact_footprint(&g.inner, &self.inner).map(Point3::to_array)
    }
}

/// Polyhedral obstacle set with its boundary features.
#[pyclass(name = "Scene")]
struct PyScene {
    obstacles: ObstacleSet,
}

#[pymethods]
impl PyScene {
    /// Parse an OFF or JSON scene from text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyScene> {
        let obstacles = parse_scene(text).and_then(|s| s.obstacles()).map_err(err)?;
        Ok(PyScene { obstacles })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<PyScene> {
        PyScene::parse(&read(path)?)
    }

    #[getter]
    fn num_features(&self) -> usize {
        self.obstacles.features.len()
    }

    #[getter]
    fn num_triangles(&self) -> usize {
        self.obstacles.triangles.len()
    }

    fn contains_point(&self, p: [f64; 3]) -> bool {
        self.obstacles.contains_point(Point3::from_array(p))
    }

    /// Distance from the robot at `g` to the obstacles, capped at `cap`
    /// (0 when touching or inside).
    #[pyo3(signature = (g, robot, cap = 10.0))]
    fn clearance(&self, g: &PyConfiguration, robot: &PyRobot, cap: f64) -> f64 {
        configuration_clearance(&g.inner, &robot.inner, &self.obstacles, cap)
    }
}

/// Outcome of one planner run.
#[pyclass(name = "PlanResult")]
struct PyPlanResult {
    #[pyo3(get)]
    verdict: String,
    #[pyo3(get)]
    path: Vec<PyConfiguration>,
    #[pyo3(get)]
    channel_length: usize,
    json: String,
    stats: sss_delta::planner::Stats,
}

#[pymethods]
impl PyPlanResult {
    #[getter]
    fn found(&self) -> bool {
        self.verdict == "PATH"
    }

    /// Counters of the run as a dict.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = &self.stats;
        let d = PyDict::new(py);
        for (k, v) in [
            ("expanded", s.expanded),
            ("created", s.created),
            ("free", s.free),
            ("stuck", s.stuck),
            ("mixed", s.mixed),
            ("retired", s.retired),
            ("t_splits", s.t_splits),
            ("r_splits", s.r_splits),
            ("audits", s.audits),
        ] {
            d.set_item(k, v)?;
        }
        d.set_item("max_t_depth", s.max_t_depth)?;
        d.set_item("max_r_depth", s.max_r_depth)?;
        d.set_item("elapsed_ms", s.elapsed_ms)?;
        Ok(d)
    }

    /// The result file contents (verdict, path, stats, constants).
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!("PlanResult({}, {} configurations, {} boxes)", self.verdict, self.path.len(), self.stats.created)
    }
}

/// Run the planner on a scene with a JSON run configuration (text).
/// Keyword arguments override the configuration.
#[pyfunction]
#[pyo3(signature = (scene, config, epsilon = None, strategy = None, split = None, max_rot_depth = None, max_boxes = None, audit = false))]
#[allow(clippy::too_many_arguments)]
fn plan(
    py: Python<'_>,
    scene: &PyScene,
    config: &str,
    epsilon: Option<f64>,
    strategy: Option<&str>,
    split: Option<&str>,
    max_rot_depth: Option<u32>,
    max_boxes: Option<usize>,
    audit: bool,
) -> PyResult<PyPlanResult> {
    let mut cfg = RunConfig::parse(config).map_err(err)?;
    if let Some(e) = epsilon {
        cfg.epsilon = e;
    }
    if let Some(s) = strategy {
        cfg.strategy = s.parse::<Strategy>().map_err(err)?;
    }
    if let Some(s) = split {
        cfg.split = s.parse::<SplitPolicy>().map_err(err)?;
    }
    cfg.max_rot_depth = max_rot_depth.or(cfg.max_rot_depth);
    cfg.max_boxes = max_boxes.or(cfg.max_boxes);
    let (input, opts, _warnings) = cfg.planner_input(scene.obstacles.clone(), audit).map_err(err)?;
    let opts = PlannerOptions { audit, ..opts };
    let (res, _) = py.detach(|| planner::plan(input, opts)).map_err(err)?;
    Ok(PyPlanResult {
        verdict: match res.verdict {
            Verdict::Path => "PATH".into(),
            Verdict::NoPath => "NO-PATH".into(),
        },
        path: res.path.iter().map(|&g| PyConfiguration { inner: g }).collect(),
        channel_length: res.channel.len(),
        json: ResultFile::new(&res).to_json(),
        stats: res.stats,
    })
}

/// Read a configuration file and run `plan`.
#[pyfunction]
#[pyo3(signature = (scene_path, config_path, audit = false))]
fn plan_files(py: Python<'_>, scene_path: &str, config_path: &str, audit: bool) -> PyResult<PyPlanResult> {
    let scene = PyScene::load(scene_path)?;
    plan(py, &scene, &read(config_path)?, None, None, None, None, None, audit)
}

/// `L0`, `C0`, `D0`, `sigma` and `K = L0 C0 D0 sigma`.
#[pyfunction]
fn constants(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("L0", planner::L0)?;
    d.set_item("C0", planner::C0)?;
    d.set_item("D0", planner::D0)?;
    d.set_item("sigma", planner::SIGMA)?;
    d.set_item("K", planner::resolution_constant())?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "sss_delta")]
fn sss_delta_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfiguration>()?;
    m.add_class::<PyRobot>()?;
    m.add_class::<PyScene>()?;
    m.add_class::<PyPlanResult>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(plan_files, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    Ok(())
}
