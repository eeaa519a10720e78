//! Flat `key = value` config files, one experiment per file.
//!
//! Parsing is strict: every key must belong to the schema of the chosen
//! experiment, duplicates are rejected, and every range error names the
//! offending key. A config that passes [`build`] is guaranteed to construct
//! its solver inputs without further validation errors, so `validate` can
//! share the same path and stop before any computation.

use std::collections::{BTreeMap, BTreeSet};

use hetflow_core::curve::{Curve, CurveSolverConfig, TimeStep};
use hetflow_core::forcing::{Forcing, Slope};
use hetflow_core::graph::{GraphSolverConfig, GraphState, TestFunction};
use hetflow_core::homog::EpsSweepConfig;
use hetflow_core::Vec2;

/// A rejected config; the message is printed verbatim and the process
/// exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<hetflow_core::Error> for ConfigError {
    fn from(e: hetflow_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Fully resolved run: the experiment payload plus the normalized key-value
/// echo that reproduces it.
pub struct RunConfig {
    pub experiment: String,
    pub seed: u64,
    /// Normalized config echo: exactly the accepted keys, with the resolved
    /// seed materialized. Feeding these lines back through `build` yields
    /// an identical run.
    pub echo: BTreeMap<String, String>,
    pub spec: Spec,
}

pub enum Spec {
    Curve {
        initial: Curve,
        field: Forcing,
        solver: CurveSolverConfig,
        /// Gaussian-density focus (diagnostics experiment): extinction time
        /// and center; center defaults to the initial area centroid.
        focus: Option<(f64, Vec2)>,
    },
    Graph {
        initial: GraphState,
        field: Forcing,
        solver: GraphSolverConfig,
    },
    Weak {
        initial: GraphState,
        field: Forcing,
        deltas: Vec<f64>,
        solver: GraphSolverConfig,
        tests: Vec<TestFunction>,
    },
    Homogenize {
        field: Forcing,
        sweep: EpsSweepConfig,
    },
    Speed {
        field: Forcing,
        slope: Slope,
    },
    Scan {
        field: Forcing,
        slopes: Vec<Slope>,
    },
}

/// Parse the file text and build the experiment payload. `seed_override`
/// comes from `--seed`, `jobs` from `--jobs`; both are recorded but only
/// homogenization sweeps fan out work.
pub fn build(text: &str, seed_override: Option<u64>, jobs: usize) -> Result<RunConfig> {
    let mut keys = Keys::parse(text)?;

    let experiment = keys.require("experiment")?;
    let mut seed = keys.u64_or("seed", 0)?;
    if let Some(s) = seed_override {
        seed = s;
    }

    let spec = match experiment.as_str() {
        "curve" => build_curve(&mut keys, false)?,
        "diagnostics" => build_curve(&mut keys, true)?,
        "graph" => build_graph(&mut keys)?,
        "weak" => build_weak(&mut keys)?,
        "homogenize" => build_homogenize(&mut keys, jobs)?,
        "effective-speed" => build_speed(&mut keys)?,
        "discontinuity-scan" => build_scan(&mut keys)?,
        other => {
            return Err(ConfigError(format!(
                "experiment must be one of curve, graph, weak, homogenize, \
                 effective-speed, discontinuity-scan, diagnostics; got `{other}`"
            )))
        }
    };

    let mut echo = keys.finish()?;
    echo.insert("seed".to_string(), seed.to_string());
    Ok(RunConfig {
        experiment,
        seed,
        echo,
        spec,
    })
}

fn build_curve(keys: &mut Keys, with_focus: bool) -> Result<Spec> {
    let field = parse_forcing(keys)?;
    let initial = parse_curve_shape(keys)?;
    let solver = parse_curve_solver(keys)?;
    let focus = if with_focus {
        let t_ext = keys.f64_req("diagnostics.focus_time")?;
        if !(t_ext > 0.0 && t_ext.is_finite()) {
            return Err(ConfigError(format!(
                "diagnostics.focus_time must be positive and finite, got {t_ext}"
            )));
        }
        let default_center = initial.area_centroid().unwrap_or(Vec2::new(0.0, 0.0));
        let cx = keys.f64_or("diagnostics.center_x", default_center.x)?;
        let cy = keys.f64_or("diagnostics.center_y", default_center.y)?;
        Some((t_ext, Vec2::new(cx, cy)))
    } else {
        None
    };
    Ok(Spec::Curve {
        initial,
        field,
        solver,
        focus,
    })
}

fn build_graph(keys: &mut Keys) -> Result<Spec> {
    let field = parse_forcing(keys)?;
    let initial = parse_graph_profile(keys)?;
    let solver = parse_graph_solver(keys)?;
    Ok(Spec::Graph {
        initial,
        field,
        solver,
    })
}

fn build_weak(keys: &mut Keys) -> Result<Spec> {
    let field = parse_forcing(keys)?;
    let initial = parse_graph_profile(keys)?;
    let solver = parse_graph_solver(keys)?;
    let deltas = keys.f64_list("weak.deltas")?;
    if deltas.len() < 2 {
        return Err(ConfigError(format!(
            "weak.deltas needs at least two widths, got {}",
            deltas.len()
        )));
    }
    for pair in deltas.windows(2) {
        if pair[1] >= pair[0] {
            return Err(ConfigError(format!(
                "weak.deltas must be strictly decreasing, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    for &d in &deltas {
        if !(d > 0.0 && d <= 0.5) {
            return Err(ConfigError(format!(
                "weak.deltas entries must lie in (0, 0.5], got {d}"
            )));
        }
    }
    let tests = built_in_tests(solver.max_time);
    Ok(Spec::Weak {
        initial,
        field,
        deltas,
        solver,
        tests,
    })
}

/// The fixed battery of smooth space-time test functions used to report
/// weak residuals, scaled to the run horizon T. Each is compactly
/// supported in time strictly inside (0, T).
fn built_in_tests(t: f64) -> Vec<TestFunction> {
    vec![
        TestFunction {
            t0: 0.10 * t,
            t1: 0.90 * t,
            const_term: 1.0,
            modes: vec![(1, 0.4, 0.0)],
        },
        TestFunction {
            t0: 0.05 * t,
            t1: 0.95 * t,
            const_term: 0.0,
            modes: vec![(1, 0.0, 0.8)],
        },
        TestFunction {
            t0: 0.20 * t,
            t1: 0.80 * t,
            const_term: 0.5,
            modes: vec![(2, 0.5, 0.0)],
        },
        TestFunction {
            t0: 0.10 * t,
            t1: 0.60 * t,
            const_term: 0.0,
            modes: vec![(2, 0.0, 0.6), (3, 0.2, 0.0)],
        },
        TestFunction {
            t0: 0.30 * t,
            t1: 0.90 * t,
            const_term: 1.0,
            modes: vec![(1, 0.3, 0.3)],
        },
    ]
}

fn build_homogenize(keys: &mut Keys, jobs: usize) -> Result<Spec> {
    let field = parse_forcing(keys)?;
    let cells = keys.u32_list("homogenize.cells")?;
    if cells.is_empty() {
        return Err(ConfigError("homogenize.cells must not be empty".into()));
    }
    for pair in cells.windows(2) {
        if pair[1] <= pair[0] {
            return Err(ConfigError(format!(
                "homogenize.cells must be strictly increasing, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    if cells[0] == 0 {
        return Err(ConfigError("homogenize.cells entries must be positive".into()));
    }
    let nodes_per_cell = keys.usize_or("homogenize.nodes_per_cell", 32)?;
    if nodes_per_cell < 8 {
        return Err(ConfigError(format!(
            "homogenize.nodes_per_cell must be at least 8, got {nodes_per_cell}"
        )));
    }
    let base_nodes = keys.usize_or("homogenize.base_nodes", 128)?;
    if base_nodes < 16 {
        return Err(ConfigError(format!(
            "homogenize.base_nodes must be at least 16, got {base_nodes}"
        )));
    }
    if !field.depends_on_x() {
        for &m in &cells {
            if base_nodes % (m as usize) != 0 {
                return Err(ConfigError(format!(
                    "homogenize.base_nodes must be divisible by every cell count \
                     when the forcing varies only in y; {base_nodes} is not \
                     divisible by {m}"
                )));
            }
        }
    }
    let offset = keys.f64_or("graph.offset", 0.0)?;
    let modes = keys.modes_or("graph.modes")?;
    let solver = parse_graph_solver(keys)?;
    Ok(Spec::Homogenize {
        field,
        sweep: EpsSweepConfig {
            cells,
            nodes_per_cell,
            base_nodes,
            offset,
            modes,
            solver,
            jobs: jobs.max(1),
        },
    })
}

fn build_speed(keys: &mut Keys) -> Result<Spec> {
    let field = parse_forcing(keys)?;
    let slope = match keys.require("speed.kind")?.as_str() {
        "rational" => {
            let num = keys.i64_req("speed.num")?;
            let den = keys.i64_req("speed.den")?;
            Slope::rational(num, den).map_err(|_| {
                ConfigError(format!("speed.den must be nonzero, got {den}"))
            })?
        }
        "irrational" => {
            let value = keys.f64_req("speed.value")?;
            if !value.is_finite() {
                return Err(ConfigError(format!(
                    "speed.value must be finite, got {value}"
                )));
            }
            Slope::irrational(value)
        }
        other => {
            return Err(ConfigError(format!(
                "speed.kind must be rational or irrational, got `{other}`"
            )))
        }
    };
    Ok(Spec::Speed { field, slope })
}

fn build_scan(keys: &mut Keys) -> Result<Spec> {
    let field = parse_forcing(keys)?;
    let raw = keys.require("scan.slopes")?;
    let mut slopes = Vec::new();
    for token in raw.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(ConfigError("scan.slopes has an empty entry".into()));
        }
        if let Some(rest) = token.strip_prefix('~') {
            let alpha: f64 = rest.trim().parse().map_err(|_| {
                ConfigError(format!(
                    "scan.slopes entry `{token}`: expected a number after `~`"
                ))
            })?;
            if !alpha.is_finite() {
                return Err(ConfigError(format!(
                    "scan.slopes entry `{token}` must be finite"
                )));
            }
            slopes.push(Slope::irrational(alpha));
        } else if let Some((n, d)) = token.split_once('/') {
            let num: i64 = n.trim().parse().map_err(|_| {
                ConfigError(format!("scan.slopes entry `{token}`: bad numerator"))
            })?;
            let den: i64 = d.trim().parse().map_err(|_| {
                ConfigError(format!("scan.slopes entry `{token}`: bad denominator"))
            })?;
            let slope = Slope::rational(num, den).map_err(|_| {
                ConfigError(format!(
                    "scan.slopes entry `{token}`: denominator must be nonzero"
                ))
            })?;
            slopes.push(slope);
        } else {
            return Err(ConfigError(format!(
                "scan.slopes entry `{token}` must be `p/q` (rational) or \
                 `~x` (irrational tag)"
            )));
        }
    }
    Ok(Spec::Scan { field, slopes })
}

fn parse_forcing(keys: &mut Keys) -> Result<Forcing> {
    let kind = keys.require("forcing.kind")?;
    let base = match kind.as_str() {
        "constant" => Forcing::constant(keys.f64_req("forcing.value")?),
        "sin-x" => Forcing::sin_x(keys.f64_req("forcing.amplitude")?),
        "sin-y" => Forcing::sin_y(keys.f64_req("forcing.amplitude")?),
        "offset-sin" => Forcing::offset_sin(
            keys.f64_req("forcing.offset")?,
            keys.f64_req("forcing.amplitude")?,
        ),
        "product" => Forcing::product(keys.f64_req("forcing.amplitude")?),
        "piecewise" => {
            let breaks = keys.f64_list("forcing.breaks")?;
            let values = keys.f64_list("forcing.values")?;
            Forcing::piecewise(breaks, values)
                .map_err(|e| ConfigError(format!("forcing.breaks/forcing.values: {e}")))?
        }
        other => {
            return Err(ConfigError(format!(
                "forcing.kind must be one of constant, sin-x, sin-y, offset-sin, \
                 product, piecewise; got `{other}`"
            )))
        }
    };
    let base = match keys.f64("forcing.epsilon")? {
        None => base,
        Some(eps) => {
            let m = reciprocal_integer(eps).ok_or_else(|| {
                ConfigError(format!(
                    "forcing.epsilon must be the reciprocal of a positive \
                     integer (1, 0.5, 0.25, ...), got {eps}"
                ))
            })?;
            base.rescaled_cell(m)
        }
    };
    match keys.f64("forcing.mollify")? {
        None => Ok(base),
        Some(delta) => base
            .mollify(delta)
            .map_err(|_| ConfigError(format!("forcing.mollify must lie in (0, 0.5], got {delta}"))),
    }
}

/// `Some(m)` when eps is 1/m for a positive integer m, within 1e-9.
fn reciprocal_integer(eps: f64) -> Option<u32> {
    if !(eps > 0.0 && eps <= 1.0) {
        return None;
    }
    let m = (1.0 / eps).round();
    if m < 1.0 || m > u32::MAX as f64 {
        return None;
    }
    if (m * eps - 1.0).abs() > 1e-9 {
        return None;
    }
    Some(m as u32)
}

fn parse_curve_shape(keys: &mut Keys) -> Result<Curve> {
    let shape = keys.require("curve.shape")?;
    let nodes = keys.usize_req("curve.nodes")?;
    if nodes < 8 {
        return Err(ConfigError(format!(
            "curve.nodes must be at least 8, got {nodes}"
        )));
    }
    let cx = keys.f64_or("curve.center_x", 0.0)?;
    let cy = keys.f64_or("curve.center_y", 0.0)?;
    let center = Vec2::new(cx, cy);
    match shape.as_str() {
        "circle" => {
            let radius = keys.f64_req("curve.radius")?;
            if !(radius > 0.0) {
                return Err(ConfigError(format!(
                    "curve.radius must be positive, got {radius}"
                )));
            }
            Ok(Curve::circle(center, radius, nodes))
        }
        "ellipse" => {
            let a = keys.f64_req("curve.a")?;
            let b = keys.f64_req("curve.b")?;
            if !(a > 0.0 && b > 0.0) {
                return Err(ConfigError(format!(
                    "curve.a and curve.b must be positive, got {a} and {b}"
                )));
            }
            Ok(Curve::ellipse(center, a, b, nodes))
        }
        "perturbed-circle" => {
            let radius = keys.f64_req("curve.radius")?;
            if !(radius > 0.0) {
                return Err(ConfigError(format!(
                    "curve.radius must be positive, got {radius}"
                )));
            }
            let modes = keys.modes_req("curve.modes")?;
            Ok(Curve::perturbed_circle(center, radius, &modes, nodes))
        }
        other => {
            return Err(ConfigError(format!(
                "curve.shape must be one of circle, ellipse, perturbed-circle; \
                 got `{other}`"
            )))
        }
    }
}

fn parse_graph_profile(keys: &mut Keys) -> Result<GraphState> {
    let profile = keys.require("graph.profile")?;
    let nodes = keys.usize_req("graph.nodes")?;
    if nodes < 8 {
        return Err(ConfigError(format!(
            "graph.nodes must be at least 8, got {nodes}"
        )));
    }
    let offset = keys.f64_or("graph.offset", 0.0)?;
    match profile.as_str() {
        "constant" => {
            let level = keys.f64_or("graph.level", 0.0)?;
            Ok(GraphState::constant(level, offset, nodes))
        }
        "linear" => Ok(GraphState::linear(offset, nodes)),
        "fourier" => {
            let modes = keys.modes_req("graph.modes")?;
            Ok(GraphState::fourier(offset, &modes, nodes))
        }
        other => {
            return Err(ConfigError(format!(
                "graph.profile must be one of constant, linear, fourier; got `{other}`"
            )))
        }
    }
}

/// Shared time-stepping keys. `solver.cfl` and `solver.dt` are mutually
/// exclusive; with neither present the CFL factor defaults to 0.25.
fn parse_time_step(keys: &mut Keys) -> Result<(f64, f64, TimeStep, usize)> {
    let max_time = keys.f64_req("solver.max_time")?;
    if !(max_time > 0.0 && max_time.is_finite()) {
        return Err(ConfigError(format!(
            "solver.max_time must be positive and finite, got {max_time}"
        )));
    }
    let sample_interval = keys.f64_req("solver.sample_interval")?;
    if !(sample_interval > 0.0 && sample_interval.is_finite()) {
        return Err(ConfigError(format!(
            "solver.sample_interval must be positive and finite, got {sample_interval}"
        )));
    }
    let cfl = keys.f64("solver.cfl")?;
    let dt = keys.f64("solver.dt")?;
    let step = match (cfl, dt) {
        (Some(_), Some(_)) => {
            return Err(ConfigError(
                "solver.cfl and solver.dt are mutually exclusive".into(),
            ))
        }
        (None, Some(dt)) => {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(ConfigError(format!(
                    "solver.dt must be positive and finite, got {dt}"
                )));
            }
            TimeStep::Fixed(dt)
        }
        (cfl, None) => {
            let c = cfl.unwrap_or(0.25);
            if !(c > 0.0 && c <= 0.5) {
                return Err(ConfigError(format!(
                    "solver.cfl must lie in (0, 0.5], got {c}"
                )));
            }
            TimeStep::Cfl(c)
        }
    };
    let max_steps = keys.usize_or("solver.max_steps", 0)?;
    Ok((max_time, sample_interval, step, max_steps))
}

fn parse_curve_solver(keys: &mut Keys) -> Result<CurveSolverConfig> {
    let (max_time, sample_interval, time_step, max_steps) = parse_time_step(keys)?;
    let mut cfg = CurveSolverConfig::to_time(max_time, sample_interval);
    cfg.time_step = time_step;
    if max_steps > 0 {
        cfg.max_steps = max_steps;
    }
    let kappa_stop = keys.f64_or("solver.kappa_stop", cfg.kappa_stop)?;
    if !(kappa_stop > 0.0) {
        return Err(ConfigError(format!(
            "solver.kappa_stop must be positive, got {kappa_stop}"
        )));
    }
    cfg.kappa_stop = kappa_stop;
    let msf = keys.f64_or("solver.min_segment_factor", cfg.min_segment_factor)?;
    if !(msf >= 0.0 && msf < 1.0) {
        return Err(ConfigError(format!(
            "solver.min_segment_factor must lie in [0, 1), got {msf}"
        )));
    }
    cfg.min_segment_factor = msf;
    Ok(cfg)
}

fn parse_graph_solver(keys: &mut Keys) -> Result<GraphSolverConfig> {
    let (max_time, sample_interval, time_step, max_steps) = parse_time_step(keys)?;
    let mut cfg = GraphSolverConfig::to_time(max_time, sample_interval);
    cfg.time_step = time_step;
    if max_steps > 0 {
        cfg.max_steps = max_steps;
    }
    let slope_stop = keys.f64_or("solver.slope_stop", cfg.slope_stop)?;
    if !(slope_stop > 0.0) {
        return Err(ConfigError(format!(
            "solver.slope_stop must be positive, got {slope_stop}"
        )));
    }
    cfg.slope_stop = slope_stop;
    Ok(cfg)
}

/// Key-value store with taken-key tracking; leftovers at the end are
/// unknown keys and fail the parse.
struct Keys {
    map: BTreeMap<String, String>,
    taken: BTreeSet<String>,
}

impl Keys {
    fn parse(text: &str) -> Result<Keys> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    idx + 1
                )));
            };
            let key = k.trim().to_string();
            let value = v.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", idx + 1)));
            }
            if map.insert(key.clone(), value).is_some() {
                return Err(ConfigError(format!("duplicate key `{key}`")));
            }
        }
        Ok(Keys {
            map,
            taken: BTreeSet::new(),
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let v = self.map.get(key).cloned();
        if v.is_some() {
            self.taken.insert(key.to_string());
        }
        v
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError(format!("{key}: expected a number, got `{raw}`"))),
        }
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        self.f64(key)?
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn i64_req(&mut self, key: &str) -> Result<i64> {
        let raw = self.require(key)?;
        raw.parse::<i64>()
            .map_err(|_| ConfigError(format!("{key}: expected an integer, got `{raw}`")))
    }

    fn usize_req(&mut self, key: &str) -> Result<usize> {
        let raw = self.require(key)?;
        raw.parse::<usize>()
            .map_err(|_| ConfigError(format!("{key}: expected a nonnegative integer, got `{raw}`")))
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => raw.parse::<usize>().map_err(|_| {
                ConfigError(format!("{key}: expected a nonnegative integer, got `{raw}`"))
            }),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => raw.parse::<u64>().map_err(|_| {
                ConfigError(format!("{key}: expected a nonnegative integer, got `{raw}`"))
            }),
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Vec<f64>> {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    ConfigError(format!(
                        "{key}: expected comma-separated numbers, got `{}`",
                        tok.trim()
                    ))
                })
            })
            .collect()
    }

    fn u32_list(&mut self, key: &str) -> Result<Vec<u32>> {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|tok| {
                tok.trim().parse::<u32>().map_err(|_| {
                    ConfigError(format!(
                        "{key}: expected comma-separated positive integers, got `{}`",
                        tok.trim()
                    ))
                })
            })
            .collect()
    }

    /// Fourier mode list `k:cos:sin;k:cos:sin`.
    fn modes_req(&mut self, key: &str) -> Result<Vec<(u32, f64, f64)>> {
        let raw = self.require(key)?;
        parse_modes(key, &raw)
    }

    fn modes_or(&mut self, key: &str) -> Result<Vec<(u32, f64, f64)>> {
        match self.take(key) {
            None => Ok(Vec::new()),
            Some(raw) => parse_modes(key, &raw),
        }
    }

    /// Consume the store; any key never taken is unknown.
    fn finish(self) -> Result<BTreeMap<String, String>> {
        for key in self.map.keys() {
            if !self.taken.contains(key) {
                return Err(ConfigError(format!("unknown key `{key}`")));
            }
        }
        Ok(self.map)
    }
}

fn parse_modes(key: &str, raw: &str) -> Result<Vec<(u32, f64, f64)>> {
    let mut modes = Vec::new();
    for entry in raw.split(';') {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let parts: Vec<&str> = entry.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError(format!(
                "{key} entry `{entry}` must be `wavenumber:cos:sin`"
            )));
        }
        let k: u32 = parts[0].trim().parse().map_err(|_| {
            ConfigError(format!("{key} entry `{entry}`: bad wavenumber"))
        })?;
        if k == 0 {
            return Err(ConfigError(format!(
                "{key} entry `{entry}`: wavenumber must be positive"
            )));
        }
        let a: f64 = parts[1].trim().parse().map_err(|_| {
            ConfigError(format!("{key} entry `{entry}`: bad cosine amplitude"))
        })?;
        let b: f64 = parts[2].trim().parse().map_err(|_| {
            ConfigError(format!("{key} entry `{entry}`: bad sine amplitude"))
        })?;
        modes.push((k, a, b));
    }
    if modes.is_empty() {
        return Err(ConfigError(format!("{key} must list at least one mode")));
    }
    Ok(modes)
}
