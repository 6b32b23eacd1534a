//! Response evaluation: mapping a disturbance path to a scalar.
//!
//! The engine treats the system simulator as a black box behind
//! [`ResponseFn`]; anything that turns a trajectory into a finite scalar can
//! stand in. Built-ins: the path endpoint, a reduced-order grid frequency
//! model (aggregate swing dynamics plus a first-order governor) scored by
//! the RMS frequency deviation over a window, and a child-process adapter
//! for external simulators.

use std::io::Write as _;
use std::process::{Command, Stdio};

use crate::error::{Error, Result};
use crate::sde::{PathOrigin, PathSet, TimeGrid, Trajectory};

/// The simulator contract: a pure map from one disturbance path to a scalar.
pub trait ResponseFn: Sync {
    fn response(&self, path: &Trajectory) -> Result<f64>;
}

/// Response = final value of one state component.
#[derive(Debug, Clone, Copy)]
pub struct EndpointResponse {
    pub component: usize,
}

impl ResponseFn for EndpointResponse {
    fn response(&self, path: &Trajectory) -> Result<f64> {
        if self.component >= path.state_dim() {
            return Err(Error::Dimension {
                context: "endpoint response component",
                expected: path.state_dim(),
                actual: self.component,
            });
        }
        Ok(path.endpoint()[self.component])
    }
}

/// Adapter for closures.
pub struct FnResponse<F>(pub F);

impl<F: Fn(&Trajectory) -> Result<f64> + Sync> ResponseFn for FnResponse<F> {
    fn response(&self, path: &Trajectory) -> Result<f64> {
        (self.0)(path)
    }
}

/// Aggregate frequency dynamics: swing equation with load damping plus a
/// first-order governor.
///
/// ```text
/// 2H dw/dt = dP_wind(t) - dP_loss(t) + P_gov - D w
/// Tg dP_gov/dt = -P_gov - w / R
/// ```
///
/// with `dP_wind = (disturbance - schedule) * wind_base / p_base` and all
/// powers in per unit of `p_base`.
#[derive(Debug, Clone, Copy)]
pub struct FrequencyModel {
    /// Inertia constant H (s).
    pub inertia: f64,
    /// Load damping D (pu power per pu frequency).
    pub damping: f64,
    /// Governor droop R (pu frequency per pu power).
    pub droop: f64,
    /// Governor time constant (s).
    pub governor_tc: f64,
    /// System base power (MW).
    pub p_base: f64,
    /// Rated power of the disturbance source (MW).
    pub wind_base: f64,
    /// Scheduled disturbance output (same unit as the disturbance path).
    pub schedule: f64,
}

impl FrequencyModel {
    /// Default parameter set; only the schedule is case-specific.
    pub fn with_schedule(schedule: f64) -> Self {
        FrequencyModel {
            inertia: 5.0,
            damping: 1.0,
            droop: 0.05,
            governor_tc: 0.5,
            p_base: 10_000.0,
            wind_base: 3_000.0,
            schedule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("inertia", self.inertia > 0.0),
            ("damping", self.damping >= 0.0),
            ("droop", self.droop > 0.0),
            ("governor_tc", self.governor_tc > 0.0),
            ("p_base", self.p_base > 0.0),
            ("wind_base", self.wind_base > 0.0),
            ("schedule", self.schedule.is_finite()),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::invalid(name, "frequency model parameter out of range"));
            }
        }
        Ok(())
    }

    /// Steady-state frequency deviation for a sustained power imbalance
    /// `dp` (pu): dp / (D + 1/R), sign included.
    pub fn steady_state_deviation(&self, dp: f64) -> f64 {
        dp / (self.damping + 1.0 / self.droop)
    }
}

/// A step loss of generation at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct TripEvent {
    /// Trip time (s).
    pub time: f64,
    /// Lost generation (pu of the system base).
    pub lost_power: f64,
}

impl Default for TripEvent {
    fn default() -> Self {
        TripEvent { time: 1.0, lost_power: 0.08 }
    }
}

impl TripEvent {
    pub fn none() -> Self {
        TripEvent { time: 0.0, lost_power: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time >= 0.0) || !self.lost_power.is_finite() {
            return Err(Error::invalid("trip", "need time >= 0 and finite lost power"));
        }
        Ok(())
    }
}

/// Frequency deviation over a grid, starting from equilibrium.
#[derive(Debug, Clone)]
pub struct ResponseTrajectory {
    pub grid: TimeGrid,
    pub freq_deviation: Vec<f64>,
}

/// Integrates the frequency model against one disturbance path by classical
/// Runge-Kutta; within a step the disturbance is interpolated linearly
/// (midpoint average) and the trip indicator is evaluated at stage times.
pub fn simulate_response(
    model: &FrequencyModel,
    disturbance: &[f64],
    event: &TripEvent,
    grid: &TimeGrid,
) -> Result<ResponseTrajectory> {
    model.validate()?;
    event.validate()?;
    if disturbance.len() != grid.n_points() {
        return Err(Error::Dimension {
            context: "disturbance path",
            expected: grid.n_points(),
            actual: disturbance.len(),
        });
    }

    let gain = model.wind_base / model.p_base;
    let wind = |d: f64| (d - model.schedule) * gain;
    let loss = |t: f64| if t >= event.time { event.lost_power } else { 0.0 };
    let deriv = |t: f64, w: f64, pg: f64, u: f64| -> (f64, f64) {
        (
            (u - loss(t) + pg - model.damping * w) / (2.0 * model.inertia),
            (-pg - w / model.droop) / model.governor_tc,
        )
    };

    let h = grid.step();
    let mut w = 0.0f64;
    let mut pg = 0.0f64;
    let mut out = Vec::with_capacity(grid.n_points());
    out.push(0.0);
    for s in 0..grid.n_steps() {
        let t = grid.time(s);
        let u0 = wind(disturbance[s]);
        let u1 = wind(disturbance[s + 1]);
        let um = 0.5 * (u0 + u1);

        let (k1w, k1p) = deriv(t, w, pg, u0);
        let (k2w, k2p) = deriv(t + 0.5 * h, w + 0.5 * h * k1w, pg + 0.5 * h * k1p, um);
        let (k3w, k3p) = deriv(t + 0.5 * h, w + 0.5 * h * k2w, pg + 0.5 * h * k2p, um);
        let (k4w, k4p) = deriv(t + h, w + h * k3w, pg + h * k3p, u1);

        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        pg += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if !w.is_finite() || !pg.is_finite() {
            return Err(Error::NonFinite {
                context: "frequency response",
                component: if w.is_finite() { 1 } else { 0 },
                step: s,
                path: 0,
            });
        }
        out.push(w);
    }
    Ok(ResponseTrajectory { grid: *grid, freq_deviation: out })
}

/// RMS of the deviation over `[t_a, t_b]`: trapezoidal mean of the squared
/// signal across the grid points inside the window, then the square root.
pub fn rrf_rms(traj: &ResponseTrajectory, window: (f64, f64)) -> Result<f64> {
    let (ta, tb) = window;
    let grid = &traj.grid;
    let tol = 1e-9 * grid.step();
    if !(ta < tb) {
        return Err(Error::invalid("window", format!("empty window [{ta}, {tb}]")));
    }
    if ta < grid.t0() - tol || tb > grid.t_end() + tol {
        return Err(Error::invalid(
            "window",
            format!(
                "window [{ta}, {tb}] outside trajectory span [{}, {}]",
                grid.t0(),
                grid.t_end()
            ),
        ));
    }
    let first = (0..grid.n_points())
        .find(|&i| grid.time(i) >= ta - tol)
        .ok_or_else(|| Error::invalid("window", "no grid points in window"))?;
    let last = (0..grid.n_points())
        .rev()
        .find(|&i| grid.time(i) <= tb + tol)
        .ok_or_else(|| Error::invalid("window", "no grid points in window"))?;
    if last <= first {
        return Err(Error::invalid("window", "window contains fewer than two grid points"));
    }
    let mut acc = 0.0;
    for i in first..last {
        let a = traj.freq_deviation[i];
        let b = traj.freq_deviation[i + 1];
        acc += 0.5 * (a * a + b * b) * grid.step();
    }
    let span = grid.step() * (last - first) as f64;
    Ok((acc / span).sqrt())
}

/// The composite built-in response: frequency simulation of one disturbance
/// component, scored by windowed RMS deviation.
#[derive(Debug, Clone, Copy)]
pub struct FrequencyResponse {
    pub model: FrequencyModel,
    pub event: TripEvent,
    pub window: (f64, f64),
    pub component: usize,
}

impl FrequencyResponse {
    pub fn new(model: FrequencyModel, event: TripEvent) -> Self {
        FrequencyResponse { model, event, window: (0.0, 60.0), component: 0 }
    }
}

impl ResponseFn for FrequencyResponse {
    fn response(&self, path: &Trajectory) -> Result<f64> {
        if self.component >= path.state_dim() {
            return Err(Error::Dimension {
                context: "frequency response component",
                expected: path.state_dim(),
                actual: self.component,
            });
        }
        let disturbance = path.component(self.component);
        let traj = simulate_response(&self.model, &disturbance, &self.event, path.grid())?;
        rrf_rms(&traj, self.window)
    }
}

/// Child-process simulator adapter: the path is written to the command's
/// standard input in the trajectory CSV format and a single scalar is read
/// back from its standard output.
pub struct ExternalResponse {
    argv: Vec<String>,
    origin: PathOrigin,
}

impl ExternalResponse {
    pub fn new(argv: Vec<String>, origin: PathOrigin) -> Result<Self> {
        if argv.is_empty() {
            return Err(Error::invalid("command", "need a program name"));
        }
        Ok(ExternalResponse { argv, origin })
    }
}

impl ResponseFn for ExternalResponse {
    fn response(&self, path: &Trajectory) -> Result<f64> {
        let set = PathSet::new(self.origin, *path.grid(), path.state_dim(), vec![path.clone()])?;
        let mut csv = Vec::new();
        crate::sde::write_paths_csv(&set, &mut csv)?;

        let mut child = Command::new(&self.argv[0])
            .args(&self.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Simulator(format!("failed to start {:?}: {e}", self.argv[0])))?;
        // A simulator may stop reading before the whole path arrives (for
        // instance when it rejects the input); the exit status is then the
        // authoritative diagnosis, so a broken pipe here is not itself fatal.
        let sent = child.stdin.take().expect("stdin was piped").write_all(&csv);
        let output = child
            .wait_with_output()
            .map_err(|e| Error::Simulator(format!("simulator did not finish: {e}")))?;
        if !output.status.success() {
            let err = String::from_utf8_lossy(&output.stderr);
            return Err(Error::Simulator(format!(
                "simulator exited with {}: {}",
                output.status,
                err.trim()
            )));
        }
        if let Err(e) = sent {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(Error::Simulator(format!("failed to send path: {e}")));
            }
        }
        let text = String::from_utf8_lossy(&output.stdout);
        let value: f64 = text
            .trim()
            .parse()
            .map_err(|_| Error::Simulator(format!("expected one scalar, got {:?}", text.trim())))?;
        if !value.is_finite() {
            return Err(Error::Simulator(format!("simulator returned non-finite value {value}")));
        }
        Ok(value)
    }
}
