//! Euler-Maruyama path simulation.
//!
//! One step advances the state by
//!
//! ```text
//! xi_{t+h} = xi_t + h mu(xi_t, t) + sigma(xi_t, t) sqrt(h) zeta,
//! ```
//!
//! with `zeta` a vector of independent standard normals, followed by the
//! model's boundary policy. Noise is drawn from a counter-based stream keyed
//! by `(seed, path index, step index)`, so path `k` is a pure function of
//! `(seed, k)`: regenerating it does not depend on how many paths exist or on
//! evaluation order.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ItoModel;
use crate::rng::{tags, Stream};

/// A uniform time grid `t_i = t0 + i h`, `i = 0..=n_steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t_end: f64,
    step: f64,
    n_steps: usize,
}

impl TimeGrid {
    /// `(t_end - t0) / step` must be a positive integer to within a few ulps.
    pub fn new(t0: f64, t_end: f64, step: f64) -> Result<Self> {
        if !t0.is_finite() || !t_end.is_finite() || t_end <= t0 {
            return Err(Error::invalid(
                "t_end",
                format!("need finite t0 < t_end, got [{t0}, {t_end}]"),
            ));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::invalid("step", format!("need step > 0, got {step}")));
        }
        let ratio = (t_end - t0) / step;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 4.0 * f64::EPSILON * rounded.max(1.0) {
            return Err(Error::invalid(
                "step",
                format!("step {step} does not divide the span {} evenly", t_end - t0),
            ));
        }
        Ok(TimeGrid {
            t0,
            t_end,
            step,
            n_steps: rounded as usize,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t0
    }
}

/// How a path set was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathOrigin {
    EulerMaruyama,
    Spectral,
}

impl PathOrigin {
    pub fn name(&self) -> &'static str {
        match self {
            PathOrigin::EulerMaruyama => "euler_maruyama",
            PathOrigin::Spectral => "spectral",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "euler_maruyama" => Some(PathOrigin::EulerMaruyama),
            "spectral" => Some(PathOrigin::Spectral),
            _ => None,
        }
    }
}

/// One sampled path: states at every grid point, row-major by step.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    m: usize,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, m: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() * m {
            return Err(Error::Dimension {
                context: "trajectory values",
                expected: grid.n_points() * m,
                actual: values.len(),
            });
        }
        Ok(Trajectory { grid, m, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn state_dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn state(&self, step: usize) -> &[f64] {
        &self.values[step * self.m..(step + 1) * self.m]
    }

    pub fn endpoint(&self) -> &[f64] {
        self.state(self.grid.n_steps())
    }

    /// All values of one component over the grid.
    pub fn component(&self, dim: usize) -> Vec<f64> {
        self.values[dim..].iter().step_by(self.m).copied().collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A bundle of paths over a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    origin: PathOrigin,
    grid: TimeGrid,
    m: usize,
    paths: Vec<Trajectory>,
}

impl PathSet {
    pub fn new(origin: PathOrigin, grid: TimeGrid, m: usize, paths: Vec<Trajectory>) -> Result<Self> {
        for p in &paths {
            if p.state_dim() != m {
                return Err(Error::Dimension {
                    context: "path state dimension",
                    expected: m,
                    actual: p.state_dim(),
                });
            }
            if p.grid() != &grid {
                return Err(Error::invalid("paths", "trajectories must share one grid"));
            }
        }
        Ok(PathSet {
            origin,
            grid,
            m,
            paths,
        })
    }

    pub fn origin(&self) -> PathOrigin {
        self.origin
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn state_dim(&self) -> usize {
        self.m
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, k: usize) -> &Trajectory {
        &self.paths[k]
    }

    pub fn paths(&self) -> &[Trajectory] {
        &self.paths
    }
}

/// Scratch buffers reused across steps.
struct EmScratch {
    drift: Vec<f64>,
    diffusion: Vec<f64>,
}

impl EmScratch {
    fn new(m: usize, n: usize) -> Self {
        EmScratch {
            drift: vec![0.0; m],
            diffusion: vec![0.0; m * n],
        }
    }
}

/// Advances `state` by one Euler-Maruyama step of size `h` using the normal
/// draws in `zeta` (length n), then applies the boundary policy.
pub fn em_step(model: &ItoModel, state: &mut [f64], t: f64, h: f64, zeta: &[f64]) -> Result<()> {
    if zeta.len() != model.wiener_dim() {
        return Err(Error::Dimension {
            context: "noise vector",
            expected: model.wiener_dim(),
            actual: zeta.len(),
        });
    }
    let mut scratch = EmScratch::new(model.state_dim(), model.wiener_dim());
    em_step_inner(model, state, t, h, zeta, &mut scratch, 0, 0)
}

#[inline]
fn em_step_inner(
    model: &ItoModel,
    state: &mut [f64],
    _t: f64,
    h: f64,
    zeta: &[f64],
    scratch: &mut EmScratch,
    path: usize,
    step: usize,
) -> Result<()> {
    let m = model.state_dim();
    let n = model.wiener_dim();
    model.drift_into(state, &mut scratch.drift)?;
    model.diffusion_into(state, &mut scratch.diffusion)?;
    let sqrt_h = h.sqrt();
    for i in 0..m {
        let mut noise = 0.0;
        for j in 0..n {
            noise += scratch.diffusion[i * n + j] * zeta[j];
        }
        let next = state[i] + h * scratch.drift[i] + sqrt_h * noise;
        if !next.is_finite() {
            return Err(Error::NonFinite {
                context: "euler-maruyama step",
                component: i,
                step,
                path,
            });
        }
        state[i] = next;
    }
    model.apply_boundary(state);
    Ok(())
}

pub(crate) fn check_initial(model: &ItoModel, xi0: &[f64]) -> Result<()> {
    if xi0.len() != model.state_dim() {
        return Err(Error::Dimension {
            context: "initial state",
            expected: model.state_dim(),
            actual: xi0.len(),
        });
    }
    for (i, (&x, b)) in xi0.iter().zip(model.boundary()).enumerate() {
        if !x.is_finite() {
            return Err(Error::invalid("xi0", format!("component {i} is not finite")));
        }
        if (b.apply(x) - x).abs() > 0.0 {
            return Err(Error::invalid(
                "xi0",
                format!("component {i} = {x} violates its boundary policy"),
            ));
        }
    }
    Ok(())
}

/// Simulates path `path_index` of the ensemble identified by `seed`.
pub fn simulate_em_path(
    model: &ItoModel,
    grid: &TimeGrid,
    xi0: &[f64],
    seed: u64,
    path_index: usize,
) -> Result<Trajectory> {
    check_initial(model, xi0)?;
    let m = model.state_dim();
    let n = model.wiener_dim();
    let stream = Stream::new(seed)
        .substream(tags::EM_PATH)
        .substream(path_index as u64);
    let mut scratch = EmScratch::new(m, n);
    let mut zeta = vec![0.0; n];
    let mut values = Vec::with_capacity(grid.n_points() * m);
    let mut state = xi0.to_vec();
    values.extend_from_slice(&state);
    for s in 0..grid.n_steps() {
        for (j, z) in zeta.iter_mut().enumerate() {
            *z = stream.normal((s * n + j) as u64);
        }
        em_step_inner(
            model,
            &mut state,
            grid.time(s),
            grid.step(),
            &zeta,
            &mut scratch,
            path_index,
            s,
        )?;
        values.extend_from_slice(&state);
    }
    Trajectory::new(*grid, m, values)
}

/// Simulates `n_paths` paths; path `k` depends only on `(seed, k)`.
pub fn simulate_em_paths(
    model: &ItoModel,
    grid: &TimeGrid,
    xi0: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    let mut paths = Vec::with_capacity(n_paths);
    for k in 0..n_paths {
        paths.push(simulate_em_path(model, grid, xi0, seed, k)?);
    }
    PathSet::new(PathOrigin::EulerMaruyama, *grid, model.state_dim(), paths)
}

/// Writes a path set as CSV: an origin comment, a header, then one row per
/// grid point per path.
pub fn write_paths_csv<W: Write>(paths: &PathSet, mut out: W) -> Result<()> {
    writeln!(out, "# origin: {}", paths.origin().name())?;
    let mut header = vec!["path_id".to_owned(), "t".to_owned()];
    for d in 0..paths.state_dim() {
        header.push(format!("xi_{}", d + 1));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(csv_io)?;
    for (k, path) in paths.paths().iter().enumerate() {
        for s in 0..paths.grid().n_points() {
            let mut rec = vec![k.to_string(), format!("{}", paths.grid().time(s))];
            rec.extend(path.state(s).iter().map(|v| format!("{v}")));
            w.write_record(&rec).map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_paths_file(paths: &PathSet, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_paths_csv(paths, std::io::BufWriter::new(f))
}

fn csv_io(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::parse(p.line() as usize, e),
        None => Error::parse(0, e),
    }
}

/// Reads a path set written by [`write_paths_csv`]. Validates the header, a
/// uniform time grid (tolerance `1e-9 * step`), equal path lengths and
/// contiguous path ids.
pub fn read_paths_csv<R: BufRead>(mut input: R) -> Result<PathSet> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let origin = first
        .trim()
        .strip_prefix("# origin:")
        .and_then(|s| PathOrigin::parse(s.trim()))
        .ok_or_else(|| Error::parse(1, "expected '# origin: <euler_maruyama|spectral>'"))?;

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    // Header line is line 2 of the file; records start at line 3.
    let headers = reader.headers().map_err(csv_io)?.clone();
    if headers.len() < 3 || &headers[0] != "path_id" || &headers[1] != "t" {
        return Err(Error::parse(2, "header must be path_id,t,xi_1,..,xi_m"));
    }
    let m = headers.len() - 2;
    for d in 0..m {
        if &headers[2 + d] != format!("xi_{}", d + 1).as_str() {
            return Err(Error::parse(2, format!("bad state column {:?}", &headers[2 + d])));
        }
    }

    let mut times: Vec<f64> = Vec::new();
    let mut paths: Vec<Vec<f64>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_io)?;
        let line = rec.position().map(|p| p.line() as usize + 1).unwrap_or(0);
        if rec.len() != 2 + m {
            return Err(Error::parse(line, format!("expected {} fields, got {}", 2 + m, rec.len())));
        }
        let field = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(line, format!("field {:?}: {e}", &rec[i])))
        };
        let id: usize = rec[0]
            .trim()
            .parse()
            .map_err(|e| Error::parse(line, format!("path_id {:?}: {e}", &rec[0])))?;
        let t = field(1)?;
        if id == paths.len() {
            paths.push(Vec::new());
        } else if id + 1 != paths.len() {
            return Err(Error::parse(line, format!("path_id {id} out of order")));
        }
        if id == 0 {
            times.push(t);
        } else {
            let s = paths[id].len() / m;
            if s >= times.len() {
                return Err(Error::parse(line, format!("path {id} longer than path 0")));
            }
            if (t - times[s]).abs() > 1e-9 * times.get(1).map(|t1| t1 - times[0]).unwrap_or(1.0) {
                return Err(Error::parse(line, format!("time {t} does not match grid")));
            }
        }
        for d in 0..m {
            let v = field(2 + d)?;
            if !v.is_finite() {
                return Err(Error::parse(line, format!("non-finite value {v}")));
            }
            paths[id].push(v);
        }
    }

    if times.len() < 2 {
        return Err(Error::parse(0, "need at least two grid points"));
    }
    let step = times[1] - times[0];
    if !(step > 0.0) {
        return Err(Error::parse(0, "grid times must increase"));
    }
    for (i, &t) in times.iter().enumerate() {
        if (t - (times[0] + i as f64 * step)).abs() > 1e-9 * step {
            return Err(Error::parse(0, format!("grid point {i} = {t} is not uniformly spaced")));
        }
    }
    let grid = TimeGrid::new(times[0], times[0] + step * (times.len() - 1) as f64, step)?;
    let trajectories: Result<Vec<Trajectory>> = paths
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            if v.len() != grid.n_points() * m {
                return Err(Error::parse(0, format!("path {k} has {} values, expected {}", v.len(), grid.n_points() * m)));
            }
            Trajectory::new(grid, m, v)
        })
        .collect();
    PathSet::new(origin, grid, m, trajectories?)
}

pub fn read_paths_file(path: &Path) -> Result<PathSet> {
    let f = std::fs::File::open(path)?;
    read_paths_csv(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_preset, DistributionPreset, ItoModel, PresetKind};
    use crate::poly::{Polynomial, PolynomialMap};

    fn gaussian(a: f64, b: f64) -> ItoModel {
        make_preset(&DistributionPreset::new(PresetKind::Gaussian, a, b).unwrap())
    }

    fn zero_model() -> ItoModel {
        let drift = PolynomialMap::new(1, 1, 1, vec![Polynomial::zero(1)]).unwrap();
        let diffusion =
            crate::model::DiffusionMap::from_polynomials(1, 1, 1, vec![Polynomial::zero(1)]).unwrap();
        ItoModel::new(drift, diffusion, vec![crate::model::BoundaryPolicy::None], vec![0.0]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 0.1).is_ok());
        assert_eq!(TimeGrid::new(0.0, 200.0, 1e-3).unwrap().n_steps(), 200_000);
        assert!(TimeGrid::new(0.0, 1.0, 0.3).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 0.1).is_err());
        assert!(TimeGrid::new(0.0, -1.0, 0.1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn em_step_hand_values() {
        // Zero drift and diffusion: state unchanged.
        let zm = zero_model();
        let mut s = [0.7];
        em_step(&zm, &mut s, 0.0, 0.01, &[1.0]).unwrap();
        assert_eq!(s[0], 0.7);

        // Gaussian(0,1): xi' = xi + h*(-xi) + sqrt(2)*sqrt(h)*zeta.
        let g = gaussian(0.0, 1.0);
        let mut s = [1.0];
        em_step(&g, &mut s, 0.0, 0.01, &[0.0]).unwrap();
        assert!((s[0] - 0.99).abs() < 1e-15);
        let mut s = [1.0];
        em_step(&g, &mut s, 0.0, 0.01, &[1.0]).unwrap();
        let want = 0.99 + 2.0f64.sqrt() * 0.1;
        assert!((s[0] - want).abs() < 1e-15);
    }

    #[test]
    fn zero_diffusion_reduces_to_explicit_euler() {
        // Drift -x with no noise must match the hand-rolled Euler iteration
        // exactly, bit for bit.
        let drift = PolynomialMap::new(1, 1, 1, vec![Polynomial::univariate(&[0.0, -1.0])]).unwrap();
        let diffusion =
            crate::model::DiffusionMap::from_polynomials(1, 1, 1, vec![Polynomial::zero(1)]).unwrap();
        let model =
            ItoModel::new(drift, diffusion, vec![crate::model::BoundaryPolicy::None], vec![1.0]).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 1e-3).unwrap();
        let path = simulate_em_path(&model, &grid, &[1.0], 9, 0).unwrap();
        let mut x = 1.0;
        for s in 0..grid.n_steps() {
            x += grid.step() * -x;
            assert_eq!(path.state(s + 1)[0], x);
        }
        // And the endpoint approximates exp(-1).
        assert!((path.endpoint()[0] - (-1.0f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn paths_are_pure_functions_of_seed_and_index() {
        let g = gaussian(0.0, 1.0);
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let a = simulate_em_paths(&g, &grid, &[0.0], 3, k_seed()).unwrap();
        let b = simulate_em_paths(&g, &grid, &[0.0], 5, k_seed()).unwrap();
        for k in 0..3 {
            assert_eq!(a.path(k), b.path(k));
        }
        let c = simulate_em_paths(&g, &grid, &[0.0], 3, k_seed() + 1).unwrap();
        assert_ne!(a.path(0), c.path(0));
    }

    fn k_seed() -> u64 {
        42
    }

    #[test]
    fn ou_endpoint_ensemble_variance_approaches_b() {
        // For drift -(x) and sigma^2 = 2b, the EM chain has stationary
        // variance b / (1 - h/2); with h = 0.02 that is within 1.1% of b.
        let b = 1.0;
        let g = gaussian(0.0, b);
        let grid = TimeGrid::new(0.0, 8.0, 0.02).unwrap();
        let n = 20_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for k in 0..n {
            let p = simulate_em_path(&g, &grid, &[0.0], 7, k).unwrap();
            let x = p.endpoint()[0];
            sum += x;
            sum2 += x * x;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - b).abs() < 0.04 * b, "variance {var}");
    }

    #[test]
    fn weak_error_halves_with_step() {
        // OU mean after T=1 from x0=1 is (1-h)^(1/h) under EM, exp(-1) exactly;
        // the gap must shrink linearly in h. Small diffusion keeps the
        // sampling noise far below the bias being measured.
        let g = gaussian(0.0, 0.01);
        let exact = (-1.0f64).exp();
        let n = 100_000;
        let mut errs = Vec::new();
        for &h in &[0.1, 0.05, 0.025] {
            let grid = TimeGrid::new(0.0, 1.0, h).unwrap();
            let mut sum = 0.0;
            for k in 0..n {
                sum += simulate_em_path(&g, &grid, &[1.0], 11, k).unwrap().endpoint()[0];
            }
            errs.push((sum / n as f64 - exact).abs());
        }
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!((1.6..=2.6).contains(&r1), "ratio {r1} (errors {errs:?})");
        assert!((1.6..=2.6).contains(&r2), "ratio {r2} (errors {errs:?})");
    }

    #[test]
    fn reflect_boundary_is_respected() {
        let beta = make_preset(&DistributionPreset::new(PresetKind::Beta, 2.0, 5.0).unwrap());
        let grid = TimeGrid::new(0.0, 5.0, 0.01).unwrap();
        for k in 0..20 {
            let p = simulate_em_path(&beta, &grid, &[0.3], 1, k).unwrap();
            for s in 0..grid.n_points() {
                let x = p.state(s)[0];
                assert!((0.0..=1.0).contains(&x), "path {k} step {s}: {x}");
            }
        }
    }

    #[test]
    fn initial_state_is_validated() {
        let beta = make_preset(&DistributionPreset::new(PresetKind::Beta, 2.0, 5.0).unwrap());
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        assert!(simulate_em_path(&beta, &grid, &[1.5], 1, 0).is_err());
        assert!(simulate_em_path(&beta, &grid, &[0.5, 0.5], 1, 0).is_err());
        assert!(simulate_em_path(&beta, &grid, &[f64::NAN], 1, 0).is_err());
    }

    #[test]
    fn diverging_path_reports_path_and_step() {
        // dx = x^3 dt explodes quickly from x0 = 10 with h = 1.
        let drift = PolynomialMap::new(1, 1, 1, vec![Polynomial::univariate(&[0.0, 0.0, 0.0, 1.0])]).unwrap();
        let diffusion =
            crate::model::DiffusionMap::from_polynomials(1, 1, 1, vec![Polynomial::zero(1)]).unwrap();
        let model =
            ItoModel::new(drift, diffusion, vec![crate::model::BoundaryPolicy::None], vec![0.0]).unwrap();
        let grid = TimeGrid::new(0.0, 100.0, 1.0).unwrap();
        let err = simulate_em_path(&model, &grid, &[10.0], 3, 17).unwrap_err();
        match err {
            Error::NonFinite { path, .. } => assert_eq!(path, 17),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn csv_roundtrip() {
        let g = gaussian(0.5, 2.0);
        let grid = TimeGrid::new(0.0, 0.5, 0.1).unwrap();
        let ps = simulate_em_paths(&g, &grid, &[0.5], 3, 123).unwrap();
        let mut buf = Vec::new();
        write_paths_csv(&ps, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# origin: euler_maruyama\n"));
        assert!(text.contains("path_id,t,xi_1"));
        let back = read_paths_csv(&buf[..]).unwrap();
        assert_eq!(back.origin(), PathOrigin::EulerMaruyama);
        assert_eq!(back.n_paths(), 3);
        assert_eq!(back.grid(), ps.grid());
        for k in 0..3 {
            for s in 0..grid.n_points() {
                let a = ps.path(k).state(s)[0];
                let b = back.path(k).state(s)[0];
                assert_eq!(a, b, "path {k} step {s}");
            }
        }
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let missing_origin = b"path_id,t,xi_1\n0,0.0,1.0\n";
        assert!(read_paths_csv(&missing_origin[..]).is_err());

        let bad_value = b"# origin: euler_maruyama\npath_id,t,xi_1\n0,0.0,1.0\n0,0.1,oops\n";
        match read_paths_csv(&bad_value[..]).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected error {other}"),
        }

        let bad_header = b"# origin: euler_maruyama\nwho,t,xi_1\n";
        match read_paths_csv(&bad_header[..]).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }
}
