//! Maximum-likelihood identification of scalar polynomial drift/diffusion
//! models from uniformly sampled series, plus distributional validation.
//!
//! For a record xi_0, xi_h, ..., xi_T the Euler transition density gives the
//! objective (constants dropped)
//!
//! ```text
//! L' = 1/4 sum_i r_i^2 / D_i  +  1/2 sum_i ln D_i,
//! r_i = (xi_{i+1} - xi_i) - h mu(xi_i),
//! D_i = h (sigma(xi_i)^2 + eps) / 2,
//! ```
//!
//! minimized over the coefficients of mu and sigma. The additive floor eps
//! keeps every D_i positive regardless of the sigma iterate, so the
//! objective stays finite on all of parameter space.
//!
//! The optimizer is plain gradient descent with Armijo backtracking and a
//! central finite-difference gradient. Two fixed linear reparameterizations
//! make that workable on raw monomial bases: the data is standardized
//! internally (z = (xi - mean)/std), and a one-time diagonal preconditioner
//! is taken from the finite-difference Hessian diagonal at the initial
//! point. Both are exact changes of variables; reported coefficients are
//! mapped back to the original coordinates.

use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{BoundaryPolicy, DiffusionExpr, DiffusionMap, ItoModel};
use crate::poly::{Polynomial, PolynomialMap};
use crate::sde::{simulate_em_path, TimeGrid, Trajectory};

/// Default additive floor on sigma^2 inside the likelihood.
pub const DIFFUSION_FLOOR: f64 = 1e-9;

const VALIDATE_SEED: u64 = 0x7661_6c69_6461_7465;
const CHUNK: usize = 65_536;

/// A uniformly sampled record of an m-dimensional series.
#[derive(Debug, Clone)]
pub struct Dataset {
    t0: f64,
    h: f64,
    m: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(t0: f64, h: f64, m: usize, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::invalid("h", format!("need a positive interval, got {h}")));
        }
        if m == 0 {
            return Err(Error::invalid("m", "need at least one component"));
        }
        if values.len() % m != 0 || values.len() / m < 2 {
            return Err(Error::invalid(
                "values",
                format!("need at least two complete rows of {m} values, got {}", values.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("values", format!("non-finite sample {bad}")));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("t0", "start time must be finite"));
        }
        Ok(Dataset { t0, h, m, values })
    }

    pub fn from_trajectory(traj: &Trajectory) -> Self {
        Dataset {
            t0: traj.grid().t0(),
            h: traj.grid().step(),
            m: traj.state_dim(),
            values: traj.values().to_vec(),
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn state_dim(&self) -> usize {
        self.m
    }

    pub fn n_obs(&self) -> usize {
        self.values.len() / self.m
    }

    pub fn n_increments(&self) -> usize {
        self.n_obs() - 1
    }

    pub fn value(&self, i: usize, dim: usize) -> f64 {
        self.values[i * self.m + dim]
    }

    pub fn component(&self, dim: usize) -> Vec<f64> {
        (0..self.n_obs()).map(|i| self.value(i, dim)).collect()
    }
}

/// Reads a dataset from CSV with header `t,xi_1,...,xi_m`. Leading `#`
/// comment lines are skipped; the time column must be uniformly spaced
/// within 1e-9 of its first interval. A path-set export with a leading
/// `path_id` column is also accepted as long as it holds a single path.
pub fn read_dataset_csv<R: BufRead>(r: R) -> Result<Dataset> {
    let mut lines = r.lines().enumerate();

    let (header_line, header) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if line.trim().is_empty() || line.trim_start().starts_with('#') {
                    continue;
                }
                break (i + 1, line);
            }
            None => return Err(Error::parse(1, "empty input")),
        }
    };
    let cols: Vec<&str> = header.trim().split(',').collect();
    let has_path_id = cols.first() == Some(&"path_id");
    let off = usize::from(has_path_id);
    if cols.get(off) != Some(&"t") || cols.len() < off + 2 {
        return Err(Error::parse(header_line, "expected header t,xi_1,..."));
    }
    for (d, name) in cols[off + 1..].iter().enumerate() {
        if *name != format!("xi_{}", d + 1) {
            return Err(Error::parse(
                header_line,
                format!("expected column xi_{}, got {name:?}", d + 1),
            ));
        }
    }
    let m = cols.len() - off - 1;

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut path_id: Option<String> = None;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != m + 1 + off {
            return Err(Error::parse(
                lineno,
                format!("expected {} fields, got {}", m + 1 + off, fields.len()),
            ));
        }
        let mut fields = fields.into_iter();
        if has_path_id {
            let id = fields.next().unwrap();
            match &path_id {
                None => path_id = Some(id.to_string()),
                Some(first) if first != id => {
                    return Err(Error::parse(
                        lineno,
                        format!(
                            "found a second path id {id:?}; identification takes a single trajectory"
                        ),
                    ));
                }
                Some(_) => {}
            }
        }
        let mut parsed = fields.map(|f| {
            f.parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("bad value {f:?}")))
        });
        let t = parsed.next().unwrap()?;
        times.push((lineno, t));
        for p in parsed {
            let v = p?;
            if !v.is_finite() {
                return Err(Error::parse(lineno, format!("non-finite value {v}")));
            }
            values.push(v);
        }
    }
    if times.len() < 2 {
        return Err(Error::parse(
            times.last().map_or(header_line, |&(l, _)| l),
            "need at least two samples",
        ));
    }
    let h = times[1].1 - times[0].1;
    if !(h > 0.0) {
        return Err(Error::parse(times[1].0, format!("non-increasing time step {h}")));
    }
    for w in times.windows(2) {
        let dt = w[1].1 - w[0].1;
        if (dt - h).abs() > 1e-9 * h {
            return Err(Error::parse(
                w[1].0,
                format!("non-uniform sampling: interval {dt} differs from {h}"),
            ));
        }
    }
    Dataset::new(times[0].1, h, m, values)
}

pub fn read_dataset_file(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_dataset_csv(std::io::BufReader::new(file))
}

/// Monomial basis degrees for the drift and diffusion polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    pub drift_degree: usize,
    pub diffusion_degree: usize,
}

impl BasisSpec {
    pub fn n_drift(&self) -> usize {
        self.drift_degree + 1
    }

    pub fn n_diffusion(&self) -> usize {
        self.diffusion_degree + 1
    }

    pub fn n_params(&self) -> usize {
        self.n_drift() + self.n_diffusion()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iter: usize,
    pub step_tol: f64,
    pub grad_tol: f64,
    pub diffusion_floor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iter: 10_000, step_tol: 1e-12, grad_tol: 1e-6, diffusion_floor: DIFFUSION_FLOOR }
    }
}

/// Fit output. `q` stacks the drift coefficients (ascending degree) followed
/// by the diffusion coefficients.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub q: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    /// Fitted diffusion sits at the floor: the record carries almost no
    /// increment variance.
    pub degenerate: bool,
}

/// Raw objective L' at parameters `q` (drift then diffusion coefficients),
/// with the default floor.
pub fn nll(q: &[f64], data: &Dataset, basis: &BasisSpec) -> Result<f64> {
    if data.state_dim() != 1 {
        return Err(Error::invalid("data", "identification supports univariate series"));
    }
    if q.len() != basis.n_params() {
        return Err(Error::Dimension {
            context: "parameter vector",
            expected: basis.n_params(),
            actual: q.len(),
        });
    }
    if let Some(bad) = q.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid("q", format!("non-finite parameter {bad}")));
    }
    let (qm, qs) = q.split_at(basis.n_drift());
    let h = data.step();
    let floor = DIFFUSION_FLOOR;
    let n = data.n_increments();
    let mut total = 0.0;
    for i in 0..n {
        let x = data.value(i, 0);
        let dx = data.value(i + 1, 0) - x;
        let mu = horner(qm, x);
        let sig = horner(qs, x);
        let d = h * (sig * sig + floor) / 2.0;
        if !d.is_finite() || d < h * floor * 0.25 {
            return Err(Error::invalid(
                "diffusion",
                format!("implied variance {d} below the floor at data index {i}"),
            ));
        }
        let r = dx - h * mu;
        total += r * r / (4.0 * d) + 0.5 * d.ln();
    }
    Ok(total)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of `p((x - mean)/scale)` as a polynomial in `x`.
fn compose_linear(coeffs: &[f64], mean: f64, scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for (k, &a) in coeffs.iter().enumerate() {
        // a * ((x - mean)/scale)^k expanded by the binomial theorem.
        let ak = a / scale.powi(k as i32);
        let mut binom = 1.0;
        for j in 0..=k {
            // binom = C(k, j)
            out[j] += ak * binom * (-mean).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

struct FitWorkspace {
    n: usize,
    h: f64,
    floor: f64,
    p_mu: usize,
    p_sig: usize,
    drift_design: Vec<f64>,
    diff_design: Vec<f64>,
    dx: Vec<f64>,
}

impl FitWorkspace {
    fn new(data: &Dataset, basis: &BasisSpec, floor: f64, mean: f64, scale: f64) -> Self {
        let n = data.n_increments();
        let p_mu = basis.n_drift();
        let p_sig = basis.n_diffusion();
        let mut drift_design = Vec::with_capacity(n * p_mu);
        let mut diff_design = Vec::with_capacity(n * p_sig);
        let mut dx = Vec::with_capacity(n);
        for i in 0..n {
            let z = (data.value(i, 0) - mean) / scale;
            let mut pw = 1.0;
            for k in 0..p_mu.max(p_sig) {
                if k < p_mu {
                    drift_design.push(pw);
                }
                if k < p_sig {
                    diff_design.push(pw);
                }
                pw *= z;
            }
            dx.push(data.value(i + 1, 0) - data.value(i, 0));
        }
        FitWorkspace { n, h: data.step(), floor, p_mu, p_sig, drift_design, diff_design, dx }
    }

    /// Per-increment objective L'/n at internal-coordinate parameters.
    fn objective(&self, theta: &[f64]) -> f64 {
        let (tm, ts) = theta.split_at(self.p_mu);
        let n_chunks = self.n.div_ceil(CHUNK);
        let partials: Vec<f64> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(self.n);
                let mut acc = 0.0;
                for i in lo..hi {
                    let mu = dot(&self.drift_design[i * self.p_mu..(i + 1) * self.p_mu], tm);
                    let sig = dot(&self.diff_design[i * self.p_sig..(i + 1) * self.p_sig], ts);
                    let d = self.h * (sig * sig + self.floor) / 2.0;
                    let r = self.dx[i] - self.h * mu;
                    acc += r * r / (4.0 * d) + 0.5 * d.ln();
                }
                acc
            })
            .collect();
        partials.iter().sum::<f64>() / self.n as f64
    }

    fn fd_gradient(&self, theta: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; theta.len()];
        let mut probe = theta.to_vec();
        for k in 0..theta.len() {
            let step = 1e-6 * theta[k].abs().max(1.0);
            probe[k] = theta[k] + step;
            let up = self.objective(&probe);
            probe[k] = theta[k] - step;
            let down = self.objective(&probe);
            probe[k] = theta[k];
            g[k] = (up - down) / (2.0 * step);
        }
        g
    }

    fn mean_sigma_sq(&self, theta: &[f64]) -> f64 {
        let ts = &theta[self.p_mu..];
        let mut acc = 0.0;
        for i in 0..self.n {
            let sig = dot(&self.diff_design[i * self.p_sig..(i + 1) * self.p_sig], ts);
            acc += sig * sig;
        }
        acc / self.n as f64
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn initial_guess(ws: &FitWorkspace) -> Result<Vec<f64>> {
    // Drift: least squares of dx/h on the drift basis.
    let y: Vec<f64> = ws.dx.iter().map(|&d| d / ws.h).collect();
    let tm = linalg::least_squares(&ws.drift_design, ws.n, ws.p_mu, &y)?;

    // Diffusion: residual increment variance, E[r^2] = h sigma^2. A least
    // squares fit of r^2/h on the sigma basis approximates sigma^2; its
    // square root at a few nodes seeds a polynomial of the right degree.
    let v: Vec<f64> = (0..ws.n)
        .map(|i| {
            let mu = dot(&ws.drift_design[i * ws.p_mu..(i + 1) * ws.p_mu], &tm);
            let r = ws.dx[i] - ws.h * mu;
            r * r / ws.h
        })
        .collect();
    let ts = if ws.p_sig == 1 {
        vec![(v.iter().sum::<f64>() / ws.n as f64).max(ws.floor).sqrt()]
    } else {
        let w = linalg::least_squares(&ws.diff_design, ws.n, ws.p_sig, &v)?;
        // Standardized coordinates put the data mass near [-2, 2].
        let nodes: Vec<f64> = (0..ws.p_sig)
            .map(|j| -1.5 + 3.0 * j as f64 / (ws.p_sig - 1) as f64)
            .collect();
        let mut design = Vec::with_capacity(ws.p_sig * ws.p_sig);
        let mut target = Vec::with_capacity(ws.p_sig);
        for &z in &nodes {
            let mut pw = 1.0;
            for _ in 0..ws.p_sig {
                design.push(pw);
                pw *= z;
            }
            target.push(horner(&w, z).max(ws.floor).sqrt());
        }
        linalg::least_squares(&design, ws.p_sig, ws.p_sig, &target)?
    };

    let mut theta = tm;
    theta.extend(ts);
    Ok(theta)
}

/// Minimizes the likelihood objective over polynomial coefficients.
///
/// `gradient_norm` is reported in the internal preconditioned metric on the
/// per-increment objective, which is the quantity compared to `grad_tol`.
pub fn fit(data: &Dataset, basis: &BasisSpec, opts: &FitOptions) -> Result<FitResult> {
    if data.state_dim() != 1 {
        return Err(Error::invalid("data", "identification supports univariate series"));
    }
    if basis.n_params() >= data.n_increments() {
        return Err(Error::invalid(
            "basis",
            format!(
                "{} parameters need more than {} increments",
                basis.n_params(),
                data.n_increments()
            ),
        ));
    }
    if !(opts.diffusion_floor > 0.0) {
        return Err(Error::invalid("diffusion_floor", "floor must be positive"));
    }

    let xs = data.component(0);
    let n = data.n_increments();
    let mean = xs[..n].iter().sum::<f64>() / n as f64;
    let var = xs[..n].iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let scale = var.sqrt().max(1e-12);

    let ws = FitWorkspace::new(data, basis, opts.diffusion_floor, mean, scale);
    let mut theta = initial_guess(&ws)?;
    let p = theta.len();

    // One-time diagonal preconditioner from the Hessian diagonal at the
    // initial point; descent direction s_k = precond_k * g_k.
    let f0 = ws.objective(&theta);
    let mut precond = vec![1.0; p];
    {
        let mut probe = theta.clone();
        for k in 0..p {
            let step = 1e-3 * theta[k].abs().max(1.0);
            probe[k] = theta[k] + step;
            let up = ws.objective(&probe);
            probe[k] = theta[k] - step;
            let down = ws.objective(&probe);
            probe[k] = theta[k];
            let hkk = (up - 2.0 * f0 + down) / (step * step);
            if hkk.is_finite() && hkk > 1e-8 {
                precond[k] = 1.0 / hkk;
            }
        }
    }

    let mut value = f0;
    let mut iterations = 0;
    let mut converged = false;
    let mut gradient_norm = f64::INFINITY;
    let mut warm_alpha = 1.0;

    while iterations < opts.max_iter {
        let g = ws.fd_gradient(&theta);
        let dir: Vec<f64> = g.iter().zip(&precond).map(|(gk, pk)| gk * pk).collect();
        gradient_norm = g
            .iter()
            .zip(&precond)
            .map(|(gk, pk)| gk * gk * pk)
            .sum::<f64>()
            .sqrt();
        if gradient_norm <= opts.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let slope: f64 = g.iter().zip(&dir).map(|(gk, dk)| gk * dk).sum();
        let dir_norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let mut alpha = warm_alpha;
        let mut stalled = true;
        while alpha * dir_norm >= opts.step_tol {
            let trial: Vec<f64> =
                theta.iter().zip(&dir).map(|(t, d)| t - alpha * d).collect();
            let fv = ws.objective(&trial);
            if fv <= value - 1e-4 * alpha * slope {
                theta = trial;
                value = fv;
                stalled = false;
                break;
            }
            alpha *= 0.5;
        }
        if stalled {
            break;
        }
        warm_alpha = (alpha * 4.0).min(1e6);
    }

    let degenerate = ws.mean_sigma_sq(&theta) <= 10.0 * opts.diffusion_floor;

    // Map standardized-coordinate polynomials back to the data coordinates.
    let (tm, ts) = theta.split_at(basis.n_drift());
    let mut q = compose_linear(tm, mean, scale);
    q.extend(compose_linear(ts, mean, scale));
    let objective = nll(&q, data, basis)?;

    Ok(FitResult { q, objective, iterations, gradient_norm, converged, degenerate })
}

/// Builds a loadable model from fitted coefficients. The diffusion is the
/// fitted polynomial itself (any sign; only its square enters the dynamics).
pub fn model_from_params(basis: &BasisSpec, q: &[f64], initial: f64) -> Result<ItoModel> {
    if q.len() != basis.n_params() {
        return Err(Error::Dimension {
            context: "parameter vector",
            expected: basis.n_params(),
            actual: q.len(),
        });
    }
    let (qm, qs) = q.split_at(basis.n_drift());
    let drift = PolynomialMap::new(1, 1, 1, vec![Polynomial::univariate(qm)])?;
    let diffusion = DiffusionMap::new(
        1,
        1,
        1,
        vec![DiffusionExpr::Poly(Polynomial::univariate(qs))],
    )?;
    ItoModel::new(drift, diffusion, vec![BoundaryPolicy::None], vec![initial])
}

/// Two-sample Kolmogorov-Smirnov distance, sup |F_a - F_b|.
/// Both samples must be non-empty.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut best = 0.0f64;
    // Advance both samples past each distinct value before measuring, so
    // ties (including identical inputs) contribute no spurious gap.
    while i < a.len() && j < b.len() {
        let t = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i].total_cmp(&t).is_le() {
            i += 1;
        }
        while j < b.len() && b[j].total_cmp(&t).is_le() {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Empirical autocorrelation up to `max_lag`, biased normalization;
/// acf[0] = 1 exactly for non-constant input.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::invalid(
            "max_lag",
            format!("lag {max_lag} needs more than {n} samples"),
        ));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return Err(Error::invalid("x", "constant series has no autocorrelation"));
    }
    let mut acf = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let ck = (0..n - k).map(|i| (x[i] - mean) * (x[i + k] - mean)).sum::<f64>() / n as f64;
        acf.push(ck / c0);
    }
    Ok(acf)
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    /// Kolmogorov-Smirnov distance between marginal samples (max across
    /// components).
    pub pdf_distance: f64,
    /// RMSE between autocorrelation functions up to the requested lag
    /// (max across components).
    pub acf_rmse: f64,
    pub lags: usize,
}

/// Compares a dataset against a fresh simulation of `model` with the same
/// length and step (fixed internal seed).
pub fn validate(model: &ItoModel, data: &Dataset, lags: usize) -> Result<ValidationReport> {
    if model.state_dim() != data.state_dim() {
        return Err(Error::Dimension {
            context: "validation data",
            expected: model.state_dim(),
            actual: data.state_dim(),
        });
    }
    let grid = TimeGrid::new(
        data.t0(),
        data.t0() + data.n_increments() as f64 * data.step(),
        data.step(),
    )?;
    let sim = simulate_em_path(model, &grid, model.initial(), VALIDATE_SEED, 0)?;
    let sim_data = Dataset::from_trajectory(&sim);
    compare_datasets(data, &sim_data, lags)
}

/// Diagnostic comparison of two datasets directly (no simulation).
pub fn validate_series(a: &Dataset, b: &Dataset, lags: usize) -> Result<ValidationReport> {
    compare_datasets(a, b, lags)
}

fn compare_datasets(a: &Dataset, b: &Dataset, lags: usize) -> Result<ValidationReport> {
    if a.state_dim() != b.state_dim() {
        return Err(Error::Dimension {
            context: "series comparison",
            expected: a.state_dim(),
            actual: b.state_dim(),
        });
    }
    let mut pdf_distance = 0.0f64;
    let mut acf_rmse = 0.0f64;
    for dim in 0..a.state_dim() {
        let xa = a.component(dim);
        let xb = b.component(dim);
        pdf_distance = pdf_distance.max(ks_distance(&xa, &xb));
        let aa = autocorrelation(&xa, lags)?;
        let ab = autocorrelation(&xb, lags)?;
        let mse = aa
            .iter()
            .zip(&ab)
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            / (lags + 1) as f64;
        acf_rmse = acf_rmse.max(mse.sqrt());
    }
    Ok(ValidationReport { pdf_distance, acf_rmse, lags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_preset;
    use crate::model::PresetKind;

    fn ou_dataset(n_steps: usize, h: f64, seed: u64) -> Dataset {
        let model = make_preset(&crate::model::DistributionPreset::new(PresetKind::Gaussian, 0.0, 1.0).unwrap());
        let grid = TimeGrid::new(0.0, n_steps as f64 * h, h).unwrap();
        let traj = simulate_em_path(&model, &grid, &[0.0], seed, 0).unwrap();
        Dataset::from_trajectory(&traj)
    }

    #[test]
    fn nll_single_increment_hand_value() {
        let data = Dataset::new(0.0, 0.01, 1, vec![0.0, 0.1]).unwrap();
        let basis = BasisSpec { drift_degree: 0, diffusion_degree: 0 };
        let v = nll(&[0.0, 1.0], &data, &basis).unwrap();
        assert!((v - -2.149158683274018).abs() < 1e-8, "{v}");
    }

    #[test]
    fn nll_constant_data_is_pure_log_term() {
        let data = Dataset::new(0.0, 0.05, 1, vec![3.0; 11]).unwrap();
        let basis = BasisSpec { drift_degree: 0, diffusion_degree: 0 };
        let v = nll(&[0.0, 1.5], &data, &basis).unwrap();
        let d = 0.05 * (1.5f64 * 1.5 + DIFFUSION_FLOOR) / 2.0;
        assert!((v - 10.0 * 0.5 * d.ln()).abs() < 1e-12);
    }

    #[test]
    fn nll_sigma_scaling_law() {
        let data = ou_dataset(500, 0.01, 3);
        let basis = BasisSpec { drift_degree: 1, diffusion_degree: 0 };
        let n = data.n_increments() as f64;
        let base = nll(&[0.0, -1.0, 1.0], &data, &basis).unwrap();
        let scaled = nll(&[0.0, -1.0, 3.0], &data, &basis).unwrap();
        // Ignoring the floor: quadratic term divides by c^2, the log term
        // gains n ln c.
        let d1 = 0.01 * (1.0 + DIFFUSION_FLOOR) / 2.0;
        let logdet1 = n * 0.5 * d1.ln();
        let quad1 = base - logdet1;
        let c: f64 = 3.0;
        let predicted = quad1 / (c * c) + logdet1 + n * c.ln();
        assert!((scaled - predicted).abs() < 1e-6 * scaled.abs().max(1.0), "{scaled} vs {predicted}");
    }

    #[test]
    fn nll_sign_flip_invariance() {
        let data = ou_dataset(200, 0.01, 4);
        let basis = BasisSpec { drift_degree: 1, diffusion_degree: 1 };
        let a = nll(&[0.1, -0.9, 1.2, 0.3], &data, &basis).unwrap();
        let b = nll(&[0.1, -0.9, -1.2, -0.3], &data, &basis).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fit_recovers_ou_parameters() {
        // Drift -xi, sigma^2 = 2.
        let data = ou_dataset(200_000, 0.005, 11);
        let basis = BasisSpec { drift_degree: 1, diffusion_degree: 0 };
        let fitted = fit(&data, &basis, &FitOptions::default()).unwrap();
        assert!(fitted.converged, "gradient norm {}", fitted.gradient_norm);
        assert!(!fitted.degenerate);
        let slope = fitted.q[1];
        let sigma_sq = fitted.q[2] * fitted.q[2];
        assert!((slope - -1.0).abs() < 0.08, "slope {slope}");
        assert!((sigma_sq - 2.0).abs() < 0.1, "sigma^2 {sigma_sq}");
    }

    #[test]
    fn fit_flags_deterministic_ramp_as_degenerate() {
        let values: Vec<f64> = (0..200).map(|i| 0.01 * i as f64).collect();
        let data = Dataset::new(0.0, 0.1, 1, values).unwrap();
        let basis = BasisSpec { drift_degree: 1, diffusion_degree: 0 };
        let fitted = fit(&data, &basis, &FitOptions::default()).unwrap();
        assert!(fitted.converged);
        assert!(fitted.degenerate);
        assert!(fitted.q[2] * fitted.q[2] <= 100.0 * DIFFUSION_FLOOR);
        // The ramp itself is matched by the drift.
        let mid = horner(&fitted.q[..2], 1.0);
        assert!((mid - 0.1).abs() < 1e-3, "drift at 1.0: {mid}");
    }

    #[test]
    fn fit_is_translation_equivariant() {
        let data = ou_dataset(50_000, 0.005, 21);
        let shifted = Dataset::new(
            0.0,
            data.step(),
            1,
            data.component(0).iter().map(|x| x + 5.0).collect(),
        )
        .unwrap();
        let basis = BasisSpec { drift_degree: 1, diffusion_degree: 0 };
        let a = fit(&data, &basis, &FitOptions::default()).unwrap();
        let b = fit(&shifted, &basis, &FitOptions::default()).unwrap();
        for &x in &[-1.0, 0.0, 1.0] {
            let da = horner(&a.q[..2], x);
            let db = horner(&b.q[..2], x + 5.0);
            assert!((da - db).abs() < 1e-4, "at {x}: {da} vs {db}");
        }
    }

    #[test]
    fn gradient_shrinks_with_record_length() {
        let basis = BasisSpec { drift_degree: 1, diffusion_degree: 0 };
        let truth = [0.0, -1.0, 2.0f64.sqrt()];
        let mut norms = Vec::new();
        for &n in &[1_000usize, 10_000, 100_000] {
            let data = ou_dataset(n, 0.005, 6);
            let scale = data.n_increments() as f64;
            let mut g = 0.0f64;
            for k in 0..3 {
                let mut up = truth;
                let mut dn = truth;
                let step = 1e-6 * truth[k].abs().max(1.0);
                up[k] += step;
                dn[k] -= step;
                let d = (nll(&up, &data, &basis).unwrap() - nll(&dn, &data, &basis).unwrap())
                    / (2.0 * step * scale);
                g += d * d;
            }
            norms.push(g.sqrt());
        }
        assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
    }

    #[test]
    fn ks_distance_cases() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_distance(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
        let d = ks_distance(&[0.0, 2.0], &[1.0, 3.0]);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn autocorrelation_alternating_series() {
        let x: Vec<f64> = (0..50).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let acf = autocorrelation(&x, 2).unwrap();
        assert_eq!(acf[0], 1.0);
        assert!((acf[1] - -(49.0 / 50.0)).abs() < 1e-12);
        assert!(autocorrelation(&x, 50).is_err());
    }

    #[test]
    fn validate_self_simulated_data_passes() {
        let model = make_preset(&crate::model::DistributionPreset::new(PresetKind::Gaussian, 0.0, 1.0).unwrap());
        let grid = TimeGrid::new(0.0, 400.0, 0.01).unwrap();
        let traj = simulate_em_path(&model, &grid, &[0.0], 9, 0).unwrap();
        let data = Dataset::from_trajectory(&traj);
        let report = validate(&model, &data, 50).unwrap();
        // Correlated series: the effective sample count is T / (2 tau) with
        // tau = 1 s, far below the nominal 40001 points; bound accordingly.
        assert!(report.pdf_distance < 0.1, "ks {}", report.pdf_distance);
        assert!(report.acf_rmse < 0.1, "acf rmse {}", report.acf_rmse);
    }

    #[test]
    fn validate_series_identical_is_exact_zero() {
        let data = ou_dataset(5_000, 0.01, 13);
        let report = validate_series(&data, &data, 20).unwrap();
        assert_eq!(report.pdf_distance, 0.0);
        assert_eq!(report.acf_rmse, 0.0);
    }

    #[test]
    fn acf_normalization_at_lag_zero() {
        let data = ou_dataset(2_000, 0.01, 14);
        let acf = autocorrelation(&data.component(0), 10).unwrap();
        assert_eq!(acf[0], 1.0);
    }

    #[test]
    fn dataset_csv_parses_with_offset_start() {
        let text = "# comment\nt,xi_1\n2.5,0.1\n2.6,0.2\n2.7,0.15\n";
        let data = read_dataset_csv(text.as_bytes()).unwrap();
        assert_eq!(data.n_obs(), 3);
        assert!((data.t0() - 2.5).abs() < 1e-12);
        assert!((data.step() - 0.1).abs() < 1e-12);
        assert_eq!(data.value(2, 0), 0.15);
    }

    #[test]
    fn dataset_csv_accepts_single_path_export() {
        let text = "# origin: euler_maruyama\npath_id,t,xi_1\n0,0.0,0.1\n0,0.5,0.2\n0,1.0,0.3\n";
        let data = read_dataset_csv(text.as_bytes()).unwrap();
        assert_eq!(data.n_obs(), 3);
        assert!((data.step() - 0.5).abs() < 1e-12);
        assert_eq!(data.value(1, 0), 0.2);
    }

    #[test]
    fn dataset_csv_rejects_multi_path_export() {
        let text = "path_id,t,xi_1\n0,0.0,0.1\n0,0.5,0.2\n1,0.0,0.3\n";
        match read_dataset_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dataset_csv_rejects_non_uniform_spacing() {
        let text = "t,xi_1\n0.0,0.1\n0.1,0.2\n0.25,0.3\n";
        match read_dataset_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dataset_csv_rejects_bad_value_with_line() {
        let text = "t,xi_1\n0.0,0.1\n0.1,x\n";
        match read_dataset_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dataset_csv_rejects_short_input() {
        assert!(read_dataset_csv("t,xi_1\n0.0,0.1\n".as_bytes()).is_err());
        assert!(read_dataset_csv("".as_bytes()).is_err());
    }

    #[test]
    fn model_from_params_roundtrip() {
        let basis = BasisSpec { drift_degree: 2, diffusion_degree: 2 };
        let q = [0.0535, -0.0899, 0.0349, -0.410, 0.919, -0.505];
        let model = model_from_params(&basis, &q, 0.9).unwrap();
        let x = [0.8];
        let mu = model.eval_drift(&x).unwrap()[0];
        assert!((mu - (0.0535 - 0.0899 * 0.8 + 0.0349 * 0.64)).abs() < 1e-15);
        let sig = model.eval_diffusion(&x).unwrap()[0];
        assert!((sig - (-0.410 + 0.919 * 0.8 - 0.505 * 0.64)).abs() < 1e-15);
    }
}
