//! Ito-process disturbance models
//!
//! ```text
//! d xi = mu(xi, t) dt + sigma(xi, t) dW,
//! ```
//!
//! with an m-dimensional state, an n-dimensional Wiener process, polynomial
//! drift, and diffusion entries that are polynomials or square roots of
//! polynomials (so that models with a prescribed stationary variance function
//! can be represented exactly).
//!
//! Bundled models:
//! * [`make_preset`] builds the four classic 1-D processes whose stationary
//!   laws are Gaussian, Beta, Gamma and Laplace distributions.
//! * [`wind_model`] builds the quadratic-coefficient model of aggregate wind
//!   farm power output (per unit).

use crate::error::{Error, Result};
use crate::poly::{Polynomial, PolynomialMap};

mod file;
pub use file::{model_to_toml, read_model, write_model};

/// Floor used when a one-sided support is enforced by clamping.
pub const SUPPORT_FLOOR: f64 = 1e-9;

/// Per-component boundary handling applied after every simulation step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPolicy {
    None,
    /// Reflect into `[lo, hi]`; `hi` may be infinite for a one-sided barrier.
    Reflect { lo: f64, hi: f64 },
    /// Clamp into `[lo, hi]`; either end may be infinite.
    Clamp { lo: f64, hi: f64 },
}

impl BoundaryPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundaryPolicy::None => Ok(()),
            BoundaryPolicy::Reflect { lo, hi } | BoundaryPolicy::Clamp { lo, hi } => {
                if !(lo < hi) {
                    return Err(Error::invalid("boundary", format!("lo {lo} >= hi {hi}")));
                }
                if lo.is_nan() || hi.is_nan() {
                    return Err(Error::invalid("boundary", "NaN bound"));
                }
                Ok(())
            }
        }
    }

    /// Maps a value into the admissible interval.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            BoundaryPolicy::None => x,
            BoundaryPolicy::Clamp { lo, hi } => x.clamp(lo, hi),
            BoundaryPolicy::Reflect { lo, hi } => {
                if x >= lo && x <= hi {
                    return x;
                }
                if hi.is_infinite() {
                    return 2.0 * lo - x;
                }
                if lo.is_infinite() {
                    return 2.0 * hi - x;
                }
                // Fold over the period 2(hi-lo): handles arbitrarily large
                // excursions in one pass.
                let w = hi - lo;
                let mut y = (x - lo).rem_euclid(2.0 * w);
                if y > w {
                    y = 2.0 * w - y;
                }
                lo + y
            }
        }
    }
}

/// One diffusion matrix entry.
#[derive(Clone, Debug, PartialEq)]
pub enum DiffusionExpr {
    /// sigma_ij(xi) = p(xi)
    Poly(Polynomial),
    /// sigma_ij(xi) = sqrt(max(p(xi), 0)); `p` is the entry's variance
    /// contribution sigma_ij^2.
    SqrtPoly(Polynomial),
    /// sigma_ij(xi) = sqrt(max(p(u), 0)) with u_k = |xi_k - center_k|.
    SqrtAbsPoly { poly: Polynomial, center: Vec<f64> },
}

impl DiffusionExpr {
    fn input_dim(&self) -> usize {
        match self {
            DiffusionExpr::Poly(p) | DiffusionExpr::SqrtPoly(p) => p.input_dim(),
            DiffusionExpr::SqrtAbsPoly { poly, .. } => poly.input_dim(),
        }
    }

    fn validate(&self, input_dim: usize) -> Result<()> {
        if self.input_dim() != input_dim {
            return Err(Error::Dimension {
                context: "diffusion entry input",
                expected: input_dim,
                actual: self.input_dim(),
            });
        }
        if let DiffusionExpr::SqrtAbsPoly { center, .. } = self {
            if center.len() != input_dim {
                return Err(Error::Dimension {
                    context: "diffusion entry center",
                    expected: input_dim,
                    actual: center.len(),
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DiffusionExpr::Poly(p) => p.eval(x),
            DiffusionExpr::SqrtPoly(p) => p.eval(x).max(0.0).sqrt(),
            DiffusionExpr::SqrtAbsPoly { poly, center } => {
                let mut buf = [0.0; 8];
                if x.len() <= buf.len() {
                    for (b, (xi, c)) in buf.iter_mut().zip(x.iter().zip(center)) {
                        *b = (xi - c).abs();
                    }
                    poly.eval(&buf[..x.len()]).max(0.0).sqrt()
                } else {
                    let u: Vec<f64> = x.iter().zip(center).map(|(xi, c)| (xi - c).abs()).collect();
                    poly.eval(&u).max(0.0).sqrt()
                }
            }
        }
    }
}

/// The m x n matrix of diffusion entries (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionMap {
    input_dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<DiffusionExpr>,
}

impl DiffusionMap {
    pub fn new(input_dim: usize, rows: usize, cols: usize, entries: Vec<DiffusionExpr>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension {
                context: "diffusion map entries",
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        for e in &entries {
            e.validate(input_dim)?;
        }
        Ok(DiffusionMap {
            input_dim,
            rows,
            cols,
            entries,
        })
    }

    /// m x n map from plain polynomial entries.
    pub fn from_polynomials(input_dim: usize, rows: usize, cols: usize, polys: Vec<Polynomial>) -> Result<Self> {
        Self::new(
            input_dim,
            rows,
            cols,
            polys.into_iter().map(DiffusionExpr::Poly).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &DiffusionExpr {
        &self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[DiffusionExpr] {
        &self.entries
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension {
                context: "diffusion map input",
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        if out.len() != self.entries.len() {
            return Err(Error::Dimension {
                context: "diffusion map output",
                expected: self.entries.len(),
                actual: out.len(),
            });
        }
        for (o, e) in out.iter_mut().zip(&self.entries) {
            *o = e.eval(x);
        }
        Ok(())
    }
}

enum EntryKind {
    Poly,
    Sqrt,
    SqrtAbs(Vec<f64>),
}

/// The drift offset between the ordinary and the stepwise reading of a
/// state-dependent diffusion:
///
/// ```text
/// c_i(x) = 1/2 sum_{k,l} sigma_lk(x) * d sigma_ik / d x_l (x).
/// ```
///
/// An integrator driven by a smooth noise surrogate must subtract this from
/// the drift to sample the same process as a stepwise (Ito) scheme; for
/// constant sigma it vanishes identically and [`Self::is_active`] is false.
pub struct NoiseInducedDrift {
    input_dim: usize,
    rows: usize,
    cols: usize,
    kinds: Vec<EntryKind>,
    /// `(entry, var)`-major partials of each entry's inner polynomial.
    partials: Vec<Polynomial>,
    active: bool,
}

impl NoiseInducedDrift {
    pub fn new(map: &DiffusionMap) -> Self {
        let input_dim = map.input_dim;
        let mut kinds = Vec::with_capacity(map.entries.len());
        let mut partials = Vec::with_capacity(map.entries.len() * input_dim);
        for e in &map.entries {
            let poly = match e {
                DiffusionExpr::Poly(p) => {
                    kinds.push(EntryKind::Poly);
                    p
                }
                DiffusionExpr::SqrtPoly(p) => {
                    kinds.push(EntryKind::Sqrt);
                    p
                }
                DiffusionExpr::SqrtAbsPoly { poly, center } => {
                    kinds.push(EntryKind::SqrtAbs(center.clone()));
                    poly
                }
            };
            for var in 0..input_dim {
                partials.push(poly.partial(var));
            }
        }
        let active = partials.iter().any(|p| !p.terms().is_empty());
        NoiseInducedDrift { input_dim, rows: map.rows, cols: map.cols, kinds, partials, active }
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    /// Writes the offset for state `x` into `out` (length `rows`); `sigma`
    /// holds the diffusion values at `x` (entry-major, as written by
    /// [`DiffusionMap::eval_into`]). Square-root entries have no derivative
    /// where they vanish; their contribution is taken as zero there.
    pub fn eval_into(&self, x: &[f64], sigma: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.input_dim);
        debug_assert_eq!(sigma.len(), self.rows * self.cols);
        debug_assert_eq!(out.len(), self.rows);
        out.fill(0.0);
        if !self.active {
            return;
        }
        let mut u = [0.0; 8];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for k in 0..self.cols {
                let entry = i * self.cols + k;
                let s_ik = sigma[entry];
                let slopes = &self.partials[entry * self.input_dim..(entry + 1) * self.input_dim];
                match &self.kinds[entry] {
                    EntryKind::Poly => {
                        for (l, p) in slopes.iter().enumerate() {
                            acc += sigma[l * self.cols + k] * p.eval(x);
                        }
                    }
                    EntryKind::Sqrt if s_ik > 0.0 => {
                        for (l, p) in slopes.iter().enumerate() {
                            acc += sigma[l * self.cols + k] * p.eval(x) / (2.0 * s_ik);
                        }
                    }
                    EntryKind::SqrtAbs(center) if s_ik > 0.0 => {
                        let heap;
                        let arg: &[f64] = if x.len() <= u.len() {
                            for (b, (xi, c)) in u.iter_mut().zip(x.iter().zip(center)) {
                                *b = (xi - c).abs();
                            }
                            &u[..x.len()]
                        } else {
                            heap = x
                                .iter()
                                .zip(center)
                                .map(|(xi, c)| (xi - c).abs())
                                .collect::<Vec<f64>>();
                            &heap
                        };
                        for (l, p) in slopes.iter().enumerate() {
                            acc += sigma[l * self.cols + k]
                                * (x[l] - center[l]).signum()
                                * p.eval(arg)
                                / (2.0 * s_ik);
                        }
                    }
                    _ => {}
                }
            }
            out[i] = 0.5 * acc;
        }
    }
}

/// A complete disturbance model.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoModel {
    m: usize,
    n: usize,
    drift: PolynomialMap,
    diffusion: DiffusionMap,
    boundary: Vec<BoundaryPolicy>,
    initial: Vec<f64>,
}

impl ItoModel {
    pub fn new(
        drift: PolynomialMap,
        diffusion: DiffusionMap,
        boundary: Vec<BoundaryPolicy>,
        initial: Vec<f64>,
    ) -> Result<Self> {
        let m = drift.rows();
        if drift.cols() != 1 {
            return Err(Error::Dimension {
                context: "drift columns",
                expected: 1,
                actual: drift.cols(),
            });
        }
        if drift.input_dim() != m {
            return Err(Error::Dimension {
                context: "drift input",
                expected: m,
                actual: drift.input_dim(),
            });
        }
        if diffusion.rows() != m {
            return Err(Error::Dimension {
                context: "diffusion rows",
                expected: m,
                actual: diffusion.rows(),
            });
        }
        if diffusion.input_dim != m {
            return Err(Error::Dimension {
                context: "diffusion input",
                expected: m,
                actual: diffusion.input_dim,
            });
        }
        if boundary.len() != m {
            return Err(Error::Dimension {
                context: "boundary policies",
                expected: m,
                actual: boundary.len(),
            });
        }
        for b in &boundary {
            b.validate()?;
        }
        if initial.len() != m {
            return Err(Error::Dimension {
                context: "initial state",
                expected: m,
                actual: initial.len(),
            });
        }
        let n = diffusion.cols();
        Ok(ItoModel {
            m,
            n,
            drift,
            diffusion,
            boundary,
            initial,
        })
    }

    /// State dimension m.
    pub fn state_dim(&self) -> usize {
        self.m
    }

    /// Wiener dimension n.
    pub fn wiener_dim(&self) -> usize {
        self.n
    }

    pub fn drift(&self) -> &PolynomialMap {
        &self.drift
    }

    pub fn diffusion(&self) -> &DiffusionMap {
        &self.diffusion
    }

    pub fn boundary(&self) -> &[BoundaryPolicy] {
        &self.boundary
    }

    /// Default initial state used when a caller does not supply one.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// mu(xi) into `out` (length m).
    pub fn drift_into(&self, xi: &[f64], out: &mut [f64]) -> Result<()> {
        self.drift.eval_into(xi, out)
    }

    /// sigma(xi) into `out` (length m*n, row-major).
    pub fn diffusion_into(&self, xi: &[f64], out: &mut [f64]) -> Result<()> {
        self.diffusion.eval_into(xi, out)
    }

    pub fn eval_drift(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m];
        self.drift_into(xi, &mut out)?;
        Ok(out)
    }

    pub fn eval_diffusion(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m * self.n];
        self.diffusion_into(xi, &mut out)?;
        Ok(out)
    }

    /// Applies each component's boundary policy in place.
    #[inline]
    pub fn apply_boundary(&self, xi: &mut [f64]) {
        for (x, b) in xi.iter_mut().zip(&self.boundary) {
            *x = b.apply(*x);
        }
    }

    /// Evaluator for the smooth-noise drift offset of this model's diffusion.
    pub fn noise_induced_drift(&self) -> NoiseInducedDrift {
        NoiseInducedDrift::new(&self.diffusion)
    }
}

/// Which stationary law a preset targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetKind {
    Gaussian,
    Beta,
    Gamma,
    Laplace,
}

impl PresetKind {
    pub fn name(&self) -> &'static str {
        match self {
            PresetKind::Gaussian => "gaussian",
            PresetKind::Beta => "beta",
            PresetKind::Gamma => "gamma",
            PresetKind::Laplace => "laplace",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "gaussian" => Some(PresetKind::Gaussian),
            "beta" => Some(PresetKind::Beta),
            "gamma" => Some(PresetKind::Gamma),
            "laplace" => Some(PresetKind::Laplace),
            _ => None,
        }
    }
}

/// Parameters of a preset disturbance model. `a` and `b` follow the usual
/// conventions of the target distribution: Gaussian(mean a, variance b),
/// Beta(a, b), Gamma(shape a, rate b), Laplace(location a, scale b).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistributionPreset {
    pub kind: PresetKind,
    pub a: f64,
    pub b: f64,
}

impl DistributionPreset {
    pub fn new(kind: PresetKind, a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("preset", "parameters must be finite"));
        }
        match kind {
            PresetKind::Gaussian | PresetKind::Laplace => {
                if b <= 0.0 {
                    return Err(Error::invalid(
                        "preset",
                        format!("{} requires b > 0, got {b}", kind.name()),
                    ));
                }
            }
            PresetKind::Beta | PresetKind::Gamma => {
                if a <= 0.0 || b <= 0.0 {
                    return Err(Error::invalid(
                        "preset",
                        format!("{} requires a > 0 and b > 0, got a={a}, b={b}", kind.name()),
                    ));
                }
            }
        }
        Ok(DistributionPreset { kind, a, b })
    }
}

/// Builds the 1-D model whose stationary law is the preset's distribution.
///
/// Each model has linear mean-reverting drift toward the stationary mean and
/// a diffusion equal to the square root of the variance function that makes
/// the Fokker-Planck stationary solution come out to the target density.
pub fn make_preset(preset: &DistributionPreset) -> ItoModel {
    let (a, b) = (preset.a, preset.b);
    let (mean, _) = stationary_moments(preset);
    // Drift is -(xi - mean) for every preset.
    let drift = PolynomialMap::new(1, 1, 1, vec![Polynomial::univariate(&[mean, -1.0])]).unwrap();
    let (diffusion, boundary) = match preset.kind {
        // sigma^2 = 2b
        PresetKind::Gaussian => (
            DiffusionExpr::SqrtPoly(Polynomial::univariate(&[2.0 * b])),
            BoundaryPolicy::None,
        ),
        // sigma^2 = 2 xi (1 - xi) / (a + b)
        PresetKind::Beta => (
            DiffusionExpr::SqrtPoly(Polynomial::univariate(&[
                0.0,
                2.0 / (a + b),
                -2.0 / (a + b),
            ])),
            BoundaryPolicy::Reflect { lo: 0.0, hi: 1.0 },
        ),
        // sigma^2 = 2 xi / b
        PresetKind::Gamma => (
            DiffusionExpr::SqrtPoly(Polynomial::univariate(&[0.0, 2.0 / b])),
            BoundaryPolicy::Clamp {
                lo: SUPPORT_FLOOR,
                hi: f64::INFINITY,
            },
        ),
        // sigma^2 = 2b|xi - a| + 2b^2
        PresetKind::Laplace => (
            DiffusionExpr::SqrtAbsPoly {
                poly: Polynomial::univariate(&[2.0 * b * b, 2.0 * b]),
                center: vec![a],
            },
            BoundaryPolicy::None,
        ),
    };
    let diffusion = DiffusionMap::new(1, 1, 1, vec![diffusion]).unwrap();
    ItoModel::new(drift, diffusion, vec![boundary], vec![mean]).unwrap()
}

/// Mean and variance of the preset's stationary distribution.
pub fn stationary_moments(preset: &DistributionPreset) -> (f64, f64) {
    let (a, b) = (preset.a, preset.b);
    match preset.kind {
        PresetKind::Gaussian => (a, b),
        PresetKind::Beta => {
            let s = a + b;
            (a / s, a * b / (s * s * (s + 1.0)))
        }
        PresetKind::Gamma => (a / b, a / (b * b)),
        PresetKind::Laplace => (a, 2.0 * b * b),
    }
}

/// Stationary probability density of the preset at `x` (zero off support).
pub fn stationary_pdf(preset: &DistributionPreset, x: f64) -> f64 {
    use crate::special::ln_gamma;
    let (a, b) = (preset.a, preset.b);
    match preset.kind {
        PresetKind::Gaussian => {
            let z = x - a;
            (-z * z / (2.0 * b)).exp() / (2.0 * std::f64::consts::PI * b).sqrt()
        }
        PresetKind::Beta => {
            if !(0.0..=1.0).contains(&x) {
                return 0.0;
            }
            // At an endpoint the power-law factor dominates: diverges for a
            // negative exponent, vanishes for a positive one, and only the
            // exponent-zero case falls through to the generic formula.
            for (point, expo) in [(0.0, a - 1.0), (1.0, b - 1.0)] {
                if x == point {
                    if expo < 0.0 {
                        return f64::INFINITY;
                    }
                    if expo > 0.0 {
                        return 0.0;
                    }
                }
            }
            let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
            let lx = if x == 0.0 { 0.0 } else { (a - 1.0) * x.ln() };
            let l1x = if x == 1.0 { 0.0 } else { (b - 1.0) * (1.0 - x).ln() };
            (lx + l1x - ln_beta).exp()
        }
        PresetKind::Gamma => {
            if x < 0.0 {
                return 0.0;
            }
            if x == 0.0 {
                return if a < 1.0 {
                    f64::INFINITY
                } else if a == 1.0 {
                    b
                } else {
                    0.0
                };
            }
            (a * b.ln() + (a - 1.0) * x.ln() - b * x - ln_gamma(a)).exp()
        }
        PresetKind::Laplace => (-(x - a).abs() / b).exp() / (2.0 * b),
    }
}

/// Quadratic-coefficient model of per-unit aggregate wind farm power,
///
/// ```text
/// dP = (0.0535 - 0.0899 P + 0.0349 P^2) dt
///    + (-0.410 + 0.919 P - 0.505 P^2) dW.
/// ```
pub fn wind_model() -> ItoModel {
    let drift =
        PolynomialMap::new(1, 1, 1, vec![Polynomial::univariate(&[0.0535, -0.0899, 0.0349])])
            .unwrap();
    let diffusion = DiffusionMap::from_polynomials(
        1,
        1,
        1,
        vec![Polynomial::univariate(&[-0.410, 0.919, -0.505])],
    )
    .unwrap();
    ItoModel::new(
        drift,
        diffusion,
        vec![BoundaryPolicy::None],
        vec![wind_equilibrium()],
    )
    .unwrap()
}

/// The stable zero of the wind model's drift (the operating point the process
/// fluctuates around).
pub fn wind_equilibrium() -> f64 {
    let (c0, c1, c2): (f64, f64, f64) = (0.0535, -0.0899, 0.0349);
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // Smaller root; the drift crosses from positive to negative there.
    (-c1 - disc) / (2.0 * c2)
}
