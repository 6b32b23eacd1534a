//! Spectral representation of the driving Wiener process and the random-ODE
//! path construction built on it.
//!
//! Over a horizon `[0, T]` the white-noise rate is expanded in the
//! orthonormal cosine basis
//!
//! ```text
//! m_1(t) = sqrt(1/T),
//! m_j(t) = sqrt(2/T) cos((j-1) pi t / T),   j >= 2,
//! ```
//!
//! truncated at order K. With coefficients zeta_j ~ N(0,1) the Wiener
//! increment rate is approximated by sum_j zeta_j m_j(t), which turns the SDE
//!
//! ```text
//! d xi = mu dt + sigma dW
//! ```
//!
//! into the ordinary differential equation
//!
//! ```text
//! d xi*/dt = mu(xi*, t) - c(xi*) + sigma(xi*, t) sum_j zeta_j m_j(t)
//! ```
//!
//! integrated here by the classical fourth-order Runge-Kutta scheme. Each
//! path is a deterministic function of its coefficient vector, so K numbers
//! per Wiener dimension replace a whole increment sequence.
//!
//! `c = (1/2)(d sigma/d xi) sigma` is the noise-induced drift: a smooth noise
//! surrogate reads a state-dependent sigma in the Stratonovich sense, so
//! without the offset the reconstructed ensemble would drift away from the
//! stepwise Euler-Maruyama law as K grows. It vanishes for constant sigma.
//!
//! Truncation keeps the lowest K modes; because m_1 alone carries the full
//! endpoint mass of the bridge-free expansion (all cosine modes integrate to
//! zero over [0, T]), the path endpoint for unit diffusion equals
//! `zeta_1 sqrt(T)` at every truncation order.

use crate::error::{Error, Result};
use crate::model::ItoModel;
use crate::sde::{PathOrigin, PathSet, TimeGrid, Trajectory};

/// Basis function `m_j(t)` on `[0, horizon]`; `j` is 1-based.
pub fn kle_basis(j: usize, t: f64, horizon: f64) -> Result<f64> {
    check_args(j, t, horizon)?;
    Ok(basis_unchecked(j, t, horizon))
}

#[inline]
fn basis_unchecked(j: usize, t: f64, horizon: f64) -> f64 {
    if j == 1 {
        ( 1.0 / horizon).sqrt()
    } else {
        let freq = (j - 1) as f64 * std::f64::consts::PI / horizon;
        (2.0 / horizon).sqrt() * (freq * t).cos()
    }
}

/// Integral of the basis function from 0 to `t` (closed form).
pub fn kle_basis_integral(j: usize, t: f64, horizon: f64) -> Result<f64> {
    check_args(j, t, horizon)?;
    if j == 1 {
        Ok(t / horizon.sqrt())
    } else {
        let freq = (j - 1) as f64 * std::f64::consts::PI / horizon;
        Ok((2.0 / horizon).sqrt() * (freq * t).sin() / freq)
    }
}

fn check_args(j: usize, t: f64, horizon: f64) -> Result<()> {
    if j == 0 {
        return Err(Error::invalid("j", "basis order is 1-based"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::invalid("horizon", format!("need horizon > 0, got {horizon}")));
    }
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::invalid("t", format!("t = {t} outside [0, {horizon}]")));
    }
    Ok(())
}

/// White-noise rate `sum_j zeta[j] m_{j+1}(t)` for one Wiener dimension.
pub fn reconstruct_wiener_rate(zeta: &[f64], t: f64, horizon: f64) -> Result<f64> {
    if zeta.is_empty() {
        return Err(Error::invalid("zeta", "need at least one coefficient"));
    }
    check_args(1, t, horizon)?;
    Ok(zeta
        .iter()
        .enumerate()
        .map(|(j, &z)| z * basis_unchecked(j + 1, t, horizon))
        .sum())
}

/// The reconstructed Wiener path `W(t_i) = sum_j zeta_j int_0^{t_i} m_j`
/// on a uniform grid of `n_steps` steps over `[0, horizon]`.
pub fn wiener_bridge_check(zeta: &[f64], horizon: f64, n_steps: usize) -> Result<Vec<f64>> {
    if zeta.is_empty() {
        return Err(Error::invalid("zeta", "need at least one coefficient"));
    }
    if n_steps == 0 {
        return Err(Error::invalid("n_steps", "need at least one step"));
    }
    let h = horizon / n_steps as f64;
    let mut w = Vec::with_capacity(n_steps + 1);
    for i in 0..=n_steps {
        let t = (i as f64 * h).min(horizon);
        let mut acc = 0.0;
        for (j, &z) in zeta.iter().enumerate() {
            acc += z * kle_basis_integral(j + 1, t, horizon)?;
        }
        w.push(acc);
    }
    Ok(w)
}

/// Precomputed basis values at every Runge-Kutta stage time of a grid.
/// Row `q` holds `m_1..m_K` at `tau = q * step/2`, `q = 0..=2*n_steps`.
pub struct BasisTable {
    k_order: usize,
    values: Vec<f64>,
}

impl BasisTable {
    pub fn new(grid: &TimeGrid, k_order: usize) -> Result<Self> {
        if k_order == 0 {
            return Err(Error::invalid("k_order", "truncation order must be at least 1"));
        }
        let horizon = grid.duration();
        let rows = 2 * grid.n_steps() + 1;
        let mut values = Vec::with_capacity(rows * k_order);
        for q in 0..rows {
            // Midpoints fall exactly between grid times; clamp the last
            // entry against rounding drift past the horizon.
            let tau = (q as f64 * grid.step() * 0.5).min(horizon);
            for j in 1..=k_order {
                values.push(basis_unchecked(j, tau, horizon));
            }
        }
        Ok(BasisTable { k_order, values })
    }

    pub fn k_order(&self) -> usize {
        self.k_order
    }

    #[inline]
    fn row(&self, q: usize) -> &[f64] {
        &self.values[q * self.k_order..(q + 1) * self.k_order]
    }
}

/// Integrates the random ODE for one coefficient vector.
///
/// `zeta` has length `n * k_order`, row-major: coefficient `j` of Wiener
/// dimension `i` sits at `i * k_order + j`. The boundary policy applies after
/// every full step, mirroring the Euler-Maruyama convention.
pub fn spectral_path(
    model: &ItoModel,
    grid: &TimeGrid,
    xi0: &[f64],
    zeta: &[f64],
    k_order: usize,
) -> Result<Trajectory> {
    let table = BasisTable::new(grid, k_order)?;
    spectral_path_with_table(model, grid, xi0, zeta, &table, 0)
}

/// Same as [`spectral_path`] with a caller-provided basis table (reused
/// across paths of one ensemble) and a path index for error reporting.
pub fn spectral_path_with_table(
    model: &ItoModel,
    grid: &TimeGrid,
    xi0: &[f64],
    zeta: &[f64],
    table: &BasisTable,
    path_index: usize,
) -> Result<Trajectory> {
    crate::sde::check_initial(model, xi0)?;
    let m = model.state_dim();
    let n = model.wiener_dim();
    let k = table.k_order();
    if zeta.len() != n * k {
        return Err(Error::Dimension {
            context: "spectral coefficients",
            expected: n * k,
            actual: zeta.len(),
        });
    }

    let h = grid.step();
    let mut values = Vec::with_capacity(grid.n_points() * m);
    let mut state = xi0.to_vec();
    values.extend_from_slice(&state);

    let offset = model.noise_induced_drift();
    let mut rate = vec![0.0; n];
    let mut drift = vec![0.0; m];
    let mut diffusion = vec![0.0; m * n];
    let mut corr = vec![0.0; m];
    let mut stage = vec![0.0; m];
    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];

    for s in 0..grid.n_steps() {
        // f(tau, x) = mu(x) - c(x) + sigma(x) * rate(tau), with rate from the
        // table and c the noise-induced drift of a state-dependent sigma.
        let eval = |q: usize,
                        x: &[f64],
                        out: &mut [f64],
                        rate: &mut [f64],
                        drift: &mut [f64],
                        diffusion: &mut [f64],
                        corr: &mut [f64]|
         -> Result<()> {
            let row = table.row(q);
            for i in 0..n {
                let zrow = &zeta[i * k..(i + 1) * k];
                rate[i] = zrow.iter().zip(row).map(|(z, b)| z * b).sum();
            }
            model.drift_into(x, drift)?;
            model.diffusion_into(x, diffusion)?;
            if offset.is_active() {
                offset.eval_into(x, diffusion, corr);
            }
            for i in 0..m {
                let mut v = drift[i] - corr[i];
                for j in 0..n {
                    v += diffusion[i * n + j] * rate[j];
                }
                out[i] = v;
            }
            Ok(())
        };

        eval(2 * s, &state, &mut k1, &mut rate, &mut drift, &mut diffusion, &mut corr)?;
        for i in 0..m {
            stage[i] = state[i] + 0.5 * h * k1[i];
        }
        eval(2 * s + 1, &stage, &mut k2, &mut rate, &mut drift, &mut diffusion, &mut corr)?;
        for i in 0..m {
            stage[i] = state[i] + 0.5 * h * k2[i];
        }
        eval(2 * s + 1, &stage, &mut k3, &mut rate, &mut drift, &mut diffusion, &mut corr)?;
        for i in 0..m {
            stage[i] = state[i] + h * k3[i];
        }
        eval(2 * s + 2, &stage, &mut k4, &mut rate, &mut drift, &mut diffusion, &mut corr)?;

        for i in 0..m {
            let next = state[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !next.is_finite() {
                return Err(Error::NonFinite {
                    context: "spectral path step",
                    component: i,
                    step: s,
                    path: path_index,
                });
            }
            state[i] = next;
        }
        model.apply_boundary(&mut state);
        values.extend_from_slice(&state);
    }
    Trajectory::new(*grid, m, values)
}

/// Convenience: a one-path [`PathSet`] wrapper used by the path export
/// command.
pub fn spectral_path_set(
    model: &ItoModel,
    grid: &TimeGrid,
    xi0: &[f64],
    zetas: &[Vec<f64>],
    k_order: usize,
) -> Result<PathSet> {
    let table = BasisTable::new(grid, k_order)?;
    let paths: Result<Vec<Trajectory>> = zetas
        .iter()
        .enumerate()
        .map(|(i, z)| spectral_path_with_table(model, grid, xi0, z, &table, i))
        .collect();
    PathSet::new(PathOrigin::Spectral, *grid, model.state_dim(), paths?)
}
