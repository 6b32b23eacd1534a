//! Monte Carlo orchestration: the traditional route (one Euler-Maruyama
//! path per sample) and the fast route (Latin hypercube over spectral
//! coefficients, one Runge-Kutta path per sample), with shared statistics
//! accumulation and the sampling-size benchmark.
//!
//! Estimates come in two modes. Prefix mode records, after each sample, the
//! running mean/variance of the first N responses; degrees of convergence
//! are ranges over five successive prefix estimates. Rerun mode evaluates
//! each sampling size as an independent run with its own design, matching
//! benchmark tables that quote one result per size; it is the right mode
//! for judging the fast method, whose design at size N is not a prefix of
//! the design at size N+1.
//!
//! All sample evaluations are pure functions of (seed, sample index), so a
//! worker pool of any width produces byte-identical reports.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ItoModel;
use crate::response::ResponseFn;
use crate::rng::{tags, Stream};
use crate::sampling::{self, Placement, SampleMatrix};
use crate::sde::{simulate_em_path, TimeGrid};
use crate::spectral::{spectral_path_with_table, BasisTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Mean,
    Variance,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Variance => "variance",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Statistic::Mean),
            "variance" => Ok(Statistic::Variance),
            other => Err(Error::invalid(
                "statistic",
                format!("unknown statistic {other:?}; expected mean or variance"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    Prefix,
    Rerun,
}

impl EstimateMode {
    pub fn name(self) -> &'static str {
        match self {
            EstimateMode::Prefix => "prefix",
            EstimateMode::Rerun => "rerun",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(EstimateMode::Prefix),
            "rerun" => Ok(EstimateMode::Rerun),
            other => Err(Error::invalid(
                "mode",
                format!("unknown estimate mode {other:?}; expected prefix or rerun"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Traditional,
    Fast { decorrelated: bool },
}

impl MethodTag {
    pub fn label(self) -> &'static str {
        match self {
            MethodTag::Traditional => "traditional",
            MethodTag::Fast { decorrelated: true } => "fast",
            MethodTag::Fast { decorrelated: false } => "fast-plain",
        }
    }
}

/// Statistics of one run: per-size prefix estimates, their convergence
/// degrees (from size 5 on), and the final values.
#[derive(Debug, Clone)]
pub struct StatsReport {
    pub method: MethodTag,
    pub seed: u64,
    pub k_order: Option<usize>,
    pub prefix_mean: Vec<f64>,
    pub prefix_variance: Vec<f64>,
    pub degree_mean: Vec<f64>,
    pub degree_variance: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl StatsReport {
    /// Builds a report from response values in sample order, with one-pass
    /// (Welford) accumulation. The size-1 variance estimate is defined as 0.
    pub fn from_values(
        method: MethodTag,
        seed: u64,
        k_order: Option<usize>,
        values: &[f64],
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("values", "need at least one sample"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("values", format!("non-finite response {bad}")));
        }
        let mut prefix_mean = Vec::with_capacity(values.len());
        let mut prefix_variance = Vec::with_capacity(values.len());
        let mut mean = 0.0f64;
        let mut m2 = 0.0f64;
        for (i, &x) in values.iter().enumerate() {
            let n = (i + 1) as f64;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
            prefix_mean.push(mean);
            prefix_variance.push(if i == 0 { 0.0 } else { m2 / (n - 1.0) });
        }
        let degree_mean = degree_sequence(&prefix_mean);
        let degree_variance = degree_sequence(&prefix_variance);
        Ok(StatsReport {
            method,
            seed,
            k_order,
            mean: *prefix_mean.last().unwrap(),
            variance: *prefix_variance.last().unwrap(),
            prefix_mean,
            prefix_variance,
            degree_mean,
            degree_variance,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.prefix_mean.len()
    }

    pub fn prefix(&self, stat: Statistic) -> &[f64] {
        match stat {
            Statistic::Mean => &self.prefix_mean,
            Statistic::Variance => &self.prefix_variance,
        }
    }

    /// Degree of convergence at sizes 5..=N (empty when N < 5).
    pub fn degrees(&self, stat: Statistic) -> &[f64] {
        match stat {
            Statistic::Mean => &self.degree_mean,
            Statistic::Variance => &self.degree_variance,
        }
    }
}

fn degree_sequence(prefix: &[f64]) -> Vec<f64> {
    if prefix.len() < 5 {
        return Vec::new();
    }
    prefix.windows(5).map(range_of).collect()
}

fn range_of(window: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in window {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Max minus min over the last five estimates.
pub fn convergence_degree(estimates: &[f64]) -> Result<f64> {
    if estimates.len() < 5 {
        return Err(Error::invalid(
            "estimates",
            format!("degree needs at least 5 estimates, got {}", estimates.len()),
        ));
    }
    Ok(range_of(&estimates[estimates.len() - 5..]))
}

fn eval_parallel<F>(n: usize, workers: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    if workers == 0 {
        return Err(Error::invalid("workers", "need at least one worker"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", format!("worker pool failed to start: {e}")))?;
    let results: Vec<Result<f64>> = pool.install(|| (0..n).into_par_iter().map(&f).collect());
    // Sequential scan keeps the reported error (lowest sample index)
    // independent of scheduling.
    results.into_iter().collect()
}

fn sample_error(i: usize, e: Error) -> Error {
    match e {
        e @ Error::NonFinite { .. } => e,
        other => Error::Simulator(format!("sample {i}: {other}")),
    }
}

/// Traditional route: one Euler-Maruyama path per sample.
pub fn run_traditional_mcs<R: ResponseFn + ?Sized>(
    model: &ItoModel,
    rrf: &R,
    grid: &TimeGrid,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<StatsReport> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "need at least one sample"));
    }
    let values = eval_parallel(n_samples, workers, |i| {
        let traj = simulate_em_path(model, grid, model.initial(), seed, i)?;
        rrf.response(&traj).map_err(|e| sample_error(i, e))
    })?;
    StatsReport::from_values(MethodTag::Traditional, seed, None, &values)
}

/// Fast route: Latin hypercube over the n*K spectral coefficients (with the
/// decorrelation pass unless disabled), one deterministic Runge-Kutta path
/// per design row.
#[allow(clippy::too_many_arguments)]
pub fn run_fast_mcs<R: ResponseFn + ?Sized>(
    model: &ItoModel,
    rrf: &R,
    grid: &TimeGrid,
    n_samples: usize,
    k_order: usize,
    seed: u64,
    placement: Placement,
    decorrelate: bool,
    workers: usize,
) -> Result<StatsReport> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "need at least one sample"));
    }
    let design_seed = Stream::new(seed).substream(tags::FAST_DESIGN).seed();
    let m = model.wiener_dim() * k_order;
    let mut design = sampling::lhs_normal(n_samples, m, placement, design_seed)?;
    // A single row cannot be decorrelated; the pass starts at two samples.
    if decorrelate && n_samples >= 2 {
        design = sampling::decorrelate(&design, design_seed)?.samples;
    }
    run_fast_mcs_from_samples(model, rrf, grid, &design, k_order, seed, workers)
}

/// Fast route over a caller-supplied coefficient design (row = sample,
/// columns = `wiener_dim * k_order` flat coefficients).
pub fn run_fast_mcs_from_samples<R: ResponseFn + ?Sized>(
    model: &ItoModel,
    rrf: &R,
    grid: &TimeGrid,
    samples: &SampleMatrix,
    k_order: usize,
    seed: u64,
    workers: usize,
) -> Result<StatsReport> {
    let m = model.wiener_dim() * k_order;
    if samples.n_dims() != m {
        return Err(Error::Dimension {
            context: "coefficient design",
            expected: m,
            actual: samples.n_dims(),
        });
    }
    let table = BasisTable::new(grid, k_order)?;
    let values = eval_parallel(samples.n_samples(), workers, |i| {
        let traj =
            spectral_path_with_table(model, grid, model.initial(), samples.row(i), &table, i)?;
        rrf.response(&traj).map_err(|e| sample_error(i, e))
    })?;
    StatsReport::from_values(
        MethodTag::Fast { decorrelated: samples.decorrelated() },
        seed,
        Some(k_order),
        &values,
    )
}

/// Benchmark outcome for one statistic.
#[derive(Debug, Clone, Copy)]
pub struct CompareOutcome {
    pub statistic: Statistic,
    /// Reference degree: method A's degree at its full budget.
    pub target_degree: f64,
    pub n_a: usize,
    /// First size at which B's degree reaches the target; `None` when B
    /// never reaches it within its budget.
    pub n_b: Option<usize>,
    pub speedup: Option<f64>,
}

/// First-crossing comparison of two prefix reports: the target is A's
/// degree at its full budget, and each method is credited with the first
/// size at which its own degree sequence reaches that target. Identical
/// reports therefore score speedup exactly 1.
pub fn compare_methods(
    a: &StatsReport,
    b: &StatsReport,
    statistic: Statistic,
) -> Result<CompareOutcome> {
    let da = a.degrees(statistic);
    let db = b.degrees(statistic);
    if da.is_empty() || db.is_empty() {
        return Err(Error::invalid(
            "reports",
            "degree comparison needs at least 5 samples per method",
        ));
    }
    let target_degree = *da.last().unwrap();
    let n_a = 5 + da.iter().position(|&d| d <= target_degree).unwrap();
    let n_b = db.iter().position(|&d| d <= target_degree).map(|i| 5 + i);
    let speedup = n_b.map(|nb| n_a as f64 / nb as f64);
    Ok(CompareOutcome { statistic, target_degree, n_a, n_b, speedup })
}

/// Rerun-mode reference: independent traditional runs at the last five
/// sizes of the budget, and their degree of convergence.
#[derive(Debug, Clone)]
pub struct RerunTail {
    pub sizes: Vec<usize>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub degree_mean: f64,
    pub degree_variance: f64,
}

pub fn rerun_traditional_tail<R: ResponseFn + ?Sized>(
    model: &ItoModel,
    rrf: &R,
    grid: &TimeGrid,
    budget: usize,
    seed: u64,
    workers: usize,
) -> Result<RerunTail> {
    if budget < 5 {
        return Err(Error::invalid(
            "budget",
            format!("degree computation needs at least 5 samples, got {budget}"),
        ));
    }
    let root = Stream::new(seed).substream(tags::RERUN_DESIGN);
    let mut sizes = Vec::with_capacity(5);
    let mut mean = Vec::with_capacity(5);
    let mut variance = Vec::with_capacity(5);
    for n in budget - 4..=budget {
        let run = run_traditional_mcs(model, rrf, grid, n, root.substream(n as u64).seed(), workers)?;
        sizes.push(n);
        mean.push(run.mean);
        variance.push(run.variance);
    }
    Ok(RerunTail {
        degree_mean: range_of(&mean),
        degree_variance: range_of(&variance),
        sizes,
        mean,
        variance,
    })
}

/// Rerun-mode scan of the fast method: independent designs of size 1, 2,
/// ... up to the budget, stopping once both statistics' degrees have
/// reached their targets.
#[derive(Debug, Clone)]
pub struct FastScan {
    pub sizes: Vec<usize>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Degrees at sizes 5..=last, aligned with `sizes[4..]`.
    pub degree_mean: Vec<f64>,
    pub degree_variance: Vec<f64>,
    pub n_mean: Option<usize>,
    pub n_variance: Option<usize>,
}

#[allow(clippy::too_many_arguments)]
pub fn rerun_fast_scan<R: ResponseFn + ?Sized>(
    model: &ItoModel,
    rrf: &R,
    grid: &TimeGrid,
    budget: usize,
    k_order: usize,
    seed: u64,
    placement: Placement,
    decorrelate: bool,
    target_mean: f64,
    target_variance: f64,
    workers: usize,
) -> Result<FastScan> {
    if budget < 5 {
        return Err(Error::invalid(
            "budget",
            format!("degree computation needs at least 5 samples, got {budget}"),
        ));
    }
    let root = Stream::new(seed).substream(tags::RERUN_DESIGN);
    let mut scan = FastScan {
        sizes: Vec::new(),
        mean: Vec::new(),
        variance: Vec::new(),
        degree_mean: Vec::new(),
        degree_variance: Vec::new(),
        n_mean: None,
        n_variance: None,
    };
    for n in 1..=budget {
        let run = run_fast_mcs(
            model,
            rrf,
            grid,
            n,
            k_order,
            root.substream(n as u64).seed(),
            placement,
            decorrelate,
            workers,
        )?;
        scan.sizes.push(n);
        scan.mean.push(run.mean);
        scan.variance.push(run.variance);
        if n >= 5 {
            let dm = range_of(&scan.mean[n - 5..]);
            let dv = range_of(&scan.variance[n - 5..]);
            scan.degree_mean.push(dm);
            scan.degree_variance.push(dv);
            if scan.n_mean.is_none() && dm <= target_mean {
                scan.n_mean = Some(n);
            }
            if scan.n_variance.is_none() && dv <= target_variance {
                scan.n_variance = Some(n);
            }
            if scan.n_mean.is_some() && scan.n_variance.is_some() {
                break;
            }
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone)]
pub enum ComparisonDetail {
    Prefix { traditional: StatsReport, fast: StatsReport },
    Rerun { traditional: RerunTail, fast: FastScan },
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub mode: EstimateMode,
    pub mean: CompareOutcome,
    pub variance: CompareOutcome,
    pub detail: ComparisonDetail,
}

/// Runs both methods and benchmarks them on both statistics.
///
/// Prefix mode compares first crossings of the two prefix-degree sequences
/// symmetrically. Rerun mode follows the benchmark-table convention: the
/// traditional method is charged its full budget, the fast method the first
/// independent size whose degree reaches the traditional degree.
///
/// The two response arguments must evaluate the same functional; they are
/// separate so that adapters carrying per-scheme metadata (such as the
/// child-process adapter's path-origin tag) can be paired per arm.
#[allow(clippy::too_many_arguments)]
pub fn run_comparison<A: ResponseFn + ?Sized, B: ResponseFn + ?Sized>(
    model: &ItoModel,
    rrf_traditional: &A,
    rrf_fast: &B,
    grid: &TimeGrid,
    traditional_n: usize,
    fast_budget: usize,
    k_order: usize,
    seed: u64,
    placement: Placement,
    decorrelate: bool,
    mode: EstimateMode,
    workers: usize,
) -> Result<ComparisonReport> {
    match mode {
        EstimateMode::Prefix => {
            let traditional =
                run_traditional_mcs(model, rrf_traditional, grid, traditional_n, seed, workers)?;
            let fast = run_fast_mcs(
                model,
                rrf_fast,
                grid,
                fast_budget,
                k_order,
                seed,
                placement,
                decorrelate,
                workers,
            )?;
            let mean = compare_methods(&traditional, &fast, Statistic::Mean)?;
            let variance = compare_methods(&traditional, &fast, Statistic::Variance)?;
            Ok(ComparisonReport {
                mode,
                mean,
                variance,
                detail: ComparisonDetail::Prefix { traditional, fast },
            })
        }
        EstimateMode::Rerun => {
            let tail =
                rerun_traditional_tail(model, rrf_traditional, grid, traditional_n, seed, workers)?;
            let scan = rerun_fast_scan(
                model,
                rrf_fast,
                grid,
                fast_budget,
                k_order,
                seed,
                placement,
                decorrelate,
                tail.degree_mean,
                tail.degree_variance,
                workers,
            )?;
            let mean = CompareOutcome {
                statistic: Statistic::Mean,
                target_degree: tail.degree_mean,
                n_a: traditional_n,
                n_b: scan.n_mean,
                speedup: scan.n_mean.map(|nb| traditional_n as f64 / nb as f64),
            };
            let variance = CompareOutcome {
                statistic: Statistic::Variance,
                target_degree: tail.degree_variance,
                n_a: traditional_n,
                n_b: scan.n_variance,
                speedup: scan.n_variance.map(|nb| traditional_n as f64 / nb as f64),
            };
            Ok(ComparisonReport {
                mode,
                mean,
                variance,
                detail: ComparisonDetail::Rerun { traditional: tail, fast: scan },
            })
        }
    }
}

/// Machine-readable run summary, stable byte-for-byte across reruns.
pub fn write_report_text<W: Write>(mut w: W, report: &StatsReport) -> Result<()> {
    writeln!(w, "mcs report")?;
    writeln!(w, "method: {}", report.method.label())?;
    writeln!(w, "seed: {}", report.seed)?;
    writeln!(w, "samples: {}", report.n_samples())?;
    if let Some(k) = report.k_order {
        writeln!(w, "k: {k}")?;
    }
    writeln!(w, "mean: {}", report.mean)?;
    writeln!(w, "variance: {}", report.variance)?;
    match report.degree_mean.last() {
        Some(d) => writeln!(w, "degree_mean: {d}")?,
        None => writeln!(w, "degree_mean: n/a")?,
    }
    match report.degree_variance.last() {
        Some(d) => writeln!(w, "degree_variance: {d}")?,
        None => writeln!(w, "degree_variance: n/a")?,
    }
    Ok(())
}

const SERIES_HEADER: &str = "N,mean,variance,degree_mean,degree_variance";

/// Per-size estimates as CSV for plotting; degree columns are empty before
/// size 5.
pub fn write_prefix_csv<W: Write>(mut w: W, report: &StatsReport) -> Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for i in 0..report.n_samples() {
        let (dm, dv) = if i >= 4 {
            (report.degree_mean[i - 4].to_string(), report.degree_variance[i - 4].to_string())
        } else {
            (String::new(), String::new())
        };
        writeln!(
            w,
            "{},{},{},{},{}",
            i + 1,
            report.prefix_mean[i],
            report.prefix_variance[i],
            dm,
            dv
        )?;
    }
    Ok(())
}

pub fn write_tail_csv<W: Write>(mut w: W, tail: &RerunTail) -> Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for (i, &n) in tail.sizes.iter().enumerate() {
        let (dm, dv) = if i + 1 == tail.sizes.len() {
            (tail.degree_mean.to_string(), tail.degree_variance.to_string())
        } else {
            (String::new(), String::new())
        };
        writeln!(w, "{},{},{},{},{}", n, tail.mean[i], tail.variance[i], dm, dv)?;
    }
    Ok(())
}

pub fn write_scan_csv<W: Write>(mut w: W, scan: &FastScan) -> Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for (i, &n) in scan.sizes.iter().enumerate() {
        let (dm, dv) = if i >= 4 {
            (scan.degree_mean[i - 4].to_string(), scan.degree_variance[i - 4].to_string())
        } else {
            (String::new(), String::new())
        };
        writeln!(w, "{},{},{},{},{}", n, scan.mean[i], scan.variance[i], dm, dv)?;
    }
    Ok(())
}

pub fn write_comparison_text<W: Write>(mut w: W, report: &ComparisonReport) -> Result<()> {
    writeln!(w, "method comparison")?;
    writeln!(w, "mode: {}", report.mode.name())?;
    for outcome in [&report.mean, &report.variance] {
        writeln!(w, "statistic: {}", outcome.statistic.name())?;
        writeln!(w, "target_degree: {}", outcome.target_degree)?;
        writeln!(w, "n_traditional: {}", outcome.n_a)?;
        match outcome.n_b {
            Some(nb) => writeln!(w, "n_fast: {nb}")?,
            None => writeln!(w, "n_fast: not-reached")?,
        }
        match outcome.speedup {
            Some(s) => writeln!(w, "speedup: {s}")?,
            None => writeln!(w, "speedup: not-reached")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_preset, BoundaryPolicy, DiffusionMap, DistributionPreset, PresetKind};
    use crate::poly::{Polynomial, PolynomialMap};
    use crate::response::{EndpointResponse, FnResponse};

    fn gaussian() -> ItoModel {
        make_preset(&DistributionPreset::new(PresetKind::Gaussian, 0.0, 1.0).unwrap())
    }

    fn zero_diffusion() -> ItoModel {
        let drift =
            PolynomialMap::new(1, 1, 1, vec![Polynomial::univariate(&[0.0, -1.0])]).unwrap();
        let diffusion =
            DiffusionMap::from_polynomials(1, 1, 1, vec![Polynomial::zero(1)]).unwrap();
        ItoModel::new(drift, diffusion, vec![BoundaryPolicy::None], vec![1.0]).unwrap()
    }

    fn unit_diffusion() -> ItoModel {
        let drift = PolynomialMap::new(1, 1, 1, vec![Polynomial::zero(1)]).unwrap();
        let diffusion =
            DiffusionMap::from_polynomials(1, 1, 1, vec![Polynomial::constant(1, 1.0)]).unwrap();
        ItoModel::new(drift, diffusion, vec![BoundaryPolicy::None], vec![0.0]).unwrap()
    }

    #[test]
    fn constant_response_has_exact_moments() {
        let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        let rrf = FnResponse(|_: &crate::sde::Trajectory| Ok(7.0));
        let report = run_traditional_mcs(&gaussian(), &rrf, &grid, 50, 1, 1).unwrap();
        assert_eq!(report.mean, 7.0);
        assert_eq!(report.variance, 0.0);
        assert!(report.degree_mean.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn zero_diffusion_gives_zero_variance_and_unit_speedup() {
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let model = zero_diffusion();
        let rrf = EndpointResponse { component: 0 };
        let trad = run_traditional_mcs(&model, &rrf, &grid, 30, 5, 1).unwrap();
        let fast =
            run_fast_mcs(&model, &rrf, &grid, 30, 4, 5, Placement::Uniform, true, 1).unwrap();
        assert_eq!(trad.variance, 0.0);
        assert_eq!(fast.variance, 0.0);
        let cmp = compare_methods(&trad, &fast, Statistic::Mean).unwrap();
        assert_eq!(cmp.n_a, 5);
        assert_eq!(cmp.n_b, Some(5));
        assert_eq!(cmp.speedup, Some(1.0));
    }

    #[test]
    fn endpoint_statistics_match_stationary_moments() {
        let grid = TimeGrid::new(0.0, 8.0, 0.02).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let report = run_traditional_mcs(&gaussian(), &rrf, &grid, 4000, 77, 1).unwrap();
        assert!(report.mean.abs() < 0.05, "mean {}", report.mean);
        // Euler-Maruyama inflates the stationary variance to b / (1 - h/2).
        let target = 1.0 / (1.0 - 0.01);
        assert!(
            (report.variance - target).abs() < 0.05 * target,
            "variance {}",
            report.variance
        );
    }

    #[test]
    fn prefix_estimates_depend_only_on_prefix() {
        let grid = TimeGrid::new(0.0, 2.0, 0.05).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let long = run_traditional_mcs(&gaussian(), &rrf, &grid, 40, 9, 1).unwrap();
        let short = run_traditional_mcs(&gaussian(), &rrf, &grid, 25, 9, 1).unwrap();
        assert_eq!(&long.prefix_mean[..25], &short.prefix_mean[..]);
        assert_eq!(&long.prefix_variance[..25], &short.prefix_variance[..]);
    }

    #[test]
    fn reports_are_identical_across_worker_widths() {
        let grid = TimeGrid::new(0.0, 2.0, 0.05).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let narrow =
            run_fast_mcs(&gaussian(), &rrf, &grid, 64, 6, 3, Placement::Uniform, true, 1).unwrap();
        let wide =
            run_fast_mcs(&gaussian(), &rrf, &grid, 64, 6, 3, Placement::Uniform, true, 8).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_report_text(&mut a, &narrow).unwrap();
        write_report_text(&mut b, &wide).unwrap();
        assert_eq!(a, b);
        let mut ca = Vec::new();
        let mut cb = Vec::new();
        write_prefix_csv(&mut ca, &narrow).unwrap();
        write_prefix_csv(&mut cb, &wide).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn degree_hand_values() {
        assert_eq!(convergence_degree(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 4.0);
        let d = convergence_degree(&[0.0, 9.0, 3.0, 3.0, 3.0, 3.0, 3.002]).unwrap();
        assert!((d - 0.002).abs() < 1e-12);
        assert_eq!(convergence_degree(&[2.0; 8]).unwrap(), 0.0);
        assert!(convergence_degree(&[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn identical_reports_score_unit_speedup() {
        let grid = TimeGrid::new(0.0, 2.0, 0.05).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let a = run_traditional_mcs(&gaussian(), &rrf, &grid, 60, 4, 1).unwrap();
        let b = run_traditional_mcs(&gaussian(), &rrf, &grid, 60, 4, 1).unwrap();
        for stat in [Statistic::Mean, Statistic::Variance] {
            let cmp = compare_methods(&a, &b, stat).unwrap();
            assert_eq!(cmp.n_a, cmp.n_b.unwrap());
            assert_eq!(cmp.speedup, Some(1.0));
        }
    }

    #[test]
    fn unreachable_target_reports_not_reached() {
        let a = StatsReport::from_values(MethodTag::Traditional, 0, None, &[3.0; 40]).unwrap();
        let noisy: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let b = StatsReport::from_values(MethodTag::Traditional, 0, None, &noisy).unwrap();
        let cmp = compare_methods(&a, &b, Statistic::Mean).unwrap();
        assert_eq!(cmp.target_degree, 0.0);
        assert_eq!(cmp.n_b, None);
        assert_eq!(cmp.speedup, None);
    }

    #[test]
    fn traditional_estimator_is_unbiased() {
        let grid = TimeGrid::new(0.0, 4.0, 0.02).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let model = gaussian();
        let reps = 200;
        let mut grand = 0.0;
        for r in 0..reps {
            let report = run_traditional_mcs(&model, &rrf, &grid, 50, 1000 + r, 1).unwrap();
            grand += report.mean;
        }
        grand /= reps as f64;
        // 10^4 endpoint draws of variance ~1: three standard errors.
        assert!(grand.abs() < 0.03, "grand mean {grand}");
    }

    #[test]
    fn lhs_design_beats_srs_on_linear_response() {
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap();
        let model = unit_diffusion();
        let rrf = EndpointResponse { component: 0 };
        let reps = 200;
        let n = 16;
        let mut fast_means = Vec::with_capacity(reps);
        let mut trad_means = Vec::with_capacity(reps);
        for r in 0..reps as u64 {
            let fast =
                run_fast_mcs(&model, &rrf, &grid, n, 2, r, Placement::Uniform, false, 1).unwrap();
            fast_means.push(fast.mean);
            trad_means.push(run_traditional_mcs(&model, &rrf, &grid, n, r, 1).unwrap().mean);
        }
        let var = |xs: &[f64]| {
            let mu = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64
        };
        let vf = var(&fast_means);
        let vt = var(&trad_means);
        assert!(vf < 0.2 * vt, "fast {vf} vs traditional {vt}");
    }

    #[test]
    fn fast_and_traditional_means_agree_on_wind_model() {
        let model = crate::model::wind_model();
        let grid = TimeGrid::new(0.0, 30.0, 0.05).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let n = 400;
        let trad = run_traditional_mcs(&model, &rrf, &grid, n, 21, 1).unwrap();
        let fast =
            run_fast_mcs(&model, &rrf, &grid, n, 6, 21, Placement::Uniform, true, 1).unwrap();
        let band = 2.576 * (trad.variance / n as f64 + fast.variance / n as f64).sqrt();
        assert!(
            (trad.mean - fast.mean).abs() < band,
            "|{} - {}| vs band {band}",
            trad.mean,
            fast.mean
        );
    }

    #[test]
    fn rerun_comparison_on_zero_diffusion_charges_full_budget() {
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let model = zero_diffusion();
        let rrf = EndpointResponse { component: 0 };
        let report = run_comparison(
            &model,
            &rrf,
            &rrf,
            &grid,
            50,
            40,
            4,
            3,
            Placement::Uniform,
            true,
            EstimateMode::Rerun,
            1,
        )
        .unwrap();
        assert_eq!(report.mean.target_degree, 0.0);
        assert_eq!(report.mean.n_a, 50);
        assert_eq!(report.mean.n_b, Some(5));
        assert_eq!(report.mean.speedup, Some(10.0));
        assert!(run_comparison(
            &model,
            &rrf,
            &rrf,
            &grid,
            4,
            40,
            4,
            3,
            Placement::Uniform,
            true,
            EstimateMode::Rerun,
            1
        )
        .is_err());
    }

    #[test]
    fn prefix_comparison_smoke() {
        let grid = TimeGrid::new(0.0, 5.0, 0.05).unwrap();
        let rrf = EndpointResponse { component: 0 };
        let report = run_comparison(
            &gaussian(),
            &rrf,
            &rrf,
            &grid,
            80,
            80,
            6,
            11,
            Placement::Uniform,
            true,
            EstimateMode::Prefix,
            1,
        )
        .unwrap();
        assert!(report.mean.n_a >= 5 && report.mean.n_a <= 80);
        assert!(report.mean.target_degree >= 0.0);
        let mut text = Vec::new();
        write_comparison_text(&mut text, &report).unwrap();
        let s = String::from_utf8(text).unwrap();
        assert!(s.contains("mode: prefix"));
        assert!(s.contains("statistic: variance"));
    }

    #[test]
    fn report_text_layout() {
        let report =
            StatsReport::from_values(MethodTag::Fast { decorrelated: true }, 9, Some(6), &[1.0, 2.0])
                .unwrap();
        let mut buf = Vec::new();
        write_report_text(&mut buf, &report).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "mcs report\nmethod: fast\nseed: 9\nsamples: 2\nk: 6\nmean: 1.5\nvariance: 0.5\ndegree_mean: n/a\ndegree_variance: n/a\n"
        );
    }

    #[test]
    fn prefix_csv_layout() {
        let report = StatsReport::from_values(
            MethodTag::Traditional,
            0,
            None,
            &[1.0, 1.0, 1.0, 1.0, 1.0, 2.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_prefix_csv(&mut buf, &report).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "N,mean,variance,degree_mean,degree_variance");
        assert_eq!(lines[1], "1,1,0,,");
        assert!(lines[5].starts_with("5,1,0,0,0"));
        assert_eq!(lines.len(), 7);
    }
}
