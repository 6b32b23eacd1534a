//! Sample designs over the spectral coefficient space.
//!
//! A design is an N x M matrix of standard-normal draws, one row per path and
//! one column per coefficient (flat index `wiener_dim * K + order`). Simple
//! random sampling draws every entry independently. Latin hypercube sampling
//! places exactly one point in each of N equal-probability strata per column,
//! then shuffles the strata across rows independently per column; the
//! marginals are stratified while the joint stays exchangeable.
//!
//! The optional decorrelation pass (Iman-Conover) rearranges values within
//! each column so the rank correlation between columns is pushed toward zero.
//! Column multisets are untouched, so stratification survives the pass.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{tags, SeqRng, Stream};
use crate::special::inverse_normal_cdf;

/// Where inside its stratum each probability point lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Uniform draw strictly inside the stratum.
    Uniform,
    /// Deterministic stratum midpoint.
    Midpoint,
}

impl Placement {
    pub fn name(self) -> &'static str {
        match self {
            Placement::Uniform => "uniform",
            Placement::Midpoint => "midpoint",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Placement::Uniform),
            "midpoint" => Ok(Placement::Midpoint),
            other => Err(Error::invalid(
                "placement",
                format!("unknown placement {other:?}; expected uniform or midpoint"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMethod {
    Srs,
    Lhs,
}

impl SampleMethod {
    pub fn name(self) -> &'static str {
        match self {
            SampleMethod::Srs => "srs",
            SampleMethod::Lhs => "lhs",
        }
    }
}

impl fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An N x M matrix of standard-normal coefficients, row-major.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    method: SampleMethod,
    decorrelated: bool,
    n_samples: usize,
    n_dims: usize,
    values: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(
        method: SampleMethod,
        decorrelated: bool,
        n_samples: usize,
        n_dims: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_samples == 0 || n_dims == 0 {
            return Err(Error::invalid("samples", "need at least one row and one column"));
        }
        if values.len() != n_samples * n_dims {
            return Err(Error::Dimension {
                context: "sample matrix",
                expected: n_samples * n_dims,
                actual: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", format!("non-finite entry {bad}")));
        }
        Ok(SampleMatrix { method, decorrelated, n_samples, n_dims, values })
    }

    pub fn method(&self) -> SampleMethod {
        self.method
    }

    pub fn decorrelated(&self) -> bool {
        self.decorrelated
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_dims..(i + 1) * self.n_dims]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.values[i * self.n_dims + d]).collect()
    }

    /// The first `n` rows as a standalone matrix. For an LHS design the
    /// subset keeps each kept row's stratified placement but is no longer a
    /// Latin hypercube over `n` strata.
    pub fn truncated(&self, n: usize) -> Result<SampleMatrix> {
        if n == 0 || n > self.n_samples {
            return Err(Error::invalid(
                "n",
                format!("need 1..={} rows, got {n}", self.n_samples),
            ));
        }
        SampleMatrix::new(
            self.method,
            self.decorrelated,
            n,
            self.n_dims,
            self.values[..n * self.n_dims].to_vec(),
        )
    }

    fn method_label(&self) -> String {
        if self.decorrelated {
            format!("{}-decorrelated", self.method)
        } else {
            self.method.to_string()
        }
    }
}

/// Independent standard-normal draws.
pub fn srs_normal(n_samples: usize, n_dims: usize, seed: u64) -> Result<SampleMatrix> {
    if n_samples == 0 || n_dims == 0 {
        return Err(Error::invalid("samples", "need at least one row and one column"));
    }
    let stream = Stream::new(seed).substream(tags::SRS);
    let values: Vec<f64> =
        (0..n_samples * n_dims).map(|c| stream.normal(c as u64)).collect();
    SampleMatrix::new(SampleMethod::Srs, false, n_samples, n_dims, values)
}

/// Latin hypercube design in standard-normal coordinates.
///
/// Column `d` holds the values `inv_Phi((k + u) / N)` for `k = 0..N`, with
/// `u` per [`Placement`], assigned to rows by an independent shuffle per
/// column.
pub fn lhs_normal(
    n_samples: usize,
    n_dims: usize,
    placement: Placement,
    seed: u64,
) -> Result<SampleMatrix> {
    if n_samples == 0 || n_dims == 0 {
        return Err(Error::invalid("samples", "need at least one row and one column"));
    }
    let n = n_samples as f64;
    let place = Stream::new(seed).substream(tags::LHS_PLACEMENT);
    let shuffle_root = Stream::new(seed).substream(tags::LHS_SHUFFLE);

    let mut values = vec![0.0; n_samples * n_dims];
    let mut column = vec![0.0; n_samples];
    for d in 0..n_dims {
        for (k, slot) in column.iter_mut().enumerate() {
            let u = match placement {
                // Coarse 32-bit draw: the offset stays far enough from the
                // stratum edges that p below cannot round onto k/N.
                Placement::Uniform => place.uniform_coarse((d * n_samples + k) as u64),
                Placement::Midpoint => 0.5,
            };
            let p = (k as f64 + u) / n;
            *slot = inverse_normal_cdf(p)?;
        }
        let mut rng = SeqRng::new(shuffle_root.substream(d as u64));
        rng.shuffle(&mut column);
        for (i, &v) in column.iter().enumerate() {
            values[i * n_dims + d] = v;
        }
    }
    SampleMatrix::new(SampleMethod::Lhs, false, n_samples, n_dims, values)
}

/// Result of a decorrelation pass.
#[derive(Debug, Clone)]
pub struct Decorrelated {
    pub samples: SampleMatrix,
    /// True when the rank-score correlation matrix was not positive definite
    /// and independent per-column shuffles were used instead.
    pub fallback: bool,
}

/// Iman-Conover rank decorrelation toward the identity correlation target.
///
/// Each column is replaced by a permutation of itself, so marginal multisets
/// (and LHS stratification) are preserved exactly. When the score correlation
/// matrix is rank deficient, for example with duplicated columns or N <= M,
/// the pass falls back to independent random column shuffles and reports it.
pub fn decorrelate(samples: &SampleMatrix, seed: u64) -> Result<Decorrelated> {
    let n = samples.n_samples();
    let m = samples.n_dims();
    if n < 2 {
        return Err(Error::invalid("samples", "decorrelation needs at least two rows"));
    }
    if n <= m {
        log::warn!(
            "decorrelating {n} samples over {m} dimensions; \
             rank correlations cannot all be controlled"
        );
    }

    // Van der Waerden scores in rank order.
    let vdw: Vec<f64> = (1..=n)
        .map(|r| inverse_normal_cdf(r as f64 / (n + 1) as f64))
        .collect::<Result<_>>()?;

    // Score matrix S: column d carries the scores arranged in the rank order
    // of the input column, so corr(S) mirrors the input's rank dependence.
    let mut scores = vec![0.0; n * m];
    for d in 0..m {
        let col = samples.column(d);
        for (r, &i) in argsort(&col).iter().enumerate() {
            scores[i * m + d] = vdw[r];
        }
    }

    let corr = score_correlation(&scores, n, m);
    let chol = linalg::cholesky(&corr, m, "rank correlation");

    let (mut out, fallback) = match chol {
        Ok(l) => {
            // T = L^{-1} S decorrelates the scores; each output column takes
            // the input column's values in T's rank order.
            let mut t = vec![0.0; n * m];
            let mut row = vec![0.0; m];
            for i in 0..n {
                row.copy_from_slice(&scores[i * m..(i + 1) * m]);
                linalg::solve_lower(&l, m, &mut row);
                t[i * m..(i + 1) * m].copy_from_slice(&row);
            }
            let mut values = vec![0.0; n * m];
            for d in 0..m {
                let mut sorted = samples.column(d);
                sorted.sort_by(f64::total_cmp);
                let tcol: Vec<f64> = (0..n).map(|i| t[i * m + d]).collect();
                for (r, &i) in argsort(&tcol).iter().enumerate() {
                    values[i * m + d] = sorted[r];
                }
            }
            (values, false)
        }
        Err(_) => {
            let root = Stream::new(seed).substream(tags::FALLBACK_PERMUTATION);
            let mut values = vec![0.0; n * m];
            for d in 0..m {
                let mut col = samples.column(d);
                let mut rng = SeqRng::new(root.substream(d as u64));
                rng.shuffle(&mut col);
                for (i, &v) in col.iter().enumerate() {
                    values[i * m + d] = v;
                }
            }
            (values, true)
        }
    };

    if fallback {
        log::warn!("rank correlation matrix not positive definite; falling back to independent column shuffles");
    }
    let samples = SampleMatrix::new(samples.method(), true, n, m, std::mem::take(&mut out))?;
    Ok(Decorrelated { samples, fallback })
}

/// Mean absolute off-diagonal Pearson correlation between columns.
pub fn mean_abs_correlation(samples: &SampleMatrix) -> f64 {
    let n = samples.n_samples();
    let m = samples.n_dims();
    if m < 2 {
        return 0.0;
    }
    let cols: Vec<Vec<f64>> = (0..m).map(|d| samples.column(d)).collect();
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    for a in 0..m {
        for b in (a + 1)..m {
            let mut sab = 0.0;
            let mut saa = 0.0;
            let mut sbb = 0.0;
            for i in 0..n {
                let da = cols[a][i] - means[a];
                let db = cols[b][i] - means[b];
                sab += da * db;
                saa += da * da;
                sbb += db * db;
            }
            let denom = (saa * sbb).sqrt();
            if denom > 0.0 {
                total += (sab / denom).abs();
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

fn score_correlation(scores: &[f64], n: usize, m: usize) -> Vec<f64> {
    // Scores have zero mean by construction; normalize by column norms.
    let mut norms = vec![0.0; m];
    for i in 0..n {
        for d in 0..m {
            let v = scores[i * m + d];
            norms[d] += v * v;
        }
    }
    let mut corr = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let mut s = 0.0;
            for i in 0..n {
                s += scores[i * m + a] * scores[i * m + b];
            }
            let v = s / (norms[a] * norms[b]).sqrt();
            corr[a * m + b] = v;
            corr[b * m + a] = v;
        }
    }
    corr
}

/// Writes a design as CSV with a method comment line:
///
/// ```text
/// # method: lhs-decorrelated
/// sample_id,z_1,z_2,...
/// 0,-0.43,1.02,...
/// ```
pub fn write_samples_csv<W: Write>(mut w: W, samples: &SampleMatrix) -> Result<()> {
    writeln!(w, "# method: {}", samples.method_label())?;
    let mut header = String::from("sample_id");
    for d in 1..=samples.n_dims() {
        header.push_str(&format!(",z_{d}"));
    }
    writeln!(w, "{header}")?;
    for i in 0..samples.n_samples() {
        let mut line = i.to_string();
        for v in samples.row(i) {
            line.push_str(&format!(",{v}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_samples_file(path: &Path, samples: &SampleMatrix) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_samples_csv(std::io::BufWriter::new(file), samples)
}

pub fn read_samples_csv<R: BufRead>(mut r: R) -> Result<SampleMatrix> {
    let mut first = String::new();
    r.read_line(&mut first)?;
    let label = first
        .trim()
        .strip_prefix("# method:")
        .ok_or_else(|| Error::parse(1, "expected '# method: <name>' comment line"))?
        .trim();
    let (base, decorrelated) = match label.strip_suffix("-decorrelated") {
        Some(b) => (b, true),
        None => (label, false),
    };
    let method = match base {
        "srs" => SampleMethod::Srs,
        "lhs" => SampleMethod::Lhs,
        other => return Err(Error::parse(1, format!("unknown sampling method {other:?}"))),
    };

    let mut header = String::new();
    r.read_line(&mut header)?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.first() != Some(&"sample_id") || cols.len() < 2 {
        return Err(Error::parse(2, "expected header sample_id,z_1,..."));
    }
    for (d, name) in cols[1..].iter().enumerate() {
        if *name != format!("z_{}", d + 1) {
            return Err(Error::parse(2, format!("expected column z_{}, got {name:?}", d + 1)));
        }
    }
    let n_dims = cols.len() - 1;

    let mut values = Vec::new();
    let mut n_samples = 0usize;
    for (offset, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = offset + 3;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != n_dims + 1 {
            return Err(Error::parse(
                lineno,
                format!("expected {} fields, got {}", n_dims + 1, fields.len()),
            ));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad sample id {:?}", fields[0])))?;
        if id != n_samples {
            return Err(Error::parse(lineno, format!("expected sample id {n_samples}, got {id}")));
        }
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad value {f:?}")))?;
            values.push(v);
        }
        n_samples += 1;
    }
    SampleMatrix::new(method, decorrelated, n_samples, n_dims, values)
}

pub fn read_samples_file(path: &Path) -> Result<SampleMatrix> {
    let file = std::fs::File::open(path)?;
    read_samples_csv(std::io::BufReader::new(file))
}
