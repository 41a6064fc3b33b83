//! Labeled two-class datasets: seeded Gaussian generators for the two
//! reference problems (orthogonal means, signal in white noise) and CSV I/O.
//!
//! Random streams come from ChaCha8 seeded with `seed_from_u64`, and normals
//! from the ziggurat sampler of `rand_distr`. Within this crate the same seed
//! always yields the same rows on every platform.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::moments::normalize_signal;
use crate::scalar::{dot, norm_sq, Real};
use crate::spectral::{sym_eig, SymMatrix};

/// Class index, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    One = 1,
    Two = 2,
}

impl ClassLabel {
    pub const BOTH: [ClassLabel; 2] = [ClassLabel::One, ClassLabel::Two];

    /// 0 for class 1, 1 for class 2.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(ClassLabel::One),
            2 => Some(ClassLabel::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            ClassLabel::One => ClassLabel::Two,
            ClassLabel::Two => ClassLabel::One,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Rows of `(label, feature vector)` sharing dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    n: usize,
    rows: Vec<(ClassLabel, Vec<T>)>,
}

impl<T: Real> LabeledDataset<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(n: usize, rows: Vec<(ClassLabel, Vec<T>)>) -> Result<Self> {
        for (_, x) in &rows {
            check_dim(n, x.len())?;
        }
        Ok(Self { n, rows })
    }

    pub fn push(&mut self, label: ClassLabel, x: Vec<T>) -> Result<()> {
        check_dim(self.n, x.len())?;
        self.rows.push((label, x));
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[(ClassLabel, Vec<T>)] {
        &self.rows
    }

    pub fn samples(&self, label: ClassLabel) -> Vec<&[T]> {
        self.rows
            .iter()
            .filter(|(l, _)| *l == label)
            .map(|(_, x)| x.as_slice())
            .collect()
    }

    pub fn counts(&self) -> [usize; 2] {
        let mut c = [0; 2];
        for (l, _) in &self.rows {
            c[l.index()] += 1;
        }
        c
    }

    /// Class frequencies as priors `[p1, p2]`.
    pub fn class_frequencies(&self) -> Result<[T; 2]> {
        if self.rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let [c1, _] = self.counts();
        let total = T::from_usize(self.rows.len()).expect("row count fits");
        let p1 = T::from_usize(c1).expect("row count fits") / total;
        Ok([p1, T::one() - p1])
    }

    /// Every row scaled to unit norm; the error names the 1-based row.
    pub fn unit_normalized(&self) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, (l, x))| {
                normalize_signal(x)
                    .map(|u| (*l, u))
                    .ok_or(Error::ZeroSignal { line: Some(i + 1) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, rows })
    }
}

/// Deterministic pseudorandom stream: ChaCha8 keyed by a 64-bit seed.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub const ALGORITHM: &'static str = "chacha8-ziggurat";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream derived from this seed and `stream` id.
    pub fn split(&self, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        Self {
            seed: self.seed,
            rng,
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Multivariate normal `N(mean, Σ)` sampled as `mean + L z` with
/// `L = V diag(√λ)` from the eigendecomposition of `Σ`; works for singular `Σ`.
#[derive(Debug, Clone)]
pub struct GaussianSampler<T> {
    mean: Vec<T>,
    factor: Vec<T>,
}

impl<T: Real> GaussianSampler<T> {
    pub fn new(mean: Vec<T>, covariance: &SymMatrix<T>) -> Result<Self> {
        let n = mean.len();
        check_dim(n, covariance.dim())?;
        let (psd, min) = covariance.is_psd()?;
        if !psd {
            return Err(Error::NotPSD(min.to_f64_lossy()));
        }
        let eig = sym_eig(covariance)?;
        let mut factor = vec![T::zero(); n * n];
        for (k, &lambda) in eig.values().iter().enumerate() {
            let s = lambda.max(T::zero()).sqrt();
            let v = eig.vector(k);
            for i in 0..n {
                factor[i * n + k] = v[i] * s;
            }
        }
        Ok(Self { mean, factor })
    }

    pub fn sample(&self, gen: &mut SeededGenerator) -> Vec<T> {
        let n = self.mean.len();
        let z: Vec<T> = (0..n).map(|_| T::lit(gen.standard_normal())).collect();
        (0..n)
            .map(|i| self.mean[i] + dot(&self.factor[i * n..(i + 1) * n], &z))
            .collect()
    }
}

fn generate<T: Real>(
    samplers: [&GaussianSampler<T>; 2],
    per_class: usize,
    seed: u64,
) -> LabeledDataset<T> {
    let n = samplers[0].mean.len();
    let mut gen = SeededGenerator::new(seed);
    let mut rows = Vec::with_capacity(2 * per_class);
    for (label, sampler) in ClassLabel::BOTH.into_iter().zip(samplers) {
        for _ in 0..per_class {
            rows.push((label, sampler.sample(&mut gen)));
        }
    }
    LabeledDataset { n, rows }
}

/// Two Gaussian classes with orthogonal means and a shared covariance.
/// Rows are all of class 1 followed by all of class 2.
pub fn gen_example1<T: Real>(
    m1: &[T],
    m2: &[T],
    covariance: &SymMatrix<T>,
    per_class: usize,
    seed: u64,
) -> Result<LabeledDataset<T>> {
    check_dim(m1.len(), m2.len())?;
    let inner = dot(m1, m2).abs();
    let scale = norm_sq(m1).sqrt() * norm_sq(m2).sqrt();
    if inner > T::tol(1e-9) * scale {
        return Err(Error::InvalidParameter(format!(
            "class means are not orthogonal (inner product {inner})"
        )));
    }
    let s1 = GaussianSampler::new(m1.to_vec(), covariance)?;
    let s2 = GaussianSampler::new(m2.to_vec(), covariance)?;
    Ok(generate([&s1, &s2], per_class, seed))
}

/// Signal in white noise: class 1 is `a + η`, class 2 is `η`, with
/// `η ~ N(0, σ² I)`.
pub fn gen_example2<T: Real>(
    a: &[T],
    sigma2: T,
    per_class: usize,
    seed: u64,
) -> Result<LabeledDataset<T>> {
    if !sigma2.is_finite() || sigma2 <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    let n = a.len();
    let cov = SymMatrix::identity(n).scale(sigma2);
    let s1 = GaussianSampler::new(a.to_vec(), &cov)?;
    let s2 = GaussianSampler::new(vec![T::zero(); n], &cov)?;
    Ok(generate([&s1, &s2], per_class, seed))
}

/// Reads `label,x1,...,xn` CSV. Line numbers in errors are 1-based and count
/// the header.
pub fn read_csv<T: Real, R: Read>(reader: R) -> Result<LabeledDataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(e, 1))?,
        None => {
            return Err(Error::ParseError {
                line: 1,
                msg: "missing header".into(),
            })
        }
    };
    let line_of = |rec: &csv::StringRecord, fallback: usize| {
        rec.position()
            .map(|p| p.line() as usize)
            .unwrap_or(fallback)
    };
    let header_line = line_of(&header, 1);
    if header.len() < 2 || &header[0] != "label" {
        return Err(Error::ParseError {
            line: header_line,
            msg: "header must be `label,x1,...,xn`".into(),
        });
    }
    for (k, name) in header.iter().enumerate().skip(1) {
        if name != format!("x{k}") {
            return Err(Error::ParseError {
                line: header_line,
                msg: format!("expected column `x{k}`, found `{name}`"),
            });
        }
    }
    let n = header.len() - 1;

    let mut data = LabeledDataset::new(n);
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| csv_error(e, i + 2))?;
        let line = line_of(&rec, i + 2);
        if rec.len() != n + 1 {
            return Err(Error::ParseError {
                line,
                msg: format!("expected {} fields, found {}", n + 1, rec.len()),
            });
        }
        let label = match &rec[0] {
            "1" => ClassLabel::One,
            "2" => ClassLabel::Two,
            other => {
                return Err(Error::LabelError {
                    line,
                    label: other.to_string(),
                })
            }
        };
        let x = rec
            .iter()
            .skip(1)
            .map(|f| {
                f.parse::<T>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::ParseError {
                        line,
                        msg: format!("`{f}` is not a finite number"),
                    })
            })
            .collect::<Result<Vec<T>>>()?;
        data.rows.push((label, x));
    }
    Ok(data)
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    Error::ParseError {
        line,
        msg: e.to_string(),
    }
}

/// Writes values with 17 significant digits.
pub fn write_csv<T: Real, W: Write>(data: &LabeledDataset<T>, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    write!(w, "label")?;
    for k in 1..=data.n {
        write!(w, ",x{k}")?;
    }
    writeln!(w)?;
    for (label, x) in &data.rows {
        write!(w, "{label}")?;
        for v in x {
            write!(w, ",{}", fmt_real(*v))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_csv<T: Real>(path: impl AsRef<Path>) -> Result<LabeledDataset<T>> {
    read_csv(BufReader::new(File::open(path)?))
}

pub fn save_csv<T: Real>(data: &LabeledDataset<T>, path: impl AsRef<Path>) -> Result<()> {
    write_csv(data, File::create(path)?)
}

/// Scientific notation with 17 significant digits.
pub fn fmt_real<T: Real>(v: T) -> String {
    format!("{v:.16e}")
}
