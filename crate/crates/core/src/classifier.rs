//! Two-class energy discriminant classifier.
//!
//! Each class `S_i` is matched with a projector `P_i`, `P₁ + P₂ = I`, and the
//! discriminant of class `i` is the energy the projector passes,
//! `g_i(x) = ⟨P_i x, x⟩`. The energy of correct recognition
//!
//! ```text
//! Enr_C(P₁, P₂) = p₁ tr P₁M₁ + p₂ tr P₂M₂ = p₂ tr M₂ + tr P₁(p₁M₁ − p₂M₂)
//! ```
//!
//! is maximized by taking `P₁` onto the eigenvectors of `D = p₁M₁ − p₂M₂` with
//! positive eigenvalue. `M_i` is the class correlation operator, possibly
//! normalized, depending on [`NormalizationMode`].

use std::fmt;
use std::str::FromStr;

use crate::datasets::{ClassLabel, LabeledDataset};
use crate::error::{check_dim, Error, Result};
use crate::moments::{normalize_signal, MomentSummary};
use crate::scalar::{norm_sq, Real};
use crate::spectral::{sym_eig, Projector, SymMatrix};

/// How patterns and class operators are normalized before fitting and deciding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationMode {
    /// Correlation operators `K_i` as estimated.
    Raw,
    /// `K_i / tr K_i`; discriminants are divided by `tr K_i`.
    TraceNorm,
    /// Patterns scaled to unit norm. Moments must come from normalized samples.
    UnitNorm,
    /// Covariance operators `R_i`; each discriminant is centered on its class mean.
    Centered,
}

impl NormalizationMode {
    pub const ALL: [NormalizationMode; 4] = [
        NormalizationMode::Raw,
        NormalizationMode::TraceNorm,
        NormalizationMode::UnitNorm,
        NormalizationMode::Centered,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::Raw => "raw",
            NormalizationMode::TraceNorm => "trace",
            NormalizationMode::UnitNorm => "unit",
            NormalizationMode::Centered => "centered",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(NormalizationMode::Raw),
            "trace" => Ok(NormalizationMode::TraceNorm),
            "unit" => Ok(NormalizationMode::UnitNorm),
            "centered" => Ok(NormalizationMode::Centered),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode `{other}` (expected raw, trace, unit or centered)"
            ))),
        }
    }
}

/// Prior probability and moments of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec<T> {
    pub prior: T,
    pub moments: MomentSummary<T>,
}

impl<T: Real> ClassSpec<T> {
    pub fn new(prior: T, moments: MomentSummary<T>) -> Self {
        Self { prior, moments }
    }

    /// The operator whose trace against a projector gives that projector's
    /// share of this class's energy under `mode`.
    pub fn energy_operator(&self, mode: NormalizationMode) -> Result<SymMatrix<T>> {
        energy_operator(&self.moments, mode, None)
    }
}

fn energy_operator<T: Real>(
    moments: &MomentSummary<T>,
    mode: NormalizationMode,
    class: Option<ClassLabel>,
) -> Result<SymMatrix<T>> {
    Ok(match mode {
        NormalizationMode::Raw | NormalizationMode::UnitNorm => moments.correlation.clone(),
        NormalizationMode::Centered => moments.covariance.clone(),
        NormalizationMode::TraceNorm => {
            let tr = moments.correlation.trace();
            if tr.is_nan() || tr <= T::zero() {
                return Err(Error::DegenerateTrace {
                    class: class.map(ClassLabel::number).unwrap_or(0),
                    trace: tr.to_f64_lossy(),
                });
            }
            moments.correlation.scale(T::one() / tr)
        }
    })
}

fn check_priors<T: Real>(p1: T, p2: T) -> Result<()> {
    let in_open_unit = |p: T| p > T::zero() && p < T::one();
    if !in_open_unit(p1) || !in_open_unit(p2) || (p1 + p2 - T::one()).abs() > T::tol(1e-12) {
        return Err(Error::InvalidParameter(format!(
            "priors must lie in (0, 1) and sum to 1, got {p1} and {p2}"
        )));
    }
    Ok(())
}

/// A fitted projector pair with everything `decide` needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyClassifier<T> {
    mode: NormalizationMode,
    projectors: [Projector<T>; 2],
    priors: [T; 2],
    traces: [T; 2],
    means: [Vec<T>; 2],
    spectrum: Vec<T>,
}

impl<T: Real> EnergyClassifier<T> {
    /// Fits `P₁` to the eigenvectors of `D = p₁M₁ − p₂M₂` with eigenvalue above
    /// `1e-10·max(1, |λ|_max)`; all remaining directions, zero included, go to
    /// `P₂ = I − P₁`.
    pub fn fit(
        class1: &ClassSpec<T>,
        class2: &ClassSpec<T>,
        mode: NormalizationMode,
    ) -> Result<Self> {
        check_priors(class1.prior, class2.prior)?;
        let n = class1.moments.dim();
        check_dim(n, class2.moments.dim())?;
        check_dim(n, class1.moments.correlation.dim())?;
        check_dim(n, class2.moments.correlation.dim())?;

        let m1 = energy_operator(&class1.moments, mode, Some(ClassLabel::One))?;
        let m2 = energy_operator(&class2.moments, mode, Some(ClassLabel::Two))?;
        let d = m1.lin_comb(class1.prior, &m2, -class2.prior)?;
        let eig = sym_eig(&d)?;
        let largest = eig
            .values()
            .iter()
            .fold(T::zero(), |acc, l| acc.max(l.abs()));
        let cutoff = T::tol(1e-10) * largest.max(T::one());
        let p1 = eig.projector_where(|l| l > cutoff);
        let p2 = p1.complement();

        Ok(Self {
            mode,
            projectors: [p1, p2],
            priors: [class1.prior, class2.prior],
            traces: [
                class1.moments.correlation.trace(),
                class2.moments.correlation.trace(),
            ],
            means: [class1.moments.mean.clone(), class2.moments.mean.clone()],
            spectrum: eig.values().to_vec(),
        })
    }

    /// Reassembles a classifier from stored parts. `P₂` is recomputed as
    /// `I − P₁`, exactly as `fit` does.
    pub fn from_parts(
        mode: NormalizationMode,
        p1: SymMatrix<T>,
        priors: [T; 2],
        traces: [T; 2],
        means: [Vec<T>; 2],
        spectrum: Vec<T>,
    ) -> Result<Self> {
        check_priors(priors[0], priors[1])?;
        let n = p1.dim();
        check_dim(n, means[0].len())?;
        check_dim(n, means[1].len())?;
        check_dim(n, spectrum.len())?;
        if mode == NormalizationMode::TraceNorm && !(traces[0] > T::zero() && traces[1] > T::zero())
        {
            let class = if traces[0] > T::zero() { 2 } else { 1 };
            return Err(Error::DegenerateTrace {
                class,
                trace: traces[class as usize - 1].to_f64_lossy(),
            });
        }
        let p1 = Projector::from_matrix(p1)?;
        let p2 = p1.complement();
        Ok(Self {
            mode,
            projectors: [p1, p2],
            priors,
            traces,
            means,
            spectrum,
        })
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    pub fn projector(&self, class: ClassLabel) -> &Projector<T> {
        &self.projectors[class.index()]
    }

    pub fn priors(&self) -> [T; 2] {
        self.priors
    }

    /// `[tr K₁, tr K₂]` of the fitted moments.
    pub fn traces(&self) -> [T; 2] {
        self.traces
    }

    pub fn mean(&self, class: ClassLabel) -> &[T] {
        &self.means[class.index()]
    }

    /// Eigenvalues of `p₁M₁ − p₂M₂`, descending.
    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    /// `max(|P₁ + P₂ − I|, |P₁P₂|)`.
    pub fn completeness_error(&self) -> T {
        let [p1, p2] = &self.projectors;
        let sum = p1
            .matrix()
            .add(p2.matrix())
            .expect("projector dimensions agree");
        let id_err = sum.max_abs_diff(&SymMatrix::identity(self.dim()));
        let prod = p1
            .matrix()
            .matmul(p2.matrix())
            .expect("projector dimensions agree");
        let prod_err = prod.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        id_err.max(prod_err)
    }

    /// The pattern as seen by class `class`'s discriminant.
    fn view(&self, class: ClassLabel, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self.mode {
            NormalizationMode::Raw | NormalizationMode::TraceNorm => x.to_vec(),
            NormalizationMode::UnitNorm => {
                normalize_signal(x).ok_or(Error::ZeroSignal { line: None })?
            }
            NormalizationMode::Centered => x
                .iter()
                .zip(&self.means[class.index()])
                .map(|(&a, &m)| a - m)
                .collect(),
        })
    }

    fn energy(&self, projector: ClassLabel, y: &[T]) -> Result<T> {
        let py = self.projectors[projector.index()].apply(y)?;
        Ok(norm_sq(&py))
    }

    /// `[g₁(x), g₂(x)]` under the fitted mode.
    pub fn discriminants(&self, x: &[T]) -> Result<[T; 2]> {
        let mut g = [T::zero(); 2];
        for class in ClassLabel::BOTH {
            let y = self.view(class, x)?;
            let mut e = self.energy(class, &y)?;
            if self.mode == NormalizationMode::TraceNorm {
                e /= self.traces[class.index()];
            }
            g[class.index()] = e;
        }
        Ok(g)
    }

    /// Class 1 iff `g₁(x) > g₂(x)`; ties go to class 2.
    pub fn decide(&self, x: &[T]) -> Result<ClassLabel> {
        let [g1, g2] = self.discriminants(x)?;
        Ok(if g1 > g2 {
            ClassLabel::One
        } else {
            ClassLabel::Two
        })
    }

    /// Energy `x` (a sample of class `source`) deposits in projector
    /// `target`, normalized the way the class operator `M_source` is.
    fn sample_energy(&self, source: ClassLabel, target: ClassLabel, x: &[T]) -> Result<T> {
        let y = self.view(source, x)?;
        let mut e = self.energy(target, &y)?;
        if self.mode == NormalizationMode::TraceNorm {
            e /= self.traces[source.index()];
        }
        Ok(e)
    }

    /// Analytic energies `r_j(i) = p_j tr(P_i M_j)` for the given class moments.
    pub fn energy_report(
        &self,
        class1: &ClassSpec<T>,
        class2: &ClassSpec<T>,
    ) -> Result<EnergyReport<T>> {
        let m1 = energy_operator(&class1.moments, self.mode, Some(ClassLabel::One))?;
        let m2 = energy_operator(&class2.moments, self.mode, Some(ClassLabel::Two))?;
        projector_energy_report(
            [class1.prior, class2.prior],
            [&self.projectors[0], &self.projectors[1]],
            [&m1, &m2],
        )
    }

    /// Monte Carlo counterpart of [`Self::energy_report`]: each `r_j(i)` is
    /// `p_j` times the sample mean over class `j` of the energy passed by `P_i`.
    /// Priors are the fitted ones.
    pub fn empirical_energy(&self, data: &LabeledDataset<T>) -> Result<EmpiricalEnergy<T>> {
        check_dim(self.dim(), data.dim())?;
        let mut correct = Estimate::default();
        let mut error = Estimate::default();
        for source in ClassLabel::BOTH {
            let samples = data.samples(source);
            let p = self.priors[source.index()];
            let own = samples
                .iter()
                .map(|x| self.sample_energy(source, source, x))
                .collect::<Result<Vec<_>>>()?;
            let cross = samples
                .iter()
                .map(|x| self.sample_energy(source, source.other(), x))
                .collect::<Result<Vec<_>>>()?;
            correct = correct.plus(Estimate::weighted_mean(p, &own, source)?);
            error = error.plus(Estimate::weighted_mean(p, &cross, source)?);
        }
        Ok(EmpiricalEnergy {
            enr_correct: correct,
            enr_error: error,
        })
    }
}

/// Energies passed by a projector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<T> {
    /// `r[j][i] = p_j tr(P_i M_j)`: class `j+1` through projector `i+1`.
    pub r: [[T; 2]; 2],
    pub enr_correct: T,
    pub enr_error: T,
    /// `p₁ tr M₁ + p₂ tr M₂`, computed independently of the projectors.
    pub total: T,
}

impl<T: Real> EnergyReport<T> {
    /// `enr_correct + enr_error − total`.
    pub fn conservation_residual(&self) -> T {
        self.enr_correct + self.enr_error - self.total
    }
}

/// Energy report for an arbitrary projector pair and class operators.
pub fn projector_energy_report<T: Real>(
    priors: [T; 2],
    projectors: [&Projector<T>; 2],
    operators: [&SymMatrix<T>; 2],
) -> Result<EnergyReport<T>> {
    let mut r = [[T::zero(); 2]; 2];
    for j in 0..2 {
        for i in 0..2 {
            r[j][i] = priors[j] * projectors[i].matrix().trace_product(operators[j])?;
        }
    }
    Ok(EnergyReport {
        r,
        enr_correct: r[0][0] + r[1][1],
        enr_error: r[0][1] + r[1][0],
        total: priors[0] * operators[0].trace() + priors[1] * operators[1].trace(),
    })
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: T,
}

impl<T: Real> Estimate<T> {
    /// `weight · mean(values)` with standard error `weight · s/√N`.
    fn weighted_mean(weight: T, values: &[T], class: ClassLabel) -> Result<Self> {
        if values.is_empty() {
            if weight == T::zero() {
                return Ok(Self::default());
            }
            return Err(Error::EmptyClass(class.number()));
        }
        let count = T::from_usize(values.len()).expect("sample count fits");
        let mean = values.iter().copied().sum::<T>() / count;
        let var = if values.len() > 1 {
            values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (count - T::one())
        } else {
            T::zero()
        };
        Ok(Self {
            value: weight * mean,
            std_error: weight * (var / count).sqrt(),
        })
    }

    /// Sum of independent estimates.
    fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            std_error: self.std_error.hypot(other.std_error),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalEnergy<T> {
    pub enr_correct: Estimate<T>,
    pub enr_error: Estimate<T>,
}

/// Prior-weighted mean membership of samples in their own class:
/// `Σ_i p_i · mean_{x ∈ S_i} g(i, x)`. A class may be empty only if its prior is 0.
pub fn quality_with<T, F>(data: &LabeledDataset<T>, priors: [T; 2], mut g: F) -> Result<T>
where
    T: Real,
    F: FnMut(ClassLabel, &[T]) -> Result<T>,
{
    let mut total = T::zero();
    for class in ClassLabel::BOTH {
        let values = data
            .samples(class)
            .into_iter()
            .map(|x| g(class, x))
            .collect::<Result<Vec<_>>>()?;
        total += Estimate::weighted_mean(priors[class.index()], &values, class)?.value;
    }
    Ok(total)
}

/// Quality functional with the classifier's own discriminants `g_i`.
pub fn empirical_quality<T: Real>(
    clf: &EnergyClassifier<T>,
    data: &LabeledDataset<T>,
    priors: [T; 2],
) -> Result<T> {
    check_dim(clf.dim(), data.dim())?;
    quality_with(data, priors, |class, x| {
        Ok(clf.discriminants(x)?[class.index()])
    })
}

/// Quality functional with indicator discriminants `1[decide(x) = i]`: the
/// prior-weighted accuracy.
pub fn indicator_quality<T: Real>(
    clf: &EnergyClassifier<T>,
    data: &LabeledDataset<T>,
    priors: [T; 2],
) -> Result<T> {
    check_dim(clf.dim(), data.dim())?;
    quality_with(data, priors, |class, x| {
        Ok(if clf.decide(x)? == class {
            T::one()
        } else {
            T::zero()
        })
    })
}

/// Fraction of rows whose decision matches the label.
pub fn accuracy<T: Real>(clf: &EnergyClassifier<T>, data: &LabeledDataset<T>) -> Result<T> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for (label, x) in data.rows() {
        if clf.decide(x)? == *label {
            hits += 1;
        }
    }
    Ok(T::from_usize(hits).expect("count fits") / T::from_usize(data.len()).expect("count fits"))
}

/// Monte Carlo estimate of the energy of correct recognition restricted to
/// the decision regions:
/// `p₁ E[g₁(x)·1(decide = 1) | S₁] + p₂ E[g₂(x)·1(decide = 2) | S₂]`,
/// using the classifier's fitted priors.
pub fn region_energy<T: Real>(
    clf: &EnergyClassifier<T>,
    data: &LabeledDataset<T>,
) -> Result<Estimate<T>> {
    check_dim(clf.dim(), data.dim())?;
    let mut acc = Estimate::default();
    for class in ClassLabel::BOTH {
        let values = data
            .samples(class)
            .into_iter()
            .map(|x| {
                let g = clf.discriminants(x)?;
                let decided = if g[0] > g[1] {
                    ClassLabel::One
                } else {
                    ClassLabel::Two
                };
                Ok(if decided == class {
                    g[class.index()]
                } else {
                    T::zero()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        acc = acc.plus(Estimate::weighted_mean(
            clf.priors[class.index()],
            &values,
            class,
        )?);
    }
    Ok(acc)
}

/// `‖a‖² / (n σ²)`.
pub fn snr<T: Real>(a: &[T], sigma2: T, n: usize) -> Result<T> {
    if sigma2.is_nan() || sigma2 <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(norm_sq(a) / (T::from_usize(n).expect("dimension fits") * sigma2))
}

pub fn fit<T: Real>(
    class1: &ClassSpec<T>,
    class2: &ClassSpec<T>,
    mode: NormalizationMode,
) -> Result<EnergyClassifier<T>> {
    EnergyClassifier::fit(class1, class2, mode)
}

pub fn decide<T: Real>(clf: &EnergyClassifier<T>, x: &[T]) -> Result<ClassLabel> {
    clf.decide(x)
}

pub fn energy_report<T: Real>(
    clf: &EnergyClassifier<T>,
    class1: &ClassSpec<T>,
    class2: &ClassSpec<T>,
) -> Result<EnergyReport<T>> {
    clf.energy_report(class1, class2)
}
