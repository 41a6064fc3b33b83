//! First and second moments of a random signal: mean `m`, correlation
//! `K = E[ξξᵀ]` and covariance `R = E[(ξ−m)(ξ−m)ᵀ]`.
//!
//! Empirical moments divide by `N`, so `K = R + m mᵀ` holds as an algebraic
//! identity of the estimators and not only in expectation.

use crate::error::{check_dim, Error, Result};
use crate::scalar::{norm_sq, Real};
use crate::spectral::SymMatrix;

/// Moments of one class. `count` is the number of samples, or 0 when the
/// moments were given analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary<T> {
    pub mean: Vec<T>,
    pub correlation: SymMatrix<T>,
    pub covariance: SymMatrix<T>,
    pub count: usize,
}

impl<T: Real> MomentSummary<T> {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_analytic(&self) -> bool {
        self.count == 0
    }

    /// `max |K − (R + m mᵀ)|`; zero up to rounding for every valid summary.
    pub fn decomposition_residual(&self) -> T {
        let rank_one = SymMatrix::outer(&self.mean);
        let rebuilt = self
            .covariance
            .add(&rank_one)
            .expect("summary dimensions agree");
        self.correlation.max_abs_diff(&rebuilt)
    }
}

/// Empirical moments of `samples` with `1/N` normalization.
pub fn estimate_moments<T: Real, S: AsRef<[T]>>(samples: &[S]) -> Result<MomentSummary<T>> {
    let first = samples.first().ok_or(Error::EmptyDataset)?;
    let n = first.as_ref().len();
    let count = samples.len();
    let inv_n = T::one() / T::from_usize(count).ok_or(Error::EmptyDataset)?;

    let mut mean = vec![T::zero(); n];
    for s in samples {
        let s = s.as_ref();
        check_dim(n, s.len())?;
        for (m, &x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m *= inv_n);

    let mut corr = vec![T::zero(); n * n];
    let mut cov = vec![T::zero(); n * n];
    let mut centered = vec![T::zero(); n];
    for s in samples {
        let s = s.as_ref();
        for ((c, &x), &m) in centered.iter_mut().zip(s).zip(&mean) {
            *c = x - m;
        }
        for i in 0..n {
            for j in i..n {
                corr[i * n + j] += s[i] * s[j];
                cov[i * n + j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            corr[i * n + j] *= inv_n;
            cov[i * n + j] *= inv_n;
            corr[j * n + i] = corr[i * n + j];
            cov[j * n + i] = cov[i * n + j];
        }
    }

    Ok(MomentSummary {
        mean,
        correlation: SymMatrix::new(n, corr)?,
        covariance: SymMatrix::new(n, cov)?,
        count,
    })
}

/// Moments from a known mean and covariance: `K = R + ‖m‖² p_m̄ = R + m mᵀ`.
///
/// For `m = 0` the rank-one term vanishes and `K = R`.
pub fn analytic_moments<T: Real>(
    mean: &[T],
    covariance: &SymMatrix<T>,
) -> Result<MomentSummary<T>> {
    check_dim(covariance.dim(), mean.len())?;
    if mean.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "mean has non-finite entries".into(),
        ));
    }
    let (psd, min) = covariance.is_psd()?;
    if !psd {
        return Err(Error::NotPSD(min.to_f64_lossy()));
    }
    let correlation = if norm_sq(mean) > T::zero() {
        covariance.add(&SymMatrix::outer(mean))?
    } else {
        covariance.clone()
    };
    Ok(MomentSummary {
        mean: mean.to_vec(),
        correlation,
        covariance: covariance.clone(),
        count: 0,
    })
}

/// `E⟨Aξ, ξ⟩ = tr(K A)`.
pub fn expected_quadratic<T: Real>(a: &SymMatrix<T>, k: &SymMatrix<T>) -> Result<T> {
    k.trace_product(a)
}

/// Rank-one projector `p_m̄` onto the direction of `m`, or `None` if `m ≈ 0`.
pub fn direction_projector<T: Real>(m: &[T]) -> Option<SymMatrix<T>> {
    let nsq = norm_sq(m);
    if nsq.sqrt() <= T::tol(1e-12) {
        return None;
    }
    Some(SymMatrix::outer(m).scale(T::one() / nsq))
}

/// Scales every sample to unit Euclidean norm. Zero vectors are rejected;
/// the reported line is the 1-based sample index.
pub fn unit_normalize<T: Real, S: AsRef<[T]>>(samples: &[S]) -> Result<Vec<Vec<T>>> {
    samples
        .iter()
        .enumerate()
        .map(|(i, s)| normalize_signal(s.as_ref()).ok_or(Error::ZeroSignal { line: Some(i + 1) }))
        .collect()
}

/// `x / ‖x‖`, or `None` when `‖x‖ ≤ 1e-12`.
pub fn normalize_signal<T: Real>(x: &[T]) -> Option<Vec<T>> {
    let norm = norm_sq(x).sqrt();
    if norm.is_nan() || norm <= T::lit(1e-12) {
        return None;
    }
    Some(x.iter().map(|&v| v / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_zero_mean_pair() {
        let s = estimate_moments(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(s.mean, vec![0.0, 0.0]);
        let expected = SymMatrix::from_diag(&[1.0, 0.0]);
        assert_eq!(s.correlation, expected);
        assert_eq!(s.covariance, expected);
        assert_eq!(s.count, 2);
    }

    #[test]
    fn single_sample_is_rank_one() {
        let s = estimate_moments(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(s.mean, vec![3.0, 4.0]);
        assert_eq!(s.covariance, SymMatrix::zeros(2));
        let k = SymMatrix::from_rows(&[vec![9.0, 12.0], vec![12.0, 16.0]]).unwrap();
        assert_eq!(s.correlation, k);
        let p = direction_projector(&s.mean).unwrap();
        let expected_p = k.scale(1.0 / 25.0);
        assert!(p.max_abs_diff(&expected_p) < 1e-15);
        assert!(p.scale(25.0).max_abs_diff(&s.correlation) < 1e-12);
    }

    #[test]
    fn two_axis_samples() {
        let s = estimate_moments(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.mean, vec![0.5, 0.5]);
        assert_eq!(s.correlation, SymMatrix::from_diag(&[0.5, 0.5]));
        assert!(s.decomposition_residual() < 1e-15);
    }

    #[test]
    fn empty_and_ragged_inputs() {
        let empty: Vec<Vec<f64>> = vec![];
        assert_eq!(estimate_moments(&empty), Err(Error::EmptyDataset));
        assert!(matches!(
            estimate_moments(&[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn analytic_examples() {
        let i2 = SymMatrix::<f64>::identity(2);
        assert_eq!(analytic_moments(&[0.0, 0.0], &i2).unwrap().correlation, i2);
        let s = analytic_moments(&[2.0, 0.0], &i2).unwrap();
        assert_eq!(s.correlation, SymMatrix::from_diag(&[5.0, 1.0]));
        assert_eq!(s.count, 0);
        let s = analytic_moments(&[1.0, 1.0], &SymMatrix::zeros(2)).unwrap();
        assert_eq!(
            s.correlation,
            SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap()
        );
    }

    #[test]
    fn analytic_rejects_indefinite_covariance() {
        let bad = SymMatrix::from_diag(&[1.0, -0.5]);
        assert!(matches!(
            analytic_moments(&[0.0, 0.0], &bad),
            Err(Error::NotPSD(_))
        ));
    }

    #[test]
    fn expected_quadratic_examples() {
        let k = SymMatrix::from_diag(&[0.5, 0.5]);
        assert_eq!(
            expected_quadratic(&SymMatrix::identity(2), &k).unwrap(),
            1.0
        );
        let samples = [vec![1.0, 0.0], vec![0.0, 1.0]];
        let k = estimate_moments(&samples).unwrap().correlation;
        let a = SymMatrix::from_diag(&[2.0, 1.0]);
        let direct: f64 = samples.iter().map(|x| a.quadratic(x).unwrap()).sum::<f64>() / 2.0;
        assert_eq!(direct, 1.5);
        assert_eq!(expected_quadratic(&a, &k).unwrap(), 1.5);
        assert!(expected_quadratic(&a, &SymMatrix::identity(3)).is_err());
    }

    #[test]
    fn unit_normalize_flags_zero_rows() {
        let out = unit_normalize(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(out[0], vec![0.6, 0.8]);
        assert_eq!(
            unit_normalize(&[vec![1.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::ZeroSignal { line: Some(2) })
        );
    }
}
