//! Fuzzy logic of linear subspaces.
//!
//! A subspace `M` with projector `P_M` defines a fuzzy set whose membership
//! function is the energy the projector passes, `μ_M(x) = ⟨P_M x, x⟩ = ‖P_M x‖²`.
//! Projectors form a lattice under the operator order with meet (range
//! intersection), join (range sum) and orthogonal complement.
//!
//! Meet and join are read off the spectrum of `P + Q`: its eigenvalues lie in
//! `[0, 2]`, the eigenspace for `2` is `ran P ∩ ran Q` and the nonzero
//! eigenspaces together span `ran P + ran Q`.

use crate::error::{check_dim, Result};
use crate::scalar::{norm_sq, Real};
use crate::spectral::{sym_eig, Projector};

/// Absolute tolerance for classifying eigenvalues of projector sums.
const LATTICE_TOL: f64 = 1e-8;

/// A proposition of the subspace logic, optionally tagged.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyProposition<T> {
    pub projector: Projector<T>,
    pub label: Option<String>,
}

impl<T: Real> FuzzyProposition<T> {
    pub fn new(projector: Projector<T>) -> Self {
        Self {
            projector,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn membership(&self, x: &[T]) -> Result<T> {
        membership(&self.projector, x)
    }

    pub fn not(&self) -> Self {
        Self {
            projector: self.projector.complement(),
            label: self.label.as_ref().map(|l| format!("not {l}")),
        }
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(meet(&self.projector, &other.projector)?))
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        Ok(Self::new(join(&self.projector, &other.projector)?))
    }

    pub fn implies(&self, other: &Self) -> Result<bool> {
        leq(&self.projector, &other.projector)
    }
}

/// `⟨Px, x⟩ = ‖Px‖²`, clamped into `[0, ‖x‖²]`.
pub fn membership<T: Real>(p: &Projector<T>, x: &[T]) -> Result<T> {
    let px = p.apply(x)?;
    Ok(norm_sq(&px).min(norm_sq(x)))
}

/// Projector onto `ran P ∩ ran Q`.
pub fn meet<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<Projector<T>> {
    check_dim(p.dim(), q.dim())?;
    let sum = p.matrix().add(q.matrix())?;
    let eig = sym_eig(&sum)?;
    let two = T::lit(2.0);
    let tol = T::tol(LATTICE_TOL);
    Ok(eig.projector_where(|l| (l - two).abs() <= tol))
}

/// Projector onto `ran P + ran Q`.
pub fn join<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<Projector<T>> {
    check_dim(p.dim(), q.dim())?;
    let sum = p.matrix().add(q.matrix())?;
    let eig = sym_eig(&sum)?;
    let tol = T::tol(LATTICE_TOL);
    Ok(eig.projector_where(|l| l > tol))
}

/// Operator order: `P ≤ Q` iff `⟨Px,x⟩ ≤ ⟨Qx,x⟩` for every `x`, i.e. `Q − P` is
/// positive semidefinite.
pub fn leq<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<bool> {
    check_dim(p.dim(), q.dim())?;
    let diff = q.matrix().sub(p.matrix())?;
    Ok(diff.min_eigenvalue()? >= -T::tol(LATTICE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{projector_from_basis, SymMatrix};

    fn axis(n: usize, k: usize) -> Projector<f64> {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        projector_from_basis(n, &[e]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let p = axis(2, 0);
        assert_eq!(membership(&p, &[3.0, 4.0]).unwrap(), 9.0);
        assert_eq!(
            membership(&Projector::identity(2), &[3.0, 4.0]).unwrap(),
            25.0
        );
        assert_eq!(membership(&p.complement(), &[3.0, 4.0]).unwrap(), 16.0);
        assert!(membership(&p, &[1.0]).is_err());
    }

    #[test]
    fn meet_examples() {
        let m = meet(&axis(3, 0), &axis(3, 1)).unwrap();
        assert_eq!(m.rank(), 0);
        assert_eq!(m.matrix(), &SymMatrix::zeros(3));

        let diag = projector_from_basis(2, &[vec![1.0, 1.0]]).unwrap();
        let m = meet(&axis(2, 0), &diag).unwrap();
        assert_eq!(m.rank(), 0);

        let p = diag.clone();
        let m = meet(&p, &p).unwrap();
        assert!(m.matrix().max_abs_diff(p.matrix()) < 1e-8);
    }

    #[test]
    fn join_examples() {
        let j = join(&axis(3, 0), &axis(3, 1)).unwrap();
        assert_eq!(j.rank(), 2);
        assert!(
            j.matrix()
                .max_abs_diff(&SymMatrix::from_diag(&[1.0, 1.0, 0.0]))
                < 1e-12
        );

        let diag = projector_from_basis(2, &[vec![1.0, 1.0]]).unwrap();
        let j = join(&axis(2, 0), &diag).unwrap();
        assert_eq!(j.rank(), 2);
        assert!(j.matrix().max_abs_diff(&SymMatrix::identity(2)) < 1e-12);

        let j = join(&diag, &Projector::zero(2)).unwrap();
        assert!(j.matrix().max_abs_diff(diag.matrix()) < 1e-12);
    }

    #[test]
    fn leq_examples() {
        let diag = projector_from_basis(2, &[vec![1.0, 1.0]]).unwrap();
        assert!(leq(&diag, &Projector::identity(2)).unwrap());
        assert!(leq(&axis(2, 0), &Projector::identity(2)).unwrap());
        assert!(!leq(&axis(2, 0), &axis(2, 1)).unwrap());
        assert!(leq(&axis(2, 0), &axis(3, 0)).is_err());
    }

    #[test]
    fn propositions_compose() {
        let a = FuzzyProposition::new(axis(2, 0)).with_label("a");
        let b = FuzzyProposition::new(axis(2, 1));
        assert_eq!(a.not().label.as_deref(), Some("not a"));
        assert!(a.and(&b).unwrap().implies(&a).unwrap());
        assert_eq!(a.or(&b).unwrap().membership(&[3.0, 4.0]).unwrap(), 25.0);
    }
}
