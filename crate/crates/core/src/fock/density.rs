use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{check_same_dim, ModeOperator, StateVector, Truncation, C64, ZERO};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_FLOOR: f64 = -1e-10;

/// Mixed state of one mode: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    elems: DMatrix<C64>,
    trunc: Truncation,
}

impl DensityMatrix {
    /// Validates all invariants.
    pub fn new(elems: DMatrix<C64>, trunc: Truncation) -> Result<Self> {
        let rho = Self::from_raw(elems, trunc)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape check only; callers that produce matrices from valid maps use
    /// this and then [`DensityMatrix::validate`] in tests.
    pub(crate) fn from_raw(elems: DMatrix<C64>, trunc: Truncation) -> Result<Self> {
        check_same_dim(trunc.dim(), elems.nrows())?;
        check_same_dim(trunc.dim(), elems.ncols())?;
        Ok(Self { elems, trunc })
    }

    /// `|psi><psi|` of the normalized input.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let psi = psi.normalized()?;
        let v = psi.amps();
        Ok(Self {
            elems: v * v.adjoint(),
            trunc: psi.trunc(),
        })
    }

    pub fn maximally_mixed(trunc: Truncation) -> Self {
        let n = trunc.dim();
        Self {
            elems: DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0)),
            trunc,
        }
    }

    pub fn elems(&self) -> &DMatrix<C64> {
        &self.elems
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.elems[(row, col)]
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }

    pub fn trace(&self) -> C64 {
        self.elems.trace()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let d = (self.elems[(i, j)] - self.elems[(j, i)].conj()).norm();
                if d > HERMITIAN_TOL {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i},{j}): deviation {d:e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    fn hermitian_part(&self) -> DMatrix<C64> {
        (&self.elems + self.elems.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.hermitian_part())
            .eigenvalues
            .iter()
            .cloned()
            .collect()
    }

    /// Eigenpairs `(p_k, |v_k>)` with `|p_k| > cutoff`.
    pub fn spectral_components(&self, cutoff: f64) -> Vec<(f64, DVector<C64>)> {
        let eig = SymmetricEigen::new(self.hermitian_part());
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, p)| p.abs() > cutoff)
            .map(|(k, &p)| (p, eig.eigenvectors.column(k).into_owned()))
            .collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.elems * &self.elems).trace().re
    }

    /// `U rho U^dagger`.
    pub fn conjugated_by(&self, u: &ModeOperator) -> Result<Self> {
        check_same_dim(self.dim(), u.dim())?;
        Ok(Self {
            elems: u.elems() * &self.elems * u.elems().adjoint(),
            trunc: self.trunc,
        })
    }

    /// `<psi|rho|psi>` for normalized `psi`.
    pub fn overlap_with_pure(&self, psi: &StateVector) -> Result<f64> {
        check_same_dim(self.dim(), psi.dim())?;
        let psi = psi.normalized()?;
        let v = psi.amps();
        Ok((v.adjoint() * &self.elems * v)[(0, 0)].re)
    }

    /// Zero-padded copy in a larger space, or the leading block (trace
    /// renormalized) in a smaller one.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        let trunc = self.trunc.resized(dim)?;
        let n = self.dim();
        let elems = DMatrix::from_fn(dim, dim, |i, j| if i < n && j < n { self.elems[(i, j)] } else { ZERO });
        let tr = elems.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidDensityMatrix("resized block has no weight".into()));
        }
        Ok(Self {
            elems: elems / C64::new(tr, 0.0),
            trunc,
        })
    }

    /// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        mixed_fidelity(self, other)
    }
}

/// Eigenvalues below this fraction of the largest are treated as rounding noise.
const SPECTRAL_NOISE: f64 = 1e-14;

fn clipped_sqrt(l: f64, largest: f64) -> f64 {
    if l > SPECTRAL_NOISE * largest {
        l.sqrt()
    } else {
        0.0
    }
}

fn psd_sqrt(m: DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(m);
    let largest = eig.eigenvalues.max();
    let roots = eig.eigenvalues.map(|l| C64::new(clipped_sqrt(l, largest), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity between density matrices of the same dimension; reduces
/// to `|<x|y>|^2` on pure states.
pub fn mixed_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho.dim(), sigma.dim())?;
    let s = psd_sqrt(rho.hermitian_part());
    let inner = &s * sigma.hermitian_part() * &s;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(inner).eigenvalues;
    let largest = eig.max();
    let root_trace: f64 = eig.iter().map(|&l| clipped_sqrt(l, largest)).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, fidelity, fock_state, ONE};

    #[test]
    fn pure_fidelity_agrees() {
        let t = Truncation::new(20).unwrap();
        let a = coherent_state(C64::new(0.5, 0.2), t).unwrap();
        let b = coherent_state(C64::new(-0.1, 0.4), t).unwrap();
        let f_pure = fidelity(&a, &b).unwrap();
        let f_mixed = mixed_fidelity(&DensityMatrix::from_pure(&a).unwrap(), &DensityMatrix::from_pure(&b).unwrap()).unwrap();
        assert!((f_pure - f_mixed).abs() < 1e-10);
    }

    #[test]
    fn invariants_are_checked() {
        let t = Truncation::new(2).unwrap();
        let not_hermitian = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]);
        assert!(DensityMatrix::new(not_hermitian, t).is_err());
        let bad_trace = DMatrix::from_diagonal_element(2, 2, ONE);
        assert!(DensityMatrix::new(bad_trace, t).is_err());
        let negative = DMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(negative, t).is_err());
        assert!(DensityMatrix::maximally_mixed(t).validate().is_ok());
    }

    #[test]
    fn mixed_fidelity_of_diagonal_states() {
        let t = Truncation::new(3).unwrap();
        let rho = DensityMatrix::maximally_mixed(t);
        let vac = DensityMatrix::from_pure(&fock_state(0, t).unwrap()).unwrap();
        assert!((rho.fidelity(&vac).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((rho.purity() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn resize_pads_and_truncates() {
        let t = Truncation::new(4).unwrap();
        let rho = DensityMatrix::maximally_mixed(t);
        let big = rho.resized(6).unwrap();
        assert!(big.validate().is_ok());
        assert_eq!(big.get(5, 5), ZERO);
        let small = rho.resized(2).unwrap();
        assert!((small.get(0, 0).re - 0.5).abs() < 1e-15);
    }
}
