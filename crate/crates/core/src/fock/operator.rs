use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use super::{check_same_dim, StateVector, Truncation, C64, ONE, ZERO};
use crate::error::Result;

/// Complex matrix acting on one truncated mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeOperator {
    elems: DMatrix<C64>,
    trunc: Truncation,
}

impl ModeOperator {
    pub fn from_matrix(elems: DMatrix<C64>, trunc: Truncation) -> Result<Self> {
        check_same_dim(trunc.dim(), elems.nrows())?;
        check_same_dim(trunc.dim(), elems.ncols())?;
        Ok(Self { elems, trunc })
    }

    pub fn identity(trunc: Truncation) -> Self {
        Self {
            elems: DMatrix::identity(trunc.dim(), trunc.dim()),
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

    pub fn adjoint(&self) -> Self {
        Self {
            elems: self.elems.adjoint(),
            trunc: self.trunc,
        }
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self {
            elems: &self.elems * k,
            trunc: self.trunc,
        }
    }

    /// `self + k * 1`.
    pub fn plus_identity(&self, k: C64) -> Self {
        let mut elems = self.elems.clone();
        for i in 0..self.dim() {
            elems[(i, i)] += k;
        }
        Self {
            elems,
            trunc: self.trunc,
        }
    }

    /// `self * other` as operators (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            elems: &self.elems * &other.elems,
            trunc: self.trunc,
        })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_same_dim(self.dim(), psi.dim())?;
        Ok(StateVector::from_dvector(&self.elems * psi.amps(), psi.trunc()))
    }

    /// Largest entry of `|U^dagger U - 1|`; zero for an exactly unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.elems.adjoint() * &self.elems;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Largest elementwise difference on the leading `levels x levels` block.
    pub fn max_abs_diff_on(&self, other: &Self, levels: usize) -> f64 {
        let levels = levels.min(self.dim()).min(other.dim());
        let mut worst = 0.0f64;
        for i in 0..levels {
            for j in 0..levels {
                worst = worst.max((self.elems[(i, j)] - other.elems[(i, j)]).norm());
            }
        }
        worst
    }

    /// Induced 2-norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        self.elems
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }
}

impl Add for &ModeOperator {
    type Output = ModeOperator;

    fn add(self, rhs: &ModeOperator) -> ModeOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        ModeOperator {
            elems: &self.elems + &rhs.elems,
            trunc: self.trunc,
        }
    }
}

impl Sub for &ModeOperator {
    type Output = ModeOperator;

    fn sub(self, rhs: &ModeOperator) -> ModeOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        ModeOperator {
            elems: &self.elems - &rhs.elems,
            trunc: self.trunc,
        }
    }
}

impl Mul for &ModeOperator {
    type Output = ModeOperator;

    fn mul(self, rhs: &ModeOperator) -> ModeOperator {
        self.compose(rhs).expect("operator dimension mismatch")
    }
}

/// Annihilation, creation and number operators of one truncated mode.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: ModeOperator,
    pub a_dag: ModeOperator,
    pub n: ModeOperator,
}

pub fn ladder_operators(trunc: Truncation) -> Ladder {
    let dim = trunc.dim();
    let mut a = DMatrix::from_element(dim, dim, ZERO);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let a = ModeOperator { elems: a, trunc };
    let a_dag = a.adjoint();
    let n = &a_dag * &a;
    Ladder { a, a_dag, n }
}

/// `<psi|op|psi> / <psi|psi>`.
pub fn expectation(op: &ModeOperator, psi: &StateVector) -> Result<C64> {
    let applied = op.apply(psi)?;
    Ok(psi.amps().dotc(applied.amps()) / psi.norm_sqr())
}
