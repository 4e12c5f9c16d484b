//! Two-mode herald states, the beam splitter, and conditional projection of a
//! herald-pair ⊗ signal composite.

use std::ops::Add;

use nalgebra::{DMatrix, DVector};

use super::{check_same_dim, ln_factorials, StateVector, Truncation, C64, ONE, ZERO, ZERO_NORM};
use crate::error::{Error, Result};

/// Pure state of two modes; `|n1, n2>` sits at index `n1 * N2 + n2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    amps: DVector<C64>,
    truncs: (Truncation, Truncation),
}

impl TwoModeState {
    pub fn new(amps: Vec<C64>, truncs: (Truncation, Truncation)) -> Result<Self> {
        check_same_dim(truncs.0.dim() * truncs.1.dim(), amps.len())?;
        Ok(Self {
            amps: DVector::from_vec(amps),
            truncs,
        })
    }

    pub fn product(first: &StateVector, second: &StateVector) -> Self {
        let n2 = second.dim();
        let amps = DVector::from_fn(first.dim() * n2, |i, _| first.amp(i / n2) * second.amp(i % n2));
        Self {
            amps,
            truncs: (first.trunc(), second.trunc()),
        }
    }

    pub fn basis(n1: usize, n2: usize, truncs: (Truncation, Truncation)) -> Result<Self> {
        if n1 >= truncs.0.dim() || n2 >= truncs.1.dim() {
            return Err(Error::Domain(format!("basis ket |{n1},{n2}> outside truncation")));
        }
        let mut amps = DVector::from_element(truncs.0.dim() * truncs.1.dim(), ZERO);
        amps[n1 * truncs.1.dim() + n2] = ONE;
        Ok(Self { amps, truncs })
    }

    pub fn amp(&self, n1: usize, n2: usize) -> C64 {
        self.amps[n1 * self.truncs.1.dim() + n2]
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn truncs(&self) -> (Truncation, Truncation) {
        self.truncs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self {
            amps: &self.amps * k,
            truncs: self.truncs,
        }
    }

    /// `|<self|other>|^2 / (|self|^2 |other|^2)`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        check_same_dim(self.amps.len(), other.amps.len())?;
        let ov = self.amps.dotc(&other.amps);
        Ok((ov.norm_sqr() / (self.norm_sqr() * other.norm_sqr())).clamp(0.0, 1.0))
    }
}

/// Linear operator on a two-mode truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeOperator {
    elems: DMatrix<C64>,
    truncs: (Truncation, Truncation),
}

impl TwoModeOperator {
    pub fn elems(&self) -> &DMatrix<C64> {
        &self.elems
    }

    pub fn truncs(&self) -> (Truncation, Truncation) {
        self.truncs
    }

    pub fn apply(&self, psi: &TwoModeState) -> Result<TwoModeState> {
        check_same_dim(self.elems.ncols(), psi.amps.len())?;
        Ok(TwoModeState {
            amps: &self.elems * &psi.amps,
            truncs: self.truncs,
        })
    }
}

/// Beam splitter with `t = cos(theta)`, `r = sin(theta)` and
///
/// ```text
/// a1^dag -> t a1^dag + r a2^dag
/// a2^dag -> -r a1^dag + t a2^dag
/// ```
///
/// so `B|1,0> = t|1,0> + r|0,1>` and `B|0>|beta> = |-r beta>|t beta>`.
///
/// Matrix elements come from the binomial expansion of the transformed
/// creation operators. Photon number is conserved, so the operator is exactly
/// unitary on every total-number block that fits inside both truncations;
/// components pushed past a truncation are dropped.
pub fn beam_splitter_op(theta: f64, truncs: (Truncation, Truncation)) -> TwoModeOperator {
    let (d1, d2) = (truncs.0.dim(), truncs.1.dim());
    let t = theta.cos();
    let r = theta.sin();
    let lf = ln_factorials(d1 + d2);
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];

    let mut elems = DMatrix::from_element(d1 * d2, d1 * d2, ZERO);
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            let total = n1 + n2;
            let col = n1 * d2 + n2;
            // (t a1 + r a2)^n1 (-r a1 + t a2)^n2 |0,0> / sqrt(n1! n2!)
            for k in 0..=n1 {
                for l in 0..=n2 {
                    let m1 = k + l;
                    let m2 = total - m1;
                    if m1 >= d1 || m2 >= d2 {
                        continue;
                    }
                    let coeff = t.powi(k as i32)
                        * r.powi((n1 - k) as i32)
                        * (-r).powi(l as i32)
                        * t.powi((n2 - l) as i32);
                    if coeff == 0.0 {
                        continue;
                    }
                    let mag = (ln_binom(n1, k) + ln_binom(n2, l) + 0.5 * (lf[m1] + lf[m2] - lf[n1] - lf[n2])).exp();
                    elems[(m1 * d2 + m2, col)] += C64::new(coeff * mag, 0.0);
                }
            }
        }
    }
    TwoModeOperator { elems, truncs }
}

/// Herald pair ⊗ signal composite. Rows index the herald pair
/// (`n1 * N2 + n2`), columns the signal level; the flattened three-mode index
/// is `(n1 * N2 + n2) * Ns + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeraldedState {
    amps: DMatrix<C64>,
    herald: (Truncation, Truncation),
    signal: Truncation,
}

impl HeraldedState {
    pub fn product(herald: &TwoModeState, signal: &StateVector) -> Self {
        Self {
            amps: herald.amps() * signal.amps().transpose(),
            herald: herald.truncs(),
            signal: signal.trunc(),
        }
    }

    pub fn herald_truncs(&self) -> (Truncation, Truncation) {
        self.herald
    }

    pub fn signal_trunc(&self) -> Truncation {
        self.signal
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Amplitude of `|n1, n2>_herald |s>_signal`.
    pub fn amp(&self, n1: usize, n2: usize, s: usize) -> C64 {
        self.amps[(n1 * self.herald.1.dim() + n2, s)]
    }

    pub fn from_flat(amps: Vec<C64>, herald: (Truncation, Truncation), signal: Truncation) -> Result<Self> {
        let rows = herald.0.dim() * herald.1.dim();
        check_same_dim(rows * signal.dim(), amps.len())?;
        Ok(Self {
            amps: DMatrix::from_row_slice(rows, signal.dim(), &amps),
            herald,
            signal,
        })
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self {
            amps: &self.amps * k,
            herald: self.herald,
            signal: self.signal,
        }
    }

    /// Applies a two-mode operator to the herald pair, identity on the signal.
    pub fn apply_herald(&self, op: &TwoModeOperator) -> Result<Self> {
        check_same_dim(self.amps.nrows(), op.elems().ncols())?;
        Ok(Self {
            amps: op.elems() * &self.amps,
            herald: self.herald,
            signal: self.signal,
        })
    }

    /// `(<n1|<n2| ⊗ 1) |joint>` without normalization.
    pub fn contract(&self, outcome: (usize, usize)) -> Result<StateVector> {
        let (n1, n2) = outcome;
        if n1 >= self.herald.0.dim() || n2 >= self.herald.1.dim() {
            return Err(Error::Domain(format!("herald outcome {outcome:?} outside truncation")));
        }
        let row = self.amps.row(n1 * self.herald.1.dim() + n2).transpose();
        Ok(StateVector::from_dvector(row, self.signal))
    }

    /// Conditional signal state and its probability for the herald outcome
    /// `|n1>|n2>`. The probability is the squared norm of the contraction,
    /// so it is a true probability when the joint state is normalized.
    pub fn herald_project(&self, outcome: (usize, usize)) -> Result<(StateVector, f64)> {
        let raw = self.contract(outcome)?;
        let p = raw.norm_sqr();
        if p.sqrt() < ZERO_NORM {
            return Err(Error::HeraldImpossible { outcome, norm: p.sqrt() });
        }
        Ok((raw.normalized()?, p))
    }
}

impl Add for &HeraldedState {
    type Output = HeraldedState;

    fn add(self, rhs: &HeraldedState) -> HeraldedState {
        assert_eq!(self.amps.shape(), rhs.amps.shape(), "herald composite shape mismatch");
        HeraldedState {
            amps: &self.amps + &rhs.amps,
            herald: self.herald,
            signal: self.signal,
        }
    }
}
