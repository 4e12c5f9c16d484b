//! Truncated Fock-space linear algebra for a single bosonic mode and for the
//! small multi-mode composites used by heralded schemes.
//!
//! Every state and operator carries the [`Truncation`] it lives in. Levels run
//! `|0>..|N-1>`. Multi-mode amplitudes are flattened mode-1-major: the
//! two-mode index of `|n1, n2>` is `n1 * N2 + n2`.

mod density;
mod displacement;
mod json;
mod multimode;
mod operator;
mod state;

pub use density::{mixed_fidelity, DensityMatrix};
pub use displacement::{displace, displacement_op, DisplacementKernel};
pub use json::{read_density_matrix, read_state_vector, write_density_matrix, write_state_vector};
pub use multimode::{beam_splitter_op, HeraldedState, TwoModeOperator, TwoModeState};
pub use operator::{expectation, ladder_operators, Ladder, ModeOperator};
pub use state::{coherent_dim_for, coherent_state, fidelity, fock_state, inner_product, StateVector};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Conditional states with a norm below this are treated as impossible.
pub const ZERO_NORM: f64 = 1e-12;

/// Size of a truncated single-mode Fock space plus its leakage policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    dim: usize,
    tail_tol: f64,
}

impl Truncation {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

    pub fn new(dim: usize) -> Result<Self> {
        Self::with_tail_tol(dim, Self::DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("truncation dim must be >= 2, got {dim}")));
        }
        if !(tail_tol >= 0.0) {
            return Err(Error::Domain(format!("tail_tol must be >= 0, got {tail_tol}")));
        }
        Ok(Self { dim, tail_tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Same tolerance, different size.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        Self::with_tail_tol(dim, self.tail_tol)
    }

    /// Fails when the normalized weight on the top level exceeds `tail_tol`.
    pub(crate) fn check_top_level(&self, amps: &[C64], what: &str) -> Result<()> {
        let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if total == 0.0 {
            return Ok(());
        }
        let top = amps[self.dim - 1].norm_sqr() / total;
        if top > self.tail_tol {
            return Err(Error::Truncation {
                what: what.to_string(),
                weight: top,
                tail_tol: self.tail_tol,
                required_dim: suggest_dim(amps, self.tail_tol),
            });
        }
        Ok(())
    }
}

/// Rough size hint for a state whose upper levels are too populated: assume
/// the distribution keeps decaying at the rate seen over its last few levels.
fn suggest_dim(amps: &[C64], tail_tol: f64) -> usize {
    let n = amps.len();
    let w: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = w.iter().sum();
    let last = (w[n - 1] / total).max(f64::MIN_POSITIVE);
    let prev = (w[n.saturating_sub(4)] / total).max(f64::MIN_POSITIVE);
    let per_level = ((last / prev).ln() / 3.0).min(-0.05);
    let extra = ((tail_tol.max(1e-300) / last).ln() / per_level).ceil().max(1.0);
    n + (extra as usize).min(10 * n)
}

pub(crate) fn check_same_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `ln(n!)` for every `n < len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 0 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_rejects_tiny_dim() {
        assert!(Truncation::new(1).is_err());
        assert!(Truncation::new(2).is_ok());
        assert!(Truncation::with_tail_tol(5, -1.0).is_err());
    }

    #[test]
    fn top_level_guard() {
        let t = Truncation::new(4).unwrap();
        let ok = [ONE, ZERO, ZERO, ZERO];
        assert!(t.check_top_level(&ok, "x").is_ok());
        let bad = [ONE, ZERO, ZERO, C64::new(0.1, 0.0)];
        match t.check_top_level(&bad, "x") {
            Err(Error::Truncation { required_dim, .. }) => assert!(required_dim > 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
