//! Displacement operators from an eigendecomposition of the generator.
//!
//! For `alpha = |alpha| e^{i theta}` the generator `alpha a^dag - alpha^* a`
//! equals `R K R^dag` with `K = a^dag - a` and `R = diag(e^{i n theta})`.
//! Conjugating by `J = diag(i^n)` gives `K = -i J X J^dag` where
//! `X = a + a^dag` is real symmetric tridiagonal. Hence on the truncated
//! space
//!
//! ```text
//! D(alpha) = U diag(e^{-i |alpha| mu_j}) U^dag,   U = diag(e^{i n (theta + pi/2)}) Q
//! ```
//!
//! with `X = Q diag(mu) Q^T`. The same factorization serves every `alpha` at a
//! given dimension, and the Wigner evaluator reuses it.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{state::coherent_dim_for, ModeOperator, StateVector, Truncation, C64, ZERO};
use crate::error::{Error, Result};

/// Eigendecomposition of the truncated `a + a^dag` at one dimension.
#[derive(Clone, Debug)]
pub struct DisplacementKernel {
    dim: usize,
    /// Eigenvalues of `a + a^dag`, ascending.
    nodes: Vec<f64>,
    /// Column `j` is the eigenvector for `nodes[j]`.
    vecs: DMatrix<f64>,
    /// `Q_j^T P Q_{dim-1-j}` with `P` the parity; always +-1.
    pair_sign: Vec<f64>,
}

impl DisplacementKernel {
    pub fn new(dim: usize) -> Self {
        let mut x = DMatrix::<f64>::zeros(dim, dim);
        for n in 1..dim {
            let v = (n as f64).sqrt();
            x[(n - 1, n)] = v;
            x[(n, n - 1)] = v;
        }
        let eig = SymmetricEigen::new(x);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let nodes: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);

        // Parity flips the sign of X, so it maps the mu eigenvector onto the
        // -mu one.
        let pair_sign = (0..dim)
            .map(|j| {
                let k = dim - 1 - j;
                let s: f64 = (0..dim)
                    .map(|n| {
                        let p = if n % 2 == 0 { 1.0 } else { -1.0 };
                        p * vecs[(n, j)] * vecs[(n, k)]
                    })
                    .sum();
                s.signum()
            })
            .collect();
        Self {
            dim,
            nodes,
            vecs,
            pair_sign,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dense `D(alpha)` on this kernel's space.
    pub fn matrix(&self, alpha: C64) -> DMatrix<C64> {
        let r = alpha.norm();
        let theta = alpha.arg() + FRAC_PI_2;
        let phases: Vec<C64> = self.nodes.iter().map(|&mu| C64::from_polar(1.0, -r * mu)).collect();
        DMatrix::from_fn(self.dim, self.dim, |m, n| {
            let mut acc = ZERO;
            for (j, ph) in phases.iter().enumerate() {
                acc += ph * (self.vecs[(m, j)] * self.vecs[(n, j)]);
            }
            acc * C64::from_polar(1.0, (m as f64 - n as f64) * theta)
        })
    }

    /// `<psi| D(gamma) P D(gamma)^dag |psi>` for `psi` given on the leading
    /// `amps.len() <= dim` levels, `P` the photon-number parity.
    ///
    /// Costs `O(dim * amps.len())`: with `w = U^dag psi` the parity becomes a
    /// pairing between the `+mu` and `-mu` eigenvectors.
    pub fn displaced_parity(&self, amps: &[C64], gamma: C64) -> f64 {
        debug_assert!(amps.len() <= self.dim);
        let r = gamma.norm();
        let step = C64::from_polar(1.0, -(gamma.arg() + FRAC_PI_2));
        // phased[n] = e^{-i n (theta + pi/2)} psi_n
        let mut ph = C64::new(1.0, 0.0);
        let phased: Vec<C64> = amps
            .iter()
            .map(|&a| {
                let v = ph * a;
                ph *= step;
                v
            })
            .collect();
        let w: Vec<C64> = (0..self.dim)
            .map(|j| {
                let mut acc = ZERO;
                for (n, &p) in phased.iter().enumerate() {
                    acc += p * self.vecs[(n, j)];
                }
                acc
            })
            .collect();
        let mut total = 0.0;
        for j in 0..self.dim {
            let k = self.dim - 1 - j;
            let kick = C64::from_polar(1.0, -2.0 * r * self.nodes[j]);
            total += self.pair_sign[j] * (w[j].conj() * w[k] * kick).re;
        }
        total
    }
}

/// `exp(alpha a^dag - alpha^* a)` on the truncated space.
///
/// Fails when the displaced vacuum would put more than `tail_tol` on the top
/// level; the error carries a dimension that would suffice.
pub fn displacement_op(alpha: C64, trunc: Truncation) -> Result<ModeOperator> {
    let kernel = DisplacementKernel::new(trunc.dim());
    let m = kernel.matrix(alpha);
    let top = m[(trunc.dim() - 1, 0)].norm_sqr();
    if top > trunc.tail_tol() {
        return Err(Error::Truncation {
            what: format!("displacement by {alpha}"),
            weight: top,
            tail_tol: trunc.tail_tol(),
            required_dim: coherent_dim_for(alpha, trunc.tail_tol()),
        });
    }
    ModeOperator::from_matrix(m, trunc)
}

/// `D(alpha)|psi>` with a leakage check on the result.
pub fn displace(psi: &StateVector, alpha: C64) -> Result<StateVector> {
    let d = displacement_op(alpha, psi.trunc())?;
    let out = d.apply(psi)?;
    out.check_tail("displaced state")?;
    Ok(out)
}
