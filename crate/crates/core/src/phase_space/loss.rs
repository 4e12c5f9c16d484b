use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{ln_factorials, DensityMatrix, C64};

/// Pure-loss channel with transmission `eta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossChannel {
    eta: f64,
}

impl LossChannel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("detection efficiency must lie in [0, 1], got {eta}")));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Generalized Bernoulli map
/// `rho'_mn = sum_k sqrt(C(m+k,k) C(n+k,k)) eta^{(m+n)/2} (1-eta)^k rho_{m+k,n+k}`.
pub fn apply_loss(rho: &DensityMatrix, channel: LossChannel) -> Result<DensityMatrix> {
    let eta = channel.eta();
    let n = rho.dim();
    if eta == 1.0 {
        return Ok(rho.clone());
    }
    let lf = ln_factorials(n);
    let ln_binom = |top: usize, k: usize| lf[top] - lf[k] - lf[top - k];
    let se = eta.sqrt();
    let loss = 1.0 - eta;
    let out = DMatrix::from_fn(n, n, |m, l| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n - m.max(l) {
            let w = (0.5 * (ln_binom(m + k, k) + ln_binom(l + k, k))).exp() * loss.powi(k as i32);
            acc += rho.get(m + k, l + k) * w;
        }
        acc * se.powi((m + l) as i32)
    });
    DensityMatrix::new(out, rho.trunc())
}
