use std::io::Write;

use nalgebra::DMatrix;

use super::hermite::fill_hermite_functions;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, C64};

/// Probability density of the rotated quadrature `x_phi` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureDistribution {
    pub phase: f64,
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
}

impl QuadratureDistribution {
    /// Trapezoidal integral over `xs`.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.xs, &self.density)
    }

    /// `{prefix}_phi{phase:.4}.csv`.
    pub fn file_name(&self, prefix: &str) -> String {
        format!("{prefix}_phi{:.4}.csv", self.phase)
    }

    /// CSV with header `x,density`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "density"]).map_err(csv_err)?;
        for (x, d) in self.xs.iter().zip(&self.density) {
            out.write_record([fmt(*x), fmt(*d)]).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Largest absolute pointwise difference to `f`.
    pub fn sup_error<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.xs
            .iter()
            .zip(&self.density)
            .map(|(&x, &d)| (d - f(x)).abs())
            .fold(0.0, f64::max)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub(crate) fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Real part of `rho` rotated into the frame of `x_phi`:
/// `(rho_phi)_mn = rho_mn e^{-i (m - n) phi}`. Its quadratic form with the
/// real Hermite vector gives the density.
pub(crate) fn rotated_real_part(rho: &DensityMatrix, phase: f64) -> DMatrix<f64> {
    let n = rho.dim();
    DMatrix::from_fn(n, n, |m, l| {
        let rot = C64::from_polar(1.0, -(m as f64 - l as f64) * phase);
        (rho.get(m, l) * rot).re
    })
}

/// `pr(x; phi) = <x_phi| rho |x_phi>` with `<x_phi|n> = psi_n(x) e^{-i n phi}`.
pub fn marginal(rho: &DensityMatrix, phase: f64, xs: &[f64]) -> QuadratureDistribution {
    let a = rotated_real_part(rho, phase);
    let n = rho.dim();
    let mut h = vec![0.0; n];
    let density = xs
        .iter()
        .map(|&x| {
            fill_hermite_functions(x, &mut h);
            let mut total = 0.0;
            for m in 0..n {
                let row: f64 = (0..n).map(|l| a[(m, l)] * h[l]).sum();
                total += h[m] * row;
            }
            total.max(0.0)
        })
        .collect();
    QuadratureDistribution {
        phase,
        xs: xs.to_vec(),
        density,
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}
