//! Phase-space views of a single-mode state.
//!
//! Convention: `x = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`, so
//! `[x, p] = i`, the vacuum has quadrature variance `1/2` and
//! `W(x, p) = (1/pi) Tr[rho D(gamma) P D(gamma)^dag]` with
//! `gamma = (x + i p)/sqrt 2` and `P` the photon-number parity.

mod hermite;
mod loss;
mod marginal;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, DisplacementKernel, C64};

pub use hermite::{fill_hermite_functions, hermite_functions};
pub use loss::{apply_loss, LossChannel};
#[allow(unused_imports)]
pub(crate) use marginal::{csv_err, rotated_real_part};
pub use marginal::{linspace, marginal, QuadratureDistribution};

pub const CONVENTION: &str = "x=(a+a†)/sqrt2";

/// Rectangular phase-space grid, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, p_min: f64, p_max: f64, np: usize) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            nx,
            p_min,
            p_max,
            np,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square grid `[-half, half]^2` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, n, -half, half, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.p_min >= self.p_max {
            return Err(Error::Domain(format!(
                "grid needs finite x_min < x_max and p_min < p_max, got x [{}, {}], p [{}, {}]",
                self.x_min, self.x_max, self.p_min, self.p_max
            )));
        }
        if self.nx < 2 || self.np < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points per axis, got {} x {}",
                self.nx, self.np
            )));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.np)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    /// Same spacing, shifted by `(dx, dp)`.
    pub fn shifted(&self, dx: f64, dp: f64) -> Self {
        Self {
            x_min: self.x_min + dx,
            x_max: self.x_max + dx,
            p_min: self.p_min + dp,
            p_max: self.p_max + dp,
            ..*self
        }
    }

    /// Largest `|gamma|` over the grid.
    fn gamma_max(&self) -> f64 {
        let x = self.x_min.abs().max(self.x_max.abs());
        let p = self.p_min.abs().max(self.p_max.abs());
        x.hypot(p) * FRAC_1_SQRT_2
    }
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self::square(6.0, 241).expect("default grid is valid")
    }
}

/// Wigner function sampled on a [`PhaseGrid`]; `values[ip * nx + ix]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerMap {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
}

impl WignerMap {
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ip * self.grid.nx + ix]
    }

    /// 2-D trapezoidal integral.
    pub fn integral(&self) -> f64 {
        let (nx, np) = (self.grid.nx, self.grid.np);
        let w = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut s = 0.0;
        for ip in 0..np {
            for ix in 0..nx {
                s += w(ix, nx) * w(ip, np) * self.at(ix, ip);
            }
        }
        s * self.grid.dx() * self.grid.dp()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Phase-space coordinates of the largest value.
    pub fn argmax(&self) -> (f64, f64) {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        let (ix, ip) = (k % self.grid.nx, k / self.grid.nx);
        (
            self.grid.x_min + ix as f64 * self.grid.dx(),
            self.grid.p_min + ip as f64 * self.grid.dp(),
        )
    }

    /// Largest `|W|` on the grid boundary; small when the state fits inside.
    pub fn edge_max_abs(&self) -> f64 {
        let (nx, np) = (self.grid.nx, self.grid.np);
        let mut m = 0.0f64;
        for ix in 0..nx {
            m = m.max(self.at(ix, 0).abs()).max(self.at(ix, np - 1).abs());
        }
        for ip in 0..np {
            m = m.max(self.at(0, ip).abs()).max(self.at(nx - 1, ip).abs());
        }
        m
    }

    /// Largest pointwise difference; grids must have the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grid shape mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Text grid: three `#` header lines, then one row of `nx` values per `p`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.grid;
        writeln!(w, "# {} {} {}", g.x_min, g.x_max, g.nx)?;
        writeln!(w, "# {} {} {}", g.p_min, g.p_max, g.np)?;
        writeln!(w, "# convention {CONVENTION}")?;
        for row in self.values.chunks(g.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Extra levels added to the state's own dimension before displacing by
/// up to `gamma_max`, enough to keep the parity evaluation at double
/// precision.
pub fn working_dim(state_dim: usize, gamma_max: f64) -> usize {
    let g = gamma_max;
    state_dim + (g * g + 8.0 * g + 30.0).ceil() as usize
}

/// Reusable pointwise Wigner evaluator for one density matrix.
pub struct WignerEvaluator {
    kernel: DisplacementKernel,
    components: Vec<(f64, Vec<C64>)>,
}

impl WignerEvaluator {
    /// Prepares evaluation for points with `|gamma| <= gamma_max`.
    pub fn new(rho: &DensityMatrix, gamma_max: f64) -> Self {
        let spectrum = rho.spectral_components(0.0);
        let largest = spectrum.iter().map(|(p, _)| p.abs()).fold(0.0, f64::max);
        let components = spectrum
            .into_iter()
            .filter(|(p, _)| p.abs() > 1e-15 * largest)
            .map(|(p, v)| (p, v.iter().cloned().collect()))
            .collect();
        Self {
            kernel: DisplacementKernel::new(working_dim(rho.dim(), gamma_max)),
            components,
        }
    }

    /// `W(x, p)`.
    pub fn at(&self, x: f64, p: f64) -> f64 {
        let gamma = C64::new(x, p) * FRAC_1_SQRT_2;
        let s: f64 = self
            .components
            .iter()
            .map(|(w, v)| w * self.kernel.displaced_parity(v, gamma))
            .sum();
        s / PI
    }
}

/// `W(x, p)` at a single point.
pub fn wigner_at(rho: &DensityMatrix, x: f64, p: f64) -> f64 {
    WignerEvaluator::new(rho, x.hypot(p) * FRAC_1_SQRT_2).at(x, p)
}

/// Wigner function on every point of `grid`.
pub fn wigner(rho: &DensityMatrix, grid: &PhaseGrid) -> WignerMap {
    let eval = WignerEvaluator::new(rho, grid.gamma_max());
    let xs = grid.xs();
    let mut values = Vec::with_capacity(grid.nx * grid.np);
    for p in grid.ps() {
        for &x in &xs {
            values.push(eval.at(x, p));
        }
    }
    WignerMap { grid: *grid, values }
}
