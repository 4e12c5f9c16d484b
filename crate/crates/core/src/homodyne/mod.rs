//! Simulated homodyne acquisition and iterative maximum-likelihood state
//! reconstruction.

mod maxlik;

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::phase_space::{apply_loss, csv_err, linspace, marginal, LossChannel};

pub use maxlik::{maxlik_reconstruct, ReconstructionResult, DEFAULT_MAX_ITER, DEFAULT_TOL, MAX_DIM};

/// Sampling window of the inverse-CDF table.
pub const SAMPLE_RANGE: (f64, f64) = (-8.0, 8.0);
pub const SAMPLE_POINTS: usize = 4001;

/// One homodyne outcome at local-oscillator phase `phase`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub struct QuadratureSample {
    pub phase: f64,
    pub x: f64,
}

/// What to measure and how many times.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingPlan {
    pub phases: Vec<f64>,
    pub samples_per_phase: usize,
    pub seed: u64,
    pub eta: f64,
}

impl SamplingPlan {
    pub fn new(phases: Vec<f64>, samples_per_phase: usize, seed: u64, eta: f64) -> Result<Self> {
        let plan = Self {
            phases,
            samples_per_phase,
            seed,
            eta,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// `count` phases `k pi / count`, `k = 0..count`.
    pub fn equally_spaced(count: usize, samples_per_phase: usize, seed: u64, eta: f64) -> Result<Self> {
        let phases = (0..count).map(|k| k as f64 * PI / count as f64).collect();
        Self::new(phases, samples_per_phase, seed, eta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::Precondition("sampling plan has no phases".into()));
        }
        for (i, &p) in self.phases.iter().enumerate() {
            if !(0.0..PI).contains(&p) {
                return Err(Error::Domain(format!("phase {i} = {p} is outside [0, pi)")));
            }
            if self.phases[..i].contains(&p) {
                return Err(Error::Domain(format!("phase {i} = {p} is repeated")));
            }
        }
        if self.samples_per_phase == 0 {
            return Err(Error::Domain("samples_per_phase must be positive".into()));
        }
        LossChannel::new(self.eta)?;
        Ok(())
    }
}

/// Piecewise-linear CDF on a fixed grid, inverted by bisection.
struct InverseCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new(xs: Vec<f64>, density: &[f64]) -> Result<Self> {
        let mut cdf = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..xs.len() {
            acc += 0.5 * (xs[i] - xs[i - 1]) * (density[i] + density[i - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Precondition("quadrature density vanishes on the sampling window".into()));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self { xs, cdf })
    }

    fn sample(&self, u: f64) -> f64 {
        // first index with cdf > u, then interpolate inside [i-1, i]
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.xs.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let f = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.xs[i - 1] + f * (self.xs[i] - self.xs[i - 1])
    }
}

/// Draws `samples_per_phase` outcomes at every phase of `plan` from `rho`
/// after loss with efficiency `plan.eta`. Phase `k` uses its own ChaCha20
/// stream seeded with `seed + k`.
pub fn sample_quadratures(rho: &DensityMatrix, plan: &SamplingPlan) -> Result<Vec<QuadratureSample>> {
    plan.validate()?;
    let lossy = apply_loss(rho, LossChannel::new(plan.eta)?)?;
    let xs = linspace(SAMPLE_RANGE.0, SAMPLE_RANGE.1, SAMPLE_POINTS);
    let mut out = Vec::with_capacity(plan.phases.len() * plan.samples_per_phase);
    for (k, &phase) in plan.phases.iter().enumerate() {
        let dist = marginal(&lossy, phase, &xs);
        let inv = InverseCdf::new(dist.xs, &dist.density)?;
        let mut rng = ChaCha20Rng::seed_from_u64(plan.seed.wrapping_add(k as u64));
        for _ in 0..plan.samples_per_phase {
            let u: f64 = rng.gen();
            out.push(QuadratureSample { phase, x: inv.sample(u) });
        }
    }
    Ok(out)
}

/// CSV with header `phase,x`; phases to 10 decimals.
pub fn write_samples_csv<W: Write>(w: W, samples: &[QuadratureSample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["phase", "x"]).map_err(csv_err)?;
    for s in samples {
        out.write_record([format!("{:.10}", s.phase), format!("{:.17e}", s.x)])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(r: R) -> Result<Vec<QuadratureSample>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["phase", "x"] {
        return Err(Error::Precondition(format!("expected header `phase,x`, got `{}`", headers.as_slice())));
    }
    rdr.deserialize()
        .map(|row| row.map_err(csv_err))
        .collect()
}
