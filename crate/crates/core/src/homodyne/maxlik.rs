use std::io::Write;

use nalgebra::DMatrix;

use super::QuadratureSample;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, Truncation, C64};
use crate::phase_space::{csv_err, fill_hermite_functions};

pub const MAX_DIM: usize = 30;
pub const DEFAULT_MAX_ITER: usize = 2000;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Smallest dilution tried before a non-improving step ends the iteration.
const MIN_DILUTION: f64 = 1e-6;

/// Samples per cache block in the likelihood pass.
const CHUNK: usize = 512;

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub rho_hat: DensityMatrix,
    /// Log-likelihood of the starting point followed by one entry per
    /// accepted iteration.
    pub log_likelihood_trace: Vec<f64>,
    pub iterations_used: usize,
}

impl ReconstructionResult {
    /// CSV with header `iteration,log_likelihood`.
    pub fn write_trace_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "log_likelihood"]).map_err(csv_err)?;
        for (i, ll) in self.log_likelihood_trace.iter().enumerate() {
            out.write_record([i.to_string(), format!("{ll:.17e}")]).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// All samples taken at one phase, with their Hermite vectors as columns
/// of `h`; `ht` is its transpose, kept for the accumulation product.
struct PhaseBlock {
    phase: f64,
    indices: Vec<usize>,
    xs: Vec<f64>,
    h: DMatrix<f64>,
    ht: DMatrix<f64>,
}

fn group_by_phase(samples: &[QuadratureSample], dim: usize) -> Result<Vec<PhaseBlock>> {
    let mut order: Vec<f64> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if !s.phase.is_finite() || !s.x.is_finite() {
            return Err(Error::Data {
                index: i,
                phase: s.phase,
                x: s.x,
                reason: "non-finite sample".into(),
            });
        }
        match order.iter().position(|&p| p == s.phase) {
            Some(k) => members[k].push(i),
            None => {
                order.push(s.phase);
                members.push(vec![i]);
            }
        }
    }
    let mut col = vec![0.0; dim];
    Ok(order
        .into_iter()
        .zip(members)
        .map(|(phase, indices)| {
            let xs: Vec<f64> = indices.iter().map(|&i| samples[i].x).collect();
            let mut h = DMatrix::zeros(dim, xs.len());
            for (j, &x) in xs.iter().enumerate() {
                fill_hermite_functions(x, &mut col);
                h.column_mut(j).copy_from_slice(&col);
            }
            let ht = h.transpose();
            PhaseBlock {
                phase,
                indices,
                xs,
                h,
                ht,
            }
        })
        .collect())
}

/// Neumaier-compensated running sum; the log-likelihood adds up ~10^5
/// terms and its increments must be resolved near 1e-9.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Log-likelihood and `R(rho) = (1/K) sum_j Pi_j / Tr(rho Pi_j)` at `rho`.
fn likelihood_and_r(rho: &DMatrix<C64>, blocks: &[PhaseBlock], total: usize) -> Result<(f64, DMatrix<C64>)> {
    let dim = rho.nrows();
    let mut ll = CompensatedSum::default();
    let mut r = DMatrix::<C64>::zeros(dim, dim);
    for b in blocks {
        let rot = |m: usize, n: usize| C64::from_polar(1.0, -(m as f64 - n as f64) * b.phase);
        // Tr(rho Pi) = h^T Re(rho_phi) h for real h
        let a = DMatrix::from_fn(dim, dim, |m, n| (rho[(m, n)] * rot(m, n)).re);
        let n = b.xs.len();
        let mut rk = DMatrix::<f64>::zeros(dim, dim);
        let mut g = DMatrix::<f64>::zeros(dim, CHUNK);
        for start in (0..n).step_by(CHUNK) {
            let len = CHUNK.min(n - start);
            g.columns_mut(0, len).gemm(1.0, &a, &b.h.columns(start, len), 0.0);
            // column j becomes h_j / p_j once p_j is known
            let hs = &b.h.as_slice()[start * dim..(start + len) * dim];
            let gs = &mut g.as_mut_slice()[..len * dim];
            for (j, (hc, gc)) in hs.chunks_exact(dim).zip(gs.chunks_exact_mut(dim)).enumerate() {
                let p: f64 = hc.iter().zip(gc.iter()).map(|(x, y)| x * y).sum();
                if !(p > 0.0) || !p.is_finite() {
                    let k = start + j;
                    return Err(Error::Data {
                        index: b.indices[k],
                        phase: b.phase,
                        x: b.xs[k],
                        reason: format!(
                            "model probability {p:e} is not positive; the sample lies outside the numerical support"
                        ),
                    });
                }
                ll.add(p.ln());
                let inv = 1.0 / p;
                for (gv, hv) in gc.iter_mut().zip(hc) {
                    *gv = hv * inv;
                }
            }
            rk.gemm(1.0, &g.columns(0, len), &b.ht.rows(start, len), 1.0);
        }
        for m in 0..dim {
            for n in 0..dim {
                r[(m, n)] += rot(m, n).conj() * rk[(m, n)];
            }
        }
    }
    let ll = ll.value();
    if !ll.is_finite() {
        return Err(Error::Data {
            index: 0,
            phase: blocks[0].phase,
            x: blocks[0].xs[0],
            reason: "log-likelihood is not finite".into(),
        });
    }
    Ok((ll, r / C64::new(total as f64, 0.0)))
}

/// `S rho S^dag` with trace renormalized and Hermiticity restored.
fn sandwich(s: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let out = s * rho * s.adjoint();
    let out = (&out + out.adjoint()) * C64::new(0.5, 0.0);
    let tr = out.trace().re;
    out / C64::new(tr, 0.0)
}

/// Iterative maximum-likelihood estimate `rho <- N[R rho R]` starting from
/// the maximally mixed state.
///
/// A step that would lower the likelihood is replaced by the diluted update
/// `(1 + eps R) rho (1 + eps R)`, halving `eps` until the likelihood does not
/// drop; the run ends when `eps` falls below `1e-6`, when the gain is below
/// `tol`, or after `max_iter` accepted steps.
pub fn maxlik_reconstruct(
    samples: &[QuadratureSample],
    dim: usize,
    max_iter: usize,
    tol: f64,
) -> Result<ReconstructionResult> {
    if samples.is_empty() {
        return Err(Error::Precondition("no quadrature samples to reconstruct from".into()));
    }
    if dim > MAX_DIM {
        return Err(Error::Precondition(format!("reconstruction dim {dim} exceeds {MAX_DIM}")));
    }
    let trunc = Truncation::new(dim)?;
    let blocks = group_by_phase(samples, dim)?;
    let mut rho = DensityMatrix::maximally_mixed(trunc).elems().clone();
    let (mut ll, mut r) = likelihood_and_r(&rho, &blocks, samples.len())?;
    let mut trace = vec![ll];
    let mut iterations = 0;
    let id = DMatrix::<C64>::identity(dim, dim);

    while iterations < max_iter {
        let mut next = sandwich(&r, &rho);
        let mut eval = likelihood_and_r(&next, &blocks, samples.len())?;
        let mut eps = 1.0;
        while eval.0 < ll && eps >= MIN_DILUTION {
            next = sandwich(&(&id + &r * C64::new(eps, 0.0)), &rho);
            eval = likelihood_and_r(&next, &blocks, samples.len())?;
            eps *= 0.5;
        }
        if eval.0 < ll {
            break;
        }
        let gain = eval.0 - ll;
        rho = next;
        (ll, r) = eval;
        trace.push(ll);
        iterations += 1;
        if gain < tol {
            break;
        }
    }

    Ok(ReconstructionResult {
        rho_hat: DensityMatrix::new(rho, trunc)?,
        log_likelihood_trace: trace,
        iterations_used: iterations,
    })
}
