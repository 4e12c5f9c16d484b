use nalgebra::DVector;

use super::{check_same_dim, Truncation, C64, ONE, ZERO, ZERO_NORM};
use crate::error::{Error, Result};

/// Pure state of one mode as amplitudes over `|0>..|N-1>`.
///
/// Amplitudes are stored as given; conditional outputs and intermediate
/// results may be unnormalized. Use [`StateVector::normalized`] before
/// reading probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
    trunc: Truncation,
}

impl StateVector {
    /// Wraps raw amplitudes without normalizing or checking the tail.
    pub fn new(amps: Vec<C64>, trunc: Truncation) -> Result<Self> {
        check_same_dim(trunc.dim(), amps.len())?;
        Ok(Self {
            amps: DVector::from_vec(amps),
            trunc,
        })
    }

    /// Normalized state from user amplitudes; the top level must respect the
    /// truncation's tail tolerance.
    pub fn from_amps(amps: Vec<C64>, trunc: Truncation) -> Result<Self> {
        let s = Self::new(amps, trunc)?.normalized()?;
        s.check_tail("custom state")?;
        Ok(s)
    }

    pub(crate) fn from_dvector(amps: DVector<C64>, trunc: Truncation) -> Self {
        debug_assert_eq!(amps.len(), trunc.dim());
        Self { amps, trunc }
    }

    pub fn zeros(trunc: Truncation) -> Self {
        Self::from_dvector(DVector::from_element(trunc.dim(), ZERO), trunc)
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amp(&self, n: usize) -> C64 {
        self.amps[n]
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy; fails on a (numerically) zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm < ZERO_NORM {
            return Err(Error::Domain(format!("cannot normalize a vector of norm {norm:e}")));
        }
        Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self::from_dvector(&self.amps * k, self.trunc)
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, k: C64, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self::from_dvector(&self.amps + &other.amps * k, self.trunc))
    }

    /// Probability weight on the top level, relative to the total.
    pub fn top_level_weight(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            0.0
        } else {
            self.amps[self.dim() - 1].norm_sqr() / total
        }
    }

    pub fn check_tail(&self, what: &str) -> Result<()> {
        self.trunc.check_top_level(self.amps.as_slice(), what)
    }

    /// Pads with zeros (or drops empty upper levels) to live in `trunc`.
    pub fn embedded(&self, trunc: Truncation) -> Result<Self> {
        let n = trunc.dim();
        if n < self.dim() {
            let dropped: f64 = self.amps.iter().skip(n).map(|a| a.norm_sqr()).sum();
            if dropped > trunc.tail_tol() * self.norm_sqr() {
                return Err(Error::Truncation {
                    what: "embedding into a smaller space".into(),
                    weight: dropped / self.norm_sqr(),
                    tail_tol: trunc.tail_tol(),
                    required_dim: self.dim(),
                });
            }
        }
        let amps = DVector::from_fn(n, |i, _| if i < self.dim() { self.amps[i] } else { ZERO });
        Ok(Self::from_dvector(amps, trunc))
    }
}

/// The number state `|n>`.
pub fn fock_state(n: usize, trunc: Truncation) -> Result<StateVector> {
    if n >= trunc.dim() {
        return Err(Error::Domain(format!(
            "Fock level {n} outside truncation of dim {}",
            trunc.dim()
        )));
    }
    let mut s = StateVector::zeros(trunc);
    s.amps[n] = ONE;
    Ok(s)
}

/// Poissonian weights `e^{-m} m^n / n!` for `n < dim` plus the weight beyond.
fn poisson_weights(mean: f64, dim: usize) -> (Vec<f64>, f64) {
    let mut w = Vec::with_capacity(dim);
    let mut p = (-mean).exp();
    for n in 0..dim {
        if n > 0 {
            p *= mean / n as f64;
        }
        w.push(p);
    }
    // Sum the tail term by term to avoid cancellation in 1 - sum.
    let mut tail = 0.0;
    let mut n = dim;
    loop {
        p *= mean / n as f64;
        tail += p;
        if (n as f64) > mean && p < tail * 1e-17 || p == 0.0 || n > dim + 100_000 {
            break;
        }
        n += 1;
    }
    (w, tail)
}

/// Smallest dimension admitting a coherent state of this mean photon number.
fn coherent_required_dim(mean: f64, tail_tol: f64) -> usize {
    let mut dim = 2;
    loop {
        let (w, tail) = poisson_weights(mean, dim);
        if tail < tail_tol && w[dim - 1] <= tail_tol {
            return dim;
        }
        dim += 1;
    }
}

/// Coherent state `|alpha>` with closed-form Poissonian amplitudes,
/// renormalized on the truncated space.
pub fn coherent_state(alpha: C64, trunc: Truncation) -> Result<StateVector> {
    let n = trunc.dim();
    let mean = alpha.norm_sqr();
    let (w, tail) = poisson_weights(mean, n);
    if tail >= trunc.tail_tol() || w[n - 1] > trunc.tail_tol() {
        return Err(Error::Truncation {
            what: format!("coherent state alpha = {alpha}"),
            weight: tail + w[n - 1],
            tail_tol: trunc.tail_tol(),
            required_dim: coherent_required_dim(mean, trunc.tail_tol()),
        });
    }
    let mut amps = Vec::with_capacity(n);
    let mut c = C64::new((-mean / 2.0).exp(), 0.0);
    for k in 0..n {
        if k > 0 {
            c = c * alpha / (k as f64).sqrt();
        }
        amps.push(c);
    }
    StateVector::new(amps, trunc)?.normalized()
}

/// Dimension needed to hold `|alpha>` under the given tail tolerance.
pub fn coherent_dim_for(alpha: C64, tail_tol: f64) -> usize {
    coherent_required_dim(alpha.norm_sqr(), tail_tol)
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<C64> {
    check_same_dim(u.dim(), v.dim())?;
    Ok(u.amps.dotc(&v.amps))
}

/// `|<x|y>|^2` of the normalized inputs.
pub fn fidelity(x: &StateVector, y: &StateVector) -> Result<f64> {
    let ov = inner_product(x, y)?;
    let f = ov.norm_sqr() / (x.norm_sqr() * y.norm_sqr());
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    #[test]
    fn fock_basis() {
        let s = fock_state(1, t(10)).unwrap();
        for n in 0..10 {
            assert_eq!(s.amp(n), if n == 1 { ONE } else { ZERO });
        }
        let s0 = fock_state(0, t(2)).unwrap();
        assert_eq!(s0.amps().as_slice(), &[ONE, ZERO]);
        let ip = inner_product(&fock_state(0, t(10)).unwrap(), &s).unwrap();
        assert_eq!(ip, ZERO);
        assert!(fock_state(10, t(10)).is_err());
    }

    #[test]
    fn coherent_amplitudes() {
        let vac = coherent_state(ZERO, t(8)).unwrap();
        assert_eq!(vac, fock_state(0, t(8)).unwrap());

        let s = coherent_state(ONE, t(25)).unwrap();
        assert!((s.amp(0).re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_tail_violation_reports_dim() {
        let err = coherent_state(C64::new(2.0, 0.0), t(10)).unwrap_err();
        match err {
            Error::Truncation { required_dim, .. } => {
                assert!(required_dim > 10);
                assert!(coherent_state(C64::new(2.0, 0.0), t(required_dim)).is_ok());
                assert!(coherent_state(C64::new(2.0, 0.0), t(required_dim - 1)).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fidelity_closed_forms() {
        let a = C64::new(0.7, -0.4);
        let psi = coherent_state(a, t(30)).unwrap();
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-14);
        let f0 = fidelity(&psi, &fock_state(0, t(30)).unwrap()).unwrap();
        assert!((f0 - (-a.norm_sqr()).exp()).abs() < 1e-12);
        let f01 = fidelity(&fock_state(0, t(30)).unwrap(), &fock_state(1, t(30)).unwrap()).unwrap();
        assert_eq!(f01, 0.0);
        assert!(fidelity(&psi, &fock_state(0, t(5)).unwrap()).is_err());
    }

    #[test]
    fn inner_product_conjugates_first_argument() {
        let tr = t(3);
        let u = StateVector::new(vec![C64::new(0.0, 1.0), ZERO, ZERO], tr).unwrap();
        let v = fock_state(0, tr).unwrap();
        assert_eq!(inner_product(&u, &v).unwrap(), C64::new(0.0, -1.0));
    }

    #[test]
    fn custom_state_tail_guard() {
        let tr = t(4);
        assert!(StateVector::from_amps(vec![ONE, ONE, ZERO, ZERO], tr).is_ok());
        assert!(StateVector::from_amps(vec![ONE, ONE, ZERO, ONE], tr).is_err());
        assert!(StateVector::from_amps(vec![ZERO; 4], tr).is_err());
    }
}
