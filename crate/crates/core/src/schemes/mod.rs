//! Orthogonalizer and qubit-generator constructions.
//!
//! Given any operator `C` and its mean `<C>` on an input `|psi>`, the operator
//! `C - <C> 1` maps `|psi>` onto an orthogonal state. Adding `c 1` turns the
//! same construction into a generator of superpositions `A|psi> + B|psi_perp>`.
//! The [`herald`] submodule builds the beam-splitter realizations of the
//! creation-operator and number-operator variants.

pub mod herald;

pub use herald::{
    heralded_addition_model, heralded_addition_operator, number_scheme_model, number_scheme_operator,
    HeraldModel,
};

use crate::error::{Error, Result};
use crate::fock::{expectation, inner_product, ladder_operators, ModeOperator, StateVector, Truncation, C64, ZERO_NORM};

/// Agreement required between a supplied mean and the measured one.
pub const MEAN_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorKind {
    /// `a^dag`
    Creation,
    /// `n = a^dag a`
    Number,
    Custom(ModeOperator),
}

/// The operator entering the orthogonalizer together with its mean on the
/// intended input state.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalizerSpec {
    pub kind: OperatorKind,
    pub mean_value: C64,
}

impl OrthogonalizerSpec {
    pub fn creation(mean_value: C64) -> Self {
        Self {
            kind: OperatorKind::Creation,
            mean_value,
        }
    }

    pub fn number(mean_photon_number: f64) -> Self {
        Self {
            kind: OperatorKind::Number,
            mean_value: C64::new(mean_photon_number, 0.0),
        }
    }

    pub fn custom(op: ModeOperator, mean_value: C64) -> Self {
        Self {
            kind: OperatorKind::Custom(op),
            mean_value,
        }
    }

    /// Spec whose mean is the expectation of `kind` on `psi`.
    pub fn measured(kind: OperatorKind, psi: &StateVector) -> Result<Self> {
        let c = operator_for(&kind, psi.trunc())?;
        let mut mean_value = expectation(&c, psi)?;
        if kind == OperatorKind::Number {
            mean_value.im = 0.0;
        }
        Ok(Self { kind, mean_value })
    }

    fn validate(&self) -> Result<()> {
        if self.kind == OperatorKind::Number && self.mean_value.im.abs() >= 1e-12 {
            return Err(Error::Domain(format!(
                "mean photon number must be real, got {}",
                self.mean_value
            )));
        }
        Ok(())
    }

    /// The bare operator `C`.
    pub fn operator(&self, trunc: Truncation) -> Result<ModeOperator> {
        operator_for(&self.kind, trunc)
    }
}

fn operator_for(kind: &OperatorKind, trunc: Truncation) -> Result<ModeOperator> {
    match kind {
        OperatorKind::Creation => Ok(ladder_operators(trunc).a_dag),
        OperatorKind::Number => Ok(ladder_operators(trunc).n),
        OperatorKind::Custom(op) => {
            if op.dim() != trunc.dim() {
                return Err(Error::DimensionMismatch {
                    expected: trunc.dim(),
                    actual: op.dim(),
                });
            }
            Ok(op.clone())
        }
    }
}

/// `C - <C> 1`.
pub fn build_orthogonalizer(spec: &OrthogonalizerSpec, trunc: Truncation) -> Result<ModeOperator> {
    spec.validate()?;
    Ok(spec.operator(trunc)?.plus_identity(-spec.mean_value))
}

fn check_mean(spec: &OrthogonalizerSpec, psi: &StateVector) -> Result<()> {
    let measured = expectation(&spec.operator(psi.trunc())?, psi)?;
    if (measured - spec.mean_value).norm() > MEAN_TOLERANCE {
        return Err(Error::MeanMismatch {
            supplied: spec.mean_value,
            measured,
        });
    }
    Ok(())
}

/// Creation-operator outputs can leak past the truncation; other kinds are
/// exact matrices on the truncated space.
fn check_leakage(spec: &OrthogonalizerSpec, input: &StateVector, output: &StateVector) -> Result<()> {
    if spec.kind == OperatorKind::Creation {
        input.check_tail("orthogonalizer input")?;
        output.check_tail("orthogonalizer output")?;
    }
    Ok(())
}

/// Normalized `(C - <C>)|psi>`.
///
/// The supplied mean must match the measured expectation on `psi`. A vanishing
/// output means `psi` is an eigenstate of `C` and is reported as
/// [`Error::Eigenstate`].
pub fn orthogonalize(psi: &StateVector, spec: &OrthogonalizerSpec) -> Result<StateVector> {
    let psi = psi.normalized()?;
    check_mean(spec, &psi)?;
    let out = build_orthogonalizer(spec, psi.trunc())?.apply(&psi)?;
    let norm = out.norm();
    if norm < ZERO_NORM {
        return Err(Error::Eigenstate { norm });
    }
    check_leakage(spec, &psi, &out)?;
    out.normalized()
}

/// `O^m |psi>` normalized, for `m = 1..=k`.
///
/// Only the creation-operator orthogonalizer is supported: on a coherent
/// input these are the displaced number states `D(alpha)|m>`.
pub fn orthogonal_family(psi: &StateVector, spec: &OrthogonalizerSpec, k: usize) -> Result<Vec<StateVector>> {
    if spec.kind != OperatorKind::Creation {
        return Err(Error::Precondition(
            "orthogonal family requires the creation-operator orthogonalizer".into(),
        ));
    }
    let psi = psi.normalized()?;
    check_mean(spec, &psi)?;
    psi.check_tail("family input")?;
    let o = build_orthogonalizer(spec, psi.trunc())?;
    let mut current = psi;
    let mut family = Vec::with_capacity(k);
    for m in 1..=k {
        let next = o.apply(&current)?;
        next.check_tail(&format!("family member {m}"))?;
        let next = next.normalized()?;
        family.push(next.clone());
        current = next;
    }
    Ok(family)
}

/// `C + (c - <C>) 1`.
pub fn qubit_operator(spec: &OrthogonalizerSpec, c: C64, trunc: Truncation) -> Result<ModeOperator> {
    spec.validate()?;
    Ok(spec.operator(trunc)?.plus_identity(c - spec.mean_value))
}

/// Normalized output of [`qubit_operator`] applied to `psi`.
pub fn generate_qubit(psi: &StateVector, spec: &OrthogonalizerSpec, c: C64) -> Result<StateVector> {
    let psi = psi.normalized()?;
    check_mean(spec, &psi)?;
    let out = qubit_operator(spec, c, psi.trunc())?.apply(&psi)?;
    if out.norm() < ZERO_NORM {
        return Err(Error::Eigenstate { norm: out.norm() });
    }
    check_leakage(spec, &psi, &out)?;
    out.normalized()
}

/// Target weights of `A|psi> + B|psi_perp>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitSpec {
    pub c: C64,
    pub a: C64,
    pub b: C64,
}

impl QubitSpec {
    /// Weights produced by `c` for the creation orthogonalizer on a coherent
    /// input, where `(C - <C>)|alpha>` is already normalized.
    pub fn from_c(c: C64) -> Self {
        let s = (1.0 + c.norm_sqr()).sqrt();
        Self {
            c,
            a: c / s,
            b: C64::new(1.0 / s, 0.0),
        }
    }

    /// `c = A / B`; the pair is normalized first.
    pub fn from_weights(a: C64, b: C64) -> Result<Self> {
        let s = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if b.norm() < ZERO_NORM || s < ZERO_NORM {
            return Err(Error::Domain("weight B must be nonzero".into()));
        }
        Ok(Self {
            c: a / b,
            a: a / s,
            b: b / s,
        })
    }

    /// Phase-insensitive agreement with a measured decomposition.
    pub fn matches(&self, d: &QubitDecomposition, tol: f64) -> bool {
        // compare A B^* which is invariant under a global phase
        let lhs = self.a * self.b.conj();
        let rhs = d.a * d.b.conj();
        (lhs - rhs).norm() < tol && (self.a.norm() - d.a.norm()).abs() < tol
    }
}

/// `out = A|psi> + B|psi_perp> + residual`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDecomposition {
    pub a: C64,
    pub b: C64,
    pub residual: f64,
}

/// Projects a normalized output onto the `{psi, psi_perp}` pair.
pub fn decompose_qubit(out: &StateVector, psi: &StateVector, psi_perp: &StateVector) -> Result<QubitDecomposition> {
    let out = out.normalized()?;
    let psi = psi.normalized()?;
    let perp = psi_perp.normalized()?;
    let a = inner_product(&psi, &out)?;
    let b = inner_product(&perp, &out)?;
    let rest = out.add_scaled(-a, &psi)?.add_scaled(-b, &perp)?;
    Ok(QubitDecomposition {
        a,
        b,
        residual: rest.norm(),
    })
}

/// `C1 - (<C1> / <C2>) C2`, which has zero mean on `psi`.
pub fn two_operator_orthogonalizer(c1: &ModeOperator, c2: &ModeOperator, psi: &StateVector) -> Result<ModeOperator> {
    let m2 = expectation(c2, psi)?;
    if m2.norm() <= 1e-12 {
        return Err(Error::DegenerateDenominator(m2.norm()));
    }
    let m1 = expectation(c1, psi)?;
    Ok(c1 - &c2.scaled(m1 / m2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, displacement_op, fidelity, fock_state, ONE, ZERO};

    fn t(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    #[test]
    fn creation_and_number_matrices() {
        let tr = t(8);
        let l = ladder_operators(tr);
        let o = build_orthogonalizer(&OrthogonalizerSpec::creation(ONE), tr).unwrap();
        assert_eq!(o, l.a_dag.plus_identity(-ONE));
        let o = build_orthogonalizer(&OrthogonalizerSpec::number(2.25), tr).unwrap();
        assert_eq!(o, l.n.plus_identity(C64::new(-2.25, 0.0)));
        let bad = OrthogonalizerSpec {
            kind: OperatorKind::Number,
            mean_value: C64::new(1.0, 1e-6),
        };
        assert!(build_orthogonalizer(&bad, tr).is_err());
    }

    #[test]
    fn coherent_goes_to_displaced_single_photon() {
        let tr = t(40);
        let psi = coherent_state(ONE, tr).unwrap();
        let out = orthogonalize(&psi, &OrthogonalizerSpec::creation(ONE)).unwrap();
        let target = displacement_op(ONE, tr).unwrap().apply(&fock_state(1, tr).unwrap()).unwrap();
        assert!(fidelity(&out, &target).unwrap() > 1.0 - 1e-8);
        assert!(inner_product(&psi, &out).unwrap().norm() < 1e-10);
    }

    #[test]
    fn eigenstate_is_rejected() {
        let tr = t(10);
        let err = orthogonalize(&fock_state(3, tr).unwrap(), &OrthogonalizerSpec::number(3.0)).unwrap_err();
        assert!(matches!(err, Error::Eigenstate { .. }));
    }

    #[test]
    fn wrong_mean_is_rejected() {
        let tr = t(30);
        let psi = coherent_state(ONE, tr).unwrap();
        let err = orthogonalize(&psi, &OrthogonalizerSpec::creation(C64::new(1.1, 0.0))).unwrap_err();
        assert!(matches!(err, Error::MeanMismatch { .. }));
    }

    #[test]
    fn custom_operator_by_measurement() {
        let tr = t(12);
        let l = ladder_operators(tr);
        let c = &(&l.a * &l.a) + &l.n.scaled(C64::new(0.0, 0.3));
        let psi = coherent_state(C64::new(0.4, -0.7), tr).unwrap();
        let spec = OrthogonalizerSpec::measured(OperatorKind::Custom(c), &psi).unwrap();
        let out = orthogonalize(&psi, &spec).unwrap();
        assert!(inner_product(&psi, &out).unwrap().norm() < 1e-12);
    }

    #[test]
    fn undisplaced_family_is_the_ladder() {
        let tr = t(10);
        let fam = orthogonal_family(&fock_state(0, tr).unwrap(), &OrthogonalizerSpec::creation(ZERO), 2).unwrap();
        assert!(fidelity(&fam[0], &fock_state(1, tr).unwrap()).unwrap() > 1.0 - 1e-15);
        assert!(fidelity(&fam[1], &fock_state(2, tr).unwrap()).unwrap() > 1.0 - 1e-15);
        assert!(orthogonal_family(&fock_state(0, tr).unwrap(), &OrthogonalizerSpec::number(0.0), 2).is_err());
    }

    #[test]
    fn family_overflow_is_reported() {
        let tr = t(6);
        let err = orthogonal_family(&fock_state(0, tr).unwrap(), &OrthogonalizerSpec::creation(ZERO), 6).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn qubit_reduces_to_orthogonalizer_at_zero() {
        let tr = t(9);
        let spec = OrthogonalizerSpec::creation(C64::new(0.2, 0.1));
        assert_eq!(qubit_operator(&spec, ZERO, tr).unwrap(), build_orthogonalizer(&spec, tr).unwrap());
    }

    #[test]
    fn qubit_weights() {
        let q = QubitSpec::from_c(C64::new(0.0, 1.0));
        assert!((q.a.norm_sqr() + q.b.norm_sqr() - 1.0).abs() < 1e-15);
        let back = QubitSpec::from_weights(q.a, q.b).unwrap();
        assert!((back.c - q.c).norm() < 1e-15);
        assert!(QubitSpec::from_weights(ONE, ZERO).is_err());
    }

    #[test]
    fn two_operator_reduces_to_single() {
        let tr = t(30);
        let l = ladder_operators(tr);
        let id = ModeOperator::identity(tr);
        let alpha = C64::new(0.9, 0.3);
        let psi = coherent_state(alpha, tr).unwrap();
        let o = two_operator_orthogonalizer(&l.a_dag, &id, &psi).unwrap();
        let reference = build_orthogonalizer(&OrthogonalizerSpec::creation(alpha.conj()), tr).unwrap();
        assert!(o.max_abs_diff_on(&reference, 30) < 1e-10);
        let o = two_operator_orthogonalizer(&l.n, &id, &psi).unwrap();
        let reference = build_orthogonalizer(&OrthogonalizerSpec::number(alpha.norm_sqr()), tr).unwrap();
        assert!(o.max_abs_diff_on(&reference, 30) < 1e-10);
        // <a> vanishes on a number state
        assert!(matches!(
            two_operator_orthogonalizer(&l.n, &l.a, &fock_state(2, tr).unwrap()),
            Err(Error::DegenerateDenominator(_))
        ));
    }
}
