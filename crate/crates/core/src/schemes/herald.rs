//! Beam-splitter realizations of the orthogonalizer.
//!
//! Both models build the full herald-pair ⊗ signal state, mix the two herald
//! modes on [`beam_splitter_op`] and condition on the herald outcome `|1>|0>`.
//!
//! Addition scheme: the first herald mode carries the photon-addition herald,
//! the second an ancilla `|beta e^{i phi}>`:
//!
//! ```text
//! (|1> a^dag + |0> 1) |beta e^{i phi}> |psi>   ->   e^{-|beta|^2/2} (t a^dag - r beta e^{i phi}) |psi>
//! ```
//!
//! Number scheme: two inverted add/subtract sequences herald on different modes:
//!
//! ```text
//! e^{i phi} |1,0> a^dag a |psi> + |0,1> a a^dag |psi>   ->   (t e^{i phi} a^dag a - r a a^dag) |psi>
//! ```
//!
//! At `phi = 0` the latter equals `(t - r)(n - r/(t - r))`.

use crate::error::{Error, Result};
use crate::fock::{
    beam_splitter_op, coherent_dim_for, coherent_state, fock_state, ladder_operators, HeraldedState, ModeOperator,
    StateVector, Truncation, TwoModeState, C64,
};

/// Herald outcome both schemes condition on.
pub const HERALD_OUTCOME: (usize, usize) = (1, 0);

/// Parameters of a conditional beam-splitter scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeraldModel {
    /// Ancilla coherent amplitude (addition scheme only).
    pub beta: C64,
    /// Beam-splitter angle: `t = cos theta`, `r = sin theta`.
    pub theta: f64,
    /// Relative phase between the two branches.
    pub phi: f64,
    /// Truncation of each herald mode.
    pub herald_trunc: Truncation,
}

impl HeraldModel {
    pub fn new(beta: C64, theta: f64, phi: f64, herald_trunc: Truncation) -> Self {
        Self {
            beta,
            theta,
            phi,
            herald_trunc,
        }
    }

    /// Herald truncation `min(N, 12)`, enlarged when the ancilla needs more
    /// room under the tail tolerance.
    pub fn default_herald_trunc(signal: Truncation, beta: C64) -> Result<Truncation> {
        let base = signal.dim().min(12);
        let dim = base.max(coherent_dim_for(beta, signal.tail_tol()));
        signal.resized(dim)
    }

    pub fn with_default_herald(beta: C64, theta: f64, phi: f64, signal: Truncation) -> Result<Self> {
        Ok(Self::new(beta, theta, phi, Self::default_herald_trunc(signal, beta)?))
    }

    /// Addition scheme tuned into the orthogonalizer for `|alpha>`:
    /// `r beta e^{i phi} / t = alpha^*`, solving for `beta` at fixed `theta`.
    pub fn addition_orthogonalizer(alpha: C64, theta: f64, signal: Truncation) -> Result<Self> {
        let (t, r) = (theta.cos(), theta.sin());
        if r.abs() < 1e-12 {
            return Err(Error::SingularConfiguration("r = 0 cannot supply the identity branch".into()));
        }
        Self::with_default_herald(alpha.conj() * (t / r), theta, 0.0, signal)
    }

    /// Number scheme tuned so that `r / (t - r) = n_bar`, i.e.
    /// `tan theta = n_bar / (1 + n_bar)`.
    pub fn number_orthogonalizer(n_bar: f64, signal: Truncation) -> Result<Self> {
        if n_bar < 0.0 {
            return Err(Error::Domain(format!("mean photon number must be >= 0, got {n_bar}")));
        }
        let theta = (n_bar / (1.0 + n_bar)).atan();
        Ok(Self::new(C64::new(0.0, 0.0), theta, 0.0, signal.resized(signal.dim().min(12))?))
    }

    pub fn t(&self) -> f64 {
        self.theta.cos()
    }

    pub fn r(&self) -> f64 {
        self.theta.sin()
    }

    /// `r / (t - r)`, the identity admixture of the number scheme at `phi = 0`.
    pub fn number_offset(&self) -> Result<f64> {
        let d = self.t() - self.r();
        if d.abs() < 1e-12 {
            return Err(Error::SingularConfiguration(format!(
                "t = r at theta = {}: r/(t-r) diverges",
                self.theta
            )));
        }
        Ok(self.r() / d)
    }

    fn herald_pair(&self) -> (Truncation, Truncation) {
        (self.herald_trunc, self.herald_trunc)
    }
}

fn ancilla(model: &HeraldModel) -> Result<StateVector> {
    coherent_state(model.beta * C64::from_polar(1.0, model.phi), model.herald_trunc)
}

/// Joint state `|1>|beta'> added + |0>|beta'> plain` before the beam splitter.
fn addition_joint(model: &HeraldModel, plain: &StateVector, added: &StateVector) -> Result<HeraldedState> {
    let anc = ancilla(model)?;
    let h = model.herald_trunc;
    let one = TwoModeState::product(&fock_state(1, h)?, &anc);
    let zero = TwoModeState::product(&fock_state(0, h)?, &anc);
    Ok(&HeraldedState::product(&one, added) + &HeraldedState::product(&zero, plain))
}

fn addition_contract(model: &HeraldModel, plain: &StateVector, added: &StateVector) -> Result<HeraldedState> {
    let joint = addition_joint(model, plain, added)?;
    joint.apply_herald(&beam_splitter_op(model.theta, model.herald_pair()))
}

/// Photon addition with a displaced herald. Returns the normalized
/// conditional state and the raw projection probability
/// `e^{-|beta|^2} |(t a^dag - r beta e^{i phi})|psi>|^2`.
pub fn heralded_addition_model(psi: &StateVector, model: &HeraldModel) -> Result<(StateVector, f64)> {
    let psi = psi.normalized()?;
    psi.check_tail("addition input")?;
    let added = ladder_operators(psi.trunc()).a_dag.apply(&psi)?;
    added.check_tail("photon-added branch")?;
    let mixed = addition_contract(model, &psi, &added)?;
    mixed.herald_project(HERALD_OUTCOME)
}

/// Conditional operator of the addition scheme, column by column, including
/// the `e^{-|beta|^2/2}` amplitude of the herald event.
pub fn heralded_addition_operator(model: &HeraldModel, trunc: Truncation) -> Result<ModeOperator> {
    let a_dag = ladder_operators(trunc).a_dag;
    conditional_operator(trunc, |basis| {
        let added = a_dag.apply(basis)?;
        addition_contract(model, basis, &added)?.contract(HERALD_OUTCOME)
    })
}

fn number_contract(model: &HeraldModel, psi: &StateVector) -> Result<HeraldedState> {
    let l = ladder_operators(psi.trunc());
    let first = l.n.apply(psi)?;
    let raised = l.a_dag.apply(psi)?;
    let second = l.a.apply(&raised)?;
    let pair = model.herald_pair();
    let joint = &HeraldedState::product(
        &TwoModeState::basis(1, 0, pair)?.scaled(C64::from_polar(1.0, model.phi)),
        &first,
    ) + &HeraldedState::product(&TwoModeState::basis(0, 1, pair)?, &second);
    joint.apply_herald(&beam_splitter_op(model.theta, pair))
}

fn check_number_model(model: &HeraldModel) -> Result<()> {
    model.number_offset()?;
    if model.herald_trunc.dim() < 2 {
        return Err(Error::Precondition("number scheme needs herald dim >= 2".into()));
    }
    Ok(())
}

/// Number-operator orthogonalizer from two interfering add/subtract
/// sequences. Returns the normalized conditional state and the squared norm
/// of the projection.
pub fn number_scheme_model(psi: &StateVector, model: &HeraldModel) -> Result<(StateVector, f64)> {
    check_number_model(model)?;
    let psi = psi.normalized()?;
    // a a^dag must not push weight off the top level
    let raised = ladder_operators(psi.trunc()).a_dag.apply(&psi)?;
    raised.check_tail("number scheme intermediate")?;
    number_contract(model, &psi)?.herald_project(HERALD_OUTCOME)
}

/// Conditional operator `t e^{i phi} a^dag a - r a a^dag` as produced by the
/// physical pipeline.
pub fn number_scheme_operator(model: &HeraldModel, trunc: Truncation) -> Result<ModeOperator> {
    check_number_model(model)?;
    conditional_operator(trunc, |basis| number_contract(model, basis)?.contract(HERALD_OUTCOME))
}

fn conditional_operator<F>(trunc: Truncation, column: F) -> Result<ModeOperator>
where
    F: Fn(&StateVector) -> Result<StateVector>,
{
    let n = trunc.dim();
    let mut m = nalgebra::DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for k in 0..n {
        let col = column(&fock_state(k, trunc)?)?;
        m.set_column(k, col.amps());
    }
    ModeOperator::from_matrix(m, trunc)
}
