//! Built-in self-test battery run by `orthosim verify`.

use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2, PI};

use orthosim_core::fock::{
    coherent_state, displace, fidelity, fock_state, inner_product, ladder_operators, read_density_matrix,
    write_density_matrix, DensityMatrix, StateVector, Truncation, C64,
};
use orthosim_core::homodyne::{maxlik_reconstruct, sample_quadratures, SamplingPlan};
use orthosim_core::phase_space::{apply_loss, wigner, wigner_at, LossChannel, PhaseGrid};
use orthosim_core::schemes::{
    generate_qubit, heralded_addition_model, number_scheme_operator, orthogonal_family, orthogonalize, HeraldModel,
    OrthogonalizerSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

type Outcome = orthosim_core::Result<(bool, String)>;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table_lines(&self) -> Vec<String> {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                format!("{mark}  {:width$}  {}", c.name, c.detail)
            })
            .collect();
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        lines.push(format!("{n_pass}/{} checks passed", self.checks.len()));
        lines
    }
}

fn t(n: usize) -> Truncation {
    Truncation::new(n).expect("dim >= 2")
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pure(psi: &StateVector) -> orthosim_core::Result<DensityMatrix> {
    DensityMatrix::from_pure(psi)
}

/// Random state on the lowest `support` levels of `dim`.
fn random_state(rng: &mut ChaCha20Rng, support: usize, dim: usize) -> orthosim_core::Result<StateVector> {
    let amps = (0..dim)
        .map(|k| if k < support { c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { c(0.0, 0.0) })
        .collect();
    StateVector::from_amps(amps, t(dim))
}

fn orthogonality(seed: u64) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let psi = random_state(&mut rng, 25, 40)?;
        for spec in [
            OrthogonalizerSpec::measured(orthosim_core::schemes::OperatorKind::Creation, &psi)?,
            OrthogonalizerSpec::measured(orthosim_core::schemes::OperatorKind::Number, &psi)?,
        ] {
            let out = orthogonalize(&psi, &spec)?;
            worst = worst.max(inner_product(&psi, &out)?.norm());
        }
    }
    Ok((worst < 1e-10, format!("max overlap {worst:.2e} over 40 cases")))
}

fn displaced_fock() -> Outcome {
    let alpha = c(1.0, 0.0);
    let psi = coherent_state(alpha, t(60))?;
    let out = orthogonalize(&psi, &OrthogonalizerSpec::creation(alpha.conj()))?;
    let f = fidelity(&out, &displace(&fock_state(1, t(60))?, alpha)?)?;
    Ok((f > 1.0 - 1e-8, format!("1 - F = {:.2e}", 1.0 - f)))
}

fn addition_model() -> Outcome {
    let (theta, beta) = (PI / 5.0, c(0.6, 0.2));
    let psi = coherent_state(c(0.4, -0.3), t(30))?;
    let model = HeraldModel::with_default_herald(beta, theta, 0.0, psi.trunc())?;
    let (out, _) = heralded_addition_model(&psi, &model)?;
    let ideal = ladder_operators(psi.trunc())
        .a_dag
        .scaled(c(theta.cos(), 0.0))
        .plus_identity(-beta * theta.sin())
        .apply(&psi)?;
    let f = fidelity(&out, &ideal.normalized()?)?;
    Ok((f > 1.0 - 1e-8, format!("1 - F = {:.2e}", 1.0 - f)))
}

fn number_operator() -> Outcome {
    let trunc = t(20);
    let model = HeraldModel::new(c(0.0, 0.0), 0.4, 0.3, t(8));
    let got = number_scheme_operator(&model, trunc)?;
    let l = ladder_operators(trunc);
    let want = &l.n.scaled(C64::from_polar(model.t(), model.phi)) - &(&l.a * &l.a_dag).scaled(c(model.r(), 0.0));
    let err = got.max_abs_diff_on(&want, trunc.dim() - 1);
    Ok((err < 1e-10, format!("max element error {err:.2e}")))
}

fn wigner_origin() -> Outcome {
    let w0 = wigner_at(&pure(&fock_state(0, t(4))?)?, 0.0, 0.0);
    let w1 = wigner_at(&pure(&fock_state(1, t(4))?)?, 0.0, 0.0);
    let err = (w0 - FRAC_1_PI).abs().max((w1 + FRAC_1_PI).abs());
    Ok((err < 1e-9, format!("error {err:.2e}")))
}

fn wigner_normalization() -> Outcome {
    let rho = pure(&coherent_state(c(1.0, 0.5), t(30))?)?;
    let err = (wigner(&rho, &PhaseGrid::default()).integral() - 1.0).abs();
    Ok((err < 1e-4, format!("|integral - 1| = {err:.2e}")))
}

fn displacement_covariance() -> Outcome {
    let grid = PhaseGrid::square(4.0, 31)?;
    let base = fock_state(1, t(30))?;
    let alpha = c(0.7, -0.4);
    let moved = wigner(&pure(&displace(&base, alpha)?)?, &grid);
    let shifted = wigner(&pure(&base)?, &grid.shifted(-2f64.sqrt() * alpha.re, -2f64.sqrt() * alpha.im));
    let err = moved.max_abs_diff(&shifted);
    Ok((err < 1e-9, format!("max difference {err:.2e}")))
}

fn qubit_wigner() -> Outcome {
    let alpha = c(1.0, 0.0);
    let psi = coherent_state(alpha, t(40))?;
    let q = generate_qubit(&psi, &OrthogonalizerSpec::creation(alpha.conj()), c(1.0, 0.0))?;
    let h = c(FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![c(0.0, 0.0); 40];
    amps[0] = h;
    amps[1] = h;
    let target = displace(&StateVector::new(amps, t(40))?, alpha)?;
    let grid = PhaseGrid::square(5.0, 41)?;
    let err = wigner(&pure(&q)?, &grid).max_abs_diff(&wigner(&pure(&target)?, &grid));
    Ok((err < 1e-9, format!("max difference {err:.2e}")))
}

fn loss() -> Outcome {
    let rho = pure(&fock_state(1, t(10))?)?;
    let lossy = apply_loss(&rho, LossChannel::new(0.6)?)?;
    let tr_err = (lossy.trace().re - 1.0).abs();
    let floor = lossy.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    let grid = PhaseGrid::square(3.0, 31)?;
    let (m1, m2) = (wigner(&rho, &grid).min(), wigner(&lossy, &grid).min());
    let ok = tr_err < 1e-12 && floor >= -1e-10 && m2 > m1;
    Ok((ok, format!("trace error {tr_err:.1e}, W min {m1:.4} -> {m2:.4}")))
}

fn family() -> Outcome {
    let alpha = c(1.0, 0.0);
    let psi = coherent_state(alpha, t(60))?;
    let mut members = vec![psi.clone()];
    members.extend(orthogonal_family(&psi, &OrthogonalizerSpec::creation(alpha.conj()), 4)?);
    let mut worst = 0.0f64;
    for i in 0..members.len() {
        for j in 0..i {
            worst = worst.max(inner_product(&members[i], &members[j])?.norm());
        }
    }
    Ok((worst < 1e-8, format!("max pairwise overlap {worst:.2e}")))
}

fn tomography(seed: u64) -> Outcome {
    let psi = fock_state(0, t(6))?;
    let plan = SamplingPlan::equally_spaced(10, 2000, seed, 1.0)?;
    let samples = sample_quadratures(&pure(&psi)?, &plan)?;
    let again = sample_quadratures(&pure(&psi)?, &plan)?;
    let res = maxlik_reconstruct(&samples, 6, 300, 1e-10)?;
    let f = res.rho_hat.overlap_with_pure(&psi)?;
    let monotone = res.log_likelihood_trace.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    Ok((
        samples == again && monotone && f >= 0.99,
        format!("vacuum fidelity {f:.5}, {} iterations", res.iterations_used),
    ))
}

fn json_round_trip() -> Outcome {
    let rho = apply_loss(&pure(&coherent_state(c(0.3, 0.8), t(12))?)?, LossChannel::new(0.7)?)?;
    let mut buf = Vec::new();
    write_density_matrix(&mut buf, &rho)?;
    let back = read_density_matrix(buf.as_slice())?;
    let exact = (0..12).all(|i| (0..12).all(|j| rho.get(i, j) == back.get(i, j)));
    Ok((exact, "bit-exact".into()))
}

pub fn battery(seed: u64) -> Report {
    let checks: Vec<(&'static str, Box<dyn Fn() -> Outcome>)> = vec![
        ("orthogonality", Box::new(move || orthogonality(seed))),
        ("displaced-fock", Box::new(displaced_fock)),
        ("addition-model", Box::new(addition_model)),
        ("number-operator", Box::new(number_operator)),
        ("wigner-origin", Box::new(wigner_origin)),
        ("wigner-normalization", Box::new(wigner_normalization)),
        ("displacement-covariance", Box::new(displacement_covariance)),
        ("qubit-wigner", Box::new(qubit_wigner)),
        ("loss", Box::new(loss)),
        ("family", Box::new(family)),
        ("tomography", Box::new(move || tomography(seed))),
        ("json-round-trip", Box::new(json_round_trip)),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect();
    Report { checks }
}
