use std::path::Path;

use orthosim_core::fock::{
    coherent_state, displace, expectation, fidelity, fock_state, inner_product, ladder_operators, write_density_matrix,
    write_state_vector, DensityMatrix, StateVector, Truncation, C64,
};
use orthosim_core::homodyne::{maxlik_reconstruct, sample_quadratures, write_samples_csv};
use orthosim_core::phase_space::{apply_loss, linspace, marginal, wigner, LossChannel};
use orthosim_core::schemes::{
    generate_qubit, number_scheme_model, orthogonal_family, orthogonalize, HeraldModel, OperatorKind,
    OrthogonalizerSpec,
};
use serde::Serialize;
use serde_json::json;

use crate::artifacts::{Artifacts, Kind, Manifest};
use crate::config::{Experiment, ExperimentConfig, OperatorChoice, Preparation, StateKind};
use crate::error::{CliError, Context};
use crate::verify;

/// Window of the emitted marginal CSVs.
const MARGINAL_RANGE: (f64, f64, usize) = (-8.0, 8.0, 1601);

/// What `run` produced.
pub struct RunOutcome {
    pub manifest: Manifest,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    /// False only when a verify battery had failures.
    pub passed: bool,
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let mut art = Artifacts::create(out_dir)?;
    let (summary, passed) = match cfg.experiment {
        Experiment::Orthogonalize => (run_orthogonalize(cfg, &mut art)?, true),
        Experiment::QubitWigner => (run_qubit_wigner(cfg, &mut art)?, true),
        Experiment::NumberScheme => (run_number_scheme(cfg, &mut art)?, true),
        Experiment::Tomography => (run_tomography(cfg, &mut art)?, true),
        Experiment::Verify => {
            let report = verify::battery(cfg.sampling.seed);
            art.emit_json("verify.json", Kind::Report, &report)?;
            (report.table_lines(), report.all_passed())
        }
    };
    Ok(RunOutcome {
        manifest: art.finish(cfg)?,
        summary,
        passed,
    })
}

pub fn input_state(cfg: &ExperimentConfig) -> Result<StateVector, CliError> {
    let trunc = Truncation::new(cfg.trunc).context("trunc")?;
    let s = &cfg.input_state;
    match s.kind {
        StateKind::Coherent => coherent_state(cfg.alpha(), trunc).context("preparing the coherent input"),
        StateKind::Fock => fock_state(s.n, trunc).context("preparing the Fock input"),
        StateKind::CustomAmps => {
            let amps = s.amps.iter().map(|a| C64::new(a[0], a[1])).collect();
            StateVector::from_amps(amps, trunc).context("preparing the custom input")
        }
    }
}

fn spec_for(cfg: &ExperimentConfig, psi: &StateVector) -> Result<OrthogonalizerSpec, CliError> {
    let kind = match cfg.scheme.operator {
        OperatorChoice::Creation => OperatorKind::Creation,
        OperatorChoice::Number => OperatorKind::Number,
    };
    OrthogonalizerSpec::measured(kind, psi).context("measuring the operator mean")
}

fn pure(psi: &StateVector) -> Result<DensityMatrix, CliError> {
    DensityMatrix::from_pure(psi).context("forming a density matrix")
}

fn emit_state(art: &mut Artifacts, name: &str, psi: &StateVector) -> Result<(), CliError> {
    art.emit(name, Kind::State, |buf| write_state_vector(buf, psi))
}

fn emit_density(art: &mut Artifacts, name: &str, rho: &DensityMatrix) -> Result<(), CliError> {
    art.emit(name, Kind::DensityMatrix, |buf| write_density_matrix(buf, rho))
}

fn emit_marginals(art: &mut Artifacts, cfg: &ExperimentConfig, prefix: &str, rho: &DensityMatrix) -> Result<(), CliError> {
    let (lo, hi, n) = MARGINAL_RANGE;
    let xs = linspace(lo, hi, n);
    for &phase in &cfg.marginal_phases {
        let d = marginal(rho, phase, &xs);
        art.emit(&d.file_name(prefix), Kind::Marginal, |buf| d.write_csv(buf))?;
    }
    Ok(())
}

fn emit_wigner(art: &mut Artifacts, cfg: &ExperimentConfig, name: &str, rho: &DensityMatrix) -> Result<(f64, f64), CliError> {
    let map = wigner(rho, &cfg.grid.grid());
    art.emit(name, Kind::WignerGrid, |buf| map.write_text(buf))?;
    Ok((map.min(), map.integral()))
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn run_orthogonalize(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<String>, CliError> {
    let psi = input_state(cfg)?;
    let spec = spec_for(cfg, &psi)?;
    let out = orthogonalize(&psi, &spec).context("orthogonalizing the input")?;
    let overlap = inner_product(&psi, &out).context("overlap")?.norm();

    emit_state(art, "input_state.json", &psi)?;
    emit_state(art, "output_state.json", &out)?;
    let (rho_in, rho_out) = (pure(&psi)?, pure(&out)?);
    emit_marginals(art, cfg, "input", &rho_in)?;
    emit_marginals(art, cfg, "output", &rho_out)?;
    emit_wigner(art, cfg, "input_wigner.txt", &rho_in)?;
    let (w_min, _) = emit_wigner(art, cfg, "output_wigner.txt", &rho_out)?;

    let mut report = json!({
        "mean_value": pair(spec.mean_value),
        "overlap": overlap,
        "output_wigner_min": w_min,
    });
    let mut summary = vec![format!("|<psi|psi_perp>| = {overlap:.3e}")];

    if cfg.input_state.kind == StateKind::Coherent && cfg.scheme.operator == OperatorChoice::Creation {
        let target = displace(&fock_state(1, psi.trunc()).context("|1>")?, cfg.alpha()).context("D(alpha)|1>")?;
        let f = fidelity(&out, &target).context("fidelity")?;
        report["displaced_fock_fidelity"] = json!(f);
        summary.push(format!("fidelity with D(alpha)|1> = {f:.12}"));
    }

    if cfg.scheme.family_size > 0 {
        let family = orthogonal_family(&psi, &spec, cfg.scheme.family_size).context("orthogonal family")?;
        let mut members = vec![psi.clone()];
        members.extend(family);
        let mut worst = 0.0f64;
        for i in 0..members.len() {
            for j in 0..i {
                worst = worst.max(inner_product(&members[i], &members[j]).context("family overlap")?.norm());
            }
        }
        for (m, s) in members.iter().enumerate().skip(1) {
            emit_state(art, &format!("family_{m}.json"), s)?;
        }
        report["family_max_overlap"] = json!(worst);
        summary.push(format!("family of {} max pairwise overlap = {worst:.3e}", members.len()));
    }

    art.emit_json("report.json", Kind::Report, &report)?;
    Ok(summary)
}

#[derive(Serialize)]
struct QubitEntry {
    index: usize,
    c: [f64; 2],
    wigner_file: String,
    wigner_min: f64,
    wigner_integral: f64,
}

fn run_qubit_wigner(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<String>, CliError> {
    let psi = input_state(cfg)?;
    let spec = spec_for(cfg, &psi)?;
    let channel = LossChannel::new(cfg.eta).context("eta")?;
    let mut entries = Vec::new();
    let mut summary = Vec::new();
    for (index, c) in cfg.c_values().into_iter().enumerate() {
        let q = generate_qubit(&psi, &spec, c).context(format!("generating qubit c = {c}"))?;
        emit_state(art, &format!("qubit_{index}_state.json"), &q)?;
        let rho = apply_loss(&pure(&q)?, channel).context("applying loss")?;
        let wigner_file = format!("qubit_{index}_wigner.txt");
        let (wigner_min, wigner_integral) = emit_wigner(art, cfg, &wigner_file, &rho)?;
        summary.push(format!("c = {c}: W min {wigner_min:.6}, integral {wigner_integral:.8}"));
        entries.push(QubitEntry {
            index,
            c: pair(c),
            wigner_file,
            wigner_min,
            wigner_integral,
        });
    }
    art.emit_json("report.json", Kind::Report, &json!({ "eta": cfg.eta, "qubits": entries }))?;
    Ok(summary)
}

fn run_number_scheme(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<String>, CliError> {
    let psi = input_state(cfg)?;
    let trunc = psi.trunc();
    let l = ladder_operators(trunc);
    let n_bar = expectation(&l.n, &psi).context("mean photon number")?.re;
    let herald = trunc
        .resized(cfg.scheme.herald_trunc.unwrap_or(trunc.dim().min(12)))
        .context("herald truncation")?;
    let theta = match cfg.scheme.theta {
        Some(t) => t,
        None => HeraldModel::number_orthogonalizer(n_bar, trunc).context("tuning the number scheme")?.theta,
    };
    let model = HeraldModel::new(C64::new(0.0, 0.0), theta, cfg.scheme.phi, herald);
    let offset = model.number_offset().context("number scheme")?;
    let (out, success) = number_scheme_model(&psi, &model).context("running the number scheme")?;
    let overlap = inner_product(&psi, &out).context("overlap")?.norm();

    emit_state(art, "output_state.json", &out)?;
    emit_marginals(art, cfg, "output", &pure(&out)?)?;
    art.emit_json(
        "report.json",
        Kind::Report,
        &json!({
            "theta": theta,
            "t": model.t(),
            "r": model.r(),
            "phi": model.phi,
            "n_bar": n_bar,
            "offset": offset,
            "success_probability": success,
            "overlap": overlap,
        }),
    )?;
    Ok(vec![
        format!("theta = {theta:.12}, r/(t-r) = {offset:.12}, <n> = {n_bar:.12}"),
        format!("|<psi|out>| = {overlap:.3e}, herald probability {success:.6e}"),
    ])
}

fn run_tomography(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Vec<String>, CliError> {
    let psi = input_state(cfg)?;
    let target = match cfg.tomography.prepare {
        Preparation::Input => psi,
        Preparation::Orthogonal => orthogonalize(&psi, &spec_for(cfg, &psi)?).context("orthogonalizing the input")?,
        Preparation::Qubit => {
            let c = cfg.c_values()[0];
            generate_qubit(&psi, &spec_for(cfg, &psi)?, c).context("generating the qubit")?
        }
    };
    let rho_true = pure(&target)?;
    let lossy = apply_loss(&rho_true, LossChannel::new(cfg.eta).context("eta")?).context("applying loss")?;
    let plan = cfg.sampling.plan(cfg.eta);
    let samples = sample_quadratures(&rho_true, &plan).context("sampling quadratures")?;
    let t = &cfg.tomography;
    let res = maxlik_reconstruct(&samples, t.dim, t.max_iter, t.tol).context("reconstructing")?;

    let dim = t.dim.max(rho_true.dim());
    let hat = res.rho_hat.resized(dim).context("padding the estimate")?;
    let fid_true = hat.fidelity(&rho_true.resized(dim).context("padding")?).context("fidelity")?;
    let fid_lossy = hat.fidelity(&lossy.resized(dim).context("padding")?).context("fidelity")?;
    let trace = &res.log_likelihood_trace;
    let worst_step = trace.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);

    art.emit("samples.csv", Kind::Samples, |buf| write_samples_csv(buf, &samples))?;
    emit_density(art, "rho_true.json", &rho_true)?;
    emit_density(art, "rho_lossy.json", &lossy)?;
    emit_density(art, "rho_hat.json", &res.rho_hat)?;
    art.emit("likelihood.csv", Kind::LikelihoodTrace, |buf| res.write_trace_csv(buf))?;
    art.emit_json(
        "report.json",
        Kind::Report,
        &json!({
            "eta": cfg.eta,
            "samples": samples.len(),
            "iterations_used": res.iterations_used,
            "final_log_likelihood": trace.last(),
            "min_likelihood_step": if trace.len() > 1 { Some(worst_step) } else { None },
            "fidelity_true": fid_true,
            "fidelity_lossy": fid_lossy,
        }),
    )?;
    Ok(vec![
        format!("{} samples, {} iterations", samples.len(), res.iterations_used),
        format!("fidelity with the true state {fid_true:.6}, with the lossy state {fid_lossy:.6}"),
    ])
}
