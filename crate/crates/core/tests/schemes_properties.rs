use orthosim_core::fock::*;
use orthosim_core::schemes::*;
use orthosim_core::Error;
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn t(n: usize) -> Truncation {
    Truncation::new(n).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random state with weight only on the lowest `support` levels.
fn low_state(n: usize, support: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), support).prop_filter_map("zero vector", move |v| {
        let mut amps = vec![c(0.0, 0.0); n];
        for (k, (a, b)) in v.into_iter().enumerate() {
            amps[k] = c(a, b);
        }
        StateVector::from_amps(amps, t(n)).ok()
    })
}

fn random_operator(n: usize) -> impl Strategy<Value = ModeOperator> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let m = nalgebra::DMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| c(a, b)));
        ModeOperator::from_matrix(m, t(n)).unwrap()
    })
}

/// `|<psi|O psi>| / ||O psi||` with `psi` normalized.
fn normalized_overlap(o: &ModeOperator, psi: &StateVector) -> f64 {
    let psi = psi.normalized().unwrap();
    let out = o.apply(&psi).unwrap();
    inner_product(&psi, &out).unwrap().norm() / out.norm()
}

fn displaced_fock(alpha: C64, m: usize, n: usize) -> StateVector {
    displace(&fock_state(m, t(n)).unwrap(), alpha).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn creation_battery(psi in low_state(40, 25)) {
        let spec = OrthogonalizerSpec::measured(OperatorKind::Creation, &psi).unwrap();
        let out = orthogonalize(&psi, &spec).unwrap();
        prop_assert!(inner_product(&psi, &out).unwrap().norm() < 1e-10);
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn number_battery(psi in low_state(40, 25)) {
        let spec = OrthogonalizerSpec::measured(OperatorKind::Number, &psi).unwrap();
        let out = orthogonalize(&psi, &spec).unwrap();
        prop_assert!(inner_product(&psi, &out).unwrap().norm() < 1e-10);
    }

    #[test]
    fn custom_battery(psi in low_state(12, 10), op in random_operator(12)) {
        let spec = OrthogonalizerSpec::measured(OperatorKind::Custom(op), &psi).unwrap();
        let out = orthogonalize(&psi, &spec).unwrap();
        prop_assert!(inner_product(&psi, &out).unwrap().norm() < 1e-10);
    }

    #[test]
    fn two_operator_battery(psi in low_state(12, 10), c1 in random_operator(12), c2 in random_operator(12)) {
        prop_assume!(expectation(&c2, &psi).unwrap().norm() > 1e-3);
        let o = two_operator_orthogonalizer(&c1, &c2, &psi).unwrap();
        prop_assert!(normalized_overlap(&o, &psi) < 1e-10);
    }

    #[test]
    fn qubit_decomposes_on_coherent(ar in -1.5..1.5f64, ai in -1.5..1.5f64, cr in -2.0..2.0f64, ci in -2.0..2.0f64) {
        let alpha = c(ar, ai);
        let cc = c(cr, ci);
        let psi = coherent_state(alpha, t(50)).unwrap();
        let spec = OrthogonalizerSpec::creation(alpha.conj());
        let perp = orthogonalize(&psi, &spec).unwrap();
        let out = generate_qubit(&psi, &spec, cc).unwrap();
        let d = decompose_qubit(&out, &psi, &perp).unwrap();
        prop_assert!((d.a.norm_sqr() + d.b.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!(d.residual < 1e-10);
        prop_assert!(QubitSpec::from_c(cc).matches(&d, 1e-10));
    }
}

#[test]
fn eigenstates_are_reported() {
    let tr = t(40);
    let fock3 = fock_state(3, tr).unwrap();
    assert!(matches!(orthogonalize(&fock3, &OrthogonalizerSpec::number(3.0)), Err(Error::Eigenstate { .. })));
    let a = ladder_operators(tr).a;
    let vac = fock_state(0, tr).unwrap();
    let spec = OrthogonalizerSpec::measured(OperatorKind::Custom(a), &vac).unwrap();
    assert!(matches!(orthogonalize(&vac, &spec), Err(Error::Eigenstate { .. })));
    let id = ModeOperator::identity(tr);
    let coh = coherent_state(c(0.5, 0.0), tr).unwrap();
    let spec = OrthogonalizerSpec::measured(OperatorKind::Custom(id), &coh).unwrap();
    assert!(matches!(orthogonalize(&coh, &spec), Err(Error::Eigenstate { .. })));
}

#[test]
fn two_operator_special_cases() {
    let tr = t(30);
    let l = ladder_operators(tr);
    let id = ModeOperator::identity(tr);
    let psi = coherent_state(c(0.8, 0.3), tr).unwrap();
    let o = two_operator_orthogonalizer(&l.a_dag, &id, &psi).unwrap();
    let direct = build_orthogonalizer(&OrthogonalizerSpec::measured(OperatorKind::Creation, &psi).unwrap(), tr).unwrap();
    assert!(o.max_abs_diff_on(&direct, 30) < 1e-14);
    let o = two_operator_orthogonalizer(&l.n, &id, &psi).unwrap();
    let direct = build_orthogonalizer(&OrthogonalizerSpec::measured(OperatorKind::Number, &psi).unwrap(), tr).unwrap();
    assert!(o.max_abs_diff_on(&direct, 30) < 1e-14);
    let vac = fock_state(0, tr).unwrap();
    assert!(matches!(
        two_operator_orthogonalizer(&l.a_dag, &l.a, &vac),
        Err(Error::DegenerateDenominator(_))
    ));
}

#[test]
fn displaced_fock_identity() {
    for a in [0.5, 1.0, 2.0] {
        let alpha = c(a, 0.0);
        let psi = coherent_state(alpha, t(60)).unwrap();
        let out = orthogonalize(&psi, &OrthogonalizerSpec::creation(alpha.conj())).unwrap();
        assert!(fidelity(&out, &displaced_fock(alpha, 1, 60)).unwrap() > 1.0 - 1e-8);
    }
}

#[test]
fn families_are_orthogonal() {
    for (a, k, n) in [(1.0, 3, 40), (1.0, 4, 60), (2.0, 2, 60), (2.0, 4, 60), (0.0, 2, 10)] {
        let alpha = c(a, 0.0);
        let psi = coherent_state(alpha, t(n)).unwrap();
        let fam = orthogonal_family(&psi, &OrthogonalizerSpec::creation(alpha.conj()), k).unwrap();
        let mut all = vec![psi.clone()];
        all.extend(fam.iter().cloned());
        for i in 0..all.len() {
            for j in 0..i {
                assert!(inner_product(&all[i], &all[j]).unwrap().norm() < 1e-8, "alpha {a} ({i},{j})");
            }
        }
        for (m, s) in fam.iter().enumerate() {
            assert!(fidelity(s, &displaced_fock(alpha, m + 1, n)).unwrap() > 1.0 - 1e-8);
        }
    }
    let vac = fock_state(0, t(10)).unwrap();
    let fam = orthogonal_family(&vac, &OrthogonalizerSpec::creation(c(0.0, 0.0)), 2).unwrap();
    assert!(fidelity(&fam[0], &fock_state(1, t(10)).unwrap()).unwrap() > 1.0 - 1e-15);
    assert!(fidelity(&fam[1], &fock_state(2, t(10)).unwrap()).unwrap() > 1.0 - 1e-15);
    assert!(orthogonal_family(&vac, &OrthogonalizerSpec::number(0.0), 2).is_err());
}

#[test]
fn balanced_qubits_on_coherent() {
    let alpha = c(1.0, 0.0);
    let psi = coherent_state(alpha, t(40)).unwrap();
    let spec = OrthogonalizerSpec::creation(alpha.conj());
    let s = FRAC_1_SQRT_2;
    let target = |a0: C64, a1: C64| {
        let v = StateVector::from_amps(
            (0..40).map(|k| if k == 0 { a0 } else if k == 1 { a1 } else { c(0.0, 0.0) }).collect(),
            t(40),
        )
        .unwrap();
        displace(&v, alpha).unwrap()
    };
    let cases = [
        (c(1.0, 0.0), target(c(s, 0.0), c(s, 0.0))),
        (c(-1.0, 0.0), target(c(s, 0.0), c(-s, 0.0))),
        (c(0.0, 1.0), target(c(0.0, s), c(s, 0.0))),
        (c(0.0, -1.0), target(c(s, 0.0), c(0.0, s))),
    ];
    for (cc, want) in cases {
        let out = generate_qubit(&psi, &spec, cc).unwrap();
        assert!(fidelity(&out, &want).unwrap() > 1.0 - 1e-8, "c = {cc}");
    }
    let zero = qubit_operator(&spec, c(0.0, 0.0), t(40)).unwrap();
    assert_eq!(zero, build_orthogonalizer(&spec, t(40)).unwrap());
}

fn addition_grid() -> (Vec<f64>, Vec<C64>, Vec<StateVector>) {
    let n = 30;
    let s = FRAC_1_SQRT_2;
    let mut superpos = vec![c(0.0, 0.0); n];
    superpos[0] = c(s, 0.0);
    superpos[2] = c(s, 0.0);
    (
        vec![PI / 16.0, PI / 8.0, PI / 4.0],
        vec![c(0.5, 0.0), c(1.0, 0.0), C64::from_polar(2.0, PI / 3.0)],
        vec![
            coherent_state(c(0.5, 0.0), t(n)).unwrap(),
            coherent_state(c(1.0, 0.0), t(n)).unwrap(),
            fock_state(1, t(n)).unwrap(),
            StateVector::from_amps(superpos, t(n)).unwrap(),
        ],
    )
}

#[test]
fn addition_model_matches_ideal() {
    let (thetas, betas, states) = addition_grid();
    for &theta in &thetas {
        for &beta in &betas {
            let mut ratios = Vec::new();
            for psi in &states {
                let model = HeraldModel::with_default_herald(beta, theta, 0.0, psi.trunc()).unwrap();
                let (out, p) = heralded_addition_model(psi, &model).unwrap();
                let l = ladder_operators(psi.trunc());
                let ideal = l
                    .a_dag
                    .scaled(c(theta.cos(), 0.0))
                    .plus_identity(-beta * theta.sin())
                    .apply(psi)
                    .unwrap();
                assert!(fidelity(&out, &ideal).unwrap() > 1.0 - 1e-8, "theta {theta} beta {beta}");
                ratios.push(p / ideal.norm_sqr());
            }
            let r0 = ratios[0];
            for r in &ratios {
                assert!(((r - r0) / r0).abs() < 1e-6, "theta {theta} beta {beta}: {ratios:?}");
            }
            assert!(((r0 - (-beta.norm_sqr()).exp()) / r0).abs() < 1e-6);
        }
    }
}

#[test]
fn addition_model_edge_cases() {
    let psi = coherent_state(c(0.7, 0.2), t(30)).unwrap();
    let added = ladder_operators(t(30)).a_dag.apply(&psi).unwrap();
    let m = HeraldModel::with_default_herald(c(1.0, 0.0), 0.0, 0.0, t(30)).unwrap();
    assert!(fidelity(&heralded_addition_model(&psi, &m).unwrap().0, &added).unwrap() > 1.0 - 1e-12);
    for theta in [0.2, 0.9, 1.4] {
        let m = HeraldModel::with_default_herald(c(0.0, 0.0), theta, 0.0, t(30)).unwrap();
        assert!(fidelity(&heralded_addition_model(&psi, &m).unwrap().0, &added).unwrap() > 1.0 - 1e-12);
    }
    // theta = pi/2 with a vacuum ancilla: nothing can reach |1,0>
    let m = HeraldModel::with_default_herald(c(0.0, 0.0), PI / 2.0, 0.0, t(30)).unwrap();
    assert!(matches!(heralded_addition_model(&psi, &m), Err(Error::HeraldImpossible { .. })));
}

#[test]
fn physical_orthogonalizer() {
    for (alpha, theta) in [(c(1.0, 0.0), PI / 8.0), (c(0.5, 0.5), PI / 4.0), (c(-0.8, 0.3), PI / 6.0)] {
        let psi = coherent_state(alpha, t(40)).unwrap();
        let model = HeraldModel::addition_orthogonalizer(alpha, theta, t(40)).unwrap();
        assert!(((model.beta * model.r() / model.t()) - alpha.conj()).norm() < 1e-14);
        let (out, _) = heralded_addition_model(&psi, &model).unwrap();
        assert!(inner_product(&psi, &out).unwrap().norm() < 1e-8);
        assert!(fidelity(&out, &displaced_fock(alpha, 1, 40)).unwrap() > 1.0 - 1e-8);
    }
}

/// Angle in `(0, pi/4)` with `sin/(cos - sin) = target`, by bisection.
fn bisect_angle(target: f64) -> f64 {
    let f = |th: f64| th.sin() / (th.cos() - th.sin()) - target;
    let (mut lo, mut hi) = (0.0, PI / 4.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn number_scheme_orthogonalizes() {
    for a in [0.5, 1.0, 1.5] {
        let alpha = c(a, 0.0);
        let n_bar = alpha.norm_sqr();
        let psi = coherent_state(alpha, t(40)).unwrap();
        let theta = bisect_angle(n_bar);
        let tuned = HeraldModel::number_orthogonalizer(n_bar, t(40)).unwrap();
        assert!((tuned.theta - theta).abs() < 1e-12);
        let model = HeraldModel::new(c(0.0, 0.0), theta, 0.0, t(4));
        let (out, _) = number_scheme_model(&psi, &model).unwrap();
        assert!(inner_product(&psi, &out).unwrap().norm() < 1e-8, "alpha {a}");
        let ideal = ladder_operators(t(40)).n.plus_identity(c(-n_bar, 0.0)).apply(&psi).unwrap();
        assert!(fidelity(&out, &ideal).unwrap() > 1.0 - 1e-8);
    }
}

#[test]
fn number_scheme_operator_elementwise() {
    let n = 20;
    let tr = t(n);
    let l = ladder_operators(tr);
    let aad = &l.a * &l.a_dag;
    for (theta, phi) in [(0.3, 0.0), (0.3, 1.1), (1.2, -0.4), (0.05, PI)] {
        let model = HeraldModel::new(c(0.0, 0.0), theta, phi, t(3));
        let got = number_scheme_operator(&model, tr).unwrap();
        let want = &l.n.scaled(C64::from_polar(theta.cos(), phi)) - &aad.scaled(c(theta.sin(), 0.0));
        assert!(got.max_abs_diff_on(&want, n - 1) < 1e-10);
        if phi == 0.0 {
            let d = theta.cos() - theta.sin();
            let shifted = l.n.plus_identity(c(-model.number_offset().unwrap(), 0.0)).scaled(c(d, 0.0));
            assert!(got.max_abs_diff_on(&shifted, n - 1) < 1e-10);
        }
    }
    let singular = HeraldModel::new(c(0.0, 0.0), PI / 4.0, 0.0, t(3));
    assert!(matches!(number_scheme_operator(&singular, tr), Err(Error::SingularConfiguration(_))));
}

#[test]
fn mean_mismatch_is_rejected() {
    let psi = coherent_state(c(1.0, 0.0), t(30)).unwrap();
    let err = orthogonalize(&psi, &OrthogonalizerSpec::creation(c(0.9, 0.0))).unwrap_err();
    assert!(matches!(err, Error::MeanMismatch { .. }));
}
