use dualpol_core::atomic::{AtomicData, AtomicModel, ControlSettings, Level, MediumConfig};
use dualpol_core::dynamics::{
    etd_step, expm_action, expm_dense, hermiticity_error, integrate_adaptive, integrate_rk4, liouvillian, max_abs,
    min_eigenvalue, pure_state, rk4_reference, trace_error, unvectorize, vectorize, Dissipator, Generator,
    StepControl,
};
use dualpol_core::propagation::Schedule;
use dualpol_core::protocol::{make_scenario, Preset, ScenarioOverrides};
use dualpol_core::{Complex64, Mat6};
use proptest::prelude::*;

fn model() -> AtomicModel {
    AtomicModel::new(AtomicData::rubidium87(), ControlSettings::default(), MediumConfig::default()).unwrap()
}

fn complex(scale: f64) -> impl Strategy<Value = Complex64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| Complex64::new(re, im))
}

fn hermitian(scale: f64) -> impl Strategy<Value = Mat6> {
    proptest::collection::vec(complex(scale), 36).prop_map(|v| {
        let a = Mat6::from_iterator(v);
        (a + a.adjoint()) * Complex64::new(0.5, 0.0)
    })
}

fn density() -> impl Strategy<Value = Mat6> {
    proptest::collection::vec(complex(1.0), 36).prop_map(|v| {
        let a = Mat6::from_iterator(v);
        let rho = a * a.adjoint();
        rho / rho.trace()
    })
}

fn rel(a: &Mat6, b: &Mat6) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_matches_dense_superoperator(h in hermitian(1e8), rho in density()) {
        let m = model();
        let diss = Dissipator::new(&m.jumps);
        let direct = Generator::new(&h, &diss).apply(&rho);
        let dense = unvectorize(&(liouvillian(&h, &m.jumps) * vectorize(&rho)));
        prop_assert!(rel(&direct, &dense) <= 1e-12);
    }

    #[test]
    fn expm_action_matches_dense_exponential(h in hermitian(1e8), rho in density(), t in 1e-10f64..1e-7) {
        let m = model();
        let diss = Dissipator::new(&m.jumps);
        let a = expm_action(&Generator::new(&h, &diss), &rho, t);
        let b = expm_dense(&liouvillian(&h, &m.jumps), &rho, t);
        prop_assert!(rel(&a, &b) <= 1e-9, "rel {}", rel(&a, &b));
    }

    #[test]
    fn etd_step_keeps_density_matrix_properties(h in hermitian(1e8), rho in density(), dt in 1e-11f64..1e-9) {
        let m = model();
        let diss = Dissipator::new(&m.jumps);
        let out = etd_step(&rho, |_| h, &diss, 0.0, dt).unwrap().rho;
        prop_assert!(hermiticity_error(&out) <= 1e-12);
        prop_assert!(trace_error(&out) <= 1e-10);
        prop_assert!(min_eigenvalue(&out) >= -1e-10);
    }
}

fn rabi_drive() -> (Mat6, Vec<Mat6>) {
    let mut h = Mat6::zeros();
    let (b, a) = (Level::B.index(), Level::A.index());
    h[(a, b)] = Complex64::new(-2e7, 0.0);
    h[(b, a)] = Complex64::new(-2e7, 0.0);
    h[(a, a)] = Complex64::new(5e6, 0.0);
    let mut l = Mat6::zeros();
    l[(b, a)] = Complex64::new((0.5 * 3.8e7f64).sqrt(), 0.0);
    (h, vec![l])
}

#[test]
fn rk4_is_fourth_order() {
    let (h, ops) = rabi_drive();
    let diss = Dissipator::new(&ops);
    let rho0 = pure_state(Level::B.index());
    let t = 2e-7;
    let exact = expm_dense(&liouvillian(&h, &ops), &rho0, t);
    let err = |dt: f64| max_abs(&(integrate_rk4(&rho0, |_| h, &diss, 0.0, &[t], dt).unwrap()[0] - exact));
    let ratio = err(4e-9) / err(2e-9);
    assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rk4_step_of_zero_generator_is_identity() {
    let diss = Dissipator::new(&[]);
    let rho = pure_state(0);
    assert_eq!(rk4_reference(&rho, |_| Mat6::zeros(), &diss, 0.0, 1e-9).unwrap(), rho);
}

#[test]
fn multi_channel_decay_follows_branching() {
    // a decays to b and c with fractions 0.3 and 0.7.
    let gamma = 3.8e7;
    let (a, b, c) = (Level::A.index(), Level::B.index(), Level::C.index());
    let mut lb = Mat6::zeros();
    lb[(b, a)] = Complex64::new((0.5 * gamma * 0.3f64).sqrt(), 0.0);
    let mut lc = Mat6::zeros();
    lc[(c, a)] = Complex64::new((0.5 * gamma * 0.7f64).sqrt(), 0.0);
    let ops = [lb, lc];
    let diss = Dissipator::new(&ops);
    let samples: Vec<f64> = (1..=20).map(|k| k as f64 * 1e-8).collect();
    let out = integrate_adaptive(&pure_state(a), |_| Mat6::zeros(), &diss, 0.0, &samples, &StepControl::default())
        .unwrap();
    for (t, rho) in samples.iter().zip(&out) {
        let pa = (-gamma * t).exp();
        assert!((rho[(a, a)].re - pa).abs() < 1e-8);
        assert!((rho[(b, b)].re - 0.3 * (1.0 - pa)).abs() < 1e-8);
        assert!((rho[(c, c)].re - 0.7 * (1.0 - pa)).abs() < 1e-8);
    }
}

#[test]
fn closed_dynamics_conserve_population() {
    let (h, _) = rabi_drive();
    let diss = Dissipator::new(&[]);
    let samples: Vec<f64> = (1..=50).map(|k| k as f64 * 2e-8).collect();
    let out = integrate_adaptive(&pure_state(Level::B.index()), |_| h, &diss, 0.0, &samples, &StepControl::default())
        .unwrap();
    for rho in &out {
        let pop: f64 = (0..6).map(|i| rho[(i, i)].re).sum();
        assert!((pop - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn adaptive_solution_is_self_convergent() {
    let m = model();
    let scenario = make_scenario(Preset::Fig2a, &ScenarioOverrides::default()).unwrap();
    let drive = scenario.drive(&m);
    let h = |t: f64| m.hamiltonian(&drive.controls(t), &drive.probe_input(t));
    let diss = Dissipator::new(&m.jumps);
    let samples: Vec<f64> = (1..=200).map(|k| k as f64 * 5e-8).collect();
    let run = |rel_tol: f64| {
        let ctrl = StepControl { rel_tol, abs_tol: rel_tol * 1e-3, ..StepControl::default() };
        integrate_adaptive(&pure_state(Level::B.index()), h, &diss, 0.0, &samples, &ctrl).unwrap()
    };
    let coarse = run(1e-6);
    let fine = run(1e-8);
    let diff = coarse.iter().zip(&fine).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max);
    assert!(diff <= 5e-6, "diff {diff}");
}
