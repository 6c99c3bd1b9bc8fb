use approx::assert_abs_diff_eq;
use refsys_core::hardy::{pointer_projector, ExperimentState, P1};
use refsys_core::postulates::{internal_candidates, joint_probability, naive_trace_functional};
use refsys_core::{
    hermitian_eigensystem, Error, HardyModel, HiddenBranch, Particle, Pointer, Setting, Settings, SystemId, C64,
};

const DD: Settings = Settings::new(Setting::D, Setting::D);

fn model() -> HardyModel {
    HardyModel::new(0.8).unwrap()
}

#[test]
fn embedded_particle_dyad_has_half_trace() {
    let m = model();
    let d = Particle::First.state(m.basis().d).dyad();
    let full = d.as_operator().embed(&ExperimentState::layout()).unwrap();
    assert_eq!(full.dim(), 36);
    assert_abs_diff_eq!(full.trace().re, 18.0, epsilon = 1e-12);
}

#[test]
fn device_state_spectrum() {
    let fin = model().final_state(DD).unwrap();
    let rho = fin.reduced(&[Particle::First.device_id()]).unwrap();
    let values = hermitian_eigensystem(rho.state().as_operator()).unwrap().values();
    // oracle: 0.64 c0^2 + 0.36 c1^2 and its complement, exact rationals 362/650 and 288/650
    assert_abs_diff_eq!(values[0], 0.556923076923077, epsilon = 1e-12);
    assert_abs_diff_eq!(values[1], 0.443076923076923, epsilon = 1e-12);
    assert_abs_diff_eq!(values[2], 0.0, epsilon = 1e-12);
}

#[test]
fn particle_and_device_candidates_are_branch_states() {
    let m = model();
    let fin = m.final_state(DD).unwrap();
    let ids = [Particle::First.particle_id(), Particle::First.device_id()];
    let reduced = fin.reduced(&ids).unwrap().assume_isolated();
    let candidates = internal_candidates(&reduced).unwrap();
    assert_eq!(candidates.len(), 2);
    let (plus, minus) = m.branch_states(Setting::D, Particle::First);
    assert_abs_diff_eq!(candidates[0].probability, 0.64, epsilon = 1e-12);
    assert_abs_diff_eq!(candidates[1].probability, 0.36, epsilon = 1e-12);
    assert_abs_diff_eq!(candidates[0].state.inner(&plus).unwrap().norm(), 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(candidates[1].state.inner(&minus).unwrap().norm(), 1.0, epsilon = 1e-10);
    assert!(candidates.iter().all(|c| !c.degenerate));
}

#[test]
fn undeclared_reference_is_rejected() {
    let fin = model().final_state(DD).unwrap();
    let reduced = fin.reduced(&[P1]).unwrap();
    assert!(matches!(internal_candidates(&reduced), Err(Error::NotIsolated)));
}

#[test]
fn joint_pointer_probability() {
    let rho = model().final_state(DD).unwrap().density();
    let p = joint_probability(
        &[pointer_projector(Particle::First, Pointer::Two), pointer_projector(Particle::Second, Pointer::Two)],
        &rho,
    )
    .unwrap();
    // oracle: (12/65)^2
    assert_abs_diff_eq!(p, 0.03408284023668639, epsilon = 1e-12);
}

#[test]
fn overlapping_assignment_is_guarded_but_functional_is_not() {
    let m = model();
    let rho = m.final_state(DD).unwrap().density();
    let triple = [
        m.branch_state(Setting::D, Particle::First, HiddenBranch::Plus).dyad(),
        pointer_projector(Particle::First, Pointer::Two),
        pointer_projector(Particle::Second, Pointer::Two),
    ];
    match joint_probability(&triple, &rho) {
        Err(Error::DisjointnessViolation(id)) => assert_eq!(id, SystemId::from("M1")),
        other => panic!("expected a disjointness violation, got {other:?}"),
    }
    let value = naive_trace_functional(&triple, &rho).unwrap();
    assert_abs_diff_eq!(value.re, -0.04382079459002536, epsilon = 1e-12);
    assert!(value.im.abs() <= 1e-12);
}

#[test]
fn disjoint_pair_agrees_with_functional() {
    let m = model();
    let rho = m.final_state(DD).unwrap().density();
    let pair = [
        m.branch_state(Setting::D, Particle::First, HiddenBranch::Plus).dyad(),
        pointer_projector(Particle::Second, Pointer::Two),
    ];
    let guarded = joint_probability(&pair, &rho).unwrap();
    let naive = naive_trace_functional(&pair, &rho).unwrap();
    assert!((naive - C64::new(guarded, 0.0)).norm() <= 1e-12);
}

#[test]
fn hidden_branch_table_rows_sum_to_branch_weights() {
    let t = model().hidden_branch_table(DD).unwrap();
    let rows = t.marginal(0);
    assert_abs_diff_eq!(rows.probabilities()[0], 0.64, epsilon = 1e-12);
    assert_abs_diff_eq!(rows.probabilities()[1], 0.36, epsilon = 1e-12);
    assert_abs_diff_eq!(t.total(), 1.0, epsilon = 1e-12);
}

#[test]
fn u_u_table_has_zero_corner() {
    let table = model().outcome_distribution(Settings::new(Setting::U, Setting::U)).unwrap();
    assert_abs_diff_eq!(table.simulated.get(&[0, 0]), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(table.simulated.get_by_labels(&["1", "1"]).unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn items_at_point_eight() {
    let report = model().verify_items().unwrap();
    assert!(report.all_passed());
    let values: Vec<f64> = report.items.iter().map(|i| i.simulated).collect();
    for v in &values[..3] {
        assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(values[3], 0.03408284023668639, epsilon = 1e-12);
}

#[test]
fn device_marginals_at_point_eight() {
    let m = model();
    let d = m.final_state(DD).unwrap().device_marginal(Particle::First).unwrap();
    assert_abs_diff_eq!(d[0].1, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(d[1].1, 0.556923076923077, epsilon = 1e-12);
    assert_abs_diff_eq!(d[2].1, 0.443076923076923, epsilon = 1e-12);
    let u = m.final_state(Settings::new(Setting::U, Setting::D)).unwrap().device_marginal(Particle::First).unwrap();
    // oracle: α²b² + β²a² = 0.48 at α = 0.8
    assert_abs_diff_eq!(u[1].1, 0.48, epsilon = 1e-12);
    assert_abs_diff_eq!(m.marginal_closed_form(Setting::U, Pointer::One), 0.48, epsilon = 1e-12);
}

#[test]
fn rejected_parameters() {
    assert!(matches!(HardyModel::new(std::f64::consts::FRAC_1_SQRT_2), Err(Error::DegenerateParameter(_))));
    assert!(matches!(HardyModel::new(1.0 - 1e-15), Err(Error::Domain(_))));
    assert!(matches!(HardyModel::new(0.0), Err(Error::Domain(_))));
    assert!(matches!(HardyModel::new(f64::NAN), Err(Error::Domain(_))));
}

#[test]
fn evolving_twice_is_a_stage_error() {
    let m = model();
    let fin = m.final_state(DD).unwrap();
    assert!(matches!(m.evolve(&fin, DD), Err(Error::Stage { .. })));
    assert!(m.initial_state().device_marginal(Particle::First).is_err());
}

#[test]
fn measurement_unitary_is_not_an_involution() {
    let m = model();
    let u = m.measurement_unitary(Setting::D, Particle::First);
    let twice = u.compose(&u).unwrap();
    let identity = refsys_core::LinearOperator::identity(u.layout().clone());
    assert!(twice.max_abs_diff(&identity) > 0.5);
    assert!(u.unitarity_defect() <= 1e-12);
}
