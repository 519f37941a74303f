//! Values frozen from an independent multiprecision / nested-quadrature
//! oracle that shares no code with this crate.

use anyon_entropy::correlators::overlap_kernel;
use anyon_entropy::rdm::rdm_element_generic;
use anyon_entropy::special_fns::{ln_script_d, regularized_1f1_neg_int};
use anyon_entropy::{
    four_point, hermite_fn, script_d, FourPointSpec, StatisticsParameter, TruncationConfig, TwoAnyonState,
};

fn eta(v: f64) -> StatisticsParameter {
    StatisticsParameter::new(v).unwrap()
}

fn close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "got {got:.16e}, want {want:.16e}, tol {tol:e}"
    );
}

#[test]
fn hermite_function_values() {
    close(hermite_fn(10, 1.3).unwrap(), -0.34999147167891237, 1e-14);
    close(hermite_fn(3, -0.7).unwrap(), 0.479953503096114, 1e-14);
    close(hermite_fn(40, 2.5).unwrap(), -0.26498308850855745, 1e-13);
}

#[test]
fn script_d_values() {
    close(script_d(1.0, 1.0).unwrap(), 0.6556795424187984, 1e-13);
    close(script_d(3.0, 1.0).unwrap(), 0.31135908483759694, 1e-13);
    close(script_d(2.5, 4.0).unwrap(), 0.033170055069159175, 1e-14);
    close(script_d(0.5, 0.25).unwrap(), 1.9282459679701611, 1e-12);
    close(ln_script_d(40.0, 100.0).unwrap(), -77.6567092346381, 1e-10);
}

#[test]
fn regularized_confluent_value() {
    close(regularized_1f1_neg_int(4, -2.0, 0.9), -2.2599, 1e-13);
}

#[test]
fn shifted_overlap_values() {
    close(overlap_kernel(2, 5, 1.1), -0.32134815329265864, 1e-14);
    close(overlap_kernel(5, 2, 1.1), 0.32134815329265864, 1e-14);
}

#[test]
fn four_point_values() {
    let fp = |m, k, j, i, e: f64| four_point(FourPointSpec::new(m, k, j, i, eta(e))).unwrap();
    close(fp(0, 0, 0, 0, 1.0), 0.6886409151624031, 1e-11);
    close(fp(1, 0, 1, 0, 1.0), 0.0, 1e-11);
    close(fp(2, 1, 1, 0, 0.25), 0.10338497776635705, 1e-10);
    close(fp(3, 2, 1, 0, 4.0), -0.016386171280774242, 1e-10);
}

#[test]
fn truncated_rdm_elements() {
    let state = TwoAnyonState::new(0, 0, eta(1.0));
    let cfg = TruncationConfig::default();
    assert_eq!(cfg.trace_cap, 40);
    close(
        rdm_element_generic(2, 0, &state, &cfg).unwrap(),
        -0.009148065320425338,
        1e-10,
    );
    close(
        rdm_element_generic(0, 0, &state, &cfg).unwrap(),
        0.5636315536497871,
        1e-10,
    );
}
