//! Model outputs against independent numerical oracles.

use approx::assert_abs_diff_eq;
use cv_triparty::asym_tw::{coefficient_set, tw_covariance, tw_transform, AsymParams, CoefficientMode};
use cv_triparty::cavity::{build_system, linspace, reid_products_at, CavityParams};
use cv_triparty::criteria::{key_rate, reid_product};
use cv_triparty::oracle::{matexp, mc_covariance, RngSeed};
use cv_triparty::symmetric::{build_symmetric_state, network_map, SymmetricParams};
use cv_triparty::QuadratureMap;
use nalgebra::DMatrix;

fn canonical() -> AsymParams {
    AsymParams::with_ratio(0.6, CoefficientMode::Canonical).unwrap()
}

#[test]
fn closed_form_coefficients_match_generator_exponential() {
    let params = canonical();
    for zt in linspace(0.0, 3.0, 20) {
        let t = zt / params.zeta();
        let u = matexp(&params.generator(), t).unwrap();
        let map = tw_transform(&params, zt).unwrap();
        let gap = (&u - map.matrix()).amax();
        assert!(gap < 1e-9 * u.amax().max(1.0), "zt = {zt}: {gap:e}");
    }
}

#[test]
fn generator_exponential_is_a_semigroup() {
    let g = canonical().generator();
    let (s, t) = (0.37, 1.21);
    let lhs = matexp(&g, s + t).unwrap();
    let rhs = matexp(&g, s).unwrap() * matexp(&g, t).unwrap();
    assert!((lhs - rhs).amax() < 1e-10);
}

#[test]
fn travelling_wave_covariance_by_monte_carlo() {
    let params = canonical();
    let map = tw_transform(&params, 1.0).unwrap();
    let mc = mc_covariance(&map, 1_000_000, RngSeed(0x5eed_0001)).unwrap();
    let exact = tw_covariance(&params, 1.0).unwrap();
    let z = mc.max_z_score(exact.matrix());
    assert!(z < 5.0, "max z-score {z}");
    assert_abs_diff_eq!(mc.cov[(0, 2)], 5.431085, epsilon = 5.0 * mc.std_err[(0, 2)]);
}

#[test]
fn symmetric_covariance_by_monte_carlo() {
    let r: f64 = 1.0;
    let (up, down) = ((r / 2.0).exp(), (-r / 2.0).exp());
    let squeeze = QuadratureMap::from_blocks(
        &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![up, down, down])),
        &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![down, up, up])),
    )
    .unwrap();
    let map = squeeze.then(&network_map(2.0 / 3.0, 0.5).unwrap()).unwrap();
    let mc = mc_covariance(&map, 1_000_000, RngSeed(7)).unwrap();
    let state = build_symmetric_state(&SymmetricParams::symmetric(r)).unwrap();
    assert!(mc.max_z_score(state.covariance().matrix()) < 5.0);
}

#[test]
fn coefficient_identities_hold_in_canonical_mode() {
    for zt in linspace(0.0, 3.0, 31) {
        let c = coefficient_set(&canonical(), zt).unwrap();
        assert_abs_diff_eq!(c.alpha * c.alpha - c.beta * c.beta - c.gamma * c.gamma, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.delta * c.delta + c.epsilon * c.epsilon - c.beta * c.beta, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.eta * c.eta + c.epsilon * c.epsilon - c.gamma * c.gamma, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn intracavity_key_band_sits_inside_steering_band() {
    let system = build_system(&CavityParams::reference().with_pump_fraction(0.8).unwrap()).unwrap();
    for omega in linspace(-6.0, 6.0, 121) {
        let pi13 = reid_products_at(&system, omega).unwrap()[1];
        let key = key_rate(pi13).unwrap().value;
        if key > 0.0 {
            assert!(pi13 < 1.0, "key without steering at ω = {omega}");
        }
    }
    let cov = cv_triparty::cavity::output_spectrum(&system, 0.0).unwrap().covariance().unwrap();
    assert!(reid_product(&cov, 0, 2).unwrap().violated);
}
