//! Entanglement, EPR-steering and key-rate criteria on quadrature covariances.
//!
//! All bounds assume vacuum variance 1. Violation flags use strict
//! inequalities with no tolerance band, so a value sitting exactly on the
//! bound is reported as not violated.

use std::f64::consts::{E, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::gaussian::{Covariance, Quadrature};

/// Reid product bound.
pub const REID_BOUND: f64 = 1.0;
/// Duan–Simon and van Loock–Furusawa bound.
pub const VARIANCE_SUM_BOUND: f64 = 4.0;
/// Reid products below `(2/e)²` give a positive one-sided device-independent
/// key rate.
pub const KEY_RATE_THRESHOLD: f64 = (2.0 / E) * (2.0 / E);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Reid,
    DuanSimonPlus,
    DuanSimonMinus,
    VlfPair,
    VlfTrio,
    KeyRate,
}

impl Criterion {
    pub fn bound(self) -> f64 {
        match self {
            Criterion::Reid => REID_BOUND,
            Criterion::KeyRate => 0.0,
            _ => VARIANCE_SUM_BOUND,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Reid => "reid",
            Criterion::DuanSimonPlus => "ds_plus",
            Criterion::DuanSimonMinus => "ds_minus",
            Criterion::VlfPair => "vlf_pair",
            Criterion::VlfTrio => "vlf_trio",
            Criterion::KeyRate => "key_rate",
        }
    }
}

/// Outcome of one criterion evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub value: f64,
    pub bound: f64,
    /// `value < bound`, except for key rates where it is `value > 0`.
    pub violated: bool,
    /// Modes entering the criterion, in the order they were given.
    pub modes: Vec<usize>,
    pub steered: Option<usize>,
    pub steering: Vec<usize>,
}

impl CriterionResult {
    fn new(criterion: Criterion, value: f64, modes: Vec<usize>) -> Self {
        let bound = criterion.bound();
        let violated = match criterion {
            Criterion::KeyRate => value > bound,
            _ => value < bound,
        };
        CriterionResult {
            criterion,
            value,
            bound,
            violated,
            modes,
            steered: None,
            steering: Vec::new(),
        }
    }

    fn directed(mut self, steered: usize, steerer: usize) -> Self {
        self.steered = Some(steered);
        self.steering = vec![steerer];
        self
    }

    /// Short label such as `reid_1_3` (1-based modes, steered first).
    pub fn label(&self) -> String {
        let mut s = self.criterion.name().to_string();
        for m in &self.modes {
            s.push('_');
            s.push_str(&(m + 1).to_string());
        }
        s
    }
}

fn distinct(cov: &Covariance, modes: &[usize]) -> Result<()> {
    for (k, &m) in modes.iter().enumerate() {
        cov.check_mode(m)?;
        if modes[..k].contains(&m) {
            return Err(invalid(format!("modes must be distinct, got {modes:?}")));
        }
    }
    Ok(())
}

/// Variance of `target` left after the optimal linear estimate from
/// `reference`: `V(t) − V(t,r)² / V(r)`.
pub fn inferred_variance(
    state: &impl AsRef<Covariance>,
    target: Quadrature,
    reference: Quadrature,
) -> Result<f64> {
    let cov = state.as_ref();
    cov.check_mode(target.mode())?;
    cov.check_mode(reference.mode())?;
    if target == reference {
        return Err(invalid("target and reference quadratures coincide"));
    }
    let v_ref = cov.variance(reference);
    if !(v_ref > 0.0) {
        return Err(Error::Degenerate(format!("reference variance {v_ref} is not positive")));
    }
    let c = cov.covariance(target, reference);
    Ok(cov.variance(target) - c * c / v_ref)
}

/// Reid product `V_inf(X_s | X_t) · V_inf(Y_s | Y_t)` for mode `steered`
/// inferred from mode `steerer`. Below 1 witnesses steering of `steered`.
pub fn reid_product(
    state: &impl AsRef<Covariance>,
    steered: usize,
    steerer: usize,
) -> Result<CriterionResult> {
    let cov = state.as_ref();
    distinct(cov, &[steered, steerer])?;
    let vx = inferred_variance(cov, Quadrature::X(steered), Quadrature::X(steerer))?;
    let vy = inferred_variance(cov, Quadrature::Y(steered), Quadrature::Y(steerer))?;
    Ok(CriterionResult::new(Criterion::Reid, vx * vy, vec![steered, steerer]).directed(steered, steerer))
}

fn pair_coefficients(n: usize, terms: &[(Quadrature, f64)]) -> Vec<f64> {
    let mut c = vec![0.0; 2 * n];
    for &(q, w) in terms {
        c[q.index(n)] += w;
    }
    c
}

/// Duan–Simon sums `(DS⁺, DS⁻)` with
/// `DS⁺ = V(X_i + X_j) + V(Y_i − Y_j)` and `DS⁻ = V(X_i − X_j) + V(Y_i + Y_j)`.
pub fn duan_simon(
    state: &impl AsRef<Covariance>,
    i: usize,
    j: usize,
) -> Result<(CriterionResult, CriterionResult)> {
    use Quadrature::{X, Y};
    let cov = state.as_ref();
    distinct(cov, &[i, j])?;
    let n = cov.n_modes();
    let var = |terms: &[(Quadrature, f64)]| cov.combo_variance(&pair_coefficients(n, terms));
    let plus = var(&[(X(i), 1.0), (X(j), 1.0)])? + var(&[(Y(i), 1.0), (Y(j), -1.0)])?;
    let minus = var(&[(X(i), 1.0), (X(j), -1.0)])? + var(&[(Y(i), 1.0), (Y(j), 1.0)])?;
    Ok((
        CriterionResult::new(Criterion::DuanSimonPlus, plus, vec![i, j]),
        CriterionResult::new(Criterion::DuanSimonMinus, minus, vec![i, j]),
    ))
}

/// Gain on `Y_k` minimising `V(Y_i + Y_j + g Y_k)`.
pub fn vlf_gain(state: &impl AsRef<Covariance>, i: usize, j: usize, k: usize) -> Result<f64> {
    use Quadrature::Y;
    let cov = state.as_ref();
    distinct(cov, &[i, j, k])?;
    let vk = cov.variance(Y(k));
    if !(vk > 0.0) {
        return Err(Error::Degenerate(format!("V(Y_{k}) = {vk} is not positive")));
    }
    Ok(-(cov.covariance(Y(k), Y(i)) + cov.covariance(Y(k), Y(j))) / vk)
}

/// `V(X_i − X_j) + V(Y_i + Y_j + g Y_k)` at a caller-supplied gain.
pub fn vlf_pair_with_gain(
    state: &impl AsRef<Covariance>,
    i: usize,
    j: usize,
    k: usize,
    gain: f64,
) -> Result<CriterionResult> {
    use Quadrature::{X, Y};
    let cov = state.as_ref();
    distinct(cov, &[i, j, k])?;
    let n = cov.n_modes();
    let value = cov.combo_variance(&pair_coefficients(n, &[(X(i), 1.0), (X(j), -1.0)]))?
        + cov.combo_variance(&pair_coefficients(n, &[(Y(i), 1.0), (Y(j), 1.0), (Y(k), gain)]))?;
    Ok(CriterionResult::new(Criterion::VlfPair, value, vec![i, j, k]))
}

/// Pairwise van Loock–Furusawa sum with the optimal gain of [`vlf_gain`].
/// Violation of any two of the three pairings witnesses tripartite
/// entanglement.
pub fn vlf_pair(state: &impl AsRef<Covariance>, i: usize, j: usize, k: usize) -> Result<CriterionResult> {
    let gain = vlf_gain(state, i, j, k)?;
    vlf_pair_with_gain(state, i, j, k, gain)
}

/// `V(X_i − (X_j + X_k)/√2) + V(Y_i + (Y_j + Y_k)/√2)`. A single violation
/// witnesses tripartite entanglement.
pub fn vlf_trio(state: &impl AsRef<Covariance>, i: usize, j: usize, k: usize) -> Result<CriterionResult> {
    use Quadrature::{X, Y};
    let cov = state.as_ref();
    distinct(cov, &[i, j, k])?;
    let n = cov.n_modes();
    let h = 1.0 / SQRT_2;
    let value = cov.combo_variance(&pair_coefficients(n, &[(X(i), 1.0), (X(j), -h), (X(k), -h)]))?
        + cov.combo_variance(&pair_coefficients(n, &[(Y(i), 1.0), (Y(j), h), (Y(k), h)]))?;
    Ok(CriterionResult::new(Criterion::VlfTrio, value, vec![i, j, k]))
}

/// Steering function `E_{i|M}` for an `n`-output cascaded beamsplitter network
/// in which `m` outputs steer one other output. Values below 1 indicate
/// steering.
pub fn wang_bound(n: u32, m: u32, r: f64) -> Result<f64> {
    if n < 2 || m < 1 || m > n - 1 {
        return Err(invalid(format!("need 1 <= M <= N-1, got N={n}, M={m}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("squeezing parameter must be finite and >= 0, got {r}")));
    }
    let (n, m) = (f64::from(n), f64::from(m));
    let c = (4.0 * r).cosh() - 1.0;
    let n2 = n * n;
    Ok((2.0 * (m + 1.0) * (n - m - 1.0) * c + n2) / (2.0 * m * (n - m) * c + n2))
}

/// Lower bound on the reverse-reconciliation secret key rate, in bits,
/// `K = log₂(2 e⁻¹ / √ΠV)`.
pub fn key_rate(reid_value: f64) -> Result<CriterionResult> {
    if !(reid_value > 0.0) {
        return Err(invalid(format!("Reid product must be positive, got {reid_value}")));
    }
    let value = (2.0 / E / reid_value.sqrt()).log2();
    Ok(CriterionResult::new(Criterion::KeyRate, value, Vec::new()))
}

/// Key rate for a directed pair, carrying the steering direction.
pub fn directed_key_rate(reid: &CriterionResult) -> Result<CriterionResult> {
    let mut k = key_rate(reid.value)?;
    k.modes = reid.modes.clone();
    k.steered = reid.steered;
    k.steering = reid.steering.clone();
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{vacuum_state, GaussianState};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn vacuum_sits_on_every_bound() {
        let v = vacuum_state(3).unwrap();
        let reid = reid_product(&v, 0, 2).unwrap();
        assert_eq!(reid.value, 1.0);
        assert!(!reid.violated);
        assert_eq!(reid.steered, Some(0));
        let (p, m) = duan_simon(&v, 0, 1).unwrap();
        assert_eq!((p.value, m.value), (4.0, 4.0));
        assert_eq!(vlf_gain(&v, 0, 1, 2).unwrap(), 0.0);
        assert_eq!(vlf_pair(&v, 0, 1, 2).unwrap().value, 4.0);
        assert_abs_diff_eq!(vlf_trio(&v, 0, 1, 2).unwrap().value, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn inferred_variance_limits() {
        let v = vacuum_state(2).unwrap();
        assert_eq!(inferred_variance(&v, Quadrature::X(0), Quadrature::X(1)).unwrap(), 1.0);
        let perfect = Covariance::new(DMatrix::from_row_slice(
            4,
            4,
            &[2.0, 2.0, 0.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ))
        .unwrap();
        assert_eq!(inferred_variance(&perfect, Quadrature::X(0), Quadrature::X(1)).unwrap(), 0.0);
        assert!(inferred_variance(&v, Quadrature::X(0), Quadrature::X(0)).is_err());
        let mut degenerate = DMatrix::identity(4, 4);
        degenerate[(1, 1)] = 0.0;
        let degenerate = Covariance::new(degenerate).unwrap();
        assert!(matches!(
            inferred_variance(&degenerate, Quadrature::X(0), Quadrature::X(1)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn mode_arguments_are_validated() {
        let v = vacuum_state(3).unwrap();
        assert!(reid_product(&v, 1, 1).is_err());
        assert!(reid_product(&v, 0, 3).is_err());
        assert!(vlf_pair(&v, 0, 0, 2).is_err());
        assert!(duan_simon(&v, 2, 2).is_err());
    }

    #[test]
    fn wang_bound_values() {
        for r in [0.0, 0.3, 1.0, 2.5] {
            assert_eq!(wang_bound(3, 1, r).unwrap(), 1.0);
        }
        for (n, m) in [(3, 2), (4, 1), (5, 3)] {
            assert_eq!(wang_bound(n, m, 0.0).unwrap(), 1.0);
        }
        let expected = 9.0 / (4.0 * (2f64.cosh() - 1.0) + 9.0);
        assert_abs_diff_eq!(wang_bound(3, 2, 0.5).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.448905, epsilon = 1e-6);
        assert!(wang_bound(3, 0, 1.0).is_err());
        assert!(wang_bound(3, 3, 1.0).is_err());
        assert!(wang_bound(3, 1, -1.0).is_err());
    }

    #[test]
    fn key_rate_values() {
        let k = key_rate(KEY_RATE_THRESHOLD).unwrap();
        assert_abs_diff_eq!(k.value, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(KEY_RATE_THRESHOLD, 0.54134, epsilon = 5e-6);
        let k = key_rate(1.0).unwrap();
        assert_abs_diff_eq!(k.value, 1.0 - std::f64::consts::LOG2_E, epsilon = 1e-15);
        assert!(!k.violated);
        let k = key_rate(0.0816).unwrap();
        assert_abs_diff_eq!(k.value, 1.365, epsilon = 5e-4);
        assert!(k.violated);
        assert!(key_rate(0.0).is_err());
        assert!(key_rate(-1.0).is_err());
    }

    #[test]
    fn key_rate_sign_matches_threshold_on_log_grid() {
        for k in 0..=400 {
            let x = 4.0 * 10f64.powf(-6.0 * f64::from(k) / 400.0);
            assert_eq!(key_rate(x).unwrap().violated, x < KEY_RATE_THRESHOLD, "x = {x}");
        }
    }

    #[test]
    fn wang_two_steerers_never_exceed_one_steerer() {
        for k in 0..200 {
            let r = 0.02 * f64::from(k);
            let two = wang_bound(3, 2, r).unwrap();
            let one = wang_bound(3, 1, r).unwrap();
            assert!(two <= one);
            assert_eq!(two == one, r == 0.0);
        }
    }

    #[test]
    fn labels_are_one_based() {
        let v = vacuum_state(3).unwrap();
        assert_eq!(reid_product(&v, 0, 2).unwrap().label(), "reid_1_3");
        assert_eq!(vlf_trio(&v, 2, 0, 1).unwrap().label(), "vlf_trio_3_1_2");
    }

    /// Random physical three-mode states with correlated X/Y blocks: a
    /// symplectic `S = [[A, 0], [0, A⁻ᵀ]]` applied to a thermal product state.
    fn arb_state() -> impl Strategy<Value = GaussianState> {
        (prop::collection::vec(-1.0f64..1.0, 9), prop::collection::vec(1.0f64..3.0, 3)).prop_filter_map(
            "singular",
            |(a, thermal)| {
                let a = DMatrix::from_row_slice(3, 3, &a) + DMatrix::identity(3, 3) * 1.5;
                let a_inv_t = a.clone().try_inverse()?.transpose();
                let map = crate::gaussian::QuadratureMap::from_blocks(&a, &a_inv_t).ok()?;
                let mut diag = DMatrix::zeros(6, 6);
                for m in 0..3 {
                    diag[(m, m)] = thermal[m];
                    diag[(m + 3, m + 3)] = thermal[m];
                }
                GaussianState::from_matrix(diag).ok()?.apply(&map).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn duan_simon_sum_at_least_eight(state in arb_state()) {
            let (p, m) = duan_simon(&state, 0, 1).unwrap();
            // DS⁺ + DS⁻ = 2 (V(X_i)+V(X_j)+V(Y_i)+V(Y_j)) ≥ 8
            let cov = state.covariance();
            let local = cov.variance(Quadrature::X(0)) + cov.variance(Quadrature::X(1))
                + cov.variance(Quadrature::Y(0)) + cov.variance(Quadrature::Y(1));
            prop_assert!((p.value + m.value - 2.0 * local).abs() <= 1e-9 * local);
            prop_assert!(p.value + m.value >= 8.0 - 1e-9);
        }

        #[test]
        fn optimal_gain_never_worse_than_unit_gain(state in arb_state(), g in -3.0f64..3.0) {
            let opt = vlf_pair(&state, 0, 1, 2).unwrap().value;
            prop_assert!(opt <= vlf_pair_with_gain(&state, 0, 1, 2, 1.0).unwrap().value + 1e-12);
            prop_assert!(opt <= vlf_pair_with_gain(&state, 0, 1, 2, g).unwrap().value + 1e-12);
        }

        #[test]
        fn reid_product_is_label_covariant(state in arb_state()) {
            // relabel modes (0,1,2) -> (2,0,1): new mode k is old mode perm[k]
            let perm = [1usize, 2, 0];
            let relabelled = state.covariance().permute_modes(&perm).unwrap();
            for steered in 0..3 {
                for steerer in (0..3).filter(|&s| s != steered) {
                    let a = reid_product(&relabelled, steered, steerer).unwrap().value;
                    let b = reid_product(&state, perm[steered], perm[steerer]).unwrap().value;
                    prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
                }
            }
        }

        #[test]
        fn reid_product_symmetric_in_inference_order(state in arb_state()) {
            let cov = state.covariance();
            let vx = inferred_variance(cov, Quadrature::X(0), Quadrature::X(1)).unwrap();
            let vy = inferred_variance(cov, Quadrature::Y(0), Quadrature::Y(1)).unwrap();
            prop_assert_eq!(reid_product(cov, 0, 1).unwrap().value, vx * vy);
            prop_assert!((vy * vx - vx * vy).abs() < 1e-15);
        }
    }

    #[test]
    fn duan_simon_equality_without_cross_covariance() {
        let mut m = DMatrix::identity(6, 6);
        for (k, v) in [(0, 2.0), (1, 3.0), (3, 0.5), (4, 1.0 / 3.0)] {
            m[(k, k)] = v;
        }
        let c = Covariance::new(m).unwrap();
        let (p, mi) = duan_simon(&c, 0, 1).unwrap();
        assert_abs_diff_eq!(p.value + mi.value, 2.0 * (2.0 + 3.0 + 0.5 + 1.0 / 3.0), epsilon = 1e-14);
        assert_abs_diff_eq!(p.value, mi.value, epsilon = 1e-14);
    }
}
