//! Independent numerical engines used to cross-check the closed-form models:
//! a scaling-and-squaring matrix exponential, a seeded Monte-Carlo covariance
//! estimator, and grid-scan root bracketing.
//!
//! Random numbers come from ChaCha20 (`rand_chacha`), a counter-based stream
//! cipher generator. Samples are drawn in fixed batches of [`MC_BATCH`]; batch
//! `b` uses stream `b` of the seeded generator, so the estimate does not
//! depend on how batches are scheduled across threads. Normal variates use the
//! Box–Muller transform on 53-bit uniforms.

use nalgebra::{DMatrix, DVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gaussian::QuadratureMap;

/// Largest `‖A t‖₁` for which [`matexp`] is expected to meet its accuracy target.
pub const MATEXP_NORM_LIMIT: f64 = 10.0;
pub const MC_BATCH: usize = 1 << 14;
pub const MC_MIN_SAMPLES: usize = 1_000;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A t)` by scaling and squaring with a Taylor series on the scaled
/// matrix.
pub fn matexp(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(invalid(format!("matexp needs a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    if !t.is_finite() || a.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matexp input is not finite"));
    }
    let n = a.nrows();
    let at = a * t;
    let norm = one_norm(&at);
    if norm > MATEXP_NORM_LIMIT {
        log::warn!("matexp: |At| = {norm:.3} exceeds {MATEXP_NORM_LIMIT}; accuracy not guaranteed");
    }
    // scale so the series argument has norm <= 1/2
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = at / 2f64.powi(squarings);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / f64::from(k);
        result += &term;
        if term.amax() <= f64::EPSILON * result.amax() * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

/// Monte-Carlo covariance estimate with per-entry standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McCovariance {
    pub cov: DMatrix<f64>,
    pub std_err: DMatrix<f64>,
    pub n_samples: usize,
}

impl McCovariance {
    /// Largest `|estimate − reference| / std_err` over all entries.
    pub fn max_z_score(&self, reference: &DMatrix<f64>) -> f64 {
        self.cov
            .iter()
            .zip(reference.iter())
            .zip(self.std_err.iter())
            .map(|((e, r), s)| if *s > 0.0 { (e - r).abs() / s } else if e == r { 0.0 } else { f64::INFINITY })
            .fold(0.0, f64::max)
    }
}

fn uniform_open(rng: &mut ChaCha20Rng) -> f64 {
    // (0, 1]
    ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

fn fill_normals(rng: &mut ChaCha20Rng, out: &mut [f64]) {
    for pair in out.chunks_mut(2) {
        let radius = (-2.0 * uniform_open(rng).ln()).sqrt();
        let angle = std::f64::consts::TAU * uniform_open(rng);
        pair[0] = radius * angle.cos();
        if let Some(second) = pair.get_mut(1) {
            *second = radius * angle.sin();
        }
    }
}

/// Sample covariance of `M x` for standard-normal `x` (vacuum input), using
/// the known zero mean.
pub fn mc_covariance(map: &QuadratureMap, n_samples: usize, seed: RngSeed) -> Result<McCovariance> {
    if n_samples < MC_MIN_SAMPLES {
        return Err(invalid(format!("need at least {MC_MIN_SAMPLES} samples, got {n_samples}")));
    }
    let m = map.matrix();
    let dim = m.nrows();
    let n_batches = n_samples.div_ceil(MC_BATCH);
    let partials: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let count = MC_BATCH.min(n_samples - b * MC_BATCH);
            let mut rng = ChaCha20Rng::seed_from_u64(seed.0);
            rng.set_stream(b as u64);
            let mut sum = DMatrix::zeros(dim, dim);
            let mut sum_sq = DMatrix::zeros(dim, dim);
            let mut x = DVector::zeros(dim);
            for _ in 0..count {
                fill_normals(&mut rng, x.as_mut_slice());
                let y = m * &x;
                for j in 0..dim {
                    for i in 0..=j {
                        let p = y[i] * y[j];
                        sum[(i, j)] += p;
                        sum_sq[(i, j)] += p * p;
                    }
                }
            }
            (sum, sum_sq)
        })
        .collect();
    let mut sum = DMatrix::zeros(dim, dim);
    let mut sum_sq = DMatrix::zeros(dim, dim);
    for (s, q) in &partials {
        sum += s;
        sum_sq += q;
    }
    let n = n_samples as f64;
    let mut cov = DMatrix::zeros(dim, dim);
    let mut std_err = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..=j {
            let mean = sum[(i, j)] / n;
            let var = (sum_sq[(i, j)] / n - mean * mean).max(0.0) * n / (n - 1.0);
            let se = (var / n).sqrt();
            cov[(i, j)] = mean;
            cov[(j, i)] = mean;
            std_err[(i, j)] = se;
            std_err[(j, i)] = se;
        }
    }
    Ok(McCovariance { cov, std_err, n_samples })
}

/// Sign-change intervals of `f` sampled on `steps` equal intervals of
/// `[lo, hi]`, in ascending order. Zero counts as non-positive.
pub fn bracket_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    if steps < 2 {
        return Err(invalid(format!("need at least 2 steps, got {steps}")));
    }
    if !(lo < hi) {
        return Err(invalid(format!("empty interval [{lo}, {hi}]")));
    }
    let x = |k: usize| if k == steps { hi } else { lo + (hi - lo) * k as f64 / steps as f64 };
    let mut out = Vec::new();
    let mut prev = f(x(0)) > 0.0;
    for k in 1..=steps {
        let cur = f(x(k)) > 0.0;
        if cur != prev {
            out.push((x(k - 1), x(k)));
        }
        prev = cur;
    }
    Ok(out)
}

/// Bisection on a bracket whose end points straddle the sign boundary of
/// [`bracket_roots`].
pub fn bisect<F: Fn(f64) -> f64>(f: F, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut a, mut b) = bracket;
    let pa = f(a) > 0.0;
    if pa == (f(b) > 0.0) {
        return Err(Error::Degenerate(format!("[{a}, {b}] does not bracket a sign change")));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if (f(mid) > 0.0) == pa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matexp_trivial_cases() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(matexp(&z, 3.0).unwrap(), DMatrix::identity(4, 4));
        let nil = DMatrix::from_row_slice(2, 2, &[0.0, 2.5, 0.0, 0.0]);
        let e = matexp(&nil, 1.0).unwrap();
        assert!((e - (DMatrix::identity(2, 2) + &nil)).amax() < 1e-15);
        assert!(matexp(&DMatrix::<f64>::zeros(2, 3), 1.0).is_err());
    }

    #[test]
    fn matexp_two_mode_squeezer() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let e = matexp(&a, 1.0).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        let expected = DMatrix::from_row_slice(3, 3, &[c, 0.0, s, 0.0, 1.0, 0.0, s, 0.0, c]);
        assert!((e - expected).amax() < 1e-14);
    }

    #[test]
    fn matexp_rotation_and_semigroup() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = matexp(&a, 2.0).unwrap();
        assert_abs_diff_eq!(e[(0, 0)], 2f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)], 2f64.sin(), epsilon = 1e-14);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.6, 1.0, -0.6, 0.0]);
        let lhs = matexp(&b, 1.7).unwrap();
        let rhs = matexp(&b, 0.4).unwrap() * matexp(&b, 1.3).unwrap();
        assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn mc_identity_within_five_standard_errors() {
        let mc = mc_covariance(&QuadratureMap::identity(3), 1_000_000, RngSeed(7)).unwrap();
        assert!(mc.max_z_score(&DMatrix::identity(6, 6)) < 5.0);
        assert!(mc_covariance(&QuadratureMap::identity(1), 999, RngSeed(7)).is_err());
    }

    #[test]
    fn mc_standard_error_scales_with_sample_count() {
        let map = QuadratureMap::identity(2);
        let small = mc_covariance(&map, 10_000, RngSeed(1)).unwrap();
        let large = mc_covariance(&map, 1_000_000, RngSeed(2)).unwrap();
        for (s, l) in small.std_err.iter().zip(large.std_err.iter()) {
            let ratio = s / l;
            assert!((8.0..=12.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn mc_is_reproducible_and_symmetric() {
        let map = QuadratureMap::identity(2);
        let a = mc_covariance(&map, 50_000, RngSeed(42)).unwrap();
        let b = mc_covariance(&map, 50_000, RngSeed(42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cov, a.cov.transpose());
        let c = mc_covariance(&map, 50_000, RngSeed(43)).unwrap();
        assert_ne!(a.cov, c.cov);
    }

    #[test]
    fn bracket_roots_cases() {
        let b = bracket_roots(|x| x - 0.5, 0.0, 1.0, 100).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].0 <= 0.5 && 0.5 <= b[0].1);
        assert!(bracket_roots(|_| 1.0, 0.0, 1.0, 100).unwrap().is_empty());
        assert!(bracket_roots(|x| x, 0.0, 1.0, 1).is_err());
        let b = bracket_roots(|x: f64| (x * 10.0).sin(), 0.1, 1.0, 900).unwrap();
        assert_eq!(b.len(), 3);
        let root = bisect(|x: f64| (x * 10.0).sin(), b[0], 1e-12).unwrap();
        assert_abs_diff_eq!(root, std::f64::consts::PI / 10.0, epsilon = 1e-11);
    }
}
