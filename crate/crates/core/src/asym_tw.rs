//! Travelling-wave downconversion plus sum-frequency generation.
//!
//! With an undepleted classical pump the interaction Hamiltonian
//! `iħκ₁(a₁†a₃† − a₁a₃) + iħκ₂(a₃a₂† − a₃†a₂)` gives the linear Heisenberg
//! equations
//!
//! ```text
//! dX₁ =  κ₁X₃      dY₁ = −κ₁Y₃
//! dX₂ =  κ₂X₃      dY₂ =  κ₂Y₃
//! dX₃ = κ₁X₁ − κ₂X₂   dY₃ = −κ₁Y₁ − κ₂Y₂
//! ```
//!
//! whose solution is written in terms of six coefficients α…η of the scaled
//! interaction length `ζt`, `ζ = √(κ₁² − κ₂²)`.
//!
//! Two coefficient sets are provided. [`CoefficientMode::Canonical`] is the
//! exact solution of the equations above and is symplectic.
//! [`CoefficientMode::PaperLiteral`] keeps the commonly quoted printed form
//! (sinh terms over `ζ²`, and `γ` in place of `ε` in the mode-2 rows); it is
//! not symplectic and its covariance is not a physical state, but it
//! reproduces the published key-rate window endpoints.

use nalgebra::DMatrix;

use crate::criteria::{key_rate, reid_product};
use crate::error::{invalid, Result};
use crate::gaussian::{Covariance, GaussianState, QuadratureMap};
use crate::oracle::{bisect, bracket_roots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientMode {
    Canonical,
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymParams {
    kappa1: f64,
    kappa2: f64,
    mode: CoefficientMode,
}

impl AsymParams {
    pub fn new(kappa1: f64, kappa2: f64, mode: CoefficientMode) -> Result<Self> {
        if !(kappa1.is_finite() && kappa2.is_finite() && kappa2 >= 0.0 && kappa1 > kappa2) {
            return Err(invalid(format!("need kappa1 > kappa2 >= 0, got {kappa1}, {kappa2}")));
        }
        Ok(AsymParams { kappa1, kappa2, mode })
    }

    /// `κ₁ = 1`, `κ₂ = ratio`.
    pub fn with_ratio(ratio: f64, mode: CoefficientMode) -> Result<Self> {
        AsymParams::new(1.0, ratio, mode)
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    /// `√(κ₁² − κ₂²)`.
    pub fn zeta(&self) -> f64 {
        self.zeta_sq().sqrt()
    }

    pub fn zeta_sq(&self) -> f64 {
        self.kappa1 * self.kappa1 - self.kappa2 * self.kappa2
    }

    /// 6×6 generator `G` of `d(X, Y)/dt = G (X, Y)`.
    pub fn generator(&self) -> DMatrix<f64> {
        let (k1, k2) = (self.kappa1, self.kappa2);
        let mut g = DMatrix::zeros(6, 6);
        g[(0, 2)] = k1;
        g[(1, 2)] = k2;
        g[(2, 0)] = k1;
        g[(2, 1)] = -k2;
        g[(3, 5)] = -k1;
        g[(4, 5)] = k2;
        g[(5, 3)] = -k1;
        g[(5, 4)] = -k2;
        g
    }
}

/// The six scalars of the travelling-wave solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub eta: f64,
}

fn check_zt(zt: f64) -> Result<()> {
    if !(zt >= 0.0 && zt.is_finite()) {
        return Err(invalid(format!("zeta*t must be finite and >= 0, got {zt}")));
    }
    Ok(())
}

pub fn coefficient_set(params: &AsymParams, zt: f64) -> Result<CoefficientSet> {
    check_zt(zt)?;
    let (k1, k2) = (params.kappa1, params.kappa2);
    let z2 = params.zeta_sq();
    let (c, s) = (zt.cosh(), zt.sinh());
    let sinh_scale = match params.mode {
        CoefficientMode::Canonical => params.zeta(),
        CoefficientMode::PaperLiteral => z2,
    };
    Ok(CoefficientSet {
        alpha: (k1 * k1 * c - k2 * k2) / z2,
        beta: k1 * k2 * (c - 1.0) / z2,
        gamma: k1 * s / sinh_scale,
        delta: (k1 * k1 - k2 * k2 * c) / z2,
        epsilon: k2 * s / sinh_scale,
        eta: c,
    })
}

/// Quadrature map from inputs at `t = 0` to outputs at `ζt = zt`.
pub fn tw_transform(params: &AsymParams, zt: f64) -> Result<QuadratureMap> {
    let CoefficientSet { alpha: a, beta: b, gamma: g, delta: d, epsilon: e, eta: h } = coefficient_set(params, zt)?;
    let mode2_third = match params.mode {
        CoefficientMode::Canonical => e,
        CoefficientMode::PaperLiteral => g,
    };
    let m_x = DMatrix::from_row_slice(3, 3, &[a, -b, g, b, d, mode2_third, g, -e, h]);
    let m_y = DMatrix::from_row_slice(3, 3, &[a, b, -g, -b, d, mode2_third, -g, -e, h]);
    QuadratureMap::from_blocks(&m_x, &m_y)
}

/// Output covariance `M Mᵀ` for vacuum inputs. Available in both coefficient
/// modes; see [`tw_state`] for the checked physical state.
pub fn tw_covariance(params: &AsymParams, zt: f64) -> Result<Covariance> {
    let vacuum = GaussianState::vacuum(3)?;
    vacuum.covariance().transform(&tw_transform(params, zt)?)
}

/// Output state for vacuum inputs. Fails with `Unphysical` in paper-literal
/// mode whenever that covariance violates the uncertainty bound.
pub fn tw_state(params: &AsymParams, zt: f64) -> Result<GaussianState> {
    GaussianState::new(tw_covariance(params, zt)?)
}

/// Second moments tabulated from the coefficients. In paper-literal mode this
/// is the printed table verbatim; in canonical mode the mode-2 entries carry
/// `ε` where the printed table has `γ`.
pub fn moment_table(coeffs: &CoefficientSet, mode: CoefficientMode) -> Covariance {
    let CoefficientSet { alpha: a, beta: b, gamma: g, delta: d, epsilon: e, eta: h } = *coeffs;
    let m2 = match mode {
        CoefficientMode::Canonical => e,
        CoefficientMode::PaperLiteral => g,
    };
    let v1 = a * a + b * b + g * g;
    let v2 = b * b + d * d + m2 * m2;
    let v3 = g * g + e * e + h * h;
    let x12 = a * b - b * d + g * m2;
    let x13 = a * g + b * e + g * h;
    let x23 = g * b - d * e + m2 * h;
    let y12 = -a * b + b * d - g * m2;
    let y13 = -a * g - b * e - g * h;
    let y23 = b * g - d * e + m2 * h;
    let mut m = DMatrix::zeros(6, 6);
    let x = [[v1, x12, x13], [x12, v2, x23], [x13, x23, v3]];
    let y = [[v1, y12, y13], [y12, v2, y23], [y13, y23, v3]];
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = x[i][j];
            m[(3 + i, 3 + j)] = y[i][j];
        }
    }
    Covariance::from_symmetric_unchecked(m)
}

/// Reid products `(Π₁|₃, Π₃|₁)`: mode 0 steered by mode 2, and mode 2
/// steered by mode 0.
pub fn tw_steering(params: &AsymParams, zt: f64) -> Result<(f64, f64)> {
    let cov = tw_covariance(params, zt)?;
    Ok((reid_product(&cov, 0, 2)?.value, reid_product(&cov, 2, 0)?.value))
}

/// Grid step used to bracket key-rate roots.
pub const WINDOW_SCAN_STEP: f64 = 1e-3;
/// Absolute tolerance of the bisected window edges.
pub const WINDOW_ROOT_TOL: f64 = 1e-6;
pub const DEFAULT_ZT_MAX: f64 = 4.0;

/// Contiguous `ζt` interval with positive key rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyWindow {
    pub lo: f64,
    pub hi: f64,
    /// False when the rate is still positive at the end of the scanned range,
    /// so `hi` is the scan limit rather than a root.
    pub closed: bool,
}

impl KeyWindow {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Key rate as a function of `ζt` for `steered` inferred from `steerer`.
pub fn key_rate_at(params: &AsymParams, steered: usize, steerer: usize, zt: f64) -> Result<f64> {
    let cov = tw_covariance(params, zt)?;
    Ok(key_rate(reid_product(&cov, steered, steerer)?.value)?.value)
}

/// Widest `ζt` window in `[0, zt_max]` where the key rate for the directed
/// pair is positive, or `None` when there is none.
pub fn key_window(params: &AsymParams, steered: usize, steerer: usize, zt_max: f64) -> Result<Option<KeyWindow>> {
    if !matches!((steered, steerer), (0, 2) | (2, 0)) {
        return Err(invalid(format!("key windows are defined for modes 0 and 2, got ({steered}, {steerer})")));
    }
    if !(zt_max > 0.0 && zt_max.is_finite()) {
        return Err(invalid(format!("zt_max must be positive, got {zt_max}")));
    }
    // Reid products of these covariances are positive and finite on any
    // finite range; the unwrap_or keeps the closure total.
    let k = |zt: f64| key_rate_at(params, steered, steerer, zt).unwrap_or(f64::NEG_INFINITY);
    let steps = (zt_max / WINDOW_SCAN_STEP).round().max(2.0) as usize;
    let brackets = bracket_roots(k, 0.0, zt_max, steps)?;
    let mut edges = Vec::with_capacity(brackets.len());
    for b in brackets {
        edges.push(bisect(k, b, WINDOW_ROOT_TOL)?);
    }
    let mut windows = Vec::new();
    let mut open: Option<f64> = if k(0.0) > 0.0 { Some(0.0) } else { None };
    for edge in edges {
        match open.take() {
            Some(lo) => windows.push(KeyWindow { lo, hi: edge, closed: true }),
            None => open = Some(edge),
        }
    }
    if let Some(lo) = open {
        windows.push(KeyWindow { lo, hi: zt_max, closed: false });
    }
    Ok(windows.into_iter().fold(None, |best: Option<KeyWindow>, w| match best {
        Some(b) if b.width() >= w.width() => Some(b),
        _ => Some(w),
    }))
}
