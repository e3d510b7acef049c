//! Intracavity version of the asymmetric scheme, below threshold.
//!
//! With an undepleted intracavity pump of amplitude `ε/γ₀` the signal
//! fluctuations obey the linear Ornstein–Uhlenbeck equations
//! `dx = A x dt + √(2Γ) dW`, separately for the X and Y quadratures, with
//! `g_i = κ_i ε / γ₀`:
//!
//! ```text
//! A_X = [[-γ₁, 0, g₁], [0, -γ₂, g₂], [g₁, -g₂, -γ₃]]
//! A_Y = [[-γ₁, 0, -g₁], [0, -γ₂, g₂], [-g₁, -g₂, -γ₃]]
//! ```
//!
//! `det A_X = det A_Y = γ₂g₁² − γ₁g₂² − γ₁γ₂γ₃`, which vanishes exactly at the
//! critical pump returned by [`critical_pump`].
//!
//! Output fields follow from the input–output relation
//! `x_out = √(2Γ) x − x_in`, giving the transfer matrix
//! `M(ω) = √(2Γ)(−iω − A)⁻¹√(2Γ) − I` and the vacuum-normalized output
//! spectral matrix `S(ω) = M(ω) M(ω)†`.

use nalgebra::{Complex, DMatrix, Matrix3};
use rayon::prelude::*;

use crate::criteria::{
    directed_key_rate, duan_simon, key_rate, reid_product, vlf_pair, vlf_trio, CriterionResult,
};
use crate::error::{invalid, Error, Result};
use crate::gaussian::Covariance;

type C64 = Complex<f64>;

/// Ordered `(steered, steerer)` pairs of three modes.
pub const ORDERED_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

pub const DEFAULT_OMEGA_MIN: f64 = -6.0;
pub const DEFAULT_OMEGA_MAX: f64 = 6.0;
pub const DEFAULT_OMEGA_POINTS: usize = 481;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Decay rates `[γ₀, γ₁, γ₂, γ₃]`; `γ₀` belongs to the pump mode.
    pub gamma: [f64; 4],
    pub kappa1: f64,
    pub kappa2: f64,
    /// Pump amplitude `ε` in absolute units.
    pub pump: f64,
}

impl CavityParams {
    /// `γ₀ = γ₁ = γ₃ = 1`, `γ₂ = 3`, `κ₁ = 0.01`, `κ₂ = 0.6 κ₁`, no pump.
    pub fn reference() -> Self {
        CavityParams {
            gamma: [1.0, 1.0, 3.0, 1.0],
            kappa1: 0.01,
            kappa2: 0.006,
            pump: 0.0,
        }
    }

    /// Same parameters with `ε = frac · ε_c`.
    pub fn with_pump_fraction(self, frac: f64) -> Result<Self> {
        if !(frac >= 0.0 && frac.is_finite()) {
            return Err(invalid(format!("pump fraction must be finite and >= 0, got {frac}")));
        }
        Ok(CavityParams {
            pump: frac * critical_pump(&self)?,
            ..self
        })
    }

    fn validate(&self) -> Result<()> {
        if self.gamma.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(invalid(format!("decay rates must be positive, got {:?}", self.gamma)));
        }
        if !(self.kappa1.is_finite() && self.kappa2.is_finite() && self.pump.is_finite() && self.pump >= 0.0) {
            return Err(invalid("couplings and pump must be finite, pump >= 0"));
        }
        Ok(())
    }
}

/// Oscillation threshold `ε_c = γ₀√(γ₁γ₂γ₃) / √(κ₁²γ₂ − κ₂²γ₁)`.
pub fn critical_pump(params: &CavityParams) -> Result<f64> {
    params.validate()?;
    let [g0, g1, g2, g3] = params.gamma;
    let denom = params.kappa1.powi(2) * g2 - params.kappa2.powi(2) * g1;
    if !(denom > 0.0) {
        return Err(Error::NoThreshold(denom));
    }
    Ok(g0 * (g1 * g2 * g3).sqrt() / denom.sqrt())
}

/// Linearized drift and input coupling of the signal modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CavitySystem {
    pub drift_x: Matrix3<f64>,
    pub drift_y: Matrix3<f64>,
    /// `√(2Γ)`, `Γ = diag(γ₁, γ₂, γ₃)`.
    pub noise_in: Matrix3<f64>,
    pub epsilon_c: f64,
    pub pump: f64,
}

pub fn build_system(params: &CavityParams) -> Result<CavitySystem> {
    let epsilon_c = critical_pump(params)?;
    let [g0, g1, g2, g3] = params.gamma;
    let p1 = params.kappa1 * params.pump / g0;
    let p2 = params.kappa2 * params.pump / g0;
    #[rustfmt::skip]
    let drift_x = Matrix3::new(
        -g1, 0.0, p1,
        0.0, -g2, p2,
        p1, -p2, -g3,
    );
    #[rustfmt::skip]
    let drift_y = Matrix3::new(
        -g1, 0.0, -p1,
        0.0, -g2, p2,
        -p1, -p2, -g3,
    );
    let noise_in = Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0 * g1, 2.0 * g2, 2.0 * g3).map(f64::sqrt));
    Ok(CavitySystem {
        drift_x,
        drift_y,
        noise_in,
        epsilon_c,
        pump: params.pump,
    })
}

fn lyapunov(a: &Matrix3<f64>, d: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    // (I ⊗ A + A ⊗ I) vec(V) = -vec(D), column-major vec
    let a = DMatrix::from_column_slice(3, 3, a.as_slice());
    let id = DMatrix::<f64>::identity(3, 3);
    let k = id.kronecker(&a) + a.kronecker(&id);
    let rhs = -nalgebra::DVector::from_column_slice(d.as_slice());
    let v = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("Lyapunov operator is singular".into()))?;
    let v = Matrix3::from_column_slice(v.as_slice());
    Ok((v + v.transpose()) * 0.5)
}

impl CavitySystem {
    pub fn pump_fraction(&self) -> f64 {
        self.pump / self.epsilon_c
    }

    pub fn is_below_threshold(&self) -> bool {
        self.pump < self.epsilon_c
    }

    /// Largest real part among the eigenvalues of both drift blocks.
    pub fn max_drift_real_part(&self) -> f64 {
        [self.drift_x, self.drift_y]
            .iter()
            .flat_map(|a| a.complex_eigenvalues().iter().map(|z| z.re).collect::<Vec<_>>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn require_below_threshold(&self) -> Result<()> {
        if !self.is_below_threshold() {
            return Err(Error::AboveThreshold {
                pump: self.pump,
                critical: self.epsilon_c,
            });
        }
        Ok(())
    }

    /// Stationary intracavity covariances `(V_X, V_Y)` solving
    /// `A V + V Aᵀ + 2Γ = 0`.
    pub fn stationary_covariance(&self) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
        self.require_below_threshold()?;
        let diffusion = self.noise_in * self.noise_in;
        Ok((lyapunov(&self.drift_x, &diffusion)?, lyapunov(&self.drift_y, &diffusion)?))
    }

    fn resolvent(&self, drift: &Matrix3<f64>, omega: f64) -> Result<Matrix3<C64>> {
        let m = Matrix3::<C64>::from_diagonal_element(C64::new(0.0, -omega)) - drift.map(C64::from);
        m.try_inverse()
            .ok_or_else(|| Error::Degenerate(format!("(-iω - A) singular at ω = {omega}")))
    }

    /// `M(ω) = √(2Γ)(−iω − A)⁻¹√(2Γ) − I` for one quadrature block.
    pub fn transfer(&self, drift: &Matrix3<f64>, omega: f64) -> Result<Matrix3<C64>> {
        let b = self.noise_in.map(C64::from);
        Ok(b * self.resolvent(drift, omega)? * b - Matrix3::identity())
    }

    /// Intracavity spectral block `(−iω − A)⁻¹ 2Γ (iω − Aᵀ)⁻¹`.
    pub fn intracavity_block(&self, drift: &Matrix3<f64>, omega: f64) -> Result<Matrix3<C64>> {
        let r = self.resolvent(drift, omega)?;
        let d = (self.noise_in * self.noise_in).map(C64::from);
        Ok(r * d * r.adjoint())
    }
}

/// 6×6 complex Hermitian spectral matrix in X-block/Y-block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    pub omega: f64,
    mat: DMatrix<C64>,
}

impl SpectralMatrix {
    fn from_blocks(omega: f64, x: &Matrix3<C64>, y: &Matrix3<C64>) -> Self {
        let mut mat = DMatrix::zeros(6, 6);
        mat.view_mut((0, 0), (3, 3)).copy_from(x);
        mat.view_mut((3, 3), (3, 3)).copy_from(y);
        SpectralMatrix { omega, mat }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// `Re S(ω)`, the symmetric real matrix that gives `cᵀ S c` for every
    /// real weight vector `c`. Used as the covariance input to the criteria.
    pub fn covariance(&self) -> Result<Covariance> {
        Covariance::new(self.mat.map(|z| z.re))
    }
}

/// Output spectral matrix at frequency `omega` (units of γ₁).
pub fn output_spectrum(system: &CavitySystem, omega: f64) -> Result<SpectralMatrix> {
    system.require_below_threshold()?;
    let mx = system.transfer(&system.drift_x, omega)?;
    let my = system.transfer(&system.drift_y, omega)?;
    Ok(SpectralMatrix::from_blocks(omega, &(mx * mx.adjoint()), &(my * my.adjoint())))
}

/// Intracavity spectral matrix at frequency `omega`.
pub fn intracavity_spectrum(system: &CavitySystem, omega: f64) -> Result<SpectralMatrix> {
    system.require_below_threshold()?;
    Ok(SpectralMatrix::from_blocks(
        omega,
        &system.intracavity_block(&system.drift_x, omega)?,
        &system.intracavity_block(&system.drift_y, omega)?,
    ))
}

/// Reid products and key rates for every ordered pair, then Duan–Simon for
/// each unordered pair, then the pairwise and trio van Loock–Furusawa sums.
pub fn spectral_criteria(system: &CavitySystem, omega: f64) -> Result<Vec<CriterionResult>> {
    let cov = output_spectrum(system, omega)?.covariance()?;
    let mut out = Vec::with_capacity(26);
    for (s, t) in ORDERED_PAIRS {
        let reid = reid_product(&cov, s, t)?;
        out.push(directed_key_rate(&reid)?);
        out.push(reid);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (p, m) = duan_simon(&cov, i, j)?;
        out.push(p);
        out.push(m);
    }
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        out.push(vlf_pair(&cov, i, j, k)?);
    }
    for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
        out.push(vlf_trio(&cov, i, j, k)?);
    }
    Ok(out)
}

/// Reid products for all ordered pairs at one frequency, in
/// [`ORDERED_PAIRS`] order.
pub fn reid_products_at(system: &CavitySystem, omega: f64) -> Result<[f64; 6]> {
    let cov = output_spectrum(system, omega)?.covariance()?;
    let mut out = [0.0; 6];
    for (slot, (s, t)) in out.iter_mut().zip(ORDERED_PAIRS) {
        *slot = reid_product(&cov, s, t)?.value;
    }
    Ok(out)
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn default_omega_grid() -> Vec<f64> {
    linspace(DEFAULT_OMEGA_MIN, DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_POINTS)
}

/// Best-over-ω values for one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairExtremum {
    pub steered: usize,
    pub steerer: usize,
    pub min_reid: f64,
    pub omega_at_min: f64,
    /// Key rate at `min_reid`, the largest over the grid.
    pub max_key: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpRow {
    pub eps_frac: f64,
    /// One entry per ordered pair, in [`ORDERED_PAIRS`] order.
    pub pairs: Vec<PairExtremum>,
}

impl PumpRow {
    pub fn pair(&self, steered: usize, steerer: usize) -> Option<&PairExtremum> {
        self.pairs.iter().find(|p| p.steered == steered && p.steerer == steerer)
    }
}

/// Extremal-over-`omegas` steering and key-rate values for each pump
/// fraction, rows in the order of `eps_fracs`.
pub fn pump_sweep(params: &CavityParams, eps_fracs: &[f64], omegas: &[f64]) -> Result<Vec<PumpRow>> {
    if omegas.is_empty() {
        return Err(invalid("frequency grid is empty"));
    }
    if let Some(f) = eps_fracs.iter().find(|f| !(**f >= 0.0 && **f < 1.0)) {
        return Err(invalid(format!("pump fractions must lie in [0, 1), got {f}")));
    }
    eps_fracs
        .par_iter()
        .map(|&frac| {
            let system = build_system(&params.with_pump_fraction(frac)?)?;
            let mut best = [(f64::INFINITY, 0.0); 6];
            for &omega in omegas {
                for (slot, value) in best.iter_mut().zip(reid_products_at(&system, omega)?) {
                    if value < slot.0 {
                        *slot = (value, omega);
                    }
                }
            }
            let pairs = ORDERED_PAIRS
                .iter()
                .zip(best)
                .map(|(&(steered, steerer), (min_reid, omega_at_min))| {
                    Ok(PairExtremum {
                        steered,
                        steerer,
                        min_reid,
                        omega_at_min,
                        max_key: key_rate(min_reid)?.value,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PumpRow { eps_frac: frac, pairs })
        })
        .collect()
}
