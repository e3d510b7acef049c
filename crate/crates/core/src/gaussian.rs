//! Zero-mean Gaussian states and linear quadrature maps.
//!
//! A zero-mean Gaussian state is fully described by its covariance matrix.
//! [`Covariance`] only enforces symmetry; [`GaussianState`] additionally
//! enforces the uncertainty bound `V + iΩ ≥ 0`. The split exists because some
//! covariance-like objects evaluated by the criteria (output spectral matrices,
//! compatibility forms of printed solutions) are not states.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Relative tolerance for the symmetry check of covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Default tolerance for [`QuadratureMap::is_symplectic`].
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Slack allowed on the smallest eigenvalue of `V + iΩ`.
pub const UNCERTAINTY_SLACK: f64 = 1e-9;

/// A single quadrature of a given mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X(usize),
    Y(usize),
}

impl Quadrature {
    pub fn mode(self) -> usize {
        match self {
            Quadrature::X(m) | Quadrature::Y(m) => m,
        }
    }

    /// Row/column of this quadrature in an `n_modes` covariance matrix.
    pub fn index(self, n_modes: usize) -> usize {
        match self {
            Quadrature::X(m) => m,
            Quadrature::Y(m) => n_modes + m,
        }
    }

    /// The conjugate quadrature of the same mode.
    pub fn conjugate(self) -> Quadrature {
        match self {
            Quadrature::X(m) => Quadrature::Y(m),
            Quadrature::Y(m) => Quadrature::X(m),
        }
    }
}

/// Symplectic form for the X-block/Y-block layout, `Ω = [[0, I], [-I, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(m, n_modes + m)] = 1.0;
        omega[(n_modes + m, m)] = -1.0;
    }
    omega
}

fn modes_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(invalid(format!(
            "quadrature matrices must have positive even dimension, got {dim}"
        )));
    }
    Ok(dim / 2)
}

fn symmetrized(mat: &DMatrix<f64>) -> DMatrix<f64> {
    (mat + mat.transpose()) * 0.5
}

/// Real symmetric `2N × 2N` quadrature covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    n_modes: usize,
    mat: DMatrix<f64>,
}

impl Covariance {
    /// Wraps `mat`, checking that it is square, of even dimension and
    /// symmetric to within [`SYMMETRY_TOL`] relative to its largest entry.
    /// The stored matrix is exactly symmetrized.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(invalid(format!(
                "covariance must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let n_modes = modes_for_dim(mat.nrows())?;
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(invalid("covariance has non-finite entries"));
        }
        let scale = mat.amax().max(1.0);
        let asym = (&mat - mat.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(invalid(format!("covariance is not symmetric (defect {asym:.3e})")));
        }
        Ok(Covariance {
            n_modes,
            mat: symmetrized(&mat),
        })
    }

    pub(crate) fn from_symmetric_unchecked(mat: DMatrix<f64>) -> Self {
        let n_modes = mat.nrows() / 2;
        Covariance { n_modes, mat }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(invalid(format!(
                "mode {mode} out of range for a {}-mode state",
                self.n_modes
            )));
        }
        Ok(())
    }

    pub fn variance(&self, q: Quadrature) -> f64 {
        let i = q.index(self.n_modes);
        self.mat[(i, i)]
    }

    /// Symmetrized covariance `V(a, b)` of two quadratures.
    pub fn covariance(&self, a: Quadrature, b: Quadrature) -> f64 {
        self.mat[(a.index(self.n_modes), b.index(self.n_modes))]
    }

    /// Variance of the linear combination `cᵀ x`, i.e. `cᵀ V c`.
    pub fn combo_variance(&self, coefficients: &[f64]) -> Result<f64> {
        let dim = 2 * self.n_modes;
        if coefficients.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coefficients.len(),
            });
        }
        let c = DVector::from_column_slice(coefficients);
        Ok((c.transpose() * &self.mat * &c)[(0, 0)])
    }

    /// Congruence `M V Mᵀ`. No physicality check is made on the result.
    pub fn transform(&self, map: &QuadratureMap) -> Result<Covariance> {
        if map.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n_modes,
                found: 2 * map.n_modes,
            });
        }
        let out = &map.mat * &self.mat * map.mat.transpose();
        Ok(Covariance::from_symmetric_unchecked(symmetrized(&out)))
    }

    /// Smallest eigenvalue of the Hermitian matrix `V + iΩ`.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        let dim = 2 * self.n_modes;
        let h = DMatrix::from_fn(dim, dim, |i, j| Complex::new(self.mat[(i, j)], omega[(i, j)]));
        h.symmetric_eigenvalues().min()
    }

    /// True when `V + iΩ ≥ -UNCERTAINTY_SLACK`.
    pub fn satisfies_uncertainty(&self) -> bool {
        self.min_uncertainty_eigenvalue() >= -UNCERTAINTY_SLACK
    }

    pub fn determinant(&self) -> f64 {
        self.mat.determinant()
    }

    /// Relabels modes: mode `perm[k]` of `self` becomes mode `k` of the result.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Covariance> {
        let n = self.n_modes;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(invalid(format!("{perm:?} is not a permutation of {n} modes")));
        }
        let src = |k: usize| if k < n { perm[k] } else { n + perm[k - n] };
        let mat = DMatrix::from_fn(2 * n, 2 * n, |i, j| self.mat[(src(i), src(j))]);
        Ok(Covariance::from_symmetric_unchecked(mat))
    }
}

impl AsRef<Covariance> for Covariance {
    fn as_ref(&self) -> &Covariance {
        self
    }
}

/// Zero-mean Gaussian state. The covariance is symmetric and satisfies the
/// uncertainty bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: Covariance,
}

impl GaussianState {
    pub fn new(cov: Covariance) -> Result<Self> {
        let min_eigenvalue = cov.min_uncertainty_eigenvalue();
        if min_eigenvalue < -UNCERTAINTY_SLACK {
            return Err(Error::Unphysical { min_eigenvalue });
        }
        Ok(GaussianState { cov })
    }

    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        GaussianState::new(Covariance::new(mat)?)
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("a state needs at least one mode"));
        }
        Ok(GaussianState {
            cov: Covariance::from_symmetric_unchecked(DMatrix::identity(2 * n_modes, 2 * n_modes)),
        })
    }

    /// Product of minimum-uncertainty squeezed single-mode states.
    pub fn squeezed(spec: &SqueezingSpec) -> Result<Self> {
        let n = spec.modes.len();
        if n == 0 {
            return Err(invalid("squeezing spec has no modes"));
        }
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        for (m, entry) in spec.modes.iter().enumerate() {
            let (vx, vy) = entry.variances();
            mat[(m, m)] = vx;
            mat[(n + m, n + m)] = vy;
        }
        Ok(GaussianState {
            cov: Covariance::from_symmetric_unchecked(mat),
        })
    }

    /// `M V Mᵀ`. Fails with [`Error::Unphysical`] when a non-symplectic map
    /// drives the result outside the set of states.
    pub fn apply(&self, map: &QuadratureMap) -> Result<GaussianState> {
        GaussianState::new(self.cov.transform(map)?)
    }

    pub fn n_modes(&self) -> usize {
        self.cov.n_modes
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    pub fn into_covariance(self) -> Covariance {
        self.cov
    }
}

impl AsRef<Covariance> for GaussianState {
    fn as_ref(&self) -> &Covariance {
        &self.cov
    }
}

pub fn vacuum_state(n_modes: usize) -> Result<GaussianState> {
    GaussianState::vacuum(n_modes)
}

pub fn squeezed_inputs(spec: &SqueezingSpec) -> Result<GaussianState> {
    GaussianState::squeezed(spec)
}

pub fn apply_map(state: &GaussianState, map: &QuadratureMap) -> Result<GaussianState> {
    state.apply(map)
}

pub fn combo_variance(state: &impl AsRef<Covariance>, coefficients: &[f64]) -> Result<f64> {
    state.as_ref().combo_variance(coefficients)
}

/// Which quadrature carries the reduced noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Squeezed {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSqueezing {
    pub quadrature: Squeezed,
    pub r: f64,
}

impl ModeSqueezing {
    /// `(V(X), V(Y))` for this minimum-uncertainty input.
    pub fn variances(&self) -> (f64, f64) {
        let (hi, lo) = (self.r.exp(), (-self.r).exp());
        match self.quadrature {
            Squeezed::X => (lo, hi),
            Squeezed::Y => (hi, lo),
        }
    }
}

/// Per-mode squeezing of a product of minimum-uncertainty inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingSpec {
    modes: Vec<ModeSqueezing>,
}

impl SqueezingSpec {
    pub fn new(modes: Vec<ModeSqueezing>) -> Result<Self> {
        if let Some(bad) = modes.iter().find(|m| !(m.r >= 0.0 && m.r.is_finite())) {
            return Err(invalid(format!("squeezing parameter must be finite and >= 0, got {}", bad.r)));
        }
        Ok(SqueezingSpec { modes })
    }

    pub fn modes(&self) -> &[ModeSqueezing] {
        &self.modes
    }
}

/// Real linear map on quadratures, `x ↦ M x`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMap {
    n_modes: usize,
    mat: DMatrix<f64>,
}

impl QuadratureMap {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(invalid("quadrature map must be square"));
        }
        let n_modes = modes_for_dim(mat.nrows())?;
        Ok(QuadratureMap { n_modes, mat })
    }

    pub fn identity(n_modes: usize) -> Self {
        QuadratureMap {
            n_modes,
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Block-diagonal map acting as `m_x` on X quadratures and `m_y` on Y.
    pub fn from_blocks(m_x: &DMatrix<f64>, m_y: &DMatrix<f64>) -> Result<Self> {
        let n = m_x.nrows();
        if !m_x.is_square() || m_y.shape() != (n, n) || n == 0 {
            return Err(invalid("X and Y blocks must be square and of equal size"));
        }
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        mat.view_mut((0, 0), (n, n)).copy_from(m_x);
        mat.view_mut((n, n), (n, n)).copy_from(m_y);
        Ok(QuadratureMap { n_modes: n, mat })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn x_block(&self) -> DMatrix<f64> {
        self.mat.view((0, 0), (self.n_modes, self.n_modes)).into_owned()
    }

    pub fn y_block(&self) -> DMatrix<f64> {
        let n = self.n_modes;
        self.mat.view((n, n), (n, n)).into_owned()
    }

    /// The map that applies `self` first and then `next`.
    pub fn then(&self, next: &QuadratureMap) -> Result<QuadratureMap> {
        if next.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n_modes,
                found: 2 * next.n_modes,
            });
        }
        Ok(QuadratureMap {
            n_modes: self.n_modes,
            mat: &next.mat * &self.mat,
        })
    }

    /// `‖M Ω Mᵀ − Ω‖_max`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        (&self.mat * &omega * self.mat.transpose() - omega).amax()
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.symplectic_defect() <= tol
    }
}

pub fn is_symplectic(map: &QuadratureMap, tol: f64) -> bool {
    map.is_symplectic(tol)
}

/// Lossless beamsplitter between `mode_a` and `mode_b` with power
/// reflectivity `reflectivity`:
///
/// ```text
/// a' = √(1-R) a + √R b
/// b' = √R a − √(1-R) b
/// ```
///
/// applied identically to X and Y. The map is a symmetric orthogonal matrix,
/// hence symplectic; at `R = 0` it leaves `a` alone and flips the sign of `b`.
pub fn beamsplitter_map(
    n_modes: usize,
    mode_a: usize,
    mode_b: usize,
    reflectivity: f64,
) -> Result<QuadratureMap> {
    if !(0.0..=1.0).contains(&reflectivity) {
        return Err(invalid(format!("reflectivity must lie in [0, 1], got {reflectivity}")));
    }
    if mode_a == mode_b {
        return Err(invalid("beamsplitter needs two distinct modes"));
    }
    if mode_a >= n_modes || mode_b >= n_modes {
        return Err(invalid(format!("beamsplitter modes out of range for {n_modes} modes")));
    }
    let t = (1.0 - reflectivity).sqrt();
    let r = reflectivity.sqrt();
    let mut block = DMatrix::identity(n_modes, n_modes);
    block[(mode_a, mode_a)] = t;
    block[(mode_a, mode_b)] = r;
    block[(mode_b, mode_a)] = r;
    block[(mode_b, mode_b)] = -t;
    QuadratureMap::from_blocks(&block, &block)
}
