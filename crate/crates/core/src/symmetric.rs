//! Three squeezed inputs mixed on two beamsplitters.
//!
//! Input 0 is squeezed in Y, inputs 1 and 2 in X. The first splitter
//! (reflectivity `mu`) mixes inputs 0 and 1 into output `b1` and an internal
//! beam `b0`; the second (reflectivity `nu`) mixes `b0` with input 2 into
//! outputs `b2` and `b3`:
//!
//! ```text
//! b1 = √(1-μ) a1 + √μ a2
//! b2 = √(μ(1-ν)) a1 − √((1-μ)(1-ν)) a2 + √ν a3
//! b3 = √(μν) a1 − √(ν(1-μ)) a2 − √(1-ν) a3
//! ```
//!
//! At `μ = 2/3`, `ν = 1/2` the output is fully symmetric under mode exchange.

use crate::criteria::{duan_simon, inferred_variance, reid_product, vlf_pair, vlf_trio};
use crate::error::{invalid, Result};
use crate::gaussian::{
    beamsplitter_map, GaussianState, ModeSqueezing, Quadrature, QuadratureMap, Squeezed, SqueezingSpec,
};

pub const SYMMETRIC_MU: f64 = 2.0 / 3.0;
pub const SYMMETRIC_NU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricParams {
    pub r: f64,
    pub mu: f64,
    pub nu: f64,
}

impl SymmetricParams {
    /// The fully symmetric configuration at squeezing `r`.
    pub fn symmetric(r: f64) -> Self {
        SymmetricParams {
            r,
            mu: SYMMETRIC_MU,
            nu: SYMMETRIC_NU,
        }
    }

    pub fn is_fully_symmetric(&self) -> bool {
        self.mu == SYMMETRIC_MU && self.nu == SYMMETRIC_NU
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(invalid(format!("squeezing r must be finite and >= 0, got {}", self.r)));
        }
        for (name, v) in [("mu", self.mu), ("nu", self.nu)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

pub fn input_squeezing(r: f64) -> Result<SqueezingSpec> {
    SqueezingSpec::new(vec![
        ModeSqueezing { quadrature: Squeezed::Y, r },
        ModeSqueezing { quadrature: Squeezed::X, r },
        ModeSqueezing { quadrature: Squeezed::X, r },
    ])
}

/// The two-splitter network as a single quadrature map on `(a1, a2, a3)`.
/// Slot 1 carries `b0` between the splitters and `b2` afterwards.
pub fn network_map(mu: f64, nu: f64) -> Result<QuadratureMap> {
    beamsplitter_map(3, 0, 1, mu)?.then(&beamsplitter_map(3, 1, 2, nu)?)
}

pub fn build_symmetric_state(params: &SymmetricParams) -> Result<GaussianState> {
    params.validate()?;
    GaussianState::squeezed(&input_squeezing(params.r)?)?.apply(&network_map(params.mu, params.nu)?)
}

/// Printed closed forms for the fully symmetric output at squeezing `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub ds_plus: f64,
    pub ds_minus: f64,
    /// `V_inf(X_i | X_j)`; the Y counterpart is its reciprocal.
    pub v_inf: f64,
    pub reid_product: f64,
    pub v_ij: f64,
    pub v_ijk: f64,
}

pub fn closed_forms(r: f64) -> Result<ClosedForms> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("squeezing r must be finite and >= 0, got {r}")));
    }
    let (ch, sh) = (r.cosh(), r.sinh());
    let v_inf = (3.0 * ch + sh) / (2.0 + (2.0 * r).exp());
    Ok(ClosedForms {
        ds_plus: 4.0 * ch + 8.0 / 3.0 * sh,
        ds_minus: 4.0 * ch - 8.0 / 3.0 * sh,
        v_inf,
        reid_product: v_inf * v_inf.recip(),
        v_ij: (2.0 + 10.0 * (2.0 * r).exp()) / (r.exp() + 2.0 * (3.0 * r).exp()),
        v_ijk: 4.0 * (ch - 2.0 * std::f64::consts::SQRT_2 / 3.0 * sh),
    })
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
const TRIOS: [(usize, usize, usize); 6] = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)];

/// Largest absolute gap, over `r_grid`, every ordered pair and every mode
/// permutation, between criteria evaluated on the built state and the
/// closed forms.
pub fn verify_consistency(r_grid: &[f64]) -> Result<f64> {
    if r_grid.is_empty() {
        return Err(invalid("r grid is empty"));
    }
    let mut worst = 0.0f64;
    for &r in r_grid {
        let state = build_symmetric_state(&SymmetricParams::symmetric(r))?;
        let cf = closed_forms(r)?;
        let mut gap = |numeric: f64, closed: f64| worst = worst.max((numeric - closed).abs());
        for (i, j) in PAIRS {
            let (p, m) = duan_simon(&state, i, j)?;
            gap(p.value, cf.ds_plus);
            gap(m.value, cf.ds_minus);
            gap(inferred_variance(&state, Quadrature::X(i), Quadrature::X(j))?, cf.v_inf);
            gap(inferred_variance(&state, Quadrature::Y(i), Quadrature::Y(j))?, cf.v_inf.recip());
            gap(reid_product(&state, i, j)?.value, cf.reid_product);
        }
        for (i, j, k) in TRIOS {
            gap(vlf_pair(&state, i, j, k)?.value, cf.v_ij);
            gap(vlf_trio(&state, i, j, k)?.value, cf.v_ijk);
        }
    }
    Ok(worst)
}
