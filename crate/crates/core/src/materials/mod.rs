//! Integration-point constitutive updates.
//!
//! Concrete is a plane-stress fixed smeared-crack model with a Hognestad
//! parabola in compression. Steel is uniaxial bilinear with isotropic
//! hardening. Both are pure functions of (strain, committed state, params),
//! so they can be evaluated in any order or in parallel.

mod concrete;
mod steel;

pub use concrete::{
    concrete_update, hognestad, tension_law, ConcreteParams, ConcretePointState, ConcreteResponse,
    CRUSHED_STIFFNESS_RATIO, DEFAULT_SHEAR_RETENTION, DEFAULT_SOFTENING_RATIO,
};
pub use steel::{steel_response, steel_update, SteelParams, SteelPointState, SteelResponse};

/// Engineering-strain rotation matrix into axes at angle `phi` from global x.
///
/// Maps `[exx, eyy, gxy]` to `[e11, e22, g12]`. Its transpose maps local
/// stresses back to global ones.
pub(crate) fn strain_rotation(phi: f64) -> [[f64; 3]; 3] {
    let (s, c) = phi.sin_cos();
    [
        [c * c, s * s, c * s],
        [s * s, c * c, -c * s],
        [-2.0 * c * s, 2.0 * c * s, c * c - s * s],
    ]
}

/// `T^T D T` for 3x3 matrices.
pub(crate) fn congruence(t: &[[f64; 3]; 3], d: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut dt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            dt[i][j] = (0..3).map(|k| d[i][k] * t[k][j]).sum();
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| t[k][i] * dt[k][j]).sum();
        }
    }
    out
}
