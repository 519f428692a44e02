use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Bilinear steel with isotropic hardening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteelParams {
    /// Young's modulus, MPa.
    pub e: f64,
    /// Initial yield stress, MPa.
    pub fy: f64,
    /// Plastic hardening modulus, MPa. The post-yield tangent is `E*H/(E+H)`.
    pub h: f64,
}

impl SteelParams {
    pub fn new(e: f64, fy: f64, h: f64) -> Result<Self> {
        let p = Self { e, fy, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(&[self.e, self.fy, self.h], "steel parameter")?;
        if self.e <= 0.0 || self.fy <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "steel requires E > 0 and fy > 0 (E = {}, fy = {})",
                self.e, self.fy
            )));
        }
        if self.h < 0.0 || self.h >= self.e {
            return Err(Error::InvalidInput(format!(
                "steel hardening modulus must satisfy 0 <= H < E (H = {})",
                self.h
            )));
        }
        Ok(())
    }

    pub fn yield_strain(&self) -> f64 {
        self.fy / self.e
    }
}

/// Committed history of one uniaxial steel point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SteelPointState {
    /// Total strain at the last commit.
    pub strain: f64,
    /// Signed plastic strain.
    pub plastic_strain: f64,
    /// Equivalent (accumulated) plastic strain, never decreasing.
    pub equivalent_plastic_strain: f64,
}

impl SteelPointState {
    pub fn yield_stress(&self, p: &SteelParams) -> f64 {
        p.fy + p.h * self.equivalent_plastic_strain
    }

    pub fn has_yielded(&self) -> bool {
        self.equivalent_plastic_strain > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteelResponse {
    pub stress: f64,
    pub tangent: f64,
    pub state: SteelPointState,
    /// True when this update was on the yield surface.
    pub plastic: bool,
}

/// Radial return from the committed state for a strain increment.
pub fn steel_update(
    strain_increment: f64,
    state: &SteelPointState,
    params: &SteelParams,
) -> Result<SteelResponse> {
    ensure_finite(&[strain_increment], "steel strain increment")?;
    Ok(steel_response(state.strain + strain_increment, state, params))
}

/// Same as [`steel_update`] but driven by total strain. Callers are expected
/// to pass finite strain.
pub fn steel_response(strain: f64, state: &SteelPointState, p: &SteelParams) -> SteelResponse {
    let trial = p.e * (strain - state.plastic_strain);
    let f = trial.abs() - state.yield_stress(p);
    if f <= 0.0 {
        return SteelResponse {
            stress: trial,
            tangent: p.e,
            state: SteelPointState { strain, ..*state },
            plastic: false,
        };
    }
    let dgamma = f / (p.e + p.h);
    let sign = trial.signum();
    SteelResponse {
        stress: trial - p.e * dgamma * sign,
        tangent: p.e * p.h / (p.e + p.h),
        state: SteelPointState {
            strain,
            plastic_strain: state.plastic_strain + dgamma * sign,
            equivalent_plastic_strain: state.equivalent_plastic_strain + dgamma,
        },
        plastic: true,
    }
}
