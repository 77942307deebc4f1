use crate::error::{Error, Result};
use crate::vec3::{norm, Vec3};

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Electron gyromagnetic ratio, rad/(s·T).
pub const DEFAULT_GAMMA: f64 = 1.760_859_630e11;

/// Single-material parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Exchange stiffness, J/m.
    pub a_ex: f64,
    /// Uniaxial anisotropy constant, J/m³.
    pub ku: f64,
    /// Saturation magnetization, A/m.
    pub ms: f64,
    /// Gilbert damping.
    pub alpha: f64,
    /// Gyromagnetic ratio, rad/(s·T).
    pub gamma: f64,
    /// Unit easy axis.
    pub easy_axis: Vec3,
}

impl MaterialParams {
    pub fn new(
        a_ex: f64,
        ku: f64,
        ms: f64,
        alpha: f64,
        gamma: f64,
        easy_axis: Vec3,
    ) -> Result<Self> {
        let p = Self {
            a_ex,
            ku,
            ms,
            alpha,
            gamma,
            easy_axis,
        };
        p.validate()?;
        Ok(p)
    }

    /// Permalloy-like defaults: A = 13 pJ/m, Ms = 800 kA/m, no anisotropy, α = 0.5.
    pub fn permalloy() -> Self {
        Self {
            a_ex: 1.3e-11,
            ku: 0.0,
            ms: 8.0e5,
            alpha: 0.5,
            gamma: DEFAULT_GAMMA,
            easy_axis: [0.0, 0.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMaterial(msg));
        if !(self.ms.is_finite() && self.ms > 0.0) {
            return bad(format!("Ms must be > 0, got {}", self.ms));
        }
        if !(self.a_ex.is_finite() && self.a_ex >= 0.0) {
            return bad(format!("A must be >= 0, got {}", self.a_ex));
        }
        if !self.ku.is_finite() {
            return bad(format!("Ku must be finite, got {}", self.ku));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!("gamma must be > 0, got {}", self.gamma));
        }
        if (norm(self.easy_axis) - 1.0).abs() > 1e-12 {
            return bad(format!(
                "easy axis must be a unit vector, got {:?}",
                self.easy_axis
            ));
        }
        Ok(())
    }

    /// `sqrt(2A / (μ0 Ms²))`, meters.
    pub fn exchange_length(&self) -> f64 {
        (2.0 * self.a_ex / (MU0 * self.ms * self.ms)).sqrt()
    }

    /// Magnetostatic energy density `½ μ0 Ms²`, J/m³.
    pub fn km(&self) -> f64 {
        0.5 * MU0 * self.ms * self.ms
    }
}
