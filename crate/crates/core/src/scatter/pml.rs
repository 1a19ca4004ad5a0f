use crate::geometry::GAMMA_RADIUS;
use crate::{Error, Result, C64};

/// Cartesian PML around the square physical box [−L, L]².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PmlConfig {
    /// Half-width L of the physical region.
    pub box_halfwidth: f64,
    /// Thickness d of the absorbing layer.
    pub thickness: f64,
    /// Profile exponent m.
    pub exponent: u32,
    /// Design reflection coefficient R(0).
    pub r0: f64,
}

impl Default for PmlConfig {
    fn default() -> Self {
        PmlConfig { box_halfwidth: 2.2, thickness: 0.6, exponent: 3, r0: (-16.0f64).exp() }
    }
}

impl PmlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.box_halfwidth > GAMMA_RADIUS) {
            return Err(Error::Scatter(format!(
                "box half-width {} must exceed the radius {GAMMA_RADIUS} of Γ",
                self.box_halfwidth
            )));
        }
        if !(self.thickness > 0.0) {
            return Err(Error::Scatter(format!("PML thickness must be positive, got {}", self.thickness)));
        }
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return Err(Error::Scatter(format!("R(0) must lie in (0, 1), got {}", self.r0)));
        }
        Ok(())
    }

    /// σ_max = −(m+1) ln R(0) / (2d).
    pub fn sigma_max(&self) -> f64 {
        -(self.exponent as f64 + 1.0) * self.r0.ln() / (2.0 * self.thickness)
    }

    /// Absorption σ(l) = (l/d)^m σ_max at depth l past the physical box.
    pub fn sigma(&self, depth: f64) -> f64 {
        if depth <= 0.0 {
            0.0
        } else {
            (depth / self.thickness).powi(self.exponent as i32) * self.sigma_max()
        }
    }

    /// Stretch factors (S_x¹, S_x²) with S = 1 + iσ/κ, which damps the
    /// outgoing e^{iκr} waves selected by the radiation condition.
    pub fn stretch(&self, x: [f64; 2], kappa: f64) -> [C64; 2] {
        x.map(|c| {
            let s = self.sigma(c.abs() - self.box_halfwidth);
            C64::new(1.0, s / kappa)
        })
    }
}

pub fn pml_stretch(x: [f64; 2], cfg: &PmlConfig, kappa: f64) -> [C64; 2] {
    cfg.stretch(x, kappa)
}
