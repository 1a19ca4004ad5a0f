use std::fmt;
use std::str::FromStr;

use crate::geometry::Region;
use crate::{Error, Result, C64};

/// Refractive index of the isotropic shell Ω∖D.
pub const SHELL_INDEX: f64 = 16.0;

/// (σ, n) of one region in ∇·(σ∇u) + κ²nu = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub sigma: f64,
    pub n: C64,
}

impl Coefficients {
    pub const VACUUM: Coefficients = Coefficients { sigma: 1.0, n: C64 { re: 1.0, im: 0.0 } };

    pub fn real(sigma: f64, n: f64) -> Self {
        Coefficients { sigma, n: C64::new(n, 0.0) }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.sigma > 0.0 && self.n.re > 0.0 && self.n.im >= 0.0) {
            return Err(Error::Scatter(format!(
                "{what}: need σ > 0, Re n > 0, Im n ≥ 0, got σ = {}, n = {}",
                self.sigma, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MediumMode {
    /// Sound-soft cavity: u = 0 on ∂D, nothing inside D.
    IdealizedDirichlet,
    /// Sound-hard cavity: ∂u/∂ν = 0 on ∂D, nothing inside D.
    IdealizedNeumann,
    /// Lossy layer (γτ⁻², α + βτ⁻²i).
    Lossy1,
    /// Lossy layer (γτ², ατ² + βτ²i).
    Lossy2,
    /// Arbitrary (σ, n) inside D.
    Penetrable,
}

impl MediumMode {
    pub fn is_idealized(self) -> bool {
        matches!(self, MediumMode::IdealizedDirichlet | MediumMode::IdealizedNeumann)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            MediumMode::IdealizedDirichlet => "idealized_dirichlet",
            MediumMode::IdealizedNeumann => "idealized_neumann",
            MediumMode::Lossy1 => "lossy1",
            MediumMode::Lossy2 => "lossy2",
            MediumMode::Penetrable => "penetrable",
        }
    }
}

impl fmt::Display for MediumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for MediumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            MediumMode::IdealizedDirichlet,
            MediumMode::IdealizedNeumann,
            MediumMode::Lossy1,
            MediumMode::Lossy2,
            MediumMode::Penetrable,
        ]
        .into_iter()
        .find(|m| m.keyword() == s.to_ascii_lowercase())
        .ok_or_else(|| Error::Scatter(format!("unknown medium mode '{s}'")))
    }
}

/// Parameters of the three-layer lossy configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossyParams {
    pub gamma: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Core Σ coefficients (σ_a, n_a).
    pub sigma_a: f64,
    pub n_a: f64,
}

impl Default for LossyParams {
    fn default() -> Self {
        LossyParams { gamma: 1.0, tau: 0.01, alpha: 1.0, beta: 0.3, sigma_a: 1.0, n_a: 12.0 }
    }
}

impl LossyParams {
    /// (σ_l, n_l) for lossy1.
    pub fn layer1(&self) -> Coefficients {
        let t2 = self.tau * self.tau;
        Coefficients { sigma: self.gamma / t2, n: C64::new(self.alpha, self.beta / t2) }
    }

    /// (σ_l, n_l) for lossy2.
    pub fn layer2(&self) -> Coefficients {
        let t2 = self.tau * self.tau;
        Coefficients { sigma: self.gamma * t2, n: C64::new(self.alpha * t2, self.beta * t2) }
    }

    fn validate(&self) -> Result<()> {
        let p = [self.gamma, self.tau, self.alpha, self.beta, self.sigma_a, self.n_a];
        if p.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Scatter(format!("lossy parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Coefficients per region plus the treatment of the cavity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumSpec {
    pub mode: MediumMode,
    pub core: Coefficients,
    pub lossy: Coefficients,
    pub shell: Coefficients,
    pub exterior: Coefficients,
}

impl MediumSpec {
    /// Cavity replaced by a boundary condition, shell index `n_c`.
    pub fn idealized(mode: MediumMode, n_c: f64) -> Result<Self> {
        if !mode.is_idealized() {
            return Err(Error::Scatter(format!("{mode} is not an idealized mode")));
        }
        let m = MediumSpec {
            mode,
            core: Coefficients::VACUUM,
            lossy: Coefficients::VACUUM,
            shell: Coefficients::real(1.0, n_c),
            exterior: Coefficients::VACUUM,
        };
        m.validate()?;
        Ok(m)
    }

    /// Three-layer lossy configuration around the shell of index `n_c`.
    pub fn lossy(mode: MediumMode, params: LossyParams, n_c: f64) -> Result<Self> {
        params.validate()?;
        let layer = match mode {
            MediumMode::Lossy1 => params.layer1(),
            MediumMode::Lossy2 => params.layer2(),
            _ => return Err(Error::Scatter(format!("{mode} is not a lossy mode"))),
        };
        let m = MediumSpec {
            mode,
            core: Coefficients::real(params.sigma_a, params.n_a),
            lossy: layer,
            shell: Coefficients::real(1.0, n_c),
            exterior: Coefficients::VACUUM,
        };
        m.validate()?;
        Ok(m)
    }

    /// Penetrable scatterer with the given coefficients in D and Ω∖D.
    pub fn penetrable(cavity: Coefficients, shell: Coefficients) -> Result<Self> {
        let m = MediumSpec { mode: MediumMode::Penetrable, core: cavity, lossy: cavity, shell, exterior: Coefficients::VACUUM };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.core.validate("core")?;
        self.lossy.validate("lossy layer")?;
        self.shell.validate("shell")?;
        if self.exterior != Coefficients::VACUUM {
            return Err(Error::Scatter("exterior must be (σ, n) = (1, 1)".into()));
        }
        if self.mode != MediumMode::Penetrable && self.shell.sigma != 1.0 {
            return Err(Error::Scatter("shell σ must be 1".into()));
        }
        Ok(())
    }

    /// Coefficients of a region; the PML is vacuum.
    pub fn coefficients(&self, region: Region) -> Coefficients {
        match region {
            Region::Core => self.core,
            Region::Lossy => self.lossy,
            Region::Shell => self.shell,
            Region::Exterior | Region::Pml => self.exterior,
        }
    }
}
