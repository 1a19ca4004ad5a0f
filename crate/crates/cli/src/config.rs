//! Run configuration. The file format is TOML with one table per stage; every
//! key is optional and falls back to the value used in the reference runs.
//!
//! ```toml
//! output_dir = "out"
//!
//! [geometry]
//! outer = "circle:1"        # circle:r | ellipse:a,b | square:half
//! cavity = "circle:0.5"
//! # core = "circle:0.3"     # Σ for the lossy modes; a scaled cavity if absent
//! box_halfwidth = 2.2
//! pml_thickness = 0.6
//!
//! [fem]
//! h = 0.1
//! degree = 2
//!
//! [ite]
//! n_c = 16.0
//! cavity_bc = "dirichlet"
//! selection = "auto"        # auto | near | smallest | complex_near
//! target = 1.0
//! count = 5
//!
//! [herglotz]
//! directions = 64
//! points = 128
//! r = 1e-8
//! gamma_prime_scale = 0.9
//! fit_warn = 0.01
//!
//! [scatter]
//! # kappa = 1.890939        # otherwise the first real eigenvalue of [ite]
//! modes = ["idealized_dirichlet"]
//! pml_exponent = 3
//! pml_r0 = 1.1253517471925912e-7
//! grid_n = 89
//!
//! [lossy]
//! gamma = 1.0
//! tau = 0.01
//! alpha = 1.0
//! beta = 0.3
//! sigma_a = 1.0
//! n_a = 12.0
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use cloaksim_core::fem::Degree;
use cloaksim_core::geometry::{GeometrySpec, Shape};
use cloaksim_core::herglotz::{FitConfig, GAMMA_PRIME_SCALE};
use cloaksim_core::scatter::{LossyParams, MediumMode, PmlConfig};
use cloaksim_core::CavityBc;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub geometry: GeometryConfig,
    pub fem: FemConfig,
    pub ite: IteConfig,
    pub herglotz: HerglotzConfig,
    pub scatter: ScatterConfig,
    pub lossy: LossyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output_dir: PathBuf::from("out"),
            geometry: GeometryConfig::default(),
            fem: FemConfig::default(),
            ite: IteConfig::default(),
            herglotz: HerglotzConfig::default(),
            scatter: ScatterConfig::default(),
            lossy: LossyConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(with = "keyword")]
    pub outer: Shape,
    #[serde(with = "keyword")]
    pub cavity: Shape,
    #[serde(with = "opt_keyword", skip_serializing_if = "Option::is_none")]
    pub core: Option<Shape>,
    pub box_halfwidth: f64,
    pub pml_thickness: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = GeometrySpec::circle();
        GeometryConfig {
            outer: g.outer,
            cavity: g.cavity,
            core: None,
            box_halfwidth: g.box_halfwidth,
            pml_thickness: g.pml_thickness,
        }
    }
}

impl GeometryConfig {
    pub fn from_spec(g: &GeometrySpec) -> Self {
        GeometryConfig {
            outer: g.outer,
            cavity: g.cavity,
            core: g.core,
            box_halfwidth: g.box_halfwidth,
            pml_thickness: g.pml_thickness,
        }
    }

    pub fn spec(&self) -> GeometrySpec {
        GeometrySpec {
            outer: self.outer,
            cavity: self.cavity,
            core: self.core,
            box_halfwidth: self.box_halfwidth,
            pml_thickness: self.pml_thickness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FemConfig {
    pub h: f64,
    pub degree: u32,
}

impl Default for FemConfig {
    fn default() -> Self {
        FemConfig { h: 0.1, degree: 2 }
    }
}

impl FemConfig {
    pub fn degree(&self) -> Result<Degree> {
        Ok(Degree::from_order(self.degree)?)
    }
}

/// Which eigenvalues the ITE stage returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// `near` for a Dirichlet cavity, `smallest` for a Neumann one.
    Auto,
    Near,
    Smallest,
    ComplexNear,
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Selection::Auto),
            "near" => Ok(Selection::Near),
            "smallest" => Ok(Selection::Smallest),
            "complex_near" => Ok(Selection::ComplexNear),
            _ => Err(Error::Config(format!("unknown selection '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IteConfig {
    pub n_c: f64,
    #[serde(with = "keyword")]
    pub cavity_bc: CavityBc,
    pub selection: Selection,
    /// Target κ of the near selections.
    pub target: f64,
    pub count: usize,
}

impl Default for IteConfig {
    fn default() -> Self {
        IteConfig { n_c: 16.0, cavity_bc: CavityBc::Dirichlet, selection: Selection::Auto, target: 1.0, count: 5 }
    }
}

impl IteConfig {
    pub fn resolved_selection(&self) -> Selection {
        match (self.selection, self.cavity_bc) {
            (Selection::Auto, CavityBc::Dirichlet) => Selection::Near,
            (Selection::Auto, CavityBc::Neumann) => Selection::Smallest,
            (s, _) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HerglotzConfig {
    pub directions: usize,
    pub points: usize,
    pub r: f64,
    /// Γ′ is ∂Ω scaled by this factor about the origin.
    pub gamma_prime_scale: f64,
    /// Fit residuals above this are reported as warnings.
    pub fit_warn: f64,
}

impl Default for HerglotzConfig {
    fn default() -> Self {
        let f = FitConfig::default();
        HerglotzConfig {
            directions: f.directions,
            points: f.points,
            r: f.r,
            gamma_prime_scale: GAMMA_PRIME_SCALE,
            fit_warn: 1e-2,
        }
    }
}

impl HerglotzConfig {
    pub fn fit(&self) -> FitConfig {
        FitConfig { directions: self.directions, points: self.points, r: self.r }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(with = "keyword_list")]
    pub modes: Vec<MediumMode>,
    pub pml_exponent: u32,
    pub pml_r0: f64,
    /// Points per side of the field dump over the physical box; 0 disables it.
    pub grid_n: usize,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        let p = PmlConfig::default();
        ScatterConfig {
            kappa: None,
            modes: vec![MediumMode::IdealizedDirichlet],
            pml_exponent: p.exponent,
            pml_r0: p.r0,
            grid_n: 89,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossyConfig {
    pub gamma: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma_a: f64,
    pub n_a: f64,
}

impl Default for LossyConfig {
    fn default() -> Self {
        let p = LossyParams::default();
        LossyConfig { gamma: p.gamma, tau: p.tau, alpha: p.alpha, beta: p.beta, sigma_a: p.sigma_a, n_a: p.n_a }
    }
}

impl LossyConfig {
    pub fn params(&self) -> LossyParams {
        LossyParams {
            gamma: self.gamma,
            tau: self.tau,
            alpha: self.alpha,
            beta: self.beta,
            sigma_a: self.sigma_a,
            n_a: self.n_a,
        }
    }
}

impl RunConfig {
    pub fn pml(&self) -> PmlConfig {
        PmlConfig {
            box_halfwidth: self.geometry.box_halfwidth,
            thickness: self.geometry.pml_thickness,
            exponent: self.scatter.pml_exponent,
            r0: self.scatter.pml_r0,
        }
    }

    /// Checks every stage's preconditions that do not need a mesh.
    pub fn validate(&self) -> Result<()> {
        let spec = self.geometry.spec();
        spec.validate()?;
        if !(self.fem.h > 0.0 && self.fem.h.is_finite()) {
            return Err(Error::Config(format!("h must be positive, got {}", self.fem.h)));
        }
        self.fem.degree()?;
        if !(self.ite.n_c > 0.0) {
            return Err(Error::Config(format!("n_c must be positive, got {}", self.ite.n_c)));
        }
        if self.ite.count == 0 {
            return Err(Error::Config("ite.count must be at least 1".into()));
        }
        if !(self.ite.target > 0.0) {
            return Err(Error::Config(format!("ite.target must be positive, got {}", self.ite.target)));
        }
        let hz = &self.herglotz;
        if hz.directions == 0 || hz.points == 0 || !(hz.r > 0.0) {
            return Err(Error::Config("herglotz needs directions, points and r positive".into()));
        }
        if !(hz.gamma_prime_scale > 0.0 && hz.gamma_prime_scale <= 1.0) {
            return Err(Error::Config(format!("gamma_prime_scale must lie in (0, 1], got {}", hz.gamma_prime_scale)));
        }
        if !self.scatter.modes.is_empty() {
            spec.validate_for_scattering()?;
            self.pml().validate()?;
            if let Some(k) = self.scatter.kappa {
                if !(k > 0.0) {
                    return Err(Error::Config(format!("scatter.kappa must be positive, got {k}")));
                }
            }
        }
        if self.scatter.modes.contains(&MediumMode::Penetrable) {
            return Err(Error::Config("the cloak pipeline runs idealized or lossy modes only".into()));
        }
        let l = &self.lossy;
        if [l.gamma, l.tau, l.alpha, l.beta, l.sigma_a, l.n_a].iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config("lossy parameters must be positive".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Lays the keys of `text` over `self`; absent keys keep their values.
    pub fn merge_toml(&self, text: &str) -> Result<Self> {
        let patch: toml::Table = toml::from_str(text)?;
        let mut base = toml::Table::try_from(self)?;
        merge(&mut base, patch);
        Ok(base.try_into()?)
    }

    pub fn merge_file(&self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.merge_toml(&text)
    }

    /// Applies `section.key=value`; the value is parsed as a TOML value and
    /// falls back to a string.
    pub fn set(&self, assignment: &str) -> Result<Self> {
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
        let value: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        let mut keys: Vec<&str> = path.trim().split('.').collect();
        let last = keys.pop().expect("split yields one item");
        let mut patch = toml::Table::new();
        patch.insert(last.to_string(), value);
        for k in keys.into_iter().rev() {
            let mut outer = toml::Table::new();
            outer.insert(k.to_string(), toml::Value::Table(patch));
            patch = outer;
        }
        let mut base = toml::Table::try_from(self)?;
        merge(&mut base, patch);
        Ok(base.try_into()?)
    }
}

fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (k, v) in patch {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Serialises through `Display` and `FromStr`.
mod keyword {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<T, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod opt_keyword {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_str(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

mod keyword_list {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}
