//! Experiment configuration: one struct mirrors every CLI flag and the key-value config file.

use crate::equilibrium::EquilibriumKind;
use crate::error::{Error, Result};
use crate::micromacro::Stencil;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Isd,
    Isa,
    Mmsd,
    Mmsa,
    Dsd,
    Dsa,
    DsaCn,
    Ds,
    Ads,
}

impl Scheme {
    pub const ALL: [Scheme; 9] =
        [Scheme::Isd, Scheme::Isa, Scheme::Mmsd, Scheme::Mmsa, Scheme::Dsd, Scheme::Dsa, Scheme::DsaCn, Scheme::Ds, Scheme::Ads];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Isd => "isd",
            Scheme::Isa => "isa",
            Scheme::Mmsd => "mmsd",
            Scheme::Mmsa => "mmsa",
            Scheme::Dsd => "dsd",
            Scheme::Dsa => "dsa",
            Scheme::DsaCn => "dsa-cn",
            Scheme::Ds => "ds",
            Scheme::Ads => "ads",
        }
    }

    /// Schemes built for the heavy-tail scaling.
    pub fn is_anomalous(self) -> bool {
        matches!(self, Scheme::Isa | Scheme::Mmsa | Scheme::Dsa | Scheme::DsaCn | Scheme::Ads)
    }

    pub fn is_micro_macro(self) -> bool {
        matches!(self, Scheme::Mmsd | Scheme::Mmsa)
    }

    pub fn is_limit(self) -> bool {
        matches!(self, Scheme::Ds | Scheme::Ads)
    }

    /// The limit solver a kinetic scheme degenerates into.
    pub fn limit(self) -> Scheme {
        if self.is_anomalous() {
            Scheme::Ads
        } else {
            Scheme::Ds
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// What to do when Δt exceeds the micro-macro stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CflPolicy {
    #[default]
    Warn,
    Error,
    /// Shrink Δt to the largest T/N below the bound.
    Adapt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    /// Scaling exponent; defaults to 1.5 with a heavy-tail equilibrium, 2 otherwise.
    pub alpha: Option<f64>,
    pub eps: f64,
    pub eps_list: Vec<f64>,
    pub dt: f64,
    pub dt_list: Vec<f64>,
    pub tfinal: f64,
    pub half_width: f64,
    /// Defaults to 64, or 32 for micro-macro schemes.
    pub nx: Option<usize>,
    pub nv: Option<usize>,
    pub vmax: Option<f64>,
    /// Defaults to the equilibrium matching the scheme's scaling.
    pub equilibrium: Option<EquilibriumKind>,
    pub stencil: Stencil,
    pub use_continuous_constants: bool,
    /// Reference for the error column; defaults to the scheme's limit solver.
    pub reference: Option<Scheme>,
    /// Reference time step; defaults to the run's Δt.
    pub reference_dt: Option<f64>,
    pub cfl: CflPolicy,
    pub truncate_history: bool,
    /// Dedicated grid for the rescaled w-sums; defaults to the velocity grid.
    pub wgrid_vmax: Option<f64>,
    pub wgrid_nv: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Isa,
            alpha: None,
            eps: 1e-6,
            eps_list: vec![],
            dt: 1e-3,
            dt_list: vec![],
            tfinal: 0.1,
            half_width: 1.0,
            nx: None,
            nv: None,
            vmax: None,
            equilibrium: None,
            stencil: Stencil::Upwind1,
            use_continuous_constants: false,
            reference: None,
            reference_dt: None,
            cfl: CflPolicy::Warn,
            truncate_history: false,
            wgrid_vmax: None,
            wgrid_nv: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, ..Self::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn alpha(&self) -> f64 {
        let heavy = self.scheme.is_anomalous() || self.equilibrium == Some(EquilibriumKind::HeavyTail);
        self.alpha.unwrap_or(if heavy { 1.5 } else { 2.0 })
    }

    pub fn equilibrium(&self) -> EquilibriumKind {
        self.equilibrium.unwrap_or(if self.scheme.is_anomalous() {
            EquilibriumKind::HeavyTail
        } else {
            EquilibriumKind::Gaussian
        })
    }

    pub fn nx(&self) -> usize {
        self.nx.unwrap_or(if self.scheme.is_micro_macro() { 32 } else { 64 })
    }

    pub fn nv(&self) -> usize {
        self.nv.unwrap_or(match self.equilibrium() {
            EquilibriumKind::Gaussian => 20,
            EquilibriumKind::HeavyTail => 200,
        })
    }

    pub fn vmax(&self) -> f64 {
        self.vmax.unwrap_or(match self.equilibrium() {
            EquilibriumKind::Gaussian => 10.0,
            EquilibriumKind::HeavyTail => 50.0,
        })
    }

    /// Heavy-tail exponent β = α + 1; the Gaussian ignores it.
    pub fn beta(&self) -> f64 {
        let a = self.alpha();
        if self.equilibrium() == EquilibriumKind::HeavyTail && a < 2.0 {
            a + 1.0
        } else {
            2.5
        }
    }

    /// Integer step count for T = NΔt.
    pub fn steps(&self, dt: f64) -> Result<usize> {
        if !(dt > 0.0 && self.tfinal > 0.0) {
            return Err(Error::Config(format!("dt={dt} and tfinal={} must be positive", self.tfinal)));
        }
        let n = (self.tfinal / dt).round();
        if n < 1.0 || (n * dt - self.tfinal).abs() > 1e-9 * self.tfinal {
            return Err(Error::Config(format!("tfinal={} is not a multiple of dt={dt}", self.tfinal)));
        }
        Ok(n as usize)
    }

    /// Copy with every defaulted field made explicit, so derived configs keep the same grids.
    pub fn resolved(&self) -> Self {
        Self {
            alpha: Some(self.alpha()),
            nx: Some(self.nx()),
            nv: Some(self.nv()),
            vmax: Some(self.vmax()),
            equilibrium: Some(self.equilibrium()),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha();
        if !(a > 0.0 && a <= 2.0) {
            return Err(Error::InvalidAlpha(a));
        }
        if self.equilibrium() == EquilibriumKind::HeavyTail && a >= 2.0 {
            return Err(Error::Config("heavy-tail equilibrium needs alpha < 2".into()));
        }
        if self.scheme.is_anomalous() && self.equilibrium() != EquilibriumKind::HeavyTail {
            return Err(Error::NeedsHeavyTail("anomalous schemes"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("eps={} must be positive", self.eps)));
        }
        for (name, list) in [("eps_list", &self.eps_list), ("dt_list", &self.dt_list)] {
            let inc = list.windows(2).all(|w| w[1] > w[0]);
            let dec = list.windows(2).all(|w| w[1] < w[0]);
            if !(inc || dec) {
                return Err(Error::Config(format!("{name} must be strictly monotone")));
            }
        }
        self.steps(self.dt)?;
        Ok(())
    }
}
