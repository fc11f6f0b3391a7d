//! JSON run configuration with explicit units, resolved into SI parameters
//! plus a parameter grid.
//!
//! ```json
//! {
//!   "title": "example",
//!   "params": {
//!     "mech_freq": {"value": 10, "unit": "MHz"},
//!     "cavity_decay": {"value": 14, "unit": "MHz"},
//!     "drive_power": {"value": 50, "unit": "mW"},
//!     "thermal": {"occupation": 836},
//!     "hop_strength": {"value": 0.5, "unit": "omega_m"},
//!     "detuning": {"mode": "effective", "value": {"value": 1, "unit": "omega_m"}}
//!   },
//!   "bath": {"photon_number": 0.05, "correlation": "ideal"},
//!   "axes": [{"variable": "detuning", "min": 0, "max": 2, "count": 201}]
//! }
//! ```
//!
//! Omitted physical fields take the reference values of
//! [`PhysicalParams::reference`]. Frequencies in `Hz`/`MHz` are ordinary
//! frequencies and are multiplied by 2π; `omega_m` means multiples of the
//! first mirror's angular frequency.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{BipartitePair, CoherentInput};
use crate::params::{DetuningMode, DetuningSign, PhysicalParams, Thermal};
use crate::squeezing::{ideal_correlation, DpoParams, SqueezedBath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "rad/s")]
    RadPerSecond,
    #[serde(rename = "mm")]
    Millimeter,
    #[serde(rename = "m")]
    Meter,
    #[serde(rename = "nm")]
    Nanometer,
    #[serde(rename = "ng")]
    Nanogram,
    #[serde(rename = "kg")]
    Kilogram,
    #[serde(rename = "mW")]
    Milliwatt,
    #[serde(rename = "W")]
    Watt,
    #[serde(rename = "K")]
    Kelvin,
    #[serde(rename = "dimensionless")]
    Dimensionless,
    #[serde(rename = "omega_m")]
    OmegaM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Length,
    Mass,
    Rate,
    Power,
    Temperature,
    Dimensionless,
}

impl Unit {
    /// SI factor for this unit, or `None` if it does not measure `kind`.
    fn factor(self, kind: Kind, omega_m: Option<f64>) -> Option<f64> {
        use Unit::*;
        match (kind, self) {
            (Kind::Length, Millimeter) => Some(1e-3),
            (Kind::Length, Meter) => Some(1.0),
            (Kind::Length, Nanometer) => Some(1e-9),
            (Kind::Mass, Nanogram) => Some(1e-12),
            (Kind::Mass, Kilogram) => Some(1.0),
            (Kind::Rate, Hz) => Some(2.0 * PI),
            (Kind::Rate, MHz) => Some(2.0 * PI * 1e6),
            (Kind::Rate, RadPerSecond) => Some(1.0),
            (Kind::Rate, OmegaM) => omega_m,
            (Kind::Power, Milliwatt) => Some(1e-3),
            (Kind::Power, Watt) => Some(1.0),
            (Kind::Temperature, Kelvin) => Some(1.0),
            (Kind::Dimensionless, Dimensionless) => Some(1.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    fn to_si(self, field: &str, kind: Kind, omega_m: Option<f64>) -> Result<f64> {
        let f = self.unit.factor(kind, omega_m).ok_or_else(|| {
            Error::Config(format!("field `{field}`: unit {:?} is not a {kind:?} unit", self.unit))
        })?;
        if !self.value.is_finite() {
            return Err(Error::Config(format!("field `{field}`: value must be finite")));
        }
        Ok(self.value * f)
    }
}

/// One quantity shared by both cavities, or one per cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerCavity {
    Same(Quantity),
    Each([Quantity; 2]),
}

impl PerCavity {
    fn to_si(self, field: &str, kind: Kind, omega_m: Option<f64>) -> Result<[f64; 2]> {
        match self {
            PerCavity::Same(q) => Ok([q.to_si(field, kind, omega_m)?; 2]),
            PerCavity::Each([a, b]) => Ok([
                a.to_si(field, kind, omega_m)?,
                b.to_si(field, kind, omega_m)?,
            ]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ThermalSpec {
    Occupation(f64),
    Temperature(Quantity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningKind {
    Bare,
    Effective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningSpec {
    pub mode: DetuningKind,
    pub value: PerCavity,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub cavity_length: Option<PerCavity>,
    pub mirror_mass: Option<PerCavity>,
    pub mech_freq: Option<PerCavity>,
    pub mech_damping: Option<PerCavity>,
    pub cavity_decay: Option<PerCavity>,
    pub laser_wavelength: Option<Quantity>,
    pub drive_power: Option<PerCavity>,
    pub thermal: Option<ThermalSpec>,
    pub hop_strength: Option<Quantity>,
    pub detuning: Option<DetuningSpec>,
    pub detuning_sign: Option<DetuningSign>,
}

impl ParamsSpec {
    pub fn resolve(&self) -> Result<PhysicalParams> {
        let mut p = PhysicalParams::reference();
        if let Some(v) = self.mech_freq {
            p.mech_freq = v.to_si("mech_freq", Kind::Rate, None)?;
        }
        let wm = Some(p.mech_freq[0]);
        if let Some(v) = self.cavity_length {
            p.cavity_length = v.to_si("cavity_length", Kind::Length, wm)?;
        }
        if let Some(v) = self.mirror_mass {
            p.mirror_mass = v.to_si("mirror_mass", Kind::Mass, wm)?;
        }
        if let Some(v) = self.mech_damping {
            p.mech_damping = v.to_si("mech_damping", Kind::Rate, wm)?;
        }
        if let Some(v) = self.cavity_decay {
            p.cavity_decay = v.to_si("cavity_decay", Kind::Rate, wm)?;
        }
        if let Some(v) = self.laser_wavelength {
            p.laser_wavelength = v.to_si("laser_wavelength", Kind::Length, wm)?;
        }
        if let Some(v) = self.drive_power {
            p.drive_power = v.to_si("drive_power", Kind::Power, wm)?;
        }
        if let Some(t) = self.thermal {
            p.thermal = match t {
                ThermalSpec::Occupation(n) => Thermal::Occupation(n),
                ThermalSpec::Temperature(q) => {
                    Thermal::Temperature(q.to_si("thermal.temperature", Kind::Temperature, wm)?)
                }
            };
        }
        if let Some(v) = self.hop_strength {
            p.hop_strength = v.to_si("hop_strength", Kind::Rate, wm)?;
        }
        if let Some(d) = self.detuning {
            let v = d.value.to_si("detuning", Kind::Rate, wm)?;
            p.detuning = match d.mode {
                DetuningKind::Bare => DetuningMode::Bare(v),
                DetuningKind::Effective => DetuningMode::Effective(v),
            };
        } else {
            p.detuning = DetuningMode::Effective([p.mech_freq[0]; 2]);
        }
        if let Some(s) = self.detuning_sign {
            p.detuning_sign = s;
        }
        Ok(p)
    }
}

/// Two-mode correlation `M`: a number or the maximal value for `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrelationSpec {
    Value(f64),
    Named(NamedCorrelation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedCorrelation {
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpoSpec {
    pub kappa_dpo: Quantity,
    pub amplification: Quantity,
    pub center_freq: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BathInput {
    Dpo {
        dpo: DpoSpec,
    },
    Direct {
        photon_number: f64,
        #[serde(default = "zero_correlation")]
        correlation: CorrelationSpec,
    },
}

fn zero_correlation() -> CorrelationSpec {
    CorrelationSpec::Value(0.0)
}

impl Default for BathInput {
    fn default() -> Self {
        BathInput::Direct {
            photon_number: 0.0,
            correlation: zero_correlation(),
        }
    }
}

/// Resolved bath: `N` plus a rule for `M`, so that sweeping `N` keeps an
/// ideal bath ideal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathSpec {
    pub photon_number: f64,
    pub ideal: bool,
    pub correlation: f64,
}

impl BathSpec {
    pub fn fixed(bath: SqueezedBath<f64>) -> Self {
        Self {
            photon_number: bath.photon_number,
            ideal: false,
            correlation: bath.correlation,
        }
    }

    pub fn ideal(n: f64) -> Self {
        Self {
            photon_number: n,
            ideal: true,
            correlation: ideal_correlation(n),
        }
    }

    pub fn vacuum() -> Self {
        Self::fixed(SqueezedBath::vacuum())
    }

    pub fn with_photon_number(self, n: f64) -> Self {
        if self.ideal {
            Self::ideal(n)
        } else {
            Self {
                photon_number: n,
                ..self
            }
        }
    }

    pub fn bath(&self) -> SqueezedBath<f64> {
        SqueezedBath {
            photon_number: self.photon_number,
            correlation: self.correlation,
        }
    }
}

impl BathInput {
    fn resolve(&self, omega_m: f64) -> Result<BathSpec> {
        match *self {
            BathInput::Direct {
                photon_number,
                correlation,
            } => Ok(match correlation {
                CorrelationSpec::Named(NamedCorrelation::Ideal) => BathSpec::ideal(photon_number),
                CorrelationSpec::Value(m) => BathSpec::fixed(SqueezedBath {
                    photon_number,
                    correlation: m,
                }),
            }),
            BathInput::Dpo { dpo } => {
                let wm = Some(omega_m);
                let d = DpoParams {
                    kappa_dpo: dpo.kappa_dpo.to_si("dpo.kappa_dpo", Kind::Rate, wm)?,
                    amplification: dpo.amplification.to_si("dpo.amplification", Kind::Rate, wm)?,
                    center_freq: dpo.center_freq.to_si("dpo.center_freq", Kind::Rate, wm)?,
                };
                Ok(BathSpec::fixed(SqueezedBath::from_dpo(&d)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisVariable {
    /// Detuning of both cavities (mode taken from the base parameters).
    Detuning,
    HopStrength,
    DrivePower,
    Temperature,
    ThermalOccupation,
    PhotonNumber,
}

impl AxisVariable {
    /// CSV column name; the stored axis values are in these units.
    pub fn column(self) -> &'static str {
        match self {
            Self::Detuning => "delta_over_omega_m",
            Self::HopStrength => "xi_over_omega_m",
            Self::DrivePower => "drive_power_W",
            Self::Temperature => "temperature_K",
            Self::ThermalOccupation => "thermal_occupation",
            Self::PhotonNumber => "photon_number",
        }
    }

    fn kind(self) -> Kind {
        match self {
            Self::Detuning | Self::HopStrength => Kind::Rate,
            Self::DrivePower => Kind::Power,
            Self::Temperature => Kind::Temperature,
            Self::ThermalOccupation | Self::PhotonNumber => Kind::Dimensionless,
        }
    }

    fn default_unit(self) -> Unit {
        match self {
            Self::Detuning | Self::HopStrength => Unit::OmegaM,
            Self::DrivePower => Unit::Watt,
            Self::Temperature => Unit::Kelvin,
            Self::ThermalOccupation | Self::PhotonNumber => Unit::Dimensionless,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub variable: AxisVariable,
    #[serde(default)]
    pub unit: Option<Unit>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub variable: AxisVariable,
    /// Values in the units named by [`AxisVariable::column`].
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linspace(variable: AxisVariable, min: f64, max: f64, count: usize) -> Self {
        let values = (0..count)
            .map(|k| {
                if count == 1 {
                    min
                } else {
                    min + (max - min) * k as f64 / (count - 1) as f64
                }
            })
            .collect();
        Self { variable, values }
    }

    pub fn list(variable: AxisVariable, values: &[f64]) -> Self {
        Self {
            variable,
            values: values.to_vec(),
        }
    }
}

impl AxisSpec {
    fn resolve(&self, omega_m: f64) -> Result<Axis> {
        let unit = self.unit.unwrap_or(self.variable.default_unit());
        let kind = self.variable.kind();
        let si = unit.factor(kind, Some(omega_m)).ok_or_else(|| {
            Error::Config(format!("axis {:?}: unit {unit:?} does not fit", self.variable))
        })?;
        // stored unit: ω_m multiples for rates, SI otherwise
        let scale = if kind == Kind::Rate { si / omega_m } else { si };
        let raw = match (&self.values, self.min, self.max, self.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(lo), Some(hi), Some(n)) => {
                if n < 2 {
                    return Err(Error::Config(format!(
                        "axis {:?}: count must be >= 2, got {n}",
                        self.variable
                    )));
                }
                Axis::linspace(self.variable, lo, hi, n).values
            }
            _ => {
                return Err(Error::Config(format!(
                    "axis {:?}: give either `values` or all of `min`, `max`, `count`",
                    self.variable
                )))
            }
        };
        if raw.is_empty() || raw.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!(
                "axis {:?}: values must be finite and non-empty",
                self.variable
            )));
        }
        Ok(Axis {
            variable: self.variable,
            values: raw.into_iter().map(|x| x * scale).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPolicy {
    /// One record per point: the smallest-amplitude stable branch, or the
    /// smallest-amplitude branch when none is stable.
    #[default]
    LowestStable,
    /// One record per fixed point.
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "all_pairs")]
    pub pairs: Vec<BipartitePair>,
    #[serde(default = "yes")]
    pub fidelity: bool,
}

fn all_pairs() -> Vec<BipartitePair> {
    BipartitePair::ALL.to_vec()
}

fn yes() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            pairs: all_pairs(),
            fidelity: true,
        }
    }
}

/// Document form of a configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub bath: BathInput,
    #[serde(default)]
    pub axes: Vec<AxisSpec>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub branch_policy: BranchPolicy,
    #[serde(default)]
    pub fidelity_input: CoherentInput,
    #[serde(default)]
    pub workers: Option<usize>,
}

/// Resolved configuration in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub title: String,
    /// Free-form lines copied into output headers.
    pub notes: Vec<String>,
    pub base: PhysicalParams,
    pub bath: BathSpec,
    pub axes: Vec<Axis>,
    pub outputs: Outputs,
    pub branch_policy: BranchPolicy,
    pub fidelity_input: CoherentInput,
    pub workers: Option<usize>,
}

impl ConfigFile {
    pub fn resolve(&self) -> Result<SweepConfig> {
        let base = self.params.resolve()?;
        let wm = base.omega_m();
        let bath = self.bath.resolve(wm)?;
        let axes = self
            .axes
            .iter()
            .map(|a| a.resolve(wm))
            .collect::<Result<Vec<_>>>()?;
        let cfg = SweepConfig {
            title: self.title.clone().unwrap_or_default(),
            notes: Vec::new(),
            base,
            bath,
            axes,
            outputs: self.outputs.clone(),
            branch_policy: self.branch_policy,
            fidelity_input: self.fidelity_input,
            workers: self.workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SweepConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        file.resolve()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Schema-level and invariant checks: base parameters, base bath and
    /// axis shape. Axis values that leave the valid region surface as
    /// per-point errors during a run.
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.bath.bath().validate()?;
        if self.axes.len() > 2 {
            return Err(Error::Config(format!(
                "at most two axes are supported, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].variable == self.axes[1].variable {
            return Err(Error::Config("the two axes must sweep different variables".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Extra checks for grid runs.
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate()?;
        if self.axes.is_empty() {
            return Err(Error::Config("a sweep needs one or two axes".into()));
        }
        for a in &self.axes {
            if a.values.len() < 2 {
                return Err(Error::Config(format!(
                    "axis {:?} needs at least two values",
                    a.variable
                )));
            }
        }
        Ok(())
    }

    /// Grid coordinates in row-major order (last axis fastest).
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Parameters and bath at one grid coordinate.
    pub fn point(&self, coords: &[f64]) -> (PhysicalParams, BathSpec) {
        let mut p = self.base.clone();
        let mut bath = self.bath;
        let wm = p.omega_m();
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.variable {
                AxisVariable::Detuning => {
                    p.detuning = match p.detuning {
                        DetuningMode::Bare(_) => DetuningMode::Bare([v * wm; 2]),
                        DetuningMode::Effective(_) => DetuningMode::Effective([v * wm; 2]),
                    }
                }
                AxisVariable::HopStrength => p.hop_strength = v * wm,
                AxisVariable::DrivePower => p.drive_power = [v; 2],
                AxisVariable::Temperature => p.thermal = Thermal::Temperature(v),
                AxisVariable::ThermalOccupation => p.thermal = Thermal::Occupation(v),
                AxisVariable::PhotonNumber => bath = bath.with_photon_number(v),
            }
        }
        (p, bath)
    }
}
