//! Physical parameters of the two-cavity system and the derived single-number
//! quantities: bare optomechanical coupling, drive amplitude and thermal
//! phonon occupation. Internal units are SI with angular frequencies in rad/s.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

/// Below this mechanical quality factor the Markovian Brownian-noise model
/// is questionable.
pub const MIN_QUALITY_FACTOR: f64 = 1e3;

/// How the thermal phonon bath is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Thermal {
    /// Bath temperature in kelvin; occupations follow from each `ω_mj`.
    Temperature(f64),
    /// Mean phonon number given directly (shared by both mirrors).
    Occupation(f64),
}

/// Which detuning the user fixes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningMode {
    /// Bare detunings `Δ_0j`; the radiation-pressure shift is solved for.
    Bare([f64; 2]),
    /// Effective detunings `Δ_j`, shift already included.
    Effective([f64; 2]),
}

/// Sign relation between the user-facing detuning axis and the detuning
/// `Δ_j` entering the steady-state and fluctuation equations.
///
/// `Direct` uses `Δ_j = +Δ` with the drift written as `dX = -κX + ΔY`,
/// `dY = -ΔX - κY + Gq`. `Inverted` uses `Δ_j = -Δ` with the drift written
/// as `dX = -κX - ΔY`, `dY = ΔX - κY + Gq`, so both produce the same drift
/// matrix for the same axis value and differ only through the steady state
/// once the cavities hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningSign {
    #[default]
    Direct,
    Inverted,
}

impl DetuningSign {
    /// Maps a user-axis detuning onto `Δ_j`.
    #[inline]
    pub fn to_internal(self, axis: f64) -> f64 {
        match self {
            DetuningSign::Direct => axis,
            DetuningSign::Inverted => -axis,
        }
    }

    /// Inverse of [`Self::to_internal`] (the map is an involution).
    #[inline]
    pub fn to_axis(self, internal: f64) -> f64 {
        self.to_internal(internal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Rest length `L_j`, m.
    pub cavity_length: [f64; 2],
    /// Mirror mass `m_j`, kg.
    pub mirror_mass: [f64; 2],
    /// Mechanical angular frequency `ω_mj`, rad/s.
    pub mech_freq: [f64; 2],
    /// Mechanical damping `γ_mj`, rad/s.
    pub mech_damping: [f64; 2],
    /// Cavity decay `κ_j`, rad/s.
    pub cavity_decay: [f64; 2],
    /// Laser wavelength `λ`, m.
    pub laser_wavelength: f64,
    /// Input power `P_j`, W.
    pub drive_power: [f64; 2],
    pub thermal: Thermal,
    /// Photon hopping strength `ξ`, rad/s.
    pub hop_strength: f64,
    pub detuning: DetuningMode,
    #[serde(default)]
    pub detuning_sign: DetuningSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScalars {
    /// `g_j`, rad/s.
    pub bare_coupling: [f64; 2],
    /// `|E_j|`, s⁻¹.
    pub drive_amp: [f64; 2],
    /// `n̄_j`.
    pub thermal_occ: [f64; 2],
}

impl PhysicalParams {
    /// Identical cavities with the parameter set used throughout the figure
    /// presets: L = 1 mm, m = 5 ng, ω_m/2π = 10 MHz, γ_m/2π = 100 Hz,
    /// κ/2π = 14 MHz, λ = 810 nm, P = 50 mW, n̄ = 836, ξ = 0, Δ = ω_m.
    pub fn reference() -> Self {
        let wm = 2.0 * PI * 10e6;
        Self {
            cavity_length: [1e-3; 2],
            mirror_mass: [5e-12; 2],
            mech_freq: [wm; 2],
            mech_damping: [2.0 * PI * 100.0; 2],
            cavity_decay: [2.0 * PI * 14e6; 2],
            laser_wavelength: 810e-9,
            drive_power: [50e-3; 2],
            thermal: Thermal::Occupation(836.0),
            hop_strength: 0.0,
            detuning: DetuningMode::Effective([wm; 2]),
            detuning_sign: DetuningSign::Direct,
        }
    }

    /// Laser angular frequency `ω_L = 2πc/λ`; also used as `ω_cj`.
    pub fn laser_freq(&self) -> f64 {
        2.0 * PI * C_LIGHT / self.laser_wavelength
    }

    /// Reference mechanical frequency used for `ω_m`-normalized quantities.
    pub fn omega_m(&self) -> f64 {
        self.mech_freq[0]
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        }
        for j in 0..2 {
            positive("cavity_length", self.cavity_length[j])?;
            positive("mirror_mass", self.mirror_mass[j])?;
            positive("mech_freq", self.mech_freq[j])?;
            positive("mech_damping", self.mech_damping[j])?;
            positive("cavity_decay", self.cavity_decay[j])?;
            let p = self.drive_power[j];
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::param("drive_power", format!("must be finite and >= 0, got {p}")));
            }
        }
        positive("laser_wavelength", self.laser_wavelength)?;
        match self.thermal {
            Thermal::Temperature(t) if !(t.is_finite() && t >= 0.0) => {
                return Err(Error::param("bath_temperature", format!("must be >= 0, got {t}")))
            }
            Thermal::Occupation(n) if !(n.is_finite() && n >= 0.0) => {
                return Err(Error::param("thermal_occupation", format!("must be >= 0, got {n}")))
            }
            _ => {}
        }
        if !(self.hop_strength.is_finite() && self.hop_strength >= 0.0) {
            return Err(Error::param(
                "hop_strength",
                format!("must be >= 0, got {}", self.hop_strength),
            ));
        }
        let d = match self.detuning {
            DetuningMode::Bare(d) | DetuningMode::Effective(d) => d,
        };
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("detuning", "must be finite"));
        }
        Ok(())
    }

    /// Soft diagnostics that do not make the parameters invalid.
    pub fn warnings(&self) -> Vec<String> {
        (0..2)
            .filter_map(|j| {
                let q = self.mech_freq[j] / self.mech_damping[j];
                (q < MIN_QUALITY_FACTOR).then(|| {
                    format!(
                        "mirror {}: quality factor {q:.3e} < {MIN_QUALITY_FACTOR:e}; Markovian Brownian noise is a poor approximation",
                        j + 1
                    )
                })
            })
            .collect()
    }

    pub fn derived(&self) -> DerivedScalars {
        let wl = self.laser_freq();
        let mut out = DerivedScalars {
            bare_coupling: [0.0; 2],
            drive_amp: [0.0; 2],
            thermal_occ: [0.0; 2],
        };
        for j in 0..2 {
            out.bare_coupling[j] = derive_coupling(self, j);
            out.drive_amp[j] = drive_amplitude(self.drive_power[j], self.cavity_decay[j], wl);
            out.thermal_occ[j] = match self.thermal {
                Thermal::Temperature(t) => thermal_occupation(self.mech_freq[j], t),
                Thermal::Occupation(n) => n,
            };
        }
        out
    }

    /// True when both cavities share every parameter (including drive and
    /// detuning), i.e. the collective reduction applies.
    pub fn is_symmetric(&self) -> bool {
        fn same(a: [f64; 2]) -> bool {
            (a[0] - a[1]).abs() <= 1e-12 * a[0].abs().max(a[1].abs())
        }
        let d = match self.detuning {
            DetuningMode::Bare(d) | DetuningMode::Effective(d) => d,
        };
        same(self.cavity_length)
            && same(self.mirror_mass)
            && same(self.mech_freq)
            && same(self.mech_damping)
            && same(self.cavity_decay)
            && same(self.drive_power)
            && same(d)
    }

    /// Sets both cavities' effective detuning (user axis convention).
    pub fn with_effective_detuning(mut self, delta: f64) -> Self {
        self.detuning = DetuningMode::Effective([delta; 2]);
        self
    }

    pub fn with_hop(mut self, xi: f64) -> Self {
        self.hop_strength = xi;
        self
    }

    pub fn with_power(mut self, p: f64) -> Self {
        self.drive_power = [p; 2];
        self
    }
}

/// Bare radiation-pressure coupling `g_j = (ω_c/L_j)·sqrt(ħ/(m_j ω_mj))`
/// with `ω_c = ω_L`.
pub fn derive_coupling(params: &PhysicalParams, j: usize) -> f64 {
    let wc = params.laser_freq();
    (wc / params.cavity_length[j]) * (HBAR / (params.mirror_mass[j] * params.mech_freq[j])).sqrt()
}

/// Drive amplitude `|E| = sqrt(2Pκ/(ħω_L))`.
pub fn drive_amplitude(power: f64, kappa: f64, laser_freq: f64) -> f64 {
    if power <= 0.0 {
        return 0.0;
    }
    (2.0 * power * kappa / (HBAR * laser_freq)).sqrt()
}

/// Bose occupation `n̄ = 1/(exp(ħω_m/k_B T) − 1)`; exactly zero at `T = 0`.
pub fn thermal_occupation(mech_freq: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * mech_freq / (K_B * temperature)).exp_m1()
}
