//! Routh–Hurwitz conditions of the collective-mode model, eigenvalue
//! stability of both the reduced and the full drift, and stability maps.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{build_drift, build_reduced, ReducedModel};
use crate::error::Result;
use crate::lyapunov::is_hurwitz;
use crate::params::{DetuningMode, PhysicalParams};
use crate::scalar::Scalar;
use crate::steady::SteadyState;

/// `(s₁, s₂)` for a single optomechanical cavity with detuning `d` in the
/// red-positive convention:
///
/// `s₁ = ω(κ² + d²) − G²d`,
/// `s₂ = 2γκ{[κ² + (ω − d)²][κ² + (ω + d)²] + γ[(γ + 2κ)(κ² + d²) + 2κω²]}
///       + dωG²(γ + 2κ)²`.
pub fn routh_hurwitz_reduced<T: Scalar>(omega: T, gamma: T, kappa: T, coupling: T, d: T) -> (T, T) {
    let two = T::lit(2.0);
    let k2 = kappa * kappa;
    let g2 = coupling * coupling;
    let s1 = omega * (k2 + d * d) - g2 * d;
    let brace = (k2 + (omega - d).powi(2)) * (k2 + (omega + d).powi(2))
        + gamma * ((gamma + two * kappa) * (k2 + d * d) + two * kappa * omega * omega);
    let s2 = two * gamma * kappa * brace + d * omega * g2 * (gamma + two * kappa).powi(2);
    (s1, s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `s₁` in units of `ω_m³`.
    pub s1: f64,
    /// `s₂` in units of `ω_m⁶`.
    pub s2: f64,
    pub hurwitz_full: bool,
    pub hurwitz_reduced: bool,
    /// `(s₁ > 0 ∧ s₂ > 0) == hurwitz_reduced`.
    pub agree: bool,
    pub abscissa_full: f64,
    pub abscissa_reduced: f64,
}

impl StabilityReport {
    pub fn conditions_hold(&self) -> bool {
        self.s1 > 0.0 && self.s2 > 0.0
    }
}

/// Normalized `(s₁, s₂)` of a reduced model.
pub fn reduced_conditions(model: &ReducedModel) -> (f64, f64) {
    let w = model.mech_freq;
    routh_hurwitz_reduced(
        1.0,
        model.mech_damping / w,
        model.decay / w,
        model.coupling / w,
        model.red_detuning() / w,
    )
}

/// User-axis effective detuning of cavity 1 for a steady state.
pub fn axis_detuning(params: &PhysicalParams, ss: &SteadyState) -> f64 {
    params.detuning_sign.to_axis(ss.eff_detuning[0])
}

/// Full report for one steady state of identical cavities.
pub fn stability_report(params: &PhysicalParams, ss: &SteadyState) -> Result<StabilityReport> {
    let full = is_hurwitz(&build_drift(ss, params))?;
    let model = build_reduced(params, ss.eff_coupling[0], axis_detuning(params, ss))?;
    let red = is_hurwitz(&model.drift)?;
    let (s1, s2) = reduced_conditions(&model);
    Ok(StabilityReport {
        s1,
        s2,
        hurwitz_full: full.is_hurwitz,
        hurwitz_reduced: red.is_hurwitz,
        agree: (s1 > 0.0 && s2 > 0.0) == red.is_hurwitz,
        abscissa_full: full.abscissa,
        abscissa_reduced: red.abscissa,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityCell {
    /// `Δ/ω_m`.
    pub delta: f64,
    /// `ξ/ω_m`.
    pub xi: f64,
    pub report: std::result::Result<StabilityReport, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityMap {
    /// Row-major over `(Δ, ξ)`: the `ξ` index varies fastest.
    pub cells: Vec<StabilityCell>,
    pub both_conditions: usize,
    pub hurwitz_full: usize,
    pub hurwitz_reduced: usize,
    /// Cells where the sign test and the reduced spectrum disagree.
    pub disagreements: Vec<(f64, f64)>,
    pub errors: usize,
}

impl StabilityMap {
    pub fn agreement_fraction(&self) -> f64 {
        let ok = self.cells.iter().filter(|c| c.report.is_ok()).count();
        if ok == 0 {
            return 0.0;
        }
        (ok - self.disagreements.len()) as f64 / ok as f64
    }
}

/// Evaluates the stability report on a `Δ × ξ` grid (both in units of
/// `ω_m`, effective detuning, user axis). Unstable cells are data.
pub fn stability_map(params: &PhysicalParams, deltas: &[f64], xis: &[f64]) -> StabilityMap {
    let wm = params.omega_m();
    let grid: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&d| xis.iter().map(move |&x| (d, x)))
        .collect();
    let cells: Vec<StabilityCell> = grid
        .par_iter()
        .map(|&(delta, xi)| {
            let mut p = params.clone();
            p.hop_strength = xi * wm;
            p.detuning = DetuningMode::Effective([delta * wm; 2]);
            let report = crate::steady::steady_states(&p)
                .and_then(|v| stability_report(&p, &v[0]))
                .map_err(|e| e.to_string());
            StabilityCell { delta, xi, report }
        })
        .collect();
    let mut map = StabilityMap {
        both_conditions: 0,
        hurwitz_full: 0,
        hurwitz_reduced: 0,
        disagreements: Vec::new(),
        errors: 0,
        cells: Vec::new(),
    };
    for c in &cells {
        match &c.report {
            Ok(r) => {
                map.both_conditions += r.conditions_hold() as usize;
                map.hurwitz_full += r.hurwitz_full as usize;
                map.hurwitz_reduced += r.hurwitz_reduced as usize;
                if !r.agree {
                    map.disagreements.push((c.delta, c.xi));
                }
            }
            Err(_) => map.errors += 1,
        }
    }
    map.cells = cells;
    map
}
