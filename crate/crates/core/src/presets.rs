//! Built-in configurations for the published figure set, plus gnuplot
//! scripts for quick inspection of their output.
//!
//! All presets use identical cavities with L = 1 mm, m = 5 ng,
//! ω_m/2π = 10 MHz, γ_m/2π = 100 Hz, κ/2π = 14 MHz, λ = 810 nm and
//! n̄ = 836 unless a preset sweeps one of them.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{Axis, AxisVariable, BathSpec, BranchPolicy, Outputs, SweepConfig};
use crate::error::{Error, Result};
use crate::gaussian::CoherentInput;
use crate::params::{DetuningMode, PhysicalParams};

/// Drive power of the amplitude figures.
pub const P0_AMPLITUDE: f64 = 35e-3;
/// Drive power of the entanglement figures.
pub const P0: f64 = 50e-3;
/// Resolution of the two-axis surface presets.
pub const SURFACE_POINTS: usize = 101;

pub const PRESET_NAMES: [&str; 12] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig5", "fig6a", "fig6b",
    "fig6c", "fig7",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PresetKind {
    Sweep,
    Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
    pub config: SweepConfig,
    /// Columns the gnuplot script draws.
    pub plot_columns: Vec<&'static str>,
}

fn base(title: &str) -> SweepConfig {
    SweepConfig {
        title: title.to_string(),
        notes: Vec::new(),
        base: PhysicalParams::reference(),
        bath: BathSpec::vacuum(),
        axes: Vec::new(),
        outputs: Outputs::default(),
        branch_policy: BranchPolicy::LowestStable,
        fidelity_input: CoherentInput::Identity,
        workers: None,
    }
}

fn detuning(lo: f64, hi: f64, count: usize) -> Axis {
    Axis::linspace(AxisVariable::Detuning, lo, hi, count)
}

fn amplitude_preset(name: &'static str, title: &str, axes: Vec<Axis>, xi: f64) -> Preset {
    let mut c = base(title);
    let wm = c.base.omega_m();
    c.base = c.base.with_power(P0_AMPLITUDE).with_hop(xi * wm);
    c.base.detuning = DetuningMode::Bare([0.0; 2]);
    c.axes = axes;
    c.branch_policy = BranchPolicy::All;
    c.notes = vec![
        "detuning axis is the bare detuning Delta_0/omega_m; the radiation-pressure shift is solved self-consistently".into(),
        format!("P0 = {} W; every fixed point is reported", P0_AMPLITUDE),
    ];
    Preset {
        name,
        kind: PresetKind::Sweep,
        config: c,
        plot_columns: vec!["amp1"],
    }
}

fn line_preset(name: &'static str, title: &str, mut c: SweepConfig, series: Axis, range: Axis) -> Preset {
    c.title = title.to_string();
    c.axes = vec![series, range];
    Preset {
        name,
        kind: PresetKind::Sweep,
        config: c,
        plot_columns: vec!["EN_F1M1", "EN_F1F2"],
    }
}

fn surface(title: &str, n: f64) -> SweepConfig {
    let mut c = base(title);
    c.bath = BathSpec::ideal(n);
    c.axes = vec![
        detuning(0.0, 3.0, SURFACE_POINTS),
        Axis::linspace(AxisVariable::HopStrength, 0.0, 2.0, SURFACE_POINTS),
    ];
    c.notes = vec![format!(
        "surface resolution {SURFACE_POINTS} x {SURFACE_POINTS} (delta x xi)"
    )];
    c
}

/// Looks up a preset by name.
pub fn fig_preset(name: &str) -> Result<Preset> {
    let series = |v: AxisVariable, vals: &[f64]| Axis::list(v, vals);
    let bare_series = series(AxisVariable::Detuning, &[0.0, 0.5, 1.0, 1.5]);
    let p = match name {
        "fig2a" => amplitude_preset(
            "fig2a",
            "steady-state amplitude versus drive power, xi = omega_m",
            vec![
                bare_series,
                Axis::linspace(AxisVariable::DrivePower, 0.0, 2.0 * P0_AMPLITUDE, 201),
            ],
            1.0,
        ),
        "fig2b" => amplitude_preset(
            "fig2b",
            "steady-state amplitude versus hop strength, P = P0",
            vec![bare_series, Axis::linspace(AxisVariable::HopStrength, 0.0, 3.0, 301)],
            0.0,
        ),
        "fig3a" => line_preset(
            "fig3a",
            "E_N(F1M1) versus detuning for P in {0.5, 1, 1.5} P0, xi = 0",
            base(""),
            series(AxisVariable::DrivePower, &[0.025, 0.05, 0.075]),
            detuning(0.0, 2.0, 201),
        ),
        "fig3b" => line_preset(
            "fig3b",
            "E_N(F1M1) versus detuning for several thermal occupations, xi = 0",
            base(""),
            series(AxisVariable::ThermalOccupation, &[836.0, 4e3, 2e4]),
            detuning(0.0, 2.0, 201),
        ),
        "fig3c" => line_preset(
            "fig3c",
            "E_N(F1M1) versus detuning for several hop strengths",
            base(""),
            series(AxisVariable::HopStrength, &[0.0, 0.5, 1.0]),
            detuning(0.0, 2.0, 201),
        ),
        "fig4a" => {
            let mut c = base("");
            c.bath = BathSpec::ideal(0.0);
            line_preset(
                "fig4a",
                "E_N(F1M1) versus detuning for several squeezed photon numbers, ideal correlation, xi = 0",
                c,
                series(AxisVariable::PhotonNumber, &[0.0, 0.01, 0.05, 0.1]),
                detuning(0.0, 2.0, 201),
            )
        }
        "fig4b" => {
            let mut c = base("");
            c.bath = BathSpec::ideal(0.01);
            line_preset(
                "fig4b",
                "E_N(F1M1) versus detuning for several hop strengths, N = 0.01, ideal correlation",
                c,
                series(AxisVariable::HopStrength, &[0.0, 0.5, 1.0]),
                detuning(0.0, 3.0, 301),
            )
        }
        "fig5" => {
            let mut c = base("stability conditions s1, s2 over detuning and hop strength");
            c.bath = BathSpec::ideal(0.01);
            c.axes = vec![
                detuning(0.0, 2.0, SURFACE_POINTS),
                Axis::linspace(AxisVariable::HopStrength, 0.0, 2.0, SURFACE_POINTS),
            ];
            c.notes = vec![format!(
                "grid resolution {SURFACE_POINTS} x {SURFACE_POINTS} (delta x xi); coupling G from P = P0"
            )];
            Preset {
                name: "fig5",
                kind: PresetKind::Stability,
                config: c,
                plot_columns: vec!["s1", "s2"],
            }
        }
        "fig6a" | "fig6b" | "fig6c" => {
            let (n, name) = match name {
                "fig6a" => (0.025, "fig6a"),
                "fig6b" => (0.05, "fig6b"),
                _ => (0.1, "fig6c"),
            };
            Preset {
                name,
                kind: PresetKind::Sweep,
                config: surface(
                    &format!("E_N over detuning and hop strength, N = {n}, ideal correlation"),
                    n,
                ),
                plot_columns: vec!["EN_F1F2", "EN_F1M1"],
            }
        }
        "fig7" => {
            let mut c = surface(
                "coherent-state teleportation fidelity over detuning and hop strength, N = 0.05, ideal correlation",
                0.05,
            );
            c.notes.push("fidelity is emitted only where the full drift matrix is Hurwitz".into());
            Preset {
                name: "fig7",
                kind: PresetKind::Sweep,
                config: c,
                plot_columns: vec!["F_teleport", "F_bound"],
            }
        }
        other => {
            return Err(Error::UnknownPreset {
                name: other.to_string(),
                available: PRESET_NAMES.to_vec(),
            })
        }
    };
    Ok(p)
}

/// gnuplot script reading `<name>.csv` from the same directory.
pub fn gnuplot_script(p: &Preset) -> String {
    let mut s = String::new();
    let cfg = &p.config;
    let csv = format!("{}.csv", p.name);
    let _ = writeln!(s, "# {}", cfg.title);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile columnheaders");
    let _ = writeln!(s, "set terminal pngcairo size 900,650");
    let x_name = cfg.axes.last().map(|a| a.variable.column()).unwrap_or("");
    let y_name = cfg.axes[0].variable.column();
    let surface = cfg.axes[0].values.len() > 8;
    for col in &p.plot_columns {
        let _ = writeln!(s, "set output '{}_{}.png'", p.name, col);
        let _ = writeln!(s, "set title '{} {}' noenhanced", p.name, col);
        if surface {
            let _ = writeln!(s, "set xlabel '{x_name}' noenhanced");
            let _ = writeln!(s, "set ylabel '{y_name}' noenhanced");
            let _ = writeln!(
                s,
                "plot '{csv}' using (column('{x_name}')):(column('{y_name}')):(column('{col}')) with points pt 5 ps 0.6 palette notitle"
            );
        } else {
            let vals: Vec<String> = cfg.axes[0].values.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "set xlabel '{x_name}' noenhanced");
            let _ = writeln!(s, "set ylabel '{col}' noenhanced");
            let _ = writeln!(s, "vals = \"{}\"", vals.join(" "));
            let _ = writeln!(
                s,
                "plot for [v in vals] '{csv}' using (column('{x_name}')):(abs(column('{y_name}') - v) <= 1e-12 * (1 + abs(v)) ? column('{col}') : 1/0) with points pt 7 ps 0.4 title sprintf('{y_name} = %s', v) noenhanced"
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Thermal;

    #[test]
    fn every_name_resolves_and_validates() {
        for name in PRESET_NAMES {
            let p = fig_preset(name).unwrap();
            assert_eq!(p.name, name);
            p.config.validate_sweep().unwrap();
            assert!(!gnuplot_script(&p).is_empty());
        }
    }

    #[test]
    fn unknown_name_lists_presets() {
        match fig_preset("fig9") {
            Err(Error::UnknownPreset { name, available }) => {
                assert_eq!(name, "fig9");
                assert!(available.contains(&"fig6b"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fig3a_axes() {
        let c = fig_preset("fig3a").unwrap().config;
        assert_eq!(c.base.hop_strength, 0.0);
        assert_eq!(c.bath, BathSpec::vacuum());
        assert_eq!(c.axes[0].values, vec![0.025, 0.05, 0.075]);
        assert_eq!(c.axes[1].values.len(), 201);
        assert_eq!(c.axes[1].values[200], 2.0);
    }

    #[test]
    fn fig6b_bath_and_grid() {
        let c = fig_preset("fig6b").unwrap().config;
        assert!(c.bath.ideal);
        assert_eq!(c.bath.photon_number, 0.05);
        assert!((c.bath.correlation - (0.05f64 * 1.05).sqrt()).abs() < 1e-15);
        assert_eq!(c.base.thermal, Thermal::Occupation(836.0));
        assert_eq!(c.grid().len(), SURFACE_POINTS * SURFACE_POINTS);
    }

    #[test]
    fn fig2b_is_bare_mode() {
        let c = fig_preset("fig2b").unwrap().config;
        assert!(matches!(c.base.detuning, DetuningMode::Bare(_)));
        assert_eq!(c.base.drive_power, [P0_AMPLITUDE; 2]);
        assert_eq!(c.axes[0].values, vec![0.0, 0.5, 1.0, 1.5]);
        assert_eq!(*c.axes[1].values.last().unwrap(), 3.0);
        assert_eq!(c.branch_policy, BranchPolicy::All);
    }
}
