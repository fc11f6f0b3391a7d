//! Acceptance criteria 1–11. Each test writes one `PASS`/`FAIL` line to
//! stderr (uncaptured) before asserting.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use optomech::config::{BathSpec, SweepConfig};
use optomech::dynamics::build_reduced;
use optomech::gaussian::{fidelity_bound, log_negativity, PairCovariance};
use optomech::lyapunov::{is_hurwitz, solve_lyapunov};
use optomech::params::thermal_occupation;
use optomech::presets::{fig_preset, PresetKind, PRESET_NAMES};
use optomech::stability::axis_detuning;
use optomech::steady::steady_states;
use optomech::sweep::{evaluate_point, run_stability, run_sweep, PointOptions, ResultRecord};
use optomech::{DetuningMode, Matrix64, PhysicalParams, SqueezedBath, Thermal};

const F1M1: usize = 0;
const F1F2: usize = 3;

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {tag} {name}: {detail}");
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

/// Records grouped by their first coordinate, in grid order.
fn series(records: &[ResultRecord]) -> Vec<(f64, Vec<&ResultRecord>)> {
    let mut out: Vec<(f64, Vec<&ResultRecord>)> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some((v, rows)) if *v == r.coords[0] => rows.push(r),
            _ => out.push((r.coords[0], vec![r])),
        }
    }
    out
}

/// `(Δ, E_N)` at the first maximum over stable points, or `None` when no
/// stable point is entangled.
fn peak(rows: &[&ResultRecord], pair: usize) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for r in rows {
        if let Some(e) = r.log_neg[pair] {
            if e > 0.0 && best.is_none_or(|(_, b)| e > b) {
                best = Some((*r.coords.last().unwrap(), e));
            }
        }
    }
    best
}

fn run_preset(name: &str) -> (SweepConfig, Vec<ResultRecord>) {
    let p = fig_preset(name).unwrap();
    let table = run_sweep(&p.config).unwrap();
    (p.config, table.records)
}

#[test]
fn criterion_01_closed_form_lyapunov() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let wm = 2.0 * PI * rng.gen_range(1e6..5e7);
        let mut p = PhysicalParams::reference();
        p.mech_freq = [wm; 2];
        p.mech_damping = [wm * rng.gen_range(1e-6..1e-3); 2];
        p.cavity_decay = [wm * rng.gen_range(0.05..5.0); 2];
        p.drive_power = [0.0; 2];
        p.hop_strength = 0.0;
        let nbar = rng.gen_range(0.0..1e4);
        p.thermal = Thermal::Occupation(nbar);
        p.detuning = DetuningMode::Effective([wm * rng.gen_range(-3.0..3.0); 2]);
        let n = rng.gen_range(0.0..3.0);
        let bath = SqueezedBath {
            photon_number: n,
            correlation: 0.0,
        };
        let pr = evaluate_point(&p, &bath, &PointOptions::default()).unwrap();
        let w = &pr.branches[0].measures.as_ref().unwrap().covariance;
        let d = [nbar + 0.5, nbar + 0.5, n + 0.5, n + 0.5];
        let want = Matrix64::from_diagonal(&[d, d].concat());
        let err = (w - &want).max_abs() / want.max_abs();
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "closed-form Lyapunov oracle",
        worst <= 1e-10 && secs < 1.0,
        &format!("worst relative error {worst:.2e} over 100 draws, {secs:.3} s"),
    );
}

#[test]
fn criterion_02_tmsv_oracle() {
    let mut worst = 0.0f64;
    for n in [1e-3f64, 0.05, 0.5, 3.0] {
        let m = (n * (n + 1.0)).sqrt();
        let a = n + 0.5;
        let pc = PairCovariance::from_blocks([[a, 0.0], [0.0, a]], [[a, 0.0], [0.0, a]], [[m, 0.0], [0.0, -m]]);
        let en = log_negativity(&pc).unwrap().log_neg;
        worst = worst.max((en - 2.0 * n.sqrt().asinh()).abs());
    }
    report(2, "two-mode squeezed vacuum oracle", worst <= 1e-9, &format!("worst absolute error {worst:.2e}"));
}

#[test]
fn criterion_03_thermal_occupation() {
    let n = thermal_occupation(2.0 * PI * 10e6, 0.4);
    report(
        3,
        "thermal occupation at 10 MHz, 0.4 K",
        (827.0..=845.0).contains(&n),
        &format!("n = {n:.3}"),
    );
}

#[test]
fn criterion_04_power_dependence() {
    let start = Instant::now();
    let (_, records) = run_preset("fig3a");
    let secs = start.elapsed().as_secs_f64();
    let mut ok = secs < 10.0;
    let mut detail = Vec::new();
    let mut peaks = Vec::new();
    for (power, rows) in series(&records) {
        // positive interval around Δ = 1: the run of entangled stable points containing it
        let idx = rows
            .iter()
            .position(|r| (r.coords[1] - 1.0).abs() < 1e-9)
            .unwrap();
        let positive = |k: usize| rows[k].log_neg[F1M1].is_some_and(|e| e > 0.0);
        let around = positive(idx) && positive(idx - 1) && positive(idx + 1);
        let pk = peak(&rows, F1M1);
        let in_window = pk.is_some_and(|(d, _)| (0.7..=1.3).contains(&d));
        let unstable = rows.iter().filter(|r| r.stable == Some(false)).count();
        ok &= around && in_window;
        detail.push(format!(
            "P = {power} W: peak {pk:?}, positive around 1: {around}, unstable points {unstable}"
        ));
        peaks.push(pk.map_or(0.0, |p| p.1));
    }
    let increasing = peaks.windows(2).all(|w| w[1] > w[0]);
    ok &= increasing;
    detail.push(format!("peaks increasing in P: {increasing}, {secs:.2} s"));
    report(4, "E_N(F1M1) versus drive power", ok, &detail.join("; "));
}

fn peaks_strictly_decreasing(name: &str) -> (bool, String) {
    let (_, records) = run_preset(name);
    let peaks: Vec<(f64, Option<(f64, f64)>)> = series(&records)
        .into_iter()
        .map(|(v, rows)| (v, peak(&rows, F1M1)))
        .collect();
    let vals: Vec<f64> = peaks.iter().map(|p| p.1.map_or(0.0, |x| x.1)).collect();
    let ok = vals.windows(2).all(|w| w[1] < w[0]);
    (ok, format!("{name} peaks {peaks:?}"))
}

#[test]
fn criterion_05_thermal_and_squeezing_monotonicity() {
    let (a, da) = peaks_strictly_decreasing("fig3b");
    let (b, db) = peaks_strictly_decreasing("fig4a");
    report(5, "peak E_N(F1M1) decreasing in n and in N", a && b, &format!("{da}; {db}"));
}

/// Argmax over `Δ` of the collective mirror–field negativity of the reduced
/// model, with the coupling taken from the full steady state.
fn reduced_optimum(xi: f64, bath: &SqueezedBath<f64>) -> Option<(f64, f64)> {
    let base = PhysicalParams::reference();
    let wm = base.omega_m();
    let mut best: Option<(f64, f64)> = None;
    for k in 0..=600 {
        let delta = 3.0 * k as f64 / 600.0;
        let p = base.clone().with_effective_detuning(delta * wm).with_hop(xi * wm);
        let ss = &steady_states(&p).ok()?[0];
        let model = build_reduced(&p, ss.eff_coupling[0], axis_detuning(&p, ss)).ok()?;
        if !is_hurwitz(&model.drift).ok()?.is_hurwitz {
            continue;
        }
        let q = model.normalized_diffusion(bath, p.derived().thermal_occ[0]);
        let w = solve_lyapunov(&model.drift, &q).ok()?.w;
        let e = log_negativity(&PairCovariance::new(w).ok()?).ok()?.log_neg;
        if e > 0.0 && best.is_none_or(|(_, b)| e > b) {
            best = Some((delta, e));
        }
    }
    best
}

#[test]
fn criterion_06_peak_shift() {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["fig3c", "fig4b"] {
        let (_, records) = run_preset(name);
        let argmax: Vec<(f64, Option<f64>)> = series(&records)
            .into_iter()
            .map(|(xi, rows)| (xi, peak(&rows, F1M1).map(|p| p.0)))
            .collect();
        let defined = argmax.iter().all(|a| a.1.is_some());
        let nondecreasing = defined && argmax.windows(2).all(|w| w[1].1 >= w[0].1);
        ok &= nondecreasing;
        detail.push(format!("{name} argmax {argmax:?} nondecreasing: {nondecreasing}"));
    }
    let bath = SqueezedBath::ideal(0.01);
    for xi in [0.0, 0.5, 1.0] {
        match reduced_optimum(xi, &bath) {
            Some((delta, e)) => {
                let red = delta - xi;
                let tracks = (red - 1.0).abs() <= 0.2;
                ok &= tracks;
                detail.push(format!(
                    "reduced xi = {xi}: optimum delta = {delta:.3} (E_N {e:.4}), effective detuning {red:.3}, within 20%: {tracks}"
                ));
            }
            None => {
                ok = false;
                detail.push(format!("reduced xi = {xi}: no entangled stable point"));
            }
        }
    }
    report(6, "optimum shifts with hop strength", ok, &detail.join("; "));
}

#[test]
fn criterion_07_stability_map() {
    let p = fig_preset("fig5").unwrap();
    assert_eq!(p.kind, PresetKind::Stability);
    let map = run_stability(&p.config).unwrap();
    let mut outside = Vec::new();
    let mut upper = 0;
    for c in &map.cells {
        if c.xi + 1e-12 >= c.delta {
            upper += 1;
            let holds = c.report.as_ref().is_ok_and(|r| r.conditions_hold());
            if !holds {
                outside.push((c.delta, c.xi));
            }
        }
    }
    for (d, x) in &map.disagreements {
        let _ = writeln!(std::io::stderr(), "  stability disagreement at delta = {d}, xi = {x}");
    }
    let frac = map.agreement_fraction();
    let ok = outside.is_empty() && frac >= 0.99 && map.errors == 0;
    report(
        7,
        "stability conditions on the detuning x hop grid",
        ok,
        &format!(
            "{} of {upper} points with xi >= delta violate s1 > 0 and s2 > 0 (first {:?}); agreement {:.4} with {} disagreements; errors {}",
            outside.len(),
            outside.first(),
            frac,
            map.disagreements.len(),
            map.errors
        ),
    );
}

#[test]
fn criterion_08_entanglement_transfer() {
    let base = PhysicalParams::reference();
    let wm = base.omega_m();
    let p = base.with_effective_detuning(1.5 * wm).with_hop(wm);
    let eval = |n: f64| {
        let pr = evaluate_point(&p, &BathSpec::ideal(n).bath(), &PointOptions::default()).unwrap();
        let b = &pr.branches[pr.selected[0]];
        (
            b.hurwitz.is_hurwitz,
            b.hurwitz.abscissa / wm,
            b.measures.as_ref().map(|m| (m.entanglement[F1M1].result.log_neg, m.entanglement[F1F2].result.log_neg)),
        )
    };
    let (s0, a0, m0) = eval(0.0);
    let (s1, a1, m1) = eval(0.05);
    let ok = match (m0, m1) {
        (Some((fm0, ff0)), Some((fm1, ff1))) => ff1 > ff0 && fm1 < fm0,
        _ => false,
    };
    report(
        8,
        "F1F2 gains and F1M1 loses as N rises",
        ok,
        &format!(
            "N = 0: stable {s0} (abscissa {a0:.3e} omega_m), (E_F1M1, E_F1F2) = {m0:?}; N = 0.05: stable {s1} (abscissa {a1:.3e} omega_m), {m1:?}"
        ),
    );
}

#[test]
fn criterion_09_fidelity_consistency() {
    let exact = fidelity_bound(0.0f64) == 0.5;
    let (_, records) = run_preset("fig7");
    let mut worst = 0.0f64;
    let mut leaked = 0;
    let mut stable = 0;
    for r in &records {
        if r.stable == Some(true) {
            stable += 1;
            let e = r.log_neg[F1F2].unwrap();
            let direct = 1.0 / (1.0 + (-e).exp());
            worst = worst.max((r.fidelity_bound.unwrap() - direct).abs());
            if r.fidelity.is_none() {
                leaked += 1;
            }
        } else if r.fidelity.is_some() || r.fidelity_bound.is_some() {
            leaked += 1;
        }
    }
    let ok = exact && worst <= 1e-12 && leaked == 0 && stable > 0;
    report(
        9,
        "fidelity bound and stable-only emission",
        ok,
        &format!(
            "bound(0) = 1/2 exactly: {exact}; worst bound mismatch {worst:.2e}; {stable} stable of {} points; misplaced values {leaked}",
            records.len()
        ),
    );
}

#[test]
fn criterion_10_physicality() {
    let mut checked = 0;
    let mut bad = Vec::new();
    for name in PRESET_NAMES {
        let p = fig_preset(name).unwrap();
        if p.kind != PresetKind::Sweep {
            continue;
        }
        for r in run_sweep(&p.config).unwrap().records {
            if r.stable != Some(true) {
                continue;
            }
            checked += 1;
            let fine = matches!((r.min_symplectic, r.lyapunov_residual), (Some(nu), Some(res)) if nu >= 0.5 - 1e-8 && res < 1e-9);
            if !fine {
                bad.push((name, r.coords.clone(), r.min_symplectic, r.lyapunov_residual, r.error.clone()));
            }
        }
    }
    report(
        10,
        "physical covariance at every stable preset point",
        bad.is_empty() && checked > 0,
        &format!("{checked} stable points checked, {} violations (first {:?})", bad.len(), bad.first()),
    );
}

#[test]
fn criterion_11_performance() {
    let p = PhysicalParams::reference();
    let bath = SqueezedBath::ideal(0.05);
    let opts = PointOptions::default();
    let reps = 200;
    evaluate_point(&p, &bath, &opts).unwrap();
    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(evaluate_point(&p, &bath, &opts).unwrap());
    }
    let per_point = t.elapsed().as_secs_f64() / reps as f64;

    let mut preset = fig_preset("fig6b").unwrap();
    preset.config.workers = Some(1);
    let t = Instant::now();
    let table = run_sweep(&preset.config).unwrap();
    let grid = t.elapsed().as_secs_f64();
    assert_eq!(table.records.len(), 101 * 101);
    report(
        11,
        "performance",
        per_point < 5e-3 && grid < 60.0,
        &format!("single point {:.3} ms, 101 x 101 preset {grid:.2} s on one worker", per_point * 1e3),
    );
}
