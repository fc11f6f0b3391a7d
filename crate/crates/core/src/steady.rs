//! Semiclassical fixed point of the driven, hopping-coupled cavities.
//!
//! The amplitudes satisfy `α_j a_j − iξ a_k = E_j` (k ≠ j) with
//! `α_j = κ_j + iΔ_j`. With the bare detuning fixed, the radiation-pressure
//! shift `Δ_j = Δ_0j − g_j²|a_j|²/ω_mj` makes the system nonlinear and
//! possibly multistable.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{DetuningMode, PhysicalParams};

/// Relative residual required of every returned fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-10;
const SEEDS: usize = 8;
const DAMPING: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    /// Intracavity amplitudes `a_j`.
    pub amp: [Complex64; 2],
    /// Static mirror displacement `q_j = g_j|a_j|²/ω_mj`.
    pub displacement: [f64; 2],
    /// Always zero.
    pub momentum: [f64; 2],
    /// `Δ_j` entering the steady-state equations, rad/s.
    pub eff_detuning: [f64; 2],
    /// `G_j = √2 g_j |a_j|`, rad/s.
    pub eff_coupling: [f64; 2],
    pub alpha: [Complex64; 2],
    /// `‖R‖/max_j |E_j|` of the fixed-point equations.
    pub residual: f64,
}

/// `√2 g |a|`; the global phase of `a` is rotated away.
pub fn effective_coupling(g: f64, amp: Complex64) -> f64 {
    std::f64::consts::SQRT_2 * g * amp.norm()
}

fn fixed_point_residual(
    kappa: [f64; 2],
    delta: [f64; 2],
    xi: f64,
    e: [f64; 2],
    a: [Complex64; 2],
) -> f64 {
    let i = Complex64::i();
    let r: f64 = (0..2)
        .map(|j| {
            let alpha = Complex64::new(kappa[j], delta[j]);
            (-alpha * a[j] + i * xi * a[1 - j] + e[j]).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    let scale = e[0].abs().max(e[1].abs());
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

fn assemble(params: &PhysicalParams, delta: [f64; 2], amp: [Complex64; 2]) -> SteadyState {
    let d = params.derived();
    let mut ss = SteadyState {
        amp,
        displacement: [0.0; 2],
        momentum: [0.0; 2],
        eff_detuning: delta,
        eff_coupling: [0.0; 2],
        alpha: [Complex64::new(0.0, 0.0); 2],
        residual: 0.0,
    };
    for j in 0..2 {
        let g = d.bare_coupling[j];
        ss.displacement[j] = g * amp[j].norm_sqr() / params.mech_freq[j];
        ss.eff_coupling[j] = effective_coupling(g, amp[j]);
        ss.alpha[j] = Complex64::new(params.cavity_decay[j], delta[j]);
    }
    ss.residual = fixed_point_residual(
        params.cavity_decay,
        delta,
        params.hop_strength,
        d.drive_amp,
        amp,
    );
    ss
}

fn closed_form(
    kappa: [f64; 2],
    delta: [f64; 2],
    xi: f64,
    e: [f64; 2],
) -> Result<[Complex64; 2]> {
    let i = Complex64::i();
    let a1 = Complex64::new(kappa[0], delta[0]);
    let a2 = Complex64::new(kappa[1], delta[1]);
    let den = a1 * a2 + xi * xi;
    if den.norm() <= 1e-12 * kappa[0] * kappa[1] {
        return Err(Error::DegenerateConfiguration {
            denominator: den.norm(),
        });
    }
    Ok([(a2 * e[0] + i * xi * e[1]) / den, (a1 * e[1] + i * xi * e[0]) / den])
}

/// Amplitudes for prescribed effective detunings `Δ_1`, `Δ_2` (rad/s, in
/// the sign used by the steady-state equations).
pub fn solve_fixed_detuning(params: &PhysicalParams, delta1: f64, delta2: f64) -> Result<SteadyState> {
    let e = params.derived().drive_amp;
    let delta = [delta1, delta2];
    let amp = closed_form(params.cavity_decay, delta, params.hop_strength, e)?;
    Ok(assemble(params, delta, amp))
}

/// Every fixed point for the bare detunings `Δ_01`, `Δ_02`, sorted by `|a_1|`.
pub fn solve_self_consistent(params: &PhysicalParams, d01: f64, d02: f64) -> Result<Vec<SteadyState>> {
    let d = params.derived();
    let c = [0, 1].map(|j| d.bare_coupling[j].powi(2) / params.mech_freq[j]);
    let symmetric = params.is_symmetric() && (d01 - d02).abs() <= 1e-12 * d01.abs().max(d02.abs());
    let mut found = if symmetric {
        symmetric_branches(params, c[0], d01)?
    } else {
        general_branches(params, c, [d01, d02])?
    };
    found.sort_by(|a, b| a.amp[0].norm().total_cmp(&b.amp[0].norm()));
    Ok(found)
}

/// Dispatches on the detuning mode; the user-axis detuning is mapped
/// through the configured sign convention.
pub fn steady_states(params: &PhysicalParams) -> Result<Vec<SteadyState>> {
    let s = params.detuning_sign;
    match params.detuning {
        DetuningMode::Effective(d) => Ok(vec![solve_fixed_detuning(
            params,
            s.to_internal(d[0]),
            s.to_internal(d[1]),
        )?]),
        DetuningMode::Bare(d) => solve_self_consistent(params, s.to_internal(d[0]), s.to_internal(d[1])),
    }
}

/// Identical cavities: `a_1 = a_2 = E/(κ + i(Δ − ξ))` with
/// `Δ = Δ_0 − c u`, `u = |a|²`, giving the cubic
/// `c²u³ − 2cd u² + (κ² + d²)u − E² = 0` with `d = Δ_0 − ξ`.
fn symmetric_branches(params: &PhysicalParams, c: f64, d0: f64) -> Result<Vec<SteadyState>> {
    let kappa = params.cavity_decay[0];
    let e = params.derived().drive_amp[0];
    let xi = params.hop_strength;
    let d = d0 - xi;
    let roots = if e == 0.0 {
        vec![0.0]
    } else if c == 0.0 {
        vec![e * e / (kappa * kappa + d * d)]
    } else {
        cubic_roots(c, d, kappa, e)
    };
    let mut out = Vec::with_capacity(roots.len());
    let mut best = f64::INFINITY;
    for u in roots {
        let amp = closed_form(params.cavity_decay, [d0 - c * u; 2], xi, [e; 2])?;
        // re-derive the shift from the amplitude so the residual also
        // checks self-consistency
        let delta = d0 - c * amp[0].norm_sqr();
        let ss = assemble(params, [delta; 2], amp);
        best = best.min(ss.residual);
        if ss.residual < FIXED_POINT_TOL {
            out.push(ss);
        }
    }
    if out.is_empty() {
        return Err(Error::NoConvergence { best_residual: best });
    }
    Ok(dedupe(out))
}

/// Positive real roots of the symmetric cubic on `[0, E²/κ²]`.
pub(crate) fn cubic_roots(c: f64, d: f64, kappa: f64, e: f64) -> Vec<f64> {
    let f = |u: f64| ((c * c * u - 2.0 * c * d) * u + kappa * kappa + d * d) * u - e * e;
    let df = |u: f64| (3.0 * c * c * u - 4.0 * c * d) * u + kappa * kappa + d * d;
    let umax = e * e / (kappa * kappa);
    let mut knots = vec![0.0];
    let disc = d * d - 3.0 * kappa * kappa;
    if disc >= 0.0 {
        let r = disc.sqrt();
        for u in [(2.0 * d - r) / (3.0 * c), (2.0 * d + r) / (3.0 * c)] {
            if u > 0.0 && u < umax {
                knots.push(u);
            }
        }
    }
    knots.push(umax);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        let rising = flo < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (f(mid) < 0.0) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..3 {
            let slope = df(u);
            if slope == 0.0 {
                break;
            }
            let next = u - f(u) / slope;
            if next >= w[0] && next <= w[1] {
                u = next;
            }
        }
        roots.push(u);
    }
    if f(umax) == 0.0 {
        roots.push(umax);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    roots
}

fn general_branches(params: &PhysicalParams, c: [f64; 2], d0: [f64; 2]) -> Result<Vec<SteadyState>> {
    let der = params.derived();
    let e = der.drive_amp;
    let kappa = params.cavity_decay;
    let xi = params.hop_strength;
    let delta_of = |a: &[Complex64; 2]| [0, 1].map(|j| d0[j] - c[j] * a[j].norm_sqr());

    let umax = [0, 1].map(|j| (e[j] / kappa[j]).powi(2));
    let lin = closed_form(kappa, d0, xi, e).unwrap_or([Complex64::new(1.0, 0.0); 2]);
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for k in 0..SEEDS {
        let frac = k as f64 / (SEEDS - 1) as f64;
        let mut a = [0, 1].map(|j| {
            let phase = if lin[j].norm() > 0.0 {
                lin[j] / lin[j].norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            phase * (frac * umax[j]).sqrt()
        });
        for _ in 0..200 {
            let Ok(next) = closed_form(kappa, delta_of(&a), xi, e) else {
                break;
            };
            a = [0, 1].map(|j| a[j] * (1.0 - DAMPING) + next[j] * DAMPING);
        }
        let a = newton(kappa, c, d0, xi, e, a);
        let delta = delta_of(&a);
        let r = fixed_point_residual(kappa, delta, xi, e, a);
        best = best.min(r);
        if r < FIXED_POINT_TOL {
            out.push(assemble(params, delta, a));
        }
    }
    if out.is_empty() {
        return Err(Error::NoConvergence { best_residual: best });
    }
    Ok(dedupe(out))
}

/// Damped Newton on the four real components of `R_j = −(κ_j + iΔ_j(a))a_j
/// + iξa_k + E_j`.
fn newton(
    kappa: [f64; 2],
    c: [f64; 2],
    d0: [f64; 2],
    xi: f64,
    e: [f64; 2],
    mut a: [Complex64; 2],
) -> [Complex64; 2] {
    use crate::linalg::Matrix;
    let eval = |a: &[Complex64; 2]| -> [f64; 4] {
        let delta = [0, 1].map(|j| d0[j] - c[j] * a[j].norm_sqr());
        let mut r = [0.0; 4];
        for j in 0..2 {
            let (x, y) = (a[j].re, a[j].im);
            let b = a[1 - j];
            r[2 * j] = -kappa[j] * x + delta[j] * y - xi * b.im + e[j];
            r[2 * j + 1] = -kappa[j] * y - delta[j] * x + xi * b.re;
        }
        r
    };
    let norm = |r: &[f64; 4]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = eval(&a);
    for _ in 0..60 {
        let mut jac = Matrix::<f64>::zeros(4, 4);
        for j in 0..2 {
            let (x, y) = (a[j].re, a[j].im);
            let delta = d0[j] - c[j] * (x * x + y * y);
            let (rr, ri) = (2 * j, 2 * j + 1);
            let (cx, cy) = (2 * j, 2 * j + 1);
            let (bx, by) = (2 * (1 - j), 2 * (1 - j) + 1);
            jac[(rr, cx)] = -kappa[j] - 2.0 * c[j] * x * y;
            jac[(rr, cy)] = delta - 2.0 * c[j] * y * y;
            jac[(ri, cx)] = -delta + 2.0 * c[j] * x * x;
            jac[(ri, cy)] = -kappa[j] + 2.0 * c[j] * x * y;
            jac[(rr, by)] = -xi;
            jac[(ri, bx)] = xi;
        }
        let Ok(step) = jac.solve(&r.map(|v| -v)) else {
            break;
        };
        let r0 = norm(&r);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [0, 1].map(|j| a[j] + Complex64::new(step[2 * j], step[2 * j + 1]) * t);
            let rt = eval(&trial);
            if norm(&rt) < r0 {
                a = trial;
                r = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    a
}

fn dedupe(mut v: Vec<SteadyState>) -> Vec<SteadyState> {
    v.sort_by(|a, b| a.amp[0].norm().total_cmp(&b.amp[0].norm()));
    let mut out: Vec<SteadyState> = Vec::with_capacity(v.len());
    for s in v {
        let dup = out.iter().any(|o| {
            (0..2).all(|j| (o.amp[j] - s.amp[j]).norm() < 1e-8 * s.amp[j].norm().max(1.0))
        });
        if !dup {
            out.push(s);
        }
    }
    out
}
